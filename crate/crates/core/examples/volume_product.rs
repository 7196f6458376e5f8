//! P(H) = 4^n/n! through hull, polar and triangulation, for every tree.

use hannerlab::geometry::hanner_polytope;
use hannerlab::hanner::canonical_trees;
use hannerlab::linalg::{fmt_rat, int};

fn main() {
    for n in 1..=3 {
        let expected = (1..=n as i64).fold(int(1), |acc, k| acc * int(4) / int(k));
        for h in canonical_trees(n) {
            let p = hanner_polytope(&h).volume_product();
            println!("{h}: P = {} (4^n/n! = {}) {}", fmt_rat(&p), fmt_rat(&expected), p == expected);
        }
    }
}
