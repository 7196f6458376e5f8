//! Build a Hanner polytope from a tree and read off its two representations.

use hannerlab::geometry::hanner_polytope;
use hannerlab::hanner::{facet_normals, parse_expr, vertex_vectors};
use hannerlab::linalg::fmt_rat;

fn main() {
    let h = parse_expr("((I1 +1 I2) +inf I3)").expect("valid tree");
    println!("tree {h}, dual {}", h.dual());

    let vs = vertex_vectors(&h);
    let normals = facet_normals(&h);
    println!("{} vertices, {} facets", vs.len(), normals.len());

    // the hull recovers the same facets from the vertices alone
    let p = hanner_polytope(&h);
    assert_eq!(p.facets().len(), normals.len());
    println!("certified: {}", p.certify());
    println!("|H| = {}, |H°| = {}", fmt_rat(&p.volume()), fmt_rat(&p.polar().volume()));
    println!("P(H) = {}", fmt_rat(&p.volume_product()));
}
