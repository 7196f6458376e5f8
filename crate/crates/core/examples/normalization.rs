//! Perturb the cube, move it into position B_1 ⊆ K' ⊆ B_∞ and compare
//! Hausdorff distances before and after.

use hannerlab::geometry::{hanner_polytope, hausdorff_sq, perturb};
use hannerlab::hanner::HannerExpr;
use hannerlab::linalg::{fmt_rat, rat, to_f64};
use hannerlab::witness::{normalize_position, HannerContext};

fn main() {
    let h = HannerExpr::cube(3);
    let ctx = HannerContext::new(&h);
    let cross = hanner_polytope(&HannerExpr::cross(3));
    for seed in 0..3 {
        let k = perturb(&h, &rat(1, 50), seed).expect("small delta");
        let norm = normalize_position(&k, &ctx).expect("near H");
        let before = hausdorff_sq(&k, &ctx.body).expect("bounded");
        let after = hausdorff_sq(&norm.body, &ctx.body).expect("bounded");
        let sandwiched = cross.vertices().iter().all(|v| norm.body.contains(v));
        println!(
            "seed {seed}: d_H^2 {} -> {} (~{:.3e} -> {:.3e}), contains B_1: {sandwiched}",
            fmt_rat(&before),
            fmt_rat(&after),
            to_f64(&before),
            to_f64(&after)
        );
    }
}
