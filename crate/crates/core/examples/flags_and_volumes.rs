//! Every flag simplex of the centroid assignment has the same volume.

use hannerlab::faces::FaceLattice;
use hannerlab::flags::{equal_volumes_check, volume_function, FlagSet};
use hannerlab::hanner::canonical_trees;
use hannerlab::linalg::fmt_rat;

fn main() {
    for h in canonical_trees(3) {
        let lat = FaceLattice::new(&h);
        let fs = FlagSet::new(&lat);
        let r = equal_volumes_check(&lat.centroids(), &fs);
        let dual = FaceLattice::new(&h.dual());
        let v_star = volume_function(&dual.centroids(), &FlagSet::new(&dual));
        println!(
            "{h}: {} flags, |C_F| = {}, V(C) = {}, V(C)V(C*) = {}",
            r.flags,
            r.common.as_ref().map(fmt_rat).unwrap_or_else(|| "unequal".into()),
            fmt_rat(&r.total),
            fmt_rat(&(&r.total * &v_star))
        );
    }
}
