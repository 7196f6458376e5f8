//! The volume function is stationary at the centroids along the frames,
//! and a moved centroid breaks that.

use hannerlab::faces::{FaceLattice, Fault};
use hannerlab::flags::{gradient, FlagSet};
use hannerlab::hanner::parse_expr;
use hannerlab::linalg::fmt_rat;
use num_traits::Zero;

fn largest_frame_pairing(lat: &FaceLattice) -> String {
    let fs = FlagSet::new(lat);
    let grad = gradient(&lat.centroids(), &fs).expect("centroid flags are nondegenerate");
    let worst = lat
        .frames()
        .iter()
        .enumerate()
        .flat_map(|(i, fr)| fr.dirs.iter().map(move |d| (i, d)))
        .map(|(i, d)| grad[i].dot(d))
        .find(|x| !x.is_zero());
    worst.map(|x| fmt_rat(&x)).unwrap_or_else(|| "0 on every frame direction".into())
}

fn main() {
    let h = parse_expr("(((I1 +1 I2) +1 I3) +inf I4)").expect("valid tree");
    println!("exact lattice: {}", largest_frame_pairing(&FaceLattice::new(&h)));
    let broken = FaceLattice::with_fault(&h, Fault::PerturbedCentroid);
    println!("moved centroid: {}", largest_frame_pairing(&broken));
}
