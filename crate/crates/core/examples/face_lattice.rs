//! Faces, centroids and affine frames of a Hanner polytope.

use hannerlab::faces::{epsilon_gap, verify_abc, FaceLattice};
use hannerlab::hanner::parse_expr;
use hannerlab::linalg::fmt_rat;
use hannerlab::verify::face_text;

fn main() {
    let h = parse_expr("((I1 +1 I2) +inf I3)").expect("valid tree");
    let lat = FaceLattice::new(&h);
    println!("f-vector {:?}", lat.f_vector());
    for i in 0..lat.len().min(6) {
        let fr = lat.frame(i);
        let c: Vec<String> = fr.c.iter().map(fmt_rat).collect();
        println!(
            "dim {} face {}: centroid ({}), frame dim {}",
            lat.dim(i),
            face_text(lat.face(i)),
            c.join(", "),
            fr.dirs.len()
        );
    }
    let r = verify_abc(&h);
    println!("conditions (a), (b), (c) on {} faces: {}", r.faces_checked, r.passed());
    println!("epsilon gap {}", fmt_rat(&epsilon_gap(&h)));
}
