//! Faces of Hanner polytopes and their affine frames.
//!
//! A face is encoded along the expression tree. At a leaf it is one endpoint
//! of the interval; at an ℓ1 node it is a pair whose components are proper
//! faces or `Empty`; at an ℓ∞ node the components are proper faces or
//! `Whole`. `Empty` and `Whole` on their own are the improper faces.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hanner::{facet_normals, HannerExpr, SumKind};
use crate::linalg::{int, rat, span_basis, AffSub, Rat, Vector};
use crate::lp::{maximize, LinProg, LpStatus};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FaceError {
    #[error("the improper face {0:?} has no centroid or frame")]
    Improper(Face),
    #[error("face {0:?} does not belong to this tree")]
    Mismatch(Face),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Face {
    Empty,
    Whole,
    Plus,
    Minus,
    Sum(Box<Face>, Box<Face>),
}

impl Face {
    pub fn pair(a: Face, b: Face) -> Face {
        Face::Sum(Box::new(a), Box::new(b))
    }

    pub fn is_proper(&self) -> bool {
        !matches!(self, Face::Empty | Face::Whole)
    }
}

/// Dimension, with `dim Empty = -1` and `dim Whole = n`.
pub fn face_dim(h: &HannerExpr, f: &Face) -> Result<i64, FaceError> {
    Ok(match (h, f) {
        (_, Face::Empty) => -1,
        (_, Face::Whole) => h.n() as i64,
        (HannerExpr::Leaf(_), Face::Plus | Face::Minus) => 0,
        (HannerExpr::Sum(k, a, b), Face::Sum(f1, f2)) => {
            check_pair(*k, f1, f2, f)?;
            let d = face_dim(a, f1)? + face_dim(b, f2)?;
            match k {
                SumKind::L1 => d + 1,
                SumKind::Linf => d,
            }
        }
        _ => return Err(FaceError::Mismatch(f.clone())),
    })
}

fn check_pair(k: SumKind, f1: &Face, f2: &Face, whole: &Face) -> Result<(), FaceError> {
    let ok = match k {
        SumKind::L1 => {
            !matches!(f1, Face::Whole)
                && !matches!(f2, Face::Whole)
                && !(matches!(f1, Face::Empty) && matches!(f2, Face::Empty))
        }
        SumKind::Linf => {
            !matches!(f1, Face::Empty)
                && !matches!(f2, Face::Empty)
                && !(matches!(f1, Face::Whole) && matches!(f2, Face::Whole))
        }
    };
    if ok {
        Ok(())
    } else {
        Err(FaceError::Mismatch(whole.clone()))
    }
}

/// All proper faces, by the three-case rule at every node.
pub fn enumerate_faces(h: &HannerExpr) -> Vec<Face> {
    match h {
        HannerExpr::Leaf(_) => vec![Face::Plus, Face::Minus],
        HannerExpr::Sum(k, a, b) => {
            let (fa, fb) = (enumerate_faces(a), enumerate_faces(b));
            let fill = match k {
                SumKind::L1 => Face::Empty,
                SumKind::Linf => Face::Whole,
            };
            let mut out = Vec::with_capacity(fa.len() + fb.len() + fa.len() * fb.len());
            out.extend(fa.iter().map(|f| Face::pair(f.clone(), fill.clone())));
            out.extend(fb.iter().map(|f| Face::pair(fill.clone(), f.clone())));
            for f1 in &fa {
                for f2 in &fb {
                    out.push(Face::pair(f1.clone(), f2.clone()));
                }
            }
            out
        }
    }
}

/// The dual face in `H°`, whose tree is `h.dual()`.
pub fn dual_face(f: &Face) -> Face {
    match f {
        Face::Empty => Face::Whole,
        Face::Whole => Face::Empty,
        Face::Plus => Face::Plus,
        Face::Minus => Face::Minus,
        Face::Sum(a, b) => Face::pair(dual_face(a), dual_face(b)),
    }
}

/// Face containment, decided summand by summand.
pub fn face_leq(h: &HannerExpr, f: &Face, g: &Face) -> Result<bool, FaceError> {
    Ok(match (f, g) {
        (Face::Empty, _) | (_, Face::Whole) => true,
        (_, Face::Empty) | (Face::Whole, _) => false,
        (Face::Plus, Face::Plus) | (Face::Minus, Face::Minus) => true,
        (Face::Plus, Face::Minus) | (Face::Minus, Face::Plus) => false,
        (Face::Sum(f1, f2), Face::Sum(g1, g2)) => match h {
            HannerExpr::Sum(_, a, b) => face_leq(a, f1, g1)? && face_leq(b, f2, g2)?,
            HannerExpr::Leaf(_) => return Err(FaceError::Mismatch(f.clone())),
        },
        _ => return Err(FaceError::Mismatch(f.clone())),
    })
}

/// Extreme points of a face (all vertices of `H` for `Whole`).
pub fn face_vertices(h: &HannerExpr, f: &Face) -> Vec<Vector> {
    let n_total = total_dim(h);
    face_vertices_in(h, f, n_total)
}

fn total_dim(h: &HannerExpr) -> usize {
    h.leaves().into_iter().max().map_or(0, |m| m + 1)
}

fn face_vertices_in(h: &HannerExpr, f: &Face, n: usize) -> Vec<Vector> {
    match (h, f) {
        (_, Face::Empty) => vec![],
        (HannerExpr::Leaf(j), Face::Plus) => vec![Vector::unit(n, *j)],
        (HannerExpr::Leaf(j), Face::Minus) => vec![-&Vector::unit(n, *j)],
        (HannerExpr::Leaf(j), Face::Whole) => {
            let e = Vector::unit(n, *j);
            vec![e.clone(), -&e]
        }
        (HannerExpr::Sum(k, a, b), _) => {
            let (f1, f2) = match f {
                Face::Whole => (Face::Whole, Face::Whole),
                Face::Sum(f1, f2) => ((**f1).clone(), (**f2).clone()),
                _ => return vec![],
            };
            let (va, vb) = (face_vertices_in(a, &f1, n), face_vertices_in(b, &f2, n));
            match k {
                SumKind::L1 => va.into_iter().chain(vb).collect(),
                SumKind::Linf => va
                    .iter()
                    .flat_map(|x| vb.iter().map(move |y| x + y))
                    .collect(),
            }
        }
        _ => vec![],
    }
}

/// Centroid by the sum rules: weighted average for ℓ1, sum for ℓ∞.
pub fn centroid(h: &HannerExpr, f: &Face) -> Result<Vector, FaceError> {
    if !f.is_proper() {
        return Err(FaceError::Improper(f.clone()));
    }
    let n = total_dim(h);
    Ok(frame_rec(h, f, n, None)?.0)
}

/// `c_F` together with a basis of `A_F - A_F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineFrame {
    pub face: Face,
    pub c: Vector,
    /// RREF basis of the direction space.
    pub dirs: Vec<Vector>,
}

impl AffineFrame {
    pub fn affsub(&self) -> AffSub {
        AffSub::new(self.c.clone(), &self.dirs)
    }
}

/// Deliberate defects used to show that the verification suites can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Fault {
    /// Moves the centroid of the first edge a tenth of the way to one of its vertices.
    PerturbedCentroid,
    /// Swaps the two weights in the ℓ1 clause of the frame recursion.
    WrongL1Weight,
}

pub fn affine_frame(h: &HannerExpr, f: &Face) -> Result<AffineFrame, FaceError> {
    if !f.is_proper() {
        return Err(FaceError::Improper(f.clone()));
    }
    let n = total_dim(h);
    let (c, dirs, _) = frame_rec(h, f, n, None)?;
    Ok(AffineFrame {
        face: f.clone(),
        c,
        dirs: span_basis(&dirs, n),
    })
}

type Frame = (Vector, Vec<Vector>, i64);

fn frame_rec(h: &HannerExpr, f: &Face, n: usize, fault: Option<Fault>) -> Result<Frame, FaceError> {
    match (h, f) {
        (HannerExpr::Leaf(j), Face::Plus) => Ok((Vector::unit(n, *j), vec![], 0)),
        (HannerExpr::Leaf(j), Face::Minus) => Ok((-&Vector::unit(n, *j), vec![], 0)),
        (HannerExpr::Sum(SumKind::L1, a, b), Face::Sum(f1, f2)) => {
            check_pair(SumKind::L1, f1, f2, f)?;
            match (&**f1, &**f2) {
                (_, Face::Empty) => {
                    let (c, mut dirs, d) = frame_rec(a, f1, n, fault)?;
                    dirs.extend(b.leaves().into_iter().map(|i| Vector::unit(n, i)));
                    Ok((c, dirs, d))
                }
                (Face::Empty, _) => {
                    let (c, mut dirs, d) = frame_rec(b, f2, n, fault)?;
                    dirs.extend(a.leaves().into_iter().map(|i| Vector::unit(n, i)));
                    Ok((c, dirs, d))
                }
                _ => {
                    let (c1, d1s, d1) = frame_rec(a, f1, n, fault)?;
                    let (c2, d2s, d2) = frame_rec(b, f2, n, fault)?;
                    let mut alpha = rat(d1 + 1, d1 + d2 + 2);
                    let mut beta = rat(d2 + 1, d1 + d2 + 2);
                    if fault == Some(Fault::WrongL1Weight) {
                        std::mem::swap(&mut alpha, &mut beta);
                    }
                    let c = &c1.scale(&alpha) + &c2.scale(&beta);
                    Ok((c, d1s.into_iter().chain(d2s).collect(), d1 + d2 + 1))
                }
            }
        }
        (HannerExpr::Sum(SumKind::Linf, a, b), Face::Sum(f1, f2)) => {
            check_pair(SumKind::Linf, f1, f2, f)?;
            let (na, nb) = (a.n() as i64, b.n() as i64);
            match (&**f1, &**f2) {
                (_, Face::Whole) => {
                    let (c, dirs, d) = frame_rec(a, f1, n, fault)?;
                    Ok((c, dirs, d + nb))
                }
                (Face::Whole, _) => {
                    let (c, dirs, d) = frame_rec(b, f2, n, fault)?;
                    Ok((c, dirs, d + na))
                }
                _ => {
                    let (c1, d1s, d1) = frame_rec(a, f1, n, fault)?;
                    let (c2, d2s, d2) = frame_rec(b, f2, n, fault)?;
                    let tilt = &c1.scale(&rat(1, na - d1)) - &c2.scale(&rat(1, nb - d2));
                    let mut dirs: Vec<Vector> = d1s.into_iter().chain(d2s).collect();
                    dirs.push(tilt);
                    Ok((&c1 + &c2, dirs, d1 + d2))
                }
            }
        }
        _ => Err(FaceError::Mismatch(f.clone())),
    }
}

/// All proper faces of one tree with their dimensions and frames.
#[derive(Clone, Debug)]
pub struct FaceLattice {
    h: HannerExpr,
    n: usize,
    faces: Vec<Face>,
    dims: Vec<usize>,
    frames: Vec<AffineFrame>,
    index: HashMap<Face, usize>,
    fault: Option<Fault>,
}

impl FaceLattice {
    pub fn new(h: &HannerExpr) -> Self {
        Self::build(h, None)
    }

    /// Lattice whose frames carry a deliberate defect.
    pub fn with_fault(h: &HannerExpr, fault: Fault) -> Self {
        Self::build(h, Some(fault))
    }

    fn build(h: &HannerExpr, fault: Option<Fault>) -> Self {
        let n = h.n();
        let mut faces = enumerate_faces(h);
        let dim = |f: &Face| face_dim(h, f).expect("enumerated faces are valid") as usize;
        faces.sort_by(|x, y| (dim(x), x).cmp(&(dim(y), y)));
        let dims: Vec<usize> = faces.iter().map(dim).collect();
        let mut frames: Vec<AffineFrame> = faces
            .iter()
            .map(|f| {
                let (c, dirs, _) = frame_rec(h, f, n, fault).expect("enumerated faces are valid");
                AffineFrame {
                    face: f.clone(),
                    c,
                    dirs: span_basis(&dirs, n),
                }
            })
            .collect();
        if fault == Some(Fault::PerturbedCentroid) {
            if let Some(i) = dims.iter().position(|&d| d == 1) {
                let v = face_vertices(h, &faces[i]).swap_remove(0);
                let c = &frames[i].c;
                frames[i].c = c.axpy(&rat(1, 10), &(&v - c));
            }
        }
        let index = faces.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
        FaceLattice {
            h: h.clone(),
            n,
            faces,
            dims,
            frames,
            index,
            fault,
        }
    }

    pub fn tree(&self) -> &HannerExpr {
        &self.h
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fault(&self) -> Option<Fault> {
        self.fault
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Proper faces ordered by dimension.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, i: usize) -> &Face {
        &self.faces[i]
    }

    pub fn dim(&self, i: usize) -> usize {
        self.dims[i]
    }

    pub fn index_of(&self, f: &Face) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn frame(&self, i: usize) -> &AffineFrame {
        &self.frames[i]
    }

    pub fn frames(&self) -> &[AffineFrame] {
        &self.frames
    }

    /// The centroid assignment `C`.
    pub fn centroids(&self) -> Vec<Vector> {
        self.frames.iter().map(|fr| fr.c.clone()).collect()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        face_leq(&self.h, &self.faces[i], &self.faces[j]).expect("faces of one tree")
    }

    /// Per-dimension face counts `f_0, ..., f_{n-1}`.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for &d in &self.dims {
            out[d] += 1;
        }
        out
    }

    /// For every face, the index of its dual face in `dual`.
    pub fn dual_map(&self, dual: &FaceLattice) -> Vec<usize> {
        self.faces
            .iter()
            .map(|f| dual.index_of(&dual_face(f)).expect("dual lattice of the dual tree"))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Condition {
    A,
    B,
    C,
}

#[derive(Clone, Debug, Serialize)]
pub struct AbcViolation {
    pub face: Face,
    pub condition: Condition,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AbcReport {
    pub faces_checked: usize,
    pub violations: Vec<AbcViolation>,
}

impl AbcReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn verify_abc(h: &HannerExpr) -> AbcReport {
    verify_abc_lattice(&FaceLattice::new(h), &FaceLattice::new(&h.dual()))
}

/// Checks conditions (a), (b), (c) for every face of `lat` against the frames
/// of `dual` (a lattice of `h.dual()`).
pub fn verify_abc_lattice(lat: &FaceLattice, dual: &FaceLattice) -> AbcReport {
    let h = lat.tree();
    let n = lat.n();
    let normals = facet_normals(h);
    let dmap = lat.dual_map(dual);
    let mut report = AbcReport::default();
    let one = Rat::one();
    for i in 0..lat.len() {
        report.faces_checked += 1;
        let fr = lat.frame(i);
        let face = lat.face(i);
        let mut fail = |condition, detail: String| {
            report.violations.push(AbcViolation {
                face: face.clone(),
                condition,
                detail,
            })
        };

        // (a): c_F is in the relative interior of F and A_F meets H only there
        let tight_c: Vec<usize> = (0..normals.len()).filter(|&k| normals[k].dot(&fr.c) == one).collect();
        let verts = face_vertices(h, face);
        let tight_f: Vec<usize> = (0..normals.len())
            .filter(|&k| verts.iter().all(|v| normals[k].dot(v) == one))
            .collect();
        if normals.iter().any(|a| a.dot(&fr.c) > one) {
            fail(Condition::A, "c_F lies outside H".into());
        } else if tight_c != tight_f {
            fail(Condition::A, "c_F is not in the relative interior of F".into());
        } else if let Some(detail) = single_point_violation(&normals, fr) {
            fail(Condition::A, detail);
        }

        // (b)
        if fr.dirs.len() + lat.dim(i) != n - 1 {
            fail(
                Condition::B,
                format!("dim A_F = {} but dim F = {}", fr.dirs.len(), lat.dim(i)),
            );
        }

        // (c)
        let dfr = dual.frame(dmap[i]);
        if fr.c.dot(&dfr.c) != one {
            fail(Condition::C, format!("<c_F, c_F*> = {}", fr.c.dot(&dfr.c)));
        }
        let zero_pairs = fr.dirs.iter().any(|d| !d.dot(&dfr.c).is_zero())
            || dfr.dirs.iter().any(|d| !fr.c.dot(d).is_zero())
            || fr
                .dirs
                .iter()
                .any(|d| dfr.dirs.iter().any(|e| !d.dot(e).is_zero()));
        if zero_pairs {
            fail(Condition::C, "a direction pairing is nonzero".into());
        }
    }
    report
}

/// `A_F ∩ H = {c_F}`: every frame coordinate has max = min = 0 over the
/// intersection.
fn single_point_violation(normals: &[Vector], fr: &AffineFrame) -> Option<String> {
    let k = fr.dirs.len();
    let cons: Vec<(Vector, Rat)> = normals
        .iter()
        .map(|a| {
            let row: Vector = fr.dirs.iter().map(|d| a.dot(d)).collect();
            (row, Rat::one() - a.dot(&fr.c))
        })
        .collect();
    for i in 0..k {
        for sign in [1, -1] {
            let obj = Vector::unit(k, i).scale(&int(sign));
            let out = maximize(&LinProg::new(obj, cons.clone())).expect("shapes agree");
            match out.status {
                LpStatus::Optimal if out.value.as_ref().is_some_and(Zero::is_zero) => {}
                LpStatus::Optimal => {
                    return Some(format!(
                        "A_F ∩ H extends to frame coordinate {i} = {}",
                        out.value.expect("optimal")
                    ))
                }
                other => return Some(format!("A_F ∩ H is {other:?} along frame coordinate {i}")),
            }
        }
    }
    None
}

/// `1 - max <c_F, c_{G*}>` over ordered pairs of proper faces with `F ⊄ G`.
pub fn epsilon_gap(h: &HannerExpr) -> Rat {
    let lat = FaceLattice::new(h);
    let dual = FaceLattice::new(&h.dual());
    epsilon_gap_lattice(&lat, &dual)
}

pub fn epsilon_gap_lattice(lat: &FaceLattice, dual: &FaceLattice) -> Rat {
    let dmap = lat.dual_map(dual);
    let mut best: Option<Rat> = None;
    for i in 0..lat.len() {
        for j in 0..lat.len() {
            if lat.leq(i, j) {
                continue;
            }
            let ip = lat.frame(i).c.dot(&dual.frame(dmap[j]).c);
            if best.as_ref().is_none_or(|b| &ip > b) {
                best = Some(ip);
            }
        }
    }
    Rat::one() - best.unwrap_or_else(Rat::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hanner::{canonical_trees, vertex_vectors};
    use crate::linalg::{affine_dim, Vector};
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    /// Faces found independently: for every facet-normal subset intersection
    /// of H, the set of vertices on all of them. Distinct nonempty proper
    /// vertex sets are exactly the proper faces.
    fn faces_by_hyperplanes(h: &HannerExpr) -> BTreeSet<BTreeSet<Vector>> {
        let verts = vertex_vectors(h);
        let normals = facet_normals(h);
        let one = Rat::one();
        let mut out = BTreeSet::new();
        // closing the facet vertex sets under intersection yields all faces
        let mut frontier: Vec<BTreeSet<Vector>> = normals
            .iter()
            .map(|a| verts.iter().filter(|v| a.dot(v) == one).cloned().collect())
            .collect();
        let facets = frontier.clone();
        while let Some(s) = frontier.pop() {
            if s.is_empty() || !out.insert(s.clone()) {
                continue;
            }
            for f in &facets {
                let t: BTreeSet<Vector> = s.intersection(f).cloned().collect();
                if !out.contains(&t) {
                    frontier.push(t);
                }
            }
        }
        out
    }

    #[test]
    fn face_counts_match_hyperplane_oracle() {
        assert_eq!(enumerate_faces(&HannerExpr::Leaf(0)).len(), 2);
        assert_eq!(enumerate_faces(&HannerExpr::cube(2)).len(), 8);
        assert_eq!(enumerate_faces(&HannerExpr::cross(3)).len(), 26);
        for n in 1..=4 {
            for h in canonical_trees(n) {
                let ours: BTreeSet<BTreeSet<Vector>> = enumerate_faces(&h)
                    .iter()
                    .map(|f| face_vertices(&h, f).into_iter().collect())
                    .collect();
                assert_eq!(ours.len(), enumerate_faces(&h).len(), "duplicates in {h}");
                assert_eq!(ours, faces_by_hyperplanes(&h), "{h}");
                for f in enumerate_faces(&h) {
                    let vs = face_vertices(&h, &f);
                    let refs: Vec<&Vector> = vs.iter().collect();
                    assert_eq!(affine_dim(&refs), face_dim(&h, &f).unwrap(), "{h} {f:?}");
                }
            }
        }
    }

    #[test]
    fn dims_and_centroids() {
        let sq = HannerExpr::cube(2);
        let vertex = Face::pair(Face::Plus, Face::Plus);
        let edge = Face::pair(Face::Plus, Face::Whole);
        assert_eq!(face_dim(&sq, &vertex).unwrap(), 0);
        assert_eq!(face_dim(&sq, &Face::Empty).unwrap(), -1);
        assert_eq!(centroid(&sq, &edge).unwrap(), Vector::unit(2, 0));

        let diamond = HannerExpr::cross(2);
        assert_eq!(face_dim(&diamond, &Face::pair(Face::Plus, Face::Empty)).unwrap(), 0);
        let dedge = Face::pair(Face::Plus, Face::Plus);
        assert_eq!(face_dim(&diamond, &dedge).unwrap(), 1);
        assert_eq!(centroid(&diamond, &dedge).unwrap(), Vector(vec![rat(1, 2), rat(1, 2)]));
        assert!(centroid(&diamond, &Face::Whole).is_err());
        assert!(face_dim(&diamond, &Face::pair(Face::Whole, Face::Plus)).is_err());
    }

    #[test]
    fn centroid_is_vertex_average_on_simplices_and_cubes() {
        // simplices and parallelotopes are the faces whose centroid is the
        // vertex average; cross-polytopes and cubes have only those
        for n in 1..=4 {
            for h in [HannerExpr::cross(n), HannerExpr::cube(n)] {
                for f in enumerate_faces(&h) {
                    let vs = face_vertices(&h, &f);
                    let avg = vs
                        .iter()
                        .fold(Vector::zeros(n), |acc, v| &acc + v)
                        .scale(&rat(1, vs.len() as i64));
                    assert_eq!(centroid(&h, &f).unwrap(), avg, "{h} {f:?}");
                }
            }
        }
    }

    #[test]
    fn dual_examples() {
        let vertex = Face::pair(Face::Plus, Face::Plus);
        assert_eq!(dual_face(&vertex), vertex);
        let diamond = HannerExpr::cross(2);
        assert_eq!(face_dim(&diamond, &dual_face(&vertex)).unwrap(), 1);
        assert_eq!(dual_face(&Face::Whole), Face::Empty);
        let facet = Face::pair(Face::pair(Face::Plus, Face::Whole), Face::Whole);
        let d = dual_face(&facet);
        assert_eq!(face_vertices(&HannerExpr::cross(3), &d), vec![Vector::unit(3, 0)]);
    }

    #[test]
    fn leq_examples() {
        let sq = HannerExpr::cube(2);
        let v = Face::pair(Face::Plus, Face::Plus);
        let w = Face::pair(Face::Minus, Face::Plus);
        let e = Face::pair(Face::Plus, Face::Whole);
        assert!(face_leq(&sq, &v, &e).unwrap());
        assert!(!face_leq(&sq, &v, &w).unwrap());
        assert!(!face_leq(&sq, &w, &e).unwrap());
        assert!(face_leq(&sq, &Face::Empty, &v).unwrap());
        assert!(face_leq(&sq, &v, &Face::Whole).unwrap());
    }

    #[test]
    fn leq_matches_vertex_containment() {
        for n in 1..=4 {
            for h in canonical_trees(n) {
                let faces = enumerate_faces(&h);
                let sets: Vec<BTreeSet<Vector>> = faces
                    .iter()
                    .map(|f| face_vertices(&h, f).into_iter().collect())
                    .collect();
                let hd = h.dual();
                for (i, f) in faces.iter().enumerate() {
                    for (j, g) in faces.iter().enumerate() {
                        let leq = face_leq(&h, f, g).unwrap();
                        assert_eq!(leq, sets[i].is_subset(&sets[j]), "{h}");
                        assert_eq!(leq, face_leq(&hd, &dual_face(g), &dual_face(f)).unwrap());
                    }
                    assert_eq!(dual_face(&dual_face(f)), *f);
                    assert_eq!(
                        face_dim(&hd, &dual_face(f)).unwrap(),
                        n as i64 - 1 - face_dim(&h, f).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn frame_examples() {
        let cube = HannerExpr::cube(3);
        let facet = Face::pair(Face::pair(Face::Plus, Face::Whole), Face::Whole);
        let fr = affine_frame(&cube, &facet).unwrap();
        assert_eq!(fr.c, Vector::unit(3, 0));
        assert!(fr.dirs.is_empty());

        let sq = HannerExpr::cube(2);
        let fr = affine_frame(&sq, &Face::pair(Face::Plus, Face::Plus)).unwrap();
        assert_eq!(fr.c, Vector::from_ints(&[1, 1]));
        assert_eq!(fr.affsub(), AffSub::new(Vector::from_ints(&[1, 1]), &[Vector::from_ints(&[1, -1])]));

        let dia = HannerExpr::cross(2);
        let fr = affine_frame(&dia, &Face::pair(Face::Plus, Face::Plus)).unwrap();
        assert_eq!(fr.c, Vector(vec![rat(1, 2), rat(1, 2)]));
        assert!(fr.dirs.is_empty());

        // pairing on the square vertex and its dual edge
        let dual = affine_frame(&dia, &dual_face(&Face::pair(Face::Plus, Face::Plus))).unwrap();
        let v = affine_frame(&sq, &Face::pair(Face::Plus, Face::Plus)).unwrap();
        assert_eq!(v.c.dot(&dual.c), int(1));
        assert!(v.dirs.iter().all(|d| d.dot(&dual.c).is_zero()));
    }

    #[test]
    fn abc_holds_up_to_four() {
        for n in 1..=4 {
            for h in canonical_trees(n) {
                let r = verify_abc(&h);
                assert!(r.passed(), "{h}: {:?}", r.violations.first());
                assert_eq!(r.faces_checked, enumerate_faces(&h).len());
            }
        }
    }

    #[test]
    fn faults_break_abc() {
        let h = HannerExpr::cross(3);
        let dual = FaceLattice::new(&h.dual());
        for fault in [Fault::PerturbedCentroid, Fault::WrongL1Weight] {
            let lat = FaceLattice::with_fault(&h, fault);
            assert!(!verify_abc_lattice(&lat, &dual).passed(), "{fault:?}");
        }
    }

    #[test]
    fn epsilon_examples() {
        let sq = epsilon_gap(&HannerExpr::cube(2));
        assert!(sq > Rat::zero());
        // max attained by an edge x_1 = 1 against a vertex (1, 1) on it:
        // c_F = (1, 0), c_{G*} = (1/2, 1/2)
        assert_eq!(sq, rat(1, 2));
        assert!(epsilon_gap(&HannerExpr::cube(3)) > Rat::zero());
        for n in 1..=3 {
            for h in canonical_trees(n) {
                let lat = FaceLattice::new(&h);
                let dual = FaceLattice::new(&h.dual());
                let dmap = lat.dual_map(&dual);
                for i in 0..lat.len() {
                    for j in 0..lat.len() {
                        if lat.leq(i, j) {
                            assert_eq!(lat.frame(i).c.dot(&dual.frame(dmap[j]).c), int(1));
                        }
                    }
                }
                assert!(epsilon_gap_lattice(&lat, &dual) > Rat::zero());
            }
        }
    }

    proptest! {
        #[test]
        fn face_json_round_trip(i in 0usize..14, k in 0usize..200) {
            let h = &canonical_trees(4)[i];
            let faces = enumerate_faces(h);
            let f = &faces[k % faces.len()];
            let s = serde_json::to_string(f).unwrap();
            prop_assert_eq!(&serde_json::from_str::<Face>(&s).unwrap(), f);
        }
    }
}
