//! Tangency points of a body `K` near a Hanner polytope `H`, the volume
//! comparisons built on them, normalization into `B_1^n ⊆ K' ⊆ B_∞^n`, and
//! the local-minimality experiment.

use std::io::Write;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::faces::{AffineFrame, FaceLattice};
use crate::flags::{flag_signs, volume_function, FlagSet};
use crate::geometry::{hanner_polytope, hausdorff_sq, perturb, radial, GeometryError, Polytope};
use crate::hanner::{polar_vertices, vertices, HannerExpr};
use crate::linalg::{fmt_rat, int, integerize, null_space, orth_complement, project_onto_span, to_f64, AffSub, Matrix, Rat, Vector};
use crate::lp::{dot_ints, maximize, nearest_point_from, Halfspaces, LinProg, LpError, LpStatus};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WitnessError {
    #[error("tangency program for face {face} is {status}")]
    Tangency { face: usize, status: &'static str },
    #[error("perturbation too large: flag {flag} changed sign ({side})")]
    SignFlip { flag: usize, side: &'static str },
    #[error("normalization failed: {0}")]
    Normalization(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Everything about `H` that trials reuse.
pub struct HannerContext {
    pub h: HannerExpr,
    pub lat: FaceLattice,
    pub dual_lat: FaceLattice,
    pub fs: FlagSet,
    pub dual_fs: FlagSet,
    /// Index of `F*` in `dual_lat` for each face `F` of `lat`.
    pub dual_map: Vec<usize>,
    pub c: Vec<Vector>,
    pub c_star: Vec<Vector>,
    signs: Vec<i8>,
    dual_signs: Vec<i8>,
    pub body: Polytope,
    pub volume: Rat,
    pub polar_volume: Rat,
}

impl HannerContext {
    pub fn new(h: &HannerExpr) -> Self {
        let lat = FaceLattice::new(h);
        let dual_lat = FaceLattice::new(&h.dual());
        let fs = FlagSet::new(&lat);
        let dual_fs = FlagSet::new(&dual_lat);
        let dual_map = lat.dual_map(&dual_lat);
        let c = lat.centroids();
        let c_star = dual_lat.centroids();
        let signs = flag_signs(&c, &fs).expect("centroid flags are nondegenerate");
        let dual_signs = flag_signs(&c_star, &dual_fs).expect("centroid flags are nondegenerate");
        let body = hanner_polytope(h);
        let volume = body.volume();
        let polar_volume = body.polar().volume();
        HannerContext {
            h: h.clone(),
            lat,
            dual_lat,
            fs,
            dual_fs,
            dual_map,
            c,
            c_star,
            signs,
            dual_signs,
            body,
            volume,
            polar_volume,
        }
    }

    pub fn n(&self) -> usize {
        self.h.n()
    }

    /// `P(H) = |H| |H°|`
    pub fn volume_product(&self) -> Rat {
        &self.volume * &self.polar_volume
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tangency {
    pub t: Rat,
    pub x: Vector,
    pub y: Vector,
}

/// Scale `A_F` until it touches `K`: the largest `t` with `t A_F ∩ K`
/// nonempty, `y = t c_F`, and `x` the point of that section nearest to `y`.
pub fn tangency(k: &Polytope, frame: &AffineFrame, face: usize) -> Result<Tangency, WitnessError> {
    tangency_in(&Halfspaces::new(&k.constraints()), frame, face)
}

fn tangency_in(hs: &Halfspaces, frame: &AffineFrame, face: usize) -> Result<Tangency, WitnessError> {
    // variables (s, nu) for the point s C + sum nu_j D_j with C = dc c and
    // D_j integer multiples of the directions, so t = s dc
    let (cint, dc) = integerize(&frame.c);
    let dirs: Vec<Vec<BigInt>> = frame.dirs.iter().map(|d| integerize(d).0).collect();
    let cons: Vec<(Vector, Rat)> = hs
        .integer_rows()
        .map(|(a, b)| {
            let row: Vector = std::iter::once(dot_ints(a, &cint))
                .chain(dirs.iter().map(|d| dot_ints(a, d)))
                .map(Rat::from_integer)
                .collect();
            (row, Rat::from_integer(b.clone()))
        })
        .collect();
    let obj = Vector::unit(dirs.len() + 1, 0);
    let out = maximize(&LinProg::new(obj, cons))?;
    let s = match out.status {
        LpStatus::Optimal => out.value.expect("optimal value"),
        LpStatus::Unbounded => return Err(WitnessError::Tangency { face, status: "unbounded" }),
        LpStatus::Infeasible => return Err(WitnessError::Tangency { face, status: "infeasible" }),
    };
    let w = out.witness.expect("optimal point");
    let feasible = dirs
        .iter()
        .zip(w.iter().skip(1))
        .fold(cint.iter().map(|x| &w[0] * x).collect::<Vector>(), |acc, (d, nu)| {
            acc.axpy(nu, &d.iter().cloned().map(Rat::from_integer).collect())
        });
    let t = s * Rat::from_integer(dc);
    let y = frame.c.scale(&t);
    let onto = AffSub::new(y.clone(), &frame.dirs);
    let x = nearest_point_from(&y, hs, &onto, &feasible)?;
    Ok(Tangency { t, x, y })
}

#[derive(Clone, Debug)]
pub struct Witness {
    /// One entry per face of `H`, in lattice order.
    pub primal: Vec<Tangency>,
    /// One entry per face of `H°`, in dual-lattice order.
    pub dual: Vec<Tangency>,
}

impl Witness {
    pub fn x(&self) -> Vec<Vector> {
        self.primal.iter().map(|w| w.x.clone()).collect()
    }

    pub fn y(&self) -> Vec<Vector> {
        self.primal.iter().map(|w| w.y.clone()).collect()
    }

    pub fn x_star(&self) -> Vec<Vector> {
        self.dual.iter().map(|w| w.x.clone()).collect()
    }

    pub fn y_star(&self) -> Vec<Vector> {
        self.dual.iter().map(|w| w.y.clone()).collect()
    }
}

fn check_signs(z: &[Vector], fs: &FlagSet, signs: &[i8], side: &'static str) -> Result<(), WitnessError> {
    for (f, (chain, &s)) in fs.idx.iter().zip(signs).enumerate() {
        let d = crate::flags::flag_det(z, chain);
        if d.is_zero() || d.is_negative() != (s < 0) {
            return Err(WitnessError::SignFlip { flag: f, side });
        }
    }
    Ok(())
}

/// Tangency data for every face of `H` against `K` and of `H°` against `K°`.
pub fn witness_all(k: &Polytope, ctx: &HannerContext) -> Result<Witness, WitnessError> {
    let kp = k.polar();
    let hs = Halfspaces::new(&k.constraints());
    let hs_polar = Halfspaces::new(&kp.constraints());
    let primal = ctx
        .lat
        .frames()
        .iter()
        .enumerate()
        .map(|(i, fr)| tangency_in(&hs, fr, i))
        .collect::<Result<Vec<_>, _>>()?;
    let dual = ctx
        .dual_lat
        .frames()
        .iter()
        .enumerate()
        .map(|(i, fr)| tangency_in(&hs_polar, fr, i))
        .collect::<Result<Vec<_>, _>>()?;
    let w = Witness { primal, dual };
    check_signs(&w.x(), &ctx.fs, &ctx.signs, "X")?;
    check_signs(&w.x_star(), &ctx.dual_fs, &ctx.dual_signs, "X*")?;
    Ok(w)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairingReport {
    pub faces: usize,
    /// Faces where `<x_F, x_F*> != 1`.
    pub x_failures: Vec<usize>,
    pub y_failures: Vec<usize>,
    pub t_failures: Vec<usize>,
}

impl PairingReport {
    pub fn passed(&self) -> bool {
        self.x_failures.is_empty() && self.y_failures.is_empty() && self.t_failures.is_empty()
    }
}

/// `<x_F, x_F*> = <y_F, y_F*> = t_F t_F* = 1` for every face.
pub fn pairing_check(w: &Witness, ctx: &HannerContext) -> PairingReport {
    let mut r = PairingReport {
        faces: w.primal.len(),
        x_failures: vec![],
        y_failures: vec![],
        t_failures: vec![],
    };
    for (i, p) in w.primal.iter().enumerate() {
        let q = &w.dual[ctx.dual_map[i]];
        if !p.x.dot(&q.x).is_one() {
            r.x_failures.push(i);
        }
        if !p.y.dot(&q.y).is_one() {
            r.y_failures.push(i);
        }
        if !(&p.t * &q.t).is_one() {
            r.t_failures.push(i);
        }
    }
    r
}

/// `V(Y) V(Y*)` against `|H| |H°|`; `ok` when the former is at least the latter.
pub fn santalo_lower_check(w: &Witness, ctx: &HannerContext) -> (Rat, Rat, bool) {
    let lhs = volume_function(&w.y(), &ctx.fs) * volume_function(&w.y_star(), &ctx.dual_fs);
    let rhs = ctx.volume_product();
    let ok = lhs >= rhs;
    (lhs, rhs, ok)
}

/// `(|V(X) - V(Y)|, |V(X*) - V(Y*)|)`
pub fn vxvy_gap(w: &Witness, ctx: &HannerContext) -> (Rat, Rat) {
    let dx = (volume_function(&w.x(), &ctx.fs) - volume_function(&w.y(), &ctx.fs)).abs();
    let ds = (volume_function(&w.x_star(), &ctx.dual_fs) - volume_function(&w.y_star(), &ctx.dual_fs)).abs();
    (dx, ds)
}

#[derive(Clone, Debug)]
pub struct Normalization {
    pub t1: Matrix,
    pub t2: Matrix,
    /// The tangency points `x_j` at the faces `E_j` with centroid `e_j`.
    pub x: Vec<Vector>,
    pub theta: Vec<Vector>,
    pub body: Polytope,
}

/// A normal of `K` at `x` orthogonal to `dirs`, scaled so `<normal, x> = 1`.
fn supporting_normal(k: &Polytope, x: &Vector, dirs: &[Vector]) -> Result<Vector, WitnessError> {
    let active: Vec<&Vector> = k.facets().iter().filter(|a| a.dot(x).is_one()).collect();
    let m = active.len();
    // lambda >= 0, sum lambda = 1, sum lambda_i <a_i, d> = 0
    let mut cons: Vec<(Vector, Rat)> = (0..m).map(|i| (Vector::unit(m, i).scale(&int(-1)), Rat::zero())).collect();
    let ones: Vector = (0..m).map(|_| Rat::one()).collect();
    cons.push((ones.clone(), Rat::one()));
    cons.push((ones.scale(&int(-1)), int(-1)));
    for d in dirs {
        let row: Vector = active.iter().map(|a| a.dot(d)).collect();
        cons.push((row.scale(&int(-1)), Rat::zero()));
        cons.push((row, Rat::zero()));
    }
    let out = maximize(&LinProg::new(Vector::zeros(m), cons))?;
    let lam = out
        .witness
        .filter(|_| out.status == LpStatus::Optimal)
        .ok_or_else(|| WitnessError::Normalization("no supporting normal orthogonal to A_E".into()))?;
    Ok(active
        .iter()
        .zip(lam.iter())
        .fold(Vector::zeros(x.dim()), |acc, (a, l)| acc.axpy(l, a)))
}

/// `K' = T(K) ∩ B_∞^n` with `B_1^n ⊆ K' ⊆ B_∞^n`.
///
/// `T_1` maps each hyperplane `x_j + θ_j^⊥` to `e_j + e_j^⊥`; `T_2` then
/// rescales each axis so that `e_j` lands on the boundary of `T(K)`.
pub fn normalize_position(k: &Polytope, ctx: &HannerContext) -> Result<Normalization, WitnessError> {
    let n = ctx.n();
    let c = &ctx.c;
    let mut xs = Vec::with_capacity(n);
    let mut related = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    for j in 0..n {
        let ej = Vector::unit(n, j);
        let face = c
            .iter()
            .position(|v| v == &ej)
            .ok_or_else(|| WitnessError::Normalization(format!("no face with centroid e_{}", j + 1)))?;
        let fr = ctx.lat.frame(face);
        let tg = tangency(k, fr, face)?;
        // i ~ j exactly when e_i is a direction of A_{E_j}
        let aff = fr.affsub();
        let rel: Vec<usize> = (0..n).filter(|&i| i != j && aff.contains_direction(&Vector::unit(n, i))).collect();
        normals.push(supporting_normal(k, &tg.x, &fr.dirs)?);
        xs.push(tg.x);
        related.push(rel);
    }
    let mut theta = Vec::with_capacity(n);
    for j in 0..n {
        let nu = &normals[j];
        let support: Vec<usize> = (0..n).filter(|i| !related[j].contains(i)).collect();
        // span({e_j} ∪ {e_i : i not ~ j}) ∩ nu^⊥, lifted from the support coordinates
        let row: Vector = support.iter().map(|&i| nu[i].clone()).collect();
        let mut w: Vec<Vector> = null_space(&[row], support.len())
            .into_iter()
            .map(|v| {
                let mut full = Vector::zeros(n);
                for (k, &i) in support.iter().enumerate() {
                    full[i] = v[k].clone();
                }
                full
            })
            .collect();
        w.extend(related[j].iter().map(|&i| xs[i].clone()));
        let perp = orth_complement(&w, n);
        let th = project_onto_span(&Vector::unit(n, j), &perp);
        if th[j].is_zero() || th[j].is_negative() {
            return Err(WitnessError::Normalization(format!("θ_{} is orthogonal to e_{}", j + 1, j + 1)));
        }
        theta.push(th);
    }
    let rows: Vec<Vector> = (0..n)
        .map(|j| {
            let h = theta[j].dot(&xs[j]);
            theta[j].scale(&(Rat::one() / h))
        })
        .collect();
    let t1 = Matrix::from_rows(rows).expect("n rows of length n");
    let p1 = k.transform(&t1).map_err(|_| WitnessError::Normalization("T_1 is singular".into()))?;
    let t2 = Matrix::from_rows(
        (0..n)
            .map(|j| Vector::unit(n, j).scale(&(Rat::one() / radial(&p1, &Vector::unit(n, j)))))
            .collect(),
    )
    .expect("diagonal");
    let body = p1.transform(&t2)?.intersect_cube()?;
    for j in 0..n {
        let ej = Vector::unit(n, j);
        if !body.contains(&ej) || !body.contains(&-&ej) {
            return Err(WitnessError::Normalization(format!("±e_{} not in K'", j + 1)));
        }
    }
    if body.vertices().iter().any(|v| v.iter().any(|x| x.abs() > Rat::one())) {
        return Err(WitnessError::Normalization("K' leaves B_∞^n".into()));
    }
    Ok(Normalization {
        t1,
        t2,
        x: xs,
        theta,
        body,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagnosticRow {
    /// `"projection"` at a vertex of `H`, `"section"` at a vertex of `H°`.
    pub kind: &'static str,
    /// 1-based coordinates of `R^(v)`.
    pub coords: Vec<usize>,
    pub dist_sq: String,
}

#[derive(Clone, Debug)]
pub struct Diagnostics {
    pub rows: Vec<DiagnosticRow>,
    pub max: Rat,
    pub dist_sq: Rat,
}

impl Diagnostics {
    /// `max / d_H(K, H)^2`, if the denominator is positive.
    pub fn ratio(&self) -> Option<Rat> {
        (!self.dist_sq.is_zero()).then(|| &self.max / &self.dist_sq)
    }
}

/// Distances of coordinate projections of `K` to cubes and coordinate
/// sections of `K` to cross-polytopes, over the supports of the vertices of
/// `H` and `H°`.
pub fn projection_section_diagnostics(k: &Polytope, ctx: &HannerContext) -> Result<Diagnostics, WitnessError> {
    let mut supports: Vec<(&'static str, Vec<usize>)> = Vec::new();
    for v in vertices(&ctx.h) {
        supports.push(("projection", v.support.clone()));
    }
    for v in polar_vertices(&ctx.h) {
        supports.push(("section", v.support.clone()));
    }
    supports.sort();
    supports.dedup();
    let mut rows = Vec::with_capacity(supports.len());
    let mut max = Rat::zero();
    for (kind, coords) in supports {
        let m = coords.len();
        let (got, model) = if kind == "projection" {
            (k.project(&coords)?, hanner_polytope(&HannerExpr::cube(m)))
        } else {
            (k.section(&coords)?, hanner_polytope(&HannerExpr::cross(m)))
        };
        let d = hausdorff_sq(&got, &model)?;
        if d > max {
            max = d.clone();
        }
        rows.push(DiagnosticRow {
            kind,
            coords: coords.iter().map(|i| i + 1).collect(),
            dist_sq: fmt_rat(&d),
        });
    }
    let dist_sq = hausdorff_sq(k, &ctx.body)?;
    Ok(Diagnostics { rows, max, dist_sq })
}

/// One trial of the experiment; every rational is exact.
#[derive(Clone, Debug)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    /// Resamples caused by flag determinants changing sign.
    pub rejected: usize,
    pub delta: Rat,
    pub dist_sq: Rat,
    pub norm_dist_sq: Rat,
    pub p_k: Rat,
    pub p_norm: Rat,
    pub p_h: Rat,
    pub v_x: Rat,
    pub v_y: Rat,
    pub v_x_star: Rat,
    pub v_y_star: Rat,
    pub pairings_ok: bool,
    /// `B_1^n ⊆ K' ⊆ B_∞^n`
    pub sandwich_ok: bool,
}

impl TrialRow {
    /// `P(K) - P(H)` for the raw perturbed body.
    pub fn gap(&self) -> Rat {
        &self.p_k - &self.p_h
    }

    /// `P(K') - P(H)` for the normalized body.
    pub fn gap_norm(&self) -> Rat {
        &self.p_norm - &self.p_h
    }

    pub fn dx(&self) -> Rat {
        (&self.v_x - &self.v_y).abs()
    }

    pub fn dx_star(&self) -> Rat {
        (&self.v_x_star - &self.v_y_star).abs()
    }

    /// `V(Y) V(Y*) - |H| |H°|`
    pub fn santalo_margin(&self) -> Rat {
        &self.v_y * &self.v_y_star - &self.p_h
    }

    /// `d_H(K', H)^2 <= 9 d_H(K, H)^2`
    pub fn normalization_bound_ok(&self) -> bool {
        self.norm_dist_sq <= &self.dist_sq * int(9)
    }
}

#[derive(Clone, Debug)]
pub struct TrialFailure {
    pub trial: usize,
    pub seed: u64,
    pub error: String,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub tree: String,
    pub delta: Rat,
    pub trials: usize,
    pub seed: u64,
    pub rows: Vec<TrialRow>,
    pub failures: Vec<TrialFailure>,
}

pub const MAX_RESAMPLES: usize = 20;

/// The seed of attempt `attempt` of trial `trial`.
pub fn trial_seed(seed: u64, trial: usize, attempt: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((trial as u64) << 16)
        .wrapping_add(attempt as u64)
}

fn run_trial(ctx: &HannerContext, delta: &Rat, seed: u64, trial: usize) -> Result<TrialRow, TrialFailure> {
    let fail = |s: u64, e: WitnessError| TrialFailure {
        trial,
        seed: s,
        error: e.to_string(),
    };
    let mut rejected = 0;
    loop {
        let s = trial_seed(seed, trial, rejected);
        let attempt = || -> Result<TrialRow, WitnessError> {
            let k = perturb(&ctx.h, delta, s)?;
            let norm = normalize_position(&k, ctx)?;
            let w = witness_all(&norm.body, ctx)?;
            Ok(TrialRow {
                trial,
                seed: s,
                rejected,
                delta: delta.clone(),
                dist_sq: hausdorff_sq(&k, &ctx.body)?,
                norm_dist_sq: hausdorff_sq(&norm.body, &ctx.body)?,
                p_k: k.volume_product(),
                p_norm: norm.body.volume_product(),
                p_h: ctx.volume_product(),
                v_x: volume_function(&w.x(), &ctx.fs),
                v_y: volume_function(&w.y(), &ctx.fs),
                v_x_star: volume_function(&w.x_star(), &ctx.dual_fs),
                v_y_star: volume_function(&w.y_star(), &ctx.dual_fs),
                pairings_ok: pairing_check(&w, ctx).passed(),
                sandwich_ok: is_sandwiched(&norm.body),
            })
        };
        match attempt() {
            Ok(row) => return Ok(row),
            Err(WitnessError::SignFlip { .. }) if rejected < MAX_RESAMPLES => rejected += 1,
            Err(e) => return Err(fail(s, e)),
        }
    }
}

/// `B_1^n ⊆ K ⊆ B_∞^n`, checked on the vertices `±e_j` and on the vertices of `K`.
pub fn is_sandwiched(k: &Polytope) -> bool {
    let n = k.dim();
    let inner = (0..n).all(|j| {
        let e = Vector::unit(n, j);
        k.contains(&e) && k.contains(&-&e)
    });
    inner && k.vertices().iter().all(|v| v.iter().all(|x| x.abs() <= Rat::one()))
}

/// A rayon pool capped by `HANNERLAB_THREADS` when set.
pub fn thread_pool() -> rayon::ThreadPool {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(k) = std::env::var("HANNERLAB_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&k| k > 0)
    {
        b = b.num_threads(k);
    }
    b.build().expect("thread pool")
}

/// Perturb, normalize and measure `trials` bodies near `H`. Trial `i` draws
/// its perturbation from `(seed, i)` only, so the same seed gives matched
/// directions across different `δ`.
pub fn local_min_experiment(ctx: &HannerContext, delta: &Rat, trials: usize, seed: u64) -> ExperimentReport {
    let results: Vec<Result<TrialRow, TrialFailure>> =
        thread_pool().install(|| (0..trials).into_par_iter().map(|i| run_trial(ctx, delta, seed, i)).collect());
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(f) => failures.push(f),
        }
    }
    ExperimentReport {
        tree: ctx.h.to_string(),
        delta: delta.clone(),
        trials,
        seed,
        rows,
        failures,
    }
}

impl ExperimentReport {
    pub fn min_gap(&self) -> Option<Rat> {
        self.rows.iter().map(|r| r.gap()).min()
    }

    pub fn min_gap_norm(&self) -> Option<Rat> {
        self.rows.iter().map(|r| r.gap_norm()).min()
    }

    pub fn all_santalo(&self) -> bool {
        self.rows.iter().all(|r| !r.santalo_margin().is_negative())
    }

    pub fn all_pairings(&self) -> bool {
        self.rows.iter().all(|r| r.pairings_ok)
    }

    pub fn all_sandwiched(&self) -> bool {
        self.rows.iter().all(|r| r.sandwich_ok)
    }

    pub fn rejected(&self) -> usize {
        self.rows.iter().map(|r| r.rejected).sum()
    }

    pub const CSV_HEADER: [&'static str; 27] = [
        "tree",
        "trial",
        "seed",
        "rejected",
        "delta",
        "dist_sq",
        "norm_dist_sq",
        "p_k",
        "p_norm",
        "p_h",
        "gap",
        "gap_norm",
        "v_x",
        "v_y",
        "v_x_star",
        "v_y_star",
        "dx",
        "dx_star",
        "santalo_margin",
        "pairings_ok",
        "sandwich_ok",
        "approx_delta",
        "approx_dist",
        "approx_gap",
        "approx_gap_norm",
        "approx_dx",
        "approx_santalo_margin",
    ];

    /// One row per trial; exact columns as `p/q`, `approx_*` columns decimal.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::CSV_HEADER)?;
        for r in &self.rows {
            let exact = [
                &r.delta,
                &r.dist_sq,
                &r.norm_dist_sq,
                &r.p_k,
                &r.p_norm,
                &r.p_h,
                &r.gap(),
                &r.gap_norm(),
                &r.v_x,
                &r.v_y,
                &r.v_x_star,
                &r.v_y_star,
                &r.dx(),
                &r.dx_star(),
                &r.santalo_margin(),
            ]
            .map(fmt_rat);
            let approx = [
                to_f64(&r.delta),
                to_f64(&r.dist_sq).sqrt(),
                to_f64(&r.gap()),
                to_f64(&r.gap_norm()),
                to_f64(&r.dx()),
                to_f64(&r.santalo_margin()),
            ]
            .map(|x| format!("{x:.6e}"));
            let mut rec = vec![self.tree.clone(), r.trial.to_string(), r.seed.to_string(), r.rejected.to_string()];
            rec.extend(exact);
            rec.push(r.pairings_ok.to_string());
            rec.push(r.sandwich_ok.to_string());
            rec.extend(approx);
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let opt = |r: Option<Rat>| r.map(|x| fmt_rat(&x));
        serde_json::json!({
            "tree": self.tree,
            "delta": fmt_rat(&self.delta),
            "trials": self.trials,
            "seed": self.seed,
            "completed": self.rows.len(),
            "rejected": self.rejected(),
            "min_gap": opt(self.min_gap()),
            "min_gap_norm": opt(self.min_gap_norm()),
            "min_gap_nonnegative": self.min_gap().is_some_and(|g| !g.is_negative()),
            "santalo_all": self.all_santalo(),
            "pairings_all": self.all_pairings(),
            "sandwich_all": self.all_sandwiched(),
            "rows": self.rows.iter().map(|r| serde_json::json!({
                "trial": r.trial,
                "seed": r.seed,
                "rejected": r.rejected,
                "dist_sq": fmt_rat(&r.dist_sq),
                "norm_dist_sq": fmt_rat(&r.norm_dist_sq),
                "p_k": fmt_rat(&r.p_k),
                "p_norm": fmt_rat(&r.p_norm),
                "gap": fmt_rat(&r.gap()),
                "gap_norm": fmt_rat(&r.gap_norm()),
                "v_x": fmt_rat(&r.v_x),
                "v_y": fmt_rat(&r.v_y),
                "v_x_star": fmt_rat(&r.v_x_star),
                "v_y_star": fmt_rat(&r.v_y_star),
                "dx": fmt_rat(&r.dx()),
                "dx_star": fmt_rat(&r.dx_star()),
                "santalo_margin": fmt_rat(&r.santalo_margin()),
                "pairings_ok": r.pairings_ok,
                "sandwich_ok": r.sandwich_ok,
            })).collect::<Vec<_>>(),
            "failures": self.failures.iter().map(|f| serde_json::json!({
                "trial": f.trial, "seed": f.seed, "error": f.error,
            })).collect::<Vec<_>>(),
        })
    }
}

/// `log2(a / b)` for positive rationals, as a measurement.
pub fn log2_ratio(a: &Rat, b: &Rat) -> Option<f64> {
    (a.is_positive() && b.is_positive()).then(|| (to_f64(a) / to_f64(b)).log2())
}

#[derive(Clone, Debug)]
pub struct LadderReport {
    pub reports: Vec<ExperimentReport>,
    /// Per trial, `log2` of `|V(X)-V(Y)|` ratios between consecutive rungs.
    pub dx_exponents: Vec<Vec<f64>>,
    /// Per trial, `log2` of positive `P(K)-P(H)` ratios between consecutive rungs.
    pub gap_exponents: Vec<Vec<f64>>,
}

impl LadderReport {
    fn fraction_in(xs: &[Vec<f64>], lo: f64, hi: f64) -> Option<f64> {
        let all: Vec<f64> = xs.iter().flatten().copied().collect();
        (!all.is_empty()).then(|| all.iter().filter(|&&x| (lo..=hi).contains(&x)).count() as f64 / all.len() as f64)
    }

    /// Share of `|V(X)-V(Y)|` exponents in `[1.5, 2.5]`.
    pub fn dx_fraction(&self) -> Option<f64> {
        Self::fraction_in(&self.dx_exponents, 1.5, 2.5)
    }

    /// Share of gap exponents in `[0.5, 1.5]`.
    pub fn gap_fraction(&self) -> Option<f64> {
        Self::fraction_in(&self.gap_exponents, 0.5, 1.5)
    }

    /// One line per rung, then the exponent shares.
    pub fn table(&self) -> String {
        let mut s = String::from("delta\tcompleted\tmin_gap\tmean_dx\n");
        for r in &self.reports {
            let mean_dx = r.rows.iter().map(|x| to_f64(&x.dx())).sum::<f64>() / r.rows.len().max(1) as f64;
            s.push_str(&format!(
                "{}\t{}\t{}\t{:.6e}\n",
                fmt_rat(&r.delta),
                r.rows.len(),
                r.min_gap().map(|g| fmt_rat(&g)).unwrap_or_else(|| "-".into()),
                mean_dx
            ));
        }
        s.push_str(&format!(
            "dx exponents in [1.5,2.5]: {}\ngap exponents in [0.5,1.5]: {}\n",
            fmt_share(self.dx_fraction()),
            fmt_share(self.gap_fraction())
        ));
        s
    }
}

fn fmt_share(x: Option<f64>) -> String {
    x.map(|v| format!("{:.1}%", 100.0 * v)).unwrap_or_else(|| "n/a".into())
}

/// Runs each rung with the same seed (matched directions) and fits exponents
/// between consecutive rungs, trial by trial.
pub fn run_ladder(ctx: &HannerContext, deltas: &[Rat], trials: usize, seed: u64) -> LadderReport {
    let reports: Vec<ExperimentReport> = deltas
        .iter()
        .map(|d| local_min_experiment(ctx, d, trials, seed))
        .collect();
    let mut dx_exponents = Vec::new();
    let mut gap_exponents = Vec::new();
    for t in 0..trials {
        let rows: Vec<Option<&TrialRow>> = reports
            .iter()
            .map(|r| r.rows.iter().find(|x| x.trial == t && x.rejected == 0))
            .collect();
        let mut dx = Vec::new();
        let mut gap = Vec::new();
        for pair in rows.windows(2) {
            if let (Some(a), Some(b)) = (pair[0], pair[1]) {
                dx.extend(log2_ratio(&a.dx(), &b.dx()));
                gap.extend(log2_ratio(&a.gap(), &b.gap()));
            }
        }
        dx_exponents.push(dx);
        gap_exponents.push(gap);
    }
    LadderReport {
        reports,
        dx_exponents,
        gap_exponents,
    }
}

/// `δ, δ/2, δ/4`
pub fn default_ladder(delta: &Rat) -> Vec<Rat> {
    vec![delta.clone(), delta / int(2), delta / int(4)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hanner::parse_expr;
    use crate::linalg::rat;

    #[test]
    fn tangency_on_h_is_the_centroid() {
        for h in [HannerExpr::cube(3), HannerExpr::cross(3), parse_expr("((I1 +1 I2) +inf I3)").unwrap()] {
            let ctx = HannerContext::new(&h);
            let w = witness_all(&ctx.body, &ctx).unwrap();
            for (i, tg) in w.primal.iter().enumerate() {
                assert_eq!(tg.t, int(1));
                assert_eq!(tg.x, ctx.c[i]);
                assert_eq!(tg.y, ctx.c[i]);
            }
            assert_eq!(w.x_star(), ctx.c_star);
            assert!(pairing_check(&w, &ctx).passed());
            let (lhs, rhs, ok) = santalo_lower_check(&w, &ctx);
            assert!(ok && lhs == rhs);
            assert_eq!(vxvy_gap(&w, &ctx), (int(0), int(0)));
        }
    }

    #[test]
    fn tangency_on_scaled_h() {
        let h = HannerExpr::cube(3);
        let ctx = HannerContext::new(&h);
        let d = rat(1, 10);
        let s = Rat::one() - &d;
        let m = Matrix::from_rows((0..3).map(|j| Vector::unit(3, j).scale(&s)).collect()).unwrap();
        let k = ctx.body.transform(&m).unwrap();
        for (i, fr) in ctx.lat.frames().iter().enumerate() {
            let tg = tangency(&k, fr, i).unwrap();
            assert_eq!(tg.t, s);
            assert_eq!(tg.y, ctx.c[i].scale(&s));
            assert!(k.facets().iter().all(|a| a.dot(&tg.x) <= Rat::one()));
            assert!(k.facets().iter().any(|a| a.dot(&tg.x).is_one()));
        }
        let norm = normalize_position(&k, &ctx).unwrap();
        assert_eq!(norm.body.vertices().len(), 8);
        assert_eq!(hausdorff_sq(&norm.body, &ctx.body).unwrap(), int(0));
    }

    #[test]
    fn perturbed_trials_keep_the_identities() {
        for h in [HannerExpr::cube(3), parse_expr("((I1 +1 I2) +inf I3)").unwrap()] {
            let ctx = HannerContext::new(&h);
            for seed in 0..4 {
                let k = perturb(&h, &rat(1, 50), seed).unwrap();
                let w = witness_all(&k, &ctx).unwrap();
                let r = pairing_check(&w, &ctx);
                assert!(r.passed(), "{h} {seed}: {r:?}");
                assert!(santalo_lower_check(&w, &ctx).2);
                for tg in &w.primal {
                    assert!(k.facets().iter().any(|a| a.dot(&tg.x).is_one()));
                    assert!(k.contains(&tg.x));
                }
            }
        }
    }

    #[test]
    fn normalization_identity_and_inclusions() {
        let h = parse_expr("((I1 +1 I2) +inf I3)").unwrap();
        let ctx = HannerContext::new(&h);
        let norm = normalize_position(&ctx.body, &ctx).unwrap();
        assert_eq!(norm.t1, Matrix::identity(3));
        assert_eq!(norm.t2, Matrix::identity(3));
        let cross = hanner_polytope(&HannerExpr::cross(3));
        for seed in 0..5 {
            let k = perturb(&HannerExpr::cube(3), &rat(1, 40), seed).unwrap();
            let ctx = HannerContext::new(&HannerExpr::cube(3));
            let norm = normalize_position(&k, &ctx).unwrap();
            assert!(cross.vertices().iter().all(|v| norm.body.contains(v)));
            assert!(norm.body.vertices().iter().all(|v| v.iter().all(|x| x.abs() <= Rat::one())));
        }
    }

    #[test]
    fn diagnostics_vanish_on_h() {
        let h = parse_expr("((I1 +1 I2) +inf I3)").unwrap();
        let ctx = HannerContext::new(&h);
        let d = projection_section_diagnostics(&ctx.body, &ctx).unwrap();
        assert_eq!(d.max, int(0));
        assert!(d.ratio().is_none());
        assert!(!d.rows.is_empty());
    }

    #[test]
    fn pulled_vertex_shows_in_projection() {
        let h = HannerExpr::cube(3);
        let ctx = HannerContext::new(&h);
        let delta = rat(1, 20);
        let pts: Vec<Vector> = crate::hanner::vertex_vectors(&h)
            .into_iter()
            .map(|v| {
                let all_same = v.iter().all(|x| x == &v[0]);
                if all_same { v.scale(&(Rat::one() - &delta)) } else { v }
            })
            .collect();
        let k = Polytope::from_vertices(&pts).unwrap();
        let d = projection_section_diagnostics(&k, &ctx).unwrap();
        assert!(d.max.is_positive());
    }

    #[test]
    fn experiment_at_zero_delta() {
        let ctx = HannerContext::new(&HannerExpr::cube(2));
        let r = local_min_experiment(&ctx, &int(0), 2, 1);
        assert_eq!(r.rows.len(), 2);
        for row in &r.rows {
            assert_eq!(row.gap(), int(0));
            assert_eq!(row.dx(), int(0));
            assert_eq!(row.santalo_margin(), int(0));
        }
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("tree,trial,seed"));
        assert_eq!(r.to_json()["min_gap"], "0/1");
    }

    #[test]
    fn experiment_is_reproducible() {
        let ctx = HannerContext::new(&HannerExpr::cube(2));
        let a = local_min_experiment(&ctx, &rat(1, 100), 3, 5);
        let b = local_min_experiment(&ctx, &rat(1, 100), 3, 5);
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.min_gap().unwrap() >= int(0));
    }
}
