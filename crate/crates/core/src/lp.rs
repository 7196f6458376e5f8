//! Exact rational linear programming and nearest-point projection.
//!
//! Programs are in inequality form `max <c,u>` subject to `<a_i,u> <= b_i`
//! with few variables and many constraints, which suits a simplex that walks
//! between vertices (bases of `d` tight constraints) with Bland's rule.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::linalg::{
    integerize, null_space, rank, solve, span_basis, AffSub, Matrix, Rat, Solution, Vector,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("constraint {index} has dimension {found}, expected {expected}")]
    Dimension {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("the feasible region is empty")]
    Infeasible,
    #[error("active-set iteration did not settle after {0} steps")]
    NoConvergence(usize),
}

const QP_STEP_CAP: usize = 100_000;

/// `maximize <objective, u>` subject to `<a_i, u> <= b_i`.
#[derive(Clone, Debug)]
pub struct LinProg {
    pub objective: Vector,
    pub constraints: Vec<(Vector, Rat)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Present iff optimal.
    pub value: Option<Rat>,
    /// A basic optimal solution when optimal; a feasible point when unbounded.
    pub witness: Option<Vector>,
    /// Constraints tight at the witness.
    pub tight: Vec<usize>,
}

impl LpOutcome {
    fn infeasible() -> Self {
        LpOutcome {
            status: LpStatus::Infeasible,
            value: None,
            witness: None,
            tight: vec![],
        }
    }
}

impl LinProg {
    pub fn new(objective: Vector, constraints: Vec<(Vector, Rat)>) -> Self {
        LinProg {
            objective,
            constraints,
        }
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    fn check(&self) -> Result<(), LpError> {
        let d = self.dim();
        for (index, (a, _)) in self.constraints.iter().enumerate() {
            if a.dim() != d {
                return Err(LpError::Dimension {
                    index,
                    expected: d,
                    found: a.dim(),
                });
            }
        }
        Ok(())
    }

    pub fn is_feasible_point(&self, u: &Vector) -> bool {
        let ic = IntCons::new(&self.constraints);
        let x = integerize(u);
        (0..ic.len()).all(|i| !ic.slack(i, &x).is_negative())
    }

    pub fn tight_at(&self, u: &Vector) -> Vec<usize> {
        tight_set(&IntCons::new(&self.constraints), u)
    }
}

/// Constraints `(a, b)` scaled by positive integers so that slacks and
/// products with a direction are integer multiples with no reduction.
struct IntCons {
    rows: Vec<Vec<BigInt>>,
    rhs: Vec<BigInt>,
}

impl IntCons {
    fn new(cons: &[(Vector, Rat)]) -> Self {
        let (rows, rhs) = cons
            .iter()
            .map(|(a, b)| {
                let mut full = a.0.clone();
                full.push(b.clone());
                let (mut ints, _) = integerize(&full);
                let b = ints.pop().expect("rhs entry");
                (ints, b)
            })
            .unzip();
        IntCons { rows, rhs }
    }

    fn len(&self) -> usize {
        self.rows.len()
    }

    /// A positive multiple of `b_i - <a_i, x>` for `x = X / D`, namely
    /// `s_i (b_i D - <a_i, X>)`.
    fn slack(&self, i: usize, x: &(Vec<BigInt>, BigInt)) -> BigInt {
        &self.rhs[i] * &x.1 - dot_ints(&self.rows[i], &x.0)
    }

    fn along(&self, i: usize, p: &[BigInt]) -> BigInt {
        dot_ints(&self.rows[i], p)
    }
}

pub(crate) fn dot_ints(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum()
}

fn tight_set(ic: &IntCons, u: &Vector) -> Vec<usize> {
    let x = integerize(u);
    (0..ic.len()).filter(|&i| ic.slack(i, &x).is_zero()).collect()
}

/// Whether the first rows already span `R^d`; cheap when they do.
fn spans_quickly(rows: &[Vector], d: usize) -> bool {
    let head = &rows[..rows.len().min(2 * d + 2)];
    rank(head, d) == d
}

/// Solves the program exactly. Infeasible and unbounded programs are reported
/// through [`LpOutcome::status`].
pub fn maximize(p: &LinProg) -> Result<LpOutcome, LpError> {
    p.check()?;
    let d = p.dim();
    let rows: Vec<Vector> = p.constraints.iter().map(|(a, _)| a.clone()).collect();
    let full = spans_quickly(&rows, d);
    let basis = if full {
        (0..d).map(|j| Vector::unit(d, j)).collect()
    } else {
        span_basis(&rows, d)
    };
    let r = basis.len();
    // The objective can grow along directions no constraint sees.
    let escapes = if full {
        None
    } else {
        null_space(&rows, d)
            .into_iter()
            .find(|n| !n.dot(&p.objective).is_zero())
    };

    // Reduced coordinates w in R^r with u = sum_i w_i basis_i.
    let reduced: Vec<(Vector, Rat)> = if full {
        p.constraints.clone()
    } else {
        p.constraints
            .iter()
            .map(|(a, b)| (basis.iter().map(|q| a.dot(q)).collect(), b.clone()))
            .collect()
    };
    let ic = IntCons::new(&reduced);
    let lift = |w: &Vector| -> Vector {
        if full {
            return w.clone();
        }
        basis
            .iter()
            .zip(w.iter())
            .fold(Vector::zeros(d), |acc, (q, c)| acc.axpy(c, q))
    };
    let original = if full { None } else { Some(IntCons::new(&p.constraints)) };
    let tight_of = |u: &Vector, w: &Vector| match &original {
        None => tight_set(&ic, w),
        Some(o) => tight_set(o, u),
    };

    let Some(start) = feasible_point(&reduced, &ic, r) else {
        return Ok(LpOutcome::infeasible());
    };
    if escapes.is_some() {
        let u = lift(&start);
        return Ok(LpOutcome {
            status: LpStatus::Unbounded,
            value: None,
            tight: tight_of(&u, &start),
            witness: Some(u),
        });
    }
    let c_red: Vector = basis.iter().map(|q| p.objective.dot(q)).collect();
    match simplex_from(&reduced, &ic, &c_red, start) {
        Walk::Optimal(w) => {
            let u = lift(&w);
            Ok(LpOutcome {
                status: LpStatus::Optimal,
                value: Some(p.objective.dot(&u)),
                tight: tight_of(&u, &w),
                witness: Some(u),
            })
        }
        Walk::Unbounded(w) => {
            let u = lift(&w);
            Ok(LpOutcome {
                status: LpStatus::Unbounded,
                value: None,
                tight: tight_of(&u, &w),
                witness: Some(u),
            })
        }
    }
}

enum Walk {
    Optimal(Vector),
    Unbounded(Vector),
}

/// A feasible point of a full-column-rank system, via an auxiliary program.
fn feasible_point(cons: &[(Vector, Rat)], ic: &IntCons, r: usize) -> Option<Vector> {
    let origin = Vector::zeros(r);
    if ic.rhs.iter().all(|b| !b.is_negative()) {
        return Some(origin);
    }
    // max -s  s.t.  <a,w> - s <= b,  -s <= 0
    let worst = cons
        .iter()
        .map(|(_, b)| -b)
        .max()
        .expect("some constraint is violated");
    let mut aux: Vec<(Vector, Rat)> = cons
        .iter()
        .map(|(a, b)| {
            let mut v = a.0.clone();
            v.push(Rat::from_integer((-1).into()));
            (Vector(v), b.clone())
        })
        .collect();
    let mut only_s = Vector::zeros(r + 1);
    only_s[r] = Rat::from_integer((-1).into());
    aux.push((only_s.clone(), Rat::zero()));
    let mut start = Vector::zeros(r + 1);
    start[r] = worst;
    match simplex_from(&aux, &IntCons::new(&aux), &only_s, start) {
        Walk::Optimal(ws) if ws[r].is_zero() => Some(Vector(ws.0[..r].to_vec())),
        _ => None,
    }
}

/// Vertex simplex from a feasible point; the constraint matrix must have full
/// column rank.
fn simplex_from(cons: &[(Vector, Rat)], ic: &IntCons, c: &Vector, mut x: Vector) -> Walk {
    let d = c.dim();

    // Walk to a vertex without decreasing the objective.
    let mut work: Vec<usize> = Vec::new();
    for j in tight_set(ic, &x) {
        if work.len() == d {
            break;
        }
        if is_independent(cons, &work, j, d) {
            work.push(j);
        }
    }
    while work.len() < d {
        let rows: Vec<Vector> = work.iter().map(|&j| cons[j].0.clone()).collect();
        let mut p = null_space(&rows, d).swap_remove(0);
        if p.dot(c).is_negative() {
            p = -&p;
        }
        let mut blocked = ratio_test(ic, &x, &p, &work);
        if blocked.is_none() && p.dot(c).is_zero() {
            p = -&p;
            blocked = ratio_test(ic, &x, &p, &work);
        }
        let Some((step, j)) = blocked else {
            return Walk::Unbounded(x);
        };
        x = x.axpy(&step, &p);
        work.push(j);
    }

    let mut basis = work;
    loop {
        let a_b = Matrix::from_rows(basis.iter().map(|&j| cons[j].0.clone()).collect())
            .expect("rows share dimension");
        let inv = a_b.inverse().expect("basis rows are independent");
        // multipliers: A_B^T y = c  =>  y = A_B^{-T} c
        let y = inv.transpose().mul_vec(c);
        // Bland: leave the smallest constraint index with a negative multiplier
        let leave = (0..d)
            .filter(|&l| y[l].is_negative())
            .min_by_key(|&l| basis[l]);
        let Some(l) = leave else {
            return Walk::Optimal(x);
        };
        // direction with a_{B_l} p = -1, other basis rows 0
        let p: Vector = (0..d).map(|i| -&inv.row(i)[l]).collect();
        match ratio_test(ic, &x, &p, &basis) {
            None => return Walk::Unbounded(x),
            Some((step, j)) => {
                x = x.axpy(&step, &p);
                basis[l] = j;
            }
        }
    }
}

/// Smallest step along `p` that makes a constraint outside `skip` tight;
/// ties broken by smallest index.
fn ratio_test(ic: &IntCons, x: &Vector, p: &Vector, skip: &[usize]) -> Option<(Rat, usize)> {
    let xs = integerize(x);
    let (ps, pscale) = integerize(p);
    // step_j = slack_j / along_j, up to the common factor pscale / xs.1
    let mut best: Option<(BigInt, BigInt, usize)> = None;
    for j in 0..ic.len() {
        if skip.contains(&j) {
            continue;
        }
        let ap = ic.along(j, &ps);
        if !ap.is_positive() {
            continue;
        }
        let slack = ic.slack(j, &xs);
        if best.as_ref().is_none_or(|(bs, ba, _)| &slack * ba < bs * &ap) {
            best = Some((slack, ap, j));
        }
    }
    best.map(|(slack, ap, j)| (Rat::new(slack * pscale, ap * &xs.1), j))
}

fn is_independent(cons: &[(Vector, Rat)], set: &[usize], j: usize, d: usize) -> bool {
    let mut rows: Vec<Vector> = set.iter().map(|&i| cons[i].0.clone()).collect();
    rows.push(cons[j].0.clone());
    rank(&rows, d) == rows.len()
}

/// The Euclidean-nearest point to `target` of `onto ∩ {x : <a_i,x> <= b_i}`.
///
/// Works in the coordinates of `onto` and runs a primal active-set method on
/// the strictly convex quadratic; each step solves the equality-constrained
/// least-squares system of the current face exactly. The returned point is
/// certified by nonnegative multipliers on its active face.
pub fn nearest_point(
    target: &Vector,
    region: &[(Vector, Rat)],
    onto: &AffSub,
) -> Result<Vector, LpError> {
    nearest_point_in(target, &Halfspaces::new(region), onto)
}

/// A constraint system prepared once for repeated [`nearest_point_in`] calls.
pub struct Halfspaces {
    ic: IntCons,
}

impl Halfspaces {
    pub fn new(region: &[(Vector, Rat)]) -> Self {
        Halfspaces {
            ic: IntCons::new(region),
        }
    }

    /// Integer rows `a'` and right-hand sides `b'`, positive multiples of
    /// the original constraints.
    pub fn integer_rows(&self) -> impl Iterator<Item = (&[BigInt], &BigInt)> {
        self.ic.rows.iter().map(Vec::as_slice).zip(&self.ic.rhs)
    }
}

/// [`nearest_point`] against prepared constraints.
pub fn nearest_point_in(target: &Vector, region: &Halfspaces, onto: &AffSub) -> Result<Vector, LpError> {
    nearest_from(target, region, onto, onto.base())
}

/// [`nearest_point_in`] started from a known feasible point of `onto`.
pub fn nearest_point_from(
    target: &Vector,
    region: &Halfspaces,
    onto: &AffSub,
    feasible: &Vector,
) -> Result<Vector, LpError> {
    debug_assert!(onto.contains_direction(&(feasible - onto.base())));
    nearest_from(target, region, onto, feasible)
}

fn nearest_from(target: &Vector, region: &Halfspaces, onto: &AffSub, p0: &Vector) -> Result<Vector, LpError> {
    let n = onto.ambient();
    for (index, a) in region.ic.rows.iter().enumerate() {
        if a.len() != n {
            return Err(LpError::Dimension {
                index,
                expected: n,
                found: a.len(),
            });
        }
    }
    let dirs: Vec<Vector> = onto
        .dirs()
        .iter()
        .map(|d| integerize(d).0.into_iter().map(Rat::from_integer).collect())
        .collect();
    let k = dirs.len();
    // constraints in mu-coordinates, scaled by the denominator of p0:
    // <D^T a, mu> <= b - <a, p0>
    let dint: Vec<Vec<BigInt>> = dirs.iter().map(|d| d.iter().map(|x| x.numer().clone()).collect()).collect();
    let (x0, d0) = integerize(p0);
    let ic = IntCons {
        rows: region
            .ic
            .rows
            .iter()
            .map(|a| dint.iter().map(|d| dot_ints(a, d) * &d0).collect())
            .collect(),
        rhs: region
            .ic
            .rows
            .iter()
            .zip(&region.ic.rhs)
            .map(|(a, b)| b * &d0 - dot_ints(a, &x0))
            .collect(),
    };
    let cons: Vec<(Vector, Rat)> = ic
        .rows
        .iter()
        .zip(&ic.rhs)
        .map(|(a, b)| {
            (
                a.iter().cloned().map(Rat::from_integer).collect(),
                Rat::from_integer(b.clone()),
            )
        })
        .collect();
    let point = |mu: &Vector| -> Vector {
        dirs.iter()
            .zip(mu.iter())
            .fold(p0.clone(), |acc, (d, m)| acc.axpy(m, d))
    };
    if k == 0 {
        return if ic.rhs.iter().all(|b| !b.is_negative()) {
            Ok(p0.clone())
        } else {
            Err(LpError::Infeasible)
        };
    }
    // objective: |p0 + D mu - target|^2, Hessian G = D^T D, linear term D^T (p0 - target)
    let gram: Vec<Vector> = dirs
        .iter()
        .map(|a| dirs.iter().map(|b| a.dot(b)).collect())
        .collect();
    let offset = p0 - target;
    let lin: Vector = dirs.iter().map(|d| d.dot(&offset)).collect();

    // Guess the constraints violated by the free minimizer as the active
    // set; the KKT conditions certify the guess when it is right.
    let free = kkt_solve(&gram, &cons, &[], &-&lin).0;
    let guess: Vec<usize> = {
        let xs = integerize(&free);
        (0..ic.len()).filter(|&i| ic.slack(i, &xs).is_negative()).collect()
    };
    if guess.is_empty() {
        return Ok(point(&free));
    }
    let rows: Vec<Vector> = guess.iter().map(|&j| cons[j].0.clone()).collect();
    if guess.len() <= k && rank(&rows, k) == guess.len() {
        let (mu, lambda) = kkt_solve(&gram, &cons, &guess, &-&lin);
        let xs = integerize(&mu);
        if lambda.iter().all(|l| !l.is_negative()) && (0..ic.len()).all(|i| !ic.slack(i, &xs).is_negative()) {
            return Ok(point(&mu));
        }
    }

    let mut mu = if spans_quickly(&cons.iter().map(|(a, _)| a.clone()).collect::<Vec<_>>(), k) {
        feasible_point(&cons, &ic, k).ok_or(LpError::Infeasible)?
    } else {
        let found = maximize(&LinProg::new(Vector::zeros(k), cons.clone()))?;
        found.witness.ok_or(LpError::Infeasible)?
    };
    let grad = |mu: &Vector| -> Vector {
        (0..k)
            .map(|i| gram[i].dot(mu) + &lin[i])
            .collect()
    };

    let mut work: Vec<usize> = Vec::new();
    for j in tight_set(&ic, &mu) {
        if is_independent(&cons, &work, j, k) {
            work.push(j);
        }
    }
    for _ in 0..QP_STEP_CAP {
        let g = grad(&mu);
        let (s, lambda) = eqp_step(&gram, &cons, &work, &g);
        if s.is_zero() {
            let neg = (0..work.len())
                .filter(|&i| lambda[i].is_negative())
                .min_by_key(|&i| work[i]);
            match neg {
                None => return Ok(point(&mu)),
                Some(i) => {
                    work.remove(i);
                }
            }
        } else {
            let blocked = ratio_test(&ic, &mu, &s, &work);
            match blocked {
                Some((step, j)) if step <= Rat::from_integer(1.into()) => {
                    mu = mu.axpy(&step, &s);
                    work.push(j);
                }
                _ => mu = &mu + &s,
            }
        }
    }
    Err(LpError::NoConvergence(QP_STEP_CAP))
}

/// Solves `min 1/2 s^T G s + g^T s` subject to `a_j^T s = 0` for `j` in `work`.
/// Returns the step and the multipliers of the working constraints.
fn eqp_step(
    gram: &[Vector],
    cons: &[(Vector, Rat)],
    work: &[usize],
    g: &Vector,
) -> (Vector, Vector) {
    let mut rhs: Vector = g.iter().map(|x| -x).collect();
    rhs.0.extend(std::iter::repeat_n(Rat::zero(), work.len()));
    kkt_solve_rhs(gram, cons, work, rhs)
}

/// Minimizer of `1/2 mu^T G mu - h^T mu` on `{a_j^T mu = b_j : j in work}`
/// with its multipliers.
fn kkt_solve(gram: &[Vector], cons: &[(Vector, Rat)], work: &[usize], h: &Vector) -> (Vector, Vector) {
    let mut rhs = h.clone();
    rhs.0.extend(work.iter().map(|&j| cons[j].1.clone()));
    kkt_solve_rhs(gram, cons, work, rhs)
}

/// `[G A^T; A 0] [s; lambda] = rhs` for the rows `A` of `work`.
fn kkt_solve_rhs(gram: &[Vector], cons: &[(Vector, Rat)], work: &[usize], rhs: Vector) -> (Vector, Vector) {
    let k = gram.len();
    let m = work.len();
    let mut rows = Vec::with_capacity(k + m);
    for i in 0..k {
        let mut r = gram[i].0.clone();
        r.extend(work.iter().map(|&j| cons[j].0[i].clone()));
        rows.push(Vector(r));
    }
    for &j in work {
        let mut r = cons[j].0 .0.clone();
        r.extend(std::iter::repeat_n(Rat::zero(), m));
        rows.push(Vector(r));
    }
    let kkt = Matrix::from_rows(rows).expect("square KKT system");
    let sol = match solve(&kkt, &rhs).expect("shapes agree") {
        Solution::Unique(v) => v,
        other => unreachable!("KKT system of an independent working set is regular: {other:?}"),
    };
    (Vector(sol.0[..k].to_vec()), Vector(sol.0[k..].to_vec()))
}
