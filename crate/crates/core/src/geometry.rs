//! Symmetric rational polytopes with the origin in the interior.
//!
//! A [`Polytope`] always carries both representations, irredundant: its
//! vertices and its facet normals `a` with `<a, x> <= 1`. The polar is the
//! swap of the two lists. Conversions run the double description method on
//! the homogenized cone `{(x, t) : <a_i, x> <= t, t >= 0}`.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::hanner::{vertex_vectors, HannerExpr};
use crate::linalg::{affine_dim, det_ints, integerize, sum_balanced, fmt_rat, int, parse_rat, rank, rat, AffSub, Matrix, Rat, Vector};
use crate::lp::{nearest_point, nearest_point_in, Halfspaces, LpError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("empty input")]
    Empty,
    #[error("points have mixed dimensions")]
    Dimension,
    #[error("the origin is not an interior point of the hull (not full-dimensional or off-center)")]
    OriginNotInterior,
    #[error("the inequality system is unbounded")]
    Unbounded,
    #[error("not symmetric: {0:?} has no antipode")]
    NotSymmetric(Vector),
    #[error("perturbation size {0} exceeds 1/8")]
    DeltaTooLarge(String),
    #[error("linear map is singular")]
    Singular,
    #[error("coordinate subset is empty or out of range")]
    BadCoordinates,
    #[error("nearest-point solve failed: {0}")]
    Lp(#[from] LpError),
    #[error("bad JSON: {0}")]
    Json(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polytope {
    n: usize,
    vertices: Vec<Vector>,
    facets: Vec<Vector>,
    inc: Vec<Vec<usize>>,
}

/// Positive multiple of `v` with coprime integer entries.
fn primitive_ints(v: &[Rat]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    reduce(ints)
}

fn reduce(ints: Vec<BigInt>) -> Vec<BigInt> {
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

fn dot_ints(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Ray {
    v: Vec<BigInt>,
    zeros: Vec<u64>,
}

fn set_bit(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn popcount(a: &[u64]) -> u32 {
    a.iter().map(|x| x.count_ones()).sum()
}

/// Vertices of `{x : <r, x> <= 1 for r in rows}` by double description.
///
/// Rows and rays are kept as primitive integer vectors, so the inner loop
/// never touches fractions.
fn dd_vertices(rows: &[Vector], n: usize) -> Result<DdOut, GeometryError> {
    let d = n + 1;
    // homogenized constraints <(r, -1), (x, t)> <= 0, then -t <= 0
    let mut cons_q: Vec<Vector> = rows
        .iter()
        .map(|r| r.iter().cloned().chain(std::iter::once(int(-1))).collect())
        .collect();
    cons_q.push(Vector::unit(d, n).scale(&int(-1)));
    let cons: Vec<Vec<BigInt>> = cons_q.iter().map(|c| primitive_ints(c)).collect();
    let m = cons.len();
    let words = m.div_ceil(64);

    // initial basis of d independent constraints, t >= 0 first
    let mut basis: Vec<usize> = vec![m - 1];
    for i in 0..m - 1 {
        if basis.len() == d {
            break;
        }
        let mut trial: Vec<Vector> = basis.iter().map(|&j| cons_q[j].clone()).collect();
        trial.push(cons_q[i].clone());
        if rank(&trial, d) == trial.len() {
            basis.push(i);
        }
    }
    if basis.len() < d {
        return Err(GeometryError::Unbounded);
    }
    let bmat = Matrix::from_rows(basis.iter().map(|&j| cons_q[j].clone()).collect()).expect("square");
    let inv = bmat.inverse().ok_or(GeometryError::Unbounded)?;
    let mut rays: Vec<Ray> = (0..d)
        .map(|k| {
            let v: Vec<Rat> = (0..d).map(|r| -inv.row(r)[k].clone()).collect();
            let mut zeros = vec![0u64; words];
            for (kk, &j) in basis.iter().enumerate() {
                if kk != k {
                    set_bit(&mut zeros, j);
                }
            }
            Ray { v: primitive_ints(&v), zeros }
        })
        .collect();
    let in_basis: HashSet<usize> = basis.iter().copied().collect();

    for i in (0..m).filter(|i| !in_basis.contains(i)) {
        let a = &cons[i];
        let vals: Vec<BigInt> = rays.iter().map(|r| dot_ints(a, &r.v)).collect();
        let plus: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_positive()).collect();
        if plus.is_empty() {
            for (k, r) in rays.iter_mut().enumerate() {
                if vals[k].is_zero() {
                    set_bit(&mut r.zeros, i);
                }
            }
            continue;
        }
        let minus: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_negative()).collect();
        let mut fresh = Vec::new();
        for &p in &plus {
            for &q in &minus {
                let common: Vec<u64> = rays[p].zeros.iter().zip(&rays[q].zeros).map(|(x, y)| x & y).collect();
                if popcount(&common) + 2 < d as u32 {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(k, r)| k == p || k == q || !subset(&common, &r.zeros));
                if !adjacent {
                    continue;
                }
                let v: Vec<BigInt> = rays[q]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(y, x)| y * &vals[p] - x * &vals[q])
                    .collect();
                let mut zeros = common;
                set_bit(&mut zeros, i);
                fresh.push(Ray { v: reduce(v), zeros });
            }
        }
        let mut kept: Vec<Ray> = Vec::with_capacity(rays.len() + fresh.len());
        for (k, mut r) in rays.into_iter().enumerate() {
            if vals[k].is_positive() {
                continue;
            }
            if vals[k].is_zero() {
                set_bit(&mut r.zeros, i);
            }
            kept.push(r);
        }
        kept.extend(fresh);
        rays = kept;
    }
    let mut out = DdOut { rays: Vec::with_capacity(rays.len()), zeros: Vec::with_capacity(rays.len()) };
    for r in rays {
        if !r.v[n].is_positive() {
            return Err(GeometryError::Unbounded);
        }
        out.rays.push(r.v);
        out.zeros.push(r.zeros);
    }
    Ok(out)
}

/// Extreme rays of the homogenized cone with the rows each one is tight on.
struct DdOut {
    rays: Vec<Vec<BigInt>>,
    zeros: Vec<Vec<u64>>,
}

impl DdOut {
    fn point(&self, k: usize) -> Vector {
        let r = &self.rays[k];
        let t = r.last().expect("homogenized");
        r[..r.len() - 1].iter().map(|x| Rat::new(x.clone(), t.clone())).collect()
    }

    fn tight(&self, row: usize) -> Vec<usize> {
        (0..self.rays.len()).filter(|&k| has_bit(&self.zeros[k], row)).collect()
    }

    /// Whether the rays tight on `row` span a hyperplane of the cone.
    fn is_facet(&self, row: usize, n: usize) -> bool {
        let tight = self.tight(row);
        tight.len() >= n && reaches_rank(tight.iter().map(|&k| &self.rays[k]), n)
    }
}

fn has_bit(bits: &[u64], i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

/// Whether `vecs` contain `target` independent vectors. A rank reached modulo
/// a prime is a lower bound for the rank over the rationals, so the exact
/// elimination only runs when the modular one falls short.
fn reaches_rank<'a>(vecs: impl Iterator<Item = &'a Vec<BigInt>> + Clone, target: usize) -> bool {
    reaches_rank_mod(vecs.clone(), target) || reaches_rank_exact(vecs, target)
}

const RANK_PRIME: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % RANK_PRIME as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn reaches_rank_mod<'a>(vecs: impl Iterator<Item = &'a Vec<BigInt>>, target: usize) -> bool {
    let p = BigInt::from(RANK_PRIME);
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    for v in vecs {
        let mut w: Vec<u64> = v
            .iter()
            .map(|x| x.mod_floor(&p).try_into().expect("reduced below the prime"))
            .collect();
        for (piv, b) in &basis {
            let f = w[*piv];
            if f == 0 {
                continue;
            }
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi = (*wi + RANK_PRIME - mulmod(f, *bi)) % RANK_PRIME;
            }
        }
        if let Some(piv) = w.iter().position(|&x| x != 0) {
            let inv = powmod(w[piv], RANK_PRIME - 2);
            let w = w.iter().map(|&x| mulmod(x, inv)).collect();
            basis.push((piv, w));
            if basis.len() == target {
                return true;
            }
        }
    }
    false
}

fn reaches_rank_exact<'a>(vecs: impl Iterator<Item = &'a Vec<BigInt>>, target: usize) -> bool {
    let mut basis: Vec<(usize, Vec<Rat>)> = Vec::new();
    for v in vecs {
        let mut w: Vec<Rat> = v.iter().map(|x| Rat::from_integer(x.clone())).collect();
        for (piv, b) in &basis {
            if w[*piv].is_zero() {
                continue;
            }
            let f = &w[*piv] / &b[*piv];
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= &f * bi;
            }
        }
        if let Some(piv) = w.iter().position(|x| !x.is_zero()) {
            basis.push((piv, w));
            if basis.len() == target {
                return true;
            }
        }
    }
    basis.len() >= target
}

fn dedup(points: &[Vector]) -> Vec<Vector> {
    points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()
}

fn check_dims(points: &[Vector]) -> Result<usize, GeometryError> {
    let n = points.first().ok_or(GeometryError::Empty)?.dim();
    if n == 0 || points.iter().any(|p| p.dim() != n) {
        return Err(GeometryError::Dimension);
    }
    Ok(n)
}

/// Sorts both lists and reindexes the incidence `inc[facet] = vertices`.
fn assemble(n: usize, vertices: Vec<Vector>, facets: Vec<Vector>, inc: Vec<Vec<usize>>) -> Polytope {
    let mut vorder: Vec<usize> = (0..vertices.len()).collect();
    vorder.sort_by(|&a, &b| vertices[a].cmp(&vertices[b]));
    let mut vpos = vec![0; vertices.len()];
    for (new, &old) in vorder.iter().enumerate() {
        vpos[old] = new;
    }
    let mut forder: Vec<usize> = (0..facets.len()).collect();
    forder.sort_by(|&a, &b| facets[a].cmp(&facets[b]));
    let inc = forder
        .iter()
        .map(|&f| {
            let mut row: Vec<usize> = inc[f].iter().map(|&v| vpos[v]).collect();
            row.sort_unstable();
            row
        })
        .collect();
    Polytope {
        n,
        vertices: vorder.iter().map(|&i| vertices[i].clone()).collect(),
        facets: forder.iter().map(|&i| facets[i].clone()).collect(),
        inc,
    }
}

impl Polytope {
    /// The convex hull of `points`; the origin must be interior.
    pub fn from_vertices(points: &[Vector]) -> Result<Self, GeometryError> {
        let n = check_dims(points)?;
        let pts = dedup(points);
        let dd = dd_vertices(&pts, n).map_err(|e| match e {
            GeometryError::Unbounded => GeometryError::OriginNotInterior,
            other => other,
        })?;
        let keep: Vec<usize> = (0..pts.len()).filter(|&i| dd.is_facet(i, n)).collect();
        let facets: Vec<Vector> = (0..dd.rays.len()).map(|k| dd.point(k)).collect();
        let inc = dd
            .zeros
            .iter()
            .map(|z| (0..keep.len()).filter(|&j| has_bit(z, keep[j])).collect())
            .collect();
        let vertices = keep.iter().map(|&i| pts[i].clone()).collect();
        Ok(assemble(n, vertices, facets, inc))
    }

    /// `{x : <a, x> <= 1 for a in normals}`; must be bounded.
    pub fn from_inequalities(normals: &[Vector]) -> Result<Self, GeometryError> {
        let n = check_dims(normals)?;
        let rows: Vec<Vector> = dedup(normals).into_iter().filter(|a| !a.is_zero()).collect();
        if rows.is_empty() {
            return Err(GeometryError::Unbounded);
        }
        let dd = dd_vertices(&rows, n)?;
        let vertices: Vec<Vector> = (0..dd.rays.len()).map(|k| dd.point(k)).collect();
        let keep: Vec<usize> = (0..rows.len()).filter(|&i| dd.is_facet(i, n)).collect();
        let inc = keep.iter().map(|&i| dd.tight(i)).collect();
        let facets = keep.iter().map(|&i| rows[i].clone()).collect();
        Ok(assemble(n, vertices, facets, inc))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Vector] {
        &self.facets
    }

    pub fn polar(&self) -> Polytope {
        let mut inc = vec![Vec::new(); self.vertices.len()];
        for (f, vs) in self.inc.iter().enumerate() {
            for &v in vs {
                inc[v].push(f);
            }
        }
        Polytope {
            n: self.n,
            vertices: self.facets.clone(),
            facets: self.vertices.clone(),
            inc,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        let vs: HashSet<&Vector> = self.vertices.iter().collect();
        self.vertices.iter().all(|v| vs.contains(&-v))
    }

    pub fn check_symmetric(&self) -> Result<(), GeometryError> {
        let vs: HashSet<&Vector> = self.vertices.iter().collect();
        match self.vertices.iter().find(|v| !vs.contains(&-*v)) {
            Some(v) => Err(GeometryError::NotSymmetric(v.clone())),
            None => Ok(()),
        }
    }

    pub fn contains(&self, x: &Vector) -> bool {
        self.facets.iter().all(|a| a.dot(x) <= Rat::one())
    }

    /// Indices of vertices on each facet.
    pub fn incidence(&self) -> &[Vec<usize>] {
        &self.inc
    }

    /// Every vertex satisfies every inequality and each facet is tight on
    /// `n` affinely independent vertices.
    pub fn certify(&self) -> bool {
        let inside = self
            .facets
            .iter()
            .all(|a| self.vertices.iter().all(|v| a.dot(v) <= Rat::one()));
        inside
            && self.incidence().iter().all(|inc| {
                let pts: Vec<&Vector> = inc.iter().map(|&i| &self.vertices[i]).collect();
                affine_dim(&pts) == self.n as i64 - 1
            })
    }

    /// Exact volume: a pulling triangulation of each facet, coned from 0.
    pub fn volume(&self) -> Rat {
        let inc = &self.inc;
        let mut simplices = Vec::new();
        for f in inc {
            triangulate(inc, f.clone(), self.n - 1, &mut Vec::new(), &mut simplices);
        }
        let ints: Vec<(Vec<BigInt>, BigInt)> = self.vertices.iter().map(|v| integerize(v)).collect();
        let nf = (1..=self.n as i64).fold(BigInt::one(), |acc, k| acc * k);
        sum_balanced(
            simplices
                .iter()
                .map(|s| {
                    let mut rows: Vec<Vec<BigInt>> = s.iter().map(|&i| ints[i].0.clone()).collect();
                    let den = s.iter().fold(nf.clone(), |acc, &i| acc * &ints[i].1);
                    Rat::new(det_ints(&mut rows).abs(), den)
                })
                .collect(),
        )
    }

    /// `|K| |K°|`
    pub fn volume_product(&self) -> Rat {
        self.volume() * self.polar().volume()
    }

    /// `T(K)` for an invertible `T`; facets map by the inverse transpose.
    pub fn transform(&self, t: &Matrix) -> Result<Polytope, GeometryError> {
        if t.nrows() != self.n || t.ncols() != self.n {
            return Err(GeometryError::Dimension);
        }
        let inv_t = t.inverse().ok_or(GeometryError::Singular)?.transpose();
        Ok(assemble(
            self.n,
            self.vertices.iter().map(|v| t.mul_vec(v)).collect(),
            self.facets.iter().map(|a| inv_t.mul_vec(a)).collect(),
            self.inc.clone(),
        ))
    }

    /// Orthogonal projection onto the coordinates in `coords`.
    pub fn project(&self, coords: &[usize]) -> Result<Polytope, GeometryError> {
        self.check_coords(coords)?;
        let pts: Vec<Vector> = self
            .vertices
            .iter()
            .map(|v| coords.iter().map(|&j| v[j].clone()).collect())
            .collect();
        Polytope::from_vertices(&pts)
    }

    /// Section by the coordinate subspace spanned by `coords`.
    pub fn section(&self, coords: &[usize]) -> Result<Polytope, GeometryError> {
        self.check_coords(coords)?;
        let rows: Vec<Vector> = self
            .facets
            .iter()
            .map(|a| coords.iter().map(|&j| a[j].clone()).collect())
            .collect();
        Polytope::from_inequalities(&rows)
    }

    fn check_coords(&self, coords: &[usize]) -> Result<(), GeometryError> {
        let distinct: BTreeSet<usize> = coords.iter().copied().collect();
        if coords.is_empty() || distinct.len() != coords.len() || coords.iter().any(|&j| j >= self.n) {
            return Err(GeometryError::BadCoordinates);
        }
        Ok(())
    }

    /// `K ∩ B_∞^n`
    pub fn intersect_cube(&self) -> Result<Polytope, GeometryError> {
        let mut rows = self.facets.clone();
        for j in 0..self.n {
            rows.push(Vector::unit(self.n, j));
            rows.push(Vector::unit(self.n, j).scale(&int(-1)));
        }
        Polytope::from_inequalities(&rows)
    }

    /// Inequalities `(a, 1)` in the form the LP module takes.
    pub fn constraints(&self) -> Vec<(Vector, Rat)> {
        self.facets.iter().map(|a| (a.clone(), Rat::one())).collect()
    }

    pub fn to_json(&self) -> Value {
        let enc = |vs: &[Vector]| -> Vec<Vec<String>> { vs.iter().map(|v| v.iter().map(fmt_rat).collect()).collect() };
        json!({"n": self.n, "vertices": enc(&self.vertices), "facets": enc(&self.facets)})
    }

    /// Reads `{"n", "vertices"}` and rebuilds the hull; `facets` is ignored.
    pub fn from_json(v: &Value) -> Result<Polytope, GeometryError> {
        let bad = |m: &str| GeometryError::Json(m.to_string());
        let n = v["n"].as_u64().ok_or_else(|| bad("missing n"))? as usize;
        let rows = v["vertices"].as_array().ok_or_else(|| bad("missing vertices"))?;
        let mut pts = Vec::with_capacity(rows.len());
        for row in rows {
            let coords = row.as_array().ok_or_else(|| bad("vertex is not an array"))?;
            let p: Vector = coords
                .iter()
                .map(|c| match c {
                    Value::String(s) => parse_rat(s).map_err(|e| bad(&e.to_string())),
                    Value::Number(x) => x.as_i64().map(int).ok_or_else(|| bad("non-integer number")),
                    _ => Err(bad("coordinate must be a string or an integer")),
                })
                .collect::<Result<_, _>>()?;
            if p.dim() != n {
                return Err(GeometryError::Dimension);
            }
            pts.push(p);
        }
        Polytope::from_vertices(&pts)
    }
}

/// Pulling triangulation of the face with vertex set `face` and dimension
/// `d`; each simplex is appended as vertex indices (with `apexes` prefixed).
///
/// The facets of a face are the maximal proper intersections with facets.
fn triangulate(inc: &[Vec<usize>], face: Vec<usize>, d: usize, apexes: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if d == 0 {
        let mut s = apexes.clone();
        s.push(face[0]);
        out.push(s);
        return;
    }
    let apex = face[0];
    let meets: BTreeSet<Vec<usize>> = inc
        .iter()
        .map(|f| face.iter().copied().filter(|i| f.binary_search(i).is_ok()).collect::<Vec<usize>>())
        .filter(|m| m.len() >= d && m.len() < face.len())
        .collect();
    let is_sub = |a: &Vec<usize>, b: &Vec<usize>| a.len() < b.len() && a.iter().all(|i| b.binary_search(i).is_ok());
    let subfaces: Vec<&Vec<usize>> = meets
        .iter()
        .filter(|m| !m.contains(&apex) && !meets.iter().any(|o| is_sub(m, o)))
        .collect();
    apexes.push(apex);
    for sub in subfaces {
        triangulate(inc, sub.clone(), d - 1, apexes, out);
    }
    apexes.pop();
}

/// Squared Euclidean distance from `x` to `p`.
pub fn distance_sq(x: &Vector, p: &Polytope) -> Result<Rat, GeometryError> {
    let n = p.dim();
    let whole = AffSub::new(Vector::zeros(n), &(0..n).map(|j| Vector::unit(n, j)).collect::<Vec<_>>());
    let y = nearest_point(x, &p.constraints(), &whole)?;
    Ok((x - &y).norm_sq())
}

/// Exact squared Hausdorff distance: the farthest point of a polytope from a
/// convex set is one of its vertices. Vertices are screened with the
/// distance to the most violated facet plane (a lower bound) and to their
/// radial projection (an upper bound) before any exact projection.
pub fn hausdorff_sq(p: &Polytope, q: &Polytope) -> Result<Rat, GeometryError> {
    if p.dim() != q.dim() {
        return Err(GeometryError::Dimension);
    }
    let n = p.dim();
    let whole = AffSub::new(Vector::zeros(n), &(0..n).map(|j| Vector::unit(n, j)).collect::<Vec<_>>());
    let mut best = Rat::zero();
    for (a, b) in [(p, q), (q, p)] {
        let norms: Vec<Rat> = b.facets.iter().map(Vector::norm_sq).collect();
        let mut pending: Vec<(Rat, &Vector)> = Vec::new();
        for v in a.vertices() {
            let vals: Vec<Rat> = b.facets.iter().map(|f| f.dot(v)).collect();
            let rho = vals.iter().max().expect("a polytope has facets").clone();
            if rho <= Rat::one() {
                continue;
            }
            let lower = vals
                .iter()
                .zip(&norms)
                .filter(|(x, _)| *x > &Rat::one())
                .map(|(x, nn)| {
                    let e = x - Rat::one();
                    &e * &e / nn
                })
                .max()
                .expect("some facet is violated");
            let shrink = Rat::one() - Rat::one() / &rho;
            let upper = v.norm_sq() * &shrink * &shrink;
            if lower > best {
                best = lower;
            }
            pending.push((upper, v));
        }
        pending.sort_by(|x, y| y.0.cmp(&x.0));
        let hs = Halfspaces::new(&b.constraints());
        for (upper, v) in pending {
            if upper <= best {
                break;
            }
            let y = nearest_point_in(v, &hs, &whole)?;
            let d = (v - &y).norm_sq();
            if d > best {
                best = d;
            }
        }
    }
    Ok(best)
}

/// The Hanner polytope of `h` as a [`Polytope`].
pub fn hanner_polytope(h: &HannerExpr) -> Polytope {
    Polytope::from_vertices(&vertex_vectors(h)).expect("Hanner polytopes are full-dimensional and centered")
}

pub const PERTURB_DENOM: i64 = 16;

/// `conv{±(v + δ u_v)}` over antipodal vertex pairs of `h`, with rational
/// `u_v` drawn from the seed, `|u_v|^2 <= 1`.
pub fn perturb(h: &HannerExpr, delta: &Rat, seed: u64) -> Result<Polytope, GeometryError> {
    if delta > &rat(1, 8) || delta.is_negative() {
        return Err(GeometryError::DeltaTooLarge(fmt_rat(delta)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = h.n();
    let mut pts = Vec::new();
    for v in vertex_vectors(h) {
        // one representative per antipodal pair: first nonzero coordinate positive
        if v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
            continue;
        }
        let u = loop {
            let u: Vector = (0..n)
                .map(|_| rat(rng.gen_range(-PERTURB_DENOM..=PERTURB_DENOM), PERTURB_DENOM))
                .collect();
            if u.norm_sq() <= Rat::one() {
                break u;
            }
        };
        let w = v.axpy(delta, &u);
        pts.push(-&w);
        pts.push(w);
    }
    Polytope::from_vertices(&pts)
}

/// Radial function `max{r : r x ∈ K}` for `x != 0`.
pub fn radial(p: &Polytope, x: &Vector) -> Rat {
    let m = p
        .facets()
        .iter()
        .map(|a| a.dot(x))
        .max()
        .expect("a polytope has facets");
    Rat::one() / m
}
