//! Exact rational vectors, matrices and affine subspaces.
//!
//! Everything in here is exact: scalars are arbitrary precision rationals and
//! determinants go through fraction-free (Bareiss) elimination on integer rows.

use std::fmt;
use std::ops::{Add, Deref, DerefMut, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Canonical arbitrary precision rational (reduced, positive denominator).
pub type Rat = BigRational;

/// `n / d` as a [`Rat`].
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("degenerate affine combination: weights must be nonzero")]
    DegenerateCombination,
    #[error("invalid rational literal {0:?}")]
    Parse(String),
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rat(s: &str) -> Result<Rat, LinalgError> {
    let s = s.trim();
    let bad = || LinalgError::Parse(s.to_string());
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(p, q))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Always `"p/q"`, even for integers.
pub fn fmt_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Lossy decimal approximation, for reports only.
pub fn to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // huge numerators/denominators: scale down both sides
        let n = r.numer().to_string();
        let d = r.denom().to_string();
        let (nl, dl) = (n.trim_start_matches('-').len() as i32, d.len() as i32);
        let cut = |s: &str| s.chars().take(17).collect::<String>().parse::<f64>().unwrap_or(0.0);
        let mant = cut(n.trim_start_matches('-')) / cut(&d);
        let exp = (nl - 17.min(nl)) - (dl - 17.min(dl));
        let v = mant * 10f64.powi(exp);
        if r.is_negative() {
            -v
        } else {
            v
        }
    })
}

/// Fixed-length vector of rationals.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Vector(pub Vec<Rat>);

impl Vector {
    pub fn zeros(n: usize) -> Self {
        Vector(vec![Rat::zero(); n])
    }

    /// The standard basis vector `e_j` (0-based `j`).
    pub fn unit(n: usize, j: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[j] = Rat::one();
        v
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        Vector(xs.iter().map(|&x| int(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Accumulates over a common denominator and reduces once.
    pub fn dot(&self, other: &Vector) -> Rat {
        debug_assert_eq!(self.dim(), other.dim());
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for (a, b) in self.0.iter().zip(&other.0) {
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let pn = a.numer() * b.numer();
            let pd = a.denom() * b.denom();
            if pd == den {
                num += pn;
            } else if pd.is_one() {
                num += pn * &den;
            } else {
                num = num * &pd + pn * &den;
                den *= pd;
            }
        }
        Rat::new(num, den)
    }

    pub fn norm_sq(&self) -> Rat {
        self.dot(self)
    }

    pub fn scale(&self, s: &Rat) -> Vector {
        Vector(self.0.iter().map(|x| x * s).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// `self + s * other`
    pub fn axpy(&self, s: &Rat, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + s * b).collect())
    }

    /// Indices of nonzero coordinates.
    pub fn support(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| !self.0[i].is_zero()).collect()
    }
}

impl Deref for Vector {
    type Target = [Rat];
    fn deref(&self) -> &[Rat] {
        &self.0
    }
}

impl DerefMut for Vector {
    fn deref_mut(&mut self) -> &mut [Rat] {
        &mut self.0
    }
}

impl FromIterator<Rat> for Vector {
    fn from_iter<I: IntoIterator<Item = Rat>>(iter: I) -> Self {
        Vector(iter.into_iter().collect())
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl<'a> Add<&'a Vector> for &'a Vector {
    type Output = Vector;
    fn add(self, rhs: &'a Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl<'a> Sub<&'a Vector> for &'a Vector {
    type Output = Vector;
    fn sub(self, rhs: &'a Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector(self.0.iter().map(|a| -a).collect())
    }
}

impl<'a> Mul<&'a Rat> for &'a Vector {
    type Output = Vector;
    fn mul(self, rhs: &'a Rat) -> Vector {
        self.scale(rhs)
    }
}

/// Dense rectangular matrix stored by rows.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    rows: Vec<Vector>,
    ncols: usize,
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vector>) -> Result<Self, LinalgError> {
        let ncols = rows.first().map_or(0, Vector::dim);
        if let Some(bad) = rows.iter().find(|r| r.dim() != ncols) {
            return Err(LinalgError::Dimension {
                expected: ncols,
                found: bad.dim(),
            });
        }
        Ok(Matrix { rows, ncols })
    }

    /// Matrix with the given number of columns, even if there are no rows.
    pub fn with_cols(rows: Vec<Vector>, ncols: usize) -> Result<Self, LinalgError> {
        if let Some(bad) = rows.iter().find(|r| r.dim() != ncols) {
            return Err(LinalgError::Dimension {
                expected: ncols,
                found: bad.dim(),
            });
        }
        Ok(Matrix { rows, ncols })
    }

    pub fn identity(n: usize) -> Self {
        Matrix {
            rows: (0..n).map(|j| Vector::unit(n, j)).collect(),
            ncols: n,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &Vector {
        &self.rows[i]
    }

    pub fn transpose(&self) -> Matrix {
        let rows = (0..self.ncols)
            .map(|j| self.rows.iter().map(|r| r[j].clone()).collect())
            .collect();
        Matrix {
            rows,
            ncols: self.nrows(),
        }
    }

    pub fn mul_vec(&self, v: &Vector) -> Vector {
        self.rows.iter().map(|r| r.dot(v)).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let t = other.transpose();
        let rows = self
            .rows
            .iter()
            .map(|r| t.rows.iter().map(|c| r.dot(c)).collect())
            .collect();
        Matrix {
            rows,
            ncols: other.ncols,
        }
    }

    pub fn det(&self) -> Result<Rat, LinalgError> {
        if self.nrows() != self.ncols {
            return Err(LinalgError::NotSquare {
                rows: self.nrows(),
                cols: self.ncols,
            });
        }
        Ok(det_rows(&self.rows))
    }

    pub fn rank(&self) -> usize {
        rref(&self.rows, self.ncols).1.len()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        let n = self.nrows();
        if n != self.ncols {
            return None;
        }
        let aug: Vec<Vector> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut v = r.0.clone();
                v.extend(Vector::unit(n, i).0);
                Vector(v)
            })
            .collect();
        let (red, piv) = rref(&aug, 2 * n);
        if piv.len() < n || piv[n - 1] >= n {
            return None;
        }
        let rows = red.into_iter().map(|r| Vector(r.0[n..].to_vec())).collect();
        Some(Matrix { rows, ncols: n })
    }
}

/// Determinant of a square list of rows.
///
/// Rows are scaled to integers and reduced with Bareiss elimination, so every
/// intermediate division is exact.
pub fn det_rows(rows: &[Vector]) -> Rat {
    let n = rows.len();
    if n == 0 {
        return Rat::one();
    }
    let mut denom = BigInt::one();
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let (ints, scale) = integerize(r);
            denom *= scale;
            ints
        })
        .collect();
    let d = bareiss_det(&mut m);
    Rat::new(d, denom)
}

/// Scales a rational row to integers; returns the row and the scale factor.
pub(crate) fn integerize(r: &[Rat]) -> (Vec<BigInt>, BigInt) {
    let l = r.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints = r.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    (ints, l)
}

/// Sum by pairwise merging, so that terms with unrelated denominators meet
/// large partial sums only near the top.
pub fn sum_balanced(mut terms: Vec<Rat>) -> Rat {
    if terms.is_empty() {
        return Rat::zero();
    }
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        let mut it = terms.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => a + b,
                None => a,
            });
        }
        terms = next;
    }
    terms.pop().expect("one term left")
}

/// Determinant of a square integer matrix by Bareiss elimination; `m` is
/// overwritten.
pub(crate) fn det_ints(m: &mut [Vec<BigInt>]) -> BigInt {
    if m.is_empty() {
        return BigInt::one();
    }
    bareiss_det(m)
}

fn bareiss_det(m: &mut [Vec<BigInt>]) -> BigInt {
    let n = m.len();
    let mut sign = false;
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            m.swap(p, k);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// Reduced row echelon form. Returns the nonzero rows and the pivot columns.
///
/// Elimination is fraction-free on integerized rows; the rational
/// normalization happens once at the end.
pub fn rref(rows: &[Vector], ncols: usize) -> (Vec<Vector>, Vec<usize>) {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| integerize(r).0).collect();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(p, r);
        // fraction-free Gauss-Jordan: every entry stays a minor of the
        // input, so the division by the previous pivot is exact
        let (above, rest) = m.split_at_mut(r);
        let (pivot_row, below) = rest.split_first_mut().expect("pivot row");
        let piv = pivot_row[c].clone();
        for row in above.iter_mut().chain(below.iter_mut()) {
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(pivot_row.iter()) {
                let v = &piv * &*x - &f * y;
                debug_assert!((&v % &prev).is_zero());
                *x = v / &prev;
            }
        }
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    let out = m
        .into_iter()
        .take(r)
        .zip(&pivots)
        .map(|(row, &c)| {
            let p = row[c].clone();
            row.into_iter().map(|x| Rat::new(x, p.clone())).collect()
        })
        .collect();
    (out, pivots)
}

/// Solution set of a linear system `M x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Unique(Vector),
    /// `particular + span(null_basis)`
    Family {
        particular: Vector,
        null_basis: Vec<Vector>,
    },
    Inconsistent,
}

pub fn solve(m: &Matrix, b: &Vector) -> Result<Solution, LinalgError> {
    if m.nrows() != b.dim() {
        return Err(LinalgError::Dimension {
            expected: m.nrows(),
            found: b.dim(),
        });
    }
    let n = m.ncols();
    let aug: Vec<Vector> = m
        .rows()
        .iter()
        .zip(b.iter())
        .map(|(r, bi)| {
            let mut v = r.0.clone();
            v.push(bi.clone());
            Vector(v)
        })
        .collect();
    let (red, piv) = rref(&aug, n + 1);
    if piv.last() == Some(&n) {
        return Ok(Solution::Inconsistent);
    }
    let mut particular = Vector::zeros(n);
    for (row, &c) in red.iter().zip(&piv) {
        particular[c] = row[n].clone();
    }
    let null_basis = null_from_rref(&red, &piv, n);
    if null_basis.is_empty() {
        Ok(Solution::Unique(particular))
    } else {
        Ok(Solution::Family {
            particular,
            null_basis,
        })
    }
}

fn null_from_rref(red: &[Vector], piv: &[usize], n: usize) -> Vec<Vector> {
    let free: Vec<usize> = (0..n).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = Vector::zeros(n);
            v[f] = Rat::one();
            for (row, &c) in red.iter().zip(piv) {
                v[c] = -&row[f];
            }
            v
        })
        .collect()
}

/// Basis of `{x : <r, x> = 0 for every row r}`.
pub fn null_space(rows: &[Vector], n: usize) -> Vec<Vector> {
    let (red, piv) = rref(rows, n);
    null_from_rref(&red, &piv, n)
}

/// Basis of the orthogonal complement of `span(vs)` in `R^n`.
pub fn orth_complement(vs: &[Vector], n: usize) -> Vec<Vector> {
    null_space(vs, n)
}

/// Canonical basis (RREF rows) of `span(vs)`.
pub fn span_basis(vs: &[Vector], n: usize) -> Vec<Vector> {
    rref(vs, n).0
}

pub fn rank(vs: &[Vector], n: usize) -> usize {
    rref(vs, n).1.len()
}

/// Affine rank of a point set: dimension of its affine hull (`-1` if empty).
pub fn affine_dim(points: &[&Vector]) -> i64 {
    let Some(first) = points.first() else {
        return -1;
    };
    let diffs: Vec<Vector> = points[1..].iter().map(|p| *p - *first).collect();
    rank(&diffs, first.dim()) as i64
}

/// Orthogonal projection of `x` onto `span(basis)`; `basis` need not be orthogonal.
pub fn project_onto_span(x: &Vector, basis: &[Vector]) -> Vector {
    if basis.is_empty() {
        return Vector::zeros(x.dim());
    }
    // Gram system G c = B x
    let gram: Vec<Vector> = basis
        .iter()
        .map(|a| basis.iter().map(|b| a.dot(b)).collect())
        .collect();
    let rhs: Vector = basis.iter().map(|a| a.dot(x)).collect();
    let g = Matrix::from_rows(gram).expect("square gram matrix");
    let coeffs = match solve(&g, &rhs).expect("shapes agree") {
        Solution::Unique(c) => c,
        Solution::Family { particular, .. } => particular,
        Solution::Inconsistent => unreachable!("gram systems are consistent"),
    };
    basis
        .iter()
        .zip(coeffs.iter())
        .fold(Vector::zeros(x.dim()), |acc, (b, c)| acc.axpy(c, b))
}

/// Affine subspace `point + span(dirs)` in canonical form.
///
/// `dirs` is the RREF basis of the direction space and `point` is the unique
/// representative vanishing on the pivot coordinates, so structural equality
/// is equality of sets.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AffSub {
    point: Vector,
    dirs: Vec<Vector>,
    pivots: Vec<usize>,
}

impl fmt::Debug for AffSub {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} + span{:?}", self.point, self.dirs)
    }
}

impl AffSub {
    pub fn new(point: Vector, dirs: &[Vector]) -> Self {
        let n = point.dim();
        let (dirs, pivots) = rref(dirs, n);
        let mut point = point;
        for (d, &c) in dirs.iter().zip(&pivots) {
            if !point[c].is_zero() {
                let s = -point[c].clone();
                point = point.axpy(&s, d);
            }
        }
        AffSub {
            point,
            dirs,
            pivots,
        }
    }

    pub fn point(p: Vector) -> Self {
        Self::new(p, &[])
    }

    /// The canonical base point.
    pub fn base(&self) -> &Vector {
        &self.point
    }

    pub fn dirs(&self) -> &[Vector] {
        &self.dirs
    }

    pub fn dim(&self) -> usize {
        self.dirs.len()
    }

    pub fn ambient(&self) -> usize {
        self.point.dim()
    }

    pub fn contains_direction(&self, d: &Vector) -> bool {
        let mut r = d.clone();
        for (b, &c) in self.dirs.iter().zip(&self.pivots) {
            if !r[c].is_zero() {
                let s = -r[c].clone();
                r = r.axpy(&s, b);
            }
        }
        r.is_zero()
    }

    pub fn contains(&self, x: &Vector) -> bool {
        self.contains_direction(&(x - &self.point))
    }

    /// `{p + q : p in a, q in b}`
    pub fn sum(a: &AffSub, b: &AffSub) -> Result<AffSub, LinalgError> {
        check_ambient(a, b)?;
        let mut dirs = a.dirs.clone();
        dirs.extend(b.dirs.iter().cloned());
        Ok(AffSub::new(&a.point + &b.point, &dirs))
    }

    /// `{lambda * p : p in a}`; `lambda = 0` collapses to the origin.
    pub fn scale(&self, lambda: &Rat) -> AffSub {
        if lambda.is_zero() {
            return AffSub::point(Vector::zeros(self.ambient()));
        }
        AffSub::new(self.point.scale(lambda), &self.dirs)
    }

    /// `{alpha p + beta q : p in a, q in b}`, both weights nonzero.
    pub fn weighted_combination(
        alpha: &Rat,
        a: &AffSub,
        beta: &Rat,
        b: &AffSub,
    ) -> Result<AffSub, LinalgError> {
        check_ambient(a, b)?;
        if alpha.is_zero() || beta.is_zero() {
            return Err(LinalgError::DegenerateCombination);
        }
        AffSub::sum(&a.scale(alpha), &b.scale(beta))
    }

    /// Adds `span(extra)` to the direction space.
    pub fn extend(&self, extra: &[Vector]) -> AffSub {
        let mut dirs = self.dirs.clone();
        dirs.extend(extra.iter().cloned());
        AffSub::new(self.point.clone(), &dirs)
    }
}

fn check_ambient(a: &AffSub, b: &AffSub) -> Result<(), LinalgError> {
    if a.ambient() != b.ambient() {
        return Err(LinalgError::Dimension {
            expected: a.ambient(),
            found: b.ambient(),
        });
    }
    Ok(())
}
