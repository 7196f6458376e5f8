//! Flags of Hanner polytopes and the volume function `V`.
//!
//! A flag over an ℓ1 or ℓ∞ sum is determined by a type `σ ∈ {1,2}^n` and two
//! flags of the summands; enumeration follows that recursion. Near the
//! centroid assignment `C` every flag determinant keeps its sign, so `V` is a
//! signed sum of determinants there and its derivatives are exact.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::faces::{Face, FaceLattice};
use crate::hanner::{HannerExpr, SumKind};
use num_bigint::BigInt;

use crate::linalg::{det_ints, det_rows, int, integerize, sum_balanced, Matrix, Rat, Vector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlagError {
    #[error("type has {found_ones} ones and {found_twos} twos, expected {n1} and {n2}")]
    Multiplicity {
        n1: usize,
        n2: usize,
        found_ones: usize,
        found_twos: usize,
    },
    #[error("lower flags have lengths {0} and {1}, which do not match the summands")]
    LowerLength(usize, usize),
    #[error("assembling a flag needs a sum node, not a leaf")]
    Leaf,
    #[error("flag {0} has a zero determinant at the base assignment")]
    Degenerate(usize),
    #[error("index {ell} is outside 0..={max}")]
    OutOfRange { ell: usize, max: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// A chain `F^0 ⊂ ... ⊂ F^{n-1}` with its type (empty for a leaf).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Flag {
    pub chain: Vec<Face>,
    pub sigma: Vec<u8>,
}

/// `σ_j(k)`: number of `j`s among the first `k` entries.
pub fn sigma_count(sigma: &[u8], j: u8, k: usize) -> usize {
    sigma[..k].iter().filter(|&&x| x == j).count()
}

/// All tuples with `n1` ones and `n2` twos, in lexicographic order.
pub fn types(n1: usize, n2: usize) -> Vec<Vec<u8>> {
    if n1 == 0 {
        return vec![vec![2; n2]];
    }
    if n2 == 0 {
        return vec![vec![1; n1]];
    }
    let mut out = Vec::new();
    for mut t in types(n1 - 1, n2) {
        t.insert(0, 1);
        out.push(t);
    }
    for mut t in types(n1, n2 - 1) {
        t.insert(0, 2);
        out.push(t);
    }
    out
}

/// The flag of type `σ` with lower flags `f1`, `f2`.
pub fn assemble_flag(h: &HannerExpr, f1: &[Face], f2: &[Face], sigma: &[u8]) -> Result<Flag, FlagError> {
    let HannerExpr::Sum(kind, a, b) = h else {
        return Err(FlagError::Leaf);
    };
    let (n1, n2) = (a.n(), b.n());
    if f1.len() != n1 || f2.len() != n2 {
        return Err(FlagError::LowerLength(f1.len(), f2.len()));
    }
    let ones = sigma.iter().filter(|&&x| x == 1).count();
    let twos = sigma.iter().filter(|&&x| x == 2).count();
    if ones != n1 || twos != n2 || sigma.len() != n1 + n2 {
        return Err(FlagError::Multiplicity {
            n1,
            n2,
            found_ones: ones,
            found_twos: twos,
        });
    }
    let n = n1 + n2;
    let mut chain = vec![Face::Empty; n];
    for k in 1..=n {
        let (s1, s2) = (sigma_count(sigma, 1, k), sigma_count(sigma, 2, k));
        match kind {
            SumKind::L1 => {
                let g1 = if s1 == 0 { Face::Empty } else { f1[s1 - 1].clone() };
                let g2 = if s2 == 0 { Face::Empty } else { f2[s2 - 1].clone() };
                chain[k - 1] = Face::pair(g1, g2);
            }
            SumKind::Linf => {
                let g1 = if s1 == 0 { Face::Whole } else { f1[n1 - s1].clone() };
                let g2 = if s2 == 0 { Face::Whole } else { f2[n2 - s2].clone() };
                chain[n - k] = Face::pair(g1, g2);
            }
        }
    }
    Ok(Flag {
        chain,
        sigma: sigma.to_vec(),
    })
}

/// The lower flags of a flag over a sum: the proper summands, in order.
pub fn lower_flags(flag: &Flag) -> (Vec<Face>, Vec<Face>) {
    let mut f1: Vec<Face> = Vec::new();
    let mut f2: Vec<Face> = Vec::new();
    for f in &flag.chain {
        if let Face::Sum(a, b) = f {
            if a.is_proper() && f1.last() != Some(a) {
                f1.push((**a).clone());
            }
            if b.is_proper() && f2.last() != Some(b) {
                f2.push((**b).clone());
            }
        }
    }
    (f1, f2)
}

/// All flags, each exactly once, via the `(σ, F_1, F_2)` recursion.
pub fn enumerate_flags(h: &HannerExpr) -> Vec<Flag> {
    match h {
        HannerExpr::Leaf(_) => vec![
            Flag {
                chain: vec![Face::Plus],
                sigma: vec![],
            },
            Flag {
                chain: vec![Face::Minus],
                sigma: vec![],
            },
        ],
        HannerExpr::Sum(_, a, b) => {
            let (fa, fb) = (enumerate_flags(a), enumerate_flags(b));
            let ts = types(a.n(), b.n());
            let mut out = Vec::with_capacity(ts.len() * fa.len() * fb.len());
            for t in &ts {
                for x in &fa {
                    for y in &fb {
                        out.push(assemble_flag(h, &x.chain, &y.chain, t).expect("consistent shapes"));
                    }
                }
            }
            out
        }
    }
}

/// Flags of one lattice, with each chain resolved to face indices.
#[derive(Clone, Debug)]
pub struct FlagSet {
    pub flags: Vec<Flag>,
    /// `idx[f][k]` is the lattice index of `F^k` in flag `f`.
    pub idx: Vec<Vec<usize>>,
    n: usize,
}

impl FlagSet {
    pub fn new(lat: &FaceLattice) -> Self {
        let flags = enumerate_flags(lat.tree());
        let idx = flags
            .iter()
            .map(|fl| {
                fl.chain
                    .iter()
                    .map(|f| lat.index_of(f).expect("flag faces are lattice faces"))
                    .collect()
            })
            .collect();
        FlagSet {
            flags,
            idx,
            n: lat.n(),
        }
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Indices of flags that contain face `g`.
    pub fn containing(&self, g: usize) -> Vec<usize> {
        (0..self.len()).filter(|&f| self.idx[f].contains(&g)).collect()
    }
}

/// Points `z_F` indexed like the faces of a [`FaceLattice`].
pub type PointAssignment = Vec<Vector>;

fn factorial(n: usize) -> Rat {
    (1..=n as i64).fold(Rat::one(), |acc, k| acc * int(k))
}

/// `det(z_{F^0}, ..., z_{F^{n-1}})`
pub fn flag_det(z: &[Vector], chain: &[usize]) -> Rat {
    let rows: Vec<Vector> = chain.iter().map(|&i| z[i].clone()).collect();
    det_rows(&rows)
}

/// `det(z_{F^0}, ..., z_{F^{n-1}})` for each listed flag, integerizing each
/// point once rather than once per flag.
fn flag_dets(z: &[Vector], fs: &FlagSet, flags: impl Iterator<Item = usize>) -> Vec<Rat> {
    let ints: Vec<(Vec<BigInt>, BigInt)> = z.iter().map(|v| integerize(v)).collect();
    flags
        .map(|f| {
            let chain = &fs.idx[f];
            let mut m: Vec<Vec<BigInt>> = chain.iter().map(|&i| ints[i].0.clone()).collect();
            let scale: BigInt = chain.iter().map(|&i| &ints[i].1).product();
            Rat::new(det_ints(&mut m), scale)
        })
        .collect()
}

/// `|Z_F| = |det| / n!`
pub fn simplex_volume(z: &[Vector], chain: &[usize]) -> Rat {
    flag_det(z, chain).abs() / factorial(chain.len())
}

/// `V(Z) = Σ_F |Z_F|`
pub fn volume_function(z: &[Vector], fs: &FlagSet) -> Rat {
    let dets = flag_dets(z, fs, 0..fs.len());
    sum_balanced(dets.into_iter().map(|d| d.abs()).collect()) / factorial(fs.n())
}

/// Sign of every flag determinant at `c`; fails on a zero determinant.
pub fn flag_signs(c: &[Vector], fs: &FlagSet) -> Result<Vec<i8>, FlagError> {
    flag_dets(c, fs, 0..fs.len())
        .into_iter()
        .enumerate()
        .map(|(f, d)| {
            if d.is_zero() {
                Err(FlagError::Degenerate(f))
            } else if d.is_positive() {
                Ok(1)
            } else {
                Ok(-1)
            }
        })
        .collect()
}

/// `Σ_F s_F det(Z_F) / n!`, the polynomial that equals `V` near the base point.
pub fn frozen_volume(z: &[Vector], fs: &FlagSet, signs: &[i8]) -> Rat {
    let nf = factorial(fs.n());
    fs.idx
        .iter()
        .zip(signs)
        .map(|(c, &s)| flag_det(z, c) * int(s as i64))
        .sum::<Rat>()
        / nf
}

/// `<V'(C), Z>` by the per-flag formula: row-by-row replacement determinants.
pub fn directional_derivative(c: &[Vector], z: &[Vector], fs: &FlagSet) -> Result<Rat, FlagError> {
    let signs = flag_signs(c, fs)?;
    let nf = factorial(fs.n());
    let mut total = Rat::zero();
    for (chain, &s) in fs.idx.iter().zip(&signs) {
        let base: Vec<Vector> = chain.iter().map(|&i| c[i].clone()).collect();
        let mut acc = Rat::zero();
        for (k, &i) in chain.iter().enumerate() {
            let mut rows = base.clone();
            rows[k] = z[i].clone();
            acc += det_rows(&rows);
        }
        total += acc * int(s as i64);
    }
    Ok(total / nf)
}

/// The gradient of `V` at `c`, one vector per face, so that
/// `<V'(c), Z> = Σ_G <grad_G, z_G>`.
pub fn gradient(c: &[Vector], fs: &FlagSet) -> Result<Vec<Vector>, FlagError> {
    let n = fs.n();
    let nf = factorial(n);
    let mut grad = vec![Vector::zeros(n); c.len()];
    for (f, chain) in fs.idx.iter().enumerate() {
        let m = Matrix::from_rows(chain.iter().map(|&i| c[i].clone()).collect())
            .expect("rows share dimension");
        let d = m.det().expect("square");
        if d.is_zero() {
            return Err(FlagError::Degenerate(f));
        }
        let inv = m.inverse().expect("nonzero determinant");
        let w = d.abs() / &nf;
        // d det / d row_k = det * column k of the inverse
        for (k, &i) in chain.iter().enumerate() {
            let col: Vector = (0..n).map(|r| inv.row(r)[k].clone() * &w).collect();
            grad[i] = &grad[i] + &col;
        }
    }
    Ok(grad)
}

pub fn pair_with_gradient(grad: &[Vector], z: &[Vector]) -> Rat {
    grad.iter().zip(z).map(|(g, x)| g.dot(x)).sum()
}

#[derive(Clone, Debug)]
pub struct EqualVolumesReport {
    pub flags: usize,
    /// The common value `|C_F|` when all flags agree.
    pub common: Option<Rat>,
    /// `Σ_F |C_F|`.
    pub total: Rat,
    /// First flag whose volume differs from flag 0: `(index, chain, value)`.
    pub offending: Option<(usize, Vec<Face>, Rat)>,
}

pub fn equal_volumes_check(c: &[Vector], fs: &FlagSet) -> EqualVolumesReport {
    let nf = factorial(fs.n());
    let vols: Vec<Rat> = flag_dets(c, fs, 0..fs.len()).into_iter().map(|d| d.abs() / &nf).collect();
    let total = vols.iter().sum();
    let offending = vols
        .iter()
        .position(|v| v != &vols[0])
        .map(|i| (i, fs.flags[i].chain.clone(), vols[i].clone()));
    EqualVolumesReport {
        flags: fs.len(),
        common: offending.is_none().then(|| vols[0].clone()),
        total,
        offending,
    }
}

/// `φ_j^σ(ℓ)` from the Gauss-elimination lemma; `j ∈ {1, 2}`.
pub fn phi(sigma: &[u8], xi: &[Rat], j: u8, ell: usize) -> Result<Rat, FlagError> {
    let n = sigma.len();
    if xi.len() != n {
        return Err(FlagError::Shape(format!("ξ has {} entries, σ has {n}", xi.len())));
    }
    let nj = sigma_count(sigma, j, n);
    if ell > nj {
        return Err(FlagError::OutOfRange { ell, max: nj });
    }
    if ell == 0 {
        return Ok(Rat::zero());
    }
    let k = (1..=n)
        .find(|&k| sigma_count(sigma, j, k) == ell)
        .expect("ℓ <= n_j");
    Ok(big_phi(sigma, xi, j, k))
}

/// `Φ_j(k) = ξ_k + Σ_{ℓ<k, j_ℓ ≠ j_{ℓ+1}} (-1)^{j + j_ℓ} ξ_ℓ`, 1-based `k`.
fn big_phi(sigma: &[u8], xi: &[Rat], j: u8, k: usize) -> Rat {
    let mut acc = xi[k - 1].clone();
    for ell in 1..k {
        if sigma[ell - 1] != sigma[ell] {
            if (j + sigma[ell - 1]).is_multiple_of(2) {
                acc += &xi[ell - 1];
            } else {
                acc -= &xi[ell - 1];
            }
        }
    }
    acc
}

/// `|det M| = |det M'|` with `M`, `M'` built as in the Gauss-elimination lemma.
/// `p` and `q` hold `p_1..p_{n1}` and `q_1..q_{n2}`.
pub fn gauss_lemma_check(
    sigma: &[u8],
    xi: &[Rat],
    p: &[Vector],
    q: &[Vector],
    z: &Vector,
) -> Result<bool, FlagError> {
    let n = sigma.len();
    let (n1, n2) = (sigma_count(sigma, 1, n), sigma_count(sigma, 2, n));
    if p.len() != n1 || q.len() != n2 || xi.len() != n {
        return Err(FlagError::Shape(format!(
            "σ asks for {n1} p's, {n2} q's and {n} ξ's; got {}, {}, {}",
            p.len(),
            q.len(),
            xi.len()
        )));
    }
    if p.iter().chain(q).any(|v| v.dim() != n) || z.dim() != n {
        return Err(FlagError::Shape("vectors must have dimension n".into()));
    }
    let zero = Vector::zeros(n);
    let pk = |k: usize| if k == 0 { &zero } else { &p[k - 1] };
    let qk = |k: usize| if k == 0 { &zero } else { &q[k - 1] };
    let m: Vec<Vector> = (1..=n)
        .map(|k| {
            let s = pk(sigma_count(sigma, 1, k)) + qk(sigma_count(sigma, 2, k));
            s.axpy(&xi[k - 1], z)
        })
        .collect();
    let mut m2 = Vec::with_capacity(n);
    for k1 in 1..=n1 {
        m2.push(p[k1 - 1].axpy(&phi(sigma, xi, 1, k1)?, z));
    }
    for k2 in 1..=n2 {
        m2.push(q[k2 - 1].axpy(&phi(sigma, xi, 2, k2)?, z));
    }
    Ok(det_rows(&m).abs() == det_rows(&m2).abs())
}

/// Both sides of a volume identity, with the frozen-sign and the true sums.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityOutcome {
    pub lhs: Rat,
    pub rhs: Rat,
    /// True when no flag determinant changed sign, so the frozen-sign sum is
    /// the genuine sum of volumes.
    pub signs_preserved: bool,
}

impl IdentityOutcome {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// A base assignment with its flag signs and flag determinants, reused
/// across perturbations.
#[derive(Clone, Debug)]
pub struct BasePoint {
    pub c: Vec<Vector>,
    signs: Vec<i8>,
    dets: Vec<Rat>,
}

impl BasePoint {
    /// Fails if some flag determinant vanishes at `c`.
    pub fn new(c: &[Vector], fs: &FlagSet) -> Result<Self, FlagError> {
        let dets = flag_dets(c, fs, 0..fs.len());
        if let Some(f) = dets.iter().position(|d| d.is_zero()) {
            return Err(FlagError::Degenerate(f));
        }
        Ok(BasePoint {
            c: c.to_vec(),
            signs: dets.iter().map(|d| if d.is_positive() { 1 } else { -1 }).collect(),
            dets,
        })
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }
}

fn perturbed_sum(base: &BasePoint, w: &[Vector], fs: &FlagSet, flags: &[usize]) -> IdentityOutcome {
    let nf = factorial(fs.n());
    let cw: Vec<Vector> = base.c.iter().zip(w).map(|(a, b)| a + b).collect();
    let mut lhs = Vec::with_capacity(flags.len());
    let mut rhs = Vec::with_capacity(flags.len());
    let mut preserved = true;
    for (&f, d) in flags.iter().zip(flag_dets(&cw, fs, flags.iter().copied())) {
        let (d, d0) = if base.signs[f] < 0 { (-d, -&base.dets[f]) } else { (d, base.dets[f].clone()) };
        if !d.is_positive() {
            preserved = false;
        }
        lhs.push(d);
        rhs.push(d0);
    }
    IdentityOutcome {
        lhs: sum_balanced(lhs) / &nf,
        rhs: sum_balanced(rhs) / nf,
        signs_preserved: preserved,
    }
}

/// `Σ_{F ∋ G} |(C+W)_F| = Σ_{F ∋ G} |C_F|` with `w_F = ξ_{dim F+1} z` on
/// faces comparable with `G` and `0` elsewhere.
pub fn star_sum_check(
    lat: &FaceLattice,
    fs: &FlagSet,
    base: &BasePoint,
    g: usize,
    xi: &[Rat],
    z: &Vector,
) -> Result<IdentityOutcome, FlagError> {
    let n = lat.n();
    if xi.len() != n || z.dim() != n {
        return Err(FlagError::Shape("ξ and z must have n entries".into()));
    }
    let w: Vec<Vector> = (0..lat.len())
        .map(|i| {
            if lat.leq(i, g) || lat.leq(g, i) {
                z.scale(&xi[lat.dim(i)])
            } else {
                Vector::zeros(n)
            }
        })
        .collect();
    Ok(perturbed_sum(base, &w, fs, &fs.containing(g)))
}

/// `V(C + W_{ξ,z}) = V(C)` with `w_F = ξ_{dim F+1} z` on every face.
pub fn stability_check(
    lat: &FaceLattice,
    fs: &FlagSet,
    base: &BasePoint,
    xi: &[Rat],
    z: &Vector,
) -> Result<IdentityOutcome, FlagError> {
    let n = lat.n();
    if xi.len() != n || z.dim() != n {
        return Err(FlagError::Shape("ξ and z must have n entries".into()));
    }
    let w: Vec<Vector> = (0..lat.len()).map(|i| z.scale(&xi[lat.dim(i)])).collect();
    let all: Vec<usize> = (0..fs.len()).collect();
    Ok(perturbed_sum(base, &w, fs, &all))
}

/// Counts flags through each face; handy for reports.
pub fn flags_per_face(fs: &FlagSet, faces: usize) -> Vec<usize> {
    let mut out = vec![0; faces];
    for chain in &fs.idx {
        for &i in chain {
            out[i] += 1;
        }
    }
    out
}

/// Lookup from chains to flag indices.
pub fn chain_index(fs: &FlagSet) -> HashMap<Vec<usize>, usize> {
    fs.idx.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect()
}
