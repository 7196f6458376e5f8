//! Verification suites over one Hanner tree, shared by the command line and
//! the acceptance tests.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::faces::{verify_abc_lattice, FaceLattice, Fault};
use crate::flags::{
    equal_volumes_check, gradient, pair_with_gradient, stability_check, star_sum_check, BasePoint, FlagSet,
};
use crate::hanner::{check_cl_property, HannerExpr, SumKind};
use crate::linalg::{fmt_rat, int, rat, Rat, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Abc,
    EqualVolumes,
    Derivative,
    Cl,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Abc, Suite::EqualVolumes, Suite::Derivative, Suite::Cl];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Abc => "abc",
            Suite::EqualVolumes => "equal-volumes",
            Suite::Derivative => "derivative",
            Suite::Cl => "cl",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

/// Outcome of one suite on one tree.
#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub suite: Suite,
    pub passed: bool,
    /// One line; names the first offending object on failure.
    pub detail: String,
}

/// Sampling sizes for the randomized parts of the derivative suite.
#[derive(Clone, Copy, Debug)]
pub struct Samples {
    pub directions: usize,
    pub xis: usize,
    pub seed: u64,
}

impl Default for Samples {
    fn default() -> Self {
        Samples {
            directions: 100,
            xis: 20,
            seed: 0,
        }
    }
}

/// `|H|` from the sum rules `|A ⊕_∞ B| = |A||B|` and
/// `|A ⊕_1 B| = n1! n2! / n! |A||B|`.
pub fn sum_rule_volume(h: &HannerExpr) -> Rat {
    match h {
        HannerExpr::Leaf(_) => int(2),
        HannerExpr::Sum(k, a, b) => {
            let prod = sum_rule_volume(a) * sum_rule_volume(b);
            match k {
                SumKind::Linf => prod,
                SumKind::L1 => prod * factorial(a.n()) * factorial(b.n()) / factorial(h.n()),
            }
        }
    }
}

fn factorial(n: usize) -> Rat {
    (1..=n as i64).fold(Rat::one(), |acc, k| acc * int(k))
}

/// Lattices and flags for one tree, optionally with a fault injected into the
/// primal frames.
pub struct Fixture {
    pub h: HannerExpr,
    pub lat: FaceLattice,
    pub dual: FaceLattice,
    pub fs: FlagSet,
}

impl Fixture {
    pub fn new(h: &HannerExpr, fault: Option<Fault>) -> Self {
        let lat = match fault {
            Some(f) => FaceLattice::with_fault(h, f),
            None => FaceLattice::new(h),
        };
        let fs = FlagSet::new(&lat);
        Fixture {
            h: h.clone(),
            dual: FaceLattice::new(&h.dual()),
            lat,
            fs,
        }
    }

    pub fn run(&self, suite: Suite, samples: Samples) -> SuiteResult {
        let (passed, detail) = match suite {
            Suite::Abc => self.abc(),
            Suite::EqualVolumes => self.equal_volumes(),
            Suite::Derivative => self.derivative(samples),
            Suite::Cl => cl(&self.h),
        };
        SuiteResult { suite, passed, detail }
    }

    fn abc(&self) -> (bool, String) {
        let r = verify_abc_lattice(&self.lat, &self.dual);
        match r.violations.first() {
            None => (true, format!("{} faces satisfy (a), (b), (c)", r.faces_checked)),
            Some(v) => (
                false,
                format!(
                    "{} violations; first: condition {:?} at face {}: {}",
                    r.violations.len(),
                    v.condition,
                    face_text(&v.face),
                    v.detail
                ),
            ),
        }
    }

    fn equal_volumes(&self) -> (bool, String) {
        let n = self.h.n();
        let expected_flags = (1usize << n) * (1..=n).product::<usize>();
        let r = equal_volumes_check(&self.lat.centroids(), &self.fs);
        let vol = sum_rule_volume(&self.h);
        if r.flags != expected_flags {
            return (false, format!("{} flags, expected 2^n n! = {expected_flags}", r.flags));
        }
        if let Some((i, chain, v)) = &r.offending {
            let chain: Vec<String> = chain.iter().map(face_text).collect();
            return (
                false,
                format!("flag {i} has |C_F| = {} != |C_F0|; chain [{}]", fmt_rat(v), chain.join(", ")),
            );
        }
        if r.total != vol {
            return (false, format!("sum of |C_F| = {} but |H| = {}", fmt_rat(&r.total), fmt_rat(&vol)));
        }
        (
            true,
            format!(
                "{} flags, |C_F| = {} each, total {}",
                r.flags,
                fmt_rat(r.common.as_ref().expect("no offending flag")),
                fmt_rat(&r.total)
            ),
        )
    }

    /// `<V'(C), Z> = 0` on frame directions, then the stability and star-sum
    /// identities at small random `ξ`.
    fn derivative(&self, s: Samples) -> (bool, String) {
        let n = self.h.n();
        let c = self.lat.centroids();
        let grad = match gradient(&c, &self.fs) {
            Ok(g) => g,
            Err(e) => return (false, e.to_string()),
        };
        let base = match BasePoint::new(&c, &self.fs) {
            Ok(b) => b,
            Err(e) => return (false, e.to_string()),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        for k in 0..s.directions {
            let z: Vec<Vector> = self
                .lat
                .frames()
                .iter()
                .map(|fr| {
                    fr.dirs
                        .iter()
                        .fold(Vector::zeros(n), |acc, d| acc.axpy(&small(&mut rng, 5, 4), d))
                })
                .collect();
            let d = pair_with_gradient(&grad, &z);
            if !d.is_zero() {
                return (false, format!("direction {k}: <V'(C), Z> = {}", fmt_rat(&d)));
            }
        }
        for k in 0..s.xis {
            let xi: Vec<Rat> = (0..n).map(|_| rat(rng.gen_range(-5..=5), 1000)).collect();
            let zf: Vector = (0..n).map(|_| small(&mut rng, 3, 2)).collect();
            let out = match stability_check(&self.lat, &self.fs, &base, &xi, &zf) {
                Ok(o) => o,
                Err(e) => return (false, e.to_string()),
            };
            if !out.holds() {
                return (false, format!("stability sample {k}: {} != {}", fmt_rat(&out.lhs), fmt_rat(&out.rhs)));
            }
            let g = rng.gen_range(0..self.lat.len());
            let zg = self.lat.frame(g)
                .dirs
                .iter()
                .fold(Vector::zeros(n), |acc, d| acc.axpy(&small(&mut rng, 3, 2), d));
            let out = match star_sum_check(&self.lat, &self.fs, &base, g, &xi, &zg) {
                Ok(o) => o,
                Err(e) => return (false, e.to_string()),
            };
            if !out.holds() {
                return (
                    false,
                    format!(
                        "star sum at face {}: {} != {}",
                        face_text(self.lat.face(g)),
                        fmt_rat(&out.lhs),
                        fmt_rat(&out.rhs)
                    ),
                );
            }
        }
        (
            true,
            format!("{} frame directions, {} stability and star-sum samples", s.directions, s.xis),
        )
    }
}

fn cl(h: &HannerExpr) -> (bool, String) {
    let r = check_cl_property(h);
    match r.violations.first() {
        None => (true, format!("{} vertex pairs with |<v, v*>| = 1", r.pairs_checked)),
        Some((v, w, ip)) => (
            false,
            format!("<v, v*> = {} for v = {v:?}, v* = {w:?}", fmt_rat(ip)),
        ),
    }
}

fn small(rng: &mut ChaCha8Rng, num: i64, den: i64) -> Rat {
    rat(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

/// Compact JSON form of a face.
pub fn face_text(f: &crate::faces::Face) -> String {
    serde_json::to_string(f).expect("faces serialize")
}

/// Runs `suites` on `h` in order.
pub fn run_suites(h: &HannerExpr, suites: &[Suite], fault: Option<Fault>, samples: Samples) -> Vec<SuiteResult> {
    let fx = Fixture::new(h, fault);
    suites.iter().map(|&s| fx.run(s, samples)).collect()
}
