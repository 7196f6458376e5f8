//! Hanner expression trees and their graphs.
//!
//! A standard Hanner polytope is written over coordinate intervals
//! `I_k = [-e_k, e_k]` with the binary operations `+1` (ℓ1 sum, convex hull of
//! the union) and `+inf` (ℓ∞ sum, Minkowski sum). Coordinates are 0-based in
//! the API and 1-based in text and JSON.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{int, Rat, Vector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HannerError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("coordinate I{0} appears more than once")]
    DuplicateIndex(usize),
    #[error("coordinate I{0} is missing (indices must be 1..=n)")]
    MissingIndex(usize),
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("graph is not P4-free: induced path {}-{}-{}-{}", .0[0] + 1, .0[1] + 1, .0[2] + 1, .0[3] + 1)]
    NotP4Free([usize; 4]),
    #[error("invalid edge {{{0}, {1}}} for a graph on {2} vertices")]
    BadEdge(usize, usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SumKind {
    L1,
    Linf,
}

impl SumKind {
    pub fn dual(self) -> SumKind {
        match self {
            SumKind::L1 => SumKind::Linf,
            SumKind::Linf => SumKind::L1,
        }
    }

    fn token(self) -> &'static str {
        match self {
            SumKind::L1 => "+1",
            SumKind::Linf => "+inf",
        }
    }
}

/// Binary ℓ1/ℓ∞ tree whose leaves are coordinate intervals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HannerExpr {
    Leaf(usize),
    Sum(SumKind, Box<HannerExpr>, Box<HannerExpr>),
}

impl HannerExpr {
    pub fn leaf(j: usize) -> Self {
        HannerExpr::Leaf(j)
    }

    pub fn l1(a: HannerExpr, b: HannerExpr) -> Self {
        HannerExpr::Sum(SumKind::L1, Box::new(a), Box::new(b))
    }

    pub fn linf(a: HannerExpr, b: HannerExpr) -> Self {
        HannerExpr::Sum(SumKind::Linf, Box::new(a), Box::new(b))
    }

    /// `B_∞^n` as a left-nested ℓ∞ chain.
    pub fn cube(n: usize) -> Self {
        Self::chain(SumKind::Linf, n)
    }

    /// `B_1^n` as a left-nested ℓ1 chain.
    pub fn cross(n: usize) -> Self {
        Self::chain(SumKind::L1, n)
    }

    fn chain(kind: SumKind, n: usize) -> Self {
        assert!(n >= 1, "a Hanner polytope has dimension at least 1");
        (1..n).fold(HannerExpr::Leaf(0), |acc, j| {
            HannerExpr::Sum(kind, Box::new(acc), Box::new(HannerExpr::Leaf(j)))
        })
    }

    /// Number of leaves, which is the dimension.
    pub fn n(&self) -> usize {
        match self {
            HannerExpr::Leaf(_) => 1,
            HannerExpr::Sum(_, a, b) => a.n() + b.n(),
        }
    }

    /// Leaf coordinates in left-to-right order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            HannerExpr::Leaf(j) => out.push(*j),
            HannerExpr::Sum(_, a, b) => {
                a.collect_leaves(out);
                b.collect_leaves(out);
            }
        }
    }

    pub fn min_leaf(&self) -> usize {
        match self {
            HannerExpr::Leaf(j) => *j,
            HannerExpr::Sum(_, a, b) => a.min_leaf().min(b.min_leaf()),
        }
    }

    /// The tree of the polar body: ℓ1 and ℓ∞ swapped.
    pub fn dual(&self) -> HannerExpr {
        match self {
            HannerExpr::Leaf(j) => HannerExpr::Leaf(*j),
            HannerExpr::Sum(k, a, b) => {
                HannerExpr::Sum(k.dual(), Box::new(a.dual()), Box::new(b.dual()))
            }
        }
    }

    /// Children reordered by smallest leaf, recursively.
    pub fn canonical(&self) -> HannerExpr {
        match self {
            HannerExpr::Leaf(j) => HannerExpr::Leaf(*j),
            HannerExpr::Sum(k, a, b) => {
                let (a, b) = (a.canonical(), b.canonical());
                if a.min_leaf() <= b.min_leaf() {
                    HannerExpr::Sum(*k, Box::new(a), Box::new(b))
                } else {
                    HannerExpr::Sum(*k, Box::new(b), Box::new(a))
                }
            }
        }
    }

    /// Checks that the leaves are exactly `0..n`.
    pub fn validate(&self) -> Result<(), HannerError> {
        let leaves = self.leaves();
        let mut seen = vec![false; leaves.len()];
        for &j in &leaves {
            if j >= leaves.len() {
                let missing = (0..leaves.len()).find(|&i| !leaves.contains(&i)).unwrap_or(0);
                return Err(HannerError::MissingIndex(missing + 1));
            }
            if seen[j] {
                return Err(HannerError::DuplicateIndex(j + 1));
            }
            seen[j] = true;
        }
        Ok(())
    }
}

impl fmt::Display for HannerExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HannerExpr::Leaf(j) => write!(f, "I{}", j + 1),
            HannerExpr::Sum(k, a, b) => write!(f, "({a} {} {b})", k.token()),
        }
    }
}

impl std::str::FromStr for HannerExpr {
    type Err = HannerError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expr(s)
    }
}

/// Parses `H ::= I<k> | (H +1 H) | (H +inf H)` with 1-based `k`.
pub fn parse_expr(text: &str) -> Result<HannerExpr, HannerError> {
    let mut p = Parser { s: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(p.err("trailing input"));
    }
    e.validate()?;
    Ok(e)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> HannerError {
        HannerError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        if self.s[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<HannerExpr, HannerError> {
        self.skip_ws();
        if self.eat("I") {
            let start = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let digits = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
            let k: usize = digits.parse().map_err(|_| self.err("expected coordinate index"))?;
            if k == 0 {
                return Err(self.err("coordinate indices start at 1"));
            }
            return Ok(HannerExpr::Leaf(k - 1));
        }
        if !self.eat("(") {
            return Err(self.err("expected 'I<k>' or '('"));
        }
        let a = self.expr()?;
        self.skip_ws();
        let kind = if self.eat("+inf") {
            SumKind::Linf
        } else if self.eat("+1") {
            SumKind::L1
        } else {
            return Err(self.err("expected '+1' or '+inf'"));
        };
        let b = self.expr()?;
        self.skip_ws();
        if !self.eat(")") {
            return Err(self.err("expected ')'"));
        }
        Ok(HannerExpr::Sum(kind, Box::new(a), Box::new(b)))
    }
}

/// Simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        assert!(n <= 64, "graphs are limited to 64 vertices");
        Graph { n, adj: vec![0; n] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                g.add_edge(i, j);
            }
        }
        g
    }

    /// 0-based edge list.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, HannerError> {
        let mut g = Self::empty(n);
        for &(i, j) in edges {
            if i >= n || j >= n || i == j {
                return Err(HannerError::BadEdge(i.wrapping_add(1), j.wrapping_add(1), n));
            }
            g.add_edge(i, j);
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        self.adj[i] |= 1 << j;
        self.adj[j] |= 1 << i;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i] >> j & 1 == 1
    }

    pub fn neighbors(&self, i: usize) -> u64 {
        self.adj[i]
    }

    /// 0-based edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn complement(&self) -> Graph {
        let full = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        let adj = (0..self.n)
            .map(|i| !self.adj[i] & full & !(1 << i))
            .collect();
        Graph { n: self.n, adj }
    }

    /// Relabels vertex `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        let mut g = Graph::empty(self.n);
        for (i, j) in self.edges() {
            g.add_edge(perm[i], perm[j]);
        }
        g
    }

    /// JSON `{"n": int, "edges": [[i,j],...]}` with 1-based vertices.
    pub fn from_json(text: &str) -> Result<Self, String> {
        let raw: GraphJson = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let edges: Vec<(usize, usize)> = raw
            .edges
            .iter()
            .map(|[i, j]| (i.wrapping_sub(1), j.wrapping_sub(1)))
            .collect();
        if raw.n > 64 {
            return Err("graphs are limited to 64 vertices".into());
        }
        Graph::from_edges(raw.n, &edges).map_err(|e| e.to_string())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(GraphJson {
            n: self.n,
            edges: self.edges().iter().map(|&(i, j)| [i + 1, j + 1]).collect(),
        })
        .expect("plain data serializes")
    }

    /// Connected components of the subgraph induced by `set`, as bitmasks
    /// sorted by smallest vertex.
    fn components(&self, set: u64) -> Vec<u64> {
        let mut rest = set;
        let mut out = Vec::new();
        while rest != 0 {
            let start = rest.trailing_zeros() as usize;
            let mut comp = 1u64 << start;
            let mut frontier = comp;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let new = self.adj[v] & set & !comp;
                comp |= new;
                frontier |= new;
            }
            rest &= !comp;
            out.push(comp);
        }
        out
    }

    /// An induced path `a-b-c-d` inside `set`, if any.
    pub fn find_induced_p4(&self, set: u64) -> Option<[usize; 4]> {
        let vs: Vec<usize> = bits(set).collect();
        for &b in &vs {
            for &c in &vs {
                if b == c || !self.has_edge(b, c) {
                    continue;
                }
                for &a in &vs {
                    if a == c || !self.has_edge(a, b) || self.has_edge(a, c) {
                        continue;
                    }
                    for &d in &vs {
                        if d == a || d == b || !self.has_edge(c, d) {
                            continue;
                        }
                        if !self.has_edge(b, d) && !self.has_edge(a, d) {
                            return Some([a, b, c, d]);
                        }
                    }
                }
            }
        }
        None
    }

    pub fn is_p4_free(&self) -> bool {
        let all = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        self.find_induced_p4(all).is_none()
    }

    /// Maximal independent sets as sorted vertex lists, lexicographically ordered.
    pub fn maximal_independent_sets(&self) -> Vec<Vec<usize>> {
        self.complement().maximal_cliques()
    }

    /// Maximal cliques (Bron–Kerbosch with pivoting), lexicographically ordered.
    pub fn maximal_cliques(&self) -> Vec<Vec<usize>> {
        let all = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        let mut out = Vec::new();
        if self.n > 0 {
            self.bron_kerbosch(0, all, 0, &mut out);
        }
        let mut sets: Vec<Vec<usize>> = out.into_iter().map(|m| bits(m).collect()).collect();
        sets.sort();
        sets
    }

    fn bron_kerbosch(&self, r: u64, mut p: u64, mut x: u64, out: &mut Vec<u64>) {
        if p == 0 {
            if x == 0 {
                out.push(r);
            }
            return;
        }
        let pivot = bits(p | x)
            .max_by_key(|&u| (self.adj[u] & p).count_ones())
            .expect("p is nonempty");
        for v in bits(p & !self.adj[pivot]) {
            let nv = self.adj[v];
            self.bron_kerbosch(r | 1 << v, p & nv, x & nv, out);
            p &= !(1 << v);
            x |= 1 << v;
        }
    }
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}

/// `i ~ j` iff the lowest common ancestor of leaves `i` and `j` is an ℓ1 node.
pub fn graph_of(h: &HannerExpr) -> Graph {
    let mut g = Graph::empty(h.n());
    fn walk(h: &HannerExpr, g: &mut Graph) {
        if let HannerExpr::Sum(k, a, b) = h {
            if *k == SumKind::L1 {
                for i in a.leaves() {
                    for j in b.leaves() {
                        g.add_edge(i, j);
                    }
                }
            }
            walk(a, g);
            walk(b, g);
        }
    }
    walk(h, &mut g);
    g
}

/// Cograph decomposition: components give ℓ∞ sums, co-components give ℓ1
/// sums. Parts are folded left to right in order of smallest vertex.
pub fn hanner_of_graph(g: &Graph) -> Result<HannerExpr, HannerError> {
    if g.n() == 0 {
        return Err(HannerError::EmptyGraph);
    }
    let all = if g.n() == 64 { u64::MAX } else { (1u64 << g.n()) - 1 };
    decompose(g, &g.complement(), all)
}

fn decompose(g: &Graph, co: &Graph, set: u64) -> Result<HannerExpr, HannerError> {
    if set.count_ones() == 1 {
        return Ok(HannerExpr::Leaf(set.trailing_zeros() as usize));
    }
    let (kind, parts) = {
        let comps = g.components(set);
        if comps.len() > 1 {
            (SumKind::Linf, comps)
        } else {
            let cocomps = co.components(set);
            if cocomps.len() > 1 {
                (SumKind::L1, cocomps)
            } else {
                let p4 = g
                    .find_induced_p4(set)
                    .expect("a connected, co-connected graph has an induced P4");
                return Err(HannerError::NotP4Free(p4));
            }
        }
    };
    let mut it = parts.into_iter();
    let first = decompose(g, co, it.next().expect("at least two parts"))?;
    it.try_fold(first, |acc, part| {
        Ok(HannerExpr::Sum(kind, Box::new(acc), Box::new(decompose(g, co, part)?)))
    })
}

/// `Σ signs[i] e_{support[i]}`; used for vertices of `H` and of `H°`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignedSupport {
    pub support: Vec<usize>,
    pub signs: Vec<i8>,
}

impl SignedSupport {
    pub fn to_vector(&self, n: usize) -> Vector {
        let mut v = Vector::zeros(n);
        for (&j, &s) in self.support.iter().zip(&self.signs) {
            v[j] = int(s as i64);
        }
        v
    }

    fn all_signs(set: &[usize]) -> impl Iterator<Item = SignedSupport> + '_ {
        (0..1u32 << set.len()).map(move |mask| SignedSupport {
            support: set.to_vec(),
            signs: (0..set.len())
                .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
                .collect(),
        })
    }
}

/// Vertices of `H`: every sign pattern on every maximal independent set.
pub fn vertices(h: &HannerExpr) -> Vec<SignedSupport> {
    graph_of(h)
        .maximal_independent_sets()
        .iter()
        .flat_map(|s| SignedSupport::all_signs(s).collect::<Vec<_>>())
        .collect()
}

/// Vertices of `H°`: every sign pattern on every maximal clique.
pub fn polar_vertices(h: &HannerExpr) -> Vec<SignedSupport> {
    graph_of(h)
        .maximal_cliques()
        .iter()
        .flat_map(|s| SignedSupport::all_signs(s).collect::<Vec<_>>())
        .collect()
}

/// Vertices of `H` as vectors.
pub fn vertex_vectors(h: &HannerExpr) -> Vec<Vector> {
    let n = h.n();
    vertices(h).iter().map(|v| v.to_vector(n)).collect()
}

/// Facet normals of `H`, so that `H = {x : <a, x> <= 1}`; these are the
/// vertices of `H°`.
pub fn facet_normals(h: &HannerExpr) -> Vec<Vector> {
    let n = h.n();
    polar_vertices(h).iter().map(|v| v.to_vector(n)).collect()
}

#[derive(Clone, Debug, Default)]
pub struct ClReport {
    pub pairs_checked: usize,
    /// `(v, v*, <v, v*>)` for every pair with `|<v, v*>| != 1`.
    pub violations: Vec<(SignedSupport, SignedSupport, Rat)>,
}

impl ClReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `|<v, v*>| = 1` for every vertex of `H` and of `H°`.
pub fn check_cl_property(h: &HannerExpr) -> ClReport {
    let n = h.n();
    let vs = vertices(h);
    let ws = polar_vertices(h);
    let one = int(1);
    let mut report = ClReport::default();
    for v in &vs {
        let x = v.to_vector(n);
        for w in &ws {
            report.pairs_checked += 1;
            let ip = x.dot(&w.to_vector(n));
            if num_traits::Signed::abs(&ip) != one {
                report.violations.push((v.clone(), w.clone(), ip));
            }
        }
    }
    report
}

/// All Hanner trees in dimension `n` up to swapping children, with leaves
/// numbered `0..n` in depth-first order.
///
/// Different bracketings of the same sum (for example the two trees of
/// `B_1^4`) are kept apart: the affine frames depend on the bracketing.
pub fn canonical_trees(n: usize) -> Vec<HannerExpr> {
    let mut memo: BTreeMap<usize, Vec<Shape>> = BTreeMap::new();
    shapes(n, &mut memo)
        .into_iter()
        .map(|s| {
            let mut next = 0;
            s.label(&mut next)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Shape {
    Leaf,
    Sum(SumKind, Box<Shape>, Box<Shape>),
}

impl Shape {
    fn size(&self) -> usize {
        match self {
            Shape::Leaf => 1,
            Shape::Sum(_, a, b) => a.size() + b.size(),
        }
    }

    fn label(&self, next: &mut usize) -> HannerExpr {
        match self {
            Shape::Leaf => {
                *next += 1;
                HannerExpr::Leaf(*next - 1)
            }
            Shape::Sum(k, a, b) => {
                let a = a.label(next);
                let b = b.label(next);
                HannerExpr::Sum(*k, Box::new(a), Box::new(b))
            }
        }
    }
}

fn shapes(n: usize, memo: &mut BTreeMap<usize, Vec<Shape>>) -> Vec<Shape> {
    if let Some(s) = memo.get(&n) {
        return s.clone();
    }
    let out: Vec<Shape> = if n == 1 {
        vec![Shape::Leaf]
    } else {
        let mut set = BTreeSet::new();
        for n1 in 1..=n / 2 {
            let left = shapes(n1, memo);
            let right = shapes(n - n1, memo);
            for a in &left {
                for b in &right {
                    // order children: smaller size first, then by shape order
                    let (x, y) = if (a.size(), a) <= (b.size(), b) { (a, b) } else { (b, a) };
                    for k in [SumKind::L1, SumKind::Linf] {
                        set.insert(Shape::Sum(k, Box::new(x.clone()), Box::new(y.clone())));
                    }
                }
            }
        }
        set.into_iter().collect()
    };
    memo.insert(n, out.clone());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Vector;
    use proptest::prelude::*;

    fn p(s: &str) -> HannerExpr {
        parse_expr(s).unwrap()
    }

    /// Extreme points by the sum rules: union for ℓ1, Minkowski sum for ℓ∞.
    fn ext_by_tree(h: &HannerExpr, n: usize) -> BTreeSet<Vector> {
        match h {
            HannerExpr::Leaf(j) => {
                let e = Vector::unit(n, *j);
                [e.clone(), -&e].into_iter().collect()
            }
            HannerExpr::Sum(SumKind::L1, a, b) => {
                let mut s = ext_by_tree(a, n);
                s.extend(ext_by_tree(b, n));
                s
            }
            HannerExpr::Sum(SumKind::Linf, a, b) => {
                let (sa, sb) = (ext_by_tree(a, n), ext_by_tree(b, n));
                sa.iter().flat_map(|x| sb.iter().map(move |y| x + y)).collect()
            }
        }
    }

    /// `e_i + e_j ∈ H`, decided by an LP over convex combinations of the
    /// extreme points.
    fn sum_in_h(h: &HannerExpr, i: usize, j: usize) -> bool {
        use crate::lp::{maximize, LinProg, LpStatus};
        let n = h.n();
        let pts: Vec<Vector> = ext_by_tree(h, n).into_iter().collect();
        let m = pts.len();
        let x = &Vector::unit(n, i) + &Vector::unit(n, j);
        let mut cons = Vec::new();
        for k in 0..m {
            cons.push((-&Vector::unit(m, k), int(0)));
        }
        let ones: Vector = (0..m).map(|_| int(1)).collect();
        cons.push((ones.clone(), int(1)));
        cons.push((-&ones, int(-1)));
        for c in 0..n {
            let row: Vector = pts.iter().map(|v| v[c].clone()).collect();
            cons.push((row.clone(), x[c].clone()));
            cons.push((-&row, -x[c].clone()));
        }
        maximize(&LinProg::new(Vector::zeros(m), cons)).unwrap().status == LpStatus::Optimal
    }

    #[test]
    fn parse_examples() {
        assert_eq!(p("(I1 +inf I2)"), HannerExpr::linf(HannerExpr::Leaf(0), HannerExpr::Leaf(1)));
        let h = p("((I1 +1 I2) +inf (I3 +1 I4))");
        assert_eq!(h.n(), 4);
        assert_eq!(h.to_string(), "((I1 +1 I2) +inf (I3 +1 I4))");
        assert_eq!(parse_expr("(I1 +1 I1)"), Err(HannerError::DuplicateIndex(1)));
        assert_eq!(parse_expr("(I1 +1 I3)"), Err(HannerError::MissingIndex(2)));
        assert!(matches!(parse_expr("(I1 +2 I2)"), Err(HannerError::Syntax { pos: 4, .. })));
        assert!(matches!(parse_expr("(I1 +1 I2"), Err(HannerError::Syntax { .. })));
        assert!(matches!(parse_expr("I0"), Err(HannerError::Syntax { .. })));
    }

    #[test]
    fn graph_examples() {
        assert!(graph_of(&p("(I1 +inf I2)")).edges().is_empty());
        assert_eq!(graph_of(&p("(I1 +1 I2)")).edges(), vec![(0, 1)]);
        let h = p("((I1 +1 I2) +inf (I3 +1 I4))");
        let g = graph_of(&h);
        assert_eq!(g.edges(), vec![(0, 1), (2, 3)]);
        for i in 0..4 {
            for j in i + 1..4 {
                assert_eq!(g.has_edge(i, j), !sum_in_h(&h, i, j), "pair {i},{j}");
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(hanner_of_graph(&Graph::empty(3)).unwrap(), HannerExpr::cube(3));
        assert_eq!(hanner_of_graph(&Graph::complete(4)).unwrap(), HannerExpr::cross(4));
        let path = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        match hanner_of_graph(&path) {
            Err(HannerError::NotP4Free(w)) => {
                assert!(w == [0, 1, 2, 3] || w == [3, 2, 1, 0]);
            }
            other => panic!("expected P4 error, got {other:?}"),
        }
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(hanner_of_graph(&g).unwrap(), p("((I1 +1 I2) +inf (I3 +1 I4))"));
    }

    #[test]
    fn vertex_examples() {
        assert_eq!(vertices(&p("(I1 +inf I2)")).len(), 4);
        let h = p("((I1 +1 I2) +inf (I3 +1 I4))");
        let vs: BTreeSet<Vector> = vertices(&h).iter().map(|v| v.to_vector(4)).collect();
        assert_eq!(vs.len(), 16);
        assert_eq!(vs, ext_by_tree(&h, 4));
        assert_eq!(vertices(&HannerExpr::cross(3)).len(), 6);
        assert_eq!(polar_vertices(&HannerExpr::cube(3)).len(), 6);
    }

    #[test]
    fn cl_examples() {
        let cube = HannerExpr::cube(3);
        let v = Vector::from_ints(&[1, 1, 1]);
        assert_eq!(v.dot(&Vector::unit(3, 1)), int(1));
        assert!(check_cl_property(&cube).passed());
        assert_eq!(check_cl_property(&cube).pairs_checked, 8 * 6);
        for n in 1..=5 {
            for h in canonical_trees(n) {
                assert!(check_cl_property(&h).passed(), "{h}");
            }
        }
    }

    #[test]
    fn tree_counts() {
        let counts: Vec<usize> = (1..=6).map(|n| canonical_trees(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 4, 14, 44, 164]);
        for h in canonical_trees(5) {
            assert_eq!(h.leaves(), (0..5).collect::<Vec<_>>());
            assert_eq!(h.canonical(), h);
        }
    }

    #[test]
    fn vertices_match_sum_rules() {
        for n in 1..=5 {
            for h in canonical_trees(n) {
                let vs: BTreeSet<Vector> = vertices(&h).iter().map(|v| v.to_vector(n)).collect();
                assert_eq!(vs, ext_by_tree(&h, n), "{h}");
                let ws: BTreeSet<Vector> =
                    polar_vertices(&h).iter().map(|v| v.to_vector(n)).collect();
                assert_eq!(ws, ext_by_tree(&h.dual(), n), "{h}");
            }
        }
    }

    #[test]
    fn graph_json_round_trip() {
        let g = Graph::from_json(r#"{"n": 4, "edges": [[1,2],[3,4]]}"#).unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (2, 3)]);
        assert_eq!(Graph::from_json(&g.to_json().to_string()).unwrap(), g);
        assert!(Graph::from_json(r#"{"n": 2, "edges": [[1,3]]}"#).is_err());
        assert!(Graph::from_json(r#"{"n": 2, "edges": [[0,1]]}"#).is_err());
    }

    fn arb_tree(n: usize) -> impl Strategy<Value = HannerExpr> {
        let trees = canonical_trees(n);
        (0..trees.len(), Just(trees)).prop_map(|(i, t)| t[i].clone())
    }

    proptest! {
        #[test]
        fn round_trips(h in (1usize..=6).prop_flat_map(arb_tree),
                       perm_seed in any::<u64>()) {
            prop_assert_eq!(parse_expr(&h.to_string()).unwrap(), h.clone());
            let g = graph_of(&h);
            prop_assert!(g.is_p4_free());
            let back = hanner_of_graph(&g).unwrap();
            prop_assert_eq!(graph_of(&back), g.clone());
            let vs: BTreeSet<_> = vertices(&back).into_iter().collect();
            let ws: BTreeSet<_> = vertices(&h).into_iter().collect();
            prop_assert_eq!(vs, ws);
            // relabeling commutes with the decomposition
            let n = h.n();
            let mut perm: Vec<usize> = (0..n).collect();
            let mut s = perm_seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let gp = g.permuted(&perm);
            prop_assert_eq!(graph_of(&hanner_of_graph(&gp).unwrap()), gp);
        }
    }
}
