//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//!
//! Oracles here are independent of the library paths they check: flag counts
//! by brute-force chains in the face poset, |H| through hull and
//! triangulation or the sum rules, P4 detection by brute force.

use std::process::ExitCode;
use std::time::Instant;

use hannerlab::faces::{verify_abc, FaceLattice, Fault};
use hannerlab::flags::{equal_volumes_check, gauss_lemma_check, phi, sigma_count, types, volume_function, FlagSet};
use hannerlab::geometry::hanner_polytope;
use hannerlab::hanner::{canonical_trees, check_cl_property, graph_of, hanner_of_graph, Graph, HannerExpr, SumKind};
use hannerlab::linalg::{fmt_rat, int, rat, Rat, Vector};
use hannerlab::verify::{Fixture, Samples, Suite};
use hannerlab::witness::{run_ladder, HannerContext, LadderReport};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20;

struct Line {
    id: &'static str,
    passed: bool,
    text: String,
}

fn factorial(n: usize) -> Rat {
    (1..=n as i64).fold(Rat::one(), |acc, k| acc * int(k))
}

fn sum_rule(h: &HannerExpr) -> Rat {
    match h {
        HannerExpr::Leaf(_) => int(2),
        HannerExpr::Sum(k, a, b) => {
            let p = sum_rule(a) * sum_rule(b);
            match k {
                SumKind::Linf => p,
                SumKind::L1 => p * factorial(a.n()) * factorial(b.n()) / factorial(h.n()),
            }
        }
    }
}

/// Maximal chains in the face poset, one face per dimension.
fn poset_chain_count(lat: &FaceLattice) -> usize {
    let mut counts: Vec<usize> = (0..lat.len()).map(|i| usize::from(lat.dim(i) == 0)).collect();
    for d in 1..lat.n() {
        for j in (0..lat.len()).filter(|&j| lat.dim(j) == d) {
            counts[j] = (0..lat.len())
                .filter(|&i| lat.dim(i) == d - 1 && lat.leq(i, j))
                .map(|i| counts[i])
                .sum();
        }
    }
    (0..lat.len()).filter(|&i| lat.dim(i) == lat.n() - 1).map(|i| counts[i]).sum()
}

fn first(bad: &[String]) -> String {
    bad.first().map(|b| format!("; first failure {b}")).unwrap_or_default()
}

fn trees_up_to(n: usize) -> Vec<HannerExpr> {
    (1..=n).flat_map(canonical_trees).collect()
}

fn c1a() -> Line {
    let mut bad = Vec::new();
    let trees = trees_up_to(5);
    for h in &trees {
        let n = h.n();
        let lat = FaceLattice::new(h);
        let fs = FlagSet::new(&lat);
        let expected = (1usize << n) * (1..=n).product::<usize>();
        let r = equal_volumes_check(&lat.centroids(), &fs);
        let vol = if n <= 4 { hanner_polytope(h).volume() } else { sum_rule(h) };
        if fs.len() != expected || poset_chain_count(&lat) != expected {
            bad.push(format!("{h}: {} flags", fs.len()));
        } else if r.offending.is_some() || r.total != vol {
            bad.push(format!("{h}: sum {} vs |H| {}", fmt_rat(&r.total), fmt_rat(&vol)));
        }
    }
    Line {
        id: "1a",
        passed: bad.is_empty(),
        text: format!("2^n n! flags, equal |C_F|, sum = |H| on {} trees n<=5{}", trees.len(), first(&bad)),
    }
}

fn c1b() -> Line {
    let trees = trees_up_to(5);
    let mut faces = 0;
    let mut bad = Vec::new();
    for h in &trees {
        let r = verify_abc(h);
        faces += r.faces_checked;
        if !r.passed() {
            bad.push(h.to_string());
        }
    }
    Line {
        id: "1b",
        passed: bad.is_empty(),
        text: format!("(a)(b)(c) on {faces} faces of {} trees n<=5{}", trees.len(), first(&bad)),
    }
}

fn c1c() -> Line {
    let trees = trees_up_to(5);
    let samples = Samples {
        seed: SEED,
        ..Samples::default()
    };
    let bad: Vec<String> = trees
        .iter()
        .filter_map(|h| {
            let r = Fixture::new(h, None).run(Suite::Derivative, samples);
            (!r.passed).then(|| format!("{h}: {}", r.detail))
        })
        .collect();
    Line {
        id: "1c",
        passed: bad.is_empty(),
        text: format!(
            "<V'(C),Z> = 0 for {} frame directions, {} stability and star-sum samples, {} trees n<=5{}",
            samples.directions,
            samples.xis,
            trees.len(),
            first(&bad)
        ),
    }
}

fn induced_p4(g: &Graph) -> bool {
    let n = g.n();
    let v: Vec<usize> = (0..n).collect();
    for a in &v {
        for b in &v {
            for c in &v {
                for d in &v {
                    let q = [*a, *b, *c, *d];
                    if q.iter().enumerate().any(|(i, x)| q[..i].contains(x)) {
                        continue;
                    }
                    let e = |i: usize, j: usize| g.has_edge(q[i], q[j]);
                    if e(0, 1) && e(1, 2) && e(2, 3) && !e(0, 2) && !e(1, 3) && !e(0, 3) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

fn c1d() -> Line {
    let trees = trees_up_to(6);
    let cl_bad = trees.iter().filter(|h| !check_cl_property(h).passed()).count();
    let mut free = 0;
    let mut bad = Vec::new();
    for n in 1..=6usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        for mask in 0u32..1 << pairs.len() {
            let edges: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &e)| e).collect();
            let g = Graph::from_edges(n, &edges).expect("valid edges");
            let has_p4 = induced_p4(&g);
            match hanner_of_graph(&g) {
                Ok(h) if !has_p4 => {
                    free += 1;
                    if graph_of(&h) != g {
                        bad.push(format!("round trip n={n} mask={mask}"));
                    }
                }
                Err(_) if has_p4 => {}
                _ => bad.push(format!("P4 verdict n={n} mask={mask}")),
            }
        }
    }
    Line {
        id: "1d",
        passed: cl_bad == 0 && bad.is_empty(),
        text: format!(
            "CL on {} trees n<=6 ({cl_bad} failures); round trip on {free} P4-free labeled graphs n<=6{}",
            trees.len(),
            first(&bad)
        ),
    }
}

fn small(rng: &mut ChaCha8Rng, num: i64, den: i64) -> Rat {
    rat(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

fn c1e() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut det_bad = 0;
    for _ in 0..200 {
        let n1 = rng.gen_range(1..=5);
        let n2 = rng.gen_range(1..=6 - n1);
        let n = n1 + n2;
        let ts = types(n1, n2);
        let sigma = &ts[rng.gen_range(0..ts.len())];
        let rv = |rng: &mut ChaCha8Rng| -> Vector { (0..n).map(|_| small(rng, 6, 3)).collect() };
        let p: Vec<Vector> = (0..n1).map(|_| rv(&mut rng)).collect();
        let q: Vec<Vector> = (0..n2).map(|_| rv(&mut rng)).collect();
        let z = rv(&mut rng);
        let xi: Vec<Rat> = (0..n).map(|_| small(&mut rng, 6, 5)).collect();
        if !gauss_lemma_check(sigma, &xi, &p, &q, &z).unwrap_or(false) {
            det_bad += 1;
        }
    }
    let mut phi_bad = 0;
    for _ in 0..200 {
        let n1 = rng.gen_range(0..=5);
        let n2 = rng.gen_range(1..=6 - n1);
        let n = n1 + n2;
        let ts = types(n1, n2);
        let sigma = &ts[rng.gen_range(0..ts.len())];
        let xi: Vec<Rat> = (0..n).map(|_| small(&mut rng, 20, 9)).collect();
        for k in 1..=n {
            let s = phi(sigma, &xi, 1, sigma_count(sigma, 1, k)).expect("in range")
                + phi(sigma, &xi, 2, sigma_count(sigma, 2, k)).expect("in range");
            if s != xi[k - 1] {
                phi_bad += 1;
            }
        }
    }
    Line {
        id: "1e",
        passed: det_bad == 0 && phi_bad == 0,
        text: format!("|det M| = |det M'| on 200 instances n<=6 ({det_bad} failures); phi identity on 200 (sigma, xi) ({phi_bad} failures)"),
    }
}

fn c2() -> Line {
    let trees = trees_up_to(4);
    let mut bad = Vec::new();
    for h in &trees {
        let n = h.n();
        let expected = (1..=n as i64).fold(int(1), |acc, k| acc * int(4) / int(k));
        let geometric = hanner_polytope(h).volume_product();
        let lat = FaceLattice::new(h);
        let dual = FaceLattice::new(&h.dual());
        let flag_path = volume_function(&lat.centroids(), &FlagSet::new(&lat))
            * volume_function(&dual.centroids(), &FlagSet::new(&dual));
        if geometric != expected || flag_path != geometric {
            bad.push(format!("{h}: {} / {}", fmt_rat(&geometric), fmt_rat(&flag_path)));
        }
    }
    Line {
        id: "2",
        passed: bad.is_empty(),
        text: format!("P(H) = 4^n/n! by hull/polar/volume and by flags on {} trees n<=4{}", trees.len(), first(&bad)),
    }
}

fn experiment_trees() -> Vec<HannerExpr> {
    vec![
        HannerExpr::cube(3),
        HannerExpr::cross(3),
        hannerlab::hanner::parse_expr("((I1 +1 I2) +inf (I3 +1 I4))").expect("valid tree"),
    ]
}

fn c3(ladders: &[LadderReport]) -> Line {
    let mut parts = Vec::new();
    let mut ok = true;
    for lad in ladders {
        for r in &lad.reports {
            let min = r.min_gap();
            let good = r.failures.is_empty()
                && r.rows.len() == r.trials
                && min.as_ref().is_some_and(|g| *g >= int(0))
                && r.all_santalo()
                && r.all_pairings();
            ok &= good;
            parts.push(format!(
                "{} d={} min_gap~{:.2e}{}",
                r.tree,
                fmt_rat(&r.delta),
                min.map(|g| hannerlab::linalg::to_f64(&g)).unwrap_or(f64::NAN),
                if good { "" } else { " FAILED" }
            ));
        }
    }
    Line {
        id: "3",
        passed: ok,
        text: format!("min gap >= 0, V(Y)V(Y*) >= |H||H°|, pairings = 1, 50 trials each: {}", parts.join("; ")),
    }
}

fn c4(ladders: &[LadderReport]) -> Line {
    let dx: Vec<Vec<f64>> = ladders.iter().flat_map(|l| l.dx_exponents.clone()).collect();
    let gap: Vec<Vec<f64>> = ladders.iter().flat_map(|l| l.gap_exponents.clone()).collect();
    let pooled = LadderReport {
        reports: vec![],
        dx_exponents: dx,
        gap_exponents: gap,
    };
    let per_tree: Vec<String> = ladders
        .iter()
        .map(|l| {
            let f = |x: Option<f64>| x.map(|v| format!("{:.0}%", 100.0 * v)).unwrap_or_else(|| "n/a".into());
            format!("{}: dx {}, gap {}", l.reports[0].tree, f(l.dx_fraction()), f(l.gap_fraction()))
        })
        .collect();
    let dxf = pooled.dx_fraction();
    let gf = pooled.gap_fraction();
    Line {
        id: "4",
        passed: dxf.is_some_and(|x| x >= 0.8) && gf.is_some_and(|x| x >= 0.8),
        text: format!(
            "log2 ratios: |V(X)-V(Y)| in [1.5,2.5] {:.1}%, positive gaps in [0.5,1.5] {:.1}% (over defined exponents; {})",
            100.0 * dxf.unwrap_or(0.0),
            100.0 * gf.unwrap_or(0.0),
            per_tree.join("; ")
        ),
    }
}

fn c5(ladders: &[LadderReport]) -> Line {
    let rows: Vec<_> = ladders.iter().flat_map(|l| &l.reports).flat_map(|r| &r.rows).collect();
    let sandwiched = rows.iter().filter(|r| r.sandwich_ok).count();
    let bound = rows.iter().filter(|r| r.normalization_bound_ok()).count();
    Line {
        id: "5",
        passed: sandwiched == rows.len() && !rows.is_empty() && bound * 100 >= 95 * rows.len(),
        text: format!(
            "B_1 ⊆ K' ⊆ B_∞ in {sandwiched}/{n} trials; d_H(K',H)^2 <= 9 d_H(K,H)^2 in {bound}/{n}",
            n = rows.len()
        ),
    }
}

fn c6() -> Line {
    // the weight fault only shows on an unbalanced ℓ1 face below the top
    let h = hannerlab::hanner::parse_expr("(((I1 +1 I2) +1 I3) +inf I4)").expect("valid tree");
    let samples = Samples {
        seed: SEED,
        ..Samples::default()
    };
    let mut matrix = Vec::new();
    let mut ok = true;
    for fault in [Fault::PerturbedCentroid, Fault::WrongL1Weight] {
        let fx = Fixture::new(&h, Some(fault));
        let fails: Vec<bool> = [Suite::EqualVolumes, Suite::Abc, Suite::Derivative]
            .into_iter()
            .map(|s| !fx.run(s, samples).passed)
            .collect();
        let caught = fails.iter().any(|&f| f);
        ok &= caught;
        if fault == Fault::PerturbedCentroid {
            ok &= fails.iter().all(|&f| f);
        }
        let mark = |f: bool| if f { "fails" } else { "passes" };
        matrix.push(format!(
            "{fault:?}: 1a {}, 1b {}, 1c {}",
            mark(fails[0]),
            mark(fails[1]),
            mark(fails[2])
        ));
    }
    Line {
        id: "6",
        passed: ok,
        text: format!("negative controls on {h}: {}", matrix.join("; ")),
    }
}

fn main() -> ExitCode {
    let started = Instant::now();
    let mut lines = Vec::new();
    let mut report = |l: Line| {
        println!(
            "{} {}: {} [{:.0}s]",
            if l.passed { "PASS" } else { "FAIL" },
            l.id,
            l.text,
            started.elapsed().as_secs_f64()
        );
        lines.push(l.passed);
    };
    report(c1a());
    report(c1b());
    report(c1c());
    report(c1d());
    report(c1e());
    report(c2());
    report(c6());
    let deltas = [rat(1, 100), rat(1, 200), rat(1, 400)];
    let ladders: Vec<LadderReport> = experiment_trees()
        .iter()
        .map(|h| run_ladder(&HannerContext::new(h), &deltas, 50, SEED))
        .collect();
    report(c3(&ladders));
    report(c4(&ladders));
    report(c5(&ladders));
    if lines.iter().all(|&p| p) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
