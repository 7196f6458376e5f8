//! Cross-module invariants as property tests.

use hannerlab::faces::{dual_face, enumerate_faces, face_leq};
use hannerlab::geometry::{hanner_polytope, perturb};
use hannerlab::hanner::{canonical_trees, graph_of, hanner_of_graph, vertex_vectors, HannerExpr};
use hannerlab::linalg::{rat, Vector};
use hannerlab::lp::{maximize, LinProg, LpStatus};
use proptest::prelude::*;
use std::collections::BTreeSet;

fn tree(n: usize, pick: usize) -> HannerExpr {
    let ts = canonical_trees(n);
    ts[pick % ts.len()].clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dual_face_reverses_order(n in 1usize..=4, pick in 0usize..64, i in 0usize..400, j in 0usize..400) {
        let h = tree(n, pick);
        let d = h.dual();
        let fs = enumerate_faces(&h);
        let (f, g) = (&fs[i % fs.len()], &fs[j % fs.len()]);
        let (fd, gd) = (dual_face(f), dual_face(g));
        prop_assert_eq!(&dual_face(&fd), f);
        prop_assert_eq!(face_leq(&h, f, g).unwrap(), face_leq(&d, &gd, &fd).unwrap());
    }

    #[test]
    fn independent_sets_meet_cliques_once(n in 1usize..=6, pick in 0usize..200) {
        let g = graph_of(&tree(n, pick));
        for s in g.maximal_independent_sets() {
            for c in g.maximal_cliques() {
                prop_assert_eq!(s.iter().filter(|v| c.contains(v)).count(), 1);
            }
        }
    }

    #[test]
    fn tree_of_graph_generates_the_same_polytope(n in 1usize..=5, pick in 0usize..64) {
        let h = tree(n, pick);
        let back = hanner_of_graph(&graph_of(&h)).unwrap();
        let a: BTreeSet<Vector> = vertex_vectors(&h).into_iter().collect();
        let b: BTreeSet<Vector> = vertex_vectors(&back).into_iter().collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn lp_is_deterministic_and_exact(n in 2usize..=3, pick in 0usize..8, seed in 0u64..1000,
                                     obj in proptest::collection::vec(-4i64..5, 3)) {
        let k = perturb(&tree(n, pick), &rat(1, 20), seed).unwrap();
        let c: Vector = obj[..n].iter().map(|&x| rat(x, 1)).collect();
        let p = LinProg::new(c.clone(), k.constraints());
        let a = maximize(&p).unwrap();
        let b = maximize(&p).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.status, LpStatus::Optimal);
        let x = a.witness.unwrap();
        prop_assert_eq!(c.dot(&x), a.value.unwrap());
        prop_assert!(k.contains(&x));
    }
}

#[test]
fn hanner_polytopes_are_certified_hulls() {
    for n in 1..=4 {
        for h in canonical_trees(n) {
            let p = hanner_polytope(&h);
            assert!(p.certify(), "{h}");
            assert_eq!(p.vertices().len(), vertex_vectors(&h).len(), "{h}");
        }
    }
}
