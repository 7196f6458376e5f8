//! Trees and P4-free graphs determine each other.

use hannerlab::hanner::{graph_of, hanner_of_graph, parse_expr, Graph};

fn main() {
    let h = parse_expr("((I1 +1 I2) +inf (I3 +1 I4))").expect("valid tree");
    let g = graph_of(&h);
    println!("graph of {h}: {}", g.to_json());
    println!("independent sets (vertex supports): {:?}", g.maximal_independent_sets());
    println!("cliques (polar vertex supports): {:?}", g.maximal_cliques());

    let back = hanner_of_graph(&g).expect("graphs of trees are P4-free");
    println!("tree of that graph: {back}");

    let path = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).expect("valid edges");
    match hanner_of_graph(&path) {
        Ok(t) => println!("unexpected tree {t}"),
        Err(e) => println!("path graph: {e}"),
    }
}
