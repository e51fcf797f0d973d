use flipgraph::explorer::{explore, is_isolated, regeometrize, regeometrize_fan, Budget, Filter};
use flipgraph::geometry::Tolerances;
use flipgraph::monodromy::{build, parse_word, Letter};
use flipgraph::{canonical_signature, is_isomorphic, TriClass};

#[test]
fn essential_search_reaches_a_larger_geometric_triangulation() {
    let tol = Tolerances::default();
    let start = build(&parse_word("L^4R^4").unwrap()).unwrap();
    let graph = explore(&start, Filter::Essential, &Budget { depth: 3, max_nodes: 10_000 }, &tol);
    assert_eq!(graph.nodes[&graph.start].class, TriClass::Geometric);
    let found = graph
        .nodes
        .values()
        .any(|n| n.class == TriClass::Geometric && n.tetrahedra == 9);
    assert!(found);
}

#[test]
fn geometric_component_is_disjoint_from_regeometrized_one() {
    // the start is isolated, so its geometric component is a single node,
    // yet the re-geometrized triangulation is geometric for the same manifold
    let tol = Tolerances::default();
    let word = parse_word("L^4R^4").unwrap();
    let start = build(&word).unwrap();
    let graph = explore(&start, Filter::Geometric, &Budget::default(), &tol);
    assert_eq!(graph.node_count(), 1);

    let r = regeometrize(&word, &tol).unwrap();
    let sig = canonical_signature(&r.result);
    assert!(!graph.nodes.contains_key(&sig));
    let other = explore(&r.result, Filter::Geometric, &Budget { depth: 2, max_nodes: 500 }, &tol);
    assert!(!other.nodes.contains_key(&graph.start));
    assert!((r.volume - r.start_volume).abs() < 1e-8);
}

#[test]
fn both_fans_regeometrize() {
    let tol = Tolerances::default();
    for w in ["L^4R^4", "L^4R^6", "L^6R^4"] {
        let word = parse_word(w).unwrap();
        let a = regeometrize_fan(&word, Letter::L, &tol).unwrap();
        let b = regeometrize_fan(&word, Letter::R, &tol).unwrap();
        assert_eq!(a.result.size(), word.size() + 1);
        assert_eq!(b.result.size(), word.size() + 1);
        assert!(is_isolated(&a.start, &tol).is_isolated);
        assert!(!is_isomorphic(&a.start, &a.result));
    }
}

#[test]
fn exploration_is_deterministic() {
    let tol = Tolerances::default();
    let start = build(&parse_word("R^2L^3").unwrap()).unwrap();
    let budget = Budget { depth: 2, max_nodes: 200 };
    let a = explore(&start, Filter::Geometric, &budget, &tol);
    let b = explore(&start, Filter::Geometric, &budget, &tol);
    assert_eq!(a.nodes.keys().collect::<Vec<_>>(), b.nodes.keys().collect::<Vec<_>>());
    assert_eq!(a.arcs, b.arcs);
    assert!(a.node_count() > 1);
    for (sig, node) in &a.nodes {
        assert_eq!(&canonical_signature(&node.representative), sig);
    }
}
