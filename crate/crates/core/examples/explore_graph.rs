//! Breadth-first search of the flip graph, written out as Graphviz.
//!
//!     cargo run --release --example explore_graph -- L^4R^4 essential 3 flips.dot

use std::collections::BTreeMap;

use flipgraph::explorer::{explore, Budget, Filter};
use flipgraph::geometry::Tolerances;
use flipgraph::monodromy::{build, parse_word};
use flipgraph::TriClass;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let word = parse_word(args.first().map_or("L^4R^4", String::as_str))?;
    let filter: Filter = args.get(1).map_or("essential", String::as_str).parse()?;
    let depth = args.get(2).map_or(Ok(3), |d| d.parse())?;
    let out = args.get(3).cloned().unwrap_or_else(|| "flips.dot".into());

    let start = build(&word)?;
    let graph = explore(&start, filter, &Budget { depth, max_nodes: 10_000 }, &Tolerances::default());
    println!("{} nodes, {} arcs, complete: {}", graph.node_count(), graph.arcs.len(), graph.complete);
    for class in [TriClass::Geometric, TriClass::EssentialNotGeometric, TriClass::NotEssential] {
        let sigs = graph.signatures_with(class);
        let mut by_size = BTreeMap::new();
        for s in &sigs {
            *by_size.entry(graph.nodes[s].tetrahedra).or_insert(0) += 1;
        }
        println!("{class:?}: {} nodes, by tetrahedra {by_size:?}", sigs.len());
    }
    std::fs::write(&out, graph.to_dot())?;
    println!("wrote {out}");
    Ok(())
}
