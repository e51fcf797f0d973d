//! Two 2-3 moves and a 3-2 move that turn an isolated triangulation into a
//! different geometric one with one more tetrahedron.
//!
//!     cargo run --release --example regeometrize -- L^4R^6

use flipgraph::explorer::{regeometrize_fan, is_isolated};
use flipgraph::geometry::Tolerances;
use flipgraph::monodromy::{parse_word, Letter};
use flipgraph::{canonical_signature, is_isomorphic};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "L^4R^6".into());
    let word = parse_word(&arg)?;
    let tol = Tolerances::default();

    for fan in [Letter::L, Letter::R] {
        let r = regeometrize_fan(&word, fan, &tol)?;
        println!("{fan:?} fan, starting from tetrahedra {:?}", r.window);
        for m in &r.moves {
            println!(
                "  {:<24} {:?}, {} flat, now {} tetrahedra, {:?}",
                m.site.to_string(),
                m.move_class,
                m.new_flat,
                m.tetrahedra,
                m.tri_class
            );
        }
        println!(
            "  volume {:.12} -> {:.12}, isomorphic to start: {}",
            r.start_volume,
            r.volume,
            is_isomorphic(&r.start, &r.result)
        );
        let report = is_isolated(&r.result, &tol);
        println!("  result {} is isolated: {}", canonical_signature(&r.result), report.is_isolated);
    }
    Ok(())
}
