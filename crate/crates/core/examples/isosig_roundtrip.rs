//! Decode the two five-tetrahedron figure-eight triangulations and compare
//! them with the layered one.

use flipgraph::explorer::is_isolated;
use flipgraph::geometry::Tolerances;
use flipgraph::isosig::{decode, encode};
use flipgraph::monodromy::{build, parse_word};
use flipgraph::{canonical_signature, is_isomorphic};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerances::default();
    let layered = build(&parse_word("RL")?)?;
    println!("RL           -> {}", encode(&layered)?);

    for sig in flipgraph::cli::FIGURE_EIGHT_SIGNATURES {
        let tri = decode(sig)?;
        let report = is_isolated(&tri, &tol);
        println!(
            "{sig} -> {} tets, re-encoded {}, canonical {}, geometric {}, isolated {}, volume {:.10}, same as RL: {}",
            tri.size(),
            encode(&tri)?,
            canonical_signature(&tri),
            report.is_geometric,
            report.is_isolated,
            report.volume.unwrap_or(f64::NAN),
            is_isomorphic(&tri, &layered)
        );
    }

    // the widely quoted 16-character form is missing a character
    if let Err(e) = decode("fLQcacdedejbqqww") {
        println!("fLQcacdedejbqqww: {e}");
    }
    Ok(())
}
