//! Decide isolation for the even-exponent family and a few contrasts.
//!
//!     cargo run --release --example isolation

use flipgraph::explorer::is_isolated;
use flipgraph::geometry::Tolerances;
use flipgraph::monodromy::{build, parse_word};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerances::default();
    let words = ["R^2L^2", "R^2L^4", "R^4L^4", "R^6L^6", "R^2L^3", "RL^2", "RL"];
    println!("{:<8} {:>5} {:>10} {:>9} {:>12}", "word", "tets", "geometric", "isolated", "volume");
    for w in words {
        let report = is_isolated(&build(&parse_word(w)?)?, &tol);
        println!(
            "{:<8} {:>5} {:>10} {:>9} {:>12.9}",
            w,
            report.tetrahedra,
            report.is_geometric,
            report.is_isolated,
            report.volume.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
