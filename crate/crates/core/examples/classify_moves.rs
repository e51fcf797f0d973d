//! Classify every 2-3 and 3-2 move using exactly transferred shapes.
//!
//!     cargo run --example classify_moves -- R^2L^3

use flipgraph::geometry::{solve_complete_structure, Tolerances};
use flipgraph::monodromy::{build, parse_word};
use flipgraph::moves::{classify_move, move_sites};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "R^2L^3".into());
    let tri = build(&parse_word(&arg)?)?;
    let tol = Tolerances::default();
    let sol = solve_complete_structure(&tri, None, &tol)?;

    for site in move_sites(&tri) {
        match classify_move(&tri, &sol, site, &tol) {
            Ok(r) => {
                let shapes: Vec<String> = r
                    .new_shapes()
                    .iter()
                    .map(|s| format!("{:.4}{:+.4}i", s.z.re, s.z.im))
                    .collect();
                println!("{site:<24} {:<20?} -> {:<22?} [{}]", r.move_class, r.tri_class, shapes.join(", "));
            }
            Err(e) => println!("{site:<24} error: {e}"),
        }
    }
    Ok(())
}
