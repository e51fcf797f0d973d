//! Solve the gluing equations and print shapes and volume.
//!
//!     cargo run --example solve_structure -- R^2L^3

use flipgraph::geometry::{classify_triangulation, solve_complete_structure, volume, Tolerances};
use flipgraph::monodromy::{build, parse_word};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "R^2L^3".into());
    let tri = build(&parse_word(&arg)?)?;
    let tol = Tolerances::default();
    let sol = solve_complete_structure(&tri, None, &tol)?;

    for (t, s) in sol.shapes.iter().enumerate() {
        println!("{:>3}  z = {:+.12} {:+.12}i  ({:?})", tri.label(t), s.z.re, s.z.im, s.classify(&tol));
    }
    println!("residual   {:.2e} after {} iterations", sol.residual, sol.iterations);
    println!("class      {:?}", classify_triangulation(&tri, &sol, &tol));
    println!("volume     {:.12}", volume(&sol));
    Ok(())
}
