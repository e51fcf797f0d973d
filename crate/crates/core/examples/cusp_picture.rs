//! Develop the cusp of a bundle, check the fan chains, and write an SVG.
//!
//!     cargo run --example cusp_picture -- R^2L^4 cusp.svg

use flipgraph::cusp::{convexity_report, cusp_triangulation, develop_cusp, fan_chains, inflection_count};
use flipgraph::geometry::{solve_complete_structure, Tolerances};
use flipgraph::monodromy::{build, fan_decomposition, parse_word};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let word = parse_word(&args.next().unwrap_or_else(|| "R^2L^4".into()))?;
    let out = args.next().unwrap_or_else(|| "cusp.svg".into());

    let tri = build(&word)?;
    let tol = Tolerances::default();
    let sol = solve_complete_structure(&tri, None, &tol)?;
    let ct = cusp_triangulation(&tri)?;
    let cusp = &ct.cusps[0];
    println!(
        "{} triangles, {} vertices, Euler characteristic {}",
        cusp.triangles.len(),
        cusp.vertex_count,
        cusp.euler_characteristic
    );

    let dev = develop_cusp(&ct, 0, &sol, &tol)?;
    for (k, (a, b)) in dev.holonomy.iter().enumerate() {
        println!("curve {k}: w -> ({:.3} {:+.3}i) w + ({:.6} {:+.6}i)", a.re, a.im, b.re, b.im);
    }
    let edges = convexity_report(&dev, &tol)?;
    let convex = edges.iter().filter(|e| e.convex).count();
    println!("{convex} of {} cusp edges sit in a convex quadrilateral", edges.len());

    for fan in fan_decomposition(&word).fans {
        let mut tets = fan.tets.clone();
        tets.extend([fan.lower_toggle, fan.upper_toggle]);
        for chain in fan_chains(&ct, &dev, &tets)? {
            println!("fan {:?}: {} chain vertices, {} inflection(s)", fan.letter, chain.len(), inflection_count(&chain, 1e-9));
        }
    }

    std::fs::write(&out, dev.to_svg(tri.size()))?;
    println!("wrote {out}");
    Ok(())
}
