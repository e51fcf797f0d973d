//! Build the layered triangulation of a word and print its gluing table.
//!
//!     cargo run --example build_word -- L^4R^6

use flipgraph::isosig::encode;
use flipgraph::monodromy::{build, fan_decomposition, gluing_table, parse_word};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "L^4R^6".into());
    let word = parse_word(&arg)?;
    let tri = build(&word)?;
    println!("{word} ({}), {} tetrahedra, isosig {}", word.to_exponent_string(), tri.size(), encode(&tri)?);

    println!("{:>4} {:>8} {:>8} {:>8} {:>8}", "tet", "012", "013", "023", "123");
    for (t, row) in gluing_table(&tri).iter().enumerate() {
        println!("{:>4} {:>8} {:>8} {:>8} {:>8}", tri.label(t), row[0], row[1], row[2], row[3]);
    }

    let degrees: Vec<usize> = tri.edges().iter().map(|e| e.degree()).collect();
    println!("edge degrees {degrees:?}");
    for fan in fan_decomposition(&word).fans {
        println!(
            "fan {:?}: tets {:?}, toggles {} / {}",
            fan.letter, fan.tets, fan.lower_toggle, fan.upper_toggle
        );
    }
    Ok(())
}
