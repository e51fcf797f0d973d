//! The whole batch of checks, rendered as a table.
//!
//!     cargo run --release --example reproduce -- 3 3

use flipgraph::cli::{reproduce_paper, ReportRow};
use flipgraph::geometry::Tolerances;

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse().expect("a positive integer"));
    let n_max = args.next().unwrap_or(3);
    let m_max = args.next().unwrap_or(3);
    let rows = reproduce_paper(n_max, m_max, &Tolerances::default());
    for row in &rows {
        let verdict = if row.passed() { "ok  " } else { "FAIL" };
        let detail = match row {
            ReportRow::Isolation { word, volume, two_three_sites, .. } => {
                format!("isolated {word:<10} {two_three_sites:>3} sites, volume {:.9}", volume.unwrap_or(f64::NAN))
            }
            ReportRow::OddExponent { word, geometric_sites, .. } => {
                format!("odd      {word:<10} {geometric_sites} geometric site(s)")
            }
            ReportRow::Regeometrize { word, fan, tetrahedra, volume_gap, error, .. } => match error {
                Some(e) => format!("regeom   {word:<10} {fan:?}: {e}"),
                None => format!(
                    "regeom   {word:<10} {fan:?} -> {} tets, volume gap {:.1e}",
                    tetrahedra.unwrap_or(0),
                    volume_gap.unwrap_or(f64::NAN)
                ),
            },
            ReportRow::Signature { signature, volume, error, .. } => match error {
                Some(e) => format!("isosig   {signature}: {e}"),
                None => format!("isosig   {signature} volume {:.10}", volume.unwrap_or(f64::NAN)),
            },
            ReportRow::Table { mismatches, .. } => format!("table    {} mismatches", mismatches.len()),
        };
        println!("{verdict} {detail}");
    }
    let failed = rows.iter().filter(|r| !r.passed()).count();
    println!("{} rows, {failed} failed", rows.len());
}
