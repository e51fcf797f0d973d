use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::GeometryError;
use crate::cusp::cusp_triangulation;
use crate::triangulation::Triangulation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RowKind {
    Edge(usize),
    Completeness { cusp: usize, curve: usize },
}

/// One log-form equation: Σ exponents · logs = target.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquationRow {
    pub kind: RowKind,
    /// Exponents on (z, z', z'') per tetrahedron.
    pub exponents: Vec<[i64; 3]>,
    pub target: Complex64,
}

impl EquationRow {
    pub fn evaluate(&self, logs: &[[Complex64; 3]]) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for (e, l) in self.exponents.iter().zip(logs) {
            for k in 0..3 {
                if e[k] != 0 {
                    sum += e[k] as f64 * l[k];
                }
            }
        }
        sum
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquationSystem {
    pub tet_count: usize,
    pub rows: Vec<EquationRow>,
}

/// Edge equations (log-sum 2πi per edge class) followed by two
/// completeness equations per cusp (log-holonomy 0).
pub fn gluing_equations(tri: &Triangulation) -> Result<EquationSystem, GeometryError> {
    let n = tri.size();
    let ct = cusp_triangulation(tri)?;
    let mut rows: Vec<EquationRow> = tri
        .edges()
        .iter()
        .map(|e| EquationRow {
            kind: RowKind::Edge(e.id),
            exponents: e.param_counts(n),
            target: Complex64::new(0.0, 2.0 * PI),
        })
        .collect();
    for (c, cusp) in ct.cusps.iter().enumerate() {
        for (k, curve) in cusp.peripheral.iter().enumerate() {
            rows.push(EquationRow {
                kind: RowKind::Completeness { cusp: c, curve: k },
                exponents: curve.holonomy_exponents(n),
                target: Complex64::new(0.0, 0.0),
            });
        }
    }
    Ok(EquationSystem { tet_count: n, rows })
}

impl EquationSystem {
    pub fn edge_rows(&self) -> impl Iterator<Item = &EquationRow> {
        self.rows.iter().filter(|r| matches!(r.kind, RowKind::Edge(_)))
    }

    pub fn completeness_rows(&self) -> impl Iterator<Item = &EquationRow> {
        self.rows
            .iter()
            .filter(|r| matches!(r.kind, RowKind::Completeness { .. }))
    }

    /// Re-targets the completeness rows to the 2πi multiple nearest their
    /// value at `logs`: a log-holonomy is only defined up to 2πi once the
    /// logs are fixed on some branch.
    pub fn with_branch_of(&self, logs: &[[Complex64; 3]]) -> EquationSystem {
        let mut out = self.clone();
        for row in &mut out.rows {
            if matches!(row.kind, RowKind::Completeness { .. }) {
                let k = (row.evaluate(logs).im / (2.0 * PI)).round();
                row.target = Complex64::new(0.0, 2.0 * PI * k);
            }
        }
        out
    }

    /// Row defects `value − target`.
    pub fn defects(&self, logs: &[[Complex64; 3]]) -> Vec<Complex64> {
        self.rows.iter().map(|r| r.evaluate(logs) - r.target).collect()
    }

    /// Largest row defect.
    pub fn residual(&self, logs: &[[Complex64; 3]]) -> f64 {
        self.defects(logs).iter().map(|d| d.norm()).fold(0.0, f64::max)
    }

    /// Residual after snapping completeness targets to the branch of `logs`.
    pub fn branch_residual(&self, logs: &[[Complex64; 3]]) -> f64 {
        self.with_branch_of(logs).residual(logs)
    }

    /// Derivative of every row with respect to log z of every tetrahedron.
    pub fn jacobian(&self, z: &[Complex64]) -> DMatrix<Complex64> {
        let mut j = DMatrix::zeros(self.rows.len(), self.tet_count);
        for (i, row) in self.rows.iter().enumerate() {
            for (t, e) in row.exponents.iter().enumerate() {
                if *e == [0, 0, 0] {
                    continue;
                }
                let zt = z[t];
                let d1 = zt / (1.0 - zt);
                let d2 = -1.0 / (1.0 - zt);
                j[(i, t)] = e[0] as f64 + e[1] as f64 * d1 + e[2] as f64 * d2;
            }
        }
        j
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monodromy::{build, parse_word};

    #[test]
    fn figure_eight_rows() {
        let tri = build(&parse_word("RL").unwrap()).unwrap();
        let sys = gluing_equations(&tri).unwrap();
        assert_eq!(sys.edge_rows().count(), 2);
        assert_eq!(sys.completeness_rows().count(), 2);
    }

    #[test]
    fn edge_budget_is_two_per_parameter() {
        for w in ["RL", "L^4R^6", "RRLRL"] {
            let tri = build(&parse_word(w).unwrap()).unwrap();
            let sys = gluing_equations(&tri).unwrap();
            for t in 0..tri.size() {
                let mut total = [0; 3];
                for row in sys.edge_rows() {
                    for k in 0..3 {
                        total[k] += row.exponents[t][k];
                    }
                }
                assert_eq!(total, [2, 2, 2], "{w} tet {t}");
            }
        }
    }

    #[test]
    fn table_one_has_ten_edge_rows() {
        let tri = build(&parse_word("L^4R^6").unwrap()).unwrap();
        let sys = gluing_equations(&tri).unwrap();
        assert_eq!(sys.edge_rows().count(), 10);
        assert_eq!(sys.completeness_rows().count(), 2);
    }
}
