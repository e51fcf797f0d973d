use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{gluing_equations, EquationSystem, GeometryError, Shape, ShapeAssignment, ShapeClass, Tolerances};
use crate::triangulation::Triangulation;

/// Logs of (z, z', z'') at `zeta = log z`, continuing the z' branch from
/// `previous`.
fn logs_at(zeta: Complex64, previous: [Complex64; 3]) -> [Complex64; 3] {
    let z = zeta.exp();
    let mut l1 = -(1.0 - z).ln();
    let k = ((previous[1].im - l1.im) / (2.0 * PI)).round();
    l1 += Complex64::new(0.0, 2.0 * PI * k);
    [zeta, l1, Complex64::new(0.0, PI) - zeta - l1]
}

const MAX_STEP: f64 = 0.5;
const POLISH: f64 = 1e-4;

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|d| d.norm_sqr()).sum::<f64>().sqrt()
}

struct Attempt {
    logs: Vec<[Complex64; 3]>,
    residual: f64,
    iterations: usize,
    converged: bool,
}

/// Damped least-squares Newton on the log variables.
fn newton(sys: &EquationSystem, mut logs: Vec<[Complex64; 3]>, tol: &Tolerances) -> Attempt {
    let n = sys.tet_count;
    let mut defects = sys.defects(&logs);
    let mut residual = defects.iter().map(|d| d.norm()).fold(0.0, f64::max);
    for iter in 0..=tol.max_iter {
        // polish well below the acceptance threshold while it is cheap
        if residual <= tol.eps_res * POLISH {
            return Attempt {
                logs,
                residual,
                iterations: iter,
                converged: true,
            };
        }
        if iter == tol.max_iter || !residual.is_finite() {
            break;
        }
        let z: Vec<Complex64> = logs.iter().map(|l| l[0].exp()).collect();
        let j = sys.jacobian(&z);
        let rhs = DVector::from_iterator(defects.len(), defects.iter().map(|d| -d));
        let svd = j.svd(true, true);
        let cutoff = svd.singular_values.max() * 1e-12;
        let Ok(step) = svd.solve(&rhs, cutoff) else {
            break;
        };
        if step.iter().any(|s| !s.is_finite()) {
            break;
        }

        let current = norm2(&defects);
        // trust region: no log-shape moves by more than MAX_STEP at once
        let longest = step.iter().map(|s| s.norm()).fold(0.0, f64::max);
        let mut lambda = if longest > MAX_STEP { MAX_STEP / longest } else { 1.0 };
        let mut accepted = false;
        while lambda >= 1e-6 {
            let trial: Vec<[Complex64; 3]> = (0..n)
                .map(|t| logs_at(logs[t][0] + step[t] * lambda, logs[t]))
                .collect();
            let trial_defects = sys.defects(&trial);
            let trial_norm = norm2(&trial_defects);
            if trial_norm.is_finite() && trial_norm < current {
                logs = trial;
                defects = trial_defects;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        residual = defects.iter().map(|d| d.norm()).fold(0.0, f64::max);
        if !accepted {
            return Attempt {
                logs,
                residual,
                iterations: iter + 1,
                converged: residual <= tol.eps_res,
            };
        }
    }
    Attempt {
        converged: residual <= tol.eps_res,
        logs,
        residual,
        iterations: tol.max_iter,
    }
}

fn assignment(a: Attempt, total_iterations: usize) -> ShapeAssignment {
    ShapeAssignment {
        shapes: a.logs.iter().map(|l| Shape::new(l[0].exp())).collect(),
        logs: a.logs,
        residual: a.residual,
        converged: a.converged,
        iterations: total_iterations,
    }
}

/// Solves `sys` from `seed`, retrying from seeded random perturbations of
/// the seed when Newton stalls.
pub fn solve_from(
    sys: &EquationSystem,
    seed: &ShapeAssignment,
    tol: &Tolerances,
) -> Result<ShapeAssignment, GeometryError> {
    if seed.len() != sys.tet_count {
        return Err(GeometryError::SizeMismatch {
            expected: sys.tet_count,
            got: seed.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(tol.seed);
    let mut best: Option<Attempt> = None;
    let mut degenerate: Option<ShapeAssignment> = None;
    let mut total = 0;
    for attempt in 0..=tol.retries {
        let start: Vec<[Complex64; 3]> = if attempt == 0 {
            seed.logs.clone()
        } else {
            seed.logs
                .iter()
                .map(|l| {
                    let dz = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    logs_at(l[0] + dz * tol.perturbation, *l)
                })
                .collect()
        };
        let result = newton(sys, start, tol);
        total += result.iterations;
        if result.converged {
            let sol = assignment(result, total);
            // a solution at 0, 1 or ∞ is a symptom of running off; keep looking
            if !sol.shapes.iter().any(|s| s.classify(tol) == ShapeClass::Degenerate) {
                return Ok(sol);
            }
            degenerate.get_or_insert(sol);
            continue;
        }
        if best.as_ref().is_none_or(|b| result.residual < b.residual) {
            best = Some(result);
        }
    }
    if let Some(mut sol) = degenerate {
        sol.iterations = total;
        return Ok(sol);
    }
    let best = best.expect("at least one attempt");
    Err(GeometryError::SolverFailed {
        best: Box::new(assignment(best, total)),
    })
}

/// Finds the complete hyperbolic structure. Without a seed every
/// tetrahedron starts regular and the completeness rows target 0; with a
/// seed, the completeness rows target the 2πi multiple the seed sits on.
pub fn solve_complete_structure(
    tri: &Triangulation,
    seed: Option<&ShapeAssignment>,
    tol: &Tolerances,
) -> Result<ShapeAssignment, GeometryError> {
    let sys = gluing_equations(tri)?;
    match seed {
        None => solve_from(&sys, &ShapeAssignment::regular(tri.size()), tol),
        Some(s) => {
            let sys = sys.with_branch_of(&s.logs);
            solve_from(&sys, s, tol)
        }
    }
}

/// Central-difference Jacobian with respect to log z at `zeta`.
pub fn finite_difference_jacobian(sys: &EquationSystem, zeta: &[Complex64], h: f64) -> DMatrix<Complex64> {
    let base: Vec<[Complex64; 3]> = zeta
        .iter()
        .map(|&l| Shape::new(l.exp()).principal_logs())
        .collect();
    let mut j = DMatrix::zeros(sys.rows.len(), zeta.len());
    for t in 0..zeta.len() {
        let mut plus = base.clone();
        let mut minus = base.clone();
        plus[t] = logs_at(zeta[t] + h, base[t]);
        minus[t] = logs_at(zeta[t] - h, base[t]);
        let (dp, dm) = (sys.defects(&plus), sys.defects(&minus));
        for i in 0..sys.rows.len() {
            j[(i, t)] = (dp[i] - dm[i]) / (2.0 * h);
        }
    }
    j
}
