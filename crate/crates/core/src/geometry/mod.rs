//! Shapes, gluing equations, the Newton solver for the complete structure,
//! classification and volume.
//!
//! A tetrahedron with shape `z` carries `z` on edges 01 and 23,
//! `z' = 1/(1-z)` on edges 03 and 12, and `z'' = (z-1)/z` on edges 02 and 13.

mod equations;
mod solver;
mod volume;

pub use equations::{gluing_equations, EquationRow, EquationSystem, RowKind};
pub use solver::{finite_difference_jacobian, solve_complete_structure, solve_from};
pub use volume::{lobachevsky, volume};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cusp::CuspError;
use crate::triangulation::Triangulation;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error(transparent)]
    Cusp(#[from] CuspError),
    #[error("solver failed to converge (best residual {:.3e})", .best.residual)]
    SolverFailed { best: Box<ShapeAssignment> },
    #[error("shape assignment has {got} tetrahedra, triangulation has {expected}")]
    SizeMismatch { expected: usize, got: usize },
}

/// Numerical tolerances and solver limits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub eps_res: f64,
    pub eps_flat: f64,
    pub eps_deg: f64,
    pub max_iter: usize,
    pub retries: usize,
    pub perturbation: f64,
    pub seed: u64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_res: 1e-10,
            eps_flat: 1e-9,
            eps_deg: 1e-9,
            max_iter: 50,
            retries: 10,
            perturbation: 0.1,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShapeClass {
    PositivelyOriented,
    Flat,
    NegativelyOriented,
    Degenerate,
}

impl ShapeClass {
    /// Ordering used to pick the worst shape: positive < flat < negative < degenerate.
    pub fn severity(self) -> u8 {
        match self {
            ShapeClass::PositivelyOriented => 0,
            ShapeClass::Flat => 1,
            ShapeClass::NegativelyOriented => 2,
            ShapeClass::Degenerate => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TriClass {
    Geometric,
    EssentialNotGeometric,
    NotEssential,
    SolverFailed,
}

impl TriClass {
    pub fn is_essential(self) -> bool {
        matches!(self, TriClass::Geometric | TriClass::EssentialNotGeometric)
    }
}

/// A tetrahedron shape.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Shape {
    pub z: Complex64,
}

impl Shape {
    pub fn new(z: Complex64) -> Self {
        Self { z }
    }

    /// The regular ideal tetrahedron, e^{iπ/3}.
    pub fn regular() -> Self {
        Self::new(Complex64::from_polar(1.0, PI / 3.0))
    }

    pub fn prime(&self) -> Complex64 {
        1.0 / (1.0 - self.z)
    }

    pub fn double_prime(&self) -> Complex64 {
        (self.z - 1.0) / self.z
    }

    /// `[z, z', z'']`.
    pub fn params(&self) -> [Complex64; 3] {
        [self.z, self.prime(), self.double_prime()]
    }

    /// Principal-branch logs of `[z, z', z'']`, normalised so they sum to iπ.
    pub fn principal_logs(&self) -> [Complex64; 3] {
        let l0 = self.z.ln();
        let l1 = -(1.0 - self.z).ln();
        [l0, l1, Complex64::new(0.0, PI) - l0 - l1]
    }

    pub fn classify(&self, tol: &Tolerances) -> ShapeClass {
        classify_shape(*self, tol)
    }
}

/// Degenerate if within `eps_deg` of 0, 1 or ∞; otherwise flat, positive or
/// negative by the sign of the imaginary part.
pub fn classify_shape(s: Shape, tol: &Tolerances) -> ShapeClass {
    let z = s.z;
    let near = z.norm().min((z - 1.0).norm()).min(1.0 / z.norm());
    if !near.is_finite() || near <= tol.eps_deg {
        ShapeClass::Degenerate
    } else if z.im.abs() <= tol.eps_flat {
        ShapeClass::Flat
    } else if z.im > 0.0 {
        ShapeClass::PositivelyOriented
    } else {
        ShapeClass::NegativelyOriented
    }
}

/// A candidate solution: shapes together with the branch of their logs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeAssignment {
    pub shapes: Vec<Shape>,
    /// Logs of `[z, z', z'']` per tetrahedron; each triple sums to iπ.
    pub logs: Vec<[Complex64; 3]>,
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl ShapeAssignment {
    /// Shapes with principal-branch logs; residual not yet evaluated.
    pub fn from_shapes(shapes: Vec<Shape>) -> Self {
        let logs = shapes.iter().map(|s| s.principal_logs()).collect();
        Self {
            shapes,
            logs,
            residual: f64::INFINITY,
            converged: false,
            iterations: 0,
        }
    }

    pub fn regular(n: usize) -> Self {
        Self::from_shapes(vec![Shape::regular(); n])
    }

    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    pub fn classes(&self, tol: &Tolerances) -> Vec<ShapeClass> {
        self.shapes.iter().map(|s| s.classify(tol)).collect()
    }
}

/// Geometric iff converged with every shape positively oriented; essential
/// (but not geometric) if converged without degenerate shapes.
pub fn classify_triangulation(tri: &Triangulation, sol: &ShapeAssignment, tol: &Tolerances) -> TriClass {
    if !sol.converged || sol.len() != tri.size() || sol.residual > tol.eps_res {
        return TriClass::SolverFailed;
    }
    let classes = sol.classes(tol);
    if classes.iter().all(|&c| c == ShapeClass::PositivelyOriented) {
        TriClass::Geometric
    } else if classes.contains(&ShapeClass::Degenerate) {
        TriClass::NotEssential
    } else {
        TriClass::EssentialNotGeometric
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_product_is_minus_one() {
        for z in [Complex64::new(0.3, 0.7), Complex64::new(-2.0, 0.1), Complex64::new(5.0, -3.0)] {
            let [a, b, c] = Shape::new(z).params();
            assert!((a * b * c + 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn principal_logs_match_params() {
        let s = Shape::new(Complex64::new(0.2, 1.3));
        let logs = s.principal_logs();
        for (l, p) in logs.iter().zip(s.params()) {
            assert!((l.exp() - p).norm() < 1e-13);
        }
        // positively oriented: every argument in (0, π)
        assert!(logs.iter().all(|l| l.im > 0.0 && l.im < PI));
    }

    #[test]
    fn shape_classes() {
        let tol = Tolerances::default();
        assert_eq!(classify_shape(Shape::new(Complex64::new(0.5, 0.866025)), &tol), ShapeClass::PositivelyOriented);
        assert_eq!(classify_shape(Shape::new(Complex64::new(2.0, 0.0)), &tol), ShapeClass::Flat);
        assert_eq!(classify_shape(Shape::new(Complex64::new(1.0 + 1e-14, 0.0)), &tol), ShapeClass::Degenerate);
        assert_eq!(classify_shape(Shape::new(Complex64::new(0.5, -0.2)), &tol), ShapeClass::NegativelyOriented);
        assert_eq!(classify_shape(Shape::new(Complex64::new(1e12, 1.0)), &tol), ShapeClass::Degenerate);
    }
}
