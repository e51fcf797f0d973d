//! Ideal triangulations of cusped hyperbolic 3-manifolds, with a focus on
//! the layered triangulations of once-punctured torus bundles.
//!
//! The crate builds monodromy triangulations from cyclic words in L and R,
//! solves the gluing equations for the complete hyperbolic structure,
//! performs 2-3 and 3-2 moves while carrying shapes across exactly, and
//! explores the part of the flip graph made of geometric (or essential)
//! triangulations.

pub mod cusp;
pub mod edges;
pub mod explorer;
pub mod geometry;
pub mod isosig;
pub mod monodromy;
pub mod moves;
pub mod perm;
pub mod signature;
pub mod triangulation;

pub mod cli;

pub use geometry::{Shape, ShapeAssignment, ShapeClass, TriClass};
pub use monodromy::{parse_word, CyclicWord, Letter};
pub use perm::Perm4;
pub use signature::{canonical_signature, is_isomorphic};
pub use triangulation::{FaceGluing, Triangulation, TriangulationError};
