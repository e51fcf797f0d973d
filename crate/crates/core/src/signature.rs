//! Canonical signatures: a string that identifies a triangulation up to
//! combinatorial isomorphism.

use crate::isosig::SigData;
use crate::perm::Perm4;
use crate::triangulation::Triangulation;

/// Minimum, over every starting tetrahedron and starting vertex labelling,
/// of the breadth-first relabelled signature string. Two triangulations
/// have equal signatures exactly when they are isomorphic (orientation
/// reversing isomorphisms included).
pub fn canonical_signature(tri: &Triangulation) -> String {
    let mut best: Option<String> = None;
    for start in 0..tri.size() {
        for map in Perm4::all() {
            let s = SigData::from_start(tri, start, map).to_sig_string();
            if best.as_ref().is_none_or(|b| s < *b) {
                best = Some(s);
            }
        }
    }
    best.expect("triangulations are nonempty")
}

pub fn is_isomorphic(a: &Triangulation, b: &Triangulation) -> bool {
    a.size() == b.size()
        && a.edges().len() == b.edges().len()
        && canonical_signature(a) == canonical_signature(b)
}
