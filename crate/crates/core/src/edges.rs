//! Edge classes: the quotient of the 6T edge slots under the face gluings.

use serde::Serialize;

/// Vertex pairs of the six edge slots of a tetrahedron.
pub const EDGE_VERTICES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

/// Which shape parameter sits on each edge slot: 0 for z (edges 01, 23),
/// 1 for z' (edges 03, 12), 2 for z'' (edges 02, 13).
pub const SLOT_PARAM: [usize; 6] = [0, 2, 1, 1, 2, 0];

/// Slot index of the edge joining vertices `a` and `b`.
pub fn edge_slot(a: usize, b: usize) -> usize {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    debug_assert!(lo != hi && hi < 4);
    match (lo, hi) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        _ => 5,
    }
}

/// The slot opposite `slot` (the edge sharing no vertex with it).
pub fn opposite_slot(slot: usize) -> usize {
    5 - slot
}

/// Shape-parameter index (0, 1, 2 for z, z', z'') on the edge `ab`.
pub fn param_on_edge(a: usize, b: usize) -> usize {
    SLOT_PARAM[edge_slot(a, b)]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeIncidence {
    pub tet: usize,
    pub slot: usize,
    /// +1 if the slot's low→high vertex direction agrees with the class
    /// representative, -1 otherwise.
    pub orientation: i8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeClass {
    pub id: usize,
    pub incidences: Vec<EdgeIncidence>,
}

impl EdgeClass {
    pub fn degree(&self) -> usize {
        self.incidences.len()
    }

    /// Number of incidences of this edge in each tetrahedron, broken down by
    /// shape parameter.
    pub fn param_counts(&self, tet_count: usize) -> Vec<[i64; 3]> {
        let mut counts = vec![[0i64; 3]; tet_count];
        for inc in &self.incidences {
            counts[inc.tet][SLOT_PARAM[inc.slot]] += 1;
        }
        counts
    }
}

/// Union-find over edge slots that also tracks relative orientation.
pub(crate) struct OrientedUnionFind {
    parent: Vec<usize>,
    // parity of the node relative to its parent
    parity: Vec<u8>,
    rank: Vec<u8>,
}

impl OrientedUnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            parity: vec![0; n],
            rank: vec![0; n],
        }
    }

    /// Root of `x` together with the parity of `x` relative to the root.
    pub(crate) fn find(&mut self, x: usize) -> (usize, u8) {
        let mut path = Vec::new();
        let mut node = x;
        while self.parent[node] != node {
            path.push(node);
            node = self.parent[node];
        }
        let root = node;
        // Compress, accumulating parity from the top of the path down.
        let mut acc = 0u8;
        for &n in path.iter().rev() {
            acc ^= self.parity[n];
            self.parity[n] = acc;
            self.parent[n] = root;
        }
        (root, if path.is_empty() { 0 } else { self.parity[x] })
    }

    /// Merges the classes of `a` and `b`, recording that `b` has parity
    /// `rel` relative to `a`. Returns `false` if this contradicts an earlier
    /// union.
    pub(crate) fn union(&mut self, a: usize, b: usize, rel: u8) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa ^ pb == rel;
        }
        let link = pa ^ pb ^ rel;
        let (hi, lo) = if self.rank[ra] >= self.rank[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[lo] = hi;
        self.parity[lo] = link;
        if self.rank[hi] == self.rank[lo] {
            self.rank[hi] += 1;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slot_tables_are_consistent() {
        for (slot, [a, b]) in EDGE_VERTICES.iter().enumerate() {
            assert_eq!(edge_slot(*a, *b), slot);
            assert_eq!(edge_slot(*b, *a), slot);
            let [c, d] = EDGE_VERTICES[opposite_slot(slot)];
            assert!(c != *a && c != *b && d != *a && d != *b);
            assert_eq!(SLOT_PARAM[slot], SLOT_PARAM[opposite_slot(slot)]);
        }
        let mut per_param = [0; 3];
        for p in SLOT_PARAM {
            per_param[p] += 1;
        }
        assert_eq!(per_param, [2, 2, 2]);
    }

    #[test]
    fn union_find_tracks_parity() {
        let mut uf = OrientedUnionFind::new(5);
        assert!(uf.union(0, 1, 1));
        assert!(uf.union(1, 2, 1));
        assert!(uf.union(3, 4, 0));
        assert!(uf.union(2, 3, 1));
        let (r0, p0) = uf.find(0);
        let (r4, p4) = uf.find(4);
        assert_eq!(r0, r4);
        assert_eq!(p0 ^ p4, 1);
        assert!(uf.union(0, 2, 0));
        assert!(!uf.union(0, 2, 1));
    }
}
