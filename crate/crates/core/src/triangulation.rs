//! Combinatorial ideal triangulations.
//!
//! A triangulation is a list of tetrahedra whose faces are glued in pairs.
//! Face `k` of a tetrahedron is the face omitting vertex `k`. A gluing of
//! face `f` of tetrahedron `s` to tetrahedron `t` is stored as a
//! permutation `p` of {0,1,2,3} carrying vertex labels of `s` to vertex
//! labels of `t`; the destination face is `p(f)`.
//!
//! Every triangulation handed out by this module is *oriented*: all
//! tetrahedra carry the reference orientation and every gluing permutation
//! is odd. Orientable input whose labelling is not oriented (for example a
//! decoded isomorphism signature) is relabelled on construction.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::edges::{EdgeClass, EdgeIncidence, OrientedUnionFind, EDGE_VERTICES};
use crate::perm::Perm4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TriangulationError {
    #[error("a triangulation needs at least one tetrahedron")]
    Empty,
    #[error("gluing refers to tetrahedron {tet} but there are only {count}")]
    TetOutOfRange { tet: usize, count: usize },
    #[error("face index {0} is out of range 0..4")]
    FaceOutOfRange(usize),
    #[error("gluing of tetrahedron {tet} face {face} does not carry that face onto face {dst_face}")]
    PermutationMismatch {
        tet: usize,
        face: usize,
        dst_face: usize,
    },
    #[error("face gluings are not an involution at tetrahedron {tet} face {face}")]
    InvolutionViolation { tet: usize, face: usize },
    #[error("face {face} of tetrahedron {tet} is not glued")]
    UngluedFace { tet: usize, face: usize },
    #[error("triangulation is not orientable")]
    NonOrientable,
    #[error("an edge is identified with itself in reverse")]
    SelfReversedEdge,
    #[error("malformed triangulation json: {0}")]
    Json(String),
}

/// One face pairing: face `src.1` of tetrahedron `src.0` is glued to face
/// `dst.1` of tetrahedron `dst.0`, with `perm` carrying source vertex labels
/// to destination vertex labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceGluing {
    pub src: (usize, usize),
    pub dst: (usize, usize),
    pub perm: Perm4,
}

impl FaceGluing {
    pub fn new(src: (usize, usize), dst: (usize, usize), perm: Perm4) -> Self {
        Self { src, dst, perm }
    }

    pub fn inverse(&self) -> Self {
        Self {
            src: self.dst,
            dst: self.src,
            perm: self.perm.inverse(),
        }
    }
}

/// Where a face goes: the neighbouring tetrahedron and the vertex map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gluing {
    pub tet: usize,
    pub perm: Perm4,
}

#[derive(Clone, Debug)]
pub struct Triangulation {
    adj: Vec<[Gluing; 4]>,
    labels: Option<Vec<String>>,
    edges: Vec<EdgeClass>,
    // (edge class id, orientation) for every (tet, slot)
    slot_edge: Vec<[(usize, i8); 6]>,
}

impl PartialEq for Triangulation {
    /// Labelled equality: same gluing table, ignoring display names.
    fn eq(&self, other: &Self) -> bool {
        self.adj == other.adj
    }
}

impl Triangulation {
    /// Validates a list of face gluings over `count` tetrahedra.
    ///
    /// Each face pairing may be listed once, or from both sides as long as
    /// the two entries are mutually inverse.
    pub fn new(count: usize, gluings: &[FaceGluing]) -> Result<Self, TriangulationError> {
        if count == 0 {
            return Err(TriangulationError::Empty);
        }
        let mut slots: Vec<[Option<Gluing>; 4]> = vec![[None; 4]; count];
        for g in gluings {
            for (t, f) in [g.src, g.dst] {
                if t >= count {
                    return Err(TriangulationError::TetOutOfRange { tet: t, count });
                }
                if f > 3 {
                    return Err(TriangulationError::FaceOutOfRange(f));
                }
            }
            if g.perm.apply(g.src.1) != g.dst.1 {
                return Err(TriangulationError::PermutationMismatch {
                    tet: g.src.0,
                    face: g.src.1,
                    dst_face: g.dst.1,
                });
            }
            if g.src == g.dst {
                return Err(TriangulationError::InvolutionViolation {
                    tet: g.src.0,
                    face: g.src.1,
                });
            }
            for h in [*g, g.inverse()] {
                let entry = Gluing {
                    tet: h.dst.0,
                    perm: h.perm,
                };
                let slot = &mut slots[h.src.0][h.src.1];
                match slot {
                    None => *slot = Some(entry),
                    Some(existing) if *existing == entry => {}
                    Some(_) => {
                        return Err(TriangulationError::InvolutionViolation {
                            tet: h.src.0,
                            face: h.src.1,
                        })
                    }
                }
            }
        }
        let mut adj = Vec::with_capacity(count);
        for (t, faces) in slots.iter().enumerate() {
            let mut row = [Gluing {
                tet: 0,
                perm: Perm4::IDENTITY,
            }; 4];
            for f in 0..4 {
                row[f] = faces[f].ok_or(TriangulationError::UngluedFace { tet: t, face: f })?;
            }
            adj.push(row);
        }
        Self::from_adjacency(adj, None)
    }

    /// Builds a triangulation from a full adjacency table, checking the
    /// involution property, orienting, and computing edge classes.
    pub(crate) fn from_adjacency(
        adj: Vec<[Gluing; 4]>,
        labels: Option<Vec<String>>,
    ) -> Result<Self, TriangulationError> {
        let count = adj.len();
        if count == 0 {
            return Err(TriangulationError::Empty);
        }
        for (t, row) in adj.iter().enumerate() {
            for (f, g) in row.iter().enumerate() {
                if g.tet >= count {
                    return Err(TriangulationError::TetOutOfRange { tet: g.tet, count });
                }
                let back = adj[g.tet][g.perm.apply(f)];
                if (g.tet, g.perm.apply(f)) == (t, f)
                    || back.tet != t
                    || back.perm != g.perm.inverse()
                {
                    return Err(TriangulationError::InvolutionViolation { tet: t, face: f });
                }
            }
        }
        let adj = orient(adj)?;
        let (edges, slot_edge) = compute_edge_classes(&adj)?;
        let labels = labels.filter(|l| l.len() == count);
        Ok(Self {
            adj,
            labels,
            edges,
            slot_edge,
        })
    }

    pub fn size(&self) -> usize {
        self.adj.len()
    }

    pub fn adjacent(&self, tet: usize, face: usize) -> Gluing {
        self.adj[tet][face]
    }

    pub(crate) fn adjacency(&self) -> &[[Gluing; 4]] {
        &self.adj
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Display name of a tetrahedron: its label if present, else its index.
    pub fn label(&self, tet: usize) -> String {
        match &self.labels {
            Some(l) => l[tet].clone(),
            None => tet.to_string(),
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        if labels.len() == self.size() {
            self.labels = Some(labels);
        }
        self
    }

    /// Each face pairing once, from the side with the smaller (tet, face).
    pub fn gluings(&self) -> Vec<FaceGluing> {
        let mut out = Vec::with_capacity(2 * self.size());
        for (t, row) in self.adj.iter().enumerate() {
            for (f, g) in row.iter().enumerate() {
                let dst = (g.tet, g.perm.apply(f));
                if (t, f) < dst {
                    out.push(FaceGluing::new((t, f), dst, g.perm));
                }
            }
        }
        out
    }

    pub fn edges(&self) -> &[EdgeClass] {
        &self.edges
    }

    /// Edge class and relative orientation of a slot.
    pub fn edge_of(&self, tet: usize, slot: usize) -> (usize, i8) {
        self.slot_edge[tet][slot]
    }

    /// Relabels the triangulation: tetrahedron `t` becomes `tet_map[t]` and
    /// its vertex `v` becomes `vertex_maps[t](v)`.
    pub fn relabel(&self, tet_map: &[usize], vertex_maps: &[Perm4]) -> Result<Self, TriangulationError> {
        let n = self.size();
        let mut adj = vec![
            [Gluing {
                tet: 0,
                perm: Perm4::IDENTITY
            }; 4];
            n
        ];
        for t in 0..n {
            for f in 0..4 {
                let g = self.adj[t][f];
                let new_perm = vertex_maps[g.tet]
                    .compose(g.perm)
                    .compose(vertex_maps[t].inverse());
                adj[tet_map[t]][vertex_maps[t].apply(f)] = Gluing {
                    tet: tet_map[g.tet],
                    perm: new_perm,
                };
            }
        }
        let labels = self.labels.as_ref().map(|l| {
            let mut out = vec![String::new(); n];
            for t in 0..n {
                out[tet_map[t]] = l[t].clone();
            }
            out
        });
        Self::from_adjacency(adj, labels)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&TriangulationJson::from(self)).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, TriangulationError> {
        let raw: TriangulationJson =
            serde_json::from_str(text).map_err(|e| TriangulationError::Json(e.to_string()))?;
        raw.into_triangulation()
    }
}

/// Assigns each tetrahedron an orientation so that every gluing becomes
/// odd, relabelling negatively oriented tetrahedra by swapping vertices 2
/// and 3.
fn orient(adj: Vec<[Gluing; 4]>) -> Result<Vec<[Gluing; 4]>, TriangulationError> {
    let n = adj.len();
    let mut sign = vec![0i8; n];
    let mut needs_flip = false;
    for start in 0..n {
        if sign[start] != 0 {
            continue;
        }
        sign[start] = 1;
        let mut stack = vec![start];
        while let Some(t) = stack.pop() {
            for g in &adj[t] {
                // odd gluing: same sign; even gluing: opposite
                let want = if g.perm.is_odd() { sign[t] } else { -sign[t] };
                if sign[g.tet] == 0 {
                    sign[g.tet] = want;
                    needs_flip |= want < 0;
                    stack.push(g.tet);
                } else if sign[g.tet] != want {
                    return Err(TriangulationError::NonOrientable);
                }
            }
        }
    }
    if !needs_flip {
        return Ok(adj);
    }
    let swap = Perm4::transposition(2, 3);
    let maps: Vec<Perm4> = sign
        .iter()
        .map(|&s| if s < 0 { swap } else { Perm4::IDENTITY })
        .collect();
    let mut out = adj.clone();
    for t in 0..n {
        for f in 0..4 {
            let g = adj[t][f];
            out[t][maps[t].apply(f)] = Gluing {
                tet: g.tet,
                perm: maps[g.tet].compose(g.perm).compose(maps[t].inverse()),
            };
        }
    }
    Ok(out)
}

type EdgeTables = (Vec<EdgeClass>, Vec<[(usize, i8); 6]>);

fn compute_edge_classes(adj: &[[Gluing; 4]]) -> Result<EdgeTables, TriangulationError> {
    let n = adj.len();
    let mut uf = OrientedUnionFind::new(6 * n);
    for (t, row) in adj.iter().enumerate() {
        for (f, g) in row.iter().enumerate() {
            for (slot, &[a, b]) in EDGE_VERTICES.iter().enumerate() {
                if a == f || b == f {
                    continue;
                }
                let (pa, pb) = (g.perm.apply(a), g.perm.apply(b));
                let dst_slot = crate::edges::edge_slot(pa, pb);
                let rel = u8::from(pa > pb);
                if !uf.union(6 * t + slot, 6 * g.tet + dst_slot, rel) {
                    return Err(TriangulationError::SelfReversedEdge);
                }
            }
        }
    }
    let mut root_to_class = std::collections::HashMap::new();
    let mut edges: Vec<EdgeClass> = Vec::new();
    let mut rep_parity: Vec<u8> = Vec::new();
    let mut slot_edge = vec![[(0usize, 1i8); 6]; n];
    for t in 0..n {
        for slot in 0..6 {
            let (root, parity) = uf.find(6 * t + slot);
            let id = *root_to_class.entry(root).or_insert_with(|| {
                edges.push(EdgeClass {
                    id: edges.len(),
                    incidences: Vec::new(),
                });
                rep_parity.push(parity);
                edges.len() - 1
            });
            let orientation = if parity == rep_parity[id] { 1 } else { -1 };
            edges[id].incidences.push(EdgeIncidence {
                tet: t,
                slot,
                orientation,
            });
            slot_edge[t][slot] = (id, orientation);
        }
    }
    Ok((edges, slot_edge))
}

#[derive(Serialize, Deserialize)]
struct GluingJson {
    src: [usize; 2],
    dst: [usize; 2],
    perm: [u8; 4],
}

#[derive(Serialize, Deserialize)]
struct TriangulationJson {
    tets: usize,
    gluings: Vec<GluingJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl From<&Triangulation> for TriangulationJson {
    fn from(tri: &Triangulation) -> Self {
        Self {
            tets: tri.size(),
            gluings: tri
                .gluings()
                .into_iter()
                .map(|g| GluingJson {
                    src: [g.src.0, g.src.1],
                    dst: [g.dst.0, g.dst.1],
                    perm: g.perm.images(),
                })
                .collect(),
            labels: tri.labels.clone(),
        }
    }
}

impl TriangulationJson {
    fn into_triangulation(self) -> Result<Triangulation, TriangulationError> {
        let mut gluings = Vec::with_capacity(self.gluings.len());
        for g in &self.gluings {
            let perm = Perm4::new(g.perm).ok_or_else(|| {
                TriangulationError::Json(format!("{:?} is not a permutation", g.perm))
            })?;
            gluings.push(FaceGluing::new(
                (g.src[0], g.src[1]),
                (g.dst[0], g.dst[1]),
                perm,
            ));
        }
        let tri = Triangulation::new(self.tets, &gluings)?;
        Ok(match self.labels {
            Some(l) => tri.with_labels(l),
            None => tri,
        })
    }
}
