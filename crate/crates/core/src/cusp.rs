//! The cusp (vertex link) triangulation, its peripheral curves, and its
//! development into the Euclidean plane.
//!
//! Each tetrahedron `t` contributes one cusp triangle per vertex `v`. The
//! triangle's corners sit at the three other vertices `x` of `t`, and the
//! corner at `x` carries the shape parameter of the edge `vx`. The side of
//! the triangle opposite corner `x` lies in face `x` of `t`.
//!
//! Corners are ordered counterclockwise so that `(v, a, b, c)` is an odd
//! permutation; with that order the parameters read z → z' → z'' going
//! counterclockwise, and a corner with parameter `s` at `a` places the next
//! two corners at `b` and `a + (b - a) s`.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::edges::{param_on_edge, OrientedUnionFind};
use crate::geometry::{ShapeAssignment, ShapeClass, Tolerances};
use crate::perm::Perm4;
use crate::triangulation::Triangulation;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CuspError {
    #[error("cusp {cusp} has Euler characteristic {chi}, not a torus")]
    NonTorusCusp { cusp: usize, chi: i64 },
    #[error("cannot develop through degenerate shape on tetrahedron {0}")]
    DegenerateShape(usize),
    #[error("edge does not border two developed triangles")]
    InvalidEdge,
}

/// A cusp triangle: vertex `vertex` of tetrahedron `tet`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CuspTriangle {
    pub tet: usize,
    pub vertex: usize,
}

impl CuspTriangle {
    pub fn id(self) -> usize {
        4 * self.tet + self.vertex
    }

    pub fn from_id(id: usize) -> Self {
        Self {
            tet: id / 4,
            vertex: id % 4,
        }
    }

    /// The three corners in counterclockwise order.
    pub fn corners(self) -> [usize; 3] {
        ccw_corners(self.vertex)
    }
}

/// Counterclockwise corners of the link of vertex `v`.
pub fn ccw_corners(v: usize) -> [usize; 3] {
    let others: Vec<usize> = (0..4).filter(|&x| x != v).collect();
    let (a, b, c) = (others[0], others[1], others[2]);
    let p = Perm4::new([v as u8, a as u8, b as u8, c as u8]).expect("distinct");
    if p.is_odd() {
        [a, b, c]
    } else {
        [a, c, b]
    }
}

/// A side of a cusp triangle: the side opposite `corner`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CuspEdge {
    pub triangle: CuspTriangle,
    pub corner: usize,
}

/// One step of a closed dual path: the path crosses into `triangle`
/// through the side opposite `entry` and leaves through the side opposite
/// `exit`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CurveStep {
    pub triangle: CuspTriangle,
    pub entry: usize,
    pub exit: usize,
}

impl CurveStep {
    /// The corner the path turns around.
    pub fn pivot(&self) -> usize {
        (0..4)
            .find(|&x| x != self.triangle.vertex && x != self.entry && x != self.exit)
            .expect("three distinct corners")
    }

    /// +1 if the pivot lies to the left of the path, -1 if to the right.
    pub fn turn(&self) -> i64 {
        let [a, b, _] = rotate_to(self.triangle.corners(), self.entry);
        if b == self.exit {
            -1
        } else {
            debug_assert_ne!(a, self.exit);
            1
        }
    }
}

fn rotate_to(corners: [usize; 3], first: usize) -> [usize; 3] {
    let k = corners.iter().position(|&c| c == first).expect("corner present");
    [corners[k], corners[(k + 1) % 3], corners[(k + 2) % 3]]
}

/// A closed oriented path in the dual graph of a cusp.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeripheralCurve {
    pub steps: Vec<CurveStep>,
}

impl PeripheralCurve {
    /// Exponents of (z, z', z'') per tetrahedron in the log-holonomy.
    pub fn holonomy_exponents(&self, tet_count: usize) -> Vec<[i64; 3]> {
        let mut out = vec![[0i64; 3]; tet_count];
        for step in &self.steps {
            let pivot = step.pivot();
            out[step.triangle.tet][param_on_edge(step.triangle.vertex, pivot)] += step.turn();
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Cusp {
    pub triangles: Vec<CuspTriangle>,
    pub vertex_count: usize,
    pub euler_characteristic: i64,
    /// Two curves forming a basis of the cusp torus' first homology.
    pub peripheral: Vec<PeripheralCurve>,
}

#[derive(Clone, Debug)]
pub struct CuspTriangulation {
    tet_count: usize,
    adjacency: Vec<[crate::triangulation::Gluing; 4]>,
    pub cusps: Vec<Cusp>,
    /// Cusp index of each triangle id.
    pub cusp_of: Vec<usize>,
    /// Cusp vertex index for each corner, keyed by (triangle id, corner).
    vertex_of_corner: Vec<[usize; 4]>,
    pub vertex_total: usize,
}

impl CuspTriangulation {
    pub fn triangle_count(&self) -> usize {
        4 * self.tet_count
    }

    /// The triangle across the side opposite `corner`, and the map from
    /// this triangle's corner labels to the neighbour's.
    pub fn neighbour(&self, tri: CuspTriangle, corner: usize) -> (CuspTriangle, Perm4) {
        let g = self.adjacency[tri.tet][corner];
        (
            CuspTriangle {
                tet: g.tet,
                vertex: g.perm.apply(tri.vertex),
            },
            g.perm,
        )
    }

    /// Cusp vertex at a corner of a triangle.
    pub fn vertex_at(&self, tri: CuspTriangle, corner: usize) -> usize {
        self.vertex_of_corner[tri.id()][corner]
    }

    /// Triangles and corners incident to each cusp vertex.
    pub fn vertex_stars(&self) -> Vec<Vec<(CuspTriangle, usize)>> {
        let mut stars = vec![Vec::new(); self.vertex_total];
        for id in 0..self.triangle_count() {
            let tri = CuspTriangle::from_id(id);
            for c in tri.corners() {
                stars[self.vertex_at(tri, c)].push((tri, c));
            }
        }
        stars
    }
}

/// Builds the vertex-link surface of `tri`, checks every cusp is a torus,
/// and picks two peripheral curves per cusp by a tree–cotree
/// decomposition.
pub fn cusp_triangulation(tri: &Triangulation) -> Result<CuspTriangulation, CuspError> {
    let n = tri.size();
    let adjacency = tri.adjacency().to_vec();

    // corners: id 16 t + 4 v + x
    let mut corner_uf = OrientedUnionFind::new(16 * n);
    let mut tri_uf = OrientedUnionFind::new(4 * n);
    for t in 0..n {
        for v in 0..4 {
            for x in (0..4).filter(|&x| x != v) {
                let g = adjacency[t][x];
                let (t2, v2) = (g.tet, g.perm.apply(v));
                tri_uf.union(4 * t + v, 4 * t2 + v2, 0);
                for y in (0..4).filter(|&y| y != v && y != x) {
                    corner_uf.union(16 * t + 4 * v + y, 16 * t2 + 4 * v2 + g.perm.apply(y), 0);
                }
            }
        }
    }

    let mut cusp_index = HashMap::new();
    let mut cusp_of = vec![0; 4 * n];
    let mut cusp_triangles: Vec<Vec<CuspTriangle>> = Vec::new();
    for (id, slot) in cusp_of.iter_mut().enumerate() {
        let root = tri_uf.find(id).0;
        let next = cusp_index.len();
        let c = *cusp_index.entry(root).or_insert(next);
        if c == cusp_triangles.len() {
            cusp_triangles.push(Vec::new());
        }
        cusp_triangles[c].push(CuspTriangle::from_id(id));
        *slot = c;
    }

    let mut vertex_index = HashMap::new();
    let mut vertex_of_corner = vec![[usize::MAX; 4]; 4 * n];
    let mut vertices_per_cusp = vec![0i64; cusp_triangles.len()];
    for id in 0..4 * n {
        let t = CuspTriangle::from_id(id);
        for c in t.corners() {
            let root = corner_uf.find(16 * t.tet + 4 * t.vertex + c).0;
            let next = vertex_index.len();
            let vid = *vertex_index.entry(root).or_insert_with(|| {
                vertices_per_cusp[cusp_of[id]] += 1;
                next
            });
            vertex_of_corner[id][c] = vid;
        }
    }

    let mut ct = CuspTriangulation {
        tet_count: n,
        adjacency,
        cusps: Vec::new(),
        cusp_of,
        vertex_of_corner,
        vertex_total: vertex_index.len(),
    };

    for (k, triangles) in cusp_triangles.into_iter().enumerate() {
        let faces = triangles.len() as i64;
        let chi = vertices_per_cusp[k] - 3 * faces / 2 + faces;
        if chi != 0 {
            return Err(CuspError::NonTorusCusp { cusp: k, chi });
        }
        let peripheral = peripheral_curves(&ct, &triangles);
        ct.cusps.push(Cusp {
            vertex_count: vertices_per_cusp[k] as usize,
            euler_characteristic: chi,
            triangles,
            peripheral,
        });
    }
    Ok(ct)
}

/// BFS spanning tree of the dual graph: parent (triangle, corner of the
/// parent side) for every triangle except the root, in discovery order.
fn dual_tree(
    ct: &CuspTriangulation,
    root: CuspTriangle,
) -> (Vec<CuspTriangle>, HashMap<CuspTriangle, (CuspTriangle, usize)>) {
    let mut order = vec![root];
    let mut parent = HashMap::new();
    let mut queue = VecDeque::from([root]);
    let mut seen = std::collections::HashSet::from([root]);
    while let Some(t) = queue.pop_front() {
        for c in t.corners() {
            let (nb, _) = ct.neighbour(t, c);
            if seen.insert(nb) {
                parent.insert(nb, (t, c));
                order.push(nb);
                queue.push_back(nb);
            }
        }
    }
    (order, parent)
}

/// Canonical key for the cusp edge through side `corner` of `t`.
fn edge_key(ct: &CuspTriangulation, t: CuspTriangle, corner: usize) -> (CuspTriangle, usize) {
    let (nb, p) = ct.neighbour(t, corner);
    std::cmp::min((t, corner), (nb, p.apply(corner)))
}

fn peripheral_curves(ct: &CuspTriangulation, triangles: &[CuspTriangle]) -> Vec<PeripheralCurve> {
    let root = *triangles.iter().min().expect("cusp has triangles");
    let (_, parent) = dual_tree(ct, root);
    let mut tree_edges = std::collections::HashSet::new();
    for (child, (par, c)) in &parent {
        let _ = child;
        tree_edges.insert(edge_key(ct, *par, *c));
    }

    let mut all_edges: Vec<(CuspTriangle, usize)> = triangles
        .iter()
        .flat_map(|&t| t.corners().map(|c| edge_key(ct, t, c)))
        .collect();
    all_edges.sort();
    all_edges.dedup();

    // cotree: spanning forest of the cusp 1-skeleton avoiding tree-crossed edges
    let mut vertex_uf = OrientedUnionFind::new(ct.vertex_total);
    let mut leftovers = Vec::new();
    for &(t, c) in &all_edges {
        if tree_edges.contains(&(t, c)) {
            continue;
        }
        let ends: Vec<usize> = t
            .corners()
            .into_iter()
            .filter(|&x| x != c)
            .map(|x| ct.vertex_at(t, x))
            .collect();
        let (ra, _) = vertex_uf.find(ends[0]);
        let (rb, _) = vertex_uf.find(ends[1]);
        if ra != rb {
            vertex_uf.union(ends[0], ends[1], 0);
        } else {
            leftovers.push((t, c));
        }
    }

    leftovers
        .into_iter()
        .map(|(t, c)| cycle_through(ct, &parent, t, c))
        .collect()
}

/// The dual cycle made of the non-tree crossing out of `t` through the side
/// opposite `corner`, closed up through the spanning tree.
fn cycle_through(
    ct: &CuspTriangulation,
    parent: &HashMap<CuspTriangle, (CuspTriangle, usize)>,
    t: CuspTriangle,
    corner: usize,
) -> PeripheralCurve {
    let (nb, _) = ct.neighbour(t, corner);
    let ancestors = |mut x: CuspTriangle| {
        let mut path = vec![x];
        while let Some(&(p, _)) = parent.get(&x) {
            path.push(p);
            x = p;
        }
        path
    };
    let up_from_nb = ancestors(nb);
    let up_from_t = ancestors(t);
    let lca = *up_from_nb
        .iter()
        .find(|x| up_from_t.contains(x))
        .expect("common root");

    // (triangle, side crossed on the way out)
    let mut crossings = vec![(t, corner)];
    for &x in up_from_nb.iter().take_while(|&&x| x != lca) {
        let (par, c) = parent[&x];
        let (_, p) = ct.neighbour(par, c);
        crossings.push((x, p.apply(c)));
    }
    let down: Vec<CuspTriangle> = up_from_t.iter().take_while(|&&x| x != lca).copied().collect();
    for &child in down.iter().rev() {
        crossings.push(parent[&child]);
    }

    let len = crossings.len();
    let steps = (0..len)
        .map(|k| {
            let (prev, prev_exit) = crossings[(k + len - 1) % len];
            let (_, p) = ct.neighbour(prev, prev_exit);
            CurveStep {
                triangle: crossings[k].0,
                entry: p.apply(prev_exit),
                exit: crossings[k].1,
            }
        })
        .collect();
    PeripheralCurve { steps }
}

/// The cusp laid out in the plane.
#[derive(Clone, Debug, Serialize)]
pub struct DevelopedCusp {
    pub cusp: usize,
    /// Corner positions per placed triangle, indexed by vertex label (the
    /// triangle's own vertex slot is unused).
    pub positions: Vec<(CuspTriangle, [Complex64; 4])>,
    /// Holonomy of the two peripheral curves as `w ↦ a w + b`: (a, b).
    pub holonomy: Vec<(Complex64, Complex64)>,
    pub scale_normalized: bool,
    #[serde(skip)]
    index: HashMap<CuspTriangle, usize>,
    #[serde(skip)]
    params: Vec<[Complex64; 3]>,
    #[serde(skip)]
    adjacency: Vec<[crate::triangulation::Gluing; 4]>,
}

fn shape_at(params: &[[Complex64; 3]], t: CuspTriangle, corner: usize) -> Complex64 {
    params[t.tet][param_on_edge(t.vertex, corner)]
}

/// Places the corners of `t` given two adjacent known corners.
fn place(params: &[[Complex64; 3]], t: CuspTriangle, known: [(usize, Complex64); 2]) -> [Complex64; 4] {
    let ccw = t.corners();
    let mut pos = [Complex64::new(0.0, 0.0); 4];
    let (ka, kb) = (known[0].0, known[1].0);
    // order the known pair counterclockwise
    let [a, b, c] = rotate_to(ccw, ka);
    let ((a, pa), (b, pb)) = if b == kb {
        ((a, known[0].1), (b, known[1].1))
    } else {
        let [a2, b2, _] = rotate_to(ccw, kb);
        debug_assert_eq!(b2, ka);
        ((a2, known[1].1), (b2, known[0].1))
    };
    let third = ccw.into_iter().find(|&x| x != a && x != b).expect("three corners");
    let _ = c;
    pos[a] = pa;
    pos[b] = pb;
    pos[third] = pa + (pb - pa) * shape_at(params, t, a);
    pos
}

impl DevelopedCusp {
    pub fn position(&self, t: CuspTriangle) -> Option<[Complex64; 4]> {
        self.index.get(&t).map(|&i| self.positions[i].1)
    }

    /// Develops the neighbour of a placed triangle across the side opposite
    /// `corner`, in the placed triangle's coordinates.
    pub fn develop_across(&self, t: CuspTriangle, pos: &[Complex64; 4], corner: usize) -> (CuspTriangle, [Complex64; 4]) {
        develop_neighbour(&self.params, &self.adjacency, t, pos, corner)
    }

    /// Sum of corner angles around every cusp vertex of this cusp.
    pub fn vertex_angle_sums(&self, ct: &CuspTriangulation) -> Vec<f64> {
        ct.vertex_stars()
            .into_iter()
            .filter(|star| star.first().is_some_and(|(t, _)| ct.cusp_of[t.id()] == self.cusp))
            .map(|star| star.iter().map(|&(t, c)| shape_at(&self.params, t, c).arg()).sum())
            .collect()
    }

    /// Renders the fundamental domain as an SVG document.
    pub fn to_svg(&self, tet_count: usize) -> String {
        let pts: Vec<Complex64> = self
            .positions
            .iter()
            .flat_map(|(t, p)| t.corners().map(|c| p[c]))
            .collect();
        let (mut min_x, mut min_y, mut max_x, mut max_y) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for p in &pts {
            min_x = min_x.min(p.re);
            max_x = max_x.max(p.re);
            min_y = min_y.min(p.im);
            max_y = max_y.max(p.im);
        }
        let span = (max_x - min_x).max(max_y - min_y).max(1e-9);
        let size = 800.0;
        let margin = 20.0;
        let scale = (size - 2.0 * margin) / span;
        let map = |p: Complex64| (margin + (p.re - min_x) * scale, margin + (max_y - p.im) * scale);
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
        );
        for (t, p) in &self.positions {
            let hue = 360.0 * t.tet as f64 / tet_count.max(1) as f64;
            let corners = t.corners();
            let path: Vec<String> = corners
                .iter()
                .map(|&c| {
                    let (x, y) = map(p[c]);
                    format!("{x:.3},{y:.3}")
                })
                .collect();
            let _ = writeln!(
                svg,
                r#"  <polygon points="{}" fill="hsl({hue:.0},70%,70%)" stroke="black" stroke-width="0.8"><title>tet {} vertex {}</title></polygon>"#,
                path.join(" "),
                t.tet,
                t.vertex
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn develop_neighbour(
    params: &[[Complex64; 3]],
    adjacency: &[[crate::triangulation::Gluing; 4]],
    t: CuspTriangle,
    pos: &[Complex64; 4],
    corner: usize,
) -> (CuspTriangle, [Complex64; 4]) {
    let g = adjacency[t.tet][corner];
    let nb = CuspTriangle {
        tet: g.tet,
        vertex: g.perm.apply(t.vertex),
    };
    let shared: Vec<usize> = t
        .corners()
        .into_iter()
        .filter(|&x| x != corner)
        .collect();
    let known = [
        (g.perm.apply(shared[0]), pos[shared[0]]),
        (g.perm.apply(shared[1]), pos[shared[1]]),
    ];
    (nb, place(params, nb, known))
}

/// Lays out one fundamental domain of cusp `cusp` breadth first from the
/// shapes, and computes the holonomy of both peripheral curves.
pub fn develop_cusp(
    ct: &CuspTriangulation,
    cusp: usize,
    sol: &ShapeAssignment,
    tol: &Tolerances,
) -> Result<DevelopedCusp, CuspError> {
    for (i, s) in sol.shapes.iter().enumerate() {
        if s.classify(tol) == ShapeClass::Degenerate {
            return Err(CuspError::DegenerateShape(i));
        }
    }
    let params: Vec<[Complex64; 3]> = sol.shapes.iter().map(|s| s.params()).collect();
    let triangles = &ct.cusps[cusp].triangles;
    let root = *triangles.iter().min().expect("nonempty cusp");
    let (order, parent) = dual_tree(ct, root);

    // first triangle: longest side on [0, 1]
    let [a, b, _] = root.corners();
    let mut first = place(&params, root, [(a, Complex64::new(0.0, 0.0)), (b, Complex64::new(1.0, 0.0))]);
    let cs = root.corners();
    let mut longest = (0, f64::MIN);
    for k in 0..3 {
        let len = (first[cs[(k + 1) % 3]] - first[cs[k]]).norm();
        if len > longest.1 {
            longest = (k, len);
        }
    }
    let (p, q) = (first[cs[longest.0]], first[cs[(longest.0 + 1) % 3]]);
    for c in cs {
        first[c] = (first[c] - p) / (q - p);
    }

    let mut positions = Vec::with_capacity(order.len());
    let mut index = HashMap::new();
    index.insert(root, 0);
    positions.push((root, first));
    for &t in order.iter().skip(1) {
        let (par, c) = parent[&t];
        let ppos = positions[index[&par]].1;
        let (nb, pos) = develop_neighbour(&params, &ct.adjacency, par, &ppos, c);
        debug_assert_eq!(nb, t);
        index.insert(t, positions.len());
        positions.push((t, pos));
    }

    let holonomy = ct.cusps[cusp]
        .peripheral
        .iter()
        .map(|curve| {
            let start = curve.steps[0].triangle;
            let base = positions[index[&start]].1;
            let mut cur = start;
            let mut pos = base;
            for step in &curve.steps {
                debug_assert_eq!(step.triangle, cur);
                let (nb, npos) = develop_neighbour(&params, &ct.adjacency, cur, &pos, step.exit);
                cur = nb;
                pos = npos;
            }
            debug_assert_eq!(cur, start);
            let cs = start.corners();
            let a = (pos[cs[1]] - pos[cs[0]]) / (base[cs[1]] - base[cs[0]]);
            let b = pos[cs[0]] - a * base[cs[0]];
            (a, b)
        })
        .collect();

    Ok(DevelopedCusp {
        cusp,
        positions,
        holonomy,
        scale_normalized: true,
        index,
        params,
        adjacency: ct.adjacency.clone(),
    })
}

/// Signed sine of the turn at `b` for the path a → b → c (positive for a
/// left turn), normalised by the two segment lengths.
fn turn_sine(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    let u = b - a;
    let v = c - b;
    (u.re * v.im - u.im * v.re) / (u.norm() * v.norm())
}

/// True iff the quadrilateral `quad` (in cyclic order) is strictly convex
/// and counterclockwise, with the sine of every turn above `eps`.
pub fn is_strictly_convex(quad: [Complex64; 4], eps: f64) -> bool {
    (0..4).all(|i| turn_sine(quad[i], quad[(i + 1) % 4], quad[(i + 2) % 4]) > eps)
}

/// Whether flipping the cusp edge `edge` (a 2-2 move) can be realised
/// geometrically: the two triangles on either side must form a strictly
/// convex quadrilateral.
pub fn quad_flip_geometric(developed: &DevelopedCusp, edge: CuspEdge, tol: &Tolerances) -> Result<bool, CuspError> {
    let t = edge.triangle;
    let pos = developed.position(t).ok_or(CuspError::InvalidEdge)?;
    let (nb, npos) = developed.develop_across(t, &pos, edge.corner);
    if nb == t {
        return Err(CuspError::InvalidEdge);
    }
    let [a, b, c] = rotate_to(t.corners(), edge.corner);
    // neighbour's apex: the corner not on the shared side
    let g = developed.adjacency[t.tet][edge.corner];
    let apex = g.perm.apply(edge.corner);
    // quad in counterclockwise order: apex of t, next corner, neighbour apex, last corner
    let quad = [pos[a], pos[b], npos[apex], pos[c]];
    Ok(is_strictly_convex(quad, tol.eps_flat))
}

/// One step of the walk around a cusp vertex.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinkStep {
    pub triangle: CuspTriangle,
    /// Corner of `triangle` at the centre of the walk.
    pub pivot: usize,
    /// Developed position of the next vertex of the link.
    pub point: Complex64,
}

/// Walks counterclockwise once around the cusp vertex at `corner` of
/// `start`, developing as it goes. Positions are in `start`'s developed
/// coordinates, so the link closes up only up to the complete structure.
pub fn vertex_link(developed: &DevelopedCusp, start: CuspTriangle, corner: usize) -> Result<Vec<LinkStep>, CuspError> {
    let mut t = start;
    let mut pivot = corner;
    let mut pos = developed.position(start).ok_or(CuspError::InvalidEdge)?;
    let mut out = Vec::new();
    loop {
        let [_, b, _] = rotate_to(t.corners(), pivot);
        out.push(LinkStep { triangle: t, pivot, point: pos[b] });
        // the next triangle counterclockwise shares side pivot–c, opposite b
        let g = developed.adjacency[t.tet][b];
        let (nb, npos) = developed.develop_across(t, &pos, b);
        pivot = g.perm.apply(pivot);
        t = nb;
        pos = npos;
        if t == start && pivot == corner {
            return Ok(out);
        }
        if out.len() > developed.positions.len() {
            return Err(CuspError::InvalidEdge);
        }
    }
}

/// Number of sign changes in the turning direction of a polyline, ignoring
/// turns whose normalised cross product is within `eps` of zero.
pub fn inflection_count(points: &[Complex64], eps: f64) -> usize {
    let signs: Vec<bool> = points
        .windows(3)
        .map(|w| turn_sine(w[0], w[1], w[2]))
        .filter(|s| s.abs() > eps)
        .map(|s| s > 0.0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Longest cyclic run of link steps whose triangles belong to `tets`, as
/// the chain of link vertices bounding it (one more point than steps).
pub fn fan_chain(link: &[LinkStep], tets: &[usize]) -> Vec<Complex64> {
    let n = link.len();
    let inside: Vec<bool> = link.iter().map(|s| tets.contains(&s.triangle.tet)).collect();
    if inside.iter().all(|&x| x) {
        return link.iter().map(|s| s.point).collect();
    }
    let mut best = (0, 0);
    for i in (0..n).filter(|&i| inside[i] && !inside[(i + n - 1) % n]) {
        let len = (0..n).take_while(|&k| inside[(i + k) % n]).count();
        if len > best.1 {
            best = (i, len);
        }
    }
    let (i, len) = best;
    if len == 0 {
        return Vec::new();
    }
    // the vertex closing the run is the first point of the step after it
    (0..=len).map(|k| link[(i + k) % n].point).collect()
}

/// Chains of link vertices around every cusp vertex whose link crosses the
/// whole of `tets` (a fan together with its two toggles) in one run.
pub fn fan_chains(ct: &CuspTriangulation, developed: &DevelopedCusp, tets: &[usize]) -> Result<Vec<Vec<Complex64>>, CuspError> {
    let mut out = Vec::new();
    for star in ct.vertex_stars() {
        let Some(&(t, c)) = star.first() else { continue };
        if ct.cusp_of[t.id()] != developed.cusp {
            continue;
        }
        let link = vertex_link(developed, t, c)?;
        let chain = fan_chain(&link, tets);
        if chain.len() == tets.len() + 1 && chain.len() < link.len() {
            out.push(chain);
        }
    }
    Ok(out)
}

/// Convexity of the quadrilateral around one shared cusp edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EdgeConvexity {
    pub edge: CuspEdge,
    pub neighbour: CuspTriangle,
    pub convex: bool,
}

/// Convexity of every edge of the developed cusp, each edge once.
pub fn convexity_report(developed: &DevelopedCusp, tol: &Tolerances) -> Result<Vec<EdgeConvexity>, CuspError> {
    let mut out = Vec::new();
    for &(t, _) in &developed.positions {
        for corner in t.corners() {
            let g = developed.adjacency[t.tet][corner];
            let nb = CuspTriangle {
                tet: g.tet,
                vertex: g.perm.apply(t.vertex),
            };
            let key = (t, corner);
            let back = (nb, g.perm.apply(corner));
            if back < key {
                continue;
            }
            let edge = CuspEdge { triangle: t, corner };
            out.push(EdgeConvexity {
                edge,
                neighbour: nb,
                convex: quad_flip_geometric(developed, edge, tol)?,
            });
        }
    }
    Ok(out)
}

/// The three cusp edges flipped by a 2-3 move across face `face` of `tet`.
pub fn quads_for_face(tet: usize, face: usize) -> [CuspEdge; 3] {
    let verts: Vec<usize> = (0..4).filter(|&v| v != face).collect();
    [0, 1, 2].map(|k| CuspEdge {
        triangle: CuspTriangle {
            tet,
            vertex: verts[k],
        },
        corner: face,
    })
}
