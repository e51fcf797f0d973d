//! 2-3 and 3-2 moves, with shapes carried across exactly.
//!
//! Both moves replace a bipyramid. Its five ideal vertices are labelled
//! abstractly: the apexes `N` (0) and `S` (1), and the equator `E0, E1, E2`
//! (2, 3, 4). The two-tetrahedron side is `{N, E0, E1, E2}` and
//! `{S, E0, E1, E2}`; the three-tetrahedron side is `T_k = {N, S, E_{k+1},
//! E_{k+2}}`, labelled so that its vertices 0 and 1 are `N` and `S`. `T_k`
//! sits opposite the equatorial vertex `E_k`:
//!
//! ```text
//!             N
//!           / | \
//!         /   |   \
//!      E1 ----+---- E2        T_0 = N S E1 E2
//!        \  E0|    /          T_1 = N S E2 E0
//!          \  |  /            T_2 = N S E0 E1
//!             S
//! ```
//!
//! Shapes: `T_k`'s parameter at the new edge `NS` equals its parameter at
//! the opposite edge `E_{k+1}E_{k+2}`, which is the product of the two old
//! tetrahedra's parameters at that equatorial edge. With `z`, `w` the old
//! shapes labelled as in [`transfer_shapes_23`] this reads `r = z'w'`,
//! `u = wz''`, `v = zw''`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::edges::{param_on_edge, EDGE_VERTICES};
use crate::geometry::{
    classify_triangulation, gluing_equations, solve_complete_structure, GeometryError, Shape,
    ShapeAssignment, ShapeClass, Tolerances, TriClass,
};
use crate::perm::Perm4;
use crate::triangulation::{Gluing, Triangulation, TriangulationError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MoveError {
    #[error("face {face} of tetrahedron {tet} is glued to the same tetrahedron")]
    SameTetrahedron { tet: usize, face: usize },
    #[error("invalid move site: {0}")]
    InvalidSite(String),
    #[error("edge {edge} has degree {degree}, not 3")]
    WrongDegree { edge: usize, degree: usize },
    #[error("edge {0} meets some tetrahedron more than once")]
    RepeatedTetrahedron(usize),
    #[error("shape parameter is 0, 1 or infinite")]
    DegenerateInput,
    #[error("r·u·v = {0} is not 1")]
    InconsistentTriple(Complex64),
    #[error("transferred shapes leave a residual of {0:.3e}")]
    TransferResidual(f64),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum MoveSite {
    /// A 2-3 move across face `face` of tetrahedron `tet`.
    TwoThree { tet: usize, face: usize },
    /// A 3-2 move removing the degree-3 edge class `edge`.
    ThreeTwo { edge: usize },
}

impl std::fmt::Display for MoveSite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MoveSite::TwoThree { tet, face } => write!(f, "2-3 at face {face} of tet {tet}"),
            MoveSite::ThreeTwo { edge } => write!(f, "3-2 at edge {edge}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum MoveClass {
    Geometric,
    Flat,
    NegativelyOriented,
    Degenerate,
}

impl From<ShapeClass> for MoveClass {
    fn from(c: ShapeClass) -> Self {
        match c {
            ShapeClass::PositivelyOriented => MoveClass::Geometric,
            ShapeClass::Flat => MoveClass::Flat,
            ShapeClass::NegativelyOriented => MoveClass::NegativelyOriented,
            ShapeClass::Degenerate => MoveClass::Degenerate,
        }
    }
}

/// A retriangulated bipyramid: which old tetrahedra go, and how old and new
/// tetrahedra label the five abstract vertices.
#[derive(Clone, Debug)]
struct Region {
    old: Vec<usize>,
    old_abs: Vec<[usize; 4]>,
    new_abs: Vec<[usize; 4]>,
}

/// Outcome of a move: the new triangulation and where tetrahedra went.
#[derive(Clone, Debug)]
pub struct Moved {
    pub triangulation: Triangulation,
    /// New index of each old tetrahedron, `None` for removed ones.
    pub old_to_new: Vec<Option<usize>>,
    /// Indices of the tetrahedra created by the move.
    pub created: Vec<usize>,
    region: Region,
}

impl Moved {
    /// For a 2-3 move, the class of the new degree-3 edge.
    pub fn new_edge(&self) -> Option<usize> {
        (self.created.len() == 3).then(|| self.triangulation.edge_of(self.created[0], 0).0)
    }
}

fn face_set(abs: &[usize; 4], omit: usize) -> [usize; 3] {
    let mut out = [0; 3];
    let mut k = 0;
    for (i, &a) in abs.iter().enumerate() {
        if i != omit {
            out[k] = a;
            k += 1;
        }
    }
    out.sort_unstable();
    out
}

fn position(abs: &[usize; 4], vertex: usize) -> usize {
    abs.iter().position(|&a| a == vertex).expect("vertex in tetrahedron")
}

/// Map from the labels of a tetrahedron with abstract labels `from` to one
/// with labels `to`, sending the vertex opposite the shared face to the
/// vertex opposite it.
fn label_map(from: &[usize; 4], from_face: usize, to: &[usize; 4], to_face: usize) -> Perm4 {
    let mut images = [0u8; 4];
    for i in 0..4 {
        images[i] = if i == from_face {
            to_face as u8
        } else {
            position(to, from[i]) as u8
        };
    }
    Perm4::new(images).expect("bijection")
}

fn retriangulate(tri: &Triangulation, mut region: Region) -> Result<Moved, MoveError> {
    let n = tri.size();
    let mut old_to_new = vec![None; n];
    let mut next = 0;
    for (t, slot) in old_to_new.iter_mut().enumerate() {
        if !region.old.contains(&t) {
            *slot = Some(next);
            next += 1;
        }
    }
    let kept = next;
    let created: Vec<usize> = (kept..kept + region.new_abs.len()).collect();

    // boundary faces: old (region index, face) ↔ new (region index, face)
    let find_old_face = |set: [usize; 3], region: &Region| {
        for (i, abs) in region.old_abs.iter().enumerate() {
            for f in 0..4 {
                if face_set(abs, f) == set {
                    return Some((i, f));
                }
            }
        }
        None
    };

    // orient the new tetrahedra so every boundary relabelling is even
    for j in 0..region.new_abs.len() {
        for y in 0..4 {
            let set = face_set(&region.new_abs[j], y);
            if let Some((i, x)) = find_old_face(set, &region) {
                let phi = label_map(&region.old_abs[i], x, &region.new_abs[j], y);
                if phi.is_odd() {
                    region.new_abs[j].swap(2, 3);
                }
                break;
            }
        }
    }

    let placeholder = Gluing {
        tet: usize::MAX,
        perm: Perm4::IDENTITY,
    };
    let mut adj = vec![[placeholder; 4]; kept + region.new_abs.len()];
    for t in 0..n {
        if let Some(nt) = old_to_new[t] {
            for f in 0..4 {
                let g = tri.adjacent(t, f);
                if let Some(nd) = old_to_new[g.tet] {
                    adj[nt][f] = Gluing { tet: nd, perm: g.perm };
                }
            }
        }
    }

    // where each old boundary face now lives, and the relabelling onto it
    let new_home = |i: usize, x: usize, region: &Region| -> Option<(usize, usize, Perm4)> {
        let set = face_set(&region.old_abs[i], x);
        for (j, abs) in region.new_abs.iter().enumerate() {
            for y in 0..4 {
                if face_set(abs, y) == set {
                    return Some((j, y, label_map(&region.old_abs[i], x, abs, y)));
                }
            }
        }
        None
    };

    for j in 0..region.new_abs.len() {
        let nj = created[j];
        for y in 0..4 {
            let set = face_set(&region.new_abs[j], y);
            // internal face shared with another new tetrahedron
            let partner = region.new_abs.iter().enumerate().find_map(|(k, abs)| {
                (k != j).then(|| (0..4).find(|&z| face_set(abs, z) == set).map(|z| (k, z))).flatten()
            });
            if let Some((k, z)) = partner {
                adj[nj][y] = Gluing {
                    tet: created[k],
                    perm: label_map(&region.new_abs[j], y, &region.new_abs[k], z),
                };
                continue;
            }
            let (i, x) = find_old_face(set, &region)
                .ok_or_else(|| MoveError::InvalidSite("region boundary does not match".into()))?;
            let phi = label_map(&region.old_abs[i], x, &region.new_abs[j], y);
            let g = tri.adjacent(region.old[i], x);
            let target_face = g.perm.apply(x);
            let (tet, perm) = match old_to_new[g.tet] {
                Some(nt) => (nt, g.perm.compose(phi.inverse())),
                None => {
                    let i2 = region
                        .old
                        .iter()
                        .position(|&t| t == g.tet)
                        .expect("removed tetrahedra are in the region");
                    let (j2, _, phi2) = new_home(i2, target_face, &region).ok_or_else(|| {
                        MoveError::InvalidSite("bipyramid is glued to its own interior".into())
                    })?;
                    (created[j2], phi2.compose(g.perm).compose(phi.inverse()))
                }
            };
            adj[nj][y] = Gluing { tet, perm };
            // kept side of the pairing
            if tet < kept {
                adj[tet][perm.apply(y)] = Gluing {
                    tet: nj,
                    perm: perm.inverse(),
                };
            }
        }
    }

    let labels = tri.labels().map(|l| {
        let mut out: Vec<String> = (0..n).filter(|t| old_to_new[*t].is_some()).map(|t| l[t].clone()).collect();
        let base = l.len();
        out.extend((0..region.new_abs.len()).map(|k| format!("T{}", base + k)));
        out
    });
    let built = adj.clone();
    let triangulation = Triangulation::from_adjacency(adj, labels)?;
    if triangulation.adjacency() != built.as_slice() {
        return Err(MoveError::InvalidSite("move produced an inconsistent orientation".into()));
    }
    Ok(Moved {
        triangulation,
        old_to_new,
        created,
        region,
    })
}

fn two_three_region(tri: &Triangulation, tet: usize, face: usize) -> Result<Region, MoveError> {
    if tet >= tri.size() || face > 3 {
        return Err(MoveError::InvalidSite(format!("no face {face} on tetrahedron {tet}")));
    }
    let g = tri.adjacent(tet, face);
    if g.tet == tet {
        return Err(MoveError::SameTetrahedron { tet, face });
    }
    let eq: Vec<usize> = (0..4).filter(|&v| v != face).collect();
    let mut a = [0; 4];
    let mut b = [0; 4];
    a[face] = 0;
    b[g.perm.apply(face)] = 1;
    for (k, &v) in eq.iter().enumerate() {
        a[v] = 2 + k;
        b[g.perm.apply(v)] = 2 + k;
    }
    let new_abs = (0..3)
        .map(|k| [0, 1, 2 + (k + 1) % 3, 2 + (k + 2) % 3])
        .collect();
    Ok(Region {
        old: vec![tet, g.tet],
        old_abs: vec![a, b],
        new_abs,
    })
}

fn three_two_region(tri: &Triangulation, edge: usize) -> Result<Region, MoveError> {
    let class = tri
        .edges()
        .get(edge)
        .ok_or_else(|| MoveError::InvalidSite(format!("no edge class {edge}")))?;
    if class.degree() != 3 {
        return Err(MoveError::WrongDegree {
            edge,
            degree: class.degree(),
        });
    }
    let mut tets: Vec<usize> = class.incidences.iter().map(|i| i.tet).collect();
    tets.sort_unstable();
    tets.dedup();
    if tets.len() != 3 {
        return Err(MoveError::RepeatedTetrahedron(edge));
    }

    // walk around the edge starting from the first incidence
    let inc = class.incidences[0];
    let [u, v] = EDGE_VERTICES[inc.slot];
    let others: Vec<usize> = (0..4).filter(|&x| x != u && x != v).collect();
    let mut old = vec![inc.tet];
    let mut abs0 = [0; 4];
    abs0[u] = 0;
    abs0[v] = 1;
    abs0[others[0]] = 2;
    abs0[others[1]] = 3;
    let mut old_abs = vec![abs0];
    let (mut cur, mut cur_abs) = (inc.tet, abs0);
    // cross the face containing N, S, E(3) — opposite abstract vertex 2
    let mut across = 2;
    for step in 0..2 {
        let f = position(&cur_abs, across);
        let g = tri.adjacent(cur, f);
        let mut nxt = [usize::MAX; 4];
        for x in 0..4 {
            if x != f {
                nxt[g.perm.apply(x)] = cur_abs[x];
            }
        }
        let fresh = if step == 0 { 4 } else { 2 };
        nxt[g.perm.apply(f)] = fresh;
        across = cur_abs
            .iter()
            .copied()
            .find(|&a| a >= 2 && a != across)
            .expect("two equatorial vertices");
        cur = g.tet;
        cur_abs = nxt;
        old.push(cur);
        old_abs.push(cur_abs);
    }
    // closing the loop must return to the first tetrahedron consistently
    let f = position(&cur_abs, across);
    let g = tri.adjacent(cur, f);
    let consistent = g.tet == old[0]
        && (0..4)
            .filter(|&x| x != f)
            .all(|x| old_abs[0][g.perm.apply(x)] == cur_abs[x]);
    let mut dedup = old.clone();
    dedup.sort_unstable();
    dedup.dedup();
    if !consistent || dedup.len() != 3 {
        return Err(MoveError::InvalidSite(format!("edge {edge} is not embedded")));
    }
    Ok(Region {
        old,
        old_abs,
        new_abs: vec![[0, 2, 3, 4], [1, 2, 3, 4]],
    })
}

pub fn two_three(tri: &Triangulation, tet: usize, face: usize) -> Result<Moved, MoveError> {
    retriangulate(tri, two_three_region(tri, tet, face)?)
}

pub fn three_two(tri: &Triangulation, edge: usize) -> Result<Moved, MoveError> {
    retriangulate(tri, three_two_region(tri, edge)?)
}

/// Performs the move at `site`.
pub fn apply_move(tri: &Triangulation, site: MoveSite) -> Result<Moved, MoveError> {
    match site {
        MoveSite::TwoThree { tet, face } => two_three(tri, tet, face),
        MoveSite::ThreeTwo { edge } => three_two(tri, edge),
    }
}

/// All 2-3 sites (one per face pairing between distinct tetrahedra, named
/// from the lower (tet, face) side) followed by all 3-2 sites.
pub fn move_sites(tri: &Triangulation) -> Vec<MoveSite> {
    let mut out = Vec::new();
    for t in 0..tri.size() {
        for f in 0..4 {
            let g = tri.adjacent(t, f);
            if g.tet != t && (t, f) < (g.tet, g.perm.apply(f)) {
                out.push(MoveSite::TwoThree { tet: t, face: f });
            }
        }
    }
    for e in tri.edges() {
        if three_two_region(tri, e.id).is_ok() {
            out.push(MoveSite::ThreeTwo { edge: e.id });
        }
    }
    out
}

fn check_shape(z: Complex64) -> Result<(), MoveError> {
    let near = z.norm().min((z - 1.0).norm()).min(1.0 / z.norm());
    if !near.is_finite() || near < 1e-300 {
        return Err(MoveError::DegenerateInput);
    }
    Ok(())
}

/// Shapes of the three new tetrahedra from the two old ones:
/// `r = z'w'`, `u = wz''`, `v = zw''`. Here the face being removed has
/// equatorial edges carrying `(z', z'', z)` in the first tetrahedron and
/// `(w', w, w'')` in the second.
pub fn transfer_shapes_23(z: Shape, w: Shape) -> Result<(Shape, Shape, Shape), MoveError> {
    check_shape(z.z)?;
    check_shape(w.z)?;
    Ok((
        Shape::new(z.prime() * w.prime()),
        Shape::new(w.z * z.double_prime()),
        Shape::new(z.z * w.double_prime()),
    ))
}

/// Inverse of [`transfer_shapes_23`]: `z = r''u'` and `w = r''v'`.
pub fn transfer_shapes_32(r: Shape, u: Shape, v: Shape, tol: &Tolerances) -> Result<(Shape, Shape), MoveError> {
    for s in [r, u, v] {
        check_shape(s.z)?;
    }
    let product = r.z * u.z * v.z;
    if (product - 1.0).norm() > tol.eps_res.max(1e-12) * 10.0 {
        return Err(MoveError::InconsistentTriple(product));
    }
    Ok((
        Shape::new(r.double_prime() * u.prime()),
        Shape::new(r.double_prime() * v.prime()),
    ))
}

/// Logs of the new tetrahedra. An edge met by just one new tetrahedron
/// keeps its total angle, which pins that parameter as a sum of old logs;
/// the rest follow from `z' = 1/(1 - z)` with the 2πi branch chosen so
/// every other boundary edge also keeps its angle.
fn transfer_logs(region: &Region, old_logs: &[[Complex64; 3]]) -> Result<Vec<[Complex64; 3]>, MoveError> {
    let edge_total = |a: usize, b: usize, tets: &[[usize; 4]], logs: &[[Complex64; 3]]| {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut count = 0;
        for (abs, l) in tets.iter().zip(logs) {
            if abs.contains(&a) && abs.contains(&b) {
                sum += l[param_on_edge(position(abs, a), position(abs, b))];
                count += 1;
            }
        }
        (sum, count)
    };

    let m = region.new_abs.len();
    let mut pinned: Vec<[Option<Complex64>; 3]> = vec![[None; 3]; m];
    for (j, abs) in region.new_abs.iter().enumerate() {
        for x in 0..4 {
            for y in x + 1..4 {
                let (a, b) = (abs[x], abs[y]);
                let holders = region.new_abs.iter().filter(|t| t.contains(&a) && t.contains(&b)).count();
                let (old_sum, old_count) = edge_total(a, b, &region.old_abs, old_logs);
                if holders == 1 && old_count > 0 {
                    pinned[j][param_on_edge(x, y)] = Some(old_sum);
                }
            }
        }
    }

    // (pinned parameter, logs, whether the 2πi branch is still free)
    let mut base = Vec::with_capacity(m);
    for p in &pinned {
        if let [Some(a), Some(b), Some(c)] = *p {
            base.push((0, [a, b, c], false));
            continue;
        }
        let k = p.iter().position(Option::is_some).ok_or_else(|| {
            MoveError::InvalidSite("new tetrahedron has no determined parameter".into())
        })?;
        let lk = p[k].expect("pinned");
        let l1 = -(1.0 - lk.exp()).ln();
        let mut logs = [Complex64::new(0.0, 0.0); 3];
        logs[k] = lk;
        logs[(k + 1) % 3] = l1;
        logs[(k + 2) % 3] = Complex64::new(0.0, PI) - lk - l1;
        base.push((k, logs, true));
    }

    // boundary edges held by several new tetrahedra: their angle sums must match
    let mut constraints = Vec::new();
    for a in 0..5 {
        for b in a + 1..5 {
            let holders = region.new_abs.iter().filter(|t| t.contains(&a) && t.contains(&b)).count();
            let (old_sum, old_count) = edge_total(a, b, &region.old_abs, old_logs);
            if holders > 1 && old_count > 0 {
                constraints.push((a, b, old_sum));
            }
        }
    }
    let violation = |logs: &[[Complex64; 3]]| {
        constraints
            .iter()
            .map(|&(a, b, target)| (edge_total(a, b, &region.new_abs, logs).0 - target).norm())
            .fold(0.0, f64::max)
    };

    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let free = base.iter().filter(|b| b.2).count();
    let mut best: Option<(f64, Vec<[Complex64; 3]>)> = None;
    for code in 0..3usize.pow(free as u32) {
        let mut c = code;
        let logs: Vec<[Complex64; 3]> = base
            .iter()
            .map(|&(k, l, is_free)| {
                let mut out = l;
                if is_free {
                    let shift = (c % 3) as f64 - 1.0;
                    c /= 3;
                    out[(k + 1) % 3] += two_pi_i * shift;
                    out[(k + 2) % 3] -= two_pi_i * shift;
                }
                out
            })
            .collect();
        let v = violation(&logs);
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, logs));
        }
    }
    Ok(best.expect("at least one branch").1)
}

/// Carries a shape assignment across a move.
pub fn transfer(moved: &Moved, sol: &ShapeAssignment) -> Result<ShapeAssignment, MoveError> {
    let region = &moved.region;
    let old_logs: Vec<[Complex64; 3]> = region.old.iter().map(|&t| sol.logs[t]).collect();
    for &t in &region.old {
        check_shape(sol.shapes[t].z)?;
    }
    let new_logs = transfer_logs(region, &old_logs)?;
    let n = moved.triangulation.size();
    let mut shapes = vec![Shape::regular(); n];
    let mut logs = vec![[Complex64::new(0.0, 0.0); 3]; n];
    for (t, slot) in moved.old_to_new.iter().enumerate() {
        if let Some(nt) = slot {
            shapes[*nt] = sol.shapes[t];
            logs[*nt] = sol.logs[t];
        }
    }
    for (k, &nt) in moved.created.iter().enumerate() {
        logs[nt] = new_logs[k];
        shapes[nt] = Shape::new(new_logs[k][0].exp());
    }
    Ok(ShapeAssignment {
        shapes,
        logs,
        residual: f64::INFINITY,
        converged: false,
        iterations: 0,
    })
}

#[derive(Clone, Debug)]
pub struct MoveResult {
    pub site: MoveSite,
    pub moved: Moved,
    /// Shapes carried across the move.
    pub shapes: ShapeAssignment,
    pub move_class: MoveClass,
    /// Classification of the resulting triangulation under the carried shapes.
    pub tri_class: TriClass,
    /// Whether a Newton solve seeded with the carried shapes stays on them.
    pub newton_agrees: bool,
}

impl MoveResult {
    pub fn triangulation(&self) -> &Triangulation {
        &self.moved.triangulation
    }

    /// Shapes of the newly created tetrahedra.
    pub fn new_shapes(&self) -> Vec<Shape> {
        self.moved.created.iter().map(|&t| self.shapes.shapes[t]).collect()
    }
}

/// Performs the move at `site`, carries `sol` across and classifies the
/// result by its worst new shape.
pub fn classify_move(
    tri: &Triangulation,
    sol: &ShapeAssignment,
    site: MoveSite,
    tol: &Tolerances,
) -> Result<MoveResult, MoveError> {
    let moved = apply_move(tri, site)?;
    let mut shapes = transfer(&moved, sol)?;
    let sys = gluing_equations(&moved.triangulation)?;
    let residual = sys.branch_residual(&shapes.logs);
    // a carried solution is as good as the one it came from
    let allowed = tol.eps_res.max(sol.residual * 10.0);
    if residual.is_nan() || residual > allowed {
        return Err(MoveError::TransferResidual(residual));
    }
    shapes.residual = residual;
    shapes.converged = sol.converged;

    let worst = moved
        .created
        .iter()
        .map(|&t| shapes.shapes[t].classify(tol))
        .max_by_key(|c| c.severity())
        .expect("moves create tetrahedra");
    let tri_class = classify_triangulation(&moved.triangulation, &shapes, tol);

    let newton_agrees = match solve_complete_structure(&moved.triangulation, Some(&shapes), tol) {
        Ok(re) => re
            .shapes
            .iter()
            .zip(&shapes.shapes)
            .all(|(a, b)| (a.z - b.z).norm() <= 1e-8 * (1.0 + b.z.norm())),
        Err(_) => false,
    };

    Ok(MoveResult {
        site,
        moved,
        shapes,
        move_class: worst.into(),
        tri_class,
        newton_agrees,
    })
}
