//! Isolation checks, flip-graph search and the re-geometrization search.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{
    classify_triangulation, solve_complete_structure, volume, GeometryError, ShapeAssignment,
    ShapeClass, Tolerances, TriClass,
};
use crate::monodromy::{build, CyclicWord, Letter};
use crate::moves::{classify_move, move_sites, MoveClass, MoveError, MoveResult, MoveSite};
use crate::signature::{canonical_signature, is_isomorphic};
use crate::triangulation::{Triangulation, TriangulationError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExplorerError {
    #[error("no move sequence found: {0}")]
    SequenceNotFound(String),
    #[error("word {0} is not of the form L^a R^b")]
    UnsupportedWord(String),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
}

/// Every 2-3 and 3-2 site, 2-3 sites first.
pub fn enumerate_moves(tri: &Triangulation) -> Vec<MoveSite> {
    move_sites(tri)
}

/// Solves for the complete structure and classifies, folding solver
/// failure into [`TriClass::SolverFailed`].
pub fn solve_and_classify(tri: &Triangulation, tol: &Tolerances) -> (TriClass, Option<ShapeAssignment>) {
    match solve_complete_structure(tri, None, tol) {
        Ok(sol) => (classify_triangulation(tri, &sol, tol), Some(sol)),
        Err(GeometryError::SolverFailed { best }) => (TriClass::SolverFailed, Some(*best)),
        Err(_) => (TriClass::SolverFailed, None),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SiteReport {
    pub site: MoveSite,
    pub move_class: Option<MoveClass>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IsolationReport {
    pub signature: String,
    pub tetrahedra: usize,
    pub class: TriClass,
    pub is_geometric: bool,
    pub volume: Option<f64>,
    pub sites: Vec<SiteReport>,
    pub is_isolated: bool,
    pub reason: Option<String>,
}

/// Geometric, and no 2-3 or 3-2 move keeps it geometric.
pub fn is_isolated(tri: &Triangulation, tol: &Tolerances) -> IsolationReport {
    let (class, sol) = solve_and_classify(tri, tol);
    let mut report = IsolationReport {
        signature: canonical_signature(tri),
        tetrahedra: tri.size(),
        class,
        is_geometric: class == TriClass::Geometric,
        volume: None,
        sites: Vec::new(),
        is_isolated: false,
        reason: None,
    };
    let Some(sol) = sol.filter(|_| class == TriClass::Geometric) else {
        report.reason = Some(format!("input is not geometric ({class:?})"));
        return report;
    };
    report.volume = Some(volume(&sol));
    let mut any_geometric = false;
    let mut any_error = false;
    for site in enumerate_moves(tri) {
        match classify_move(tri, &sol, site, tol) {
            Ok(r) => {
                any_geometric |= r.move_class == MoveClass::Geometric;
                report.sites.push(SiteReport {
                    site,
                    move_class: Some(r.move_class),
                    error: None,
                });
            }
            Err(e) => {
                any_error = true;
                report.sites.push(SiteReport {
                    site,
                    move_class: None,
                    error: Some(e.to_string()),
                });
            }
        }
    }
    report.is_isolated = !any_geometric && !any_error;
    if any_geometric {
        report.reason = Some("a move keeps the triangulation geometric".into());
    } else if any_error {
        report.reason = Some("some move could not be classified".into());
    }
    report
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Filter {
    All,
    Essential,
    Geometric,
}

impl Filter {
    pub fn admits(self, class: TriClass) -> bool {
        match self {
            Filter::All => true,
            Filter::Essential => class.is_essential(),
            Filter::Geometric => class == TriClass::Geometric,
        }
    }
}

impl std::str::FromStr for Filter {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(Filter::All),
            "essential" => Ok(Filter::Essential),
            "geometric" => Ok(Filter::Geometric),
            other => Err(format!("unknown filter {other:?}")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Node {
    pub class: TriClass,
    pub tetrahedra: usize,
    /// The labelling under which the node was first reached.
    pub representative: Triangulation,
    pub shapes: Option<ShapeAssignment>,
    pub depth: usize,
}

/// A move between two nodes; `site` refers to the representative of `from`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Arc {
    pub from: String,
    pub to: String,
    pub site: MoveSite,
}

#[derive(Clone, Debug)]
pub struct FlipGraph {
    pub start: String,
    pub nodes: BTreeMap<String, Node>,
    pub arcs: Vec<Arc>,
    pub filter: Filter,
    pub depth: usize,
    /// False when the node budget cut the search short.
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct Budget {
    pub depth: usize,
    pub max_nodes: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            depth: 4,
            max_nodes: 10_000,
        }
    }
}

impl FlipGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn signatures_with(&self, class: TriClass) -> BTreeSet<String> {
        self.nodes
            .iter()
            .filter(|(_, n)| n.class == class)
            .map(|(s, _)| s.clone())
            .collect()
    }

    /// Graphviz rendering with nodes coloured by class.
    pub fn to_dot(&self) -> String {
        let mut ids = BTreeMap::new();
        let mut out = String::from("graph flips {\n  node [style=filled];\n");
        for (i, (sig, node)) in self.nodes.iter().enumerate() {
            ids.insert(sig.clone(), i);
            let colour = match node.class {
                TriClass::Geometric => "palegreen",
                TriClass::EssentialNotGeometric => "lightgoldenrod",
                TriClass::NotEssential => "lightcoral",
                TriClass::SolverFailed => "gray",
            };
            let shape = if *sig == self.start { "doublecircle" } else { "ellipse" };
            let _ = writeln!(
                out,
                "  n{i} [label=\"{sig}\\n{}\", fillcolor={colour}, shape={shape}];",
                node.tetrahedra
            );
        }
        let mut seen = BTreeSet::new();
        for arc in &self.arcs {
            let (a, b) = (ids[&arc.from], ids[&arc.to]);
            if seen.insert((a.min(b), a.max(b))) {
                let _ = writeln!(out, "  n{a} -- n{b};");
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Breadth-first search over 2-3 and 3-2 moves from `start`, keeping the
/// nodes admitted by `filter`. Shapes are carried across each move; a node
/// is classified once, by the first path that reaches it.
pub fn explore(start: &Triangulation, filter: Filter, budget: &Budget, tol: &Tolerances) -> FlipGraph {
    let start_sig = canonical_signature(start);
    let (class, shapes) = solve_and_classify(start, tol);
    let mut graph = FlipGraph {
        start: start_sig.clone(),
        nodes: BTreeMap::new(),
        arcs: Vec::new(),
        filter,
        depth: budget.depth,
        complete: true,
    };
    graph.nodes.insert(
        start_sig.clone(),
        Node {
            class,
            tetrahedra: start.size(),
            representative: start.clone(),
            shapes,
            depth: 0,
        },
    );
    let mut queue = VecDeque::from([start_sig]);
    while let Some(sig) = queue.pop_front() {
        let node = &graph.nodes[&sig];
        if node.depth >= budget.depth || !filter.admits(node.class) {
            continue;
        }
        let (tri, shapes, depth) = (node.representative.clone(), node.shapes.clone(), node.depth);
        for site in enumerate_moves(&tri) {
            let Some((child, child_class, child_shapes, inverse)) = step(&tri, shapes.as_ref(), site, tol) else {
                continue;
            };
            if !filter.admits(child_class) {
                continue;
            }
            let child_sig = canonical_signature(&child);
            if !graph.nodes.contains_key(&child_sig) {
                if graph.nodes.len() >= budget.max_nodes {
                    graph.complete = false;
                    return graph;
                }
                graph.nodes.insert(
                    child_sig.clone(),
                    Node {
                        class: child_class,
                        tetrahedra: child.size(),
                        representative: child,
                        shapes: child_shapes,
                        depth: depth + 1,
                    },
                );
                if let Some(inv) = inverse {
                    graph.arcs.push(Arc {
                        from: child_sig.clone(),
                        to: sig.clone(),
                        site: inv,
                    });
                }
                queue.push_back(child_sig.clone());
            }
            graph.arcs.push(Arc {
                from: sig.clone(),
                to: child_sig,
                site,
            });
        }
    }
    graph
}

/// One move with classification: carried shapes when the parent has a
/// usable solution, otherwise a fresh solve.
#[allow(clippy::type_complexity)]
fn step(
    tri: &Triangulation,
    shapes: Option<&ShapeAssignment>,
    site: MoveSite,
    tol: &Tolerances,
) -> Option<(Triangulation, TriClass, Option<ShapeAssignment>, Option<MoveSite>)> {
    if let Some(sol) = shapes.filter(|s| s.converged) {
        if let Ok(r) = classify_move(tri, sol, site, tol) {
            let inverse = inverse_site(&r);
            return Some((r.moved.triangulation, r.tri_class, Some(r.shapes), inverse));
        }
    }
    let moved = crate::moves::apply_move(tri, site).ok()?;
    let (class, sol) = solve_and_classify(&moved.triangulation, tol);
    let inverse = inverse_of(&moved, site);
    Some((moved.triangulation, class, sol, inverse))
}

fn inverse_of(moved: &crate::moves::Moved, site: MoveSite) -> Option<MoveSite> {
    match site {
        MoveSite::TwoThree { .. } => moved.new_edge().map(|edge| MoveSite::ThreeTwo { edge }),
        // the two new tetrahedra share the face opposite vertex 0 of the first
        MoveSite::ThreeTwo { .. } => Some(MoveSite::TwoThree {
            tet: moved.created[0],
            face: 0,
        }),
    }
}

fn inverse_site(r: &MoveResult) -> Option<MoveSite> {
    inverse_of(&r.moved, r.site)
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditedMove {
    pub site: MoveSite,
    pub move_class: MoveClass,
    pub tri_class: TriClass,
    pub new_flat: usize,
    pub tetrahedra: usize,
}

#[derive(Clone, Debug)]
pub struct Regeometrization {
    pub start: Triangulation,
    pub start_volume: f64,
    pub result: Triangulation,
    pub shapes: ShapeAssignment,
    pub volume: f64,
    pub moves: Vec<AuditedMove>,
    /// Tetrahedra the search was allowed to start from.
    pub window: Vec<usize>,
    pub fan: Letter,
}

fn touches(tri: &Triangulation, site: MoveSite, window: &BTreeSet<usize>) -> bool {
    match site {
        MoveSite::TwoThree { tet, face } => {
            window.contains(&tet) || window.contains(&tri.adjacent(tet, face).tet)
        }
        MoveSite::ThreeTwo { edge } => tri.edges()[edge]
            .incidences
            .iter()
            .any(|i| window.contains(&i.tet)),
    }
}

fn carry_window(r: &MoveResult, window: &BTreeSet<usize>) -> BTreeSet<usize> {
    let mut out: BTreeSet<usize> = window
        .iter()
        .filter_map(|&t| r.moved.old_to_new[t])
        .collect();
    out.extend(r.moved.created.iter().copied());
    out
}

fn audit(r: &MoveResult, tol: &Tolerances) -> AuditedMove {
    AuditedMove {
        site: r.site,
        move_class: r.move_class,
        tri_class: r.tri_class,
        new_flat: r
            .new_shapes()
            .iter()
            .filter(|s| s.classify(tol) == ShapeClass::Flat)
            .count(),
        tetrahedra: r.triangulation().size(),
    }
}

/// Searches for a 2-3, 2-3, 3-2 sequence starting near the middle of one
/// fan that turns the monodromy triangulation into a different geometric
/// triangulation with one more tetrahedron.
fn search(
    start: &Triangulation,
    sol: &ShapeAssignment,
    window: &BTreeSet<usize>,
    tol: &Tolerances,
) -> Option<(Vec<MoveResult>, ShapeAssignment)> {
    let target = start.size() + 1;
    for s1 in move_sites(start) {
        if !matches!(s1, MoveSite::TwoThree { .. }) || !touches(start, s1, window) {
            continue;
        }
        let Ok(r1) = classify_move(start, sol, s1, tol) else { continue };
        let flat = r1.new_shapes().iter().filter(|s| s.classify(tol) == ShapeClass::Flat).count();
        if r1.move_class != MoveClass::Flat || flat != 1 || !r1.tri_class.is_essential() {
            continue;
        }
        let w1 = carry_window(&r1, window);
        let t1 = r1.triangulation().clone();
        for s2 in move_sites(&t1) {
            if !matches!(s2, MoveSite::TwoThree { .. }) || !touches(&t1, s2, &w1) {
                continue;
            }
            let Ok(r2) = classify_move(&t1, &r1.shapes, s2, tol) else { continue };
            if !r2.tri_class.is_essential() {
                continue;
            }
            let w2 = carry_window(&r2, &w1);
            let t2 = r2.triangulation().clone();
            for s3 in move_sites(&t2) {
                if !matches!(s3, MoveSite::ThreeTwo { .. }) || !touches(&t2, s3, &w2) {
                    continue;
                }
                let Ok(r3) = classify_move(&t2, &r2.shapes, s3, tol) else { continue };
                if r3.tri_class == TriClass::Geometric
                    && r3.triangulation().size() == target
                    && !is_isomorphic(r3.triangulation(), start)
                {
                    let shapes = r3.shapes.clone();
                    return Some((vec![r1, r2, r3], shapes));
                }
            }
        }
    }
    None
}

/// The middle three tetrahedra of the `letter` run of a two-run word.
fn fan_window(word: &CyclicWord, letter: Letter) -> Result<Vec<usize>, ExplorerError> {
    let letters = word.letters();
    let n = letters.len();
    let runs = word.exponent_form();
    if runs.len() != 2 {
        return Err(ExplorerError::UnsupportedWord(word.to_exponent_string()));
    }
    let len = runs
        .iter()
        .find(|(l, _)| *l == letter)
        .map(|&(_, e)| e)
        .expect("both letters occur");
    // first position of the run: a letter preceded by the other letter
    let begin = (0..n)
        .find(|&i| letters[i] == letter && letters[(i + n - 1) % n] != letter)
        .expect("run start");
    let half = len / 2;
    // t_half, t_{half+1}, t_{half+2} counting the run from 1
    Ok((0..3).map(|k| (begin + half - 1 + k) % n).collect())
}

/// Runs the three-move re-geometrization on the fan of `letter`. The
/// search starts at the middle tetrahedra of the fan; if nothing is found
/// there it widens to the whole run, then to every tetrahedron.
pub fn regeometrize_fan(word: &CyclicWord, letter: Letter, tol: &Tolerances) -> Result<Regeometrization, ExplorerError> {
    let start = build(word)?;
    let sol = solve_complete_structure(&start, None, tol)?;
    if classify_triangulation(&start, &sol, tol) != TriClass::Geometric {
        return Err(ExplorerError::SequenceNotFound("start is not geometric".into()));
    }
    let middle = fan_window(word, letter)?;
    let run: Vec<usize> = {
        let letters = word.letters();
        let n = letters.len();
        (0..n).filter(|&i| letters[i] == letter || letters[(i + n - 1) % n] == letter).collect()
    };
    let all: Vec<usize> = (0..start.size()).collect();
    for window in [middle, run, all] {
        let set: BTreeSet<usize> = window.iter().copied().collect();
        if let Some((moves, shapes)) = search(&start, &sol, &set, tol) {
            let result = moves.last().expect("three moves").triangulation().clone();
            return Ok(Regeometrization {
                start_volume: volume(&sol),
                volume: volume(&shapes),
                moves: moves.iter().map(|m| audit(m, tol)).collect(),
                start,
                result,
                shapes,
                window,
                fan: letter,
            });
        }
    }
    Err(ExplorerError::SequenceNotFound(format!(
        "no 2-3, 2-3, 3-2 sequence re-geometrizes {}",
        word.to_exponent_string()
    )))
}

/// [`regeometrize_fan`] on the L fan.
pub fn regeometrize(word: &CyclicWord, tol: &Tolerances) -> Result<Regeometrization, ExplorerError> {
    regeometrize_fan(word, Letter::L, tol)
}
