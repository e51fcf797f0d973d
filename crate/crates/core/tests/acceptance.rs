//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.
//!
//! Reference volumes were computed independently with SnapPy
//! (`Manifold('b++<word>').volume()` and the two signatures directly).

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use flipgraph::cli::REFERENCE_L4R6_TABLE;
use flipgraph::cusp::{cusp_triangulation, develop_cusp, quad_flip_geometric, quads_for_face, CuspTriangle};
use flipgraph::explorer::{is_isolated, regeometrize};
use flipgraph::geometry::{
    finite_difference_jacobian, gluing_equations, solve_complete_structure, volume, ShapeAssignment, Tolerances,
};
use flipgraph::isosig::decode;
use flipgraph::monodromy::{build, fan_decomposition, gluing_table, parse_word, CyclicWord, Letter};
use flipgraph::moves::{
    apply_move, classify_move, move_sites, transfer_shapes_23, MoveClass, MoveSite,
};
use flipgraph::{is_isomorphic, ShapeClass, TriClass, Triangulation};

const SNAPPY_VOLUMES: [(&str, f64); 14] = [
    ("R^2L^2", 3.6638623767088765),
    ("R^2L^4", 4.46465891154868),
    ("R^2L^6", 4.745944843324717),
    ("R^4L^2", 4.46465891154868),
    ("R^4L^4", 5.573609112831138),
    ("R^4L^6", 5.958120836632299),
    ("R^6L^2", 4.745944843324716),
    ("R^6L^4", 5.958120836632297),
    ("R^6L^6", 6.3913914547854445),
    ("R^2L^3", 4.177751073189783),
    ("R^3L^2", 4.177751073189783),
    ("RL^2", 2.6667447834490603),
    ("L^4R^4", 5.573609112831137),
    ("L^4R^6", 5.958120836632298),
];
const FIGURE_EIGHT_VOLUME: f64 = 2.029883212819307;
const FIVE_TET_SIGNATURES: [&str; 2] = ["fLLQcacdedejbqqww", "fLLQccecddehqrwwn"];

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Duration, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tri_of(word: &str) -> Triangulation {
    build(&parse_word(word).unwrap()).unwrap()
}

fn oracle(word: &str) -> f64 {
    SNAPPY_VOLUMES.iter().find(|(w, _)| *w == word).unwrap().1
}

fn table_reproduction() -> Outcome {
    let table = gluing_table(&tri_of("L^4R^6"));
    ensure(table.len() == 10, || format!("{} rows", table.len()))?;
    let mut matched = 0;
    for (t, (row, want)) in table.iter().zip(REFERENCE_L4R6_TABLE).enumerate() {
        for k in 0..4 {
            ensure(row[k] == want[k], || format!("tet {t} face {k}: {} != {}", row[k], want[k]))?;
            matched += 1;
        }
    }
    Ok(format!("{matched}/40 gluings match"))
}

fn even_exponents_isolated(tol: &Tolerances) -> Outcome {
    for n in 1..=3 {
        for m in 1..=3 {
            let word = format!("R^{}L^{}", 2 * n, 2 * m);
            let report = is_isolated(&tri_of(&word), tol);
            ensure(report.is_geometric, || format!("{word} not geometric"))?;
            ensure(report.is_isolated, || format!("{word}: {:?}", report.reason))?;
            let three_two = report.sites.iter().filter(|s| matches!(s.site, MoveSite::ThreeTwo { .. })).count();
            ensure(three_two == 0, || format!("{word} has {three_two} 3-2 sites"))?;
            ensure(
                report.sites.iter().all(|s| s.move_class.is_some_and(|c| c != MoveClass::Geometric)),
                || format!("{word} has a geometric or unclassified site"),
            )?;
            let v = report.volume.unwrap();
            ensure((v - oracle(&word)).abs() <= 1e-9, || format!("{word} volume {v}"))?;
        }
    }
    Ok("9 words geometric and isolated, volumes match SnapPy".into())
}

fn odd_exponent_contrast(tol: &Tolerances) -> Outcome {
    let mut counts = Vec::new();
    for word in ["R^2L^3", "R^3L^2", "RL^2"] {
        let report = is_isolated(&tri_of(word), tol);
        ensure(report.is_geometric, || format!("{word} not geometric"))?;
        let v = report.volume.unwrap();
        ensure((v - oracle(word)).abs() <= 1e-9, || format!("{word} volume {v}"))?;
        let g = report
            .sites
            .iter()
            .filter(|s| s.move_class == Some(MoveClass::Geometric))
            .count();
        ensure(g > 0, || format!("{word} has no geometric 2-3 site"))?;
        counts.push(format!("{word}:{g}"));
    }
    Ok(format!("geometric sites {}", counts.join(" ")))
}

fn regeometrization(tol: &Tolerances) -> Outcome {
    let mut notes = Vec::new();
    for w in ["L^4R^4", "L^4R^6"] {
        let started = Instant::now();
        let word = parse_word(w).unwrap();
        let r = regeometrize(&word, tol).map_err(|e| format!("{w}: {e}"))?;
        let first = r.moves.first().ok_or_else(|| format!("{w}: no moves"))?;
        ensure(first.move_class == MoveClass::Flat && first.new_flat == 1, || {
            format!("{w}: first move {:?} with {} flat", first.move_class, first.new_flat)
        })?;
        ensure(r.moves.last().unwrap().tri_class == TriClass::Geometric, || format!("{w}: final not geometric"))?;
        // independent re-solve of the final triangulation
        let sol = solve_complete_structure(&r.result, None, tol).map_err(|e| format!("{w}: {e}"))?;
        ensure(sol.classes(tol).iter().all(|&c| c == ShapeClass::PositivelyOriented), || {
            format!("{w}: re-solved result is not geometric")
        })?;
        ensure(r.result.size() == word.size() + 1, || format!("{w}: {} tetrahedra", r.result.size()))?;
        ensure(!is_isomorphic(&r.start, &r.result), || format!("{w}: result isomorphic to start"))?;
        let gap = (volume(&sol) - r.start_volume).abs();
        ensure(gap <= 1e-8, || format!("{w}: volume gap {gap:e}"))?;
        ensure((r.start_volume - oracle(w)).abs() <= 1e-9, || format!("{w}: start volume"))?;
        ensure(started.elapsed() < Duration::from_secs(60), || format!("{w}: too slow"))?;
        notes.push(format!("{w}: {} moves -> {} tets, gap {gap:.1e}", r.moves.len(), r.result.size()));
    }
    Ok(notes.join("; "))
}

fn figure_eight_signatures(tol: &Tolerances) -> Outcome {
    let mut tris = Vec::new();
    for sig in FIVE_TET_SIGNATURES {
        let tri = decode(sig).map_err(|e| format!("{sig}: {e}"))?;
        let report = is_isolated(&tri, tol);
        ensure(report.class == TriClass::Geometric, || format!("{sig}: {:?}", report.class))?;
        ensure(report.is_isolated, || format!("{sig}: {:?}", report.reason))?;
        let v = report.volume.unwrap();
        ensure((v - FIGURE_EIGHT_VOLUME).abs() <= 1e-9, || format!("{sig}: volume {v}"))?;
        tris.push(tri);
    }
    ensure(!is_isomorphic(&tris[0], &tris[1]), || "the two signatures are isomorphic".into())?;
    let rl = tri_of("RL");
    for (sig, t) in FIVE_TET_SIGNATURES.iter().zip(&tris) {
        ensure(!is_isomorphic(t, &rl), || format!("{sig} is isomorphic to build(RL)"))?;
    }
    Ok("both decode, geometric, isolated, pairwise distinct".into())
}

/// Every cyclic word over {L, R} using both letters with 2 ≤ length ≤ `max`,
/// one per rotation class.
fn all_words(max: usize) -> Vec<CyclicWord> {
    let mut out = Vec::new();
    for n in 2..=max {
        for mask in 1u32..(1 << n) - 1 {
            let rot = |k: usize| ((mask >> k) | (mask << (n - k))) & ((1 << n) - 1);
            if (1..n).all(|k| rot(k) >= mask) {
                let letters = (0..n)
                    .map(|i| if mask >> i & 1 == 1 { Letter::R } else { Letter::L })
                    .collect();
                out.push(CyclicWord::new(letters).unwrap());
            }
        }
    }
    out
}

/// Corner angles of a developed triangle, sorted.
fn angle_triple(p: &[Complex64; 4], t: CuspTriangle) -> [f64; 3] {
    let [a, b, c] = t.corners();
    let angle = |x: usize, y: usize, z: usize| ((p[y] - p[x]) / (p[z] - p[x])).arg().abs();
    let mut out = [angle(a, b, c), angle(b, c, a), angle(c, a, b)];
    out.sort_by(f64::total_cmp);
    out
}

/// Groups the cusp triangles of the tetrahedra in `tets` into connected
/// pieces and returns each piece's sorted list of angle triples.
fn fan_pieces(
    ct: &flipgraph::cusp::CuspTriangulation,
    positions: &BTreeMap<CuspTriangle, [Complex64; 4]>,
    tets: &[usize],
) -> Vec<Vec<[f64; 3]>> {
    let members: Vec<CuspTriangle> = positions.keys().copied().filter(|t| tets.contains(&t.tet)).collect();
    let mut piece: BTreeMap<CuspTriangle, usize> = BTreeMap::new();
    let mut pieces = Vec::new();
    for &seed in &members {
        if piece.contains_key(&seed) {
            continue;
        }
        let id = pieces.len();
        let mut stack = vec![seed];
        let mut tris = Vec::new();
        piece.insert(seed, id);
        while let Some(t) = stack.pop() {
            tris.push(t);
            for c in t.corners() {
                let (nb, _) = ct.neighbour(t, c);
                if tets.contains(&nb.tet) && !piece.contains_key(&nb) {
                    piece.insert(nb, id);
                    stack.push(nb);
                }
            }
        }
        let mut triples: Vec<[f64; 3]> = tris.iter().map(|&t| angle_triple(&positions[&t], t)).collect();
        triples.sort_by(|a, b| a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
        pieces.push(triples);
    }
    pieces
}

fn layered_structure(tol: &Tolerances) -> Outcome {
    let words = all_words(12);
    let mut paired = 0;
    for word in &words {
        let tri = build(word).unwrap();
        let n = word.size();
        for e in tri.edges() {
            ensure(e.degree() % 2 == 0, || format!("{word}: edge {} has degree {}", e.id, e.degree()))?;
        }
        let ct = cusp_triangulation(&tri).map_err(|e| format!("{word}: {e}"))?;
        ensure(ct.cusps.len() == 1, || format!("{word}: {} cusps", ct.cusps.len()))?;
        ensure(ct.cusps[0].triangles.len() == 4 * n, || format!("{word}: {} cusp triangles", ct.cusps[0].triangles.len()))?;
        ensure(ct.cusps[0].euler_characteristic == 0, || format!("{word}: chi {}", ct.cusps[0].euler_characteristic))?;

        let sol = solve_complete_structure(&tri, None, tol).map_err(|e| format!("{word}: {e}"))?;
        let dev = develop_cusp(&ct, 0, &sol, tol).map_err(|e| format!("{word}: {e}"))?;
        let positions: BTreeMap<CuspTriangle, [Complex64; 4]> = dev.positions.iter().cloned().collect();
        for fan in fan_decomposition(word).fans {
            let pieces = fan_pieces(&ct, &positions, &fan.tets);
            ensure(pieces.len().is_multiple_of(2), || format!("{word}: fan {:?} splits into {} pieces", fan.tets, pieces.len()))?;
            // each piece must have a partner with the same similarity classes
            let mut unmatched: Vec<&Vec<[f64; 3]>> = pieces.iter().collect();
            while let Some(p) = unmatched.pop() {
                let same = |q: &&Vec<[f64; 3]>| {
                    q.len() == p.len()
                        && q.iter().zip(p.iter()).all(|(a, b)| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9))
                };
                let k = unmatched
                    .iter()
                    .position(same)
                    .ok_or_else(|| format!("{word}: fan {:?} has an unpaired piece", fan.tets))?;
                unmatched.swap_remove(k);
                paired += 1;
            }
        }
    }
    Ok(format!("{} words, {paired} fan pairs", words.len()))
}

fn test_words() -> Vec<&'static str> {
    vec!["RL", "RL^2", "R^2L^2", "R^2L^3", "R^3L^2", "R^2L^4", "RLRRL", "L^4R^4", "L^3R^2L^2R"]
}

fn numerical_invariants(tol: &Tolerances) -> Outcome {
    let mut moves_checked = 0;
    for w in test_words() {
        let tri = tri_of(w);
        let sol = solve_complete_structure(&tri, None, tol).map_err(|e| format!("{w}: {e}"))?;
        for s in &sol.shapes {
            let p = s.params();
            let prod = p[0] * p[1] * p[2];
            ensure((prod + 1.0).norm() <= 1e-12, || format!("{w}: z z' z'' = {prod}"))?;
        }
        for site in move_sites(&tri) {
            if let MoveSite::TwoThree { tet, face } = site {
                let other = tri.adjacent(tet, face).tet;
                let (r, u, v) = transfer_shapes_23(sol.shapes[tet], sol.shapes[other]).map_err(|e| e.to_string())?;
                let ruv = r.z * u.z * v.z;
                ensure((ruv - 1.0).norm() <= 1e-12, || format!("{w}: r u v = {ruv}"))?;
            }
            let r = classify_move(&tri, &sol, site, tol).map_err(|e| format!("{w} {site}: {e}"))?;
            let sys = gluing_equations(r.triangulation()).unwrap();
            let residual = sys.branch_residual(&r.shapes.logs);
            ensure(residual <= 1e-10, || format!("{w} {site}: residual {residual:e}"))?;
            moves_checked += 1;
        }

        let sys = gluing_equations(&tri).unwrap();
        for point in [ShapeAssignment::regular(tri.size()), sol.clone()] {
            let zeta: Vec<Complex64> = point.logs.iter().map(|l| l[0]).collect();
            let z: Vec<Complex64> = point.shapes.iter().map(|s| s.z).collect();
            let exact = sys.jacobian(&z);
            let approx = finite_difference_jacobian(&sys, &zeta, 1e-6);
            let scale = exact.iter().map(|x| x.norm()).fold(1.0, f64::max);
            let err = exact.iter().zip(approx.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
            ensure(err <= 1e-6, || format!("{w}: jacobian relative error {err:e}"))?;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let words = test_words();
    for trial in 0..100 {
        let w = words[rng.random_range(0..words.len())];
        let tri = tri_of(w);
        let sites: Vec<MoveSite> = move_sites(&tri)
            .into_iter()
            .filter(|s| matches!(s, MoveSite::TwoThree { .. }))
            .collect();
        let site = sites[rng.random_range(0..sites.len())];
        let up = apply_move(&tri, site).map_err(|e| format!("trial {trial} {w} {site}: {e}"))?;
        let edge = up.new_edge().ok_or_else(|| format!("trial {trial}: no new edge"))?;
        let down = apply_move(&up.triangulation, MoveSite::ThreeTwo { edge }).map_err(|e| e.to_string())?;
        ensure(is_isomorphic(&tri, &down.triangulation), || format!("trial {trial} {w} {site}: 3-2 after 2-3 differs"))?;
        let again = apply_move(
            &down.triangulation,
            MoveSite::TwoThree {
                tet: down.created[0],
                face: 0,
            },
        )
        .map_err(|e| e.to_string())?;
        ensure(is_isomorphic(&up.triangulation, &again.triangulation), || {
            format!("trial {trial} {w} {site}: 2-3 after 3-2 differs")
        })?;
    }
    Ok(format!("{moves_checked} transfers, 100 round trips"))
}

fn cusp_agreement(tol: &Tolerances) -> Outcome {
    let mut sites = 0;
    let mut geometric = 0;
    for w in ["R^2L^2", "R^2L^4", "R^4L^4"] {
        let tri = tri_of(w);
        let sol = solve_complete_structure(&tri, None, tol).unwrap();
        let ct = cusp_triangulation(&tri).unwrap();
        let dev = develop_cusp(&ct, 0, &sol, tol).unwrap();
        for site in move_sites(&tri) {
            let MoveSite::TwoThree { tet, face } = site else { continue };
            let r = classify_move(&tri, &sol, site, tol).map_err(|e| format!("{w} {site}: {e}"))?;
            let three_d = r.new_shapes().iter().all(|s| s.classify(tol) == ShapeClass::PositivelyOriented);
            let mut convex = true;
            for edge in quads_for_face(tet, face) {
                convex &= quad_flip_geometric(&dev, edge, tol).map_err(|e| format!("{w} {site}: {e}"))?;
            }
            ensure(three_d == convex, || format!("{w} {site}: 3D says {three_d}, cusp says {convex}"))?;
            sites += 1;
            geometric += usize::from(three_d);
        }
    }
    // the same comparison where geometric sites exist
    for w in ["R^2L^3", "RL^2"] {
        let tri = tri_of(w);
        let sol = solve_complete_structure(&tri, None, tol).unwrap();
        let ct = cusp_triangulation(&tri).unwrap();
        let dev = develop_cusp(&ct, 0, &sol, tol).unwrap();
        for site in move_sites(&tri) {
            let MoveSite::TwoThree { tet, face } = site else { continue };
            let r = classify_move(&tri, &sol, site, tol).map_err(|e| format!("{w} {site}: {e}"))?;
            let three_d = r.move_class == MoveClass::Geometric;
            let convex = quads_for_face(tet, face)
                .into_iter()
                .all(|e| quad_flip_geometric(&dev, e, tol).unwrap());
            ensure(three_d == convex, || format!("{w} {site}: 3D says {three_d}, cusp says {convex}"))?;
            sites += 1;
            geometric += usize::from(three_d);
        }
    }
    Ok(format!("{sites} sites agree ({geometric} geometric)"))
}

fn figure_eight_oracle(tol: &Tolerances) -> Outcome {
    let sol = solve_complete_structure(&tri_of("RL"), None, tol).map_err(|e| e.to_string())?;
    let regular = Complex64::new(0.5, 0.8660254037844386);
    for s in &sol.shapes {
        ensure((s.z - regular).norm() <= 1e-6, || format!("shape {}", s.z))?;
    }
    let v = volume(&sol);
    ensure((v - FIGURE_EIGHT_VOLUME).abs() <= 1e-5, || format!("volume {v}"))?;
    Ok(format!("volume {v:.10}"))
}

/// Writes straight to stderr so the verdicts show without `--nocapture`.
fn report(line: &str) {
    let _ = writeln!(std::io::stderr(), "{line}");
}

#[test]
fn acceptance() {
    let tol = Tolerances::default();
    let criteria: Vec<Criterion> = vec![
        ("1 gluing table of L^4R^6", Duration::from_secs(1), Box::new(table_reproduction)),
        ("2 even exponents are isolated", Duration::from_secs(120), Box::new(|| even_exponents_isolated(&tol))),
        ("3 odd exponents admit geometric moves", Duration::from_secs(10), Box::new(|| odd_exponent_contrast(&tol))),
        ("4 re-geometrization", Duration::from_secs(120), Box::new(|| regeometrization(&tol))),
        ("5 figure-eight signatures", Duration::from_secs(10), Box::new(|| figure_eight_signatures(&tol))),
        ("6 layered structure, |word| <= 12", Duration::from_secs(60), Box::new(|| layered_structure(&tol))),
        ("7 numerical invariants", Duration::from_secs(120), Box::new(|| numerical_invariants(&tol))),
        ("8 cusp and 3D verdicts agree", Duration::from_secs(30), Box::new(|| cusp_agreement(&tol))),
        ("9 figure-eight oracle", Duration::from_secs(1), Box::new(|| figure_eight_oracle(&tol))),
    ];
    let mut failures = Vec::new();
    for (name, limit, run) in &criteria {
        let started = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = started.elapsed();
        let outcome = outcome.and_then(|msg| {
            if elapsed <= *limit {
                Ok(msg)
            } else {
                Err(format!("{msg}; took {elapsed:.1?}, limit {limit:?}"))
            }
        });
        match outcome {
            Ok(msg) => report(&format!("criterion {name}: PASS ({elapsed:.2?}) {msg}")),
            Err(msg) => {
                report(&format!("criterion {name}: FAIL ({elapsed:.2?}) {msg}"));
                failures.push(*name);
            }
        }
    }
    assert!(failures.is_empty(), "failed: {failures:?}");
}
