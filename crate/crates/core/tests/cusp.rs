use std::f64::consts::PI;

use flipgraph::cusp::{
    cusp_triangulation, develop_cusp, fan_chains, inflection_count, quad_flip_geometric, quads_for_face,
};
use flipgraph::geometry::{solve_complete_structure, Tolerances};
use flipgraph::monodromy::{build, fan_decomposition, parse_word};
use flipgraph::moves::{move_sites, MoveSite};

#[test]
fn no_face_of_r2l2_has_three_convex_quads() {
    let tol = Tolerances::default();
    let tri = build(&parse_word("R^2L^2").unwrap()).unwrap();
    let sol = solve_complete_structure(&tri, None, &tol).unwrap();
    let ct = cusp_triangulation(&tri).unwrap();
    let dev = develop_cusp(&ct, 0, &sol, &tol).unwrap();
    for site in move_sites(&tri) {
        let MoveSite::TwoThree { tet, face } = site else { continue };
        let convex = quads_for_face(tet, face)
            .into_iter()
            .filter(|&e| quad_flip_geometric(&dev, e, &tol).unwrap())
            .count();
        assert!(convex <= 2, "{site}");
    }
}

#[test]
fn complete_structure_closes_up_the_cusp() {
    let tol = Tolerances::default();
    for w in ["RL", "R^2L^4", "L^4R^6", "RLRRL"] {
        let tri = build(&parse_word(w).unwrap()).unwrap();
        let sol = solve_complete_structure(&tri, None, &tol).unwrap();
        let ct = cusp_triangulation(&tri).unwrap();
        let dev = develop_cusp(&ct, 0, &sol, &tol).unwrap();
        for s in dev.vertex_angle_sums(&ct) {
            assert!((s - 2.0 * PI).abs() < 1e-9, "{w}: angle sum {s}");
        }
        for (a, _) in &dev.holonomy {
            assert!((a - 1.0).norm() < 1e-9, "{w}: holonomy derivative {a}");
        }
    }
}

#[test]
fn long_fans_lie_on_a_curve_with_one_inflection() {
    let tol = Tolerances::default();
    for w in ["R^2L^4", "R^4L^4", "L^4R^6", "R^2L^8"] {
        let word = parse_word(w).unwrap();
        let tri = build(&word).unwrap();
        let sol = solve_complete_structure(&tri, None, &tol).unwrap();
        let ct = cusp_triangulation(&tri).unwrap();
        let dev = develop_cusp(&ct, 0, &sol, &tol).unwrap();
        for fan in fan_decomposition(&word).fans.iter().filter(|f| f.tets.len() >= 3) {
            let mut tets = fan.tets.clone();
            tets.extend([fan.lower_toggle, fan.upper_toggle]);
            let chains = fan_chains(&ct, &dev, &tets).unwrap();
            assert!(!chains.is_empty());
            for chain in chains {
                assert_eq!(inflection_count(&chain, 1e-9), 1, "{w} {:?}", fan.letter);
            }
        }
    }
}
