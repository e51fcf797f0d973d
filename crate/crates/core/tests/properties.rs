use num_complex::Complex64;
use proptest::prelude::*;

use flipgraph::geometry::{Shape, Tolerances};
use flipgraph::isosig::{decode, encode};
use flipgraph::monodromy::{build, CyclicWord, Letter};
use flipgraph::moves::{transfer_shapes_23, transfer_shapes_32};
use flipgraph::{canonical_signature, Perm4};

fn word() -> impl Strategy<Value = CyclicWord> {
    prop::collection::vec(any::<bool>(), 2..10)
        .prop_filter("both letters", |v| v.iter().any(|&b| b) && v.iter().any(|&b| !b))
        .prop_map(|v| CyclicWord::new(v.into_iter().map(|b| if b { Letter::L } else { Letter::R }).collect()).unwrap())
}

fn upper_half_plane() -> impl Strategy<Value = Complex64> {
    (-3.0f64..3.0, 0.05f64..3.0).prop_map(|(re, im)| Complex64::new(re, im))
}

proptest! {
    #[test]
    fn signature_ignores_labelling(w in word(), seed in any::<u64>()) {
        let tri = build(&w).unwrap();
        let n = tri.size();
        // a deterministic pseudo-random relabelling from the seed
        let mut tet_map: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            tet_map.swap(i, (s >> 33) as usize % (i + 1));
        }
        let perms: Vec<Perm4> = (0..n).map(|i| Perm4::all().nth(((seed >> (i % 8)) as usize + i) % 24).unwrap()).collect();
        let relabelled = tri.relabel(&tet_map, &perms).unwrap();
        prop_assert_eq!(canonical_signature(&tri), canonical_signature(&relabelled));
    }

    #[test]
    fn rotation_does_not_change_signature(w in word(), k in 0usize..10) {
        let rotated = w.rotated(k % w.size());
        prop_assert_eq!(canonical_signature(&build(&w).unwrap()), canonical_signature(&build(&rotated).unwrap()));
    }

    #[test]
    fn decoder_rejects_truncation(w in word(), cut in 1usize..6) {
        let sig = encode(&build(&w).unwrap()).unwrap();
        let cut = cut.min(sig.len() - 1);
        prop_assert!(decode(&sig[..sig.len() - cut]).is_err());
    }

    #[test]
    fn encode_decode_round_trip(w in word()) {
        let tri = build(&w).unwrap();
        let sig = encode(&tri).unwrap();
        prop_assert_eq!(encode(&decode(&sig).unwrap()).unwrap(), sig);
    }

    #[test]
    fn transfer_round_trip(z in upper_half_plane(), w in upper_half_plane()) {
        let (r, u, v) = transfer_shapes_23(Shape::new(z), Shape::new(w)).unwrap();
        prop_assert!((r.z * u.z * v.z - 1.0).norm() < 1e-9);
        let (z2, w2) = transfer_shapes_32(r, u, v, &Tolerances::default()).unwrap();
        prop_assert!((z2.z - z).norm() <= 1e-9 * (1.0 + z.norm()));
        prop_assert!((w2.z - w).norm() <= 1e-9 * (1.0 + w.norm()));
    }

    #[test]
    fn shape_parameters_multiply_to_minus_one(z in upper_half_plane()) {
        let [a, b, c] = Shape::new(z).params();
        prop_assert!((a * b * c + 1.0).norm() < 1e-12);
    }
}
