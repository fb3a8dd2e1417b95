use std::f64::consts::PI;

use bpqm::codes::{builtin_code, BinaryLinearCode};
use bpqm::mpbpqm::QuantGrid;
use bpqm::mpg::{angle_boxstar, angle_ostar, build_mpg, compile_lists, prob_boxstar, NodeKind};
use bpqm::qsim::u_ostar;
use nalgebra::{Vector2, Vector4};
use proptest::prelude::*;

fn angle() -> impl Strategy<Value = f64> {
    (1e-3..PI - 1e-3).prop_map(|t: f64| t)
}

fn ket(x: u8, theta: f64) -> Vector2<f64> {
    let s = if x == 0 { 1.0 } else { -1.0 };
    Vector2::new((theta / 2.0).cos(), s * (theta / 2.0).sin())
}

fn kron(a: &Vector2<f64>, b: &Vector2<f64>) -> Vector4<f64> {
    Vector4::new(a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
}

proptest! {
    #[test]
    fn boxstar_one_is_antisymmetric(a in angle(), b in angle()) {
        prop_assert!((angle_boxstar(b, a, 1) - (PI - angle_boxstar(a, b, 1))).abs() < 1e-9);
        prop_assert!((angle_boxstar(a, b, 0) - angle_boxstar(b, a, 0)).abs() < 1e-12);
        prop_assert!((angle_ostar(a, b) - angle_ostar(b, a)).abs() < 1e-12);
    }

    #[test]
    fn check_outcome_probabilities_sum_to_one(a in angle(), b in angle()) {
        let (p0, p1) = (prob_boxstar(a, b, 0), prob_boxstar(a, b, 1));
        prop_assert!(p0 >= 0.0 && p1 >= 0.0);
        prop_assert!((p0 + p1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn equality_unitary_contracts_matching_inputs(a in angle(), b in angle(), x in 0..2u8) {
        let out = u_ostar(a, b) * kron(&ket(x, a), &ket(x, b));
        let want = kron(&ket(x, angle_ostar(a, b)), &Vector2::new(1.0, 0.0));
        prop_assert!((out - want).norm() < 1e-12);
    }

    #[test]
    fn quantization_snaps_to_the_nearest_grid_point(bits in 1u32..=30, c in -1.0f64..1.0) {
        let grid = QuantGrid::new(bits).unwrap();
        let d = grid.delta();
        let q = grid.quantize(c);
        let j = (q + 1.0) / d - 1.0;
        prop_assert!((j - j.round()).abs() < 1e-6 * j.max(1.0));
        let (lo, hi) = (-1.0 + d, 1.0 - d);
        let tol = 1e-12 * 2f64.powi(bits as i32).max(1.0) * d;
        if (lo..=hi).contains(&c) {
            prop_assert!((q - c).abs() <= d / 2.0 + tol);
        } else {
            prop_assert!((q - c.clamp(lo, hi)).abs() <= tol);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn branch_lists_are_consistent(
        name in prop::sample::select(vec!["code5", "code17"]),
        r in 1usize..=17,
        seed in proptest::collection::vec(0.02f64..0.98, 17),
    ) {
        let code = builtin_code(name).unwrap();
        let r = (r - 1) % code.n() + 1;
        let thetas: Vec<f64> = seed[..code.n()].iter().map(|t| t * PI).collect();
        let mpg = build_mpg(&code, r).unwrap();
        prop_assert_eq!(mpg.count(NodeKind::Check), code.k() - 1);
        prop_assert_eq!(mpg.count(NodeKind::Equality), code.n() - code.k());
        let compiled = compile_lists(&mpg, &thetas).unwrap();
        for (i, node) in mpg.nodes.iter().enumerate() {
            let list = &compiled.branches[i];
            let m = compiled.check_lists[i].len();
            prop_assert_eq!(list.len(), 1 << m);
            prop_assert!((list.iter().map(|e| e.prob).sum::<f64>() - 1.0).abs() < 1e-12);
            for (j, e) in list.iter().enumerate() {
                prop_assert_eq!(e.s, j as u64);
                prop_assert!(e.angle > 0.0 && e.angle < PI);
            }
            match (node.kind, node.children) {
                (NodeKind::Channel { .. }, _) => prop_assert_eq!(m, 0),
                (kind, Some((a, b))) => {
                    let (ma, mb) = (compiled.check_lists[a].len(), compiled.check_lists[b].len());
                    let extra = usize::from(kind == NodeKind::Check);
                    prop_assert_eq!(m, ma + mb + extra);
                    if kind == NodeKind::Equality {
                        for (j, e) in list.iter().enumerate() {
                            let (e1, e2) = (&compiled.branches[a][j & ((1 << ma) - 1)], &compiled.branches[b][j >> ma]);
                            prop_assert!((e.angle - angle_ostar(e1.angle, e2.angle)).abs() < 1e-12);
                        }
                    }
                }
                _ => prop_assert!(false, "internal node without children"),
            }
        }
        prop_assert_eq!(compiled.root_check_list().len(), code.k() - 1);
    }

    #[test]
    fn random_parity_checks_give_consistent_codes(
        rows in 1usize..=4,
        n in 3usize..=9,
        bits in proptest::collection::vec(0u8..2, 36),
    ) {
        let h: Vec<Vec<u8>> = (0..rows).map(|j| bits[j * n..(j + 1) * n].to_vec()).collect();
        let Ok(code) = BinaryLinearCode::from_parity_check(&h) else { return Ok(()) };
        prop_assert_eq!(code.k(), n - rows);
        for g in code.g_masks() {
            for hm in code.h_masks() {
                prop_assert_eq!((g & hm).count_ones() % 2, 0);
            }
        }
        let mut words: Vec<u64> = (0..1u64 << code.k()).map(|m| code.encode_index(m)).collect();
        prop_assert!(words.iter().all(|&w| code.is_codeword(w)));
        words.sort_unstable();
        words.dedup();
        prop_assert_eq!(words.len(), 1 << code.k());
        let tg = code.tanner_graph();
        if tg.components() == 1 {
            prop_assert_eq!(tg.is_tree(), tg.num_edges() + 1 == tg.num_vars() + tg.num_checks());
        }
    }
}
