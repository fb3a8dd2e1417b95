use std::f64::consts::PI;

use bpqm::codes::builtin_code;
use bpqm::mpbpqm::{
    angle_error_bound, block_gap_bound, mp_bit_success, mp_root_message, quantized_equality_unitary, suboptimality,
    QuantGrid,
};
use bpqm::qsim::gates::distance_up_to_sign;
use bpqm::qsim::{bpqm_bit_success_given, u_ostar};
use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_thetas(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.05..0.95) * PI).collect()
}

#[test]
fn root_messages_stay_normalized_and_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for name in ["code5", "code17"] {
        let code = builtin_code(name).unwrap();
        let words = code.codewords().unwrap();
        for grid in [QuantGrid::exact(), QuantGrid::new(2).unwrap(), QuantGrid::new(7).unwrap()] {
            let t = random_thetas(&mut rng, code.n());
            let x = &words[rng.gen_range(0..words.len())];
            for r in [1, code.n()] {
                let m = mp_root_message(&code, &t, x, r, &grid).unwrap();
                assert_eq!(m.entries.len(), 1 << (code.k() - 1));
                assert!((m.total_probability() - 1.0).abs() < 1e-9);
                for e in &m.entries {
                    assert!((e.rho.trace() - 1.0).abs() < 1e-9);
                    let min = SymmetricEigen::new(e.rho).eigenvalues.min();
                    assert!(min >= -1e-10, "{name}: eigenvalue {min}");
                }
            }
        }
    }
}

#[test]
fn unquantized_messages_reproduce_the_statevector_decoder() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let code = builtin_code("code5").unwrap();
    let t = random_thetas(&mut rng, 5);
    for x in code.codewords().unwrap() {
        for r in 1..=5 {
            let mp = mp_bit_success(&code, &t, &x, r, &QuantGrid::exact()).unwrap();
            let sv = bpqm_bit_success_given(&code, &t, &x, r).unwrap();
            assert!((mp - sv).abs() < 1e-8, "x={x:?} r={r}");
        }
    }
    let code = builtin_code("code17").unwrap();
    let words = code.codewords().unwrap();
    let t = random_thetas(&mut rng, 17);
    for _ in 0..3 {
        let x = &words[rng.gen_range(0..words.len())];
        let r = rng.gen_range(1..=17);
        let mp = mp_bit_success(&code, &t, x, r, &QuantGrid::exact()).unwrap();
        let sv = bpqm_bit_success_given(&code, &t, x, r).unwrap();
        assert!((mp - sv).abs() < 1e-8, "code17 r={r}");
    }
}

#[test]
fn averaged_root_cosine_error_is_within_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let code = builtin_code("code5").unwrap();
    for _ in 0..5 {
        let t = random_thetas(&mut rng, 5);
        for x in code.codewords().unwrap() {
            let r = rng.gen_range(1..=5);
            let exact = mp_root_message(&code, &t, &x, r, &QuantGrid::exact()).unwrap();
            for b in 1..=16 {
                let grid = QuantGrid::new(b).unwrap();
                let q = mp_root_message(&code, &t, &x, r, &grid).unwrap();
                let err: f64 = exact.entries.iter().zip(&q.entries).map(|(e, f)| e.p * (e.c - f.c).abs()).sum();
                assert!(err <= angle_error_bound(5, &grid), "B={b}: {err}");
            }
        }
    }
}

#[test]
fn quantized_unitary_error_shrinks_with_the_rotation_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for b in [2u32, 4, 8, 12] {
        let grid = QuantGrid::new(b).unwrap();
        // Each rotation moves by at most half a step; a Frobenius unit per radian.
        let bound = 2.0 * PI / (2f64.powi(b as i32) - 1.0) + 1e-12;
        for _ in 0..200 {
            let (c1, c2): (f64, f64) = (rng.gen_range(-0.99..0.99), rng.gen_range(-0.99..0.99));
            let d = distance_up_to_sign(&quantized_equality_unitary(c1, c2, &grid), &u_ostar(c1.acos(), c2.acos()));
            assert!(d <= bound, "B={b}: {d} > {bound}");
        }
    }
}

#[test]
fn code17_suboptimality_decreases_with_register_size() {
    let code = builtin_code("code17").unwrap();
    let t = [0.2 * PI; 17];
    let zero = [0u8; 17];
    let eps: Vec<f64> =
        (4..=16).map(|b| suboptimality(&code, &t, &zero, 1, &QuantGrid::new(b).unwrap()).unwrap()).collect();
    for w in eps.windows(2) {
        assert!(w[1] <= 1.1 * w[0], "{eps:?}");
    }
    assert!(eps[10] <= eps[0] / 10.0);
    assert!(suboptimality(&code, &t, &zero, 1, &QuantGrid::exact()).unwrap() < 1e-12);
}

#[test]
fn observed_suboptimality_respects_closed_form_bound() {
    let code = builtin_code("code5").unwrap();
    let t = [0.3 * PI; 5];
    for x in code.codewords().unwrap() {
        for b in 1..=24 {
            let eps = suboptimality(&code, &t, &x, 1, &QuantGrid::new(b).unwrap()).unwrap();
            assert!(eps <= block_gap_bound(5, b));
        }
    }
    assert!(block_gap_bound(5, 200) < 1e-3);
}
