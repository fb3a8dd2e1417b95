use std::f64::consts::PI;

use bpqm::codes::{builtin_code, BUILTIN_NAMES};
use bpqm::mpg::{angle_boxstar, prob_boxstar};
use bpqm::qsim::decode::{branch_decomposition, BitCircuit};
use bpqm::qsim::gates::cnot_first;
use bpqm::qsim::{channel_state, PureState};
use nalgebra::{Matrix4, Vector2, Vector4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ket(x: u8, theta: f64) -> Vector2<f64> {
    let s = if x == 0 { 1.0 } else { -1.0 };
    Vector2::new((theta / 2.0).cos(), s * (theta / 2.0).sin())
}

fn kron(a: &Vector2<f64>, b: &Vector2<f64>) -> Vector4<f64> {
    Vector4::new(a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
}

fn proj(v: &Vector4<f64>) -> Matrix4<f64> {
    v * v.transpose()
}

#[test]
fn mixed_check_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let cnot = cnot_first();
    for _ in 0..500 {
        let (a, b) = (rng.gen_range(0.01..PI - 0.01), rng.gen_range(0.01..PI - 0.01));
        for x in 0..2u8 {
            // Check-node channel: x = x1 ⊕ x2 with x1 uniform.
            let input: Matrix4<f64> = (0..2u8).map(|x1| proj(&kron(&ket(x1, a), &ket(x ^ x1, b))) * 0.5).sum();
            let lhs = cnot * input * cnot.transpose();
            let rhs: Matrix4<f64> = (0..2u8)
                .map(|l| {
                    let flag = if l == 0 { Vector2::new(1.0, 0.0) } else { Vector2::new(0.0, 1.0) };
                    proj(&kron(&ket(x, angle_boxstar(a, b, l)), &flag)) * prob_boxstar(a, b, l)
                })
                .sum();
            assert!((lhs - rhs).abs().max() < 1e-12, "a={a} b={b} x={x}");
        }
    }
}

fn random_thetas(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.02..0.98) * PI).collect()
}

#[test]
fn zero_qubits_return_to_zero_on_tree_codes() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for name in BUILTIN_NAMES {
        let code = builtin_code(name).unwrap();
        if !code.is_tree_code() {
            continue;
        }
        let words = code.codewords().unwrap();
        let bits: Vec<usize> = if code.n() > 8 { vec![1, 17] } else { (1..=code.n()).collect() };
        for r in bits {
            for _ in 0..3 {
                let t = random_thetas(&mut rng, code.n());
                let x = &words[rng.gen_range(0..words.len())];
                let bc = BitCircuit::new(&code, &t, r).unwrap();
                let mut state = channel_state(x, &t).unwrap();
                bc.circuit.apply(&mut state).unwrap();
                let leak: f64 = branch_decomposition(&state, &bc.roles).iter().map(|b| b.zero_leak).sum();
                assert!(leak < 1e-9, "{name} bit {r}: leak {leak}");
            }
        }
    }
}

#[test]
fn averaged_post_decoding_state_is_block_diagonal_in_ancillas() {
    let code = builtin_code("code5").unwrap();
    let words = code.codewords().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let t = random_thetas(&mut rng, 5);
    for r in 1..=5 {
        let bc = BitCircuit::new(&code, &t, r).unwrap();
        let anc_of = |i: usize| bc.roles.ancillas.iter().fold(0usize, |acc, &q| acc << 1 | (i >> q & 1));
        for b in 0..2u8 {
            let mut rho = vec![[Complex64::new(0.0, 0.0); 32]; 32];
            for x in words.iter().filter(|x| x[r - 1] == b) {
                let mut s = channel_state(x, &t).unwrap();
                bc.circuit.apply(&mut s).unwrap();
                let amps = s.amplitudes();
                for i in 0..32 {
                    for j in 0..32 {
                        rho[i][j] += amps[i] * amps[j].conj();
                    }
                }
            }
            let worst = (0..32)
                .flat_map(|i| (0..32).map(move |j| (i, j)))
                .filter(|&(i, j)| anc_of(i) != anc_of(j))
                .map(|(i, j)| rho[i][j].norm())
                .fold(0.0, f64::max);
            assert!(worst < 1e-9, "bit {r}, x_r={b}: off-diagonal {worst}");
        }
    }
}

#[test]
fn decoding_circuits_preserve_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for (name, r) in [("code5", 3), ("code17", 1)] {
        let code = builtin_code(name).unwrap();
        let t = random_thetas(&mut rng, code.n());
        let bc = BitCircuit::new(&code, &t, r).unwrap();
        let mut amps: Vec<Complex64> = (0..1usize << code.n())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        let mut state = PureState::from_amplitudes(amps).unwrap();
        let before = state.norm_sqr();
        bc.circuit.apply(&mut state).unwrap();
        assert!((state.norm_sqr().sqrt() - before.sqrt()).abs() < 1e-10, "{name}");
        let mut back = state.clone();
        bc.circuit.apply_inverse(&mut back).unwrap();
        assert!((back.norm_sqr() - before).abs() < 1e-10);
    }
}
