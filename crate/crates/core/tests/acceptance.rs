//! Acceptance suite. Runs every criterion at its stated tolerance and prints
//! one PASS/FAIL line per criterion; exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::{Vector2, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bpqm::classicalbp::bp_decode_bit;
use bpqm::codes::builtin_code;
use bpqm::mpbpqm::{block_gap_bound, mp_bit_success, rotation_angles, QuantGrid};
use bpqm::mpg::{angle_boxstar, angle_ostar, prob_boxstar};
use bpqm::nontree::{
    code8_subtree_strategies, enu_angle, nontree_bit_success, nontree_block_success, optimal_cloner_sweep,
    subtree_bit_success, Cloner,
};
use bpqm::oracles::{classical_map_success, helstrom_bit_success, map_bit_decision, pgm_block_success, Target};
use bpqm::qsim::decode::{branch_decomposition, BitCircuit};
use bpqm::qsim::gates::{cnot_first, distance_up_to_sign};
use bpqm::qsim::{
    bpqm_bit_success, bpqm_block_success_average, channel_state, default_order, u_from_rotations, u_ostar,
};
use bpqm::{BinaryLinearCode, Result};

type Outcome = Result<(bool, String)>;
type Criterion = (&'static str, f64, fn() -> Outcome);

/// θ ∈ {0.05π, 0.10π, …, 0.45π}.
fn theta_grid() -> Vec<f64> {
    (1..=9).map(|i| 0.05 * i as f64 * PI).collect()
}

fn ket(x: u8, theta: f64) -> Vector2<f64> {
    let (s, c) = (theta / 2.0).sin_cos();
    Vector2::new(c, if x == 0 { s } else { -s })
}

/// Two-qubit product vector, index `2·a + b`.
fn kron(a: &Vector2<f64>, b: &Vector2<f64>) -> Vector4<f64> {
    Vector4::new(a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
}

fn random_angle(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(1e-3..PI - 1e-3)
}

fn equality_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (a, b, x) = (random_angle(&mut rng), random_angle(&mut rng), rng.gen_range(0..2u8));
        let lhs = u_ostar(a, b) * kron(&ket(x, a), &ket(x, b));
        let rhs = kron(&ket(x, angle_ostar(a, b)), &Vector2::new(1.0, 0.0));
        worst = worst.max((lhs - rhs).norm());
    }
    Ok((worst < 1e-12, format!("max error {worst:.2e}")))
}

fn check_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (a, b) = (random_angle(&mut rng), random_angle(&mut rng));
        let (y1, y2) = (rng.gen_range(0..2u8), rng.gen_range(0..2u8));
        let lhs = cnot_first() * kron(&ket(y1, a), &ket(y2, b));
        let rhs: Vector4<f64> = (0..2u8)
            .map(|j| {
                let sign = if j & y2 == 1 { -1.0 } else { 1.0 };
                let basis = if j == 0 { Vector2::new(1.0, 0.0) } else { Vector2::new(0.0, 1.0) };
                kron(&ket(y1 ^ y2, angle_boxstar(a, b, j)), &basis) * (sign * prob_boxstar(a, b, j).sqrt())
            })
            .sum();
        worst = worst.max((lhs - rhs).norm());
    }
    Ok((worst < 1e-12, format!("max error {worst:.2e}")))
}

fn rotation_decomposition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (p1, p2) = (random_angle(&mut rng), random_angle(&mut rng));
        let (alpha, beta) = rotation_angles(p1.cos(), p2.cos());
        worst = worst.max(distance_up_to_sign(&u_from_rotations(alpha, beta), &u_ostar(p1, p2)));
    }
    Ok((worst < 1e-12, format!("max error {worst:.2e} (up to global sign)")))
}

fn branch_structure() -> Outcome {
    let code = builtin_code("code5")?;
    let words = code.codewords()?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut leak, mut weight_err) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let thetas: Vec<f64> = (0..5).map(|_| random_angle(&mut rng)).collect();
        let x = &words[rng.gen_range(0..words.len())];
        let bc = BitCircuit::new(&code, &thetas, 1)?;
        let mut state = channel_state(x, &thetas)?;
        bc.circuit.apply(&mut state)?;
        let root = bc.compiled.root_branches();
        for br in branch_decomposition(&state, &bc.roles) {
            leak = leak.max(br.zero_leak.sqrt());
            weight_err = weight_err.max((br.weight - root[br.pattern as usize].prob).abs());
        }
    }
    let ok = leak < 1e-9 && weight_err < 1e-10;
    Ok((ok, format!("Z-qubit amplitude {leak:.2e}, branch weight error {weight_err:.2e}")))
}

fn bit_optimality() -> Outcome {
    let code5 = builtin_code("code5")?;
    let code17 = builtin_code("code17")?;
    let mut worst = 0.0f64;
    for theta in theta_grid() {
        let t5 = vec![theta; 5];
        for r in 1..=5 {
            worst = worst.max((bpqm_bit_success(&code5, &t5, r)? - helstrom_bit_success(&code5, &t5, r)?).abs());
        }
        let t17 = vec![theta; 17];
        worst = worst.max((bpqm_bit_success(&code17, &t17, 1)? - helstrom_bit_success(&code17, &t17, 1)?).abs());
    }
    Ok((worst < 1e-9, format!("max |BPQM − Helstrom| {worst:.2e}")))
}

/// Up to `count` information-set orders: the default, its reverse, then
/// further lexicographic information sets.
fn decode_orders(code: &BinaryLinearCode, count: usize) -> Vec<Vec<usize>> {
    let first = default_order(code);
    let mut orders = vec![first.clone(), first.iter().rev().copied().collect()];
    let n = code.n();
    for mask in 0u64..1 << n {
        if orders.len() >= count {
            break;
        }
        if mask.count_ones() as usize != code.k() {
            continue;
        }
        let set: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let mut sorted_first = first.clone();
        sorted_first.sort_unstable();
        if code.is_information_set(&set) && set.iter().map(|i| i + 1).collect::<Vec<_>>() != sorted_first {
            orders.push(set.iter().map(|i| i + 1).collect());
        }
    }
    orders
}

fn block_optimality() -> Outcome {
    let code5 = builtin_code("code5")?;
    let orders = decode_orders(&code5, 3);
    let (mut worst, mut spread) = (0.0f64, 0.0f64);
    for theta in theta_grid() {
        let t = vec![theta; 5];
        let pgm = pgm_block_success(&code5, &t)?;
        let values: Vec<f64> =
            orders.iter().map(|o| bpqm_block_success_average(&code5, &t, o)).collect::<Result<_>>()?;
        for v in &values {
            worst = worst.max((v - pgm).abs());
            spread = spread.max((v - values[0]).abs());
        }
    }
    let code17 = builtin_code("code17")?;
    let t17 = vec![0.2 * PI; 17];
    let gap17 =
        (bpqm_block_success_average(&code17, &t17, &default_order(&code17))? - pgm_block_success(&code17, &t17)?).abs();
    let ok = worst < 1e-9 && spread < 1e-9 && gap17 < 1e-9;
    Ok((
        ok,
        format!(
            "code5 max |BPQM − PGM| {worst:.2e} over orders {orders:?} (spread {spread:.2e}); code17 gap {gap17:.2e}"
        ),
    ))
}

fn classical_bp_matches_map() -> Outcome {
    let code = builtin_code("code5")?;
    let mut mismatches = 0;
    let mut total = 0;
    for i in 1..=9 {
        let p = 0.05 * i as f64;
        let ps = vec![p; 5];
        for y in 0u64..32 {
            let yb: Vec<u8> = (0..5).map(|b| ((y >> b) & 1) as u8).collect();
            for r in 1..=5 {
                total += 1;
                if bp_decode_bit(&code, p, &yb, r)? != map_bit_decision(&code, &ps, y, r)? {
                    mismatches += 1;
                }
            }
        }
    }
    // y = 00011: bits 4 and 5 set.
    let y = 0b11000u64;
    let decide = |p: f64| map_bit_decision(&code, &[p; 5], y, 1);
    let (mut lo, mut hi) = (0.05, 0.45);
    let (d_lo, d_hi) = (decide(lo)?, decide(hi)?);
    let mut flips = d_lo != d_hi;
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if decide(mid)? == d_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let threshold = 0.5 * (lo + hi);
    flips &= d_lo == 1 && d_hi == 0;
    let bp_side = bp_decode_bit(&code, threshold - 0.001, &[0, 0, 0, 1, 1], 1)? == 1
        && bp_decode_bit(&code, threshold + 0.001, &[0, 0, 0, 1, 1], 1)? == 0;
    let ok = mismatches == 0 && flips && (threshold - 0.228).abs() <= 0.002 && bp_side;
    Ok((ok, format!("{mismatches}/{total} decision mismatches; X1 estimate for y=00011 flips 1→0 at p={threshold:.5}")))
}

fn discretization() -> Outcome {
    let code17 = builtin_code("code17")?;
    let theta = 0.2 * PI;
    let t17 = vec![theta; 17];
    let zero17 = vec![0u8; 17];
    let exact = bpqm::qsim::bpqm_bit_success_given(&code17, &t17, &zero17, 1)?;
    let eps = |code: &BinaryLinearCode, t: &[f64], x: &[u8], reference: f64, b: u32| -> Result<f64> {
        Ok((reference - mp_bit_success(code, t, x, 1, &QuantGrid::new(b)?)?).abs())
    };
    let bs = [4u32, 6, 8, 10, 12, 14];
    let curve: Vec<f64> = bs.iter().map(|&b| eps(&code17, &t17, &zero17, exact, b)).collect::<Result<_>>()?;
    let saturated = (exact - mp_bit_success(&code17, &t17, &zero17, 1, &QuantGrid::exact())?).abs();
    let code5 = builtin_code("code5")?;
    let t5 = vec![theta; 5];
    let zero5 = vec![0u8; 5];
    let exact5 = bpqm::qsim::bpqm_bit_success_given(&code5, &t5, &zero5, 1)?;
    let mut bound_ok = true;
    for b in 1..=24u32 {
        bound_ok &= eps(&code5, &t5, &zero5, exact5, b)? <= block_gap_bound(5, b);
    }
    let ok = curve[5] <= curve[0] / 10.0 && saturated < 1e-8 && bound_ok;
    let listed: Vec<String> = bs.iter().zip(&curve).map(|(b, e)| format!("{b}:{e:.2e}")).collect();
    Ok((
        ok,
        format!(
            "ε(B) {}; unquantized gap {saturated:.2e}; code5 bound holds for B=1..24: {bound_ok}",
            listed.join(" ")
        ),
    ))
}

fn nontree_dominance() -> Outcome {
    let code8 = builtin_code("code8")?;
    let theta = 0.2 * PI;
    let t = vec![theta; 8];
    let h2 = nontree_bit_success(&code8, theta, 1, 2, Cloner::Enu)?;
    let map_bit = classical_map_success(&code8, &t, Target::Bit(1))?;
    let helstrom = helstrom_bit_success(&code8, &t, 1)?;
    let order = default_order(&code8);
    let b2 = nontree_block_success(&code8, theta, 2, Cloner::Enu, &order)?;
    let b3 = nontree_block_success(&code8, theta, 3, Cloner::Enu, &order)?;
    let map_block = classical_map_success(&code8, &t, Target::Block)?;
    let ok = h2 - map_bit > 0.005 && (helstrom - h2).abs() <= 0.01 && b2 >= b3 && b2 > map_block;
    Ok((
        ok,
        format!(
            "X1: h2 {h2:.6}, bit-MAP {map_bit:.6}, Helstrom {helstrom:.6}; block: h2 {b2:.6}, h3 {b3:.6}, block-MAP {map_block:.6}"
        ),
    ))
}

fn cloners() -> Outcome {
    let mut worst = 0.0f64;
    for theta in theta_grid().into_iter().chain([0.5 * PI]) {
        let clone = enu_angle(theta, 2)?;
        for x in 0..2u8 {
            let out = u_ostar(clone, clone).transpose() * kron(&ket(x, theta), &Vector2::new(1.0, 0.0));
            worst = worst.max((out - kron(&ket(x, clone), &ket(x, clone))).norm());
        }
        worst = worst.max((clone - theta.cos().sqrt().acos()).abs());
    }
    let code8 = builtin_code("code8")?;
    let theta = 0.2 * PI;
    let grid: Vec<f64> = (1..=98).map(|i| i as f64 * 0.005 * PI).collect();
    let sweep = optimal_cloner_sweep(&code8, theta, 1, 3, &grid)?;
    let (best_i, best) =
        sweep.iter().enumerate().fold((0, f64::MIN), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let enu_h3 = nontree_bit_success(&code8, theta, 1, 3, Cloner::Enu)?;
    let offset = (grid[best_i] - theta.cos().sqrt().acos()).abs();
    let ok = worst < 1e-12 && offset <= 0.05 && best >= enu_h3;
    Ok((
        ok,
        format!(
            "ENU error {worst:.2e}; sweep max {best:.6} at θ′={:.4} (offset {offset:.4}), ENU h3 {enu_h3:.6}",
            grid[best_i]
        ),
    ))
}

fn subtree_strategies() -> Outcome {
    let code8 = builtin_code("code8")?;
    let strategies = code8_subtree_strategies();
    let mut dominated = true;
    let mut worst_margin = f64::MAX;
    for theta in theta_grid() {
        let h2 = nontree_bit_success(&code8, theta, 1, 2, Cloner::Enu)?;
        for s in &strategies {
            let v = subtree_bit_success(&code8, s, theta, 1, None)?;
            dominated &= v <= h2;
            worst_margin = worst_margin.min(h2 - v);
        }
    }
    let conditioned: Vec<f64> = strategies[..2]
        .iter()
        .map(|s| subtree_bit_success(&code8, s, 0.45 * PI, 1, Some((3, 1))))
        .collect::<Result<_>>()?;
    let ok = dominated && conditioned.iter().all(|&v| v < 0.1);
    Ok((
        ok,
        format!(
            "min margin below h2 {worst_margin:.2e}; strategies 1–2 on X3=1 at 0.45π: {:.4}, {:.4}",
            conditioned[0], conditioned[1]
        ),
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("equality-node identity", 1.0, equality_identity),
        ("check-node pure identity", 1.0, check_identity),
        ("rotation decomposition of the equality unitary", 1.0, rotation_decomposition),
        ("post-decoding branch structure (code5)", 5.0, branch_structure),
        ("bit optimality: BPQM = Helstrom", 300.0, bit_optimality),
        ("block optimality: BPQM = PGM, order independence", 900.0, block_optimality),
        ("classical BP = bit-MAP, threshold near p=0.228", 10.0, classical_bp_matches_map),
        ("discretization convergence (code17)", 600.0, discretization),
        ("non-tree dominance (code8)", 300.0, nontree_dominance),
        ("cloner identities and optimal-cloner sweep", 600.0, cloners),
        ("cloning-free subtree strategies", 300.0, subtree_strategies),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let within = elapsed <= Duration::from_secs_f64(*budget);
        let (pass, detail) = match outcome {
            Ok((ok, detail)) => (ok && within, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} [{:>2}] {name}: {detail} ({:.2}s, budget {budget:.0}s)",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
