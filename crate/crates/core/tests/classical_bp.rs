use bpqm::classicalbp::{bp_check, bp_decode_bit, bp_equality, LlrMessage};
use bpqm::codes::{builtin_code, BinaryLinearCode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Bit-MAP decision by summing the posterior over all codewords; ties decide 0.
fn brute_bit_map(code: &BinaryLinearCode, p: f64, y: u64, r: usize) -> u8 {
    let mut mass = [0.0f64; 2];
    for x in code.codeword_masks().unwrap() {
        let d = (x ^ y).count_ones() as i32;
        mass[(x >> (r - 1) & 1) as usize] += p.powi(d) * (1.0 - p).powi(code.n() as i32 - d);
    }
    u8::from(mass[1] > mass[0])
}

fn bits(y: u64, n: usize) -> Vec<u8> {
    (0..n).map(|i| (y >> i & 1) as u8).collect()
}

#[test]
fn bp_equals_bit_map_on_every_output() {
    for name in ["code5", "code17"] {
        let code = builtin_code(name).unwrap();
        let n = code.n();
        let patterns: Vec<u64> = if n <= 10 {
            (0..1u64 << n).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(21);
            (0..64).map(|_| rng.gen_range(0..1u64 << n)).collect()
        };
        for p in [0.01, 0.05, 0.1, 0.17, 0.23, 0.31, 0.4, 0.49] {
            for &y in &patterns {
                for r in 1..=n {
                    assert_eq!(
                        bp_decode_bit(&code, p, &bits(y, n), r).unwrap(),
                        brute_bit_map(&code, p, y, r),
                        "{name} p={p} y={y:b} r={r}"
                    );
                }
            }
        }
    }
}

#[test]
fn estimate_for_00011_flips_at_the_closed_form_threshold() {
    // Posterior ratio P(X1=1|y)/P(X1=0|y) for y = 00011 on code5 is
    // (1 − 2p + 2p²)² / (4 (1−p)³ p); the estimate flips where it equals 1.
    let ratio = |p: f64| (1.0 - 2.0 * p + 2.0 * p * p).powi(2) / (4.0 * (1.0 - p).powi(3) * p);
    let (mut lo, mut hi) = (0.1, 0.4);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p_star = 0.5 * (lo + hi);
    assert!((p_star - 0.228).abs() < 5e-4, "threshold {p_star}");
    let code = builtin_code("code5").unwrap();
    let y = [0, 0, 0, 1, 1];
    assert_eq!(bp_decode_bit(&code, p_star - 1e-6, &y, 1).unwrap(), 1);
    assert_eq!(bp_decode_bit(&code, p_star + 1e-6, &y, 1).unwrap(), 0);
}

#[test]
fn node_rules_match_raw_llr_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..10_000 {
        let (l1, l2): (f64, f64) = (rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0));
        let (m1, m2) = (LlrMessage::from_llr(l1), LlrMessage::from_llr(l2));
        assert!((bp_equality(m1, m2).llr() - (l1 + l2)).abs() < 1e-12);
        let raw = 2.0 * ((l1 / 2.0).tanh() * (l2 / 2.0).tanh()).atanh();
        assert!((bp_check(m1, m2).llr() - raw).abs() < 1e-12, "{l1} {l2}");
    }
}
