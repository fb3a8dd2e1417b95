//! The experiment sweeps behind `bpqm-lab experiment`, returning rows in a
//! fixed order whatever the degree of parallelism.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::codes::BinaryLinearCode;
use crate::error::Result;
use crate::mpbpqm::{suboptimality, QuantGrid};
use crate::nontree::{
    code8_subtree_strategies, nontree_bit_success, nontree_block_success, optimal_cloner_sweep, subtree_bit_success,
    Cloner,
};
use crate::oracles::{classical_map_success, helstrom_bit_success, pgm_block_success, Target};
use crate::qsim::default_order;

/// Everything that determines an experiment's output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub code: String,
    pub thetas: Vec<f64>,
    pub theta_primes: Vec<f64>,
    pub bits: Vec<u32>,
    pub depths: Vec<usize>,
    pub order: Vec<usize>,
}

impl ExperimentConfig {
    /// First 16 hex digits of the SHA-256 of the configuration's JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&json).iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// `θ ∈ {0.05π, 0.10π, …, 0.45π}`.
pub fn default_theta_grid() -> Vec<f64> {
    (1..=9).map(|i| 0.05 * i as f64 * PI).collect()
}

/// `θ′ ∈ {0.005π, 0.010π, …, 0.49π}`.
pub fn default_theta_prime_grid() -> Vec<f64> {
    (1..=98).map(|i| 0.005 * i as f64 * PI).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fig12Row {
    #[serde(rename = "B")]
    pub b: u32,
    pub theta: f64,
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fig16Row {
    pub theta: f64,
    pub target: String,
    pub decoder: String,
    pub success: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fig17Row {
    pub theta_prime: f64,
    pub decoder: String,
    pub success: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fig19Row {
    pub theta: f64,
    pub decoder: String,
    pub success: f64,
}

fn progress(msg: &str) {
    eprintln!("[bpqm-lab] {msg}");
}

/// Suboptimality of discretized decoding of bit 1 on the all-zero word, per B.
pub fn fig12(code: &BinaryLinearCode, theta: f64, bits: &[u32]) -> Result<Vec<Fig12Row>> {
    let thetas = vec![theta; code.n()];
    let zero = vec![0u8; code.n()];
    bits.par_iter()
        .map(|&b| {
            let epsilon = suboptimality(code, &thetas, &zero, 1, &QuantGrid::new(b)?)?;
            progress(&format!("fig12 B={b} epsilon={epsilon:.3e}"));
            Ok(Fig12Row { b, theta, epsilon })
        })
        .collect()
}

/// Unrolled decoders against classical and optimal baselines, for bits 1 and
/// 5 and for the whole codeword.
pub fn fig16(code: &BinaryLinearCode, thetas: &[f64], depths: &[usize], order: &[usize]) -> Result<Vec<Fig16Row>> {
    let per_theta: Vec<Vec<Fig16Row>> = thetas
        .par_iter()
        .map(|&theta| {
            let t = vec![theta; code.n()];
            let mut rows = Vec::new();
            let mut push = |target: &str, decoder: String, success: f64| {
                rows.push(Fig16Row { theta, target: target.into(), decoder, success })
            };
            for (target, r) in [("x1", 1usize), ("x5", 5)] {
                for &h in depths {
                    push(target, format!("h{h}"), nontree_bit_success(code, theta, r, h, Cloner::Enu)?);
                }
                push(target, "classical_bitmap".into(), classical_map_success(code, &t, Target::Bit(r))?);
                push(target, "quantum_optimal".into(), helstrom_bit_success(code, &t, r)?);
            }
            for &h in depths {
                push("block", format!("h{h}"), nontree_block_success(code, theta, h, Cloner::Enu, order)?);
            }
            push("block", "classical_blockmap".into(), classical_map_success(code, &t, Target::Block)?);
            push("block", "quantum_optimal".into(), pgm_block_success(code, &t)?);
            progress(&format!("fig16 theta={theta:.4} done"));
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(per_theta.into_iter().flatten().collect())
}

/// Optimal cloner at depth 3 as a function of the decoder's assumed angle,
/// with the ENU and classical values repeated as reference lines.
pub fn fig17(code: &BinaryLinearCode, theta: f64, theta_primes: &[f64]) -> Result<Vec<Fig17Row>> {
    let t = vec![theta; code.n()];
    let sweep = optimal_cloner_sweep(code, theta, 1, 3, theta_primes)?;
    let enu3 = nontree_bit_success(code, theta, 1, 3, Cloner::Enu)?;
    let enu2 = nontree_bit_success(code, theta, 1, 2, Cloner::Enu)?;
    let classical = classical_map_success(code, &t, Target::Bit(1))?;
    progress(&format!("fig17 {} points done", theta_primes.len()));
    Ok(theta_primes
        .iter()
        .zip(sweep)
        .flat_map(|(&tp, s)| {
            [("optimal_cloner", s), ("enu_h3", enu3), ("enu_h2", enu2), ("classical", classical)]
                .map(|(d, v)| Fig17Row { theta_prime: tp, decoder: d.into(), success: v })
        })
        .collect())
}

/// The three cloning-free spanning trees of the (8,4) code against h=1, 2.
pub fn fig19(code: &BinaryLinearCode, thetas: &[f64]) -> Result<Vec<Fig19Row>> {
    let strategies = code8_subtree_strategies();
    let per_theta: Vec<Vec<Fig19Row>> = thetas
        .par_iter()
        .map(|&theta| {
            let mut rows = Vec::new();
            for (i, s) in strategies.iter().enumerate() {
                let success = subtree_bit_success(code, s, theta, 1, None)?;
                rows.push(Fig19Row { theta, decoder: format!("strategy{}", i + 1), success });
            }
            for h in [1, 2] {
                let success = nontree_bit_success(code, theta, 1, h, Cloner::Enu)?;
                rows.push(Fig19Row { theta, decoder: format!("h{h}"), success });
            }
            progress(&format!("fig19 theta={theta:.4} done"));
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(per_theta.into_iter().flatten().collect())
}

/// Default decode order for block experiments.
pub fn block_order(code: &BinaryLinearCode) -> Vec<usize> {
    default_order(code)
}
