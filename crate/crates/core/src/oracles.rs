//! Optimal quantum decoders and classical baselines.
//!
//! The channel outputs `|Ψ_x⟩` of the codewords are linearly independent, so
//! every quantity here lives in their 2^k-dimensional span and is computed
//! from the Gram matrix `G[x][y] = ⟨Ψ_x|Ψ_y⟩ = ∏_{i: x_i≠y_i} cos θ_i`.

use faer::{Mat, Side};
use serde::Serialize;

use crate::codes::BinaryLinearCode;
use crate::error::{BpqmError, Result};

/// Largest code dimension handled by the Gram-matrix oracles.
pub const MAX_ORACLE_K: usize = 14;
/// Largest block length for the exhaustive classical MAP baselines.
pub const MAX_MAP_N: usize = 20;
/// Eigenvalues below this fraction of the largest are treated as zero.
pub const EIG_RTOL: f64 = 1e-12;

/// Binary entropy in bits.
pub fn h2(p: f64) -> f64 {
    let term = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    term(p) + term(1.0 - p)
}

/// Crossover probability of the BSC induced by measuring `|x,θ⟩` in the |±⟩ basis.
pub fn classical_bsc_param(theta: f64) -> f64 {
    (1.0 - theta.sin()) / 2.0
}

/// Holevo capacity χ and the capacity C of the measured channel.
pub fn capacities(theta: f64) -> (f64, f64) {
    let chi = h2((1.0 + theta.cos()) / 2.0);
    let c = 1.0 - h2(classical_bsc_param(theta));
    (chi, c)
}

/// Product of `values[i]` over the set bits of a word, using byte tables.
struct BitProduct {
    tables: Vec<[f64; 256]>,
}

impl BitProduct {
    fn new(values: &[f64]) -> Self {
        let tables = values
            .chunks(8)
            .map(|chunk| {
                let mut t = [1.0; 256];
                for (e, slot) in t.iter_mut().enumerate() {
                    *slot = chunk.iter().enumerate().filter(|(b, _)| e >> b & 1 == 1).map(|(_, v)| v).product();
                }
                t
            })
            .collect();
        Self { tables }
    }

    #[inline]
    fn eval(&self, word: u64) -> f64 {
        self.tables.iter().enumerate().map(|(c, t)| t[((word >> (8 * c)) & 0xff) as usize]).product()
    }
}

/// Gram matrix of the channel outputs of `words` (packed codewords).
pub fn gram_matrix(words: &[u64], thetas: &[f64]) -> Mat<f64> {
    let cosines: Vec<f64> = thetas.iter().map(|t| t.cos()).collect();
    let prod = BitProduct::new(&cosines);
    Mat::from_fn(words.len(), words.len(), |i, j| prod.eval(words[i] ^ words[j]))
}

/// Principal square root of a Gram matrix and its spectral condition number.
pub struct GramRoot {
    pub sqrt: Mat<f64>,
    pub condition_number: f64,
}

/// Principal square root via a symmetric eigendecomposition. Eigenvalues
/// below `EIG_RTOL · λ_max` are treated as zero, giving a pseudo-root for
/// numerically singular matrices.
pub fn gram_sqrt(g: &Mat<f64>) -> Result<GramRoot> {
    let n = g.nrows();
    let evd = g
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| BpqmError::InvalidArgument(format!("eigendecomposition failed: {e:?}")))?;
    let lambda = evd.S().column_vector();
    let u = evd.U();
    let lmax = (0..n).map(|i| lambda[i]).fold(0.0f64, f64::max);
    let lmin = (0..n).map(|i| lambda[i]).fold(f64::INFINITY, f64::min);
    let cut = EIG_RTOL * lmax;
    let root: Vec<f64> = (0..n).map(|i| if lambda[i] > cut { lambda[i].sqrt() } else { 0.0 }).collect();
    let scaled = Mat::from_fn(n, n, |i, j| u[(i, j)] * root[j]);
    let sqrt = &scaled * u.transpose();
    let condition_number = if lmin > cut { lmax / lmin } else { f64::INFINITY };
    Ok(GramRoot { sqrt, condition_number })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleValue {
    pub success: f64,
    pub condition_number: f64,
}

fn check_inputs(code: &BinaryLinearCode, thetas: &[f64]) -> Result<()> {
    if thetas.len() != code.n() {
        return Err(BpqmError::InvalidArgument(format!(
            "{} angles supplied for a length-{} code",
            thetas.len(),
            code.n()
        )));
    }
    if code.k() > MAX_ORACLE_K {
        return Err(BpqmError::Guard { what: "k", value: code.k(), limit: MAX_ORACLE_K });
    }
    Ok(())
}

/// Equal-prior success of the pretty-good measurement on an arbitrary list of
/// codewords: `(1/N) Σ_x (G^{1/2})[x][x]²`.
pub fn pgm_success_for_words(words: &[u64], thetas: &[f64]) -> Result<OracleValue> {
    let root = gram_sqrt(&gram_matrix(words, thetas))?;
    let n = words.len();
    let success = (0..n).map(|i| root.sqrt[(i, i)].powi(2)).sum::<f64>() / n as f64;
    Ok(OracleValue { success, condition_number: root.condition_number })
}

/// Optimal block-decoding success probability.
pub fn pgm_block_success(code: &BinaryLinearCode, thetas: &[f64]) -> Result<f64> {
    Ok(pgm_block_report(code, thetas)?.success)
}

pub fn pgm_block_report(code: &BinaryLinearCode, thetas: &[f64]) -> Result<OracleValue> {
    check_inputs(code, thetas)?;
    pgm_success_for_words(&code.codeword_masks()?, thetas)
}

/// Helstrom success for distinguishing the uniform mixtures of the codewords
/// in `words` with bit `r` (1-based) equal to 0 versus 1.
pub fn helstrom_success_for_words(words: &[u64], thetas: &[f64], r: usize) -> Result<OracleValue> {
    let n = words.len();
    let zeros = words.iter().filter(|&&w| (w >> (r - 1)) & 1 == 0).count();
    if zeros == 0 || zeros == n {
        // The bit is constant on the code: it is known without measuring.
        return Ok(OracleValue { success: 1.0, condition_number: 1.0 });
    }
    let root = gram_sqrt(&gram_matrix(words, thetas))?;
    let s = &root.sqrt;
    // Difference of the two mixtures, written in the Löwdin basis.
    let weight = |i: usize| {
        let b = (words[i] >> (r - 1)) & 1;
        if b == 0 {
            1.0 / zeros as f64
        } else {
            -1.0 / (n - zeros) as f64
        }
    };
    let sd = Mat::from_fn(n, n, |i, j| s[(i, j)] * weight(j));
    let delta = &sd * s;
    let eig = delta
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| BpqmError::InvalidArgument(format!("eigendecomposition failed: {e:?}")))?;
    let trace_norm: f64 = eig.iter().map(|v| v.abs()).sum();
    Ok(OracleValue { success: 0.5 + 0.25 * trace_norm, condition_number: root.condition_number })
}

/// Optimal bitwise success probability for bit `r` (1-based).
pub fn helstrom_bit_success(code: &BinaryLinearCode, thetas: &[f64], r: usize) -> Result<f64> {
    Ok(helstrom_bit_report(code, thetas, r)?.success)
}

pub fn helstrom_bit_report(code: &BinaryLinearCode, thetas: &[f64], r: usize) -> Result<OracleValue> {
    check_inputs(code, thetas)?;
    if r == 0 || r > code.n() {
        return Err(BpqmError::BitOutOfRange { index: r, n: code.n() });
    }
    helstrom_success_for_words(&code.codeword_masks()?, thetas, r)
}

/// What a classical decoder is asked to recover.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// Bit `r`, 1-based.
    Bit(usize),
    Block,
}

/// Likelihoods `P(y|x)` of the measured channels, tabulated by error pattern.
struct ErrorTable {
    table: Vec<f64>,
}

impl ErrorTable {
    fn new(ps: &[f64]) -> Self {
        let n = ps.len();
        let mut table = vec![1.0; 1 << n];
        for e in 1..table.len() {
            let i = e.trailing_zeros() as usize;
            let rest = e & (e - 1);
            // Bits below i are clear in e, so table[rest] already has them as
            // "no error"; switch bit i from 1−p to p.
            table[e] = table[rest] / (1.0 - ps[i]) * ps[i];
        }
        let base: f64 = ps.iter().map(|p| 1.0 - p).product();
        for v in &mut table {
            *v *= base;
        }
        Self { table }
    }
}

fn map_inputs(code: &BinaryLinearCode, thetas: &[f64]) -> Result<Vec<f64>> {
    if thetas.len() != code.n() {
        return Err(BpqmError::InvalidArgument(format!(
            "{} angles supplied for a length-{} code",
            thetas.len(),
            code.n()
        )));
    }
    if code.n() > MAX_MAP_N {
        return Err(BpqmError::Guard { what: "n", value: code.n(), limit: MAX_MAP_N });
    }
    Ok(thetas.iter().map(|&t| classical_bsc_param(t)).collect())
}

/// Expected success of measuring every output in the |±⟩ basis and then
/// running MAP decoding on the resulting BSCs, for a uniform codeword prior.
pub fn classical_map_success(code: &BinaryLinearCode, thetas: &[f64], target: Target) -> Result<f64> {
    let ps = map_inputs(code, thetas)?;
    if let Target::Bit(r) = target {
        if r == 0 || r > code.n() {
            return Err(BpqmError::BitOutOfRange { index: r, n: code.n() });
        }
    }
    // BSCs with p = 1/2 or 0 are fine; p = 1 cannot occur for θ ∈ (0, π).
    let table = ErrorTable::new(&ps);
    let words = code.codeword_masks()?;
    let mut total = 0.0;
    for y in 0..1u64 << code.n() {
        total += match target {
            Target::Block => words.iter().map(|&w| table.table[(y ^ w) as usize]).fold(0.0, f64::max),
            Target::Bit(r) => {
                let mut mass = [0.0; 2];
                for &w in &words {
                    mass[((w >> (r - 1)) & 1) as usize] += table.table[(y ^ w) as usize];
                }
                mass[0].max(mass[1])
            }
        };
    }
    Ok(total / words.len() as f64)
}

/// Lexicographic key of a packed word when read as the string x1 x2 … xn.
pub fn lex_key(word: u64, n: usize) -> u64 {
    word.reverse_bits() >> (64 - n)
}

fn near_max(v: f64, max: f64) -> bool {
    v >= max * (1.0 - 1e-12)
}

/// Block-MAP decision on a BSC with per-bit crossover `ps` for the received
/// word `y`; ties go to the lexicographically smallest codeword.
pub fn map_block_decision(code: &BinaryLinearCode, ps: &[f64], y: u64) -> Result<u64> {
    let table = ErrorTable::new(ps);
    let mut words = code.codeword_masks()?;
    words.sort_by_key(|&w| lex_key(w, code.n()));
    let lik: Vec<f64> = words.iter().map(|&w| table.table[(y ^ w) as usize]).collect();
    let max = lik.iter().cloned().fold(0.0, f64::max);
    let i = lik.iter().position(|&v| near_max(v, max)).unwrap_or(0);
    Ok(words[i])
}

/// Bit-MAP decision for bit `r` (1-based); ties go to 0.
pub fn map_bit_decision(code: &BinaryLinearCode, ps: &[f64], y: u64, r: usize) -> Result<u8> {
    let table = ErrorTable::new(ps);
    let mut mass = [0.0; 2];
    for w in code.codeword_masks()? {
        mass[((w >> (r - 1)) & 1) as usize] += table.table[(y ^ w) as usize];
    }
    Ok(if near_max(mass[0], mass[1]) { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::builtin_code;
    use std::f64::consts::PI;

    #[test]
    fn single_channel_oracles() {
        let code = BinaryLinearCode::from_parity_check_with_n(&[], 1).unwrap();
        for t in [0.2, 0.9, 2.0] {
            let expect = (1.0 + f64::sin(t)) / 2.0;
            assert!((pgm_block_success(&code, &[t]).unwrap() - expect).abs() < 1e-12);
            assert!((helstrom_bit_success(&code, &[t], 1).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn orthogonal_outputs() {
        let code = builtin_code("code5").unwrap();
        let t = [PI / 2.0; 5];
        assert!((pgm_block_success(&code, &t).unwrap() - 1.0).abs() < 1e-12);
        assert!((helstrom_bit_success(&code, &t, 3).unwrap() - 1.0).abs() < 1e-12);
        for target in [Target::Block, Target::Bit(2)] {
            assert!((classical_map_success(&code, &t, target).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn capacity_values() {
        let (chi, c) = capacities(PI / 2.0);
        assert!((chi - 1.0).abs() < 1e-12 && (c - 1.0).abs() < 1e-12);
        // χ/C diverges as θ → 0, but only logarithmically.
        let ratio = |t: f64| {
            let (chi, c) = capacities(t);
            chi / c
        };
        assert!(ratio(0.01) > ratio(0.1) && ratio(0.1) > ratio(0.5));
        assert!(ratio(1e-5) > 10.0);
        let (chi, c) = capacities(0.3);
        assert!(chi > c);
        assert!((classical_bsc_param(PI / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn error_table_matches_direct_product() {
        let ps = [0.1, 0.2, 0.3];
        let t = ErrorTable::new(&ps);
        for e in 0..8usize {
            let direct: f64 = (0..3).map(|i| if e >> i & 1 == 1 { ps[i] } else { 1.0 - ps[i] }).product();
            assert!((t.table[e] - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn guards() {
        let code = builtin_code("code17").unwrap();
        // k = 11 is fine for the oracles, n = 17 is fine for MAP.
        assert!(map_inputs(&code, &[1.0; 17]).is_ok());
        assert!(check_inputs(&code, &[1.0; 16]).is_err());
    }
}
