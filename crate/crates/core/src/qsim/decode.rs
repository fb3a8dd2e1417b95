use num_complex::Complex64;
use rayon::prelude::*;

use super::circuit::{build_vr, Circuit, QubitRoles};
use super::state::{channel_state, channel_state_mask, PureState};
use crate::codes::BinaryLinearCode;
use crate::error::{BpqmError, Result};
use crate::mpg::{build_mpg, compile_lists, CompiledMpg};

/// One ancilla pattern of a post-decoding state.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    /// Bit `t` is the value of `roles.ancillas[t]`.
    pub pattern: u64,
    /// Squared norm of the state restricted to this pattern.
    pub weight: f64,
    /// Normalized data-qubit state, taken on the Z = |0…0⟩ slice.
    pub data: [Complex64; 2],
    /// Weight found outside Z = |0…0⟩.
    pub zero_leak: f64,
}

/// Split a post-`V_r` state by ancilla pattern.
pub fn branch_decomposition(state: &PureState, roles: &QubitRoles) -> Vec<Branch> {
    let m = roles.ancillas.len();
    let zero_mask = roles.zeros.iter().fold(0usize, |acc, &q| acc | (1 << q));
    let dmask = 1usize << roles.data;
    let mut weight = vec![0.0; 1 << m];
    let mut data = vec![[Complex64::new(0.0, 0.0); 2]; 1 << m];
    for (i, a) in state.amplitudes().iter().enumerate() {
        let p = roles.ancillas.iter().enumerate().fold(0usize, |acc, (t, &q)| acc | (((i >> q) & 1) << t));
        weight[p] += a.norm_sqr();
        if i & zero_mask == 0 {
            data[p][usize::from(i & dmask != 0)] = *a;
        }
    }
    (0..1 << m)
        .map(|p| {
            let [a0, a1] = data[p];
            let on_zero = a0.norm_sqr() + a1.norm_sqr();
            let norm = on_zero.sqrt();
            let data = if norm > 0.0 { [a0 / norm, a1 / norm] } else { [a0, a1] };
            Branch { pattern: p as u64, weight: weight[p], data, zero_leak: (weight[p] - on_zero).max(0.0) }
        })
        .collect()
}

/// The compiled MPG and circuit for one target bit.
#[derive(Clone, Debug)]
pub struct BitCircuit {
    pub compiled: CompiledMpg,
    pub circuit: Circuit,
    pub roles: QubitRoles,
}

impl BitCircuit {
    /// `r` is 1-based.
    pub fn new(code: &BinaryLinearCode, thetas: &[f64], r: usize) -> Result<Self> {
        let compiled = compile_lists(&build_mpg(code, r)?, thetas)?;
        let (circuit, roles) = build_vr(&compiled)?;
        Ok(Self { compiled, circuit, roles })
    }

    /// Probability of decoding bit `x_r` correctly from this state.
    pub fn success_on(&self, state: &PureState, x_r: u8) -> Result<f64> {
        let mut s = state.clone();
        self.circuit.apply(&mut s)?;
        Ok(s.prob_x(self.roles.data, x_r))
    }
}

fn check_thetas(code: &BinaryLinearCode, thetas: &[f64]) -> Result<()> {
    if thetas.len() != code.n() {
        return Err(BpqmError::InvalidArgument(format!(
            "{} angles supplied for a length-{} code",
            thetas.len(),
            code.n()
        )));
    }
    Ok(())
}

/// Success probability of bitwise decoding of `X_r` on the codeword `x`.
pub fn bpqm_bit_success_given(code: &BinaryLinearCode, thetas: &[f64], x: &[u8], r: usize) -> Result<f64> {
    check_thetas(code, thetas)?;
    let bc = BitCircuit::new(code, thetas, r)?;
    bc.success_on(&channel_state(x, thetas)?, x[r - 1])
}

/// Success probability of bitwise decoding of `X_r` (1-based), averaged over
/// all codewords with a uniform prior.
pub fn bpqm_bit_success(code: &BinaryLinearCode, thetas: &[f64], r: usize) -> Result<f64> {
    check_thetas(code, thetas)?;
    let bc = BitCircuit::new(code, thetas, r)?;
    let words = code.codeword_masks()?;
    let per_word: Vec<f64> = words
        .par_iter()
        .map(|&w| bc.success_on(&channel_state_mask(w, thetas)?, ((w >> (r - 1)) & 1) as u8))
        .collect::<Result<_>>()?;
    Ok(per_word.iter().sum::<f64>() / words.len() as f64)
}

/// Default block decoding order: the code's information set, 1-based.
pub fn default_order(code: &BinaryLinearCode) -> Vec<usize> {
    code.information_set().iter().map(|&i| i + 1).collect()
}

/// Check that `order` (1-based positions) is an information set.
pub fn validate_order(code: &BinaryLinearCode, order: &[usize]) -> Result<()> {
    if order.iter().any(|&r| r == 0 || r > code.n()) {
        return Err(BpqmError::BadOrder(format!("{order:?} has positions outside 1..={}", code.n())));
    }
    let zero_based: Vec<usize> = order.iter().map(|&r| r - 1).collect();
    if !code.is_information_set(&zero_based) {
        return Err(BpqmError::BadOrder(format!("{order:?}")));
    }
    Ok(())
}

/// Block success of sequential decoding: for each bit in `order`, apply
/// `V_r`, project the root data qubit onto `H|x_r⟩` and rewind with `V_r†`.
/// The result is the squared norm of the final unnormalized state.
pub fn bpqm_block_success(code: &BinaryLinearCode, thetas: &[f64], x: &[u8], order: &[usize]) -> Result<f64> {
    check_thetas(code, thetas)?;
    validate_order(code, order)?;
    let mut state = channel_state(x, thetas)?;
    for &r in order {
        let bc = BitCircuit::new(code, thetas, r)?;
        bc.circuit.apply(&mut state)?;
        state.project_x(bc.roles.data, x[r - 1]);
        bc.circuit.apply_inverse(&mut state)?;
    }
    Ok(state.norm_sqr())
}

/// Block success of sequential decoding averaged over all codewords.
pub fn bpqm_block_success_average(code: &BinaryLinearCode, thetas: &[f64], order: &[usize]) -> Result<f64> {
    check_thetas(code, thetas)?;
    validate_order(code, order)?;
    let words = code.codewords()?;
    let per_word: Vec<f64> =
        words.par_iter().map(|x| bpqm_block_success(code, thetas, x, order)).collect::<Result<_>>()?;
    Ok(per_word.iter().sum::<f64>() / words.len() as f64)
}
