//! Message-passing BPQM with B-qubit angle registers, simulated in the
//! compact form: a message is a list of `(p, ρ, c)` with a probability, a
//! one-qubit density matrix for the data, and the cosine held by the angle
//! register.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4};

use crate::codes::BinaryLinearCode;
use crate::error::{BpqmError, Result};
use crate::mpg::{build_mpg, cos_boxstar, Mpg, NodeKind};
use crate::qsim::gates::{cnot_first, ostar_coefficients, u_from_rotations};
use crate::qsim::state::channel_amplitudes;

/// Largest register size accepted; beyond ~52 bits the grid is finer than
/// double precision anyway.
pub const MAX_BITS: u32 = 62;

/// Quantization grids for a B-qubit register, or exact arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuantGrid {
    bits: Option<u32>,
}

impl QuantGrid {
    pub fn new(bits: u32) -> Result<Self> {
        if bits == 0 || bits > MAX_BITS {
            return Err(BpqmError::InvalidArgument(format!("register size {bits} outside 1..={MAX_BITS}")));
        }
        Ok(Self { bits: Some(bits) })
    }

    /// No quantization at all.
    pub fn exact() -> Self {
        Self { bits: None }
    }

    pub fn bits(&self) -> Option<u32> {
        self.bits
    }

    fn size(&self) -> Option<f64> {
        self.bits.map(|b| 2f64.powi(b as i32))
    }

    /// Spacing of the cosine grid, `2/(2^B + 1)`; zero when exact.
    pub fn delta(&self) -> f64 {
        self.size().map_or(0.0, |s| 2.0 / (s + 1.0))
    }

    /// The j-th cosine grid point, `−1 + 2(1+j)/(2^B+1)`.
    pub fn point(&self, j: u64) -> f64 {
        -1.0 + (1 + j) as f64 * self.delta()
    }

    /// All cosine grid points (only sensible for small B).
    pub fn points(&self) -> Vec<f64> {
        match self.bits {
            Some(b) if b <= 20 => (0..1u64 << b).map(|j| self.point(j)).collect(),
            _ => Vec::new(),
        }
    }

    /// Nearest cosine grid point; exact ties go toward −1.
    pub fn quantize(&self, c: f64) -> f64 {
        let Some(size) = self.size() else { return c };
        let t = (c + 1.0) * (size + 1.0) / 2.0 - 1.0;
        let j = (t - 0.5).ceil().clamp(0.0, size - 1.0);
        self.point(j as u64)
    }

    /// Nearest point of the rotation grid `{2πk/(2^B − 1)}`.
    pub fn quantize_rotation(&self, phi: f64) -> f64 {
        let Some(size) = self.size() else { return phi };
        let steps = size - 1.0;
        let k = (phi * steps / (2.0 * PI)).round().clamp(0.0, steps);
        2.0 * PI * k / steps
    }
}

/// Rotation angles `(α, β)`, reduced into [0, 2π), of the two R_y gates that
/// rebuild the equality unitary for the angle cosines `c1, c2`.
pub fn rotation_angles(c1: f64, c2: f64) -> (f64, f64) {
    let (alpha, beta) = raw_rotation_angles(c1, c2);
    (alpha.rem_euclid(2.0 * PI), beta.rem_euclid(2.0 * PI))
}

/// Unreduced rotation angles, in [−2π, 0].
pub fn raw_rotation_angles(c1: f64, c2: f64) -> (f64, f64) {
    let (a_plus, a_minus, b_plus, b_minus) = ostar_coefficients(c1.clamp(-1.0, 1.0).acos(), c2.clamp(-1.0, 1.0).acos());
    let ta = a_minus.atan2(a_plus);
    let tb = b_minus.atan2(b_plus);
    (-ta - tb, -ta + tb)
}

/// The equality unitary as implemented with quantized rotation angles.
pub fn quantized_equality_unitary(c1: f64, c2: f64, grid: &QuantGrid) -> Matrix4<f64> {
    let (alpha, beta) = rotation_angles(c1, c2);
    u_from_rotations(grid.quantize_rotation(alpha), grid.quantize_rotation(beta))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompactEntry {
    pub p: f64,
    pub rho: Matrix2<f64>,
    pub c: f64,
}

/// A message on one MPG edge.
#[derive(Clone, Debug, PartialEq)]
pub struct CompactMessage {
    pub entries: Vec<CompactEntry>,
}

impl CompactMessage {
    /// Channel output `|x, θ⟩` with its cosine snapped to the grid.
    pub fn leaf(x: u8, theta: f64, grid: &QuantGrid) -> Self {
        let [a, b] = channel_amplitudes(x, theta);
        let rho = Matrix2::new(a * a, a * b, a * b, b * b);
        Self { entries: vec![CompactEntry { p: 1.0, rho, c: grid.quantize(theta.cos()) }] }
    }

    pub fn total_probability(&self) -> f64 {
        self.entries.iter().map(|e| e.p).sum()
    }

    /// Probability of reading `m` after a Hadamard and a computational-basis
    /// measurement of the data qubit.
    pub fn success(&self, m: u8) -> f64 {
        let sgn = if m & 1 == 0 { 1.0 } else { -1.0 };
        self.entries
            .iter()
            .map(|e| e.p * 0.5 * (e.rho[(0, 0)] + e.rho[(1, 1)] + sgn * (e.rho[(0, 1)] + e.rho[(1, 0)])))
            .sum()
    }
}

fn kron(a: &Matrix2<f64>, b: &Matrix2<f64>) -> Matrix4<f64> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// Combine two messages at an equality node.
pub fn mp_equality(m1: &CompactMessage, m2: &CompactMessage, grid: &QuantGrid) -> CompactMessage {
    let mut entries = Vec::with_capacity(m1.entries.len() * m2.entries.len());
    for e2 in &m2.entries {
        for e1 in &m1.entries {
            let u = quantized_equality_unitary(e1.c, e2.c, grid);
            let joint = u * kron(&e1.rho, &e2.rho) * u.transpose();
            let rho = Matrix2::from_fn(|a, b| joint[(2 * a, 2 * b)] + joint[(2 * a + 1, 2 * b + 1)]);
            entries.push(CompactEntry { p: e1.p * e2.p, rho, c: grid.quantize(e1.c * e2.c) });
        }
    }
    CompactMessage { entries }
}

/// Combine two messages at a check node; each input pair splits on the
/// measured check outcome `l`.
pub fn mp_check(m1: &CompactMessage, m2: &CompactMessage, grid: &QuantGrid) -> CompactMessage {
    let cx = cnot_first();
    let mut entries = Vec::with_capacity(2 * m1.entries.len() * m2.entries.len());
    for e2 in &m2.entries {
        for e1 in &m1.entries {
            let joint = cx * kron(&e1.rho, &e2.rho) * cx;
            for l in 0..2u8 {
                let li = l as usize;
                let block = Matrix2::from_fn(|a, b| joint[(2 * a + li, 2 * b + li)]);
                let tr = block.trace();
                let rho = if tr < 1e-15 { Matrix2::identity() * 0.5 } else { block / tr };
                entries.push(CompactEntry {
                    p: e1.p * e2.p * tr.max(0.0),
                    rho,
                    c: grid.quantize(cos_boxstar(e1.c, e2.c, l)),
                });
            }
        }
    }
    CompactMessage { entries }
}

/// Run the compact simulation over an MPG for the codeword `x`.
pub fn mp_run(mpg: &Mpg, thetas: &[f64], x: &[u8], grid: &QuantGrid) -> CompactMessage {
    let mut msgs: Vec<CompactMessage> = Vec::with_capacity(mpg.nodes.len());
    for node in &mpg.nodes {
        let m = match (node.kind, node.children) {
            (NodeKind::Channel { leaf }, _) => CompactMessage::leaf(x[leaf], thetas[leaf], grid),
            (NodeKind::Equality, Some((a, b))) => mp_equality(&msgs[a], &msgs[b], grid),
            (NodeKind::Check, Some((a, b))) => mp_check(&msgs[a], &msgs[b], grid),
            _ => unreachable!("internal MPG nodes always have two children"),
        };
        msgs.push(m);
    }
    msgs.pop().expect("an MPG has at least one node")
}

fn check_args(code: &BinaryLinearCode, thetas: &[f64], x: &[u8], r: usize) -> Result<()> {
    if thetas.len() != code.n() || x.len() != code.n() {
        return Err(BpqmError::InvalidArgument(format!(
            "expected {} angles and codeword bits, got {} and {}",
            code.n(),
            thetas.len(),
            x.len()
        )));
    }
    if r == 0 || r > code.n() {
        return Err(BpqmError::BitOutOfRange { index: r, n: code.n() });
    }
    Ok(())
}

/// Root message of the compact simulation for bit `r` (1-based).
pub fn mp_root_message(
    code: &BinaryLinearCode,
    thetas: &[f64],
    x: &[u8],
    r: usize,
    grid: &QuantGrid,
) -> Result<CompactMessage> {
    check_args(code, thetas, x, r)?;
    let mpg = build_mpg(code, r)?;
    Ok(mp_run(&mpg, thetas, x, grid))
}

/// Success probability of discretized BPQM decoding of `X_r` on codeword `x`.
pub fn mp_bit_success(code: &BinaryLinearCode, thetas: &[f64], x: &[u8], r: usize, grid: &QuantGrid) -> Result<f64> {
    Ok(mp_root_message(code, thetas, x, r, grid)?.success(x[r - 1]))
}

/// Suboptimality `ε = |P_exact − P_B|` of discretized decoding of `X_r` on
/// codeword `x`, against the exact statevector decoder.
pub fn suboptimality(code: &BinaryLinearCode, thetas: &[f64], x: &[u8], r: usize, grid: &QuantGrid) -> Result<f64> {
    let exact = crate::qsim::bpqm_bit_success_given(code, thetas, x, r)?;
    Ok((exact - mp_bit_success(code, thetas, x, r, grid)?).abs())
}

/// Closed-form upper bound on the block-success gap of discretized BPQM:
/// `(2^{9/4} √π / √3) · n · 2^{n(3/2 + ½ log2 26) − B/4}`.
pub fn block_gap_bound(n: usize, b: u32) -> f64 {
    let log2 = 9.0 / 4.0 + (PI.sqrt() / 3f64.sqrt()).log2() + (n as f64).log2() + n as f64 * (1.5 + 0.5 * 26f64.log2())
        - b as f64 / 4.0;
    log2.exp2()
}

/// Averaged angle error bound `(2^{n+1} − 3)·δ` for a code of length n.
pub fn angle_error_bound(n: usize, grid: &QuantGrid) -> f64 {
    ((n as f64 + 1.0).exp2() - 3.0) * grid.delta()
}
