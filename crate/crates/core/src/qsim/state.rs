use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{BpqmError, Result};

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 22;

/// A pure state on `n` qubits. Qubit `q` is bit `q` of the basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n: usize,
    amps: Vec<Complex64>,
}

/// Single-qubit amplitudes of the channel output `|x, θ⟩`.
#[inline]
pub fn channel_amplitudes(x: u8, theta: f64) -> [f64; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [c, if x & 1 == 0 { s } else { -s }]
}

/// Visit every basis index whose bits at `lo < hi` are both zero.
#[inline]
fn for_each_base2(dim: usize, lo: usize, hi: usize, mut f: impl FnMut(usize)) {
    let quarter = dim >> 2;
    let lo_mask = (1usize << lo) - 1;
    let hi_mask = (1usize << hi) - 1;
    for c in 0..quarter {
        // Insert a zero at `lo`, then a zero at `hi`.
        let t = ((c & !lo_mask) << 1) | (c & lo_mask);
        let base = ((t & !hi_mask) << 1) | (t & hi_mask);
        f(base);
    }
}

impl PureState {
    pub fn zero(n: usize) -> Result<Self> {
        check_width(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if !dim.is_power_of_two() {
            return Err(BpqmError::InvalidArgument(format!("{dim} amplitudes is not a power of two")));
        }
        let n = dim.trailing_zeros() as usize;
        check_width(n)?;
        Ok(Self { n, amps })
    }

    /// Product state of single-qubit amplitude pairs, qubit 0 first.
    pub fn product(qubits: &[[Complex64; 2]]) -> Result<Self> {
        check_width(qubits.len())?;
        let mut amps = Vec::with_capacity(1 << qubits.len());
        amps.push(Complex64::new(1.0, 0.0));
        for q in qubits {
            let half = amps.len();
            amps.extend_from_within(..);
            for a in &mut amps[..half] {
                *a *= q[0];
            }
            for a in &mut amps[half..] {
                *a *= q[1];
            }
        }
        Ok(Self { n: qubits.len(), amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Euclidean distance ‖self − other‖.
    pub fn distance(&self, other: &Self) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// `min(‖self − other‖, ‖self + other‖)`: distance up to a global sign.
    pub fn distance_up_to_sign(&self, other: &Self) -> f64 {
        let plus: f64 = self.amps.iter().zip(&other.amps).map(|(a, b)| (a + b).norm_sqr()).sum();
        self.distance(other).min(plus.sqrt())
    }

    /// Append `extra` qubits in |0⟩ above the existing ones.
    pub fn extend_zero(&mut self, extra: usize) -> Result<()> {
        check_width(self.n + extra)?;
        self.amps.resize(1 << (self.n + extra), Complex64::new(0.0, 0.0));
        self.n += extra;
        Ok(())
    }

    /// Tensor product `self ⊗ other` with `other` on the higher qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        check_width(self.n + other.n)?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for b in &other.amps {
            amps.extend(self.amps.iter().map(|a| a * b));
        }
        Ok(Self { n: self.n + other.n, amps })
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        let (cm, tm) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & cm != 0 && i & tm == 0 {
                self.amps.swap(i, i | tm);
            }
        }
    }

    pub fn hadamard(&mut self, q: usize) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m = 1usize << q;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let (a, b) = (self.amps[i], self.amps[i | m]);
                self.amps[i] = (a + b) * h;
                self.amps[i | m] = (a - b) * h;
            }
        }
    }

    /// Apply a real 4×4 matrix to qubits `(q1, q2)`; the matrix index of a
    /// basis state is `2·bit(q1) + bit(q2)`.
    pub fn apply_two_qubit(&mut self, q1: usize, q2: usize, u: &Matrix4<f64>) {
        let (lo, hi) = if q1 < q2 { (q1, q2) } else { (q2, q1) };
        let (m1, m2) = (1usize << q1, 1usize << q2);
        let amps = &mut self.amps;
        for_each_base2(amps.len(), lo, hi, |b| {
            let idx = [b, b | m2, b | m1, b | m1 | m2];
            let v = idx.map(|i| amps[i]);
            for (r, &i) in idx.iter().enumerate() {
                amps[i] = v[0] * u[(r, 0)] + v[1] * u[(r, 1)] + v[2] * u[(r, 2)] + v[3] * u[(r, 3)];
            }
        });
    }

    /// Two-qubit matrix chosen per basis-state pattern of `controls`
    /// (bit `t` of the pattern is the value of `controls[t]`).
    pub fn apply_controlled_two_qubit(&mut self, q1: usize, q2: usize, controls: &[usize], mats: &[Matrix4<f64>]) {
        debug_assert_eq!(mats.len(), 1 << controls.len());
        if controls.is_empty() {
            self.apply_two_qubit(q1, q2, &mats[0]);
            return;
        }
        let (lo, hi) = if q1 < q2 { (q1, q2) } else { (q2, q1) };
        let (m1, m2) = (1usize << q1, 1usize << q2);
        let amps = &mut self.amps;
        for_each_base2(amps.len(), lo, hi, |b| {
            let pattern = controls.iter().enumerate().fold(0usize, |p, (t, &c)| p | (((b >> c) & 1) << t));
            let u = &mats[pattern];
            let idx = [b, b | m2, b | m1, b | m1 | m2];
            let v = idx.map(|i| amps[i]);
            for (r, &i) in idx.iter().enumerate() {
                amps[i] = v[0] * u[(r, 0)] + v[1] * u[(r, 1)] + v[2] * u[(r, 2)] + v[3] * u[(r, 3)];
            }
        });
    }

    /// Project qubit `q` onto `H|b⟩ = (|0⟩ + (−1)^b |1⟩)/√2` without renormalizing.
    pub fn project_x(&mut self, q: usize, b: u8) {
        let m = 1usize << q;
        let sgn = if b & 1 == 0 { 1.0 } else { -1.0 };
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let s = (self.amps[i] + self.amps[i | m] * sgn) * 0.5;
                self.amps[i] = s;
                self.amps[i | m] = s * sgn;
            }
        }
    }

    /// Probability that qubit `q` is found in `H|b⟩`.
    pub fn prob_x(&self, q: usize, b: u8) -> f64 {
        let m = 1usize << q;
        let sgn = if b & 1 == 0 { 1.0 } else { -1.0 };
        (0..self.amps.len())
            .filter(|i| i & m == 0)
            .map(|i| ((self.amps[i] + self.amps[i | m] * sgn) * 0.5).norm_sqr() * 2.0)
            .sum()
    }
}

fn check_width(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(BpqmError::Guard { what: "qubits", value: n, limit: MAX_QUBITS });
    }
    Ok(())
}

/// The joint channel output `⊗_i |x_i, θ_i⟩`.
pub fn channel_state(x: &[u8], thetas: &[f64]) -> Result<PureState> {
    if x.len() != thetas.len() {
        return Err(BpqmError::InvalidArgument(format!(
            "codeword has {} bits but {} angles were given",
            x.len(),
            thetas.len()
        )));
    }
    let qubits: Vec<[Complex64; 2]> =
        x.iter().zip(thetas).map(|(&b, &t)| channel_amplitudes(b, t).map(|a| Complex64::new(a, 0.0))).collect();
    PureState::product(&qubits)
}

/// Channel output for a packed codeword (bit `i` is `x_{i+1}`).
pub fn channel_state_mask(word: u64, thetas: &[f64]) -> Result<PureState> {
    let x: Vec<u8> = (0..thetas.len()).map(|i| ((word >> i) & 1) as u8).collect();
    channel_state(&x, thetas)
}
