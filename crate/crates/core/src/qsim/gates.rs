//! Two-qubit matrices. Basis index is `2·bit(first) + bit(second)`.

use nalgebra::{Matrix2, Matrix4};

/// The coefficients `(a₊, a₋, b₊, b₋)` of the equality unitary, from the
/// products of half-angle sines and cosines normalized to unit pairs.
pub fn ostar_coefficients(alpha: f64, beta: f64) -> (f64, f64, f64, f64) {
    let (sa, ca) = (alpha / 2.0).sin_cos();
    let (sb, cb) = (beta / 2.0).sin_cos();
    let unit = |x: f64, y: f64| {
        let h = x.hypot(y);
        if h > 0.0 {
            (x / h, y / h)
        } else {
            (1.0, 0.0)
        }
    };
    let (a_plus, a_minus) = unit(ca * cb, sa * sb);
    let (b_plus, b_minus) = unit(sa * cb, ca * sb);
    (a_plus, a_minus, b_plus, b_minus)
}

/// The equality-node unitary `U_⊛(α, β)`, which maps `|x,α⟩|x,β⟩` to
/// `|x, α⊛β⟩|0⟩` for both values of `x`.
pub fn u_ostar(alpha: f64, beta: f64) -> Matrix4<f64> {
    let (a_plus, a_minus, b_plus, b_minus) = ostar_coefficients(alpha, beta);
    #[rustfmt::skip]
    let u = Matrix4::new(
        a_plus,   0.0,     0.0,      a_minus,
        -a_minus, 0.0,     0.0,      a_plus,
        0.0,      b_minus, b_plus,   0.0,
        0.0,      b_plus,  -b_minus, 0.0,
    );
    u
}

/// `R_y(φ) = [[cos φ/2, −sin φ/2], [sin φ/2, cos φ/2]]`.
pub fn ry(phi: f64) -> Matrix2<f64> {
    let (s, c) = (phi / 2.0).sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// CNOT with the first qubit as control.
pub fn cnot_first() -> Matrix4<f64> {
    permutation([0, 1, 3, 2])
}

/// CNOT with the second qubit as control.
pub fn cnot_second() -> Matrix4<f64> {
    permutation([0, 3, 2, 1])
}

fn permutation(p: [usize; 4]) -> Matrix4<f64> {
    Matrix4::from_fn(|r, c| if p[c] == r { 1.0 } else { 0.0 })
}

/// `1 ⊗ m`: a single-qubit gate on the second qubit.
pub fn on_second(m: &Matrix2<f64>) -> Matrix4<f64> {
    Matrix4::from_fn(|r, c| if r / 2 == c / 2 { m[(r % 2, c % 2)] } else { 0.0 })
}

/// The equality unitary rebuilt from two rotations: a CNOT controlled by the
/// second qubit, `R_y(α)` on the second qubit, CNOT, `R_y(β)`, CNOT.
pub fn u_from_rotations(alpha: f64, beta: f64) -> Matrix4<f64> {
    let cx = cnot_first();
    cx * on_second(&ry(beta)) * cx * on_second(&ry(alpha)) * cnot_second()
}

/// Frobenius distance between two matrices up to a global sign.
pub fn distance_up_to_sign(a: &Matrix4<f64>, b: &Matrix4<f64>) -> f64 {
    (a - b).norm().min((a + b).norm())
}
