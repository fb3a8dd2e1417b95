//! Classical belief propagation on the MPG, with messages split into a bit
//! estimate and a reliability.

use crate::codes::BinaryLinearCode;
use crate::error::{BpqmError, Result};
use crate::mpg::{build_mpg, Mpg, NodeKind};

/// Reliabilities are capped here before any hyperbolic function.
pub const MAX_RELIABILITY: f64 = 700.0;

/// A log-likelihood ratio `l = (−1)^b · c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LlrMessage {
    pub b: u8,
    pub c: f64,
}

impl LlrMessage {
    /// Split an LLR; zero maps to `b = 0`.
    pub fn from_llr(l: f64) -> Self {
        Self { b: u8::from(l < 0.0), c: l.abs() }
    }

    pub fn llr(&self) -> f64 {
        if self.b == 0 {
            self.c
        } else {
            -self.c
        }
    }
}

/// Equality node: the LLRs add.
pub fn bp_equality(m1: LlrMessage, m2: LlrMessage) -> LlrMessage {
    LlrMessage::from_llr(m1.llr() + m2.llr())
}

/// `2 atanh(tanh(c1/2) tanh(c2/2))` for nonnegative reliabilities, written as
/// `log((1 + e^{c1+c2}) / (e^{c1} + e^{c2}))` to stay accurate for large inputs.
fn boxplus_reliability(c1: f64, c2: f64) -> f64 {
    let (c1, c2) = (c1.min(MAX_RELIABILITY), c2.min(MAX_RELIABILITY));
    let (hi, lo) = if c1 >= c2 { (c1, c2) } else { (c2, c1) };
    // Divide numerator and denominator by e^{hi}.
    let num = (-hi).exp() + lo.exp();
    let den = 1.0 + (lo - hi).exp();
    (num.ln() - den.ln()).max(0.0)
}

/// Check node: bits XOR, reliabilities combine through the tanh rule.
pub fn bp_check(m1: LlrMessage, m2: LlrMessage) -> LlrMessage {
    LlrMessage { b: m1.b ^ m2.b, c: boxplus_reliability(m1.c, m2.c) }
}

/// Run BP on an MPG with one leaf message per code bit.
pub fn bp_on_mpg(mpg: &Mpg, leaves: &[LlrMessage]) -> LlrMessage {
    let mut msgs: Vec<LlrMessage> = Vec::with_capacity(mpg.nodes.len());
    for node in &mpg.nodes {
        let m = match (node.kind, node.children) {
            (NodeKind::Channel { leaf }, _) => leaves[leaf],
            (NodeKind::Equality, Some((a, b))) => bp_equality(msgs[a], msgs[b]),
            (NodeKind::Check, Some((a, b))) => bp_check(msgs[a], msgs[b]),
            _ => unreachable!("internal MPG nodes always have two children"),
        };
        msgs.push(m);
    }
    msgs[mpg.root()]
}

/// Decide bit `r` (1-based) from the received word `y` of a BSC with
/// crossover `p`. A zero final LLR decides 0.
pub fn bp_decode_bit(code: &BinaryLinearCode, p: f64, y: &[u8], r: usize) -> Result<u8> {
    if !(p > 0.0 && p < 0.5) {
        return Err(BpqmError::InvalidArgument(format!("crossover {p} outside (0, 1/2)")));
    }
    if y.len() != code.n() {
        return Err(BpqmError::InvalidArgument(format!("received word has {} bits, expected {}", y.len(), code.n())));
    }
    let mpg = build_mpg(code, r)?;
    let c = ((1.0 - p) / p).ln();
    let leaves: Vec<LlrMessage> = y.iter().map(|&b| LlrMessage { b: b & 1, c }).collect();
    Ok(bp_on_mpg(&mpg, &leaves).b)
}
