//! Decoding codes whose Tanner graph has cycles: unroll the computation tree
//! of the target bit, copy the channel outputs of repeated variables with an
//! approximate cloner, and run tree BPQM on the unrolled code.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::codes::BinaryLinearCode;
use crate::error::{BpqmError, Result};
use crate::mpg::{build_mpg, compile_lists};
use crate::qsim::{build_vr, channel_state_mask, Circuit, Gate, PureState, QubitRoles};

/// Largest unrolled code accepted.
pub const MAX_UNROLLED: usize = 20;

/// The tree code of a depth-h computation tree.
#[derive(Clone, Debug, PartialEq)]
pub struct UnrollMap {
    /// The unrolled code C′; its Tanner graph is a tree.
    pub code: BinaryLinearCode,
    /// `xi[p]` is the original bit (0-based) behind position `p` of C′.
    pub xi: Vec<usize>,
    /// Original bit → all of its positions in C′, for bits that repeat.
    pub clone_groups: BTreeMap<usize, Vec<usize>>,
    /// Position of the target bit in C′ (0-based).
    pub root: usize,
}

impl UnrollMap {
    /// Image of a packed codeword of C: `λ(x) = (x_ξ(1), …, x_ξ(n′))`.
    pub fn lift(&self, word: u64) -> u64 {
        self.xi.iter().enumerate().fold(0u64, |acc, (p, &i)| acc | (((word >> i) & 1) << p))
    }
}

struct TreeVar {
    orig: usize,
    parent_check: Option<usize>,
}

/// Unroll the Tanner graph of `code` around bit `r` (1-based) for `h` rounds
/// of breadth-first expansion. Each round adds the not-yet-used checks of the
/// current frontier (in H row order) and their other variables (in index
/// order). Positions of C′ number the first occurrence of every original bit
/// in index order, then the repeats in breadth-first order.
pub fn unroll(code: &BinaryLinearCode, r: usize, h: usize) -> Result<UnrollMap> {
    if r == 0 || r > code.n() {
        return Err(BpqmError::BitOutOfRange { index: r, n: code.n() });
    }
    if h == 0 {
        return Err(BpqmError::InvalidArgument("unrolling depth must be at least 1".into()));
    }
    let tg = code.tanner_graph();
    if tg.components() != 1 {
        return Err(BpqmError::InvalidArgument("Tanner graph is not connected".into()));
    }
    let mut vars = vec![TreeVar { orig: r - 1, parent_check: None }];
    // (original check, tree variable indices with the parent first)
    let mut tree_checks: Vec<Vec<usize>> = Vec::new();
    let mut frontier = vec![0usize];
    for _ in 0..h {
        let mut next = Vec::new();
        for &tv in &frontier {
            let (orig, parent) = (vars[tv].orig, vars[tv].parent_check);
            for &c in &tg.var_checks[orig] {
                if Some(c) == parent {
                    continue;
                }
                let mut members = vec![tv];
                for &u in &tg.checks[c] {
                    if u == orig {
                        continue;
                    }
                    vars.push(TreeVar { orig: u, parent_check: Some(c) });
                    if vars.len() > MAX_UNROLLED {
                        return Err(BpqmError::Guard {
                            what: "unrolled code length",
                            value: vars.len(),
                            limit: MAX_UNROLLED,
                        });
                    }
                    members.push(vars.len() - 1);
                    next.push(vars.len() - 1);
                }
                tree_checks.push(members);
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    // Positions: first occurrences sorted by original index, then repeats.
    let mut seen = vec![false; code.n()];
    let mut firsts = Vec::new();
    let mut repeats = Vec::new();
    for (t, v) in vars.iter().enumerate() {
        if seen[v.orig] {
            repeats.push(t);
        } else {
            seen[v.orig] = true;
            firsts.push(t);
        }
    }
    firsts.sort_by_key(|&t| vars[t].orig);
    let order: Vec<usize> = firsts.into_iter().chain(repeats).collect();
    let mut position = vec![0usize; vars.len()];
    for (p, &t) in order.iter().enumerate() {
        position[t] = p;
    }
    let n_prime = vars.len();
    let h_rows: Vec<Vec<u8>> = tree_checks
        .iter()
        .map(|members| {
            let mut row = vec![0u8; n_prime];
            for &t in members {
                row[position[t]] = 1;
            }
            row
        })
        .collect();
    let code_prime = BinaryLinearCode::from_parity_check_with_n(&h_rows, n_prime)?;
    let xi: Vec<usize> = order.iter().map(|&t| vars[t].orig).collect();
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (p, &i) in xi.iter().enumerate() {
        groups.entry(i).or_default().push(p);
    }
    groups.retain(|_, v| v.len() > 1);
    Ok(UnrollMap { code: code_prime, xi, clone_groups: groups, root: position[0] })
}

/// How the channel output of a repeated bit is spread over its copies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cloner {
    /// Product clones at `arccos(cos θ^{1/m})`; the decoder uses that angle.
    Enu,
    /// `U_⊛(θ,θ)†` on the output and one fresh qubit (two copies only); the
    /// decoder assumes the given angle for both copies.
    Optimal { decoder_angle: f64 },
}

/// Clone angle of the ENU cloner with `m` copies.
pub fn enu_angle(theta: f64, m: usize) -> Result<f64> {
    if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2) {
        return Err(BpqmError::InvalidArgument(format!("ENU cloning needs θ in (0, π/2], got {theta}")));
    }
    Ok(theta.cos().max(0.0).powf(1.0 / m as f64).acos())
}

/// Gates that copy the channel output on `orig` onto `ancillas` (fresh |0⟩
/// qubits), plus the angle the decoder should assume for every copy.
pub fn cloner_circuit(
    width: usize,
    orig: usize,
    ancillas: &[usize],
    theta: f64,
    cloner: Cloner,
) -> Result<(Circuit, f64)> {
    let mut circuit = Circuit::new(width);
    let m = ancillas.len() + 1;
    match cloner {
        Cloner::Enu => {
            let clone = enu_angle(theta, m)?;
            let c = clone.cos();
            for (t, &anc) in ancillas.iter().enumerate() {
                // Keep cos^{m−t−1} on the original, hand one factor to the copy.
                let rest = c.powi((m - t - 1) as i32).acos();
                circuit.push(Gate::ucu_star(orig, anc, vec![], vec![(rest, clone)]).inverse())?;
            }
            Ok((circuit, clone))
        }
        Cloner::Optimal { decoder_angle } => {
            if ancillas.len() != 1 {
                return Err(BpqmError::InvalidArgument(format!(
                    "the optimal cloner makes two copies, {m} were requested"
                )));
            }
            circuit.push(Gate::ucu_star(orig, ancillas[0], vec![], vec![(theta, theta)]).inverse())?;
            Ok((circuit, decoder_angle))
        }
    }
}

/// Enlarge `state` by `copies` fresh qubits and clone qubit `orig` into them.
/// Returns the enlarged state and the circuit that was applied (its inverse
/// rewinds the cloning).
pub fn apply_cloner(
    state: &PureState,
    orig: usize,
    copies: usize,
    theta: f64,
    cloner: Cloner,
) -> Result<(PureState, Circuit, f64)> {
    let mut out = state.clone();
    let base = out.num_qubits();
    out.extend_zero(copies)?;
    let ancillas: Vec<usize> = (base..base + copies).collect();
    let (circuit, angle) = cloner_circuit(base + copies, orig, &ancillas, theta, cloner)?;
    circuit.apply(&mut out)?;
    Ok((out, circuit, angle))
}

/// Everything needed to decode one bit through an unrolled code.
#[derive(Clone, Debug)]
pub struct UnrolledDecoder {
    pub map: UnrollMap,
    /// Cloning gates followed by the tree decoding unitary.
    pub circuit: Circuit,
    /// Qubit measured at the end.
    pub data: usize,
    /// Register width (original qubits plus clone scratch qubits).
    pub width: usize,
}

impl UnrolledDecoder {
    /// Build the decoder for bit `r` at depth `h` with uniform channel angle `theta`.
    pub fn new(code: &BinaryLinearCode, theta: f64, r: usize, h: usize, cloner: Cloner) -> Result<Self> {
        let map = unroll(code, r, h)?;
        Self::from_map(code.n(), map, theta, cloner)
    }

    fn from_map(n: usize, map: UnrollMap, theta: f64, cloner: Cloner) -> Result<Self> {
        let n_prime = map.code.n();
        let width = n + n_prime - map.xi.iter().collect::<std::collections::BTreeSet<_>>().len();
        // First occurrence of bit i sits on qubit i, repeats on scratch qubits.
        let mut phys = vec![0usize; n_prime];
        let mut next = n;
        let mut first_seen = vec![false; n];
        for (p, &i) in map.xi.iter().enumerate() {
            if first_seen[i] {
                phys[p] = next;
                next += 1;
            } else {
                first_seen[i] = true;
                phys[p] = i;
            }
        }
        let mut thetas_prime = vec![theta; n_prime];
        let mut circuit = Circuit::new(width);
        for (&i, positions) in &map.clone_groups {
            let ancillas: Vec<usize> = positions.iter().skip(1).map(|&p| phys[p]).collect();
            let (clone_gates, angle) = cloner_circuit(width, i, &ancillas, theta, cloner)?;
            circuit.extend(&clone_gates);
            for &p in positions {
                thetas_prime[p] = angle;
            }
        }
        let compiled = compile_lists(&build_mpg(&map.code, map.root + 1)?, &thetas_prime)?;
        let (tree, roles): (Circuit, QubitRoles) = build_vr(&compiled)?;
        circuit.extend(&tree.remap(&phys, width));
        Ok(Self { data: phys[roles.data], map, circuit, width })
    }
}

fn uniform_check(code: &BinaryLinearCode, theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(BpqmError::InvalidArgument(format!("channel angle {theta} outside (0, π)")));
    }
    if code.n() > crate::qsim::MAX_QUBITS {
        return Err(BpqmError::Guard { what: "n", value: code.n(), limit: crate::qsim::MAX_QUBITS });
    }
    Ok(())
}

fn padded_channel_state(word: u64, thetas: &[f64], width: usize) -> Result<PureState> {
    let mut s = channel_state_mask(word, thetas)?;
    s.extend_zero(width - thetas.len())?;
    Ok(s)
}

/// Average success of decoding bit `r` (1-based) through the depth-h
/// unrolled code, over all codewords of `code`, with every channel at `theta`.
pub fn nontree_bit_success(code: &BinaryLinearCode, theta: f64, r: usize, h: usize, cloner: Cloner) -> Result<f64> {
    uniform_check(code, theta)?;
    let dec = UnrolledDecoder::new(code, theta, r, h, cloner)?;
    let thetas = vec![theta; code.n()];
    let words = code.codeword_masks()?;
    let per: Vec<f64> = words
        .par_iter()
        .map(|&w| {
            let mut s = padded_channel_state(w, &thetas, dec.width)?;
            dec.circuit.apply(&mut s)?;
            Ok(s.prob_x(dec.data, ((w >> (r - 1)) & 1) as u8))
        })
        .collect::<Result<_>>()?;
    Ok(per.iter().sum::<f64>() / words.len() as f64)
}

/// Block success of sequential unrolled decoding with projection and full
/// rewinding (tree unitary and cloners) after each bit, averaged over codewords.
pub fn nontree_block_success(
    code: &BinaryLinearCode,
    theta: f64,
    h: usize,
    cloner: Cloner,
    order: &[usize],
) -> Result<f64> {
    uniform_check(code, theta)?;
    crate::qsim::validate_order(code, order)?;
    let decoders: Vec<UnrolledDecoder> =
        order.iter().map(|&r| UnrolledDecoder::new(code, theta, r, h, cloner)).collect::<Result<_>>()?;
    let width = decoders.iter().map(|d| d.width).max().unwrap_or(code.n());
    let thetas = vec![theta; code.n()];
    let words = code.codeword_masks()?;
    let per: Vec<f64> = words
        .par_iter()
        .map(|&w| {
            let mut s = padded_channel_state(w, &thetas, width)?;
            for (d, &r) in decoders.iter().zip(order) {
                d.circuit.apply(&mut s)?;
                s.project_x(d.data, ((w >> (r - 1)) & 1) as u8);
                d.circuit.apply_inverse(&mut s)?;
            }
            Ok(s.norm_sqr())
        })
        .collect::<Result<_>>()?;
    Ok(per.iter().sum::<f64>() / words.len() as f64)
}

/// Success of decoding bit `r` through the depth-h unrolled code with the
/// optimal cloner, for each assumed decoder angle.
pub fn optimal_cloner_sweep(
    code: &BinaryLinearCode,
    theta: f64,
    r: usize,
    h: usize,
    decoder_angles: &[f64],
) -> Result<Vec<f64>> {
    decoder_angles
        .iter()
        .map(|&a| nontree_bit_success(code, theta, r, h, Cloner::Optimal { decoder_angle: a }))
        .collect()
}

/// A spanning-tree decoder: tree BPQM on the subcode defined by a subset of
/// checks (given as 1-based variable lists), acting on the original qubits.
#[derive(Clone, Debug)]
pub struct SubtreeDecoder {
    pub subcode: BinaryLinearCode,
    /// Original bit (0-based) of each subcode position.
    pub vars: Vec<usize>,
    circuit: Circuit,
    data: usize,
}

impl SubtreeDecoder {
    pub fn new(code: &BinaryLinearCode, checks: &[Vec<usize>], theta: f64, r: usize) -> Result<Self> {
        let mut vars: Vec<usize> = checks.iter().flatten().map(|&v| v - 1).collect();
        vars.sort_unstable();
        vars.dedup();
        if vars.iter().any(|&v| v >= code.n()) {
            return Err(BpqmError::InvalidArgument("subtree check refers to a missing bit".into()));
        }
        let local = |v: usize| vars.iter().position(|&u| u == v - 1).unwrap();
        let rows: Vec<Vec<u8>> = checks
            .iter()
            .map(|c| {
                let mut row = vec![0u8; vars.len()];
                for &v in c {
                    row[local(v)] = 1;
                }
                row
            })
            .collect();
        let subcode = BinaryLinearCode::from_parity_check_with_n(&rows, vars.len())?;
        let root = vars
            .iter()
            .position(|&v| v == r - 1)
            .ok_or_else(|| BpqmError::InvalidArgument(format!("bit {r} is not in the subtree")))?;
        let compiled = compile_lists(&build_mpg(&subcode, root + 1)?, &vec![theta; vars.len()])?;
        let (tree, roles) = build_vr(&compiled)?;
        let circuit = tree.remap(&vars, code.n());
        Ok(Self { data: vars[roles.data], subcode, vars, circuit })
    }

    /// Success on one codeword of the full code.
    pub fn success_on(&self, word: u64, thetas: &[f64], r: usize) -> Result<f64> {
        let mut s = channel_state_mask(word, thetas)?;
        self.circuit.apply(&mut s)?;
        Ok(s.prob_x(self.data, ((word >> (r - 1)) & 1) as u8))
    }
}

/// Average success of a spanning-tree decoder for bit `r`, over the
/// codewords of `code` that satisfy `condition` (bit, value), if given.
pub fn subtree_bit_success(
    code: &BinaryLinearCode,
    checks: &[Vec<usize>],
    theta: f64,
    r: usize,
    condition: Option<(usize, u8)>,
) -> Result<f64> {
    uniform_check(code, theta)?;
    let dec = SubtreeDecoder::new(code, checks, theta, r)?;
    let thetas = vec![theta; code.n()];
    let words: Vec<u64> = code
        .codeword_masks()?
        .into_iter()
        .filter(|w| condition.is_none_or(|(b, v)| ((w >> (b - 1)) & 1) as u8 == v))
        .collect();
    if words.is_empty() {
        return Err(BpqmError::InvalidArgument("no codeword satisfies the condition".into()));
    }
    let per: Vec<f64> = words.par_iter().map(|&w| dec.success_on(w, &thetas, r)).collect::<Result<_>>()?;
    Ok(per.iter().sum::<f64>() / words.len() as f64)
}

/// The three cloning-free spanning trees of the (8,4) code used for bit 1.
pub fn code8_subtree_strategies() -> [Vec<Vec<usize>>; 3] {
    [
        vec![vec![1, 2, 5], vec![1, 4, 8], vec![4, 7], vec![2, 6]],
        vec![vec![1, 2, 5], vec![1, 4, 8], vec![4, 7], vec![2, 3, 6]],
        vec![vec![1, 2, 5], vec![1, 4, 8], vec![3, 4, 7]],
    ]
}
