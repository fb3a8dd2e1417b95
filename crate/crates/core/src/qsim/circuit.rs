use std::collections::HashMap;

use nalgebra::Matrix4;

use super::gates::u_ostar;
use super::state::PureState;
use crate::error::{BpqmError, Result};
use crate::mpg::{CompiledMpg, NodeKind};

/// A gate of the decoding circuit.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Cnot {
        control: usize,
        target: usize,
    },
    /// Uniformly controlled equality unitary: for control pattern `p` (bit `t`
    /// is the value of `controls[t]`) apply `U_⊛(table[p].0, table[p].1)`, or
    /// its adjoint, to `(data1, data2)`.
    UcuStar {
        data1: usize,
        data2: usize,
        controls: Vec<usize>,
        table: Vec<(f64, f64)>,
        adjoint: bool,
        mats: Vec<Matrix4<f64>>,
    },
    Hadamard(usize),
}

impl Gate {
    pub fn ucu_star(data1: usize, data2: usize, controls: Vec<usize>, table: Vec<(f64, f64)>) -> Self {
        let mats = table.iter().map(|&(a, b)| u_ostar(a, b)).collect();
        Gate::UcuStar { data1, data2, controls, table, adjoint: false, mats }
    }

    pub fn inverse(&self) -> Self {
        match self {
            Gate::UcuStar { data1, data2, controls, table, adjoint, mats } => Gate::UcuStar {
                data1: *data1,
                data2: *data2,
                controls: controls.clone(),
                table: table.clone(),
                adjoint: !adjoint,
                mats: mats.iter().map(|m| m.transpose()).collect(),
            },
            other => other.clone(),
        }
    }

    fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::UcuStar { data1, data2, controls, .. } => {
                let mut q = vec![*data1, *data2];
                q.extend(controls);
                q
            }
            Gate::Hadamard(q) => vec![*q],
        }
    }

    fn remap(&self, map: &[usize]) -> Self {
        match self {
            Gate::Cnot { control, target } => Gate::Cnot { control: map[*control], target: map[*target] },
            Gate::UcuStar { data1, data2, controls, table, adjoint, mats } => Gate::UcuStar {
                data1: map[*data1],
                data2: map[*data2],
                controls: controls.iter().map(|&c| map[c]).collect(),
                table: table.clone(),
                adjoint: *adjoint,
                mats: mats.clone(),
            },
            Gate::Hadamard(q) => Gate::Hadamard(map[*q]),
        }
    }

    fn apply(&self, state: &mut PureState) {
        match self {
            Gate::Cnot { control, target } => state.cnot(*control, *target),
            Gate::UcuStar { data1, data2, controls, mats, .. } => {
                state.apply_controlled_two_qubit(*data1, *data2, controls, mats)
            }
            Gate::Hadamard(q) => state.hadamard(*q),
        }
    }
}

/// An ordered gate list on a fixed number of qubits.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, gates: Vec::new() }
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if let Some(q) = gate.qubits().into_iter().find(|&q| q >= self.num_qubits) {
            return Err(BpqmError::InvalidArgument(format!(
                "qubit {q} out of range for a {}-qubit circuit",
                self.num_qubits
            )));
        }
        if let Gate::UcuStar { controls, table, .. } = &gate {
            if table.len() != 1 << controls.len() {
                return Err(BpqmError::InvalidArgument("control table size mismatch".into()));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Append another circuit's gates.
    pub fn extend(&mut self, other: &Circuit) {
        self.num_qubits = self.num_qubits.max(other.num_qubits);
        self.gates.extend(other.gates.iter().cloned());
    }

    pub fn inverse(&self) -> Self {
        Self { num_qubits: self.num_qubits, gates: self.gates.iter().rev().map(Gate::inverse).collect() }
    }

    /// Relabel qubit `q` as `map[q]` on a register of `num_qubits` qubits.
    pub fn remap(&self, map: &[usize], num_qubits: usize) -> Self {
        Self { num_qubits, gates: self.gates.iter().map(|g| g.remap(map)).collect() }
    }

    pub fn count_cnots(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Cnot { .. })).count()
    }

    pub fn count_ucu(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::UcuStar { .. })).count()
    }

    fn check_state(&self, state: &PureState) -> Result<()> {
        if state.num_qubits() < self.num_qubits {
            return Err(BpqmError::InvalidArgument(format!(
                "circuit needs {} qubits, state has {}",
                self.num_qubits,
                state.num_qubits()
            )));
        }
        Ok(())
    }

    pub fn apply(&self, state: &mut PureState) -> Result<()> {
        self.check_state(state)?;
        for g in &self.gates {
            g.apply(state);
        }
        Ok(())
    }

    pub fn apply_inverse(&self, state: &mut PureState) -> Result<()> {
        self.check_state(state)?;
        for g in self.gates.iter().rev() {
            g.inverse().apply(state);
        }
        Ok(())
    }
}

/// Where each subsystem of the decoding unitary lives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QubitRoles {
    /// Qubit holding the root data (D).
    pub data: usize,
    /// Check-outcome qubits (A), in root check-list order.
    pub ancillas: Vec<usize>,
    /// Qubits returned to |0⟩ by equality nodes (Z).
    pub zeros: Vec<usize>,
    /// Data qubit of every MPG node, indexed like the MPG arena.
    pub node_data: Vec<usize>,
}

/// Compile the decoding unitary `V_r` of a compiled MPG. Qubit `i` carries
/// the channel output of code bit `i+1`.
pub fn build_vr(compiled: &CompiledMpg) -> Result<(Circuit, QubitRoles)> {
    let mpg = &compiled.mpg;
    let mut circuit = Circuit::new(mpg.n);
    let mut check_qubit: HashMap<usize, usize> = HashMap::new();
    let mut zeros = Vec::new();
    let node_data: Vec<usize> = mpg.nodes.iter().map(|n| n.data_qubit()).collect();
    for (i, node) in mpg.nodes.iter().enumerate() {
        let Some((a, b)) = node.children else { continue };
        let (qa, qb) = (node_data[a], node_data[b]);
        match node.kind {
            NodeKind::Check => {
                circuit.push(Gate::Cnot { control: qa, target: qb })?;
                check_qubit.insert(node.id, qb);
            }
            NodeKind::Equality => {
                let m = compiled.check_lists[a].len();
                let controls: Vec<usize> = compiled.check_lists[i].iter().map(|id| check_qubit[id]).collect();
                let mask = (1usize << m) - 1;
                let table: Vec<(f64, f64)> = (0..1usize << controls.len())
                    .map(|p| (compiled.branches[a][p & mask].angle, compiled.branches[b][p >> m].angle))
                    .collect();
                circuit.push(Gate::ucu_star(qa, qb, controls, table))?;
                zeros.push(qb);
            }
            NodeKind::Channel { .. } => unreachable!(),
        }
    }
    let ancillas = compiled.root_check_list().iter().map(|id| check_qubit[id]).collect();
    let roles = QubitRoles { data: node_data[mpg.root()], ancillas, zeros, node_data };
    Ok((circuit, roles))
}
