//! Exact statevector simulation of the decoding circuits.

pub mod circuit;
pub mod decode;
pub mod gates;
pub mod state;

pub use circuit::{build_vr, Circuit, Gate, QubitRoles};
pub use decode::{
    bpqm_bit_success, bpqm_bit_success_given, bpqm_block_success, bpqm_block_success_average, branch_decomposition,
    default_order, validate_order, BitCircuit, Branch,
};
pub use gates::{u_from_rotations, u_ostar};
pub use state::{channel_state, channel_state_mask, PureState, MAX_QUBITS};
