//! Belief propagation with quantum messages (BPQM) for binary linear codes
//! sent over pure-state classical-quantum channels.
//!
//! Each channel maps a bit `x` to `cos(θ/2)|0⟩ + (−1)^x sin(θ/2)|1⟩`. The crate
//! provides:
//!
//! * [`codes`]: binary linear codes, Tanner graphs and the built-in benchmark codes.
//! * [`mpg`]: the message-passing graph of a code bit and its compiled branch lists.
//! * [`qsim`]: exact statevector execution of the decoding unitary, bitwise and blockwise.
//! * [`oracles`]: Helstrom and pretty-good-measurement optima and classical MAP baselines.
//! * [`classicalbp`]: classical belief propagation in the (estimate, reliability) form.
//! * [`mpbpqm`]: the discretized message-passing variant in compact (p, ρ, c) form.
//! * [`nontree`]: computation-tree unrolling and approximate cloners for codes with cycles.
//! * [`cli`]: the `bpqm-lab` command line.

pub mod classicalbp;
pub mod cli;
pub mod codes;
pub mod error;
pub mod mpbpqm;
pub mod mpg;
pub mod nontree;
pub mod oracles;
pub mod qsim;

pub use codes::{builtin_code, BinaryLinearCode, TannerGraph};
pub use error::{BpqmError, Result};
pub use mpg::{build_mpg, compile_lists, CompiledMpg, Mpg};
