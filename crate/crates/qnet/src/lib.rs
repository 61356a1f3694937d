//! Simulation and analysis of iterated random controlled-unitary
//! interactions on a qubit network: exact asymptotic states, attractor-space
//! verification, and two-qubit entanglement (fragility/robustness) analysis.
//!
//! Register convention: qubit 0 is the most significant bit of every basis
//! index; system qubits come first, environment qubits after them.
//! Superoperators use column-stacking vectorization. See [`qmat`] for the
//! worked conventions and [`tol::Tolerances`] for every numerical cutoff.

pub mod asymptotics;
pub mod attractors;
pub mod channel;
pub mod entanglement;
pub mod error;
pub mod network;
pub mod par;
pub mod qmat;
pub mod report;
pub mod tol;

pub use error::{QnetError, Result};
pub use qmat::{CMat, CVec, DensityMatrix, PureState, C64};
