//! Exact statevector simulation of Pauli-rotation/CNOT circuits.

mod circuit;
mod gradient;
mod jet;
mod state;

pub use circuit::{run_circuit, shifted_expectation, Circuit, Gate, GateKind, GateShift, Observable};
pub use gradient::{adjoint_gradient, shift_rule_gradient, shifted_adjoint_gradient};
pub use jet::{jet_expectation, jet_vjp, Jet, SlotJet};
pub use state::{apply_gate, zero_state, StateVector, MAX_QUBITS};
