//! Dense statevector simulation of the ancilla-controlled correlation circuit.

pub mod exact;
pub mod hadamard;
pub mod pauli;
pub mod state;
pub mod trotter;

pub use exact::{exact_correlation, exact_ground_energy, ExactCorrelator, Spectrum};
pub use hadamard::{correlation, hadamard_test, CircuitCorrelator, Part, ShotConfig, Shots};
pub use pauli::{build_tfim, Pauli, PauliHamiltonian, PauliString};
pub use state::StateVector;
pub use trotter::{trotter_step_sequence, PauliRotation};
