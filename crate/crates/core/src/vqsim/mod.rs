//! Statevector simulation of variational circuits.

mod circuit;
mod optim;
mod state;
mod vqe;

pub use circuit::{build_ansatz, AnsatzForm, Entanglement, Op, ParamCircuit};
pub use optim::{nelder_mead, spsa_minimize, NelderMeadConfig, OptimResult, SpsaConfig};
pub use state::{
    apply_gate, expectation, max_qubits, sampled_expectation, Gate, Statevector, DEFAULT_MAX_QUBITS,
};
pub use vqe::{
    qaoa_state, run_qaoa, run_vqe, Optimizer, QaoaOptions, QaoaResult, VariationalResult, VqeResult,
};
