//! Compile social-worker routing and robot picking problems to QUBO and
//! Ising form, then solve them by enumeration, backtracking, simulated
//! annealing, or simulated VQE and QAOA.

pub mod decode;
pub mod error;
pub mod instance;
pub mod io;
pub mod ising;
pub mod qubo;
pub mod solvers;
pub mod tables;
pub mod vqsim;

pub use error::{Error, Result};
pub use instance::{DistanceMatrix, QRobotInstance, SwpInstance, WeightMatrix};
pub use io::{Instance, ProblemKind};
pub use ising::{IsingModel, PauliTerm, PauliTermList};
pub use qubo::QuboModel;
pub use solvers::{Backend, Solution};
