//! Exact pure-state dynamics of a qubit coupled to two finite spin chains,
//! with trace-distance, mutual-information and discord diagnostics of the
//! information flowing between system and environment.

pub mod error;
pub mod evolve;
pub mod experiments;
pub mod hamiltonian;
mod linalg;
pub mod measures;
pub mod qreg;
pub mod reduce;

pub use error::{Error, ErrorKind, Result};
pub use experiments::{locate_points, run_scenario, PointsABC, ScenarioConfig, ScenarioId};
pub use evolve::{propagate, run_trajectory, Trajectory};
pub use hamiltonian::{build_dense, build_terms, spectral_bound, ModelParams, PauliTerm};
pub use qreg::{bloch_of, make_initial_states, BlochVector, Chain, DensityOp, PureState, QubitLayout};
