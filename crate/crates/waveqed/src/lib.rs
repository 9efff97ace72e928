//! Single-excitation dynamics of a three-qubit chain coupled to an open 1D waveguide.
//!
//! Units are canonical throughout: rates and frequency offsets in units of the
//! edge-qubit decay rate, times in units of its inverse. Amplitudes live in the
//! rotating frame of each qubit.

pub mod amplitude_dynamics;
pub mod chain_model;
pub mod collective_states;
pub mod effective_hamiltonian;
pub mod linalg;
pub mod pv_quadrature;
pub mod spectroscopy;

mod error;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

pub use chain_model::{AmplitudeTrajectory, ChainConfig, ComplexRoots};
