//! Complete eigensolution of a laser-driven trapped ion in the strong-excitation
//! regime, without the Lamb-Dicke or rotating-wave approximations.
//!
//! The spin-conditioned displaced Fock bases reduce the problem to a dense
//! real symmetric eigenproblem (see [`hamiltonian::build_displaced_hamiltonian`]).
//! Bare-basis, lab-frame and rotating-wave representations are built alongside
//! it for cross-checks and comparison.

mod dd;
pub mod hamiltonian;
pub mod model;
pub mod overlap;
pub mod registry;
pub mod solver;
pub mod states;

pub use hamiltonian::{RwaLabel, RwaLevel, SymmetricMatrix};
pub use model::{BasisSpec, ModelError, ModelParams};
pub use num_complex::Complex64;
pub use overlap::{OverlapError, OverlapKernel, OverlapMatrix};
pub use registry::{overlap_kernels, representations, Registry, Representation};
pub use solver::{solve_spectrum, solve_spectrum_with, LevelVector, SolverError, SpectralResult};
pub use states::{Frame, QuantumState, Spin, StateError};
