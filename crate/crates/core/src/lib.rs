//! Exact solver for the two-state, one-mode coupled harmonic diabatic model
//! and the electron-vibration entanglement of its vibronic eigenstates.
//!
//! All numerics live here and need only `alloc`. IO, presets, sweeps and the
//! command-line front end are in the `vibronic-cli` crate.
//!
//! ```
//! use vibronic_core::{hamiltonian, entanglement, model::ModelParams};
//!
//! let params = ModelParams::new(0.0, 1.0, -0.5, 1.2, "hbar_omega").unwrap();
//! let sol = hamiltonian::auto_solve(&params, 2, 1e-6).unwrap();
//! let report = entanglement::analyze(sol.state(0), sol.n_used).unwrap();
//! assert!(report.entropy > 0.0 && report.entropy < 1.0);
//! ```

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod density;
pub mod diabatization;
mod eigen;
pub mod entanglement;
mod error;
pub mod hamiltonian;
mod math;
pub mod model;
pub mod perturbation;
pub mod point;

pub use error::{Error, Result};
pub use hamiltonian::{BasisSpec, SymmetricMatrix, VibronicSolution};
pub use model::{DerivedQuantities, DimensionlessPoint, ModelParams};
