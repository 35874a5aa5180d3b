//! Spin–pseudospin entanglement of the SU(2)×SU(2) Kugel–Khomskii chain.
//!
//! The pipeline is: [`model::build_hamiltonian`] → [`spectra::diagonalize`] →
//! [`thermal::thermal_density_matrix`] → [`entanglement::logarithmic_negativity`].
//! [`sweep`] strings these together over parameter grids and fits `1/N`
//! extrapolations.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature; float intrinsics then come from `libm`
//! (`--no-default-features --features libm`).
#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(not(any(feature = "std", feature = "libm")))]
compile_error!("enable either the `std` or the `libm` feature");

extern crate alloc;

pub mod entanglement;
pub mod error;
mod math;
pub mod model;
pub mod observables;
pub mod spectra;
pub mod sweep;
pub mod thermal;

pub use entanglement::{logarithmic_negativity, partial_transpose, trace_norm, NegativityResult, Subsystem};
pub use error::{Error, Result};
pub use model::{build_hamiltonian, field_profile, FieldPattern, FieldSpec, ModelParams, SiteCap, SparseSymMatrix};
pub use observables::{compute_observables, expectation, ObservableSet};
pub use spectra::{diagonalize, SpectralDecomposition};
pub use sweep::{evaluate_point, expand_grid, extrapolate, Cut, ExtrapolationResult, GridRange, SweepSpec};
pub use thermal::{free_energy, thermal_density_matrix, DensityMatrix};

pub use faer::Mat;
