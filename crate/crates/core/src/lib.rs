//! Pseudo-Hermitian three-mode cavity-magnonic model: third-order
//! exceptional points, coherent-perfect-absorption spectra and the
//! sensitivity of both to a bias-field perturbation.
//!
//! Internally every rate and detuning is an angular frequency in rad/µs
//! (2π × MHz). Conversion to ordinary MHz happens only at I/O boundaries;
//! see [`units`].

pub mod cubic;
pub mod device;
pub mod eigen;
pub mod error;
pub mod params;
pub mod sensing;
pub mod spectrum;
pub mod units;

pub use cubic::{cardano_roots, cubic_coeffs, monic_cubic_roots, ComplexTriple, CubicCoeffs};
pub use eigen::{
    eigenvalues_on_manifold, eigenvectors_on_manifold, locate_ep3, matrix_eigenvalues, verify_ep3,
    Ep3Check, Ep3Point,
};
pub use error::{Error, Result};
pub use params::{SymmetricParams, SystemParams, Tolerances};
pub use sensing::{
    exact_eigenshift, sensitivity_chain, ChainSettings, Perturbation, SensitivityChain,
    SensitivityReport,
};
pub use spectrum::{cpa_drive, find_dip, total_output, total_output_spectrum, DipReport, DriveParams, SpectrumTrace};

pub use num_complex::Complex64;
