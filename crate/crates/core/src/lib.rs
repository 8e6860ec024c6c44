//! Forward and inverse spectral maps for interlacing two-component peakons.
//!
//! A configuration of `K` mass pairs (masses `m` at odd sites and `n` at even
//! sites of `2K` ordered positions) is mapped to spectral data (two
//! interlacing-free positive spectra with residues and two boundary
//! constants) and back. Peakon time evolution is linear in the logarithms of
//! the residues, so the inverse map doubles as an exact integrator.
//!
//! Modules:
//! - [`core_types`]: value types, the change of variables to (-1, 1), validation
//! - [`transition`]: polynomial transition matrices, the twin involution,
//!   real-line spectral polynomials and wavefunctions
//! - [`forward_spectral`]: eigenvalues, residues and Weyl functions
//! - [`bimoments`]: moments, Cauchy bimoments, subset sums and determinant identities
//! - [`inverse_spectral`]: recovery of a configuration from spectral data
//! - [`approximation`]: the simultaneous rational approximants behind the inverse map
//! - [`dynamics`]: spectral time evolution, the peakon ODE and constants of motion

pub mod approximation;
pub mod bimoments;
pub mod core_types;
pub mod dynamics;
pub mod error;
pub mod forward_spectral;
pub mod inverse_spectral;
pub mod linalg;
pub mod poly;
pub mod sampling;
pub mod scalar;
pub mod transition;
pub mod verify;

pub use core_types::{
    from_interval, to_interval, validate_admissible, AdjointResidues, AdmissibilityReport,
    InterlacingConfiguration, IntervalMeasures, RealLineData, SpectralData,
};
pub use error::{Result, SpectralError};
pub use poly::Polynomial;
pub use scalar::Scalar;
