//! Complex energy bands, biorthogonal eigensystems, complex Berry curvature and
//! Berry phase, gap classification and quantum Hall admittance for the
//! two-dimensional non-Hermitian Dirac model `H(k) = h(k)·σ` with
//! `h(k) = (kx + iκx, ky + iκy, m + iδ)`.
//!
//! Crate layout:
//!
//! - [`model`]: parameters, the complex field `h(k)` and the complex bands.
//! - [`eigensystem`]: right/left eigenvectors, biorthonormalisation, projectors.
//! - [`berry`]: connection and curvature of the occupied band by three routes.
//! - [`integration`]: Berry phase by quadrature and by the closed-form
//!   continuum expressions.
//! - [`spectral`]: band scans, point/line gap classification, exceptional points.
//! - [`response`]: Hall admittance, susceptance, quantum capacitance/inductance.
//! - [`cli`]: the `nhadm` command-line front end.
//!
//! Throughout, the occupied band is `E_- = -E_+`, where `E_+` is the principal
//! square root of `h·h` (real part non-negative). The occupied band is therefore
//! the one with non-positive real energy.

pub mod berry;
pub mod cli;
pub mod eigensystem;
mod error;
pub mod integration;
pub mod linalg;
pub mod model;
pub mod response;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Version string embedded in every report and CSV header.
pub fn version_string() -> String {
    format!("nhadm {}", env!("CARGO_PKG_VERSION"))
}
