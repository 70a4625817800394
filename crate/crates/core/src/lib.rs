//! Spacing distributions of mixed random-matrix ensembles.
//!
//! The crate is layered bottom-up:
//!
//! - [`numerics`]: special functions and quadrature, no random-matrix knowledge.
//! - [`surmise`]: closed-form and quadrature-backed spacing densities of the
//!   2×2 / 4×4 mixed ensembles, their constants and asymptotes.
//! - [`ensembles`]: seeded samplers for large Poisson/GOE/GUE/GSE matrices and
//!   their mixtures, plus eigenvalue extraction.
//! - [`spectra`]: windowed spacing extraction, histograms, local densities.
//! - [`fit`]: the λ-grid L₂ fit and the density–coupling linear fit.
//!
//! All densities are normalized to unit area and unit mean spacing.

pub mod ensembles;
pub mod fit;
pub mod numerics;
pub mod spectra;
pub mod surmise;

use thiserror::Error;

/// Toolkit version embedded in every output document.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: estimate {estimate:e}, error estimate {error:e}")]
    Convergence { estimate: f64, error: f64 },

    #[error("eigensolver failed on a {dim}×{dim} matrix (max |entry| = {max_abs:e})")]
    Eigen { dim: usize, max_abs: f64 },

    #[error("empty sample: {0}")]
    EmptySample(String),

    #[error("optimizer did not converge: {0}")]
    Optimizer(String),

    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Best available value carried by a convergence failure, NaN otherwise.
    pub fn best_estimate(&self) -> f64 {
        match self {
            Self::Convergence { estimate, .. } => *estimate,
            _ => f64::NAN,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
