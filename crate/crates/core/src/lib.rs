//! Exact-arithmetic workbench for covariant Morita theory at desk scale.
//!
//! Everything here is computed over the Gaussian rationals: model
//! *-algebras given by structure constants, truncated enveloping-algebra
//! Hopf calculus, convolution unitaries and their winding classes in first
//! Lie-algebra cohomology, equivalence bimodules with exact positivity
//! certificates, and Picard group enumeration for finite function algebras.
//! No floating point is used anywhere; every verdict is a decision, not an
//! approximation.

pub mod algebra;
pub mod bimodule;
pub mod cohomology;
pub mod convolution;
pub mod hopf;
pub mod intlin;
pub mod lie;
pub mod lift;
pub mod linalg;
pub mod picard;
pub mod problem;
pub mod report;
pub mod runner;
pub mod scalar;
pub mod scenarios;

use thiserror::Error;

/// Failure modes surfaced across the workbench.
///
/// Construction errors (`Model`, `Input`) mean the problem statement is
/// malformed; `TruncationOverflow` means a product escaped the enveloping
/// algebra truncation and the run must be redone with a larger order;
/// `Internal` flags an inconsistency between two routes that should agree.
#[derive(Debug, Error)]
pub enum Error {
    #[error("scalar parse error: {0}")]
    Scalar(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("truncation overflow: product of degrees {0} and {1} exceeds order {2}")]
    TruncationOverflow(u32, u32, u32),
    #[error("input error at {path}: {message}")]
    Input { path: String, message: String },
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Input {
            path: path.into(),
            message: message.into(),
        }
    }
}
