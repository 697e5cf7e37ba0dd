//! Error type shared by the numerical kernels.

use alloc::string::String;
use core::fmt;

use crate::Complex;

/// Failures surfaced by the numerical kernels.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A grid or solver configuration violates a structural constraint.
    InvalidConfig(String),
    /// A banded factorization hit a zero pivot; carries the shift that
    /// produced the singular matrix.
    SingularShift { shift: Complex },
    /// The spectral parameter sits on (or numerically at) an eigenvalue,
    /// so the Green's function denominator vanishes.
    NearEigenvalue { det_magnitude: f64 },
    /// Newton iteration failed to converge within the iteration budget.
    NewtonDivergence { seed: Complex, iterations: usize },
    /// An argument-principle contour could not be resolved reliably.
    WindingUnresolved,
    /// The advective stability guard rejected the step size.
    CflViolation { ratio: f64 },
    /// A fit was requested on data with no usable points.
    EmptyFit,
    /// A trajectory is too short for the requested analysis.
    TrajectoryTooShort { needed: usize, got: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::SingularShift { shift } => {
                write!(f, "singular banded solve for shift {shift}")
            }
            Error::NearEigenvalue { det_magnitude } => write!(
                f,
                "spectral parameter is numerically an eigenvalue (|det| = {det_magnitude:.3e})"
            ),
            Error::NewtonDivergence { seed, iterations } => write!(
                f,
                "Newton iteration from seed {seed} did not converge in {iterations} steps"
            ),
            Error::WindingUnresolved => {
                write!(f, "argument-principle contour could not be resolved")
            }
            Error::CflViolation { ratio } => write!(
                f,
                "advective stability guard tripped: |a| dt/dx = {ratio:.3} > 0.5"
            ),
            Error::EmptyFit => write!(f, "no data points above the fit floor"),
            Error::TrajectoryTooShort { needed, got } => {
                write!(f, "trajectory too short: need {needed} steps, got {got}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
