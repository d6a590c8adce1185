use thiserror::Error;

use crate::numerics::{InterpError, QuadratureError, QuadratureSpecError, RootError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    QuadratureSpec(#[from] QuadratureSpecError),
    #[error(transparent)]
    Interpolation(#[from] InterpError),
    #[error("unphysical input: {0}")]
    Root(#[from] RootError),
    #[error("{model} permittivity diverges at ζ = 0")]
    DivergentAtZero { model: &'static str },
    #[error("imaginary frequency must be finite and non-negative, got {0}")]
    InvalidFrequency(f64),
    #[error(
        "incomplete spectrum: table starts at ω = {omega_min} eV without a low-frequency \
         extrapolation, but ζ = {zeta} eV needs data below {limit} eV"
    )]
    IncompleteSpectrum {
        omega_min: f64,
        zeta: f64,
        limit: f64,
    },
    #[error("spectral variable t = {0} lies in [0, 1]; the representation is singular there")]
    SingularSpectralDomain(f64),
    #[error("eccentricity must lie in [0, 1), got {0}")]
    InvalidEccentricity(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
