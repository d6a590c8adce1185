//! Effective dielectric functions of metal-in-dielectric composites and the
//! zero-temperature Lifshitz force between two composite slabs.
//!
//! Permittivities are always evaluated on the imaginary frequency axis,
//! `ε(iζ)`, with `ζ` expressed as a photon energy in eV. On that axis every
//! passive material has a real permittivity `≥ 1`, which is what the mixing
//! rules and the force integrand consume.
//!
//! Module map:
//! - [`numerics`]: adaptive quadrature, the positive quadratic root, log-log interpolation
//! - [`dielectric`]: Drude, oscillator and tabulated (Kramers-Kronig rotated) models
//! - [`mixing`]: Wiener, Hashin-Shtrikman, Maxwell-Garnett, Bruggeman, Looyenga,
//!   spectral-representation and ellipsoidal mixing rules
//! - [`lifshitz`]: force per unit area and reduction factor between two slabs
//! - [`ingestion`]: material and scenario files

pub mod dielectric;
mod error;
pub mod ingestion;
pub mod lifshitz;
pub mod mixing;
pub mod numerics;
pub mod units;

pub use error::{Error, Result};
