//! Two-phase mixing formulas for spherical inclusions.
//!
//! Every function takes the already-evaluated imaginary-axis permittivities
//! of the inclusion (`eps_i`) and host (`eps_h`), both ≥ 1. The `f = 0`,
//! `f = 1` and `eps_i = eps_h` limits are returned exactly.

use super::FillingFraction;
use crate::numerics::solve_quadratic_positive;
use crate::Result;

fn trivial(eps_i: f64, eps_h: f64, f: FillingFraction) -> Option<f64> {
    let f = f.value();
    if f == 0.0 || eps_i == eps_h {
        Some(eps_h)
    } else if f == 1.0 {
        Some(eps_i)
    } else {
        None
    }
}

/// Harmonic (lower) and arithmetic (upper) averages.
pub fn wiener_bounds(eps_i: f64, eps_h: f64, f: FillingFraction) -> (f64, f64) {
    if let Some(e) = trivial(eps_i, eps_h, f) {
        return (e, e);
    }
    let f = f.value();
    let lower = eps_i * eps_h / (f * eps_h + (1.0 - f) * eps_i);
    let upper = f * eps_i + (1.0 - f) * eps_h;
    (lower, upper)
}

/// Hashin-Shtrikman bounds for an isotropic two-phase mixture, ordered so
/// that `lower <= upper` whichever phase has the larger permittivity.
pub fn hashin_shtrikman_bounds(eps_i: f64, eps_h: f64, f: FillingFraction) -> (f64, f64) {
    if let Some(e) = trivial(eps_i, eps_h, f) {
        return (e, e);
    }
    let f = f.value();
    // Host-as-matrix and inclusion-as-matrix Maxwell-Garnett forms.
    let host_matrix = eps_h + eps_h * f / (eps_h / (eps_i - eps_h) + (1.0 - f) / 3.0);
    let incl_matrix = eps_i + (1.0 - f) * eps_i / (eps_i / (eps_h - eps_i) + f / 3.0);
    if host_matrix <= incl_matrix {
        (host_matrix, incl_matrix)
    } else {
        (incl_matrix, host_matrix)
    }
}

/// `ε_h (1 + 2fα) / (1 − fα)` with `α = (ε_i − ε_h)/(ε_i + 2ε_h)`.
pub fn maxwell_garnett(eps_i: f64, eps_h: f64, f: FillingFraction) -> f64 {
    if let Some(e) = trivial(eps_i, eps_h, f) {
        return e;
    }
    let f = f.value();
    let alpha = (eps_i - eps_h) / (eps_i + 2.0 * eps_h);
    eps_h * (1.0 + 2.0 * f * alpha) / (1.0 - f * alpha)
}

/// Positive root of `2ε̃² − [(3f−1)ε_i + (2−3f)ε_h] ε̃ − ε_i ε_h = 0`.
pub fn bruggeman_sphere(eps_i: f64, eps_h: f64, f: FillingFraction) -> Result<f64> {
    if let Some(e) = trivial(eps_i, eps_h, f) {
        return Ok(e);
    }
    let f = f.value();
    let b = (3.0 * f - 1.0) * eps_i + (2.0 - 3.0 * f) * eps_h;
    Ok(solve_quadratic_positive(2.0, -b, -eps_i * eps_h)?)
}

/// Residual of the symmetric self-consistency condition for spheres.
pub fn bruggeman_residual(eps_i: f64, eps_h: f64, f: FillingFraction, eps_eff: f64) -> f64 {
    let f = f.value();
    f * (eps_i - eps_eff) / (eps_i + 2.0 * eps_eff)
        + (1.0 - f) * (eps_h - eps_eff) / (eps_h + 2.0 * eps_eff)
}

/// `(f ε_i^{1/3} + (1−f) ε_h^{1/3})³`.
pub fn looyenga(eps_i: f64, eps_h: f64, f: FillingFraction) -> f64 {
    if let Some(e) = trivial(eps_i, eps_h, f) {
        return e;
    }
    let f = f.value();
    (f * eps_i.cbrt() + (1.0 - f) * eps_h.cbrt()).powi(3)
}
