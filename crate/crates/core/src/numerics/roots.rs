use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("leading coefficient is zero; not a quadratic")]
    NotQuadratic,
    #[error("negative discriminant {0:e}: no real root")]
    NoRealRoot(f64),
    #[error("expected exactly one strictly positive root, found {0}")]
    Ambiguous(usize),
}

/// Returns the unique strictly positive root of `a2·x² + a1·x + a0 = 0`.
///
/// Roots are formed with the cancellation-free pairing
/// `q = -(a1 + sign(a1)·√D)/2`, `x₁ = q/a2`, `x₂ = a0/q`.
pub fn solve_quadratic_positive(a2: f64, a1: f64, a0: f64) -> Result<f64, RootError> {
    if a2 == 0.0 {
        return Err(RootError::NotQuadratic);
    }
    let disc = a1.mul_add(a1, -4.0 * a2 * a0);
    if disc < 0.0 || disc.is_nan() {
        return Err(RootError::NoRealRoot(disc));
    }
    let sq = disc.sqrt();
    let sign = if a1 < 0.0 { -1.0 } else { 1.0 };
    let q = -0.5 * (a1 + sign * sq);
    if q == 0.0 {
        // a1 = 0 and a0 = 0: double root at the origin.
        return Err(RootError::Ambiguous(0));
    }
    let r1 = q / a2;
    let r2 = a0 / q;
    let candidates: &[f64] = if disc == 0.0 { &[r1] } else { &[r1, r2] };
    let positive: Vec<f64> = candidates.iter().copied().filter(|r| *r > 0.0).collect();
    match positive.as_slice() {
        [r] => Ok(*r),
        other => Err(RootError::Ambiguous(other.len())),
    }
}
