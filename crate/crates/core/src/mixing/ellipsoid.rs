//! Ellipsoidal inclusions: depolarization factors and the generalized
//! Maxwell-Garnett and Bruggeman closures.

use super::FillingFraction;
use crate::numerics::solve_quadratic_positive;
use crate::{Error, Result};

/// Depolarization factors `(L_a, L_b, L_c)` of a prolate spheroid with
/// semi-axes `a > b = c` and eccentricity `e = √(1 − b²/a²)`.
///
/// `L_a = (1 − e²)/(2e³) · [ln((1 + e)/(1 − e)) − 2e]`, `L_b = L_c = (1 − L_a)/2`.
pub fn depolarization_prolate(e: f64) -> Result<[f64; 3]> {
    if !(0.0..1.0).contains(&e) {
        return Err(Error::InvalidEccentricity(e));
    }
    if e == 0.0 {
        return Ok([1.0 / 3.0; 3]);
    }
    let la = if e < 0.1 {
        // (1 − e²) Σ_{k≥1} e^{2k−2}/(2k+1); the closed form cancels badly here.
        let e2 = e * e;
        let mut sum = 0.0;
        let mut pow = 1.0;
        let mut k = 1;
        loop {
            let term = pow / (2 * k + 1) as f64;
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
            pow *= e2;
            k += 1;
        }
        (1.0 - e2) * sum
    } else {
        (1.0 - e * e) / (2.0 * e.powi(3)) * (((1.0 + e) / (1.0 - e)).ln() - 2.0 * e)
    };
    let lb = 0.5 * (1.0 - la);
    Ok([la, lb, lb])
}

/// Checks that `l` is a valid depolarization triple.
pub fn validate_depolarization(l: &[f64; 3]) -> Result<()> {
    if l.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::InvalidParameter(format!(
            "depolarization factors must lie in [0, 1], got {l:?}"
        )));
    }
    let sum: f64 = l.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "depolarization factors must sum to 1, got {sum}"
        )));
    }
    Ok(())
}

/// Output of the ellipsoidal Maxwell-Garnett closure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EllipsoidResponse {
    /// Randomly oriented inclusions: one isotropic value.
    Isotropic(f64),
    /// Inclusions aligned with the frame: one value per principal axis.
    PerAxis([f64; 3]),
}

/// Maxwell-Garnett for ellipsoids with depolarization factors `l`.
///
/// With `β_j = Δ/(ε_h + L_j Δ)` and `Δ = ε_i − ε_h`, the aligned composite
/// along axis `j` is `ε_h + f ε_h Δ / (ε_h + (1 − f) L_j Δ)` and the
/// orientation average is
/// `ε_h + ε_h (f/3) Σβ_j / (1 − (f/3) Σ L_j β_j)`.
/// Both reduce to the spherical formula when every `L_j = 1/3`.
pub fn maxwell_garnett_ellipsoid(
    eps_i: f64,
    eps_h: f64,
    f: FillingFraction,
    l: &[f64; 3],
    axis_average: bool,
) -> Result<EllipsoidResponse> {
    validate_depolarization(l)?;
    let f = f.value();
    let delta = eps_i - eps_h;
    if axis_average {
        if f == 0.0 || delta == 0.0 {
            return Ok(EllipsoidResponse::Isotropic(eps_h));
        }
        let beta = l.map(|lj| delta / (eps_h + lj * delta));
        let num: f64 = beta.iter().sum::<f64>() * f / 3.0;
        let den: f64 = 1.0 - f / 3.0 * l.iter().zip(&beta).map(|(lj, b)| lj * b).sum::<f64>();
        Ok(EllipsoidResponse::Isotropic(eps_h + eps_h * num / den))
    } else {
        let per_axis = l.map(|lj| {
            if f == 0.0 || delta == 0.0 {
                eps_h
            } else {
                eps_h + f * eps_h * delta / (eps_h + (1.0 - f) * lj * delta)
            }
        });
        Ok(EllipsoidResponse::PerAxis(per_axis))
    }
}

/// Positive root of
/// `f (ε_i − ε̃)/(ε_i + (1/L − 1) ε̃) + (1 − f)(ε_h − ε̃)/(ε_h + (1/L − 1) ε̃) = 0`.
pub fn bruggeman_ellipsoid(eps_i: f64, eps_h: f64, f: FillingFraction, l: f64) -> Result<f64> {
    if !(l > 0.0 && l < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "depolarization factor must lie in (0, 1), got {l}"
        )));
    }
    let fv = f.value();
    if fv == 0.0 || eps_i == eps_h {
        return Ok(eps_h);
    }
    if fv == 1.0 {
        return Ok(eps_i);
    }
    let n = 1.0 / l - 1.0;
    let b = fv * (n * eps_i - eps_h) + (1.0 - fv) * (n * eps_h - eps_i);
    Ok(solve_quadratic_positive(n, -b, -eps_i * eps_h)?)
}

/// Residual of the ellipsoidal Bruggeman condition.
pub fn bruggeman_ellipsoid_residual(
    eps_i: f64,
    eps_h: f64,
    f: FillingFraction,
    l: f64,
    eps_eff: f64,
) -> f64 {
    let f = f.value();
    let n = 1.0 / l - 1.0;
    f * (eps_i - eps_eff) / (eps_i + n * eps_eff)
        + (1.0 - f) * (eps_h - eps_eff) / (eps_h + n * eps_eff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixing::{bruggeman_sphere, maxwell_garnett};

    fn ff(f: f64) -> FillingFraction {
        FillingFraction::new(f).unwrap()
    }

    #[test]
    fn sphere_limit_is_exact() {
        assert_eq!(depolarization_prolate(0.0).unwrap(), [1.0 / 3.0; 3]);
    }

    #[test]
    fn half_eccentricity() {
        let l = depolarization_prolate(0.5).unwrap();
        let expected = 3.0 * (3.0f64.ln() - 1.0);
        assert!((l[0] - expected).abs() < 1e-14);
        assert!((l[0] - 0.29584).abs() < 1e-5);
        assert!((l[1] - 0.35208).abs() < 1e-5);
        assert_eq!(l[1], l[2]);
    }

    #[test]
    fn series_matches_closed_form_at_switch() {
        let e: f64 = 0.1;
        let closed = (1.0 - e * e) / (2.0 * e * e * e) * (((1.0 + e) / (1.0 - e)).ln() - 2.0 * e);
        let series = depolarization_prolate(e - 1e-15).unwrap()[0];
        assert!((closed - series).abs() < 1e-12);
        let small = depolarization_prolate(1e-4).unwrap()[0];
        assert!((small - (1.0 / 3.0 - 2.0 * 1e-8 / 15.0)).abs() < 1e-16);
    }

    #[test]
    fn needle_limit_and_monotonicity() {
        let near = depolarization_prolate(1.0 - 1e-12).unwrap()[0];
        assert!(near < 1e-9);
        let mut prev = depolarization_prolate(0.0).unwrap()[0];
        for k in 1..1000 {
            let la = depolarization_prolate(k as f64 / 1000.0).unwrap()[0];
            assert!(la < prev, "not decreasing at e = {}", k as f64 / 1000.0);
            prev = la;
        }
    }

    #[test]
    fn invalid_eccentricity() {
        assert!(matches!(
            depolarization_prolate(1.0),
            Err(Error::InvalidEccentricity(_))
        ));
        assert!(depolarization_prolate(-0.1).is_err());
    }

    #[test]
    fn triples_sum_to_one() {
        for k in 0..100 {
            let l = depolarization_prolate(k as f64 / 100.0).unwrap();
            assert!((l.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mg_ellipsoid_sphere_reduction() {
        let sphere = [1.0 / 3.0; 3];
        let iso = maxwell_garnett_ellipsoid(3.0, 1.0, ff(0.1), &sphere, true).unwrap();
        match iso {
            EllipsoidResponse::Isotropic(v) => assert!((v - 1.125).abs() < 1e-14),
            other => panic!("{other:?}"),
        }
        if let EllipsoidResponse::PerAxis(v) =
            maxwell_garnett_ellipsoid(3.0, 1.0, ff(0.1), &sphere, false).unwrap()
        {
            for x in v {
                assert!((x - maxwell_garnett(3.0, 1.0, ff(0.1))).abs() < 1e-14);
            }
        } else {
            panic!("expected per-axis output");
        }
    }

    #[test]
    fn mg_ellipsoid_trivial_limits() {
        let l = depolarization_prolate(0.8).unwrap();
        assert_eq!(
            maxwell_garnett_ellipsoid(5.0, 2.0, ff(0.0), &l, true).unwrap(),
            EllipsoidResponse::Isotropic(2.0)
        );
        assert_eq!(
            maxwell_garnett_ellipsoid(2.0, 2.0, ff(0.4), &l, false).unwrap(),
            EllipsoidResponse::PerAxis([2.0; 3])
        );
    }

    #[test]
    fn bruggeman_ellipsoid_limits() {
        let v = bruggeman_ellipsoid(10.0, 1.0, ff(0.5), 1.0 / 3.0).unwrap();
        assert!((v - 4.0).abs() < 1e-14);
        assert!((v - bruggeman_sphere(10.0, 1.0, ff(0.5)).unwrap()).abs() < 1e-14);
        assert_eq!(bruggeman_ellipsoid(10.0, 1.0, ff(0.0), 0.1).unwrap(), 1.0);
        assert_eq!(bruggeman_ellipsoid(10.0, 1.0, ff(1.0), 0.1).unwrap(), 10.0);
        assert!(bruggeman_ellipsoid(10.0, 1.0, ff(0.5), 0.0).is_err());
        let l = 0.12;
        let r = bruggeman_ellipsoid(50.0, 2.0, ff(0.3), l).unwrap();
        assert!(bruggeman_ellipsoid_residual(50.0, 2.0, ff(0.3), l, r).abs() < 1e-12);
    }
}
