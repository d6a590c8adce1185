//! Spectral (Bergman-Milton) representation of the effective permittivity:
//! `ε̃ = ε_h (1 − f ∫₀¹ G(L)/(t − L) dL)` with `t = ε_h/(ε_h − ε_i)`.

use super::FillingFraction;
use crate::numerics::{integrate_adaptive, InterpolationTable, QuadratureSpec};
use crate::{Error, Result};

/// A delta-function contribution `w δ(L − position)` to `G(L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPole {
    pub weight: f64,
    pub position: f64,
}

/// Geometry-only spectral density over depolarization values in `[0, 1]`.
///
/// Poles plus an optional piecewise-linear continuous density, normalized
/// so the total weight is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    poles: Vec<SpectralPole>,
    continuous: Option<InterpolationTable>,
}

impl SpectralFunction {
    pub const SUM_RULE_TOL: f64 = 1e-6;

    pub fn new(poles: Vec<SpectralPole>, continuous: Option<InterpolationTable>) -> Result<Self> {
        for (k, p) in poles.iter().enumerate() {
            if !(p.weight > 0.0 && p.weight.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "spectral pole {k}: weight must be positive, got {}",
                    p.weight
                )));
            }
            if !(0.0..=1.0).contains(&p.position) {
                return Err(Error::InvalidParameter(format!(
                    "spectral pole {k}: position must lie in [0, 1], got {}",
                    p.position
                )));
            }
        }
        let mut total: f64 = poles.iter().map(|p| p.weight).sum();
        if let Some(c) = &continuous {
            let (lo, hi) = (c.first().0, c.last().0);
            if lo < 0.0 || hi > 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "continuous spectral density must live on [0, 1], got [{lo}, {hi}]"
                )));
            }
            if c.ordinates().iter().any(|g| *g < 0.0) {
                return Err(Error::InvalidParameter(
                    "continuous spectral density must be non-negative".into(),
                ));
            }
            total += c.trapezoid();
        }
        if (total - 1.0).abs() > Self::SUM_RULE_TOL {
            return Err(Error::InvalidParameter(format!(
                "spectral sum rule violated: total weight {total} != 1"
            )));
        }
        Ok(Self { poles, continuous })
    }

    /// `G(L) = δ(L − (1 − f)/3)`, which reproduces Maxwell-Garnett.
    pub fn maxwell_garnett(f: FillingFraction) -> Self {
        Self {
            poles: vec![SpectralPole {
                weight: 1.0,
                position: (1.0 - f.value()) / 3.0,
            }],
            continuous: None,
        }
    }

    pub fn poles(&self) -> &[SpectralPole] {
        &self.poles
    }

    pub fn continuous(&self) -> Option<&InterpolationTable> {
        self.continuous.as_ref()
    }
}

pub fn spectral_eval(
    g: &SpectralFunction,
    eps_i: f64,
    eps_h: f64,
    f: FillingFraction,
) -> Result<f64> {
    let fv = f.value();
    if fv == 0.0 || eps_i == eps_h {
        return Ok(eps_h);
    }
    let t = eps_h / (eps_h - eps_i);
    if (0.0..=1.0).contains(&t) {
        return Err(Error::SingularSpectralDomain(t));
    }
    let mut integral: f64 = g.poles.iter().map(|p| p.weight / (t - p.position)).sum();
    if let Some(c) = &g.continuous {
        let q = QuadratureSpec::new(1e-10, 1e-15, 200)?;
        for (l, d) in c.abscissae().windows(2).zip(c.ordinates().windows(2)) {
            let slope = (d[1] - d[0]) / (l[1] - l[0]);
            integral +=
                integrate_adaptive(|x| (d[0] + slope * (x - l[0])) / (t - x), l[0], l[1], &q)?
                    .value;
        }
    }
    Ok(eps_h * (1.0 - fv * integral))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixing::maxwell_garnett;

    fn ff(f: f64) -> FillingFraction {
        FillingFraction::new(f).unwrap()
    }

    #[test]
    fn single_pole_reproduces_maxwell_garnett() {
        let g = SpectralFunction::maxwell_garnett(ff(0.1));
        let v = spectral_eval(&g, 3.0, 1.0, ff(0.1)).unwrap();
        assert!((v - 1.125).abs() < 1e-14);
        assert!((v - maxwell_garnett(3.0, 1.0, ff(0.1))).abs() < 1e-14);
    }

    #[test]
    fn trivial_limits() {
        let g = SpectralFunction::maxwell_garnett(ff(0.3));
        assert_eq!(spectral_eval(&g, 5.0, 2.0, ff(0.0)).unwrap(), 2.0);
        assert_eq!(spectral_eval(&g, 2.0, 2.0, ff(0.3)).unwrap(), 2.0);
    }

    #[test]
    fn singular_domain_rejected() {
        // t ∈ [0, 1] needs ε_i ≤ 0, which never happens on the imaginary axis.
        let g = SpectralFunction::maxwell_garnett(ff(0.3));
        assert!(matches!(
            spectral_eval(&g, -1.0, 1.0, ff(0.3)),
            Err(Error::SingularSpectralDomain(_))
        ));
    }

    #[test]
    fn sum_rule_enforced() {
        let bad = SpectralFunction::new(
            vec![SpectralPole {
                weight: 0.5,
                position: 0.2,
            }],
            None,
        );
        assert!(bad.is_err());
        let out_of_range = SpectralFunction::new(
            vec![SpectralPole {
                weight: 1.0,
                position: 1.2,
            }],
            None,
        );
        assert!(out_of_range.is_err());
    }

    #[test]
    fn continuous_density_matches_narrow_pole() {
        // A narrow triangle of unit weight at L0 approximates δ(L − L0).
        let l0 = 0.25;
        let w = 1e-4;
        let c = InterpolationTable::new(vec![l0 - w, l0, l0 + w], vec![0.0, 1.0 / w, 0.0]).unwrap();
        let g = SpectralFunction::new(vec![], Some(c)).unwrap();
        let pole = SpectralFunction::new(
            vec![SpectralPole {
                weight: 1.0,
                position: l0,
            }],
            None,
        )
        .unwrap();
        let a = spectral_eval(&g, 20.0, 2.0, ff(0.2)).unwrap();
        let b = spectral_eval(&pole, 20.0, 2.0, ff(0.2)).unwrap();
        assert!(((a - b) / b).abs() < 1e-7);
    }
}
