//! Material permittivities on the imaginary frequency axis.
//!
//! Closed-form models (Drude, undamped oscillator sums) are evaluated
//! directly. Tabulated loss spectra are rotated with the Kramers-Kronig
//! relation
//!
//! ```text
//! ε(iζ) = 1 + (2/π) ∫₀^∞ ω ε''(ω) / (ω² + ζ²) dω
//! ```
//!
//! split into a low-frequency piece below the first sample (analytic, from
//! the Drude extrapolation), the sampled range (log-log interpolated), and a
//! power-law tail above the last sample.

use std::f64::consts::FRAC_2_PI;

use crate::numerics::{integrate_adaptive, InterpolationTable, QuadratureSpec};
use crate::{Error, Result};

/// Imaginary frequency `ζ`, stored as the photon energy `ħζ` in eV.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ImaginaryFrequency(f64);

impl ImaginaryFrequency {
    pub fn new(zeta_ev: f64) -> Result<Self> {
        if zeta_ev.is_finite() && zeta_ev >= 0.0 {
            Ok(Self(zeta_ev))
        } else {
            Err(Error::InvalidFrequency(zeta_ev))
        }
    }

    pub fn ev(self) -> f64 {
        self.0
    }
}

/// Free-electron response: plasma frequency and damping, both in eV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrudeParams {
    plasma_ev: f64,
    damping_ev: f64,
}

impl DrudeParams {
    pub fn new(plasma_ev: f64, damping_ev: f64) -> Result<Self> {
        if !(plasma_ev > 0.0 && plasma_ev.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Drude plasma frequency must be positive, got {plasma_ev}"
            )));
        }
        if !(damping_ev >= 0.0 && damping_ev.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Drude damping must be non-negative, got {damping_ev}"
            )));
        }
        Ok(Self {
            plasma_ev,
            damping_ev,
        })
    }

    pub fn plasma_ev(&self) -> f64 {
        self.plasma_ev
    }

    pub fn damping_ev(&self) -> f64 {
        self.damping_ev
    }

    /// Real-axis loss `ε''(ω) = ω_p² γ / (ω (ω² + γ²))`.
    pub fn loss(&self, omega_ev: f64) -> f64 {
        let (wp, g) = (self.plasma_ev, self.damping_ev);
        wp * wp * g / (omega_ev * (omega_ev * omega_ev + g * g))
    }

    /// `(2/π) ∫₀^a ω ε''(ω)/(ω² + ζ²) dω` for the Drude loss, in closed form.
    fn kk_below(&self, a: f64, zeta: f64) -> f64 {
        let (wp, g) = (self.plasma_ev, self.damping_ev);
        if g == 0.0 {
            // All of the lossless Drude weight sits at ω = 0.
            return wp * wp / (zeta * zeta);
        }
        let d = zeta * zeta - g * g;
        let j = if d.abs() <= 1e-8 * g * g {
            ((a / g).atan() + a * g / (a * a + g * g)) / (2.0 * g.powi(3))
        } else {
            ((a / g).atan() / g - (a / zeta).atan() / zeta) / d
        };
        FRAC_2_PI * wp * wp * g * j
    }
}

/// `ε(iζ) = 1 + ω_p² / (ζ (ζ + γ))`.
pub fn eval_drude_imag(p: &DrudeParams, z: ImaginaryFrequency) -> Result<f64> {
    let zeta = z.ev();
    if zeta == 0.0 {
        return Err(Error::DivergentAtZero { model: "Drude" });
    }
    Ok(1.0 + p.plasma_ev * p.plasma_ev / (zeta * (zeta + p.damping_ev)))
}

/// One absorption line: dimensionless strength and resonance energy in eV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillator {
    pub strength: f64,
    pub frequency_ev: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OscillatorParams {
    oscillators: Vec<Oscillator>,
}

impl OscillatorParams {
    pub fn new(oscillators: Vec<Oscillator>) -> Result<Self> {
        for (k, o) in oscillators.iter().enumerate() {
            if !(o.strength > 0.0 && o.strength.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "oscillator {k}: strength must be positive, got {}",
                    o.strength
                )));
            }
            if !(o.frequency_ev > 0.0 && o.frequency_ev.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "oscillator {k}: frequency must be positive, got {}",
                    o.frequency_ev
                )));
            }
        }
        Ok(Self { oscillators })
    }

    pub fn oscillators(&self) -> &[Oscillator] {
        &self.oscillators
    }
}

/// `ε(iζ) = 1 + Σ_k C_k / (1 + (ζ/ω_k)²)`.
pub fn eval_oscillator_imag(p: &OscillatorParams, z: ImaginaryFrequency) -> f64 {
    let zeta = z.ev();
    1.0 + p
        .oscillators
        .iter()
        .map(|o| {
            let r = zeta / o.frequency_ev;
            o.strength / (1.0 + r * r)
        })
        .sum::<f64>()
}

/// Sampled loss spectrum `ε''(ω)` with its extrapolation rules.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    samples: InterpolationTable,
    low_freq: Option<DrudeParams>,
    tail_exponent: f64,
    loglog: bool,
}

impl SpectrumTable {
    pub const DEFAULT_TAIL_EXPONENT: f64 = 3.0;

    pub fn new(
        omega_ev: Vec<f64>,
        eps2: Vec<f64>,
        low_freq: Option<DrudeParams>,
        tail_exponent: f64,
    ) -> Result<Self> {
        if let Some(i) = omega_ev.iter().position(|w| *w <= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "spectrum row {i}: ω must be positive, got {}",
                omega_ev[i]
            )));
        }
        if let Some(i) = eps2.iter().position(|e| *e < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "spectrum row {i}: ε'' = {} violates passivity (ε'' ≥ 0)",
                eps2[i]
            )));
        }
        if !(tail_exponent > 0.0 && tail_exponent.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tail exponent must be positive, got {tail_exponent}"
            )));
        }
        let loglog = eps2.iter().all(|e| *e > 0.0);
        let samples = InterpolationTable::new(omega_ev, eps2)?;
        Ok(Self {
            samples,
            low_freq,
            tail_exponent,
            loglog,
        })
    }

    pub fn samples(&self) -> &InterpolationTable {
        &self.samples
    }

    pub fn low_freq(&self) -> Option<&DrudeParams> {
        self.low_freq.as_ref()
    }

    pub fn tail_exponent(&self) -> f64 {
        self.tail_exponent
    }

    /// Loss at any ω > 0, including both extrapolations.
    pub fn loss(&self, omega_ev: f64) -> Result<f64> {
        let (w0, y0) = self.samples.first();
        let (w1, y1) = self.samples.last();
        if omega_ev < w0 {
            return match &self.low_freq {
                Some(d) => Ok(d.loss(omega_ev)),
                None => Ok(y0 * omega_ev / w0),
            };
        }
        if omega_ev > w1 {
            return Ok(y1 * (omega_ev / w1).powf(-self.tail_exponent));
        }
        if self.loglog {
            Ok(self.samples.interp_loglog(omega_ev)?)
        } else {
            Ok(self.samples.interp_linear(omega_ev)?)
        }
    }
}

/// Kramers-Kronig rotation of a tabulated loss spectrum to `ε(iζ)`.
pub fn kk_rotate(s: &SpectrumTable, z: ImaginaryFrequency, q: &QuadratureSpec) -> Result<f64> {
    let zeta = z.ev();
    if zeta == 0.0 {
        return Err(Error::DivergentAtZero { model: "tabulated" });
    }
    let xs = s.samples.abscissae();
    let ys = s.samples.ordinates();
    let (w_min, y_min) = s.samples.first();
    let (w_max, y_max) = s.samples.last();
    let z2 = zeta * zeta;

    // [0, ω_min]
    let low = match &s.low_freq {
        Some(d) => d.kk_below(w_min, zeta),
        None => {
            let limit = 0.01 * zeta;
            if w_min > limit {
                return Err(Error::IncompleteSpectrum {
                    omega_min: w_min,
                    zeta,
                    limit,
                });
            }
            // Insulator-like ramp ε'' ∝ ω below the first sample.
            FRAC_2_PI * (y_min / w_min) * (w_min - zeta * (w_min / zeta).atan())
        }
    };

    // [ω_min, ω_max], segment by segment.
    let mut mid = 0.0;
    for (x, y) in xs.windows(2).zip(ys.windows(2)) {
        let (x0, x1, y0, y1) = (x[0], x[1], y[0], y[1]);
        if y0 == 0.0 && y1 == 0.0 {
            continue;
        }
        let part = if s.loglog {
            // ω = x0^(1-u) x1^u and ε'' = y0^(1-u) y1^u on u ∈ [0, 1].
            let lx = (x1 / x0).ln();
            let ly = (y1 / y0).ln();
            integrate_adaptive(
                |u| {
                    let w = x0 * (lx * u).exp();
                    let e = y0 * (ly * u).exp();
                    w * w * e * lx / (w * w + z2)
                },
                0.0,
                1.0,
                q,
            )?
        } else {
            let slope = (y1 - y0) / (x1 - x0);
            integrate_adaptive(|w| w * (y0 + slope * (w - x0)) / (w * w + z2), x0, x1, q)?
        };
        mid += part.value;
    }

    // (ω_max, ∞) with ε'' = y_max (ω/ω_max)^(-p); s = ω_max/ω maps it to (0, 1].
    let tail = if y_max > 0.0 {
        let p = s.tail_exponent;
        let wm2 = w_max * w_max;
        integrate_adaptive(
            |t| y_max * wm2 * t.powf(p - 1.0) / (wm2 + z2 * t * t),
            0.0,
            1.0,
            q,
        )?
        .value
    } else {
        0.0
    };

    Ok(1.0 + low + FRAC_2_PI * (mid + tail))
}

/// A material's permittivity evaluator on the imaginary axis.
#[derive(Debug, Clone, PartialEq)]
pub enum DielectricModel {
    Vacuum,
    Drude(DrudeParams),
    Oscillators(OscillatorParams),
    Tabulated(SpectrumTable),
}

impl DielectricModel {
    pub fn eval(&self, z: ImaginaryFrequency) -> Result<f64> {
        eval_model(self, z)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Vacuum => "vacuum",
            Self::Drude(_) => "drude",
            Self::Oscillators(_) => "oscillators",
            Self::Tabulated(_) => "tabulated",
        }
    }

    /// Largest frequency scale in the model, in eV (zero for vacuum).
    pub fn max_frequency_ev(&self) -> f64 {
        match self {
            Self::Vacuum => 0.0,
            Self::Drude(d) => d.plasma_ev.max(d.damping_ev),
            Self::Oscillators(o) => o
                .oscillators
                .iter()
                .map(|o| o.frequency_ev)
                .fold(0.0, f64::max),
            Self::Tabulated(t) => {
                let top = t.samples.last().0;
                t.low_freq.map_or(top, |d| top.max(d.plasma_ev))
            }
        }
    }
}

/// Dispatches to the variant evaluator; vacuum is exactly 1.
pub fn eval_model(m: &DielectricModel, z: ImaginaryFrequency) -> Result<f64> {
    match m {
        DielectricModel::Vacuum => Ok(1.0),
        DielectricModel::Drude(p) => eval_drude_imag(p, z),
        DielectricModel::Oscillators(p) => Ok(eval_oscillator_imag(p, z)),
        DielectricModel::Tabulated(t) => kk_rotate(t, z, &QuadratureSpec::dielectric()),
    }
}
