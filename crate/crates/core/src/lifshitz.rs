//! Zero-temperature Lifshitz force between two slabs across a gap.
//!
//! ```text
//! F = ħc/(2π²) Σ_{s,p} ∫₀^∞ dq ∫₀^∞ dQ Q k₃ r₁₃ r₂₃ / (e^{2k₃L} − r₁₃ r₂₃)
//! ```
//!
//! with `q = ζ/ħc` and `k₃ = √(ε₃ q² + Q²)`. Both integrals run over
//! `(0, ∞)` in the dimensionless variables `u = 2Lq`, `v = 2LQ`, so the
//! integrand lives on the unit scale for every separation. The force is
//! reported relative to the ideal-conductor value `F₀ = ħcπ²/(240 L⁴)`.

use std::cell::Cell;
use std::f64::consts::PI;

use crate::dielectric::{DielectricModel, ImaginaryFrequency};
use crate::mixing::{effective_epsilon, CompositeSpec, MixingRule};
use crate::numerics::{try_integrate_adaptive, QuadratureSpec};
use crate::units::{HBAR_C_EV_NM, HBAR_C_J_M};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    S,
    P,
}

/// `√(ε (ζ/ħc)² + Q²)` in nm⁻¹, for `ζ` in eV and `Q` in nm⁻¹.
pub fn k_layer(eps: f64, zeta_ev: f64, q_inv_nm: f64) -> f64 {
    let q = zeta_ev / HBAR_C_EV_NM;
    (eps * q * q + q_inv_nm * q_inv_nm).sqrt()
}

fn fresnel_from_k(eps_a: f64, eps_b: f64, k_a: f64, k_b: f64, pol: Polarization) -> f64 {
    match pol {
        Polarization::S => (k_a - k_b) / (k_a + k_b),
        Polarization::P => (eps_b * k_a - eps_a * k_b) / (eps_b * k_a + eps_a * k_b),
    }
}

/// Imaginary-frequency Fresnel coefficient for a wave in medium `a`
/// reflecting off medium `b`.
pub fn fresnel_r(eps_a: f64, eps_b: f64, zeta_ev: f64, q_inv_nm: f64, pol: Polarization) -> f64 {
    if eps_a == eps_b {
        return 0.0;
    }
    let k_a = k_layer(eps_a, zeta_ev, q_inv_nm);
    let k_b = k_layer(eps_b, zeta_ev, q_inv_nm);
    fresnel_from_k(eps_a, eps_b, k_a, k_b, pol)
}

/// One side of the cavity.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq)]
pub enum Slab {
    Composite {
        spec: CompositeSpec,
        rule: MixingRule,
    },
    Homogeneous(DielectricModel),
    /// `r^p = 1`, `r^s = −1` at every frequency and wave vector.
    PerfectConductor,
}

impl Slab {
    pub fn composite(spec: CompositeSpec, rule: MixingRule) -> Self {
        Self::Composite { spec, rule }
    }

    /// `None` for a perfect conductor.
    fn permittivity(&self, z: ImaginaryFrequency) -> Result<Option<f64>> {
        match self {
            Self::Composite { spec, rule } => effective_epsilon(spec, rule, z).map(Some),
            Self::Homogeneous(m) => m.eval(z).map(Some),
            Self::PerfectConductor => Ok(None),
        }
    }

    fn inclusion_radius_nm(&self) -> Option<f64> {
        match self {
            Self::Composite { spec, .. } => Some(spec.radius_nm()),
            _ => None,
        }
    }
}

/// Two slabs facing each other across a gap of width `separation_nm`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabSystem {
    pub slab1: Slab,
    pub slab2: Slab,
    pub gap: DielectricModel,
    separation_nm: f64,
}

impl SlabSystem {
    pub fn new(slab1: Slab, slab2: Slab, gap: DielectricModel, separation_nm: f64) -> Result<Self> {
        if !(separation_nm > 0.0 && separation_nm.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "separation must be positive, got {separation_nm}"
            )));
        }
        Ok(Self {
            slab1,
            slab2,
            gap,
            separation_nm,
        })
    }

    pub fn separation_nm(&self) -> f64 {
        self.separation_nm
    }

    pub fn with_separation(&self, separation_nm: f64) -> Result<Self> {
        Self::new(
            self.slab1.clone(),
            self.slab2.clone(),
            self.gap.clone(),
            separation_nm,
        )
    }

    pub fn swapped(&self) -> Self {
        Self {
            slab1: self.slab2.clone(),
            slab2: self.slab1.clone(),
            gap: self.gap.clone(),
            separation_nm: self.separation_nm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceResult {
    /// Pressure in Pa; negative means attractive.
    pub force_pa: f64,
    /// `|F| / F₀`.
    pub eta: f64,
    /// Estimated absolute quadrature error of `eta`.
    pub eta_error: f64,
    /// Whether `4πL > a` holds for every composite slab.
    pub validity_ok: bool,
}

/// Magnitude of the ideal-conductor Casimir pressure `ħcπ²/(240 L⁴)` in Pa.
pub fn ideal_pressure_pa(separation_nm: f64) -> f64 {
    let l = separation_nm * 1e-9;
    HBAR_C_J_M * PI.powi(2) / (240.0 * l.powi(4))
}

/// True iff `4πL > a` for every slab that carries inclusions.
pub fn validity_check(sys: &SlabSystem) -> bool {
    [&sys.slab1, &sys.slab2]
        .iter()
        .filter_map(|s| s.inclusion_radius_nm())
        .all(|a| 4.0 * PI * sys.separation_nm > a)
}

/// `r^p` and `r^s` of a slab seen from the gap; `eps = None` is a perfect mirror.
fn reflection(eps_gap: f64, eps: Option<f64>, k_gap: f64, u: f64, v: f64) -> (f64, f64) {
    match eps {
        None => (1.0, -1.0),
        Some(e) if e == eps_gap => (0.0, 0.0),
        Some(e) => {
            let k = (e * u * u + v * v).sqrt();
            (
                fresnel_from_k(eps_gap, e, k_gap, k, Polarization::P),
                fresnel_from_k(eps_gap, e, k_gap, k, Polarization::S),
            )
        }
    }
}

/// Force per unit area from the Lifshitz double integral.
pub fn force_per_area(sys: &SlabSystem, q: &QuadratureSpec) -> Result<ForceResult> {
    let two_l = 2.0 * sys.separation_nm;
    let inner_spec = q.with_rel_tol(q.rel_tol() * 0.1)?;
    let worst_inner = Cell::new(0.0f64);

    let outer = |u: f64| -> Result<f64> {
        let z = ImaginaryFrequency::new(HBAR_C_EV_NM * u / two_l)?;
        let eps1 = sys.slab1.permittivity(z)?;
        let eps2 = sys.slab2.permittivity(z)?;
        let eps3 = sys.gap.eval(z)?;
        let inner = |v: f64| -> Result<f64> {
            let k3 = (eps3 * u * u + v * v).sqrt();
            let (rp1, rs1) = reflection(eps3, eps1, k3, u, v);
            let (rp2, rs2) = reflection(eps3, eps2, k3, u, v);
            let damp = (-k3).exp();
            let term = |rr: f64| {
                let x = rr * damp;
                x / (1.0 - x)
            };
            Ok(v * k3 * (term(rp1 * rp2) + term(rs1 * rs2)))
        };
        let r = try_integrate_adaptive(inner, 0.0, f64::INFINITY, &inner_spec)?;
        // Tail points where only the absolute floor applies are measured
        // against that floor rather than against a vanishing value.
        let floor = inner_spec.abs_tol() / inner_spec.rel_tol();
        worst_inner.set(worst_inner.get().max(r.error / r.value.abs().max(floor)));
        Ok(r.value)
    };
    let total = try_integrate_adaptive(outer, 0.0, f64::INFINITY, q)?;

    // η = (ħc/2π²)(2L)⁻⁴ I / (ħcπ²/240L⁴) = 7.5 I / π⁴.
    let scale = 7.5 / PI.powi(4);
    let eta = scale * total.value;
    let eta_error = scale * (total.error + worst_inner.get() * total.value.abs());
    Ok(ForceResult {
        force_pa: -eta * ideal_pressure_pa(sys.separation_nm),
        eta,
        eta_error,
        validity_ok: validity_check(sys),
    })
}

/// `η = |F| / F₀` at the system's separation.
pub fn reduction_factor(sys: &SlabSystem, q: &QuadratureSpec) -> Result<f64> {
    Ok(force_per_area(sys, q)?.eta)
}
