//! Effective permittivity of a two-phase composite.

mod ellipsoid;
mod rules;
mod spectral;

use std::fmt;
use std::str::FromStr;

pub use ellipsoid::{
    bruggeman_ellipsoid, bruggeman_ellipsoid_residual, depolarization_prolate,
    maxwell_garnett_ellipsoid, validate_depolarization, EllipsoidResponse,
};
pub use rules::{
    bruggeman_residual, bruggeman_sphere, hashin_shtrikman_bounds, looyenga, maxwell_garnett,
    wiener_bounds,
};
pub use spectral::{spectral_eval, SpectralFunction, SpectralPole};

use crate::dielectric::{DielectricModel, ImaginaryFrequency};
use crate::{Error, Result};

/// Volume fraction occupied by the inclusions.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FillingFraction(f64);

impl FillingFraction {
    pub fn new(f: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&f) {
            Ok(Self(f))
        } else {
            Err(Error::InvalidParameter(format!(
                "filling fraction must lie in [0, 1], got {f}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InclusionShape {
    Sphere,
    Prolate { eccentricity: f64 },
    Depolarization([f64; 3]),
}

impl InclusionShape {
    pub fn depolarization(&self) -> Result<[f64; 3]> {
        match self {
            Self::Sphere => Ok([1.0 / 3.0; 3]),
            Self::Prolate { eccentricity } => depolarization_prolate(*eccentricity),
            Self::Depolarization(l) => {
                validate_depolarization(l)?;
                Ok(*l)
            }
        }
    }
}

/// Host matrix, inclusion material, filling fraction and inclusion geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeSpec {
    pub host: DielectricModel,
    pub inclusion: DielectricModel,
    pub fill: FillingFraction,
    pub shape: InclusionShape,
    radius_nm: f64,
}

impl CompositeSpec {
    pub fn new(
        host: DielectricModel,
        inclusion: DielectricModel,
        fill: FillingFraction,
        shape: InclusionShape,
        radius_nm: f64,
    ) -> Result<Self> {
        if !(radius_nm > 0.0 && radius_nm.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "inclusion radius must be positive, got {radius_nm}"
            )));
        }
        shape.depolarization()?;
        Ok(Self {
            host,
            inclusion,
            fill,
            shape,
            radius_nm,
        })
    }

    pub fn radius_nm(&self) -> f64 {
        self.radius_nm
    }

    pub fn with_fill(&self, fill: FillingFraction) -> Self {
        Self {
            fill,
            ..self.clone()
        }
    }
}

/// Rule names in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleKind {
    WienerLower,
    WienerUpper,
    HsLower,
    HsUpper,
    MaxwellGarnett,
    Bruggeman,
    Looyenga,
    Spectral,
    MgEllipsoid,
    BruggemanEllipsoid,
}

impl RuleKind {
    pub const ALL: [RuleKind; 10] = [
        RuleKind::WienerLower,
        RuleKind::WienerUpper,
        RuleKind::HsLower,
        RuleKind::HsUpper,
        RuleKind::MaxwellGarnett,
        RuleKind::Bruggeman,
        RuleKind::Looyenga,
        RuleKind::Spectral,
        RuleKind::MgEllipsoid,
        RuleKind::BruggemanEllipsoid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleKind::WienerLower => "wiener-lower",
            RuleKind::WienerUpper => "wiener-upper",
            RuleKind::HsLower => "hs-lower",
            RuleKind::HsUpper => "hs-upper",
            RuleKind::MaxwellGarnett => "maxwell-garnett",
            RuleKind::Bruggeman => "bruggeman",
            RuleKind::Looyenga => "looyenga",
            RuleKind::Spectral => "spectral",
            RuleKind::MgEllipsoid => "mg-ellipsoid",
            RuleKind::BruggemanEllipsoid => "bruggeman-ellipsoid",
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RuleKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown mixing rule `{s}`")))
    }
}

/// Where the spectral rule takes its `G(L)` from.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralSource {
    /// The single pole at `(1 − f)/3`, tracking the current filling fraction.
    MaxwellGarnettPole,
    Explicit(SpectralFunction),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Random orientation; polarizabilities averaged over the three axes.
    Isotropic,
    /// Inclusions aligned; the response along the given principal axis.
    Aligned(usize),
}

/// A mixing rule together with any parameters it needs.
#[derive(Debug, Clone, PartialEq)]
pub enum MixingRule {
    WienerLower,
    WienerUpper,
    HsLower,
    HsUpper,
    MaxwellGarnett,
    Bruggeman,
    Looyenga,
    Spectral(SpectralSource),
    MgEllipsoid(Orientation),
    BruggemanEllipsoid { axis: usize },
}

impl MixingRule {
    pub fn kind(&self) -> RuleKind {
        match self {
            Self::WienerLower => RuleKind::WienerLower,
            Self::WienerUpper => RuleKind::WienerUpper,
            Self::HsLower => RuleKind::HsLower,
            Self::HsUpper => RuleKind::HsUpper,
            Self::MaxwellGarnett => RuleKind::MaxwellGarnett,
            Self::Bruggeman => RuleKind::Bruggeman,
            Self::Looyenga => RuleKind::Looyenga,
            Self::Spectral(_) => RuleKind::Spectral,
            Self::MgEllipsoid(_) => RuleKind::MgEllipsoid,
            Self::BruggemanEllipsoid { .. } => RuleKind::BruggemanEllipsoid,
        }
    }

    /// The rule for `kind` with default parameters: spectral uses the
    /// Maxwell-Garnett pole, ellipsoid rules use isotropic averaging and axis 0.
    pub fn with_defaults(kind: RuleKind) -> Self {
        match kind {
            RuleKind::WienerLower => Self::WienerLower,
            RuleKind::WienerUpper => Self::WienerUpper,
            RuleKind::HsLower => Self::HsLower,
            RuleKind::HsUpper => Self::HsUpper,
            RuleKind::MaxwellGarnett => Self::MaxwellGarnett,
            RuleKind::Bruggeman => Self::Bruggeman,
            RuleKind::Looyenga => Self::Looyenga,
            RuleKind::Spectral => Self::Spectral(SpectralSource::MaxwellGarnettPole),
            RuleKind::MgEllipsoid => Self::MgEllipsoid(Orientation::Isotropic),
            RuleKind::BruggemanEllipsoid => Self::BruggemanEllipsoid { axis: 0 },
        }
    }

    /// Applies the rule to evaluated permittivities.
    pub fn apply(
        &self,
        eps_i: f64,
        eps_h: f64,
        f: FillingFraction,
        shape: &InclusionShape,
    ) -> Result<f64> {
        match self {
            Self::WienerLower => Ok(wiener_bounds(eps_i, eps_h, f).0),
            Self::WienerUpper => Ok(wiener_bounds(eps_i, eps_h, f).1),
            Self::HsLower => Ok(hashin_shtrikman_bounds(eps_i, eps_h, f).0),
            Self::HsUpper => Ok(hashin_shtrikman_bounds(eps_i, eps_h, f).1),
            Self::MaxwellGarnett => Ok(maxwell_garnett(eps_i, eps_h, f)),
            Self::Bruggeman => bruggeman_sphere(eps_i, eps_h, f),
            Self::Looyenga => Ok(looyenga(eps_i, eps_h, f)),
            Self::Spectral(SpectralSource::MaxwellGarnettPole) => {
                spectral_eval(&SpectralFunction::maxwell_garnett(f), eps_i, eps_h, f)
            }
            Self::Spectral(SpectralSource::Explicit(g)) => spectral_eval(g, eps_i, eps_h, f),
            Self::MgEllipsoid(orientation) => {
                let l = shape.depolarization()?;
                match orientation {
                    Orientation::Isotropic => {
                        match maxwell_garnett_ellipsoid(eps_i, eps_h, f, &l, true)? {
                            EllipsoidResponse::Isotropic(v) => Ok(v),
                            EllipsoidResponse::PerAxis(_) => unreachable!(),
                        }
                    }
                    Orientation::Aligned(axis) => {
                        let axis = check_axis(*axis)?;
                        match maxwell_garnett_ellipsoid(eps_i, eps_h, f, &l, false)? {
                            EllipsoidResponse::PerAxis(v) => Ok(v[axis]),
                            EllipsoidResponse::Isotropic(_) => unreachable!(),
                        }
                    }
                }
            }
            Self::BruggemanEllipsoid { axis } => {
                let l = shape.depolarization()?;
                bruggeman_ellipsoid(eps_i, eps_h, f, l[check_axis(*axis)?])
            }
        }
    }
}

fn check_axis(axis: usize) -> Result<usize> {
    if axis < 3 {
        Ok(axis)
    } else {
        Err(Error::InvalidParameter(format!(
            "ellipsoid axis must be 0, 1 or 2, got {axis}"
        )))
    }
}

/// Evaluates host and inclusion at `z`, then applies `rule`.
pub fn effective_epsilon(
    spec: &CompositeSpec,
    rule: &MixingRule,
    z: ImaginaryFrequency,
) -> Result<f64> {
    let eps_h = spec.host.eval(z)?;
    let eps_i = spec.inclusion.eval(z)?;
    rule.apply(eps_i, eps_h, spec.fill, &spec.shape)
}
