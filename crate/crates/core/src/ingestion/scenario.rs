use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use super::material::{load_material, Material};
use super::{join_list, read_text, resolve, Doc, LoadError};
use crate::dielectric::DielectricModel;
use crate::lifshitz::{Slab, SlabSystem};
use crate::mixing::{
    CompositeSpec, FillingFraction, InclusionShape, MixingRule, Orientation, RuleKind,
    SpectralFunction, SpectralPole, SpectralSource,
};
use crate::numerics::{InterpolationTable, QuadratureSpec};

const SLAB_KEYS: &[&str] = &[
    "host",
    "inclusion",
    "f",
    "rule",
    "shape",
    "orientation",
    "axis",
    "a_nm",
    "material",
    "perfect_conductor",
];

/// Grid values are rounded to this many decimals so that `from + i·step`
/// reproduces the decimal grid the user wrote.
const GRID_DECIMALS: usize = 9;

/// One slab as written in the scenario file.
#[derive(Debug, Clone, PartialEq)]
pub enum SlabEntry {
    Composite {
        host: String,
        inclusion: String,
        f: f64,
        rule: Option<RuleKind>,
        shape: InclusionShape,
        orientation: Orientation,
        a_nm: f64,
    },
    Homogeneous {
        material: String,
    },
    PerfectConductor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Filling,
    Separation,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Filling => "f",
            SweepAxis::Separation => "L",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepValues {
    Range { from: f64, to: f64, step: f64 },
    List(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub axis: SweepAxis,
    pub values: SweepValues,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ZetaEntry {
    Values(Vec<f64>),
    /// `ζ = fraction · ω_p` for each fraction.
    PlasmaFractions {
        omega_p_ev: f64,
        fractions: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectralEntry {
    MaxwellGarnett,
    Explicit {
        pole_weights: Vec<f64>,
        pole_positions: Vec<f64>,
        density_l: Vec<f64>,
        density_g: Vec<f64>,
    },
}

/// The declarative content of a scenario file, before any material is loaded.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub name: String,
    pub slab1: SlabEntry,
    /// `None` mirrors slab 1.
    pub slab2: Option<SlabEntry>,
    /// `"vacuum"` or a material path.
    pub gap: String,
    pub separation_nm: Option<f64>,
    pub rules: Vec<String>,
    pub sweep: Option<SweepEntry>,
    pub zeta: Option<ZetaEntry>,
    pub spectral: Option<SpectralEntry>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_subdivisions: Option<usize>,
}

/// A rule to evaluate: a mixing rule on the composite slabs, or the
/// perfect-conductor reference.
#[derive(Debug, Clone, PartialEq)]
pub enum RuleChoice {
    Ideal,
    Mixing(MixingRule),
}

impl RuleChoice {
    pub fn name(&self) -> &'static str {
        match self {
            RuleChoice::Ideal => "ideal",
            RuleChoice::Mixing(r) => r.kind().name(),
        }
    }

    fn order(&self) -> (u8, Option<RuleKind>) {
        match self {
            RuleChoice::Ideal => (0, None),
            RuleChoice::Mixing(r) => (1, Some(r.kind())),
        }
    }
}

impl fmt::Display for RuleChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Resolved sweep: the axis and its concrete grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// A fully resolved scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub path: PathBuf,
    pub file: ScenarioFile,
    /// System at the scenario's own `f` and `L`, using the first mixing rule.
    pub base: SlabSystem,
    /// Rules in canonical order, `ideal` first when requested.
    pub rules: Vec<RuleChoice>,
    pub sweep: Option<Sweep>,
    /// One system per sweep point for the first mixing rule.
    pub systems: Vec<SlabSystem>,
    pub zeta_ev: Vec<f64>,
    pub quadrature: QuadratureSpec,
    /// Material name to provenance note, sorted by name.
    pub provenance: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

impl Scenario {
    pub fn name(&self) -> &str {
        &self.file.name
    }

    /// Filling fraction of the first composite slab, if any.
    pub fn fill(&self) -> Option<f64> {
        [&self.base.slab1, &self.base.slab2]
            .into_iter()
            .find_map(|s| match s {
                Slab::Composite { spec, .. } => Some(spec.fill.value()),
                _ => None,
            })
    }

    /// The grid of filling fractions: the sweep if it runs over `f`,
    /// otherwise the scenario's single value.
    pub fn fill_grid(&self) -> Vec<f64> {
        match &self.sweep {
            Some(s) if s.axis == SweepAxis::Filling => s.values.clone(),
            _ => self.fill().into_iter().collect(),
        }
    }

    pub fn separation_grid(&self) -> Vec<f64> {
        match &self.sweep {
            Some(s) if s.axis == SweepAxis::Separation => s.values.clone(),
            _ => vec![self.base.separation_nm()],
        }
    }

    /// Mixing rules only, ideal excluded.
    pub fn mixing_rules(&self) -> impl Iterator<Item = &MixingRule> {
        self.rules.iter().filter_map(|r| match r {
            RuleChoice::Mixing(m) => Some(m),
            RuleChoice::Ideal => None,
        })
    }

    /// Looks up a requested rule by name among the scenario's configured
    /// parameters; a rule not listed gets its defaults.
    pub fn rule_by_name(&self, name: &str) -> crate::Result<RuleChoice> {
        if name == "ideal" {
            return Ok(RuleChoice::Ideal);
        }
        let kind: RuleKind = name.parse()?;
        if let Some(r) = self.mixing_rules().find(|r| r.kind() == kind) {
            return Ok(RuleChoice::Mixing(r.clone()));
        }
        if kind == RuleKind::Spectral && self.file.spectral.is_none() {
            return Err(crate::Error::InvalidParameter(
                "rule `spectral` needs a [spectral] block in the scenario".into(),
            ));
        }
        Ok(RuleChoice::Mixing(self.configure(kind)))
    }

    fn configure(&self, kind: RuleKind) -> MixingRule {
        configure_rule(kind, &self.file, self.spectral_source())
    }

    fn spectral_source(&self) -> Option<SpectralSource> {
        self.mixing_rules().find_map(|r| match r {
            MixingRule::Spectral(s) => Some(s.clone()),
            _ => None,
        })
    }

    /// The system for `rule` at filling fraction `f` and separation `l_nm`.
    pub fn system(&self, rule: &RuleChoice, f: f64, l_nm: f64) -> crate::Result<SlabSystem> {
        let fill = FillingFraction::new(f)?;
        let slab = |s: &Slab| -> Slab {
            match (rule, s) {
                (RuleChoice::Ideal, _) => Slab::PerfectConductor,
                (RuleChoice::Mixing(r), Slab::Composite { spec, .. }) => {
                    Slab::composite(spec.with_fill(fill), r.clone())
                }
                (_, other) => other.clone(),
            }
        };
        let gap = match rule {
            RuleChoice::Ideal => DielectricModel::Vacuum,
            RuleChoice::Mixing(_) => self.base.gap.clone(),
        };
        SlabSystem::new(slab(&self.base.slab1), slab(&self.base.slab2), gap, l_nm)
    }
}

fn configure_rule(
    kind: RuleKind,
    file: &ScenarioFile,
    spectral: Option<SpectralSource>,
) -> MixingRule {
    let orientation = match &file.slab1 {
        SlabEntry::Composite { orientation, .. } => *orientation,
        _ => Orientation::Isotropic,
    };
    match kind {
        RuleKind::Spectral => {
            MixingRule::Spectral(spectral.unwrap_or(SpectralSource::MaxwellGarnettPole))
        }
        RuleKind::MgEllipsoid => MixingRule::MgEllipsoid(orientation),
        RuleKind::BruggemanEllipsoid => MixingRule::BruggemanEllipsoid {
            axis: match orientation {
                Orientation::Aligned(a) => a,
                Orientation::Isotropic => 0,
            },
        },
        other => MixingRule::with_defaults(other),
    }
}

fn parse_shape(raw: &str) -> Result<InclusionShape, String> {
    let raw = raw.trim();
    let (head, arg) = match raw.split_once(':') {
        Some((h, a)) => (h.trim(), Some(a.trim())),
        None => (raw, None),
    };
    let shape = match (head, arg) {
        ("sphere", None) => InclusionShape::Sphere,
        ("prolate", Some(e)) => InclusionShape::Prolate {
            eccentricity: super::parse_number(e)?,
        },
        ("depolarization", Some(l)) => {
            let l = super::parse_list(l)?;
            let l: [f64; 3] = l
                .try_into()
                .map_err(|_| "depolarization needs three factors".to_string())?;
            InclusionShape::Depolarization(l)
        }
        _ => {
            return Err(format!(
                "`{raw}` is not a shape (sphere, prolate:<e>, depolarization:<a>,<b>,<c>)"
            ))
        }
    };
    shape.depolarization().map_err(|e| e.to_string())?;
    Ok(shape)
}

fn shape_to_string(shape: &InclusionShape) -> String {
    match shape {
        InclusionShape::Sphere => "sphere".into(),
        InclusionShape::Prolate { eccentricity } => format!("prolate:{eccentricity}"),
        InclusionShape::Depolarization(l) => format!("depolarization:{}", join_list(l)),
    }
}

fn parse_slab(doc: &Doc, section: &str) -> Result<SlabEntry, LoadError> {
    doc.only_keys(section, SLAB_KEYS)?;
    let field = |k: &str| format!("{section}.{k}");
    if let Some(raw) = doc.get(section, &["perfect_conductor"]) {
        return match raw {
            "true" => Ok(SlabEntry::PerfectConductor),
            "false" => Err(doc.err(
                field("perfect_conductor"),
                "remove the key instead of setting it false",
            )),
            _ => Err(doc.err(field("perfect_conductor"), "expected `true`")),
        };
    }
    if let Some(m) = doc.get(section, &["material"]) {
        return Ok(SlabEntry::Homogeneous {
            material: m.to_string(),
        });
    }
    let f = doc.require_number(section, &["f"])?;
    if !(0.0..=1.0).contains(&f) {
        return Err(doc.err(
            field("f"),
            format!("filling fraction {f} is outside [0, 1]"),
        ));
    }
    let rule = doc
        .get(section, &["rule"])
        .map(|r| r.parse::<RuleKind>())
        .transpose()
        .map_err(|e| doc.err(field("rule"), e.to_string()))?;
    let shape = match doc.get(section, &["shape"]) {
        None => InclusionShape::Sphere,
        Some(raw) => parse_shape(raw).map_err(|m| doc.err(field("shape"), m))?,
    };
    let orientation = match doc.get(section, &["orientation"]).unwrap_or("isotropic") {
        "isotropic" => {
            if doc.has_key(section, "axis") {
                return Err(doc.err(field("axis"), "`axis` requires orientation = aligned"));
            }
            Orientation::Isotropic
        }
        "aligned" => {
            let axis = doc.number(section, &["axis"])?.unwrap_or(0.0);
            if !(axis == 0.0 || axis == 1.0 || axis == 2.0) {
                return Err(doc.err(field("axis"), "axis must be 0, 1 or 2"));
            }
            Orientation::Aligned(axis as usize)
        }
        other => {
            return Err(doc.err(
                field("orientation"),
                format!("`{other}` is not an orientation (isotropic, aligned)"),
            ))
        }
    };
    let a_nm = doc.require_number(section, &["a_nm"])?;
    if a_nm <= 0.0 {
        return Err(doc.err(field("a_nm"), "inclusion radius must be positive"));
    }
    Ok(SlabEntry::Composite {
        host: doc.require(section, &["host"])?.to_string(),
        inclusion: doc.require(section, &["inclusion"])?.to_string(),
        f,
        rule,
        shape,
        orientation,
        a_nm,
    })
}

fn write_slab(s: &mut String, section: &str, slab: &SlabEntry) {
    let _ = writeln!(s, "\n[{section}]");
    match slab {
        SlabEntry::PerfectConductor => {
            let _ = writeln!(s, "perfect_conductor = true");
        }
        SlabEntry::Homogeneous { material } => {
            let _ = writeln!(s, "material = {material}");
        }
        SlabEntry::Composite {
            host,
            inclusion,
            f,
            rule,
            shape,
            orientation,
            a_nm,
        } => {
            let _ = writeln!(s, "host = {host}\ninclusion = {inclusion}\nf = {f}");
            if let Some(r) = rule {
                let _ = writeln!(s, "rule = {r}");
            }
            let _ = writeln!(s, "shape = {}", shape_to_string(shape));
            match orientation {
                Orientation::Isotropic => {
                    let _ = writeln!(s, "orientation = isotropic");
                }
                Orientation::Aligned(a) => {
                    let _ = writeln!(s, "orientation = aligned\naxis = {a}");
                }
            }
            let _ = writeln!(s, "a_nm = {a_nm}");
        }
    }
}

impl ScenarioFile {
    /// Parses scenario text; `path` only labels errors.
    pub fn parse(path: &Path, text: &str) -> Result<Self, LoadError> {
        let doc = Doc::parse(path, text)?;
        const SECTIONS: &[&str] = &[
            "scenario",
            "slab1",
            "slab2",
            "gap",
            "separation",
            "rules",
            "sweep",
            "zeta",
            "spectral",
            "quadrature",
        ];
        if let Some(s) = doc.sections().find(|s| !SECTIONS.contains(s)) {
            return Err(doc.err(s, "unknown section"));
        }
        doc.only_keys("scenario", &["name"])?;
        doc.only_keys("gap", &["material"])?;
        doc.only_keys("separation", &["L_nm"])?;
        doc.only_keys("rules", &["list"])?;
        doc.only_keys("sweep", &["axis", "from", "to", "step", "list"])?;
        doc.only_keys("zeta", &["values_eV", "omega_p_eV", "fractions"])?;
        doc.only_keys(
            "spectral",
            &[
                "preset",
                "pole_weights",
                "pole_positions",
                "density_L",
                "density_G",
            ],
        )?;
        doc.only_keys("quadrature", &["rel_tol", "abs_tol", "max_subdivisions"])?;

        let name = doc.get("scenario", &["name"]).unwrap_or("").to_string();
        if !doc.has("slab1") {
            return Err(doc.err("slab1", "missing required section"));
        }
        let slab1 = parse_slab(&doc, "slab1")?;
        let slab2 = if doc.has("slab2") {
            Some(parse_slab(&doc, "slab2")?)
        } else {
            None
        };
        let gap = doc
            .get("gap", &["material"])
            .unwrap_or("vacuum")
            .to_string();

        let separation_nm = doc.number("separation", &["L_nm"])?;
        if let Some(l) = separation_nm {
            if l <= 0.0 {
                return Err(doc.err(
                    "separation.L_nm",
                    format!("separation {l} must be positive"),
                ));
            }
        }

        let rules: Vec<String> = match doc.get("rules", &["list"]) {
            None => Vec::new(),
            Some(raw) => raw
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect(),
        };
        for r in &rules {
            if r != "ideal" {
                r.parse::<RuleKind>()
                    .map_err(|e| doc.err("rules.list", e.to_string()))?;
            }
        }

        let sweep = if doc.has("sweep") {
            let axis = match doc.require("sweep", &["axis"])? {
                "f" => SweepAxis::Filling,
                "L" | "L_nm" => SweepAxis::Separation,
                other => {
                    return Err(doc.err(
                        "sweep.axis",
                        format!("`{other}` is not a sweep axis (f, L)"),
                    ))
                }
            };
            let values = match doc.list("sweep", &["list"])? {
                Some(list) => {
                    if ["from", "to", "step"]
                        .iter()
                        .any(|k| doc.has_key("sweep", k))
                    {
                        return Err(
                            doc.err("sweep.list", "give either a list or from/to/step, not both")
                        );
                    }
                    SweepValues::List(list)
                }
                None => SweepValues::Range {
                    from: doc.require_number("sweep", &["from"])?,
                    to: doc.require_number("sweep", &["to"])?,
                    step: doc.require_number("sweep", &["step"])?,
                },
            };
            Some(SweepEntry { axis, values })
        } else {
            None
        };

        let zeta = if doc.has("zeta") {
            match doc.list("zeta", &["values_eV"])? {
                Some(v) => Some(ZetaEntry::Values(v)),
                None => Some(ZetaEntry::PlasmaFractions {
                    omega_p_ev: doc.require_number("zeta", &["omega_p_eV"])?,
                    fractions: doc
                        .list("zeta", &["fractions"])?
                        .ok_or_else(|| doc.err("zeta.fractions", "missing required key"))?,
                }),
            }
        } else {
            None
        };

        let spectral = if doc.has("spectral") {
            match doc.get("spectral", &["preset"]) {
                Some("maxwell-garnett") => Some(SpectralEntry::MaxwellGarnett),
                Some(other) => {
                    return Err(doc.err(
                        "spectral.preset",
                        format!("unknown preset `{other}` (expected maxwell-garnett)"),
                    ))
                }
                None => Some(SpectralEntry::Explicit {
                    pole_weights: doc.list("spectral", &["pole_weights"])?.unwrap_or_default(),
                    pole_positions: doc
                        .list("spectral", &["pole_positions"])?
                        .unwrap_or_default(),
                    density_l: doc.list("spectral", &["density_L"])?.unwrap_or_default(),
                    density_g: doc.list("spectral", &["density_G"])?.unwrap_or_default(),
                }),
            }
        } else {
            None
        };

        let max_subdivisions = match doc.number("quadrature", &["max_subdivisions"])? {
            None => None,
            Some(n) if n >= 1.0 && n.fract() == 0.0 => Some(n as usize),
            Some(n) => {
                return Err(doc.err(
                    "quadrature.max_subdivisions",
                    format!("{n} is not a positive integer"),
                ))
            }
        };

        Ok(Self {
            name,
            slab1,
            slab2,
            gap,
            separation_nm,
            rules,
            sweep,
            zeta,
            spectral,
            rel_tol: doc.number("quadrature", &["rel_tol"])?,
            abs_tol: doc.number("quadrature", &["abs_tol"])?,
            max_subdivisions,
        })
    }

    /// Serializes back to the layout accepted by [`ScenarioFile::parse`].
    pub fn to_ini(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[scenario]\nname = {}", self.name);
        write_slab(&mut s, "slab1", &self.slab1);
        if let Some(slab2) = &self.slab2 {
            write_slab(&mut s, "slab2", slab2);
        }
        let _ = writeln!(s, "\n[gap]\nmaterial = {}", self.gap);
        if let Some(l) = self.separation_nm {
            let _ = writeln!(s, "\n[separation]\nL_nm = {l}");
        }
        if !self.rules.is_empty() {
            let _ = writeln!(s, "\n[rules]\nlist = {}", self.rules.join(", "));
        }
        if let Some(sw) = &self.sweep {
            let _ = writeln!(s, "\n[sweep]\naxis = {}", sw.axis.name());
            match &sw.values {
                SweepValues::Range { from, to, step } => {
                    let _ = writeln!(s, "from = {from}\nto = {to}\nstep = {step}");
                }
                SweepValues::List(v) => {
                    let _ = writeln!(s, "list = {}", join_list(v));
                }
            }
        }
        match &self.zeta {
            None => {}
            Some(ZetaEntry::Values(v)) => {
                let _ = writeln!(s, "\n[zeta]\nvalues_eV = {}", join_list(v));
            }
            Some(ZetaEntry::PlasmaFractions {
                omega_p_ev,
                fractions,
            }) => {
                let _ = writeln!(
                    s,
                    "\n[zeta]\nomega_p_eV = {omega_p_ev}\nfractions = {}",
                    join_list(fractions)
                );
            }
        }
        match &self.spectral {
            None => {}
            Some(SpectralEntry::MaxwellGarnett) => {
                let _ = writeln!(s, "\n[spectral]\npreset = maxwell-garnett");
            }
            Some(SpectralEntry::Explicit {
                pole_weights,
                pole_positions,
                density_l,
                density_g,
            }) => {
                let _ = writeln!(s, "\n[spectral]");
                for (k, v) in [
                    ("pole_weights", pole_weights),
                    ("pole_positions", pole_positions),
                    ("density_L", density_l),
                    ("density_G", density_g),
                ] {
                    if !v.is_empty() {
                        let _ = writeln!(s, "{k} = {}", join_list(v));
                    }
                }
            }
        }
        if self.rel_tol.is_some() || self.abs_tol.is_some() || self.max_subdivisions.is_some() {
            let _ = writeln!(s, "\n[quadrature]");
            if let Some(v) = self.rel_tol {
                let _ = writeln!(s, "rel_tol = {v}");
            }
            if let Some(v) = self.abs_tol {
                let _ = writeln!(s, "abs_tol = {v}");
            }
            if let Some(v) = self.max_subdivisions {
                let _ = writeln!(s, "max_subdivisions = {v}");
            }
        }
        s
    }
}

/// Expands a `from..=to` grid with the given step.
fn expand_range(from: f64, to: f64, step: f64) -> Result<Vec<f64>, String> {
    if step <= 0.0 {
        return Err(format!("step must be positive, got {step}"));
    }
    if to < from {
        return Err(format!("`to` ({to}) is below `from` ({from})"));
    }
    let span = (to - from) / step;
    let n = (span + 1e-9).floor() as usize;
    if n > 1_000_000 {
        return Err(format!("grid of {n} points is too large"));
    }
    Ok((0..=n)
        .map(|i| {
            let v = from + i as f64 * step;
            format!("{v:.GRID_DECIMALS$}").parse().unwrap_or(v)
        })
        .collect())
}

struct Resolver<'a> {
    path: &'a Path,
    cache: HashMap<PathBuf, Material>,
    provenance: BTreeMap<String, String>,
    warnings: Vec<String>,
}

impl Resolver<'_> {
    fn material(&mut self, field: &str, target: &str) -> Result<DielectricModel, LoadError> {
        if target == "vacuum" {
            return Ok(DielectricModel::Vacuum);
        }
        let full = resolve(self.path, target);
        if !self.cache.contains_key(&full) {
            let m = load_material(&full).map_err(|e| LoadError::Unresolved {
                path: self.path.to_path_buf(),
                field: field.to_string(),
                target: target.to_string(),
                reason: match e {
                    LoadError::Io { source, .. } => source.to_string(),
                    other => other.to_string(),
                },
            })?;
            self.provenance
                .insert(m.name().to_string(), m.file.provenance.clone());
            self.warnings.extend(m.warnings.iter().cloned());
            self.cache.insert(full.clone(), m);
        }
        Ok(self.cache[&full].model.clone())
    }

    fn slab(
        &mut self,
        section: &str,
        entry: &SlabEntry,
        rule: &MixingRule,
    ) -> Result<Slab, LoadError> {
        Ok(match entry {
            SlabEntry::PerfectConductor => Slab::PerfectConductor,
            SlabEntry::Homogeneous { material } => {
                Slab::Homogeneous(self.material(&format!("{section}.material"), material)?)
            }
            SlabEntry::Composite {
                host,
                inclusion,
                f,
                shape,
                a_nm,
                ..
            } => {
                let host = self.material(&format!("{section}.host"), host)?;
                let inclusion = self.material(&format!("{section}.inclusion"), inclusion)?;
                let invalid =
                    |e: crate::Error| LoadError::validation(self.path, section, e.to_string());
                let fill = FillingFraction::new(*f).map_err(invalid)?;
                let spec =
                    CompositeSpec::new(host, inclusion, fill, *shape, *a_nm).map_err(invalid)?;
                Slab::composite(spec, rule.clone())
            }
        })
    }
}

fn spectral_source(path: &Path, entry: &SpectralEntry) -> Result<SpectralSource, LoadError> {
    let invalid = |msg: String| LoadError::validation(path, "spectral", msg);
    match entry {
        SpectralEntry::MaxwellGarnett => Ok(SpectralSource::MaxwellGarnettPole),
        SpectralEntry::Explicit {
            pole_weights,
            pole_positions,
            density_l,
            density_g,
        } => {
            if pole_weights.len() != pole_positions.len() {
                return Err(invalid(
                    "pole_weights and pole_positions differ in length".into(),
                ));
            }
            let poles = pole_weights
                .iter()
                .zip(pole_positions)
                .map(|(&weight, &position)| SpectralPole { weight, position })
                .collect();
            let continuous = if density_l.is_empty() && density_g.is_empty() {
                None
            } else {
                Some(
                    InterpolationTable::new(density_l.clone(), density_g.clone())
                        .map_err(|e| invalid(e.to_string()))?,
                )
            };
            SpectralFunction::new(poles, continuous)
                .map(SpectralSource::Explicit)
                .map_err(|e| invalid(e.to_string()))
        }
    }
}

impl ScenarioFile {
    /// Loads referenced materials and expands the sweep.
    pub fn resolve(&self, path: &Path) -> Result<Scenario, LoadError> {
        let invalid = |field: &str, msg: String| LoadError::validation(path, field, msg);

        let spectral = self
            .spectral
            .as_ref()
            .map(|s| spectral_source(path, s))
            .transpose()?;

        let mut choices: Vec<RuleChoice> = Vec::new();
        let mut requested: Vec<String> = self.rules.clone();
        if requested.is_empty() {
            let from_slab = [Some(&self.slab1), self.slab2.as_ref()]
                .into_iter()
                .flatten()
                .find_map(|s| match s {
                    SlabEntry::Composite { rule, .. } => *rule,
                    _ => None,
                });
            requested.push(from_slab.unwrap_or(RuleKind::Bruggeman).name().to_string());
        }
        for name in &requested {
            let choice = if name == "ideal" {
                RuleChoice::Ideal
            } else {
                let kind: RuleKind = name
                    .parse()
                    .map_err(|e: crate::Error| invalid("rules.list", e.to_string()))?;
                if kind == RuleKind::Spectral && spectral.is_none() {
                    return Err(invalid(
                        "spectral",
                        "rule `spectral` needs a [spectral] block (preset or poles)".into(),
                    ));
                }
                RuleChoice::Mixing(configure_rule(kind, self, spectral.clone()))
            };
            if !choices.contains(&choice) {
                choices.push(choice);
            }
        }
        choices.sort_by_key(|c| c.order());

        let base_rule = choices
            .iter()
            .find_map(|c| match c {
                RuleChoice::Mixing(m) => Some(m.clone()),
                RuleChoice::Ideal => None,
            })
            .unwrap_or_else(|| configure_rule(RuleKind::Bruggeman, self, spectral.clone()));

        let mut resolver = Resolver {
            path,
            cache: HashMap::new(),
            provenance: BTreeMap::new(),
            warnings: Vec::new(),
        };
        let slab1 = resolver.slab("slab1", &self.slab1, &base_rule)?;
        let slab2 = match &self.slab2 {
            Some(e) => resolver.slab("slab2", e, &base_rule)?,
            None => slab1.clone(),
        };
        let gap = resolver.material("gap.material", &self.gap)?;

        let sweep = match &self.sweep {
            None => None,
            Some(entry) => {
                let values = match &entry.values {
                    SweepValues::List(v) => v.clone(),
                    SweepValues::Range { from, to, step } => {
                        expand_range(*from, *to, *step).map_err(|m| invalid("sweep", m))?
                    }
                };
                if values.is_empty() {
                    return Err(invalid("sweep", "sweep has no values".into()));
                }
                for v in &values {
                    let ok = match entry.axis {
                        SweepAxis::Filling => (0.0..=1.0).contains(v),
                        SweepAxis::Separation => *v > 0.0,
                    };
                    if !ok {
                        return Err(invalid(
                            "sweep",
                            match entry.axis {
                                SweepAxis::Filling => {
                                    format!("filling fraction {v} is outside [0, 1]")
                                }
                                SweepAxis::Separation => format!("separation {v} must be positive"),
                            },
                        ));
                    }
                }
                Some(Sweep {
                    axis: entry.axis,
                    values,
                })
            }
        };
        let separation = match (self.separation_nm, &sweep) {
            (Some(l), _) => l,
            (None, Some(s)) if s.axis == SweepAxis::Separation => s.values[0],
            (None, _) => {
                return Err(invalid(
                    "separation.L_nm",
                    "missing separation (give [separation] L_nm or sweep over L)".into(),
                ))
            }
        };
        let base = SlabSystem::new(slab1, slab2, gap, separation)
            .map_err(|e| invalid("separation.L_nm", e.to_string()))?;

        let zeta_ev = match &self.zeta {
            None => Vec::new(),
            Some(ZetaEntry::Values(v)) => v.clone(),
            Some(ZetaEntry::PlasmaFractions {
                omega_p_ev,
                fractions,
            }) => fractions.iter().map(|x| x * omega_p_ev).collect(),
        };
        if let Some(z) = zeta_ev.iter().find(|z| !(**z > 0.0 && z.is_finite())) {
            return Err(invalid("zeta", format!("ζ = {z} eV must be positive")));
        }

        let default_q = QuadratureSpec::force();
        let quadrature = QuadratureSpec::new(
            self.rel_tol.unwrap_or(default_q.rel_tol()),
            self.abs_tol.unwrap_or(default_q.abs_tol()),
            self.max_subdivisions
                .unwrap_or(default_q.max_subdivisions()),
        )
        .map_err(|e| invalid("quadrature", e.to_string()))?;

        let mut scenario = Scenario {
            path: path.to_path_buf(),
            file: self.clone(),
            base,
            rules: choices,
            sweep,
            systems: Vec::new(),
            zeta_ev,
            quadrature,
            provenance: resolver.provenance,
            warnings: resolver.warnings,
        };
        let base_choice = RuleChoice::Mixing(base_rule);
        let f0 = scenario.fill().unwrap_or(0.0);
        let l0 = scenario.base.separation_nm();
        let points: Vec<(f64, f64)> = match &scenario.sweep {
            Some(s) if s.axis == SweepAxis::Filling => s.values.iter().map(|&f| (f, l0)).collect(),
            Some(s) => s.values.iter().map(|&l| (f0, l)).collect(),
            None => vec![(f0, l0)],
        };
        scenario.systems = points
            .into_iter()
            .map(|(f, l)| scenario.system(&base_choice, f, l))
            .collect::<crate::Result<_>>()
            .map_err(|e| invalid("sweep", e.to_string()))?;
        Ok(scenario)
    }
}

/// Loads a scenario and every material it references.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, LoadError> {
    let path = path.as_ref();
    let text = read_text(path)?;
    ScenarioFile::parse(path, &text)?.resolve(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn setup(scenario: &str) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join("sio2.ini"),
            "[material]\nname = sio2\nkind = oscillators\n[oscillator.1]\nC = 1.93\nomega_eV = 0.1378\n[oscillator.2]\nC = 1.359\nomega_eV = 13.16\n",
        )
        .unwrap();
        fs::write(
            dir.path().join("au.ini"),
            "[material]\nname = au\nkind = drude\nprovenance = test\n[drude]\nomega_p_eV = 9\ngamma_eV = 0.035\n",
        )
        .unwrap();
        let p = dir.path().join("s.ini");
        fs::write(&p, scenario).unwrap();
        (dir, p)
    }

    const BASE: &str =
        "[scenario]\nname = t\n[slab1]\nhost = sio2.ini\ninclusion = au.ini\nf = 0.1\na_nm = 5\n";

    #[test]
    fn filling_sweep_expands_to_21_systems() {
        let (_d, p) = setup(&format!(
            "{BASE}[separation]\nL_nm = 100\n[sweep]\naxis = f\nfrom = 0\nto = 0.3\nstep = 0.015\n"
        ));
        let s = load_scenario(&p).unwrap();
        assert_eq!(s.systems.len(), 21);
        let grid = s.fill_grid();
        assert_eq!(grid[7], 0.105);
        assert_eq!(*grid.last().unwrap(), 0.3);
        assert_eq!(s.provenance.get("au").map(String::as_str), Some("test"));
    }

    #[test]
    fn missing_material_is_unresolved() {
        let (_d, p) = setup(
            "[slab1]\nhost = sio2.ini\ninclusion = nope.ini\nf = 0.1\na_nm = 5\n[separation]\nL_nm = 100\n",
        );
        let e = load_scenario(&p).unwrap_err();
        match &e {
            LoadError::Unresolved { field, target, .. } => {
                assert_eq!(field, "slab1.inclusion");
                assert_eq!(target, "nope.ini");
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn spectral_without_block_is_rejected() {
        let (_d, p) = setup(&format!(
            "{BASE}[separation]\nL_nm = 100\n[rules]\nlist = spectral\n"
        ));
        let e = load_scenario(&p).unwrap_err();
        assert!(
            matches!(&e, LoadError::Validation { field, .. } if field == "spectral"),
            "{e}"
        );
    }

    #[test]
    fn invalid_fill_and_separation() {
        let (_d, p) = setup(&BASE.replace("f = 0.1", "f = 1.5"));
        assert!(load_scenario(&p)
            .unwrap_err()
            .to_string()
            .contains("slab1.f"));
        let (_d, p) = setup(&format!("{BASE}[separation]\nL_nm = -3\n"));
        assert!(load_scenario(&p)
            .unwrap_err()
            .to_string()
            .contains("separation"));
    }

    #[test]
    fn rules_sorted_canonically_with_ideal_first() {
        let (_d, p) = setup(&format!(
            "{BASE}[separation]\nL_nm = 100\n[rules]\nlist = bruggeman, wiener-upper, ideal, maxwell-garnett\n"
        ));
        let s = load_scenario(&p).unwrap();
        let names: Vec<_> = s.rules.iter().map(|r| r.name()).collect();
        assert_eq!(
            names,
            ["ideal", "wiener-upper", "maxwell-garnett", "bruggeman"]
        );
    }

    #[test]
    fn round_trip() {
        let text = format!(
            "{BASE}shape = prolate:0.8\norientation = aligned\naxis = 2\n[slab2]\nperfect_conductor = true\n\
             [separation]\nL_nm = 100\n[rules]\nlist = spectral, mg-ellipsoid\n[sweep]\naxis = L\nlist = 100, 200\n\
             [zeta]\nomega_p_eV = 9\nfractions = 0.02, 0.5\n[spectral]\npole_weights = 0.5, 0.5\npole_positions = 0.2, 0.4\n\
             [quadrature]\nrel_tol = 1e-6\n"
        );
        let a = ScenarioFile::parse(Path::new("s.ini"), &text).unwrap();
        let b = ScenarioFile::parse(Path::new("s.ini"), &a.to_ini()).unwrap();
        assert_eq!(a, b);
        let (_d, p) = setup(&text);
        let s = load_scenario(&p).unwrap();
        assert_eq!(s.zeta_ev, vec![0.18, 4.5]);
        assert_eq!(s.systems.len(), 2);
        assert!(matches!(s.base.slab2, Slab::PerfectConductor));
    }
}
