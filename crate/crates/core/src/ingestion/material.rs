use std::fmt::Write as _;
use std::path::Path;

use super::{read_text, resolve, Doc, LoadError};
use crate::dielectric::{
    DielectricModel, DrudeParams, Oscillator, OscillatorParams, SpectrumTable,
};

const PLASMA_KEYS: &[&str] = &["omega_p_eV", "ω_p_eV"];
const DAMPING_KEYS: &[&str] = &["gamma_eV", "γ_eV"];
const OMEGA_KEYS: &[&str] = &["omega_eV", "ω_eV"];

/// The declarative content of a material file.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialFile {
    pub name: String,
    pub provenance: String,
    pub kind: MaterialKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MaterialKind {
    Vacuum,
    Drude {
        plasma_ev: f64,
        damping_ev: f64,
    },
    /// `(strength, frequency in eV)` per line, in file order.
    Oscillators(Vec<(f64, f64)>),
    Tabulated {
        path: String,
        tail_exponent: f64,
        extrapolation: Option<(f64, f64)>,
    },
}

/// A loaded, validated material.
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub file: MaterialFile,
    pub model: DielectricModel,
    /// Non-fatal findings, e.g. a tabulated material without a low-frequency
    /// extrapolation block.
    pub warnings: Vec<String>,
}

impl Material {
    pub fn name(&self) -> &str {
        &self.file.name
    }

    pub fn vacuum() -> Self {
        Self {
            file: MaterialFile {
                name: "vacuum".into(),
                provenance: "exact".into(),
                kind: MaterialKind::Vacuum,
            },
            model: DielectricModel::Vacuum,
            warnings: Vec::new(),
        }
    }
}

impl MaterialFile {
    /// Parses the INI text of a material file; `path` only labels errors.
    pub fn parse(path: &Path, text: &str) -> Result<Self, LoadError> {
        let doc = Doc::parse(path, text)?;
        doc.only_keys("material", &["name", "kind", "provenance"])?;
        let name = doc.require("material", &["name"])?.to_string();
        let provenance = doc
            .get("material", &["provenance"])
            .unwrap_or("")
            .to_string();
        let kind_name = doc.require("material", &["kind"])?;

        let mut allowed: Vec<String> = vec!["material".into()];
        let kind = match kind_name {
            "vacuum" => MaterialKind::Vacuum,
            "drude" => {
                allowed.push("drude".into());
                doc.only_keys("drude", &[PLASMA_KEYS, DAMPING_KEYS].concat())?;
                MaterialKind::Drude {
                    plasma_ev: doc.require_number("drude", PLASMA_KEYS)?,
                    damping_ev: doc.require_number("drude", DAMPING_KEYS)?,
                }
            }
            "oscillators" => {
                let mut lines: Vec<(u32, String)> = Vec::new();
                for s in doc.sections() {
                    if let Some(idx) = s.strip_prefix("oscillator.") {
                        let k: u32 = idx.parse().map_err(|_| {
                            doc.err(s, "oscillator sections are named [oscillator.<integer>]")
                        })?;
                        lines.push((k, s.to_string()));
                    }
                }
                lines.sort();
                if lines.is_empty() {
                    return Err(doc.err(
                        "oscillator",
                        "an oscillator material needs at least one [oscillator.k] section",
                    ));
                }
                let mut out = Vec::new();
                for (_, s) in &lines {
                    doc.only_keys(s, &[&["C"][..], OMEGA_KEYS].concat())?;
                    out.push((
                        doc.require_number(s, &["C"])?,
                        doc.require_number(s, OMEGA_KEYS)?,
                    ));
                    allowed.push(s.clone());
                }
                MaterialKind::Oscillators(out)
            }
            "tabulated" => {
                allowed.push("tabulated".into());
                doc.only_keys("tabulated", &["path", "tail_exponent"])?;
                let path = doc.require("tabulated", &["path"])?.to_string();
                let tail_exponent = doc
                    .number("tabulated", &["tail_exponent"])?
                    .unwrap_or(SpectrumTable::DEFAULT_TAIL_EXPONENT);
                let extrapolation = if doc.has("extrapolation") {
                    allowed.push("extrapolation".into());
                    doc.only_keys("extrapolation", &[PLASMA_KEYS, DAMPING_KEYS].concat())?;
                    Some((
                        doc.require_number("extrapolation", PLASMA_KEYS)?,
                        doc.require_number("extrapolation", DAMPING_KEYS)?,
                    ))
                } else {
                    None
                };
                MaterialKind::Tabulated {
                    path,
                    tail_exponent,
                    extrapolation,
                }
            }
            other => {
                return Err(doc.err(
                    "material.kind",
                    format!(
                        "unknown kind `{other}` (expected vacuum, drude, oscillators or tabulated)"
                    ),
                ))
            }
        };
        if let Some(s) = doc.sections().find(|s| !allowed.iter().any(|a| a == s)) {
            return Err(doc.err(s, format!("section not valid for kind `{kind_name}`")));
        }
        Ok(Self {
            name,
            provenance,
            kind,
        })
    }

    /// Serializes back to the INI layout accepted by [`MaterialFile::parse`].
    pub fn to_ini(&self) -> String {
        let mut s = String::new();
        let kind = match &self.kind {
            MaterialKind::Vacuum => "vacuum",
            MaterialKind::Drude { .. } => "drude",
            MaterialKind::Oscillators(_) => "oscillators",
            MaterialKind::Tabulated { .. } => "tabulated",
        };
        let _ = writeln!(s, "[material]\nname = {}\nkind = {kind}", self.name);
        if !self.provenance.is_empty() {
            let _ = writeln!(s, "provenance = {}", self.provenance);
        }
        match &self.kind {
            MaterialKind::Vacuum => {}
            MaterialKind::Drude {
                plasma_ev,
                damping_ev,
            } => {
                let _ = writeln!(
                    s,
                    "\n[drude]\nomega_p_eV = {plasma_ev}\ngamma_eV = {damping_ev}"
                );
            }
            MaterialKind::Oscillators(lines) => {
                for (k, (c, w)) in lines.iter().enumerate() {
                    let _ = writeln!(s, "\n[oscillator.{}]\nC = {c}\nomega_eV = {w}", k + 1);
                }
            }
            MaterialKind::Tabulated {
                path,
                tail_exponent,
                extrapolation,
            } => {
                let _ = writeln!(
                    s,
                    "\n[tabulated]\npath = {path}\ntail_exponent = {tail_exponent}"
                );
                if let Some((wp, g)) = extrapolation {
                    let _ = writeln!(s, "\n[extrapolation]\nomega_p_eV = {wp}\ngamma_eV = {g}");
                }
            }
        }
        s
    }

    /// Builds the model; `path` is the material file (for resolving data paths).
    pub fn build(&self, path: &Path) -> Result<Material, LoadError> {
        let invalid =
            |field: &str, e: crate::Error| LoadError::validation(path, field, e.to_string());
        let mut warnings = Vec::new();
        let model = match &self.kind {
            MaterialKind::Vacuum => DielectricModel::Vacuum,
            MaterialKind::Drude {
                plasma_ev,
                damping_ev,
            } => DielectricModel::Drude(
                DrudeParams::new(*plasma_ev, *damping_ev).map_err(|e| invalid("drude", e))?,
            ),
            MaterialKind::Oscillators(lines) => DielectricModel::Oscillators(
                OscillatorParams::new(
                    lines
                        .iter()
                        .map(|&(strength, frequency_ev)| Oscillator {
                            strength,
                            frequency_ev,
                        })
                        .collect(),
                )
                .map_err(|e| invalid("oscillator", e))?,
            ),
            MaterialKind::Tabulated {
                path: data,
                tail_exponent,
                extrapolation,
            } => {
                let low = extrapolation
                    .map(|(wp, g)| DrudeParams::new(wp, g))
                    .transpose()
                    .map_err(|e| invalid("extrapolation", e))?;
                if low.is_none() {
                    warnings.push(format!(
                        "{}: no [extrapolation] block; Kramers-Kronig rotation will fail for \
                         frequencies that need data below the first table row",
                        path.display()
                    ));
                }
                let data_path = resolve(path, data);
                let (omega, eps2) = read_spectrum(&data_path)?;
                DielectricModel::Tabulated(
                    SpectrumTable::new(omega, eps2, low, *tail_exponent)
                        .map_err(|e| invalid("tabulated", e))?,
                )
            }
        };
        Ok(Material {
            file: self.clone(),
            model,
            warnings,
        })
    }
}

/// Reads an `omega_eV,eps2` CSV, checking monotone ω and passivity per row.
fn read_spectrum(path: &Path) -> Result<(Vec<f64>, Vec<f64>), LoadError> {
    let text = read_text(path)?;
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let parse_err = |line: usize, msg: String| LoadError::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let headers = rdr
        .headers()
        .map_err(|e| parse_err(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?
        .clone();
    let header_line = rdr.position().line() as usize;
    if headers.len() != 2 || &headers[0] != "omega_eV" || &headers[1] != "eps2" {
        return Err(parse_err(
            header_line.max(1),
            format!(
                "expected header `omega_eV,eps2`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut omega: Vec<f64> = Vec::new();
    let mut eps2 = Vec::new();
    for rec in rdr.records() {
        let rec = rec
            .map_err(|e| parse_err(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let num = |i: usize| -> Result<f64, LoadError> {
            rec[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(line, format!("`{}` is not a number", &rec[i])))
        };
        let (w, e) = (num(0)?, num(1)?);
        if w <= 0.0 {
            return Err(parse_err(line, format!("ω = {w} must be positive")));
        }
        if let Some(&prev) = omega.last() {
            if w <= prev {
                return Err(parse_err(
                    line,
                    format!("monotonicity violated: ω = {w} does not exceed previous ω = {prev}"),
                ));
            }
        }
        if e < 0.0 {
            return Err(parse_err(
                line,
                format!("passivity violated: ε'' = {e} is negative"),
            ));
        }
        omega.push(w);
        eps2.push(e);
    }
    if omega.len() < 2 {
        return Err(parse_err(
            header_line,
            "spectrum needs at least two rows".into(),
        ));
    }
    Ok((omega, eps2))
}

/// Loads and validates a material file.
pub fn load_material(path: impl AsRef<Path>) -> Result<Material, LoadError> {
    let path = path.as_ref();
    let text = read_text(path)?;
    MaterialFile::parse(path, &text)?.build(path)
}
