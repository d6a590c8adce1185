//! Material and scenario files.
//!
//! Both are INI-style key/value files. Optical data tables are CSV with a
//! `omega_eV,eps2` header and `#` comment lines. Relative paths inside a
//! file resolve against that file's directory.

mod material;
mod scenario;

use std::path::{Path, PathBuf};

use ini::Ini;
use thiserror::Error;

pub use material::{load_material, Material, MaterialFile, MaterialKind};
pub use scenario::{
    load_scenario, RuleChoice, Scenario, ScenarioFile, SlabEntry, SpectralEntry, Sweep, SweepAxis,
    SweepEntry, SweepValues, ZetaEntry,
};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: parse error: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{}: [{field}]: {msg}", path.display())]
    Validation {
        path: PathBuf,
        field: String,
        msg: String,
    },
    #[error("{}: [{field}]: cannot resolve `{target}`: {reason}", path.display())]
    Unresolved {
        path: PathBuf,
        field: String,
        target: String,
        reason: String,
    },
}

impl LoadError {
    fn validation(path: &Path, field: impl Into<String>, msg: impl Into<String>) -> Self {
        Self::Validation {
            path: path.to_path_buf(),
            field: field.into(),
            msg: msg.into(),
        }
    }
}

/// Parsed INI document tagged with its origin for error messages.
struct Doc<'a> {
    path: &'a Path,
    ini: Ini,
}

impl<'a> Doc<'a> {
    fn parse(path: &'a Path, text: &str) -> Result<Self, LoadError> {
        let ini = Ini::load_from_str_noescape(text).map_err(|e| LoadError::Parse {
            path: path.to_path_buf(),
            line: e.line,
            msg: e.msg.to_string(),
        })?;
        if let Some((key, _)) = ini.general_section().iter().next() {
            return Err(LoadError::validation(
                path,
                key,
                "key outside of any section",
            ));
        }
        Ok(Self { path, ini })
    }

    fn err(&self, field: impl Into<String>, msg: impl Into<String>) -> LoadError {
        LoadError::validation(self.path, field, msg)
    }

    fn has(&self, section: &str) -> bool {
        self.ini.section(Some(section)).is_some()
    }

    fn has_key(&self, section: &str, key: &str) -> bool {
        self.get(section, &[key]).is_some()
    }

    fn sections(&self) -> impl Iterator<Item = &str> {
        self.ini.sections().flatten()
    }

    /// First present spelling of `keys` in `section`.
    fn get(&self, section: &str, keys: &[&str]) -> Option<&str> {
        let props = self.ini.section(Some(section))?;
        keys.iter().find_map(|k| props.get(*k)).map(str::trim)
    }

    fn require(&self, section: &str, keys: &[&str]) -> Result<&str, LoadError> {
        self.get(section, keys)
            .ok_or_else(|| self.err(format!("{section}.{}", keys[0]), "missing required key"))
    }

    fn number(&self, section: &str, keys: &[&str]) -> Result<Option<f64>, LoadError> {
        match self.get(section, keys) {
            None => Ok(None),
            Some(raw) => parse_number(raw)
                .map(Some)
                .map_err(|m| self.err(format!("{section}.{}", keys[0]), m)),
        }
    }

    fn require_number(&self, section: &str, keys: &[&str]) -> Result<f64, LoadError> {
        self.number(section, keys)?
            .ok_or_else(|| self.err(format!("{section}.{}", keys[0]), "missing required key"))
    }

    fn list(&self, section: &str, keys: &[&str]) -> Result<Option<Vec<f64>>, LoadError> {
        match self.get(section, keys) {
            None => Ok(None),
            Some(raw) => parse_list(raw)
                .map(Some)
                .map_err(|m| self.err(format!("{section}.{}", keys[0]), m)),
        }
    }

    /// Rejects keys that are not in `allowed` (aliases included).
    fn only_keys(&self, section: &str, allowed: &[&str]) -> Result<(), LoadError> {
        if let Some(props) = self.ini.section(Some(section)) {
            for (k, _) in props.iter() {
                if !allowed.contains(&k) {
                    return Err(self.err(format!("{section}.{k}"), "unknown key"));
                }
            }
        }
        Ok(())
    }
}

fn parse_number(raw: &str) -> Result<f64, String> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| format!("`{raw}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{raw}` is not finite"))
    }
}

fn parse_list(raw: &str) -> Result<Vec<f64>, String> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_number)
        .collect()
}

fn join_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn read_text(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn resolve(base: &Path, target: &str) -> PathBuf {
    let p = Path::new(target);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.parent().unwrap_or(Path::new(".")).join(p)
    }
}
