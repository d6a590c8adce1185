use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use casimir_ema::ingestion::Scenario;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// A CSV table with `#` metadata lines ahead of the header row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub meta: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub(crate) fn new(verb: &str, scenario: &Scenario, columns: Vec<&'static str>) -> Self {
        let mut meta = vec![
            format!("casimir-ema {verb}"),
            format!("scenario: {}", scenario.name()),
            format!("scenario_sha256: {}", scenario_hash(scenario)),
            format!(
                "quadrature: rel_tol={:e} abs_tol={:e} max_subdivisions={}",
                scenario.quadrature.rel_tol(),
                scenario.quadrature.abs_tol(),
                scenario.quadrature.max_subdivisions()
            ),
        ];
        for (name, prov) in &scenario.provenance {
            meta.push(format!("material {name}: {prov}"));
        }
        Self {
            meta,
            columns,
            rows: Vec::new(),
        }
    }

    /// Index of `column` in the header.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// Rows whose `key` column equals `value`.
    pub fn rows_where<'a>(
        &'a self,
        key: &str,
        value: &'a str,
    ) -> impl Iterator<Item = &'a Vec<String>> {
        let k = self.column(key);
        self.rows
            .iter()
            .filter(move |r| k.is_some_and(|k| r[k] == value))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for m in &self.meta {
            let _ = writeln!(s, "# {m}");
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        s
    }

    /// Writes the CSV through a sibling temporary file so a failed write
    /// never leaves a truncated table at `path`.
    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let tmp = partial_path(path);
        let result = (|| {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(self.to_csv().as_bytes())?;
            f.sync_all()?;
            fs::rename(&tmp, path)
        })();
        result.map_err(|source| {
            let _ = fs::remove_file(&tmp);
            CliError::Output {
                path: path.to_path_buf(),
                source,
            }
        })
    }
}

fn partial_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".partial");
    path.with_file_name(name)
}

fn scenario_hash(scenario: &Scenario) -> String {
    let bytes = fs::read(&scenario.path).unwrap_or_else(|_| scenario.file.to_ini().into_bytes());
    hex::encode(Sha256::digest(bytes))
}

/// Fixed-precision scientific notation for computed quantities.
pub(crate) fn sci(v: f64) -> String {
    format!("{v:.10e}")
}
