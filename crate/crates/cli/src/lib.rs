//! Sweeps and comparisons over scenario files, emitted as CSV tables.
//!
//! Each command takes a loaded [`Scenario`] and returns a [`Table`]; the
//! binary writes it to `--out` or stdout. Grid points are evaluated on a
//! rayon pool and reassembled in grid order, so output does not depend on
//! the number of worker threads.

mod error;
mod table;

use casimir_ema::dielectric::ImaginaryFrequency;
use casimir_ema::ingestion::{RuleChoice, Scenario};
use casimir_ema::lifshitz::{force_per_area, ForceResult, Slab};
use casimir_ema::mixing::{effective_epsilon, CompositeSpec, FillingFraction, MixingRule};
use rayon::prelude::*;

pub use error::{exit, CliError};
pub use table::Table;

use table::sci;

/// Settings shared by every command.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Overrides the scenario's relative tolerance for the force integral.
    pub rel_tol: Option<f64>,
    /// Worker threads; `None` uses the available parallelism.
    pub jobs: Option<usize>,
}

impl RunOptions {
    fn apply(&self, scenario: &Scenario) -> Result<Scenario, CliError> {
        let mut s = scenario.clone();
        if let Some(r) = self.rel_tol {
            s.quadrature = s
                .quadrature
                .with_rel_tol(r)
                .map_err(|e| CliError::Config(format!("--rel-tol: {e}")))?;
        }
        Ok(s)
    }

    /// Maps `f` over `items` in parallel, keeping input order.
    fn par_map<T, U, F>(&self, items: Vec<T>, f: F) -> Result<Vec<U>, CliError>
    where
        T: Send,
        U: Send,
        F: Fn(T) -> Result<U, CliError> + Sync + Send,
    {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.jobs {
            if n == 0 {
                return Err(CliError::Config("--jobs must be at least 1".into()));
            }
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
        pool.install(|| items.into_par_iter().map(f).collect())
    }
}

fn first_composite(scenario: &Scenario) -> Result<&CompositeSpec, CliError> {
    [&scenario.base.slab1, &scenario.base.slab2]
        .into_iter()
        .find_map(|s| match s {
            Slab::Composite { spec, .. } => Some(spec),
            _ => None,
        })
        .ok_or_else(|| CliError::Config("scenario has no composite slab".into()))
}

fn single_fill(scenario: &Scenario, verb: &str) -> Result<f64, CliError> {
    match scenario.fill_grid().as_slice() {
        [f] => Ok(*f),
        [] => Ok(0.0),
        _ => Err(CliError::Config(format!(
            "{verb} runs at a single filling fraction; remove the f sweep"
        ))),
    }
}

fn force_at(
    scenario: &Scenario,
    rule: &RuleChoice,
    f: f64,
    l_nm: f64,
) -> Result<ForceResult, CliError> {
    let context = || format!("rule {rule}, f = {f}, L = {l_nm} nm");
    let sys = scenario
        .system(rule, f, l_nm)
        .map_err(|e| CliError::numeric(context(), e))?;
    force_per_area(&sys, &scenario.quadrature).map_err(|e| CliError::numeric(context(), e))
}

/// `f,rule,zeta_eV,eps_eff` for every filling fraction, mixing rule and ζ.
pub fn cmd_epsilon_sweep(scenario: &Scenario, opts: &RunOptions) -> Result<Table, CliError> {
    let scenario = opts.apply(scenario)?;
    let spec = first_composite(&scenario)?;
    if scenario.zeta_ev.is_empty() {
        return Err(CliError::Config(
            "epsilon-sweep needs a [zeta] block with the frequencies to evaluate".into(),
        ));
    }
    let rules: Vec<&MixingRule> = scenario.mixing_rules().collect();
    let mut points = Vec::new();
    for &f in &scenario.fill_grid() {
        for rule in &rules {
            for &z in &scenario.zeta_ev {
                points.push((f, *rule, z));
            }
        }
    }
    let rows = opts.par_map(points, |(f, rule, z)| {
        let context = || format!("rule {}, f = {f}, ζ = {z} eV", rule.kind());
        let fill = FillingFraction::new(f).map_err(|e| CliError::numeric(context(), e))?;
        let zeta = ImaginaryFrequency::new(z).map_err(|e| CliError::numeric(context(), e))?;
        let eps = effective_epsilon(&spec.with_fill(fill), rule, zeta)
            .map_err(|e| CliError::numeric(context(), e))?;
        Ok(vec![
            f.to_string(),
            rule.kind().to_string(),
            z.to_string(),
            sci(eps),
        ])
    })?;
    let mut table = Table::new(
        "epsilon-sweep",
        &scenario,
        vec!["f", "rule", "zeta_eV", "eps_eff"],
    );
    table.rows = rows;
    Ok(table)
}

/// `L_nm,rule,eta,F_Pa,quad_err,validity_ok` over the separation grid.
///
/// `quad_err` is the estimated absolute quadrature error of `eta`.
pub fn cmd_force_vs_separation(scenario: &Scenario, opts: &RunOptions) -> Result<Table, CliError> {
    let scenario = opts.apply(scenario)?;
    let f = single_fill(&scenario, "force-vs-L")?;
    let mut points = Vec::new();
    for &l in &scenario.separation_grid() {
        for rule in &scenario.rules {
            points.push((l, rule));
        }
    }
    let rows = opts.par_map(points, |(l, rule)| {
        let r = force_at(&scenario, rule, f, l)?;
        Ok(vec![
            l.to_string(),
            rule.to_string(),
            sci(r.eta),
            sci(r.force_pa),
            sci(r.eta_error),
            r.validity_ok.to_string(),
        ])
    })?;
    let mut table = Table::new(
        "force-vs-L",
        &scenario,
        vec!["L_nm", "rule", "eta", "F_Pa", "quad_err", "validity_ok"],
    );
    table.meta.push(format!("f: {f}"));
    table.rows = rows;
    Ok(table)
}

/// `f,rule,eta` over the filling-fraction grid at the scenario separation.
pub fn cmd_eta_vs_filling(scenario: &Scenario, opts: &RunOptions) -> Result<Table, CliError> {
    let scenario = opts.apply(scenario)?;
    let l = match scenario.separation_grid().as_slice() {
        [l] => *l,
        _ => {
            return Err(CliError::Config(
                "eta-vs-f runs at a single separation; remove the L sweep".into(),
            ))
        }
    };
    let mut points = Vec::new();
    for &f in &scenario.fill_grid() {
        for rule in &scenario.rules {
            points.push((f, rule));
        }
    }
    let rows = opts.par_map(points, |(f, rule)| {
        let r = force_at(&scenario, rule, f, l)?;
        Ok(vec![f.to_string(), rule.to_string(), sci(r.eta)])
    })?;
    let mut table = Table::new("eta-vs-f", &scenario, vec!["f", "rule", "eta"]);
    table.meta.push(format!("L_nm: {l}"));
    table.rows = rows;
    Ok(table)
}

/// Largest relative difference found by [`cmd_compare_rules`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareSummary {
    pub max_rel_diff: f64,
    pub at_l_nm: f64,
    pub at_f: f64,
}

/// `L_nm,f,eta_a,eta_b,rel_diff` with `rel_diff = |η_b − η_a| / η_a`.
pub fn cmd_compare_rules(
    scenario: &Scenario,
    rule_a: &str,
    rule_b: &str,
    opts: &RunOptions,
) -> Result<(Table, CompareSummary), CliError> {
    let scenario = opts.apply(scenario)?;
    let lookup = |name: &str| {
        scenario
            .rule_by_name(name)
            .map_err(|e| CliError::Config(e.to_string()))
    };
    let (a, b) = (lookup(rule_a)?, lookup(rule_b)?);
    let mut points = Vec::new();
    for &l in &scenario.separation_grid() {
        for &f in &scenario.fill_grid() {
            points.push((l, f));
        }
    }
    let etas = opts.par_map(points, |(l, f)| {
        let ea = force_at(&scenario, &a, f, l)?.eta;
        let eb = if a == b {
            ea
        } else {
            force_at(&scenario, &b, f, l)?.eta
        };
        Ok((l, f, ea, eb))
    })?;

    let mut summary = CompareSummary {
        max_rel_diff: 0.0,
        at_l_nm: f64::NAN,
        at_f: f64::NAN,
    };
    let mut table = Table::new(
        "compare",
        &scenario,
        vec!["L_nm", "f", "eta_a", "eta_b", "rel_diff"],
    );
    for (l, f, ea, eb) in etas {
        let rel = (eb - ea).abs() / ea;
        if summary.at_l_nm.is_nan() || rel > summary.max_rel_diff {
            summary = CompareSummary {
                max_rel_diff: rel,
                at_l_nm: l,
                at_f: f,
            };
        }
        table.rows.push(vec![
            l.to_string(),
            f.to_string(),
            sci(ea),
            sci(eb),
            sci(rel),
        ]);
    }
    table.meta.push(format!("rule_a: {a}"));
    table.meta.push(format!("rule_b: {b}"));
    table.meta.push(format!(
        "summary: max_rel_diff={} at L_nm={} f={}",
        sci(summary.max_rel_diff),
        summary.at_l_nm,
        summary.at_f
    ));
    Ok((table, summary))
}

/// Loads nothing new: checks that every material of a loaded scenario
/// evaluates at each configured ζ (1 eV if none) and returns a report.
pub fn cmd_validate(scenario: &Scenario) -> Result<Vec<String>, CliError> {
    let zetas = if scenario.zeta_ev.is_empty() {
        vec![1.0]
    } else {
        scenario.zeta_ev.clone()
    };
    let mut models = vec![("gap", &scenario.base.gap)];
    for (label, slab) in [
        ("slab1", &scenario.base.slab1),
        ("slab2", &scenario.base.slab2),
    ] {
        match slab {
            Slab::Composite { spec, .. } => {
                models.push((label, &spec.host));
                models.push((label, &spec.inclusion));
            }
            Slab::Homogeneous(m) => models.push((label, m)),
            Slab::PerfectConductor => {}
        }
    }
    for (label, m) in models {
        for &z in &zetas {
            let zeta = ImaginaryFrequency::new(z)
                .map_err(|e| CliError::numeric(format!("{label}, ζ = {z} eV"), e))?;
            m.eval(zeta)
                .map_err(|e| CliError::numeric(format!("{label} {}, ζ = {z} eV", m.kind()), e))?;
        }
    }
    let mut report = vec![
        format!("scenario: {}", scenario.name()),
        format!(
            "rules: {}",
            scenario
                .rules
                .iter()
                .map(|r| r.name())
                .collect::<Vec<_>>()
                .join(", ")
        ),
        format!("filling fractions: {}", scenario.fill_grid().len()),
        format!("separations: {}", scenario.separation_grid().len()),
        format!("systems: {}", scenario.systems.len()),
    ];
    if !scenario.zeta_ev.is_empty() {
        report.push(format!("zeta points: {}", scenario.zeta_ev.len()));
    }
    Ok(report)
}
