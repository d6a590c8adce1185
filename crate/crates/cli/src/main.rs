use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use casimir_ema::ingestion::load_scenario;
use casimir_ema_cli::{
    cmd_compare_rules, cmd_epsilon_sweep, cmd_eta_vs_filling, cmd_force_vs_separation,
    cmd_validate, exit, CliError, RunOptions, Table,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "casimir-ema",
    version,
    about = "Composite-slab dielectric and Casimir force sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file.
    #[arg(long)]
    scenario: PathBuf,
    /// Output CSV; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative tolerance of the force integral (overrides the scenario).
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Effective permittivity against filling fraction at fixed ζ.
    EpsilonSweep(Common),
    /// Reduction factor and pressure against plate separation.
    #[command(name = "force-vs-L")]
    ForceVsL(Common),
    /// Reduction factor against filling fraction at fixed separation.
    EtaVsF(Common),
    /// Relative difference of η between two rules.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        rule_a: String,
        #[arg(long)]
        rule_b: String,
    },
    /// Load the scenario and its materials, then report.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn emit(table: &Table, out: &Option<PathBuf>) -> Result<(), CliError> {
    match out {
        Some(p) => table.write(p),
        None => std::io::stdout()
            .write_all(table.to_csv().as_bytes())
            .map_err(|source| CliError::Output {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (common, scenario_path) = match &cli.command {
        Command::EpsilonSweep(c) | Command::ForceVsL(c) | Command::EtaVsF(c) => {
            (Some(c), &c.scenario)
        }
        Command::Compare { common, .. } => (Some(common), &common.scenario),
        Command::Validate { scenario } => (None, scenario),
    };
    let scenario = load_scenario(scenario_path)?;
    for w in &scenario.warnings {
        eprintln!("warning: {w}");
    }
    let opts = common.map_or_else(RunOptions::default, |c| RunOptions {
        rel_tol: c.rel_tol,
        jobs: c.jobs,
    });
    match &cli.command {
        Command::EpsilonSweep(c) => emit(&cmd_epsilon_sweep(&scenario, &opts)?, &c.out),
        Command::ForceVsL(c) => emit(&cmd_force_vs_separation(&scenario, &opts)?, &c.out),
        Command::EtaVsF(c) => emit(&cmd_eta_vs_filling(&scenario, &opts)?, &c.out),
        Command::Compare {
            common,
            rule_a,
            rule_b,
        } => {
            let (table, s) = cmd_compare_rules(&scenario, rule_a, rule_b, &opts)?;
            emit(&table, &common.out)?;
            eprintln!(
                "max relative difference {:.4} at L = {} nm, f = {}",
                s.max_rel_diff, s.at_l_nm, s.at_f
            );
            Ok(())
        }
        Command::Validate { .. } => {
            for line in cmd_validate(&scenario)? {
                println!("{line}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = e.exit_code();
            debug_assert!([exit::CONFIG, exit::NUMERIC, exit::IO].contains(&code));
            ExitCode::from(code as u8)
        }
    }
}
