//! `qsl-lab`: run speed-limit and non-Markovianity studies from a TOML file.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical check failed,
//! 4 physics violation.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Failure, Table};
use config::{Resolved, ScenarioConfig};

#[derive(Parser, Debug)]
#[command(name = "qsl-lab", version, about = "Quantum speed limits and non-Markovianity of a qubit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; defaults to `output-path` from the scenario, then stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Grid steps per evolution, overriding the scenario.
    #[arg(long, global = true)]
    steps: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Jaynes-Cummings ratio and BLP value across couplings.
    SweepGamma0,
    /// Optimal initial states over a population and phase grid.
    StateScan,
    /// Phase-covariant boundary values along time, with crossings.
    RegionTrajectory,
    /// Class of the dynamical map and its ratio formula.
    Classify,
    /// BLP measure maximised over state pairs.
    Blp,
    /// Speed-limit time of the configured initial state.
    Qsl,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::SweepGamma0 => "sweep-gamma0",
            Command::StateScan => "state-scan",
            Command::RegionTrajectory => "region-trajectory",
            Command::Classify => "classify",
            Command::Blp => "blp",
            Command::Qsl => "qsl",
        }
    }
}

fn header(command: Command, cfg: &Resolved) -> String {
    let mut out = format!("# qsl-lab {}\n# command: {}\n", env!("CARGO_PKG_VERSION"), command.name());
    for line in cfg.to_toml().lines().filter(|l| !l.is_empty()) {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let path = cli.config.as_ref().ok_or_else(|| Failure::Config("--config <path> is required".into()))?;
    let scenario = ScenarioConfig::load(path).map_err(|e| Failure::Config(e.to_string()))?;
    let mut cfg = scenario.resolve().map_err(|e| Failure::Config(e.to_string()))?;
    if let Some(steps) = cli.steps {
        if steps < 16 {
            return Err(Failure::Config("--steps: at least 16 are required".into()));
        }
        cfg.steps = steps;
    }
    if let Some(out) = &cli.output {
        cfg.output_path = Some(out.display().to_string());
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(format!("thread pool: {e}")))?;
    }
    let spec = cfg.model.build().map_err(|e| Failure::Config(e.to_string()))?;

    let table: Table = match cli.command {
        Command::SweepGamma0 => commands::sweep_gamma0(&cfg, &spec)?,
        Command::StateScan => commands::state_scan(&cfg, &spec)?,
        Command::RegionTrajectory => commands::region_trajectory(&cfg, &spec)?,
        Command::Classify => {
            let (table, summary) = commands::classify(&cfg, &spec)?;
            for line in summary {
                eprintln!("{line}");
            }
            table
        }
        Command::Blp => commands::blp(&cfg, &spec)?,
        Command::Qsl => commands::qsl(&cfg, &spec)?,
    };
    let text = table.render(&header(cli.command, &cfg));
    let written = match &cfg.output_path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{p}: {e}")),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    written.map_err(|e| Failure::Config(format!("cannot write output: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qsl-lab: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
