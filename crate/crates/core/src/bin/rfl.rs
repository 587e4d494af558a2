use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rfl::harness::output::write_json;
use rfl::harness::{presets, sweep, sweep_summary, write_run_dir, RunConfig, RunSummary, Simulation, SweepAxis, SweepConfig};
use rfl::{Error, Result};

#[derive(Parser)]
#[command(name = "rfl", version, about = "Regular and fair bandit scheduling simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// JSON run configuration.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset name instead of a config file.
    #[arg(long)]
    preset: Option<String>,
}

impl Source {
    fn load(&self) -> Result<RunConfig> {
        match (&self.config, &self.preset) {
            (Some(path), _) => RunConfig::load(path),
            (None, Some(name)) => Ok(presets::by_name(name)?.config),
            (None, None) => Err(Error::InvalidParameter("--config or --preset is required".into())),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate every seed and report seed-averaged series.
    Run {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeat a run over values of one parameter.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// alpha, beta, epsilon or kind.
        #[arg(long)]
        axis: SweepAxis,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the optimal stationary policy.
    Oracle {
        #[command(flatten)]
        source: Source,
    },
    /// Print the analytic guarantees.
    Bounds {
        #[command(flatten)]
        source: Source,
    },
    /// Replay with invariant and drift diagnostics.
    Check {
        #[command(flatten)]
        source: Source,
        /// Replaces the analytic drift conditioning level.
        #[arg(long)]
        level: Option<f64>,
    },
    /// Print a built-in preset as a config file.
    Preset { name: String },
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    writeln!(std::io::stdout().lock(), "{text}").map_err(|e| Error::Io { path: "<stdout>".into(), source: e })
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { source, seeds, out } => {
            let mut config = source.load()?;
            if let Some(seeds) = seeds {
                config.seeds = seeds;
            }
            let sim = Simulation::new(&config)?;
            let report = sim.run_many(&config.seeds)?;
            match out.or(config.out_dir.clone()) {
                Some(dir) => {
                    write_run_dir(&dir, &sim, &report, &sim.bounds()?)?;
                    eprintln!("wrote {}", dir.display());
                }
                None => print_json(&RunSummary::new(&config, sim.oracle(), &report))?,
            }
        }
        Command::Sweep { source, axis, values, seeds, out } => {
            let mut base = source.load()?;
            if let Some(seeds) = seeds {
                base.seeds = seeds;
            }
            let values = values.iter().map(|v| axis.parse_value(v)).collect::<Result<_>>()?;
            let points = sweep(&SweepConfig::new(base.clone(), axis, values))?;
            let summary = sweep_summary(axis, &points);
            match out.or(base.out_dir) {
                Some(dir) => {
                    for p in &points {
                        let sub = dir.join(format!("{}={}", axis.name(), p.value));
                        write_run_dir(&sub, &p.simulation, &p.report, &p.simulation.bounds()?)?;
                    }
                    std::fs::create_dir_all(&dir).map_err(|e| Error::Io { path: dir.clone(), source: e })?;
                    write_json(&dir.join("sweep.json"), &summary)?;
                    eprintln!("wrote {}", dir.display());
                }
                None => print_json(&summary)?,
            }
        }
        Command::Oracle { source } => print_json(Simulation::new(&source.load()?)?.oracle())?,
        Command::Bounds { source } => print_json(&Simulation::new(&source.load()?)?.bounds()?)?,
        Command::Check { source, level } => {
            let config = source.load()?;
            let sim = Simulation::new(&config)?;
            sim.run_many(&config.seeds)?;
            let report = sim.check(level)?;
            print_json(&report)?;
            return Ok(report.passed());
        }
        Command::Preset { name } => print_json(&presets::by_name(&name)?.config)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
