//! `casimir-spin`: depolarization factors, single-mode torque, vacuum
//! friction torque, self-verification and parameter sweeps.

mod commands;
mod config;
mod error;
mod report;

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{Param, RunConfig, SweepAxis, SweepTarget};
use error::{CliError, CliResult};
use report::{Format, Report};

const WORKERS_ENV: &str = "CASIMIR_SPIN_WORKERS";

#[derive(Parser)]
#[command(
    name = "casimir-spin",
    version,
    about = "Vacuum friction torque on a spinning dielectric ellipsoid"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Depolarization factors and polarizability tensor.
    Depol(Common),
    /// Exact and small-Omega torque for one incident mode, with its line breakdown.
    ModeTorque(Common),
    /// Torque from zero-point fluctuations up to the cutoff.
    Vacuum {
        #[command(flatten)]
        common: Common,
        /// Also write the sampled integrand dGamma/domega as CSV.
        #[arg(long, value_name = "PATH")]
        spectrum_out: Option<PathBuf>,
    },
    /// Cross-check every analytic route against its numerical oracle.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Inject a defect to test the harness: none, prefactor-bug or sign-flip.
        #[arg(long)]
        fault: Option<String>,
    },
    /// Evaluate a computation over a one- or two-axis parameter grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Computation per grid point: depol, mode-torque or vacuum.
        #[arg(long)]
        target: Option<String>,
        /// Sweep axis `name:start:stop:count[:lin|log]`; give at most twice (outer first).
        #[arg(long = "axis", value_name = "SPEC")]
        axes: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// Config file (`key = value` lines, or a previous report).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Worker threads for sweeps (default: $CASIMIR_SPIN_WORKERS, else all cores).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eps1: Option<String>,
    /// Incident frequency omega.
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<String>,
    /// Spin angular speed Omega.
    #[arg(long = "Omega", allow_hyphen_values = true)]
    spin_rate: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Cutoff frequency, or `auto` for c / max(a, b, c).
    #[arg(long, allow_hyphen_values = true)]
    cutoff: Option<String>,
    #[arg(long = "Ex", allow_hyphen_values = true)]
    e_x: Option<String>,
    #[arg(long = "Ez", allow_hyphen_values = true)]
    e_z: Option<String>,
}

impl Common {
    fn overrides(&self) -> [(Param, &Option<String>); 11] {
        [
            (Param::A, &self.a),
            (Param::B, &self.b),
            (Param::C, &self.c),
            (Param::Eps, &self.eps),
            (Param::Eps1, &self.eps1),
            (Param::Omega, &self.omega),
            (Param::SpinRate, &self.spin_rate),
            (Param::Theta, &self.theta),
            (Param::Cutoff, &self.cutoff),
            (Param::Ex, &self.e_x),
            (Param::Ez, &self.e_z),
        ]
    }

    fn load(&self) -> CliResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?;
                RunConfig::from_text(&text, &path.display().to_string())?
            }
            None => RunConfig::default(),
        };
        for (param, value) in self.overrides() {
            if let Some(v) = value {
                cfg.set(param.name(), v)
                    .map_err(|msg| CliError::Config(format!("--{}: {msg}", param.name())))?;
            }
        }
        Ok(cfg)
    }

    fn format(&self) -> Format {
        match self.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }

    fn workers(&self) -> CliResult<usize> {
        let n = match self.workers {
            Some(n) => n,
            None => match std::env::var(WORKERS_ENV) {
                Ok(v) => v.trim().parse().map_err(|_| {
                    CliError::Config(format!("{WORKERS_ENV}: `{v}` is not a worker count"))
                })?,
                Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
            },
        };
        if n == 0 {
            return Err(CliError::Config("worker count must be at least 1".into()));
        }
        Ok(n)
    }
}

/// Output sink opened before any computation so that bad paths fail early.
enum Sink {
    Stdout,
    File(PathBuf, File),
}

impl Sink {
    fn open(path: Option<&Path>) -> CliResult<Sink> {
        match path {
            None => Ok(Sink::Stdout),
            Some(p) => File::create(p)
                .map(|f| Sink::File(p.to_path_buf(), f))
                .map_err(|source| CliError::Io {
                    path: p.to_path_buf(),
                    source,
                }),
        }
    }

    fn write(self, text: &str) -> CliResult<()> {
        match self {
            Sink::Stdout => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|source| CliError::Io {
                        path: PathBuf::from("<stdout>"),
                        source,
                    })
            }
            Sink::File(path, mut f) => f
                .write_all(text.as_bytes())
                .and_then(|_| f.flush())
                .map_err(|source| CliError::Io { path, source }),
        }
    }
}

fn emit(
    common: &Common,
    cfg: &RunConfig,
    sink: Sink,
    run: impl FnOnce(&RunConfig) -> CliResult<Report>,
) -> CliResult<()> {
    let report = run(cfg)?;
    sink.write(&report.render(common.format()))?;
    let failed = report.failed_checks();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Oracle(failed.join(", ")))
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Depol(common) => {
            let cfg = common.load()?;
            cfg.validate()?;
            let sink = Sink::open(common.out.as_deref())?;
            emit(&common, &cfg, sink, commands::depol)
        }
        Command::ModeTorque(common) => {
            let cfg = common.load()?;
            cfg.validate()?;
            let sink = Sink::open(common.out.as_deref())?;
            emit(&common, &cfg, sink, commands::mode_torque_cmd)
        }
        Command::Vacuum {
            common,
            spectrum_out,
        } => {
            let cfg = common.load()?;
            cfg.validate()?;
            let sink = Sink::open(common.out.as_deref())?;
            let spectrum_sink = spectrum_out
                .as_deref()
                .map(|p| Sink::open(Some(p)))
                .transpose()?;
            if let Some(s) = spectrum_sink {
                s.write(&commands::spectrum_report(&cfg)?.render(Format::Csv))?;
            }
            emit(&common, &cfg, sink, commands::vacuum)
        }
        Command::Verify { common, fault } => {
            let mut cfg = common.load()?;
            if let Some(f) = fault {
                cfg.set("verify.fault", &f)
                    .map_err(|msg| CliError::Config(format!("--fault: {msg}")))?;
            }
            cfg.validate()?;
            let sink = Sink::open(common.out.as_deref())?;
            emit(&common, &cfg, sink, commands::verify)
        }
        Command::Sweep {
            common,
            target,
            axes,
        } => {
            let mut cfg = common.load()?;
            if let Some(t) = target {
                cfg.sweep_target = SweepTarget::parse(&t).ok_or_else(|| {
                    CliError::Config(format!("--target: unknown computation `{t}`"))
                })?;
            }
            if !axes.is_empty() {
                if axes.len() > 2 {
                    return Err(CliError::Config("at most two sweep axes".into()));
                }
                let parsed = axes
                    .iter()
                    .map(|a| {
                        SweepAxis::parse(a)
                            .map_err(|msg| CliError::Config(format!("--axis: {msg}")))
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                cfg.sweep_outer = parsed.first().copied();
                cfg.sweep_inner = parsed.get(1).copied();
            }
            cfg.validate()?;
            let workers = common.workers()?;
            commands::sweep_grid(&cfg)?;
            let sink = Sink::open(common.out.as_deref())?;
            emit(&common, &cfg, sink, |c| commands::sweep(c, workers))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("casimir-spin: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
