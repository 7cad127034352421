use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use illg::config::{parse_config, RunConfig};
use illg::experiment::{run, RunError, RunSummary, CONVERGENCE_FILE, TIMESERIES_FILE};

const EXIT_CONFIG: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_OTHER: u8 = 1;

/// Finite-difference solver for the inertial Landau-Lifshitz-Gilbert equation.
#[derive(Parser, Debug)]
#[command(name = "illg", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record every N-th step; overrides `record_every` in the config.
        #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
        record_every: Option<u64>,
    },
    /// Run a convergence study (`converge-*` experiments only).
    Converge {
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        let code = match &e {
            _ if e.is_nonconvergence() => EXIT_NONCONVERGENCE,
            RunError::Io { .. } => EXIT_IO,
            _ => EXIT_OTHER,
        };
        Failure::new(code, e.to_string())
    }
}

fn load(path: &Path) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Failure::new(EXIT_CONFIG, format!("{}: {e}", path.display())))
}

fn execute(cli: Cli) -> Result<String, Failure> {
    let (mut cfg, out) = match cli.command {
        Command::Run { config, out, record_every } => {
            let mut cfg = load(&config)?;
            if let Some(n) = record_every {
                if cfg.experiment.is_study() {
                    log::warn!("--record-every has no effect on a convergence study");
                }
                cfg.record_every = n as usize;
            }
            (cfg, out)
        }
        Command::Converge { config, out } => {
            let cfg = load(&config)?;
            if !cfg.experiment.is_study() {
                return Err(Failure::new(
                    EXIT_CONFIG,
                    format!("{}: `{}` is not a convergence study; use `illg run`", config.display(), cfg.experiment),
                ));
            }
            (cfg, out)
        }
    };
    if let Some(dir) = out {
        cfg.output_dir = dir;
    }
    let dir = cfg.output_dir.clone();
    log::info!("running {} into {}", cfg.experiment, dir.display());
    let summary = run(&cfg, &dir)?;

    let mut msg = String::new();
    match summary {
        RunSummary::Simulation(s) => {
            let a = s.final_average;
            let _ = writeln!(msg, "{}: {} steps to t = {}", cfg.experiment, s.steps, s.final_time);
            let _ = writeln!(msg, "final <m> = ({:.6}, {:.6}, {:.6})", a[0], a[1], a[2]);
            let _ = writeln!(msg, "max ||m|^2 - 1| = {:.3e}, max inner iterations = {}", s.max_len_dev, s.max_fp_iters);
            let _ = write!(msg, "wrote {}", dir.join(TIMESERIES_FILE).display());
        }
        RunSummary::Study(t) => {
            let _ = writeln!(msg, "{}: {} study", cfg.experiment, t.axis);
            for r in &t.rows {
                let _ = writeln!(msg, "{:>12.5e}  {:.4e}  {:.4e}", r.resolution, r.error_l2, r.error_linf);
            }
            let _ = writeln!(msg, "order  l2 {:.3}  linf {:.3}", t.order_l2, t.order_linf);
            let _ = write!(msg, "wrote {}", dir.join(CONVERGENCE_FILE).display());
        }
    }
    Ok(msg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(msg) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
