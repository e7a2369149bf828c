use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use cubefpp::analytic::theta;
use cubefpp::experiments::output::Cell;
use cubefpp::experiments::pilot::{run_pilot, PILOT_DIMENSIONS, PILOT_SEED, PILOT_TRIALS};
use cubefpp::experiments::{
    execute, render, run_verify, Command, ExperimentConfig, Format, RunOptions, Table, VerifyOptions,
};
use cubefpp::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(name = "cubefpp", version, about = "First-passage percolation experiments on the n-cube")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form constants and quadratures of A, B, S at (n, u).
    Analytic {
        #[command(flatten)]
        common: Common,
        /// Integration limit; defaults to theta.
        #[arg(long)]
        u: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_subdivisions: Option<usize>,
    },
    /// First-passage times from 0 to 1 under Exp(1) edge weights.
    Fpp {
        #[command(flatten)]
        common: Common,
        /// Also compute the covering time.
        #[arg(long)]
        covering: bool,
        /// Norm orders for the deviation from theta.
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<u32>>,
        #[arg(long)]
        per_trial: bool,
    },
    /// Branching translation process with the alive/ghost coupling.
    Btp {
        #[command(flatten)]
        common: Common,
        /// Defaults to theta.
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        max_particles: Option<usize>,
        #[arg(long)]
        per_trial: bool,
    },
    /// Conditioned continuous-time random walks ending at 1.
    Walk {
        #[command(flatten)]
        common: Common,
        /// Defaults to theta.
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        per_trial: bool,
    },
    /// Invariant and identity suite; exits 1 on any failure.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Plant a negative edge weight to check that it is reported.
        #[arg(long)]
        inject_fault: bool,
    },
    /// Measure the finite-n bands used by acceptance and write them as JSON.
    Pilot {
        #[arg(long, value_delimiter = ',', default_values_t = PILOT_DIMENSIONS)]
        dims: Vec<u32>,
        #[arg(long, default_value_t = PILOT_TRIALS)]
        trials: u64,
        #[arg(long, default_value_t = PILOT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// Start from a TOML config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Worker threads (0 = all cores). Does not affect output.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Print the effective config as TOML and exit.
    #[arg(long)]
    print_config: bool,
}

impl Common {
    fn config(&self, command: Command) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        cfg.command = command;
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.display().to_string());
        }
        if let Some(f) = self.format {
            cfg.format = match f {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            };
        }
        Ok(cfg)
    }
}

enum Failure {
    Usage(String),
    Cap(String),
    Failed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_resource_cap() {
            Failure::Cap(e.to_string())
        } else if matches!(e, Error::InvalidArgument(_) | Error::Parse(_) | Error::Dimension(_) | Error::Io(_)) {
            Failure::Usage(e.to_string())
        } else {
            Failure::Failed(e.to_string())
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(format!("{e:#}"))
    }
}

fn emit(cfg: &ExperimentConfig, text: &str) -> anyhow::Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {path}")),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_table(common: &Common, cfg: ExperimentConfig) -> Result<(), Failure> {
    cfg.validate()?;
    if common.print_config {
        print!("{}", cfg.to_toml()?);
        return Ok(());
    }
    let table = execute(&cfg, RunOptions { threads: common.threads })?;
    emit(&cfg, &render(&cfg, &table)?)?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Analytic { common, u, tol, max_subdivisions } => {
            let mut cfg = common.config(Command::Analytic)?;
            cfg.horizon = u.or(cfg.horizon);
            cfg.tol = tol.unwrap_or(cfg.tol);
            cfg.max_subdivisions = max_subdivisions.unwrap_or(cfg.max_subdivisions);
            if cfg.horizon.is_some_and(|u| u != theta()) {
                eprintln!("note: u = {} differs from theta; oracle-validated range only", cfg.horizon_or_theta());
            }
            run_table(&common, cfg)
        }
        Cmd::Fpp { common, covering, p, per_trial } => {
            let mut cfg = common.config(Command::Fpp)?;
            cfg.covering |= covering;
            cfg.per_trial |= per_trial;
            if let Some(p) = p {
                cfg.p = p;
            }
            run_table(&common, cfg)
        }
        Cmd::Btp { common, horizon, max_particles, per_trial } => {
            let mut cfg = common.config(Command::Btp)?;
            cfg.horizon = horizon.or(cfg.horizon);
            cfg.max_particles = max_particles.unwrap_or(cfg.max_particles);
            cfg.per_trial |= per_trial;
            run_table(&common, cfg)
        }
        Cmd::Walk { common, horizon, per_trial } => {
            let mut cfg = common.config(Command::Walk)?;
            cfg.horizon = horizon.or(cfg.horizon);
            cfg.per_trial |= per_trial;
            run_table(&common, cfg)
        }
        Cmd::Verify { common, inject_fault } => {
            let cfg = common.config(Command::Verify)?;
            cfg.validate()?;
            if common.print_config {
                print!("{}", cfg.to_toml()?);
                return Ok(());
            }
            let report = run_verify(
                &cfg,
                RunOptions { threads: common.threads },
                VerifyOptions { inject_negative_weight: inject_fault },
            );
            let mut table = Table::new(&["check", "passed", "detail"]);
            for c in &report.checks {
                table.push(vec![c.name.as_str().into(), c.passed.into(), Cell::Text(c.detail.clone())]);
            }
            emit(&cfg, &render(&cfg, &table)?)?;
            for c in report.failures() {
                eprintln!("FAIL {}: {}", c.name, c.detail);
            }
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Failed(format!("{} check(s) failed", report.failures().count())))
            }
        }
        Cmd::Pilot { dims, trials, seed, out, threads } => {
            let cal = run_pilot(&dims, trials, seed, RunOptions { threads })?;
            let text = cal.to_json()?;
            match out {
                Some(path) => std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Cap(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_CAP)
        }
        Err(Failure::Failed(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
