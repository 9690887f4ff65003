//! `chns`: manufactured-solution studies, single runs and parameter sweeps.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use chns_core::harness::{run_case, Mode, RunOutcome};
use chns_core::{LinearMethod, RunConfig, Scheme, TestCase};
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "chns", version, about = "Low-Mach Cahn-Hilliard-Navier-Stokes solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convergence study against the manufactured solution.
    Mms(RunArgs),
    /// A single benchmark run.
    Run(RunArgs),
    /// All combinations of the given grid sizes and pressure constants.
    Sweep(RunArgs),
}

/// Settings shared by all subcommands. Each flag can also be set through
/// the `CHNS_` environment variable shown, or in a `key = value` file.
/// Precedence: flag, environment, file, built-in default.
#[derive(Args, Debug, Default)]
struct RunArgs {
    /// Configuration file with `key = value` lines.
    #[arg(long, env = "CHNS_CONFIG")]
    config: Option<PathBuf>,
    /// Spatial dimension, 1 or 2.
    #[arg(long, env = "CHNS_DIM", value_parser = clap::value_parser!(u8).range(1..=2))]
    dim: Option<u8>,
    /// Benchmark: mms, 1, 2 or 3.
    #[arg(long, env = "CHNS_TEST")]
    test: Option<TestCase>,
    /// Time integrator: ee_ie or star_dirksa.
    #[arg(long, env = "CHNS_SCHEME")]
    scheme: Option<Scheme>,
    /// Grid sizes, comma separated.
    #[arg(long = "M", env = "CHNS_M")]
    m: Option<String>,
    /// Pressure constants, comma separated.
    #[arg(long, env = "CHNS_CP")]
    cp: Option<String>,
    /// Explicitly treated part of the pressure constant (default sqrt(cp)).
    #[arg(long, env = "CHNS_CP1")]
    cp1: Option<f64>,
    /// Final time.
    #[arg(long = "T", env = "CHNS_T")]
    t: Option<f64>,
    #[arg(long, env = "CHNS_CFL")]
    cfl: Option<f64>,
    /// Seed of the random initial data.
    #[arg(long, env = "CHNS_SEED")]
    seed: Option<u64>,
    /// Output directory for CSV and JSON artifacts.
    #[arg(long, env = "CHNS_OUT")]
    out: Option<PathBuf>,
    /// Times at which fields are written, comma separated.
    #[arg(long, env = "CHNS_DUMP_TIMES")]
    dump_times: Option<String>,
    /// Concentration solver: direct, cg or multigrid.
    #[arg(long, env = "CHNS_LINEAR_SOLVER")]
    linear_solver: Option<LinearMethod>,
}

impl RunArgs {
    fn resolve(&self, mode: Mode) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if mode == Mode::Mms {
            cfg.test = TestCase::Mms;
            cfg.m = vec![8, 16, 32, 64];
            cfg.t_end = 0.01;
            cfg.dump_times.clear();
        }
        if let Some(p) = &self.config {
            config::load(&mut cfg, p)?;
        }
        if let Some(v) = self.dim {
            cfg.dim = v.into();
        }
        if let Some(v) = self.test {
            cfg.test = v;
        }
        if let Some(v) = self.scheme {
            cfg.scheme = v;
        }
        if let Some(v) = &self.m {
            cfg.m = config::parse_list(v).context("--M")?;
        }
        if let Some(v) = &self.cp {
            cfg.cp = config::parse_list(v).context("--cp")?;
        }
        if self.cp1.is_some() {
            cfg.cp1 = self.cp1;
        }
        if let Some(v) = self.t {
            cfg.t_end = v;
        }
        if let Some(v) = self.cfl {
            cfg.cfl = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        if let Some(v) = &self.dump_times {
            cfg.dump_times = config::parse_list(v).context("--dump-times")?;
        }
        if let Some(v) = self.linear_solver {
            cfg.linear_solver = v;
        }
        if mode == Mode::Mms && cfg.test != TestCase::Mms {
            anyhow::bail!("the mms subcommand only runs the manufactured solution");
        }
        Ok(cfg)
    }
}

fn execute(cli: Cli) -> Result<()> {
    let (args, mode) = match &cli.command {
        Command::Mms(a) => (a, Mode::Mms),
        Command::Run(a) => (a, Mode::Run),
        Command::Sweep(a) => (a, Mode::Sweep),
    };
    let cfg = args.resolve(mode)?;
    log::info!("configuration: {cfg:?}");
    match run_case(&cfg, mode)? {
        RunOutcome::Study(table) => {
            println!("{:>6}  {:>12}  {:>7}", "M", "error", "EOC");
            for e in &table {
                let eoc = e.eoc.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into());
                println!("{:>6}  {:>12.4e}  {:>7}", e.m, e.error, eoc);
            }
        }
        RunOutcome::Case(res) => {
            let last = res.rows.last().expect("initial row present");
            println!(
                "M={} cp={:e} steps={} rejections={} max|c|={:.5} mass errors rho={:.2e} rho*c={:.2e}",
                res.m, res.cp, res.steps, res.rejections, res.max_abs_c, last.mass_rho_err, last.mass_q_err
            );
        }
        RunOutcome::Sweep(rows) => {
            println!("{:>6}  {:>10}  {:>7}  {:>9}", "M", "cp", "steps", "max|c|");
            for r in &rows {
                println!("{:>6}  {:>10.1e}  {:>7}  {:>9.5}", r.m, r.cp, r.steps, r.max_abs_c);
            }
        }
    }
    if let Some(out) = &cfg.out {
        println!("artifacts written to {}", out.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
