//! Case setup and drivers: manufactured-solution order studies, the three
//! benchmark initial states, parameter sweeps and artifact output.

pub mod exact;
pub mod forcing;
pub mod output;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::{compute_eoc, l1_error, DiagnosticsError, DiagnosticsRow, EocTable};
use crate::gridops::{GridError, GridSpec};
use crate::imex::{make_tableau, run_to_time, ImexError, RunControl, Scheme};
use crate::model::{ModelError, ModelParams};
use crate::solvers::{ChnsSystem, LinearMethod, LinearSolverConfig, NewtonConfig, SolverError};
use crate::spatial::{Discretization, MassDiffusion, State};

pub use exact::{sample_fields, ExactPoint, ExactSolution};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(transparent)]
    Integrator(#[from] ImexError<SolverError>),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestCase {
    /// Manufactured solution with source term.
    Mms,
    /// Spinodal decomposition with a swirling velocity.
    Test1,
    /// Same flow with a stable mean concentration.
    Test2,
    /// Fluid at rest with random concentration noise.
    Test3,
}

impl std::str::FromStr for TestCase {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mms" | "0" => Ok(Self::Mms),
            "1" | "test1" => Ok(Self::Test1),
            "2" | "test2" => Ok(Self::Test2),
            "3" | "test3" => Ok(Self::Test3),
            _ => Err(format!("unknown test '{s}' (mms, 1, 2, 3)")),
        }
    }
}

/// Full description of a run or study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub dim: usize,
    pub test: TestCase,
    pub scheme: Scheme,
    pub m: Vec<usize>,
    pub cp: Vec<f64>,
    /// Explicit pressure constant; defaults to `sqrt(cp)`.
    pub cp1: Option<f64>,
    pub t_end: f64,
    pub cfl: f64,
    pub nu: f64,
    pub lambda: f64,
    pub eps: f64,
    pub g: f64,
    pub gamma: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub dump_times: Vec<f64>,
    pub linear_solver: LinearMethod,
    pub mass_diffusion: MassDiffusion,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = ModelParams::new(1e2);
        Self {
            dim: 2,
            test: TestCase::Test1,
            scheme: Scheme::StarDirksa,
            m: vec![64],
            cp: vec![1e2],
            cp1: None,
            t_end: 0.1,
            cfl: 0.4,
            nu: p.nu,
            lambda: p.lambda,
            eps: p.eps,
            g: p.g,
            gamma: p.gamma,
            seed: 0,
            out: None,
            dump_times: vec![0.0, 0.01, 0.03, 0.05, 0.07, 0.1],
            linear_solver: LinearMethod::Direct,
            mass_diffusion: MassDiffusion::Reconstructed,
        }
    }
}

impl RunConfig {
    pub fn params(&self, cp: f64) -> Result<ModelParams, HarnessError> {
        let p = ModelParams {
            gamma: self.gamma,
            cp,
            cp1: self.cp1.unwrap_or_else(|| cp.sqrt()),
            nu: self.nu,
            lambda: self.lambda,
            eps: self.eps,
            g: self.g,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |s: &str| Err(HarnessError::Config(s.to_string()));
        if self.dim != 1 && self.dim != 2 {
            return bad("dim must be 1 or 2");
        }
        if self.dim == 1 && self.test != TestCase::Mms {
            return bad("tests 1-3 are two-dimensional");
        }
        if self.m.is_empty() || self.cp.is_empty() {
            return bad("at least one grid size and one pressure constant are required");
        }
        if !(self.t_end > 0.0) {
            return bad("final time must be positive");
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return bad("cfl must lie in (0, 1)");
        }
        for &cp in &self.cp {
            self.params(cp)?;
        }
        for &m in &self.m {
            GridSpec::new(self.dim, m)?;
        }
        Ok(())
    }
}

/// Initial state of a benchmark; `delta = 1/cp`.
pub fn init_test(test: TestCase, grid: &GridSpec, delta: f64, seed: u64) -> State {
    match test {
        TestCase::Mms => ExactSolution::new(grid.dim, delta).sample(grid, 0.0),
        TestCase::Test1 | TestCase::Test2 => {
            let shift = if test == TestCase::Test2 { 0.75 } else { 0.0 };
            sample_fields(grid, |x, y| {
                let amp = 1.0 + delta;
                (
                    1.0 + delta * (2.0 * PI * x).cos() * (PI * y).cos(),
                    [
                        amp * (1.0 - (2.0 * PI * x).cos()) * (2.0 * PI * y).sin(),
                        amp * ((2.0 * PI * y).cos() - 1.0) * (2.0 * PI * x).sin(),
                    ],
                    shift + 0.1 * (1.0 - delta) * (PI * x).cos() * (PI * y).cos(),
                )
            })
        }
        TestCase::Test3 => {
            let mut s = sample_fields(grid, |_, _| (1.0, [0.0, 0.0], 0.0));
            let a = 3f64.sqrt() * 1e-10;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut c: Vec<f64> = (0..s.q.len()).map(|_| rng.random_range(-a..a)).collect();
            let mean = c.iter().sum::<f64>() / c.len() as f64;
            c.iter_mut().for_each(|v| *v -= mean);
            s.q.data = c;
            s
        }
    }
}

/// Outcome of one simulated case.
#[derive(Debug, Clone)]
pub struct CaseResult {
    pub m: usize,
    pub cp: f64,
    pub initial: State,
    pub state: State,
    pub steps: usize,
    pub rejections: usize,
    pub rows: Vec<DiagnosticsRow>,
    pub dumps: Vec<(f64, State)>,
    /// Largest `|c|` over all accepted steps.
    pub max_abs_c: f64,
    /// Largest Newton iteration count over all stages.
    pub max_newton: usize,
}

/// Builds the stage system for a case.
pub fn build_system(cfg: &RunConfig, m: usize, cp: f64) -> Result<(ChnsSystem, GridSpec, ModelParams), HarnessError> {
    let grid = GridSpec::new(cfg.dim, m)?;
    let params = cfg.params(cp)?;
    let mut disc = Discretization::new(grid, params);
    disc.mass_diffusion = cfg.mass_diffusion;
    let mut sys = ChnsSystem::new(
        disc,
        NewtonConfig::default(),
        LinearSolverConfig::with_method(cfg.linear_solver),
    );
    if cfg.test == TestCase::Mms {
        sys = sys.with_forcing(ExactSolution::new(cfg.dim, params.delta()).forcing(grid, params));
    }
    Ok((sys, grid, params))
}

/// Runs one case to `cfg.t_end`, collecting diagnostics after every step
/// and states at the dump times.
pub fn simulate(cfg: &RunConfig, m: usize, cp: f64) -> Result<CaseResult, HarnessError> {
    cfg.validate()?;
    let (mut sys, grid, params) = build_system(cfg, m, cp)?;
    let u0 = init_test(cfg.test, &grid, params.delta(), cfg.seed);
    let tab = make_tableau(cfg.scheme);
    let ctl = RunControl {
        cfl: cfg.cfl,
        ..RunControl::default()
    };
    let dump_times: Vec<f64> = cfg
        .dump_times
        .iter()
        .copied()
        .filter(|&t| t >= 0.0 && t <= cfg.t_end)
        .collect();
    let mut rows = vec![DiagnosticsRow::compute(0.0, &u0, &u0, &grid, &params)?];
    let mut dumps = Vec::new();
    if dump_times.contains(&0.0) {
        dumps.push((0.0, u0.clone()));
    }
    let c0 = crate::diagnostics::c_extrema(&u0);
    let mut max_abs_c = c0.0.abs().max(c0.1.abs());
    let mut max_newton = 0;
    let mut diag_err = None;
    let summary = run_to_time(
        &mut sys,
        u0.clone(),
        0.0,
        cfg.t_end,
        &tab,
        &ctl,
        &dump_times,
        |t, u, rec| {
            match DiagnosticsRow::compute(t, u, &u0, &grid, &params) {
                Ok(r) => {
                    max_abs_c = max_abs_c.max(r.c_min.abs()).max(r.c_max.abs());
                    rows.push(r);
                }
                Err(e) => diag_err = Some(e),
            }
            for s in &rec.stages {
                max_newton = max_newton.max(s.stats.newton.iterations);
            }
            if dump_times.contains(&t) {
                dumps.push((t, u.clone()));
            }
        },
    )?;
    if let Some(e) = diag_err {
        return Err(e.into());
    }
    Ok(CaseResult {
        m,
        cp,
        initial: u0,
        state: summary.state,
        steps: summary.steps,
        rejections: summary.rejections,
        rows,
        dumps,
        max_abs_c,
        max_newton,
    })
}

/// Error of a manufactured-solution run at its final time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MmsPoint {
    pub m: usize,
    pub error: f64,
    pub steps: usize,
}

/// Runs the manufactured solution on one grid and measures the error at
/// `cfg.t_end`.
pub fn mms_error(cfg: &RunConfig, m: usize, cp: f64) -> Result<MmsPoint, HarnessError> {
    let mut c = cfg.clone();
    c.test = TestCase::Mms;
    c.dump_times.clear();
    let res = simulate(&c, m, cp)?;
    let grid = GridSpec::new(cfg.dim, m)?;
    let exact = ExactSolution::new(cfg.dim, 1.0 / cp).sample(&grid, cfg.t_end);
    Ok(MmsPoint {
        m,
        error: l1_error(&res.state, &exact, &grid),
        steps: res.steps,
    })
}

/// Order study over `cfg.m` for the first pressure constant; grids run
/// concurrently.
pub fn mms_study(cfg: &RunConfig) -> Result<(EocTable, Vec<MmsPoint>), HarnessError> {
    cfg.validate()?;
    let cp = cfg.cp[0];
    let points: Vec<Result<MmsPoint, HarnessError>> = std::thread::scope(|s| {
        let handles: Vec<_> = cfg
            .m
            .iter()
            .map(|&m| s.spawn(move || mms_error(cfg, m, cp)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let points = points.into_iter().collect::<Result<Vec<_>, _>>()?;
    let errs: Vec<(usize, f64)> = points.iter().map(|p| (p.m, p.error)).collect();
    Ok((compute_eoc(&errs)?, points))
}

/// Summary line of one case in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub m: usize,
    pub cp: f64,
    pub steps: usize,
    pub rejections: usize,
    pub max_abs_c: f64,
    pub mass_rho_err: f64,
    pub mass_q_err: f64,
}

/// Runs every `(M, cp)` combination concurrently.
pub fn sweep(cfg: &RunConfig) -> Result<Vec<(SweepRow, CaseResult)>, HarnessError> {
    cfg.validate()?;
    let cases: Vec<(usize, f64)> = cfg
        .m
        .iter()
        .flat_map(|&m| cfg.cp.iter().map(move |&cp| (m, cp)))
        .collect();
    let results: Vec<Result<CaseResult, HarnessError>> = std::thread::scope(|s| {
        let handles: Vec<_> = cases
            .iter()
            .map(|&(m, cp)| s.spawn(move || simulate(cfg, m, cp)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    results
        .into_iter()
        .map(|r| {
            let r = r?;
            let last = r.rows.last().copied().expect("initial row present");
            Ok((
                SweepRow {
                    m: r.m,
                    cp: r.cp,
                    steps: r.steps,
                    rejections: r.rejections,
                    max_abs_c: r.max_abs_c,
                    mass_rho_err: last.mass_rho_err,
                    mass_q_err: last.mass_q_err,
                },
                r,
            ))
        })
        .collect()
}

/// What a `run_case` call produced.
#[derive(Debug, Clone)]
pub enum RunOutcome {
    Study(EocTable),
    Case(Box<CaseResult>),
    Sweep(Vec<SweepRow>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Mms,
    Run,
    Sweep,
}

/// Executes a study, a single run or a sweep and writes its artifacts to
/// `cfg.out` when set.
pub fn run_case(cfg: &RunConfig, mode: Mode) -> Result<RunOutcome, HarnessError> {
    cfg.validate()?;
    let out = cfg.out.as_deref();
    match mode {
        Mode::Mms => {
            let (table, _) = mms_study(cfg)?;
            if let Some(dir) = out {
                output::prepare_dir(dir)?;
                output::write_eoc(&dir.join("eoc.csv"), &table)?;
                output::write_manifest(dir, cfg, &serde_json::json!({ "eoc": table }))?;
            }
            Ok(RunOutcome::Study(table))
        }
        Mode::Run => {
            if cfg.m.len() != 1 || cfg.cp.len() != 1 {
                return Err(HarnessError::Config(
                    "run takes a single grid size and pressure constant; use sweep".into(),
                ));
            }
            let res = simulate(cfg, cfg.m[0], cfg.cp[0])?;
            if let Some(dir) = out {
                write_case(dir, cfg, &res)?;
            }
            Ok(RunOutcome::Case(Box::new(res)))
        }
        Mode::Sweep => {
            let results = sweep(cfg)?;
            let rows: Vec<SweepRow> = results.iter().map(|(r, _)| *r).collect();
            if let Some(dir) = out {
                output::prepare_dir(dir)?;
                output::write_rows(&dir.join("sweep.csv"), &rows)?;
                for (row, res) in &results {
                    let sub = dir.join(format!("M{}_cp{}", row.m, row.cp));
                    write_case(&sub, cfg, res)?;
                }
                output::write_manifest(dir, cfg, &serde_json::json!({ "cases": rows }))?;
            }
            Ok(RunOutcome::Sweep(rows))
        }
    }
}

fn write_case(dir: &Path, cfg: &RunConfig, res: &CaseResult) -> Result<(), HarnessError> {
    output::prepare_dir(dir)?;
    let grid = GridSpec::new(cfg.dim, res.m)?;
    for (t, s) in &res.dumps {
        output::write_fields(&dir.join(format!("fields_t{t}.csv")), &grid, s)?;
    }
    output::write_rows(&dir.join("diagnostics.csv"), &res.rows)?;
    output::write_manifest(
        dir,
        cfg,
        &serde_json::json!({
            "m": res.m,
            "cp": res.cp,
            "steps": res.steps,
            "rejections": res.rejections,
            "max_abs_c": res.max_abs_c,
        }),
    )
}
