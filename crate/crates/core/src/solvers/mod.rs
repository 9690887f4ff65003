//! Implicit stage solvers: damped Newton on the density/velocity subsystem,
//! the SPD concentration system, and the linear solvers behind them.

pub mod csystem;
pub mod hydro;
pub mod multigrid;
pub mod sparse;
pub mod stage;

pub use csystem::{c_operator_matrix, solve_c_stage, CSolver, COperator};
pub use hydro::{
    assemble_hydro_jacobian, hydro_residual, newton_hydro, HydroJacobian, HydroOps, HydroProblem,
    NewtonConfig, NewtonSolver, NewtonStats,
};
pub use stage::{ChnsSystem, Forcing, StageStats};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spatial::SpatialError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("nonpositive density {value} at index {index}")]
    NonPositiveDensity { index: usize, value: f64 },
    #[error("Newton did not converge in {iterations} iterations (residual {residual:e})")]
    NewtonNotConverged {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },
    #[error("Newton damping underflow at iteration {iteration} (residual {residual:e})")]
    DampingUnderflow {
        iteration: usize,
        residual: f64,
        history: Vec<f64>,
    },
    #[error("{method} did not converge in {iterations} iterations (relative residual {residual:e})")]
    LinearNotConverged {
        method: &'static str,
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },
    #[error("{method} breakdown at iteration {iteration}")]
    Breakdown { method: &'static str, iteration: usize },
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("vector length {got} does not match system size {expected}")]
    Dimension { expected: usize, got: usize },
    #[error(transparent)]
    Spatial(#[from] SpatialError),
}

/// Linear solver for the concentration system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LinearMethod {
    /// Sparse Cholesky factorization.
    #[default]
    Direct,
    /// Jacobi-preconditioned conjugate gradients, matrix-free.
    Cg,
    /// Conjugate gradients preconditioned by a geometric multigrid V-cycle.
    Multigrid,
}

impl std::str::FromStr for LinearMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(Self::Direct),
            "cg" => Ok(Self::Cg),
            "multigrid" | "mg" => Ok(Self::Multigrid),
            _ => Err(format!("unknown linear solver '{s}' (direct, cg, multigrid)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearSolverConfig {
    pub method: LinearMethod,
    /// Relative residual target.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub pre_smooth: usize,
    pub post_smooth: usize,
    /// Cells per axis on the coarsest multigrid level.
    pub coarsest: usize,
}

impl Default for LinearSolverConfig {
    fn default() -> Self {
        Self {
            method: LinearMethod::Direct,
            tolerance: 1e-10,
            max_iterations: 5000,
            pre_smooth: 2,
            post_smooth: 2,
            coarsest: 8,
        }
    }
}

impl LinearSolverConfig {
    pub fn with_method(method: LinearMethod) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }
}

/// Iteration count and final relative residual of a linear solve.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct LinearStats {
    pub iterations: usize,
    pub residual: f64,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Preconditioned conjugate gradients with the Polak-Ribiere update, which
/// tolerates a mildly nonsymmetric preconditioner.
pub fn pcg(
    apply: impl Fn(&[f64], &mut [f64]),
    mut precond: impl FnMut(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
    method: &'static str,
) -> Result<LinearStats, SolverError> {
    let n = b.len();
    if x.len() != n {
        return Err(SolverError::Dimension {
            expected: n,
            got: x.len(),
        });
    }
    let bn = norm2(b);
    if bn == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(LinearStats::default());
    }
    let mut r = vec![0.0; n];
    apply(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let mut z = vec![0.0; n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut history = vec![norm2(&r) / bn];
    for it in 0..max_iter {
        let rel = *history.last().unwrap();
        if rel <= tol {
            return Ok(LinearStats {
                iterations: it,
                residual: rel,
            });
        }
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(SolverError::Breakdown {
                method,
                iteration: it,
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let z_old = z.clone();
        precond(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = (rz_new - dot(&r, &z_old)) / rz;
        let beta = beta.max(0.0);
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        rz = rz_new;
        history.push(norm2(&r) / bn);
    }
    let rel = *history.last().unwrap();
    if rel <= tol {
        return Ok(LinearStats {
            iterations: max_iter,
            residual: rel,
        });
    }
    Err(SolverError::LinearNotConverged {
        method,
        iterations: max_iter,
        residual: rel,
        history,
    })
}

/// Solves `A x = b` for a matrix-free SPD operator with Jacobi-preconditioned
/// conjugate gradients. Grid-aware methods go through [`solve_c_stage`].
pub fn linear_solve(
    apply: impl Fn(&[f64], &mut [f64]),
    diag: &[f64],
    b: &[f64],
    cfg: &LinearSolverConfig,
) -> Result<(Vec<f64>, LinearStats), SolverError> {
    let mut x = vec![0.0; b.len()];
    let stats = pcg(
        apply,
        |r, z| {
            for i in 0..r.len() {
                z[i] = r[i] / diag[i];
            }
        },
        b,
        &mut x,
        cfg.tolerance,
        cfg.max_iterations,
        "cg",
    )?;
    Ok((x, stats))
}
