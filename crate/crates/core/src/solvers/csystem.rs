//! The symmetric positive definite concentration system
//!
//! ```text
//! (D(rho) - 2a lap + a eps lap D(rho)^-1 lap) C = rhs
//! ```

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
use faer::{Col, Side};

use crate::gridops::{laplacian_neumann, Field, GridSpec};

use super::multigrid::Multigrid;
use super::sparse::{self, Sparse};
use super::{pcg, LinearMethod, LinearSolverConfig, LinearStats, SolverError};

/// Matrix-free concentration operator.
#[derive(Debug, Clone)]
pub struct COperator<'a> {
    pub grid: &'a GridSpec,
    pub rho: &'a [f64],
    pub a: f64,
    pub eps: f64,
}

impl COperator<'_> {
    fn field(&self, x: &[f64]) -> Field {
        let (nx, ny) = self.grid.cell_shape();
        Field {
            nx,
            ny,
            data: x.to_vec(),
        }
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let lap = laplacian_neumann(self.grid, &self.field(x));
        let inner = Field {
            nx: lap.nx,
            ny: lap.ny,
            data: lap.data.iter().zip(self.rho).map(|(l, r)| l / r).collect(),
        };
        let bih = laplacian_neumann(self.grid, &inner);
        for i in 0..x.len() {
            y[i] = self.rho[i] * x[i] - 2.0 * self.a * lap.data[i] + self.a * self.eps * bih.data[i];
        }
    }

    /// Diagonal entries, for Jacobi preconditioning.
    pub fn diagonal(&self) -> Vec<f64> {
        let (nx, ny) = self.grid.cell_shape();
        let h2 = self.grid.h * self.grid.h;
        let nbrs = |i: usize, j: usize| -> Vec<usize> {
            let mut v = Vec::with_capacity(4);
            if i > 0 {
                v.push(i - 1 + nx * j);
            }
            if i + 1 < nx {
                v.push(i + 1 + nx * j);
            }
            if j > 0 {
                v.push(i + nx * (j - 1));
            }
            if j + 1 < ny {
                v.push(i + nx * (j + 1));
            }
            v
        };
        let mut d = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let k = i + nx * j;
                let nb = nbrs(i, j);
                let lii = -(nb.len() as f64) / h2;
                let mut bih = lii * lii / self.rho[k];
                for &n in &nb {
                    bih += 1.0 / (h2 * h2 * self.rho[n]);
                }
                d.push(self.rho[k] - 2.0 * self.a * lii + self.a * self.eps * bih);
            }
        }
        d
    }
}

/// Assembled concentration operator.
pub fn c_operator_matrix(grid: &GridSpec, rho: &[f64], a: f64, eps: f64) -> Sparse {
    let lap = sparse::laplacian_matrix(grid);
    let inv: Vec<f64> = rho.iter().map(|r| 1.0 / r).collect();
    let bih = &lap * &sparse::scale_rows(&lap, &inv);
    let mut k = &sparse::diag(rho) + &sparse::scaled(&lap, -2.0 * a);
    k = &k + &sparse::scaled(&bih, a * eps);
    k.to_csr()
}

/// Concentration solver with a cached symbolic Cholesky analysis.
#[derive(Default)]
pub struct CSolver {
    pub config: LinearSolverConfig,
    symbolic: Option<(Vec<usize>, Vec<usize>, SymbolicLlt<usize>)>,
}

impl std::fmt::Debug for CSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CSolver").field("config", &self.config).finish()
    }
}

impl Clone for CSolver {
    fn clone(&self) -> Self {
        Self::new(self.config)
    }
}

impl CSolver {
    pub fn new(config: LinearSolverConfig) -> Self {
        Self {
            config,
            symbolic: None,
        }
    }

    fn direct(&mut self, k: &Sparse, b: &[f64]) -> Result<Vec<f64>, SolverError> {
        let mat = sparse::to_faer(k);
        let sym = mat.symbolic();
        let same = matches!(&self.symbolic, Some((cp, ri, _))
            if cp.as_slice() == sym.col_ptr() && ri.as_slice() == sym.row_idx());
        if !same {
            let s = SymbolicLlt::try_new(sym, Side::Lower)
                .map_err(|e| SolverError::Factorization(format!("{e:?}")))?;
            self.symbolic = Some((sym.col_ptr().to_vec(), sym.row_idx().to_vec(), s));
        }
        let s = self.symbolic.as_ref().unwrap().2.clone();
        let llt = Llt::try_new_with_symbolic(s, mat.as_ref(), Side::Lower)
            .map_err(|e| SolverError::Factorization(format!("{e:?}")))?;
        let x = llt.solve(&Col::<f64>::from_fn(b.len(), |i| b[i]));
        Ok((0..b.len()).map(|i| x[i]).collect())
    }

    /// Solves the concentration system for density `rho` and weight `a`.
    pub fn solve(
        &mut self,
        grid: &GridSpec,
        rho: &[f64],
        rhs: &[f64],
        a: f64,
        eps: f64,
    ) -> Result<(Vec<f64>, LinearStats), SolverError> {
        let n = grid.n_cells();
        if rho.len() != n || rhs.len() != n {
            return Err(SolverError::Dimension {
                expected: n,
                got: rho.len().min(rhs.len()),
            });
        }
        if let Some((index, &value)) = rho.iter().enumerate().find(|(_, &r)| !(r > 0.0)) {
            return Err(SolverError::NonPositiveDensity { index, value });
        }
        if a == 0.0 {
            let x = rhs.iter().zip(rho).map(|(b, r)| b / r).collect();
            return Ok((x, LinearStats::default()));
        }
        let op = COperator { grid, rho, a, eps };
        let cfg = self.config;
        // Start from rhs / rho, exact for a = 0.
        let mut x: Vec<f64> = rhs.iter().zip(rho).map(|(b, r)| b / r).collect();
        let stats = match cfg.method {
            LinearMethod::Direct => {
                let k = c_operator_matrix(grid, rho, a, eps);
                x = self.direct(&k, rhs)?;
                let mut r = vec![0.0; n];
                op.apply(&x, &mut r);
                let res = r.iter().zip(rhs).map(|(r, b)| (r - b).powi(2)).sum::<f64>().sqrt()
                    / super::norm2(rhs).max(f64::MIN_POSITIVE);
                LinearStats {
                    iterations: 1,
                    residual: res,
                }
            }
            LinearMethod::Cg => {
                let diag = op.diagonal();
                pcg(
                    |v, y| op.apply(v, y),
                    |r, z| {
                        for i in 0..r.len() {
                            z[i] = r[i] / diag[i];
                        }
                    },
                    rhs,
                    &mut x,
                    cfg.tolerance,
                    cfg.max_iterations,
                    "cg",
                )?
            }
            LinearMethod::Multigrid => {
                let mg = Multigrid::new(grid, rho, a, eps, &cfg)?;
                let k = mg.operator();
                pcg(
                    |v, y| sparse::matvec(k, v, y),
                    |r, z| mg.precondition(r, z),
                    rhs,
                    &mut x,
                    cfg.tolerance,
                    cfg.max_iterations,
                    "multigrid",
                )?
            }
        };
        Ok((x, stats))
    }
}

/// One-shot solve of the concentration system.
pub fn solve_c_stage(
    grid: &GridSpec,
    rho: &[f64],
    rhs: &[f64],
    a: f64,
    eps: f64,
    cfg: &LinearSolverConfig,
) -> Result<(Vec<f64>, LinearStats), SolverError> {
    CSolver::new(*cfg).solve(grid, rho, rhs, a, eps)
}
