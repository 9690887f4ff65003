//! Damped Newton iteration for the coupled density/velocity stage system
//!
//! ```text
//! H(z) = L(z) + a D(z) - r = 0,   z = (rho, V_1, .., V_d)
//! ```
//!
//! with `L(z) = (rho, rho_* V)` and `D` the centered mass transport, the
//! viscous operator and the stiff pressure gradient.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::Col;
use serde::Serialize;

use crate::gridops::{FdKind, GridSpec};
use crate::model::ModelParams;

use super::sparse::{self, grid_op, Sparse};
use super::{norm2, SolverError};

/// Grid operators of the hydro subsystem, assembled once per grid.
#[derive(Debug, Clone)]
pub struct HydroOps {
    pub grid: GridSpec,
    pub n_cells: usize,
    pub n_faces: Vec<usize>,
    /// Face-to-cell divergence per axis.
    pub div: Vec<Sparse>,
    /// Cell-to-face negative gradient per axis.
    pub grad_t: Vec<Sparse>,
    /// Cell-to-face average per axis.
    pub avg: Vec<Sparse>,
    /// Viscous blocks `B[a][b]`, mapping `V_b` to the `a` momentum.
    pub visc: Vec<Vec<Sparse>>,
}

impl HydroOps {
    pub fn new(grid: &GridSpec, params: &ModelParams) -> Self {
        let h = grid.h;
        let (cx, cy) = grid.cell_shape();
        let axes = grid.axes();
        let (nu, lam) = (params.nu, params.lambda);
        let mut div = Vec::new();
        let mut grad_t = Vec::new();
        let mut avg = Vec::new();
        let mut n_faces = Vec::new();
        for &a in axes {
            let (fx, fy) = grid.face_shape(a);
            n_faces.push(fx * fy);
            div.push(grid_op(FdKind::Dual, a, h, fx, fy));
            grad_t.push(grid_op(FdKind::DualTranspose, a, h, cx, cy));
            avg.push(grid_op(FdKind::Average, a, h, cx, cy));
        }
        let mut visc = vec![Vec::new(); grid.dim];
        for (ia, &a) in axes.iter().enumerate() {
            for (ib, &b) in axes.iter().enumerate() {
                let blk = if ia == ib {
                    let normal = &grad_t[ia] * &div[ia];
                    let mut blk = sparse::scaled(&normal, 2.0 * nu + lam);
                    if grid.dim == 2 {
                        let o = a.other();
                        let (fx, fy) = grid.face_shape(a);
                        let star = grid_op(FdKind::DualStar, o, h, fx, fy);
                        let (sx, sy) = match o {
                            crate::gridops::Axis::X => (fx + 1, fy),
                            crate::gridops::Axis::Y => (fx, fy + 1),
                        };
                        let star_t = grid_op(FdKind::DualTranspose, o, h, sx, sy);
                        blk = &blk + &sparse::scaled(&(&star_t * &star), nu);
                    }
                    blk
                } else {
                    // (nu + lam) times divergence along b of the gradient along a.
                    let (bx, by) = grid.face_shape(b);
                    let ga = grid_op(FdKind::DualTranspose, a, h, bx, by);
                    let (gx, gy) = match a {
                        crate::gridops::Axis::X => (bx - 1, by),
                        crate::gridops::Axis::Y => (bx, by - 1),
                    };
                    let db = grid_op(FdKind::Dual, b, h, gx, gy);
                    sparse::scaled(&(&db * &ga), nu + lam)
                };
                visc[ia].push(blk);
            }
        }
        Self {
            grid: *grid,
            n_cells: cx * cy,
            n_faces,
            div,
            grad_t,
            avg,
            visc,
        }
    }

    /// Length of the unknown vector `z`.
    pub fn size(&self) -> usize {
        self.n_cells + self.n_faces.iter().sum::<usize>()
    }

    /// Offsets of the blocks of `z`: density first, then one per axis.
    pub fn offsets(&self) -> Vec<usize> {
        let mut off = vec![0, self.n_cells];
        for &n in &self.n_faces {
            off.push(off.last().unwrap() + n);
        }
        off
    }
}

/// Right-hand side and step weight of one stage system.
#[derive(Debug, Clone)]
pub struct HydroProblem<'a> {
    pub ops: &'a HydroOps,
    pub params: &'a ModelParams,
    /// Stage weight `dt * alpha_ii`.
    pub a: f64,
    /// Hat terms `(r_rho, r_m1, .., r_md)` laid out like `z`.
    pub r: &'a [f64],
}

fn check_density(rho: &[f64]) -> Result<(), SolverError> {
    match rho.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
        Some((index, &value)) => Err(SolverError::NonPositiveDensity { index, value }),
        None => Ok(()),
    }
}

fn mv(a: &Sparse, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; a.rows()];
    sparse::matvec(a, x, &mut y);
    y
}

/// Residual `H(z) = L(z) + a D(z) - r`.
pub fn hydro_residual(prob: &HydroProblem<'_>, z: &[f64]) -> Result<Vec<f64>, SolverError> {
    let ops = prob.ops;
    let n = ops.size();
    if z.len() != n || prob.r.len() != n {
        return Err(SolverError::Dimension {
            expected: n,
            got: z.len().min(prob.r.len()),
        });
    }
    let off = ops.offsets();
    let rho = &z[..ops.n_cells];
    check_density(rho)?;
    let a = prob.a;
    let p2: Vec<f64> = rho.iter().map(|&r| prob.params.p2(r)).collect();
    let mut out = vec![0.0; n];
    out[..ops.n_cells].copy_from_slice(rho);
    for (ia, _) in ops.grid.axes().iter().enumerate() {
        let v = &z[off[ia + 1]..off[ia + 2]];
        let rs = mv(&ops.avg[ia], rho);
        let m: Vec<f64> = rs.iter().zip(v).map(|(r, v)| r * v).collect();
        let dm = mv(&ops.div[ia], &m);
        for (o, d) in out[..ops.n_cells].iter_mut().zip(&dm) {
            *o += a * d;
        }
        let gp = mv(&ops.grad_t[ia], &p2);
        let blk = &mut out[off[ia + 1]..off[ia + 2]];
        for k in 0..blk.len() {
            blk[k] = m[k] - a * gp[k];
        }
        for (ib, _) in ops.grid.axes().iter().enumerate() {
            let vb = &z[off[ib + 1]..off[ib + 2]];
            let bv = mv(&ops.visc[ia][ib], vb);
            for (o, x) in blk.iter_mut().zip(&bv) {
                *o += a * x;
            }
        }
    }
    for (o, r) in out.iter_mut().zip(prob.r) {
        *o -= r;
    }
    Ok(out)
}

/// Sparse Jacobian of [`hydro_residual`].
#[derive(Debug, Clone)]
pub struct HydroJacobian {
    pub matrix: Sparse,
}

/// Assembles the block Jacobian
///
/// ```text
/// [ I + a sum D_b diag(V_b) A_b    a D_b diag(rho_*b)          ]
/// [ diag(V_a) A_a - a D_a^T diag(p2')   diag(rho_*a) + a B_ab  ]
/// ```
pub fn assemble_hydro_jacobian(
    prob: &HydroProblem<'_>,
    z: &[f64],
) -> Result<HydroJacobian, SolverError> {
    let ops = prob.ops;
    let a = prob.a;
    let off = ops.offsets();
    let rho = &z[..ops.n_cells];
    check_density(rho)?;
    let dp2: Vec<f64> = rho.iter().map(|&r| prob.params.dp2(r)).collect();
    let d = ops.grid.dim;
    let mut rr = sparse::identity(ops.n_cells);
    let mut top: Vec<Sparse> = Vec::with_capacity(d);
    let mut left: Vec<Sparse> = Vec::with_capacity(d);
    let mut inner: Vec<Vec<Sparse>> = Vec::with_capacity(d);
    for ia in 0..d {
        let v = &z[off[ia + 1]..off[ia + 2]];
        let rs = mv(&ops.avg[ia], rho);
        let va = sparse::scale_rows(&ops.avg[ia], v);
        rr = &rr + &sparse::scaled(&(&ops.div[ia] * &va), a);
        top.push(sparse::scaled(&sparse::scale_cols(&ops.div[ia], &rs), a));
        let gp = sparse::scaled(&sparse::scale_cols(&ops.grad_t[ia], &dp2), -a);
        left.push(&va + &gp);
        let mut row = Vec::with_capacity(d);
        for ib in 0..d {
            let mut blk = sparse::scaled(&ops.visc[ia][ib], a);
            if ia == ib {
                blk = &blk + &sparse::diag(&rs);
            }
            row.push(blk);
        }
        inner.push(row);
    }
    let mut blocks: Vec<Vec<Option<&Sparse>>> = Vec::with_capacity(d + 1);
    let mut first = vec![Some(&rr)];
    first.extend(top.iter().map(Some));
    blocks.push(first);
    for ia in 0..d {
        let mut row = vec![Some(&left[ia])];
        row.extend(inner[ia].iter().map(Some));
        blocks.push(row);
    }
    Ok(HydroJacobian {
        matrix: sparse::block(&blocks),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NewtonConfig {
    pub tol_abs: f64,
    pub tol_rel: f64,
    pub max_iterations: usize,
    /// Smallest damping factor tried before giving up.
    pub min_damping: f64,
    /// Multiple of the unit round-off times the residual scale below which
    /// the iteration stops even if the tolerance is not met.
    pub floor_factor: f64,
    /// The last LU factorization is reused, also across calls, as long as
    /// each update shrinks the residual by at least this factor. Zero
    /// refactors at every iterate.
    pub reuse_contraction: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tol_abs: 1e-11,
            tol_rel: 1e-9,
            max_iterations: 30,
            min_damping: 2f64.powi(-20),
            floor_factor: 10.0,
            reuse_contraction: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct NewtonStats {
    pub iterations: usize,
    /// Residual 2-norms of the accepted iterates, starting with `z0`.
    pub history: Vec<f64>,
    /// Damping factor of each accepted update.
    pub dampings: Vec<f64>,
    /// Numeric LU factorizations performed.
    pub factorizations: usize,
    /// Convergence was declared at the round-off floor rather than the
    /// requested tolerance.
    pub floor_limited: bool,
}

/// Newton solver with a cached symbolic LU analysis and a reusable numeric
/// factorization.
#[derive(Default)]
pub struct NewtonSolver {
    pub config: NewtonConfig,
    symbolic: Option<(Vec<usize>, Vec<usize>, SymbolicLu<usize>)>,
    factor: Option<(usize, Lu<usize, f64>)>,
}

impl std::fmt::Debug for NewtonSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NewtonSolver")
            .field("config", &self.config)
            .field("cached_symbolic", &self.symbolic.is_some())
            .field("cached_factor", &self.factor.is_some())
            .finish()
    }
}

impl Clone for NewtonSolver {
    fn clone(&self) -> Self {
        Self::new(self.config)
    }
}

impl NewtonSolver {
    pub fn new(config: NewtonConfig) -> Self {
        Self {
            config,
            symbolic: None,
            factor: None,
        }
    }

    /// Drops the cached numeric factorization.
    pub fn reset(&mut self) {
        self.factor = None;
    }

    /// Factors `jac`, reusing the symbolic analysis while the sparsity
    /// pattern is unchanged.
    pub fn factorize(&mut self, jac: &Sparse) -> Result<(), SolverError> {
        let mat = sparse::to_faer(jac);
        let sym = mat.symbolic();
        let same = matches!(&self.symbolic, Some((cp, ri, _))
            if cp.as_slice() == sym.col_ptr() && ri.as_slice() == sym.row_idx());
        if !same {
            let s = SymbolicLu::try_new(sym).map_err(|e| SolverError::Factorization(format!("{e:?}")))?;
            self.symbolic = Some((sym.col_ptr().to_vec(), sym.row_idx().to_vec(), s));
        }
        let s = self.symbolic.as_ref().unwrap().2.clone();
        let lu = Lu::try_new_with_symbolic(s, mat.as_ref())
            .map_err(|e| SolverError::Factorization(format!("{e:?}")))?;
        self.factor = Some((jac.rows(), lu));
        Ok(())
    }

    /// Solves with the cached factorization.
    pub fn solve_factored(&self, b: &[f64]) -> Result<Vec<f64>, SolverError> {
        let (n, lu) = self
            .factor
            .as_ref()
            .ok_or_else(|| SolverError::Factorization("no factorization available".into()))?;
        if *n != b.len() {
            return Err(SolverError::Dimension {
                expected: *n,
                got: b.len(),
            });
        }
        let rhs = Col::<f64>::from_fn(b.len(), |i| b[i]);
        let x = lu.solve(&rhs);
        let out: Vec<f64> = (0..b.len()).map(|i| x[i]).collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::Factorization("singular Jacobian".into()));
        }
        Ok(out)
    }

    /// Solves `J x = b` by sparse LU.
    pub fn lu_solve(&mut self, jac: &Sparse, b: &[f64]) -> Result<Vec<f64>, SolverError> {
        self.factorize(jac)?;
        self.solve_factored(b)
    }

    /// Damped Newton from `z0`: each update takes the first factor in
    /// `1, 1/2, 1/4, ..` that strictly decreases `|H|_2` and keeps the
    /// density positive. A reused factorization that fails to produce a
    /// decrease is replaced by the exact Jacobian at the current iterate.
    pub fn solve(
        &mut self,
        prob: &HydroProblem<'_>,
        z0: &[f64],
    ) -> Result<(Vec<f64>, NewtonStats), SolverError> {
        let cfg = self.config;
        let mut z = z0.to_vec();
        let mut hres = hydro_residual(prob, &z)?;
        let mut hn = norm2(&hres);
        let target = cfg.tol_abs + cfg.tol_rel * hn;
        let floor = cfg.floor_factor * roundoff_floor(prob, &z);
        let mut stats = NewtonStats {
            history: vec![hn],
            ..NewtonStats::default()
        };
        let nc = prob.ops.n_cells;
        let mut refactor = cfg.reuse_contraction <= 0.0
            || !matches!(&self.factor, Some((n, _)) if *n == z.len());
        for it in 0..cfg.max_iterations {
            if hn <= target {
                return Ok((z, stats));
            }
            if hn <= floor {
                stats.floor_limited = true;
                return Ok((z, stats));
            }
            if refactor {
                self.factorize(&assemble_hydro_jacobian(prob, &z)?.matrix)?;
                stats.factorizations += 1;
            }
            let fresh = refactor;
            let neg: Vec<f64> = hres.iter().map(|v| -v).collect();
            let delta = self.solve_factored(&neg)?;
            let mut alpha = 1.0;
            let accepted = loop {
                if alpha < cfg.min_damping {
                    break None;
                }
                let trial: Vec<f64> = z.iter().zip(&delta).map(|(z, d)| z + alpha * d).collect();
                if trial[..nc].iter().any(|&r| !(r > 0.0)) {
                    alpha *= 0.5;
                    continue;
                }
                let ht = hydro_residual(prob, &trial)?;
                let tn = norm2(&ht);
                if tn < hn {
                    break Some((trial, ht, tn));
                }
                alpha *= 0.5;
            };
            match accepted {
                Some((zt, ht, tn)) => {
                    refactor = cfg.reuse_contraction <= 0.0 || tn > cfg.reuse_contraction * hn;
                    z = zt;
                    hres = ht;
                    hn = tn;
                    stats.iterations = it + 1;
                    stats.history.push(hn);
                    stats.dampings.push(alpha);
                }
                None if !fresh => refactor = true,
                None => {
                    return Err(SolverError::DampingUnderflow {
                        iteration: it,
                        residual: hn,
                        history: stats.history,
                    })
                }
            }
        }
        if hn <= target {
            return Ok((z, stats));
        }
        if hn <= floor {
            stats.floor_limited = true;
            return Ok((z, stats));
        }
        Err(SolverError::NewtonNotConverged {
            iterations: cfg.max_iterations,
            residual: hn,
            history: stats.history,
        })
    }
}

/// Residual level attainable in floating point: a small multiple of the
/// unit round-off times the size of the terms entering `H`.
fn roundoff_floor(prob: &HydroProblem<'_>, z: &[f64]) -> f64 {
    let nc = prob.ops.n_cells;
    let rho = &z[..nc];
    let pmax = rho
        .iter()
        .map(|&r| prob.params.p2(r.max(0.0)))
        .fold(0.0, f64::max);
    let scale = norm2(prob.r) + norm2(z) + prob.a * pmax / prob.ops.grid.h * (z.len() as f64).sqrt();
    f64::EPSILON * scale
}

/// Convenience wrapper running a fresh [`NewtonSolver`].
pub fn newton_hydro(
    prob: &HydroProblem<'_>,
    z0: &[f64],
    cfg: NewtonConfig,
) -> Result<(Vec<f64>, NewtonStats), SolverError> {
    NewtonSolver::new(cfg).solve(prob, z0)
}
