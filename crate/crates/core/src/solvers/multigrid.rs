//! Geometric multigrid V-cycle for the concentration system on the
//! cell-centered grid: Gauss-Seidel smoothing, bilinear prolongation, its
//! scaled adjoint as restriction, rediscretized coarse operators and a dense
//! Cholesky solve on the coarsest level.

use faer::linalg::solvers::Solve;
use faer::{Col, Mat, Side};

use crate::gridops::GridSpec;

use super::csystem::c_operator_matrix;
use super::sparse::Sparse;
use super::{LinearSolverConfig, SolverError};

struct Level {
    grid: GridSpec,
    k: Sparse,
    diag: Vec<f64>,
}

pub struct Multigrid {
    levels: Vec<Level>,
    coarse: faer::linalg::solvers::Llt<f64>,
    pre: usize,
    post: usize,
}

impl std::fmt::Debug for Multigrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Multigrid")
            .field("levels", &self.levels.iter().map(|l| l.grid.m).collect::<Vec<_>>())
            .finish()
    }
}

/// Averages densities over the `2^dim` children of each coarse cell.
fn coarsen_density(fine: &GridSpec, rho: &[f64]) -> Vec<f64> {
    let mc = fine.m / 2;
    if fine.dim == 1 {
        (0..mc).map(|i| 0.5 * (rho[2 * i] + rho[2 * i + 1])).collect()
    } else {
        let m = fine.m;
        let mut out = Vec::with_capacity(mc * mc);
        for j in 0..mc {
            for i in 0..mc {
                let s = rho[2 * i + m * 2 * j]
                    + rho[2 * i + 1 + m * 2 * j]
                    + rho[2 * i + m * (2 * j + 1)]
                    + rho[2 * i + 1 + m * (2 * j + 1)];
                out.push(0.25 * s);
            }
        }
        out
    }
}

/// Coarse parent and second interpolation partner of fine index `i`, with
/// the partner reflected onto the parent at the walls.
#[inline]
fn partners(i: usize, mc: usize) -> (usize, usize) {
    let p = i / 2;
    let q = if i % 2 == 0 {
        p.checked_sub(1).unwrap_or(p)
    } else if p + 1 < mc {
        p + 1
    } else {
        p
    };
    (p, q)
}

/// Bilinear (linear in 1D) interpolation from the coarse grid, added to `fine`.
fn prolong_add(coarse_grid: &GridSpec, e: &[f64], fine: &mut [f64]) {
    let mc = coarse_grid.m;
    let mf = 2 * mc;
    if coarse_grid.dim == 1 {
        for (i, f) in fine.iter_mut().enumerate().take(mf) {
            let (p, q) = partners(i, mc);
            *f += 0.75 * e[p] + 0.25 * e[q];
        }
    } else {
        for j in 0..mf {
            let (pj, qj) = partners(j, mc);
            for i in 0..mf {
                let (pi, qi) = partners(i, mc);
                fine[i + mf * j] += 0.5625 * e[pi + mc * pj]
                    + 0.1875 * (e[qi + mc * pj] + e[pi + mc * qj])
                    + 0.0625 * e[qi + mc * qj];
            }
        }
    }
}

/// Adjoint of the interpolation scaled by `2^-dim` (full weighting).
fn restrict(coarse_grid: &GridSpec, r: &[f64]) -> Vec<f64> {
    let mc = coarse_grid.m;
    let mf = 2 * mc;
    if coarse_grid.dim == 1 {
        let mut out = vec![0.0; mc];
        for (i, &v) in r.iter().enumerate().take(mf) {
            let (p, q) = partners(i, mc);
            out[p] += 0.5 * 0.75 * v;
            out[q] += 0.5 * 0.25 * v;
        }
        out
    } else {
        let mut out = vec![0.0; mc * mc];
        for j in 0..mf {
            let (pj, qj) = partners(j, mc);
            for i in 0..mf {
                let (pi, qi) = partners(i, mc);
                let v = 0.25 * r[i + mf * j];
                out[pi + mc * pj] += 0.5625 * v;
                out[qi + mc * pj] += 0.1875 * v;
                out[pi + mc * qj] += 0.1875 * v;
                out[qi + mc * qj] += 0.0625 * v;
            }
        }
        out
    }
}

fn gauss_seidel(k: &Sparse, diag: &[f64], b: &[f64], x: &mut [f64], forward: bool) {
    let n = b.len();
    let mut sweep = |i: usize| {
        let row = k.outer_view(i).expect("row in range");
        let mut s = b[i];
        for (j, &v) in row.iter() {
            if j != i {
                s -= v * x[j];
            }
        }
        x[i] = s / diag[i];
    };
    if forward {
        (0..n).for_each(&mut sweep);
    } else {
        (0..n).rev().for_each(&mut sweep);
    }
}

fn residual(k: &Sparse, b: &[f64], x: &[f64]) -> Vec<f64> {
    let mut r = vec![0.0; b.len()];
    super::sparse::matvec(k, x, &mut r);
    r.iter_mut().zip(b).for_each(|(r, b)| *r = b - *r);
    r
}

impl Multigrid {
    /// Builds the hierarchy for density `rho`, weight `a` and interface
    /// parameter `eps`, halving `M` while it stays even and above
    /// `cfg.coarsest`.
    pub fn new(
        grid: &GridSpec,
        rho: &[f64],
        a: f64,
        eps: f64,
        cfg: &LinearSolverConfig,
    ) -> Result<Self, SolverError> {
        let mut levels = Vec::new();
        let mut g = *grid;
        let mut r = rho.to_vec();
        loop {
            let k = c_operator_matrix(&g, &r, a, eps);
            let diag = k.diag_iter().map(|d| d.copied().unwrap_or(0.0)).collect();
            levels.push(Level { grid: g, k, diag });
            if g.m % 2 != 0 || g.m / 2 < cfg.coarsest.max(2) {
                break;
            }
            r = coarsen_density(&g, &r);
            g = GridSpec {
                dim: g.dim,
                m: g.m / 2,
                h: 2.0 * g.h,
            };
        }
        let last = &levels.last().unwrap().k;
        let n = last.rows();
        let mut dense = Mat::<f64>::zeros(n, n);
        for (i, row) in last.outer_iterator().enumerate() {
            for (j, &v) in row.iter() {
                dense[(i, j)] = v;
            }
        }
        let coarse = dense
            .llt(Side::Lower)
            .map_err(|e| SolverError::Factorization(format!("coarse level: {e:?}")))?;
        Ok(Self {
            levels,
            coarse,
            pre: cfg.pre_smooth,
            post: cfg.post_smooth,
        })
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    fn cycle(&self, l: usize, b: &[f64], x: &mut [f64]) {
        if l + 1 == self.levels.len() {
            let rhs = Col::<f64>::from_fn(b.len(), |i| b[i]);
            let sol = self.coarse.solve(&rhs);
            for (i, v) in x.iter_mut().enumerate() {
                *v = sol[i];
            }
            return;
        }
        let lev = &self.levels[l];
        for _ in 0..self.pre {
            gauss_seidel(&lev.k, &lev.diag, b, x, true);
        }
        let r = residual(&lev.k, b, x);
        let cg = &self.levels[l + 1].grid;
        let rc = restrict(cg, &r);
        let mut ec = vec![0.0; rc.len()];
        self.cycle(l + 1, &rc, &mut ec);
        prolong_add(cg, &ec, x);
        for _ in 0..self.post {
            gauss_seidel(&lev.k, &lev.diag, b, x, false);
        }
    }

    /// One V-cycle improving `x` for right-hand side `b`.
    pub fn vcycle(&self, b: &[f64], x: &mut [f64]) {
        self.cycle(0, b, x);
    }

    /// Applies one V-cycle from a zero initial guess.
    pub fn precondition(&self, r: &[f64], z: &mut [f64]) {
        z.iter_mut().for_each(|v| *v = 0.0);
        self.cycle(0, r, z);
    }

    /// Fine-level operator.
    pub fn operator(&self) -> &Sparse {
        &self.levels[0].k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restriction_is_scaled_adjoint_of_prolongation() {
        for dim in [1, 2] {
            let cg = GridSpec::new(dim, 4).unwrap();
            let nf = if dim == 1 { 8 } else { 64 };
            let nc = if dim == 1 { 4 } else { 16 };
            let e: Vec<f64> = (0..nc).map(|i| (i as f64 * 0.7).sin()).collect();
            let r: Vec<f64> = (0..nf).map(|i| (i as f64 * 1.3).cos()).collect();
            let mut pe = vec![0.0; nf];
            prolong_add(&cg, &e, &mut pe);
            let lhs: f64 = pe.iter().zip(&r).map(|(a, b)| a * b).sum();
            let rr = restrict(&cg, &r);
            let rhs: f64 = rr.iter().zip(&e).map(|(a, b)| a * b).sum::<f64>() * (1 << dim) as f64;
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn prolongation_preserves_constants() {
        let cg = GridSpec::new(2, 4).unwrap();
        let mut fine = vec![0.0; 64];
        prolong_add(&cg, &[2.0; 16], &mut fine);
        assert!(fine.iter().all(|v| (v - 2.0).abs() < 1e-14));
    }
}
