//! The full model as an [`ImexSystem`]: explicit tendency plus optional
//! source term, and the implicit stage solve (Newton on density/velocity,
//! then the linear concentration system).

use std::sync::Arc;

use serde::Serialize;

use crate::gridops::{apply_fd_operator, FdKind};
use crate::imex::ImexSystem;
use crate::spatial::{cahn_hilliard_implicit, explicit_tendency, Discretization, State};

use super::hydro::{HydroOps, HydroProblem, NewtonConfig, NewtonSolver, NewtonStats};
use super::{CSolver, LinearSolverConfig, LinearStats, SolverError};

/// Source term sampled on the grid at a given time.
pub type Forcing = Arc<dyn Fn(f64) -> State + Send + Sync>;

#[derive(Debug, Clone, Default, Serialize)]
pub struct StageStats {
    pub newton: NewtonStats,
    pub linear: LinearStats,
}

pub struct ChnsSystem {
    pub disc: Discretization,
    pub ops: HydroOps,
    pub newton: NewtonSolver,
    pub csolver: CSolver,
    pub forcing: Option<Forcing>,
}

impl std::fmt::Debug for ChnsSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ChnsSystem")
            .field("disc", &self.disc)
            .field("forced", &self.forcing.is_some())
            .finish()
    }
}

impl ChnsSystem {
    pub fn new(disc: Discretization, newton: NewtonConfig, linear: LinearSolverConfig) -> Self {
        Self {
            ops: HydroOps::new(&disc.grid, &disc.params),
            disc,
            newton: NewtonSolver::new(newton),
            csolver: CSolver::new(linear),
            forcing: None,
        }
    }

    pub fn with_forcing(mut self, forcing: Forcing) -> Self {
        self.forcing = Some(forcing);
        self
    }

    fn pack(&self, rho: &[f64], parts: &[Vec<f64>]) -> Vec<f64> {
        let mut z = Vec::with_capacity(self.ops.size());
        z.extend_from_slice(rho);
        for p in parts {
            z.extend_from_slice(p);
        }
        z
    }
}

impl ImexSystem for ChnsSystem {
    type Vector = State;
    type Error = SolverError;
    type Stats = StageStats;

    fn explicit(&mut self, t: f64, ut: &State) -> Result<State, SolverError> {
        let mut e = explicit_tendency(&self.disc, ut)?;
        if let Some(f) = &self.forcing {
            e.axpy(1.0, &f(t));
        }
        Ok(e)
    }

    fn solve_implicit(
        &mut self,
        rhs: &State,
        a: f64,
        guess: &State,
    ) -> Result<(State, StageStats), SolverError> {
        let grid = self.disc.grid;
        let params = self.disc.params;
        rhs.check_layout(&grid)?;
        let start = if guess.rho.data.iter().all(|&r| r > 0.0) {
            guess
        } else {
            rhs
        };
        let vel: Vec<Vec<f64>> = start.velocities(&grid).into_iter().map(|f| f.data).collect();
        let z0 = self.pack(&start.rho.data, &vel);
        let rm: Vec<Vec<f64>> = rhs.mom.iter().map(|f| f.data.clone()).collect();
        let r = self.pack(&rhs.rho.data, &rm);
        let prob = HydroProblem {
            ops: &self.ops,
            params: &params,
            a,
            r: &r,
        };
        let (z, newton) = self.newton.solve(&prob, &z0)?;

        // Momenta from the Newton iterate, density rebuilt from the discrete
        // mass balance so that sums are conserved to round-off.
        let off = self.ops.offsets();
        let nc = self.ops.n_cells;
        let mut u = State::zeros(&grid);
        u.rho.data.copy_from_slice(&z[..nc]);
        for (ia, &axis) in grid.axes().iter().enumerate() {
            let rs = apply_fd_operator(FdKind::Average, axis, grid.h, &u.rho);
            let v = &z[off[ia + 1]..off[ia + 2]];
            u.mom[ia].data = rs.data.iter().zip(v).map(|(r, v)| r * v).collect();
        }
        let mut rho = rhs.rho.clone();
        for (ia, &axis) in grid.axes().iter().enumerate() {
            rho.axpy(-a, &apply_fd_operator(FdKind::Dual, axis, grid.h, &u.mom[ia]));
        }
        u.rho = rho;

        let (c, linear) = self
            .csolver
            .solve(&grid, &u.rho.data, &rhs.q.data, a, params.eps)?;
        let cf = crate::gridops::Field {
            nx: u.q.nx,
            ny: u.q.ny,
            data: c,
        };
        let mut q = rhs.q.clone();
        q.axpy(a, &cahn_hilliard_implicit(&grid, params.eps, &u.rho, &cf));
        u.q = q;
        Ok((u, StageStats { newton, linear }))
    }

    fn char_speed(&self, u: &State) -> f64 {
        let grid = &self.disc.grid;
        let vmax = u
            .velocities(grid)
            .iter()
            .fold(0.0, |m: f64, v| m.max(v.max_abs()));
        let smax = u
            .rho
            .data
            .iter()
            .fold(0.0, |m: f64, &r| m.max(self.disc.params.sound1(r.max(0.0))));
        vmax + smax
    }

    fn mesh_width(&self) -> f64 {
        self.disc.grid.h
    }
}
