//! Semi-discrete right-hand side on the staggered grid.
//!
//! Every term takes the explicitly treated argument `ut` and/or the
//! implicitly treated argument `u`. `explicit_tendency` and
//! `implicit_tendency` collect them into the additive split used by the time
//! integrator; `total_rhs` is their sum.

mod convection;

pub use convection::{explicit_convection, ghost_extend, Ghosted};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridops::{
    apply_fd_operator, laplacian_neumann, Axis, FdKind, Field, GridError, GridSpec,
};
use crate::model::{d2psi_concave, ModelError, ModelParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpatialError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("state layout does not match the grid")]
    Layout,
}

/// Conserved variables: cell densities, face momenta per active axis, and
/// cell partial densities `q = rho c`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub rho: Field,
    pub mom: Vec<Field>,
    pub q: Field,
}

/// Tendencies share the layout of the state.
pub type Tendency = State;

impl State {
    pub fn zeros(grid: &GridSpec) -> Self {
        let (nx, ny) = grid.cell_shape();
        Self {
            rho: Field::zeros(nx, ny),
            mom: grid
                .axes()
                .iter()
                .map(|&a| {
                    let (fx, fy) = grid.face_shape(a);
                    Field::zeros(fx, fy)
                })
                .collect(),
            q: Field::zeros(nx, ny),
        }
    }

    pub fn check_layout(&self, grid: &GridSpec) -> Result<(), SpatialError> {
        let ok = self.rho.shape() == grid.cell_shape()
            && self.q.shape() == grid.cell_shape()
            && self.mom.len() == grid.dim
            && grid
                .axes()
                .iter()
                .zip(&self.mom)
                .all(|(&a, m)| m.shape() == grid.face_shape(a));
        if ok {
            Ok(())
        } else {
            Err(SpatialError::Layout)
        }
    }

    pub fn components(&self) -> impl Iterator<Item = &Field> {
        std::iter::once(&self.rho)
            .chain(self.mom.iter())
            .chain(std::iter::once(&self.q))
    }

    pub fn components_mut(&mut self) -> impl Iterator<Item = &mut Field> {
        std::iter::once(&mut self.rho)
            .chain(self.mom.iter_mut())
            .chain(std::iter::once(&mut self.q))
    }

    /// `self += a * x`.
    pub fn axpy(&mut self, a: f64, x: &State) {
        for (s, v) in self.components_mut().zip(x.components()) {
            s.axpy(a, v);
        }
    }

    pub fn scale(&mut self, a: f64) {
        for f in self.components_mut() {
            f.data.iter_mut().for_each(|v| *v *= a);
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.components().fold(0.0, |m, f| m.max(f.max_abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.components().all(|f| f.data.iter().all(|v| v.is_finite()))
    }

    /// Concentration `q / rho` at cell centers.
    pub fn concentration(&self) -> Field {
        self.q.zip_map(&self.rho, |q, r| q / r)
    }

    /// Face velocities `m / avg(rho)` per active axis.
    pub fn velocities(&self, grid: &GridSpec) -> Vec<Field> {
        grid.axes()
            .iter()
            .zip(&self.mom)
            .map(|(&a, m)| {
                let rf = apply_fd_operator(FdKind::Average, a, grid.h, &self.rho);
                m.zip_map(&rf, |m, r| m / r)
            })
            .collect()
    }
}

/// How the Rusanov diffusion of the mass flux is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MassDiffusion {
    /// Jump of the reconstructed interface densities.
    #[default]
    Reconstructed,
    /// Jump of the neighbouring cell densities (first order).
    CellValues,
}

/// Grid, model constants and discretization switches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discretization {
    pub grid: GridSpec,
    pub params: ModelParams,
    pub mass_diffusion: MassDiffusion,
}

impl Discretization {
    pub fn new(grid: GridSpec, params: ModelParams) -> Self {
        Self {
            grid,
            params,
            mass_diffusion: MassDiffusion::default(),
        }
    }
}

fn last_axis(grid: &GridSpec) -> usize {
    grid.dim - 1
}

/// Centered mass transport `-sum_a D_a m_a` with zero wall fluxes.
pub fn mass_transport(grid: &GridSpec, u: &State) -> Field {
    let mut out = Field::zeros(u.rho.nx, u.rho.ny);
    for (&a, m) in grid.axes().iter().zip(&u.mom) {
        out.axpy(-1.0, &apply_fd_operator(FdKind::Dual, a, grid.h, m));
    }
    out
}

/// Convective tendency: WENO/Rusanov fluxes of `ut` plus the centered mass
/// transport of `u`.
pub fn convective_tendency(
    disc: &Discretization,
    ut: &State,
    u: &State,
) -> Result<Tendency, SpatialError> {
    let mut out = explicit_convection(disc, ut)?;
    out.rho.axpy(1.0, &mass_transport(&disc.grid, u));
    Ok(out)
}

/// Stiff pressure gradient `D_a^T p2(rho)` on the momenta.
pub fn stiff_pressure(disc: &Discretization, u: &State) -> Result<Vec<Field>, SpatialError> {
    let grid = &disc.grid;
    let p = &disc.params;
    if let Some((index, &value)) = u.rho.data.iter().enumerate().find(|(_, &r)| !(r > 0.0)) {
        return Err(ModelError::NonPositiveDensity { index, value }.into());
    }
    let p2 = u.rho.map(|r| p.p2(r));
    Ok(grid
        .axes()
        .iter()
        .map(|&a| apply_fd_operator(FdKind::DualTranspose, a, grid.h, &p2))
        .collect())
}

/// Gravity `g * avg(rho)` on the momentum of the last active axis.
pub fn gravity(disc: &Discretization, ut: &State) -> Field {
    let grid = &disc.grid;
    let axis = grid.axes()[last_axis(grid)];
    let rf = apply_fd_operator(FdKind::Average, axis, grid.h, &ut.rho);
    rf.map(|r| disc.params.g * r)
}

/// Stiff pressure of `u` plus gravity of `ut`.
pub fn pressure_gravity_tendency(
    disc: &Discretization,
    ut: &State,
    u: &State,
) -> Result<Tendency, SpatialError> {
    let mut out = State::zeros(&disc.grid);
    for (o, p) in out.mom.iter_mut().zip(stiff_pressure(disc, u)?) {
        *o = p;
    }
    let k = last_axis(&disc.grid);
    out.mom[k].axpy(1.0, &gravity(disc, ut));
    Ok(out)
}

/// Capillary force on the momenta. On x-faces
/// `eps (1/2 (c_y^2)_x - 1/2 (c_x^2)_x - (c_x c_y)_y)`, symmetric on y-faces;
/// in one dimension `-eps/2 (c_x^2)_x`.
pub fn capillary_tendency(disc: &Discretization, ut: &State) -> Tendency {
    let grid = &disc.grid;
    let h = grid.h;
    let eps = disc.params.eps;
    let c = ut.concentration();
    let mut out = State::zeros(grid);
    let grads: Vec<Field> = grid
        .axes()
        .iter()
        .map(|&a| apply_fd_operator(FdKind::Center, a, h, &c))
        .collect();
    let sq: Vec<Field> = grads.iter().map(|g| g.map(|v| v * v)).collect();
    for (a, &axis) in grid.axes().iter().enumerate() {
        // D^T is minus the difference, so -1/2 (w)_a = 1/2 D^T w.
        let mut f = apply_fd_operator(FdKind::DualTranspose, axis, h, &sq[a]).map(|v| 0.5 * v);
        if grid.dim == 2 {
            let b = 1 - a;
            let baxis = axis.other();
            f.axpy(
                -0.5,
                &apply_fd_operator(FdKind::DualTranspose, axis, h, &sq[b]),
            );
            // c_a c_b at interior corners.
            let ga = apply_fd_operator(FdKind::DualTranspose, axis, h, &c).map(|v| -v);
            let ga = apply_fd_operator(FdKind::Average, baxis, h, &ga);
            let gb = apply_fd_operator(FdKind::DualTranspose, baxis, h, &c).map(|v| -v);
            let gb = apply_fd_operator(FdKind::Average, axis, h, &gb);
            let z = ga.zip_map(&gb, |x, y| x * y);
            f.axpy(-1.0, &apply_fd_operator(FdKind::Dual, baxis, h, &z));
        }
        out.mom[a] = f.map(|v| eps * v);
    }
    out
}

/// Flux-form operator `div(psi2''(c) grad c)` with arithmetic-mean face
/// coefficients and zero boundary flux.
pub fn concave_diffusion(grid: &GridSpec, c: &Field) -> Field {
    let s = 1.0 / (grid.h * grid.h);
    let k = c.map(d2psi_concave);
    let mut out = Field::zeros(c.nx, c.ny);
    for j in 0..c.ny {
        for i in 0..c.nx {
            let ci = c.get(i, j);
            let ki = k.get(i, j);
            let mut acc = 0.0;
            let mut nb = |ii: usize, jj: usize| {
                acc += 0.5 * (ki + k.get(ii, jj)) * (c.get(ii, jj) - ci);
            };
            if i > 0 {
                nb(i - 1, j);
            }
            if i + 1 < c.nx {
                nb(i + 1, j);
            }
            if grid.dim == 2 {
                if j > 0 {
                    nb(i, j - 1);
                }
                if j + 1 < c.ny {
                    nb(i, j + 1);
                }
            }
            out.set(i, j, s * acc);
        }
    }
    out
}

/// Implicit Cahn-Hilliard operator `2 lap C - eps lap(rho^-1 lap C)`.
pub fn cahn_hilliard_implicit(grid: &GridSpec, eps: f64, rho: &Field, c: &Field) -> Field {
    let lap = laplacian_neumann(grid, c);
    let inner = lap.zip_map(rho, |l, r| l / r);
    let bih = laplacian_neumann(grid, &inner);
    lap.zip_map(&bih, |l, b| 2.0 * l - eps * b)
}

/// Cahn-Hilliard tendency on `q`: concave part of `ut` plus the convex and
/// fourth-order parts of `u`.
pub fn cahn_hilliard_tendency(disc: &Discretization, ut: &State, u: &State) -> Tendency {
    let grid = &disc.grid;
    let mut out = State::zeros(grid);
    out.q = concave_diffusion(grid, &ut.concentration());
    out.q.axpy(
        1.0,
        &cahn_hilliard_implicit(grid, disc.params.eps, &u.rho, &u.concentration()),
    );
    out
}

/// Viscous operator `-B V` applied to face velocities.
pub fn viscous_apply(grid: &GridSpec, params: &ModelParams, v: &[Field]) -> Vec<Field> {
    let h = grid.h;
    let (nu, lam) = (params.nu, params.lambda);
    let fd = |k, a, f: &Field| apply_fd_operator(k, a, h, f);
    let mut out = Vec::with_capacity(grid.dim);
    for (a, &axis) in grid.axes().iter().enumerate() {
        // Normal second derivative with no-slip walls.
        let normal = fd(FdKind::DualTranspose, axis, &fd(FdKind::Dual, axis, &v[a]));
        let mut f = normal.map(|x| -(2.0 * nu + lam) * x);
        if grid.dim == 2 {
            let baxis = axis.other();
            let tang = fd(
                FdKind::DualTranspose,
                baxis,
                &fd(FdKind::DualStar, baxis, &v[a]),
            );
            f.axpy(-nu, &tang);
            let cross = fd(
                FdKind::Dual,
                baxis,
                &fd(FdKind::DualTranspose, axis, &v[1 - a]),
            );
            f.axpy(-(nu + lam), &cross);
        }
        out.push(f);
    }
    out
}

/// Viscous tendency of the face velocities of `u`.
pub fn viscous_tendency(disc: &Discretization, u: &State) -> Tendency {
    let mut out = State::zeros(&disc.grid);
    out.mom = viscous_apply(&disc.grid, &disc.params, &u.velocities(&disc.grid));
    out
}

/// Explicitly treated part: Rusanov diffusion of the mass flux, convection,
/// gravity, capillarity and the concave Cahn-Hilliard term.
pub fn explicit_tendency(disc: &Discretization, ut: &State) -> Result<Tendency, SpatialError> {
    ut.check_layout(&disc.grid)?;
    let mut out = explicit_convection(disc, ut)?;
    let k = last_axis(&disc.grid);
    out.mom[k].axpy(1.0, &gravity(disc, ut));
    out.axpy(1.0, &capillary_tendency(disc, ut));
    out.q
        .axpy(1.0, &concave_diffusion(&disc.grid, &ut.concentration()));
    Ok(out)
}

/// Implicitly treated part: centered mass transport, stiff pressure,
/// viscosity and the convex plus fourth-order Cahn-Hilliard terms.
pub fn implicit_tendency(disc: &Discretization, u: &State) -> Result<Tendency, SpatialError> {
    let grid = &disc.grid;
    u.check_layout(grid)?;
    let mut out = State::zeros(grid);
    out.rho = mass_transport(grid, u);
    let visc = viscous_apply(grid, &disc.params, &u.velocities(grid));
    for ((o, p), v) in out.mom.iter_mut().zip(stiff_pressure(disc, u)?).zip(visc) {
        *o = p;
        o.axpy(1.0, &v);
    }
    out.q = cahn_hilliard_implicit(grid, disc.params.eps, &u.rho, &u.concentration());
    Ok(out)
}

/// Full right-hand side `E(ut) + I(u)`.
pub fn total_rhs(disc: &Discretization, ut: &State, u: &State) -> Result<Tendency, SpatialError> {
    let mut out = explicit_tendency(disc, ut)?;
    out.axpy(1.0, &implicit_tendency(disc, u)?);
    Ok(out)
}

/// Axis of the momentum component `a`.
pub fn axis_of(grid: &GridSpec, a: usize) -> Axis {
    grid.axes()[a]
}
