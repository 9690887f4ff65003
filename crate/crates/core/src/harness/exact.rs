//! Closed-form manufactured solutions and their sampling on the grid.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::gridops::{apply_fd_operator, Axis, FdKind, Field, GridSpec};
use crate::model::ModelParams;
use crate::solvers::Forcing;
use crate::spatial::State;

use super::forcing::{source_1d, source_2d};

/// Exact density, velocity and concentration at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactPoint {
    pub rho: f64,
    pub v: [f64; 2],
    pub c: f64,
}

/// Manufactured solution for dimension `dim` and low-Mach parameter `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactSolution {
    pub dim: usize,
    pub delta: f64,
}

impl ExactSolution {
    pub fn new(dim: usize, delta: f64) -> Self {
        Self { dim, delta }
    }

    pub fn eval(&self, x: f64, y: f64, t: f64) -> ExactPoint {
        let d = self.delta;
        if self.dim == 1 {
            ExactPoint {
                rho: 1.0 + d * (2.0 * PI * x).cos() * (t + 1.0),
                v: [0.0, 0.0],
                c: 0.75 - 0.1 * (1.0 - d) * (PI * x).cos() * (t - 1.0),
            }
        } else {
            let amp = 1.0 + d;
            ExactPoint {
                rho: 1.0 + d * (2.0 * PI * x).cos() * (PI * y).cos() * (t + 1.0),
                v: [
                    amp * (1.0 - (2.0 * PI * x).cos()) * (2.0 * PI * y).sin() * (1.0 - 2.0 * t * t),
                    amp * (1.0 - (2.0 * PI * y).cos()) * (2.0 * PI * x).sin() * (2.0 * t * t - 1.0),
                ],
                c: 0.75 - 0.1 * (1.0 - d) * (PI * x).cos() * (PI * y).cos() * (t - 1.0),
            }
        }
    }

    /// Discrete state at time `t`: point values at cell centers, momenta as
    /// averaged cell density times the face velocity.
    pub fn sample(&self, grid: &GridSpec, t: f64) -> State {
        sample_fields(grid, |x, y| {
            let p = self.eval(x, y, t);
            (p.rho, p.v, p.c)
        })
    }

    /// Source term sampled like the state.
    pub fn source(&self, grid: &GridSpec, params: &ModelParams, t: f64) -> State {
        let mut s = State::zeros(grid);
        let (nx, ny) = grid.cell_shape();
        let yc = |j: usize| if grid.dim == 1 { 0.0 } else { grid.center(j) };
        for j in 0..ny {
            for i in 0..nx {
                let (x, y) = (grid.center(i), yc(j));
                if grid.dim == 1 {
                    let v = source_1d(x, t, params);
                    s.rho.set(i, j, v[0]);
                    s.q.set(i, j, v[2]);
                } else {
                    let v = source_2d(x, y, t, params);
                    s.rho.set(i, j, v[0]);
                    s.q.set(i, j, v[3]);
                }
            }
        }
        for (a, &axis) in grid.axes().iter().enumerate() {
            let f = &mut s.mom[a];
            for j in 0..f.ny {
                for i in 0..f.nx {
                    let (x, y) = face_point(grid, axis, i, j);
                    let v = if grid.dim == 1 {
                        source_1d(x, t, params)[1]
                    } else {
                        source_2d(x, y, t, params)[1 + a]
                    };
                    f.set(i, j, v);
                }
            }
        }
        s
    }

    /// Source term as a closure for the time integrator.
    pub fn forcing(&self, grid: GridSpec, params: ModelParams) -> Forcing {
        let ex = *self;
        Arc::new(move |t| ex.source(&grid, &params, t))
    }
}

/// Coordinates of interior face `(i, j)` normal to `axis`.
pub fn face_point(grid: &GridSpec, axis: Axis, i: usize, j: usize) -> (f64, f64) {
    let yc = if grid.dim == 1 { 0.0 } else { grid.center(j) };
    match axis {
        Axis::X => (grid.face(i), yc),
        Axis::Y => (grid.center(i), grid.face(j)),
    }
}

/// Builds a state from pointwise density, velocity and concentration.
pub fn sample_fields(grid: &GridSpec, f: impl Fn(f64, f64) -> (f64, [f64; 2], f64)) -> State {
    let (nx, ny) = grid.cell_shape();
    let yc = |j: usize| if grid.dim == 1 { 0.0 } else { grid.center(j) };
    let rho = Field::from_fn(nx, ny, |i, j| f(grid.center(i), yc(j)).0);
    let q = Field::from_fn(nx, ny, |i, j| {
        let (r, _, c) = f(grid.center(i), yc(j));
        r * c
    });
    let mom = grid
        .axes()
        .iter()
        .enumerate()
        .map(|(a, &axis)| {
            let rs = apply_fd_operator(FdKind::Average, axis, grid.h, &rho);
            Field::from_fn(rs.nx, rs.ny, |i, j| {
                let (x, y) = face_point(grid, axis, i, j);
                rs.get(i, j) * f(x, y).1[a]
            })
        })
        .collect();
    State { rho, mom, q }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_point_value() {
        let p = ExactSolution::new(1, 0.1).eval(0.0, 0.0, 0.0);
        assert!((p.rho - 1.1).abs() < 1e-15);
        assert_eq!(p.v, [0.0, 0.0]);
        assert!((p.c - 0.84).abs() < 1e-15);
    }

    #[test]
    fn mass_source_in_one_dimension() {
        let params = ModelParams::new(10.0);
        for &x in &[0.1, 0.37, 0.8] {
            let s = source_1d(x, 0.3, &params);
            assert!((s[0] - 0.1 * (2.0 * PI * x).cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn velocity_is_divergence_free() {
        let ex = ExactSolution::new(2, 0.01);
        let h = 1e-5;
        for &(x, y, t) in &[(0.2, 0.3, 0.0), (0.7, 0.45, 0.4)] {
            let dx = (ex.eval(x + h, y, t).v[0] - ex.eval(x - h, y, t).v[0]) / (2.0 * h);
            let dy = (ex.eval(x, y + h, t).v[1] - ex.eval(x, y - h, t).v[1]) / (2.0 * h);
            assert!((dx + dy).abs() < 1e-8);
        }
    }
}
