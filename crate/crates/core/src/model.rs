//! Physical parameters, the split isentropic pressure law and the
//! double-well mixing potential.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridops::{apply_fd_operator, laplacian_neumann, FdKind, Field, GridSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("nonpositive density {value} at index {index}")]
    NonPositiveDensity { index: usize, value: f64 },
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
}

/// Model constants. `cp1` is the part of the pressure treated explicitly,
/// `cp - cp1` the stiff part treated implicitly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub gamma: f64,
    pub cp: f64,
    pub cp1: f64,
    pub nu: f64,
    pub lambda: f64,
    pub eps: f64,
    pub g: f64,
}

impl ModelParams {
    /// Default constants for a given pressure scale; `cp1 = sqrt(cp)`.
    pub fn new(cp: f64) -> Self {
        Self {
            gamma: 5.0 / 3.0,
            cp,
            cp1: cp.sqrt(),
            nu: 1.0,
            lambda: 0.1,
            eps: 1e-4,
            g: -10.0,
        }
    }

    pub fn with_cp1(mut self, cp1: f64) -> Self {
        self.cp1 = cp1;
        self
    }

    pub fn cp2(&self) -> f64 {
        self.cp - self.cp1
    }

    /// Inverse pressure scale, the small parameter of the low-Mach limit.
    pub fn delta(&self) -> f64 {
        1.0 / self.cp
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |name, value, reason| {
            Err(ModelError::InvalidParameter {
                name,
                value,
                reason,
            })
        };
        if !(self.gamma > 1.0) {
            return bad("gamma", self.gamma, "must exceed 1");
        }
        if !(self.cp > 0.0) || !self.cp.is_finite() {
            return bad("cp", self.cp, "must be positive and finite");
        }
        if !(self.cp1 > 0.0) || self.cp1 > self.cp {
            return bad("cp1", self.cp1, "must lie in (0, cp]");
        }
        if !(self.nu > 0.0) {
            return bad("nu", self.nu, "must be positive");
        }
        if !(self.lambda > 0.0) {
            return bad("lambda", self.lambda, "must be positive");
        }
        if !(self.eps > 0.0) {
            return bad("eps", self.eps, "must be positive");
        }
        if !self.g.is_finite() {
            return bad("g", self.g, "must be finite");
        }
        Ok(())
    }

    pub fn p1(&self, rho: f64) -> f64 {
        self.cp1 * rho.powf(self.gamma)
    }

    pub fn p2(&self, rho: f64) -> f64 {
        self.cp2() * rho.powf(self.gamma)
    }

    pub fn dp1(&self, rho: f64) -> f64 {
        self.gamma * self.cp1 * rho.powf(self.gamma - 1.0)
    }

    pub fn dp2(&self, rho: f64) -> f64 {
        self.gamma * self.cp2() * rho.powf(self.gamma - 1.0)
    }

    /// Explicit sound speed `sqrt(p1'(rho))`.
    pub fn sound1(&self, rho: f64) -> f64 {
        self.dp1(rho).max(0.0).sqrt()
    }

    /// Full sound speed `sqrt(p'(rho))`.
    pub fn sound(&self, rho: f64) -> f64 {
        (self.gamma * self.cp * rho.powf(self.gamma - 1.0)).sqrt()
    }

    /// Helmholtz free energy density per unit mass.
    pub fn free_energy(&self, rho: f64) -> f64 {
        self.cp * rho.powf(self.gamma - 1.0) / (self.gamma - 1.0)
    }
}

/// Pointwise evaluation of the split pressure law on an array of densities.
#[derive(Debug, Clone, PartialEq)]
pub struct EosEval {
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub dp1: Vec<f64>,
    pub dp2: Vec<f64>,
    pub sound1: Vec<f64>,
    pub free_energy: Vec<f64>,
}

/// Evaluates the pressure law; fails on the first nonpositive density.
pub fn eos_eval(rho: &[f64], params: &ModelParams) -> Result<EosEval, ModelError> {
    if let Some((index, &value)) = rho.iter().enumerate().find(|(_, &r)| !(r > 0.0)) {
        return Err(ModelError::NonPositiveDensity { index, value });
    }
    let n = rho.len();
    let mut out = EosEval {
        p1: Vec::with_capacity(n),
        p2: Vec::with_capacity(n),
        dp1: Vec::with_capacity(n),
        dp2: Vec::with_capacity(n),
        sound1: Vec::with_capacity(n),
        free_energy: Vec::with_capacity(n),
    };
    let cp2 = params.cp2();
    for &r in rho {
        let rg1 = r.powf(params.gamma - 1.0);
        let rg = rg1 * r;
        out.p1.push(params.cp1 * rg);
        out.p2.push(cp2 * rg);
        out.dp1.push(params.gamma * params.cp1 * rg1);
        out.dp2.push(params.gamma * cp2 * rg1);
        out.sound1.push((params.gamma * params.cp1 * rg1).sqrt());
        out.free_energy.push(params.cp * rg1 / (params.gamma - 1.0));
    }
    Ok(out)
}

/// Double-well potential `(c^2 - 1)^2 / 4`.
pub fn psi(c: f64) -> f64 {
    let s = c * c - 1.0;
    0.25 * s * s
}

pub fn dpsi(c: f64) -> f64 {
    c * c * c - c
}

/// Convex part of the potential derivative, treated implicitly.
pub fn dpsi_convex(c: f64) -> f64 {
    2.0 * c
}

/// Concave part of the potential derivative, treated explicitly.
pub fn dpsi_concave(c: f64) -> f64 {
    c * c * c - 3.0 * c
}

pub fn d2psi_concave(c: f64) -> f64 {
    3.0 * c * c - 3.0
}

/// Total discrete energy and chemical potential.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub total: f64,
    pub mu: Field,
}

/// Helmholtz energy `h^d sum[rho (f_e + psi) + eps/2 |grad c|^2]` with
/// centered gradients of `c = q / rho`, and the chemical potential
/// `psi'(c) - (eps/rho) lap c`.
pub fn energy_diagnostics(
    grid: &GridSpec,
    params: &ModelParams,
    rho: &Field,
    q: &Field,
) -> Result<EnergyReport, ModelError> {
    let eos = eos_eval(&rho.data, params)?;
    let c = q.zip_map(rho, |q, r| q / r);
    let mut grad2 = Field::zeros(c.nx, c.ny);
    for &axis in grid.axes() {
        let d = apply_fd_operator(FdKind::Center, axis, grid.h, &c);
        grad2.axpy(1.0, &d.map(|v| v * v));
    }
    let mut total = 0.0;
    for k in 0..rho.len() {
        let r = rho.data[k];
        total += r * (eos.free_energy[k] + psi(c.data[k])) + 0.5 * params.eps * grad2.data[k];
    }
    total *= grid.cell_volume();
    let lap = laplacian_neumann(grid, &c);
    let mu = Field::from_fn(c.nx, c.ny, |i, j| {
        dpsi(c.get(i, j)) - params.eps / rho.get(i, j) * lap.get(i, j)
    });
    Ok(EnergyReport { total, mu })
}
