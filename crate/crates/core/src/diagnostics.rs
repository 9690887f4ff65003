//! Conservation, concentration bounds, low-Mach metrics, errors against a
//! reference state and experimental orders of convergence.

use serde::Serialize;
use thiserror::Error;

use crate::gridops::{apply_fd_operator, FdKind, Field, GridSpec};
use crate::model::{energy_diagnostics, ModelError, ModelParams};
use crate::spatial::State;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("grid sizes must double between consecutive entries ({prev} then {next})")]
    NotDoubling { prev: usize, next: usize },
    #[error("errors must be positive and finite, got {0}")]
    BadError(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Changes of the total mass and total partial density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConservationErrors {
    /// Raw sum differences.
    pub rho: f64,
    pub q: f64,
    /// The same scaled by the cell volume.
    pub rho_scaled: f64,
    pub q_scaled: f64,
}

pub fn conservation_errors(state: &State, state0: &State, grid: &GridSpec) -> ConservationErrors {
    let rho = state.rho.sum() - state0.rho.sum();
    let q = state.q.sum() - state0.q.sum();
    let v = grid.cell_volume();
    ConservationErrors {
        rho,
        q,
        rho_scaled: rho * v,
        q_scaled: q * v,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApMetrics {
    /// Max-norm of the discrete divergence of the face velocities.
    pub div_v_norm: f64,
    /// `max |rho - mean(rho)|`.
    pub rho_flatness: f64,
    /// Max-norm of the face gradient of the total pressure.
    pub grad_p_stiff_norm: f64,
}

pub fn ap_metrics(state: &State, grid: &GridSpec, params: &ModelParams) -> ApMetrics {
    let vel = state.velocities(grid);
    let mut div = Field::zeros(state.rho.nx, state.rho.ny);
    for (&a, v) in grid.axes().iter().zip(&vel) {
        div.axpy(1.0, &apply_fd_operator(FdKind::Dual, a, grid.h, v));
    }
    let mean = state.rho.sum() / state.rho.len() as f64;
    let flat = state.rho.data.iter().fold(0.0, |m: f64, r| m.max((r - mean).abs()));
    let p = state.rho.map(|r| params.cp * r.max(0.0).powf(params.gamma));
    let gp = grid
        .axes()
        .iter()
        .map(|&a| apply_fd_operator(FdKind::DualTranspose, a, grid.h, &p).max_abs())
        .fold(0.0, f64::max);
    ApMetrics {
        div_v_norm: div.max_abs(),
        rho_flatness: flat,
        grad_p_stiff_norm: gp,
    }
}

/// Extrema of `q / rho`.
pub fn c_extrema(state: &State) -> (f64, f64) {
    state
        .concentration()
        .data
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &c| {
            (lo.min(c), hi.max(c))
        })
}

/// One row of the diagnostics time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagnosticsRow {
    pub time: f64,
    pub mass_rho_err: f64,
    pub mass_q_err: f64,
    pub c_min: f64,
    pub c_max: f64,
    pub div_v_norm: f64,
    pub rho_flatness: f64,
    pub grad_p_stiff_norm: f64,
    pub energy: f64,
}

impl DiagnosticsRow {
    pub fn compute(
        time: f64,
        state: &State,
        state0: &State,
        grid: &GridSpec,
        params: &ModelParams,
    ) -> Result<Self, DiagnosticsError> {
        let cons = conservation_errors(state, state0, grid);
        let (c_min, c_max) = c_extrema(state);
        let ap = ap_metrics(state, grid, params);
        let e = energy_diagnostics(grid, params, &state.rho, &state.q)?;
        Ok(Self {
            time,
            mass_rho_err: cons.rho,
            mass_q_err: cons.q,
            c_min,
            c_max,
            div_v_norm: ap.div_v_norm,
            rho_flatness: ap.rho_flatness,
            grad_p_stiff_norm: ap.grad_p_stiff_norm,
            energy: e.total,
        })
    }
}

/// `h^dim` times the sum of absolute differences over all components.
pub fn l1_error(state: &State, reference: &State, grid: &GridSpec) -> f64 {
    let s: f64 = state
        .components()
        .zip(reference.components())
        .map(|(a, b)| a.data.iter().zip(&b.data).map(|(x, y)| (x - y).abs()).sum::<f64>())
        .sum();
    s * grid.cell_volume()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EocEntry {
    pub m: usize,
    pub error: f64,
    /// `log2(e_{M/2} / e_M)`; absent on the coarsest grid.
    pub eoc: Option<f64>,
}

pub type EocTable = Vec<EocEntry>;

/// Orders of convergence between consecutive doublings, attached to the
/// finer grid of each pair.
pub fn compute_eoc(errors: &[(usize, f64)]) -> Result<EocTable, DiagnosticsError> {
    let mut out = Vec::with_capacity(errors.len());
    for (k, &(m, e)) in errors.iter().enumerate() {
        if !(e > 0.0) || !e.is_finite() {
            return Err(DiagnosticsError::BadError(e));
        }
        let eoc = if k == 0 {
            None
        } else {
            let (pm, pe) = errors[k - 1];
            if m != 2 * pm {
                return Err(DiagnosticsError::NotDoubling { prev: pm, next: m });
            }
            Some((pe / e).log2())
        };
        out.push(EocEntry { m, error: e, eoc });
    }
    Ok(out)
}
