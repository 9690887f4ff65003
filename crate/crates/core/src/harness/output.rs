//! CSV and JSON artifacts.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::diagnostics::EocTable;
use crate::gridops::{transfer6, GridSpec, Padded, Parity, TransferDir};
use crate::spatial::State;

use super::{HarnessError, RunConfig};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn prepare_dir(dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

/// Writes any serializable rows with a header line.
pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_eoc(path: &Path, table: &EocTable) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["M", "error", "eoc"])?;
    for e in table {
        let eoc = e.eoc.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([e.m.to_string(), format!("{:e}", e.error), eoc])?;
    }
    w.flush().map_err(io_err(path))
}

/// Cell-centered velocities, interpolated from the faces.
pub fn cell_velocities(grid: &GridSpec, state: &State) -> Result<Vec<Vec<f64>>, HarnessError> {
    let vel = state.velocities(grid);
    grid.axes()
        .iter()
        .zip(vel)
        .map(|(&axis, v)| {
            let p = Padded::extended(&v, grid.m, grid.face_locs(axis), [Parity::Odd, Parity::Odd])?;
            Ok(transfer6(&p, TransferDir::FaceToCell, axis)?.interior().data)
        })
        .collect()
}

/// One line per cell: `x, y, rho, v1, v2, c`, in shortest round-trip form.
pub fn write_fields(path: &Path, grid: &GridSpec, state: &State) -> Result<(), HarnessError> {
    let vel = cell_velocities(grid, state)?;
    let c = state.concentration();
    let (nx, ny) = grid.cell_shape();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x", "y", "rho", "v1", "v2", "c"])?;
    for j in 0..ny {
        for i in 0..nx {
            let k = i + nx * j;
            let y = if grid.dim == 1 { 0.0 } else { grid.center(j) };
            let v2 = vel.get(1).map_or(0.0, |v| v[k]);
            w.write_record(
                [grid.center(i), y, state.rho.data[k], vel[0][k], v2, c.data[k]]
                    .iter()
                    .map(|v| format!("{v:e}")),
            )?;
        }
    }
    w.flush().map_err(io_err(path))
}

/// Writes `manifest.json` with the configuration, crate version and a
/// result summary. Contains no timestamps so reruns compare equal.
pub fn write_manifest(
    dir: &Path,
    cfg: &RunConfig,
    summary: &serde_json::Value,
) -> Result<(), HarnessError> {
    let path = dir.join("manifest.json");
    let doc = serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "summary": summary,
    });
    let text = serde_json::to_string_pretty(&doc)?;
    fs::write(&path, text + "\n").map_err(io_err(&path))
}
