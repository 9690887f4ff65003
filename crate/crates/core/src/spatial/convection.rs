//! WENO/Rusanov convective fluxes on the staggered grid.

use crate::gridops::{
    average_to_faces, transfer6, Field, GridSpec, Loc, Padded, Parity, TransferDir,
};
use crate::model::ModelParams;
use crate::reconstruct::{reconstruct_interface_states, rusanov_flux, InterfaceStates};

use super::{Discretization, MassDiffusion, SpatialError, State, Tendency};

use Parity::{Even, Odd};

/// Ghost-extended conserved variables and face velocities.
#[derive(Debug, Clone)]
pub struct Ghosted {
    pub rho: Padded,
    pub mom: Vec<Padded>,
    pub q: Padded,
    pub vel: Vec<Padded>,
}

/// Mirror-extends a state: densities even across all walls, momenta and
/// velocities odd (no-slip).
pub fn ghost_extend(state: &State, grid: &GridSpec) -> Result<Ghosted, SpatialError> {
    state.check_layout(grid)?;
    let m = grid.m;
    let cl = grid.cell_locs();
    let rho = Padded::extended(&state.rho, m, cl, [Even, Even])?;
    let q = Padded::extended(&state.q, m, cl, [Even, Even])?;
    let vels = state.velocities(grid);
    let mut mom = Vec::with_capacity(grid.dim);
    let mut vel = Vec::with_capacity(grid.dim);
    for (a, &axis) in grid.axes().iter().enumerate() {
        let fl = grid.face_locs(axis);
        mom.push(Padded::extended(&state.mom[a], m, fl, [Odd, Odd])?);
        vel.push(Padded::extended(&vels[a], m, fl, [Odd, Odd])?);
    }
    Ok(Ghosted { rho, mom, q, vel })
}

/// Maps (index along `a`, index along the other axis) to `(i, j)`.
#[inline]
fn ij(a: usize, along: usize, other: usize) -> (usize, usize) {
    if a == 0 {
        (along, other)
    } else {
        (other, along)
    }
}

#[inline]
fn lij(a: usize, along: isize, other: isize) -> (isize, isize) {
    if a == 0 {
        (along, other)
    } else {
        (other, along)
    }
}

/// Local wave speed `|v| + sqrt(p1'(rho))`; a nonpositive reconstructed
/// density drops the acoustic part.
#[inline]
fn wave(params: &ModelParams, v: f64, rho: f64, fallbacks: &mut usize) -> f64 {
    if rho > 0.0 {
        v.abs() + params.sound1(rho)
    } else {
        *fallbacks += 1;
        v.abs()
    }
}

struct Recon {
    minus: Field,
    plus: Field,
}

impl Recon {
    fn of(f: &Padded, axis: crate::gridops::Axis) -> Self {
        let InterfaceStates { minus, plus } = reconstruct_interface_states(f, axis);
        Self { minus, plus }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> (f64, f64) {
        (self.minus.get(i, j), self.plus.get(i, j))
    }
}

/// Explicit convective tendency of `ut`: Rusanov diffusion of the mass flux,
/// the full partial-density flux and the momentum fluxes including the
/// non-stiff pressure `p1`.
pub fn explicit_convection(disc: &Discretization, ut: &State) -> Result<Tendency, SpatialError> {
    let grid = &disc.grid;
    let params = &disc.params;
    let m = grid.m;
    let h = grid.h;
    let g = ghost_extend(ut, grid)?;
    let mut out = State::zeros(grid);
    let mut fallbacks = 0usize;
    let n_cells_other = if grid.dim == 2 { m } else { 1 };
    let flat_or_cell = |o: usize| -> isize {
        if grid.dim == 2 {
            o as isize + 1
        } else {
            0
        }
    };

    for (a, &axis) in grid.axes().iter().enumerate() {
        // Cell quantities across faces normal to `axis`.
        let mut vc = transfer6(&g.vel[a], TransferDir::FaceToCell, axis)?;
        vc.fill_ghosts([Odd, Odd]);
        let qv = g.q.zip_map(&vc, |q, v| q * v);
        let rr = Recon::of(&g.rho, axis);
        let qr = Recon::of(&g.q, axis);
        let vr = Recon::of(&vc, axis);
        let qvr = Recon::of(&qv, axis);
        for o in 0..n_cells_other {
            let ol = flat_or_cell(o);
            let mut prev = (0.0, 0.0);
            for k in 1..=m {
                let flux = if k == m {
                    (0.0, 0.0)
                } else {
                    let (i, j) = ij(a, k, o);
                    let (rm, rp) = rr.at(i, j);
                    let (vm, vp) = vr.at(i, j);
                    let (qm, qp) = qr.at(i, j);
                    let (fm, fp) = qvr.at(i, j);
                    let (d, lam) = match disc.mass_diffusion {
                        MassDiffusion::Reconstructed => {
                            let lam = wave(params, vm, rm, &mut fallbacks)
                                .max(wave(params, vp, rp, &mut fallbacks));
                            (-0.5 * lam * (rp - rm), lam)
                        }
                        MassDiffusion::CellValues => {
                            let (li, lj) = lij(a, k as isize, ol);
                            let (ri, rj) = lij(a, k as isize + 1, ol);
                            let (r0, r1) = (g.rho.at(li, lj), g.rho.at(ri, rj));
                            let lam = wave(params, vc.at(li, lj), r0, &mut fallbacks)
                                .max(wave(params, vc.at(ri, rj), r1, &mut fallbacks));
                            (-0.5 * lam * (r1 - r0), lam)
                        }
                    };
                    (d, rusanov_flux(fm, fp, qm, qp, lam))
                };
                let (ci, cj) = ij(a, k - 1, o);
                out.rho.add(ci, cj, -(flux.0 - prev.0) / h);
                out.q.add(ci, cj, -(flux.1 - prev.1) / h);
                prev = flux;
            }
        }

        // Momentum flux along its own axis, evaluated at cell centers.
        let mut rf = transfer6(&g.rho, TransferDir::CellToFace, axis)?;
        rf.fill_ghosts([Even, Even]);
        let mom = &g.mom[a];
        let vel = &g.vel[a];
        let mut faa = mom.zip_map(vel, |m, v| m * v);
        for (f, &r) in faa.data.iter_mut().zip(&rf.data) {
            *f += params.p1(r);
        }
        let mr = Recon::of(mom, axis);
        let vr = Recon::of(vel, axis);
        let rfr = Recon::of(&rf, axis);
        let fr = Recon::of(&faa, axis);
        let face_hat = |k: usize, o: usize, fb: &mut usize| -> f64 {
            let (i, j) = ij(a, k, o);
            let (mm, mp) = mr.at(i, j);
            let (vm, vp) = vr.at(i, j);
            let (rm, rp) = rfr.at(i, j);
            let (fm, fp) = fr.at(i, j);
            let lam = wave(params, vm, rm, fb).max(wave(params, vp, rp, fb));
            rusanov_flux(fm, fp, mm, mp, lam)
        };
        for o in 0..n_cells_other {
            let mut prev = face_hat(0, o, &mut fallbacks);
            for f in 0..m - 1 {
                let next = face_hat(f + 1, o, &mut fallbacks);
                let (i, j) = ij(a, f, o);
                out.mom[a].add(i, j, -(next - prev) / h);
                prev = next;
            }
        }

        // Momentum flux across the other axis, evaluated at cell corners.
        if grid.dim == 2 {
            let b = 1 - a;
            let baxis = axis.other();
            let mut corner = average_to_faces(&g.vel[b], axis);
            corner.fill_ghosts([Odd, Odd]);
            let mut vba = transfer6(&corner, TransferDir::FaceToCell, baxis)?;
            vba.fill_ghosts([Odd, Odd]);
            debug_assert_eq!(vba.loc[a], Loc::Face);
            let fab = mom.zip_map(&vba, |m, v| m * v);
            let mr = Recon::of(mom, baxis);
            let vr = Recon::of(&vba, baxis);
            let rfr = Recon::of(&rf, baxis);
            let fr = Recon::of(&fab, baxis);
            for f in 0..m - 1 {
                let mut prev = 0.0;
                for k in 0..=m {
                    let (i, j) = ij(b, k, f);
                    let (mm, mp) = mr.at(i, j);
                    let (vm, vp) = vr.at(i, j);
                    let (rm, rp) = rfr.at(i, j);
                    let (fm, fp) = fr.at(i, j);
                    let lam = wave(params, vm, rm, &mut fallbacks)
                        .max(wave(params, vp, rp, &mut fallbacks));
                    let ghat = rusanov_flux(fm, fp, mm, mp, lam);
                    if k > 0 {
                        let (i, j) = ij(a, f, k - 1);
                        out.mom[a].add(i, j, -(ghat - prev) / h);
                    }
                    prev = ghat;
                }
            }
        }
    }
    if fallbacks > 0 {
        log::warn!(
            "{fallbacks} interface states with nonpositive reconstructed density; \
             acoustic viscosity dropped there"
        );
    }
    Ok(out)
}
