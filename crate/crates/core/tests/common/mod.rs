//! Reference implementations used as test oracles.
//!
//! Linear operators are assembled as dense Kronecker products of the
//! one-dimensional difference matrices; the convective fluxes are recomputed
//! point by point from reflected index maps. Nothing here calls the stencil
//! code under test.

#![allow(dead_code)]

use chns_core::gridops::{Field, GridSpec};
use chns_core::model::ModelParams;
use chns_core::spatial::State;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// One-dimensional matrices

/// Centered difference, `m x m`, one-sided at both ends.
pub fn dc(m: usize, h: f64) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(m, m);
    a[(0, 0)] = -1.0;
    a[(0, 1)] = 1.0;
    for i in 1..m - 1 {
        a[(i, i - 1)] = -1.0;
        a[(i, i + 1)] = 1.0;
    }
    a[(m - 1, m - 2)] = -1.0;
    a[(m - 1, m - 1)] = 1.0;
    a / (2.0 * h)
}

/// Face-to-cell difference, `m x (m-1)`, with boundary weight `w`.
fn dual_w(m: usize, h: f64, w: f64) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(m, m - 1);
    a[(0, 0)] = w;
    for i in 1..m - 1 {
        a[(i, i - 1)] = -1.0;
        a[(i, i)] = 1.0;
    }
    a[(m - 1, m - 2)] = -w;
    a / h
}

pub fn d(m: usize, h: f64) -> DMatrix<f64> {
    dual_w(m, h, 1.0)
}

pub fn dstar(m: usize, h: f64) -> DMatrix<f64> {
    dual_w(m, h, 2.0)
}

/// Neighbour average, `(m-1) x m`.
pub fn avg(m: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(m - 1, m);
    for i in 0..m - 1 {
        a[(i, i)] = 0.5;
        a[(i, i + 1)] = 0.5;
    }
    a
}

/// Operator acting along x (`ax = 0`) or y on an `nx x ny` field stored
/// x-fastest.
pub fn along(ax: usize, op: &DMatrix<f64>, nx: usize, ny: usize) -> DMatrix<f64> {
    if ax == 0 {
        assert_eq!(op.ncols(), nx);
        DMatrix::<f64>::identity(ny, ny).kronecker(op)
    } else {
        assert_eq!(op.ncols(), ny);
        op.kronecker(&DMatrix::<f64>::identity(nx, nx))
    }
}

fn vecf(f: &Field) -> DVector<f64> {
    DVector::from_column_slice(&f.data)
}

fn field(nx: usize, ny: usize, v: &DVector<f64>) -> Field {
    Field::from_vec(nx, ny, v.as_slice().to_vec()).unwrap()
}

/// Shape of the face field of momentum `a`.
pub fn face_shape(g: &GridSpec, a: usize) -> (usize, usize) {
    let m = g.m;
    match (g.dim, a) {
        (1, _) => (m - 1, 1),
        (_, 0) => (m - 1, m),
        _ => (m, m - 1),
    }
}

pub fn cell_shape(g: &GridSpec) -> (usize, usize) {
    if g.dim == 1 {
        (g.m, 1)
    } else {
        (g.m, g.m)
    }
}

/// Dense 2D operators for axis `a` acting on a field of shape `(nx, ny)`.
fn op_on(a: usize, op: impl Fn(usize) -> DMatrix<f64>, nx: usize, ny: usize) -> DMatrix<f64> {
    let n = if a == 0 { nx } else { ny };
    along(a, &op(n), nx, ny)
}

// ---------------------------------------------------------------------------
// Equation of state, written out independently

pub fn p1(p: &ModelParams, r: f64) -> f64 {
    p.cp1 * r.powf(p.gamma)
}

pub fn p2(p: &ModelParams, r: f64) -> f64 {
    (p.cp - p.cp1) * r.powf(p.gamma)
}

pub fn dp2(p: &ModelParams, r: f64) -> f64 {
    p.gamma * (p.cp - p.cp1) * r.powf(p.gamma - 1.0)
}

pub fn s1(p: &ModelParams, r: f64) -> f64 {
    (p.gamma * p.cp1 * r.powf(p.gamma - 1.0)).sqrt()
}

// ---------------------------------------------------------------------------
// Linear parts

pub fn face_velocity(g: &GridSpec, u: &State, a: usize) -> Field {
    let (nx, ny) = cell_shape(g);
    let (fx, fy) = face_shape(g, a);
    let av = op_on(a, avg, nx, ny);
    let rs = &av * vecf(&u.rho);
    Field::from_vec(
        fx,
        fy,
        u.mom[a].data.iter().zip(rs.iter()).map(|(m, r)| m / r).collect(),
    )
    .unwrap()
}

pub fn mass_transport(g: &GridSpec, u: &State) -> Field {
    let (nx, ny) = cell_shape(g);
    let h = g.h;
    let mut out = DVector::zeros(nx * ny);
    for a in 0..g.dim {
        let (fx, fy) = face_shape(g, a);
        let da = op_on(a, |n| d(n + 1, h), fx, fy);
        out -= da * vecf(&u.mom[a]);
    }
    field(nx, ny, &out)
}

/// `(I ⊗ D^T) p2(rho)` per axis, plus `g A rho` on the last axis.
pub fn pressure_gravity(g: &GridSpec, p: &ModelParams, ut: &State, u: &State) -> Vec<Field> {
    let (nx, ny) = cell_shape(g);
    let h = g.h;
    let pr = DVector::from_iterator(nx * ny, u.rho.data.iter().map(|&r| p2(p, r)));
    (0..g.dim)
        .map(|a| {
            let (fx, fy) = face_shape(g, a);
            let dt = op_on(a, |n| d(n, h).transpose(), nx, ny);
            let mut v = dt * &pr;
            if a == g.dim - 1 {
                v += op_on(a, avg, nx, ny) * vecf(&ut.rho) * p.g;
            }
            field(fx, fy, &v)
        })
        .collect()
}

pub fn capillary(g: &GridSpec, p: &ModelParams, ut: &State) -> Vec<Field> {
    let (nx, ny) = cell_shape(g);
    let h = g.h;
    let c = DVector::from_iterator(nx * ny, ut.q.data.iter().zip(&ut.rho.data).map(|(q, r)| q / r));
    let grads: Vec<DVector<f64>> = (0..g.dim)
        .map(|a| op_on(a, |n| dc(n, h), nx, ny) * &c)
        .collect();
    let sq: Vec<DVector<f64>> = grads.iter().map(|v| v.component_mul(v)).collect();
    (0..g.dim)
        .map(|a| {
            let (fx, fy) = face_shape(g, a);
            let dta = op_on(a, |n| d(n, h).transpose(), nx, ny);
            let mut v = &dta * &sq[a] * 0.5;
            if g.dim == 2 {
                let b = 1 - a;
                v -= &dta * &sq[b] * 0.5;
                // c_a on a-faces, averaged along b; c_b on b-faces averaged along a.
                let ca = -(&dta * &c);
                let ca = op_on(b, avg, fx, fy) * ca;
                let (bx, by) = face_shape(g, b);
                let cb = -(op_on(b, |n| d(n, h).transpose(), nx, ny) * &c);
                let cb = op_on(a, avg, bx, by) * cb;
                let z = ca.component_mul(&cb);
                let (zx, zy) = if a == 0 { (fx, fy - 1) } else { (fx - 1, fy) };
                v -= op_on(b, |n| d(n + 1, h), zx, zy) * z;
            }
            field(fx, fy, &(v * p.eps))
        })
        .collect()
}

/// Neumann Laplacian `-sum_a D_a D_a^T`.
pub fn laplacian(g: &GridSpec) -> DMatrix<f64> {
    let (nx, ny) = cell_shape(g);
    let h = g.h;
    let mut l = DMatrix::zeros(nx * ny, nx * ny);
    for a in 0..g.dim {
        let dd = op_on(a, |n| -(d(n, h) * d(n, h).transpose()), nx, ny);
        l += dd;
    }
    l
}

pub fn concave(g: &GridSpec, c: &Field) -> Field {
    let (nx, ny) = cell_shape(g);
    let h = g.h;
    let cv = vecf(c);
    let k = cv.map(|c| 3.0 * c * c - 3.0);
    let mut out = DVector::zeros(nx * ny);
    for a in 0..g.dim {
        let (fx, fy) = face_shape(g, a);
        let grad = -(op_on(a, |n| d(n, h).transpose(), nx, ny) * &cv);
        let kf = op_on(a, avg, nx, ny) * &k;
        out += op_on(a, |n| d(n + 1, h), fx, fy) * kf.component_mul(&grad);
    }
    field(nx, ny, &out)
}

pub fn ch_implicit(g: &GridSpec, eps: f64, rho: &Field, c: &Field) -> Field {
    let (nx, ny) = cell_shape(g);
    let l = laplacian(g);
    let lc = &l * vecf(c);
    let inner = lc.component_div(&vecf(rho));
    let out = &lc * 2.0 - (&l * inner) * eps;
    field(nx, ny, &out)
}

/// Dense viscous blocks `B[a][b]`; the viscous tendency is `-B V`.
pub fn viscous_blocks(g: &GridSpec, p: &ModelParams) -> Vec<Vec<DMatrix<f64>>> {
    let h = g.h;
    let (nu, lam) = (p.nu, p.lambda);
    let mut blocks = vec![Vec::new(); g.dim];
    for a in 0..g.dim {
        let (fx, fy) = face_shape(g, a);
        for b in 0..g.dim {
            let blk = if a == b {
                let na = if a == 0 { fx } else { fy };
                let normal = d(na + 1, h).transpose() * d(na + 1, h);
                let mut blk = along(a, &normal, fx, fy) * (2.0 * nu + lam);
                if g.dim == 2 {
                    let o = 1 - a;
                    let no = if o == 0 { fx } else { fy };
                    let tang = d(no + 1, h).transpose() * dstar(no + 1, h);
                    blk += along(o, &tang, fx, fy) * nu;
                }
                blk
            } else {
                let (bx, by) = face_shape(g, b);
                let nb_a = if a == 0 { bx } else { by };
                let ga = along(a, &d(nb_a, h).transpose(), bx, by);
                let (gx, gy) = if a == 0 { (bx - 1, by) } else { (bx, by - 1) };
                let nb = if b == 0 { gx } else { gy };
                along(b, &d(nb + 1, h), gx, gy) * ga * (nu + lam)
            };
            blocks[a].push(blk);
        }
    }
    blocks
}

pub fn viscous(g: &GridSpec, p: &ModelParams, v: &[Field]) -> Vec<Field> {
    let b = viscous_blocks(g, p);
    (0..g.dim)
        .map(|a| {
            let (fx, fy) = face_shape(g, a);
            let mut out = DVector::zeros(fx * fy);
            for (bb, vb) in v.iter().enumerate() {
                out -= &b[a][bb] * vecf(vb);
            }
            field(fx, fy, &out)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Hydro stage system

pub fn hydro_residual(g: &GridSpec, p: &ModelParams, a: f64, r: &[f64], z: &[f64]) -> DVector<f64> {
    let (nx, ny) = cell_shape(g);
    let nc = nx * ny;
    let rho = DVector::from_column_slice(&z[..nc]);
    let pr = rho.map(|r| p2(p, r));
    let blocks = viscous_blocks(g, p);
    let mut offs = vec![nc];
    for ax in 0..g.dim {
        let (fx, fy) = face_shape(g, ax);
        offs.push(offs[ax] + fx * fy);
    }
    let vb = |ax: usize| DVector::from_column_slice(&z[offs[ax]..offs[ax + 1]]);
    let mut out = DVector::zeros(z.len());
    let mut top = rho.clone();
    for ax in 0..g.dim {
        let (fx, fy) = face_shape(g, ax);
        let rs = op_on(ax, avg, nx, ny) * &rho;
        let m = rs.component_mul(&vb(ax));
        top += op_on(ax, |n| d(n + 1, g.h), fx, fy) * &m * a;
        let mut row = m - op_on(ax, |n| d(n, g.h).transpose(), nx, ny) * &pr * a;
        for bx in 0..g.dim {
            row += &blocks[ax][bx] * vb(bx) * a;
        }
        out.rows_mut(offs[ax], fx * fy).copy_from(&row);
    }
    out.rows_mut(0, nc).copy_from(&top);
    out - DVector::from_column_slice(r)
}

pub fn hydro_jacobian(g: &GridSpec, p: &ModelParams, a: f64, z: &[f64]) -> DMatrix<f64> {
    let (nx, ny) = cell_shape(g);
    let nc = nx * ny;
    let n = z.len();
    let rho = DVector::from_column_slice(&z[..nc]);
    let blocks = viscous_blocks(g, p);
    let mut offs = vec![nc];
    for ax in 0..g.dim {
        let (fx, fy) = face_shape(g, ax);
        offs.push(offs[ax] + fx * fy);
    }
    let mut j = DMatrix::zeros(n, n);
    let mut rr = DMatrix::<f64>::identity(nc, nc);
    for ax in 0..g.dim {
        let (fx, fy) = face_shape(g, ax);
        let nf = fx * fy;
        let v = DVector::from_column_slice(&z[offs[ax]..offs[ax + 1]]);
        let av = op_on(ax, avg, nx, ny);
        let dv = op_on(ax, |n| d(n + 1, g.h), fx, fy);
        let rs = &av * &rho;
        rr += &dv * DMatrix::from_diagonal(&v) * &av * a;
        j.view_mut((0, offs[ax]), (nc, nf))
            .copy_from(&(&dv * DMatrix::from_diagonal(&rs) * a));
        let dt = op_on(ax, |n| d(n, g.h).transpose(), nx, ny);
        let left = DMatrix::from_diagonal(&v) * &av
            - dt * DMatrix::from_diagonal(&rho.map(|r| dp2(p, r))) * a;
        j.view_mut((offs[ax], 0), (nf, nc)).copy_from(&left);
        for bx in 0..g.dim {
            let (gx, gy) = face_shape(g, bx);
            let mut blk = &blocks[ax][bx] * a;
            if ax == bx {
                blk += DMatrix::from_diagonal(&rs);
            }
            j.view_mut((offs[ax], offs[bx]), (nf, gx * gy)).copy_from(&blk);
        }
    }
    j.view_mut((0, 0), (nc, nc)).copy_from(&rr);
    j
}

// ---------------------------------------------------------------------------
// Convection, point by point

const MU: [f64; 6] = [3.0, -25.0, 150.0, 150.0, -25.0, 3.0];

#[derive(Clone, Copy, PartialEq, Debug)]
enum K {
    Cell,
    Face,
    Flat,
}

/// Logically indexed array over the ghost-padded range.
#[derive(Clone)]
struct Arr {
    lo: [isize; 2],
    n: [usize; 2],
    v: Vec<f64>,
}

const G: isize = 3;

fn range(k: K, m: usize) -> (isize, isize) {
    let m = m as isize;
    match k {
        K::Cell => (1 - G, m + G),
        K::Face => (-G, m + G),
        K::Flat => (0, 0),
    }
}

/// Reflects a logical index into the owned range; returns the index and
/// whether it crossed a wall.
fn reflect(k: K, m: usize, i: isize) -> (isize, bool) {
    let m = m as isize;
    match k {
        K::Cell if i < 1 => (1 - i, true),
        K::Cell if i > m => (2 * m + 1 - i, true),
        K::Face if i < 0 => (-i, true),
        K::Face if i > m => (2 * m - i, true),
        K::Flat => (0, false),
        _ => (i, false),
    }
}

impl Arr {
    /// Evaluates `f` on the owned range and mirrors into the ghosts with
    /// sign `sgn` per axis (`-1` also zeroes wall faces).
    fn extend(kinds: [K; 2], sgn: [f64; 2], m: usize, f: impl Fn(isize, isize) -> f64) -> Self {
        let (l0, h0) = range(kinds[0], m);
        let (l1, h1) = range(kinds[1], m);
        let n = [(h0 - l0 + 1) as usize, (h1 - l1 + 1) as usize];
        let mut v = vec![0.0; n[0] * n[1]];
        let mi = m as isize;
        for j in l1..=h1 {
            for i in l0..=h0 {
                let (ri, ci) = reflect(kinds[0], m, i);
                let (rj, cj) = reflect(kinds[1], m, j);
                let wall = |k: K, r: isize, s: f64| k == K::Face && s < 0.0 && (r == 0 || r == mi);
                let val = if wall(kinds[0], ri, sgn[0]) || wall(kinds[1], rj, sgn[1]) {
                    0.0
                } else {
                    let mut s = 1.0;
                    if ci {
                        s *= sgn[0];
                    }
                    if cj {
                        s *= sgn[1];
                    }
                    s * f(ri, rj)
                };
                v[(i - l0) as usize + n[0] * (j - l1) as usize] = val;
            }
        }
        Self { lo: [l0, l1], n, v }
    }

    fn at(&self, i: isize, j: isize) -> f64 {
        let a = (i - self.lo[0]) as usize;
        let b = (j - self.lo[1]) as usize;
        assert!(a < self.n[0] && b < self.n[1], "index ({i}, {j}) outside padded range");
        self.v[a + self.n[0] * b]
    }

    fn zip(&self, o: &Arr, f: impl Fn(f64, f64) -> f64) -> Arr {
        assert_eq!(self.n, o.n);
        Arr {
            lo: self.lo,
            n: self.n,
            v: self.v.iter().zip(&o.v).map(|(a, b)| f(*a, *b)).collect(),
        }
    }
}

fn weno(a: f64, b: f64, c: f64, d: f64, e: f64) -> f64 {
    let b0 = 13.0 / 12.0 * (a - 2.0 * b + c).powi(2) + 0.25 * (a - 4.0 * b + 3.0 * c).powi(2);
    let b1 = 13.0 / 12.0 * (b - 2.0 * c + d).powi(2) + 0.25 * (b - d).powi(2);
    let b2 = 13.0 / 12.0 * (c - 2.0 * d + e).powi(2) + 0.25 * (3.0 * c - 4.0 * d + e).powi(2);
    let q0 = (2.0 * a - 7.0 * b + 11.0 * c) / 6.0;
    let q1 = (-b + 5.0 * c + 2.0 * d) / 6.0;
    let q2 = (2.0 * c + 5.0 * d - e) / 6.0;
    let w0 = 0.1 / (1e-6 + b0).powi(2);
    let w1 = 0.6 / (1e-6 + b1).powi(2);
    let w2 = 0.3 / (1e-6 + b2).powi(2);
    (w0 * q0 + w1 * q1 + w2 * q2) / (w0 + w1 + w2)
}

/// `(left, right)` states at the interface between samples `k` and `k+1`
/// along axis `ax`; `o` is the index on the other axis.
fn lr(f: &Arr, ax: usize, k: isize, o: isize) -> (f64, f64) {
    let s = |t: isize| if ax == 0 { f.at(k + t, o) } else { f.at(o, k + t) };
    (
        weno(s(-2), s(-1), s(0), s(1), s(2)),
        weno(s(3), s(2), s(1), s(0), s(-1)),
    )
}

fn rus(fm: f64, fp: f64, um: f64, up: f64, lam: f64) -> f64 {
    0.5 * (fm + fp) - 0.5 * lam * (up - um)
}

fn ix(ax: usize, along: isize, other: isize) -> (isize, isize) {
    if ax == 0 {
        (along, other)
    } else {
        (other, along)
    }
}

/// Explicit convective tendency recomputed from scratch.
pub fn convection(g: &GridSpec, p: &ModelParams, ut: &State) -> State {
    let m = g.m;
    let mi = m as isize;
    let h = g.h;
    let ky = if g.dim == 1 { K::Flat } else { K::Cell };
    let cell_kinds = [K::Cell, ky];
    let face_kinds = |a: usize| if a == 0 { [K::Face, ky] } else { [K::Cell, K::Face] };
    let odd = [-1.0, -1.0];
    let even = [1.0, 1.0];
    let jy = |j: isize| if g.dim == 1 { 0 } else { (j - 1) as usize };

    let rho = Arr::extend(cell_kinds, even, m, |i, j| ut.rho.get((i - 1) as usize, jy(j)));
    let q = Arr::extend(cell_kinds, even, m, |i, j| ut.q.get((i - 1) as usize, jy(j)));
    // Face data: logical face k stored at k - 1 along its own axis.
    let face_get = |f: &Field, a: usize, i: isize, j: isize| -> f64 {
        if a == 0 {
            f.get((i - 1) as usize, jy(j))
        } else {
            f.get((i - 1) as usize, (j - 1) as usize)
        }
    };
    let mut mom = Vec::new();
    let mut vel = Vec::new();
    for a in 0..g.dim {
        let mf = &ut.mom[a];
        mom.push(Arr::extend(face_kinds(a), odd, m, |i, j| face_get(mf, a, i, j)));
        vel.push(Arr::extend(face_kinds(a), odd, m, |i, j| {
            let r = if a == 0 {
                0.5 * (rho.at(i, j) + rho.at(i + 1, j))
            } else {
                0.5 * (rho.at(i, j) + rho.at(i, j + 1))
            };
            face_get(mf, a, i, j) / r
        }));
    }

    let mut out = State::zeros(g);
    let wave = |v: f64, r: f64| v.abs() + s1(p, r);
    let others: Vec<isize> = if g.dim == 1 { vec![0] } else { (1..=mi).collect() };

    for a in 0..g.dim {
        // Face velocity moved to cells along `a`.
        let vc = Arr::extend(cell_kinds, odd, m, |i, j| {
            (0..6)
                .map(|t| {
                    let off = t as isize - 3;
                    let (si, sj) = if a == 0 { (i + off, j) } else { (i, j + off) };
                    MU[t] * vel[a].at(si, sj)
                })
                .sum::<f64>()
                / 256.0
        });
        let qv = q.zip(&vc, |a, b| a * b);
        for &o in &others {
            let mut prev = (0.0, 0.0);
            for k in 1..=mi {
                let fl = if k == mi {
                    (0.0, 0.0)
                } else {
                    let (rm, rp) = lr(&rho, a, k, o);
                    let (vm, vp) = lr(&vc, a, k, o);
                    let (qm, qp) = lr(&q, a, k, o);
                    let (fm, fp) = lr(&qv, a, k, o);
                    let lam = wave(vm, rm).max(wave(vp, rp));
                    (-0.5 * lam * (rp - rm), rus(fm, fp, qm, qp, lam))
                };
                let (ci, cj) = ix(a, k - 1, (o - 1).max(0));
                let (ci, cj) = (ci as usize, cj as usize);
                out.rho.add(ci, cj, -(fl.0 - prev.0) / h);
                out.q.add(ci, cj, -(fl.1 - prev.1) / h);
                prev = fl;
            }
        }

        // Density moved to faces along `a`.
        let fk = face_kinds(a);
        let rf = Arr::extend(fk, even, m, |i, j| {
            (0..6)
                .map(|t| {
                    let off = t as isize - 2;
                    let (si, sj) = if a == 0 { (i + off, j) } else { (i, j + off) };
                    MU[t] * rho.at(si, sj)
                })
                .sum::<f64>()
                / 256.0
        });
        let mv = mom[a].zip(&vel[a], |m, v| m * v);
        let faa = mv.zip(&rf, |x, r| x + p1(p, r));
        let fhat = |k: isize, o: isize| {
            let (mm, mp) = lr(&mom[a], a, k, o);
            let (vm, vp) = lr(&vel[a], a, k, o);
            let (rm, rp) = lr(&rf, a, k, o);
            let (fm, fp) = lr(&faa, a, k, o);
            rus(fm, fp, mm, mp, wave(vm, rm).max(wave(vp, rp)))
        };
        for &o in &others {
            for f in 1..mi {
                let val = -(fhat(f, o) - fhat(f - 1, o)) / h;
                let (i, j) = ix(a, f - 1, (o - 1).max(0));
                out.mom[a].add(i as usize, j as usize, val);
            }
        }

        if g.dim == 2 {
            let b = 1 - a;
            // v_b averaged along a onto the a-faces, at b-faces.
            let corner = Arr::extend([K::Face, K::Face], odd, m, |i, j| {
                let (di, dj) = ix(a, 1, 0);
                0.5 * (vel[b].at(i, j) + vel[b].at(i + di, j + dj))
            });
            // ... then moved to cells along b.
            let vba = Arr::extend(fk, odd, m, |i, j| {
                (0..6)
                    .map(|t| {
                        let off = t as isize - 3;
                        let (si, sj) = if b == 0 { (i + off, j) } else { (i, j + off) };
                        MU[t] * corner.at(si, sj)
                    })
                    .sum::<f64>()
                    / 256.0
            });
            let fab = mom[a].zip(&vba, |m, v| m * v);
            for f in 1..mi {
                let ghat = |k: isize| {
                    let (mm, mp) = lr(&mom[a], b, k, f);
                    let (vm, vp) = lr(&vba, b, k, f);
                    let (rm, rp) = lr(&rf, b, k, f);
                    let (fm, fp) = lr(&fab, b, k, f);
                    rus(fm, fp, mm, mp, wave(vm, rm).max(wave(vp, rp)))
                };
                for k in 1..=mi {
                    let val = -(ghat(k) - ghat(k - 1)) / h;
                    let (i, j) = ix(a, f - 1, k - 1);
                    out.mom[a].add(i as usize, j as usize, val);
                }
            }
        }
    }
    out
}

/// Full right-hand side of the semi-discrete system with both arguments.
pub fn total_rhs(g: &GridSpec, p: &ModelParams, ut: &State, u: &State) -> State {
    let mut out = convection(g, p, ut);
    out.rho.axpy(1.0, &mass_transport(g, u));
    let pg = pressure_gravity(g, p, ut, u);
    let cap = capillary(g, p, ut);
    let vel: Vec<Field> = (0..g.dim).map(|a| face_velocity(g, u, a)).collect();
    let visc = viscous(g, p, &vel);
    for a in 0..g.dim {
        out.mom[a].axpy(1.0, &pg[a]);
        out.mom[a].axpy(1.0, &cap[a]);
        out.mom[a].axpy(1.0, &visc[a]);
    }
    let ct = ut.q.zip_map(&ut.rho, |q, r| q / r);
    let c = u.q.zip_map(&u.rho, |q, r| q / r);
    out.q.axpy(1.0, &concave(g, &ct));
    out.q.axpy(1.0, &ch_implicit(g, p.eps, &u.rho, &c));
    out
}

// ---------------------------------------------------------------------------
// Random data

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Smooth-ish random state with density in `[0.8, 1.2]`, velocities of
/// size `vel` and concentration in `[-0.9, 0.9]`.
pub fn random_state(g: &GridSpec, rng: &mut impl Rng, vel: f64) -> State {
    let mut s = State::zeros(g);
    for r in s.rho.data.iter_mut() {
        *r = rng.random_range(0.8..1.2);
    }
    for (q, r) in s.q.data.iter_mut().zip(&s.rho.data) {
        *q = r * rng.random_range(-0.9..0.9);
    }
    for mf in s.mom.iter_mut() {
        for v in mf.data.iter_mut() {
            *v = vel * rng.random_range(-1.0..1.0);
        }
    }
    s
}

pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let scale = a.iter().chain(b).fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

pub fn state_rel_diff(a: &State, b: &State) -> f64 {
    a.components()
        .zip(b.components())
        .map(|(x, y)| max_rel_diff(&x.data, &y.data))
        .fold(0.0, f64::max)
}
