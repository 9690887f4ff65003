//! Fifth-order WENO reconstruction of interface states and the Rusanov
//! numerical flux.

use crate::gridops::{Axis, Field, Loc, Padded};

/// Regularization in the nonlinear weights.
pub const WENO_EPS: f64 = 1e-6;

/// Linear weights of the three candidate stencils.
pub const WENO_LINEAR: [f64; 3] = [0.1, 0.6, 0.3];

/// Smoothness indicators of the three candidate stencils.
#[inline]
pub fn smoothness(f: &[f64; 5]) -> [f64; 3] {
    let c = 13.0 / 12.0;
    let b0 = c * (f[0] - 2.0 * f[1] + f[2]).powi(2) + 0.25 * (f[0] - 4.0 * f[1] + 3.0 * f[2]).powi(2);
    let b1 = c * (f[1] - 2.0 * f[2] + f[3]).powi(2) + 0.25 * (f[1] - f[3]).powi(2);
    let b2 = c * (f[2] - 2.0 * f[3] + f[4]).powi(2) + 0.25 * (3.0 * f[2] - 4.0 * f[3] + f[4]).powi(2);
    [b0, b1, b2]
}

/// Normalized nonlinear weights.
#[inline]
pub fn weights(f: &[f64; 5]) -> [f64; 3] {
    let b = smoothness(f);
    let a = [
        WENO_LINEAR[0] / (WENO_EPS + b[0]).powi(2),
        WENO_LINEAR[1] / (WENO_EPS + b[1]).powi(2),
        WENO_LINEAR[2] / (WENO_EPS + b[2]).powi(2),
    ];
    let s = a[0] + a[1] + a[2];
    [a[0] / s, a[1] / s, a[2] / s]
}

/// Third-order candidate values at the right edge of `f[2]`.
#[inline]
pub fn candidates(f: &[f64; 5]) -> [f64; 3] {
    [
        (2.0 * f[0] - 7.0 * f[1] + 11.0 * f[2]) / 6.0,
        (-f[1] + 5.0 * f[2] + 2.0 * f[3]) / 6.0,
        (2.0 * f[2] + 5.0 * f[3] - f[4]) / 6.0,
    ]
}

/// The underlying linear fifth-order reconstruction (ideal weights).
#[inline]
pub fn linear5(f: &[f64; 5]) -> f64 {
    let p = candidates(f);
    WENO_LINEAR[0] * p[0] + WENO_LINEAR[1] * p[1] + WENO_LINEAR[2] * p[2]
}

/// Value at the right edge of the sample `f[2]` from averages `f[0..5]`.
#[inline]
pub fn weno5(f: &[f64; 5]) -> f64 {
    let w = weights(f);
    let p = candidates(f);
    w[0] * p[0] + w[1] * p[1] + w[2] * p[2]
}

/// Left and right states at the interface between samples `k` and `k+1` of
/// `line`, which must provide indices `k-2..=k+3`.
#[inline]
pub fn interface_pair(line: impl Fn(isize) -> f64, k: isize) -> (f64, f64) {
    let left = weno5(&[line(k - 2), line(k - 1), line(k), line(k + 1), line(k + 2)]);
    let right = weno5(&[line(k + 3), line(k + 2), line(k + 1), line(k), line(k - 1)]);
    (left, right)
}

/// Interface states along one axis. `minus` is the state reconstructed from
/// the lower-index side, `plus` from the upper-index side.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceStates {
    pub minus: Field,
    pub plus: Field,
}

/// Number of interfaces along an axis carrying samples of kind `loc`.
fn interfaces(loc: Loc, m: usize) -> usize {
    match loc {
        Loc::Cell => m + 1,
        Loc::Face => m,
        Loc::Flat => 1,
    }
}

/// Reconstructs interface states of a ghost-extended array along `axis`.
///
/// For cell samples the interfaces are the faces `0..=M` (walls included);
/// for face samples they are the cell centers `1..=M`. Along the other axis
/// the interior samples are used. Output index `k` along `axis` is the
/// interface between logical samples `k` and `k+1`: face `k` for cell data,
/// cell center `k+1` for face data.
pub fn reconstruct_interface_states(f: &Padded, axis: Axis) -> InterfaceStates {
    let a = axis.index();
    let m = f.m;
    let loc = f.loc[a];
    let oloc = f.loc[1 - a];
    let n_if = interfaces(loc, m);
    let n_o = oloc.interior_len(m);
    let (nx, ny) = if a == 0 { (n_if, n_o) } else { (n_o, n_if) };
    let mut minus = Field::zeros(nx, ny);
    let mut plus = Field::zeros(nx, ny);
    for o in 0..n_o {
        let ol = oloc.logical(o);
        for k in 0..n_if {
            let kl = k as isize;
            let (l, r) = if a == 0 {
                interface_pair(|t| f.at(t, ol), kl)
            } else {
                interface_pair(|t| f.at(ol, t), kl)
            };
            let (i, j) = if a == 0 { (k, o) } else { (o, k) };
            minus.set(i, j, l);
            plus.set(i, j, r);
        }
    }
    InterfaceStates { minus, plus }
}

/// Rusanov flux `(F(u-) + F(u+))/2 - (alpha/2)(u+ - u-)`.
#[inline]
pub fn rusanov_flux(f_minus: f64, f_plus: f64, u_minus: f64, u_plus: f64, alpha: f64) -> f64 {
    0.5 * (f_minus + f_plus) - 0.5 * alpha * (u_plus - u_minus)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_data_reproduced() {
        assert!((weno5(&[2.0; 5]) - 2.0).abs() < 1e-15);
        let w = weights(&[2.0; 5]);
        for k in 0..3 {
            assert!((w[k] - WENO_LINEAR[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_averages_give_edge_value() {
        // Cell averages of x on unit cells [k, k+1] are k + 1/2; the right
        // edge of cell 2 sits at x = 3.
        let f = [0.5, 1.5, 2.5, 3.5, 4.5];
        assert!((weno5(&f) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rusanov_consistency() {
        assert_eq!(rusanov_flux(1.5, 1.5, 2.0, 2.0, 7.0), 1.5);
    }
}
