//! Manufactured-solution source terms. Generated by
//! `crates/core/tools/gen_forcing.py`; do not edit by hand.

#![allow(clippy::all, unused_parens, non_snake_case)]

use std::f64::consts::PI;

use crate::model::ModelParams;

/// Source `[S_rho, S_m, S_q]` of the one-dimensional exact solution.
pub fn source_1d(x: f64, t: f64, p: &ModelParams) -> [f64; 3] {
    let delta = 1.0 / p.cp;
    let cp = p.cp;
    let gamma = p.gamma;
    let nu = p.nu;
    let lam = p.lambda;
    let eps = p.eps;
    let g = p.g;
    let _ = (delta, cp, gamma, nu, lam, eps, g);
    let x0 = (PI * x);
    let x1 = (2.0 * x0);
    let x2 = (delta * x1.cos());
    let x3 = (1.0 + t);
    let x4 = (x2 * x3);
    let x5 = (1.0 + x4);
    let x6 = x0.sin();
    let x7 = x0.cos();
    let x8 = (-1.0 + delta);
    let x9 = (-1.0 + t);
    let x10 = x5.recip();
    let x11 = x1.sin();
    let x12 = (x11 * x3 * delta);
    let x13 = (2.0 * x7 * x9);
    let x14 = PI.powi(2);
    let x15 = (400.0 * x7);
    let x16 = (15.0 + (x13 * x8));
    let x17 = (x14 * eps);
    let x18 = (x8 * x9);
    let x19 = (1600.0 * x17 * x5.powi(-2));
    [x2, ((-1.0 * x5 * g) + (-2.0 * PI * x10 * x12 * cp * gamma * x5.powf(gamma)) + ((1.0 / 100.0) * x6 * x7 * eps * PI.powi(3) * x8.powi(2) * x9.powi(2))), (((-1.0 / 20.0) * x2 * (-15.0 + (-1.0 * x13 * x8))) + ((-1.0 / 4000.0) * x14 * x18 * (x15 + (-3.0 * x7 * x16.powi(2)) + (x19 * x4 * x7) + (-1.0 * x10 * x15 * x17) + (-1.0 * x12 * x19 * x6) + (12.0 * x16 * x18 * x6.powi(2)) + (3200.0 * x17 * x7 * x11.powi(2) * x3.powi(2) * x5.powi(-3) * delta.powi(2)))) + ((1.0 / 10.0) * x5 * x7 * x8))]
}

/// Source `[S_rho, S_m1, S_m2, S_q]` of the two-dimensional exact solution.
pub fn source_2d(x: f64, y: f64, t: f64, p: &ModelParams) -> [f64; 4] {
    let delta = 1.0 / p.cp;
    let cp = p.cp;
    let gamma = p.gamma;
    let nu = p.nu;
    let lam = p.lambda;
    let eps = p.eps;
    let g = p.g;
    let _ = (delta, cp, gamma, nu, lam, eps, g);
    let x0 = (PI * y);
    let x1 = x0.cos();
    let x2 = (PI * x);
    let x3 = (2.0 * x2);
    let x4 = x3.cos();
    let x5 = (x1 * x4);
    let x6 = x0.sin();
    let x7 = (1.0 + t);
    let x8 = (x4 * x7);
    let x9 = (x6 * x8);
    let x10 = (1.0 + delta);
    let x11 = (-1.0 + (2.0 * t.powi(2)));
    let x12 = (x10 * x11);
    let x13 = (2.0 * x0);
    let x14 = x13.cos();
    let x15 = (-1.0 + x14);
    let x16 = x3.sin();
    let x17 = (x15 * x16);
    let x18 = (PI * x17);
    let x19 = (x12 * x18 * x9);
    let x20 = (-1.0 + x4);
    let x21 = x13.sin();
    let x22 = (x12 * x20 * x21);
    let x23 = (2.0 * PI * x16);
    let x24 = (x1 * x7);
    let x25 = (x23 * x24);
    let x26 = PI.powi(2);
    let x27 = (2.0 * x4);
    let x28 = (x5 * delta);
    let x29 = (x28 * x7);
    let x30 = (1.0 + x29);
    let x31 = PI.powi(3);
    let x32 = x2.sin();
    let x33 = x2.cos();
    let x34 = (-1.0 + t);
    let x35 = x34.powi(2);
    let x36 = (-1.0 + delta);
    let x37 = (-1.0 * x36);
    let x38 = x37.powi(2);
    let x39 = x6.powi(2);
    let x40 = x1.powi(2);
    let x41 = (x32 * eps);
    let x42 = ((1.0 / 100.0) * x31 * x35 * x38);
    let x43 = x10.powi(2);
    let x44 = x11.powi(2);
    let x45 = (x43 * x44);
    let x46 = (x23 * x21.powi(2));
    let x47 = (x20 * x30 * x45);
    let x48 = x30.recip();
    let x49 = (x48 * cp * gamma * x30.powf(gamma));
    let x50 = (2.0 * x14);
    let x51 = (4.0 * x10 * x16);
    let x52 = (x15 * x30);
    let x53 = x32.powi(2);
    let x54 = x33.powi(2);
    let x55 = x16.powi(2);
    let x56 = (x45 * x55);
    let x57 = (PI * x9 * delta);
    let x58 = (PI * x21);
    let x59 = (x1 * x34);
    let x60 = (2.0 * x33 * x59);
    let x61 = (-15.0 + (x37 * x60));
    let x62 = (200.0 * x61);
    let x63 = (400.0 * x1);
    let x64 = (15.0 + (x36 * x60));
    let x65 = (3.0 * x64.powi(2));
    let x66 = (800.0 * eps);
    let x67 = (x48 * x66);
    let x68 = (x1 * x26);
    let x69 = (x34 * x36);
    let x70 = (12.0 * x64);
    let x71 = (1600.0 * x39 * eps);
    let x72 = x30.powi(-2);
    let x73 = (x72 * delta);
    let x74 = (x26 * x73 * x8);
    let x75 = (x30.powi(-3) * x7.powi(2) * delta.powi(2));
    let x76 = (x26 * x33);
    let x77 = (x36 * x59);
    let x78 = (x76 * eps);
    [(delta * (x19 + x5 + (-1.0 * x22 * x25))), ((-1.0 * x46 * x47) + (-1.0 * x18 * x47 * x50) + (-1.0 * x25 * x49 * delta) + (-1.0 * x33 * x41 * x42 * (x39 + (-1.0 * x40))) + (-1.0 * x24 * x45 * x46 * delta * x20.powi(2)) + (4.0 * x10 * x20 * x21 * x30 * t) + (4.0 * x10 * x11 * x21 * x26 * nu * (-1.0 + x27)) + (x1 * x10 * x11 * x20 * x21 * x4 * delta) + ((1.0 / 100.0) * x31 * x32 * x33 * x35 * x38 * eps * (x39 + x40)) + (PI * x15 * x16 * x20 * x21 * x4 * x43 * x44 * x6 * x7 * delta)), ((-1.0 * x30 * g) + (-1.0 * x49 * x57) + (-1.0 * x12 * x17 * x28) + (-1.0 * x51 * x52 * t) + (-1.0 * x56 * x57 * x15.powi(2)) + (-2.0 * x52 * x56 * x58) + (-1.0 * x15 * x27 * x47 * x58) + (-1.0 * x1 * x42 * x6 * eps * (x53 + (-1.0 * x54))) + (-1.0 * x11 * x26 * x51 * nu * (-1.0 + x50)) + ((1.0 / 100.0) * x1 * x31 * x35 * x38 * x6 * eps * (x53 + x54)) + (2.0 * PI * x1 * x15 * x20 * x21 * x43 * x44 * x55 * x7 * delta)), (((-1.0 / 4000.0) * x28 * x62) + ((-1.0 / 4000.0) * x19 * x62 * delta) + ((-1.0 / 4000.0) * x26 * x77 * ((400.0 * x33) + (-1.0 * x33 * x65) + (-1.0 * x67 * x76) + (x53 * x70 * x77) + (3200.0 * x29 * x72 * x78) + (6400.0 * x40 * x55 * x75 * x78) + (-3200.0 * x16 * x41 * x68 * x7 * x73))) + ((-1.0 / 4000.0) * x69 * x76 * (x63 + (-1.0 * x1 * x65) + (-1.0 * x67 * x68) + (-1.0 * x71 * x74) + (x40 * x66 * x74) + (x33 * x39 * x69 * x70) + (x68 * x71 * x75 * x4.powi(2)))) + ((1.0 / 10.0) * x1 * x30 * x33 * x36) + ((-1.0 / 4000.0) * PI * x22 * x30 * x32 * x34 * x36 * x63) + ((1.0 / 10.0) * PI * x1 * x10 * x11 * x16 * x20 * x21 * x61 * x7 * delta) + ((1.0 / 10.0) * PI * x10 * x11 * x15 * x16 * x30 * x33 * x34 * x36 * x6))]
}
