//! The closed-form source terms are checked against the continuous
//! equations evaluated by nested eighth-order central differences.

use chns_core::harness::exact::ExactSolution;
use chns_core::harness::forcing::{source_1d, source_2d};
use chns_core::model::ModelParams;

type F<'a> = Box<dyn Fn(f64, f64, f64) -> f64 + 'a>;

const W: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

/// Eighth-order derivative along coordinate `k` (0 = x, 1 = y, 2 = t).
fn deriv<'a>(f: F<'a>, k: usize, h: f64) -> F<'a> {
    Box::new(move |x, y, t| {
        let mut s = 0.0;
        for (r, w) in W.iter().enumerate() {
            let d = (r + 1) as f64 * h;
            let (p, m) = match k {
                0 => (f(x + d, y, t), f(x - d, y, t)),
                1 => (f(x, y + d, t), f(x, y - d, t)),
                _ => (f(x, y, t + d), f(x, y, t - d)),
            };
            s += w * (p - m);
        }
        s / h
    })
}

struct Fields<'a> {
    ex: ExactSolution,
    p: &'a ModelParams,
    h: f64,
}

impl<'a> Fields<'a> {
    fn rho(&self) -> F<'a> {
        let ex = self.ex;
        Box::new(move |x, y, t| ex.eval(x, y, t).rho)
    }
    fn v(&self, a: usize) -> F<'a> {
        let ex = self.ex;
        Box::new(move |x, y, t| ex.eval(x, y, t).v[a])
    }
    fn c(&self) -> F<'a> {
        let ex = self.ex;
        Box::new(move |x, y, t| ex.eval(x, y, t).c)
    }
    fn d(&self, f: F<'a>, k: usize) -> F<'a> {
        deriv(f, k, self.h)
    }
    fn d2(&self, f: F<'a>, k: usize, l: usize) -> F<'a> {
        self.d(self.d(f, k), l)
    }
    fn lap(&self, f: impl Fn() -> F<'a>) -> F<'a> {
        if self.ex.dim == 1 {
            return self.d2(f(), 0, 0);
        }
        let a = self.d2(f(), 0, 0);
        let b = self.d2(f(), 1, 1);
        Box::new(move |x, y, t| a(x, y, t) + b(x, y, t))
    }
    fn pressure(&self) -> F<'a> {
        let (ex, cp, gamma) = (self.ex, self.p.cp, self.p.gamma);
        Box::new(move |x, y, t| cp * ex.eval(x, y, t).rho.powf(gamma))
    }
    fn mu(&self) -> F<'a> {
        let (ex, eps) = (self.ex, self.p.eps);
        let lc = self.lap(|| self.c());
        Box::new(move |x, y, t| {
            let e = ex.eval(x, y, t);
            e.c.powi(3) - e.c - eps / e.rho * lc(x, y, t)
        })
    }
    fn prod(&self, f: F<'a>, g: F<'a>) -> F<'a> {
        Box::new(move |x, y, t| f(x, y, t) * g(x, y, t))
    }
}

/// Residual of the continuous equations minus the source at one point.
fn residual(ex: ExactSolution, p: &ModelParams, h: f64, x: f64, y: f64, t: f64) -> Vec<f64> {
    let f = Fields { ex, p, h };
    let dim = ex.dim;
    let eps = p.eps;
    let e = |g: F<'_>| g(x, y, t);
    let (nu, lam) = (p.nu, p.lambda);
    let gax = dim - 1;
    let mut out = Vec::new();
    let mass: f64 = e(f.d(f.rho(), 2))
        + (0..dim).map(|a| e(f.d(f.prod(f.rho(), f.v(a)), a))).sum::<f64>();
    out.push(mass);
    for a in 0..dim {
        let mut r = e(f.d(f.prod(f.rho(), f.v(a)), 2));
        for b in 0..dim {
            let flux = f.prod(f.prod(f.rho(), f.v(a)), f.v(b));
            r += e(f.d(flux, b));
        }
        r += e(f.d(f.pressure(), a));
        if a == gax {
            r -= e(f.rho()) * p.g;
        }
        // Viscous stress.
        let mut visc = nu * e(f.lap(|| f.v(a)));
        for b in 0..dim {
            visc += (nu + lam) * e(f.d2(f.v(b), b, a));
        }
        r -= visc;
        // Capillary stress divergence: eps * div(|grad c|^2 / 2 I - grad c grad c).
        for b in 0..dim {
            let ca = f.d(f.c(), a);
            let cb = f.d(f.c(), b);
            let outer = f.prod(ca, cb);
            r += eps * e(f.d(outer, b));
        }
        let mut grad2: F<'_> = Box::new(|_, _, _| 0.0);
        for b in 0..dim {
            let cb = f.prod(f.d(f.c(), b), f.d(f.c(), b));
            let prev = grad2;
            grad2 = Box::new(move |x, y, t| prev(x, y, t) + cb(x, y, t));
        }
        r -= 0.5 * eps * e(f.d(grad2, a));
        out.push(r);
    }
    let q = || f.prod(f.rho(), f.c());
    let mut rq = e(f.d(q(), 2));
    for a in 0..dim {
        rq += e(f.d(f.prod(q(), f.v(a)), a));
    }
    rq -= e(f.lap(|| f.mu()));
    out.push(rq);
    let s: Vec<f64> = if dim == 1 {
        source_1d(x, t, p).to_vec()
    } else {
        source_2d(x, y, t, p).to_vec()
    };
    out.iter().zip(&s).map(|(r, s)| r - s).collect()
}

fn params() -> ModelParams {
    let mut p = ModelParams::new(7.0);
    p.gamma = 1.4;
    p.nu = 0.8;
    p.lambda = 0.3;
    p.eps = 0.05;
    p.g = -3.0;
    p
}

fn check(dim: usize, points: &[(f64, f64, f64)]) {
    let p = params();
    let ex = ExactSolution::new(dim, p.delta());
    for &(x, y, t) in points {
        let coarse = residual(ex, &p, 0.04, x, y, t);
        let fine = residual(ex, &p, 0.02, x, y, t);
        let s = if dim == 1 {
            source_1d(x, t, &p).to_vec()
        } else {
            source_2d(x, y, t, &p).to_vec()
        };
        let scale = s.iter().fold(1.0, |m: f64, v| m.max(v.abs()));
        for (k, (c, f)) in coarse.iter().zip(&fine).enumerate() {
            assert!(f.abs() < 1e-6 * scale, "dim {dim} eq {k} at ({x},{y},{t}): {f:e}");
            // Refinement shrinks the residual unless it already sits at round-off.
            assert!(f.abs() <= c.abs().max(1e-8 * scale), "dim {dim} eq {k}: {c:e} -> {f:e}");
        }
    }
}

#[test]
fn one_dimensional_source_satisfies_equations() {
    check(1, &[(0.13, 0.0, 0.2), (0.61, 0.0, 0.05), (0.87, 0.0, 0.9)]);
}

#[test]
fn two_dimensional_source_satisfies_equations() {
    check(2, &[(0.13, 0.37, 0.2), (0.61, 0.71, 0.05), (0.42, 0.88, 0.6)]);
}
