"""Generate the manufactured-solution source terms as Rust code.

Run from the repository root:

    python3 crates/core/tools/gen_forcing.py > crates/core/src/harness/forcing.rs

The source is S = d/dt U* + (fluxes) - (right-hand side) for the exact
fields below, with the total pressure p = cp rho^gamma and delta = 1/cp.
"""

import sympy as sp

x, y, t = sp.symbols("x y t", real=True)
delta, cp, gamma, nu, lam, eps, g = sp.symbols(
    "delta cp gamma nu lam eps g", real=True, positive=True
)
pi = sp.pi


def dpsi(c):
    return c**3 - c


def one_d():
    rho = 1 + delta * sp.cos(2 * pi * x) * (t + 1)
    v = sp.Integer(0)
    c = sp.Rational(3, 4) - sp.Rational(1, 10) * (1 - delta) * sp.cos(pi * x) * (t - 1)
    p = cp * rho**gamma
    m = rho * v
    q = rho * c
    cx = sp.diff(c, x)
    s_rho = sp.diff(rho, t) + sp.diff(m, x)
    s_m = (
        sp.diff(m, t)
        + sp.diff(rho * v**2 + p, x)
        - rho * g
        - sp.diff((2 * nu + lam) * sp.diff(v, x) - eps / 2 * cx**2, x)
    )
    mu = dpsi(c) - eps / rho * sp.diff(c, x, 2)
    s_q = sp.diff(q, t) + sp.diff(q * v, x) - sp.diff(mu, x, 2)
    return [s_rho, s_m, s_q]


def two_d():
    rho = 1 + delta * sp.cos(2 * pi * x) * sp.cos(pi * y) * (t + 1)
    v1 = (1 + delta) * (1 - sp.cos(2 * pi * x)) * sp.sin(2 * pi * y) * (1 - 2 * t**2)
    v2 = (1 + delta) * (1 - sp.cos(2 * pi * y)) * sp.sin(2 * pi * x) * (2 * t**2 - 1)
    c = sp.Rational(3, 4) - sp.Rational(1, 10) * (1 - delta) * sp.cos(pi * x) * sp.cos(pi * y) * (t - 1)
    p = cp * rho**gamma
    q = rho * c
    cx, cy = sp.diff(c, x), sp.diff(c, y)

    def lap(f):
        return sp.diff(f, x, 2) + sp.diff(f, y, 2)

    s_rho = sp.diff(rho, t) + sp.diff(rho * v1, x) + sp.diff(rho * v2, y)
    cap1 = eps / 2 * sp.diff(cy**2 - cx**2, x) - eps * sp.diff(cx * cy, y)
    cap2 = eps / 2 * sp.diff(cx**2 - cy**2, y) - eps * sp.diff(cx * cy, x)
    visc1 = nu * lap(v1) + (nu + lam) * (sp.diff(v1, x, 2) + sp.diff(v2, x, y))
    visc2 = nu * lap(v2) + (nu + lam) * (sp.diff(v1, x, y) + sp.diff(v2, y, 2))
    s_m1 = (
        sp.diff(rho * v1, t)
        + sp.diff(rho * v1**2 + p, x)
        + sp.diff(rho * v1 * v2, y)
        - cap1
        - visc1
    )
    s_m2 = (
        sp.diff(rho * v2, t)
        + sp.diff(rho * v1 * v2, x)
        + sp.diff(rho * v2**2 + p, y)
        - rho * g
        - cap2
        - visc2
    )
    mu = dpsi(c) - eps / rho * lap(c)
    s_q = sp.diff(q, t) + sp.diff(q * v1, x) + sp.diff(q * v2, y) - lap(mu)
    return [s_rho, s_m1, s_m2, s_q]


def rs(e):
    """Fully parenthesized Rust expression for a sympy expression."""
    if isinstance(e, sp.Symbol):
        return e.name
    if e is sp.pi:
        return "PI"
    if isinstance(e, sp.Integer):
        return f"{int(e)}.0"
    if isinstance(e, sp.Rational):
        return f"({e.p}.0 / {e.q}.0)"
    if isinstance(e, sp.Float):
        return repr(float(e))
    if isinstance(e, sp.Add):
        return "(" + " + ".join(rs(a) for a in e.args) + ")"
    if isinstance(e, sp.Mul):
        return "(" + " * ".join(rs(a) for a in e.args) + ")"
    if isinstance(e, sp.Pow):
        b, k = e.args
        if k == sp.Rational(1, 2):
            return f"{rs(b)}.sqrt()"
        if k == -1:
            return f"{rs(b)}.recip()"
        if isinstance(k, sp.Integer):
            return f"{rs(b)}.powi({int(k)})"
        return f"{rs(b)}.powf({rs(k)})"
    if isinstance(e, (sp.sin, sp.cos)):
        return f"{rs(e.args[0])}.{type(e).__name__}()"
    raise TypeError(f"unsupported node {type(e)}: {e}")


def emit(name, args, exprs):
    subs, reduced = sp.cse(exprs, optimizations="basic")
    lines = []
    sig = ", ".join(f"{a}: f64" for a in args)
    lines.append(f"pub fn {name}({sig}, p: &ModelParams) -> [f64; {len(exprs)}] {{")
    lines.append("    let delta = 1.0 / p.cp;")
    lines.append("    let cp = p.cp;")
    lines.append("    let gamma = p.gamma;")
    lines.append("    let nu = p.nu;")
    lines.append("    let lam = p.lambda;")
    lines.append("    let eps = p.eps;")
    lines.append("    let g = p.g;")
    lines.append("    let _ = (delta, cp, gamma, nu, lam, eps, g);")
    for s, e in subs:
        lines.append(f"    let {s} = {rs(e)};")
    vals = ", ".join(rs(e) for e in reduced)
    lines.append(f"    [{vals}]")
    lines.append("}")
    return "\n".join(lines)


HEADER = """//! Manufactured-solution source terms. Generated by
//! `crates/core/tools/gen_forcing.py`; do not edit by hand.

#![allow(clippy::all, unused_parens, non_snake_case)]

use std::f64::consts::PI;

use crate::model::ModelParams;
"""

if __name__ == "__main__":
    print(HEADER)
    print("/// Source `[S_rho, S_m, S_q]` of the one-dimensional exact solution.")
    print(emit("source_1d", ["x", "t"], one_d()))
    print()
    print("/// Source `[S_rho, S_m1, S_m2, S_q]` of the two-dimensional exact solution.")
    print(emit("source_2d", ["x", "y", "t"], two_d()))
