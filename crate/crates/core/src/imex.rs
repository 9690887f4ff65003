//! Partitioned implicit-explicit Runge-Kutta time stepping.
//!
//! The right-hand side is split as `L(ut, u) = E(ut) + I(u)`. Stage `i`
//! evaluates `E` at the explicit predictor
//! `ut_i = u_n + dt sum_{j<i} at_ij L_j` and solves
//! `u_i = u_n + dt sum_{j<i} a_ij L_j + dt a_ii (E(ut_i) + I(u_i))`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ImexError<E> {
    #[error("unknown scheme '{0}' (ee_ie, star_dirksa)")]
    UnknownScheme(String),
    #[error("invalid tableau: {0}")]
    InvalidTableau(&'static str),
    #[error("time step {dt:e} must be positive and finite")]
    BadStep { dt: f64 },
    #[error("step from t = {t} rejected after {attempts} attempts: {source}")]
    StepRejected {
        t: f64,
        attempts: usize,
        #[source]
        source: E,
    },
    #[error("stage solve failed: {0}")]
    Stage(E),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Forward/backward Euler pair, first order.
    EeIe,
    /// Two-stage stiffly accurate pair, second order.
    StarDirksa,
}

impl std::str::FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ee_ie" | "ee-ie" => Ok(Scheme::EeIe),
            "star_dirksa" | "*-dirksa" | "dirksa" => Ok(Scheme::StarDirksa),
            _ => Err(format!("unknown scheme '{s}' (ee_ie, star_dirksa)")),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::EeIe => "ee_ie",
            Scheme::StarDirksa => "star_dirksa",
        })
    }
}

/// Explicit/implicit tableau pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ButcherPair {
    pub s: usize,
    pub alpha_tilde: Vec<Vec<f64>>,
    pub beta_tilde: Vec<f64>,
    pub alpha: Vec<Vec<f64>>,
    pub beta: Vec<f64>,
    pub gamma_tilde: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl ButcherPair {
    fn from_tables(
        alpha_tilde: Vec<Vec<f64>>,
        beta_tilde: Vec<f64>,
        alpha: Vec<Vec<f64>>,
        beta: Vec<f64>,
    ) -> Self {
        let s = beta.len();
        let gamma_tilde = alpha_tilde.iter().map(|r| r.iter().sum()).collect();
        let gamma = alpha.iter().map(|r| r.iter().sum()).collect();
        Self {
            s,
            alpha_tilde,
            beta_tilde,
            alpha,
            beta,
            gamma_tilde,
            gamma,
        }
    }

    /// Checks triangularity, nonzero diagonal, stiff accuracy and row sums.
    pub fn validate(&self) -> Result<(), &'static str> {
        let s = self.s;
        if self.alpha.len() != s || self.alpha_tilde.len() != s || self.beta_tilde.len() != s {
            return Err("inconsistent stage count");
        }
        for i in 0..s {
            if self.alpha[i].len() != s || self.alpha_tilde[i].len() != s {
                return Err("rows must have s entries");
            }
            for j in i..s {
                if self.alpha_tilde[i][j] != 0.0 {
                    return Err("explicit tableau must be strictly lower triangular");
                }
                if j > i && self.alpha[i][j] != 0.0 {
                    return Err("implicit tableau must be lower triangular");
                }
            }
            if self.alpha[i][i] == 0.0 {
                return Err("implicit diagonal must be nonzero");
            }
            let g: f64 = self.alpha[i].iter().sum();
            let gt: f64 = self.alpha_tilde[i].iter().sum();
            if (g - self.gamma[i]).abs() > 1e-15 || (gt - self.gamma_tilde[i]).abs() > 1e-15 {
                return Err("abscissae must be row sums");
            }
        }
        for j in 0..s {
            if (self.alpha[s - 1][j] - self.beta[j]).abs() > 1e-15 {
                return Err("implicit tableau must be stiffly accurate");
            }
        }
        Ok(())
    }
}

/// Built-in tableau pairs.
pub fn make_tableau(scheme: Scheme) -> ButcherPair {
    match scheme {
        Scheme::EeIe => ButcherPair::from_tables(vec![vec![0.0]], vec![1.0], vec![vec![1.0]], vec![1.0]),
        Scheme::StarDirksa => {
            let s = 1.0 / 2f64.sqrt();
            ButcherPair::from_tables(
                vec![vec![0.0, 0.0], vec![1.0 + s, 0.0]],
                vec![s, 1.0 - s],
                vec![vec![1.0 - s, 0.0], vec![s, 1.0 - s]],
                vec![s, 1.0 - s],
            )
        }
    }
}

/// Parses a scheme name into its tableau.
pub fn tableau_by_name<E>(name: &str) -> Result<ButcherPair, ImexError<E>> {
    name.parse::<Scheme>()
        .map(make_tableau)
        .map_err(|_| ImexError::UnknownScheme(name.to_string()))
}

/// Vector space operations needed by the stage loop.
pub trait StageVector: Clone {
    /// `self += a * x`.
    fn axpy(&mut self, a: f64, x: &Self);
    fn scale(&mut self, a: f64);
    fn max_abs(&self) -> f64;
}

impl StageVector for f64 {
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += a * x;
    }
    fn scale(&mut self, a: f64) {
        *self *= a;
    }
    fn max_abs(&self) -> f64 {
        self.abs()
    }
}

impl StageVector for Vec<f64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x) {
            *s += a * v;
        }
    }
    fn scale(&mut self, a: f64) {
        self.iter_mut().for_each(|v| *v *= a);
    }
    fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl StageVector for crate::spatial::State {
    fn axpy(&mut self, a: f64, x: &Self) {
        crate::spatial::State::axpy(self, a, x)
    }
    fn scale(&mut self, a: f64) {
        crate::spatial::State::scale(self, a)
    }
    fn max_abs(&self) -> f64 {
        crate::spatial::State::max_abs(self)
    }
}

/// A semi-discrete system split into explicit and implicit parts.
pub trait ImexSystem {
    type Vector: StageVector;
    type Error: std::error::Error + Clone;
    /// Per-stage solver statistics.
    type Stats: Clone + std::fmt::Debug + Default;

    /// Explicit tendency `E(ut)` at time `t`.
    fn explicit(&mut self, t: f64, ut: &Self::Vector) -> Result<Self::Vector, Self::Error>;

    /// Solves `u = rhs + a I(u)` starting from `guess`.
    fn solve_implicit(
        &mut self,
        rhs: &Self::Vector,
        a: f64,
        guess: &Self::Vector,
    ) -> Result<(Self::Vector, Self::Stats), Self::Error>;

    /// Largest characteristic speed of the explicit part.
    fn char_speed(&self, u: &Self::Vector) -> f64;

    /// Mesh width entering the CFL condition.
    fn mesh_width(&self) -> f64;
}

#[derive(Debug, Clone)]
pub struct StageRecord<V, S> {
    pub predictor: V,
    pub solution: V,
    pub stats: S,
}

#[derive(Debug, Clone)]
pub struct StepRecord<V, S> {
    pub t: f64,
    pub dt: f64,
    pub stages: Vec<StageRecord<V, S>>,
    /// Max-norm gap between the last stage and the weighted-sum update.
    pub update_gap: f64,
}

/// `dt = cfl h / cs` with `cs` the largest characteristic speed over the
/// given states; a quiescent state falls back to `dt = cfl h`.
pub fn select_dt<S: ImexSystem>(sys: &S, states: &[&S::Vector], cfl: f64) -> f64 {
    let cs = states.iter().map(|u| sys.char_speed(u)).fold(0.0, f64::max);
    let h = sys.mesh_width();
    if cs > 0.0 && cs.is_finite() {
        cfl * h / cs
    } else {
        cfl * h
    }
}

/// Advances one step of size `dt` from `(t, u_n)`.
pub fn advance_step<S: ImexSystem>(
    sys: &mut S,
    un: &S::Vector,
    t: f64,
    dt: f64,
    tab: &ButcherPair,
) -> Result<(S::Vector, StepRecord<S::Vector, S::Stats>), ImexError<S::Error>> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(ImexError::BadStep { dt });
    }
    let s = tab.s;
    let mut tend: Vec<S::Vector> = Vec::with_capacity(s);
    let mut stages = Vec::with_capacity(s);
    for i in 0..s {
        let mut ut = un.clone();
        let mut base = un.clone();
        for j in 0..i {
            if tab.alpha_tilde[i][j] != 0.0 {
                ut.axpy(dt * tab.alpha_tilde[i][j], &tend[j]);
            }
            if tab.alpha[i][j] != 0.0 {
                base.axpy(dt * tab.alpha[i][j], &tend[j]);
            }
        }
        let e = sys
            .explicit(t + tab.gamma_tilde[i] * dt, &ut)
            .map_err(ImexError::Stage)?;
        let a = dt * tab.alpha[i][i];
        let mut hat = base.clone();
        hat.axpy(a, &e);
        let (u, stats) = sys.solve_implicit(&hat, a, &ut).map_err(ImexError::Stage)?;
        // L_i = (u_i - base) / a, the full tendency of stage i.
        let mut l = u.clone();
        l.axpy(-1.0, &base);
        l.scale(1.0 / a);
        tend.push(l);
        stages.push(StageRecord {
            predictor: ut,
            solution: u,
            stats,
        });
    }
    let mut sum = un.clone();
    for j in 0..s {
        sum.axpy(dt * tab.beta[j], &tend[j]);
    }
    let unew = stages[s - 1].solution.clone();
    let mut gap = sum;
    gap.axpy(-1.0, &unew);
    Ok((
        unew,
        StepRecord {
            t,
            dt,
            stages,
            update_gap: gap.max_abs(),
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunControl {
    pub cfl: f64,
    /// Halvings of a rejected step before giving up.
    pub max_halvings: usize,
}

impl Default for RunControl {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            max_halvings: 5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary<V> {
    pub state: V,
    pub t: f64,
    pub steps: usize,
    pub rejections: usize,
}

/// Integrates from `t0` to `t_end`, landing exactly on every time in `stops`
/// that falls inside the interval and on `t_end`. `observe` is called after
/// each accepted step with the new time, state and step record.
pub fn run_to_time<S: ImexSystem>(
    sys: &mut S,
    u0: S::Vector,
    t0: f64,
    t_end: f64,
    tab: &ButcherPair,
    ctl: &RunControl,
    stops: &[f64],
    mut observe: impl FnMut(f64, &S::Vector, &StepRecord<S::Vector, S::Stats>),
) -> Result<RunSummary<S::Vector>, ImexError<S::Error>> {
    let mut u = u0;
    let mut t = t0;
    let mut steps = 0;
    let mut rejections = 0;
    let mut stops: Vec<f64> = stops
        .iter()
        .copied()
        .filter(|&s| s > t0 && s < t_end)
        .collect();
    stops.push(t_end);
    stops.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let snap = 1e-12 * t_end.abs().max(1.0);
    let mut dt_next = select_dt(sys, &[&u], ctl.cfl);
    let mut stop_idx = 0;
    while t < t_end - snap {
        while stops[stop_idx] <= t + snap {
            stop_idx += 1;
        }
        let target = stops[stop_idx];
        let mut dt = dt_next.min(target - t);
        let mut attempts = 0;
        let (unew, rec) = loop {
            match advance_step(sys, &u, t, dt, tab) {
                Ok(r) => break r,
                Err(ImexError::Stage(e)) => {
                    attempts += 1;
                    if attempts > ctl.max_halvings {
                        return Err(ImexError::StepRejected {
                            t,
                            attempts,
                            source: e,
                        });
                    }
                    log::warn!("step at t = {t} with dt = {dt:e} rejected ({e}); halving");
                    rejections += 1;
                    dt *= 0.5;
                }
                Err(e) => return Err(e),
            }
        };
        t = if (target - (t + dt)).abs() <= snap {
            target
        } else {
            t + dt
        };
        u = unew;
        steps += 1;
        let sols: Vec<&S::Vector> = rec.stages.iter().map(|s| &s.solution).collect();
        dt_next = select_dt(sys, &sols, ctl.cfl);
        observe(t, &u, &rec);
    }
    Ok(RunSummary {
        state: u,
        t,
        steps,
        rejections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_tableaus_validate() {
        for s in [Scheme::EeIe, Scheme::StarDirksa] {
            make_tableau(s).validate().unwrap();
        }
        let t = make_tableau(Scheme::StarDirksa);
        let sum: f64 = t.beta.iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
        let order2: f64 = t.beta.iter().zip(&t.gamma).map(|(b, g)| b * g).sum();
        assert!((order2 - 0.5).abs() < 1e-15);
        let order2t: f64 = t.beta_tilde.iter().zip(&t.gamma_tilde).map(|(b, g)| b * g).sum();
        assert!((order2t - 0.5).abs() < 1e-15);
        assert_eq!(t.beta, t.beta_tilde);
    }

    #[test]
    fn unknown_scheme_is_rejected() {
        assert!(matches!(
            tableau_by_name::<std::fmt::Error>("rk4"),
            Err(ImexError::UnknownScheme(_))
        ));
    }
}
