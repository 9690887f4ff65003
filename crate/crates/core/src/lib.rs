//! Finite-difference solver for the isentropic compressible
//! Cahn-Hilliard-Navier-Stokes system on staggered grids, with
//! implicit-explicit Runge-Kutta time stepping.

pub mod diagnostics;
pub mod gridops;
pub mod harness;
pub mod imex;
pub mod model;
pub mod reconstruct;
pub mod solvers;
pub mod spatial;

pub use gridops::{Axis, Field, GridSpec};
pub use harness::{RunConfig, TestCase};
pub use imex::{make_tableau, ButcherPair, ImexSystem, Scheme};
pub use model::ModelParams;
pub use solvers::{ChnsSystem, LinearMethod, LinearSolverConfig, NewtonConfig};
pub use spatial::{Discretization, State};
