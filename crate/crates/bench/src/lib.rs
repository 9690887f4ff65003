//! Shared setup for the benchmarks.

use chns_core::harness::{build_system, init_test};
use chns_core::spatial::State;
use chns_core::{ChnsSystem, GridSpec, RunConfig, TestCase};

/// The swirling benchmark flow on an `m x m` grid with pressure constant
/// `cp`, ready to step.
pub fn test1_system(m: usize, cp: f64) -> (ChnsSystem, GridSpec, State) {
    let cfg = RunConfig {
        test: TestCase::Test1,
        m: vec![m],
        cp: vec![cp],
        ..RunConfig::default()
    };
    let (sys, grid, params) = build_system(&cfg, m, cp).expect("valid benchmark configuration");
    let u0 = init_test(TestCase::Test1, &grid, params.delta(), 0);
    (sys, grid, u0)
}
