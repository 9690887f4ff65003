use std::hint::black_box;

use chns_bench::test1_system;
use chns_core::gridops::{Padded, Parity};
use chns_core::imex::{advance_step, make_tableau, select_dt, ImexSystem};
use chns_core::reconstruct::reconstruct_interface_states;
use chns_core::{Axis, Scheme};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn weno(c: &mut Criterion) {
    let mut g = c.benchmark_group("weno_interface_states");
    for m in [64, 128] {
        let (_, grid, u) = test1_system(m, 1e2);
        let p = Padded::extended(&u.q, grid.m, grid.cell_locs(), [Parity::Even, Parity::Even]).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(m), &p, |b, p| {
            b.iter(|| reconstruct_interface_states(black_box(p), Axis::X))
        });
    }
    g.finish();
}

fn explicit(c: &mut Criterion) {
    let mut g = c.benchmark_group("explicit_tendency");
    for m in [32, 64] {
        let (mut sys, _, u) = test1_system(m, 1e4);
        g.bench_function(BenchmarkId::from_parameter(m), |b| {
            b.iter(|| sys.explicit(0.0, black_box(&u)).unwrap())
        });
    }
    g.finish();
}

fn step(c: &mut Criterion) {
    let mut g = c.benchmark_group("star_dirksa_step");
    g.sample_size(10);
    let tab = make_tableau(Scheme::StarDirksa);
    for cp in [1e2, 1e8] {
        let (mut sys, _, u) = test1_system(32, cp);
        let dt = select_dt(&sys, &[&u], 0.4);
        g.bench_function(BenchmarkId::new("M32", format!("cp{cp:e}")), |b| {
            b.iter(|| advance_step(&mut sys, black_box(&u), 0.0, dt, &tab).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, weno, explicit, step);
criterion_main!(benches);
