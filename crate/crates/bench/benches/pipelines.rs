use capkm_bench::{kmedian, uniform};
use capkm_core::lp::solve_ckfl;
use capkm_core::nonuniform::run_nonuniform;
use capkm_core::rational;
use capkm_core::uniform::{run_group, run_match6};
use capkm_core::prepare;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn lp(c: &mut Criterion) {
    let mut g = c.benchmark_group("lp");
    g.sample_size(10);
    for n in [10, 20, 30] {
        let inst = uniform(n, 8, 3, 1);
        g.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| b.iter(|| solve_ckfl(black_box(inst)).unwrap()));
    }
    g.finish();
}

fn bundling(c: &mut Criterion) {
    let inst = uniform(20, 8, 3, 2);
    let frac = solve_ckfl(&inst).unwrap();
    let mut g = c.benchmark_group("prepare");
    g.sample_size(10);
    for ell in [2, 4] {
        g.bench_with_input(BenchmarkId::from_parameter(ell), &ell, |b, &ell| b.iter(|| prepare(&inst, frac.clone(), ell).unwrap()));
    }
    g.finish();
}

fn rounding(c: &mut Criterion) {
    let mut g = c.benchmark_group("rounding");
    g.sample_size(10);

    let inst = kmedian(20, 8, 3, 3);
    let prep = prepare(&inst, solve_ckfl(&inst).unwrap(), 2).unwrap();
    let eps = rational::parse("0.5").unwrap();
    g.bench_function("nonuniform3e", |b| b.iter(|| run_nonuniform(&inst, &prep, &eps).unwrap()));

    let inst = uniform(20, 8, 3, 4);
    let frac = solve_ckfl(&inst).unwrap();
    let prep2 = prepare(&inst, frac.clone(), 2).unwrap();
    g.bench_function("match6", |b| b.iter(|| run_match6(&inst, &prep2, 7).unwrap()));
    let prep4 = prepare(&inst, frac, 4).unwrap();
    g.bench_function("group2e_l4", |b| b.iter(|| run_group(&inst, &prep4, 7).unwrap()));
    g.finish();
}

criterion_group!(benches, lp, bundling, rounding);
criterion_main!(benches);
