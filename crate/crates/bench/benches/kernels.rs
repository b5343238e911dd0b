use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spinnet::cg::{cg_discrete_discrete, cg_finite_continuous, cg_finite_discrete};
use spinnet::fock::{oracle_moments, FramedOracle};
use spinnet::lqg::{annihilation_report, HamiltonianVariant, TetNetwork};
use spinnet::numeric::{c64, re, solve_eigen_general, TridiagonalMatrix};
use spinnet::racah::r6;
use spinnet::sostar::{area_statistics, rank2_distribution_for_trace, DomainPoint};
use spinnet::spin31::{cg4_chain, Rep4Label};
use spinnet::{CMat, HalfInt, RepLabel3};

fn h(t: i64) -> HalfInt {
    HalfInt(t)
}

fn cg_tables(c: &mut Criterion) {
    let mut g = c.benchmark_group("cg");
    for w in [10, 40] {
        g.bench_with_input(BenchmarkId::new("F1 x D+2", w), &w, |b, &w| {
            b.iter(|| cg_finite_discrete(h(2), h(4), 1, black_box(w)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("F1 x C(-1/2+i)", w), &w, |b, &w| {
            b.iter(|| cg_finite_continuous(h(2), c64(-0.5, 1.0), h(0), black_box(w)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("D+1 x D+1", w), &w, |b, &w| {
            b.iter(|| cg_discrete_discrete(h(2), h(2), 1, black_box(w)).unwrap())
        });
    }
    g.finish();
}

fn recoupling(c: &mut Criterion) {
    let f = |t| RepLabel3::finite(h(t));
    c.bench_function("racah finite", |b| b.iter(|| r6(f(4), f(3), f(5), f(4), f(6), f(5)).unwrap()));
    let d = |t| RepLabel3::dplus(h(t));
    let net = TetNetwork::new([d(2), d(2), d(6), d(2), d(10), d(6)]);
    let v = HamiltonianVariant::all()[0];
    c.bench_function("annihilation D+", |b| b.iter(|| annihilation_report(v, black_box(&net)).unwrap()));
}

fn spin31(c: &mut Criterion) {
    let l = Rep4Label::new(h(1), c64(0.0, 0.3));
    c.bench_function("cg4 chain table J=6", |b| {
        b.iter(|| cg4_chain(l, HalfInt::HALF, 1).unwrap().table(h(12)).unwrap())
    });
}

fn linear_algebra(c: &mut Criterion) {
    let n = 40;
    let t = TridiagonalMatrix::new(
        (0..n).map(|k| re(k as f64)).collect(),
        (0..n - 1).map(|k| c64(1.0, 0.1 * k as f64)).collect(),
        (0..n - 1).map(|_| re(0.5)).collect(),
    );
    let dense: CMat = t.to_dense();
    c.bench_function("eigen 40x40", |b| b.iter(|| solve_eigen_general(black_box(&dense)).unwrap()));
}

fn coherent(c: &mut Criterion) {
    let z = DomainPoint::from_canonical(&CMat::identity(4, 4), &[0.5, 0.3]).unwrap();
    c.bench_function("area statistics n=4", |b| b.iter(|| area_statistics(black_box(&z))));
    c.bench_function("rank-2 distribution J<=200", |b| b.iter(|| rank2_distribution_for_trace(0.8, 200).unwrap()));
    let mut g = c.benchmark_group("framed oracle");
    g.sample_size(10);
    g.bench_function("moments n=4 J=24", |b| {
        b.iter(|| oracle_moments(&mut FramedOracle::new(&z.zeta, 24).unwrap()))
    });
    g.finish();
}

criterion_group!(benches, cg_tables, recoupling, spin31, linear_algebra, coherent);
criterion_main!(benches);
