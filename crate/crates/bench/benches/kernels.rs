use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use roundlab_core::cayley::{verify_mstar_isometry, CheckMode, Family, GeneratorSet, Solver};
use roundlab_core::numeric::integer;
use roundlab_core::obstruction::{verify_theorem1_step, CircleMap, LevelMode};
use roundlab_core::products::{
    build_simplex, count_incidences, NtmParams, ProductCycleSpace, SimplexClass,
};
use roundlab_core::roundness::{find_violation_exhaustive, simplex_gap, DoubleSimplex};
use roundlab_core::zspace::{audit_triangles, ZVariant};
use roundlab_core::{FiniteMetricSpace, Numerics};
use std::hint::black_box;

fn cycle(n: usize) -> FiniteMetricSpace {
    FiniteMetricSpace::from_fn(n, |i, j| {
        let d = i.abs_diff(j);
        integer(d.min(n - d) as i64)
    })
    .unwrap()
}

fn roundness(c: &mut Criterion) {
    let num = Numerics::default();
    let space = cycle(8);
    let ds = DoubleSimplex::new(vec![0, 2, 4], vec![1, 3, 5]).unwrap();
    c.bench_function("simplex_gap size 3, 80 bits", |b| {
        b.iter(|| simplex_gap(&space, black_box(&ds), 1.5, &num).unwrap())
    });
    let mut group = c.benchmark_group("exhaustive scan at p = 0.9");
    group.sample_size(10);
    for n in [6usize, 8] {
        let space = cycle(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &space, |b, s| {
            b.iter(|| find_violation_exhaustive(s, 3, 0.9, u64::MAX, &num).unwrap())
        });
    }
    group.finish();
}

fn products(c: &mut Criterion) {
    let params = NtmParams::new(4, 0, 2).unwrap();
    let class = params.simplex_class().unwrap();
    c.bench_function("build_simplex on M_4", |b| {
        b.iter(|| build_simplex(&params.space, black_box(&class)).unwrap())
    });
    let space = ProductCycleSpace::with_unit_quantum(4, 8).unwrap();
    let class = SimplexClass::new(&space, 2, 1, 2).unwrap();
    let mut group = c.benchmark_group("incidences");
    group.sample_size(10);
    group.bench_function("C=4 U=8 r=2", |b| {
        b.iter(|| count_incidences(&space, &class, u64::MAX).unwrap())
    });
    group.bench_function("exact step C=4 U=8", |b| {
        b.iter(|| {
            verify_theorem1_step(
                &CircleMap,
                &space,
                &class,
                2.0,
                LevelMode::Exact { budget: u64::MAX },
                1e-12,
            )
            .unwrap()
        })
    });
    group.finish();
}

fn words(c: &mut Criterion) {
    let gens = GeneratorSet::block(Family::Mixed, 16, 3).unwrap();
    let w: Vec<i64> = (0..16).map(|i| (i * 7 % 11) - 5).collect();
    c.bench_function("mixed word length, dim 16", |b| {
        b.iter(|| gens.word_length(black_box(&w)))
    });
    let mut group = c.benchmark_group("isometry");
    group.sample_size(10);
    group.bench_function("M_2* exhaustive, formula", |b| {
        b.iter(|| {
            verify_mstar_isometry(2, Family::Mixed, CheckMode::Exhaustive, Solver::Formula).unwrap()
        })
    });
    group.finish();
    c.bench_function("zeta audit to block 12", |b| {
        b.iter(|| audit_triangles(ZVariant::Corrected, 12).unwrap())
    });
}

criterion_group!(benches, roundness, products, words);
criterion_main!(benches);
