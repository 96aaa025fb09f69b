use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use maxshare_core::corpus;
use maxshare_core::gen::{scope_ladder, unrolled_comb};
use maxshare_core::{
    bisimilar, collapse, maximal_shared_form, readback, translate_fo_max, translate_fo_min,
    SharingOptions,
};

fn translation(c: &mut Criterion) {
    let mut group = c.benchmark_group("translate_ladder");
    for n in [8usize, 16, 32, 64] {
        let term = scope_ladder(n);
        group.bench_with_input(BenchmarkId::new("min", n), &term, |b, t| {
            b.iter(|| translate_fo_min(t))
        });
        group.bench_with_input(BenchmarkId::new("max", n), &term, |b, t| {
            b.iter(|| translate_fo_max(t))
        });
    }
    group.finish();
}

fn collapsing(c: &mut Criterion) {
    let mut group = c.benchmark_group("collapse_comb");
    group.sample_size(20);
    for units in [1_000usize, 4_000, 16_000] {
        let g = unrolled_comb(units);
        group.throughput(Throughput::Elements(g.len() as u64));
        group.bench_with_input(BenchmarkId::from_parameter(g.len()), &g, |b, g| {
            b.iter(|| collapse(g))
        });
    }
    group.finish();
}

fn equivalence(c: &mut Criterion) {
    let a = unrolled_comb(8_000);
    let b = unrolled_comb(4_000);
    c.bench_function("bisimilar_comb", |bench| bench.iter(|| bisimilar(&a, &b)));
}

fn end_to_end(c: &mut Criterion) {
    let mut group = c.benchmark_group("maximal_shared_form");
    for e in [
        corpus::FIX_UNROLLED,
        corpus::SCOPE_INNER_ALIAS,
        corpus::MUTUAL,
    ] {
        let term = e.term();
        group.bench_function(e.name, |b| {
            b.iter(|| maximal_shared_form(&term, SharingOptions::default()))
        });
    }
    let ladder = collapse(&translate_fo_max(&scope_ladder(32)));
    group.bench_function("readback_ladder_32", |b| b.iter(|| readback(&ladder)));
    group.finish();
}

criterion_group!(benches, translation, collapsing, equivalence, end_to_end);
criterion_main!(benches);
