use std::collections::BTreeSet;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use ixpunion::analytics::{database_links, group_similarity, jaccard, Grouping};
use ixpunion::linker::{normalize_name, run_cascade, CascadeConfig, NameScheme};
use ixpunion_bench::datasets;

fn cascade(c: &mut Criterion) {
    let mut g = c.benchmark_group("cascade");
    for n in [100usize, 500, 1500] {
        let data = datasets(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &data, |b, d| {
            b.iter(|| run_cascade(black_box(d), &[], &[], &CascadeConfig::default()))
        });
    }
    g.finish();
}

fn names(c: &mut Criterion) {
    c.bench_function("normalize_name/strip-nonword", |b| {
        b.iter(|| {
            normalize_name(
                black_box("DE-CIX Frankfurt (Main)"),
                NameScheme::StripNonword,
            )
        })
    });
}

fn similarity(c: &mut Criterion) {
    let a: BTreeSet<u32> = (0..20_000).collect();
    let b: BTreeSet<u32> = (10_000..30_000).collect();
    c.bench_function("jaccard/20k", |bn| {
        bn.iter(|| jaccard(&[black_box(&a), black_box(&b)]))
    });

    let data = datasets(1500);
    let unified: Vec<_> = data.into_values().flatten().collect();
    let sets = database_links(&unified);
    c.bench_function("group_similarity/continent", |bn| {
        bn.iter(|| group_similarity(black_box(&sets), Grouping::Continent, &unified).unwrap())
    });
}

criterion_group!(benches, cascade, names, similarity);
criterion_main!(benches);
