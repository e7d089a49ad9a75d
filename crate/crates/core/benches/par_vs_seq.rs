//! Parallel vs sequential scheduling on the three kernels that dominate
//! real runs: catalog membership scans, overlap histograms, and Monte
//! Carlo solver cells. Both paths run the identical closure; only the
//! scheduler differs.

use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};

use hamsq_core::bits;
use hamsq_core::copies::CopyCatalog;
use hamsq_core::graph::sample_gnp;
use hamsq_core::par;
use hamsq_core::rng::RngStream;
use hamsq_core::solver::{find_power_ham, SearchBudget};

fn catalog_scan(c: &mut Criterion) {
    let cat = CopyCatalog::enumerate(9, 2, CopyCatalog::DEFAULT_BUDGET).unwrap();
    let host = sample_gnp(9, 0.7, RngStream::new(1, 0)).unwrap();
    let host_words = host.edges().words().to_vec();
    let count = |i: usize| u64::from(bits::is_subset(cat.edge_words_of(i), &host_words));

    let mut group = c.benchmark_group("catalog_scan_n9");
    group.measurement_time(Duration::from_secs(3));
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(par::sum_u64(cat.len(), count)))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(par::sum_u64_seq(cat.len(), count)))
    });
    group.finish();
}

fn overlap_histogram(c: &mut Criterion) {
    let cat = CopyCatalog::enumerate(8, 2, CopyCatalog::DEFAULT_BUDGET).unwrap();
    let base = cat.edge_set(0);
    let bins = 2 * cat.n() as usize + 1;
    let init = move || vec![0u64; bins];
    let fold = |mut acc: Vec<u64>, i: usize| {
        acc[bits::intersection_count(cat.edge_words_of(i), base.words()) as usize] += 1;
        acc
    };
    let merge = |mut a: Vec<u64>, b: Vec<u64>| {
        for (x, y) in a.iter_mut().zip(b) {
            *x += y;
        }
        a
    };

    let mut group = c.benchmark_group("overlap_histogram_n8");
    group.measurement_time(Duration::from_secs(3));
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(par::fold_merge(cat.len(), init, fold, merge)))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(par::fold_merge_seq(cat.len(), init, fold)))
    });
    group.finish();
}

fn threshold_cell(c: &mut Criterion) {
    let budget = SearchBudget::unlimited();
    let stream = RngStream::new(7, 0);
    let trial = |t: usize| {
        let g = sample_gnp(9, 0.6, stream.with_stream(t as u64)).unwrap();
        let out = find_power_ham(&g, 2, &budget, stream.with_stream(4096 + t as u64)).unwrap();
        u64::from(out.status.is_found())
    };

    let mut group = c.benchmark_group("threshold_cell_n9");
    group.sample_size(30);
    group.measurement_time(Duration::from_secs(4));
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(par::map_vec(32, trial)))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(par::map_vec_seq(32, trial)))
    });
    group.finish();
}

criterion_group!(benches, catalog_scan, overlap_histogram, threshold_cell);
criterion_main!(benches);
