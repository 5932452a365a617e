use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use ltdr::batch;
use ltdr::dieudonne::build_dg;
use ltdr::padic::make_field;
use ltdr::periods::{omega_membership, random_point_with};
use ltdr::rng;

fn correspondence(c: &mut Criterion) {
    let k = make_field(2, 4, 32).unwrap();
    let sample = |i: usize| {
        let pm = random_point_with(2, &k, &mut rng::stream(1, i as u64)).unwrap();
        omega_membership(&pm.correspond().fil_g()).is_in()
    };
    let mut group = c.benchmark_group("correspondence_64");
    group.sample_size(10);
    group.bench_function(BenchmarkId::new("sequential", 64), |b| {
        b.iter(|| black_box(batch::run_sequential(64, sample)))
    });
    #[cfg(feature = "parallel")]
    group.bench_function(BenchmarkId::new("parallel", 64), |b| {
        b.iter(|| black_box(batch::run_parallel(64, sample)))
    });
    group.finish();
}

fn slopes(c: &mut Criterion) {
    let k = make_field(2, 2, 24).unwrap();
    let iso = build_dg(&k, 3).unwrap().dual_isocrystal().unwrap();
    let change = |i: usize| {
        let g = rng::unimodular_matrix(&k, 9, &mut rng::stream(2, i as u64));
        iso.base_change(&g).and_then(|b| b.newton_slopes()).unwrap()
    };
    let mut group = c.benchmark_group("slope_base_changes_16");
    group.sample_size(10);
    group.bench_function(BenchmarkId::new("sequential", 16), |b| {
        b.iter(|| black_box(batch::run_sequential(16, change)))
    });
    #[cfg(feature = "parallel")]
    group.bench_function(BenchmarkId::new("parallel", 16), |b| {
        b.iter(|| black_box(batch::run_parallel(16, change)))
    });
    group.finish();
}

criterion_group!(benches, correspondence, slopes);
criterion_main!(benches);
