use std::hint::black_box;
use std::sync::Arc;
use std::time::{Duration, Instant};

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fklab::gridcore::{build_grid_domain, ShapeSpec};
use fklab::mixedop::MixedOperator;
use fklab::par;

fn square_op(n: usize) -> (MixedOperator, Vec<f64>) {
    let spec = ShapeSpec::Rectangle { w: 1.0, ht: 1.0, center: [0.0; 2] };
    let d = Arc::new(build_grid_domain(&spec, 1.0 / n as f64).unwrap());
    let op = MixedOperator::mixed(d, 0.25).unwrap();
    let x: Vec<f64> = (0..op.size()).map(|i| ((i * 7919) % 1000) as f64 / 1000.0 - 0.5).collect();
    (op, x)
}

fn direct_vs_fft(c: &mut Criterion) {
    let mut g = c.benchmark_group("nonlocal");
    g.sample_size(10).measurement_time(Duration::from_secs(5));
    for n in [32usize, 64, 128] {
        let (op, x) = square_op(n);
        let mut out = vec![0.0; x.len()];
        g.bench_with_input(BenchmarkId::new("direct", n), &n, |b, _| {
            b.iter(|| op.nonlocal_direct_compact(black_box(&x), &mut out).unwrap())
        });
        op.nonlocal_fft_compact(&x, &mut out).unwrap();
        g.bench_with_input(BenchmarkId::new("fft", n), &n, |b, _| {
            b.iter(|| op.nonlocal_fft_compact(black_box(&x), &mut out).unwrap())
        });
    }
    g.finish();
}

fn thread_counts(c: &mut Criterion) {
    let mut g = c.benchmark_group("threads");
    g.sample_size(10).measurement_time(Duration::from_secs(5));
    let (op, x) = square_op(64);
    for (label, threads) in [("one", 1usize), ("default", 0)] {
        g.bench_function(BenchmarkId::new("direct_64", label), |b| {
            b.iter_custom(|iters| {
                par::with_threads(threads, || {
                    let mut out = vec![0.0; x.len()];
                    let t = Instant::now();
                    for _ in 0..iters {
                        op.nonlocal_direct_compact(black_box(&x), &mut out).unwrap();
                    }
                    t.elapsed()
                })
            })
        });
    }
    g.finish();
}

criterion_group!(benches, direct_vs_fft, thread_counts);
criterion_main!(benches);
