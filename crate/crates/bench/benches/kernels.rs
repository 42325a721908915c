use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use su2poly::kernels::{k_cd, k_direct};
use su2poly::nlfs::{forward, layer_strip};
use su2poly::szego::{circle_values, ladder_from_coeffs};
use su2poly::{ClassTag, LaurentPoly, C64};

fn random_coeffs(n: usize, radius: f64, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| C64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect()
}

fn kernel_routes(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernel");
    for n in [16usize, 64, 256] {
        let sys = ladder_from_coeffs(&random_coeffs(n, 0.5, 1), ClassTag::TMinus).unwrap();
        let z = C64::new(0.3, 0.9);
        let lambda = C64::new(-0.8, 0.5);
        group.bench_with_input(BenchmarkId::new("direct", n), &n, |b, &n| {
            b.iter(|| k_direct(&sys, n, black_box(z), black_box(lambda)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("christoffel_darboux", n), &n, |b, &n| {
            b.iter(|| k_cd(&sys, n, black_box(z), black_box(lambda)).unwrap())
        });
    }
    group.finish();
}

fn ladders(c: &mut Criterion) {
    let mut group = c.benchmark_group("ladder");
    for n in [64usize, 256] {
        let f = random_coeffs(n, 1.0, 2);
        group.bench_with_input(BenchmarkId::new("recurrence", n), &f, |b, f| {
            b.iter(|| ladder_from_coeffs(black_box(f), ClassTag::TMinus).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("forward", n), &f, |b, f| b.iter(|| forward(black_box(f))));
        let pair = forward(&f);
        group.bench_with_input(BenchmarkId::new("layer_strip", n), &pair, |b, p| {
            b.iter(|| layer_strip(black_box(p)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("circle_values", n), &f, |b, f| {
            b.iter(|| circle_values(black_box(f), C64::new(0.0, 1.0), n))
        });
    }
    group.finish();
}

fn products(c: &mut Criterion) {
    let mut group = c.benchmark_group("mul");
    for len in [64usize, 512, 2048] {
        let p = LaurentPoly::from_coeffs(random_coeffs(len, 1.0, 3));
        let q = LaurentPoly::from_coeffs(random_coeffs(len, 1.0, 4));
        group.bench_with_input(BenchmarkId::new("direct", len), &len, |b, _| b.iter(|| p.mul_direct(black_box(&q))));
        group.bench_with_input(BenchmarkId::new("fft", len), &len, |b, _| b.iter(|| p.mul_fft(black_box(&q))));
    }
    group.finish();
}

criterion_group!(benches, kernel_routes, ladders, products);
criterion_main!(benches);
