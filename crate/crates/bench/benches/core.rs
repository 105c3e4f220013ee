use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tubeberg::geometry::random_tube_point;
use tubeberg::integrate::{integrate, rf_mc};
use tubeberg::linalg::{hermitian_top_eig, jacobi_eigenvalues, DEFAULT_MAX_ITER, DEFAULT_TOL};
use tubeberg::toeplitz::build_model;
use tubeberg::{
    bergman_distance, bergman_kernel, Atom, AtomicMeasure, Complex64, KernelParams, RFParams, SamplerConfig,
    TubePoint,
};

fn points(n: usize, count: usize) -> Vec<TubePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    (0..count).map(|_| random_tube_point(n, 0.95, &mut rng)).collect()
}

fn kernel(c: &mut Criterion) {
    let mut g = c.benchmark_group("kernel");
    for n in [1, 3] {
        let kp = KernelParams::new(n, 1.0).unwrap();
        let pts = points(n, 1024);
        g.bench_with_input(BenchmarkId::new("bergman_kernel", n), &pts, |b, pts| {
            b.iter(|| {
                let mut s = Complex64::new(0.0, 0.0);
                for w in pts.windows(2) {
                    s += bergman_kernel(&w[0], &w[1], &kp).unwrap();
                }
                black_box(s)
            })
        });
        g.bench_with_input(BenchmarkId::new("bergman_distance", n), &pts, |b, pts| {
            b.iter(|| {
                let mut s = 0.0;
                for w in pts.windows(2) {
                    s += bergman_distance(&w[0], &w[1]).unwrap();
                }
                black_box(s)
            })
        });
    }
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut g = c.benchmark_group("integrate");
    g.sample_size(10);
    let kp = KernelParams::new(2, 0.0).unwrap();
    let cfg = SamplerConfig::new(100_000, 7).with_workers(1);
    g.bench_function("rho over 1e5 samples", |b| {
        b.iter(|| black_box(integrate(|w| Complex64::from((-w.rho()).exp()), &kp, &cfg).unwrap()))
    });
    let z = TubePoint::base(2);
    let u = points(2, 1).remove(0);
    g.bench_function("two-kernel 1e5 samples", |b| {
        b.iter(|| black_box(rf_mc(2, &RFParams::new(3.0, 3.0, 0.0), &z, &u, &cfg).unwrap()))
    });
    g.finish();
}

fn eigen(c: &mut Criterion) {
    let mut g = c.benchmark_group("eigen");
    let kp = KernelParams::new(1, 0.0).unwrap();
    for atoms in [16, 64] {
        let mu = AtomicMeasure::new(
            1,
            points(1, atoms).into_iter().map(|point| Atom { point, mass: 1.0 }).collect(),
        )
        .unwrap();
        let core = build_model(&mu, &kp).unwrap().core;
        g.bench_with_input(BenchmarkId::new("jacobi", atoms), &core, |b, h| {
            b.iter(|| black_box(jacobi_eigenvalues(h, 1e-14, 200).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("power", atoms), &core, |b, h| {
            b.iter(|| black_box(hermitian_top_eig(h, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, kernel, monte_carlo, eigen);
criterion_main!(benches);
