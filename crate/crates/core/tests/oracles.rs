//! Monte-Carlo estimates against closed forms and against each other.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tubeberg::geometry::{pairing_ratio_band, random_tube_point};
use tubeberg::integrate::{
    self, integrate, integrate_bergman_ball, project_p_lambda, rf_abs_mc, rf_exact, volume_ball,
};
use tubeberg::kernel::{kernel_pnorm, log_gamma, valuation_ratio};
use tubeberg::lattice::build_lattice;
use tubeberg::measures::{berezin, lattice_ratios};
use tubeberg::toeplitz::{build_model, operator_norm};
use tubeberg::{
    bergman_kernel, normalized_kernel, Atom, AtomicMeasure, Complex64, KernelParams, PExponent, RFParams,
    RegionSpec, SamplerConfig, TubePoint,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pt(coords: &[(f64, f64)]) -> TubePoint {
    TubePoint::new(coords.iter().map(|&(a, b)| c(a, b)).collect()).unwrap()
}

#[test]
fn change_of_variables_against_gaussian_integral() {
    // exp(-|x|^2 - |y'|^2 - rho) rho^alpha integrates to pi^{n/2} pi^{(n-1)/2} Gamma(1+alpha)
    for (n, alpha) in [(1, 0.0), (1, 1.0), (2, 0.0), (2, 0.5)] {
        let kp = KernelParams::new(n, alpha).unwrap();
        let est = integrate(
            |w| {
                let cs = w.coords();
                let x2: f64 = cs.iter().map(|z| z.re * z.re).sum();
                let y2: f64 = cs[..n - 1].iter().map(|z| z.im * z.im).sum();
                c((-x2 - y2 - w.rho()).exp(), 0.0)
            },
            &kp,
            &SamplerConfig::new(400_000, 11),
        )
        .unwrap();
        let nf = n as f64;
        let exact = PI.powf(nf / 2.0 + (nf - 1.0) / 2.0) * log_gamma(1.0 + alpha).unwrap().exp();
        assert!(est.agrees_with(c(exact, 0.0), 4.0), "n={n} alpha={alpha}: {est:?} vs {exact}");
    }
}

#[test]
fn absolute_value_case_matches_the_two_kernel_closed_form() {
    for (n, s, t, z) in [
        (1, 4.0, 0.0, TubePoint::base(1)),
        (1, 5.0, 1.0, pt(&[(0.3, 0.6)])),
        (2, 6.0, 0.0, pt(&[(0.1, 0.2), (0.4, 1.2)])),
    ] {
        let est = rf_abs_mc(n, s, t, &z, &SamplerConfig::new(400_000, 12)).unwrap();
        let exact = rf_exact(n, &RFParams::new(s / 2.0, s / 2.0, t), &z, &z).unwrap();
        assert!(exact.im.abs() < 1e-12 * exact.re);
        assert!(est.agrees_with(c(exact.re, 0.0), 4.0), "{est:?} vs {exact}");
        assert!(est.relative_stderr() < 0.02);
    }
}

#[test]
fn divergent_parameters_are_rejected() {
    let z = TubePoint::base(1);
    assert!(rf_abs_mc(1, 2.0, 0.0, &z, &SamplerConfig::new(10, 0)).is_err());
    assert!(integrate::rf_mc(1, &RFParams::new(1.0, 1.0, 0.0), &z, &z, &SamplerConfig::new(10, 0)).is_err());
    assert!(integrate::rf_mc(1, &RFParams::new(2.0, 2.0, -1.0), &z, &z, &SamplerConfig::new(10, 0)).is_err());
}

#[test]
fn kernel_pnorm_ratio_is_independent_of_the_point() {
    let kp = KernelParams::new(1, 0.0).unwrap();
    let p = PExponent::new(1.5).unwrap();
    let big_n = kp.exponent();
    let s = p.p * big_n;
    // ||K_z||_p^p = c^p C_1(n, s/2, s/2, alpha) rho(z)^{n+1+alpha-pN}
    let c1 = integrate::rf_constant(1, &RFParams::new(s / 2.0, s / 2.0, 0.0)).unwrap();
    let exact_ratio = kp.constant() * c1.powf(1.0 / p.p);
    for (k, z) in [TubePoint::base(1), pt(&[(0.7, 0.3)]), pt(&[(-2.0, 4.0)])].iter().enumerate() {
        let r = kernel_pnorm(z, &kp, p, &SamplerConfig::new(400_000, 20 + k as u64)).unwrap();
        assert!((r.ratio - exact_ratio).abs() <= 4.0 * r.ratio_stderr, "{r:?} vs {exact_ratio}");
    }
}

#[test]
fn local_and_global_ball_volumes_agree() {
    let kp = KernelParams::new(2, 1.0).unwrap();
    let z = pt(&[(0.2, 0.1), (0.3, 0.8)]);
    let global = volume_ball(&z, 0.7, &kp, &SamplerConfig::new(400_000, 30)).unwrap();
    let local = integrate_bergman_ball(&z, 0.7, |_| c(1.0, 0.0), &kp, &SamplerConfig::new(200_000, 31)).unwrap();
    let gap = (global.value.re - local.value.re).abs();
    let sigma = (global.stderr.powi(2) + local.stderr.powi(2)).sqrt();
    assert!(gap <= 4.0 * sigma, "{global:?} vs {local:?}");
}

#[test]
fn projection_reproduces_kernels() {
    let lambda = 1.0;
    let kp = KernelParams::new(1, lambda).unwrap();
    let u = pt(&[(0.4, 0.9)]);
    let z = pt(&[(-0.3, 1.4)]);
    let f = |w: &TubePoint| bergman_kernel(w, &u, &kp).unwrap();
    let est = project_p_lambda(lambda, f, &z, &SamplerConfig::new(400_000, 40)).unwrap();
    assert!(est.agrees_with(f(&z), 4.0), "{est:?} vs {}", f(&z));
}

#[test]
fn valuation_bound_with_calibrated_constant() {
    // |f(z)|^2 <= C rho(z)^{-N} int_{D(z,1)} |f|^2 dV_alpha with one global C
    let kp = KernelParams::new(1, 0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut ratios = Vec::new();
    for k in 0..40 {
        let z = random_tube_point(1, 0.9, &mut rng);
        let u = random_tube_point(1, 0.9, &mut rng);
        let f = |w: &TubePoint| normalized_kernel(&u, w, &kp).unwrap();
        let (ratio, est) = valuation_ratio(f, &z, 2.0, &kp, &SamplerConfig::new(20_000, 60 + k)).unwrap();
        assert!(est.relative_stderr() < 0.05);
        ratios.push(ratio);
    }
    let (calibration, check) = ratios.split_at(20);
    let c_hat = calibration.iter().copied().fold(0.0, f64::max);
    let worst = check.iter().copied().fold(0.0, f64::max);
    println!("valuation constant: calibrated {c_hat:.4}, held-out max {worst:.4}");
    assert!(c_hat.is_finite() && c_hat > 0.0);
    assert!(worst <= 1.5 * c_hat);
}

#[test]
fn comparability_bands_are_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(70);
    let mut last_width = 0.0;
    for r in [0.25, 0.5, 1.0] {
        let band = pairing_ratio_band(2, r, 20_000, &mut rng).unwrap();
        println!("r = {r}: |rho(z,u)|/|rho(z,v)| in [{:.4}, {:.4}]", band.min, band.max);
        assert!(band.min > 0.0 && band.max.is_finite());
        assert!(band.min <= 1.0 && band.max >= 1.0);
        let width = (band.max / band.min).ln();
        assert!(width >= last_width * 0.9);
        last_width = width;
    }
}

fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let rank = |v: &[f64]| {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        let mut r = vec![0.0; v.len()];
        for (k, &i) in idx.iter().enumerate() {
            r[i] = k as f64;
        }
        r
    };
    let (ra, rb) = (rank(a), rank(b));
    let m = a.len() as f64;
    let d2: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - y).powi(2)).sum();
    1.0 - 6.0 * d2 / (m * (m * m - 1.0))
}

#[test]
fn norm_berezin_and_lattice_ratios_move_together() {
    let kp = KernelParams::new(1, 0.0).unwrap();
    let lattice = build_lattice(1, 0.5, RegionSpec::new(0.2).unwrap(), 80).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    let grid: Vec<TubePoint> = lattice.centers.clone();
    let (mut norms, mut berezins, mut lattices) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..30 {
        let scale = 10f64.powf(rng.random_range(-2.0..2.0));
        let atoms = (0..rng.random_range(1..20))
            .map(|_| Atom {
                point: random_tube_point(1, 0.75, &mut rng),
                mass: scale * rng.random_range(0.5..1.5),
            })
            .collect();
        let mu = AtomicMeasure::new(1, atoms).unwrap();
        norms.push(operator_norm(&build_model(&mu, &kp).unwrap()).unwrap());
        berezins.push(grid.iter().map(|z| berezin(&mu, z, &kp).unwrap()).fold(0.0, f64::max));
        lattices.push(lattice_ratios(&mu, &lattice, &kp).into_iter().fold(0.0, f64::max));
    }
    let a = spearman(&norms, &berezins);
    let b = spearman(&norms, &lattices);
    let c = spearman(&berezins, &lattices);
    println!("rank correlations: norm/berezin {a:.3}, norm/lattice {b:.3}, berezin/lattice {c:.3}");
    assert!(a >= 0.9 && b >= 0.9 && c >= 0.9);
}
