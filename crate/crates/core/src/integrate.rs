//! Monte-Carlo integration over `T_B` against `dV_alpha = rho^alpha dV`.
//!
//! Samples are drawn uniformly from the unit ball of `C^n = R^{2n}` and pushed
//! forward by `Phi`. With `rho(Phi(xi)) = (1 - |xi|^2) / |1 + xi_n|^2` and real
//! Jacobian `2^{n+1} / |1 + xi_n|^{2(n+1)}`, the importance weight of a sample is
//!
//! ```text
//! w(xi) = vol(B_{2n}) (1 - |xi|^2)^alpha 2^{n+1} / |1 + xi_n|^{2(n+1) + 2 alpha}.
//! ```
//!
//! Sample `k` draws from ChaCha8 stream `k` of the seed, and partial sums are
//! merged in index order, so an estimate depends only on `(samples, seed)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    bergman_distance, cayley, jacobian_cayley, pairing, uniform_ball, Automorphism, BallPoint, TubePoint,
};
use crate::kernel::{self, KernelParams};

/// Samples with `|1 + xi_n|` below this are skipped and counted.
pub const SINGULAR_GUARD: f64 = 1e-12;

/// A single weighted term larger than this share of `sum |terms|` marks the
/// estimate as heavy-tailed (a symptom of a non-integrable integrand).
pub const HEAVY_TAIL_SHARE: f64 = 0.05;

const CHUNK: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SamplerConfig {
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
}

impl SamplerConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        SamplerConfig {
            samples,
            seed,
            workers: default_workers(),
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidParameter("samples must be positive".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidParameter("workers must be positive".into()));
        }
        Ok(())
    }
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig::new(1_000_000, 0x7b5e_ed00)
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegralEstimate {
    pub value: Complex64,
    /// `sqrt(stderr_re^2 + stderr_im^2)`.
    pub stderr: f64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub samples: u64,
    pub skipped: u64,
    pub heavy_tail: bool,
}

impl IntegralEstimate {
    /// `|value - target|` in units of `stderr` (infinite if `stderr == 0` and they differ).
    pub fn sigma_distance(&self, target: Complex64) -> f64 {
        let d = (self.value - target).norm();
        if d == 0.0 {
            0.0
        } else {
            d / self.stderr
        }
    }

    pub fn relative_stderr(&self) -> f64 {
        self.stderr / self.value.norm()
    }

    /// Real and imaginary parts each within `k` standard errors of `target`.
    pub fn agrees_with(&self, target: Complex64, k: f64) -> bool {
        (self.value.re - target.re).abs() <= k * self.stderr_re
            && (self.value.im - target.im).abs() <= k * self.stderr_im
    }

    fn scaled(mut self, c: f64) -> Self {
        self.value *= c;
        self.stderr *= c.abs();
        self.stderr_re *= c.abs();
        self.stderr_im *= c.abs();
        self
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.count == 0 {
            return o;
        }
        if o.count == 0 {
            return self;
        }
        let count = self.count + o.count;
        let d = o.mean - self.mean;
        let mean = self.mean + d * o.count as f64 / count as f64;
        let m2 = self.m2 + o.m2 + d * d * (self.count as f64 * o.count as f64 / count as f64);
        Moments { count, mean, m2 }
    }

    fn stderr(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        (self.m2 / (self.count - 1) as f64 / self.count as f64).sqrt()
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Accumulator {
    re: Moments,
    im: Moments,
    skipped: u64,
    max_abs: f64,
    sum_abs: f64,
}

impl Accumulator {
    fn push(&mut self, term: Option<Complex64>) {
        let t = match term {
            Some(t) if t.is_finite() => t,
            _ => {
                self.skipped += 1;
                Complex64::new(0.0, 0.0)
            }
        };
        self.re.push(t.re);
        self.im.push(t.im);
        let a = t.norm();
        self.max_abs = self.max_abs.max(a);
        self.sum_abs += a;
    }

    fn merge(self, o: Accumulator) -> Accumulator {
        Accumulator {
            re: self.re.merge(o.re),
            im: self.im.merge(o.im),
            skipped: self.skipped + o.skipped,
            max_abs: self.max_abs.max(o.max_abs),
            sum_abs: self.sum_abs + o.sum_abs,
        }
    }

    fn finish(self) -> IntegralEstimate {
        let stderr_re = self.re.stderr();
        let stderr_im = self.im.stderr();
        IntegralEstimate {
            value: Complex64::new(self.re.mean, self.im.mean),
            stderr: stderr_re.hypot(stderr_im),
            stderr_re,
            stderr_im,
            samples: self.re.count,
            skipped: self.skipped,
            heavy_tail: self.sum_abs > 0.0 && self.max_abs > HEAVY_TAIL_SHARE * self.sum_abs,
        }
    }
}

/// Evaluates `term(rng_k)` for `k in 0..samples`, each on its own stream.
fn run<F>(cfg: &SamplerConfig, term: F) -> Result<IntegralEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> Option<Complex64> + Sync,
{
    cfg.validate()?;
    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    let chunks = cfg.samples.div_ceil(CHUNK);
    let chunk_acc = |c: u64| {
        let mut acc = Accumulator::default();
        let end = ((c + 1) * CHUNK).min(cfg.samples);
        for k in c * CHUNK..end {
            let mut rng = base.clone();
            rng.set_stream(k);
            acc.push(term(&mut rng));
        }
        acc
    };
    let parts: Vec<Accumulator> = if cfg.workers == 1 {
        (0..chunks).map(chunk_acc).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(|| (0..chunks).into_par_iter().map(chunk_acc).collect())
    };
    let total = parts
        .into_iter()
        .fold(Accumulator::default(), Accumulator::merge);
    Ok(total.finish())
}

/// Volume of the unit ball of `R^{2n}`: `pi^n / n!`.
pub fn unit_ball_volume(n: usize) -> f64 {
    (1..=n).fold(1.0, |v, k| v * PI / k as f64)
}

/// A point of `T_B` with its importance weight for `dV_alpha`.
#[derive(Clone, Debug)]
pub struct TubeSample {
    pub index: u64,
    pub point: TubePoint,
    pub weight: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct TubeSampler {
    n: usize,
    alpha: f64,
    volume: f64,
}

impl TubeSampler {
    pub(crate) fn new(kp: &KernelParams) -> Self {
        TubeSampler {
            n: kp.dim(),
            alpha: kp.alpha,
            volume: unit_ball_volume(kp.dim()),
        }
    }

    /// `None` when the draw lands within the singular guard of `xi_n = -1`.
    pub(crate) fn draw(&self, rng: &mut ChaCha8Rng) -> Option<(TubePoint, f64)> {
        let xi = uniform_ball(self.n, 1.0, rng);
        let d = (Complex64::new(1.0, 0.0) + xi[self.n - 1]).norm_sqr();
        if d.sqrt() < SINGULAR_GUARD {
            return None;
        }
        let ball = BallPoint::new(xi).ok()?;
        let one_minus = 1.0 - ball.norm_sqr();
        let point = cayley(&ball).ok()?;
        let np1 = (self.n + 1) as i32;
        let weight = self.volume * 2f64.powi(np1) * (one_minus / d).powf(self.alpha) / d.powi(np1);
        Some((point, weight))
    }
}

/// Weighted sample stream for `int g dV_alpha`: the mean of `g(point) * weight`
/// estimates the integral. Singular draws are omitted (see [`integrate`] for
/// the counted version).
pub fn sample_tube(kp: &KernelParams, cfg: &SamplerConfig) -> Result<impl Iterator<Item = TubeSample>> {
    cfg.validate()?;
    let sampler = TubeSampler::new(kp);
    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok((0..cfg.samples).filter_map(move |k| {
        let mut rng = base.clone();
        rng.set_stream(k);
        sampler
            .draw(&mut rng)
            .map(|(point, weight)| TubeSample { index: k, point, weight })
    }))
}

/// Monte-Carlo estimate of `int_{T_B} g dV_alpha`.
pub fn integrate<G>(g: G, kp: &KernelParams, cfg: &SamplerConfig) -> Result<IntegralEstimate>
where
    G: Fn(&TubePoint) -> Complex64 + Sync,
{
    let sampler = TubeSampler::new(kp);
    run(cfg, |rng| sampler.draw(rng).map(|(p, w)| g(&p) * w))
}

/// Monte-Carlo estimate of `int_{D(center, r)} g dV_alpha`, sampling the Bergman
/// ball directly: uniform `xi` with `|xi| < tanh r`, mapped by `sigma_center^{-1} o Phi`.
pub fn integrate_bergman_ball<G>(
    center: &TubePoint,
    r: f64,
    g: G,
    kp: &KernelParams,
    cfg: &SamplerConfig,
) -> Result<IntegralEstimate>
where
    G: Fn(&TubePoint) -> Complex64 + Sync,
{
    kp.check_point(center)?;
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("radius r = {r} must be > 0")));
    }
    let n = kp.dim();
    let radius = r.tanh();
    let to_center = Automorphism::Sigma(center.clone()).inverse();
    let volume = unit_ball_volume(n) * radius.powi(2 * n as i32) * center.rho().powi(n as i32 + 1);
    let alpha = kp.alpha;
    run(cfg, |rng| {
        let xi = BallPoint::new(uniform_ball(n, radius, rng)).ok()?;
        let local = cayley(&xi).ok()?;
        let w = to_center.apply(&local).ok()?;
        let weight = volume * jacobian_cayley(&xi) * w.rho().powf(alpha);
        Some(g(&w) * weight)
    })
}

/// `V_alpha(D(z, r))` as the `dV_alpha`-integral of the indicator of `beta(z, .) < r`.
pub fn volume_ball(z: &TubePoint, r: f64, kp: &KernelParams, cfg: &SamplerConfig) -> Result<IntegralEstimate> {
    kp.check_point(z)?;
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("radius r = {r} must be > 0")));
    }
    integrate(
        |w| {
            let inside = bergman_distance(z, w).map(|d| d < r).unwrap_or(false);
            Complex64::from(if inside { 1.0 } else { 0.0 })
        },
        kp,
        cfg,
    )
}

/// Exponents `(r, s, t)` of the two-kernel integral
/// `int rho(w)^t / (rho(z,w)^r rho(w,u)^s) dV(w)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RFParams {
    pub r: f64,
    pub s: f64,
    pub t: f64,
}

impl RFParams {
    pub fn new(r: f64, s: f64, t: f64) -> Self {
        RFParams { r, s, t }
    }

    /// `r, s > 0`, `t > -1`, `r + s - t > n + 1`.
    pub fn check(&self, n: usize) -> Result<()> {
        let RFParams { r, s, t } = *self;
        if !(r > 0.0 && s > 0.0) {
            return Err(Error::InvalidParameter(format!("need r, s > 0 (r = {r}, s = {s})")));
        }
        if !(t > -1.0) {
            return Err(Error::Divergent(format!("t = {t} must be > -1")));
        }
        if !(r + s - t > n as f64 + 1.0) {
            return Err(Error::Divergent(format!(
                "r + s - t = {} must exceed n + 1 = {}",
                r + s - t,
                n + 1
            )));
        }
        Ok(())
    }

    /// `r + s - t - n - 1`.
    pub fn output_exponent(&self, n: usize) -> f64 {
        self.r + self.s - self.t - n as f64 - 1.0
    }
}

/// Finiteness of `int rho(w)^t / |rho(z,w)|^s dV(w)`: `t > -1` and `s - t > n + 1`.
pub fn check_abs_params(n: usize, s: f64, t: f64) -> Result<()> {
    if !(t > -1.0) {
        return Err(Error::Divergent(format!("t = {t} must be > -1")));
    }
    if !(s - t > n as f64 + 1.0) {
        return Err(Error::Divergent(format!(
            "s - t = {} must exceed n + 1 = {}",
            s - t,
            n + 1
        )));
    }
    Ok(())
}

/// `C_1(n, r, s, t) = 2^{n+1} pi^n Gamma(1+t) Gamma(r+s-t-n-1) / (Gamma(r) Gamma(s))`.
pub fn rf_constant(n: usize, rf: &RFParams) -> Result<f64> {
    rf.check(n)?;
    let nf = n as f64;
    let log = (nf + 1.0) * 2f64.ln() + nf * PI.ln() + kernel::log_gamma(1.0 + rf.t)?
        + kernel::log_gamma(rf.output_exponent(n))?
        - kernel::log_gamma(rf.r)?
        - kernel::log_gamma(rf.s)?;
    Ok(log.exp())
}

/// Closed form `C_1(n, r, s, t) / rho(z, u)^{r+s-t-n-1}`.
pub fn rf_exact(n: usize, rf: &RFParams, z: &TubePoint, u: &TubePoint) -> Result<Complex64> {
    let c1 = rf_constant(n, rf)?;
    for p in [z, u] {
        if p.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: p.dim() });
        }
    }
    let r = pairing(z.coords(), u.coords());
    Ok(c1 / kernel::complex_pow(r, rf.output_exponent(n))?)
}

/// Monte-Carlo estimate of `int rho(w)^t / (rho(z,w)^r rho(w,u)^s) dV(w)`, sampled
/// with weight `alpha = t`.
pub fn rf_mc(n: usize, rf: &RFParams, z: &TubePoint, u: &TubePoint, cfg: &SamplerConfig) -> Result<IntegralEstimate> {
    rf.check(n)?;
    let kp = KernelParams::new(n, rf.t)?;
    kp.check_point(z)?;
    kp.check_point(u)?;
    let (r, s) = (rf.r, rf.s);
    integrate(
        |w| {
            let a = pairing(z.coords(), w.coords());
            let b = pairing(w.coords(), u.coords());
            (-(a.ln() * r) - b.ln() * s).exp()
        },
        &kp,
        cfg,
    )
}

/// Monte-Carlo estimate of `int rho(w)^t / |rho(z,w)|^s dV(w)`.
pub fn rf_abs_mc(n: usize, s: f64, t: f64, z: &TubePoint, cfg: &SamplerConfig) -> Result<IntegralEstimate> {
    check_abs_params(n, s, t)?;
    let kp = KernelParams::new(n, t)?;
    kp.check_point(z)?;
    integrate(
        |w| Complex64::from((-s * pairing(z.coords(), w.coords()).norm().ln()).exp()),
        &kp,
        cfg,
    )
}

/// `c_lambda = Gamma(n+1+lambda) / (2^{n+1} pi^n Gamma(1+lambda))`, the constant
/// making `P_lambda` reproduce `A^2_lambda`.
pub fn projection_constant(n: usize, lambda: f64) -> Result<f64> {
    Ok(KernelParams::new(n, lambda)?.constant())
}

/// `P_lambda g(z) = c_lambda int rho(w)^lambda rho(z,w)^{-(n+1+lambda)} g(w) dV(w)`.
pub fn project_p_lambda<G>(lambda: f64, g: G, z: &TubePoint, cfg: &SamplerConfig) -> Result<IntegralEstimate>
where
    G: Fn(&TubePoint) -> Complex64 + Sync,
{
    let kp = KernelParams::new(z.dim(), lambda)?;
    let big_n = kp.exponent();
    let log_c = kp.log_constant();
    integrate(
        |w| {
            let a = pairing(z.coords(), w.coords());
            let gw = g(w);
            if gw == Complex64::new(0.0, 0.0) {
                return gw;
            }
            (Complex64::from(log_c) - a.ln() * big_n).exp() * gw
        },
        &kp,
        cfg,
    )
}

/// Parameter condition for boundedness of
/// `f -> rho(z)^a int rho(w)^b rho(z,w)^{-c} f(w) dV(w)` on `L^p_alpha`:
/// `-p a < alpha + 1 < p (b + 1)` and `c = n + 1 + a + b`; for `p = inf`,
/// `a > 0`, `b > -1` and `c = n + a + b + 1`.
pub fn schur_admissible(a: f64, b: f64, c: f64, p: f64, n: usize, alpha: f64) -> bool {
    let balance = (c - (n as f64 + 1.0 + a + b)).abs() <= 1e-12 * (1.0 + c.abs());
    if p.is_infinite() && p > 0.0 {
        return a > 0.0 && b > -1.0 && balance;
    }
    if !(p >= 1.0) {
        return false;
    }
    -p * a < alpha + 1.0 && alpha + 1.0 < p * (b + 1.0) && balance
}

/// Linear functionals of an estimate, for scaling a shared-stream result.
pub fn scale_estimate(est: IntegralEstimate, c: f64) -> IntegralEstimate {
    est.scaled(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{bergman_kernel, normalized_kernel};

    fn i1() -> TubePoint {
        TubePoint::base(1)
    }

    #[test]
    fn ball_volume() {
        assert!((unit_ball_volume(1) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(2) - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn moments_merge_matches_sequential() {
        let xs: Vec<f64> = (0..1000).map(|k| ((k * 37) % 101) as f64 * 0.1).collect();
        let mut all = Moments::default();
        xs.iter().for_each(|&x| all.push(x));
        let (a, b) = xs.split_at(333);
        let mut ma = Moments::default();
        let mut mb = Moments::default();
        a.iter().for_each(|&x| ma.push(x));
        b.iter().for_each(|&x| mb.push(x));
        let m = ma.merge(mb);
        assert!((m.mean - all.mean).abs() < 1e-12);
        assert!((m.m2 - all.m2).abs() < 1e-9 * all.m2);
    }

    #[test]
    fn constant_integrand_is_flagged() {
        let kp = KernelParams::new(1, 0.0).unwrap();
        let est = integrate(|_| Complex64::new(1.0, 0.0), &kp, &SamplerConfig::new(100_000, 1)).unwrap();
        assert!(est.heavy_tail, "{est:?}");
    }

    #[test]
    fn normalized_kernel_square_integrates_to_one() {
        let kp = KernelParams::new(1, 0.0).unwrap();
        let z = i1();
        let est = integrate(
            |w| Complex64::from(normalized_kernel(&z, w, &kp).unwrap().norm_sqr()),
            &kp,
            &SamplerConfig::new(50_000, 3),
        )
        .unwrap();
        // |k_i|^2 pulls back to a constant on the ball
        assert!((est.value.re - 1.0).abs() < 1e-12, "{est:?}");
        assert!(!est.heavy_tail);
    }

    #[test]
    fn linearity_on_shared_stream() {
        let kp = KernelParams::new(2, 1.0).unwrap();
        let cfg = SamplerConfig::new(20_000, 9);
        let z = TubePoint::base(2);
        let g = |w: &TubePoint| bergman_kernel(&z, w, &kp).unwrap() * normalized_kernel(w, &z, &kp).unwrap();
        let a = Complex64::new(2.5, 0.0);
        let base = integrate(g, &kp, &cfg).unwrap();
        let scaled = integrate(|w| g(w) * a, &kp, &cfg).unwrap();
        assert!((scaled.value - base.value * a).norm() <= 1e-14 * scaled.value.norm());
    }

    #[test]
    fn rf_constant_examples() {
        let c = rf_constant(1, &RFParams::new(2.0, 2.0, 0.0)).unwrap();
        assert!((c - 4.0 * PI).abs() < 1e-13);
        let v = rf_exact(1, &RFParams::new(2.0, 2.0, 0.0), &i1(), &i1()).unwrap();
        assert!((v - 4.0 * PI).norm() < 1e-13);
        assert!(matches!(rf_constant(1, &RFParams::new(2.0, 2.0, -1.0)), Err(Error::Divergent(_))));
        assert!(matches!(rf_constant(1, &RFParams::new(1.0, 1.0, 0.0)), Err(Error::Divergent(_))));
    }

    #[test]
    fn rf_self_reproduction_constant() {
        for (n, alpha) in [(1usize, 0.0), (2, 1.0), (3, 0.5)] {
            let kp = KernelParams::new(n, alpha).unwrap();
            let big_n = kp.exponent();
            let rf = RFParams::new(big_n, big_n, alpha);
            assert!((rf.output_exponent(n) - big_n).abs() < 1e-15);
            let c1 = rf_constant(n, &rf).unwrap();
            assert!((c1 * kp.constant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn abs_guard() {
        assert!(check_abs_params(1, 2.0, 0.0).is_err());
        assert!(check_abs_params(1, 4.0, -1.0).is_err());
        assert!(check_abs_params(1, 4.0, 0.0).is_ok());
        assert!(rf_abs_mc(2, 3.0, 0.0, &TubePoint::base(2), &SamplerConfig::new(10, 0)).is_err());
    }

    #[test]
    fn schur_predicate() {
        let n = 2;
        assert!(schur_admissible(0.0, 0.0, n as f64 + 1.0, 2.0, n, 0.0));
        assert!(!schur_admissible(0.0, 0.0, n as f64, 2.0, n, 0.0));
        assert!(schur_admissible(1.0, 0.0, n as f64 + 2.0, f64::INFINITY, n, 0.0));
        assert!(!schur_admissible(0.0, 0.0, n as f64 + 1.0, f64::INFINITY, n, 0.0));
        assert!(!schur_admissible(0.0, -0.9, n as f64 + 0.1, 1.0, n, 0.5));
    }

    #[test]
    fn projection_of_zero_is_zero() {
        let est = project_p_lambda(0.0, |_| Complex64::new(0.0, 0.0), &i1(), &SamplerConfig::new(1000, 1)).unwrap();
        assert_eq!(est.value, Complex64::new(0.0, 0.0));
        assert!(project_p_lambda(-1.0, |_| Complex64::new(1.0, 0.0), &i1(), &SamplerConfig::new(10, 1)).is_err());
    }

    #[test]
    fn sample_stream_is_reproducible() {
        let kp = KernelParams::new(2, 0.0).unwrap();
        let cfg = SamplerConfig::new(64, 5);
        let a: Vec<_> = sample_tube(&kp, &cfg).unwrap().map(|s| (s.weight, s.point)).collect();
        let b: Vec<_> = sample_tube(&kp, &cfg).unwrap().map(|s| (s.weight, s.point)).collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|(w, _)| *w > 0.0));
    }

    #[test]
    fn volume_decreases_with_radius() {
        let kp = KernelParams::new(1, 0.0).unwrap();
        let cfg = SamplerConfig::new(50_000, 4);
        let mut last = f64::INFINITY;
        for r in [1.0, 0.5, 0.25, 0.1] {
            let v = volume_ball(&i1(), r, &kp, &cfg).unwrap().value.re;
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn local_ball_integrator_gives_volume() {
        // n = 1, alpha = 0: V(D(i, r)) = 4 pi d^2 / (1 - d^2)^2 with d = tanh r
        let kp = KernelParams::new(1, 0.0).unwrap();
        let d = 0.5f64.tanh();
        let exact = 4.0 * PI * d * d / (1.0 - d * d).powi(2);
        let est = integrate_bergman_ball(&i1(), 0.5, |_| Complex64::new(1.0, 0.0), &kp, &SamplerConfig::new(100_000, 2)).unwrap();
        assert!((est.value.re - exact).abs() <= 3.0 * est.stderr, "{est:?} vs {exact}");
    }
}
