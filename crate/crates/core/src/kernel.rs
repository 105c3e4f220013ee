//! Weighted Bergman kernel of `T_B`,
//!
//! ```text
//! K_alpha(z, w) = Gamma(n + alpha + 1) / (2^{n+1} pi^n Gamma(alpha + 1) rho(z, w)^{n + alpha + 1}),
//! ```
//!
//! its normalised version `k_z = K(z, .) / sqrt(K(z, z))`, kernel `p`-norms and
//! the special functions behind them. Everything is evaluated in log space and
//! exponentiated last, so points with tiny `rho` do not overflow.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{pairing, random_tube_point, Dimension, TubePoint};
use crate::integrate::{self, IntegralEstimate, SamplerConfig};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Gamma(x)` for `x > 0` (Lanczos, `g = 7`, nine terms; reflection below 1/2).
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidParameter(format!("log_gamma needs x > 0, got {x}")));
    }
    Ok(ln_gamma_pos(x))
}

fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // Gamma(x) Gamma(1 - x) = pi / sin(pi x)
        return (PI / (PI * x).sin()).ln() - ln_gamma_pos(1.0 - x);
    }
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    let x = x - 1.0;
    let mut a = LANCZOS_COEFFS[0];
    let t = x + LANCZOS_G + 0.5;
    for (k, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        a += c / (x + k as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// `base^s` on the principal branch. `Re(base) > 0` is required; it always holds
/// for `rho(z, w)` with `z, w` in the domain.
pub fn complex_pow(base: Complex64, s: f64) -> Result<Complex64> {
    if !(base.re > 0.0) {
        return Err(Error::BranchGuard { re: base.re });
    }
    Ok((base.ln() * s).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KernelParams {
    pub n: Dimension,
    pub alpha: f64,
    log_const: f64,
}

impl KernelParams {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        let n = Dimension::new(n)?;
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("weight alpha = {alpha} must be > -1")));
        }
        let nf = n.get() as f64;
        let log_const = ln_gamma_pos(nf + alpha + 1.0)
            - (nf + 1.0) * 2f64.ln()
            - nf * PI.ln()
            - ln_gamma_pos(alpha + 1.0);
        Ok(KernelParams {
            n,
            alpha,
            log_const,
        })
    }

    pub fn dim(&self) -> usize {
        self.n.get()
    }

    /// `n + alpha + 1`.
    pub fn exponent(&self) -> f64 {
        self.n.get() as f64 + self.alpha + 1.0
    }

    pub fn log_constant(&self) -> f64 {
        self.log_const
    }

    /// `c(n, alpha) = Gamma(n+alpha+1) / (2^{n+1} pi^n Gamma(alpha+1))`.
    pub fn constant(&self) -> f64 {
        self.log_const.exp()
    }

    pub(crate) fn check_point(&self, z: &TubePoint) -> Result<()> {
        if z.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: z.dim(),
            });
        }
        Ok(())
    }
}

/// `K_alpha(z, w)`.
pub fn bergman_kernel(z: &TubePoint, w: &TubePoint, kp: &KernelParams) -> Result<Complex64> {
    kp.check_point(z)?;
    kp.check_point(w)?;
    let r = pairing(z.coords(), w.coords());
    if !(r.re > 0.0) {
        return Err(Error::BranchGuard { re: r.re });
    }
    Ok((Complex64::from(kp.log_const) - r.ln() * kp.exponent()).exp())
}

/// `K_alpha(z, z) = c(n, alpha) rho(z)^{-(n+alpha+1)}`.
pub fn kernel_diagonal(z: &TubePoint, kp: &KernelParams) -> f64 {
    (kp.log_const - kp.exponent() * z.rho().ln()).exp()
}

/// `k_z(w) = K(z, w) / sqrt(K(z, z))`.
pub fn normalized_kernel(z: &TubePoint, w: &TubePoint, kp: &KernelParams) -> Result<Complex64> {
    kp.check_point(z)?;
    kp.check_point(w)?;
    let r = pairing(z.coords(), w.coords());
    if !(r.re > 0.0) {
        return Err(Error::BranchGuard { re: r.re });
    }
    let big_n = kp.exponent();
    let log_mod = 0.5 * kp.log_const + 0.5 * big_n * z.rho().ln();
    Ok((Complex64::from(log_mod) - r.ln() * big_n).exp())
}

/// `|k_z(w)|^2`, real-valued log-space evaluation.
pub(crate) fn normalized_kernel_sq(z: &TubePoint, w: &TubePoint, kp: &KernelParams) -> f64 {
    let big_n = kp.exponent();
    let r = pairing(z.coords(), w.coords()).norm_sqr();
    (kp.log_const + big_n * z.rho().ln() - big_n * r.ln()).exp()
}

/// A Hölder exponent `p` in `(1, inf)` with its conjugate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PExponent {
    pub p: f64,
    pub conjugate: f64,
}

impl PExponent {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!("exponent p = {p} must lie in (1, inf)")));
        }
        Ok(PExponent {
            p,
            conjugate: p / (p - 1.0),
        })
    }
}

/// Monte-Carlo kernel norm `||K_alpha(z, .)||_{p, alpha}` and its ratio to
/// `rho(z)^{-(n+alpha+1)/p'}`, which does not depend on `z`.
#[derive(Clone, Debug, Serialize)]
pub struct KernelNorm {
    pub norm: f64,
    pub norm_stderr: f64,
    pub ratio: f64,
    pub ratio_stderr: f64,
    pub integral: IntegralEstimate,
}

pub fn kernel_pnorm(
    z: &TubePoint,
    kp: &KernelParams,
    p: PExponent,
    cfg: &SamplerConfig,
) -> Result<KernelNorm> {
    kp.check_point(z)?;
    let big_n = kp.exponent();
    // |K(z,w)|^p ~ |rho(z,w)|^{-pN}: finite iff pN - alpha > n + 1.
    integrate::check_abs_params(kp.dim(), p.p * big_n, kp.alpha)?;
    let log_c = kp.log_const;
    let pp = p.p;
    let zc = z.coords().to_vec();
    let integral = integrate::integrate(
        |w| {
            let r = pairing(&zc, w.coords()).norm();
            Complex64::from((pp * (log_c - big_n * r.ln())).exp())
        },
        kp,
        cfg,
    )?;
    let value = integral.value.re;
    let norm = value.powf(1.0 / pp);
    let norm_stderr = norm / (pp * value) * integral.stderr;
    let scale = z.rho().powf(big_n / p.conjugate);
    Ok(KernelNorm {
        norm,
        norm_stderr,
        ratio: norm * scale,
        ratio_stderr: norm_stderr * scale,
        integral,
    })
}

/// Points of the closed Bergman ball `D(i, radius)`, used as a fixed compact set.
pub fn compact_probe_set(n: usize, radius: f64, count: usize, seed: u64) -> Vec<TubePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![TubePoint::base(n)];
    out.extend((1..count).map(|_| random_tube_point(n, radius.tanh(), &mut rng)));
    out
}

/// `sup_{w in probes} |K_alpha(z, w)| rho(z)^{(n+alpha+1)/p'}`, i.e. the sup of the
/// `p`-normalised kernel over a compact set up to the `z`-independent norm constant.
pub fn kernel_decay(z: &TubePoint, kp: &KernelParams, p: PExponent, probes: &[TubePoint]) -> Result<f64> {
    kp.check_point(z)?;
    let big_n = kp.exponent();
    let log_scale = kp.log_const + big_n / p.conjugate * z.rho().ln();
    let mut sup = 0.0f64;
    for w in probes {
        kp.check_point(w)?;
        let r = pairing(z.coords(), w.coords()).norm();
        sup = sup.max((log_scale - big_n * r.ln()).exp());
    }
    Ok(sup)
}

/// `|f(z)|^p rho(z)^{n+alpha+1} / int_{D(z,1)} |f|^p dV_alpha`, the quantity a
/// pointwise valuation bound controls.
pub fn valuation_ratio<F>(
    f: F,
    z: &TubePoint,
    p: f64,
    kp: &KernelParams,
    cfg: &SamplerConfig,
) -> Result<(f64, IntegralEstimate)>
where
    F: Fn(&TubePoint) -> Complex64 + Sync,
{
    kp.check_point(z)?;
    let local = integrate::integrate_bergman_ball(z, 1.0, |w| Complex64::from(f(w).norm().powf(p)), kp, cfg)?;
    let ratio = f(z).norm().powf(p) * z.rho().powf(kp.exponent()) / local.value.re;
    Ok((ratio, local))
}
