//! Points of the tube domain `T_B = { x + iy : y_n > |y'|^2 }` and of the unit
//! ball, the sesqui-polynomial pairing `rho(z, w)`, the Bergman distance, the
//! Cayley-type biholomorphism between the two models and the automorphisms used
//! to move any point to the base point `i = (0', i)`.
//!
//! Coordinates are stored as `Vec<Complex64>` of length `n`; the last entry is
//! `z_n` and the first `n - 1` entries are `z'` (empty when `n == 1`, where the
//! domain is the upper half-plane).

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible `rho(z)`; anything closer to the boundary would overflow
/// `rho^{-(n+alpha+1)}`.
pub const MIN_RHO: f64 = 1e-300;

/// Slack for the `1 - rho(z)rho(w)/|rho(z,w)|^2` consistency check.
pub const DISTANCE_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(Dimension(n))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl TryFrom<usize> for Dimension {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        Dimension::new(n)
    }
}

impl From<Dimension> for usize {
    fn from(d: Dimension) -> usize {
        d.0
    }
}

/// `rho(z, w) = ((z' - conj(w'))^2 - 2i (z_n - conj(w_n))) / 4`, lengths assumed equal.
#[inline]
pub(crate) fn pairing(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    debug_assert_eq!(z.len(), w.len());
    let n = z.len();
    let mut sq = Complex64::new(0.0, 0.0);
    for k in 0..n - 1 {
        let d = z[k] - w[k].conj();
        sq += d * d;
    }
    let dn = z[n - 1] - w[n - 1].conj();
    // -2i * dn
    let lin = Complex64::new(2.0 * dn.im, -2.0 * dn.re);
    (sq + lin) * 0.25
}

/// `rho(z, i)` with `i = (0', i)`: `(z'.z' - 2i z_n + 2) / 4`.
#[inline]
pub(crate) fn pairing_with_base(z: &[Complex64]) -> Complex64 {
    let n = z.len();
    let sq: Complex64 = z[..n - 1].iter().map(|c| c * c).sum();
    let zn = z[n - 1];
    (sq + Complex64::new(2.0 + 2.0 * zn.im, -2.0 * zn.re)) * 0.25
}

/// `Im(p_n) - sum_{k<n} Im(p_k)^2`.
#[inline]
pub(crate) fn defining_function(p: &[Complex64]) -> f64 {
    let n = p.len();
    let yp: f64 = p[..n - 1].iter().map(|c| c.im * c.im).sum();
    p[n - 1].im - yp
}

/// The pairing `rho(z, w)`; Hermitian: `rho(w, z) = conj(rho(z, w))`.
pub fn rho_pair(z: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
    if z.is_empty() {
        return Err(Error::InvalidDimension(0));
    }
    if z.len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: z.len(),
            got: w.len(),
        });
    }
    Ok(pairing(z, w))
}

/// `rho(z) = y_n - |y'|^2`.
pub fn rho(z: &TubePoint) -> f64 {
    z.rho
}

/// Membership test for `T_B`.
pub fn contains(p: &[Complex64]) -> bool {
    !p.is_empty() && defining_function(p) > 0.0
}

/// A point of `T_B` with its cached `rho(z) > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct TubePoint {
    coords: Vec<Complex64>,
    rho: f64,
}

impl TubePoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        let rho = defining_function(&coords);
        Self::with_rho(coords, rho)
    }

    /// Builds a point whose `rho` is known more accurately than the coordinate
    /// formula gives it (e.g. from the ball model).
    pub(crate) fn with_rho(coords: Vec<Complex64>, rho: f64) -> Result<Self> {
        if !(rho > MIN_RHO) || !rho.is_finite() || coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::OutsideDomain { rho });
        }
        Ok(TubePoint { coords, rho })
    }

    /// The base point `i = (0', i)`.
    pub fn base(n: usize) -> Self {
        assert!(n >= 1, "dimension must be positive");
        let mut coords = vec![Complex64::new(0.0, 0.0); n];
        coords[n - 1] = Complex64::new(0.0, 1.0);
        TubePoint { coords, rho: 1.0 }
    }

    /// `(0', i t)` for `t > 0`: the vertical ray through the base point.
    pub fn on_axis(n: usize, t: f64) -> Result<Self> {
        let mut coords = vec![Complex64::new(0.0, 0.0); n.max(1)];
        coords[n.max(1) - 1] = Complex64::new(0.0, t);
        TubePoint::new(coords)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn into_coords(self) -> Vec<Complex64> {
        self.coords
    }
}

impl AsRef<[Complex64]> for TubePoint {
    fn as_ref(&self) -> &[Complex64] {
        &self.coords
    }
}

impl TryFrom<Vec<[f64; 2]>> for TubePoint {
    type Error = Error;
    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        TubePoint::new(v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

impl From<TubePoint> for Vec<[f64; 2]> {
    fn from(p: TubePoint) -> Self {
        p.coords.iter().map(|c| [c.re, c.im]).collect()
    }
}

/// A point of the open unit ball of `C^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct BallPoint {
    coords: Vec<Complex64>,
}

impl BallPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        let norm_sq: f64 = coords.iter().map(|c| c.norm_sqr()).sum();
        if !(norm_sq < 1.0) {
            return Err(Error::OutsideBall {
                norm: norm_sq.sqrt(),
            });
        }
        Ok(BallPoint { coords })
    }

    pub fn origin(n: usize) -> Self {
        BallPoint {
            coords: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Hermitian inner product `<a, b> = sum a_k conj(b_k)`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// `Phi(xi) = ( sqrt(2) xi' / (1 + xi_n), i (1 - xi_n)/(1 + xi_n) - i xi'.xi' / (1 + xi_n)^2 )`.
pub fn cayley(xi: &BallPoint) -> Result<TubePoint> {
    let c = xi.coords();
    let n = c.len();
    let one = Complex64::new(1.0, 0.0);
    let d = one + c[n - 1];
    if d.norm() == 0.0 {
        return Err(Error::OutsideBall { norm: 1.0 });
    }
    let inv = one / d;
    let i = Complex64::i();
    let mut out = Vec::with_capacity(n);
    let mut sq = Complex64::new(0.0, 0.0);
    for &x in &c[..n - 1] {
        out.push(x * (SQRT_2 * inv));
        sq += x * x;
    }
    out.push(i * (one - c[n - 1]) * inv - i * sq * inv * inv);
    let rho = (1.0 - xi.norm_sqr()) * inv.norm_sqr();
    TubePoint::with_rho(out, rho)
}

/// Inverse of [`cayley`]: `xi' = z' / (sqrt(2) rho(z,i))`, `xi_n = (1 - rho(z,i)) / rho(z,i)`.
pub fn cayley_inv(z: &TubePoint) -> Result<BallPoint> {
    let c = z.coords();
    let n = c.len();
    let rb = pairing_with_base(c);
    let inv = Complex64::new(1.0, 0.0) / rb;
    let mut out = Vec::with_capacity(n);
    for &x in &c[..n - 1] {
        out.push(x * inv / SQRT_2);
    }
    out.push((Complex64::new(1.0, 0.0) - rb) * inv);
    BallPoint::new(out)
}

/// Real Jacobian of `Phi` at `xi`: `2^{n+1} / |1 + xi_n|^{2(n+1)}`.
pub fn jacobian_cayley(xi: &BallPoint) -> f64 {
    let n = xi.dim() as i32;
    let d = (Complex64::new(1.0, 0.0) + xi.coords()[xi.dim() - 1]).norm_sqr();
    2f64.powi(n + 1) / d.powi(n + 1)
}

/// Real Jacobian of `Phi^{-1}` at `z`: `1 / (2^{n+1} |rho(z,i)|^{2(n+1)})`.
pub fn jacobian_cayley_inv(z: &TubePoint) -> f64 {
    let n = z.dim() as i32;
    let r = pairing_with_base(z.coords()).norm_sqr();
    1.0 / (2f64.powi(n + 1) * r.powi(n + 1))
}

/// Bergman distance `tanh^{-1} sqrt(1 - rho(z) rho(w) / |rho(z,w)|^2)`.
///
/// The numerator `|rho(z,w)|^2 - rho(z)rho(w)` is evaluated in a cancellation-free
/// form built from the differences `z - w`, so nearby points keep full relative
/// accuracy; far-apart points use `ln(1 + s) - ln(comp)/2`.
pub fn bergman_distance(z: &TubePoint, w: &TubePoint) -> Result<f64> {
    if z.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: z.dim(),
            got: w.dim(),
        });
    }
    let zc = z.coords();
    let wc = w.coords();
    let n = zc.len();
    let a = pairing(zc, wc).norm_sqr();
    let comp = z.rho * w.rho / a;
    if 1.0 - comp < -DISTANCE_SLACK {
        return Err(Error::Consistency(format!(
            "1 - rho(z)rho(w)/|rho(z,w)|^2 = {:e}",
            1.0 - comp
        )));
    }

    let mut dp_sq = Complex64::new(0.0, 0.0);
    let mut dp_norm = 0.0;
    let mut e = zc[n - 1] - wc[n - 1];
    for k in 0..n - 1 {
        let d = zc[k] - wc[k];
        dp_sq += d * d;
        dp_norm += d.norm_sqr();
        e -= d * (2.0 * wc[k].im);
    }
    let q = dp_sq - Complex64::new(0.0, 2.0) * e;
    let num = w.rho * dp_norm * 0.5 + q.norm_sqr() / 16.0;
    let tanh_sq = (num / a).clamp(0.0, 1.0);
    let s = tanh_sq.sqrt();
    if s < 0.5 {
        Ok(s.atanh())
    } else {
        Ok((1.0 + s).ln() - 0.5 * comp.clamp(0.0, 1.0).ln())
    }
}

/// Holomorphic automorphisms of `T_B` used to normalise points.
#[derive(Clone, Debug, PartialEq)]
pub enum Automorphism {
    /// Non-isotropic dilation `(w', w_n) -> (t w', t^2 w_n)`.
    Dilation(f64),
    /// The affine map fixing `rho` and sending `z` to `(0', i rho(z))`.
    Shift(TubePoint),
    ShiftInverse(TubePoint),
    /// Dilation by `rho(z)^{-1/2}` after `Shift(z)`; sends `z` to `i`.
    Sigma(TubePoint),
    /// Applied left to right.
    Compose(Vec<Automorphism>),
}

impl Automorphism {
    pub fn dilation(t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!("dilation factor {t} must be > 0")));
        }
        Ok(Automorphism::Dilation(t))
    }

    pub fn inverse(&self) -> Automorphism {
        match self {
            Automorphism::Dilation(t) => Automorphism::Dilation(1.0 / t),
            Automorphism::Shift(z) => Automorphism::ShiftInverse(z.clone()),
            Automorphism::ShiftInverse(z) => Automorphism::Shift(z.clone()),
            Automorphism::Sigma(z) => Automorphism::Compose(vec![
                Automorphism::Dilation(z.rho.sqrt()),
                Automorphism::ShiftInverse(z.clone()),
            ]),
            Automorphism::Compose(parts) => {
                Automorphism::Compose(parts.iter().rev().map(|a| a.inverse()).collect())
            }
        }
    }

    /// Factor by which `rho` is multiplied.
    fn rho_scale(&self) -> f64 {
        match self {
            Automorphism::Dilation(t) => t * t,
            Automorphism::Shift(_) | Automorphism::ShiftInverse(_) => 1.0,
            Automorphism::Sigma(z) => 1.0 / z.rho,
            Automorphism::Compose(parts) => parts.iter().map(|a| a.rho_scale()).product(),
        }
    }

    /// Modulus of the (constant) complex Jacobian determinant.
    pub fn complex_jacobian(&self, n: usize) -> f64 {
        self.rho_scale().powf((n as f64 + 1.0) / 2.0)
    }

    fn map_coords(&self, w: &[Complex64]) -> Vec<Complex64> {
        let n = w.len();
        match self {
            Automorphism::Dilation(t) => {
                let mut out: Vec<Complex64> = w.iter().map(|c| c * *t).collect();
                out[n - 1] = w[n - 1] * (t * t);
                out
            }
            Automorphism::Shift(z) => {
                let zc = z.coords();
                let mut out = Vec::with_capacity(n);
                let mut last = w[n - 1] - zc[n - 1].re;
                for k in 0..n - 1 {
                    let y = zc[k].im;
                    out.push(w[k] - zc[k]);
                    last += -w[k] * (2.0 * y) + Complex64::new(2.0 * zc[k].re * y, y * y);
                }
                out.push(last);
                out
            }
            Automorphism::ShiftInverse(z) => {
                let zc = z.coords();
                let mut out = Vec::with_capacity(n);
                let mut last = w[n - 1] + zc[n - 1].re;
                for k in 0..n - 1 {
                    let y = zc[k].im;
                    let orig = w[k] + zc[k];
                    out.push(orig);
                    last += orig * (2.0 * y) - Complex64::new(2.0 * zc[k].re * y, y * y);
                }
                out.push(last);
                out
            }
            Automorphism::Sigma(z) => {
                let shifted = Automorphism::Shift(z.clone()).map_coords(w);
                Automorphism::Dilation(1.0 / z.rho.sqrt()).map_coords(&shifted)
            }
            Automorphism::Compose(parts) => {
                let mut cur = w.to_vec();
                for a in parts {
                    cur = a.map_coords(&cur);
                }
                cur
            }
        }
    }

    pub fn apply(&self, w: &TubePoint) -> Result<TubePoint> {
        if let Some(d) = self.point_dim() {
            if d != w.dim() {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: w.dim(),
                });
            }
        }
        let coords = self.map_coords(w.coords());
        let expected = w.rho * self.rho_scale();
        let from_coords = defining_function(&coords);
        let n = coords.len();
        let scale = coords[n - 1].im.abs()
            + coords[..n - 1].iter().map(|c| c.im * c.im).sum::<f64>()
            + expected;
        if (from_coords - expected).abs() > 1e-8 * scale {
            return Err(Error::Consistency(format!(
                "automorphism image has rho {from_coords:e}, expected {expected:e}"
            )));
        }
        TubePoint::with_rho(coords, expected)
    }

    fn point_dim(&self) -> Option<usize> {
        match self {
            Automorphism::Dilation(_) => None,
            Automorphism::Shift(z) | Automorphism::ShiftInverse(z) | Automorphism::Sigma(z) => {
                Some(z.dim())
            }
            Automorphism::Compose(parts) => parts.iter().find_map(|a| a.point_dim()),
        }
    }
}

pub fn apply_automorphism(a: &Automorphism, w: &TubePoint) -> Result<TubePoint> {
    a.apply(w)
}

/// Uniform sample from the real `2n`-ball of the given radius.
pub fn uniform_ball<R: Rng + ?Sized>(n: usize, radius: f64, rng: &mut R) -> Vec<Complex64> {
    let mut g: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = g.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let u: f64 = rng.random();
    let scale = radius * u.powf(1.0 / (2.0 * n as f64)) / norm;
    for c in &mut g {
        *c *= scale;
    }
    g
}

/// `Phi` of a uniform ball sample; `radius < 1` keeps points away from the boundary.
pub fn random_tube_point<R: Rng + ?Sized>(n: usize, radius: f64, rng: &mut R) -> TubePoint {
    loop {
        let xi = uniform_ball(n, radius, rng);
        if let Ok(b) = BallPoint::new(xi) {
            if let Ok(p) = cayley(&b) {
                return p;
            }
        }
    }
}

/// A uniform sample of the Bergman ball `D(center, r)`.
pub fn random_point_near<R: Rng + ?Sized>(center: &TubePoint, r: f64, rng: &mut R) -> Result<TubePoint> {
    let local = random_tube_point(center.dim(), r.tanh(), rng);
    Automorphism::Sigma(center.clone()).inverse().apply(&local)
}

/// Empirical range of `|rho(z,u)| / |rho(z,v)|` over random `z` and pairs with
/// `beta(u, v) < r`.
#[derive(Clone, Debug, Serialize)]
pub struct ComparabilityBand {
    pub r: f64,
    pub min: f64,
    pub max: f64,
    pub samples: usize,
}

pub fn pairing_ratio_band<R: Rng + ?Sized>(
    n: usize,
    r: f64,
    samples: usize,
    rng: &mut R,
) -> Result<ComparabilityBand> {
    let mut min = f64::INFINITY;
    let mut max = 0.0f64;
    for _ in 0..samples {
        let z = random_tube_point(n, 0.95, rng);
        let u = random_tube_point(n, 0.95, rng);
        let v = random_point_near(&u, r, rng)?;
        let ratio = pairing(z.coords(), u.coords()).norm() / pairing(z.coords(), v.coords()).norm();
        min = min.min(ratio);
        max = max.max(ratio);
    }
    Ok(ComparabilityBand {
        r,
        min,
        max,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pairing_at_base_points() {
        for n in 1..=3 {
            let i = TubePoint::base(n);
            assert_eq!(rho_pair(i.coords(), i.coords()).unwrap(), c(1.0, 0.0));
        }
        let w = TubePoint::on_axis(2, 1.0 / 3.0).unwrap();
        let v = rho_pair(TubePoint::base(2).coords(), w.coords()).unwrap();
        assert!((v - c(2.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = TubePoint::base(1);
        let b = TubePoint::base(2);
        assert!(matches!(
            rho_pair(a.coords(), b.coords()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(bergman_distance(&a, &b).is_err());
    }

    #[test]
    fn membership() {
        assert!(contains(&[c(0.0, 1.0)]));
        assert!(!contains(&[c(0.0, -1.0)]));
        assert!(!contains(&[c(1.0, 1.0), c(0.0, 0.5)]));
        assert!(TubePoint::new(vec![c(0.0, -1.0)]).is_err());
        assert!(TubePoint::new(vec![c(0.0, 1e-301)]).is_err());
    }

    #[test]
    fn rho_pair_with_base_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=3 {
            for _ in 0..100 {
                let z = random_tube_point(n, 0.9, &mut rng);
                let direct = pairing(z.coords(), TubePoint::base(n).coords());
                let closed = pairing_with_base(z.coords());
                assert!((direct - closed).norm() <= 1e-13 * direct.norm());
            }
        }
    }

    #[test]
    fn upper_half_plane_reduction() {
        let z = TubePoint::new(vec![c(0.3, 0.7)]).unwrap();
        let w = TubePoint::new(vec![c(-1.2, 2.0)]).unwrap();
        let expect = -Complex64::i() * (z.coords()[0] - w.coords()[0].conj()) / 2.0;
        assert!((pairing(z.coords(), w.coords()) - expect).norm() < 1e-15);
        assert!((rho(&z) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn cayley_known_values() {
        let z = cayley(&BallPoint::origin(3)).unwrap();
        assert_eq!(z, TubePoint::base(3));
        let xi = BallPoint::new(vec![c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        let w = cayley(&xi).unwrap();
        assert!((w.coords()[1] - c(0.0, 1.0 / 3.0)).norm() < 1e-15);
        let back = cayley_inv(&w).unwrap();
        assert!((back.coords()[1] - c(0.5, 0.0)).norm() < 1e-15);
        assert!(cayley_inv(&TubePoint::base(2)).unwrap().norm_sqr() < 1e-30);
        assert!(BallPoint::new(vec![c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn jacobians_at_origin() {
        assert_eq!(jacobian_cayley(&BallPoint::origin(1)), 4.0);
        assert_eq!(jacobian_cayley(&BallPoint::origin(2)), 8.0);
        assert_eq!(jacobian_cayley_inv(&TubePoint::base(1)), 0.25);
        assert_eq!(jacobian_cayley_inv(&TubePoint::base(2)), 0.125);
    }

    #[test]
    fn distance_examples() {
        let i = TubePoint::base(2);
        let w = TubePoint::on_axis(2, 1.0 / 3.0).unwrap();
        assert_eq!(bergman_distance(&i, &i).unwrap(), 0.0);
        let d = bergman_distance(&i, &w).unwrap();
        assert!((d - 0.5f64.atanh()).abs() < 1e-14, "{d}");
    }

    #[test]
    fn stable_distance_matches_naive_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=3 {
            for _ in 0..500 {
                let z = random_tube_point(n, 0.8, &mut rng);
                let w = random_tube_point(n, 0.8, &mut rng);
                let a = pairing(z.coords(), w.coords()).norm_sqr();
                let naive = (1.0 - z.rho() * w.rho() / a).max(0.0).sqrt().atanh();
                let stable = bergman_distance(&z, &w).unwrap();
                assert!((naive - stable).abs() < 1e-9 * (1.0 + naive), "{naive} {stable}");
            }
        }
    }

    #[test]
    fn sigma_sends_point_to_base() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=3 {
            for _ in 0..200 {
                let z = random_tube_point(n, 0.95, &mut rng);
                let image = Automorphism::Sigma(z.clone()).apply(&z).unwrap();
                let base = TubePoint::base(n);
                for (a, b) in image.coords().iter().zip(base.coords()) {
                    assert!((a - b).norm() < 1e-9, "{image:?}");
                }
            }
        }
    }

    #[test]
    fn dilation_example_and_inverse() {
        let d = Automorphism::dilation(2.0).unwrap();
        let img = d.apply(&TubePoint::base(2)).unwrap();
        assert_eq!(img.coords()[1], c(0.0, 4.0));
        assert!(Automorphism::dilation(0.0).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let z = random_tube_point(3, 0.9, &mut rng);
        let w = random_tube_point(3, 0.9, &mut rng);
        let s = Automorphism::Sigma(z);
        let back = s.inverse().apply(&s.apply(&w).unwrap()).unwrap();
        for (a, b) in back.coords().iter().zip(w.coords()) {
            assert!((a - b).norm() < 1e-9 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn sigma_jacobian_modulus() {
        let z = TubePoint::on_axis(2, 4.0).unwrap();
        let j = Automorphism::Sigma(z).complex_jacobian(2);
        assert!((j - 4f64.powf(-1.5)).abs() < 1e-15);
    }

    #[test]
    fn point_json_round_trip() {
        let p = TubePoint::new(vec![c(0.25, -0.5), c(1.0, 2.0)]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[[0.25,-0.5],[1.0,2.0]]");
        let q: TubePoint = serde_json::from_str(&s).unwrap();
        assert_eq!(p.coords(), q.coords());
        assert!(serde_json::from_str::<TubePoint>("[[0.0,-1.0]]").is_err());
    }
}
