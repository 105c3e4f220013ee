//! Dense complex Hermitian matrices and two independent eigensolvers: power
//! iteration (with inverse-iteration polishing and Hotelling deflation) and
//! cyclic Jacobi sweeps.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;
const START_SEED: u64 = 0x51a7_0e16;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HermitianMatrix {
    dim: usize,
    /// Row-major.
    entries: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Checks `a[j][k] = conj(a[k][j])` to `1e-13` relative to the largest entry,
    /// then stores the exactly Hermitian average.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, got: entries.len() });
        }
        let scale = entries.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut m = HermitianMatrix { dim, entries };
        for j in 0..dim {
            for k in j..dim {
                let a = m.get(j, k);
                let b = m.get(k, j).conj();
                if (a - b).norm() > 1e-13 * scale {
                    return Err(Error::InvalidParameter(format!("matrix is not Hermitian at ({j}, {k})")));
                }
                let avg = (a + b) * 0.5;
                let avg = if j == k { Complex64::new(avg.re, 0.0) } else { avg };
                m.entries[j * dim + k] = avg;
                m.entries[k * dim + j] = avg.conj();
            }
        }
        Ok(m)
    }

    /// Fills the upper triangle from `f(j, k)` and mirrors it.
    pub fn from_fn<F>(dim: usize, mut f: F) -> Self
    where
        F: FnMut(usize, usize) -> Complex64,
    {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for j in 0..dim {
            for k in j..dim {
                let v = f(j, k);
                let v = if j == k { Complex64::new(v.re, 0.0) } else { v };
                entries[j * dim + k] = v;
                entries[k * dim + j] = v.conj();
            }
        }
        HermitianMatrix { dim, entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |j, k| if j == k { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |j, k| {
            if j == k {
                Complex64::new(values[j], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.entries[j * self.dim + k]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|j| self.get(j, j).re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let d = self.dim;
        (0..d)
            .map(|j| {
                self.entries[j * d..(j + 1) * d]
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x)
                    .sum()
            })
            .collect()
    }

    /// `v^* H v / v^* v`.
    pub fn rayleigh_quotient(&self, v: &[Complex64]) -> f64 {
        let hv = self.mul_vec(v);
        let num: Complex64 = v.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum();
        num.re / v.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn scaled(&self, c: f64) -> Self {
        HermitianMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|x| x * c).collect(),
        }
    }

    fn shifted(&self, sigma: f64) -> Self {
        let mut m = self.clone();
        for j in 0..self.dim {
            m.entries[j * self.dim + j] += sigma;
        }
        m
    }

    /// `H - lambda v v^*` for unit `v`.
    fn deflate(&mut self, lambda: f64, v: &[Complex64]) {
        let d = self.dim;
        for j in 0..d {
            for k in 0..d {
                self.entries[j * d + k] -= v[j] * v[k].conj() * lambda;
            }
        }
    }

    /// All eigenvalues are at least `-tol * trace`.
    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        let ev = jacobi_eigenvalues(self, DEFAULT_TOL, 100)?;
        let floor = -tol * self.trace().abs().max(f64::MIN_POSITIVE);
        Ok(ev.iter().all(|&l| l >= floor))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<Complex64>,
    pub iterations: usize,
    pub residual: f64,
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for c in v.iter_mut() {
            *c /= n;
        }
    }
    n
}

fn residual(h: &HermitianMatrix, lambda: f64, v: &[Complex64]) -> f64 {
    h.mul_vec(v)
        .iter()
        .zip(v)
        .map(|(a, b)| (a - b * lambda).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Solves `(H - sigma I) x = b` by Gaussian elimination with partial pivoting;
/// `None` if a pivot vanishes.
fn shifted_solve(h: &HermitianMatrix, sigma: f64, b: &[Complex64]) -> Option<Vec<Complex64>> {
    let d = h.dim;
    let mut a: Vec<Complex64> = h.shifted(-sigma).entries;
    let mut x = b.to_vec();
    for col in 0..d {
        let piv = (col..d).max_by(|&p, &q| a[p * d + col].norm().total_cmp(&a[q * d + col].norm()))?;
        if a[piv * d + col].norm() == 0.0 {
            return None;
        }
        if piv != col {
            for k in 0..d {
                a.swap(piv * d + k, col * d + k);
            }
            x.swap(piv, col);
        }
        let p = a[col * d + col];
        for row in col + 1..d {
            let f = a[row * d + col] / p;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in col..d {
                let t = a[col * d + k];
                a[row * d + k] -= f * t;
            }
            let t = x[col];
            x[row] -= f * t;
        }
    }
    for row in (0..d).rev() {
        let mut s = x[row];
        for k in row + 1..d {
            s -= a[row * d + k] * x[k];
        }
        x[row] = s / a[row * d + row];
    }
    x.iter().all(|c| c.is_finite()).then_some(x)
}

/// Dominant (largest-modulus) eigenpair by power iteration; once the Rayleigh
/// quotient stalls, a few shifted inverse-iteration steps finish the job.
fn dominant_eig(h: &HermitianMatrix, tol: f64, max_iter: usize, seed: u64, scale: f64) -> Result<EigenPair> {
    let d = h.dim;
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(rand::Rng::sample(&mut rng, StandardNormal), rand::Rng::sample(&mut rng, StandardNormal)))
        .collect();
    normalize(&mut v);
    let target = tol * scale;
    let mut lambda = 0.0;
    let mut last_res = f64::INFINITY;
    let mut prev_lambda = f64::NAN;
    for it in 1..=max_iter {
        let mut w = h.mul_vec(&v);
        lambda = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
        let res = w
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b * lambda).norm_sqr())
            .sum::<f64>()
            .sqrt();
        last_res = res;
        if res <= target {
            return Ok(EigenPair { value: lambda, vector: v, iterations: it, residual: res });
        }
        if normalize(&mut w) == 0.0 {
            return Ok(EigenPair { value: 0.0, vector: v, iterations: it, residual: 0.0 });
        }
        v = w;
        if it >= 50 && it % 25 == 0 && (lambda - prev_lambda).abs() <= 1e-9 * scale {
            if let Some(p) = polish(h, lambda, &v, target) {
                if p.value.abs() >= lambda.abs() - target {
                    return Ok(EigenPair { iterations: it, ..p });
                }
            }
        }
        if it % 25 == 0 {
            prev_lambda = lambda;
        }
    }
    let _ = lambda;
    Err(Error::NoConvergence { iterations: max_iter, residual: last_res })
}

fn polish(h: &HermitianMatrix, lambda: f64, v: &[Complex64], target: f64) -> Option<EigenPair> {
    let mut v = v.to_vec();
    let mut sigma = lambda;
    for _ in 0..8 {
        // nudge the shift so the solve stays non-singular at an exact eigenvalue
        let shift = sigma + target.max(f64::EPSILON * sigma.abs()) * 1e-3;
        let mut x = shifted_solve(h, shift, &v)?;
        normalize(&mut x);
        v = x;
        sigma = h.rayleigh_quotient(&v);
        let res = residual(h, sigma, &v);
        if res <= target {
            return Some(EigenPair { value: sigma, vector: v, iterations: 0, residual: res });
        }
    }
    None
}

/// Algebraically largest eigenpair with `||Hv - lambda v|| <= tol * ||H||_F`.
pub fn hermitian_top_eig(h: &HermitianMatrix, tol: f64, max_iter: usize) -> Result<EigenPair> {
    top_eig_seeded(h, tol, max_iter, START_SEED, h.frobenius_norm())
}

fn top_eig_seeded(h: &HermitianMatrix, tol: f64, max_iter: usize, seed: u64, scale: f64) -> Result<EigenPair> {
    if scale == 0.0 {
        let mut v = vec![Complex64::new(0.0, 0.0); h.dim];
        v[0] = Complex64::new(1.0, 0.0);
        return Ok(EigenPair { value: 0.0, vector: v, iterations: 0, residual: 0.0 });
    }
    let dom = dominant_eig(h, tol, max_iter, seed, scale)?;
    if dom.value >= 0.0 {
        return Ok(dom);
    }
    // every eigenvalue lies in [dom, -dom]; shifting by -dom makes the top one dominant
    let shift = -dom.value;
    let p = dominant_eig(&h.shifted(shift), tol, max_iter, seed, scale)?;
    let value = p.value - shift;
    let residual = residual(h, value, &p.vector);
    Ok(EigenPair { value, residual, ..p })
}

/// All eigenvalues, descending, by power iteration and Hotelling deflation.
pub fn deflated_spectrum(h: &HermitianMatrix, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let scale = h.frobenius_norm();
    let mut work = h.clone();
    let mut out = Vec::with_capacity(h.dim);
    for k in 0..h.dim {
        let p = top_eig_seeded(&work, tol, max_iter, START_SEED.wrapping_add(k as u64), scale)?;
        work.deflate(p.value, &p.vector);
        out.push(p.value);
    }
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

/// All eigenvalues, descending, by cyclic complex Jacobi rotations.
pub fn jacobi_eigenvalues(h: &HermitianMatrix, tol: f64, max_sweeps: usize) -> Result<Vec<f64>> {
    let d = h.dim;
    let mut a = h.entries.clone();
    let norm = h.frobenius_norm();
    let off = |a: &[Complex64]| -> f64 {
        let mut s = 0.0;
        for j in 0..d {
            for k in 0..d {
                if j != k {
                    s += a[j * d + k].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off(&a) > tol * norm {
        if sweeps == max_sweeps {
            return Err(Error::NoConvergence { iterations: sweeps, residual: off(&a) });
        }
        sweeps += 1;
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[p * d + q];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let phase = apq / g;
                let app = a[p * d + p].re;
                let aqq = a[q * d + q].re;
                let theta = (aqq - app) / (2.0 * g);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // U = D R with D = diag(1, conj(phase)) on (p, q)
                let upp = Complex64::new(c, 0.0);
                let upq = Complex64::new(s, 0.0);
                let uqp = -phase.conj() * s;
                let uqq = phase.conj() * c;
                for k in 0..d {
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    a[k * d + p] = akp * upp + akq * uqp;
                    a[k * d + q] = akp * upq + akq * uqq;
                }
                for k in 0..d {
                    let apk = a[p * d + k];
                    let aqk = a[q * d + k];
                    a[p * d + k] = upp.conj() * apk + uqp.conj() * aqk;
                    a[q * d + k] = upq.conj() * apk + uqq.conj() * aqk;
                }
                a[p * d + q] = Complex64::new(0.0, 0.0);
                a[q * d + p] = Complex64::new(0.0, 0.0);
                a[p * d + p].im = 0.0;
                a[q * d + q].im = 0.0;
            }
        }
    }
    let mut ev: Vec<f64> = (0..d).map(|j| a[j * d + j].re).collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev)
}
