//! Toeplitz operators with atomic symbols.
//!
//! For `mu = sum_j m_j delta_{w_j}` the operator is
//! `T_mu = sum_j m_j <., K_{w_j}> K_{w_j}`, which acts on the span of the
//! `K_{w_j}` through `M G` (`G` the Gram matrix, `M = diag(m)`). Its nonzero
//! spectrum is that of the Hermitian `M^{1/2} G M^{1/2}`, stored as `core`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{pairing, TubePoint};
use crate::kernel::{bergman_kernel, kernel_diagonal, KernelParams};
use crate::linalg::{self, EigenPair, HermitianMatrix, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::measures::AtomicMeasure;

/// Gram matrix `G_{jk} = K_alpha(w_j, w_k)` with the index pairs of coincident points.
#[derive(Clone, Debug, Serialize)]
pub struct Gram {
    pub matrix: HermitianMatrix,
    pub coincident: Vec<(usize, usize)>,
}

impl Gram {
    /// Coincident points make `G` singular.
    pub fn rank_deficient(&self) -> bool {
        !self.coincident.is_empty()
    }
}

fn upper_entries<F>(d: usize, f: F) -> Result<Vec<Complex64>>
where
    F: Fn(usize, usize) -> Result<Complex64> + Sync,
{
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|j| (j..d).map(move |k| (j, k))).collect();
    let vals: Vec<Complex64> = pairs.par_iter().map(|&(j, k)| f(j, k)).collect::<Result<_>>()?;
    let mut full = vec![Complex64::new(0.0, 0.0); d * d];
    for (&(j, k), v) in pairs.iter().zip(vals) {
        full[j * d + k] = v;
    }
    Ok(full)
}

pub fn gram(points: &[TubePoint], kp: &KernelParams) -> Result<Gram> {
    for p in points {
        if p.dim() != kp.dim() {
            return Err(Error::DimensionMismatch { expected: kp.dim(), got: p.dim() });
        }
    }
    let d = points.len();
    let upper = upper_entries(d, |j, k| {
        if j == k {
            Ok(Complex64::new(kernel_diagonal(&points[j], kp), 0.0))
        } else {
            bergman_kernel(&points[j], &points[k], kp)
        }
    })?;
    let coincident = (0..d)
        .flat_map(|j| (j + 1..d).map(move |k| (j, k)))
        .filter(|&(j, k)| points[j] == points[k])
        .collect();
    Ok(Gram {
        matrix: HermitianMatrix::from_fn(d, |j, k| upper[j * d + k]),
        coincident,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ToeplitzModel {
    pub mu: AtomicMeasure,
    pub kp: KernelParams,
    pub gram: Gram,
    /// `M^{1/2} G M^{1/2}`.
    pub core: HermitianMatrix,
}

pub fn build_model(mu: &AtomicMeasure, kp: &KernelParams) -> Result<ToeplitzModel> {
    if mu.dim() != kp.dim() {
        return Err(Error::DimensionMismatch { expected: kp.dim(), got: mu.dim() });
    }
    let points: Vec<TubePoint> = mu.atoms().iter().map(|a| a.point.clone()).collect();
    let g = gram(&points, kp)?;
    let roots: Vec<f64> = mu.atoms().iter().map(|a| a.mass.sqrt()).collect();
    let core = HermitianMatrix::from_fn(points.len(), |j, k| g.matrix.get(j, k) * (roots[j] * roots[k]));
    Ok(ToeplitzModel {
        mu: mu.clone(),
        kp: *kp,
        gram: g,
        core,
    })
}

impl ToeplitzModel {
    pub fn rank_bound(&self) -> usize {
        self.core.dim()
    }

    /// `sum_j m_j K(w_j, w_j)`.
    pub fn trace(&self) -> f64 {
        self.mu
            .atoms()
            .iter()
            .map(|a| a.mass * kernel_diagonal(&a.point, &self.kp))
            .sum()
    }
}

/// Top eigenpair of the core; the eigenvalue is `||T_mu||` on `A^2_alpha`.
pub fn top_eigenpair(tm: &ToeplitzModel) -> Result<EigenPair> {
    if tm.core.dim() == 0 {
        return Ok(EigenPair { value: 0.0, vector: Vec::new(), iterations: 0, residual: 0.0 });
    }
    linalg::hermitian_top_eig(&tm.core, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

pub fn operator_norm(tm: &ToeplitzModel) -> Result<f64> {
    Ok(top_eigenpair(tm)?.value.max(0.0))
}

/// All eigenvalues of the core, descending.
pub fn spectral_profile(tm: &ToeplitzModel) -> Result<Vec<f64>> {
    linalg::deflated_spectrum(&tm.core, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

/// Finite combination `f = sum_j c_j K_alpha(., u_j)`, tagged with the weight
/// exponent `t` of the space `S_t` it is meant to belong to.
#[derive(Clone, Debug, Serialize)]
pub struct KernelCombination {
    pub t: f64,
    pub terms: Vec<(Complex64, TubePoint)>,
}

pub type FunctionSt = KernelCombination;

impl KernelCombination {
    pub fn new(t: f64, terms: Vec<(Complex64, TubePoint)>) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("weight exponent t = {t} must be finite and >= 0")));
        }
        Ok(KernelCombination { t, terms })
    }

    /// Single term `K_alpha(., u)`.
    pub fn kernel_at(t: f64, u: TubePoint) -> Result<Self> {
        Self::new(t, vec![(Complex64::new(1.0, 0.0), u)])
    }

    pub fn eval(&self, z: &TubePoint, kp: &KernelParams) -> Result<Complex64> {
        let mut s = Complex64::new(0.0, 0.0);
        for (c, u) in &self.terms {
            s += c * bergman_kernel(z, u, kp)?;
        }
        Ok(s)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        KernelCombination {
            t: self.t,
            terms: self.terms.iter().map(|(a, u)| (a * c, u.clone())).collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        KernelCombination {
            t: self.t.min(other.t),
            terms: self.terms.iter().chain(&other.terms).cloned().collect(),
        }
    }

    /// `max_probe |rho(z, i)|^t |f(z)|`.
    pub fn st_sup(&self, probes: &[TubePoint], kp: &KernelParams) -> Result<f64> {
        let base = TubePoint::base(kp.dim());
        probes
            .par_iter()
            .map(|z| {
                let w = pairing(z.coords(), base.coords()).norm().powf(self.t);
                Ok(w * self.eval(z, kp)?.norm())
            })
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
    }
}

/// `T_mu f(z) = sum_j m_j K_alpha(z, w_j) f(w_j)`.
pub fn apply(tm: &ToeplitzModel, f: &KernelCombination, z: &TubePoint) -> Result<Complex64> {
    let mut s = Complex64::new(0.0, 0.0);
    for a in tm.mu.atoms() {
        s += bergman_kernel(z, &a.point, &tm.kp)? * f.eval(&a.point, &tm.kp)? * a.mass;
    }
    Ok(s)
}

/// `<T_mu f, f> = sum_j m_j |f(w_j)|^2`.
pub fn quadratic_form(tm: &ToeplitzModel, f: &KernelCombination) -> Result<f64> {
    let mut s = 0.0;
    for a in tm.mu.atoms() {
        s += a.mass * f.eval(&a.point, &tm.kp)?.norm_sqr();
    }
    Ok(s)
}

/// `<T_mu k_z, k_z> = sum_j m_j |K(w_j, z)|^2 / K(z, z)`.
pub fn berezin_via_operator(tm: &ToeplitzModel, z: &TubePoint) -> Result<f64> {
    let kzz = kernel_diagonal(z, &tm.kp);
    let mut s = 0.0;
    for a in tm.mu.atoms() {
        s += a.mass * bergman_kernel(&a.point, z, &tm.kp)?.norm_sqr();
    }
    Ok(s / kzz)
}

/// Norm, spectrum and the Berezin cross-check over a grid.
#[derive(Clone, Debug, Serialize)]
pub struct ToeplitzReport {
    pub norm: f64,
    pub eigenvalues: Vec<f64>,
    pub trace: f64,
    pub berezin_sup: f64,
    /// Largest relative gap between the two Berezin evaluations on the grid.
    pub consistency_max_err: f64,
    pub rank_deficient: bool,
}

pub fn toeplitz_report(tm: &ToeplitzModel, grid: &[TubePoint]) -> Result<ToeplitzReport> {
    let norm = operator_norm(tm)?;
    let eigenvalues = spectral_profile(tm)?;
    let pairs: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|z| Ok((berezin_via_operator(tm, z)?, crate::measures::berezin(&tm.mu, z, &tm.kp)?)))
        .collect::<Result<_>>()?;
    let berezin_sup = pairs.iter().map(|p| p.0).fold(0.0, f64::max);
    let consistency_max_err = pairs
        .iter()
        .map(|&(a, b)| {
            let scale = a.abs().max(b.abs());
            if scale == 0.0 {
                0.0
            } else {
                (a - b).abs() / scale
            }
        })
        .fold(0.0, f64::max);
    Ok(ToeplitzReport {
        norm,
        eigenvalues,
        trace: tm.trace(),
        berezin_sup,
        consistency_max_err,
        rank_deficient: tm.gram.rank_deficient(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Atom;
    use std::f64::consts::PI;

    fn kp10() -> KernelParams {
        KernelParams::new(1, 0.0).unwrap()
    }

    fn pt(re: f64, im: f64) -> TubePoint {
        TubePoint::new(vec![Complex64::new(re, im)]).unwrap()
    }

    #[test]
    fn single_point_gram() {
        let g = gram(&[TubePoint::base(1)], &kp10()).unwrap();
        assert!((g.matrix.get(0, 0).re - 1.0 / (4.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn single_atom_norm() {
        let mu = AtomicMeasure::dirac(TubePoint::base(1), 1.0).unwrap();
        let tm = build_model(&mu, &kp10()).unwrap();
        let norm = operator_norm(&tm).unwrap();
        assert!((norm - 1.0 / (4.0 * PI)).abs() < 1e-12 / (4.0 * PI));
    }

    #[test]
    fn two_by_two_gram_is_psd() {
        let g = gram(&[pt(0.0, 1.0), pt(0.3, 0.5)], &kp10()).unwrap();
        let m = &g.matrix;
        let det = m.get(0, 0).re * m.get(1, 1).re - m.get(0, 1).norm_sqr();
        assert!(det >= 0.0);
        assert!(!g.rank_deficient());
    }

    #[test]
    fn coincident_points_are_flagged() {
        let g = gram(&[pt(0.0, 1.0), pt(0.0, 1.0)], &kp10()).unwrap();
        assert_eq!(g.coincident, vec![(0, 1)]);
    }

    #[test]
    fn far_points_give_nearly_diagonal_gram() {
        let g = gram(&[pt(0.0, 1.0), pt(1e4, 1.0)], &kp10()).unwrap();
        assert!(g.matrix.get(0, 1).norm() < 1e-7 * g.matrix.get(0, 0).re);
    }

    #[test]
    fn apply_and_berezin_for_single_atom() {
        let kp = kp10();
        let u = pt(0.2, 0.7);
        let mu = AtomicMeasure::dirac(u.clone(), 2.0).unwrap();
        let tm = build_model(&mu, &kp).unwrap();
        let f = KernelCombination::kernel_at(0.0, u.clone()).unwrap();
        let v = apply(&tm, &f, &u).unwrap();
        let kuu = kernel_diagonal(&u, &kp);
        assert!((v.re - 2.0 * kuu * kuu).abs() < 1e-12 * v.re);
        let b = berezin_via_operator(&tm, &u).unwrap();
        assert!((b - 2.0 * kuu).abs() < 1e-12 * b);
    }

    #[test]
    fn zero_measure() {
        let tm = build_model(&AtomicMeasure::empty(1), &kp10()).unwrap();
        assert_eq!(operator_norm(&tm).unwrap(), 0.0);
        assert_eq!(berezin_via_operator(&tm, &TubePoint::base(1)).unwrap(), 0.0);
    }

    #[test]
    fn doubling_masses_doubles_norm() {
        let kp = kp10();
        let mu = AtomicMeasure::new(
            1,
            vec![
                Atom { point: pt(0.0, 1.0), mass: 1.0 },
                Atom { point: pt(0.5, 0.3), mass: 0.2 },
            ],
        )
        .unwrap();
        let a = operator_norm(&build_model(&mu, &kp).unwrap()).unwrap();
        let b = operator_norm(&build_model(&mu.scaled(2.0).unwrap(), &kp).unwrap()).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-12 * b);
    }

    #[test]
    fn st_sup_finite_for_kernel() {
        let kp = kp10();
        let f = KernelCombination::kernel_at(2.0, TubePoint::base(1)).unwrap();
        let probes = crate::kernel::compact_probe_set(1, 0.99, 200, 4);
        let s = f.st_sup(&probes, &kp).unwrap();
        assert!(s.is_finite() && s > 0.0);
    }
}
