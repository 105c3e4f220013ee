//! Atomic measures on `T_B` and the quantities that characterise Carleson and
//! vanishing Carleson measures: the Berezin transform, the averaging function
//! `mu(D(z,r)) / V_alpha(D(z,r))`, the kernel-weighted integral
//! `int rho(z)^{N} / |rho(z,w)|^{2N} dmu(w)` with `N = n + alpha + 1`, and the
//! lattice ratios `mu(D(a_k, r)) / rho(a_k)^N`.
//!
//! Reports only ever describe the sampled grid or lattice; no global verdict
//! over the unbounded domain is claimed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{bergman_distance, pairing, pairing_with_base, TubePoint};
use crate::integrate::{self, IntegralEstimate, SamplerConfig};
use crate::kernel::{normalized_kernel_sq, KernelParams};
use crate::lattice::Lattice;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub point: TubePoint,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AtomicMeasure {
    n: usize,
    atoms: Vec<Atom>,
}

impl AtomicMeasure {
    pub fn new(n: usize, atoms: Vec<Atom>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        for (k, a) in atoms.iter().enumerate() {
            if a.point.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: a.point.dim() });
            }
            if !(a.mass > 0.0) || !a.mass.is_finite() {
                return Err(Error::InvalidParameter(format!("atom {k} has non-positive mass {}", a.mass)));
            }
        }
        Ok(AtomicMeasure { n, atoms })
    }

    pub fn empty(n: usize) -> Self {
        AtomicMeasure { n, atoms: Vec::new() }
    }

    pub fn dirac(point: TubePoint, mass: f64) -> Result<Self> {
        AtomicMeasure::new(point.dim(), vec![Atom { point, mass }])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        AtomicMeasure::new(
            self.n,
            self.atoms
                .iter()
                .map(|a| Atom { point: a.point.clone(), mass: a.mass * c })
                .collect(),
        )
    }

    pub fn with_atom(&self, atom: Atom) -> Result<Self> {
        let mut atoms = self.atoms.clone();
        atoms.push(atom);
        AtomicMeasure::new(self.n, atoms)
    }

    /// `mu(D(z, r))`, exact.
    pub fn mass_in_ball(&self, z: &TubePoint, r: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| bergman_distance(z, &a.point).map(|d| d < r).unwrap_or(false))
            .map(|a| a.mass)
            .sum()
    }

    /// Discretises `density dV_alpha` into atoms placed at tube samples, each
    /// carrying `density * weight / samples`.
    pub fn from_density<F>(kp: &KernelParams, density: F, cfg: &SamplerConfig) -> Result<Self>
    where
        F: Fn(&TubePoint) -> f64,
    {
        let samples = cfg.samples as f64;
        let atoms = integrate::sample_tube(kp, cfg)?
            .filter_map(|s| {
                let mass = density(&s.point) * s.weight / samples;
                (mass > 0.0 && mass.is_finite()).then_some(Atom { point: s.point, mass })
            })
            .collect();
        AtomicMeasure::new(kp.dim(), atoms)
    }

    fn check(&self, z: &TubePoint) -> Result<()> {
        if z.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: z.dim() });
        }
        Ok(())
    }
}

/// On-disk measure: `{"schema", "alpha", "n", "atoms": [{"point": [[re, im], ...], "mass"}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureDocument {
    #[serde(default = "measure_schema")]
    pub schema: String,
    pub alpha: f64,
    pub n: usize,
    pub atoms: Vec<Atom>,
}

fn measure_schema() -> String {
    "tubeberg.measure/1".to_string()
}

impl MeasureDocument {
    pub fn from_measure(mu: &AtomicMeasure, alpha: f64) -> Self {
        MeasureDocument {
            schema: measure_schema(),
            alpha,
            n: mu.dim(),
            atoms: mu.atoms.clone(),
        }
    }
}

/// Parses and validates a measure document, returning the measure and its kernel parameters.
pub fn load_measure(document: &str) -> Result<(AtomicMeasure, KernelParams)> {
    let doc: MeasureDocument = serde_json::from_str(document)?;
    let kp = KernelParams::new(doc.n, doc.alpha)?;
    let mu = AtomicMeasure::new(doc.n, doc.atoms)?;
    Ok((mu, kp))
}

/// Berezin transform `sum_j m_j |k_z(w_j)|^2`.
pub fn berezin(mu: &AtomicMeasure, z: &TubePoint, kp: &KernelParams) -> Result<f64> {
    mu.check(z)?;
    kp.check_point(z)?;
    Ok(mu
        .atoms
        .iter()
        .map(|a| a.mass * normalized_kernel_sq(z, &a.point, kp))
        .sum())
}

/// `mu(D(z, r)) / V_alpha(D(z, r))` with the volume's Monte-Carlo estimate.
#[derive(Clone, Debug, Serialize)]
pub struct Averaging {
    pub value: f64,
    pub mass: f64,
    pub volume: IntegralEstimate,
}

pub fn averaging(
    mu: &AtomicMeasure,
    z: &TubePoint,
    r: f64,
    kp: &KernelParams,
    cfg: &SamplerConfig,
) -> Result<Averaging> {
    mu.check(z)?;
    let volume = integrate::volume_ball(z, r, kp, cfg)?;
    let mass = mu.mass_in_ball(z, r);
    Ok(Averaging {
        value: mass / volume.value.re,
        mass,
        volume,
    })
}

/// `sum_j m_j rho(z)^N / |rho(z, w_j)|^{2N}`.
pub fn condition2_integral(mu: &AtomicMeasure, z: &TubePoint, kp: &KernelParams) -> Result<f64> {
    mu.check(z)?;
    let big_n = kp.exponent();
    let lr = z.rho().ln();
    Ok(mu
        .atoms
        .iter()
        .map(|a| {
            let d = pairing(z.coords(), a.point.coords()).norm_sqr().ln();
            a.mass * (big_n * (lr - d)).exp()
        })
        .sum())
}

/// `mu(D(a, r)) / rho(a)^N` for every lattice center, in lattice order.
pub fn lattice_ratios(mu: &AtomicMeasure, lattice: &Lattice, kp: &KernelParams) -> Vec<f64> {
    let big_n = kp.exponent();
    lattice
        .centers
        .par_iter()
        .map(|a| mu.mass_in_ball(a, lattice.r) / a.rho().powf(big_n))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportScope {
    pub n: usize,
    pub alpha: f64,
    pub r: f64,
    pub epsilon: f64,
    pub grid_points: usize,
    pub lattice_centers: usize,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CarlesonReport {
    pub sup_berezin: f64,
    pub argsup_berezin: Option<TubePoint>,
    pub sup_averaging: f64,
    pub sup_condition2: f64,
    pub lattice_sups: Vec<f64>,
    pub sup_lattice: f64,
    /// `V_alpha(D(i, r))`; other centers use `rho(z)^N` times this.
    pub reference_volume: IntegralEstimate,
    pub verdict_scope: ReportScope,
}

/// Sups of the Berezin transform, the averaging function and the kernel-weighted
/// integral over `grid`, plus the per-center lattice ratios.
pub fn carleson_report(
    mu: &AtomicMeasure,
    lattice: &Lattice,
    grid: &[TubePoint],
    kp: &KernelParams,
    cfg: &SamplerConfig,
) -> Result<CarlesonReport> {
    for z in grid.iter().chain(&lattice.centers) {
        mu.check(z)?;
    }
    let r = lattice.r;
    let big_n = kp.exponent();
    let reference_volume = integrate::volume_ball(&TubePoint::base(kp.dim()), r, kp, cfg)?;
    let v0 = reference_volume.value.re;

    let rows: Vec<(f64, f64, f64)> = grid
        .par_iter()
        .map(|z| {
            let b = berezin(mu, z, kp)?;
            let avg = mu.mass_in_ball(z, r) / (v0 * z.rho().powf(big_n));
            let c2 = condition2_integral(mu, z, kp)?;
            Ok((b, avg, c2))
        })
        .collect::<Result<_>>()?;

    let mut sup_berezin = 0.0;
    let mut argsup = None;
    let mut sup_averaging = 0.0f64;
    let mut sup_condition2 = 0.0f64;
    for (k, (b, avg, c2)) in rows.iter().enumerate() {
        if *b > sup_berezin {
            sup_berezin = *b;
            argsup = Some(grid[k].clone());
        }
        sup_averaging = sup_averaging.max(*avg);
        sup_condition2 = sup_condition2.max(*c2);
    }
    let lattice_sups = lattice_ratios(mu, lattice, kp);
    let sup_lattice = lattice_sups.iter().copied().fold(0.0, f64::max);
    Ok(CarlesonReport {
        sup_berezin,
        argsup_berezin: argsup,
        sup_averaging,
        sup_condition2,
        lattice_sups,
        sup_lattice,
        reference_volume,
        verdict_scope: ReportScope {
            n: kp.dim(),
            alpha: kp.alpha,
            r,
            epsilon: lattice.region.epsilon,
            grid_points: grid.len(),
            lattice_centers: lattice.len(),
            note: "sups are over the listed grid and lattice centers only".to_string(),
        },
    })
}

/// Parameters `t` of the axis points `(0', i t)` probed toward the boundary and toward infinity.
pub fn default_profile_steps() -> (Vec<f64>, Vec<f64>) {
    let toward_boundary = (0..=12).map(|k| 10f64.powf(-(k as f64) / 2.0)).collect();
    let toward_infinity = (0..=12).map(|k| 10f64.powf(k as f64 / 2.0)).collect();
    (toward_boundary, toward_infinity)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfilePoint {
    pub t: f64,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeProfilePoint {
    pub rho: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VanishingProfile {
    pub toward_boundary: Vec<ProfilePoint>,
    pub toward_infinity: Vec<ProfilePoint>,
    /// Lattice ratios ordered by increasing `rho(a_k)`.
    pub lattice: Vec<LatticeProfilePoint>,
}

impl VanishingProfile {
    /// Every series ends below `tol` times its own peak.
    pub fn vanishes(&self, tol: f64) -> bool {
        let ends_small = |s: &[f64]| {
            let peak = s.iter().copied().fold(0.0, f64::max);
            s.last().map(|&v| v <= tol * peak).unwrap_or(true)
        };
        let b: Vec<f64> = self.toward_boundary.iter().map(|p| p.value).collect();
        let i: Vec<f64> = self.toward_infinity.iter().map(|p| p.value).collect();
        ends_small(&b) && ends_small(&i)
    }
}

/// The kernel-weighted integral along `(0', i t)` as `t -> 0+` and `t -> inf`,
/// and the lattice ratios sorted toward the boundary.
pub fn vanishing_profile(mu: &AtomicMeasure, lattice: &Lattice, kp: &KernelParams) -> Result<VanishingProfile> {
    let (down, up) = default_profile_steps();
    vanishing_profile_with(mu, lattice, kp, &down, &up)
}

pub fn vanishing_profile_with(
    mu: &AtomicMeasure,
    lattice: &Lattice,
    kp: &KernelParams,
    toward_boundary: &[f64],
    toward_infinity: &[f64],
) -> Result<VanishingProfile> {
    let n = kp.dim();
    let series = |ts: &[f64]| -> Result<Vec<ProfilePoint>> {
        ts.iter()
            .map(|&t| {
                let z = TubePoint::on_axis(n, t)?;
                Ok(ProfilePoint { t, value: condition2_integral(mu, &z, kp)? })
            })
            .collect()
    };
    let ratios = lattice_ratios(mu, lattice, kp);
    let mut lat: Vec<LatticeProfilePoint> = lattice
        .centers
        .iter()
        .zip(ratios)
        .map(|(a, ratio)| LatticeProfilePoint { rho: a.rho(), ratio })
        .collect();
    lat.sort_by(|a, b| a.rho.total_cmp(&b.rho));
    Ok(VanishingProfile {
        toward_boundary: series(toward_boundary)?,
        toward_infinity: series(toward_infinity)?,
        lattice: lat,
    })
}

/// `int dmu / |rho(z, i)|^t`; finite for every atomic measure.
pub fn mplus_value(mu: &AtomicMeasure, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("t = {t} must be > 0")));
    }
    Ok(mu
        .atoms
        .iter()
        .map(|a| a.mass * pairing_with_base(a.point.coords()).norm().powf(-t))
        .sum())
}

/// Volume of `D(i, r)` shared by the averaging denominators.
pub fn reference_volume(kp: &KernelParams, r: f64, cfg: &SamplerConfig) -> Result<IntegralEstimate> {
    integrate::volume_ball(&TubePoint::base(kp.dim()), r, kp, cfg)
}
