//! `r`-lattices in the Bergman metric.
//!
//! The domain is unbounded, so every lattice lives in a truncation
//! `Phi({ |xi| <= 1 - epsilon })`. Centers are a greedy maximal
//! `(r/2)`-separated subset of a dense probe cloud: separation holds by
//! construction, maximality gives covering of the cloud at radius `r/2`, and the
//! overlap count of the `2r`-balls is measured on fresh probes.
//!
//! Neighbour search is brute force, `O(#centers)` per query.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{bergman_distance, cayley, cayley_inv, uniform_ball, BallPoint, TubePoint};

/// Probe cloud size used by [`build_lattice`].
pub const DEFAULT_CANDIDATES: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub epsilon: f64,
}

impl RegionSpec {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must lie in (0, 1)")));
        }
        Ok(RegionSpec { epsilon })
    }

    pub fn ball_radius(&self) -> f64 {
        1.0 - self.epsilon
    }

    pub fn contains(&self, z: &TubePoint) -> bool {
        cayley_inv(z)
            .map(|xi| xi.norm_sqr().sqrt() <= self.ball_radius())
            .unwrap_or(false)
    }

    /// Uniform (in the ball model) points of the region.
    pub fn probes(&self, n: usize, count: usize, seed: u64) -> Vec<TubePoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let radius = self.ball_radius();
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let xi = uniform_ball(n, radius, &mut rng);
            if let Ok(p) = BallPoint::new(xi).and_then(|b| cayley(&b)) {
                out.push(p);
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub n: usize,
    pub r: f64,
    #[serde(flatten)]
    pub region: RegionSpec,
    pub centers: Vec<TubePoint>,
    #[serde(rename = "empirical_N")]
    pub empirical_n: Option<usize>,
}

impl Lattice {
    pub fn new(n: usize, r: f64, region: RegionSpec, centers: Vec<TubePoint>) -> Result<Self> {
        check_radius(r)?;
        if let Some(bad) = centers.iter().find(|c| c.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: bad.dim() });
        }
        Ok(Lattice {
            n,
            r,
            region,
            centers,
            empirical_n: None,
        })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    fn distance_to_nearest(&self, z: &TubePoint) -> f64 {
        self.centers
            .iter()
            .filter_map(|c| bergman_distance(c, z).ok())
            .fold(f64::INFINITY, f64::min)
    }

    fn count_within(&self, z: &TubePoint, radius: f64) -> usize {
        self.centers
            .iter()
            .filter(|c| bergman_distance(c, z).map(|d| d < radius).unwrap_or(false))
            .count()
    }
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::InvalidParameter(format!("lattice radius r = {r} must lie in (0, 1]")));
    }
    Ok(())
}

/// Greedy maximal `(r/2)`-separated subset of [`DEFAULT_CANDIDATES`] probes.
pub fn build_lattice(n: usize, r: f64, region: RegionSpec, seed: u64) -> Result<Lattice> {
    build_lattice_with(n, r, region, seed, DEFAULT_CANDIDATES)
}

pub fn build_lattice_with(n: usize, r: f64, region: RegionSpec, seed: u64, candidates: usize) -> Result<Lattice> {
    check_radius(r)?;
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let cloud = region.probes(n, candidates, seed);
    let separation = r / 2.0;
    let mut centers: Vec<TubePoint> = Vec::new();
    for p in cloud {
        let far = centers
            .iter()
            .all(|c| bergman_distance(c, &p).map(|d| d >= separation).unwrap_or(false));
        if far {
            centers.push(p);
        }
    }
    Lattice::new(n, r, region, centers)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverReport {
    pub probes: usize,
    pub inside_region: usize,
    pub uncovered_inside: usize,
    pub uncovered_outside: usize,
    /// `uncovered_inside / inside_region`.
    pub uncovered_fraction: f64,
}

/// Fraction of fresh region probes outside every `D(a_k, r)`.
pub fn verify_cover(l: &Lattice, probes: usize, seed: u64) -> CoverReport {
    let pts = l.region.probes(l.n, probes, seed);
    cover_report(l, &pts)
}

/// Coverage of arbitrary points; points outside the region are tallied separately.
pub fn cover_report(l: &Lattice, points: &[TubePoint]) -> CoverReport {
    let flags: Vec<(bool, bool)> = points
        .par_iter()
        .map(|p| (l.region.contains(p), l.distance_to_nearest(p) < l.r))
        .collect();
    let inside_region = flags.iter().filter(|(inside, _)| *inside).count();
    let uncovered_inside = flags.iter().filter(|(i, c)| *i && !*c).count();
    let uncovered_outside = flags.iter().filter(|(i, c)| !*i && !*c).count();
    CoverReport {
        probes: points.len(),
        inside_region,
        uncovered_inside,
        uncovered_outside,
        uncovered_fraction: if inside_region == 0 {
            0.0
        } else {
            uncovered_inside as f64 / inside_region as f64
        },
    }
}

/// Smallest pairwise distance between centers (`inf` for fewer than two).
pub fn min_separation(l: &Lattice) -> f64 {
    let c = &l.centers;
    (0..c.len())
        .into_par_iter()
        .map(|j| {
            c[j + 1..]
                .iter()
                .map(|b| bergman_distance(&c[j], b).unwrap_or(0.0))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min)
}

/// `true` iff all pairwise distances are at least `r/2`, so the `D(a_k, r/4)` are disjoint.
pub fn verify_separation(l: &Lattice) -> bool {
    min_separation(l) >= l.r / 2.0
}

/// `max_probe #{k : beta(a_k, probe) < 2r}` over fresh region probes.
pub fn multiplicity(l: &Lattice, probes: usize, seed: u64) -> usize {
    let pts = l.region.probes(l.n, probes, seed);
    multiplicity_at(l, &pts)
}

pub fn multiplicity_at(l: &Lattice, points: &[TubePoint]) -> usize {
    points
        .par_iter()
        .map(|p| l.count_within(p, 2.0 * l.r))
        .max()
        .unwrap_or(0)
}

/// Runs [`multiplicity`] and stores the result in `empirical_n`.
pub fn record_multiplicity(l: &mut Lattice, probes: usize, seed: u64) -> usize {
    let m = multiplicity(l, probes, seed);
    l.empirical_n = Some(m);
    m
}
