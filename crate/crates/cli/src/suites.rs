//! Verification suites run by `tubeberg verify`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use tubeberg::geometry::{
    bergman_distance, cayley, cayley_inv, inner, jacobian_cayley, jacobian_cayley_inv, random_point_near,
    random_tube_point, rho_pair, uniform_ball,
};
use tubeberg::integrate::{self, rf_exact, rf_mc, volume_ball};
use tubeberg::lattice::{build_lattice, multiplicity, verify_cover, verify_separation};
use tubeberg::linalg::jacobi_eigenvalues;
use tubeberg::measures::{berezin, condition2_integral, vanishing_profile};
use tubeberg::toeplitz::{berezin_via_operator, build_model, operator_norm, spectral_profile};
use tubeberg::{
    kernel_diagonal, normalized_kernel, Atom, AtomicMeasure, Automorphism, BallPoint, Complex64, KernelParams,
    RFParams, RegionSpec, SamplerConfig, TubePoint,
};

/// `(name, alias, description)`.
pub const REGISTRY: &[(&str, &str, &str)] = &[
    ("biholomorphism", "lemma36", "Cayley map round trip, pairing identities, Jacobians"),
    ("metric", "lemma37", "Bergman distance axioms, invariance, ball model, 2|rho(z,w)| >= max rho"),
    ("two-kernel", "lemma35", "Monte-Carlo two-kernel integrals and kernel normalization"),
    ("lattice", "lemma31", "r-lattice separation, covering and multiplicity"),
    ("carleson", "theorem41", "Carleson diagnostics for a point mass"),
    ("toeplitz", "theorem61", "Toeplitz norm, spectrum and Berezin consistency"),
    ("all", "all", "every suite above"),
];

pub fn lookup(name: &str) -> Option<&'static str> {
    REGISTRY.iter().find(|(s, a, _)| *s == name || *a == name).map(|(s, _, _)| *s)
}

#[derive(Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
    pub detail: String,
}

/// `value <= bound`.
fn at_most(name: &str, value: f64, bound: f64) -> Check {
    Check {
        name: name.to_string(),
        value,
        bound,
        pass: value <= bound,
        detail: format!("{value:.3e} <= {bound:.1e}"),
    }
}

fn holds(name: &str, pass: bool, detail: String) -> Check {
    Check {
        name: name.to_string(),
        value: if pass { 1.0 } else { 0.0 },
        bound: 1.0,
        pass,
        detail,
    }
}

pub fn run(suite: &str, kp: &KernelParams, cfg: &SamplerConfig) -> tubeberg::Result<Vec<Check>> {
    Ok(match suite {
        "biholomorphism" => biholomorphism(kp.dim(), cfg.seed),
        "metric" => metric(kp.dim(), cfg.seed)?,
        "two-kernel" => two_kernel(kp, cfg)?,
        "lattice" => lattice(kp.dim(), cfg.seed)?,
        "carleson" => carleson(kp, cfg)?,
        "toeplitz" => toeplitz(kp, cfg.seed)?,
        _ => {
            let mut all = Vec::new();
            for (name, _, _) in REGISTRY.iter().filter(|s| s.0 != "all") {
                all.extend(run(name, kp, cfg)?);
            }
            all
        }
    })
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ball_point<R: Rng>(n: usize, radius: f64, rng: &mut R) -> BallPoint {
    BallPoint::new(uniform_ball(n, radius, rng)).expect("radius < 1")
}

fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn det(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let d = m.len();
    let mut out = c(1.0, 0.0);
    for col in 0..d {
        let piv = (col..d).max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm())).unwrap_or(col);
        if piv != col {
            m.swap(piv, col);
            out = -out;
        }
        let p = m[col][col];
        out *= p;
        for row in col + 1..d {
            let f = m[row][col] / p;
            let (top, bottom) = m.split_at_mut(row);
            for (x, y) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *x -= f * y;
            }
        }
    }
    out
}

fn fd_jacobian<F: Fn(&[Complex64]) -> Vec<Complex64>>(f: F, x: &[Complex64]) -> f64 {
    const H: f64 = 1e-5;
    let n = x.len();
    let mut cols = vec![vec![c(0.0, 0.0); n]; n];
    for k in 0..n {
        let (mut p, mut q) = (x.to_vec(), x.to_vec());
        p[k] += H;
        q[k] -= H;
        let (fp, fq) = (f(&p), f(&q));
        for j in 0..n {
            cols[j][k] = (fp[j] - fq[j]) / (2.0 * H);
        }
    }
    det(cols).norm_sqr()
}

fn biholomorphism(n: usize, seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = TubePoint::base(n);
    let mut trip = 0.0f64;
    for _ in 0..100_000 {
        let xi = ball_point(n, 0.99, &mut rng);
        let z = cayley(&xi).expect("ball point");
        let back = cayley_inv(&z).expect("tube point");
        trip = trip.max(dist(back.coords(), xi.coords()));
    }
    let (mut id3, mut id4) = (0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let xi = ball_point(n, 0.95, &mut rng);
        let eta = ball_point(n, 0.95, &mut rng);
        let (z, w) = (cayley(&xi).expect("ball point"), cayley(&eta).expect("ball point"));
        let rzw = rho_pair(z.coords(), w.coords()).expect("same dimension");
        let rzi = rho_pair(z.coords(), base.coords()).expect("same dimension");
        let riw = rho_pair(base.coords(), w.coords()).expect("same dimension");
        let one = c(1.0, 0.0) - inner(xi.coords(), eta.coords());
        id3 = id3.max((one - rzw / (rzi * riw)).norm() / one.norm());
        let denom = (c(1.0, 0.0) + xi.coords()[n - 1]) * (c(1.0, 0.0) + eta.coords()[n - 1].conj());
        id4 = id4.max((rzw - one / denom).norm() / rzw.norm());
    }
    let mut jac = 0.0f64;
    for _ in 0..100 {
        let xi = ball_point(n, 0.9, &mut rng);
        let fd = fd_jacobian(
            |p| match BallPoint::new(p.to_vec()).and_then(|b| cayley(&b)) {
                Ok(z) => z.into_coords(),
                Err(_) => vec![c(f64::NAN, 0.0); p.len()],
            },
            xi.coords(),
        );
        jac = jac.max((fd - jacobian_cayley(&xi)).abs() / jacobian_cayley(&xi));
        let z = cayley(&xi).expect("ball point");
        let fd = fd_jacobian(
            |p| match TubePoint::new(p.to_vec()).and_then(|t| cayley_inv(&t)) {
                Ok(b) => b.coords().to_vec(),
                Err(_) => vec![c(f64::NAN, 0.0); p.len()],
            },
            z.coords(),
        );
        jac = jac.max((fd - jacobian_cayley_inv(&z)).abs() / jacobian_cayley_inv(&z));
    }
    vec![
        at_most("cayley round trip", trip, 1e-10),
        at_most("1 - <xi, eta> identity", id3, 1e-10),
        at_most("pairing of Cayley images", id4, 1e-10),
        at_most("jacobians vs finite differences", jac, 1e-5),
    ]
}

/// Ball-model distance with the numerator written as a sum of squares.
fn ball_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let denom = (c(1.0, 0.0) - inner(a, b)).norm_sqr();
    let mut minors = 0.0;
    for j in 0..a.len() {
        for k in j + 1..a.len() {
            minors += (a[j] * b[k] - a[k] * b[j]).norm_sqr();
        }
    }
    let s = ((dist(a, b).powi(2) - minors) / denom).max(0.0).sqrt();
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|x| x.norm_sqr()).sum();
    if s < 0.5 {
        s.atanh()
    } else {
        s.ln_1p() - 0.5 * ((1.0 - na) * (1.0 - nb) / denom).ln()
    }
}

fn metric(n: usize, seed: u64) -> tubeberg::Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut zero, mut sym, mut tri, mut inv, mut model) = (0.0f64, 0.0f64, f64::NEG_INFINITY, 0.0f64, 0.0f64);
    for k in 0..10_000 {
        let z = random_tube_point(n, 0.95, &mut rng);
        let w = if k % 2 == 0 { random_tube_point(n, 0.95, &mut rng) } else { random_point_near(&z, 0.05, &mut rng)? };
        let v = random_tube_point(n, 0.95, &mut rng);
        let d = bergman_distance(&z, &w)?;
        zero = zero.max(bergman_distance(&z, &z)?);
        sym = sym.max((d - bergman_distance(&w, &z)?).abs());
        tri = tri.max(d - bergman_distance(&z, &v)? - bergman_distance(&v, &w)?);
        let s = Automorphism::Sigma(v);
        inv = inv.max((bergman_distance(&s.apply(&z)?, &s.apply(&w)?)? - d).abs() / d.max(1.0));
        let bd = ball_distance(cayley_inv(&z)?.coords(), cayley_inv(&w)?.coords());
        model = model.max((bd - d).abs() / d.max(1.0));
    }
    let mut violations = 0usize;
    let mut tightest = f64::INFINITY;
    for _ in 0..1_000_000 {
        let z = random_tube_point(n, 0.999, &mut rng);
        let w = random_tube_point(n, 0.999, &mut rng);
        let lhs = 2.0 * rho_pair(z.coords(), w.coords())?.norm();
        let rhs = z.rho().max(w.rho());
        tightest = tightest.min(lhs / rhs);
        if lhs < rhs * (1.0 - 1e-12) {
            violations += 1;
        }
    }
    Ok(vec![
        at_most("beta(z, z)", zero, 0.0),
        at_most("symmetry", sym, 1e-12),
        at_most("triangle excess", tri, 1e-9),
        at_most("invariance under sigma", inv, 1e-9),
        at_most("tube vs ball model", model, 1e-10),
        holds(
            "2|rho(z,w)| >= max(rho(z), rho(w))",
            violations == 0,
            format!("{violations} violations in 10^6 pairs, smallest ratio {tightest:.6}"),
        ),
    ])
}

fn mc_check(name: &str, est: &tubeberg::IntegralEstimate, exact: Complex64) -> Check {
    let sigma = est.sigma_distance(exact);
    let rel = est.relative_stderr();
    let exact_hit = (est.value - exact).norm() <= 1e-12 * exact.norm();
    let pass = (est.agrees_with(exact, 3.0) || exact_hit) && rel < 0.02;
    Check {
        name: name.to_string(),
        value: sigma,
        bound: 3.0,
        pass,
        detail: format!(
            "mc {:.6}{:+.6}i exact {:.6}{:+.6}i, {sigma:.2} sigma, rel stderr {rel:.1e}",
            est.value.re, est.value.im, exact.re, exact.im
        ),
    }
}

fn two_kernel(kp: &KernelParams, cfg: &SamplerConfig) -> tubeberg::Result<Vec<Check>> {
    let n = kp.dim();
    let big_n = kp.exponent();
    let z = TubePoint::base(n);
    let mut uc = vec![c(0.2, 0.1); n];
    uc[n - 1] = c(0.3, 0.9);
    let u = TubePoint::new(uc)?;
    let mut out = Vec::new();
    for (label, rf) in [
        ("self reproduction (N, N, alpha)", RFParams::new(big_n, big_n, kp.alpha)),
        ("(N+1, N+1, alpha+1)", RFParams::new(big_n + 1.0, big_n + 1.0, kp.alpha + 1.0)),
    ] {
        let est = rf_mc(n, &rf, &z, &u, cfg)?;
        out.push(mc_check(&format!("two-kernel {label}"), &est, rf_exact(n, &rf, &z, &u)?));
    }
    let norm = integrate::integrate(
        |w| Complex64::from(normalized_kernel(&u, w, kp).map(|k| k.norm_sqr()).unwrap_or(f64::NAN)),
        kp,
        cfg,
    )?;
    out.push(mc_check("int |k_u|^2 dV_alpha = 1", &norm, c(1.0, 0.0)));
    Ok(out)
}

fn lattice(n: usize, seed: u64) -> tubeberg::Result<Vec<Check>> {
    let (r, eps) = if n == 1 { (0.5, 0.05) } else { (1.0, 0.5) };
    let l = build_lattice(n, r, RegionSpec::new(eps)?, seed)?;
    let cover = verify_cover(&l, 100_000, seed.wrapping_add(1));
    let small = multiplicity(&l, 10_000, seed.wrapping_add(2));
    let large = multiplicity(&l, 100_000, seed.wrapping_add(3));
    Ok(vec![
        holds("separation", verify_separation(&l), format!("{} centers, r = {r}, epsilon = {eps}", l.len())),
        holds(
            "covering",
            cover.uncovered_inside == 0,
            format!("{} of {} probes uncovered", cover.uncovered_inside, cover.inside_region),
        ),
        holds("multiplicity stable", small.abs_diff(large) <= 1, format!("N = {small} vs {large}")),
    ])
}

fn carleson(kp: &KernelParams, cfg: &SamplerConfig) -> tubeberg::Result<Vec<Check>> {
    let n = kp.dim();
    let i = TubePoint::base(n);
    let mu = AtomicMeasure::dirac(i.clone(), 1.0)?;
    let c2 = condition2_integral(&mu, &i, kp)?;
    let l = build_lattice(n, 1.0, RegionSpec::new(0.5)?, cfg.seed)?;
    let profile = vanishing_profile(&mu, &l, kp)?;
    let down: Vec<f64> = profile.toward_boundary.iter().map(|p| p.value).collect();
    let up: Vec<f64> = profile.toward_infinity.iter().map(|p| p.value).collect();
    let decreasing = |s: &[f64]| s.windows(2).all(|w| w[1] < w[0]);
    let peak = down.iter().chain(&up).copied().fold(0.0, f64::max);
    let tail = down.last().copied().unwrap_or(0.0).max(up.last().copied().unwrap_or(0.0));
    let b = berezin(&mu, &i, kp)?;
    let kii = kernel_diagonal(&i, kp);
    let mut out = vec![
        at_most("condition2(delta_i, i) = 1", (c2 - 1.0).abs(), 0.0),
        holds("profile strictly decreasing", decreasing(&down) && decreasing(&up), format!("{} + {} steps", down.len(), up.len())),
        at_most("profile tail / peak", tail / peak, 1e-6),
        at_most("berezin(delta_i, i) = K(i, i)", (b - kii).abs() / kii, 1e-12),
    ];
    if n == 1 && kp.alpha == 0.0 {
        let delta = 0.5f64.tanh();
        let closed = 4.0 * PI * delta * delta / (1.0 - delta * delta).powi(2);
        let v = volume_ball(&i, 0.5, kp, cfg)?;
        out.push(mc_check("V(D(i, 0.5)) half-plane closed form", &v, c(closed, 0.0)));
    }
    Ok(out)
}

fn toeplitz(kp: &KernelParams, seed: u64) -> tubeberg::Result<Vec<Check>> {
    let n = kp.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = random_tube_point(n, 0.8, &mut rng);
    let single = operator_norm(&build_model(&AtomicMeasure::dirac(w.clone(), 0.37)?, kp)?)?;
    let expect = 0.37 * kernel_diagonal(&w, kp);
    let (mut bz, mut tr, mut sup, mut jac) = (0.0f64, 0.0f64, f64::NEG_INFINITY, 0.0f64);
    for k in 0..10 {
        let atoms = (0..1 + 6 * k)
            .map(|_| Atom { point: random_tube_point(n, 0.9, &mut rng), mass: rng.random_range(0.01..1.0) })
            .collect();
        let mu = AtomicMeasure::new(n, atoms)?;
        let tm = build_model(&mu, kp)?;
        let norm = operator_norm(&tm)?;
        let mut top = 0.0f64;
        for _ in 0..100 {
            let z = random_tube_point(n, 0.9, &mut rng);
            let a = berezin_via_operator(&tm, &z)?;
            let b = berezin(&mu, &z, kp)?;
            bz = bz.max((a - b).abs() / a.max(b));
            top = top.max(a);
        }
        sup = sup.max(top / norm - 1.0);
        let profile = spectral_profile(&tm)?;
        tr = tr.max((profile.iter().sum::<f64>() - tm.trace()).abs() / tm.trace());
        let dense = jacobi_eigenvalues(&tm.core, 1e-15, 200)?;
        for (x, y) in profile.iter().zip(&dense) {
            jac = jac.max((x - y).abs() / norm);
        }
    }
    Ok(vec![
        at_most("single atom norm = m K(w, w)", (single - expect).abs() / expect, 1e-12),
        at_most("berezin via operator", bz, 1e-12),
        at_most("trace identity", tr, 1e-10),
        at_most("sup berezin / norm - 1", sup, 1e-9),
        at_most("power iteration vs Jacobi", jac, 1e-10),
    ])
}
