mod report;
mod suites;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};
use tubeberg::integrate::{rf_exact, rf_mc};
use tubeberg::lattice::{build_lattice, record_multiplicity, verify_cover, verify_separation};
use tubeberg::measures::{carleson_report, load_measure, vanishing_profile};
use tubeberg::toeplitz::{build_model, toeplitz_report};
use tubeberg::{Complex64, KernelParams, Lattice, RFParams, RegionSpec, SamplerConfig, TubePoint};

use report::{Manifest, Outcome};

const DEFAULT_SEED: u64 = 0x7b5e_ed00;

#[derive(Parser, Debug)]
#[command(name = "tubeberg", version, about = "Weighted Bergman space toolkit for the tube domain T_B")]
struct Cli {
    /// Worker threads for Monte-Carlo sums (results do not depend on it).
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Monte-Carlo estimate of the two-kernel integral against its closed form.
    Integrate(IntegrateArgs),
    /// Build an r-lattice of a truncated region.
    Lattice(LatticeArgs),
    /// Carleson diagnostics for an atomic measure.
    Measure {
        #[command(subcommand)]
        action: MeasureCommand,
    },
    /// Norm, spectrum and Berezin consistency of a Toeplitz operator.
    Toeplitz(ToeplitzArgs),
}

#[derive(Args, Debug, Clone)]
struct SeedArgs {
    #[arg(long, env = "TUBEBERG_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite name or alias; `list` prints the registry.
    suite: String,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, value_parser = parse_count, default_value = "1000000")]
    samples: u64,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct IntegrateArgs {
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long)]
    r: f64,
    #[arg(long)]
    s: f64,
    /// Weight exponent; defaults to `--alpha`.
    #[arg(long)]
    t: Option<f64>,
    /// Point as JSON `[[re, im], ...]`; defaults to `i`.
    #[arg(long)]
    z: Option<String>,
    #[arg(long)]
    u: Option<String>,
    #[arg(long, value_parser = parse_count, default_value = "1000000")]
    samples: u64,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LatticeArgs {
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long)]
    r: f64,
    #[arg(long)]
    epsilon: f64,
    /// Fresh probes for the coverage and multiplicity checks.
    #[arg(long, value_parser = parse_count, default_value = "10000")]
    probes: u64,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long)]
    out: PathBuf,
    /// Also write the centers as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum MeasureCommand {
    Analyze(AnalyzeArgs),
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    lattice: PathBuf,
    /// Evaluation points; defaults to the lattice centers.
    #[arg(long)]
    grid: Option<PathBuf>,
    #[arg(long, value_parser = parse_count, default_value = "1000000")]
    samples: u64,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ToeplitzArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    grid: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Also write the eigenvalues as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Accepts `1000000` as well as `1e6`.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if f >= 1.0 && f.fract() == 0.0 && f <= u64::MAX as f64 {
        Ok(f as u64)
    } else {
        Err(format!("`{s}` is not a positive integer"))
    }
}

fn parse_point(text: &str) -> anyhow::Result<TubePoint> {
    serde_json::from_str(text).with_context(|| format!("invalid point `{text}`"))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GridDocument {
    Bare(Vec<TubePoint>),
    Wrapped { points: Vec<TubePoint> },
}

fn read_text(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_grid(path: &Path) -> anyhow::Result<Vec<TubePoint>> {
    let doc: GridDocument =
        serde_json::from_str(&read_text(path)?).with_context(|| format!("invalid grid {}", path.display()))?;
    Ok(match doc {
        GridDocument::Bare(p) | GridDocument::Wrapped { points: p } => p,
    })
}

fn read_lattice(path: &Path) -> anyhow::Result<Lattice> {
    let l: Lattice =
        serde_json::from_str(&read_text(path)?).with_context(|| format!("invalid lattice {}", path.display()))?;
    Lattice::new(l.n, l.r, RegionSpec::new(l.region.epsilon)?, l.centers.clone())?;
    Ok(l)
}

fn check_dims(n: usize, points: &[TubePoint], what: &str) -> anyhow::Result<()> {
    if let Some(p) = points.iter().find(|p| p.dim() != n) {
        bail!("{what} has a point of dimension {} but the measure has n = {n}", p.dim());
    }
    Ok(())
}

fn c2(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn cmd_verify(args: &VerifyArgs, workers: usize) -> anyhow::Result<Outcome> {
    if args.suite == "list" {
        for (name, alias, about) in suites::REGISTRY {
            println!("{name:16} {alias:10} {about}");
        }
        return Ok(Outcome::Pass(Value::Null, None));
    }
    let suite = suites::lookup(&args.suite).ok_or_else(|| {
        anyhow!(
            "unknown suite `{}` (known: {})",
            args.suite,
            suites::REGISTRY.iter().map(|s| s.0).collect::<Vec<_>>().join(", ")
        )
    })?;
    let kp = KernelParams::new(args.n, args.alpha)?;
    let cfg = SamplerConfig::new(args.samples, args.seed.seed).with_workers(workers);
    let checks = suites::run(suite, &kp, &cfg)?;
    for c in &checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let pass = checks.iter().all(|c| c.pass);
    let payload = json!({
        "schema": "tubeberg.verify/1",
        "suite": suite,
        "pass": pass,
        "assertions": checks,
    });
    Ok(if pass {
        Outcome::Pass(payload, args.out.clone())
    } else {
        Outcome::Fail(payload, args.out.clone())
    })
}

fn cmd_integrate(args: &IntegrateArgs, workers: usize) -> anyhow::Result<Outcome> {
    let n = args.n;
    let t = args.t.unwrap_or(args.alpha);
    let z = args.z.as_deref().map(parse_point).transpose()?.unwrap_or_else(|| TubePoint::base(n));
    let u = args.u.as_deref().map(parse_point).transpose()?.unwrap_or_else(|| TubePoint::base(n));
    check_dims(n, &[z.clone(), u.clone()], "--z/--u")?;
    let rf = RFParams::new(args.r, args.s, t);
    let cfg = SamplerConfig::new(args.samples, args.seed.seed).with_workers(workers);
    let oracle = rf_exact(n, &rf, &z, &u)?;
    let est = rf_mc(n, &rf, &z, &u, &cfg)?;
    let sigma = est.sigma_distance(oracle);
    println!(
        "mc {:.8} {:+.8}i  exact {:.8} {:+.8}i  stderr {:.3e}  sigma {:.3}",
        est.value.re, est.value.im, oracle.re, oracle.im, est.stderr, sigma
    );
    let payload = json!({
        "schema": "tubeberg.integrate/1",
        "value": c2(est.value),
        "stderr": est.stderr,
        "oracle": c2(oracle),
        "sigma_distance": sigma,
        "estimate": est,
    });
    Ok(Outcome::Pass(payload, args.out.clone()))
}

fn cmd_lattice(args: &LatticeArgs) -> anyhow::Result<Outcome> {
    let seed = args.seed.seed;
    let mut l = build_lattice(args.n, args.r, RegionSpec::new(args.epsilon)?, seed)?;
    let probes = args.probes as usize;
    let mult = record_multiplicity(&mut l, probes, seed.wrapping_add(2));
    let cover = verify_cover(&l, probes, seed.wrapping_add(1));
    let separated = verify_separation(&l);
    println!(
        "{} centers, separated {separated}, uncovered {}/{}, multiplicity {mult}",
        l.len(),
        cover.uncovered_inside,
        cover.inside_region
    );
    if let Some(path) = &args.csv {
        report::write_centers_csv(path, &l.centers)?;
    }
    let mut payload = serde_json::to_value(&l)?;
    payload["schema"] = json!("tubeberg.lattice/1");
    payload["separated"] = json!(separated);
    payload["cover"] = serde_json::to_value(&cover)?;
    Ok(Outcome::Pass(payload, Some(args.out.clone())))
}

fn cmd_analyze(args: &AnalyzeArgs, workers: usize) -> anyhow::Result<Outcome> {
    let (mu, kp) = load_measure(&read_text(&args.input)?).with_context(|| format!("in {}", args.input.display()))?;
    let lattice = read_lattice(&args.lattice)?;
    if lattice.n != kp.dim() {
        bail!("lattice has n = {} but the measure has n = {}", lattice.n, kp.dim());
    }
    let grid = match &args.grid {
        Some(p) => read_grid(p)?,
        None => lattice.centers.clone(),
    };
    check_dims(kp.dim(), &grid, "grid")?;
    let cfg = SamplerConfig::new(args.samples, args.seed.seed).with_workers(workers);
    let rep = carleson_report(&mu, &lattice, &grid, &kp, &cfg)?;
    let profile = vanishing_profile(&mu, &lattice, &kp)?;
    println!(
        "sup berezin {:.6e}, sup averaging {:.6e}, sup condition2 {:.6e}, sup lattice {:.6e}",
        rep.sup_berezin, rep.sup_averaging, rep.sup_condition2, rep.sup_lattice
    );
    let mut payload = serde_json::to_value(&rep)?;
    payload["schema"] = json!("tubeberg.carleson/1");
    payload["vanishing_profile"] = serde_json::to_value(&profile)?;
    Ok(Outcome::Pass(payload, Some(args.out.clone())))
}

fn cmd_toeplitz(args: &ToeplitzArgs) -> anyhow::Result<Outcome> {
    let (mu, kp) = load_measure(&read_text(&args.input)?).with_context(|| format!("in {}", args.input.display()))?;
    let grid = read_grid(&args.grid)?;
    check_dims(kp.dim(), &grid, "grid")?;
    let tm = build_model(&mu, &kp)?;
    let rep = toeplitz_report(&tm, &grid)?;
    println!(
        "norm {:.12e}, berezin sup {:.6e}, consistency {:.1e}",
        rep.norm, rep.berezin_sup, rep.consistency_max_err
    );
    if let Some(path) = &args.csv {
        report::write_values_csv(path, "eigenvalue", &rep.eigenvalues)?;
    }
    let mut payload = serde_json::to_value(&rep)?;
    payload["schema"] = json!("tubeberg.toeplitz/1");
    Ok(Outcome::Pass(payload, Some(args.out.clone())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (name, params, seed) = describe(&cli.command);
    let result = match &cli.command {
        Command::Verify(a) => cmd_verify(a, cli.workers),
        Command::Integrate(a) => cmd_integrate(a, cli.workers),
        Command::Lattice(a) => cmd_lattice(a),
        Command::Measure { action: MeasureCommand::Analyze(a) } => cmd_analyze(a, cli.workers),
        Command::Toeplitz(a) => cmd_toeplitz(a),
    };
    let manifest = Manifest::new(name, params, seed, start);
    match result.and_then(|o| report::finish(o, manifest)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn describe(c: &Command) -> (&'static str, Value, Option<u64>) {
    match c {
        Command::Verify(a) => (
            "verify",
            json!({"suite": a.suite, "n": a.n, "alpha": a.alpha, "samples": a.samples}),
            Some(a.seed.seed),
        ),
        Command::Integrate(a) => (
            "integrate",
            json!({"n": a.n, "alpha": a.alpha, "r": a.r, "s": a.s, "t": a.t.unwrap_or(a.alpha),
                   "z": a.z, "u": a.u, "samples": a.samples}),
            Some(a.seed.seed),
        ),
        Command::Lattice(a) => (
            "lattice",
            json!({"n": a.n, "r": a.r, "epsilon": a.epsilon, "probes": a.probes}),
            Some(a.seed.seed),
        ),
        Command::Measure { action: MeasureCommand::Analyze(a) } => (
            "measure analyze",
            json!({"in": a.input, "lattice": a.lattice, "grid": a.grid, "samples": a.samples}),
            Some(a.seed.seed),
        ),
        Command::Toeplitz(a) => ("toeplitz", json!({"in": a.input, "grid": a.grid}), None),
    }
}
