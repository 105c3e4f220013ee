use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use serde::Serialize;
use serde_json::Value;
use tubeberg::TubePoint;

/// A finished command: its JSON payload, where to put it, and whether its
/// assertions held.
pub enum Outcome {
    Pass(Value, Option<PathBuf>),
    Fail(Value, Option<PathBuf>),
}

#[derive(Serialize)]
pub struct Manifest {
    command: &'static str,
    parameters: Value,
    seed: Option<u64>,
    version: &'static str,
    elapsed_ms: u128,
}

impl Manifest {
    pub fn new(command: &'static str, parameters: Value, seed: Option<u64>, start: Instant) -> Self {
        Manifest {
            command,
            parameters,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            elapsed_ms: start.elapsed().as_millis(),
        }
    }
}

pub fn finish(outcome: Outcome, manifest: Manifest) -> anyhow::Result<ExitCode> {
    let (payload, out, code) = match outcome {
        Outcome::Pass(p, o) => (p, o, ExitCode::SUCCESS),
        Outcome::Fail(p, o) => (p, o, ExitCode::from(1)),
    };
    if let (Value::Object(mut map), Some(path)) = (payload, out) {
        map.insert("manifest".into(), serde_json::to_value(&manifest)?);
        let text = serde_json::to_string_pretty(&Value::Object(map))?;
        write_file(&path, text.as_bytes())?;
    }
    Ok(code)
}

fn write_file(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let mut f = fs::File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    f.write_all(bytes).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn write_centers_csv(path: &Path, centers: &[TubePoint]) -> anyhow::Result<()> {
    let n = centers.first().map_or(0, TubePoint::dim);
    let mut out = String::from("index");
    for k in 1..=n {
        out.push_str(&format!(",re_z{k},im_z{k}"));
    }
    out.push_str(",rho\n");
    for (j, c) in centers.iter().enumerate() {
        out.push_str(&j.to_string());
        for z in c.coords() {
            out.push_str(&format!(",{:e},{:e}", z.re, z.im));
        }
        out.push_str(&format!(",{:e}\n", c.rho()));
    }
    write_file(path, out.as_bytes())
}

pub fn write_values_csv(path: &Path, header: &str, values: &[f64]) -> anyhow::Result<()> {
    let mut out = format!("index,{header}\n");
    for (j, v) in values.iter().enumerate() {
        out.push_str(&format!("{j},{v:e}\n"));
    }
    write_file(path, out.as_bytes())
}
