//! JSON artifact shapes and the run manifest. All keys are lower_snake_case;
//! the schemas are documented in `docs/schemas.md` at the workspace root.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Everything needed to reproduce a run bit-identically: the command, its
/// parameters, and the files it wrote. No timestamps, no randomness.
#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub seed_free: bool,
    pub artifacts: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            seed_free: true,
            artifacts: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("parameter serializes");
        self.parameters.insert(key.to_string(), v);
    }
}

/// Collects artifacts for one command run and writes the manifest last.
pub struct Sink {
    dir: PathBuf,
    manifest: RunManifest,
}

impl Sink {
    pub fn new(out_dir: &Path, golden: bool, slug: &str) -> io::Result<Self> {
        let dir = if golden { out_dir.join("fixtures").join(slug) } else { out_dir.to_path_buf() };
        fs::create_dir_all(&dir)?;
        Ok(Sink { dir, manifest: RunManifest::new(slug) })
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        self.manifest.param(key, value);
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> io::Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)?;
        self.manifest.artifacts.push(name.to_string());
        Ok(path)
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> io::Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value).expect("artifact serializes");
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    /// Write `<slug>_manifest.json`; call once, after all artifacts.
    pub fn finish(mut self) -> io::Result<()> {
        let name = format!("{}_manifest.json", self.manifest.command.replace('-', "_"));
        let path = self.dir.join(&name);
        self.manifest.artifacts.push(name);
        let mut text = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        text.push('\n');
        fs::write(path, text)
    }
}

#[derive(Serialize)]
pub struct SolveFsReport {
    pub m: f64,
    pub h: f64,
    pub t_max: f64,
    /// Skin friction f''(0); absent when the solver failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fpp0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Serialize)]
pub struct EnergySample {
    pub t: f64,
    pub e: f64,
}

#[derive(Serialize)]
pub struct SolvePseudoReport {
    pub tau: f64,
    pub zeta: f64,
    pub d: f64,
    pub h: f64,
    pub t_max: f64,
    /// converged | diverged | horizon
    pub stop_reason: String,
    /// Time attached to the stop event, when one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop_t: Option<f64>,
    pub crossings: usize,
    /// monotone | oscillatory | divergent | indeterminate
    pub classification: String,
    /// Lyapunov energy along the run, thinned to at most 1001 samples.
    pub energy: Vec<EnergySample>,
}

#[derive(Serialize)]
pub struct IntervalReport {
    pub tau: f64,
    pub zeta: f64,
    pub n: usize,
    pub analytic_lo: f64,
    pub analytic_hi: f64,
    /// sqrt(2 zeta (1 - zeta^2/3)) when zeta is in [0, sqrt 3].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical_hi: Option<f64>,
    /// Set when the empirical interval could not be established.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical_note: Option<String>,
}

#[derive(Serialize)]
pub struct BasinReport {
    pub tau: f64,
    pub n_zeta: usize,
    pub n_d: usize,
    pub members: usize,
    pub converged: usize,
    /// Analytic members that failed to converge; zero is the theorem.
    pub violations: usize,
}

#[derive(Serialize)]
pub struct FieldCheckReport {
    pub tau: f64,
    pub zeta: f64,
    pub d: f64,
    pub h: f64,
    pub method: String,
    pub perturb: f64,
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Serialize)]
pub struct FitReport {
    pub c1: f64,
    pub c2: f64,
    pub m: f64,
    pub rms_residual: f64,
}
