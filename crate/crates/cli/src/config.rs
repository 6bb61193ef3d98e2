//! JSON run configurations.

use std::path::{Path, PathBuf};

use gentp_core::{HermitianNet, OrthoPair, SamplingPlan};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Vectors within this of unit/orthogonal are accepted silently.
pub const SILENT_TOL: f64 = 1e-9;
/// Beyond this, vectors are rejected rather than normalized.
pub const REPAIR_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TpMethodArg {
    ClosedForm,
    MonteCarlo,
    #[default]
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanOverride {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

impl PlanOverride {
    pub fn apply(&self) -> Result<SamplingPlan, CliError> {
        let d = SamplingPlan::default();
        SamplingPlan::new(
            self.eps_max.unwrap_or(d.eps_max),
            self.ratio.unwrap_or(d.ratio),
            self.count.unwrap_or(d.count),
        )
        .map_err(|e| CliError::Input(format!("sampling plan: {e}")))
    }
}

fn default_eta() -> f64 {
    1e-3
}
fn default_samples() -> usize {
    100_000
}
fn default_seed() -> u64 {
    1
}
fn default_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Expression strings; only the upper triangle is read.
    pub matrix: Vec<Vec<String>>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    #[serde(default)]
    pub method: TpMethodArg,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Classification tolerance for the closed form.
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub plan: PlanOverride,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

/// A validated configuration plus what loading it changed.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: RunConfig,
    pub net: HermitianNet,
    pub pair: OrthoPair,
    pub plan: SamplingPlan,
    pub warnings: Vec<String>,
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Normalizes `u`, then orthogonalizes and normalizes `v`, when they are
/// close to an orthonormal pair.
fn repair_vectors(u: &mut Vec<f64>, v: &mut Vec<f64>, warnings: &mut Vec<String>) -> Result<(), CliError> {
    let off = |u: &[f64], v: &[f64]| {
        (norm(u) - 1.0)
            .abs()
            .max((norm(v) - 1.0).abs())
            .max(dot(u, v).abs())
    };
    let dev = off(u, v);
    if !(dev < REPAIR_TOL) {
        return Err(CliError::Input(format!(
            "u and v must be orthonormal; deviation {dev:.3e} exceeds {REPAIR_TOL:e}"
        )));
    }
    if dev <= OrthoPair::TOL {
        return Ok(());
    }
    if dev > SILENT_TOL {
        warnings.push(format!("u, v were {dev:.3e} from orthonormal and have been normalized"));
    }
    let nu = norm(u);
    u.iter_mut().for_each(|a| *a /= nu);
    let p = dot(u, v);
    v.iter_mut().zip(u.iter()).for_each(|(b, a)| *b -= p * a);
    let nv = norm(v);
    v.iter_mut().for_each(|b| *b /= nv);
    Ok(())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Validates, normalizes the vectors and builds the matrix net.
    pub fn load(mut self) -> Result<Loaded, CliError> {
        let n = self.matrix.len();
        if n < 2 || self.matrix.iter().any(|r| r.len() != n) {
            return Err(CliError::Input(format!("matrix must be square with n >= 2, got {n} rows")));
        }
        if self.u.len() != n || self.v.len() != n {
            return Err(CliError::Input(format!(
                "u and v must have dimension {n}, got {} and {}",
                self.u.len(),
                self.v.len()
            )));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(CliError::Input(format!("eta must lie in (0, 1], got {}", self.eta)));
        }
        if self.samples < gentp_core::tp::MIN_DRAWS {
            return Err(CliError::Input(format!(
                "samples must be at least {}, got {}",
                gentp_core::tp::MIN_DRAWS,
                self.samples
            )));
        }
        if !(self.tol > 0.0) {
            return Err(CliError::Input(format!("tol must be positive, got {}", self.tol)));
        }
        let mut warnings = Vec::new();
        repair_vectors(&mut self.u, &mut self.v, &mut warnings)?;
        let pair = OrthoPair::new(self.u.clone(), self.v.clone()).map_err(|e| CliError::Input(e.to_string()))?;
        let plan = self.plan.apply()?;
        let net = HermitianNet::from_strings(&self.matrix, &plan).map_err(|e| CliError::Input(e.to_string()))?;
        Ok(Loaded {
            config: self,
            net,
            pair,
            plan,
            warnings,
        })
    }
}

pub fn read_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    RunConfig::from_json(&text)
}

/// Configurations shipped with the binary, by name.
pub const SHIPPED: [(&str, &str); 6] = [
    ("equal_coupling", include_str!("../configs/equal_coupling.json")),
    ("rotated_limit", include_str!("../configs/rotated_limit.json")),
    ("sqrt_entry", include_str!("../configs/sqrt_entry.json")),
    ("sqrt_entry_as_printed", include_str!("../configs/sqrt_entry_as_printed.json")),
    ("diagonal_powers", include_str!("../configs/diagonal_powers.json")),
    ("diagonal_constant", include_str!("../configs/diagonal_constant.json")),
];

pub fn shipped(name: &str) -> RunConfig {
    let (_, text) = SHIPPED.iter().find(|(n, _)| *n == name).expect("known config");
    RunConfig::from_json(text).expect("shipped configs parse")
}
