//! Run definitions read from a single JSON document.

use std::path::{Path, PathBuf};

use hamca::exact::{GaussMatrix, GaussVector, HamiltonianSpec};
use hamca::uncertainty::TrialFamily;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, serde::Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

/// Inline value or `{"file": "path"}` holding the same JSON.
#[derive(Clone, Debug)]
pub enum Source<T> {
    File { file: PathBuf },
    Inline(T),
}

impl<'de, T: DeserializeOwned> Deserialize<'de> for Source<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let v = serde_json::Value::deserialize(d)?;
        if let Some(obj) = v.as_object() {
            if let Some(file) = obj.get("file").and_then(|f| f.as_str()) {
                if obj.len() == 1 {
                    return Ok(Source::File { file: PathBuf::from(file) });
                }
            }
        }
        serde_json::from_value(v).map(Source::Inline).map_err(D::Error::custom)
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    /// `start + k·step` for every `k` up to and including `stop`.
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        if !(self.step > 0.0) || !(self.stop >= self.start) || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(CliError::config(format!(
                "grid needs finite start <= stop and step > 0, got {}..{} step {}",
                self.start, self.stop, self.step
            )));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        if count > 10_000_000 {
            return Err(CliError::config(format!("grid has {count} points")));
        }
        Ok((0..count).map(|k| self.start + k as f64 * self.step).collect())
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorConfig {
    #[serde(rename = "H")]
    pub h: Source<GaussMatrix>,
    pub psi0: Source<GaussVector>,
    pub psi1: Source<GaussVector>,
    /// Number of slices on this clock.
    pub clock: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiConfig {
    pub factors: Vec<FactorConfig>,
    /// Coupling on the joint space; the product is then checked against the
    /// interacting equation.
    pub interaction: Option<Source<GaussMatrix>>,
    /// `[G1, G2]` for the pair correlator (two factors only).
    #[serde(rename = "G")]
    pub g: Option<Vec<Source<GaussMatrix>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianSpec {
    pub sigma: f64,
    #[serde(default)]
    pub k: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UncertaintyConfig {
    pub half_width: usize,
    pub random_states: usize,
    pub gaussians: Vec<GaussianSpec>,
    pub families: Vec<TrialFamily>,
    pub search_half_width: usize,
    pub saturation_tolerance: f64,
}

impl Default for UncertaintyConfig {
    fn default() -> Self {
        UncertaintyConfig {
            half_width: 120,
            random_states: 1000,
            gaussians: vec![GaussianSpec { sigma: 12.0, k: 0.0 }],
            families: (2..=4).map(|sites| TrialFamily { sites, complex: false }).collect(),
            search_half_width: 8,
            saturation_tolerance: 0.0,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSection {
    pub max_steps: Option<usize>,
    #[serde(default)]
    pub only: Vec<u8>,
    /// History file whose first eight slices replace the built-in Pauli table.
    pub pauli_fixture: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    #[serde(rename = "H")]
    pub h: Option<Source<GaussMatrix>>,
    pub psi0: Option<Source<GaussVector>>,
    pub psi1: Option<Source<GaussVector>>,
    /// History file (JSON lines) used instead of evolving `psi0, psi1`.
    pub history: Option<PathBuf>,
    #[serde(default = "one")]
    pub l: f64,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(rename = "G")]
    pub g: Option<Vec<Source<GaussMatrix>>>,
    pub times: Option<Grid>,
    #[serde(default = "default_guard")]
    pub guard: f64,
    pub grid: Option<Grid>,
    pub max_steps: Option<usize>,
    pub basis: Option<Vec<Source<GaussVector>>>,
    pub multi: Option<MultiConfig>,
    #[serde(default)]
    pub uncertainty: UncertaintyConfig,
    #[serde(default)]
    pub suite: SuiteSection,
}

fn one() -> f64 {
    1.0
}

fn default_guard() -> f64 {
    hamca::continuum::DEFAULT_GUARD_FRACTION
}

/// Parsed configuration plus the directory relative paths resolve against.
pub struct Loaded {
    pub config: RunConfig,
    pub base: PathBuf,
    pub raw: Vec<u8>,
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let raw = std::fs::read(path)
        .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
    let config: RunConfig = serde_json::from_slice(&raw)
        .map_err(|e| CliError::config(format!("invalid config {}: {e}", path.display())))?;
    if !(config.l > 0.0) || !config.l.is_finite() {
        return Err(CliError::config(format!("l must be positive and finite, got {}", config.l)));
    }
    if !(config.guard > 0.0 && config.guard <= 1.0) {
        return Err(CliError::config(format!("guard must lie in (0, 1], got {}", config.guard)));
    }
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(Loaded { config, base, raw })
}

impl Loaded {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    pub fn read_file(&self, p: &Path) -> Result<Vec<u8>, CliError> {
        let full = self.resolve(p);
        std::fs::read(&full).map_err(|e| CliError::config(format!("cannot read {}: {e}", full.display())))
    }

    pub fn fetch<T: DeserializeOwned + Clone>(&self, src: &Source<T>, what: &str) -> Result<T, CliError> {
        match src {
            Source::Inline(v) => Ok(v.clone()),
            Source::File { file } => {
                let bytes = self.read_file(file)?;
                serde_json::from_slice(&bytes)
                    .map_err(|e| CliError::config(format!("{what} in {}: {e}", file.display())))
            }
        }
    }

    pub fn hamiltonian(&self, src: Option<&Source<GaussMatrix>>) -> Result<HamiltonianSpec, CliError> {
        let src = src.ok_or_else(|| CliError::config("missing field H"))?;
        let m = self.fetch(src, "H")?;
        HamiltonianSpec::new(m).map_err(|e| CliError::config(format!("H: {e}")))
    }

    pub fn vector(&self, src: Option<&Source<GaussVector>>, name: &str) -> Result<GaussVector, CliError> {
        let src = src.ok_or_else(|| CliError::config(format!("missing field {name}")))?;
        self.fetch(src, name)
    }

    pub fn steps(&self) -> Result<usize, CliError> {
        self.config.n.ok_or_else(|| CliError::config("missing field N"))
    }
}
