//! Experiment configuration: TOML schema, overrides, and the run digest.
//!
//! A run is described by one TOML file with a `[geometry]` section and
//! optional `[numerics]`, `[task.*]`, and `[output]` sections.  Unknown keys
//! are rejected everywhere so a typo cannot silently fall back to a default.
//! `--set section.key=value` flags are applied to the parsed TOML value
//! *before* deserialization, so overrides face exactly the same validation as
//! the file itself.
//!
//! The effective (post-override) configuration is re-serialized in canonical
//! key order and hashed; the SHA-256 digest is stamped into every output file
//! so artifacts can be traced back to the exact inputs that produced them.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use coneheat::cone::ModeSumConfig;
use coneheat::cross_section::{load_spectrum, ConeGeometry};
use coneheat::renorm::{Cutoff, SmoothProfile};

/// Why a run stopped: bad configuration (exit 2) or a numeric/runtime
/// failure (exit 1).
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Run(String),
}

impl Failure {
    pub fn config(msg: impl fmt::Display) -> Self {
        Failure::Config(msg.to_string())
    }

    pub fn run(msg: impl fmt::Display) -> Self {
        Failure::Run(msg.to_string())
    }
}

impl From<coneheat::Error> for Failure {
    fn from(err: coneheat::Error) -> Self {
        Failure::Run(err.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure::Run(format!("i/o error: {err}"))
    }
}

/// A scalar or a list; every grid parameter accepts both spellings
/// (`t = 1.0` or `t = [0.5, 1.0, 2.0]`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn values(&self, name: &str) -> Result<Vec<f64>, Failure> {
        let vals = match self {
            OneOrMany::One(x) => vec![*x],
            OneOrMany::Many(xs) => xs.clone(),
        };
        if vals.is_empty() {
            return Err(Failure::Config(format!("`{name}` must not be an empty list")));
        }
        if let Some(bad) = vals.iter().find(|x| !x.is_finite()) {
            return Err(Failure::Config(format!("`{name}` contains a non-finite value {bad}")));
        }
        Ok(vals)
    }
}

fn default_one() -> OneOrMany {
    OneOrMany::One(0.0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    /// `circle`, `sphere`, or `file`.
    pub kind: String,
    /// Circumference of a circle cross-section.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    /// Dimension of a round-sphere cross-section.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Path to a spectrum file (`eigenvalue multiplicity` per line).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Cone dimension for a file spectrum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Cross-section volume for a file spectrum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<f64>,
    /// Eigenvalue cutoff for the built-in spectra.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode_cutoff: Option<f64>,
}

impl GeometrySection {
    /// Build the cone, treating every rejection as a configuration error.
    pub fn build(&self) -> Result<ConeGeometry, Failure> {
        let forbid = |cond: bool, key: &str| {
            if cond {
                Err(Failure::Config(format!(
                    "geometry key `{key}` does not apply to kind `{}`",
                    self.kind
                )))
            } else {
                Ok(())
            }
        };
        match self.kind.as_str() {
            "circle" => {
                forbid(self.dim.is_some(), "dim")?;
                forbid(self.path.is_some(), "path")?;
                forbid(self.n.is_some(), "n")?;
                forbid(self.volume.is_some(), "volume")?;
                let length = self
                    .length
                    .ok_or_else(|| Failure::config("geometry kind `circle` needs `length`"))?;
                let cutoff = self.mode_cutoff.ok_or_else(|| {
                    Failure::config("geometry kind `circle` needs `mode_cutoff`")
                })?;
                ConeGeometry::over_circle(length, cutoff).map_err(Failure::config)
            }
            "sphere" => {
                forbid(self.length.is_some(), "length")?;
                forbid(self.path.is_some(), "path")?;
                forbid(self.n.is_some(), "n")?;
                forbid(self.volume.is_some(), "volume")?;
                let dim = self
                    .dim
                    .ok_or_else(|| Failure::config("geometry kind `sphere` needs `dim`"))?;
                let cutoff = self.mode_cutoff.ok_or_else(|| {
                    Failure::config("geometry kind `sphere` needs `mode_cutoff`")
                })?;
                ConeGeometry::over_sphere(dim, cutoff).map_err(Failure::config)
            }
            "file" => {
                forbid(self.length.is_some(), "length")?;
                forbid(self.dim.is_some(), "dim")?;
                forbid(self.mode_cutoff.is_some(), "mode_cutoff")?;
                let path = self
                    .path
                    .as_ref()
                    .ok_or_else(|| Failure::config("geometry kind `file` needs `path`"))?;
                let n = self
                    .n
                    .ok_or_else(|| Failure::config("geometry kind `file` needs `n`"))?;
                let volume = self
                    .volume
                    .ok_or_else(|| Failure::config("geometry kind `file` needs `volume`"))?;
                let spectrum = load_spectrum(path).map_err(Failure::config)?;
                ConeGeometry::from_spectrum(n, spectrum, volume).map_err(Failure::config)
            }
            other => Err(Failure::Config(format!(
                "unknown geometry kind `{other}` (expected `circle`, `sphere`, or `file`)"
            ))),
        }
    }
}

fn default_rel_tol() -> f64 {
    1e-13
}

fn default_max_modes() -> usize {
    100_000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSection {
    /// Relative tail tolerance for mode sums.
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    /// Hard cap on the number of modes summed.
    #[serde(default = "default_max_modes")]
    pub max_modes: usize,
}

impl Default for NumericsSection {
    fn default() -> Self {
        NumericsSection { rel_tol: default_rel_tol(), max_modes: default_max_modes() }
    }
}

impl NumericsSection {
    pub fn mode_sum(&self) -> Result<ModeSumConfig, Failure> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Failure::Config(format!(
                "numerics.rel_tol must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        if self.max_modes == 0 {
            return Err(Failure::config("numerics.max_modes must be positive"));
        }
        Ok(ModeSumConfig { rel_tol: self.rel_tol, max_modes: self.max_modes, ..Default::default() })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatTask {
    pub t: OneOrMany,
    pub r: OneOrMany,
    #[serde(default = "default_one")]
    pub y: OneOrMany,
    pub rp: OneOrMany,
    #[serde(default = "default_one")]
    pub yp: OneOrMany,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolventTask {
    /// Real part of the spectral parameter `k` (`Re k > 0`).
    pub k: OneOrMany,
    /// Imaginary part, shared by every `k` in the grid.
    #[serde(default)]
    pub k_im: f64,
    pub r: OneOrMany,
    #[serde(default = "default_one")]
    pub y: OneOrMany,
    pub rp: OneOrMany,
    #[serde(default = "default_one")]
    pub yp: OneOrMany,
}

fn default_cutoff() -> String {
    "sharp".to_owned()
}

/// Parse a cutoff name shared by the rtrace/zeta/det tasks.
pub fn parse_cutoff(name: &str) -> Result<Cutoff, Failure> {
    match name {
        "sharp" => Ok(Cutoff::Sharp),
        "smooth-log" => Ok(Cutoff::Smooth(SmoothProfile::LogSymmetric)),
        "smooth-step" => Ok(Cutoff::Smooth(SmoothProfile::PlainStep)),
        other => Err(Failure::Config(format!(
            "unknown cutoff `{other}` (expected `sharp`, `smooth-log`, or `smooth-step`)"
        ))),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RtraceTask {
    pub t: OneOrMany,
    #[serde(default = "default_cutoff")]
    pub cutoff: String,
}

fn default_taylor_order() -> usize {
    8
}

fn default_split() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZetaTask {
    /// Evaluation points `s` as `[re, im]` pairs.
    pub s: Vec<[f64; 2]>,
    #[serde(default = "default_cutoff")]
    pub cutoff: String,
    /// Taylor depth of the short-time expansion for file spectra.
    #[serde(default = "default_taylor_order")]
    pub taylor_order: usize,
    /// Mellin split point for file spectra.
    #[serde(default = "default_split")]
    pub split: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetTask {
    #[serde(default = "default_cutoff")]
    pub cutoff: String,
    #[serde(default = "default_taylor_order")]
    pub taylor_order: usize,
    #[serde(default = "default_split")]
    pub split: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heat: Option<HeatTask>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolvent: Option<ResolventTask>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rtrace: Option<RtraceTask>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<ZetaTask>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub det: Option<DetTask>,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_format() -> String {
    "csv".to_owned()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Directory for artifacts (created if missing).
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    /// Grid output format: `csv` or `json`.
    #[serde(default = "default_format")]
    pub format: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: default_dir(), format: default_format() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub geometry: GeometrySection,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default)]
    pub task: TaskSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl Config {
    /// Load a config file and apply `--set` overrides, validating the result
    /// against the full schema.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Config, Failure> {
        let text = std::fs::read_to_string(path).map_err(|err| {
            Failure::Config(format!("cannot read config `{}`: {err}", path.display()))
        })?;
        let mut value: toml::Value = text.parse().map_err(|err| {
            Failure::Config(format!("cannot parse `{}`: {err}", path.display()))
        })?;
        for entry in overrides {
            apply_override(&mut value, entry)?;
        }
        let config: Config = value
            .try_into()
            .map_err(|err| Failure::Config(format!("invalid config: {err}")))?;
        if config.output.format != "csv" && config.output.format != "json" {
            return Err(Failure::Config(format!(
                "output.format must be `csv` or `json`, got `{}`",
                config.output.format
            )));
        }
        Ok(config)
    }

    /// SHA-256 of the canonical serialization of the effective config.
    pub fn digest(&self) -> Result<String, Failure> {
        let canonical = toml::to_string(self)
            .map_err(|err| Failure::Config(format!("cannot serialize config: {err}")))?;
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let bytes = hasher.finalize();
        let mut hex = String::with_capacity(64);
        for b in bytes {
            use std::fmt::Write;
            let _ = write!(hex, "{b:02x}");
        }
        Ok(hex)
    }
}

/// Apply one `section.key=value` override to the raw TOML document.
///
/// The value side is parsed as TOML (so lists and strings work); if it does
/// not parse on its own it is taken as a bare string.
fn apply_override(root: &mut toml::Value, entry: &str) -> Result<(), Failure> {
    let (path, raw) = entry.split_once('=').ok_or_else(|| {
        Failure::Config(format!("override `{entry}` must have the form key=value"))
    })?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Failure::Config(format!("override `{entry}` has an empty key segment")));
    }
    let parsed: toml::Value = match format!("v = {}", raw.trim()).parse::<toml::Table>() {
        Ok(mut table) => table.remove("v").expect("key `v` was just inserted"),
        Err(_) => toml::Value::String(raw.trim().to_owned()),
    };
    let mut node = root;
    for key in &keys[..keys.len() - 1] {
        let table = node.as_table_mut().ok_or_else(|| {
            Failure::Config(format!("override `{entry}` traverses a non-table at `{key}`"))
        })?;
        node = table
            .entry(key.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    }
    let table = node.as_table_mut().ok_or_else(|| {
        Failure::Config(format!("override `{entry}` traverses a non-table"))
    })?;
    table.insert(keys[keys.len() - 1].to_string(), parsed);
    Ok(())
}
