//! Experiment configuration: a flat TOML file whose keys can be overridden
//! from the command line.

use bethe_core::numkernel::{ToleranceProfile, C64};
use bethe_core::repr::Variant;
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid value for `{key}`: {msg}")]
    Value { key: &'static str, msg: String },
}

fn bad(key: &'static str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Value { key, msg: msg.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Bethe,
    Basis,
    Ortho,
    Baxter,
    Qbaxter,
    Sovcheck,
    Sweep,
}

impl FromStr for Experiment {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::deserialize(toml::Value::String(s.to_string()))
            .map_err(|_| bad("experiment", format!("unknown experiment `{s}`")))
    }
}

/// How the twist (`κ`, or `θ` for the multiplicative variant) is chosen.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum TwistPolicy {
    Explicit(C64),
    /// Random modulus in `[0.3, 3]` with uniform phase, away from exceptional
    /// values.
    Generic,
    One,
}

impl FromStr for TwistPolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "generic" => Ok(Self::Generic),
            "one" => Ok(Self::One),
            other => parse_complex(other).map(Self::Explicit),
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub enum EllList {
    All,
    Levels(Vec<usize>),
}

impl FromStr for EllList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "all" {
            return Ok(Self::All);
        }
        s.split(',')
            .map(|x| x.trim().parse::<usize>().map_err(|e| format!("`{x}`: {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(Self::Levels)
    }
}

/// Complex literals such as `1.5`, `-0.3i` or `2-0.7i`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    C64::from_str(&t).map_err(|_| format!("`{s}` is not a complex number"))
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub variant: Variant,
    /// `2Λ_m` (additive) or `d_m` (multiplicative).
    pub weights: Vec<u32>,
    /// Inhomogeneities; drawn by `generate_spec` when absent.
    pub z: Option<Vec<C64>>,
    pub twist: TwistPolicy,
    /// Drawn from `[1.1, 1.5]` when absent.
    pub q: Option<C64>,
    pub ell: EllList,
    pub seed: u64,
    pub workers: usize,
    pub output: PathBuf,
    pub tol: ToleranceProfile,
    pub include_out_of_range: bool,
    pub retries: usize,
    /// Largest tolerated fraction of unexplained path failures.
    pub max_path_failure_fraction: f64,
    /// Absolute floor on the lattice gap when drawing `z`.
    pub min_gap: f64,
    /// Half-width of the box the inhomogeneities are drawn from.
    pub z_radius: f64,
    pub thresholds: Thresholds,
}

/// Gates applied to the verification metrics.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Thresholds {
    pub eigen_residual: f64,
    pub det_rel_err: f64,
    pub offorbit_pairing: f64,
    pub baxter_residual: f64,
    pub jacobian_condition: f64,
    pub basis_condition: f64,
    pub spectrum_match: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            eigen_residual: 1e-8,
            det_rel_err: 1e-6,
            offorbit_pairing: 1e-8,
            baxter_residual: 1e-8,
            jacobian_condition: 1e8,
            basis_condition: 1e6,
            spectrum_match: 1e-6,
        }
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::Bethe,
            variant: Variant::Additive,
            weights: vec![1, 1],
            z: None,
            twist: TwistPolicy::Generic,
            q: None,
            ell: EllList::All,
            seed: 0,
            workers: 1,
            output: PathBuf::from("bethe_run"),
            tol: ToleranceProfile::default(),
            include_out_of_range: false,
            retries: 3,
            max_path_failure_fraction: 0.25,
            min_gap: 0.25,
            z_radius: 3.0,
            thresholds: Thresholds::default(),
        }
    }
}

/// Keys accepted in the config file. Numbers may be given as TOML numbers
/// or strings; complex values as strings.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Option<Experiment>,
    variant: Option<Variant>,
    weights: Option<Vec<u32>>,
    z: Option<Vec<toml::Value>>,
    kappa: Option<toml::Value>,
    theta: Option<toml::Value>,
    q: Option<toml::Value>,
    ell: Option<toml::Value>,
    seed: Option<u64>,
    workers: Option<usize>,
    output: Option<PathBuf>,
    residual_tol: Option<f64>,
    dedup_tol: Option<f64>,
    rank_tol: Option<f64>,
    margin_tol: Option<f64>,
    include_out_of_range: Option<bool>,
    retries: Option<usize>,
    max_path_failure_fraction: Option<f64>,
    min_gap: Option<f64>,
    z_radius: Option<f64>,
    eigen_residual_max: Option<f64>,
    det_rel_err_max: Option<f64>,
    offorbit_pairing_max: Option<f64>,
    baxter_residual_max: Option<f64>,
    jacobian_condition_max: Option<f64>,
    basis_condition_max: Option<f64>,
    spectrum_match_max: Option<f64>,
}

fn value_text(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn complex_value(key: &'static str, v: &toml::Value) -> Result<C64, ConfigError> {
    parse_complex(&value_text(v)).map_err(|m| bad(key, m))
}

fn twist_value(key: &'static str, v: &toml::Value) -> Result<TwistPolicy, ConfigError> {
    value_text(v).parse().map_err(|m| bad(key, m))
}

/// Command-line overrides; `None` keeps the file value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub experiment: Option<String>,
    pub ell: Option<String>,
    pub kappa: Option<String>,
    pub theta: Option<String>,
    pub q: Option<String>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text)?;
        let d = Self::default();
        let mut tol = d.tol;
        tol.residual_tol = raw.residual_tol.unwrap_or(tol.residual_tol);
        tol.dedup_tol = raw.dedup_tol.unwrap_or(tol.dedup_tol);
        tol.rank_tol = raw.rank_tol.unwrap_or(tol.rank_tol);
        tol.margin_tol = raw.margin_tol.unwrap_or(tol.margin_tol);
        let th = d.thresholds;
        let cfg = Self {
            experiment: raw.experiment.unwrap_or(d.experiment),
            variant: raw.variant.unwrap_or(d.variant),
            weights: raw.weights.unwrap_or(d.weights),
            z: raw.z.map(|zs| zs.iter().map(|v| complex_value("z", v)).collect::<Result<_, _>>()).transpose()?,
            twist: match (&raw.kappa, &raw.theta) {
                (Some(_), Some(_)) => return Err(bad("theta", "give either kappa or theta")),
                (Some(v), None) => twist_value("kappa", v)?,
                (None, Some(v)) => twist_value("theta", v)?,
                (None, None) => d.twist,
            },
            q: raw.q.as_ref().map(|v| complex_value("q", v)).transpose()?,
            ell: match &raw.ell {
                Some(toml::Value::Array(items)) => EllList::Levels(
                    items
                        .iter()
                        .map(|x| x.as_integer().and_then(|i| usize::try_from(i).ok()).ok_or_else(|| bad("ell", "levels are nonnegative integers")))
                        .collect::<Result<_, _>>()?,
                ),
                Some(toml::Value::Integer(i)) => EllList::Levels(vec![usize::try_from(*i).map_err(|_| bad("ell", "negative level"))?]),
                Some(v) => value_text(v).parse().map_err(|m| bad("ell", m))?,
                None => d.ell,
            },
            seed: raw.seed.unwrap_or(d.seed),
            workers: raw.workers.unwrap_or(d.workers),
            output: raw.output.unwrap_or(d.output),
            tol,
            include_out_of_range: raw.include_out_of_range.unwrap_or(d.include_out_of_range),
            retries: raw.retries.unwrap_or(d.retries),
            max_path_failure_fraction: raw.max_path_failure_fraction.unwrap_or(d.max_path_failure_fraction),
            min_gap: raw.min_gap.unwrap_or(d.min_gap),
            z_radius: raw.z_radius.unwrap_or(d.z_radius),
            thresholds: Thresholds {
                eigen_residual: raw.eigen_residual_max.unwrap_or(th.eigen_residual),
                det_rel_err: raw.det_rel_err_max.unwrap_or(th.det_rel_err),
                offorbit_pairing: raw.offorbit_pairing_max.unwrap_or(th.offorbit_pairing),
                baxter_residual: raw.baxter_residual_max.unwrap_or(th.baxter_residual),
                jacobian_condition: raw.jacobian_condition_max.unwrap_or(th.jacobian_condition),
                basis_condition: raw.basis_condition_max.unwrap_or(th.basis_condition),
                spectrum_match: raw.spectrum_match_max.unwrap_or(th.spectrum_match),
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn apply(mut self, o: &Overrides) -> Result<Self, ConfigError> {
        if let Some(e) = &o.experiment {
            self.experiment = e.parse()?;
        }
        if let Some(e) = &o.ell {
            self.ell = e.parse().map_err(|m| bad("ell", m))?;
        }
        match (&o.kappa, &o.theta) {
            (Some(_), Some(_)) => return Err(bad("theta", "give either --kappa or --theta")),
            (Some(k), None) => self.twist = k.parse().map_err(|m| bad("kappa", m))?,
            (None, Some(t)) => self.twist = t.parse().map_err(|m| bad("theta", m))?,
            (None, None) => {}
        }
        if let Some(q) = &o.q {
            self.q = Some(parse_complex(q).map_err(|m| bad("q", m))?);
        }
        self.seed = o.seed.unwrap_or(self.seed);
        self.workers = o.workers.unwrap_or(self.workers);
        if let Some(out) = &o.output {
            self.output = out.clone();
        }
        self.validate()?;
        Ok(self)
    }

    /// Highest level of the tensor product.
    pub fn max_level(&self) -> usize {
        self.weights.iter().map(|w| *w as usize).sum()
    }

    pub fn levels(&self) -> Vec<usize> {
        match &self.ell {
            EllList::All => (0..=self.max_level()).collect(),
            EllList::Levels(v) => v.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.weights.is_empty() {
            return Err(bad("weights", "at least one factor is needed"));
        }
        if self.weights.contains(&0) {
            return Err(bad("weights", "weights must be positive"));
        }
        if let Some(z) = &self.z {
            if z.len() != self.weights.len() {
                return Err(bad("z", format!("expected {} values, got {}", self.weights.len(), z.len())));
            }
        }
        if let Some(l) = self.levels().iter().find(|l| **l > self.max_level()) {
            return Err(bad("ell", format!("level {l} exceeds {}", self.max_level())));
        }
        if self.workers == 0 {
            return Err(bad("workers", "need at least one worker"));
        }
        if !(0.0..=1.0).contains(&self.max_path_failure_fraction) {
            return Err(bad("max_path_failure_fraction", "must lie in [0, 1]"));
        }
        match (self.experiment, self.variant) {
            (Experiment::Baxter, Variant::Multiplicative) => return Err(bad("experiment", "baxter needs the additive variant")),
            (Experiment::Qbaxter, Variant::Additive) => return Err(bad("experiment", "qbaxter needs the multiplicative variant")),
            _ => {}
        }
        if self.variant == Variant::Multiplicative && self.twist == TwistPolicy::One {
            return Err(bad("theta", "the unit-twist sector exists for the additive variant only"));
        }
        if let Some(q) = self.q {
            if self.variant == Variant::Multiplicative && (q.norm() - 1.0).abs() < self.tol.margin_tol {
                return Err(bad("q", "|q| = 1 is not supported"));
            }
        }
        self.tol.validate().map_err(|m| bad("tolerances", m))
    }
}
