//! Run configuration: strict-schema TOML parsing (unknown keys fatal — a
//! silent typo in τ or γ would invalidate results), α-grid specifications,
//! and validation that names the violated constraint.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{AlphaMode, CsConfig, GravityConfig};
use crate::mdp::compute_c;

/// Which synthetic problem a run operates on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Cs,
    Gravity,
    ScalarOracle,
}

impl Experiment {
    pub fn as_str(&self) -> &'static str {
        match self {
            Experiment::Cs => "cs",
            Experiment::Gravity => "gravity",
            Experiment::ScalarOracle => "scalar-oracle",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "cs" => Ok(Experiment::Cs),
            "gravity" => Ok(Experiment::Gravity),
            "scalar-oracle" => Ok(Experiment::ScalarOracle),
            other => Err(Error::Config(format!(
                "unknown experiment '{other}' (expected cs | gravity | scalar-oracle)"
            ))),
        }
    }
}

/// What a run does with the chosen experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    Algorithm1,
    UpperBound,
    Sweep,
    NoiseStudy,
    RateStudy,
    Check,
}

impl RunMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunMode::Algorithm1 => "algorithm1",
            RunMode::UpperBound => "upper-bound",
            RunMode::Sweep => "sweep",
            RunMode::NoiseStudy => "noise-study",
            RunMode::RateStudy => "rate-study",
            RunMode::Check => "check",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "algorithm1" => Ok(RunMode::Algorithm1),
            "upper-bound" => Ok(RunMode::UpperBound),
            "sweep" => Ok(RunMode::Sweep),
            "noise-study" => Ok(RunMode::NoiseStudy),
            "rate-study" => Ok(RunMode::RateStudy),
            "check" => Ok(RunMode::Check),
            other => Err(Error::Config(format!(
                "unknown mode '{other}' (expected algorithm1 | upper-bound | sweep | noise-study | rate-study | check)"
            ))),
        }
    }

    pub fn alpha_mode(&self) -> Option<AlphaMode> {
        match self {
            RunMode::Algorithm1 => Some(AlphaMode::Algorithm1),
            RunMode::UpperBound => Some(AlphaMode::UpperBound),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "both" => Ok(OutputFormat::Both),
            other => Err(Error::Config(format!(
                "unknown format '{other}' (expected csv | json | both)"
            ))),
        }
    }

    pub fn wants_csv(&self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn wants_json(&self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

/// Closed-form scalar problem parameters (the search oracle).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalarConfig {
    pub y: f64,
    pub delta: f64,
}

impl Default for ScalarConfig {
    fn default() -> Self {
        Self { y: 1.0, delta: 0.2 }
    }
}

/// Noise-level and rate-study controls.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudyConfig {
    pub snr_list: Vec<f64>,
    pub seeds_per_level: usize,
    pub noise_fractions: Vec<f64>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            snr_list: vec![30.0, 35.0, 40.0, 45.0, 50.0, 55.0, 60.0],
            seeds_per_level: 5,
            noise_fractions: vec![0.02, 0.01, 0.005, 0.0025, 0.00125],
        }
    }
}

/// Top-level run configuration. Every field has a default; an empty file
/// (or a two-line experiment/seed file) resolves to the published setups.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub mode: RunMode,
    /// When set, overrides the seed of the selected experiment section.
    pub seed: Option<u64>,
    /// When set, overrides cs.snr_db.
    pub snr_db: Option<f64>,
    /// α grid for sweep mode: `lin:a:b:n`, `log:a:b:n`, or `list:v1,v2,…`.
    pub alpha_grid: Option<String>,
    pub out: PathBuf,
    pub format: OutputFormat,
    /// Worker threads for studies; 0 = all available cores.
    pub jobs: usize,
    pub cs: CsConfig,
    pub gravity: GravityConfig,
    pub scalar: ScalarConfig,
    pub study: StudyConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::Cs,
            mode: RunMode::Algorithm1,
            seed: None,
            snr_db: None,
            alpha_grid: None,
            out: PathBuf::from("out"),
            format: OutputFormat::Both,
            jobs: 0,
            cs: CsConfig::default(),
            gravity: GravityConfig::default(),
            scalar: ScalarConfig::default(),
            study: StudyConfig::default(),
        }
    }
}

impl RunConfig {
    /// Applies the top-level overrides to the nested sections and checks
    /// every constraint, naming the violated one.
    pub fn resolve(mut self) -> Result<Self> {
        if let Some(seed) = self.seed {
            self.cs.seed = seed;
            self.gravity.seed = seed;
        }
        if let Some(snr) = self.snr_db {
            self.cs.snr_db = snr;
        }
        self.cs
            .validate()
            .map_err(|e| Error::Config(format!("cs section: {e}")))?;
        self.gravity
            .validate()
            .map_err(|e| Error::Config(format!("gravity section: {e}")))?;
        compute_c(self.cs.tau1, self.cs.tau2, self.cs.gamma)
            .map_err(|e| Error::Config(format!("cs section: {e}")))?;
        compute_c(self.gravity.tau1, self.gravity.tau2, self.gravity.gamma)
            .map_err(|e| Error::Config(format!("gravity section: {e}")))?;
        if !(self.scalar.delta > 0.0) {
            return Err(Error::Config("scalar section: delta must be positive".into()));
        }
        if let Some(spec) = &self.alpha_grid {
            parse_grid(spec)?;
        }
        Ok(self)
    }

    pub fn alphas(&self) -> Result<Vec<f64>> {
        match &self.alpha_grid {
            Some(spec) => parse_grid(spec),
            None => parse_grid("log:1e-4:1:20"),
        }
    }
}

/// Parses a grid spec: `lin:a:b:n` (n equispaced points on [a,b]),
/// `log:a:b:n` (log-equispaced, a,b > 0), or `list:v1,v2,…`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = |msg: &str| Error::Config(format!("alpha grid '{spec}': {msg}"));
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| bad("expected lin:a:b:n, log:a:b:n, or list:v1,v2,…"))?;
    let grid = match kind {
        "lin" | "log" => {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 3 {
                return Err(bad("expected three fields a:b:n"));
            }
            let a: f64 = parts[0].parse().map_err(|_| bad("bad lower bound"))?;
            let b: f64 = parts[1].parse().map_err(|_| bad("bad upper bound"))?;
            let n: usize = parts[2].parse().map_err(|_| bad("bad point count"))?;
            if n < 2 {
                return Err(bad("need at least two points"));
            }
            if !(b > a) {
                return Err(bad("upper bound must exceed lower bound"));
            }
            if kind == "log" && !(a > 0.0) {
                return Err(bad("log grid needs positive bounds"));
            }
            (0..n)
                .map(|i| {
                    let t = i as f64 / (n - 1) as f64;
                    if kind == "log" {
                        (a.ln() + t * (b.ln() - a.ln())).exp()
                    } else {
                        a + t * (b - a)
                    }
                })
                .collect::<Vec<f64>>()
        }
        "list" => {
            let vals: Result<Vec<f64>> = rest
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| bad("bad list value")))
                .collect();
            vals?
        }
        _ => return Err(bad("unknown grid kind")),
    };
    if grid.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(bad("grid values must be positive and finite"));
    }
    let mut sorted = grid.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(bad("grid values must be distinct"));
    }
    Ok(grid)
}

/// Strict-schema parse of a TOML run configuration with defaults resolved.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    cfg.resolve()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_resolves_published_defaults() {
        let cfg = parse_config_str("experiment = \"cs\"\nseed = 1\n").unwrap();
        assert_eq!(cfg.cs.n, 200);
        assert_eq!(cfg.cs.m, 80);
        assert_eq!(cfg.cs.p, 16);
        assert_eq!(cfg.cs.tau1, 1.0);
        assert_eq!(cfg.cs.tau2, 2.0);
        assert_eq!(cfg.cs.gamma, 0.5);
        assert_eq!(cfg.cs.matrix_scale, 0.05);
        assert_eq!(cfg.cs.seed, 1);
        assert_eq!(cfg.gravity.seed, 1);
    }

    #[test]
    fn unknown_key_is_fatal() {
        let err = parse_config_str("experimnt = \"cs\"\n").unwrap_err();
        assert!(err.to_string().contains("experimnt"), "{err}");
    }

    #[test]
    fn inverted_taus_rejected_with_named_constraint() {
        let err = parse_config_str("[cs]\ntau1 = 2.0\ntau2 = 1.0\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("tau2"), "{msg}");
    }

    #[test]
    fn round_trip_is_idempotent() {
        let cfg = parse_config_str("experiment = \"gravity\"\nmode = \"sweep\"\nseed = 9\n").unwrap();
        let text = toml::to_string(&cfg).unwrap();
        let reparsed = parse_config_str(&text).unwrap();
        assert_eq!(toml::to_string(&reparsed).unwrap(), text);
    }

    #[test]
    fn grid_specs_parse() {
        let lin = parse_grid("lin:1:3:3").unwrap();
        assert_eq!(lin, vec![1.0, 2.0, 3.0]);
        let log = parse_grid("log:1e-2:1:3").unwrap();
        assert!((log[1] - 0.1).abs() < 1e-12);
        let list = parse_grid("list:0.5,0.25,0.125").unwrap();
        assert_eq!(list.len(), 3);
        assert!(parse_grid("log:0:1:5").is_err());
        assert!(parse_grid("lin:1:1:5").is_err());
        assert!(parse_grid("list:1,1").is_err());
        assert!(parse_grid("geom:1:2:3").is_err());
    }

    #[test]
    fn snr_override_applies_to_cs_section() {
        let cfg = parse_config_str("snr_db = 45.0\n").unwrap();
        assert_eq!(cfg.cs.snr_db, 45.0);
    }
}
