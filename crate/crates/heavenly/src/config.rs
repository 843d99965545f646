//! Run configuration: command-line values, optionally overridden by a TOML
//! or JSON file.

use std::path::{Path, PathBuf};

use heavenly_core::geometry::MetricChoice;
use heavenly_core::Rational;
use serde::Deserialize;

use crate::suites::SUITES;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("expected 4 lambda values, got {0}")]
    LambdaCount(usize),
    #[error("lambda `{0}` is not an exact rational (use p or p/q)")]
    BadLambda(String),
    #[error("lambda values must be pairwise distinct: {0}")]
    DuplicateLambdas(String),
    #[error("tolerance must be positive and finite, got {0}")]
    Tolerance(f64),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("unknown metric `{0}` (expected printed or web)")]
    UnknownMetric(String),
    #[error("unknown format `{0}` (expected json or markdown)")]
    UnknownFormat(String),
    #[error("cannot read {path}: {msg}")]
    Io { path: PathBuf, msg: String },
    #[error("malformed config {path}: {msg}")]
    Parse { path: PathBuf, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Markdown,
}

impl Format {
    pub fn from_name(s: &str) -> Result<Self, ConfigError> {
        match s {
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            _ => Err(ConfigError::UnknownFormat(s.to_string())),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub lambdas: [Rational; 4],
    pub depth: u16,
    pub tolerance: f64,
    pub seed: u64,
    pub suites: Vec<String>,
    pub out: Option<PathBuf>,
    pub metric: MetricChoice,
    pub format: Format,
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            lambdas: [0, 1, 2, 3].map(Rational::from_int),
            depth: 2,
            tolerance: 1e-9,
            seed: 0,
            suites: SUITES.iter().map(|s| s.to_string()).collect(),
            out: None,
            metric: MetricChoice::Printed,
            format: Format::Json,
            timings: false,
        }
    }
}

/// Keys accepted in a config file; every key is optional and wins over
/// the corresponding flag.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub lambdas: Option<Vec<String>>,
    pub depth: Option<u16>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub suites: Option<Vec<String>>,
    pub out: Option<PathBuf>,
    pub metric: Option<String>,
    pub format: Option<String>,
    pub timings: Option<bool>,
}

impl ConfigFile {
    /// Reads TOML, or JSON when the extension is `.json`.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.to_path_buf(), msg: e.to_string() })?;
        let parse_err = |msg: String| ConfigError::Parse { path: path.to_path_buf(), msg };
        if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| parse_err(e.to_string()))
        } else {
            toml::from_str(&text).map_err(|e| parse_err(e.to_string()))
        }
    }
}

pub fn parse_lambdas<S: AsRef<str>>(items: &[S]) -> Result<[Rational; 4], ConfigError> {
    if items.len() != 4 {
        return Err(ConfigError::LambdaCount(items.len()));
    }
    let mut out: [Rational; 4] = Default::default();
    for (slot, s) in out.iter_mut().zip(items) {
        let s = s.as_ref().trim();
        *slot = s.parse().map_err(|_| ConfigError::BadLambda(s.to_string()))?;
    }
    for a in 0..4 {
        for b in (a + 1)..4 {
            if out[a] == out[b] {
                return Err(ConfigError::DuplicateLambdas(format!("l{} = l{} = {}", a + 1, b + 1, out[a])));
            }
        }
    }
    Ok(out)
}

/// Expands `all` and rejects unknown names; the result is sorted and
/// deduplicated.
pub fn parse_suites<S: AsRef<str>>(items: &[S]) -> Result<Vec<String>, ConfigError> {
    let mut out = Vec::new();
    for s in items {
        let s = s.as_ref().trim();
        if s == "all" {
            out.extend(SUITES.iter().map(|x| x.to_string()));
        } else if SUITES.contains(&s) {
            out.push(s.to_string());
        } else {
            return Err(ConfigError::UnknownSuite(s.to_string()));
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

pub fn parse_metric(s: &str) -> Result<MetricChoice, ConfigError> {
    MetricChoice::from_name(s).ok_or_else(|| ConfigError::UnknownMetric(s.to_string()))
}

impl RunConfig {
    pub fn apply_file(&mut self, f: ConfigFile) -> Result<(), ConfigError> {
        if let Some(l) = f.lambdas {
            self.lambdas = parse_lambdas(&l)?;
        }
        if let Some(d) = f.depth {
            self.depth = d;
        }
        if let Some(t) = f.tolerance {
            self.tolerance = t;
        }
        if let Some(s) = f.seed {
            self.seed = s;
        }
        if let Some(s) = f.suites {
            self.suites = parse_suites(&s)?;
        }
        if let Some(o) = f.out {
            self.out = Some(o);
        }
        if let Some(m) = f.metric {
            self.metric = parse_metric(&m)?;
        }
        if let Some(fm) = f.format {
            self.format = Format::from_name(&fm)?;
        }
        if let Some(t) = f.timings {
            self.timings = t;
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(ConfigError::Tolerance(self.tolerance));
        }
        let text: Vec<String> = self.lambdas.iter().map(|l| l.to_string()).collect();
        parse_lambdas(&text)?;
        for s in &self.suites {
            if !SUITES.contains(&s.as_str()) {
                return Err(ConfigError::UnknownSuite(s.clone()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_rejected() {
        assert!(matches!(parse_lambdas(&["0", "0.5", "2", "3"]), Err(ConfigError::BadLambda(_))));
        assert!(matches!(parse_lambdas(&["1e3", "1", "2", "3"]), Err(ConfigError::BadLambda(_))));
        assert_eq!(parse_lambdas(&["0", "1/2", "-2", "3"]).unwrap()[1], Rational::new(1, 2));
    }

    #[test]
    fn duplicates_rejected() {
        assert!(matches!(parse_lambdas(&["1", "2/2", "2", "3"]), Err(ConfigError::DuplicateLambdas(_))));
        assert!(matches!(parse_lambdas(&["1", "2", "3"]), Err(ConfigError::LambdaCount(3))));
    }

    #[test]
    fn suites_expand_and_sort() {
        let s = parse_suites(&["nullity", "gauge", "nullity"]).unwrap();
        assert_eq!(s, vec!["gauge", "nullity"]);
        assert_eq!(parse_suites(&["all"]).unwrap().len(), SUITES.len());
        assert!(parse_suites(&["bogus"]).is_err());
    }

    #[test]
    fn file_overrides() {
        let f: ConfigFile = toml::from_str("lambdas = [\"0\", \"1\", \"2\", \"5\"]\ndepth = 1\nmetric = \"web\"").unwrap();
        let mut c = RunConfig::default();
        c.apply_file(f).unwrap();
        assert_eq!(c.lambdas[3], Rational::from_int(5));
        assert_eq!(c.depth, 1);
        assert_eq!(c.metric, MetricChoice::Web);
        let bad: Result<ConfigFile, _> = toml::from_str("lambdas = [0.5, 1, 2, 3]");
        assert!(bad.is_err());
        let neg = ConfigFile { tolerance: Some(-1.0), ..Default::default() };
        assert!(matches!(RunConfig::default().apply_file(neg), Err(ConfigError::Tolerance(_))));
    }
}
