//! Report model and the JSON / Markdown emitters.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{Format, RunConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub residual: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub status: Status,
    /// `"0"` when every check passed, otherwise the first failing residual.
    pub residual: String,
    pub checks: Vec<Check>,
    pub details: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub lambdas: Vec<String>,
    pub depth: u16,
    pub tolerance: f64,
    pub seed: u64,
    pub metric: String,
    pub suites: Vec<String>,
}

impl From<&RunConfig> for ConfigEcho {
    fn from(c: &RunConfig) -> Self {
        ConfigEcho {
            lambdas: c.lambdas.iter().map(|l| l.to_string()).collect(),
            depth: c.depth,
            tolerance: c.tolerance,
            seed: c.seed,
            metric: c.metric.name().to_string(),
            suites: c.suites.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub config: ConfigEcho,
    pub status: Status,
    pub suites: Vec<SuiteResult>,
}

impl Report {
    pub fn new(cfg: &RunConfig, mut suites: Vec<SuiteResult>) -> Self {
        suites.sort_by(|a, b| a.name.cmp(&b.name));
        let status = Status::from_bool(suites.iter().all(|s| s.passed()));
        Report {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: cfg.into(),
            status,
            suites,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }
}

pub fn emit(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s.into_bytes()
        }
        Format::Markdown => markdown(report).into_bytes(),
    }
}

/// Writes to `out`, or to stdout when `out` is `None`.
pub fn write_output(bytes: &[u8], out: Option<&Path>) -> io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, bytes),
        None => {
            use io::Write;
            let mut o = io::stdout().lock();
            o.write_all(bytes)?;
            o.flush()
        }
    }
}

fn cell(s: &str) -> String {
    s.replace('|', "\\|").replace('\n', " ")
}

fn markdown(r: &Report) -> String {
    let mut s = String::new();
    let c = &r.config;
    let _ = writeln!(s, "# Verification report\n");
    let _ = writeln!(s, "- tool: {} {}", r.tool, r.version);
    let _ = writeln!(s, "- lambdas: {}", c.lambdas.join(", "));
    let _ = writeln!(s, "- depth: {}, tolerance: {:e}, seed: {}, metric: {}", c.depth, c.tolerance, c.seed, c.metric);
    let _ = writeln!(s, "- status: **{}**", r.status.name());
    for suite in &r.suites {
        let _ = writeln!(s, "\n## {}\n", suite.name);
        let _ = writeln!(s, "Status: **{}**. Residual: `{}`.", suite.status.name(), cell(&suite.residual));
        if let Some(t) = suite.timing_ms {
            let _ = writeln!(s, "Time: {t} ms.");
        }
        let _ = writeln!(s, "\n| check | status | residual |\n|---|---|---|");
        for ch in &suite.checks {
            let _ = writeln!(s, "| {} | {} | `{}` |", cell(&ch.name), ch.status.name(), cell(&ch.residual));
        }
        if !suite.details.is_empty() {
            let _ = writeln!(s);
            for (k, v) in &suite.details {
                let _ = writeln!(s, "- {k}: `{}`", cell(&v.to_string()));
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn suite(name: &str, ok: bool) -> SuiteResult {
        SuiteResult {
            name: name.to_string(),
            status: Status::from_bool(ok),
            residual: if ok { "0".into() } else { "x".into() },
            checks: vec![Check { name: "c|1".into(), status: Status::from_bool(ok), residual: "0".into() }],
            details: Map::new(),
            timing_ms: None,
        }
    }

    #[test]
    fn sorted_and_failing() {
        let r = Report::new(&RunConfig::default(), vec![suite("nullity", false), suite("gauge", true)]);
        assert_eq!(r.suites[0].name, "gauge");
        assert!(!r.passed());
        let json = String::from_utf8(emit(&r, Format::Json)).unwrap();
        assert!(json.contains("\"status\": \"fail\""));
        assert!(!json.contains("timing_ms"));
    }

    #[test]
    fn markdown_sections() {
        let r = Report::new(&RunConfig::default(), vec![suite("gauge", true), suite("nullity", true)]);
        let md = String::from_utf8(emit(&r, Format::Markdown)).unwrap();
        assert_eq!(md.matches("\n## ").count(), 2);
        assert!(md.contains("c\\|1"));
    }
}
