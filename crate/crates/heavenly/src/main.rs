use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heavenly::commands::{self, EvalKind};
use heavenly::config::{parse_lambdas, parse_metric, parse_suites, ConfigFile, Format, RunConfig};
use heavenly::report::{emit, write_output};
use heavenly_core::Rational;

#[derive(Parser)]
#[command(name = "heavenly", version, about = "Exact verification suites for the two-component heavenly system")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Four distinct rationals, comma separated (e.g. 0,1,2,3 or 0,1/2,2,3).
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    lambdas: Option<Vec<String>>,
    /// Covering depth R.
    #[arg(long, global = true)]
    depth: Option<u16>,
    /// Tolerance for floating-point checks.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed of the sampling RNG.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_parser = ["json", "markdown"])]
    format: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Co-frame used for nullity, eval and the endomorphism scan.
    #[arg(long, global = true, value_parser = ["printed", "web"])]
    metric: Option<String>,
    /// Include per-suite wall-clock times (breaks byte-stability).
    #[arg(long, global = true)]
    timings: bool,
    /// TOML or JSON file; its keys override the flags above.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites (names or `all`).
    Verify {
        #[arg(required = true)]
        suites: Vec<String>,
    },
    /// Evaluate the co-frame or metric on a catalog solution.
    Eval {
        #[arg(value_enum)]
        what: What,
        #[arg(long)]
        solution: String,
        /// Four rationals, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Vec<String>,
    },
    /// Covering operations.
    Covering {
        #[command(subcommand)]
        action: CoveringAction,
    },
    /// Iterate the recursion operator on a named seed characteristic.
    Recursion {
        #[arg(long = "seed-char")]
        seed_char: String,
        #[arg(long, default_value_t = 1)]
        times: u16,
    },
}

#[derive(Subcommand)]
enum CoveringAction {
    /// Print the covering rules up to `--depth`.
    Export,
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    Frame,
    Metric,
}

fn build_config(c: &Common, suites: Option<&[String]>) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::default();
    if let Some(l) = &c.lambdas {
        cfg.lambdas = parse_lambdas(l).map_err(|e| e.to_string())?;
    }
    if let Some(d) = c.depth {
        cfg.depth = d;
    }
    if let Some(t) = c.tol {
        cfg.tolerance = t;
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(f) = &c.format {
        cfg.format = Format::from_name(f).map_err(|e| e.to_string())?;
    }
    if let Some(m) = &c.metric {
        cfg.metric = parse_metric(m).map_err(|e| e.to_string())?;
    }
    if let Some(s) = suites {
        cfg.suites = parse_suites(s).map_err(|e| e.to_string())?;
    }
    cfg.out = c.out.clone();
    cfg.timings = c.timings;
    if let Some(p) = &c.config {
        let f = ConfigFile::load(p).map_err(|e| e.to_string())?;
        cfg.apply_file(f).map_err(|e| e.to_string())?;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn json_bytes(v: &serde_json::Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("json value");
    s.push('\n');
    s.into_bytes()
}

fn execute(cli: Cli) -> Result<bool, String> {
    let suites = match &cli.command {
        Command::Verify { suites } => Some(suites.as_slice()),
        _ => None,
    };
    let cfg = build_config(&cli.common, suites)?;
    let (bytes, ok) = match cli.command {
        Command::Verify { .. } => {
            let report = heavenly::run(&cfg).map_err(|e| e.to_string())?;
            (emit(&report, cfg.format), report.passed())
        }
        Command::Eval { what, solution, point } => {
            let bad = || format!("--point needs four rationals, got `{}`", point.join(","));
            let v: Vec<Rational> =
                point.iter().map(|s| s.trim().parse::<Rational>()).collect::<Result<_, _>>().map_err(|_| bad())?;
            let p: [Rational; 4] = v.try_into().map_err(|_| bad())?;
            let kind = match what {
                What::Frame => EvalKind::Frame,
                What::Metric => EvalKind::Metric,
            };
            let v = commands::eval(kind, &cfg.lambdas, cfg.metric, &solution, &p).map_err(|e| e.to_string())?;
            (json_bytes(&v), true)
        }
        Command::Covering { action: CoveringAction::Export } => {
            let v = commands::covering_export(&cfg.lambdas, cfg.depth).map_err(|e| e.to_string())?;
            (json_bytes(&v), true)
        }
        Command::Recursion { seed_char, times } => {
            let (v, ok) = commands::recursion(&cfg.lambdas, &seed_char, times).map_err(|e| e.to_string())?;
            (json_bytes(&v), ok)
        }
    };
    write_output(&bytes, cfg.out.as_deref()).map_err(|e| format!("cannot write output: {e}"))?;
    Ok(ok)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
