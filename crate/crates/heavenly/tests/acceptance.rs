//! One PASS/FAIL line per acceptance criterion.
//!
//! Criteria 4 and 10 are known to fail as stated (see the README); the test
//! pins every outcome, so a criterion changing state in either direction
//! fails the run.

use std::time::{Duration, Instant};

use heavenly::config::RunConfig;
use heavenly::report::{emit, SuiteResult};
use heavenly::suites::{run_suite, Context};
use heavenly::{run, Format, Status};
use heavenly_core::geometry::MetricChoice;
use heavenly_core::sysmodel::SystemModel;

/// Tolerance for the floating-point checks (criterion 10 and the Leibniz
/// comparison).
const TOL: f64 = 1e-9;
const EXPECTED_FAIL: [u8; 2] = [4, 10];

struct Outcome {
    id: u8,
    title: &'static str,
    pass: bool,
    note: String,
}

fn config(depth: u16, metric: MetricChoice) -> RunConfig {
    RunConfig { depth, metric, tolerance: TOL, ..RunConfig::default() }
}

fn suite(cfg: &RunConfig, name: &str) -> (SuiteResult, Duration) {
    let ctx = Context::new(cfg).expect("valid config");
    let t = Instant::now();
    let r = run_suite(&ctx, name);
    (r, t.elapsed())
}

fn within(d: Duration, secs: u64) -> bool {
    d <= Duration::from_secs(secs)
}

fn suite_outcome(id: u8, title: &'static str, cfg: &RunConfig, name: &str, budget: u64) -> Outcome {
    let (r, d) = suite(cfg, name);
    let pass = r.passed() && within(d, budget);
    let note = format!("{} checks, residual {}, {:.2?} (budget {budget} s)", r.checks.len(), r.residual, d);
    Outcome { id, title, pass, note }
}

fn criterion_3() -> Outcome {
    let m = SystemModel::symbolic();
    let mut bad = Vec::new();
    if !m.identity_abc().is_zero() {
        bad.push("A - B - C".to_string());
    }
    for name in ["quadratic", "wave-s2", "wave-s3"] {
        let sol = m.catalog_entry(name).expect("catalog entry");
        for (eq, r) in m.residuals(&sol).expect("residuals") {
            if !r.is_zero() {
                bad.push(format!("{eq} on {name}"));
            }
        }
    }
    Outcome {
        id: 3,
        title: "A - B - C = 0; quadratic and travelling-wave potentials solve the heavenly equation",
        pass: bad.is_empty(),
        note: if bad.is_empty() { "all residuals 0".into() } else { bad.join(", ") },
    }
}

fn criterion_4() -> (Outcome, String) {
    let (printed, _) = suite(&config(2, MetricChoice::Printed), "nullity");
    let (web, _) = suite(&config(2, MetricChoice::Web), "nullity");
    let fails = printed.checks.iter().filter(|c| c.status == Status::Fail).count();
    let out = Outcome {
        id: 4,
        title: "leaves null for the displayed co-frame (symbolic, 100 points x 10 lambdas x 2 solutions)",
        pass: printed.passed(),
        note: format!("{fails} of {} checks fail", printed.checks.len()),
    };
    let info = format!("dual co-frame of the split Lax fields: {}", if web.passed() { "all pairings 0" } else { &web.residual });
    (out, info)
}

fn criterion_10() -> (Outcome, String) {
    let (printed, _) = suite(&config(2, MetricChoice::Printed), "ijk-scan");
    let (web, _) = suite(&config(2, MetricChoice::Web), "ijk-scan");
    let d = |r: &SuiteResult, k: &str| r.details.get(k).map(|v| v.to_string()).unwrap_or_default();
    let pass = printed.passed() || web.passed();
    let out = Outcome {
        id: 10,
        title: "EndoTriple scan finds accepted quadruples sharing one cross-ratio",
        pass,
        note: format!(
            "scanned {}, accepted {} (printed) / {} (web); algebra-only cross-ratios {}",
            d(&printed, "scanned"),
            d(&printed, "accepted"),
            d(&web, "accepted"),
            d(&printed, "algebra_ok_cross_ratios")
        ),
    };
    let info = format!(
        "with every metric relation sign-flipped, g(IX,IY) = g(KX,KY) = -g(X,Y) = -g(JX,JY), the web metric accepts {} quadruples, cross-ratios {}",
        d(&web, "opposite_sign_accepted"),
        d(&web, "opposite_sign_cross_ratios")
    );
    (out, info)
}

fn criterion_11() -> Outcome {
    let cfg = config(2, MetricChoice::Printed);
    let a = emit(&run(&cfg).expect("run"), Format::Json);
    let b = emit(&run(&cfg).expect("run"), Format::Json);
    Outcome {
        id: 11,
        title: "two full `verify all` runs give byte-identical JSON",
        pass: a == b,
        note: format!("{} bytes", a.len()),
    }
}

fn main() {
    let base = config(2, MetricChoice::Printed);
    let deep = config(3, MetricChoice::Printed);
    let mut outcomes = vec![
        suite_outcome(1, "[X0,X1] and [L0,L1] close modulo the system, with cofactors", &base, "lax-closure", 60),
        suite_outcome(2, "potential substitution reduces to 0; perturbed control does not", &base, "potential-reduction", 60),
        criterion_3(),
    ];
    let (c4, info4) = criterion_4();
    outcomes.push(c4);
    outcomes.push(suite_outcome(5, "d(alpha_i) ^ alpha0 ^ alpha1 = 0 modulo the system", &base, "alpha-closure", 300));
    outcomes.push(suite_outcome(6, "covering compatible at depth 3, prolongation order 2", &deep, "covering", 600));
    outcomes.push(suite_outcome(7, "hierarchy r = 0..2 accepted; (x3 u_2, 0) rejected", &base, "hierarchy", 600));
    outcomes.push(suite_outcome(8, "recursion on the four translations, twice on (u_3, v_3)", &base, "recursion", 900));
    outcomes.push(suite_outcome(9, "gauge transforms of the quadratic solution are solutions", &base, "gauge", 60));
    let (c10, info10) = criterion_10();
    outcomes.push(c10);
    outcomes.push(criterion_11());

    for o in &outcomes {
        println!("{} [{:>2}] {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.id, o.title, o.note);
        if o.id == 4 {
            println!("INFO [ 4] {info4}");
        }
        if o.id == 10 {
            println!("INFO [10] {info10}");
        }
    }
    let unexpected: Vec<u8> =
        outcomes.iter().filter(|o| o.pass == EXPECTED_FAIL.contains(&o.id)).map(|o| o.id).collect();
    if !unexpected.is_empty() {
        eprintln!("criteria with an unexpected outcome: {unexpected:?}");
        std::process::exit(1);
    }
}
