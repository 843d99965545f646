//! The verification suites and the concurrent runner.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::time::Instant;

use heavenly_core::geometry::{
    alpha_closure_check, alpha_closure_for, alpha_printed, annihilates, build_alpha, chern_constant, cross_ratio,
    default_eigenparams, eval_metric, metric_for, nullity_samples, scan_quadruples, show_point, symbolic_nullity,
    build_ijk, ChernConnection, EndoTriple, NullitySample, Vector,
};
use heavenly_core::lax::{build_l, commutator_closure_report, x_closure};
use heavenly_core::linalg::{self, Matrix};
use heavenly_core::parse::parse;
use heavenly_core::symmetry::{
    build_covering, hierarchy_characteristic, named_characteristic, recursion_apply, verify_symmetry, Characteristic,
    Covering,
};
use heavenly_core::sysmodel::{build_system, gauge_grid, gauge_transform, SystemModel};
use heavenly_core::{Error, Expr, Family, Rational, Symbol};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{ConfigError, RunConfig};
use crate::report::{Check, Report, Status, SuiteResult};

type CoreResult<T> = heavenly_core::Result<T>;

/// Every suite, sorted by name.
pub const SUITES: [&str; 10] = [
    "alpha-closure",
    "connection",
    "covering",
    "gauge",
    "hierarchy",
    "ijk-scan",
    "lax-closure",
    "nullity",
    "potential-reduction",
    "recursion",
];

const NULLITY_POINTS: usize = 100;
const NULLITY_LAMBDAS: usize = 10;
const CONNECTION_CANDIDATES: usize = 20;
const CONNECTION_POINTS: usize = 5;
const RESIDUAL_CHARS: usize = 400;
/// Solutions for the numeric nullity samples; both avoid the locus where
/// the web degenerates.
pub const NULLITY_SOLUTIONS: [&str; 2] = ["linear-generic", "quadratic-generic"];

/// Random samples, all drawn up front from the one seeded generator so that
/// results do not depend on which suites run or in what order.
#[derive(Clone, Debug)]
pub struct Samples {
    pub nullity: Vec<([Rational; 4], Rational)>,
    pub connection: Vec<[Rational; 4]>,
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(-9..=9), rng.gen_range(1..=5))
}

fn random_point(rng: &mut ChaCha8Rng) -> [Rational; 4] {
    std::array::from_fn(|_| random_rational(rng))
}

impl Samples {
    pub fn draw(seed: u64) -> Samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points: Vec<[Rational; 4]> = (0..NULLITY_POINTS).map(|_| random_point(&mut rng)).collect();
        let lambdas: Vec<Rational> = (0..NULLITY_LAMBDAS).map(|_| random_rational(&mut rng)).collect();
        let nullity = points.iter().flat_map(|p| lambdas.iter().map(move |l| (p.clone(), l.clone()))).collect();
        let connection = (0..CONNECTION_CANDIDATES).map(|_| random_point(&mut rng)).collect();
        Samples { nullity, connection }
    }
}

pub struct Context {
    pub cfg: RunConfig,
    pub model: SystemModel,
    pub symbolic: SystemModel,
    pub samples: Samples,
}

impl Context {
    pub fn new(cfg: &RunConfig) -> Result<Self, ConfigError> {
        cfg.validate()?;
        let model = build_system(cfg.lambdas.clone()).map_err(|e| ConfigError::DuplicateLambdas(e.to_string()))?;
        Ok(Context { cfg: cfg.clone(), model, symbolic: SystemModel::symbolic(), samples: Samples::draw(cfg.seed) })
    }

    fn models(&self) -> [(&'static str, &SystemModel); 2] {
        [("symbolic", &self.symbolic), ("numeric", &self.model)]
    }
}

fn clip(s: String) -> String {
    if s.chars().count() <= RESIDUAL_CHARS {
        return s;
    }
    let head: String = s.chars().take(RESIDUAL_CHARS).collect();
    format!("{head}... ({} chars)", s.chars().count())
}

/// Collects checks and details for one suite.
#[derive(Default)]
pub struct Builder {
    checks: Vec<Check>,
    details: Map<String, Value>,
}

impl Builder {
    pub fn check(&mut self, name: impl Into<String>, ok: bool, residual: impl Display) {
        self.checks.push(Check { name: name.into(), status: Status::from_bool(ok), residual: clip(residual.to_string()) });
    }

    pub fn zero(&mut self, name: impl Into<String>, e: &Expr) {
        self.check(name, e.is_zero(), e);
    }

    pub fn detail(&mut self, key: &str, v: impl Serialize) {
        self.details.insert(key.to_string(), serde_json::to_value(v).expect("serializable detail"));
    }

    fn finish(self, name: &str, timing_ms: Option<u64>) -> SuiteResult {
        let failed = self.checks.iter().find(|c| c.status == Status::Fail);
        let residual = match failed {
            Some(c) => format!("{}: {}", c.name, c.residual),
            None => "0".to_string(),
        };
        let ok = failed.is_none() && !self.checks.is_empty();
        SuiteResult {
            name: name.to_string(),
            status: Status::from_bool(ok),
            residual,
            checks: self.checks,
            details: self.details,
            timing_ms,
        }
    }
}

pub fn run_suite(ctx: &Context, name: &str) -> SuiteResult {
    let start = Instant::now();
    let mut b = Builder::default();
    let outcome = match name {
        "alpha-closure" => alpha_closure(ctx, &mut b),
        "connection" => connection(ctx, &mut b),
        "covering" => covering(ctx, &mut b),
        "gauge" => gauge(ctx, &mut b),
        "hierarchy" => hierarchy(ctx, &mut b),
        "ijk-scan" => ijk_scan(ctx, &mut b),
        "lax-closure" => lax_closure(ctx, &mut b),
        "nullity" => nullity(ctx, &mut b),
        "potential-reduction" => potential_reduction(ctx, &mut b),
        "recursion" => recursion(ctx, &mut b),
        other => Err(Error::UnknownSymbol(other.to_string())),
    };
    if let Err(e) = outcome {
        b.check("suite completed", false, e);
    }
    let elapsed = ctx.cfg.timings.then(|| start.elapsed().as_millis() as u64);
    b.finish(name, elapsed)
}

/// Runs the configured suites concurrently; results are sorted by name.
pub fn run(cfg: &RunConfig) -> Result<Report, ConfigError> {
    let ctx = Context::new(cfg)?;
    let results = std::thread::scope(|s| {
        let handles: Vec<_> =
            cfg.suites.iter().map(|name| (name, s.spawn(|| run_suite(&ctx, name)))).collect();
        handles
            .into_iter()
            .map(|(name, h)| {
                h.join().unwrap_or_else(|_| {
                    let mut b = Builder::default();
                    b.check("suite completed", false, "panicked");
                    b.finish(name, None)
                })
            })
            .collect()
    });
    Ok(Report::new(cfg, results))
}

fn lax_closure(ctx: &Context, b: &mut Builder) -> CoreResult<()> {
    for (tag, m) in ctx.models() {
        let xr = x_closure(m)?;
        for c in &xr.cofactors {
            let shown = if c.reduced.is_zero() { &c.residual } else { &c.reduced };
            b.check(format!("{tag}: [X0,X1] component {}", c.component), c.reduced.is_zero() && c.residual.is_zero(), shown);
        }
        let nonzero = |f: &dyn Fn(&heavenly_core::lax::Cofactors) -> bool| xr.cofactors.iter().filter(|c| f(c)).count();
        b.check(
            format!("{tag}: both equations carry nonzero cofactors"),
            xr.equivalent_to_system(),
            format!("eq_u in {} components, eq_v in {}", nonzero(&|c| !c.mu_u.is_zero()), nonzero(&|c| !c.mu_v.is_zero())),
        );
        match commutator_closure_report(m) {
            Ok(r) => {
                b.check(format!("{tag}: [L0,L1] - c0 L0 - c1 L1"), r.residual_is_zero(), r.residual_summary());
                b.detail(&format!("{tag}.c0"), r.c0.to_string());
                b.detail(&format!("{tag}.c1"), r.c1.to_string());
            }
            Err(e) => b.check(format!("{tag}: [L0,L1] - c0 L0 - c1 L1"), false, e),
        }
    }
    Ok(())
}

fn potential_reduction(ctx: &Context, b: &mut Builder) -> CoreResult<()> {
    for (tag, m) in ctx.models() {
        match m.check_potential_reduction(false) {
            Ok(r) => {
                for (eq, res) in &r.residuals {
                    b.zero(format!("{tag}: {eq} on u = w_1, v = w_2"), res);
                }
            }
            Err(e) => b.check(format!("{tag}: potential substitution"), false, e),
        }
        let neg = m.check_potential_reduction(true)?;
        let sizes: Vec<String> = neg.residuals.iter().map(|(n, r)| format!("{n}: {} terms", r.size())).collect();
        b.check(format!("{tag}: perturbed equation leaves a residual"), !neg.all_zero(), sizes.join(", "));
        b.zero(format!("{tag}: A - B - C"), &m.identity_abc());
        for sol in m.solution_catalog()? {
            for (eq, res) in m.residuals(&sol)? {
                b.zero(format!("{tag}: {eq} on {}", sol.descriptor), &res);
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct SampleJson {
    point: Vec<String>,
    lambda: String,
    pairings: Vec<String>,
}

fn sample_json(s: &NullitySample) -> SampleJson {
    SampleJson {
        point: s.point.iter().map(|r| r.to_string()).collect(),
        lambda: s.lambda.to_string(),
        pairings: s.pairings.iter().map(|r| r.to_string()).collect(),
    }
}

fn nullity(ctx: &Context, b: &mut Builder) -> CoreResult<()> {
    let choice = ctx.cfg.metric;
    b.detail("metric", choice.name());
    let gs = metric_for(&ctx.symbolic, choice)?;
    let names = ["g(X0,X0)", "g(X0,X1)", "g(X1,X1)"];
    for (n, e) in names.iter().zip(symbolic_nullity(&ctx.symbolic, &gs)) {
        b.zero(format!("symbolic: {n}"), &e);
    }
    let g = metric_for(&ctx.model, choice)?;
    for desc in NULLITY_SOLUTIONS {
        let sol = ctx.model.catalog_entry(desc)?;
        let rep = nullity_samples(&ctx.model, &g, &sol, &ctx.samples.nullity)?;
        let bad: Vec<&NullitySample> = rep.samples.iter().filter(|s| !s.is_null()).collect();
        let first = bad.first().map(|s| serde_json::to_string(&sample_json(s)).expect("serializable"));
        b.check(
            format!("{desc}: pairings at {} samples", rep.samples.len()),
            bad.is_empty(),
            first.unwrap_or_else(|| "0".to_string()),
        );
        let shown: Vec<SampleJson> = rep.samples.iter().take(3).map(sample_json).collect();
        b.detail(&format!("{desc}.samples"), shown);
        b.detail(&format!("{desc}.failures"), bad.len());
    }
    Ok(())
}

fn alpha_closure(ctx: &Context, b: &mut Builder) -> CoreResult<()> {
    for (tag, m) in ctx.models() {
        match alpha_closure_check(m) {
            Ok(r) => {
                for (i, e) in r.top.iter().enumerate() {
                    b.zero(format!("{tag}: d(alpha{i}) ^ alpha0 ^ alpha1"), e);
                }
            }
            Err(e) => b.check(format!("{tag}: alpha closure"), false, e),
        }
        let (a0, a1) = build_alpha(m);
        let (l0, l1) = build_l(m);
        for (an, a) in [("alpha0", &a0), ("alpha1", &a1)] {
            for (ln, l) in [("L0", &l0), ("L1", &l1)] {
                b.zero(format!("{tag}: {an}({ln})"), &annihilates(m, a, l));
            }
        }
        let (_, p1) = alpha_printed(m);
        b.detail(&format!("{tag}.displayed_alpha1_annihilates_L0"), annihilates(m, &p1, &l0).is_zero());
    }
    let m = &ctx.model;
    let (mut a0, a1) = build_alpha(m);
    a0[3] = &a0[3] + &Expr::one();
    let rejected = matches!(alpha_closure_for(m, &a0, &a1), Err(Error::ClosednessFailure(_)));
    b.check("numeric: perturbed alpha0 is not closed", rejected, if rejected { "rejected" } else { "accepted" });
    Ok(())
}

fn export_rules(cov: &Covering) -> Vec<Value> {
    cov.export().into_iter().map(|(var, m, val)| json!({"variable": var, "direction": m, "value": val})).collect()
}

fn covering(ctx: &Context, b: &mut Builder) -> CoreResult<()> {
    let cov = build_covering(&ctx.model, ctx.cfg.depth)?;
    for (n, r) in cov.compatibility_residuals(Family::Xi, 2)? {
        b.zero(format!("[D3,D4] {}", Symbol::Nonlocal(n)), &r);
    }
    for (name, r) in cov.consistency() {
        b.zero(format!("unused component: {name}"), r);
    }
    b.detail("depth", ctx.cfg.depth);
    b.detail("prolongation_order", 2);
    b.detail("rules", export_rules(&cov));
    Ok(())
}

fn symmetry_check(b: &mut Builder, cov: &Covering, ch: &Characteristic, expect: bool) -> CoreResult<()> {
    let r = verify_symmetry(cov, ch)?;
    let shown = if r.accepted { "0".to_string() } else { format!("({}, {})", r.residual_u, r.residual_v) };
    let name = if expect { format!("{} accepted", ch.provenance) } else { format!("{} rejected", ch.provenance) };
    b.check(name, r.accepted == expect, shown);
    Ok(())
}

fn hierarchy(ctx: &Context, b: &mut Builder) -> CoreResult<()> {
    let cov = build_covering(&ctx.model, ctx.cfg.depth)?;
    let mut shown = Vec::new();
    for r in 0..=ctx.cfg.depth {
        let ch = hierarchy_characteristic(r);
        symmetry_check(b, &cov, &ch, true)?;
        shown.push(ch.to_string());
    }
    let neg = Characteristic::new(parse("x3*u_2")?, Expr::zero(), "control (x3 u_2, 0)");
    symmetry_check(b, &cov, &neg, false)?;
    b.detail("characteristics", shown);
    Ok(())
}

fn recursion(ctx: &Context, b: &mut Builder) -> CoreResult<()> {
    let base = Covering::new(&ctx.model);
    let mut shown = Vec::new();
    for i in 1..=4 {
        let seed = named_characteristic(&format!("translation-{i}")).expect("known seed");
        let (once, c1) = recursion_apply(&base, &seed)?;
        symmetry_check(b, &c1, &once, true)?;
        shown.push(once.to_string());
        if i == 3 {
            let (twice, c2) = recursion_apply(&c1, &once)?;
            symmetry_check(b, &c2, &twice, true)?;
            shown.push(twice.to_string());
        }
    }
    b.detail("characteristics", shown);
    Ok(())
}

fn gauge(ctx: &Context, b: &mut Builder) -> CoreResult<()> {
    let m = &ctx.model;
    let sol = m.catalog_entry("quadratic")?;
    let grid = gauge_grid();
    for (a, bb) in [("2", "3"), ("1 + x1^2", "1"), ("1", "1 + x2^2")] {
        let t = gauge_transform(&sol, &parse(a)?, &parse(bb)?, &grid)?;
        for (eq, r) in m.residuals(&t)? {
            b.zero(format!("a = {a}, b = {bb}: {eq}"), &r);
        }
    }
    let neg = gauge_transform(&sol, &parse("x1")?, &Expr::one(), &grid);
    let rejected = matches!(neg, Err(Error::GaugeDegenerate(_)));
    b.check("vanishing factor a = x1 rejected", rejected, if rejected { "rejected" } else { "accepted" });
    Ok(())
}

/// Ordered quadruples of distinct values from a small rational set.
pub fn quadruple_candidates() -> Vec<[Rational; 4]> {
    let set: Vec<Rational> = [(-2, 1), (-1, 1), (-1, 2), (0, 1), (1, 3), (1, 2), (1, 1), (2, 1)]
        .iter()
        .map(|&(p, q)| Rational::new(p, q))
        .collect();
    let mut out = Vec::new();
    for a in &set {
        for b in &set {
            for c in &set {
                for d in &set {
                    let q = [a.clone(), b.clone(), c.clone(), d.clone()];
                    let distinct = (0..4).all(|i| ((i + 1)..4).all(|j| q[i] != q[j]));
                    if distinct {
                        out.push(q);
                    }
                }
            }
        }
    }
    out
}

pub const IJK_SOLUTION: &str = "linear-generic";

pub fn ijk_point() -> [Rational; 4] {
    [1, 2, 3, 4].map(Rational::from_int)
}

fn distinct_ratios<'a>(it: impl Iterator<Item = &'a Option<Rational>>) -> Vec<String> {
    let mut v: Vec<String> = it.map(|c| c.as_ref().map_or("inf".to_string(), |r| r.to_string())).collect();
    v.sort();
    v.dedup();
    v
}

fn ijk_scan(ctx: &Context, b: &mut Builder) -> CoreResult<()> {
    let m = &ctx.model;
    let sol = m.catalog_entry(IJK_SOLUTION)?;
    let x = ijk_point();
    let g = eval_metric(m, &metric_for(m, ctx.cfg.metric)?, &sol, &x)?;
    let gf: Matrix<f64> = g.iter().map(|r| r.iter().map(|v| v.to_f64()).collect()).collect();
    let candidates = quadruple_candidates();
    let scan = scan_quadruples(m, &sol, &x, &gf, &candidates, ctx.cfg.tolerance)?;
    let algebra: Vec<_> = scan.iter().filter(|s| s.validation.algebra_ok()).collect();
    let accepted: Vec<_> = scan.iter().filter(|s| s.validation.accepted()).collect();
    let best_metric = algebra
        .iter()
        .map(|s| {
            ["J'gJ + g", "I'gI - g", "K'gK - g"].iter().map(|n| s.validation.residual(n).unwrap_or(f64::NAN)).fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min);
    b.check(
        format!("accepted quadruple among {} scanned", scan.len()),
        !accepted.is_empty(),
        if accepted.is_empty() { format!("smallest metric residual {best_metric:.3e}") } else { "0".to_string() },
    );
    let ratios = distinct_ratios(accepted.iter().map(|s| &s.cross_ratio));
    b.check(
        "accepted set shares one cross-ratio (at least 5 members)",
        accepted.len() >= 5 && ratios.len() == 1,
        format!("{} accepted, cross-ratios [{}]", accepted.len(), ratios.join(", ")),
    );
    b.detail("metric", ctx.cfg.metric.name());
    b.detail("solution", IJK_SOLUTION);
    b.detail("point", show_point(&x));
    b.detail("scanned", scan.len());
    b.detail("algebra_ok", algebra.len());
    b.detail("algebra_ok_cross_ratios", distinct_ratios(algebra.iter().map(|s| &s.cross_ratio)));
    b.detail("accepted", accepted.len());
    b.detail("accepted_cross_ratios", ratios);
    let mut flipped = Vec::new();
    for s in &algebra {
        let t = build_ijk(m, &sol, &x, &s.mu)?;
        let worst = opposite_sign(&t, &gf).values().fold(0.0, |acc: f64, r| acc.max(*r));
        if worst <= ctx.cfg.tolerance {
            flipped.push(&s.cross_ratio);
        }
    }
    b.detail("opposite_sign_accepted", flipped.len());
    b.detail("opposite_sign_cross_ratios", distinct_ratios(flipped.into_iter()));
    let mu = default_eigenparams();
    if let Some(d) = scan.iter().find(|s| s.mu == mu) {
        let res: Map<String, Value> =
            d.validation.residuals.iter().map(|(n, r)| (n.clone(), json!(format!("{r:.3e}")))).collect();
        b.detail("default_quadruple", show_point(&mu));
        b.detail("default_cross_ratio", cross_ratio(&mu).map(|r| r.to_string()));
        b.detail("default_residuals", res);
        b.detail("default_opposite_sign_residuals", show_residuals(&opposite_sign(&build_ijk(m, &sol, &x, &mu)?, &gf)));
    }
    Ok(())
}

/// `I'gI + g`, `K'gK + g`, `J'gJ - g`: the metric relations with the sign
/// flipped, reported next to the validator's residuals.
fn opposite_sign(t: &EndoTriple, g: &Matrix<f64>) -> BTreeMap<&'static str, f64> {
    let conj = |a: &Matrix<f64>| linalg::mat_mul(&linalg::transpose(a), &linalg::mat_mul(g, a));
    let gap = |a: &Matrix<f64>, s: f64| {
        a.iter().zip(g).flat_map(|(r, q)| r.iter().zip(q).map(move |(x, y)| (x + s * y).abs())).fold(0.0, f64::max)
    };
    BTreeMap::from([
        ("I'gI + g", gap(&conj(&t.i), 1.0)),
        ("K'gK + g", gap(&conj(&t.k), 1.0)),
        ("J'gJ - g", gap(&conj(&t.j), -1.0)),
    ])
}

fn show_residuals(r: &BTreeMap<&'static str, f64>) -> Map<String, Value> {
    r.iter().map(|(n, v)| (n.to_string(), json!(format!("{v:.3e}")))).collect()
}

pub const CONNECTION_SOLUTION: &str = "quadratic-generic";

fn vector(src: [&str; 4]) -> CoreResult<Vector> {
    Ok([parse(src[0])?, parse(src[1])?, parse(src[2])?, parse(src[3])?])
}

fn add(a: &Vector, c: &Vector) -> Vector {
    std::array::from_fn(|k| &a[k] + &c[k])
}

fn scale(a: &Vector, f: &Expr) -> Vector {
    std::array::from_fn(|k| &a[k] * f)
}

fn connection(ctx: &Context, b: &mut Builder) -> CoreResult<()> {
    let m = &ctx.model;
    let l = &ctx.cfg.lambdas;
    let expected = &(&(&l[2] - &l[0]) * &(&l[3] - &l[1])) / &(&(&l[3] - &l[0]) * &(&l[2] - &l[1]));
    let c_val = chern_constant(m);
    b.check("C", c_val == Expr::constant(expected.clone()), format!("{c_val} (expected {expected})"));
    let sol = m.catalog_entry(CONNECTION_SOLUTION)?;
    let c = ChernConnection::new(m, &sol)?;
    let xf = vector(["1", "x2", "x1*x3", "2"])?;
    let yf = vector(["x4", "1", "x2^2", "x1"])?;
    let zf = vector(["x3", "x1 - x2", "1", "0"])?;
    let f = parse("x1*x3")?;
    let xf_f = Expr::sum((0..4u8).map(|j| &xf[j as usize] * &f.formal_derivative(Symbol::x(j + 1))));
    let add_l = c.covariant(&xf, &add(&yf, &zf));
    let add_r = add(&c.covariant(&xf, &yf), &c.covariant(&xf, &zf));
    let lei_l = c.covariant(&xf, &scale(&yf, &f));
    let lei_r = add(&scale(&yf, &xf_f), &scale(&c.covariant(&xf, &yf), &f));
    let points: Vec<&[Rational; 4]> =
        ctx.samples.connection.iter().filter(|p| c.check_transversal(p).is_ok()).take(CONNECTION_POINTS).collect();
    b.check("transversal sample points", points.len() == CONNECTION_POINTS, points.len());
    let tol = ctx.cfg.tolerance;
    let gap = |u: &[Rational; 4], v: &[Rational; 4]| u.iter().zip(v).map(|(a, c)| (a - c).abs().to_f64()).fold(0.0, f64::max);
    for p in &points {
        let at = show_point(*p);
        let d = gap(&c.eval_at(&add_l, p)?, &c.eval_at(&add_r, p)?);
        b.check(format!("additivity at {at}"), d <= tol, format!("{d:e}"));
        let d = gap(&c.eval_at(&lei_l, p)?, &c.eval_at(&lei_r, p)?);
        b.check(format!("Leibniz (f = x1 x3) at {at}"), d <= tol, format!("{d:e}"));
    }
    let yh = c.pi_h(&yf);
    let yv = c.pi_v(&yf);
    let vh = c.pi_v(&c.covariant(&xf, &yh));
    let hv = c.pi_h(&c.covariant(&xf, &yv));
    for k in 0..4 {
        b.zero(format!("pi_V(nabla_X Y_H) component {}", k + 1), &vh[k]);
        b.zero(format!("pi_H(nabla_X Y_V) component {}", k + 1), &hv[k]);
    }
    b.detail("solution", CONNECTION_SOLUTION);
    b.detail("C", c_val.to_string());
    Ok(())
}
