//! The non-suite commands; each returns a JSON value and a pass flag.

use heavenly_core::geometry::{coframe_for, eval_coframe, eval_metric, metric_for, MetricChoice};
use heavenly_core::symmetry::{build_covering, named_characteristic, recursion_apply, verify_symmetry, Covering};
use heavenly_core::sysmodel::{build_system, SystemModel};
use heavenly_core::{Error, Rational, Result};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalKind {
    Frame,
    Metric,
}

fn lambdas_json(l: &[Rational; 4]) -> Vec<String> {
    l.iter().map(|r| r.to_string()).collect()
}

/// The co-frame (rows `omega^i`, columns `dx^j`) or the metric matrix of a
/// catalog solution at a rational point.
pub fn eval(
    kind: EvalKind,
    lambdas: &[Rational; 4],
    metric: MetricChoice,
    solution: &str,
    point: &[Rational; 4],
) -> Result<Value> {
    let m = build_system(lambdas.clone())?;
    let sol = m.catalog_entry(solution)?;
    let mat = match kind {
        EvalKind::Frame => eval_coframe(&m, &coframe_for(&m, metric)?, &sol, point)?,
        EvalKind::Metric => eval_metric(&m, &metric_for(&m, metric)?, &sol, point)?,
    };
    let rows: Vec<Vec<String>> = mat.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
    Ok(json!({
        "kind": if kind == EvalKind::Frame { "frame" } else { "metric" },
        "lambdas": lambdas_json(lambdas),
        "metric": metric.name(),
        "solution": solution,
        "point": point.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        "matrix": rows,
    }))
}

pub fn covering_export(lambdas: &[Rational; 4], depth: u16) -> Result<Value> {
    let m = build_system(lambdas.clone())?;
    let cov = build_covering(&m, depth)?;
    let rules: Vec<Value> =
        cov.export().into_iter().map(|(var, d, val)| json!({"variable": var, "direction": d, "value": val})).collect();
    let consistency: Vec<Value> =
        cov.consistency().iter().map(|(n, e)| json!({"component": n, "residual": e.to_string()})).collect();
    Ok(json!({
        "lambdas": lambdas_json(lambdas),
        "depth": depth,
        "rules": rules,
        "consistency": consistency,
    }))
}

/// Applies the recursion operator `times` times to a named seed and checks
/// every iterate.
pub fn recursion(lambdas: &[Rational; 4], seed: &str, times: u16) -> Result<(Value, bool)> {
    let m: SystemModel = build_system(lambdas.clone())?;
    let mut ch = named_characteristic(seed).ok_or_else(|| Error::UnknownSymbol(seed.to_string()))?;
    let mut cov = Covering::new(&m);
    let mut steps = Vec::new();
    let mut all = true;
    let first = verify_symmetry(&cov, &ch)?;
    all &= first.accepted;
    steps.push(json!({"step": 0, "characteristic": ch.to_string(), "accepted": first.accepted}));
    for k in 1..=times {
        let (next, c) = recursion_apply(&cov, &ch)?;
        let r = verify_symmetry(&c, &next)?;
        all &= r.accepted;
        steps.push(json!({
            "step": k,
            "characteristic": next.to_string(),
            "accepted": r.accepted,
            "residual_u": r.residual_u.to_string(),
            "residual_v": r.residual_v.to_string(),
        }));
        ch = next;
        cov = c;
    }
    let status = if all { "pass" } else { "fail" };
    Ok((json!({"lambdas": lambdas_json(lambdas), "seed": seed, "times": times, "status": status, "steps": steps}), all))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_l() -> [Rational; 4] {
        [0, 1, 2, 3].map(Rational::from_int)
    }

    #[test]
    fn frame_entry() {
        let p = [1, 0, 0, 0].map(Rational::from_int);
        let v = eval(EvalKind::Frame, &std_l(), MetricChoice::Printed, "quadratic", &p).unwrap();
        assert_eq!(v["matrix"][1][0], "1/6");
    }

    #[test]
    fn recursion_translation() {
        let (v, ok) = recursion(&std_l(), "translation-1", 1).unwrap();
        assert!(ok);
        assert_eq!(v["steps"].as_array().unwrap().len(), 2);
        assert!(recursion(&std_l(), "nope", 1).is_err());
    }
}
