//! Co-frame, metric, alpha-planes, the split-quaternion endomorphisms,
//! the annihilating 1-forms and the Chern connection of the web.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::eval::eval_exact;
use crate::expr::Expr;
use crate::lax::{build_l, build_x, LambdaVF};
use crate::linalg::{self, Matrix};
use crate::parse::parse;
use crate::rational::Rational;
use crate::symbol::Symbol;
use crate::sysmodel::{ClosedFormSolution, SystemModel};

pub type Covector = [Expr; 4];
pub type Vector = [Expr; 4];

/// Parses `src` written with symbolic `l1..l4` and specializes it to the
/// model's constants.
fn instantiate(model: &SystemModel, src: &str) -> Expr {
    let e = parse(src).expect("well-formed template");
    if model.is_symbolic() {
        return e;
    }
    let b: BTreeMap<Symbol, Expr> = (1..=4u8).map(|i| (Symbol::lambda(i), model.lambda(i as usize).clone())).collect();
    e.substitute(&b).expect("constants only")
}

fn instantiate4(model: &SystemModel, src: [&str; 4]) -> [Expr; 4] {
    src.map(|s| instantiate(model, s))
}

#[derive(Clone, Debug)]
pub struct CoFrame {
    pub omega: [Covector; 4],
}

impl CoFrame {
    pub fn matrix(&self) -> Matrix<Expr> {
        self.omega.iter().map(|w| w.to_vec()).collect()
    }

    pub fn determinant(&self) -> Expr {
        linalg::det(&self.matrix())
    }

    /// Dual co-frame of `(X0^(1), X0^(0), X1^(1), X1^(0))`, for which every
    /// leaf of the web is totally null.
    pub fn web(model: &SystemModel) -> Result<CoFrame> {
        let (x0, x1) = build_x(model);
        let (x00, x01) = x0.split()?;
        let (x10, x11) = x1.split()?;
        let frame = [x01, x00, x11, x10];
        let p: Matrix<Expr> = (1..=4).map(|r| frame.iter().map(|y| y.component(r)).collect()).collect();
        let inv = linalg::inverse(&p)?;
        let omega = [0, 1, 2, 3].map(|i| [0, 1, 2, 3].map(|j| inv[i][j].clone()));
        Ok(CoFrame { omega })
    }
}

/// The co-frame `omega^1..omega^4` as displayed.
pub fn build_coframe(model: &SystemModel) -> CoFrame {
    let w1 = instantiate4(model, ["-l4/(l2-l4)*v_1/v_4", "-l4/(l1-l4)*u_2/u_4", "0", "1"]);
    let w2 = instantiate4(model, ["-1/l4*l2/(l2-l4)*v_1/v_4", "-1/l4*l1/(l1-l4)*u_2/u_4", "0", "1/l4"]);
    let w3 = instantiate4(model, ["-l3/(l2-l3)*v_1/v_3", "-l3/(l1-l3)*u_2/u_3", "1", "0"]);
    let w4 = instantiate4(model, ["-1/l3*l2/(l2-l3)*v_1/v_3", "-1/l3*l1/(l1-l3)*u_2/u_3", "1/l3", "0"]);
    CoFrame { omega: [w1, w2, w3, w4] }
}

#[derive(Clone, Debug)]
pub struct MetricForm {
    pub g: [[Expr; 4]; 4],
}

impl MetricForm {
    pub fn pair(&self, a: &Vector, b: &Vector) -> Expr {
        let mut terms = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                if !self.g[i][j].is_zero() && !a[i].is_zero() && !b[j].is_zero() {
                    terms.push(Expr::product([self.g[i][j].clone(), a[i].clone(), b[j].clone()]));
                }
            }
        }
        Expr::sum(terms)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..4).all(|i| (0..4).all(|j| (&self.g[i][j] - &self.g[j][i]).is_zero()))
    }
}

/// `g = w1 w4 - w2 w3` with symmetrized products.
pub fn build_metric(cf: &CoFrame) -> MetricForm {
    let w = &cf.omega;
    let half = Rational::new(1, 2);
    let g = [0, 1, 2, 3].map(|i| {
        [0, 1, 2, 3].map(|j| {
            let s14 = &(&w[0][i] * &w[3][j]) + &(&w[3][i] * &w[0][j]);
            let s23 = &(&w[1][i] * &w[2][j]) + &(&w[2][i] * &w[1][j]);
            (&s14 - &s23).scale(&half)
        })
    });
    MetricForm { g }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricChoice {
    /// Co-frame exactly as displayed.
    Printed,
    /// Dual of the split Lax frame.
    Web,
}

impl MetricChoice {
    pub fn name(self) -> &'static str {
        match self {
            MetricChoice::Printed => "printed",
            MetricChoice::Web => "web",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "printed" => Some(MetricChoice::Printed),
            "web" => Some(MetricChoice::Web),
            _ => None,
        }
    }
}

pub fn coframe_for(model: &SystemModel, choice: MetricChoice) -> Result<CoFrame> {
    match choice {
        MetricChoice::Printed => Ok(build_coframe(model)),
        MetricChoice::Web => CoFrame::web(model),
    }
}

pub fn metric_for(model: &SystemModel, choice: MetricChoice) -> Result<MetricForm> {
    Ok(build_metric(&coframe_for(model, choice)?))
}

/// Evaluates jet expressions on a closed-form solution at rational points.
pub struct PointEvaluator<'a> {
    sol: &'a ClosedFormSolution,
    guards: Vec<(Expr, Expr)>,
}

impl<'a> PointEvaluator<'a> {
    pub fn new(model: &SystemModel, sol: &'a ClosedFormSolution) -> Result<Self> {
        let guards = model
            .nondegeneracy()
            .iter()
            .map(|e| Ok((e.clone(), sol.on_solution(e)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(PointEvaluator { sol, guards })
    }

    pub fn prepare(&self, e: &Expr) -> Result<Expr> {
        self.sol.on_solution(e)
    }

    fn bindings(x: &[Rational; 4], spectral: Option<&Rational>) -> BTreeMap<Symbol, Rational> {
        let mut b: BTreeMap<Symbol, Rational> = (1..=4u8).map(|i| (Symbol::x(i), x[i as usize - 1].clone())).collect();
        if let Some(l) = spectral {
            b.insert(Symbol::Spectral, l.clone());
        }
        b
    }

    /// Fails with `NumericDegeneracy` if a non-degeneracy jet vanishes.
    pub fn check_point(&self, x: &[Rational; 4]) -> Result<()> {
        let b = Self::bindings(x, None);
        for (name, e) in &self.guards {
            if eval_exact(e, &b)?.is_zero() {
                return Err(Error::NumericDegeneracy(format!("{name} = 0 at {}", show_point(x))));
            }
        }
        Ok(())
    }

    /// Evaluates an already prepared expression.
    pub fn eval_prepared(&self, e: &Expr, x: &[Rational; 4], spectral: Option<&Rational>) -> Result<Rational> {
        eval_exact(e, &Self::bindings(x, spectral))
    }

    pub fn eval(&self, e: &Expr, x: &[Rational; 4], spectral: Option<&Rational>) -> Result<Rational> {
        self.check_point(x)?;
        self.eval_prepared(&self.prepare(e)?, x, spectral)
    }
}

pub fn show_point(x: &[Rational]) -> String {
    let parts: Vec<String> = x.iter().map(|r| r.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Covector at a point of a solution.
pub fn eval_covector(
    model: &SystemModel,
    c: &Covector,
    sol: &ClosedFormSolution,
    x: &[Rational; 4],
) -> Result<[Rational; 4]> {
    let ev = PointEvaluator::new(model, sol)?;
    ev.check_point(x)?;
    let mut out: [Rational; 4] = Default::default();
    for (o, e) in out.iter_mut().zip(c.iter()) {
        *o = ev.eval_prepared(&ev.prepare(e)?, x, None)?;
    }
    Ok(out)
}

pub fn eval_matrix(
    model: &SystemModel,
    m: &[[Expr; 4]; 4],
    sol: &ClosedFormSolution,
    x: &[Rational; 4],
) -> Result<Matrix<Rational>> {
    m.iter().map(|row| eval_covector(model, row, sol, x).map(|r| r.to_vec())).collect()
}

pub fn eval_coframe(model: &SystemModel, cf: &CoFrame, sol: &ClosedFormSolution, x: &[Rational; 4]) -> Result<Matrix<Rational>> {
    eval_matrix(model, &cf.omega, sol, x)
}

pub fn eval_metric(model: &SystemModel, g: &MetricForm, sol: &ClosedFormSolution, x: &[Rational; 4]) -> Result<Matrix<Rational>> {
    eval_matrix(model, &g.g, sol, x)
}

/// `g(La, Lb)` for `(a, b)` in `(0,0), (0,1), (1,1)`, as expressions in the
/// spectral parameter.
pub fn lax_pairings(model: &SystemModel, g: &MetricForm) -> [Expr; 3] {
    let (l0, l1) = build_l(model);
    let (a, b) = (l0.components(), l1.components());
    [g.pair(&a, &a), g.pair(&a, &b), g.pair(&b, &b)]
}

/// Same with `X0`, `X1`, reduced modulo the system.
pub fn symbolic_nullity(model: &SystemModel, g: &MetricForm) -> [Expr; 3] {
    let (x0, x1) = build_x(model);
    let (a, b) = (x0.components(), x1.components());
    [g.pair(&a, &a), g.pair(&a, &b), g.pair(&b, &b)].map(|e| model.reduce(&e))
}

#[derive(Clone, Debug)]
pub struct NullitySample {
    pub point: [Rational; 4],
    pub lambda: Rational,
    pub pairings: [Rational; 3],
}

impl NullitySample {
    pub fn is_null(&self) -> bool {
        self.pairings.iter().all(|p| p.is_zero())
    }
}

#[derive(Clone, Debug)]
pub struct NullityReport {
    pub samples: Vec<NullitySample>,
}

impl NullityReport {
    pub fn passed(&self) -> bool {
        self.samples.iter().all(|s| s.is_null())
    }

    pub fn first_failure(&self) -> Option<&NullitySample> {
        self.samples.iter().find(|s| !s.is_null())
    }
}

/// Pairings of the Lax fields at the given `(point, spectral)` samples.
pub fn nullity_samples(
    model: &SystemModel,
    g: &MetricForm,
    sol: &ClosedFormSolution,
    samples: &[([Rational; 4], Rational)],
) -> Result<NullityReport> {
    let ev = PointEvaluator::new(model, sol)?;
    let prepared = lax_pairings(model, g).map(|p| ev.prepare(&p));
    let prepared: Vec<Expr> = prepared.into_iter().collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(samples.len());
    for (x, l) in samples {
        ev.check_point(x)?;
        let mut pairings: [Rational; 3] = Default::default();
        for (slot, p) in pairings.iter_mut().zip(&prepared) {
            *slot = ev.eval_prepared(p, x, Some(l))?;
        }
        out.push(NullitySample { point: x.clone(), lambda: l.clone(), pairings });
    }
    Ok(NullityReport { samples: out })
}

/// Fails with `NullityFailure` naming the first offending sample.
pub fn nullity_check(
    model: &SystemModel,
    g: &MetricForm,
    sol: &ClosedFormSolution,
    samples: &[([Rational; 4], Rational)],
) -> Result<NullityReport> {
    let r = nullity_samples(model, g, sol, samples)?;
    if let Some(s) = r.first_failure() {
        let p: Vec<String> = s.pairings.iter().map(|p| p.to_string()).collect();
        return Err(Error::NullityFailure(format!(
            "point {} lambda {} pairings [{}]",
            show_point(&s.point),
            s.lambda,
            p.join(", ")
        )));
    }
    Ok(r)
}

/// A differential form with coefficients indexed by bitmasks of `dx^i`.
#[derive(Clone, Debug, Default)]
pub struct Form {
    pub terms: BTreeMap<u8, Expr>,
}

fn sign_of(a: u8, b: u8) -> bool {
    // Number of transpositions to sort dx^a ^ dx^b.
    let mut n = 0u32;
    for i in 0..4 {
        if a & (1 << i) != 0 {
            n += (b & ((1u8 << i) - 1)).count_ones();
        }
    }
    n % 2 == 1
}

impl Form {
    pub fn one_form(c: &Covector) -> Form {
        let mut f = Form::default();
        for (i, e) in c.iter().enumerate() {
            f.insert(1 << i, e.clone());
        }
        f
    }

    fn insert(&mut self, mask: u8, e: Expr) {
        if e.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&mask) {
            Some(old) => &old + &e,
            None => e,
        };
        if !sum.is_zero() {
            self.terms.insert(mask, sum);
        }
    }

    pub fn coeff(&self, mask: u8) -> Expr {
        self.terms.get(&mask).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn wedge(&self, o: &Form) -> Form {
        let mut out = Form::default();
        for (&a, x) in &self.terms {
            for (&b, y) in &o.terms {
                if a & b != 0 {
                    continue;
                }
                let p = x * y;
                out.insert(a | b, if sign_of(a, b) { -p } else { p });
            }
        }
        out
    }

    /// Exterior derivative with coefficients differentiated by `d`.
    pub fn exterior(&self, d: &dyn Fn(u8, &Expr) -> Result<Expr>) -> Result<Form> {
        let mut out = Form::default();
        for (&m, c) in &self.terms {
            for i in 0..4u8 {
                if m & (1 << i) != 0 {
                    continue;
                }
                let dc = d(i + 1, c)?;
                out.insert(m | (1 << i), if sign_of(1 << i, m) { -dc } else { dc });
            }
        }
        Ok(out)
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Form {
        let mut out = Form::default();
        for (&m, c) in &self.terms {
            out.insert(m, f(c));
        }
        out
    }
}

/// The annihilating 1-forms; the second one corrected (see
/// [`alpha_printed`]).
pub fn build_alpha(model: &SystemModel) -> (Covector, Covector) {
    let a0 = alpha0(model);
    let a1 = instantiate4(
        model,
        [
            "(l1-l2)*(l3-l)*u_4/u_2",
            "(l1-l2)*(l3-l)*v_4/v_1",
            "((l1-l3)*(l2-l)*u_3*v_4 - (l2-l3)*(l1-l)*u_4*v_3)/(u_2*v_1)",
            "(l1-l2)*(l3-l)*u_4*v_4/(u_2*v_1)",
        ],
    );
    (a0, a1)
}

fn alpha0(model: &SystemModel) -> Covector {
    instantiate4(
        model,
        [
            "(l1-l2)*(l4-l)*u_3/u_2",
            "(l1-l2)*(l4-l)*v_3/v_1",
            "(l1-l2)*(l4-l)*u_3*v_3/(u_2*v_1)",
            "((l1-l4)*(l2-l)*u_4*v_3 - (l2-l4)*(l1-l)*u_3*v_4)/(u_2*v_1)",
        ],
    )
}

/// The forms exactly as displayed; the second does not annihilate the
/// Lax fields.
pub fn alpha_printed(model: &SystemModel) -> (Covector, Covector) {
    let a1 = instantiate4(
        model,
        [
            "(l1-l2)*(l3-l)*u_4/u_2",
            "(l1-l2)*(l3-l)*v_4/v_1",
            "(l1-l2)*(l3-l)*u_4*v_4/(u_2*v_1)",
            "((l2-l3)*(l1-l)*u_4*v_3 - (l1-l3)*(l2-l)*u_3*v_4)/(u_2*v_1)",
        ],
    );
    (alpha0(model), a1)
}

/// `alpha(L)` reduced modulo the system.
pub fn annihilates(model: &SystemModel, alpha: &Covector, l: &LambdaVF) -> Expr {
    let c = l.components();
    model.reduce(&Expr::sum((0..4).map(|k| &alpha[k] * &c[k])))
}

#[derive(Clone, Debug)]
pub struct ClosednessReport {
    /// Coefficients of `d alpha_i ^ alpha_0 ^ alpha_1` on `dx^1234`.
    pub top: [Expr; 2],
}

impl ClosednessReport {
    pub fn closed(&self) -> bool {
        self.top.iter().all(|e| e.is_zero())
    }
}

pub fn alpha_closure_for(model: &SystemModel, a0: &Covector, a1: &Covector) -> Result<ClosednessReport> {
    let d = |i: u8, e: &Expr| model.total_derivative(i, e);
    let f0 = Form::one_form(a0);
    let f1 = Form::one_form(a1);
    let beta = f0.wedge(&f1);
    let mut top: [Expr; 2] = Default::default();
    for (slot, f) in top.iter_mut().zip([&f0, &f1]) {
        let da = f.exterior(&d)?.map(|e| model.reduce(e));
        *slot = model.reduce(&da.wedge(&beta).coeff(0b1111));
    }
    let report = ClosednessReport { top };
    if !report.closed() {
        return Err(Error::ClosednessFailure(format!("d alpha ^ alpha0 ^ alpha1 = [{}, {}]", report.top[0], report.top[1])));
    }
    Ok(report)
}

pub fn alpha_closure_check(model: &SystemModel) -> Result<ClosednessReport> {
    let (a0, a1) = build_alpha(model);
    alpha_closure_for(model, &a0, &a1)
}

/// Cross-ratio `(a, b; c, d) = (a-c)(b-d) / ((a-d)(b-c))`.
pub fn cross_ratio(q: &[Rational; 4]) -> Option<Rational> {
    let [a, b, c, d] = q;
    let den = &(a - d) * &(b - c);
    if den.is_zero() {
        return None;
    }
    Some(&(&(a - c) * &(b - d)) / &den)
}

/// Default eigenparameters, a harmonic quadruple.
pub fn default_eigenparams() -> [Rational; 4] {
    [Rational::ONE, Rational::from_int(-1), Rational::new(1, 2), Rational::from_int(2)]
}

#[derive(Clone, Debug)]
pub struct EndoTriple {
    pub i: Matrix<f64>,
    pub j: Matrix<f64>,
    pub k: Matrix<f64>,
}

/// Exact `I`, `J`, `K` at a point.
pub fn build_ijk_exact(
    model: &SystemModel,
    sol: &ClosedFormSolution,
    x: &[Rational; 4],
    mu: &[Rational; 4],
) -> Result<[Matrix<Rational>; 3]> {
    for a in 0..4 {
        for b in (a + 1)..4 {
            if mu[a] == mu[b] {
                return Err(Error::DegenerateEigenparams(format!("mu{} = mu{}", a + 1, b + 1)));
            }
        }
    }
    let (x0, x1) = build_x(model);
    let ev = PointEvaluator::new(model, sol)?;
    ev.check_point(x)?;
    let column = |f: &LambdaVF, m: &Rational| -> Result<Vec<Rational>> {
        let at = f.at(&Expr::constant(m.clone()));
        (1..=4).map(|k| ev.eval_prepared(&ev.prepare(&at.component(k))?, x, None)).collect()
    };
    let involution = |p: &Rational, n: &Rational| -> Result<Matrix<Rational>> {
        let cols = [column(&x0, p)?, column(&x1, p)?, column(&x0, n)?, column(&x1, n)?];
        let pm: Matrix<Rational> = (0..4).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
        let inv = linalg::inverse(&pm).map_err(|_| Error::DegenerateEigenparams(format!("leaves at {p} and {n} are not transversal")))?;
        let mut d = linalg::identity::<Rational>(4);
        d[2][2] = Rational::from_int(-1);
        d[3][3] = Rational::from_int(-1);
        Ok(linalg::mat_mul(&pm, &linalg::mat_mul(&d, &inv)))
    };
    let i = involution(&mu[0], &mu[1])?;
    let k = involution(&mu[2], &mu[3])?;
    let j = linalg::mat_mul(&i, &k);
    Ok([i, j, k])
}

fn to_f64(m: &Matrix<Rational>) -> Matrix<f64> {
    m.iter().map(|r| r.iter().map(|x| x.to_f64()).collect()).collect()
}

pub fn build_ijk(
    model: &SystemModel,
    sol: &ClosedFormSolution,
    x: &[Rational; 4],
    mu: &[Rational; 4],
) -> Result<EndoTriple> {
    let [i, j, k] = build_ijk_exact(model, sol, x, mu)?;
    Ok(EndoTriple { i: to_f64(&i), j: to_f64(&j), k: to_f64(&k) })
}

fn max_abs(m: &Matrix<f64>) -> f64 {
    m.iter().flatten().fold(0.0, |acc, x| {
        let a = if *x < 0.0 { -*x } else { *x };
        if a > acc {
            a
        } else {
            acc
        }
    })
}

fn combine(a: &Matrix<f64>, s: f64, b: &Matrix<f64>) -> Matrix<f64> {
    a.iter().zip(b).map(|(r, q)| r.iter().zip(q).map(|(x, y)| x + s * y).collect()).collect()
}

#[derive(Clone, Debug)]
pub struct TripleValidation {
    /// `(relation, max-norm residual)`.
    pub residuals: Vec<(String, f64)>,
    pub tol: f64,
}

impl TripleValidation {
    fn ok(&self, names: &[&str]) -> bool {
        self.residuals.iter().filter(|(n, _)| names.contains(&n.as_str())).all(|(_, r)| *r <= self.tol)
    }

    /// The split-quaternion relations.
    pub fn algebra_ok(&self) -> bool {
        self.ok(&["I^2 - Id", "K^2 - Id", "J^2 + Id", "IK - J", "KI + J"])
    }

    /// `g(JX,JY) = -g(X,Y)`, `g(IX,IY) = g(X,Y) = g(KX,KY)`.
    pub fn metric_ok(&self) -> bool {
        self.ok(&["J'gJ + g", "I'gI - g", "K'gK - g"])
    }

    pub fn accepted(&self) -> bool {
        self.algebra_ok() && self.metric_ok()
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.residuals.iter().find(|(n, _)| n == name).map(|(_, r)| *r)
    }
}

/// Checks the split-quaternion relations and metric compatibility.
pub fn validate_triple(t: &EndoTriple, g: &Matrix<f64>, tol: f64) -> TripleValidation {
    let id = linalg::identity::<f64>(4);
    let mm = linalg::mat_mul::<f64>;
    let conj = |a: &Matrix<f64>| mm(&linalg::transpose(a), &mm(g, a));
    let residuals = vec![
        ("I^2 - Id".to_string(), max_abs(&combine(&mm(&t.i, &t.i), -1.0, &id))),
        ("K^2 - Id".to_string(), max_abs(&combine(&mm(&t.k, &t.k), -1.0, &id))),
        ("J^2 + Id".to_string(), max_abs(&combine(&mm(&t.j, &t.j), 1.0, &id))),
        ("IK - J".to_string(), max_abs(&combine(&mm(&t.i, &t.k), -1.0, &t.j))),
        ("KI + J".to_string(), max_abs(&combine(&mm(&t.k, &t.i), 1.0, &t.j))),
        ("J'gJ + g".to_string(), max_abs(&combine(&conj(&t.j), 1.0, g))),
        ("I'gI - g".to_string(), max_abs(&combine(&conj(&t.i), -1.0, g))),
        ("K'gK - g".to_string(), max_abs(&combine(&conj(&t.k), -1.0, g))),
    ];
    TripleValidation { residuals, tol }
}

/// `max |IK + KI|`.
pub fn anticommutator_norm(t: &EndoTriple) -> f64 {
    let mm = linalg::mat_mul::<f64>;
    max_abs(&combine(&mm(&t.i, &t.k), 1.0, &mm(&t.k, &t.i)))
}

#[derive(Clone, Debug)]
pub struct QuadrupleScan {
    pub mu: [Rational; 4],
    pub cross_ratio: Option<Rational>,
    pub anticommutator: f64,
    pub validation: TripleValidation,
}

/// Runs the validator over candidate quadruples, skipping degenerate ones.
pub fn scan_quadruples(
    model: &SystemModel,
    sol: &ClosedFormSolution,
    x: &[Rational; 4],
    g: &Matrix<f64>,
    candidates: &[[Rational; 4]],
    tol: f64,
) -> Result<Vec<QuadrupleScan>> {
    let mut out = Vec::new();
    for mu in candidates {
        let t = match build_ijk(model, sol, x, mu) {
            Ok(t) => t,
            Err(Error::DegenerateEigenparams(_)) => continue,
            Err(e) => return Err(e),
        };
        out.push(QuadrupleScan {
            mu: mu.clone(),
            cross_ratio: cross_ratio(mu),
            anticommutator: anticommutator_norm(&t),
            validation: validate_triple(&t, g, tol),
        });
    }
    Ok(out)
}

/// `u_3 v_4 - u_4 v_3`; the co-frames and the web degenerate where it
/// vanishes.
pub fn web_degeneracy() -> Expr {
    parse("u_3*v_4 - u_4*v_3").expect("well-formed")
}

/// `C = (l3-l1)(l4-l2) / ((l4-l1)(l3-l2))`.
pub fn chern_constant(model: &SystemModel) -> Expr {
    instantiate(model, "(l3-l1)*(l4-l2)/((l4-l1)*(l3-l2))")
}

/// Bases `(e1, e2)` of `V` and `(h1, h2)` of `H`.
pub fn web_bases(model: &SystemModel) -> ([Vector; 2], [Vector; 2]) {
    let v = |s: [&str; 4]| instantiate4(model, s);
    (
        [v(["0", "u_4", "0", "-u_2"]), v(["0", "u_3", "-u_2", "0"])],
        [v(["v_4", "0", "0", "-v_1"]), v(["v_3", "0", "-v_1", "0"])],
    )
}

/// The involution `j` of the web in the bases of [`web_bases`]:
/// `e1 -> C (u2/v1) h1`, `e2 -> (u2/v1) h2`.
pub fn j_factors(model: &SystemModel) -> [Expr; 2] {
    let r = instantiate(model, "u_2/v_1");
    [&chern_constant(model) * &r, r]
}

fn add_vec(a: &Vector, b: &Vector) -> Vector {
    [0, 1, 2, 3].map(|k| &a[k] + &b[k])
}

fn scale_vec(a: &Vector, s: &Expr) -> Vector {
    [0, 1, 2, 3].map(|k| &a[k] * s)
}

/// Bracket of vector fields whose components are functions of `x` only.
pub fn bracket_x(a: &Vector, b: &Vector) -> Vector {
    [0, 1, 2, 3].map(|k| {
        let mut terms = Vec::new();
        for j in 0..4u8 {
            let s = Symbol::x(j + 1);
            terms.push(&a[j as usize] * &b[k].formal_derivative(s));
            terms.push(-(&b[j as usize] * &a[k].formal_derivative(s)));
        }
        Expr::sum(terms)
    })
}

/// The Chern connection of the `(V, H, T)` web on a fixed solution.
pub struct ChernConnection {
    e: [Vector; 2],
    h: [Vector; 2],
    inv: Matrix<Expr>,
    jf: [Expr; 2],
    det: Expr,
}

impl ChernConnection {
    pub fn new(model: &SystemModel, sol: &ClosedFormSolution) -> Result<Self> {
        let (e, h) = web_bases(model);
        let on = |v: &Vector| -> Result<Vector> {
            let mut out: Vector = Default::default();
            for (o, c) in out.iter_mut().zip(v) {
                *o = sol.on_solution(c)?;
            }
            Ok(out)
        };
        let e = [on(&e[0])?, on(&e[1])?];
        let h = [on(&h[0])?, on(&h[1])?];
        let jf = j_factors(model);
        let jf = [sol.on_solution(&jf[0])?, sol.on_solution(&jf[1])?];
        let m: Matrix<Expr> = (0..4).map(|r| [&e[0], &e[1], &h[0], &h[1]].iter().map(|c| c[r].clone()).collect()).collect();
        let det = linalg::det(&m);
        let inv = linalg::inverse(&m).map_err(|_| Error::TransversalityFailure(String::from("V and H intersect identically")))?;
        Ok(ChernConnection { e, h, inv, jf, det })
    }

    fn coords(&self, z: &Vector) -> [Expr; 4] {
        let c = linalg::mat_vec(&self.inv, z);
        [c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()]
    }

    pub fn pi_v(&self, z: &Vector) -> Vector {
        let c = self.coords(z);
        add_vec(&scale_vec(&self.e[0], &c[0]), &scale_vec(&self.e[1], &c[1]))
    }

    pub fn pi_h(&self, z: &Vector) -> Vector {
        let c = self.coords(z);
        add_vec(&scale_vec(&self.h[0], &c[2]), &scale_vec(&self.h[1], &c[3]))
    }

    pub fn j(&self, z: &Vector) -> Vector {
        let c = self.coords(z);
        let to_h = add_vec(&scale_vec(&self.h[0], &(&c[0] * &self.jf[0])), &scale_vec(&self.h[1], &(&c[1] * &self.jf[1])));
        let to_v = add_vec(
            &scale_vec(&self.e[0], &c[2].try_div(&self.jf[0]).expect("nonzero")),
            &scale_vec(&self.e[1], &c[3].try_div(&self.jf[1]).expect("nonzero")),
        );
        add_vec(&to_h, &to_v)
    }

    /// `nabla_X Y` as a field in `x`.
    pub fn covariant(&self, x: &Vector, y: &Vector) -> Vector {
        let (xh, xv, yh, yv) = (self.pi_h(x), self.pi_v(x), self.pi_h(y), self.pi_v(y));
        let h_part = add_vec(&self.j(&bracket_x(&xh, &self.j(&yh))), &bracket_x(&xv, &yh));
        let v_part = add_vec(&self.j(&bracket_x(&xv, &self.j(&yv))), &bracket_x(&xh, &yv));
        add_vec(&self.pi_h(&h_part), &self.pi_v(&v_part))
    }

    pub fn check_transversal(&self, at: &[Rational; 4]) -> Result<()> {
        let b: BTreeMap<Symbol, Rational> = (1..=4u8).map(|i| (Symbol::x(i), at[i as usize - 1].clone())).collect();
        let d = eval_exact(&self.det, &b).map_err(|e| Error::TransversalityFailure(e.to_string()))?;
        if d.is_zero() {
            return Err(Error::TransversalityFailure(format!("V and H meet at {}", show_point(at))));
        }
        Ok(())
    }

    pub fn eval_at(&self, v: &Vector, at: &[Rational; 4]) -> Result<[Rational; 4]> {
        let b: BTreeMap<Symbol, Rational> = (1..=4u8).map(|i| (Symbol::x(i), at[i as usize - 1].clone())).collect();
        let mut out: [Rational; 4] = Default::default();
        for (o, c) in out.iter_mut().zip(v) {
            *o = eval_exact(c, &b)?;
        }
        Ok(out)
    }
}

/// `nabla_X Y` at a point; `X` and `Y` are written in `x` (and jets).
pub fn chern_connection(
    model: &SystemModel,
    sol: &ClosedFormSolution,
    x_field: &Vector,
    y_field: &Vector,
    at: &[Rational; 4],
) -> Result<[Rational; 4]> {
    let c = ChernConnection::new(model, sol)?;
    c.check_transversal(at)?;
    let on = |v: &Vector| -> Result<Vector> {
        let mut out: Vector = Default::default();
        for (o, e) in out.iter_mut().zip(v) {
            *o = sol.on_solution(e)?;
        }
        Ok(out)
    };
    let r = c.covariant(&on(x_field)?, &on(y_field)?);
    c.eval_at(&r, at)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sysmodel::build_system;

    fn std_model() -> SystemModel {
        build_system([0, 1, 2, 3].map(Rational::from_int)).unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn pt(a: [i64; 4]) -> [Rational; 4] {
        a.map(q)
    }

    fn e(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn printed_coframe_on_linear_solution() {
        let m = std_model();
        let sol = m.catalog_entry("linear").unwrap();
        let cf = build_coframe(&m);
        let x = pt([1, 2, 3, 4]);
        assert_eq!(eval_covector(&m, &cf.omega[0], &sol, &x).unwrap(), [Rational::new(3, 2), q(1), q(0), q(1)]);
        assert_eq!(eval_covector(&m, &cf.omega[1], &sol, &x).unwrap(), [Rational::new(1, 6), q(0), q(0), Rational::new(1, 3)]);
        assert_eq!(eval_covector(&m, &cf.omega[2], &sol, &x).unwrap(), [q(2), q(1), q(1), q(0)]);
    }

    #[test]
    fn degenerate_point() {
        let m = std_model();
        let sol = ClosedFormSolution::new("test", e("x2 + x3 + x4^2"), e("x1 + x3 + x4"), None);
        let cf = build_coframe(&m);
        assert!(matches!(eval_covector(&m, &cf.omega[0], &sol, &pt([1, 1, 1, 0])), Err(Error::NumericDegeneracy(_))));
    }

    #[test]
    fn metrics_symmetric() {
        for m in [std_model(), SystemModel::symbolic()] {
            for choice in [MetricChoice::Printed, MetricChoice::Web] {
                assert!(metric_for(&m, choice).unwrap().is_symmetric());
            }
        }
    }

    #[test]
    fn determinant_is_nonzero_polynomial() {
        for m in [std_model(), SystemModel::symbolic()] {
            for cf in [build_coframe(&m), CoFrame::web(&m).unwrap()] {
                let d = cf.determinant();
                assert!(!d.is_zero());
                let scaled = Expr::product([d, e("u_2*u_3*u_4*v_1*v_3*v_4")]);
                assert!(!scaled.is_zero());
            }
        }
    }

    #[test]
    fn determinants_vanish_on_degenerate_locus() {
        let m = std_model();
        let printed = build_coframe(&m).determinant();
        assert!(printed.numerator().div_exact(web_degeneracy().numerator()).is_some());
        let web = CoFrame::web(&m).unwrap().determinant();
        assert!(web.recip().unwrap().numerator().div_exact(web_degeneracy().numerator()).is_some());
        let x = pt([1, 2, 3, 4]);
        for (name, expect_zero) in [("linear", true), ("linear-generic", false), ("quadratic", true), ("quadratic-generic", false)] {
            let sol = m.catalog_entry(name).unwrap();
            let d = eval_coframe(&m, &build_coframe(&m), &sol, &x).unwrap();
            assert_eq!(linalg::det(&d).is_zero(), expect_zero, "{name}");
        }
    }

    #[test]
    fn web_metric_is_null_on_leaves() {
        for m in [std_model(), SystemModel::symbolic()] {
            let g = metric_for(&m, MetricChoice::Web).unwrap();
            for p in symbolic_nullity(&m, &g) {
                assert!(p.is_zero(), "{p}");
            }
        }
    }

    #[test]
    fn printed_metric_is_not_null_on_leaves() {
        let m = std_model();
        let g = metric_for(&m, MetricChoice::Printed).unwrap();
        assert!(symbolic_nullity(&m, &g).iter().any(|p| !p.is_zero()));
    }

    #[test]
    fn nullity_web_linear() {
        let m = std_model();
        let g = metric_for(&m, MetricChoice::Web).unwrap();
        let sol = m.catalog_entry("linear").unwrap();
        let samples = vec![(pt([0, 0, 0, 0]), q(5)), (pt([1, -2, 3, 1]), q(1)), (pt([2, 1, 0, 1]), Rational::new(-7, 3))];
        assert!(nullity_check(&m, &g, &sol, &samples).unwrap().passed());
        let pg = metric_for(&m, MetricChoice::Printed).unwrap();
        assert!(matches!(nullity_check(&m, &pg, &sol, &samples), Err(Error::NullityFailure(_))));
    }

    #[test]
    fn neutral_signature() {
        let m = std_model();
        let sol = m.catalog_entry("quadratic-generic").unwrap();
        for choice in [MetricChoice::Printed, MetricChoice::Web] {
            let g = metric_for(&m, choice).unwrap();
            let gm = eval_metric(&m, &g, &sol, &pt([1, 2, 3, 4])).unwrap();
            assert_eq!(linalg::inertia(&gm), (2, 2, 0));
        }
    }

    #[test]
    fn alpha_annihilates_lax() {
        for m in [std_model(), SystemModel::symbolic()] {
            let (l0, l1) = build_l(&m);
            let (a0, a1) = build_alpha(&m);
            for a in [&a0, &a1] {
                for l in [&l0, &l1] {
                    assert!(annihilates(&m, a, l).is_zero());
                }
            }
            let (_, p1) = alpha_printed(&m);
            assert!(!annihilates(&m, &p1, &l0).is_zero());
        }
    }

    #[test]
    fn alpha0_dx2_at_l4() {
        let m = SystemModel::symbolic();
        let (a0, _) = build_alpha(&m);
        assert!(a0[1].substitute_one(Symbol::Spectral, &Expr::sym(Symbol::lambda(4))).unwrap().is_zero());
    }

    #[test]
    fn wedge_signs() {
        let dx = |i: usize| {
            let mut c: Covector = Default::default();
            c[i] = Expr::one();
            Form::one_form(&c)
        };
        assert_eq!(dx(0).wedge(&dx(1)).coeff(0b11), Expr::one());
        assert_eq!(dx(1).wedge(&dx(0)).coeff(0b11), Expr::int(-1));
        assert!(dx(2).wedge(&dx(2)).is_zero());
        let vol = dx(3).wedge(&dx(2)).wedge(&dx(1)).wedge(&dx(0));
        assert_eq!(vol.coeff(0b1111), Expr::one());
    }

    #[test]
    fn d_squared_is_zero() {
        let m = std_model();
        let d = |i: u8, x: &Expr| m.total_derivative(i, x);
        let f = Form::one_form(&[e("u_2*x1"), e("v_3"), e("x4^2*u_1"), e("v")]);
        let dd = f.exterior(&d).unwrap().exterior(&d).unwrap();
        assert!(dd.is_zero());
    }

    #[test]
    fn alpha_closed_mod_ideal() {
        assert!(alpha_closure_check(&SystemModel::symbolic()).unwrap().closed());
        assert!(alpha_closure_check(&std_model()).unwrap().closed());
    }

    #[test]
    fn alpha_negative_control() {
        let m = std_model();
        let (mut a0, a1) = build_alpha(&m);
        a0[3] = Expr::one();
        assert!(matches!(alpha_closure_for(&m, &a0, &a1), Err(Error::ClosednessFailure(_))));
    }

    #[test]
    fn chern_constant_value() {
        assert_eq!(chern_constant(&std_model()), Expr::constant(Rational::new(4, 3)));
    }

    #[test]
    fn j_moves_into_t() {
        // j(z) - z lies in T = span{X0(l3), X1(l3)} for z in V and in H.
        for m in [std_model(), SystemModel::symbolic()] {
            let (x0, x1) = build_x(&m);
            let t0 = x0.at(m.lambda(3)).components();
            let t1 = x1.at(m.lambda(3)).components();
            let (ev, hv) = web_bases(&m);
            let jf = j_factors(&m);
            let cases = [
                (ev[0].clone(), scale_vec(&hv[0], &jf[0])),
                (ev[1].clone(), scale_vec(&hv[1], &jf[1])),
            ];
            for (z, jz) in cases {
                let w: Vector = [0, 1, 2, 3].map(|k| &jz[k] - &z[k]);
                let mat: Matrix<Expr> = (0..4).map(|r| vec![t0[r].clone(), t1[r].clone(), w[r].clone()]).collect();
                for skip in 0..4 {
                    let minor: Matrix<Expr> = (0..4).filter(|&r| r != skip).map(|r| mat[r].clone()).collect();
                    assert!(linalg::det(&minor).is_zero());
                }
            }
        }
    }

    #[test]
    fn endo_triple_harmonic() {
        let m = std_model();
        let sol = m.catalog_entry("linear-generic").unwrap();
        let x = pt([1, 2, 3, 4]);
        let t = build_ijk(&m, &sol, &x, &default_eigenparams()).unwrap();
        assert_eq!(cross_ratio(&default_eigenparams()), Some(q(-1)));
        let tr = |a: &Matrix<f64>| (0..4).map(|i| a[i][i]).sum::<f64>();
        assert!(tr(&t.i).abs() < 1e-12 && tr(&t.k).abs() < 1e-12);
        assert!(anticommutator_norm(&t) < 1e-9);
        let g = eval_metric(&m, &metric_for(&m, MetricChoice::Web).unwrap(), &sol, &x).unwrap();
        let gf: Matrix<f64> = g.iter().map(|r| r.iter().map(|v| v.to_f64()).collect()).collect();
        let v = validate_triple(&t, &gf, 1e-9);
        assert!(v.algebra_ok());
        let generic = build_ijk(&m, &sol, &x, &pt([1, -1, 3, 5])).unwrap();
        assert!(anticommutator_norm(&generic) > 1e-3);
        assert!(matches!(build_ijk(&m, &sol, &x, &pt([1, 1, 2, 3])), Err(Error::DegenerateEigenparams(_))));
    }

    #[test]
    fn chern_properties() {
        let m = std_model();
        let sol = m.catalog_entry("quadratic-generic").unwrap();
        assert!(matches!(
            ChernConnection::new(&m, &m.catalog_entry("quadratic").unwrap()),
            Err(Error::TransversalityFailure(_))
        ));
        let c = ChernConnection::new(&m, &sol).unwrap();
        let xf: Vector = [e("1"), e("x2"), e("x1*x3"), e("2")];
        let yf: Vector = [e("x4"), e("1"), e("x2^2"), e("x1")];
        let zf: Vector = [e("x3"), e("x1 - x2"), e("1"), e("0")];
        let yz = add_vec(&yf, &zf);
        let lhs = c.covariant(&xf, &yz);
        let rhs = add_vec(&c.covariant(&xf, &yf), &c.covariant(&xf, &zf));
        for k in 0..4 {
            assert_eq!(lhs[k], rhs[k]);
        }
        let f = e("x1*x3");
        let xf_f = Expr::sum((0..4u8).map(|j| &xf[j as usize] * &f.formal_derivative(Symbol::x(j + 1))));
        let lhs = c.covariant(&xf, &scale_vec(&yf, &f));
        let rhs = add_vec(&scale_vec(&yf, &xf_f), &scale_vec(&c.covariant(&xf, &yf), &f));
        let at = pt([1, 2, -1, 3]);
        assert_eq!(c.eval_at(&lhs, &at).unwrap(), c.eval_at(&rhs, &at).unwrap());
        let yh = c.pi_h(&yf);
        let yv = c.pi_v(&yf);
        let on_h = c.pi_v(&c.covariant(&xf, &yh));
        let on_v = c.pi_h(&c.covariant(&xf, &yv));
        assert!(on_h.iter().all(|x| x.is_zero()));
        assert!(on_v.iter().all(|x| x.is_zero()));
        let v = chern_connection(&m, &sol, &xf, &yf, &at).unwrap();
        assert_eq!(v, c.eval_at(&c.covariant(&xf, &yf), &at).unwrap());
    }
}
