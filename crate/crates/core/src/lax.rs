//! Vector fields polynomial in the spectral parameter, the Lax pencils and
//! their brackets.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::rational::Rational;
use crate::symbol::Symbol;
use crate::sysmodel::SystemModel;

/// A total derivative `D_i` acting on expressions.
pub type TotalDerivative<'a> = &'a dyn Fn(u8, &Expr) -> Result<Expr>;

fn poly_add(a: &[Expr], b: &[Expr]) -> Vec<Expr> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        match (a.get(k), b.get(k)) {
            (Some(x), Some(y)) => out.push(x + y),
            (Some(x), None) | (None, Some(x)) => out.push(x.clone()),
            (None, None) => unreachable!(),
        }
    }
    trim(out)
}

fn poly_mul(a: &[Expr], b: &[Expr]) -> Vec<Expr> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut buckets: Vec<Vec<Expr>> = vec![Vec::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                buckets[i + j].push(x * y);
            }
        }
    }
    trim(buckets.into_iter().map(Expr::sum).collect())
}

fn trim(mut v: Vec<Expr>) -> Vec<Expr> {
    while v.last().is_some_and(|e| e.is_zero()) {
        v.pop();
    }
    v
}

/// `sum_k c_k(lambda) d/dx^k` with `c_k` stored densely by powers of the
/// spectral parameter; coefficients never contain the spectral symbol.
#[derive(Clone, PartialEq)]
pub struct LambdaVF {
    comps: [Vec<Expr>; 4],
}

impl LambdaVF {
    pub fn zero() -> Self {
        LambdaVF { comps: Default::default() }
    }

    /// Coordinate field `d/dx^k`.
    pub fn coordinate(k: usize) -> Self {
        let mut v = Self::zero();
        v.comps[k - 1] = vec![Expr::one()];
        v
    }

    /// Builds from components that may contain the spectral symbol
    /// polynomially.
    pub fn from_exprs(c: [Expr; 4]) -> Result<Self> {
        let mut comps: [Vec<Expr>; 4] = Default::default();
        for (slot, e) in comps.iter_mut().zip(c.iter()) {
            let coeffs = e
                .coefficients_in(Symbol::Spectral)
                .ok_or(Error::DegreeTooHigh(usize::MAX))?;
            *slot = trim(coeffs);
        }
        Ok(LambdaVF { comps })
    }

    pub fn from_coefficients(comps: [Vec<Expr>; 4]) -> Self {
        LambdaVF { comps: comps.map(trim) }
    }

    /// Coefficient of `lambda^p` in component `k` (1-based).
    pub fn coeff(&self, k: usize, p: usize) -> Expr {
        self.comps[k - 1].get(p).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn coefficients(&self, k: usize) -> &[Expr] {
        &self.comps[k - 1]
    }

    /// Component `k` as an expression in the spectral symbol.
    pub fn component(&self, k: usize) -> Expr {
        let l = Expr::sym(Symbol::Spectral);
        let mut acc = Vec::new();
        let mut pw = Expr::one();
        for c in &self.comps[k - 1] {
            acc.push(c * &pw);
            pw = &pw * &l;
        }
        Expr::sum(acc)
    }

    pub fn components(&self) -> [Expr; 4] {
        [1, 2, 3, 4].map(|k| self.component(k))
    }

    pub fn degree(&self) -> usize {
        self.comps.iter().map(|c| c.len()).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_empty())
    }

    /// Value at a spectral parameter value (a lambda-free expression).
    pub fn at(&self, lambda: &Expr) -> LambdaVF {
        let comps = self.comps.clone().map(|c| {
            let mut acc = Vec::new();
            let mut pw = Expr::one();
            for x in &c {
                acc.push(x * &pw);
                pw = &pw * lambda;
            }
            trim(vec![Expr::sum(acc)])
        });
        LambdaVF { comps }
    }

    pub fn add(&self, o: &LambdaVF) -> LambdaVF {
        LambdaVF { comps: [0, 1, 2, 3].map(|k| poly_add(&self.comps[k], &o.comps[k])) }
    }

    pub fn sub(&self, o: &LambdaVF) -> LambdaVF {
        self.add(&o.scale(&Expr::int(-1)))
    }

    /// Multiplies by an expression that may contain the spectral symbol.
    pub fn scale(&self, f: &Expr) -> LambdaVF {
        let fc = trim(f.coefficients_in(Symbol::Spectral).expect("spectral parameter only in numerators"));
        LambdaVF { comps: [0, 1, 2, 3].map(|k| poly_mul(&self.comps[k], &fc)) }
    }

    /// Maps every coefficient.
    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> LambdaVF {
        LambdaVF { comps: self.comps.clone().map(|c| trim(c.iter().map(&f).collect())) }
    }

    pub fn try_map(&self, f: impl Fn(&Expr) -> Result<Expr>) -> Result<LambdaVF> {
        let mut comps: [Vec<Expr>; 4] = Default::default();
        for (slot, c) in comps.iter_mut().zip(self.comps.iter()) {
            *slot = trim(c.iter().map(&f).collect::<Result<Vec<_>>>()?);
        }
        Ok(LambdaVF { comps })
    }

    pub fn reduce(&self, model: &SystemModel) -> LambdaVF {
        self.map(|e| model.reduce(e))
    }

    /// `P(f)` as a dense lambda-polynomial.
    pub fn apply(&self, f: &[Expr], d: TotalDerivative<'_>) -> Result<Vec<Expr>> {
        let mut acc: Vec<Expr> = Vec::new();
        for j in 0..4 {
            if self.comps[j].is_empty() {
                continue;
            }
            let df: Vec<Expr> = f.iter().map(|c| d(j as u8 + 1, c)).collect::<Result<_>>()?;
            acc = poly_add(&acc, &poly_mul(&self.comps[j], &df));
        }
        Ok(acc)
    }

    /// `P(f)` for an expression `f` that may contain the spectral symbol.
    pub fn apply_expr(&self, f: &Expr, d: TotalDerivative<'_>) -> Result<Expr> {
        let fc = f.coefficients_in(Symbol::Spectral).ok_or(Error::DegreeTooHigh(usize::MAX))?;
        let r = self.apply(&fc, d)?;
        Ok(LambdaVF::from_coefficients([r, Vec::new(), Vec::new(), Vec::new()]).component(1))
    }

    /// Splits `P = P0 - lambda P1`.
    pub fn split(&self) -> Result<(LambdaVF, LambdaVF)> {
        if self.degree() > 1 {
            return Err(Error::DegreeTooHigh(self.degree()));
        }
        let p0 = self.comps.clone().map(|c| trim(c.first().cloned().into_iter().collect()));
        let p1 = self.comps.clone().map(|c| trim(c.get(1).map(|e| -e).into_iter().collect()));
        Ok((LambdaVF { comps: p0 }, LambdaVF { comps: p1 }))
    }

    /// Inverse of [`Self::split`].
    pub fn unsplit(p0: &LambdaVF, p1: &LambdaVF) -> LambdaVF {
        let l = Expr::sym(Symbol::Spectral);
        p0.sub(&p1.scale(&l))
    }
}

/// `[P, Q]^k = sum_j P^j D_j Q^k - Q^j D_j P^k`.
pub fn lie_bracket(p: &LambdaVF, q: &LambdaVF, d: TotalDerivative<'_>) -> Result<LambdaVF> {
    let mut comps: [Vec<Expr>; 4] = Default::default();
    for (k, slot) in comps.iter_mut().enumerate() {
        let a = p.apply(&q.comps[k], d)?;
        let b = q.apply(&p.comps[k], d)?;
        *slot = poly_add(&a, &b.iter().map(|e| -e).collect::<Vec<_>>());
    }
    Ok(LambdaVF { comps })
}

impl fmt::Display for LambdaVF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for k in 1..=4 {
            let c = self.component(k);
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({c})*d{k}")?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for LambdaVF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn jet(dep: crate::symbol::Dep, i: u8) -> Expr {
    Expr::sym(Symbol::jet(dep, &[i]))
}

fn uj(i: u8) -> Expr {
    jet(crate::symbol::Dep::U, i)
}

fn vj(i: u8) -> Expr {
    jet(crate::symbol::Dep::V, i)
}

/// The pencils `X0`, `X1` spanning the leaves.
pub fn build_x(model: &SystemModel) -> (LambdaVF, LambdaVF) {
    let l = Expr::sym(Symbol::Spectral);
    let lm = |i: usize| &l - model.lambda(i);
    let d12 = model.ldiff(1, 2);
    let make = |m: u8| {
        let b1 = (&model.ldiff(2, m as usize) * &vj(m)).try_div(&(&d12 * &vj(1))).expect("nonzero");
        let b2 = -(&model.ldiff(1, m as usize) * &uj(m)).try_div(&(&d12 * &uj(2))).expect("nonzero");
        let mut c = [&lm(1) * &b1, &lm(2) * &b2, Expr::zero(), Expr::zero()];
        c[m as usize - 1] = lm(m as usize);
        LambdaVF::from_exprs(c).expect("linear in the spectral parameter")
    };
    (make(4), make(3))
}

/// The Lax operators `L0`, `L1` in their displayed normalization.
pub fn build_l(model: &SystemModel) -> (LambdaVF, LambdaVF) {
    let l = Expr::sym(Symbol::Spectral);
    let ml = |i: usize| model.lambda(i) - &l;
    let make = |m: usize| {
        let mut c = [
            Expr::product([model.ldiff(2, m), ml(1), uj(2), vj(m as u8)]),
            -Expr::product([model.ldiff(1, m), ml(2), uj(m as u8), vj(1)]),
            Expr::zero(),
            Expr::zero(),
        ];
        c[m - 1] = Expr::product([model.ldiff(1, 2), ml(m), uj(2), vj(1)]);
        LambdaVF::from_exprs(c).expect("linear in the spectral parameter")
    };
    (make(4), make(3))
}

/// The factor `f` with `L_i = f X_i`.
pub fn l_over_x(model: &SystemModel) -> Expr {
    -Expr::product([model.ldiff(1, 2), uj(2), vj(1)])
}

/// One bracket component written as `mu_u eq_u + mu_v eq_v + residual`.
#[derive(Clone, Debug)]
pub struct Cofactors {
    pub component: usize,
    pub mu_u: Expr,
    pub mu_v: Expr,
    pub residual: Expr,
    pub reduced: Expr,
}

/// Cofactors of `e` with respect to the two equations, obtained by
/// matching the coefficients of `u_34` and `v_34`.
pub fn cofactors(model: &SystemModel, component: usize, e: &Expr) -> Result<Cofactors> {
    let su = Symbol::u(&[3, 4]);
    let sv = Symbol::v(&[3, 4]);
    let mu_u = e.formal_derivative(su).try_div(&model.eq_u.formal_derivative(su))?;
    let mu_v = e.formal_derivative(sv).try_div(&model.eq_v.formal_derivative(sv))?;
    let residual = Expr::sum([e.clone(), -(&mu_u * &model.eq_u), -(&mu_v * &model.eq_v)]);
    let reduced = model.reduce(e);
    Ok(Cofactors { component, mu_u, mu_v, residual, reduced })
}

#[derive(Clone, Debug)]
pub struct XClosureReport {
    pub bracket: LambdaVF,
    pub cofactors: Vec<Cofactors>,
}

impl XClosureReport {
    pub fn closes(&self) -> bool {
        self.cofactors.iter().all(|c| c.residual.is_zero() && c.reduced.is_zero())
    }

    /// Both equations appear with a nonzero cofactor somewhere.
    pub fn equivalent_to_system(&self) -> bool {
        self.cofactors.iter().any(|c| !c.mu_u.is_zero()) && self.cofactors.iter().any(|c| !c.mu_v.is_zero())
    }
}

/// `[X0, X1]` with its cofactor decomposition.
pub fn x_closure(model: &SystemModel) -> Result<XClosureReport> {
    let (x0, x1) = build_x(model);
    let d = |i: u8, e: &Expr| model.total_derivative(i, e);
    let br = lie_bracket(&x0, &x1, &d)?;
    let mut cof = Vec::new();
    for k in 1..=4 {
        cof.push(cofactors(model, k, &br.component(k))?);
    }
    Ok(XClosureReport { bracket: br, cofactors: cof })
}

#[derive(Clone, Debug)]
pub struct ClosureReport {
    pub c0: Expr,
    pub c1: Expr,
    pub cofactors: Vec<Cofactors>,
}

impl ClosureReport {
    pub fn residual_is_zero(&self) -> bool {
        self.cofactors.iter().all(|c| c.residual.is_zero() && c.reduced.is_zero())
    }

    pub fn residual_summary(&self) -> String {
        let bad: Vec<String> = self
            .cofactors
            .iter()
            .filter(|c| !c.residual.is_zero() || !c.reduced.is_zero())
            .map(|c| format!("component {}: {}", c.component, c.reduced))
            .collect();
        if bad.is_empty() {
            String::from("0")
        } else {
            bad.join("; ")
        }
    }
}

/// Finds `c0`, `c1` with `[L0, L1] - c0 L0 - c1 L1` vanishing modulo the
/// system, and certifies it with explicit cofactors.
pub fn closure_report_for(model: &SystemModel, l0: &LambdaVF, l1: &LambdaVF) -> Result<ClosureReport> {
    let d = |i: u8, e: &Expr| model.total_derivative(i, e);
    let br = lie_bracket(l0, l1, &d)?;
    let (b, p0, p1) = (br.components(), l0.components(), l1.components());
    // L0 has no d3 part and L1 no d4 part.
    if !p0[2].is_zero() || !p1[3].is_zero() {
        return Err(Error::ClosureFailure(String::from("operators do not have the Lax shape")));
    }
    let c1 = b[2].try_div(&p1[2])?;
    let c0 = b[3].try_div(&p0[3])?;
    let mut cof = Vec::new();
    for k in 0..4 {
        let r = Expr::sum([b[k].clone(), -(&c0 * &p0[k]), -(&c1 * &p1[k])]);
        cof.push(cofactors(model, k + 1, &r)?);
    }
    let report = ClosureReport { c0, c1, cofactors: cof };
    if !report.residual_is_zero() {
        return Err(Error::ClosureFailure(report.residual_summary()));
    }
    Ok(report)
}

pub fn commutator_closure_report(model: &SystemModel) -> Result<ClosureReport> {
    let (l0, l1) = build_l(model);
    closure_report_for(model, &l0, &l1)
}

/// `dx^i(X_j(lambda_i))`, `du(X_j(lambda_1))` and `dv(X_j(lambda_2))`,
/// all of which vanish.
pub fn annihilation_checks(model: &SystemModel) -> Vec<(String, Expr)> {
    let (x0, x1) = build_x(model);
    let mut out = Vec::new();
    for (name, x) in [("X0", &x0), ("X1", &x1)] {
        for i in 1..=4usize {
            let at = x.at(model.lambda(i));
            out.push((format!("dx{i}({name}(l{i}))"), at.component(i)));
        }
        let at1 = x.at(model.lambda(1));
        let at2 = x.at(model.lambda(2));
        out.push((format!("du({name}(l1))"), Expr::sum((1..=4u8).map(|k| &uj(k) * &at1.component(k as usize)))));
        out.push((format!("dv({name}(l2))"), Expr::sum((1..=4u8).map(|k| &vj(k) * &at2.component(k as usize)))));
    }
    out
}

/// Evaluates every coefficient exactly.
pub fn at_rational_lambda(p: &LambdaVF, lambda: &Rational) -> LambdaVF {
    p.at(&Expr::constant(lambda.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use crate::sysmodel::build_system;

    fn std_model() -> SystemModel {
        build_system([0, 1, 2, 3].map(Rational::from_int)).unwrap()
    }

    fn e(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn x0_first_coefficient() {
        let (x0, _) = build_x(&std_model());
        assert_eq!(x0.coeff(1, 1), e("2*v_4/v_1"));
        assert!(x0.coeff(1, 0).is_zero());
        assert!(x0.component(3).is_zero());
    }

    #[test]
    fn annihilators_vanish() {
        for m in [std_model(), SystemModel::symbolic()] {
            for (name, v) in annihilation_checks(&m) {
                assert!(v.is_zero(), "{name}: {v}");
            }
        }
    }

    #[test]
    fn l_is_rescaled_x() {
        for m in [std_model(), SystemModel::symbolic()] {
            let (x0, x1) = build_x(&m);
            let (l0, l1) = build_l(&m);
            let f = l_over_x(&m);
            assert!(x0.scale(&f).sub(&l0).is_zero());
            assert!(x1.scale(&f).sub(&l1).is_zero());
            assert!(l1.component(4).is_zero());
        }
    }

    #[test]
    fn l0_on_linear_solution() {
        let m = std_model();
        let (l0, _) = build_l(&m);
        let at = l0.at(&Expr::int(5));
        let ones = |x: &Expr| {
            let mut b = alloc::collections::BTreeMap::new();
            for s in x.symbols() {
                b.insert(s, Expr::one());
            }
            x.substitute(&b).unwrap()
        };
        let c: Vec<Expr> = (1..=4).map(|k| ones(&at.component(k))).collect();
        assert_eq!(c, vec![Expr::int(10), Expr::int(-12), Expr::zero(), Expr::int(2)]);
    }

    #[test]
    fn bracket_basics() {
        let m = std_model();
        let d = |i: u8, e: &Expr| m.total_derivative(i, e);
        let (x0, x1) = build_x(&m);
        assert!(lie_bracket(&x0, &x0, &d).unwrap().is_zero());
        let p = LambdaVF::coordinate(1);
        let q = LambdaVF::coordinate(2).scale(&e("x1"));
        assert_eq!(lie_bracket(&p, &q, &d).unwrap(), LambdaVF::coordinate(2));
        let pq = lie_bracket(&x0, &x1, &d).unwrap();
        let qp = lie_bracket(&x1, &x0, &d).unwrap();
        assert!(pq.add(&qp).is_zero());
    }

    #[test]
    fn split_round_trip() {
        let (x0, x1) = build_x(&std_model());
        let (p0, p1) = x0.split().unwrap();
        assert_eq!(LambdaVF::unsplit(&p0, &p1), x0);
        let (_, q1) = x1.split().unwrap();
        assert_eq!(q1.component(3), Expr::int(-1));
        let flat = LambdaVF::coordinate(2);
        let (f0, f1) = flat.split().unwrap();
        assert_eq!(f0, flat);
        assert!(f1.is_zero());
        let sq = x0.scale(&e("l"));
        assert!(matches!(sq.split(), Err(Error::DegreeTooHigh(2))));
    }

    #[test]
    fn x_bracket_closes_numeric() {
        let r = x_closure(&std_model()).unwrap();
        assert!(r.closes());
        assert!(r.equivalent_to_system());
    }

    #[test]
    fn l_closure_numeric() {
        let r = commutator_closure_report(&std_model()).unwrap();
        assert!(r.residual_is_zero());
    }

    #[test]
    fn flipped_sign_breaks_closure() {
        let m = std_model();
        let (l0, l1) = build_l(&m);
        let mut c = l0.components();
        c[1] = -c[1].clone();
        let bad = LambdaVF::from_exprs(c).unwrap();
        assert!(matches!(closure_report_for(&m, &bad, &l1), Err(Error::ClosureFailure(_))));
    }

    #[test]
    fn closure_symbolic() {
        let m = SystemModel::symbolic();
        let r = commutator_closure_report(&m).unwrap();
        assert!(r.residual_is_zero());
        let x = x_closure(&m).unwrap();
        assert!(x.closes() && x.equivalent_to_system());
    }
}
