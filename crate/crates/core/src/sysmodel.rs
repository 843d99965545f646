//! The two-component system, the general heavenly equation, total
//! derivatives, reduction modulo the system, linearization, exact
//! solutions and the gauge transformation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use spin::Mutex;

use crate::error::{Error, Result};
use crate::eval::eval_exact;
use crate::expr::Expr;
use crate::parse::parse;
use crate::rational::Rational;
use crate::symbol::{Dep, Index4, Jet, Symbol};

fn jet(dep: Dep, idx: &[u8]) -> Expr {
    Expr::sym(Symbol::jet(dep, idx))
}

fn u(idx: &[u8]) -> Expr {
    jet(Dep::U, idx)
}

fn v(idx: &[u8]) -> Expr {
    jet(Dep::V, idx)
}

fn w(idx: &[u8]) -> Expr {
    jet(Dep::W, idx)
}

/// A jet whose index contains both 3 and 4 (for u, v, w).
pub fn is_principal(j: &Jet) -> bool {
    matches!(j.dep, Dep::U | Dep::V | Dep::W) && j.index.count(3) > 0 && j.index.count(4) > 0
}

/// Plain total derivative along `x^i` on the jet space.
pub fn jet_derivation(i: u8) -> impl Fn(Symbol) -> Result<Option<Expr>> {
    move |s: Symbol| match s {
        Symbol::Indep(j) => Ok((j == i).then(Expr::one)),
        Symbol::Jet(jt) => Ok(Some(Expr::sym(Symbol::Jet(Jet { dep: jt.dep, index: jt.index.with(i) })))),
        Symbol::LambdaConst(_) | Symbol::Spectral | Symbol::Aux(_) => Ok(None),
        Symbol::Nonlocal(_) => Err(Error::UnknownSymbolClass(s.to_string())),
    }
}

/// The system with fixed (numeric or symbolic) lambda constants.
pub struct SystemModel {
    numeric: Option<[Rational; 4]>,
    lam: [Expr; 4],
    a: Expr,
    b: Expr,
    c: Expr,
    pub eq_u: Expr,
    pub eq_v: Expr,
    pub eq_ghe: Expr,
    normal_form: BTreeMap<Dep, Expr>,
    nondegeneracy: Vec<Expr>,
    cache: Mutex<BTreeMap<Jet, Expr>>,
}

impl core::fmt::Debug for SystemModel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("SystemModel").field("lambdas", &self.lam).finish()
    }
}

impl Clone for SystemModel {
    fn clone(&self) -> Self {
        SystemModel {
            numeric: self.numeric.clone(),
            lam: self.lam.clone(),
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
            eq_u: self.eq_u.clone(),
            eq_v: self.eq_v.clone(),
            eq_ghe: self.eq_ghe.clone(),
            normal_form: self.normal_form.clone(),
            nondegeneracy: self.nondegeneracy.clone(),
            cache: Mutex::new(self.cache.lock().clone()),
        }
    }
}

/// Builds the model for numeric lambdas.
pub fn build_system(lambdas: [Rational; 4]) -> Result<SystemModel> {
    for i in 0..4 {
        for j in (i + 1)..4 {
            if lambdas[i] == lambdas[j] {
                return Err(Error::DegenerateLambdas(format!(
                    "lambda{} = lambda{} = {}",
                    i + 1,
                    j + 1,
                    lambdas[i]
                )));
            }
        }
    }
    let lam = lambdas.clone().map(Expr::constant);
    Ok(SystemModel::assemble(Some(lambdas), lam))
}

impl SystemModel {
    /// Model with the lambda constants kept as symbols.
    pub fn symbolic() -> SystemModel {
        let lam = [1u8, 2, 3, 4].map(|i| Expr::sym(Symbol::lambda(i)));
        SystemModel::assemble(None, lam)
    }

    fn assemble(numeric: Option<[Rational; 4]>, lam: [Expr; 4]) -> SystemModel {
        let d = |i: usize, j: usize| &lam[i - 1] - &lam[j - 1];
        let a = &d(2, 4) * &d(1, 3);
        let b = &d(3, 4) * &d(1, 2);
        let c = &d(2, 3) * &d(1, 4);
        let eq_for = |f: fn(&[u8]) -> Expr| {
            let t_b = &b * &(&(&v(&[1]) * &u(&[2])) * &f(&[3, 4]));
            let t_c = &c
                * &Expr::sum([
                    &(&v(&[1]) * &u(&[4])) * &f(&[2, 3]),
                    -(&(&v(&[3]) * &u(&[4])) * &f(&[1, 2])),
                    &(&v(&[3]) * &u(&[2])) * &f(&[1, 4]),
                ]);
            let t_a = &a
                * &Expr::sum([
                    &(&v(&[1]) * &u(&[3])) * &f(&[2, 4]),
                    -(&(&v(&[4]) * &u(&[3])) * &f(&[1, 2])),
                    &(&v(&[4]) * &u(&[2])) * &f(&[1, 3]),
                ]);
            Expr::sum([t_b, t_c, -t_a])
        };
        let eq_u = eq_for(u);
        let eq_v = eq_for(v);
        let eq_ghe = Expr::sum([
            &a * &(&w(&[1, 3]) * &w(&[2, 4])),
            -(&b * &(&w(&[1, 2]) * &w(&[3, 4]))),
            -(&c * &(&w(&[1, 4]) * &w(&[2, 3]))),
        ]);
        let mut normal_form = BTreeMap::new();
        for (dep, eq) in [(Dep::U, &eq_u), (Dep::V, &eq_v), (Dep::W, &eq_ghe)] {
            let s = Symbol::jet(dep, &[3, 4]);
            let lead = eq.formal_derivative(s);
            let rest = eq.substitute_one(s, &Expr::zero()).expect("plain substitution");
            normal_form.insert(dep, (-rest).try_div(&lead).expect("nonzero leading coefficient"));
        }
        let nondegeneracy = vec![u(&[2]), u(&[3]), u(&[4]), v(&[1]), v(&[3]), v(&[4])];
        SystemModel {
            numeric,
            lam,
            a,
            b,
            c,
            eq_u,
            eq_v,
            eq_ghe,
            normal_form,
            nondegeneracy,
            cache: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn numeric_lambdas(&self) -> Option<&[Rational; 4]> {
        self.numeric.as_ref()
    }

    pub fn is_symbolic(&self) -> bool {
        self.numeric.is_none()
    }

    /// `lambda_i`, 1-based.
    pub fn lambda(&self, i: usize) -> &Expr {
        &self.lam[i - 1]
    }

    /// `lambda_i - lambda_j`.
    pub fn ldiff(&self, i: usize, j: usize) -> Expr {
        &self.lam[i - 1] - &self.lam[j - 1]
    }

    /// The prefactors `(A, B, C)` of the general heavenly equation.
    pub fn abc(&self) -> (&Expr, &Expr, &Expr) {
        (&self.a, &self.b, &self.c)
    }

    /// `A - B - C`; vanishes identically.
    pub fn identity_abc(&self) -> Expr {
        Expr::sum([self.a.clone(), -self.b.clone(), -self.c.clone()])
    }

    /// Solved principal derivative (`u_34`, `v_34` or `w_34`).
    pub fn normal_form(&self, dep: Dep) -> Option<&Expr> {
        self.normal_form.get(&dep)
    }

    pub fn nondegeneracy(&self) -> &[Expr] {
        &self.nondegeneracy
    }

    pub fn total_derivative(&self, i: u8, e: &Expr) -> Result<Expr> {
        e.derive(&jet_derivation(i))
    }

    /// Eliminates every principal jet through the prolonged normal forms.
    pub fn reduce(&self, e: &Expr) -> Expr {
        let principal: Vec<Jet> =
            e.symbols().into_iter().filter_map(|s| s.as_jet()).filter(is_principal).collect();
        if principal.is_empty() {
            return e.clone();
        }
        let bindings: BTreeMap<Symbol, Expr> =
            principal.into_iter().map(|j| (Symbol::Jet(j), self.principal_value(j))).collect();
        e.substitute(&bindings).expect("normal forms have nonvanishing denominators")
    }

    /// Reduced value of a principal jet, memoized.
    pub fn principal_value(&self, j: Jet) -> Expr {
        if let Some(v) = self.cache.lock().get(&j) {
            return v.clone();
        }
        let rest = j.index.without(3).and_then(|i| i.without(4)).expect("principal jet");
        let value = if rest.is_empty() {
            self.normal_form[&j.dep].clone()
        } else {
            let k = rest.indices()[0];
            let prev = Jet { dep: j.dep, index: j.index.without(k).expect("k in index") };
            let pv = self.principal_value(prev);
            let d = self.total_derivative(k, &pv).expect("local expression");
            self.reduce(&d)
        };
        self.cache.lock().insert(j, value.clone());
        value
    }

    /// Fréchet derivative of `(eq_u, eq_v)` in the placeholder directions
    /// `U_I`, `V_I`.
    pub fn linearize(&self) -> (Expr, Expr) {
        (linearize_expr(&self.eq_u), linearize_expr(&self.eq_v))
    }

    /// The linearized system exactly as displayed in the source, typos
    /// included.
    pub fn printed_linearization(&self) -> (Expr, Expr) {
        let subs = |text: &str| -> Expr {
            let e = parse(text).expect("printed linearization parses");
            if self.is_symbolic() {
                return e;
            }
            let mut b = BTreeMap::new();
            for i in 1..=4u8 {
                b.insert(Symbol::lambda(i), self.lam[i as usize - 1].clone());
            }
            e.substitute(&b).expect("lambda substitution")
        };
        let first = "(l3-l4)*(l1-l2)*(V_1*u_2*u_34+v_1*U_2*u_34+v_1*u_2*U_34) \
            +(l2-l3)*(l1-l4)*(V_1*u_4*u_23+v_1*U_4*u_23+v_1*u_4*U_23 \
            -V_3*u_4*u_12-v_3*U_4*u_12-v_3*u_4*U_12+V_3*u_2*u_14+v_3*U_2*u_14+v_3*u_2*U_14) \
            -(l2-l4)*(l1-l3)*(V_1*u_3*u_24+v_1*U_3*u_24+v_1*u_3*U_24 \
            -V_4*u_3*u_12-v_4*U_3*u_12-v_4*u_3*U_12+V_4*u_2*u_13+v_4*U_2*u_13+v_4*u_2*U_13)";
        let second = "(l3-l4)*(l1-l2)*(V_1*u_2*v_34+v_1*U_2*v_34+v_1*u_2*V_34) \
            +(l2-l3)*(l1-l4)*(V_1*u_4*v_23+v_1*U_4*v_23+v_1*u_4*V_23 \
            -V_3*u_4*v_12-v_3*U_4*v_12-v_3*u_4*V_12+V_3*u_2*v_14+v_3*U_2*v_14+v_3*u_2*V_14) \
            -(l2-l4)*(l1-l3)*(V_1*u_3*v_24+v_1*U_3*v_24+v_1*u_3*V_24 \
            -V_4*u_3*v_12-v_4*U_3*u_12-v_4*u_3*V_12+V_4*u_2*v_13+v_4*U_2*v_13+v_4*u_2*V_13)";
        (subs(first), subs(second))
    }

    /// Computed minus printed linearization, per equation.
    pub fn linearization_diff(&self) -> (Expr, Expr) {
        let (cu, cv) = self.linearize();
        let (pu, pv) = self.printed_linearization();
        (&cu - &pu, &cv - &pv)
    }

    /// Evaluates the linearization along `(U, V)` using the given total
    /// derivative, reducing after every step.
    pub fn linearization_along(
        &self,
        uc: &Expr,
        vc: &Expr,
        d: &dyn Fn(u8, &Expr) -> Result<Expr>,
    ) -> Result<(Expr, Expr)> {
        let (lu, lv) = self.linearize();
        let mut bindings = BTreeMap::new();
        let mut memo: BTreeMap<(Dep, Index4), Expr> = BTreeMap::new();
        for e in [&lu, &lv] {
            for s in e.symbols() {
                let Some(j) = s.as_jet() else { continue };
                let base = match j.dep {
                    Dep::DeltaU => uc,
                    Dep::DeltaV => vc,
                    _ => continue,
                };
                let val = derivative_along(j.dep, j.index, base, d, &mut memo)?;
                bindings.insert(s, val);
            }
        }
        let ru = self.reduce(&lu.substitute(&bindings)?);
        let rv = self.reduce(&lv.substitute(&bindings)?);
        Ok((ru, rv))
    }

    /// Local version of [`Self::linearization_along`].
    pub fn linearization_local(&self, uc: &Expr, vc: &Expr) -> Result<(Expr, Expr)> {
        self.linearization_along(uc, vc, &|i, e| Ok(self.reduce(&self.total_derivative(i, e)?)))
    }

    /// Substitutes the potential `u = w_1`, `v = w_2` into both equations
    /// and reduces modulo the general heavenly equation.
    pub fn check_potential_reduction(&self, perturb: bool) -> Result<PotentialReport> {
        let mut eq_u = self.eq_u.clone();
        if perturb {
            eq_u = &eq_u + &u(&[1, 2]);
        }
        let mut residuals = Vec::new();
        let mut sizes = Vec::new();
        for (name, eq) in [("eq_u", &eq_u), ("eq_v", &self.eq_v)] {
            let pot = potential_substitute(eq)?;
            let before = pot.size();
            let red = self.reduce(&pot);
            sizes.push((name.to_string(), before, red.size()));
            residuals.push((name.to_string(), red));
        }
        let report = PotentialReport { perturbed: perturb, sizes, residuals };
        if !perturb {
            if let Some((name, r)) = report.residuals.iter().find(|(_, r)| !r.is_zero()) {
                return Err(Error::ReductionFailure(format!("{name} residual {r}")));
            }
        }
        Ok(report)
    }

    /// Residuals of `(eq_u, eq_v)` (and the heavenly equation when a
    /// potential is present) on a closed-form solution.
    pub fn residuals(&self, sol: &ClosedFormSolution) -> Result<Vec<(String, Expr)>> {
        let mut out = vec![
            ("eq_u".to_string(), sol.on_solution(&self.eq_u)?),
            ("eq_v".to_string(), sol.on_solution(&self.eq_v)?),
        ];
        if sol.w.is_some() {
            out.push(("ghe".to_string(), sol.on_solution(&self.eq_ghe)?));
        }
        Ok(out)
    }

    /// The built-in exact solutions, each checked on construction.
    pub fn solution_catalog(&self) -> Result<Vec<ClosedFormSolution>> {
        let x = |i: u8| Expr::sym(Symbol::x(i));
        let lin = Expr::sum([x(1), x(2), x(3), x(4)]);
        let s = Expr::sum([x(1), x(2).scale(&Rational::from_int(2)), x(3).scale(&Rational::from_int(3)), x(4).scale(&Rational::from_int(4))]);
        let mut quad = Vec::new();
        for i in 1..=4u8 {
            for j in (i + 1)..=4u8 {
                quad.push(&x(i) * &x(j));
            }
        }
        let mut out = vec![
            ClosedFormSolution::new("linear", lin.clone(), lin, None),
            ClosedFormSolution::from_potential("quadratic", Expr::sum(quad)),
            ClosedFormSolution::from_potential("wave-s2", s.pow(2)?),
            ClosedFormSolution::from_potential("wave-s3", s.pow(3)?),
        ];
        let generic_u = parse("x1 + 2*x2 + 3*x3 + 4*x4")?;
        let generic_v = parse("4*x1 + 3*x2 + 2*x3 + x4")?;
        out.insert(1, ClosedFormSolution::new("linear-generic", generic_u, generic_v, None));
        // Off the locus u_3 v_4 = u_4 v_3 where the web degenerates.
        let c34 = (&self.a.scale(&Rational::from_int(2)) - &self.c).try_div(&self.b)?;
        let qg = Expr::sum([
            parse("x1*x2 + x1*x3 + x1*x4 + x2*x3 + 2*x2*x4")?,
            &c34 * &(&x(3) * &x(4)),
        ]);
        out.insert(3, ClosedFormSolution::from_potential("quadratic-generic", qg));
        for sol in &out {
            for (name, r) in self.residuals(sol)? {
                if !r.is_zero() {
                    return Err(Error::ReductionFailure(format!("{} residual of {} is {r}", name, sol.descriptor)));
                }
            }
            for nd in &self.nondegeneracy {
                if sol.on_solution(nd)?.is_zero() {
                    return Err(Error::ReductionFailure(format!("{nd} vanishes on {}", sol.descriptor)));
                }
            }
        }
        Ok(out)
    }

    pub fn catalog_entry(&self, descriptor: &str) -> Result<ClosedFormSolution> {
        self.solution_catalog()?
            .into_iter()
            .find(|s| s.descriptor == descriptor)
            .ok_or_else(|| Error::UnknownSymbol(descriptor.to_string()))
    }
}

fn derivative_along(
    dep: Dep,
    idx: Index4,
    base: &Expr,
    d: &dyn Fn(u8, &Expr) -> Result<Expr>,
    memo: &mut BTreeMap<(Dep, Index4), Expr>,
) -> Result<Expr> {
    if idx.is_empty() {
        return Ok(base.clone());
    }
    if let Some(v) = memo.get(&(dep, idx)) {
        return Ok(v.clone());
    }
    let k = *idx.indices().last().expect("nonempty");
    let prev = derivative_along(dep, idx.without(k).expect("k in idx"), base, d, memo)?;
    let val = d(k, &prev)?;
    memo.insert((dep, idx), val.clone());
    Ok(val)
}

/// Fréchet derivative of one equation.
pub fn linearize_expr(eq: &Expr) -> Expr {
    let mut terms = Vec::new();
    for s in eq.symbols() {
        let Some(j) = s.as_jet() else { continue };
        let dir = match j.dep {
            Dep::U => Dep::DeltaU,
            Dep::V => Dep::DeltaV,
            _ => continue,
        };
        let placeholder = Expr::sym(Symbol::Jet(Jet { dep: dir, index: j.index }));
        terms.push(&eq.formal_derivative(s) * &placeholder);
    }
    Expr::sum(terms)
}

/// `u_I -> w_{I+1}`, `v_I -> w_{I+2}`.
pub fn potential_substitute(e: &Expr) -> Result<Expr> {
    let mut b = BTreeMap::new();
    for s in e.symbols() {
        if let Some(j) = s.as_jet() {
            let k = match j.dep {
                Dep::U => 1,
                Dep::V => 2,
                _ => continue,
            };
            b.insert(s, Expr::sym(Symbol::Jet(Jet { dep: Dep::W, index: j.index.with(k) })));
        }
    }
    e.substitute(&b)
}

#[derive(Clone, Debug)]
pub struct PotentialReport {
    pub perturbed: bool,
    /// `(equation, size after substitution, size after reduction)`.
    pub sizes: Vec<(String, usize, usize)>,
    pub residuals: Vec<(String, Expr)>,
}

impl PotentialReport {
    pub fn all_zero(&self) -> bool {
        self.residuals.iter().all(|(_, r)| r.is_zero())
    }
}

/// An exact solution given by expressions in `x^1..x^4`.
#[derive(Clone, Debug)]
pub struct ClosedFormSolution {
    pub descriptor: String,
    pub u: Expr,
    pub v: Expr,
    pub w: Option<Expr>,
}

impl ClosedFormSolution {
    pub fn new(descriptor: &str, u: Expr, v: Expr, w: Option<Expr>) -> Self {
        ClosedFormSolution { descriptor: descriptor.to_string(), u, v, w }
    }

    /// `u = w_1`, `v = w_2`.
    pub fn from_potential(descriptor: &str, w: Expr) -> Self {
        let u = w.formal_derivative(Symbol::x(1));
        let v = w.formal_derivative(Symbol::x(2));
        ClosedFormSolution::new(descriptor, u, v, Some(w))
    }

    /// `D_I` of `u`, `v` or `w` on the solution.
    pub fn jet_value(&self, j: Jet) -> Result<Expr> {
        let mut e = match j.dep {
            Dep::U => self.u.clone(),
            Dep::V => self.v.clone(),
            Dep::W => self.w.clone().ok_or_else(|| Error::UnboundSymbol("w".to_string()))?,
            _ => return Err(Error::UnboundSymbol(Symbol::Jet(j).to_string())),
        };
        for i in j.index.indices() {
            e = e.formal_derivative(Symbol::x(i));
        }
        Ok(e)
    }

    /// Replaces every jet in `e` by its value on the solution.
    pub fn on_solution(&self, e: &Expr) -> Result<Expr> {
        let mut b = BTreeMap::new();
        for s in e.symbols() {
            if let Some(j) = s.as_jet() {
                b.insert(s, self.jet_value(j)?);
            }
        }
        e.substitute(&b)
    }
}

/// Points of `{-2, ..., 2}^4` used to check that gauge factors do not vanish.
pub fn gauge_grid() -> Vec<[Rational; 4]> {
    let mut out = Vec::new();
    for a in -2..=2i64 {
        for b in -2..=2i64 {
            for c in -2..=2i64 {
                for d in -2..=2i64 {
                    out.push([a, b, c, d].map(Rational::from_int));
                }
            }
        }
    }
    out
}

/// `u~ = a(x^1, u) u`, `v~ = b(x^2, v) v`; `a` is written in the symbols
/// `x1` and `u`, `b` in `x2` and `v`.
pub fn gauge_transform(
    sol: &ClosedFormSolution,
    a: &Expr,
    b: &Expr,
    grid: &[[Rational; 4]],
) -> Result<ClosedFormSolution> {
    let us = Symbol::u(&[]);
    let vs = Symbol::v(&[]);
    for (name, f, own, other) in [("a", a, us, 1u8), ("b", b, vs, 2u8)] {
        let allowed = |s: &Symbol| *s == own || *s == Symbol::x(other);
        if let Some(bad) = f.symbols().into_iter().find(|s| !allowed(s)) {
            return Err(Error::GaugeDegenerate(format!("{name} depends on {bad}")));
        }
    }
    let a_on = a.substitute_one(us, &sol.u)?;
    let b_on = b.substitute_one(vs, &sol.v)?;
    for p in grid {
        let pt: BTreeMap<Symbol, Rational> = (1..=4u8).map(|i| (Symbol::x(i), p[i as usize - 1].clone())).collect();
        for (name, f) in [("a", &a_on), ("b", &b_on)] {
            let val = eval_exact(f, &pt).map_err(|e| Error::GaugeDegenerate(format!("{name}: {e}")))?;
            if val.is_zero() {
                let shown: Vec<String> = p.iter().map(|r| r.to_string()).collect();
                return Err(Error::GaugeDegenerate(format!("{name} vanishes at ({})", shown.join(", "))));
            }
        }
    }
    Ok(ClosedFormSolution {
        descriptor: format!("gauge({}; a={a}, b={b})", sol.descriptor),
        u: &a_on * &sol.u,
        v: &b_on * &sol.v,
        w: None,
    })
}
