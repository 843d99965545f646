//! The covering by the adjoint-Lax variables, the nonlocal symmetry
//! hierarchy, the recursion operator and symmetry verification.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use spin::Mutex;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::lax::{build_x, lie_bracket, LambdaVF};
use crate::linalg;
use crate::symbol::{Family, Index2, Nonlocal, Symbol};
use crate::sysmodel::{jet_derivation, SystemModel};

type RuleKey = (Nonlocal, u8);

/// The split pencils `(X0^(0), X0^(1), X1^(0), X1^(1))`.
fn split_pencils(model: &SystemModel) -> Result<[(LambdaVF, LambdaVF); 2]> {
    let (x0, x1) = build_x(model);
    Ok([x0.split()?, x1.split()?])
}

/// Rules `D_m sigma` (m = 3, 4) for nonlocal variables, with their free
/// prolongations along `x^1`, `x^2` created on demand.
pub struct Covering {
    model: SystemModel,
    rules: BTreeMap<RuleKey, Expr>,
    xi_levels: u16,
    zeta_levels: u16,
    consistency: Vec<(String, Expr)>,
    memo: Mutex<BTreeMap<RuleKey, Expr>>,
}

impl Clone for Covering {
    fn clone(&self) -> Self {
        Covering {
            model: self.model.clone(),
            rules: self.rules.clone(),
            xi_levels: self.xi_levels,
            zeta_levels: self.zeta_levels,
            consistency: self.consistency.clone(),
            memo: Mutex::new(self.memo.lock().clone()),
        }
    }
}

impl core::fmt::Debug for Covering {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Covering")
            .field("xi_levels", &self.xi_levels)
            .field("zeta_levels", &self.zeta_levels)
            .field("rules", &self.rules.len())
            .finish()
    }
}

fn placeholder(m: u8, j: u8) -> Symbol {
    Symbol::aux(&format!("pending_{m}_{j}"))
}

impl Covering {
    /// A covering without nonlocal variables.
    pub fn new(model: &SystemModel) -> Covering {
        Covering {
            model: model.clone(),
            rules: BTreeMap::new(),
            xi_levels: 0,
            zeta_levels: 0,
            consistency: Vec::new(),
            memo: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn model(&self) -> &SystemModel {
        &self.model
    }

    /// Highest populated xi level, if any.
    pub fn depth(&self) -> Option<u16> {
        self.xi_levels.checked_sub(1)
    }

    pub fn zeta_levels(&self) -> u16 {
        self.zeta_levels
    }

    /// Stored rules for unprolonged variables.
    pub fn rules(&self) -> &BTreeMap<RuleKey, Expr> {
        &self.rules
    }

    /// Leftover bracket components recorded while solving, each reduced.
    pub fn consistency(&self) -> &[(String, Expr)] {
        &self.consistency
    }

    /// `D_m sigma` for `m` in 3, 4, prolongations included.
    pub fn rule(&self, n: Nonlocal, m: u8) -> Result<Expr> {
        self.value(n, m, None)
    }

    fn value(&self, n: Nonlocal, m: u8, pending: Option<&BTreeMap<RuleKey, Expr>>) -> Result<Expr> {
        if n.prolong.is_empty() {
            if let Some(v) = pending.and_then(|p| p.get(&(n, m))) {
                return Ok(v.clone());
            }
            return self
                .rules
                .get(&(n, m))
                .cloned()
                .ok_or_else(|| Error::MissingRule(format!("D{m} {}", Symbol::Nonlocal(n))));
        }
        if let Some(v) = self.memo.lock().get(&(n, m)) {
            return Ok(v.clone());
        }
        let k = n.prolong.indices()[0];
        let prev = Nonlocal { prolong: n.prolong.without(k).expect("k in index"), ..n };
        let base = self.value(prev, m, pending)?;
        let v = self.derive(k, &base, pending)?;
        if pending.is_none() {
            self.memo.lock().insert((n, m), v.clone());
        }
        Ok(v)
    }

    fn derive(&self, i: u8, e: &Expr, pending: Option<&BTreeMap<RuleKey, Expr>>) -> Result<Expr> {
        let jets = jet_derivation(i);
        let d = |s: Symbol| -> Result<Option<Expr>> {
            match s {
                Symbol::Nonlocal(n) if i <= 2 => Ok(Some(Expr::sym(Symbol::Nonlocal(n.prolonged(i))))),
                Symbol::Nonlocal(n) => Ok(Some(self.value(n, i, pending)?)),
                other => jets(other),
            }
        };
        Ok(self.model.reduce(&e.derive(&d)?))
    }

    /// Total derivative on the covering, reduced modulo the system.
    pub fn total_derivative(&self, i: u8, e: &Expr) -> Result<Expr> {
        self.derive(i, e, None)
    }

    /// Solves `eqs = 0` (linear in the pending placeholders) for the rules
    /// of `sigma^1`, `sigma^2` at one level and stores them.
    fn solve_level(&mut self, family: Family, level: u16, eqs: Vec<(String, Expr)>) -> Result<()> {
        let unknowns: Vec<(RuleKey, Symbol)> = [(3u8, 1u8), (3, 2), (4, 1), (4, 2)]
            .iter()
            .map(|&(m, j)| ((Nonlocal::new(family, level, j), m), placeholder(m, j)))
            .collect();
        let involved: Vec<usize> = (0..eqs.len())
            .filter(|&e| unknowns.iter().any(|(_, s)| eqs[e].1.contains(*s)))
            .collect();
        let coeff = |e: usize| -> Result<(Vec<Expr>, Expr)> {
            let eq = &eqs[e].1;
            let row: Vec<Expr> = unknowns.iter().map(|(_, s)| eq.formal_derivative(*s)).collect();
            if row.iter().any(|c| unknowns.iter().any(|(_, s)| c.contains(*s))) {
                return Err(Error::SolveFailure(format!("{} is not linear in the unknowns", eqs[e].0)));
            }
            let mut zero = BTreeMap::new();
            for (_, s) in &unknowns {
                zero.insert(*s, Expr::zero());
            }
            Ok((row, -eq.substitute(&zero)?))
        };
        let rows: Vec<(Vec<Expr>, Expr)> = involved.iter().map(|&e| coeff(e)).collect::<Result<_>>()?;
        let chosen = choose_square(&rows).ok_or_else(|| {
            Error::SolveFailure(format!("{} level {level}: singular isolation of D3, D4", family.name()))
        })?;
        let a: linalg::Matrix<Expr> = chosen.iter().map(|&r| rows[r].0.clone()).collect();
        let b: linalg::Matrix<Expr> = chosen.iter().map(|&r| vec![rows[r].1.clone()]).collect();
        let sol = linalg::solve(&a, &b)?;
        let mut bindings = BTreeMap::new();
        for ((key, s), v) in unknowns.iter().zip(sol) {
            let v = self.model.reduce(&v[0]);
            bindings.insert(*s, v.clone());
            self.rules.insert(*key, v);
        }
        for (name, eq) in eqs {
            let r = self.model.reduce(&eq.substitute(&bindings)?);
            if !r.is_zero() {
                return Err(Error::SolveFailure(format!("{name} does not vanish: {r}")));
            }
            self.consistency.push((name, r));
        }
        Ok(())
    }

    fn pending_map(family: Family, level: u16) -> BTreeMap<RuleKey, Expr> {
        let mut p = BTreeMap::new();
        for m in [3u8, 4] {
            for j in [1u8, 2] {
                p.insert((Nonlocal::new(family, level, j), m), Expr::sym(placeholder(m, j)));
            }
        }
        p
    }

    /// Adds the next xi level from `[Q_r, X_i^(0)] = [Q_{r-1}, X_i^(1)]`.
    pub fn extend_xi(&mut self) -> Result<u16> {
        let r = self.xi_levels;
        let pencils = split_pencils(&self.model)?;
        let q = |level: u16| {
            LambdaVF::from_coefficients([
                vec![Expr::sym(Symbol::xi(level, 1))],
                vec![Expr::sym(Symbol::xi(level, 2))],
                Vec::new(),
                Vec::new(),
            ])
        };
        let pending = Self::pending_map(Family::Xi, r);
        let dp = |i: u8, e: &Expr| self.derive(i, e, Some(&pending));
        let d = |i: u8, e: &Expr| self.total_derivative(i, e);
        let mut eqs = Vec::new();
        for (i, (x0, x1)) in pencils.iter().enumerate() {
            let lhs = lie_bracket(&q(r), x0, &dp)?;
            let rhs = if r == 0 { LambdaVF::zero() } else { lie_bracket(&q(r - 1), x1, &d)? };
            for k in 1..=4 {
                eqs.push((format!("xi level {r}, X{i} component {k}"), &lhs.component(k) - &rhs.component(k)));
            }
        }
        self.solve_level(Family::Xi, r, eqs)?;
        self.xi_levels += 1;
        Ok(r)
    }

    /// `D3(D4 sigma_I) - D4(D3 sigma_I)` for one (possibly prolonged)
    /// variable.
    pub fn commutator(&self, n: Nonlocal) -> Result<Expr> {
        let a = self.total_derivative(3, &self.rule(n, 4)?)?;
        let b = self.total_derivative(4, &self.rule(n, 3)?)?;
        Ok(&a - &b)
    }

    /// Commutator residuals for every populated variable of `family` and
    /// its prolongations of total order up to `order`.
    pub fn compatibility_residuals(&self, family: Family, order: usize) -> Result<Vec<(Nonlocal, Expr)>> {
        let levels = match family {
            Family::Xi => 0..self.xi_levels,
            Family::Zeta => 1..self.zeta_levels + 1,
        };
        let mut out = Vec::new();
        for r in levels {
            for j in [1u8, 2] {
                for p in prolongations(order) {
                    let n = Nonlocal { prolong: p, ..Nonlocal::new(family, r, j) };
                    out.push((n, self.commutator(n)?));
                }
            }
        }
        Ok(out)
    }

    pub fn check_compatibility(&self, family: Family, order: usize) -> Result<()> {
        for (n, r) in self.compatibility_residuals(family, order)? {
            if !r.is_zero() {
                return Err(Error::CompatibilityFailure(format!("[D3, D4] {} = {r}", Symbol::Nonlocal(n))));
            }
        }
        Ok(())
    }

    /// Rules as `(variable, direction, value)` text triples.
    pub fn export(&self) -> Vec<(String, u8, String)> {
        self.rules.iter().map(|((n, m), e)| (Symbol::Nonlocal(*n).to_string(), *m, e.to_string())).collect()
    }
}

/// All `(x^1, x^2)` multi-indices of total order at most `order`.
pub fn prolongations(order: usize) -> Vec<Index2> {
    let mut out = Vec::new();
    for total in 0..=order {
        for a in 0..=total {
            out.push(Index2::from_counts([a as u8, (total - a) as u8]));
        }
    }
    out
}

fn choose_square(rows: &[(Vec<Expr>, Expr)]) -> Option<Vec<usize>> {
    let n = rows.first()?.0.len();
    let mut chosen: Vec<usize> = Vec::new();
    // Greedy: keep a row if it raises the rank.
    for r in 0..rows.len() {
        let mut trial = chosen.clone();
        trial.push(r);
        if rank(&trial.iter().map(|&i| rows[i].0.clone()).collect::<Vec<_>>()) == trial.len() {
            chosen = trial;
        }
        if chosen.len() == n {
            return Some(chosen);
        }
    }
    None
}

fn rank(m: &[Vec<Expr>]) -> usize {
    let mut a: Vec<Vec<Expr>> = m.to_vec();
    let (rows, cols) = (a.len(), a.first().map_or(0, |r| r.len()));
    let mut rk = 0;
    for c in 0..cols {
        let Some(p) = (rk..rows).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(p, rk);
        let piv = a[rk][c].clone();
        for r in 0..rows {
            if r == rk || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].try_div(&piv).expect("nonzero pivot");
            for k in c..cols {
                let t = &f * &a[rk][k];
                a[r][k] = &a[r][k] - &t;
            }
        }
        rk += 1;
    }
    rk
}

/// Builds xi levels `0..=depth`.
pub fn build_covering(model: &SystemModel, depth: u16) -> Result<Covering> {
    let mut cov = Covering::new(model);
    for _ in 0..=depth {
        cov.extend_xi()?;
    }
    Ok(cov)
}

pub fn covering_total_derivative(cov: &Covering, i: u8, e: &Expr) -> Result<Expr> {
    cov.total_derivative(i, e)
}

/// A symmetry characteristic `(U, V)`.
#[derive(Clone, Debug)]
pub struct Characteristic {
    pub u: Expr,
    pub v: Expr,
    pub provenance: String,
}

impl Characteristic {
    pub fn new(u: Expr, v: Expr, provenance: &str) -> Self {
        Characteristic { u, v, provenance: provenance.to_string() }
    }
}

impl core::fmt::Display for Characteristic {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}: ({}, {})", self.provenance, self.u, self.v)
    }
}

/// `(xi_r^2 u_2, -xi_r^1 v_1)`.
pub fn hierarchy_characteristic(r: u16) -> Characteristic {
    let u2 = Expr::sym(Symbol::u(&[2]));
    let v1 = Expr::sym(Symbol::v(&[1]));
    Characteristic::new(
        &Expr::sym(Symbol::xi(r, 2)) * &u2,
        -(&Expr::sym(Symbol::xi(r, 1)) * &v1),
        &format!("hierarchy[{r}]"),
    )
}

#[derive(Clone, Debug)]
pub struct SymmetryCheck {
    pub accepted: bool,
    pub residual_u: Expr,
    pub residual_v: Expr,
}

/// Substitutes `(U, V)` into the linearized system with covering-aware
/// total derivatives and reduces.
pub fn verify_symmetry(cov: &Covering, ch: &Characteristic) -> Result<SymmetryCheck> {
    let d = |i: u8, e: &Expr| cov.total_derivative(i, e);
    let (ru, rv) = cov.model().linearization_along(&ch.u, &ch.v, &d)?;
    Ok(SymmetryCheck { accepted: ru.is_zero() && rv.is_zero(), residual_u: ru, residual_v: rv })
}

/// One application of the recursion operator: adds a zeta level to a copy
/// of `cov` and returns `(u_2 zeta^2, -v_1 zeta^1)`.
pub fn recursion_apply(cov: &Covering, ch: &Characteristic) -> Result<(Characteristic, Covering)> {
    let mut next = cov.clone();
    let level = cov.zeta_levels + 1;
    let model = cov.model();
    let u2 = Expr::sym(Symbol::u(&[2]));
    let v1 = Expr::sym(Symbol::v(&[1]));
    let r_field = LambdaVF::from_coefficients([
        vec![-ch.v.try_div(&v1)?],
        vec![ch.u.try_div(&u2)?],
        Vec::new(),
        Vec::new(),
    ]);
    let s_field = LambdaVF::from_coefficients([
        vec![Expr::sym(Symbol::zeta(level, 1))],
        vec![Expr::sym(Symbol::zeta(level, 2))],
        Vec::new(),
        Vec::new(),
    ]);
    let pencils = split_pencils(model)?;
    let pending = Covering::pending_map(Family::Zeta, level);
    let eqs = {
        let dp = |i: u8, e: &Expr| cov.derive(i, e, Some(&pending));
        let d = |i: u8, e: &Expr| cov.total_derivative(i, e);
        let mut eqs = Vec::new();
        for (i, (x0, x1)) in pencils.iter().enumerate() {
            let lhs = lie_bracket(x1, &s_field, &dp)?;
            let rhs = lie_bracket(x0, &r_field, &d)?;
            for k in 1..=4 {
                eqs.push((format!("zeta level {level}, X{i} component {k}"), &lhs.component(k) - &rhs.component(k)));
            }
        }
        eqs
    };
    next.solve_level(Family::Zeta, level, eqs)?;
    next.zeta_levels = level;
    for j in [1u8, 2] {
        let n = Nonlocal::new(Family::Zeta, level, j);
        let r = next.commutator(n)?;
        if !r.is_zero() {
            return Err(Error::CompatibilityFailure(format!("[D3, D4] {} = {r}", Symbol::Nonlocal(n))));
        }
    }
    let out = Characteristic::new(
        &u2 * &Expr::sym(Symbol::zeta(level, 2)),
        -(&v1 * &Expr::sym(Symbol::zeta(level, 1))),
        &format!("R({})", ch.provenance),
    );
    Ok((out, next))
}

/// Named local characteristics: translations, scalings and the zero seed.
pub fn named_characteristic(name: &str) -> Option<Characteristic> {
    let u = |i: &[u8]| Expr::sym(Symbol::u(i));
    let v = |i: &[u8]| Expr::sym(Symbol::v(i));
    let x = |i: u8| Expr::sym(Symbol::x(i));
    let digit = |s: &str| s.parse::<u8>().ok().filter(|i| (1..=4).contains(i));
    if let Some(i) = name.strip_prefix("translation-").and_then(digit) {
        return Some(Characteristic::new(u(&[i]), v(&[i]), name));
    }
    if let Some(i) = name.strip_prefix("dilation-x").and_then(digit) {
        return Some(Characteristic::new(&x(i) * &u(&[i]), &x(i) * &v(&[i]), name));
    }
    match name {
        "scale-uv" => Some(Characteristic::new(u(&[]), v(&[]), name)),
        "scale-u" => Some(Characteristic::new(u(&[]), Expr::zero(), name)),
        "scale-v" => Some(Characteristic::new(Expr::zero(), v(&[]), name)),
        "zero" => Some(Characteristic::new(Expr::zero(), Expr::zero(), name)),
        _ => None,
    }
}

/// Translations plus the scaling-type candidates that pass
/// [`verify_symmetry`].
pub fn seed_symmetries(model: &SystemModel) -> Result<Vec<Characteristic>> {
    let cov = Covering::new(model);
    let mut out: Vec<Characteristic> =
        (1..=4).map(|i| named_characteristic(&format!("translation-{i}")).expect("known name")).collect();
    let mut candidates: Vec<String> = (1..=4).map(|i| format!("dilation-x{i}")).collect();
    candidates.extend(["scale-uv", "scale-u", "scale-v"].map(String::from));
    for name in candidates {
        let ch = named_characteristic(&name).expect("known name");
        if verify_symmetry(&cov, &ch)?.accepted {
            out.push(ch);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use crate::rational::Rational;
    use crate::sysmodel::build_system;

    fn std_model() -> SystemModel {
        build_system([0, 1, 2, 3].map(Rational::from_int)).unwrap()
    }

    #[test]
    fn level_zero_rules() {
        let m = std_model();
        let cov = build_covering(&m, 0).unwrap();
        let keys: Vec<RuleKey> = cov.rules().keys().cloned().collect();
        assert_eq!(keys.len(), 4);
        for m in [3u8, 4] {
            for j in [1u8, 2] {
                assert!(keys.contains(&(Nonlocal::new(Family::Xi, 0, j), m)));
            }
        }
        let d1 = cov.total_derivative(1, &Expr::sym(Symbol::xi(0, 1))).unwrap();
        assert_eq!(d1, parse("xi[0,1]_1").unwrap());
        let d3 = cov.total_derivative(3, &Expr::sym(Symbol::xi(0, 1))).unwrap();
        assert_eq!(d3, cov.rules()[&(Nonlocal::new(Family::Xi, 0, 1), 3)]);
    }

    #[test]
    fn rules_linear_in_xi() {
        let m = std_model();
        let cov = build_covering(&m, 0).unwrap();
        let vars: Vec<Symbol> = prolongations(1)
            .into_iter()
            .flat_map(|p| [1u8, 2].map(|j| Symbol::Nonlocal(Nonlocal { prolong: p, ..Nonlocal::new(Family::Xi, 0, j) })))
            .collect();
        for e in cov.rules().values() {
            for s in e.symbols() {
                match s {
                    Symbol::Nonlocal(_) => assert!(vars.contains(&s), "{s}"),
                    Symbol::Jet(j) => assert!(j.index.len() <= 2),
                    other => panic!("unexpected {other}"),
                }
            }
            let mut zero = BTreeMap::new();
            for v in &vars {
                zero.insert(*v, Expr::zero());
            }
            assert!(e.substitute(&zero).unwrap().is_zero());
            for v in &vars {
                for w in &vars {
                    assert!(e.formal_derivative(*v).formal_derivative(*w).is_zero());
                }
            }
        }
    }

    #[test]
    fn compatibility_low_depth() {
        let m = std_model();
        let cov = build_covering(&m, 1).unwrap();
        cov.check_compatibility(Family::Xi, 1).unwrap();
        assert!(cov.consistency().iter().all(|(_, r)| r.is_zero()));
    }

    #[test]
    fn missing_rule() {
        let m = std_model();
        let cov = Covering::new(&m);
        let r = cov.total_derivative(3, &Expr::sym(Symbol::xi(0, 1)));
        assert!(matches!(r, Err(Error::MissingRule(_))));
    }

    #[test]
    fn translations_and_scalings() {
        let m = std_model();
        let seeds = seed_symmetries(&m).unwrap();
        let names: Vec<&str> = seeds.iter().map(|c| c.provenance.as_str()).collect();
        for n in ["translation-1", "translation-4", "scale-u", "scale-v", "scale-uv"] {
            assert!(names.contains(&n), "{n} missing from {names:?}");
        }
        let cov = Covering::new(&m);
        let bad = Characteristic::new(parse("x3*u_2").unwrap(), Expr::zero(), "bad");
        let check = verify_symmetry(&cov, &bad).unwrap();
        assert!(!check.accepted);
        assert!(!check.residual_u.is_zero() || !check.residual_v.is_zero());
    }

    #[test]
    fn hierarchy_level_zero() {
        let m = std_model();
        let cov = build_covering(&m, 0).unwrap();
        let ch = hierarchy_characteristic(0);
        assert_eq!(ch.u, parse("xi[0,2]*u_2").unwrap());
        assert!(verify_symmetry(&cov, &ch).unwrap().accepted);
        let flipped = Characteristic::new(ch.u.clone(), -ch.v.clone(), "flipped");
        assert!(!verify_symmetry(&cov, &flipped).unwrap().accepted);
    }

    #[test]
    fn recursion_on_translation() {
        let m = std_model();
        let cov = Covering::new(&m);
        let seed = named_characteristic("translation-3").unwrap();
        let (out, next) = recursion_apply(&cov, &seed).unwrap();
        assert_eq!(next.zeta_levels(), 1);
        assert!(verify_symmetry(&next, &out).unwrap().accepted);
    }

    #[test]
    fn recursion_on_zero_seed() {
        let m = std_model();
        let cov = Covering::new(&m);
        let (out, next) = recursion_apply(&cov, &named_characteristic("zero").unwrap()).unwrap();
        assert!(verify_symmetry(&next, &out).unwrap().accepted);
    }
}
