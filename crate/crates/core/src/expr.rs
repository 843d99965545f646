//! Exact rational functions over the jet-space symbols.
//!
//! An [`Expr`] is a numerator polynomial over a denominator kept as a
//! product of monic "atoms" with multiplicities. No multivariate gcd is
//! computed: monomial factors are split into single-variable atoms, other
//! factors are found by trial division against atoms already in play, and
//! zero testing is exact expansion of the numerator.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::poly::{Monomial, Poly};
use crate::rational::Rational;
use crate::symbol::Symbol;

type Den = Vec<(Poly, u32)>;

#[derive(Clone)]
pub struct Expr {
    num: Poly,
    /// Sorted, distinct, monic non-constant atoms with positive exponents.
    den: Den,
}

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

/// A derivation fixed by its values on single symbols.
pub trait Derivation {
    /// Image of `s`; `Ok(None)` stands for zero.
    fn apply(&self, s: Symbol) -> Result<Option<Expr>>;
}

impl<F: Fn(Symbol) -> Result<Option<Expr>>> Derivation for F {
    fn apply(&self, s: Symbol) -> Result<Option<Expr>> {
        self(s)
    }
}

fn atom_var(a: &Poly) -> Option<Symbol> {
    let (m, c) = a.leading()?;
    if a.len() == 1 && c.is_one() && m.degree() == 1 {
        m.iter().next().map(|p| p.0)
    } else {
        None
    }
}

fn divide_atom(num: &Poly, a: &Poly) -> Option<Poly> {
    if let Some(s) = atom_var(a) {
        return num.div_exact(&Poly::var(s));
    }
    if let Some((s, r)) = a.as_linear_root() {
        return num.div_linear_exact(s, &r);
    }
    num.div_exact(a)
}

/// `lambda_i - lambda_j` for all i < j, the atoms that keep reappearing.
fn lambda_atoms() -> Vec<Poly> {
    let mut out = Vec::with_capacity(6);
    for i in 1..=4u8 {
        for j in (i + 1)..=4u8 {
            out.push(Poly::var(Symbol::lambda(i)).sub(&Poly::var(Symbol::lambda(j))));
        }
    }
    out
}

/// Splits `p` into a constant times monic atoms.
fn split_atoms(p: &Poly, known: &[Poly]) -> (Rational, Den) {
    let mut atoms: Den = Vec::new();
    let mc = p.monomial_content();
    let mut rest = if mc.is_one() { p.clone() } else { p.div_exact(&Poly::term(mc.clone(), Rational::ONE)).expect("content divides") };
    for (s, e) in mc.iter() {
        atoms.push((Poly::var(s), e as u32));
    }
    let (c, monic) = rest.make_monic();
    rest = monic;
    if rest.as_constant().is_none() {
        let mut candidates: Vec<Poly> = known.to_vec();
        if rest.contains_where(|s| matches!(s, Symbol::LambdaConst(_))) {
            candidates.extend(lambda_atoms());
        }
        candidates.sort();
        candidates.dedup();
        for a in candidates {
            if atom_var(&a).is_some() || a.total_degree() > rest.total_degree() {
                continue;
            }
            let mut e = 0;
            while rest.total_degree() >= a.total_degree() {
                match divide_atom(&rest, &a) {
                    Some(q) => {
                        rest = q;
                        e += 1;
                    }
                    None => break,
                }
            }
            if e > 0 {
                atoms.push((a, e));
            }
            if rest.as_constant().is_some() {
                break;
            }
        }
        // Atoms are monic, so the leftover is monic too.
        if rest.as_constant().is_none() {
            atoms.push((rest, 1));
        }
    }
    (c, atoms)
}

fn merge_den(a: &Den, b: &Den) -> Den {
    let mut map: BTreeMap<Poly, u32> = BTreeMap::new();
    for (p, e) in a.iter().chain(b.iter()) {
        *map.entry(p.clone()).or_insert(0) += e;
    }
    map.into_iter().collect()
}

fn den_product(den: &Den) -> Poly {
    let mut out = Poly::one();
    for (a, e) in den {
        out = out.mul(&a.pow(*e));
    }
    out
}

/// Cancels atoms of `den` dividing `num`.
fn cancel(mut num: Poly, den: Den) -> (Poly, Den) {
    if num.is_zero() {
        return (num, Vec::new());
    }
    let mut out = Vec::with_capacity(den.len());
    let mut content: Option<Monomial> = None;
    for (a, mut e) in den {
        if let Some(s) = atom_var(&a) {
            let mc = content.get_or_insert_with(|| num.monomial_content());
            let k = (mc.exponent(s) as u32).min(e);
            if k > 0 {
                let m = Monomial::power(s, k as u16);
                num = num.div_exact(&Poly::term(m.clone(), Rational::ONE)).expect("content divides");
                *mc = mc.div(&m).expect("content divides");
                e -= k;
            }
        } else {
            while e > 0 {
                match divide_atom(&num, &a) {
                    Some(q) => {
                        num = q;
                        content = None;
                        e -= 1;
                    }
                    None => break,
                }
            }
        }
        if e > 0 {
            out.push((a, e));
        }
    }
    (num, out)
}

impl Expr {
    pub fn zero() -> Expr {
        Expr { num: Poly::zero(), den: Vec::new() }
    }

    pub fn one() -> Expr {
        Expr::from_poly(Poly::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(Rational::from_int(n))
    }

    pub fn constant(c: Rational) -> Expr {
        Expr::from_poly(Poly::constant(c))
    }

    pub fn sym(s: Symbol) -> Expr {
        Expr::from_poly(Poly::var(s))
    }

    pub fn from_poly(p: Poly) -> Expr {
        Expr { num: p, den: Vec::new() }
    }

    /// `num / den` with `den` given as a polynomial; splits it into atoms.
    pub fn fraction(num: Poly, den: &Poly) -> Result<Expr> {
        Expr::from_poly(num).try_div(&Expr::from_poly(den.clone()))
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator_atoms(&self) -> &[(Poly, u32)] {
        &self.den
    }

    pub fn denominator(&self) -> Poly {
        den_product(&self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn as_symbol(&self) -> Option<Symbol> {
        if self.den.is_empty() {
            atom_var(&self.num)
        } else {
            None
        }
    }

    /// Number of numerator terms plus denominator atom terms.
    pub fn size(&self) -> usize {
        self.num.len() + self.den.iter().map(|(a, _)| a.len()).sum::<usize>()
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.num.contains(s) || self.den.iter().any(|(a, _)| a.contains(s))
    }

    pub fn contains_where(&self, pred: impl Fn(&Symbol) -> bool) -> bool {
        self.num.contains_where(&pred) || self.den.iter().any(|(a, _)| a.contains_where(&pred))
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = self.num.symbols();
        for (a, _) in &self.den {
            out.extend(a.symbols());
        }
        out
    }

    fn normalized(num: Poly, den: Den) -> Expr {
        let (num, den) = cancel(num, den);
        Expr { num, den }
    }

    pub fn scale(&self, c: &Rational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr { num: self.num.scale(c), den: self.den.clone() }
    }

    /// Sum with one common denominator for all summands.
    pub fn sum<I: IntoIterator<Item = Expr>>(items: I) -> Expr {
        let mut groups: BTreeMap<Den, Poly> = BTreeMap::new();
        for it in items {
            if it.is_zero() {
                continue;
            }
            match groups.get_mut(&it.den) {
                Some(p) => *p = p.add(&it.num),
                None => {
                    groups.insert(it.den, it.num);
                }
            }
        }
        groups.retain(|_, p| !p.is_zero());
        if groups.is_empty() {
            return Expr::zero();
        }
        if groups.len() == 1 {
            let (den, num) = groups.into_iter().next().expect("one group");
            return if den.is_empty() { Expr::from_poly(num) } else { Expr::normalized(num, den) };
        }
        let mut lcm: BTreeMap<Poly, u32> = BTreeMap::new();
        for den in groups.keys() {
            for (a, e) in den {
                let slot = lcm.entry(a.clone()).or_insert(0);
                *slot = (*slot).max(*e);
            }
        }
        let mut num = Poly::zero();
        for (den, p) in groups {
            let mut cof = Poly::one();
            for (a, e) in &lcm {
                let have = den.iter().find(|(b, _)| b == a).map_or(0, |t| t.1);
                if *e > have {
                    cof = cof.mul(&a.pow(e - have));
                }
            }
            num = num.add(&p.mul(&cof));
        }
        Expr::normalized(num, lcm.into_iter().collect())
    }

    pub fn product<I: IntoIterator<Item = Expr>>(items: I) -> Expr {
        let mut acc = Expr::one();
        for it in items {
            acc = &acc * &it;
            if acc.is_zero() {
                break;
            }
        }
        acc
    }

    fn mul_impl(&self, other: &Expr) -> Expr {
        if self.is_zero() || other.is_zero() {
            return Expr::zero();
        }
        if self.den.is_empty() && other.den.is_empty() {
            return Expr::from_poly(self.num.mul(&other.num));
        }
        let (an, bd) = cancel(self.num.clone(), other.den.clone());
        let (bn, ad) = cancel(other.num.clone(), self.den.clone());
        Expr { num: an.mul(&bn), den: merge_den(&ad, &bd) }
    }

    fn recip_with(&self, known: &[Poly]) -> Result<Expr> {
        if self.is_zero() {
            return Err(Error::DivisionByZeroExpr);
        }
        let mut cands: Vec<Poly> = known.to_vec();
        cands.extend(self.den.iter().map(|(a, _)| a.clone()));
        let (c, atoms) = split_atoms(&self.num, &cands);
        let num = den_product(&self.den).scale(&c.recip());
        Ok(Expr { num, den: merge_den(&atoms, &Vec::new()) })
    }

    pub fn recip(&self) -> Result<Expr> {
        self.recip_with(&[])
    }

    pub fn try_div(&self, other: &Expr) -> Result<Expr> {
        if other.is_zero() {
            return Err(Error::DivisionByZeroExpr);
        }
        if let Some(c) = other.as_constant() {
            return Ok(self.scale(&c.recip()));
        }
        let known: Vec<Poly> = self.den.iter().map(|(a, _)| a.clone()).collect();
        let r = other.recip_with(&known)?;
        Ok(self.mul_impl(&r))
    }

    pub fn pow(&self, n: i32) -> Result<Expr> {
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut result = Expr::one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        Ok(result)
    }

    /// Image of a polynomial under a derivation.
    fn derive_poly(p: &Poly, d: &dyn Derivation) -> Result<Expr> {
        let mut poly_part = Poly::zero();
        let mut rest = Vec::new();
        for s in p.symbols() {
            let Some(ds) = d.apply(s)? else { continue };
            if ds.is_zero() {
                continue;
            }
            let dp = p.derivative(s);
            if ds.den.is_empty() {
                poly_part = poly_part.add(&dp.mul(&ds.num));
            } else {
                rest.push(Expr::from_poly(dp).mul_impl(&ds));
            }
        }
        rest.push(Expr::from_poly(poly_part));
        Ok(Expr::sum(rest))
    }

    /// Applies a derivation, using the quotient rule atom by atom.
    pub fn derive(&self, d: &dyn Derivation) -> Result<Expr> {
        let dn = Self::derive_poly(&self.num, d)?;
        if self.den.is_empty() {
            return Ok(dn);
        }
        let mut items = alloc::vec![dn];
        for (a, k) in &self.den {
            let da = Self::derive_poly(a, d)?;
            if da.is_zero() {
                continue;
            }
            let over_a = Expr::normalized(self.num.clone(), alloc::vec![(a.clone(), 1)]);
            items.push(over_a.mul_impl(&da).scale(&Rational::from_int(-(*k as i64))));
        }
        let s = Expr::sum(items);
        Ok(s.mul_impl(&Expr { num: Poly::one(), den: self.den.clone() }))
    }

    /// Partial derivative treating every symbol as independent.
    pub fn formal_derivative(&self, s: Symbol) -> Expr {
        let d = move |t: Symbol| -> Result<Option<Expr>> { Ok((t == s).then(Expr::one)) };
        self.derive(&d).expect("formal derivative cannot fail")
    }

    fn poly_image(p: &Poly, bindings: &BTreeMap<Symbol, Expr>) -> Expr {
        let mut groups: BTreeMap<Monomial, Vec<(Monomial, Rational)>> = BTreeMap::new();
        for (m, c) in p.terms() {
            let mut bound = Vec::new();
            let mut free = Vec::new();
            for (s, e) in m.iter() {
                if bindings.contains_key(&s) {
                    bound.push((s, e));
                } else {
                    free.push((s, e));
                }
            }
            groups.entry(Monomial::from_pairs(bound)).or_default().push((Monomial::from_pairs(free), c.clone()));
        }
        let mut powers: BTreeMap<(Symbol, u16), Expr> = BTreeMap::new();
        let mut items = Vec::with_capacity(groups.len());
        for (bound, free) in groups {
            let mut t = Expr::from_poly(Poly::from_terms(free));
            for (s, e) in bound.iter() {
                let pw = powers
                    .entry((s, e))
                    .or_insert_with(|| bindings[&s].pow(e as i32).expect("non-negative power"));
                t = t.mul_impl(pw);
            }
            items.push(t);
        }
        Expr::sum(items)
    }

    /// Simultaneous substitution of symbols by expressions.
    pub fn substitute(&self, bindings: &BTreeMap<Symbol, Expr>) -> Result<Expr> {
        for (k, v) in bindings {
            if v.contains(*k) {
                return Err(Error::RecursiveBinding(k.to_string()));
            }
        }
        let used = self.symbols();
        let relevant: BTreeMap<Symbol, Expr> =
            bindings.iter().filter(|(k, _)| used.contains(k)).map(|(k, v)| (*k, v.clone())).collect();
        if relevant.is_empty() {
            return Ok(self.clone());
        }
        if relevant.values().all(|v| v.den.is_empty()) {
            let pb: BTreeMap<Symbol, Poly> = relevant.iter().map(|(k, v)| (*k, v.num.clone())).collect();
            let num = Expr::from_poly(self.num.substitute(&pb));
            let mut den = Expr::one();
            for (a, e) in &self.den {
                let img = Expr::from_poly(a.substitute(&pb));
                den = &den * &img.pow(*e as i32)?;
            }
            return num.try_div(&den);
        }
        let num = Self::poly_image(&self.num, &relevant);
        let mut den = Expr::one();
        for (a, e) in &self.den {
            den = &den * &Self::poly_image(a, &relevant).pow(*e as i32)?;
        }
        num.try_div(&den)
    }

    pub fn substitute_one(&self, s: Symbol, value: &Expr) -> Result<Expr> {
        let mut b = BTreeMap::new();
        b.insert(s, value.clone());
        self.substitute(&b)
    }

    /// Coefficients of the powers of `s`; `None` when `s` occurs in the
    /// denominator.
    pub fn coefficients_in(&self, s: Symbol) -> Option<Vec<Expr>> {
        if self.den.iter().any(|(a, _)| a.contains(s)) {
            return None;
        }
        Some(
            self.num
                .coefficients_in(s)
                .into_iter()
                .map(|c| Expr::normalized(c, self.den.clone()))
                .collect(),
        )
    }

    /// Exact equality by expansion of the difference.
    pub fn equals(&self, other: &Expr) -> bool {
        if self.num == other.num && self.den == other.den {
            return true;
        }
        (self - other).is_zero()
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Expr) -> bool {
        self.equals(other)
    }
}

impl From<Rational> for Expr {
    fn from(c: Rational) -> Expr {
        Expr::constant(c)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Expr {
        Expr::sym(s)
    }
}

impl From<Poly> for Expr {
    fn from(p: Poly) -> Expr {
        Expr::from_poly(p)
    }
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            let num = self.num.add(&rhs.num);
            return if self.den.is_empty() { Expr::from_poly(num) } else { Expr::normalized(num, self.den.clone()) };
        }
        Expr::sum([self.clone(), rhs.clone()])
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self + &(-rhs)
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        self.mul_impl(rhs)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr { num: self.num.neg(), den: self.den.clone() }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                (&self).$m(rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                self.$m(&rhs)
            }
        }
    };
}

owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

fn write_monomial(f: &mut fmt::Formatter<'_>, m: &Monomial) -> fmt::Result {
    for (k, (s, e)) in m.iter().enumerate() {
        if k > 0 {
            f.write_str("*")?;
        }
        write!(f, "{s}")?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

pub(crate) fn write_poly(f: &mut fmt::Formatter<'_>, p: &Poly) -> fmt::Result {
    if p.is_zero() {
        return f.write_str("0");
    }
    for (k, (m, c)) in p.terms().iter().enumerate() {
        let neg = c.is_negative();
        match (k, neg) {
            (0, true) => f.write_str("-")?,
            (0, false) => {}
            (_, true) => f.write_str(" - ")?,
            (_, false) => f.write_str(" + ")?,
        }
        let a = c.abs();
        if m.is_one() {
            write!(f, "{a}")?;
        } else {
            if !a.is_one() {
                write!(f, "{a}*")?;
            }
            write_monomial(f, m)?;
        }
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write_poly(f, &self.num);
        }
        if self.num.len() > 1 {
            f.write_str("(")?;
            write_poly(f, &self.num)?;
            f.write_str(")")?;
        } else {
            write_poly(f, &self.num)?;
        }
        f.write_str("/(")?;
        for (k, (a, e)) in self.den.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if a.len() > 1 {
                f.write_str("(")?;
                write_poly(f, a)?;
                f.write_str(")")?;
            } else {
                write_poly(f, a)?;
            }
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(sym: Symbol) -> Expr {
        Expr::sym(sym)
    }

    #[test]
    fn additive_inverse() {
        let x = s(Symbol::x(1));
        assert!((&x + &(-&x)).is_zero());
    }

    #[test]
    fn multiplicative_inverse() {
        let a = s(Symbol::u(&[2])).try_div(&s(Symbol::v(&[1]))).unwrap();
        let b = s(Symbol::v(&[1])).try_div(&s(Symbol::u(&[2]))).unwrap();
        assert_eq!(&a * &b, Expr::one());
    }

    #[test]
    fn division_cancels_linear_factor() {
        let (u2, v1) = (s(Symbol::u(&[2])), s(Symbol::v(&[1])));
        let num = &(&u2 * &u2) - &(&v1 * &v1);
        let q = num.try_div(&(&u2 - &v1)).unwrap();
        assert!(q.is_polynomial());
        assert_eq!(q, &u2 + &v1);
    }

    #[test]
    fn division_by_zero() {
        let z = &s(Symbol::x(1)) - &s(Symbol::x(1));
        assert_eq!(s(Symbol::x(2)).try_div(&z), Err(Error::DivisionByZeroExpr));
    }

    #[test]
    fn formal_derivatives() {
        let (u2, v1) = (s(Symbol::u(&[2])), s(Symbol::v(&[1])));
        assert_eq!((&u2 * &v1).formal_derivative(Symbol::u(&[2])), v1);
        let inv = v1.recip().unwrap();
        let d = inv.formal_derivative(Symbol::v(&[1]));
        assert_eq!(d, -(&v1 * &v1).recip().unwrap());
        let l = s(Symbol::Spectral);
        assert_eq!((&l * &u2).formal_derivative(Symbol::Spectral), u2);
    }

    #[test]
    fn substitution_examples() {
        let l = s(Symbol::Spectral);
        let u2 = s(Symbol::u(&[2]));
        let r = (&u2 * &l).substitute_one(Symbol::Spectral, &s(Symbol::lambda(3))).unwrap();
        assert_eq!(r, &u2 * &s(Symbol::lambda(3)));
        let w12 = s(Symbol::w(&[1, 2]));
        assert_eq!(u2.substitute_one(Symbol::u(&[2]), &w12).unwrap(), w12);
        let v4 = s(Symbol::v(&[4]));
        let e = &(&l - &s(Symbol::lambda(4))) * &v4;
        assert!(e.substitute_one(Symbol::Spectral, &s(Symbol::lambda(4))).unwrap().is_zero());
    }

    #[test]
    fn recursive_binding_rejected() {
        let x = s(Symbol::x(1));
        let e = x.substitute_one(Symbol::x(1), &(&x + &Expr::one()));
        assert!(matches!(e, Err(Error::RecursiveBinding(_))));
    }

    #[test]
    fn lambda_differences_stay_atomic() {
        let l = |i| s(Symbol::lambda(i));
        let b = &(&l(3) - &l(4)) * &(&l(1) - &l(2));
        let inv = b.recip().unwrap();
        assert_eq!(inv.denominator_atoms().len(), 2);
        assert_eq!(&inv * &b, Expr::one());
        // Reversed difference normalizes to the same atom.
        let r = (&l(2) - &l(1)).recip().unwrap();
        assert_eq!(&r + &(&l(1) - &l(2)).recip().unwrap(), Expr::zero());
    }

    #[test]
    fn quotient_rule_on_sum() {
        let x = s(Symbol::x(1));
        let e = (&x * &x).try_div(&(&x + &Expr::one())).unwrap();
        let d = e.formal_derivative(Symbol::x(1));
        // d/dx x^2/(x+1) = (x^2 + 2x)/(x+1)^2
        let expect = (&(&x * &x) + &x.scale(&Rational::from_int(2)))
            .try_div(&(&x + &Expr::one()).pow(2).unwrap())
            .unwrap();
        assert_eq!(d, expect);
    }
}
