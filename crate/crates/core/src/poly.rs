//! Sparse multivariate polynomials with exact rational coefficients.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use smallvec::SmallVec;

use crate::rational::Rational;
use crate::symbol::Symbol;

/// A power product, stored as `(symbol, exponent)` pairs sorted by symbol.
///
/// Ordered graded-lexicographically: total degree first, then the exponent
/// of the earliest symbol decides.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[(Symbol, u16); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(s: Symbol) -> Self {
        Self::power(s, 1)
    }

    pub fn power(s: Symbol, e: u16) -> Self {
        let mut v = SmallVec::new();
        if e > 0 {
            v.push((s, e));
        }
        Monomial(v)
    }

    /// Builds from unsorted pairs, merging repeats.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Symbol, u16)>) -> Self {
        let mut v: SmallVec<[(Symbol, u16); 4]> = pairs.into_iter().filter(|p| p.1 > 0).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: SmallVec<[(Symbol, u16); 4]> = SmallVec::new();
        for (s, e) in v {
            match out.last_mut() {
                Some(last) if last.0 == s => last.1 += e,
                _ => out.push((s, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|p| p.1 as u32).sum()
    }

    pub fn exponent(&self, s: Symbol) -> u16 {
        match self.0.binary_search_by(|p| p.0.cmp(&s)) {
            Ok(i) => self.0[i].1,
            Err(_) => 0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Symbol, u16)> + '_ {
        self.0.iter().copied()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::with_capacity(self.0.len());
        let mut j = 0;
        let b = &other.0;
        for &(s, e) in &self.0 {
            if j < b.len() && b[j].0 < s {
                return None;
            }
            if j < b.len() && b[j].0 == s {
                let f = b[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => continue,
                    Ordering::Greater => out.push((s, e - f)),
                }
            } else {
                out.push((s, e));
            }
        }
        if j < b.len() {
            return None;
        }
        Some(Monomial(out))
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = SmallVec::new();
        let b = &other.0;
        let mut j = 0;
        for &(s, e) in &self.0 {
            while j < b.len() && b[j].0 < s {
                j += 1;
            }
            if j < b.len() && b[j].0 == s {
                out.push((s, e.min(b[j].1)));
            }
        }
        Monomial(out)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let d = self.degree().cmp(&other.degree());
        if d != Ordering::Equal {
            return d;
        }
        let (a, b) = (&self.0, &other.0);
        let mut i = 0;
        while i < a.len() && i < b.len() {
            match a[i].0.cmp(&b[i].0) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match a[i].1.cmp(&b[i].1) {
                    Ordering::Equal => i += 1,
                    o => return o,
                },
            }
        }
        a.len().cmp(&b.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        for (k, (s, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            write!(f, "{s}")?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Terms sorted by decreasing monomial; no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Poly {
    terms: Vec<(Monomial, Rational)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::ONE)
    }

    pub fn constant(c: Rational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly { terms: alloc::vec![(Monomial::one(), c)] }
        }
    }

    pub fn var(s: Symbol) -> Self {
        Self::term(Monomial::var(s), Rational::ONE)
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly { terms: alloc::vec![(m, c)] }
        }
    }

    /// Collects arbitrary terms, combining repeats and dropping zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut v: Vec<(Monomial, Rational)> = terms.into_iter().collect();
        v.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Monomial, Rational)> = Vec::with_capacity(v.len());
        for (m, c) in v {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 = &last.1 + &c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|t| !t.1.is_zero());
        Poly { terms: out }
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::ZERO),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn leading(&self) -> Option<&(Monomial, Rational)> {
        self.terms.first()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map_or(0, |t| t.0.degree())
    }

    pub fn degree_in(&self, s: Symbol) -> u16 {
        self.terms.iter().map(|t| t.0.exponent(s)).max().unwrap_or(0)
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.terms.iter().any(|t| t.0.exponent(s) > 0)
    }

    pub fn contains_where(&self, pred: impl Fn(&Symbol) -> bool) -> bool {
        self.terms.iter().any(|t| t.0.iter().any(|(s, _)| pred(&s)))
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for (m, _) in &self.terms {
            for (s, _) in m.iter() {
                out.insert(s);
            }
        }
        out
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.merge(other, true)
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        let sgn = |c: &Rational| if negate { -c } else { c.clone() };
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((b[j].0.clone(), sgn(&b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|t| (t.0.clone(), sgn(&t.1))));
        Poly { terms: out }
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        Poly { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        // Multiplying by a monomial preserves the term order.
        Poly { terms: self.terms.iter().map(|(n, k)| (n.mul(m), k * c)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        if small.len() == 1 {
            let (m, c) = &small.terms[0];
            return big.mul_term(m, c);
        }
        if small.len() * big.len() <= 4096 {
            let mut acc = Vec::with_capacity(small.len() * big.len());
            for (m, c) in &small.terms {
                for (n, k) in &big.terms {
                    acc.push((m.mul(n), c * k));
                }
            }
            return Poly::from_terms(acc);
        }
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (m, c) in &small.terms {
            for (n, k) in &big.terms {
                let p = c * k;
                match acc.entry(m.mul(n)) {
                    alloc::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(p);
                    }
                    alloc::collections::btree_map::Entry::Occupied(mut e) => {
                        let s = e.get() + &p;
                        if s.is_zero() {
                            e.remove();
                        } else {
                            *e.get_mut() = s;
                        }
                    }
                }
            }
        }
        Poly { terms: acc.into_iter().rev().collect() }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Exact quotient, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (lm, lc) = d.leading()?;
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if d.is_monomial() {
            let mut out = Vec::with_capacity(self.len());
            for (m, c) in &self.terms {
                out.push((m.div(lm)?, c / lc));
            }
            return Some(Poly { terms: out });
        }
        if self.total_degree() < d.total_degree() {
            return None;
        }
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.div(lm)?;
            let qc = rc / lc;
            rem = rem.sub(&d.mul_term(&qm, &qc));
            quot.push((qm, qc));
        }
        Some(Poly { terms: quot })
    }

    /// When `self` is `s - r` with `r` free of `s`, returns `(s, r)`.
    pub fn as_linear_root(&self) -> Option<(Symbol, Poly)> {
        let (m, c) = self.leading()?;
        if !c.is_one() || m.degree() != 1 {
            return None;
        }
        let (s, _) = m.iter().next()?;
        if self.terms[1..].iter().any(|t| t.0.exponent(s) > 0) {
            return None;
        }
        Some((s, Poly { terms: self.terms[1..].to_vec() }.neg()))
    }

    /// Exact quotient by `s - r` (synthetic division in `s`).
    pub fn div_linear_exact(&self, s: Symbol, r: &Poly) -> Option<Poly> {
        let coeffs = self.coefficients_in(s);
        let n = coeffs.len() - 1;
        if n == 0 {
            return if self.is_zero() { Some(Poly::zero()) } else { None };
        }
        let mut q = alloc::vec![Poly::zero(); n];
        q[n - 1] = coeffs[n].clone();
        for k in (1..n).rev() {
            q[k - 1] = coeffs[k].add(&r.mul(&q[k]));
        }
        if !coeffs[0].add(&r.mul(&q[0])).is_zero() {
            return None;
        }
        let mut acc = Vec::new();
        for (k, qk) in q.into_iter().enumerate() {
            let sk = Monomial::power(s, k as u16);
            for (m, c) in qk.terms {
                acc.push((m.mul(&sk), c));
            }
        }
        Some(Poly::from_terms(acc))
    }

    /// Greatest common monomial divisor of all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else {
            return Monomial::one();
        };
        let mut g = first.clone();
        for (m, _) in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    /// Divides by the leading coefficient; returns it with the monic part.
    pub fn make_monic(&self) -> (Rational, Poly) {
        match self.leading() {
            None => (Rational::ONE, Poly::zero()),
            Some((_, lc)) => {
                let lc = lc.clone();
                (lc.clone(), self.scale(&lc.recip()))
            }
        }
    }

    pub fn derivative(&self, s: Symbol) -> Poly {
        let mut out = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exponent(s);
            if e == 0 {
                continue;
            }
            let dm = m.div(&Monomial::var(s)).expect("exponent is positive");
            out.push((dm, c * &Rational::from_int(e as i64)));
        }
        Poly::from_terms(out)
    }

    /// Substitutes polynomials for symbols (simultaneously).
    pub fn substitute(&self, bindings: &BTreeMap<Symbol, Poly>) -> Poly {
        let mut acc = Vec::new();
        let mut cache: BTreeMap<(Symbol, u16), Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut kept = Vec::new();
            let mut factor = Poly::constant(c.clone());
            for (s, e) in m.iter() {
                match bindings.get(&s) {
                    Some(p) => {
                        let pw = cache.entry((s, e)).or_insert_with(|| p.pow(e as u32)).clone();
                        factor = factor.mul(&pw);
                    }
                    None => kept.push((s, e)),
                }
            }
            let km = Monomial::from_pairs(kept);
            for (n, k) in factor.terms {
                acc.push((n.mul(&km), k));
            }
        }
        Poly::from_terms(acc)
    }

    /// Collects by powers of `s`: entry `k` is the coefficient of `s^k`.
    pub fn coefficients_in(&self, s: Symbol) -> Vec<Poly> {
        let deg = self.degree_in(s) as usize;
        let mut buckets: Vec<Vec<(Monomial, Rational)>> = alloc::vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let e = m.exponent(s);
            let rest = if e == 0 { m.clone() } else { m.div(&Monomial::power(s, e)).expect("divides") };
            buckets[e as usize].push((rest, c.clone()));
        }
        buckets.into_iter().map(Poly::from_terms).collect()
    }

    pub fn map_coefficients(&self, f: impl Fn(&Rational) -> Rational) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}*{m:?}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: u8) -> Poly {
        Poly::var(Symbol::x(i))
    }

    #[test]
    fn grlex_leading_term() {
        let p = x(2).add(&x(1).mul(&x(3))).add(&x(1));
        assert_eq!(p.leading().unwrap().0, Monomial::from_pairs([(Symbol::x(1), 1), (Symbol::x(3), 1)]));
        let q = x(2).add(&x(1));
        assert_eq!(q.leading().unwrap().0, Monomial::var(Symbol::x(1)));
    }

    #[test]
    fn exact_division() {
        let a = x(1).add(&x(2));
        let b = x(1).sub(&x(3)).add(&Poly::one());
        let p = a.mul(&b);
        assert_eq!(p.div_exact(&a).unwrap(), b);
        assert_eq!(p.div_exact(&b).unwrap(), a);
        assert!(p.add(&Poly::one()).div_exact(&a).is_none());
    }

    #[test]
    fn synthetic_division() {
        let a = x(1).sub(&x(2));
        let (s, r) = a.as_linear_root().unwrap();
        assert_eq!(s, Symbol::x(1));
        let b = x(1).mul(&x(1)).add(&x(3)).add(&x(2).mul(&x(4)));
        let p = a.mul(&b);
        assert_eq!(p.div_linear_exact(s, &r).unwrap(), b);
        assert!(p.add(&x(3)).div_linear_exact(s, &r).is_none());
    }

    #[test]
    fn cancellation_to_zero() {
        let p = x(1).mul(&x(2));
        assert!(p.sub(&x(2).mul(&x(1))).is_zero());
    }

    #[test]
    fn monomial_content_and_derivative() {
        let p = x(1).mul(&x(1)).mul(&x(2)).add(&x(1).mul(&x(3)));
        assert_eq!(p.monomial_content(), Monomial::var(Symbol::x(1)));
        let d = p.derivative(Symbol::x(1));
        let expect = x(1).mul(&x(2)).scale(&Rational::from_int(2)).add(&x(3));
        assert_eq!(d, expect);
    }

    #[test]
    fn substitution() {
        let p = x(1).mul(&x(1)).add(&x(2));
        let mut b = BTreeMap::new();
        b.insert(Symbol::x(1), x(3).add(&Poly::one()));
        let r = p.substitute(&b);
        let expect = x(3).mul(&x(3)).add(&x(3).scale(&Rational::from_int(2))).add(&Poly::one()).add(&x(2));
        assert_eq!(r, expect);
    }
}
