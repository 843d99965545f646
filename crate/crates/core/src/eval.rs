//! Numeric evaluation of expressions at a point.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use core::fmt;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::poly::Poly;
use crate::rational::Rational;
use crate::symbol::Symbol;

pub const DEFAULT_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Number {
    Exact(Rational),
    Float(f64),
}

impl Number {
    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Exact(r) => r.to_f64(),
            Number::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Number::Exact(r) => Some(r),
            Number::Float(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Number::Exact(r) => r.is_zero(),
            Number::Float(x) => *x == 0.0,
        }
    }

    fn add(&self, o: &Number) -> Number {
        match (self, o) {
            (Number::Exact(a), Number::Exact(b)) => Number::Exact(a + b),
            _ => Number::Float(self.to_f64() + o.to_f64()),
        }
    }

    fn mul(&self, o: &Number) -> Number {
        match (self, o) {
            (Number::Exact(a), Number::Exact(b)) => Number::Exact(a * b),
            _ => Number::Float(self.to_f64() * o.to_f64()),
        }
    }

    fn div(&self, o: &Number) -> Number {
        match (self, o) {
            (Number::Exact(a), Number::Exact(b)) => Number::Exact(a / b),
            _ => Number::Float(self.to_f64() / o.to_f64()),
        }
    }

    fn pow(&self, e: u16) -> Number {
        match self {
            Number::Exact(r) => Number::Exact(r.pow(e as i32)),
            Number::Float(x) => {
                let mut acc = 1.0;
                for _ in 0..e {
                    acc *= x;
                }
                Number::Float(acc)
            }
        }
    }
}

impl From<Rational> for Number {
    fn from(r: Rational) -> Number {
        Number::Exact(r)
    }
}

impl From<f64> for Number {
    fn from(x: f64) -> Number {
        Number::Float(x)
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Exact(r) => write!(f, "{r}"),
            Number::Float(x) => write!(f, "{x}"),
        }
    }
}

fn abs(x: f64) -> f64 {
    if x < 0.0 {
        -x
    } else {
        x
    }
}

pub fn eval_poly(p: &Poly, point: &BTreeMap<Symbol, Number>) -> Result<Number> {
    let mut acc = Number::Exact(Rational::ZERO);
    for (m, c) in p.terms() {
        let mut t = Number::Exact(c.clone());
        for (s, e) in m.iter() {
            let v = point.get(&s).ok_or_else(|| Error::UnboundSymbol(s.to_string()))?;
            t = t.mul(&v.pow(e));
        }
        acc = acc.add(&t);
    }
    Ok(acc)
}

/// Evaluates `e`; fails when a symbol is unbound or the denominator is
/// within `threshold` of zero.
pub fn eval_with(e: &Expr, point: &BTreeMap<Symbol, Number>, threshold: f64) -> Result<Number> {
    let mut den = Number::Exact(Rational::ONE);
    for (a, k) in e.denominator_atoms() {
        let v = eval_poly(a, point)?;
        if v.is_zero() || abs(v.to_f64()) <= threshold {
            let mut shown = alloc::string::String::new();
            let _ = fmt::write(&mut shown, format_args!("{} = {}", Expr::from_poly(a.clone()), v));
            return Err(Error::NumericDegeneracy(shown));
        }
        den = den.mul(&v.pow(*k as u16));
    }
    let num = eval_poly(e.numerator(), point)?;
    Ok(num.div(&den))
}

pub fn eval(e: &Expr, point: &BTreeMap<Symbol, Number>) -> Result<Number> {
    eval_with(e, point, DEFAULT_THRESHOLD)
}

/// Exact evaluation at a rational point.
pub fn eval_exact(e: &Expr, point: &BTreeMap<Symbol, Rational>) -> Result<Rational> {
    let p: BTreeMap<Symbol, Number> = point.iter().map(|(k, v)| (*k, Number::Exact(v.clone()))).collect();
    match eval(e, &p)? {
        Number::Exact(r) => Ok(r),
        Number::Float(_) => unreachable!("rational inputs give rational output"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn lambdas(vals: [i64; 4]) -> BTreeMap<Symbol, Number> {
        (1..=4u8).map(|i| (Symbol::lambda(i), Number::Exact(Rational::from_int(vals[i as usize - 1])))).collect()
    }

    #[test]
    fn coefficient_at_standard_lambdas() {
        let e = parse("(l2-l4)*(l1-l3)").unwrap();
        assert_eq!(eval(&e, &lambdas([0, 1, 2, 3])).unwrap(), Number::Exact(Rational::from_int(4)));
    }

    #[test]
    fn ratio_of_jets() {
        let e = parse("u_2/u_4").unwrap();
        let mut p = BTreeMap::new();
        p.insert(Symbol::u(&[2]), Number::Exact(Rational::ONE));
        p.insert(Symbol::u(&[4]), Number::Exact(Rational::ONE));
        assert_eq!(eval(&e, &p).unwrap(), Number::Exact(Rational::ONE));
    }

    #[test]
    fn degeneracy_and_unbound() {
        let e = parse("1/v_1").unwrap();
        let mut p = BTreeMap::new();
        p.insert(Symbol::v(&[1]), Number::Exact(Rational::ZERO));
        assert!(matches!(eval(&e, &p), Err(Error::NumericDegeneracy(_))));
        p.insert(Symbol::v(&[1]), Number::Float(1e-13));
        assert!(matches!(eval(&e, &p), Err(Error::NumericDegeneracy(_))));
        assert!(matches!(eval(&e, &BTreeMap::new()), Err(Error::UnboundSymbol(_))));
    }

    #[test]
    fn float_inputs_give_float() {
        let e = parse("x1/2").unwrap();
        let mut p = BTreeMap::new();
        p.insert(Symbol::x(1), Number::Float(3.0));
        assert_eq!(eval(&e, &p).unwrap(), Number::Float(1.5));
    }
}
