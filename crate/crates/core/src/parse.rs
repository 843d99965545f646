//! Parser for the expression mini-language.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' '-'? integer)?
//! primary := integer | name | '(' expr ')'
//!          | 'D[' dep ';' index (',' index)* ']'
//!          | ('xi' | 'zeta') '[' integer ',' integer ']' ('_' indices)?
//!          | '@' name
//! name    := x1..x4 | l1..l4 | l | dep ('_' indices)?
//! dep     := u | v | w | U | V
//! ```
//!
//! The printer ([`Expr`]'s `Display`) emits this grammar.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::rational::Rational;
use crate::symbol::{AuxName, Dep, Family, Index2, Nonlocal, Symbol};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn location(&self, pos: usize) -> (usize, usize) {
        let mut line = 1;
        let mut col = 1;
        for &b in &self.src[..pos.min(self.src.len())] {
            if b == b'\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        (line, col)
    }

    fn error_at(&self, pos: usize, msg: impl Into<String>) -> Error {
        let (line, col) = self.location(pos);
        Error::SyntaxError { line, col, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        match self.peek() {
            Some(b) if b == c => {
                self.pos += 1;
                Ok(())
            }
            Some(b) => Err(self.error_at(self.pos, format!("expected `{}`, found `{}`", c as char, b as char))),
            None => Err(self.error_at(self.pos, format!("expected `{}`, found end of input", c as char))),
        }
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error_at(start, "expected an integer"));
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse::<u64>().map_err(|_| self.error_at(start, "integer too large"))
    }

    fn word(&mut self) -> (usize, &'a str) {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        (start, core::str::from_utf8(&self.src[start..self.pos]).expect("ascii word"))
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let rhs = self.unary()?;
                    acc = acc.try_div(&rhs).map_err(|_| self.error_at(at, "division by zero"))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let at = self.pos;
        let e = self.integer()?;
        let e = i32::try_from(e).map_err(|_| self.error_at(at, "exponent too large"))?;
        base.pow(if neg { -e } else { e }).map_err(|_| self.error_at(at, "negative power of zero"))
    }

    fn indices(&mut self, max: u8, at: usize) -> Result<Vec<u8>> {
        let start = self.pos;
        let mut out = Vec::new();
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            let d = self.src[self.pos] - b'0';
            if d == 0 || d > max {
                return Err(self.error_at(self.pos, format!("index must be in 1..={max}")));
            }
            out.push(d);
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error_at(at, "expected derivative indices"));
        }
        Ok(out)
    }

    fn primary(&mut self) -> Result<Expr> {
        let Some(c) = self.peek() else {
            return Err(self.error_at(self.pos, "unexpected end of input"));
        };
        let start = self.pos;
        if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(b')')?;
            return Ok(e);
        }
        if c.is_ascii_digit() {
            let n = self.integer()?;
            if matches!(self.src.get(self.pos), Some(b'.') | Some(b'e') | Some(b'E')) {
                return Err(self.error_at(self.pos, "floating-point literals are not allowed"));
            }
            let n = i64::try_from(n).map_err(|_| self.error_at(start, "integer too large"))?;
            return Ok(Expr::int(n));
        }
        if c == b'@' {
            self.pos += 1;
            let (at, name) = self.word();
            let aux = AuxName::new(name).ok_or_else(|| self.error_at(at, "invalid auxiliary name"))?;
            return Ok(Expr::sym(Symbol::Aux(aux)));
        }
        if !c.is_ascii_alphabetic() {
            return Err(self.error_at(start, format!("unexpected character `{}`", c as char)));
        }
        let (at, w) = self.word();
        match w {
            "D" => self.d_form(),
            "xi" => self.nonlocal(Family::Xi),
            "zeta" => self.nonlocal(Family::Zeta),
            "l" => Ok(Expr::sym(Symbol::Spectral)),
            _ => symbol_from_word(w).map(Expr::sym).ok_or_else(|| {
                let _ = at;
                Error::UnknownSymbol(w.to_string())
            }),
        }
    }

    fn d_form(&mut self) -> Result<Expr> {
        self.expect(b'[')?;
        let (at, dep) = self.word();
        let dep = Dep::from_name(dep).ok_or_else(|| Error::UnknownSymbol(dep.to_string()))?;
        let _ = at;
        self.expect(b';')?;
        let mut idx = Vec::new();
        loop {
            let at = self.pos;
            let i = self.integer()?;
            if !(1..=4).contains(&i) {
                return Err(self.error_at(at, "index must be in 1..=4"));
            }
            idx.push(i as u8);
            match self.peek() {
                Some(b',') => self.pos += 1,
                _ => break,
            }
        }
        self.expect(b']')?;
        Ok(Expr::sym(Symbol::jet(dep, &idx)))
    }

    fn nonlocal(&mut self, family: Family) -> Result<Expr> {
        self.expect(b'[')?;
        let at = self.pos;
        let r = self.integer()?;
        let r = u16::try_from(r).map_err(|_| self.error_at(at, "level too large"))?;
        self.expect(b',')?;
        let at = self.pos;
        let j = self.integer()?;
        if j != 1 && j != 2 {
            return Err(self.error_at(at, "nonlocal component must be 1 or 2"));
        }
        self.expect(b']')?;
        let mut n = Nonlocal::new(family, r, j as u8);
        if self.src.get(self.pos) == Some(&b'_') {
            self.pos += 1;
            let at = self.pos;
            n.prolong = Index2::from_indices(&self.indices(2, at)?);
        }
        Ok(Expr::sym(Symbol::Nonlocal(n)))
    }
}

/// Interprets a bare identifier such as `x3`, `l2`, `u` or `v_134`.
pub fn symbol_from_word(w: &str) -> Option<Symbol> {
    let b = w.as_bytes();
    if b.len() == 2 && (b[0] == b'x' || b[0] == b'l') && (b'1'..=b'4').contains(&b[1]) {
        let i = b[1] - b'0';
        return Some(if b[0] == b'x' { Symbol::x(i) } else { Symbol::lambda(i) });
    }
    let (head, tail) = match w.split_once('_') {
        Some((h, t)) => (h, Some(t)),
        None => (w, None),
    };
    let dep = Dep::from_name(head)?;
    let idx: Vec<u8> = match tail {
        None => Vec::new(),
        Some(t) => {
            if t.is_empty() || !t.bytes().all(|c| (b'1'..=b'4').contains(&c)) {
                return None;
            }
            t.bytes().map(|c| c - b'0').collect()
        }
    };
    Some(Symbol::jet(dep, &idx))
}

pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    if let Some(c) = p.peek() {
        return Err(p.error_at(p.pos, format!("unexpected `{}`", c as char)));
    }
    Ok(e)
}

/// Parses a rational literal `p`, `-p` or `p/q`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    text.trim()
        .parse::<Rational>()
        .map_err(|e| Error::SyntaxError { line: 1, col: 1, msg: e.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn cancelling_input_is_zero() {
        assert!(parse("u_2*v_1 - v_1*u_2").unwrap().is_zero());
    }

    #[test]
    fn d_alias() {
        let e = parse("(l1-l2)*D[u;2]").unwrap();
        let expect = &(&Expr::sym(Symbol::lambda(1)) - &Expr::sym(Symbol::lambda(2))) * &Expr::sym(Symbol::u(&[2]));
        assert_eq!(e, expect);
        assert_eq!(parse("D[v;4,3,1]").unwrap().as_symbol(), Some(Symbol::v(&[1, 3, 4])));
    }

    #[test]
    fn nonlocal_naming() {
        let e = parse("xi[0,1]_12").unwrap();
        let n = Nonlocal::new(Family::Xi, 0, 1).prolonged(1).prolonged(2);
        assert_eq!(e.as_symbol(), Some(Symbol::Nonlocal(n)));
    }

    #[test]
    fn jets_sorted_on_parse() {
        assert_eq!(parse("u_432").unwrap().as_symbol(), Some(Symbol::u(&[2, 3, 4])));
    }

    #[test]
    fn errors_carry_position() {
        match parse("u_2 +\n  * v_1") {
            Err(Error::SyntaxError { line, col, .. }) => assert_eq!((line, col), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("q_1"), Err(Error::UnknownSymbol(_))));
        assert!(matches!(parse("1.5*x1"), Err(Error::SyntaxError { .. })));
    }

    #[test]
    fn print_round_trip() {
        let src = "(3/2*x1^2 - u_23*v_1)/((l1 - l2)*u_2^2) + @eps*zeta[1,2]_1 - 1/7";
        let e = parse(src).unwrap();
        let printed = e.to_string();
        assert_eq!(parse(&printed).unwrap(), e);
        assert_eq!(parse(&printed).unwrap().to_string(), printed);
    }
}
