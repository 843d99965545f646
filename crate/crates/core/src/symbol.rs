//! Symbols of the jet space.
//!
//! Every symbol is a small `Copy` value whose derived ordering is the
//! canonical variable order used by polynomials and the printer:
//! independent variables, lambda constants, the spectral parameter, jets
//! (by dependent variable, then derivative order, then index sequence),
//! nonlocal variables and finally auxiliary names.

use alloc::vec::Vec;
use core::fmt;

/// Dependent variables. `DeltaU`/`DeltaV` are the placeholder directions
/// `U`, `V` of the linearized system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dep {
    U,
    V,
    W,
    DeltaU,
    DeltaV,
}

impl Dep {
    pub fn name(self) -> &'static str {
        match self {
            Dep::U => "u",
            Dep::V => "v",
            Dep::W => "w",
            Dep::DeltaU => "U",
            Dep::DeltaV => "V",
        }
    }

    pub fn from_name(s: &str) -> Option<Dep> {
        Some(match s {
            "u" => Dep::U,
            "v" => Dep::V,
            "w" => Dep::W,
            "U" => Dep::DeltaU,
            "V" => Dep::DeltaV,
            _ => return None,
        })
    }
}

/// A multiset over `{1, ..., N}` stored as inverted counts so that the
/// derived order is "by size, then lexicographic on the sorted sequence".
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex<const N: usize> {
    len: u8,
    inv: [u8; N],
}

pub type Index4 = MultiIndex<4>;
pub type Index2 = MultiIndex<2>;

impl<const N: usize> MultiIndex<N> {
    pub const EMPTY: Self = MultiIndex { len: 0, inv: [u8::MAX; N] };

    pub fn from_counts(counts: [u8; N]) -> Self {
        let mut inv = [0u8; N];
        let mut len = 0u8;
        for (slot, c) in inv.iter_mut().zip(counts) {
            *slot = u8::MAX - c;
            len += c;
        }
        MultiIndex { len, inv }
    }

    /// Indices are 1-based; panics when out of range.
    pub fn from_indices(indices: &[u8]) -> Self {
        let mut counts = [0u8; N];
        for &i in indices {
            assert!(i >= 1 && i as usize <= N, "index {i} out of range 1..={N}");
            counts[i as usize - 1] += 1;
        }
        Self::from_counts(counts)
    }

    pub fn counts(&self) -> [u8; N] {
        let mut c = [0u8; N];
        for (slot, inv) in c.iter_mut().zip(self.inv) {
            *slot = u8::MAX - inv;
        }
        c
    }

    pub fn count(&self, i: u8) -> u8 {
        u8::MAX - self.inv[i as usize - 1]
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn with(&self, i: u8) -> Self {
        let mut c = self.counts();
        c[i as usize - 1] += 1;
        Self::from_counts(c)
    }

    pub fn without(&self, i: u8) -> Option<Self> {
        let mut c = self.counts();
        let slot = &mut c[i as usize - 1];
        if *slot == 0 {
            return None;
        }
        *slot -= 1;
        Some(Self::from_counts(c))
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut c = self.counts();
        for (a, b) in c.iter_mut().zip(other.counts()) {
            *a += b;
        }
        Self::from_counts(c)
    }

    /// Sorted index sequence.
    pub fn indices(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len());
        for (i, c) in self.counts().iter().enumerate() {
            for _ in 0..*c {
                out.push(i as u8 + 1);
            }
        }
        out
    }
}

impl<const N: usize> fmt::Debug for MultiIndex<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for i in self.indices() {
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Jet {
    pub dep: Dep,
    pub index: Index4,
}

/// Nonlocal variable families: `Xi` is the adjoint-Lax hierarchy, `Zeta`
/// carries the recursion-operator variables (level = application number).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Xi,
    Zeta,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Xi => "xi",
            Family::Zeta => "zeta",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Nonlocal {
    pub family: Family,
    pub level: u16,
    /// 1 or 2.
    pub comp: u8,
    /// Free prolongation along x^1, x^2.
    pub prolong: Index2,
}

impl Nonlocal {
    pub fn new(family: Family, level: u16, comp: u8) -> Self {
        assert!(comp == 1 || comp == 2, "nonlocal component must be 1 or 2");
        Nonlocal { family, level, comp, prolong: Index2::EMPTY }
    }

    pub fn base(&self) -> Nonlocal {
        Nonlocal { prolong: Index2::EMPTY, ..*self }
    }

    pub fn prolonged(&self, i: u8) -> Nonlocal {
        Nonlocal { prolong: self.prolong.with(i), ..*self }
    }
}

const AUX_CAP: usize = 14;

/// Short ASCII name of an auxiliary symbol.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AuxName {
    bytes: [u8; AUX_CAP],
    len: u8,
}

impl AuxName {
    /// Names are 1 to 14 ASCII alphanumerics or underscores.
    pub fn new(name: &str) -> Option<Self> {
        let b = name.as_bytes();
        if b.is_empty() || b.len() > AUX_CAP {
            return None;
        }
        if !b.iter().all(|c| c.is_ascii_alphanumeric() || *c == b'_') {
            return None;
        }
        let mut bytes = [0u8; AUX_CAP];
        bytes[..b.len()].copy_from_slice(b);
        Some(AuxName { bytes, len: b.len() as u8 })
    }

    pub fn as_str(&self) -> &str {
        core::str::from_utf8(&self.bytes[..self.len as usize]).unwrap_or("?")
    }
}

impl fmt::Debug for AuxName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    /// x^i, i in 1..=4.
    Indep(u8),
    /// lambda_i, i in 1..=4.
    LambdaConst(u8),
    /// Spectral parameter lambda.
    Spectral,
    Jet(Jet),
    Nonlocal(Nonlocal),
    Aux(AuxName),
}

impl Symbol {
    pub fn x(i: u8) -> Symbol {
        assert!((1..=4).contains(&i));
        Symbol::Indep(i)
    }

    pub fn lambda(i: u8) -> Symbol {
        assert!((1..=4).contains(&i));
        Symbol::LambdaConst(i)
    }

    pub fn jet(dep: Dep, indices: &[u8]) -> Symbol {
        Symbol::Jet(Jet { dep, index: Index4::from_indices(indices) })
    }

    pub fn u(indices: &[u8]) -> Symbol {
        Self::jet(Dep::U, indices)
    }

    pub fn v(indices: &[u8]) -> Symbol {
        Self::jet(Dep::V, indices)
    }

    pub fn w(indices: &[u8]) -> Symbol {
        Self::jet(Dep::W, indices)
    }

    pub fn xi(level: u16, comp: u8) -> Symbol {
        Symbol::Nonlocal(Nonlocal::new(Family::Xi, level, comp))
    }

    pub fn zeta(level: u16, comp: u8) -> Symbol {
        Symbol::Nonlocal(Nonlocal::new(Family::Zeta, level, comp))
    }

    /// Panics on an invalid name; see [`AuxName::new`].
    pub fn aux(name: &str) -> Symbol {
        Symbol::Aux(AuxName::new(name).expect("invalid auxiliary symbol name"))
    }

    pub fn as_jet(&self) -> Option<Jet> {
        match self {
            Symbol::Jet(j) => Some(*j),
            _ => None,
        }
    }

    pub fn as_nonlocal(&self) -> Option<Nonlocal> {
        match self {
            Symbol::Nonlocal(n) => Some(*n),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Indep(i) => write!(f, "x{i}"),
            Symbol::LambdaConst(i) => write!(f, "l{i}"),
            Symbol::Spectral => f.write_str("l"),
            Symbol::Jet(j) => {
                f.write_str(j.dep.name())?;
                if !j.index.is_empty() {
                    f.write_str("_")?;
                    for i in j.index.indices() {
                        write!(f, "{i}")?;
                    }
                }
                Ok(())
            }
            Symbol::Nonlocal(n) => {
                write!(f, "{}[{},{}]", n.family.name(), n.level, n.comp)?;
                if !n.prolong.is_empty() {
                    f.write_str("_")?;
                    for i in n.prolong.indices() {
                        write!(f, "{i}")?;
                    }
                }
                Ok(())
            }
            Symbol::Aux(a) => write!(f, "@{}", a.as_str()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn class_order() {
        let mut v = vec![
            Symbol::aux("eps"),
            Symbol::xi(0, 1),
            Symbol::u(&[3, 4]),
            Symbol::Spectral,
            Symbol::lambda(2),
            Symbol::x(3),
        ];
        v.sort();
        let s: Vec<_> = v.iter().map(|s| s.to_string()).collect();
        assert_eq!(s, ["x3", "l2", "l", "u_34", "xi[0,1]", "@eps"]);
    }

    #[test]
    fn jet_order_by_dep_then_length_then_lex() {
        let mut v = vec![
            Symbol::v(&[1]),
            Symbol::u(&[2, 3]),
            Symbol::u(&[4]),
            Symbol::u(&[1, 3]),
            Symbol::u(&[]),
            Symbol::u(&[1, 2]),
            Symbol::u(&[2, 2]),
        ];
        v.sort();
        let s: Vec<_> = v.iter().map(|s| s.to_string()).collect();
        assert_eq!(s, ["u", "u_4", "u_12", "u_13", "u_22", "u_23", "v_1"]);
    }

    #[test]
    fn index_canonical() {
        assert_eq!(Symbol::u(&[4, 3, 2]), Symbol::u(&[2, 3, 4]));
        let i = Index4::from_indices(&[3, 4, 3]);
        assert_eq!(i.indices(), vec![3, 3, 4]);
        assert_eq!(i.without(3).unwrap().indices(), vec![3, 4]);
        assert!(i.without(1).is_none());
    }

    #[test]
    fn nonlocal_display() {
        let n = Nonlocal::new(Family::Xi, 0, 1).prolonged(2).prolonged(1);
        assert_eq!(Symbol::Nonlocal(n).to_string(), "xi[0,1]_12");
    }
}
