//! Dense linear algebra over exact and floating scalars.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::rational::Rational;

pub trait Scalar: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Pivot preference; smaller is better.
    fn weight(&self) -> usize {
        0
    }
}

impl Scalar for Expr {
    fn zero() -> Self {
        Expr::zero()
    }
    fn one() -> Self {
        Expr::one()
    }
    fn is_zero(&self) -> bool {
        Expr::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self.try_div(o).expect("nonzero pivot")
    }
    fn neg(&self) -> Self {
        -self
    }
    fn weight(&self) -> usize {
        self.size()
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Rational::ZERO
    }
    fn one() -> Self {
        Rational::ONE
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn weight(&self) -> usize {
        // Largest magnitude first.
        let a = if *self < 0.0 { -*self } else { *self };
        usize::MAX - (a.to_bits() >> 12) as usize
    }
}

pub type Matrix<T> = Vec<Vec<T>>;

pub fn identity<T: Scalar>(n: usize) -> Matrix<T> {
    (0..n).map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect()
}

pub fn mat_mul<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let (n, m, p) = (a.len(), b.len(), b.first().map_or(0, |r| r.len()));
    let mut out = Vec::with_capacity(n);
    for row in a.iter().take(n) {
        let mut r = Vec::with_capacity(p);
        for j in 0..p {
            let mut acc = T::zero();
            for k in 0..m {
                if !row[k].is_zero() && !b[k][j].is_zero() {
                    acc = acc.add(&row[k].mul(&b[k][j]));
                }
            }
            r.push(acc);
        }
        out.push(r);
    }
    out
}

pub fn mat_vec<T: Scalar>(a: &Matrix<T>, v: &[T]) -> Vec<T> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(T::zero(), |acc, (x, y)| acc.add(&x.mul(y))))
        .collect()
}

pub fn transpose<T: Scalar>(a: &Matrix<T>) -> Matrix<T> {
    let m = a.first().map_or(0, |r| r.len());
    (0..m).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

fn pick_pivot<T: Scalar>(m: &Matrix<T>, col: usize, from: usize) -> Option<usize> {
    (from..m.len()).filter(|&r| !m[r][col].is_zero()).min_by_key(|&r| m[r][col].weight())
}

/// Determinant by elimination.
pub fn det<T: Scalar>(a: &Matrix<T>) -> T {
    let n = a.len();
    let mut m = a.clone();
    let mut d = T::one();
    for c in 0..n {
        let Some(p) = pick_pivot(&m, c, c) else {
            return T::zero();
        };
        if p != c {
            m.swap(p, c);
            d = d.neg();
        }
        let piv = m[c][c].clone();
        d = d.mul(&piv);
        for r in (c + 1)..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c].div(&piv);
            for k in c..n {
                let t = f.mul(&m[c][k]);
                m[r][k] = m[r][k].sub(&t);
            }
        }
    }
    d
}

/// Solves `a x = b` for a square nonsingular `a` and several right-hand
/// sides (columns of `b`).
pub fn solve<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    let n = a.len();
    let mut m = a.clone();
    let mut rhs = b.clone();
    for c in 0..n {
        let p = pick_pivot(&m, c, c).ok_or_else(|| Error::SolveFailure(alloc::string::String::from("singular matrix")))?;
        m.swap(p, c);
        rhs.swap(p, c);
        let piv = m[c][c].clone();
        for r in 0..n {
            if r == c || m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c].div(&piv);
            for k in c..n {
                let t = f.mul(&m[c][k]);
                m[r][k] = m[r][k].sub(&t);
            }
            for k in 0..rhs[r].len() {
                let t = f.mul(&rhs[c][k]);
                rhs[r][k] = rhs[r][k].sub(&t);
            }
        }
    }
    for c in 0..n {
        let piv = m[c][c].clone();
        for x in rhs[c].iter_mut() {
            *x = x.div(&piv);
        }
    }
    Ok(rhs)
}

pub fn inverse<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>> {
    solve(a, &identity(a.len()))
}

/// Inertia `(positive, negative, zero)` of a symmetric rational matrix.
pub fn inertia(a: &Matrix<Rational>) -> (usize, usize, usize) {
    let mut m = a.clone();
    let (mut pos, mut neg) = (0, 0);
    loop {
        let n = m.len();
        if n == 0 {
            break;
        }
        if let Some(i) = (0..n).find(|&i| !m[i][i].is_zero()) {
            let piv = m[i][i].clone();
            if piv.is_negative() {
                neg += 1;
            } else {
                pos += 1;
            }
            m = schur(&m, &[i]);
            continue;
        }
        let Some((i, j)) = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| !m[i][j].is_zero()) else {
            break;
        };
        // A zero-diagonal 2x2 block [[0, a], [a, 0]] has one positive and one negative eigenvalue.
        pos += 1;
        neg += 1;
        m = schur(&m, &[i, j]);
    }
    let zero = a.len() - pos - neg;
    (pos, neg, zero)
}

fn schur(m: &Matrix<Rational>, block: &[usize]) -> Matrix<Rational> {
    let rest: Vec<usize> = (0..m.len()).filter(|i| !block.contains(i)).collect();
    let b: Matrix<Rational> = block.iter().map(|&i| block.iter().map(|&j| m[i][j].clone()).collect()).collect();
    let binv = inverse(&b).expect("nonsingular block");
    let c: Matrix<Rational> = block.iter().map(|&i| rest.iter().map(|&j| m[i][j].clone()).collect()).collect();
    let corr = mat_mul(&transpose(&c), &mat_mul(&binv, &c));
    rest.iter()
        .enumerate()
        .map(|(a, &i)| rest.iter().enumerate().map(|(b2, &j)| &m[i][j] - &corr[a][b2]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn rational_inverse() {
        let a = vec![vec![q(2), q(1)], vec![q(1), q(1)]];
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2));
        assert_eq!(det(&a), q(1));
        let sing = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert!(inverse(&sing).is_err());
        assert!(det(&sing).is_zero());
    }

    #[test]
    fn neutral_inertia() {
        let g = vec![
            vec![q(0), q(0), q(0), q(1)],
            vec![q(0), q(0), q(-1), q(0)],
            vec![q(0), q(-1), q(0), q(0)],
            vec![q(1), q(0), q(0), q(0)],
        ];
        assert_eq!(inertia(&g), (2, 2, 0));
        assert_eq!(inertia(&identity(3)), (3, 0, 0));
    }

    #[test]
    fn symbolic_det() {
        let e = |s: &str| crate::parse::parse(s).unwrap();
        let a = vec![vec![e("x1"), e("x2")], vec![e("x3"), e("x4")]];
        assert_eq!(det(&a), e("x1*x4 - x2*x3"));
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2));
    }
}
