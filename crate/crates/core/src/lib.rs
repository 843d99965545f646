//! Exact jet-space algebra for the two-component extension of the general
//! heavenly equation: rational-function CAS, the PDE system and its
//! normal form, Lax vector fields, the web geometry, and the nonlocal
//! symmetry machinery.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod eval;
pub mod expr;
pub mod geometry;
pub mod lax;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod rational;
pub mod symbol;
pub mod symmetry;
pub mod sysmodel;

pub use error::{Error, Result};
pub use expr::Expr;
pub use poly::{Monomial, Poly};
pub use rational::Rational;
pub use symbol::{Dep, Family, Jet, Nonlocal, Symbol};
