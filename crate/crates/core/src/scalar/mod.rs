//! Exact scalars: rationals and sparse multivariate polynomials.

mod poly;
mod rational;

pub use poly::{Monomial, ParsePolyError, Poly};
pub use rational::{ParseRationalError, Rational};
