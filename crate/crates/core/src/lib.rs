//! Exact n-plectic calculus on torsionless Lie-Rinehart pairs.
//!
//! Everything is computed over the rationals. Coefficients live in
//! `Poly`; the constant family only ever uses constant polynomials.

pub mod calculus;
pub mod cohomology;
pub mod combinatorics;
pub mod error;
pub mod io;
pub mod linalg;
pub mod linf;
pub mod nplectic;
pub mod pair;
pub mod random;
pub mod report;
pub mod scalar;
pub mod suite;

pub use calculus::{Cotensor, Tensor, Word};
pub use error::{Error, Result};
pub use nplectic::{ExtensionElement, NPlecticStructure, SymplecticTensor};
pub use pair::{Pair, PairDescriptor};
pub use scalar::{Monomial, Poly, Rational};
