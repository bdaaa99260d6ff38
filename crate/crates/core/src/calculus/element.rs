use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::Hash;
use std::marker::PhantomData;
use std::ops::{Add, Neg, Sub};

use super::word::Word;
use crate::scalar::{Poly, Rational};

/// Distinguishes exterior tensors from exterior cotensors at the type level.
pub trait Kind: Clone + Copy + PartialEq + Eq + Hash + Default + fmt::Debug + 'static {
    /// `+1` for tensors, `-1` for cotensors.
    const SIGN: i64;
    /// Basis symbol used when printing.
    const SYMBOL: &'static str;
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Debug)]
pub struct TensorKind;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Debug)]
pub struct CotensorKind;

impl Kind for TensorKind {
    const SIGN: i64 = 1;
    const SYMBOL: &'static str = "e";
}

impl Kind for CotensorKind {
    const SIGN: i64 = -1;
    const SYMBOL: &'static str = "e^";
}

/// A finite sum of basis words with polynomial coefficients.
///
/// Elements are not tied to a pair; the pair operations check that indices
/// and coefficients fit before computing.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graded<K: Kind> {
    terms: BTreeMap<Word, Poly>,
    _kind: PhantomData<K>,
}

pub type Tensor = Graded<TensorKind>;
pub type Cotensor = Graded<CotensorKind>;

impl<K: Kind> Default for Graded<K> {
    fn default() -> Self {
        Graded {
            terms: BTreeMap::new(),
            _kind: PhantomData,
        }
    }
}

impl<K: Kind> Graded<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(word: Word, coeff: Poly) -> Self {
        let mut g = Self::zero();
        g.add_term(word, &coeff);
        g
    }

    pub fn basis(word: Word) -> Self {
        Self::term(word, Poly::one())
    }

    /// The degree-zero element `a`.
    pub fn scalar(a: Poly) -> Self {
        Self::term(Word::EMPTY, a)
    }

    /// Wedge of single basis elements `e_{i_1} ... e_{i_k}` in the given order.
    pub fn from_indices(indices: &[usize], coeff: Poly) -> Self {
        match Word::from_indices(indices) {
            None => Self::zero(),
            Some((w, odd)) => Self::term(w, if odd { -coeff } else { coeff }),
        }
    }

    pub fn from_terms(iter: impl IntoIterator<Item = (Word, Poly)>) -> Self {
        let mut g = Self::zero();
        for (w, c) in iter {
            g.add_term(w, &c);
        }
        g
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Word, &Poly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: Word) -> Poly {
        self.terms.get(&w).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, w: Word, c: &Poly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (w, v) in &other.terms {
            self.add_term(*w, &v.scale(c));
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Graded {
            terms: self
                .terms
                .iter()
                .map(|(w, v)| (*w, v.scale(c)))
                .collect(),
            _kind: PhantomData,
        }
    }

    /// Multiplies every coefficient by `a`.
    pub fn mul_poly(&self, a: &Poly) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, v)| (*w, v * a)))
    }

    pub fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, v)| (*w, f(v))))
    }

    /// Tensor degree of a word: its length for tensors, minus its length
    /// for cotensors.
    pub fn word_degree(w: Word) -> i64 {
        K::SIGN * w.len() as i64
    }

    /// The common tensor degree of all terms. `None` for zero and for
    /// inhomogeneous elements.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|w| w.len());
        let first = it.next()?;
        it.all(|l| l == first)
            .then_some(K::SIGN * first as i64)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    /// Splits by word length.
    pub fn components(&self) -> BTreeMap<usize, Self> {
        let mut out: BTreeMap<usize, Self> = BTreeMap::new();
        for (w, c) in &self.terms {
            out.entry(w.len()).or_default().add_term(*w, c);
        }
        out
    }

    /// Keeps only the terms whose word has length `len`.
    pub fn component(&self, len: usize) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(w, _)| w.len() == len)
                .map(|(w, c)| (*w, c.clone())),
        )
    }

    /// Exterior product; coefficients multiply, words merge with the
    /// sorting sign.
    pub fn wedge(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                if !w1.is_disjoint(*w2) {
                    continue;
                }
                let c = c1 * c2;
                let c = if w1.merge_odd(*w2) { -c } else { c };
                out.add_term(w1.union(*w2), &c);
            }
        }
        out
    }

    /// Largest basis index used plus one.
    pub fn basis_span(&self) -> usize {
        self.terms.keys().map(|w| w.span()).max().unwrap_or(0)
    }

    /// Number of polynomial variables mentioned by the coefficients.
    pub fn variable_span(&self) -> usize {
        self.terms.values().map(Poly::span).max().unwrap_or(0)
    }

    pub fn into_terms(self) -> BTreeMap<Word, Poly> {
        self.terms
    }
}

/// Wedge of a sequence, left to right; the empty wedge is `1`.
pub fn wedge_all<'a, K: Kind>(xs: impl IntoIterator<Item = &'a Graded<K>>) -> Graded<K> {
    xs.into_iter()
        .fold(Graded::scalar(Poly::one()), |acc, x| acc.wedge(x))
}

impl<K: Kind> Add<&Graded<K>> for &Graded<K> {
    type Output = Graded<K>;
    fn add(self, rhs: &Graded<K>) -> Graded<K> {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(*w, c);
        }
        out
    }
}

impl<K: Kind> Add for Graded<K> {
    type Output = Graded<K>;
    fn add(mut self, rhs: Graded<K>) -> Graded<K> {
        for (w, c) in &rhs.terms {
            self.add_term(*w, c);
        }
        self
    }
}

impl<K: Kind> Sub<&Graded<K>> for &Graded<K> {
    type Output = Graded<K>;
    fn sub(self, rhs: &Graded<K>) -> Graded<K> {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(*w, &-c);
        }
        out
    }
}

impl<K: Kind> Sub for Graded<K> {
    type Output = Graded<K>;
    fn sub(self, rhs: Graded<K>) -> Graded<K> {
        &self - &rhs
    }
}

impl<K: Kind> Neg for &Graded<K> {
    type Output = Graded<K>;
    fn neg(self) -> Graded<K> {
        self.scale(&-Rational::one())
    }
}

impl<K: Kind> Neg for Graded<K> {
    type Output = Graded<K>;
    fn neg(self) -> Graded<K> {
        -&self
    }
}

impl<K: Kind> fmt::Display for Graded<K> {
    /// For example `(x1 + 1)*e[1,2] - 3*e[]`, indices 1-based.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let idx: Vec<String> = w.indices().map(|j| (j + 1).to_string()).collect();
            let basis = format!("{}[{}]", K::SYMBOL, idx.join(","));
            let neg = c.terms().next_back().is_some_and(|(_, r)| r.is_negative());
            let mag = if neg { -c } else { c.clone() };
            if i > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            if mag.is_one() {
                write!(f, "{basis}")?;
            } else if mag.len() == 1 {
                write!(f, "{mag}*{basis}")?;
            } else {
                write!(f, "({mag})*{basis}")?;
            }
        }
        Ok(())
    }
}

impl<K: Kind> fmt::Debug for Graded<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    fn v(i: usize) -> Tensor {
        Tensor::basis(Word::single(i))
    }

    #[test]
    fn wedge_rules() {
        assert!(v(0).wedge(&v(0)).is_zero());
        assert_eq!(v(0).wedge(&v(1)), -v(1).wedge(&v(0)));
        let a = v(0).mul_poly(&p("x1"));
        let b = v(1).mul_poly(&p("x2"));
        assert_eq!(a.wedge(&b), Tensor::from_indices(&[0, 1], p("x1*x2")));
    }

    #[test]
    fn degrees() {
        let c = Cotensor::from_indices(&[0, 2], Poly::one());
        assert_eq!(c.homogeneous_degree(), Some(-2));
        assert!((v(0) + Tensor::scalar(Poly::one())).homogeneous_degree().is_none());
        assert!(Tensor::zero().is_homogeneous());
        assert_eq!(Tensor::scalar(p("x1")).homogeneous_degree(), Some(0));
    }

    #[test]
    fn display() {
        let t = Tensor::from_indices(&[1, 0], p("x1 + 1")) + Tensor::scalar(p("-3"));
        assert_eq!(t.to_string(), "-3*e[] - (x1 + 1)*e[1,2]");
        assert_eq!(Cotensor::basis(Word::single(2)).to_string(), "e^[3]");
    }
}
