//! Seeded random inputs for the property suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::{Cotensor, Graded, Kind, Tensor, Word};
use crate::combinatorics::Permutation;
use crate::pair::Pair;
use crate::scalar::{Monomial, Poly, Rational};

/// Deterministic source of random exact inputs.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn range(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.gen_range(lo..=hi_inclusive)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    /// Nonzero integer in `[-3, 3]`, occasionally halved.
    pub fn rational(&mut self) -> Rational {
        let mut n: i64 = self.rng.gen_range(1..=3);
        if self.rng.gen_bool(0.5) {
            n = -n;
        }
        if self.rng.gen_bool(0.2) {
            Rational::new(n, 2)
        } else {
            Rational::from(n)
        }
    }

    pub fn monomial(&mut self, nvars: usize, degree: u32) -> Monomial {
        let mut e = vec![0u32; nvars];
        if nvars > 0 {
            for _ in 0..degree {
                let i = self.rng.gen_range(0..nvars);
                e[i] += 1;
            }
        }
        Monomial::new(e)
    }

    /// Random polynomial with at most `terms` terms of degree at most
    /// `max_degree`; constants only when `nvars == 0`. May be zero only if
    /// `terms == 0`.
    pub fn poly(&mut self, nvars: usize, max_degree: u32, terms: usize) -> Poly {
        for _ in 0..16 {
            let mut p = Poly::zero();
            for _ in 0..terms {
                let d = if nvars == 0 {
                    0
                } else {
                    self.rng.gen_range(0..=max_degree)
                };
                let m = self.monomial(nvars, d);
                p.add_term(m, &self.rational());
            }
            if terms == 0 || !p.is_zero() {
                return p;
            }
        }
        Poly::constant(Rational::one())
    }

    /// Homogeneous polynomial of exact total degree `degree`.
    pub fn homogeneous_poly(&mut self, nvars: usize, degree: u32, terms: usize) -> Poly {
        if nvars == 0 {
            return if degree == 0 {
                Poly::constant(self.rational())
            } else {
                Poly::zero()
            };
        }
        for _ in 0..16 {
            let mut p = Poly::zero();
            for _ in 0..terms.max(1) {
                let m = self.monomial(nvars, degree);
                p.add_term(m, &self.rational());
            }
            if !p.is_zero() {
                return p;
            }
        }
        Poly::term(Monomial::new(vec![degree]), Rational::one())
    }

    pub fn word(&mut self, dim: usize, len: usize) -> Word {
        let mut idx: Vec<usize> = (0..dim).collect();
        idx.shuffle(&mut self.rng);
        idx.truncate(len);
        Word::from_indices(&idx).expect("distinct indices").0
    }

    fn graded<K: Kind>(&mut self, pair: &Pair, len: usize, max_degree: u32, terms: usize) -> Graded<K> {
        if len > pair.dim() {
            return Graded::zero();
        }
        for _ in 0..16 {
            let mut g = Graded::<K>::zero();
            for _ in 0..terms.max(1) {
                let w = self.word(pair.dim(), len);
                let c = self.poly(pair.nvars(), max_degree, 2);
                g.add_term(w, &c);
            }
            if !g.is_zero() {
                return g;
            }
        }
        Graded::basis(Word::from_indices(&(0..len).collect::<Vec<_>>()).unwrap().0)
    }

    /// Nonzero homogeneous tensor of word length `len` (zero if `len`
    /// exceeds the rank).
    pub fn tensor(&mut self, pair: &Pair, len: usize, max_degree: u32, terms: usize) -> Tensor {
        self.graded(pair, len, max_degree, terms)
    }

    pub fn cotensor(&mut self, pair: &Pair, len: usize, max_degree: u32, terms: usize) -> Cotensor {
        self.graded(pair, len, max_degree, terms)
    }

    /// Random combination of the given vectors with small integer
    /// coefficients, not all zero.
    pub fn combination(&mut self, basis: &[Vec<Rational>]) -> Option<Vec<Rational>> {
        let dim = basis.first()?.len();
        loop {
            let mut v = vec![Rational::zero(); dim];
            for b in basis {
                let c = Rational::from(self.rng.gen_range(-2i64..=2));
                if c.is_zero() {
                    continue;
                }
                for (x, y) in v.iter_mut().zip(b) {
                    *x += &(y * &c);
                }
            }
            if v.iter().any(|x| !x.is_zero()) {
                return Some(v);
            }
        }
    }

    pub fn permutation(&mut self, k: usize) -> Permutation {
        let mut v: Vec<usize> = (0..k).collect();
        v.shuffle(&mut self.rng);
        Permutation::from_zero_based(v)
    }
}
