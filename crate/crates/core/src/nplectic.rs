//! n-plectic structures, symplectic tensors and the extension algebra.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::calculus::{contract_unchecked, wedge_all, Cotensor, Tensor, Word, DEFAULT_ARITY_CAP};
use crate::cohomology::{bigraded_parts, d_map, Slice};
use crate::combinatorics::{bell, enumerate_shuffles_with_cap, koszul_odd};
use crate::error::{Error, Result};
use crate::linalg::Rref;
use crate::pair::Pair;
use crate::scalar::Rational;

/// A pair together with a closed cotensor `omega` of tensor degree `-(n+1)`.
pub struct NPlecticStructure {
    pair: Arc<Pair>,
    n: usize,
    omega: Cotensor,
    omega_poly_degree: Option<u32>,
    arity_cap: usize,
    cache: Mutex<HashMap<(u8, i64, i64), Arc<Rref>>>,
}

impl Clone for NPlecticStructure {
    fn clone(&self) -> Self {
        NPlecticStructure {
            pair: self.pair.clone(),
            n: self.n,
            omega: self.omega.clone(),
            omega_poly_degree: self.omega_poly_degree,
            arity_cap: self.arity_cap,
            cache: Mutex::new(self.cache.lock().expect("cache lock").clone()),
        }
    }
}

impl fmt::Debug for NPlecticStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NPlecticStructure")
            .field("pair", &self.pair.family_name())
            .field("n", &self.n)
            .field("omega", &self.omega)
            .finish()
    }
}

impl NPlecticStructure {
    pub fn new(pair: impl Into<Arc<Pair>>, n: usize, omega: Cotensor) -> Result<Self> {
        let pair = pair.into();
        if n == 0 {
            return Err(Error::Argument("n must be at least 1".into()));
        }
        pair.check(&omega)?;
        let expected = -(n as i64 + 1);
        if !omega.is_zero() && omega.homogeneous_degree() != Some(expected) {
            let found: Vec<String> = omega.components().keys().map(|l| (-(*l as i64)).to_string()).collect();
            return Err(Error::WrongDegree {
                expected,
                found: found.join(", "),
            });
        }
        let d_omega = pair.d(&omega);
        if !d_omega.is_zero() {
            return Err(Error::NotClosed {
                witness: d_omega.to_string(),
            });
        }
        let omega_poly_degree = {
            let mut degrees = omega.terms().flat_map(|(_, c)| c.terms().map(|(m, _)| m.degree()));
            let first = degrees.next().unwrap_or(0);
            degrees.all(|d| d == first).then_some(first)
        };
        Ok(NPlecticStructure {
            pair,
            n,
            omega,
            omega_poly_degree,
            arity_cap: DEFAULT_ARITY_CAP,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// `dx ^ dy` on the polynomial pair in two variables, `n = 1`.
    pub fn symplectic_plane() -> Self {
        let pair = Pair::poly(2).expect("two variables");
        let omega = Cotensor::basis(Word::from_bits(0b11));
        NPlecticStructure::new(pair, 1, omega).expect("closed 2-form")
    }

    /// The invariant volume form `e^{123}` on su(2), `n = 2`.
    pub fn su2_cartan() -> Self {
        let omega = Cotensor::basis(Word::from_bits(0b111));
        NPlecticStructure::new(Pair::su2(), 2, omega).expect("closed 3-form")
    }

    pub fn with_arity_cap(mut self, cap: usize) -> Self {
        self.arity_cap = cap;
        self
    }

    pub fn pair(&self) -> &Pair {
        &self.pair
    }

    pub fn shared_pair(&self) -> Arc<Pair> {
        self.pair.clone()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn omega(&self) -> &Cotensor {
        &self.omega
    }

    /// Common coefficient degree of `omega`, if it has one.
    pub fn omega_poly_degree(&self) -> Option<u32> {
        self.omega_poly_degree
    }

    pub fn arity_cap(&self) -> usize {
        self.arity_cap
    }

    pub(crate) fn cache_get(&self, kind: u8, a: i64, b: i64) -> Option<Arc<Rref>> {
        self.cache.lock().expect("cache lock").get(&(kind, a, b)).cloned()
    }

    pub(crate) fn cache_put(&self, kind: u8, a: i64, b: i64, v: Arc<Rref>) -> Arc<Rref> {
        self.cache
            .lock()
            .expect("cache lock")
            .entry((kind, a, b))
            .or_insert(v)
            .clone()
    }

    pub fn contract_omega(&self, x: &Tensor) -> Result<Cotensor> {
        self.pair.check(x)?;
        Ok(contract_unchecked(x, &self.omega))
    }

    /// `d(i_x omega)`, which vanishes exactly for symplectic tensors.
    pub fn symplectic_defect(&self, x: &Tensor) -> Result<Cotensor> {
        Ok(self.pair.d(&self.contract_omega(x)?))
    }

    pub fn is_symplectic(&self, x: &Tensor) -> Result<bool> {
        Ok(self.symplectic_defect(x)?.is_zero())
    }

    fn require_symplectic(&self, x: &Tensor) -> Result<()> {
        let w = self.symplectic_defect(x)?;
        if w.is_zero() {
            Ok(())
        } else {
            Err(Error::NotSymplectic { witness: w.to_string() })
        }
    }

    /// Wraps a symplectic tensor, reducing it modulo `ker(omega)`.
    pub fn symplectic(&self, x: &Tensor) -> Result<SymplecticTensor> {
        self.require_symplectic(x)?;
        Ok(SymplecticTensor {
            representative: self.canonical_tensor(x)?,
        })
    }

    pub fn in_kernel(&self, x: &Tensor) -> Result<bool> {
        Ok(self.contract_omega(x)?.is_zero())
    }

    /// Some `f` with `df = i_x omega`, or `None` when `x` is symplectic but
    /// not Hamiltonian. The closed part of the answer is not normalized.
    pub fn hamiltonian_potential(&self, x: &Tensor) -> Result<Option<Cotensor>> {
        self.require_symplectic(x)?;
        let g = contract_unchecked(x, &self.omega);
        let mut f = Cotensor::zero();
        for ((t, p), part) in bigraded_parts(&g) {
            let (t, p) = (t as i64, p as i64);
            let source_degree = if self.pair.is_poly() { p + 1 } else { 0 };
            let m = d_map(&self.pair, t - 1, source_degree)?;
            match m.matrix.solve(&m.target.coords(&part)?) {
                Some(v) => f = f + m.sources[0].element(&v),
                None => return Ok(None),
            }
        }
        debug_assert_eq!(self.pair.d(&f), g);
        Ok(Some(f))
    }

    /// Basis of `ker(omega)` among tensors of degree `k` whose coefficients
    /// are homogeneous of degree `poly_degree` (always 0 for the constant
    /// family).
    pub fn kernel_basis(&self, k: i64, poly_degree: i64) -> Result<Vec<Tensor>> {
        let slice = Slice::tensors(&self.pair, k, poly_degree);
        Ok(self
            .kernel_space(k, poly_degree)?
            .rows
            .iter()
            .map(|v| slice.element(v))
            .collect())
    }

    /// Both sides of `i_{[x_1..x_k]_k} omega = d i_{x_k ^ .. ^ x_1} omega`.
    pub fn fundamental_pairing_sides(&self, xs: &[Tensor]) -> Result<(Cotensor, Cotensor)> {
        if xs.len() < 2 {
            return Err(Error::Argument("fundamental pairing needs at least two tensors".into()));
        }
        for x in xs {
            self.require_symplectic(x)?;
        }
        let bracket = self.pair.higher_bracket_with_cap(xs, self.arity_cap)?;
        let lhs = contract_unchecked(&bracket, &self.omega);
        let rhs = self.pair.d(&contract_unchecked(&wedge_all(xs.iter().rev()), &self.omega));
        Ok((lhs, rhs))
    }

    pub fn fundamental_pairing_check(&self, xs: &[Tensor]) -> Result<bool> {
        let (lhs, rhs) = self.fundamental_pairing_sides(xs)?;
        Ok(lhs == rhs)
    }

    /// Builds an extension element, checking that the tensor is symplectic
    /// and reducing it modulo the kernel.
    pub fn extension_element(&self, potential: Cotensor, tensor: &Tensor) -> Result<ExtensionElement> {
        self.pair.check(&potential)?;
        let x = self.symplectic(tensor)?;
        Ok(ExtensionElement::new(potential, x.representative))
    }

    /// `d_omega(f, x) = (i_x omega - df, 0)`.
    pub fn d_omega(&self, e: &ExtensionElement) -> Result<ExtensionElement> {
        self.pair.check(&e.potential)?;
        let f = &self.contract_omega(&e.tensor)? - &self.pair.d(&e.potential);
        Ok(ExtensionElement::new(f, Tensor::zero()))
    }

    /// `(B_{k-1} i_{x_k ^ .. ^ x_1} omega, [x_1..x_k]_k)` for `k >= 2`, with
    /// the tensor slot reduced modulo the kernel.
    pub fn extension_bracket(&self, es: &[ExtensionElement]) -> Result<ExtensionElement> {
        let k = es.len();
        if k < 2 {
            return Err(Error::Argument("extension brackets start at arity 2".into()));
        }
        if k > self.arity_cap {
            return Err(Error::ResourceLimit(format!(
                "extension bracket arity {k} exceeds the arity cap {}",
                self.arity_cap
            )));
        }
        let xs: Vec<Tensor> = es.iter().map(|e| e.tensor.clone()).collect();
        if xs.iter().any(Tensor::is_zero) {
            return Ok(ExtensionElement::zero());
        }
        for x in &xs {
            self.pair.check(x)?;
        }
        let b = Rational::from(bell(k - 1)?);
        let potential = contract_unchecked(&wedge_all(xs.iter().rev()), &self.omega).scale(&b);
        let tensor = self.canonical_tensor(&self.pair.higher_bracket_with_cap(&xs, self.arity_cap)?)?;
        Ok(ExtensionElement::new(potential, tensor))
    }

    /// `D_1 = d_omega` and `D_k` the extension brackets.
    pub fn extension_operation(&self, es: &[ExtensionElement]) -> Result<ExtensionElement> {
        match es {
            [] => Err(Error::Argument("operations need at least one argument".into())),
            [e] => self.d_omega(e),
            _ => self.extension_bracket(es),
        }
    }

    /// Weak Jacobi sum of the extension algebra at arity `es.len()`, with the
    /// tensor slot reduced modulo the kernel.
    pub fn extension_jacobi_check(&self, es: &[ExtensionElement]) -> Result<ExtensionJacobiReport> {
        let n = es.len();
        if n == 0 {
            return Err(Error::Argument("Jacobi sums need at least one argument".into()));
        }
        let degs = es
            .iter()
            .map(|e| {
                e.shifted_degree(self.n)
                    .ok_or_else(|| Error::NotHomogeneous(format!("extension element {e}")))
            })
            .collect::<Result<Vec<i64>>>()?;
        let mut acc = ExtensionElement::zero();
        for j in 1..=n {
            let sh = enumerate_shuffles_with_cap(&[j, n - j], self.arity_cap.max(n))?;
            for s in sh.iter() {
                let im = s.zero_based();
                let inner_args: Vec<ExtensionElement> = im[..j].iter().map(|&i| es[i].clone()).collect();
                let mut outer = vec![self.extension_operation(&inner_args)?];
                outer.extend(im[j..].iter().map(|&i| es[i].clone()));
                let v = self.extension_operation(&outer)?;
                let c = Rational::from(if koszul_odd(im, &degs) { -1 } else { 1 });
                acc.potential.add_scaled(&v.potential, &c);
                acc.tensor.add_scaled(&v.tensor, &c);
            }
        }
        acc.tensor = self.canonical_tensor(&acc.tensor)?;
        Ok(ExtensionJacobiReport {
            arity: n,
            vanishes: acc.is_zero(),
            residual: acc,
        })
    }

    /// Random homogeneous symplectic tensor of degree `k` with coefficient
    /// degree at most `max_poly` (0 for the constant family), or zero when
    /// none exists.
    pub fn random_symplectic(&self, s: &mut crate::random::Sampler, k: i64, max_poly: i64) -> Result<Tensor> {
        let top = if self.pair.is_poly() { max_poly } else { 0 };
        let mut x = Tensor::zero();
        for q in 0..=top {
            let basis = self.symplectic_vectors(k, q)?;
            if basis.rows.is_empty() || (q > 0 && !s.chance(0.6)) {
                continue;
            }
            if let Some(v) = s.combination(&basis.rows) {
                x = x + Slice::tensors(&self.pair, k, q).element(&v);
            }
        }
        Ok(x)
    }

    /// Random `d_omega`-cocycle of degree `k`: a Hamiltonian tensor with one
    /// of its potentials plus a random closed-form perturbation.
    pub fn random_cocycle(&self, s: &mut crate::random::Sampler, k: i64, max_poly: i64) -> Result<ExtensionElement> {
        for _ in 0..8 {
            let x = self.random_symplectic(s, k, max_poly)?;
            if let Some(f) = self.hamiltonian_potential(&x)? {
                let t = self.n as i64 - k;
                let mut f = f;
                if t >= 1 && (t as usize) <= self.pair.dim() && s.chance(0.5) {
                    let h = s.cotensor(&self.pair, t as usize - 1, max_poly.max(0) as u32 + 1, 2);
                    f = f + self.pair.d(&h);
                }
                return Ok(ExtensionElement::new(f, x));
            }
        }
        Ok(ExtensionElement::zero())
    }
}

/// A symplectic tensor in canonical form modulo `ker(omega)`; equality is
/// equality of classes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymplecticTensor {
    pub representative: Tensor,
}

/// An element of the extension: a potential (shifted by `n`) and a
/// symplectic tensor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ExtensionElement {
    pub potential: Cotensor,
    pub tensor: Tensor,
}

impl ExtensionElement {
    pub fn new(potential: Cotensor, tensor: Tensor) -> Self {
        ExtensionElement { potential, tensor }
    }

    pub fn zero() -> Self {
        ExtensionElement::default()
    }

    pub fn is_zero(&self) -> bool {
        self.potential.is_zero() && self.tensor.is_zero()
    }

    /// Shifted degree: `n + |f|` for potentials, `|x|` for tensors. `None`
    /// for zero or mixed elements.
    pub fn shifted_degree(&self, n: usize) -> Option<i64> {
        let f = self.potential.homogeneous_degree().map(|d| n as i64 + d);
        let x = self.tensor.homogeneous_degree();
        match (self.potential.is_zero(), self.tensor.is_zero()) {
            (true, true) => None,
            (false, true) => f,
            (true, false) => x,
            (false, false) if f == x => f,
            _ => None,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        ExtensionElement::new(self.potential.scale(c), self.tensor.scale(c))
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Rational) {
        self.potential.add_scaled(&other.potential, c);
        self.tensor.add_scaled(&other.tensor, c);
    }
}

impl fmt::Display for ExtensionElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {})", self.potential, self.tensor)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionJacobiReport {
    pub arity: usize,
    pub residual: ExtensionElement,
    pub vanishes: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::Sampler;
    use crate::scalar::Poly;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    fn dx(i: usize) -> Tensor {
        Tensor::basis(Word::single(i))
    }

    #[test]
    fn accepts_closed_forms() {
        let plane = NPlecticStructure::symplectic_plane();
        assert_eq!(plane.omega_poly_degree(), Some(0));
        let su2 = NPlecticStructure::su2_cartan();
        assert_eq!(su2.n(), 2);
    }

    #[test]
    fn rejects_wrong_degree_and_open_forms() {
        let pair = Pair::poly(2).unwrap();
        let one_form = Cotensor::basis(Word::single(0));
        assert!(matches!(
            NPlecticStructure::new(pair.clone(), 1, one_form),
            Err(Error::WrongDegree { expected: -2, .. })
        ));
        let pair3 = Pair::poly(3).unwrap();
        let open = Cotensor::term(Word::from_bits(0b11), p("x3"));
        assert!(matches!(
            NPlecticStructure::new(pair3, 1, open),
            Err(Error::NotClosed { .. })
        ));
        // x dx^dy is closed in two variables
        assert!(NPlecticStructure::new(pair, 1, Cotensor::term(Word::from_bits(0b11), p("x1"))).is_ok());
    }

    #[test]
    fn symplectic_predicate() {
        let s = NPlecticStructure::symplectic_plane();
        assert!(s.is_symplectic(&dx(0)).unwrap());
        assert!(!s.is_symplectic(&dx(0).mul_poly(&p("x1"))).unwrap());
        assert!(s.is_symplectic(&Tensor::zero()).unwrap());
    }

    #[test]
    fn potential_of_minus_dy() {
        let s = NPlecticStructure::symplectic_plane();
        let f = s.hamiltonian_potential(&dx(1).scale(&Rational::from(-1))).unwrap().unwrap();
        assert_eq!(f, Cotensor::scalar(p("x1")));
        assert_eq!(s.hamiltonian_potential(&Tensor::zero()).unwrap(), Some(Cotensor::zero()));
        assert!(matches!(
            s.hamiltonian_potential(&dx(0).mul_poly(&p("x1"))),
            Err(Error::NotSymplectic { .. })
        ));
    }

    #[test]
    fn rotation_potential() {
        let s = NPlecticStructure::symplectic_plane();
        let x = dx(1).mul_poly(&p("x1")) - dx(0).mul_poly(&p("x2"));
        let f = s.hamiltonian_potential(&x).unwrap().unwrap();
        assert_eq!(f, Cotensor::scalar(p("-1/2*x1^2 - 1/2*x2^2")));
    }

    #[test]
    fn kernels() {
        let su2 = NPlecticStructure::su2_cartan();
        assert!(su2.kernel_basis(1, 0).unwrap().is_empty());
        assert_eq!(su2.kernel_basis(0, 0).unwrap().len(), 0);
        let plane = NPlecticStructure::symplectic_plane();
        assert!(plane.kernel_basis(2, 0).unwrap().is_empty());
        assert!(plane.kernel_basis(3, 0).unwrap().is_empty());
        let trivial = NPlecticStructure::new(Pair::poly(2).unwrap(), 1, Cotensor::zero()).unwrap();
        assert_eq!(trivial.kernel_basis(1, 1).unwrap().len(), 4);
    }

    #[test]
    fn fundamental_pairing_small() {
        let s = NPlecticStructure::symplectic_plane();
        let (l, r) = s.fundamental_pairing_sides(&[dx(0), dx(1)]).unwrap();
        assert!(l.is_zero() && r.is_zero());
        let mut smp = Sampler::new(3);
        for k in 2..=3 {
            let xs: Vec<Tensor> = (0..k)
                .map(|i| s.random_symplectic(&mut smp, [0, 1, 2][i % 3], 2).unwrap())
                .collect();
            assert!(s.fundamental_pairing_check(&xs).unwrap());
        }
    }

    #[test]
    fn d_omega_examples() {
        let s = NPlecticStructure::symplectic_plane();
        let e = ExtensionElement::new(Cotensor::scalar(p("x1")), dx(1).scale(&Rational::from(-1)));
        assert!(s.d_omega(&e).unwrap().is_zero());
        let h = ExtensionElement::new(Cotensor::scalar(p("x1*x2")), Tensor::zero());
        let dd = s.d_omega(&s.d_omega(&h).unwrap()).unwrap();
        assert!(dd.is_zero());
    }

    #[test]
    fn bell_weight_in_binary_bracket() {
        let s = NPlecticStructure::su2_cartan();
        let e1 = ExtensionElement::new(Cotensor::zero(), dx(0));
        let e2 = ExtensionElement::new(Cotensor::zero(), dx(1));
        let b = s.extension_bracket(&[e1, e2]).unwrap();
        // i_{e2 ^ e1} e^{123} with weight 1, [e1, e2] = e3
        assert_eq!(b.potential, contract_unchecked(&dx(1).wedge(&dx(0)), s.omega()));
        assert_eq!(b.tensor, dx(2));
    }

    #[test]
    fn extension_jacobi_low_arity() {
        let s = NPlecticStructure::symplectic_plane();
        let mut smp = Sampler::new(11);
        for n in 1..=3 {
            let es: Vec<ExtensionElement> = (0..n)
                .map(|i| {
                    let k = [1, 0, 2][i % 3];
                    let x = s.random_symplectic(&mut smp, k, 2).unwrap();
                    let t = (s.n() as i64 - k).max(0) as usize;
                    let f = smp.cotensor(s.pair(), t, 2, 2);
                    ExtensionElement::new(if k <= 1 { f } else { Cotensor::zero() }, x)
                })
                .collect();
            let r = s.extension_jacobi_check(&es).unwrap();
            assert!(r.vanishes, "arity {n}: {}", r.residual);
        }
    }
}
