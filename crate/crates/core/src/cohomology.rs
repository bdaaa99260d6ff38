//! Bigraded slices, Hamiltonian cohomology and the Poisson brackets on it.
//!
//! Every space is cut into finite slices by tensor degree and polynomial
//! degree of the coefficients. For the polynomial family `d` lowers the
//! polynomial degree by exactly one, so each slice complex is finite.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::calculus::{contract_unchecked, wedge_all, Cotensor, Graded, Kind, Tensor, Word};
use crate::combinatorics::{enumerate_shuffles_with_cap, koszul_odd};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rref};
use crate::nplectic::{ExtensionElement, NPlecticStructure};
use crate::pair::Pair;
use crate::scalar::{Monomial, Poly, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceKind {
    Tensor,
    Cotensor,
}

/// Words of a fixed length times monomials of a fixed degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slice {
    pub kind: SliceKind,
    /// Word length (the tensor degree up to sign).
    pub length: i64,
    pub poly_degree: i64,
    pub basis: Vec<(Word, Monomial)>,
}

impl Slice {
    fn build(kind: SliceKind, pair: &Pair, length: i64, poly_degree: i64) -> Slice {
        let mut basis = Vec::new();
        let admissible_poly = if pair.is_poly() { poly_degree >= 0 } else { poly_degree == 0 };
        if length >= 0 && length as usize <= pair.dim() && admissible_poly {
            let monos = Monomial::all_of_degree(pair.nvars(), poly_degree as u32);
            for w in Word::all_of_length(pair.dim(), length as usize) {
                for m in &monos {
                    basis.push((w, m.clone()));
                }
            }
        }
        Slice {
            kind,
            length,
            poly_degree,
            basis,
        }
    }

    pub fn tensors(pair: &Pair, length: i64, poly_degree: i64) -> Slice {
        Slice::build(SliceKind::Tensor, pair, length, poly_degree)
    }

    pub fn cotensors(pair: &Pair, length: i64, poly_degree: i64) -> Slice {
        Slice::build(SliceKind::Cotensor, pair, length, poly_degree)
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Tensor degree of the slice elements.
    pub fn tensor_degree(&self) -> i64 {
        match self.kind {
            SliceKind::Tensor => self.length,
            SliceKind::Cotensor => -self.length,
        }
    }

    fn position(&self, w: Word, m: &Monomial) -> Option<usize> {
        self.basis
            .binary_search_by(|(bw, bm)| bw.cmp(&w).then_with(|| bm.cmp(m)))
            .ok()
    }

    /// Coordinates of `g`, which must lie in the slice.
    pub fn coords<K: Kind>(&self, g: &Graded<K>) -> Result<Vec<Rational>> {
        let mut v = vec![Rational::zero(); self.dimension()];
        for (w, c) in g.terms() {
            for (m, r) in c.terms() {
                let i = self.position(*w, m).ok_or_else(|| {
                    Error::Argument(format!(
                        "term {r}*{m} on {w:?} lies outside the slice (length {}, degree {})",
                        self.length, self.poly_degree
                    ))
                })?;
                v[i] = r.clone();
            }
        }
        Ok(v)
    }

    pub fn element<K: Kind>(&self, v: &[Rational]) -> Graded<K> {
        let mut out = Graded::zero();
        for ((w, m), c) in self.basis.iter().zip(v) {
            if !c.is_zero() {
                out.add_term(*w, &Poly::term(m.clone(), c.clone()));
            }
        }
        out
    }

    pub fn basis_element<K: Kind>(&self, i: usize) -> Graded<K> {
        let (w, m) = &self.basis[i];
        Graded::term(*w, Poly::term(m.clone(), Rational::one()))
    }
}

/// Splits an element by word length and coefficient degree.
pub fn bigraded_parts<K: Kind>(g: &Graded<K>) -> BTreeMap<(usize, u32), Graded<K>> {
    let mut out: BTreeMap<(usize, u32), Graded<K>> = BTreeMap::new();
    for (w, c) in g.terms() {
        for (m, r) in c.terms() {
            out.entry((w.len(), m.degree()))
                .or_default()
                .add_term(*w, &Poly::term(m.clone(), r.clone()));
        }
    }
    out
}

/// A linear map between slices; the columns run over the concatenated
/// bases of `sources`.
#[derive(Debug, Clone)]
pub struct SliceMap {
    pub sources: Vec<Slice>,
    pub target: Slice,
    pub matrix: Matrix,
}

impl SliceMap {
    fn from_images(sources: Vec<Slice>, target: Slice, images: Vec<Vec<Rational>>) -> SliceMap {
        let matrix = Matrix::from_columns(target.dimension(), &images);
        SliceMap {
            sources,
            target,
            matrix,
        }
    }

    pub fn source_dimension(&self) -> usize {
        self.sources.iter().map(Slice::dimension).sum()
    }
}

/// Polynomial degree after applying `d` or `d_omega`.
pub(crate) fn lowered(pair: &Pair, p: i64) -> i64 {
    if pair.is_poly() {
        p - 1
    } else {
        0
    }
}

fn raised(pair: &Pair, p: i64) -> i64 {
    if pair.is_poly() {
        p + 1
    } else {
        0
    }
}

fn images_in<K: Kind, L: Kind>(
    source: &Slice,
    target: &Slice,
    op: impl Fn(&Graded<K>) -> Graded<L>,
) -> Result<Vec<Vec<Rational>>> {
    (0..source.dimension())
        .map(|i| {
            let img = op(&source.basis_element(i));
            target.coords(&img).map_err(|e| {
                Error::Argument(format!("operator leaves its predicted target slice: {e}"))
            })
        })
        .collect()
}

/// Matrix of `d` on the cotensor slice of word length `length` and
/// polynomial degree `p`.
pub fn d_map(pair: &Pair, length: i64, p: i64) -> Result<SliceMap> {
    let source = Slice::cotensors(pair, length, p);
    let target = Slice::cotensors(pair, length + 1, lowered(pair, p));
    let images = images_in(&source, &target, |f: &Cotensor| pair.d(f))?;
    Ok(SliceMap::from_images(vec![source], target, images))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceOp {
    /// `d` on the cotensors of tensor degree `-degree` (word length `degree`).
    D,
    /// `d_omega` on the extension slice of degree `degree`.
    DOmega,
    /// `x -> i_x omega` on the tensors of degree `degree`.
    ContractOmega,
}

/// Matrix of an operator on one slice. `poly_degree` is the coefficient
/// degree of the source cotensors for `D` and `DOmega` and of the source
/// tensors for `ContractOmega`.
pub fn slice_matrix(s: &NPlecticStructure, op: SliceOp, degree: i64, poly_degree: i64) -> Result<SliceMap> {
    match op {
        SliceOp::D => d_map(s.pair(), degree, poly_degree),
        SliceOp::ContractOmega => s.contract_map(degree, poly_degree),
        SliceOp::DOmega => s.d_omega_map(degree, poly_degree),
    }
}

impl NPlecticStructure {
    /// Coefficient degree of tensors paired with potentials of degree `p`.
    pub(crate) fn tensor_poly_degree(&self, p: i64) -> Result<i64> {
        if !self.pair().is_poly() {
            return Ok(0);
        }
        let r = self.omega_poly_degree().ok_or(Error::InhomogeneousCocycle)?;
        Ok(p - r as i64 - 1)
    }

    /// Potential degree paired with tensors of coefficient degree `q`.
    pub(crate) fn potential_poly_degree(&self, q: i64) -> Result<i64> {
        if !self.pair().is_poly() {
            return Ok(0);
        }
        let r = self.omega_poly_degree().ok_or(Error::InhomogeneousCocycle)?;
        Ok(q + r as i64 + 1)
    }

    /// Coefficient degree of `i_x omega` for `x` of coefficient degree `q`.
    pub(crate) fn contracted_poly_degree(&self, q: i64) -> Result<i64> {
        Ok(lowered(self.pair(), self.potential_poly_degree(q)?))
    }

    /// `x -> i_x omega` on tensors of degree `k` with coefficient degree `q`.
    pub fn contract_map(&self, k: i64, q: i64) -> Result<SliceMap> {
        let pair = self.pair();
        let source = Slice::tensors(pair, k, q);
        let target = Slice::cotensors(pair, self.n() as i64 + 1 - k, self.contracted_poly_degree(q)?);
        let omega = self.omega();
        let images = images_in(&source, &target, |x: &Tensor| contract_unchecked(x, omega))?;
        Ok(SliceMap::from_images(vec![source], target, images))
    }

    /// `x -> d i_x omega`, whose kernel is the symplectic tensors.
    pub(crate) fn symplectic_map(&self, k: i64, q: i64) -> Result<SliceMap> {
        let pair = self.pair();
        let source = Slice::tensors(pair, k, q);
        let target = Slice::cotensors(
            pair,
            self.n() as i64 + 2 - k,
            lowered(pair, self.contracted_poly_degree(q)?),
        );
        let omega = self.omega();
        let images = images_in(&source, &target, |x: &Tensor| pair.d(&contract_unchecked(x, omega)))?;
        Ok(SliceMap::from_images(vec![source], target, images))
    }

    /// `d_omega(f, x) = i_x omega - d f` on the extension slice of degree
    /// `k` whose potentials have coefficient degree `p`.
    pub fn d_omega_map(&self, k: i64, p: i64) -> Result<SliceMap> {
        let pair = self.pair();
        let n = self.n() as i64;
        let fs = Slice::cotensors(pair, n - k, p);
        let xs = Slice::tensors(pair, k, self.tensor_poly_degree(p)?);
        let target = Slice::cotensors(pair, n - k + 1, lowered(pair, p));
        let mut images = images_in(&fs, &target, |f: &Cotensor| -pair.d(f))?;
        let omega = self.omega();
        images.extend(images_in(&xs, &target, |x: &Tensor| contract_unchecked(x, omega))?);
        Ok(SliceMap::from_images(vec![fs, xs], target, images))
    }

    /// Row space (RREF) of the coboundaries inside the potential slice
    /// `(k, p)`: all `i_y omega - d h` with `y` symplectic of degree `k+1`.
    pub(crate) fn coboundary_space(&self, k: i64, p: i64) -> Result<Arc<Rref>> {
        if let Some(hit) = self.cache_get(1, k, p) {
            return Ok(hit);
        }
        let pair = self.pair();
        let n = self.n() as i64;
        let target = Slice::cotensors(pair, n - k, p);
        let hs = Slice::cotensors(pair, n - k - 1, raised(pair, p));
        let mut vectors = images_in(&hs, &target, |h: &Cotensor| -pair.d(h))?;
        let q = self.tensor_poly_degree(raised(pair, p))?;
        let ys = Slice::tensors(pair, k + 1, q);
        let omega = self.omega();
        for y in self.symplectic_vectors(k + 1, q)?.rows.iter() {
            let yt: Tensor = ys.element(y);
            vectors.push(target.coords(&contract_unchecked(&yt, omega))?);
        }
        let rref = Arc::new(Matrix::from_rows(target.dimension(), vectors).rref());
        Ok(self.cache_put(1, k, p, rref))
    }

    /// Row space of `ker(omega)` in the tensor slice `(k, q)`.
    pub(crate) fn kernel_space(&self, k: i64, q: i64) -> Result<Arc<Rref>> {
        if let Some(hit) = self.cache_get(0, k, q) {
            return Ok(hit);
        }
        let m = self.contract_map(k, q)?;
        let dim = m.source_dimension();
        let rref = Arc::new(Matrix::from_rows(dim, m.matrix.null_space()).rref());
        Ok(self.cache_put(0, k, q, rref))
    }

    /// Basis coordinates of the symplectic tensors in the slice `(k, q)`.
    pub(crate) fn symplectic_vectors(&self, k: i64, q: i64) -> Result<Arc<Rref>> {
        if let Some(hit) = self.cache_get(2, k, q) {
            return Ok(hit);
        }
        let m = self.symplectic_map(k, q)?;
        let dim = m.source_dimension();
        let rref = Arc::new(Matrix::from_rows(dim, m.matrix.null_space()).rref());
        Ok(self.cache_put(2, k, q, rref))
    }

    /// Basis of the symplectic tensors of degree `k` and coefficient degree `q`.
    pub fn symplectic_basis(&self, k: i64, q: i64) -> Result<Vec<Tensor>> {
        let slice = Slice::tensors(self.pair(), k, q);
        Ok(self
            .symplectic_vectors(k, q)?
            .rows
            .iter()
            .map(|v| slice.element(v))
            .collect())
    }

    /// Representative of `x + ker(omega)` with zero pivot coordinates in every
    /// slice.
    pub fn canonical_tensor(&self, x: &Tensor) -> Result<Tensor> {
        self.pair().check(x)?;
        let mut out = Tensor::zero();
        for ((k, q), part) in bigraded_parts(x) {
            let (k, q) = (k as i64, q as i64);
            let slice = Slice::tensors(self.pair(), k, q);
            let v = self.kernel_space(k, q)?.reduce(&slice.coords(&part)?);
            out = out + slice.element(&v);
        }
        Ok(out)
    }

    /// Representative of `f` modulo coboundaries, slice by slice.
    pub(crate) fn canonical_potential(&self, f: &Cotensor) -> Result<Cotensor> {
        let n = self.n() as i64;
        let mut out = Cotensor::zero();
        for ((t, p), part) in bigraded_parts(f) {
            let (k, p) = (n - t as i64, p as i64);
            let slice = Slice::cotensors(self.pair(), t as i64, p);
            let v = self.coboundary_space(k, p)?.reduce(&slice.coords(&part)?);
            out = out + slice.element(&v);
        }
        Ok(out)
    }
}

/// Ranks for one extension slice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankRow {
    pub degree: i64,
    pub poly_degree: i64,
    pub dim_cochains: usize,
    pub dim_kernel: usize,
    pub dim_image: usize,
    pub rank: usize,
}

/// Hamiltonian cohomology of degree `k` in each potential degree of the
/// window `0..=window` (only degree 0 for the constant family). Kernel and
/// image are taken in the quotient by `ker(omega)`.
pub fn cohomology_rank(s: &NPlecticStructure, k: i64, window: i64) -> Result<Vec<RankRow>> {
    let top = if s.pair().is_poly() { window } else { 0 };
    (0..=top).map(|p| cohomology_slice(s, k, p)).collect()
}

fn cohomology_slice(s: &NPlecticStructure, k: i64, p: i64) -> Result<RankRow> {
    let m = s.d_omega_map(k, p)?;
    let q = s.tensor_poly_degree(p)?;
    let kernel_dim = s.kernel_space(k, q)?.rank();
    let cocycles = m.source_dimension() - m.matrix.rank();
    let quotient_cochains = m.source_dimension() - kernel_dim;
    let dim_kernel = cocycles - kernel_dim;
    let dim_image = s.coboundary_space(k, p)?.rank();
    Ok(RankRow {
        degree: k,
        poly_degree: p,
        dim_cochains: quotient_cochains,
        dim_kernel,
        dim_image,
        rank: dim_kernel - dim_image,
    })
}

/// Degrees outside this range have no cochains at all.
pub fn degree_range(s: &NPlecticStructure) -> (i64, i64) {
    let n = s.n() as i64;
    let dim = s.pair().dim() as i64;
    ((n - dim).min(0) - 1, n.max(dim) + 1)
}

/// Rank table over every degree that can carry cochains, plus one on each side.
pub fn cohomology_table(s: &NPlecticStructure, window: i64) -> Result<Vec<RankRow>> {
    let (lo, hi) = degree_range(s);
    let mut rows = Vec::new();
    for k in lo..=hi {
        rows.extend(cohomology_rank(s, k, window)?);
    }
    Ok(rows)
}

/// Ranks of the plain Chevalley-Eilenberg complex on cotensors of word
/// length `length` and coefficient degree `p`.
pub fn ce_cohomology_rank(pair: &Pair, length: i64, p: i64) -> Result<RankRow> {
    let m = d_map(pair, length, p)?;
    let dim_kernel = m.source_dimension() - m.matrix.rank();
    let incoming = d_map(pair, length - 1, raised(pair, p))?;
    let dim_image = incoming.matrix.rank();
    Ok(RankRow {
        degree: length,
        poly_degree: p,
        dim_cochains: m.source_dimension(),
        dim_kernel,
        dim_image,
        rank: dim_kernel - dim_image,
    })
}

pub fn ce_cohomology_table(pair: &Pair, window: i64) -> Result<Vec<RankRow>> {
    let top = if pair.is_poly() { window } else { 0 };
    let mut rows = Vec::new();
    for t in 0..=pair.dim() as i64 {
        for p in 0..=top {
            rows.push(ce_cohomology_rank(pair, t, p)?);
        }
    }
    Ok(rows)
}

/// A Hamiltonian cohomology class in canonical form: the potential reduced
/// modulo coboundaries and the tensor reduced modulo `ker(omega)`. Equal
/// classes have equal fields.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CohomClass {
    /// `None` for the zero class.
    pub degree: Option<i64>,
    pub potential: Cotensor,
    pub tensor: Tensor,
}

impl CohomClass {
    pub fn zero() -> Self {
        CohomClass {
            degree: None,
            potential: Cotensor::zero(),
            tensor: Tensor::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.potential.is_zero() && self.tensor.is_zero()
    }

    pub fn representative(&self) -> ExtensionElement {
        ExtensionElement::new(self.potential.clone(), self.tensor.clone())
    }
}

impl NPlecticStructure {
    /// Class of a `d_omega`-cocycle, i.e. a pair with `i_x omega = d f`.
    pub fn class_of(&self, e: &ExtensionElement) -> Result<CohomClass> {
        self.pair().check(&e.potential)?;
        self.pair().check(&e.tensor)?;
        let residual = &contract_unchecked(&e.tensor, self.omega()) - &self.pair().d(&e.potential);
        if !residual.is_zero() {
            return Err(Error::NotACocycle {
                residual: residual.to_string(),
            });
        }
        let potential = self.canonical_potential(&e.potential)?;
        let tensor = self.canonical_tensor(&e.tensor)?;
        let reduced = ExtensionElement::new(potential, tensor);
        let degree = reduced.shifted_degree(self.n());
        if !reduced.is_zero() && degree.is_none() {
            return Err(Error::NotHomogeneous(format!(
                "extension element {reduced} mixes degrees"
            )));
        }
        Ok(CohomClass {
            degree,
            potential: reduced.potential,
            tensor: reduced.tensor,
        })
    }

    pub fn add_classes(&self, a: &CohomClass, b: &CohomClass) -> Result<CohomClass> {
        self.class_of(&ExtensionElement::new(
            &a.potential + &b.potential,
            &a.tensor + &b.tensor,
        ))
    }

    pub fn scale_class(&self, a: &CohomClass, c: &Rational) -> CohomClass {
        if c.is_zero() {
            return CohomClass::zero();
        }
        CohomClass {
            degree: a.degree,
            potential: a.potential.scale(c),
            tensor: a.tensor.scale(c),
        }
    }

    /// Poisson bracket of classes: the class of
    /// `(i_{x_k ^ .. ^ x_1} omega, [x_1..x_k]_k)`; the unary bracket is zero.
    pub fn poisson_bracket(&self, cs: &[CohomClass]) -> Result<CohomClass> {
        if cs.is_empty() {
            return Err(Error::Argument("Poisson bracket needs at least one class".into()));
        }
        if cs.len() > self.arity_cap() {
            return Err(Error::ResourceLimit(format!(
                "Poisson bracket arity {} exceeds the arity cap {}",
                cs.len(),
                self.arity_cap()
            )));
        }
        if cs.len() == 1 || cs.iter().any(|c| c.tensor.is_zero()) {
            return Ok(CohomClass::zero());
        }
        let xs: Vec<Tensor> = cs.iter().map(|c| c.tensor.clone()).collect();
        let potential = contract_unchecked(&wedge_all(xs.iter().rev()), self.omega());
        let tensor = self.pair().higher_bracket_with_cap(&xs, self.arity_cap())?;
        self.class_of(&ExtensionElement::new(potential, tensor))
    }

    /// Weak Jacobi sum on classes with zero differential, computed directly
    /// on canonical representatives.
    pub fn poisson_jacobi_residual(&self, cs: &[CohomClass]) -> Result<CohomClass> {
        let n = cs.len();
        let degs: Vec<i64> = cs.iter().map(|c| c.degree.unwrap_or(0)).collect();
        let mut acc = ExtensionElement::zero();
        for j in 2..n {
            let sh = enumerate_shuffles_with_cap(&[j, n - j], self.arity_cap().max(n))?;
            for s in sh.iter() {
                let im = s.zero_based();
                let inner_args: Vec<CohomClass> = im[..j].iter().map(|&i| cs[i].clone()).collect();
                let mut inner = self.poisson_bracket(&inner_args)?;
                if inner.is_zero() {
                    continue;
                }
                // zero for the unary case, so only the arity matters here
                inner.degree = Some(im[..j].iter().map(|&i| degs[i]).sum::<i64>() - 1);
                let mut outer = vec![inner];
                outer.extend(im[j..].iter().map(|&i| cs[i].clone()));
                let v = self.poisson_bracket(&outer)?;
                let sign = if koszul_odd(im, &degs) { -1 } else { 1 };
                acc.potential.add_scaled(&v.potential, &Rational::from(sign));
                acc.tensor.add_scaled(&v.tensor, &Rational::from(sign));
            }
        }
        self.class_of(&acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn su2_ce_ranks() {
        let s = Pair::su2();
        let ranks: Vec<usize> = ce_cohomology_table(&s, 0).unwrap().iter().map(|r| r.rank).collect();
        assert_eq!(ranks, vec![1, 0, 0, 1]);
    }

    #[test]
    fn su2_d_matrix_on_one_forms() {
        let s = Pair::su2();
        let m = d_map(&s, 1, 0).unwrap();
        assert_eq!((m.matrix.rows(), m.matrix.cols()), (3, 3));
        // d e^3 = -e^{12}: column 2, row of the word [1,2] (first)
        assert_eq!(m.matrix.get(0, 2), &q(-1));
        assert_eq!(d_map(&s, 4, 0).unwrap().matrix.cols(), 0);
    }

    #[test]
    fn poly_de_rham_is_acyclic() {
        let p = Pair::poly(2).unwrap();
        for row in ce_cohomology_table(&p, 3).unwrap() {
            let want = usize::from(row.degree == 0 && row.poly_degree == 0);
            assert_eq!(row.rank, want, "{row:?}");
        }
    }

    #[test]
    fn plane_contraction_matrix() {
        let s = NPlecticStructure::symplectic_plane();
        let m = slice_matrix(&s, SliceOp::ContractOmega, 1, 0).unwrap();
        assert_eq!(m.matrix.rows(), 2);
        // i_{d1} omega = e^2, i_{d2} omega = -e^1
        assert_eq!(m.matrix.get(1, 0), &q(1));
        assert_eq!(m.matrix.get(0, 1), &q(-1));
        assert!(m.matrix.get(0, 0).is_zero() && m.matrix.get(1, 1).is_zero());
    }

    #[test]
    fn cohomology_bounds_shipped() {
        for s in [NPlecticStructure::symplectic_plane(), NPlecticStructure::su2_cartan()] {
            for row in cohomology_table(&s, 2).unwrap() {
                if row.degree < 0 || row.degree > s.n() as i64 + 1 {
                    assert_eq!(row.rank, 0, "{row:?}");
                }
                assert!(row.dim_image <= row.dim_kernel && row.dim_kernel <= row.dim_cochains);
            }
        }
    }

    #[test]
    fn unary_poisson_is_zero() {
        let s = NPlecticStructure::symplectic_plane();
        let e = ExtensionElement::new(
            Cotensor::scalar("x1".parse().unwrap()),
            Tensor::basis(Word::single(1)).scale(&q(-1)),
        );
        let c = s.class_of(&e).unwrap();
        assert!(!c.is_zero());
        assert!(s.poisson_bracket(&[c]).unwrap().is_zero());
    }
}
