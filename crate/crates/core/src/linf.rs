//! Generic weak Jacobi and weak morphism checks.
//!
//! An algebra is anything that can evaluate its operations `D_k` on
//! homogeneous arguments. The checker only needs addition, scaling, a zero
//! test (modulo whatever quotient the algebra lives in) and the operations.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::calculus::{natural_inclusion_unchecked, Tensor, DEFAULT_ARITY_CAP};
use crate::cohomology::CohomClass;
use crate::combinatorics::{compositions, enumerate_shuffles_with_cap, factorial, koszul_odd, multisets};
use crate::error::{Error, Result};
use crate::nplectic::{ExtensionElement, NPlecticStructure};
use crate::pair::Pair;
use crate::scalar::Rational;

/// Default highest arity for morphism checks.
pub const DEFAULT_MORPHISM_ARITY: usize = 5;

/// A tuple of inputs with the labels that name it in reports.
pub type LabeledTuple<E> = (Vec<String>, Vec<Homogeneous<E>>);

#[derive(Debug, Clone, PartialEq)]
pub struct Homogeneous<E> {
    pub value: E,
    pub degree: i64,
}

impl<E> Homogeneous<E> {
    pub fn new(value: E, degree: i64) -> Self {
        Homogeneous { value, degree }
    }
}

pub trait LInfinity {
    type Element: Clone;

    fn zero(&self) -> Self::Element;
    fn is_zero(&self, e: &Self::Element) -> Result<bool>;
    fn add_scaled(&self, acc: &mut Self::Element, e: &Self::Element, c: &Rational) -> Result<()>;
    /// `D_k` on `k = args.len() >= 1` homogeneous arguments.
    fn operation(&self, args: &[Homogeneous<Self::Element>]) -> Result<Self::Element>;
    fn render(&self, e: &Self::Element) -> String;
}

fn sign(odd: bool) -> Rational {
    Rational::from(if odd { -1 } else { 1 })
}

fn pick<E: Clone>(xs: &[Homogeneous<E>], idx: &[usize]) -> Vec<Homogeneous<E>> {
    idx.iter().map(|&i| xs[i].clone()).collect()
}

fn total_degree<E>(xs: &[Homogeneous<E>]) -> i64 {
    xs.iter().map(|x| x.degree).sum()
}

/// `sum_{i+j=n+1} sum_{s in Sh(j,n-j)} e(s) D_i(D_j(x_s..), x_s..)`.
pub fn jacobi_residual<L: LInfinity>(l: &L, xs: &[Homogeneous<L::Element>]) -> Result<L::Element> {
    let n = xs.len();
    let degs: Vec<i64> = xs.iter().map(|x| x.degree).collect();
    let mut acc = l.zero();
    for j in 1..=n {
        let sh = enumerate_shuffles_with_cap(&[j, n - j], n.max(DEFAULT_ARITY_CAP))?;
        for s in sh.iter() {
            let im = s.zero_based();
            let inner_args = pick(xs, &im[..j]);
            let inner = l.operation(&inner_args)?;
            if l.is_zero(&inner)? {
                continue;
            }
            let mut outer = vec![Homogeneous::new(inner, total_degree(&inner_args) - 1)];
            outer.extend(pick(xs, &im[j..]));
            let v = l.operation(&outer)?;
            l.add_scaled(&mut acc, &v, &sign(koszul_odd(im, &degs)))?;
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TupleResidual {
    pub tuple: Vec<String>,
    pub residual: String,
    /// Rendered length of the residual, used to pick the worst tuple.
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinfReport {
    pub algebra: String,
    pub max_arity: usize,
    pub tuples_checked: usize,
    pub failures: usize,
    pub passed: bool,
    pub worst: Option<TupleResidual>,
    pub residuals: Vec<TupleResidual>,
}

fn summarize(algebra: String, max_arity: usize, all: Vec<TupleResidual>, keep_all: bool) -> LinfReport {
    let failing: Vec<&TupleResidual> = all.iter().filter(|t| t.size > 0).collect();
    let worst = failing.iter().max_by_key(|t| t.size).map(|t| (*t).clone());
    let failures = failing.len();
    let residuals = if keep_all {
        all.clone()
    } else {
        failing.into_iter().cloned().collect()
    };
    LinfReport {
        algebra,
        max_arity,
        tuples_checked: all.len(),
        failures,
        passed: failures == 0,
        worst,
        residuals,
    }
}

fn residual_entry<L: LInfinity>(l: &L, tuple: Vec<String>, r: &L::Element) -> Result<TupleResidual> {
    let zero = l.is_zero(r)?;
    let residual = if zero { "0".to_string() } else { l.render(r) };
    Ok(TupleResidual {
        tuple,
        size: if zero { 0 } else { residual.len().max(1) },
        residual,
    })
}

/// Weak Jacobi on the given tuples; labels name each tuple in the report.
pub fn check_linf_on<L: LInfinity>(
    l: &L,
    name: &str,
    tuples: &[LabeledTuple<L::Element>],
) -> Result<LinfReport> {
    let mut all = Vec::with_capacity(tuples.len());
    let mut max_arity = 0;
    for (label, xs) in tuples {
        max_arity = max_arity.max(xs.len());
        let r = jacobi_residual(l, xs)?;
        all.push(residual_entry(l, label.clone(), &r)?);
    }
    Ok(summarize(name.to_string(), max_arity, all, false))
}

/// Weak Jacobi on every basis multiset of size `1..=arity`.
pub fn check_linf(l: &FiniteLInfinity, arity: usize) -> Result<LinfReport> {
    let mut tuples = Vec::new();
    for k in 1..=arity {
        for idx in multisets(l.dimension(), k) {
            tuples.push((l.labels(&idx), l.basis_tuple(&idx)));
        }
    }
    check_linf_on(l, &l.name, &tuples)
}

/// A finite-dimensional graded space with operations given on basis tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteLInfinity {
    pub name: String,
    degrees: Vec<i64>,
    /// Keys are nondecreasing index tuples; values are coordinate vectors.
    table: BTreeMap<Vec<usize>, Vec<Rational>>,
}

impl FiniteLInfinity {
    /// Entries may list tuples in any order; they are sorted with the
    /// Koszul sign. Checks graded symmetry and that each `D_k` has degree -1.
    pub fn new(name: &str, degrees: Vec<i64>, entries: Vec<(Vec<usize>, Vec<Rational>)>) -> Result<Self> {
        let dim = degrees.len();
        let mut table: BTreeMap<Vec<usize>, Vec<Rational>> = BTreeMap::new();
        for (tuple, value) in entries {
            if tuple.is_empty() {
                return Err(Error::Argument("operation entries need at least one argument".into()));
            }
            if let Some(&bad) = tuple.iter().find(|&&i| i >= dim) {
                return Err(Error::Argument(format!("basis index {} out of range", bad + 1)));
            }
            if value.len() != dim {
                return Err(Error::Argument(format!(
                    "value for {:?} has {} coordinates, expected {dim}",
                    tuple.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    value.len()
                )));
            }
            let (sorted, odd) = sort_with_sign(&tuple, &degrees);
            let value: Vec<Rational> = value.into_iter().map(|c| c * sign(odd)).collect();
            let out_degree = sorted.iter().map(|&i| degrees[i]).sum::<i64>() - 1;
            if let Some(i) = value.iter().enumerate().find(|(i, c)| !c.is_zero() && degrees[*i] != out_degree).map(|(i, _)| i) {
                return Err(Error::WrongDegree {
                    expected: out_degree,
                    found: format!("basis element {} of degree {}", i + 1, degrees[i]),
                });
            }
            let repeated_odd = sorted.windows(2).any(|w| w[0] == w[1] && degrees[w[0]] % 2 != 0);
            if repeated_odd && value.iter().any(|c| !c.is_zero()) {
                return Err(Error::Argument(format!(
                    "graded symmetry forces the operation on {:?} to vanish",
                    sorted.iter().map(|i| i + 1).collect::<Vec<_>>()
                )));
            }
            match table.get(&sorted) {
                Some(prev) if *prev != value => {
                    return Err(Error::Argument(format!(
                        "conflicting entries for {:?}",
                        sorted.iter().map(|i| i + 1).collect::<Vec<_>>()
                    )))
                }
                _ => {
                    if value.iter().any(|c| !c.is_zero()) {
                        table.insert(sorted, value);
                    }
                }
            }
        }
        Ok(FiniteLInfinity {
            name: name.to_string(),
            degrees,
            table,
        })
    }

    /// A Lie algebra concentrated in degree one with `D_2` its bracket.
    pub fn from_lie_algebra(pair: &Pair) -> Result<Self> {
        if pair.is_poly() {
            return Err(Error::Argument("only constant pairs have a finite Lie algebra".into()));
        }
        let d = pair.dim();
        let mut entries = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                let mut v = vec![Rational::zero(); d];
                for (k, c) in pair.basis_bracket(i, j) {
                    v[*k] = c.clone();
                }
                entries.push((vec![i, j], v));
            }
        }
        FiniteLInfinity::new(pair.family_name(), vec![1; d], entries)
    }

    pub fn abelian(dim: usize) -> Self {
        FiniteLInfinity {
            name: format!("abelian({dim})"),
            degrees: vec![1; dim],
            table: BTreeMap::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Vec<Rational>)> {
        self.table.iter()
    }

    pub fn max_arity(&self) -> usize {
        self.table.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn basis(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dimension()];
        v[i] = Rational::one();
        v
    }

    pub fn basis_tuple(&self, idx: &[usize]) -> Vec<Homogeneous<Vec<Rational>>> {
        idx.iter().map(|&i| Homogeneous::new(self.basis(i), self.degrees[i])).collect()
    }

    pub fn labels(&self, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|i| format!("e{}", i + 1)).collect()
    }

    /// Overwrites one table entry without any validation; meant for
    /// building counterexamples.
    pub fn corrupt(&mut self, tuple: Vec<usize>, value: Vec<Rational>) {
        self.table.insert(tuple, value);
    }

    fn basis_operation(&self, idx: &[usize]) -> Option<(Vec<Rational>, bool)> {
        let (sorted, odd) = sort_with_sign(idx, &self.degrees);
        self.table.get(&sorted).map(|v| (v.clone(), odd))
    }
}

/// Sorts basis indices, returning whether the Koszul sign is odd.
fn sort_with_sign(idx: &[usize], degrees: &[i64]) -> (Vec<usize>, bool) {
    let mut order: Vec<usize> = (0..idx.len()).collect();
    order.sort_by_key(|&i| (idx[i], i));
    let degs: Vec<i64> = idx.iter().map(|&i| degrees[i]).collect();
    let odd = koszul_odd(&order, &degs);
    (order.iter().map(|&i| idx[i]).collect(), odd)
}

impl LInfinity for FiniteLInfinity {
    type Element = Vec<Rational>;

    fn zero(&self) -> Vec<Rational> {
        vec![Rational::zero(); self.dimension()]
    }

    fn is_zero(&self, e: &Vec<Rational>) -> Result<bool> {
        Ok(e.iter().all(Rational::is_zero))
    }

    fn add_scaled(&self, acc: &mut Vec<Rational>, e: &Vec<Rational>, c: &Rational) -> Result<()> {
        for (a, b) in acc.iter_mut().zip(e) {
            *a += &(b * c);
        }
        Ok(())
    }

    fn operation(&self, args: &[Homogeneous<Vec<Rational>>]) -> Result<Vec<Rational>> {
        let mut out = self.zero();
        let supports: Vec<Vec<usize>> = args
            .iter()
            .map(|a| a.value.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, _)| i).collect())
            .collect();
        if supports.iter().any(Vec::is_empty) {
            return Ok(out);
        }
        let mut pos = vec![0usize; args.len()];
        loop {
            let idx: Vec<usize> = pos.iter().zip(&supports).map(|(&p, s)| s[p]).collect();
            if let Some((v, odd)) = self.basis_operation(&idx) {
                let mut c = sign(odd);
                for (a, &i) in args.iter().zip(&idx) {
                    c *= &a.value[i];
                }
                self.add_scaled(&mut out, &v, &c)?;
            }
            let mut p = 0;
            loop {
                if p == pos.len() {
                    return Ok(out);
                }
                pos[p] += 1;
                if pos[p] < supports[p].len() {
                    break;
                }
                pos[p] = 0;
                p += 1;
            }
        }
    }

    fn render(&self, e: &Vec<Rational>) -> String {
        let parts: Vec<String> = e
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("{c}*e{}", i + 1))
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Tensors with the higher brackets and zero differential.
#[derive(Debug, Clone)]
pub struct TensorLInfinity {
    pub pair: Arc<Pair>,
    pub arity_cap: usize,
}

impl TensorLInfinity {
    pub fn new(pair: impl Into<Arc<Pair>>) -> Self {
        TensorLInfinity {
            pair: pair.into(),
            arity_cap: DEFAULT_ARITY_CAP,
        }
    }
}

impl LInfinity for TensorLInfinity {
    type Element = Tensor;

    fn zero(&self) -> Tensor {
        Tensor::zero()
    }

    fn is_zero(&self, e: &Tensor) -> Result<bool> {
        Ok(e.is_zero())
    }

    fn add_scaled(&self, acc: &mut Tensor, e: &Tensor, c: &Rational) -> Result<()> {
        acc.add_scaled(e, c);
        Ok(())
    }

    fn operation(&self, args: &[Homogeneous<Tensor>]) -> Result<Tensor> {
        if args.len() < 2 {
            return Ok(Tensor::zero());
        }
        let xs: Vec<Tensor> = args.iter().map(|a| a.value.clone()).collect();
        self.pair.higher_bracket_with_cap(&xs, self.arity_cap)
    }

    fn render(&self, e: &Tensor) -> String {
        e.to_string()
    }
}

/// The extension algebra: `D_1 = d_omega`, `D_k` the Bell-weighted brackets.
/// Zero test modulo the kernel in the tensor slot.
#[derive(Debug, Clone, Copy)]
pub struct ExtensionLInfinity<'a> {
    pub structure: &'a NPlecticStructure,
}

impl LInfinity for ExtensionLInfinity<'_> {
    type Element = ExtensionElement;

    fn zero(&self) -> ExtensionElement {
        ExtensionElement::zero()
    }

    fn is_zero(&self, e: &ExtensionElement) -> Result<bool> {
        Ok(e.potential.is_zero() && self.structure.canonical_tensor(&e.tensor)?.is_zero())
    }

    fn add_scaled(&self, acc: &mut ExtensionElement, e: &ExtensionElement, c: &Rational) -> Result<()> {
        acc.add_scaled(e, c);
        Ok(())
    }

    fn operation(&self, args: &[Homogeneous<ExtensionElement>]) -> Result<ExtensionElement> {
        let es: Vec<ExtensionElement> = args.iter().map(|a| a.value.clone()).collect();
        self.structure.extension_operation(&es)
    }

    fn render(&self, e: &ExtensionElement) -> String {
        e.to_string()
    }
}

/// Hamiltonian cohomology with its Poisson brackets; the unary operation
/// is zero.
#[derive(Debug, Clone, Copy)]
pub struct HamiltonianCohomology<'a> {
    pub structure: &'a NPlecticStructure,
}

impl LInfinity for HamiltonianCohomology<'_> {
    type Element = CohomClass;

    fn zero(&self) -> CohomClass {
        CohomClass::zero()
    }

    fn is_zero(&self, e: &CohomClass) -> Result<bool> {
        Ok(e.is_zero())
    }

    fn add_scaled(&self, acc: &mut CohomClass, e: &CohomClass, c: &Rational) -> Result<()> {
        let scaled = self.structure.scale_class(e, c);
        *acc = self.structure.add_classes(acc, &scaled)?;
        Ok(())
    }

    fn operation(&self, args: &[Homogeneous<CohomClass>]) -> Result<CohomClass> {
        let cs: Vec<CohomClass> = args.iter().map(|a| a.value.clone()).collect();
        self.structure.poisson_bracket(&cs)
    }

    fn render(&self, e: &CohomClass) -> String {
        e.to_string()
    }
}

/// `A + g` with `A` in degree 0 and `g` in degree 1 and the graded-symmetric
/// binary bracket `[a, y] = D_y a`, `[x, b] = D_x b`, `[x, y]` the Lie bracket,
/// `[a, b] = 0`. Elements are tensors of word length at most one.
#[derive(Debug, Clone)]
pub struct AssociatedGraded {
    pub pair: Arc<Pair>,
}

impl AssociatedGraded {
    pub fn new(pair: impl Into<Arc<Pair>>) -> Self {
        AssociatedGraded { pair: pair.into() }
    }
}

impl LInfinity for AssociatedGraded {
    type Element = Tensor;

    fn zero(&self) -> Tensor {
        Tensor::zero()
    }

    fn is_zero(&self, e: &Tensor) -> Result<bool> {
        Ok(e.is_zero())
    }

    fn add_scaled(&self, acc: &mut Tensor, e: &Tensor, c: &Rational) -> Result<()> {
        acc.add_scaled(e, c);
        Ok(())
    }

    fn operation(&self, args: &[Homogeneous<Tensor>]) -> Result<Tensor> {
        let [u, v] = args else {
            return Ok(Tensor::zero());
        };
        let p = &self.pair;
        let scalar = |x: &Tensor| x.coeff(crate::calculus::Word::EMPTY);
        Ok(match (u.degree, v.degree) {
            (0, 1) => Tensor::scalar(p.action(&v.value, &scalar(&u.value))?),
            (1, 0) => Tensor::scalar(p.action(&u.value, &scalar(&v.value))?),
            (1, 1) => p.lie_bracket(&u.value, &v.value)?,
            (0, 0) => Tensor::zero(),
            (a, b) => {
                return Err(Error::WrongDegree {
                    expected: 1,
                    found: format!("arguments of degree {a} and {b}"),
                })
            }
        })
    }

    fn render(&self, e: &Tensor) -> String {
        e.to_string()
    }
}

/// A family `f_k` of graded symmetric degree-0 maps from `D` to `C`.
pub trait MultiMap<D: LInfinity, C: LInfinity> {
    fn component(&self, args: &[Homogeneous<D::Element>]) -> Result<C::Element>;
    /// `f_k = 0` for every `k >= 2`.
    fn is_strict(&self) -> bool;
}

/// The map that is zero in every arity.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroMap;

impl<D: LInfinity, C: LInfinity<Element = E>, E: Clone> MultiMap<D, C> for (ZeroMap, &C) {
    fn component(&self, _args: &[Homogeneous<D::Element>]) -> Result<E> {
        Ok(self.1.zero())
    }

    fn is_strict(&self) -> bool {
        true
    }
}

/// `f_k(x_1..x_k) = (-1)^{k-1} (k-1)! x_k ^ .. ^ x_1` from the associated
/// graded algebra into the tensor algebra.
#[derive(Debug, Clone, Copy, Default)]
pub struct NaturalInclusion;

impl MultiMap<AssociatedGraded, TensorLInfinity> for NaturalInclusion {
    fn component(&self, args: &[Homogeneous<Tensor>]) -> Result<Tensor> {
        let xs: Vec<Tensor> = args.iter().map(|a| a.value.clone()).collect();
        Ok(natural_inclusion_unchecked(&xs))
    }

    fn is_strict(&self) -> bool {
        false
    }
}

/// Components on basis multisets of a finite domain, extended by graded
/// symmetry and multilinearity. Missing entries are zero.
#[derive(Debug, Clone)]
pub struct MultiMapFamily<E> {
    pub components: BTreeMap<Vec<usize>, E>,
}

impl<E> MultiMapFamily<E> {
    pub fn new(components: BTreeMap<Vec<usize>, E>) -> Self {
        MultiMapFamily { components }
    }
}

impl<C: LInfinity> MultiMap<FiniteLInfinity, C> for (&MultiMapFamily<C::Element>, &FiniteLInfinity, &C) {
    fn component(&self, args: &[Homogeneous<Vec<Rational>>]) -> Result<C::Element> {
        let (family, dom, cod) = *self;
        let mut out = cod.zero();
        let supports: Vec<Vec<usize>> = args
            .iter()
            .map(|a| a.value.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, _)| i).collect())
            .collect();
        if supports.iter().any(Vec::is_empty) {
            return Ok(out);
        }
        let mut pos = vec![0usize; args.len()];
        loop {
            let idx: Vec<usize> = pos.iter().zip(&supports).map(|(&p, s)| s[p]).collect();
            let (sorted, odd) = sort_with_sign(&idx, dom.degrees());
            if let Some(v) = family.components.get(&sorted) {
                let mut c = sign(odd);
                for (a, &i) in args.iter().zip(&idx) {
                    c *= &a.value[i];
                }
                cod.add_scaled(&mut out, v, &c)?;
            }
            let mut p = 0;
            loop {
                if p == pos.len() {
                    return Ok(out);
                }
                pos[p] += 1;
                if pos[p] < supports[p].len() {
                    break;
                }
                pos[p] = 0;
                p += 1;
            }
        }
    }

    fn is_strict(&self) -> bool {
        let (family, _, cod) = *self;
        family
            .components
            .iter()
            .all(|(k, v)| k.len() < 2 || cod.is_zero(v).unwrap_or(false))
    }
}

/// Both sides of the weak morphism equation at arity `xs.len()`:
/// `sum_{p+q=n+1} sum_{Sh(q,p-1)} e(s) f_p(D_q(..), ..)` and
/// `sum_p 1/p! sum_{k_1+..+k_p=n} sum_{Sh(k_1..k_p)} e(s) l_p(f_{k_1}(..), .., f_{k_p}(..))`.
pub fn morphism_sides<D, C, F>(
    dom: &D,
    cod: &C,
    f: &F,
    xs: &[Homogeneous<D::Element>],
) -> Result<(C::Element, C::Element)>
where
    D: LInfinity,
    C: LInfinity,
    F: MultiMap<D, C>,
{
    let n = xs.len();
    let degs: Vec<i64> = xs.iter().map(|x| x.degree).collect();
    let cap = n.max(DEFAULT_ARITY_CAP);
    let mut lhs = cod.zero();
    for p in 1..=n {
        let q = n + 1 - p;
        for s in enumerate_shuffles_with_cap(&[q, p - 1], cap)?.iter() {
            let im = s.zero_based();
            let inner_args = pick(xs, &im[..q]);
            let inner = dom.operation(&inner_args)?;
            if dom.is_zero(&inner)? {
                continue;
            }
            let mut args = vec![Homogeneous::new(inner, total_degree(&inner_args) - 1)];
            args.extend(pick(xs, &im[q..]));
            let v = f.component(&args)?;
            cod.add_scaled(&mut lhs, &v, &sign(koszul_odd(im, &degs)))?;
        }
    }
    let mut rhs = cod.zero();
    for p in 1..=n {
        let weight = Rational::from(factorial(p)).recip();
        for ks in compositions(n, p) {
            for s in enumerate_shuffles_with_cap(&ks, cap)?.iter() {
                let im = s.zero_based();
                let mut args = Vec::with_capacity(p);
                let mut start = 0;
                let mut vanishes = false;
                for &k in &ks {
                    let block = pick(xs, &im[start..start + k]);
                    start += k;
                    let v = f.component(&block)?;
                    if cod.is_zero(&v)? {
                        vanishes = true;
                        break;
                    }
                    args.push(Homogeneous::new(v, total_degree(&block)));
                }
                if vanishes {
                    continue;
                }
                let v = cod.operation(&args)?;
                cod.add_scaled(&mut rhs, &v, &(sign(koszul_odd(im, &degs)) * &weight))?;
            }
        }
    }
    Ok((lhs, rhs))
}

pub fn morphism_residual<D, C, F>(dom: &D, cod: &C, f: &F, xs: &[Homogeneous<D::Element>]) -> Result<C::Element>
where
    D: LInfinity,
    C: LInfinity,
    F: MultiMap<D, C>,
{
    let (mut lhs, rhs) = morphism_sides(dom, cod, f, xs)?;
    cod.add_scaled(&mut lhs, &rhs, &Rational::from(-1))?;
    Ok(lhs)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MorphismReport {
    pub max_arity: usize,
    pub tuples_checked: usize,
    pub failures: usize,
    pub strict: bool,
    pub passed: bool,
    pub worst: Option<TupleResidual>,
    pub residuals: Vec<TupleResidual>,
}

/// The morphism equation on the given tuples.
pub fn check_morphism_on<D, C, F>(
    dom: &D,
    cod: &C,
    f: &F,
    tuples: &[LabeledTuple<D::Element>],
) -> Result<MorphismReport>
where
    D: LInfinity,
    C: LInfinity,
    F: MultiMap<D, C>,
{
    let mut all = Vec::with_capacity(tuples.len());
    let mut max_arity = 0;
    for (label, xs) in tuples {
        max_arity = max_arity.max(xs.len());
        let r = morphism_residual(dom, cod, f, xs)?;
        all.push(residual_entry(cod, label.clone(), &r)?);
    }
    let s = summarize(String::new(), max_arity, all, true);
    Ok(MorphismReport {
        max_arity,
        tuples_checked: s.tuples_checked,
        failures: s.failures,
        strict: f.is_strict(),
        passed: s.passed,
        worst: s.worst,
        residuals: s.residuals,
    })
}

/// The morphism equation on every basis multiset of a finite domain.
pub fn check_morphism<C, F>(dom: &FiniteLInfinity, cod: &C, f: &F, arity: usize) -> Result<MorphismReport>
where
    C: LInfinity,
    F: MultiMap<FiniteLInfinity, C>,
{
    let mut tuples = Vec::new();
    for k in 1..=arity {
        for idx in multisets(dom.dimension(), k) {
            tuples.push((dom.labels(&idx), dom.basis_tuple(&idx)));
        }
    }
    check_morphism_on(dom, cod, f, &tuples)
}

/// Components of a candidate momentum map: basis multisets of the domain
/// to extension elements that should be cocycles.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumCandidate {
    pub components: BTreeMap<Vec<usize>, ExtensionElement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GateEntry {
    pub tuple: Vec<String>,
    pub cocycle: bool,
    /// `i_x omega - df` when nonzero.
    pub residual: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MomentumReport {
    pub gate: Vec<GateEntry>,
    pub gate_passed: bool,
    pub morphism: Option<MorphismReport>,
    pub certified: bool,
}

/// Checks that every component is a cocycle, then runs the morphism check
/// into Hamiltonian cohomology.
pub fn check_momentum_map(
    dom: &FiniteLInfinity,
    s: &NPlecticStructure,
    j: &MomentumCandidate,
    arity: usize,
) -> Result<MomentumReport> {
    let mut gate = Vec::new();
    let mut classes = BTreeMap::new();
    for (idx, e) in &j.components {
        let label = dom.labels(idx);
        match s.class_of(e) {
            Ok(c) => {
                gate.push(GateEntry {
                    tuple: label,
                    cocycle: true,
                    residual: None,
                });
                classes.insert(idx.clone(), c);
            }
            Err(Error::NotACocycle { residual }) => gate.push(GateEntry {
                tuple: label,
                cocycle: false,
                residual: Some(residual),
            }),
            Err(e) => return Err(e),
        }
    }
    let gate_passed = gate.iter().all(|g| g.cocycle);
    if !gate_passed {
        return Ok(MomentumReport {
            gate,
            gate_passed,
            morphism: None,
            certified: false,
        });
    }
    let cod = HamiltonianCohomology { structure: s };
    let family = MultiMapFamily::new(classes);
    let report = check_morphism(dom, &cod, &(&family, dom, &cod), arity)?;
    Ok(MomentumReport {
        gate,
        gate_passed,
        certified: report.passed,
        morphism: Some(report),
    })
}

impl fmt::Display for CohomClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}; {}]", self.potential, self.tensor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{Cotensor, Word};
    use crate::scalar::Poly;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn lie_algebras_are_linf() {
        for pair in [Pair::su2(), Pair::heisenberg()] {
            let l = FiniteLInfinity::from_lie_algebra(&pair).unwrap();
            let r = check_linf(&l, 4).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn abelian_complex() {
        // D_1 e1 = e2 with e1 in degree 1 and e2 in degree 0
        let l = FiniteLInfinity::new("complex", vec![1, 0], vec![(vec![0], vec![q(0), q(1)])]).unwrap();
        assert!(check_linf(&l, 3).unwrap().passed);
    }

    #[test]
    fn corrupted_table_is_caught() {
        let mut l = FiniteLInfinity::from_lie_algebra(&Pair::su2()).unwrap();
        l.corrupt(vec![0, 2], vec![q(1), q(0), q(0)]);
        let r = check_linf(&l, 3).unwrap();
        assert!(!r.passed);
        assert_eq!(r.worst.as_ref().unwrap().tuple.len(), 3);
    }

    #[test]
    fn table_validation() {
        assert!(FiniteLInfinity::new("x", vec![1, 1], vec![(vec![0, 1], vec![q(1), q(0)])]).is_ok());
        assert!(matches!(
            FiniteLInfinity::new("x", vec![1, 0], vec![(vec![0, 1], vec![q(1), q(0)])]),
            Err(Error::WrongDegree { .. })
        ));
        assert!(FiniteLInfinity::new("x", vec![1], vec![(vec![0, 0], vec![q(1)])]).is_err());
        // reversed order picks up the sign
        let l = FiniteLInfinity::new("x", vec![1, 1, 1], vec![(vec![1, 0], vec![q(0), q(0), q(1)])]).unwrap();
        assert_eq!(l.entries().next().unwrap(), (&vec![0, 1], &vec![q(0), q(0), q(-1)]));
    }

    #[test]
    fn identity_is_strict_morphism() {
        let l = FiniteLInfinity::from_lie_algebra(&Pair::su2()).unwrap();
        let id = MultiMapFamily::new((0..3).map(|i| (vec![i], l.basis(i))).collect());
        let r = check_morphism(&l, &l, &(&id, &l, &l), 3).unwrap();
        assert!(r.passed && r.strict);
        let z = check_morphism(&l, &l, &(ZeroMap, &l), 3).unwrap();
        assert!(z.passed && z.strict);
    }

    #[test]
    fn sign_swap_meta() {
        let pair = Arc::new(Pair::poly(2).unwrap());
        let (dom, cod) = (AssociatedGraded::new(pair.clone()), TensorLInfinity::new(pair));
        let a = Homogeneous::new(Tensor::scalar("x1*x2".parse::<Poly>().unwrap()), 0);
        let x = Homogeneous::new(Tensor::term(Word::single(0), "x2".parse().unwrap()), 1);
        let y = Homogeneous::new(Tensor::term(Word::single(1), "x1^2".parse().unwrap()), 1);
        let (l1, r1) = morphism_sides(&dom, &cod, &NaturalInclusion, &[a.clone(), x.clone(), y.clone()]).unwrap();
        let (l2, r2) = morphism_sides(&dom, &cod, &NaturalInclusion, &[a, y, x]).unwrap();
        assert_eq!(l1, -l2);
        assert_eq!(r1, -r2);
        assert_eq!(l1, r1);
    }

    #[test]
    fn rotation_momentum_map() {
        let s = NPlecticStructure::symplectic_plane();
        let x = Tensor::term(Word::single(1), "x1".parse().unwrap()) - Tensor::term(Word::single(0), "x2".parse().unwrap());
        let f = s.hamiltonian_potential(&x).unwrap().unwrap();
        let dom = FiniteLInfinity::abelian(1);
        let good = MomentumCandidate {
            components: [(vec![0], ExtensionElement::new(f.clone(), x.clone()))].into(),
        };
        let r = check_momentum_map(&dom, &s, &good, 3).unwrap();
        assert!(r.certified, "{r:?}");
        let bad = MomentumCandidate {
            components: [(vec![0], ExtensionElement::new(f + Cotensor::scalar("x1".parse().unwrap()), x))].into(),
        };
        let r = check_momentum_map(&dom, &s, &bad, 3).unwrap();
        assert!(!r.gate_passed && !r.certified);
    }
}
