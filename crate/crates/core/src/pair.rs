//! Concrete torsionless Lie-Rinehart pairs.
//!
//! Two families are supported. A constant pair has `A = Q`, trivial anchor
//! and a Lie algebra given by structure constants. A polynomial vector
//! field pair has `A = Q[x_1..x_m]` and `g` free on the partial derivatives.
//! Both have `g` free over `A`, so torsionless by construction.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::calculus::{Cotensor, Graded, Kind, Tensor, Word};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::random::Sampler;
use crate::scalar::{Poly, Rational};

/// `[e_i, e_j]` has coefficient `value` on `e_k`; indices are 0-based and
/// `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureConstant {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairDescriptor {
    Constant {
        dimension: usize,
        constants: Vec<StructureConstant>,
    },
    PolyVectorField {
        variables: usize,
    },
}

/// Largest rank accepted for `g`.
pub const MAX_RANK: usize = 16;

/// A validated pair with its bracket table expanded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pair {
    descriptor: PairDescriptor,
    dim: usize,
    nvars: usize,
    // table[i][j] = [e_i, e_j] as sparse (k, c) pairs
    table: Vec<Vec<Vec<(usize, Rational)>>>,
}

impl Pair {
    pub fn new(descriptor: PairDescriptor) -> Result<Pair> {
        match &descriptor {
            PairDescriptor::Constant {
                dimension,
                constants,
            } => {
                let d = *dimension;
                if d == 0 || d > MAX_RANK {
                    return Err(Error::Argument(format!(
                        "dimension must be in 1..={MAX_RANK}, got {d}"
                    )));
                }
                let mut table = vec![vec![Vec::new(); d]; d];
                let mut seen = BTreeMap::new();
                for c in constants {
                    if c.i >= c.j || c.j >= d || c.k >= d {
                        return Err(Error::Argument(format!(
                            "structure constant ({}, {}, {}) needs i < j <= {d} and k <= {d}",
                            c.i + 1,
                            c.j + 1,
                            c.k + 1
                        )));
                    }
                    if seen.insert((c.i, c.j, c.k), ()).is_some() {
                        return Err(Error::Argument(format!(
                            "structure constant ({}, {}, {}) given twice",
                            c.i + 1,
                            c.j + 1,
                            c.k + 1
                        )));
                    }
                    if c.value.is_zero() {
                        continue;
                    }
                    table[c.i][c.j].push((c.k, c.value.clone()));
                    table[c.j][c.i].push((c.k, -&c.value));
                }
                for row in &mut table {
                    for entry in row {
                        entry.sort_by_key(|(k, _)| *k);
                    }
                }
                Ok(Pair {
                    descriptor,
                    dim: d,
                    nvars: 0,
                    table,
                })
            }
            PairDescriptor::PolyVectorField { variables } => {
                let m = *variables;
                if m == 0 || m > MAX_RANK {
                    return Err(Error::Argument(format!(
                        "variable count must be in 1..={MAX_RANK}, got {m}"
                    )));
                }
                Ok(Pair {
                    descriptor,
                    dim: m,
                    nvars: m,
                    table: vec![vec![Vec::new(); m]; m],
                })
            }
        }
    }

    /// Builds a constant pair from 1-based `(i, j, k, value)` entries.
    pub fn constant(dimension: usize, entries: &[(usize, usize, usize, i64)]) -> Result<Pair> {
        let constants = entries
            .iter()
            .map(|&(i, j, k, v)| {
                if i == 0 || j == 0 || k == 0 {
                    return Err(Error::Argument("indices are 1-based".into()));
                }
                Ok(StructureConstant {
                    i: i - 1,
                    j: j - 1,
                    k: k - 1,
                    value: Rational::from(v),
                })
            })
            .collect::<Result<_>>()?;
        Pair::new(PairDescriptor::Constant {
            dimension,
            constants,
        })
    }

    /// `su(2)` with `[e1,e2] = e3`, `[e2,e3] = e1`, `[e3,e1] = e2`.
    pub fn su2() -> Pair {
        Pair::constant(3, &[(1, 2, 3, 1), (2, 3, 1, 1), (1, 3, 2, -1)]).unwrap()
    }

    /// Three-dimensional Heisenberg algebra, `[e1,e2] = e3`.
    pub fn heisenberg() -> Pair {
        Pair::constant(3, &[(1, 2, 3, 1)]).unwrap()
    }

    pub fn abelian(d: usize) -> Result<Pair> {
        Pair::constant(d, &[])
    }

    /// Polynomial vector fields in `m` variables.
    pub fn poly(m: usize) -> Result<Pair> {
        Pair::new(PairDescriptor::PolyVectorField { variables: m })
    }

    pub fn descriptor(&self) -> &PairDescriptor {
        &self.descriptor
    }

    /// Rank of `g` over `A`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of polynomial variables of `A` (zero for the constant family).
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_poly(&self) -> bool {
        matches!(self.descriptor, PairDescriptor::PolyVectorField { .. })
    }

    pub fn family_name(&self) -> &'static str {
        if self.is_poly() {
            "poly_vector_field"
        } else {
            "constant"
        }
    }

    /// `D_{e_i}(a)`.
    pub fn basis_action(&self, i: usize, a: &Poly) -> Poly {
        if self.is_poly() {
            a.derivative(i)
        } else {
            Poly::zero()
        }
    }

    /// `[e_i, e_j]` as sparse `(k, c)` pairs.
    pub fn basis_bracket(&self, i: usize, j: usize) -> &[(usize, Rational)] {
        &self.table[i][j]
    }

    pub fn check_coeff(&self, a: &Poly) -> Result<()> {
        if self.is_poly() {
            if a.span() > self.nvars {
                return Err(Error::PairMismatch(format!(
                    "coefficient {a} uses more than {} variables",
                    self.nvars
                )));
            }
        } else if a.as_constant().is_none() {
            return Err(Error::PairMismatch(format!(
                "constant pair needs rational coefficients, got {a}"
            )));
        }
        Ok(())
    }

    pub fn check<K: Kind>(&self, g: &Graded<K>) -> Result<()> {
        if g.basis_span() > self.dim {
            return Err(Error::PairMismatch(format!(
                "element {g} uses basis indices beyond {}",
                self.dim
            )));
        }
        for (_, c) in g.terms() {
            self.check_coeff(c)?;
        }
        Ok(())
    }

    pub(crate) fn check_vector(&self, x: &Tensor) -> Result<()> {
        self.check(x)?;
        if x.terms().any(|(w, _)| w.len() != 1) {
            return Err(Error::WrongDegree {
                expected: 1,
                found: x.to_string(),
            });
        }
        Ok(())
    }

    /// Lie bracket of two elements of `g`:
    /// `[a e_i, b e_j] = a D_i(b) e_j - b D_j(a) e_i + ab [e_i, e_j]`.
    pub fn lie_bracket(&self, x: &Tensor, y: &Tensor) -> Result<Tensor> {
        self.check_vector(x)?;
        self.check_vector(y)?;
        Ok(self.lie_bracket_unchecked(x, y))
    }

    pub(crate) fn lie_bracket_unchecked(&self, x: &Tensor, y: &Tensor) -> Tensor {
        let mut out = Tensor::zero();
        for (wi, a) in x.terms() {
            let i = wi.indices().next().unwrap();
            for (wj, b) in y.terms() {
                let j = wj.indices().next().unwrap();
                out.add_term(*wj, &(a * &self.basis_action(i, b)));
                out.add_term(*wi, &-(b * &self.basis_action(j, a)));
                let ab = a * b;
                for (k, c) in self.basis_bracket(i, j) {
                    out.add_term(Word::single(*k), &ab.scale(c));
                }
            }
        }
        out
    }

    /// Anchor `D_x(a)`.
    pub fn action(&self, x: &Tensor, a: &Poly) -> Result<Poly> {
        self.check_vector(x)?;
        self.check_coeff(a)?;
        Ok(self.action_unchecked(x, a))
    }

    pub(crate) fn action_unchecked(&self, x: &Tensor, a: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (w, c) in x.terms() {
            let i = w.indices().next().unwrap();
            out = out + c * &self.basis_action(i, a);
        }
        out
    }

    /// `((a, x), (b, y)) -> (D_x(a) + D_y(b), [x, y])`, evaluated exactly as
    /// written. The A-component is not the graded-symmetric one; the
    /// associated graded L-infinity algebra in [`crate::linf`] uses the
    /// symmetric form instead.
    pub fn associated_graded_bracket(
        &self,
        u: (&Poly, &Tensor),
        v: (&Poly, &Tensor),
    ) -> Result<(Poly, Tensor)> {
        let a = self.action(u.1, u.0)? + self.action(v.1, v.0)?;
        Ok((a, self.lie_bracket(u.1, v.1)?))
    }

    fn random_vector(&self, s: &mut Sampler) -> Tensor {
        s.tensor(self, 1, 3, 2)
    }

    /// Checks the pair axioms on all basis triples and, for the polynomial
    /// family, on `samples` seeded random inputs with coefficient degree at
    /// most 3.
    pub fn validate(&self, seed: u64, samples: usize) -> ValidationReport {
        let mut s = Sampler::new(seed);
        let mut report = ValidationReport::default();
        let basis: Vec<Tensor> = (0..self.dim).map(|i| Tensor::basis(Word::single(i))).collect();

        let mut jac = Check::new("jacobi");
        let jacobi = |x: &Tensor, y: &Tensor, z: &Tensor| {
            let b = |p: &Tensor, q: &Tensor| self.lie_bracket_unchecked(p, q);
            b(x, &b(y, z)) + b(y, &b(z, x)) + b(z, &b(x, y))
        };
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                for k in j + 1..self.dim {
                    let r = jacobi(&basis[i], &basis[j], &basis[k]);
                    jac.record(r.is_zero(), || {
                        format!("(e{}, e{}, e{}) -> {r}", i + 1, j + 1, k + 1)
                    });
                }
            }
        }
        let mut der = Check::new("derivation");
        let mut leib = Check::new("leibniz");
        let mut morph = Check::new("anchor_morphism");
        let n = self.nvars;
        for _ in 0..samples {
            let (x, y, z) = (
                self.random_vector(&mut s),
                self.random_vector(&mut s),
                self.random_vector(&mut s),
            );
            if self.is_poly() {
                let r = jacobi(&x, &y, &z);
                jac.record(r.is_zero(), || format!("({x}, {y}, {z}) -> {r}"));
            }
            let a = s.poly(n, 3, 3);
            let b = s.poly(n, 3, 3);
            let d = |v: &Tensor, p: &Poly| self.action_unchecked(v, p);
            let lhs = d(&x, &(&a * &b));
            let rhs = &d(&x, &a) * &b + &a * &d(&x, &b);
            der.record(lhs == rhs, || format!("x = {x}, a = {a}, b = {b}"));

            let lhs = self.lie_bracket_unchecked(&x, &y.mul_poly(&a));
            let rhs = y.mul_poly(&d(&x, &a)) + self.lie_bracket_unchecked(&x, &y).mul_poly(&a);
            leib.record(lhs == rhs, || format!("x = {x}, a = {a}, y = {y}"));

            let lhs = d(&self.lie_bracket_unchecked(&x, &y), &a);
            let rhs = d(&x, &d(&y, &a)) - d(&y, &d(&x, &a));
            morph.record(lhs == rhs, || format!("x = {x}, y = {y}, a = {a}"));
        }
        let mut pairing = Check::new("pairing_nondegenerate");
        let mut m = Matrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for (j, x) in basis.iter().enumerate() {
                let f = Cotensor::basis(Word::single(i));
                let v = self.pairing_unchecked(&f, x);
                m.set(i, j, v.constant_term());
            }
        }
        let rank = m.rank();
        pairing.record(rank == self.dim, || {
            format!("pairing matrix has rank {rank} < {}", self.dim)
        });
        report.checks = vec![jac, der, leib, morph, pairing];
        report
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.descriptor {
            PairDescriptor::Constant { dimension, .. } => write!(f, "constant pair of dimension {dimension}"),
            PairDescriptor::PolyVectorField { variables } => {
                write!(f, "polynomial vector fields in {variables} variables")
            }
        }
    }
}

/// Outcome of one axiom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub instances: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    pub fn new(name: &str) -> Check {
        Check {
            name: name.to_string(),
            passed: true,
            instances: 0,
            witness: None,
        }
    }

    /// Records one instance; the first failure is kept as the witness.
    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            if self.passed {
                self.witness = Some(witness());
            }
            self.passed = false;
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// A candidate morphism `(f, g)` given on generators: `f` by the images of
/// the variables of the domain algebra, `g` by the images of the basis of
/// the domain Lie algebra.
#[derive(Debug, Clone)]
pub struct PairMorphismCandidate {
    pub domain: Pair,
    pub codomain: Pair,
    pub f_generators: Vec<Poly>,
    pub g_basis: Vec<Tensor>,
}

impl PairMorphismCandidate {
    pub fn new(domain: Pair, codomain: Pair, f_generators: Vec<Poly>, g_basis: Vec<Tensor>) -> Result<Self> {
        if f_generators.len() != domain.nvars() {
            return Err(Error::Argument(format!(
                "f needs {} generator images, got {}",
                domain.nvars(),
                f_generators.len()
            )));
        }
        if g_basis.len() != domain.dim() {
            return Err(Error::Argument(format!(
                "g needs {} basis images, got {}",
                domain.dim(),
                g_basis.len()
            )));
        }
        for p in &f_generators {
            codomain.check_coeff(p)?;
        }
        for x in &g_basis {
            codomain.check_vector(x)?;
        }
        Ok(PairMorphismCandidate {
            domain,
            codomain,
            f_generators,
            g_basis,
        })
    }

    pub fn identity(pair: &Pair) -> Self {
        let f = (0..pair.nvars()).map(Poly::var).collect();
        let g = (0..pair.dim()).map(|i| Tensor::basis(Word::single(i))).collect();
        Self::new(pair.clone(), pair.clone(), f, g).unwrap()
    }

    pub fn apply_f(&self, a: &Poly) -> Poly {
        a.substitute(&self.f_generators)
    }

    /// `g(sum a_i e_i) = sum f(a_i) g(e_i)`.
    pub fn apply_g(&self, x: &Tensor) -> Tensor {
        let mut out = Tensor::zero();
        for (w, a) in x.terms() {
            let i = w.indices().next().unwrap();
            out = out + self.g_basis[i].mul_poly(&self.apply_f(a));
        }
        out
    }
}

/// Checks the morphism equations `g(a x) = f(a) g(x)`,
/// `f(D_x a) = D_{g x}(f a)`, multiplicativity of `f` and compatibility of
/// `g` with brackets, on generators and seeded random samples.
pub fn validate_morphism(c: &PairMorphismCandidate, seed: u64, samples: usize) -> ValidationReport {
    let mut s = Sampler::new(seed);
    let dom = &c.domain;
    let cod = &c.codomain;
    let basis: Vec<Tensor> = (0..dom.dim()).map(|i| Tensor::basis(Word::single(i))).collect();

    let mut alg = Check::new("algebra_morphism");
    let one = c.apply_f(&Poly::one());
    alg.record(one.is_one(), || format!("f(1) = {one}"));
    let mut lie = Check::new("lie_morphism");
    for i in 0..dom.dim() {
        for j in i + 1..dom.dim() {
            let lhs = c.apply_g(&dom.lie_bracket_unchecked(&basis[i], &basis[j]));
            let rhs = cod.lie_bracket_unchecked(&c.g_basis[i], &c.g_basis[j]);
            lie.record(lhs == rhs, || {
                format!(
                    "g([e{}, e{}]) = {lhs} but [g(e{}), g(e{})] = {rhs}",
                    i + 1,
                    j + 1,
                    i + 1,
                    j + 1
                )
            });
        }
    }
    let mut module = Check::new("module_compatibility");
    let mut anchor = Check::new("anchor_compatibility");
    for (i, x) in basis.iter().enumerate() {
        for v in 0..dom.nvars() {
            let a = Poly::var(v);
            let lhs = c.apply_f(&dom.action_unchecked(x, &a));
            let rhs = cod.action_unchecked(&c.g_basis[i], &c.apply_f(&a));
            anchor.record(lhs == rhs, || {
                format!("f(D_e{}(x{})) = {lhs} but D_g(e{})(f(x{})) = {rhs}", i + 1, v + 1, i + 1, v + 1)
            });
        }
    }
    for _ in 0..samples {
        let a = s.poly(dom.nvars(), 3, 3);
        let b = s.poly(dom.nvars(), 3, 3);
        let lhs = c.apply_f(&(&a * &b));
        let rhs = &c.apply_f(&a) * &c.apply_f(&b);
        alg.record(lhs == rhs, || format!("f({a} * {b}) = {lhs} but f(a) f(b) = {rhs}"));

        let x = s.tensor(dom, 1, 3, 2);
        let lhs = c.apply_g(&x.mul_poly(&a));
        let rhs = c.apply_g(&x).mul_poly(&c.apply_f(&a));
        module.record(lhs == rhs, || format!("g(a x) = {lhs} but f(a) g(x) = {rhs} for a = {a}, x = {x}"));

        let lhs = c.apply_f(&dom.action_unchecked(&x, &a));
        let rhs = cod.action_unchecked(&c.apply_g(&x), &c.apply_f(&a));
        anchor.record(lhs == rhs, || format!("x = {x}, a = {a}: {lhs} vs {rhs}"));

        if dom.is_poly() {
            let y = s.tensor(dom, 1, 3, 2);
            let lhs = c.apply_g(&dom.lie_bracket_unchecked(&x, &y));
            let rhs = cod.lie_bracket_unchecked(&c.apply_g(&x), &c.apply_g(&y));
            lie.record(lhs == rhs, || format!("x = {x}, y = {y}: {lhs} vs {rhs}"));
        }
    }
    ValidationReport {
        checks: vec![alg, lie, module, anchor],
    }
}
