//! Seeded verification suites. Each returns a serializable result whose
//! `passed` field summarizes it; identical seeds give identical results.

use std::sync::Arc;

use serde::Serialize;

use crate::calculus::{Cotensor, Tensor, Word};
use crate::cohomology::{ce_cohomology_table, cohomology_table, CohomClass, RankRow, Slice};
use crate::error::Result;
use crate::linf::{
    check_morphism_on, check_momentum_map, jacobi_residual, AssociatedGraded, ExtensionLInfinity,
    FiniteLInfinity, HamiltonianCohomology, Homogeneous, MomentumCandidate, MomentumReport,
    MorphismReport, NaturalInclusion, TensorLInfinity,
};
use crate::nplectic::{ExtensionElement, NPlecticStructure};
use crate::pair::{Check, Pair};
use crate::random::Sampler;
use crate::scalar::Rational;

/// Largest coefficient degree of random inputs.
pub const MAX_POLY_DEGREE: u32 = 3;
/// Largest tensor degree of random inputs.
pub const MAX_TENSOR_DEGREE: usize = 3;

fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CartanReport {
    pub family: String,
    pub rules: Vec<Check>,
    /// Rule iii with `L_x L_x f` in place of `L_x L_y f`. Not part of
    /// `passed`; it fails on generic inputs.
    pub rule_iii_verbatim: Check,
    pub passed: bool,
}

/// The four Cartan calculus rules on random homogeneous `x`, `y`, `f`:
/// `d L_x f = (-1)^{|x|-1} L_x d f`,
/// `i_{[x,y]} f = (-1)^{(|x|-1)|y|} L_x i_y f - i_y L_x f`,
/// `L_{[x,y]} f = (-1)^{(|x|-1)(|y|-1)} L_x L_y f - L_y L_x f`,
/// `L_{x^y} f = (-1)^{|y|} i_y L_x f + L_y i_x f`.
pub fn cartan_rules(pair: &Pair, seed: u64, instances: usize) -> CartanReport {
    let mut s = Sampler::new(seed);
    let names = ["rule_i", "rule_ii", "rule_iii", "rule_iv"];
    let mut rules: Vec<Check> = names.iter().map(|n| Check::new(n)).collect();
    let mut verbatim = Check::new("rule_iii_verbatim");
    let top = MAX_TENSOR_DEGREE.min(pair.dim());
    let l = |x: &Tensor, f: &Cotensor| pair.lie_derivative_unchecked(x, f);
    let i = |x: &Tensor, f: &Cotensor| crate::calculus::contract_unchecked(x, f);
    let d = |f: &Cotensor| pair.d(f);
    let sg = |e: i64| Rational::sign_power(e);
    for _ in 0..instances {
        let (dx, dy, df) = (s.range(0, top), s.range(0, top), s.range(0, top));
        let x = s.tensor(pair, dx, MAX_POLY_DEGREE, 2);
        let y = s.tensor(pair, dy, MAX_POLY_DEGREE, 2);
        let f = s.cotensor(pair, df, MAX_POLY_DEGREE, 2);
        let (ex, ey) = (dx as i64, dy as i64);
        let show = || format!("x = {x}, y = {y}, f = {f}");
        let sxy = pair.schouten_unchecked(&x, &y);
        let lxf = l(&x, &f);

        let lhs = d(&lxf);
        let rhs = l(&x, &d(&f)).scale(&sg(ex - 1));
        rules[0].record(lhs == rhs, show);

        let lhs = i(&sxy, &f);
        let rhs = l(&x, &i(&y, &f)).scale(&sg((ex - 1) * ey)) - i(&y, &lxf);
        rules[1].record(lhs == rhs, show);

        let lhs = l(&sxy, &f);
        let tail = l(&y, &lxf);
        let rhs = l(&x, &l(&y, &f)).scale(&sg((ex - 1) * (ey - 1))) - tail.clone();
        rules[2].record(lhs == rhs, show);
        let rhs_verbatim = l(&x, &lxf).scale(&sg((ex - 1) * (ey - 1))) - tail;
        verbatim.record(lhs == rhs_verbatim, show);

        let lhs = l(&x.wedge(&y), &f);
        let rhs = i(&y, &lxf).scale(&sg(ey)) + l(&y, &i(&x, &f));
        rules[3].record(lhs == rhs, show);
    }
    CartanReport {
        family: pair.family_name().to_string(),
        passed: all_passed(&rules),
        rules,
        rule_iii_verbatim: verbatim,
    }
}

/// `d(d f) = 0` on random cotensors of every length.
pub fn d_squared(pair: &Pair, seed: u64, instances: usize) -> Check {
    let mut s = Sampler::new(seed);
    let mut c = Check::new("d_squared");
    for _ in 0..instances {
        let len = s.range(0, pair.dim());
        let f = s.cotensor(pair, len, MAX_POLY_DEGREE, 3);
        let dd = pair.d(&pair.d(&f));
        c.record(dd.is_zero(), || format!("f = {f}, d(d(f)) = {dd}"));
    }
    c
}

/// Tensor degrees that carry nonzero symplectic tensors within coefficient
/// degree `max_poly`.
pub fn symplectic_degrees(st: &NPlecticStructure, max_poly: i64) -> Result<Vec<i64>> {
    let top = if st.pair().is_poly() { max_poly } else { 0 };
    let mut out = Vec::new();
    for k in 0..=st.pair().dim() as i64 {
        let mut any = false;
        for q in 0..=top {
            any |= !st.symplectic_vectors(k, q)?.rows.is_empty();
        }
        if any {
            out.push(k);
        }
    }
    Ok(out)
}

fn nonzero_symplectic(st: &NPlecticStructure, s: &mut Sampler, k: i64, max_poly: i64) -> Result<Tensor> {
    for _ in 0..16 {
        let x = st.random_symplectic(s, k, max_poly)?;
        if !x.is_zero() {
            return Ok(x);
        }
    }
    let basis = st.symplectic_basis(k, 0)?;
    Ok(basis.into_iter().next().unwrap_or_default())
}

/// Random nonzero homogeneous symplectic tensors of random degrees.
pub fn random_symplectic_tuple(st: &NPlecticStructure, s: &mut Sampler, k: usize, max_poly: i64) -> Result<Vec<Tensor>> {
    let degrees = symplectic_degrees(st, max_poly)?;
    (0..k)
        .map(|_| {
            let d = degrees[s.range(0, degrees.len() - 1)];
            nonzero_symplectic(st, s, d, max_poly)
        })
        .collect()
}

/// Fundamental pairing on random symplectic tuples of each arity.
pub fn fundamental_pairing(st: &NPlecticStructure, seed: u64, arities: &[usize], instances: usize) -> Result<Vec<Check>> {
    let mut s = Sampler::new(seed);
    let mut out = Vec::new();
    for &k in arities {
        let mut c = Check::new(&format!("fundamental_pairing_k{k}"));
        for _ in 0..instances {
            let xs = random_symplectic_tuple(st, &mut s, k, 2)?;
            let (lhs, rhs) = st.fundamental_pairing_sides(&xs)?;
            c.record(lhs == rhs, || {
                let shown: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                format!("xs = [{}], lhs = {lhs}, rhs = {rhs}", shown.join(", "))
            });
        }
        out.push(c);
    }
    Ok(out)
}

/// Jacobi results for one arity along the two evaluation paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JacobiRow {
    pub arity: usize,
    pub engine: Check,
    pub checker: Check,
    pub agreement: Check,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JacobiReport {
    pub algebra: String,
    pub rows: Vec<JacobiRow>,
    pub passed: bool,
}

fn jacobi_report(algebra: String, rows: Vec<JacobiRow>) -> JacobiReport {
    let passed = rows
        .iter()
        .all(|r| r.engine.passed && r.checker.passed && r.agreement.passed);
    JacobiReport { algebra, rows, passed }
}

fn new_row(arity: usize) -> JacobiRow {
    JacobiRow {
        arity,
        engine: Check::new("engine"),
        checker: Check::new("checker"),
        agreement: Check::new("agreement"),
    }
}

/// Weak Jacobi for the higher tensor brackets: the direct engine sum against
/// the generic checker.
pub fn tensor_jacobi(pair: &Arc<Pair>, seed: u64, arities: &[usize], instances: usize) -> Result<JacobiReport> {
    let mut s = Sampler::new(seed);
    let alg = TensorLInfinity::new(pair.clone());
    let top = MAX_TENSOR_DEGREE.min(pair.dim());
    let mut rows = Vec::new();
    for &n in arities {
        let mut row = new_row(n);
        for _ in 0..instances {
            let xs: Vec<Homogeneous<Tensor>> = (0..n)
                .map(|_| {
                    let d = s.range(0, top);
                    Homogeneous::new(s.tensor(pair, d, 2, 2), d as i64)
                })
                .collect();
            let plain: Vec<Tensor> = xs.iter().map(|x| x.value.clone()).collect();
            let a = pair.tensor_jacobi_residual(&plain, n.max(crate::calculus::DEFAULT_ARITY_CAP))?;
            let b = jacobi_residual(&alg, &xs)?;
            row.engine.record(a.is_zero(), || format!("residual {a}"));
            row.checker.record(b.is_zero(), || format!("residual {b}"));
            row.agreement.record(a == b, || format!("engine {a}, checker {b}"));
        }
        rows.push(row);
    }
    Ok(jacobi_report(format!("tensors({})", pair.family_name()), rows))
}

/// Shifted degrees that can carry nonzero extension elements.
fn extension_degrees(st: &NPlecticStructure) -> Vec<i64> {
    let n = st.n() as i64;
    let dim = st.pair().dim() as i64;
    ((n - dim).min(0)..=n.max(dim)).collect()
}

/// Random nonzero homogeneous extension element of shifted degree `k`, or
/// `None` if that degree is empty.
pub fn random_extension_element(st: &NPlecticStructure, s: &mut Sampler, k: i64, max_poly: i64) -> Result<Option<ExtensionElement>> {
    let t = st.n() as i64 - k;
    let has_potential = t >= 0 && t as usize <= st.pair().dim();
    for _ in 0..8 {
        let x = if (0..=st.pair().dim() as i64).contains(&k) {
            st.random_symplectic(s, k, max_poly)?
        } else {
            Tensor::zero()
        };
        let f = if has_potential && (x.is_zero() || s.chance(0.7)) {
            s.cotensor(st.pair(), t as usize, max_poly as u32, 2)
        } else {
            Cotensor::zero()
        };
        let e = ExtensionElement::new(f, st.canonical_tensor(&x)?);
        if !e.is_zero() {
            return Ok(Some(e));
        }
    }
    Ok(None)
}

fn random_extension_tuple(st: &NPlecticStructure, s: &mut Sampler, n: usize) -> Result<Vec<Homogeneous<ExtensionElement>>> {
    let degrees = extension_degrees(st);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let k = degrees[s.range(0, degrees.len() - 1)];
        if let Some(e) = random_extension_element(st, s, k, 2)? {
            out.push(Homogeneous::new(e, k));
        }
    }
    Ok(out)
}

/// Weak Jacobi for the extension algebra on both paths.
pub fn extension_jacobi(st: &NPlecticStructure, seed: u64, arities: &[usize], instances: usize) -> Result<JacobiReport> {
    let mut s = Sampler::new(seed);
    let alg = ExtensionLInfinity { structure: st };
    let mut rows = Vec::new();
    for &n in arities {
        let mut row = new_row(n);
        for _ in 0..instances {
            let xs = random_extension_tuple(st, &mut s, n)?;
            let plain: Vec<ExtensionElement> = xs.iter().map(|x| x.value.clone()).collect();
            let a = st.extension_jacobi_check(&plain)?;
            let mut b = jacobi_residual(&alg, &xs)?;
            b.tensor = st.canonical_tensor(&b.tensor)?;
            row.engine.record(a.vanishes, || format!("residual {}", a.residual));
            row.checker.record(b.is_zero(), || format!("residual {b}"));
            row.agreement.record(a.residual == b, || format!("engine {}, checker {b}", a.residual));
        }
        rows.push(row);
    }
    Ok(jacobi_report(format!("extension(n = {})", st.n()), rows))
}

/// Degrees with nonzero Hamiltonian cohomology somewhere in the window.
pub fn nonzero_cohomology_degrees(st: &NPlecticStructure, window: i64) -> Result<Vec<(i64, i64)>> {
    Ok(cohomology_table(st, window)?
        .into_iter()
        .filter(|r| r.rank > 0)
        .map(|r| (r.degree, r.poly_degree))
        .collect())
}

/// Random nonzero class in the slice `(k, p)`, built from the cocycle space.
pub fn random_class(st: &NPlecticStructure, s: &mut Sampler, k: i64, p: i64) -> Result<CohomClass> {
    let m = st.d_omega_map(k, p)?;
    let cocycles = m.matrix.null_space();
    let split = m.sources[0].dimension();
    for _ in 0..16 {
        let Some(v) = s.combination(&cocycles) else { break };
        let f: Cotensor = m.sources[0].element(&v[..split]);
        let x: Tensor = m.sources[1].element(&v[split..]);
        let c = st.class_of(&ExtensionElement::new(f, x))?;
        if !c.is_zero() {
            return Ok(c);
        }
    }
    Ok(CohomClass::zero())
}

fn random_class_tuple(st: &NPlecticStructure, s: &mut Sampler, slots: &[(i64, i64)], n: usize) -> Result<Vec<Homogeneous<CohomClass>>> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let (k, p) = slots[s.range(0, slots.len() - 1)];
        let c = random_class(st, s, k, p)?;
        if !c.is_zero() {
            out.push(Homogeneous::new(c, k));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PoissonReport {
    pub degrees_sampled: Vec<(i64, i64)>,
    pub unary: Check,
    pub representative_independence: Check,
    pub jacobi: JacobiReport,
    pub passed: bool,
}

/// Poisson brackets on Hamiltonian cohomology: the unary bracket vanishes,
/// brackets do not see the choice of representative, and weak Jacobi holds
/// along both paths.
pub fn poisson(st: &NPlecticStructure, seed: u64, arities: &[usize], instances: usize, window: i64) -> Result<PoissonReport> {
    let mut s = Sampler::new(seed);
    let slots = nonzero_cohomology_degrees(st, window)?;
    let mut unary = Check::new("unary_bracket_zero");
    let mut indep = Check::new("representative_independence");
    let mut rows = Vec::new();
    if slots.is_empty() {
        return Ok(PoissonReport {
            degrees_sampled: slots,
            unary,
            representative_independence: indep,
            jacobi: jacobi_report("hamiltonian_cohomology".into(), rows),
            passed: true,
        });
    }
    for _ in 0..instances {
        let c = random_class_tuple(st, &mut s, &slots, 1)?.remove(0).value;
        let u = st.poisson_bracket(std::slice::from_ref(&c))?;
        unary.record(u.is_zero(), || format!("{{{c}}}_1 = {u}"));
    }
    for _ in 0..instances {
        let cs = random_class_tuple(st, &mut s, &slots, 2)?;
        let plain: Vec<CohomClass> = cs.iter().map(|c| c.value.clone()).collect();
        let reference = st.poisson_bracket(&plain)?;
        let perturbed: Vec<CohomClass> = cs
            .iter()
            .map(|c| perturb(st, &mut s, &c.value, c.degree))
            .collect::<Result<_>>()?;
        let other = st.poisson_bracket(&perturbed)?;
        indep.record(reference == other, || format!("{reference} versus {other}"));
    }
    let alg = HamiltonianCohomology { structure: st };
    for &n in arities {
        let mut row = new_row(n);
        for _ in 0..instances {
            let cs = random_class_tuple(st, &mut s, &slots, n)?;
            let plain: Vec<CohomClass> = cs.iter().map(|c| c.value.clone()).collect();
            let a = st.poisson_jacobi_residual(&plain)?;
            let b = jacobi_residual(&alg, &cs)?;
            row.engine.record(a.is_zero(), || format!("residual {a}"));
            row.checker.record(b.is_zero(), || format!("residual {b}"));
            row.agreement.record(a == b, || format!("engine {a}, checker {b}"));
        }
        rows.push(row);
    }
    let jacobi = jacobi_report("hamiltonian_cohomology".into(), rows);
    let passed = unary.passed && indep.passed && jacobi.passed;
    Ok(PoissonReport {
        degrees_sampled: slots,
        unary,
        representative_independence: indep,
        jacobi,
        passed,
    })
}

/// Another representative of the same class: a coboundary added to the
/// potential and a kernel element added to the tensor. Not canonical.
fn perturb(st: &NPlecticStructure, s: &mut Sampler, c: &CohomClass, k: i64) -> Result<CohomClass> {
    let pair = st.pair();
    let n = st.n() as i64;
    let mut potential = c.potential.clone();
    let t = n - k - 1;
    if t >= 0 && t as usize <= pair.dim() {
        let h = s.cotensor(pair, t as usize, 2, 2);
        potential = potential - pair.d(&h);
    }
    let mut tensor = c.tensor.clone();
    for q in 0..=if pair.is_poly() { 2 } else { 0 } {
        let ker = st.kernel_space(k, q)?;
        if let Some(v) = s.combination(&ker.rows) {
            tensor = tensor + Slice::tensors(pair, k, q).element(&v);
        }
    }
    Ok(CohomClass {
        degree: c.degree,
        potential,
        tensor,
    })
}

/// The natural inclusion of the associated graded algebra into the tensor
/// algebra, checked on random tuples of every degree pattern.
pub fn natural_inclusion(pair: &Arc<Pair>, seed: u64, max_arity: usize, instances: usize) -> Result<MorphismReport> {
    let mut s = Sampler::new(seed);
    let dom = AssociatedGraded::new(pair.clone());
    let cod = TensorLInfinity::new(pair.clone());
    let mut tuples = Vec::new();
    for n in 1..=max_arity {
        for t in 0..instances {
            let xs: Vec<Homogeneous<Tensor>> = (0..n)
                .map(|_| {
                    let d = s.range(0, 1);
                    Homogeneous::new(s.tensor(pair, d, 2, 2), d as i64)
                })
                .collect();
            let pattern: String = xs.iter().map(|x| if x.degree == 0 { 'a' } else { 'x' }).collect();
            tuples.push((vec![format!("arity {n} #{t} ({pattern})")], xs));
        }
    }
    check_morphism_on(&dom, &cod, &NaturalInclusion, &tuples)
}

/// The rotation field `x d/dy - y d/dx` on the plane.
pub fn rotation_field() -> Tensor {
    Tensor::term(Word::single(1), crate::scalar::Poly::var(0)) - Tensor::term(Word::single(0), crate::scalar::Poly::var(1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MomentumExample {
    pub potential: String,
    pub certified: MomentumReport,
    pub corrupted: MomentumReport,
    pub passed: bool,
}

/// The rotation action of a 1-dimensional abelian algebra on the plane,
/// with the potential solved from `df = i_X omega`, and a variant whose
/// potential is off by `x`.
pub fn rotation_momentum(max_arity: usize) -> Result<MomentumExample> {
    let st = NPlecticStructure::symplectic_plane();
    let x = rotation_field();
    let f = st.hamiltonian_potential(&x)?.unwrap_or_default();
    let dom = FiniteLInfinity::abelian(1);
    let good = MomentumCandidate {
        components: [(vec![0], ExtensionElement::new(f.clone(), x.clone()))].into(),
    };
    let bad = MomentumCandidate {
        components: [(vec![0], ExtensionElement::new(&f + &Cotensor::scalar(crate::scalar::Poly::var(0)), x))].into(),
    };
    let certified = check_momentum_map(&dom, &st, &good, max_arity)?;
    let corrupted = check_momentum_map(&dom, &st, &bad, max_arity)?;
    Ok(MomentumExample {
        potential: f.to_string(),
        passed: certified.certified && !corrupted.gate_passed,
        certified,
        corrupted,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CohomologyReport {
    pub n: usize,
    pub window: i64,
    pub hamiltonian: Vec<RankRow>,
    pub chevalley_eilenberg: Vec<RankRow>,
    /// Ranks vanish outside `0..=n+1`.
    pub bounds: Check,
}

pub fn cohomology(st: &NPlecticStructure, window: i64) -> Result<CohomologyReport> {
    let hamiltonian = cohomology_table(st, window)?;
    let mut bounds = Check::new("vanishing_outside_0_to_n_plus_1");
    let top = st.n() as i64 + 1;
    for r in &hamiltonian {
        if r.degree < 0 || r.degree > top {
            bounds.record(r.rank == 0, || format!("H^{} has rank {} at polynomial degree {}", r.degree, r.rank, r.poly_degree));
        }
    }
    Ok(CohomologyReport {
        n: st.n(),
        window,
        chevalley_eilenberg: ce_cohomology_table(st.pair(), window)?,
        hamiltonian,
        bounds,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentitiesReport {
    pub cartan: CartanReport,
    pub d_squared: Check,
    pub fundamental_pairing: Vec<Check>,
    pub passed: bool,
}

/// Cartan rules and `d^2 = 0` on the pair, plus the fundamental pairing for
/// `k = 2..4` when a structure is given.
pub fn identities(pair: &Pair, structure: Option<&NPlecticStructure>, seed: u64, instances: usize) -> Result<IdentitiesReport> {
    let cartan = cartan_rules(pair, seed, instances);
    let dd = d_squared(pair, seed.wrapping_add(1), instances);
    let fp = match structure {
        Some(st) => fundamental_pairing(st, seed.wrapping_add(2), &[2, 3, 4], instances.div_ceil(4).max(1))?,
        None => Vec::new(),
    };
    let passed = cartan.passed && dd.passed && all_passed(&fp);
    Ok(IdentitiesReport {
        cartan,
        d_squared: dd,
        fundamental_pairing: fp,
        passed,
    })
}

/// Closure and ideal properties of the symplectic tensors: brackets of
/// symplectic tensors are symplectic and Hamiltonian with potential
/// `i_{x_k ^ .. ^ x_1} omega`, and brackets with a kernel element land in
/// the kernel.
pub fn symplectic_closure(st: &NPlecticStructure, seed: u64, arities: &[usize], instances: usize) -> Result<Vec<Check>> {
    let mut s = Sampler::new(seed);
    let mut closure = Check::new("bracket_is_symplectic");
    let mut hamiltonian = Check::new("bracket_is_hamiltonian");
    let mut ideal = Check::new("kernel_ideal");
    for &k in arities {
        for _ in 0..instances {
            let xs = random_symplectic_tuple(st, &mut s, k, 2)?;
            let b = st.pair().higher_bracket_with_cap(&xs, st.arity_cap().max(k))?;
            closure.record(st.is_symplectic(&b)?, || format!("bracket {b}"));
            let (lhs, rhs) = st.fundamental_pairing_sides(&xs)?;
            hamiltonian.record(lhs == rhs, || format!("i_b omega = {lhs}, d i omega = {rhs}"));
            let mut ys = xs.clone();
            let pick = s.range(0, k - 1);
            let deg = s.range(0, st.pair().dim()) as i64;
            let ker: Vec<Tensor> = (0..=2).flat_map(|q| st.kernel_basis(deg, q).unwrap_or_default()).collect();
            if let Some(z) = ker.first() {
                ys[pick] = z.clone();
                let bz = st.pair().higher_bracket_with_cap(&ys, st.arity_cap().max(k))?;
                ideal.record(st.in_kernel(&bz)?, || format!("bracket {bz} leaves the kernel"));
            }
        }
    }
    Ok(vec![closure, hamiltonian, ideal])
}
