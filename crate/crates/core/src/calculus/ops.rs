use crate::combinatorics::{enumerate_shuffles_with_cap, factorial, koszul_odd};
use crate::error::{Error, Result};
use crate::pair::Pair;
use crate::scalar::{Poly, Rational};

use super::element::{wedge_all, Cotensor, Graded, Kind, Tensor};
use super::word::Word;

/// Default cap on the arity of higher brackets.
pub const DEFAULT_ARITY_CAP: usize = 6;

fn signed(p: Poly, odd: bool) -> Poly {
    if odd {
        -p
    } else {
        p
    }
}

/// Splits each argument into homogeneous components and calls `f` on every
/// combination, summing the results. Zero arguments make the whole sum zero.
fn multilinear<K: Kind, R>(
    xs: &[Graded<K>],
    zero: R,
    mut f: impl FnMut(&[Graded<K>], &[i64]) -> Result<R>,
    mut add: impl FnMut(&mut R, R),
) -> Result<R> {
    let comps: Vec<Vec<(i64, Graded<K>)>> = xs
        .iter()
        .map(|x| {
            x.components()
                .into_iter()
                .map(|(l, c)| (K::SIGN * l as i64, c))
                .collect()
        })
        .collect();
    let mut acc = zero;
    if comps.iter().any(Vec::is_empty) {
        return Ok(acc);
    }
    let mut idx = vec![0usize; xs.len()];
    loop {
        let args: Vec<Graded<K>> = idx.iter().zip(&comps).map(|(&i, c)| c[i].1.clone()).collect();
        let degs: Vec<i64> = idx.iter().zip(&comps).map(|(&i, c)| c[i].0).collect();
        add(&mut acc, f(&args, &degs)?);
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Ok(acc);
            }
            idx[pos] += 1;
            if idx[pos] < comps[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

impl Pair {
    /// `<f, x>`: `1` on matching dual words, `0` otherwise, extended
    /// A-bilinearly. Terms of different length pair to zero.
    pub fn pairing(&self, f: &Cotensor, x: &Tensor) -> Result<Poly> {
        self.check(f)?;
        self.check(x)?;
        Ok(self.pairing_unchecked(f, x))
    }

    pub(crate) fn pairing_unchecked(&self, f: &Cotensor, x: &Tensor) -> Poly {
        let mut out = Poly::zero();
        for (w, a) in x.terms() {
            let b = f.coeff(*w);
            if !b.is_zero() {
                out = out + a * &b;
            }
        }
        out
    }

    /// Contraction `i_x f`, the adjoint of left multiplication:
    /// `<i_x f, y> = <f, x ^ y>`.
    pub fn contract(&self, x: &Tensor, f: &Cotensor) -> Result<Cotensor> {
        self.check(x)?;
        self.check(f)?;
        Ok(contract_unchecked(x, f))
    }

    /// Chevalley-Eilenberg differential, evaluated on basis arguments.
    pub fn ce_differential(&self, f: &Cotensor) -> Result<Cotensor> {
        self.check(f)?;
        Ok(self.d(f))
    }

    pub(crate) fn d(&self, f: &Cotensor) -> Cotensor {
        let mut out = Cotensor::zero();
        for (j_word, phi) in f.terms() {
            // anchor part: sum_j (-1)^j D_{x_j} f(.., x_j omitted, ..)
            if self.is_poly() {
                for j in 0..self.dim() {
                    if j_word.contains(j) {
                        continue;
                    }
                    let dphi = self.basis_action(j, phi);
                    if dphi.is_zero() {
                        continue;
                    }
                    let pos = j_word.count_below(j);
                    out.add_term(j_word.with(j), &signed(dphi, pos % 2 == 1));
                }
            }
            // bracket part: sum_{a<b} (-1)^{a+b} f([x_a, x_b], ..)
            for c in j_word.indices() {
                let rest = j_word.without(c);
                let rest_odd = rest.count_below(c) % 2 == 1;
                for a in 0..self.dim() {
                    if rest.contains(a) {
                        continue;
                    }
                    for b in a + 1..self.dim() {
                        if rest.contains(b) {
                            continue;
                        }
                        let Some((_, cv)) = self.basis_bracket(a, b).iter().find(|(k, _)| *k == c) else {
                            continue;
                        };
                        let target = rest.with(a).with(b);
                        let pa = target.count_below(a);
                        let pb = target.count_below(b);
                        let odd = rest_odd ^ ((pa + pb) % 2 == 1);
                        out.add_term(target, &signed(phi.scale(cv), odd));
                    }
                }
            }
        }
        out
    }

    /// `L_x f = d i_x f - (-1)^{|x|} i_x d f`, per homogeneous component of `x`.
    pub fn lie_derivative(&self, x: &Tensor, f: &Cotensor) -> Result<Cotensor> {
        self.check(x)?;
        self.check(f)?;
        Ok(self.lie_derivative_unchecked(x, f))
    }

    pub(crate) fn lie_derivative_unchecked(&self, x: &Tensor, f: &Cotensor) -> Cotensor {
        let df = self.d(f);
        let mut out = Cotensor::zero();
        for (k, xk) in x.components() {
            let first = self.d(&contract_unchecked(&xk, f));
            let second = contract_unchecked(&xk, &df);
            out = out + first;
            if k % 2 == 0 {
                out = out - second;
            } else {
                out = out + second;
            }
        }
        out
    }

    /// `[e_j, x]`.
    fn schouten_basis_vector(&self, j: usize, x: &Tensor) -> Tensor {
        let mut out = Tensor::zero();
        for (w, a) in x.terms() {
            out.add_term(*w, &self.basis_action(j, a));
            let idx = w.to_vec();
            for s in 0..idx.len() {
                for (k, c) in self.basis_bracket(j, idx[s]) {
                    let mut replaced = idx.clone();
                    replaced[s] = *k;
                    if let Some((nw, odd)) = Word::from_indices(&replaced) {
                        out.add_term(nw, &signed(a.scale(c), odd));
                    }
                }
            }
        }
        out
    }

    /// `[b, x]` for a scalar `b`.
    fn schouten_scalar(&self, b: &Poly, x: &Tensor) -> Tensor {
        let mut out = Tensor::zero();
        if !self.is_poly() {
            return out;
        }
        for (w, a) in x.terms() {
            for (s, i) in w.indices().enumerate() {
                let db = self.basis_action(i, b);
                if db.is_zero() {
                    continue;
                }
                // -a (-1)^s D_i(b), 0-based slot s
                out.add_term(w.without(i), &signed(a * &db, s % 2 == 0));
            }
        }
        out
    }

    /// Schouten-Nijenhuis bracket, the graded biderivation extending the Lie
    /// bracket and the anchor. Antisymmetry reads
    /// `[x, y] = -(-1)^{(|x|-1)(|y|-1)} [y, x]`.
    pub fn schouten(&self, x: &Tensor, y: &Tensor) -> Result<Tensor> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.schouten_unchecked(x, y))
    }

    pub(crate) fn schouten_unchecked(&self, x: &Tensor, y: &Tensor) -> Tensor {
        let mut out = Tensor::zero();
        for (iw, a) in x.terms() {
            let p = iw.len();
            let xt = Tensor::term(*iw, a.clone());
            for (jw, b) in y.terms() {
                // [x, b e_J] = (-1)^p [b, x] ^ e_J + b sum_t (-1)^{(p-1) t} e_{J<t} ^ [x, e_{j_t}] ^ e_{J>t}
                let sb = self.schouten_scalar(b, &xt);
                if !sb.is_zero() {
                    let t = sb.wedge(&Tensor::basis(*jw));
                    out = out + if p % 2 == 1 { -t } else { t };
                }
                let jidx = jw.to_vec();
                for (t, &j) in jidx.iter().enumerate() {
                    let inner = self.schouten_basis_vector(j, &xt);
                    if inner.is_zero() {
                        continue;
                    }
                    let pre = Tensor::from_indices(&jidx[..t], b.clone());
                    let suf = Tensor::from_indices(&jidx[t + 1..], Poly::one());
                    let term = pre.wedge(&inner).wedge(&suf);
                    // (-1)^{(p-1) t} times the minus sign from [x, e_j] = -[e_j, x]
                    let odd = ((p + 1) * t) % 2 == 1;
                    out = out + if odd { term } else { -term };
                }
            }
        }
        out
    }

    /// Higher tensor bracket
    /// `[x_1..x_k]_k = sum_{s in Sh(2,k-2)} e(s; x) (-1)^{|x_{s(1)}|} x_{s(k)} ^ .. ^ x_{s(3)} ^ [x_{s(2)}, x_{s(1)}]`
    /// with the unary bracket identically zero. Arguments may be
    /// inhomogeneous; the bracket is extended multilinearly.
    pub fn higher_bracket(&self, xs: &[Tensor]) -> Result<Tensor> {
        self.higher_bracket_with_cap(xs, DEFAULT_ARITY_CAP)
    }

    pub fn higher_bracket_with_cap(&self, xs: &[Tensor], cap: usize) -> Result<Tensor> {
        if xs.is_empty() {
            return Err(Error::Argument("bracket needs at least one argument".into()));
        }
        if xs.len() > cap {
            return Err(Error::ResourceLimit(format!(
                "bracket arity {} exceeds the arity cap {cap}",
                xs.len()
            )));
        }
        for x in xs {
            self.check(x)?;
        }
        multilinear(
            xs,
            Tensor::zero(),
            |args, degs| self.higher_bracket_homogeneous(args, degs, cap),
            |acc, v| *acc = &*acc + &v,
        )
    }

    /// Bracket of homogeneous arguments with known degrees.
    pub(crate) fn higher_bracket_homogeneous(&self, xs: &[Tensor], degs: &[i64], cap: usize) -> Result<Tensor> {
        let k = xs.len();
        if k < 2 || xs.iter().any(Graded::is_zero) {
            return Ok(Tensor::zero());
        }
        let shuffles = enumerate_shuffles_with_cap(&[2, k - 2], cap.max(k))?;
        let mut out = Tensor::zero();
        for s in shuffles.iter() {
            let im = s.zero_based();
            let odd = koszul_odd(im, degs) ^ (degs[im[0]] % 2 != 0);
            let br = self.schouten_unchecked(&xs[im[1]], &xs[im[0]]);
            if br.is_zero() {
                continue;
            }
            let prefix = wedge_all(im[2..].iter().rev().map(|&i| &xs[i]));
            let term = prefix.wedge(&br);
            out = out + if odd { -term } else { term };
        }
        Ok(out)
    }

    /// Natural inclusion component `(-1)^{k-1} (k-1)! x_k ^ .. ^ x_1` on
    /// elements of `A + g`.
    pub fn natural_inclusion(&self, xs: &[Tensor]) -> Result<Tensor> {
        if xs.is_empty() {
            return Err(Error::Argument("natural inclusion needs k >= 1".into()));
        }
        for x in xs {
            self.check(x)?;
            if x.terms().any(|(w, _)| w.len() > 1) {
                return Err(Error::WrongDegree {
                    expected: 1,
                    found: x.to_string(),
                });
            }
        }
        Ok(natural_inclusion_unchecked(xs))
    }

    /// Weak Jacobi sum for the higher brackets with zero differential,
    /// evaluated directly on homogeneous arguments. The tensor bracket
    /// algebra is an L-infinity algebra exactly when this vanishes.
    pub fn tensor_jacobi_residual(&self, xs: &[Tensor], cap: usize) -> Result<Tensor> {
        for x in xs {
            self.check(x)?;
            if !x.is_homogeneous() {
                return Err(Error::NotHomogeneous(x.to_string()));
            }
        }
        let n = xs.len();
        let degs: Vec<i64> = xs.iter().map(|x| x.homogeneous_degree().unwrap_or(0)).collect();
        let mut out = Tensor::zero();
        for j in 2..n {
            let shuffles = enumerate_shuffles_with_cap(&[j, n - j], cap.max(n))?;
            for s in shuffles.iter() {
                let im = s.zero_based();
                let inner_args: Vec<Tensor> = im[..j].iter().map(|&i| xs[i].clone()).collect();
                let inner_degs: Vec<i64> = im[..j].iter().map(|&i| degs[i]).collect();
                let inner = self.higher_bracket_homogeneous(&inner_args, &inner_degs, cap)?;
                if inner.is_zero() {
                    continue;
                }
                let mut outer_args = vec![inner];
                let mut outer_degs = vec![inner_degs.iter().sum::<i64>() - 1];
                for &i in &im[j..] {
                    outer_args.push(xs[i].clone());
                    outer_degs.push(degs[i]);
                }
                let v = self.higher_bracket_homogeneous(&outer_args, &outer_degs, cap)?;
                if koszul_odd(im, &degs) {
                    out = out - v;
                } else {
                    out = out + v;
                }
            }
        }
        Ok(out)
    }
}

pub(crate) fn contract_unchecked(x: &Tensor, f: &Cotensor) -> Cotensor {
    let mut out = Cotensor::zero();
    for (iw, a) in x.terms() {
        for (jw, b) in f.terms() {
            if !iw.is_subset(*jw) {
                continue;
            }
            let rest = jw.minus(*iw);
            out.add_term(rest, &signed(a * b, iw.merge_odd(rest)));
        }
    }
    out
}

pub(crate) fn natural_inclusion_unchecked(xs: &[Tensor]) -> Tensor {
    let k = xs.len();
    let w = wedge_all(xs.iter().rev());
    let c = Rational::from(factorial(k - 1)) * Rational::sign_power(k as i64 - 1);
    w.scale(&c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }
    fn e(i: usize) -> Tensor {
        Tensor::basis(Word::single(i))
    }
    fn dx(i: usize) -> Cotensor {
        Cotensor::basis(Word::single(i))
    }
    fn cw(idx: &[usize]) -> Cotensor {
        Cotensor::from_indices(idx, Poly::one())
    }

    #[test]
    fn pairing_examples() {
        let q = Pair::poly(2).unwrap();
        assert!(q.pairing(&cw(&[0, 1]), &e(0).wedge(&e(1))).unwrap().is_one());
        assert!(q.pairing(&dx(0), &e(0).wedge(&e(1))).unwrap().is_zero());
        let a = Cotensor::scalar(p("x1"));
        let b = Tensor::scalar(p("x2"));
        assert_eq!(q.pairing(&a, &b).unwrap(), p("x1*x2"));
    }

    #[test]
    fn contraction_examples() {
        let q = Pair::poly(2).unwrap();
        let om = cw(&[0, 1]);
        assert_eq!(q.contract(&e(0), &om).unwrap(), dx(1));
        assert_eq!(q.contract(&e(1), &om).unwrap(), -dx(0));
        assert!(q.contract(&e(0), &dx(1)).unwrap().is_zero());
        assert_eq!(
            q.contract(&e(0).wedge(&e(1)), &om).unwrap(),
            Cotensor::scalar(Poly::one())
        );
    }

    #[test]
    fn differential_examples() {
        let q = Pair::poly(2).unwrap();
        let f = Cotensor::scalar(p("x1^2"));
        assert_eq!(q.ce_differential(&f).unwrap(), dx(0).mul_poly(&p("2*x1")));
        let s = Pair::su2();
        assert_eq!(s.ce_differential(&dx(2)).unwrap(), -cw(&[0, 1]));
        assert!(s.ce_differential(&cw(&[0, 1, 2])).unwrap().is_zero());
    }

    #[test]
    fn lie_derivative_examples() {
        let q = Pair::poly(2).unwrap();
        assert!(q.lie_derivative(&e(0), &dx(0)).unwrap().is_zero());
        let x = e(0).mul_poly(&p("x1"));
        assert_eq!(q.lie_derivative(&x, &dx(0)).unwrap(), dx(0));
    }

    #[test]
    fn schouten_examples() {
        let q = Pair::poly(2).unwrap();
        let y = e(1).mul_poly(&p("x1"));
        assert_eq!(q.schouten(&e(0), &y).unwrap(), e(1));
        let a = Tensor::scalar(p("x1"));
        let b = Tensor::scalar(p("x2"));
        assert!(q.schouten(&a, &b).unwrap().is_zero());
        // vector on scalar is the anchor, scalar on vector its negative
        assert_eq!(q.schouten(&e(0), &a).unwrap(), Tensor::scalar(Poly::one()));
        assert_eq!(q.schouten(&a, &e(0)).unwrap(), Tensor::scalar(-Poly::one()));
        // [d1 ^ d2, x1] = [x1, d1 ^ d2] = -d2
        let biv = e(0).wedge(&e(1));
        assert_eq!(q.schouten(&biv, &a).unwrap(), -e(1));
    }

    #[test]
    fn higher_bracket_low_arity() {
        let s = Pair::su2();
        assert_eq!(s.higher_bracket(&[e(0), e(1)]).unwrap(), e(2));
        assert!(s.higher_bracket(&[e(0)]).unwrap().is_zero());
        let q = Pair::poly(2).unwrap();
        let a = Tensor::scalar(p("x1"));
        let b = Tensor::scalar(p("x2"));
        assert!(q.higher_bracket(&[a, b]).unwrap().is_zero());
        assert!(matches!(
            s.higher_bracket_with_cap(&vec![e(0); 4], 3),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn natural_inclusion_examples() {
        let s = Pair::su2();
        assert_eq!(s.natural_inclusion(&[e(0)]).unwrap(), e(0));
        assert_eq!(s.natural_inclusion(&[e(0), e(1)]).unwrap(), -e(1).wedge(&e(0)));
        assert_eq!(
            s.natural_inclusion(&[e(0), e(1), e(2)]).unwrap(),
            e(2).wedge(&e(1)).wedge(&e(0)).scale(&Rational::from(2))
        );
        assert!(s.natural_inclusion(&[e(0).wedge(&e(1))]).is_err());
    }

    #[test]
    fn pair_mismatch() {
        let s = Pair::su2();
        let bad = Tensor::scalar(p("x1"));
        assert!(matches!(s.schouten(&bad, &e(0)), Err(Error::PairMismatch(_))));
        let q = Pair::poly(1).unwrap();
        assert!(matches!(q.contract(&e(1), &dx(0)), Err(Error::PairMismatch(_))));
    }
}
