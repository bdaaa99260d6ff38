//! Permutations, shuffles, Koszul signs and Bell numbers.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Largest total size accepted by [`enumerate_shuffles`] unless overridden.
pub const DEFAULT_COMBINATORIAL_CAP: usize = 12;

/// Largest index accepted by [`bell`].
pub const BELL_CAP: usize = 512;

/// Refuse to materialize shuffle sets larger than this, whatever the cap.
const MAX_SHUFFLES: u64 = 2_000_000;

/// A permutation of `{1..k}`, stored 0-based.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(k: usize) -> Self {
        Permutation {
            images: (0..k).collect(),
        }
    }

    /// Builds a permutation from its 1-based image sequence `s(1), .., s(k)`.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &i in images {
            if i == 0 || i > k || seen[i - 1] {
                return Err(Error::Argument(format!(
                    "{images:?} is not a permutation of 1..{k}"
                )));
            }
            seen[i - 1] = true;
        }
        Ok(Permutation {
            images: images.iter().map(|i| i - 1).collect(),
        })
    }

    pub(crate) fn from_zero_based(images: Vec<usize>) -> Self {
        debug_assert!({
            let mut s = images.clone();
            s.sort_unstable();
            s.iter().enumerate().all(|(a, &b)| a == b)
        });
        Permutation { images }
    }

    /// Transposition of the 1-based positions `i` and `j` in `S_k`.
    pub fn transposition(k: usize, i: usize, j: usize) -> Result<Self> {
        if i == 0 || j == 0 || i > k || j > k {
            return Err(Error::Argument(format!("transposition ({i} {j}) outside S_{k}")));
        }
        let mut images: Vec<usize> = (0..k).collect();
        images.swap(i - 1, j - 1);
        Ok(Permutation { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// 0-based image of the 0-based position `i`.
    pub fn at(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn zero_based(&self) -> &[usize] {
        &self.images
    }

    /// 1-based image sequence.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|i| i + 1).collect()
    }

    /// The permutation `i -> self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::Argument(format!(
                "cannot compose permutations of sizes {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &s) in self.images.iter().enumerate() {
            inv[s] = i;
        }
        Permutation { images: inv }
    }

    /// Ordinary sign, `+1` or `-1`.
    pub fn sign(&self) -> i32 {
        let mut inv = 0usize;
        for a in 0..self.len() {
            for b in a + 1..self.len() {
                if self.images[a] > self.images[b] {
                    inv += 1;
                }
            }
        }
        if inv.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// The reordered sequence `v_{s(1)}, .., v_{s(k)}`.
    pub fn apply<T: Clone>(&self, v: &[T]) -> Vec<T> {
        self.images.iter().map(|&i| v[i].clone()).collect()
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.images())
    }
}

/// Sign parity of reordering `v` into `v_{s(1)}, .., v_{s(k)}`: inversions
/// between two odd entries each flip the sign.
pub(crate) fn koszul_odd(images: &[usize], degrees: &[i64]) -> bool {
    let mut odd = false;
    for a in 0..images.len() {
        if degrees[images[a]] & 1 == 0 {
            continue;
        }
        for b in a + 1..images.len() {
            if images[a] > images[b] && degrees[images[b]] & 1 == 1 {
                odd = !odd;
            }
        }
    }
    odd
}

/// Koszul sign `e(s; v)` for elements of the given degrees, defined by
/// `v_1 ... v_k = e(s; v) v_{s(1)} ... v_{s(k)}` in the graded symmetric
/// algebra.
pub fn koszul_sign(s: &Permutation, degrees: &[i64]) -> Result<i32> {
    if s.len() != degrees.len() {
        return Err(Error::Argument(format!(
            "permutation of size {} with {} degrees",
            s.len(),
            degrees.len()
        )));
    }
    Ok(if koszul_odd(&s.images, degrees) { -1 } else { 1 })
}

/// The `(p_1, .., p_r)`-shuffles: permutations increasing on each block of
/// consecutive positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShuffleSet {
    pub block_sizes: Vec<usize>,
    pub elements: Vec<Permutation>,
}

impl ShuffleSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Permutation> {
        self.elements.iter()
    }
}

type ShuffleCache = RwLock<HashMap<Vec<usize>, Arc<ShuffleSet>>>;

fn shuffle_cache() -> &'static ShuffleCache {
    static CACHE: OnceLock<ShuffleCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Shuffles with the default cap.
pub fn enumerate_shuffles(block_sizes: &[usize]) -> Result<Arc<ShuffleSet>> {
    enumerate_shuffles_with_cap(block_sizes, DEFAULT_COMBINATORIAL_CAP)
}

/// Enumerates `Sh(p_1, .., p_r)` in lexicographic order of image sequences.
/// Results are memoized process-wide.
pub fn enumerate_shuffles_with_cap(block_sizes: &[usize], cap: usize) -> Result<Arc<ShuffleSet>> {
    let total: usize = block_sizes.iter().sum();
    if total > cap {
        return Err(Error::ResourceLimit(format!(
            "shuffle set of total size {total} exceeds the combinatorial cap {cap}"
        )));
    }
    let count = multinomial(block_sizes);
    if count > BigInt::from(MAX_SHUFFLES) {
        return Err(Error::ResourceLimit(format!(
            "shuffle set {block_sizes:?} has {count} elements"
        )));
    }
    if let Some(hit) = shuffle_cache().read().unwrap().get(block_sizes) {
        return Ok(hit.clone());
    }
    let set = Arc::new(build_shuffles(block_sizes));
    // A concurrent insert of the same key stores an identical value.
    let mut w = shuffle_cache().write().unwrap();
    Ok(w.entry(block_sizes.to_vec()).or_insert(set).clone())
}

fn build_shuffles(block_sizes: &[usize]) -> ShuffleSet {
    let total: usize = block_sizes.iter().sum();
    let mut out = Vec::new();
    let mut images = vec![0usize; total];
    let mut used = vec![false; total];
    // Filling position by position with the smallest admissible value first
    // yields lexicographic order directly.
    fn rec(
        pos: usize,
        bounds: &[(usize, usize)],
        images: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Permutation>,
    ) {
        let total = images.len();
        if pos == total {
            out.push(Permutation {
                images: images.clone(),
            });
            return;
        }
        let (start, end) = bounds[pos];
        let lo = if pos > start { images[pos - 1] + 1 } else { 0 };
        let remaining_in_block = end - pos - 1;
        for v in lo..total {
            if used[v] {
                continue;
            }
            // Enough unused larger values must remain for the rest of the block.
            let larger_free = (v + 1..total).filter(|&u| !used[u]).count();
            if larger_free < remaining_in_block {
                break;
            }
            used[v] = true;
            images[pos] = v;
            rec(pos + 1, bounds, images, used, out);
            used[v] = false;
        }
    }
    let mut bounds = Vec::with_capacity(total);
    let mut start = 0;
    for &b in block_sizes {
        for _ in 0..b {
            bounds.push((start, start + b));
        }
        start += b;
    }
    rec(0, &bounds, &mut images, &mut used, &mut out);
    ShuffleSet {
        block_sizes: block_sizes.to_vec(),
        elements: out,
    }
}

pub fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * i)
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn multinomial(block_sizes: &[usize]) -> BigInt {
    let total: usize = block_sizes.iter().sum();
    block_sizes
        .iter()
        .fold(factorial(total), |acc, &b| acc / factorial(b))
}

/// Ordered compositions of `n` into `p` positive parts, in lexicographic order.
pub fn compositions(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if p == 0 {
            if n == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for a in 1..=n.saturating_sub(p - 1) {
            cur.push(a);
            rec(n - a, p - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, p, &mut Vec::new(), &mut out);
    out
}

/// All non-decreasing index tuples of length `k` over `0..n`.
pub fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, lo: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in lo..n {
            cur.push(i);
            rec(n, k, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, 0, &mut Vec::new(), &mut out);
    out
}

fn bell_table() -> &'static Mutex<Vec<BigInt>> {
    static TABLE: OnceLock<Mutex<Vec<BigInt>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(vec![BigInt::one()]))
}

/// Bell number `B_k` from the recurrence `B_{k+1} = sum_p C(k, p) B_p`.
pub fn bell(k: usize) -> Result<BigInt> {
    if k > BELL_CAP {
        return Err(Error::ResourceLimit(format!(
            "Bell number index {k} exceeds {BELL_CAP}"
        )));
    }
    let mut table = bell_table().lock().unwrap();
    while table.len() <= k {
        let m = table.len() - 1;
        let next = (0..=m).map(|p| binomial(m, p) * &table[p]).sum();
        table.push(next);
    }
    Ok(table[k].clone())
}

/// Checks `sum_{q=2}^{k-1} (k-2)! / ((q-1)! (k-1-q)!) B_{q-1} = B_{k-1} - B_0`.
pub fn bell_identity_check(k: usize) -> Result<bool> {
    if k < 3 {
        return Err(Error::Argument(format!("Bell identity needs k >= 3, got {k}")));
    }
    let mut lhs = BigInt::zero();
    for q in 2..k {
        let num = factorial(k - 2);
        let den = factorial(q - 1) * factorial(k - 1 - q);
        let (c, r) = num_integer::Integer::div_rem(&num, &den);
        if !r.is_zero() {
            return Ok(false);
        }
        lhs += c * bell(q - 1)?;
    }
    Ok(lhs == bell(k - 1)? - bell(0)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(v: &[usize]) -> Permutation {
        Permutation::from_images(v).unwrap()
    }

    #[test]
    fn shuffles_small() {
        let s = enumerate_shuffles(&[2, 1]).unwrap();
        let imgs: Vec<_> = s.iter().map(Permutation::images).collect();
        assert_eq!(imgs, vec![vec![1, 2, 3], vec![1, 3, 2], vec![2, 3, 1]]);
        assert_eq!(enumerate_shuffles(&[1]).unwrap().elements, vec![Permutation::identity(1)]);
        assert_eq!(enumerate_shuffles(&[2, 2]).unwrap().len(), 6);
        assert_eq!(enumerate_shuffles(&[0, 3]).unwrap().len(), 1);
        assert_eq!(enumerate_shuffles(&[]).unwrap().len(), 1);
    }

    #[test]
    fn shuffle_cap() {
        assert!(matches!(
            enumerate_shuffles(&[7, 6]),
            Err(Error::ResourceLimit(_))
        ));
        assert!(enumerate_shuffles_with_cap(&[7, 6], 13).is_ok());
    }

    #[test]
    fn koszul_examples() {
        let swap = Permutation::transposition(2, 1, 2).unwrap();
        assert_eq!(koszul_sign(&swap, &[1, 1]).unwrap(), -1);
        assert_eq!(koszul_sign(&swap, &[1, 2]).unwrap(), 1);
        assert_eq!(koszul_sign(&Permutation::identity(3), &[1, 3, 5]).unwrap(), 1);
        assert_eq!(koszul_sign(&perm(&[2, 3, 1]), &[1, 1, 1]).unwrap(), 1);
        assert!(koszul_sign(&swap, &[1]).is_err());
    }

    #[test]
    fn bell_numbers() {
        let want = [1, 1, 2, 5, 15, 52, 203, 877];
        for (k, &b) in want.iter().enumerate() {
            assert_eq!(bell(k).unwrap(), BigInt::from(b));
        }
        for k in 3..=10 {
            assert!(bell_identity_check(k).unwrap());
        }
        assert!(bell_identity_check(2).is_err());
    }

    #[test]
    fn compositions_and_multisets() {
        assert_eq!(compositions(3, 2), vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(compositions(4, 1), vec![vec![4]]);
        assert_eq!(multisets(3, 2).len(), 6);
    }

    #[test]
    fn permutation_basics() {
        assert!(Permutation::from_images(&[1, 1]).is_err());
        let s = perm(&[2, 3, 1]);
        assert_eq!(s.compose(&s.inverse()).unwrap(), Permutation::identity(3));
        assert_eq!(s.sign(), 1);
        assert_eq!(s.apply(&['a', 'b', 'c']), vec!['b', 'c', 'a']);
    }
}
