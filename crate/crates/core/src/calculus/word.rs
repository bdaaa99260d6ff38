use std::cmp::Ordering;
use std::fmt;

/// Largest basis size a word can index.
pub const MAX_BASIS: usize = 64;

fn above_mask(i: usize) -> u64 {
    !((2u64 << i).wrapping_sub(1))
}

/// A strictly increasing sequence of basis indices, stored as a bit set.
///
/// Words are ordered by length first and then lexicographically by their
/// index sequences, so `e1 < e2 < e1e2 < e1e3 < e2e3`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Word(u64);

impl Word {
    pub const EMPTY: Word = Word(0);

    pub fn single(i: usize) -> Word {
        assert!(i < MAX_BASIS, "basis index {i} out of range");
        Word(1 << i)
    }

    pub fn from_bits(bits: u64) -> Word {
        Word(bits)
    }

    /// Builds a word from indices that must already be distinct; returns the
    /// sorting sign alongside, or `None` on a repeated index.
    pub fn from_indices(indices: &[usize]) -> Option<(Word, bool)> {
        let mut bits = 0u64;
        let mut odd = false;
        for &i in indices {
            assert!(i < MAX_BASIS, "basis index {i} out of range");
            let b = 1u64 << i;
            if bits & b != 0 {
                return None;
            }
            // every earlier index larger than i is one inversion
            odd ^= (bits & above_mask(i)).count_ones() & 1 == 1;
            bits |= b;
        }
        Some((Word(bits), odd))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_BASIS && self.0 & (1 << i) != 0
    }

    pub fn is_subset(self, other: Word) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Word) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: Word) -> Word {
        Word(self.0 | other.0)
    }

    pub fn minus(self, other: Word) -> Word {
        Word(self.0 & !other.0)
    }

    pub fn with(self, i: usize) -> Word {
        Word(self.0 | (1 << i))
    }

    pub fn without(self, i: usize) -> Word {
        Word(self.0 & !(1 << i))
    }

    /// Largest index plus one.
    pub fn span(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    /// Number of indices in the word strictly below `i`.
    pub fn count_below(self, i: usize) -> usize {
        (self.0 & ((1u64 << i) - 1)).count_ones() as usize
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.indices().collect()
    }

    /// Parity of the permutation sorting the concatenation `self . other`;
    /// the words must be disjoint.
    pub fn merge_odd(self, other: Word) -> bool {
        debug_assert!(self.is_disjoint(other));
        let mut odd = false;
        for j in other.indices() {
            // indices of self above j each form one inversion
            let above = self.0 & above_mask(j);
            odd ^= above.count_ones() & 1 == 1;
        }
        odd
    }

    /// All words of length `k` over `0..n`, ascending.
    pub fn all_of_length(n: usize, k: usize) -> Vec<Word> {
        fn rec(n: usize, k: usize, start: usize, bits: u64, out: &mut Vec<Word>) {
            if k == 0 {
                out.push(Word(bits));
                return;
            }
            for i in start..n {
                if n - i < k {
                    break;
                }
                rec(n, k - 1, i + 1, bits | (1 << i), out);
            }
        }
        let mut out = Vec::new();
        if k <= n {
            rec(n, k, 0, 0, &mut out);
        }
        out
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                return Ordering::Equal;
            }
            // the first differing index belongs to the lexicographically smaller word
            let low = diff.trailing_zeros();
            if self.0 & (1 << low) != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<usize> = self.indices().map(|i| i + 1).collect();
        write!(f, "{v:?}")
    }
}
