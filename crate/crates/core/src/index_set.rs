use crate::error::{Error, Result};

/// A subset of the prime-power indices `{1, ..., r}` of a factored modulus,
/// stored as a bitmask with bit `i - 1` standing for index `i`.
///
/// The set itself does not know `r`; operations that need it (complement,
/// range checks) take it as an argument and are validated at the call site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IndexSet(u64);

pub const MAX_INDEX: usize = 64;

impl serde::Serialize for IndexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde::Serialize::serialize(&self.indices(), s)
    }
}

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub fn from_bits(bits: u64) -> IndexSet {
        IndexSet(bits)
    }

    /// Builds a set from 1-based indices.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Result<IndexSet> {
        let mut bits = 0u64;
        for i in indices {
            if i == 0 || i > MAX_INDEX {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    r: MAX_INDEX,
                });
            }
            bits |= 1 << (i - 1);
        }
        Ok(IndexSet(bits))
    }

    /// The full set `{1, ..., r}`.
    pub fn full(r: usize) -> IndexSet {
        debug_assert!(r <= MAX_INDEX);
        if r == 64 {
            IndexSet(u64::MAX)
        } else {
            IndexSet((1u64 << r) - 1)
        }
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

    /// Membership of the 1-based index `i`.
    pub fn contains(self, i: usize) -> bool {
        i >= 1 && i <= MAX_INDEX && self.0 & (1 << (i - 1)) != 0
    }

    pub fn insert(self, i: usize) -> IndexSet {
        debug_assert!(i >= 1 && i <= MAX_INDEX);
        IndexSet(self.0 | (1 << (i - 1)))
    }

    pub fn remove(self, i: usize) -> IndexSet {
        debug_assert!(i >= 1 && i <= MAX_INDEX);
        IndexSet(self.0 & !(1 << (i - 1)))
    }

    pub fn union(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 & other.0)
    }

    pub fn difference(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 & !other.0)
    }

    pub fn complement(self, r: usize) -> IndexSet {
        IndexSet(IndexSet::full(r).0 & !self.0)
    }

    pub fn is_subset(self, other: IndexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: IndexSet) -> bool {
        self.0 & other.0 == 0
    }

    /// 1-based members in ascending order.
    pub fn indices(self) -> Vec<usize> {
        (1..=MAX_INDEX).filter(|&i| self.contains(i)).collect()
    }

    /// Validates that every member lies in `1..=r`.
    pub fn check_range(self, r: usize) -> Result<()> {
        if self.is_subset(IndexSet::full(r)) {
            Ok(())
        } else {
            let bad = self.indices().into_iter().find(|&i| i > r).unwrap_or(r + 1);
            Err(Error::IndexOutOfRange { index: bad, r })
        }
    }

    /// All subsets of `self` in ascending bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = IndexSet> {
        let full = self.0;
        // standard submask walk, reordered to ascend
        let mut masks: Vec<u64> = Vec::with_capacity(1 << full.count_ones().min(24));
        let mut sub = 0u64;
        loop {
            masks.push(sub);
            if sub == full {
                break;
            }
            sub = (sub.wrapping_sub(full)) & full;
        }
        masks.sort_unstable();
        masks.into_iter().map(IndexSet)
    }

    /// All subsets of `{1..r}` with exactly `k` members, ascending bitmask order.
    pub fn level_sets(r: usize, k: usize) -> Vec<IndexSet> {
        let mut out = Vec::new();
        for bits in 0..(1u64 << r) {
            if bits.count_ones() as usize == k {
                out.push(IndexSet(bits));
            }
        }
        out
    }
}

impl std::fmt::Display for IndexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (pos, i) in self.indices().into_iter().enumerate() {
            if pos > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i)?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_set_algebra() {
        let a = IndexSet::from_indices([1, 3]).unwrap();
        let b = IndexSet::from_indices([2, 3]).unwrap();
        assert_eq!(a.union(b), IndexSet::from_indices([1, 2, 3]).unwrap());
        assert_eq!(a.intersection(b), IndexSet::from_indices([3]).unwrap());
        assert_eq!(a.complement(3), IndexSet::from_indices([2]).unwrap());
        assert!(a.is_subset(IndexSet::full(3)));
        assert!(!a.is_subset(b));
        assert_eq!(a.len(), 2);
    }

    #[test]
    fn subsets_ascend() {
        let s = IndexSet::from_indices([1, 3]).unwrap();
        let subs: Vec<u64> = s.subsets().map(|x| x.bits()).collect();
        assert_eq!(subs, vec![0b000, 0b001, 0b100, 0b101]);
    }

    #[test]
    fn zero_index_rejected() {
        assert!(IndexSet::from_indices([0]).is_err());
    }

    #[test]
    fn display_form() {
        let s = IndexSet::from_indices([2, 1]).unwrap();
        assert_eq!(s.to_string(), "{1,2}");
        assert_eq!(IndexSet::EMPTY.to_string(), "{}");
    }
}
