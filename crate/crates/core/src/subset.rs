use std::fmt;

use crate::error::{Error, Result};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 20;

/// A subset of `{0, .., d-1}` stored as a bitmask. Rendered with 1-based
/// indices (`"1,3"`; the empty set is `""`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn full(d: usize) -> Self {
        Subset(((1u64 << d) - 1) as u32)
    }

    pub fn from_indices(indices: &[usize]) -> Self {
        Subset(indices.iter().fold(0, |acc, &i| acc | (1 << i)))
    }

    /// Parses 1-based indices, e.g. `"1,3"`. Indices must lie in `1..=d`.
    pub fn parse(key: &str, d: usize) -> Result<Self> {
        let key = key.trim();
        if key.is_empty() {
            return Ok(Subset::EMPTY);
        }
        let mut s = Subset::EMPTY;
        for part in key.split(',') {
            let i: usize = part
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad subset index {part:?}")))?;
            if i == 0 || i > d {
                return Err(Error::InvalidArgument(format!("subset index {i} outside 1..={d}")));
            }
            s = s.with(i - 1);
        }
        Ok(s)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        Subset(self.0 | 1 << i)
    }

    pub fn without(self, i: usize) -> Self {
        Subset(self.0 & !(1 << i))
    }

    pub fn union(self, other: Subset) -> Self {
        Subset(self.0 | other.0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 31 - self.0.leading_zeros() as usize)
    }

    /// 0-based indices in increasing order.
    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|&i| self.contains(i)).collect()
    }

    /// 1-based indices in increasing order.
    pub fn one_based(self) -> Vec<usize> {
        self.indices().into_iter().map(|i| i + 1).collect()
    }

    /// All `2^d` subsets in bitmask order.
    pub fn all(d: usize) -> impl Iterator<Item = Subset> {
        (0..1u32 << d).map(Subset)
    }

    /// All subsets ordered by cardinality, then lexicographically.
    pub fn by_cardinality(d: usize) -> Vec<Subset> {
        let mut v: Vec<Subset> = Subset::all(d).collect();
        v.sort_by_key(|s| (s.len(), s.indices()));
        v
    }

    /// Subsets of size `k`.
    pub fn of_size(d: usize, k: usize) -> impl Iterator<Item = Subset> {
        Subset::all(d).filter(move |s| s.len() == k)
    }

    /// Image under a permutation of `{0, .., d-1}`.
    pub fn map(self, sigma: &[usize]) -> Self {
        Subset::from_indices(&self.indices().into_iter().map(|i| sigma[i]).collect::<Vec<_>>())
    }

    pub fn key(self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_based().iter().map(usize::to_string).collect();
        f.write_str(&parts.join(","))
    }
}
