//! Subsets of a measurement set and the canonical coordinate systems built
//! from them.
//!
//! Entropy vectors and cone inequalities are indexed by nonempty subsets of
//! the measurement set. The empty set is never a coordinate: its entropy is
//! zero by convention and storing it would add a degenerate dimension to
//! every cone computation. Coordinates are ordered by (cardinality,
//! lexicographic on sorted member indices), which fixes serialization and
//! makes golden-file output byte-stable.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

/// A subset of measurements, stored as a bitmask over label indices.
///
/// Bit `i` set means measurement `i` is a member. Supports at most 64
/// measurements, far above anything the cone machinery can handle anyway.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn singleton(i: usize) -> Subset {
        assert!(i < 64);
        Subset(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(iter: I) -> Subset {
        let mut mask = 0u64;
        for i in iter {
            assert!(i < 64);
            mask |= 1 << i;
        }
        Subset(mask)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn from_bits(bits: u64) -> Subset {
        Subset(bits)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 & (1 << i) != 0
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn insert(self, i: usize) -> Subset {
        assert!(i < 64);
        Subset(self.0 | (1 << i))
    }

    pub fn remove(self, i: usize) -> Subset {
        Subset(self.0 & !(1 << (i as u64)))
    }

    /// Member indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }

    pub fn indices(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All nonempty subsets of `self`, in canonical order.
    pub fn nonempty_subsets(self) -> Vec<Subset> {
        let members = self.indices();
        let mut out = Vec::with_capacity((1usize << members.len()) - 1);
        for mask in 1u64..(1 << members.len()) {
            let mut bits = 0u64;
            for (j, &m) in members.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    bits |= 1 << m;
                }
            }
            out.push(Subset(bits));
        }
        out.sort_by(|a, b| canonical_cmp(*a, *b));
        out
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{:?}}}", self.indices())
    }
}

/// Canonical coordinate order: by cardinality first, then lexicographic on
/// the sorted index lists. Note this is not plain bitmask order: {0,3}
/// precedes {1,2} here but its mask is larger.
pub fn canonical_cmp(a: Subset, b: Subset) -> Ordering {
    a.len()
        .cmp(&b.len())
        .then_with(|| a.indices().cmp(&b.indices()))
}

/// A fixed, ordered family of nonempty subsets serving as the coordinate
/// system for entropy vectors and cone inequalities.
#[derive(Clone, Debug)]
pub struct SubsetIndex {
    labels: Vec<String>,
    subsets: Vec<Subset>,
    position: HashMap<Subset, usize>,
}

impl PartialEq for SubsetIndex {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.subsets == other.subsets
    }
}
impl Eq for SubsetIndex {}

impl SubsetIndex {
    /// The full index: every nonempty subset of the n measurements,
    /// 2^n - 1 coordinates.
    pub fn full(labels: Vec<String>) -> SubsetIndex {
        let n = labels.len();
        assert!(n >= 1 && n <= 20, "full index limited to 1..=20 labels");
        let all = Subset::from_indices(0..n);
        SubsetIndex::from_subsets(labels, all.nonempty_subsets())
    }

    /// An index over an explicit subset family; the family is sorted into
    /// canonical order and deduplicated.
    pub fn from_subsets(labels: Vec<String>, mut subsets: Vec<Subset>) -> SubsetIndex {
        subsets.retain(|s| !s.is_empty());
        subsets.sort_by(|a, b| canonical_cmp(*a, *b));
        subsets.dedup();
        let position = subsets.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        SubsetIndex {
            labels,
            subsets,
            position,
        }
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn n_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn subsets(&self) -> &[Subset] {
        &self.subsets
    }

    pub fn subset_at(&self, pos: usize) -> Subset {
        self.subsets[pos]
    }

    pub fn position(&self, s: Subset) -> Option<usize> {
        self.position.get(&s).copied()
    }

    pub fn contains(&self, s: Subset) -> bool {
        self.position.contains_key(&s)
    }

    /// True when every coordinate of `self` is also a coordinate of `other`
    /// and both families refer to the same label list.
    pub fn is_subindex_of(&self, other: &SubsetIndex) -> bool {
        self.labels == other.labels && self.subsets.iter().all(|s| other.contains(*s))
    }

    /// The index with one coordinate removed (Fourier-Motzkin elimination
    /// shrinks the space one coordinate at a time).
    pub fn without(&self, s: Subset) -> SubsetIndex {
        let subsets = self
            .subsets
            .iter()
            .copied()
            .filter(|t| *t != s)
            .collect::<Vec<_>>();
        SubsetIndex::from_subsets(self.labels.clone(), subsets)
    }

    /// Display name of a subset: member labels joined by commas, in index
    /// order, e.g. "A1,A2". Out-of-range members render as `?i`.
    pub fn subset_name(&self, s: Subset) -> String {
        s.iter()
            .map(|i| {
                self.labels
                    .get(i)
                    .cloned()
                    .unwrap_or_else(|| format!("?{i}"))
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parse a subset name produced by [`subset_name`](Self::subset_name).
    pub fn parse_subset_name(&self, name: &str) -> Option<Subset> {
        let mut bits = Subset::EMPTY;
        for part in name.split(',') {
            let part = part.trim();
            let idx = self.labels.iter().position(|l| l == part)?;
            bits = bits.insert(idx);
        }
        if bits.is_empty() {
            None
        } else {
            Some(bits)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_is_cardinality_then_lex() {
        // {0,3} must precede {1,2} despite the larger bitmask.
        let a = Subset::from_indices([0, 3]);
        let b = Subset::from_indices([1, 2]);
        assert!(a.bits() > b.bits());
        assert_eq!(canonical_cmp(a, b), Ordering::Less);
    }

    #[test]
    fn full_index_has_2n_minus_1_coordinates() {
        for n in 1..=6 {
            let labels = (0..n).map(|i| format!("A{}", i + 1)).collect();
            let idx = SubsetIndex::full(labels);
            assert_eq!(idx.len(), (1 << n) - 1);
            // Deterministic: positions round-trip.
            for (pos, s) in idx.subsets().iter().enumerate() {
                assert_eq!(idx.position(*s), Some(pos));
            }
        }
    }

    #[test]
    fn subset_names_round_trip() {
        let idx = SubsetIndex::full(vec!["A1".into(), "A2".into(), "A3".into()]);
        for s in idx.subsets() {
            let name = idx.subset_name(*s);
            assert_eq!(idx.parse_subset_name(&name), Some(*s));
        }
        assert_eq!(idx.subset_name(Subset::from_indices([0, 2])), "A1,A3");
    }

    #[test]
    fn without_removes_exactly_one_coordinate() {
        let idx = SubsetIndex::full(vec!["A".into(), "B".into()]);
        let ab = Subset::from_indices([0, 1]);
        let smaller = idx.without(ab);
        assert_eq!(smaller.len(), 2);
        assert!(!smaller.contains(ab));
        assert!(smaller.is_subindex_of(&idx));
    }
}
