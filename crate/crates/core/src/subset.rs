//! Fixed-capacity bit-vector subsets of the ground set.

use std::fmt;

use crate::error::{Error, Result};

/// Dense index of an item in `0..n`.
pub type ItemId = usize;

const WORD: usize = 64;

/// A subset of `{0, .., n-1}` stored as a bit vector with a cached cardinality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subset {
    n: usize,
    words: Vec<u64>,
    len: usize,
}

impl Subset {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            words: vec![0; n.div_ceil(WORD)],
            len: 0,
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for i in 0..n {
            s.insert(i);
        }
        s
    }

    /// Builds a subset from item indices; duplicates are ignored.
    pub fn from_items<I: IntoIterator<Item = ItemId>>(n: usize, items: I) -> Result<Self> {
        let mut s = Self::empty(n);
        for i in items {
            s.checked_insert(i)?;
        }
        Ok(s)
    }

    /// Builds a subset of a ground set with at most 64 items from a bit mask.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= WORD, "from_mask supports n <= 64");
        let mask = if n == WORD { mask } else { mask & ((1u64 << n) - 1) };
        let mut words = vec![0; n.div_ceil(WORD)];
        if let Some(w) = words.first_mut() {
            *w = mask;
        }
        Self {
            n,
            words,
            len: mask.count_ones() as usize,
        }
    }

    /// Size of the ground set.
    pub fn universe(&self) -> usize {
        self.n
    }

    /// Cardinality `|X|`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, item: ItemId) -> bool {
        item < self.n && self.words[item / WORD] >> (item % WORD) & 1 == 1
    }

    /// Inserts `item`, returning whether it was newly added.
    ///
    /// Panics if `item >= n`; use [`Subset::checked_insert`] for untrusted indices.
    #[inline]
    pub fn insert(&mut self, item: ItemId) -> bool {
        assert!(item < self.n, "item {item} out of range (n = {})", self.n);
        let (w, b) = (item / WORD, 1u64 << (item % WORD));
        let fresh = self.words[w] & b == 0;
        self.words[w] |= b;
        self.len += fresh as usize;
        fresh
    }

    /// Removes `item`, returning whether it was present.
    #[inline]
    pub fn remove(&mut self, item: ItemId) -> bool {
        assert!(item < self.n, "item {item} out of range (n = {})", self.n);
        let (w, b) = (item / WORD, 1u64 << (item % WORD));
        let present = self.words[w] & b != 0;
        self.words[w] &= !b;
        self.len -= present as usize;
        present
    }

    /// Flips membership of `item`.
    #[inline]
    pub fn toggle(&mut self, item: ItemId) {
        if !self.remove(item) {
            self.insert(item);
        }
    }

    pub fn checked_insert(&mut self, item: ItemId) -> Result<bool> {
        self.check(item)?;
        Ok(self.insert(item))
    }

    pub fn checked_remove(&mut self, item: ItemId) -> Result<bool> {
        self.check(item)?;
        Ok(self.remove(item))
    }

    pub fn checked_contains(&self, item: ItemId) -> Result<bool> {
        self.check(item)?;
        Ok(self.contains(item))
    }

    fn check(&self, item: ItemId) -> Result<()> {
        if item < self.n {
            Ok(())
        } else {
            Err(Error::ItemOutOfRange { item, n: self.n })
        }
    }

    /// Members in ascending index order.
    pub fn iter(&self) -> Members<'_> {
        Members {
            words: &self.words,
            word_idx: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    /// Non-members in ascending index order.
    pub fn complement_iter(&self) -> impl Iterator<Item = ItemId> + '_ {
        (0..self.n).filter(move |&i| !self.contains(i))
    }

    pub fn to_vec(&self) -> Vec<ItemId> {
        self.iter().collect()
    }

    /// Number of set bits recomputed from scratch; equals [`Subset::len`].
    pub fn popcount(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.n == other.n
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }
}

/// Iterator over the members of a [`Subset`].
pub struct Members<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
}

impl Iterator for Members<'_> {
    type Item = ItemId;

    #[inline]
    fn next(&mut self) -> Option<ItemId> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.word_idx * WORD + bit);
            }
            self.word_idx += 1;
            self.current = *self.words.get(self.word_idx)?;
        }
    }
}

/// Serialized as the ascending list of member indices.
impl serde::Serialize for Subset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
