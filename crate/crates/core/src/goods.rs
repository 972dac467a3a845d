//! Sets of goods as bit vectors.
//!
//! Goods are 0-based indices. A set over at most 64 goods lives in a single
//! inline word; larger ground sets spill to the heap.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

const WORD: usize = 64;

/// A set of good indices.
///
/// Trailing zero words are never stored, so structural equality is set
/// equality.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct GoodSet {
    words: SmallVec<[u64; 1]>,
}

impl GoodSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// `{0, 1, ..., m-1}`.
    pub fn full(m: usize) -> Self {
        let mut words: SmallVec<[u64; 1]> = SmallVec::new();
        let full_words = m / WORD;
        for _ in 0..full_words {
            words.push(u64::MAX);
        }
        let rem = m % WORD;
        if rem > 0 {
            words.push((1u64 << rem) - 1);
        }
        Self { words }
    }

    /// Builds a set from the low `m` bits of `mask`.
    pub fn from_mask(mask: u64) -> Self {
        let mut s = Self::new();
        if mask != 0 {
            s.words.push(mask);
        }
        s
    }

    /// The set as a single word, if every member is below 64.
    pub fn as_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn insert(&mut self, g: usize) -> bool {
        let (w, b) = (g / WORD, g % WORD);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        let was = self.words[w] >> b & 1 == 1;
        self.words[w] |= 1 << b;
        !was
    }

    pub fn remove(&mut self, g: usize) -> bool {
        let (w, b) = (g / WORD, g % WORD);
        if w >= self.words.len() {
            return false;
        }
        let was = self.words[w] >> b & 1 == 1;
        self.words[w] &= !(1 << b);
        self.trim();
        was
    }

    pub fn contains(&self, g: usize) -> bool {
        let (w, b) = (g / WORD, g % WORD);
        w < self.words.len() && self.words[w] >> b & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Largest member, if any.
    pub fn max(&self) -> Option<usize> {
        let last = self.words.len().checked_sub(1)?;
        let w = self.words[last];
        Some(last * WORD + (WORD - 1 - w.leading_zeros() as usize))
    }

    pub fn union(&self, other: &GoodSet) -> GoodSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn union_with(&mut self, other: &GoodSet) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a |= *b;
        }
    }

    pub fn intersection(&self, other: &GoodSet) -> GoodSet {
        let mut out = GoodSet {
            words: self.words.iter().zip(other.words.iter()).map(|(a, b)| a & b).collect(),
        };
        out.trim();
        out
    }

    /// `|self ∩ other|` without allocating.
    pub fn intersection_len(&self, other: &GoodSet) -> usize {
        self.words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn difference(&self, other: &GoodSet) -> GoodSet {
        let mut out = self.clone();
        out.difference_with(other);
        out
    }

    pub fn difference_with(&mut self, other: &GoodSet) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= !*b;
        }
        self.trim();
    }

    pub fn is_subset(&self, other: &GoodSet) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn is_disjoint(&self, other: &GoodSet) -> bool {
        self.intersection_len(other) == 0
    }

    /// Members in ascending order.
    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            word_idx: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let b = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.word_idx * WORD + b);
            }
            self.word_idx += 1;
            self.current = *self.words.get(self.word_idx)?;
        }
    }
}

impl<'a> IntoIterator for &'a GoodSet {
    type Item = usize;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl FromIterator<usize> for GoodSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = GoodSet::new();
        for g in iter {
            s.insert(g);
        }
        s
    }
}

impl<const N: usize> From<[usize; N]> for GoodSet {
    fn from(goods: [usize; N]) -> Self {
        goods.into_iter().collect()
    }
}

impl fmt::Debug for GoodSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for GoodSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for GoodSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let goods = Vec::<usize>::deserialize(deserializer)?;
        Ok(goods.into_iter().collect())
    }
}
