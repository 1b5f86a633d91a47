//! Relabelings of the `2r` directions that respect edge pairs.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{Direction, Turn, Word};

/// A permutation `σ` of the directions with `σ(d̄) = σ(d)‾`.
///
/// Stored as the images of the positive directions `E_1, …, E_r`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Direction>", into = "Vec<Direction>")]
pub struct PairPermutation {
    images: Vec<Direction>,
}

impl PairPermutation {
    pub fn identity(rank: usize) -> Self {
        PairPermutation { images: (0..rank).map(Direction::positive).collect() }
    }

    /// `images[i]` is where `E_{i+1}` goes; must hit every edge pair once.
    pub fn from_images(images: Vec<Direction>) -> Result<Self> {
        let rank = images.len();
        let mut seen = BTreeSet::new();
        for d in &images {
            d.check_rank(rank)?;
            if !seen.insert(d.edge()) {
                return Err(Error::Parse(format!(
                    "pair permutation hits edge {} twice",
                    Direction::positive(d.edge())
                )));
            }
        }
        Ok(PairPermutation { images })
    }

    /// Swaps the pairs of edges `i` and `j` (zero-based), orientations kept.
    pub fn transposition(rank: usize, i: usize, j: usize) -> Self {
        let mut p = Self::identity(rank);
        p.images.swap(i, j);
        p
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, d: Direction) -> Direction {
        let img = self.images[d.edge()];
        if d.is_inverse() {
            img.bar()
        } else {
            img
        }
    }

    pub fn apply_turn(&self, t: Turn) -> Turn {
        t.map(|d| self.apply(d))
    }

    pub fn apply_word(&self, w: &Word) -> Word {
        Word::reduce(w.letters().iter().map(|&d| self.apply(d)))
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![Direction::positive(0); self.rank()];
        for (i, &d) in self.images.iter().enumerate() {
            images[d.edge()] = Direction::new(i, d.is_inverse());
        }
        PairPermutation { images }
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &PairPermutation) -> Self {
        PairPermutation { images: inner.images.iter().map(|&d| self.apply(d)).collect() }
    }

    /// Extends by the identity on the new edges.
    pub fn extend_rank(&self, rank: usize) -> Self {
        let mut images = self.images.clone();
        images.extend((self.rank()..rank).map(Direction::positive));
        PairPermutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, d)| *d == Direction::positive(i))
    }
}

impl TryFrom<Vec<Direction>> for PairPermutation {
    type Error = Error;
    fn try_from(v: Vec<Direction>) -> Result<Self> {
        Self::from_images(v)
    }
}

impl From<PairPermutation> for Vec<Direction> {
    fn from(p: PairPermutation) -> Self {
        p.images
    }
}

impl fmt::Debug for PairPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (i, d) in self.images.iter().enumerate() {
            m.entry(&Direction::positive(i), d);
        }
        m.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Direction {
        Direction::parse(s).unwrap()
    }

    #[test]
    fn respects_pairs_and_inverts() {
        let p = PairPermutation::from_images(vec![d("c-"), d("a"), d("b")]).unwrap();
        for x in Direction::all(3) {
            assert_eq!(p.apply(x.bar()), p.apply(x).bar());
            assert_eq!(p.inverse().apply(p.apply(x)), x);
        }
        assert_eq!(p.apply(d("a-")), d("c"));
        assert!(p.inverse().after(&p).is_identity());
    }

    #[test]
    fn transposition_twice_is_identity() {
        let t = PairPermutation::transposition(4, 1, 2);
        assert!(t.after(&t).is_identity());
        assert_eq!(t.apply(d("b-")), d("c-"));
    }

    #[test]
    fn rejects_repeated_pairs() {
        assert!(PairPermutation::from_images(vec![d("a"), d("a-")]).is_err());
        assert!(PairPermutation::from_images(vec![d("a"), d("c")]).is_err());
    }
}
