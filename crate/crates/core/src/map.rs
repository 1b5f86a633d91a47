//! Standard Nielsen generators and graph maps on the rose.
//!
//! Composition is written right to left: `compose(outer, inner)` applies
//! `inner` first. Directions of a map are read off the first letter of each
//! image, so `Dg(d)` is the first letter of `g(d)`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::direction_map::DirectionMap;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::permutation::PairPermutation;
use crate::scalar::Count;
use crate::whitehead::{turn_closure, TurnClosure};
use crate::word::{parse_letters, Direction, Turn, Word};

/// `[x ↦ y x]`: replaces the direction `x` by `y x` and fixes everything else.
///
/// Stored in prepend form over all `2r` directions. When `x` is an inverse
/// direction `Ē_i`, the map on edges is `E_i ↦ E_i ȳ`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGenerator", into = "RawGenerator")]
pub struct NielsenGenerator {
    x: Direction,
    y: Direction,
}

#[derive(Serialize, Deserialize)]
struct RawGenerator {
    x: Direction,
    y: Direction,
}

impl TryFrom<RawGenerator> for NielsenGenerator {
    type Error = Error;
    fn try_from(r: RawGenerator) -> Result<Self> {
        NielsenGenerator::new(r.x, r.y)
    }
}

impl From<NielsenGenerator> for RawGenerator {
    fn from(g: NielsenGenerator) -> Self {
        RawGenerator { x: g.x, y: g.y }
    }
}

impl NielsenGenerator {
    pub fn new(x: Direction, y: Direction) -> Result<Self> {
        if y.edge() == x.edge() {
            return Err(Error::InvalidGenerator(format!("[{x} -> {y}{x}] uses a single edge pair")));
        }
        Ok(NielsenGenerator { x, y })
    }

    /// `[x ↦ x y]`, normalized to `[x̄ ↦ ȳ x̄]`.
    pub fn from_append(x: Direction, y: Direction) -> Result<Self> {
        Self::new(x.bar(), y.bar())
    }

    /// Parses `x->yx` or `x->xy` (brackets and `↦` accepted).
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('[').trim_end_matches(']');
        let (lhs, rhs) = t
            .split_once("->")
            .or_else(|| t.split_once('↦'))
            .ok_or_else(|| Error::Parse(format!("generator {s:?} needs '->'")))?;
        let x = Direction::parse(lhs.trim())?;
        match parse_letters(rhs)?.as_slice() {
            [y, x2] if *x2 == x => Self::new(x, *y),
            [x2, y] if *x2 == x => Self::from_append(x, *y),
            _ => Err(Error::Parse(format!("generator {s:?} must send x to yx or xy"))),
        }
    }

    /// The replaced direction `d^u`.
    pub fn x(&self) -> Direction {
        self.x
    }

    /// The prepended direction `d^a`.
    pub fn y(&self) -> Direction {
        self.y
    }

    pub fn check_rank(&self, rank: usize) -> Result<()> {
        self.x.check_rank(rank)?;
        self.y.check_rank(rank)
    }

    /// `{d^u, d^a}`, the only turn the generator collapses.
    pub fn illegal_turn(&self) -> Turn {
        Turn::new(self.x, self.y)
    }

    /// The turn `{ȳ, x}` taken inside the image of the replaced edge.
    pub fn taken_turn(&self) -> Turn {
        Turn::new(self.y.bar(), self.x)
    }

    pub fn direction_map(&self, rank: usize) -> DirectionMap {
        let mut img: Vec<Direction> = Direction::all(rank).collect();
        img[self.x.code()] = self.y;
        DirectionMap::from_images(img)
    }

    pub fn to_map(&self, rank: usize) -> Result<GraphMap> {
        self.check_rank(rank)?;
        let mut images: Vec<Word> = (0..rank).map(|i| Word::letter(Direction::positive(i))).collect();
        let (x, y) = (self.x, self.y);
        images[x.edge()] = if x.is_inverse() {
            Word::from_reduced_unchecked(vec![x.bar(), y.bar()])
        } else {
            Word::from_reduced_unchecked(vec![y, x])
        };
        Ok(GraphMap { images })
    }

    /// Transition matrix `I + e_{|y|,|x|}`.
    pub fn transition_matrix<T: Count>(&self, rank: usize) -> Matrix<T> {
        let mut m = Matrix::identity(rank);
        m.set(self.y.edge(), self.x.edge(), T::one());
        m
    }

    pub fn relabel(&self, p: &PairPermutation) -> Self {
        NielsenGenerator { x: p.apply(self.x), y: p.apply(self.y) }
    }
}

impl fmt::Display for NielsenGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} -> {}{}]", self.x, self.y, self.x)
    }
}

impl fmt::Debug for NielsenGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Invariants computable from a map of the rose without reference to how it
/// is represented.
///
/// Implemented directly by [`GraphMap`] and, without ever forming composite
/// image words, by [`crate::Decomposition`].
pub trait RoseMap {
    fn rank(&self) -> usize;

    fn direction_map(&self) -> DirectionMap;

    /// Turns taken by the images of single edges, `𝒲_L(g)`.
    fn limited_turns(&self) -> BTreeSet<Turn>;

    /// `None` when an entry overflows `T`.
    fn transition_matrix<T: Count>(&self) -> Option<Matrix<T>>;

    fn exact_transition_matrix(&self) -> Matrix<BigUint> {
        self.transition_matrix().expect("BigUint entries never overflow")
    }

    fn is_irreducible(&self) -> bool {
        self.exact_transition_matrix().is_irreducible()
    }

    fn is_strictly_irreducible(&self) -> bool {
        self.exact_transition_matrix().is_positive()
    }

    fn is_expanding(&self) -> bool {
        self.exact_transition_matrix().all_columns_grow()
    }

    /// Least `p ≤ bound` with every entry of `M^p` positive.
    fn positive_power(&self, bound: u32) -> Option<u32> {
        let m = self.exact_transition_matrix();
        let mut acc = m.clone();
        for p in 1..=bound {
            if acc.is_positive() {
                return Some(p);
            }
            acc = acc.checked_mul(&m)?;
        }
        None
    }

    fn is_illegal(&self, t: Turn) -> bool {
        self.direction_map().is_illegal(t)
    }

    fn turn_closure(&self) -> TurnClosure {
        turn_closure(self)
    }

    /// No turn taken by an iterate is collapsed by a further iterate.
    fn is_train_track(&self) -> bool {
        let dm = self.direction_map();
        self.turn_closure().turns.iter().all(|&t| !dm.is_illegal(t))
    }

    fn rotationless_power(&self) -> Rotationless {
        Rotationless::of(&self.direction_map())
    }
}

/// Exponent `R` making every periodic direction fixed, with the direction
/// cycles it was read from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rotationless {
    pub exponent: usize,
    pub cycles: Vec<Vec<Direction>>,
}

impl Rotationless {
    pub fn of(dm: &DirectionMap) -> Self {
        let cycles = dm.cycles();
        let exponent = dm.rotationless_exponent();
        debug_assert!(cycles.iter().flatten().all(|&d| dm.iterate(d, exponent) == d));
        Rotationless { exponent, cycles }
    }
}

/// A map of the rose given by its edge images.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GraphMap {
    images: Vec<Word>,
}

impl GraphMap {
    pub fn identity(rank: usize) -> Self {
        GraphMap { images: (0..rank).map(|i| Word::letter(Direction::positive(i))).collect() }
    }

    /// `images[i]` is the image of `E_{i+1}`; each must be nonempty and in rank.
    pub fn from_images(images: Vec<Word>) -> Result<Self> {
        let rank = images.len();
        for (i, w) in images.iter().enumerate() {
            if w.is_empty() {
                return Err(Error::InvalidGraph(format!("image of {} is empty", Direction::positive(i))));
            }
            for d in w.letters() {
                d.check_rank(rank)?;
            }
        }
        Ok(GraphMap { images })
    }

    /// Parses one image per edge, e.g. `["ab", "bab"]`.
    pub fn parse(images: &[&str]) -> Result<Self> {
        let rank = images.len();
        Self::from_images(images.iter().map(|s| Word::parse(s, rank)).collect::<Result<_>>()?)
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, d: Direction) -> Word {
        let w = &self.images[d.edge()];
        if d.is_inverse() {
            w.inverse()
        } else {
            w.clone()
        }
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        for d in w.letters() {
            d.check_rank(self.rank())?;
        }
        Ok(self.apply_unchecked(w))
    }

    pub(crate) fn apply_unchecked(&self, w: &Word) -> Word {
        let mut out = Word::empty();
        for &d in w.letters() {
            let img = &self.images[d.edge()];
            if d.is_inverse() {
                for &e in img.letters().iter().rev() {
                    out.push_reduced(e.bar());
                }
            } else {
                for &e in img.letters() {
                    out.push_reduced(e);
                }
            }
        }
        out
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: &GraphMap, inner: &GraphMap) -> Result<GraphMap> {
        if outer.rank() != inner.rank() {
            return Err(Error::RankError { expected: inner.rank(), found: outer.rank() });
        }
        let images: Vec<Word> = inner.images.iter().map(|w| outer.apply_unchecked(w)).collect();
        if let Some(i) = images.iter().position(Word::is_empty) {
            return Err(Error::InvalidGraph(format!("composite collapses edge {}", Direction::positive(i))));
        }
        Ok(GraphMap { images })
    }

    pub fn power(&self, p: usize) -> Result<GraphMap> {
        let mut out = GraphMap::identity(self.rank());
        for _ in 0..p {
            out = GraphMap::compose(self, &out)?;
        }
        Ok(out)
    }

    pub fn total_length(&self) -> usize {
        self.images.iter().map(Word::len).sum()
    }

    /// Determinant of the abelianized map.
    pub fn abelian_determinant(&self) -> i128 {
        let n = self.rank();
        let mut m = vec![vec![0i128; n]; n];
        for (j, w) in self.images.iter().enumerate() {
            for d in w.letters() {
                m[d.edge()][j] += if d.is_inverse() { -1 } else { 1 };
            }
        }
        bareiss_determinant(m)
    }

    /// Necessary condition for a homotopy equivalence: `det = ±1` after abelianizing.
    pub fn is_abelian_unimodular(&self) -> bool {
        self.abelian_determinant().abs() == 1
    }
}

fn bareiss_determinant(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

impl RoseMap for GraphMap {
    fn rank(&self) -> usize {
        self.images.len()
    }

    fn direction_map(&self) -> DirectionMap {
        DirectionMap::from_images(
            Direction::all(self.rank())
                .map(|d| {
                    let w = &self.images[d.edge()];
                    if d.is_inverse() {
                        w.last().expect("nonempty image").bar()
                    } else {
                        w.first().expect("nonempty image")
                    }
                })
                .collect(),
        )
    }

    fn limited_turns(&self) -> BTreeSet<Turn> {
        self.images.iter().flat_map(|w| w.turns()).collect()
    }

    fn transition_matrix<T: Count>(&self) -> Option<Matrix<T>> {
        let n = self.rank();
        let mut m = Matrix::<T>::zeros(n);
        for (j, w) in self.images.iter().enumerate() {
            for d in w.letters() {
                let v = m.get(d.edge(), j).checked_add(&T::one())?;
                m.set(d.edge(), j, v);
            }
        }
        Some(m)
    }
}

impl fmt::Display for GraphMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.images.iter().enumerate() {
            writeln!(f, "{} -> {}", Direction::positive(i), w)?;
        }
        Ok(())
    }
}

impl fmt::Debug for GraphMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (i, w) in self.images.iter().enumerate() {
            m.entry(&Direction::positive(i), &format_args!("{w}"));
        }
        m.finish()
    }
}
