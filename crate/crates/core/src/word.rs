//! Directions, turns and freely reduced words on the rank-`r` rose.
//!
//! The rose has one vertex and edges `E_1, …, E_r`. A [`Direction`] is an
//! oriented edge (equivalently its initial germ at the vertex); there are
//! `2r` of them. Words are freely reduced edge-paths.
//!
//! Text syntax: edge `i` is the `i`-th lowercase letter (`a` = `E_1`), an
//! inverse is written with a trailing `-` or as the uppercase letter.
//! Output always uses the trailing `-` form. Ranks above 26 use `x27`,
//! `x27-`, … for the extra edges.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An oriented edge of the rose; `E_i` or its inverse `Ē_i`.
///
/// Encoded densely as `2 * edge + inverted`, which gives the canonical
/// order `E_1 < Ē_1 < E_2 < Ē_2 < …` used for every deterministic
/// enumeration in the crate.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Direction(u16);

impl Direction {
    /// `edge` is zero-based.
    pub fn new(edge: usize, inverted: bool) -> Self {
        Direction((edge as u16) << 1 | inverted as u16)
    }

    pub fn positive(edge: usize) -> Self {
        Self::new(edge, false)
    }

    pub fn from_code(code: usize) -> Self {
        Direction(code as u16)
    }

    /// Dense index in `0..2r`.
    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn edge(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn bar(self) -> Self {
        Direction(self.0 ^ 1)
    }

    /// All `2r` directions in canonical order.
    pub fn all(rank: usize) -> impl Iterator<Item = Direction> + Clone {
        (0..2 * rank).map(Direction::from_code)
    }

    pub fn check_rank(self, rank: usize) -> Result<()> {
        if self.edge() < rank {
            Ok(())
        } else {
            Err(Error::InvalidLetter {
                letter: self.to_string(),
                reason: format!("edge index out of range for rank {rank}"),
            })
        }
    }

    /// Parses one letter (`a`, `a-`, `A`, `x27-`).
    pub fn parse(s: &str) -> Result<Self> {
        let letters = parse_letters(s)?;
        match letters.as_slice() {
            [d] => Ok(*d),
            _ => Err(Error::InvalidLetter { letter: s.to_string(), reason: "expected exactly one direction".into() }),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.edge();
        if e < 26 {
            write!(f, "{}", (b'a' + e as u8) as char)?;
        } else {
            write!(f, "x{}", e + 1)?;
        }
        if self.is_inverse() {
            f.write_str("-")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Direction::parse(s)
    }
}

impl Serialize for Direction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Direction::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Tokenizes ASCII word syntax into directions (no reduction, no rank check).
pub fn parse_letters(s: &str) -> Result<Vec<Direction>> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() || c == b'.' || c == b'*' {
            i += 1;
            continue;
        }
        let (edge, mut inverted) = if c == b'x' && i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
            let start = i + 1;
            let mut end = start;
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
            let n: usize = s[start..end].parse().map_err(|_| Error::InvalidLetter {
                letter: s[i..end].to_string(),
                reason: "bad numbered edge".into(),
            })?;
            if n == 0 {
                return Err(Error::InvalidLetter {
                    letter: s[i..end].to_string(),
                    reason: "edges are numbered from 1".into(),
                });
            }
            i = end;
            (n - 1, false)
        } else if c.is_ascii_lowercase() {
            i += 1;
            ((c - b'a') as usize, false)
        } else if c.is_ascii_uppercase() {
            i += 1;
            ((c - b'A') as usize, true)
        } else {
            return Err(Error::InvalidLetter {
                letter: (c as char).to_string(),
                reason: "not a direction letter".into(),
            });
        };
        if i < bytes.len() && bytes[i] == b'-' {
            inverted = !inverted;
            i += 1;
        }
        out.push(Direction::new(edge, inverted));
    }
    Ok(out)
}

/// Unordered pair of directions. Degenerate turns `{d, d}` are allowed.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Turn(Direction, Direction);

impl Turn {
    pub fn new(a: Direction, b: Direction) -> Self {
        if a <= b {
            Turn(a, b)
        } else {
            Turn(b, a)
        }
    }

    pub fn first(self) -> Direction {
        self.0
    }

    pub fn second(self) -> Direction {
        self.1
    }

    pub fn is_degenerate(self) -> bool {
        self.0 == self.1
    }

    pub fn contains(self, d: Direction) -> bool {
        self.0 == d || self.1 == d
    }

    /// The endpoint other than `d`, if `d` is an endpoint.
    pub fn other(self, d: Direction) -> Option<Direction> {
        if self.0 == d {
            Some(self.1)
        } else if self.1 == d {
            Some(self.0)
        } else {
            None
        }
    }

    pub fn map(self, f: impl Fn(Direction) -> Direction) -> Turn {
        Turn::new(f(self.0), f(self.1))
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('{').trim_end_matches('}');
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        match parts.as_slice() {
            [a, b] => Ok(Turn::new(Direction::parse(a)?, Direction::parse(b)?)),
            _ => Err(Error::Parse(format!("turn {s:?} must be two directions"))),
        }
    }
}

impl fmt::Display for Turn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.0, self.1)
    }
}

impl fmt::Debug for Turn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Turn {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.0, self.1].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Turn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b] = <[Direction; 2]>::deserialize(d)?;
        Ok(Turn::new(a, b))
    }
}

/// A freely reduced edge-path.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<Direction>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(d: Direction) -> Self {
        Word(vec![d])
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Direction>>(letters: I) -> Self {
        let mut out: Vec<Direction> = Vec::new();
        for d in letters {
            if out.last() == Some(&d.bar()) {
                out.pop();
            } else {
                out.push(d);
            }
        }
        Word(out)
    }

    /// Like [`Word::reduce`] but rejects letters outside the given rank.
    pub fn reduce_in_rank<I: IntoIterator<Item = Direction>>(letters: I, rank: usize) -> Result<Self> {
        let letters: Vec<Direction> = letters.into_iter().collect();
        for d in &letters {
            d.check_rank(rank)?;
        }
        Ok(Word::reduce(letters))
    }

    /// Parses and freely reduces.
    pub fn parse(s: &str, rank: usize) -> Result<Self> {
        Word::reduce_in_rank(parse_letters(s)?, rank)
    }

    pub fn letters(&self) -> &[Direction] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Direction> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Direction> {
        self.0.last().copied()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|d| d.bar()).collect())
    }

    /// Concatenation followed by free reduction.
    pub fn concat(&self, other: &Word) -> Word {
        Word::reduce(self.0.iter().chain(other.0.iter()).copied())
    }

    /// Appends one letter, cancelling if it is the inverse of the last one.
    pub fn push_reduced(&mut self, d: Direction) {
        if self.0.last() == Some(&d.bar()) {
            self.0.pop();
        } else {
            self.0.push(d);
        }
    }

    pub fn common_prefix_len(&self, other: &Word) -> usize {
        self.0.iter().zip(other.0.iter()).take_while(|(a, b)| a == b).count()
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    /// The first `n` letters.
    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    /// The word with its first `n` letters removed.
    pub fn suffix(&self, n: usize) -> Word {
        Word(self.0[n.min(self.0.len())..].to_vec())
    }

    pub fn contains_edge(&self, edge: usize) -> bool {
        self.0.iter().any(|d| d.edge() == edge)
    }

    pub fn contains_subword(&self, needle: &[Direction]) -> bool {
        needle.is_empty() || self.0.windows(needle.len()).any(|w| w == needle)
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[1] != w[0].bar())
    }

    /// The `len - 1` turns `{ē_i, e_{i+1}}` taken at interior junctions.
    pub fn turns(&self) -> impl Iterator<Item = Turn> + '_ {
        self.0.windows(2).map(|w| Turn::new(w[0].bar(), w[1]))
    }

    pub(crate) fn from_reduced_unchecked(v: Vec<Direction>) -> Word {
        debug_assert!(Word(v.clone()).is_reduced());
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let letters = parse_letters(&s).map_err(serde::de::Error::custom)?;
        Ok(Word::reduce(letters))
    }
}

/// The set of turns taken by a word.
pub fn taken_turns(w: &Word) -> std::collections::BTreeSet<Turn> {
    w.turns().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s, 3).unwrap()
    }

    fn d(s: &str) -> Direction {
        Direction::parse(s).unwrap()
    }

    #[test]
    fn bar_is_an_involution_without_fixed_points() {
        for x in Direction::all(5) {
            assert_eq!(x.bar().bar(), x);
            assert_ne!(x.bar(), x);
        }
    }

    #[test]
    fn both_inverse_spellings_parse() {
        assert_eq!(d("a-"), d("A"));
        assert_eq!(d("A").to_string(), "a-");
        assert_eq!(d("x27").edge(), 26);
        assert_eq!(Direction::new(26, true).to_string(), "x27-");
        assert_eq!(d("x27-"), Direction::new(26, true));
    }

    #[test]
    fn inverse_cancellation() {
        assert!(w("a a-").is_empty());
        assert_eq!(w("b b a-").to_string(), "bba-");
    }

    #[test]
    fn out_of_range_letter_is_rejected() {
        assert!(matches!(Word::parse("abd", 3), Err(Error::InvalidLetter { .. })));
        assert!(matches!(Word::parse("a?", 3), Err(Error::InvalidLetter { .. })));
    }

    #[test]
    fn cancellation_leaves_junction_turn() {
        // Tightening ā b ā b ā against ā b ā b c̄ leaves the turn {ā, c̄}.
        let x = w("a-ba-ba-");
        let y = w("a-ba-bc-");
        let n = x.common_prefix_len(&y);
        let t = Turn::new(x.suffix(n).first().unwrap(), y.suffix(n).first().unwrap());
        assert_eq!(t, Turn::new(d("a-"), d("c-")));
        let z = x.inverse().concat(&y);
        assert_eq!(z.to_string(), "ac-");
        assert_eq!(taken_turns(&z).into_iter().collect::<Vec<_>>(), vec![Turn::new(d("a-"), d("c-"))]);
    }

    #[test]
    fn turns_of_short_words() {
        assert_eq!(taken_turns(&w("a-b")).into_iter().collect::<Vec<_>>(), vec![Turn::new(d("a"), d("b"))]);
        let t: Vec<_> = taken_turns(&w("abc")).into_iter().collect();
        assert_eq!(t, vec![Turn::new(d("a-"), d("b")), Turn::new(d("b-"), d("c"))]);
        assert!(taken_turns(&w("a")).is_empty());
        assert!(taken_turns(&Word::empty()).is_empty());
    }

    #[test]
    fn turn_parse_and_display() {
        let t = Turn::parse("{b, a-}").unwrap();
        assert_eq!(t, Turn::new(d("a-"), d("b")));
        assert_eq!(t.to_string(), "{a-, b}");
        assert!(Turn::new(d("c"), d("c")).is_degenerate());
    }

    #[test]
    fn serde_uses_text_syntax() {
        let word = w("ab-c");
        let json = serde_json::to_string(&word).unwrap();
        assert_eq!(json, "\"ab-c\"");
        let back: Word = serde_json::from_str(&json).unwrap();
        assert_eq!(back, word);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn letters(rank: usize) -> impl Strategy<Value = Vec<Direction>> {
            proptest::collection::vec((0..2 * rank).prop_map(Direction::from_code), 0..40)
        }

        proptest! {
            #[test]
            fn reduction_is_idempotent_and_shortening(v in letters(3)) {
                let once = Word::reduce(v.clone());
                prop_assert!(once.len() <= v.len());
                prop_assert!(once.is_reduced());
                prop_assert_eq!(Word::reduce(once.letters().to_vec()), once.clone());
                let text = once.to_string();
                prop_assert_eq!(Word::parse(&text, 3).unwrap(), once);
            }

            #[test]
            fn word_times_inverse_is_trivial(v in letters(4)) {
                let x = Word::reduce(v);
                prop_assert!(x.concat(&x.inverse()).is_empty());
            }
        }
    }
}
