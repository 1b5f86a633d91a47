//! Self-maps of the `2r` directions at the rose vertex.

use std::collections::BTreeSet;
use std::fmt;

use crate::word::{Direction, Turn};

/// A total function on the directions of a rank-`r` rose (`Dg`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DirectionMap {
    image: Vec<Direction>,
}

impl DirectionMap {
    pub fn identity(rank: usize) -> Self {
        DirectionMap { image: Direction::all(rank).collect() }
    }

    /// `image[d.code()]` is the image of `d`.
    pub fn from_images(image: Vec<Direction>) -> Self {
        assert!(image.len().is_multiple_of(2), "direction maps act on 2r directions");
        DirectionMap { image }
    }

    pub fn rank(&self) -> usize {
        self.image.len() / 2
    }

    pub fn apply(&self, d: Direction) -> Direction {
        self.image[d.code()]
    }

    pub fn apply_turn(&self, t: Turn) -> Turn {
        t.map(|d| self.apply(d))
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn after(&self, inner: &DirectionMap) -> DirectionMap {
        DirectionMap { image: inner.image.iter().map(|&d| self.apply(d)).collect() }
    }

    pub fn iterate(&self, d: Direction, times: usize) -> Direction {
        (0..times).fold(d, |x, _| self.apply(x))
    }

    pub fn power(&self, p: usize) -> DirectionMap {
        let mut out = DirectionMap::identity(self.rank());
        for _ in 0..p {
            out = self.after(&out);
        }
        out
    }

    pub fn image_set(&self) -> BTreeSet<Direction> {
        self.image.iter().copied().collect()
    }

    /// Directions with no preimage.
    pub fn missing(&self) -> Vec<Direction> {
        let img = self.image_set();
        Direction::all(self.rank()).filter(|d| !img.contains(d)).collect()
    }

    /// Directions with at least two preimages.
    pub fn doubled(&self) -> Vec<Direction> {
        let mut count = vec![0usize; self.image.len()];
        for d in &self.image {
            count[d.code()] += 1;
        }
        Direction::all(self.rank()).filter(|d| count[d.code()] >= 2).collect()
    }

    /// The eventual cycles of the map, each listed from its least element.
    ///
    /// Every orbit enters its cycle within `2r` steps.
    pub fn cycles(&self) -> Vec<Vec<Direction>> {
        let n = self.image.len();
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for d in Direction::all(self.rank()) {
            let start = self.iterate(d, n);
            if seen.contains(&start) {
                continue;
            }
            let mut cycle = vec![start];
            let mut x = self.apply(start);
            while x != start {
                cycle.push(x);
                x = self.apply(x);
            }
            let min_pos = cycle.iter().enumerate().min_by_key(|(_, d)| **d).map(|(i, _)| i).unwrap();
            cycle.rotate_left(min_pos);
            seen.extend(cycle.iter().copied());
            out.push(cycle);
        }
        out.sort();
        out
    }

    pub fn periodic(&self) -> BTreeSet<Direction> {
        self.cycles().into_iter().flatten().collect()
    }

    pub fn fixed(&self) -> BTreeSet<Direction> {
        Direction::all(self.rank()).filter(|&d| self.apply(d) == d).collect()
    }

    /// Least `R` such that every periodic direction is fixed by the `R`-th power.
    pub fn rotationless_exponent(&self) -> usize {
        self.cycles().iter().map(Vec::len).fold(1, lcm)
    }

    /// Whether the turn is collapsed by some iterate. Degenerate turns are illegal.
    ///
    /// Two orbits that ever meet have met by step `2r`, since both are in their
    /// eventual cycles by then and a collision inside a cycle is preserved.
    pub fn is_illegal(&self, t: Turn) -> bool {
        self.is_illegal_within(t, 2 * self.image.len())
    }

    pub fn is_illegal_within(&self, t: Turn, p_max: usize) -> bool {
        let (mut a, mut b) = (t.first(), t.second());
        if a == b {
            return true;
        }
        for _ in 0..p_max {
            a = self.apply(a);
            b = self.apply(b);
            if a == b {
                return true;
            }
        }
        false
    }

    pub fn illegal_turns(&self) -> BTreeSet<Turn> {
        let dirs: Vec<Direction> = Direction::all(self.rank()).collect();
        let mut out = BTreeSet::new();
        for (i, &a) in dirs.iter().enumerate() {
            for &b in &dirs[i + 1..] {
                let t = Turn::new(a, b);
                if self.is_illegal(t) {
                    out.insert(t);
                }
            }
        }
        out
    }
}

impl fmt::Debug for DirectionMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for d in Direction::all(self.rank()) {
            m.entry(&d, &self.apply(d));
        }
        m.finish()
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Direction {
        Direction::parse(s).unwrap()
    }

    #[test]
    fn cycles_of_a_rotation() {
        // a -> b -> c -> a, inverses fixed.
        let m = DirectionMap::from_images(vec![d("b"), d("a-"), d("c"), d("b-"), d("a"), d("c-")]);
        let expected = vec![vec![d("a"), d("b"), d("c")], vec![d("a-")], vec![d("b-")], vec![d("c-")]];
        assert_eq!(m.cycles(), expected);
        assert_eq!(m.rotationless_exponent(), 3);
        assert!(m.power(3).fixed().len() == 6);
    }

    #[test]
    fn collapsing_pair_is_illegal() {
        let mut img: Vec<Direction> = Direction::all(2).collect();
        img[d("a-").code()] = d("b");
        let m = DirectionMap::from_images(img);
        assert!(m.is_illegal(Turn::new(d("a-"), d("b"))));
        assert!(!m.is_illegal(Turn::new(d("a"), d("b"))));
        assert!(m.is_illegal(Turn::new(d("a"), d("a"))));
        assert_eq!(m.missing(), vec![d("a-")]);
        assert_eq!(m.doubled(), vec![d("b")]);
        assert_eq!(m.illegal_turns().into_iter().collect::<Vec<_>>(), vec![Turn::new(d("a-"), d("b"))]);
    }
}
