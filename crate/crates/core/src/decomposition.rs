//! Cyclically ordered sequences of Nielsen generators.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::direction_map::DirectionMap;
use crate::error::{Error, Result};
use crate::map::{GraphMap, NielsenGenerator, RoseMap};
use crate::matrix::Matrix;
use crate::permutation::PairPermutation;
use crate::scalar::Count;
use crate::word::{Turn, Word};

/// `g = g_n ∘ ⋯ ∘ g_1`, with `steps[0] = g_1` applied first.
///
/// `origin` records which rotation of the cyclic sequence is the base.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDecomposition", into = "RawDecomposition")]
pub struct Decomposition {
    rank: usize,
    steps: Vec<NielsenGenerator>,
    origin: usize,
}

#[derive(Serialize, Deserialize)]
struct RawDecomposition {
    rank: usize,
    generators: Vec<NielsenGenerator>,
    #[serde(default)]
    origin: usize,
}

impl TryFrom<RawDecomposition> for Decomposition {
    type Error = Error;
    fn try_from(r: RawDecomposition) -> Result<Self> {
        Ok(Decomposition::new(r.rank, r.generators)?.with_origin(r.origin))
    }
}

impl From<Decomposition> for RawDecomposition {
    fn from(d: Decomposition) -> Self {
        RawDecomposition { rank: d.rank, generators: d.steps, origin: d.origin }
    }
}

impl Decomposition {
    pub fn new(rank: usize, steps: Vec<NielsenGenerator>) -> Result<Self> {
        for g in &steps {
            g.check_rank(rank)?;
        }
        Ok(Decomposition { rank, steps, origin: 0 })
    }

    pub fn with_origin(mut self, origin: usize) -> Self {
        self.origin = if self.steps.is_empty() { 0 } else { origin % self.steps.len() };
        self
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decompositions serialize")
    }

    pub fn steps(&self) -> &[NielsenGenerator] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    /// Indices `i` whose pair `(g_i, g_{i+1})`, read cyclically, is not admissible.
    pub fn inadmissible_pairs(&self) -> Vec<usize> {
        let n = self.steps.len();
        (0..n).filter(|&i| !admissible_pair(&self.steps[i], &self.steps[(i + 1) % n])).collect()
    }

    pub fn is_cyclically_admissible(&self) -> bool {
        self.inadmissible_pairs().is_empty()
    }

    /// Admissibility of consecutive pairs only, without closing up.
    pub fn is_admissible(&self) -> bool {
        self.steps.windows(2).all(|p| admissible_pair(&p[0], &p[1]))
    }

    /// The rotation starting at `steps[k]`.
    pub fn rotated(&self, k: usize) -> Decomposition {
        let mut steps = self.steps.clone();
        let n = steps.len();
        if n > 0 {
            steps.rotate_left(k % n);
        }
        Decomposition { rank: self.rank, steps, origin: 0 }.with_origin(self.origin + k)
    }

    pub fn power(&self, p: usize) -> Decomposition {
        let steps = (0..p).flat_map(|_| self.steps.iter().copied()).collect();
        Decomposition { rank: self.rank, steps, origin: self.origin }
    }

    /// `other ∘ self`: the steps of `self` followed by those of `other`.
    pub fn then(&self, other: &Decomposition) -> Result<Decomposition> {
        if self.rank != other.rank {
            return Err(Error::RankError { expected: self.rank, found: other.rank });
        }
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&other.steps);
        Ok(Decomposition { rank: self.rank, steps, origin: self.origin })
    }

    /// Steps `range.start+1 ..= range.end` as a decomposition of their own.
    pub fn segment(&self, range: std::ops::Range<usize>) -> Decomposition {
        Decomposition { rank: self.rank, steps: self.steps[range].to_vec(), origin: 0 }
    }

    /// Extension by the identity on the new edges.
    pub fn extend_rank(&self, rank: usize) -> Result<Decomposition> {
        if rank < self.rank {
            return Err(Error::RankError { expected: self.rank, found: rank });
        }
        Ok(Decomposition { rank, ..self.clone() })
    }

    pub fn relabel(&self, p: &PairPermutation) -> Result<Decomposition> {
        if p.rank() != self.rank {
            return Err(Error::RankError { expected: self.rank, found: p.rank() });
        }
        Ok(Decomposition { steps: self.steps.iter().map(|g| g.relabel(p)).collect(), ..self.clone() })
    }

    pub fn generator_maps(&self) -> Vec<GraphMap> {
        self.steps.iter().map(|g| g.to_map(self.rank).expect("rank checked on construction")).collect()
    }

    /// `g_{k,1} = g_k ∘ ⋯ ∘ g_1` as image words.
    pub fn partial_map(&self, k: usize) -> GraphMap {
        self.generator_maps()[..k]
            .iter()
            .fold(GraphMap::identity(self.rank), |acc, g| GraphMap::compose(g, &acc).expect("same rank"))
    }

    /// The composite as image words. Word lengths grow exponentially in the
    /// number of steps; prefer the [`RoseMap`] methods for long sequences.
    pub fn composite_map(&self) -> GraphMap {
        self.partial_map(self.steps.len())
    }

    /// `g_{k,1}(w)`, one generator at a time.
    pub fn apply_prefix(&self, w: &Word, k: usize) -> Result<Word> {
        let mut out = w.clone();
        for g in self.generator_maps().iter().take(k) {
            out = g.apply(&out)?;
        }
        Ok(out)
    }

    /// Whether substituting generator by generator never cancels, i.e. the
    /// composite is a graph map whose images are the unreduced products.
    ///
    /// Cancellation under `[x ↦ yx]` happens exactly at a taken turn that the
    /// generator collapses, so this follows the limited-turn recursion.
    pub fn is_graph_map_composite(&self) -> bool {
        let mut turns: BTreeSet<Turn> = BTreeSet::new();
        for g in &self.steps {
            let dm = g.direction_map(self.rank);
            if turns.iter().any(|&t| dm.apply_turn(t).is_degenerate()) {
                return false;
            }
            turns = turns.iter().map(|&t| dm.apply_turn(t)).collect();
            turns.insert(g.taken_turn());
        }
        true
    }

    /// Direction maps of the rotations `g_k ∘ ⋯ ∘ g_1 ∘ g_n ∘ ⋯ ∘ g_{k+1}`, for `k = 0..n`.
    pub fn rotation_direction_maps(&self) -> Vec<DirectionMap> {
        let maps: Vec<DirectionMap> = self.steps.iter().map(|g| g.direction_map(self.rank)).collect();
        rotation_direction_maps(&maps, self.rank)
    }
}

pub(crate) fn rotation_direction_maps(maps: &[DirectionMap], rank: usize) -> Vec<DirectionMap> {
    let n = maps.len();
    (0..n).map(|k| (0..n).fold(DirectionMap::identity(rank), |acc, j| maps[(k + j) % n].after(&acc))).collect()
}

/// `(x_{i+1} = x_i and y_{i+1} ≠ ȳ_i)` or `(y_{i+1} = x_i and x_{i+1} ≠ ȳ_i)`.
pub fn admissible_pair(a: &NielsenGenerator, b: &NielsenGenerator) -> bool {
    (b.x() == a.x() && b.y() != a.y().bar()) || (b.y() == a.x() && b.x() != a.y().bar())
}

impl RoseMap for Decomposition {
    fn rank(&self) -> usize {
        self.rank
    }

    fn direction_map(&self) -> DirectionMap {
        self.steps.iter().fold(DirectionMap::identity(self.rank), |acc, g| g.direction_map(self.rank).after(&acc))
    }

    /// Computed by the recursion `𝒲_L(g_{k,1}) = 𝒯(g_k) ∪ Dg_k(𝒲_L(g_{k−1,1}))`.
    /// Degenerate turns produced by cancellation are kept.
    fn limited_turns(&self) -> BTreeSet<Turn> {
        let mut turns = BTreeSet::new();
        for g in &self.steps {
            let dm = g.direction_map(self.rank);
            turns = turns.iter().map(|&t| dm.apply_turn(t)).collect();
            turns.insert(g.taken_turn());
        }
        turns
    }

    /// Product of the generator matrices; equals the composite's matrix
    /// exactly when [`Decomposition::is_graph_map_composite`] holds.
    fn transition_matrix<T: Count>(&self) -> Option<Matrix<T>> {
        let mut acc = Matrix::<T>::identity(self.rank);
        for g in &self.steps {
            acc = g.transition_matrix::<T>(self.rank).checked_mul(&acc)?;
        }
        Some(acc)
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.steps.iter().map(ToString::to_string).collect();
        write!(f, "rank {}: {}", self.rank, parts.join(" "))
    }
}

impl fmt::Debug for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Decomposition({self})")
    }
}
