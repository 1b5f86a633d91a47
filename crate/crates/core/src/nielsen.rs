//! Searching for indivisible Nielsen paths.
//!
//! An iNP of `g = g_n ∘ ⋯ ∘ g_1` has the form `ρ = ρ̄_1 ρ_2` with `ρ_1`,
//! `ρ_2` legal and an illegal turn between them. Both halves are pushed
//! through the generators one at a time; after tightening, the remaining
//! junction turn must stay illegal for the rest of the sequence. Each time a
//! half is used up it is extended by every legal next edge, so the search
//! branches. A branch dies when its junction turn becomes legal, or when at a
//! full pass its remainders are inconsistent with the halves themselves.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::decomposition::{rotation_direction_maps, Decomposition};
use crate::direction_map::DirectionMap;
use crate::error::{Error, Result};
use crate::map::{GraphMap, RoseMap};
use crate::word::{Direction, Turn, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    /// Full passes through the sequence before giving up.
    pub max_passes: usize,
    /// Cap on `|ρ_1| + |ρ_2|`.
    pub max_len: usize,
    /// Cap on search states processed; the remainder is reported open.
    pub max_states: usize,
}

/// Default cap on search states.
pub const DEFAULT_MAX_STATES: usize = 200_000;

impl Bounds {
    /// Three passes and four times the composite's total image length.
    pub fn default_for<M: RoseMap + ?Sized>(g: &M) -> Bounds {
        let total: num_bigint::BigUint = g.exact_transition_matrix().rows().into_iter().flatten().sum();
        let len = total.to_usize().unwrap_or(usize::MAX / 4);
        Bounds { max_passes: 3, max_len: len.saturating_mul(4), max_states: DEFAULT_MAX_STATES }
    }
}

/// Which half of `ρ = ρ̄_1 ρ_2` an extension was made on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `ρ_1`, starting with `d^u`.
    U,
    /// `ρ_2`, starting with `d^a`.
    A,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Extension {
    pub side: Side,
    pub edge: Direction,
    /// Number of generators applied when the extension was needed.
    pub after_step: usize,
    /// Forced by consistency at a pass boundary rather than by exhaustion.
    pub forced: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    /// The junction turn after `after_step` generators is legal for the
    /// rest of the sequence; it is not the illegal turn of `g_{next_generator}`.
    Legalized { after_step: usize, turn: Turn, next_generator: usize },
    /// At a pass boundary the remainders disagree with the halves.
    Mismatch { after_step: usize },
    /// The remainders returned to `(ρ_1, ρ_2)`.
    Fixed { passes: usize },
    /// A bound was hit.
    Unresolved { after_step: usize, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchRecord {
    pub rho1: Word,
    pub rho2: Word,
    pub extensions: Vec<Extension>,
    pub outcome: Outcome,
}

impl BranchRecord {
    pub fn is_legalized(&self) -> bool {
        matches!(self.outcome, Outcome::Legalized { .. })
    }

    pub fn death_step(&self) -> Option<usize> {
        match self.outcome {
            Outcome::Legalized { after_step, .. } | Outcome::Mismatch { after_step } => Some(after_step),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// Every branch died.
    NoneLegalized { trace: Vec<BranchRecord> },
    /// `ρ = ρ̄_1 ρ_2` is fixed by `g^period`, checked by direct application.
    Found { rho: Word, rho1: Word, rho2: Word, period: usize, trace: Vec<BranchRecord> },
    /// Bounds ran out before every branch was resolved.
    Inconclusive { frontier: Vec<BranchRecord>, trace: Vec<BranchRecord> },
}

impl Verdict {
    pub fn trace(&self) -> &[BranchRecord] {
        match self {
            Verdict::NoneLegalized { trace } | Verdict::Found { trace, .. } | Verdict::Inconclusive { trace, .. } => {
                trace
            }
        }
    }

    pub fn is_none_legalized(&self) -> bool {
        matches!(self, Verdict::NoneLegalized { .. })
    }

    pub fn trace_json(&self) -> String {
        serde_json::to_string_pretty(self.trace()).expect("trace serializes")
    }
}

/// Searches the rotationless power of `d` for iNPs.
pub fn search_inps(d: &Decomposition, bounds: Option<Bounds>) -> Result<Verdict> {
    if d.is_empty() {
        return Err(Error::CheckFailed("empty decomposition".into()));
    }
    let r = d.rotationless_power().exponent;
    let g = d.power(r);
    if !g.is_train_track() {
        return Err(Error::NotTrainTrack(format!("{d}")));
    }
    let bounds = bounds.unwrap_or_else(|| Bounds::default_for(&g));
    Ok(Engine::new(g.generator_maps(), g.rank(), bounds).run(r))
}

/// The same search over arbitrary graph maps `steps[0]` (applied first), …
pub fn search_map_steps(steps: &[GraphMap], bounds: Option<Bounds>) -> Result<Verdict> {
    let rank = steps.first().map(RoseMap::rank).ok_or_else(|| Error::CheckFailed("no steps".into()))?;
    if let Some(s) = steps.iter().find(|s| s.rank() != rank) {
        return Err(Error::RankError { expected: rank, found: s.rank() });
    }
    let composite = steps.iter().try_fold(GraphMap::identity(rank), |acc, s| GraphMap::compose(s, &acc))?;
    if !composite.is_train_track() {
        return Err(Error::NotTrainTrack(composite.to_string()));
    }
    let r = composite.rotationless_power().exponent;
    let powered: Vec<GraphMap> = (0..r).flat_map(|_| steps.iter().cloned()).collect();
    let bounds = bounds.unwrap_or_else(|| Bounds::default_for(&composite.power(r).expect("same rank")));
    Ok(Engine::new(powered, rank, bounds).run(r))
}

/// Whether every branch of the search on `d` itself (no power taken) ends
/// at a legal turn within one pass.
pub fn is_legalizing_prevention_sequence(d: &Decomposition, bounds: Option<Bounds>) -> (bool, Vec<BranchRecord>) {
    if d.is_empty() || !d.is_train_track() {
        return (false, Vec::new());
    }
    let bounds = bounds.unwrap_or_else(|| Bounds::default_for(d));
    let n = d.len();
    match Engine::new(d.generator_maps(), d.rank(), bounds).run(1) {
        Verdict::NoneLegalized { trace } => {
            let ok = !trace.is_empty()
                && trace.iter().all(|b| matches!(b.outcome, Outcome::Legalized { after_step, .. } if after_step < n));
            (ok, trace)
        }
        other => (false, other.trace().to_vec()),
    }
}

/// Evidence that a decomposition's composite has no periodic Nielsen paths:
/// a completed search in which every branch died.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PnpCertificate {
    base: Decomposition,
    exponent: usize,
    branches: usize,
    max_death_step: usize,
}

impl PnpCertificate {
    /// Runs [`search_inps`] and issues a certificate only on `NoneLegalized`.
    pub fn certify(d: &Decomposition, bounds: Option<Bounds>) -> Result<PnpCertificate> {
        match search_inps(d, bounds)? {
            Verdict::NoneLegalized { trace } => Ok(PnpCertificate {
                base: d.clone(),
                exponent: d.rotationless_power().exponent,
                branches: trace.len(),
                max_death_step: trace.iter().filter_map(BranchRecord::death_step).max().unwrap_or(0),
            }),
            Verdict::Found { rho, period, .. } => {
                Err(Error::CheckFailed(format!("Nielsen path {rho} of period {period}")))
            }
            Verdict::Inconclusive { frontier, .. } => {
                Err(Error::CheckFailed(format!("search inconclusive with {} open branches", frontier.len())))
            }
        }
    }

    pub fn base(&self) -> &Decomposition {
        &self.base
    }

    pub fn exponent(&self) -> usize {
        self.exponent
    }

    pub fn branches(&self) -> usize {
        self.branches
    }

    pub fn max_death_step(&self) -> usize {
        self.max_death_step
    }

    /// Whether `d` and the certified decomposition have a common power.
    pub fn covers(&self, d: &Decomposition) -> bool {
        let (a, b) = (self.base.steps(), d.steps());
        if self.base.rank() != d.rank() || a.is_empty() || b.is_empty() {
            return false;
        }
        let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
        long.len() % short.len() == 0 && long.chunks(short.len()).all(|c| c == short)
    }
}

impl fmt::Display for PnpCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PNP-free: {} branches, all dead by step {} (power {})",
            self.branches, self.max_death_step, self.exponent
        )
    }
}

struct State {
    rho1: Word,
    rho2: Word,
    img1: Word,
    img2: Word,
    step: usize,
    log: Vec<Extension>,
}

struct Engine {
    steps: Vec<GraphMap>,
    rank: usize,
    rotations: Vec<DirectionMap>,
    first: DirectionMap,
    bounds: Bounds,
}

impl Engine {
    fn new(steps: Vec<GraphMap>, rank: usize, bounds: Bounds) -> Self {
        let maps: Vec<DirectionMap> = steps.iter().map(RoseMap::direction_map).collect();
        let rotations = rotation_direction_maps(&maps, rank);
        let first = maps[0].clone();
        Engine { steps, rank, rotations, first, bounds }
    }

    fn image(&self, w: &Word, k: usize) -> Word {
        let n = self.steps.len();
        (0..k).fold(w.clone(), |acc, j| self.steps[j % n].apply_unchecked(&acc))
    }

    fn record(s: &State, outcome: Outcome) -> BranchRecord {
        BranchRecord { rho1: s.rho1.clone(), rho2: s.rho2.clone(), extensions: s.log.clone(), outcome }
    }

    /// `exponent` scales reported periods back to iterates of the input map.
    fn run(&self, exponent: usize) -> Verdict {
        let n = self.steps.len();
        let g = &self.rotations[0];
        let missing: BTreeSet<Direction> = self.first.missing().into_iter().collect();
        let mut frontier: VecDeque<State> = g
            .illegal_turns()
            .into_iter()
            .map(|t| {
                let (u, a) =
                    if missing.contains(&t.second()) { (t.second(), t.first()) } else { (t.first(), t.second()) };
                State {
                    rho1: Word::letter(u),
                    rho2: Word::letter(a),
                    img1: Word::letter(u),
                    img2: Word::letter(a),
                    step: 0,
                    log: Vec::new(),
                }
            })
            .collect();
        let mut seen: BTreeSet<(Word, Word, usize)> = BTreeSet::new();
        let mut trace = Vec::new();
        let mut open = Vec::new();
        let mut found: Option<(Word, Word, usize)> = None;

        let mut processed = 0usize;
        while let Some(mut s) = frontier.pop_front() {
            processed += 1;
            if processed > self.bounds.max_states {
                for s in std::iter::once(s).chain(frontier.drain(..)) {
                    open.push(Self::record(
                        &s,
                        Outcome::Unresolved { after_step: s.step, reason: "max_states".into() },
                    ));
                }
                break;
            }
            let c = s.img1.common_prefix_len(&s.img2);
            s.img1 = s.img1.suffix(c);
            s.img2 = s.img2.suffix(c);

            if s.img1.is_empty() || s.img2.is_empty() {
                let side = if s.img1.is_empty() { Side::U } else { Side::A };
                if s.rho1.len() + s.rho2.len() >= self.bounds.max_len {
                    open.push(Self::record(&s, Outcome::Unresolved { after_step: s.step, reason: "max_len".into() }));
                    continue;
                }
                let rho = if side == Side::U { &s.rho1 } else { &s.rho2 };
                let last = rho.last().expect("halves are nonempty");
                for e in Direction::all(self.rank) {
                    if e == last.bar() || g.is_illegal(Turn::new(last.bar(), e)) {
                        continue;
                    }
                    let ie = self.image(&Word::letter(e), s.step);
                    let mut log = s.log.clone();
                    log.push(Extension { side, edge: e, after_step: s.step, forced: false });
                    let (mut rho1, mut rho2) = (s.rho1.clone(), s.rho2.clone());
                    let (mut img1, mut img2) = (s.img1.clone(), s.img2.clone());
                    if side == Side::U {
                        rho1 = rho1.concat(&Word::letter(e));
                        img1 = img1.concat(&ie);
                    } else {
                        rho2 = rho2.concat(&Word::letter(e));
                        img2 = img2.concat(&ie);
                    }
                    if seen.insert((rho1.clone(), rho2.clone(), s.step)) {
                        frontier.push_back(State { rho1, rho2, img1, img2, step: s.step, log });
                    }
                }
                continue;
            }

            if s.step > 0 && s.step % n == 0 {
                let passes = s.step / n;
                if s.img1 == s.rho1 && s.img2 == s.rho2 {
                    let rho = s.rho1.inverse().concat(&s.rho2);
                    if self.image(&rho, s.step) == rho {
                        trace.push(Self::record(&s, Outcome::Fixed { passes }));
                        found.get_or_insert((s.rho1.clone(), s.rho2.clone(), passes));
                    } else {
                        open.push(Self::record(
                            &s,
                            Outcome::Unresolved { after_step: s.step, reason: "endpoints not fixed".into() },
                        ));
                    }
                    continue;
                }
                if passes >= self.bounds.max_passes {
                    open.push(Self::record(
                        &s,
                        Outcome::Unresolved { after_step: s.step, reason: "max_passes".into() },
                    ));
                    continue;
                }
                let consistent = |rho: &Word, rem: &Word| {
                    let m = rho.len().min(rem.len());
                    rho.prefix(m) == rem.prefix(m)
                };
                if !consistent(&s.rho1, &s.img1) || !consistent(&s.rho2, &s.img2) {
                    trace.push(Self::record(&s, Outcome::Mismatch { after_step: s.step }));
                    continue;
                }
                let longer = |rho: &Word, rem: &Word| if rem.len() > rho.len() { rem.clone() } else { rho.clone() };
                let (n1, n2) = (longer(&s.rho1, &s.img1), longer(&s.rho2, &s.img2));
                if n1 != s.rho1 || n2 != s.rho2 {
                    if n1.len() + n2.len() > self.bounds.max_len {
                        open.push(Self::record(
                            &s,
                            Outcome::Unresolved { after_step: s.step, reason: "max_len".into() },
                        ));
                        continue;
                    }
                    let mut log = s.log.clone();
                    for (side, old, new) in [(Side::U, &s.rho1, &n1), (Side::A, &s.rho2, &n2)] {
                        for &e in &new.letters()[old.len()..] {
                            log.push(Extension { side, edge: e, after_step: s.step, forced: true });
                        }
                    }
                    let (img1, img2) = (self.image(&n1, s.step), self.image(&n2, s.step));
                    if seen.insert((n1.clone(), n2.clone(), s.step)) {
                        frontier.push_front(State { rho1: n1, rho2: n2, img1, img2, step: s.step, log });
                    }
                    continue;
                }
            }

            let turn = Turn::new(s.img1.first().expect("nonempty"), s.img2.first().expect("nonempty"));
            let phase = s.step % n;
            if !self.rotations[phase].is_illegal(turn) {
                trace
                    .push(Self::record(&s, Outcome::Legalized { after_step: s.step, turn, next_generator: phase + 1 }));
                continue;
            }
            s.img1 = self.steps[phase].apply_unchecked(&s.img1);
            s.img2 = self.steps[phase].apply_unchecked(&s.img2);
            s.step += 1;
            frontier.push_back(s);
        }

        trace.extend(open.iter().cloned());
        if let Some((rho1, rho2, passes)) = found {
            let rho = rho1.inverse().concat(&rho2);
            Verdict::Found { rho, rho1, rho2, period: passes * exponent, trace }
        } else if !open.is_empty() {
            Verdict::Inconclusive { frontier: open, trace }
        } else {
            Verdict::NoneLegalized { trace }
        }
    }
}
