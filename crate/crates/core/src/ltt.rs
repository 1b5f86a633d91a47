//! Lamination train track structures.
//!
//! An ltt structure is a colored graph on all `2r` direction labels: one
//! black edge per edge pair `{x, x̄}`, purple edges among the `2r − 1`
//! purple vertices, and a single red edge `[d^u, d̄^a]` at the red vertex
//! `d^u`. Smooth paths alternate between black and colored edges.

use std::collections::BTreeSet;
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::graph::{ColoredPairLabeledGraph, EdgeColor, VertexColor};
use crate::map::{NielsenGenerator, RoseMap};
use crate::nielsen::PnpCertificate;
use crate::permutation::PairPermutation;
use crate::whitehead::local_whitehead_graph;
use crate::word::{Direction, Turn};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LttStructure {
    graph: ColoredPairLabeledGraph,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Axiom {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub detail: String,
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "axiom {:?}: {}", self.axiom, self.detail)
    }
}

impl LttStructure {
    /// The structure with the given purple edges, red vertex `red` and red
    /// edge `[red, purple_end]`.
    pub fn new(
        rank: usize,
        purple: impl IntoIterator<Item = Turn>,
        red: Direction,
        purple_end: Direction,
    ) -> Result<Self> {
        let mut g = ColoredPairLabeledGraph::new(rank);
        for d in Direction::all(rank) {
            let color = if d == red { VertexColor::Red } else { VertexColor::Purple };
            g.add_vertex(d, color)?;
        }
        for i in 0..rank {
            let e = Direction::positive(i);
            g.add_edge(e, e.bar(), EdgeColor::Black)?;
        }
        for t in purple {
            g.add_edge(t.first(), t.second(), EdgeColor::Purple)?;
        }
        g.add_edge(red, purple_end, EdgeColor::Red)?;
        Ok(LttStructure { graph: g })
    }

    /// Wraps an arbitrary graph; use [`LttStructure::validate`] to check it.
    pub fn from_graph(graph: ColoredPairLabeledGraph) -> Self {
        LttStructure { graph }
    }

    /// `G(g)`: the colored local Whitehead graph plus black edges.
    ///
    /// PNP-freeness is not checked here; see [`build_ltt`].
    pub fn of_map<M: RoseMap + ?Sized>(g: &M) -> Self {
        let mut graph = local_whitehead_graph(g);
        for i in 0..g.rank() {
            let e = Direction::positive(i);
            graph.add_edge(e, e.bar(), EdgeColor::Black).expect("all labels are vertices");
        }
        LttStructure { graph }
    }

    pub fn graph(&self) -> &ColoredPairLabeledGraph {
        &self.graph
    }

    pub fn rank(&self) -> usize {
        self.graph.rank()
    }

    /// `d^u`, when there is exactly one red vertex.
    pub fn red_vertex(&self) -> Option<Direction> {
        let reds: Vec<Direction> =
            self.graph.vertices().filter(|(_, c)| *c == VertexColor::Red).map(|(d, _)| d).collect();
        match reds.as_slice() {
            [d] => Some(*d),
            _ => None,
        }
    }

    /// `[d^u, d̄^a]`, when there is exactly one red edge.
    pub fn red_edge(&self) -> Option<Turn> {
        let reds: Vec<Turn> = self.graph.edges_of(EdgeColor::Red).collect();
        match reds.as_slice() {
            [t] => Some(*t),
            _ => None,
        }
    }

    /// `d̄^a`, the purple end of the red edge.
    pub fn red_edge_purple_end(&self) -> Option<Direction> {
        self.red_edge()?.other(self.red_vertex()?)
    }

    /// `d^a`.
    pub fn doubled_direction(&self) -> Option<Direction> {
        self.red_edge_purple_end().map(Direction::bar)
    }

    /// The generator `[d^u ↦ d^a d^u]` a structure with this red data ends in.
    pub fn generator(&self) -> Option<NielsenGenerator> {
        NielsenGenerator::new(self.red_vertex()?, self.doubled_direction()?).ok()
    }

    pub fn purple_edges(&self) -> BTreeSet<Turn> {
        self.graph.edges_of(EdgeColor::Purple).collect()
    }

    pub fn purple_vertices(&self) -> BTreeSet<Direction> {
        self.graph.vertices().filter(|(_, c)| *c == VertexColor::Purple).map(|(d, _)| d).collect()
    }

    /// `C(G)`: all vertices, colored edges only.
    pub fn colored_graph(&self) -> ColoredPairLabeledGraph {
        self.graph.filter_edges(EdgeColor::is_colored)
    }

    /// `𝒫(G)`: purple vertices and purple edges.
    pub fn purple_graph(&self) -> ColoredPairLabeledGraph {
        self.graph.filter_edges(|c| c == EdgeColor::Purple).induced(&self.purple_vertices())
    }

    /// Every axiom I–VI that fails, in axiom order.
    pub fn validate(&self) -> Vec<AxiomViolation> {
        let g = &self.graph;
        let r = g.rank();
        let mut out = Vec::new();
        let mut push = |axiom, detail: String| out.push(AxiomViolation { axiom, detail });

        for (d, _) in g.vertices() {
            if g.degree(d) < 2 {
                push(Axiom::I, format!("vertex {d} has valence {}", g.degree(d)));
            }
        }
        for e in g.edges() {
            if e.ends.is_degenerate() {
                push(Axiom::II, format!("loop at {}", e.ends.first()));
            }
        }
        let missing: Vec<String> = Direction::all(r).filter(|&d| !g.has_vertex(d)).map(|d| d.to_string()).collect();
        if !missing.is_empty() {
            push(Axiom::III, format!("labels without a vertex: {}", missing.join(", ")));
        }
        for e in g.edges() {
            let (a, b) = (e.ends.first(), e.ends.second());
            let red_end = [a, b].iter().any(|&v| g.vertex_color(v) == Some(VertexColor::Red));
            match e.color {
                EdgeColor::Black if b != a.bar() => push(Axiom::IV, format!("black edge {} joins two pairs", e.ends)),
                EdgeColor::Red if !red_end => push(Axiom::IV, format!("red edge {} has no red end", e.ends)),
                EdgeColor::Purple if red_end => push(Axiom::IV, format!("purple edge {} has a red end", e.ends)),
                _ => {}
            }
        }
        for i in 0..r {
            let e = Direction::positive(i);
            if !g.has_edge(Turn::new(e, e.bar()), EdgeColor::Black) {
                push(Axiom::IV, format!("no black edge for the pair of {e}"));
            }
        }
        let colored: Vec<Turn> = g.edges().filter(|e| e.color.is_colored()).map(|e| e.ends).collect();
        for w in colored.windows(2) {
            if w[0] == w[1] {
                push(Axiom::V, format!("two colored edges join {}", w[0]));
            }
        }
        let purple = self.purple_vertices().len();
        let red_vertices = g.vertex_count() - purple;
        let red_edges = g.edges_of(EdgeColor::Red).count();
        if purple + 1 != 2 * r || red_vertices != 1 || red_edges != 1 {
            push(Axiom::VI, format!("{purple} purple vertices, {red_vertices} red vertices, {red_edges} red edges"));
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Whether a smooth line crosses every edge infinitely often in both
    /// directions of time.
    ///
    /// States are the `2r` labels, read as "arrived along the black edge".
    /// A colored edge `[v, w]` followed by the black edge at `w` is the arc
    /// `v → w̄`. The structure is birecurrent when one strongly connected
    /// component with a cycle uses, for every colored edge, one of its two
    /// arcs, and meets every edge pair (so every black edge is crossed).
    pub fn is_birecurrent(&self) -> bool {
        let r = self.rank();
        let colored: Vec<Turn> = self.colored_graph().edges().map(|e| e.ends).collect();
        let mut h = DiGraph::<Direction, ()>::new();
        let nodes: Vec<_> = Direction::all(r).map(|d| h.add_node(d)).collect();
        for t in &colored {
            let (v, w) = (t.first(), t.second());
            h.add_edge(nodes[v.code()], nodes[w.bar().code()], ());
            h.add_edge(nodes[w.code()], nodes[v.bar().code()], ());
        }
        tarjan_scc(&h).into_iter().any(|scc| {
            let set: BTreeSet<Direction> = scc.iter().map(|&ix| h[ix]).collect();
            let has_cycle = set.len() > 1
                || colored.iter().any(|t| {
                    let v = *set.first().expect("nonempty");
                    t.first() == v && t.second() == v.bar()
                });
            let in_arc = |a: Direction, b: Direction| set.contains(&a) && set.contains(&b);
            has_cycle
                && (0..r).all(|i| set.contains(&Direction::positive(i)) || set.contains(&Direction::positive(i).bar()))
                && colored.iter().all(|t| {
                    let (v, w) = (t.first(), t.second());
                    in_arc(v, w.bar()) || in_arc(w, v.bar())
                })
        })
    }

    pub fn relabel(&self, p: &PairPermutation) -> Result<Self> {
        Ok(LttStructure { graph: self.graph.relabel(p)? })
    }

    /// Adds purple vertices and black edges for the new edge pairs.
    pub fn extend_rank(&self, rank: usize) -> Result<Self> {
        let mut g = self.graph.with_rank(rank)?;
        for i in self.rank()..rank {
            let e = Direction::positive(i);
            g.add_vertex(e, VertexColor::Purple)?;
            g.add_vertex(e.bar(), VertexColor::Purple)?;
            g.add_edge(e, e.bar(), EdgeColor::Black)?;
        }
        Ok(LttStructure { graph: g })
    }

    /// The structure seen only on the first `rank` edge pairs.
    pub fn restrict_rank(&self, rank: usize) -> Self {
        let keep: BTreeSet<Direction> = Direction::all(rank).collect();
        let mut g = ColoredPairLabeledGraph::new(rank);
        for (d, c) in self.graph.induced(&keep).vertices() {
            g.add_vertex(d, c).expect("in rank");
        }
        for e in self.graph.induced(&keep).edges() {
            g.add_edge(e.ends.first(), e.ends.second(), e.color).expect("vertices kept");
        }
        LttStructure { graph: g }
    }

    pub fn to_dot(&self) -> String {
        self.graph.to_dot_named("ltt")
    }
}

/// `G(g)` for a certified decomposition, taken at its rotationless power.
pub fn build_ltt(d: &Decomposition, cert: &PnpCertificate) -> Result<LttStructure> {
    if !cert.covers(d) {
        return Err(Error::MissingCertificate(format!("certificate was issued for {}", cert.base())));
    }
    let g = d.power(d.rotationless_power().exponent);
    if !g.is_train_track() {
        return Err(Error::NotTrainTrack(format!("{d}")));
    }
    let s = LttStructure::of_map(&g);
    let violations = s.validate();
    if !violations.is_empty() {
        let v: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(Error::CheckFailed(format!("G(g) is not an ltt structure: {}", v.join("; "))));
    }
    Ok(s)
}

impl fmt::Debug for LttStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LttStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.red_vertex(), self.red_edge()) {
            (Some(v), Some(e)) => write!(f, "red {v} {e}")?,
            _ => write!(f, "red ?")?,
        }
        let purple: Vec<String> = self.purple_edges().iter().map(ToString::to_string).collect();
        write!(f, " | {}", purple.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Direction {
        Direction::parse(s).unwrap()
    }

    fn t(s: &str) -> Turn {
        Turn::parse(s).unwrap()
    }

    /// The structure of the rank-3 example: purple line a - c- - b- - a- - c,
    /// red vertex b, red edge [b, c].
    fn line() -> LttStructure {
        let purple = ["{a, c-}", "{b-, c-}", "{a-, b-}", "{a-, c}"].map(t);
        LttStructure::new(3, purple, d("b"), d("c")).unwrap()
    }

    #[test]
    fn line_structure_is_valid_and_birecurrent() {
        let s = line();
        assert_eq!(s.validate(), vec![]);
        assert!(s.is_birecurrent());
        assert_eq!(s.red_vertex(), Some(d("b")));
        assert_eq!(s.doubled_direction(), Some(d("c-")));
        assert_eq!(s.generator().unwrap().to_string(), "[b -> c-b]");
        assert_eq!(s.purple_graph().vertex_count(), 5);
    }

    #[test]
    fn two_red_edges_violate_six() {
        let mut g = line().graph().clone();
        g.add_edge(d("b"), d("a"), EdgeColor::Red).unwrap();
        let axioms: Vec<Axiom> = LttStructure::from_graph(g).validate().iter().map(|v| v.axiom).collect();
        assert_eq!(axioms, vec![Axiom::VI]);
    }

    #[test]
    fn isolated_purple_vertex_violates_one() {
        let purple = ["{a, c-}", "{b-, c-}", "{a-, b-}"].map(t);
        let s = LttStructure::new(3, purple, d("b"), d("c-")).unwrap();
        let axioms: Vec<Axiom> = s.validate().iter().map(|v| v.axiom).collect();
        assert_eq!(axioms, vec![Axiom::I]);
    }

    #[test]
    fn far_away_edge_is_not_birecurrent() {
        // colored graph: a triangle on a, a-, b plus a disjoint edge c - c-
        let purple = ["{a, a-}", "{a-, b}", "{a, b}", "{c, c-}"].map(t);
        let s = LttStructure::new(3, purple, d("b-"), d("b")).unwrap();
        assert!(!s.is_birecurrent());
    }

    #[test]
    fn relabel_and_extend() {
        let p = PairPermutation::transposition(3, 1, 2);
        let s = line().relabel(&p).unwrap();
        assert!(s.is_valid() && s.is_birecurrent());
        assert_eq!(s.relabel(&p).unwrap(), line());
        let e = line().extend_rank(4).unwrap();
        assert_eq!(e.restrict_rank(3), line());
        assert_eq!(e.graph().vertex_count(), 8);
    }

    #[test]
    fn json_round_trip() {
        let s = line();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<LttStructure>(&json).unwrap(), s);
    }
}
