//! Turn closures, Whitehead graphs and index lists.

use std::collections::{BTreeMap, BTreeSet};

use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::graph::{ColoredPairLabeledGraph, EdgeColor, VertexColor};
use crate::map::RoseMap;
use crate::nielsen::PnpCertificate;
use crate::scalar::IndexScalar;
use crate::word::{Direction, Turn};

/// All turns taken by the iterates `g^k(e)`, `k ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TurnClosure {
    pub turns: BTreeSet<Turn>,
    /// Round at which each turn first appeared (single-edge images are round 1).
    pub generations: BTreeMap<Turn, usize>,
}

/// Least set containing the limited turns and closed under `Dg`.
///
/// Degenerate turns are kept; they witness cancellation.
pub fn turn_closure<M: RoseMap + ?Sized>(g: &M) -> TurnClosure {
    let dm = g.direction_map();
    let mut generations: BTreeMap<Turn, usize> = g.limited_turns().into_iter().map(|t| (t, 1)).collect();
    let mut frontier: Vec<Turn> = generations.keys().copied().collect();
    let mut round = 1;
    while !frontier.is_empty() {
        round += 1;
        let mut next = Vec::new();
        for t in frontier {
            let image = dm.apply_turn(t);
            if let std::collections::btree_map::Entry::Vacant(e) = generations.entry(image) {
                e.insert(round);
                next.push(image);
            }
        }
        frontier = next;
    }
    TurnClosure { turns: generations.keys().copied().collect(), generations }
}

/// `𝒞𝒲(g)`: every direction is a vertex, nonperiodic ones red; edges are the
/// nondegenerate closure turns, red when touching a red vertex.
pub fn local_whitehead_graph<M: RoseMap + ?Sized>(g: &M) -> ColoredPairLabeledGraph {
    let periodic = g.direction_map().periodic();
    let mut out = ColoredPairLabeledGraph::new(g.rank());
    for d in Direction::all(g.rank()) {
        let color = if periodic.contains(&d) { VertexColor::Purple } else { VertexColor::Red };
        out.add_vertex(d, color).expect("in rank");
    }
    for t in g.turn_closure().turns {
        if t.is_degenerate() {
            continue;
        }
        let purple = periodic.contains(&t.first()) && periodic.contains(&t.second());
        let color = if purple { EdgeColor::Purple } else { EdgeColor::Red };
        out.add_edge(t.first(), t.second(), color).expect("vertices present");
    }
    out
}

/// `𝒮𝒲(g)`: the local Whitehead graph restricted to periodic directions.
pub fn stable_whitehead_graph<M: RoseMap + ?Sized>(g: &M) -> ColoredPairLabeledGraph {
    let periodic = g.direction_map().periodic();
    local_whitehead_graph(g).induced(&periodic)
}

/// `𝒲_L(g)`: turns taken by single-edge images.
pub fn limited_whitehead<M: RoseMap + ?Sized>(g: &M) -> BTreeSet<Turn> {
    g.limited_turns()
}

/// `𝒲_L(g_{n,1})` assembled as `Dg_{n,s+1}(𝒲_L(g_{s,1})) ∪ 𝒲_L(g_{n,s+1})`.
pub fn limited_whitehead_split(d: &Decomposition, s: usize) -> BTreeSet<Turn> {
    let head = d.segment(0..s);
    let tail = d.segment(s..d.len());
    let dm = tail.direction_map();
    let mut out: BTreeSet<Turn> = head.limited_turns().iter().map(|&t| dm.apply_turn(t)).collect();
    out.extend(tail.limited_turns());
    out
}

/// `𝒯𝒲(φ) ≅ 𝒮𝒲(g^R)` for the rotationless power of a certified
/// PNP-free train track decomposition.
pub fn ideal_whitehead_graph(d: &Decomposition, cert: &PnpCertificate) -> Result<ColoredPairLabeledGraph> {
    if !cert.covers(d) {
        return Err(Error::MissingCertificate(format!("certificate was issued for {}", cert.base())));
    }
    let exponent = d.rotationless_power().exponent;
    let g = d.power(exponent);
    if !g.is_train_track() {
        return Err(Error::NotTrainTrack(format!("{d}")));
    }
    Ok(stable_whitehead_graph(&g))
}

/// `{1 − k/2}` over the components, `k` the vertex count, in decreasing order.
pub fn index_list<T: IndexScalar>(iw: &ColoredPairLabeledGraph) -> Vec<T> {
    let mut sizes: Vec<usize> = iw.connected_components().iter().map(BTreeSet::len).collect();
    sizes.sort_unstable();
    sizes
        .into_iter()
        .map(|k| {
            let two = T::from_i64(2).expect("small integer");
            T::from_i64(2 - k as i64).expect("small integer") / two
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{GraphMap, NielsenGenerator};
    use crate::Index;

    fn d(s: &str) -> Direction {
        Direction::parse(s).unwrap()
    }

    fn t(a: &str, b: &str) -> Turn {
        Turn::new(d(a), d(b))
    }

    fn g2() -> GraphMap {
        NielsenGenerator::parse("b->a-b").unwrap().to_map(3).unwrap()
    }

    #[test]
    fn identity_takes_no_turns() {
        assert!(turn_closure(&GraphMap::identity(3)).turns.is_empty());
    }

    #[test]
    fn closure_of_one_generator() {
        let c = turn_closure(&g2());
        assert_eq!(c.turns, [t("a", "b"), t("a", "a-")].into_iter().collect());
        assert_eq!(c.generations[&t("a", "b")], 1);
        assert_eq!(c.generations[&t("a", "a-")], 2);
        // brute force: turns of g^k(e) for k ≤ 4
        let mut brute = BTreeSet::new();
        let mut m = g2();
        for _ in 0..4 {
            brute.extend(m.limited_turns());
            m = GraphMap::compose(&g2(), &m).unwrap();
        }
        assert_eq!(brute, c.turns);
    }

    #[test]
    fn limited_graph_of_one_generator() {
        assert_eq!(limited_whitehead(&g2()), [t("a", "b")].into_iter().collect());
    }

    #[test]
    fn stable_graph_drops_nonperiodic_direction() {
        let sw = stable_whitehead_graph(&g2());
        assert!(!sw.has_vertex(d("b")));
        assert_eq!(sw.vertex_count(), 5);
    }

    #[test]
    fn index_lists() {
        let mut g = ColoredPairLabeledGraph::new(3);
        for l in ["a", "a-", "b", "b-", "c"] {
            g.add_vertex(d(l), VertexColor::Purple).unwrap();
        }
        g.add_edge(d("a"), d("a-"), EdgeColor::Purple).unwrap();
        g.add_edge(d("b"), d("b-"), EdgeColor::Purple).unwrap();
        g.add_edge(d("b-"), d("c"), EdgeColor::Purple).unwrap();
        assert_eq!(index_list::<Index>(&g), vec![Index::new(0, 1), Index::new(-1, 2)]);
        assert_eq!(index_list::<f64>(&g), vec![0.0, -0.5]);
        g.add_edge(d("a-"), d("b"), EdgeColor::Purple).unwrap();
        assert_eq!(index_list::<Index>(&g), vec![Index::new(-3, 2)]);
    }
}
