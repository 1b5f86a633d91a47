//! Extensions, switches, ideal decomposition diagrams and representative loops.
//!
//! Moves are generated backwards. A target structure `G_k` with red vertex
//! `x` and red edge `[x, ȳ]` ends in the generator `[x ↦ yx]`. Each purple
//! edge `[y, d_l]` at `y` determines at most two sources `G_{k−1}`:
//!
//! * the extension keeps the purple graph and has red edge `[x, d_l]`;
//! * the switch renames `y` to `x` in the purple graph and has red vertex `y`
//!   and red edge `[y, d_l]`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::{self, Write as _};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::graph::EdgeColor;
use crate::ltt::LttStructure;
use crate::map::{NielsenGenerator, RoseMap};
use crate::nielsen::{Bounds, PnpCertificate};
use crate::word::{Direction, Turn};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveKind {
    Extension,
    Switch,
}

/// `(g_k; G_{k−1}, G_k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratingTriple {
    pub generator: NielsenGenerator,
    pub source: LttStructure,
    pub target: LttStructure,
    pub kind: MoveKind,
    /// The purple edge `[d^a_k, d_{k,l}]` of the target.
    pub determining_edge: Turn,
}

fn target_data(target: &LttStructure) -> Result<(NielsenGenerator, Direction, Direction)> {
    let gen = target
        .generator()
        .ok_or_else(|| Error::InvalidGraph(format!("target has no unique red vertex and red edge: {target}")))?;
    Ok((gen, gen.x(), gen.y()))
}

fn determining_end(target: &LttStructure, y: Direction, edge: Turn) -> Result<Direction> {
    if !target.graph().has_edge(edge, EdgeColor::Purple) {
        return Err(Error::InvalidGraph(format!("{edge} is not a purple edge of the target")));
    }
    edge.other(y).ok_or_else(|| Error::InvalidGraph(format!("{edge} is not incident to d^a = {y}")))
}

fn admissible_source(s: LttStructure) -> Option<LttStructure> {
    (s.is_valid() && s.is_birecurrent()).then_some(s)
}

/// The extension determined by `edge`; `Ok(None)` when its source is not an
/// admissible ltt structure.
pub fn extension(target: &LttStructure, edge: Turn) -> Result<Option<GeneratingTriple>> {
    let (generator, x, y) = target_data(target)?;
    let dl = determining_end(target, y, edge)?;
    let source = LttStructure::new(target.rank(), target.purple_edges(), x, dl)?;
    Ok(admissible_source(source).map(|source| GeneratingTriple {
        generator,
        source,
        target: target.clone(),
        kind: MoveKind::Extension,
        determining_edge: edge,
    }))
}

/// The switch determined by `edge`; `Ok(None)` when its source is not an
/// admissible ltt structure.
pub fn switch(target: &LttStructure, edge: Turn) -> Result<Option<GeneratingTriple>> {
    let (generator, x, y) = target_data(target)?;
    let dl = determining_end(target, y, edge)?;
    let rename = |d: Direction| if d == y { x } else { d };
    let purple: Vec<Turn> = target.purple_edges().into_iter().map(|t| t.map(rename)).collect();
    let source = LttStructure::new(target.rank(), purple, y, dl)?;
    Ok(admissible_source(source).map(|source| GeneratingTriple {
        generator,
        source,
        target: target.clone(),
        kind: MoveKind::Switch,
        determining_edge: edge,
    }))
}

/// All admissible triples ending at `target`, purple edges at `d^a` in order,
/// extension before switch.
pub fn predecessors(target: &LttStructure) -> Result<Vec<GeneratingTriple>> {
    let (_, _, y) = target_data(target)?;
    let mut out = Vec::new();
    for edge in target.purple_edges().into_iter().filter(|t| t.contains(y)) {
        out.extend(extension(target, edge)?);
        out.extend(switch(target, edge)?);
    }
    Ok(out)
}

impl GeneratingTriple {
    /// gtII, gtIII and admissibility of the triple.
    pub fn verify(&self) -> Result<()> {
        let gen = self.generator;
        let fail = |m: String| Err(Error::CheckFailed(format!("{gen}: {m}")));
        if self.target.red_vertex() != Some(gen.x()) || self.target.doubled_direction() != Some(gen.y()) {
            return fail("target red data does not match the generator".into());
        }
        let dm = gen.direction_map(self.source.rank());
        let source_purple = self.source.purple_graph();
        let image = source_purple.map_labels(|d| dm.apply(d));
        if image != self.target.purple_graph() {
            return fail("D^T g is not an isomorphism of purple graphs".into());
        }
        let Some(red) = self.source.red_edge() else {
            return fail("source has no unique red edge".into());
        };
        if !self.target.graph().has_edge(dm.apply_turn(red), EdgeColor::Purple) {
            return fail(format!("red edge {red} does not map to a purple edge"));
        }
        let u_prev = self.source.red_vertex();
        let expected = match self.kind {
            MoveKind::Extension => gen.x(),
            MoveKind::Switch => gen.y(),
        };
        if u_prev != Some(expected) {
            return fail(format!("{:?} needs source red vertex {expected}", self.kind));
        }
        for s in [&self.source, &self.target] {
            if !s.is_valid() || !s.is_birecurrent() {
                return fail(format!("structure {s} is not admissible"));
            }
        }
        Ok(())
    }

    /// The same move seen in a larger rank.
    pub fn extend_rank(&self, rank: usize) -> Result<GeneratingTriple> {
        Ok(GeneratingTriple {
            source: self.source.extend_rank(rank)?,
            target: self.target.extend_rank(rank)?,
            ..self.clone()
        })
    }
}

/// Consecutive triples chain, each is admissible, and the generators form an
/// admissible sequence.
pub fn admissible_composition_check(triples: &[GeneratingTriple]) -> bool {
    triples.iter().all(|t| t.verify().is_ok())
        && triples.windows(2).all(|w| {
            w[0].target == w[1].source && crate::decomposition::admissible_pair(&w[0].generator, &w[1].generator)
        })
}

/// Extends every generator by the identity and every structure by purple
/// vertices and black edges for the new pairs.
pub fn extend_composition(triples: &[GeneratingTriple], rank: usize) -> Result<Vec<GeneratingTriple>> {
    triples.iter().map(|t| t.extend_rank(rank)).collect()
}

/// Admissibility of an extended composition: on the original `base_rank`
/// pairs it is an admissible composition, and the added pairs carry only
/// their black edge.
pub fn extended_composition_check(triples: &[GeneratingTriple], base_rank: usize) -> bool {
    let inert = |s: &LttStructure| {
        let g = s.graph();
        (base_rank..s.rank()).all(|i| {
            let e = Direction::positive(i);
            [e, e.bar()].iter().all(|&d| {
                g.vertex_color(d) == Some(crate::graph::VertexColor::Purple)
                    && g.edges().all(|x| !x.ends.contains(d) || x.color == EdgeColor::Black)
            })
        })
    };
    let restricted: Vec<GeneratingTriple> = triples
        .iter()
        .map(|t| GeneratingTriple {
            source: t.source.restrict_rank(base_rank),
            target: t.target.restrict_rank(base_rank),
            ..t.clone()
        })
        .collect();
    triples.iter().all(|t| inert(&t.source) && inert(&t.target))
        && triples.iter().all(|t| t.generator.check_rank(base_rank).is_ok())
        && admissible_composition_check(&restricted)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagramEdge {
    pub source: usize,
    pub target: usize,
    pub generator: NielsenGenerator,
    pub kind: MoveKind,
    pub determining_edge: Turn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiagramOptions {
    /// Stop exploring after this many structures.
    pub budget: usize,
    /// Explore purple edges in reverse order (for exhaustiveness checks).
    pub reverse: bool,
}

impl Default for DiagramOptions {
    fn default() -> Self {
        DiagramOptions { budget: 100_000, reverse: false }
    }
}

/// The part of `𝒟(𝒢)` that can reach the seed, with its maximal strongly
/// connected pieces.
#[derive(Clone, Debug, Serialize)]
pub struct IdDiagram {
    /// Explored structures; the seed is node 0 when admissible.
    pub nodes: Vec<LttStructure>,
    pub edges: Vec<DiagramEdge>,
    /// Maximal strongly connected subgraphs containing a loop, as sorted node lists.
    pub components: Vec<Vec<usize>>,
    /// Index into `components` of the one holding the seed.
    pub seed_component: Option<usize>,
    pub truncated: bool,
}

/// Builds the diagram backwards from `seed` by repeated predecessor generation.
///
/// Every structure in the seed's strongly connected component can reach the
/// seed, so the backward closure contains the whole component.
pub fn build_id_diagram(seed: &LttStructure, opts: DiagramOptions) -> Result<IdDiagram> {
    let mut diagram = IdDiagram {
        nodes: Vec::new(),
        edges: Vec::new(),
        components: Vec::new(),
        seed_component: None,
        truncated: false,
    };
    if !seed.is_valid() || !seed.is_birecurrent() {
        return Ok(diagram);
    }
    let mut index: BTreeMap<LttStructure, usize> = BTreeMap::new();
    index.insert(seed.clone(), 0);
    diagram.nodes.push(seed.clone());
    let mut queue = VecDeque::from([0usize]);
    while let Some(t) = queue.pop_front() {
        let mut preds = predecessors(&diagram.nodes[t])?;
        if opts.reverse {
            preds.reverse();
        }
        for p in preds {
            let s = match index.get(&p.source) {
                Some(&s) => s,
                None => {
                    if diagram.nodes.len() >= opts.budget {
                        diagram.truncated = true;
                        continue;
                    }
                    let s = diagram.nodes.len();
                    index.insert(p.source.clone(), s);
                    diagram.nodes.push(p.source.clone());
                    queue.push_back(s);
                    s
                }
            };
            diagram.edges.push(DiagramEdge {
                source: s,
                target: t,
                generator: p.generator,
                kind: p.kind,
                determining_edge: p.determining_edge,
            });
        }
    }
    diagram.edges.sort_by_key(|e| (e.source, e.target, e.generator, e.kind, e.determining_edge));
    diagram.edges.dedup();

    let mut g = DiGraph::<usize, ()>::new();
    let ix: Vec<_> = (0..diagram.nodes.len()).map(|i| g.add_node(i)).collect();
    for e in &diagram.edges {
        g.add_edge(ix[e.source], ix[e.target], ());
    }
    let mut comps: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|n| g[n]).collect();
            v.sort_unstable();
            v
        })
        .filter(|c| c.len() > 1 || diagram.edges.iter().any(|e| e.source == c[0] && e.target == c[0]))
        .collect();
    comps.sort();
    diagram.seed_component = comps.iter().position(|c| c.contains(&0));
    diagram.components = comps;
    Ok(diagram)
}

impl IdDiagram {
    pub fn component_edges(&self, c: usize) -> Vec<&DiagramEdge> {
        let nodes: BTreeSet<usize> = self.components[c].iter().copied().collect();
        self.edges.iter().filter(|e| nodes.contains(&e.source) && nodes.contains(&e.target)).collect()
    }

    pub fn seed_nodes(&self) -> &[usize] {
        self.seed_component.map(|c| self.components[c].as_slice()).unwrap_or(&[])
    }

    /// `(nodes, edges)` of every retained component.
    pub fn census(&self) -> Vec<(usize, usize)> {
        (0..self.components.len()).map(|c| (self.components[c].len(), self.component_edges(c).len())).collect()
    }

    /// Within a component: every node has an edge in and an edge out, and
    /// every node reaches every other.
    pub fn is_strongly_connected(&self, c: usize) -> bool {
        let nodes = &self.components[c];
        let edges = self.component_edges(c);
        let reach = |from: usize, forward: bool| {
            let mut seen = BTreeSet::from([from]);
            let mut stack = vec![from];
            while let Some(u) = stack.pop() {
                for e in &edges {
                    let (a, b) = if forward { (e.source, e.target) } else { (e.target, e.source) };
                    if a == u && seen.insert(b) {
                        stack.push(b);
                    }
                }
            }
            seen.len()
        };
        !nodes.is_empty() && reach(nodes[0], true) == nodes.len() && reach(nodes[0], false) == nodes.len()
    }

    /// Shortest path of triples from `from` to `to` (breadth first, edges in order).
    pub fn path(&self, from: usize, to: usize) -> Option<Vec<GeneratingTriple>> {
        let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
        let mut seen = BTreeSet::from([from]);
        let mut queue = VecDeque::from([from]);
        let mut reached = from == to;
        while let Some(u) = queue.pop_front() {
            if reached {
                break;
            }
            for (i, e) in self.edges.iter().enumerate() {
                if e.source == u && seen.insert(e.target) {
                    prev.insert(e.target, i);
                    if e.target == to {
                        reached = true;
                    }
                    queue.push_back(e.target);
                }
            }
        }
        if !reached {
            return None;
        }
        let mut path = Vec::new();
        let mut v = to;
        while v != from {
            let e = &self.edges[prev[&v]];
            path.push(self.triple(e));
            v = e.source;
        }
        path.reverse();
        Some(path)
    }

    pub fn triple(&self, e: &DiagramEdge) -> GeneratingTriple {
        GeneratingTriple {
            generator: e.generator,
            source: self.nodes[e.source].clone(),
            target: self.nodes[e.target].clone(),
            kind: e.kind,
            determining_edge: e.determining_edge,
        }
    }

    /// Diagram as DOT; nodes show their red vertex and red edge.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph ID {\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let label = match (n.red_vertex(), n.red_edge()) {
                (Some(v), Some(e)) => format!("{i}: {v} {e}"),
                _ => format!("{i}"),
            };
            let _ = writeln!(s, "  n{i} [label=\"{label}\"];");
        }
        for e in &self.edges {
            let kind = match e.kind {
                MoveKind::Extension => "ext",
                MoveKind::Switch => "sw",
            };
            let _ = writeln!(s, "  n{} -> n{} [label=\"{} {kind}\"];", e.source, e.target, e.generator);
        }
        s.push_str("}\n");
        s
    }
}

/// The cyclic sequence of structures `G_k = G(f_k)` of a decomposition, as
/// triples `(g_k; G_{k−1}, G_k)`, where `f_k` is the rotation ending in `g_k`.
pub fn realizing_loop(d: &Decomposition) -> Result<Vec<GeneratingTriple>> {
    let n = d.len();
    if n == 0 {
        return Err(Error::CheckFailed("empty decomposition".into()));
    }
    let r = d.rotationless_power().exponent;
    let structures: Vec<LttStructure> = (0..n).map(|k| LttStructure::of_map(&d.rotated(k).power(r))).collect();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let source = structures[k].clone();
        let target = structures[(k + 1) % n].clone();
        let generator = d.steps()[k];
        let kind = if source.red_vertex() == Some(generator.x()) { MoveKind::Extension } else { MoveKind::Switch };
        let dl =
            source.red_edge_purple_end().ok_or_else(|| Error::CheckFailed(format!("G_{k} has no unique red edge")))?;
        let triple =
            GeneratingTriple { generator, source, target, kind, determining_edge: Turn::new(generator.y(), dl) };
        triple.verify()?;
        out.push(triple);
    }
    Ok(out)
}

/// A loop at the seed passing through `node`: the base loop, then a path out
/// to `node` and back.
pub fn loop_through(diagram: &IdDiagram, base: &[GeneratingTriple], node: usize) -> Result<Vec<GeneratingTriple>> {
    let out = diagram.path(0, node).ok_or_else(|| Error::CheckFailed(format!("node {node} unreachable")))?;
    let back = diagram.path(node, 0).ok_or_else(|| Error::CheckFailed(format!("node {node} cannot return")))?;
    let mut l = base.to_vec();
    l.extend(out);
    l.extend(back);
    Ok(l)
}

/// What [`check_representative_loop`] established.
#[derive(Clone, Debug, Serialize)]
pub struct LoopCertificate {
    pub decomposition: Decomposition,
    pub exponent: usize,
    pub pnp: PnpCertificate,
    /// `G(g) = G_0`.
    pub structure_matches: bool,
}

fn loop_decomposition(triples: &[GeneratingTriple]) -> Result<Decomposition> {
    let first = triples.first().ok_or_else(|| Error::CheckFailed("empty loop".into()))?;
    Decomposition::new(first.source.rank(), triples.iter().map(|t| t.generator).collect())
}

/// Checks that a loop of triples yields a PNP-free train track
/// representative with `G(g) = G_0`.
///
/// A: purple edges of `G_0` are turns taken by iterates, with periodic ends.
/// B: the transition matrix is irreducible.
/// C: the iNP search kills every branch.
pub fn check_representative_loop(triples: &[GeneratingTriple], bounds: Option<Bounds>) -> Result<LoopCertificate> {
    let d = loop_decomposition(triples)?;
    let g0 = &triples[0].source;
    if triples.last().map(|t| &t.target) != Some(g0) {
        return Err(Error::CheckFailed("triples do not close up".into()));
    }
    if !admissible_composition_check(triples) || !d.is_cyclically_admissible() {
        return Err(Error::CheckFailed("not an admissible composition".into()));
    }
    let exponent = d.rotationless_power().exponent;
    let g = d.power(exponent);
    if !g.is_train_track() {
        return Err(Error::NotTrainTrack(d.to_string()));
    }
    let closure = g.turn_closure().turns;
    let periodic = g.direction_map().periodic();
    for t in g0.purple_edges() {
        if !closure.contains(&t) || !periodic.contains(&t.first()) || !periodic.contains(&t.second()) {
            return Err(Error::CheckFailed(format!("condition A fails at {t}")));
        }
    }
    if !g.is_irreducible() {
        return Err(Error::CheckFailed("condition B fails: transition matrix is reducible".into()));
    }
    let pnp = PnpCertificate::certify(&d, bounds)?;
    let structure_matches = LttStructure::of_map(&g) == *g0;
    if !structure_matches {
        return Err(Error::CheckFailed(format!("G(g) = {} differs from G_0 = {g0}", LttStructure::of_map(&g))));
    }
    Ok(LoopCertificate { decomposition: d, exponent, pnp, structure_matches })
}

/// Rotating a certified loop to begin at position `k` gives a representative
/// whose structure is the loop's `k`-th structure.
pub fn achieved_at(triples: &[GeneratingTriple], k: usize) -> Result<Decomposition> {
    let d = loop_decomposition(triples)?;
    let rotated = d.rotated(k);
    let g = rotated.power(rotated.rotationless_power().exponent);
    let expected = &triples[k % triples.len()].source;
    if LttStructure::of_map(&g) != *expected {
        return Err(Error::CheckFailed(format!("rotation {k} realizes {} not {expected}", LttStructure::of_map(&g))));
    }
    Ok(rotated)
}

impl fmt::Display for GeneratingTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:?} via {}: ({}) -> ({})",
            self.generator, self.kind, self.determining_edge, self.source, self.target
        )
    }
}
