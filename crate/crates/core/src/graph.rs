//! Colored graphs whose vertices are labeled by directions.
//!
//! Vertex labels come from the rank-`r` edge pair labeling set, i.e. the
//! `2r` directions, paired as `{x, x̄}`. The same type carries Whitehead
//! graphs (colored edges only) and ltt structures (black edges as well).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::permutation::PairPermutation;
use crate::word::{Direction, Turn};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexColor {
    Purple,
    Red,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeColor {
    Black,
    Red,
    Purple,
}

impl EdgeColor {
    pub fn is_colored(self) -> bool {
        self != EdgeColor::Black
    }

    fn dot_name(self) -> &'static str {
        match self {
            EdgeColor::Black => "black",
            EdgeColor::Red => "red",
            EdgeColor::Purple => "purple",
        }
    }
}

impl VertexColor {
    fn dot_name(self) -> &'static str {
        match self {
            VertexColor::Purple => "purple",
            VertexColor::Red => "red",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub ends: Turn,
    pub color: EdgeColor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub label: Direction,
    pub color: VertexColor,
}

/// A finite graph on a subset of the `2r` direction labels.
///
/// Edges of different colors may join the same pair (a black edge beside a
/// colored one); an edge of a given color appears at most once per pair.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct ColoredPairLabeledGraph {
    rank: usize,
    vertices: BTreeMap<Direction, VertexColor>,
    edges: BTreeSet<Edge>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    rank: usize,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

impl TryFrom<RawGraph> for ColoredPairLabeledGraph {
    type Error = Error;
    fn try_from(r: RawGraph) -> Result<Self> {
        let mut g = ColoredPairLabeledGraph::new(r.rank);
        for v in r.vertices {
            g.add_vertex(v.label, v.color)?;
        }
        for e in r.edges {
            g.add_edge(e.ends.first(), e.ends.second(), e.color)?;
        }
        Ok(g)
    }
}

impl From<ColoredPairLabeledGraph> for RawGraph {
    fn from(g: ColoredPairLabeledGraph) -> Self {
        RawGraph {
            rank: g.rank,
            vertices: g.vertices.iter().map(|(&label, &color)| Vertex { label, color }).collect(),
            edges: g.edges.into_iter().collect(),
        }
    }
}

/// What an isomorphism must preserve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IsoOptions {
    /// Only the identity on labels is allowed.
    pub labels: bool,
    pub colors: bool,
    /// `x` and `x̄` must go to a pair whenever both are vertices.
    pub pairs: bool,
}

impl IsoOptions {
    pub const EXACT: IsoOptions = IsoOptions { labels: true, colors: true, pairs: true };
    pub const UNLABELED: IsoOptions = IsoOptions { labels: false, colors: true, pairs: true };
    pub const SHAPE: IsoOptions = IsoOptions { labels: false, colors: false, pairs: false };
}

impl ColoredPairLabeledGraph {
    pub fn new(rank: usize) -> Self {
        ColoredPairLabeledGraph { rank, vertices: BTreeMap::new(), edges: BTreeSet::new() }
    }

    /// All `2r` labels as purple vertices, no edges.
    pub fn full(rank: usize) -> Self {
        let mut g = Self::new(rank);
        for d in Direction::all(rank) {
            g.vertices.insert(d, VertexColor::Purple);
        }
        g
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn add_vertex(&mut self, label: Direction, color: VertexColor) -> Result<()> {
        label.check_rank(self.rank)?;
        self.vertices.insert(label, color);
        Ok(())
    }

    pub fn add_edge(&mut self, a: Direction, b: Direction, color: EdgeColor) -> Result<()> {
        if a == b {
            return Err(Error::InvalidGraph(format!("self-loop at {a}")));
        }
        for v in [a, b] {
            if !self.vertices.contains_key(&v) {
                return Err(Error::InvalidGraph(format!("edge endpoint {v} is not a vertex")));
            }
        }
        self.edges.insert(Edge { ends: Turn::new(a, b), color });
        Ok(())
    }

    pub fn remove_edge(&mut self, ends: Turn, color: EdgeColor) -> bool {
        self.edges.remove(&Edge { ends, color })
    }

    pub fn remove_vertex(&mut self, v: Direction) {
        self.vertices.remove(&v);
        self.edges.retain(|e| !e.ends.contains(v));
    }

    pub fn set_vertex_color(&mut self, v: Direction, color: VertexColor) {
        if let Some(c) = self.vertices.get_mut(&v) {
            *c = color;
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = (Direction, VertexColor)> + '_ {
        self.vertices.iter().map(|(&d, &c)| (d, c))
    }

    pub fn labels(&self) -> BTreeSet<Direction> {
        self.vertices.keys().copied().collect()
    }

    pub fn vertex_color(&self, v: Direction) -> Option<VertexColor> {
        self.vertices.get(&v).copied()
    }

    pub fn has_vertex(&self, v: Direction) -> bool {
        self.vertices.contains_key(&v)
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn edges_of(&self, color: EdgeColor) -> impl Iterator<Item = Turn> + '_ {
        self.edges.iter().filter(move |e| e.color == color).map(|e| e.ends)
    }

    pub fn has_edge(&self, ends: Turn, color: EdgeColor) -> bool {
        self.edges.contains(&Edge { ends, color })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of edge ends at `v`, over all colors.
    pub fn degree(&self, v: Direction) -> usize {
        self.edges.iter().filter(|e| e.ends.contains(v)).count()
    }

    pub fn neighbors(&self, v: Direction) -> BTreeSet<Direction> {
        self.edges.iter().filter_map(|e| e.ends.other(v)).collect()
    }

    /// Subgraph induced on `keep`.
    pub fn induced(&self, keep: &BTreeSet<Direction>) -> Self {
        ColoredPairLabeledGraph {
            rank: self.rank,
            vertices: self.vertices.iter().filter(|(d, _)| keep.contains(d)).map(|(&d, &c)| (d, c)).collect(),
            edges: self
                .edges
                .iter()
                .filter(|e| keep.contains(&e.ends.first()) && keep.contains(&e.ends.second()))
                .copied()
                .collect(),
        }
    }

    /// Same vertices, only the edges whose color satisfies `keep`.
    pub fn filter_edges(&self, keep: impl Fn(EdgeColor) -> bool) -> Self {
        ColoredPairLabeledGraph {
            rank: self.rank,
            vertices: self.vertices.clone(),
            edges: self.edges.iter().filter(|e| keep(e.color)).copied().collect(),
        }
    }

    /// Applies a label map that is injective on the vertex set.
    pub fn map_labels(&self, f: impl Fn(Direction) -> Direction) -> Self {
        ColoredPairLabeledGraph {
            rank: self.rank,
            vertices: self.vertices.iter().map(|(&d, &c)| (f(d), c)).collect(),
            edges: self.edges.iter().map(|e| Edge { ends: e.ends.map(&f), color: e.color }).collect(),
        }
    }

    pub fn relabel(&self, p: &PairPermutation) -> Result<Self> {
        if p.rank() != self.rank {
            return Err(Error::RankError { expected: self.rank, found: p.rank() });
        }
        Ok(self.map_labels(|d| p.apply(d)))
    }

    /// Same graph viewed in a larger labeling set.
    pub fn with_rank(&self, rank: usize) -> Result<Self> {
        if self.vertices.keys().any(|d| d.edge() >= rank) {
            return Err(Error::RankError { expected: self.rank, found: rank });
        }
        Ok(ColoredPairLabeledGraph { rank, ..self.clone() })
    }

    fn adjacency(&self) -> BTreeMap<Direction, BTreeSet<Direction>> {
        let mut adj: BTreeMap<Direction, BTreeSet<Direction>> =
            self.vertices.keys().map(|&d| (d, BTreeSet::new())).collect();
        for e in &self.edges {
            let (a, b) = (e.ends.first(), e.ends.second());
            adj.entry(a).or_default().insert(b);
            adj.entry(b).or_default().insert(a);
        }
        adj
    }

    /// Components as label sets, ordered by least label.
    pub fn connected_components(&self) -> Vec<BTreeSet<Direction>> {
        let adj = self.adjacency();
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in self.vertices.keys() {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = BTreeSet::from([start]);
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for &v in &adj[&u] {
                    if seen.insert(v) {
                        comp.insert(v);
                        stack.push(v);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() == 1
    }

    /// Articulation points, by depth-first lowpoints (per component).
    pub fn cut_vertices(&self) -> BTreeSet<Direction> {
        let adj = self.adjacency();
        let index: BTreeMap<Direction, usize> = adj.keys().enumerate().map(|(i, &d)| (d, i)).collect();
        let labels: Vec<Direction> = adj.keys().copied().collect();
        let nbrs: Vec<Vec<usize>> = labels.iter().map(|d| adj[d].iter().map(|v| index[v]).collect()).collect();
        let n = labels.len();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut cut = vec![false; n];
        let mut time = 0;
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            // iterative DFS: (vertex, parent, next neighbor position)
            let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
            disc[root] = time;
            low[root] = time;
            time += 1;
            let mut root_children = 0;
            while let Some(&mut (u, parent, ref mut pos)) = stack.last_mut() {
                if *pos < nbrs[u].len() {
                    let v = nbrs[u][*pos];
                    *pos += 1;
                    if disc[v] == usize::MAX {
                        disc[v] = time;
                        low[v] = time;
                        time += 1;
                        if u == root {
                            root_children += 1;
                        }
                        stack.push((v, u, 0));
                    } else if v != parent {
                        low[u] = low[u].min(disc[v]);
                    }
                } else {
                    stack.pop();
                    if parent != usize::MAX {
                        low[parent] = low[parent].min(low[u]);
                        if parent != root && low[u] >= disc[parent] {
                            cut[parent] = true;
                        }
                    }
                }
            }
            cut[root] = root_children > 1;
        }
        (0..n).filter(|&i| cut[i]).map(|i| labels[i]).collect()
    }

    /// An isomorphism `self → other` (as a label map), if one exists.
    pub fn isomorphism(&self, other: &Self, opts: IsoOptions) -> Option<BTreeMap<Direction, Direction>> {
        if self.vertex_count() != other.vertex_count() || self.edge_count() != other.edge_count() {
            return None;
        }
        if opts.labels {
            let same = if opts.colors {
                self.vertices == other.vertices && self.edges == other.edges
            } else {
                self.labels() == other.labels()
                    && self.edges.iter().map(|e| e.ends).collect::<Vec<_>>()
                        == other.edges.iter().map(|e| e.ends).collect::<Vec<_>>()
            };
            return same.then(|| self.vertices.keys().map(|&d| (d, d)).collect());
        }
        Matcher::new(self, other, opts).run()
    }

    pub fn is_isomorphic(&self, other: &Self, opts: IsoOptions) -> bool {
        self.isomorphism(other, opts).is_some()
    }

    /// Graphviz text; all emission is sorted so output is byte-stable.
    pub fn to_dot(&self) -> String {
        self.to_dot_named("G")
    }

    pub fn to_dot_named(&self, name: &str) -> String {
        let mut s = format!("graph {name} {{\n");
        s.push_str(&self.dot_body());
        s.push_str("}\n");
        s
    }

    pub(crate) fn dot_body(&self) -> String {
        let mut s = String::new();
        for color in [VertexColor::Purple, VertexColor::Red] {
            let group: Vec<String> =
                self.vertices.iter().filter(|(_, &c)| c == color).map(|(d, _)| format!("\"{d}\";")).collect();
            if !group.is_empty() {
                let _ = writeln!(s, "  {{ node [color=\"{}\"]; {} }}", color.dot_name(), group.join(" "));
            }
        }
        for e in &self.edges {
            let _ =
                writeln!(s, "  \"{}\" -- \"{}\" [color=\"{}\"];", e.ends.first(), e.ends.second(), e.color.dot_name());
        }
        s
    }
}

/// Backtracking search for a label bijection, with degree and color pruning.
struct Matcher<'a> {
    a: &'a ColoredPairLabeledGraph,
    b: &'a ColoredPairLabeledGraph,
    opts: IsoOptions,
    order: Vec<Direction>,
    edge_count_a: BTreeMap<(Direction, Direction), Vec<EdgeColor>>,
    edge_count_b: BTreeMap<(Direction, Direction), Vec<EdgeColor>>,
}

impl<'a> Matcher<'a> {
    fn new(a: &'a ColoredPairLabeledGraph, b: &'a ColoredPairLabeledGraph, opts: IsoOptions) -> Self {
        let mut order: Vec<Direction> = a.vertices.keys().copied().collect();
        order.sort_by_key(|&d| (std::cmp::Reverse(a.degree(d)), d));
        Matcher { a, b, opts, order, edge_count_a: edge_table(a, opts), edge_count_b: edge_table(b, opts) }
    }

    fn signature(&self, g: &ColoredPairLabeledGraph, v: Direction) -> (Option<VertexColor>, Vec<EdgeColor>) {
        let mut colors: Vec<EdgeColor> = g
            .edges
            .iter()
            .filter(|e| e.ends.contains(v))
            .map(|e| if self.opts.colors { e.color } else { EdgeColor::Black })
            .collect();
        colors.sort();
        (self.opts.colors.then(|| g.vertices[&v]), colors)
    }

    fn run(&self) -> Option<BTreeMap<Direction, Direction>> {
        let mut sig_a: Vec<_> = self.a.vertices.keys().map(|&v| self.signature(self.a, v)).collect();
        let mut sig_b: Vec<_> = self.b.vertices.keys().map(|&v| self.signature(self.b, v)).collect();
        sig_a.sort();
        sig_b.sort();
        if sig_a != sig_b {
            return None;
        }
        let mut map = BTreeMap::new();
        let mut used = BTreeSet::new();
        self.extend(0, &mut map, &mut used).then_some(map)
    }

    fn extend(&self, i: usize, map: &mut BTreeMap<Direction, Direction>, used: &mut BTreeSet<Direction>) -> bool {
        let Some(&v) = self.order.get(i) else {
            return true;
        };
        let sig = self.signature(self.a, v);
        for &w in self.b.vertices.keys() {
            if used.contains(&w) || self.signature(self.b, w) != sig || !self.consistent(v, w, map) {
                continue;
            }
            map.insert(v, w);
            used.insert(w);
            if self.extend(i + 1, map, used) {
                return true;
            }
            map.remove(&v);
            used.remove(&w);
        }
        false
    }

    fn consistent(&self, v: Direction, w: Direction, map: &BTreeMap<Direction, Direction>) -> bool {
        if self.opts.pairs {
            if let Some(&wb) = map.get(&v.bar()) {
                if wb != w.bar() {
                    return false;
                }
            }
            let partner_in_a = self.a.has_vertex(v.bar());
            let partner_in_b = self.b.has_vertex(w.bar());
            if partner_in_a != partner_in_b {
                return false;
            }
        }
        map.iter().all(|(&u, &x)| {
            let ea = self.edge_count_a.get(&key(u, v));
            let eb = self.edge_count_b.get(&key(x, w));
            ea == eb
        })
    }
}

fn key(a: Direction, b: Direction) -> (Direction, Direction) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn edge_table(g: &ColoredPairLabeledGraph, opts: IsoOptions) -> BTreeMap<(Direction, Direction), Vec<EdgeColor>> {
    let mut t: BTreeMap<(Direction, Direction), Vec<EdgeColor>> = BTreeMap::new();
    for e in &g.edges {
        let c = if opts.colors { e.color } else { EdgeColor::Black };
        t.entry((e.ends.first(), e.ends.second())).or_default().push(c);
    }
    for v in t.values_mut() {
        v.sort();
    }
    t
}

impl fmt::Debug for ColoredPairLabeledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self
            .vertices
            .iter()
            .map(|(d, c)| if *c == VertexColor::Red { format!("{d}*") } else { d.to_string() })
            .collect();
        let es: Vec<String> = self
            .edges
            .iter()
            .map(|e| match e.color {
                EdgeColor::Black => format!("{}={}", e.ends.first(), e.ends.second()),
                EdgeColor::Red => format!("{}~{}", e.ends.first(), e.ends.second()),
                EdgeColor::Purple => format!("{}-{}", e.ends.first(), e.ends.second()),
            })
            .collect();
        write!(f, "Graph[r={}; {} | {}]", self.rank, vs.join(" "), es.join(" "))
    }
}
