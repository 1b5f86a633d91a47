//! Gluing ltt structures and building fully irreducibles of any rank `r ≥ 3`
//! whose ideal Whitehead graph is connected with a cut vertex.
//!
//! Indices are zero-based edge numbers; `X_1 = a` is edge 0 and `X_2 = b` is
//! edge 1. Structures taking part in a glue are normalized so that their red
//! vertex is `a` and their red edge is `[a, b]`.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::graph::{ColoredPairLabeledGraph, IsoOptions};
use crate::ltt::LttStructure;
use crate::map::{NielsenGenerator, RoseMap};
use crate::nielsen::{is_legalizing_prevention_sequence, Bounds, PnpCertificate};
use crate::permutation::PairPermutation;
use crate::whitehead::{ideal_whitehead_graph, index_list};
use crate::word::{Direction, Turn};
use crate::Index;

/// Cap on the power taken to make a glued input rotationless and strictly
/// irreducible.
pub const MAX_POWER: usize = 12;

/// The nine-generator rank-3 decomposition `g_φ`, in prepend form, first
/// generator applied first. Its square is a legalizing Nielsen path
/// prevention sequence and its ideal Whitehead graph is a line on 5 vertices.
pub fn example() -> Decomposition {
    const STEPS: [(&str, &str); 9] = [
        ("a-", "b"),
        ("b", "a-"),
        ("c-", "b"),
        ("c-", "a-"),
        ("b", "c-"),
        ("a-", "b"),
        ("a-", "c-"),
        ("b", "a-"),
        ("b", "c-"),
    ];
    let steps = STEPS
        .iter()
        .map(|(x, y)| {
            NielsenGenerator::new(Direction::parse(x).expect("letter"), Direction::parse(y).expect("letter"))
                .expect("distinct pairs")
        })
        .collect();
    Decomposition::new(3, steps).expect("rank 3")
}

/// The pair permutation sending the red vertex to `a` and the purple end of
/// the red edge to `b`, other pairs keeping their order and orientation.
pub fn red_edge_normalization(s: &LttStructure) -> Result<PairPermutation> {
    let (Some(u), Some(v)) = (s.red_vertex(), s.red_edge_purple_end()) else {
        return Err(Error::SpecError(format!("{s} has no unique red edge")));
    };
    let rank = s.rank();
    let mut images = vec![Direction::positive(0); rank];
    let mut place = |d: Direction, target: usize| {
        images[d.edge()] = if d.is_inverse() { Direction::positive(target).bar() } else { Direction::positive(target) };
    };
    place(u, 0);
    place(v, 1);
    for (next, i) in (2..).zip((0..rank).filter(|&i| i != u.edge() && i != v.edge())) {
        place(Direction::positive(i), next);
    }
    PairPermutation::from_images(images)
}

/// One input of a glue: a decomposition together with the structure it achieves.
#[derive(Clone, Debug, Serialize)]
pub struct GluingSide {
    pub decomposition: Decomposition,
    pub structure: LttStructure,
}

impl GluingSide {
    /// The side achieving `G(g)`, relabeled so the red edge is `[a, b]`.
    pub fn normalized(d: &Decomposition) -> Result<GluingSide> {
        let g = d.power(d.rotationless_power().exponent);
        let s = LttStructure::of_map(&g);
        let p = red_edge_normalization(&s)?;
        Ok(GluingSide { decomposition: d.relabel(&p)?, structure: s.relabel(&p)? })
    }

    pub fn rank(&self) -> usize {
        self.decomposition.rank()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GluingSpec {
    pub left: GluingSide,
    pub right: GluingSide,
    /// Shared edge indices `𝓘`; must contain 0 and 1.
    pub shared: BTreeSet<usize>,
}

impl GluingSpec {
    /// Glue along `{X_1, X_2}`.
    pub fn new(left: GluingSide, right: GluingSide) -> Self {
        GluingSpec { left, right, shared: BTreeSet::from([0, 1]) }
    }

    pub fn with_shared(mut self, shared: impl IntoIterator<Item = usize>) -> Self {
        self.shared = shared.into_iter().collect();
        self
    }

    /// `r = r′ + r″ − k`.
    pub fn output_rank(&self) -> usize {
        self.left.rank() + self.right.rank() - self.shared.len()
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::SpecError(m));
        if !self.shared.contains(&0) || !self.shared.contains(&1) {
            return err("shared index set must contain X_1 and X_2".into());
        }
        for (name, side) in [("left", &self.left), ("right", &self.right)] {
            let s = &side.structure;
            if s.rank() != side.rank() {
                return err(format!(
                    "{name} structure has rank {} but its decomposition rank {}",
                    s.rank(),
                    side.rank()
                ));
            }
            if let Some(&i) = self.shared.iter().find(|&&i| i >= side.rank()) {
                return err(format!("shared index {i} exceeds the {name} rank"));
            }
            let a = Direction::positive(0);
            let b = Direction::positive(1);
            if s.red_vertex() != Some(a) || s.red_edge() != Some(Turn::new(a, b)) {
                return err(format!("{name} red edge is not normalized to [a, b]: {s}"));
            }
            if !s.is_valid() || !s.is_birecurrent() {
                return err(format!("{name} structure is not an admissible ltt structure"));
            }
        }
        Ok(())
    }

    /// Where the right side's edges go: shared indices stay, the others
    /// follow the left rank in order.
    pub fn right_relabeling(&self) -> PairPermutation {
        let r = self.output_rank();
        let mut images: Vec<Direction> = Vec::with_capacity(r);
        let mut next = self.left.rank();
        for i in 0..self.right.rank() {
            if self.shared.contains(&i) {
                images.push(Direction::positive(i));
            } else {
                images.push(Direction::positive(next));
                next += 1;
            }
        }
        let used: BTreeSet<usize> = images.iter().map(|d| d.edge()).collect();
        images.extend((0..r).filter(|i| !used.contains(i)).map(Direction::positive));
        PairPermutation::from_images(images).expect("bijection by construction")
    }
}

/// Glues `C(G_1)` and `C(G_2)` along the shared vertices and drops the red edge.
///
/// Both red vertices are `a`, which carries only the red edge, so removing
/// the red edge leaves the union of the two purple graphs.
pub fn glue_graphs(spec: &GluingSpec) -> Result<ColoredPairLabeledGraph> {
    spec.validate()?;
    let r = spec.output_rank();
    let left = spec.left.structure.purple_graph().with_rank(r)?;
    let right = spec.right.structure.purple_graph().with_rank(r)?.relabel(&spec.right_relabeling())?;
    let mut glued = left;
    for (v, c) in right.vertices() {
        if !glued.has_vertex(v) {
            glued.add_vertex(v, c)?;
        }
    }
    for e in right.edges() {
        if !glued.has_edge(e.ends, e.color) {
            glued.add_edge(e.ends.first(), e.ends.second(), e.color)?;
        }
    }
    Ok(glued)
}

/// Smallest `p ≤ MAX_POWER` with `d^p` rotationless and strictly irreducible.
pub fn preparing_power(d: &Decomposition) -> Result<usize> {
    (1..=MAX_POWER)
        .find(|&p| {
            let g = d.power(p);
            g.rotationless_power().exponent == 1 && g.is_strictly_irreducible()
        })
        .ok_or_else(|| {
            Error::SpecError(format!("no power up to {MAX_POWER} of {d} is rotationless and strictly irreducible"))
        })
}

/// The checks (i)–(v) made on a glued composite.
#[derive(Clone, Debug, Serialize)]
pub struct GlueCertificate {
    pub powers: (usize, usize),
    /// (i)
    pub cyclically_admissible: bool,
    /// (ii) every entry of the transition matrix of `(h∘g)²` is positive.
    pub square_positive: bool,
    /// (iii)
    pub glued_edges_taken: bool,
    /// (iv)
    pub pnp: PnpCertificate,
    /// Informational: whether each prepared side is itself a legalizing
    /// prevention sequence.
    pub sides_prevent: (bool, bool),
    /// (v)
    pub iw_matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Glued {
    pub decomposition: Decomposition,
    pub graph: ColoredPairLabeledGraph,
    pub certificate: GlueCertificate,
}

/// Realizes the glued graph by `h∘g`, the extended left steps followed by
/// the relabeled, extended right steps, and certifies the result.
pub fn realize_glued(spec: &GluingSpec, bounds: Option<Bounds>) -> Result<Glued> {
    let graph = glue_graphs(spec)?;
    let r = spec.output_rank();
    let mut prepared = Vec::new();
    for (name, side) in [("left", &spec.left), ("right", &spec.right)] {
        let p = preparing_power(&side.decomposition)?;
        let d = side.decomposition.power(p);
        if LttStructure::of_map(&d) != side.structure {
            return Err(Error::SpecError(format!("{name} structure is not achieved by its decomposition")));
        }
        prepared.push((p, d));
    }
    let (pg, g) = &prepared[0];
    let (ph, h) = &prepared[1];
    let sides_prevent =
        (is_legalizing_prevention_sequence(g, bounds).0, is_legalizing_prevention_sequence(h, bounds).0);
    let g = g.extend_rank(r)?;
    let h = h.extend_rank(r)?.relabel(&spec.right_relabeling())?;
    let hg = g.then(&h)?;

    let fail = |m: String| Err(Error::CheckFailed(m));
    if !hg.is_cyclically_admissible() {
        return fail(format!("(i) inadmissible pairs at {:?}", hg.inadmissible_pairs()));
    }
    if !hg.power(2).is_strictly_irreducible() {
        return fail("(ii) some edge pair never crosses another under (h∘g)²".into());
    }
    let power = hg.power(hg.rotationless_power().exponent);
    let closure = power.turn_closure().turns;
    let periodic = power.direction_map().periodic();
    if let Some(t) = graph
        .edges()
        .map(|e| e.ends)
        .find(|t| !closure.contains(t) || !periodic.contains(&t.first()) || !periodic.contains(&t.second()))
    {
        return fail(format!("(iii) glued edge {t} is not a periodic taken turn"));
    }
    let pnp = PnpCertificate::certify(&hg, bounds).map_err(|e| Error::CheckFailed(format!("(iv) {e}")))?;
    let iw = ideal_whitehead_graph(&hg, &pnp)?;
    if !iw.is_isomorphic(&graph, IsoOptions::EXACT) {
        return fail(format!("(v) ideal Whitehead graph {iw:?} differs from glued graph {graph:?}"));
    }
    Ok(Glued {
        decomposition: hg,
        graph,
        certificate: GlueCertificate {
            powers: (*pg, *ph),
            cyclically_admissible: true,
            square_positive: true,
            glued_edges_taken: true,
            pnp,
            sides_prevent,
            iw_matches: true,
        },
    })
}

/// Everything established about a pipeline output.
#[derive(Clone, Debug, Serialize)]
pub struct CertificateBundle {
    pub rank: usize,
    pub decomposition: Decomposition,
    pub train_track: bool,
    pub expanding: bool,
    pub irreducible: bool,
    pub cyclically_admissible: bool,
    pub pnp: PnpCertificate,
    pub ideal_whitehead: ColoredPairLabeledGraph,
    pub iw_connected: bool,
    pub cut_vertices: BTreeSet<Direction>,
    pub index_list: Vec<Index>,
    /// Labels identified by the last glue, if any.
    pub glued_labels: BTreeSet<Direction>,
}

impl CertificateBundle {
    pub fn assemble(d: &Decomposition, pnp: PnpCertificate, glued_labels: BTreeSet<Direction>) -> Result<Self> {
        let iw = ideal_whitehead_graph(d, &pnp)?;
        let g = d.power(d.rotationless_power().exponent);
        Ok(CertificateBundle {
            rank: d.rank(),
            decomposition: d.clone(),
            train_track: g.is_train_track(),
            expanding: d.is_expanding(),
            irreducible: d.is_irreducible(),
            cyclically_admissible: d.is_cyclically_admissible(),
            pnp,
            iw_connected: iw.is_connected(),
            cut_vertices: iw.cut_vertices(),
            index_list: index_list(&iw),
            ideal_whitehead: iw,
            glued_labels,
        })
    }

    pub fn iw_vertices(&self) -> usize {
        self.ideal_whitehead.vertex_count()
    }

    /// `{3/2 − r}`.
    pub fn expected_index(&self) -> Index {
        Index::new(3 - 2 * self.rank as i64, 2)
    }

    /// Each check, named.
    pub fn checks(&self) -> Vec<(&'static str, bool)> {
        vec![
            ("train track", self.train_track),
            ("expanding", self.expanding),
            ("irreducible", self.irreducible),
            ("cyclically admissible", self.cyclically_admissible),
            ("PNP-free", true),
            ("IW connected", self.iw_connected),
            ("IW has 2r-1 vertices", self.iw_vertices() == 2 * self.rank - 1),
            ("cut vertex", !self.cut_vertices.is_empty()),
            ("index list", self.index_list == [self.expected_index()]),
            (
                "cut vertex at a glued label",
                self.glued_labels.is_empty() || !self.cut_vertices.is_disjoint(&self.glued_labels),
            ),
        ]
    }

    pub fn all_pass(&self) -> bool {
        self.checks().iter().all(|(_, ok)| *ok)
    }
}

impl fmt::Display for CertificateBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rank {}: {} generators", self.rank, self.decomposition.len())?;
        for (name, ok) in self.checks() {
            writeln!(f, "  {name}: {}", if ok { "ok" } else { "FAILED" })?;
        }
        writeln!(f, "  {}", self.pnp)?;
        let list: Vec<String> = self.index_list.iter().map(|i| i.to_string()).collect();
        writeln!(f, "  index list: {{{}}}", list.join(", "))?;
        let cuts: Vec<String> = self.cut_vertices.iter().map(|d| d.to_string()).collect();
        write!(f, "  cut vertices: {}", cuts.join(" "))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineOutput {
    pub bundle: CertificateBundle,
    /// One entry per glue, in order.
    pub glues: Vec<Glued>,
}

impl PipelineOutput {
    pub fn to_text(&self) -> String {
        let mut s = self.bundle.to_string();
        s.push('\n');
        for (i, g) in self.glues.iter().enumerate() {
            let c = &g.certificate;
            let _ = writeln!(
                s,
                "  glue {}: rank {} powers {:?} (i) {} (ii) {} (iii) {} (iv) {} branches (v) {}",
                i + 1,
                g.decomposition.rank(),
                c.powers,
                c.cyclically_admissible,
                c.square_positive,
                c.glued_edges_taken,
                c.pnp.branches(),
                c.iw_matches
            );
        }
        s
    }
}

/// A rank `r ≥ 3` fully irreducible whose ideal Whitehead graph is connected
/// on `2r − 1` vertices with a cut vertex.
///
/// Rank 3 is the square of [`example`]. Each further rank glues one more
/// normalized copy of it along `{X_1, X_2}`.
pub fn cut_vertex_pipeline(rank: usize, bounds: Option<Bounds>) -> Result<PipelineOutput> {
    if rank < 3 {
        return Err(Error::SpecError(format!("rank must be at least 3, got {rank}")));
    }
    let base = example().power(2);
    if rank == 3 {
        let pnp = PnpCertificate::certify(&base, bounds)?;
        return Ok(PipelineOutput { bundle: CertificateBundle::assemble(&base, pnp, BTreeSet::new())?, glues: vec![] });
    }
    let copy = GluingSide::normalized(&base)?;
    let mut left = copy.clone();
    let mut glues = Vec::new();
    for _ in 4..=rank {
        let spec = GluingSpec::new(left, copy.clone());
        let glued = realize_glued(&spec, bounds)?;
        let d = glued.decomposition.clone();
        left =
            GluingSide { structure: LttStructure::of_map(&d.power(d.rotationless_power().exponent)), decomposition: d };
        glues.push(glued);
    }
    let last = glues.last().expect("rank > 3");
    let glued_labels =
        [0, 1].into_iter().flat_map(|i| [Direction::positive(i), Direction::positive(i).bar()]).collect();
    let bundle = CertificateBundle::assemble(&last.decomposition, last.certificate.pnp.clone(), glued_labels)?;
    Ok(PipelineOutput { bundle, glues })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    #[test]
    fn example_matrix_and_admissibility() {
        let g = example();
        assert!(g.is_cyclically_admissible());
        let m: Matrix<u64> = g.transition_matrix().unwrap();
        assert_eq!(m.rows(), vec![vec![5, 3, 3], vec![3, 2, 2], vec![6, 4, 5]]);
    }

    #[test]
    fn normalization_puts_red_edge_on_ab() {
        let side = GluingSide::normalized(&example().power(2)).unwrap();
        let a = Direction::positive(0);
        assert_eq!(side.structure.red_vertex(), Some(a));
        assert_eq!(side.structure.red_edge(), Some(Turn::new(a, Direction::positive(1))));
    }

    #[test]
    fn spec_errors() {
        let side = GluingSide::normalized(&example().power(2)).unwrap();
        let spec = GluingSpec::new(side.clone(), side.clone()).with_shared([0]);
        assert!(matches!(glue_graphs(&spec), Err(Error::SpecError(_))));
        let raw = GluingSide { decomposition: example(), structure: LttStructure::of_map(&example()) };
        assert!(matches!(glue_graphs(&GluingSpec::new(raw, side)), Err(Error::SpecError(_))));
    }

    #[test]
    fn rank_four_glue_shape() {
        let side = GluingSide::normalized(&example().power(2)).unwrap();
        let spec = GluingSpec::new(side.clone(), side.clone());
        assert_eq!(spec.output_rank(), 4);
        let g = glue_graphs(&spec).unwrap();
        assert_eq!(g.vertex_count(), 7);
        assert!(g.is_connected());
        let glued: BTreeSet<Direction> =
            [0, 1].iter().flat_map(|&i| [Direction::positive(i), Direction::positive(i).bar()]).collect();
        assert!(!g.cut_vertices().is_disjoint(&glued));
    }

    #[test]
    fn full_overlap_is_the_purple_graph() {
        let side = GluingSide::normalized(&example().power(2)).unwrap();
        let spec = GluingSpec::new(side.clone(), side.clone()).with_shared([0, 1, 2]);
        assert_eq!(spec.output_rank(), 3);
        assert_eq!(glue_graphs(&spec).unwrap(), side.structure.purple_graph());
    }
}
