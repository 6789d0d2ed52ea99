//! Pre-cut, cut, pre-Cutkosky and Cutkosky graphs.
//!
//! A pre-cut graph is a pair of graphs on the same half-edges: the base graph
//! Γ̂ and a refinement Γ̃ (the *associated graph*) whose vertex partition
//! refines the corollas (split vertices) and whose edge partition refines the
//! edge parts (cut edges, whose two half-edges become separate legs of Γ̃).
//! The derived data are the cut set `C_Γ`, the gradings `|Γ|` (loops of Γ̂)
//! and `‖Γ‖ = |Γ̃|`, the component count `h₀(Γ̃)` and the induced partition of
//! the external legs by Γ̃-components.
//!
//! A *compatible spanning forest* is a forest of uncut edges restricting to a
//! spanning tree of every Γ̃-component; one exists iff every cut edge has its
//! two ends in different Γ̃-components (the pre-Cutkosky condition).  Forests
//! are enumerated component-wise as a product of per-component tree sets.

use std::collections::{BTreeMap, BTreeSet};

use crate::canon::{permute_each, CanonKey, DecGraph, DecNode};
use crate::error::{FeynError, Result};
use crate::graph::{combinations, EdgeIx, EdgeSet, Graph, HalfEdge, UnionFind};

/// Partition of a corolla into split parts, each nonempty and sorted.
pub type Split = Vec<Vec<HalfEdge>>;

/// A graph with marked cut edges and split vertices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PreCutGraph {
    /// The base graph Γ̂.
    pub base: Graph,
    /// Indices of cut edges `C_Γ` into `base.edges`.
    pub cuts: EdgeSet,
    /// Nontrivial corolla partitions, keyed by vertex index of `base`.
    pub splits: BTreeMap<usize, Split>,
}

/// The tightest classification of a pre-cut graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CutClass {
    /// Trivial refinement: no cuts, no splits.
    Core,
    /// Cut (no splits) with every cut edge joining distinct Γ̃-components.
    Cutkosky,
    /// No splits, but some cut edge stays inside a Γ̃-component.
    Cut,
    /// Splits allowed; every cut edge joins distinct Γ̃-components.
    PreCutkosky,
    /// None of the above.
    PreCut,
}

impl CutClass {
    pub fn as_str(self) -> &'static str {
        match self {
            CutClass::Core => "core",
            CutClass::Cutkosky => "Cutkosky",
            CutClass::Cut => "cut",
            CutClass::PreCutkosky => "pre-Cutkosky",
            CutClass::PreCut => "pre-cut",
        }
    }
}

impl PreCutGraph {
    /// Validates cut indices and corolla partitions.  Trivial splits (a
    /// single part) are dropped.
    pub fn new(
        base: Graph,
        cuts: EdgeSet,
        splits: BTreeMap<usize, Split>,
    ) -> Result<PreCutGraph> {
        for &c in &cuts {
            if c >= base.e() {
                return Err(FeynError::NoSuchEdge(c));
            }
        }
        let mut clean: BTreeMap<usize, Split> = BTreeMap::new();
        for (v, parts) in splits {
            if v >= base.v() {
                return Err(FeynError::Invalid(format!("no vertex {v}")));
            }
            let mut seen: BTreeSet<HalfEdge> = BTreeSet::new();
            for part in &parts {
                if part.is_empty() {
                    return Err(FeynError::Invalid("empty split part".into()));
                }
                for &h in part {
                    if !seen.insert(h) {
                        return Err(FeynError::NonPartition(h.to_string(), "split"));
                    }
                }
            }
            let corolla: BTreeSet<HalfEdge> =
                base.vertices[v].iter().copied().collect();
            if seen != corolla {
                return Err(FeynError::NonPartition(
                    format!("vertex {v}"),
                    "split",
                ));
            }
            if parts.len() > 1 {
                let mut parts: Split = parts
                    .into_iter()
                    .map(|mut p| {
                        p.sort_unstable();
                        p
                    })
                    .collect();
                parts.sort();
                clean.insert(v, parts);
            }
        }
        Ok(PreCutGraph { base, cuts, splits: clean })
    }

    /// Embeds a core graph as the trivially refined pre-cut graph (Γ, Γ).
    pub fn core(base: Graph) -> PreCutGraph {
        PreCutGraph { base, cuts: EdgeSet::new(), splits: BTreeMap::new() }
    }

    /// The split parts in deterministic order: vertices of `base` in order,
    /// each contributing its corolla or its split parts (sorted).  Returns
    /// `(original vertex, half-edges)` per part.
    pub fn parts(&self) -> Vec<(usize, Vec<HalfEdge>)> {
        let mut out = Vec::new();
        for v in 0..self.base.v() {
            match self.splits.get(&v) {
                Some(parts) => {
                    for p in parts {
                        out.push((v, p.clone()));
                    }
                }
                None => out.push((v, self.base.vertices[v].clone())),
            }
        }
        out
    }

    /// Map from half-edge to part index (indices into [`Self::parts`]).
    pub fn part_of(&self) -> BTreeMap<HalfEdge, usize> {
        let mut m = BTreeMap::new();
        for (i, (_, hs)) in self.parts().iter().enumerate() {
            for &h in hs {
                m.insert(h, i);
            }
        }
        m
    }

    /// Γ̃-component label per part: parts joined by uncut edges only.
    pub fn tilde_components(&self) -> Vec<usize> {
        let parts = self.parts();
        let po = self.part_of();
        let mut uf = UnionFind::new(parts.len());
        for e in 0..self.base.e() {
            if self.cuts.contains(&e) {
                continue;
            }
            let (a, b) = self.base.edges[e];
            uf.union(po[&a], po[&b]);
        }
        uf.labels()
    }

    /// The associated graph Γ̃ as a standalone [`Graph`]: split parts become
    /// vertices and cut edges become pairs of legs (base legs first in label
    /// order, then cut half-edges in id order).
    pub fn associated_graph(&self) -> Graph {
        let vertices: Vec<Vec<HalfEdge>> =
            self.parts().into_iter().map(|(_, hs)| hs).collect();
        let edges: Vec<(HalfEdge, HalfEdge)> = self
            .base
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.cuts.contains(i))
            .map(|(_, &p)| p)
            .collect();
        let mut externals = self.base.externals.clone();
        let mut stubs: Vec<HalfEdge> = self
            .cuts
            .iter()
            .flat_map(|&e| {
                let (a, b) = self.base.edges[e];
                [a, b]
            })
            .collect();
        stubs.sort_unstable();
        externals.extend(stubs);
        Graph::from_parts(vertices, edges, externals, self.base.circles)
    }

    /// Loop grading `|Γ| = |Γ̂|`.
    pub fn loops(&self) -> isize {
        self.base.loops()
    }

    /// Cut grading `‖Γ‖ = |Γ̃|`, the number of intact loops.
    pub fn norm(&self) -> isize {
        self.associated_graph().loops()
    }

    /// Number of connected components of the associated graph.
    pub fn h0_tilde(&self) -> usize {
        self.associated_graph().h0()
    }

    /// Partition of the external leg labels (1-based) by Γ̃-component:
    /// one part per component carrying at least one leg, parts sorted by
    /// their minimal label, followed by the count of leg-free components.
    pub fn leg_partition(&self) -> (Vec<Vec<usize>>, usize) {
        let po = self.part_of();
        let labels = self.tilde_components();
        let mut by_comp: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, h) in self.base.externals.iter().enumerate() {
            by_comp.entry(labels[po[h]]).or_default().push(i + 1);
        }
        let legful = by_comp.len();
        let mut parts: Vec<Vec<usize>> = by_comp.into_values().collect();
        parts.sort();
        let ncomp = labels.iter().collect::<BTreeSet<_>>().len() + self.base.circles;
        (parts, ncomp - legful.min(ncomp))
    }

    /// Whether no corolla is split.
    pub fn is_cut_graph(&self) -> bool {
        self.splits.is_empty()
    }

    /// Whether the refinement is trivial.
    pub fn is_core(&self) -> bool {
        self.cuts.is_empty() && self.splits.is_empty()
    }

    /// Whether every cut edge has its two ends in different Γ̃-components.
    pub fn is_pre_cutkosky(&self) -> bool {
        let po = self.part_of();
        let labels = self.tilde_components();
        self.cuts.iter().all(|&e| {
            let (a, b) = self.base.edges[e];
            labels[po[&a]] != labels[po[&b]]
        })
    }

    /// Whether the graph is Cutkosky: cut ∧ pre-Cutkosky.
    pub fn is_cutkosky(&self) -> bool {
        self.is_cut_graph() && self.is_pre_cutkosky()
    }

    /// Tightest classification.
    pub fn classify(&self) -> CutClass {
        match (self.is_core(), self.is_cut_graph(), self.is_pre_cutkosky()) {
            (true, _, _) => CutClass::Core,
            (_, true, true) => CutClass::Cutkosky,
            (_, true, false) => CutClass::Cut,
            (_, false, true) => CutClass::PreCutkosky,
            _ => CutClass::PreCut,
        }
    }

    /// All compatible spanning forests, as sets of uncut base-edge indices.
    /// Empty iff the graph is not pre-Cutkosky.
    pub fn compatible_forests(&self) -> Vec<EdgeSet> {
        if !self.is_pre_cutkosky() {
            return vec![];
        }
        let parts = self.parts();
        let po = self.part_of();
        let labels = self.tilde_components();
        // Per component: its part indices and the uncut edges inside it.
        let comps: BTreeSet<usize> = labels.iter().copied().collect();
        let mut per_comp: Vec<Vec<EdgeSet>> = Vec::new();
        for comp in comps {
            let nodes: Vec<usize> = (0..parts.len())
                .filter(|&p| labels[p] == comp)
                .collect();
            let pos: BTreeMap<usize, usize> =
                nodes.iter().enumerate().map(|(i, &p)| (p, i)).collect();
            let edges: Vec<EdgeIx> = (0..self.base.e())
                .filter(|e| !self.cuts.contains(e))
                .filter(|&e| {
                    let (a, _) = self.base.edges[e];
                    labels[po[&a]] == comp
                })
                .collect();
            // Spanning trees of the part-level component graph.
            let need = nodes.len() - 1;
            let mut trees: Vec<EdgeSet> = Vec::new();
            for comb in combinations(edges.len(), need) {
                let mut uf = UnionFind::new(nodes.len());
                let mut ok = true;
                for &i in &comb {
                    let (a, b) = self.base.edges[edges[i]];
                    if !uf.union(pos[&po[&a]], pos[&po[&b]]) {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    trees.push(comb.into_iter().map(|i| edges[i]).collect());
                }
            }
            per_comp.push(trees);
        }
        // Cartesian product of the per-component tree sets.
        let mut out: Vec<EdgeSet> = vec![EdgeSet::new()];
        for trees in per_comp {
            out = out
                .into_iter()
                .flat_map(|base| {
                    trees.iter().map(move |t| {
                        let mut f = base.clone();
                        f.extend(t.iter().copied());
                        f
                    })
                })
                .collect();
        }
        out
    }

    /// `(E_on, E_off)` for a compatible forest `F`: `E_off = E_F` and `E_on`
    /// is its complement among the internal edges of Γ̂.
    pub fn on_off_edges(&self, forest: &EdgeSet) -> Result<(EdgeSet, EdgeSet)> {
        if !self.compatible_forests().contains(forest) {
            return Err(FeynError::NoCompatibleForest);
        }
        let on: EdgeSet = (0..self.base.e()).filter(|e| !forest.contains(e)).collect();
        Ok((on, forest.clone()))
    }

    /// The lift `f_Γ`: a bridgeless full-at-vertices subgraph of Γ̂ (given by
    /// its edge set) determines a pre-cut subgraph of Γ inheriting cut edges
    /// and vertex splits.
    pub fn sub_precut(&self, subset: &EdgeSet) -> PreCutGraph {
        let g = self.base.subgraph(subset);
        let touched: Vec<usize> =
            self.base.touched_vertices(subset).into_iter().collect();
        let cuts: EdgeSet = subset
            .iter()
            .enumerate()
            .filter(|(_, orig)| self.cuts.contains(orig))
            .map(|(new, _)| new)
            .collect();
        let splits: BTreeMap<usize, Split> = touched
            .iter()
            .enumerate()
            .filter_map(|(new, orig)| self.splits.get(orig).map(|s| (new, s.clone())))
            .collect();
        PreCutGraph { base: g, cuts, splits }
    }

    /// The co-graph `Γ/f_Γ(subset)`: contracts the subgraph's internal edges;
    /// each merged vertex receives the cut corolla given by the
    /// `h₀(γ̃)`-partition of the subgraph component's external half-edges.
    /// Two-valent vertices are elided where the decorations permit: fusing
    /// two internal edges yields a cut edge iff either edge was cut or the
    /// vertex was split.
    pub fn co_precut(&self, subset: &EdgeSet) -> Result<PreCutGraph> {
        if self.base.subset_has_bridge(subset) {
            return Err(FeynError::BridgedSubgraph);
        }
        let contracted = self.base.contract_edges(subset, false);
        let vo = contracted.vertex_of();
        // Splits of merged vertices: partition of each subgraph component's
        // legs by its Γ̃-components (half-edge ids are stable throughout).
        let mut splits_by_vertex: BTreeMap<usize, Split> = BTreeMap::new();
        let gamma = self.sub_precut(subset);
        for comp in gamma.split_components() {
            if comp.base.externals.is_empty() {
                continue;
            }
            let po = comp.part_of();
            let labels = comp.tilde_components();
            let mut parts: BTreeMap<usize, Vec<HalfEdge>> = BTreeMap::new();
            for &h in &comp.base.externals {
                parts.entry(labels[po[&h]]).or_default().push(h);
            }
            let parts: Split = parts.into_values().collect();
            let v_new = vo[&comp.base.externals[0]];
            if parts.len() > 1 {
                splits_by_vertex.insert(v_new, parts);
            }
        }
        // Splits of untouched vertices carry over.
        let touched = self.base.touched_vertices(subset);
        for (&v, s) in &self.splits {
            if !touched.contains(&v) {
                let v_new = vo[&self.base.vertices[v][0]];
                splits_by_vertex.insert(v_new, s.clone());
            }
        }
        // Cut flags: contracted edges are the complement of `subset` in
        // original order.
        let kept: Vec<EdgeIx> =
            (0..self.base.e()).filter(|e| !subset.contains(e)).collect();
        let mut ctx = ElisionCtx {
            vertices: contracted.vertices.clone(),
            splits: (0..contracted.v())
                .map(|v| splits_by_vertex.get(&v).cloned())
                .collect(),
            edges: contracted.edges.clone(),
            payload: kept.iter().map(|&e| [e].into_iter().collect()).collect(),
            cut: kept.iter().map(|e| self.cuts.contains(e)).collect(),
            externals: contracted.externals.clone(),
            circles: contracted.circles,
        };
        ctx.elide(true);
        Ok(ctx.into_precut())
    }

    /// Whether every split part contains at least one internal half-edge
    /// (a *normal* vertex cut separates internal momentum flow; a part made
    /// of external legs only is non-normal).  Unsplit graphs are normal.
    pub fn is_normal(&self) -> bool {
        let internal: BTreeSet<HalfEdge> = self
            .base
            .edges
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .collect();
        self.splits.values().all(|parts| {
            parts
                .iter()
                .all(|p| p.iter().any(|h| internal.contains(h)))
        })
    }

    /// Connected components of the base graph as standalone pre-cut graphs,
    /// cuts and splits restricted along the way.
    pub fn split_components(&self) -> Vec<PreCutGraph> {
        self.base
            .split_components_with_maps()
            .into_iter()
            .map(|(g, emap, vmap)| {
                let cuts: EdgeSet = emap
                    .iter()
                    .enumerate()
                    .filter(|(_, orig)| self.cuts.contains(orig))
                    .map(|(new, _)| new)
                    .collect();
                let splits: BTreeMap<usize, Split> = vmap
                    .iter()
                    .enumerate()
                    .filter_map(|(new, orig)| {
                        self.splits.get(orig).map(|s| (new, s.clone()))
                    })
                    .collect();
                PreCutGraph { base: g, cuts, splits }
            })
            .collect()
    }

    /// Decorated multigraph with `labels[i]` as the label of leg `i`.
    fn dec_with_labels(&self, labels: &[u32]) -> DecGraph {
        let po = self.part_of();
        let parts = self.parts();
        let mut nodes: Vec<DecNode> = parts
            .iter()
            .map(|&(v, _)| DecNode { legs: Vec::new(), group: v })
            .collect();
        for (i, h) in self.base.externals.iter().enumerate() {
            nodes[po[h]].legs.push(labels[i]);
        }
        for n in &mut nodes {
            n.legs.sort_unstable();
        }
        let edges = self
            .base
            .edges
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| {
                let c = if self.cuts.contains(&i) { 1 } else { 0 };
                (po[&a], po[&b], c)
            })
            .collect();
        DecGraph { nodes, edges, circles: self.base.circles }
    }

    fn dec(&self) -> DecGraph {
        let labels: Vec<u32> = (1..=self.base.l() as u32).collect();
        self.dec_with_labels(&labels)
    }

    /// Canonical key, external legs fixed pointwise.
    pub fn key(&self) -> CanonKey {
        self.dec().canonical_key()
    }

    /// Canonical key, minimized over leg relabelings.
    pub fn key_unlabeled(&self) -> CanonKey {
        let l = self.base.l();
        if l <= 1 {
            return self.key();
        }
        let mut best: Option<CanonKey> = None;
        permute_each(l, |perm| {
            let labels: Vec<u32> = perm.iter().map(|&p| p as u32 + 1).collect();
            let key = self.dec_with_labels(&labels).canonical_key();
            if best.as_ref().map_or(true, |b| key < *b) {
                best = Some(key);
            }
        });
        best.unwrap()
    }

    /// `|Aut|` preserving base graph, cuts and splits, legs fixed pointwise.
    pub fn aut(&self) -> u64 {
        self.dec().aut_order()
    }
}

/// Working state for decoration-aware elision of 2-valent vertices.
///
/// Edges carry a payload (the set of original edge indices fused into them)
/// and a cut flag; vertices carry an optional split.  Elision of a 2-valent
/// vertex fuses its two partner half-edges; the fused edge is cut iff either
/// constituent was cut or the vertex was split.  In *respect* mode, elisions
/// that would lose a decoration without being representable (a cut or split
/// circle, a leg absorbing a cut edge or split vertex) are skipped and the
/// 2-valent vertex is kept.
pub(crate) struct ElisionCtx {
    pub vertices: Vec<Vec<HalfEdge>>,
    pub splits: Vec<Option<Split>>,
    pub edges: Vec<(HalfEdge, HalfEdge)>,
    pub payload: Vec<EdgeSet>,
    pub cut: Vec<bool>,
    pub externals: Vec<HalfEdge>,
    pub circles: usize,
}

impl ElisionCtx {
    fn edge_with(&self, h: HalfEdge) -> Option<usize> {
        self.edges.iter().position(|&(a, b)| a == h || b == h)
    }

    fn remove_edge(&mut self, i: usize) -> (HalfEdge, HalfEdge, EdgeSet, bool) {
        let (a, b) = self.edges.remove(i);
        let p = self.payload.remove(i);
        let c = self.cut.remove(i);
        (a, b, p, c)
    }

    fn remove_vertex(&mut self, vi: usize) {
        self.vertices.remove(vi);
        self.splits.remove(vi);
    }

    pub fn elide(&mut self, respect: bool) {
        'outer: loop {
            for vi in 0..self.vertices.len() {
                if self.vertices[vi].len() != 2 {
                    continue;
                }
                let (h1, h2) = (self.vertices[vi][0], self.vertices[vi][1]);
                let split = self.splits[vi].is_some();
                let e1 = self.edge_with(h1);
                let e2 = self.edge_with(h2);
                match (e1, e2) {
                    (Some(i), Some(j)) if i == j => {
                        // Self-loop on a 2-valent vertex: a circle, unless the
                        // decoration (cut edge or split vertex) must survive.
                        if respect && (self.cut[i] || split) {
                            continue;
                        }
                        self.remove_edge(i);
                        self.remove_vertex(vi);
                        self.circles += 1;
                        continue 'outer;
                    }
                    (Some(i), Some(j)) => {
                        // Fuse the two partner half-edges; the fused edge is
                        // cut iff either edge was cut or the vertex was split.
                        let (a1, b1, mut p1, c1) = self.remove_edge(i.max(j));
                        let (a2, b2, p2, c2) = self.remove_edge(i.min(j));
                        let q1 = if a1 == h1 || a1 == h2 { b1 } else { a1 };
                        let q2 = if a2 == h1 || a2 == h2 { b2 } else { a2 };
                        p1.extend(p2);
                        self.edges.push((q1.min(q2), q1.max(q2)));
                        self.payload.push(p1);
                        self.cut.push(c1 || c2 || split);
                        self.remove_vertex(vi);
                        continue 'outer;
                    }
                    (Some(i), None) | (None, Some(i)) => {
                        // One partner is an external leg: move the leg to the
                        // internal partner, unless a decoration would be lost.
                        if respect && (self.cut[i] || split) {
                            continue;
                        }
                        let (a, b, _, _) = self.remove_edge(i);
                        let p = if a == h1 || a == h2 { b } else { a };
                        let leg = if e1.is_some() { h2 } else { h1 };
                        for l in &mut self.externals {
                            if *l == leg {
                                *l = p;
                            }
                        }
                        self.remove_vertex(vi);
                        continue 'outer;
                    }
                    (None, None) => {}
                }
            }
            break;
        }
    }

    /// Final graph plus the payload map: per final edge, the set of original
    /// edge indices fused into it.
    pub fn into_graph(self) -> (Graph, Vec<EdgeSet>) {
        let g = Graph::from_parts(
            self.vertices,
            self.edges,
            self.externals,
            self.circles,
        );
        // `from_parts` only sorts in place, so edge order (and hence the
        // payload alignment) is preserved.
        (g, self.payload)
    }

    pub fn into_precut(self) -> PreCutGraph {
        let cuts_flags = self.cut.clone();
        let splits: BTreeMap<usize, Split> = self
            .splits
            .iter()
            .enumerate()
            .filter_map(|(v, s)| s.clone().map(|s| (v, s)))
            .collect();
        let (base, _) = self.into_graph();
        let cuts: EdgeSet = cuts_flags
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c)
            .map(|(i, _)| i)
            .collect();
        PreCutGraph { base, cuts, splits }
    }
}

/// Contracts a bridgeless full-at-vertices subgraph with full elision,
/// additionally returning the payload map: for each edge of the co-graph, the
/// set of original edge indices that fused into it (edges absorbed into legs
/// or circles disappear from the map).
pub(crate) fn contract_tracked(
    g: &Graph,
    subset: &EdgeSet,
) -> Result<(Graph, Vec<EdgeSet>)> {
    if g.subset_has_bridge(subset) {
        return Err(FeynError::BridgedSubgraph);
    }
    let contracted = g.contract_edges(subset, false);
    let kept: Vec<EdgeIx> = (0..g.e()).filter(|e| !subset.contains(e)).collect();
    let mut ctx = ElisionCtx {
        vertices: contracted.vertices.clone(),
        splits: vec![None; contracted.v()],
        edges: contracted.edges.clone(),
        payload: kept.iter().map(|&e| [e].into_iter().collect()).collect(),
        cut: vec![false; kept.len()],
        externals: contracted.externals.clone(),
        circles: contracted.circles,
    };
    ctx.elide(false);
    Ok(ctx.into_graph())
}

/// A graph together with a spanning forest (any acyclic edge subset; its
/// trees, including isolated vertices, span the graph).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GraphForestPair {
    pub graph: Graph,
    pub forest: EdgeSet,
}

impl GraphForestPair {
    pub fn new(graph: Graph, forest: EdgeSet) -> Result<GraphForestPair> {
        for &e in &forest {
            if e >= graph.e() {
                return Err(FeynError::NoSuchEdge(e));
            }
        }
        if !graph.is_acyclic(&forest) {
            return Err(FeynError::ForestNotInTree);
        }
        Ok(GraphForestPair { graph, forest })
    }

    /// The crossing edges `Ĕ_F`: non-forest edges whose ends lie in different
    /// trees of the forest.  Self-loops never cross.
    pub fn crossing_edges(&self) -> EdgeSet {
        let labels = self.graph.vertex_components(&self.forest);
        (0..self.graph.e())
            .filter(|e| !self.forest.contains(e))
            .filter(|&e| {
                let (u, v) = self.graph.endpoints(e);
                labels[u] != labels[v]
            })
            .collect()
    }

    /// The induced Cutkosky graph: `C_Γ := Ĕ_F`, no splits.  The map is
    /// surjective onto Cutkosky graphs and many-to-one.
    pub fn to_cut(&self) -> PreCutGraph {
        PreCutGraph {
            base: self.graph.clone(),
            cuts: self.crossing_edges(),
            splits: BTreeMap::new(),
        }
    }

    /// Canonical key (legs fixed pointwise; forest membership as edge colour).
    pub fn key(&self) -> CanonKey {
        let colors: Vec<u8> = (0..self.graph.e())
            .map(|e| if self.forest.contains(&e) { 1 } else { 0 })
            .collect();
        crate::canon::colored_key(&self.graph, &colors)
    }

    /// Canonical key minimized over leg relabelings.
    pub fn key_unlabeled(&self) -> CanonKey {
        let colors: Vec<u8> = (0..self.graph.e())
            .map(|e| if self.forest.contains(&e) { 1 } else { 0 })
            .collect();
        crate::canon::colored_key_unlabeled(&self.graph, &colors)
    }

    /// Connected components as standalone pairs, the forest restricted.
    pub fn split_components(&self) -> Vec<GraphForestPair> {
        self.graph
            .split_components_with_maps()
            .into_iter()
            .map(|(g, emap, _)| {
                let forest: EdgeSet = emap
                    .iter()
                    .enumerate()
                    .filter(|(_, orig)| self.forest.contains(orig))
                    .map(|(new, _)| new)
                    .collect();
                GraphForestPair { graph: g, forest }
            })
            .collect()
    }

    /// `|Aut|` of the pair (legs fixed pointwise, forest preserved).
    pub fn aut(&self) -> u64 {
        let colors: Vec<u8> = (0..self.graph.e())
            .map(|e| if self.forest.contains(&e) { 1 } else { 0 })
            .collect();
        DecGraph::of_graph(&self.graph, &colors).aut_order()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::*;

    fn eset(es: &[EdgeIx]) -> EdgeSet {
        es.iter().copied().collect()
    }

    /// Triangle with legs l1@a, l2@b, l3@c; e0=(a,b), e1=(b,c), e2=(c,a).
    fn tri() -> Graph {
        triangle()
    }

    #[test]
    fn trivial_refinement_is_core() {
        let g = PreCutGraph::core(tri());
        assert_eq!(g.classify(), CutClass::Core);
        assert_eq!(g.norm(), g.loops());
        let (parts, free) = g.leg_partition();
        assert_eq!(parts, vec![vec![1, 2, 3]]);
        assert_eq!(free, 0);
    }

    #[test]
    fn two_cut_edges_cutkosky() {
        // Cut e0=(a,b) and e2=(c,a): components {a} and {b,c}, so the leg
        // partition is {{1},{2,3}} and the graph is Cutkosky.
        let g = PreCutGraph::new(tri(), eset(&[0, 2]), BTreeMap::new()).unwrap();
        assert_eq!(g.classify(), CutClass::Cutkosky);
        assert_eq!(g.norm(), 0);
        assert_eq!(g.h0_tilde(), 2);
        let (parts, free) = g.leg_partition();
        assert_eq!(parts, vec![vec![1], vec![2, 3]]);
        assert_eq!(free, 0);
    }

    #[test]
    fn normal_split_pre_cutkosky() {
        // Same leg 2-partition realized with one cut edge and a normal split
        // of vertex c (internal half-edges on both sides of the split).
        let t = tri();
        // Corollas: a = {0,1,2}? Use the actual triangle half-edges:
        // a={0,1,8}, legs 0,3,6; e0=(1,4), e1=(5,7), e2=(8,2).
        let mut splits = BTreeMap::new();
        // Vertex c = index 2 has half-edges {6,7,8}: keep leg 6 with 7, and
        // separate 8 (towards a).
        splits.insert(2usize, vec![vec![6, 7], vec![8]]);
        let g = PreCutGraph::new(t, eset(&[0]), splits).unwrap();
        assert_eq!(g.classify(), CutClass::PreCutkosky);
        let (parts, free) = g.leg_partition();
        assert_eq!(parts, vec![vec![1], vec![2, 3]]);
        assert_eq!(free, 0);
        assert_eq!(g.h0_tilde(), 2);
        assert_eq!(g.norm(), 0);
    }

    #[test]
    fn double_split_no_cuts_pre_cut() {
        // No cut edges; vertices b and c both split normally, again giving
        // the 2-partition {{1},{2,3}}.
        let t = tri();
        let mut splits = BTreeMap::new();
        // b = {3,4,5}: separate 4 (towards a) from {3,5}.
        splits.insert(1usize, vec![vec![3, 5], vec![4]]);
        // c = {6,7,8}: separate 8 (towards a) from {6,7}.
        splits.insert(2usize, vec![vec![6, 7], vec![8]]);
        let g = PreCutGraph::new(t, EdgeSet::new(), splits).unwrap();
        assert_eq!(g.classify(), CutClass::PreCutkosky);
        let (parts, free) = g.leg_partition();
        assert_eq!(parts, vec![vec![1], vec![2, 3]]);
        assert_eq!(free, 0);
    }

    #[test]
    fn non_cutkosky_example() {
        // Vertices a, b, c; cut edges a–b and a–c; uncut edge b–c and a cut
        // edge b–c: the last cut edge has both ends in the same component.
        let g = Graph::validate(
            vec![vec![0, 1, 2], vec![3, 4, 5, 6], vec![7, 8, 9, 10]],
            vec![(1, 3), (2, 7), (4, 8), (5, 9)],
            vec![0, 6, 10],
        )
        .unwrap();
        let pc = PreCutGraph::new(g, eset(&[0, 1, 3]), BTreeMap::new()).unwrap();
        assert_eq!(pc.classify(), CutClass::Cut);
        assert!(!pc.is_pre_cutkosky());
        assert!(pc.compatible_forests().is_empty());
    }

    #[test]
    fn fully_cut_triangle_unique_forest() {
        let g = PreCutGraph::new(tri(), eset(&[0, 1, 2]), BTreeMap::new()).unwrap();
        assert_eq!(g.classify(), CutClass::Cutkosky);
        let fs = g.compatible_forests();
        assert_eq!(fs, vec![EdgeSet::new()]);
        assert_eq!(g.norm(), 0);
        assert_eq!(g.h0_tilde(), 3);
        let (on, off) = g.on_off_edges(&EdgeSet::new()).unwrap();
        assert_eq!(on, eset(&[0, 1, 2]));
        assert!(off.is_empty());
    }

    #[test]
    fn uncut_dunce_cap_forests_are_trees() {
        let g = PreCutGraph::core(dunce_cap());
        let fs = g.compatible_forests();
        assert_eq!(fs.len(), 5);
        let trees: BTreeSet<EdgeSet> =
            dunce_cap().spanning_trees().unwrap().into_iter().collect();
        assert_eq!(fs.into_iter().collect::<BTreeSet<_>>(), trees);
    }

    #[test]
    fn cut_from_forest_examples() {
        // Full spanning tree: no crossing edges, core graph.
        let p = GraphForestPair::new(tri(), eset(&[1, 2])).unwrap();
        assert!(p.crossing_edges().is_empty());
        assert_eq!(p.to_cut().classify(), CutClass::Core);
        // Forest {e2}: crossing edges {e0, e1}.
        let p = GraphForestPair::new(tri(), eset(&[2])).unwrap();
        assert_eq!(p.crossing_edges(), eset(&[0, 1]));
        assert_eq!(p.to_cut().classify(), CutClass::Cutkosky);
        // Edgeless 3-forest of the dunce's cap: all edges cross (none are
        // self-loops).
        let p = GraphForestPair::new(dunce_cap(), EdgeSet::new()).unwrap();
        assert_eq!(p.crossing_edges(), eset(&[0, 1, 2, 3]));
    }

    #[test]
    fn round_trip_forest_cut() {
        // For every Cutkosky graph built from a forest, every compatible
        // forest rebuilds the same cut.
        for g in [tri(), dunce_cap(), bubble(), triangle_with_bubble()] {
            for size in 0..g.v() {
                for f in g.spanning_forests(g.v() - size) {
                    let pair = GraphForestPair::new(g.clone(), f.clone()).unwrap();
                    let cutg = pair.to_cut();
                    assert!(matches!(
                        cutg.classify(),
                        CutClass::Cutkosky | CutClass::Core
                    ));
                    let fs = cutg.compatible_forests();
                    assert!(fs.contains(&f));
                    for f2 in fs {
                        let pair2 = GraphForestPair::new(g.clone(), f2).unwrap();
                        assert_eq!(pair2.to_cut(), cutg);
                    }
                    // h₀(Γ̃) = h₀(F).
                    let hf = g
                        .vertex_components(&f)
                        .iter()
                        .collect::<BTreeSet<_>>()
                        .len();
                    assert_eq!(cutg.h0_tilde(), hf + g.circles);
                }
            }
        }
    }

    #[test]
    fn norm_grading_bounds() {
        for g in [tri(), dunce_cap(), theta()] {
            let loops = g.loops();
            for mask in 0u64..(1 << g.e()) {
                let cuts: EdgeSet =
                    (0..g.e()).filter(|i| mask >> i & 1 == 1).collect();
                let pc = PreCutGraph::new(g.clone(), cuts, BTreeMap::new()).unwrap();
                assert!(pc.norm() <= loops);
                if pc.cuts.is_empty() {
                    assert_eq!(pc.norm(), loops);
                } else {
                    assert!(pc.norm() < loops || pc.base.is_self_loop(*pc.cuts.iter().next().unwrap()));
                }
            }
        }
    }

    #[test]
    fn keys_distinguish_cut_structure() {
        let a = PreCutGraph::new(tri(), eset(&[0, 2]), BTreeMap::new()).unwrap();
        let b = PreCutGraph::new(tri(), eset(&[0, 1]), BTreeMap::new()).unwrap();
        let core = PreCutGraph::core(tri());
        assert_ne!(a.key(), b.key());
        assert_ne!(a.key(), core.key());
        // With unlabelled legs the two 1|23-type cuts... 0,2 isolates a;
        // 0,1 isolates b — related by relabeling legs.
        assert_eq!(a.key_unlabeled(), b.key_unlabeled());
        // Splitting a vertex changes the key even with identical cuts.
        let mut splits = BTreeMap::new();
        splits.insert(2usize, vec![vec![6, 7], vec![8]]);
        let c = PreCutGraph::new(tri(), eset(&[0, 2]), splits).unwrap();
        assert_ne!(c.key(), a.key());
    }
}
