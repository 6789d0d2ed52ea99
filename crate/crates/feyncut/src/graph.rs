//! Half-edge graph kernel.
//!
//! A graph Γ is a finite set of half-edges `H_Γ` together with two partitions:
//! the *vertex* partition 𝒱_Γ whose parts (corollas) have cardinality ≥ 3, and
//! the *edge* partition ℰ_Γ whose parts have cardinality ≤ 2.  Parts of size 2
//! are internal edges `E_Γ`; parts of size 1 are external legs `L_Γ`, labelled
//! 1, 2, … by their order of appearance.  The loop number is
//! `|Γ| = e_Γ − v_Γ + h₀(Γ)`.
//!
//! Half-edge identifiers are stable under all derived operations (contraction,
//! deletion, subgraph extraction), which makes nested operations commute on the
//! nose and not merely up to isomorphism.
//!
//! Quotient graphs may temporarily violate the corolla-size constraint; the
//! constraint is enforced only when validating raw input.  Contracting every
//! edge of a leg-less cycle produces a vertex-free *circle* component, recorded
//! in [`Graph::circles`].

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{FeynError, Result};

/// Opaque half-edge identifier.
pub type HalfEdge = u32;

/// An internal-edge index into [`Graph::edges`].
pub type EdgeIx = usize;

/// A spanning tree or forest, as a set of internal-edge indices.
pub type EdgeSet = BTreeSet<EdgeIx>;

/// A half-edge graph: two partitions of a common half-edge set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Graph {
    /// Corollas: the parts of the vertex partition, each sorted.
    pub vertices: Vec<Vec<HalfEdge>>,
    /// Internal edges: size-2 parts of the edge partition, stored `(min, max)`.
    pub edges: Vec<(HalfEdge, HalfEdge)>,
    /// External legs in label order: `externals[i]` carries leg label `i + 1`.
    pub externals: Vec<HalfEdge>,
    /// Vertex-free loop components produced by contracting leg-less cycles.
    pub circles: usize,
}

impl Graph {
    /// Validates a raw description into a `Graph`, enforcing the partition
    /// constraints: every half-edge in exactly one corolla and exactly one
    /// edge part, corollas of size ≥ 3.  Leg labels are assigned by the order
    /// of `externals`.
    pub fn validate(
        vertices: Vec<Vec<HalfEdge>>,
        edges: Vec<(HalfEdge, HalfEdge)>,
        externals: Vec<HalfEdge>,
    ) -> Result<Graph> {
        let mut seen_v = BTreeSet::new();
        for part in &vertices {
            if part.len() < 3 {
                return Err(FeynError::SmallCorolla(part.len()));
            }
            for &h in part {
                if !seen_v.insert(h) {
                    return Err(FeynError::NonPartition(h.to_string(), "vertex"));
                }
            }
        }
        let mut seen_e = BTreeSet::new();
        for &(a, b) in &edges {
            if a == b {
                return Err(FeynError::BadEdgePart(1));
            }
            for h in [a, b] {
                if !seen_e.insert(h) {
                    return Err(FeynError::NonPartition(h.to_string(), "edge"));
                }
            }
        }
        for &h in &externals {
            if !seen_e.insert(h) {
                return Err(FeynError::NonPartition(h.to_string(), "edge"));
            }
        }
        if seen_v != seen_e {
            let h = seen_v
                .symmetric_difference(&seen_e)
                .next()
                .expect("sets differ");
            return Err(FeynError::NonPartition(h.to_string(), "vertex/edge"));
        }
        let mut g = Graph { vertices, edges, externals, circles: 0 };
        g.normalize();
        Ok(g)
    }

    /// Builds a graph without input validation (for quotients and generated
    /// graphs whose consistency is guaranteed by construction).
    pub fn from_parts(
        vertices: Vec<Vec<HalfEdge>>,
        edges: Vec<(HalfEdge, HalfEdge)>,
        externals: Vec<HalfEdge>,
        circles: usize,
    ) -> Graph {
        let mut g = Graph { vertices, edges, externals, circles };
        g.normalize();
        g
    }

    /// The empty graph 𝕀 (unit of the graph algebra).
    pub fn empty() -> Graph {
        Graph { vertices: vec![], edges: vec![], externals: vec![], circles: 0 }
    }

    fn normalize(&mut self) {
        for part in &mut self.vertices {
            part.sort_unstable();
        }
        for e in &mut self.edges {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
    }

    /// Number of half-edges.
    pub fn nh(&self) -> usize {
        2 * self.edges.len() + self.externals.len()
    }

    /// Number of internal edges `e_Γ`.
    pub fn e(&self) -> usize {
        self.edges.len()
    }

    /// Number of vertices `v_Γ`.
    pub fn v(&self) -> usize {
        self.vertices.len()
    }

    /// Number of external legs `l_Γ`.
    pub fn l(&self) -> usize {
        self.externals.len()
    }

    /// Valence of vertex `v` (size of its corolla).
    pub fn val(&self, v: usize) -> usize {
        self.vertices[v].len()
    }

    /// Map from half-edge to the index of its corolla.
    pub fn vertex_of(&self) -> BTreeMap<HalfEdge, usize> {
        let mut m = BTreeMap::new();
        for (i, part) in self.vertices.iter().enumerate() {
            for &h in part {
                m.insert(h, i);
            }
        }
        m
    }

    /// Endpoint vertex indices of internal edge `e` (equal for a self-loop).
    pub fn endpoints(&self, e: EdgeIx) -> (usize, usize) {
        let vo = self.vertex_of();
        let (a, b) = self.edges[e];
        (vo[&a], vo[&b])
    }

    /// Whether internal edge `e` is a self-loop.
    pub fn is_self_loop(&self, e: EdgeIx) -> bool {
        let (u, v) = self.endpoints(e);
        u == v
    }

    /// Connected-component index per vertex, using the given edge subset.
    /// Isolated vertices form their own components.
    pub fn vertex_components(&self, edge_subset: &EdgeSet) -> Vec<usize> {
        let vo = self.vertex_of();
        let mut uf = UnionFind::new(self.v());
        for &e in edge_subset {
            let (a, b) = self.edges[e];
            uf.union(vo[&a], vo[&b]);
        }
        uf.labels()
    }

    /// Number of connected components `h₀(Γ)` (vertex components plus circles).
    pub fn h0(&self) -> usize {
        let all: EdgeSet = (0..self.e()).collect();
        let labels = self.vertex_components(&all);
        let n = labels.iter().copied().collect::<BTreeSet<_>>().len();
        n + self.circles
    }

    /// Loop number `|Γ| = e_Γ − v_Γ + h₀(Γ)`.
    pub fn loops(&self) -> isize {
        self.e() as isize - self.v() as isize + self.h0() as isize
    }

    /// Whether the graph is connected (exactly one component).
    pub fn is_connected(&self) -> bool {
        self.h0() == 1 || (self.v() == 0 && self.e() == 0 && self.circles == 0)
    }

    /// Splits the edge part of `e` into two singletons: the cut graph `Γ − e`.
    /// The two half-edges become new external legs (labels appended in
    /// half-edge order); corollas are unchanged.
    pub fn delete_edge(&self, e: EdgeIx) -> Result<Graph> {
        if e >= self.e() {
            return Err(FeynError::NoSuchEdge(e));
        }
        let mut g = self.clone();
        let (a, b) = g.edges.remove(e);
        g.externals.push(a);
        g.externals.push(b);
        Ok(g)
    }

    /// Contracts a single internal edge (`Γ/e`).  A non-loop edge merges its
    /// two corollas and drops its two half-edges; a self-loop removes its two
    /// half-edges from the corolla.  With `elide` set, 2-valent vertices left
    /// behind are un-subdivided.
    pub fn contract_edge(&self, e: EdgeIx, elide: bool) -> Result<Graph> {
        if e >= self.e() {
            return Err(FeynError::NoSuchEdge(e));
        }
        let mut s = EdgeSet::new();
        s.insert(e);
        Ok(self.contract_edges(&s, elide))
    }

    /// Contracts every edge in `set` simultaneously (`Γ/X` for the edge set X).
    /// Equivalent to repeated single-edge contraction in any order.
    pub fn contract_edges(&self, set: &EdgeSet, elide: bool) -> Graph {
        let vo = self.vertex_of();
        let mut uf = UnionFind::new(self.v());
        let mut removed: BTreeSet<HalfEdge> = BTreeSet::new();
        for &e in set {
            let (a, b) = self.edges[e];
            uf.union(vo[&a], vo[&b]);
            removed.insert(a);
            removed.insert(b);
        }
        let labels = uf.labels();
        let nclasses = labels.iter().copied().collect::<BTreeSet<_>>().len();
        let mut class_of = BTreeMap::new();
        let mut vertices: Vec<Vec<HalfEdge>> = vec![Vec::new(); nclasses];
        for (i, part) in self.vertices.iter().enumerate() {
            let next = class_of.len();
            let c = *class_of.entry(labels[i]).or_insert(next);
            vertices[c].extend(part.iter().copied().filter(|h| !removed.contains(h)));
        }
        let edges: Vec<(HalfEdge, HalfEdge)> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !set.contains(i))
            .map(|(_, &p)| p)
            .collect();
        let mut g = Graph::from_parts(vertices, edges, self.externals.clone(), self.circles);
        if elide {
            g.elide_two_valent();
        }
        g
    }

    /// Un-subdivides every 2-valent vertex: its two half-edges disappear and
    /// their partner half-edges fuse to one edge (or the remaining leg moves
    /// to the partner half-edge).  A 2-valent vertex whose two half-edges form
    /// a self-loop becomes a vertex-free circle.  The result is independent of
    /// the elision order (confluence is asserted by test).
    pub fn elide_two_valent(&mut self) {
        'outer: loop {
            let vo = self.vertex_of();
            let partner: BTreeMap<HalfEdge, HalfEdge> = self
                .edges
                .iter()
                .flat_map(|&(a, b)| [(a, b), (b, a)])
                .collect();
            for (vi, part) in self.vertices.iter().enumerate() {
                if part.len() != 2 {
                    continue;
                }
                let (h1, h2) = (part[0], part[1]);
                let p1 = partner.get(&h1).copied();
                let p2 = partner.get(&h2).copied();
                match (p1, p2) {
                    (Some(p1), Some(_)) if p1 == h2 => {
                        // A self-loop on a 2-valent vertex: a circle.
                        self.edges.retain(|&(a, b)| (a, b) != (h1.min(h2), h1.max(h2)));
                        self.vertices.remove(vi);
                        self.circles += 1;
                        continue 'outer;
                    }
                    (Some(p1), Some(p2)) => {
                        self.edges.retain(|&(a, b)| a != h1 && b != h1 && a != h2 && b != h2);
                        self.edges.push((p1.min(p2), p1.max(p2)));
                        self.vertices.remove(vi);
                        continue 'outer;
                    }
                    (Some(p1), None) => {
                        // h2 is external: the leg moves to the partner of h1.
                        self.edges.retain(|&(a, b)| a != h1 && b != h1);
                        for l in &mut self.externals {
                            if *l == h2 {
                                *l = p1;
                            }
                        }
                        self.vertices.remove(vi);
                        continue 'outer;
                    }
                    (None, Some(p2)) => {
                        self.edges.retain(|&(a, b)| a != h2 && b != h2);
                        for l in &mut self.externals {
                            if *l == h1 {
                                *l = p2;
                            }
                        }
                        self.vertices.remove(vi);
                        continue 'outer;
                    }
                    (None, None) => {
                        // Two external legs on an isolated vertex: keep it.
                        let _ = vo;
                    }
                }
            }
            break;
        }
        self.normalize();
    }

    /// Whether the edge subset is acyclic (a forest).
    pub fn is_acyclic(&self, subset: &EdgeSet) -> bool {
        let vo = self.vertex_of();
        let mut uf = UnionFind::new(self.v());
        for &e in subset {
            let (a, b) = self.edges[e];
            if !uf.union(vo[&a], vo[&b]) {
                return false;
            }
        }
        true
    }

    /// All spanning trees of a connected graph, as edge sets.
    pub fn spanning_trees(&self) -> Result<Vec<EdgeSet>> {
        if !self.is_connected() || self.circles > 0 {
            return Err(FeynError::Disconnected);
        }
        Ok(self.spanning_forests(1))
    }

    /// All spanning k-forests: acyclic edge subsets whose vertex components
    /// (counting isolated vertices) number exactly `k`.
    pub fn spanning_forests(&self, k: usize) -> Vec<EdgeSet> {
        if self.v() == 0 {
            return if k == 0 { vec![EdgeSet::new()] } else { vec![] };
        }
        if self.v() < k {
            return vec![];
        }
        let size = self.v() - k;
        let mut out = Vec::new();
        for comb in combinations(self.e(), size) {
            let set: EdgeSet = comb.into_iter().collect();
            if self.is_acyclic(&set) {
                out.push(set);
            }
        }
        out
    }

    /// Spanning-tree count `spt(Γ)`, extended multiplicatively over
    /// components: the number of maximal acyclic edge subsets (one tree per
    /// vertex component).  Circles contribute a factor 1.
    pub fn spt(&self) -> usize {
        let all: EdgeSet = (0..self.e()).collect();
        let labels = self.vertex_components(&all);
        let k = labels.iter().copied().collect::<BTreeSet<_>>().len();
        self.spanning_forests(k).len().max(if self.v() == 0 { 1 } else { 0 })
    }

    /// `𝐬𝐩𝐭(Γ) = spt(Γ)·|Γ|!`.
    pub fn spt_bold(&self) -> usize {
        let l = self.loops().max(0) as usize;
        self.spt() * factorial(l)
    }

    /// The fundamental cycle `l(T, e)` of a non-tree edge: the unique cycle of
    /// `T ∪ {e}`, returned as an edge set containing `e`.  The tree path is
    /// `t_e = l(T,e) ∖ {e}`.
    pub fn fundamental_cycle(&self, tree: &EdgeSet, e: EdgeIx) -> Result<EdgeSet> {
        if tree.contains(&e) {
            return Err(FeynError::EdgeInTree(e));
        }
        let (u, v) = self.endpoints(e);
        let mut cyc = self.tree_path(tree, u, v);
        cyc.insert(e);
        Ok(cyc)
    }

    /// The unique path between vertices `u` and `v` inside the forest `tree`
    /// (empty if `u == v`; panics if they are not connected in the forest).
    pub fn tree_path(&self, tree: &EdgeSet, u: usize, v: usize) -> EdgeSet {
        if u == v {
            return EdgeSet::new();
        }
        // BFS over tree edges.
        let mut adj: Vec<Vec<(usize, EdgeIx)>> = vec![Vec::new(); self.v()];
        for &e in tree {
            let (a, b) = self.endpoints(e);
            adj[a].push((b, e));
            adj[b].push((a, e));
        }
        let mut prev: Vec<Option<(usize, EdgeIx)>> = vec![None; self.v()];
        let mut queue = std::collections::VecDeque::from([u]);
        let mut seen = vec![false; self.v()];
        seen[u] = true;
        while let Some(x) = queue.pop_front() {
            if x == v {
                break;
            }
            for &(y, e) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    prev[y] = Some((x, e));
                    queue.push_back(y);
                }
            }
        }
        let mut path = EdgeSet::new();
        let mut cur = v;
        while cur != u {
            let (p, e) = prev[cur].expect("u and v lie in the same tree");
            path.insert(e);
            cur = p;
        }
        path
    }

    /// Indices of bridge edges (edges whose deletion disconnects their
    /// component).  Self-loops are never bridges.
    pub fn bridges(&self) -> Vec<EdgeIx> {
        let all: EdgeSet = (0..self.e()).collect();
        (0..self.e())
            .filter(|&e| {
                let (u, v) = self.endpoints(e);
                if u == v {
                    return false;
                }
                let mut rest = all.clone();
                rest.remove(&e);
                let labels = self.vertex_components(&rest);
                labels[u] != labels[v]
            })
            .collect()
    }

    /// Whether the graph has no bridges.
    pub fn is_bridgeless(&self) -> bool {
        self.bridges().is_empty()
    }

    /// Whether the given edge subset, viewed as a subgraph on its touched
    /// vertices, has a bridge.
    pub fn subset_has_bridge(&self, subset: &EdgeSet) -> bool {
        for &e in subset {
            let (u, v) = self.endpoints(e);
            if u == v {
                continue;
            }
            let mut rest = subset.clone();
            rest.remove(&e);
            let labels = self.vertex_components(&rest);
            if labels[u] != labels[v] {
                return true;
            }
        }
        false
    }

    /// All subgraphs admissible in coproducts: nonempty internal-edge subsets
    /// whose induced subgraph (full at vertices) is bridgeless in every
    /// component.  Components automatically carry ≥ 1 internal edge.  Includes
    /// the full edge set; excludes the empty set.
    pub fn coproduct_subgraphs(&self) -> Vec<EdgeSet> {
        let mut out = Vec::new();
        let e = self.e();
        for mask in 1u64..(1u64 << e) {
            let set: EdgeSet = (0..e).filter(|i| mask >> i & 1 == 1).collect();
            if !self.subset_has_bridge(&set) {
                out.push(set);
            }
        }
        out
    }

    /// Touched vertices of an edge subset.
    pub fn touched_vertices(&self, subset: &EdgeSet) -> BTreeSet<usize> {
        let mut vs = BTreeSet::new();
        for &e in subset {
            let (u, v) = self.endpoints(e);
            vs.insert(u);
            vs.insert(v);
        }
        vs
    }

    /// Extracts the subgraph on an edge subset as a standalone graph: touched
    /// corollas in full; corolla half-edges not matched inside the subset
    /// become external legs.  Legs of Γ that survive come first (in Γ's label
    /// order), then cut-off half-edges in id order — a deterministic rule that
    /// restricts consistently to nested subgraphs.
    pub fn subgraph(&self, subset: &EdgeSet) -> Graph {
        let vs = self.touched_vertices(subset);
        let vertices: Vec<Vec<HalfEdge>> =
            vs.iter().map(|&v| self.vertices[v].clone()).collect();
        let edges: Vec<(HalfEdge, HalfEdge)> =
            subset.iter().map(|&e| self.edges[e]).collect();
        let inside: BTreeSet<HalfEdge> =
            edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        let all: BTreeSet<HalfEdge> =
            vertices.iter().flatten().copied().collect();
        let mut externals: Vec<HalfEdge> = self
            .externals
            .iter()
            .copied()
            .filter(|h| all.contains(h))
            .collect();
        let old_legs: BTreeSet<HalfEdge> = externals.iter().copied().collect();
        let mut stubs: Vec<HalfEdge> = all
            .iter()
            .copied()
            .filter(|h| !inside.contains(h) && !old_legs.contains(h))
            .collect();
        stubs.sort_unstable();
        externals.extend(stubs);
        Graph::from_parts(vertices, edges, externals, 0)
    }

    /// Splits the graph into its connected components, with bookkeeping:
    /// each entry carries the component graph, the original edge index per
    /// new edge, and the original vertex index per new vertex.  Leg labels
    /// restrict in original order.  Each circle becomes its own component
    /// (with empty maps), appended last.
    pub fn split_components_with_maps(
        &self,
    ) -> Vec<(Graph, Vec<EdgeIx>, Vec<usize>)> {
        let all: EdgeSet = (0..self.e()).collect();
        let labels = self.vertex_components(&all);
        let comps: Vec<usize> = {
            let mut seen = Vec::new();
            for &l in &labels {
                if !seen.contains(&l) {
                    seen.push(l);
                }
            }
            seen
        };
        let vo = self.vertex_of();
        let mut out = Vec::new();
        for comp in comps {
            let vmap: Vec<usize> =
                (0..self.v()).filter(|&v| labels[v] == comp).collect();
            let vset: BTreeSet<usize> = vmap.iter().copied().collect();
            let vertices: Vec<Vec<HalfEdge>> =
                vmap.iter().map(|&v| self.vertices[v].clone()).collect();
            let emap: Vec<EdgeIx> = (0..self.e())
                .filter(|&e| vset.contains(&vo[&self.edges[e].0]))
                .collect();
            let edges: Vec<(HalfEdge, HalfEdge)> =
                emap.iter().map(|&e| self.edges[e]).collect();
            let externals: Vec<HalfEdge> = self
                .externals
                .iter()
                .copied()
                .filter(|h| vset.contains(&vo[h]))
                .collect();
            out.push((Graph::from_parts(vertices, edges, externals, 0), emap, vmap));
        }
        for _ in 0..self.circles {
            out.push((Graph { vertices: vec![], edges: vec![], externals: vec![], circles: 1 }, vec![], vec![]));
        }
        out
    }

    /// Connected components as standalone graphs (see
    /// [`Self::split_components_with_maps`]).
    pub fn split_components(&self) -> Vec<Graph> {
        self.split_components_with_maps()
            .into_iter()
            .map(|(g, _, _)| g)
            .collect()
    }

    /// Contracts a full-at-vertices bridgeless subgraph (given by its edge
    /// set): all its internal edges shrink to zero length and 2-valent
    /// vertices are elided, so a 2-leg component's external half-edges
    /// disappear and their partners fuse to one edge (the co-graph `Γ/γ`).
    pub fn contract_subgraph(&self, subset: &EdgeSet) -> Result<Graph> {
        if self.subset_has_bridge(subset) {
            return Err(FeynError::BridgedSubgraph);
        }
        Ok(self.contract_edges(subset, true))
    }
}

/// `n!` as `usize` (desk-scale arguments).
pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// All `k`-element index combinations from `0..n`, in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Minimal union–find over `0..n`.
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }

    /// Returns `false` if the two elements were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }

    /// Component label (root) per element.
    pub fn labels(&mut self) -> Vec<usize> {
        (0..self.parent.len()).map(|x| self.find(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::*;

    #[test]
    fn triangle_counts() {
        let t = triangle();
        assert_eq!(t.v(), 3);
        assert_eq!(t.e(), 3);
        assert_eq!(t.l(), 3);
        assert_eq!(t.loops(), 1);
        assert!(t.is_connected());
        assert!(t.is_bridgeless());
    }

    #[test]
    fn validate_rejects_small_corolla() {
        let r = Graph::validate(vec![vec![0, 1]], vec![(0, 1)], vec![]);
        assert_eq!(r.unwrap_err(), FeynError::SmallCorolla(2));
    }

    #[test]
    fn validate_rejects_non_partition() {
        let r = Graph::validate(vec![vec![0, 1, 2]], vec![(0, 1)], vec![]);
        assert!(matches!(r.unwrap_err(), FeynError::NonPartition(..)));
    }

    #[test]
    fn empty_graph_is_unit() {
        let g = Graph::validate(vec![], vec![], vec![]).unwrap();
        assert_eq!(g.loops(), 0);
        assert_eq!(g, Graph::empty());
    }

    #[test]
    fn triangle_contract_gives_bubble() {
        let t = triangle();
        let b = t.contract_edge(0, true).unwrap();
        assert_eq!(b.v(), 2);
        assert_eq!(b.e(), 2);
        assert_eq!(b.l(), 3);
        assert_eq!(b.loops(), 1);
    }

    #[test]
    fn bubble_contract_gives_self_loop() {
        let b = bubble();
        let s = b.contract_edge(0, true).unwrap();
        assert_eq!(s.v(), 1);
        assert_eq!(s.e(), 1);
        assert_eq!(s.l(), 2);
        assert_eq!(s.loops(), 1);
        assert!(s.is_self_loop(0));
    }

    #[test]
    fn triangle_delete_edge() {
        let t = triangle();
        let p = t.delete_edge(0).unwrap();
        assert_eq!(p.l(), 5);
        assert_eq!(p.e(), 2);
        assert_eq!(p.h0(), 1);
        assert_eq!(p.loops(), 0);
    }

    #[test]
    fn cutting_both_bubble_edges_disconnects() {
        let b = bubble();
        let g = b.delete_edge(1).unwrap().delete_edge(0).unwrap();
        assert_eq!(g.h0(), 2);
    }

    #[test]
    fn spanning_trees_counts() {
        assert_eq!(triangle().spanning_trees().unwrap().len(), 3);
        assert_eq!(dunce_cap().spanning_trees().unwrap().len(), 5);
        assert_eq!(bubble().spanning_forests(2).len(), 1);
    }

    #[test]
    fn spt_values() {
        assert_eq!(triangle().spt(), 3);
        assert_eq!(triangle().spt_bold(), 3);
        assert_eq!(dunce_cap().spt(), 5);
        assert_eq!(dunce_cap().spt_bold(), 10);
        assert_eq!(bubble().spt(), 2);
    }

    #[test]
    fn fundamental_cycle_triangle() {
        let t = triangle();
        let tree: EdgeSet = [1, 2].into_iter().collect();
        let cyc = t.fundamental_cycle(&tree, 0).unwrap();
        assert_eq!(cyc, [0, 1, 2].into_iter().collect());
        assert!(t.fundamental_cycle(&tree, 1).is_err());
    }

    #[test]
    fn dunce_cap_subgraphs() {
        // Proper coproduct subgraphs of dc: the bubble (e3, e4) and the two
        // triangle cycles (e1, e2, e3) and (e1, e2, e4).
        let dc = dunce_cap();
        let subs = dc.coproduct_subgraphs();
        let proper: Vec<EdgeSet> =
            subs.into_iter().filter(|s| s.len() < dc.e()).collect();
        assert_eq!(
            proper,
            vec![
                [0, 1, 2].into_iter().collect::<EdgeSet>(),
                [0, 1, 3].into_iter().collect(),
                [2, 3].into_iter().collect(),
            ]
        );
    }

    #[test]
    fn dunce_cap_cograph_is_bubble() {
        let dc = dunce_cap();
        let sub: EdgeSet = [2, 3].into_iter().collect();
        let co = dc.contract_subgraph(&sub).unwrap();
        assert_eq!(co.v(), 2);
        assert_eq!(co.e(), 2);
        assert_eq!(co.l(), 3);
        assert_eq!(co.loops(), 1);
        // Contracting a triangle cycle instead leaves a self-loop tadpole.
        let cyc: EdgeSet = [0, 1, 2].into_iter().collect();
        let co = dc.contract_subgraph(&cyc).unwrap();
        assert_eq!((co.v(), co.e(), co.l(), co.loops()), (1, 1, 3, 1));
        assert!(co.is_self_loop(0));
    }

    #[test]
    fn contract_whole_triangle_is_single_vertex() {
        let t = triangle();
        let all: EdgeSet = (0..3).collect();
        let co = t.contract_subgraph(&all).unwrap();
        assert_eq!(co.v(), 1);
        assert_eq!(co.e(), 0);
        assert_eq!(co.l(), 3);
    }

    #[test]
    fn theta_cycle_contraction_makes_circle() {
        // Contracting a 2-edge cycle of the leg-less theta graph leaves one
        // self-loop on a 2-valent vertex, which elides to a circle.
        let theta = Graph::validate(
            vec![vec![0, 1, 2], vec![3, 4, 5]],
            vec![(0, 3), (1, 4), (2, 5)],
            vec![],
        )
        .unwrap();
        let set: EdgeSet = [0, 1].into_iter().collect();
        let c = theta.contract_edges(&set, true);
        assert_eq!(c.v(), 0);
        assert_eq!(c.circles, 1);
        assert_eq!(c.loops(), 1);
        // Without elision the self-loop stays.
        let c2 = theta.contract_edges(&set, false);
        assert_eq!(c2.v(), 1);
        assert_eq!(c2.e(), 1);
        assert_eq!(c2.loops(), 1);
    }

    #[test]
    fn self_energy_contraction_restores_edge() {
        // Contracting a 2-leg subgraph sitting inside an edge chain fuses
        // the two outer half-edges back to a single edge.
        let g = triangle_with_bubble();
        let sub: EdgeSet = [1, 2].into_iter().collect();
        let co = g.contract_subgraph(&sub).unwrap();
        assert_eq!(co.v(), 2);
        assert_eq!(co.e(), 2);
        assert_eq!(co.loops(), 1);
    }

    #[test]
    fn bridges_detected() {
        // Two triangles joined by a bridge edge.
        let g = Graph::validate(
            vec![
                vec![0, 1, 2],
                vec![3, 4, 5],
                vec![6, 7, 8],
                vec![9, 10, 11],
            ],
            vec![(0, 3), (1, 4), (5, 6), (7, 9), (8, 10)],
            vec![2, 11],
        )
        .unwrap();
        assert_eq!(g.bridges(), vec![2]);
        assert!(!g.is_bridgeless());
    }
}
