//! Canonical forms and automorphism counting.
//!
//! All graph flavours (core graphs, pre-cut graphs, graph–forest pairs) are
//! reduced to a common *decorated* multigraph: one node per split part of a
//! corolla, a `group` identifying which parts belong to the same original
//! vertex, external leg labels attached to nodes, and an integer colour per
//! edge (encoding cut / forest membership).  Half-edges inside a part carry no
//! further data, so a decorated-multigraph isomorphism is exactly a half-edge
//! bijection preserving both partitions (and decorations) — and conversely.
//!
//! Canonicalization is brute force over node orderings, pre-pruned by a
//! Weisfeiler–Leman-style invariant refinement; this is adequate at desk scale
//! (≤ 8 vertices) and keeps the kernel free of external canonical-labelling
//! dependencies.  `|Aut(Γ)|` counts half-edge bijections fixing external legs
//! pointwise: per node bijection, parallel edges of equal colour contribute
//! `m!` matchings and each self-loop contributes an extra flip, giving
//! `Π m_c! · Π s_c!·2^{s_c}`.

use std::collections::BTreeMap;

use crate::graph::Graph;

/// A node of the decorated multigraph: one split part of one corolla.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecNode {
    /// Sorted external leg labels attached to this part.
    pub legs: Vec<u32>,
    /// Index of the original vertex this part belongs to.
    pub group: usize,
}

/// Decorated multigraph: the common substrate for canonical forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecGraph {
    pub nodes: Vec<DecNode>,
    /// Edges as `(node, node, colour)` with node indices unordered.
    pub edges: Vec<(usize, usize, u8)>,
    /// Vertex-free loop components.
    pub circles: usize,
}

/// A totally ordered canonical key; equal keys mean isomorphic decorated
/// graphs (with external legs fixed pointwise).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonKey(pub Vec<i64>);

impl DecGraph {
    /// Builds the decorated graph of a plain [`Graph`] with the given edge
    /// colours (`colors[i]` decorates `edges[i]`; pass all zeros for none).
    pub fn of_graph(g: &Graph, colors: &[u8]) -> DecGraph {
        assert_eq!(colors.len(), g.e());
        let vo = g.vertex_of();
        let mut nodes: Vec<DecNode> = (0..g.v())
            .map(|i| DecNode { legs: Vec::new(), group: i })
            .collect();
        for (i, h) in g.externals.iter().enumerate() {
            nodes[vo[h]].legs.push(i as u32 + 1);
        }
        for n in &mut nodes {
            n.legs.sort_unstable();
        }
        let edges = g
            .edges
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| (vo[&a], vo[&b], colors[i]))
            .collect();
        DecGraph { nodes, edges, circles: g.circles }
    }

    /// Edge multiplicity table: `(min, max, colour) -> count`.
    fn mults(&self) -> BTreeMap<(usize, usize, u8), usize> {
        let mut m = BTreeMap::new();
        for &(a, b, c) in &self.edges {
            *m.entry((a.min(b), a.max(b), c)).or_insert(0) += 1;
        }
        m
    }

    /// Iteratively refined node invariant classes (Aut-invariant).
    fn classes(&self) -> Vec<usize> {
        let n = self.nodes.len();
        let mults = self.mults();
        // Round 0: legs, group size, per-colour degree and self-loop count.
        let mut group_size: BTreeMap<usize, usize> = BTreeMap::new();
        for nd in &self.nodes {
            *group_size.entry(nd.group).or_insert(0) += 1;
        }
        let mut inv: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                let mut v: Vec<i64> =
                    self.nodes[i].legs.iter().map(|&l| l as i64).collect();
                v.push(-1);
                v.push(group_size[&self.nodes[i].group] as i64);
                let mut degs: Vec<(i64, i64)> = Vec::new();
                for (&(a, b, c), &m) in &mults {
                    if a == i && b == i {
                        degs.push((c as i64, -(m as i64)));
                    } else if a == i || b == i {
                        degs.push((c as i64, m as i64));
                    }
                }
                degs.sort_unstable();
                for (c, m) in degs {
                    v.push(c);
                    v.push(m);
                }
                v
            })
            .collect();
        let mut classes = rank(&inv);
        // WL refinement until stable.
        loop {
            inv = (0..n)
                .map(|i| {
                    let mut v = vec![classes[i] as i64];
                    let mut nb: Vec<(i64, i64)> = self
                        .edges
                        .iter()
                        .flat_map(|&(a, b, c)| {
                            let mut out = Vec::new();
                            if a == i {
                                out.push((c as i64, classes[b] as i64));
                            }
                            if b == i {
                                out.push((c as i64, classes[a] as i64));
                            }
                            out
                        })
                        .collect();
                    nb.sort_unstable();
                    for (c, k) in nb {
                        v.push(c);
                        v.push(k);
                    }
                    v
                })
                .collect();
            let next = rank(&inv);
            if next == classes {
                return classes;
            }
            classes = next;
        }
    }

    /// Nodes bucketed by invariant class, buckets in class order.
    fn buckets(&self) -> Vec<Vec<usize>> {
        let classes = self.classes();
        let mut buckets: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &c) in classes.iter().enumerate() {
            buckets.entry(c).or_default().push(i);
        }
        buckets.into_values().collect()
    }

    /// Generates all node orderings compatible with the invariant classes and
    /// calls `f` with each position assignment (`perm[position] = node`).
    /// Position `k` always draws from the same class bucket as the `k`-th
    /// entry of the concatenated buckets.
    fn for_each_ordering(&self, mut f: impl FnMut(&[usize])) {
        let n = self.nodes.len();
        let buckets = self.buckets();
        let mut perm: Vec<usize> = Vec::with_capacity(n);
        fn rec(
            buckets: &[Vec<usize>],
            bi: usize,
            used: &mut Vec<bool>,
            perm: &mut Vec<usize>,
            f: &mut impl FnMut(&[usize]),
        ) {
            if bi == buckets.len() {
                f(perm);
                return;
            }
            // All arrangements of bucket bi.
            fn arrange(
                bucket: &[usize],
                buckets: &[Vec<usize>],
                bi: usize,
                used: &mut Vec<bool>,
                perm: &mut Vec<usize>,
                left: usize,
                f: &mut impl FnMut(&[usize]),
            ) {
                if left == 0 {
                    rec(buckets, bi + 1, used, perm, f);
                    return;
                }
                for &x in bucket {
                    if !used[x] {
                        used[x] = true;
                        perm.push(x);
                        arrange(bucket, buckets, bi, used, perm, left - 1, f);
                        perm.pop();
                        used[x] = false;
                    }
                }
            }
            arrange(&buckets[bi], buckets, bi, used, perm, buckets[bi].len(), f);
        }
        let mut used = vec![false; n];
        rec(&buckets, 0, &mut used, &mut perm, &mut f);
    }

    /// Encoding of the decorated graph under a node ordering.
    fn encode(&self, perm: &[usize]) -> Vec<i64> {
        let n = self.nodes.len();
        let mut pos = vec![0usize; n];
        for (p, &nd) in perm.iter().enumerate() {
            pos[nd] = p;
        }
        let mut out: Vec<i64> = vec![self.circles as i64, n as i64];
        // Group pattern, relabelled by first occurrence.
        let mut gmap: BTreeMap<usize, i64> = BTreeMap::new();
        for &nd in perm {
            let next = gmap.len() as i64;
            let gid = *gmap.entry(self.nodes[nd].group).or_insert(next);
            out.push(gid);
        }
        for &nd in perm {
            out.push(-2);
            out.extend(self.nodes[nd].legs.iter().map(|&l| l as i64));
        }
        let mut es: Vec<(i64, i64, i64)> = self
            .edges
            .iter()
            .map(|&(a, b, c)| {
                let (x, y) = (pos[a].min(pos[b]), pos[a].max(pos[b]));
                (x as i64, y as i64, c as i64)
            })
            .collect();
        es.sort_unstable();
        out.push(-3);
        for (x, y, c) in es {
            out.push(x);
            out.push(y);
            out.push(c);
        }
        out
    }

    /// The canonical key: minimal encoding over admissible node orderings.
    pub fn canonical_key(&self) -> CanonKey {
        let mut best: Option<Vec<i64>> = None;
        self.for_each_ordering(|perm| {
            let enc = self.encode(perm);
            if best.as_ref().map_or(true, |b| enc < *b) {
                best = Some(enc);
            }
        });
        CanonKey(best.unwrap_or_else(|| vec![self.circles as i64, 0]))
    }

    /// `|Aut|`: the number of half-edge bijections fixing external legs
    /// pointwise and preserving both partitions and all decorations.
    pub fn aut_order(&self) -> u64 {
        let mults = self.mults();
        let base: Vec<usize> = self.buckets().into_iter().flatten().collect();
        let mut count: u64 = 0;
        self.for_each_ordering(|perm| {
            // The class-preserving bijection candidate sends base[k] to
            // perm[k]; all within-class bijections arise this way.
            let mut sigma = vec![0usize; self.nodes.len()];
            for (k, &nd) in base.iter().enumerate() {
                sigma[nd] = perm[k];
            }
            let sigma = &sigma;
            // Legs fixed pointwise.
            for (i, &si) in sigma.iter().enumerate() {
                if self.nodes[i].legs != self.nodes[si].legs {
                    return;
                }
            }
            // Group partition preserved.
            let n = self.nodes.len();
            for i in 0..n {
                for j in (i + 1)..n {
                    let same = self.nodes[i].group == self.nodes[j].group;
                    let same_img =
                        self.nodes[sigma[i]].group == self.nodes[sigma[j]].group;
                    if same != same_img {
                        return;
                    }
                }
            }
            // Edge multiplicities preserved.
            for (&(a, b, c), &m) in &mults {
                let (x, y) = (sigma[a].min(sigma[b]), sigma[a].max(sigma[b]));
                if mults.get(&(x, y, c)).copied().unwrap_or(0) != m {
                    return;
                }
            }
            // Matchings realizing this node bijection.
            let mut w: u64 = 1;
            for (&(a, b, _c), &m) in &mults {
                if a == b {
                    w *= fact(m) << m;
                } else {
                    w *= fact(m);
                }
            }
            count += w;
        });
        count.max(1)
    }
}

fn fact(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Dense ranking of rows by sorted order (equal rows share a rank).
fn rank(rows: &[Vec<i64>]) -> Vec<usize> {
    let mut sorted: Vec<&Vec<i64>> = rows.iter().collect();
    sorted.sort();
    sorted.dedup();
    rows.iter()
        .map(|r| sorted.binary_search(&r).expect("row present"))
        .collect()
}

/// Canonical key of a plain graph with external legs fixed pointwise.
pub fn graph_key(g: &Graph) -> CanonKey {
    DecGraph::of_graph(g, &vec![0; g.e()]).canonical_key()
}

/// Canonical key of a plain graph with *unlabelled* legs: minimized over all
/// relabelings of the external legs.
pub fn graph_key_unlabeled(g: &Graph) -> CanonKey {
    colored_key_unlabeled(g, &vec![0; g.e()])
}

/// Canonical key with edge colours, legs fixed pointwise.
pub fn colored_key(g: &Graph, colors: &[u8]) -> CanonKey {
    DecGraph::of_graph(g, colors).canonical_key()
}

/// Canonical key with edge colours, minimized over leg relabelings.
pub fn colored_key_unlabeled(g: &Graph, colors: &[u8]) -> CanonKey {
    let l = g.l();
    if l <= 1 {
        return colored_key(g, colors);
    }
    let mut best: Option<CanonKey> = None;
    permute_each(l, |perm| {
        let mut h = g.clone();
        // Reorder externals so that old leg at position i gets label perm[i]+1.
        let mut ext = vec![0; l];
        for (i, &he) in g.externals.iter().enumerate() {
            ext[perm[i]] = he;
        }
        h.externals = ext;
        let key = DecGraph::of_graph(&h, colors).canonical_key();
        if best.as_ref().map_or(true, |b| key < *b) {
            best = Some(key);
        }
    });
    best.unwrap()
}

/// `|Aut|` of a plain graph (legs labelled).
pub fn graph_aut(g: &Graph) -> u64 {
    DecGraph::of_graph(g, &vec![0; g.e()]).aut_order()
}

/// Calls `f` with every permutation of `0..n` (`perm[i]` = image of `i`).
pub fn permute_each(n: usize, mut f: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    // Heap's algorithm, iterative.
    let mut c = vec![0usize; n];
    f(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            f(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::*;
    use crate::graph::Graph;

    #[test]
    fn aut_orders() {
        assert_eq!(graph_aut(&bubble()), 2);
        assert_eq!(graph_aut(&triangle()), 1);
        assert_eq!(graph_aut(&self_loop()), 2);
        assert_eq!(graph_aut(&theta()), 12); // 3! edge matchings × vertex swap
        assert_eq!(graph_aut(&sunset()), 6); // legs pin the two vertices
        assert_eq!(graph_aut(&dunce_cap()), 2);
    }

    #[test]
    fn canonical_forms_detect_isomorphism() {
        // The same triangle with different half-edge names and corolla order.
        let t2 = Graph::validate(
            vec![vec![10, 11, 12], vec![20, 21, 22], vec![30, 31, 32]],
            vec![(12, 30), (11, 21), (22, 31)],
            vec![10, 20, 32],
        )
        .unwrap();
        assert_eq!(graph_key(&triangle()), graph_key(&t2));
        assert_ne!(graph_key(&triangle()), graph_key(&bubble()));
    }

    #[test]
    fn labels_matter_when_fixed() {
        // A bubble with a tadpole on one side: swapping the two legs gives a
        // non-isomorphic labelled graph but the same unlabelled class.
        let g1 = Graph::validate(
            vec![vec![0, 1, 2], vec![3, 4, 5, 6, 7]],
            vec![(1, 4), (2, 5), (6, 7)],
            vec![0, 3],
        )
        .unwrap();
        let g2 = Graph::validate(
            vec![vec![0, 1, 2], vec![3, 4, 5, 6, 7]],
            vec![(1, 4), (2, 5), (6, 7)],
            vec![3, 0],
        )
        .unwrap();
        assert_ne!(graph_key(&g1), graph_key(&g2));
        assert_eq!(graph_key_unlabeled(&g1), graph_key_unlabeled(&g2));
    }

    #[test]
    fn edge_colors_distinguish() {
        let t = triangle();
        assert_ne!(colored_key(&t, &[1, 0, 0]), colored_key(&t, &[0, 0, 1]));
        // But the triangle has a symmetry only with unlabelled legs.
        assert_eq!(
            colored_key_unlabeled(&t, &[1, 0, 0]),
            colored_key_unlabeled(&t, &[0, 0, 1])
        );
    }

    #[test]
    fn canonicalization_idempotent_burnside() {
        // Burnside cross-check: number of distinct labelled copies equals
        // (number of admissible relabelings) / |Aut| for the bubble: the two
        // internal edges can be matched in 2 ways, both giving the same graph.
        let b = bubble();
        assert_eq!(graph_key(&b), graph_key(&b));
        assert_eq!(graph_aut(&b), 2);
    }
}
