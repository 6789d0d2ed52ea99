//! Generation of connected bridgeless graphs up to isomorphism.
//!
//! Graphs are generated with exactly `n_ext` labelled external legs, loop
//! number between 1 and `loops_max`, and every valence drawn from a given
//! degree set.  Generation works at the multigraph level: distribute the
//! labelled legs over vertices, choose internal degree sequences, enumerate
//! symmetric adjacency matrices (with self-loops) by backtracking, and
//! deduplicate by canonical form.  Determinism comes from sorted canonical
//! keys; the per-matrix work is fanned out via [`crate::par`].

use std::collections::{BTreeMap, BTreeSet};

use crate::canon::{graph_aut, graph_key, CanonKey};
use crate::graph::Graph;

/// A generated graph together with its symmetry data.
#[derive(Debug, Clone)]
pub struct Generated {
    pub graph: Graph,
    /// `|Aut(Γ)|` with external legs fixed pointwise.
    pub aut: u64,
    pub key: CanonKey,
}

/// Enumerates every connected bridgeless graph with exactly `n_ext` labelled
/// legs, loop number in `1..=loops_max`, and all valences in `degrees` —
/// exactly once per isomorphism class (legs fixed pointwise), sorted by
/// canonical key.
pub fn enumerate_graphs(
    n_ext: usize,
    loops_max: usize,
    degrees: &BTreeSet<usize>,
) -> Vec<Generated> {
    let mut raw: Vec<Graph> = Vec::new();
    for loops in 1..=loops_max {
        let vmax = (n_ext + 2 * loops).saturating_sub(2).max(1);
        for v in 1..=vmax {
            let e = v - 1 + loops;
            for legs_at in leg_assignments(n_ext, v) {
                let leg_count: Vec<usize> =
                    (0..v).map(|i| legs_at.iter().filter(|&&x| x == i).count()).collect();
                for r in internal_degree_sequences(&leg_count, degrees, 2 * e) {
                    for adj in adjacency_matrices(&r) {
                        raw.push(build_graph(&legs_at, n_ext, &adj));
                    }
                }
            }
        }
    }
    let keyed = crate::par::map(raw, |g| {
        if g.is_connected() && g.is_bridgeless() {
            let key = graph_key(&g);
            Some((key, g))
        } else {
            None
        }
    });
    let mut seen: BTreeMap<CanonKey, Graph> = BTreeMap::new();
    for item in keyed.into_iter().flatten() {
        seen.entry(item.0).or_insert(item.1);
    }
    crate::par::map(seen.into_iter().collect(), |(key, graph)| {
        let aut = graph_aut(&graph);
        Generated { graph, aut, key }
    })
}

/// All maps from leg labels `0..n_ext` to vertices `0..v`.
fn leg_assignments(n_ext: usize, v: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n_ext {
        out = out
            .into_iter()
            .flat_map(|base| {
                (0..v).map(move |x| {
                    let mut b = base.clone();
                    b.push(x);
                    b
                })
            })
            .collect();
    }
    out
}

/// Internal degree sequences: per vertex `i`, `r_i = d − legs_i ≥ 0` for some
/// valence `d` in the degree set, with `Σ r_i` equal to the target.
fn internal_degree_sequences(
    leg_count: &[usize],
    degrees: &BTreeSet<usize>,
    total: usize,
) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        i: usize,
        leg_count: &[usize],
        degrees: &BTreeSet<usize>,
        left: isize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if i == leg_count.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for &d in degrees {
            if d < leg_count[i] {
                continue;
            }
            let r = d - leg_count[i];
            // Every vertex needs at least one internal half-edge to be part
            // of a connected graph with more than one vertex; with one
            // vertex, r may be 0 only if there are no loops to realize,
            // which the caller's totals rule out.
            if (r as isize) > left {
                continue;
            }
            cur.push(r);
            rec(i + 1, leg_count, degrees, left - r as isize, cur, out);
            cur.pop();
        }
    }
    rec(0, leg_count, degrees, total as isize, &mut cur, &mut out);
    out
}

/// Symmetric adjacency data realizing an internal degree sequence:
/// `s[i]` self-loops at vertex `i` and `a[i][j]` parallel edges (`i < j`).
struct Adjacency {
    s: Vec<usize>,
    a: Vec<Vec<usize>>,
}

fn adjacency_matrices(r: &[usize]) -> Vec<Adjacency> {
    let v = r.len();
    let mut out = Vec::new();
    // Remaining degree per vertex; fill vertices in order: for vertex i
    // choose self-loops, then multiplicities towards each j > i.
    fn rec(i: usize, rem: &mut Vec<usize>, s: &mut Vec<usize>, a: &mut Vec<Vec<usize>>, out: &mut Vec<Adjacency>) {
        let v = rem.len();
        if i == v {
            if rem.iter().all(|&x| x == 0) {
                out.push(Adjacency { s: s.clone(), a: a.clone() });
            }
            return;
        }
        // rem[i] must be fully consumed by self-loops and edges to j > i.
        fn fill(
            i: usize,
            j: usize,
            rem: &mut Vec<usize>,
            s: &mut Vec<usize>,
            a: &mut Vec<Vec<usize>>,
            out: &mut Vec<Adjacency>,
        ) {
            let v = rem.len();
            if rem[i] == 0 {
                rec(i + 1, rem, s, a, out);
                return;
            }
            if j == v {
                return;
            }
            if j == i {
                // Self-loops consume degree two at a time.
                let max = rem[i] / 2;
                for k in 0..=max {
                    s[i] = k;
                    rem[i] -= 2 * k;
                    fill(i, j + 1, rem, s, a, out);
                    rem[i] += 2 * k;
                    s[i] = 0;
                }
            } else {
                let max = rem[i].min(rem[j]);
                for k in 0..=max {
                    a[i][j] = k;
                    rem[i] -= k;
                    rem[j] -= k;
                    fill(i, j + 1, rem, s, a, out);
                    rem[i] += k;
                    rem[j] += k;
                    a[i][j] = 0;
                }
            }
        }
        fill(i, i, rem, s, a, out);
    }
    let mut rem = r.to_vec();
    let mut s = vec![0; v];
    let mut a = vec![vec![0; v]; v];
    rec(0, &mut rem, &mut s, &mut a, &mut out);
    out
}

/// Realizes the multigraph as a half-edge graph with legs labelled by order.
fn build_graph(legs_at: &[usize], n_ext: usize, adj: &Adjacency) -> Graph {
    let v = adj.s.len();
    let mut next: u32 = 0;
    let mut vertices: Vec<Vec<u32>> = vec![Vec::new(); v];
    let mut externals: Vec<u32> = Vec::with_capacity(n_ext);
    for &vi in legs_at.iter() {
        vertices[vi].push(next);
        externals.push(next);
        next += 1;
    }
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for i in 0..v {
        for _ in 0..adj.s[i] {
            vertices[i].push(next);
            vertices[i].push(next + 1);
            edges.push((next, next + 1));
            next += 2;
        }
        for j in (i + 1)..v {
            for _ in 0..adj.a[i][j] {
                vertices[i].push(next);
                vertices[j].push(next + 1);
                edges.push((next, next + 1));
                next += 2;
            }
        }
    }
    Graph::from_parts(vertices, edges, externals, 0)
}
