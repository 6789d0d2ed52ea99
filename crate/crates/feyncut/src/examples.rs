//! Small worked-example graphs used throughout the tests and docs.
//!
//! Edge order in each constructor is the edge naming convention: the `i`-th
//! entry of [`Graph::edges`] is "e(i+1)".

use crate::graph::Graph;

/// The one-loop triangle `t`: three 3-valent vertices, edges
/// e1 = v1–v2, e2 = v2–v3, e3 = v3–v1, one leg per vertex.
pub fn triangle() -> Graph {
    Graph::validate(
        vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]],
        vec![(1, 4), (5, 7), (8, 2)],
        vec![0, 3, 6],
    )
    .unwrap()
}

/// The one-loop bubble: two 3-valent vertices joined by a double edge,
/// one leg per vertex.
pub fn bubble() -> Graph {
    Graph::validate(
        vec![vec![0, 1, 2], vec![3, 4, 5]],
        vec![(1, 4), (2, 5)],
        vec![0, 3],
    )
    .unwrap()
}

/// The Dunce's cap `dc`: two loops, four edges, three legs.  Vertices
/// x, y, z with e1 = x–y, e2 = x–z and the double edge e3, e4 = y–z;
/// x is 3-valent, y and z are 4-valent.  Its five spanning trees are
/// {e1,e2}, {e1,e3}, {e1,e4}, {e2,e3}, {e2,e4}.
pub fn dunce_cap() -> Graph {
    Graph::validate(
        vec![vec![0, 1, 2], vec![3, 4, 5, 6], vec![7, 8, 9, 10]],
        vec![(1, 4), (2, 8), (5, 9), (6, 10)],
        vec![0, 3, 7],
    )
    .unwrap()
}

/// The one-loop 2-point graph with a single self-loop on a 4-valent vertex
/// (the tadpole-shaped propagator primitive).
pub fn self_loop() -> Graph {
    Graph::validate(vec![vec![0, 1, 2, 3]], vec![(2, 3)], vec![0, 1]).unwrap()
}

/// The leg-less theta graph: two 3-valent vertices joined by a triple edge.
pub fn theta() -> Graph {
    Graph::validate(
        vec![vec![0, 1, 2], vec![3, 4, 5]],
        vec![(0, 3), (1, 4), (2, 5)],
        vec![],
    )
    .unwrap()
}

/// A two-loop 2-point graph: a cycle a–c–d–b–a with a bubble doubling the
/// c–d edge, so the bubble on (e2, e3) is a 2-leg subgraph sitting inside
/// an edge chain.  Edges: e1 = a–c, e2 = c–d, e3 = c–d, e4 = d–b, e5 = b–a.
pub fn triangle_with_bubble() -> Graph {
    Graph::validate(
        vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8], vec![9, 10, 11]],
        vec![(1, 6), (7, 9), (8, 10), (11, 4), (5, 2)],
        vec![0, 3],
    )
    .unwrap()
}

/// The two-loop sunset: two vertices joined by a triple edge, one leg each.
pub fn sunset() -> Graph {
    Graph::validate(
        vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]],
        vec![(1, 5), (2, 6), (3, 7)],
        vec![0, 4],
    )
    .unwrap()
}
