//! One-loop necklaces: cyclic words describing the one-loop primitive
//! graphs, with or without cut decorations.
//!
//! A necklace alternates vertex letters and edge letters around a single
//! cycle.  An uncut vertex is written as the number of legs it carries; a
//! vertex whose corolla is split into parts is written as one number per
//! part, with the parts containing the two internal half-edges first and
//! last.  Edge letters are `u` (uncut) and `c` (cut).  Words are read up to
//! cyclic rotation only: reflections are distinct necklaces.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::cut::PreCutGraph;
use crate::error::{FeynError, Result};
use crate::graph::{EdgeSet, Graph, HalfEdge};

/// An unlabeled necklace word.  Each item is a vertex (leg counts per
/// part; a single part means an unsplit vertex) together with the flag of
/// the edge that follows it (`true` = cut).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    items: Vec<(Vec<usize>, bool)>,
}

/// Minimal rotation of a sequence; `flip_single` additionally identifies
/// the two readings of a one-vertex word, whose self-loop does not
/// distinguish a first from a last part.
fn canonical_cycle<T: Clone + Ord>(items: Vec<T>, flip: Option<Vec<T>>) -> Vec<T> {
    let mut best = items.clone();
    for r in 1..items.len() {
        let mut rot = items.clone();
        rot.rotate_left(r);
        if rot < best {
            best = rot;
        }
    }
    if let Some(f) = flip {
        if f < best {
            best = f;
        }
    }
    best
}

impl Word {
    /// Builds a word and puts it in canonical (minimal-rotation) form.
    pub fn new(items: Vec<(Vec<usize>, bool)>) -> Word {
        assert!(!items.is_empty(), "empty necklace word");
        let flip = if items.len() == 1 {
            let (parts, cut) = &items[0];
            let mut rev = parts.clone();
            rev.reverse();
            Some(vec![(rev, *cut)])
        } else {
            None
        };
        Word { items: canonical_cycle(items, flip) }
    }

    /// The alternating vertex/edge items.
    pub fn items(&self) -> &[(Vec<usize>, bool)] {
        &self.items
    }

    /// Number of vertices (= number of edges) on the cycle.
    pub fn len(&self) -> usize {
        self.items.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Total number of legs.
    pub fn n_legs(&self) -> usize {
        self.items.iter().map(|(p, _)| p.iter().sum::<usize>()).sum()
    }

    /// Whether any edge is cut or any vertex split.
    pub fn has_decorations(&self) -> bool {
        self.items.iter().any(|(p, c)| *c || p.len() > 1)
    }

    /// Parses a word such as `1u01u10u` or `c1c1`.  Every digit is one
    /// part of a vertex letter; `u` and `c` are edge letters.  The string
    /// may start at any point of the cycle.
    pub fn parse(s: &str) -> Result<Word> {
        #[derive(Clone, PartialEq)]
        enum Tok {
            Vertex(Vec<usize>),
            Edge(bool),
        }
        let mut toks: Vec<Tok> = Vec::new();
        for ch in s.chars() {
            match ch {
                '0'..='9' => {
                    let d = ch as usize - '0' as usize;
                    if let Some(Tok::Vertex(parts)) = toks.last_mut() {
                        parts.push(d);
                    } else {
                        toks.push(Tok::Vertex(vec![d]));
                    }
                }
                'u' => toks.push(Tok::Edge(false)),
                'c' => toks.push(Tok::Edge(true)),
                _ => {
                    return Err(FeynError::Invalid(format!(
                        "bad necklace letter {ch:?}"
                    )))
                }
            }
        }
        if toks.is_empty() {
            return Err(FeynError::Invalid("empty necklace word".into()));
        }
        // Rotate so the string starts on a vertex letter, merging a vertex
        // letter wrapped around the end of the string.
        if let Some(Tok::Edge(_)) = toks.first() {
            let pos = toks
                .iter()
                .position(|t| matches!(t, Tok::Vertex(_)))
                .ok_or_else(|| FeynError::Invalid("no vertex letter".into()))?;
            toks.rotate_left(pos);
        } else if toks.len() >= 2 && matches!(toks.last(), Some(Tok::Vertex(_))) {
            // Leading and trailing digits belong to the same vertex letter.
            if let Tok::Vertex(tail) = toks.pop().unwrap() {
                if let Tok::Vertex(head) = &mut toks[0] {
                    let mut merged = tail;
                    merged.extend(head.iter().copied());
                    *head = merged;
                }
            }
        }
        if toks.len() % 2 != 0 {
            return Err(FeynError::Invalid("unbalanced necklace word".into()));
        }
        let mut items = Vec::new();
        for pair in toks.chunks(2) {
            match (&pair[0], &pair[1]) {
                (Tok::Vertex(p), Tok::Edge(c)) => items.push((p.clone(), *c)),
                _ => {
                    return Err(FeynError::Invalid(
                        "necklace word must alternate vertices and edges".into(),
                    ))
                }
            }
        }
        Ok(Word::new(items))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (parts, cut) in &self.items {
            for p in parts {
                write!(f, "{p}")?;
            }
            write!(f, "{}", if *cut { 'c' } else { 'u' })?;
        }
        Ok(())
    }
}

/// A leg-labeled necklace: vertex parts hold the 1-based labels of the
/// legs they carry.  Canonical up to rotation; for one-vertex necklaces
/// also up to the choice of reading direction of the self-loop.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Necklace {
    items: Vec<(Vec<Vec<u32>>, bool)>,
}

impl Necklace {
    /// Builds a labeled necklace in canonical form.  Leg label sets are
    /// sorted within each part.
    pub fn new(items: Vec<(Vec<Vec<u32>>, bool)>) -> Necklace {
        assert!(!items.is_empty(), "empty necklace");
        let items: Vec<(Vec<Vec<u32>>, bool)> = items
            .into_iter()
            .map(|(parts, cut)| {
                (
                    parts
                        .into_iter()
                        .map(|mut p| {
                            p.sort_unstable();
                            p
                        })
                        .collect(),
                    cut,
                )
            })
            .collect();
        let flip = if items.len() == 1 {
            let (parts, cut) = &items[0];
            let mut rev = parts.clone();
            rev.reverse();
            Some(vec![(rev, *cut)])
        } else {
            None
        };
        Necklace { items: canonical_cycle(items, flip) }
    }

    pub fn items(&self) -> &[(Vec<Vec<u32>>, bool)] {
        &self.items
    }

    /// Forgets the leg labels.
    pub fn word(&self) -> Word {
        Word::new(
            self.items
                .iter()
                .map(|(parts, cut)| (parts.iter().map(Vec::len).collect(), *cut))
                .collect(),
        )
    }

    pub fn n_legs(&self) -> usize {
        self.items
            .iter()
            .map(|(p, _)| p.iter().map(Vec::len).sum::<usize>())
            .sum()
    }

    /// Realizes the necklace as a one-loop pre-cut graph.  The legs are
    /// ordered by their labels, which must be exactly `1..=n`.
    pub fn realize(&self) -> Result<PreCutGraph> {
        let k = self.items.len();
        let mut labels: BTreeSet<u32> = BTreeSet::new();
        for (parts, _) in &self.items {
            for part in parts {
                for &l in part {
                    if l == 0 || !labels.insert(l) {
                        return Err(FeynError::Invalid(format!(
                            "bad leg label {l}"
                        )));
                    }
                }
            }
        }
        let n = labels.len() as u32;
        if !labels.iter().copied().eq(1..=n) {
            return Err(FeynError::Invalid("leg labels must be 1..=n".into()));
        }

        let mut vertices: Vec<Vec<HalfEdge>> = Vec::new();
        let mut ext: Vec<(u32, HalfEdge)> = Vec::new();
        let mut splits: BTreeMap<usize, Vec<Vec<HalfEdge>>> = BTreeMap::new();
        let mut h_in = vec![0u32; k];
        let mut h_out = vec![0u32; k];
        let mut next: HalfEdge = 0;
        for (i, (parts, _)) in self.items.iter().enumerate() {
            h_in[i] = next;
            next += 1;
            let mut corolla = vec![h_in[i]];
            let mut split: Vec<Vec<HalfEdge>> = Vec::new();
            for (j, part) in parts.iter().enumerate() {
                let mut sp = if j == 0 { vec![h_in[i]] } else { Vec::new() };
                for &label in part {
                    corolla.push(next);
                    ext.push((label, next));
                    sp.push(next);
                    next += 1;
                }
                split.push(sp);
            }
            h_out[i] = next;
            next += 1;
            corolla.push(h_out[i]);
            split.last_mut().unwrap().push(h_out[i]);
            vertices.push(corolla);
            if parts.len() > 1 {
                splits.insert(i, split);
            }
        }
        let mut edges = Vec::new();
        let mut cuts = EdgeSet::new();
        for i in 0..k {
            edges.push((h_out[i], h_in[(i + 1) % k]));
            if self.items[i].1 {
                cuts.insert(i);
            }
        }
        ext.sort_unstable();
        let externals: Vec<HalfEdge> = ext.into_iter().map(|(_, h)| h).collect();
        let base = Graph::validate(vertices, edges, externals)?;
        PreCutGraph::new(base, cuts, splits)
    }
}

impl fmt::Display for Necklace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (parts, cut) in &self.items {
            for (j, part) in parts.iter().enumerate() {
                if j > 0 {
                    write!(f, ".")?;
                }
                write!(f, "(")?;
                for (i, l) in part.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{l}")?;
                }
                write!(f, ")")?;
            }
            write!(f, "{}", if *cut { 'c' } else { 'u' })?;
        }
        Ok(())
    }
}

/// All core (uncut, unsplit) one-loop necklaces with `n` legs: the
/// compositions of `n` into at least one positive part, up to rotation.
pub fn necklaces_core(n: usize) -> Vec<Word> {
    fn rec(rem: usize, comp: &mut Vec<usize>, out: &mut BTreeSet<Word>) {
        if rem == 0 {
            if !comp.is_empty() {
                out.insert(Word::new(
                    comp.iter().map(|&c| (vec![c], false)).collect(),
                ));
            }
            return;
        }
        for c in 1..=rem {
            comp.push(c);
            rec(rem - c, comp, out);
            comp.pop();
        }
    }
    let mut out = BTreeSet::new();
    rec(n, &mut Vec::new(), &mut out);
    out.into_iter().collect()
}

/// All binary cyclic words of the given length, up to rotation.
pub fn binary_necklaces(len: usize) -> Vec<Vec<u8>> {
    let mut out: BTreeSet<Vec<u8>> = BTreeSet::new();
    for mask in 0u64..(1u64 << len) {
        let word: Vec<u8> = (0..len).map(|i| ((mask >> i) & 1) as u8).collect();
        out.insert(canonical_cycle(word, None));
    }
    out.into_iter().collect()
}

/// All leg-labeled pre-Cutkosky necklaces compatible with the given
/// partition of external legs: the realization must be pre-Cutkosky and
/// its components after performing the cut must induce exactly the
/// partition of the labels `1..=n` into consecutive blocks of the given
/// sizes.  Split vertices are restricted to two parts, each containing one
/// internal half-edge, so that every realization is normal.
pub fn necklaces_cut(p: &[usize]) -> Vec<Necklace> {
    assert!(!p.is_empty() && p.iter().all(|&s| s > 0), "bad leg partition");
    let n: usize = p.iter().sum();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut next = 1usize;
    for &size in p {
        blocks.push((next..next + size).collect());
        next += size;
    }
    blocks.sort();

    let mut out: BTreeSet<Necklace> = BTreeSet::new();
    for k in 1..=n {
        let mut shapes: Vec<Vec<Vec<Vec<u32>>>> = Vec::new();
        distribute(&(1..=n as u32).collect::<Vec<u32>>(), k, &mut Vec::new(), &mut shapes);
        for shape in shapes {
            for flags in 0u32..(1u32 << k) {
                let items: Vec<(Vec<Vec<u32>>, bool)> = shape
                    .iter()
                    .enumerate()
                    .map(|(i, parts)| (parts.clone(), (flags >> i) & 1 == 1))
                    .collect();
                let neck = Necklace::new(items);
                if out.contains(&neck) {
                    continue;
                }
                let pcg = neck.realize().expect("necklace realization");
                if !pcg.is_pre_cutkosky() {
                    continue;
                }
                let (parts, legless) = pcg.leg_partition();
                if legless == 0 && parts == blocks {
                    out.insert(neck);
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Distributes the remaining labels over `k_left` more vertices, choosing
/// for each vertex a nonempty label set and either no split or a split
/// into an ordered pair of (possibly empty) leg sets.
fn distribute(
    remaining: &[u32],
    k_left: usize,
    acc: &mut Vec<Vec<Vec<u32>>>,
    out: &mut Vec<Vec<Vec<Vec<u32>>>>,
) {
    if k_left == 0 {
        if remaining.is_empty() {
            out.push(acc.clone());
        }
        return;
    }
    if remaining.len() < k_left {
        return;
    }
    let m = remaining.len();
    for mask in 1u32..(1u32 << m) {
        let mine: Vec<u32> = (0..m)
            .filter(|i| (mask >> i) & 1 == 1)
            .map(|i| remaining[i])
            .collect();
        let rest: Vec<u32> = (0..m)
            .filter(|i| (mask >> i) & 1 == 0)
            .map(|i| remaining[i])
            .collect();
        // Unsplit vertex.
        acc.push(vec![mine.clone()]);
        distribute(&rest, k_left - 1, acc, out);
        acc.pop();
        // Split vertex: every ordered bipartition of its legs.
        let mm = mine.len();
        for sub in 0u32..(1u32 << mm) {
            let first: Vec<u32> = (0..mm)
                .filter(|i| (sub >> i) & 1 == 1)
                .map(|i| mine[i])
                .collect();
            let last: Vec<u32> = (0..mm)
                .filter(|i| (sub >> i) & 1 == 0)
                .map(|i| mine[i])
                .collect();
            acc.push(vec![first, last]);
            distribute(&rest, k_left - 1, acc, out);
            acc.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut::CutClass;

    #[test]
    fn core_necklace_counts() {
        assert_eq!(necklaces_core(1).len(), 1);
        assert_eq!(necklaces_core(2).len(), 2);
        assert_eq!(necklaces_core(3).len(), 3);
        let four = necklaces_core(4);
        assert_eq!(four.len(), 5);
        let words: BTreeSet<String> =
            four.iter().map(|w| w.to_string()).collect();
        for expect in ["4u", "1u3u", "2u2u", "1u1u2u", "1u1u1u1u"] {
            let parsed = Word::parse(expect).unwrap();
            assert!(words.contains(&parsed.to_string()), "missing {expect}");
        }
    }

    #[test]
    fn binary_necklace_counts() {
        assert_eq!(binary_necklaces(1).len(), 2);
        assert_eq!(binary_necklaces(2).len(), 3);
        assert_eq!(binary_necklaces(3).len(), 4);
        assert_eq!(binary_necklaces(4).len(), 6);
    }

    #[test]
    fn word_parse_and_rotation() {
        let w = Word::parse("1u01u10u").unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w.n_legs(), 3);
        // The same cyclic word started elsewhere.
        assert_eq!(w, Word::parse("01u10u1u").unwrap());
        // A cut bubble may be written starting on the edge letter.
        let bubble = Word::parse("c1c1").unwrap();
        assert_eq!(bubble, Word::parse("1c1c").unwrap());
        assert_eq!(bubble.len(), 2);
        // Reflections are distinct.
        assert_ne!(Word::parse("1u2u3u").unwrap(), Word::parse("1u3u2u").unwrap());
        assert_ne!(Word::parse("01u01u").unwrap(), Word::parse("10u10u").unwrap());
        // One-vertex words do not distinguish a reading direction.
        assert_eq!(Word::parse("02c").unwrap(), Word::parse("20c").unwrap());
    }

    #[test]
    fn realize_split_triangle() {
        let neck = Necklace::new(vec![
            (vec![vec![1]], false),
            (vec![vec![], vec![2]], false),
            (vec![vec![3], vec![]], false),
        ]);
        assert_eq!(neck.word(), Word::parse("1u01u10u").unwrap());
        let pcg = neck.realize().unwrap();
        assert_eq!(pcg.loops(), 1);
        assert_eq!(pcg.base.externals.len(), 3);
        assert!(pcg.is_pre_cutkosky());
        assert_eq!(pcg.h0_tilde(), 2);
        let (parts, legless) = pcg.leg_partition();
        assert_eq!(legless, 0);
        let sizes: Vec<usize> = parts.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![1, 2]);
    }

    #[test]
    fn realize_cut_bubble() {
        let neck = Necklace::new(vec![
            (vec![vec![1]], true),
            (vec![vec![2]], true),
        ]);
        let pcg = neck.realize().unwrap();
        assert_eq!(pcg.classify(), CutClass::Cutkosky);
        assert_eq!(pcg.loops(), 1);
        assert_eq!(pcg.norm(), 0);
        let (parts, legless) = pcg.leg_partition();
        assert_eq!((parts, legless), (vec![vec![1], vec![2]], 0));
    }

    #[test]
    fn propagator_necklaces() {
        let necks = necklaces_cut(&[1, 1]);
        assert_eq!(necks.len(), 8);
        let mut by_word: BTreeMap<String, usize> = BTreeMap::new();
        for neck in &necks {
            let pcg = neck.realize().unwrap();
            assert_eq!(pcg.loops(), 1);
            assert!(pcg.is_pre_cutkosky());
            assert!(pcg.is_normal());
            assert_eq!(
                pcg.leg_partition(),
                (vec![vec![1], vec![2]], 0),
                "necklace {neck} induces the wrong leg partition"
            );
            *by_word.entry(neck.word().to_string()).or_default() += 1;
        }
        // One cut tadpole, two double-split bubbles, two mixed words with
        // two labelings each, and the cut bubble.
        let expect: BTreeMap<String, usize> = [
            ("11c", 1),
            ("01u01u", 1),
            ("10u10u", 1),
            ("1c10u", 2),
            ("01c1u", 2),
            ("1c1c", 1),
        ]
        .into_iter()
        .map(|(w, c)| (Word::parse(w).unwrap().to_string(), c))
        .collect();
        assert_eq!(by_word, expect);
    }

    #[test]
    fn propagator_necklace_iso_classes() {
        let necks = necklaces_cut(&[1, 1]);
        let unlabeled: BTreeSet<_> = necks
            .iter()
            .map(|n| n.realize().unwrap().key_unlabeled())
            .collect();
        assert_eq!(unlabeled.len(), 4);
        let labeled: BTreeSet<_> =
            necks.iter().map(|n| n.realize().unwrap().key()).collect();
        assert_eq!(labeled.len(), 5);
    }

    #[test]
    fn uncut_partition_reduces_to_connected_words() {
        // With a one-part partition every compatible necklace keeps its
        // legs in a single component after cutting.
        for neck in necklaces_cut(&[2]) {
            let pcg = neck.realize().unwrap();
            assert_eq!(pcg.h0_tilde(), 1);
        }
        // Every core necklace appears among the compatible ones.
        let words: BTreeSet<Word> =
            necklaces_cut(&[3]).iter().map(Necklace::word).collect();
        for core in necklaces_core(3) {
            assert!(words.contains(&core), "missing core word {core}");
        }
    }
}
