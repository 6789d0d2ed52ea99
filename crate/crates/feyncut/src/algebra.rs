//! Exact-rational linear algebra of graph monomials.
//!
//! The algebra is the free commutative ℚ-algebra on connected bridgeless
//! generators (core graphs, pre-cut graphs or graph–forest pairs, each in a
//! labelled or unlabelled-legs flavour).  A monomial is a multiset of
//! generators, canonically sorted by canonical key; the empty monomial is the
//! unit 𝕀.  Single-vertex graphs with external legs (no internal edges, no
//! circles) are identified with 𝕀 at canonicalization time, which keeps the
//! algebra connected.  [`TensorSum`] holds rational combinations of monomial
//! k-tuples for coproducts and their compositions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::canon::{graph_key, graph_key_unlabeled, CanonKey};
use crate::cut::{GraphForestPair, PreCutGraph};
use crate::graph::Graph;

/// Exact rational coefficient type.
pub type Rat = BigRational;

/// `n/d` as a [`Rat`].
pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The structural payload of a generator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenKind {
    Core(Graph),
    PreCut(PreCutGraph),
    Pair(GraphForestPair),
}

/// A connected generator with its canonical key.  Equality and ordering use
/// only the canonical key (plus kind discriminant and labelling flavour), so
/// isomorphic representatives with different half-edge ids coincide; the
/// stored representative is whichever was constructed first.
#[derive(Debug, Clone)]
pub struct Gen {
    pub key: CanonKey,
    /// Whether external legs are labelled (fixed pointwise) or considered up
    /// to relabeling.
    pub labeled: bool,
    pub kind: GenKind,
}

impl Gen {
    fn discr(&self) -> u8 {
        match self.kind {
            GenKind::Core(_) => 0,
            GenKind::PreCut(_) => 1,
            GenKind::Pair(_) => 2,
        }
    }
}

impl PartialEq for Gen {
    fn eq(&self, other: &Gen) -> bool {
        self.key == other.key
            && self.labeled == other.labeled
            && self.discr() == other.discr()
    }
}

impl Eq for Gen {}

impl PartialOrd for Gen {
    fn partial_cmp(&self, other: &Gen) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Gen {
    fn cmp(&self, other: &Gen) -> std::cmp::Ordering {
        (&self.key, self.labeled, self.discr()).cmp(&(
            &other.key,
            other.labeled,
            other.discr(),
        ))
    }
}

impl std::hash::Hash for Gen {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.key.hash(state);
        self.labeled.hash(state);
        self.discr().hash(state);
    }
}

impl Gen {
    /// Core-graph generator; `None` when the graph is identified with 𝕀.
    pub fn core(g: Graph, labeled: bool) -> Option<Gen> {
        if g.e() == 0 && g.circles == 0 {
            return None;
        }
        let key = if labeled { graph_key(&g) } else { graph_key_unlabeled(&g) };
        Some(Gen { key, labeled, kind: GenKind::Core(g) })
    }

    /// Pre-cut generator; `None` when identified with 𝕀.
    pub fn precut(g: PreCutGraph, labeled: bool) -> Option<Gen> {
        if g.base.e() == 0 && g.base.circles == 0 {
            return None;
        }
        let key = if labeled { g.key() } else { g.key_unlabeled() };
        Some(Gen { key, labeled, kind: GenKind::PreCut(g) })
    }

    /// Graph–forest-pair generator; `None` when identified with 𝕀.
    pub fn pair(p: GraphForestPair, labeled: bool) -> Option<Gen> {
        if p.graph.e() == 0 && p.graph.circles == 0 {
            return None;
        }
        let key = if labeled { p.key() } else { p.key_unlabeled() };
        Some(Gen { key, labeled, kind: GenKind::Pair(p) })
    }

    /// Loop grading `|·|`.
    pub fn loops(&self) -> isize {
        match &self.kind {
            GenKind::Core(g) => g.loops(),
            GenKind::PreCut(g) => g.loops(),
            GenKind::Pair(p) => p.graph.loops(),
        }
    }

    /// Cut grading `‖·‖` (coincides with `|·|` for core generators; pairs
    /// grade by the loops left intact by the induced cut).
    pub fn norm(&self) -> isize {
        match &self.kind {
            GenKind::Core(g) => g.loops(),
            GenKind::PreCut(g) => g.norm(),
            GenKind::Pair(p) => p.to_cut().norm(),
        }
    }
}

/// A commutative monomial: a canonically sorted multiset of generators.
/// The empty monomial is the unit 𝕀.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<Gen>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn from_gens(gens: impl IntoIterator<Item = Gen>) -> Monomial {
        let mut v: Vec<Gen> = gens.into_iter().collect();
        v.sort();
        Monomial(v)
    }

    /// Monomial of a possibly-disconnected graph: the product of its
    /// connected components.
    pub fn of_graph(g: &Graph, labeled: bool) -> Monomial {
        Monomial::from_gens(
            g.split_components()
                .into_iter()
                .filter_map(|c| Gen::core(c, labeled)),
        )
    }

    /// Monomial of a possibly-disconnected pre-cut graph.
    pub fn of_precut(g: &PreCutGraph, labeled: bool) -> Monomial {
        Monomial::from_gens(
            g.split_components()
                .into_iter()
                .filter_map(|c| Gen::precut(c, labeled)),
        )
    }

    /// Monomial of a possibly-disconnected graph–forest pair.
    pub fn of_pair(p: &GraphForestPair, labeled: bool) -> Monomial {
        Monomial::from_gens(
            p.split_components()
                .into_iter()
                .filter_map(|c| Gen::pair(c, labeled)),
        )
    }

    pub fn gens(&self) -> &[Gen] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        v.sort();
        Monomial(v)
    }

    /// Loop grading: additive over factors.
    pub fn loops(&self) -> isize {
        self.0.iter().map(|g| g.loops()).sum()
    }

    /// Cut grading.
    pub fn norm(&self) -> isize {
        self.0.iter().map(|g| g.norm()).sum()
    }
}

/// A finite ℚ-linear combination of monomials.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GraphSum {
    terms: BTreeMap<Monomial, Rat>,
}

impl GraphSum {
    pub fn zero() -> GraphSum {
        GraphSum::default()
    }

    /// The unit 𝕀 with coefficient 1.
    pub fn one() -> GraphSum {
        GraphSum::from_term(Monomial::one(), rat(1, 1))
    }

    pub fn from_term(m: Monomial, c: Rat) -> GraphSum {
        let mut s = GraphSum::zero();
        s.add_term(m, c);
        s
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        use num_traits::Zero;
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rat::zero);
        *entry += c;
        // Drop exact cancellations.
        let dead: Vec<Monomial> = self
            .terms
            .iter()
            .filter(|(_, v)| v.is_zero())
            .map(|(k, _)| k.clone())
            .collect();
        for k in dead {
            self.terms.remove(&k);
        }
    }

    pub fn add(&self, other: &GraphSum) -> GraphSum {
        let mut s = self.clone();
        for (m, c) in &other.terms {
            s.add_term(m.clone(), c.clone());
        }
        s
    }

    pub fn sub(&self, other: &GraphSum) -> GraphSum {
        self.add(&other.scale(&rat(-1, 1)))
    }

    pub fn scale(&self, c: &Rat) -> GraphSum {
        use num_traits::Zero;
        if c.is_zero() {
            return GraphSum::zero();
        }
        GraphSum {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Bilinear product; monomials multiply as multiset unions.
    pub fn mul(&self, other: &GraphSum) -> GraphSum {
        let mut s = GraphSum::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                s.add_term(m1.mul(m2), c1 * c2);
            }
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        use num_traits::Zero;
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// The counit ε: coefficient of 𝕀 (zero on nonempty monomials).
    pub fn counit(&self) -> Rat {
        self.coeff(&Monomial::one())
    }

    /// Restriction to monomials with the given loop grading.
    pub fn graded_part(&self, loops: isize) -> GraphSum {
        GraphSum {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.loops() == loops)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Maps every monomial through `f`, extending linearly.
    pub fn map_linear(&self, f: impl Fn(&Monomial) -> GraphSum) -> GraphSum {
        let mut out = GraphSum::zero();
        for (m, c) in &self.terms {
            out = out.add(&f(m).scale(c));
        }
        out
    }
}

/// A ℚ-linear combination of monomial k-tuples (tensors of fixed arity).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorSum {
    pub arity: usize,
    terms: BTreeMap<Vec<Monomial>, Rat>,
}

impl TensorSum {
    pub fn zero(arity: usize) -> TensorSum {
        TensorSum { arity, terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, legs: Vec<Monomial>, c: Rat) {
        use num_traits::Zero;
        assert_eq!(legs.len(), self.arity);
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(legs).or_insert_with(Rat::zero);
        *entry += c;
        let dead: Vec<Vec<Monomial>> = self
            .terms
            .iter()
            .filter(|(_, v)| v.is_zero())
            .map(|(k, _)| k.clone())
            .collect();
        for k in dead {
            self.terms.remove(&k);
        }
    }

    pub fn add(&self, other: &TensorSum) -> TensorSum {
        assert_eq!(self.arity, other.arity);
        let mut s = self.clone();
        for (legs, c) in &other.terms {
            s.add_term(legs.clone(), c.clone());
        }
        s
    }

    pub fn sub(&self, other: &TensorSum) -> TensorSum {
        self.add(&other.scale(&rat(-1, 1)))
    }

    pub fn scale(&self, c: &Rat) -> TensorSum {
        use num_traits::Zero;
        if c.is_zero() {
            return TensorSum::zero(self.arity);
        }
        TensorSum {
            arity: self.arity,
            terms: self.terms.iter().map(|(l, v)| (l.clone(), v * c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Monomial>, &Rat)> {
        self.terms.iter()
    }

    /// Tensor product of two sums (arities add).
    pub fn tensor(&self, other: &TensorSum) -> TensorSum {
        let mut out = TensorSum::zero(self.arity + other.arity);
        for (l1, c1) in &self.terms {
            for (l2, c2) in &other.terms {
                let mut legs = l1.clone();
                legs.extend(l2.iter().cloned());
                out.add_term(legs, c1 * c2);
            }
        }
        out
    }

    /// Componentwise product: `(a⊗b)(c⊗d) = ac⊗bd`, bilinear.
    pub fn mul(&self, other: &TensorSum) -> TensorSum {
        assert_eq!(self.arity, other.arity);
        let mut out = TensorSum::zero(self.arity);
        for (l1, c1) in &self.terms {
            for (l2, c2) in &other.terms {
                let legs: Vec<Monomial> =
                    l1.iter().zip(l2).map(|(a, b)| a.mul(b)).collect();
                out.add_term(legs, c1 * c2);
            }
        }
        out
    }

    /// Replaces leg `i` by the (multi-leg) image under `f`, extending
    /// linearly; the image legs are spliced in place.
    pub fn map_leg(&self, i: usize, f: impl Fn(&Monomial) -> TensorSum) -> TensorSum {
        let mut out: Option<TensorSum> = None;
        for (legs, c) in &self.terms {
            let img = f(&legs[i]);
            for (sub, c2) in &img.terms {
                let mut new_legs = legs.clone();
                new_legs.splice(i..=i, sub.iter().cloned());
                let tgt = out.get_or_insert_with(|| {
                    TensorSum::zero(self.arity - 1 + img.arity)
                });
                tgt.add_term(new_legs, c * c2);
            }
        }
        out.unwrap_or_else(|| TensorSum::zero(self.arity + 1))
    }

    /// Merges the listed legs into one by multiplication, in the output
    /// order given by `groups` (each leg index used exactly once).
    pub fn combine_legs(&self, groups: &[Vec<usize>]) -> TensorSum {
        let mut out = TensorSum::zero(groups.len());
        for (legs, c) in &self.terms {
            let new_legs: Vec<Monomial> = groups
                .iter()
                .map(|grp| {
                    let mut m = Monomial::one();
                    for &i in grp {
                        m = m.mul(&legs[i]);
                    }
                    m
                })
                .collect();
            out.add_term(new_legs, c.clone());
        }
        out
    }

    /// Applies the counit ε at leg `i` (keeps terms whose leg is 𝕀, dropping
    /// that leg).
    pub fn apply_counit(&self, i: usize) -> TensorSum {
        let mut out = TensorSum::zero(self.arity - 1);
        for (legs, c) in &self.terms {
            if legs[i].is_one() {
                let mut new_legs = legs.clone();
                new_legs.remove(i);
                out.add_term(new_legs, c.clone());
            }
        }
        out
    }

    /// Multiplies all legs together (the full multiplication map m^{k−1}).
    pub fn multiply_all(&self) -> GraphSum {
        let mut out = GraphSum::zero();
        for (legs, c) in &self.terms {
            let mut m = Monomial::one();
            for l in legs {
                m = m.mul(l);
            }
            out.add_term(m, c.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::*;
    use crate::graph::EdgeSet;

    #[test]
    fn single_vertex_is_unit() {
        // Contracting all of the triangle yields a single 3-leg vertex,
        // identified with 𝕀.
        let t = triangle();
        let all: EdgeSet = (0..3).collect();
        let co = t.contract_subgraph(&all).unwrap();
        assert_eq!(Monomial::of_graph(&co, true), Monomial::one());
        // But a circle is not 𝕀.
        let circle = Graph { vertices: vec![], edges: vec![], externals: vec![], circles: 1 };
        assert!(!Monomial::of_graph(&circle, true).is_one());
    }

    #[test]
    fn disconnected_subgraph_is_product() {
        // Two disjoint bubbles inside one ambient description multiply.
        let g = Graph::validate(
            vec![
                vec![0, 1, 2],
                vec![3, 4, 5],
                vec![6, 7, 8],
                vec![9, 10, 11],
            ],
            vec![(1, 4), (2, 5), (7, 10), (8, 11)],
            vec![0, 3, 6, 9],
        )
        .unwrap();
        let m = Monomial::of_graph(&g, false);
        assert_eq!(m.gens().len(), 2);
        assert_eq!(m.gens()[0].key, m.gens()[1].key);
        let single = Gen::core(bubble(), false).unwrap();
        assert_eq!(m.gens()[0].key, single.key);
        assert_eq!(m.loops(), 2);
    }

    #[test]
    fn sum_arithmetic() {
        let t = Monomial::of_graph(&triangle(), true);
        let b = Monomial::of_graph(&bubble(), true);
        let s = GraphSum::from_term(t.clone(), rat(1, 2))
            .add(&GraphSum::from_term(b.clone(), rat(1, 3)));
        assert_eq!(s.len(), 2);
        assert_eq!(s.coeff(&t), rat(1, 2));
        // Cancellation removes terms.
        let z = s.sub(&s);
        assert!(z.is_zero());
        // Product of generators is a 2-generator monomial.
        let p = GraphSum::from_term(t.clone(), rat(1, 1))
            .mul(&GraphSum::from_term(b.clone(), rat(2, 1)));
        let (m, c) = p.terms().next().unwrap();
        assert_eq!(m.gens().len(), 2);
        assert_eq!(*c, rat(2, 1));
        assert_eq!(m.loops(), 2);
        // Unit laws.
        assert_eq!(GraphSum::one().mul(&s), s);
        assert_eq!(s.counit(), rat(0, 1));
        assert_eq!(GraphSum::one().counit(), rat(1, 1));
    }

    #[test]
    fn tensor_operations() {
        let t = Monomial::of_graph(&triangle(), true);
        let b = Monomial::of_graph(&bubble(), true);
        let mut d = TensorSum::zero(2);
        d.add_term(vec![t.clone(), Monomial::one()], rat(1, 1));
        d.add_term(vec![Monomial::one(), t.clone()], rat(1, 1));
        // Counit law: (ε⊗id)Δ = id.
        let left = d.apply_counit(0);
        assert_eq!(left.len(), 1);
        assert_eq!(left.terms().next().unwrap().0, &vec![t.clone()]);
        // Splicing a 2-leg image into leg 0 gives arity 3.
        let three = d.map_leg(0, |m| {
            let mut out = TensorSum::zero(2);
            out.add_term(vec![m.clone(), Monomial::one()], rat(1, 1));
            out.add_term(vec![Monomial::one(), m.clone()], rat(1, 1));
            out
        });
        assert_eq!(three.arity, 3);
        assert_eq!(three.len(), 3);
        // combine_legs merges multiplicatively.
        let flat = three.combine_legs(&[vec![0, 1, 2]]);
        assert_eq!(flat.arity, 1);
        let total: Rat = flat.terms().map(|(_, c)| c.clone()).sum();
        assert_eq!(total, rat(4, 1));
        // multiply_all on Δ-like tensor gives 2·Γ.
        let prod = d.multiply_all();
        assert_eq!(prod.coeff(&t), rat(2, 1));
        let _ = b;
    }
}
