//! Cointeracting bialgebras on fundamental-cycle generators.
//!
//! Fix a graph with a spanning tree.  Every loop edge `e` determines the
//! set `f(e)` of tree edges on its fundamental cycle.  The algebra `A` is
//! spanned by monomials `x_{B,[A1,A2]}` with `B` a set of loop edges and
//! `[A1,A2]` an interval of subsets of `f(B)`; the interval is read as
//! "cut the edges in `A1`, contract the tree edges outside `A2`".  Two
//! coproducts live on this algebra: `delta_c`, which extracts uncut
//! subobjects and mirrors the coproduct on graph/forest pairs, and the
//! incidence coproduct `rho`, which splits the interval and drives the
//! Galois coaction.  Loop edges can be marked as forbidden tadpoles,
//! which removes interval cuts that would contract such an edge's whole
//! cycle.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;

use crate::cut::GraphForestPair;
use crate::error::{FeynError, Result};
use crate::graph::{EdgeIx, EdgeSet, Graph};
use crate::hopf::delta_gt_terms;

/// The ambient data: tree edges, loop edges, the cycle map `f`, and the
/// loop edges forbidden as tadpoles.  Edge names are plain indices; when
/// the context comes from a graph they are the graph's edge indices.
#[derive(Debug, Clone)]
pub struct Context {
    pub e_t: BTreeSet<EdgeIx>,
    pub e_l: BTreeSet<EdgeIx>,
    pub f: BTreeMap<EdgeIx, BTreeSet<EdgeIx>>,
    pub e_m: BTreeSet<EdgeIx>,
}

impl Context {
    /// Builds the context of a graph with a chosen spanning tree.  `f`
    /// maps each loop edge to the tree path closing its fundamental
    /// cycle.  When `forbid_tadpoles` is set every loop edge is marked,
    /// as in a kinematic renormalization scheme.
    pub fn from_pair(
        g: &Graph,
        tree: &EdgeSet,
        forbid_tadpoles: bool,
    ) -> Result<Context> {
        let mut f = BTreeMap::new();
        let mut e_l = BTreeSet::new();
        for e in 0..g.e() {
            if tree.contains(&e) {
                continue;
            }
            let mut cycle = g.fundamental_cycle(tree, e)?;
            cycle.remove(&e);
            f.insert(e, cycle);
            e_l.insert(e);
        }
        let e_m = if forbid_tadpoles { e_l.clone() } else { BTreeSet::new() };
        Ok(Context { e_t: tree.clone(), e_l, f, e_m })
    }

    /// Union of the cycles of a set of loop edges.
    pub fn f_of(&self, b: &BTreeSet<EdgeIx>) -> BTreeSet<EdgeIx> {
        let mut out = BTreeSet::new();
        for e in b {
            out.extend(self.f[e].iter().copied());
        }
        out
    }

    /// Every monomial of the (finite) algebra for this context.
    pub fn monomials(&self) -> Vec<Mono> {
        let loops: Vec<EdgeIx> = self.e_l.iter().copied().collect();
        let mut out = Vec::new();
        for bmask in 0u32..(1u32 << loops.len()) {
            let b: BTreeSet<EdgeIx> = loops
                .iter()
                .enumerate()
                .filter(|(i, _)| (bmask >> i) & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let fb: Vec<EdgeIx> = self.f_of(&b).into_iter().collect();
            for mask2 in 0u32..(1u32 << fb.len()) {
                let a2: BTreeSet<EdgeIx> = fb
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| (mask2 >> i) & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                let a2v: Vec<EdgeIx> = a2.iter().copied().collect();
                for mask1 in 0u32..(1u32 << a2v.len()) {
                    let a1: BTreeSet<EdgeIx> = a2v
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| (mask1 >> i) & 1 == 1)
                        .map(|(_, &e)| e)
                        .collect();
                    out.push(Mono { b: b.clone(), a1, a2: a2.clone() });
                }
            }
        }
        out
    }
}

/// A monomial `x_{B,[A1,A2]}`: loop-edge set `B` with an interval
/// `A1 ⊆ A2 ⊆ f(B)` of tree-edge sets.  The unit is `x_{∅,[∅,∅]}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono {
    pub b: BTreeSet<EdgeIx>,
    pub a1: BTreeSet<EdgeIx>,
    pub a2: BTreeSet<EdgeIx>,
}

impl Mono {
    pub fn new(
        ctx: &Context,
        b: BTreeSet<EdgeIx>,
        a1: BTreeSet<EdgeIx>,
        a2: BTreeSet<EdgeIx>,
    ) -> Result<Mono> {
        if !b.is_subset(&ctx.e_l) {
            return Err(FeynError::Invalid("monomial edges not loops".into()));
        }
        let fb = ctx.f_of(&b);
        if !a1.is_subset(&a2) || !a2.is_subset(&fb) {
            return Err(FeynError::Invalid("bad interval".into()));
        }
        Ok(Mono { b, a1, a2 })
    }

    pub fn one() -> Mono {
        Mono { b: BTreeSet::new(), a1: BTreeSet::new(), a2: BTreeSet::new() }
    }

    pub fn is_one(&self) -> bool {
        self.b.is_empty()
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn set(f: &mut fmt::Formatter<'_>, s: &BTreeSet<EdgeIx>) -> fmt::Result {
            write!(f, "{{")?;
            for (i, e) in s.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, "}}")
        }
        write!(f, "x_")?;
        set(f, &self.b)?;
        write!(f, "[")?;
        set(f, &self.a1)?;
        write!(f, ",")?;
        set(f, &self.a2)?;
        write!(f, "]")
    }
}

/// The merging product: union of the loop-edge sets and of the interval
/// ends, defined only when the loop sets are disjoint and the interval
/// ends agree on the shared tree edges; otherwise the product is zero
/// (`None`).
pub fn m_product(ctx: &Context, x: &Mono, y: &Mono) -> Option<Mono> {
    if !x.b.is_disjoint(&y.b) {
        return None;
    }
    let shared: BTreeSet<EdgeIx> =
        ctx.f_of(&x.b).intersection(&ctx.f_of(&y.b)).copied().collect();
    let restrict = |s: &BTreeSet<EdgeIx>| -> BTreeSet<EdgeIx> {
        s.intersection(&shared).copied().collect()
    };
    if restrict(&x.a1) != restrict(&y.a1) || restrict(&x.a2) != restrict(&y.a2) {
        return None;
    }
    Some(Mono {
        b: x.b.union(&y.b).copied().collect(),
        a1: x.a1.union(&y.a1).copied().collect(),
        a2: x.a2.union(&y.a2).copied().collect(),
    })
}

/// The subobject coproduct: extracts the sub-sets `B1 ⊆ B` whose cycles
/// avoid the cut edges `A1`, restricting the interval to each side.
pub fn delta_c(ctx: &Context, x: &Mono) -> Vec<(Mono, Mono)> {
    let b: Vec<EdgeIx> = x.b.iter().copied().collect();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << b.len()) {
        let b1: BTreeSet<EdgeIx> = b
            .iter()
            .enumerate()
            .filter(|(i, _)| (mask >> i) & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let f1 = ctx.f_of(&b1);
        if !f1.is_disjoint(&x.a1) {
            continue;
        }
        let rest: BTreeSet<EdgeIx> = x.b.difference(&b1).copied().collect();
        let f2 = ctx.f_of(&rest);
        let left = Mono {
            b: b1,
            a1: x.a1.intersection(&f1).copied().collect(),
            a2: x.a2.intersection(&f1).copied().collect(),
        };
        let right = Mono {
            b: rest,
            a1: x.a1.intersection(&f2).copied().collect(),
            a2: x.a2.intersection(&f2).copied().collect(),
        };
        out.push((left, right));
    }
    out
}

/// The incidence coproduct: splits the interval at every intermediate
/// set `A`, skipping cuts that would contract the whole cycle of a
/// forbidden-tadpole edge of `B`.
pub fn rho(ctx: &Context, x: &Mono) -> Vec<(Mono, Mono)> {
    let fb = ctx.f_of(&x.b);
    let free: Vec<EdgeIx> = x.a2.difference(&x.a1).copied().collect();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << free.len()) {
        let mut a: BTreeSet<EdgeIx> = x.a1.clone();
        a.extend(
            free.iter()
                .enumerate()
                .filter(|(i, _)| (mask >> i) & 1 == 1)
                .map(|(_, &e)| e),
        );
        let forbidden = ctx.e_m.intersection(&x.b).any(|e| {
            ctx.f[e].iter().all(|t| fb.contains(t) && !a.contains(t))
        });
        if forbidden {
            continue;
        }
        let left = Mono { b: x.b.clone(), a1: x.a1.clone(), a2: a.clone() };
        let right = Mono { b: x.b.clone(), a1: a, a2: x.a2.clone() };
        out.push((left, right));
    }
    out
}

/// Counit of `delta_c`: 1 on the unit, 0 on every other monomial.
pub fn counit(x: &Mono) -> i64 {
    i64::from(x.is_one())
}

type PairSum = BTreeMap<(Mono, Mono), i64>;
type TripleSum = BTreeMap<(Mono, Mono, Mono), i64>;

fn pair_sum(terms: Vec<(Mono, Mono)>) -> PairSum {
    let mut out = PairSum::new();
    for t in terms {
        *out.entry(t).or_default() += 1;
    }
    out
}

/// Verifies the compatibility identities of the two coproducts on every
/// supplied monomial (and on sampled pairs for multiplicativity):
///
/// 1. `rho(1) = 1 ⊗ 1`;
/// 2. `m_{1,3,24} ∘ (rho ⊗ rho) ∘ delta_c = (delta_c ⊗ id) ∘ rho`;
/// 3. `rho(xy) = rho(x) rho(y)` componentwise;
/// 4. `(counit ⊗ id) ∘ rho(x) = counit(x)·1`.
pub fn check_cointeraction(
    ctx: &Context,
    monos: &[Mono],
    pairs: &[(Mono, Mono)],
) -> std::result::Result<(), String> {
    let one_terms = rho(ctx, &Mono::one());
    if one_terms != vec![(Mono::one(), Mono::one())] {
        return Err("rho(1) != 1 x 1".into());
    }
    for x in monos {
        // Identity 2.
        let mut lhs = TripleSum::new();
        for (c1, c2) in delta_c(ctx, x) {
            for (l1, r1) in rho(ctx, &c1) {
                for (l2, r2) in rho(ctx, &c2) {
                    if let Some(p) = m_product(ctx, &r1, &r2) {
                        *lhs.entry((l1.clone(), l2, p)).or_default() += 1;
                    }
                }
            }
        }
        let mut rhs = TripleSum::new();
        for (rl, rr) in rho(ctx, x) {
            for (d1, d2) in delta_c(ctx, &rl) {
                *rhs.entry((d1, d2, rr.clone())).or_default() += 1;
            }
        }
        if lhs != rhs {
            return Err(format!("cointeraction identity fails on {x}"));
        }
        // Identity 4.
        let mut left_counit = PairSum::new();
        for (l, r) in rho(ctx, x) {
            if counit(&l) != 0 {
                *left_counit.entry((Mono::one(), r)).or_default() += 1;
            }
        }
        let mut expect = PairSum::new();
        if counit(x) != 0 {
            expect.insert((Mono::one(), Mono::one()), 1);
        }
        if left_counit != expect {
            return Err(format!("counit identity fails on {x}"));
        }
    }
    for (x, y) in pairs {
        let lhs = match m_product(ctx, x, y) {
            Some(p) => pair_sum(rho(ctx, &p)),
            None => PairSum::new(),
        };
        let mut rhs = PairSum::new();
        for (l1, r1) in rho(ctx, x) {
            for (l2, r2) in rho(ctx, y) {
                if let (Some(l), Some(r)) =
                    (m_product(ctx, &l1, &l2), m_product(ctx, &r1, &r2))
                {
                    *rhs.entry((l, r)).or_default() += 1;
                }
            }
        }
        if lhs != rhs {
            return Err(format!("rho multiplicativity fails on {x}, {y}"));
        }
    }
    Ok(())
}

/// A random abstract context: tree edges `0..nt`, loop edges `10..10+nl`,
/// random cycle map and random forbidden-tadpole set.
pub fn random_context<R: Rng>(rng: &mut R) -> Context {
    let nt = rng.gen_range(0..=4usize);
    let nl = rng.gen_range(0..=3usize);
    let e_t: BTreeSet<EdgeIx> = (0..nt).collect();
    let mut f = BTreeMap::new();
    let mut e_l = BTreeSet::new();
    let mut e_m = BTreeSet::new();
    for i in 0..nl {
        let e = 10 + i;
        e_l.insert(e);
        let cycle: BTreeSet<EdgeIx> =
            (0..nt).filter(|_| rng.gen_bool(0.5)).collect();
        f.insert(e, cycle);
        if rng.gen_bool(0.5) {
            e_m.insert(e);
        }
    }
    Context { e_t, e_l, f, e_m }
}

/// The monomial of a graph/forest pair within a fixed tree context:
/// every loop edge appears, the cut tree edges are the lower interval
/// end, and nothing is contracted.
pub fn w_of(ctx: &Context, forest: &EdgeSet) -> Mono {
    let fb = ctx.f_of(&ctx.e_l);
    let cut: BTreeSet<EdgeIx> = ctx.e_t.difference(forest).copied().collect();
    Mono {
        b: ctx.e_l.clone(),
        a1: cut.intersection(&fb).copied().collect(),
        a2: fb,
    }
}

/// Checks that `delta_c` of `w((Γ,F))` matches the tree-variant graph
/// coproduct term by term: the terms of the latter are indexed by the
/// sets of intact fundamental cycles, and each maps onto a monomial
/// tensor in the fixed context.
pub fn check_lem_c_gt(
    g: &Graph,
    tree: &EdgeSet,
    forest: &EdgeSet,
) -> Result<()> {
    let ctx = Context::from_pair(g, tree, false)?;
    let w = w_of(&ctx, forest);
    let lhs = pair_sum(delta_c(&ctx, &w));
    let mut rhs = PairSum::new();
    for term in delta_gt_terms(g, tree, forest)? {
        let b1: BTreeSet<EdgeIx> = term.loop_subset.iter().copied().collect();
        let f1 = ctx.f_of(&b1);
        if f1 != term.tree_part.iter().copied().collect::<BTreeSet<_>>() {
            return Err(FeynError::StructureMismatch(
                "cycle union differs from tree part".into(),
            ));
        }
        let rest: BTreeSet<EdgeIx> = ctx.e_l.difference(&b1).copied().collect();
        let f2 = ctx.f_of(&rest);
        let left = Mono { b: b1, a1: BTreeSet::new(), a2: f1 };
        let right = Mono {
            b: rest,
            a1: w.a1.intersection(&f2).copied().collect(),
            a2: f2,
        };
        *rhs.entry((left, right)).or_default() += 1;
    }
    if lhs != rhs {
        return Err(FeynError::StructureMismatch(
            "delta_c disagrees with the tree coproduct".into(),
        ));
    }
    Ok(())
}

/// A Galois conjugate of `(Γ,T)`: contract `p ⊆ T`, then remove `q` from
/// the remaining tree, together with its generator monomial.
#[derive(Debug, Clone)]
pub struct Conjugate {
    pub p: EdgeSet,
    pub q: EdgeSet,
    pub pair: GraphForestPair,
    pub mono: Mono,
}

/// Maps original edge indices to indices after contracting `contract`.
fn contraction_map(g: &Graph, contract: &EdgeSet) -> BTreeMap<EdgeIx, EdgeIx> {
    (0..g.e())
        .filter(|e| !contract.contains(e))
        .enumerate()
        .map(|(new, old)| (old, new))
        .collect()
}

/// All Galois conjugates `(Γ/p, T/p ∖ q)` over disjoint `p, q ⊆ T`.
pub fn galois_conjugates(g: &Graph, tree: &EdgeSet) -> Result<Vec<Conjugate>> {
    let ctx = Context::from_pair(g, tree, false)?;
    let fb = ctx.f_of(&ctx.e_l);
    let edges: Vec<EdgeIx> = tree.iter().copied().collect();
    let mut out = Vec::new();
    for pmask in 0u32..(1u32 << edges.len()) {
        let p: EdgeSet = edges
            .iter()
            .enumerate()
            .filter(|(i, _)| (pmask >> i) & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let free: Vec<EdgeIx> =
            edges.iter().copied().filter(|e| !p.contains(e)).collect();
        for qmask in 0u32..(1u32 << free.len()) {
            let q: EdgeSet = free
                .iter()
                .enumerate()
                .filter(|(i, _)| (qmask >> i) & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let cg = g.contract_edges(&p, false);
            let emap = contraction_map(g, &p);
            let forest: EdgeSet = tree
                .iter()
                .filter(|e| !p.contains(e) && !q.contains(e))
                .map(|e| emap[e])
                .collect();
            let pair = GraphForestPair::new(cg, forest)?;
            let mono = Mono {
                b: ctx.e_l.clone(),
                a1: q.intersection(&fb).copied().collect(),
                a2: fb.difference(&p).copied().collect(),
            };
            out.push(Conjugate { p: p.clone(), q, pair, mono });
        }
    }
    Ok(out)
}

/// One grouped term of the Galois pairing: a cut co-object on the right
/// and the left factors collected over all tree choices producing it.
#[derive(Debug, Clone)]
pub struct PairingTerm {
    pub right: GraphForestPair,
    pub lefts: Vec<GraphForestPair>,
}

/// Decodes a monomial in the context of `(g, tree)` back into a pair:
/// contract the tree edges outside `a2`, cut the ones in `a1`.
pub fn decode(
    ctx: &Context,
    g: &Graph,
    mono: &Mono,
) -> Result<GraphForestPair> {
    let contract: EdgeSet = ctx.e_t.difference(&mono.a2).copied().collect();
    let cg = g.contract_edges(&contract, false);
    let emap = contraction_map(g, &contract);
    let forest: EdgeSet =
        mono.a2.difference(&mono.a1).map(|e| emap[e]).collect();
    GraphForestPair::new(cg, forest)
}

/// The combinatorial Galois pairing of a bridgeless connected graph:
/// sum over spanning trees of the incidence coproduct applied to the
/// tree monomial, with the terms grouped by the right (cut) factor.
/// With `forbid_tadpoles` the fully contracted terms are absent, as in
/// kinematic renormalization schemes.
pub fn galois_pairing(
    g: &Graph,
    forbid_tadpoles: bool,
) -> Result<Vec<PairingTerm>> {
    let mut grouped: BTreeMap<_, (GraphForestPair, Vec<GraphForestPair>)> =
        BTreeMap::new();
    for tree in g.spanning_trees()? {
        let ctx = Context::from_pair(g, &tree, forbid_tadpoles)?;
        let w = w_of(&ctx, &tree);
        for (l, r) in rho(&ctx, &w) {
            let left = decode(&ctx, g, &l)?;
            let right = decode(&ctx, g, &r)?;
            grouped
                .entry(right.key())
                .or_insert_with(|| (right, Vec::new()))
                .1
                .push(left);
        }
    }
    Ok(grouped
        .into_values()
        .map(|(right, lefts)| PairingTerm { right, lefts })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn set(v: &[EdgeIx]) -> BTreeSet<EdgeIx> {
        v.iter().copied().collect()
    }

    fn triangle_ctx(forbid: bool) -> Context {
        // Tree on the second and third edge; the first edge is the loop.
        Context::from_pair(&examples::triangle(), &set(&[1, 2]), forbid)
            .unwrap()
    }

    fn x(b: &[EdgeIx], a1: &[EdgeIx], a2: &[EdgeIx]) -> Mono {
        Mono { b: set(b), a1: set(a1), a2: set(a2) }
    }

    #[test]
    fn triangle_galois_conjugates() {
        let g = examples::triangle();
        let conj = galois_conjugates(&g, &set(&[1, 2])).unwrap();
        assert_eq!(conj.len(), 9);
        let monos: BTreeSet<Mono> = conj.iter().map(|c| c.mono.clone()).collect();
        let expect: BTreeSet<Mono> = [
            x(&[0], &[], &[1, 2]),
            x(&[0], &[], &[2]),
            x(&[0], &[], &[1]),
            x(&[0], &[], &[]),
            x(&[0], &[1], &[1, 2]),
            x(&[0], &[2], &[1, 2]),
            x(&[0], &[1, 2], &[1, 2]),
            x(&[0], &[2], &[2]),
            x(&[0], &[1], &[1]),
        ]
        .into_iter()
        .collect();
        assert_eq!(monos, expect);
        // Contraction-only conjugates versus those with on-shell edges.
        let m_type = conj.iter().filter(|c| c.q.is_empty()).count();
        assert_eq!(m_type, 4);
        assert_eq!(conj.len() - m_type, 5);
        // The conjugate pairs themselves: contracting one tree edge gives
        // a bubble with a one-edge tree, removing instead keeps the
        // triangle with a smaller forest.
        for c in &conj {
            assert_eq!(c.pair.graph.e(), 3 - c.p.len());
            assert_eq!(c.pair.forest.len(), 2 - c.p.len() - c.q.len());
        }
    }

    #[test]
    fn triangle_delta_c_table() {
        let ctx = triangle_ctx(false);
        for mono in galois_conjugates(&examples::triangle(), &set(&[1, 2]))
            .unwrap()
            .into_iter()
            .map(|c| c.mono)
        {
            let terms = delta_c(&ctx, &mono);
            if mono.a1.is_empty() {
                // Primitive: x ⊗ 1 + 1 ⊗ x.
                let expect = vec![
                    (Mono::one(), mono.clone()),
                    (mono.clone(), Mono::one()),
                ];
                assert_eq!(pair_sum(terms), pair_sum(expect));
            } else {
                assert_eq!(terms, vec![(Mono::one(), mono.clone())]);
            }
        }
    }

    #[test]
    fn triangle_rho_table() {
        // All tadpoles forbidden (massless edges).
        let ctx = triangle_ctx(true);
        let r = |m: &Mono| pair_sum(rho(&ctx, m));
        let top = x(&[0], &[], &[1, 2]);
        assert_eq!(
            r(&top),
            pair_sum(vec![
                (top.clone(), x(&[0], &[1, 2], &[1, 2])),
                (x(&[0], &[], &[1]), x(&[0], &[1], &[1, 2])),
                (x(&[0], &[], &[2]), x(&[0], &[2], &[1, 2])),
            ])
        );
        assert_eq!(
            r(&x(&[0], &[], &[2])),
            pair_sum(vec![(x(&[0], &[], &[2]), x(&[0], &[2], &[2]))])
        );
        assert_eq!(
            r(&x(&[0], &[1], &[1, 2])),
            pair_sum(vec![
                (x(&[0], &[1], &[1, 2]), x(&[0], &[1, 2], &[1, 2])),
                (x(&[0], &[1], &[1]), x(&[0], &[1], &[1, 2])),
            ])
        );
        // Group-like diagonal intervals away from the bottom.
        for diag in [x(&[0], &[1, 2], &[1, 2]), x(&[0], &[1], &[1])] {
            assert_eq!(r(&diag), pair_sum(vec![(diag.clone(), diag.clone())]));
        }
        // The fully contracted monomial is itself a forbidden tadpole, so
        // the restricted coproduct annihilates it; with tadpoles allowed
        // it is group-like.
        assert_eq!(rho(&ctx, &x(&[0], &[], &[])), vec![]);
        let free = triangle_ctx(false);
        let bottom = x(&[0], &[], &[]);
        assert_eq!(rho(&free, &bottom), vec![(bottom.clone(), bottom.clone())]);
        // Without the tadpole restriction the top monomial gains the
        // fully contracted term.
        assert_eq!(rho(&free, &top).len(), 4);
    }

    #[test]
    fn cointeraction_identities_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xc01);
        for trial in 0..500 {
            let ctx = random_context(&mut rng);
            let all = ctx.monomials();
            let monos: Vec<Mono> = (0..30.min(all.len()))
                .map(|_| all[rng.gen_range(0..all.len())].clone())
                .collect();
            let pairs: Vec<(Mono, Mono)> = (0..30.min(all.len()))
                .map(|_| {
                    (
                        all[rng.gen_range(0..all.len())].clone(),
                        all[rng.gen_range(0..all.len())].clone(),
                    )
                })
                .collect();
            check_cointeraction(&ctx, &monos, &pairs)
                .unwrap_or_else(|e| panic!("trial {trial}: {e}"));
        }
    }

    #[test]
    fn cointeraction_identities_triangle() {
        for forbid in [false, true] {
            let ctx = triangle_ctx(forbid);
            let all = ctx.monomials();
            let pairs: Vec<(Mono, Mono)> = all
                .iter()
                .take(8)
                .flat_map(|a| all.iter().take(8).map(move |b| (a.clone(), b.clone())))
                .collect();
            check_cointeraction(&ctx, &all, &pairs).unwrap();
        }
    }

    #[test]
    fn lem_c_gt_examples() {
        let t = examples::triangle();
        let tree = set(&[1, 2]);
        for forest in [set(&[1, 2]), set(&[1]), set(&[2]), set(&[])] {
            check_lem_c_gt(&t, &tree, &forest).unwrap();
        }
        let dc = examples::dunce_cap();
        let tree = set(&[0, 2]);
        for forest in [set(&[0, 2]), set(&[0]), set(&[2]), set(&[])] {
            check_lem_c_gt(&dc, &tree, &forest).unwrap();
        }
        let twb = examples::triangle_with_bubble();
        for tree in twb.spanning_trees().unwrap() {
            check_lem_c_gt(&twb, &tree, &tree).unwrap();
        }
    }

    #[test]
    fn triangle_pairing() {
        let t = examples::triangle();
        let terms = galois_pairing(&t, true).unwrap();
        // Uncut term plus one term per single-edge cut.
        assert_eq!(terms.len(), 4);
        for term in &terms {
            // All left factors share one underlying graph and their
            // forests run over all of its spanning trees.
            let keys: BTreeSet<_> = term
                .lefts
                .iter()
                .map(|p| crate::canon::graph_key(&p.graph))
                .collect();
            assert_eq!(keys.len(), 1, "left graphs differ in a group");
            let lg = &term.lefts[0].graph;
            assert_eq!(term.lefts.len(), lg.spt());
            let forests: BTreeSet<_> =
                term.lefts.iter().map(|p| p.forest.clone()).collect();
            assert_eq!(forests.len(), term.lefts.len());
        }
        let uncut: Vec<_> =
            terms.iter().filter(|t| t.right.forest.is_empty()).collect();
        assert_eq!(uncut.len(), 1);
        assert_eq!(uncut[0].lefts.len(), 3);
        // With tadpoles allowed, each tree contributes an extra term whose
        // left factor is the fully contracted tadpole and whose right
        // factor is the full tree pair: three more groups.
        assert_eq!(galois_pairing(&t, false).unwrap().len(), 7);
    }
}
