//! First and second Symanzik polynomials, factorization identities, the
//! symbolic renormalized forest-sum integrand, and sector counting.
//!
//! Polynomials are exact multivariate polynomials with integer coefficients
//! in the edge variables `A_e` (indexed by the graph's edge order), opaque
//! kinematic invariants `s(L)` labelled by the set `L` of external leg
//! labels isolated by a 2-forest, formal mass squares `m(e)`, and the
//! renormalization symbol `mu` (standing for `μ²`).
//!
//! Conventions: `ψ(Γ) = Σ_T Π_{e∉T} A_e` over spanning trees (maximal
//! forests for disconnected edge sets); `φ(Γ) = Σ_F s_F Π_{e∉F} A_e −
//! (Σ_e A_e m_e²)·ψ(Γ)` over spanning 2-forests, with `s_F` determined by
//! the leg partition the forest induces (2-forests isolating no legs carry
//! a vanishing invariant and are dropped).  The subtraction polynomial `φ₀`
//! replaces every kinematic invariant by `−μ²`, which reproduces the
//! massive one-loop triangle integrand verbatim.
//!
//! Co-graphs `Γ/F` are formed without eliding 2-valent vertices so that
//! every surviving edge keeps its original variable `A_e`; a subdivided
//! chain thus keeps both variables (the fused form is the substitution
//! `A = A' + A''`).

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{FeynError, Result};
use crate::graph::{combinations, factorial, EdgeIx, EdgeSet, Graph};

/// A formal variable of a [`Poly`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Var {
    /// Edge variable `A_e`, indexed by the parent graph's edge order.
    A(usize),
    /// Kinematic invariant attached to the sorted leg-label set isolated by
    /// a 2-forest (the side with fewer labels, ties broken lexicographically).
    S(Vec<u32>),
    /// Formal mass square `m_e²` of edge `e`.
    M(usize),
    /// Renormalization symbol `μ²`.
    Mu,
}

impl std::fmt::Display for Var {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Var::A(e) => write!(f, "A{e}"),
            Var::S(legs) => {
                let s: Vec<String> = legs.iter().map(|l| l.to_string()).collect();
                write!(f, "s({})", s.join(","))
            }
            Var::M(e) => write!(f, "m{e}"),
            Var::Mu => write!(f, "mu"),
        }
    }
}

/// A monomial: variable → positive power.
pub type Monomial = BTreeMap<Var, u32>;

/// A multivariate polynomial with integer coefficients, stored as a sorted
/// monomial → coefficient map with no zero entries.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, i64>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn constant(c: i64) -> Poly {
        let mut p = Poly::zero();
        if c != 0 {
            p.terms.insert(Monomial::new(), c);
        }
        p
    }

    pub fn one() -> Poly {
        Poly::constant(1)
    }

    pub fn var(v: Var) -> Poly {
        let mut m = Monomial::new();
        m.insert(v, 1);
        let mut p = Poly::zero();
        p.terms.insert(m, 1);
        p
    }

    /// The product of `A_e` over an edge set.
    pub fn edge_monomial(set: impl IntoIterator<Item = EdgeIx>) -> Poly {
        let mut m = Monomial::new();
        for e in set {
            *m.entry(Var::A(e)).or_insert(0) += 1;
        }
        let mut p = Poly::zero();
        p.terms.insert(m, 1);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, i64> {
        &self.terms
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    fn add_term(&mut self, m: Monomial, c: i64) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -*c;
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, &c1) in &self.terms {
            for (m2, &c2) in &other.terms {
                let mut m = m1.clone();
                for (v, &p) in m2 {
                    *m.entry(v.clone()).or_insert(0) += p;
                }
                out.add_term(m, c1 * c2);
            }
        }
        out
    }

    /// Substitutes every kinematic invariant `s(L)` by `−μ²` (the
    /// renormalization-point evaluation `φ₀`).
    pub fn subst_s_neg_mu(&self) -> Poly {
        let mut out = Poly::zero();
        for (m, &c) in &self.terms {
            let mut nm = Monomial::new();
            let mut sign = 1i64;
            for (v, &p) in m {
                match v {
                    Var::S(_) => {
                        if p % 2 == 1 {
                            sign = -sign;
                        }
                        *nm.entry(Var::Mu).or_insert(0) += p;
                    }
                    _ => {
                        nm.insert(v.clone(), p);
                    }
                }
            }
            out.add_term(nm, sign * c);
        }
        out
    }

    /// Sets the listed edge variables to zero (drops every monomial that
    /// contains any of them).
    pub fn set_edges_zero(&self, edges: &EdgeSet) -> Poly {
        let mut out = Poly::zero();
        for (m, &c) in &self.terms {
            if m.keys().any(|v| matches!(v, Var::A(e) if edges.contains(e))) {
                continue;
            }
            out.add_term(m.clone(), c);
        }
        out
    }

    /// Renames edge variables: `A_e → A_{map[e]}`; other variables pass
    /// through.  Missing entries keep their index.
    pub fn rename_edges(&self, map: &BTreeMap<usize, usize>) -> Poly {
        let mut out = Poly::zero();
        for (m, &c) in &self.terms {
            let mut nm = Monomial::new();
            for (v, &p) in m {
                let v = match v {
                    Var::A(e) => Var::A(*map.get(e).unwrap_or(e)),
                    other => other.clone(),
                };
                *nm.entry(v).or_insert(0) += p;
            }
            out.add_term(nm, c);
        }
        out
    }

    /// Total degree of a monomial counting only `A` variables.
    fn a_degree(m: &Monomial) -> u32 {
        m.iter().map(|(v, &p)| if matches!(v, Var::A(_)) { p } else { 0 }).sum()
    }

    /// Degree of a monomial counting only `A_e` with `e` in `edges`.
    fn a_degree_in(m: &Monomial, edges: &EdgeSet) -> u32 {
        m.iter()
            .map(|(v, &p)| match v {
                Var::A(e) if edges.contains(e) => p,
                _ => 0,
            })
            .sum()
    }

    /// `Some(d)` if every monomial has `A`-degree `d`.
    pub fn homogeneous_a_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(Self::a_degree);
        let d = it.next()?;
        it.all(|x| x == d).then_some(d)
    }

    /// Minimal monomial degree in the variables `A_e`, `e ∈ edges`
    /// (`None` for the zero polynomial).
    pub fn min_degree_in(&self, edges: &EdgeSet) -> Option<u32> {
        self.terms.keys().map(|m| Self::a_degree_in(m, edges)).min()
    }

    pub fn coefficients(&self) -> impl Iterator<Item = i64> + '_ {
        self.terms.values().copied()
    }
}

impl std::fmt::Display for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, &c) in &self.terms {
            let mag = c.abs();
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if mag != 1 || m.is_empty() {
                factors.push(mag.to_string());
            }
            for (v, &p) in m {
                if p == 1 {
                    factors.push(v.to_string());
                } else {
                    factors.push(format!("{v}^{p}"));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// Matroid rank of an edge subset: touched vertices minus subset components.
fn subset_rank(g: &Graph, subset: &EdgeSet) -> usize {
    if subset.is_empty() {
        return 0;
    }
    let touched = g.touched_vertices(subset);
    let labels = g.vertex_components(subset);
    let comps: BTreeSet<usize> = touched.iter().map(|&v| labels[v]).collect();
    touched.len() - comps.len()
}

/// Loop number of an edge subset (nullity of the graphic matroid).
pub fn subset_loops(g: &Graph, subset: &EdgeSet) -> usize {
    subset.len() - subset_rank(g, subset)
}

/// All maximal forests inside an edge subset: acyclic subsets of full rank.
fn maximal_forests_in(g: &Graph, subset: &EdgeSet) -> Vec<EdgeSet> {
    let rank = subset_rank(g, subset);
    let idx: Vec<EdgeIx> = subset.iter().copied().collect();
    let mut out = Vec::new();
    for comb in combinations(idx.len(), rank) {
        let set: EdgeSet = comb.into_iter().map(|i| idx[i]).collect();
        if g.is_acyclic(&set) {
            out.push(set);
        }
    }
    out
}

/// First Symanzik polynomial of an edge subset viewed as a subgraph:
/// `Σ_{maximal forests T ⊆ subset} Π_{e ∈ subset∖T} A_e`, in the parent
/// graph's edge variables.  Multiplicative over subset components.
pub fn psi_subset(g: &Graph, subset: &EdgeSet) -> Poly {
    let mut out = Poly::zero();
    for forest in maximal_forests_in(g, subset) {
        out = out.add(&Poly::edge_monomial(subset.difference(&forest).copied()));
    }
    out
}

/// First Symanzik polynomial `ψ(Γ) = Σ_T Π_{e∉T} A_e` of a connected graph.
pub fn psi(g: &Graph) -> Result<Poly> {
    if !g.is_connected() {
        return Err(FeynError::Disconnected);
    }
    let all: EdgeSet = (0..g.e()).collect();
    Ok(psi_subset(g, &all))
}

/// Leg labels (1-based) per component label for a spanning 2-forest.
fn leg_sides(g: &Graph, forest: &EdgeSet) -> BTreeMap<usize, Vec<u32>> {
    let labels = g.vertex_components(forest);
    let vo = g.vertex_of();
    let mut sides: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for (i, h) in g.externals.iter().enumerate() {
        sides.entry(labels[vo[h]]).or_default().push(i as u32 + 1);
    }
    sides
}

/// The canonical kinematic symbol of a leg bipartition: the side with fewer
/// labels (ties lexicographic), or `None` when a side carries no legs (the
/// crossing momentum vanishes by conservation).
fn s_symbol(g: &Graph, forest: &EdgeSet) -> Option<Var> {
    let sides = leg_sides(g, forest);
    if sides.len() < 2 {
        return None;
    }
    let mut v: Vec<Vec<u32>> = sides.into_values().collect();
    v.sort_by_key(|s| (s.len(), s.clone()));
    Some(Var::S(v.swap_remove(0)))
}

/// Second Symanzik polynomial with masses:
/// `φ(Γ) = Σ_{2-forests F} s_F Π_{e∉F} A_e − (Σ_{e massive} A_e m_e²)·ψ(Γ)`.
pub fn phi(g: &Graph, massive: &EdgeSet) -> Result<Poly> {
    if !g.is_connected() {
        return Err(FeynError::Disconnected);
    }
    let psi_g = psi(g)?;
    let all: EdgeSet = (0..g.e()).collect();
    let mut out = Poly::zero();
    for forest in g.spanning_forests(2) {
        if let Some(s) = s_symbol(g, &forest) {
            let mono = Poly::edge_monomial(all.difference(&forest).copied());
            out = out.add(&Poly::var(s).mul(&mono));
        }
    }
    for &e in massive {
        let am = Poly::var(Var::A(e)).mul(&Poly::var(Var::M(e)));
        out = out.sub(&am.mul(&psi_g));
    }
    Ok(out)
}

/// `φ₀`: the second Symanzik polynomial evaluated at the renormalization
/// point, every kinematic invariant replaced by `−μ²`.
pub fn phi0(g: &Graph, massive: &EdgeSet) -> Result<Poly> {
    Ok(phi(g, massive)?.subst_s_neg_mu())
}

/// Map from contracted-graph edge index to original edge index after
/// contracting `contracted` (the complement keeps its original order).
fn complement_map(g: &Graph, contracted: &EdgeSet) -> BTreeMap<usize, usize> {
    (0..g.e())
        .filter(|e| !contracted.contains(e))
        .enumerate()
        .map(|(new, old)| (new, old))
        .collect()
}

/// Report of the factorization check
/// `ψ(Γ) = ψ(Γ/F)·ψ(F) + R`, `φ(Γ) = φ(Γ/F)·ψ(F) + R̃`.
#[derive(Debug, Clone)]
pub struct FactorizationReport {
    pub f: EdgeSet,
    /// Loop number of the subgraph `F` = `A_F`-degree of `ψ(F)`.
    pub f_loops: usize,
    pub psi_f: Poly,
    /// Remainder `R = ψ(Γ) − ψ(Γ/F)ψ(F)`.
    pub r_psi: Poly,
    /// Remainder `R̃ = φ(Γ) − φ(Γ/F)ψ(F)` (all edges massive).
    pub r_phi: Poly,
    /// Both remainders have strictly higher degree in the `A_e`, `e ∈ F`,
    /// than `ψ(F)` has (vacuously for zero remainders).
    pub min_degree_ok: bool,
}

/// Checks the factorization of both Symanzik polynomials against the
/// contraction `Γ/F` of a full bridgeless subgraph `F` given as an edge set.
pub fn factorization_check(g: &Graph, f: &EdgeSet) -> Result<FactorizationReport> {
    if !g.is_connected() {
        return Err(FeynError::Disconnected);
    }
    let all_massive: EdgeSet = (0..g.e()).collect();
    let psi_g = psi(g)?;
    let phi_g = phi(g, &all_massive)?;
    let psi_f = psi_subset(g, f);
    let co = g.contract_edges(f, false);
    let map = complement_map(g, f);
    let co_massive: EdgeSet = (0..co.e()).collect();
    let psi_co = psi(&co)?.rename_edges(&map);
    let phi_co = phi(&co, &co_massive)?
        .rename_edges(&map)
        .rename_masses(&map);
    let r_psi = psi_g.sub(&psi_co.mul(&psi_f));
    let r_phi = phi_g.sub(&phi_co.mul(&psi_f));
    let f_loops = subset_loops(g, f);
    let bound = f_loops as u32;
    let ok = |r: &Poly| match r.min_degree_in(f) {
        None => true,
        Some(d) => d > bound,
    };
    let min_degree_ok = ok(&r_psi) && ok(&r_phi);
    Ok(FactorizationReport { f: f.clone(), f_loops, psi_f, r_psi, r_phi, min_degree_ok })
}

impl Poly {
    /// Renames mass symbols `m_e → m_{map[e]}` (companion to
    /// [`Poly::rename_edges`] for contracted graphs).
    pub fn rename_masses(&self, map: &BTreeMap<usize, usize>) -> Poly {
        let mut out = Poly::zero();
        for (m, &c) in &self.terms {
            let mut nm = Monomial::new();
            for (v, &p) in m {
                let v = match v {
                    Var::M(e) => Var::M(*map.get(e).unwrap_or(e)),
                    other => other.clone(),
                };
                *nm.entry(v).or_insert(0) += p;
            }
            out.add_term(nm, c);
        }
        out
    }
}

/// One forest term of the renormalized integrand.
#[derive(Debug, Clone)]
pub struct IntegrandTerm {
    /// The renormalization forest: pairwise disjoint-or-nested divergent
    /// subgraphs, each an edge set.
    pub forest: Vec<EdgeSet>,
    /// `(−1)^{|F|}` with `|F|` the number of subgraphs in the forest.
    pub sign: i64,
    /// Numerator of the log argument: `φ(Γ/F)ψ(F) + φ₀(F)ψ(Γ/F)`.
    pub log_num: Poly,
    /// Denominator of the log argument: `φ₀(Γ/F)ψ(F) + φ₀(F)ψ(Γ/F)`.
    pub log_den: Poly,
    /// `ψ(Γ/F)`, raised to `D/2` in the denominator.
    pub psi_co: Poly,
    /// `ψ(F)`, raised to `D/2` in the denominator.
    pub psi_sub: Poly,
}

/// The renormalized forest-sum integrand: a signed sum over renormalization
/// forests of log-ratio terms over `ψ^{D/2}(Γ/F)·ψ^{D/2}(F)`.
#[derive(Debug, Clone)]
pub struct IntegrandExpression {
    pub d: i64,
    /// `D/2`: the power on both `ψ` denominators.
    pub half_d: i64,
    /// Whether `Γ` is overall logarithmically divergent at this `D`
    /// (`|Γ|·D = 2e_Γ`); when false the expression is a formal warning-level
    /// result — higher-degree Taylor subtractions are out of scope.
    pub log_divergent: bool,
    pub terms: Vec<IntegrandTerm>,
}

/// Default divergent-subgraph candidates at spacetime dimension `D`: proper,
/// nonempty, connected, bridgeless full subgraphs that are themselves
/// logarithmically divergent (`|γ|·D = 2e_γ`).
pub fn divergent_candidates(g: &Graph, d: i64) -> Vec<EdgeSet> {
    g.coproduct_subgraphs()
        .into_iter()
        .filter(|s| {
            s.len() < g.e()
                && {
                    let sub = g.subgraph(s);
                    sub.is_connected()
                }
                && (subset_loops(g, s) as i64) * d == 2 * s.len() as i64
        })
        .collect()
}

fn nested_or_disjoint(a: &EdgeSet, b: &EdgeSet) -> bool {
    a.is_subset(b) || b.is_subset(a) || a.is_disjoint(b)
}

/// All renormalization forests over the given candidates: families of
/// pairwise nested-or-disjoint subgraphs (including the empty forest).
fn forests_over(candidates: &[EdgeSet]) -> Vec<Vec<EdgeSet>> {
    let mut out: Vec<Vec<EdgeSet>> = vec![Vec::new()];
    for c in candidates {
        let mut extra = Vec::new();
        for f in &out {
            if f.iter().all(|x| nested_or_disjoint(x, c)) {
                let mut nf = f.clone();
                nf.push(c.clone());
                extra.push(nf);
            }
        }
        out.extend(extra);
    }
    out
}

/// `ψ` and `φ₀` data of a forest, treated one subgraph at a time: each
/// `γ ∈ F` contributes through its reduction `γ̄ = γ / (children in F)`,
/// `ψ(F) = Π ψ(γ̄)` and `φ₀(F) = Σ_i φ₀(γ̄_i) Π_{j≠i} ψ(γ̄_j)` (the
/// derivation extension of `φ₀` to products; exact for disjoint forests).
fn forest_polys(g: &Graph, forest: &[EdgeSet], massive: &EdgeSet) -> Result<(Poly, Poly)> {
    let mut psis: Vec<Poly> = Vec::new();
    let mut phi0s: Vec<Poly> = Vec::new();
    for gamma in forest {
        let mut inner = EdgeSet::new();
        for delta in forest {
            if delta != gamma && delta.is_subset(gamma) {
                inner.extend(delta.iter().copied());
            }
        }
        let reduced: EdgeSet = gamma.difference(&inner).copied().collect();
        let contracted = g.contract_edges(&inner, false);
        let imap = complement_map(g, &inner);
        let rmap: BTreeMap<usize, usize> = imap.iter().map(|(&n, &o)| (o, n)).collect();
        let local: EdgeSet = reduced.iter().map(|e| rmap[e]).collect();
        psis.push(psi_subset(&contracted, &local).rename_edges(&imap));
        let sub = contracted.subgraph(&local);
        let smap: BTreeMap<usize, usize> =
            local.iter().enumerate().map(|(n, &l)| (n, imap[&l])).collect();
        let sub_massive: EdgeSet = (0..sub.e())
            .filter(|i| massive.contains(&smap[i]))
            .collect();
        phi0s.push(
            phi0(&sub, &sub_massive)?
                .rename_edges(&smap)
                .rename_masses(&smap),
        );
    }
    let mut psi_f = Poly::one();
    for p in &psis {
        psi_f = psi_f.mul(p);
    }
    let mut phi0_f = Poly::zero();
    for i in 0..phi0s.len() {
        let mut t = phi0s[i].clone();
        for (j, p) in psis.iter().enumerate() {
            if j != i {
                t = t.mul(p);
            }
        }
        phi0_f = phi0_f.add(&t);
    }
    Ok((psi_f, phi0_f))
}

/// Assembles the renormalized forest-sum integrand of a connected bridgeless
/// graph at even spacetime dimension `d`, with the default divergent-subgraph
/// candidates.  `massive` lists the edges carrying a formal mass.
pub fn renorm_integrand(g: &Graph, d: i64, massive: &EdgeSet) -> Result<IntegrandExpression> {
    let cands = divergent_candidates(g, d);
    renorm_integrand_with(g, d, massive, &cands)
}

/// As [`renorm_integrand`] with an explicit candidate list (the pluggable
/// divergent-subgraph predicate).
pub fn renorm_integrand_with(
    g: &Graph,
    d: i64,
    massive: &EdgeSet,
    candidates: &[EdgeSet],
) -> Result<IntegrandExpression> {
    if !g.is_connected() {
        return Err(FeynError::Disconnected);
    }
    if d % 2 != 0 {
        return Err(FeynError::Invalid(format!("odd spacetime dimension {d}")));
    }
    let log_divergent = (g.loops().max(0) as i64) * d == 2 * g.e() as i64;
    let mut terms = Vec::new();
    for forest in forests_over(candidates) {
        let union: EdgeSet = forest.iter().flatten().copied().collect();
        let co = g.contract_edges(&union, false);
        let map = complement_map(g, &union);
        let co_massive: EdgeSet =
            (0..co.e()).filter(|i| massive.contains(&map[i])).collect();
        let psi_co = psi(&co)?.rename_edges(&map);
        let phi_co = phi(&co, &co_massive)?.rename_edges(&map).rename_masses(&map);
        let phi0_co = phi_co.subst_s_neg_mu();
        let (psi_sub, phi0_sub) = forest_polys(g, &forest, massive)?;
        let log_num = phi_co.mul(&psi_sub).add(&phi0_sub.mul(&psi_co));
        let log_den = phi0_co.mul(&psi_sub).add(&phi0_sub.mul(&psi_co));
        let sign = if forest.len() % 2 == 0 { 1 } else { -1 };
        terms.push(IntegrandTerm { forest, sign, log_num, log_den, psi_co, psi_sub });
    }
    terms.sort_by_key(|t| (t.forest.len(), t.forest.clone()));
    Ok(IntegrandExpression { d, half_d: d / 2, log_divergent, terms })
}

/// Number of renormalization-free sectors: total orders on the edges in
/// which some spanning tree precedes all non-tree edges.  Closed form
/// `spt(Γ) · (e_Γ−|Γ|)! · |Γ|!` — per spanning tree, any order of its
/// `e_Γ−|Γ|` edges followed by any order of the `|Γ|` loop edges.
pub fn count_renorm_free_sectors(g: &Graph) -> Result<usize> {
    if !g.is_connected() {
        return Err(FeynError::Disconnected);
    }
    if !g.is_bridgeless() {
        return Err(FeynError::Invalid("graph has a bridge".into()));
    }
    let l = g.loops().max(0) as usize;
    Ok(g.spt() * factorial(g.e() - l) * factorial(l))
}

/// Brute-force sector oracle: iterates all `e_Γ!` edge orders and counts
/// those whose first `e_Γ−|Γ|` edges form a spanning tree.
pub fn sector_oracle(g: &Graph) -> Result<usize> {
    if !g.is_connected() {
        return Err(FeynError::Disconnected);
    }
    let l = g.loops().max(0) as usize;
    let et = g.e() - l;
    use itertools::Itertools;
    let mut count = 0;
    for perm in (0..g.e()).permutations(g.e()) {
        let prefix: EdgeSet = perm[..et].iter().copied().collect();
        if g.is_acyclic(&prefix) {
            count += 1;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    fn aset(v: &[usize]) -> EdgeSet {
        v.iter().copied().collect()
    }

    fn edge_poly(sets: &[&[usize]]) -> Poly {
        let mut p = Poly::zero();
        for s in sets {
            p = p.add(&Poly::edge_monomial(s.iter().copied()));
        }
        p
    }

    /// A tree-level propagator: two 3-valent vertices joined by one edge.
    fn single_edge_tree() -> Graph {
        Graph::validate(
            vec![vec![0, 1, 2], vec![3, 4, 5]],
            vec![(2, 3)],
            vec![0, 1, 4, 5],
        )
        .unwrap()
    }

    #[test]
    fn psi_examples() {
        // Triangle: one loop, spanning trees are the three edge pairs.
        let t = examples::triangle();
        assert_eq!(psi(&t).unwrap(), edge_poly(&[&[0], &[1], &[2]]));
        // Two-loop 3-point graph with a doubled edge:
        // ψ = (A0+A1)(A2+A3) + A2A3, five monomials for five trees.
        let dc = examples::dunce_cap();
        let expect = edge_poly(&[&[0], &[1]])
            .mul(&edge_poly(&[&[2], &[3]]))
            .add(&edge_poly(&[&[2, 3]]));
        assert_eq!(psi(&dc).unwrap(), expect);
        assert_eq!(psi(&dc).unwrap().n_terms(), dc.spt());
        // A tree graph has a unique spanning tree with empty complement.
        assert_eq!(psi(&single_edge_tree()).unwrap(), Poly::one());
        // Disconnected input is rejected.
        let two = Graph::from_parts(
            vec![vec![0, 1, 2], vec![3, 4, 5]],
            vec![],
            vec![0, 1, 2, 3, 4, 5],
            0,
        );
        assert!(psi(&two).is_err());
    }

    #[test]
    fn psi_invariants() {
        for g in [
            examples::triangle(),
            examples::bubble(),
            examples::dunce_cap(),
            examples::sunset(),
            examples::theta(),
            examples::triangle_with_bubble(),
            examples::self_loop(),
        ] {
            let p = psi(&g).unwrap();
            // Homogeneous of degree |Γ| with all coefficients 1, one
            // monomial per spanning tree.
            assert_eq!(p.homogeneous_a_degree(), Some(g.loops().max(0) as u32));
            assert!(p.coefficients().all(|c| c == 1));
            assert_eq!(p.n_terms(), g.spt());
            // Vanishing locus: zeroing the variables of any cycle kills ψ.
            for tree in g.spanning_trees().unwrap() {
                for e in 0..g.e() {
                    if tree.contains(&e) {
                        continue;
                    }
                    let cyc = g.fundamental_cycle(&tree, e).unwrap();
                    assert!(p.set_edges_zero(&cyc).is_zero());
                }
            }
        }
    }

    #[test]
    fn phi_triangle() {
        // All three edges massive: each 2-forest is a single edge isolating
        // one leg; φ = Σ_i s(i)·A_jA_k − (ΣA_em_e²)(A0+A1+A2).
        let t = examples::triangle();
        let massive: EdgeSet = (0..3).collect();
        let p = phi(&t, &massive).unwrap();
        let mut expect = Poly::zero();
        for (legs, pair) in [(vec![3u32], [1, 2]), (vec![1], [0, 2]), (vec![2], [0, 1])] {
            expect = expect
                .add(&Poly::var(Var::S(legs)).mul(&Poly::edge_monomial(pair)));
        }
        let mut mass = Poly::zero();
        for e in 0..3 {
            mass = mass.add(&Poly::var(Var::A(e)).mul(&Poly::var(Var::M(e))));
        }
        expect = expect.sub(&mass.mul(&psi(&t).unwrap()));
        assert_eq!(p, expect);
        // Mass-free part homogeneous of degree |Γ|+1 = 2.
        let massless = phi(&t, &EdgeSet::new()).unwrap();
        assert_eq!(massless.homogeneous_a_degree(), Some(2));
        // φ₀ replaces each invariant by −μ².
        let p0 = phi0(&t, &massive).unwrap();
        let mu = Poly::var(Var::Mu);
        let mut expect0 = Poly::zero();
        for pair in [[0, 1], [1, 2], [0, 2]] {
            expect0 = expect0.sub(&mu.mul(&Poly::edge_monomial(pair)));
        }
        expect0 = expect0.sub(&mass.mul(&psi(&t).unwrap()));
        assert_eq!(p0, expect0);
    }

    #[test]
    fn phi_dunce_cap_massless() {
        // Massless second Symanzik polynomial of the two-loop 3-point
        // graph; the parallel edges e2, e3 both isolate leg 1, so their
        // forests share one invariant.  Termwise (with A0 normalized to 1
        // and renaming s(1)→q², s(2)→p₁², s(3)→p₂²) this is
        // q²a₂(1+b₄) + p₁²a₃b₄ + p₂²a₂a₃b₄ in rescaled variables.
        let dc = examples::dunce_cap();
        let p = phi(&dc, &EdgeSet::new()).unwrap();
        let mut expect = Poly::zero();
        for (legs, rest) in [
            (vec![3u32], vec![1, 2, 3]),
            (vec![2], vec![0, 2, 3]),
            (vec![1], vec![0, 1, 3]),
            (vec![1], vec![0, 1, 2]),
        ] {
            expect = expect
                .add(&Poly::var(Var::S(legs)).mul(&Poly::edge_monomial(rest)));
        }
        assert_eq!(p, expect);
        assert_eq!(p.homogeneous_a_degree(), Some(3));
    }

    #[test]
    fn factorization_examples() {
        let dc = examples::dunce_cap();
        // F = the parallel-edge bubble {e2,e3}: ψ(F)=A2+A3,
        // ψ(Γ/F)=A0+A1, remainder A2A3 of A_F-degree 2 > 1.
        let f = aset(&[2, 3]);
        let rep = factorization_check(&dc, &f).unwrap();
        assert_eq!(rep.psi_f, edge_poly(&[&[2], &[3]]));
        assert_eq!(rep.r_psi, edge_poly(&[&[2, 3]]));
        assert_eq!(rep.f_loops, 1);
        assert!(rep.min_degree_ok);
        assert_eq!(rep.r_psi.min_degree_in(&f), Some(2));
        // Empty forest: zero remainders.
        let rep0 = factorization_check(&dc, &EdgeSet::new()).unwrap();
        assert!(rep0.r_psi.is_zero());
        assert!(rep0.r_phi.is_zero());
        assert!(rep0.min_degree_ok);
    }

    #[test]
    fn deletion_contraction() {
        // ψ(Γ) = ψ(Γ/e) + A_e ψ(Γ−e) for every non-bridge, non-self-loop
        // edge, brute-checked on the example graphs (ψ of the one-edge
        // deletion computed from the maximal-forest sum, multiplicative
        // over components).
        for g in [
            examples::triangle(),
            examples::bubble(),
            examples::dunce_cap(),
            examples::sunset(),
            examples::theta(),
            examples::triangle_with_bubble(),
        ] {
            let all: EdgeSet = (0..g.e()).collect();
            let p = psi(&g).unwrap();
            for e in 0..g.e() {
                if g.is_self_loop(e) || g.bridges().contains(&e) {
                    continue;
                }
                let mut one = EdgeSet::new();
                one.insert(e);
                let contracted = g.contract_edges(&one, false);
                let cmap = complement_map(&g, &one);
                let pc = psi(&contracted).unwrap().rename_edges(&cmap);
                let rest: EdgeSet = all.difference(&one).copied().collect();
                let pd = psi_subset(&g, &rest);
                let ae = Poly::var(Var::A(e));
                assert_eq!(p, pc.add(&ae.mul(&pd)), "edge {e}");
            }
        }
    }

    #[test]
    fn integrand_triangle() {
        // One loop at D=6: log divergent, a single empty-forest term whose
        // log ratio is φ/φ₀ over ψ³.
        let t = examples::triangle();
        let massive: EdgeSet = (0..3).collect();
        let ix = renorm_integrand(&t, 6, &massive).unwrap();
        assert!(ix.log_divergent);
        assert_eq!(ix.half_d, 3);
        assert_eq!(ix.terms.len(), 1);
        let term = &ix.terms[0];
        assert!(term.forest.is_empty());
        assert_eq!(term.sign, 1);
        assert_eq!(term.log_num, phi(&t, &massive).unwrap());
        assert_eq!(term.log_den, phi0(&t, &massive).unwrap());
        assert_eq!(term.psi_co, psi(&t).unwrap());
        assert_eq!(term.psi_sub, Poly::one());
        // At D=4 the triangle is not log divergent: warning status.
        assert!(!renorm_integrand(&t, 4, &massive).unwrap().log_divergent);
    }

    #[test]
    fn integrand_dunce_cap() {
        // Two loops at D=4: the parallel-edge bubble is the unique
        // divergent subgraph, giving the two-term forest sum.  The
        // subtraction term's log argument is
        // s(1)A0A1(A2+A3) − μ²A2A3(A0+A1) over
        // −μ²A0A1(A2+A3) − μ²A2A3(A0+A1); this matches the quoted
        // integrand display up to an overall sign inside both logs (which
        // cancels in the ratio) and the sector rescaling.
        let dc = examples::dunce_cap();
        let ix = renorm_integrand(&dc, 4, &EdgeSet::new()).unwrap();
        assert!(ix.log_divergent);
        assert_eq!(ix.terms.len(), 2);
        assert!(ix.terms[0].forest.is_empty());
        assert_eq!(ix.terms[1].forest, vec![aset(&[2, 3])]);
        assert_eq!(ix.terms[1].sign, -1);
        assert_eq!(ix.terms[1].psi_sub, edge_poly(&[&[2], &[3]]));
        assert_eq!(ix.terms[1].psi_co, edge_poly(&[&[0], &[1]]));
        let s1 = Poly::var(Var::S(vec![1]));
        let mu = Poly::var(Var::Mu);
        let a01 = edge_poly(&[&[0, 1]]);
        let a23 = edge_poly(&[&[2, 3]]);
        let psi_sub = edge_poly(&[&[2], &[3]]);
        let psi_co = edge_poly(&[&[0], &[1]]);
        let expect_num = s1.mul(&a01).mul(&psi_sub).sub(&mu.mul(&a23).mul(&psi_co));
        let expect_den = mu
            .neg()
            .mul(&a01)
            .mul(&psi_sub)
            .sub(&mu.mul(&a23).mul(&psi_co));
        assert_eq!(ix.terms[1].log_num, expect_num);
        assert_eq!(ix.terms[1].log_den, expect_den);
        // The empty-forest term carries the full-graph polynomials.
        assert_eq!(ix.terms[0].log_num, phi(&dc, &EdgeSet::new()).unwrap());
    }

    #[test]
    fn sector_counts() {
        // Triangle: one loop, all 3! = 6 sectors renormalization-free.
        let t = examples::triangle();
        assert_eq!(count_renorm_free_sectors(&t).unwrap(), 6);
        assert_eq!(sector_oracle(&t).unwrap(), 6);
        // Two-loop 3-point graph: 20 of the 24 sectors; the remaining four
        // need a blow-up.
        let dc = examples::dunce_cap();
        assert_eq!(count_renorm_free_sectors(&dc).unwrap(), 20);
        assert_eq!(sector_oracle(&dc).unwrap(), 20);
        // Bubble: both sectors.
        let b = examples::bubble();
        assert_eq!(count_renorm_free_sectors(&b).unwrap(), 2);
        assert_eq!(sector_oracle(&b).unwrap(), 2);
    }

    #[test]
    fn sector_formula_matches_oracle() {
        use std::collections::BTreeSet as S;
        let degrees: S<usize> = [3, 4].into_iter().collect();
        let mut checked = 0;
        for gen in crate::enumerate::enumerate_graphs(2, 2, &degrees)
            .into_iter()
            .chain(crate::enumerate::enumerate_graphs(3, 2, &degrees))
        {
            if gen.graph.e() > 5 {
                continue;
            }
            assert_eq!(
                count_renorm_free_sectors(&gen.graph).unwrap(),
                sector_oracle(&gen.graph).unwrap(),
            );
            checked += 1;
        }
        assert!(checked >= 5, "only {checked} graphs checked");
    }
}
