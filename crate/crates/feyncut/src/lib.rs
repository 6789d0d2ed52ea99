//! feyncut — the Hopf-algebraic and cointeraction structure of Feynman
//! graphs with Cutkosky cuts, over exact rational coefficients.
//!
//! The library is organised bottom-up:
//!
//! * [`graph`] — half-edge graph kernel: representation, validation,
//!   contraction/deletion, forests, cycles, subgraph enumeration.
//! * [`canon`] — canonical forms and automorphism counting for decorated
//!   multigraphs.
//! * [`enumerate`] — generation of connected bridgeless graphs up to
//!   isomorphism with symmetry factors.
//! * [`cut`] — pre-cut, cut, pre-Cutkosky and Cutkosky graphs; compatible
//!   spanning forests; associated graphs and leg partitions.
//! * [`algebra`] — exact-rational linear combinations of graph monomials and
//!   tensors thereof.
//! * [`hopf`] — the coproducts Δ_core, Δ_N, Δ_pC, Δ_GF, Δ_GT, antipodes and
//!   the coactions; necklaces live in [`necklace`].
//! * [`coint`] — the cointeracting incidence bialgebras, Galois conjugates,
//!   the w map and the combinatorial pairing.
//! * [`dse`] — couplings, insertion operators, combinatorial Green functions,
//!   invariant charges and the cut matrix.
//! * [`symanzik`] — graph polynomials, factorization identities, the
//!   renormalized forest-sum integrand and sector counting.
//! * [`json`] — the graph file format and canonical serialization.

pub mod algebra;
pub mod canon;
pub mod coint;
pub mod cut;
pub mod dse;
pub mod enumerate;
pub mod error;
pub mod examples;
pub mod graph;
pub mod hopf;
pub mod json;
pub mod necklace;
pub mod par;
pub mod symanzik;

pub use error::{FeynError, Result};
pub use graph::Graph;
