//! Exact-arithmetic toolkit for reasoning about interventionist "affects"
//! relations on causal models, the loops they can certify, and the
//! compatibility of such relation sets with partially ordered locations.
//!
//! The crate is layered bottom-up:
//!
//! * [`rational`] — exact rational numbers and their `"p/q"` JSON encoding.
//! * [`model`] — causal models (possibly cyclic, no self-loops) with exact
//!   mechanism tables, observed-distribution solving and interventions.
//! * [`independence`] — d-separation on directed graphs (cyclic allowed) and
//!   compatibility / faithfulness reports for a model's distribution.
//! * [`affects`] — the affects-relation engine: decision procedure,
//!   bounded enumeration, and classification (irreducible / indecreasable /
//!   strongly indecreasable), plus the conditionality transform.
//! * [`rules`] — sound transformation rules on affects relations and a
//!   model-backed verifier for them.
//! * [`infer`] — disjunctive cause extraction from classified affects sets.
//! * [`loops`] — potential cause graphs, loop-graph pruning, the exhaustive
//!   resolution oracle, and affects-chain loop classes.
//! * [`poset`] — finite strict partial orders, order queries, structural
//!   classification, and Minkowski-style grid generation.
//! * [`embedding`] — embeddings of relation variables into posets:
//!   compatibility tiers, stability notions, exhaustive search, and the
//!   higher-order reduction.
//! * [`catalog`] — bundled example models, relation sets, posets and
//!   embeddings used by the CLI recipes and the test suite.

pub mod affects;
pub mod catalog;
pub mod embedding;
pub mod independence;
pub mod infer;
pub mod loops;
pub mod model;
pub mod poset;
pub mod rational;
pub mod rules;

pub use affects::{AffectsBounds, AffectsSet, Engine, FlaggedRelation, Relation};
pub use embedding::{CompatMode, Embedding, EmbeddingReport, SearchRequire};
pub use infer::DisjunctiveCause;
pub use loops::{AclMode, AclReport, CauseGraph, IndexedArrow};
pub use model::{Assignment, Joint, Mechanism, Model, ModelError};
pub use poset::{Poset, PosetError};
pub use rational::Rat;
