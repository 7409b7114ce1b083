//! Bundled example models, relation sets, posets and embeddings.
//!
//! These back the CLI recipes and the test suite. Expected artifacts (like
//! frozen loop-graph arrow sets) live here so recipes can diff against
//! them.

use std::collections::BTreeSet;

use crate::affects::{AffectsSet, FlaggedRelation, Relation};
use crate::embedding::Embedding;
use crate::loops::{CauseGraph, IndexedArrow};
use crate::model::{Mechanism, Model, Node};
use crate::poset::Poset;
use crate::rational::rat;

fn uniform_bit(name: &str, observed: bool) -> Node {
    Node {
        name: name.to_string(),
        cardinality: 2,
        observed,
        parents: Vec::new(),
        mechanism: Mechanism::Exogenous(vec![rat(1, 2), rat(1, 2)]),
    }
}

/// Parity table over `arity` binary parents, row-major with the last parent
/// fastest.
fn xor_table(arity: usize) -> Vec<usize> {
    (0..(1usize << arity))
        .map(|row| (row.count_ones() as usize) % 2)
        .collect()
}

fn det(name: &str, observed: bool, parents: Vec<usize>, table: Vec<usize>) -> Node {
    Node {
        name: name.to_string(),
        cardinality: 2,
        observed,
        parents,
        mechanism: Mechanism::Deterministic(table),
    }
}

/// Two uniform bits and their parity: `M`, `K` exogenous, `M' = M xor K`.
pub fn otp_model() -> Model {
    Model::new(vec![
        uniform_bit("M", true),
        uniform_bit("K", true),
        det("M'", true, vec![0, 1], xor_table(2)),
    ])
    .unwrap()
}

/// Hidden common cause with a masking input: `L` hidden uniform, `B`
/// observed uniform, `A = L`, `C = L xor B`.
pub fn jamming_model() -> Model {
    Model::new(vec![
        uniform_bit("L", false),
        uniform_bit("B", true),
        det("A", true, vec![0], vec![0, 1]),
        det("C", true, vec![0, 1], xor_table(2)),
    ])
    .unwrap()
}

/// A four-node chain with a parity collector: `A` uniform, `B = A`,
/// `C = B`, `D = A xor B xor C`.
pub fn chain_parity_model() -> Model {
    Model::new(vec![
        uniform_bit("A", true),
        det("B", true, vec![0], vec![0, 1]),
        det("C", true, vec![1], vec![0, 1]),
        det("D", true, vec![0, 1, 2], xor_table(3)),
    ])
    .unwrap()
}

/// The jamming model extended with `D = A xor C`.
pub fn jamming_parity_model() -> Model {
    Model::new(vec![
        uniform_bit("L", false),
        uniform_bit("B", true),
        det("A", true, vec![0], vec![0, 1]),
        det("C", true, vec![0, 1], xor_table(2)),
        det("D", true, vec![2, 3], xor_table(2)),
    ])
    .unwrap()
}

/// Consistent deterministic two-cycle: `L` hidden uniform, `X = L xor Y`,
/// `Y = L xor X`.
pub fn two_cycle_model() -> Model {
    Model::new(vec![
        uniform_bit("L", false),
        det("X", true, vec![0, 2], xor_table(2)),
        det("Y", true, vec![0, 1], xor_table(2)),
    ])
    .unwrap()
}

/// Inconsistent deterministic two-cycle: `X = Y`, `Y = not X`.
pub fn two_cycle_inconsistent_model() -> Model {
    Model::new(vec![
        det("X", true, vec![1], vec![0, 1]),
        det("Y", true, vec![0], vec![1, 0]),
    ])
    .unwrap()
}

fn flagged(x: &[&str], y: &[&str]) -> FlaggedRelation {
    FlaggedRelation {
        rel: Relation::new(x, y, &[], &[]),
        irreducible: true,
        indecreasable: true,
        strong: false,
    }
}

fn abstract_set(rels: &[(&[&str], &[&str])]) -> AffectsSet {
    let mut set = AffectsSet {
        present: rels.iter().map(|(x, y)| flagged(x, y)).collect(),
        absent: Vec::new(),
    };
    set.normalize();
    set
}

/// A set whose loop graph is empty.
pub fn noacl_set() -> AffectsSet {
    abstract_set(&[(&["A"], &["B", "C"]), (&["B"], &["D"]), (&["D"], &["A"])])
}

/// A crosswise pair plus satellites; its loop graph is the two-cycle
/// `e1 <-> e2`.
pub fn acl3_set() -> AffectsSet {
    abstract_set(&[
        (&["e1", "e3", "e4"], &["e2"]),
        (&["e2", "e5"], &["e1"]),
        (&["e4"], &["e1"]),
        (&["e2"], &["e6"]),
    ])
}

/// The minimal chain-cycle pair.
pub fn acl5_set() -> AffectsSet {
    abstract_set(&[(&["B"], &["A", "C"]), (&["A", "C"], &["B"])])
}

/// A branching loop set whose loop graph keeps all six variables.
pub fn acl6a_set() -> AffectsSet {
    abstract_set(&[
        (&["A", "B"], &["C", "D"]),
        (&["C"], &["A"]),
        (&["D"], &["E", "F"]),
        (&["E"], &["B"]),
        (&["F"], &["A"]),
    ])
}

/// A loop set that is not built from complete affects chains.
pub fn acl7_set() -> AffectsSet {
    abstract_set(&[
        (&["X"], &["Y"]),
        (&["Y"], &["A", "B"]),
        (&["A"], &["X"]),
        (&["Z"], &["A", "B"]),
        (&["B"], &["Z"]),
    ])
}

/// A set whose loop graph drops one variable and two arrow families.
pub fn acl11_set() -> AffectsSet {
    abstract_set(&[
        (&["X"], &["A", "B"]),
        (&["A"], &["X"]),
        (&["C"], &["A", "B"]),
        (&["B"], &["C", "D"]),
        (&["B", "D"], &["A", "C"]),
        (&["D"], &["B", "E"]),
        (&["B"], &["E"]),
    ])
}

/// A fully symmetric three-variable loop set.
pub fn acl12_set() -> AffectsSet {
    abstract_set(&[
        (&["A"], &["B", "C"]),
        (&["B"], &["A", "C"]),
        (&["C"], &["A", "B"]),
    ])
}

fn graph(nodes: &[&str], arrows: &[(&str, &str, &[&str])]) -> CauseGraph {
    CauseGraph {
        nodes: nodes.iter().map(|s| s.to_string()).collect(),
        arrows: arrows
            .iter()
            .map(|(s, t, idx)| IndexedArrow {
                source: s.to_string(),
                target: t.to_string(),
                index: idx.iter().map(|n| n.to_string()).collect(),
            })
            .collect(),
    }
}

/// Frozen expected loop graph for [`acl3_set`].
pub fn acl3_expected_loop_graph() -> CauseGraph {
    graph(
        &["e1", "e2"],
        &[("e1", "e2", &["e2"]), ("e2", "e1", &["e1"])],
    )
}

/// Frozen expected loop graph for [`acl6a_set`] (equals its full potential
/// cause graph).
pub fn acl6a_expected_loop_graph() -> CauseGraph {
    let cd: &[&str] = &["C", "D"];
    let ef: &[&str] = &["E", "F"];
    graph(
        &["A", "B", "C", "D", "E", "F"],
        &[
            ("A", "C", cd),
            ("A", "D", cd),
            ("B", "C", cd),
            ("B", "D", cd),
            ("C", "A", &["A"]),
            ("D", "E", ef),
            ("D", "F", ef),
            ("E", "B", &["B"]),
            ("F", "A", &["A"]),
        ],
    )
}

/// Frozen expected loop graph for [`acl11_set`]: variable `E` and the two
/// arrow families targeting it are pruned away.
pub fn acl11_expected_loop_graph() -> CauseGraph {
    let ab: &[&str] = &["A", "B"];
    let cd: &[&str] = &["C", "D"];
    let ac: &[&str] = &["A", "C"];
    graph(
        &["A", "B", "C", "D", "X"],
        &[
            ("A", "X", &["X"]),
            ("X", "A", ab),
            ("X", "B", ab),
            ("B", "C", cd),
            ("B", "D", cd),
            ("B", "A", ac),
            ("B", "C", ac),
            ("C", "A", ab),
            ("C", "B", ab),
            ("D", "A", ac),
            ("D", "C", ac),
        ],
    )
}

/// The four-element poset `{p, q} < r < s`.
pub fn acl5_witness_poset() -> Poset {
    Poset::validate(
        ["p", "q", "r", "s"].iter().map(|s| s.to_string()).collect(),
        &[
            ("p".into(), "r".into()),
            ("q".into(), "r".into()),
            ("r".into(), "s".into()),
        ],
    )
    .unwrap()
}

/// A non-degenerate base-tier compatible embedding of [`acl5_set`] into
/// [`acl5_witness_poset`].
pub fn acl5_witness_embedding() -> Embedding {
    Embedding {
        map: [("A", "p"), ("C", "q"), ("B", "r")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
    }
}

/// Two chains meeting at a top element: `A < X < Y < a` and `B < Z < a`.
pub fn acl7_poset() -> Poset {
    Poset::validate(
        ["A", "X", "Y", "B", "Z", "a"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        &[
            ("A".into(), "X".into()),
            ("X".into(), "Y".into()),
            ("Y".into(), "a".into()),
            ("B".into(), "Z".into()),
            ("Z".into(), "a".into()),
        ],
    )
    .unwrap()
}

/// The same-name embedding of [`acl7_set`] into [`acl7_poset`].
pub fn acl7_embedding() -> Embedding {
    Embedding {
        map: ["A", "B", "X", "Y", "Z"]
            .iter()
            .map(|s| (s.to_string(), s.to_string()))
            .collect(),
    }
}

/// Three incomparable elements below a common top.
pub fn acl12_poset() -> Poset {
    Poset::validate(
        ["A", "B", "C", "top"].iter().map(|s| s.to_string()).collect(),
        &[
            ("A".into(), "top".into()),
            ("B".into(), "top".into()),
            ("C".into(), "top".into()),
        ],
    )
    .unwrap()
}

/// The same-name embedding of [`acl12_set`] into [`acl12_poset`].
pub fn acl12_embedding() -> Embedding {
    Embedding {
        map: ["A", "B", "C"]
            .iter()
            .map(|s| (s.to_string(), s.to_string()))
            .collect(),
    }
}

/// The nine relations present in [`otp_model`] within block bounds of two.
pub fn otp_expected_present() -> Vec<Relation> {
    let mut v = vec![
        Relation::new(&["K"], &["M", "M'"], &[], &[]),
        Relation::new(&["M"], &["K", "M'"], &[], &[]),
        Relation::new(&["M", "K"], &["M'"], &[], &[]),
        Relation::new(&["M"], &["M'"], &["K"], &[]),
        Relation::new(&["M"], &["M'"], &[], &["K"]),
        Relation::new(&["M"], &["K"], &[], &["M'"]),
        Relation::new(&["K"], &["M"], &[], &["M'"]),
        Relation::new(&["K"], &["M'"], &["M"], &[]),
        Relation::new(&["K"], &["M'"], &[], &["M"]),
    ];
    v.sort();
    v
}

/// Relations absent from [`otp_model`] that the frozen list calls out.
pub fn otp_expected_absent() -> Vec<Relation> {
    vec![
        Relation::new(&["M"], &["M'"], &[], &[]),
        Relation::new(&["K"], &["M'"], &[], &[]),
    ]
}

/// The complete present set of [`jamming_model`] over its observed nodes.
pub fn jamming_expected_present() -> Vec<Relation> {
    let mut v = vec![
        Relation::new(&["B"], &["A", "C"], &[], &[]),
        Relation::new(&["B"], &["C"], &[], &["A"]),
        Relation::new(&["B"], &["A"], &[], &["C"]),
    ];
    v.sort();
    v
}

/// All variables mentioned by a relation list.
pub fn variables_of(rels: &[Relation]) -> BTreeSet<String> {
    rels.iter().flat_map(|r| r.variables()).collect()
}
