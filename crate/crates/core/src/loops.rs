//! Potential cause graphs, loop-graph pruning, the exhaustive resolution
//! oracle, and affects-chain loop classes.
//!
//! An irreducible present relation contributes, for every antecedent
//! variable, one indexed arrow to each member of its affected-plus-
//! conditioned block; the index identifies the arrow family. Pruning first
//! repeatedly deletes childless nodes — removing, for each incoming arrow,
//! its entire same-source same-index family — and then repeatedly deletes
//! parentless nodes. A nonempty pruned graph is equivalent to the relation
//! set implying a causal loop; for the extended graph (which adds arrows
//! from undroppable do-block elements) non-emptiness is sufficient only.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::affects::{AffectsSet, Relation};

/// Errors from loop analysis.
#[derive(Debug, Error)]
pub enum LoopError {
    /// The oracle would need more resolutions than the cap allows.
    #[error("resolution count {needed} exceeds cap {cap}")]
    CapExceeded {
        /// Required number of resolutions.
        needed: u128,
        /// The configured cap.
        cap: u128,
    },
    /// Invalid input.
    #[error("validation error: {0}")]
    Validation(String),
}

/// A directed arrow labelled with its originating index set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndexedArrow {
    /// Source variable.
    pub source: String,
    /// Target variable.
    pub target: String,
    /// Index set (the affected-plus-conditioned block of the originating
    /// relation).
    pub index: BTreeSet<String>,
}

/// A graph of indexed arrows over variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CauseGraph {
    /// Variables.
    pub nodes: BTreeSet<String>,
    /// Arrows.
    pub arrows: BTreeSet<IndexedArrow>,
}

impl CauseGraph {
    /// True iff the graph has no nodes.
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// DOT rendering; singleton-index arrows are solid, larger families
    /// dashed, with the index as the edge label.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph cause_graph {\n");
        for n in &self.nodes {
            out.push_str(&format!("  \"{n}\";\n"));
        }
        for a in &self.arrows {
            let label = a.index.iter().cloned().collect::<Vec<_>>().join(" ");
            let style = if a.index.len() > 1 { "dashed" } else { "solid" };
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{}\", style={}];\n",
                a.source, a.target, label, style
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Builds the potential cause graph of a classified affects set.
///
/// Only present relations flagged irreducible contribute; others are
/// skipped and reported in the returned warnings. With `extended`, arrows
/// are added from each do-block element whose removal is witnessed to
/// destroy the relation (explicit absence entry or indecreasable flag).
/// After construction, arrow families from the same source whose index is a
/// strict superset of another family's index from that source are removed.
pub fn build_potential_cause_graph(
    set: &AffectsSet,
    extended: bool,
) -> (CauseGraph, Vec<String>) {
    let mut warnings = Vec::new();
    let mut nodes: BTreeSet<String> = BTreeSet::new();
    let mut arrows: BTreeSet<IndexedArrow> = BTreeSet::new();
    for f in &set.present {
        nodes.extend(f.rel.variables());
        let index: BTreeSet<String> = f.rel.y.union(&f.rel.w).cloned().collect();
        if f.irreducible {
            for e in &f.rel.x {
                for t in &index {
                    arrows.insert(IndexedArrow {
                        source: e.clone(),
                        target: t.clone(),
                        index: index.clone(),
                    });
                }
            }
        } else {
            warnings.push(format!(
                "skipping non-irreducible present relation {}",
                f.rel
            ));
        }
        if extended {
            for e in &f.rel.z {
                let dropped = Relation {
                    x: f.rel.x.clone(),
                    y: f.rel.y.clone(),
                    z: f.rel.z.iter().filter(|n| *n != e).cloned().collect(),
                    w: f.rel.w.clone(),
                };
                if f.indecreasable || set.absent.contains(&dropped) {
                    for t in &index {
                        arrows.insert(IndexedArrow {
                            source: e.clone(),
                            target: t.clone(),
                            index: index.clone(),
                        });
                    }
                }
            }
        }
    }

    // Same-source index-superset removal.
    let mut families: BTreeMap<String, BTreeSet<BTreeSet<String>>> = BTreeMap::new();
    for a in &arrows {
        families
            .entry(a.source.clone())
            .or_default()
            .insert(a.index.clone());
    }
    arrows.retain(|a| {
        !families[&a.source]
            .iter()
            .any(|other| other != &a.index && other.is_subset(&a.index))
    });

    (CauseGraph { nodes, arrows }, warnings)
}

/// Prunes a potential cause graph to its loop graph, breaking ties between
/// simultaneously childless nodes by `priority` order (missing names sort
/// last alphabetically). The result is independent of the tie-break.
pub fn build_loop_graph_with_priority(graph: &CauseGraph, priority: &[String]) -> CauseGraph {
    let rank = |n: &String| -> (usize, String) {
        (
            priority
                .iter()
                .position(|p| p == n)
                .unwrap_or(priority.len()),
            n.clone(),
        )
    };
    let mut g = graph.clone();
    // Phase 1: repeatedly delete childless nodes; each incoming arrow takes
    // its whole same-source same-index family with it.
    loop {
        let childless: Vec<String> = g
            .nodes
            .iter()
            .filter(|n| !g.arrows.iter().any(|a| &a.source == *n))
            .cloned()
            .collect();
        let Some(victim) = childless.into_iter().min_by_key(rank) else {
            break;
        };
        let incoming: Vec<IndexedArrow> = g
            .arrows
            .iter()
            .filter(|a| a.target == victim)
            .cloned()
            .collect();
        g.nodes.remove(&victim);
        for arrow in incoming {
            g.arrows
                .retain(|a| !(a.source == arrow.source && a.index == arrow.index));
        }
        g.arrows.retain(|a| a.target != victim && a.source != victim);
    }
    // Phase 2: repeatedly delete parentless nodes and their outgoing arrows.
    loop {
        let parentless: Vec<String> = g
            .nodes
            .iter()
            .filter(|n| !g.arrows.iter().any(|a| &a.target == *n))
            .cloned()
            .collect();
        if parentless.is_empty() {
            break;
        }
        for n in parentless {
            g.nodes.remove(&n);
            g.arrows.retain(|a| a.source != n && a.target != n);
        }
    }
    g
}

/// Prunes a potential cause graph to its loop graph.
pub fn build_loop_graph(graph: &CauseGraph) -> CauseGraph {
    build_loop_graph_with_priority(graph, &[])
}

/// Detection mode for [`detect_acl`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AclMode {
    /// Loop-graph pruning only.
    LoopGraph,
    /// Exhaustive resolution oracle only.
    Oracle,
    /// Both, with an agreement check.
    Both,
}

/// Result of loop detection.
#[derive(Debug, Clone, Serialize)]
pub struct AclReport {
    /// Whether the set implies a causal loop (`null` when the extended
    /// graph is empty but absence data was in play, which is inconclusive).
    pub acl_present: Option<bool>,
    /// Loop-graph result, when computed.
    pub loop_graph_nonempty: Option<bool>,
    /// Oracle result, when computed.
    pub oracle_all_cyclic: Option<bool>,
    /// Number of resolutions the oracle examined.
    pub resolutions_checked: Option<u128>,
    /// An acyclic resolution, if the oracle found one.
    pub acyclic_witness: Option<Vec<(String, String)>>,
    /// Agreement between the two routes (both-mode only).
    pub agree: Option<bool>,
    /// Relations skipped or other advisories.
    pub warnings: Vec<String>,
}

fn digraph_is_cyclic(nodes: &BTreeSet<String>, edges: &BTreeSet<(String, String)>) -> bool {
    let idx: HashMap<&String, usize> = nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut graph = petgraph::graph::DiGraph::<(), ()>::new();
    let handles: Vec<_> = (0..nodes.len()).map(|_| graph.add_node(())).collect();
    for (s, t) in edges {
        graph.add_edge(handles[idx[s]], handles[idx[t]], ());
    }
    petgraph::algo::is_cyclic_directed(&graph)
}

/// Runs the exhaustive resolution oracle on the irreducible present
/// relations: a loop is implied iff every choice of one target per
/// (relation, antecedent-variable) pair yields a cyclic digraph.
pub fn oracle_acl(
    set: &AffectsSet,
    cap: u128,
) -> Result<(bool, u128, Option<Vec<(String, String)>>), LoopError> {
    let mut slots: Vec<(String, Vec<String>)> = Vec::new();
    let mut nodes: BTreeSet<String> = BTreeSet::new();
    for f in &set.present {
        if !f.irreducible {
            continue;
        }
        nodes.extend(f.rel.variables());
        let targets: Vec<String> = f.rel.y.union(&f.rel.w).cloned().collect();
        for e in &f.rel.x {
            slots.push((e.clone(), targets.clone()));
        }
    }
    let mut needed: u128 = 1;
    for (_, ts) in &slots {
        needed = needed.saturating_mul(ts.len() as u128);
        if needed > cap {
            return Err(LoopError::CapExceeded { needed, cap });
        }
    }
    let mut choice = vec![0usize; slots.len()];
    let mut checked: u128 = 0;
    loop {
        checked += 1;
        let edges: BTreeSet<(String, String)> = slots
            .iter()
            .zip(&choice)
            .map(|((s, ts), &c)| (s.clone(), ts[c].clone()))
            .collect();
        if !digraph_is_cyclic(&nodes, &edges) {
            return Ok((false, checked, Some(edges.into_iter().collect())));
        }
        let mut carry = true;
        for (c, (_, ts)) in choice.iter_mut().zip(&slots) {
            if carry {
                *c += 1;
                if *c == ts.len() {
                    *c = 0;
                } else {
                    carry = false;
                }
            }
        }
        if carry {
            break;
        }
    }
    Ok((true, checked, None))
}

/// Detects whether a classified affects set implies a causal loop.
pub fn detect_acl(
    set: &AffectsSet,
    mode: AclMode,
    extended: bool,
    cap: u128,
) -> Result<AclReport, LoopError> {
    if extended && mode != AclMode::LoopGraph {
        return Err(LoopError::Validation(
            "extended detection is only defined for loop-graph mode".into(),
        ));
    }
    let mut report = AclReport {
        acl_present: None,
        loop_graph_nonempty: None,
        oracle_all_cyclic: None,
        resolutions_checked: None,
        acyclic_witness: None,
        agree: None,
        warnings: Vec::new(),
    };
    if matches!(mode, AclMode::LoopGraph | AclMode::Both) {
        let (pot, warnings) = build_potential_cause_graph(set, extended);
        report.warnings.extend(warnings);
        let lg = build_loop_graph(&pot);
        report.loop_graph_nonempty = Some(!lg.is_empty());
        if extended {
            // One-directional: non-emptiness certifies a loop; emptiness is
            // inconclusive whenever absence-derived arrows were available.
            let absence_used = !set.absent.is_empty()
                || set
                    .present
                    .iter()
                    .any(|f| f.indecreasable && !f.rel.z.is_empty());
            report.acl_present = if !lg.is_empty() {
                Some(true)
            } else if absence_used {
                None
            } else {
                Some(false)
            };
        } else {
            report.acl_present = Some(!lg.is_empty());
        }
    }
    if matches!(mode, AclMode::Oracle | AclMode::Both) {
        let (all_cyclic, checked, witness) = oracle_acl(set, cap)?;
        report.oracle_all_cyclic = Some(all_cyclic);
        report.resolutions_checked = Some(checked);
        report.acyclic_witness = witness;
        if mode == AclMode::Oracle {
            report.acl_present = Some(all_cyclic);
        }
    }
    if mode == AclMode::Both {
        report.agree = Some(report.loop_graph_nonempty == report.oracle_all_cyclic);
    }
    Ok(report)
}

/// Affects-chain classification result.
#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    /// Simple chains (sequences of irreducible present relations where each
    /// affected block is contained in the next antecedent block), capped.
    pub chains: Vec<Vec<Relation>>,
    /// Matched loop classes among `ACL2a`, `ACL3`, `ACL5`, `ACL6a`.
    pub classes: BTreeSet<String>,
}

/// Enumerates affects chains and matches the chain-based loop classes.
pub fn find_affects_chains_and_classify(set: &AffectsSet) -> ChainReport {
    let rels: Vec<(BTreeSet<String>, BTreeSet<String>, Relation)> = set
        .present
        .iter()
        .filter(|f| f.irreducible)
        .map(|f| {
            (
                f.rel.x.clone(),
                f.rel.y.union(&f.rel.w).cloned().collect(),
                f.rel.clone(),
            )
        })
        .collect();
    let n = rels.len();
    let edge = |i: usize, j: usize| rels[i].1.is_subset(&rels[j].0);

    // Simple chains (no repeated relation), capped for output sanity.
    const CHAIN_CAP: usize = 1000;
    let mut chains: Vec<Vec<Relation>> = Vec::new();
    fn extend(
        rels: &[(BTreeSet<String>, BTreeSet<String>, Relation)],
        edge: &dyn Fn(usize, usize) -> bool,
        path: &mut Vec<usize>,
        chains: &mut Vec<Vec<Relation>>,
        cap: usize,
    ) {
        if chains.len() >= cap {
            return;
        }
        chains.push(path.iter().map(|&i| rels[i].2.clone()).collect());
        let last = *path.last().unwrap();
        for j in 0..rels.len() {
            if !path.contains(&j) && edge(last, j) {
                path.push(j);
                extend(rels, edge, path, chains, cap);
                path.pop();
            }
        }
    }
    for i in 0..n {
        let mut path = vec![i];
        extend(&rels, &edge, &mut path, &mut chains, CHAIN_CAP);
    }

    let mut classes = BTreeSet::new();

    // ACL2a: a directed cycle among singleton-to-singleton relations.
    {
        let mut nodes: BTreeSet<String> = BTreeSet::new();
        let mut edges: BTreeSet<(String, String)> = BTreeSet::new();
        for (x, t, _) in &rels {
            if x.len() == 1 && t.len() == 1 {
                let s = x.iter().next().unwrap().clone();
                let d = t.iter().next().unwrap().clone();
                nodes.insert(s.clone());
                nodes.insert(d.clone());
                edges.insert((s, d));
            }
        }
        if digraph_is_cyclic(&nodes, &edges) {
            classes.insert("ACL2a".to_string());
        }
    }

    // ACL3: disjoint antecedent blocks pointing single elements into each
    // other.
    'acl3: for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (s1, t1, _) = &rels[i];
            let (s2, t2, _) = &rels[j];
            if t1.len() == 1
                && t2.len() == 1
                && s1.is_disjoint(s2)
                && s2.contains(t1.iter().next().unwrap())
                && s1.contains(t2.iter().next().unwrap())
            {
                classes.insert("ACL3".to_string());
                break 'acl3;
            }
        }
    }

    // ACL5: a cycle in the chain meta-graph.
    {
        let nodes: BTreeSet<String> = (0..n).map(|i| i.to_string()).collect();
        let edges: BTreeSet<(String, String)> = (0..n)
            .flat_map(|i| {
                (0..n)
                    .filter(move |&j| edge(i, j))
                    .map(move |j| (i.to_string(), j.to_string()))
            })
            .collect();
        if digraph_is_cyclic(&nodes, &edges) {
            classes.insert("ACL5".to_string());
        }
    }

    // ACL6a: a chain from S1 to S2 such that every element of S2 resolves
    // back into S1, possibly via finitely many disjoint intermediate sets.
    {
        // Relation-level reachability closure.
        let mut reach = vec![vec![false; n]; n];
        for (i, row) in reach.iter_mut().enumerate() {
            row[i] = true;
        }
        loop {
            let mut changed = false;
            for i in 0..n {
                for j in 0..n {
                    if !reach[i][j] {
                        let linked = (0..n).any(|k| reach[i][k] && edge(k, j));
                        if linked {
                            reach[i][j] = true;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let starts_with = |e: &String| -> Vec<usize> {
            (0..n).filter(|&i| rels[i].0.contains(e)).collect()
        };
        let reach_elem = |e: &String| -> Vec<usize> {
            let mut out = vec![false; n];
            for s in starts_with(e) {
                for (j, r) in reach[s].iter().enumerate() {
                    if *r {
                        out[j] = true;
                    }
                }
            }
            (0..n).filter(|&j| out[j]).collect()
        };
        fn resolves(
            rels: &[(BTreeSet<String>, BTreeSet<String>, Relation)],
            reach_elem: &dyn Fn(&String) -> Vec<usize>,
            e: &String,
            s1: &BTreeSet<String>,
            avoid: &BTreeSet<String>,
            depth: usize,
        ) -> bool {
            let reachable = reach_elem(e);
            if reachable.iter().any(|&j| rels[j].1.is_subset(s1)) {
                return true;
            }
            if depth == 0 {
                return false;
            }
            for &j in &reachable {
                let t = &rels[j].1;
                if t.is_disjoint(avoid)
                    && t.iter()
                        .all(|e2| resolves(rels, reach_elem, e2, s1, t, depth - 1))
                {
                    return true;
                }
            }
            false
        }
        'acl6a: for r0 in 0..n {
            let s1 = &rels[r0].0;
            for (r_end, reached) in reach[r0].iter().enumerate() {
                if !*reached {
                    continue;
                }
                let s2 = &rels[r_end].1;
                if s2
                    .iter()
                    .all(|e2| resolves(&rels, &reach_elem, e2, s1, s2, n))
                {
                    classes.insert("ACL6a".to_string());
                    break 'acl6a;
                }
            }
        }
    }

    ChainReport { chains, classes }
}
