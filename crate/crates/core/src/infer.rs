//! Extraction of disjunctive cause statements from classified affects sets.
//!
//! An irreducible present relation certifies, for every antecedent variable,
//! a cause of at least one affected-or-conditioned variable. A higher-order
//! relation whose do-block element cannot be dropped (witnessed either by an
//! explicit absence or by the indecreasable flag) certifies the same for
//! that do-block element.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::affects::{AffectsSet, Relation};

/// `source` causes at least one member of `targets`.
#[derive(Debug, Clone, Serialize, PartialEq, Eq, PartialOrd, Ord)]
pub struct DisjunctiveCause {
    /// The causing variable.
    pub source: String,
    /// Candidate caused variables (never contains `source`).
    pub targets: BTreeSet<String>,
}

/// Result of cause inference: statements plus input-consistency violations.
#[derive(Debug, Clone, Serialize)]
pub struct CauseReport {
    /// Inferred disjunctive causes, subsumption-reduced and sorted.
    pub causes: Vec<DisjunctiveCause>,
    /// Inconsistencies found in the input set.
    pub violations: Vec<String>,
}

/// Infers disjunctive causes from a classified affects set.
pub fn infer_causes(set: &AffectsSet) -> CauseReport {
    let mut violations = Vec::new();
    for f in &set.present {
        if let Err(e) = f.rel.check_well_formed() {
            violations.push(e.to_string());
        }
        if set.absent.contains(&f.rel) {
            violations.push(format!("relation {} listed both present and absent", f.rel));
        }
        if f.strong && !f.indecreasable {
            violations.push(format!(
                "relation {} flagged strong but not indecreasable",
                f.rel
            ));
        }
        if f.strong && f.rel.z.is_empty() {
            violations.push(format!(
                "relation {} flagged strong with an empty do-block",
                f.rel
            ));
        }
    }

    let mut causes: Vec<DisjunctiveCause> = Vec::new();
    let mut push = |source: &String, targets: BTreeSet<String>| {
        causes.push(DisjunctiveCause {
            source: source.clone(),
            targets,
        });
    };
    for f in &set.present {
        let yw: BTreeSet<String> = f.rel.y.union(&f.rel.w).cloned().collect();
        if f.irreducible {
            for e in &f.rel.x {
                push(e, yw.clone());
            }
        }
        for e in &f.rel.z {
            let dropped = Relation {
                x: f.rel.x.clone(),
                y: f.rel.y.clone(),
                z: f.rel.z.iter().filter(|n| *n != e).cloned().collect(),
                w: f.rel.w.clone(),
            };
            if f.indecreasable || set.absent.contains(&dropped) {
                push(e, yw.clone());
            }
        }
    }

    // Subsumption: keep (e, T) only if no other statement (e, T') with
    // T' a subset of T says something at least as strong.
    causes.sort();
    causes.dedup();
    let kept: Vec<DisjunctiveCause> = causes
        .iter()
        .filter(|c| {
            !causes.iter().any(|other| {
                other.source == c.source
                    && other.targets != c.targets
                    && other.targets.is_subset(&c.targets)
            })
        })
        .cloned()
        .collect();

    CauseReport {
        causes: kept,
        violations,
    }
}
