//! Shared test support: seeded random generation of models and abstract
//! relation sets.
#![allow(dead_code)] // each test target uses a subset of the helpers

use std::collections::BTreeSet;

use causal_affects_core::affects::{AffectsSet, FlaggedRelation, Relation};
use causal_affects_core::model::Model;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

/// Builds a random acyclic model with `n_obs` binary observed nodes
/// (2..=4), uniform roots and deterministic interior mechanisms that
/// depend on every declared parent. The declared parent sets are the
/// ground-truth edge structure.
pub fn random_deterministic_model(seed: u64) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=4usize);
    let names: Vec<String> = (0..n).map(|i| format!("N{i}")).collect();
    let mut nodes = Vec::new();
    for i in 0..n {
        // Pick a parent set among the predecessors; empty means a uniform
        // root.
        let mut parents: Vec<usize> = (0..i).filter(|_| rng.gen_bool(0.5)).collect();
        if !parents.is_empty() {
            // Draw a table depending on every parent; fall back to parity,
            // which always does.
            let k = parents.len();
            let mut table: Vec<usize> = Vec::new();
            let mut ok = false;
            for _ in 0..20 {
                table = (0..1usize << k).map(|_| rng.gen_range(0..2usize)).collect();
                ok = (0..k).all(|p| {
                    let stride = 1usize << (k - 1 - p);
                    (0..1usize << k).any(|row| row & stride == 0 && table[row] != table[row | stride])
                });
                if ok {
                    break;
                }
            }
            if !ok {
                table = (0..1usize << k).map(|row| (row.count_ones() % 2) as usize).collect();
            }
            nodes.push(json!({
                "name": names[i],
                "cardinality": 2,
                "observed": true,
                "parents": parents.iter().map(|&p| names[p].clone()).collect::<Vec<_>>(),
                "mechanism": {"kind": "deterministic-table", "table": table},
            }));
        } else {
            parents.clear();
            nodes.push(json!({
                "name": names[i],
                "cardinality": 2,
                "observed": true,
                "mechanism": {"kind": "exogenous-distribution", "table": [["1/2", "1/2"]]},
            }));
        }
    }
    let text = json!({ "nodes": nodes }).to_string();
    Model::from_json_str(&text).expect("generated model must validate")
}

/// Builds a random abstract set of irreducible simple relations over at
/// most six variables (1..=5 relations, blocks of size 1..=2), suitable
/// for exhaustive oracle checking.
pub fn random_abstract_set(seed: u64) -> AffectsSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_vars = rng.gen_range(2..=6usize);
    let vars: Vec<String> = (0..n_vars).map(|i| format!("V{i}")).collect();
    let n_rels = rng.gen_range(1..=5usize);
    let mut present = Vec::new();
    for _ in 0..n_rels {
        let mut pool = vars.clone();
        pool.shuffle(&mut rng);
        let x_len = rng.gen_range(1..=2usize.min(pool.len() - 1));
        let y_len = rng.gen_range(1..=2usize.min(pool.len() - x_len));
        let x: BTreeSet<String> = pool[..x_len].iter().cloned().collect();
        let y: BTreeSet<String> = pool[x_len..x_len + y_len].iter().cloned().collect();
        present.push(FlaggedRelation {
            rel: Relation {
                x,
                y,
                z: BTreeSet::new(),
                w: BTreeSet::new(),
            },
            irreducible: true,
            indecreasable: true,
            strong: false,
        });
    }
    let mut set = AffectsSet {
        present,
        absent: Vec::new(),
    };
    set.normalize();
    set
}
