//! d-separation and compatibility checks against hand-derived verdicts.

use causal_affects_core::catalog;
use causal_affects_core::independence::{compatibility_report, d_separated, CompatCheck};
use causal_affects_core::model::Model;

fn idx(m: &Model, names: &[&str]) -> Vec<usize> {
    names.iter().map(|n| m.node_index(n).unwrap()).collect()
}

#[test]
fn collider_blocks_until_conditioned() {
    // M -> M' <- K: endpoints are separated marginally, connected given the
    // collider.
    let m = catalog::otp_model();
    assert!(d_separated(&m, &idx(&m, &["M"]), &idx(&m, &["K"]), &[]).unwrap());
    assert!(!d_separated(&m, &idx(&m, &["M"]), &idx(&m, &["K"]), &idx(&m, &["M'"])).unwrap());
}

#[test]
fn conditioning_on_a_child_of_a_collider_opens_it() {
    // A -> C <- B with D a child of C: conditioning on D alone opens the
    // collider at C, per the child clause of the blocking rule.
    let m = Model::from_json_str(
        r#"{
          "nodes": [
            {"name": "A", "cardinality": 2, "observed": true,
             "mechanism": {"kind": "exogenous-distribution", "table": [["1/2","1/2"]]}},
            {"name": "B", "cardinality": 2, "observed": true,
             "mechanism": {"kind": "exogenous-distribution", "table": [["1/2","1/2"]]}},
            {"name": "C", "cardinality": 2, "observed": true, "parents": ["A","B"],
             "mechanism": {"kind": "deterministic-table", "table": [0,1,1,0]}},
            {"name": "D", "cardinality": 2, "observed": true, "parents": ["C"],
             "mechanism": {"kind": "deterministic-table", "table": [0,1]}}
          ]
        }"#,
    )
    .unwrap();
    assert!(d_separated(&m, &idx(&m, &["A"]), &idx(&m, &["B"]), &[]).unwrap());
    assert!(!d_separated(&m, &idx(&m, &["A"]), &idx(&m, &["B"]), &idx(&m, &["D"])).unwrap());
    assert!(!d_separated(&m, &idx(&m, &["A"]), &idx(&m, &["B"]), &idx(&m, &["C"])).unwrap());
}

#[test]
fn chain_and_fork_blocking() {
    // Chain A -> B -> C -> D: blocked by conditioning on an interior node.
    let m = catalog::chain_parity_model();
    // A and C are connected directly through B and also via D; conditioning
    // on B blocks A -> B -> C but D remains a collider child path:
    // A -> D <- C is a collider at D (not conditioned), so blocked.
    assert!(d_separated(&m, &idx(&m, &["A"]), &idx(&m, &["C"]), &idx(&m, &["B"])).unwrap());
    assert!(!d_separated(&m, &idx(&m, &["A"]), &idx(&m, &["C"]), &[]).unwrap());
    // Fork: in the jamming model A <- L -> C is a fork on the hidden node.
    let j = catalog::jamming_model();
    assert!(!d_separated(&j, &idx(&j, &["A"]), &idx(&j, &["C"]), &[]).unwrap());
    assert!(d_separated(&j, &idx(&j, &["A"]), &idx(&j, &["C"]), &idx(&j, &["L"])).unwrap());
}

#[test]
fn parity_triple_is_compatible_but_unfaithful() {
    // The parity triple satisfies every d-separation-implied independence,
    // but also has extra independences (M is independent of M' despite the
    // edge), so faithfulness fails.
    let m = catalog::otp_model();
    let compat = compatibility_report(&m, CompatCheck::Compatible).unwrap();
    assert!(compat.holds, "violations: {:?}", compat.violations);
    assert!(!compat.cyclic);
    let faithful = compatibility_report(&m, CompatCheck::Faithful).unwrap();
    assert!(!faithful.holds);
    assert!(faithful
        .violations
        .iter()
        .any(|t| t.x == vec!["M"] && t.y == vec!["M'"] && t.z.is_empty()
            || t.x == vec!["M'"] && t.y == vec!["M"] && t.z.is_empty()));
}

#[test]
fn jamming_distribution_is_compatible() {
    let m = catalog::jamming_model();
    let compat = compatibility_report(&m, CompatCheck::Compatible).unwrap();
    assert!(compat.holds, "violations: {:?}", compat.violations);
}

#[test]
fn cyclic_model_is_flagged_and_checked() {
    // The deterministic two-cycle yields a fully uniform pair, which is
    // independent; X and Y are d-connected, so the distribution is
    // compatible but not faithful, and the report flags cyclicity.
    let m = catalog::two_cycle_model();
    let compat = compatibility_report(&m, CompatCheck::Compatible).unwrap();
    assert!(compat.cyclic);
    assert!(compat.holds, "violations: {:?}", compat.violations);
    let faithful = compatibility_report(&m, CompatCheck::Faithful).unwrap();
    assert!(!faithful.holds);
}

#[test]
fn overlapping_blocks_are_rejected() {
    let m = catalog::otp_model();
    let x = idx(&m, &["M"]);
    assert!(d_separated(&m, &x, &x, &[]).is_err());
}
