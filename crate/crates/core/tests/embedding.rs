//! Embedding checks and searches: catalog witnesses, stability theorems,
//! and the reduction of higher-order sets.

use std::collections::BTreeSet;

use causal_affects_core::affects::{AffectsSet, FlaggedRelation, Relation};
use causal_affects_core::catalog;
use causal_affects_core::embedding::{
    check_embedding, reduce_ho_relations, search_embeddings, CompatMode, Embedding,
    EmbeddingError, SearchRequire,
};
use causal_affects_core::poset::{all_posets, Poset};

fn flagged(x: &[&str], y: &[&str], z: &[&str], w: &[&str], strong: bool) -> FlaggedRelation {
    FlaggedRelation {
        rel: Relation::new(x, y, z, w),
        irreducible: true,
        indecreasable: true,
        strong,
    }
}

fn sf_named(p: &Poset, emb: &Embedding, vars: &BTreeSet<String>) -> Vec<usize> {
    let locs: Vec<usize> = vars
        .iter()
        .map(|v| p.idx(&emb.map[v]).unwrap())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    p.support_future(&locs)
}

#[test]
fn chain_cycle_witness_is_compatible_but_not_stable() {
    let report = check_embedding(
        &catalog::acl5_set(),
        &catalog::acl5_witness_poset(),
        &catalog::acl5_witness_embedding(),
    )
    .unwrap();
    assert!(report.compat_irreducible);
    assert!(report.compat_indecreasable);
    assert!(!report.degenerate);
    assert!(!report.trivial);
    // Both relations map their affected side onto the antecedent's own
    // support future, so neither stability notion holds.
    assert!(!report.support_stable);
    assert!(!report.minimum_stable);
    assert_eq!(report.violations_support_stable.len(), 2);
}

#[test]
fn catalog_loop_sets_embed_stably_into_their_posets() {
    for (set, poset, emb) in [
        (catalog::acl7_set(), catalog::acl7_poset(), catalog::acl7_embedding()),
        (
            catalog::acl12_set(),
            catalog::acl12_poset(),
            catalog::acl12_embedding(),
        ),
    ] {
        let report = check_embedding(&set, &poset, &emb).unwrap();
        assert!(report.compat_irreducible);
        assert!(report.compat_indecreasable);
        assert!(report.support_stable);
        assert!(report.minimum_stable);
        assert!(!report.degenerate);
        assert!(!report.trivial);
        assert!(report.meaningless.is_empty());
    }
}

#[test]
fn no_support_stable_embedding_for_chain_cycle_sets() {
    // The two-relation chain cycle admits no support-stable embedding into
    // any poset with at most five elements: stability would force the two
    // antecedent support futures to strictly contain each other.
    let require = SearchRequire {
        support_stable: true,
        ..SearchRequire::default()
    };
    for n in 1..=5usize {
        for p in all_posets(n) {
            let found = search_embeddings(&catalog::acl5_set(), &p, require, 1 << 40).unwrap();
            assert!(found.is_empty(), "unexpected stable embedding: {found:?}");
        }
    }
    // The branching loop set behaves the same way.
    for n in 1..=5usize {
        for p in all_posets(n) {
            let found = search_embeddings(&catalog::acl6a_set(), &p, require, 1 << 40).unwrap();
            assert!(found.is_empty(), "unexpected stable embedding: {found:?}");
        }
    }
}

#[test]
fn search_finds_the_catalog_witness() {
    let require = SearchRequire {
        non_degenerate: true,
        non_trivial: true,
        ..SearchRequire::default()
    };
    let found = search_embeddings(
        &catalog::acl5_set(),
        &catalog::acl5_witness_poset(),
        require,
        1 << 20,
    )
    .unwrap();
    assert!(found.contains(&catalog::acl5_witness_embedding()));
    // Cross-validate the search's filter against the direct checker.
    for emb in &found {
        let report =
            check_embedding(&catalog::acl5_set(), &catalog::acl5_witness_poset(), emb).unwrap();
        assert!(report.compat_irreducible);
        assert!(!report.degenerate);
        assert!(!report.trivial);
    }
}

#[test]
fn conical_posets_make_compatible_embeddings_stable() {
    // On conical posets, every non-degenerate base-tier compatible
    // embedding of a 0th-order set is automatically support-stable.
    let sets = [catalog::acl5_set(), catalog::acl12_set(), catalog::noacl_set()];
    let require = SearchRequire {
        non_degenerate: true,
        ..SearchRequire::default()
    };
    for n in 1..=4usize {
        for p in all_posets(n) {
            if !p.classify(3).unwrap().conical {
                continue;
            }
            for set in &sets {
                for emb in search_embeddings(set, &p, require, 1 << 30).unwrap() {
                    let report = check_embedding(set, &p, &emb).unwrap();
                    assert!(
                        report.support_stable,
                        "conical poset {:?} with unstable compatible embedding {emb:?}",
                        p.to_json().to_string()
                    );
                }
            }
        }
    }
}

#[test]
fn chain_edges_nest_support_futures() {
    // Whenever one relation's affected block feeds another's antecedent,
    // base-tier compatibility forces the downstream antecedent's support
    // future inside the upstream one; support stability makes it strict.
    let sets = [catalog::noacl_set(), catalog::acl5_set(), catalog::acl3_set()];
    for n in 1..=4usize {
        for p in all_posets(n) {
            for set in &sets {
                for emb in
                    search_embeddings(set, &p, SearchRequire::default(), 1 << 30).unwrap()
                {
                    let report = check_embedding(set, &p, &emb).unwrap();
                    for fi in &set.present {
                        for fj in &set.present {
                            let t: BTreeSet<String> =
                                fi.rel.y.union(&fi.rel.w).cloned().collect();
                            if !t.is_subset(&fj.rel.x) {
                                continue;
                            }
                            let sf_up = sf_named(&p, &emb, &fi.rel.x);
                            let sf_down = sf_named(&p, &emb, &fj.rel.x);
                            assert!(sf_down.iter().all(|e| sf_up.contains(e)));
                            if report.support_stable {
                                assert_ne!(sf_down, sf_up);
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn conditionality_transform_preserves_embedding_verdicts() {
    // A conditional relation and its unconditional transform constrain an
    // embedding identically.
    let conditional = AffectsSet {
        present: vec![
            flagged(&["A"], &["B"], &[], &["C"], false),
            flagged(&["B"], &["D"], &[], &[], false),
        ],
        absent: vec![],
    };
    let transformed = reduce_ho_relations(&conditional).unwrap();
    assert_eq!(
        transformed.present[0].rel,
        Relation::new(&["A"], &["B", "C"], &[], &[])
    );
    for n in 1..=4usize {
        for p in all_posets(n) {
            for emb in search_embeddings(
                &conditional,
                &p,
                SearchRequire::default(),
                1 << 30,
            )
            .unwrap()
            {
                let before = check_embedding(&conditional, &p, &emb).unwrap();
                let after = check_embedding(&transformed, &p, &emb).unwrap();
                assert_eq!(before.compat_irreducible, after.compat_irreducible);
                assert_eq!(before.support_stable, after.support_stable);
                assert_eq!(before.minimum_stable, after.minimum_stable);
            }
        }
    }
}

#[test]
fn indecreasable_compatibility_balances_regions() {
    // Under indecreasable-tier compatibility of an irreducible and
    // indecreasable relation, the affected block's support future meets
    // the antecedent and the do-block in the same region.
    let set = AffectsSet {
        present: vec![flagged(&["A"], &["B"], &["C"], &[], true)],
        absent: vec![],
    };
    let require = SearchRequire {
        mode: CompatMode::Indecreasable,
        ..SearchRequire::default()
    };
    let mut seen = 0usize;
    for n in 1..=4usize {
        for p in all_posets(n) {
            for emb in search_embeddings(&set, &p, require, 1 << 30).unwrap() {
                let f = &set.present[0];
                // Operationally meaningless instances are vacuously
                // compatible and imply no balance between the regions.
                if !check_embedding(&set, &p, &emb).unwrap().meaningless.is_empty() {
                    continue;
                }
                seen += 1;
                let yw: BTreeSet<String> = f.rel.y.union(&f.rel.w).cloned().collect();
                let sf_yw: BTreeSet<usize> = sf_named(&p, &emb, &yw).into_iter().collect();
                let sf_x: BTreeSet<usize> =
                    sf_named(&p, &emb, &f.rel.x).into_iter().collect();
                let sf_z: BTreeSet<usize> =
                    sf_named(&p, &emb, &f.rel.z).into_iter().collect();
                let with_x: BTreeSet<usize> = sf_yw.intersection(&sf_x).copied().collect();
                let with_z: BTreeSet<usize> = sf_yw.intersection(&sf_z).copied().collect();
                assert_eq!(with_x, with_z);
            }
        }
    }
    assert!(seen > 0);
}

#[test]
fn degenerate_trivial_and_meaningless_flags() {
    let set = AffectsSet {
        present: vec![flagged(&["A"], &["B"], &[], &[], false)],
        absent: vec![],
    };
    let p = catalog::acl5_witness_poset();
    // Collapsing both ends onto one element is degenerate and trivial.
    let emb = Embedding {
        map: [("A", "p"), ("B", "p")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
    };
    let report = check_embedding(&set, &p, &emb).unwrap();
    assert!(report.degenerate);
    assert!(report.trivial);
    assert!(report.compat_irreducible);
    assert!(!report.support_stable);
    // An affected block spread over two incomparable locations has an
    // empty joint support future, making the relation meaningless there.
    let anti = Poset::validate(vec!["u".into(), "v".into()], &[]).unwrap();
    let pair = AffectsSet {
        present: vec![flagged(&["C"], &["A", "B"], &[], &[], false)],
        absent: vec![],
    };
    let emb = Embedding {
        map: [("A", "u"), ("B", "v"), ("C", "u")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
    };
    let report = check_embedding(&pair, &anti, &emb).unwrap();
    assert_eq!(report.meaningless.len(), 1);
}

#[test]
fn reduction_requires_flags_and_drops_absences() {
    let good = AffectsSet {
        present: vec![flagged(&["A"], &["B"], &["C"], &["D"], false)],
        absent: vec![Relation::new(&["A"], &["B"], &[], &[])],
    };
    let reduced = reduce_ho_relations(&good).unwrap();
    assert_eq!(
        reduced.present[0].rel,
        Relation::new(&["A", "C"], &["B", "D"], &[], &[])
    );
    assert!(reduced.absent.is_empty());

    let mut bad = good.clone();
    bad.present[0].indecreasable = false;
    assert!(matches!(
        reduce_ho_relations(&bad),
        Err(EmbeddingError::Validation(_))
    ));
}

#[test]
fn search_cap_and_unmapped_variables_error() {
    let set = catalog::acl6a_set();
    let p = catalog::acl7_poset();
    assert!(matches!(
        search_embeddings(&set, &p, SearchRequire::default(), 10),
        Err(EmbeddingError::CapExceeded { .. })
    ));
    let incomplete = Embedding::default();
    assert!(matches!(
        check_embedding(&catalog::acl5_set(), &catalog::acl5_witness_poset(), &incomplete),
        Err(EmbeddingError::Validation(_))
    ));
}
