//! Poset construction, order-theoretic queries, classification, exhaustive
//! enumeration, and the support-minimum and join-semilattice theorems.

use causal_affects_core::catalog;
use causal_affects_core::poset::{all_posets, minkowski_grid, Poset, PosetError};

fn poset(elements: &[&str], covers: &[(&str, &str)]) -> Poset {
    let text = serde_json::json!({
        "elements": elements,
        "relations": covers.iter().map(|(a, b)| vec![a, b]).collect::<Vec<_>>(),
    })
    .to_string();
    Poset::from_json_str(&text).unwrap()
}

/// The six-element diamond-of-diamonds in which `B` and `C` have two
/// incomparable minimal upper bounds.
fn non_lattice_figure() -> Poset {
    poset(
        &["A", "B", "C", "D", "E", "F"],
        &[
            ("A", "B"),
            ("A", "C"),
            ("B", "D"),
            ("B", "E"),
            ("C", "D"),
            ("C", "E"),
            ("D", "F"),
            ("E", "F"),
        ],
    )
}

/// The nine-element completion of the figure above: `H` becomes the join
/// of `B` and `C`.
fn lattice_figure() -> Poset {
    poset(
        &["A", "B", "C", "D", "E", "F", "G", "H", "I"],
        &[
            ("A", "B"),
            ("A", "C"),
            ("B", "G"),
            ("B", "H"),
            ("C", "H"),
            ("C", "I"),
            ("G", "D"),
            ("H", "D"),
            ("H", "E"),
            ("I", "E"),
            ("D", "F"),
            ("E", "F"),
        ],
    )
}

#[test]
fn validation_rejects_cycles_and_round_trips_json() {
    let text = r#"{"elements": ["a", "b"], "relations": [["a", "b"], ["b", "a"]]}"#;
    assert!(matches!(
        Poset::from_json_str(text),
        Err(PosetError::CycleDetected { .. })
    ));
    let p = poset(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
    // Transitive closure is applied on construction.
    assert!(p.lt(p.idx("a").unwrap(), p.idx("c").unwrap()));
    let back = Poset::from_json_str(&p.to_json().to_string()).unwrap();
    assert_eq!(back.elements(), p.elements());
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(back.lt(i, j), p.lt(i, j));
        }
    }
    assert!(matches!(
        Poset::from_json_str(r#"{"elements": ["a"], "relations": [["a", "z"]]}"#),
        Err(PosetError::UnknownElement(_))
    ));
}

#[test]
fn covers_join_meet_and_span() {
    let p = non_lattice_figure();
    let e = |n: &str| p.idx(n).unwrap();
    let mut covers: Vec<(String, String)> = p
        .covers()
        .into_iter()
        .map(|(i, j)| (p.elements()[i].clone(), p.elements()[j].clone()))
        .collect();
    covers.sort();
    let expect = [
        ("A", "B"),
        ("A", "C"),
        ("B", "D"),
        ("B", "E"),
        ("C", "D"),
        ("C", "E"),
        ("D", "F"),
        ("E", "F"),
    ];
    assert_eq!(
        covers,
        expect
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect::<Vec<_>>()
    );
    // B and C admit two incomparable minimal upper bounds.
    assert_eq!(p.join(e("B"), e("C")), None);
    assert_eq!(p.meet(e("D"), e("E")), None);
    assert_eq!(p.join(e("A"), e("B")), Some(e("B")));
    assert_eq!(p.meet(e("B"), e("C")), Some(e("A")));

    let q = catalog::acl5_witness_poset();
    let f = |n: &str| q.idx(n).unwrap();
    assert_eq!(q.support_future(&[f("p"), f("q")]), vec![f("r"), f("s")]);
    assert_eq!(q.span(&[f("p"), f("q")]), vec![f("p"), f("q")]);
    // Adding r keeps the support future, and {r} itself is minimal for it,
    // so the span picks up all three.
    assert_eq!(q.span(&[f("p"), f("q"), f("r")]), vec![f("p"), f("q"), f("r")]);
    // The empty set supports everything.
    assert_eq!(q.support_future(&[]), vec![0, 1, 2, 3]);
}

#[test]
fn figure_posets_classify_as_expected() {
    let p = non_lattice_figure().classify(3).unwrap();
    assert!(!p.join_semilattice);
    assert!(!p.meet_semilattice);
    assert!(!p.lattice);

    let q = lattice_figure();
    let e = |n: &str| q.idx(n).unwrap();
    assert_eq!(q.join(e("B"), e("C")), Some(e("H")));
    let c = q.classify(3).unwrap();
    assert!(c.join_semilattice);
    assert!(c.meet_semilattice);
    assert!(c.lattice);
    assert!(!c.join_free);
}

#[test]
fn chains_and_antichains_classify_as_expected() {
    let chain = poset(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
    let c = chain.classify(3).unwrap();
    assert!(c.lattice);
    // In a chain every join and meet is one of its arguments.
    assert!(c.join_free);
    assert!(c.meet_free);
    assert!(c.conical);
    assert!(c.location_symmetric);
    assert!(c.union_property);

    let anti = poset(&["a", "b", "c"], &[]);
    let a = anti.classify(3).unwrap();
    assert!(!a.join_semilattice);
    assert!(a.join_free);
    // Distinct pairs share the empty support future but have distinct
    // spans.
    assert!(!a.conical);

    assert!(matches!(chain.classify(1), Err(PosetError::Validation(_))));
}

#[test]
fn exhaustive_poset_counts() {
    assert_eq!(all_posets(1).len(), 1);
    assert_eq!(all_posets(2).len(), 3);
    assert_eq!(all_posets(3).len(), 19);
    assert_eq!(all_posets(4).len(), 219);
    assert_eq!(all_posets(5).len(), 4231);
}

fn upset(p: &Poset, a: &[usize]) -> Vec<usize> {
    (0..p.n())
        .filter(|&y| a.iter().any(|&x| p.leq(x, y)))
        .collect()
}

#[test]
fn support_minimum_theorem_holds_exhaustively() {
    // For every poset with at most five elements, every nonempty subset A
    // with up-closure M, and every nonempty X:
    //   1. min M is contained in A, and A in M;
    //   2. if min sf(X) is contained in A then sf(X) is contained in M;
    //   3. if min sf(X) equals A then sf(X) equals M;
    //   4. if sf(X) equals M then min sf(X) is contained in A and A in
    //      sf(X).
    for n in 1..=5usize {
        for p in all_posets(n) {
            let subsets: Vec<Vec<usize>> = (1u32..(1 << n))
                .map(|m| (0..n).filter(|&e| m & (1 << e) != 0).collect())
                .collect();
            for a in &subsets {
                let m = upset(&p, a);
                let min_m = p.min_of(&m);
                assert!(min_m.iter().all(|e| a.contains(e)));
                assert!(a.iter().all(|e| m.contains(e)));
                for x in &subsets {
                    let sf = p.support_future(x);
                    let min_sf = p.min_of(&sf);
                    if min_sf.iter().all(|e| a.contains(e)) && !min_sf.is_empty() {
                        assert!(sf.iter().all(|e| m.contains(e)));
                    }
                    if &min_sf == a {
                        assert_eq!(sf, m);
                    }
                    if sf == m {
                        assert!(min_sf.iter().all(|e| a.contains(e)));
                        assert!(a.iter().all(|e| sf.contains(e)));
                    }
                }
            }
        }
    }
}

#[test]
fn join_semilattice_minimum_is_the_iterated_join() {
    for n in 1..=5usize {
        for p in all_posets(n) {
            let is_jsl = (0..n).all(|i| ((i + 1)..n).all(|j| p.join(i, j).is_some()));
            if !is_jsl {
                continue;
            }
            for mask in 1u32..(1 << n) {
                let x: Vec<usize> = (0..n).filter(|&e| mask & (1 << e) != 0).collect();
                let mut it = x.iter();
                let mut j = *it.next().unwrap();
                for &e in it {
                    j = p.join(j, e).expect("join-semilattice closure");
                }
                assert_eq!(p.min_of(&p.support_future(&x)), vec![j]);
            }
        }
    }
}

#[test]
fn merging_branches_can_collapse_support_futures() {
    // In {a < b < c, d < c} the futures of a and b differ strictly, yet
    // adding d collapses both support futures to {c}.
    let p = poset(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("d", "c")]);
    let e = |n: &str| p.idx(n).unwrap();
    assert_eq!(p.future(e("a")), vec![e("a"), e("b"), e("c")]);
    assert_eq!(p.future(e("b")), vec![e("b"), e("c")]);
    assert_eq!(p.support_future(&[e("a"), e("d")]), vec![e("c")]);
    assert_eq!(p.support_future(&[e("b"), e("d")]), vec![e("c")]);
}

#[test]
fn light_cone_grid_joins_follow_coordinate_parity() {
    let g = minkowski_grid(1, 2).unwrap();
    let at = |t: i64, x: i64| g.idx(&format!("({t},{x})")).unwrap();
    // In light-cone coordinates u = t + x, v = t - x the grid order is the
    // strict product order, so an interior pair (both coordinates within
    // the inner square) has a join exactly when it is comparable or its
    // light-cone coordinates match in parity componentwise.
    for t1 in -1..=1i64 {
        for x1 in -1..=1i64 {
            for t2 in -1..=1i64 {
                for x2 in -1..=1i64 {
                    let parity_match = ((t1 + x1) - (t2 + x2)) % 2 == 0
                        && ((t1 - x1) - (t2 - x2)) % 2 == 0;
                    let (i, j) = (at(t1, x1), at(t2, x2));
                    let comparable = g.leq(i, j) || g.leq(j, i);
                    assert_eq!(
                        g.join(i, j).is_some(),
                        comparable || parity_match,
                        "({t1},{x1}) vs ({t2},{x2})"
                    );
                }
            }
        }
    }
    // Hence the grid is not a join-semilattice.
    assert_eq!(g.join(at(0, 0), at(0, 1)), None);
}

#[test]
fn planar_grid_admits_two_element_minima() {
    let g = minkowski_grid(2, 2).unwrap();
    let at = |t: i64, x: i64, y: i64| g.idx(&format!("({t},{x},{y})")).unwrap();
    // The diagonal pair has two incomparable minimal common futures.
    let sf = g.support_future(&[at(0, 1, 0), at(0, 0, 1)]);
    let min: Vec<String> = g
        .min_of(&sf)
        .into_iter()
        .map(|i| g.elements()[i].clone())
        .collect();
    assert_eq!(min, vec!["(1,0,0)".to_string(), "(1,1,1)".to_string()]);
    // The colinear pair does not: its minimum is the midpoint.
    let sf = g.support_future(&[at(0, 1, 0), at(0, -1, 0)]);
    let min: Vec<String> = g
        .min_of(&sf)
        .into_iter()
        .map(|i| g.elements()[i].clone())
        .collect();
    assert_eq!(min, vec!["(1,0,0)".to_string()]);
}

#[test]
fn grid_parameters_are_validated() {
    assert!(matches!(minkowski_grid(3, 2), Err(PosetError::Validation(_))));
    assert!(matches!(minkowski_grid(1, 0), Err(PosetError::Validation(_))));
}
