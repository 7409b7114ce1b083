//! d-separation and distribution compatibility checks.
//!
//! Blocking is evaluated on undirected vertex-simple paths: a path is
//! blocked by the conditioning set `Z` iff it contains a chain or fork whose
//! middle vertex is in `Z`, or a collider whose middle vertex has neither
//! itself nor any of its direct children in `Z`. The same criterion is
//! applied unchanged to cyclic graphs.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::model::{Model, ModelError};
use crate::rational::Rat;

/// One conditional-independence triple, in node names.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Triple {
    /// First block.
    pub x: Vec<String>,
    /// Second block.
    pub y: Vec<String>,
    /// Conditioning block.
    pub z: Vec<String>,
}

/// Result of a compatibility or faithfulness check.
#[derive(Debug, Clone, Serialize)]
pub struct CompatReport {
    /// Whether the requested property holds.
    pub holds: bool,
    /// Whether the model's graph contains directed cycles.
    pub cyclic: bool,
    /// Triples witnessing failure.
    pub violations: Vec<Triple>,
}

/// Checking mode for [`compatibility_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompatCheck {
    /// d-separation must imply conditional independence.
    Compatible,
    /// d-separation must coincide with conditional independence.
    Faithful,
}

fn check_disjoint(model: &Model, x: &[usize], y: &[usize], z: &[usize]) -> Result<(), ModelError> {
    let mut seen = BTreeSet::new();
    for &i in x.iter().chain(y).chain(z) {
        if !seen.insert(i) {
            return Err(ModelError::Validation(format!(
                "d-separation blocks must be disjoint (node {:?} repeated)",
                model.nodes()[i].name
            )));
        }
    }
    if x.is_empty() || y.is_empty() {
        return Err(ModelError::Validation(
            "d-separation requires nonempty endpoint blocks".into(),
        ));
    }
    Ok(())
}

/// Decides whether the node sets `x` and `y` are d-separated given `z`.
pub fn d_separated(model: &Model, x: &[usize], y: &[usize], z: &[usize]) -> Result<bool, ModelError> {
    check_disjoint(model, x, y, z)?;
    let n = model.len();
    let zset: BTreeSet<usize> = z.iter().copied().collect();
    // Direction-tagged adjacency: (neighbor, arrow points from current to
    // neighbor).
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
    for i in 0..n {
        for p in model.parents(i) {
            adj[p].push((i, true));
            adj[i].push((p, false));
        }
    }
    let children: Vec<Vec<usize>> = (0..n).map(|i| model.children(i)).collect();
    let yset: BTreeSet<usize> = y.iter().copied().collect();

    // DFS over vertex-simple undirected paths from each source; a path is
    // open while every interior vertex passed so far is unblocked.
    fn dfs(
        adj: &[Vec<(usize, bool)>],
        children: &[Vec<usize>],
        zset: &BTreeSet<usize>,
        yset: &BTreeSet<usize>,
        visited: &mut Vec<bool>,
        node: usize,
        incoming_forward: Option<bool>,
    ) -> bool {
        if yset.contains(&node) {
            return true;
        }
        visited[node] = true;
        for &(next, forward) in &adj[node] {
            if visited[next] {
                continue;
            }
            let open = match incoming_forward {
                None => true,
                Some(prev_forward) => {
                    let collider = prev_forward && !forward;
                    if collider {
                        zset.contains(&node)
                            || children[node].iter().any(|c| zset.contains(c))
                    } else {
                        !zset.contains(&node)
                    }
                }
            };
            if open && dfs(adj, children, zset, yset, visited, next, Some(forward)) {
                visited[node] = false;
                return true;
            }
        }
        visited[node] = false;
        false
    }

    for &s in x {
        let mut visited = vec![false; n];
        if dfs(&adj, &children, &zset, &yset, &mut visited, s, None) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff the model's directed graph has a cycle.
pub fn is_cyclic(model: &Model) -> bool {
    let mut graph = petgraph::graph::DiGraph::<(), ()>::new();
    let idxs: Vec<_> = (0..model.len()).map(|_| graph.add_node(())).collect();
    for i in 0..model.len() {
        for p in model.parents(i) {
            graph.add_edge(idxs[p], idxs[i], ());
        }
    }
    petgraph::algo::is_cyclic_directed(&graph)
}

/// Exact conditional-independence test X indep Y | Z in the observed joint.
fn conditionally_independent(
    model: &Model,
    joint: &crate::model::Joint,
    x: &[usize],
    y: &[usize],
    z: &[usize],
) -> bool {
    let _ = model;
    let mut xz: Vec<usize> = x.to_vec();
    xz.extend_from_slice(z);
    let mut yz: Vec<usize> = y.to_vec();
    yz.extend_from_slice(z);
    let mut xyz: Vec<usize> = x.to_vec();
    xyz.extend_from_slice(y);
    xyz.extend_from_slice(z);
    let m_z = joint.marginal(z);
    let m_xz = joint.marginal(&xz);
    let m_yz = joint.marginal(&yz);
    let m_xyz = joint.marginal(&xyz);

    // P(x,y,z) * P(z) == P(x,z) * P(y,z) for every x, y and every
    // positive-probability z. Iterate over the full outcome grid of (x, y)
    // for each positive z so zero-probability (x, y, z) combinations are
    // covered too.
    let cards = |idx: &[usize]| -> Vec<usize> {
        idx.iter().map(|&i| model.nodes()[i].cardinality).collect()
    };
    let xcards = cards(x);
    let ycards = cards(y);
    for (zvals, pz) in &m_z.probs {
        let mut xvals = vec![0usize; x.len()];
        loop {
            let mut yvals = vec![0usize; y.len()];
            loop {
                let key = |a: &[usize], b: &[usize]| {
                    let mut k = a.to_vec();
                    k.extend_from_slice(b);
                    k
                };
                let zero = Rat::from_integer(0.into());
                let p_xz = m_xz.probs.get(&key(&xvals, zvals)).unwrap_or(&zero).clone();
                let p_yz = m_yz.probs.get(&key(&yvals, zvals)).unwrap_or(&zero).clone();
                let p_xyz = m_xyz
                    .probs
                    .get(&key(&key(&xvals, &yvals), zvals))
                    .unwrap_or(&zero)
                    .clone();
                if p_xyz * pz.clone() != p_xz * p_yz {
                    return false;
                }
                // increment yvals
                let mut carry = true;
                for (v, &c) in yvals.iter_mut().zip(&ycards) {
                    if carry {
                        *v += 1;
                        if *v == c {
                            *v = 0;
                        } else {
                            carry = false;
                        }
                    }
                }
                if carry {
                    break;
                }
            }
            let mut carry = true;
            for (v, &c) in xvals.iter_mut().zip(&xcards) {
                if carry {
                    *v += 1;
                    if *v == c {
                        *v = 0;
                    } else {
                        carry = false;
                    }
                }
            }
            if carry {
                break;
            }
        }
    }
    true
}

/// Checks compatibility (or faithfulness) of the model's observed
/// distribution with its graph over all disjoint observed triples with
/// nonempty endpoint blocks.
pub fn compatibility_report(model: &Model, check: CompatCheck) -> Result<CompatReport, ModelError> {
    let joint = model.solve_observed()?;
    let obs = model.observed_indices();
    let mut violations = Vec::new();
    // Assign each observed node a role: 0 = unused, 1 = X, 2 = Y, 3 = Z.
    let mut roles = vec![0u8; obs.len()];
    loop {
        let x: Vec<usize> = obs
            .iter()
            .zip(&roles)
            .filter(|(_, &r)| r == 1)
            .map(|(&i, _)| i)
            .collect();
        let y: Vec<usize> = obs
            .iter()
            .zip(&roles)
            .filter(|(_, &r)| r == 2)
            .map(|(&i, _)| i)
            .collect();
        let z: Vec<usize> = obs
            .iter()
            .zip(&roles)
            .filter(|(_, &r)| r == 3)
            .map(|(&i, _)| i)
            .collect();
        if !x.is_empty() && !y.is_empty() {
            let sep = d_separated(model, &x, &y, &z)?;
            let indep = conditionally_independent(model, &joint, &x, &y, &z);
            let bad = match check {
                CompatCheck::Compatible => sep && !indep,
                CompatCheck::Faithful => sep != indep,
            };
            if bad {
                let names = |idx: &[usize]| -> Vec<String> {
                    idx.iter().map(|&i| model.nodes()[i].name.clone()).collect()
                };
                violations.push(Triple {
                    x: names(&x),
                    y: names(&y),
                    z: names(&z),
                });
            }
        }
        let mut carry = true;
        for r in roles.iter_mut() {
            if carry {
                *r += 1;
                if *r == 4 {
                    *r = 0;
                } else {
                    carry = false;
                }
            }
        }
        if carry {
            break;
        }
    }
    Ok(CompatReport {
        holds: violations.is_empty(),
        cyclic: is_cyclic(model),
        violations,
    })
}
