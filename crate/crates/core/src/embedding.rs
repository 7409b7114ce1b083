//! Embeddings of relation variables into posets.
//!
//! An embedding maps each variable of an affects set to a poset element.
//! Compatibility comes in three nested tiers: the base tier constrains
//! every irreducible present relation (`sf(Y W Z) ⊆ sf(X)` on mapped
//! locations); the strong tier adds `sf(Y W X) ⊆ sf(Z)` for strongly
//! indecreasable relations; the indecreasable tier extends that constraint
//! to all indecreasable relations. Support stability demands
//! `sf(Y Z W) ⊊ sf(X)` for *every* present relation, and minimum stability
//! demands `sf(Y Z W) ⊆ sf(X) minus its minimum`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::affects::{AffectsSet, FlaggedRelation, Relation};
use crate::poset::Poset;

/// Errors from embedding checks and searches.
#[derive(Debug, Error)]
pub enum EmbeddingError {
    /// Schema or argument problem.
    #[error("validation error: {0}")]
    Validation(String),
    /// The search space exceeds the cap.
    #[error("search space {needed} exceeds cap {cap}")]
    CapExceeded {
        /// Number of candidate embeddings.
        needed: u128,
        /// The configured cap.
        cap: u128,
    },
}

/// A map from relation variables to poset elements.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    /// Variable-to-element assignment.
    pub map: BTreeMap<String, String>,
}

impl Embedding {
    /// Parses an embedding from JSON text.
    pub fn from_json_str(text: &str) -> Result<Embedding, EmbeddingError> {
        serde_json::from_str(text)
            .map_err(|e| EmbeddingError::Validation(format!("embedding JSON: {e}")))
    }
}

/// Compatibility tier selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompatMode {
    /// Constraints from irreducible relations only.
    Irreducible,
    /// Plus constraints from strongly indecreasable relations.
    StrongIndecreasable,
    /// Plus constraints from all indecreasable relations.
    Indecreasable,
}

impl CompatMode {
    /// Parses the CLI spelling.
    pub fn parse(s: &str) -> Result<CompatMode, EmbeddingError> {
        match s {
            "irreducible" => Ok(CompatMode::Irreducible),
            "strong-indecreasable" => Ok(CompatMode::StrongIndecreasable),
            "indecreasable" => Ok(CompatMode::Indecreasable),
            _ => Err(EmbeddingError::Validation(format!(
                "unknown compatibility mode {s:?}"
            ))),
        }
    }
}

/// Full report for one embedding.
#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingReport {
    /// Base-tier compatibility.
    pub compat_irreducible: bool,
    /// Strong-tier compatibility.
    pub compat_strong_indecreasable: bool,
    /// Indecreasable-tier compatibility.
    pub compat_indecreasable: bool,
    /// Every present relation strictly shrinks its support future.
    pub support_stable: bool,
    /// Every present relation avoids the minimum of its antecedent's
    /// support future.
    pub minimum_stable: bool,
    /// The variable map is non-injective.
    pub degenerate: bool,
    /// Some present singleton simple relation has both ends at one element.
    pub trivial: bool,
    /// Present relations whose affected-side support future is empty (they
    /// satisfy the constraints vacuously and are operationally
    /// meaningless).
    pub meaningless: Vec<Relation>,
    /// Base-tier violations.
    pub violations_irreducible: Vec<Relation>,
    /// Additional strong-tier violations.
    pub violations_strong_indecreasable: Vec<Relation>,
    /// Additional indecreasable-tier violations.
    pub violations_indecreasable: Vec<Relation>,
    /// Support-stability violations.
    pub violations_support_stable: Vec<Relation>,
    /// Minimum-stability violations.
    pub violations_minimum_stable: Vec<Relation>,
}

impl EmbeddingReport {
    /// The headline verdict for a tier.
    pub fn compatible(&self, mode: CompatMode) -> bool {
        match mode {
            CompatMode::Irreducible => self.compat_irreducible,
            CompatMode::StrongIndecreasable => self.compat_strong_indecreasable,
            CompatMode::Indecreasable => self.compat_indecreasable,
        }
    }
}

fn locations(
    emb: &Embedding,
    poset: &Poset,
    vars: &BTreeSet<String>,
) -> Result<Vec<usize>, EmbeddingError> {
    let mut out = BTreeSet::new();
    for v in vars {
        let e = emb
            .map
            .get(v)
            .ok_or_else(|| EmbeddingError::Validation(format!("variable {v:?} is unmapped")))?;
        out.insert(
            poset
                .idx(e)
                .map_err(|e| EmbeddingError::Validation(e.to_string()))?,
        );
    }
    Ok(out.into_iter().collect())
}

fn subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

/// Checks one embedding against an affects set on a poset.
pub fn check_embedding(
    set: &AffectsSet,
    poset: &Poset,
    emb: &Embedding,
) -> Result<EmbeddingReport, EmbeddingError> {
    let mut report = EmbeddingReport {
        compat_irreducible: true,
        compat_strong_indecreasable: true,
        compat_indecreasable: true,
        support_stable: true,
        minimum_stable: true,
        degenerate: false,
        trivial: false,
        meaningless: Vec::new(),
        violations_irreducible: Vec::new(),
        violations_strong_indecreasable: Vec::new(),
        violations_indecreasable: Vec::new(),
        violations_support_stable: Vec::new(),
        violations_minimum_stable: Vec::new(),
    };

    let mut used: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for f in &set.present {
        for v in f.rel.variables() {
            let e = emb
                .map
                .get(&v)
                .ok_or_else(|| EmbeddingError::Validation(format!("variable {v:?} is unmapped")))?;
            used.entry(e.clone()).or_default().insert(v);
        }
    }
    report.degenerate = used.values().any(|vs| vs.len() > 1);

    for f in &set.present {
        let r = &f.rel;
        if r.x.len() == 1 && r.y.len() == 1 && r.is_simple() {
            let ox = &emb.map[r.x.iter().next().unwrap()];
            let oy = &emb.map[r.y.iter().next().unwrap()];
            if ox == oy {
                report.trivial = true;
            }
        }
        let ywz: BTreeSet<String> = r.y.iter().chain(&r.w).chain(&r.z).cloned().collect();
        let ywx: BTreeSet<String> = r.y.iter().chain(&r.w).chain(&r.x).cloned().collect();
        let sf_x = poset.support_future(&locations(emb, poset, &r.x)?);
        let sf_ywz = poset.support_future(&locations(emb, poset, &ywz)?);
        // A relation whose affected-side locations share no future is
        // operationally meaningless: it is vacuously compatible at every
        // tier and only flagged.
        let meaningless = sf_ywz.is_empty();
        if meaningless {
            report.meaningless.push(r.clone());
        }
        if !meaningless && f.irreducible && !subset(&sf_ywz, &sf_x) {
            report.violations_irreducible.push(r.clone());
        }
        let back_constraint = |flagged: bool| -> Result<bool, EmbeddingError> {
            if !flagged || meaningless {
                return Ok(true);
            }
            let sf_z = poset.support_future(&locations(emb, poset, &r.z)?);
            let sf_ywx = poset.support_future(&locations(emb, poset, &ywx)?);
            Ok(subset(&sf_ywx, &sf_z))
        };
        if !back_constraint(f.strong)? {
            report.violations_strong_indecreasable.push(r.clone());
        }
        if !back_constraint(f.indecreasable && !f.strong)? {
            report.violations_indecreasable.push(r.clone());
        }
        if !(subset(&sf_ywz, &sf_x) && sf_ywz != sf_x) {
            report.violations_support_stable.push(r.clone());
        }
        let min_x = poset.min_of(&sf_x);
        let allowed: Vec<usize> = sf_x
            .iter()
            .copied()
            .filter(|e| !min_x.contains(e))
            .collect();
        if !subset(&sf_ywz, &allowed) {
            report.violations_minimum_stable.push(r.clone());
        }
    }

    report.compat_irreducible = report.violations_irreducible.is_empty();
    report.compat_strong_indecreasable =
        report.compat_irreducible && report.violations_strong_indecreasable.is_empty();
    report.compat_indecreasable = report.compat_strong_indecreasable
        && report.violations_indecreasable.is_empty();
    report.support_stable = report.violations_support_stable.is_empty();
    report.minimum_stable = report.violations_minimum_stable.is_empty();

    // Tier nesting sanity: the stronger tiers can only fail more often.
    debug_assert!(!report.compat_indecreasable || report.compat_strong_indecreasable);
    debug_assert!(!report.compat_strong_indecreasable || report.compat_irreducible);
    Ok(report)
}

/// Requirements for [`search_embeddings`].
#[derive(Debug, Clone, Copy)]
pub struct SearchRequire {
    /// Compatibility tier to enforce.
    pub mode: CompatMode,
    /// Require support stability.
    pub support_stable: bool,
    /// Require minimum stability.
    pub minimum_stable: bool,
    /// Require an injective map.
    pub non_degenerate: bool,
    /// Forbid trivial embeddings.
    pub non_trivial: bool,
}

impl Default for SearchRequire {
    fn default() -> SearchRequire {
        SearchRequire {
            mode: CompatMode::Irreducible,
            support_stable: false,
            minimum_stable: false,
            non_degenerate: false,
            non_trivial: false,
        }
    }
}

/// Exhaustively searches all embeddings of the set's variables into the
/// poset that meet the requirements, with depth-first prefix pruning.
///
/// The poset must have at most 64 elements; the raw search-space size
/// `n^vars` must not exceed `cap`.
pub fn search_embeddings(
    set: &AffectsSet,
    poset: &Poset,
    require: SearchRequire,
    cap: u128,
) -> Result<Vec<Embedding>, EmbeddingError> {
    let n = poset.n();
    if n > 64 {
        return Err(EmbeddingError::Validation(
            "embedding search is limited to posets with at most 64 elements".into(),
        ));
    }
    let vars: Vec<String> = set
        .present
        .iter()
        .flat_map(|f| f.rel.variables())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut needed: u128 = 1;
    for _ in &vars {
        needed = needed.saturating_mul(n as u128);
        if needed > cap {
            return Err(EmbeddingError::CapExceeded { needed, cap });
        }
    }
    let var_pos: HashMap<&String, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();

    // Per-element inclusive future and strict-past masks.
    let fut: Vec<u64> = (0..n)
        .map(|i| poset.future(i).iter().fold(0u64, |m, &j| m | (1 << j)))
        .collect();
    let past: Vec<u64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| poset.lt(j, i))
                .fold(0u64, |m, j| m | (1 << j))
        })
        .collect();
    let min_of_mask = |mask: u64| -> u64 {
        let mut out = 0u64;
        for e in 0..n {
            if mask & (1 << e) != 0 && mask & past[e] == 0 {
                out |= 1 << e;
            }
        }
        out
    };
    let full: u64 = if n == 64 { !0 } else { (1u64 << n) - 1 };

    struct Constraint {
        ready: usize,
        x: Vec<usize>,
        ywz: Vec<usize>,
        ywx: Vec<usize>,
        z: Vec<usize>,
        irreducible: bool,
        back: bool,
        simple_pair: Option<(usize, usize)>,
    }
    let as_pos = |names: &BTreeSet<String>| -> Vec<usize> {
        names.iter().map(|v| var_pos[v]).collect()
    };
    let constraints: Vec<Constraint> = set
        .present
        .iter()
        .map(|f: &FlaggedRelation| {
            let r = &f.rel;
            let ywz: BTreeSet<String> = r.y.iter().chain(&r.w).chain(&r.z).cloned().collect();
            let ywx: BTreeSet<String> = r.y.iter().chain(&r.w).chain(&r.x).cloned().collect();
            let all = as_pos(&r.variables());
            let back = match require.mode {
                CompatMode::Irreducible => false,
                CompatMode::StrongIndecreasable => f.strong,
                CompatMode::Indecreasable => f.indecreasable,
            };
            Constraint {
                ready: all.iter().copied().max().unwrap(),
                x: as_pos(&r.x),
                ywz: as_pos(&ywz),
                ywx: as_pos(&ywx),
                z: as_pos(&r.z),
                irreducible: f.irreducible,
                back,
                simple_pair: if r.x.len() == 1 && r.y.len() == 1 && r.is_simple() {
                    Some((
                        var_pos[r.x.iter().next().unwrap()],
                        var_pos[r.y.iter().next().unwrap()],
                    ))
                } else {
                    None
                },
            }
        })
        .collect();

    let mut results = Vec::new();
    let mut assign = vec![usize::MAX; vars.len()];
    let mut used_mask = 0u64;
    // Depth-first with checks fired as soon as a constraint's last variable
    // is placed.
    fn dfs(
        pos: usize,
        n: usize,
        vars: &[String],
        poset: &Poset,
        constraints: &[Constraint],
        require: &SearchRequire,
        fut: &[u64],
        full: u64,
        min_of_mask: &dyn Fn(u64) -> u64,
        assign: &mut Vec<usize>,
        used_mask: &mut u64,
        results: &mut Vec<Embedding>,
    ) {
        if pos == vars.len() {
            results.push(Embedding {
                map: vars
                    .iter()
                    .zip(assign.iter())
                    .map(|(v, &e)| (v.clone(), poset.elements()[e].clone()))
                    .collect(),
            });
            return;
        }
        for e in 0..n {
            if require.non_degenerate && *used_mask & (1 << e) != 0 {
                continue;
            }
            assign[pos] = e;
            let sf = |ps: &[usize]| -> u64 {
                ps.iter().fold(full, |m, &p| m & fut[assign[p]])
            };
            let mut ok = true;
            for c in constraints {
                if c.ready != pos {
                    continue;
                }
                if let Some((xa, ya)) = c.simple_pair {
                    if require.non_trivial && assign[xa] == assign[ya] {
                        ok = false;
                        break;
                    }
                }
                let sx = sf(&c.x);
                let sywz = sf(&c.ywz);
                // Compatibility is vacuous for operationally meaningless
                // relations (empty affected-side support future).
                if sywz != 0 {
                    if c.irreducible && sywz & !sx != 0 {
                        ok = false;
                        break;
                    }
                    if c.back {
                        let sz = sf(&c.z);
                        let sywx = sf(&c.ywx);
                        if sywx & !sz != 0 {
                            ok = false;
                            break;
                        }
                    }
                }
                if require.support_stable && !(sywz & !sx == 0 && sywz != sx) {
                    ok = false;
                    break;
                }
                if require.minimum_stable {
                    let allowed = sx & !min_of_mask(sx);
                    if sywz & !allowed != 0 {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                let prev = *used_mask;
                *used_mask |= 1 << e;
                dfs(
                    pos + 1,
                    n,
                    vars,
                    poset,
                    constraints,
                    require,
                    fut,
                    full,
                    min_of_mask,
                    assign,
                    used_mask,
                    results,
                );
                *used_mask = prev;
            }
        }
        assign[pos] = usize::MAX;
    }
    dfs(
        0,
        n,
        &vars,
        poset,
        &constraints,
        &require,
        &fut,
        full,
        &min_of_mask,
        &mut assign,
        &mut used_mask,
        &mut results,
    );
    Ok(results)
}

/// Reduces a higher-order affects set to an equivalent 0th-order one.
///
/// Every present relation must be flagged both irreducible and
/// indecreasable; each maps to `(X ∪ Z, Y ∪ W)` (for 0th-order inputs this
/// is the conditionality transform). Absence statements are not
/// transformable and are dropped.
pub fn reduce_ho_relations(set: &AffectsSet) -> Result<AffectsSet, EmbeddingError> {
    let mut out = AffectsSet::default();
    for f in &set.present {
        if !(f.irreducible && f.indecreasable) {
            return Err(EmbeddingError::Validation(format!(
                "reduction requires irreducible + indecreasable flags on {}",
                f.rel
            )));
        }
        out.present.push(FlaggedRelation {
            rel: Relation {
                x: f.rel.x.union(&f.rel.z).cloned().collect(),
                y: f.rel.y.union(&f.rel.w).cloned().collect(),
                z: BTreeSet::new(),
                w: BTreeSet::new(),
            },
            irreducible: true,
            indecreasable: true,
            strong: false,
        });
    }
    out.normalize();
    out.present.dedup();
    Ok(out)
}
