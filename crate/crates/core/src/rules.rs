//! Sound transformation rules on affects relations, plus a model-backed
//! verifier that checks every rule instance against ground truth.
//!
//! Each rule turns one present relation (sometimes with a required absence
//! as a side condition) into a disjunction of conclusions, at least one of
//! which must hold on any model where the premises do. For conditional
//! premises the guarantee requires a witness whose conditioning block is
//! positive under every intermediate regime of the rule's derivation
//! (vacuous when the conditioning block is empty); the verifier reports
//! instances outside that scope as support-limited. Conclusions marked
//! `promised_irreducible` additionally promise irreducibility: for
//! `HO_SWITCH` every *holding* conclusion is irreducible; for
//! `REDUCIBLE_DESCENT` at least one conclusion holds irreducibly.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Mutex;

use serde::Serialize;

use crate::affects::{AffectsBounds, Engine, MaskRelation, Relation};
use crate::model::{Model, ModelError};

/// Identifier of a transformation rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleId {
    /// Swap a do-block part into the antecedent:
    /// `X |= Y | {do(Z1 Z2), W}  =>  Z1 |= Y | {do(Z2), W}  or  X Z1 |= Y | {do(Z2), W}`.
    Zo,
    /// Move an antecedent part into the do-block:
    /// `X Z1 |= Y | {do(Z2), W}  =>  X |= Y | {do(Z1 Z2), W}  or  Z1 |= Y | {do(Z2), W}`.
    AffectsToHo,
    /// Transfer a do-block part:
    /// `X |= Y | {do(Z1 Z2), W}  =>  X |= Y | {do(Z2), W}  or  Z1 |= Y | {do(Z2), W}  or  Z1 |= Y | {do(X Z2), W}`.
    HoTransfer,
    /// Switch a single do-element into the antecedent, given that dropping
    /// it destroys the relation; the alternatives are irreducible whenever
    /// present.
    HoSwitch,
    /// Split (or merge) a conditioning block out of the affected block;
    /// this rule is a biconditional.
    ConditionalSplit,
    /// Descend from a reducible relation to its proper antecedent
    /// sub-blocks, at least one of which holds irreducibly.
    ReducibleDescent,
}

impl RuleId {
    /// Parses the CLI spelling.
    pub fn parse(s: &str) -> Result<RuleId, ModelError> {
        match s {
            "ZO" => Ok(RuleId::Zo),
            "AFFECTS_TO_HO" => Ok(RuleId::AffectsToHo),
            "HO_TRANSFER" => Ok(RuleId::HoTransfer),
            "HO_SWITCH" => Ok(RuleId::HoSwitch),
            "CONDITIONAL_SPLIT" => Ok(RuleId::ConditionalSplit),
            "REDUCIBLE_DESCENT" => Ok(RuleId::ReducibleDescent),
            _ => Err(ModelError::Validation(format!("unknown rule id {s:?}"))),
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RuleId::Zo => "ZO",
            RuleId::AffectsToHo => "AFFECTS_TO_HO",
            RuleId::HoTransfer => "HO_TRANSFER",
            RuleId::HoSwitch => "HO_SWITCH",
            RuleId::ConditionalSplit => "CONDITIONAL_SPLIT",
            RuleId::ReducibleDescent => "REDUCIBLE_DESCENT",
        };
        f.write_str(s)
    }
}

/// Parameter selecting how a rule splits its premise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleSplit {
    /// A sub-block of names.
    Subset(BTreeSet<String>),
    /// A single name.
    Element(String),
    /// No parameter.
    None,
}

/// One disjunct of a rule application.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct RuleConclusion {
    /// The concluded relation.
    pub relation: Relation,
    /// Whether the rule promises irreducibility (see module docs).
    pub promised_irreducible: bool,
}

/// The result of applying a rule: a disjunction of conclusions plus any
/// absence side conditions the premise set must contain.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct RuleApplication {
    /// Disjuncts, at least one of which holds when the premises do.
    pub conclusions: Vec<RuleConclusion>,
    /// Relations that must be absent for the rule to apply.
    pub required_absences: Vec<Relation>,
}

fn union(a: &BTreeSet<String>, b: &BTreeSet<String>) -> BTreeSet<String> {
    a.union(b).cloned().collect()
}

fn minus(a: &BTreeSet<String>, b: &BTreeSet<String>) -> BTreeSet<String> {
    a.difference(b).cloned().collect()
}

fn rel(
    x: BTreeSet<String>,
    y: BTreeSet<String>,
    z: BTreeSet<String>,
    w: BTreeSet<String>,
) -> Relation {
    Relation { x, y, z, w }
}

fn plain(r: Relation) -> RuleConclusion {
    RuleConclusion {
        relation: r,
        promised_irreducible: false,
    }
}

fn irr(r: Relation) -> RuleConclusion {
    RuleConclusion {
        relation: r,
        promised_irreducible: true,
    }
}

/// Applies a transformation rule to a present premise relation.
pub fn apply_transformation_rule(
    rule: RuleId,
    premise: &Relation,
    split: &RuleSplit,
) -> Result<RuleApplication, ModelError> {
    premise.check_well_formed()?;
    let need_subset = |within: &BTreeSet<String>, what: &str| -> Result<BTreeSet<String>, ModelError> {
        match split {
            RuleSplit::Subset(s) if !s.is_empty() && s.is_subset(within) => Ok(s.clone()),
            _ => Err(ModelError::Validation(format!(
                "{rule} requires a nonempty split subset of {what}"
            ))),
        }
    };
    match rule {
        RuleId::Zo => {
            let z1 = need_subset(&premise.z, "the do-block")?;
            let z2 = minus(&premise.z, &z1);
            Ok(RuleApplication {
                conclusions: vec![
                    plain(rel(z1.clone(), premise.y.clone(), z2.clone(), premise.w.clone())),
                    plain(rel(
                        union(&premise.x, &z1),
                        premise.y.clone(),
                        z2,
                        premise.w.clone(),
                    )),
                ],
                required_absences: vec![],
            })
        }
        RuleId::AffectsToHo => {
            let z1 = need_subset(&premise.x, "the antecedent")?;
            if z1 == premise.x {
                return Err(ModelError::Validation(
                    "AFFECTS_TO_HO split must be a proper subset of the antecedent".into(),
                ));
            }
            let x = minus(&premise.x, &z1);
            Ok(RuleApplication {
                conclusions: vec![
                    plain(rel(
                        x,
                        premise.y.clone(),
                        union(&z1, &premise.z),
                        premise.w.clone(),
                    )),
                    plain(rel(z1, premise.y.clone(), premise.z.clone(), premise.w.clone())),
                ],
                required_absences: vec![],
            })
        }
        RuleId::HoTransfer => {
            let z1 = need_subset(&premise.z, "the do-block")?;
            let z2 = minus(&premise.z, &z1);
            Ok(RuleApplication {
                conclusions: vec![
                    plain(rel(premise.x.clone(), premise.y.clone(), z2.clone(), premise.w.clone())),
                    plain(rel(z1.clone(), premise.y.clone(), z2.clone(), premise.w.clone())),
                    plain(rel(
                        z1,
                        premise.y.clone(),
                        union(&premise.x, &z2),
                        premise.w.clone(),
                    )),
                ],
                required_absences: vec![],
            })
        }
        RuleId::HoSwitch => {
            let e = match split {
                RuleSplit::Element(e) if premise.z.contains(e) => e.clone(),
                _ => {
                    return Err(ModelError::Validation(
                        "HO_SWITCH requires a split element from the do-block".into(),
                    ))
                }
            };
            let mut e_set = BTreeSet::new();
            e_set.insert(e);
            let z_rest = minus(&premise.z, &e_set);
            Ok(RuleApplication {
                conclusions: vec![
                    irr(rel(e_set.clone(), premise.y.clone(), z_rest.clone(), premise.w.clone())),
                    irr(rel(
                        e_set,
                        premise.y.clone(),
                        union(&z_rest, &premise.x),
                        premise.w.clone(),
                    )),
                ],
                required_absences: vec![rel(
                    premise.x.clone(),
                    premise.y.clone(),
                    z_rest,
                    premise.w.clone(),
                )],
            })
        }
        RuleId::ConditionalSplit => {
            if !premise.w.is_empty() {
                return Err(ModelError::Validation(
                    "CONDITIONAL_SPLIT takes an unconditional premise".into(),
                ));
            }
            let wsub = need_subset(&premise.y, "the affected block")?;
            if wsub == premise.y {
                return Err(ModelError::Validation(
                    "CONDITIONAL_SPLIT split must be a proper subset of the affected block".into(),
                ));
            }
            let y = minus(&premise.y, &wsub);
            Ok(RuleApplication {
                conclusions: vec![
                    plain(rel(premise.x.clone(), y, premise.z.clone(), wsub.clone())),
                    plain(rel(premise.x.clone(), wsub, premise.z.clone(), BTreeSet::new())),
                ],
                required_absences: vec![],
            })
        }
        RuleId::ReducibleDescent => {
            if premise.x.len() < 2 {
                return Err(ModelError::Validation(
                    "REDUCIBLE_DESCENT requires an antecedent with at least two variables".into(),
                ));
            }
            let bits: Vec<&String> = premise.x.iter().collect();
            let full = (1usize << bits.len()) - 1;
            let mut conclusions = Vec::new();
            for sub in 1..full {
                let s: BTreeSet<String> = bits
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| sub & (1 << k) != 0)
                    .map(|(_, n)| (*n).clone())
                    .collect();
                conclusions.push(irr(rel(
                    s,
                    premise.y.clone(),
                    premise.z.clone(),
                    premise.w.clone(),
                )));
            }
            Ok(RuleApplication {
                conclusions,
                required_absences: vec![],
            })
        }
    }
}

/// A failed rule instance found by [`verify_rules_on_model`].
#[derive(Debug, Clone, Serialize)]
pub struct RuleViolation {
    /// Rule label (a [`RuleId`] spelling, or `CAUSE_SOUNDNESS`).
    pub rule: String,
    /// Premise relations of the failing instance.
    pub premises: Vec<Relation>,
    /// Human-readable description.
    pub detail: String,
}

/// Verification report: all rule instances over the bounded relation table.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    /// Whether all checks passed.
    pub holds: bool,
    /// Number of rule instances examined.
    pub instances: usize,
    /// Conditional instances whose premise holds only through witnesses
    /// invisible to some intermediate regime of the rule's derivation;
    /// such instances are outside the rules' guarantee and are skipped.
    pub support_limited: usize,
    /// Failing instances.
    pub violations: Vec<RuleViolation>,
}

struct Memo<'a, 'b> {
    engine: &'a Engine<'b>,
    holds: Mutex<HashMap<MaskRelation, bool>>,
    irr: Mutex<HashMap<MaskRelation, bool>>,
}

impl<'a, 'b> Memo<'a, 'b> {
    fn holds(&self, m: MaskRelation) -> Result<bool, ModelError> {
        if let Some(&h) = self.holds.lock().unwrap().get(&m) {
            return Ok(h);
        }
        let h = self.engine.holds_mask(m)?;
        self.holds.lock().unwrap().insert(m, h);
        Ok(h)
    }

    fn irreducible(&self, m: MaskRelation) -> Result<bool, ModelError> {
        if let Some(&h) = self.irr.lock().unwrap().get(&m) {
            return Ok(h);
        }
        let h = self.engine.classify_mask(m)?.irreducible;
        self.irr.lock().unwrap().insert(m, h);
        Ok(h)
    }
}

fn subsets_of(mask: u32) -> Vec<u32> {
    // All nonempty subsets of a bitmask.
    let mut out = Vec::new();
    let mut sub = mask;
    while sub != 0 {
        out.push(sub);
        sub = (sub - 1) & mask;
    }
    out
}

/// Checks every instance of every transformation rule, plus cause
/// soundness, against the model's ground-truth relation table within
/// `bounds`.
pub fn verify_rules_on_model(
    model: &Model,
    bounds: AffectsBounds,
) -> Result<VerifyReport, ModelError> {
    let engine = Engine::new(model);
    let table = engine.truth_table(bounds)?;
    let memo = Memo {
        engine: &engine,
        holds: Mutex::new(table.clone()),
        irr: Mutex::new(HashMap::new()),
    };
    let mut violations = Vec::new();
    let mut instances = 0usize;
    let mut support_limited = 0usize;
    // A conditional premise only triggers a swap rule when it holds via a
    // witness whose conditioning block is positive under every regime the
    // rule's derivation chains through; otherwise the instance is
    // support-limited and carries no guarantee.
    let supported = |m: MaskRelation, extras: &[u32]| -> Result<bool, ModelError> {
        if m.w == 0 {
            return Ok(true);
        }
        engine.holds_mask_supported(m, extras)
    };
    let fail = |rule: &str, premises: Vec<MaskRelation>, detail: String, v: &mut Vec<RuleViolation>| {
        v.push(RuleViolation {
            rule: rule.to_string(),
            premises: premises.into_iter().map(|m| engine.to_named(m)).collect(),
            detail,
        });
    };

    let mut keys: Vec<MaskRelation> = table.keys().copied().collect();
    keys.sort_by_key(|m| (m.x, m.y, m.z, m.w));

    for &m in &keys {
        let held = table[&m];
        if held && m.z != 0 {
            for z1 in subsets_of(m.z) {
                let z2 = m.z & !z1;
                // ZO
                instances += 1;
                let d1 = MaskRelation { x: z1, y: m.y, z: z2, w: m.w };
                let d2 = MaskRelation { x: m.x | z1, y: m.y, z: z2, w: m.w };
                if !supported(m, &[z2])? {
                    support_limited += 1;
                } else if !(memo.holds(d1)? || memo.holds(d2)?) {
                    fail("ZO", vec![m], "no disjunct holds".into(), &mut violations);
                }
                // HO_TRANSFER
                instances += 1;
                let t1 = MaskRelation { x: m.x, y: m.y, z: z2, w: m.w };
                let t2 = MaskRelation { x: z1, y: m.y, z: z2, w: m.w };
                let t3 = MaskRelation { x: z1, y: m.y, z: m.x | z2, w: m.w };
                if !supported(m, &[z2, m.x | z2])? {
                    support_limited += 1;
                } else if !(memo.holds(t1)? || memo.holds(t2)? || memo.holds(t3)?) {
                    fail("HO_TRANSFER", vec![m], "no disjunct holds".into(), &mut violations);
                }
                // HO_SWITCH (single elements only)
                if z1.count_ones() == 1 {
                    let dropped = MaskRelation { x: m.x, y: m.y, z: z2, w: m.w };
                    if !memo.holds(dropped)? {
                        instances += 1;
                        if !supported(m, &[z2, m.x | z2])? {
                            support_limited += 1;
                            continue;
                        }
                        let s1 = MaskRelation { x: z1, y: m.y, z: z2, w: m.w };
                        let s2 = MaskRelation { x: z1, y: m.y, z: z2 | m.x, w: m.w };
                        let h1 = memo.holds(s1)?;
                        let h2 = memo.holds(s2)?;
                        if !(h1 || h2) {
                            fail("HO_SWITCH", vec![m], "no alternative holds".into(), &mut violations);
                        }
                        if h1 && !memo.irreducible(s1)? {
                            fail(
                                "HO_SWITCH",
                                vec![m],
                                format!("present alternative {} is reducible", engine.to_named(s1)),
                                &mut violations,
                            );
                        }
                        if h2 && !memo.irreducible(s2)? {
                            fail(
                                "HO_SWITCH",
                                vec![m],
                                format!("present alternative {} is reducible", engine.to_named(s2)),
                                &mut violations,
                            );
                        }
                    }
                }
            }
        }
        if held && m.x.count_ones() >= 2 {
            // AFFECTS_TO_HO over proper nonempty antecedent splits.
            for z1 in subsets_of(m.x) {
                if z1 == m.x {
                    continue;
                }
                instances += 1;
                let d1 = MaskRelation { x: m.x & !z1, y: m.y, z: m.z | z1, w: m.w };
                let d2 = MaskRelation { x: z1, y: m.y, z: m.z, w: m.w };
                if !supported(m, &[m.z | z1])? {
                    support_limited += 1;
                } else if !(memo.holds(d1)? || memo.holds(d2)?) {
                    fail("AFFECTS_TO_HO", vec![m], "no disjunct holds".into(), &mut violations);
                }
            }
            // REDUCIBLE_DESCENT for reducible present relations.
            if !memo.irreducible(m)? {
                instances += 1;
                let mut found = false;
                for s in subsets_of(m.x) {
                    if s == m.x {
                        continue;
                    }
                    let d = MaskRelation { x: s, y: m.y, z: m.z, w: m.w };
                    if memo.holds(d)? && memo.irreducible(d)? {
                        found = true;
                        break;
                    }
                }
                if !found {
                    fail(
                        "REDUCIBLE_DESCENT",
                        vec![m],
                        "no irreducible proper sub-relation holds".into(),
                        &mut violations,
                    );
                }
            }
        }
        // CONDITIONAL_SPLIT biconditional on unconditional premises with a
        // splittable affected block (checked for absent premises too).
        if m.w == 0 && m.y.count_ones() >= 2 {
            for wsub in subsets_of(m.y) {
                if wsub == m.y {
                    continue;
                }
                instances += 1;
                let d1 = MaskRelation { x: m.x, y: m.y & !wsub, z: m.z, w: wsub };
                let d2 = MaskRelation { x: m.x, y: wsub, z: m.z, w: 0 };
                let h1 = memo.holds(d1)?;
                let rhs = h1 || memo.holds(d2)?;
                if held != rhs {
                    fail(
                        "CONDITIONAL_SPLIT",
                        vec![m],
                        format!("biconditional fails (lhs {held}, rhs {rhs})"),
                        &mut violations,
                    );
                }
                // Conditional-to-unconditional preserves irreducibility.
                if h1 && memo.irreducible(d1)? && held && !memo.irreducible(m)? {
                    fail(
                        "CONDITIONAL_SPLIT",
                        vec![d1],
                        "irreducibility not preserved when absorbing the conditioning block".into(),
                        &mut violations,
                    );
                }
            }
        }
    }

    // Cause soundness: every disjunctive cause inferred from the classified
    // relation set must be witnessed by a directed path in the structure.
    let set = engine.enumerate(bounds)?;
    let causes = crate::infer::infer_causes(&set);
    for c in &causes.causes {
        instances += 1;
        let src = model.node_index(&c.source)?;
        let desc = model.descendants(src);
        let witnessed = c.targets.iter().any(|t| {
            model
                .node_index(t)
                .map(|ti| desc.contains(&ti))
                .unwrap_or(false)
        });
        if !witnessed {
            violations.push(RuleViolation {
                rule: "CAUSE_SOUNDNESS".into(),
                premises: vec![],
                detail: format!(
                    "inferred cause {} ~> {{{}}} has no structural path",
                    c.source,
                    c.targets.iter().cloned().collect::<Vec<_>>().join(", ")
                ),
            });
        }
    }

    Ok(VerifyReport {
        holds: violations.is_empty(),
        instances,
        support_limited,
        violations,
    })
}
