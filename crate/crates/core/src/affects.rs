//! The affects-relation engine.
//!
//! A relation `X |= Y | {do(Z), W}` holds on a model iff there are values
//! `x`, `z` and a conditioning assignment `w` — with positive probability in
//! both post-intervention distributions — such that the conditional
//! distribution of `Y` given `W = w` differs between intervening on `X = x`
//! together with `Z = z` and intervening on `Z = z` alone. All comparisons
//! are exact; conditionals are compared by cross-multiplication so no
//! division is ever performed.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::model::{Assignment, Joint, Model, ModelError};

/// An affects relation `X |= Y | {do(Z), W}` over named variables.
///
/// `X` and `Y` must be nonempty; all four blocks are pairwise disjoint.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Relation {
    /// Intervened antecedent block.
    pub x: BTreeSet<String>,
    /// Affected block.
    pub y: BTreeSet<String>,
    /// Additional interventions shared by both sides of the comparison.
    pub z: BTreeSet<String>,
    /// Post-intervention conditioning block.
    pub w: BTreeSet<String>,
}

fn set(names: &[&str]) -> BTreeSet<String> {
    names.iter().map(|s| s.to_string()).collect()
}

impl Relation {
    /// Builds a relation from name slices.
    pub fn new(x: &[&str], y: &[&str], z: &[&str], w: &[&str]) -> Relation {
        Relation {
            x: set(x),
            y: set(y),
            z: set(z),
            w: set(w),
        }
    }

    /// True iff `Z` and `W` are both empty.
    pub fn is_simple(&self) -> bool {
        self.z.is_empty() && self.w.is_empty()
    }

    /// True iff `Z` is nonempty.
    pub fn is_higher_order(&self) -> bool {
        !self.z.is_empty()
    }

    /// True iff `W` is nonempty.
    pub fn is_conditional(&self) -> bool {
        !self.w.is_empty()
    }

    /// All variables mentioned by the relation.
    pub fn variables(&self) -> BTreeSet<String> {
        self.x
            .iter()
            .chain(&self.y)
            .chain(&self.z)
            .chain(&self.w)
            .cloned()
            .collect()
    }

    /// Checks non-emptiness of `X`, `Y` and pairwise disjointness.
    pub fn check_well_formed(&self) -> Result<(), ModelError> {
        if self.x.is_empty() || self.y.is_empty() {
            return Err(ModelError::Validation(
                "affects relation requires nonempty X and Y".into(),
            ));
        }
        let total = self.x.len() + self.y.len() + self.z.len() + self.w.len();
        if self.variables().len() != total {
            return Err(ModelError::Validation(format!(
                "affects relation blocks must be disjoint: {self}"
            )));
        }
        Ok(())
    }

    /// The conditionality transform `(X, Y, {}, W) -> (X, Y ∪ W, {}, {})`,
    /// defined for 0th-order relations only.
    pub fn conditionality_transform(&self) -> Result<Relation, ModelError> {
        if !self.z.is_empty() {
            return Err(ModelError::Validation(
                "conditionality transform requires an empty do-block".into(),
            ));
        }
        Ok(Relation {
            x: self.x.clone(),
            y: self.y.union(&self.w).cloned().collect(),
            z: BTreeSet::new(),
            w: BTreeSet::new(),
        })
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(" ");
        write!(f, "{} |= {}", join(&self.x), join(&self.y))?;
        match (self.z.is_empty(), self.w.is_empty()) {
            (true, true) => Ok(()),
            (false, true) => write!(f, " | do({})", join(&self.z)),
            (true, false) => write!(f, " | {}", join(&self.w)),
            (false, false) => write!(f, " | do({}), {}", join(&self.z), join(&self.w)),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RelationJson {
    #[serde(rename = "X")]
    x: Vec<String>,
    #[serde(rename = "Y")]
    y: Vec<String>,
    #[serde(rename = "Z", default)]
    z: Vec<String>,
    #[serde(rename = "W", default)]
    w: Vec<String>,
}

impl Serialize for Relation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let to_vec = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>();
        RelationJson {
            x: to_vec(&self.x),
            y: to_vec(&self.y),
            z: to_vec(&self.z),
            w: to_vec(&self.w),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Relation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Relation, D::Error> {
        let raw = RelationJson::deserialize(deserializer)?;
        let rel = Relation {
            x: raw.x.into_iter().collect(),
            y: raw.y.into_iter().collect(),
            z: raw.z.into_iter().collect(),
            w: raw.w.into_iter().collect(),
        };
        rel.check_well_formed().map_err(D::Error::custom)?;
        Ok(rel)
    }
}

/// A present relation together with its classification flags.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FlaggedRelation {
    /// The relation itself.
    pub rel: Relation,
    /// No nonempty proper subset of `X` loses the effect when the rest of
    /// `X` is moved into the do-block.
    pub irreducible: bool,
    /// Removing any single element of `Z` from the do-block destroys the
    /// relation.
    pub indecreasable: bool,
    /// Indecreasable and the relation also fails with the whole do-block
    /// removed.
    pub strong: bool,
}

#[derive(Serialize, Deserialize)]
struct FlaggedJson {
    #[serde(flatten)]
    rel: Relation,
    irreducible: bool,
    indecreasable: bool,
    strong: bool,
}

impl Serialize for FlaggedRelation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        FlaggedJson {
            rel: self.rel.clone(),
            irreducible: self.irreducible,
            indecreasable: self.indecreasable,
            strong: self.strong,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FlaggedRelation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<FlaggedRelation, D::Error> {
        let raw = FlaggedJson::deserialize(deserializer)?;
        Ok(FlaggedRelation {
            rel: raw.rel,
            irreducible: raw.irreducible,
            indecreasable: raw.indecreasable,
            strong: raw.strong,
        })
    }
}

/// A set of classified present relations plus known-absent relations.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct AffectsSet {
    /// Present relations with flags.
    pub present: Vec<FlaggedRelation>,
    /// Relations known not to hold.
    pub absent: Vec<Relation>,
}

impl AffectsSet {
    /// Parses an affects set from JSON text.
    pub fn from_json_str(text: &str) -> Result<AffectsSet, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Validation(format!("affects JSON: {e}")))
    }

    /// True iff `rel` is listed absent.
    pub fn is_absent(&self, rel: &Relation) -> bool {
        self.absent.contains(rel)
    }

    /// Looks up the flags of a present relation.
    pub fn find(&self, rel: &Relation) -> Option<&FlaggedRelation> {
        self.present.iter().find(|f| &f.rel == rel)
    }

    /// Sorts both lists for deterministic output.
    pub fn normalize(&mut self) {
        self.present.sort();
        self.absent.sort();
    }
}

/// Size bounds for relation enumeration (`0` disables a block entirely).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AffectsBounds {
    /// Maximum `|X|`.
    pub x: usize,
    /// Maximum `|Y|`.
    pub y: usize,
    /// Maximum `|Z|`.
    pub z: usize,
    /// Maximum `|W|`.
    pub w: usize,
}

impl AffectsBounds {
    /// The same bound for all four blocks.
    pub fn uniform(n: usize) -> AffectsBounds {
        AffectsBounds { x: n, y: n, z: n, w: n }
    }
}

/// Classification flags computed for a present relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Flags {
    /// See [`FlaggedRelation::irreducible`].
    pub irreducible: bool,
    /// See [`FlaggedRelation::indecreasable`].
    pub indecreasable: bool,
    /// See [`FlaggedRelation::strong`].
    pub strong: bool,
}

/// Decision engine for affects relations on a fixed model, with a shared
/// cache of post-intervention distributions.
pub struct Engine<'a> {
    model: &'a Model,
    obs: Vec<usize>,
    cache: Mutex<HashMap<Assignment, Arc<Joint>>>,
}

/// A relation in observed-node bitmask form (positions into the engine's
/// observed-node list).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MaskRelation {
    /// Antecedent block mask.
    pub x: u32,
    /// Affected block mask.
    pub y: u32,
    /// Shared do-block mask.
    pub z: u32,
    /// Conditioning block mask.
    pub w: u32,
}

impl<'a> Engine<'a> {
    /// Creates an engine for `model`.
    pub fn new(model: &'a Model) -> Engine<'a> {
        Engine {
            model,
            obs: model.observed_indices(),
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// The underlying model.
    pub fn model(&self) -> &Model {
        self.model
    }

    /// Observed node indices, in declaration order.
    pub fn observed(&self) -> &[usize] {
        &self.obs
    }

    /// Observed node names, in declaration order.
    pub fn observed_names(&self) -> Vec<String> {
        self.obs
            .iter()
            .map(|&i| self.model.nodes()[i].name.clone())
            .collect()
    }

    /// Converts a named relation to mask form, validating names.
    pub fn to_mask(&self, rel: &Relation) -> Result<MaskRelation, ModelError> {
        rel.check_well_formed()?;
        let block = |names: &BTreeSet<String>| -> Result<u32, ModelError> {
            let mut mask = 0u32;
            for name in names {
                let idx = self.model.node_index(name)?;
                let pos = self
                    .obs
                    .iter()
                    .position(|&i| i == idx)
                    .ok_or_else(|| {
                        ModelError::Validation(format!(
                            "affects relations range over observed nodes only ({name:?} is hidden)"
                        ))
                    })?;
                mask |= 1 << pos;
            }
            Ok(mask)
        };
        Ok(MaskRelation {
            x: block(&rel.x)?,
            y: block(&rel.y)?,
            z: block(&rel.z)?,
            w: block(&rel.w)?,
        })
    }

    /// Converts a mask relation back to names.
    pub fn to_named(&self, m: MaskRelation) -> Relation {
        let block = |mask: u32| -> BTreeSet<String> {
            (0..self.obs.len())
                .filter(|p| mask & (1 << p) != 0)
                .map(|p| self.model.nodes()[self.obs[p]].name.clone())
                .collect()
        };
        Relation {
            x: block(m.x),
            y: block(m.y),
            z: block(m.z),
            w: block(m.w),
        }
    }

    fn post(&self, fix: &Assignment) -> Result<Arc<Joint>, ModelError> {
        if let Some(j) = self.cache.lock().unwrap().get(fix) {
            return Ok(j.clone());
        }
        let joint = Arc::new(self.model.post_intervention(fix)?);
        self.cache
            .lock()
            .unwrap()
            .entry(fix.clone())
            .or_insert(joint.clone());
        Ok(joint)
    }

    /// Iterates every value assignment of the masked observed nodes.
    fn assignments(&self, mask: u32) -> Vec<Assignment> {
        let nodes: Vec<usize> = (0..self.obs.len())
            .filter(|p| mask & (1 << p) != 0)
            .map(|p| self.obs[p])
            .collect();
        let mut out = vec![Assignment::new()];
        for &n in &nodes {
            let card = self.model.nodes()[n].cardinality;
            let mut next = Vec::with_capacity(out.len() * card);
            for a in &out {
                for v in 0..card {
                    let mut b = a.clone();
                    b.insert(n, v);
                    next.push(b);
                }
            }
            out = next;
        }
        out
    }

    /// Decides whether a mask relation holds on the model.
    pub fn holds_mask(&self, m: MaskRelation) -> Result<bool, ModelError> {
        let y_nodes: Vec<usize> = (0..self.obs.len())
            .filter(|p| m.y & (1 << p) != 0)
            .map(|p| self.obs[p])
            .collect();
        for z_assign in self.assignments(m.z) {
            let base = self.post(&z_assign)?;
            for x_assign in self.assignments(m.x) {
                let mut both = z_assign.clone();
                both.extend(x_assign.iter());
                let cut = self.post(&both)?;
                for w_assign in self.assignments(m.w) {
                    let w_pairs: Vec<(usize, usize)> =
                        w_assign.iter().map(|(&k, &v)| (k, v)).collect();
                    let p_w = cut.event_prob(&w_pairs);
                    let q_w = base.event_prob(&w_pairs);
                    if p_w.is_zero() || q_w.is_zero() {
                        continue;
                    }
                    for y_assign in self.assignments(m.y) {
                        let mut yw = w_pairs.clone();
                        yw.extend(y_nodes.iter().map(|&n| (n, y_assign[&n])));
                        let p_yw = cut.event_prob(&yw);
                        let q_yw = base.event_prob(&yw);
                        if p_yw * q_w.clone() != q_yw * p_w.clone() {
                            return Ok(true);
                        }
                    }
                }
            }
        }
        Ok(false)
    }

    /// Decides whether a named relation holds on the model.
    pub fn affects_holds(&self, rel: &Relation) -> Result<bool, ModelError> {
        self.holds_mask(self.to_mask(rel)?)
    }

    /// Decides whether a mask relation holds via a witness whose
    /// conditioning block stays positive under every extra intervention
    /// regime (masks over observed positions, each a subset of the
    /// witness's antecedent and do-blocks).
    ///
    /// Transformation arguments chain equalities between conditional
    /// distributions through intermediate regimes; such a chain is only
    /// conclusive for witnesses visible to every link. With an empty
    /// conditioning block the side condition is vacuous and this agrees
    /// with [`Engine::holds_mask`].
    pub fn holds_mask_supported(
        &self,
        m: MaskRelation,
        extra_regimes: &[u32],
    ) -> Result<bool, ModelError> {
        let y_nodes: Vec<usize> = (0..self.obs.len())
            .filter(|p| m.y & (1 << p) != 0)
            .map(|p| self.obs[p])
            .collect();
        for z_assign in self.assignments(m.z) {
            let base = self.post(&z_assign)?;
            for x_assign in self.assignments(m.x) {
                let mut both = z_assign.clone();
                both.extend(x_assign.iter());
                let cut = self.post(&both)?;
                'witness: for w_assign in self.assignments(m.w) {
                    let w_pairs: Vec<(usize, usize)> =
                        w_assign.iter().map(|(&k, &v)| (k, v)).collect();
                    let p_w = cut.event_prob(&w_pairs);
                    let q_w = base.event_prob(&w_pairs);
                    if p_w.is_zero() || q_w.is_zero() {
                        continue;
                    }
                    for &regime in extra_regimes {
                        let fix: Assignment = both
                            .iter()
                            .filter(|(&n, _)| {
                                let pos = self
                                    .obs
                                    .iter()
                                    .position(|&o| o == n)
                                    .expect("intervened node is observed");
                                regime & (1 << pos) != 0
                            })
                            .map(|(&n, &v)| (n, v))
                            .collect();
                        if self.post(&fix)?.event_prob(&w_pairs).is_zero() {
                            continue 'witness;
                        }
                    }
                    for y_assign in self.assignments(m.y) {
                        let mut yw = w_pairs.clone();
                        yw.extend(y_nodes.iter().map(|&n| (n, y_assign[&n])));
                        let p_yw = cut.event_prob(&yw);
                        let q_yw = base.event_prob(&yw);
                        if p_yw * q_w.clone() != q_yw * p_w.clone() {
                            return Ok(true);
                        }
                    }
                }
            }
        }
        Ok(false)
    }

    /// Classifies a present mask relation.
    pub fn classify_mask(&self, m: MaskRelation) -> Result<Flags, ModelError> {
        // Irreducible: every nonempty proper sub-block of X keeps the effect
        // when the removed part joins the do-block.
        let mut irreducible = true;
        if m.x.count_ones() > 1 {
            let bits: Vec<u32> = (0..32).filter(|b| m.x & (1 << b) != 0).collect();
            let full = (1usize << bits.len()) - 1;
            for sub in 1..full {
                let s: u32 = bits
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| sub & (1 << k) != 0)
                    .map(|(_, &b)| 1 << b)
                    .sum();
                let rest = m.x & !s;
                if !self.holds_mask(MaskRelation {
                    x: s,
                    y: m.y,
                    z: m.z | rest,
                    w: m.w,
                })? {
                    irreducible = false;
                    break;
                }
            }
        }
        let mut indecreasable = true;
        for b in 0..32 {
            let e = 1u32 << b;
            if m.z & e != 0
                && self.holds_mask(MaskRelation {
                    x: m.x,
                    y: m.y,
                    z: m.z & !e,
                    w: m.w,
                })?
            {
                indecreasable = false;
                break;
            }
        }
        let strong = m.z != 0
            && indecreasable
            && !self.holds_mask(MaskRelation {
                x: m.x,
                y: m.y,
                z: 0,
                w: m.w,
            })?;
        Ok(Flags {
            irreducible,
            indecreasable,
            strong,
        })
    }

    /// Classifies a named relation (which must be present).
    pub fn classify_relation(&self, rel: &Relation) -> Result<Flags, ModelError> {
        let m = self.to_mask(rel)?;
        if !self.holds_mask(m)? {
            return Err(ModelError::Validation(format!(
                "cannot classify an absent relation: {rel}"
            )));
        }
        self.classify_mask(m)
    }

    /// All well-formed mask relations within the size bounds.
    pub fn candidates(&self, bounds: AffectsBounds) -> Vec<MaskRelation> {
        let n = self.obs.len();
        let mut out = Vec::new();
        let mut roles = vec![0u8; n];
        loop {
            let mut m = MaskRelation { x: 0, y: 0, z: 0, w: 0 };
            for (p, &r) in roles.iter().enumerate() {
                match r {
                    1 => m.x |= 1 << p,
                    2 => m.y |= 1 << p,
                    3 => m.z |= 1 << p,
                    4 => m.w |= 1 << p,
                    _ => {}
                }
            }
            if m.x != 0
                && m.y != 0
                && m.x.count_ones() as usize <= bounds.x
                && m.y.count_ones() as usize <= bounds.y
                && m.z.count_ones() as usize <= bounds.z
                && m.w.count_ones() as usize <= bounds.w
            {
                out.push(m);
            }
            let mut carry = true;
            for r in roles.iter_mut() {
                if carry {
                    *r += 1;
                    if *r == 5 {
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
        out.sort_by_key(|m| {
            let rel = self.to_named(*m);
            rel
        });
        out
    }

    /// Enumerates and classifies every relation within the bounds.
    pub fn enumerate(&self, bounds: AffectsBounds) -> Result<AffectsSet, ModelError> {
        use rayon::prelude::*;
        let candidates = self.candidates(bounds);
        let results: Vec<Result<(MaskRelation, Option<Flags>), ModelError>> = candidates
            .par_iter()
            .map(|&m| {
                if self.holds_mask(m)? {
                    Ok((m, Some(self.classify_mask(m)?)))
                } else {
                    Ok((m, None))
                }
            })
            .collect();
        let mut out = AffectsSet::default();
        for r in results {
            let (m, flags) = r?;
            let rel = self.to_named(m);
            match flags {
                Some(f) => out.present.push(FlaggedRelation {
                    rel,
                    irreducible: f.irreducible,
                    indecreasable: f.indecreasable,
                    strong: f.strong,
                }),
                None => out.absent.push(rel),
            }
        }
        out.normalize();
        Ok(out)
    }

    /// Builds a truth table of all bounded relations (mask form).
    pub fn truth_table(
        &self,
        bounds: AffectsBounds,
    ) -> Result<HashMap<MaskRelation, bool>, ModelError> {
        use rayon::prelude::*;
        let candidates = self.candidates(bounds);
        let rows: Vec<Result<(MaskRelation, bool), ModelError>> = candidates
            .par_iter()
            .map(|&m| Ok((m, self.holds_mask(m)?)))
            .collect();
        rows.into_iter().collect()
    }
}
