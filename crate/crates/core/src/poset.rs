//! Finite strict partial orders: validation, order queries, structural
//! classification, exhaustive enumeration, and Minkowski-style grids.
//!
//! Conventions: `future(x)` is inclusive (`x` itself belongs to it); the
//! support future of a set is the intersection of its members' futures,
//! with the empty set mapping to the full element set; `span(S)` is the
//! union of all nonempty inclusion-minimal subsets of `S` whose support
//! future equals that of `S`.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from poset construction and queries.
#[derive(Debug, Error)]
pub enum PosetError {
    /// Schema or argument problem.
    #[error("validation error: {0}")]
    Validation(String),
    /// The relation closure is not irreflexive.
    #[error("cycle detected through: {}", nodes.join(", "))]
    CycleDetected {
        /// Elements lying on cycles.
        nodes: Vec<String>,
    },
    /// A referenced element does not exist.
    #[error("unknown element: {0}")]
    UnknownElement(String),
}

/// A finite strict partial order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    elements: Vec<String>,
    index: HashMap<String, usize>,
    /// Transitively closed strict order: `lt[i][j]` iff `i` precedes `j`.
    lt: Vec<Vec<bool>>,
}

#[derive(Serialize, Deserialize)]
struct PosetJson {
    elements: Vec<String>,
    relations: Vec<(String, String)>,
}

impl Poset {
    /// Builds a poset from generating pairs, transitively closing them and
    /// rejecting cycles.
    pub fn validate(
        elements: Vec<String>,
        relations: &[(String, String)],
    ) -> Result<Poset, PosetError> {
        let mut index = HashMap::new();
        for (i, e) in elements.iter().enumerate() {
            if e.is_empty() {
                return Err(PosetError::Validation("empty element name".into()));
            }
            if index.insert(e.clone(), i).is_some() {
                return Err(PosetError::Validation(format!("duplicate element {e:?}")));
            }
        }
        let n = elements.len();
        let mut lt = vec![vec![false; n]; n];
        for (a, b) in relations {
            let ia = *index
                .get(a)
                .ok_or_else(|| PosetError::UnknownElement(a.clone()))?;
            let ib = *index
                .get(b)
                .ok_or_else(|| PosetError::UnknownElement(b.clone()))?;
            lt[ia][ib] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if lt[i][k] {
                    for j in 0..n {
                        if lt[k][j] {
                            lt[i][j] = true;
                        }
                    }
                }
            }
        }
        let cyclic: Vec<String> = (0..n)
            .filter(|&i| lt[i][i])
            .map(|i| elements[i].clone())
            .collect();
        if !cyclic.is_empty() {
            return Err(PosetError::CycleDetected { nodes: cyclic });
        }
        Ok(Poset { elements, index, lt })
    }

    /// Parses a poset from JSON text.
    pub fn from_json_str(text: &str) -> Result<Poset, PosetError> {
        let raw: PosetJson = serde_json::from_str(text)
            .map_err(|e| PosetError::Validation(format!("poset JSON: {e}")))?;
        Poset::validate(raw.elements, &raw.relations)
    }

    /// Serializes as `{"elements": [...], "relations": [[a,b], ...]}` with
    /// the full strict order listed.
    pub fn to_json(&self) -> serde_json::Value {
        let relations: Vec<(String, String)> = self
            .pairs()
            .map(|(i, j)| (self.elements[i].clone(), self.elements[j].clone()))
            .collect();
        serde_json::json!({ "elements": self.elements, "relations": relations })
    }

    fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n();
        (0..n).flat_map(move |i| (0..n).filter(move |&j| self.lt[i][j]).map(move |j| (i, j)))
    }

    /// Number of elements.
    pub fn n(&self) -> usize {
        self.elements.len()
    }

    /// Element names.
    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    /// Resolves an element name.
    pub fn idx(&self, name: &str) -> Result<usize, PosetError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| PosetError::UnknownElement(name.to_string()))
    }

    /// Strict precedence.
    pub fn lt(&self, i: usize, j: usize) -> bool {
        self.lt[i][j]
    }

    /// Reflexive precedence.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        i == j || self.lt[i][j]
    }

    /// Inclusive future of an element.
    pub fn future(&self, i: usize) -> Vec<usize> {
        (0..self.n()).filter(|&j| self.leq(i, j)).collect()
    }

    /// Strict (exclusive) future of an element.
    pub fn exclusive_future(&self, i: usize) -> Vec<usize> {
        (0..self.n()).filter(|&j| self.lt[i][j]).collect()
    }

    /// Support future of a set: intersection of inclusive futures (the full
    /// element set when `set` is empty).
    pub fn support_future(&self, set: &[usize]) -> Vec<usize> {
        (0..self.n())
            .filter(|&j| set.iter().all(|&i| self.leq(i, j)))
            .collect()
    }

    /// Minimal elements of a set.
    pub fn min_of(&self, set: &[usize]) -> Vec<usize> {
        set.iter()
            .copied()
            .filter(|&x| !set.iter().any(|&y| self.lt[y][x]))
            .collect()
    }

    /// Cover pairs `(lower, upper)` of the Hasse diagram.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        self.pairs()
            .filter(|&(i, j)| !(0..self.n()).any(|k| self.lt[i][k] && self.lt[k][j]))
            .collect()
    }

    /// Least upper bound, when it exists.
    pub fn join(&self, i: usize, j: usize) -> Option<usize> {
        let upper: Vec<usize> = (0..self.n())
            .filter(|&u| self.leq(i, u) && self.leq(j, u))
            .collect();
        let m = self.min_of(&upper);
        // A finite set of upper bounds has a least element iff it has a
        // unique minimal element.
        match m.as_slice() {
            [u] => Some(*u),
            _ => None,
        }
    }

    /// Greatest lower bound, when it exists.
    pub fn meet(&self, i: usize, j: usize) -> Option<usize> {
        let lower: Vec<usize> = (0..self.n())
            .filter(|&u| self.leq(u, i) && self.leq(u, j))
            .collect();
        let maxes: Vec<usize> = lower
            .iter()
            .copied()
            .filter(|&x| !lower.iter().any(|&y| self.lt[x][y]))
            .collect();
        match maxes.as_slice() {
            [u] => Some(*u),
            _ => None,
        }
    }

    /// Span of a set (see module docs). The set must have at most 20
    /// members.
    pub fn span(&self, set: &[usize]) -> Vec<usize> {
        assert!(set.len() <= 20, "span argument too large");
        let target = self.support_future(set);
        let m = set.len();
        let mut member = vec![false; self.n()];
        for sub in 1u32..(1 << m) {
            let s: Vec<usize> = (0..m)
                .filter(|&k| sub & (1 << k) != 0)
                .map(|k| set[k])
                .collect();
            if self.support_future(&s) != target {
                continue;
            }
            // Minimality: no nonempty proper subset matches the target.
            let mut minimal = true;
            let mm = s.len();
            for tsub in 1u32..((1 << mm) - 1) {
                let t: Vec<usize> = (0..mm)
                    .filter(|&k| tsub & (1 << k) != 0)
                    .map(|k| s[k])
                    .collect();
                if self.support_future(&t) == target {
                    minimal = false;
                    break;
                }
            }
            if minimal {
                for &e in &s {
                    member[e] = true;
                }
            }
        }
        (0..self.n()).filter(|&e| member[e]).collect()
    }

    /// DOT rendering of the Hasse diagram (cover edges lower -> upper).
    pub fn hasse_dot(&self) -> String {
        let mut out = String::from("digraph hasse {\n  rankdir=BT;\n");
        for e in &self.elements {
            out.push_str(&format!("  \"{e}\";\n"));
        }
        for (i, j) in self.covers() {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\";\n",
                self.elements[i], self.elements[j]
            ));
        }
        out.push_str("}\n");
        out
    }

    /// Structural classification with bounded set sizes.
    pub fn classify(&self, k: usize) -> Result<PosetClass, PosetError> {
        if k < 2 {
            return Err(PosetError::Validation(
                "classification bound must be at least 2".into(),
            ));
        }
        if self.n() > 12 {
            return Err(PosetError::Validation(
                "classification is only supported for posets with at most 12 elements".into(),
            ));
        }
        let n = self.n();
        let mut join_semilattice = true;
        let mut meet_semilattice = true;
        let mut join_free = true;
        let mut meet_free = true;
        for i in 0..n {
            for j in (i + 1)..n {
                match self.join(i, j) {
                    Some(u) => {
                        if u != i && u != j {
                            join_free = false;
                        }
                    }
                    None => join_semilattice = false,
                }
                match self.meet(i, j) {
                    Some(u) => {
                        if u != i && u != j {
                            meet_free = false;
                        }
                    }
                    None => meet_semilattice = false,
                }
            }
        }

        // All nonempty subsets of size <= k, with cached support futures and
        // spans.
        let mut subsets: Vec<Vec<usize>> = Vec::new();
        for mask in 1u32..(1 << n) {
            if (mask.count_ones() as usize) <= k {
                subsets.push((0..n).filter(|&e| mask & (1 << e) != 0).collect());
            }
        }
        let sf: Vec<Vec<usize>> = subsets.iter().map(|s| self.support_future(s)).collect();
        let spans: Vec<Vec<usize>> = subsets.iter().map(|s| self.span(s)).collect();

        let mut conical = true;
        'con: for a in 0..subsets.len() {
            for b in (a + 1)..subsets.len() {
                if sf[a] == sf[b] && spans[a] != spans[b] {
                    conical = false;
                    break 'con;
                }
            }
        }

        // Support futures of arbitrary subsets, memoized by bitmask.
        let mut sf_mask: HashMap<u32, Vec<usize>> = HashMap::new();
        let mut sf_of = |p: &Poset, mask: u32| -> Vec<usize> {
            sf_mask
                .entry(mask)
                .or_insert_with(|| {
                    let s: Vec<usize> = (0..n).filter(|&e| mask & (1 << e) != 0).collect();
                    p.support_future(&s)
                })
                .clone()
        };
        let small_masks: Vec<u32> = (0u32..(1 << n))
            .filter(|m| (m.count_ones() as usize) <= k)
            .collect();

        let mut location_symmetric = true;
        'loc: for &xm in &small_masks {
            if xm == 0 {
                continue;
            }
            for &y1 in &small_masks {
                if y1 == 0 {
                    continue;
                }
                for &y2 in &small_masks {
                    if sf_of(self, xm | y1) != sf_of(self, xm | y2) {
                        continue;
                    }
                    let sfx = sf_of(self, xm);
                    let sfy = sf_of(self, y1 | y2);
                    let first = sfx.iter().all(|e| sfy.contains(e));
                    if first {
                        continue;
                    }
                    let mut second = false;
                    let mut s1 = y1;
                    'outer: while s1 != 0 {
                        let mut s2 = y2;
                        while s2 != 0 {
                            if sf_of(self, s1) == sf_of(self, s2) {
                                second = true;
                                break 'outer;
                            }
                            s2 = (s2 - 1) & y2;
                        }
                        s1 = (s1 - 1) & y1;
                    }
                    if !second {
                        location_symmetric = false;
                        break 'loc;
                    }
                }
            }
        }

        let mut union_property = true;
        'uni: for (si, s) in subsets.iter().enumerate() {
            let span_union: BTreeSet<usize> = spans[si]
                .iter()
                .flat_map(|&x| self.future(x))
                .collect();
            for y in 0..n {
                if s.iter().any(|&x| self.future(x) == self.future(y)) {
                    continue;
                }
                let fy: BTreeSet<usize> = self.future(y).into_iter().collect();
                let covers_sf = sf[si].iter().all(|e| fy.contains(e));
                if covers_sf && fy.is_subset(&span_union) && fy != span_union {
                    union_property = false;
                    break 'uni;
                }
            }
        }

        Ok(PosetClass {
            k,
            join_semilattice,
            meet_semilattice,
            lattice: join_semilattice && meet_semilattice,
            join_free,
            meet_free,
            conical,
            location_symmetric,
            union_property,
        })
    }
}

/// Structural classification of a poset.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct PosetClass {
    /// Bound used for the set-quantified properties.
    pub k: usize,
    /// Every pair has a join.
    pub join_semilattice: bool,
    /// Every pair has a meet.
    pub meet_semilattice: bool,
    /// Both of the above.
    pub lattice: bool,
    /// Joins exist only for comparable pairs.
    pub join_free: bool,
    /// Meets exist only for comparable pairs.
    pub meet_free: bool,
    /// Equal support futures force equal spans (sets up to size `k`).
    pub conical: bool,
    /// The location-symmetry property (sets up to size `k`).
    pub location_symmetric: bool,
    /// The union property (sets up to size `k`).
    pub union_property: bool,
}

/// Every labeled strict partial order on `n` elements named `a`, `b`, ...
/// Supported for `n <= 5`.
pub fn all_posets(n: usize) -> Vec<Poset> {
    assert!(n <= 5, "exhaustive poset enumeration is limited to 5 elements");
    let names: Vec<String> = (0..n)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    'mask: for mask in 0u64..(1u64 << pairs.len()) {
        let mut lt = vec![vec![false; n]; n];
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if mask & (1 << b) != 0 {
                lt[i][j] = true;
            }
        }
        for i in 0..n {
            for j in 0..n {
                if lt[i][j] && lt[j][i] {
                    continue 'mask;
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if lt[i][j] {
                    for x in 0..n {
                        if lt[j][x] && !lt[i][x] {
                            continue 'mask;
                        }
                    }
                }
            }
        }
        let mut index = HashMap::new();
        for (i, e) in names.iter().enumerate() {
            index.insert(e.clone(), i);
        }
        out.push(Poset {
            elements: names.clone(),
            index,
            lt,
        });
    }
    out
}

/// Generates an integer Minkowski-style causal grid.
///
/// `spatial` is 1 or 2; points are `(t, x)` or `(t, x, y)` with every
/// coordinate in `[-extent, extent]`; `p` precedes `q` iff `t_q > t_p` and
/// `(t_q - t_p)^2 >= sum of squared spatial differences`.
pub fn minkowski_grid(spatial: usize, extent: i64) -> Result<Poset, PosetError> {
    if !(1..=2).contains(&spatial) {
        return Err(PosetError::Validation(
            "grid dimension must be 1+1 or 2+1".into(),
        ));
    }
    if extent < 1 {
        return Err(PosetError::Validation("grid extent must be at least 1".into()));
    }
    let range: Vec<i64> = (-extent..=extent).collect();
    let mut points: Vec<Vec<i64>> = Vec::new();
    for &t in &range {
        for &x in &range {
            if spatial == 1 {
                points.push(vec![t, x]);
            } else {
                for &y in &range {
                    points.push(vec![t, x, y]);
                }
            }
        }
    }
    let name = |p: &[i64]| -> String {
        format!(
            "({})",
            p.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
        )
    };
    let elements: Vec<String> = points.iter().map(|p| name(p)).collect();
    let n = points.len();
    let mut lt = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            let dt = points[j][0] - points[i][0];
            if dt <= 0 {
                continue;
            }
            let dist2: i64 = points[i][1..]
                .iter()
                .zip(&points[j][1..])
                .map(|(a, b)| (b - a) * (b - a))
                .sum();
            if dt * dt >= dist2 {
                lt[i][j] = true;
            }
        }
    }
    let mut index = HashMap::new();
    for (i, e) in elements.iter().enumerate() {
        index.insert(e.clone(), i);
    }
    Ok(Poset { elements, index, lt })
}
