//! Causal models with exact mechanism tables.
//!
//! A model is a list of named finite-cardinality nodes, each with a parent
//! list and a mechanism. Graphs may be cyclic but never contain self-loops.
//! Solving condenses the graph into strongly connected components: acyclic
//! components are processed like ordinary structural equations, while
//! multi-node components must be deterministic and are resolved by
//! enumerating their simultaneous solutions for each assignment of external
//! parents, splitting the inflowing weight uniformly over the solutions.

use std::collections::{BTreeMap, HashMap, HashSet};

use num::Zero;
use serde::Deserialize;
use thiserror::Error;

use crate::rational::{format_rat, parse_rat, Rat};

/// Errors produced by model parsing, validation and solving.
#[derive(Debug, Error)]
pub enum ModelError {
    /// Structural or schema validation failure.
    #[error("validation error: {0}")]
    Validation(String),
    /// A referenced node name does not exist.
    #[error("unknown node: {0}")]
    UnknownNode(String),
    /// A cyclic component admits no simultaneous solution for an assignment
    /// of its external parents that occurs with positive probability.
    #[error("inconsistent model: cyclic component {{{}}} has no solution", nodes.join(", "))]
    Inconsistent {
        /// Members of the unsolvable component.
        nodes: Vec<String>,
    },
    /// A multi-node cyclic component contains a non-deterministic mechanism.
    #[error("unsupported cyclic stochastic mechanism at node {node}")]
    UnsupportedCyclicStochastic {
        /// The offending node.
        node: String,
    },
}

/// A node's mechanism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mechanism {
    /// Distribution over outcomes for a parentless node (single row).
    Exogenous(Vec<Rat>),
    /// One distribution row per parent assignment.
    Stochastic(Vec<Vec<Rat>>),
    /// One outcome per parent assignment.
    Deterministic(Vec<usize>),
}

/// A single node of a model.
#[derive(Debug, Clone)]
pub struct Node {
    /// Unique node name.
    pub name: String,
    /// Number of outcomes (`0..cardinality`).
    pub cardinality: usize,
    /// Whether the node is observed (interventions and affects queries only
    /// range over observed nodes).
    pub observed: bool,
    /// Parent indices, in the declared order; row-major table indexing uses
    /// this order with the last parent varying fastest.
    pub parents: Vec<usize>,
    /// The node's mechanism.
    pub mechanism: Mechanism,
}

/// A causal model over finite named variables.
#[derive(Debug, Clone)]
pub struct Model {
    nodes: Vec<Node>,
    index: HashMap<String, usize>,
}

/// A partial assignment of nodes to outcome values, keyed by node index.
pub type Assignment = BTreeMap<usize, usize>;

/// A sparse exact joint distribution over a list of nodes.
///
/// `probs` holds only assignments with positive probability; keys are value
/// vectors aligned with `scope`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Joint {
    /// Node indices the distribution ranges over, in scope order.
    pub scope: Vec<usize>,
    /// Positive-probability entries.
    pub probs: BTreeMap<Vec<usize>, Rat>,
}

impl Joint {
    /// Marginalizes onto `keep` (a sub-list of the scope, in the requested
    /// order).
    pub fn marginal(&self, keep: &[usize]) -> Joint {
        let positions: Vec<usize> = keep
            .iter()
            .map(|k| {
                self.scope
                    .iter()
                    .position(|s| s == k)
                    .expect("marginal target outside scope")
            })
            .collect();
        let mut probs: BTreeMap<Vec<usize>, Rat> = BTreeMap::new();
        for (vals, p) in &self.probs {
            let key: Vec<usize> = positions.iter().map(|&i| vals[i]).collect();
            *probs.entry(key).or_insert_with(Rat::zero) += p.clone();
        }
        Joint {
            scope: keep.to_vec(),
            probs,
        }
    }

    /// Probability mass of the event fixing `fixed` (scope-subset indices to
    /// values).
    pub fn event_prob(&self, fixed: &[(usize, usize)]) -> Rat {
        let positions: Vec<(usize, usize)> = fixed
            .iter()
            .map(|&(node, v)| {
                (
                    self.scope
                        .iter()
                        .position(|s| *s == node)
                        .expect("event node outside scope"),
                    v,
                )
            })
            .collect();
        let mut total = Rat::zero();
        for (vals, p) in &self.probs {
            if positions.iter().all(|&(i, v)| vals[i] == v) {
                total += p.clone();
            }
        }
        total
    }
}

#[derive(Deserialize)]
struct ModelJson {
    nodes: Vec<NodeJson>,
}

#[derive(Deserialize)]
struct NodeJson {
    name: String,
    cardinality: usize,
    observed: bool,
    #[serde(default)]
    parents: Vec<String>,
    mechanism: MechanismJson,
}

#[derive(Deserialize)]
struct MechanismJson {
    kind: String,
    table: serde_json::Value,
}

fn parse_rows(table: &serde_json::Value) -> Result<Vec<Vec<Rat>>, ModelError> {
    let rows = table
        .as_array()
        .ok_or_else(|| ModelError::Validation("mechanism table must be an array".into()))?;
    rows.iter()
        .map(|row| {
            let cells = row.as_array().ok_or_else(|| {
                ModelError::Validation("distribution table rows must be arrays".into())
            })?;
            cells
                .iter()
                .map(|c| {
                    let s = c.as_str().ok_or_else(|| {
                        ModelError::Validation("probabilities must be \"p/q\" strings".into())
                    })?;
                    parse_rat(s).map_err(ModelError::Validation)
                })
                .collect()
        })
        .collect()
}

impl Model {
    /// Builds a model directly from nodes; validates structure and tables.
    pub fn new(nodes: Vec<Node>) -> Result<Model, ModelError> {
        let mut index = HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if n.name.is_empty() {
                return Err(ModelError::Validation("empty node name".into()));
            }
            if index.insert(n.name.clone(), i).is_some() {
                return Err(ModelError::Validation(format!(
                    "duplicate node name {:?}",
                    n.name
                )));
            }
        }
        let model = Model { nodes, index };
        model.validate()?;
        Ok(model)
    }

    /// Parses a model from its JSON text form.
    pub fn from_json_str(text: &str) -> Result<Model, ModelError> {
        let parsed: ModelJson = serde_json::from_str(text)
            .map_err(|e| ModelError::Validation(format!("model JSON: {e}")))?;
        let mut index = HashMap::new();
        for (i, n) in parsed.nodes.iter().enumerate() {
            if index.insert(n.name.clone(), i).is_some() {
                return Err(ModelError::Validation(format!(
                    "duplicate node name {:?}",
                    n.name
                )));
            }
        }
        let mut nodes = Vec::new();
        for n in &parsed.nodes {
            let parents: Vec<usize> = n
                .parents
                .iter()
                .map(|p| {
                    index
                        .get(p)
                        .copied()
                        .ok_or_else(|| ModelError::UnknownNode(p.clone()))
                })
                .collect::<Result<_, _>>()?;
            let mechanism = match n.mechanism.kind.as_str() {
                "exogenous-distribution" => {
                    let rows = parse_rows(&n.mechanism.table)?;
                    if rows.len() != 1 {
                        return Err(ModelError::Validation(format!(
                            "node {:?}: exogenous-distribution takes exactly one row",
                            n.name
                        )));
                    }
                    Mechanism::Exogenous(rows.into_iter().next().unwrap())
                }
                "stochastic-table" => Mechanism::Stochastic(parse_rows(&n.mechanism.table)?),
                "deterministic-table" => {
                    let cells = n.mechanism.table.as_array().ok_or_else(|| {
                        ModelError::Validation("mechanism table must be an array".into())
                    })?;
                    let outcomes = cells
                        .iter()
                        .map(|c| {
                            c.as_u64().map(|v| v as usize).ok_or_else(|| {
                                ModelError::Validation(format!(
                                    "node {:?}: deterministic table entries must be integers",
                                    n.name
                                ))
                            })
                        })
                        .collect::<Result<Vec<usize>, _>>()?;
                    Mechanism::Deterministic(outcomes)
                }
                other => {
                    return Err(ModelError::Validation(format!(
                        "unknown mechanism kind {other:?}"
                    )))
                }
            };
            nodes.push(Node {
                name: n.name.clone(),
                cardinality: n.cardinality,
                observed: n.observed,
                parents,
                mechanism,
            });
        }
        Model::new(nodes)
    }

    fn validate(&self) -> Result<(), ModelError> {
        for (i, n) in self.nodes.iter().enumerate() {
            if n.cardinality == 0 {
                return Err(ModelError::Validation(format!(
                    "node {:?}: cardinality must be positive",
                    n.name
                )));
            }
            let mut seen = HashSet::new();
            for &p in &n.parents {
                if p == i {
                    return Err(ModelError::Validation(format!(
                        "node {:?}: self-loops are not allowed",
                        n.name
                    )));
                }
                if !seen.insert(p) {
                    return Err(ModelError::Validation(format!(
                        "node {:?}: duplicate parent {:?}",
                        n.name, self.nodes[p].name
                    )));
                }
            }
            let row_count: usize = n.parents.iter().map(|&p| self.nodes[p].cardinality).product();
            match &n.mechanism {
                Mechanism::Exogenous(row) => {
                    if !n.parents.is_empty() {
                        return Err(ModelError::Validation(format!(
                            "node {:?}: exogenous-distribution requires no parents",
                            n.name
                        )));
                    }
                    self.validate_row(n, row)?;
                }
                Mechanism::Stochastic(rows) => {
                    if rows.len() != row_count {
                        return Err(ModelError::Validation(format!(
                            "node {:?}: expected {} table rows, found {}",
                            n.name,
                            row_count,
                            rows.len()
                        )));
                    }
                    for row in rows {
                        self.validate_row(n, row)?;
                    }
                }
                Mechanism::Deterministic(outs) => {
                    if outs.len() != row_count {
                        return Err(ModelError::Validation(format!(
                            "node {:?}: expected {} table rows, found {}",
                            n.name,
                            row_count,
                            outs.len()
                        )));
                    }
                    for &o in outs {
                        if o >= n.cardinality {
                            return Err(ModelError::Validation(format!(
                                "node {:?}: outcome {} out of range",
                                n.name, o
                            )));
                        }
                    }
                }
            }
            self.validate_dependence(i)?;
        }
        Ok(())
    }

    fn validate_row(&self, n: &Node, row: &[Rat]) -> Result<(), ModelError> {
        if row.len() != n.cardinality {
            return Err(ModelError::Validation(format!(
                "node {:?}: row length {} does not match cardinality {}",
                n.name,
                row.len(),
                n.cardinality
            )));
        }
        let mut total = Rat::zero();
        for p in row {
            if p < &Rat::zero() {
                return Err(ModelError::Validation(format!(
                    "node {:?}: negative probability",
                    n.name
                )));
            }
            total += p.clone();
        }
        if total != Rat::from_integer(1.into()) {
            return Err(ModelError::Validation(format!(
                "node {:?}: row does not sum to 1",
                n.name
            )));
        }
        Ok(())
    }

    /// Checks that the mechanism of node `i` depends non-trivially on every
    /// declared parent: for each parent there must be two parent assignments
    /// differing only there with different rows / outcomes.
    fn validate_dependence(&self, i: usize) -> Result<(), ModelError> {
        let n = &self.nodes[i];
        if n.parents.is_empty() {
            return Ok(());
        }
        let cards: Vec<usize> = n.parents.iter().map(|&p| self.nodes[p].cardinality).collect();
        let row_count: usize = cards.iter().product();
        for (slot, &card) in cards.iter().enumerate() {
            // Stride of this parent in the row-major index (last parent
            // varies fastest).
            let stride: usize = cards[slot + 1..].iter().product();
            let mut depends = false;
            'rows: for base in 0..row_count {
                let digit = (base / stride) % card;
                if digit != 0 {
                    continue;
                }
                for v in 1..card {
                    let other = base + v * stride;
                    let differs = match &n.mechanism {
                        Mechanism::Stochastic(rows) => rows[base] != rows[other],
                        Mechanism::Deterministic(outs) => outs[base] != outs[other],
                        Mechanism::Exogenous(_) => unreachable!(),
                    };
                    if differs {
                        depends = true;
                        break 'rows;
                    }
                }
            }
            if !depends {
                return Err(ModelError::Validation(format!(
                    "node {:?}: mechanism does not depend on parent {:?}",
                    n.name, self.nodes[n.parents[slot]].name
                )));
            }
        }
        Ok(())
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// True iff the model has no nodes.
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The node list.
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Resolves a node name to its index.
    pub fn node_index(&self, name: &str) -> Result<usize, ModelError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::UnknownNode(name.to_string()))
    }

    /// Indices of observed nodes, in declaration order.
    pub fn observed_indices(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].observed)
            .collect()
    }

    /// Direct parents of `i`.
    pub fn parents(&self, i: usize) -> Vec<usize> {
        self.nodes[i].parents.clone()
    }

    /// Direct children of `i`.
    pub fn children(&self, i: usize) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&c| self.nodes[c].parents.contains(&i))
            .collect()
    }

    /// All strict ancestors of `i` (follows parent edges; handles cycles).
    pub fn ancestors(&self, i: usize) -> Vec<usize> {
        self.reach(i, |m, j| m.parents(j))
    }

    /// All strict descendants of `i`.
    pub fn descendants(&self, i: usize) -> Vec<usize> {
        self.reach(i, |m, j| m.children(j))
    }

    fn reach(&self, start: usize, step: impl Fn(&Model, usize) -> Vec<usize>) -> Vec<usize> {
        let mut seen = HashSet::new();
        let mut stack = step(self, start);
        while let Some(j) = stack.pop() {
            if seen.insert(j) {
                stack.extend(step(self, j));
            }
        }
        let mut out: Vec<usize> = seen.into_iter().collect();
        out.sort_unstable();
        out
    }

    /// True iff `i` has no parents.
    pub fn is_exogenous(&self, i: usize) -> bool {
        self.nodes[i].parents.is_empty()
    }

    /// Row index into a mechanism table for the given full assignment.
    fn row_index(&self, node: usize, values: &[usize]) -> usize {
        let n = &self.nodes[node];
        n.parents.iter().fold(0, |acc, &p| {
            acc * self.nodes[p].cardinality + values[p]
        })
    }

    /// The model obtained by forcing each node in `fix` to a point value and
    /// severing its incoming edges.
    pub fn intervene(&self, fix: &Assignment) -> Result<Model, ModelError> {
        let mut nodes = self.nodes.clone();
        for (&i, &v) in fix {
            let n = &mut nodes[i];
            if v >= n.cardinality {
                return Err(ModelError::Validation(format!(
                    "intervention value {} out of range for node {:?}",
                    v, n.name
                )));
            }
            let mut row = vec![Rat::zero(); n.cardinality];
            row[v] = Rat::from_integer(1.into());
            n.parents = Vec::new();
            n.mechanism = Mechanism::Exogenous(row);
        }
        // Bypass Model::new: point interventions intentionally break the
        // dependence invariant checks only for removed parents, and the
        // remaining structure is unchanged and already validated.
        Ok(Model {
            nodes,
            index: self.index.clone(),
        })
    }

    /// Solves for the exact joint distribution over all nodes.
    pub fn solve_full(&self) -> Result<Joint, ModelError> {
        let n = self.nodes.len();
        let mut graph = petgraph::graph::DiGraph::<usize, ()>::new();
        let idxs: Vec<_> = (0..n).map(|i| graph.add_node(i)).collect();
        for (i, node) in self.nodes.iter().enumerate() {
            for &p in &node.parents {
                graph.add_edge(idxs[p], idxs[i], ());
            }
        }
        let mut sccs = petgraph::algo::tarjan_scc(&graph);
        sccs.reverse(); // topological order: parents before children

        let mut states: Vec<(Vec<usize>, Rat)> = vec![(vec![usize::MAX; n], Rat::from_integer(1.into()))];
        for scc in &sccs {
            let members: Vec<usize> = scc.iter().map(|ix| graph[*ix]).collect();
            if members.len() == 1 {
                let i = members[0];
                let mut next = Vec::with_capacity(states.len());
                for (vals, w) in states {
                    match &self.nodes[i].mechanism {
                        Mechanism::Exogenous(row) => {
                            for (v, p) in row.iter().enumerate() {
                                if !p.is_zero() {
                                    let mut nv = vals.clone();
                                    nv[i] = v;
                                    next.push((nv, &w * p));
                                }
                            }
                        }
                        Mechanism::Stochastic(rows) => {
                            let row = &rows[self.row_index(i, &vals)];
                            for (v, p) in row.iter().enumerate() {
                                if !p.is_zero() {
                                    let mut nv = vals.clone();
                                    nv[i] = v;
                                    next.push((nv, &w * p));
                                }
                            }
                        }
                        Mechanism::Deterministic(outs) => {
                            let v = outs[self.row_index(i, &vals)];
                            let mut nv = vals;
                            nv[i] = v;
                            next.push((nv, w));
                        }
                    }
                }
                states = next;
            } else {
                for &i in &members {
                    if !matches!(self.nodes[i].mechanism, Mechanism::Deterministic(_)) {
                        return Err(ModelError::UnsupportedCyclicStochastic {
                            node: self.nodes[i].name.clone(),
                        });
                    }
                }
                let cards: Vec<usize> =
                    members.iter().map(|&i| self.nodes[i].cardinality).collect();
                let combos: usize = cards.iter().product();
                let mut next = Vec::with_capacity(states.len());
                for (vals, w) in states {
                    let mut solutions: Vec<Vec<usize>> = Vec::new();
                    for c in 0..combos {
                        let mut candidate = vals.clone();
                        let mut rem = c;
                        for (k, &i) in members.iter().enumerate() {
                            candidate[i] = rem % cards[k];
                            rem /= cards[k];
                        }
                        let consistent = members.iter().all(|&i| {
                            match &self.nodes[i].mechanism {
                                Mechanism::Deterministic(outs) => {
                                    outs[self.row_index(i, &candidate)] == candidate[i]
                                }
                                _ => unreachable!(),
                            }
                        });
                        if consistent {
                            solutions.push(candidate);
                        }
                    }
                    if solutions.is_empty() {
                        return Err(ModelError::Inconsistent {
                            nodes: members.iter().map(|&i| self.nodes[i].name.clone()).collect(),
                        });
                    }
                    let share = &w / Rat::from_integer((solutions.len() as i64).into());
                    for s in solutions {
                        next.push((s, share.clone()));
                    }
                }
                states = next;
            }
        }

        let mut probs: BTreeMap<Vec<usize>, Rat> = BTreeMap::new();
        for (vals, w) in states {
            *probs.entry(vals).or_insert_with(Rat::zero) += w;
        }
        Ok(Joint {
            scope: (0..n).collect(),
            probs,
        })
    }

    /// The joint distribution over observed nodes.
    pub fn solve_observed(&self) -> Result<Joint, ModelError> {
        Ok(self.solve_full()?.marginal(&self.observed_indices()))
    }

    /// The distribution over observed nodes after intervening per `fix`.
    pub fn post_intervention(&self, fix: &Assignment) -> Result<Joint, ModelError> {
        self.intervene(fix)?.solve_observed()
    }

    /// Serializes the joint over named nodes as a JSON object mapping
    /// comma-joined value tuples to `"p/q"` strings.
    pub fn joint_to_json(&self, joint: &Joint) -> serde_json::Value {
        let scope: Vec<String> = joint
            .scope
            .iter()
            .map(|&i| self.nodes[i].name.clone())
            .collect();
        let mut probs = serde_json::Map::new();
        for (vals, p) in &joint.probs {
            let key = vals
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",");
            probs.insert(key, serde_json::Value::String(format_rat(p)));
        }
        serde_json::json!({ "scope": scope, "probabilities": probs })
    }
}
