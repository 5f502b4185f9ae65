//! Measurement scenarios: labelled measurements, a compatibility graph, and
//! a list of contexts (jointly measurable subsets). A context must induce a
//! complete subgraph of the compatibility graph, and every compatibility
//! edge must lie inside at least one context, so that the observed
//! coordinates determine all pairwise entropies.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chordal::{maximal_cliques, Graph};
use crate::subsets::{canonical_cmp, Subset, SubsetIndex};

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("duplicate measurement label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown measurement label `{0}`")]
    DanglingLabel(String),
    #[error("context {0:?} is not a clique of the compatibility graph")]
    ContextNotClique(Vec<String>),
    #[error("context is empty")]
    EmptyContext,
    #[error("duplicate context {0:?}")]
    DuplicateContext(Vec<String>),
    #[error("edge {0}-{1} is not covered by any context")]
    EdgeNotCovered(String, String),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("need at least {min} measurements, got {got}")]
    TooFew { min: usize, got: usize },
    #[error("entropy vector index does not match: {0}")]
    IndexMismatch(String),
    #[error("entropy value for {0} is not finite or negative beyond tolerance")]
    BadEntropyValue(String),
}

/// A measurement scenario: compatibility graph plus context list.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    labels: Vec<String>,
    label_pos: HashMap<String, usize>,
    edges: BTreeSet<(usize, usize)>,
    contexts: Vec<Subset>,
}

impl Scenario {
    /// Build and validate a scenario. When `contexts` is `None` the maximal
    /// cliques of the compatibility graph are used (isolated measurements
    /// become singleton contexts).
    pub fn new(
        labels: Vec<String>,
        edge_labels: &[(String, String)],
        contexts: Option<Vec<Vec<String>>>,
    ) -> Result<Scenario, ScenarioError> {
        let mut label_pos = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if label_pos.insert(l.clone(), i).is_some() {
                return Err(ScenarioError::DuplicateLabel(l.clone()));
            }
        }
        let lookup = |l: &String| -> Result<usize, ScenarioError> {
            label_pos
                .get(l)
                .copied()
                .ok_or_else(|| ScenarioError::DanglingLabel(l.clone()))
        };
        let mut edges = BTreeSet::new();
        for (u, v) in edge_labels {
            let ui = lookup(u)?;
            let vi = lookup(v)?;
            if ui == vi {
                return Err(ScenarioError::SelfLoop(u.clone()));
            }
            edges.insert((ui.min(vi), ui.max(vi)));
        }
        let contexts: Vec<Subset> = match contexts {
            Some(ctxs) => {
                let mut out = Vec::new();
                for ctx in ctxs {
                    if ctx.is_empty() {
                        return Err(ScenarioError::EmptyContext);
                    }
                    let mut s = Subset::EMPTY;
                    for l in &ctx {
                        s = s.insert(lookup(l)?);
                    }
                    out.push(s);
                }
                out
            }
            None => {
                let graph = graph_from(&labels, &edges);
                maximal_cliques(&graph)
                    .into_iter()
                    .map(|c| Subset::from_indices(c.into_iter()))
                    .collect()
            }
        };
        let scenario = Scenario {
            labels,
            label_pos,
            edges,
            contexts,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        let mut seen = BTreeSet::new();
        for &ctx in &self.contexts {
            if ctx.is_empty() {
                return Err(ScenarioError::EmptyContext);
            }
            if !seen.insert(ctx.bits()) {
                return Err(ScenarioError::DuplicateContext(self.subset_labels(ctx)));
            }
            let members = ctx.indices();
            for i in 0..members.len() {
                for j in i + 1..members.len() {
                    let e = (members[i].min(members[j]), members[i].max(members[j]));
                    if !self.edges.contains(&e) {
                        return Err(ScenarioError::ContextNotClique(self.subset_labels(ctx)));
                    }
                }
            }
        }
        for &(u, v) in &self.edges {
            let covered = self
                .contexts
                .iter()
                .any(|c| c.contains(u) && c.contains(v));
            if !covered {
                return Err(ScenarioError::EdgeNotCovered(
                    self.labels[u].clone(),
                    self.labels[v].clone(),
                ));
            }
        }
        Ok(())
    }

    /// The n-cycle scenario: measurements A1..An, each compatible with the
    /// next (cyclically), contexts being the n adjacent pairs. n = 5 is the
    /// pentagon contextuality scenario.
    pub fn n_cycle(n: usize) -> Result<Scenario, ScenarioError> {
        if n < 3 {
            return Err(ScenarioError::TooFew { min: 3, got: n });
        }
        let labels: Vec<String> = (1..=n).map(|i| format!("A{i}")).collect();
        let mut edges = Vec::new();
        let mut contexts = Vec::new();
        for i in 0..n {
            let j = (i + 1) % n;
            edges.push((labels[i].clone(), labels[j].clone()));
            contexts.push(vec![labels[i].clone(), labels[j].clone()]);
        }
        Scenario::new(labels, &edges, Some(contexts))
    }

    /// The chained bipartite scenario with m settings per side: labels
    /// A0..A{m-1}, B0..B{m-1}; the compatibility graph is the 2m-cycle
    /// A0-B0-A1-B1-...-A{m-1}-B{m-1}-A0 and the contexts are its 2m edges.
    /// m = 2 is the familiar four-context bipartite square.
    pub fn chained_bell(m: usize) -> Result<Scenario, ScenarioError> {
        if m < 2 {
            return Err(ScenarioError::TooFew { min: 2, got: m });
        }
        let mut labels = Vec::new();
        for i in 0..m {
            labels.push(format!("A{i}"));
        }
        for i in 0..m {
            labels.push(format!("B{i}"));
        }
        let a = |i: usize| format!("A{i}");
        let b = |i: usize| format!("B{i}");
        let mut contexts: Vec<Vec<String>> = Vec::new();
        for i in 0..m {
            contexts.push(vec![a(i), b(i)]);
            if i + 1 < m {
                contexts.push(vec![b(i), a(i + 1)]);
            }
        }
        contexts.push(vec![a(0), b(m - 1)]);
        let edges: Vec<(String, String)> = contexts
            .iter()
            .map(|c| (c[0].clone(), c[1].clone()))
            .collect();
        Scenario::new(labels, &edges, Some(contexts))
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.label_pos.get(label).copied()
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn contexts(&self) -> &[Subset] {
        &self.contexts
    }

    pub fn subset_labels(&self, s: Subset) -> Vec<String> {
        s.iter().map(|i| self.labels[i].clone()).collect()
    }

    pub fn compatibility_graph(&self) -> Graph {
        graph_from(&self.labels, &self.edges)
    }

    /// Full coordinate system: all 2^n - 1 nonempty subsets.
    pub fn full_index(&self) -> SubsetIndex {
        SubsetIndex::full(self.labels.clone())
    }

    /// Observed coordinate system: exactly the nonempty subsets contained in
    /// some context.
    pub fn observed_index(&self) -> SubsetIndex {
        let mut subsets = BTreeSet::new();
        for &ctx in &self.contexts {
            for s in ctx.nonempty_subsets() {
                subsets.insert(s.bits());
            }
        }
        let subsets: Vec<Subset> = subsets.into_iter().map(Subset::from_bits).collect();
        SubsetIndex::from_subsets(self.labels.clone(), subsets)
    }
}

fn graph_from(labels: &[String], edges: &BTreeSet<(usize, usize)>) -> Graph {
    let mut g = Graph::new(labels.to_vec()).expect("labels validated upstream");
    for &(u, v) in edges {
        g.add_edge(u, v);
    }
    g
}

/// Vector of joint entropies (bits, log base 2) over some subset index.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyVector {
    index: SubsetIndex,
    values: Vec<f64>,
}

/// Slack below zero tolerated for stored entropy values: rounding in f64
/// entropy computations can leave tiny negatives where the exact value is 0.
const ENTROPY_NEG_TOL: f64 = 1e-9;

impl EntropyVector {
    pub fn new(index: SubsetIndex, values: Vec<f64>) -> Result<EntropyVector, ScenarioError> {
        if index.len() != values.len() {
            return Err(ScenarioError::IndexMismatch(format!(
                "index has {} coordinates, got {} values",
                index.len(),
                values.len()
            )));
        }
        for (pos, v) in values.iter().enumerate() {
            if !v.is_finite() || *v < -ENTROPY_NEG_TOL {
                return Err(ScenarioError::BadEntropyValue(
                    index.subset_name(index.subset_at(pos)),
                ));
            }
        }
        Ok(EntropyVector { index, values })
    }

    pub fn zeros(index: SubsetIndex) -> EntropyVector {
        let values = vec![0.0; index.len()];
        EntropyVector { index, values }
    }

    pub fn index(&self) -> &SubsetIndex {
        &self.index
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, s: Subset) -> Option<f64> {
        self.index.position(s).map(|p| self.values[p])
    }

    /// Look a coordinate up by its label set; usable across indices that
    /// share labels in different positions.
    pub fn value_by_labels(&self, labels: &BTreeSet<String>) -> Option<f64> {
        let mut s = Subset::EMPTY;
        for l in labels {
            let i = self.index.labels().iter().position(|x| x == l)?;
            s = s.insert(i);
        }
        self.value(s)
    }

    /// Restrict a full vector to the scenario's observed coordinates. A pure
    /// coordinate restriction: each observed value is copied from the full
    /// coordinate of the same subset.
    pub fn project(&self, scenario: &Scenario) -> Result<EntropyVector, ScenarioError> {
        let observed = scenario.observed_index();
        if scenario.labels() != self.index.labels() {
            return Err(ScenarioError::IndexMismatch(
                "label lists differ between vector and scenario".into(),
            ));
        }
        let mut values = Vec::with_capacity(observed.len());
        for s in observed.subsets() {
            match self.value(*s) {
                Some(v) => values.push(v),
                None => {
                    return Err(ScenarioError::IndexMismatch(format!(
                        "coordinate {} missing from source vector",
                        observed.subset_name(*s)
                    )))
                }
            }
        }
        Ok(EntropyVector {
            index: observed,
            values,
        })
    }

    /// Serialize as a map from subset names ("A1,A2") to values, ordered
    /// canonically.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (pos, s) in self.index.subsets().iter().enumerate() {
            map.insert(
                self.index.subset_name(*s),
                serde_json::json!(self.values[pos]),
            );
        }
        serde_json::Value::Object(map)
    }

    /// Read a vector over the given index from the JSON map form. Every
    /// coordinate of the index must be present; unknown keys are rejected.
    pub fn from_json(
        index: SubsetIndex,
        json: &serde_json::Value,
    ) -> Result<EntropyVector, ScenarioError> {
        let obj = json
            .as_object()
            .ok_or_else(|| ScenarioError::IndexMismatch("expected a JSON object".into()))?;
        let mut by_subset: BTreeMap<u64, f64> = BTreeMap::new();
        for (key, val) in obj {
            let s = index
                .parse_subset_name(key)
                .ok_or_else(|| ScenarioError::IndexMismatch(format!("unknown subset `{key}`")))?;
            let v = val
                .as_f64()
                .ok_or_else(|| ScenarioError::BadEntropyValue(key.clone()))?;
            by_subset.insert(s.bits(), v);
        }
        let mut values = Vec::with_capacity(index.len());
        for s in index.subsets() {
            match by_subset.get(&s.bits()) {
                Some(v) => values.push(*v),
                None => {
                    return Err(ScenarioError::IndexMismatch(format!(
                        "missing coordinate {}",
                        index.subset_name(*s)
                    )))
                }
            }
        }
        EntropyVector::new(index, values)
    }
}

/// On-disk scenario format.
#[derive(Serialize, Deserialize)]
struct ScenarioFile {
    labels: Vec<String>,
    edges: Vec<[String; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    contexts: Option<Vec<Vec<String>>>,
}

impl Scenario {
    pub fn to_json(&self) -> serde_json::Value {
        let file = ScenarioFile {
            labels: self.labels.clone(),
            edges: self
                .edges
                .iter()
                .map(|&(u, v)| [self.labels[u].clone(), self.labels[v].clone()])
                .collect(),
            contexts: Some(
                self.contexts
                    .iter()
                    .map(|c| self.subset_labels(*c))
                    .collect(),
            ),
        };
        serde_json::to_value(file).expect("scenario serialization cannot fail")
    }

    pub fn from_json(json: &serde_json::Value) -> Result<Scenario, ScenarioError> {
        let file: ScenarioFile = serde_json::from_value(json.clone())
            .map_err(|e| ScenarioError::IndexMismatch(format!("bad scenario JSON: {e}")))?;
        let edges: Vec<(String, String)> = file
            .edges
            .iter()
            .map(|[u, v]| (u.clone(), v.clone()))
            .collect();
        Scenario::new(file.labels, &edges, file.contexts)
    }
}

/// Sorts contexts canonically; used by tests to compare context families.
pub fn sorted_contexts(scenario: &Scenario) -> Vec<Subset> {
    let mut ctxs = scenario.contexts().to_vec();
    ctxs.sort_by(|a, b| canonical_cmp(*a, *b));
    ctxs
}
