//! Two-part chordal decomposition search: split the union compatibility
//! graph of two tests into two edge sets, each inducing a chordal graph,
//! while the tests' conditional-entropy terms regroup term-by-term into one
//! part each. When both regrouped expressions are additionally valid
//! Shannon-cone bounds on their parts, the pair of tests is monogamous:
//! chordality extends quantum data on each part, so each regrouped
//! expression is nonpositive and so is the original sum.
//!
//! The search is exact backtracking within a node budget. `NotFound` means
//! the space was exhausted; `Unknown` means the budget ran out first.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{is_chordal, maximal_cliques, Graph};
use crate::inequalities::{
    verify_nchv_bound, BoundClass, CondTerm, ExpressionError, TestExpression,
};
use crate::scenario::Scenario;

#[derive(Clone, Debug)]
pub struct ChordalDecomposition {
    /// Edge sets of the two parts, as label pairs (lexicographic order
    /// inside each pair).
    pub part_edges: [BTreeSet<(String, String)>; 2],
    /// The regrouped expressions, one per part, each a valid bound over its
    /// part scenario.
    pub part_expressions: [TestExpression; 2],
}

impl ChordalDecomposition {
    /// Both parts induce chordal graphs and together cover every edge of
    /// the union graph.
    pub fn covers(&self, union_graph: &Graph) -> bool {
        let all: BTreeSet<(String, String)> = union_graph
            .edges()
            .iter()
            .map(|&(u, v)| order_pair(union_graph.label(u), union_graph.label(v)))
            .collect();
        let mut union: BTreeSet<(String, String)> = self.part_edges[0].clone();
        union.extend(self.part_edges[1].iter().cloned());
        union == all
    }
}

#[derive(Clone, Debug)]
pub enum DecompositionOutcome {
    Found(Box<ChordalDecomposition>),
    /// Exhaustive within the budget: no decomposition exists.
    NotFound,
    /// Budget exceeded before the space was exhausted.
    Unknown,
}

impl DecompositionOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, DecompositionOutcome::Found(_))
    }
}

/// Search limits. `max_nodes` counts assignment tree nodes; `max_checks`
/// counts component validity LP calls (cache misses).
#[derive(Clone, Debug)]
pub struct DecomposeBudget {
    pub max_nodes: usize,
    pub max_checks: usize,
}

impl Default for DecomposeBudget {
    fn default() -> Self {
        DecomposeBudget {
            max_nodes: 500_000,
            max_checks: 5_000,
        }
    }
}

fn order_pair(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// Find a term-respecting decomposition of the union scenario into two
/// chordal parts whose regrouped expressions are valid bounds. Terms
/// sharing a context edge move together; compatibility edges carrying no
/// term may go to either part or both. The first solution in the fixed
/// lexicographic exploration order is returned, so results are
/// deterministic.
pub fn find_chordal_2_decomposition(
    union_scenario: &Scenario,
    expr1: &TestExpression,
    expr2: &TestExpression,
    budget: &DecomposeBudget,
) -> Result<DecompositionOutcome, ExpressionError> {
    let union_graph = union_scenario.compatibility_graph();

    // Group terms by context edge (label pair).
    let mut groups: BTreeMap<(String, String), Vec<CondTerm>> = BTreeMap::new();
    for term in expr1.terms().iter().chain(expr2.terms()) {
        groups.entry(term.edge()).or_default().push(term.clone());
    }
    for edge in groups.keys() {
        let u = union_scenario
            .label_index(&edge.0)
            .ok_or_else(|| ExpressionError::MissingCoordinate(edge.0.clone()))?;
        let v = union_scenario
            .label_index(&edge.1)
            .ok_or_else(|| ExpressionError::MissingCoordinate(edge.1.clone()))?;
        if !union_scenario.edges().contains(&(u.min(v), u.max(v))) {
            return Err(ExpressionError::MissingCoordinate(format!(
                "{}-{}",
                edge.0, edge.1
            )));
        }
    }
    let term_edges: Vec<(String, String)> = groups.keys().cloned().collect();
    let free_edges: Vec<(String, String)> = union_graph
        .edges()
        .iter()
        .map(|&(u, v)| order_pair(union_graph.label(u), union_graph.label(v)))
        .filter(|e| !groups.contains_key(e))
        .collect();

    let mut search = Search {
        groups: &groups,
        term_edges: &term_edges,
        free_edges: &free_edges,
        budget,
        nodes: 0,
        checks: 0,
        validity_cache: HashMap::new(),
        truncated: false,
        term_assign: vec![0u8; term_edges.len()],
        free_assign: vec![0u8; free_edges.len()],
    };
    match search.run()? {
        Some(found) => Ok(DecompositionOutcome::Found(Box::new(found))),
        None if search.truncated => Ok(DecompositionOutcome::Unknown),
        None => Ok(DecompositionOutcome::NotFound),
    }
}

struct Search<'a> {
    groups: &'a BTreeMap<(String, String), Vec<CondTerm>>,
    term_edges: &'a [(String, String)],
    free_edges: &'a [(String, String)],
    budget: &'a DecomposeBudget,
    nodes: usize,
    checks: usize,
    validity_cache: HashMap<String, bool>,
    truncated: bool,
    /// 1 or 2 per term edge.
    term_assign: Vec<u8>,
    /// 1, 2 or 3 (= both) per free edge.
    free_assign: Vec<u8>,
}

impl<'a> Search<'a> {
    fn run(&mut self) -> Result<Option<ChordalDecomposition>, ExpressionError> {
        self.assign_terms(0)
    }

    fn assign_terms(&mut self, k: usize) -> Result<Option<ChordalDecomposition>, ExpressionError> {
        if self.nodes >= self.budget.max_nodes {
            self.truncated = true;
            return Ok(None);
        }
        self.nodes += 1;
        if k == self.term_edges.len() {
            return self.assign_free(0);
        }
        // Swapping the two parts is a symmetry; pin the first group.
        let choices: &[u8] = if k == 0 { &[1] } else { &[1, 2] };
        for &part in choices {
            self.term_assign[k] = part;
            if let Some(found) = self.assign_terms(k + 1)? {
                return Ok(Some(found));
            }
        }
        Ok(None)
    }

    fn assign_free(&mut self, k: usize) -> Result<Option<ChordalDecomposition>, ExpressionError> {
        if self.nodes >= self.budget.max_nodes {
            self.truncated = true;
            return Ok(None);
        }
        self.nodes += 1;
        if k == self.free_edges.len() {
            return self.evaluate_leaf();
        }
        for part in [1u8, 2, 3] {
            self.free_assign[k] = part;
            if let Some(found) = self.assign_free(k + 1)? {
                return Ok(Some(found));
            }
        }
        Ok(None)
    }

    fn part_edge_set(&self, part: u8) -> BTreeSet<(String, String)> {
        let mut edges = BTreeSet::new();
        for (k, e) in self.term_edges.iter().enumerate() {
            if self.term_assign[k] == part {
                edges.insert(e.clone());
            }
        }
        for (k, e) in self.free_edges.iter().enumerate() {
            if self.free_assign[k] & part != 0 {
                edges.insert(e.clone());
            }
        }
        edges
    }

    fn evaluate_leaf(&mut self) -> Result<Option<ChordalDecomposition>, ExpressionError> {
        let mut part_exprs: Vec<TestExpression> = Vec::with_capacity(2);
        let mut part_edges: Vec<BTreeSet<(String, String)>> = Vec::with_capacity(2);
        for part in [1u8, 2] {
            let edges = self.part_edge_set(part);
            let graph = self.graph_of(&edges);
            if !is_chordal(&graph).is_chordal() {
                return Ok(None);
            }
            let terms: Vec<CondTerm> = self
                .term_edges
                .iter()
                .enumerate()
                .filter(|(k, _)| self.term_assign[*k] == part)
                .flat_map(|(_, e)| self.groups[e].iter().cloned())
                .collect();
            if !self.part_valid(&edges, &terms)? {
                return Ok(None);
            }
            part_exprs.push(self.part_expression(&edges, &terms, part)?);
            part_edges.push(edges);
        }
        let e2 = part_exprs.pop().unwrap();
        let e1 = part_exprs.pop().unwrap();
        let d2 = part_edges.pop().unwrap();
        let d1 = part_edges.pop().unwrap();
        Ok(Some(ChordalDecomposition {
            part_edges: [d1, d2],
            part_expressions: [e1, e2],
        }))
    }

    fn graph_of(&self, edges: &BTreeSet<(String, String)>) -> Graph {
        let mut vertices: Vec<String> = Vec::new();
        for (u, v) in edges {
            if !vertices.contains(u) {
                vertices.push(u.clone());
            }
            if !vertices.contains(v) {
                vertices.push(v.clone());
            }
        }
        vertices.sort();
        let pairs: Vec<(&str, &str)> = edges
            .iter()
            .map(|(u, v)| (u.as_str(), v.as_str()))
            .collect();
        Graph::from_edges(vertices, &pairs).expect("edge labels are scenario labels")
    }

    /// Validity of the regrouped expression over the part's Shannon cone,
    /// checked per connected component of the part graph and memoized on a
    /// canonical component key. A fast sound reject runs first: evaluating
    /// the expression on set-partition entropy vectors (groups of perfectly
    /// correlated fair bits, independent across groups) catches most
    /// invalid regroupings without an LP.
    fn part_valid(
        &mut self,
        edges: &BTreeSet<(String, String)>,
        terms: &[CondTerm],
    ) -> Result<bool, ExpressionError> {
        if terms.is_empty() {
            return Ok(true);
        }
        let graph = self.graph_of(edges);
        for component in graph.components() {
            let comp_labels: BTreeSet<String> = component
                .iter()
                .map(|&v| graph.label(v).to_string())
                .collect();
            let comp_edges: BTreeSet<(String, String)> = edges
                .iter()
                .filter(|(u, _)| comp_labels.contains(u))
                .cloned()
                .collect();
            let comp_terms: Vec<CondTerm> = terms
                .iter()
                .filter(|t| comp_labels.contains(&t.target))
                .cloned()
                .collect();
            if comp_terms.is_empty() {
                continue;
            }
            // Sum of nonpositive conditional-entropy terms: always valid.
            if comp_terms.iter().all(|t| t.coeff <= 0) {
                continue;
            }
            let key = format!("{comp_edges:?}|{comp_terms:?}");
            if let Some(&ok) = self.validity_cache.get(&key) {
                if !ok {
                    return Ok(false);
                }
                continue;
            }
            if partition_battery_rejects(&comp_labels, &comp_terms) {
                self.validity_cache.insert(key, false);
                return Ok(false);
            }
            if self.checks >= self.budget.max_checks {
                self.truncated = true;
                return Ok(false);
            }
            self.checks += 1;
            let scenario = component_scenario(&comp_labels, &comp_edges)?;
            let expr = TestExpression::from_terms(
                "part",
                scenario.clone(),
                comp_terms,
                BoundClass::NonContextual,
            )?;
            let ok = verify_nchv_bound(&expr, &scenario)?.is_valid();
            self.validity_cache.insert(key, ok);
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn part_expression(
        &self,
        edges: &BTreeSet<(String, String)>,
        terms: &[CondTerm],
        part: u8,
    ) -> Result<TestExpression, ExpressionError> {
        let labels: BTreeSet<String> = edges
            .iter()
            .flat_map(|(u, v)| [u.clone(), v.clone()])
            .collect();
        let scenario = component_scenario(&labels, edges)?;
        TestExpression::from_terms(
            format!("part{part}"),
            scenario,
            terms.to_vec(),
            BoundClass::NonContextual,
        )
    }
}

/// Evaluate the expression on every set-partition entropy vector of the
/// component's labels: one fair bit per group, equal within a group,
/// independent across groups, so H(X|Y) is 1 when X and Y sit in different
/// groups and 0 otherwise. Every such vector is entropic; a positive value
/// proves the bound invalid. Components here have at most a handful of
/// vertices, so enumerating all partitions is cheap.
fn partition_battery_rejects(labels: &BTreeSet<String>, terms: &[CondTerm]) -> bool {
    let labels: Vec<&String> = labels.iter().collect();
    let n = labels.len();
    let pos: HashMap<&String, usize> = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
    // Restricted-growth strings enumerate set partitions.
    let mut rgs = vec![0usize; n];
    loop {
        let value: i64 = terms
            .iter()
            .map(|t| {
                let split = rgs[pos[&t.target]] != rgs[pos[&t.given]];
                if split {
                    t.coeff
                } else {
                    0
                }
            })
            .sum();
        if value > 0 {
            return true;
        }
        if !next_rgs(&mut rgs) {
            return false;
        }
    }
}

/// Advance a restricted-growth string in place; false when exhausted.
fn next_rgs(rgs: &mut [usize]) -> bool {
    let n = rgs.len();
    for k in (1..n).rev() {
        let prefix_max = rgs[..k].iter().copied().max().unwrap_or(0);
        if rgs[k] <= prefix_max {
            rgs[k] += 1;
            for v in rgs[k + 1..].iter_mut() {
                *v = 0;
            }
            return true;
        }
    }
    false
}

/// Scenario for a part (or part component): its vertices, its edges, and
/// the maximal cliques of its graph as contexts, so triple-and-larger joint
/// entropies of pairwise compatible measurements are observable.
fn component_scenario(
    labels: &BTreeSet<String>,
    edges: &BTreeSet<(String, String)>,
) -> Result<Scenario, ExpressionError> {
    let label_vec: Vec<String> = labels.iter().cloned().collect();
    let graph = Graph::from_edges(
        label_vec.clone(),
        &edges
            .iter()
            .map(|(u, v)| (u.as_str(), v.as_str()))
            .collect::<Vec<_>>(),
    )
    .expect("labels cover the edges");
    let contexts: Vec<Vec<String>> = maximal_cliques(&graph)
        .into_iter()
        .map(|c| c.into_iter().map(|v| graph.label(v).to_string()).collect())
        .collect();
    let edge_pairs: Vec<(String, String)> = edges.iter().cloned().collect();
    Ok(Scenario::new(label_vec, &edge_pairs, Some(contexts))?)
}
