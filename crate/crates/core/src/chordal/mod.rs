//! Chordal-graph machinery: chordality testing with certificates, maximal
//! cliques, junction trees, entropy extensions along clique trees, the
//! two-part chordal decomposition search behind monogamy criteria, and
//! party-graph edge packing.

mod decompose;
mod extension;

pub use decompose::{
    find_chordal_2_decomposition, ChordalDecomposition, DecomposeBudget, DecompositionOutcome,
};
pub use extension::{chordal_extension, paper_lemma_value, subtree_extension, ExtensionError};

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("unknown vertex label `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex label `{0}`")]
    DuplicateVertex(String),
    #[error("self-loop on vertex `{0}`")]
    SelfLoop(String),
    #[error("graph is not chordal")]
    NotChordal,
    #[error("malformed graph line `{0}` (expected `u -- v`)")]
    MalformedLine(String),
}

/// Simple undirected graph over string-labelled vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    labels: Vec<String>,
    position: HashMap<String, usize>,
    adjacency: Vec<BTreeSet<usize>>,
}

impl Graph {
    pub fn new(labels: Vec<String>) -> Result<Graph, GraphError> {
        let mut position = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if position.insert(l.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(l.clone()));
            }
        }
        let adjacency = vec![BTreeSet::new(); labels.len()];
        Ok(Graph {
            labels,
            position,
            adjacency,
        })
    }

    pub fn from_edges<S: AsRef<str>>(
        labels: Vec<String>,
        edges: &[(S, S)],
    ) -> Result<Graph, GraphError> {
        let mut g = Graph::new(labels)?;
        for (u, v) in edges {
            g.add_edge_by_label(u.as_ref(), v.as_ref())?;
        }
        Ok(g)
    }

    /// Parse the plain-text form: one `u -- v` line per edge. Blank lines and
    /// `#` comments are skipped; vertices are declared by appearance.
    pub fn parse_text(text: &str) -> Result<Graph, GraphError> {
        let mut labels: Vec<String> = Vec::new();
        let mut edges: Vec<(String, String)> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split("--").map(|p| p.trim()).collect();
            if parts.len() != 2 || parts[0].is_empty() || parts[1].is_empty() {
                return Err(GraphError::MalformedLine(line.to_string()));
            }
            for p in &parts {
                if !labels.iter().any(|l| l == p) {
                    labels.push(p.to_string());
                }
            }
            edges.push((parts[0].to_string(), parts[1].to_string()));
        }
        let edge_refs: Vec<(&str, &str)> =
            edges.iter().map(|(u, v)| (u.as_str(), v.as_str())).collect();
        Graph::from_edges(labels, &edge_refs)
    }

    pub fn add_edge_by_label(&mut self, u: &str, v: &str) -> Result<(), GraphError> {
        let ui = *self
            .position
            .get(u)
            .ok_or_else(|| GraphError::UnknownVertex(u.to_string()))?;
        let vi = *self
            .position
            .get(v)
            .ok_or_else(|| GraphError::UnknownVertex(v.to_string()))?;
        if ui == vi {
            return Err(GraphError::SelfLoop(u.to_string()));
        }
        self.adjacency[ui].insert(vi);
        self.adjacency[vi].insert(ui);
        Ok(())
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.len() && v < self.len());
        self.adjacency[u].insert(v);
        self.adjacency[v].insert(u);
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn vertex(&self, label: &str) -> Option<usize> {
        self.position.get(label).copied()
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].contains(&v)
    }

    /// Edges as ordered pairs (u < v), ascending.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.len() {
            for &v in &self.adjacency[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    /// The subgraph induced by keeping only the given edges (vertex set
    /// unchanged).
    pub fn with_edges(&self, edges: &BTreeSet<(usize, usize)>) -> Graph {
        let mut g = Graph::new(self.labels.clone()).expect("labels already validated");
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn is_clique(&self, vertices: &BTreeSet<usize>) -> bool {
        let vs: Vec<usize> = vertices.iter().copied().collect();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                if !self.has_edge(vs[i], vs[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// Connected components over vertices that have at least one incident
    /// edge, plus isolated vertices as singleton components.
    pub fn components(&self) -> Vec<BTreeSet<usize>> {
        let mut seen = vec![false; self.len()];
        let mut comps = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(v) = queue.pop_front() {
                comp.insert(v);
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }
}

/// Outcome of a chordality test: a perfect elimination ordering, or an
/// induced (chordless) cycle of length at least four as counterexample.
#[derive(Clone, Debug, PartialEq)]
pub enum Chordality {
    Chordal { elimination_order: Vec<usize> },
    NotChordal { induced_cycle: Vec<usize> },
}

impl Chordality {
    pub fn is_chordal(&self) -> bool {
        matches!(self, Chordality::Chordal { .. })
    }
}

/// Lexicographic BFS: returns a vertex ordering whose reverse is a perfect
/// elimination ordering exactly when the graph is chordal.
fn lex_bfs(graph: &Graph) -> Vec<usize> {
    let n = graph.len();
    let mut order = Vec::with_capacity(n);
    let mut numbered = vec![false; n];
    // Lexicographic label of each vertex: visit positions of its numbered
    // neighbors, descending. Small graphs, so the quadratic scan is fine.
    let mut vlabel: Vec<Vec<usize>> = vec![Vec::new(); n];
    for step in 0..n {
        let mut best: Option<usize> = None;
        for v in 0..n {
            if numbered[v] {
                continue;
            }
            match best {
                None => best = Some(v),
                Some(b) => {
                    if vlabel[v] > vlabel[b] {
                        best = Some(v);
                    }
                }
            }
        }
        let v = best.expect("unnumbered vertex exists");
        numbered[v] = true;
        order.push(v);
        for &w in graph.neighbors(v) {
            if !numbered[w] {
                vlabel[w].push(n - step);
            }
        }
    }
    order
}

/// Decide chordality. On success the returned elimination order lists
/// vertices such that each vertex's neighbors among *later* vertices form a
/// clique. On failure an induced cycle of length >= 4 is produced by brute
/// force (inputs here are small scenario graphs).
pub fn is_chordal(graph: &Graph) -> Chordality {
    if graph.len() == 0 {
        return Chordality::Chordal {
            elimination_order: vec![],
        };
    }
    let order = lex_bfs(graph);
    let mut pos = vec![0usize; graph.len()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    // Reverse of the LexBFS order is the candidate elimination order.
    let elim: Vec<usize> = order.iter().rev().copied().collect();
    let mut epos = vec![0usize; graph.len()];
    for (i, &v) in elim.iter().enumerate() {
        epos[v] = i;
    }
    for &v in &elim {
        let later: Vec<usize> = graph
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| epos[w] > epos[v])
            .collect();
        if later.is_empty() {
            continue;
        }
        // The earliest later neighbor must see all the others.
        let first = *later.iter().min_by_key(|&&w| epos[w]).unwrap();
        for &w in &later {
            if w != first && !graph.has_edge(first, w) {
                let cycle = find_induced_cycle(graph)
                    .expect("failed elimination check implies a chordless cycle exists");
                return Chordality::NotChordal {
                    induced_cycle: cycle,
                };
            }
        }
    }
    Chordality::Chordal {
        elimination_order: elim,
    }
}

/// Brute-force search for a chordless cycle of length >= 4. Returns vertices
/// in cycle order. Only called on small graphs once non-chordality is known.
pub fn find_induced_cycle(graph: &Graph) -> Option<Vec<usize>> {
    // Grow simple paths that stay chordless; close them back to the start.
    fn extend(
        graph: &Graph,
        path: &mut Vec<usize>,
        in_path: &mut Vec<bool>,
    ) -> Option<Vec<usize>> {
        let last = *path.last().unwrap();
        let start = path[0];
        for &next in graph.neighbors(last) {
            if in_path[next] {
                continue;
            }
            // Chordless: `next` may only touch `last` among path vertices,
            // except possibly the start vertex, which closes a cycle.
            let mut touches_start = false;
            let mut chord = false;
            for &p in path.iter() {
                if p == last {
                    continue;
                }
                if graph.has_edge(next, p) {
                    if p == start {
                        touches_start = true;
                    } else {
                        chord = true;
                        break;
                    }
                }
            }
            if chord {
                continue;
            }
            if touches_start && path.len() >= 3 {
                let mut cycle = path.clone();
                cycle.push(next);
                return Some(cycle);
            }
            if !touches_start {
                path.push(next);
                in_path[next] = true;
                if let Some(c) = extend(graph, path, in_path) {
                    return Some(c);
                }
                in_path[next] = false;
                path.pop();
            }
        }
        None
    }

    let n = graph.len();
    for start in 0..n {
        let mut path = vec![start];
        let mut in_path = vec![false; n];
        in_path[start] = true;
        if let Some(c) = extend(graph, &mut path, &mut in_path) {
            return Some(c);
        }
    }
    None
}

/// All maximal cliques (Bron-Kerbosch with pivoting), deterministically
/// sorted by their vertex lists.
pub fn maximal_cliques(graph: &Graph) -> Vec<BTreeSet<usize>> {
    fn bron_kerbosch(
        graph: &Graph,
        r: &mut BTreeSet<usize>,
        mut p: BTreeSet<usize>,
        mut x: BTreeSet<usize>,
        out: &mut Vec<BTreeSet<usize>>,
    ) {
        if p.is_empty() && x.is_empty() {
            out.push(r.clone());
            return;
        }
        let pivot = p
            .iter()
            .chain(x.iter())
            .copied()
            .max_by_key(|&u| p.intersection(graph.neighbors(u)).count())
            .unwrap();
        let candidates: Vec<usize> = p
            .iter()
            .copied()
            .filter(|v| !graph.has_edge(pivot, *v))
            .collect();
        for v in candidates {
            let nv = graph.neighbors(v);
            r.insert(v);
            bron_kerbosch(
                graph,
                r,
                p.intersection(nv).copied().collect(),
                x.intersection(nv).copied().collect(),
                out,
            );
            r.remove(&v);
            p.remove(&v);
            x.insert(v);
        }
    }

    let mut out = Vec::new();
    let mut r = BTreeSet::new();
    bron_kerbosch(
        graph,
        &mut r,
        (0..graph.len()).collect(),
        BTreeSet::new(),
        &mut out,
    );
    out.sort_by(|a, b| {
        let av: Vec<usize> = a.iter().copied().collect();
        let bv: Vec<usize> = b.iter().copied().collect();
        av.cmp(&bv)
    });
    out
}

/// Clique tree of a chordal graph. `edges` are pairs of clique indices with
/// their separators (the clique intersections); the structure is a forest
/// with one tree per connected component of the underlying graph.
#[derive(Clone, Debug, PartialEq)]
pub struct JunctionTree {
    pub cliques: Vec<BTreeSet<usize>>,
    pub edges: Vec<(usize, usize, BTreeSet<usize>)>,
}

impl JunctionTree {
    /// Running intersection property, checked exhaustively: for any two
    /// cliques, their intersection is contained in every clique on the tree
    /// path between them.
    pub fn running_intersection_holds(&self) -> bool {
        let k = self.cliques.len();
        let mut adj = vec![Vec::new(); k];
        for (a, b, _) in &self.edges {
            adj[*a].push(*b);
            adj[*b].push(*a);
        }
        for i in 0..k {
            for j in i + 1..k {
                let inter: BTreeSet<usize> = self.cliques[i]
                    .intersection(&self.cliques[j])
                    .copied()
                    .collect();
                if inter.is_empty() {
                    continue;
                }
                // Path from i to j, if connected in the forest.
                let mut prev = vec![usize::MAX; k];
                let mut seen = vec![false; k];
                let mut queue = VecDeque::from([i]);
                seen[i] = true;
                while let Some(v) = queue.pop_front() {
                    for &w in &adj[v] {
                        if !seen[w] {
                            seen[w] = true;
                            prev[w] = v;
                            queue.push_back(w);
                        }
                    }
                }
                if !seen[j] {
                    // Nonempty intersection across components would be a bug.
                    return false;
                }
                let mut v = j;
                while v != i {
                    if v != j && !inter.is_subset(&self.cliques[v]) {
                        return false;
                    }
                    v = prev[v];
                }
            }
        }
        true
    }
}

/// Build a junction tree via maximum-weight spanning forest on the clique
/// graph, weights being separator sizes. Fails on non-chordal input.
pub fn junction_tree(graph: &Graph) -> Result<JunctionTree, GraphError> {
    if !is_chordal(graph).is_chordal() {
        return Err(GraphError::NotChordal);
    }
    let cliques = maximal_cliques(graph);
    let k = cliques.len();
    let mut candidates: Vec<(usize, usize, usize)> = Vec::new(); // (weight, a, b)
    for a in 0..k {
        for b in a + 1..k {
            let w = cliques[a].intersection(&cliques[b]).count();
            if w > 0 {
                candidates.push((w, a, b));
            }
        }
    }
    // Kruskal, deterministic: heavier separators first, then index order.
    candidates.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut Vec<usize>, v: usize) -> usize {
        if parent[v] != v {
            let root = find(parent, parent[v]);
            parent[v] = root;
        }
        parent[v]
    }
    let mut edges = Vec::new();
    for (_, a, b) in candidates {
        let ra = find(&mut parent, a);
        let rb = find(&mut parent, b);
        if ra != rb {
            parent[ra] = rb;
            let sep: BTreeSet<usize> = cliques[a].intersection(&cliques[b]).copied().collect();
            edges.push((a, b, sep));
        }
    }
    let tree = JunctionTree { cliques, edges };
    debug_assert!(tree.running_intersection_holds());
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn cycle_graph(n: usize) -> Graph {
        let names: Vec<String> = (1..=n).map(|i| format!("A{i}")).collect();
        let mut g = Graph::new(names).unwrap();
        for i in 0..n {
            g.add_edge(i, (i + 1) % n);
        }
        g
    }

    #[test]
    fn triangle_is_chordal() {
        let g = cycle_graph(3);
        assert!(is_chordal(&g).is_chordal());
    }

    #[test]
    fn four_cycle_is_not_chordal_with_witness() {
        let g = cycle_graph(4);
        match is_chordal(&g) {
            Chordality::NotChordal { induced_cycle } => {
                assert_eq!(induced_cycle.len(), 4);
                // Consecutive vertices adjacent, and the closing edge exists.
                for w in 0..4 {
                    assert!(g.has_edge(induced_cycle[w], induced_cycle[(w + 1) % 4]));
                }
            }
            Chordality::Chordal { .. } => panic!("4-cycle misclassified as chordal"),
        }
    }

    #[test]
    fn five_cycle_with_two_chords_is_chordal() {
        // Chords A1-A3 and A1-A4 triangulate the 5-cycle.
        let mut g = cycle_graph(5);
        g.add_edge(0, 2);
        g.add_edge(0, 3);
        assert!(is_chordal(&g).is_chordal());
        // Brute-force cross-check: no chordless cycle remains.
        assert_eq!(find_induced_cycle(&g), None);
    }

    #[test]
    fn elimination_order_is_perfect() {
        let mut g = cycle_graph(5);
        g.add_edge(0, 2);
        g.add_edge(0, 3);
        let Chordality::Chordal { elimination_order } = is_chordal(&g) else {
            panic!("expected chordal");
        };
        let mut epos = vec![0usize; g.len()];
        for (i, &v) in elimination_order.iter().enumerate() {
            epos[v] = i;
        }
        for &v in &elimination_order {
            let later: Vec<usize> = g
                .neighbors(v)
                .iter()
                .copied()
                .filter(|&w| epos[w] > epos[v])
                .collect();
            let set: BTreeSet<usize> = later.iter().copied().collect();
            assert!(g.is_clique(&set), "later neighborhood of {v} not a clique");
        }
    }

    #[test]
    fn maximal_cliques_of_triangle_and_cycle() {
        let g = cycle_graph(3);
        assert_eq!(maximal_cliques(&g), vec![BTreeSet::from([0, 1, 2])]);
        let g5 = cycle_graph(5);
        let cliques = maximal_cliques(&g5);
        assert_eq!(cliques.len(), 5);
        for c in &cliques {
            assert_eq!(c.len(), 2);
        }
    }

    #[test]
    fn maximal_cliques_of_k4() {
        let names = labels(&["a", "b", "c", "d"]);
        let mut g = Graph::new(names).unwrap();
        for u in 0..4 {
            for v in u + 1..4 {
                g.add_edge(u, v);
            }
        }
        assert_eq!(maximal_cliques(&g), vec![BTreeSet::from([0, 1, 2, 3])]);
    }

    #[test]
    fn junction_tree_of_shared_edge_triangles() {
        // Triangles ABC and BCD share edge {B, C}.
        let mut g = Graph::new(labels(&["A", "B", "C", "D"])).unwrap();
        for (u, v) in [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)] {
            g.add_edge(u, v);
        }
        let jt = junction_tree(&g).unwrap();
        assert_eq!(jt.cliques.len(), 2);
        assert_eq!(jt.edges.len(), 1);
        assert_eq!(jt.edges[0].2, BTreeSet::from([1, 2]));
        assert!(jt.running_intersection_holds());
    }

    #[test]
    fn junction_tree_of_path() {
        let mut g = Graph::new(labels(&["A", "B", "C"])).unwrap();
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        let jt = junction_tree(&g).unwrap();
        assert_eq!(
            jt.cliques,
            vec![BTreeSet::from([0, 1]), BTreeSet::from([1, 2])]
        );
        assert_eq!(jt.edges[0].2, BTreeSet::from([1]));
    }

    #[test]
    fn junction_tree_rejects_non_chordal() {
        let g = cycle_graph(4);
        assert_eq!(junction_tree(&g), Err(GraphError::NotChordal));
    }

    #[test]
    fn running_intersection_brute_force_on_four_clique_graph() {
        // Chordal graph with 4 maximal cliques: star of triangles plus a tail.
        let mut g = Graph::new(labels(&["a", "b", "c", "d", "e", "f"])).unwrap();
        for (u, v) in [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4), (4, 5)] {
            g.add_edge(u, v);
        }
        let jt = junction_tree(&g).unwrap();
        assert_eq!(jt.cliques.len(), 3);
        assert!(jt.running_intersection_holds());
    }

    #[test]
    fn parse_text_graphs() {
        let g = Graph::parse_text("a -- b\nb -- c\n# comment\n\n").unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.edge_count(), 2);
        assert!(Graph::parse_text("a --").is_err());
    }

    #[test]
    fn components_and_connectivity() {
        let mut g = Graph::new(labels(&["a", "b", "c", "d"])).unwrap();
        g.add_edge(0, 1);
        g.add_edge(2, 3);
        assert_eq!(g.components().len(), 2);
        assert!(!g.is_connected());
    }
}
