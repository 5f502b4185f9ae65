//! Joint-entropy extensions along junction trees of chordal compatibility
//! graphs.
//!
//! Two constructions are provided. The normative one glues the observed
//! context distributions into a global Markov distribution along the
//! junction tree and reads off its entropy vector: the result is entropic
//! by construction, so it satisfies every Shannon inequality and restricts
//! exactly to the observed data. The second one works at the entropy level
//! only (no distributions needed): the inclusion-exclusion value over the
//! subtree spanned by the cliques a subset meets. The two agree on every
//! within-clique subset and on the top set; on subsets straddling cliques
//! the entropy-level formula ignores cross-clique correlation and can
//! overshoot, which `lemma_formula_disagrees_on_straddling_subsets`
//! documents. `paper_lemma_value` computes the cruder piece-sum variant of
//! the top-set formula for cross-checking.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{is_chordal, junction_tree, maximal_cliques, Graph, JunctionTree};
use crate::dist::{DistError, JointDistribution};
use crate::polyhedra::{membership, nd_cone, MEMBERSHIP_EPS};
use crate::scenario::{EntropyVector, Scenario, ScenarioError};
use crate::subsets::Subset;

#[derive(Debug, Error)]
pub enum ExtensionError {
    #[error("compatibility graph is not chordal")]
    NotChordal,
    #[error("observed vector violates a context's Shannon inequality (outside the no-disturbance cone)")]
    ObservedOutsideNd,
    #[error("no context covers maximal clique {0:?}")]
    UnobservedClique(Vec<String>),
    #[error("no distribution supplied for maximal clique {0:?}")]
    MissingCliqueDistribution(Vec<String>),
    #[error("distributions disagree on separator {0:?}")]
    InconsistentMarginals(Vec<String>),
    #[error("variable `{0}` has conflicting outcome counts across cliques")]
    CardinalityMismatch(String),
    #[error("scenario error: {0}")]
    Scenario(#[from] ScenarioError),
    #[error("distribution error: {0}")]
    Dist(#[from] DistError),
    #[error("index mismatch: {0}")]
    Polyhedra(#[from] crate::polyhedra::PolyhedraError),
}

const MARGINAL_TOL: f64 = 1e-10;

/// Glue consistent clique distributions into the Markov junction-tree
/// distribution and return it with its full entropy vector. This is the
/// explicit witness behind the statement that no-disturbance data on a
/// chordal scenario always extends.
pub fn chordal_extension(
    scenario: &Scenario,
    clique_dists: &[JointDistribution],
) -> Result<(JointDistribution, EntropyVector), ExtensionError> {
    let graph = scenario.compatibility_graph();
    if !is_chordal(&graph).is_chordal() {
        return Err(ExtensionError::NotChordal);
    }
    let tree = junction_tree(&graph).map_err(|_| ExtensionError::NotChordal)?;

    // Match one distribution to each maximal clique by label set.
    let mut matched: Vec<&JointDistribution> = Vec::with_capacity(tree.cliques.len());
    for clique in &tree.cliques {
        let labels: BTreeSet<String> = clique
            .iter()
            .map(|&v| graph.label(v).to_string())
            .collect();
        let found = clique_dists.iter().find(|d| {
            let ls: BTreeSet<String> = d.labels().iter().cloned().collect();
            ls == labels
        });
        match found {
            Some(d) => matched.push(d),
            None => {
                return Err(ExtensionError::MissingCliqueDistribution(
                    labels.into_iter().collect(),
                ))
            }
        }
    }

    // Outcome cardinalities must agree wherever a variable is shared.
    let mut cards: BTreeMap<String, usize> = BTreeMap::new();
    for d in &matched {
        for (l, c) in d.labels().iter().zip(d.cards()) {
            if let Some(prev) = cards.insert(l.clone(), *c) {
                if prev != *c {
                    return Err(ExtensionError::CardinalityMismatch(l.clone()));
                }
            }
        }
    }

    // Separator consistency across every tree edge.
    for (a, b, sep) in &tree.edges {
        if sep.is_empty() {
            continue;
        }
        let sep_labels: Vec<String> = sep.iter().map(|&v| graph.label(v).to_string()).collect();
        let ma = matched[*a].marginal_by_labels(&sep_labels)?;
        let mb = matched[*b].marginal_by_labels(&sep_labels)?;
        let diff = ma
            .probs()
            .iter()
            .zip(mb.probs())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max);
        if diff > MARGINAL_TOL {
            return Err(ExtensionError::InconsistentMarginals(sep_labels));
        }
    }

    // Glue sequentially: root each component, then attach each clique's new
    // variables conditioned on its separator.
    let k = tree.cliques.len();
    let mut adj: Vec<Vec<(usize, &BTreeSet<usize>)>> = vec![Vec::new(); k];
    for (a, b, sep) in &tree.edges {
        adj[*a].push((*b, sep));
        adj[*b].push((*a, sep));
    }
    let mut visited = vec![false; k];
    let mut glued: Option<JointDistribution> = None;
    for root in 0..k {
        if visited[root] {
            continue;
        }
        let mut component = matched[root].clone();
        visited[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(c) = queue.pop_front() {
            for &(next, sep) in &adj[c] {
                if visited[next] {
                    continue;
                }
                visited[next] = true;
                let sep_labels: Vec<String> =
                    sep.iter().map(|&v| graph.label(v).to_string()).collect();
                component = attach_conditioned(&component, matched[next], &sep_labels)?;
                queue.push_back(next);
            }
        }
        glued = Some(match glued {
            None => component,
            Some(acc) => acc.product(&component)?,
        });
    }
    let glued = glued.expect("scenario has at least one measurement");

    // Reorder variables into scenario label order for a stable vector.
    let ordered = glued.marginal_by_labels(&scenario.labels().to_vec())?;
    let vector = ordered.full_entropy_vector();
    Ok((ordered, vector))
}

/// Extend `base` by the variables of `clique` outside `sep_labels`,
/// conditioning on the separator: p(base, new) = p(base) p(new | sep).
fn attach_conditioned(
    base: &JointDistribution,
    clique: &JointDistribution,
    sep_labels: &[String],
) -> Result<JointDistribution, ExtensionError> {
    let new_labels: Vec<String> = clique
        .labels()
        .iter()
        .filter(|l| !sep_labels.contains(l))
        .cloned()
        .collect();
    if new_labels.is_empty() {
        return Ok(base.clone());
    }
    // Order the clique as (sep..., new...) for conditional lookup.
    let mut ordered_labels = sep_labels.to_vec();
    ordered_labels.extend(new_labels.iter().cloned());
    let clique_ord = clique.marginal_by_labels(&ordered_labels)?;
    let sep_marg = if sep_labels.is_empty() {
        None
    } else {
        Some(clique.marginal_by_labels(&sep_labels.to_vec())?)
    };

    let labels: Vec<String> = base
        .labels()
        .iter()
        .cloned()
        .chain(new_labels.iter().cloned())
        .collect();
    let cards: Vec<usize> = base
        .cards()
        .iter()
        .copied()
        .chain(
            new_labels
                .iter()
                .map(|l| {
                    let p = clique.labels().iter().position(|x| x == l).unwrap();
                    clique.cards()[p]
                }),
        )
        .collect();
    let sep_positions_in_base: Vec<usize> = sep_labels
        .iter()
        .map(|l| {
            base.labels()
                .iter()
                .position(|x| x == l)
                .expect("separator lies in the already-glued part")
        })
        .collect();

    let total: usize = cards.iter().product();
    let mut probs = vec![0.0; total];
    let new_cards: Vec<usize> = cards[base.cards().len()..].to_vec();
    let new_total: usize = new_cards.iter().product();
    for (batom, bp) in base.probs().iter().enumerate() {
        if *bp == 0.0 {
            continue;
        }
        let boutcome = base.unrank(batom);
        let sep_outcome: Vec<usize> = sep_positions_in_base
            .iter()
            .map(|&p| boutcome[p])
            .collect();
        let psep = match &sep_marg {
            None => 1.0,
            Some(m) => m.probs()[m.rank(&sep_outcome)],
        };
        for new_atom in 0..new_total {
            // Unrank the new-variable block.
            let mut rest = new_atom;
            let mut new_outcome = vec![0usize; new_cards.len()];
            for i in (0..new_cards.len()).rev() {
                new_outcome[i] = rest % new_cards[i];
                rest /= new_cards[i];
            }
            let mut clique_outcome = sep_outcome.clone();
            clique_outcome.extend(new_outcome.iter().copied());
            let pclique = clique_ord.probs()[clique_ord.rank(&clique_outcome)];
            let conditional = if psep > 0.0 { pclique / psep } else { 0.0 };
            if conditional == 0.0 {
                continue;
            }
            let idx = batom * new_total + new_atom;
            probs[idx] = bp * conditional;
        }
    }
    // Row-major layout above works because the new variables are appended
    // as the fastest-varying block.
    Ok(JointDistribution::new(labels, cards, probs)?)
}

/// Entropy-level extension by inclusion-exclusion over the subtree spanned
/// by the cliques each subset meets. Requires the observed vector to lie in
/// the no-disturbance cone and every maximal clique to be covered by a
/// context.
pub fn subtree_extension(
    observed: &EntropyVector,
    scenario: &Scenario,
) -> Result<EntropyVector, ExtensionError> {
    let graph = scenario.compatibility_graph();
    if !is_chordal(&graph).is_chordal() {
        return Err(ExtensionError::NotChordal);
    }
    let tree = junction_tree(&graph).map_err(|_| ExtensionError::NotChordal)?;
    let obs_index = scenario.observed_index();
    if observed.index() != &obs_index {
        return Err(ExtensionError::Scenario(ScenarioError::IndexMismatch(
            "observed vector is not over the scenario's observed index".into(),
        )));
    }
    for clique in &tree.cliques {
        let s = Subset::from_indices(clique.iter().copied());
        if obs_index.position(s).is_none() {
            return Err(ExtensionError::UnobservedClique(
                clique.iter().map(|&v| graph.label(v).to_string()).collect(),
            ));
        }
    }
    let nd = nd_cone(scenario);
    if !membership(observed, &nd, MEMBERSHIP_EPS)?.is_inside() {
        return Err(ExtensionError::ObservedOutsideNd);
    }

    let full = scenario.full_index();
    let h_obs = |s: Subset| -> f64 {
        if s.is_empty() {
            0.0
        } else {
            observed.value(s).expect("subset of a clique is observed")
        }
    };
    let mut values = Vec::with_capacity(full.len());
    for &s in full.subsets() {
        let (cliques, edges) = steiner_subtree(&tree, s);
        let mut h = 0.0;
        for ci in &cliques {
            let cs = Subset::from_indices(tree.cliques[*ci].iter().copied());
            h += h_obs(s.intersection(cs));
        }
        for &(_, _, ref sep) in edges.iter() {
            let ss = Subset::from_indices(sep.iter().copied());
            h -= h_obs(s.intersection(ss));
        }
        values.push(h.max(0.0));
    }
    Ok(EntropyVector::new(full, values)?)
}

/// Cliques and tree edges of the minimal subforest connecting all cliques
/// that intersect `s` (per component of the junction forest).
fn steiner_subtree(
    tree: &JunctionTree,
    s: Subset,
) -> (BTreeSet<usize>, Vec<(usize, usize, BTreeSet<usize>)>) {
    let k = tree.cliques.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (e, (a, b, _)) in tree.edges.iter().enumerate() {
        adj[*a].push(e);
        adj[*b].push(e);
    }
    let touched: Vec<usize> = (0..k)
        .filter(|&c| {
            let cs = Subset::from_indices(tree.cliques[c].iter().copied());
            !cs.intersection(s).is_empty()
        })
        .collect();
    let mut keep_cliques: BTreeSet<usize> = touched.iter().copied().collect();
    let mut keep_edges: BTreeSet<usize> = BTreeSet::new();
    // Union of tree paths between touched cliques: BFS from each touched
    // clique, record the path to the nearest already-kept clique.
    for &start in &touched {
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; k]; // (clique, edge)
        let mut seen = vec![false; k];
        let mut queue = std::collections::VecDeque::from([start]);
        seen[start] = true;
        let mut hit: Option<usize> = None;
        'bfs: while let Some(c) = queue.pop_front() {
            if c != start && keep_cliques.contains(&c) {
                hit = Some(c);
                break 'bfs;
            }
            for &e in &adj[c] {
                let (a, b, _) = tree.edges[e];
                let next = if a == c { b } else { a };
                if !seen[next] {
                    seen[next] = true;
                    prev[next] = Some((c, e));
                    queue.push_back(next);
                }
            }
        }
        if let Some(mut c) = hit {
            while let Some((p, e)) = prev[c] {
                keep_edges.insert(e);
                keep_cliques.insert(c);
                c = p;
                if c == start {
                    break;
                }
            }
        }
    }
    let edges: Vec<(usize, usize, BTreeSet<usize>)> = keep_edges
        .into_iter()
        .map(|e| tree.edges[e].clone())
        .collect();
    (keep_cliques, edges)
}

/// The literal piece-sum value for the top-set entropy: sum the entropies of
/// the pieces (maximal cliques with three or more vertices, leftover edges,
/// leftover vertices) and subtract the entropy of every unordered pairwise
/// piece intersection. Provided for cross-checking against the junction-tree
/// top-set value, from which it differs whenever three or more pieces share
/// a separator.
pub fn paper_lemma_value(
    observed: &EntropyVector,
    graph: &Graph,
) -> Result<f64, ExtensionError> {
    let cliques = maximal_cliques(graph);
    let mut pieces: Vec<BTreeSet<usize>> = cliques
        .iter()
        .filter(|c| c.len() >= 3)
        .cloned()
        .collect();
    let in_big = |u: usize, v: usize| {
        pieces
            .iter()
            .any(|p| p.contains(&u) && p.contains(&v))
    };
    let mut edge_pieces: Vec<BTreeSet<usize>> = Vec::new();
    for (u, v) in graph.edges() {
        if !in_big(u, v) {
            edge_pieces.push(BTreeSet::from([u, v]));
        }
    }
    pieces.extend(edge_pieces);
    let covered: BTreeSet<usize> = pieces.iter().flatten().copied().collect();
    for v in 0..graph.len() {
        if !covered.contains(&v) {
            pieces.push(BTreeSet::from([v]));
        }
    }

    let value_of = |set: &BTreeSet<usize>| -> Result<f64, ExtensionError> {
        if set.is_empty() {
            return Ok(0.0);
        }
        let labels: BTreeSet<String> = set.iter().map(|&v| graph.label(v).to_string()).collect();
        observed.value_by_labels(&labels).ok_or_else(|| {
            ExtensionError::UnobservedClique(labels.into_iter().collect())
        })
    };

    let mut total = 0.0;
    for p in &pieces {
        total += value_of(p)?;
    }
    for i in 0..pieces.len() {
        for j in i + 1..pieces.len() {
            let inter: BTreeSet<usize> = pieces[i].intersection(&pieces[j]).copied().collect();
            total -= value_of(&inter)?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedra::{membership, shannon_cone_for, MEMBERSHIP_EPS};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn path_scenario() -> Scenario {
        Scenario::new(
            strings(&["A", "B", "C"]),
            &[("A".into(), "B".into()), ("B".into(), "C".into())],
            None,
        )
        .unwrap()
    }

    /// Random pair of consistent clique distributions on the path A-B-C,
    /// built as marginals of one global distribution.
    fn random_path_dists(rng: &mut ChaCha8Rng) -> Vec<JointDistribution> {
        let global = JointDistribution::random(strings(&["A", "B", "C"]), vec![2, 2, 2], rng);
        vec![
            global.marginal_by_labels(&strings(&["A", "B"])).unwrap(),
            global.marginal_by_labels(&strings(&["B", "C"])).unwrap(),
        ]
    }

    #[test]
    fn path_extension_matches_chain_formula_on_top_set() {
        let s = path_scenario();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let dists = random_path_dists(&mut rng);
            let (glued, v) = chordal_extension(&s, &dists).unwrap();
            let h_ab = dists[0].entropy_bits();
            let h_bc = dists[1].entropy_bits();
            let h_b = dists[0]
                .marginal_by_labels(&strings(&["B"]))
                .unwrap()
                .entropy_bits();
            let top = v
                .value(Subset::from_indices([0, 1, 2]))
                .unwrap();
            assert!((top - (h_ab + h_bc - h_b)).abs() < 1e-9);
            // The glued joint restricts to the inputs.
            let back_ab = glued.marginal_by_labels(&strings(&["A", "B"])).unwrap();
            for (x, y) in back_ab.probs().iter().zip(dists[0].probs()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn extension_is_shannon_valid_and_projects() {
        let s = path_scenario();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cone = shannon_cone_for(s.labels().to_vec());
        for _ in 0..20 {
            let dists = random_path_dists(&mut rng);
            let (_, v) = chordal_extension(&s, &dists).unwrap();
            assert!(membership(&v, &cone, MEMBERSHIP_EPS).unwrap().is_inside());
            let projected = v.project(&s).unwrap();
            // Observed coordinates must equal the clique-marginal entropies.
            for (pos, sub) in projected.index().subsets().iter().enumerate() {
                let labels: BTreeSet<String> = sub
                    .iter()
                    .map(|i| s.labels()[i].clone())
                    .collect();
                let direct = if labels.iter().all(|l| dists[0].labels().contains(l)) {
                    dists[0]
                        .marginal_by_labels(&labels.iter().cloned().collect::<Vec<_>>())
                        .unwrap()
                        .entropy_bits()
                } else {
                    dists[1]
                        .marginal_by_labels(&labels.iter().cloned().collect::<Vec<_>>())
                        .unwrap()
                        .entropy_bits()
                };
                assert!((projected.values()[pos] - direct).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn product_observed_data_extends_to_sum_of_singletons() {
        // All mutual informations zero: H(top) = sum of singleton entropies.
        let s = path_scenario();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = JointDistribution::random(strings(&["A"]), vec![2], &mut rng);
        let b = JointDistribution::random(strings(&["B"]), vec![2], &mut rng);
        let c = JointDistribution::random(strings(&["C"]), vec![2], &mut rng);
        let ab = a.product(&b).unwrap();
        let bc = b.product(&c).unwrap();
        let (_, v) = chordal_extension(&s, &[ab, bc]).unwrap();
        let top = v.value(Subset::from_indices([0, 1, 2])).unwrap();
        let expect = a.entropy_bits() + b.entropy_bits() + c.entropy_bits();
        assert!((top - expect).abs() < 1e-9);
    }

    #[test]
    fn inconsistent_marginals_are_rejected() {
        let s = path_scenario();
        let ab = JointDistribution::new(
            strings(&["A", "B"]),
            vec![2, 2],
            vec![0.5, 0.0, 0.0, 0.5],
        )
        .unwrap();
        // B is uniform in ab but biased in bc.
        let bc = JointDistribution::new(
            strings(&["B", "C"]),
            vec![2, 2],
            vec![0.7, 0.0, 0.0, 0.3],
        )
        .unwrap();
        assert!(matches!(
            chordal_extension(&s, &[ab, bc]),
            Err(ExtensionError::InconsistentMarginals(_))
        ));
    }

    #[test]
    fn non_chordal_scenario_is_rejected() {
        let s = Scenario::n_cycle(4).unwrap();
        assert!(matches!(
            chordal_extension(&s, &[]),
            Err(ExtensionError::NotChordal)
        ));
        let obs = EntropyVector::zeros(s.observed_index());
        assert!(matches!(
            subtree_extension(&obs, &s),
            Err(ExtensionError::NotChordal)
        ));
    }

    #[test]
    fn subtree_extension_on_path_gives_chain_value() {
        let s = path_scenario();
        // H(AB) = H(BC) = 1, H(B) = 1 (perfectly correlated bits).
        let idx = s.observed_index();
        let obs = EntropyVector::new(idx, vec![1.0; 5]).unwrap();
        let full = subtree_extension(&obs, &s).unwrap();
        let top = full.value(Subset::from_indices([0, 1, 2])).unwrap();
        assert!((top - 1.0).abs() < 1e-12);
    }

    #[test]
    fn subtree_extension_rejects_nd_violations() {
        let s = path_scenario();
        let idx = s.observed_index();
        // H(AB) > H(A) + H(B) violates the context Shannon cone.
        let mut vals = vec![1.0; 5];
        // Order: A, B, C, AB, BC.
        vals[3] = 2.5;
        let obs = EntropyVector::new(idx, vals).unwrap();
        assert!(matches!(
            subtree_extension(&obs, &s),
            Err(ExtensionError::ObservedOutsideNd)
        ));
    }

    #[test]
    fn lemma_formula_disagrees_on_straddling_subsets() {
        // Maximally correlated bits A = B = C on the path: the Markov
        // extension has H(AC) = 1, while the inclusion-exclusion value is
        // H(A) + H(C) = 2, which breaks top-set monotonicity. The
        // entropy-level formula is exact only within cliques and on the top
        // set; the distribution-level construction is the normative one.
        let s = path_scenario();
        let ab = JointDistribution::new(
            strings(&["A", "B"]),
            vec![2, 2],
            vec![0.5, 0.0, 0.0, 0.5],
        )
        .unwrap();
        let bc = JointDistribution::new(
            strings(&["B", "C"]),
            vec![2, 2],
            vec![0.5, 0.0, 0.0, 0.5],
        )
        .unwrap();
        let (_, markov) = chordal_extension(&s, &[ab, bc]).unwrap();
        let obs = markov.project(&s).unwrap();
        let subtree = subtree_extension(&obs, &s).unwrap();
        let ac = Subset::from_indices([0, 2]);
        let top = Subset::from_indices([0, 1, 2]);
        assert!((markov.value(ac).unwrap() - 1.0).abs() < 1e-9);
        assert!((subtree.value(ac).unwrap() - 2.0).abs() < 1e-9);
        // Agreement where the formula is exact: singletons, pairs-in-clique,
        // top set.
        assert!((subtree.value(top).unwrap() - markov.value(top).unwrap()).abs() < 1e-9);
        for labels in [[0usize, 1], [1, 2]] {
            let sub = Subset::from_indices(labels);
            assert!((subtree.value(sub).unwrap() - markov.value(sub).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn paper_lemma_value_on_path_matches_junction_tree() {
        let s = path_scenario();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let dists = random_path_dists(&mut rng);
        let (_, v) = chordal_extension(&s, &dists).unwrap();
        let obs = v.project(&s).unwrap();
        let top = v.value(Subset::from_indices([0, 1, 2])).unwrap();
        let lemma = paper_lemma_value(&obs, &s.compatibility_graph()).unwrap();
        assert!((lemma - top).abs() < 1e-9);
    }

    #[test]
    fn paper_lemma_value_disconnected_pair() {
        let s = Scenario::new(
            strings(&["A", "B"]),
            &[],
            Some(vec![vec!["A".into()], vec!["B".into()]]),
        )
        .unwrap();
        let obs = EntropyVector::new(s.observed_index(), vec![0.7, 0.4]).unwrap();
        let lemma = paper_lemma_value(&obs, &s.compatibility_graph()).unwrap();
        assert!((lemma - 1.1).abs() < 1e-12);
    }

    #[test]
    fn paper_lemma_value_overcounts_shared_vertex() {
        // Three triangles sharing one vertex: the junction-tree top set is
        // sum of triangle entropies minus twice the shared vertex entropy;
        // the pairwise-intersection formula subtracts it three times.
        let labels = strings(&["Z", "P1", "Q1", "P2", "Q2", "P3", "Q3"]);
        let mut edges: Vec<(String, String)> = Vec::new();
        for t in 1..=3 {
            let p = format!("P{t}");
            let q = format!("Q{t}");
            edges.push(("Z".into(), p.clone()));
            edges.push(("Z".into(), q.clone()));
            edges.push((p, q));
        }
        let s = Scenario::new(labels.clone(), &edges, None).unwrap();
        let graph = s.compatibility_graph();
        assert!(is_chordal(&graph).is_chordal());

        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let z = JointDistribution::random(strings(&["Z"]), vec![2], &mut rng);
        let mut dists = Vec::new();
        for t in 1..=3 {
            // Give each triangle a distribution consistent with z on Z.
            let pq = JointDistribution::random(
                strings(&[&format!("P{t}"), &format!("Q{t}")]),
                vec![2, 2],
                &mut rng,
            );
            dists.push(z.product(&pq).unwrap());
        }
        let (_, full) = chordal_extension(&s, &dists).unwrap();
        let obs = full.project(&s).unwrap();
        let top_index = Subset::from_indices(0..7);
        let jt_top = full.value(top_index).unwrap();
        let lemma = paper_lemma_value(&obs, &graph).unwrap();
        let hz = z.entropy_bits();
        assert!(
            (lemma - (jt_top - hz)).abs() < 1e-9,
            "piece formula should subtract one extra H(Z): lemma={lemma}, jt={jt_top}, hz={hz}"
        );
    }
}
