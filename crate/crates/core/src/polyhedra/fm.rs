//! Fourier-Motzkin elimination over exact integers, with redundancy removal
//! after every elimination step and an ancestor-count prune.
//!
//! The ancestor prune is the classical acceleration bound for FM: a row
//! derived as a nonnegative combination of more than `k + 1` original rows
//! after `k` eliminations is redundant, because every facet of a projection
//! arises from an extreme ray of the elimination cone, whose support is at
//! most `k + 1`. The exact LP pass afterwards reduces each intermediate
//! system to its unique minimal form, which keeps the 5-measurement
//! projections tractable.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::simplex::conic_combination;
use super::{Cone, LinearInequality, PolyhedraError, Provenance};
use crate::subsets::{Subset, SubsetIndex};

/// Options controlling [`project_cone`].
#[derive(Clone, Debug)]
pub struct ProjectOptions {
    /// Hard cap on the intermediate inequality count; exceeding it aborts
    /// with [`PolyhedraError::ResourceLimit`] rather than truncating.
    pub max_intermediate: usize,
    /// Apply the ancestor-count prune during elimination.
    pub ancestor_prune: bool,
    /// Run exact redundancy removal after every elimination step.
    pub per_step_redundancy: bool,
}

impl Default for ProjectOptions {
    fn default() -> Self {
        ProjectOptions {
            max_intermediate: 200_000,
            ancestor_prune: true,
            per_step_redundancy: true,
        }
    }
}

/// Per-step progress record, streamed to the caller when requested.
#[derive(Clone, Debug)]
pub struct StepStats {
    pub step: usize,
    pub eliminated: String,
    pub positive_rows: usize,
    pub negative_rows: usize,
    pub derived: usize,
    pub after_prune: usize,
    pub after_redundancy: usize,
}

/// Eliminate one coordinate: keep rows with zero coefficient there, combine
/// every positive row with every negative row scaled to cancel it, then
/// normalize and deduplicate. The result is exactly the orthogonal
/// projection of the input cone.
pub fn fm_eliminate(cone: &Cone, coordinate: Subset) -> Result<Cone, PolyhedraError> {
    let pos = cone
        .index()
        .position(coordinate)
        .ok_or_else(|| PolyhedraError::UnknownCoordinate(cone.index().subset_name(coordinate)))?;
    let new_index = cone.index().without(coordinate);
    let mut rows: Vec<(LinearInequality, Provenance)> = Vec::new();

    let drop_coord = |coeffs: &[BigInt]| -> Vec<BigInt> {
        coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != pos)
            .map(|(_, c)| c.clone())
            .collect()
    };

    let mut positive: Vec<&LinearInequality> = Vec::new();
    let mut negative: Vec<&LinearInequality> = Vec::new();
    for (ineq, prov) in cone.rows() {
        let c = &ineq.coeffs()[pos];
        if c.is_zero() {
            rows.push((
                LinearInequality::new(drop_coord(ineq.coeffs())).expect("nonzero row"),
                *prov,
            ));
        } else if c.is_positive() {
            positive.push(ineq);
        } else {
            negative.push(ineq);
        }
    }
    for p in &positive {
        for n in &negative {
            if let Some(combo) = combine(p, n, pos) {
                rows.push((combo, Provenance::DerivedByFm));
            }
        }
    }
    Ok(Cone::new(new_index, rows))
}

/// Nonnegative combination of a positive and a negative row cancelling the
/// coordinate at `pos`, with the coordinate dropped. Returns `None` when the
/// combination cancels entirely (it would read `0 >= 0`).
fn combine(p: &LinearInequality, n: &LinearInequality, pos: usize) -> Option<LinearInequality> {
    let pc = &p.coeffs()[pos];
    let nc = &n.coeffs()[pos];
    let mut coeffs = Vec::with_capacity(p.coeffs().len() - 1);
    let neg_abs = -nc;
    for (i, (a, b)) in p.coeffs().iter().zip(n.coeffs()).enumerate() {
        if i == pos {
            continue;
        }
        coeffs.push(a * &neg_abs + b * pc);
    }
    LinearInequality::new(coeffs).ok()
}

/// Remove every redundant inequality: a row is redundant exactly when it is
/// a nonnegative combination of the remaining rows (Farkas). The scan is
/// sequential; for full-dimensional cones the surviving set is the unique
/// minimal representation, so scan order does not affect the result.
pub fn remove_redundant(cone: &Cone) -> Cone {
    let rows = cone.rows().to_vec();
    let keep = irredundant_mask(&rows.iter().map(|(i, _)| i.clone()).collect::<Vec<_>>());
    let kept: Vec<(LinearInequality, Provenance)> = rows
        .into_iter()
        .zip(&keep)
        .filter(|(_, k)| **k)
        .map(|(r, _)| r)
        .collect();
    Cone::new(cone.index().clone(), kept)
}

fn irredundant_mask(rows: &[LinearInequality]) -> Vec<bool> {
    let mut keep = vec![true; rows.len()];
    let rats: Vec<Vec<crate::rational::Rat>> =
        rows.iter().map(|r| r.coeffs_rational()).collect();
    for i in 0..rows.len() {
        let generators: Vec<Vec<crate::rational::Rat>> = (0..rows.len())
            .filter(|&j| j != i && keep[j])
            .map(|j| rats[j].clone())
            .collect();
        if generators.is_empty() {
            continue;
        }
        if conic_combination(&generators, &rats[i]).is_some() {
            keep[i] = false;
        }
    }
    keep
}

/// Iterated elimination onto a target coordinate system, with redundancy
/// control after each step. The elimination order is chosen greedily by the
/// smallest positive-times-negative pair count.
pub fn project_cone(
    cone: &Cone,
    target: &SubsetIndex,
    options: &ProjectOptions,
) -> Result<Cone, PolyhedraError> {
    project_cone_with_progress(cone, target, options, |_| {})
}

pub fn project_cone_with_progress(
    cone: &Cone,
    target: &SubsetIndex,
    options: &ProjectOptions,
    mut on_step: impl FnMut(&StepStats),
) -> Result<Cone, PolyhedraError> {
    if !target.is_subindex_of(cone.index()) {
        return Err(PolyhedraError::IndexMismatch(
            "target index is not a sub-index of the cone's index".into(),
        ));
    }

    // Ancestor sets are tracked against the rows of the *input* cone.
    let width = cone.len();
    let mut rows: Vec<(LinearInequality, Provenance, AncestorSet)> = cone
        .rows()
        .iter()
        .enumerate()
        .map(|(i, (ineq, prov))| (ineq.clone(), *prov, AncestorSet::singleton(width, i)))
        .collect();
    let mut index = cone.index().clone();
    let mut step = 0usize;

    loop {
        let to_eliminate: Vec<Subset> = index
            .subsets()
            .iter()
            .copied()
            .filter(|s| !target.contains(*s))
            .collect();
        if to_eliminate.is_empty() {
            break;
        }
        // Pick the coordinate with the fewest positive x negative pairs.
        let mut best: Option<(Subset, usize, usize, usize)> = None;
        for s in to_eliminate {
            let pos = index.position(s).expect("coordinate in index");
            let mut p = 0usize;
            let mut n = 0usize;
            for (ineq, _, _) in &rows {
                let c = &ineq.coeffs()[pos];
                if c.is_positive() {
                    p += 1;
                } else if c.is_negative() {
                    n += 1;
                }
            }
            let cost = p * n;
            let better = match &best {
                None => true,
                Some((_, bp, bn, bcost)) => {
                    cost < *bcost || (cost == *bcost && p + n < bp + bn)
                }
            };
            if better {
                best = Some((s, p, n, cost));
            }
        }
        let (coord, p_count, n_count, _) = best.expect("nonempty elimination set");
        step += 1;

        // Eliminate.
        let pos = index.position(coord).expect("coordinate in index");
        let mut next: Vec<(LinearInequality, Provenance, AncestorSet)> = Vec::new();
        let mut positive: Vec<&(LinearInequality, Provenance, AncestorSet)> = Vec::new();
        let mut negative: Vec<&(LinearInequality, Provenance, AncestorSet)> = Vec::new();
        for row in &rows {
            let c = &row.0.coeffs()[pos];
            if c.is_zero() {
                let coeffs: Vec<BigInt> = row
                    .0
                    .coeffs()
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != pos)
                    .map(|(_, c)| c.clone())
                    .collect();
                next.push((
                    LinearInequality::new(coeffs).expect("nonzero row"),
                    row.1,
                    row.2.clone(),
                ));
            } else if c.is_positive() {
                positive.push(row);
            } else {
                negative.push(row);
            }
        }
        let derived_budget = next.len() + positive.len() * negative.len();
        if derived_budget > options.max_intermediate {
            return Err(PolyhedraError::ResourceLimit {
                count: derived_budget,
                cap: options.max_intermediate,
                step,
            });
        }
        for p in &positive {
            for n in &negative {
                let ancestors = p.2.union(&n.2);
                if options.ancestor_prune && ancestors.count() > step + 1 {
                    continue;
                }
                if let Some(combo) = combine(&p.0, &n.0, pos) {
                    next.push((combo, Provenance::DerivedByFm, ancestors));
                }
            }
        }
        let derived = next.len();

        // Dedup, keeping the smallest ancestor set per distinct inequality.
        next.sort_by(|a, b| {
            a.0.coeffs()
                .cmp(b.0.coeffs())
                .then_with(|| a.2.count().cmp(&b.2.count()))
        });
        next.dedup_by(|a, b| a.0 == b.0);
        let after_prune = next.len();

        // Exact minimal representation.
        let after_redundancy;
        if options.per_step_redundancy {
            let ineqs: Vec<LinearInequality> = next.iter().map(|r| r.0.clone()).collect();
            let keep = irredundant_mask(&ineqs);
            next = next
                .into_iter()
                .zip(&keep)
                .filter(|(_, k)| **k)
                .map(|(r, _)| r)
                .collect();
            after_redundancy = next.len();
        } else {
            after_redundancy = next.len();
        }

        index = index.without(coord);
        rows = next;

        on_step(&StepStats {
            step,
            eliminated: index_name(cone.index(), coord),
            positive_rows: p_count,
            negative_rows: n_count,
            derived,
            after_prune,
            after_redundancy,
        });
    }

    let cone_rows: Vec<(LinearInequality, Provenance)> =
        rows.into_iter().map(|(i, p, _)| (i, p)).collect();
    Ok(Cone::new(index, cone_rows))
}

fn index_name(index: &SubsetIndex, s: Subset) -> String {
    index.subset_name(s)
}

/// Small fixed-capacity bitset for ancestor tracking.
#[derive(Clone, Debug)]
struct AncestorSet {
    words: Vec<u64>,
}

impl AncestorSet {
    fn singleton(width: usize, bit: usize) -> AncestorSet {
        let mut words = vec![0u64; width.div_ceil(64).max(1)];
        words[bit / 64] |= 1 << (bit % 64);
        AncestorSet { words }
    }

    fn union(&self, other: &AncestorSet) -> AncestorSet {
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a | b)
            .collect();
        AncestorSet { words }
    }

    fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}
