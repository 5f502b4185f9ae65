//! Halfspace representations of entropic cones over exact rationals.
//!
//! A cone is a set of homogeneous inequalities `<coeffs, h> >= 0` over a
//! subset-indexed coordinate system. The Shannon cone is generated by the
//! elemental inequalities (top-set monotonicities plus conditional mutual
//! informations); projections onto observed coordinates are computed by
//! Fourier-Motzkin elimination with exact redundancy removal; membership
//! and extension feasibility are decided by exact rational linear
//! programming. Floating-point data enters only through exact dyadic
//! conversion at the boundary.

mod fm;
pub mod simplex;

pub use fm::{
    fm_eliminate, project_cone, project_cone_with_progress, remove_redundant, ProjectOptions,
    StepStats,
};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::rational::{int_vec_l1, normalize_int_vec, rat_from_f64, Rat};
use crate::scenario::{EntropyVector, Scenario};
use crate::subsets::{Subset, SubsetIndex};
use simplex::{feasible_point, Feasibility};

#[derive(Debug, Error, PartialEq)]
pub enum PolyhedraError {
    #[error("coordinate systems do not match: {0}")]
    IndexMismatch(String),
    #[error("coordinate {0} not present in the cone index")]
    UnknownCoordinate(String),
    #[error(
        "intermediate inequality count {count} exceeds the cap {cap} \
         (at elimination step {step}); raise the cap to continue"
    )]
    ResourceLimit {
        count: usize,
        cap: usize,
        step: usize,
    },
    #[error("inequality is identically zero")]
    ZeroInequality,
}

/// Where an inequality of a cone came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Elemental,
    DerivedByFm,
    Intersection,
}

/// A homogeneous halfspace `<coeffs, h> >= 0` with integer coefficients
/// sharing no common factor. Coordinates are given by the owning cone's
/// `SubsetIndex`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearInequality {
    coeffs: Vec<BigInt>,
}

impl LinearInequality {
    /// Normalize (divide by the gcd) and reject the zero vector.
    pub fn new(mut coeffs: Vec<BigInt>) -> Result<LinearInequality, PolyhedraError> {
        if !normalize_int_vec(&mut coeffs) {
            return Err(PolyhedraError::ZeroInequality);
        }
        Ok(LinearInequality { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<LinearInequality, PolyhedraError> {
        LinearInequality::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs_rational(&self) -> Vec<Rat> {
        self.coeffs
            .iter()
            .map(|c| Rat::from_integer(c.clone()))
            .collect()
    }

    /// Exact slack `<coeffs, values>`.
    pub fn slack(&self, values: &[Rat]) -> Rat {
        self.coeffs
            .iter()
            .zip(values)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, v)| Rat::from_integer(c.clone()) * v)
            .sum()
    }

    pub fn slack_f64(&self, values: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .zip(values)
            .map(|(c, v)| c.to_f64().unwrap_or(f64::NAN) * v)
            .sum()
    }

    /// Render in the line format `+1 H(A1,A2) -1 H(A2) >= 0`, terms in
    /// coordinate order.
    pub fn format(&self, index: &SubsetIndex) -> String {
        let mut parts = Vec::new();
        for (pos, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let name = index.subset_name(index.subset_at(pos));
            let sign = if c.is_negative() { "-" } else { "+" };
            parts.push(format!("{sign}{} H({name})", c.abs()));
        }
        format!("{} >= 0", parts.join(" "))
    }
}

/// H-representation of a polyhedral cone over a subset index.
#[derive(Clone, Debug, PartialEq)]
pub struct Cone {
    index: SubsetIndex,
    rows: Vec<(LinearInequality, Provenance)>,
}

impl Cone {
    pub fn new(index: SubsetIndex, rows: Vec<(LinearInequality, Provenance)>) -> Cone {
        let mut cone = Cone { index, rows };
        cone.canonicalize();
        cone
    }

    /// Sort rows canonically and drop duplicates (keeping the first
    /// provenance tag of each distinct inequality).
    fn canonicalize(&mut self) {
        self.rows
            .sort_by(|a, b| a.0.coeffs.cmp(&b.0.coeffs).then_with(|| provenance_rank(a.1).cmp(&provenance_rank(b.1))));
        self.rows.dedup_by(|a, b| a.0 == b.0);
    }

    pub fn index(&self) -> &SubsetIndex {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn inequalities(&self) -> impl Iterator<Item = &LinearInequality> {
        self.rows.iter().map(|(i, _)| i)
    }

    pub fn rows(&self) -> &[(LinearInequality, Provenance)] {
        &self.rows
    }

    pub fn contains_inequality(&self, ineq: &LinearInequality) -> bool {
        self.rows.iter().any(|(i, _)| i == ineq)
    }

    /// One inequality per line in the canonical order.
    pub fn format(&self) -> String {
        self.rows
            .iter()
            .map(|(i, _)| i.format(&self.index))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

fn provenance_rank(p: Provenance) -> u8 {
    match p {
        Provenance::Elemental => 0,
        Provenance::Intersection => 1,
        Provenance::DerivedByFm => 2,
    }
}

/// The elemental generating set of the Shannon cone over a full index:
/// for each measurement i, H(M) - H(M \ i) >= 0, and for each unordered
/// pair {i, j} with each K disjoint from it,
/// H(iK) + H(jK) - H(ijK) - H(K) >= 0. Total n + C(n,2) * 2^(n-2).
pub fn elemental_inequalities(index: &SubsetIndex) -> Vec<LinearInequality> {
    let n = index.n_labels();
    assert_eq!(
        index.len(),
        (1usize << n) - 1,
        "elemental inequalities require the full subset index"
    );
    let full = Subset::from_indices(0..n);
    let mut out = Vec::new();
    let pos = |s: Subset| index.position(s).expect("full index covers all subsets");

    for i in 0..n {
        let mut coeffs = vec![BigInt::zero(); index.len()];
        coeffs[pos(full)] += 1;
        let rest = full.remove(i);
        if !rest.is_empty() {
            coeffs[pos(rest)] -= 1;
        }
        out.push(LinearInequality::new(coeffs).expect("nonzero by construction"));
    }

    for i in 0..n {
        for j in i + 1..n {
            let others = full.remove(i).remove(j);
            let k_count = 1usize << others.len();
            let other_idx = others.indices();
            for mask in 0..k_count {
                let mut k = Subset::EMPTY;
                for (b, &m) in other_idx.iter().enumerate() {
                    if mask & (1 << b) != 0 {
                        k = k.insert(m);
                    }
                }
                let mut coeffs = vec![BigInt::zero(); index.len()];
                coeffs[pos(k.insert(i))] += 1;
                coeffs[pos(k.insert(j))] += 1;
                coeffs[pos(k.insert(i).insert(j))] -= 1;
                if !k.is_empty() {
                    coeffs[pos(k)] -= 1;
                }
                out.push(LinearInequality::new(coeffs).expect("nonzero by construction"));
            }
        }
    }
    out
}

/// Shannon cone over the full index of the given labels.
pub fn shannon_cone_for(labels: Vec<String>) -> Cone {
    let index = SubsetIndex::full(labels);
    let rows = elemental_inequalities(&index)
        .into_iter()
        .map(|i| (i, Provenance::Elemental))
        .collect();
    Cone::new(index, rows)
}

/// Shannon cone over n measurements labelled A1..An.
pub fn shannon_cone(n: usize) -> Cone {
    shannon_cone_for((1..=n).map(|i| format!("A{i}")).collect())
}

/// The no-disturbance cone of a scenario: over the observed index, the
/// union across contexts of each context's elemental inequalities. Shared
/// coordinates between contexts enforce consistency automatically.
pub fn nd_cone(scenario: &Scenario) -> Cone {
    let index = scenario.observed_index();
    let mut rows: Vec<(LinearInequality, Provenance)> = Vec::new();
    let pos = |s: Subset| index.position(s).expect("context subsets are observed");

    for &ctx in scenario.contexts() {
        let members = ctx.indices();
        let c = members.len();
        // Top-set monotonicity within the context.
        for &i in &members {
            let mut coeffs = vec![BigInt::zero(); index.len()];
            coeffs[pos(ctx)] += 1;
            let rest = ctx.remove(i);
            if !rest.is_empty() {
                coeffs[pos(rest)] -= 1;
            }
            rows.push((
                LinearInequality::new(coeffs).expect("nonzero"),
                Provenance::Intersection,
            ));
        }
        // Conditional mutual informations within the context.
        for a in 0..c {
            for b in a + 1..c {
                let (i, j) = (members[a], members[b]);
                let others = ctx.remove(i).remove(j);
                let other_idx = others.indices();
                for mask in 0..(1usize << other_idx.len()) {
                    let mut k = Subset::EMPTY;
                    for (bit, &m) in other_idx.iter().enumerate() {
                        if mask & (1 << bit) != 0 {
                            k = k.insert(m);
                        }
                    }
                    let mut coeffs = vec![BigInt::zero(); index.len()];
                    coeffs[pos(k.insert(i))] += 1;
                    coeffs[pos(k.insert(j))] += 1;
                    coeffs[pos(k.insert(i).insert(j))] -= 1;
                    if !k.is_empty() {
                        coeffs[pos(k)] -= 1;
                    }
                    rows.push((
                        LinearInequality::new(coeffs).expect("nonzero"),
                        Provenance::Intersection,
                    ));
                }
            }
        }
    }
    Cone::new(index, rows)
}

/// Absolute tolerance for float-vector membership verdicts.
pub const MEMBERSHIP_EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    Inside {
        /// Slack of each inequality, in row order.
        slacks: Vec<f64>,
    },
    Outside {
        /// Row index of the violated inequality with the largest violation
        /// relative to its coefficient L1 norm.
        violated: usize,
        violation: f64,
        slacks: Vec<f64>,
    },
}

impl Membership {
    pub fn is_inside(&self) -> bool {
        matches!(self, Membership::Inside { .. })
    }
}

/// Decide membership of a float vector in a cone. Slacks are computed in
/// exact rational arithmetic on the dyadic rationals the floats denote; the
/// verdict tolerates violations up to `eps` in absolute value.
pub fn membership(vector: &EntropyVector, cone: &Cone, eps: f64) -> Result<Membership, PolyhedraError> {
    if vector.index() != cone.index() {
        return Err(PolyhedraError::IndexMismatch(
            "vector and cone use different coordinate systems".into(),
        ));
    }
    let values: Vec<Rat> = vector
        .values()
        .iter()
        .map(|v| rat_from_f64(*v).expect("entropy values are finite"))
        .collect();
    let eps_rat = rat_from_f64(eps).expect("finite eps");
    let mut slacks = Vec::with_capacity(cone.len());
    let mut worst: Option<(usize, f64)> = None;
    for (row, (ineq, _)) in cone.rows().iter().enumerate() {
        let slack = ineq.slack(&values);
        let slack_f = crate::rational::rat_to_f64(&slack);
        slacks.push(slack_f);
        if slack < -eps_rat.clone() {
            let rel = -slack_f / int_vec_l1(ineq.coeffs());
            if worst.map_or(true, |(_, w)| rel > w) {
                worst = Some((row, rel));
            }
        }
    }
    match worst {
        None => Ok(Membership::Inside { slacks }),
        Some((violated, violation)) => Ok(Membership::Outside {
            violated,
            violation,
            slacks,
        }),
    }
}

/// Exact membership: every slack must be nonnegative for the exact rational
/// vector given.
pub fn membership_exact(values: &[Rat], cone: &Cone) -> Result<bool, PolyhedraError> {
    if values.len() != cone.index().len() {
        return Err(PolyhedraError::IndexMismatch(format!(
            "expected {} coordinates, got {}",
            cone.index().len(),
            values.len()
        )));
    }
    Ok(cone
        .inequalities()
        .all(|ineq| !ineq.slack(values).is_negative()))
}

/// Outcome of an extension-feasibility test: either a witness full entropy
/// vector satisfying all elemental Shannon inequalities and restricting to
/// the observed vector, or a certificate that none exists (entropic
/// contextuality relative to the Shannon outer approximation).
#[derive(Clone, Debug)]
pub enum Extension {
    Feasible { witness: EntropyVector },
    Infeasible,
}

impl Extension {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Extension::Feasible { .. })
    }
}

/// Decide whether a full entropy vector exists whose restriction equals the
/// observed vector and which satisfies every elemental Shannon inequality.
/// The decision is exact for the dyadic rationals the observed floats
/// denote.
pub fn extension_feasible(
    observed: &EntropyVector,
    scenario: &Scenario,
) -> Result<Extension, PolyhedraError> {
    let obs_rat: Vec<Rat> = observed
        .values()
        .iter()
        .map(|v| rat_from_f64(*v).expect("entropy values are finite"))
        .collect();
    match extension_feasible_exact(observed.index(), &obs_rat, scenario)? {
        Some(full_values) => {
            let full_index = scenario.full_index();
            let values: Vec<f64> = full_values.iter().map(crate::rational::rat_to_f64).collect();
            let witness = EntropyVector::new(full_index, values)
                .map_err(|e| PolyhedraError::IndexMismatch(e.to_string()))?;
            Ok(Extension::Feasible { witness })
        }
        None => Ok(Extension::Infeasible),
    }
}

/// Exact-core of [`extension_feasible`]: observed values as rationals, full
/// witness as rationals.
pub fn extension_feasible_exact(
    observed_index: &SubsetIndex,
    observed: &[Rat],
    scenario: &Scenario,
) -> Result<Option<Vec<Rat>>, PolyhedraError> {
    let expected = scenario.observed_index();
    if *observed_index != expected {
        return Err(PolyhedraError::IndexMismatch(
            "observed vector is not over the scenario's observed index".into(),
        ));
    }
    if observed.len() != expected.len() {
        return Err(PolyhedraError::IndexMismatch(format!(
            "expected {} observed values, got {}",
            expected.len(),
            observed.len()
        )));
    }
    let full = scenario.full_index();
    let elemental = elemental_inequalities(&full);

    // Free coordinates: full-index subsets that are not observed.
    let mut free_positions = Vec::new();
    for (pos, s) in full.subsets().iter().enumerate() {
        if expected.position(*s).is_none() {
            free_positions.push(pos);
        }
    }
    let free_of_full: std::collections::HashMap<usize, usize> = free_positions
        .iter()
        .enumerate()
        .map(|(k, &pos)| (pos, k))
        .collect();

    let n_free = free_positions.len();
    let n_rows = elemental.len();
    // Variables: free coordinates, then one slack per elemental row.
    // Row r: sum_free a_rs h_s - slack_r = -sum_obs a_rs v_s.
    let mut a: Vec<Vec<Rat>> = Vec::with_capacity(n_rows);
    let mut b: Vec<Rat> = Vec::with_capacity(n_rows);
    for (r, ineq) in elemental.iter().enumerate() {
        let mut row = vec![Rat::zero(); n_free + n_rows];
        let mut rhs = Rat::zero();
        for (pos, c) in ineq.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let c_rat = Rat::from_integer(c.clone());
            match free_of_full.get(&pos) {
                Some(&k) => row[k] = c_rat,
                None => {
                    let s = full.subset_at(pos);
                    let obs_pos = expected.position(s).expect("observed coordinate");
                    rhs -= c_rat * &observed[obs_pos];
                }
            }
        }
        row[n_free + r] = Rat::from_integer((-1).into());
        a.push(row);
        b.push(rhs);
    }

    match feasible_point(&a, &b) {
        Feasibility::Infeasible => Ok(None),
        Feasibility::Feasible(x) => {
            let mut full_values = vec![Rat::zero(); full.len()];
            for (pos, s) in full.subsets().iter().enumerate() {
                match expected.position(*s) {
                    Some(obs_pos) => full_values[pos] = observed[obs_pos].clone(),
                    None => full_values[pos] = x[free_of_full[&pos]].clone(),
                }
            }
            debug_assert!(elemental
                .iter()
                .all(|i| !i.slack(&full_values).is_negative()));
            Ok(Some(full_values))
        }
    }
}
