//! Finite joint probability distributions over labelled variables;
//! marginalization and Shannon entropies in bits. These back the quantum
//! probability tables, the junction-tree extension and the randomized test
//! oracles.

use std::collections::BTreeSet;

use rand::Rng;
use thiserror::Error;

use crate::scenario::{EntropyVector, Scenario, ScenarioError};
use crate::subsets::{Subset, SubsetIndex};

#[derive(Debug, Error, PartialEq)]
pub enum DistError {
    #[error("probabilities must be nonnegative and sum to 1 (sum = {0})")]
    NotNormalized(f64),
    #[error("variable count/cardinality mismatch")]
    ShapeMismatch,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
}

/// Joint distribution over variables with finite outcome alphabets, stored
/// row-major (the last variable varies fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    labels: Vec<String>,
    cards: Vec<usize>,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(
        labels: Vec<String>,
        cards: Vec<usize>,
        probs: Vec<f64>,
    ) -> Result<JointDistribution, DistError> {
        if labels.len() != cards.len() || cards.iter().product::<usize>() != probs.len() {
            return Err(DistError::ShapeMismatch);
        }
        let sum: f64 = probs.iter().sum();
        if probs.iter().any(|p| *p < -1e-12) || (sum - 1.0).abs() > 1e-9 {
            return Err(DistError::NotNormalized(sum));
        }
        Ok(JointDistribution {
            labels,
            cards,
            probs,
        })
    }

    /// Deterministic distribution concentrated on one outcome tuple.
    pub fn deterministic(labels: Vec<String>, cards: Vec<usize>, outcome: &[usize]) -> Self {
        let total: usize = cards.iter().product();
        let mut probs = vec![0.0; total];
        let mut idx = 0;
        for (k, &o) in outcome.iter().enumerate() {
            idx = idx * cards[k] + o;
        }
        probs[idx] = 1.0;
        JointDistribution {
            labels,
            cards,
            probs,
        }
    }

    /// Dirichlet(1)-distributed random distribution: dense and generically
    /// interior to every Shannon constraint.
    pub fn random<R: Rng>(labels: Vec<String>, cards: Vec<usize>, rng: &mut R) -> Self {
        let total: usize = cards.iter().product();
        let mut probs: Vec<f64> = (0..total)
            .map(|_| -f64::ln(rng.random::<f64>().max(1e-300)))
            .collect();
        let sum: f64 = probs.iter().sum();
        for p in probs.iter_mut() {
            *p /= sum;
        }
        JointDistribution {
            labels,
            cards,
            probs,
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn arity(&self) -> usize {
        self.labels.len()
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.cards.len()];
        for i in (0..self.cards.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.cards[i + 1];
        }
        strides
    }

    /// Outcome tuple of a flat atom index.
    pub fn unrank(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.cards.len()];
        for i in (0..self.cards.len()).rev() {
            out[i] = idx % self.cards[i];
            idx /= self.cards[i];
        }
        out
    }

    pub fn rank(&self, outcome: &[usize]) -> usize {
        let mut idx = 0;
        for (k, &o) in outcome.iter().enumerate() {
            idx = idx * self.cards[k] + o;
        }
        idx
    }

    /// Marginal over a subset of variable positions (ascending order kept).
    pub fn marginal(&self, vars: &[usize]) -> JointDistribution {
        let strides = self.strides();
        let kept: Vec<usize> = vars.to_vec();
        let kept_cards: Vec<usize> = kept.iter().map(|&v| self.cards[v]).collect();
        let total: usize = kept_cards.iter().product();
        let mut probs = vec![0.0; total];
        for (atom, p) in self.probs.iter().enumerate() {
            if *p == 0.0 {
                continue;
            }
            let mut idx = 0;
            for &v in &kept {
                let outcome = (atom / strides[v]) % self.cards[v];
                idx = idx * self.cards[v] + outcome;
            }
            probs[idx] += *p;
        }
        JointDistribution {
            labels: kept.iter().map(|&v| self.labels[v].clone()).collect(),
            cards: kept_cards,
            probs,
        }
    }

    /// Marginal over variables given by label, in the exact order requested.
    pub fn marginal_by_labels(&self, labels: &[String]) -> Result<JointDistribution, DistError> {
        let mut positions = Vec::with_capacity(labels.len());
        for l in labels {
            let p = self
                .labels
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| DistError::UnknownVariable(l.clone()))?;
            positions.push(p);
        }
        let mut sorted = positions.clone();
        sorted.sort_unstable();
        let base = self.marginal(&sorted);
        // Permute axes of `base` (ascending-position order) into the
        // requested order.
        let perm: Vec<usize> = positions
            .iter()
            .map(|p| sorted.iter().position(|s| s == p).unwrap())
            .collect();
        let cards: Vec<usize> = perm.iter().map(|&k| base.cards[k]).collect();
        let total: usize = cards.iter().product();
        let mut probs = vec![0.0; total];
        for atom in 0..base.probs.len() {
            let outcome = base.unrank(atom);
            let permuted: Vec<usize> = perm.iter().map(|&k| outcome[k]).collect();
            let mut idx = 0;
            for (k, &o) in permuted.iter().enumerate() {
                idx = idx * cards[k] + o;
            }
            probs[idx] += base.probs[atom];
        }
        Ok(JointDistribution {
            labels: labels.to_vec(),
            cards,
            probs,
        })
    }

    /// Shannon entropy in bits, with 0 log 0 = 0.
    pub fn entropy_bits(&self) -> f64 {
        entropy_bits(&self.probs)
    }

    /// Entropy of the marginal on a subset of variable positions.
    pub fn subset_entropy(&self, s: Subset) -> f64 {
        if s.is_empty() {
            return 0.0;
        }
        self.marginal(&s.indices()).entropy_bits()
    }

    /// Entropy vector over the full index of this distribution's variables.
    pub fn full_entropy_vector(&self) -> EntropyVector {
        let index = SubsetIndex::full(self.labels.clone());
        let values: Vec<f64> = index
            .subsets()
            .iter()
            .map(|s| self.subset_entropy(*s).max(0.0))
            .collect();
        EntropyVector::new(index, values).expect("entropies are finite and nonnegative")
    }

    /// Observed entropy vector for a scenario whose labels are a subset of
    /// this distribution's variables (matched by name).
    pub fn observed_entropy_vector(
        &self,
        scenario: &Scenario,
    ) -> Result<EntropyVector, ScenarioError> {
        let index = scenario.observed_index();
        let mut values = Vec::with_capacity(index.len());
        for s in index.subsets() {
            let mut vars = Vec::new();
            for i in s.iter() {
                let label = &scenario.labels()[i];
                let pos = self
                    .labels
                    .iter()
                    .position(|l| l == label)
                    .ok_or_else(|| ScenarioError::DanglingLabel(label.clone()))?;
                vars.push(pos);
            }
            vars.sort_unstable();
            values.push(self.marginal(&vars).entropy_bits().max(0.0));
        }
        EntropyVector::new(index, values)
    }

    /// Product of two distributions on disjoint variable sets.
    pub fn product(&self, other: &JointDistribution) -> Result<JointDistribution, DistError> {
        let overlap: BTreeSet<&String> = self
            .labels
            .iter()
            .filter(|l| other.labels.contains(l))
            .collect();
        if !overlap.is_empty() {
            return Err(DistError::ShapeMismatch);
        }
        let labels: Vec<String> = self
            .labels
            .iter()
            .chain(other.labels.iter())
            .cloned()
            .collect();
        let cards: Vec<usize> = self
            .cards
            .iter()
            .chain(other.cards.iter())
            .copied()
            .collect();
        let mut probs = Vec::with_capacity(self.probs.len() * other.probs.len());
        for p in &self.probs {
            for q in &other.probs {
                probs.push(p * q);
            }
        }
        Ok(JointDistribution {
            labels,
            cards,
            probs,
        })
    }
}

/// Shannon entropy in bits of a probability slice; tiny negatives from
/// floating-point accumulation are clamped to zero.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    let mut h = 0.0;
    for &p in probs {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn uniform_bits_have_expected_entropies() {
        let d = JointDistribution::new(
            strings(&["A", "B"]),
            vec![2, 2],
            vec![0.25; 4],
        )
        .unwrap();
        assert!((d.entropy_bits() - 2.0).abs() < 1e-12);
        assert!((d.marginal(&[0]).entropy_bits() - 1.0).abs() < 1e-12);
        assert!((d.marginal(&[1]).entropy_bits() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_distribution_has_zero_entropy() {
        let d = JointDistribution::deterministic(strings(&["A", "B"]), vec![2, 3], &[1, 2]);
        assert_eq!(d.entropy_bits(), 0.0);
        assert_eq!(d.probs()[d.rank(&[1, 2])], 1.0);
    }

    #[test]
    fn marginal_of_correlated_pair() {
        // A = B uniform bit.
        let d = JointDistribution::new(
            strings(&["A", "B"]),
            vec![2, 2],
            vec![0.5, 0.0, 0.0, 0.5],
        )
        .unwrap();
        assert!((d.entropy_bits() - 1.0).abs() < 1e-12);
        let ma = d.marginal(&[0]);
        assert!((ma.probs()[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn random_distributions_normalize_and_are_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d = JointDistribution::random(strings(&["X", "Y", "Z"]), vec![2, 2, 2], &mut rng);
        assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(d.probs().iter().all(|p| *p > 0.0));
    }

    #[test]
    fn full_entropy_vector_of_three_variables() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = JointDistribution::random(strings(&["A1", "A2", "A3"]), vec![2, 2, 2], &mut rng);
        let v = d.full_entropy_vector();
        assert_eq!(v.values().len(), 7);
        // H is monotone: H(full) >= each pair >= each singleton.
        let full = v.values()[6];
        for i in 0..6 {
            assert!(v.values()[i] <= full + 1e-12);
        }
    }

    #[test]
    fn product_distribution_has_additive_entropy() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = JointDistribution::random(strings(&["A"]), vec![3], &mut rng);
        let b = JointDistribution::random(strings(&["B"]), vec![2], &mut rng);
        let ab = a.product(&b).unwrap();
        assert!((ab.entropy_bits() - a.entropy_bits() - b.entropy_bits()).abs() < 1e-9);
    }
}
