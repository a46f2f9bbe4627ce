//! Exhaustive checks of structural properties on enumerable densities.
//!
//! Everything here starts from a [`Distribution`], the exact normalized table
//! of a density, and computes correlation and influence matrices, the
//! fractional log-concavity Hessian, entropy and support-size bounds, and
//! Newton polytope edge lengths.

mod bounds;
mod correlation;
mod polytope;
mod walks;

pub use bounds::{entropy_bound_check, support_log_estimate, EntropyCheck, SupportBracket};
pub use correlation::{
    correlation_matrices, flc_hessian, flc_hessian_check, homogenization_spectrum_check, homogenize,
    row_norm_and_spectrum, CorrelationMatrices, FlcCheck, HomogenizationCheck, SPECTRUM_IMAG_TOL,
};
pub use polytope::{newton_polytope_max_edge, EdgeReport, MAX_POLYTOPE_POINTS};
pub use walks::{walk_diagnosis, WalkDiagnosis, PARITY_REDUCIBLE};

use crate::densities::Density;
use crate::error::{Error, Result};
use crate::subsets::{binomial, combinations, log_sum_exp};
use rayon::prelude::*;
use std::collections::HashMap;

/// Largest number of candidate sets scanned by [`enumerate_density`].
pub const ENUMERATION_LIMIT: f64 = 1e6;

/// Exact normalized table of a density, restricted to its support and
/// ordered lexicographically.
#[derive(Debug, Clone)]
pub struct Distribution {
    n: usize,
    k: usize,
    sets: Vec<Vec<usize>>,
    probs: Vec<f64>,
    log_partition: f64,
    index: HashMap<Vec<usize>, usize>,
}

impl Distribution {
    /// Normalizes `(set, log-weight)` pairs, dropping zero weights.
    pub fn from_log_weights(n: usize, k: usize, entries: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        let mut entries: Vec<_> = entries.into_iter().filter(|(_, l)| *l > f64::NEG_INFINITY).collect();
        if let Some((s, _)) = entries.iter().find(|(_, l)| !l.is_finite()) {
            return Err(Error::Numerical(format!("non-finite weight at {s:?}")));
        }
        if entries.is_empty() {
            return Err(Error::EmptySupport);
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        entries.dedup_by(|a, b| a.0 == b.0);
        let log_partition = log_sum_exp(entries.iter().map(|e| e.1));
        let probs = entries.iter().map(|e| (e.1 - log_partition).exp()).collect();
        let sets: Vec<Vec<usize>> = entries.into_iter().map(|e| e.0).collect();
        let index = sets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(Distribution { n, k, sets, probs, log_partition, index })
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, set: &[usize]) -> f64 {
        self.index.get(set).map_or(0.0, |&i| self.probs[i])
    }

    /// Log of the total unnormalized weight.
    pub fn log_partition(&self) -> f64 {
        self.log_partition
    }

    pub fn partition_function(&self) -> f64 {
        self.log_partition.exp()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.sets.iter().map(|s| s.as_slice()).zip(self.probs.iter().copied())
    }

    /// `P[i in S]` for every element.
    pub fn marginals(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.n];
        for (s, p) in self.iter() {
            for &i in s {
                m[i] += p;
            }
        }
        m
    }

    /// `P[i in S and j in S]` as a dense row-major `n x n` table (diagonal
    /// holds the marginals).
    pub fn pair_marginals(&self) -> Vec<f64> {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for (s, p) in self.iter() {
            for &i in s {
                for &j in s {
                    m[i * n + j] += p;
                }
            }
        }
        m
    }

    /// Restriction to sets containing `pinned`, relabelled on the remaining
    /// elements in increasing order.
    pub fn condition(&self, pinned: &[usize]) -> Result<Distribution> {
        let pinned = crate::subsets::normalize(pinned.to_vec(), self.n)
            .ok_or_else(|| Error::InvalidInput(format!("pinned set is not a subset of 0..{}", self.n)))?;
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        for (x, l) in label.iter_mut().enumerate() {
            if pinned.binary_search(&x).is_err() {
                *l = next;
                next += 1;
            }
        }
        let entries: Vec<(Vec<usize>, f64)> = self
            .iter()
            .filter(|(s, _)| crate::subsets::is_subset(&pinned, s))
            .map(|(s, p)| (s.iter().filter(|&&x| label[x] != usize::MAX).map(|&x| label[x]).collect(), p.ln()))
            .collect();
        if entries.is_empty() {
            return Err(Error::ConditioningOutsideSupport);
        }
        Distribution::from_log_weights(next, self.k.saturating_sub(pinned.len()), entries)
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        -self.probs.iter().filter(|&&p| p > 0.0).map(|p| p * p.ln()).sum::<f64>()
    }
}

/// Enumerates a density exactly. Uses the support hint when present, and
/// otherwise scans all `C(n, k)` sets, refusing more than
/// [`ENUMERATION_LIMIT`].
pub fn enumerate_density<D: Density + ?Sized>(mu: &D) -> Result<Distribution> {
    enumerate_density_with_limit(mu, ENUMERATION_LIMIT)
}

/// [`enumerate_density`] with a caller-chosen cap on the number of candidate
/// sets scanned when no support hint is available.
pub fn enumerate_density_with_limit<D: Density + ?Sized>(mu: &D, limit: f64) -> Result<Distribution> {
    let (n, k) = (mu.ground_size(), mu.level());
    let candidates: Vec<Vec<usize>> = match mu.support_hint() {
        Some(hint) => hint,
        None => {
            let count = binomial(n, k);
            if count > limit {
                return Err(Error::TooLarge(format!("C({n}, {k}) = {count:e} candidate sets")));
            }
            combinations(n, k).collect()
        }
    };
    let entries = candidates
        .into_par_iter()
        .map(|s| {
            let l = mu.log_eval(&s);
            (s, l)
        })
        .collect();
    Distribution::from_log_weights(n, k, entries)
}

/// Distribution of a weighted set family given explicitly; sets may have
/// different sizes (the level is reported as the largest size).
pub fn distribution_of_table(n: usize, table: &[(Vec<usize>, f64)]) -> Result<Distribution> {
    let k = table.iter().map(|e| e.0.len()).max().unwrap_or(0);
    let entries = table
        .iter()
        .map(|(s, w)| {
            let s = crate::subsets::normalize(s.clone(), n)
                .ok_or_else(|| Error::InvalidInput(format!("{s:?} is not a subset of 0..{n}")))?;
            if w.is_nan() || *w < 0.0 {
                return Err(Error::NegativeWeight(format!("{w} for {s:?}")));
            }
            Ok((s, w.ln()))
        })
        .collect::<Result<Vec<_>>>()?;
    Distribution::from_log_weights(n, k, entries)
}
