use super::Walker;
use crate::densities::DensityRef;
use crate::diagnostics::{enumerate_density, Distribution};
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigenvalues;
use crate::subsets::{binomial, combinations_of};
use nalgebra::DMatrix;
use std::collections::HashMap;

/// Largest support for which a dense transition matrix is built.
pub const MAX_EXACT_STATES: usize = 5000;

/// Dense down-up transition matrix over the positive-weight states.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    states: Vec<Vec<usize>>,
    stationary: Vec<f64>,
    matrix: DMatrix<f64>,
    gap: usize,
}

impl TransitionMatrix {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Vec<usize>] {
        &self.states
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Exchange size the matrix was built with.
    pub fn exchange(&self) -> usize {
        self.gap
    }

    pub fn row_sum_error(&self) -> f64 {
        self.matrix
            .row_iter()
            .map(|r| (r.sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `max |pi_i P_ij - pi_j P_ji| / max(pi_i P_ij, pi_j P_ji)`.
    pub fn detailed_balance_error(&self) -> f64 {
        let n = self.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                let a = self.stationary[i] * self.matrix[(i, j)];
                let b = self.stationary[j] * self.matrix[(j, i)];
                let scale = a.max(b);
                if scale > 0.0 {
                    worst = worst.max((a - b).abs() / scale);
                }
            }
        }
        worst
    }

    /// `max_j |(pi P)_j - pi_j|`.
    pub fn stationarity_error(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|j| {
                let flow: f64 = (0..n).map(|i| self.stationary[i] * self.matrix[(i, j)]).sum();
                (flow - self.stationary[j]).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest symmetric difference between states joined by a positive entry.
    pub fn max_jump(&self) -> usize {
        let n = self.len();
        let mut worst = 0;
        for i in 0..n {
            for j in 0..n {
                if self.matrix[(i, j)] > 0.0 {
                    let common = self.states[i].iter().filter(|x| self.states[j].binary_search(x).is_ok()).count();
                    worst = worst.max(2 * (self.states[i].len() - common));
                }
            }
        }
        worst
    }

    /// Whether the positive entries connect every state to every other.
    pub fn is_irreducible(&self) -> bool {
        let n = self.len();
        if n == 0 {
            return false;
        }
        // reversible, so strong connectivity equals connectivity from state 0
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if !seen[j] && self.matrix[(i, j)] > 0.0 {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// `diag(pi)^{1/2} P diag(pi)^{-1/2}`, symmetric by detailed balance.
    pub fn symmetrized(&self) -> DMatrix<f64> {
        let n = self.len();
        let root: Vec<f64> = self.stationary.iter().map(|p| p.sqrt()).collect();
        let a = DMatrix::from_fn(n, n, |i, j| root[i] * self.matrix[(i, j)] / root[j]);
        (&a + a.transpose()) * 0.5
    }

    /// Spectrum in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        symmetric_eigenvalues(&self.symmetrized())
    }
}

/// Builds the exact `k <-> (k - d)` transition matrix by enumeration.
pub fn exact_transition_matrix(mu: &DensityRef, d: usize) -> Result<TransitionMatrix> {
    let dist = enumerate_density(mu)?;
    transition_matrix_for(mu, &dist, d)
}

/// As [`exact_transition_matrix`], reusing an enumerated distribution of `mu`.
pub fn transition_matrix_for(mu: &DensityRef, dist: &Distribution, d: usize) -> Result<TransitionMatrix> {
    if dist.len() > MAX_EXACT_STATES {
        return Err(Error::TooLarge(format!(
            "support has {} states (limit {MAX_EXACT_STATES})",
            dist.len()
        )));
    }
    let walker = Walker::new(mu.clone(), d)?;
    let states = dist.sets().to_vec();
    let index: HashMap<&[usize], usize> = states.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let n = states.len();
    let k = mu.level();
    let gap = walker.gap();
    let mut matrix = DMatrix::zeros(n, n);
    if k == 0 {
        matrix[(0, 0)] = 1.0;
    } else {
        let down = 1.0 / binomial(k, gap);
        for (i, s) in states.iter().enumerate() {
            for drop in combinations_of(s, gap) {
                let base: Vec<usize> = s.iter().copied().filter(|x| drop.binary_search(x).is_err()).collect();
                for (next, p) in walker.up_table(&base).iter() {
                    let j = *index
                        .get(next)
                        .ok_or_else(|| Error::Numerical(format!("completion {next:?} missing from support")))?;
                    matrix[(i, j)] += down * p;
                }
            }
        }
    }
    Ok(TransitionMatrix {
        states,
        stationary: dist.probs().to_vec(),
        matrix,
        gap,
    })
}

/// `1 - lambda_2`, exactly 0 for a reducible chain and 1 for a single state.
pub fn spectral_gap(p: &TransitionMatrix) -> f64 {
    if p.len() <= 1 {
        return 1.0;
    }
    if !p.is_irreducible() {
        return 0.0;
    }
    (1.0 - p.eigenvalues()[1]).clamp(0.0, 1.0)
}

/// Total variation distance between the empirical distribution of `samples`
/// and `dist`.
pub fn tv_to_stationary(samples: &[Vec<usize>], dist: &Distribution) -> f64 {
    if samples.is_empty() {
        return 1.0;
    }
    let mut counts: HashMap<&[usize], usize> = HashMap::new();
    for s in samples {
        *counts.entry(s.as_slice()).or_default() += 1;
    }
    let m = samples.len() as f64;
    let mut total = 0.0;
    for (s, &p) in dist.sets().iter().zip(dist.probs()) {
        let q = counts.remove(s.as_slice()).unwrap_or(0) as f64 / m;
        total += (p - q).abs();
    }
    total += counts.values().map(|&c| c as f64 / m).sum::<f64>();
    0.5 * total
}
