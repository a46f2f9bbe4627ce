//! Approximate counting from sampling.
//!
//! The partition function of a density is recovered from one reference set
//! `S*` by pinning its elements one at a time and estimating each conditional
//! marginal from the final states of independent down-up chains:
//! `Z = mu(S*) / prod_j P[s_j | s_1, ..., s_{j-1}]`.

mod matchings;
mod mixed;

pub use matchings::{sample_monomer_dimer, sample_monomer_dimers, sample_perfect_matching};
pub use mixed::{
    estimate_mixed_derivative, symbolic_mixed_derivative, MixedDerivativeProblem, MultiaffinePolynomial,
    SplitDensity,
};

use crate::densities::{check_set, condition_with_witness, k_matching_density, Density, DensityRef};
use crate::error::{Error, Result};
use crate::graph::{find_matching_of_size, EmbeddedGraph};
use crate::walk::{final_states, WalkConfig, Walker};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountConfig {
    /// Target relative error.
    pub eps: f64,
    /// Failure probability.
    pub delta: f64,
    /// Exchange size, clamped to the level of each conditioned density.
    pub gap: usize,
    /// Steps per chain before its final state is read.
    pub steps: usize,
    pub seed: u64,
    /// Overrides [`sample_budget`].
    pub samples_per_level: Option<usize>,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig { eps: 0.1, delta: 0.05, gap: 2, steps: 100, seed: 0, samples_per_level: None }
    }
}

impl CountConfig {
    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidInput(format!("eps must be positive, got {}", self.eps)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidInput(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if self.gap == 0 {
            return Err(Error::InvalidInput("gap must be positive".into()));
        }
        Ok(())
    }
}

/// Chains per level: `ceil(32 k^2 ln(2k / delta) / eps^2)`.
pub fn sample_budget(levels: usize, eps: f64, delta: f64) -> usize {
    if levels == 0 {
        return 0;
    }
    let k = levels as f64;
    (32.0 * k * k * (2.0 * k / delta).ln() / (eps * eps)).ceil() as usize
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountEstimate {
    pub estimate: f64,
    pub log_estimate: f64,
    pub eps: f64,
    pub delta: f64,
    /// True when no sampling was needed and the value is exact.
    pub exact: bool,
    pub levels: usize,
    pub samples_per_level: usize,
    pub samples: usize,
    pub seed: u64,
    /// Estimated conditional marginals, one per pinned element.
    pub marginals: Vec<f64>,
    pub elapsed_secs: f64,
}

impl CountEstimate {
    fn exact(value: f64, cfg: &CountConfig, started: Instant) -> Self {
        CountEstimate {
            estimate: value,
            log_estimate: value.ln(),
            eps: cfg.eps,
            delta: cfg.delta,
            exact: true,
            levels: 0,
            samples_per_level: 0,
            samples: 0,
            seed: cfg.seed,
            marginals: Vec::new(),
            elapsed_secs: started.elapsed().as_secs_f64(),
        }
    }

    fn scaled(mut self, factor: f64) -> Self {
        self.estimate *= factor;
        self.log_estimate += factor.ln();
        self
    }
}

fn level_seed(seed: u64, level: usize) -> u64 {
    seed.wrapping_add((level as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Estimates `sum_S mu(S)` by self-reducibility around `reference`, pinning
/// its elements in increasing order.
pub fn estimate_partition_function(
    mu: &DensityRef,
    reference: &[usize],
    cfg: &CountConfig,
) -> Result<CountEstimate> {
    let started = Instant::now();
    cfg.validate()?;
    if !check_set(mu.as_ref(), reference) {
        return Err(Error::InvalidInput(format!("reference {reference:?} is not a sorted {}-set", mu.level())));
    }
    let log_ref = mu.log_eval(reference);
    if log_ref == f64::NEG_INFINITY {
        return Err(Error::OutsideSupport);
    }
    let k = mu.level();
    if k == 0 {
        return Ok(CountEstimate::exact(log_ref.exp(), cfg, started));
    }
    let n_samples = cfg.samples_per_level.unwrap_or_else(|| sample_budget(k, cfg.eps, cfg.delta)).max(1);
    let mut log_prob = 0.0;
    let mut marginals = Vec::with_capacity(k);
    for j in 0..k {
        let cond = condition_with_witness(mu, &reference[..j], reference)?;
        let labels = cond.original_labels();
        let local = |x: usize| labels.binary_search(&x).expect("unpinned element");
        let start: Vec<usize> = reference[j..].iter().map(|&x| local(x)).collect();
        let target = local(reference[j]);
        let gap = cfg.gap.min(k - j);
        let walker = Walker::new(cond as DensityRef, gap)?;
        let walk = WalkConfig { gap, steps: cfg.steps, seed: level_seed(cfg.seed, j), chains: n_samples };
        let finals = final_states(&walker, &start, &walk)?;
        let hits = finals.iter().filter(|s| s.binary_search(&target).is_ok()).count();
        if hits == 0 {
            return Err(Error::ReferenceUnreachable { level: j, element: reference[j] });
        }
        let p = hits as f64 / n_samples as f64;
        marginals.push(p);
        log_prob += p.ln();
    }
    let log_estimate = log_ref - log_prob;
    Ok(CountEstimate {
        estimate: log_estimate.exp(),
        log_estimate,
        eps: cfg.eps,
        delta: cfg.delta,
        exact: false,
        levels: k,
        samples_per_level: n_samples,
        samples: n_samples * k,
        seed: cfg.seed,
        marginals,
        elapsed_secs: started.elapsed().as_secs_f64(),
    })
}

/// Weighted count of `m`-matchings (the plain count under unit weights).
/// The reference set is the monomer set of a matching found by augmenting
/// paths.
pub fn count_k_matchings(g: &Arc<EmbeddedGraph>, m: usize, cfg: &CountConfig) -> Result<CountEstimate> {
    let started = Instant::now();
    cfg.validate()?;
    if m == 0 {
        return Ok(CountEstimate::exact(g.lambda().iter().product(), cfg, started));
    }
    let Some(matching) = find_matching_of_size(g, m) else {
        return Ok(CountEstimate::exact(0.0, cfg, started));
    };
    let mu: DensityRef = Arc::new(k_matching_density(g.clone(), m)?);
    let reference = matching.monomers(g);
    if mu.log_eval(&reference) == f64::NEG_INFINITY {
        return Err(Error::Infeasible(format!(
            "the {m}-matching found leaves a zero-weight monomer; no positive reference set"
        )));
    }
    estimate_partition_function(&mu, &reference, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::explicit_density;
    use crate::graph::{generate, Family};
    use crate::subsets::combinations;

    fn quick(seed: u64) -> CountConfig {
        CountConfig { eps: 0.1, delta: 0.05, gap: 2, steps: 20, seed, samples_per_level: Some(20_000) }
    }

    #[test]
    fn budget_formula() {
        assert_eq!(sample_budget(0, 0.1, 0.05), 0);
        let expected = (32.0 * 4.0 * (4.0f64 / 0.05).ln() / 0.01).ceil() as usize;
        assert_eq!(sample_budget(2, 0.1, 0.05), expected);
    }

    #[test]
    fn point_mass_is_exact() {
        let mu: DensityRef = Arc::new(explicit_density(4, [(vec![1, 2], 7.0)]).unwrap());
        let est = estimate_partition_function(&mu, &[1, 2], &quick(1)).unwrap();
        assert!((est.estimate - 7.0).abs() < 1e-9);
    }

    #[test]
    fn uniform_pairs() {
        let mu: DensityRef = Arc::new(explicit_density(3, combinations(3, 2).map(|s| (s, 1.0))).unwrap());
        let est = estimate_partition_function(&mu, &[0, 1], &quick(2)).unwrap();
        assert!((est.estimate / 3.0 - 1.0).abs() < 0.1, "{est:?}");
        assert_eq!(est.levels, 2);
    }

    #[test]
    fn path_edges() {
        let g = Arc::new(generate(&Family::Path(4)).unwrap());
        let est = count_k_matchings(&g, 1, &quick(3)).unwrap();
        assert!((est.estimate / 3.0 - 1.0).abs() < 0.1, "{est:?}");
    }

    #[test]
    fn exact_shortcuts() {
        let g = Arc::new(generate(&Family::Cycle(6)).unwrap());
        let zero = count_k_matchings(&g, 0, &quick(0)).unwrap();
        assert!(zero.exact && zero.estimate == 1.0);
        let perfect = count_k_matchings(&g, 3, &quick(0)).unwrap();
        assert!(perfect.exact && (perfect.estimate - 2.0).abs() < 1e-9);
        let p3 = Arc::new(generate(&Family::Path(3)).unwrap());
        let none = count_k_matchings(&p3, 2, &quick(0)).unwrap();
        assert!(none.exact && none.estimate == 0.0);
    }

    #[test]
    fn deterministic_given_seed() {
        let g = Arc::new(generate(&Family::Grid(2, 3)).unwrap());
        let cfg = CountConfig { samples_per_level: Some(500), ..quick(11) };
        let a = count_k_matchings(&g, 2, &cfg).unwrap();
        let b = count_k_matchings(&g, 2, &cfg).unwrap();
        assert_eq!(a.estimate, b.estimate);
        assert_eq!(a.marginals, b.marginals);
    }

    #[test]
    fn rejects_bad_reference_and_config() {
        let mu: DensityRef = Arc::new(explicit_density(3, [(vec![0, 1], 1.0)]).unwrap());
        assert!(matches!(estimate_partition_function(&mu, &[0, 2], &quick(0)), Err(Error::OutsideSupport)));
        assert!(estimate_partition_function(&mu, &[1, 0], &quick(0)).is_err());
        let bad = CountConfig { eps: 0.0, ..quick(0) };
        assert!(estimate_partition_function(&mu, &[0, 1], &bad).is_err());
    }
}
