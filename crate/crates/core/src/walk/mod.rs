//! The `k <-> (k - d)` down-up walk.
//!
//! One step removes `d` uniformly chosen elements from the current set and
//! then re-adds `d` elements, choosing among all completions with probability
//! proportional to the density. Completions are weighed in log space and the
//! resulting distribution of each up-step is memoized by the intermediate set.

mod exact;

pub use exact::{
    exact_transition_matrix, spectral_gap, transition_matrix_for, tv_to_stationary, TransitionMatrix, MAX_EXACT_STATES,
};

use crate::densities::{check_set, DensityRef};
use crate::error::{Error, Result};
use crate::rng::{stream, ChainRng};
use crate::subsets::{combinations_of, complement, log_sum_exp, union_sorted};
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Default number of memoized up-step tables.
pub const DEFAULT_MEMO_CAPACITY: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkConfig {
    /// Number of elements exchanged per step.
    pub gap: usize,
    pub steps: usize,
    pub seed: u64,
    pub chains: usize,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig { gap: 2, steps: 1000, seed: 0, chains: 1 }
    }
}

/// The exchange size suggested by the mixing analysis for a density that is
/// `alpha`-fractionally log-concave.
pub fn theoretical_gap(alpha: f64) -> usize {
    (4.0 * (1.0 / alpha - 1.0)).ceil().max(1.0) as usize
}

/// Default exchange size: 2 for single-constraint instances, `2s` with `s`
/// partition blocks; never more than the level.
pub fn default_gap(level: usize, blocks: usize) -> usize {
    (2 * blocks.max(1)).min(level).max(1)
}

/// Normalized distribution of one up-step, restricted to positive-weight
/// completions.
#[derive(Debug)]
pub struct UpTable {
    sets: Vec<Vec<usize>>,
    cumulative: Vec<f64>,
}

impl UpTable {
    fn build(mu: &DensityRef, base: &[usize], d: usize) -> UpTable {
        let free = complement(mu.ground_size(), base);
        let mut sets = Vec::new();
        let mut logs = Vec::new();
        for add in combinations_of(&free, d) {
            let s = union_sorted(base, &add);
            let lw = mu.log_eval(&s);
            if lw > f64::NEG_INFINITY {
                sets.push(s);
                logs.push(lw);
            }
        }
        let total = log_sum_exp(logs.iter().copied());
        let mut acc = 0.0;
        let cumulative = logs
            .iter()
            .map(|&l| {
                acc += (l - total).exp();
                acc
            })
            .collect();
        UpTable { sets, cumulative }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Completions with their probabilities.
    pub fn iter(&self) -> impl Iterator<Item = (&[usize], f64)> {
        let mut prev = 0.0;
        self.sets.iter().zip(&self.cumulative).map(move |(s, &c)| {
            let p = c - prev;
            prev = c;
            (s.as_slice(), p)
        })
    }

    fn pick(&self, u: f64) -> Option<&Vec<usize>> {
        let total = *self.cumulative.last()?;
        let i = self.cumulative.partition_point(|&c| c <= u * total);
        Some(&self.sets[i.min(self.sets.len() - 1)])
    }
}

/// A density together with an exchange size and a shared up-step memo.
#[derive(Debug)]
pub struct Walker {
    mu: DensityRef,
    gap: usize,
    capacity: usize,
    memo: Mutex<HashMap<Vec<usize>, Arc<UpTable>>>,
}

impl Walker {
    /// Fails unless `1 <= gap <= level` (any gap is accepted at level 0).
    pub fn new(mu: DensityRef, gap: usize) -> Result<Self> {
        Self::with_capacity(mu, gap, DEFAULT_MEMO_CAPACITY)
    }

    pub fn with_capacity(mu: DensityRef, gap: usize, capacity: usize) -> Result<Self> {
        let k = mu.level();
        if k > 0 && (gap == 0 || gap > k) {
            return Err(Error::InvalidInput(format!("gap must lie in 1..={k}, got {gap}")));
        }
        Ok(Walker {
            mu,
            gap: gap.min(k),
            capacity,
            memo: Mutex::new(HashMap::new()),
        })
    }

    pub fn density(&self) -> &DensityRef {
        &self.mu
    }

    pub fn gap(&self) -> usize {
        self.gap
    }

    /// Up-step distribution from the `(k - gap)`-set `base`.
    pub fn up_table(&self, base: &[usize]) -> Arc<UpTable> {
        if self.capacity == 0 {
            return Arc::new(UpTable::build(&self.mu, base, self.gap));
        }
        if let Some(t) = self.memo.lock().unwrap().get(base) {
            return t.clone();
        }
        let table = Arc::new(UpTable::build(&self.mu, base, self.gap));
        let mut memo = self.memo.lock().unwrap();
        if memo.len() >= self.capacity {
            memo.clear();
        }
        memo.insert(base.to_vec(), table.clone());
        table
    }

    /// Checks that `s` is a positive-weight state.
    pub fn check_state(&self, s: &[usize]) -> Result<()> {
        if !check_set(self.mu.as_ref(), s) || self.mu.log_eval(s) == f64::NEG_INFINITY {
            return Err(Error::OutsideSupport);
        }
        Ok(())
    }

    pub fn step(&self, s: &[usize], rng: &mut ChainRng) -> Vec<usize> {
        let k = s.len();
        if self.gap == 0 || k == 0 {
            return s.to_vec();
        }
        let mut keep = vec![true; k];
        for i in sample(rng, k, self.gap).iter() {
            keep[i] = false;
        }
        let base: Vec<usize> = s.iter().zip(&keep).filter(|(_, &kp)| kp).map(|(&x, _)| x).collect();
        let u: f64 = rng.gen();
        match self.up_table(&base).pick(u) {
            Some(next) => next.clone(),
            None => s.to_vec(),
        }
    }
}

/// One down-up step without memoization.
pub fn down_up_step(mu: &DensityRef, s: &[usize], d: usize, rng: &mut ChainRng) -> Result<Vec<usize>> {
    let w = Walker::with_capacity(mu.clone(), d, 0)?;
    w.check_state(s)?;
    Ok(w.step(s, rng))
}

/// A retained state of one chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub chain: usize,
    pub t: usize,
    pub set: Vec<usize>,
}

fn trajectory(
    walker: &Walker,
    start: &[usize],
    cfg: &WalkConfig,
    chain: usize,
    mut keep: impl FnMut(usize, &[usize]),
) {
    let mut rng = stream(cfg.seed, chain as u64);
    let mut state = start.to_vec();
    keep(0, &state);
    for t in 1..=cfg.steps {
        state = walker.step(&state, &mut rng);
        keep(t, &state);
    }
}

/// States `S_0, ..., S_steps` of chain 0.
pub fn run_chain(mu: &DensityRef, start: &[usize], cfg: &WalkConfig) -> Result<Vec<Vec<usize>>> {
    let walker = Walker::new(mu.clone(), cfg.gap)?;
    walker.check_state(start)?;
    let mut out = Vec::with_capacity(cfg.steps + 1);
    trajectory(&walker, start, cfg, 0, |_, s| out.push(s.to_vec()));
    Ok(out)
}

/// Final states of `cfg.chains` independent chains, in chain order.
pub fn final_states(walker: &Walker, start: &[usize], cfg: &WalkConfig) -> Result<Vec<Vec<usize>>> {
    walker.check_state(start)?;
    Ok((0..cfg.chains)
        .into_par_iter()
        .map(|c| {
            let mut last = Vec::new();
            trajectory(walker, start, cfg, c, |t, s| {
                if t == cfg.steps {
                    last = s.to_vec();
                }
            });
            last
        })
        .collect())
}

/// Retained samples of all chains: times `t >= burnin` with
/// `(t - burnin).is_multiple_of(thin)`. Output is ordered by chain, then time, and
/// does not depend on thread scheduling.
pub fn sample_chains(
    walker: &Walker,
    start: &[usize],
    cfg: &WalkConfig,
    burnin: usize,
    thin: usize,
) -> Result<Vec<Sample>> {
    walker.check_state(start)?;
    let thin = thin.max(1);
    let per_chain: Vec<Vec<Sample>> = (0..cfg.chains)
        .into_par_iter()
        .map(|chain| {
            let mut kept = Vec::new();
            trajectory(walker, start, cfg, chain, |t, s| {
                if t >= burnin && (t - burnin).is_multiple_of(thin) {
                    kept.push(Sample { chain, t, set: s.to_vec() });
                }
            });
            kept
        })
        .collect();
    Ok(per_chain.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::{explicit_density, monomer_dimer_density, Density};
    use crate::graph::{generate, Family};
    use crate::subsets::combinations;
    use std::collections::BTreeMap;

    fn uniform(n: usize, k: usize) -> DensityRef {
        Arc::new(explicit_density(n, combinations(n, k).map(|s| (s, 1.0))).unwrap())
    }

    #[test]
    fn point_mass_is_fixed() {
        let mu: DensityRef = Arc::new(explicit_density(4, [(vec![1, 3], 2.0)]).unwrap());
        let mut rng = stream(1, 0);
        for d in 1..=2 {
            for _ in 0..20 {
                assert_eq!(down_up_step(&mu, &[1, 3], d, &mut rng).unwrap(), vec![1, 3]);
            }
        }
    }

    #[test]
    fn uniform_pairs_step_frequencies() {
        let mu = uniform(3, 2);
        let w = Walker::new(mu, 1).unwrap();
        let mut rng = stream(3, 0);
        let mut counts = BTreeMap::new();
        let trials = 40_000;
        for _ in 0..trials {
            *counts.entry(w.step(&[1, 2], &mut rng)).or_insert(0usize) += 1;
        }
        let freq = |s: Vec<usize>| counts.get(&s).copied().unwrap_or(0) as f64 / trials as f64;
        assert!((freq(vec![1, 2]) - 0.5).abs() < 0.01);
        assert!((freq(vec![0, 1]) - 0.25).abs() < 0.01);
        assert!((freq(vec![0, 2]) - 0.25).abs() < 0.01);
    }

    #[test]
    fn trajectories() {
        let mu = uniform(5, 2);
        let cfg = WalkConfig { gap: 1, steps: 0, seed: 9, chains: 1 };
        assert_eq!(run_chain(&mu, &[0, 4], &cfg).unwrap(), vec![vec![0, 4]]);
        let cfg = WalkConfig { steps: 50, ..cfg };
        let a = run_chain(&mu, &[0, 4], &cfg).unwrap();
        assert_eq!(a, run_chain(&mu, &[0, 4], &cfg).unwrap());
        assert_eq!(a.len(), 51);
        let other = run_chain(&mu, &[0, 4], &WalkConfig { seed: 10, ..cfg }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn parity_freezes_single_gap() {
        let g = Arc::new(generate(&Family::Path(2)).unwrap());
        let md = monomer_dimer_density(g);
        let start = md.encode(&[0, 1]);
        let mu: DensityRef = Arc::new(md);
        let cfg = WalkConfig { gap: 1, steps: 200, seed: 5, chains: 1 };
        assert!(run_chain(&mu, &start, &cfg).unwrap().iter().all(|s| *s == start));
        let cfg = WalkConfig { gap: 2, ..cfg };
        assert!(run_chain(&mu, &start, &cfg).unwrap().iter().any(|s| *s != start));
    }

    #[test]
    fn rejects_bad_starts_and_gaps() {
        let mu: DensityRef = Arc::new(explicit_density(4, [(vec![0, 1], 1.0)]).unwrap());
        let cfg = WalkConfig { gap: 1, steps: 3, seed: 0, chains: 1 };
        assert!(matches!(run_chain(&mu, &[0, 2], &cfg), Err(Error::OutsideSupport)));
        assert!(matches!(run_chain(&mu, &[1, 0], &cfg), Err(Error::OutsideSupport)));
        assert!(run_chain(&mu, &[0, 1], &WalkConfig { gap: 3, ..cfg }).is_err());
        assert!(run_chain(&mu, &[0, 1], &WalkConfig { gap: 0, ..cfg }).is_err());
    }

    #[test]
    fn chains_do_not_depend_on_threads() {
        let mu = uniform(6, 3);
        let w = Walker::new(mu, 2).unwrap();
        let cfg = WalkConfig { gap: 2, steps: 30, seed: 4, chains: 16 };
        let a = sample_chains(&w, &[0, 1, 2], &cfg, 10, 5).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| sample_chains(&w, &[0, 1, 2], &cfg, 10, 5).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.len(), 16 * 5);
        let finals = final_states(&w, &[0, 1, 2], &cfg).unwrap();
        let last: Vec<_> = a.iter().filter(|s| s.t == 30).map(|s| s.set.clone()).collect();
        assert_eq!(finals, last);
    }

    #[test]
    fn memo_does_not_change_trajectories() {
        let mu = uniform(7, 3);
        let cached = Walker::new(mu.clone(), 2).unwrap();
        let plain = Walker::with_capacity(mu, 2, 0).unwrap();
        let (mut r1, mut r2) = (stream(2, 0), stream(2, 0));
        let (mut a, mut b) = (vec![0, 1, 2], vec![0, 1, 2]);
        for _ in 0..100 {
            a = cached.step(&a, &mut r1);
            b = plain.step(&b, &mut r2);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn gap_helpers() {
        assert_eq!(theoretical_gap(0.5), 4);
        assert_eq!(theoretical_gap(1.0), 1);
        assert_eq!(default_gap(5, 1), 2);
        assert_eq!(default_gap(5, 2), 4);
        assert_eq!(default_gap(3, 2), 3);
        assert_eq!(default_gap(1, 1), 1);
        let mu = uniform(4, 0);
        assert_eq!(mu.level(), 0);
    }
}
