use crate::densities::{monomer_dimer_density, DensityRef};
use crate::error::{Error, Result};
use crate::fkt::log_pm_partition_function;
use crate::graph::{maximum_matching, EmbeddedGraph, Matching};
use crate::rng::{stream, ChainRng};
use crate::subsets::{complement, log_sum_exp};
use crate::walk::{final_states, WalkConfig, Walker};
use rand::Rng;
use rayon::prelude::*;
use std::sync::Arc;

/// Stream family used for the perfect-matching stage, kept apart from the
/// chain streams.
const MATCHING_STREAM_SALT: u64 = 0x5EED_0FD1_3E85;

/// Draws a perfect matching of `g` with probability proportional to its
/// weight, by fixing the partner of the smallest unmatched vertex with
/// probability proportional to `w(e) * PM(rest)`. Returns `None` when `g`
/// has no perfect matching of positive weight.
pub fn sample_perfect_matching(g: &EmbeddedGraph, rng: &mut ChainRng) -> Result<Option<Matching>> {
    let n = g.n();
    let mut alive = vec![true; n];
    let mut chosen = Vec::with_capacity(n / 2);
    let rest_log_pm = |alive: &[bool]| -> Result<f64> {
        let keep: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
        log_pm_partition_function(&g.induce(&keep))
    };
    if rest_log_pm(&alive)? == f64::NEG_INFINITY {
        return Ok(None);
    }
    while let Some(v) = (0..n).find(|&v| alive[v]) {
        alive[v] = false;
        let mut options = Vec::new();
        for (u, e) in g.neighbors(v) {
            let w = g.edge(e).w;
            if !alive[u] || w == 0.0 {
                continue;
            }
            alive[u] = false;
            let l = w.ln() + rest_log_pm(&alive)?;
            alive[u] = true;
            if l > f64::NEG_INFINITY {
                options.push((e, u, l));
            }
        }
        if options.is_empty() {
            return Err(Error::Numerical("perfect matching sum vanished during decomposition".into()));
        }
        let total = log_sum_exp(options.iter().map(|o| o.2));
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut pick = options.len() - 1;
        for (i, o) in options.iter().enumerate() {
            acc += (o.2 - total).exp();
            if u < acc {
                pick = i;
                break;
            }
        }
        let (e, partner, _) = options[pick];
        alive[partner] = false;
        chosen.push(e);
    }
    Ok(Some(Matching::new(chosen)))
}

/// Start state for the monomer-dimer chain: the monomer set of a maximum
/// matching that covers zero-weight vertices whenever possible.
fn start_monomers(g: &EmbeddedGraph) -> Vec<usize> {
    maximum_matching(g).monomers(g)
}

/// Draws `cfg.chains` independent matchings: each chain runs `cfg.steps`
/// down-up steps on the homogenized monomer-dimer density, then the dimers
/// are filled in exactly on the complement of its monomer set.
pub fn sample_monomer_dimers(g: &Arc<EmbeddedGraph>, cfg: &WalkConfig) -> Result<Vec<Matching>> {
    let md = monomer_dimer_density(g.clone());
    let start = md.encode(&start_monomers(g));
    let mu: DensityRef = Arc::new(md.clone());
    if mu.log_eval(&start) == f64::NEG_INFINITY {
        return Err(Error::Infeasible("every matching has zero weight".into()));
    }
    let walker = Walker::new(mu, cfg.gap)?;
    let finals = final_states(&walker, &start, cfg)?;
    finals
        .into_par_iter()
        .enumerate()
        .map(|(c, s)| {
            let monomers = md.decode(&s).expect("chain stays on valid encodings");
            let rest = complement(g.n(), &monomers);
            let (sub, labels) = g.induce_with_map(&rest);
            let mut rng = stream(cfg.seed ^ MATCHING_STREAM_SALT, c as u64);
            let inner = sample_perfect_matching(&sub, &mut rng)?
                .ok_or_else(|| Error::Numerical("monomer set without perfect matching on its complement".into()))?;
            let edges = inner
                .pairs(&sub)
                .into_iter()
                .map(|(a, b)| g.edge_between(labels[a], labels[b]).expect("induced edge"))
                .collect();
            Ok(Matching::new(edges))
        })
        .collect()
}

/// A single draw (chain 0 of [`sample_monomer_dimers`]).
pub fn sample_monomer_dimer(g: &Arc<EmbeddedGraph>, cfg: &WalkConfig) -> Result<Matching> {
    let one = WalkConfig { chains: 1, ..*cfg };
    Ok(sample_monomer_dimers(g, &one)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{enumerate_matchings, generate, Family};
    use std::collections::HashMap;

    #[test]
    fn zero_lambda_forces_the_edge() {
        let g = Arc::new(generate(&Family::Path(2)).unwrap().with_lambda(vec![0.0, 0.0]).unwrap());
        let cfg = WalkConfig { gap: 2, steps: 20, seed: 1, chains: 50 };
        assert!(sample_monomer_dimers(&g, &cfg).unwrap().iter().all(|m| m.edges == vec![0]));
    }

    #[test]
    fn single_edge_is_balanced() {
        let g = Arc::new(generate(&Family::Path(2)).unwrap());
        let cfg = WalkConfig { gap: 2, steps: 10, seed: 2, chains: 4000 };
        let draws = sample_monomer_dimers(&g, &cfg).unwrap();
        let matched = draws.iter().filter(|m| m.len() == 1).count() as f64 / 4000.0;
        assert!((matched - 0.5).abs() < 0.04, "{matched}");
    }

    #[test]
    fn cycle_perfect_matchings() {
        let g = Arc::new(generate(&Family::Cycle(4)).unwrap().with_lambda(vec![0.0; 4]).unwrap());
        let cfg = WalkConfig { gap: 2, steps: 10, seed: 3, chains: 4000 };
        let draws = sample_monomer_dimers(&g, &cfg).unwrap();
        assert!(draws.iter().all(|m| m.len() == 2 && m.is_valid(&g)));
        let first = draws.iter().filter(|m| m.edges == draws[0].edges).count() as f64 / 4000.0;
        assert!((first - 0.5).abs() < 0.04, "{first}");
        assert_eq!(sample_monomer_dimer(&g, &cfg).unwrap(), draws[0]);
    }

    #[test]
    fn perfect_matching_stage_is_exact() {
        let g = generate(&Family::Grid(2, 4))
            .unwrap()
            .with_edge_weights(|i, _| [1.0, 2.0, 0.5][i % 3])
            .unwrap();
        let all: Vec<_> = enumerate_matchings(&g).into_iter().filter(|m| 2 * m.len() == g.n()).collect();
        let total: f64 = all.iter().map(|m| m.weight(&g)).sum();
        let mut rng = stream(4, 0);
        let trials = 20_000;
        let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
        for _ in 0..trials {
            let m = sample_perfect_matching(&g, &mut rng).unwrap().unwrap();
            *counts.entry(m.edges).or_default() += 1;
        }
        let tv: f64 = 0.5
            * all
                .iter()
                .map(|m| (m.weight(&g) / total - *counts.get(&m.edges).unwrap_or(&0) as f64 / trials as f64).abs())
                .sum::<f64>();
        assert!(tv < 0.02, "{tv}");
        assert!(sample_perfect_matching(&generate(&Family::Path(3)).unwrap(), &mut rng).unwrap().is_none());
    }
}
