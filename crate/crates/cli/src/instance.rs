//! Builds densities and chain start states from command-line inputs.

use crate::args::InputArgs;
use crate::error::CliError;
use crate::run::Run;
use anyhow::Result;
use sectorwalk_core::counting::MultiaffinePolynomial;
use sectorwalk_core::densities::{
    k_matching_density, monomer_dimer_density, ndpp_density, partition_constrained, MonomerDimerDensity, NdppKernel,
    PartitionConstraint,
};
use sectorwalk_core::graph::{find_matching_of_size, maximum_matching, parse_graph};
use sectorwalk_core::linalg::lu_log_det;
use sectorwalk_core::subsets::{binomial, combinations, combinations_of};
use sectorwalk_core::walk::default_gap;
use sectorwalk_core::{DensityRef, EmbeddedGraph, Error};
use std::sync::Arc;

/// Candidate sets scanned when searching for a start state.
const START_SCAN_LIMIT: usize = 1_000_000;

pub enum Base {
    Graph { graph: Arc<EmbeddedGraph>, m: usize },
    Kernel { kernel: Arc<NdppKernel>, k: usize },
}

pub enum Kind {
    MonomerDimer(Arc<MonomerDimerDensity>),
    KMatching,
    Ndpp,
    Partition { blocks: usize },
    Poly,
}

pub struct Instance {
    pub kind: Kind,
    pub base: Option<Base>,
    pub constraint: Option<PartitionConstraint>,
    pub density: DensityRef,
}

fn need<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| CliError::usage(format!("{flag} is required")).into())
}

pub fn load_graph(run: &mut Run, input: &InputArgs) -> Result<Arc<EmbeddedGraph>> {
    let path = need(input.graph.as_ref(), "--graph")?;
    Ok(Arc::new(parse_graph(&run.read(path)?)?))
}

pub fn load_kernel(run: &mut Run, input: &InputArgs) -> Result<Arc<NdppKernel>> {
    let path = need(input.kernel.as_ref(), "--kernel")?;
    let text = run.read(path)?;
    let json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with(['[', '{']);
    Ok(Arc::new(if json { NdppKernel::from_json(&text)? } else { NdppKernel::from_csv(&text)? }))
}

pub fn load_poly(run: &mut Run, input: &InputArgs) -> Result<MultiaffinePolynomial> {
    let path = need(input.poly.as_ref(), "--poly")?;
    Ok(MultiaffinePolynomial::from_json(&run.read(path)?)?)
}

impl Instance {
    pub fn monomer_dimer(run: &mut Run, input: &InputArgs) -> Result<Self> {
        let graph = load_graph(run, input)?;
        let md = Arc::new(monomer_dimer_density(graph.clone()));
        Ok(Instance {
            density: md.clone(),
            kind: Kind::MonomerDimer(md),
            base: Some(Base::Graph { graph, m: 0 }),
            constraint: None,
        })
    }

    pub fn k_matching(run: &mut Run, input: &InputArgs) -> Result<Self> {
        let graph = load_graph(run, input)?;
        let m = need(input.size, "--size")?;
        let density = Arc::new(k_matching_density(graph.clone(), m)?);
        Ok(Instance { kind: Kind::KMatching, base: Some(Base::Graph { graph, m }), constraint: None, density })
    }

    pub fn ndpp(run: &mut Run, input: &InputArgs) -> Result<Self> {
        let kernel = load_kernel(run, input)?;
        let k = need(input.size, "--size")?;
        let density = Arc::new(ndpp_density(kernel.clone(), k)?);
        Ok(Instance { kind: Kind::Ndpp, base: Some(Base::Kernel { kernel, k }), constraint: None, density })
    }

    /// Kernel base when `--kernel` is given, k-matchings of `--graph` otherwise.
    pub fn partition(run: &mut Run, input: &InputArgs) -> Result<Self> {
        let inner = if input.kernel.is_some() { Self::ndpp(run, input)? } else { Self::k_matching(run, input)? };
        let path = need(input.constraints.as_ref(), "--constraints")?;
        let pc = PartitionConstraint::from_json(&run.read(path)?)?;
        let constrained = partition_constrained(&inner.density, &pc)?;
        Ok(Instance {
            kind: Kind::Partition { blocks: constrained.block_count() },
            base: inner.base,
            constraint: Some(pc),
            density: constrained,
        })
    }

    pub fn poly(run: &mut Run, input: &InputArgs) -> Result<Self> {
        let f = load_poly(run, input)?;
        Ok(Instance { kind: Kind::Poly, base: None, constraint: None, density: Arc::new(f.to_density()) })
    }

    pub fn n(&self) -> usize {
        self.density.ground_size()
    }

    pub fn k(&self) -> usize {
        self.density.level()
    }

    pub fn default_gap(&self) -> usize {
        match self.kind {
            Kind::Partition { blocks } => default_gap(self.k(), blocks),
            _ => default_gap(self.k(), 1),
        }
    }

    pub fn is_monomer_encoding(&self) -> bool {
        matches!(self.kind, Kind::MonomerDimer(_))
    }

    /// Exponent for the entropy and support bounds implied by the instance's
    /// stability class.
    pub fn bound_alpha(&self) -> f64 {
        match (&self.kind, &self.base) {
            (Kind::MonomerDimer(_) | Kind::KMatching, _) => 0.25,
            (Kind::Partition { .. }, Some(Base::Graph { .. })) => 0.25,
            _ => 0.5,
        }
    }

    pub fn enumeration_size(&self) -> f64 {
        binomial(self.n(), self.k())
    }

    /// A positive-weight state to start chains from.
    pub fn start_state(&self) -> Result<Vec<usize>> {
        let positive = |s: &Vec<usize>| self.density.log_eval(s) > f64::NEG_INFINITY;
        let capacity = match &self.constraint {
            Some(pc) => Some((pc.block_index(self.n(), self.k())?, pc.counts.clone())),
            None => None,
        };
        let candidate = match (&self.kind, &self.base) {
            (Kind::MonomerDimer(md), Some(Base::Graph { graph, .. })) => {
                Some(md.encode(&maximum_matching(graph).monomers(graph)))
            }
            (Kind::KMatching, Some(Base::Graph { graph, m })) => {
                let found = find_matching_of_size(graph, *m)
                    .ok_or_else(|| Error::Infeasible(format!("graph has no {m}-matching of positive weight")))?;
                Some(found.monomers(graph))
            }
            (Kind::Ndpp | Kind::Partition { .. }, Some(Base::Kernel { kernel, k })) => {
                greedy_minor(kernel, *k, capacity.as_ref())
            }
            _ => None,
        };
        if let Some(s) = candidate.filter(positive) {
            return Ok(s);
        }
        if let Some(hint) = self.density.support_hint() {
            if let Some(s) = hint.into_iter().find(positive) {
                return Ok(s);
            }
        }
        let found = match &self.constraint {
            Some(pc) => constrained_scan(&pc.blocks, &pc.counts, |s| self.density.log_eval(s) > f64::NEG_INFINITY),
            None => combinations(self.n(), self.k()).take(START_SCAN_LIMIT).find(positive),
        };
        found.ok_or_else(|| Error::Infeasible("no start state: no positive-weight set found".into()).into())
    }
}

/// Greedily grows a set maximizing the principal minor of the kernel's
/// symmetric part, respecting per-block capacities when given.
fn greedy_minor(kernel: &NdppKernel, k: usize, capacity: Option<&(Vec<usize>, Vec<usize>)>) -> Option<Vec<usize>> {
    let n = kernel.n();
    let sym = kernel.symmetric_part();
    let mut left = capacity.map(|c| c.1.clone());
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<(f64, usize)> = None;
        for x in 0..n {
            if chosen.contains(&x) {
                continue;
            }
            if let (Some((block_of, _)), Some(left)) = (capacity, &left) {
                if left[block_of[x]] == 0 {
                    continue;
                }
            }
            let mut s = chosen.clone();
            s.push(x);
            s.sort_unstable();
            let mut a: Vec<f64> = s.iter().flat_map(|&i| s.iter().map(move |&j| sym[(i, j)])).collect();
            let ld = lu_log_det(&mut a, s.len());
            let score = if ld.sign > 0.0 { ld.log_abs } else { f64::NEG_INFINITY };
            if best.is_none_or(|(b, _)| score > b) {
                best = Some((score, x));
            }
        }
        let x = best?.1;
        if let (Some((block_of, _)), Some(left)) = (capacity, left.as_mut()) {
            left[block_of[x]] -= 1;
        }
        chosen.push(x);
    }
    chosen.sort_unstable();
    Some(chosen)
}

/// Lexicographic scan over the sets satisfying block counts.
pub fn constrained_scan(blocks: &[Vec<usize>], counts: &[usize], mut accept: impl FnMut(&[usize]) -> bool) -> Option<Vec<usize>> {
    fn rec(
        blocks: &[Vec<usize>],
        counts: &[usize],
        prefix: &mut Vec<usize>,
        budget: &mut usize,
        accept: &mut dyn FnMut(&[usize]) -> bool,
    ) -> Option<Vec<usize>> {
        if blocks.is_empty() {
            *budget = budget.checked_sub(1)?;
            let mut s = prefix.clone();
            s.sort_unstable();
            return accept(&s).then_some(s);
        }
        for pick in combinations_of(&blocks[0], counts[0]) {
            let len = prefix.len();
            prefix.extend(pick);
            let found = rec(&blocks[1..], &counts[1..], prefix, budget, accept);
            prefix.truncate(len);
            if found.is_some() || *budget == 0 {
                return found;
            }
        }
        None
    }
    let mut budget = START_SCAN_LIMIT;
    rec(blocks, counts, &mut Vec::new(), &mut budget, &mut accept)
}
