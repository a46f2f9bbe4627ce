use super::Density;
use crate::fkt::log_monomer_weight;
use crate::graph::EmbeddedGraph;
use std::sync::Arc;

/// Homogenized monomer-dimer density.
///
/// Every monomer set `S` of a graph on `n` vertices is encoded as an
/// `n`-subset of a ground set of size `2n`: element `v` stands for
/// "v is a monomer" and element `n + v` for "v is matched". An encoded set is
/// valid when it picks exactly one of the two for every vertex; invalid sets
/// weigh zero.
#[derive(Debug, Clone)]
pub struct MonomerDimerDensity {
    graph: Arc<EmbeddedGraph>,
}

impl MonomerDimerDensity {
    pub fn graph(&self) -> &EmbeddedGraph {
        &self.graph
    }

    /// Element index for "v is a monomer".
    pub fn monomer_element(&self, v: usize) -> usize {
        v
    }

    /// Element index for "v is matched".
    pub fn matched_element(&self, v: usize) -> usize {
        self.graph.n() + v
    }

    pub fn encode(&self, monomers: &[usize]) -> Vec<usize> {
        let n = self.graph.n();
        let mut is_monomer = vec![false; n];
        for &v in monomers {
            is_monomer[v] = true;
        }
        let mut out: Vec<usize> = (0..n).map(|v| if is_monomer[v] { v } else { n + v }).collect();
        out.sort_unstable();
        out
    }

    /// Monomer set of a valid encoding.
    pub fn decode(&self, set: &[usize]) -> Option<Vec<usize>> {
        let n = self.graph.n();
        if set.len() != n {
            return None;
        }
        let mut hit = vec![false; n];
        let mut monomers = Vec::new();
        for &x in set {
            let v = x % n.max(1);
            if x >= 2 * n || hit[v] {
                return None;
            }
            hit[v] = true;
            if x < n {
                monomers.push(v);
            }
        }
        monomers.sort_unstable();
        Some(monomers)
    }
}

impl Density for MonomerDimerDensity {
    fn ground_size(&self) -> usize {
        2 * self.graph.n()
    }

    fn level(&self) -> usize {
        self.graph.n()
    }

    fn log_eval(&self, set: &[usize]) -> f64 {
        match self.decode(set) {
            Some(monomers) => log_monomer_weight(&self.graph, &monomers).unwrap_or(f64::NAN),
            None => f64::NEG_INFINITY,
        }
    }

    fn describe(&self) -> String {
        format!(
            "monomer-dimer(n={}, edges={})",
            self.graph.n(),
            self.graph.edge_count()
        )
    }
}

pub fn monomer_dimer_density(g: Arc<EmbeddedGraph>) -> MonomerDimerDensity {
    MonomerDimerDensity { graph: g }
}

/// Monomer sets of `m`-matchings: level `n - 2m` on ground set `0..n`, with
/// weight `monomer_weight(g, S)`.
#[derive(Debug, Clone)]
pub struct KMatchingDensity {
    graph: Arc<EmbeddedGraph>,
    m: usize,
}

impl KMatchingDensity {
    pub fn graph(&self) -> &EmbeddedGraph {
        &self.graph
    }

    pub fn matching_size(&self) -> usize {
        self.m
    }
}

impl Density for KMatchingDensity {
    fn ground_size(&self) -> usize {
        self.graph.n()
    }

    fn level(&self) -> usize {
        self.graph.n() - 2 * self.m
    }

    fn log_eval(&self, set: &[usize]) -> f64 {
        log_monomer_weight(&self.graph, set).unwrap_or(f64::NAN)
    }

    fn describe(&self) -> String {
        format!(
            "k-matchings(n={}, edges={}, m={})",
            self.graph.n(),
            self.graph.edge_count(),
            self.m
        )
    }
}

/// Fails when `2m > n`.
pub fn k_matching_density(g: Arc<EmbeddedGraph>, m: usize) -> crate::Result<KMatchingDensity> {
    if 2 * m > g.n() {
        return Err(crate::Error::InvalidInput(format!(
            "matching size {m} exceeds half of {} vertices",
            g.n()
        )));
    }
    Ok(KMatchingDensity { graph: g, m })
}
