use super::Density;
use crate::error::{Error, Result};
use crate::subsets::normalize;
use std::collections::BTreeMap;

/// Density given by a lookup table; absent sets weigh zero.
#[derive(Debug, Clone)]
pub struct ExplicitDensity {
    n: usize,
    k: usize,
    table: BTreeMap<Vec<usize>, f64>,
}

impl ExplicitDensity {
    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, f64)> {
        self.table.iter().map(|(s, &w)| (s, w))
    }

    pub fn is_zero(&self) -> bool {
        self.table.values().all(|&w| w == 0.0)
    }
}

impl Density for ExplicitDensity {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn level(&self) -> usize {
        self.k
    }

    fn log_eval(&self, set: &[usize]) -> f64 {
        self.table.get(set).map_or(f64::NEG_INFINITY, |w| w.ln())
    }

    fn support_hint(&self) -> Option<Vec<Vec<usize>>> {
        Some(self.table.keys().cloned().collect())
    }

    fn describe(&self) -> String {
        format!("table(n={}, k={}, entries={})", self.n, self.k, self.table.len())
    }
}

/// Builds a table density on ground set `0..n`. Keys may be given in any
/// order but must all have the same size; an empty table yields the zero
/// density at level 0.
pub fn explicit_density(
    n: usize,
    entries: impl IntoIterator<Item = (Vec<usize>, f64)>,
) -> Result<ExplicitDensity> {
    let mut table = BTreeMap::new();
    let mut k = None;
    for (set, w) in entries {
        let len = set.len();
        let set = normalize(set, n)
            .ok_or_else(|| Error::InvalidInput(format!("table key is not a subset of 0..{n}")))?;
        if *k.get_or_insert(len) != len {
            return Err(Error::InvalidInput("table keys have inconsistent sizes".into()));
        }
        if !w.is_finite() || w < 0.0 {
            return Err(Error::NegativeWeight(format!("table weight {w} for {set:?}")));
        }
        if table.insert(set.clone(), w).is_some() {
            return Err(Error::InvalidInput(format!("duplicate table key {set:?}")));
        }
    }
    Ok(ExplicitDensity { n, k: k.unwrap_or(0), table })
}

/// `z_0 ... z_{k-1} + z_k ... z_{2k-1} + ...` with `r` disjoint blocks of
/// size `k`.
pub fn block_density(r: usize, k: usize) -> ExplicitDensity {
    let entries = (0..r).map(|b| ((b * k..(b + 1) * k).collect(), 1.0));
    explicit_density(r * k, entries).expect("blocks are valid subsets")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass() {
        let mu = explicit_density(3, [(vec![1, 0], 1.0)]).unwrap();
        assert_eq!(mu.level(), 2);
        assert_eq!(mu.eval(&[0, 1]), 1.0);
        assert_eq!(mu.eval(&[0, 2]), 0.0);
        assert_eq!(mu.support_hint(), Some(vec![vec![0, 1]]));
    }

    #[test]
    fn empty_table_is_zero() {
        let mu = explicit_density(3, []).unwrap();
        assert!(mu.is_zero());
        assert_eq!(mu.eval(&[]), 0.0);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(explicit_density(3, [(vec![0], 1.0), (vec![0, 1], 1.0)]).is_err());
        assert!(explicit_density(3, [(vec![0, 3], 1.0)]).is_err());
        assert!(explicit_density(3, [(vec![0, 0], 1.0)]).is_err());
        assert!(explicit_density(3, [(vec![0], -1.0)]).is_err());
        assert!(explicit_density(3, [(vec![0], 1.0), (vec![0], 2.0)]).is_err());
    }

    #[test]
    fn two_blocks() {
        let mu = block_density(2, 2);
        assert_eq!(mu.ground_size(), 4);
        assert_eq!(mu.eval(&[0, 1]), 1.0);
        assert_eq!(mu.eval(&[2, 3]), 1.0);
        assert_eq!(mu.eval(&[1, 2]), 0.0);
    }
}
