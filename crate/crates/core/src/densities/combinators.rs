use super::{Density, DensityRef};
use crate::error::{Error, Result};
use crate::subsets::{binomial, combinations, normalize, union_sorted};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Largest number of candidate sets scanned when checking that a
/// conditioning has nonempty support.
pub const SUPPORT_SCAN_LIMIT: f64 = 1e6;

/// `mu` restricted to supersets of `pinned`, re-indexed on the remaining
/// ground set (in increasing order).
#[derive(Debug)]
pub struct Conditioned {
    inner: DensityRef,
    pinned: Vec<usize>,
    map: Vec<usize>,
}

impl Conditioned {
    pub fn pinned(&self) -> &[usize] {
        &self.pinned
    }

    /// Original label of each element of the shrunken ground set.
    pub fn original_labels(&self) -> &[usize] {
        &self.map
    }

    /// The full set of the underlying density represented by `set`.
    pub fn lift(&self, set: &[usize]) -> Vec<usize> {
        let mapped: Vec<usize> = set.iter().map(|&i| self.map[i]).collect();
        union_sorted(&mapped, &self.pinned)
    }
}

impl Density for Conditioned {
    fn ground_size(&self) -> usize {
        self.map.len()
    }

    fn level(&self) -> usize {
        self.inner.level() - self.pinned.len()
    }

    fn log_eval(&self, set: &[usize]) -> f64 {
        self.inner.log_eval(&self.lift(set))
    }

    fn support_hint(&self) -> Option<Vec<Vec<usize>>> {
        let mut index = vec![usize::MAX; self.inner.ground_size()];
        for (new, &old) in self.map.iter().enumerate() {
            index[old] = new;
        }
        let hint = self.inner.support_hint()?;
        Some(
            hint.into_iter()
                .filter(|s| crate::subsets::is_subset(&self.pinned, s))
                .map(|s| s.iter().filter(|&&x| index[x] != usize::MAX).map(|&x| index[x]).collect())
                .collect(),
        )
    }

    fn describe(&self) -> String {
        format!("{} | pinned {:?}", self.inner.describe(), self.pinned)
    }
}

fn build_conditioned(mu: &DensityRef, pinned: &[usize]) -> Result<Conditioned> {
    let n = mu.ground_size();
    let pinned = normalize(pinned.to_vec(), n)
        .ok_or_else(|| Error::InvalidInput(format!("pinned set is not a subset of 0..{n}")))?;
    if pinned.len() > mu.level() {
        return Err(Error::InvalidInput(format!(
            "cannot pin {} elements at level {}",
            pinned.len(),
            mu.level()
        )));
    }
    let mut is_pinned = vec![false; n];
    for &x in &pinned {
        is_pinned[x] = true;
    }
    let map = (0..n).filter(|&x| !is_pinned[x]).collect();
    Ok(Conditioned { inner: mu.clone(), pinned, map })
}

/// Whether `mu` has a positive-weight set, scanning the support hint or all
/// candidates when that is cheap enough. `None` means "not checked".
fn has_support(mu: &dyn Density) -> Option<bool> {
    if let Some(hint) = mu.support_hint() {
        return Some(hint.iter().any(|s| mu.log_eval(s) > f64::NEG_INFINITY));
    }
    if binomial(mu.ground_size(), mu.level()) > SUPPORT_SCAN_LIMIT {
        return None;
    }
    Some(combinations(mu.ground_size(), mu.level()).any(|s| mu.log_eval(&s) > f64::NEG_INFINITY))
}

/// Conditions `mu` on containing `pinned`.
///
/// Fails when no superset of `pinned` has positive weight. Instances too
/// large to scan are accepted unchecked; use [`condition_with_witness`] when a
/// positive superset is known.
pub fn condition(mu: &DensityRef, pinned: &[usize]) -> Result<DensityRef> {
    if pinned.is_empty() {
        return Ok(mu.clone());
    }
    let c = build_conditioned(mu, pinned)?;
    if has_support(&c) == Some(false) {
        return Err(Error::ConditioningOutsideSupport);
    }
    Ok(Arc::new(c))
}

/// Like [`condition`], but certifies the support with `witness`, a set of
/// `mu` containing `pinned` with positive weight.
pub fn condition_with_witness(mu: &DensityRef, pinned: &[usize], witness: &[usize]) -> Result<Arc<Conditioned>> {
    let c = build_conditioned(mu, pinned)?;
    if !crate::subsets::is_subset(&c.pinned, witness) || mu.log_eval(witness) == f64::NEG_INFINITY {
        return Err(Error::ConditioningOutsideSupport);
    }
    Ok(Arc::new(c))
}

/// `mu(S) * prod_{i in S} field[i]`, stored as log-field.
#[derive(Debug)]
pub struct ExternalField {
    inner: DensityRef,
    log_field: Vec<f64>,
}

impl Density for ExternalField {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn level(&self) -> usize {
        self.inner.level()
    }

    fn log_eval(&self, set: &[usize]) -> f64 {
        let base = self.inner.log_eval(set);
        if base == f64::NEG_INFINITY {
            return base;
        }
        base + set.iter().map(|&i| self.log_field[i]).sum::<f64>()
    }

    fn support_hint(&self) -> Option<Vec<Vec<usize>>> {
        self.inner.support_hint()
    }

    fn describe(&self) -> String {
        format!("{} * field", self.inner.describe())
    }
}

pub fn apply_external_field(mu: &DensityRef, field: &[f64]) -> Result<DensityRef> {
    if field.len() != mu.ground_size() {
        return Err(Error::InvalidInput(format!(
            "field has {} entries for ground set of size {}",
            field.len(),
            mu.ground_size()
        )));
    }
    if let Some(bad) = field.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidInput(format!("field entries must be positive, got {bad}")));
    }
    Ok(Arc::new(ExternalField {
        inner: mu.clone(),
        log_field: field.iter().map(|x| x.ln()).collect(),
    }))
}

/// Blocks partitioning the ground set and the number of elements to take
/// from each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionConstraint {
    pub blocks: Vec<Vec<usize>>,
    pub counts: Vec<usize>,
}

impl PartitionConstraint {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Validates against a density of ground size `n` and level `k`, returning
    /// the block index of each element.
    pub fn block_index(&self, n: usize, k: usize) -> Result<Vec<usize>> {
        if self.blocks.len() != self.counts.len() {
            return Err(Error::InvalidInput(format!(
                "{} blocks but {} counts",
                self.blocks.len(),
                self.counts.len()
            )));
        }
        let mut block_of = vec![usize::MAX; n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &x in block {
                if x >= n {
                    return Err(Error::InvalidInput(format!("block element {x} outside 0..{n}")));
                }
                if block_of[x] != usize::MAX {
                    return Err(Error::InvalidInput(format!("element {x} appears in two blocks")));
                }
                block_of[x] = b;
            }
        }
        if let Some(x) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::InvalidInput(format!("element {x} is in no block")));
        }
        let total: usize = self.counts.iter().sum();
        if total != k {
            return Err(Error::Infeasible(format!("counts sum to {total}, level is {k}")));
        }
        for (b, (&c, block)) in self.counts.iter().zip(&self.blocks).enumerate() {
            if c > block.len() {
                return Err(Error::Infeasible(format!(
                    "block {b} has {} elements, {c} requested",
                    block.len()
                )));
            }
        }
        Ok(block_of)
    }
}

#[derive(Debug)]
pub struct PartitionConstrained {
    inner: DensityRef,
    block_of: Vec<usize>,
    counts: Vec<usize>,
}

impl PartitionConstrained {
    pub fn block_count(&self) -> usize {
        self.counts.len()
    }

    pub fn satisfies(&self, set: &[usize]) -> bool {
        let mut seen = vec![0usize; self.counts.len()];
        for &x in set {
            seen[self.block_of[x]] += 1;
        }
        seen == self.counts
    }
}

impl Density for PartitionConstrained {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn level(&self) -> usize {
        self.inner.level()
    }

    fn log_eval(&self, set: &[usize]) -> f64 {
        if self.satisfies(set) {
            self.inner.log_eval(set)
        } else {
            f64::NEG_INFINITY
        }
    }

    fn support_hint(&self) -> Option<Vec<Vec<usize>>> {
        let hint = self.inner.support_hint()?;
        Some(hint.into_iter().filter(|s| self.satisfies(s)).collect())
    }

    fn describe(&self) -> String {
        format!("{} | counts {:?}", self.inner.describe(), self.counts)
    }
}

pub fn partition_constrained(mu: &DensityRef, pc: &PartitionConstraint) -> Result<Arc<PartitionConstrained>> {
    let block_of = pc.block_index(mu.ground_size(), mu.level())?;
    Ok(Arc::new(PartitionConstrained {
        inner: mu.clone(),
        block_of,
        counts: pc.counts.clone(),
    }))
}

/// Transparent memo in front of an expensive oracle. The table is dropped
/// wholesale once it reaches `capacity` entries.
#[derive(Debug)]
pub struct Memoized {
    inner: DensityRef,
    capacity: usize,
    cache: Mutex<HashMap<Vec<usize>, f64>>,
}

impl Density for Memoized {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn level(&self) -> usize {
        self.inner.level()
    }

    fn log_eval(&self, set: &[usize]) -> f64 {
        if let Some(&v) = self.cache.lock().unwrap().get(set) {
            return v;
        }
        let v = self.inner.log_eval(set);
        let mut cache = self.cache.lock().unwrap();
        if cache.len() >= self.capacity {
            cache.clear();
        }
        cache.insert(set.to_vec(), v);
        v
    }

    fn support_hint(&self) -> Option<Vec<Vec<usize>>> {
        self.inner.support_hint()
    }

    fn describe(&self) -> String {
        self.inner.describe()
    }
}

pub fn memoize(mu: &DensityRef, capacity: usize) -> DensityRef {
    Arc::new(Memoized {
        inner: mu.clone(),
        capacity: capacity.max(1),
        cache: Mutex::new(HashMap::new()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::{explicit_density, k_matching_density, ndpp_density, NdppKernel};
    use crate::graph::{generate, Family};
    use proptest::prelude::*;

    fn uniform(n: usize, k: usize) -> DensityRef {
        Arc::new(explicit_density(n, combinations(n, k).map(|s| (s, 1.0))).unwrap())
    }

    #[test]
    fn empty_pin_is_identity() {
        let mu = uniform(4, 2);
        let c = condition(&mu, &[]).unwrap();
        assert!(Arc::ptr_eq(&mu, &c));
    }

    #[test]
    fn pinning_outside_support_fails() {
        let g = Arc::new(generate(&Family::Path(3)).unwrap());
        let mu: DensityRef = Arc::new(k_matching_density(g, 1).unwrap());
        assert!(matches!(condition(&mu, &[1]), Err(Error::ConditioningOutsideSupport)));
        let c = condition(&mu, &[0]).unwrap();
        assert_eq!(c.level(), 0);
        assert_eq!(c.eval(&[]), 1.0);
    }

    #[test]
    fn conditioned_identity_kernel() {
        let rows = (0..3).map(|i| (0..3).map(|j| (i == j) as u8 as f64).collect()).collect();
        let mu: DensityRef = Arc::new(ndpp_density(Arc::new(NdppKernel::new(rows).unwrap()), 2).unwrap());
        let c = condition(&mu, &[0]).unwrap();
        assert_eq!((c.ground_size(), c.level()), (2, 1));
        assert!((c.eval(&[0]) - 1.0).abs() < 1e-12);
        assert!((c.eval(&[1]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn witness_conditioning() {
        let mu = uniform(4, 2);
        let c = condition_with_witness(&mu, &[2], &[1, 2]).unwrap();
        assert_eq!(c.lift(&[0]), vec![0, 2]);
        assert!(condition_with_witness(&mu, &[2], &[0, 1]).is_err());
        assert!(condition(&mu, &[0, 1, 2]).is_err());
    }

    #[test]
    fn conditioned_hint_is_relabelled() {
        let mu: DensityRef = Arc::new(explicit_density(4, [(vec![0, 2], 1.0), (vec![1, 3], 2.0), (vec![2, 3], 3.0)]).unwrap());
        let c = condition(&mu, &[2]).unwrap();
        assert_eq!(c.support_hint(), Some(vec![vec![0], vec![2]]));
        assert!((c.eval(&[2]) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn external_field_examples() {
        let mu = uniform(2, 1);
        let f = apply_external_field(&mu, &[2.0, 1.0]).unwrap();
        assert!((f.eval(&[0]) - 2.0).abs() < 1e-12);
        assert!((f.eval(&[1]) - 1.0).abs() < 1e-12);
        let mu = uniform(4, 3);
        let f = apply_external_field(&mu, &[1.5; 4]).unwrap();
        assert!((f.eval(&[0, 2, 3]) - 1.5f64.powi(3)).abs() < 1e-12);
        assert!(apply_external_field(&mu, &[1.0, 0.0, 1.0, 1.0]).is_err());
        assert!(apply_external_field(&mu, &[1.0]).is_err());
    }

    #[test]
    fn partition_examples() {
        let mu = uniform(4, 2);
        let whole = PartitionConstraint { blocks: vec![vec![0, 1, 2, 3]], counts: vec![2] };
        let same = partition_constrained(&mu, &whole).unwrap();
        assert!(combinations(4, 2).all(|s| same.eval(&s) == 1.0));
        let cross = PartitionConstraint { blocks: vec![vec![0, 1], vec![2, 3]], counts: vec![1, 1] };
        let c = partition_constrained(&mu, &cross).unwrap();
        let support: Vec<_> = combinations(4, 2).filter(|s| c.eval(s) > 0.0).collect();
        assert_eq!(support, vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]]);
        let bad = PartitionConstraint { blocks: vec![vec![0, 1], vec![2, 3]], counts: vec![2, 1] };
        assert!(matches!(partition_constrained(&mu, &bad), Err(Error::Infeasible(_))));
        let over = PartitionConstraint { blocks: vec![vec![0], vec![1, 2, 3]], counts: vec![2, 0] };
        assert!(matches!(partition_constrained(&mu, &over), Err(Error::Infeasible(_))));
        let overlap = PartitionConstraint { blocks: vec![vec![0, 1], vec![1, 2, 3]], counts: vec![1, 1] };
        assert!(matches!(partition_constrained(&mu, &overlap), Err(Error::InvalidInput(_))));
        let parsed = PartitionConstraint::from_json(r#"{"blocks": [[0, 1], [2, 3]], "counts": [1, 1]}"#).unwrap();
        assert_eq!(parsed, cross);
    }

    #[test]
    fn memo_is_transparent() {
        let g = Arc::new(generate(&Family::Grid(2, 3)).unwrap());
        let mu: DensityRef = Arc::new(k_matching_density(g, 2).unwrap());
        let m = memoize(&mu, 3);
        for _ in 0..2 {
            for s in combinations(6, 2) {
                assert_eq!(m.log_eval(&s), mu.log_eval(&s));
            }
        }
    }

    proptest! {
        #[test]
        fn field_commutes_with_conditioning(
            weights in prop::collection::vec(0.0f64..3.0, 10),
            field in prop::collection::vec(0.1f64..4.0, 5),
            pin in 0usize..5,
        ) {
            let mu: DensityRef = Arc::new(explicit_density(5, combinations(5, 2).zip(weights)).unwrap());
            let Ok(lhs) = apply_external_field(&mu, &field).and_then(|f| condition(&f, &[pin])) else {
                return Ok(());
            };
            let restricted: Vec<f64> = (0..5).filter(|&i| i != pin).map(|i| field[i]).collect();
            let rhs = condition(&mu, &[pin]).and_then(|c| apply_external_field(&c, &restricted)).unwrap();
            let ratios: Vec<f64> = combinations(4, 1)
                .filter(|s| rhs.eval(s) > 0.0)
                .map(|s| lhs.eval(&s) / rhs.eval(&s))
                .collect();
            for r in &ratios {
                prop_assert!((r / ratios[0] - 1.0).abs() < 1e-9);
            }
            for s in combinations(4, 1) {
                prop_assert_eq!(lhs.eval(&s) > 0.0, rhs.eval(&s) > 0.0);
            }
        }
    }
}
