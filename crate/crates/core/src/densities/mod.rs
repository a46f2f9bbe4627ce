//! Unnormalized densities on fixed-size subsets of a ground set.
//!
//! Everything downstream (walks, diagnostics, counting) sees a density only
//! through the [`Density`] trait: a ground set `0..n`, a level `k`, and an
//! oracle returning the log-weight of any sorted `k`-subset. Concrete
//! instances live here together with the transformations that preserve the
//! interface (conditioning, external fields, partition constraints).

mod combinators;
mod explicit;
mod monomer;
mod ndpp;

pub use combinators::{
    apply_external_field, condition, condition_with_witness, memoize, partition_constrained,
    Conditioned, ExternalField, Memoized, PartitionConstrained, PartitionConstraint,
};
pub use explicit::{block_density, explicit_density, ExplicitDensity};
pub use monomer::{k_matching_density, monomer_dimer_density, KMatchingDensity, MonomerDimerDensity};
pub use ndpp::{ndpp_density, NdppDensity, NdppKernel};

use std::fmt::Debug;
use std::sync::Arc;

/// Oracle view of a nonnegative weight function on `k`-subsets of `0..n`.
///
/// Sets are passed as strictly increasing slices of length [`level`].
/// Implementations must be pure: the same set always gets the same value.
///
/// [`level`]: Density::level
pub trait Density: Send + Sync + Debug {
    fn ground_size(&self) -> usize;

    fn level(&self) -> usize;

    /// Natural log of the weight; `-inf` encodes zero.
    fn log_eval(&self, set: &[usize]) -> f64;

    fn eval(&self, set: &[usize]) -> f64 {
        self.log_eval(set).exp()
    }

    /// Explicit list of candidate support sets, when the density knows it.
    fn support_hint(&self) -> Option<Vec<Vec<usize>>> {
        None
    }

    /// Short human-readable descriptor used in run metadata.
    fn describe(&self) -> String;
}

pub type DensityRef = Arc<dyn Density>;

impl<D: Density + ?Sized> Density for Arc<D> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }

    fn level(&self) -> usize {
        (**self).level()
    }

    fn log_eval(&self, set: &[usize]) -> f64 {
        (**self).log_eval(set)
    }

    fn eval(&self, set: &[usize]) -> f64 {
        (**self).eval(set)
    }

    fn support_hint(&self) -> Option<Vec<Vec<usize>>> {
        (**self).support_hint()
    }

    fn describe(&self) -> String {
        (**self).describe()
    }
}

/// Tolerance applied when checking that a set is a valid argument.
pub(crate) fn check_set(mu: &dyn Density, set: &[usize]) -> bool {
    set.len() == mu.level()
        && set.windows(2).all(|w| w[0] < w[1])
        && set.last().is_none_or(|&x| x < mu.ground_size())
}
