use crate::densities::DensityRef;
use crate::error::Result;
use crate::walk::{exact_transition_matrix, spectral_gap};
use serde::Serialize;

/// Flag raised when an odd exchange size cannot leave a parity class of the
/// monomer-dimer encoding.
pub const PARITY_REDUCIBLE: &str = "parity-reducible";

#[derive(Debug, Clone, Serialize)]
pub struct WalkDiagnosis {
    pub gap_parameter: usize,
    pub states: usize,
    pub spectral_gap: f64,
    pub irreducible: bool,
    pub flag: Option<String>,
}

/// Exact spectral gap of the down-up chain with exchange size `d`. A
/// reducible chain is flagged `parity-reducible` when `d` is odd and `mu` is
/// a monomer-dimer encoding, `reducible` otherwise.
pub fn walk_diagnosis(mu: &DensityRef, d: usize, monomer_encoding: bool) -> Result<WalkDiagnosis> {
    let p = exact_transition_matrix(mu, d)?;
    let irreducible = p.is_irreducible();
    let flag = (!irreducible).then(|| {
        if monomer_encoding && d % 2 == 1 {
            PARITY_REDUCIBLE.to_string()
        } else {
            "reducible".to_string()
        }
    });
    Ok(WalkDiagnosis {
        gap_parameter: p.exchange(),
        states: p.len(),
        spectral_gap: spectral_gap(&p),
        irreducible,
        flag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::monomer_dimer_density;
    use crate::graph::{generate, Family};
    use std::sync::Arc;

    #[test]
    fn single_gap_is_parity_reducible() {
        let mu: DensityRef = Arc::new(monomer_dimer_density(Arc::new(generate(&Family::Cycle(5)).unwrap())));
        let one = walk_diagnosis(&mu, 1, true).unwrap();
        assert_eq!(one.spectral_gap, 0.0);
        assert_eq!(one.flag.as_deref(), Some(PARITY_REDUCIBLE));
        let two = walk_diagnosis(&mu, 2, true).unwrap();
        assert!(two.irreducible && two.flag.is_none() && two.spectral_gap > 0.0);
    }
}
