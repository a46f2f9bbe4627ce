use super::Distribution;
use crate::densities::{explicit_density, ExplicitDensity};
use crate::error::{Error, Result};
use crate::linalg::{checked_real_spectrum, real_spectrum, symmetric_eigenvalues};
use nalgebra::DMatrix;
use serde::Serialize;

/// Marginals closer than this to 0 or 1 are treated as degenerate.
pub const DEGENERATE_TOL: f64 = 1e-12;

/// Largest imaginary part tolerated in spectra that should be real.
pub const SPECTRUM_IMAG_TOL: f64 = 1e-8;

/// Correlation (`cor`) and influence (`inf`) matrices of a distribution.
///
/// `cor[i][j] = P[j | i] - P[j]` (diagonal `1 - P[i]`) and
/// `inf[i][j] = P[j | i] - P[j | not i]` (diagonal 0). Rows whose
/// conditionals are undefined are zero.
#[derive(Debug, Clone)]
pub struct CorrelationMatrices {
    pub psi_cor: DMatrix<f64>,
    pub psi_inf: DMatrix<f64>,
    pub marginals: Vec<f64>,
    /// Row-major `P[i and j]`.
    pub pairwise: Vec<f64>,
}

fn max_row_sum(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

impl CorrelationMatrices {
    pub fn from_marginals(marginals: Vec<f64>, pairwise: Vec<f64>) -> Self {
        let n = marginals.len();
        let p = &marginals;
        let joint = |i: usize, j: usize| pairwise[i * n + j];
        let psi_cor = DMatrix::from_fn(n, n, |i, j| {
            if p[i] <= DEGENERATE_TOL || p[i] >= 1.0 - DEGENERATE_TOL {
                0.0
            } else if i == j {
                1.0 - p[i]
            } else {
                joint(i, j) / p[i] - p[j]
            }
        });
        let psi_inf = DMatrix::from_fn(n, n, |i, j| {
            if i == j || p[i] <= DEGENERATE_TOL || p[i] >= 1.0 - DEGENERATE_TOL {
                0.0
            } else {
                joint(i, j) / p[i] - (p[j] - joint(i, j)) / (1.0 - p[i])
            }
        });
        CorrelationMatrices { psi_cor, psi_inf, marginals, pairwise }
    }

    pub fn n(&self) -> usize {
        self.marginals.len()
    }

    /// Coordinates with marginal strictly inside (0, 1).
    pub fn interior(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| self.marginals[i] > DEGENERATE_TOL && self.marginals[i] < 1.0 - DEGENERATE_TOL)
            .collect()
    }

    /// `P[i and j] - P[i] P[j]` restricted to `idx`.
    fn covariance_on(&self, idx: &[usize]) -> DMatrix<f64> {
        let n = self.n();
        let p = &self.marginals;
        DMatrix::from_fn(idx.len(), idx.len(), |a, b| {
            let (i, j) = (idx[a], idx[b]);
            self.pairwise[i * n + j] - p[i] * p[j]
        })
    }

    fn scaled(&self, idx: &[usize], scale: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let c = self.covariance_on(idx);
        let s: Vec<f64> = idx.iter().map(|&i| 1.0 / scale(self.marginals[i]).sqrt()).collect();
        let m = DMatrix::from_fn(idx.len(), idx.len(), |a, b| s[a] * c[(a, b)] * s[b]);
        (&m + m.transpose()) * 0.5
    }

    fn pad(mut ev: Vec<f64>, n: usize) -> Vec<f64> {
        ev.resize(n, 0.0);
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    /// Spectrum of `psi_cor`, descending, through the similar symmetric
    /// matrix `D^{-1/2} C D^{-1/2}`.
    pub fn cor_spectrum(&self) -> Vec<f64> {
        let idx = self.interior();
        Self::pad(symmetric_eigenvalues(&self.scaled(&idx, |p| p)), self.n())
    }

    /// Eigenvalues of `psi_inf` on the interior coordinates only.
    pub fn inf_spectrum_interior(&self) -> Vec<f64> {
        let idx = self.interior();
        let m = self.scaled(&idx, |p| p * (1.0 - p)) - DMatrix::identity(idx.len(), idx.len());
        symmetric_eigenvalues(&m)
    }

    /// Spectrum of `psi_inf`, descending.
    pub fn inf_spectrum(&self) -> Vec<f64> {
        Self::pad(self.inf_spectrum_interior(), self.n())
    }

    pub fn cor_row_sum(&self) -> f64 {
        max_row_sum(&self.psi_cor)
    }

    pub fn inf_row_sum(&self) -> f64 {
        max_row_sum(&self.psi_inf)
    }

    /// Largest imaginary part of either spectrum, computed directly on the
    /// nonsymmetric matrices.
    pub fn max_imaginary_part(&self) -> f64 {
        real_spectrum(&self.psi_cor).1.max(real_spectrum(&self.psi_inf).1)
    }

    /// Largest eigenvalue of `psi_cor` computed directly on the nonsymmetric
    /// matrix.
    pub fn cor_max_eigenvalue_direct(&self) -> Result<f64> {
        Ok(row_norm_and_spectrum(&self.psi_cor)?.1)
    }
}

pub fn correlation_matrices(dist: &Distribution) -> CorrelationMatrices {
    CorrelationMatrices::from_marginals(dist.marginals(), dist.pair_marginals())
}

/// Largest absolute row sum and largest eigenvalue of a matrix whose
/// spectrum is expected to be real.
pub fn row_norm_and_spectrum(m: &DMatrix<f64>) -> Result<(f64, f64)> {
    let ev = checked_real_spectrum(m, SPECTRUM_IMAG_TOL)?;
    Ok((max_row_sum(m), ev.first().copied().unwrap_or(0.0)))
}

/// Hessian of `log f(z^alpha)` at the all-ones point, from marginals.
pub fn flc_hessian(dist: &Distribution, alpha: f64) -> DMatrix<f64> {
    let n = dist.ground_size();
    let p = dist.marginals();
    let pp = dist.pair_marginals();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            alpha * (alpha - 1.0) * p[i] - alpha * alpha * p[i] * p[i]
        } else {
            alpha * alpha * (pp[i * n + j] - p[i] * p[j])
        }
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FlcCheck {
    pub alpha: f64,
    /// Most positive Hessian eigenvalue.
    pub hessian_max_eigenvalue: f64,
    pub hessian_negative_semidefinite: bool,
    pub cor_max_eigenvalue: f64,
    /// `lambda_max(psi_cor) <= 1 / alpha`.
    pub cor_bound_holds: bool,
}

impl FlcCheck {
    pub fn agrees(&self) -> bool {
        self.hessian_negative_semidefinite == self.cor_bound_holds
    }
}

/// Decides `alpha`-fractional log-concavity at the all-ones point from the
/// Hessian, and independently from the correlation spectrum.
pub fn flc_hessian_check(dist: &Distribution, alpha: f64) -> Result<FlcCheck> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidInput(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let h = flc_hessian(dist, alpha);
    let h = (&h + h.transpose()) * 0.5;
    let top = symmetric_eigenvalues(&h).first().copied().unwrap_or(0.0);
    let cor = correlation_matrices(dist).cor_max_eigenvalue_direct()?;
    Ok(FlcCheck {
        alpha,
        hessian_max_eigenvalue: top,
        hessian_negative_semidefinite: top <= 1e-8,
        cor_max_eigenvalue: cor,
        cor_bound_holds: cor <= 1.0 / alpha + 1e-8,
    })
}

/// Homogenization of a set function on subsets of `0..n`: each `S` becomes
/// the `n`-set `S + { n + i : i not in S }`.
pub fn homogenize(n: usize, table: &[(Vec<usize>, f64)]) -> Result<ExplicitDensity> {
    let entries = table
        .iter()
        .map(|(s, w)| {
            let mut inside = vec![false; n];
            for &i in s {
                if i >= n || std::mem::replace(&mut inside[i], true) {
                    return Err(Error::InvalidInput(format!("{s:?} is not a subset of 0..{n}")));
                }
            }
            let set = (0..n).map(|i| if inside[i] { i } else { n + i }).collect();
            Ok((set, *w))
        })
        .collect::<Result<Vec<_>>>()?;
    explicit_density(2 * n, entries)
}

#[derive(Debug, Clone, Serialize)]
pub struct HomogenizationCheck {
    pub observed: Vec<f64>,
    pub predicted: Vec<f64>,
    pub max_deviation: f64,
    pub passes: bool,
}

/// Compares the correlation spectrum of a homogenized distribution with the
/// influence spectrum of the original shifted by one, padded with zeros.
/// Coordinates with degenerate marginals contribute zeros on both sides.
pub fn homogenization_spectrum_check(nu: &Distribution) -> Result<HomogenizationCheck> {
    let ground = nu.ground_size();
    if !ground.is_multiple_of(2) || nu.level() * 2 != ground {
        return Err(Error::InvalidInput("encoding mismatch: expected ground 2n at level n".into()));
    }
    let n = ground / 2;
    for s in nu.sets() {
        let mut hit = vec![false; n];
        if s.iter().any(|&x| std::mem::replace(&mut hit[x % n], true)) {
            return Err(Error::InvalidInput(format!("encoding mismatch at {s:?}")));
        }
    }
    let observed = correlation_matrices(nu).cor_spectrum();
    let p = nu.marginals()[..n].to_vec();
    let pp_full = nu.pair_marginals();
    let pp = (0..n * n).map(|x| pp_full[(x / n) * ground + x % n]).collect();
    let original = CorrelationMatrices::from_marginals(p, pp);
    let mut predicted: Vec<f64> = original.inf_spectrum_interior().into_iter().map(|l| l + 1.0).collect();
    predicted.resize(ground, 0.0);
    predicted.sort_by(|a, b| b.total_cmp(a));
    let max_deviation = observed
        .iter()
        .zip(&predicted)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(HomogenizationCheck {
        passes: max_deviation <= 1e-7,
        observed,
        predicted,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::block_density;
    use crate::diagnostics::{distribution_of_table, enumerate_density};
    use crate::subsets::combinations;

    fn uniform(n: usize, k: usize) -> Distribution {
        distribution_of_table(n, &combinations(n, k).map(|s| (s, 1.0)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn uniform_pairs_correlation() {
        let cm = correlation_matrices(&uniform(4, 2));
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j { 0.5 } else { -1.0 / 6.0 };
                assert!((cm.psi_cor[(i, j)] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn block_density_is_tight() {
        let cm = correlation_matrices(&enumerate_density(&block_density(2, 2)).unwrap());
        assert!((cm.inf_row_sum() - 3.0).abs() < 1e-12);
        for i in 0..4 {
            for j in 0..4 {
                assert!((cm.psi_cor[(i, j)].abs() - 0.5).abs() < 1e-12);
            }
        }
        assert!((cm.cor_row_sum() - 2.0).abs() < 1e-12);
        let (rows, top) = row_norm_and_spectrum(&cm.psi_inf).unwrap();
        assert!((rows - 3.0).abs() < 1e-12);
        assert!((top - 3.0).abs() < 1e-9);
        assert!((cm.cor_spectrum()[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn point_mass_is_flat() {
        let d = distribution_of_table(4, &[(vec![1, 2], 1.0)]).unwrap();
        let cm = correlation_matrices(&d);
        assert!(cm.psi_inf.iter().all(|&x| x == 0.0));
        assert!((0..4).all(|i| cm.psi_cor[(i, i)] == 0.0));
        for alpha in [0.125, 0.5, 1.0] {
            assert!(flc_hessian_check(&d, alpha).unwrap().hessian_negative_semidefinite);
        }
    }

    #[test]
    fn zero_matrix_norms() {
        assert_eq!(row_norm_and_spectrum(&DMatrix::zeros(3, 3)).unwrap(), (0.0, 0.0));
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(matches!(row_norm_and_spectrum(&rot), Err(Error::NonRealSpectrum(_))));
    }

    #[test]
    fn flc_examples() {
        let linear = uniform(5, 1);
        let c = flc_hessian_check(&linear, 1.0).unwrap();
        assert!(c.hessian_negative_semidefinite && c.agrees());
        let blocks = enumerate_density(&block_density(2, 2)).unwrap();
        let half = flc_hessian_check(&blocks, 0.5).unwrap();
        assert!(half.hessian_negative_semidefinite && half.agrees());
        let one = flc_hessian_check(&blocks, 1.0).unwrap();
        assert!(!one.hessian_negative_semidefinite && one.agrees());
        assert!(flc_hessian_check(&blocks, 0.0).is_err());
    }

    #[test]
    fn hessian_entries() {
        let d = uniform(4, 2);
        let h = flc_hessian(&d, 0.5);
        assert!((h[(0, 0)] - (0.5 * -0.5 * 0.5 - 0.25 * 0.25)).abs() < 1e-12);
        assert!((h[(0, 1)] - 0.25 * (1.0 / 6.0 - 0.25)).abs() < 1e-12);
    }

    #[test]
    fn homogenization_examples() {
        let one = homogenize(1, &[(vec![], 1.0), (vec![0], 1.0)]).unwrap();
        let c = homogenization_spectrum_check(&enumerate_density(&one).unwrap()).unwrap();
        assert!(c.passes);
        assert!((c.observed[0] - 1.0).abs() < 1e-12 && c.observed[1].abs() < 1e-12);

        let linear = homogenize(2, &[(vec![0], 1.0), (vec![1], 1.0)]).unwrap();
        let c = homogenization_spectrum_check(&enumerate_density(&linear).unwrap()).unwrap();
        assert!(c.passes);
        assert!((c.observed[0] - 2.0).abs() < 1e-12);

        let empty = homogenize(3, &[(vec![], 1.0)]).unwrap();
        let c = homogenization_spectrum_check(&enumerate_density(&empty).unwrap()).unwrap();
        assert!(c.passes);
        assert!(c.observed.iter().all(|x| x.abs() < 1e-12));

        let bad = distribution_of_table(4, &[(vec![0, 2], 1.0)]).unwrap();
        assert!(homogenization_spectrum_check(&bad).is_err());
    }
}
