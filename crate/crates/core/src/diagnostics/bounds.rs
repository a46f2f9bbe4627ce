use super::Distribution;
use crate::error::{Error, Result};
use crate::subsets::complement;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct EntropyCheck {
    pub entropy: f64,
    pub bound: f64,
    pub slack: f64,
    pub passes: bool,
}

/// `H(mu) >= alpha * sum_i P[i] log(1 / P[i])`.
pub fn entropy_bound_check(dist: &Distribution, alpha: f64) -> EntropyCheck {
    let entropy = dist.entropy();
    let bound = alpha
        * dist
            .marginals()
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.ln())
            .sum::<f64>();
    EntropyCheck {
        entropy,
        bound,
        slack: entropy - bound,
        passes: entropy >= bound - 1e-9,
    }
}

pub const FW_MAX_ITERATIONS: usize = 500;
pub const FW_GAP_TOL: f64 = 1e-6;
pub const MAX_FAMILY_SIZE: usize = 100_000;

/// Bracket `(lower, upper)` for `log |F|` from maximal marginal entropies.
#[derive(Debug, Clone, Serialize)]
pub struct SupportBracket {
    pub lower: f64,
    pub upper: f64,
    /// Best entropy found over the hull of `F`, and its duality gap.
    pub beta: f64,
    pub beta_gap: f64,
    /// Same for the family of complements.
    pub beta_star: f64,
    pub beta_star_gap: f64,
    pub converged: bool,
}

impl SupportBracket {
    pub fn contains(&self, x: f64) -> bool {
        self.lower - 1e-12 <= x && x <= self.upper + 1e-12
    }
}

fn entropy_of(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|x| x * x.ln()).sum::<f64>()
}

/// Frank-Wolfe maximization of `-sum p ln p` over the convex hull of the
/// indicator vectors of `family`. Returns the best value and the final
/// duality gap (an upper bound on the remaining suboptimality).
fn max_entropy(n: usize, family: &[Vec<usize>]) -> (f64, f64, bool) {
    let mut p = vec![0.0; n];
    let w = 1.0 / family.len() as f64;
    for s in family {
        for &i in s {
            p[i] += w;
        }
    }
    let mut gap = f64::INFINITY;
    for _ in 0..FW_MAX_ITERATIONS {
        let grad: Vec<f64> = p.iter().map(|&x| if x > 0.0 { -x.ln() - 1.0 } else { f64::INFINITY }).collect();
        let (best, score) = family
            .iter()
            .map(|s| (s, s.iter().map(|&i| grad[i]).sum::<f64>()))
            .fold((&family[0], f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        let current: f64 = p.iter().zip(&grad).filter(|(&x, _)| x > 0.0).map(|(x, g)| x * g).sum();
        gap = (score - current).max(0.0);
        if gap < FW_GAP_TOL {
            return (entropy_of(&p), gap, true);
        }
        let mut target = vec![0.0; n];
        for &i in best {
            target[i] = 1.0;
        }
        let slope = |t: f64| -> f64 {
            p.iter()
                .zip(&target)
                .map(|(&a, &b)| {
                    let q = a + t * (b - a);
                    if b == a {
                        0.0
                    } else if q <= 0.0 {
                        f64::NEG_INFINITY
                    } else {
                        (b - a) * (-q.ln() - 1.0)
                    }
                })
                .sum()
        };
        let step = if slope(1.0) >= 0.0 {
            1.0
        } else {
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if slope(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        for (a, b) in p.iter_mut().zip(&target) {
            *a += step * (b - *a);
        }
    }
    (entropy_of(&p), gap, false)
}

/// Brackets `log |F|` for a family of `k`-subsets of `0..n`:
/// `upper = beta + beta*` (always valid) and
/// `lower = alpha / 2 * (beta + beta*)` (valid under `alpha`-fractional
/// log-concavity). Optimization error is charged against the bracket, so
/// an unconverged run only widens it.
pub fn support_log_estimate(n: usize, family: &[Vec<usize>], alpha: f64) -> Result<SupportBracket> {
    if family.is_empty() {
        return Err(Error::EmptySupport);
    }
    if family.len() > MAX_FAMILY_SIZE {
        return Err(Error::TooLarge(format!("{} sets (limit {MAX_FAMILY_SIZE})", family.len())));
    }
    if family.iter().flatten().any(|&i| i >= n) {
        return Err(Error::InvalidInput(format!("family is not over 0..{n}")));
    }
    let complements: Vec<Vec<usize>> = family.iter().map(|s| complement(n, s)).collect();
    let (beta, beta_gap, c1) = max_entropy(n, family);
    let (beta_star, beta_star_gap, c2) = max_entropy(n, &complements);
    Ok(SupportBracket {
        lower: 0.5 * alpha * (beta + beta_star),
        upper: beta + beta_gap + beta_star + beta_star_gap,
        beta,
        beta_gap,
        beta_star,
        beta_star_gap,
        converged: c1 && c2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::distribution_of_table;
    use crate::subsets::combinations;

    #[test]
    fn entropy_examples() {
        let d = distribution_of_table(6, &(0..6).map(|i| (vec![i], 1.0)).collect::<Vec<_>>()).unwrap();
        let c = entropy_bound_check(&d, 0.25);
        assert!(c.passes);
        assert!((c.slack - 0.75 * 6f64.ln()).abs() < 1e-12);
        let point = distribution_of_table(6, &[(vec![1, 4], 2.0)]).unwrap();
        let c = entropy_bound_check(&point, 1.0);
        assert!(c.passes && c.slack.abs() < 1e-12);
    }

    #[test]
    fn single_set_bracket() {
        let b = support_log_estimate(4, &[vec![0, 3]], 0.5).unwrap();
        assert!(b.beta.abs() < 1e-12 && b.beta_star.abs() < 1e-12);
        assert!(b.lower.abs() < 1e-12 && b.upper.abs() < 1e-9);
        assert!(b.contains(0.0));
    }

    #[test]
    fn two_singletons() {
        let b = support_log_estimate(2, &[vec![0], vec![1]], 0.5).unwrap();
        assert!((b.beta - 2f64.ln()).abs() < 1e-9);
        assert!((b.beta_star - 2f64.ln()).abs() < 1e-9);
        assert!(b.contains(2f64.ln()));
    }

    #[test]
    fn uniform_family() {
        let fam: Vec<_> = combinations(6, 3).collect();
        let b = support_log_estimate(6, &fam, 1.0).unwrap();
        assert!(b.contains((fam.len() as f64).ln()), "{b:?}");
        assert!((b.beta - 6.0 * 0.5 * 2f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_families() {
        assert!(support_log_estimate(3, &[], 0.5).is_err());
        assert!(support_log_estimate(3, &[vec![3]], 0.5).is_err());
    }
}
