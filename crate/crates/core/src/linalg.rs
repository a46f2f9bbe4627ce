//! Dense linear algebra used by the oracles and diagnostics.
//!
//! Determinants are computed here directly (partial-pivoted LU in floating
//! point, Bareiss elimination over rationals); eigenvalue problems go through
//! `nalgebra`.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num::{BigRational, Signed, Zero};

/// Result of an LU factorization: `det = sign * exp(log_abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    pub sign: f64,
    pub log_abs: f64,
    /// `max |pivot| / min |pivot|`, a cheap conditioning indicator.
    pub pivot_ratio: f64,
}

impl LogDet {
    pub fn value(&self) -> f64 {
        self.sign * self.log_abs.exp()
    }
}

/// Log-determinant of a row-major `n x n` matrix, factorized in place.
pub fn lu_log_det(a: &mut [f64], n: usize) -> LogDet {
    debug_assert_eq!(a.len(), n * n);
    let mut sign = 1.0;
    let mut log_abs = 0.0;
    let (mut pmax, mut pmin) = (0.0f64, f64::INFINITY);
    for col in 0..n {
        let (piv, best) = (col..n)
            .map(|r| (r, a[r * n + col].abs()))
            .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best == 0.0 {
            return LogDet {
                sign: 0.0,
                log_abs: f64::NEG_INFINITY,
                pivot_ratio: f64::INFINITY,
            };
        }
        if piv != col {
            for j in 0..n {
                a.swap(piv * n + j, col * n + j);
            }
            sign = -sign;
        }
        let p = a[col * n + col];
        if p < 0.0 {
            sign = -sign;
        }
        log_abs += p.abs().ln();
        pmax = pmax.max(p.abs());
        pmin = pmin.min(p.abs());
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f != 0.0 {
                for j in col + 1..n {
                    a[r * n + j] -= f * a[col * n + j];
                }
            }
        }
    }
    LogDet {
        sign,
        log_abs,
        pivot_ratio: if n == 0 { 1.0 } else { pmax / pmin },
    }
}

pub fn det(a: &[f64], n: usize) -> f64 {
    lu_log_det(&mut a.to_vec(), n).value()
}

/// Exact determinant by Bareiss fraction-free elimination.
pub fn det_exact(mut a: Vec<BigRational>, n: usize) -> BigRational {
    assert_eq!(a.len(), n * n);
    let mut sign_flip = false;
    let mut prev = BigRational::from_integer(1.into());
    for k in 0..n {
        if a[k * n + k].is_zero() {
            match (k + 1..n).find(|&r| !a[r * n + k].is_zero()) {
                Some(r) => {
                    for j in 0..n {
                        a.swap(r * n + j, k * n + j);
                    }
                    sign_flip = !sign_flip;
                }
                None => return BigRational::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j]) / &prev;
                a[i * n + j] = v;
            }
        }
        prev = a[k * n + k].clone();
    }
    let d = if n == 0 {
        BigRational::from_integer(1.into())
    } else {
        a[n * n - 1].clone()
    };
    if sign_flip {
        -d
    } else {
        d
    }
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn exact_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let (num, den) = (x.numer(), x.denom());
    let (rn, rd) = (num.sqrt(), den.sqrt());
    (&rn * &rn == *num && &rd * &rd == *den).then(|| BigRational::new(rn, rd))
}

/// Eigenvalues of a symmetric matrix, descending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Eigenvalues of a general real matrix that is expected to have a real
/// spectrum (Hessenberg reduction plus shifted QR). Returns the real parts in
/// descending order and the largest absolute imaginary part seen.
pub fn real_spectrum(m: &DMatrix<f64>) -> (Vec<f64>, f64) {
    if m.nrows() == 0 {
        return (Vec::new(), 0.0);
    }
    let ev = m.clone().complex_eigenvalues();
    let max_imag = ev.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    let mut re: Vec<f64> = ev.iter().map(|c| c.re).collect();
    re.sort_by(|a, b| b.total_cmp(a));
    (re, max_imag)
}

/// Real spectrum, failing when an imaginary part exceeds `tol`.
pub fn checked_real_spectrum(m: &DMatrix<f64>, tol: f64) -> Result<Vec<f64>> {
    let (re, imag) = real_spectrum(m);
    if imag > tol {
        return Err(Error::NonRealSpectrum(imag));
    }
    Ok(re)
}
