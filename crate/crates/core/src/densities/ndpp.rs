use super::Density;
use crate::error::{Error, Result};
use crate::linalg::{lu_log_det, symmetric_eigenvalues};
use nalgebra::DMatrix;
use serde::Deserialize;
use std::sync::Arc;

/// Relative floor below which a principal minor is treated as zero.
pub const MINOR_CLAMP: f64 = 1e-9;

/// Dense `n x n` kernel whose symmetric part is positive semidefinite.
#[derive(Debug, Clone)]
pub struct NdppKernel {
    n: usize,
    data: Vec<f64>,
    symmetric_part: DMatrix<f64>,
    max_abs: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum KernelDocument {
    Rows(Vec<Vec<f64>>),
    Object { l: Vec<Vec<f64>> },
}

impl NdppKernel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("kernel must be square".into()));
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("kernel entries must be finite".into()));
        }
        let max_abs = data.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let symmetric_part = DMatrix::from_fn(n, n, |i, j| 0.5 * (data[i * n + j] + data[j * n + i]));
        let norm = DMatrix::from_row_slice(n, n, &data).norm();
        if let Some(&min) = symmetric_eigenvalues(&symmetric_part).last() {
            if min < -1e-9 * norm {
                return Err(Error::NotPsd { min_eigenvalue: min });
            }
        }
        Ok(NdppKernel { n, data, symmetric_part, max_abs })
    }

    /// `n` lines of `n` comma-separated numbers, no header.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let row = record
                .iter()
                .map(|x| {
                    x.parse::<f64>()
                        .map_err(|e| Error::InvalidInput(format!("kernel entry {x:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::new(rows)
    }

    /// Either a bare array of rows or `{"l": [[...], ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        match serde_json::from_str::<KernelDocument>(text)? {
            KernelDocument::Rows(rows) | KernelDocument::Object { l: rows } => Self::new(rows),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn symmetric_part(&self) -> &DMatrix<f64> {
        &self.symmetric_part
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    /// Log of the principal minor on `set`, `-inf` when it is within the
    /// clamping tolerance of zero (or negative).
    pub fn log_minor(&self, set: &[usize]) -> f64 {
        let k = set.len();
        if k == 0 {
            return 0.0;
        }
        let mut sub = Vec::with_capacity(k * k);
        for &i in set {
            for &j in set {
                sub.push(self.get(i, j));
            }
        }
        let ld = lu_log_det(&mut sub, k);
        let floor = MINOR_CLAMP.ln() + k as f64 * self.max_abs.ln();
        if ld.sign <= 0.0 || ld.log_abs <= floor {
            f64::NEG_INFINITY
        } else {
            ld.log_abs
        }
    }
}

/// `mu(S) = det(L[S, S])` on `k`-subsets.
#[derive(Debug, Clone)]
pub struct NdppDensity {
    kernel: Arc<NdppKernel>,
    k: usize,
}

impl NdppDensity {
    pub fn kernel(&self) -> &NdppKernel {
        &self.kernel
    }
}

impl Density for NdppDensity {
    fn ground_size(&self) -> usize {
        self.kernel.n
    }

    fn level(&self) -> usize {
        self.k
    }

    fn log_eval(&self, set: &[usize]) -> f64 {
        self.kernel.log_minor(set)
    }

    fn describe(&self) -> String {
        format!("ndpp(n={}, k={})", self.kernel.n, self.k)
    }
}

pub fn ndpp_density(kernel: Arc<NdppKernel>, k: usize) -> Result<NdppDensity> {
    if k > kernel.n {
        return Err(Error::InvalidInput(format!("k = {k} exceeds n = {}", kernel.n)));
    }
    Ok(NdppDensity { kernel, k })
}
