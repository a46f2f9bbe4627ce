//! Edge lengths of the Newton polytope of a 0/1 point family.
//!
//! A pair `(p, q)` spans an edge exactly when the midpoint of `p` and `q` has
//! no convex representation that puts weight on any other point. Only points
//! agreeing with `p` wherever `p` and `q` agree can take part in such a
//! representation (they span a face containing the pair), so each test is a
//! small linear program on the differing coordinates, solved by a dense
//! simplex in floating point with an exact rational re-check near zero.

use crate::error::{Error, Result};
use num::{BigRational, Signed, Zero};
use serde::Serialize;

pub const MAX_POLYTOPE_POINTS: usize = 2000;

/// Threshold below which the floating point optimum is re-solved exactly.
const AMBIGUOUS: f64 = 1e-7;

trait Scalar: Clone {
    fn from_f64(x: f64) -> Self;
    fn zero() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn positive(&self) -> bool;
    fn less(&self, o: &Self) -> bool;
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn zero() -> Self {
        0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn positive(&self) -> bool {
        *self > 1e-11
    }
    fn less(&self, o: &Self) -> bool {
        *self < o - 1e-12
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite")
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn positive(&self) -> bool {
        self.is_positive()
    }
    fn less(&self, o: &Self) -> bool {
        self < o
    }
    fn to_f64(&self) -> f64 {
        num::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Dense tableau for `max c.x` subject to `A x = b`, `x >= 0`, `b >= 0`.
struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    reduced: Vec<T>,
    value: T,
}

impl<T: Scalar> Tableau<T> {
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x = x.div(&piv);
        }
        self.rhs[r] = self.rhs[r].div(&piv);
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c].clone();
            if !f.positive() && !f.less(&T::zero()) {
                continue;
            }
            for (x, y) in self.rows[i].iter_mut().zip(&pivot_row) {
                *x = x.sub(&f.mul(y));
            }
            self.rhs[i] = self.rhs[i].sub(&f.mul(&pivot_rhs));
        }
        let f = self.reduced[c].clone();
        for (x, y) in self.reduced.iter_mut().zip(&pivot_row) {
            *x = x.sub(&f.mul(y));
        }
        self.value = self.value.add(&f.mul(&pivot_rhs));
        self.basis[r] = c;
    }

    /// Bland's rule over the columns `< limit`.
    fn optimize(&mut self, limit: usize) -> Result<()> {
        for _ in 0..100_000 {
            let Some(c) = (0..limit).find(|&j| self.reduced[j].positive()) else {
                return Ok(());
            };
            let mut best: Option<(usize, T)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][c].positive() {
                    let ratio = self.rhs[i].div(&self.rows[i][c]);
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio.less(br) || (!br.less(&ratio) && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return Err(Error::Numerical("unbounded linear program".into())),
            }
        }
        Err(Error::Numerical("simplex iteration limit".into()))
    }
}

/// Maximum total weight on `others` in a convex representation of the
/// midpoint, with points given on the differing coordinates.
fn midpoint_leak<T: Scalar>(p: &[u8], q: &[u8], others: &[Vec<u8>]) -> Result<T> {
    let m = p.len() + 1;
    let mut points: Vec<&[u8]> = vec![p, q];
    points.extend(others.iter().map(|x| x.as_slice()));
    let cols = points.len();
    let half = T::from_f64(0.5);
    let one = T::from_f64(1.0);
    // real columns, then one artificial per row
    let mut rows = vec![vec![T::zero(); cols + m]; m];
    for (j, x) in points.iter().enumerate() {
        for i in 0..p.len() {
            if x[i] == 1 {
                rows[i][j] = one.clone();
            }
        }
        rows[m - 1][j] = one.clone();
    }
    for (i, row) in rows.iter_mut().enumerate() {
        row[cols + i] = one.clone();
    }
    let mut rhs = vec![half.clone(); m];
    rhs[m - 1] = one.clone();
    // phase one: maximize -sum(artificials)
    let mut reduced = vec![T::zero(); cols + m];
    for j in 0..cols {
        reduced[j] = rows.iter().fold(T::zero(), |acc, r| acc.add(&r[j]));
    }
    let value = rhs.iter().fold(T::zero(), |acc, b| acc.sub(b));
    let mut t = Tableau { rows, rhs, basis: (cols..cols + m).collect(), reduced, value };
    t.optimize(cols)?;
    if t.value.less(&T::zero()) && t.value.to_f64() < -1e-9 {
        return Err(Error::Numerical("midpoint representation infeasible".into()));
    }
    for r in 0..m {
        if t.basis[r] >= cols {
            if let Some(c) = (0..cols).find(|&j| t.rows[r][j].positive() || t.rows[r][j].less(&T::zero())) {
                t.pivot(r, c);
            }
        }
    }
    // phase two: maximize the weight outside {p, q}
    let cost = |j: usize| if (2..cols).contains(&j) { one.clone() } else { T::zero() };
    t.value = T::zero();
    for r in 0..m {
        t.value = t.value.add(&cost(t.basis[r]).mul(&t.rhs[r]));
    }
    for j in 0..cols + m {
        let mut rj = cost(j);
        for r in 0..m {
            rj = rj.sub(&cost(t.basis[r]).mul(&t.rows[r][j]));
        }
        t.reduced[j] = if j >= cols { T::zero() } else { rj };
    }
    t.optimize(cols)?;
    Ok(t.value)
}

#[derive(Debug, Clone, Serialize)]
pub struct EdgeReport {
    /// Largest l1 length of a certified edge (0 for a single point).
    pub max_length: usize,
    pub edge: Option<(Vec<usize>, Vec<usize>)>,
    pub pairs_tested: usize,
    pub exact_rechecks: usize,
}

/// Longest edge of the convex hull of the indicator vectors of `family`.
/// Pairs are examined from the longest down; the first certified edge wins.
pub fn newton_polytope_max_edge(n: usize, family: &[Vec<usize>]) -> Result<EdgeReport> {
    if family.len() > MAX_POLYTOPE_POINTS {
        return Err(Error::TooLarge(format!("{} points (limit {MAX_POLYTOPE_POINTS})", family.len())));
    }
    let mut points: Vec<Vec<u8>> = family
        .iter()
        .map(|s| {
            let mut v = vec![0u8; n];
            for &i in s {
                if i >= n {
                    return Err(Error::InvalidInput(format!("{s:?} is not a subset of 0..{n}")));
                }
                v[i] = 1;
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    points.sort();
    points.dedup();
    let mut report = EdgeReport { max_length: 0, edge: None, pairs_tested: 0, exact_rechecks: 0 };
    let dist = |a: &[u8], b: &[u8]| a.iter().zip(b).filter(|(x, y)| x != y).count();
    for len in (1..=n).rev() {
        for a in 0..points.len() {
            for b in a + 1..points.len() {
                let (p, q) = (&points[a], &points[b]);
                if dist(p, q) != len {
                    continue;
                }
                report.pairs_tested += 1;
                let differ: Vec<usize> = (0..n).filter(|&i| p[i] != q[i]).collect();
                let project = |x: &Vec<u8>| differ.iter().map(|&i| x[i]).collect::<Vec<u8>>();
                let others: Vec<Vec<u8>> = points
                    .iter()
                    .enumerate()
                    .filter(|&(c, x)| c != a && c != b && (0..n).all(|i| p[i] != q[i] || x[i] == p[i]))
                    .map(|(_, x)| project(x))
                    .collect();
                let is_edge = if others.is_empty() {
                    true
                } else {
                    let (pp, qq) = (project(p), project(q));
                    match midpoint_leak::<f64>(&pp, &qq, &others) {
                        Ok(v) if v > AMBIGUOUS => false,
                        _ => {
                            report.exact_rechecks += 1;
                            !midpoint_leak::<BigRational>(&pp, &qq, &others)?.is_positive()
                        }
                    }
                };
                if is_edge {
                    let ones = |x: &[u8]| (0..n).filter(|&i| x[i] == 1).collect::<Vec<_>>();
                    report.max_length = len;
                    report.edge = Some((ones(p), ones(q)));
                    return Ok(report);
                }
            }
        }
    }
    Ok(report)
}
