//! Weighted perfect-matching sums on embedded planar graphs.
//!
//! A Pfaffian (Kasteleyn) orientation makes every inner face carry an odd
//! number of edges oriented along its boundary walk. The signed adjacency
//! matrix of such an orientation is skew-symmetric and its determinant is the
//! square of the weighted perfect-matching sum. Disconnected graphs factor
//! over components, and a component with no perfect matching contributes an
//! exact zero (decided combinatorially, not from a floating-point pivot).

use crate::error::{Error, Result};
use crate::graph::{faces, maximum_matching, Dart, EmbeddedGraph};
use crate::linalg::{det_exact, exact_sqrt, lu_log_det};
use num::{BigRational, One, ToPrimitive, Zero};
use std::collections::VecDeque;

/// Largest component handled by the exact rational backend.
pub const EXACT_BACKEND_MAX_N: usize = 30;

/// Pivot ratio above which the float determinant is not trusted.
const MAX_PIVOT_RATIO: f64 = 1e12;

/// Direction bit per edge: `true` orients `u -> v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PfaffianOrientation {
    forward: Vec<bool>,
}

impl PfaffianOrientation {
    pub fn is_forward(&self, e: usize) -> bool {
        self.forward[e]
    }

    /// Kasteleyn condition: every face except the outer one has an odd
    /// number of edges oriented along its boundary walk.
    pub fn satisfies_kasteleyn(&self, g: &EmbeddedGraph) -> bool {
        let Ok(fs) = faces(g) else { return false };
        fs.faces.iter().enumerate().all(|(i, f)| {
            i == fs.outer_face_index || f.iter().filter(|d| self.co_directed(**d)).count() % 2 == 1
        })
    }

    fn co_directed(&self, d: Dart) -> bool {
        self.forward[d.edge] == d.forward
    }
}

/// Orient a connected embedded graph so that every inner face is oddly
/// oriented. The spanning tree is grown by BFS from vertex 0.
pub fn pfaffian_orient(g: &EmbeddedGraph) -> Result<PfaffianOrientation> {
    pfaffian_orient_from(g, 0)
}

/// As [`pfaffian_orient`], growing the spanning tree from `root`.
pub fn pfaffian_orient_from(g: &EmbeddedGraph, root: usize) -> Result<PfaffianOrientation> {
    let comps = g.components().len();
    if comps > 1 {
        return Err(Error::Disconnected(comps));
    }
    let m = g.edge_count();
    let mut forward = vec![true; m];
    if m == 0 {
        return Ok(PfaffianOrientation { forward });
    }
    let fs = faces(g)?;

    // spanning tree edges keep their stored direction
    let mut in_tree = vec![false; m];
    let mut seen = vec![false; g.n()];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        for (y, e) in g.neighbors(x) {
            if !seen[y] {
                seen[y] = true;
                in_tree[e] = true;
                queue.push_back(y);
            }
        }
    }

    // the remaining edges form a spanning tree of the dual; peel it from the
    // leaves towards the outer face, fixing each face's parity with its last edge
    let mut oriented = in_tree.clone();
    let mut open = vec![0usize; fs.faces.len()];
    for (i, f) in fs.faces.iter().enumerate() {
        open[i] = f.iter().filter(|d| !oriented[d.edge]).count();
    }
    let mut ready: VecDeque<usize> = (0..fs.faces.len())
        .filter(|&i| i != fs.outer_face_index && open[i] == 1)
        .collect();
    while let Some(fi) = ready.pop_front() {
        if open[fi] != 1 {
            continue;
        }
        let face = &fs.faces[fi];
        let last = *face.iter().find(|d| !oriented[d.edge]).expect("one open edge");
        let odd = face
            .iter()
            .filter(|d| oriented[d.edge] && forward[d.edge] == d.forward)
            .count()
            % 2
            == 1;
        forward[last.edge] = if odd { !last.forward } else { last.forward };
        oriented[last.edge] = true;
        open[fi] = 0;
        let twin = Dart {
            edge: last.edge,
            forward: !last.forward,
        };
        let other = fs.face_of(twin);
        open[other] -= 1;
        if other != fs.outer_face_index && open[other] == 1 {
            ready.push_back(other);
        }
    }
    if oriented.iter().any(|o| !o) {
        return Err(Error::Numerical(
            "dual cotree peeling left edges unoriented".into(),
        ));
    }
    let orientation = PfaffianOrientation { forward };
    debug_assert!(orientation.satisfies_kasteleyn(g));
    Ok(orientation)
}

/// Skew-symmetric signed adjacency matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewKernel {
    pub n: usize,
    pub data: Vec<f64>,
}

impl SkewKernel {
    pub fn new(g: &EmbeddedGraph, orientation: &PfaffianOrientation) -> Self {
        let n = g.n();
        let mut data = vec![0.0; n * n];
        for (i, e) in g.edges().iter().enumerate() {
            let (a, b) = if orientation.is_forward(i) { (e.u, e.v) } else { (e.v, e.u) };
            data[a * n + b] = e.w;
            data[b * n + a] = -e.w;
        }
        Self { n, data }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == -self.get(j, i)))
    }

    pub fn det(&self) -> f64 {
        crate::linalg::det(&self.data, self.n)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Weighted perfect-matching sum. Overflows to `inf` for very large values;
/// use [`log_pm_partition_function`] when that matters.
pub fn pm_partition_function(g: &EmbeddedGraph) -> Result<f64> {
    Ok(log_pm_partition_function(g)?.exp())
}

/// Natural log of the weighted perfect-matching sum (`-inf` when there is no
/// perfect matching). The empty graph has sum one.
pub fn log_pm_partition_function(g: &EmbeddedGraph) -> Result<f64> {
    if g.n() % 2 == 1 {
        return Ok(f64::NEG_INFINITY);
    }
    let comps = g.components();
    if comps.len() == 1 {
        return log_pm_connected(g);
    }
    let mut total = 0.0;
    for c in comps {
        if c.len() % 2 == 1 {
            return Ok(f64::NEG_INFINITY);
        }
        let part = log_pm_connected(&g.induce(&c))?;
        if part == f64::NEG_INFINITY {
            return Ok(part);
        }
        total += part;
    }
    Ok(total)
}

fn log_pm_connected(g: &EmbeddedGraph) -> Result<f64> {
    let n = g.n();
    if n == 0 {
        return Ok(0.0);
    }
    if n % 2 == 1 || 2 * maximum_matching(g).len() < n {
        return Ok(f64::NEG_INFINITY);
    }
    let orientation = pfaffian_orient(g)?;
    let mut kernel = SkewKernel::new(g, &orientation);
    let ld = lu_log_det(&mut kernel.data, n);
    if ld.sign > 0.0 && ld.pivot_ratio <= MAX_PIVOT_RATIO {
        return Ok(0.5 * ld.log_abs);
    }
    if n > EXACT_BACKEND_MAX_N {
        return Err(Error::Numerical(format!(
            "ill-conditioned Kasteleyn matrix (pivot ratio {:e}, sign {}) on {n} vertices",
            ld.pivot_ratio, ld.sign
        )));
    }
    let exact = pm_connected_exact(g)?;
    Ok(rational_ln(&exact))
}

fn rational_ln(x: &BigRational) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = |b: &num::BigInt| b.bits() as i64;
    // scale into f64 range before taking logs
    let shift = (bits(x.numer()) - 1000).max(0) - (bits(x.denom()) - 1000).max(0);
    let num = x.numer() >> (bits(x.numer()) - 1000).max(0) as usize;
    let den = x.denom() >> (bits(x.denom()) - 1000).max(0) as usize;
    num.to_f64().unwrap_or(f64::INFINITY).ln() - den.to_f64().unwrap_or(f64::INFINITY).ln()
        + shift as f64 * std::f64::consts::LN_2
}

fn to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite weight")
}

/// Exact weighted perfect-matching sum, treating every `f64` weight as the
/// rational it represents. Components are limited to
/// [`EXACT_BACKEND_MAX_N`] vertices.
pub fn pm_partition_function_exact(g: &EmbeddedGraph) -> Result<BigRational> {
    let mut total = BigRational::one();
    for c in g.components() {
        if c.len() % 2 == 1 {
            return Ok(BigRational::zero());
        }
        let part = pm_connected_exact(&g.induce(&c))?;
        if part.is_zero() {
            return Ok(part);
        }
        total *= part;
    }
    Ok(total)
}

fn pm_connected_exact(g: &EmbeddedGraph) -> Result<BigRational> {
    let n = g.n();
    if n > EXACT_BACKEND_MAX_N {
        return Err(Error::TooLarge(format!(
            "exact backend is limited to {EXACT_BACKEND_MAX_N} vertices per component, got {n}"
        )));
    }
    if n == 0 {
        return Ok(BigRational::one());
    }
    if n % 2 == 1 {
        return Ok(BigRational::zero());
    }
    let orientation = pfaffian_orient(g)?;
    let kernel = SkewKernel::new(g, &orientation);
    let entries = kernel.data.iter().map(|&x| to_rational(x)).collect();
    let d = det_exact(entries, n);
    exact_sqrt(&d).ok_or_else(|| {
        Error::Numerical("Kasteleyn determinant is not a rational square".into())
    })
}

/// `prod_{v in S} lambda(v) * PM(G[S^c])`: the total weight of matchings
/// whose monomer set is exactly `S`.
pub fn monomer_weight(g: &EmbeddedGraph, monomers: &[usize]) -> Result<f64> {
    Ok(log_monomer_weight(g, monomers)?.exp())
}

/// Natural log of [`monomer_weight`].
pub fn log_monomer_weight(g: &EmbeddedGraph, monomers: &[usize]) -> Result<f64> {
    if (g.n() - monomers.len()) % 2 == 1 {
        return Ok(f64::NEG_INFINITY);
    }
    let mut acc = 0.0;
    for &v in monomers {
        let l = g.lambda()[v];
        if l == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        acc += l.ln();
    }
    let rest = crate::subsets::complement(g.n(), monomers);
    if rest.is_empty() {
        return Ok(acc);
    }
    Ok(acc + log_pm_partition_function(&g.induce(&rest))?)
}

/// Maximum graph size for [`brute_force_pm`].
pub const BRUTE_FORCE_MAX_N: usize = 16;

/// Weighted perfect-matching sum by direct recursion.
pub fn brute_force_pm(g: &EmbeddedGraph) -> Result<f64> {
    brute_force_generic(g, |w| w)
}

/// Exact version of [`brute_force_pm`] over the rationals.
pub fn brute_force_pm_exact(g: &EmbeddedGraph) -> Result<BigRational> {
    brute_force_generic(g, to_rational)
}

fn brute_force_generic<T>(g: &EmbeddedGraph, conv: impl Fn(f64) -> T) -> Result<T>
where
    T: Clone + Zero + One + std::ops::Mul<Output = T>,
{
    let n = g.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge(format!(
            "brute force is limited to {BRUTE_FORCE_MAX_N} vertices, got {n}"
        )));
    }
    let weights: Vec<T> = g.edges().iter().map(|e| conv(e.w)).collect();
    fn rec<T: Clone + Zero + One + std::ops::Mul<Output = T>>(
        g: &EmbeddedGraph,
        w: &[T],
        mask: u32,
    ) -> T {
        if mask == 0 {
            return T::one();
        }
        let v = mask.trailing_zeros() as usize;
        let mut total = T::zero();
        for (u, e) in g.neighbors(v) {
            if mask & (1 << u) != 0 {
                let sub = rec(g, w, mask & !(1 << u) & !(1 << v));
                total = total + w[e].clone() * sub;
            }
        }
        total
    }
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    Ok(rec(g, &weights, full))
}
