//! Mixed directional derivatives of multiaffine homogeneous polynomials.
//!
//! Every variable `z_i` is split into one copy per direction plus a remainder
//! copy. Choosing which copy carries each variable of a monomial turns the
//! derivative into the partition function of a partition-constrained density
//! on the copies (blocks = copy classes, counts = derivative orders), with
//! the direction entries and the evaluation point as an external field. The
//! derivative is that partition function times `prod_j c_j!`.

use super::{estimate_partition_function, CountConfig, CountEstimate};
use crate::densities::{apply_external_field, partition_constrained, Density, DensityRef, ExplicitDensity, PartitionConstraint};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use std::time::Instant;

/// Homogeneous polynomial with nonnegative coefficients in which every
/// variable has degree at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiaffinePolynomial {
    n: usize,
    degree: usize,
    terms: BTreeMap<Vec<usize>, f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDocument {
    set: Vec<usize>,
    coeff: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolynomialDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    degree: usize,
    terms: Vec<TermDocument>,
}

impl MultiaffinePolynomial {
    /// `n` defaults to one past the largest variable index.
    pub fn new(n: Option<usize>, degree: usize, terms: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        let n = n.unwrap_or_else(|| terms.iter().flat_map(|t| t.0.iter()).max().map_or(0, |&m| m + 1));
        let mut table = BTreeMap::new();
        for (mut set, coeff) in terms {
            set.sort_unstable();
            if set.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidInput(format!(
                    "term {set:?} repeats a variable; only multiaffine polynomials are supported"
                )));
            }
            if set.len() != degree {
                return Err(Error::InvalidInput(format!(
                    "term {set:?} has degree {}, polynomial is declared homogeneous of degree {degree}",
                    set.len()
                )));
            }
            if set.last().is_some_and(|&m| m >= n) {
                return Err(Error::InvalidInput(format!("term {set:?} uses a variable outside 0..{n}")));
            }
            if !(coeff >= 0.0 && coeff.is_finite()) {
                return Err(Error::NegativeWeight(format!("coefficient {coeff} of {set:?}")));
            }
            if table.insert(set.clone(), coeff).is_some() {
                return Err(Error::InvalidInput(format!("duplicate term {set:?}")));
            }
        }
        Ok(MultiaffinePolynomial { n, degree, terms: table })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PolynomialDocument = serde_json::from_str(text)?;
        Self::new(doc.n, doc.degree, doc.terms.into_iter().map(|t| (t.set, t.coeff)).collect())
    }

    pub fn to_json(&self) -> String {
        let doc = PolynomialDocument {
            n: Some(self.n),
            degree: self.degree,
            terms: self.terms.iter().map(|(s, &c)| TermDocument { set: s.clone(), coeff: c }).collect(),
        };
        serde_json::to_string(&doc).expect("serializable")
    }

    /// Elementary symmetric polynomial `e_k(z_0, ..., z_{n-1})`.
    pub fn elementary(n: usize, k: usize) -> Self {
        let terms = crate::subsets::combinations(n, k).map(|s| (s, 1.0)).collect();
        Self::new(Some(n), k, terms).expect("valid terms")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, f64)> {
        self.terms.iter().map(|(s, &c)| (s, c))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(s, &c)| c * s.iter().map(|&i| x[i]).product::<f64>()).sum()
    }

    /// Coefficient table as a density on `degree`-subsets.
    pub fn to_density(&self) -> ExplicitDensity {
        crate::densities::explicit_density(self.n, self.terms.iter().map(|(s, &c)| (s.clone(), c)))
            .expect("validated terms")
    }
}

/// Directions `v^1..v^s`, orders `c_1..c_s` and evaluation point `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedDerivativeProblem {
    pub directions: Vec<Vec<f64>>,
    pub counts: Vec<usize>,
    pub point: Vec<f64>,
}

impl MixedDerivativeProblem {
    fn validate(&self, n: usize) -> Result<()> {
        if self.directions.len() != self.counts.len() {
            return Err(Error::InvalidInput(format!(
                "{} directions but {} counts",
                self.directions.len(),
                self.counts.len()
            )));
        }
        for v in self.directions.iter().chain(std::iter::once(&self.point)) {
            if v.len() != n {
                return Err(Error::InvalidInput(format!("vector of length {} for {n} variables", v.len())));
            }
            if v.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
                return Err(Error::NegativeWeight("directions and point must be nonnegative".into()));
            }
        }
        Ok(())
    }
}

/// Exact value by repeated symbolic differentiation of the coefficient table.
pub fn symbolic_mixed_derivative(f: &MultiaffinePolynomial, problem: &MixedDerivativeProblem) -> Result<f64> {
    problem.validate(f.n)?;
    let mut poly: BTreeMap<Vec<usize>, f64> = f.terms.clone();
    for (v, &c) in problem.directions.iter().zip(&problem.counts) {
        for _ in 0..c {
            let mut next: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
            for (s, a) in &poly {
                for (pos, &i) in s.iter().enumerate() {
                    if v[i] != 0.0 {
                        let mut rest = s.clone();
                        rest.remove(pos);
                        *next.entry(rest).or_default() += a * v[i];
                    }
                }
            }
            poly = next;
        }
    }
    Ok(poly
        .iter()
        .map(|(s, a)| a * s.iter().map(|&i| problem.point[i]).product::<f64>())
        .sum())
}

/// Density on variable copies: a set weighs the coefficient of the monomial
/// it projects onto, provided no variable is used twice.
#[derive(Debug)]
pub struct SplitDensity {
    ground: usize,
    degree: usize,
    variable: Vec<usize>,
    log_coeffs: HashMap<Vec<usize>, f64>,
}

impl Density for SplitDensity {
    fn ground_size(&self) -> usize {
        self.ground
    }

    fn level(&self) -> usize {
        self.degree
    }

    fn log_eval(&self, set: &[usize]) -> f64 {
        let mut vars: Vec<usize> = set.iter().map(|&e| self.variable[e]).collect();
        vars.sort_unstable();
        if vars.windows(2).any(|w| w[0] == w[1]) {
            return f64::NEG_INFINITY;
        }
        self.log_coeffs.get(&vars).copied().unwrap_or(f64::NEG_INFINITY)
    }

    fn describe(&self) -> String {
        format!("split(copies={}, degree={})", self.ground, self.degree)
    }
}

/// Assigns each variable of `term` to a copy with room left and a positive
/// weight, by augmenting paths over copy slots.
fn assign(term: &[usize], slots: &[usize], element_of: &HashMap<(usize, usize), usize>) -> Option<Vec<usize>> {
    let slot_copy: Vec<usize> = slots.iter().enumerate().flat_map(|(j, &c)| std::iter::repeat_n(j, c)).collect();
    let mut owner = vec![usize::MAX; slot_copy.len()];
    fn augment(
        t: usize,
        term: &[usize],
        slot_copy: &[usize],
        element_of: &HashMap<(usize, usize), usize>,
        owner: &mut [usize],
        seen: &mut [bool],
    ) -> bool {
        for s in 0..slot_copy.len() {
            if seen[s] || !element_of.contains_key(&(term[t], slot_copy[s])) {
                continue;
            }
            seen[s] = true;
            if owner[s] == usize::MAX || augment(owner[s], term, slot_copy, element_of, owner, seen) {
                owner[s] = t;
                return true;
            }
        }
        false
    }
    for t in 0..term.len() {
        let mut seen = vec![false; slot_copy.len()];
        if !augment(t, term, &slot_copy, element_of, &mut owner, &mut seen) {
            return None;
        }
    }
    let mut out: Vec<usize> = owner
        .iter()
        .zip(&slot_copy)
        .map(|(&t, &j)| element_of[&(term[t], j)])
        .collect();
    out.sort_unstable();
    Some(out)
}

/// Estimates `D_{v^1}^{c_1} ... D_{v^s}^{c_s} f (x)` by sampling.
pub fn estimate_mixed_derivative(
    f: &MultiaffinePolynomial,
    problem: &MixedDerivativeProblem,
    cfg: &CountConfig,
) -> Result<CountEstimate> {
    let started = Instant::now();
    problem.validate(f.n)?;
    let s = problem.counts.len();
    let ordered: usize = problem.counts.iter().sum();
    let exact_zero = || Ok(CountEstimate { elapsed_secs: started.elapsed().as_secs_f64(), ..CountEstimate::exact(0.0, cfg, started) });
    if ordered > f.degree {
        return exact_zero();
    }
    // copies 0..s follow the directions, copy s is the remainder
    let mut slots = problem.counts.clone();
    slots.push(f.degree - ordered);
    let mut variable = Vec::new();
    let mut field = Vec::new();
    let mut blocks = vec![Vec::new(); s + 1];
    let mut element_of = HashMap::new();
    for (j, block) in blocks.iter_mut().enumerate() {
        let weights = problem.directions.get(j).unwrap_or(&problem.point);
        for (i, &w) in weights.iter().enumerate() {
            if w > 0.0 {
                element_of.insert((i, j), variable.len());
                block.push(variable.len());
                variable.push(i);
                field.push(w);
            }
        }
    }
    let mut candidates: Vec<(&Vec<usize>, f64)> = f.terms().filter(|t| t.1 > 0.0).collect();
    candidates.sort_by(|a, b| b.1.total_cmp(&a.1));
    let Some(reference) = candidates.iter().find_map(|(t, _)| assign(t, &slots, &element_of)) else {
        return exact_zero();
    };
    let split: DensityRef = Arc::new(SplitDensity {
        ground: variable.len(),
        degree: f.degree,
        variable,
        log_coeffs: f.terms().filter(|t| t.1 > 0.0).map(|(t, c)| (t.clone(), c.ln())).collect(),
    });
    let weighted = apply_external_field(&split, &field)?;
    let constrained: DensityRef = partition_constrained(&weighted, &PartitionConstraint { blocks, counts: slots })?;
    let factor: f64 = problem.counts.iter().map(|&c| (1..=c).map(|x| x as f64).product::<f64>()).product();
    Ok(estimate_partition_function(&constrained, &reference, cfg)?.scaled(factor))
}
