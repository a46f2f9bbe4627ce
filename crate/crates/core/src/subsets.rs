//! Small helpers for sorted index sets.

/// Iterator over all `k`-subsets of `0..n` in lexicographic order.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

pub fn combinations(n: usize, k: usize) -> Combinations {
    Combinations {
        n,
        current: (k <= n).then(|| (0..k).collect()),
    }
}

/// All `k`-subsets of the given (sorted) items.
pub fn combinations_of(items: &[usize], k: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    combinations(items.len(), k).map(move |idx| idx.into_iter().map(|i| items[i]).collect())
}

/// Binomial coefficient as f64 (exact below 2^53).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Merge two sorted disjoint sets.
pub fn union_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Elements of `0..n` not in the sorted set `s`.
pub fn complement(n: usize, s: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(n.saturating_sub(s.len()));
    let mut it = s.iter().peekable();
    for v in 0..n {
        if it.peek() == Some(&&v) {
            it.next();
        } else {
            out.push(v);
        }
    }
    out
}

/// Sort, and check that entries are distinct and below `n`.
pub fn normalize(mut s: Vec<usize>, n: usize) -> Option<Vec<usize>> {
    s.sort_unstable();
    if s.windows(2).any(|w| w[0] == w[1]) || s.last().is_some_and(|&x| x >= n) {
        return None;
    }
    Some(s)
}

pub fn is_subset(small: &[usize], big: &[usize]) -> bool {
    let mut j = 0;
    for &x in small {
        while j < big.len() && big[j] < x {
            j += 1;
        }
        if j == big.len() || big[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

/// `log(exp(a) + exp(b))` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

pub fn log_sum_exp(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, log_add_exp)
}
