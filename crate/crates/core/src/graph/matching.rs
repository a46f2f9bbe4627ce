use super::EmbeddedGraph;
use std::collections::VecDeque;

/// A set of pairwise vertex-disjoint edges, stored as sorted edge indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Matching {
    pub edges: Vec<usize>,
}

impl Matching {
    pub fn new(mut edges: Vec<usize>) -> Self {
        edges.sort_unstable();
        Self { edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_valid(&self, g: &EmbeddedGraph) -> bool {
        let mut used = vec![false; g.n()];
        for &e in &self.edges {
            if e >= g.edge_count() {
                return false;
            }
            let edge = g.edge(e);
            if used[edge.u] || used[edge.v] {
                return false;
            }
            used[edge.u] = true;
            used[edge.v] = true;
        }
        true
    }

    /// Unmatched vertices, ascending.
    pub fn monomers(&self, g: &EmbeddedGraph) -> Vec<usize> {
        let mut covered = vec![false; g.n()];
        for &e in &self.edges {
            covered[g.edge(e).u] = true;
            covered[g.edge(e).v] = true;
        }
        (0..g.n()).filter(|&v| !covered[v]).collect()
    }

    /// Product of dimer weights times product of monomer weights.
    pub fn weight(&self, g: &EmbeddedGraph) -> f64 {
        let dimers: f64 = self.edges.iter().map(|&e| g.edge(e).w).product();
        let monomers: f64 = self.monomers(g).iter().map(|&v| g.lambda()[v]).product();
        dimers * monomers
    }

    pub fn pairs(&self, g: &EmbeddedGraph) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .map(|&e| {
                let edge = g.edge(e);
                (edge.u.min(edge.v), edge.u.max(edge.v))
            })
            .collect()
    }
}

/// Maximum-cardinality matching on the positive-weight edges. Vertices with
/// zero monomer weight are covered first whenever some matching covers them,
/// so the returned monomer set has positive weight if any does.
pub fn maximum_matching(g: &EmbeddedGraph) -> Matching {
    Blossom::new(g).run(g, usize::MAX)
}

/// A matching with exactly `m` positive-weight edges, if one exists.
pub fn find_matching_of_size(g: &EmbeddedGraph, m: usize) -> Option<Matching> {
    if 2 * m > g.n() {
        return None;
    }
    let found = Blossom::new(g).run(g, m);
    (found.len() == m).then_some(found)
}

/// Every matching built from positive-weight edges (exponential; for small
/// graphs and test oracles).
pub fn enumerate_matchings(g: &EmbeddedGraph) -> Vec<Matching> {
    fn rec(g: &EmbeddedGraph, from: usize, used: &mut [bool], cur: &mut Vec<usize>, out: &mut Vec<Matching>) {
        out.push(Matching::new(cur.clone()));
        for e in from..g.edge_count() {
            let edge = g.edge(e);
            if edge.w > 0.0 && !used[edge.u] && !used[edge.v] {
                used[edge.u] = true;
                used[edge.v] = true;
                cur.push(e);
                rec(g, e + 1, used, cur, out);
                cur.pop();
                used[edge.u] = false;
                used[edge.v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(g, 0, &mut vec![false; g.n()], &mut Vec::new(), &mut out);
    out
}

const NONE: usize = usize::MAX;

/// Edmonds' blossom algorithm, grown one augmenting path at a time.
struct Blossom {
    adj: Vec<Vec<usize>>,
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
}

impl Blossom {
    fn new(g: &EmbeddedGraph) -> Self {
        let n = g.n();
        let mut adj = vec![Vec::new(); n];
        for e in g.edges() {
            if e.w > 0.0 {
                adj[e.u].push(e.v);
                adj[e.v].push(e.u);
            }
        }
        Self {
            adj,
            mate: vec![NONE; n],
            parent: vec![NONE; n],
            base: (0..n).collect(),
            used: vec![false; n],
            in_blossom: vec![false; n],
        }
    }

    fn run(mut self, g: &EmbeddedGraph, limit: usize) -> Matching {
        let n = g.n();
        let mut order: Vec<usize> = (0..n).filter(|&v| g.lambda()[v] == 0.0).collect();
        order.extend((0..n).filter(|&v| g.lambda()[v] != 0.0));
        let mut size = 0;
        for root in order {
            if size >= limit {
                break;
            }
            if self.mate[root] != NONE {
                continue;
            }
            if let Some(end) = self.find_path(root) {
                let mut v = end;
                while v != NONE {
                    let pv = self.parent[v];
                    let ppv = self.mate[pv];
                    self.mate[v] = pv;
                    self.mate[pv] = v;
                    v = ppv;
                }
                size += 1;
            }
        }
        let mut edges = Vec::new();
        for v in 0..n {
            let u = self.mate[v];
            if u != NONE && v < u {
                edges.push(g.edge_between(v, u).expect("matched pair is an edge"));
            }
        }
        Matching::new(edges)
    }

    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.mate.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    fn find_path(&mut self, root: usize) -> Option<usize> {
        let n = self.mate.len();
        self.used.iter_mut().for_each(|x| *x = false);
        self.parent.iter_mut().for_each(|x| *x = NONE);
        for i in 0..n {
            self.base[i] = i;
        }
        self.used[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for idx in 0..self.adj[v].len() {
                let to = self.adj[v][idx];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let next = self.mate[to];
                    self.used[next] = true;
                    queue.push_back(next);
                }
            }
        }
        None
    }
}
