//! Planar graphs carried together with a combinatorial embedding.
//!
//! A graph is stored as an edge list plus a rotation system: for every vertex
//! the clockwise cyclic order of its incident edges. The embedding is part of
//! the input and is validated through Euler's formula on every connected
//! component, so anything accepted here is a genus-zero embedding.

mod faces;
mod families;
mod io;
mod matching;

pub use faces::{faces, Dart, FaceSet};
pub use families::{generate, Family};
pub use io::{parse_graph, GraphDocument};
pub use matching::{enumerate_matchings, find_matching_of_size, maximum_matching, Matching};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Planar graph with edge weights `w`, vertex weights `lambda` and a
/// clockwise rotation system.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedGraph {
    n: usize,
    edges: Vec<Edge>,
    lambda: Vec<f64>,
    rotation: Vec<Vec<usize>>,
    // position of edge e in the rotation of its endpoints u and v
    rot_pos: Vec<(usize, usize)>,
}

impl EmbeddedGraph {
    /// Validate and build. Checks endpoints, loops, parallel edges, weights,
    /// the rotation lists, and the Euler characteristic of every component.
    pub fn new(
        n: usize,
        edges: Vec<Edge>,
        lambda: Vec<f64>,
        rotation: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let g = Self::build(n, edges, lambda, rotation)?;
        faces::check_euler(&g)?;
        Ok(g)
    }

    fn build(
        n: usize,
        edges: Vec<Edge>,
        lambda: Vec<f64>,
        rotation: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if lambda.len() != n {
            return Err(Error::InvalidInput(format!(
                "lambda has {} entries, expected {n}",
                lambda.len()
            )));
        }
        if rotation.len() != n {
            return Err(Error::InvalidInput(format!(
                "rotation has {} entries, expected {n}",
                rotation.len()
            )));
        }
        for (v, &l) in lambda.iter().enumerate() {
            if !l.is_finite() || l < 0.0 {
                return Err(Error::NegativeWeight(format!("lambda[{v}] = {l}")));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for (i, e) in edges.iter().enumerate() {
            if e.u >= n || e.v >= n {
                return Err(Error::InvalidInput(format!(
                    "edge {i} = ({}, {}) has an endpoint outside 0..{n}",
                    e.u, e.v
                )));
            }
            if e.u == e.v {
                return Err(Error::InvalidInput(format!("edge {i} is a self-loop at {}", e.u)));
            }
            if !e.w.is_finite() || e.w < 0.0 {
                return Err(Error::NegativeWeight(format!("edge {i} has w = {}", e.w)));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(Error::InvalidInput(format!(
                    "parallel edge {i} between {} and {}",
                    e.u, e.v
                )));
            }
        }
        let mut rot_pos = vec![(usize::MAX, usize::MAX); edges.len()];
        for (x, rot) in rotation.iter().enumerate() {
            for (p, &e) in rot.iter().enumerate() {
                let edge = edges.get(e).ok_or_else(|| {
                    Error::InvalidInput(format!("rotation of {x} names unknown edge {e}"))
                })?;
                let slot = if edge.u == x {
                    &mut rot_pos[e].0
                } else if edge.v == x {
                    &mut rot_pos[e].1
                } else {
                    return Err(Error::InvalidInput(format!(
                        "rotation of {x} names edge {e}, which is not incident to it"
                    )));
                };
                if *slot != usize::MAX {
                    return Err(Error::InvalidInput(format!(
                        "rotation of {x} lists edge {e} twice"
                    )));
                }
                *slot = p;
            }
        }
        if let Some(e) = rot_pos
            .iter()
            .position(|&(a, b)| a == usize::MAX || b == usize::MAX)
        {
            return Err(Error::InvalidInput(format!(
                "edge {e} is missing from the rotation of an endpoint"
            )));
        }
        Ok(Self {
            n,
            edges,
            lambda,
            rotation,
            rot_pos,
        })
    }

    /// Graph with no edges.
    pub fn empty(n: usize, lambda: Vec<f64>) -> Result<Self> {
        Self::new(n, Vec::new(), lambda, vec![Vec::new(); n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rotation[v].len()
    }

    /// Position of edge `e` in the rotation at endpoint `x`.
    pub(crate) fn rotation_position(&self, e: usize, x: usize) -> usize {
        if self.edges[e].u == x {
            self.rot_pos[e].0
        } else {
            self.rot_pos[e].1
        }
    }

    /// `(neighbor, edge index)` pairs in clockwise order.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rotation[v]
            .iter()
            .map(move |&e| (self.edges[e].other(v), e))
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.neighbors(a).find(|&(x, _)| x == b).map(|(_, e)| e)
    }

    /// Replace every edge weight.
    pub fn with_edge_weights(mut self, mut w: impl FnMut(usize, &Edge) -> f64) -> Result<Self> {
        for i in 0..self.edges.len() {
            let value = w(i, &self.edges[i]);
            if !value.is_finite() || value < 0.0 {
                return Err(Error::NegativeWeight(format!("edge {i} has w = {value}")));
            }
            self.edges[i].w = value;
        }
        Ok(self)
    }

    pub fn with_lambda(mut self, lambda: Vec<f64>) -> Result<Self> {
        if lambda.len() != self.n {
            return Err(Error::InvalidInput("lambda length mismatch".into()));
        }
        if let Some(v) = lambda.iter().position(|l| !l.is_finite() || *l < 0.0) {
            return Err(Error::NegativeWeight(format!("lambda[{v}] = {}", lambda[v])));
        }
        self.lambda = lambda;
        Ok(self)
    }

    /// Connected components as sorted vertex lists, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut i = 0;
            while i < members.len() {
                let x = members[i];
                i += 1;
                for (y, _) in self.neighbors(x) {
                    if comp[y] == usize::MAX {
                        comp[y] = id;
                        members.push(y);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Induced subgraph on `keep`, relabeled to `0..keep.len()` in ascending
    /// order of the original labels. Rotations are inherited by deleting the
    /// removed edges, which keeps the embedding planar.
    pub fn induce(&self, keep: &[usize]) -> EmbeddedGraph {
        self.induce_with_map(keep).0
    }

    /// As [`induce`](Self::induce), also returning the original label of each
    /// new vertex.
    pub fn induce_with_map(&self, keep: &[usize]) -> (EmbeddedGraph, Vec<usize>) {
        let mut kept: Vec<usize> = keep.iter().copied().filter(|&v| v < self.n).collect();
        kept.sort_unstable();
        kept.dedup();
        let mut new_id = vec![usize::MAX; self.n];
        for (i, &v) in kept.iter().enumerate() {
            new_id[v] = i;
        }
        let mut edge_map = vec![usize::MAX; self.edges.len()];
        let mut edges = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if new_id[e.u] != usize::MAX && new_id[e.v] != usize::MAX {
                edge_map[i] = edges.len();
                edges.push(Edge {
                    u: new_id[e.u],
                    v: new_id[e.v],
                    w: e.w,
                });
            }
        }
        let rotation: Vec<Vec<usize>> = kept
            .iter()
            .map(|&v| {
                self.rotation[v]
                    .iter()
                    .filter_map(|&e| (edge_map[e] != usize::MAX).then_some(edge_map[e]))
                    .collect()
            })
            .collect();
        let lambda = kept.iter().map(|&v| self.lambda[v]).collect();
        let g = Self::build(kept.len(), edges, lambda, rotation)
            .expect("induced subgraph of a valid graph is valid");
        (g, kept)
    }
}
