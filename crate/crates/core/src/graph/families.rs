use super::{Edge, EmbeddedGraph};
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Built-in planar families with canonical straight-line embeddings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Path on `n >= 1` vertices.
    Path(usize),
    /// Cycle on `n >= 3` vertices.
    Cycle(usize),
    /// `rows x cols` lattice; vertex `(i, j)` has label `i * cols + j`.
    Grid(usize, usize),
    /// Hub (label 0) joined to a rim cycle of `k >= 3` vertices.
    Wheel(usize),
    /// Lattice with one diagonal `(i, j) - (i + 1, j + 1)` per cell.
    TriangulatedGrid(usize, usize),
}

impl Family {
    pub fn from_name(name: &str, params: &[usize]) -> Result<Self> {
        let need = |k: usize| -> Result<()> {
            if params.len() == k {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!(
                    "family {name} takes {k} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        Ok(match name {
            "path" => {
                need(1)?;
                Family::Path(params[0])
            }
            "cycle" => {
                need(1)?;
                Family::Cycle(params[0])
            }
            "grid" => {
                need(2)?;
                Family::Grid(params[0], params[1])
            }
            "wheel" => {
                need(1)?;
                Family::Wheel(params[0])
            }
            "triangulated_grid" | "triangulated-grid" => {
                need(2)?;
                Family::TriangulatedGrid(params[0], params[1])
            }
            _ => return Err(Error::InvalidInput(format!("unknown family {name}"))),
        })
    }
}

/// Build a family member with unit edge and vertex weights.
pub fn generate(family: &Family) -> Result<EmbeddedGraph> {
    let bad = |msg: &str| Err(Error::InvalidInput(format!("{family:?}: {msg}")));
    let (coords, pairs): (Vec<(f64, f64)>, Vec<(usize, usize)>) = match *family {
        Family::Path(n) => {
            if n == 0 {
                return bad("need at least one vertex");
            }
            (
                (0..n).map(|i| (i as f64, 0.0)).collect(),
                (1..n).map(|i| (i - 1, i)).collect(),
            )
        }
        Family::Cycle(n) => {
            if n < 3 {
                return bad("need at least three vertices");
            }
            (
                circle(n, 0.0),
                (0..n).map(|i| (i, (i + 1) % n)).collect(),
            )
        }
        Family::Grid(r, c) | Family::TriangulatedGrid(r, c) => {
            if r == 0 || c == 0 {
                return bad("dimensions must be positive");
            }
            let id = |i: usize, j: usize| i * c + j;
            let mut pairs = Vec::new();
            for i in 0..r {
                for j in 0..c {
                    if j + 1 < c {
                        pairs.push((id(i, j), id(i, j + 1)));
                    }
                    if i + 1 < r {
                        pairs.push((id(i, j), id(i + 1, j)));
                    }
                    if matches!(family, Family::TriangulatedGrid(..)) && i + 1 < r && j + 1 < c {
                        pairs.push((id(i, j), id(i + 1, j + 1)));
                    }
                }
            }
            let coords = (0..r * c)
                .map(|v| ((v % c) as f64, -((v / c) as f64)))
                .collect();
            (coords, pairs)
        }
        Family::Wheel(k) => {
            if k < 3 {
                return bad("rim needs at least three vertices");
            }
            let mut coords = vec![(0.0, 0.0)];
            coords.extend(circle(k, 0.0));
            let mut pairs: Vec<(usize, usize)> = (1..=k).map(|i| (0, i)).collect();
            pairs.extend((1..=k).map(|i| (i, i % k + 1)));
            (coords, pairs)
        }
    };
    embed_straight_line(&coords, &pairs)
}

fn circle(n: usize, phase: f64) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let t = phase + 2.0 * PI * i as f64 / n as f64;
            (t.cos(), t.sin())
        })
        .collect()
}

/// Rotation system of a planar straight-line drawing: incident edges sorted
/// clockwise by angle around each vertex.
pub(crate) fn embed_straight_line(
    coords: &[(f64, f64)],
    pairs: &[(usize, usize)],
) -> Result<EmbeddedGraph> {
    let n = coords.len();
    let edges: Vec<Edge> = pairs.iter().map(|&(u, v)| Edge { u, v, w: 1.0 }).collect();
    let mut rotation: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in edges.iter().enumerate() {
        rotation[e.u].push(i);
        rotation[e.v].push(i);
    }
    for (x, rot) in rotation.iter_mut().enumerate() {
        let angle = |e: usize| {
            let y = edges[e].other(x);
            (coords[y].1 - coords[x].1).atan2(coords[y].0 - coords[x].0)
        };
        rot.sort_by(|&a, &b| angle(b).total_cmp(&angle(a)));
    }
    EmbeddedGraph::new(n, edges, vec![1.0; n], rotation)
}
