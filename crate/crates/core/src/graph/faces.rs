use super::EmbeddedGraph;
use crate::error::{Error, Result};

/// A directed copy of an edge. `forward` runs from `u` to `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dart {
    pub edge: usize,
    pub forward: bool,
}

impl Dart {
    pub fn tail(&self, g: &EmbeddedGraph) -> usize {
        let e = g.edge(self.edge);
        if self.forward {
            e.u
        } else {
            e.v
        }
    }

    pub fn head(&self, g: &EmbeddedGraph) -> usize {
        let e = g.edge(self.edge);
        if self.forward {
            e.v
        } else {
            e.u
        }
    }

    fn index(&self) -> usize {
        2 * self.edge + usize::from(!self.forward)
    }
}

/// Face cycles of an embedded graph. Every dart belongs to exactly one face.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceSet {
    pub faces: Vec<Vec<Dart>>,
    /// Designated outer face: the longest face (first on ties). Zero when
    /// the graph has no edges and therefore no face cycles.
    pub outer_face_index: usize,
    dart_face: Vec<usize>,
}

impl FaceSet {
    /// Face containing the given dart.
    pub fn face_of(&self, d: Dart) -> usize {
        self.dart_face[d.index()]
    }

    pub fn total_length(&self) -> usize {
        self.faces.iter().map(Vec::len).sum()
    }
}

/// Trace faces by following, at each head vertex, the next edge clockwise
/// after the one we arrived on. Fails if some component is not genus zero.
pub fn faces(g: &EmbeddedGraph) -> Result<FaceSet> {
    let fs = trace(g);
    euler(g, &fs)?;
    Ok(fs)
}

pub(super) fn check_euler(g: &EmbeddedGraph) -> Result<()> {
    euler(g, &trace(g))
}

fn trace(g: &EmbeddedGraph) -> FaceSet {
    let m = g.edge_count();
    let mut dart_face = vec![usize::MAX; 2 * m];
    let mut faces = Vec::new();
    for start in 0..2 * m {
        if dart_face[start] != usize::MAX {
            continue;
        }
        let id = faces.len();
        let mut cycle = Vec::new();
        let mut d = Dart {
            edge: start / 2,
            forward: start % 2 == 0,
        };
        while dart_face[d.index()] == usize::MAX {
            dart_face[d.index()] = id;
            cycle.push(d);
            let h = d.head(g);
            let pos = g.rotation_position(d.edge, h);
            let rot = g.rotation(h);
            let e = rot[(pos + 1) % rot.len()];
            d = Dart {
                edge: e,
                forward: g.edge(e).u == h,
            };
        }
        faces.push(cycle);
    }
    let outer_face_index = faces
        .iter()
        .enumerate()
        .fold((0, 0), |(bi, bl), (i, f)| if f.len() > bl { (i, f.len()) } else { (bi, bl) })
        .0;
    FaceSet {
        faces,
        outer_face_index,
        dart_face,
    }
}

fn euler(g: &EmbeddedGraph, fs: &FaceSet) -> Result<()> {
    let comps = g.components();
    let mut comp_of = vec![0; g.n()];
    for (i, c) in comps.iter().enumerate() {
        for &v in c {
            comp_of[v] = i;
        }
    }
    let mut v_count = vec![0i64; comps.len()];
    let mut e_count = vec![0i64; comps.len()];
    let mut f_count = vec![0i64; comps.len()];
    for (i, c) in comps.iter().enumerate() {
        v_count[i] = c.len() as i64;
    }
    for e in g.edges() {
        e_count[comp_of[e.u]] += 1;
    }
    for f in &fs.faces {
        f_count[comp_of[f[0].tail(g)]] += 1;
    }
    for i in 0..comps.len() {
        // an isolated vertex bounds a single face with no darts
        let faces = if e_count[i] == 0 { 1 } else { f_count[i] };
        let chi = v_count[i] - e_count[i] + faces;
        if chi != 2 {
            return Err(Error::NotPlanar(format!(
                "component containing vertex {} has V - E + F = {chi}",
                comps[i][0]
            )));
        }
    }
    Ok(())
}
