use super::{Edge, EmbeddedGraph};
use crate::error::Result;
use serde::{Deserialize, Serialize};

/// On-disk graph document. Edge indices in `rotation` refer to positions in
/// `edges`; vertices are 0-indexed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub n: usize,
    pub lambda: Vec<f64>,
    pub edges: Vec<Edge>,
    pub rotation: Vec<Vec<usize>>,
}

impl From<&EmbeddedGraph> for GraphDocument {
    fn from(g: &EmbeddedGraph) -> Self {
        Self {
            n: g.n(),
            lambda: g.lambda().to_vec(),
            edges: g.edges().to_vec(),
            rotation: (0..g.n()).map(|v| g.rotation(v).to_vec()).collect(),
        }
    }
}

impl TryFrom<GraphDocument> for EmbeddedGraph {
    type Error = crate::error::Error;

    fn try_from(doc: GraphDocument) -> Result<Self> {
        EmbeddedGraph::new(doc.n, doc.edges, doc.lambda, doc.rotation)
    }
}

/// Parse and validate a JSON graph document.
pub fn parse_graph(document: &str) -> Result<EmbeddedGraph> {
    let doc: GraphDocument = serde_json::from_str(document)?;
    doc.try_into()
}

impl EmbeddedGraph {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GraphDocument::from(self)).expect("graph serializes")
    }
}
