use super::KnowledgeGraph;
use crate::graph::UndirectedGraph;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

/// Which entity graph to build from a knowledge graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphMode {
    /// Attribute edges and the attribute-value nodes they introduce are removed.
    Informed,
    /// Every triple is an edge; attribute values are ordinary nodes.
    Uninformed,
}

impl GraphMode {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphMode::Informed => "informed",
            GraphMode::Uninformed => "uninformed",
        }
    }
}

impl FromStr for GraphMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "informed" => Ok(GraphMode::Informed),
            "uninformed" => Ok(GraphMode::Uninformed),
            o => Err(format!("unknown graph mode `{o}`")),
        }
    }
}

/// Undirected simple entity graph over all splits. Node labels are entity
/// ids. Self-loops are not represented.
pub fn project_graph(kg: &KnowledgeGraph, mode: GraphMode) -> UndirectedGraph {
    let keep = |r| mode == GraphMode::Uninformed || !kg.is_attribute(r);
    let edges: Vec<(u32, u32)> = kg
        .all_triples()
        .filter(|t| keep(t.relation))
        .map(|t| (t.head.0, t.tail.0))
        .collect();
    match mode {
        GraphMode::Uninformed => {
            UndirectedGraph::from_edges(kg.entities().ids().map(|e| e.0), edges)
        }
        GraphMode::Informed => UndirectedGraph::from_edges([], edges),
    }
}
