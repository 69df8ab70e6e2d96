//! Topological properties of the informed and uninformed entity graphs,
//! computed exactly per connected component.

mod cliques;
mod flow;
mod profile;
pub mod properties;
mod table;

pub use cliques::{cliques, cliques_capped, CliqueStats, MAX_CLIQUE_COUNT};
pub use flow::{
    edge_connectivity, local_edge_connectivity, local_node_connectivity, node_connectivity,
};
pub use profile::{
    component_properties, meta_properties, profile, profile_graph, ComponentProperties,
    DatasetProfile, GraphProfile, MetaProperties, Modes, ProfileConfig, Property, PropertySummary,
    Summary, DEFAULT_NODE_LIMIT,
};
pub use properties::{
    avg_neighbor_degree, closeness_centrality, clustering, degree_assortativity, degree_centrality,
    eccentricity_radius_diameter, mean_std, Distances,
};
pub use table::render_profile_table;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("graph is not connected; pass a single component")]
    Disconnected,
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("uninformed graph has no edges")]
    NoEdges,
    #[error("component has {nodes} nodes, above the exact-computation limit of {limit}")]
    TooLarge { nodes: usize, limit: usize },
}

pub type Result<T, E = AnalysisError> = std::result::Result<T, E>;
