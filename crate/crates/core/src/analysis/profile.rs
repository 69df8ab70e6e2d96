use super::cliques::cliques;
use super::flow::{edge_connectivity, node_connectivity};
use super::properties::*;
use super::{AnalysisError, Result};
use crate::graph::{connected_components, UndirectedGraph};
use crate::kg::{project_graph, GraphMode, KnowledgeGraph};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

pub const DEFAULT_NODE_LIMIT: usize = 5_000;

/// Properties computed per connected component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    AverageDegree,
    AverageNeighborDegree,
    DegreeAssortativity,
    AverageClustering,
    DegreeCentrality,
    ClosenessCentrality,
    Eccentricity,
    EdgeConnectivity,
    NodeConnectivity,
    Diameter,
    Radius,
    MaxClique,
    MaximalCliques,
}

impl Property {
    pub const ALL: [Property; 13] = [
        Property::AverageDegree,
        Property::AverageNeighborDegree,
        Property::DegreeAssortativity,
        Property::AverageClustering,
        Property::DegreeCentrality,
        Property::ClosenessCentrality,
        Property::Eccentricity,
        Property::EdgeConnectivity,
        Property::NodeConnectivity,
        Property::Diameter,
        Property::Radius,
        Property::MaxClique,
        Property::MaximalCliques,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::AverageDegree => "average_degree",
            Property::AverageNeighborDegree => "average_neighbor_degree",
            Property::DegreeAssortativity => "degree_assortativity",
            Property::AverageClustering => "average_clustering",
            Property::DegreeCentrality => "degree_centrality",
            Property::ClosenessCentrality => "closeness_centrality",
            Property::Eccentricity => "eccentricity",
            Property::EdgeConnectivity => "edge_connectivity",
            Property::NodeConnectivity => "node_connectivity",
            Property::Diameter => "diameter",
            Property::Radius => "radius",
            Property::MaxClique => "max_clique",
            Property::MaximalCliques => "maximal_cliques",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Property::AverageDegree => "average degree (per component)",
            Property::AverageNeighborDegree => "average neighbor degree",
            Property::DegreeAssortativity => "degree assortativity coefficient",
            Property::AverageClustering => "average clustering",
            Property::DegreeCentrality => "degree centrality",
            Property::ClosenessCentrality => "closeness centrality",
            Property::Eccentricity => "eccentricity",
            Property::EdgeConnectivity => "edge connectivity",
            Property::NodeConnectivity => "node connectivity",
            Property::Diameter => "diameter",
            Property::Radius => "radius",
            Property::MaxClique => "maximal clique",
            Property::MaximalCliques => "number of maximal cliques",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentProperties {
    pub nodes: usize,
    pub edges: usize,
    /// Indexed like `Property::ALL`; `None` where undefined or refused.
    pub values: Vec<Option<f64>>,
    pub notes: Vec<String>,
}

impl ComponentProperties {
    pub fn get(&self, p: Property) -> Option<f64> {
        self.values[Property::ALL.iter().position(|&q| q == p).unwrap()]
    }
}

/// Every per-component property of one connected component.
pub fn component_properties(g: &UndirectedGraph, node_limit: usize) -> ComponentProperties {
    let mut notes: Vec<String> = Vec::new();
    let note =
        |notes: &mut Vec<String>, e: AnalysisError, what: &str| notes.push(format!("{what}: {e}"));
    let dist = match eccentricity_radius_diameter(g) {
        Ok(d) => Some(d),
        Err(e) => {
            note(&mut notes, e, "distances");
            None
        }
    };
    let closeness = match closeness_centrality(g) {
        Ok(c) => c,
        Err(e) => {
            note(&mut notes, e, "closeness");
            None
        }
    };
    let (edge_c, node_c) = match (
        edge_connectivity(g, node_limit),
        node_connectivity(g, node_limit),
    ) {
        (Ok(a), Ok(b)) => {
            if g.num_nodes() < 2 {
                notes.push("single node: connectivity defined as 0".into());
            }
            (Some(a as f64), Some(b as f64))
        }
        (Err(e), _) | (_, Err(e)) => {
            note(&mut notes, e, "connectivity");
            (None, None)
        }
    };
    let (max_clique, n_cliques) = match cliques(g, node_limit) {
        Ok(s) => {
            if s.truncated {
                notes.push(format!("clique count truncated at {}", s.count));
            }
            (Some(s.max_size as f64), Some(s.count as f64))
        }
        Err(e) => {
            note(&mut notes, e, "cliques");
            (None, None)
        }
    };
    let values = vec![
        Some(average_degree(g)),
        avg_neighbor_degree(g),
        degree_assortativity(g),
        Some(clustering(g)),
        degree_centrality(g),
        closeness,
        dist.map(|d| d.mean_eccentricity),
        edge_c,
        node_c,
        dist.map(|d| d.diameter as f64),
        dist.map(|d| d.radius as f64),
        max_clique,
        n_cliques,
    ];
    ComponentProperties {
        nodes: g.num_nodes(),
        edges: g.num_edges(),
        values,
        notes,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: Option<f64>,
    pub std: Option<f64>,
    /// Values that entered the statistics.
    pub defined: usize,
    pub undefined: usize,
}

impl Summary {
    pub fn of(values: impl IntoIterator<Item = Option<f64>>) -> Self {
        let (mut vals, mut undefined) = (Vec::new(), 0);
        for v in values {
            match v {
                Some(x) => vals.push(x),
                None => undefined += 1,
            }
        }
        let ms = mean_std(&vals);
        Self {
            mean: ms.map(|m| m.0),
            std: ms.map(|m| m.1),
            defined: vals.len(),
            undefined,
        }
    }

    /// `mean(std)` with two decimals, or `--`.
    pub fn render(&self) -> String {
        match (self.mean, self.std) {
            (Some(m), Some(s)) => format!("{m:.2}({s:.2})"),
            _ => "--".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertySummary {
    pub property: Property,
    pub label: String,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphProfile {
    pub mode: String,
    pub nodes: usize,
    pub edges: usize,
    pub components: usize,
    /// Component sizes, mean(std).
    pub component_size: Summary,
    /// Node degrees over the whole graph, mean(std).
    pub node_degree: Summary,
    /// Per-component values aggregated over components.
    pub properties: Vec<PropertySummary>,
    pub per_component: Vec<ComponentProperties>,
}

impl GraphProfile {
    pub fn summary(&self, p: Property) -> &Summary {
        &self
            .properties
            .iter()
            .find(|s| s.property == p)
            .unwrap()
            .summary
    }
}

#[derive(Debug, Clone)]
pub struct ProfileConfig {
    pub node_limit: usize,
    pub parallel: bool,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self {
            node_limit: DEFAULT_NODE_LIMIT,
            parallel: true,
        }
    }
}

/// Profiles a graph component by component; components are ordered by
/// their smallest node label.
pub fn profile_graph(g: &UndirectedGraph, mode: &str, cfg: &ProfileConfig) -> GraphProfile {
    let comps = connected_components(g);
    let per_component: Vec<ComponentProperties> = if cfg.parallel {
        comps
            .par_iter()
            .map(|c| component_properties(c, cfg.node_limit))
            .collect()
    } else {
        comps
            .iter()
            .map(|c| component_properties(c, cfg.node_limit))
            .collect()
    };
    let properties = Property::ALL
        .iter()
        .enumerate()
        .map(|(i, &p)| PropertySummary {
            property: p,
            label: p.label().to_owned(),
            summary: Summary::of(per_component.iter().map(|c| c.values[i])),
        })
        .collect();
    GraphProfile {
        mode: mode.to_owned(),
        nodes: g.num_nodes(),
        edges: g.num_edges(),
        components: comps.len(),
        component_size: Summary::of(comps.iter().map(|c| Some(c.num_nodes() as f64))),
        node_degree: Summary::of(degrees(g).into_iter().map(Some)),
        properties,
        per_component,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaProperties {
    /// Relations flagged as attributes.
    pub attributes: usize,
    /// Distinct tail values of attribute relations.
    pub attribute_values: usize,
    /// Relations not flagged as attributes.
    pub relations: usize,
    pub informed_edges: usize,
    pub uninformed_edges: usize,
    pub edge_reduction: f64,
    pub degree_proportion: f64,
}

pub fn meta_properties(kg: &KnowledgeGraph) -> Result<MetaProperties> {
    let informed = project_graph(kg, GraphMode::Informed);
    let uninformed = project_graph(kg, GraphMode::Uninformed);
    meta_from_graphs(kg, &informed, &uninformed)
}

fn meta_from_graphs(
    kg: &KnowledgeGraph,
    informed: &UndirectedGraph,
    uninformed: &UndirectedGraph,
) -> Result<MetaProperties> {
    if uninformed.num_edges() == 0 {
        return Err(AnalysisError::NoEdges);
    }
    let attrs = kg.attribute_relations();
    let values: BTreeSet<_> = kg
        .all_triples()
        .filter(|t| attrs.contains(&t.relation))
        .map(|t| t.tail)
        .collect();
    Ok(MetaProperties {
        attributes: attrs.len(),
        attribute_values: values.len(),
        relations: kg.num_relations() - attrs.len(),
        informed_edges: informed.num_edges(),
        uninformed_edges: uninformed.num_edges(),
        edge_reduction: 1.0 - informed.num_edges() as f64 / uninformed.num_edges() as f64,
        degree_proportion: average_degree(informed) / average_degree(uninformed),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modes {
    Informed,
    Uninformed,
    Both,
}

impl std::str::FromStr for Modes {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "informed" => Ok(Modes::Informed),
            "uninformed" => Ok(Modes::Uninformed),
            "both" => Ok(Modes::Both),
            other => Err(format!(
                "unknown mode `{other}` (expected informed, uninformed or both)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetProfile {
    pub informed: Option<GraphProfile>,
    pub uninformed: Option<GraphProfile>,
    /// `None` when the uninformed graph has no edges.
    pub meta: Option<MetaProperties>,
}

pub fn profile(kg: &KnowledgeGraph, modes: Modes, cfg: &ProfileConfig) -> DatasetProfile {
    let informed_g = project_graph(kg, GraphMode::Informed);
    let uninformed_g = project_graph(kg, GraphMode::Uninformed);
    let want_inf = matches!(modes, Modes::Informed | Modes::Both);
    let want_uninf = matches!(modes, Modes::Uninformed | Modes::Both);
    DatasetProfile {
        informed: want_inf.then(|| profile_graph(&informed_g, GraphMode::Informed.as_str(), cfg)),
        uninformed: want_uninf
            .then(|| profile_graph(&uninformed_g, GraphMode::Uninformed.as_str(), cfg)),
        meta: meta_from_graphs(kg, &informed_g, &uninformed_g).ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::Split;

    #[test]
    fn identical_components_have_zero_std() {
        let g =
            UndirectedGraph::from_index_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        let p = profile_graph(&g, "test", &ProfileConfig::default());
        assert_eq!(p.components, 2);
        for s in &p.properties {
            if let Some(std) = s.summary.std {
                assert_eq!(std, 0.0, "{}", s.label);
            }
        }
        assert_eq!(p.summary(Property::AverageClustering).mean, Some(1.0));
        assert_eq!(p.summary(Property::Diameter).mean, Some(1.0));
        assert_eq!(p.summary(Property::DegreeAssortativity).render(), "--");
    }

    #[test]
    fn guard_records_dashes() {
        let g = UndirectedGraph::from_index_edges(4, [(0, 1), (1, 2), (2, 3)]);
        let p = profile_graph(
            &g,
            "test",
            &ProfileConfig {
                node_limit: 3,
                parallel: false,
            },
        );
        assert_eq!(p.summary(Property::MaxClique).render(), "--");
        assert!(!p.per_component[0].notes.is_empty());
        assert_eq!(p.summary(Property::Diameter).mean, Some(3.0));
    }

    #[test]
    fn meta_without_attributes() {
        let mut kg = KnowledgeGraph::new();
        kg.add_labeled("a", "r", "b", Split::Train).unwrap();
        kg.add_labeled("b", "r", "c", Split::Train).unwrap();
        let m = meta_properties(&kg).unwrap();
        assert_eq!((m.edge_reduction, m.degree_proportion), (0.0, 1.0));
        assert!(matches!(
            meta_properties(&KnowledgeGraph::new()),
            Err(AnalysisError::NoEdges)
        ));
    }
}
