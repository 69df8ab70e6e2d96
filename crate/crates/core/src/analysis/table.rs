use super::profile::{DatasetProfile, GraphProfile, Property};
use crate::text::{align, leading_dot};

fn graph_rows(
    pick: &dyn Fn(&DatasetProfile) -> Option<&GraphProfile>,
    datasets: &[(&str, &DatasetProfile)],
) -> Vec<Vec<String>> {
    let cell = |f: &dyn Fn(&GraphProfile) -> String| -> Vec<String> {
        datasets
            .iter()
            .map(|(_, d)| pick(d).map_or_else(|| "--".into(), f))
            .collect()
    };
    let mut rows = Vec::new();
    let mut push = |label: &str, cells: Vec<String>| {
        let mut r = vec![label.to_owned()];
        r.extend(cells);
        rows.push(r);
    };
    push("average degree", cell(&|g| g.node_degree.render()));
    for p in Property::ALL {
        let render = move |g: &GraphProfile| g.summary(p).render();
        if p == Property::DegreeAssortativity {
            push("degree pearson correlation coefficient", cell(&render));
        }
        push(p.label(), cell(&render));
    }
    rows
}

/// Text profile table: one column per dataset, `mean(std)` cells and
/// `--` where a value is undefined.
pub fn render_profile_table(datasets: &[(&str, &DatasetProfile)], informed: bool) -> String {
    let mut rows = vec![std::iter::once("statistics".to_owned())
        .chain(datasets.iter().map(|(n, _)| (*n).to_owned()))
        .collect::<Vec<_>>()];
    let pick: &dyn Fn(&DatasetProfile) -> Option<&GraphProfile> = if informed {
        &|d| d.informed.as_ref()
    } else {
        &|d| d.uninformed.as_ref()
    };
    rows.extend(graph_rows(pick, datasets));
    let meta = |f: &dyn Fn(&super::MetaProperties) -> String| -> Vec<String> {
        datasets
            .iter()
            .map(|(_, d)| d.meta.as_ref().map_or_else(|| "--".into(), f))
            .collect()
    };
    let mut push = |label: &str, cells: Vec<String>| {
        let mut r = vec![label.to_owned()];
        r.extend(cells);
        rows.push(r);
    };
    push("number of attributes", meta(&|m| m.attributes.to_string()));
    push(
        "number of attribute values",
        meta(&|m| m.attribute_values.to_string()),
    );
    push("number of relations", meta(&|m| m.relations.to_string()));
    push(
        "edge reduction",
        meta(&|m| leading_dot(m.edge_reduction, 2)),
    );
    push(
        "degree proportion",
        meta(&|m| leading_dot(m.degree_proportion, 2)),
    );
    let comp = |f: &dyn Fn(&GraphProfile) -> String| -> Vec<String> {
        datasets
            .iter()
            .map(|(_, d)| pick(d).map_or_else(|| "--".into(), f))
            .collect()
    };
    push("number of components", comp(&|g| g.components.to_string()));
    push(
        "average component size",
        comp(&|g| g.component_size.render()),
    );
    align(&rows, "  ")
}
