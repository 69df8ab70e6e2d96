//! Result bundles and their rendering into text tables and plot-ready CSV.
//!
//! A [`Results`] bundle is plain JSON. [`render`] turns a validated bundle
//! into a fixed list of artifacts whose bytes depend only on the bundle.

use crate::analysis::{render_profile_table, DatasetProfile};
use crate::eval::RankResult;
use crate::symbolic::{RelationConnectivity, TheoryAnalytics};
use crate::text::{csv_field, leading_dot};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("results do not match the schema: {0}")]
    Schema(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = ReportError> = std::result::Result<T, E>;

pub const DEFAULT_DECIMALS: usize = 3;

/// One method on one KBC dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KbcEntry {
    pub dataset: String,
    pub method: String,
    /// hits@k keyed by k.
    pub hits: BTreeMap<usize, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mrr: Option<f64>,
    /// Digits printed after the decimal point; published figures keep their
    /// own precision.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decimals: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl KbcEntry {
    pub fn from_rank_result(dataset: &str, method: &str, r: &RankResult) -> Self {
        Self {
            dataset: dataset.to_owned(),
            method: method.to_owned(),
            hits: r.overall.hits.clone(),
            mrr: Some(r.overall.mrr),
            decimals: None,
            note: Some(format!("{} rank, {} split", r.rank_mode.as_str(), r.split)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationEntry {
    pub dataset: String,
    pub classifier: String,
    pub embedding: String,
    /// Distributional minus symbolic accuracy, averaged over folds.
    pub acc_diff: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_fold: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub dataset: String,
    pub profile: DatasetProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleEntry {
    pub dataset: String,
    pub analytics: TheoryAnalytics,
    #[serde(default)]
    pub connected: Vec<RelationConnectivity>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Results {
    #[serde(default)]
    pub kbc: Vec<KbcEntry>,
    #[serde(default)]
    pub classification: Vec<ClassificationEntry>,
    #[serde(default)]
    pub profiles: Vec<ProfileEntry>,
    #[serde(default)]
    pub rules: Vec<RuleEntry>,
}

impl Results {
    pub fn is_empty(&self) -> bool {
        self.kbc.is_empty()
            && self.classification.is_empty()
            && self.profiles.is_empty()
            && self.rules.is_empty()
    }

    /// Appends every entry of `other`.
    pub fn extend(&mut self, other: Results) {
        self.kbc.extend(other.kbc);
        self.classification.extend(other.classification);
        self.profiles.extend(other.profiles);
        self.rules.extend(other.rules);
    }

    /// Parses and validates a bundle. Unknown fields are rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let obj = value
            .as_object()
            .ok_or_else(|| ReportError::Schema("top level must be an object".into()))?;
        for key in obj.keys() {
            if !["kbc", "classification", "profiles", "rules"].contains(&key.as_str()) {
                return Err(ReportError::Schema(format!("unknown section `{key}`")));
            }
        }
        let results: Results =
            serde_json::from_value(value).map_err(|e| ReportError::Schema(e.to_string()))?;
        results.validate()?;
        Ok(results)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(ReportError::Schema(m));
        let mut seen = BTreeSet::new();
        for (i, e) in self.kbc.iter().enumerate() {
            if e.dataset.is_empty() || e.method.is_empty() {
                return bad(format!("kbc[{i}]: dataset and method must be non-empty"));
            }
            if !seen.insert((&e.dataset, &e.method)) {
                return bad(format!(
                    "kbc[{i}]: duplicate entry for {} on {}",
                    e.method, e.dataset
                ));
            }
            if e.hits.is_empty() {
                return bad(format!("kbc[{i}]: no hits values"));
            }
            for (&k, &v) in &e.hits {
                if k == 0 || !(0.0..=1.0).contains(&v) {
                    return bad(format!("kbc[{i}]: hits@{k} = {v} is out of range"));
                }
            }
            if e.mrr.is_some_and(|m| !(0.0..=1.0).contains(&m)) {
                return bad(format!("kbc[{i}]: mrr out of range"));
            }
            if e.decimals.is_some_and(|d| d == 0 || d > 6) {
                return bad(format!("kbc[{i}]: decimals must be in 1..=6"));
            }
        }
        for (i, c) in self.classification.iter().enumerate() {
            if c.dataset.is_empty() || c.classifier.is_empty() || c.embedding.is_empty() {
                return bad(format!("classification[{i}]: names must be non-empty"));
            }
            if !(-1.0..=1.0).contains(&c.acc_diff)
                || c.per_fold.iter().any(|d| !(-1.0..=1.0).contains(d))
            {
                return bad(format!(
                    "classification[{i}]: accuracy difference out of [-1, 1]"
                ));
            }
        }
        for (i, p) in self.profiles.iter().enumerate() {
            if p.dataset.is_empty() {
                return bad(format!("profiles[{i}]: dataset must be non-empty"));
            }
        }
        for (i, r) in self.rules.iter().enumerate() {
            if r.dataset.is_empty() {
                return bad(format!("rules[{i}]: dataset must be non-empty"));
            }
            let out_of_range = r.analytics.rules.iter().any(|p| {
                !(0.0..=1.0).contains(&p.train_precision)
                    || !(0.0..=1.0).contains(&p.ground_truth_precision)
            });
            if out_of_range {
                return bad(format!("rules[{i}]: precision out of [0, 1]"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: &'static str,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    pub artifacts: Vec<Artifact>,
    pub warnings: Vec<String>,
}

impl Rendered {
    pub fn get(&self, name: &str) -> Option<&str> {
        self.artifacts
            .iter()
            .find(|a| a.name == name)
            .map(|a| a.content.as_str())
    }

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for a in &self.artifacts {
            std::fs::write(dir.join(a.name), &a.content)?;
        }
        Ok(())
    }
}

fn first_seen<'a>(names: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut out: Vec<&str> = Vec::new();
    for n in names {
        if !out.contains(&n) {
            out.push(n);
        }
    }
    out
}

fn pad_left(s: &str, w: usize) -> String {
    format!("{s:>w$}")
}

/// KBC table: one row per method, one hits@k column group per dataset.
/// Missing cells are `--`.
pub fn render_kbc_table(entries: &[KbcEntry]) -> String {
    let datasets = first_seen(entries.iter().map(|e| e.dataset.as_str()));
    let methods = first_seen(entries.iter().map(|e| e.method.as_str()));
    let ks: Vec<usize> = entries
        .iter()
        .flat_map(|e| e.hits.keys().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let lookup: BTreeMap<(&str, &str), &KbcEntry> = entries
        .iter()
        .map(|e| ((e.dataset.as_str(), e.method.as_str()), e))
        .collect();
    let cell = |d: &str, m: &str, k: usize| -> String {
        lookup
            .get(&(d, m))
            .and_then(|e| {
                e.hits
                    .get(&k)
                    .map(|&v| leading_dot(v, e.decimals.unwrap_or(DEFAULT_DECIMALS)))
            })
            .unwrap_or_else(|| "--".into())
    };
    let label_w = methods
        .iter()
        .map(|m| m.chars().count())
        .chain(["Method".len()])
        .max()
        .unwrap_or(0);
    // widths[d][k]
    let widths: Vec<Vec<usize>> = datasets
        .iter()
        .map(|d| {
            ks.iter()
                .map(|&k| {
                    methods
                        .iter()
                        .map(|m| cell(d, m, k).chars().count())
                        .chain([format!("@{k}").len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect()
        })
        .collect();
    let group_w: Vec<usize> = widths
        .iter()
        .zip(&datasets)
        .map(|(w, d)| (w.iter().sum::<usize>() + w.len().saturating_sub(1)).max(d.chars().count()))
        .collect();
    let line = |label: &str, groups: Vec<String>| -> String {
        let mut s = format!("{label:<label_w$}");
        for (i, g) in groups.iter().enumerate() {
            s.push_str(if i == 0 { " " } else { "  " });
            s.push_str(g);
        }
        s.trim_end().to_owned() + "\n"
    };
    let group = |di: usize, cells: Vec<String>| -> String {
        let body: Vec<String> = cells
            .iter()
            .zip(&widths[di])
            .map(|(c, &w)| pad_left(c, w))
            .collect();
        pad_left(&body.join(" "), group_w[di])
    };
    let mut out = String::new();
    if !datasets.is_empty() {
        let names: Vec<String> = datasets
            .iter()
            .enumerate()
            .map(|(i, d)| format!("{d:<w$}", w = group_w[i]))
            .collect();
        out.push_str(&line("", names));
    }
    out.push_str(&line(
        "Method",
        (0..datasets.len())
            .map(|di| group(di, ks.iter().map(|k| format!("@{k}")).collect()))
            .collect(),
    ));
    for m in &methods {
        out.push_str(&line(
            m,
            datasets
                .iter()
                .enumerate()
                .map(|(di, d)| group(di, ks.iter().map(|&k| cell(d, m, k)).collect()))
                .collect(),
        ));
    }
    out
}

pub const FIGURE1_HEADER: &str = "dataset,classifier,embedding,acc_diff";

pub fn render_figure1(entries: &[ClassificationEntry]) -> String {
    let mut out = format!("{FIGURE1_HEADER}\n");
    for c in entries {
        out.push_str(&format!(
            "{},{},{},{:.4}\n",
            csv_field(&c.dataset),
            csv_field(&c.classifier),
            csv_field(&c.embedding),
            c.acc_diff
        ));
    }
    out
}

fn render_profiles(entries: &[ProfileEntry], informed: bool) -> String {
    let refs: Vec<(&str, &DatasetProfile)> = entries
        .iter()
        .map(|p| (p.dataset.as_str(), &p.profile))
        .collect();
    render_profile_table(&refs, informed)
}

pub fn render_figure2a(entries: &[RuleEntry]) -> String {
    let mut out = String::from("dataset,relation,connected_relations\n");
    for r in entries {
        for c in &r.connected {
            out.push_str(&format!(
                "{},{},{}\n",
                csv_field(&r.dataset),
                csv_field(&c.relation),
                c.connected
            ));
        }
    }
    out
}

pub fn render_figure2b(entries: &[RuleEntry]) -> String {
    let mut out = String::from("dataset,target,rules,body_relations\n");
    for r in entries {
        for t in &r.analytics.theories {
            out.push_str(&format!(
                "{},{},{},{}\n",
                csv_field(&r.dataset),
                csv_field(&t.target),
                t.rules,
                t.body_relations
            ));
        }
    }
    out
}

pub fn render_figure2c(entries: &[RuleEntry]) -> String {
    let mut out = String::from(
        "dataset,target,coverage,coverage_bin,train_precision,ground_truth_precision\n",
    );
    for r in entries {
        for p in &r.analytics.rules {
            let bin = r
                .analytics
                .coverage_bins
                .iter()
                .find(|b| p.coverage >= b.lo && b.hi.is_none_or(|h| p.coverage <= h))
                .map_or("", |b| b.label.as_str());
            out.push_str(&format!(
                "{},{},{},{},{:.6},{:.6}\n",
                csv_field(&r.dataset),
                csv_field(&p.target),
                p.coverage,
                bin,
                p.train_precision,
                p.ground_truth_precision
            ));
        }
    }
    out
}

pub const ARTIFACTS: [&str; 7] = [
    "table2.txt",
    "table1.txt",
    "table4.txt",
    "figure1.csv",
    "figure2a.csv",
    "figure2b.csv",
    "figure2c.csv",
];

/// Renders every artifact. Sections without data yield header-only files
/// and a warning.
pub fn render(results: &Results) -> Result<Rendered> {
    results.validate()?;
    let mut warnings = Vec::new();
    for (empty, what) in [
        (results.kbc.is_empty(), "kbc"),
        (results.classification.is_empty(), "classification"),
        (results.profiles.is_empty(), "profiles"),
        (results.rules.is_empty(), "rules"),
    ] {
        if empty {
            warnings.push(format!("no {what} results; artifacts contain headers only"));
        }
    }
    let contents = [
        render_kbc_table(&results.kbc),
        render_profiles(&results.profiles, true),
        render_profiles(&results.profiles, false),
        render_figure1(&results.classification),
        render_figure2a(&results.rules),
        render_figure2b(&results.rules),
        render_figure2c(&results.rules),
    ];
    Ok(Rendered {
        artifacts: ARTIFACTS
            .iter()
            .zip(contents)
            .map(|(&name, content)| Artifact { name, content })
            .collect(),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(d: &str, m: &str, v: [f64; 3]) -> KbcEntry {
        KbcEntry {
            dataset: d.into(),
            method: m.into(),
            hits: [(1, v[0]), (3, v[1]), (10, v[2])].into_iter().collect(),
            mrr: None,
            decimals: None,
            note: None,
        }
    }

    #[test]
    fn kbc_table_layout() {
        let t = render_kbc_table(&[
            entry("A", "DistMult", [0.155, 0.263, 0.419]),
            entry("B", "X", [0.5, 0.25, 1.0]),
        ]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "         A               B");
        assert_eq!(lines[1], "Method     @1   @3  @10    @1   @3   @10");
        assert!(
            lines[2].starts_with("DistMult .155 .263 .419"),
            "{}",
            lines[2]
        );
        assert!(lines[2].ends_with("--   --    --"));
    }

    #[test]
    fn empty_results_give_headers() {
        let r = render(&Results::default()).unwrap();
        assert_eq!(r.warnings.len(), 4);
        assert_eq!(
            r.get("figure1.csv").unwrap(),
            "dataset,classifier,embedding,acc_diff\n"
        );
        assert_eq!(r.get("table2.txt").unwrap(), "Method\n");
    }

    #[test]
    fn schema_violations() {
        assert!(matches!(
            Results::from_json("[]"),
            Err(ReportError::Schema(_))
        ));
        assert!(matches!(
            Results::from_json(r#"{"kbc": 3}"#),
            Err(ReportError::Schema(_))
        ));
        assert!(matches!(
            Results::from_json(r#"{"extra": []}"#),
            Err(ReportError::Schema(_))
        ));
        let bad = r#"{"kbc":[{"dataset":"d","method":"m","hits":{"1":1.5}}]}"#;
        assert!(matches!(
            Results::from_json(bad),
            Err(ReportError::Schema(_))
        ));
        let ok = r#"{"kbc":[{"dataset":"d","method":"m","hits":{"1":0.5}}]}"#;
        assert_eq!(Results::from_json(ok).unwrap().kbc[0].hits[&1], 0.5);
    }
}
