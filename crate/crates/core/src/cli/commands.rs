use super::error::{CliError, CliResult};
use super::manifest::{manifest_path_for, Manifest};
use super::*;
use crate::analysis::{profile, render_profile_table, Modes, ProfileConfig};
use crate::classify::{
    accuracy_difference, labels_from_relation, nested_cv, read_folds, read_labels,
    stratified_folds, AccuracyDifference, CheckpointStore, CvConfig, CvResult, EmbeddingSpace,
    LabeledEntities, RuleSpace,
};
use crate::embed::{read_checkpoint, train, write_features_csv, DirectorySink, TrainConfig};
use crate::eval::{evaluate, EvalConfig, RankResult};
use crate::kg::{EntityId, KnowledgeGraph, Reifier, Triple};
use crate::report::{render, ClassificationEntry, KbcEntry, ProfileEntry, Results, RuleEntry};
use crate::symbolic::{
    connected_relations, mine_theories, read_rules, theory_analytics, write_rules, CompiledRule,
    MiningConfig, RuleScorer, TrainView,
};
use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};

pub(super) fn dispatch(cli: &Cli) -> CliResult<()> {
    let parallel = cli.threads != 1;
    let (inputs, output, output_is_dir) = match &cli.command {
        Command::Ingest(a) => ingest(a)?,
        Command::Reify(a) => reify(a)?,
        Command::Train(a) => train_cmd(a, cli.seed)?,
        Command::MineRules(a) => mine(a, parallel)?,
        Command::ApplyRules(a) => apply(a)?,
        Command::EvalKbc(a) => eval_kbc(a, cli.seed, parallel)?,
        Command::Analyze(a) => analyze(a, parallel)?,
        Command::Classify(a) => classify(a, cli.seed, parallel)?,
        Command::Report(a) => report(a)?,
    };
    let mut inputs = inputs;
    if let Some(c) = &cli.config {
        inputs.push(c.clone());
    }
    let manifest = Manifest::new(cli.command.name(), serde_json::to_value(cli)?, &inputs)?;
    let path = cli
        .manifest
        .clone()
        .unwrap_or_else(|| manifest_path_for(&output, output_is_dir));
    manifest.write(&path)
}

type Outcome = (Vec<PathBuf>, PathBuf, bool);

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn load_kg(dir: &Path) -> CliResult<(PathBuf, KnowledgeGraph)> {
    let dir = data_path(dir);
    let kg = KnowledgeGraph::load(&dir)
        .map_err(|e| CliError::Data(format!("cannot load graph {}: {e}", dir.display())))?;
    Ok((dir, kg))
}

fn dataset_name(explicit: &Option<String>, kg_dir: &Path) -> String {
    explicit.clone().unwrap_or_else(|| {
        kg_dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into())
    })
}

fn ingest(a: &IngestArgs) -> CliResult<Outcome> {
    let root = a.dataset.as_deref().map(data_path);
    let pick = |explicit: &Option<PathBuf>, name: &str| -> Option<PathBuf> {
        match explicit {
            Some(p) => Some(data_path(p)),
            None => root.as_ref().map(|r| r.join(name)).filter(|p| p.exists()),
        }
    };
    let train_path = pick(&a.train, "train.txt").ok_or_else(|| {
        CliError::Usage("ingest needs --train or a --dataset directory with train.txt".into())
    })?;
    let mut files = vec![(Split::Train, train_path)];
    files.extend(pick(&a.valid, "valid.txt").map(|p| (Split::Valid, p)));
    files.extend(pick(&a.test, "test.txt").map(|p| (Split::Test, p)));
    let attributes = pick(&a.attributes, "attributes.txt");

    let mut kg = KnowledgeGraph::new();
    let mut reifier = Reifier::with_unary_value(a.unary_value.clone());
    for (split, path) in &files {
        let src = open(path)?;
        let stats = if a.hyperfacts {
            kg.ingest_hyperfacts(src, *split, &mut reifier)
        } else {
            kg.ingest_triples(src, *split)
        }
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        println!(
            "{split}: {} triples ({} duplicates dropped)",
            stats.added, stats.duplicates_dropped
        );
    }
    if let Some(p) = &attributes {
        for name in kg.load_attribute_schema(open(p)?)? {
            log::warn!("attribute relation `{name}` does not occur in the data");
        }
    }
    if a.sorted_vocab {
        kg = kg.with_sorted_vocab();
    }
    kg.save(&a.out)?;
    println!(
        "{} entities, {} relations -> {}",
        kg.num_entities(),
        kg.num_relations(),
        a.out.display()
    );
    let mut inputs: Vec<PathBuf> = files.into_iter().map(|f| f.1).collect();
    inputs.extend(attributes);
    Ok((inputs, a.out.clone(), true))
}

fn reify(a: &ReifyArgs) -> CliResult<Outcome> {
    use std::io::BufRead;
    let input = data_path(&a.input);
    let mut reifier = Reifier::with_unary_value(a.unary_value.clone());
    let mut w = create(&a.out)?;
    let mut n = 0;
    for (i, line) in open(&input)?.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
            continue;
        }
        let fact = crate::kg::parse_hyperfact(t)
            .map_err(|r| CliError::Data(format!("line {}: {r}", i + 1)))?;
        for lt in reifier.reify(&fact)? {
            writeln!(w, "{}\t{}\t{}", lt.head, lt.relation, lt.tail)?;
            n += 1;
        }
    }
    w.flush()?;
    println!("{n} triples -> {}", a.out.display());
    Ok((vec![input], a.out.clone(), false))
}

fn train_cmd(a: &TrainArgs, seed: u64) -> CliResult<Outcome> {
    let (dir, kg) = load_kg(&a.kg)?;
    let cfg = TrainConfig {
        epochs: a.epochs,
        checkpoint_every: a.checkpoint_every,
        batch_size: a.batch_size,
        learning_rate: a.lr,
        negatives_per_positive: a.negatives,
        margin: a.margin,
        regularization: a.regularization,
        seed,
        shards: a.shards,
        ..TrainConfig::new(a.model, a.dim)
    };
    let mut sink = DirectorySink::new(&a.out)?;
    let (model, report) = train(&kg, &cfg, &mut sink)?;
    if let Some(last) = report.epoch_losses.last() {
        println!("final epoch loss {last:.6}");
    }
    println!("{} checkpoints -> {}", sink.written.len(), a.out.display());
    if let Some(p) = &a.features {
        let ids: Vec<EntityId> = kg.entities().ids().collect();
        let mut w = create(p)?;
        write_features_csv(&mut w, &kg, &model, &ids)?;
        w.flush()?;
    }
    Ok((vec![dir], a.out.clone(), true))
}

fn mine(a: &MineArgs, parallel: bool) -> CliResult<Outcome> {
    let (dir, kg) = load_kg(&a.kg)?;
    let targets: Vec<_> = if a.target.is_empty() {
        kg.relations()
            .ids()
            .filter(|&r| kg.triples(Split::Train).iter().any(|t| t.relation == r))
            .collect()
    } else {
        a.target
            .iter()
            .map(|name| {
                kg.relation(name)
                    .ok_or_else(|| CliError::Usage(format!("unknown target relation `{name}`")))
            })
            .collect::<CliResult<_>>()?
    };
    let cfg = MiningConfig {
        max_body_len: a.max_body,
        min_coverage: a.min_coverage,
        min_correct: a.min_correct,
        max_rules_per_target: a.max_rules,
        parallel,
    };
    let theories = mine_theories(&kg, &targets, &cfg)?;
    let mut w = create(&a.out)?;
    write_rules(&mut w, &kg, &theories)?;
    w.flush()?;
    let total: usize = theories.iter().map(|t| t.len()).sum();
    println!(
        "{total} rules for {} targets -> {}",
        theories.len(),
        a.out.display()
    );
    if let Some(b) = &a.bundle {
        let results = Results {
            rules: vec![RuleEntry {
                dataset: dataset_name(&a.dataset, &dir),
                analytics: theory_analytics(&kg, &theories)?,
                connected: connected_relations(&kg),
            }],
            ..Results::default()
        };
        write_json(b, &results)?;
    }
    Ok((vec![dir], a.out.clone(), false))
}

fn load_rules(
    kg: &KnowledgeGraph,
    path: &Path,
) -> CliResult<(PathBuf, Vec<crate::symbolic::RuleTheory>)> {
    let path = data_path(path);
    let theories = read_rules(open(&path)?, kg)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok((path, theories))
}

fn apply(a: &ApplyArgs) -> CliResult<Outcome> {
    let (dir, kg) = load_kg(&a.kg)?;
    let (rules_path, theories) = load_rules(&kg, &a.rules)?;
    let view = TrainView::new(&kg);
    let mut rows: Vec<(f64, Triple)> = Vec::new();
    for th in &theories {
        let mut scores: BTreeMap<(EntityId, EntityId), f64> = BTreeMap::new();
        for rule in &th.rules {
            let conf = rule.confidence();
            for (x, y) in view.all_predictions(&CompiledRule::new(rule)?) {
                let s = scores.entry((x, y)).or_insert(0.0);
                *s = match a.aggregation {
                    Aggregation::Max => s.max(conf),
                    Aggregation::NoisyOr => 1.0 - (1.0 - *s) * (1.0 - conf),
                };
            }
        }
        rows.extend(
            scores
                .into_iter()
                .map(|((x, y), s)| (s, Triple::new(x, th.target, y)))
                .filter(|(_, t)| !kg.contains(Split::Train, t)),
        );
    }
    rows.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut w = create(&a.out)?;
    for (s, t) in &rows {
        let split = kg.split_of(t).map_or("new", |s| s.as_str());
        writeln!(
            w,
            "{}\t{}\t{}\t{s}\t{split}",
            kg.entity_label(t.head),
            kg.relation_label(t.relation),
            kg.entity_label(t.tail)
        )?;
    }
    w.flush()?;
    println!("{} predictions -> {}", rows.len(), a.out.display());
    Ok((vec![dir, rules_path], a.out.clone(), false))
}

fn eval_kbc(a: &EvalArgs, seed: u64, parallel: bool) -> CliResult<Outcome> {
    let kind = a.scorer.ok_or_else(|| {
        CliError::Usage("eval-kbc needs a scorer: --scorer model-checkpoint|rules".into())
    })?;
    if a.hits.is_empty() || a.hits.contains(&0) {
        return Err(CliError::Usage("--hits takes positive cutoffs".into()));
    }
    let (dir, kg) = load_kg(&a.kg)?;
    let cfg = EvalConfig {
        rank_mode: a.rank,
        hits: a.hits.clone(),
        per_query: a.per_query,
        parallel,
        type_filter: None,
        seed: Some(seed),
    };
    let (source, result): (PathBuf, RankResult) = match kind {
        ScorerKind::ModelCheckpoint => {
            let p = a.checkpoint.as_deref().map(data_path).ok_or_else(|| {
                CliError::Usage("--scorer model-checkpoint needs --checkpoint FILE".into())
            })?;
            let (model, _) = read_checkpoint(&mut open(&p)?)?;
            if model.num_entities() != kg.num_entities()
                || model.num_relations() != kg.num_relations()
            {
                return Err(CliError::Data(format!(
                    "checkpoint has {} entities and {} relations, graph has {} and {}",
                    model.num_entities(),
                    model.num_relations(),
                    kg.num_entities(),
                    kg.num_relations()
                )));
            }
            let r = evaluate(&model, &kg, a.split, &cfg)?;
            (p, r)
        }
        ScorerKind::Rules => {
            let p = a
                .rules
                .as_deref()
                .ok_or_else(|| CliError::Usage("--scorer rules needs --rules FILE".into()))?;
            let (p, theories) = load_rules(&kg, p)?;
            let scorer = RuleScorer::new(&kg, &theories, a.aggregation)?;
            (p, evaluate(&scorer, &kg, a.split, &cfg)?)
        }
    };
    write_json(&a.out, &result)?;
    let hits: Vec<String> = result
        .overall
        .hits
        .iter()
        .map(|(k, v)| format!("hits@{k}={v:.4}"))
        .collect();
    println!(
        "{} {} rank on {}: {} mrr={:.4}",
        result.scorer,
        result.rank_mode.as_str(),
        result.split,
        hits.join(" "),
        result.overall.mrr
    );
    if let Some(b) = &a.bundle {
        let method = a.method.clone().unwrap_or_else(|| result.scorer.clone());
        let results = Results {
            kbc: vec![KbcEntry::from_rank_result(
                &dataset_name(&a.dataset, &dir),
                &method,
                &result,
            )],
            ..Results::default()
        };
        write_json(b, &results)?;
    }
    Ok((vec![dir, source], a.out.clone(), false))
}

fn analyze(a: &AnalyzeArgs, parallel: bool) -> CliResult<Outcome> {
    let (dir, kg) = load_kg(&a.kg)?;
    let modes = match a.mode {
        AnalyzeMode::Informed => Modes::Informed,
        AnalyzeMode::Uninformed => Modes::Uninformed,
        AnalyzeMode::Both => Modes::Both,
    };
    let cfg = ProfileConfig {
        node_limit: a.node_limit,
        parallel,
    };
    let p = profile(&kg, modes, &cfg);
    write_json(&a.out, &p)?;
    let name = dataset_name(&a.dataset, &dir);
    if let Some(table) = &a.table {
        let informed = a.mode != AnalyzeMode::Uninformed;
        let text = render_profile_table(&[(name.as_str(), &p)], informed);
        match table {
            Some(path) => std::fs::write(path, &text)?,
            None => print!("{text}"),
        }
    }
    if let Some(b) = &a.bundle {
        let results = Results {
            profiles: vec![ProfileEntry {
                dataset: name,
                profile: p,
            }],
            ..Results::default()
        };
        write_json(b, &results)?;
    }
    Ok((vec![dir], a.out.clone(), false))
}

#[derive(serde::Serialize)]
struct ClassifyReport {
    dataset: String,
    features: FeatureKind,
    classifier: ClassifierKind,
    outer_folds: usize,
    inner_folds: usize,
    classes: Vec<String>,
    distributional: Option<CvResult>,
    symbolic: CvResult,
    difference: Option<AccuracyDifference>,
}

fn classify(a: &ClassifyArgs, seed: u64, parallel: bool) -> CliResult<Outcome> {
    let (dir, kg) = load_kg(&a.kg)?;
    let mut inputs = vec![dir.clone()];
    let (labels, view): (LabeledEntities, KnowledgeGraph) = match (&a.labels, &a.label_relation) {
        (Some(p), None) => {
            let p = data_path(p);
            let l = read_labels(open(&p)?, &kg)?;
            inputs.push(p);
            (l, kg.clone())
        }
        (None, Some(name)) => {
            let r = kg
                .relation(name)
                .ok_or_else(|| CliError::Usage(format!("unknown label relation `{name}`")))?;
            labels_from_relation(&kg, r)?
        }
        _ => {
            return Err(CliError::Usage(
                "classify needs --labels FILE or --label-relation R".into(),
            ))
        }
    };
    if labels.num_classes() < 2 {
        return Err(CliError::Data(
            "labels contain fewer than two classes".into(),
        ));
    }
    let outer = match &a.folds {
        Some(p) => {
            let p = data_path(p);
            let f = read_folds(open(&p)?, &kg, &labels)?;
            inputs.push(p);
            f
        }
        None => stratified_folds(&labels.classes, a.outer_folds, seed),
    };
    let cv = CvConfig {
        inner_folds: a.inner_folds,
        seed,
        parallel,
    };
    let rule_space = RuleSpace {
        kg: &view,
        num_classes: labels.num_classes(),
        lengths: a.rule_lengths.clone(),
    };
    let symbolic = nested_cv(&rule_space, &labels, &outer, &cv)?;
    println!("rules: accuracy {:.4}", symbolic.mean_accuracy);

    let (distributional, difference) = match a.features.model() {
        None => (None, None),
        Some(kind) => {
            let store = match &a.checkpoints {
                Some(d) => {
                    let d = data_path(d);
                    let s = CheckpointStore::load_dir(&d)?;
                    inputs.push(d);
                    s
                }
                None => {
                    let base = TrainConfig {
                        epochs: a.epochs,
                        checkpoint_every: a.checkpoint_every,
                        learning_rate: a.lr,
                        batch_size: a.batch_size,
                        seed,
                        ..TrainConfig::new(kind, a.dims[0])
                    };
                    CheckpointStore::train_grid(&view, &base, &a.dims)?
                }
            };
            let mut space = EmbeddingSpace::full_grid(&store, kind);
            space.dims.retain(|d| a.dims.contains(d));
            space.ks = a.ks.clone();
            if space.dims.is_empty() || space.epochs.is_empty() {
                return Err(CliError::Data(format!(
                    "no {} checkpoints for the requested dimensions",
                    kind.as_str()
                )));
            }
            let dist = nested_cv(&space, &labels, &outer, &cv)?;
            let diff = accuracy_difference(&dist, &symbolic)?;
            println!(
                "{}: accuracy {:.4}, difference {:+.4}",
                kind.as_str(),
                dist.mean_accuracy,
                diff.mean
            );
            (Some(dist), Some(diff))
        }
    };
    let name = dataset_name(&a.dataset, &dir);
    if let (Some(b), Some(d)) = (&a.bundle, &difference) {
        let results = Results {
            classification: vec![ClassificationEntry {
                dataset: name.clone(),
                classifier: "knn".into(),
                embedding: a
                    .features
                    .model()
                    .map(|k| k.as_str().to_owned())
                    .unwrap_or_default(),
                acc_diff: d.mean,
                per_fold: d.per_fold.clone(),
            }],
            ..Results::default()
        };
        write_json(b, &results)?;
    }
    let mut fold_ids = outer.clone();
    fold_ids.sort_unstable();
    fold_ids.dedup();
    let report = ClassifyReport {
        dataset: name,
        features: a.features,
        classifier: a.classifier,
        outer_folds: fold_ids.len(),
        inner_folds: a.inner_folds,
        classes: labels.class_names.clone(),
        distributional,
        symbolic,
        difference,
    };
    write_json(&a.report, &report)?;
    Ok((inputs, a.report.clone(), false))
}

fn report(a: &ReportArgs) -> CliResult<Outcome> {
    let mut results = Results::default();
    let mut inputs = Vec::new();
    for p in &a.inputs {
        let p = data_path(p);
        let text = std::fs::read_to_string(&p)
            .map_err(|e| CliError::Data(format!("cannot read {}: {e}", p.display())))?;
        let r = Results::from_json(&text)
            .map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
        results.extend(r);
        inputs.push(p);
    }
    if a.fixture {
        results.extend(crate::fixtures::reference_results());
    }
    let rendered = render(&results)?;
    for w in &rendered.warnings {
        log::warn!("{w}");
    }
    rendered.write_to(&a.out)?;
    write_json(&a.out.join("results.json"), &results)?;
    for art in &rendered.artifacts {
        println!("{}", a.out.join(art.name).display());
    }
    Ok((inputs, a.out.clone(), true))
}
