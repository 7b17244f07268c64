use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;
use topicmerge::corpus::{format_timestamp, load_corpus_dir, parse_timestamp, EVENTS_FILE, QUESTIONS_FILE, TOPICS_FILE};
use topicmerge::embed::load_vectors;
use topicmerge::models::{prf, rfe_rank, LinearKind, LinearParams};
use topicmerge::ontology::{build_ontology, load_taxonomy, ontology_stats, OntologyStats};
use topicmerge::pipeline::{
    ablation_table, build_dataset, cross_validate_direction, direction_samples, early_eval, featurize_dataset,
    feature_names, generate_candidates, load_truth, predict_two_step, train_direction, train_two_step, CorpusIndex,
    DatasetConfig, PairRow, Resources, Split, TruthRecord, TwoStepModel, CATALOG,
};
use topicmerge::synth::{generate_synthetic, EMBEDDINGS_FILE, TAXONOMY_FILE, TRUTH_FILE};
use topicmerge::{Corpus, EventKind, Timestamp};

use crate::config::RunConfig;
use crate::table::{label_map, read_features, read_labels, write_features, write_predictions, write_rows, FeatureRow};
use crate::{CliError, Command};

pub const RUN_CONFIG: &str = "run.cfg";

/// Output directory that refuses to overwrite any file the run reads.
pub struct Outputs {
    dir: PathBuf,
    inputs: Vec<PathBuf>,
}

impl Outputs {
    pub fn new(dir: &Path, config: Option<&Path>) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
        let mut out = Outputs {
            dir: dir.to_path_buf(),
            inputs: Vec::new(),
        };
        if let Some(c) = config {
            out.input(c)?;
        }
        out.path(RUN_CONFIG)?;
        Ok(out)
    }

    fn input(&mut self, p: &Path) -> Result<(), CliError> {
        let canon = p
            .canonicalize()
            .map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
        self.inputs.push(canon);
        Ok(())
    }

    fn path(&self, name: &str) -> Result<PathBuf, CliError> {
        let p = self.dir.join(name);
        if let Ok(canon) = p.canonicalize() {
            if self.inputs.contains(&canon) {
                return Err(CliError::Data(format!("{}: refusing to overwrite an input file", p.display())));
            }
        }
        Ok(p)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<(), CliError> {
        let p = self.path(name)?;
        fs::write(&p, text).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))
    }

    fn write_json(&self, name: &str, v: &serde_json::Value) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(v).expect("json serializes");
        text.push('\n');
        self.write_text(name, &text)
    }
}

fn need_seed(cfg: &RunConfig, cmd: &str) -> Result<u64, CliError> {
    cfg.seed
        .ok_or_else(|| CliError::Usage(format!("`{cmd}` requires --seed (or `seed` in the config file)")))
}

fn need_corpus(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    cfg.corpus
        .clone()
        .ok_or_else(|| CliError::Usage("--corpus is required".into()))
}

fn read_file(p: &Path) -> Result<String, CliError> {
    fs::read_to_string(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))
}

/// Fills unset resource paths from files sitting next to the corpus.
fn resolve_resources(cfg: &mut RunConfig, dir: &Path) {
    for (slot, name) in [
        (&mut cfg.embeddings, EMBEDDINGS_FILE),
        (&mut cfg.taxonomy, TAXONOMY_FILE),
        (&mut cfg.truth, TRUTH_FILE),
    ] {
        if slot.is_none() && dir.join(name).is_file() {
            *slot = Some(dir.join(name));
        }
    }
}

struct Loaded {
    corpus: Corpus,
    res: Resources,
    truth: Option<Vec<TruthRecord>>,
}

fn load_all(cfg: &mut RunConfig, out: &mut Outputs) -> Result<Loaded, CliError> {
    let dir = need_corpus(cfg)?;
    resolve_resources(cfg, &dir);
    for name in [TOPICS_FILE, QUESTIONS_FILE, EVENTS_FILE] {
        out.input(&dir.join(name))?;
    }
    let corpus = load_corpus_dir(&dir)?;
    let mut res = Resources::default();
    if let Some(p) = &cfg.embeddings {
        out.input(p)?;
        res.embeddings = Some(load_vectors(p)?);
    }
    if let Some(p) = &cfg.taxonomy {
        out.input(p)?;
        res.taxonomy = Some(load_taxonomy(p)?);
    }
    let truth = match &cfg.truth {
        Some(p) => {
            out.input(p)?;
            Some(load_truth(p)?)
        }
        None => None,
    };
    Ok(Loaded { corpus, res, truth })
}

fn cutoff(cfg: &RunConfig, c: &Corpus) -> Result<Timestamp, CliError> {
    match &cfg.cutoff {
        Some(s) => parse_timestamp(s).ok_or_else(|| CliError::Usage(format!("--cutoff: bad date `{s}`"))),
        None => c
            .time_range()
            .map(|r| r.1)
            .ok_or_else(|| CliError::Data("corpus has no timestamps".into())),
    }
}

fn stats_json(s: &OntologyStats) -> serde_json::Value {
    json!({
        "nodes": s.nodes,
        "edges": s.edges,
        "components": s.components,
        "largest_component": s.largest_component,
        "singletons": s.singletons,
        "depth": s.depth,
        "average_degree": s.average_degree,
        "largest_component_average_degree": s.largest_component_average_degree,
    })
}

fn load_features(p: &Path, out: &mut Outputs) -> Result<Vec<FeatureRow>, CliError> {
    out.input(p)?;
    read_features(p)
}

fn rows_of(rows: &[FeatureRow], split: Split, label: Option<bool>) -> Vec<PairRow> {
    rows.iter()
        .filter(|r| r.pair.split == split && label.is_none_or(|l| r.pair.label == l))
        .map(FeatureRow::pair_row)
        .collect()
}

fn names() -> Vec<String> {
    feature_names().iter().map(|s| s.to_string()).collect()
}

pub fn dispatch(cmd: &Command, cfg: &mut RunConfig, out: &mut Outputs) -> Result<(), CliError> {
    match cmd {
        Command::Synth { .. } => {
            cfg.synth.seed = need_seed(cfg, "synth")?;
            let s = generate_synthetic(&cfg.synth)?;
            for name in [TOPICS_FILE, QUESTIONS_FILE, EVENTS_FILE, TRUTH_FILE, EMBEDDINGS_FILE, TAXONOMY_FILE] {
                out.path(name)?;
            }
            s.write_dir(&out.dir)?;
            println!(
                "wrote {} topics, {} questions, {} events to {}",
                s.corpus.topic_count(),
                s.corpus.questions().len(),
                s.corpus.events().len(),
                out.dir.display()
            );
        }
        Command::Ingest { .. } => {
            let l = load_all(cfg, out)?;
            let c = &l.corpus;
            let onto = build_ontology(c.events())?;
            let (first, last) = c.time_range().unwrap_or((0, 0));
            let kinds = |k: EventKind| c.events_of_kind(k).count();
            let mut stats = json!({
                "topics": c.topic_count(),
                "questions": c.questions().len(),
                "questions_with_answer_counts": c.questions().iter().filter(|q| q.answer_count.is_some()).count(),
                "events": {
                    "merge": kinds(EventKind::Merge),
                    "unmerge": kinds(EventKind::Unmerge),
                    "parent_add": kinds(EventKind::ParentAdd),
                },
                "first": format_timestamp(first),
                "last": format_timestamp(last),
                "ontology": stats_json(&ontology_stats(&onto)),
            });
            if let Some(t) = &l.res.taxonomy {
                stats["taxonomy"] = stats_json(&ontology_stats(t));
            }
            if let Some(e) = &l.res.embeddings {
                stats["embeddings"] = json!({ "words": e.len(), "dim": e.dim() });
            }
            if let Some(t) = &l.truth {
                stats["truth_records"] = json!(t.len());
            }
            out.write_json("stats.json", &stats)?;
            println!("{}", serde_json::to_string_pretty(&stats).expect("json serializes"));
        }
        Command::Candidates { .. } => {
            let l = load_all(cfg, out)?;
            let c = &l.corpus;
            let view = c.snapshot(cutoff(cfg, c)?);
            let pairs = generate_candidates(&view, &cfg.filter())?;
            let name = |t| c.topic(t).map_or(String::new(), |x| x.name.clone());
            let rows: Vec<Vec<String>> = pairs
                .iter()
                .map(|p| vec![p.t1.to_string(), p.t2.to_string(), name(&p.t1), name(&p.t2)])
                .collect();
            write_rows(&out.path("candidates.csv")?, &["t1", "t2", "name1", "name2"], &rows)?;
            println!("{} candidate pairs", rows.len());
        }
        Command::Featurize { .. } => {
            let l = load_all(cfg, out)?;
            let c = &l.corpus;
            let ds = build_dataset(c, l.truth.as_deref(), &cfg.dataset())?;
            let index = CorpusIndex::new(c, l.res.tagger.as_ref());
            let fd = featurize_dataset(c, &index, &l.res, &ds, cutoff(cfg, c)?)?;
            write_features(&out.path("features.csv")?, &fd.pairs, &fd.rows)?;
            for s in [Split::Train, Split::Test, Split::Anomaly] {
                println!("{}: {} pairs", s.name(), ds.split(s).count());
            }
        }
        Command::Train { features, .. } => {
            let seed = need_seed(cfg, "train")?;
            if features.is_none() && cfg.corpus.is_none() {
                return Err(CliError::Usage("train needs --features, --corpus or both".into()));
            }
            if let Some(p) = features {
                let rows = load_features(p, out)?;
                let m = train_two_step(
                    &rows_of(&rows, Split::Train, Some(true)),
                    &rows_of(&rows, Split::Train, Some(false)),
                    &rows_of(&rows, Split::Anomaly, None),
                    &names(),
                    &cfg.two_step(),
                )?;
                out.write_text("model.json", &m.to_json()?)?;
                println!("wrote two-step model");
            }
            if cfg.corpus.is_some() {
                let l = load_all(cfg, out)?;
                let samples = direction_samples(&l.corpus)?;
                let m = train_direction(&samples, LinearKind::Logistic)?;
                let cv = cross_validate_direction(&samples, LinearKind::Logistic, cfg.folds, seed)?;
                out.write_json("direction.json", &serde_json::to_value(&m).expect("json serializes"))?;
                out.write_json("direction_cv.json", &serde_json::to_value(&cv).expect("json serializes"))?;
                println!("direction model: {}-fold accuracy {:.4}", cv.folds, cv.accuracy);
            }
        }
        Command::Predict { model, features, split } => {
            let split = Split::parse(split)
                .ok_or_else(|| CliError::Usage(format!("--split: expected train, test or anomaly, got `{split}`")))?;
            out.input(model)?;
            let m = TwoStepModel::from_json(&read_file(model)?).map_err(|e| CliError::Data(format!("{}: {e}", model.display())))?;
            let rows = rows_of(&load_features(features, out)?, split, None);
            let x: Vec<Vec<f64>> = rows.iter().map(|r| r.features.clone()).collect();
            let preds = predict_two_step(&m, &x)?;
            let keys: Vec<_> = rows.iter().map(|r| (r.t1.clone(), r.t2.clone())).collect();
            write_predictions(&out.path("predictions.csv")?, &keys, &preds)?;
            println!("{} predictions, {} positive", preds.len(), preds.iter().filter(|p| p.label).count());
        }
        Command::Eval { predictions, labels } => {
            out.input(predictions)?;
            out.input(labels)?;
            let truth = label_map(labels)?;
            let (mut predicted, mut actual) = (Vec::new(), Vec::new());
            for ((t1, t2), label) in read_labels(predictions)? {
                let a = truth.get(&(t1.clone(), t2.clone())).ok_or_else(|| {
                    CliError::Data(format!("{}: pair {t1} {t2} has no label in {}", predictions.display(), labels.display()))
                })?;
                predicted.push(label);
                actual.push(*a);
            }
            let p = prf(&predicted, &actual)?;
            let metrics = json!({
                "precision": p.precision,
                "recall": p.recall,
                "f_score": p.f_score,
                "counts": { "tp": p.tp, "fp": p.fp, "fn": p.fn_, "tn": p.tn },
            });
            out.write_json("metrics.json", &metrics)?;
            println!("precision {:.4} recall {:.4} f {:.4}", p.precision, p.recall, p.f_score);
        }
        Command::EarlyEval { model, .. } => {
            out.input(model)?;
            let m = TwoStepModel::from_json(&read_file(model)?).map_err(|e| CliError::Data(format!("{}: {e}", model.display())))?;
            let l = load_all(cfg, out)?;
            let c = &l.corpus;
            let dcfg = DatasetConfig {
                test_negatives: 0,
                anomaly_train_size: 0,
                ..cfg.dataset()
            };
            let ds = build_dataset(c, l.truth.as_deref(), &dcfg)?;
            let index = CorpusIndex::new(c, l.res.tagger.as_ref());
            let points = early_eval(&m, c, &index, &l.res, &ds.test_merges, cfg.month_step)?;
            let rows: Vec<Vec<String>> = points
                .iter()
                .map(|p| vec![p.month.to_string(), p.detected.to_string(), p.total.to_string(), p.recall.to_string()])
                .collect();
            write_rows(&out.path("early.csv")?, &["month", "detected", "total", "recall"], &rows)?;
            if let Some(last) = points.last() {
                println!("{} test merges, recall {:.4} after {} months", last.total, last.recall, last.month);
            }
        }
        Command::Ablate { features, .. } => {
            let rows = load_features(features, out)?;
            let test = rows_of(&rows, Split::Test, None);
            let x: Vec<Vec<f64>> = test.iter().map(|r| r.features.clone()).collect();
            let y: Vec<bool> = rows.iter().filter(|r| r.pair.split == Split::Test).map(|r| r.pair.label).collect();
            let table = ablation_table(
                &rows_of(&rows, Split::Train, Some(true)),
                &rows_of(&rows, Split::Train, Some(false)),
                &rows_of(&rows, Split::Anomaly, None),
                &x,
                &y,
                &names(),
                &cfg.two_step(),
            )?;
            let out_rows: Vec<Vec<String>> = table
                .iter()
                .map(|r| {
                    let groups: Vec<&str> = r.groups.iter().map(|g| g.name()).collect();
                    let p = &r.prf;
                    vec![
                        groups.join("+"),
                        p.precision.to_string(),
                        p.recall.to_string(),
                        p.f_score.to_string(),
                        p.tp.to_string(),
                        p.fp.to_string(),
                        p.fn_.to_string(),
                        p.tn.to_string(),
                    ]
                })
                .collect();
            let header = ["groups", "precision", "recall", "f_score", "tp", "fp", "fn", "tn"];
            write_rows(&out.path("ablation.csv")?, &header, &out_rows)?;
            for r in &out_rows {
                println!("{:<40} f {}", r[0], r[3]);
            }
        }
        Command::RankFeatures { features, .. } => {
            let rows = load_features(features, out)?;
            let train: Vec<&FeatureRow> = rows.iter().filter(|r| r.pair.split == Split::Train).collect();
            let x: Vec<Vec<f64>> = train.iter().map(|r| r.features.clone()).collect();
            let y: Vec<bool> = train.iter().map(|r| r.pair.label).collect();
            let params = LinearParams {
                c: cfg.c,
                ..LinearParams::default()
            };
            let ranks = rfe_rank(&x, &y, &params)?;
            let mut order: Vec<usize> = (0..ranks.len()).collect();
            order.sort_by_key(|&i| ranks[i]);
            let out_rows: Vec<Vec<String>> = order
                .iter()
                .map(|&i| vec![ranks[i].to_string(), CATALOG[i].name.to_string(), CATALOG[i].group.name().to_string()])
                .collect();
            write_rows(&out.path("rfe.csv")?, &["rank", "feature", "group"], &out_rows)?;
            println!("top feature: {}", out_rows[0][1]);
        }
    }
    Ok(())
}
