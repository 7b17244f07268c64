use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use topicmerge::models::{IForestParams, LinearParams};
use topicmerge::pipeline::{DatasetConfig, FilterConfig, TwoStepConfig};
use topicmerge::synth::SynthConfig;

use crate::CliError;

/// Effective settings of one invocation.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub corpus: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub taxonomy: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    /// Snapshot date, `YYYY-MM-DD` or RFC 3339; the corpus end when unset.
    pub cutoff: Option<String>,
    pub train_fraction: f64,
    pub test_negatives: usize,
    pub anomaly_train_size: usize,
    pub neighbors_per_merge: usize,
    pub min_questions: usize,
    pub jw_threshold: f64,
    pub cooccur_threshold: f64,
    pub trees: usize,
    pub subsample: usize,
    pub contamination: f64,
    pub c: f64,
    pub month_step: u32,
    pub folds: usize,
    pub synth: SynthConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let d = DatasetConfig::default();
        let f = IForestParams::default();
        RunConfig {
            seed: None,
            jobs: None,
            corpus: None,
            embeddings: None,
            taxonomy: None,
            truth: None,
            cutoff: None,
            train_fraction: d.train_fraction,
            test_negatives: d.test_negatives,
            anomaly_train_size: d.anomaly_train_size,
            neighbors_per_merge: d.neighbors_per_merge,
            min_questions: d.filter.min_questions,
            jw_threshold: d.filter.jw_threshold,
            cooccur_threshold: d.filter.cooccur_threshold,
            trees: f.n_trees,
            subsample: f.subsample,
            contamination: f.contamination,
            c: LinearParams::default().c,
            month_step: 1,
            folds: 10,
            synth: SynthConfig::default(),
        }
    }
}

fn parse_scalar(old: &Value, raw: &str) -> Option<Value> {
    match old {
        Value::Bool(_) => raw.parse::<bool>().ok().map(Value::Bool),
        Value::String(_) => Some(Value::String(raw.to_string())),
        Value::Number(n) if n.is_u64() => raw.parse::<u64>().ok().map(Value::from),
        Value::Number(n) if n.is_i64() => raw.parse::<i64>().ok().map(Value::from),
        Value::Number(_) => raw.parse::<f64>().ok().and_then(|x| serde_json::Number::from_f64(x).map(Value::Number)),
        Value::Null => Some(
            raw.parse::<u64>()
                .map(Value::from)
                .unwrap_or_else(|_| Value::String(raw.to_string())),
        ),
        Value::Array(_) | Value::Object(_) => None,
    }
}

fn set_key(root: &mut Value, key: &str, raw: &str) -> std::result::Result<(), String> {
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let Value::Object(map) = node else {
            return Err(format!("unknown key `{key}`"));
        };
        let Some(child) = map.get_mut(*part) else {
            return Err(format!("unknown key `{key}`"));
        };
        if i + 1 == parts.len() {
            *child = parse_scalar(child, raw).ok_or_else(|| format!("bad value `{raw}` for `{key}`"))?;
            return Ok(());
        }
        node = child;
    }
    Err(format!("unknown key `{key}`"))
}

impl RunConfig {
    /// Defaults overlaid with a flat `key = value` file. Nested fields use
    /// dotted keys such as `synth.merges`.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let mut value = serde_json::to_value(RunConfig::default()).expect("config serializes");
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let at = |msg: String| CliError::Data(format!("{}:{}: {msg}", path.display(), n + 1));
            let (key, raw) = line.split_once('=').ok_or_else(|| at("expected `key = value`".into()))?;
            set_key(&mut value, key.trim(), raw.trim()).map_err(at)?;
            serde_json::from_value::<RunConfig>(value.clone()).map_err(|e| at(e.to_string()))?;
        }
        Ok(serde_json::from_value(value).expect("validated above"))
    }

    /// The flat text form read by [`RunConfig::load`].
    pub fn to_text(&self, command: &str) -> String {
        let mut lines = Vec::new();
        flatten("", &serde_json::to_value(self).expect("config serializes"), &mut lines);
        let mut out = format!("# topicmerge {command}\n");
        for l in lines.into_iter().filter(|l| command == "synth" || !l.starts_with("synth.")) {
            out.push_str(&l);
            out.push('\n');
        }
        out
    }

    pub fn filter(&self) -> FilterConfig {
        FilterConfig {
            min_questions: self.min_questions,
            jw_threshold: self.jw_threshold,
            cooccur_threshold: self.cooccur_threshold,
        }
    }

    pub fn dataset(&self) -> DatasetConfig {
        DatasetConfig {
            filter: self.filter(),
            train_fraction: self.train_fraction,
            test_negatives: self.test_negatives,
            anomaly_train_size: self.anomaly_train_size,
            neighbors_per_merge: self.neighbors_per_merge,
            seed: self.seed.unwrap_or(0),
        }
    }

    pub fn two_step(&self) -> TwoStepConfig {
        TwoStepConfig {
            iforest: IForestParams {
                n_trees: self.trees,
                subsample: self.subsample,
                contamination: self.contamination,
                ..IForestParams::default()
            },
            linear: LinearParams {
                c: self.c,
                ..LinearParams::default()
            },
            columns: None,
            seed: self.seed.unwrap_or(0),
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            let map: &Map<String, Value> = map;
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, child, out);
            }
        }
        Value::Null => {}
        Value::String(s) => out.push(format!("{prefix} = {s}")),
        other => out.push(format!("{prefix} = {other}")),
    }
}
