use std::collections::HashMap;
use std::path::Path;

use topicmerge::pipeline::{feature_names, LabeledPair, PairKind, PairRow, Prediction, Split};
use topicmerge::TopicId;

use crate::CliError;

const PAIR_COLUMNS: [&str; 5] = ["t1", "t2", "kind", "split", "label"];

fn data(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

fn at(path: &Path, line: u64, msg: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}:{line}: {msg}", path.display()))
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>, CliError> {
    csv::Reader::from_path(path).map_err(|e| data(path, e))
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>, CliError> {
    csv::Writer::from_path(path).map_err(|e| data(path, e))
}

fn parse_label(path: &Path, line: u64, s: &str) -> Result<bool, CliError> {
    match s {
        "1" | "true" => Ok(true),
        "0" | "false" => Ok(false),
        _ => Err(at(path, line, format!("bad label `{s}`"))),
    }
}

fn label_text(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// One row of `features.csv`.
pub struct FeatureRow {
    pub pair: LabeledPair,
    pub features: Vec<f64>,
}

impl FeatureRow {
    pub fn pair_row(&self) -> PairRow {
        PairRow {
            t1: self.pair.t1.clone(),
            t2: self.pair.t2.clone(),
            features: self.features.clone(),
        }
    }
}

pub fn write_features(path: &Path, pairs: &[LabeledPair], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let mut w = writer(path)?;
    let header: Vec<&str> = PAIR_COLUMNS.iter().copied().chain(feature_names()).collect();
    w.write_record(&header).map_err(|e| data(path, e))?;
    for (p, r) in pairs.iter().zip(rows) {
        let mut rec = vec![
            p.t1.to_string(),
            p.t2.to_string(),
            p.kind.name().to_string(),
            p.split.name().to_string(),
            label_text(p.label).to_string(),
        ];
        rec.extend(r.iter().map(|x| x.to_string()));
        w.write_record(&rec).map_err(|e| data(path, e))?;
    }
    w.flush().map_err(|e| data(path, e))
}

pub fn read_features(path: &Path) -> Result<Vec<FeatureRow>, CliError> {
    let mut r = reader(path)?;
    let header = r.headers().map_err(|e| data(path, e))?.clone();
    let expected: Vec<&str> = PAIR_COLUMNS.iter().copied().chain(feature_names()).collect();
    if header.iter().ne(expected.iter().copied()) {
        return Err(at(path, 1, "header does not match the feature catalog"));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| data(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        let kind = PairKind::parse(&rec[2]).ok_or_else(|| at(path, line, format!("bad kind `{}`", &rec[2])))?;
        let split = Split::parse(&rec[3]).ok_or_else(|| at(path, line, format!("bad split `{}`", &rec[3])))?;
        let label = parse_label(path, line, &rec[4])?;
        let features = rec
            .iter()
            .skip(PAIR_COLUMNS.len())
            .map(|s| s.parse::<f64>().map_err(|_| at(path, line, format!("bad number `{s}`"))))
            .collect::<Result<Vec<f64>, _>>()?;
        out.push(FeatureRow {
            pair: LabeledPair {
                t1: TopicId::new(&rec[0]),
                t2: TopicId::new(&rec[1]),
                kind,
                split,
                label,
                at: 0,
            },
            features,
        });
    }
    Ok(out)
}

pub fn write_predictions(path: &Path, pairs: &[(TopicId, TopicId)], preds: &[Prediction]) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(["t1", "t2", "stage", "score", "label"]).map_err(|e| data(path, e))?;
    for ((t1, t2), p) in pairs.iter().zip(preds) {
        w.write_record([t1.as_str(), t2.as_str(), p.stage.name(), &p.score.to_string(), label_text(p.label)])
            .map_err(|e| data(path, e))?;
    }
    w.flush().map_err(|e| data(path, e))
}

pub type Labeled = ((TopicId, TopicId), bool);

/// `(t1, t2) -> label` from any CSV with those three columns.
pub fn read_labels(path: &Path) -> Result<Vec<Labeled>, CliError> {
    let mut r = reader(path)?;
    let header = r.headers().map_err(|e| data(path, e))?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| at(path, 1, format!("missing column `{name}`")))
    };
    let (c1, c2, cl) = (col("t1")?, col("t2")?, col("label")?);
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| data(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        let label = parse_label(path, line, &rec[cl])?;
        out.push(((TopicId::new(&rec[c1]), TopicId::new(&rec[c2])), label));
    }
    Ok(out)
}

/// Labels keyed by pair; a pair listed twice must agree with itself.
pub fn label_map(path: &Path) -> Result<HashMap<(TopicId, TopicId), bool>, CliError> {
    let mut map = HashMap::new();
    for (key, label) in read_labels(path)? {
        if let Some(old) = map.insert(key.clone(), label) {
            if old != label {
                return Err(data(path, format!("conflicting labels for {} {}", key.0, key.1)));
            }
        }
    }
    Ok(map)
}

pub fn write_rows(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(header).map_err(|e| data(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| data(path, e))?;
    }
    w.flush().map_err(|e| data(path, e))
}
