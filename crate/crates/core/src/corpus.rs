//! Topic/question/event dataset, time-sliced views and co-occurrence.
//!
//! A [`Corpus`] is immutable after construction. Questions are kept sorted by
//! creation time so that a [`SnapshotView`] is a cheap prefix filter over the
//! base corpus rather than a copy.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Seconds since the Unix epoch, UTC.
pub type Timestamp = i64;

pub const TOPICS_FILE: &str = "topics.jsonl";
pub const QUESTIONS_FILE: &str = "questions.jsonl";
pub const EVENTS_FILE: &str = "events.jsonl";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TopicId(pub String);

impl TopicId {
    pub fn new(id: impl Into<String>) -> Self {
        TopicId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TopicId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TopicId {
    fn from(s: &str) -> Self {
        TopicId(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Topic {
    pub id: TopicId,
    pub name: String,
    pub created_at: Timestamp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Question {
    pub id: String,
    pub text: String,
    pub created_at: Timestamp,
    pub topic_ids: Vec<TopicId>,
    /// Number of answers, when the source provides it.
    pub answer_count: Option<u32>,
}

impl Question {
    pub fn has_topic(&self, t: &TopicId) -> bool {
        self.topic_ids.iter().any(|x| x == t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Merge,
    Unmerge,
    /// `src` gains `dst` as a parent.
    ParentAdd,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub kind: EventKind,
    /// For merges, the absorbed topic. For parent additions, the child.
    pub src: TopicId,
    /// For merges, the surviving topic. For parent additions, the parent.
    pub dst: TopicId,
    pub at: Timestamp,
}

impl Event {
    fn order_key(&self) -> (Timestamp, &TopicId, &TopicId) {
        (self.at, &self.src, &self.dst)
    }
}

pub fn parse_timestamp(s: &str) -> Option<Timestamp> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp());
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|dt| dt.and_utc().timestamp())
}

pub fn format_timestamp(ts: Timestamp) -> String {
    DateTime::<Utc>::from_timestamp(ts, 0)
        .map(|dt| dt.format("%Y-%m-%dT%H:%M:%SZ").to_string())
        .unwrap_or_else(|| ts.to_string())
}

#[derive(Serialize, Deserialize)]
struct TopicRecord {
    id: String,
    name: String,
    created_at: String,
}

#[derive(Serialize, Deserialize)]
struct QuestionRecord {
    id: String,
    text: String,
    created_at: String,
    topic_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    answer_count: Option<u32>,
}

#[derive(Serialize, Deserialize)]
struct EventRecord {
    kind: EventKind,
    src: String,
    dst: String,
    at: String,
}

#[derive(Debug)]
pub struct Corpus {
    topics: BTreeMap<TopicId, Topic>,
    /// Sorted by `(created_at, id)`.
    questions: Vec<Question>,
    /// Sorted by `(at, src, dst)`.
    events: Vec<Event>,
    /// Question indices per topic, ascending (and therefore time-ordered).
    by_topic: HashMap<TopicId, Vec<usize>>,
}

impl Corpus {
    /// Validates and indexes the given records.
    pub fn new(topics: Vec<Topic>, mut questions: Vec<Question>, mut events: Vec<Event>) -> Result<Self> {
        let mut topic_map = BTreeMap::new();
        for t in topics {
            if t.name.trim().is_empty() {
                return Err(Error::InvalidConfig(format!("topic `{}` has an empty name", t.id)));
            }
            if topic_map.contains_key(&t.id) {
                return Err(Error::DuplicateId {
                    kind: "topic",
                    id: t.id.0,
                });
            }
            topic_map.insert(t.id.clone(), t);
        }

        let mut seen = HashSet::new();
        for q in &questions {
            if !seen.insert(q.id.as_str()) {
                return Err(Error::DuplicateId {
                    kind: "question",
                    id: q.id.clone(),
                });
            }
            if q.topic_ids.is_empty() {
                return Err(Error::InvalidConfig(format!("question `{}` has no topics", q.id)));
            }
            for t in &q.topic_ids {
                if !topic_map.contains_key(t) {
                    return Err(Error::DanglingReference {
                        owner: format!("question `{}`", q.id),
                        topic: t.0.clone(),
                    });
                }
            }
        }
        for e in &events {
            for t in [&e.src, &e.dst] {
                if !topic_map.contains_key(t) {
                    return Err(Error::DanglingReference {
                        owner: format!("{:?} event at {}", e.kind, format_timestamp(e.at)),
                        topic: t.0.clone(),
                    });
                }
            }
            if e.src == e.dst {
                return Err(Error::InvalidConfig(format!(
                    "{:?} event with identical endpoints `{}`",
                    e.kind, e.src
                )));
            }
        }

        questions.sort_by(|a, b| (a.created_at, &a.id).cmp(&(b.created_at, &b.id)));
        for q in &mut questions {
            q.topic_ids.sort();
            q.topic_ids.dedup();
        }
        events.sort_by(|a, b| a.order_key().cmp(&b.order_key()));

        let mut by_topic: HashMap<TopicId, Vec<usize>> = HashMap::new();
        for (i, q) in questions.iter().enumerate() {
            for t in &q.topic_ids {
                by_topic.entry(t.clone()).or_default().push(i);
            }
        }

        Ok(Corpus {
            topics: topic_map,
            questions,
            events,
            by_topic,
        })
    }

    pub fn topics(&self) -> impl Iterator<Item = &Topic> {
        self.topics.values()
    }

    pub fn topic(&self, id: &TopicId) -> Option<&Topic> {
        self.topics.get(id)
    }

    pub fn questions(&self) -> &[Question] {
        &self.questions
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn topic_count(&self) -> usize {
        self.topics.len()
    }

    /// Earliest and latest timestamp of any record.
    pub fn time_range(&self) -> Option<(Timestamp, Timestamp)> {
        let stamps = self
            .topics
            .values()
            .map(|t| t.created_at)
            .chain(self.questions.iter().map(|q| q.created_at))
            .chain(self.events.iter().map(|e| e.at));
        stamps.fold(None, |acc, t| match acc {
            None => Some((t, t)),
            Some((lo, hi)) => Some((lo.min(t), hi.max(t))),
        })
    }

    /// View over the whole corpus.
    pub fn full_view(&self) -> SnapshotView<'_> {
        let cutoff = self.time_range().map(|(_, hi)| hi).unwrap_or(Timestamp::MAX);
        SnapshotView { base: self, cutoff }
    }

    pub fn snapshot(&self, cutoff: Timestamp) -> SnapshotView<'_> {
        SnapshotView { base: self, cutoff }
    }

    pub fn events_of_kind(&self, kind: EventKind) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(move |e| e.kind == kind)
    }

    /// Writes the three JSONL files into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        write_jsonl(
            &dir.join(TOPICS_FILE),
            self.topics.values().map(|t| TopicRecord {
                id: t.id.0.clone(),
                name: t.name.clone(),
                created_at: format_timestamp(t.created_at),
            }),
        )?;
        write_jsonl(
            &dir.join(QUESTIONS_FILE),
            self.questions.iter().map(|q| QuestionRecord {
                id: q.id.clone(),
                text: q.text.clone(),
                created_at: format_timestamp(q.created_at),
                topic_ids: q.topic_ids.iter().map(|t| t.0.clone()).collect(),
                answer_count: q.answer_count,
            }),
        )?;
        write_jsonl(
            &dir.join(EVENTS_FILE),
            self.events.iter().map(|e| EventRecord {
                kind: e.kind,
                src: e.src.0.clone(),
                dst: e.dst.0.clone(),
                at: format_timestamp(e.at),
            }),
        )
    }
}

pub(crate) fn write_jsonl<T: Serialize>(path: &Path, records: impl Iterator<Item = T>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for r in records {
        let line = serde_json::to_string(&r).map_err(|e| Error::Format(e.to_string()))?;
        writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<(usize, T)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| Error::malformed(path, i + 1, e))?;
        out.push((i + 1, rec));
    }
    Ok(out)
}

fn stamp(path: &Path, line: usize, s: &str) -> Result<Timestamp> {
    parse_timestamp(s).ok_or_else(|| Error::malformed(path, line, format!("bad timestamp `{s}`")))
}

/// Loads and validates a corpus from its three JSONL files.
pub fn load_corpus(topics_path: &Path, questions_path: &Path, events_path: &Path) -> Result<Corpus> {
    let topics = read_jsonl::<TopicRecord>(topics_path)?
        .into_iter()
        .map(|(line, r)| {
            Ok(Topic {
                id: TopicId(r.id),
                name: r.name,
                created_at: stamp(topics_path, line, &r.created_at)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let questions = read_jsonl::<QuestionRecord>(questions_path)?
        .into_iter()
        .map(|(line, r)| {
            Ok(Question {
                id: r.id,
                text: r.text,
                created_at: stamp(questions_path, line, &r.created_at)?,
                topic_ids: r.topic_ids.into_iter().map(TopicId).collect(),
                answer_count: r.answer_count,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let events = read_jsonl::<EventRecord>(events_path)?
        .into_iter()
        .map(|(line, r)| {
            Ok(Event {
                kind: r.kind,
                src: TopicId(r.src),
                dst: TopicId(r.dst),
                at: stamp(events_path, line, &r.at)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Corpus::new(topics, questions, events)
}

/// Loads `topics.jsonl`, `questions.jsonl` and `events.jsonl` from `dir`.
pub fn load_corpus_dir(dir: &Path) -> Result<Corpus> {
    load_corpus(&dir.join(TOPICS_FILE), &dir.join(QUESTIONS_FILE), &dir.join(EVENTS_FILE))
}

/// Read-only view of a corpus restricted to records dated at or before `cutoff`.
#[derive(Clone, Copy, Debug)]
pub struct SnapshotView<'a> {
    base: &'a Corpus,
    cutoff: Timestamp,
}

impl<'a> SnapshotView<'a> {
    pub fn base(&self) -> &'a Corpus {
        self.base
    }

    pub fn cutoff(&self) -> Timestamp {
        self.cutoff
    }

    pub fn questions(&self) -> &'a [Question] {
        let end = self.base.questions.partition_point(|q| q.created_at <= self.cutoff);
        &self.base.questions[..end]
    }

    pub fn events(&self) -> &'a [Event] {
        let end = self.base.events.partition_point(|e| e.at <= self.cutoff);
        &self.base.events[..end]
    }

    pub fn topics(&self) -> impl Iterator<Item = &'a Topic> + '_ {
        let cutoff = self.cutoff;
        self.base.topics.values().filter(move |t| t.created_at <= cutoff)
    }

    pub fn topic(&self, t: &TopicId) -> Result<&'a Topic> {
        self.base.topic(t).ok_or_else(|| Error::UnknownTopic(t.0.clone()))
    }

    /// Positions in [`Corpus::questions`] of the visible questions tagged `t`.
    pub fn question_indices(&self, t: &TopicId) -> Result<&'a [usize]> {
        self.topic(t)?;
        let all = self.base.by_topic.get(t).map(Vec::as_slice).unwrap_or(&[]);
        let end = all.partition_point(|&i| self.base.questions[i].created_at <= self.cutoff);
        Ok(&all[..end])
    }

    /// Questions tagged `t` that are visible in this view.
    pub fn questions_of(&self, t: &TopicId) -> Result<impl Iterator<Item = &'a Question> + 'a> {
        let qs = &self.base.questions;
        Ok(self.question_indices(t)?.iter().map(move |&i| &qs[i]))
    }

    pub fn question_count(&self, t: &TopicId) -> Result<usize> {
        Ok(self.question_indices(t)?.len())
    }

    /// Other tags on questions tagged `t`, counted with multiplicity.
    pub fn cooccurrence(&self, t: &TopicId) -> Result<BTreeMap<TopicId, usize>> {
        let mut counts = BTreeMap::new();
        for q in self.questions_of(t)? {
            for other in q.topic_ids.iter().filter(|&o| o != t) {
                *counts.entry(other.clone()).or_insert(0) += 1;
            }
        }
        Ok(counts)
    }
}

/// Splits events chronologically: the first `ceil(n * train_fraction)` go to
/// training. Ties are ordered by `(at, src, dst)`.
pub fn chrono_split(events: &[Event], train_fraction: f64) -> Result<(Vec<Event>, Vec<Event>)> {
    if events.is_empty() {
        return Err(Error::EmptyInput("no events to split"));
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "train fraction {train_fraction} outside (0, 1)"
        )));
    }
    let mut sorted = events.to_vec();
    sorted.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
    let n_train = ((sorted.len() as f64 * train_fraction) - 1e-9).ceil() as usize;
    let test = sorted.split_off(n_train.min(sorted.len()));
    Ok((sorted, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn topic(id: &str, day: i64) -> Topic {
        Topic {
            id: id.into(),
            name: format!("Topic {id}"),
            created_at: day * 86_400,
        }
    }

    fn question(id: &str, day: i64, tags: &[&str]) -> Question {
        Question {
            id: id.to_string(),
            text: format!("question {id}"),
            created_at: day * 86_400,
            topic_ids: tags.iter().map(|&t| t.into()).collect(),
            answer_count: None,
        }
    }

    fn merge(src: &str, dst: &str, day: i64) -> Event {
        Event {
            kind: EventKind::Merge,
            src: src.into(),
            dst: dst.into(),
            at: day * 86_400,
        }
    }

    #[test]
    fn dangling_reference_rejected() {
        let err = Corpus::new(vec![topic("a", 0)], vec![question("q", 1, &["a", "zz"])], vec![]).unwrap_err();
        assert!(matches!(err, Error::DanglingReference { ref topic, .. } if topic == "zz"));
    }

    #[test]
    fn duplicate_topic_rejected() {
        let err = Corpus::new(vec![topic("a", 0), topic("a", 1)], vec![], vec![]).unwrap_err();
        assert!(matches!(err, Error::DuplicateId { kind: "topic", .. }));
    }

    #[test]
    fn snapshot_filters_by_cutoff() {
        let c = Corpus::new(
            vec![topic("a", 0)],
            vec![question("q1", 1, &["a"]), question("q2", 15, &["a"]), question("q3", 40, &["a"])],
            vec![],
        )
        .unwrap();
        let v = c.snapshot(30 * 86_400);
        assert_eq!(v.questions().len(), 2);
        assert_eq!(v.question_count(&"a".into()).unwrap(), 2);
        assert_eq!(c.snapshot(-1).questions().len(), 0);
        assert_eq!(c.full_view().questions().len(), 3);
    }

    #[test]
    fn cooccurrence_counts_other_tags() {
        let c = Corpus::new(
            vec![topic("t", 0), topic("a", 0), topic("b", 0), topic("lonely", 0)],
            vec![question("q1", 1, &["t", "a"]), question("q2", 2, &["t", "a", "b"]), question("q3", 3, &["lonely"])],
            vec![],
        )
        .unwrap();
        let v = c.full_view();
        let co = v.cooccurrence(&"t".into()).unwrap();
        assert_eq!(co.get(&"a".into()), Some(&2));
        assert_eq!(co.get(&"b".into()), Some(&1));
        assert_eq!(co.len(), 2);
        assert!(v.cooccurrence(&"lonely".into()).unwrap().is_empty());
        assert!(matches!(v.cooccurrence(&"nope".into()), Err(Error::UnknownTopic(_))));
    }

    #[test]
    fn split_seventy_thirty() {
        let events: Vec<Event> = (0..10).map(|i| merge(&format!("s{i}"), "d", 10 - i)).collect();
        let (train, test) = chrono_split(&events, 0.7).unwrap();
        assert_eq!((train.len(), test.len()), (7, 3));
        assert!(train.iter().map(|e| e.at).max() <= test.iter().map(|e| e.at).min());
    }

    #[test]
    fn split_single_event_goes_to_train() {
        let (train, test) = chrono_split(&[merge("a", "b", 1)], 0.7).unwrap();
        assert_eq!(train.len(), 1);
        assert!(test.is_empty());
        assert!(matches!(chrono_split(&[], 0.7), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn split_breaks_ties_by_ids() {
        let events = vec![merge("c", "x", 5), merge("a", "y", 5), merge("b", "x", 5), merge("a", "x", 5)];
        let (train, test) = chrono_split(&events, 0.5).unwrap();
        let order: Vec<_> = train.iter().chain(&test).map(|e| (e.src.as_str(), e.dst.as_str())).collect();
        // stable-sort oracle
        let mut expected: Vec<_> = events.iter().map(|e| (e.src.as_str(), e.dst.as_str())).collect();
        expected.sort();
        assert_eq!(order, expected);
    }

    #[test]
    fn timestamps_round_trip() {
        let t = parse_timestamp("2016-02-21T00:00:00Z").unwrap();
        assert_eq!(format_timestamp(t), "2016-02-21T00:00:00Z");
        assert_eq!(parse_timestamp("2016-02-21"), Some(t));
        assert_eq!(parse_timestamp("yesterday"), None);
    }
}
