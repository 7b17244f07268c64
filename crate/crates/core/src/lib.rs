//! Predicting duplicate topics in community Q&A corpora.
//!
//! Competing topic names for the same concept are detected with a two-step
//! model: an isolation forest trained on ordinary topic pairs discards pairs
//! that look unremarkable, and a cost-sensitive logistic regression labels
//! the survivors. A separate linear model predicts which name wins a merge.
//!
//! The crate is organized bottom-up:
//!
//! - [`corpus`]: dataset loading, time-sliced views, co-occurrence.
//! - [`textfeat`], [`ontology`], [`embed`]: pair similarity measures.
//! - [`models`]: isolation forest, linear models, metrics, feature ranking.
//! - [`pipeline`]: candidate generation, featurization, training and evaluation.
//! - [`synth`]: seeded synthetic corpora with planted merges.

pub mod corpus;
pub mod embed;
pub mod error;
pub mod models;
pub mod ontology;
pub mod pipeline;
pub mod synth;
pub mod textfeat;

pub use corpus::{Corpus, Event, EventKind, Question, SnapshotView, Timestamp, Topic, TopicId};
pub use error::{Error, Result};
