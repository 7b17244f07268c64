//! Command-line front end for the topic-merge pipeline.

mod commands;
mod config;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or missing required settings; exit code 2.
    Usage(String),
    /// Invalid input data or failed validation; exit code 1.
    Data(String),
}

impl From<topicmerge::Error> for CliError {
    fn from(e: topicmerge::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "topicmerge", version, about = "Predict duplicate topics and merge direction in Q&A corpora")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Worker threads for featurization and scoring [default: all processors].
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Random seed; required by `synth` and `train`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Flat `key = value` settings file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Default)]
struct Inputs {
    /// Directory holding topics.jsonl, questions.jsonl and events.jsonl.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Word vectors in text format [default: <corpus>/embeddings.vec if present].
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// `child<TAB>parent` word taxonomy [default: <corpus>/taxonomy.tsv if present].
    #[arg(long)]
    taxonomy: Option<PathBuf>,
    /// Ground-truth pair classes [default: <corpus>/ground_truth.jsonl if present].
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Snapshot date, YYYY-MM-DD or RFC 3339.
    #[arg(long)]
    cutoff: Option<String>,
}

#[derive(Args, Default)]
struct FilterArgs {
    #[arg(long)]
    min_questions: Option<usize>,
    #[arg(long)]
    jw_threshold: Option<f64>,
    #[arg(long)]
    cooccur_threshold: Option<f64>,
}

#[derive(Args, Default)]
struct SplitArgs {
    /// Share of merges, in time order, used for training.
    #[arg(long)]
    train_fraction: Option<f64>,
    /// Candidate pairs sampled as negative test instances.
    #[arg(long)]
    test_negatives: Option<usize>,
    /// Candidate pairs reserved for the anomaly filter.
    #[arg(long)]
    anomaly_size: Option<usize>,
}

#[derive(Args, Default)]
struct ModelArgs {
    /// Isolation-forest trees.
    #[arg(long)]
    trees: Option<usize>,
    /// Isolation-forest subsample size.
    #[arg(long)]
    subsample: Option<usize>,
    #[arg(long)]
    contamination: Option<f64>,
    /// Inverse regularization strength of the classifier.
    #[arg(long)]
    c: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus with planted merges.
    Synth {
        #[arg(long)]
        topics: Option<usize>,
        #[arg(long)]
        merges: Option<usize>,
        #[arg(long)]
        neighbors: Option<usize>,
        #[arg(long)]
        unmerges: Option<usize>,
    },
    /// Validate a corpus and report statistics.
    Ingest {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// List candidate pairs that pass every filter.
    Candidates {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        filter: FilterArgs,
    },
    /// Build the labeled pair set and its feature matrix.
    Featurize {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        filter: FilterArgs,
        #[command(flatten)]
        split: SplitArgs,
    },
    /// Train the two-step model from features, the direction model from a corpus, or both.
    Train {
        #[arg(long)]
        features: Option<PathBuf>,
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        model: ModelArgs,
        /// Cross-validation folds for the direction model.
        #[arg(long)]
        folds: Option<usize>,
    },
    /// Score one split of a feature file.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long, default_value = "test")]
        split: String,
    },
    /// Compare predictions with labels.
    Eval {
        #[arg(long)]
        predictions: PathBuf,
        /// Any CSV with t1, t2 and label columns, such as features.csv.
        #[arg(long)]
        labels: PathBuf,
    },
    /// Cumulative recall of held-out merges by snapshot month.
    EarlyEval {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long)]
        train_fraction: Option<f64>,
        #[arg(long)]
        month_step: Option<u32>,
    },
    /// Retrain on every combination of feature groups.
    Ablate {
        #[arg(long)]
        features: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Rank features by recursive elimination on the training split.
    RankFeatures {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        c: Option<f64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Synth { .. } => "synth",
            Command::Ingest { .. } => "ingest",
            Command::Candidates { .. } => "candidates",
            Command::Featurize { .. } => "featurize",
            Command::Train { .. } => "train",
            Command::Predict { .. } => "predict",
            Command::Eval { .. } => "eval",
            Command::EarlyEval { .. } => "early-eval",
            Command::Ablate { .. } => "ablate",
            Command::RankFeatures { .. } => "rank-features",
        }
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

impl Inputs {
    fn apply(&self, cfg: &mut RunConfig) {
        let some = |p: &Option<PathBuf>, slot: &mut Option<PathBuf>| {
            if p.is_some() {
                slot.clone_from(p);
            }
        };
        some(&self.corpus, &mut cfg.corpus);
        some(&self.embeddings, &mut cfg.embeddings);
        some(&self.taxonomy, &mut cfg.taxonomy);
        some(&self.truth, &mut cfg.truth);
        if self.cutoff.is_some() {
            cfg.cutoff.clone_from(&self.cutoff);
        }
    }
}

impl FilterArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        set(&mut cfg.min_questions, self.min_questions);
        set(&mut cfg.jw_threshold, self.jw_threshold);
        set(&mut cfg.cooccur_threshold, self.cooccur_threshold);
    }
}

impl ModelArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        set(&mut cfg.trees, self.trees);
        set(&mut cfg.subsample, self.subsample);
        set(&mut cfg.contamination, self.contamination);
        set(&mut cfg.c, self.c);
    }
}

fn apply_flags(cmd: &Command, cfg: &mut RunConfig) {
    match cmd {
        Command::Synth {
            topics,
            merges,
            neighbors,
            unmerges,
        } => {
            set(&mut cfg.synth.topics, *topics);
            set(&mut cfg.synth.merges, *merges);
            set(&mut cfg.synth.neighbors, *neighbors);
            set(&mut cfg.synth.unmerges, *unmerges);
        }
        Command::Ingest { inputs } => inputs.apply(cfg),
        Command::Candidates { inputs, filter } => {
            inputs.apply(cfg);
            filter.apply(cfg);
        }
        Command::Featurize { inputs, filter, split } => {
            inputs.apply(cfg);
            filter.apply(cfg);
            set(&mut cfg.train_fraction, split.train_fraction);
            set(&mut cfg.test_negatives, split.test_negatives);
            set(&mut cfg.anomaly_train_size, split.anomaly_size);
        }
        Command::Train {
            inputs, model, folds, ..
        } => {
            inputs.apply(cfg);
            model.apply(cfg);
            set(&mut cfg.folds, *folds);
        }
        Command::EarlyEval {
            inputs,
            filter,
            train_fraction,
            month_step,
            ..
        } => {
            inputs.apply(cfg);
            filter.apply(cfg);
            set(&mut cfg.train_fraction, *train_fraction);
            set(&mut cfg.month_step, *month_step);
        }
        Command::Ablate { model, .. } => model.apply(cfg),
        Command::RankFeatures { c, .. } => set(&mut cfg.c, *c),
        Command::Predict { .. } | Command::Eval { .. } => {}
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(cli.common.config.as_deref())?;
    set(&mut cfg.seed, cli.common.seed.map(Some));
    set(&mut cfg.jobs, cli.common.jobs.map(Some));
    apply_flags(&cli.command, &mut cfg);
    if let Some(jobs) = cfg.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
    }
    let mut out = commands::Outputs::new(&cli.common.out, cli.common.config.as_deref())?;
    commands::dispatch(&cli.command, &mut cfg, &mut out)?;
    out.write_text(commands::RUN_CONFIG, &cfg.to_text(cli.command.name()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
