use topicmerge::pipeline::{
    build_dataset, feature_names, featurize_dataset, CorpusIndex, Dataset, DatasetConfig, FeaturizedDataset,
    PairRow, Resources, Split, TwoStepConfig,
};
use topicmerge::synth::{generate_synthetic, SynthConfig, SynthOutput};

/// A synthetic corpus small enough for quick tests.
pub fn small_config(seed: u64) -> SynthConfig {
    SynthConfig {
        seed,
        topics: 200,
        categories: 3,
        facets_per_category: 4,
        merges: 30,
        neighbors: 60,
        unmerges: 12,
        decoy_cluster: 3,
        generated_negatives: 400,
        ..SynthConfig::default()
    }
}

pub struct World {
    pub out: SynthOutput,
    pub res: Resources,
    pub index: CorpusIndex,
    pub ds: Dataset,
    pub fd: FeaturizedDataset,
}

impl World {
    pub fn new(cfg: &SynthConfig) -> World {
        World::with_anomaly_pool(cfg, 2_000)
    }

    /// Test negatives follow `cfg.generated_negatives`.
    pub fn with_anomaly_pool(cfg: &SynthConfig, anomaly_train_size: usize) -> World {
        let out = generate_synthetic(cfg).unwrap();
        let res = Resources {
            embeddings: Some(out.vector_table().unwrap()),
            taxonomy: Some(out.taxonomy_ontology().unwrap()),
            ..Resources::default()
        };
        let index = CorpusIndex::new(&out.corpus, res.tagger.as_ref());
        let dcfg = DatasetConfig {
            test_negatives: cfg.generated_negatives,
            anomaly_train_size,
            seed: cfg.seed,
            ..DatasetConfig::default()
        };
        let ds = build_dataset(&out.corpus, Some(&out.truth), &dcfg).unwrap();
        let end = out.corpus.time_range().unwrap().1;
        let fd = featurize_dataset(&out.corpus, &index, &res, &ds, end).unwrap();
        World { out, res, index, ds, fd }
    }

    pub fn train_sets(&self) -> (Vec<PairRow>, Vec<PairRow>, Vec<PairRow>) {
        (
            self.fd.rows_where(Split::Train, Some(true)),
            self.fd.rows_where(Split::Train, Some(false)),
            self.fd.rows_where(Split::Anomaly, None),
        )
    }

    pub fn test_rows(&self) -> (Vec<Vec<f64>>, Vec<bool>) {
        let rows = self.fd.rows_where(Split::Test, None).into_iter().map(|r| r.features).collect();
        (rows, self.fd.labels(Split::Test))
    }
}

pub fn names() -> Vec<String> {
    feature_names().iter().map(|s| s.to_string()).collect()
}

pub fn two_step_config(seed: u64) -> TwoStepConfig {
    TwoStepConfig {
        seed,
        ..TwoStepConfig::default()
    }
}
