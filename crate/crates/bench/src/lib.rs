//! Shared fixtures for the benchmarks.

use topicmerge::pipeline::{
    build_dataset, featurize_dataset, CorpusIndex, DatasetConfig, FeaturizedDataset, Resources, Split,
};
use topicmerge::synth::{generate_synthetic, SynthConfig, SynthOutput};
use topicmerge::TopicId;

pub struct Fixture {
    pub out: SynthOutput,
    pub res: Resources,
    pub index: CorpusIndex,
    pub data: FeaturizedDataset,
}

impl Fixture {
    /// Default synthetic corpus with a 2,000-pair test sample.
    pub fn new() -> Fixture {
        let cfg = SynthConfig::default();
        let out = generate_synthetic(&cfg).expect("default config is valid");
        let res = Resources {
            embeddings: Some(out.vector_table().expect("vectors")),
            taxonomy: Some(out.taxonomy_ontology().expect("taxonomy")),
            ..Resources::default()
        };
        let index = CorpusIndex::new(&out.corpus, res.tagger.as_ref());
        let dcfg = DatasetConfig {
            test_negatives: 2_000,
            anomaly_train_size: 20_000,
            seed: cfg.seed,
            ..DatasetConfig::default()
        };
        let ds = build_dataset(&out.corpus, Some(&out.truth), &dcfg).expect("dataset");
        let end = out.corpus.time_range().expect("non-empty corpus").1;
        let data = featurize_dataset(&out.corpus, &index, &res, &ds, end).expect("features");
        Fixture { out, res, index, data }
    }

    pub fn pairs(&self, split: Split, n: usize) -> Vec<(TopicId, TopicId)> {
        self.data
            .pairs
            .iter()
            .filter(|p| p.split == split)
            .take(n)
            .map(|p| (p.t1.clone(), p.t2.clone()))
            .collect()
    }

    pub fn rows(&self, split: Split) -> (Vec<Vec<f64>>, Vec<bool>) {
        let rows = self.data.rows_where(split, None).into_iter().map(|r| r.features).collect();
        (rows, self.data.labels(split))
    }

    pub fn topic_names(&self) -> Vec<String> {
        self.out.corpus.topics().map(|t| t.name.to_lowercase()).collect()
    }
}

impl Default for Fixture {
    fn default() -> Self {
        Fixture::new()
    }
}
