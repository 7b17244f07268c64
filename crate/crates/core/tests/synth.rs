mod support;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::world::{names, small_config, two_step_config, World};
use topicmerge::ontology::build_ontology;
use topicmerge::pipeline::{evaluate_two_step, train_two_step, PairKind, PairRow};
use topicmerge::synth::{generate_synthetic, DirectionSignal, SynthConfig};
use topicmerge::textfeat::{set_overlap, tokenize};
use topicmerge::{Corpus, TopicId};

fn dir_contents(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect()
}

#[test]
fn same_seed_writes_identical_files() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    generate_synthetic(&small_config(11)).unwrap().write_dir(a.path()).unwrap();
    generate_synthetic(&small_config(11)).unwrap().write_dir(b.path()).unwrap();
    let (x, y) = (dir_contents(a.path()), dir_contents(b.path()));
    assert!(x.len() >= 6);
    assert_eq!(x, y);
    let c = tempfile::tempdir().unwrap();
    generate_synthetic(&small_config(12)).unwrap().write_dir(c.path()).unwrap();
    assert_ne!(dir_contents(c.path()), x);
}

#[test]
fn truth_partitions_the_planted_pairs() {
    let cfg = small_config(13);
    let out = generate_synthetic(&cfg).unwrap();
    let mut seen: BTreeSet<(TopicId, TopicId)> = BTreeSet::new();
    let mut counts: BTreeMap<PairKind, usize> = BTreeMap::new();
    for r in &out.truth {
        let key = if r.t1 <= r.t2 { (r.t1.clone(), r.t2.clone()) } else { (r.t2.clone(), r.t1.clone()) };
        assert!(seen.insert(key), "pair {} {} appears twice", r.t1, r.t2);
        assert!(out.corpus.topic(&r.t1).is_some() && out.corpus.topic(&r.t2).is_some());
        *counts.entry(r.class).or_default() += 1;
        if r.class == PairKind::Merge {
            let w = r.winner.as_ref().unwrap();
            assert!(w == &r.t1 || w == &r.t2);
        }
    }
    assert_eq!(counts[&PairKind::Merge], cfg.merges);
    assert_eq!(counts[&PairKind::Neighbor], cfg.neighbors);
    assert_eq!(counts[&PairKind::Unmerge], cfg.unmerges);
    assert!(!counts.contains_key(&PairKind::Generated));
}

#[test]
fn generated_ontologies_are_acyclic_and_accepted() {
    let out = generate_synthetic(&small_config(14)).unwrap();
    let onto = build_ontology(out.corpus.events()).unwrap();
    assert!(!onto.is_empty());
    let taxo = out.taxonomy_ontology().unwrap();
    assert!(!taxo.is_empty());
    for g in [&onto, &taxo] {
        for i in 0..g.len() {
            for &p in g.parents(i) {
                assert!(!g.ancestors_or_self(p).contains(&i));
            }
        }
    }
}

fn topic_words(c: &Corpus, t: &TopicId) -> BTreeSet<String> {
    c.full_view().questions_of(t).unwrap().flat_map(|q| tokenize(&q.text).tokens().to_vec()).collect()
}

fn mean_overlap(c: &Corpus, pairs: &[(TopicId, TopicId)]) -> f64 {
    pairs.iter().map(|(a, b)| set_overlap(&topic_words(c, a), &topic_words(c, b))).sum::<f64>() / pairs.len() as f64
}

#[test]
fn merge_pairs_share_more_question_words_than_neighbors() {
    let out = generate_synthetic(&small_config(15)).unwrap();
    let of = |k: PairKind| -> Vec<(TopicId, TopicId)> {
        out.truth.iter().filter(|r| r.class == k).map(|r| (r.t1.clone(), r.t2.clone())).collect()
    };
    let (m, n) = (mean_overlap(&out.corpus, &of(PairKind::Merge)), mean_overlap(&out.corpus, &of(PairKind::Neighbor)));
    assert!(m > n, "merge {m} neighbor {n}");
}

#[test]
fn winners_have_longer_names_by_the_configured_gap() {
    let cfg = SynthConfig { merges: 80, topics: 300, ..small_config(16) };
    let out = generate_synthetic(&cfg).unwrap();
    let chars = |t: &TopicId| out.corpus.topic(t).unwrap().name.chars().count() as f64;
    let (mut w, mut l, mut n) = (0.0, 0.0, 0.0);
    for r in out.truth.iter().filter(|r| r.class == PairKind::Merge) {
        let winner = r.winner.as_ref().unwrap();
        let loser = if winner == &r.t1 { &r.t2 } else { &r.t1 };
        w += chars(winner);
        l += chars(loser);
        n += 1.0;
    }
    let d = DirectionSignal::default();
    let gap = (w - l) / n;
    assert!(w > l);
    assert!((gap - (d.winner_name_chars - d.loser_name_chars)).abs() < 2.0, "gap {gap}");
}

#[test]
fn infeasible_configs_are_rejected() {
    let too_many = SynthConfig { merges: 500, ..small_config(1) };
    assert!(generate_synthetic(&too_many).is_err());
    let bad_rate = SynthConfig { colocation_rate: 1.5, ..small_config(1) };
    assert!(generate_synthetic(&bad_rate).is_err());
}

fn null_config(seed: u64) -> SynthConfig {
    let null = SynthConfig::without_signal(seed);
    SynthConfig {
        shared_vocab_rate: null.shared_vocab_rate,
        colocation_rate: null.colocation_rate,
        decoy_overlap: null.decoy_overlap,
        direction: null.direction,
        ..small_config(seed)
    }
}

#[test]
fn without_signal_the_model_matches_a_label_permutation_baseline() {
    let w = World::new(&null_config(17));
    let (pos, neg, anomaly) = w.train_sets();
    let (rows, labels) = w.test_rows();
    let f_of = |pos: &[PairRow], neg: &[PairRow]| {
        let m = train_two_step(pos, neg, &anomaly, &names(), &two_step_config(3)).unwrap();
        evaluate_two_step(&m, &rows, &labels).unwrap().two_step.f_score
    };
    let observed = f_of(&pos, &neg);

    let all: Vec<PairRow> = pos.iter().chain(&neg).cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let baseline: Vec<f64> = (0..40)
        .map(|_| {
            let mut shuffled = all.clone();
            shuffled.shuffle(&mut rng);
            let (p, n) = shuffled.split_at(pos.len());
            f_of(p, n)
        })
        .collect();
    let mean = baseline.iter().sum::<f64>() / baseline.len() as f64;
    let sd = (baseline.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (baseline.len() - 1) as f64).sqrt();
    // Two-sided test at alpha = 0.01.
    assert!((observed - mean).abs() <= 2.576 * sd.max(1e-9), "observed {observed} baseline {mean} +- {sd}");
}
