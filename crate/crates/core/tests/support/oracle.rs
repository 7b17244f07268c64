//! Brute-force reference implementations of every pair measure, and
//! randomized comparisons against the library.

#![allow(clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topicmerge::embed::{cosine, doc_vector_from_counts, VectorTable, Weighting};
use topicmerge::ontology::{
    aggregate_over, parent_child_overlap, taxo_similarity, AggregateStat, InformationContent, Measure, Ontology,
    OntologyBuilder, JCN_EPSILON,
};
use topicmerge::textfeat::{
    counts_overlap, jaro, jaro_winkler, name_in_text_overlap, overlap, set_overlap, sparse_cosine, stratified_overlap,
    Band, DocumentFrequencies, NGramMultiset, OverlapMode, PosVector, SparseVector, TermCounts, TokenSeq,
};
use topicmerge::TopicId;

pub const TOL: f64 = 1e-9;

pub type Check = fn(usize, u64) -> Result<(), String>;

/// Every oracle comparison, by name.
pub const CHECKS: &[(&str, Check)] = &[
    ("ngram_overlap", check_ngram_overlap),
    ("set_overlap", check_set_overlap),
    ("counts_overlap", check_counts_overlap),
    ("name_in_text", check_name_in_text),
    ("stratified_overlap", check_stratified_overlap),
    ("jaro_winkler", check_jaro_winkler),
    ("tfidf_cosine", check_tfidf),
    ("pos_cosine", check_pos_cosine),
    ("embedding_cosine", check_embedding_cosine),
    ("doc_vector", check_doc_vector),
    ("min_path_len", check_path),
    ("adamic_adar", check_adamic_adar),
    ("wup", check_wup),
    ("information_content", check_ic),
    ("lin_resnik_jcn", check_ic_measures),
    ("cooccur_aggregate", check_aggregate),
    ("parent_child_overlap", check_parent_child_overlap),
    ("cycle_rejection", check_cycle_rejection),
];

fn close(what: &str, i: usize, got: f64, want: f64) -> Result<(), String> {
    if (got - want).abs() <= TOL || (got.is_infinite() && got == want) {
        Ok(())
    } else {
        Err(format!("{what}: instance {i}: got {got}, oracle {want}"))
    }
}

const SYMBOLS: [&str; 4] = ["a", "b", "c", "d"];

fn rand_words(rng: &mut ChaCha8Rng, max: usize) -> Vec<String> {
    let n = rng.random_range(0..=max);
    (0..n).map(|_| SYMBOLS[rng.random_range(0..4)].to_string()).collect()
}

fn seq(words: &[String]) -> TokenSeq {
    words.iter().cloned().collect()
}

fn grams(words: &[String], n: usize) -> Vec<String> {
    if words.len() < n {
        return Vec::new();
    }
    (0..=words.len() - n).map(|i| words[i..i + n].join(" ")).collect()
}

/// Overlap coefficient over explicit element lists.
fn overlap_oracle(a: &[String], b: &[String], weighted: bool) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    if weighted {
        // Greedy matching of equal elements equals the sum of minimum counts.
        let mut used = vec![false; b.len()];
        let mut common = 0;
        for x in a {
            if let Some(j) = (0..b.len()).find(|&j| !used[j] && &b[j] == x) {
                used[j] = true;
                common += 1;
            }
        }
        common as f64 / a.len().min(b.len()) as f64
    } else {
        let mut da: Vec<&String> = a.iter().collect();
        da.sort();
        da.dedup();
        let mut db: Vec<&String> = b.iter().collect();
        db.sort();
        db.dedup();
        let common = da.iter().filter(|x| db.contains(x)).count();
        common as f64 / da.len().min(db.len()) as f64
    }
}

fn mode(weighted: bool) -> OverlapMode {
    if weighted {
        OverlapMode::Weighted
    } else {
        OverlapMode::Unweighted
    }
}

pub fn check_ngram_overlap(instances: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..instances {
        let (a, b) = (rand_words(&mut rng, 10), rand_words(&mut rng, 10));
        let n = rng.random_range(1..=4);
        let (ma, mb) = (NGramMultiset::from_tokens(&seq(&a), n), NGramMultiset::from_tokens(&seq(&b), n));
        for weighted in [false, true] {
            let got = overlap(&ma, &mb, mode(weighted)).map_err(|e| e.to_string())?;
            let want = overlap_oracle(&grams(&a, n), &grams(&b, n), weighted);
            close("ngram overlap", i, got, want)?;
        }
    }
    Ok(())
}

pub fn check_set_overlap(instances: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..instances {
        let (a, b) = (rand_words(&mut rng, 6), rand_words(&mut rng, 6));
        let sa: BTreeSet<String> = a.iter().cloned().collect();
        let sb: BTreeSet<String> = b.iter().cloned().collect();
        close("set overlap", i, set_overlap(&sa, &sb), overlap_oracle(&a, &b, false))?;
    }
    Ok(())
}

fn to_counts(words: &[String]) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for w in words {
        *m.entry(w.clone()).or_insert(0) += 1;
    }
    m
}

pub fn check_counts_overlap(instances: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..instances {
        let (a, b) = (rand_words(&mut rng, 6), rand_words(&mut rng, 6));
        let (ca, cb) = (to_counts(&a), to_counts(&b));
        for weighted in [false, true] {
            close("counts overlap", i, counts_overlap(&ca, &cb, mode(weighted)), overlap_oracle(&a, &b, weighted))?;
        }
    }
    Ok(())
}

pub fn check_name_in_text(instances: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..instances {
        let name = rand_words(&mut rng, 4);
        let n = rng.random_range(1..=4);
        let questions: Vec<Vec<String>> = (0..rng.random_range(0..4)).map(|_| rand_words(&mut rng, 10)).collect();
        let mut text = NGramMultiset::empty(n);
        let mut all = Vec::new();
        for q in &questions {
            text.extend_from(&seq(q));
            all.extend(grams(q, n));
        }
        for weighted in [false, true] {
            let got = name_in_text_overlap(&seq(&name), &text, n, mode(weighted)).map_err(|e| e.to_string())?;
            close("name in text", i, got, overlap_oracle(&grams(&name, n), &all, weighted))?;
        }
    }
    Ok(())
}

/// Words of `counts` whose position in the (count, word) order falls in the
/// first fifth, rounded up.
fn band_oracle(counts: &TermCounts, top: bool) -> BTreeSet<String> {
    let keep = counts.len().div_ceil(5);
    counts
        .iter()
        .filter(|&(w, &c)| {
            let ahead = counts
                .iter()
                .filter(|&(v, &d)| if top { d > c || (d == c && v < w) } else { d < c || (d == c && v < w) })
                .count();
            ahead < keep
        })
        .map(|(w, _)| w.clone())
        .collect()
}

pub fn check_stratified_overlap(instances: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab: Vec<String> = (0..12).map(|k| format!("w{k}")).collect();
    for i in 0..instances {
        let draw = |rng: &mut ChaCha8Rng| -> TermCounts {
            (0..rng.random_range(0..=10)).fold(TermCounts::new(), |mut m, _| {
                *m.entry(vocab[rng.random_range(0..vocab.len())].clone()).or_insert(0) += 1;
                m
            })
        };
        let (a, b) = (draw(&mut rng), draw(&mut rng));
        for (band, top) in [(Band::Top20, true), (Band::Bottom20, false)] {
            let (ba, bb) = (band_oracle(&a, top), band_oracle(&b, top));
            let la: Vec<String> = ba.into_iter().collect();
            let lb: Vec<String> = bb.into_iter().collect();
            close("stratified overlap", i, stratified_overlap(&a, &b, band), overlap_oracle(&la, &lb, false))?;
        }
    }
    Ok(())
}

/// Jaro similarity written directly from its definition.
fn jaro_oracle(s: &[char], t: &[char]) -> f64 {
    if s.is_empty() && t.is_empty() {
        return 1.0;
    }
    if s.is_empty() || t.is_empty() {
        return 0.0;
    }
    let window = (s.len().max(t.len()) / 2) as isize - 1;
    let mut taken = vec![false; t.len()];
    let mut s_match = Vec::new();
    let mut t_pos = Vec::new();
    for (i, &c) in s.iter().enumerate() {
        let j = (0..t.len()).find(|&j| !taken[j] && t[j] == c && (i as isize - j as isize).abs() <= window.max(0));
        if let Some(j) = j {
            taken[j] = true;
            s_match.push(c);
            t_pos.push(j);
        }
    }
    let m = s_match.len();
    if m == 0 {
        return 0.0;
    }
    t_pos.sort_unstable();
    let t_match: Vec<char> = t_pos.iter().map(|&j| t[j]).collect();
    let transpositions = s_match.iter().zip(&t_match).filter(|(a, b)| a != b).count() / 2;
    let m = m as f64;
    (m / s.len() as f64 + m / t.len() as f64 + (m - transpositions as f64) / m) / 3.0
}

pub fn check_jaro_winkler(instances: usize, seed: u64) -> Result<(), String> {
    for (a, b, want) in [("martha", "marhta", 0.961_111_111_111_111_1), ("dwayne", "duane", 0.84), ("dixon", "dicksonx", 0.813_333_333_333_333_3)] {
        close("jaro-winkler reference", 0, jaro_winkler(a, b), want)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..instances {
        let word = |rng: &mut ChaCha8Rng| -> String {
            (0..rng.random_range(0..=10)).map(|_| ['a', 'b', 'c', 'd'][rng.random_range(0..4)]).collect()
        };
        let (a, b) = (word(&mut rng), word(&mut rng));
        let (ca, cb): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
        let j = jaro_oracle(&ca, &cb);
        close("jaro", i, jaro(&a, &b), j)?;
        let prefix = ca.iter().zip(&cb).take(4).take_while(|(x, y)| x == y).count();
        close("jaro-winkler", i, jaro_winkler(&a, &b), j + prefix as f64 * 0.1 * (1.0 - j))?;
    }
    Ok(())
}

fn dense_cosine(u: &[f64], v: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu: f64 = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        0.0
    } else {
        dot / (nu * nv)
    }
}

pub fn check_tfidf(instances: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..instances {
        let docs: Vec<Vec<String>> = (0..rng.random_range(2..6)).map(|_| rand_words(&mut rng, 10)).collect();
        let counts: Vec<TermCounts> = docs.iter().map(|d| to_counts(d)).collect();
        let df = DocumentFrequencies::from_documents(&counts);
        let nonempty: Vec<&Vec<String>> = docs.iter().filter(|d| !d.is_empty()).collect();
        let idf = |w: &str| {
            let n = nonempty.len().max(1) as f64;
            let d = nonempty.iter().filter(|d| d.iter().any(|x| x == w)).count().max(1) as f64;
            (n / d).ln() + 1.0
        };
        for s in SYMBOLS {
            close("idf", i, df.idf(s), idf(s))?;
        }
        let dense = |d: &[String]| -> Vec<f64> {
            SYMBOLS.iter().map(|s| d.iter().filter(|x| x == s).count() as f64 * idf(s)).collect()
        };
        let (x, y) = (rng.random_range(0..docs.len()), rng.random_range(0..docs.len()));
        let got = sparse_cosine(&df.vector(&counts[x]), &df.vector(&counts[y]));
        close("tfidf cosine", i, got, dense_cosine(&dense(&docs[x]), &dense(&docs[y])))?;
        let sv: SparseVector = df.vector(&counts[x]);
        if sv.values().any(|v| *v < 0.0) {
            return Err(format!("tfidf: instance {i}: negative weight"));
        }
    }
    Ok(())
}

pub fn check_pos_cosine(instances: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..instances {
        let draw = |rng: &mut ChaCha8Rng| {
            let mut c = [0u64; 12];
            for _ in 0..rng.random_range(0..=10) {
                c[rng.random_range(0..12)] += 1;
            }
            c
        };
        let (a, b) = (draw(&mut rng), draw(&mut rng));
        let fa: Vec<f64> = a.iter().map(|&x| x as f64).collect();
        let fb: Vec<f64> = b.iter().map(|&x| x as f64).collect();
        let got = PosVector::from_counts(a).cosine(&PosVector::from_counts(b));
        close("pos cosine", i, got, dense_cosine(&fa, &fb))?;
    }
    Ok(())
}

pub fn check_embedding_cosine(instances: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..instances {
        let d = rng.random_range(1..=6);
        let u: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
        close("embedding cosine", i, cosine(&u, &v).map_err(|e| e.to_string())?, dense_cosine(&u, &v))?;
    }
    Ok(())
}

pub fn check_doc_vector(instances: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..instances {
        let dim = rng.random_range(1..=4);
        let mut tab = VectorTable::new(dim);
        let mut vectors = BTreeMap::new();
        for s in SYMBOLS.iter().take(3) {
            let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            tab.insert(s, v.clone()).map_err(|e| e.to_string())?;
            vectors.insert(s.to_string(), v);
        }
        let docs: Vec<Vec<String>> = (0..3).map(|_| rand_words(&mut rng, 10)).collect();
        let counts: Vec<TermCounts> = docs.iter().map(|d| to_counts(d)).collect();
        let global = to_counts(&docs.concat());
        let df = DocumentFrequencies::from_documents(&counts);
        let min_count = rng.random_range(0..3);
        for weighting in [Weighting::Uniform, Weighting::TfIdf] {
            let got = doc_vector_from_counts(&counts[0], &tab, weighting, min_count, &global, &df);
            let mut sum = vec![0.0; dim];
            let mut total = 0.0;
            let mut n = 0;
            for w in &docs[0] {
                let Some(v) = vectors.get(w) else { continue };
                if global[w] < min_count {
                    continue;
                }
                let weight = match weighting {
                    Weighting::Uniform => 1.0,
                    Weighting::TfIdf => df.idf(w),
                };
                for (s, x) in sum.iter_mut().zip(v) {
                    *s += weight * x;
                }
                total += weight;
                n += 1;
            }
            if got.count != n {
                return Err(format!("doc vector: instance {i}: count {} vs {n}", got.count));
            }
            for (g, s) in got.vector.iter().zip(&sum) {
                close("doc vector", i, *g, if total > 0.0 { s / total } else { 0.0 })?;
            }
        }
    }
    Ok(())
}

/// A random DAG of at most 15 nodes. Edges point from higher to lower node
/// numbers, so the graph is acyclic; edges are added in random order.
pub struct RandomDag {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub ontology: Ontology,
}

pub fn node_name(i: usize) -> String {
    format!("n{i}")
}

pub fn random_dag(rng: &mut ChaCha8Rng, max_nodes: usize) -> RandomDag {
    let n = rng.random_range(1..=max_nodes);
    let mut edges = Vec::new();
    for c in 1..n {
        let k = rng.random_range(0..=2.min(c));
        let mut parents: Vec<usize> = (0..c).collect();
        parents.shuffle(rng);
        edges.extend(parents.into_iter().take(k).map(|p| (c, p)));
    }
    edges.shuffle(rng);
    let mut b = OntologyBuilder::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for i in order {
        b.add_node(&node_name(i));
    }
    for &(c, p) in &edges {
        b.add_edge(&node_name(c), &node_name(p)).expect("acyclic by construction");
    }
    RandomDag {
        n,
        edges,
        ontology: b.build(),
    }
}

impl RandomDag {
    fn undirected(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); self.n];
        for &(c, p) in &self.edges {
            adj[c].insert(p);
            adj[p].insert(c);
        }
        adj
    }

    pub fn floyd_warshall(&self) -> Vec<Vec<Option<u32>>> {
        let mut d = vec![vec![None; self.n]; self.n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = Some(0);
        }
        for &(c, p) in &self.edges {
            d[c][p] = Some(1);
            d[p][c] = Some(1);
        }
        for k in 0..self.n {
            for i in 0..self.n {
                for j in 0..self.n {
                    if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                        if d[i][j].is_none_or(|x| a + b < x) {
                            d[i][j] = Some(a + b);
                        }
                    }
                }
            }
        }
        d
    }

    /// Reflexive-transitive closure of the parent relation: `up[i][j]` when
    /// `j` is `i` or an ancestor of `i`.
    pub fn ancestor_matrix(&self) -> Vec<Vec<bool>> {
        let mut up = vec![vec![false; self.n]; self.n];
        for (i, row) in up.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(c, p) in &self.edges {
            up[c][p] = true;
        }
        for k in 0..self.n {
            for i in 0..self.n {
                for j in 0..self.n {
                    if up[i][k] && up[k][j] {
                        up[i][j] = true;
                    }
                }
            }
        }
        up
    }

    /// Minimum hops from any root, roots at depth 1.
    pub fn depths(&self) -> Vec<u32> {
        let mut depth: Vec<Option<u32>> = (0..self.n)
            .map(|i| (!self.edges.iter().any(|&(c, _)| c == i)).then_some(1))
            .collect();
        for _ in 0..self.n {
            for &(c, p) in &self.edges {
                if let Some(dp) = depth[p] {
                    if depth[c].is_none_or(|dc| dp + 1 < dc) {
                        depth[c] = Some(dp + 1);
                    }
                }
            }
        }
        depth.into_iter().map(|d| d.expect("every node reaches a root")).collect()
    }

    pub fn wup(&self, a: usize, b: usize) -> f64 {
        let up = self.ancestor_matrix();
        let depth = self.depths();
        let lcs = (0..self.n).filter(|&c| up[a][c] && up[b][c]).map(|c| depth[c]).max();
        match lcs {
            Some(d) => (2.0 * d as f64 / (depth[a] + depth[b]) as f64).min(1.0),
            None => 0.0,
        }
    }

    /// IC with add-one smoothing on the given raw frequencies.
    pub fn ic(&self, freq: &[f64]) -> Vec<f64> {
        let up = self.ancestor_matrix();
        let mass: Vec<f64> = (0..self.n)
            .map(|c| (0..self.n).filter(|&d| up[d][c]).map(|d| freq[d] + 1.0).sum())
            .collect();
        let roots: Vec<usize> = (0..self.n).filter(|&i| !self.edges.iter().any(|&(c, _)| c == i)).collect();
        let total: f64 = roots.iter().map(|&r| mass[r]).sum();
        mass.iter().map(|&m| (-(m / total).ln()).max(0.0)).collect()
    }

    pub fn ic_measure(&self, ic: &[f64], a: usize, b: usize, measure: Measure) -> f64 {
        let up = self.ancestor_matrix();
        let common: Vec<usize> = (0..self.n).filter(|&c| up[a][c] && up[b][c]).collect();
        if common.is_empty() {
            return 0.0;
        }
        let lcs = common.iter().map(|&c| ic[c]).fold(f64::NEG_INFINITY, f64::max);
        match measure {
            Measure::Resnik => lcs,
            Measure::Lin => {
                if ic[a] + ic[b] > 0.0 {
                    (2.0 * lcs / (ic[a] + ic[b])).clamp(0.0, 1.0)
                } else {
                    0.0
                }
            }
            Measure::Jcn => 1.0 / (ic[a] + ic[b] - 2.0 * lcs).max(JCN_EPSILON),
            Measure::Wup => self.wup(a, b),
        }
    }

    /// IC values indexed by the library's node numbering.
    pub fn ic_in_library_order(&self, ic: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (i, &v) in ic.iter().enumerate() {
            out[self.ontology.node(&node_name(i)).expect("node")] = v;
        }
        out
    }
}

pub fn check_path(instances: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..instances {
        let g = random_dag(&mut rng, 15);
        let fw = g.floyd_warshall();
        for a in 0..g.n {
            for b in 0..g.n {
                let got = g.ontology.min_path_len(&node_name(a), &node_name(b));
                if got != fw[a][b] {
                    return Err(format!("path: instance {i}: ({a},{b}) got {got:?}, oracle {:?}", fw[a][b]));
                }
            }
        }
    }
    Ok(())
}

pub fn check_adamic_adar(instances: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..instances {
        let g = random_dag(&mut rng, 15);
        let adj = g.undirected();
        for a in 0..g.n {
            for b in 0..g.n {
                let want: f64 = adj[a]
                    .intersection(&adj[b])
                    .filter(|&&u| adj[u].len() > 1)
                    .map(|&u| 1.0 / (adj[u].len() as f64).ln())
                    .sum();
                close("adamic adar", i, g.ontology.adamic_adar(&node_name(a), &node_name(b)), want)?;
            }
        }
    }
    Ok(())
}

pub fn check_wup(instances: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..instances {
        let g = random_dag(&mut rng, 15);
        let depths = g.depths();
        for a in 0..g.n {
            let got = g.ontology.depth(g.ontology.node(&node_name(a)).expect("node"));
            if got != depths[a] {
                return Err(format!("depth: instance {i}: node {a} got {got}, oracle {}", depths[a]));
            }
            for b in 0..g.n {
                close("wup", i, g.ontology.wup(&node_name(a), &node_name(b)), g.wup(a, b))?;
            }
        }
    }
    Ok(())
}

fn random_freq(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0..20) as f64).collect()
}

fn library_ic(g: &RandomDag, freq: &[f64]) -> InformationContent {
    InformationContent::from_frequencies(&g.ontology, |k| {
        let name = g.ontology.name(k);
        freq[name[1..].parse::<usize>().expect("numbered node")]
    })
}

pub fn check_ic(instances: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..instances {
        let g = random_dag(&mut rng, 15);
        let freq = random_freq(&mut rng, g.n);
        let ic = library_ic(&g, &freq);
        let want = g.ic(&freq);
        for (a, w) in want.iter().enumerate() {
            close("information content", i, ic.get(g.ontology.node(&node_name(a)).expect("node")), *w)?;
        }
    }
    Ok(())
}

pub fn check_ic_measures(instances: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..instances {
        let g = random_dag(&mut rng, 15);
        let freq = random_freq(&mut rng, g.n);
        let ic = library_ic(&g, &freq);
        let want = g.ic(&freq);
        for a in 0..g.n {
            for b in 0..g.n {
                for m in [Measure::Lin, Measure::Resnik, Measure::Jcn, Measure::Wup] {
                    let got = taxo_similarity(&g.ontology, &ic, &node_name(a), &node_name(b), m);
                    close("ic measure", i, got, g.ic_measure(&want, a, b, m))?;
                }
            }
        }
    }
    Ok(())
}

fn random_topics(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    // Some ids name nodes absent from the graph.
    (0..rng.random_range(0..=5)).map(|_| rng.random_range(0..n + 3)).collect()
}

pub fn check_aggregate(instances: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_path = 20.0;
    for i in 0..instances {
        let g = random_dag(&mut rng, 15);
        let freq = random_freq(&mut rng, g.n);
        let ic = library_ic(&g, &freq);
        let icv = g.ic(&freq);
        let fw = g.floyd_warshall();
        let adj = g.undirected();
        let (a, b) = (random_topics(&mut rng, g.n), random_topics(&mut rng, g.n));
        let ids = |xs: &[usize]| xs.iter().map(|&x| TopicId::new(node_name(x))).collect::<Vec<_>>();
        let (ia, ib) = (ids(&a), ids(&b));
        let present = |x: usize| x < g.n;

        let paths: Vec<f64> = a
            .iter()
            .flat_map(|&x| b.iter().map(move |&y| (x, y)))
            .filter(|&(x, y)| present(x) && present(y))
            .filter_map(|(x, y)| fw[x][y].map(f64::from))
            .collect();
        let want = if paths.is_empty() { max_path } else { paths.iter().sum::<f64>() / paths.len() as f64 };
        close("aggregate path", i, aggregate_over(&g.ontology, &ic, &ia, &ib, AggregateStat::Path, max_path), want)?;

        let stats = [
            AggregateStat::AdamicAdar,
            AggregateStat::Lin,
            AggregateStat::Resnik,
            AggregateStat::Jcn,
            AggregateStat::Wup,
        ];
        for stat in stats {
            let term = |x: usize, y: usize| -> f64 {
                if !present(x) || !present(y) {
                    return 0.0;
                }
                match stat {
                    AggregateStat::AdamicAdar => adj[x]
                        .intersection(&adj[y])
                        .filter(|&&u| adj[u].len() > 1)
                        .map(|&u| 1.0 / (adj[u].len() as f64).ln())
                        .sum(),
                    AggregateStat::Lin => g.ic_measure(&icv, x, y, Measure::Lin),
                    AggregateStat::Resnik => g.ic_measure(&icv, x, y, Measure::Resnik),
                    AggregateStat::Jcn => g.ic_measure(&icv, x, y, Measure::Jcn),
                    AggregateStat::Wup => g.wup(x, y),
                    AggregateStat::Path => unreachable!(),
                }
            };
            let want = if a.is_empty() || b.is_empty() {
                0.0
            } else {
                a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).map(|(x, y)| term(x, y)).sum::<f64>()
                    / (a.len() * b.len()) as f64
            };
            close("aggregate", i, aggregate_over(&g.ontology, &ic, &ia, &ib, stat, max_path), want)?;
        }
    }
    Ok(())
}

pub fn check_parent_child_overlap(instances: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..instances {
        let g = random_dag(&mut rng, 15);
        let draw = |rng: &mut ChaCha8Rng| -> BTreeMap<TopicId, usize> {
            (0..rng.random_range(0..=6))
                .map(|_| (TopicId::new(node_name(rng.random_range(0..g.n + 2))), rng.random_range(1..4)))
                .collect()
        };
        let (ca, cb) = (draw(&mut rng), draw(&mut rng));
        // Expand into an explicit multiset of names.
        let expand = |co: &BTreeMap<TopicId, usize>| -> Vec<String> {
            let mut out = Vec::new();
            for (t, &c) in co {
                let mut names = vec![t.0.clone()];
                let k: usize = t.0[1..].parse().expect("numbered");
                for &(ch, p) in &g.edges {
                    if ch == k {
                        names.push(node_name(p));
                    }
                    if p == k {
                        names.push(node_name(ch));
                    }
                }
                for name in names {
                    out.extend(std::iter::repeat_n(name, c));
                }
            }
            out
        };
        let (ea, eb) = (expand(&ca), expand(&cb));
        for weighted in [false, true] {
            close(
                "parent-child overlap",
                i,
                parent_child_overlap(&g.ontology, &ca, &cb, mode(weighted)),
                overlap_oracle(&ea, &eb, weighted),
            )?;
        }
    }
    Ok(())
}

pub fn check_cycle_rejection(instances: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..instances {
        let n = rng.random_range(2..=8);
        let mut b = OntologyBuilder::new();
        let mut parents: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for _ in 0..rng.random_range(1..=15) {
            let (c, p) = (rng.random_range(0..n), rng.random_range(0..n));
            // DFS over parent edges: does `p` reach `c`?
            let mut stack = vec![p];
            let mut seen = BTreeSet::new();
            let mut closes = false;
            while let Some(u) = stack.pop() {
                if u == c {
                    closes = true;
                    break;
                }
                if seen.insert(u) {
                    stack.extend(parents[u].iter().copied());
                }
            }
            let got = b.add_edge(&node_name(c), &node_name(p));
            if got.is_err() != closes {
                return Err(format!("cycle: instance {i}: edge {c}->{p} library {got:?}, oracle closes={closes}"));
            }
            if !closes {
                parents[c].insert(p);
            }
        }
    }
    Ok(())
}
