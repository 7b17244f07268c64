//! Parent-child topic graph and the measures defined over it.
//!
//! Edges are stored child -> parent. Path lengths, degrees and Adamic/Adar
//! work on the undirected projection; depth and subsumption follow the
//! directed edges. Nodes are plain strings so the same structure serves the
//! topic ontology and external word taxonomies.

pub(crate) mod aggregate;
mod ic;
mod taxonomy;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::OnceLock;

pub use aggregate::{
    aggregate_over, cooccur_aggregate, cooccur_parent_child_overlap, parent_child_overlap, select_cooccurring,
    AggregateConfig, AggregateStat, Which,
};
pub use ic::{information_content, taxo_similarity, InformationContent, Measure, JCN_EPSILON};
pub use taxonomy::load_taxonomy;

use crate::corpus::{Event, EventKind};
use crate::error::{Error, Result};

const UNREACHABLE: u32 = u32::MAX;

/// Mutable accumulator for an [`Ontology`]. Rejects edges that would close
/// a directed cycle.
#[derive(Clone, Debug, Default)]
pub struct OntologyBuilder {
    names: Vec<String>,
    index: HashMap<String, usize>,
    parents: Vec<BTreeSet<usize>>,
    children: Vec<BTreeSet<usize>>,
}

impl OntologyBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        self.parents.push(BTreeSet::new());
        self.children.push(BTreeSet::new());
        i
    }

    /// Adds `child -> parent`. Returns `false` when the edge already existed.
    pub fn add_edge(&mut self, child: &str, parent: &str) -> Result<bool> {
        if child == parent {
            return Err(Error::Cycle {
                child: child.to_string(),
                parent: parent.to_string(),
            });
        }
        if let (Some(&c), Some(&p)) = (self.index.get(child), self.index.get(parent)) {
            if self.parents[c].contains(&p) {
                return Ok(false);
            }
            if self.reaches_upward(p, c) {
                return Err(Error::Cycle {
                    child: child.to_string(),
                    parent: parent.to_string(),
                });
            }
        }
        let c = self.add_node(child);
        let p = self.add_node(parent);
        self.parents[c].insert(p);
        self.children[p].insert(c);
        Ok(true)
    }

    /// Whether `target` is `from` or one of its ancestors.
    fn reaches_upward(&self, from: usize, target: usize) -> bool {
        let mut seen = vec![false; self.names.len()];
        let mut stack = vec![from];
        while let Some(n) = stack.pop() {
            if n == target {
                return true;
            }
            if std::mem::replace(&mut seen[n], true) {
                continue;
            }
            stack.extend(self.parents[n].iter().copied());
        }
        false
    }

    pub fn build(self) -> Ontology {
        let n = self.names.len();
        let adjacency: Vec<Vec<usize>> = (0..n)
            .map(|i| self.parents[i].union(&self.children[i]).copied().collect())
            .collect();

        let mut depth = vec![0u32; n];
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| self.parents[i].is_empty()).collect();
        for &r in &queue {
            depth[r] = 1;
        }
        while let Some(u) = queue.pop_front() {
            for &c in &self.children[u] {
                if depth[c] == 0 {
                    depth[c] = depth[u] + 1;
                    queue.push_back(c);
                }
            }
        }

        let ancestors = (0..n)
            .map(|i| {
                let mut seen = BTreeSet::new();
                let mut stack = vec![i];
                while let Some(u) = stack.pop() {
                    if seen.insert(u) {
                        stack.extend(self.parents[u].iter().copied());
                    }
                }
                seen.into_iter().collect()
            })
            .collect();

        let mut lemmas: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, name) in self.names.iter().enumerate() {
            let lemma = name.split('.').next().unwrap_or(name).to_lowercase();
            lemmas.entry(lemma).or_default().push(i);
        }

        Ontology {
            distances: (0..n).map(|_| OnceLock::new()).collect(),
            names: self.names,
            index: self.index,
            parents: self.parents.into_iter().map(|s| s.into_iter().collect()).collect(),
            children: self.children.into_iter().map(|s| s.into_iter().collect()).collect(),
            adjacency,
            depth,
            ancestors,
            lemmas,
        }
    }
}

/// Directed acyclic parent-child graph. Immutable; safe to share across
/// threads (BFS rows are memoized lazily).
#[derive(Debug)]
pub struct Ontology {
    names: Vec<String>,
    index: HashMap<String, usize>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    adjacency: Vec<Vec<usize>>,
    depth: Vec<u32>,
    /// Ancestors including the node itself, ascending.
    ancestors: Vec<Vec<usize>>,
    lemmas: HashMap<String, Vec<usize>>,
    distances: Vec<OnceLock<Box<[u32]>>>,
}

impl Default for Ontology {
    fn default() -> Self {
        OntologyBuilder::new().build()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OntologyStats {
    pub nodes: usize,
    pub edges: usize,
    pub components: usize,
    pub largest_component: usize,
    pub singletons: usize,
    /// Longest root-to-node shortest path, in edges.
    pub depth: usize,
    pub average_degree: f64,
    pub largest_component_average_degree: f64,
}

/// Builds the ontology from the `parent_add` events, in event order.
pub fn build_ontology<'a>(events: impl IntoIterator<Item = &'a Event>) -> Result<Ontology> {
    let mut b = OntologyBuilder::new();
    for e in events {
        if e.kind == EventKind::ParentAdd {
            b.add_edge(e.src.as_str(), e.dst.as_str())?;
        }
    }
    Ok(b.build())
}

impl Ontology {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn node(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    pub fn parents(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    /// Undirected neighbors, ascending.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    /// Minimum hops from any root, roots at depth 1.
    pub fn depth(&self, i: usize) -> u32 {
        self.depth[i]
    }

    pub fn ancestors_or_self(&self, i: usize) -> &[usize] {
        &self.ancestors[i]
    }

    /// Nodes whose name is `word` or starts with `word.` (sense-numbered
    /// taxonomies such as `dog.n.01`).
    pub fn senses(&self, word: &str) -> &[usize] {
        self.lemmas.get(word).map(Vec::as_slice).unwrap_or(&[])
    }

    fn distance_row(&self, src: usize) -> &[u32] {
        self.distances[src].get_or_init(|| {
            let mut dist = vec![UNREACHABLE; self.len()];
            dist[src] = 0;
            let mut queue = VecDeque::from([src]);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adjacency[u] {
                    if dist[w] == UNREACHABLE {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                }
            }
            dist.into_boxed_slice()
        })
    }

    /// Undirected shortest path length by node index.
    pub fn path_len(&self, a: usize, b: usize) -> Option<u32> {
        let d = self.distance_row(a)[b];
        (d != UNREACHABLE).then_some(d)
    }

    /// Undirected shortest path between two named nodes; `None` when either
    /// node is absent or they are disconnected.
    pub fn min_path_len(&self, a: &str, b: &str) -> Option<u32> {
        self.path_len(self.node(a)?, self.node(b)?)
    }

    pub fn adamic_adar_idx(&self, x: usize, y: usize) -> f64 {
        let (nx, ny) = (&self.adjacency[x], &self.adjacency[y]);
        let (mut i, mut j) = (0, 0);
        let mut score = 0.0;
        while i < nx.len() && j < ny.len() {
            match nx[i].cmp(&ny[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let deg = self.degree(nx[i]);
                    if deg > 1 {
                        score += 1.0 / (deg as f64).ln();
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        score
    }

    /// Sum of `1 / ln |N(u)|` over common neighbors; 0 for absent nodes.
    pub fn adamic_adar(&self, x: &str, y: &str) -> f64 {
        match (self.node(x), self.node(y)) {
            (Some(x), Some(y)) => self.adamic_adar_idx(x, y),
            _ => 0.0,
        }
    }

    /// Wu-Palmer similarity by node index using the deepest common subsumer.
    /// Clamped to 1 because minimum-hop depths are not monotone along every
    /// path of a multi-parent graph.
    pub fn wup_idx(&self, a: usize, b: usize) -> f64 {
        let lcs_depth = intersect_sorted(&self.ancestors[a], &self.ancestors[b])
            .map(|c| self.depth[c])
            .max();
        match lcs_depth {
            Some(d) => (2.0 * d as f64 / (self.depth[a] + self.depth[b]) as f64).min(1.0),
            None => 0.0,
        }
    }

    pub fn wup(&self, a: &str, b: &str) -> f64 {
        match (self.node(a), self.node(b)) {
            (Some(a), Some(b)) => self.wup_idx(a, b),
            _ => 0.0,
        }
    }

    /// Best Wu-Palmer score over all sense pairs of two words, or `None`
    /// when either word has no sense in the taxonomy.
    pub fn word_wup(&self, w1: &str, w2: &str) -> Option<f64> {
        let (s1, s2) = (self.senses(w1), self.senses(w2));
        if s1.is_empty() || s2.is_empty() {
            return None;
        }
        s1.iter()
            .flat_map(|&a| s2.iter().map(move |&b| (a, b)))
            .map(|(a, b)| self.wup_idx(a, b))
            .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |m| m.max(x))))
    }

    pub fn stats(&self) -> OntologyStats {
        let n = self.len();
        if n == 0 {
            return OntologyStats::default();
        }
        let mut comp = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            let mut size = 0;
            let mut stack = vec![s];
            comp[s] = id;
            while let Some(u) = stack.pop() {
                size += 1;
                for &w in &self.adjacency[u] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        stack.push(w);
                    }
                }
            }
            sizes.push(size);
        }
        let (largest_id, &largest) = sizes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .expect("non-empty");
        let degree_sum: usize = (0..n).map(|i| self.degree(i)).sum();
        let largest_degree_sum: usize = (0..n).filter(|&i| comp[i] == largest_id).map(|i| self.degree(i)).sum();
        OntologyStats {
            nodes: n,
            edges: self.edge_count(),
            components: sizes.len(),
            largest_component: largest,
            singletons: (0..n).filter(|&i| self.degree(i) == 0).count(),
            depth: self.depth.iter().max().map_or(0, |&d| d.saturating_sub(1) as usize),
            average_degree: degree_sum as f64 / n as f64,
            largest_component_average_degree: largest_degree_sum as f64 / largest as f64,
        }
    }
}

/// Graph statistics over the undirected projection.
pub fn ontology_stats(o: &Ontology) -> OntologyStats {
    o.stats()
}

pub(crate) fn intersect_sorted<'a>(a: &'a [usize], b: &'a [usize]) -> impl Iterator<Item = usize> + 'a {
    let mut i = 0;
    let mut j = 0;
    std::iter::from_fn(move || {
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let x = a[i];
                    i += 1;
                    j += 1;
                    return Some(x);
                }
            }
        }
        None
    })
}
