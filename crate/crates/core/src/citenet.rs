//! Undirected citation and co-citation networks over corpus papers.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::Corpus;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetworkError {
    #[error("network has no nodes")]
    EmptyNetwork,
    #[error("unknown node id {0:?}")]
    UnknownNode(String),
}

/// How edges are derived from the reference lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkMode {
    /// `i`–`j` whenever one of them cites the other.
    Citation,
    /// `i`–`j` weighted by the number of corpus papers citing both.
    Cocitation,
}

impl std::str::FromStr for NetworkMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "citation" => Ok(NetworkMode::Citation),
            "cocitation" => Ok(NetworkMode::Cocitation),
            other => Err(format!("unknown network mode {other:?} (expected citation|cocitation)")),
        }
    }
}

impl std::fmt::Display for NetworkMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NetworkMode::Citation => "citation",
            NetworkMode::Cocitation => "cocitation",
        })
    }
}

/// Simple undirected graph whose nodes are papers in corpus order.
///
/// Adjacency lists are sorted by neighbour index. In citation mode every
/// weight is 1.
#[derive(Debug, Clone)]
pub struct CitationNetwork {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<Vec<(usize, u32)>>,
    edge_count: usize,
    mode: NetworkMode,
    dangling_references: usize,
}

impl CitationNetwork {
    /// Builds a network from node ids and undirected edges. Self-loops are
    /// dropped and parallel edges are merged by summing their weights.
    pub fn from_edges<I>(ids: Vec<String>, edges: I, mode: NetworkMode) -> Self
    where
        I: IntoIterator<Item = (usize, usize, u32)>,
    {
        let n = ids.len();
        let mut maps: Vec<BTreeMap<usize, u32>> = vec![BTreeMap::new(); n];
        for (a, b, w) in edges {
            if a == b {
                continue;
            }
            *maps[a].entry(b).or_insert(0) += w;
            *maps[b].entry(a).or_insert(0) += w;
        }
        let adj: Vec<Vec<(usize, u32)>> = maps.into_iter().map(|m| m.into_iter().collect()).collect();
        let edge_count = adj.iter().map(Vec::len).sum::<usize>() / 2;
        let index = ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        CitationNetwork { ids, index, adj, edge_count, mode, dangling_references: 0 }
    }

    /// Convenience constructor with synthetic ids `"0"`, `"1"`, ...
    pub fn from_unweighted(n: usize, edges: &[(usize, usize)]) -> Self {
        let ids = (0..n).map(|i| i.to_string()).collect();
        Self::from_edges(ids, edges.iter().map(|&(a, b)| (a, b, 1)), NetworkMode::Citation)
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn mode(&self) -> NetworkMode {
        self.mode
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, node: usize) -> &str {
        &self.ids[node]
    }

    pub fn node(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn neighbors(&self, node: usize) -> &[(usize, u32)] {
        &self.adj[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adj[node].len()
    }

    /// Sum of incident edge weights.
    pub fn strength(&self, node: usize) -> f64 {
        self.adj[node].iter().map(|&(_, w)| f64::from(w)).sum()
    }

    /// Sum of all edge weights (each edge once).
    pub fn total_weight(&self) -> f64 {
        self.edges().map(|(_, _, w)| f64::from(w)).sum()
    }

    /// Edges as `(a, b, weight)` with `a < b`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, nbrs)| nbrs.iter().filter(move |&&(b, _)| a < b).map(move |&(b, w)| (a, b, w)))
    }

    /// References that pointed outside the corpus and were ignored.
    pub fn dangling_references(&self) -> usize {
        self.dangling_references
    }

    pub fn isolated_nodes(&self) -> Vec<usize> {
        (0..self.node_count()).filter(|&i| self.adj[i].is_empty()).collect()
    }

    /// Writes `id1<TAB>id2` lines (plus `<TAB>weight` in co-citation mode).
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (a, b, w) in self.edges() {
            match self.mode {
                NetworkMode::Citation => writeln!(out, "{}\t{}", self.ids[a], self.ids[b])?,
                NetworkMode::Cocitation => writeln!(out, "{}\t{}\t{}", self.ids[a], self.ids[b], w)?,
            }
        }
        Ok(())
    }

    /// Writes the network in Pajek `.net` form, which common bibliometric
    /// viewers import directly.
    pub fn write_pajek<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "*Vertices {}", self.node_count())?;
        for (i, id) in self.ids.iter().enumerate() {
            writeln!(out, "{} \"{}\"", i + 1, id.replace('"', "'"))?;
        }
        writeln!(out, "*Edges")?;
        for (a, b, w) in self.edges() {
            writeln!(out, "{} {} {}", a + 1, b + 1, w)?;
        }
        Ok(())
    }
}

/// Joins two corpus papers whenever either cites the other. References to
/// papers outside the corpus are counted and otherwise ignored.
pub fn build_citation_network(corpus: &Corpus) -> CitationNetwork {
    let ids: Vec<String> = corpus.papers().iter().map(|p| p.id.clone()).collect();
    let mut dangling = 0;
    let mut edges = Vec::new();
    for (i, paper) in corpus.papers().iter().enumerate() {
        for r in &paper.references {
            match corpus.position(r) {
                Some(j) if j != i => edges.push((i.min(j), i.max(j))),
                Some(_) => {}
                None => dangling += 1,
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let mut net = CitationNetwork::from_edges(ids, edges.into_iter().map(|(a, b)| (a, b, 1)), NetworkMode::Citation);
    net.dangling_references = dangling;
    net
}

/// Joins two corpus papers cited together by at least one corpus paper; the
/// weight is the number of distinct common citers.
pub fn build_cocitation_network(corpus: &Corpus) -> CitationNetwork {
    let ids: Vec<String> = corpus.papers().iter().map(|p| p.id.clone()).collect();
    let mut dangling = 0;
    let mut pairs: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    for paper in corpus.papers() {
        let mut cited: Vec<usize> = Vec::with_capacity(paper.references.len());
        for r in &paper.references {
            match corpus.position(r) {
                Some(j) => cited.push(j),
                None => dangling += 1,
            }
        }
        cited.sort_unstable();
        cited.dedup();
        for (x, &a) in cited.iter().enumerate() {
            for &b in &cited[x + 1..] {
                *pairs.entry((a, b)).or_insert(0) += 1;
            }
        }
    }
    let mut net =
        CitationNetwork::from_edges(ids, pairs.into_iter().map(|((a, b), w)| (a, b, w)), NetworkMode::Cocitation);
    net.dangling_references = dangling;
    net
}

/// Breadth-first hop counts from `source` (weights ignored). `None` marks
/// unreachable nodes.
pub fn bfs_distances(network: &CitationNetwork, source: usize) -> Vec<Option<u32>> {
    let mut dist = vec![None; network.node_count()];
    let mut queue = VecDeque::new();
    dist[source] = Some(0);
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &(v, _) in network.neighbors(u) {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Shortest-path row keyed by paper id.
pub fn shortest_paths_from(
    network: &CitationNetwork,
    source: &str,
) -> Result<BTreeMap<String, Option<u32>>, NetworkError> {
    let s = network.node(source).ok_or_else(|| NetworkError::UnknownNode(source.to_string()))?;
    Ok(bfs_distances(network, s).into_iter().enumerate().map(|(i, d)| (network.id(i).to_string(), d)).collect())
}

/// Dense all-pairs hop-count matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<u32>,
}

impl DistanceMatrix {
    const UNREACHABLE: u32 = u32::MAX;

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> Option<u32> {
        match self.data[i * self.n + j] {
            Self::UNREACHABLE => None,
            d => Some(d),
        }
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = Option<u32>> + '_ {
        (0..self.n).map(move |j| self.get(i, j))
    }
}

/// One BFS per source, run in parallel; output does not depend on scheduling.
pub fn all_pairs_shortest_paths(network: &CitationNetwork) -> DistanceMatrix {
    let n = network.node_count();
    let rows: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|s| bfs_distances(network, s).into_iter().map(|d| d.unwrap_or(DistanceMatrix::UNREACHABLE)).collect())
        .collect();
    DistanceMatrix { n, data: rows.concat() }
}

/// Mean degree 2|E|/|V|.
pub fn average_degree(network: &CitationNetwork) -> Result<f64, NetworkError> {
    if network.node_count() == 0 {
        return Err(NetworkError::EmptyNetwork);
    }
    Ok(2.0 * network.edge_count() as f64 / network.node_count() as f64)
}

/// Component label per node; labels are dense and ordered by smallest member.
pub fn connected_components(network: &CitationNetwork) -> Vec<usize> {
    let n = network.node_count();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        stack.push(start);
        while let Some(u) = stack.pop() {
            for &(v, _) in network.neighbors(u) {
                if label[v] == usize::MAX {
                    label[v] = next;
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    label
}
