//! Community partition by multilevel modularity optimization, and the
//! community-level quotient graph.
//!
//! The optimizer follows the usual two-phase scheme: nodes are visited in a
//! seeded random order and moved to the neighbouring community with the
//! largest modularity gain until no move helps, then communities are
//! collapsed into super-nodes and the procedure repeats on the smaller graph.
//! Ties between candidate communities go to the smallest label, and a node
//! only leaves its community for a strictly positive gain.

use std::collections::BTreeMap;
use std::io::{self, Write};

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::citenet::CitationNetwork;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CommunityError {
    #[error("cannot detect communities in an empty network")]
    EmptyNetwork,
    #[error("assignment has {got} entries but the network has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("node {0:?} has no community assignment")]
    MissingNode(String),
}

const MIN_GAIN: f64 = 1e-10;
const MAX_SWEEPS: usize = 1_000;

/// Newman–Girvan modularity of `labels` on `network`, using edge weights.
///
/// `q = Σ_α (e_αα − a_α²)` where `e_αα` is the weight fraction of edges inside
/// `α` and `a_α` the fraction of edge endpoints (strength) in `α`. An edgeless
/// network has modularity 0.
pub fn modularity(network: &CitationNetwork, labels: &[usize]) -> Result<f64, CommunityError> {
    let n = network.node_count();
    if labels.len() != n {
        return Err(CommunityError::LengthMismatch { expected: n, got: labels.len() });
    }
    let total = network.total_weight();
    if total == 0.0 {
        return Ok(0.0);
    }
    let c = labels.iter().max().map_or(0, |&m| m + 1);
    let mut inside = vec![0.0; c];
    let mut ends = vec![0.0; c];
    for (a, b, w) in network.edges() {
        let w = f64::from(w);
        ends[labels[a]] += w;
        ends[labels[b]] += w;
        if labels[a] == labels[b] {
            inside[labels[a]] += w;
        }
    }
    Ok(inside.iter().zip(&ends).map(|(&e, &a)| e / total - (a / (2.0 * total)).powi(2)).sum())
}

/// Node → community assignment with dense labels `0..C`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunityPartition {
    labels: Vec<usize>,
    sizes: Vec<usize>,
    modularity: f64,
}

impl CommunityPartition {
    /// Wraps arbitrary labels, compacting them to `0..C` in order of first
    /// appearance, and records the modularity.
    pub fn from_labels(network: &CitationNetwork, labels: &[usize]) -> Result<Self, CommunityError> {
        if labels.len() != network.node_count() {
            return Err(CommunityError::LengthMismatch { expected: network.node_count(), got: labels.len() });
        }
        let (dense, count) = renumber(labels);
        let mut sizes = vec![0; count];
        for &l in &dense {
            sizes[l] += 1;
        }
        let modularity = modularity(network, &dense)?;
        Ok(CommunityPartition { labels: dense, sizes, modularity })
    }

    /// Builds a partition from an id → label map covering every node.
    pub fn from_map(
        network: &CitationNetwork,
        map: &std::collections::HashMap<String, usize>,
    ) -> Result<Self, CommunityError> {
        let labels = network
            .ids()
            .iter()
            .map(|id| map.get(id).copied().ok_or_else(|| CommunityError::MissingNode(id.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_labels(network, &labels)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> usize {
        self.labels[node]
    }

    pub fn community_count(&self) -> usize {
        self.sizes.len()
    }

    /// |α| for every community.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn modularity(&self) -> f64 {
        self.modularity
    }

    pub fn members(&self, community: usize) -> Vec<usize> {
        (0..self.labels.len()).filter(|&i| self.labels[i] == community).collect()
    }

    /// Writes `id,community` rows.
    pub fn write_csv<W: Write>(&self, network: &CitationNetwork, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["id", "community"])?;
        for (i, &l) in self.labels.iter().enumerate() {
            w.write_record([network.id(i), &l.to_string()])?;
        }
        w.flush()
    }
}

/// Maps labels to `0..C` in order of first appearance.
fn renumber(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = std::collections::HashMap::new();
    let dense = labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect();
    (dense, map.len())
}

/// Weighted graph the optimizer works on; super-nodes carry self-loops.
struct WorkGraph {
    adj: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
    strength: Vec<f64>,
    two_m: f64,
}

impl WorkGraph {
    fn from_network(network: &CitationNetwork) -> Self {
        let n = network.node_count();
        let adj: Vec<Vec<(usize, f64)>> =
            (0..n).map(|i| network.neighbors(i).iter().map(|&(j, w)| (j, f64::from(w))).collect()).collect();
        Self::with_loops(adj, vec![0.0; n])
    }

    fn with_loops(adj: Vec<Vec<(usize, f64)>>, self_loops: Vec<f64>) -> Self {
        let strength: Vec<f64> =
            adj.iter().zip(&self_loops).map(|(nbrs, &s)| nbrs.iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * s).collect();
        let two_m = strength.iter().sum();
        WorkGraph { adj, self_loops, strength, two_m }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Repeated sweeps of single-node moves. Returns the community of every
    /// node and whether any node moved.
    fn local_moving(&self, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
        let n = self.len();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut tot = self.strength.clone();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);

        let mut link = vec![0.0; n];
        let mut seen = vec![false; n];
        let mut touched = Vec::new();
        let mut moved_any = false;

        for _ in 0..MAX_SWEEPS {
            let mut moved = false;
            for &i in &order {
                let ki = self.strength[i];
                if ki == 0.0 {
                    continue;
                }
                let own = comm[i];
                for &(j, w) in &self.adj[i] {
                    let c = comm[j];
                    if !seen[c] {
                        seen[c] = true;
                        touched.push(c);
                    }
                    link[c] += w;
                }

                tot[own] -= ki;
                let gain = |c: usize, link: &[f64]| link[c] - tot[c] * ki / self.two_m;
                let stay = gain(own, &link);
                let mut best: Option<(usize, f64)> = None;
                for &c in &touched {
                    let g = gain(c, &link);
                    best = match best {
                        Some((bc, bg)) if g < bg || (g == bg && c > bc) => Some((bc, bg)),
                        _ => Some((c, g)),
                    };
                }
                let target = match best {
                    Some((c, g)) if c != own && g > stay + MIN_GAIN => c,
                    _ => own,
                };
                tot[target] += ki;
                if target != own {
                    comm[i] = target;
                    moved = true;
                }

                for &c in &touched {
                    link[c] = 0.0;
                    seen[c] = false;
                }
                touched.clear();
            }
            if !moved {
                break;
            }
            moved_any = true;
        }
        (comm, moved_any)
    }

    /// Collapses each community (dense labels `0..count`) into one node.
    fn aggregate(&self, comm: &[usize], count: usize) -> Self {
        let mut links: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); count];
        let mut loops = vec![0.0; count];
        for i in 0..self.len() {
            let a = comm[i];
            loops[a] += self.self_loops[i];
            for &(j, w) in &self.adj[i] {
                let b = comm[j];
                if a == b {
                    loops[a] += w / 2.0;
                } else {
                    *links[a].entry(b).or_insert(0.0) += w;
                }
            }
        }
        let adj = links.into_iter().map(|m| m.into_iter().collect()).collect();
        Self::with_loops(adj, loops)
    }
}

/// Multilevel modularity optimization, deterministic for a given seed.
///
/// Labels are renumbered so community 0 is the largest; equal sizes are
/// ordered by their smallest member.
pub fn detect_communities(network: &CitationNetwork, seed: u64) -> Result<CommunityPartition, CommunityError> {
    let n = network.node_count();
    if n == 0 {
        return Err(CommunityError::EmptyNetwork);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut node_comm: Vec<usize> = (0..n).collect();
    let mut graph = WorkGraph::from_network(network);

    while graph.two_m > 0.0 {
        let (comm, moved) = graph.local_moving(&mut rng);
        if !moved {
            break;
        }
        let (dense, count) = renumber(&comm);
        for c in node_comm.iter_mut() {
            *c = dense[*c];
        }
        if count == graph.len() {
            break;
        }
        graph = graph.aggregate(&dense, count);
    }

    let partition = CommunityPartition::from_labels(network, &order_by_size(&node_comm))?;
    // Local moves start from singletons and only raise q, so the result can
    // only fall below the one-community partition (q = 0) if nothing merged.
    if partition.modularity < 0.0 {
        return CommunityPartition::from_labels(network, &vec![0; n]);
    }
    Ok(partition)
}

fn order_by_size(labels: &[usize]) -> Vec<usize> {
    let (dense, count) = renumber(labels);
    let mut sizes = vec![0usize; count];
    for &l in &dense {
        sizes[l] += 1;
    }
    // dense labels already follow first appearance, i.e. smallest member.
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
    let mut rank = vec![0; count];
    for (r, &c) in order.iter().enumerate() {
        rank[c] = r;
    }
    dense.into_iter().map(|l| rank[l]).collect()
}

/// Community quotient graph with `W_αβ = E_αβ / (|α|·|β|)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoarseGraph {
    sizes: Vec<usize>,
    internal: Vec<u64>,
    between: BTreeMap<(usize, usize), u64>,
}

/// One row of the coarse edge list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoarseEdge {
    pub source: usize,
    pub target: usize,
    pub edges: u64,
    pub weight: f64,
}

impl CoarseGraph {
    pub fn community_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// E_αα, the number of edges with both endpoints in `α`.
    pub fn internal_edges(&self, alpha: usize) -> u64 {
        self.internal[alpha]
    }

    /// E_αβ for α ≠ β (symmetric).
    pub fn edges_between(&self, alpha: usize, beta: usize) -> u64 {
        let key = (alpha.min(beta), alpha.max(beta));
        self.between.get(&key).copied().unwrap_or(0)
    }

    /// W_αβ as an exact fraction.
    pub fn weight_exact(&self, alpha: usize, beta: usize) -> Ratio<i64> {
        let e = self.edges_between(alpha, beta) as i64;
        Ratio::new(e, (self.sizes[alpha] * self.sizes[beta]) as i64)
    }

    /// W_αβ rounded once from the exact fraction.
    pub fn weight(&self, alpha: usize, beta: usize) -> f64 {
        let e = self.edges_between(alpha, beta) as f64;
        e / (self.sizes[alpha] as f64 * self.sizes[beta] as f64)
    }

    /// Pairs with at least one connecting edge, `source < target`.
    pub fn edges(&self) -> Vec<CoarseEdge> {
        self.between
            .iter()
            .map(|(&(a, b), &e)| CoarseEdge { source: a, target: b, edges: e, weight: self.weight(a, b) })
            .collect()
    }

    /// Writes `source,target,E,W` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["source", "target", "E", "W"])?;
        for e in self.edges() {
            w.write_record([e.source.to_string(), e.target.to_string(), e.edges.to_string(), e.weight.to_string()])?;
        }
        w.flush()
    }
}

/// Counts edges between and inside communities. Edge weights are not used:
/// E counts connections.
pub fn coarse_grain(network: &CitationNetwork, partition: &CommunityPartition) -> CoarseGraph {
    let c = partition.community_count();
    let mut internal = vec![0u64; c];
    let mut between = BTreeMap::new();
    for (a, b, _) in network.edges() {
        let (x, y) = (partition.label(a), partition.label(b));
        if x == y {
            internal[x] += 1;
        } else {
            *between.entry((x.min(y), x.max(y))).or_insert(0) += 1;
        }
    }
    CoarseGraph { sizes: partition.sizes().to_vec(), internal, between }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cliques_with_bridge() -> CitationNetwork {
        let mut edges = Vec::new();
        for base in [0, 4] {
            for i in 0..4 {
                for j in i + 1..4 {
                    edges.push((base + i, base + j));
                }
            }
        }
        edges.push((3, 4));
        CitationNetwork::from_unweighted(8, &edges)
    }

    #[test]
    fn one_community_has_zero_modularity() {
        let net = cliques_with_bridge();
        assert_eq!(modularity(&net, &[0; 8]).unwrap(), 0.0);
    }

    #[test]
    fn two_triangles_modularity_half() {
        let net = CitationNetwork::from_unweighted(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        let q = modularity(&net, &[0, 0, 0, 1, 1, 1]).unwrap();
        assert!((q - 0.5).abs() < 1e-15);
    }

    #[test]
    fn modularity_length_checked() {
        let net = cliques_with_bridge();
        assert_eq!(modularity(&net, &[0; 3]), Err(CommunityError::LengthMismatch { expected: 8, got: 3 }));
        let map = std::collections::HashMap::from([("0".to_string(), 0)]);
        assert!(matches!(CommunityPartition::from_map(&net, &map), Err(CommunityError::MissingNode(_))));
    }

    #[test]
    fn detects_two_cliques() {
        let net = cliques_with_bridge();
        let p = detect_communities(&net, 7).unwrap();
        assert_eq!(p.labels(), &[0, 0, 0, 0, 1, 1, 1, 1]);
        assert_eq!(p.sizes(), &[4, 4]);
    }

    #[test]
    fn complete_graph_single_community() {
        let mut edges = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                edges.push((i, j));
            }
        }
        let net = CitationNetwork::from_unweighted(5, &edges);
        let p = detect_communities(&net, 1).unwrap();
        assert_eq!(p.community_count(), 1);
    }

    #[test]
    fn empty_network_rejected() {
        let net = CitationNetwork::from_unweighted(0, &[]);
        assert_eq!(detect_communities(&net, 0), Err(CommunityError::EmptyNetwork));
    }

    #[test]
    fn edgeless_network_gives_singletons() {
        let net = CitationNetwork::from_unweighted(3, &[]);
        let p = detect_communities(&net, 0).unwrap();
        assert_eq!(p.community_count(), 3);
        assert_eq!(p.modularity(), 0.0);
    }

    #[test]
    fn coarse_weight_substitution() {
        // α = {0,1,2}, β = {3,4}, two crossing edges.
        let net = CitationNetwork::from_unweighted(5, &[(0, 1), (1, 2), (2, 3), (0, 4), (3, 4)]);
        let p = CommunityPartition::from_labels(&net, &[0, 0, 0, 1, 1]).unwrap();
        let g = coarse_grain(&net, &p);
        assert_eq!(g.edges_between(0, 1), 2);
        assert_eq!(g.weight_exact(0, 1), Ratio::new(1, 3));
        assert_eq!(g.weight(1, 0), g.weight(0, 1));
        assert_eq!(g.internal_edges(0), 2);
        assert_eq!(g.internal_edges(1), 1);
    }

    #[test]
    fn coarse_weight_zero_without_edges() {
        let net = CitationNetwork::from_unweighted(4, &[(0, 1), (2, 3)]);
        let p = CommunityPartition::from_labels(&net, &[0, 0, 1, 1]).unwrap();
        let g = coarse_grain(&net, &p);
        assert_eq!(g.weight(0, 1), 0.0);
        assert!(g.edges().is_empty());
    }
}
