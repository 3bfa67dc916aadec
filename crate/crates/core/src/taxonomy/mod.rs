//! Keyword taxonomy: topological distance between keywords, average-linkage
//! dendrogram, threshold cut, and paper-to-group assignment.

mod dendrogram;

pub use dendrogram::{build_dendrogram, cut_dendrogram, Dendrogram, Merge};

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::citenet::{bfs_distances, CitationNetwork, DistanceMatrix};
use crate::salience::TermSets;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TaxonomyError {
    #[error("keyword {0:?} does not occur in any paper")]
    UnknownKeyword(String),
    #[error("need at least 2 keywords to build a dendrogram, got {0}")]
    TooFewKeywords(usize),
    #[error("distance matrix is {got} entries, expected {expected}")]
    BadMatrix { expected: usize, got: usize },
}

/// Mean hop count over ordered paper pairs `(i, j)`, `i ≠ j`, with `u ∈ A_i`,
/// `v ∈ A_j` and `j` reachable from `i`. `None` when no such pair exists.
pub fn keyword_distance(u_papers: &[usize], v_papers: &[usize], dist: &DistanceMatrix) -> Option<f64> {
    let mut sum = 0u64;
    let mut count = 0u64;
    for &i in u_papers {
        for &j in v_papers {
            if i == j {
                continue;
            }
            if let Some(d) = dist.get(i, j) {
                sum += u64::from(d);
                count += 1;
            }
        }
    }
    (count > 0).then(|| sum as f64 / count as f64)
}

/// [`keyword_distance`] looked up by keyword text.
pub fn keyword_distance_by_name(
    u: &str,
    v: &str,
    dist: &DistanceMatrix,
    termsets: &TermSets,
) -> Result<Option<f64>, TaxonomyError> {
    let postings = termsets.postings(&[u.to_string(), v.to_string()]);
    for (k, p) in [u, v].iter().zip(&postings) {
        if p.is_empty() {
            return Err(TaxonomyError::UnknownKeyword(k.to_string()));
        }
    }
    Ok(keyword_distance(&postings[0], &postings[1], dist))
}

/// Pairwise keyword distances with their pair tallies.
#[derive(Debug, Clone, PartialEq)]
pub struct KeywordDistanceMatrix {
    keywords: Vec<String>,
    sums: Vec<u64>,
    counts: Vec<u64>,
}

impl KeywordDistanceMatrix {
    pub fn keywords(&self) -> &[String] {
        &self.keywords
    }

    pub fn len(&self) -> usize {
        self.keywords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keywords.is_empty()
    }

    /// ⟨ℓ⟩ for keywords `u`, `v` by index.
    pub fn get(&self, u: usize, v: usize) -> Option<f64> {
        let k = u * self.len() + v;
        (self.counts[k] > 0).then(|| self.sums[k] as f64 / self.counts[k] as f64)
    }

    /// Number of paper pairs that entered the average.
    pub fn pair_count(&self, u: usize, v: usize) -> u64 {
        self.counts[u * self.len() + v]
    }

    /// Dense off-diagonal matrix with undefined entries replaced by
    /// (largest defined distance + 1). Returns the matrix and the number of
    /// unordered pairs that were substituted.
    pub fn resolved(&self) -> (Vec<f64>, usize) {
        let n = self.len();
        let max = (0..n)
            .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
            .filter_map(|(u, v)| self.get(u, v))
            .fold(f64::NEG_INFINITY, f64::max);
        let fill = if max.is_finite() { max + 1.0 } else { 1.0 };
        let mut substituted = 0;
        let mut out = vec![0.0; n * n];
        for u in 0..n {
            for v in 0..n {
                if u == v {
                    continue;
                }
                out[u * n + v] = self.get(u, v).unwrap_or_else(|| {
                    if u < v {
                        substituted += 1;
                    }
                    fill
                });
            }
        }
        (out, substituted)
    }

    /// Writes `u,v,distance,pairs` rows for `u < v`; undefined distances are
    /// left empty.
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["u", "v", "distance", "pairs"])?;
        for u in 0..self.len() {
            for v in u + 1..self.len() {
                w.write_record([
                    self.keywords[u].clone(),
                    self.keywords[v].clone(),
                    self.get(u, v).map(|d| d.to_string()).unwrap_or_default(),
                    self.pair_count(u, v).to_string(),
                ])?;
            }
        }
        w.flush()
    }
}

/// All keyword distances with one BFS per paper that carries a keyword.
///
/// Hop counts are integers, so the per-source partial sums can be reduced in
/// any order without changing the result.
pub fn keyword_distance_matrix(
    network: &CitationNetwork,
    keywords: &[String],
    postings: &[Vec<usize>],
) -> KeywordDistanceMatrix {
    let k = keywords.len();
    let n = network.node_count();
    let mut carried: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (kw, papers) in postings.iter().enumerate() {
        for &p in papers {
            carried[p].push(kw);
        }
    }
    let sources: Vec<usize> = (0..n).filter(|&i| !carried[i].is_empty()).collect();

    let (sums, counts) = sources
        .par_iter()
        .fold(
            || (vec![0u64; k * k], vec![0u64; k * k]),
            |(mut sums, mut counts), &i| {
                let dist = bfs_distances(network, i);
                for (v, papers) in postings.iter().enumerate() {
                    let mut s = 0u64;
                    let mut c = 0u64;
                    for &j in papers {
                        if j != i {
                            if let Some(d) = dist[j] {
                                s += u64::from(d);
                                c += 1;
                            }
                        }
                    }
                    for &u in &carried[i] {
                        sums[u * k + v] += s;
                        counts[u * k + v] += c;
                    }
                }
                (sums, counts)
            },
        )
        .reduce(
            || (vec![0u64; k * k], vec![0u64; k * k]),
            |(mut s1, mut c1), (s2, c2)| {
                s1.iter_mut().zip(s2).for_each(|(a, b)| *a += b);
                c1.iter_mut().zip(c2).for_each(|(a, b)| *a += b);
                (s1, c1)
            },
        );
    KeywordDistanceMatrix { keywords: keywords.to_vec(), sums, counts }
}

/// Paper → group assignment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupAssignment {
    pub assignment: Vec<Option<usize>>,
    pub group_sizes: Vec<usize>,
    pub unassigned: usize,
}

/// Assigns each paper to the group with strictly the most of its keywords
/// present; ties and papers without keywords stay unassigned.
pub fn assign_papers_to_groups(groups: &[Vec<String>], termsets: &TermSets) -> GroupAssignment {
    let mut group_sizes = vec![0; groups.len()];
    let assignment: Vec<Option<usize>> = (0..termsets.len())
        .map(|paper| {
            let scores: Vec<usize> =
                groups.iter().map(|g| g.iter().filter(|k| termsets.contains(paper, k)).count()).collect();
            let best = scores.iter().copied().max().unwrap_or(0);
            if best == 0 || scores.iter().filter(|&&s| s == best).count() > 1 {
                return None;
            }
            let g = scores.iter().position(|&s| s == best);
            if let Some(g) = g {
                group_sizes[g] += 1;
            }
            g
        })
        .collect();
    let unassigned = assignment.iter().filter(|a| a.is_none()).count();
    GroupAssignment { assignment, group_sizes, unassigned }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::citenet::all_pairs_shortest_paths;
    use std::collections::BTreeSet;

    fn sets(papers: &[&[&str]]) -> TermSets {
        TermSets::from_sets(papers.iter().map(|p| p.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>()).collect())
    }

    fn path3() -> CitationNetwork {
        CitationNetwork::from_unweighted(3, &[(0, 1), (1, 2)])
    }

    #[test]
    fn single_pair_average() {
        let d = all_pairs_shortest_paths(&path3());
        let ts = sets(&[&["u"], &[], &["v"]]);
        assert_eq!(keyword_distance_by_name("u", "v", &d, &ts).unwrap(), Some(2.0));
    }

    #[test]
    fn two_pair_average() {
        let d = all_pairs_shortest_paths(&path3());
        assert_eq!(keyword_distance(&[0], &[1, 2], &d), Some(1.5));
    }

    #[test]
    fn disconnected_is_undefined() {
        let net = CitationNetwork::from_unweighted(4, &[(0, 1), (2, 3)]);
        let d = all_pairs_shortest_paths(&net);
        assert_eq!(keyword_distance(&[0, 1], &[2, 3], &d), None);
    }

    #[test]
    fn co_occurring_keywords_skip_self_pair() {
        let d = all_pairs_shortest_paths(&path3());
        // paper 0 has both; only (0,2) and (2,0)-style pairs count.
        assert_eq!(keyword_distance(&[0], &[0, 2], &d), Some(2.0));
        assert_eq!(keyword_distance(&[0], &[0], &d), None);
    }

    #[test]
    fn unknown_keyword_rejected() {
        let d = all_pairs_shortest_paths(&path3());
        let ts = sets(&[&["u"], &[], &[]]);
        assert_eq!(keyword_distance_by_name("u", "zzz", &d, &ts), Err(TaxonomyError::UnknownKeyword("zzz".into())));
    }

    #[test]
    fn bulk_matches_single_pair() {
        let net = CitationNetwork::from_unweighted(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (1, 4)]);
        let ts = sets(&[&["a", "b"], &["b"], &["c"], &["a", "c"], &["b"], &["a"]]);
        let kws: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let post = ts.postings(&kws);
        let m = keyword_distance_matrix(&net, &kws, &post);
        let d = all_pairs_shortest_paths(&net);
        for u in 0..3 {
            for v in 0..3 {
                assert_eq!(m.get(u, v), keyword_distance(&post[u], &post[v], &d), "{u} {v}");
            }
        }
    }

    #[test]
    fn undefined_pairs_get_max_plus_one() {
        let net = CitationNetwork::from_unweighted(4, &[(0, 1), (2, 3)]);
        let ts = sets(&[&["a"], &["b"], &["c"], &[]]);
        let kws: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let m = keyword_distance_matrix(&net, &kws, &ts.postings(&kws));
        let (resolved, substituted) = m.resolved();
        assert_eq!(substituted, 2);
        assert_eq!(resolved[1], 1.0);
        assert_eq!(resolved[2], 2.0);
        assert_eq!(resolved[3 + 2], 2.0);
    }

    #[test]
    fn paper_assignment_rules() {
        let groups =
            vec![vec!["a".to_string(), "b".to_string(), "c".to_string()], vec!["x".to_string(), "y".to_string()]];
        let ts = sets(&[&["a", "b", "c", "x"], &["q"], &["a", "b", "x", "y"]]);
        let g = assign_papers_to_groups(&groups, &ts);
        assert_eq!(g.assignment, vec![Some(0), None, None]);
        assert_eq!(g.group_sizes, vec![1, 0]);
        assert_eq!(g.unassigned, 2);
    }
}
