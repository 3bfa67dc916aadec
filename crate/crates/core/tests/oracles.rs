//! Worked examples checked against independent reference computations.

#![allow(clippy::needless_range_loop)]

mod common;

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use rand::Rng;

use scimap::accessibility::{
    accessibility, peripherality_area, rank_peripherality, AccessibilityProfile, CumulativeCurve,
};
use scimap::citenet::{all_pairs_shortest_paths, bfs_distances, connected_components, CitationNetwork};
use scimap::communities::{coarse_grain, detect_communities, modularity, CommunityPartition};
use scimap::corpus::{Corpus, Paper};
use scimap::layout::{layout_network, LayoutOptions};
use scimap::pipeline::{generate_synthetic_corpus, SyntheticCorpusSpec};
use scimap::salience::community_frequencies_from_labels;
use scimap::salience::{community_frequencies, label_communities, KeywordTable, Preprocessor, TermSets};
use scimap::taxonomy::{build_dendrogram, cut_dendrogram, keyword_distance};
use scimap::timeline::keyword_timeline;

use common::*;

fn paper(id: &str, abstract_text: &str, year: Option<i32>, refs: &[&str]) -> Paper {
    Paper {
        id: id.into(),
        title: String::new(),
        abstract_text: abstract_text.into(),
        year,
        citation_count: 0,
        references: refs.iter().map(|r| r.to_string()).collect(),
    }
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

#[test]
fn bfs_rows_match_floyd_warshall() {
    let mut r = rng(20);
    for _ in 0..10 {
        let edges = random_graph(&mut r, 30, 0.08);
        let net = CitationNetwork::from_unweighted(30, &edges);
        let fw = floyd_warshall(30, &edges);
        let all = all_pairs_shortest_paths(&net);
        for s in 0..30 {
            assert_eq!(bfs_distances(&net, s), fw[s]);
            assert_eq!(all.row(s).collect::<Vec<_>>(), fw[s]);
        }
    }
}

fn union_find_components(n: usize, edges: &[(usize, usize)]) -> usize {
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let root = find(p, p[x]);
            p[x] = root;
        }
        p[x]
    }
    let mut parent: Vec<usize> = (0..n).collect();
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    (0..n).filter(|&x| find(&mut parent, x) == x).count()
}

#[test]
fn component_count_matches_union_find() {
    let mut r = rng(21);
    for _ in 0..20 {
        let p = r.random_range(0.0..0.06);
        let edges = random_graph(&mut r, 50, p);
        let net = CitationNetwork::from_unweighted(50, &edges);
        let labels = connected_components(&net);
        let count = labels.iter().collect::<BTreeSet<_>>().len();
        assert_eq!(count, union_find_components(50, &edges));
    }
}

/// All set partitions of `0..n` as restricted growth strings.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(prefix: &mut Vec<usize>, n: usize, max: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for l in 0..=max + 1 {
            prefix.push(l);
            grow(prefix, n, max.max(l), out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        grow(&mut vec![0], n, 0, &mut out);
    }
    out
}

/// Labels rewritten in order of first appearance.
fn canonical(labels: &[usize]) -> Vec<usize> {
    let mut map = BTreeMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

fn exhaustive_best(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let weighted: Vec<(usize, usize, f64)> = edges.iter().map(|&(a, b)| (a, b, 1.0)).collect();
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for p in set_partitions(n) {
        let q = brute_modularity(&weighted, &p);
        if q > best.0 + 1e-12 {
            best = (q, p);
        }
    }
    best.1
}

#[test]
fn two_cliques_match_exhaustive_optimum() {
    let mut edges = complete_edges(&[0, 1, 2, 3]);
    edges.extend(complete_edges(&[4, 5, 6, 7]));
    edges.push((3, 4));
    let best = exhaustive_best(8, &edges);
    assert_eq!(best, vec![0, 0, 0, 0, 1, 1, 1, 1]);
    let net = CitationNetwork::from_unweighted(8, &edges);
    for seed in 0..5 {
        assert_eq!(canonical(detect_communities(&net, seed).unwrap().labels()), best);
    }
}

#[test]
fn complete_graph_is_not_split() {
    let edges = complete_edges(&[0, 1, 2, 3, 4]);
    assert_eq!(exhaustive_best(5, &edges), vec![0; 5]);
    let net = CitationNetwork::from_unweighted(5, &edges);
    assert_eq!(detect_communities(&net, 0).unwrap().community_count(), 1);
}

#[test]
fn modularity_over_every_partition_of_small_graphs() {
    let mut r = rng(22);
    for _ in 0..5 {
        let n = r.random_range(2..=6);
        let edges = random_graph(&mut r, n, 0.5);
        let net = CitationNetwork::from_unweighted(n, &edges);
        let weighted: Vec<(usize, usize, f64)> = edges.iter().map(|&(a, b)| (a, b, 1.0)).collect();
        for p in set_partitions(n) {
            let q = modularity(&net, &p).unwrap();
            assert!((q - brute_modularity(&weighted, &p)).abs() < 1e-12);
        }
    }
    let mut triangles = complete_edges(&[0, 1, 2]);
    triangles.extend(complete_edges(&[3, 4, 5]));
    let net = CitationNetwork::from_unweighted(6, &triangles);
    assert!((modularity(&net, &[0, 0, 0, 1, 1, 1]).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn coarse_weights_on_a_40_node_graph() {
    let mut r = rng(23);
    let edges = random_graph(&mut r, 40, 0.15);
    let net = CitationNetwork::from_unweighted(40, &edges);
    let partition = CommunityPartition::from_labels(&net, &random_labels(&mut r, 40, 5)).unwrap();
    let coarse = coarse_grain(&net, &partition);
    let l = partition.labels();
    for a in 0..5 {
        for b in 0..5 {
            if a == b {
                continue;
            }
            let e = edges.iter().filter(|&&(x, y)| (l[x], l[y]) == (a, b) || (l[x], l[y]) == (b, a)).count() as i64;
            let (sa, sb) = (partition.sizes()[a] as i64, partition.sizes()[b] as i64);
            assert_eq!(coarse.weight_exact(a, b), Ratio::new(e, sa * sb));
        }
    }
}

#[test]
fn term_sets_of_five_abstracts() {
    let corpus = Corpus::from_papers(vec![
        paper("P1", "Complex networks model epidemics.", None, &[]),
        paper("P2", "Epidemic spreading on networks", None, &[]),
        paper("P3", "Graphene sheets; quantum dots.", None, &[]),
        paper("P4", "Studies of 3 species", None, &[]),
        paper("P5", "", None, &[]),
    ])
    .unwrap();
    let ts = TermSets::build(&corpus, &Preprocessor::english());
    let expected = [
        set(&["complex", "network", "model", "epidemic", "complex network", "network model", "model epidemic"]),
        set(&["epidemic", "spreading", "network", "epidemic spreading"]),
        set(&["graphene", "sheet", "quantum", "dot", "graphene sheet", "quantum dot"]),
        set(&["study", "species"]),
        set(&[]),
    ];
    for (i, e) in expected.iter().enumerate() {
        assert_eq!(ts.terms(i), e, "paper {i}");
    }
}

#[test]
fn toy_three_community_labels() {
    let ts = TermSets::from_sets(vec![
        set(&["a", "x"]),
        set(&["a", "y"]),
        set(&["b", "x"]),
        set(&["b"]),
        set(&["c"]),
        set(&["c", "y"]),
    ]);
    let table: KeywordTable = community_frequencies_from_labels(&ts, &[0, 0, 1, 1, 2, 2], &[2, 2, 2]).unwrap();
    assert_eq!(label_communities(&table, 1), vec![vec!["a"], vec!["b"], vec!["c"]]);
    // second place: x and y both at 1/2 - 1/4 in community 0; x wins lexicographically
    assert_eq!(label_communities(&table, 2), vec![vec!["a", "x"], vec!["b", "x"], vec!["c", "y"]]);
}

#[test]
fn keyword_distance_worked_examples() {
    let path = CitationNetwork::from_unweighted(3, &[(0, 1), (1, 2)]);
    let d = all_pairs_shortest_paths(&path);
    assert_eq!(keyword_distance(&[0], &[2], &d), Some(2.0));
    assert_eq!(keyword_distance(&[0], &[1, 2], &d), Some(1.5));
    let split = CitationNetwork::from_unweighted(4, &[(0, 1), (2, 3)]);
    assert_eq!(keyword_distance(&[0, 1], &[2, 3], &all_pairs_shortest_paths(&split)), None);
}

#[test]
fn dendrogram_trace_and_cut() {
    let labels: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
    let d = [0.0, 1.0, 4.0, 1.0, 0.0, 4.0, 4.0, 4.0, 0.0];
    let tree = build_dendrogram(&labels, &d).unwrap();
    let heights: Vec<f64> = tree.merges().iter().map(|m| m.height).collect();
    assert_eq!(heights, vec![1.0, 4.0]);
    assert_eq!(tree.leaves_under(tree.merges()[0].left), vec![0]);
    assert_eq!(tree.leaves_under(tree.merges()[0].right), vec![1]);
    assert_eq!(cut_dendrogram(&tree, 2.0), vec![vec!["a", "b"], vec!["c"]]);
    let pair = build_dendrogram(&labels[..2], &[0.0, 3.0, 3.0, 0.0]).unwrap();
    assert_eq!(pair.merges().len(), 1);
    assert_eq!(pair.root_height(), 3.0);
}

#[test]
fn path_middle_node_entropy() {
    let edges = [(0, 1), (1, 2), (2, 3), (3, 4)];
    let net = CitationNetwork::from_unweighted(5, &edges);
    let k = accessibility(&net, 2, 3).unwrap();
    assert!((k - exp_entropy(&dense_walk(5, &edges, 2, 3))).abs() < 1e-9);
}

#[test]
fn cumulative_curve_matches_counting() {
    let mut r = rng(24);
    let values: Vec<f64> = (0..300).map(|_| (r.random_range(0..40) as f64) / 4.0).collect();
    let curve = CumulativeCurve::from_values(values.clone()).unwrap();
    for _ in 0..1000 {
        let x = r.random_range(-1.0..11.0);
        let count = values.iter().filter(|&&v| v <= x).count();
        assert_eq!(curve.eval(x), count as f64 / values.len() as f64);
    }
}

/// Area under the empirical CDF by a fine midpoint rule.
fn integrate(values: &[f64], lo: f64, hi: f64) -> f64 {
    let steps = 200_000;
    let h = (hi - lo) / steps as f64;
    let mut area = 0.0;
    for s in 0..steps {
        let x = lo + (s as f64 + 0.5) * h;
        area += values.iter().filter(|&&v| v <= x).count() as f64 / values.len() as f64 * h;
    }
    area / (hi - lo)
}

#[test]
fn areas_match_direct_integration() {
    let low = vec![1.0, 1.5, 2.0, 3.0];
    let high = vec![3.5, 4.0, 4.5, 6.0];
    let profile =
        AccessibilityProfile { steps: 3, kappa: vec![], by_community: vec![low.clone(), high.clone()], isolated: 0 };
    let areas = rank_peripherality(&profile).unwrap();
    assert_eq!(areas[0].community, 0);
    for a in &areas {
        let values = if a.community == 0 { &low } else { &high };
        assert!((a.area - integrate(values, 1.0, 6.0)).abs() < 1e-4, "{a:?}");
    }
    let at_min = CumulativeCurve::from_values(vec![1.0, 1.0]).unwrap();
    assert_eq!(peripherality_area(&at_min, (1.0, 6.0)).unwrap(), 1.0);
    let at_max = CumulativeCurve::from_values(vec![6.0]).unwrap();
    assert_eq!(peripherality_area(&at_max, (1.0, 6.0)).unwrap(), 0.0);
}

#[test]
fn two_cliques_layout_separates_them() {
    let mut edges = complete_edges(&[0, 1, 2, 3, 4]);
    edges.extend(complete_edges(&[5, 6, 7, 8, 9]));
    edges.push((4, 5));
    let net = CitationNetwork::from_unweighted(10, &edges);
    for seed in 0..5 {
        let l = layout_network(&net, LayoutOptions { dims: 2, iterations: 300, seed, grid: None }).unwrap();
        let (mut intra, mut inter) = (Vec::new(), Vec::new());
        for a in 0..10 {
            for b in a + 1..10 {
                if (a < 5) == (b < 5) {
                    intra.push(l.distance(a, b))
                } else {
                    inter.push(l.distance(a, b))
                }
            }
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        assert!(mean(&intra) < mean(&inter), "seed {seed}");
    }
}

#[test]
fn timeline_rows_match_hand_counts() {
    let data = [(2001, true), (2001, false), (2002, true), (2002, true), (2002, false), (2004, false)];
    let papers = data.iter().enumerate().map(|(i, &(y, _))| paper(&format!("p{i}"), "", Some(y), &[])).collect();
    let corpus = Corpus::from_papers(papers).unwrap();
    let ts = TermSets::from_sets(data.iter().map(|&(_, has)| if has { set(&["w"]) } else { set(&[]) }).collect());
    let t = keyword_timeline("w", &corpus, &ts, (2000, 2005));
    assert_eq!(t.counts, BTreeMap::from([(2001, (1, 2)), (2002, (2, 3)), (2004, (0, 1))]));
}

#[test]
fn synthetic_topics_without_cross_citations_stay_apart() {
    let mut spec = SyntheticCorpusSpec::generated(2, 10, 3);
    spec.p_inter = 0.0;
    spec.p_intra = 0.5;
    let synth = generate_synthetic_corpus(&spec).unwrap();
    let net = scimap::citenet::build_citation_network(&synth.corpus);
    for (a, b, _) in net.edges() {
        assert_eq!(synth.planted[a], synth.planted[b]);
    }
    let components = connected_components(&net).into_iter().collect::<BTreeSet<_>>().len();
    let p = detect_communities(&net, 0).unwrap();
    let clean = (0..20).all(|i| (0..20).all(|j| (p.label(i) == p.label(j)) <= (synth.planted[i] == synth.planted[j])));
    assert!(components >= 2 || (p.community_count() == 2 && clean));
}

#[test]
fn signature_words_are_exclusive() {
    let spec = SyntheticCorpusSpec::generated(3, 30, 8);
    let synth = generate_synthetic_corpus(&spec).unwrap();
    let ts = TermSets::build(&synth.corpus, &Preprocessor::english());
    let net = scimap::citenet::build_citation_network(&synth.corpus);
    let partition = CommunityPartition::from_labels(&net, &synth.planted).unwrap();
    let table = community_frequencies(&ts, &partition).unwrap();
    for t in 0..3 {
        let signature = &spec.topic_vocabularies[t][0];
        let n = synth.corpus.len();
        let inside = (0..n).filter(|&i| synth.planted[i] == t && ts.terms(i).contains(signature)).count();
        let outside = (0..n).filter(|&i| synth.planted[i] != t && ts.terms(i).contains(signature)).count();
        assert_eq!((inside, outside), (30, 0));
        let w = table.term_index(signature).unwrap();
        let label = partition.label(synth.planted.iter().position(|&p| p == t).unwrap());
        assert_eq!(table.f_out(w, label), Ratio::from_integer(0));
        assert_eq!(table.importance(w), (Ratio::from_integer(1), label));
    }
}
