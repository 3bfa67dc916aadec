//! Generators and brute-force reference computations shared by the
//! integration tests. Nothing here calls into the library's algorithms.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi edge list, `a < b`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random::<f64>() < p {
                edges.push((a, b));
            }
        }
    }
    edges
}

/// Random spanning tree plus extra Erdős–Rényi edges.
pub fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut set = BTreeSet::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        set.insert((u, v));
    }
    set.extend(random_graph(rng, n, p));
    set.into_iter().collect()
}

pub fn random_labels(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..k)).collect()
}

pub fn complete_edges(nodes: &[usize]) -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    for (i, &a) in nodes.iter().enumerate() {
        for &b in &nodes[i + 1..] {
            e.push((a.min(b), a.max(b)));
        }
    }
    e
}

/// All-pairs hop counts by Floyd–Warshall.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<Option<u32>>> {
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
    }
    for &(a, b) in edges {
        if a != b {
            d[a][b] = Some(1);
            d[b][a] = Some(1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| x + y < c) {
                        d[i][j] = Some(x + y);
                    }
                }
            }
        }
    }
    d
}

/// q = Σ_α (e_αα − a_α²) from the weighted edge list directly.
pub fn brute_modularity(edges: &[(usize, usize, f64)], labels: &[usize]) -> f64 {
    let m: f64 = edges.iter().map(|e| e.2).sum();
    if m == 0.0 {
        return 0.0;
    }
    let communities: BTreeSet<usize> = labels.iter().copied().collect();
    let mut q = 0.0;
    for &c in &communities {
        let inside: f64 = edges.iter().filter(|e| labels[e.0] == c && labels[e.1] == c).map(|e| e.2).sum();
        let ends: f64 =
            edges.iter().map(|e| e.2 * ((labels[e.0] == c) as u8 as f64 + (labels[e.1] == c) as u8 as f64)).sum();
        let a = ends / (2.0 * m);
        q += inside / m - a * a;
    }
    q
}

/// Normalized mutual information with arithmetic-mean normalization.
pub fn nmi(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let mut joint: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut pa: BTreeMap<usize, f64> = BTreeMap::new();
    let mut pb: BTreeMap<usize, f64> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1.0 / n;
        *pa.entry(x).or_default() += 1.0 / n;
        *pb.entry(y).or_default() += 1.0 / n;
    }
    let h = |p: &BTreeMap<usize, f64>| -p.values().map(|&v| v * v.ln()).sum::<f64>();
    let (ha, hb) = (h(&pa), h(&pb));
    if ha == 0.0 && hb == 0.0 {
        return 1.0;
    }
    let mi: f64 = joint.iter().map(|(&(x, y), &p)| p * (p / (pa[&x] * pb[&y])).ln()).sum();
    2.0 * mi / (ha + hb)
}

/// `e_src · P^h` with dense matrix-vector products.
pub fn dense_walk(n: usize, edges: &[(usize, usize)], src: usize, h: usize) -> Vec<f64> {
    let mut adj = vec![vec![0.0; n]; n];
    for &(a, b) in edges {
        adj[a][b] = 1.0;
        adj[b][a] = 1.0;
    }
    let deg: Vec<f64> = adj.iter().map(|r| r.iter().sum()).collect();
    let mut p = vec![0.0; n];
    p[src] = 1.0;
    for _ in 0..h {
        let mut next = vec![0.0; n];
        for i in 0..n {
            if p[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if adj[i][j] > 0.0 {
                    next[j] += p[i] / deg[i];
                }
            }
        }
        p = next;
    }
    p
}

pub fn exp_entropy(p: &[f64]) -> f64 {
    (-p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()).exp()
}

/// Naive average linkage: every step recomputes each cluster-pair average
/// from leaf pairs. Leaf `i` has rank `i`; ties go to the pair with the
/// smallest (min-leaf, min-leaf) key. Returns (left leaves, right leaves,
/// height) per merge with the left cluster holding the smaller leaf.
pub fn naive_average_linkage(n: usize, d: &[f64]) -> Vec<(Vec<usize>, Vec<usize>, f64)> {
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut out = Vec::new();
    while clusters.len() > 1 {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let mut s = 0.0;
                for &i in &clusters[a] {
                    for &j in &clusters[b] {
                        s += d[i * n + j];
                    }
                }
                let avg = s / (clusters[a].len() * clusters[b].len()) as f64;
                let ka = clusters[a][0];
                let kb = clusters[b][0];
                let key = (ka.min(kb), ka.max(kb));
                if best.is_none_or(|(bd, bk, _, _)| avg < bd || (avg == bd && key < bk)) {
                    best = Some((avg, key, a, b));
                }
            }
        }
        let (h, _, a, b) = best.unwrap();
        let cb = clusters.remove(b);
        let ca = clusters.remove(a);
        let (l, r) = if ca[0] < cb[0] { (ca.clone(), cb.clone()) } else { (cb.clone(), ca.clone()) };
        let mut merged = [ca, cb].concat();
        merged.sort_unstable();
        clusters.push(merged);
        clusters.sort_by_key(|c| c[0]);
        out.push((l, r, h));
    }
    out
}

/// Random symmetric distance matrix with zero diagonal.
pub fn random_distances(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut d = vec![0.0; n * n];
    for a in 0..n {
        for b in a + 1..n {
            let v = rng.random_range(0.5..10.0);
            d[a * n + b] = v;
            d[b * n + a] = v;
        }
    }
    d
}

/// Sorted list of (file name, contents) in a directory.
pub fn snapshot(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}
