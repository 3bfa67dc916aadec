use std::fmt::Write as _;

use serde::Serialize;

use super::TaxonomyError;

/// One agglomeration step. Node ids `0..n` are leaves; the merge at position
/// `i` creates node `n + i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

/// Binary merge tree over labelled leaves.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dendrogram {
    leaves: Vec<String>,
    merges: Vec<Merge>,
}

struct Cluster {
    node: usize,
    key: usize,
    size: usize,
}

/// Average-linkage agglomerative clustering over a dense `n × n` distance
/// matrix (row-major, diagonal ignored).
///
/// Cluster distances are kept as sums over leaf pairs and divided by
/// `|A|·|B|` when compared, so integer-valued inputs produce exact averages.
/// Equal distances are resolved by the pair of smallest leaf labels, which
/// makes the tree independent of input order.
pub fn build_dendrogram(labels: &[String], distances: &[f64]) -> Result<Dendrogram, TaxonomyError> {
    let n = labels.len();
    if n < 2 {
        return Err(TaxonomyError::TooFewKeywords(n));
    }
    if distances.len() != n * n {
        return Err(TaxonomyError::BadMatrix { expected: n * n, got: distances.len() });
    }
    // rank[i] = position of leaf i in label order; the key of a cluster is
    // the smallest rank it contains.
    let mut by_label: Vec<usize> = (0..n).collect();
    by_label.sort_by(|&a, &b| labels[a].cmp(&labels[b]).then(a.cmp(&b)));
    let mut rank = vec![0; n];
    for (r, &i) in by_label.iter().enumerate() {
        rank[i] = r;
    }

    let mut sums: Vec<f64> = (0..n * n)
        .map(|k| {
            let (a, b) = (k / n, k % n);
            distances[a.min(b) * n + a.max(b)]
        })
        .collect();
    let mut slots: Vec<Option<Cluster>> = (0..n).map(|i| Some(Cluster { node: i, key: rank[i], size: 1 })).collect();
    let mut merges = Vec::with_capacity(n - 1);

    for step in 0..n - 1 {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for a in 0..n {
            let Some(ca) = &slots[a] else { continue };
            for b in a + 1..n {
                let Some(cb) = &slots[b] else { continue };
                let d = sums[a * n + b] / (ca.size * cb.size) as f64;
                let pair = (ca.key.min(cb.key), ca.key.max(cb.key));
                let better = match best {
                    None => true,
                    Some((bd, bp, _, _)) => d < bd || (d == bd && pair < bp),
                };
                if better {
                    best = Some((d, pair, a, b));
                }
            }
        }
        let (height, _, a, b) = best.expect("at least two active clusters");
        let (ca, cb) = (slots[a].take().unwrap(), slots[b].take().unwrap());
        let (first, second) = if ca.key < cb.key { (&ca, &cb) } else { (&cb, &ca) };
        merges.push(Merge { left: first.node, right: second.node, height, size: ca.size + cb.size });
        for k in 0..n {
            if slots[k].is_some() {
                let s = sums[a * n + k] + sums[b * n + k];
                sums[a * n + k] = s;
                sums[k * n + a] = s;
            }
        }
        slots[a] = Some(Cluster { node: n + step, key: ca.key.min(cb.key), size: ca.size + cb.size });
    }
    Ok(Dendrogram { leaves: labels.to_vec(), merges })
}

impl Dendrogram {
    pub fn leaves(&self) -> &[String] {
        &self.leaves
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn root_height(&self) -> f64 {
        self.merges.last().map_or(0.0, |m| m.height)
    }

    fn height(&self, node: usize) -> f64 {
        let n = self.leaves.len();
        if node < n {
            0.0
        } else {
            self.merges[node - n].height
        }
    }

    /// Midpoint of the widest gap between consecutive merge heights, so a cut
    /// there separates the most distinct clusters. Falls back to half the
    /// root height with fewer than two merges.
    pub fn largest_gap_threshold(&self) -> f64 {
        let mut heights: Vec<f64> = self.merges.iter().map(|m| m.height).collect();
        heights.sort_by(f64::total_cmp);
        heights
            .windows(2)
            .map(|w| (w[1] - w[0], 0.5 * (w[0] + w[1])))
            .fold(None, |best: Option<(f64, f64)>, g| match best {
                Some(b) if b.0 >= g.0 => Some(b),
                _ => Some(g),
            })
            .map_or(0.5 * self.root_height(), |(_, mid)| mid)
    }

    /// Merges whose height is below one of their children's heights.
    pub fn monotonicity_violations(&self) -> usize {
        self.merges.iter().filter(|m| m.height < self.height(m.left).max(self.height(m.right))).count()
    }

    /// Leaf indices under `node`, ascending.
    pub fn leaves_under(&self, node: usize) -> Vec<usize> {
        let n = self.leaves.len();
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(x) = stack.pop() {
            if x < n {
                out.push(x);
            } else {
                let m = &self.merges[x - n];
                stack.push(m.left);
                stack.push(m.right);
            }
        }
        out.sort_unstable();
        out
    }

    /// Newick with branch lengths equal to height differences.
    pub fn to_newick(&self) -> String {
        let n = self.leaves.len();
        let root = n + self.merges.len() - 1;
        let mut s = String::new();
        self.write_newick(root, None, &mut s);
        s.push(';');
        s
    }

    fn write_newick(&self, node: usize, parent_height: Option<f64>, out: &mut String) {
        let n = self.leaves.len();
        let h = self.height(node);
        if node < n {
            out.push_str(&newick_label(&self.leaves[node]));
        } else {
            let m = &self.merges[node - n];
            out.push('(');
            self.write_newick(m.left, Some(h), out);
            out.push(',');
            self.write_newick(m.right, Some(h), out);
            out.push(')');
        }
        if let Some(p) = parent_height {
            let _ = write!(out, ":{}", p - h);
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dendrogram serializes")
    }
}

fn newick_label(label: &str) -> String {
    if label.chars().any(|c| c.is_whitespace() || "()[]':;,".contains(c)) {
        format!("'{}'", label.replace('\'', "''"))
    } else {
        label.to_string()
    }
}

/// Groups formed by subtrees whose merge heights are all below `threshold`.
/// Groups are sorted internally and ordered by their first label.
pub fn cut_dendrogram(dendrogram: &Dendrogram, threshold: f64) -> Vec<Vec<String>> {
    let n = dendrogram.leaves.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    // highest merge at or below each internal node
    let mut subtree_max = vec![0.0f64; dendrogram.merges.len()];
    let mut rep = vec![0usize; n + dendrogram.merges.len()];
    for (i, r) in rep.iter_mut().enumerate().take(n) {
        *r = i;
    }
    for (i, m) in dendrogram.merges.iter().enumerate() {
        let child_max = |c: usize| if c < n { 0.0 } else { subtree_max[c - n] };
        subtree_max[i] = m.height.max(child_max(m.left)).max(child_max(m.right));
        rep[n + i] = rep[m.left];
        if subtree_max[i] < threshold {
            let (a, b) = (find(&mut parent, rep[m.left]), find(&mut parent, rep[m.right]));
            parent[b] = a;
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<String>> = std::collections::BTreeMap::new();
    for leaf in 0..n {
        let r = find(&mut parent, leaf);
        groups.entry(r).or_default().push(dendrogram.leaves[leaf].clone());
    }
    let mut groups: Vec<Vec<String>> = groups
        .into_values()
        .map(|mut g| {
            g.sort();
            g
        })
        .collect();
    groups.sort();
    groups
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn abc() -> Dendrogram {
        #[rustfmt::skip]
        let d = [
            0.0, 1.0, 4.0,
            1.0, 0.0, 4.0,
            4.0, 4.0, 0.0,
        ];
        build_dendrogram(&labels(&["a", "b", "c"]), &d).unwrap()
    }

    #[test]
    fn two_leaves() {
        let d = build_dendrogram(&labels(&["x", "y"]), &[0.0, 3.0, 3.0, 0.0]).unwrap();
        assert_eq!(d.merges(), &[Merge { left: 0, right: 1, height: 3.0, size: 2 }]);
    }

    #[test]
    fn three_leaf_trace() {
        let d = abc();
        assert_eq!(d.merges()[0], Merge { left: 0, right: 1, height: 1.0, size: 2 });
        assert_eq!(d.merges()[1], Merge { left: 3, right: 2, height: 4.0, size: 3 });
        assert_eq!(d.monotonicity_violations(), 0);
    }

    #[test]
    fn too_few_keywords() {
        assert_eq!(build_dendrogram(&labels(&["x"]), &[0.0]), Err(TaxonomyError::TooFewKeywords(1)));
    }

    #[test]
    fn cuts() {
        let d = abc();
        assert_eq!(cut_dendrogram(&d, 2.0), vec![labels(&["a", "b"]), labels(&["c"])]);
        assert_eq!(cut_dendrogram(&d, 0.0), vec![labels(&["a"]), labels(&["b"]), labels(&["c"])]);
        assert_eq!(cut_dendrogram(&d, 4.0 + 1e-9), vec![labels(&["a", "b", "c"])]);
        assert_eq!(d.largest_gap_threshold(), 2.5);
    }

    #[test]
    fn newick_output() {
        assert_eq!(abc().to_newick(), "((a:1,b:1):3,c:4);");
        let d = build_dendrogram(&labels(&["food web", "it's"]), &[0.0, 2.0, 2.0, 0.0]).unwrap();
        assert_eq!(d.to_newick(), "('food web':2,'it''s':2);");
    }

    #[test]
    fn ties_broken_by_labels() {
        // all distances equal: first merge is (a, b) whatever the input order
        let d = vec![1.0; 9];
        let t = build_dendrogram(&labels(&["c", "b", "a"]), &d).unwrap();
        assert_eq!(t.leaves_under(3), vec![1, 2]);
    }
}
