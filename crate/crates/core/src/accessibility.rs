//! Random-walk accessibility and the per-community peripherality ranking.
//!
//! The accessibility of node `i` at level `h` is the exponential of the
//! Shannon entropy of the `h`-step transition probabilities of a uniform
//! random walk started at `i`: the number of nodes the walk effectively
//! reaches. Low values mark the border of the network.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::citenet::CitationNetwork;
use crate::communities::CommunityPartition;

pub const DEFAULT_LEVEL: usize = 3;

#[derive(Debug, Error, PartialEq)]
pub enum AccessibilityError {
    #[error("node {0:?} is isolated; no random walk is defined")]
    IsolatedNode(String),
    #[error("walk length must be at least 1")]
    ZeroSteps,
    #[error("community {0} has no node with a defined accessibility")]
    EmptyCommunity(usize),
    #[error("accessibility range is degenerate (all values equal {0})")]
    DegenerateRange(f64),
}

/// Row `source` of `P^h` with `P_ij = 1/deg(i)` for neighbours `j`.
pub fn walk_probabilities(
    network: &CitationNetwork,
    source: usize,
    steps: usize,
) -> Result<Vec<f64>, AccessibilityError> {
    if steps == 0 {
        return Err(AccessibilityError::ZeroSteps);
    }
    if network.degree(source) == 0 {
        return Err(AccessibilityError::IsolatedNode(network.id(source).to_string()));
    }
    let n = network.node_count();
    let mut p = vec![0.0; n];
    p[source] = 1.0;
    let mut frontier = vec![source];
    let mut in_next = vec![false; n];
    for _ in 0..steps {
        let mut next = vec![0.0; n];
        let mut next_frontier = Vec::new();
        for &i in &frontier {
            let share = p[i] / network.degree(i) as f64;
            for &(j, _) in network.neighbors(i) {
                next[j] += share;
                if !in_next[j] {
                    in_next[j] = true;
                    next_frontier.push(j);
                }
            }
        }
        for &j in &next_frontier {
            in_next[j] = false;
        }
        next_frontier.sort_unstable();
        p = next;
        frontier = next_frontier;
    }
    Ok(p)
}

/// `exp(−Σ p ln p)` over the nonzero entries.
///
/// Entries with bitwise-equal probability are pooled; when only one value
/// occurs the walk is uniform over its support and the result is the exact
/// support size.
pub fn perplexity(probabilities: &[f64]) -> f64 {
    let mut nonzero: Vec<f64> = probabilities.iter().copied().filter(|&p| p > 0.0).collect();
    if nonzero.is_empty() {
        return 0.0;
    }
    nonzero.sort_by(f64::total_cmp);
    let mut entropy = 0.0;
    let mut distinct = 0;
    let mut i = 0;
    while i < nonzero.len() {
        let p = nonzero[i];
        let run = nonzero[i..].iter().take_while(|&&q| q == p).count();
        entropy -= run as f64 * p * p.ln();
        distinct += 1;
        i += run;
    }
    if distinct == 1 {
        nonzero.len() as f64
    } else {
        entropy.exp()
    }
}

/// Accessibility of one node. Isolated nodes are an error here; profiles
/// record them as 0.
pub fn accessibility(network: &CitationNetwork, source: usize, steps: usize) -> Result<f64, AccessibilityError> {
    walk_probabilities(network, source, steps).map(|p| perplexity(&p))
}

/// Accessibility of every node, grouped by community.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccessibilityProfile {
    pub steps: usize,
    /// κ per node; 0 for isolated nodes.
    pub kappa: Vec<f64>,
    /// Sorted κ of the non-isolated members of each community.
    pub by_community: Vec<Vec<f64>>,
    pub isolated: usize,
}

impl AccessibilityProfile {
    pub fn compute(
        network: &CitationNetwork,
        partition: &CommunityPartition,
        steps: usize,
    ) -> Result<Self, AccessibilityError> {
        if steps == 0 {
            return Err(AccessibilityError::ZeroSteps);
        }
        let kappa: Vec<f64> = (0..network.node_count())
            .into_par_iter()
            .map(|i| accessibility(network, i, steps).unwrap_or(0.0))
            .collect();
        let isolated = (0..network.node_count()).filter(|&i| network.degree(i) == 0).count();
        if isolated > 0 {
            log::warn!("{isolated} isolated node(s) have accessibility 0 and are left out of the curves");
        }
        let mut by_community = vec![Vec::new(); partition.community_count()];
        for (i, &k) in kappa.iter().enumerate() {
            if network.degree(i) > 0 {
                by_community[partition.label(i)].push(k);
            }
        }
        for values in &mut by_community {
            values.sort_by(f64::total_cmp);
        }
        Ok(AccessibilityProfile { steps, kappa, by_community, isolated })
    }

    /// Smallest and largest κ over all non-isolated nodes.
    pub fn global_range(&self) -> Option<(f64, f64)> {
        let mut it = self.by_community.iter().flatten().copied();
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), k| (lo.min(k), hi.max(k))))
    }

    /// Writes `id,community,kappa` rows.
    pub fn write_csv<W: Write>(
        &self,
        network: &CitationNetwork,
        partition: &CommunityPartition,
        out: W,
    ) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["id", "community", "kappa"])?;
        for (i, k) in self.kappa.iter().enumerate() {
            w.write_record([network.id(i).to_string(), partition.label(i).to_string(), k.to_string()])?;
        }
        w.flush()
    }
}

/// Empirical CDF `F(x)` = fraction of a community's values `≤ x`.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeCurve {
    values: Vec<f64>,
}

impl CumulativeCurve {
    pub fn from_values(mut values: Vec<f64>) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        values.sort_by(f64::total_cmp);
        Some(CumulativeCurve { values })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.values.partition_point(|&v| v <= x) as f64 / self.values.len() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(x, F(x))` at `samples` evenly spaced points over `[lo, hi]`.
    pub fn sample(&self, lo: f64, hi: f64, samples: usize) -> Vec<(f64, f64)> {
        (0..samples)
            .map(|s| {
                let x = if samples == 1 { lo } else { lo + (hi - lo) * s as f64 / (samples - 1) as f64 };
                (x, self.eval(x))
            })
            .collect()
    }
}

pub fn cumulative_curve(
    profile: &AccessibilityProfile,
    community: usize,
) -> Result<CumulativeCurve, AccessibilityError> {
    CumulativeCurve::from_values(profile.by_community[community].clone())
        .ok_or(AccessibilityError::EmptyCommunity(community))
}

/// Area under `F` over `[lo, hi]`, divided by `hi − lo`. Each value `v`
/// contributes `(hi − clamp(v)) / (hi − lo)` weighted by `1/m`.
pub fn peripherality_area(curve: &CumulativeCurve, range: (f64, f64)) -> Result<f64, AccessibilityError> {
    let (lo, hi) = range;
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        return Err(AccessibilityError::DegenerateRange(lo));
    }
    let m = curve.values.len() as f64;
    let total: f64 = curve.values.iter().map(|&v| hi - v.clamp(lo, hi)).sum();
    Ok(total / (m * (hi - lo)))
}

/// Area of one community.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunityArea {
    pub community: usize,
    pub area: f64,
    pub nodes: usize,
}

/// Areas of every community with defined accessibility, most peripheral
/// (largest area) first; equal areas keep community order.
pub fn rank_peripherality(profile: &AccessibilityProfile) -> Result<Vec<CommunityArea>, AccessibilityError> {
    let range = profile.global_range().ok_or(AccessibilityError::DegenerateRange(0.0))?;
    let mut areas = Vec::new();
    for c in 0..profile.by_community.len() {
        let Ok(curve) = cumulative_curve(profile, c) else {
            log::warn!("community {c} has only isolated nodes; no accessibility curve");
            continue;
        };
        areas.push(CommunityArea { community: c, area: peripherality_area(&curve, range)?, nodes: curve.values.len() });
    }
    areas.sort_by(|a, b| b.area.total_cmp(&a.area).then(a.community.cmp(&b.community)));
    Ok(areas)
}
