//! Community-relative keyword salience.
//!
//! For a term `w` and community `α` with `n_α(w)` papers containing `w`:
//!
//! ```text
//! F_in(α, w)  = n_α(w) / |α|
//! F_out(α, w) = Σ_{γ≠α} n_γ(w) / (N − |α|)
//! I(w)        = max_α [F_in(α, w) − F_out(α, w)]
//! ```
//!
//! All three are kept as exact fractions and only rounded to `f64` on export.

pub mod text;

use std::collections::{BTreeMap, HashSet};
use std::io::{self, Write};

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::communities::CommunityPartition;
pub use text::{extract_terms, normalize_phrase, Preprocessor, TermSets, Token};

/// Size of the ranking prefix whose bigrams suppress their component unigrams.
pub const BIGRAM_REFERENCE_WINDOW: usize = 200;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SalienceError {
    #[error("community {community} contains all {size} papers; out-community frequency is undefined")]
    DegeneratePartition { community: usize, size: usize },
    #[error("community {0} has no papers")]
    EmptyCommunity(usize),
    #[error("partition covers {partition} papers but {termsets} term sets were given")]
    LengthMismatch { partition: usize, termsets: usize },
}

pub type Fraction = Ratio<i64>;

pub fn to_f64(r: Fraction) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Per-term, per-community document counts.
#[derive(Debug, Clone, PartialEq)]
pub struct KeywordTable {
    terms: Vec<String>,
    counts: Vec<Vec<(usize, u32)>>,
    doc_freq: Vec<u32>,
    sizes: Vec<usize>,
    total: usize,
}

/// Counts `n_α(w)` for every term occurring in at least one paper.
pub fn community_frequencies(
    termsets: &TermSets,
    partition: &CommunityPartition,
) -> Result<KeywordTable, SalienceError> {
    community_frequencies_from_labels(termsets, partition.labels(), partition.sizes())
}

/// Same as [`community_frequencies`] for raw dense labels.
pub fn community_frequencies_from_labels(
    termsets: &TermSets,
    labels: &[usize],
    sizes: &[usize],
) -> Result<KeywordTable, SalienceError> {
    if labels.len() != termsets.len() {
        return Err(SalienceError::LengthMismatch { partition: labels.len(), termsets: termsets.len() });
    }
    let total = labels.len();
    if let Some(c) = sizes.iter().position(|&s| s == 0) {
        return Err(SalienceError::EmptyCommunity(c));
    }
    if let Some(c) = sizes.iter().position(|&s| s == total) {
        return Err(SalienceError::DegeneratePartition { community: c, size: total });
    }
    let mut counts: BTreeMap<&str, BTreeMap<usize, u32>> = BTreeMap::new();
    for (paper, set) in termsets.iter().enumerate() {
        for term in set {
            *counts.entry(term.as_str()).or_default().entry(labels[paper]).or_insert(0) += 1;
        }
    }
    let mut table = KeywordTable {
        terms: Vec::with_capacity(counts.len()),
        counts: Vec::with_capacity(counts.len()),
        doc_freq: Vec::with_capacity(counts.len()),
        sizes: sizes.to_vec(),
        total,
    };
    for (term, per) in counts {
        table.terms.push(term.to_string());
        table.doc_freq.push(per.values().sum());
        table.counts.push(per.into_iter().collect());
    }
    Ok(table)
}

impl KeywordTable {
    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term_index(&self, term: &str) -> Option<usize> {
        self.terms.binary_search_by(|t| t.as_str().cmp(term)).ok()
    }

    pub fn community_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn total_papers(&self) -> usize {
        self.total
    }

    /// n_α(w).
    pub fn count(&self, term: usize, community: usize) -> u32 {
        match self.counts[term].binary_search_by_key(&community, |&(c, _)| c) {
            Ok(i) => self.counts[term][i].1,
            Err(_) => 0,
        }
    }

    /// Papers in the whole corpus containing the term.
    pub fn document_frequency(&self, term: usize) -> u32 {
        self.doc_freq[term]
    }

    pub fn f_in(&self, term: usize, community: usize) -> Fraction {
        Ratio::new(i64::from(self.count(term, community)), self.sizes[community] as i64)
    }

    pub fn f_out(&self, term: usize, community: usize) -> Fraction {
        let outside = self.doc_freq[term] - self.count(term, community);
        Ratio::new(i64::from(outside), (self.total - self.sizes[community]) as i64)
    }

    /// F_in − F_out for one community.
    pub fn contrast(&self, term: usize, community: usize) -> Fraction {
        self.f_in(term, community) - self.f_out(term, community)
    }

    /// I(w) and the community attaining it (smallest label on ties).
    pub fn importance(&self, term: usize) -> (Fraction, usize) {
        let mut best = (self.contrast(term, 0), 0);
        for c in 1..self.community_count() {
            let v = self.contrast(term, c);
            if v > best.0 {
                best = (v, c);
            }
        }
        best
    }
}

/// One entry of the importance ranking.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedTerm {
    pub term: String,
    #[serde(skip)]
    pub importance: Fraction,
    pub community: usize,
    #[serde(skip)]
    pub f_in: Fraction,
    #[serde(skip)]
    pub f_out: Fraction,
}

impl RankedTerm {
    pub fn importance_f64(&self) -> f64 {
        to_f64(self.importance)
    }
}

/// Terms sorted by I(w) descending, then lexicographically.
pub fn importance_index(table: &KeywordTable) -> Vec<RankedTerm> {
    let mut ranked: Vec<RankedTerm> = (0..table.terms.len())
        .map(|t| {
            let (importance, community) = table.importance(t);
            RankedTerm {
                term: table.terms[t].clone(),
                importance,
                community,
                f_in: table.f_in(t, community),
                f_out: table.f_out(t, community),
            }
        })
        .collect();
    ranked.sort_by(|a, b| b.importance.cmp(&a.importance).then_with(|| a.term.cmp(&b.term)));
    ranked
}

/// Writes `term,I,community,F_in,F_out` rows.
pub fn write_keyword_csv<W: Write>(ranked: &[RankedTerm], out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["term", "I", "community", "F_in", "F_out"])?;
    for r in ranked {
        w.write_record([
            r.term.clone(),
            to_f64(r.importance).to_string(),
            r.community.to_string(),
            to_f64(r.f_in).to_string(),
            to_f64(r.f_out).to_string(),
        ])?;
    }
    w.flush()
}

fn components(term: &str) -> Option<impl Iterator<Item = &str>> {
    term.contains(' ').then(|| term.split(' '))
}

/// Walks the ranking and keeps up to `k` terms, skipping unigrams that are
/// words of a higher-order term. The suppressing terms are the multi-word
/// terms among the first [`BIGRAM_REFERENCE_WINDOW`] ranks plus any
/// multi-word term already selected.
pub fn select_keywords<S: AsRef<str>>(ranking: &[S], k: usize) -> Vec<String> {
    let mut suppressed: HashSet<&str> =
        ranking.iter().take(BIGRAM_REFERENCE_WINDOW).filter_map(|t| components(t.as_ref())).flatten().collect();
    let mut out: Vec<String> = Vec::with_capacity(k);
    for term in ranking.iter().map(AsRef::as_ref) {
        if out.len() >= k {
            break;
        }
        match components(term) {
            Some(parts) => {
                let parts: Vec<&str> = parts.collect();
                out.retain(|s| !parts.contains(&s.as_str()));
                suppressed.extend(parts);
            }
            None if suppressed.contains(term) => continue,
            None => {}
        }
        if !out.iter().any(|s| s == term) {
            out.push(term.to_string());
        }
    }
    if out.len() < k {
        log::warn!("only {} eligible keywords for a requested {k}", out.len());
    }
    out
}

/// Top `top_m` terms of each community by F_in − F_out, restricted to terms
/// present in the community and filtered like [`select_keywords`].
pub fn label_communities(table: &KeywordTable, top_m: usize) -> Vec<Vec<String>> {
    (0..table.community_count())
        .map(|c| {
            let mut scored: Vec<(Fraction, &str)> = (0..table.terms.len())
                .filter(|&t| table.count(t, c) > 0)
                .map(|t| (table.contrast(t, c), table.terms[t].as_str()))
                .collect();
            scored.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1)));
            let ranking: Vec<&str> = scored.into_iter().map(|(_, t)| t).collect();
            if ranking.is_empty() {
                log::warn!("community {c} has no terms to label it with");
                return Vec::new();
            }
            select_keywords(&ranking, top_m)
        })
        .collect()
}

/// Drops keywords contained in more than `coverage_threshold · N` papers.
pub fn filter_generic_keywords(keywords: &[String], termsets: &TermSets, coverage_threshold: f64) -> Vec<String> {
    let limit = coverage_threshold * termsets.len() as f64;
    keywords
        .iter()
        .filter(|k| {
            let df = termsets.document_frequency(k);
            let keep = (df as f64) <= limit;
            if !keep {
                log::info!("dropping generic keyword {k:?} ({df} of {} papers)", termsets.len());
            }
            keep
        })
        .cloned()
        .collect()
}
