//! Per-year keyword frequencies normalized by that year's paper count.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;

use crate::corpus::Corpus;
use crate::salience::TermSets;

pub const DEFAULT_MIN_PAPERS: usize = 10;

/// One keyword's yearly series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeywordTimeline {
    pub keyword: String,
    /// year → (papers containing the keyword, papers published that year)
    pub counts: BTreeMap<i32, (usize, usize)>,
}

impl KeywordTimeline {
    pub fn frequency(&self, year: i32) -> Option<f64> {
        self.counts.get(&year).map(|&(hits, total)| hits as f64 / total as f64)
    }

    pub fn frequencies(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.counts.iter().map(|(&y, &(hits, total))| (y, hits as f64 / total as f64))
    }
}

/// Fraction of each year's papers whose term set contains `keyword`, for
/// years in `year_range` (inclusive) with at least one paper.
pub fn keyword_timeline(
    keyword: &str,
    corpus: &Corpus,
    termsets: &TermSets,
    year_range: (i32, i32),
) -> KeywordTimeline {
    let mut counts: BTreeMap<i32, (usize, usize)> = BTreeMap::new();
    for (i, paper) in corpus.papers().iter().enumerate() {
        let Some(year) = paper.year else { continue };
        if year < year_range.0 || year > year_range.1 {
            continue;
        }
        let entry = counts.entry(year).or_insert((0, 0));
        entry.1 += 1;
        if termsets.contains(i, keyword) {
            entry.0 += 1;
        }
    }
    if counts.values().all(|&(hits, _)| hits == 0) {
        log::warn!("keyword {keyword:?} never occurs in the selected years");
    }
    KeywordTimeline { keyword: keyword.to_string(), counts }
}

/// Drops leading years with fewer than `min_papers` papers.
pub fn truncate_sparse_years(timeline: &KeywordTimeline, min_papers: usize) -> KeywordTimeline {
    let start = timeline.counts.iter().find(|(_, &(_, total))| total >= min_papers).map(|(&y, _)| y);
    let counts = match start {
        Some(start) => timeline.counts.range(start..).map(|(&y, &c)| (y, c)).collect(),
        None => {
            log::warn!("no year has at least {min_papers} papers; timeline for {:?} is empty", timeline.keyword);
            BTreeMap::new()
        }
    };
    KeywordTimeline { keyword: timeline.keyword.clone(), counts }
}

/// Writes long-format `keyword,year,frequency,papers_in_year` rows.
pub fn write_timeline_csv<W: Write>(timelines: &[KeywordTimeline], out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["keyword", "year", "frequency", "papers_in_year"])?;
    for t in timelines {
        for (&year, &(hits, total)) in &t.counts {
            w.write_record([
                t.keyword.clone(),
                year.to_string(),
                (hits as f64 / total as f64).to_string(),
                total.to_string(),
            ])?;
        }
    }
    w.flush()
}
