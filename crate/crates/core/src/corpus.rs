//! Bibliographic records and the line-delimited record format.
//!
//! Each input line is one JSON object:
//!
//! ```text
//! {"id":"P1","title":"...","abstract":"...","year":2005,"citation_count":3,"references":["P2"]}
//! ```
//!
//! `year` may be `null` or absent. `abstract`, `title`, `citation_count` and
//! `references` default to empty / zero when absent. Blank lines are skipped.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Inclusive range of publication years accepted by the parser.
pub const YEAR_RANGE: (i32, i32) = (1800, 2100);

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: record has no id")]
    MissingId { line: usize },
    #[error("line {line}: duplicate id {id:?}")]
    DuplicateId { id: String, line: usize },
    #[error("line {line}: year {year} outside [{}, {}]", YEAR_RANGE.0, YEAR_RANGE.1)]
    YearOutOfRange { year: i64, line: usize },
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

/// One bibliographic record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paper {
    pub id: String,
    #[serde(default)]
    pub title: String,
    #[serde(default, rename = "abstract")]
    pub abstract_text: String,
    #[serde(default)]
    pub year: Option<i32>,
    #[serde(default)]
    pub citation_count: u64,
    #[serde(default)]
    pub references: Vec<String>,
}

#[derive(Deserialize)]
struct RawRecord {
    id: Option<String>,
    #[serde(default)]
    title: Option<String>,
    #[serde(default, rename = "abstract")]
    abstract_text: Option<String>,
    #[serde(default)]
    year: Option<i64>,
    #[serde(default)]
    citation_count: Option<u64>,
    #[serde(default)]
    references: Option<Vec<String>>,
}

/// Counters for input irregularities that parsing repairs instead of rejecting.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ParseReport {
    pub dropped_self_references: usize,
    pub dropped_duplicate_references: usize,
    pub empty_abstracts: usize,
}

/// Ordered, immutable collection of papers with unique ids.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    papers: Vec<Paper>,
    index: HashMap<String, usize>,
    report: ParseReport,
}

impl Corpus {
    /// Builds a corpus from already-validated papers, normalizing references
    /// the same way the parser does.
    pub fn from_papers(papers: Vec<Paper>) -> Result<Self, CorpusError> {
        let mut corpus = Corpus::default();
        for (i, paper) in papers.into_iter().enumerate() {
            corpus.push(paper, i + 1)?;
        }
        Ok(corpus)
    }

    fn push(&mut self, mut paper: Paper, line: usize) -> Result<(), CorpusError> {
        if paper.id.is_empty() {
            return Err(CorpusError::MissingId { line });
        }
        if let Some(year) = paper.year {
            if year < YEAR_RANGE.0 || year > YEAR_RANGE.1 {
                return Err(CorpusError::YearOutOfRange { year: year.into(), line });
            }
        }
        if self.index.contains_key(&paper.id) {
            return Err(CorpusError::DuplicateId { id: paper.id, line });
        }

        let mut seen = HashSet::with_capacity(paper.references.len());
        let before = paper.references.len();
        let mut self_refs = 0;
        let own = paper.id.clone();
        paper.references.retain(|r| {
            if *r == own {
                self_refs += 1;
                false
            } else {
                seen.insert(r.clone())
            }
        });
        let duplicates = before - paper.references.len() - self_refs;
        if self_refs > 0 || duplicates > 0 {
            log::warn!(
                "line {line}: paper {:?}: dropped {self_refs} self-reference(s) and {duplicates} duplicate reference(s)",
                paper.id
            );
        }
        self.report.dropped_self_references += self_refs;
        self.report.dropped_duplicate_references += duplicates;
        if paper.abstract_text.trim().is_empty() {
            self.report.empty_abstracts += 1;
        }

        self.index.insert(paper.id.clone(), self.papers.len());
        self.papers.push(paper);
        Ok(())
    }

    pub fn papers(&self) -> &[Paper] {
        &self.papers
    }

    /// Total number of papers, N.
    pub fn len(&self) -> usize {
        self.papers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.papers.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Paper> {
        self.index.get(id).map(|&i| &self.papers[i])
    }

    /// Position of a paper in input order.
    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn report(&self) -> &ParseReport {
        &self.report
    }

    /// Writes the corpus in the same line-delimited format `parse_records` reads.
    pub fn write_records<W: Write>(&self, mut out: W) -> io::Result<()> {
        for paper in &self.papers {
            serde_json::to_writer(&mut out, paper)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_records_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_records(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }
}

/// Parses line-delimited records, preserving input order.
pub fn parse_records<R: BufRead>(reader: R) -> Result<Corpus, CorpusError> {
    let mut corpus = Corpus::default();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord =
            serde_json::from_str(&line).map_err(|e| CorpusError::Malformed { line: lineno, message: e.to_string() })?;
        let id = raw.id.ok_or(CorpusError::MissingId { line: lineno })?;
        let year = match raw.year {
            None => None,
            Some(y) if y >= YEAR_RANGE.0.into() && y <= YEAR_RANGE.1.into() => Some(y as i32),
            Some(y) => return Err(CorpusError::YearOutOfRange { year: y, line: lineno }),
        };
        let paper = Paper {
            id,
            title: raw.title.unwrap_or_default(),
            abstract_text: raw.abstract_text.unwrap_or_default(),
            year,
            citation_count: raw.citation_count.unwrap_or(0),
            references: raw.references.unwrap_or_default(),
        };
        corpus.push(paper, lineno)?;
    }
    Ok(corpus)
}

pub fn parse_str(text: &str) -> Result<Corpus, CorpusError> {
    parse_records(text.as_bytes())
}

/// Summary statistics of a corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub papers: usize,
    pub papers_with_year: usize,
    pub year_range: Option<(i32, i32)>,
    pub papers_per_year: BTreeMap<i32, usize>,
    pub empty_abstracts: usize,
}

pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    let mut papers_per_year = BTreeMap::new();
    for year in corpus.papers.iter().filter_map(|p| p.year) {
        *papers_per_year.entry(year).or_insert(0) += 1;
    }
    let year_range = match (papers_per_year.keys().next(), papers_per_year.keys().next_back()) {
        (Some(&lo), Some(&hi)) => Some((lo, hi)),
        _ => None,
    };
    CorpusStats {
        papers: corpus.len(),
        papers_with_year: papers_per_year.values().sum(),
        year_range,
        papers_per_year,
        empty_abstracts: corpus.papers.iter().filter(|p| p.abstract_text.trim().is_empty()).count(),
    }
}
