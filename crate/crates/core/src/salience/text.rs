//! Tokenization, stopword removal, lemmatization, and unigram/bigram terms.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::io;
use std::path::Path;

use rayon::prelude::*;

use crate::corpus::Corpus;

const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords.txt");
const DEFAULT_LEMMAS: &str = include_str!("../../data/lemmas.tsv");

/// Characters that end a clause; no bigram spans them.
const CLAUSE_BREAKS: &[char] = &['.', ',', ';', ':', '!', '?', '(', ')', '[', ']', '{', '}', '"'];

/// A surviving token. `joined` is true when the previous surviving token was
/// directly adjacent in the source text, so the two may form a bigram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub joined: bool,
}

pub fn words(tokens: &[Token]) -> Vec<&str> {
    tokens.iter().map(|t| t.text.as_str()).collect()
}

#[derive(Debug, Clone, Default)]
pub struct Preprocessor {
    stopwords: HashSet<String>,
    lemmas: HashMap<String, String>,
}

impl Preprocessor {
    pub fn new(stopwords: HashSet<String>, lemmas: HashMap<String, String>) -> Self {
        Preprocessor { stopwords, lemmas }
    }

    /// The stopword list and lemma table bundled with the crate.
    pub fn english() -> Self {
        Preprocessor {
            stopwords: parse_stopwords(DEFAULT_STOPWORDS),
            lemmas: parse_lemmas(DEFAULT_LEMMAS).expect("bundled lemma table is well formed"),
        }
    }

    /// Loads either file from disk, falling back to the bundled one.
    pub fn from_files(stopwords: Option<&Path>, lemmas: Option<&Path>) -> io::Result<Self> {
        let stopwords = match stopwords {
            Some(p) => parse_stopwords(&fs::read_to_string(p)?),
            None => parse_stopwords(DEFAULT_STOPWORDS),
        };
        let lemmas = match lemmas {
            Some(p) => parse_lemmas(&fs::read_to_string(p)?)?,
            None => parse_lemmas(DEFAULT_LEMMAS)?,
        };
        Ok(Preprocessor { stopwords, lemmas })
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.stopwords.contains(word)
    }

    /// Lowercases, splits on non-letters, drops stopwords and single letters,
    /// and lemmatizes what is left.
    pub fn preprocess(&self, text: &str) -> Vec<Token> {
        let mut out = Vec::new();
        let mut joined = false;
        let mut word = String::new();
        let flush = |word: &mut String, joined: &mut bool, out: &mut Vec<Token>| {
            if word.is_empty() {
                return;
            }
            let w = std::mem::take(word);
            if w.chars().count() < 2 || self.stopwords.contains(&w) {
                *joined = false;
                return;
            }
            let lemma = self.lemmatize(&w);
            if self.stopwords.contains(&lemma) {
                *joined = false;
                return;
            }
            out.push(Token { text: lemma, joined: *joined });
            *joined = true;
        };

        for ch in text.chars() {
            if ch.is_alphabetic() {
                word.extend(ch.to_lowercase());
            } else if ch == '\'' || ch == '\u{2019}' {
                // possessives and contractions stay one word
            } else {
                flush(&mut word, &mut joined, &mut out);
                if CLAUSE_BREAKS.contains(&ch) || ch.is_numeric() {
                    joined = false;
                }
            }
        }
        flush(&mut word, &mut joined, &mut out);
        out
    }

    /// Lemma-table entry if present, otherwise a plural-stripping fallback.
    pub fn lemmatize(&self, word: &str) -> String {
        if let Some(l) = self.lemmas.get(word) {
            return l.clone();
        }
        fallback_lemma(word)
    }
}

fn fallback_lemma(word: &str) -> String {
    let n = word.len();
    if n <= 3 || !word.is_ascii() {
        return word.to_string();
    }
    if let Some(stem) = word.strip_suffix("ies") {
        if stem.len() >= 2 {
            return format!("{stem}y");
        }
    }
    if let Some(stem) = word.strip_suffix("es") {
        if ["s", "x", "z", "ch", "sh"].iter().any(|s| stem.ends_with(s)) {
            return stem.to_string();
        }
    }
    if word.ends_with('s') && !["ss", "us", "is"].iter().any(|s| word.ends_with(s)) {
        return word[..n - 1].to_string();
    }
    word.to_string()
}

/// One word per line; blank lines and `#` comments ignored.
pub fn parse_stopwords(text: &str) -> HashSet<String> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(str::to_lowercase).collect()
}

/// `surface<TAB>lemma` per line.
pub fn parse_lemmas(text: &str) -> io::Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (surface, lemma) = line.split_once('\t').ok_or_else(|| {
            io::Error::new(
                io::ErrorKind::InvalidData,
                format!("lemma table line {}: expected surface<TAB>lemma", i + 1),
            )
        })?;
        map.insert(surface.trim().to_lowercase(), lemma.trim().to_lowercase());
    }
    Ok(map)
}

/// Unigrams plus bigrams of adjacent surviving tokens.
pub fn extract_terms(tokens: &[Token]) -> BTreeSet<String> {
    let mut terms = BTreeSet::new();
    for (i, t) in tokens.iter().enumerate() {
        terms.insert(t.text.clone());
        if i > 0 && t.joined {
            terms.insert(format!("{} {}", tokens[i - 1].text, t.text));
        }
    }
    terms
}

/// Term set A_i of every paper, in corpus order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TermSets {
    sets: Vec<BTreeSet<String>>,
    runs: Vec<Vec<Vec<String>>>,
}

impl TermSets {
    /// Preprocesses title and abstract of every paper (separately, so no
    /// bigram spans the two) and collects their terms.
    pub fn build(corpus: &Corpus, pre: &Preprocessor) -> Self {
        let docs: Vec<(BTreeSet<String>, Vec<Vec<String>>)> = corpus
            .papers()
            .par_iter()
            .map(|p| {
                let mut terms = BTreeSet::new();
                let mut runs = Vec::new();
                for text in [&p.title, &p.abstract_text] {
                    let tokens = pre.preprocess(text);
                    terms.extend(extract_terms(&tokens));
                    runs.extend(split_runs(tokens));
                }
                (terms, runs)
            })
            .collect();
        let (sets, runs) = docs.into_iter().unzip();
        TermSets { sets, runs }
    }

    /// Term sets given directly; phrase lookups then only see these terms.
    pub fn from_sets(sets: Vec<BTreeSet<String>>) -> Self {
        let runs = vec![Vec::new(); sets.len()];
        TermSets { sets, runs }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn terms(&self, paper: usize) -> &BTreeSet<String> {
        &self.sets[paper]
    }

    pub fn iter(&self) -> impl Iterator<Item = &BTreeSet<String>> {
        self.sets.iter()
    }

    /// Whether `paper` contains the (already normalized) keyword. Phrases of
    /// three or more words are matched as contiguous runs of tokens.
    pub fn contains(&self, paper: usize, keyword: &str) -> bool {
        if self.sets[paper].contains(keyword) {
            return true;
        }
        let parts: Vec<&str> = keyword.split(' ').collect();
        parts.len() > 2
            && self.runs[paper]
                .iter()
                .any(|run| run.windows(parts.len()).any(|w| w.iter().zip(&parts).all(|(a, b)| a == b)))
    }

    /// Papers containing each keyword, ascending.
    pub fn postings(&self, keywords: &[String]) -> Vec<Vec<usize>> {
        keywords.iter().map(|k| (0..self.len()).filter(|&i| self.contains(i, k)).collect()).collect()
    }

    /// Number of papers containing `keyword`.
    pub fn document_frequency(&self, keyword: &str) -> usize {
        (0..self.len()).filter(|&i| self.contains(i, keyword)).count()
    }
}

fn split_runs(tokens: Vec<Token>) -> Vec<Vec<String>> {
    let mut runs: Vec<Vec<String>> = Vec::new();
    for t in tokens {
        match runs.last_mut() {
            Some(run) if t.joined => run.push(t.text),
            _ => runs.push(vec![t.text]),
        }
    }
    runs
}

/// Normalizes a user-supplied keyword phrase the same way abstracts are
/// normalized. Returns `None` if nothing survives.
pub fn normalize_phrase(pre: &Preprocessor, phrase: &str) -> Option<String> {
    let tokens = pre.preprocess(phrase);
    if tokens.is_empty() {
        None
    } else {
        Some(words(&tokens).join(" "))
    }
}
