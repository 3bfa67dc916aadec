//! Planted-topic corpus generator for tests and demos.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Corpus, Paper};
use crate::salience::Preprocessor;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("at least one topic is required")]
    NoTopics,
    #[error("{name} = {value} is not a probability")]
    BadProbability { name: &'static str, value: f64 },
    #[error("word {0:?} appears in more than one vocabulary")]
    OverlappingVocabulary(String),
    #[error("topic {0} has an empty vocabulary")]
    EmptyVocabulary(usize),
    #[error("year range {0}..={1} is empty")]
    BadYears(i32, i32),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyntheticCorpusSpec {
    pub papers_per_topic: usize,
    /// Citation probability for a pair of papers in the same topic.
    pub p_intra: f64,
    /// Citation probability for a pair of papers in different topics.
    pub p_inter: f64,
    /// One vocabulary per planted topic; the first word of each is its
    /// signature and appears in every title of that topic.
    pub topic_vocabularies: Vec<Vec<String>>,
    pub shared_vocabulary: Vec<String>,
    pub words_per_abstract: usize,
    /// Probability that an abstract word is drawn from the topic vocabulary.
    pub topic_word_fraction: f64,
    pub years: (i32, i32),
    pub seed: u64,
}

const CONSONANTS: &[u8] = b"bdfgklmnprtvz";
const VOWELS: &[u8] = b"aeiou";

/// Distinct lowercase pseudo-words of three syllables that survive
/// preprocessing unchanged.
fn pseudo_words(count: usize, skip: usize) -> Vec<String> {
    let pre = Preprocessor::english();
    let syllables: Vec<[u8; 2]> = CONSONANTS.iter().flat_map(|&c| VOWELS.iter().map(move |&v| [c, v])).collect();
    let s = syllables.len();
    (0..)
        .map(|i: usize| {
            // stride through the index space so neighbouring words differ early
            let i = (i * 7919) % (s * s * s);
            let mut w = String::with_capacity(6);
            for d in [i / (s * s), (i / s) % s, i % s] {
                w.push(syllables[d][0] as char);
                w.push(syllables[d][1] as char);
            }
            w
        })
        .filter(|w| !pre.is_stopword(w) && pre.lemmatize(w) == *w)
        .skip(skip)
        .take(count)
        .collect()
}

impl SyntheticCorpusSpec {
    /// Generated vocabularies: `topic_words` per topic and `shared_words`
    /// common to all.
    pub fn generated(topics: usize, papers_per_topic: usize, seed: u64) -> Self {
        let topic_words = 40;
        let shared_words = 60;
        let all = pseudo_words(topics * topic_words + shared_words, 0);
        SyntheticCorpusSpec {
            papers_per_topic,
            p_intra: (8.0 / papers_per_topic.max(2) as f64).min(1.0),
            p_inter: (0.8 / (papers_per_topic * topics.max(1)).max(1) as f64).min(1.0),
            topic_vocabularies: (0..topics).map(|t| all[t * topic_words..(t + 1) * topic_words].to_vec()).collect(),
            shared_vocabulary: all[topics * topic_words..].to_vec(),
            words_per_abstract: 40,
            topic_word_fraction: 0.6,
            years: (2000, 2015),
            seed,
        }
    }

    pub fn topics(&self) -> usize {
        self.topic_vocabularies.len()
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if self.topic_vocabularies.is_empty() {
            return Err(SynthError::NoTopics);
        }
        for (name, value) in
            [("p_intra", self.p_intra), ("p_inter", self.p_inter), ("topic_word_fraction", self.topic_word_fraction)]
        {
            if !(0.0..=1.0).contains(&value) {
                return Err(SynthError::BadProbability { name, value });
            }
        }
        if self.years.0 > self.years.1 {
            return Err(SynthError::BadYears(self.years.0, self.years.1));
        }
        let mut seen = HashSet::new();
        for (t, vocab) in self.topic_vocabularies.iter().enumerate() {
            if vocab.is_empty() {
                return Err(SynthError::EmptyVocabulary(t));
            }
        }
        for w in self.topic_vocabularies.iter().flatten().chain(&self.shared_vocabulary) {
            if !seen.insert(w) {
                return Err(SynthError::OverlappingVocabulary(w.clone()));
            }
        }
        Ok(())
    }
}

/// A generated corpus with the topic each paper was planted in.
#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub corpus: Corpus,
    pub planted: Vec<usize>,
}

/// Zipf-like draw: rank `r` has weight `1/(r+1)`.
fn zipf<'a>(rng: &mut ChaCha8Rng, words: &'a [String], cumulative: &[f64]) -> &'a str {
    let x = rng.random::<f64>() * cumulative[cumulative.len() - 1];
    let i = cumulative.partition_point(|&c| c <= x).min(words.len() - 1);
    &words[i]
}

fn cumulative_weights(n: usize) -> Vec<f64> {
    let mut acc = 0.0;
    (0..n)
        .map(|r| {
            acc += 1.0 / (r + 1) as f64;
            acc
        })
        .collect()
}

pub fn generate_synthetic_corpus(spec: &SyntheticCorpusSpec) -> Result<SyntheticCorpus, SynthError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let topics = spec.topics();
    let n = topics * spec.papers_per_topic;
    let planted: Vec<usize> = (0..n).map(|i| i / spec.papers_per_topic.max(1)).collect();
    let topic_cum: Vec<Vec<f64>> = spec.topic_vocabularies.iter().map(|v| cumulative_weights(v.len())).collect();
    let shared_cum = cumulative_weights(spec.shared_vocabulary.len());

    let ids: Vec<String> = (0..n).map(|i| format!("S{i:05}")).collect();
    let mut papers = Vec::with_capacity(n);
    for i in 0..n {
        let t = planted[i];
        let vocab = &spec.topic_vocabularies[t];
        let mut title = vec![vocab[0].as_str()];
        while title.len() < 4 {
            let w = zipf(&mut rng, vocab, &topic_cum[t]);
            if title.last() != Some(&w) || vocab.len() < 2 {
                title.push(w);
            }
        }
        let mut words: Vec<&str> = Vec::with_capacity(spec.words_per_abstract);
        while words.len() < spec.words_per_abstract {
            let w = if spec.shared_vocabulary.is_empty() || rng.random::<f64>() < spec.topic_word_fraction {
                zipf(&mut rng, vocab, &topic_cum[t])
            } else {
                zipf(&mut rng, &spec.shared_vocabulary, &shared_cum)
            };
            // immediate repeats would make "w w" bigrams
            if words.last() != Some(&w) || vocab.len() + spec.shared_vocabulary.len() < 2 {
                words.push(w);
            }
        }
        let references = (0..i)
            .filter(|&j| {
                let p = if planted[j] == t { spec.p_intra } else { spec.p_inter };
                rng.random::<f64>() < p
            })
            .map(|j| ids[j].clone())
            .collect();
        let span = (spec.years.1 - spec.years.0 + 1) as f64;
        let year = spec.years.0 + (span * i as f64 / n as f64) as i32;
        papers.push(Paper {
            id: ids[i].clone(),
            title: title.join(" "),
            abstract_text: format!("{}.", words.join(" ")),
            year: Some(year.min(spec.years.1)),
            citation_count: 0,
            references,
        });
    }
    let corpus = Corpus::from_papers(papers).expect("generated ids are unique");
    Ok(SyntheticCorpus { corpus, planted })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_topics_rejected() {
        let spec = SyntheticCorpusSpec::generated(0, 10, 1);
        assert_eq!(generate_synthetic_corpus(&spec).unwrap_err(), SynthError::NoTopics);
    }

    #[test]
    fn invalid_specs() {
        let mut spec = SyntheticCorpusSpec::generated(2, 5, 1);
        spec.p_intra = 1.5;
        assert!(matches!(spec.validate(), Err(SynthError::BadProbability { name: "p_intra", .. })));
        let mut spec = SyntheticCorpusSpec::generated(2, 5, 1);
        spec.shared_vocabulary.push(spec.topic_vocabularies[1][3].clone());
        assert!(matches!(spec.validate(), Err(SynthError::OverlappingVocabulary(_))));
    }

    #[test]
    fn deterministic() {
        let spec = SyntheticCorpusSpec::generated(3, 20, 42);
        let a = generate_synthetic_corpus(&spec).unwrap();
        let b = generate_synthetic_corpus(&spec).unwrap();
        assert_eq!(a.corpus.to_records_string(), b.corpus.to_records_string());
    }

    #[test]
    fn pseudo_words_are_distinct_and_stable() {
        let w = pseudo_words(500, 0);
        assert_eq!(w.iter().collect::<HashSet<_>>().len(), 500);
        let pre = Preprocessor::english();
        for word in &w {
            let toks = pre.preprocess(word);
            assert_eq!(toks.len(), 1);
            assert_eq!(&toks[0].text, word);
        }
    }
}
