use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::citenet::NetworkMode;

/// Environment variable consulted for the output directory when neither the
/// config file nor the command line sets one.
pub const OUTPUT_DIR_ENV: &str = "SCIMAP_OUTPUT_DIR";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}:{line}: expected `key = value`")]
    Syntax { path: String, line: usize },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("invalid value {value:?} for {key}: {reason}")]
    InvalidValue { key: String, value: String, reason: String },
    #[error("{key} out of range: {reason}")]
    OutOfRange { key: &'static str, reason: &'static str },
    #[error("no corpus given")]
    MissingCorpus,
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// All parameters of a pipeline run. Every key of the flat config file
/// matches a command-line flag (`top_k` ↔ `--top-k`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub corpus: PathBuf,
    pub network: NetworkMode,
    pub seed: u64,
    pub top_k: usize,
    pub label_top_m: usize,
    pub accessibility_h: usize,
    pub layout_dims: usize,
    pub layout_iterations: usize,
    pub cut_threshold: Option<f64>,
    pub coverage_threshold: f64,
    pub timeline_min_papers: usize,
    pub stopwords: Option<PathBuf>,
    pub lemmas: Option<PathBuf>,
    pub keywords_file: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub export_edges: Option<PathBuf>,
    pub export_partition: Option<PathBuf>,
    pub dendrogram: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            corpus: PathBuf::new(),
            network: NetworkMode::Citation,
            seed: 0,
            top_k: 50,
            label_top_m: 3,
            accessibility_h: crate::accessibility::DEFAULT_LEVEL,
            layout_dims: 3,
            layout_iterations: 200,
            cut_threshold: None,
            coverage_threshold: 0.5,
            timeline_min_papers: crate::timeline::DEFAULT_MIN_PAPERS,
            stopwords: None,
            lemmas: None,
            keywords_file: None,
            output_dir: std::env::var_os(OUTPUT_DIR_ENV).map_or_else(|| PathBuf::from("scimap-out"), PathBuf::from),
            export_edges: None,
            export_partition: None,
            dendrogram: None,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: e.to_string(),
    })
}

impl PipelineConfig {
    /// Reads a `key = value` file on top of the defaults.
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        let mut config = PipelineConfig::default();
        config.apply_text(&text, &path.display().to_string())?;
        Ok(config)
    }

    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), ConfigError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or(ConfigError::Syntax { path: origin.to_string(), line: i + 1 })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Sets one parameter; keys may use `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.trim_start_matches("--").replace('-', "_");
        let path = || PathBuf::from(value);
        match key.as_str() {
            "corpus" => self.corpus = path(),
            "network" => self.network = parse(&key, value)?,
            "seed" => self.seed = parse(&key, value)?,
            "top_k" => self.top_k = parse(&key, value)?,
            "label_top_m" => self.label_top_m = parse(&key, value)?,
            "accessibility_h" => self.accessibility_h = parse(&key, value)?,
            "layout_dims" => self.layout_dims = parse(&key, value)?,
            "layout_iterations" => self.layout_iterations = parse(&key, value)?,
            "cut_threshold" => self.cut_threshold = Some(parse(&key, value)?),
            "coverage_threshold" => self.coverage_threshold = parse(&key, value)?,
            "timeline_min_papers" => self.timeline_min_papers = parse(&key, value)?,
            "stopwords" => self.stopwords = Some(path()),
            "lemmas" => self.lemmas = Some(path()),
            "keywords_file" => self.keywords_file = Some(path()),
            "output_dir" | "out" => self.output_dir = path(),
            "export_edges" => self.export_edges = Some(path()),
            "export_partition" => self.export_partition = Some(path()),
            "dendrogram" => self.dendrogram = Some(path()),
            _ => return Err(ConfigError::UnknownKey(key)),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.corpus.as_os_str().is_empty() {
            return Err(ConfigError::MissingCorpus);
        }
        let checks: [(bool, &'static str, &'static str); 7] = [
            (self.top_k >= 1, "top_k", "must be at least 1"),
            (self.label_top_m >= 1, "label_top_m", "must be at least 1"),
            (self.accessibility_h >= 1, "accessibility_h", "must be at least 1"),
            (matches!(self.layout_dims, 2 | 3), "layout_dims", "must be 2 or 3"),
            (self.layout_iterations >= 1, "layout_iterations", "must be at least 1"),
            (
                self.coverage_threshold > 0.0 && self.coverage_threshold <= 1.0,
                "coverage_threshold",
                "must lie in (0, 1]",
            ),
            (self.timeline_min_papers >= 1, "timeline_min_papers", "must be at least 1"),
        ];
        for (ok, key, reason) in checks {
            if !ok {
                return Err(ConfigError::OutOfRange { key, reason });
            }
        }
        if let Some(t) = self.cut_threshold {
            if !t.is_finite() || t < 0.0 {
                return Err(ConfigError::OutOfRange { key: "cut_threshold", reason: "must be a finite value >= 0" });
            }
        }
        Ok(())
    }
}
