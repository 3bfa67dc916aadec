//! End-to-end runs: every stage in order, exports written to a staging
//! directory and moved into place only when the whole run succeeds.

pub mod config;
pub mod synth;

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::accessibility::{cumulative_curve, rank_peripherality, AccessibilityProfile, CommunityArea};
use crate::citenet::{average_degree, build_citation_network, build_cocitation_network, CitationNetwork, NetworkMode};
use crate::communities::{coarse_grain, detect_communities, CoarseGraph, CommunityPartition};
use crate::corpus::{corpus_stats, parse_records, Corpus, CorpusStats};
use crate::layout::{layout_network, Layout, LayoutOptions};
use crate::salience::{
    community_frequencies, filter_generic_keywords, importance_index, label_communities, normalize_phrase,
    select_keywords, write_keyword_csv, Preprocessor, RankedTerm, TermSets,
};
use crate::taxonomy::{
    assign_papers_to_groups, build_dendrogram, cut_dendrogram, keyword_distance_matrix, Dendrogram, GroupAssignment,
    KeywordDistanceMatrix,
};
use crate::timeline::{keyword_timeline, truncate_sparse_years, write_timeline_csv, KeywordTimeline};

pub use config::{ConfigError, PipelineConfig, OUTPUT_DIR_ENV};
pub use synth::{generate_synthetic_corpus, SynthError, SyntheticCorpus, SyntheticCorpusSpec};

pub const MANIFEST_FILE: &str = "manifest.json";
const CURVE_SAMPLES: usize = 101;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("input error: {0}")]
    Input(String),
    #[error("stage {stage} failed: {message}")]
    Stage { stage: &'static str, message: String },
}

impl PipelineError {
    /// Process exit code: 1 for bad input, 2 for a failing stage.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Input(_) => 1,
            PipelineError::Stage { .. } => 2,
        }
    }

    pub fn stage(&self) -> Option<&'static str> {
        match self {
            PipelineError::Stage { stage, .. } => Some(stage),
            PipelineError::Input(_) => None,
        }
    }
}

impl From<ConfigError> for PipelineError {
    fn from(e: ConfigError) -> Self {
        PipelineError::Input(e.to_string())
    }
}

fn stage<E: std::fmt::Display>(stage: &'static str) -> impl FnOnce(E) -> PipelineError {
    move |e| PipelineError::Stage { stage, message: e.to_string() }
}

/// What a run computes and exports. Each subcommand runs the stages its
/// exports depend on; [`Target::Run`] runs all of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Ingest,
    Network,
    Communities,
    Keywords,
    Taxonomy,
    Accessibility,
    Layout,
    Timeline,
    Run,
}

impl Target {
    fn network(self) -> bool {
        self != Target::Ingest
    }
    fn communities(self) -> bool {
        !matches!(self, Target::Ingest | Target::Network)
    }
    fn coarse(self) -> bool {
        matches!(self, Target::Communities | Target::Run)
    }
    fn salience(self) -> bool {
        matches!(self, Target::Keywords | Target::Taxonomy | Target::Timeline | Target::Run)
    }
    fn accessibility(self) -> bool {
        matches!(self, Target::Accessibility | Target::Run)
    }
    fn taxonomy(self) -> bool {
        matches!(self, Target::Taxonomy | Target::Run)
    }
    fn layout(self) -> bool {
        matches!(self, Target::Layout | Target::Run)
    }
    fn timeline(self) -> bool {
        matches!(self, Target::Timeline | Target::Run)
    }
}

/// Record of a successful run, also written as `manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub target: Target,
    pub seed: u64,
    pub corpus_sha256: String,
    pub parameters: BTreeMap<String, Value>,
    pub summary: BTreeMap<String, Value>,
    pub communities: usize,
    pub selected_keywords: Vec<String>,
    pub decisions: Vec<String>,
    pub warnings: Vec<String>,
    pub files: Vec<String>,
}

/// Exports collected in a hidden directory inside the output directory.
struct Staging {
    dir: tempfile::TempDir,
    files: Vec<String>,
}

impl Staging {
    fn new(out: &Path) -> io::Result<Self> {
        fs::create_dir_all(out)?;
        let dir = tempfile::Builder::new().prefix(".scimap-staging-").tempdir_in(out)?;
        Ok(Staging { dir, files: Vec::new() })
    }

    fn write<F>(&mut self, name: &str, f: F) -> Result<(), PipelineError>
    where
        F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
    {
        let run = || -> io::Result<()> {
            let mut w = BufWriter::new(File::create(self.dir.path().join(name))?);
            f(&mut w)?;
            w.flush()
        };
        run().map_err(|e| PipelineError::Stage { stage: "export", message: format!("{name}: {e}") })?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    /// Moves every staged file into `out`, the manifest last.
    fn commit(self, out: &Path) -> io::Result<()> {
        let mut names = self.files.clone();
        names.sort_by_key(|n| n == MANIFEST_FILE);
        for name in &names {
            fs::rename(self.dir.path().join(name), out.join(name))?;
        }
        Ok(())
    }
}

fn write_json<T: Serialize>(w: &mut BufWriter<File>, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    w.write_all(b"\n")
}

fn file_name(p: &Option<PathBuf>) -> Value {
    match p {
        Some(p) => Value::String(p.file_name().map_or_else(|| p.display().to_string(), |f| f.to_string_lossy().into())),
        None => Value::Null,
    }
}

fn parameters(config: &PipelineConfig) -> BTreeMap<String, Value> {
    BTreeMap::from([
        ("network".into(), json!(config.network)),
        ("seed".into(), json!(config.seed)),
        ("top_k".into(), json!(config.top_k)),
        ("label_top_m".into(), json!(config.label_top_m)),
        ("accessibility_h".into(), json!(config.accessibility_h)),
        ("layout_dims".into(), json!(config.layout_dims)),
        ("layout_iterations".into(), json!(config.layout_iterations)),
        ("cut_threshold".into(), json!(config.cut_threshold)),
        ("coverage_threshold".into(), json!(config.coverage_threshold)),
        ("timeline_min_papers".into(), json!(config.timeline_min_papers)),
        ("stopwords".into(), file_name(&config.stopwords)),
        ("lemmas".into(), file_name(&config.lemmas)),
        ("keywords_file".into(), file_name(&config.keywords_file)),
    ])
}

/// Everything the stages produce; fields are filled as stages run.
#[derive(Default)]
struct Results {
    corpus: Corpus,
    stats: Option<CorpusStats>,
    network: Option<CitationNetwork>,
    partition: Option<CommunityPartition>,
    coarse: Option<CoarseGraph>,
    termsets: Option<TermSets>,
    ranked: Vec<RankedTerm>,
    keywords: Vec<String>,
    labels: Vec<Vec<String>>,
    profile: Option<AccessibilityProfile>,
    areas: Option<Vec<CommunityArea>>,
    distances: Option<KeywordDistanceMatrix>,
    dendrogram: Option<Dendrogram>,
    threshold: f64,
    groups: Vec<Vec<String>>,
    assignment: Option<GroupAssignment>,
    layout: Option<Layout>,
    timelines: Vec<KeywordTimeline>,
}

struct Run<'a> {
    config: &'a PipelineConfig,
    target: Target,
    summary: BTreeMap<String, Value>,
    decisions: Vec<String>,
    warnings: Vec<String>,
}

impl Run<'_> {
    fn warn(&mut self, message: String) {
        log::warn!("{message}");
        self.warnings.push(message);
    }

    fn note<V: Serialize>(&mut self, key: &str, value: V) {
        self.summary.insert(key.to_string(), json!(value));
    }

    fn timed<T>(name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        log::info!("stage {name} finished in {:.2?}", start.elapsed());
        out
    }

    fn preprocessor(&self) -> Result<Preprocessor, PipelineError> {
        let c = self.config;
        if c.stopwords.is_none() && c.lemmas.is_none() {
            return Ok(Preprocessor::english());
        }
        Preprocessor::from_files(c.stopwords.as_deref(), c.lemmas.as_deref())
            .map_err(|e| PipelineError::Input(format!("cannot read stopword/lemma list: {e}")))
    }

    fn expert_keywords(&self, path: &Path, pre: &Preprocessor) -> Result<Vec<String>, PipelineError> {
        let text = fs::read_to_string(path)
            .map_err(|e| PipelineError::Input(format!("cannot read keywords file {}: {e}", path.display())))?;
        let mut seen = HashSet::new();
        Ok(text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .filter_map(|l| normalize_phrase(pre, l))
            .filter(|k| seen.insert(k.clone()))
            .collect())
    }

    fn compute(&mut self, corpus: Corpus) -> Result<Results, PipelineError> {
        let c = self.config;
        let t = self.target;
        let mut r = Results { corpus, ..Default::default() };

        let stats = corpus_stats(&r.corpus);
        let report = r.corpus.report().clone();
        self.note("papers", r.corpus.len());
        self.note("empty_abstracts", report.empty_abstracts);
        self.note("dropped_self_references", report.dropped_self_references);
        self.note("dropped_duplicate_references", report.dropped_duplicate_references);
        r.stats = Some(stats);
        if !t.network() {
            return Ok(r);
        }

        let net = Self::timed("citenet", || match c.network {
            NetworkMode::Citation => build_citation_network(&r.corpus),
            NetworkMode::Cocitation => build_cocitation_network(&r.corpus),
        });
        let k = average_degree(&net).map_err(stage("citenet"))?;
        self.note("edges", net.edge_count());
        self.note("average_degree", k);
        self.note("dangling_references", net.dangling_references());
        self.note("isolated_nodes", net.isolated_nodes().len());
        self.decisions.push(match c.network {
            NetworkMode::Citation => {
                "network: undirected link between two papers when either cites the other; references outside the corpus are ignored".into()
            }
            NetworkMode::Cocitation => {
                "network: link between two papers cited together by at least one corpus paper, weighted by the number of common citers".into()
            }
        });
        r.network = Some(net);
        if !t.communities() {
            return Ok(r);
        }
        let net = r.network.as_ref().expect("network stage ran");

        let partition = Self::timed("communities", || detect_communities(net, c.seed)).map_err(stage("communities"))?;
        self.note("modularity", partition.modularity());
        self.note("community_sizes", partition.sizes());
        self.decisions.push(format!(
            "communities: multilevel modularity optimisation, node order shuffled with seed {}; labels ordered by decreasing size",
            c.seed
        ));

        if t.salience() {
            let pre = self.preprocessor()?;
            let termsets = Self::timed("terms", || TermSets::build(&r.corpus, &pre));
            let table = community_frequencies(&termsets, &partition).map_err(stage("salience"))?;
            r.ranked = Self::timed("salience", || importance_index(&table));
            r.labels = label_communities(&table, c.label_top_m);
            self.decisions.push(
                "salience: I(w) is the largest in-minus-out community document frequency of w; ties go to the lowest community".into(),
            );
            r.keywords = match &c.keywords_file {
                Some(path) => {
                    let listed = self.expert_keywords(path, &pre)?;
                    let kept = filter_generic_keywords(&listed, &termsets, c.coverage_threshold);
                    let (present, absent): (Vec<String>, Vec<String>) =
                        kept.iter().cloned().partition(|k| termsets.document_frequency(k) > 0);
                    if !absent.is_empty() {
                        self.warn(format!(
                            "{} listed keyword(s) never occur in the corpus: {}",
                            absent.len(),
                            absent.join(", ")
                        ));
                    }
                    self.decisions.push(format!(
                        "keywords: {} listed, {} dropped as generic (coverage above {}), {} absent from the corpus",
                        listed.len(),
                        listed.len() - kept.len(),
                        c.coverage_threshold,
                        absent.len()
                    ));
                    present
                }
                None => {
                    let terms: Vec<&str> = r.ranked.iter().map(|t| t.term.as_str()).collect();
                    self.decisions.push(format!(
                        "keywords: top {} terms by I(w); unigrams that are part of a higher-ranked bigram are removed",
                        c.top_k
                    ));
                    select_keywords(&terms, c.top_k)
                }
            };
            if r.keywords.len() < c.top_k && c.keywords_file.is_none() {
                self.warn(format!("only {} keywords selected, {} requested", r.keywords.len(), c.top_k));
            }
            self.note("ranked_terms", r.ranked.len());
            r.termsets = Some(termsets);
        }

        if t.coarse() {
            let coarse = Self::timed("coarse", || coarse_grain(net, &partition));
            self.decisions
                .push("coarse graph: W between communities is their link count over the product of their sizes".into());
            r.coarse = Some(coarse);
        }

        if t.accessibility() {
            let profile =
                Self::timed("accessibility", || AccessibilityProfile::compute(net, &partition, c.accessibility_h))
                    .map_err(stage("accessibility"))?;
            self.note("accessibility_excluded_isolated", profile.isolated);
            self.decisions.push(format!(
                "accessibility: exp-entropy of the {}-step random walk with uniform steps to neighbours; isolated nodes excluded from curves",
                c.accessibility_h
            ));
            match rank_peripherality(&profile) {
                Ok(areas) => r.areas = Some(areas),
                Err(e) => self.warn(format!("peripherality ranking skipped: {e}")),
            }
            r.profile = Some(profile);
        }

        if t.taxonomy() {
            let termsets = r.termsets.as_ref().expect("salience stage ran");
            let postings = termsets.postings(&r.keywords);
            let distances = Self::timed("keyword-distances", || keyword_distance_matrix(net, &r.keywords, &postings));
            let (resolved, substituted) = distances.resolved();
            if substituted > 0 {
                self.warn(format!(
                    "{substituted} keyword pair(s) have no connecting paper pair; distance set to max + 1"
                ));
            }
            self.note("substituted_keyword_distances", substituted);
            let dendrogram = build_dendrogram(&r.keywords, &resolved).map_err(stage("taxonomy"))?;
            let violations = dendrogram.monotonicity_violations();
            if violations > 0 {
                self.warn(format!("dendrogram has {violations} non-monotone merge(s)"));
            }
            r.threshold = c.cut_threshold.unwrap_or_else(|| dendrogram.largest_gap_threshold());
            r.groups = cut_dendrogram(&dendrogram, r.threshold);
            let assignment = assign_papers_to_groups(&r.groups, termsets);
            self.note("dendrogram_leaves", dendrogram.leaves().len());
            self.note("keyword_groups", r.groups.len());
            self.note("unassigned_papers", assignment.unassigned);
            self.decisions.push(
                "keyword distance: mean hop count over ordered paper pairs (i, j), i != j, carrying the two keywords; unreachable pairs excluded".into(),
            );
            self.decisions.push(format!(
                "taxonomy: average-linkage dendrogram cut at height {} ({})",
                r.threshold,
                if c.cut_threshold.is_some() {
                    "configured"
                } else {
                    "midpoint of the widest gap between merge heights"
                }
            ));
            r.distances = Some(distances);
            r.dendrogram = Some(dendrogram);
            r.assignment = Some(assignment);
        }

        if t.layout() {
            let options =
                LayoutOptions { dims: c.layout_dims, iterations: c.layout_iterations, seed: c.seed, grid: None };
            let layout = Self::timed("layout", || layout_network(net, options)).map_err(stage("layout"))?;
            self.decisions.push(format!(
                "layout: force-directed, {} dimensions, {} iterations, seed {}{}",
                c.layout_dims,
                c.layout_iterations,
                c.seed,
                if layout.grid_approximation { ", grid cutoff for repulsion" } else { "" }
            ));
            r.layout = Some(layout);
        }

        if t.timeline() {
            let termsets = r.termsets.as_ref().expect("salience stage ran");
            match r.stats.as_ref().and_then(|s| s.year_range) {
                Some(range) => {
                    r.timelines = r
                        .keywords
                        .iter()
                        .map(|k| {
                            truncate_sparse_years(
                                &keyword_timeline(k, &r.corpus, termsets, range),
                                c.timeline_min_papers,
                            )
                        })
                        .collect();
                    self.decisions.push(format!(
                        "timeline: yearly share of papers containing each keyword; leading years with fewer than {} papers dropped",
                        c.timeline_min_papers
                    ));
                }
                None => self.warn("no paper has a year; timelines skipped".into()),
            }
        }

        self.note("communities", partition.community_count());
        r.partition = Some(partition);
        Ok(r)
    }

    fn export(&mut self, r: &Results, staging: &mut Staging) -> Result<(), PipelineError> {
        let t = self.target;
        if let Some(stats) = &r.stats {
            staging.write("corpus_stats.json", |w| write_json(w, stats))?;
        }
        let Some(net) = &r.network else { return Ok(()) };
        if t == Target::Network || t == Target::Run {
            staging.write("edges.tsv", |w| net.write_edge_list(w))?;
            staging.write("network.net", |w| net.write_pajek(w))?;
        }
        let Some(partition) = &r.partition else { return Ok(()) };
        if t == Target::Communities || t == Target::Run {
            staging.write("partition.csv", |w| partition.write_csv(net, w))?;
        }
        if let Some(coarse) = &r.coarse {
            staging.write("coarse_graph.csv", |w| coarse.write_csv(w))?;
        }
        if t == Target::Keywords || t == Target::Run {
            staging.write("keywords.csv", |w| write_keyword_csv(&r.ranked, w))?;
            staging.write("selected_keywords.txt", |w| r.keywords.iter().try_for_each(|k| writeln!(w, "{k}")))?;
            staging.write("community_labels.csv", |w| {
                let mut c = csv::Writer::from_writer(w);
                c.write_record(["community", "size", "label"])?;
                for (i, label) in r.labels.iter().enumerate() {
                    c.write_record([i.to_string(), partition.sizes()[i].to_string(), label.join("; ")])?;
                }
                c.flush()
            })?;
        }
        if let Some(profile) = &r.profile {
            staging.write("accessibility.csv", |w| profile.write_csv(net, partition, w))?;
            if let (Some(areas), Some((lo, hi))) = (&r.areas, profile.global_range()) {
                staging.write("community_areas.csv", |w| {
                    let mut c = csv::Writer::from_writer(w);
                    c.write_record(["rank", "community", "area", "nodes"])?;
                    for (i, a) in areas.iter().enumerate() {
                        c.write_record([
                            (i + 1).to_string(),
                            a.community.to_string(),
                            a.area.to_string(),
                            a.nodes.to_string(),
                        ])?;
                    }
                    c.flush()
                })?;
                staging.write("accessibility_curves.csv", |w| {
                    let mut c = csv::Writer::from_writer(w);
                    c.write_record(["community", "kappa", "cumulative"])?;
                    for community in 0..profile.by_community.len() {
                        let Ok(curve) = cumulative_curve(profile, community) else { continue };
                        for (x, f) in curve.sample(lo, hi, CURVE_SAMPLES) {
                            c.write_record([community.to_string(), x.to_string(), f.to_string()])?;
                        }
                    }
                    c.flush()
                })?;
            }
        }
        if let (Some(distances), Some(dendrogram), Some(assignment)) = (&r.distances, &r.dendrogram, &r.assignment) {
            staging.write("keyword_distances.csv", |w| distances.write_csv(w))?;
            staging.write("dendrogram.nwk", |w| writeln!(w, "{}", dendrogram.to_newick()))?;
            staging.write("dendrogram.json", |w| writeln!(w, "{}", dendrogram.to_json()))?;
            staging.write("keyword_groups.csv", |w| {
                let mut c = csv::Writer::from_writer(w);
                c.write_record(["group", "keyword"])?;
                for (g, kws) in r.groups.iter().enumerate() {
                    for k in kws {
                        c.write_record([g.to_string(), k.clone()])?;
                    }
                }
                c.flush()
            })?;
            staging.write("paper_groups.csv", |w| {
                let mut c = csv::Writer::from_writer(w);
                c.write_record(["id", "group"])?;
                for (i, g) in assignment.assignment.iter().enumerate() {
                    c.write_record([net.id(i).to_string(), g.map(|g| g.to_string()).unwrap_or_default()])?;
                }
                c.flush()
            })?;
        }
        if let Some(layout) = &r.layout {
            staging.write("layout.csv", |w| layout.write_csv(net, partition.labels(), w))?;
            if layout.dims == 3 {
                staging.write("layout_2d.csv", |w| layout.project_to_plane().write_csv(net, partition.labels(), w))?;
            }
            staging.write("science_map.json", |w| write_json(w, &science_map(r, net, partition, layout)))?;
        }
        if t.timeline() && !r.timelines.is_empty() {
            staging.write("timeline.csv", |w| write_timeline_csv(&r.timelines, w))?;
        }
        Ok(())
    }
}

fn science_map(r: &Results, net: &CitationNetwork, partition: &CommunityPartition, layout: &Layout) -> Value {
    let nodes: Vec<Value> = (0..net.node_count())
        .map(|i| {
            let p = layout.position(i);
            json!({
                "id": net.id(i),
                "title": r.corpus.papers()[i].title,
                "community": partition.label(i),
                "position": p[..layout.dims],
            })
        })
        .collect();
    let areas: BTreeMap<usize, f64> = r.areas.iter().flatten().map(|a| (a.community, a.area)).collect();
    let communities: Vec<Value> = (0..partition.community_count())
        .map(|c| {
            json!({
                "community": c,
                "size": partition.sizes()[c],
                "label": r.labels.get(c).cloned().unwrap_or_default(),
                "area": areas.get(&c),
            })
        })
        .collect();
    let coarse = r.coarse.clone().unwrap_or_else(|| coarse_grain(net, partition));
    json!({
        "dims": layout.dims,
        "nodes": nodes,
        "communities": communities,
        "links": coarse.edges(),
    })
}

fn load_corpus(path: &Path) -> Result<(Corpus, String), PipelineError> {
    let bytes =
        fs::read(path).map_err(|e| PipelineError::Input(format!("cannot read corpus {}: {e}", path.display())))?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let corpus =
        parse_records(bytes.as_slice()).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))?;
    Ok((corpus, digest))
}

/// Runs the stages needed for `target` and writes its exports plus a
/// manifest into `config.output_dir`. On failure nothing new is left in the
/// output directory.
pub fn run_target(config: &PipelineConfig, target: Target) -> Result<Manifest, PipelineError> {
    config.validate()?;
    let (corpus, digest) = load_corpus(&config.corpus)?;
    let mut run = Run { config, target, summary: BTreeMap::new(), decisions: Vec::new(), warnings: Vec::new() };
    let results = run.compute(corpus)?;

    let out = &config.output_dir;
    let mut staging = Staging::new(out)
        .map_err(|e| PipelineError::Input(format!("output directory {} is not writable: {e}", out.display())))?;
    run.export(&results, &mut staging)?;

    let mut files = staging.files.clone();
    files.push(MANIFEST_FILE.to_string());
    files.sort();
    let manifest = Manifest {
        tool: "scimap".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        target,
        seed: config.seed,
        corpus_sha256: digest,
        parameters: parameters(config),
        communities: results.partition.as_ref().map_or(0, |p| p.community_count()),
        selected_keywords: results.keywords.clone(),
        summary: run.summary,
        decisions: run.decisions,
        warnings: run.warnings,
        files,
    };
    staging.write(MANIFEST_FILE, |w| write_json(w, &manifest))?;

    let extra = extra_exports(config, &staging);
    staging.commit(out).map_err(stage("export"))?;
    for (from, to) in extra {
        fs::copy(out.join(from), &to)
            .map_err(|e| PipelineError::Stage { stage: "export", message: format!("{}: {e}", to.display()) })?;
    }
    Ok(manifest)
}

/// Additional copies requested with explicit export paths.
fn extra_exports(config: &PipelineConfig, staging: &Staging) -> Vec<(&'static str, PathBuf)> {
    [
        ("edges.tsv", &config.export_edges),
        ("partition.csv", &config.export_partition),
        ("dendrogram.nwk", &config.dendrogram),
    ]
    .into_iter()
    .filter_map(|(name, path)| path.clone().map(|p| (name, p)))
    .filter(|(name, _)| staging.path(name).exists())
    .collect()
}

/// The full pipeline: every stage and every export.
pub fn run_pipeline(config: &PipelineConfig) -> Result<Manifest, PipelineError> {
    run_target(config, Target::Run)
}
