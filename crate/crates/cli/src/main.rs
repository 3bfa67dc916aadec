use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use scimap::pipeline::{
    generate_synthetic_corpus, run_target, PipelineConfig, PipelineError, SyntheticCorpusSpec, Target, OUTPUT_DIR_ENV,
};

/// Science maps from bibliographic corpora.
#[derive(Parser)]
#[command(name = "scimap", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the corpus and report statistics.
    Ingest(Options),
    /// Build the citation or co-citation network.
    Network(Options),
    /// Detect communities and coarse-grain the network.
    Communities(Options),
    /// Rank terms by community salience and select keywords.
    Keywords(Options),
    /// Keyword distances, dendrogram and keyword groups.
    Taxonomy(Options),
    /// Accessibility per paper and community peripherality.
    Accessibility(Options),
    /// Force-directed layout and science map.
    Layout(Options),
    /// Yearly keyword frequencies.
    Timeline(Options),
    /// Every stage, every export.
    Run(Options),
    /// Write a synthetic corpus with planted topics.
    Synth(SynthArgs),
}

/// Pipeline parameters; each flag mirrors a config-file key and overrides it.
#[derive(Args)]
struct Options {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Corpus in JSON Lines format.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// citation or cocitation.
    #[arg(long)]
    network: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long)]
    label_top_m: Option<usize>,
    #[arg(long)]
    accessibility_h: Option<usize>,
    #[arg(long)]
    layout_dims: Option<usize>,
    #[arg(long)]
    layout_iterations: Option<usize>,
    #[arg(long)]
    cut_threshold: Option<f64>,
    #[arg(long)]
    coverage_threshold: Option<f64>,
    #[arg(long)]
    timeline_min_papers: Option<usize>,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long)]
    lemmas: Option<PathBuf>,
    /// Expert keyword list, one phrase per line.
    #[arg(long)]
    keywords_file: Option<PathBuf>,
    /// Extra copy of the edge list.
    #[arg(long)]
    export_edges: Option<PathBuf>,
    /// Extra copy of the partition.
    #[arg(long)]
    export_partition: Option<PathBuf>,
    /// Extra copy of the Newick dendrogram.
    #[arg(long)]
    dendrogram: Option<PathBuf>,
    /// Output directory.
    #[arg(long, env = OUTPUT_DIR_ENV)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 3)]
    topics: usize,
    #[arg(long, default_value_t = 100)]
    papers_per_topic: usize,
    #[arg(long)]
    p_intra: Option<f64>,
    #[arg(long)]
    p_inter: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output corpus file.
    #[arg(long)]
    out: PathBuf,
}

impl Options {
    fn config(&self) -> Result<PipelineConfig, PipelineError> {
        let mut config = match &self.config {
            Some(path) => PipelineConfig::from_file(path)?,
            None => PipelineConfig::default(),
        };
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let overrides = [
            ("corpus", path(&self.corpus)),
            ("network", self.network.clone()),
            ("seed", self.seed.map(|v| v.to_string())),
            ("top_k", self.top_k.map(|v| v.to_string())),
            ("label_top_m", self.label_top_m.map(|v| v.to_string())),
            ("accessibility_h", self.accessibility_h.map(|v| v.to_string())),
            ("layout_dims", self.layout_dims.map(|v| v.to_string())),
            ("layout_iterations", self.layout_iterations.map(|v| v.to_string())),
            ("cut_threshold", self.cut_threshold.map(|v| v.to_string())),
            ("coverage_threshold", self.coverage_threshold.map(|v| v.to_string())),
            ("timeline_min_papers", self.timeline_min_papers.map(|v| v.to_string())),
            ("stopwords", path(&self.stopwords)),
            ("lemmas", path(&self.lemmas)),
            ("keywords_file", path(&self.keywords_file)),
            ("export_edges", path(&self.export_edges)),
            ("export_partition", path(&self.export_partition)),
            ("dendrogram", path(&self.dendrogram)),
            ("output_dir", path(&self.out)),
        ];
        for (key, value) in overrides {
            if let Some(value) = value {
                config.set(key, &value)?;
            }
        }
        Ok(config)
    }
}

fn synth(args: &SynthArgs) -> Result<(), PipelineError> {
    let mut spec = SyntheticCorpusSpec::generated(args.topics, args.papers_per_topic, args.seed);
    if let Some(p) = args.p_intra {
        spec.p_intra = p;
    }
    if let Some(p) = args.p_inter {
        spec.p_inter = p;
    }
    let synthetic = generate_synthetic_corpus(&spec).map_err(|e| PipelineError::Input(e.to_string()))?;
    let file = std::fs::File::create(&args.out)
        .map_err(|e| PipelineError::Input(format!("cannot create {}: {e}", args.out.display())))?;
    synthetic
        .corpus
        .write_records(std::io::BufWriter::new(file))
        .map_err(|e| PipelineError::Stage { stage: "export", message: e.to_string() })?;
    println!("wrote {} papers in {} topics to {}", synthetic.corpus.len(), spec.topics(), args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (options, target) = match &cli.command {
        Command::Synth(args) => return finish(synth(args)),
        Command::Ingest(o) => (o, Target::Ingest),
        Command::Network(o) => (o, Target::Network),
        Command::Communities(o) => (o, Target::Communities),
        Command::Keywords(o) => (o, Target::Keywords),
        Command::Taxonomy(o) => (o, Target::Taxonomy),
        Command::Accessibility(o) => (o, Target::Accessibility),
        Command::Layout(o) => (o, Target::Layout),
        Command::Timeline(o) => (o, Target::Timeline),
        Command::Run(o) => (o, Target::Run),
    };
    let result = options.config().and_then(|config| {
        let manifest = run_target(&config, target)?;
        println!(
            "{} file(s) written to {}; {} communities, {} keywords",
            manifest.files.len(),
            config.output_dir.display(),
            manifest.communities,
            manifest.selected_keywords.len()
        );
        Ok(())
    });
    finish(result)
}

fn finish(result: Result<(), PipelineError>) -> ExitCode {
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
