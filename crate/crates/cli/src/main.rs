//! `sumaudit`: audit, filter, inspect, summarise and score
//! summarization corpora stored as JSONL.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "sumaudit", version, about = "Quality audits and baselines for summarization corpora")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Attribute every sample to a filter bucket and report the breakdown.
    Audit(AuditArgs),
    /// Keep only samples that pass every check.
    Filter(FilterArgs),
    /// Length or compression-ratio distribution of a corpus.
    Stats(StatsArgs),
    /// Pick samples for manual review.
    Inspect(InspectArgs),
    /// Produce extractive baseline summaries.
    Baseline(BaselineArgs),
    /// Score system summaries against gold summaries with ROUGE.
    Score(ScoreArgs),
}

#[derive(Debug, Args)]
pub struct FilterOptions {
    /// JSON file with min_ref_chars, min_summary_chars, min_cr, max_cr.
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in thresholds.
    #[arg(long, value_enum, default_value_t = Preset::Default)]
    pub preset: Preset,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Preset {
    Default,
    Wikilingua,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Md,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub filter: FilterOptions,
    /// Directory for reports, verdicts and the manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// One or more report formats; the first is printed.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "md")]
    pub format: Vec<FormatArg>,
    /// Row label; defaults to the corpus split or the file name.
    #[arg(long)]
    pub label: Option<String>,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub filter: FilterOptions,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FieldArg {
    Reference,
    Summary,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum UnitArg {
    Chars,
    Tokens,
    Sentences,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, required_unless_present = "cr")]
    pub field: Option<FieldArg>,
    #[arg(long, value_enum, required_unless_present = "cr")]
    pub unit: Option<UnitArg>,
    /// Compression-ratio distribution instead of a length distribution.
    #[arg(long, conflicts_with_all = ["field", "unit"])]
    pub cr: bool,
    /// Write plot-ready distribution JSON here.
    #[arg(long)]
    pub violin_out: Option<PathBuf>,
    /// Extra abbreviations for sentence splitting, one per line.
    #[arg(long)]
    pub abbreviations: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InspectMode {
    Ordered,
    Random,
    Outliers,
    Representative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KeyArg {
    Position,
    RefLength,
    SummaryLength,
    Cr,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub mode: InspectMode,
    /// Sort key (ordered) or metric (outliers, representative).
    #[arg(long, value_enum)]
    pub key: Option<KeyArg>,
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("length").args(["k", "cr_avg", "train"])))]
pub struct BaselineArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// lead3, leadk or lexrank-st.
    #[arg(long)]
    pub method: String,
    /// Fixed number of sentences.
    #[arg(long)]
    pub k: Option<usize>,
    /// Average reference/summary sentence ratio for estimating k.
    #[arg(long)]
    pub cr_avg: Option<f64>,
    /// Training corpus to compute the average ratio from.
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// Precomputed sentence vectors: a file for a single-document corpus,
    /// or a directory of `<id>.jsonl` files.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub abbreviations: Option<PathBuf>,
    #[arg(long, default_value_t = 0.85)]
    pub damping: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iterations: usize,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// System output JSONL; repeat for a multi-system table.
    #[arg(long, required = true)]
    pub system: Vec<PathBuf>,
    #[arg(long)]
    pub gold: PathBuf,
    /// Row names for the systems, in the same order.
    #[arg(long)]
    pub label: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "r1,r2,rl")]
    pub variants: Vec<String>,
    /// Stem with Cistem (default).
    #[arg(long, overrides_with = "no_stem")]
    pub stem: bool,
    #[arg(long)]
    pub no_stem: bool,
    #[arg(long, default_value_t = 2000)]
    pub resamples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = FormatArg::Md)]
    pub format: FormatArg,
    /// Write the report here (plus a manifest sidecar).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-sample scores as CSV; only with a single --system.
    #[arg(long)]
    pub per_sample_csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Audit(args) => commands::audit(args),
        Command::Filter(args) => commands::filter(args),
        Command::Stats(args) => commands::stats(args),
        Command::Inspect(args) => commands::inspect(args),
        Command::Baseline(args) => commands::baseline(args),
        Command::Score(args) => commands::score(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let internal = e
                .chain()
                .filter_map(|c| c.downcast_ref::<sumaudit::Error>())
                .any(sumaudit::Error::is_internal);
            ExitCode::from(if internal { 2 } else { 1 })
        }
    }
}
