//! `kogec`: annotate, merge, split, score, validate and summarize Korean
//! learner-corpus M2 files, and compute rubric agreement.
//!
//! Data goes to stdout, diagnostics to stderr. Exit status is 0 on success,
//! 1 for bad input and 2 for internal failures.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kogec_core::rubric::{ColumnOrder, ScoreRange};

#[derive(Debug, Parser)]
#[command(name = "kogec", version, about = "Korean learner-corpus GEC and rubric toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Annotate line-aligned source/corrected files into M2.
    Annotate(AnnotateArgs),
    /// Merge M2 files over the same sentences into one multi-reference file.
    Merge(MergeArgs),
    /// Split a multi-reference M2 file into one file per annotator.
    Split(SplitArgs),
    /// Score a hypothesis against multi-reference gold M2.
    Score(ScoreArgs),
    /// Cohen's kappa per learner group and pooled.
    Kappa(KappaArgs),
    /// Corpus statistics for an M2 file.
    Stats(StatsArgs),
    /// Parse and lint an M2 file.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct LexiconArg {
    /// Functional-morpheme lexicon (`surface<TAB>ADP|PART` per line).
    #[arg(long, env = "KOGEC_LEXICON")]
    lexicon: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnnotateArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long, default_value_t = 0, env = "KOGEC_ANNOTATOR_ID")]
    annotator_id: u32,
    /// Output path; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    lexicon: LexiconArg,
    /// `surface/POS` tagged tokens, one line per source sentence.
    #[arg(long)]
    pos: Option<PathBuf>,
    /// Literal rewrite rules (`from<TAB>to`) applied before tokenizing.
    #[arg(long, env = "KOGEC_NORMALIZATION")]
    normalization: Option<PathBuf>,
    /// Leave blocks of unchanged sentences without a noop line.
    #[arg(long)]
    no_noop: bool,
}

#[derive(Debug, Args)]
struct MergeArgs {
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SplitArgs {
    input: PathBuf,
    /// Files are written as `<prefix>.<id>.m2`.
    #[arg(long)]
    prefix: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HypFormat {
    /// M2 when the first non-blank line starts with `S `, text otherwise.
    Auto,
    M2,
    Text,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[arg(long)]
    hyp: PathBuf,
    #[arg(long)]
    gold: PathBuf,
    #[arg(long, default_value_t = 0.5, env = "KOGEC_BETA")]
    beta: f64,
    #[arg(long, value_enum, default_value_t = HypFormat::Auto)]
    hyp_format: HypFormat,
    /// Require matching labels as well as span and correction.
    #[arg(long)]
    label_sensitive: bool,
    /// Print a human-readable table before the key=value lines.
    #[arg(long)]
    report: bool,
    #[command(flatten)]
    lexicon: LexiconArg,
}

#[derive(Debug, Args)]
struct KappaArgs {
    #[arg(long)]
    fb: Option<PathBuf>,
    #[arg(long)]
    fi: Option<PathBuf>,
    #[arg(long)]
    hb: Option<PathBuf>,
    #[arg(long)]
    hi: Option<PathBuf>,
    #[arg(long, value_parser = parse_column_order, default_value = "essay-major", env = "KOGEC_COLUMN_ORDER")]
    column_order: ColumnOrder,
    #[arg(long, value_parser = parse_score_range, default_value = "0:10", env = "KOGEC_SCORE_RANGE")]
    score_range: ScoreRange,
    #[arg(long)]
    report: bool,
}

#[derive(Debug, Args)]
struct StatsArgs {
    input: PathBuf,
    #[arg(long)]
    report: bool,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 2, env = "KOGEC_EXPECT_ANNOTATORS")]
    expect_annotators: usize,
}

fn parse_column_order(s: &str) -> Result<ColumnOrder, String> {
    s.parse()
}

fn parse_score_range(s: &str) -> Result<ScoreRange, String> {
    s.parse()
}

/// Error carrying its exit status.
#[derive(Debug)]
pub enum Failure {
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Annotate(a) => commands::annotate(a),
        Command::Merge(a) => commands::merge(a),
        Command::Split(a) => commands::split(a),
        Command::Score(a) => commands::score(a),
        Command::Kappa(a) => commands::kappa(a),
        Command::Stats(a) => commands::stats(a),
        Command::Validate(a) => commands::validate(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(2)
        }
    }
}
