use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rootscan::dataset::{BucketSpec, InputFormat};
use rootscan::mining::{Algorithm, MiningParams};
use rootscan::pipeline::{AnalysisConfig, SweepAxis};
use rootscan::rules::FilterParams;

#[derive(Debug, Parser)]
#[command(
    name = "rootscan",
    version,
    about = "Lift-ranked root cause rules for structured logs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mine, score and filter rules for one target label.
    Analyze(AnalyzeArgs),
    /// Count item-sets or rules over a range of one parameter.
    Sweep(SweepArgs),
    /// Time miners and thread counts on the same dataset.
    Benchmark(BenchmarkArgs),
    /// Write a seeded synthetic log with planted failure patterns.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Jsonl,
}

impl From<FormatArg> for InputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => InputFormat::Csv,
            FormatArg::Jsonl => InputFormat::Jsonl,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AlgorithmArg {
    Apriori,
    Fpgrowth,
    Auto,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Apriori => Algorithm::Apriori,
            AlgorithmArg::Fpgrowth => Algorithm::FpGrowth,
            AlgorithmArg::Auto => Algorithm::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AxisArg {
    MinSupport,
    MinLift,
    MaxLength,
}

impl From<AxisArg> for SweepAxis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::MinSupport => SweepAxis::MinSupport,
            AxisArg::MinLift => SweepAxis::MinLift,
            AxisArg::MaxLength => SweepAxis::MaxLength,
        }
    }
}

fn support_fraction(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is outside (0, 1]"))
    }
}

fn at_least_one(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v >= 1.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} must be >= 1"))
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} must be >= 0"))
    }
}

fn positive_count(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) | Err(_) => Err(format!("`{s}` is not a positive integer")),
        Ok(v) => Ok(v),
    }
}

fn bucket_spec(s: &str) -> Result<BucketSpec, String> {
    s.parse().map_err(|e: rootscan::Error| e.to_string())
}

/// Input selection and every knob that changes the analysis result.
#[derive(Debug, Args)]
pub struct AnalysisArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    #[arg(long)]
    pub label_column: Option<String>,
    #[arg(long)]
    pub target_value: Option<String>,
    /// Comma-separated columns to drop before aggregation.
    #[arg(long, value_delimiter = ',')]
    pub exclude_columns: Vec<String>,
    /// Drop columns with more than this fraction of distinct values per row.
    #[arg(long, default_value_t = 0.02, value_parser = support_fraction)]
    pub distinct_ratio_threshold: f64,
    /// COL:t1,t2,...:l1,l2,... (repeatable).
    #[arg(long, value_parser = bucket_spec)]
    pub bucketize: Vec<BucketSpec>,
    #[arg(long, default_value_t = 0.4, value_parser = support_fraction)]
    pub min_support: f64,
    #[arg(long, default_value_t = 5, value_parser = positive_count)]
    pub max_length: usize,
    #[arg(long, default_value_t = 1.0, value_parser = non_negative)]
    pub min_lift: f64,
    #[arg(long, default_value_t = 1.0, value_parser = at_least_one)]
    pub h_lift: f64,
    #[arg(long, default_value_t = 1.0, value_parser = at_least_one)]
    pub h_supp: f64,
    #[arg(long, value_enum, default_value = "auto")]
    pub algorithm: AlgorithmArg,
    #[arg(long, default_value_t = 1, value_parser = positive_count)]
    pub threads: usize,
    /// Emit `column=null` items for missing values.
    #[arg(long)]
    pub null_as_item: bool,
    /// Keep one group per row instead of collapsing identical rows.
    #[arg(long)]
    pub no_aggregate: bool,
}

impl AnalysisArgs {
    pub fn analysis_config(&self, default_label: &str, default_target: &str) -> AnalysisConfig {
        AnalysisConfig {
            label_column: self
                .label_column
                .clone()
                .unwrap_or_else(|| default_label.to_owned()),
            target_value: self
                .target_value
                .clone()
                .unwrap_or_else(|| default_target.to_owned()),
            exclude_columns: self
                .exclude_columns
                .iter()
                .cloned()
                .collect::<BTreeSet<_>>(),
            distinct_ratio_threshold: self.distinct_ratio_threshold,
            bucketize: self.bucketize.clone(),
            mining: MiningParams {
                min_support: self.min_support,
                max_length: self.max_length,
                threads: self.threads,
            },
            filters: FilterParams {
                min_lift: self.min_lift,
                h_lift: self.h_lift,
                h_supp: self.h_supp,
            },
            algorithm: self.algorithm.into(),
            null_as_item: self.null_as_item,
            aggregate: !self.no_aggregate,
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Defaults to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    #[arg(long, value_enum, default_value = "json")]
    pub output_format: OutputFormat,
    /// Leave per-stage timings out of the report.
    #[arg(long)]
    pub omit_timings: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    #[arg(long, value_enum)]
    pub axis: AxisArg,
    /// Comma-separated ascending values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct SyntheticArgs {
    #[arg(long, default_value_t = 100_000)]
    pub rows: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Comma-separated lengths, one per planted pattern.
    #[arg(long, value_delimiter = ',', default_value = "5")]
    pub planted_lengths: Vec<usize>,
    #[arg(long, default_value_t = 0.05)]
    pub planted_fraction: f64,
    #[arg(long, default_value_t = 4)]
    pub planted_cardinality: usize,
    #[arg(long, default_value_t = 0.3)]
    pub coincidence_rate: f64,
    #[arg(long, default_value_t = 6)]
    pub noise_columns: usize,
    #[arg(long, default_value_t = 2)]
    pub noise_cardinality: usize,
    #[arg(long, default_value_t = 0.01)]
    pub noise_rate: f64,
    #[arg(long, default_value_t = 1)]
    pub duplicates: usize,
    #[arg(long)]
    pub id_column: bool,
}

impl SyntheticArgs {
    pub fn config(&self) -> rootscan::synth::SynthConfig {
        rootscan::synth::SynthConfig {
            rows: self.rows,
            seed: self.seed,
            planted_lengths: self.planted_lengths.clone(),
            planted_fraction: self.planted_fraction,
            planted_cardinality: self.planted_cardinality,
            coincidence_rate: self.coincidence_rate,
            noise_columns: self.noise_columns,
            noise_cardinality: self.noise_cardinality,
            noise_rate: self.noise_rate,
            duplicates: self.duplicates,
            id_column: self.id_column,
        }
    }
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// Without --input the synthetic generator supplies the dataset.
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    #[command(flatten)]
    pub synthetic: SyntheticArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "apriori,fpgrowth"
    )]
    pub algorithms: Vec<AlgorithmArg>,
    #[arg(long, value_delimiter = ',', default_value = "1", value_parser = positive_count)]
    pub thread_counts: Vec<usize>,
    /// Refuse datasets with fewer groups than this.
    #[arg(long, default_value_t = 100)]
    pub min_groups: usize,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub synthetic: SyntheticArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
}
