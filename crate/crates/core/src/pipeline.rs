//! End-to-end analysis: ingest, exclude, bucketize, aggregate, mine, lift
//! filter, dominance filters, report. Also the parameter sweeps and the
//! miner benchmark, which reuse one prepared dataset across runs.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dataset::{
    bucketize_numeric, exclude_columns, load_structured_log, pre_aggregate_with, AggregateOptions,
    AggregatedDataset, BucketSpec, ColumnExclusionReport, Grouping, InputFormat, StructuredLog,
};
use crate::error::{Error, Result};
use crate::mining::{mine, Algorithm, FrequentItemSet, MiningParams};
use crate::report::{build_report, ConfigEcho, ReportContext, RuleReport, StageTimings};
use crate::rules::{apply_dominance_filters, lift_filter, score_itemsets, FilterParams};

/// Everything that shapes the analysis result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub label_column: String,
    pub target_value: String,
    pub exclude_columns: BTreeSet<String>,
    pub distinct_ratio_threshold: f64,
    pub bucketize: Vec<BucketSpec>,
    pub mining: MiningParams,
    pub filters: FilterParams,
    pub algorithm: Algorithm,
    pub null_as_item: bool,
    pub aggregate: bool,
}

impl AnalysisConfig {
    pub fn new(label_column: impl Into<String>, target_value: impl Into<String>) -> Self {
        AnalysisConfig {
            label_column: label_column.into(),
            target_value: target_value.into(),
            exclude_columns: BTreeSet::new(),
            distinct_ratio_threshold: 0.02,
            bucketize: Vec::new(),
            mining: MiningParams::default(),
            filters: FilterParams::default(),
            algorithm: Algorithm::Auto,
            null_as_item: false,
            aggregate: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.mining.validate()?;
        self.filters.validate()?;
        if !(self.distinct_ratio_threshold > 0.0 && self.distinct_ratio_threshold <= 1.0) {
            return Err(Error::Config(format!(
                "distinct_ratio_threshold must be in (0, 1], got {}",
                self.distinct_ratio_threshold
            )));
        }
        for b in &self.bucketize {
            b.validate()?;
        }
        Ok(())
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            label_column: self.label_column.clone(),
            target_value: self.target_value.clone(),
            exclude_columns: self.exclude_columns.clone(),
            distinct_ratio_threshold: self.distinct_ratio_threshold,
            bucketize: self.bucketize.clone(),
            min_support: self.mining.min_support,
            max_length: self.mining.max_length,
            min_lift: self.filters.min_lift,
            h_lift: self.filters.h_lift,
            h_supp: self.filters.h_supp,
            algorithm: self.algorithm,
            null_as_item: self.null_as_item,
            aggregate: self.aggregate,
        }
    }

    fn aggregate_options(&self) -> AggregateOptions {
        AggregateOptions {
            null_as_item: self.null_as_item,
            grouping: if self.aggregate {
                Grouping::Aggregate
            } else {
                Grouping::PerRow
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub format: InputFormat,
    pub analysis: AnalysisConfig,
    /// Include per-stage wall-clock timings in the report.
    pub record_timings: bool,
}

/// A log reduced to the mining database, plus what it took to get there.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub dataset: AggregatedDataset,
    pub exclusion: ColumnExclusionReport,
    pub aggregate_ms: f64,
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

pub fn load(config: &RunConfig) -> Result<StructuredLog> {
    let file = File::open(&config.input).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("cannot read {}: {e}", config.input.display()),
        ))
    })?;
    load_structured_log(
        BufReader::new(file),
        config.format,
        &config.analysis.label_column,
    )
}

/// Bucketize, exclude, then aggregate.
pub fn prepare(log: StructuredLog, config: &AnalysisConfig) -> Result<Prepared> {
    config.validate()?;
    if log.label_column() != config.label_column {
        return Err(Error::Schema(format!(
            "log is labeled by `{}`, configuration expects `{}`",
            log.label_column(),
            config.label_column
        )));
    }
    let start = Instant::now();
    let mut log = log;
    for spec in &config.bucketize {
        log = bucketize_numeric(log, spec)?;
    }
    let exclusion = exclude_columns(
        &log,
        &config.exclude_columns,
        config.distinct_ratio_threshold,
    )?;
    let dataset = pre_aggregate_with(
        &log,
        &exclusion.included,
        &config.target_value,
        config.aggregate_options(),
    )?;
    Ok(Prepared {
        dataset,
        exclusion,
        aggregate_ms: elapsed_ms(start),
    })
}

/// Mines and filters a prepared dataset into a report.
pub fn analyze_prepared(
    prepared: &Prepared,
    config: &AnalysisConfig,
    ingest_ms: Option<f64>,
) -> Result<RuleReport> {
    config.validate()?;
    let start = Instant::now();
    let frequent = mine(&prepared.dataset, &config.mining, config.algorithm)?;
    let mine_ms = elapsed_ms(start);

    let start = Instant::now();
    let all = score_itemsets(&frequent, &prepared.dataset)?;
    let after_lift = lift_filter(&all, config.filters.min_lift);
    let survivors = apply_dominance_filters(&after_lift, &all, &config.filters);
    let filter_ms = elapsed_ms(start);

    build_report(
        survivors,
        ReportContext {
            config: config.echo(),
            dataset: &prepared.dataset,
            exclusion: &prepared.exclusion,
            mined_itemsets: frequent.len(),
            rules_after_lift: after_lift.len(),
            timings_ms: ingest_ms.map(|ingest| StageTimings {
                ingest,
                aggregate: prepared.aggregate_ms,
                mine: mine_ms,
                filter: filter_ms,
            }),
        },
    )
}

pub fn analyze_log(log: StructuredLog, config: &AnalysisConfig) -> Result<RuleReport> {
    let prepared = prepare(log, config)?;
    analyze_prepared(&prepared, config, None)
}

pub fn run_analysis(config: &RunConfig) -> Result<RuleReport> {
    config.analysis.validate()?;
    let start = Instant::now();
    let log = load(config)?;
    let ingest_ms = elapsed_ms(start);
    let prepared = prepare(log, &config.analysis)?;
    analyze_prepared(
        &prepared,
        &config.analysis,
        config.record_timings.then_some(ingest_ms),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Counts mined item-sets.
    MinSupport,
    /// Counts mined item-sets.
    MaxLength,
    /// Counts rules passing the lift threshold.
    MinLift,
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "min_support" => Ok(SweepAxis::MinSupport),
            "max_length" => Ok(SweepAxis::MaxLength),
            "min_lift" => Ok(SweepAxis::MinLift),
            other => Err(Error::Config(format!("unknown sweep axis `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub value: f64,
    pub count: usize,
}

/// Runs one analysis per value of `axis`, all on the same prepared dataset.
pub fn sweep(
    prepared: &Prepared,
    config: &AnalysisConfig,
    axis: SweepAxis,
    values: &[f64],
) -> Result<Vec<CurvePoint>> {
    if values
        .windows(2)
        .any(|w| w[0].partial_cmp(&w[1]) != Some(Ordering::Less))
    {
        return Err(Error::Config(
            "sweep values must be strictly ascending".into(),
        ));
    }
    let ds = &prepared.dataset;
    match axis {
        SweepAxis::MinSupport | SweepAxis::MaxLength => values
            .iter()
            .map(|&value| {
                let mut params = config.mining;
                if axis == SweepAxis::MinSupport {
                    params.min_support = value;
                } else {
                    if value.fract() != 0.0 || value < 1.0 {
                        return Err(Error::Config(format!(
                            "max_length sweep values must be positive integers, got {value}"
                        )));
                    }
                    params.max_length = value as usize;
                }
                let count = mine(ds, &params, config.algorithm)?.len();
                Ok(CurvePoint { value, count })
            })
            .collect(),
        SweepAxis::MinLift => {
            let frequent = mine(ds, &config.mining, config.algorithm)?;
            let all = score_itemsets(&frequent, ds)?;
            values
                .iter()
                .map(|&value| {
                    FilterParams {
                        min_lift: value,
                        ..config.filters
                    }
                    .validate()?;
                    Ok(CurvePoint {
                        value,
                        count: lift_filter(&all, value).len(),
                    })
                })
                .collect()
        }
    }
}

pub fn write_curve<W: std::io::Write>(points: &[CurvePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Internal(format!("CSV write failed: {e}"));
    w.write_record(["value", "count"]).map_err(io)?;
    for p in points {
        w.write_record([p.value.to_string(), p.count.to_string()])
            .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub algorithm: Algorithm,
    pub threads: usize,
    pub groups: usize,
    pub itemsets: usize,
    pub rules: usize,
    pub aggregate_ms: f64,
    pub mine_ms: f64,
    pub filter_ms: f64,
}

/// Times every `(algorithm, threads)` pair on the same prepared dataset and
/// checks that all of them mined the same item-sets.
pub fn benchmark(
    prepared: &Prepared,
    config: &AnalysisConfig,
    algorithms: &[Algorithm],
    thread_counts: &[usize],
    min_groups: usize,
) -> Result<Vec<BenchRow>> {
    let ds = &prepared.dataset;
    if ds.group_count() < min_groups {
        return Err(Error::Config(format!(
            "benchmark needs at least {min_groups} groups, dataset has {}",
            ds.group_count()
        )));
    }
    if algorithms.is_empty() || thread_counts.is_empty() {
        return Err(Error::Config(
            "benchmark needs algorithms and thread counts".into(),
        ));
    }

    let mut rows = Vec::new();
    let mut reference: Option<(Algorithm, usize, Vec<FrequentItemSet>)> = None;
    for &algorithm in algorithms {
        for &threads in thread_counts {
            let params = MiningParams {
                threads,
                ..config.mining
            };
            let start = Instant::now();
            let frequent = mine(ds, &params, algorithm)?;
            let mine_ms = elapsed_ms(start);

            let start = Instant::now();
            let all = score_itemsets(&frequent, ds)?;
            let after_lift = lift_filter(&all, config.filters.min_lift);
            let survivors = apply_dominance_filters(&after_lift, &all, &config.filters);
            let filter_ms = elapsed_ms(start);

            match &reference {
                None => reference = Some((algorithm, threads, frequent.clone())),
                Some((ref_alg, ref_threads, expected)) => {
                    if !same_itemsets(expected, &frequent) {
                        return Err(Error::Internal(format!(
                            "{algorithm} with {threads} threads disagrees with \
                             {ref_alg} with {ref_threads} threads"
                        )));
                    }
                }
            }
            rows.push(BenchRow {
                algorithm,
                threads,
                groups: ds.group_count(),
                itemsets: frequent.len(),
                rules: survivors.len(),
                aggregate_ms: prepared.aggregate_ms,
                mine_ms,
                filter_ms,
            });
        }
    }
    Ok(rows)
}

fn same_itemsets(a: &[FrequentItemSet], b: &[FrequentItemSet]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| x.items == y.items && x.target_count == y.target_count)
}

pub fn write_bench_table<W: std::io::Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Internal(format!("CSV write failed: {e}"));
    w.write_record([
        "algorithm",
        "threads",
        "groups",
        "itemsets",
        "rules",
        "aggregate_ms",
        "mine_ms",
        "filter_ms",
    ])
    .map_err(io)?;
    for r in rows {
        w.write_record([
            r.algorithm.to_string(),
            r.threads.to_string(),
            r.groups.to_string(),
            r.itemsets.to_string(),
            r.rules.to_string(),
            format!("{:.3}", r.aggregate_ms),
            format!("{:.3}", r.mine_ms),
            format!("{:.3}", r.filter_ms),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
