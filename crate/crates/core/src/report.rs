//! The versioned rule report and its JSON / CSV renderings.

use std::collections::BTreeSet;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dataset::{AggregatedDataset, AutoExcluded, BucketSpec, ColumnExclusionReport};
use crate::error::{Error, Result};
use crate::mining::Algorithm;
use crate::rules::{sort_rules, AssociationRule};

pub const REPORT_VERSION: u32 = 1;

/// Analysis parameters echoed into the report. Execution details that do not
/// change the result (thread count, file paths) are left out so reports stay
/// comparable across machines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub label_column: String,
    pub target_value: String,
    pub exclude_columns: BTreeSet<String>,
    pub distinct_ratio_threshold: f64,
    pub bucketize: Vec<BucketSpec>,
    pub min_support: f64,
    pub max_length: usize,
    pub min_lift: f64,
    pub h_lift: f64,
    pub h_supp: f64,
    pub algorithm: Algorithm,
    pub null_as_item: bool,
    pub aggregate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedColumns {
    pub user: BTreeSet<String>,
    pub auto: Vec<AutoExcluded>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub rows: u64,
    pub groups: usize,
    pub positives: u64,
    pub negatives: u64,
    pub compression_ratio: f64,
    pub items: usize,
    pub included_columns: Vec<String>,
    pub excluded_columns: ExcludedColumns,
}

impl DatasetSummary {
    pub fn new(ds: &AggregatedDataset, exclusion: &ColumnExclusionReport) -> Self {
        DatasetSummary {
            rows: ds.total(),
            groups: ds.group_count(),
            positives: ds.total_positive(),
            negatives: ds.total_negative(),
            compression_ratio: ds.compression_ratio(),
            items: ds.items().len(),
            included_columns: exclusion.included.clone(),
            excluded_columns: ExcludedColumns {
                user: exclusion.user_excluded.clone(),
                auto: exclusion.auto_excluded.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RenderedItem {
    pub column: String,
    pub value: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleCounts {
    pub x_and_y: u64,
    pub x: u64,
    pub y: u64,
    pub total: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRule {
    pub items: Vec<RenderedItem>,
    pub length: usize,
    pub supp_target: f64,
    pub supp_global: f64,
    pub confidence: f64,
    pub lift: f64,
    pub counts: RuleCounts,
}

impl ReportRule {
    /// `col=value` pairs joined by `;`.
    pub fn items_label(&self) -> String {
        self.items
            .iter()
            .map(|i| format!("{}={}", i.column, i.value))
            .collect::<Vec<_>>()
            .join(";")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StageTimings {
    pub ingest: f64,
    pub aggregate: f64,
    pub mine: f64,
    pub filter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleReport {
    pub version: u32,
    pub config: ConfigEcho,
    pub dataset: DatasetSummary,
    pub mined_itemsets: usize,
    pub rules_after_lift: usize,
    pub rules: Vec<ReportRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<StageTimings>,
}

pub struct ReportContext<'a> {
    pub config: ConfigEcho,
    pub dataset: &'a AggregatedDataset,
    pub exclusion: &'a ColumnExclusionReport,
    pub mined_itemsets: usize,
    pub rules_after_lift: usize,
    pub timings_ms: Option<StageTimings>,
}

/// Orders the rules (lift, then target support descending; shorter first;
/// then by items) and renders their items.
pub fn build_report(mut rules: Vec<AssociationRule>, ctx: ReportContext<'_>) -> Result<RuleReport> {
    sort_rules(&mut rules);
    let table = ctx.dataset.items();
    let rendered = rules
        .into_iter()
        .map(|r| {
            let items = r
                .items
                .iter()
                .map(|&id| {
                    table
                        .get(id)
                        .map(|it| RenderedItem {
                            column: it.column.clone(),
                            value: it.value.clone(),
                        })
                        .ok_or_else(|| Error::Internal(format!("unknown item id {id}")))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ReportRule {
                length: items.len(),
                items,
                supp_target: r.stats.supp_target,
                supp_global: r.stats.supp_global,
                confidence: r.stats.confidence,
                lift: r.stats.lift,
                counts: RuleCounts {
                    x_and_y: r.stats.count_x_and_y,
                    x: r.stats.count_x,
                    y: r.stats.count_y,
                    total: r.stats.total,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RuleReport {
        version: REPORT_VERSION,
        config: ctx.config,
        dataset: DatasetSummary::new(ctx.dataset, ctx.exclusion),
        mined_itemsets: ctx.mined_itemsets,
        rules_after_lift: ctx.rules_after_lift,
        rules: rendered,
        timings_ms: ctx.timings_ms,
    })
}

impl RuleReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Internal(format!("report serialization failed: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let report: RuleReport = serde_json::from_str(s).map_err(|e| Error::Parse {
            line: e.line() as u64,
            message: e.to_string(),
        })?;
        if report.version != REPORT_VERSION {
            return Err(Error::Schema(format!(
                "unsupported report version {}",
                report.version
            )));
        }
        Ok(report)
    }

    /// Flat rule table for spreadsheets.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Internal(format!("CSV write failed: {e}"));
        w.write_record([
            "items",
            "length",
            "supp_target",
            "supp_global",
            "confidence",
            "lift",
            "count_x_and_y",
            "count_x",
            "count_y",
            "total",
        ])
        .map_err(io)?;
        for r in &self.rules {
            w.write_record([
                r.items_label(),
                r.length.to_string(),
                r.supp_target.to_string(),
                r.supp_global.to_string(),
                r.confidence.to_string(),
                r.lift.to_string(),
                r.counts.x_and_y.to_string(),
                r.counts.x.to_string(),
                r.counts.y.to_string(),
                r.counts.total.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}
