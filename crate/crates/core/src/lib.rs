//! Root-cause analysis over structured logs by frequent item-set mining.
//!
//! A log is reduced to weighted groups of `column=value` items, frequent
//! item-sets among the failing rows are mined with Apriori or FP-Growth, and
//! the resulting rules are ranked by lift and pruned by subset/superset
//! dominance into a short report.

pub mod apriori;
pub mod dataset;
pub mod error;
pub mod fpgrowth;
pub mod metrics;
pub mod mining;
pub mod oracle;
pub mod pipeline;
pub mod report;
pub mod rules;
pub mod synth;

pub use dataset::{
    AggregatedDataset, BucketSpec, ColumnExclusionReport, Group, InputFormat, Item, ItemId,
    ItemTable, StructuredLog,
};
pub use error::{Error, Result};
pub use metrics::RuleStats;
pub use mining::{Algorithm, FrequentItemSet, MiningParams};
pub use pipeline::{AnalysisConfig, RunConfig};
pub use report::RuleReport;
pub use rules::{AssociationRule, FilterParams};
