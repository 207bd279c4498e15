//! Structured-log ingestion, column exclusion, bucketization and weighted
//! pre-aggregation.
//!
//! A [`StructuredLog`] is a plain table of text tokens. Mining never sees it
//! directly: the log is first reduced to an [`AggregatedDataset`], where every
//! distinct combination of included column values becomes one group carrying
//! a positive and a negative weight, and every `column=value` pair is interned
//! as a dense integer item.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense item identifier. Ids run `0..items.len()` within one dataset.
pub type ItemId = u32;

/// Item value used for null cells when nulls are turned into items.
pub const NULL_ITEM_VALUE: &str = "null";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Csv,
    Jsonl,
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(InputFormat::Csv),
            "jsonl" | "ndjson" => Ok(InputFormat::Jsonl),
            other => Err(Error::Config(format!("unknown input format `{other}`"))),
        }
    }
}

/// Raw tabular log. `None` is the null token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuredLog {
    columns: Vec<String>,
    rows: Vec<Vec<Option<String>>>,
    label_column: String,
}

impl StructuredLog {
    pub fn new(
        columns: Vec<String>,
        rows: Vec<Vec<Option<String>>>,
        label_column: impl Into<String>,
    ) -> Result<Self> {
        let label_column = label_column.into();
        let mut seen = HashSet::new();
        for c in &columns {
            if !seen.insert(c.as_str()) {
                return Err(Error::Schema(format!("duplicate column `{c}`")));
            }
        }
        if !seen.contains(label_column.as_str()) {
            return Err(Error::Schema(format!(
                "label column `{label_column}` is not present"
            )));
        }
        if let Some((i, row)) = rows
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != columns.len())
        {
            return Err(Error::Schema(format!(
                "row {i} has {} values, expected {}",
                row.len(),
                columns.len()
            )));
        }
        Ok(StructuredLog {
            columns,
            rows,
            label_column,
        })
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Option<String>>] {
        &self.rows
    }

    pub fn label_column(&self) -> &str {
        &self.label_column
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    fn label_index(&self) -> usize {
        self.column_index(&self.label_column)
            .expect("label column checked at construction")
    }

    /// Columns other than the label, in original order.
    pub fn feature_columns(&self) -> impl Iterator<Item = &str> {
        self.columns
            .iter()
            .map(String::as_str)
            .filter(move |c| *c != self.label_column)
    }
}

/// Reads a CSV or JSONL log.
pub fn load_structured_log<R: Read>(
    source: R,
    format: InputFormat,
    label_column: &str,
) -> Result<StructuredLog> {
    match format {
        InputFormat::Csv => load_csv(source, label_column),
        InputFormat::Jsonl => load_jsonl(source, label_column),
    }
}

fn load_csv<R: Read>(source: R, label_column: &str) -> Result<StructuredLog> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(source);
    let columns: Vec<String> = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_owned)
        .collect();
    if !columns.iter().any(|c| c == label_column) {
        return Err(Error::Schema(format!(
            "label column `{label_column}` is not in the CSV header"
        )));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        rows.push(
            record
                .iter()
                .map(|v| (!v.is_empty()).then(|| v.to_owned()))
                .collect(),
        );
    }
    StructuredLog::new(columns, rows, label_column)
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => Error::Parse {
            line,
            message: csv_kind_message(kind),
        },
    }
}

fn csv_kind_message(kind: csv::ErrorKind) -> String {
    match kind {
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => format!("found {len} fields, expected {expected_len}"),
        csv::ErrorKind::Utf8 { err, .. } => format!("invalid UTF-8: {err}"),
        other => format!("{other:?}"),
    }
}

fn load_jsonl<R: Read>(source: R, label_column: &str) -> Result<StructuredLog> {
    let mut columns: Vec<String> = Vec::new();
    let mut column_pos: HashMap<String, usize> = HashMap::new();
    let mut sparse_rows: Vec<Vec<(usize, String)>> = Vec::new();

    for (i, line) in BufReader::new(source).lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let serde_json::Value::Object(object) = value else {
            return Err(Error::Parse {
                line: line_no,
                message: "expected a JSON object".into(),
            });
        };
        let mut row = Vec::with_capacity(object.len());
        for (key, v) in object {
            let token = match v {
                serde_json::Value::Null => None,
                serde_json::Value::String(s) => Some(s),
                serde_json::Value::Bool(b) => Some(b.to_string()),
                serde_json::Value::Number(n) => Some(n.to_string()),
                _ => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("key `{key}` holds a non-scalar value"),
                    })
                }
            };
            let pos = *column_pos.entry(key.clone()).or_insert_with(|| {
                columns.push(key);
                columns.len() - 1
            });
            if let Some(t) = token {
                row.push((pos, t));
            }
        }
        sparse_rows.push(row);
    }

    if !column_pos.contains_key(label_column) {
        return Err(Error::Schema(format!(
            "label column `{label_column}` does not appear in any JSONL record"
        )));
    }
    let width = columns.len();
    let rows = sparse_rows
        .into_iter()
        .map(|sparse| {
            let mut row = vec![None; width];
            for (pos, t) in sparse {
                row[pos] = Some(t);
            }
            row
        })
        .collect();
    StructuredLog::new(columns, rows, label_column)
}

/// Writes a log in either input format. Nulls become empty CSV fields or
/// JSON nulls, so the output reads back to the same log.
pub fn write_structured_log<W: Write>(
    log: &StructuredLog,
    format: InputFormat,
    out: W,
) -> Result<()> {
    match format {
        InputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let err = |e: csv::Error| Error::Internal(format!("CSV write failed: {e}"));
            w.write_record(log.columns()).map_err(err)?;
            for row in log.rows() {
                w.write_record(row.iter().map(|v| v.as_deref().unwrap_or("")))
                    .map_err(err)?;
            }
            w.flush()?;
        }
        InputFormat::Jsonl => {
            let mut out = std::io::BufWriter::new(out);
            for row in log.rows() {
                let object: serde_json::Map<String, serde_json::Value> = log
                    .columns()
                    .iter()
                    .zip(row)
                    .map(|(c, v)| {
                        let v = v.as_ref().map_or(serde_json::Value::Null, |v| {
                            serde_json::Value::String(v.clone())
                        });
                        (c.clone(), v)
                    })
                    .collect();
                serde_json::to_writer(&mut out, &object)
                    .map_err(|e| Error::Internal(format!("JSONL write failed: {e}")))?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

/// One `--bucketize COL:t1,t2,...:l1,l2,...` directive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketSpec {
    pub column: String,
    pub thresholds: Vec<f64>,
    pub labels: Vec<String>,
}

impl BucketSpec {
    pub fn validate(&self) -> Result<()> {
        if self.thresholds.iter().any(|t| !t.is_finite()) {
            return Err(Error::Config(format!(
                "bucket thresholds for `{}` must be finite",
                self.column
            )));
        }
        if self.thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!(
                "bucket thresholds for `{}` must be strictly ascending",
                self.column
            )));
        }
        if self.labels.len() != self.thresholds.len() + 1 {
            return Err(Error::Config(format!(
                "column `{}` has {} thresholds and needs {} labels, got {}",
                self.column,
                self.thresholds.len(),
                self.thresholds.len() + 1,
                self.labels.len()
            )));
        }
        Ok(())
    }

    /// Label of the half-open interval holding `value`.
    pub fn label_for(&self, value: f64) -> &str {
        let idx = self.thresholds.partition_point(|t| *t <= value);
        &self.labels[idx]
    }
}

impl FromStr for BucketSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [column, thresholds, labels] = parts.as_slice() else {
            return Err(Error::Config(format!(
                "bucketize directive `{s}` must look like COL:t1,t2:l1,l2,l3"
            )));
        };
        if column.is_empty() {
            return Err(Error::Config(format!(
                "bucketize directive `{s}` has no column"
            )));
        }
        let thresholds = thresholds
            .split(',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad bucket threshold `{t}` in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let labels = labels.split(',').map(|l| l.trim().to_owned()).collect();
        let spec = BucketSpec {
            column: (*column).to_owned(),
            thresholds,
            labels,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Replaces a numeric column by interval labels. Nulls stay null.
pub fn bucketize_numeric(mut log: StructuredLog, spec: &BucketSpec) -> Result<StructuredLog> {
    spec.validate()?;
    let col = log.column_index(&spec.column).ok_or_else(|| {
        Error::Schema(format!("cannot bucketize unknown column `{}`", spec.column))
    })?;
    for (row_idx, row) in log.rows.iter_mut().enumerate() {
        let Some(raw) = row[col].as_deref() else {
            continue;
        };
        let value = raw
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|v| !v.is_nan())
            .ok_or_else(|| Error::Conversion {
                column: spec.column.clone(),
                row: row_idx,
                value: raw.to_owned(),
            })?;
        row[col] = Some(spec.label_for(value).to_owned());
    }
    Ok(log)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutoExcluded {
    pub column: String,
    pub distinct_count: usize,
    pub distinct_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnExclusionReport {
    pub user_excluded: BTreeSet<String>,
    pub auto_excluded: Vec<AutoExcluded>,
    pub included: Vec<String>,
}

/// Splits the feature columns into user-excluded, automatically excluded
/// (more than `distinct_ratio_threshold * rows` distinct values, null counted
/// as a value) and included.
pub fn exclude_columns(
    log: &StructuredLog,
    user_excluded: &BTreeSet<String>,
    distinct_ratio_threshold: f64,
) -> Result<ColumnExclusionReport> {
    if !(distinct_ratio_threshold > 0.0 && distinct_ratio_threshold <= 1.0) {
        return Err(Error::Config(format!(
            "distinct ratio threshold must be in (0, 1], got {distinct_ratio_threshold}"
        )));
    }
    for name in user_excluded {
        if name == log.label_column() {
            return Err(Error::Config(format!(
                "cannot exclude the label column `{name}`"
            )));
        }
        if log.column_index(name).is_none() {
            return Err(Error::Config(format!(
                "cannot exclude unknown column `{name}`"
            )));
        }
    }

    let rows = log.row_count();
    let mut auto_excluded = Vec::new();
    let mut included = Vec::new();
    for (idx, column) in log.columns().iter().enumerate() {
        if column == log.label_column() || user_excluded.contains(column) {
            continue;
        }
        let distinct_count = log
            .rows()
            .iter()
            .map(|r| r[idx].as_deref())
            .collect::<HashSet<_>>()
            .len();
        let distinct_ratio = if rows == 0 {
            0.0
        } else {
            distinct_count as f64 / rows as f64
        };
        if rows > 0 && distinct_count as f64 > distinct_ratio_threshold * rows as f64 {
            auto_excluded.push(AutoExcluded {
                column: column.clone(),
                distinct_count,
                distinct_ratio,
            });
        } else {
            included.push(column.clone());
        }
    }
    Ok(ColumnExclusionReport {
        user_excluded: user_excluded.clone(),
        auto_excluded,
        included,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Item {
    pub id: ItemId,
    pub column: String,
    pub value: String,
}

/// Bidirectional `(column, value) <-> id` map. Ids are assigned in
/// lexicographic `(column, value)` order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ItemTable {
    items: Vec<Item>,
    columns: Vec<String>,
    column_of: Vec<u32>,
    index: HashMap<(String, String), ItemId>,
}

impl ItemTable {
    pub fn from_pairs<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let sorted: BTreeSet<(String, String)> = pairs.into_iter().collect();
        let mut table = ItemTable::default();
        let mut column_ids: BTreeMap<String, u32> = BTreeMap::new();
        for (column, value) in sorted {
            let id = table.items.len() as ItemId;
            let next_col = column_ids.len() as u32;
            let col_id = *column_ids.entry(column.clone()).or_insert_with(|| {
                table.columns.push(column.clone());
                next_col
            });
            table.column_of.push(col_id);
            table.index.insert((column.clone(), value.clone()), id);
            table.items.push(Item { id, column, value });
        }
        table
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn get(&self, id: ItemId) -> Option<&Item> {
        self.items.get(id as usize)
    }

    pub fn id_of(&self, column: &str, value: &str) -> Option<ItemId> {
        self.index
            .get(&(column.to_owned(), value.to_owned()))
            .copied()
    }

    /// Dense column index of an item; items of the same column are mutually
    /// exclusive within a transaction.
    pub fn column_of(&self, id: ItemId) -> u32 {
        self.column_of[id as usize]
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }
}

/// One weighted transaction: a distinct item tuple with counts split by label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub items: Vec<ItemId>,
    pub positive: u64,
    pub negative: u64,
}

impl Group {
    pub fn weight(&self) -> u64 {
        self.positive + self.negative
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Grouping {
    /// Identical rows collapse into one weighted group.
    #[default]
    Aggregate,
    /// One weight-1 group per row; the no-aggregation baseline.
    PerRow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AggregateOptions {
    /// Emit `column=null` items instead of leaving the column absent.
    pub null_as_item: bool,
    pub grouping: Grouping,
}

/// Weighted transaction database shared read-only by every miner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregatedDataset {
    items: ItemTable,
    groups: Vec<Group>,
    total_positive: u64,
    total_negative: u64,
}

impl AggregatedDataset {
    /// Builds a dataset from prepared groups, checking every structural
    /// invariant except uniqueness of item tuples (row-level datasets repeat
    /// tuples on purpose).
    pub fn from_groups(items: ItemTable, groups: Vec<Group>) -> Result<Self> {
        let mut total_positive = 0u64;
        let mut total_negative = 0u64;
        for g in &groups {
            if g.weight() == 0 {
                return Err(Error::Internal("group with zero weight".into()));
            }
            if g.items.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Internal(
                    "group items are not strictly sorted".into(),
                ));
            }
            if let Some(&bad) = g.items.iter().find(|&&i| i as usize >= items.len()) {
                return Err(Error::Internal(format!("unknown item id {bad}")));
            }
            let mut cols: Vec<u32> = g.items.iter().map(|&i| items.column_of(i)).collect();
            cols.sort_unstable();
            if cols.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Internal(
                    "group holds two items of the same column".into(),
                ));
            }
            total_positive += g.positive;
            total_negative += g.negative;
        }
        Ok(AggregatedDataset {
            items,
            groups,
            total_positive,
            total_negative,
        })
    }

    pub fn items(&self) -> &ItemTable {
        &self.items
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn total_positive(&self) -> u64 {
        self.total_positive
    }

    pub fn total_negative(&self) -> u64 {
        self.total_negative
    }

    /// Number of underlying rows.
    pub fn total(&self) -> u64 {
        self.total_positive + self.total_negative
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    /// Groups that contain at least one target row; the mining database.
    pub fn positive_groups(&self) -> impl Iterator<Item = &Group> {
        self.groups.iter().filter(|g| g.positive > 0)
    }

    /// Rows per group.
    pub fn compression_ratio(&self) -> f64 {
        if self.groups.is_empty() {
            1.0
        } else {
            self.total() as f64 / self.groups.len() as f64
        }
    }

    /// The weight-1, one-group-per-row form of this dataset.
    pub fn expand(&self) -> AggregatedDataset {
        let mut groups = Vec::with_capacity(self.total() as usize);
        for g in &self.groups {
            for _ in 0..g.positive {
                groups.push(Group {
                    items: g.items.clone(),
                    positive: 1,
                    negative: 0,
                });
            }
            for _ in 0..g.negative {
                groups.push(Group {
                    items: g.items.clone(),
                    positive: 0,
                    negative: 1,
                });
            }
        }
        AggregatedDataset {
            items: self.items.clone(),
            groups,
            total_positive: self.total_positive,
            total_negative: self.total_negative,
        }
    }

    /// Multiplies every weight by `factor`.
    pub fn scaled(&self, factor: u64) -> AggregatedDataset {
        assert!(factor > 0, "scale factor must be positive");
        AggregatedDataset {
            items: self.items.clone(),
            groups: self
                .groups
                .iter()
                .map(|g| Group {
                    items: g.items.clone(),
                    positive: g.positive * factor,
                    negative: g.negative * factor,
                })
                .collect(),
            total_positive: self.total_positive * factor,
            total_negative: self.total_negative * factor,
        }
    }
}

pub fn pre_aggregate(
    log: &StructuredLog,
    included: &[String],
    target_value: &str,
) -> Result<AggregatedDataset> {
    pre_aggregate_with(log, included, target_value, AggregateOptions::default())
}

/// Groups rows by their included `(column, value)` pairs and splits each
/// group's weight by whether the label equals `target_value`.
pub fn pre_aggregate_with(
    log: &StructuredLog,
    included: &[String],
    target_value: &str,
    options: AggregateOptions,
) -> Result<AggregatedDataset> {
    if included.is_empty() {
        return Err(Error::Config("no columns left to analyze".into()));
    }
    let col_idx = included
        .iter()
        .map(|name| {
            if name == log.label_column() {
                return Err(Error::Config(format!(
                    "label column `{name}` cannot be a feature"
                )));
            }
            log.column_index(name)
                .ok_or_else(|| Error::Schema(format!("unknown column `{name}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let label_idx = log.label_index();

    fn cell(row: &[Option<String>], c: usize, null_as_item: bool) -> Option<&str> {
        match &row[c] {
            Some(v) => Some(v.as_str()),
            None if null_as_item => Some(NULL_ITEM_VALUE),
            None => None,
        }
    }
    let null_as_item = options.null_as_item;

    let mut distinct: Vec<HashSet<&str>> = vec![HashSet::new(); col_idx.len()];
    for row in log.rows() {
        for (k, &c) in col_idx.iter().enumerate() {
            if let Some(v) = cell(row, c, null_as_item) {
                distinct[k].insert(v);
            }
        }
    }
    let items = ItemTable::from_pairs(
        included
            .iter()
            .zip(&distinct)
            .flat_map(|(name, values)| values.iter().map(|v| (name.clone(), (*v).to_owned()))),
    );
    let lookup: Vec<HashMap<&str, ItemId>> = included
        .iter()
        .zip(&distinct)
        .map(|(name, values)| {
            values
                .iter()
                .map(|&v| (v, items.id_of(name, v).expect("interned above")))
                .collect()
        })
        .collect();

    let mut keyed: Vec<(Vec<ItemId>, bool)> = Vec::with_capacity(log.row_count());
    let mut any_target = false;
    for row in log.rows() {
        let mut ids: Vec<ItemId> = col_idx
            .iter()
            .zip(&lookup)
            .filter_map(|(&c, ids)| cell(row, c, null_as_item).map(|v| ids[v]))
            .collect();
        ids.sort_unstable();
        let is_target = row[label_idx].as_deref() == Some(target_value);
        any_target |= is_target;
        keyed.push((ids, is_target));
    }
    if !any_target {
        return Err(Error::TargetAbsent(target_value.to_owned()));
    }

    let groups = match options.grouping {
        Grouping::Aggregate => {
            let mut merged: BTreeMap<Vec<ItemId>, (u64, u64)> = BTreeMap::new();
            for (ids, is_target) in keyed {
                let w = merged.entry(ids).or_default();
                if is_target {
                    w.0 += 1;
                } else {
                    w.1 += 1;
                }
            }
            merged
                .into_iter()
                .map(|(items, (positive, negative))| Group {
                    items,
                    positive,
                    negative,
                })
                .collect()
        }
        Grouping::PerRow => keyed
            .into_iter()
            .map(|(items, is_target)| Group {
                items,
                positive: is_target as u64,
                negative: !is_target as u64,
            })
            .collect(),
    };
    AggregatedDataset::from_groups(items, groups)
}
