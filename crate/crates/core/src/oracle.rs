//! Brute-force references for the miners and the dominance filters.
//!
//! Nothing here shares code with the production paths: item-sets are
//! enumerated column by column and counted by scanning the groups directly,
//! and the filters are plain double loops over `BTreeSet`s. Only intended for
//! small inputs.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::dataset::{AggregatedDataset, ItemId};
use crate::error::{Error, Result};
use crate::rules::{AssociationRule, FilterParams};

pub const MAX_ORACLE_ITEMS: usize = 24;
pub const MAX_ORACLE_RULES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OracleResult {
    /// Sorted item-set -> (target_count, global_count).
    pub itemsets: BTreeMap<Vec<ItemId>, (u64, u64)>,
}

impl OracleResult {
    /// `(item-set, target_count)` pairs, the comparison key for miners.
    pub fn target_counts(&self) -> BTreeSet<(Vec<ItemId>, u64)> {
        self.itemsets
            .iter()
            .map(|(k, &(t, _))| (k.clone(), t))
            .collect()
    }
}

/// Enumerates every item combination with at most one item per column and
/// at most `max_length` items, keeping those whose target-conditioned
/// support is at least `min_support`.
pub fn brute_force_mine(
    ds: &AggregatedDataset,
    min_support: f64,
    max_length: usize,
) -> Result<OracleResult> {
    let items = ds.items();
    if items.len() > MAX_ORACLE_ITEMS {
        return Err(Error::OracleGuard(format!(
            "{} items exceed the enumeration limit of {MAX_ORACLE_ITEMS}",
            items.len()
        )));
    }
    if ds.total_positive() == 0 {
        return Err(Error::TargetAbsent("<oracle>".into()));
    }

    let mut by_column: BTreeMap<&str, Vec<ItemId>> = BTreeMap::new();
    for item in items.items() {
        by_column
            .entry(item.column.as_str())
            .or_default()
            .push(item.id);
    }
    let columns: Vec<Vec<ItemId>> = by_column.into_values().collect();
    let rows: Vec<(HashSet<ItemId>, u64, u64)> = ds
        .groups()
        .iter()
        .map(|g| (g.items.iter().copied().collect(), g.positive, g.negative))
        .collect();

    let mut result = OracleResult::default();
    let all_rows: Vec<usize> = (0..rows.len()).collect();
    let mut current = Vec::new();
    enumerate(
        &columns,
        0,
        &mut current,
        &all_rows,
        &rows,
        max_length,
        &mut |set, matching| {
            let target: u64 = matching.iter().map(|&r| rows[r].1).sum();
            let global: u64 = matching.iter().map(|&r| rows[r].1 + rows[r].2).sum();
            if target as f64 / ds.total_positive() as f64 >= min_support {
                let mut key = set.to_vec();
                key.sort_unstable();
                result.itemsets.insert(key, (target, global));
            }
        },
    );
    Ok(result)
}

/// Depth-first over columns: each column contributes nothing or one of its
/// items. Branches matching no group are cut, since no threshold above zero
/// can be met there.
fn enumerate(
    columns: &[Vec<ItemId>],
    col: usize,
    current: &mut Vec<ItemId>,
    matching: &[usize],
    rows: &[(HashSet<ItemId>, u64, u64)],
    max_length: usize,
    visit: &mut dyn FnMut(&[ItemId], &[usize]),
) {
    if col == columns.len() || current.len() == max_length {
        return;
    }
    enumerate(columns, col + 1, current, matching, rows, max_length, visit);
    for &item in &columns[col] {
        let narrowed: Vec<usize> = matching
            .iter()
            .copied()
            .filter(|&r| rows[r].0.contains(&item))
            .collect();
        if narrowed.is_empty() {
            continue;
        }
        current.push(item);
        visit(current, &narrowed);
        enumerate(
            columns,
            col + 1,
            current,
            &narrowed,
            rows,
            max_length,
            visit,
        );
        current.pop();
    }
}

/// Applies both dominance filters by comparing every pair of item-sets.
pub fn brute_force_filters(
    rules: &[AssociationRule],
    all: &[AssociationRule],
    params: &FilterParams,
) -> Result<Vec<AssociationRule>> {
    if rules.len() > MAX_ORACLE_RULES {
        return Err(Error::OracleGuard(format!(
            "{} rules exceed the oracle limit of {MAX_ORACLE_RULES}",
            rules.len()
        )));
    }
    let all_sets: Vec<BTreeSet<ItemId>> = all
        .iter()
        .map(|r| r.items.iter().copied().collect())
        .collect();
    let mut survivors = Vec::new();
    for t in rules {
        let t_set: BTreeSet<ItemId> = t.items.iter().copied().collect();
        let mut dropped = false;
        for (other, other_set) in all.iter().zip(&all_sets) {
            let proper_subset = !other_set.is_empty()
                && other_set.len() < t_set.len()
                && other_set.is_subset(&t_set);
            let proper_superset = other_set.len() > t_set.len() && other_set.is_superset(&t_set);
            if proper_subset && other.stats.lift * params.h_lift >= t.stats.lift {
                dropped = true;
            }
            if proper_superset
                && other.stats.supp_target * params.h_supp >= t.stats.supp_target
                && other.stats.lift > t.stats.lift * params.h_lift
            {
                dropped = true;
            }
        }
        if !dropped {
            survivors.push(t.clone());
        }
    }
    Ok(survivors)
}
