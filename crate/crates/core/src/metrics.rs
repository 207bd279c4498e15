//! Support, target-conditioned support, confidence and lift over weighted
//! groups. Counts stay integral; ratios are formed once at the end.

use serde::{Deserialize, Serialize};

use crate::dataset::{AggregatedDataset, ItemId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuleStats {
    pub count_x_and_y: u64,
    pub count_x: u64,
    pub count_y: u64,
    pub total: u64,
    pub supp_target: f64,
    pub supp_global: f64,
    pub confidence: f64,
    pub lift: f64,
}

impl RuleStats {
    pub fn from_counts(count_x_and_y: u64, count_x: u64, count_y: u64, total: u64) -> Self {
        let ratio = |n: u64, d: u64| if d == 0 { 0.0 } else { n as f64 / d as f64 };
        let lift = if count_x == 0 || count_y == 0 {
            0.0
        } else {
            (count_x_and_y as f64 * total as f64) / (count_x as f64 * count_y as f64)
        };
        RuleStats {
            count_x_and_y,
            count_x,
            count_y,
            total,
            supp_target: ratio(count_x_and_y, count_y),
            supp_global: ratio(count_x, total),
            confidence: ratio(count_x_and_y, count_x),
            lift,
        }
    }
}

/// `true` when every element of the sorted `needle` occurs in the sorted
/// `haystack`.
pub fn is_sorted_subset(needle: &[ItemId], haystack: &[ItemId]) -> bool {
    let mut hay = haystack.iter();
    'outer: for n in needle {
        for h in hay.by_ref() {
            match h.cmp(n) {
                std::cmp::Ordering::Less => continue,
                std::cmp::Ordering::Equal => continue 'outer,
                std::cmp::Ordering::Greater => return false,
            }
        }
        return false;
    }
    true
}

/// Returns `(count_x_and_y, count_x)` for a sorted item-set.
pub fn count_itemset(itemset: &[ItemId], ds: &AggregatedDataset) -> Result<(u64, u64)> {
    if let Some(&bad) = itemset.iter().find(|&&i| i as usize >= ds.items().len()) {
        return Err(Error::Internal(format!("unknown item id {bad}")));
    }
    let mut xy = 0;
    let mut x = 0;
    for g in ds.groups() {
        if is_sorted_subset(itemset, &g.items) {
            xy += g.positive;
            x += g.weight();
        }
    }
    Ok((xy, x))
}

pub fn rule_stats(itemset: &[ItemId], ds: &AggregatedDataset) -> Result<RuleStats> {
    let (xy, x) = count_itemset(itemset, ds)?;
    Ok(RuleStats::from_counts(
        xy,
        x,
        ds.total_positive(),
        ds.total(),
    ))
}

/// Per-item bitsets over all groups, for scoring many item-sets against one
/// dataset. Produces the same counts as [`count_itemset`].
pub struct CountIndex<'a> {
    ds: &'a AggregatedDataset,
    item_bits: Vec<Vec<u64>>,
    words: usize,
}

impl<'a> CountIndex<'a> {
    pub fn new(ds: &'a AggregatedDataset) -> Self {
        let words = ds.group_count().div_ceil(64);
        let mut item_bits = vec![vec![0u64; words]; ds.items().len()];
        for (pos, g) in ds.groups().iter().enumerate() {
            for &item in &g.items {
                item_bits[item as usize][pos / 64] |= 1 << (pos % 64);
            }
        }
        CountIndex {
            ds,
            item_bits,
            words,
        }
    }

    pub fn count(&self, itemset: &[ItemId]) -> Result<(u64, u64)> {
        if itemset.is_empty() {
            return Ok((self.ds.total_positive(), self.ds.total()));
        }
        if let Some(&bad) = itemset
            .iter()
            .find(|&&i| i as usize >= self.item_bits.len())
        {
            return Err(Error::Internal(format!("unknown item id {bad}")));
        }
        let mut acc = self.item_bits[itemset[0] as usize].clone();
        for &item in &itemset[1..] {
            for (a, b) in acc.iter_mut().zip(&self.item_bits[item as usize]) {
                *a &= b;
            }
        }
        let groups = self.ds.groups();
        let (mut xy, mut x) = (0, 0);
        for (w, &word) in acc.iter().enumerate().take(self.words) {
            let mut rest = word;
            while rest != 0 {
                let g = &groups[w * 64 + rest.trailing_zeros() as usize];
                xy += g.positive;
                x += g.weight();
                rest &= rest - 1;
            }
        }
        Ok((xy, x))
    }

    pub fn stats(&self, itemset: &[ItemId]) -> Result<RuleStats> {
        let (xy, x) = self.count(itemset)?;
        Ok(RuleStats::from_counts(
            xy,
            x,
            self.ds.total_positive(),
            self.ds.total(),
        ))
    }
}
