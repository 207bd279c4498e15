//! Types shared by the miners.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{AggregatedDataset, ItemId};
use crate::error::{Error, Result};
use crate::{apriori, fpgrowth};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequentItemSet {
    pub items: Vec<ItemId>,
    pub target_count: u64,
    pub supp_target: f64,
}

impl FrequentItemSet {
    pub fn new(items: Vec<ItemId>, target_count: u64, total_positive: u64) -> Self {
        FrequentItemSet {
            items,
            target_count,
            supp_target: target_count as f64 / total_positive as f64,
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiningParams {
    pub min_support: f64,
    pub max_length: usize,
    pub threads: usize,
}

impl Default for MiningParams {
    fn default() -> Self {
        MiningParams {
            min_support: 0.4,
            max_length: 5,
            threads: 1,
        }
    }
}

impl MiningParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_support > 0.0 && self.min_support <= 1.0) {
            return Err(Error::Config(format!(
                "min_support must be in (0, 1], got {}",
                self.min_support
            )));
        }
        if self.max_length == 0 {
            return Err(Error::Config("max_length must be at least 1".into()));
        }
        if self.threads == 0 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        Ok(())
    }
}

/// Smallest weighted count `c` with `c / total_positive >= min_support`.
///
/// Computed so that the integer comparison `count >= c` agrees exactly with
/// the floating-point ratio test for every count.
pub fn min_target_count(min_support: f64, total_positive: u64) -> u64 {
    let meets = |c: u64| c as f64 / total_positive as f64 >= min_support;
    let mut c = (min_support * total_positive as f64).ceil().max(0.0) as u64;
    while c > 0 && meets(c - 1) {
        c -= 1;
    }
    while !meets(c) {
        c += 1;
    }
    c
}

/// Canonical output order: by length, then lexicographically by items.
pub fn sort_itemsets(sets: &mut [FrequentItemSet]) {
    sets.sort_by(|a, b| {
        a.items
            .len()
            .cmp(&b.items.len())
            .then_with(|| a.items.cmp(&b.items))
    });
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Apriori,
    FpGrowth,
    #[default]
    Auto,
}

impl Algorithm {
    /// `Auto` resolves to FP-Growth.
    pub fn resolve(self) -> Algorithm {
        match self {
            Algorithm::Auto => Algorithm::FpGrowth,
            other => other,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Apriori => "apriori",
            Algorithm::FpGrowth => "fpgrowth",
            Algorithm::Auto => "auto",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "apriori" => Ok(Algorithm::Apriori),
            "fpgrowth" | "fp-growth" => Ok(Algorithm::FpGrowth),
            "auto" => Ok(Algorithm::Auto),
            other => Err(Error::Config(format!("unknown algorithm `{other}`"))),
        }
    }
}

pub fn mine(
    ds: &AggregatedDataset,
    params: &MiningParams,
    algorithm: Algorithm,
) -> Result<Vec<FrequentItemSet>> {
    match algorithm.resolve() {
        Algorithm::Apriori => apriori::mine_apriori(ds, params),
        _ => fpgrowth::mine_fpgrowth(ds, params),
    }
}
