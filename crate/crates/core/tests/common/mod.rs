#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rootscan::dataset::{load_structured_log, pre_aggregate, InputFormat, StructuredLog};
use rootscan::metrics::RuleStats;
use rootscan::rules::AssociationRule;
use rootscan::{AggregatedDataset, ItemId};

pub const T1_CSV: &str = "kernel,dc,status\n\
k1,d1,pos\n\
k1,d1,pos\n\
k1,d2,pos\n\
k2,d1,neg\n\
k2,d2,neg\n\
k1,d2,neg\n";

pub fn t1_log() -> StructuredLog {
    load_structured_log(T1_CSV.as_bytes(), InputFormat::Csv, "status").unwrap()
}

pub fn t1() -> AggregatedDataset {
    pre_aggregate(&t1_log(), &["kernel".into(), "dc".into()], "pos").unwrap()
}

pub fn id(ds: &AggregatedDataset, column: &str, value: &str) -> ItemId {
    ds.items().id_of(column, value).unwrap()
}

/// Random categorical log: up to 10 columns, up to 4 values per column, at
/// most 24 distinct items, up to 500 rows, 1-50% positive rows.
pub fn random_log(seed: u64) -> StructuredLog {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (columns, values) = loop {
        let c = rng.random_range(1..=10usize);
        let v = rng.random_range(1..=4usize);
        if c * v <= 24 {
            break (c, v);
        }
    };
    let rows = rng.random_range(1..=500usize);
    let positive_fraction = rng.random_range(0.01..=0.5);
    let null_rate = if rng.random_bool(0.3) { 0.05 } else { 0.0 };
    // skewed value distributions give deeper frequent item-sets
    let skew: Vec<f64> = (0..columns).map(|_| rng.random_range(0.3..0.95)).collect();

    let mut names: Vec<String> = (0..columns).map(|c| format!("c{c}")).collect();
    names.push("label".into());
    let mut data = Vec::with_capacity(rows);
    for r in 0..rows {
        let mut row: Vec<Option<String>> = (0..columns)
            .map(|c| {
                if rng.random_bool(null_rate) {
                    return None;
                }
                let v = if rng.random_bool(skew[c]) {
                    0
                } else {
                    rng.random_range(0..values)
                };
                Some(format!("v{v}"))
            })
            .collect();
        let positive = r == 0 || rng.random_bool(positive_fraction);
        row.push(Some(if positive { "pos" } else { "neg" }.into()));
        data.push(row);
    }
    StructuredLog::new(names, data, "label").unwrap()
}

pub fn random_dataset(seed: u64) -> AggregatedDataset {
    let log = random_log(seed);
    let included: Vec<String> = log.feature_columns().map(str::to_owned).collect();
    pre_aggregate(&log, &included, "pos").unwrap()
}

pub fn random_params(seed: u64) -> (f64, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    (rng.random_range(0.05..=1.0), rng.random_range(1..=5usize))
}

pub fn stub_rule(items: &[ItemId], supp_target: f64, lift: f64) -> AssociationRule {
    AssociationRule {
        items: items.to_vec(),
        stats: RuleStats {
            supp_target,
            lift,
            ..RuleStats::from_counts(0, 0, 0, 0)
        },
    }
}

/// Random mined-set family with random stats and a random min-lift cut.
/// Lifts and supports are drawn from a small grid so ties occur.
pub fn random_rule_set(seed: u64) -> (Vec<AssociationRule>, Vec<AssociationRule>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let universe = rng.random_range(3..=10u32);
    let n = rng.random_range(0..=200usize);
    let mut seen = std::collections::BTreeSet::new();
    let mut all = Vec::new();
    for _ in 0..n {
        let len = rng.random_range(1..=5usize.min(universe as usize));
        let mut items: Vec<ItemId> = Vec::new();
        while items.len() < len {
            let i = rng.random_range(0..universe);
            if !items.contains(&i) {
                items.push(i);
            }
        }
        items.sort_unstable();
        if !seen.insert(items.clone()) {
            continue;
        }
        let supp = rng.random_range(1..=20) as f64 / 20.0;
        let lift = rng.random_range(0..=40) as f64 / 8.0;
        all.push(stub_rule(&items, supp, lift));
    }
    let min_lift = rng.random_range(0..=16) as f64 / 8.0;
    let rules = all
        .iter()
        .filter(|r| r.stats.lift >= min_lift)
        .cloned()
        .collect();
    (rules, all)
}
