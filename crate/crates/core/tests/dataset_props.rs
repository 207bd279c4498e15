mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rootscan::dataset::{load_structured_log, pre_aggregate, InputFormat};

use common::*;

/// Brute-force group-by over the raw rows.
fn group_by_rows(seed: u64) -> BTreeMap<Vec<(String, String)>, (u64, u64)> {
    let log = random_log(seed);
    let label = log.column_index("label").unwrap();
    let mut out: BTreeMap<Vec<(String, String)>, (u64, u64)> = BTreeMap::new();
    for row in log.rows() {
        let mut key: Vec<(String, String)> = log
            .columns()
            .iter()
            .zip(row)
            .enumerate()
            .filter(|&(i, _)| i != label)
            .filter_map(|(_, (c, v))| v.clone().map(|v| (c.clone(), v)))
            .collect();
        key.sort();
        let e = out.entry(key).or_default();
        if row[label].as_deref() == Some("pos") {
            e.0 += 1;
        } else {
            e.1 += 1;
        }
    }
    out
}

#[test]
fn t1_group_by_oracle() {
    let ds = t1();
    let mut got: Vec<(Vec<String>, u64, u64)> = ds
        .groups()
        .iter()
        .map(|g| {
            let mut names: Vec<String> = g
                .items
                .iter()
                .map(|&i| ds.items().get(i).unwrap().value.clone())
                .collect();
            names.sort();
            (names, g.positive, g.negative)
        })
        .collect();
    got.sort();
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    assert_eq!(
        got,
        vec![
            (s(&["d1", "k1"]), 2, 0),
            (s(&["d1", "k2"]), 0, 1),
            (s(&["d2", "k1"]), 1, 1),
            (s(&["d2", "k2"]), 0, 1),
        ]
    );
}

#[test]
fn distinct_rows_do_not_compress() {
    let csv = "a,b,status\n1,1,pos\n1,2,neg\n2,1,neg\n2,2,pos\n";
    let log = load_structured_log(csv.as_bytes(), InputFormat::Csv, "status").unwrap();
    let ds = pre_aggregate(&log, &["a".into(), "b".into()], "pos").unwrap();
    assert_eq!(ds.group_count(), log.row_count());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn aggregation_is_lossless(seed in 0u64..100_000) {
        let ds = random_dataset(seed);
        let expected = group_by_rows(seed);
        let got: BTreeMap<Vec<(String, String)>, (u64, u64)> = ds
            .groups()
            .iter()
            .map(|g| {
                let mut key: Vec<(String, String)> = g
                    .items
                    .iter()
                    .map(|&i| {
                        let it = ds.items().get(i).unwrap();
                        (it.column.clone(), it.value.clone())
                    })
                    .collect();
                key.sort();
                (key, (g.positive, g.negative))
            })
            .collect();
        prop_assert_eq!(got.len(), ds.group_count());
        prop_assert_eq!(got, expected);
        let log = random_log(seed);
        prop_assert!(ds.group_count() <= log.row_count());
        prop_assert_eq!(ds.total() as usize, log.row_count());
    }

    #[test]
    fn interning_round_trips(seed in 0u64..100_000) {
        let ds = random_dataset(seed);
        for (i, item) in ds.items().items().iter().enumerate() {
            prop_assert_eq!(item.id as usize, i);
            prop_assert_eq!(ds.items().id_of(&item.column, &item.value), Some(item.id));
        }
        for g in ds.groups() {
            prop_assert!(g.items.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(g.weight() >= 1);
        }
    }

    #[test]
    fn ingest_is_deterministic(seed in 0u64..100_000) {
        prop_assert_eq!(random_dataset(seed), random_dataset(seed));
    }
}
