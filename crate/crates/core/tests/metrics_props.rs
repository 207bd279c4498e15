mod common;

use proptest::prelude::*;
use rootscan::metrics::{count_itemset, rule_stats, RuleStats};
use rootscan::oracle::brute_force_mine;

use common::*;

#[test]
fn t1_rule_stats_match_counting_oracle() {
    let ds = t1();
    let k1 = id(&ds, "kernel", "k1");
    let oracle = brute_force_mine(&ds, 0.01, 2).unwrap();
    let (xy, x) = oracle.itemsets[&vec![k1]];
    let s = rule_stats(&[k1], &ds).unwrap();
    assert_eq!((s.count_x_and_y, s.count_x), (xy, x));
    assert!((s.supp_target - 1.0).abs() < 1e-12);
    assert!((s.supp_global - 2.0 / 3.0).abs() < 1e-12);
    assert!((s.confidence - 0.75).abs() < 1e-12);
    assert!((s.lift - 1.5).abs() < 1e-12);
}

proptest! {
    #[test]
    fn independence_gives_unit_lift(
        a in 1u64..1000,
        b in 1u64..1000,
        k in 1u64..1000,
        perturb in 0u64..3,
    ) {
        // total = a*b*k, x = a*k, y = b*k: independence holds at x_and_y = k
        let (x, y, total) = (a * k, b * k, a * b * k);
        let xy = (k + perturb - 1).min(x.min(y));
        let s = RuleStats::from_counts(xy, x, y, total);
        let independent = xy as u128 * total as u128 == x as u128 * y as u128;
        prop_assert_eq!(independent, s.lift == 1.0);
    }

    #[test]
    fn weight_scaling_preserves_ratios(seed in 0u64..10_000, factor in 2u64..50) {
        let ds = random_dataset(seed);
        let scaled = ds.scaled(factor);
        for item in 0..ds.items().len() as u32 {
            let a = rule_stats(&[item], &ds).unwrap();
            let b = rule_stats(&[item], &scaled).unwrap();
            prop_assert_eq!(a.supp_target, b.supp_target);
            prop_assert_eq!(a.supp_global, b.supp_global);
            prop_assert_eq!(a.confidence, b.confidence);
            prop_assert!((a.lift - b.lift).abs() <= 1e-12 * a.lift.max(1.0));
        }
    }

    #[test]
    fn counts_are_anti_monotone(seed in 0u64..10_000) {
        let ds = random_dataset(seed);
        for g in ds.groups().iter().take(20) {
            let full = count_itemset(&g.items, &ds).unwrap();
            for k in 0..g.items.len() {
                let prefix = count_itemset(&g.items[..k], &ds).unwrap();
                prop_assert!(full.0 <= prefix.0 && full.1 <= prefix.1);
            }
        }
    }

    #[test]
    fn stats_respect_count_bounds(seed in 0u64..10_000) {
        let ds = random_dataset(seed);
        for g in ds.groups().iter().take(20) {
            let s = rule_stats(&g.items, &ds).unwrap();
            prop_assert!(s.count_x_and_y <= s.count_x.min(s.count_y));
            prop_assert!(s.count_x <= s.total && s.count_y <= s.total);
            prop_assert!((0.0..=1.0).contains(&s.confidence));
            prop_assert!((0.0..=1.0).contains(&s.supp_target));
        }
    }
}
