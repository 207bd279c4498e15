//! Association rules against the target label: lift scoring, the min-lift
//! cut, and the two dominance filters.
//!
//! Both filters decide every rule against the full set of mined item-sets
//! (including those below min-lift) and never against each other's output,
//! so they commute and can be applied in either order.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dataset::{AggregatedDataset, ItemId};
use crate::error::{Error, Result};
use crate::metrics::{is_sorted_subset, CountIndex, RuleStats};
use crate::mining::FrequentItemSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationRule {
    pub items: Vec<ItemId>,
    pub stats: RuleStats,
}

impl AssociationRule {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterParams {
    pub min_lift: f64,
    pub h_lift: f64,
    pub h_supp: f64,
}

impl Default for FilterParams {
    fn default() -> Self {
        FilterParams {
            min_lift: 1.0,
            h_lift: 1.0,
            h_supp: 1.0,
        }
    }
}

impl FilterParams {
    pub fn validate(&self) -> Result<()> {
        if !self.min_lift.is_finite() || self.min_lift < 0.0 {
            return Err(Error::Config(format!(
                "min_lift must be a finite non-negative number, got {}",
                self.min_lift
            )));
        }
        if !self.h_lift.is_finite() || self.h_lift < 1.0 {
            return Err(Error::Config(format!(
                "h_lift must be >= 1, got {}",
                self.h_lift
            )));
        }
        if !self.h_supp.is_finite() || self.h_supp < 1.0 {
            return Err(Error::Config(format!(
                "h_supp must be >= 1, got {}",
                self.h_supp
            )));
        }
        Ok(())
    }
}

/// Every mined item-set with its stats, plus the subset that passed min-lift.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredRules {
    pub all: Vec<AssociationRule>,
    pub rules: Vec<AssociationRule>,
}

pub fn score_itemsets(
    frequent: &[FrequentItemSet],
    ds: &AggregatedDataset,
) -> Result<Vec<AssociationRule>> {
    let index = CountIndex::new(ds);
    frequent
        .iter()
        .map(|f| {
            let stats = index.stats(&f.items)?;
            if stats.count_x_and_y != f.target_count {
                return Err(Error::Internal(format!(
                    "item-set {:?} was mined with count {} but scores {}",
                    f.items, f.target_count, stats.count_x_and_y
                )));
            }
            Ok(AssociationRule {
                items: f.items.clone(),
                stats,
            })
        })
        .collect()
}

pub fn lift_filter(all: &[AssociationRule], min_lift: f64) -> Vec<AssociationRule> {
    all.iter()
        .filter(|r| r.stats.lift >= min_lift)
        .cloned()
        .collect()
}

pub fn score_and_lift_filter(
    frequent: &[FrequentItemSet],
    ds: &AggregatedDataset,
    min_lift: f64,
) -> Result<ScoredRules> {
    let all = score_itemsets(frequent, ds)?;
    let rules = lift_filter(&all, min_lift);
    Ok(ScoredRules { all, rules })
}

/// Lookup structure over the mined item-sets.
struct MinedIndex<'a> {
    by_items: HashMap<&'a [ItemId], &'a RuleStats>,
    postings: HashMap<ItemId, Vec<usize>>,
    all: &'a [AssociationRule],
}

/// Above this length proper subsets are found by scanning instead of
/// enumerating `2^n` masks.
const MAX_ENUMERATED_LEN: usize = 16;

impl<'a> MinedIndex<'a> {
    fn new(all: &'a [AssociationRule]) -> Self {
        let mut postings: HashMap<ItemId, Vec<usize>> = HashMap::new();
        for (i, r) in all.iter().enumerate() {
            for &item in &r.items {
                postings.entry(item).or_default().push(i);
            }
        }
        MinedIndex {
            by_items: all.iter().map(|r| (r.items.as_slice(), &r.stats)).collect(),
            postings,
            all,
        }
    }

    fn any_proper_subset(
        &self,
        items: &[ItemId],
        mut pred: impl FnMut(&RuleStats) -> bool,
    ) -> bool {
        let n = items.len();
        if n < 2 {
            return false;
        }
        if n > MAX_ENUMERATED_LEN {
            return self.all.iter().any(|u| {
                !u.items.is_empty()
                    && u.items.len() < n
                    && is_sorted_subset(&u.items, items)
                    && pred(&u.stats)
            });
        }
        let mut buf = Vec::with_capacity(n);
        (1u32..(1 << n) - 1).any(|mask| {
            buf.clear();
            buf.extend((0..n).filter(|b| mask & (1 << b) != 0).map(|b| items[b]));
            self.by_items
                .get(buf.as_slice())
                .is_some_and(|stats| pred(stats))
        })
    }

    fn any_proper_superset(
        &self,
        items: &[ItemId],
        mut pred: impl FnMut(&RuleStats) -> bool,
    ) -> bool {
        let Some(shortest) = items
            .iter()
            .map(|i| self.postings.get(i).map_or(&[][..], Vec::as_slice))
            .min_by_key(|p| p.len())
        else {
            return false;
        };
        shortest.iter().any(|&s| {
            let sup = &self.all[s];
            sup.items.len() > items.len() && is_sorted_subset(items, &sup.items) && pred(&sup.stats)
        })
    }
}

/// Drops `T` when a mined proper subset `U` has `lift(U) * h_lift >= lift(T)`.
pub fn filter_subset_dominance(
    rules: &[AssociationRule],
    all: &[AssociationRule],
    params: &FilterParams,
) -> Vec<AssociationRule> {
    let index = MinedIndex::new(all);
    rules
        .iter()
        .filter(|t| !index.any_proper_subset(&t.items, |u| u.lift * params.h_lift >= t.stats.lift))
        .cloned()
        .collect()
}

/// Drops `T` when a mined proper superset `S` has
/// `supp(S) * h_supp >= supp(T)` and `lift(S) > lift(T) * h_lift`.
pub fn filter_superset_dominance(
    rules: &[AssociationRule],
    all: &[AssociationRule],
    params: &FilterParams,
) -> Vec<AssociationRule> {
    let index = MinedIndex::new(all);
    rules
        .iter()
        .filter(|t| {
            !index.any_proper_superset(&t.items, |s| {
                s.supp_target * params.h_supp >= t.stats.supp_target
                    && s.lift > t.stats.lift * params.h_lift
            })
        })
        .cloned()
        .collect()
}

/// Both dominance filters.
pub fn apply_dominance_filters(
    rules: &[AssociationRule],
    all: &[AssociationRule],
    params: &FilterParams,
) -> Vec<AssociationRule> {
    let after_subset = filter_subset_dominance(rules, all, params);
    filter_superset_dominance(&after_subset, all, params)
}

/// Report order: lift descending, target support descending, shorter first,
/// then by item ids.
pub fn sort_rules(rules: &mut [AssociationRule]) {
    rules.sort_by(|a, b| {
        b.stats
            .lift
            .total_cmp(&a.stats.lift)
            .then_with(|| b.stats.supp_target.total_cmp(&a.stats.supp_target))
            .then_with(|| a.items.len().cmp(&b.items.len()))
            .then_with(|| a.items.cmp(&b.items))
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn rule(items: &[ItemId], supp_target: f64, lift: f64) -> AssociationRule {
        AssociationRule {
            items: items.to_vec(),
            stats: RuleStats {
                count_x_and_y: 0,
                count_x: 0,
                count_y: 0,
                total: 0,
                supp_target,
                supp_global: 0.0,
                confidence: 0.0,
                lift,
            },
        }
    }

    fn ids(rules: &[AssociationRule]) -> Vec<Vec<ItemId>> {
        rules.iter().map(|r| r.items.clone()).collect()
    }

    const KERNEL_A: ItemId = 0;
    const SERVER_B: ItemId = 1;
    const DC_C: ItemId = 2;

    #[test]
    fn longer_rule_with_lower_lift_is_pruned() {
        let all = vec![
            rule(&[KERNEL_A, SERVER_B], 0.5, 5.0),
            rule(&[KERNEL_A, SERVER_B, DC_C], 0.4, 1.5),
        ];
        let kept = filter_subset_dominance(&all, &all, &FilterParams::default());
        assert_eq!(ids(&kept), vec![vec![KERNEL_A, SERVER_B]]);
    }

    #[test]
    fn singletons_survive_subset_filter() {
        let all = vec![rule(&[0], 0.5, 1.1), rule(&[1], 0.5, 0.1)];
        let kept = filter_subset_dominance(&all, &all, &FilterParams::default());
        assert_eq!(kept.len(), 2);
    }

    #[test]
    fn interaction_rule_reported_despite_weak_parts() {
        let all = vec![
            rule(&[0], 0.6, 0.5),
            rule(&[1], 0.6, 0.5),
            rule(&[0, 1], 0.5, 8.0),
        ];
        let params = FilterParams::default();
        let rules = lift_filter(&all, params.min_lift);
        let kept = apply_dominance_filters(&rules, &all, &params);
        assert_eq!(ids(&kept), vec![vec![0, 1]]);
    }

    #[test]
    fn shorter_rule_dominated_by_specific_superset() {
        let all = vec![rule(&[0], 0.8, 2.0), rule(&[0, 1, 2], 0.78, 6.0)];
        let params = FilterParams {
            h_supp: 1.05,
            ..FilterParams::default()
        };
        let kept = filter_superset_dominance(&all, &all, &params);
        assert_eq!(ids(&kept), vec![vec![0, 1, 2]]);
        // without the support slack the superset covers too few samples
        let kept = filter_superset_dominance(&all, &all, &FilterParams::default());
        assert_eq!(kept.len(), 2);
    }

    #[test]
    fn equal_lift_superset_does_not_dominate() {
        let all = vec![rule(&[0], 0.5, 2.0), rule(&[0, 1], 0.5, 2.0)];
        let kept = filter_superset_dominance(&all, &all, &FilterParams::default());
        assert_eq!(kept.len(), 2);
    }

    #[test]
    fn subsets_come_from_all_mined_sets() {
        // {0} is below min-lift but still dominates {0,1}
        let all = vec![rule(&[0], 0.9, 3.0), rule(&[0, 1], 0.5, 2.0)];
        let rules = vec![all[1].clone()];
        assert!(filter_subset_dominance(&rules, &all, &FilterParams::default()).is_empty());
    }

    #[test]
    fn min_lift_boundary_is_inclusive() {
        let all = vec![rule(&[0], 0.5, 1.0), rule(&[1], 0.5, 0.999)];
        assert_eq!(ids(&lift_filter(&all, 1.0)), vec![vec![0]]);
        assert_eq!(lift_filter(&all, 0.0).len(), 2);
    }

    #[test]
    fn long_itemsets_fall_back_to_scan() {
        let long: Vec<ItemId> = (0..20).collect();
        let all = vec![rule(&[3, 7], 0.5, 9.0), rule(&long, 0.4, 2.0)];
        let kept = filter_subset_dominance(&all, &all, &FilterParams::default());
        assert_eq!(ids(&kept), vec![vec![3, 7]]);
    }

    #[test]
    fn ordering() {
        let mut rules = vec![
            rule(&[1], 0.5, 2.0),
            rule(&[0, 1], 0.5, 5.0),
            rule(&[0], 0.5, 2.0),
            rule(&[2], 0.9, 2.0),
        ];
        sort_rules(&mut rules);
        assert_eq!(ids(&rules), vec![vec![0, 1], vec![2], vec![0], vec![1]]);
    }

    #[test]
    fn filter_params_bounds() {
        assert!(FilterParams::default().validate().is_ok());
        let p = FilterParams {
            h_lift: 0.9,
            ..FilterParams::default()
        };
        assert!(p.validate().is_err());
        let p = FilterParams {
            h_supp: 0.5,
            ..FilterParams::default()
        };
        assert!(p.validate().is_err());
        let p = FilterParams {
            min_lift: -1.0,
            ..FilterParams::default()
        };
        assert!(p.validate().is_err());
    }
}
