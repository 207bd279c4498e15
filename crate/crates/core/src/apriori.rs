//! Level-wise Apriori over the target-labeled groups.
//!
//! Candidates at each level come from a prefix join of the previous level,
//! pruned by downward closure and by column exclusivity. Candidate support is
//! counted against per-item occurrence bitsets over the positive groups, and
//! the candidate list of each level is split across a bounded set of scoped
//! worker threads.

use std::collections::HashSet;
use std::thread;

use crate::dataset::{AggregatedDataset, ItemId, ItemTable};
use crate::error::Result;
use crate::mining::{min_target_count, sort_itemsets, FrequentItemSet, MiningParams};

/// Joins sorted length-k item-sets that share their first k-1 items.
///
/// The result is sorted and duplicate free. A candidate survives only if all
/// of its k-subsets are in `frequent_k` and no two of its items come from the
/// same column.
pub fn generate_candidates(frequent_k: &[Vec<ItemId>], items: &ItemTable) -> Vec<Vec<ItemId>> {
    let mut sorted: Vec<&Vec<ItemId>> = frequent_k.iter().collect();
    sorted.sort();
    sorted.dedup();
    let Some(k) = sorted.first().map(|s| s.len()) else {
        return Vec::new();
    };
    debug_assert!(sorted.iter().all(|s| s.len() == k));
    let known: HashSet<&[ItemId]> = sorted.iter().map(|s| s.as_slice()).collect();

    let mut out = Vec::new();
    let mut block_start = 0;
    while block_start < sorted.len() {
        let prefix = &sorted[block_start][..k - 1];
        let block_end = block_start
            + sorted[block_start..]
                .iter()
                .take_while(|s| &s[..k - 1] == prefix)
                .count();
        for i in block_start..block_end {
            let a = sorted[i][k - 1];
            for b_set in &sorted[i + 1..block_end] {
                let b = b_set[k - 1];
                if items.column_of(a) == items.column_of(b) {
                    continue;
                }
                let mut candidate = Vec::with_capacity(k + 1);
                candidate.extend_from_slice(prefix);
                candidate.push(a);
                candidate.push(b);
                if all_subsets_known(&candidate, &known) {
                    out.push(candidate);
                }
            }
        }
        block_start = block_end;
    }
    out
}

fn all_subsets_known(candidate: &[ItemId], known: &HashSet<&[ItemId]>) -> bool {
    let n = candidate.len();
    if n <= 2 {
        // both k-subsets are the joined parents
        return true;
    }
    let mut buf = Vec::with_capacity(n - 1);
    // dropping either of the last two items yields a parent
    (0..n - 2).all(|skip| {
        buf.clear();
        buf.extend(
            candidate
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &x)| x),
        );
        known.contains(buf.as_slice())
    })
}

/// Vertical layout of the positive groups: one bitset of group positions
/// per item plus the positive weight of each group.
struct PositiveIndex {
    weights: Vec<u64>,
    words: usize,
    item_bits: Vec<Vec<u64>>,
}

impl PositiveIndex {
    fn new(ds: &AggregatedDataset) -> Self {
        let positives: Vec<_> = ds.positive_groups().collect();
        let words = positives.len().div_ceil(64);
        let mut item_bits = vec![vec![0u64; words]; ds.items().len()];
        for (pos, g) in positives.iter().enumerate() {
            for &item in &g.items {
                item_bits[item as usize][pos / 64] |= 1 << (pos % 64);
            }
        }
        PositiveIndex {
            weights: positives.iter().map(|g| g.positive).collect(),
            words,
            item_bits,
        }
    }

    fn item_count(&self, item: ItemId) -> u64 {
        self.weighted_sum(&self.item_bits[item as usize])
    }

    fn weighted_sum(&self, bits: &[u64]) -> u64 {
        let mut total = 0;
        for (w, &word) in bits.iter().enumerate() {
            let mut rest = word;
            while rest != 0 {
                let b = rest.trailing_zeros() as usize;
                total += self.weights[w * 64 + b];
                rest &= rest - 1;
            }
        }
        total
    }

    fn count(&self, candidate: &[ItemId], scratch: &mut Vec<u64>) -> u64 {
        scratch.clear();
        scratch.extend_from_slice(&self.item_bits[candidate[0] as usize]);
        for &item in &candidate[1..] {
            for (s, b) in scratch.iter_mut().zip(&self.item_bits[item as usize]) {
                *s &= b;
            }
        }
        self.weighted_sum(scratch)
    }

    fn count_all(&self, candidates: &[Vec<ItemId>]) -> Vec<u64> {
        let mut scratch = Vec::with_capacity(self.words);
        candidates
            .iter()
            .map(|c| self.count(c, &mut scratch))
            .collect()
    }
}

fn count_parallel(index: &PositiveIndex, candidates: &[Vec<ItemId>], threads: usize) -> Vec<u64> {
    if threads <= 1 || candidates.len() < 2 {
        return index.count_all(candidates);
    }
    let chunk = candidates.len().div_ceil(threads);
    thread::scope(|scope| {
        let handles: Vec<_> = candidates
            .chunks(chunk)
            .map(|part| scope.spawn(move || index.count_all(part)))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("apriori worker panicked"))
            .collect()
    })
}

/// Every item-set of length `<= max_length` whose target-conditioned support
/// reaches `min_support`.
pub fn mine_apriori(ds: &AggregatedDataset, params: &MiningParams) -> Result<Vec<FrequentItemSet>> {
    params.validate()?;
    let total_positive = ds.total_positive();
    if total_positive == 0 {
        return Ok(Vec::new());
    }
    let min_count = min_target_count(params.min_support, total_positive);
    let index = PositiveIndex::new(ds);

    let mut out = Vec::new();
    let mut level: Vec<Vec<ItemId>> = Vec::new();
    for item in 0..ds.items().len() as ItemId {
        let count = index.item_count(item);
        if count >= min_count {
            out.push(FrequentItemSet::new(vec![item], count, total_positive));
            level.push(vec![item]);
        }
    }

    let mut k = 1;
    while !level.is_empty() && k < params.max_length {
        let candidates = generate_candidates(&level, ds.items());
        let counts = count_parallel(&index, &candidates, params.threads);
        level = Vec::new();
        for (candidate, count) in candidates.into_iter().zip(counts) {
            if count >= min_count {
                out.push(FrequentItemSet::new(
                    candidate.clone(),
                    count,
                    total_positive,
                ));
                level.push(candidate);
            }
        }
        k += 1;
    }
    sort_itemsets(&mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(pairs: &[(&str, &str)]) -> ItemTable {
        ItemTable::from_pairs(pairs.iter().map(|(c, v)| (c.to_string(), v.to_string())))
    }

    #[test]
    fn pairs_from_singletons() {
        let t = table(&[("a", "1"), ("b", "1"), ("c", "1")]);
        let got = generate_candidates(&[vec![0], vec![1], vec![2]], &t);
        assert_eq!(got, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn downward_closure_prune() {
        let t = table(&[("a", "1"), ("b", "1"), ("c", "1")]);
        let got = generate_candidates(&[vec![0, 1], vec![0, 2]], &t);
        assert!(got.is_empty());
        let got = generate_candidates(&[vec![0, 1], vec![0, 2], vec![1, 2]], &t);
        assert_eq!(got, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn same_column_never_joined() {
        let t = table(&[("dc", "d1"), ("kernel", "k1"), ("kernel", "k2")]);
        let got = generate_candidates(&[vec![0], vec![1], vec![2]], &t);
        assert_eq!(got, vec![vec![0, 1], vec![0, 2]]);
    }

    #[test]
    fn empty_level() {
        let t = table(&[("a", "1")]);
        assert!(generate_candidates(&[], &t).is_empty());
    }
}
