//! Weighted FP-Tree construction and FP-Growth.
//!
//! Nodes live in an arena; `parent`, `children` and `node_link` are arena
//! indices. Every transaction is inserted with its positive weight, so a
//! node's count is the weighted number of target rows whose ordered item
//! list passes through it.

use std::collections::HashMap;

use crate::dataset::{AggregatedDataset, ItemId};
use crate::error::Result;
use crate::mining::{min_target_count, sort_itemsets, FrequentItemSet, MiningParams};

pub type NodeId = usize;

const ROOT: NodeId = 0;

#[derive(Debug, Clone)]
pub struct FpNode {
    /// `None` only for the root.
    pub item: Option<ItemId>,
    pub count: u64,
    pub parent: Option<NodeId>,
    pub children: HashMap<ItemId, NodeId>,
    pub node_link: Option<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeaderEntry {
    pub item: ItemId,
    pub count: u64,
    pub head: Option<NodeId>,
    tail: Option<NodeId>,
}

#[derive(Debug, Clone)]
pub struct FpTree {
    nodes: Vec<FpNode>,
    /// Decreasing count, ties by increasing item id.
    header: Vec<HeaderEntry>,
    rank: HashMap<ItemId, usize>,
    min_count: u64,
    total_positive: u64,
}

impl FpTree {
    /// Builds a tree from weighted transactions, keeping only items whose
    /// total weight reaches `min_count`.
    pub fn from_transactions<'a, I>(transactions: I, min_count: u64, total_positive: u64) -> Self
    where
        I: IntoIterator<Item = (&'a [ItemId], u64)> + Clone,
    {
        let mut totals: HashMap<ItemId, u64> = HashMap::new();
        for (items, weight) in transactions.clone() {
            for &item in items {
                *totals.entry(item).or_default() += weight;
            }
        }
        let mut retained: Vec<(ItemId, u64)> = totals
            .into_iter()
            .filter(|&(_, c)| c >= min_count && c > 0)
            .collect();
        retained.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

        let header: Vec<HeaderEntry> = retained
            .iter()
            .map(|&(item, count)| HeaderEntry {
                item,
                count,
                head: None,
                tail: None,
            })
            .collect();
        let rank = retained
            .iter()
            .enumerate()
            .map(|(r, &(item, _))| (item, r))
            .collect();
        let mut tree = FpTree {
            nodes: vec![FpNode {
                item: None,
                count: 0,
                parent: None,
                children: HashMap::new(),
                node_link: None,
            }],
            header,
            rank,
            min_count,
            total_positive,
        };

        let mut ordered: Vec<(usize, ItemId)> = Vec::new();
        for (items, weight) in transactions {
            if weight == 0 {
                continue;
            }
            ordered.clear();
            ordered.extend(
                items
                    .iter()
                    .filter_map(|i| tree.rank.get(i).map(|&r| (r, *i))),
            );
            if ordered.is_empty() {
                continue;
            }
            ordered.sort_unstable();
            tree.insert(&ordered, weight);
        }
        tree
    }

    fn insert(&mut self, ordered: &[(usize, ItemId)], weight: u64) {
        let mut current = ROOT;
        for &(rank, item) in ordered {
            current = match self.nodes[current].children.get(&item) {
                Some(&child) => child,
                None => {
                    let id = self.nodes.len();
                    self.nodes.push(FpNode {
                        item: Some(item),
                        count: 0,
                        parent: Some(current),
                        children: HashMap::new(),
                        node_link: None,
                    });
                    self.nodes[current].children.insert(item, id);
                    let entry = &mut self.header[rank];
                    match entry.tail {
                        Some(tail) => self.nodes[tail].node_link = Some(id),
                        None => entry.head = Some(id),
                    }
                    entry.tail = Some(id);
                    id
                }
            };
            self.nodes[current].count += weight;
        }
    }

    pub fn root(&self) -> &FpNode {
        &self.nodes[ROOT]
    }

    pub fn node(&self, id: NodeId) -> &FpNode {
        &self.nodes[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn header(&self) -> &[HeaderEntry] {
        &self.header
    }

    pub fn is_empty(&self) -> bool {
        self.header.is_empty()
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    /// Nodes of `item` in node-link order.
    pub fn chain(&self, item: ItemId) -> impl Iterator<Item = NodeId> + '_ {
        let head = self.rank.get(&item).and_then(|&r| self.header[r].head);
        std::iter::successors(head, move |&n| self.nodes[n].node_link)
    }

    /// The path below the root when every node has at most one child.
    fn single_path(&self) -> Option<Vec<NodeId>> {
        let mut path = Vec::new();
        let mut current = ROOT;
        loop {
            let node = &self.nodes[current];
            match node.children.len() {
                0 => return Some(path),
                1 => {
                    current = *node.children.values().next().unwrap();
                    path.push(current);
                }
                _ => return None,
            }
        }
    }

    /// Items on the path from `node`'s parent up to (excluding) the root,
    /// returned root-first.
    fn prefix_path(&self, node: NodeId) -> Vec<ItemId> {
        let mut path = Vec::new();
        let mut current = self.nodes[node].parent;
        while let Some(id) = current {
            match self.nodes[id].item {
                Some(item) => path.push(item),
                None => break,
            }
            current = self.nodes[id].parent;
        }
        path.reverse();
        path
    }
}

/// First scan keeps items meeting `min_support` over the target rows; second
/// scan inserts every positive group with its positive weight.
pub fn build_fp_tree(ds: &AggregatedDataset, min_support: f64) -> FpTree {
    let total_positive = ds.total_positive();
    let min_count = min_target_count(min_support, total_positive.max(1));
    let transactions: Vec<(&[ItemId], u64)> = ds
        .positive_groups()
        .map(|g| (g.items.as_slice(), g.positive))
        .collect();
    FpTree::from_transactions(transactions.iter().copied(), min_count, total_positive)
}

/// Mines `tree` for patterns extending `suffix`, never exceeding
/// `max_length` items.
pub fn fp_growth(tree: &FpTree, suffix: &[ItemId], max_length: usize) -> Vec<FrequentItemSet> {
    let mut out = Vec::new();
    if suffix.len() < max_length {
        grow(tree, suffix, max_length, &mut out);
    }
    out
}

fn with_suffix(suffix: &[ItemId], extra: impl IntoIterator<Item = ItemId>) -> Vec<ItemId> {
    let mut items: Vec<ItemId> = suffix.iter().copied().chain(extra).collect();
    items.sort_unstable();
    items
}

fn grow(tree: &FpTree, suffix: &[ItemId], max_length: usize, out: &mut Vec<FrequentItemSet>) {
    if tree.is_empty() {
        return;
    }
    let room = max_length - suffix.len();

    if let Some(path) = tree.single_path() {
        // Counts along a path never increase, so the support of a node
        // combination is the count of its deepest node.
        let mut chosen: Vec<usize> = Vec::with_capacity(room);
        emit_path_combinations(tree, &path, 0, &mut chosen, room, suffix, out);
        return;
    }

    for entry in tree.header.iter().rev() {
        let beta = with_suffix(suffix, [entry.item]);
        out.push(FrequentItemSet::new(
            beta.clone(),
            entry.count,
            tree.total_positive,
        ));
        if beta.len() >= max_length {
            continue;
        }
        let base: Vec<(Vec<ItemId>, u64)> = tree
            .chain(entry.item)
            .map(|n| (tree.prefix_path(n), tree.nodes[n].count))
            .filter(|(p, _)| !p.is_empty())
            .collect();
        let conditional = FpTree::from_transactions(
            base.iter().map(|(p, c)| (p.as_slice(), *c)),
            tree.min_count,
            tree.total_positive,
        );
        if !conditional.is_empty() {
            grow(&conditional, &beta, max_length, out);
        }
    }
}

fn emit_path_combinations(
    tree: &FpTree,
    path: &[NodeId],
    start: usize,
    chosen: &mut Vec<usize>,
    room: usize,
    suffix: &[ItemId],
    out: &mut Vec<FrequentItemSet>,
) {
    for i in start..path.len() {
        chosen.push(i);
        let deepest = path[i];
        let items = with_suffix(
            suffix,
            chosen
                .iter()
                .map(|&c| tree.nodes[path[c]].item.expect("path nodes carry items")),
        );
        out.push(FrequentItemSet::new(
            items,
            tree.nodes[deepest].count,
            tree.total_positive,
        ));
        if chosen.len() < room {
            emit_path_combinations(tree, path, i + 1, chosen, room, suffix, out);
        }
        chosen.pop();
    }
}

pub fn mine_fpgrowth(
    ds: &AggregatedDataset,
    params: &MiningParams,
) -> Result<Vec<FrequentItemSet>> {
    params.validate()?;
    if ds.total_positive() == 0 {
        return Ok(Vec::new());
    }
    let tree = build_fp_tree(ds, params.min_support);
    let mut out = fp_growth(&tree, &[], params.max_length);
    sort_itemsets(&mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Group, ItemTable};

    fn ds(pairs: &[(&str, &str)], groups: Vec<(Vec<ItemId>, u64, u64)>) -> AggregatedDataset {
        let items =
            ItemTable::from_pairs(pairs.iter().map(|(c, v)| (c.to_string(), v.to_string())));
        AggregatedDataset::from_groups(
            items,
            groups
                .into_iter()
                .map(|(items, positive, negative)| Group {
                    items,
                    positive,
                    negative,
                })
                .collect(),
        )
        .unwrap()
    }

    fn as_pairs(sets: &[FrequentItemSet]) -> Vec<(Vec<ItemId>, u64)> {
        sets.iter()
            .map(|s| (s.items.clone(), s.target_count))
            .collect()
    }

    #[test]
    fn single_group_single_path() {
        let d = ds(&[("a", "1"), ("b", "1")], vec![(vec![0, 1], 5, 0)]);
        let tree = build_fp_tree(&d, 0.5);
        assert_eq!(tree.node_count(), 3);
        let a = tree.root().children[&0];
        let b = tree.node(a).children[&1];
        assert_eq!(tree.node(a).count, 5);
        assert_eq!(tree.node(b).count, 5);
    }

    #[test]
    fn unreachable_support_gives_bare_root() {
        let d = ds(
            &[("a", "1"), ("b", "1")],
            vec![(vec![0], 1, 0), (vec![1], 1, 0)],
        );
        let tree = build_fp_tree(&d, 1.0);
        assert!(tree.is_empty());
        assert_eq!(tree.node_count(), 1);
        assert!(fp_growth(&tree, &[], 3).is_empty());
    }

    #[test]
    fn single_path_uses_deepest_count() {
        // a(5) -> b(3)
        let d = ds(
            &[("a", "1"), ("b", "1")],
            vec![(vec![0, 1], 3, 0), (vec![0], 2, 0)],
        );
        let tree = build_fp_tree(&d, 0.6);
        let mut got = fp_growth(&tree, &[], 2);
        sort_itemsets(&mut got);
        assert_eq!(
            as_pairs(&got),
            vec![(vec![0], 5), (vec![1], 3), (vec![0, 1], 3)]
        );
    }

    #[test]
    fn single_path_respects_max_length() {
        let d = ds(
            &[("a", "1"), ("b", "1"), ("c", "1")],
            vec![(vec![0, 1, 2], 4, 0)],
        );
        let tree = build_fp_tree(&d, 0.5);
        let got = fp_growth(&tree, &[], 2);
        assert_eq!(got.len(), 6);
        assert!(got.iter().all(|s| s.len() <= 2));
    }

    #[test]
    fn header_chains_conserve_counts() {
        let d = ds(
            &[("a", "1"), ("b", "1"), ("c", "1"), ("c", "2")],
            vec![
                (vec![0, 1, 2], 2, 1),
                (vec![0, 3], 3, 0),
                (vec![1, 3], 1, 0),
                (vec![1, 2], 4, 0),
                (vec![0], 0, 7),
            ],
        );
        let tree = build_fp_tree(&d, 0.01);
        for entry in tree.header() {
            let sum: u64 = tree.chain(entry.item).map(|n| tree.node(n).count).sum();
            assert_eq!(sum, entry.count);
            assert!(tree
                .chain(entry.item)
                .all(|n| tree.node(n).item == Some(entry.item)));
        }
        let counts: Vec<u64> = tree.header().iter().map(|e| e.count).collect();
        assert!(counts.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn ties_ordered_by_item_id() {
        let d = ds(&[("a", "1"), ("b", "1")], vec![(vec![0, 1], 2, 0)]);
        let tree = build_fp_tree(&d, 0.5);
        let order: Vec<ItemId> = tree.header().iter().map(|e| e.item).collect();
        assert_eq!(order, vec![0, 1]);
    }
}
