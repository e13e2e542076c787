//! Gini classification tree with axis-aligned midpoint splits and a
//! minimum leaf size.

use alloc::vec;
use alloc::vec::Vec;

use crate::LabeledDataset;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf {
        label: usize,
        size: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
}

fn gini(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts
        .iter()
        .map(|&c| (c as f64 / t) * (c as f64 / t))
        .sum::<f64>()
}

pub(crate) fn majority(counts: &[usize]) -> usize {
    // first maximum wins, i.e. the smallest class on ties
    let mut best = 0;
    for (j, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = j;
        }
    }
    best
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    score: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Tree {
    pub(crate) fn fit(ds: &LabeledDataset, min_leaf: usize) -> Tree {
        let mut tree = Tree { nodes: Vec::new() };
        let all: Vec<usize> = (0..ds.len()).collect();
        tree.grow(ds, all, min_leaf);
        tree
    }

    fn grow(&mut self, ds: &LabeledDataset, idx: Vec<usize>, min_leaf: usize) -> usize {
        let c = ds.class_count();
        let mut counts = vec![0usize; c];
        for &i in &idx {
            counts[ds.label(i)] += 1;
        }
        let pure = counts.iter().filter(|&&k| k > 0).count() <= 1;
        let me = self.nodes.len();
        self.nodes.push(Node::Leaf {
            label: majority(&counts),
            size: idx.len(),
        });
        if pure || idx.len() < 2 * min_leaf {
            return me;
        }
        let Some(split) = best_split(ds, &idx, min_leaf) else {
            return me;
        };
        let left = self.grow(ds, split.left, min_leaf);
        let right = self.grow(ds, split.right, min_leaf);
        self.nodes[me] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        me
    }

    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { .. } => return at,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        match self.nodes[self.leaf_index(x)] {
            Node::Leaf { label, .. } => label,
            Node::Split { .. } => unreachable!("leaf_index returns leaves"),
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Training-point counts of every leaf.
    pub fn leaf_sizes(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Leaf { size, .. } => Some(*size),
                Node::Split { .. } => None,
            })
            .collect()
    }
}

fn best_split(ds: &LabeledDataset, idx: &[usize], min_leaf: usize) -> Option<BestSplit> {
    let c = ds.class_count();
    let m = idx.len();
    let mut total = vec![0usize; c];
    for &i in idx {
        total[ds.label(i)] += 1;
    }
    let mut best: Option<(usize, f64, f64)> = None;
    let mut order: Vec<usize> = idx.to_vec();
    for f in 0..ds.dim() {
        order.sort_by(|&a, &b| ds.point(a)[f].total_cmp(&ds.point(b)[f]).then(a.cmp(&b)));
        let mut left = vec![0usize; c];
        for p in 0..m - 1 {
            left[ds.label(order[p])] += 1;
            let nl = p + 1;
            let nr = m - nl;
            if nl < min_leaf || nr < min_leaf {
                continue;
            }
            let lo = ds.point(order[p])[f];
            let hi = ds.point(order[p + 1])[f];
            if lo >= hi {
                continue;
            }
            let right: Vec<usize> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
            let score = (nl as f64 * gini(&left, nl) + nr as f64 * gini(&right, nr)) / m as f64;
            if best.is_none_or(|(_, _, s)| score < s) {
                let mut threshold = 0.5 * (lo + hi);
                if threshold >= hi {
                    threshold = lo;
                }
                best = Some((f, threshold, score));
            }
        }
    }
    let (feature, threshold, score) = best?;
    let (left, right) = idx
        .iter()
        .partition(|&&i| ds.point(i)[feature] <= threshold);
    Some(BestSplit {
        feature,
        threshold,
        score,
        left,
        right,
    })
    .filter(|s| s.left.len() >= min_leaf && s.right.len() >= min_leaf && s.score.is_finite())
}
