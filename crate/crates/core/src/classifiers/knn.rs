use alloc::vec;
use alloc::vec::Vec;

use super::cart::majority;
use crate::linalg::sq_dist;
use crate::LabeledDataset;

/// Indices of the `k` training points nearest to `x` in Euclidean distance,
/// nearest first; equal distances are ordered by index. `k` is clamped to
/// the dataset size.
pub fn k_nearest(ds: &LabeledDataset, x: &[f64], k: usize) -> Vec<usize> {
    let k = k.min(ds.len());
    let mut scored: Vec<(f64, usize)> = (0..ds.len())
        .map(|i| (sq_dist(ds.point(i), x), i))
        .collect();
    let by_key = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < scored.len() {
        scored.select_nth_unstable_by(k, by_key);
        scored.truncate(k);
    }
    scored.sort_unstable_by(by_key);
    scored.into_iter().map(|(_, i)| i).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Knn {
    pub train: LabeledDataset,
    pub k: usize,
}

impl Knn {
    pub(crate) fn predict(&self, x: &[f64]) -> usize {
        let mut counts = vec![0usize; self.train.class_count()];
        for i in k_nearest(&self.train, x, self.k) {
            counts[self.train.label(i)] += 1;
        }
        majority(&counts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_ordered_by_index() {
        let rows = vec![vec![1.0], vec![-1.0], vec![0.0], vec![1.0]];
        let ds = LabeledDataset::from_rows(&rows, vec![0, 1, 0, 1], 2).unwrap();
        assert_eq!(k_nearest(&ds, &[0.0], 4), vec![2, 0, 1, 3]);
        assert_eq!(k_nearest(&ds, &[0.0], 2), vec![2, 0]);
        assert_eq!(k_nearest(&ds, &[0.0], 9).len(), 4);
    }

    #[test]
    fn label_ties_go_to_smallest_class() {
        let rows = vec![vec![0.0], vec![1.0]];
        let ds = LabeledDataset::from_rows(&rows, vec![1, 0], 2).unwrap();
        let knn = Knn { train: ds, k: 2 };
        assert_eq!(knn.predict(&[0.0]), 0);
    }
}
