use std::collections::HashMap;

use rayon::prelude::*;

use super::MetricsError;
use crate::mask::LabelMap;

const SHARD: usize = 1 << 16;

/// Sparse joint counts between ground-truth labels (rows) and predicted
/// labels (columns).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: HashMap<(u32, u32), u64>,
    row_sums: HashMap<u32, u64>,
    col_sums: HashMap<u32, u64>,
    n: u64,
}

impl ContingencyTable {
    fn tally(gt: &[u32], pred: &[u32]) -> Self {
        let mut t = Self::default();
        for (&g, &p) in gt.iter().zip(pred) {
            t.add(g, p, 1);
        }
        t
    }

    fn add(&mut self, g: u32, p: u32, count: u64) {
        *self.counts.entry((g, p)).or_insert(0) += count;
        *self.row_sums.entry(g).or_insert(0) += count;
        *self.col_sums.entry(p).or_insert(0) += count;
        self.n += count;
    }

    /// Builds the table from flattened label vectors. Large inputs are
    /// tallied in parallel shards and merged cell-wise.
    pub fn from_labels(gt: &[u32], pred: &[u32]) -> Result<Self, MetricsError> {
        if gt.len() != pred.len() {
            return Err(MetricsError::LengthMismatch {
                gt: gt.len(),
                pred: pred.len(),
            });
        }
        if gt.is_empty() {
            return Err(MetricsError::Empty);
        }
        if gt.len() <= SHARD {
            return Ok(Self::tally(gt, pred));
        }
        Ok(gt
            .par_chunks(SHARD)
            .zip(pred.par_chunks(SHARD))
            .map(|(g, p)| Self::tally(g, p))
            .reduce(Self::default, |mut a, b| {
                a.merge(&b);
                a
            }))
    }

    /// Pairs the two maps pixel by pixel. With `exclude_pred_background`,
    /// pixels whose predicted label is 0 are dropped from both sides.
    pub fn from_label_maps(
        gt: &LabelMap,
        pred: &LabelMap,
        exclude_pred_background: bool,
    ) -> Result<Self, MetricsError> {
        if gt.dims() != pred.dims() {
            return Err(MetricsError::DimensionMismatch {
                gt: gt.dims(),
                pred: pred.dims(),
            });
        }
        if exclude_pred_background {
            let (g, p): (Vec<u32>, Vec<u32>) = gt
                .labels
                .iter()
                .zip(&pred.labels)
                .filter(|(_, &p)| p != 0)
                .map(|(&g, &p)| (g, p))
                .unzip();
            Self::from_labels(&g, &p)
        } else {
            Self::from_labels(&gt.labels, &pred.labels)
        }
    }

    /// Cell-wise addition; exact for any sharding.
    pub fn merge(&mut self, other: &Self) {
        for (&(g, p), &c) in &other.counts {
            self.add(g, p, c);
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            counts: self
                .counts
                .iter()
                .map(|(&(g, p), &c)| ((p, g), c))
                .collect(),
            row_sums: self.col_sums.clone(),
            col_sums: self.row_sums.clone(),
            n: self.n,
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn get(&self, gt: u32, pred: u32) -> u64 {
        self.counts.get(&(gt, pred)).copied().unwrap_or(0)
    }

    pub fn cells(&self) -> impl Iterator<Item = ((u32, u32), u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    pub fn row_sums(&self) -> &HashMap<u32, u64> {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &HashMap<u32, u64> {
        &self.col_sums
    }

    pub fn n_rows(&self) -> usize {
        self.row_sums.len()
    }

    pub fn n_cols(&self) -> usize {
        self.col_sums.len()
    }

    pub fn n_cells(&self) -> usize {
        self.counts.len()
    }

    /// True when both sides induce the same set partition, i.e. every row and
    /// every column has exactly one non-zero cell.
    pub fn is_identical_partition(&self) -> bool {
        self.counts.len() == self.row_sums.len() && self.counts.len() == self.col_sums.len()
    }

    pub(crate) fn sorted_cell_counts(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.counts.values().copied().collect();
        v.sort_unstable();
        v
    }

    pub(crate) fn sorted_row_sums(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.row_sums.values().copied().collect();
        v.sort_unstable();
        v
    }

    pub(crate) fn sorted_col_sums(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.col_sums.values().copied().collect();
        v.sort_unstable();
        v
    }
}
