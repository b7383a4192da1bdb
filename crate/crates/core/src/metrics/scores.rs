use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ContingencyTable, MetricsError};
use crate::mask::LabelMap;

/// Conventions applied when a score is undefined or one side is trivial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegenerateFlag {
    /// One side has no same-cluster pairs; FMI reported as 0.
    FmiNoPairs,
    /// Expected and maximum index coincide; ARI reported as 1 for identical
    /// partitions, else 0.
    AriUndefined,
    /// Ground truth has a single cluster (zero entropy).
    SingleClusterGt,
    /// Prediction has a single cluster (zero entropy).
    SingleClusterPred,
}

impl fmt::Display for DegenerateFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DegenerateFlag::FmiNoPairs => "fmi_no_pairs",
            DegenerateFlag::AriUndefined => "ari_undefined",
            DegenerateFlag::SingleClusterGt => "single_cluster_gt",
            DegenerateFlag::SingleClusterPred => "single_cluster_pred",
        })
    }
}

impl std::str::FromStr for DegenerateFlag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "fmi_no_pairs" => DegenerateFlag::FmiNoPairs,
            "ari_undefined" => DegenerateFlag::AriUndefined,
            "single_cluster_gt" => DegenerateFlag::SingleClusterGt,
            "single_cluster_pred" => DegenerateFlag::SingleClusterPred,
            other => return Err(format!("unknown degenerate flag {other:?}")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConsensusScores {
    pub fmi: f64,
    pub ari: f64,
    pub nmi: f64,
    pub v_measure: f64,
    pub homogeneity: f64,
    pub completeness: f64,
    pub degenerate: BTreeSet<DegenerateFlag>,
}

impl ConsensusScores {
    pub const METRICS: [&'static str; 6] = [
        "fmi",
        "ari",
        "nmi",
        "v_measure",
        "homogeneity",
        "completeness",
    ];

    pub fn metric(&self, name: &str) -> Option<f64> {
        Some(match name {
            "fmi" => self.fmi,
            "ari" => self.ari,
            "nmi" => self.nmi,
            "v_measure" => self.v_measure,
            "homogeneity" => self.homogeneity,
            "completeness" => self.completeness,
            _ => return None,
        })
    }

    pub fn values(&self) -> [f64; 6] {
        [
            self.fmi,
            self.ari,
            self.nmi,
            self.v_measure,
            self.homogeneity,
            self.completeness,
        ]
    }
}

/// Exact pair counts: `tp = sum C(n_ij, 2)`, `p_gt = sum C(a_i, 2)`,
/// `p_pred = sum C(b_j, 2)`, `total = C(n, 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    pub tp: u128,
    pub p_gt: u128,
    pub p_pred: u128,
    pub total: u128,
}

fn choose2(k: u64) -> u128 {
    let k = k as u128;
    k * k.saturating_sub(1) / 2
}

pub fn pair_counts(t: &ContingencyTable) -> PairCounts {
    PairCounts {
        tp: t.cells().map(|(_, c)| choose2(c)).sum(),
        p_gt: t.row_sums().values().map(|&a| choose2(a)).sum(),
        p_pred: t.col_sums().values().map(|&b| choose2(b)).sum(),
        total: choose2(t.n()),
    }
}

/// Fowlkes-Mallows index, `sqrt(precision * recall)` over same-cluster pairs.
pub fn fmi(t: &ContingencyTable) -> (f64, Option<DegenerateFlag>) {
    let pc = pair_counts(t);
    if pc.p_gt == 0 || pc.p_pred == 0 {
        return (0.0, Some(DegenerateFlag::FmiNoPairs));
    }
    let tp = pc.tp as f64;
    let precision = tp / pc.p_pred as f64;
    let recall = tp / pc.p_gt as f64;
    ((precision * recall).sqrt().clamp(0.0, 1.0), None)
}

/// Adjusted Rand index, evaluated as a single ratio of exact integers:
/// `2 (tp C - p_gt p_pred) / (C (p_gt + p_pred) - 2 p_gt p_pred)` with
/// `C = C(n, 2)`.
pub fn ari(t: &ContingencyTable) -> (f64, Option<DegenerateFlag>) {
    let pc = pair_counts(t);
    let (tp, pg, pp, c) = (
        pc.tp as i128,
        pc.p_gt as i128,
        pc.p_pred as i128,
        pc.total as i128,
    );
    let num = 2 * (tp * c - pg * pp);
    let den = c * (pg + pp) - 2 * pg * pp;
    if den == 0 {
        let v = if t.is_identical_partition() { 1.0 } else { 0.0 };
        return (v, Some(DegenerateFlag::AriUndefined));
    }
    ((num as f64 / den as f64).clamp(-1.0, 1.0), None)
}

/// Entropies in nats. `h_u` is the ground-truth entropy, `h_v` the
/// prediction entropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyTerms {
    pub h_u: f64,
    pub h_v: f64,
    pub h_u_given_v: f64,
    pub h_v_given_u: f64,
    pub mutual_info: f64,
}

/// `sum c ln c` over an ascending multiset of counts.
fn xlogx_sum(sorted: &[u64]) -> f64 {
    sorted
        .iter()
        .filter(|&&c| c > 1)
        .map(|&c| {
            let c = c as f64;
            c * c.ln()
        })
        .sum()
}

pub fn entropy_terms(t: &ContingencyTable) -> EntropyTerms {
    let n = t.n() as f64;
    let ln_n = n.ln();
    let s_a = xlogx_sum(&t.sorted_row_sums());
    let s_b = xlogx_sum(&t.sorted_col_sums());
    let s_ab = xlogx_sum(&t.sorted_cell_counts());
    let h_u = if t.n_rows() <= 1 {
        0.0
    } else {
        (ln_n - s_a / n).max(0.0)
    };
    let h_v = if t.n_cols() <= 1 {
        0.0
    } else {
        (ln_n - s_b / n).max(0.0)
    };
    let mutual_info = if h_u == 0.0 || h_v == 0.0 {
        0.0
    } else {
        (ln_n + (s_ab - (s_a + s_b)) / n).clamp(0.0, h_u.min(h_v))
    };
    EntropyTerms {
        h_u,
        h_v,
        h_u_given_v: (h_u - mutual_info).max(0.0),
        h_v_given_u: (h_v - mutual_info).max(0.0),
        mutual_info,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VMeasure {
    pub homogeneity: f64,
    pub completeness: f64,
    pub v_measure: f64,
}

/// `I / mean(H_U, H_V)`: 1 when both entropies vanish, 0 when exactly one does.
fn arithmetic_nmi(e: &EntropyTerms) -> f64 {
    match (e.h_u == 0.0, e.h_v == 0.0) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.0,
        // harmonic mean of I/H_U and I/H_V reduces to this
        (false, false) => (2.0 * e.mutual_info / (e.h_u + e.h_v)).clamp(0.0, 1.0),
    }
}

pub fn v_measure(t: &ContingencyTable) -> VMeasure {
    let e = entropy_terms(t);
    let ratio = |h: f64| {
        if h == 0.0 {
            1.0
        } else {
            (e.mutual_info / h).clamp(0.0, 1.0)
        }
    };
    VMeasure {
        homogeneity: ratio(e.h_u),
        completeness: ratio(e.h_v),
        v_measure: arithmetic_nmi(&e),
    }
}

pub fn nmi(t: &ContingencyTable) -> f64 {
    arithmetic_nmi(&entropy_terms(t))
}

pub fn consensus_scores(t: &ContingencyTable) -> ConsensusScores {
    let mut degenerate = BTreeSet::new();
    let (fmi, f_flag) = fmi(t);
    let (ari, a_flag) = ari(t);
    degenerate.extend(f_flag);
    degenerate.extend(a_flag);
    if t.n_rows() == 1 {
        degenerate.insert(DegenerateFlag::SingleClusterGt);
    }
    if t.n_cols() == 1 {
        degenerate.insert(DegenerateFlag::SingleClusterPred);
    }
    let v = v_measure(t);
    ConsensusScores {
        fmi,
        ari,
        nmi: nmi(t),
        v_measure: v.v_measure,
        homogeneity: v.homogeneity,
        completeness: v.completeness,
        degenerate,
    }
}

pub fn score_label_maps(
    gt: &LabelMap,
    pred: &LabelMap,
    exclude_pred_background: bool,
) -> Result<ConsensusScores, MetricsError> {
    let t = ContingencyTable::from_label_maps(gt, pred, exclude_pred_background)?;
    Ok(consensus_scores(&t))
}
