//! Brute-force reference for the consensus scores.
//!
//! FMI and ARI come from enumerating every unordered pair of items; entropies
//! come from direct frequency tallies using the textbook `-sum p ln p` and
//! conditional-entropy definitions. None of this shares code with the
//! contingency-table path, and the degenerate conventions are the same.

use std::collections::{BTreeMap, BTreeSet};

use super::{ConsensusScores, DegenerateFlag, MetricsError};

pub const DEFAULT_ORACLE_CAP: usize = 2000;

fn tally<K: Ord + Copy>(keys: impl Iterator<Item = K>) -> BTreeMap<K, f64> {
    let mut m = BTreeMap::new();
    for k in keys {
        *m.entry(k).or_insert(0.0) += 1.0;
    }
    m
}

fn entropy(freq: &BTreeMap<u32, f64>, n: f64) -> f64 {
    freq.values()
        .map(|&c| {
            let p = c / n;
            -p * p.ln()
        })
        .sum()
}

/// `H(A | B) = -sum_{a,b} p(a,b) ln(p(a,b) / p(b))`.
fn conditional_entropy(
    joint: &BTreeMap<(u32, u32), f64>,
    given: &BTreeMap<u32, f64>,
    n: f64,
    given_second: bool,
) -> f64 {
    joint
        .iter()
        .map(|(&(a, b), &c)| {
            let cond = if given_second { given[&b] } else { given[&a] };
            let p = c / n;
            -p * (c / cond).ln()
        })
        .sum()
}

pub fn brute_force_scores(
    gt: &[u32],
    pred: &[u32],
    cap: usize,
) -> Result<ConsensusScores, MetricsError> {
    if gt.len() != pred.len() {
        return Err(MetricsError::LengthMismatch {
            gt: gt.len(),
            pred: pred.len(),
        });
    }
    let n = gt.len();
    if n == 0 {
        return Err(MetricsError::Empty);
    }
    if n > cap {
        return Err(MetricsError::CapExceeded { n, cap });
    }

    let mut degenerate = BTreeSet::new();
    let (mut both, mut same_gt, mut same_pred) = (0u64, 0u64, 0u64);
    let mut agree_everywhere = true;
    for i in 0..n {
        for j in i + 1..n {
            let g = gt[i] == gt[j];
            let p = pred[i] == pred[j];
            same_gt += g as u64;
            same_pred += p as u64;
            both += (g && p) as u64;
            agree_everywhere &= g == p;
        }
    }
    let pairs = (n * (n - 1) / 2) as u64;

    let fmi = if same_gt == 0 || same_pred == 0 {
        degenerate.insert(DegenerateFlag::FmiNoPairs);
        0.0
    } else {
        both as f64 / ((same_gt as f64) * (same_pred as f64)).sqrt()
    };

    // M == E  <=>  pairs * (same_gt + same_pred) == 2 * same_gt * same_pred
    let ari = if (pairs as u128) * (same_gt + same_pred) as u128
        == 2 * same_gt as u128 * same_pred as u128
    {
        degenerate.insert(DegenerateFlag::AriUndefined);
        if agree_everywhere {
            1.0
        } else {
            0.0
        }
    } else {
        let expected = same_gt as f64 * same_pred as f64 / pairs as f64;
        let max = (same_gt + same_pred) as f64 / 2.0;
        (both as f64 - expected) / (max - expected)
    };

    let nf = n as f64;
    let fu = tally(gt.iter().copied());
    let fv = tally(pred.iter().copied());
    let joint = tally(gt.iter().copied().zip(pred.iter().copied()));
    let single_u = fu.len() == 1;
    let single_v = fv.len() == 1;
    if single_u {
        degenerate.insert(DegenerateFlag::SingleClusterGt);
    }
    if single_v {
        degenerate.insert(DegenerateFlag::SingleClusterPred);
    }
    let h_u = entropy(&fu, nf);
    let h_v = entropy(&fv, nf);
    let h_u_given_v = conditional_entropy(&joint, &fv, nf, true);
    let h_v_given_u = conditional_entropy(&joint, &fu, nf, false);

    let homogeneity = if single_u {
        1.0
    } else {
        1.0 - h_u_given_v / h_u
    };
    let completeness = if single_v {
        1.0
    } else {
        1.0 - h_v_given_u / h_v
    };
    let v_measure = if single_u && single_v {
        1.0
    } else if homogeneity + completeness == 0.0 {
        0.0
    } else {
        2.0 * homogeneity * completeness / (homogeneity + completeness)
    };
    let nmi = match (single_u, single_v) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.0,
        (false, false) => (h_u - h_u_given_v) / ((h_u + h_v) / 2.0),
    };

    Ok(ConsensusScores {
        fmi,
        ari,
        nmi,
        v_measure,
        homogeneity,
        completeness,
        degenerate,
    })
}
