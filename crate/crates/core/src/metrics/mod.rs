//! Clustering consensus between a ground-truth and a predicted label map.
//!
//! Everything is computed from a sparse [`ContingencyTable`]. Pair counts are
//! exact integers and entropy sums run over count multisets in ascending
//! order, so every score is bit-for-bit invariant under relabelling either
//! side, and FMI, ARI, NMI and V-measure are bit-for-bit symmetric under
//! swapping the two sides. Entropies use natural logarithms.

mod contingency;
mod oracle;
mod scores;

pub use contingency::ContingencyTable;
pub use oracle::{brute_force_scores, DEFAULT_ORACLE_CAP};
pub use scores::{
    ari, consensus_scores, entropy_terms, fmi, nmi, pair_counts, score_label_maps, v_measure,
    ConsensusScores, DegenerateFlag, EntropyTerms, PairCounts, VMeasure,
};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("label maps differ in size: {gt:?} vs {pred:?}")]
    DimensionMismatch {
        gt: (usize, usize),
        pred: (usize, usize),
    },
    #[error("label vectors differ in length: {gt} vs {pred}")]
    LengthMismatch { gt: usize, pred: usize },
    #[error("no pixels to compare")]
    Empty,
    #[error("{n} items exceed the brute-force oracle cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
}
