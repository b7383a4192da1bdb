//! Evaluation pipeline for class-agnostic segmentation masks against
//! multi-class crop-type label rasters.
//!
//! The crate is organised bottom-up:
//!
//! - [`raster`]: multispectral stacks, NDVI, peak-greenness snapshots, cloud
//!   screening, sub-tiling and seeded sample selection.
//! - [`mask`]: boolean masks as row-major RLE, the JSON interchange format,
//!   prompt grids, minimum-region-area filtering and consolidation into a
//!   single [`mask::LabelMap`].
//! - [`metrics`]: sparse contingency tables and the clustering consensus
//!   scores (FMI, ARI, NMI, homogeneity, completeness, V-measure) with a
//!   brute-force oracle.
//! - [`vectorize`]: connected components, boundary tracing and GeoJSON shape
//!   maps.
//! - [`harness`]: experiment sweeps, the colour-oracle segmenter, aggregation,
//!   tails and report emission.

mod grid;
pub mod harness;
pub mod mask;
pub mod metrics;
pub mod raster;
pub mod stats;
pub mod vectorize;
