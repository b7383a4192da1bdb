//! Label map to field-boundary polygons.
//!
//! Polygons live on the pixel-corner lattice: vertex `(row, col)` is the
//! top-left corner of pixel `(row, col)`. Exterior rings have positive
//! shoelace area with `x = col, y = row` and holes negative, so the single
//! pixel at the origin traces `(0,0) -> (0,1) -> (1,1) -> (1,0) -> (0,0)`.

mod components;
mod geojson;
mod shape_map;
mod trace;

pub use components::{connected_components, ComponentInfo, Components};
pub use geojson::to_geojson;
pub use shape_map::{build_shape_map, rasterize, FieldPolygon, Provenance, ShapeMap};
pub use trace::{ring_signed_area, simplify_ring, trace_boundary, Ring, Vertex};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum VectorizeError {
    #[error("component bitmap is empty")]
    EmptyComponent,
    #[error("bitmap holds {found} pixels, expected {expected}")]
    BitmapSize { expected: usize, found: usize },
}
