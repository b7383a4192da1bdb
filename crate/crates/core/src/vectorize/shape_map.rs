use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{connected_components, simplify_ring, trace_boundary, Ring, Vertex};
use crate::mask::{LabelMap, PromptConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldPolygon {
    pub exterior: Ring,
    pub holes: Vec<Ring>,
    pub label: u32,
    /// Pixel count of the source component.
    pub area: usize,
    pub component_id: u32,
}

/// Where a shape map came from. `transform` is an optional affine
/// `[a, b, c, d, e, f]` mapping pixel `(col, row)` to
/// `(a*col + b*row + c, d*col + e*row + f)`; it is recorded, never applied.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub image_id: String,
    pub prompt_config: Option<PromptConfig>,
    pub transform: Option<[f64; 6]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeMap {
    pub height: usize,
    pub width: usize,
    pub polygons: Vec<FieldPolygon>,
    pub provenance: Provenance,
}

impl ShapeMap {
    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// Douglas-Peucker simplification of every ring.
    pub fn simplified(&self, tolerance: f64) -> Self {
        let mut out = self.clone();
        for p in &mut out.polygons {
            p.exterior = simplify_ring(&p.exterior, tolerance);
            for h in &mut p.holes {
                *h = simplify_ring(h, tolerance);
            }
        }
        out
    }
}

/// One polygon per 4-connected non-zero component with at least `min_area`
/// pixels, in component order.
pub fn build_shape_map(map: &LabelMap, min_area: usize) -> ShapeMap {
    let comps = connected_components(map);
    let polygons = comps
        .info
        .par_iter()
        .filter(|info| info.area >= min_area)
        .map(|info| {
            let (h, w, bits) = comps.bitmap(info.id);
            let (r0, c0, _, _) = info.bbox;
            let (ext, holes) = trace_boundary(h, w, &bits).expect("components are non-empty");
            let shift =
                |ring: Ring| -> Ring { ring.into_iter().map(|(r, c)| (r + r0, c + c0)).collect() };
            FieldPolygon {
                exterior: shift(ext),
                holes: holes.into_iter().map(shift).collect(),
                label: info.label,
                area: info.area,
                component_id: info.id,
            }
        })
        .collect();
    ShapeMap {
        height: map.height,
        width: map.width,
        polygons,
        provenance: Provenance::default(),
    }
}

/// Vertical edges of a ring as `(col, row_lo, row_hi)`.
fn vertical_edges(ring: &[Vertex]) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
    ring.windows(2)
        .filter(|w| w[0].1 == w[1].1 && w[0].0 != w[1].0)
        .map(|w| (w[0].1, w[0].0.min(w[1].0), w[0].0.max(w[1].0)))
}

/// Even-odd fill of every polygon at pixel centres. Later polygons overwrite
/// earlier ones where they overlap.
pub fn rasterize(shape: &ShapeMap) -> LabelMap {
    let mut out = LabelMap::zeros(shape.height, shape.width);
    for poly in &shape.polygons {
        let edges: Vec<(usize, usize, usize)> = std::iter::once(&poly.exterior)
            .chain(&poly.holes)
            .flat_map(|r| vertical_edges(r))
            .collect();
        let r0 = poly.exterior.iter().map(|v| v.0).min().unwrap_or(0);
        let r1 = poly.exterior.iter().map(|v| v.0).max().unwrap_or(0);
        for r in r0..r1.min(shape.height) {
            // columns where the scanline at row r + 0.5 crosses an edge
            let mut xs: Vec<usize> = edges
                .iter()
                .filter(|&&(_, lo, hi)| lo <= r && r < hi)
                .map(|&(c, _, _)| c)
                .collect();
            xs.sort_unstable();
            for span in xs.chunks_exact(2) {
                for c in span[0]..span[1].min(shape.width) {
                    out.labels[r * shape.width + c] = poly.label;
                }
            }
        }
    }
    out
}
