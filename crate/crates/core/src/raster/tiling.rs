use serde::{Deserialize, Serialize};

use super::RasterError;

/// A square window cut from a parent tile.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TileSpec {
    pub parent_tile_id: String,
    pub origin_row: usize,
    pub origin_col: usize,
    pub side: usize,
    pub aoi_side: usize,
}

impl TileSpec {
    /// Stable identifier `<parent>_s<side>_r<row>_c<col>`.
    pub fn id(&self) -> String {
        format!(
            "{}_s{}_r{}_c{}",
            self.parent_tile_id, self.side, self.origin_row, self.origin_col
        )
    }
}

/// Window origins along one axis: multiples of `stride` that fit, plus a final
/// window flush with the far edge when the multiples leave a gap.
fn axis_origins(extent: usize, side: usize, stride: usize) -> Vec<usize> {
    let last = extent - side;
    let mut origins: Vec<usize> = (0..=last).step_by(stride).collect();
    if origins.last() != Some(&last) {
        origins.push(last);
    }
    origins
}

/// Sliding-window sub-tiles of side `floor(min(height, width) / factor)`,
/// in row-major order of their origins.
pub fn tile_image(
    parent_tile_id: &str,
    height: usize,
    width: usize,
    factor: usize,
    stride: usize,
) -> Result<Vec<TileSpec>, RasterError> {
    if factor == 0 {
        return Err(RasterError::TilingParam("factor must be >= 1".into()));
    }
    if stride == 0 {
        return Err(RasterError::TilingParam("stride must be >= 1".into()));
    }
    let parent_side = height.min(width);
    let side = parent_side / factor;
    if side == 0 {
        return Err(RasterError::ZeroSide {
            parent_side,
            factor,
        });
    }
    let rows = axis_origins(height, side, stride);
    let cols = axis_origins(width, side, stride);
    Ok(rows
        .iter()
        .flat_map(|&r| {
            cols.iter().map(move |&c| TileSpec {
                parent_tile_id: parent_tile_id.to_string(),
                origin_row: r,
                origin_col: c,
                side,
                aoi_side: side,
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_window() {
        let tiles = tile_image("p", 1098, 1098, 1, 1098).unwrap();
        assert_eq!(tiles.len(), 1);
        assert_eq!(
            (tiles[0].origin_row, tiles[0].origin_col, tiles[0].side),
            (0, 0, 1098)
        );
    }

    #[test]
    fn half_side_non_overlapping() {
        let tiles = tile_image("p", 1098, 1098, 2, 549).unwrap();
        assert_eq!(tiles.len(), 4);
        assert!(tiles.iter().all(|t| t.side == 549));
        let origins: Vec<_> = tiles.iter().map(|t| (t.origin_row, t.origin_col)).collect();
        assert_eq!(origins, vec![(0, 0), (0, 549), (549, 0), (549, 549)]);
    }

    #[test]
    fn clamps_last_window() {
        // side 3, stride 3 on extent 10 -> 0,3,6 then flush 7
        assert_eq!(axis_origins(10, 3, 3), vec![0, 3, 6, 7]);
        assert_eq!(axis_origins(9, 3, 3), vec![0, 3, 6]);
        assert_eq!(axis_origins(3, 3, 5), vec![0]);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            tile_image("p", 4, 4, 8, 1),
            Err(RasterError::ZeroSide { .. })
        ));
        assert!(tile_image("p", 4, 4, 1, 0).is_err());
        assert!(tile_image("p", 4, 4, 0, 1).is_err());
    }

    #[test]
    fn ids_are_unique() {
        let tiles = tile_image("p", 100, 100, 4, 12).unwrap();
        let ids: std::collections::HashSet<_> = tiles.iter().map(TileSpec::id).collect();
        assert_eq!(ids.len(), tiles.len());
    }
}
