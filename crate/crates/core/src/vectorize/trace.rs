//! Boundary tracing on the pixel-corner lattice.
//!
//! Every foreground pixel side that faces background becomes a directed unit
//! edge with the pixel on its right (screen view, rows growing downward).
//! Edges are chained into rings; at a vertex shared by two diagonal foreground
//! pixels the walk takes the left turn, joining the foreground through the
//! vertex so that each ring separates the component from exactly one
//! 4-connected background region. Every ring is therefore simple, and each
//! enclosed 4-connected background region yields one hole.

use super::VectorizeError;

/// `(row, col)` on the pixel-corner lattice.
pub type Vertex = (usize, usize);
/// Closed ring: first vertex repeated at the end.
pub type Ring = Vec<Vertex>;

// E, S, W, N: clockwise on screen
const DIRS: [(isize, isize); 4] = [(0, 1), (1, 0), (0, -1), (-1, 0)];

#[inline]
fn step(v: Vertex, d: usize) -> Vertex {
    (
        (v.0 as isize + DIRS[d].0) as usize,
        (v.1 as isize + DIRS[d].1) as usize,
    )
}

/// Twice the signed shoelace area with `x = col, y = row`.
pub fn ring_signed_area(ring: &[Vertex]) -> i64 {
    ring.windows(2)
        .map(|w| {
            let (r0, c0) = (w[0].0 as i64, w[0].1 as i64);
            let (r1, c1) = (w[1].0 as i64, w[1].1 as i64);
            c0 * r1 - c1 * r0
        })
        .sum()
}

/// Traces one 4-connected component given as a row-major bitmap. Returns the
/// exterior ring and the hole rings (ordered by their smallest vertex), all
/// with collinear vertices removed and starting at their smallest vertex.
pub fn trace_boundary(
    height: usize,
    width: usize,
    bits: &[bool],
) -> Result<(Ring, Vec<Ring>), VectorizeError> {
    if bits.len() != height * width {
        return Err(VectorizeError::BitmapSize {
            expected: height * width,
            found: bits.len(),
        });
    }
    if !bits.iter().any(|&b| b) {
        return Err(VectorizeError::EmptyComponent);
    }
    let vw = width + 1;
    let inside = |r: isize, c: isize| {
        r >= 0
            && c >= 0
            && (r as usize) < height
            && (c as usize) < width
            && bits[r as usize * width + c as usize]
    };
    // out-edge direction bits per lattice vertex
    let mut out = vec![0u8; (height + 1) * vw];
    for r in 0..height {
        for c in 0..width {
            if !bits[r * width + c] {
                continue;
            }
            let (ri, ci) = (r as isize, c as isize);
            if !inside(ri - 1, ci) {
                out[r * vw + c] |= 1 << 0;
            }
            if !inside(ri, ci + 1) {
                out[r * vw + c + 1] |= 1 << 1;
            }
            if !inside(ri + 1, ci) {
                out[(r + 1) * vw + c + 1] |= 1 << 2;
            }
            if !inside(ri, ci - 1) {
                out[(r + 1) * vw + c] |= 1 << 3;
            }
        }
    }
    let all = out.clone();
    let next_dir = |v: Vertex, d: usize| -> usize {
        let bitsv = all[v.0 * vw + v.1];
        [(d + 3) % 4, d, (d + 1) % 4]
            .into_iter()
            .find(|&nd| bitsv & (1 << nd) != 0)
            .expect("every boundary vertex has an outgoing edge")
    };

    let mut rings = Vec::new();
    for start_idx in 0..out.len() {
        while out[start_idx] != 0 {
            let start = (start_idx / vw, start_idx % vw);
            let d0 = out[start_idx].trailing_zeros() as usize;
            // (vertex, incoming dir, outgoing dir)
            let mut walk: Vec<(Vertex, usize)> = Vec::new();
            let (mut v, mut d) = (start, d0);
            loop {
                out[v.0 * vw + v.1] &= !(1 << d);
                walk.push((v, d));
                v = step(v, d);
                d = next_dir(v, d);
                if v == start && d == d0 {
                    break;
                }
            }
            let n = walk.len();
            let mut corners: Vec<Vertex> = (0..n)
                .filter(|&i| walk[(i + n - 1) % n].1 != walk[i].1)
                .map(|i| walk[i].0)
                .collect();
            let min_pos = corners
                .iter()
                .enumerate()
                .min_by_key(|(_, v)| **v)
                .map(|(i, _)| i)
                .unwrap_or(0);
            corners.rotate_left(min_pos);
            corners.push(corners[0]);
            rings.push(corners);
        }
    }

    let (mut exterior, mut holes): (Vec<Ring>, Vec<Ring>) =
        rings.into_iter().partition(|r| ring_signed_area(r) > 0);
    debug_assert_eq!(
        exterior.len(),
        1,
        "a 4-connected component has one exterior"
    );
    holes.sort_by_key(|r| r[0]);
    Ok((exterior.swap_remove(0), holes))
}

fn perpendicular_distance(p: Vertex, a: Vertex, b: Vertex) -> f64 {
    let (px, py) = (p.1 as f64, p.0 as f64);
    let (ax, ay) = (a.1 as f64, a.0 as f64);
    let (bx, by) = (b.1 as f64, b.0 as f64);
    let (dx, dy) = (bx - ax, by - ay);
    let len = (dx * dx + dy * dy).sqrt();
    if len == 0.0 {
        ((px - ax).powi(2) + (py - ay).powi(2)).sqrt()
    } else {
        ((px - ax) * dy - (py - ay) * dx).abs() / len
    }
}

fn douglas_peucker(points: &[Vertex], tolerance: f64, keep: &mut [bool], offset: usize) {
    if points.len() < 3 {
        return;
    }
    let (first, last) = (points[0], points[points.len() - 1]);
    let (idx, dist) = points[1..points.len() - 1]
        .iter()
        .enumerate()
        .map(|(i, &p)| (i + 1, perpendicular_distance(p, first, last)))
        .fold(
            (0, -1.0),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        );
    if dist > tolerance {
        keep[offset + idx] = true;
        douglas_peucker(&points[..=idx], tolerance, keep, offset);
        douglas_peucker(&points[idx..], tolerance, keep, offset + idx);
    }
}

/// Douglas-Peucker simplification of a closed ring. A tolerance of 0 returns
/// the ring unchanged; rings never drop below four vertices (a triangle plus
/// closure). Simplified rings no longer rasterise exactly to their source.
pub fn simplify_ring(ring: &[Vertex], tolerance: f64) -> Ring {
    if tolerance <= 0.0 || ring.len() <= 4 {
        return ring.to_vec();
    }
    // split at the vertex farthest from the start so both halves are open
    let start = ring[0];
    let far = (1..ring.len() - 1)
        .max_by(|&a, &b| {
            let da = perpendicular_distance(ring[a], start, start);
            let db = perpendicular_distance(ring[b], start, start);
            da.total_cmp(&db)
        })
        .unwrap_or(1);
    let mut keep = vec![false; ring.len()];
    keep[0] = true;
    keep[far] = true;
    keep[ring.len() - 1] = true;
    douglas_peucker(&ring[..=far], tolerance, &mut keep, 0);
    douglas_peucker(&ring[far..], tolerance, &mut keep, far);
    let out: Ring = ring
        .iter()
        .zip(&keep)
        .filter_map(|(&v, &k)| k.then_some(v))
        .collect();
    if out.len() < 4 {
        ring.to_vec()
    } else {
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bitmap(rows: &[&str]) -> (usize, usize, Vec<bool>) {
        let h = rows.len();
        let w = rows[0].len();
        (
            h,
            w,
            rows.iter()
                .flat_map(|r| r.chars().map(|c| c == '#'))
                .collect(),
        )
    }

    #[test]
    fn single_pixel() {
        let (ext, holes) = trace_boundary(1, 1, &[true]).unwrap();
        assert_eq!(ext, vec![(0, 0), (0, 1), (1, 1), (1, 0), (0, 0)]);
        assert!(holes.is_empty());
        assert_eq!(ring_signed_area(&ext), 2);
    }

    #[test]
    fn block_with_centre_hole() {
        let (h, w, b) = bitmap(&["###", "#.#", "###"]);
        let (ext, holes) = trace_boundary(h, w, &b).unwrap();
        assert_eq!(ext, vec![(0, 0), (0, 3), (3, 3), (3, 0), (0, 0)]);
        assert_eq!(holes, vec![vec![(1, 1), (2, 1), (2, 2), (1, 2), (1, 1)]]);
        assert_eq!(ring_signed_area(&ext), 18);
        assert_eq!(ring_signed_area(&holes[0]), -2);
    }

    #[test]
    fn collinear_points_merged() {
        let (ext, _) = trace_boundary(1, 2, &[true, true]).unwrap();
        assert_eq!(ext, vec![(0, 0), (0, 2), (1, 2), (1, 0), (0, 0)]);
    }

    #[test]
    fn pinch_vertex_yields_simple_rings() {
        // the hole touches the notch only at a corner
        let (h, w, b) = bitmap(&[".##", "#.#", "###"]);
        let (ext, holes) = trace_boundary(h, w, &b).unwrap();
        assert_eq!(holes.len(), 1);
        for ring in std::iter::once(&ext).chain(&holes) {
            let distinct: std::collections::HashSet<_> = ring[..ring.len() - 1].iter().collect();
            assert_eq!(
                distinct.len(),
                ring.len() - 1,
                "ring {ring:?} repeats a vertex"
            );
        }
        let area = ring_signed_area(&ext) + holes.iter().map(|h| ring_signed_area(h)).sum::<i64>();
        assert_eq!(area, 2 * 7);
    }

    #[test]
    fn errors() {
        assert_eq!(
            trace_boundary(1, 2, &[false, false]),
            Err(VectorizeError::EmptyComponent)
        );
        assert!(matches!(
            trace_boundary(2, 2, &[true]),
            Err(VectorizeError::BitmapSize { .. })
        ));
    }

    #[test]
    fn simplify_keeps_rectangle_and_thins_staircase() {
        let rect = vec![(0, 0), (0, 5), (3, 5), (3, 0), (0, 0)];
        assert_eq!(simplify_ring(&rect, 0.0), rect);
        assert_eq!(simplify_ring(&rect, 1.0), rect);
        let (h, w, b) = bitmap(&["#....", "##...", "###..", "####.", "#####"]);
        let (ext, _) = trace_boundary(h, w, &b).unwrap();
        let simple = simplify_ring(&ext, 1.0);
        assert!(simple.len() < ext.len());
        assert_eq!(simple.first(), simple.last());
    }
}
