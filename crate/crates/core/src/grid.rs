//! 4-connected component labelling over row-major grids.

use std::collections::VecDeque;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Component<K> {
    pub key: K,
    pub area: usize,
    /// Row-major index of the first pixel reached in a raster scan.
    pub first: usize,
    pub touches_border: bool,
}

/// Labels every pixel with the id of its 4-connected component of equal
/// `key` values. Ids are assigned in row-major first-pixel order starting at 0.
pub(crate) fn components4<K: Copy + Eq>(
    height: usize,
    width: usize,
    keys: &[K],
) -> (Vec<u32>, Vec<Component<K>>) {
    debug_assert_eq!(keys.len(), height * width);
    const UNSET: u32 = u32::MAX;
    let mut ids = vec![UNSET; keys.len()];
    let mut comps = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..keys.len() {
        if ids[start] != UNSET {
            continue;
        }
        let id = comps.len() as u32;
        let key = keys[start];
        let mut comp = Component {
            key,
            area: 0,
            first: start,
            touches_border: false,
        };
        ids[start] = id;
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            comp.area += 1;
            let (r, c) = (p / width, p % width);
            if r == 0 || c == 0 || r + 1 == height || c + 1 == width {
                comp.touches_border = true;
            }
            let mut visit = |q: usize| {
                if ids[q] == UNSET && keys[q] == key {
                    ids[q] = id;
                    queue.push_back(q);
                }
            };
            if r > 0 {
                visit(p - width);
            }
            if r + 1 < height {
                visit(p + width);
            }
            if c > 0 {
                visit(p - 1);
            }
            if c + 1 < width {
                visit(p + 1);
            }
        }
        comps.push(comp);
    }
    (ids, comps)
}
