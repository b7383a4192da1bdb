use super::BooleanMask;
use crate::grid::components4;

/// Fills 4-connected background holes (components not touching the image
/// border) smaller than `mmra`, then removes 4-connected foreground
/// components smaller than `mmra`. Holes are filled first, so an island inside
/// a filled hole joins its surroundings before the island pass.
pub fn filter_mmra(mask: &BooleanMask, mmra: u64) -> BooleanMask {
    if mmra == 0 {
        return mask.clone();
    }
    let (h, w) = (mask.height(), mask.width());
    let mut bits = mask.to_bitmap();
    let threshold = mmra as usize;

    let (ids, comps) = components4(h, w, &bits);
    let fill: Vec<bool> = comps
        .iter()
        .map(|c| !c.key && !c.touches_border && c.area < threshold)
        .collect();
    if fill.iter().any(|&f| f) {
        for (b, &id) in bits.iter_mut().zip(&ids) {
            if fill[id as usize] {
                *b = true;
            }
        }
    }

    let (ids, comps) = components4(h, w, &bits);
    let remove: Vec<bool> = comps.iter().map(|c| c.key && c.area < threshold).collect();
    for (b, &id) in bits.iter_mut().zip(&ids) {
        if remove[id as usize] {
            *b = false;
        }
    }
    BooleanMask::from_bitmap(h, w, &bits, mask.predicted_iou())
}
