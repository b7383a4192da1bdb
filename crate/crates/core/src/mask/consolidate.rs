use super::{LabelMap, MaskError, MaskSet};

/// Mask indices in priority order: descending predicted IoU, then descending
/// area, then ascending original index.
pub fn priority_order(set: &MaskSet) -> Vec<usize> {
    let mut order: Vec<usize> = (0..set.masks.len()).collect();
    order.sort_by(|&a, &b| {
        let (ma, mb) = (&set.masks[a], &set.masks[b]);
        mb.predicted_iou()
            .total_cmp(&ma.predicted_iou())
            .then(mb.area().cmp(&ma.area()))
            .then(a.cmp(&b))
    });
    order
}

/// Merges overlapping masks into one label map: each pixel belongs to the
/// highest-priority mask containing it. Masks that end up owning pixels are
/// numbered `1..=K` in priority order; unclaimed pixels are 0.
pub fn consolidate(set: &MaskSet) -> Result<LabelMap, MaskError> {
    let (h, w) = (set.height, set.width);
    for (index, m) in set.masks.iter().enumerate() {
        if m.height() != h || m.width() != w {
            return Err(MaskError::DimensionMismatch {
                index,
                expected: (h, w),
                found: (m.height(), m.width()),
            });
        }
    }
    // provisional label = 1-based rank in priority order
    let mut labels = vec![0u32; h * w];
    let order = priority_order(set);
    let mut owned = vec![false; order.len() + 1];
    for (rank, &idx) in order.iter().enumerate() {
        let tag = rank as u32 + 1;
        for (start, end) in set.masks[idx].foreground_runs() {
            for slot in &mut labels[start..end] {
                if *slot == 0 {
                    *slot = tag;
                    owned[tag as usize] = true;
                }
            }
        }
    }
    let mut dense = vec![0u32; owned.len()];
    let mut next = 0u32;
    for (tag, &o) in owned.iter().enumerate().skip(1) {
        if o {
            next += 1;
            dense[tag] = next;
        }
    }
    for l in &mut labels {
        *l = dense[*l as usize];
    }
    LabelMap::new(h, w, labels)
}
