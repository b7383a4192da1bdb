use crate::grid::components4;
use crate::mask::LabelMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentInfo {
    /// 1-based id in row-major first-pixel order.
    pub id: u32,
    pub label: u32,
    pub area: usize,
    /// `(row, col)` of the first pixel in raster order.
    pub first: (usize, usize),
    /// Inclusive-exclusive bounds `(row0, col0, row1, col1)`.
    pub bbox: (usize, usize, usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    pub height: usize,
    pub width: usize,
    /// Component id per pixel; 0 for background label 0.
    pub ids: Vec<u32>,
    pub info: Vec<ComponentInfo>,
}

impl Components {
    /// Bitmap of component `id` cropped to its bounding box.
    pub fn bitmap(&self, id: u32) -> (usize, usize, Vec<bool>) {
        let info = &self.info[id as usize - 1];
        let (r0, c0, r1, c1) = info.bbox;
        let (h, w) = (r1 - r0, c1 - c0);
        let mut bits = Vec::with_capacity(h * w);
        for r in r0..r1 {
            bits.extend(
                self.ids[r * self.width + c0..r * self.width + c1]
                    .iter()
                    .map(|&v| v == id),
            );
        }
        (h, w, bits)
    }
}

/// 4-connected components of equal non-zero labels.
pub fn connected_components(map: &LabelMap) -> Components {
    let (raw, comps) = components4(map.height, map.width, &map.labels);
    let mut remap = vec![0u32; comps.len()];
    let mut info = Vec::new();
    for (i, c) in comps.iter().enumerate() {
        if c.key == 0 {
            continue;
        }
        let id = info.len() as u32 + 1;
        remap[i] = id;
        info.push(ComponentInfo {
            id,
            label: c.key,
            area: c.area,
            first: (c.first / map.width, c.first % map.width),
            bbox: (usize::MAX, usize::MAX, 0, 0),
        });
    }
    let ids: Vec<u32> = raw.iter().map(|&r| remap[r as usize]).collect();
    for (p, &id) in ids.iter().enumerate() {
        if id == 0 {
            continue;
        }
        let (r, c) = (p / map.width, p % map.width);
        let b = &mut info[id as usize - 1].bbox;
        b.0 = b.0.min(r);
        b.1 = b.1.min(c);
        b.2 = b.2.max(r + 1);
        b.3 = b.3.max(c + 1);
    }
    Components {
        height: map.height,
        width: map.width,
        ids,
        info,
    }
}
