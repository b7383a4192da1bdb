use serde_json::{json, Value};

use super::{Ring, ShapeMap};

fn ring_coords(ring: &Ring) -> Value {
    Value::Array(ring.iter().map(|&(r, c)| json!([c, r])).collect())
}

/// GeoJSON-style `FeatureCollection` in pixel coordinates (`[col, row]`).
/// Each feature carries `label`, `area`, `component_id` and `image_id`; the
/// collection records image size, provenance and the optional affine
/// transform as top-level members.
pub fn to_geojson(shape: &ShapeMap) -> Value {
    let image_id = &shape.provenance.image_id;
    let features: Vec<Value> = shape
        .polygons
        .iter()
        .map(|p| {
            let mut rings = vec![ring_coords(&p.exterior)];
            rings.extend(p.holes.iter().map(ring_coords));
            json!({
                "type": "Feature",
                "geometry": { "type": "Polygon", "coordinates": rings },
                "properties": {
                    "label": p.label,
                    "area": p.area,
                    "component_id": p.component_id,
                    "image_id": image_id,
                },
            })
        })
        .collect();
    json!({
        "type": "FeatureCollection",
        "image_id": image_id,
        "height": shape.height,
        "width": shape.width,
        "prompt_config": shape.provenance.prompt_config,
        "transform": shape.provenance.transform,
        "features": features,
    })
}
