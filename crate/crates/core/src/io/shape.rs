//! `ShapeSpec` as a flat `key=value` block, one pair per line. Blank lines
//! and `#` comments are ignored; omitted keys take their defaults.

use crate::error::{parse_err, Result};
use crate::masks::{ShapeKind, ShapeSpec};

pub fn format_shape(spec: &ShapeSpec) -> String {
    format!(
        "kind={}\narea_fraction={}\naspect_ratio={}\norientation_deg={}\nsuperellipse_exponent={}\nsector_extent_deg={}\n",
        spec.kind,
        spec.area_fraction,
        spec.aspect_ratio,
        spec.orientation_deg,
        spec.superellipse_exponent,
        spec.sector_extent_deg
    )
}

pub fn parse_shape(text: &str) -> Result<ShapeSpec> {
    let mut kind = None;
    let mut fraction = None;
    let mut spec = ShapeSpec::pie_sector(1.0);
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(format!("line {}: expected key=value", i + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        let number = || {
            value
                .parse::<f64>()
                .map_err(|_| parse_err(format!("line {}: '{value}' is not a number", i + 1)))
        };
        match key {
            "kind" => kind = Some(value.parse::<ShapeKind>().map_err(|e| parse_err(e.to_string()))?),
            "area_fraction" => fraction = Some(number()?),
            "aspect_ratio" => spec.aspect_ratio = number()?,
            "orientation_deg" => spec.orientation_deg = number()?,
            "superellipse_exponent" => spec.superellipse_exponent = number()?,
            "sector_extent_deg" => spec.sector_extent_deg = number()?,
            other => return Err(parse_err(format!("line {}: unknown key '{other}'", i + 1))),
        }
    }
    spec.kind = kind.ok_or_else(|| parse_err("missing key 'kind'"))?;
    spec.area_fraction = fraction.ok_or_else(|| parse_err("missing key 'area_fraction'"))?;
    spec.validate().map_err(|e| parse_err(e.to_string()))?;
    Ok(spec)
}
