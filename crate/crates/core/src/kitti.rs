//! KITTI object label files.
//!
//! One object per line, whitespace separated:
//!
//! ```text
//! type truncated occluded alpha left top right bottom height width length x y z rotation_y [score]
//! ```
//!
//! Numbers are written with two decimals. Orientation columns are wrapped
//! onto `[-π, π)` on read, except on `DontCare` rows whose sentinel values
//! are kept verbatim.

use std::fmt::Write as _;

use crate::angle::{alpha_to_roty, circular_diff, wrap_radians, Angle, ObjectLocation};
use crate::error::{OrientError, Result};

pub const DONT_CARE: &str = "DontCare";

const COLUMN_NAMES: [&str; 16] = [
    "type",
    "truncated",
    "occluded",
    "alpha",
    "bbox_left",
    "bbox_top",
    "bbox_right",
    "bbox_bottom",
    "height",
    "width",
    "length",
    "x",
    "y",
    "z",
    "rotation_y",
    "score",
];

/// One object row of a KITTI label file.
#[derive(Debug, Clone, PartialEq)]
pub struct KittiLabel {
    pub object_type: String,
    pub truncated: f64,
    pub occluded: i32,
    /// Observation angle in radians. Canonical except on `DontCare` rows.
    pub alpha: f64,
    /// `[left, top, right, bottom]` in pixels.
    pub bbox: [f64; 4],
    /// `[height, width, length]` in meters.
    pub dimensions: [f64; 3],
    /// `[x, y, z]` in camera coordinates, meters.
    pub location: [f64; 3],
    /// Global yaw in radians. Canonical except on `DontCare` rows.
    pub rotation_y: f64,
    /// Detection score, present in prediction files.
    pub score: Option<f64>,
}

impl KittiLabel {
    pub fn is_dont_care(&self) -> bool {
        self.object_type == DONT_CARE
    }

    pub fn alpha_angle(&self) -> Result<Angle> {
        Angle::wrap(self.alpha)
    }

    pub fn rotation_y_angle(&self) -> Result<Angle> {
        Angle::wrap(self.rotation_y)
    }

    /// Ground-plane position used by the alpha / rotation_y conversion.
    pub fn ground_location(&self) -> ObjectLocation {
        ObjectLocation::new(self.location[0], self.location[2])
    }
}

/// Parses the contents of a label file.
pub fn parse_label_file(text: &str) -> Result<Vec<KittiLabel>> {
    Ok(parse_numbered(text)?.into_iter().map(|(_, l)| l).collect())
}

/// Like [`parse_label_file`], keeping each label's 1-based line number.
pub fn parse_numbered(text: &str) -> Result<Vec<(usize, KittiLabel)>> {
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| Ok((i + 1, parse_line(line, i + 1)?)))
        .collect()
}

fn parse_line(line: &str, lineno: usize) -> Result<KittiLabel> {
    let cols: Vec<&str> = line.split_whitespace().collect();
    if cols.len() != 15 && cols.len() != 16 {
        return Err(OrientError::Parse {
            line: lineno,
            message: format!("expected 15 or 16 columns, found {}", cols.len()),
        });
    }
    let num = |idx: usize| -> Result<f64> {
        let raw = cols[idx];
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(OrientError::Parse {
                line: lineno,
                message: format!(
                    "column {} ({}): `{raw}` is not a finite number",
                    idx + 1,
                    COLUMN_NAMES[idx]
                ),
            }),
        }
    };
    let object_type = cols[0].to_string();
    let dont_care = object_type == DONT_CARE;
    let occluded = cols[2].parse::<i32>().map_err(|_| OrientError::Parse {
        line: lineno,
        message: format!("column 3 (occluded): `{}` is not an integer", cols[2]),
    })?;
    let ingest_angle = |idx: usize| -> Result<f64> {
        let raw = num(idx)?;
        if dont_care {
            return Ok(raw);
        }
        let w = wrap_radians(raw);
        if raw < -std::f64::consts::PI || raw > std::f64::consts::PI {
            log::warn!(
                "line {lineno}: {} = {raw} outside [-pi, pi], wrapped to {w}",
                COLUMN_NAMES[idx]
            );
        }
        Ok(w)
    };
    let label = KittiLabel {
        object_type,
        truncated: num(1)?,
        occluded,
        alpha: ingest_angle(3)?,
        bbox: [num(4)?, num(5)?, num(6)?, num(7)?],
        dimensions: [num(8)?, num(9)?, num(10)?],
        location: [num(11)?, num(12)?, num(13)?],
        rotation_y: ingest_angle(14)?,
        score: if cols.len() == 16 { Some(num(15)?) } else { None },
    };
    let [left, top, right, bottom] = label.bbox;
    if right < left || bottom < top {
        return Err(OrientError::Parse {
            line: lineno,
            message: format!("bbox [{left}, {top}, {right}, {bottom}] has negative extent"),
        });
    }
    Ok(label)
}

/// Serializes labels, one per line, numbers with two decimals.
pub fn write_label_file(labels: &[KittiLabel]) -> String {
    let mut out = String::new();
    for l in labels {
        let _ = write!(out, "{} {:.2} {} {:.2}", l.object_type, l.truncated, l.occluded, l.alpha);
        for v in l.bbox.iter().chain(&l.dimensions).chain(&l.location) {
            let _ = write!(out, " {v:.2}");
        }
        let _ = write!(out, " {:.2}", l.rotation_y);
        if let Some(s) = l.score {
            let _ = write!(out, " {s:.2}");
        }
        out.push('\n');
    }
    out
}

/// Rows whose type token equals `class_name`, in input order.
pub fn filter_class(labels: &[KittiLabel], class_name: &str) -> Vec<KittiLabel> {
    labels.iter().filter(|l| l.object_type == class_name).cloned().collect()
}

/// Whether `rotation_y` agrees with `alpha + atan(x / z)` within `tol`
/// radians.
pub fn check_label_consistency(label: &KittiLabel, tol: f64) -> Result<bool> {
    let implied = alpha_to_roty(label.alpha_angle()?, label.ground_location())?;
    Ok(circular_diff(label.rotation_y_angle()?, implied).abs() <= tol)
}
