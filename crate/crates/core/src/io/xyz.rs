//! Whitespace-separated `x y z [r g b]` text, one point per line.

use std::io::Write;

use crate::point::{Point, PointCloud};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum XyzError {
    #[error("line {line}: cannot parse {token:?}")]
    BadToken { line: usize, token: String },
    #[error("line {line}: expected 3 or 6 fields, found {found}")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: non-finite position")]
    NonFinite { line: usize },
}

/// Blank lines and lines starting with `#` are skipped. Missing colors are white.
pub fn read_xyz(text: &str) -> Result<PointCloud, XyzError> {
    let mut points = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 3 && fields.len() != 6 {
            // report a bad token before a bad count, so "1 2 banana" names the token
            if let Some(t) = fields.iter().find(|t| t.parse::<f64>().is_err()) {
                return Err(XyzError::BadToken { line, token: t.to_string() });
            }
            return Err(XyzError::FieldCount { line, found: fields.len() });
        }
        let coord = |t: &str| t.parse::<f64>().map_err(|_| XyzError::BadToken { line, token: t.to_string() });
        let (x, y, z) = (coord(fields[0])?, coord(fields[1])?, coord(fields[2])?);
        let [r, g, b] = if fields.len() == 6 {
            let channel = |t: &str| t.parse::<u8>().map_err(|_| XyzError::BadToken { line, token: t.to_string() });
            [channel(fields[3])?, channel(fields[4])?, channel(fields[5])?]
        } else {
            [255; 3]
        };
        let p = Point::new(x, y, z, r, g, b);
        if !p.is_finite() {
            return Err(XyzError::NonFinite { line });
        }
        points.push(p);
    }
    Ok(PointCloud::from_points(points).expect("finite points"))
}

/// Writes shortest round-trip decimal coordinates and integer colors.
pub fn write_xyz(cloud: &PointCloud, out: &mut impl Write) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(out);
    for p in cloud.points() {
        writeln!(w, "{} {} {} {} {} {}", p.x, p.y, p.z, p.r, p.g, p.b)?;
    }
    w.flush()
}
