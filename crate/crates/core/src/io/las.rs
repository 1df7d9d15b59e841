//! Uncompressed LAS 1.2 to 1.4, point record formats 0-3 and 6-8.

use crate::point::{Point, PointCloud};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LasError {
    #[error("byte 0: not a LAS file (signature {found:?}, expected \"LASF\")")]
    BadSignature { found: Vec<u8> },
    #[error("byte {offset}: unsupported point record format {format}")]
    UnsupportedFormat { format: u8, offset: usize },
    #[error("byte {offset}: point record length {length} is shorter than format {format} requires ({required})")]
    RecordTooShort { format: u8, length: u16, required: u16, offset: usize },
    #[error("byte {offset}: truncated {what} (need {needed} bytes, {available} available)")]
    Truncated { what: &'static str, offset: usize, needed: usize, available: usize },
    #[error("point {index} at byte {offset} decodes to a non-finite position")]
    NonFinite { index: u64, offset: usize },
}

/// Header fields needed to decode points.
#[derive(Debug, Clone, PartialEq)]
pub struct LasHeader {
    pub version: (u8, u8),
    pub point_data_offset: u32,
    pub point_format: u8,
    pub record_length: u16,
    pub point_count: u64,
    pub scale: [f64; 3],
    pub offset: [f64; 3],
}

/// Minimum LAS public header size (1.0-1.2).
const HEADER_MIN: usize = 227;

fn bytes<const N: usize>(data: &[u8], at: usize, what: &'static str) -> Result<[u8; N], LasError> {
    data.get(at..at + N)
        .map(|s| s.try_into().expect("slice length"))
        .ok_or(LasError::Truncated { what, offset: at, needed: N, available: data.len().saturating_sub(at) })
}

fn u16_at(d: &[u8], at: usize, what: &'static str) -> Result<u16, LasError> {
    bytes::<2>(d, at, what).map(u16::from_le_bytes)
}

fn u32_at(d: &[u8], at: usize, what: &'static str) -> Result<u32, LasError> {
    bytes::<4>(d, at, what).map(u32::from_le_bytes)
}

fn u64_at(d: &[u8], at: usize, what: &'static str) -> Result<u64, LasError> {
    bytes::<8>(d, at, what).map(u64::from_le_bytes)
}

fn f64_at(d: &[u8], at: usize, what: &'static str) -> Result<f64, LasError> {
    bytes::<8>(d, at, what).map(f64::from_le_bytes)
}

/// Record layout: minimum length and where RGB lives, if present.
fn layout(format: u8) -> Option<(u16, Option<usize>)> {
    Some(match format {
        0 => (20, None),
        1 => (28, None),
        2 => (26, Some(20)),
        3 => (34, Some(28)),
        6 => (30, None),
        7 => (36, Some(30)),
        8 => (38, Some(30)),
        _ => return None,
    })
}

pub fn read_header(data: &[u8]) -> Result<LasHeader, LasError> {
    if data.get(..4) != Some(b"LASF") {
        return Err(LasError::BadSignature { found: data.iter().take(4).copied().collect() });
    }
    if data.len() < HEADER_MIN {
        return Err(LasError::Truncated { what: "public header", offset: 0, needed: HEADER_MIN, available: data.len() });
    }
    let version = (data[24], data[25]);
    let point_data_offset = u32_at(data, 96, "point data offset")?;
    let point_format = data[104];
    let record_length = u16_at(data, 105, "point record length")?;
    let legacy_count = u32_at(data, 107, "point count")? as u64;
    let point_count = if version >= (1, 4) && legacy_count == 0 {
        u64_at(data, 247, "LAS 1.4 point count")?
    } else {
        legacy_count
    };
    let scale = [f64_at(data, 131, "x scale")?, f64_at(data, 139, "y scale")?, f64_at(data, 147, "z scale")?];
    let offset = [f64_at(data, 155, "x offset")?, f64_at(data, 163, "y offset")?, f64_at(data, 171, "z offset")?];

    let Some((required, _)) = layout(point_format) else {
        return Err(LasError::UnsupportedFormat { format: point_format, offset: 104 });
    };
    if record_length < required {
        return Err(LasError::RecordTooShort { format: point_format, length: record_length, required, offset: 105 });
    }
    Ok(LasHeader { version, point_data_offset, point_format, record_length, point_count, scale, offset })
}

/// Decodes all point records. 16-bit colors keep their high byte; formats
/// without RGB become gray from the intensity's high byte.
pub fn read_las(data: &[u8]) -> Result<PointCloud, LasError> {
    let header = read_header(data)?;
    let (_, rgb_at) = layout(header.point_format).expect("validated format");
    let start = header.point_data_offset as usize;
    let stride = header.record_length as usize;
    let mut points = Vec::with_capacity(header.point_count.min(1 << 24) as usize);
    for i in 0..header.point_count {
        let at = start + i as usize * stride;
        let Some(rec) = data.get(at..at + stride) else {
            return Err(LasError::Truncated {
                what: "point record",
                offset: at,
                needed: stride,
                available: data.len().saturating_sub(at),
            });
        };
        let raw = |k: usize| i32::from_le_bytes(rec[4 * k..4 * k + 4].try_into().expect("4 bytes")) as f64;
        let x = raw(0) * header.scale[0] + header.offset[0];
        let y = raw(1) * header.scale[1] + header.offset[1];
        let z = raw(2) * header.scale[2] + header.offset[2];
        let (r, g, b) = match rgb_at {
            Some(c) => (rec[c + 1], rec[c + 3], rec[c + 5]),
            None => {
                let gray = rec[13];
                (gray, gray, gray)
            }
        };
        let p = Point::new(x, y, z, r, g, b);
        if !p.is_finite() {
            return Err(LasError::NonFinite { index: i, offset: at });
        }
        points.push(p);
    }
    Ok(PointCloud::from_points(points).expect("finite points"))
}
