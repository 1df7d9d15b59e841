//! PLY reader (ascii 1.0 and binary_little_endian 1.0) and binary writer.
//!
//! Only the `vertex` element is decoded. Elements declared before it are
//! skipped; anything after it is ignored.

use std::io::Write;

use crate::point::{Point, PointCloud};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlyError {
    #[error("not a PLY file (missing \"ply\" magic line)")]
    NotPly,
    #[error("unsupported PLY format line {0:?}; expected ascii 1.0 or binary_little_endian 1.0")]
    UnsupportedFormat(String),
    #[error("header line {line}: {message}")]
    BadHeader { line: usize, message: String },
    #[error("no vertex element declared")]
    NoVertexElement,
    #[error("vertex property {0:?} missing or not float/double")]
    MissingCoordinate(&'static str),
    #[error("vertex property {0:?} must be uchar")]
    UnsupportedColor(&'static str),
    #[error("element {element:?} declares {expected} entries but the body holds only {found}")]
    Truncated { element: String, expected: u64, found: u64 },
    #[error("body line {line}: cannot parse {token:?}")]
    BadValue { line: usize, token: String },
    #[error("vertex {index} has a non-finite position")]
    NonFinite { index: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 | Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }

    fn read_le(self, b: &[u8]) -> f64 {
        match self {
            Scalar::I8 => b[0] as i8 as f64,
            Scalar::U8 => b[0] as f64,
            Scalar::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::I32 => i32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::U32 => u32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::F32 => f32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::F64 => f64::from_le_bytes(b[..8].try_into().unwrap()),
        }
    }
}

#[derive(Debug, Clone)]
enum Property {
    Scalar(Scalar),
    List { count: Scalar, item: Scalar },
}

#[derive(Debug, Clone)]
struct Element {
    name: String,
    count: u64,
    props: Vec<(String, Property)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Encoding {
    Ascii,
    BinaryLe,
}

struct Header {
    encoding: Encoding,
    elements: Vec<Element>,
    body_start: usize,
}

fn parse_header(data: &[u8]) -> Result<Header, PlyError> {
    let mut pos = 0;
    let mut lines = Vec::new();
    loop {
        let Some(nl) = data[pos..].iter().position(|&b| b == b'\n') else {
            return if lines.is_empty() {
                Err(PlyError::NotPly)
            } else {
                Err(PlyError::BadHeader { line: lines.len() + 1, message: "missing end_header".into() })
            };
        };
        let line = String::from_utf8_lossy(&data[pos..pos + nl]).trim_end_matches('\r').to_string();
        pos += nl + 1;
        if lines.is_empty() && line != "ply" {
            return Err(PlyError::NotPly);
        }
        let done = line.trim() == "end_header";
        lines.push(line);
        if done {
            break;
        }
    }

    let mut encoding = None;
    let mut elements: Vec<Element> = Vec::new();
    for (i, line) in lines.iter().enumerate().skip(1) {
        let bad = |message: &str| PlyError::BadHeader { line: i + 1, message: message.to_string() };
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            [] | ["comment", ..] | ["obj_info", ..] | ["end_header"] => {}
            ["format", kind, version] => {
                encoding = match (*kind, *version) {
                    ("ascii", "1.0") => Some(Encoding::Ascii),
                    ("binary_little_endian", "1.0") => Some(Encoding::BinaryLe),
                    _ => return Err(PlyError::UnsupportedFormat(line.clone())),
                }
            }
            ["format", ..] => return Err(PlyError::UnsupportedFormat(line.clone())),
            ["element", name, count] => {
                let count = count.parse().map_err(|_| bad("element count is not an integer"))?;
                elements.push(Element { name: name.to_string(), count, props: Vec::new() });
            }
            ["property", "list", count, item, name] => {
                let el = elements.last_mut().ok_or_else(|| bad("property before any element"))?;
                let count = Scalar::parse(count).ok_or_else(|| bad("unknown list count type"))?;
                let item = Scalar::parse(item).ok_or_else(|| bad("unknown list item type"))?;
                el.props.push((name.to_string(), Property::List { count, item }));
            }
            ["property", ty, name] => {
                let el = elements.last_mut().ok_or_else(|| bad("property before any element"))?;
                let ty = Scalar::parse(ty).ok_or_else(|| bad("unknown property type"))?;
                el.props.push((name.to_string(), Property::Scalar(ty)));
            }
            _ => return Err(bad("unrecognized header line")),
        }
    }
    let encoding = encoding.ok_or(PlyError::BadHeader { line: 2, message: "missing format line".into() })?;
    Ok(Header { encoding, elements, body_start: pos })
}

/// Column positions of the fields we decode.
struct VertexLayout {
    xyz: [usize; 3],
    rgb: Option<[usize; 3]>,
}

fn vertex_layout(el: &Element) -> Result<VertexLayout, PlyError> {
    let find = |name: &str| el.props.iter().position(|(n, _)| n == name);
    let mut xyz = [0; 3];
    for (slot, name) in xyz.iter_mut().zip(["x", "y", "z"]) {
        match find(name).map(|i| (i, &el.props[i].1)) {
            Some((i, Property::Scalar(Scalar::F32 | Scalar::F64))) => *slot = i,
            _ => return Err(PlyError::MissingCoordinate(name)),
        }
    }
    let mut rgb = [0; 3];
    let mut present = 0;
    for (slot, name) in rgb.iter_mut().zip(["red", "green", "blue"]) {
        if let Some(i) = find(name) {
            if !matches!(el.props[i].1, Property::Scalar(Scalar::U8)) {
                return Err(PlyError::UnsupportedColor(name));
            }
            *slot = i;
            present += 1;
        }
    }
    Ok(VertexLayout { xyz, rgb: (present == 3).then_some(rgb) })
}

fn make_point(values: &[f64], layout: &VertexLayout, index: u64) -> Result<Point, PlyError> {
    let [x, y, z] = layout.xyz.map(|i| values[i]);
    let [r, g, b] = layout.rgb.map_or([255; 3], |c| c.map(|i| values[i] as u8));
    let p = Point::new(x, y, z, r, g, b);
    if !p.is_finite() {
        return Err(PlyError::NonFinite { index });
    }
    Ok(p)
}

pub fn read_ply(data: &[u8]) -> Result<PointCloud, PlyError> {
    let header = parse_header(data)?;
    let vertex_at = header.elements.iter().position(|e| e.name == "vertex").ok_or(PlyError::NoVertexElement)?;
    let layout = vertex_layout(&header.elements[vertex_at])?;
    let body = &data[header.body_start..];
    let points = match header.encoding {
        Encoding::Ascii => read_ascii(body, &header.elements[..=vertex_at], &layout)?,
        Encoding::BinaryLe => read_binary(body, &header.elements[..=vertex_at], &layout)?,
    };
    Ok(PointCloud::from_points(points).expect("finite points"))
}

fn read_ascii(body: &[u8], elements: &[Element], layout: &VertexLayout) -> Result<Vec<Point>, PlyError> {
    let text = String::from_utf8_lossy(body);
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (vertex, skipped) = elements.split_last().expect("vertex element");
    for el in skipped {
        for found in 0..el.count {
            if lines.next().is_none() {
                return Err(PlyError::Truncated { element: el.name.clone(), expected: el.count, found });
            }
        }
    }
    let mut points = Vec::with_capacity(vertex.count.min(1 << 24) as usize);
    let mut values = vec![0.0; vertex.props.len()];
    for index in 0..vertex.count {
        let Some((line_no, line)) = lines.next() else {
            return Err(PlyError::Truncated { element: vertex.name.clone(), expected: vertex.count, found: index });
        };
        let mut tokens = line.split_whitespace();
        let mut next = || -> Result<f64, PlyError> {
            let t = tokens.next().ok_or_else(|| PlyError::BadValue { line: line_no + 1, token: String::new() })?;
            t.parse().map_err(|_| PlyError::BadValue { line: line_no + 1, token: t.to_string() })
        };
        for (slot, (_, prop)) in values.iter_mut().zip(&vertex.props) {
            match prop {
                Property::Scalar(_) => *slot = next()?,
                Property::List { .. } => {
                    let n = next()? as usize;
                    for _ in 0..n {
                        next()?;
                    }
                }
            }
        }
        points.push(make_point(&values, layout, index)?);
    }
    Ok(points)
}

fn read_binary(body: &[u8], elements: &[Element], layout: &VertexLayout) -> Result<Vec<Point>, PlyError> {
    let mut pos = 0usize;
    let (vertex, skipped) = elements.split_last().expect("vertex element");
    // Reads one entry; returns false if the body ran out.
    let mut entry = |el: &Element, values: &mut [f64]| -> bool {
        for (slot, (_, prop)) in values.iter_mut().zip(&el.props) {
            match *prop {
                Property::Scalar(s) => {
                    let Some(b) = body.get(pos..pos + s.size()) else { return false };
                    *slot = s.read_le(b);
                    pos += s.size();
                }
                Property::List { count, item } => {
                    let Some(b) = body.get(pos..pos + count.size()) else { return false };
                    let n = count.read_le(b) as usize;
                    pos += count.size() + n * item.size();
                    if pos > body.len() {
                        return false;
                    }
                }
            }
        }
        true
    };
    for el in skipped {
        let mut scratch = vec![0.0; el.props.len()];
        for found in 0..el.count {
            if !entry(el, &mut scratch) {
                return Err(PlyError::Truncated { element: el.name.clone(), expected: el.count, found });
            }
        }
    }
    let mut points = Vec::with_capacity(vertex.count.min(1 << 24) as usize);
    let mut values = vec![0.0; vertex.props.len()];
    for index in 0..vertex.count {
        if !entry(vertex, &mut values) {
            return Err(PlyError::Truncated { element: vertex.name.clone(), expected: vertex.count, found: index });
        }
        points.push(make_point(&values, layout, index)?);
    }
    Ok(points)
}

/// Binary little-endian PLY with double x, y, z and uchar red, green, blue.
pub fn write_ply(cloud: &PointCloud, out: &mut impl Write) -> std::io::Result<()> {
    write!(
        out,
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\n\
         property double x\nproperty double y\nproperty double z\n\
         property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n",
        cloud.len()
    )?;
    let mut buf = Vec::with_capacity(cloud.len() * 27);
    for p in cloud.points() {
        buf.extend_from_slice(&p.x.to_le_bytes());
        buf.extend_from_slice(&p.y.to_le_bytes());
        buf.extend_from_slice(&p.z.to_le_bytes());
        buf.extend_from_slice(&[p.r, p.g, p.b]);
    }
    out.write_all(&buf)
}
