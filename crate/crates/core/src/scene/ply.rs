//! Binary little-endian splat PLY files.
//!
//! Per-vertex properties: `x y z`, `f_dc_0..2`, optional `f_rest_*` (channel
//! major, 3 x (k - 1) entries), `opacity` (logit), `scale_0..2` (log) and
//! `rot_0..3` (w, x, y, z). A header line `comment crossrig_linear 1` marks
//! files whose opacity and scale are already linear.

use std::io::Write;
use std::path::Path;

use nalgebra::{Quaternion, UnitQuaternion, Vector3};

use super::{Gaussian3D, SceneError};

/// Gaussians below this opacity are dropped at load.
pub const MIN_OPACITY: f64 = 1.0 / 255.0;

const LINEAR_FLAG: &str = "crossrig_linear 1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PropType {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl PropType {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "char" | "int8" => Self::I8,
            "uchar" | "uint8" => Self::U8,
            "short" | "int16" => Self::I16,
            "ushort" | "uint16" => Self::U16,
            "int" | "int32" => Self::I32,
            "uint" | "uint32" => Self::U32,
            "float" | "float32" => Self::F32,
            "double" | "float64" => Self::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Self::I8 | Self::U8 => 1,
            Self::I16 | Self::U16 => 2,
            Self::I32 | Self::U32 | Self::F32 => 4,
            Self::F64 => 8,
        }
    }

    fn read(self, b: &[u8]) -> f64 {
        match self {
            Self::I8 => b[0] as i8 as f64,
            Self::U8 => b[0] as f64,
            Self::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            Self::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            Self::I32 => i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Self::U32 => u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Self::F32 => f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Self::F64 => f64::from_le_bytes(b[..8].try_into().expect("8 bytes")),
        }
    }
}

struct Element {
    name: String,
    count: usize,
    props: Vec<(String, PropType)>,
}

struct Header {
    elements: Vec<Element>,
    linear: bool,
    body_offset: usize,
}

fn parse_err(message: impl Into<String>) -> SceneError {
    SceneError::Parse {
        source_name: "ply".into(),
        message: message.into(),
    }
}

fn parse_header(bytes: &[u8]) -> Result<Header, SceneError> {
    const END: &[u8] = b"end_header";
    let end = bytes
        .windows(END.len())
        .position(|w| w == END)
        .ok_or_else(|| parse_err("missing end_header"))?;
    let mut body_offset = end + END.len();
    if bytes.get(body_offset) == Some(&b'\r') {
        body_offset += 1;
    }
    if bytes.get(body_offset) != Some(&b'\n') {
        return Err(parse_err("end_header not followed by newline"));
    }
    body_offset += 1;
    let text = std::str::from_utf8(&bytes[..end]).map_err(|_| parse_err("header is not UTF-8"))?;
    let mut lines = text.lines().map(str::trim);
    if lines.next() != Some("ply") {
        return Err(parse_err("missing ply magic"));
    }
    let mut elements: Vec<Element> = Vec::new();
    let mut linear = false;
    let mut format_ok = false;
    for line in lines {
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("format") => {
                if tok.next() != Some("binary_little_endian") {
                    return Err(parse_err(format!("unsupported format line {line:?}")));
                }
                format_ok = true;
            }
            Some("comment") => {
                let rest = line["comment".len()..].trim();
                if rest == LINEAR_FLAG {
                    linear = true;
                }
            }
            Some("obj_info") | None => {}
            Some("element") => {
                let name = tok
                    .next()
                    .ok_or_else(|| parse_err("element without name"))?;
                let count = tok
                    .next()
                    .and_then(|c| c.parse().ok())
                    .ok_or_else(|| parse_err(format!("bad element count in {line:?}")))?;
                elements.push(Element {
                    name: name.to_string(),
                    count,
                    props: Vec::new(),
                });
            }
            Some("property") => {
                let ty = tok
                    .next()
                    .ok_or_else(|| parse_err("property without type"))?;
                if ty == "list" {
                    return Err(parse_err("list properties are not supported"));
                }
                let ty = PropType::parse(ty)
                    .ok_or_else(|| parse_err(format!("unknown property type {ty:?}")))?;
                let name = tok
                    .next()
                    .ok_or_else(|| parse_err("property without name"))?;
                elements
                    .last_mut()
                    .ok_or_else(|| parse_err("property before element"))?
                    .props
                    .push((name.to_string(), ty));
            }
            Some(other) => return Err(parse_err(format!("unexpected header keyword {other:?}"))),
        }
    }
    if !format_ok {
        return Err(parse_err("missing format line"));
    }
    Ok(Header {
        elements,
        linear,
        body_offset,
    })
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Parses splat PLY bytes. Returns the kept Gaussians and the number dropped
/// for low opacity.
pub fn parse_gaussian_ply(bytes: &[u8]) -> Result<(Vec<Gaussian3D<f64>>, usize), SceneError> {
    let header = parse_header(bytes)?;
    let mut offset = header.body_offset;
    let mut vertex: Option<(&Element, usize)> = None;
    for el in &header.elements {
        let stride: usize = el.props.iter().map(|(_, t)| t.size()).sum();
        if el.name == "vertex" {
            vertex = Some((el, offset));
        }
        offset += stride * el.count;
    }
    if offset > bytes.len() {
        return Err(parse_err(format!(
            "truncated body: need {offset} bytes, have {}",
            bytes.len()
        )));
    }
    let (el, start) = vertex.ok_or_else(|| parse_err("no vertex element"))?;
    let find = |name: &str| -> Result<usize, SceneError> {
        el.props
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| parse_err(format!("missing vertex property {name:?}")))
    };
    let pos = [find("x")?, find("y")?, find("z")?];
    let dc = [find("f_dc_0")?, find("f_dc_1")?, find("f_dc_2")?];
    let opacity = find("opacity")?;
    let scale = [find("scale_0")?, find("scale_1")?, find("scale_2")?];
    let rot = [
        find("rot_0")?,
        find("rot_1")?,
        find("rot_2")?,
        find("rot_3")?,
    ];
    let mut rest = Vec::new();
    while let Ok(i) = find(&format!("f_rest_{}", rest.len())) {
        rest.push(i);
    }
    if ![0, 9, 24, 45].contains(&rest.len()) {
        return Err(parse_err(format!(
            "{} f_rest properties; expected 0, 9, 24 or 45",
            rest.len()
        )));
    }
    let per_channel = rest.len() / 3;

    let offsets: Vec<usize> = el
        .props
        .iter()
        .scan(0, |acc, (_, t)| {
            let o = *acc;
            *acc += t.size();
            Some(o)
        })
        .collect();
    let stride: usize = el.props.iter().map(|(_, t)| t.size()).sum();

    let mut out = Vec::with_capacity(el.count);
    let mut dropped = 0;
    for index in 0..el.count {
        let row = &bytes[start + index * stride..start + (index + 1) * stride];
        let get = |p: usize| el.props[p].1.read(&row[offsets[p]..]);
        let mut sh = vec![[get(dc[0]), get(dc[1]), get(dc[2])]];
        for k in 0..per_channel {
            sh.push([
                get(rest[k]),
                get(rest[per_channel + k]),
                get(rest[2 * per_channel + k]),
            ]);
        }
        let raw_opacity = get(opacity);
        let raw_scale = Vector3::new(get(scale[0]), get(scale[1]), get(scale[2]));
        let (alpha, s) = if header.linear {
            (raw_opacity, raw_scale)
        } else {
            (sigmoid(raw_opacity), raw_scale.map(f64::exp))
        };
        let q = Quaternion::new(get(rot[0]), get(rot[1]), get(rot[2]), get(rot[3]));
        if !(q.norm() > 1e-12) {
            return Err(SceneError::Invariant {
                what: "rotation quaternion has zero norm".into(),
                index,
            });
        }
        if alpha < MIN_OPACITY {
            dropped += 1;
            continue;
        }
        let g = Gaussian3D {
            mean: Vector3::new(get(pos[0]), get(pos[1]), get(pos[2])),
            scale: s,
            rotation: UnitQuaternion::new_normalize(q),
            opacity: alpha,
            sh,
        };
        g.check().map_err(|what| SceneError::Invariant {
            what: what.to_string(),
            index,
        })?;
        out.push(g);
    }
    Ok((out, dropped))
}

pub fn read_gaussian_ply(path: impl AsRef<Path>) -> Result<Vec<Gaussian3D<f64>>, SceneError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| SceneError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let (gaussians, dropped) = parse_gaussian_ply(&bytes).map_err(|e| match e {
        SceneError::Parse { message, .. } => SceneError::Parse {
            source_name: path.display().to_string(),
            message,
        },
        other => other,
    })?;
    if dropped > 0 {
        log::debug!(
            "{}: dropped {dropped} low-opacity gaussians",
            path.display()
        );
    }
    Ok(gaussians)
}

/// Serializes Gaussians as float32 splat PLY. With `linear` the opacity and
/// scale are stored as-is and the header carries the linear flag.
pub fn encode_gaussian_ply(gaussians: &[Gaussian3D<f64>], linear: bool) -> Vec<u8> {
    let per_channel = gaussians.iter().map(|g| g.sh.len()).max().unwrap_or(1) - 1;
    let mut out = Vec::new();
    let _ = writeln!(out, "ply\nformat binary_little_endian 1.0");
    if linear {
        let _ = writeln!(out, "comment {LINEAR_FLAG}");
    }
    let _ = writeln!(out, "element vertex {}", gaussians.len());
    let mut names: Vec<String> = ["x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    names.extend((0..per_channel * 3).map(|i| format!("f_rest_{i}")));
    names.extend(
        [
            "opacity", "scale_0", "scale_1", "scale_2", "rot_0", "rot_1", "rot_2", "rot_3",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    for n in &names {
        let _ = writeln!(out, "property float {n}");
    }
    let _ = writeln!(out, "end_header");
    for g in gaussians {
        let mut row: Vec<f64> = vec![g.mean.x, g.mean.y, g.mean.z];
        row.extend_from_slice(&g.sh[0]);
        for c in 0..3 {
            for k in 0..per_channel {
                row.push(g.sh.get(k + 1).map_or(0.0, |v| v[c]));
            }
        }
        if linear {
            row.push(g.opacity);
            row.extend(g.scale.iter());
        } else {
            let o = g.opacity.clamp(1e-7, 1.0 - 1e-7);
            row.push((o / (1.0 - o)).ln());
            row.extend(g.scale.iter().map(|s| s.ln()));
        }
        let q = g.rotation.quaternion();
        row.extend([q.w, q.i, q.j, q.k]);
        for v in row {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    out
}

pub fn write_gaussian_ply(
    path: impl AsRef<Path>,
    gaussians: &[Gaussian3D<f64>],
    linear: bool,
) -> Result<(), SceneError> {
    let path = path.as_ref();
    std::fs::write(path, encode_gaussian_ply(gaussians, linear)).map_err(|source| SceneError::Io {
        path: path.to_path_buf(),
        source,
    })
}
