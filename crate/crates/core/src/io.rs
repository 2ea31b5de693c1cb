//! On-disk formats: binary fields, PNG previews, CSV profiles and JSON records.
//!
//! Binary field layout (all little-endian):
//!
//! | offset | size | content                                  |
//! |--------|------|------------------------------------------|
//! | 0      | 8    | magic `PBNFFLD1`                         |
//! | 8      | 8    | `nx` as u64                              |
//! | 16     | 8    | `ny` as u64                              |
//! | 24     | 8    | `dx` as f64 (meters)                     |
//! | 32     | 8    | `dy` as f64 (meters)                     |
//! | 40     | 1    | kind: 0 complex, 1 real                  |
//! | 41     | 7    | zero                                     |
//! | 48     | ...  | samples, row-major (`j` outer, `i` inner) |
//!
//! Complex samples are `(re, im)` f64 pairs; real samples are single f64.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{ComplexField, GridSpec, LineProfile};
use crate::zpcih::Hologram;

pub const MAGIC: &[u8; 8] = b"PBNFFLD1";
pub const HEADER_LEN: usize = 48;

const KIND_COMPLEX: u8 = 0;
const KIND_REAL: u8 = 1;

/// Decoded contents of a field file.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldData {
    Complex(ComplexField),
    Real(GridSpec, Vec<f64>),
}

impl FieldData {
    pub fn grid(&self) -> &GridSpec {
        match self {
            FieldData::Complex(f) => f.grid(),
            FieldData::Real(g, _) => g,
        }
    }

    /// Real data is promoted with zero imaginary part.
    pub fn into_complex(self) -> Result<ComplexField> {
        match self {
            FieldData::Complex(f) => Ok(f),
            FieldData::Real(g, v) => ComplexField::from_real(g, &v),
        }
    }
}

fn header(grid: &GridSpec, kind: u8) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(grid.nx() as u64).to_le_bytes());
    out.extend_from_slice(&(grid.ny() as u64).to_le_bytes());
    out.extend_from_slice(&grid.dx().to_le_bytes());
    out.extend_from_slice(&grid.dy().to_le_bytes());
    out.push(kind);
    out.extend_from_slice(&[0u8; 7]);
    out
}

pub fn field_to_bytes(f: &ComplexField) -> Vec<u8> {
    let mut out = header(f.grid(), KIND_COMPLEX);
    out.reserve(16 * f.data().len());
    for z in f.data() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

pub fn real_to_bytes(grid: &GridSpec, values: &[f64]) -> Result<Vec<u8>> {
    if values.len() != grid.len() {
        return Err(Error::Grid(format!(
            "{} values for a {}x{} grid",
            values.len(),
            grid.nx(),
            grid.ny()
        )));
    }
    let mut out = header(grid, KIND_REAL);
    out.reserve(8 * values.len());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

fn f64_at(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().unwrap())
}

fn u64_at(bytes: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap())
}

pub fn field_from_bytes(bytes: &[u8]) -> Result<FieldData> {
    if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
        return Err(Error::Format("not a field file (bad magic)".into()));
    }
    let nx = usize::try_from(u64_at(bytes, 8)).map_err(|_| Error::Format("nx overflows".into()))?;
    let ny =
        usize::try_from(u64_at(bytes, 16)).map_err(|_| Error::Format("ny overflows".into()))?;
    let grid = GridSpec::new(nx, ny, f64_at(bytes, 24), f64_at(bytes, 32))
        .map_err(|e| Error::Format(format!("bad header: {e}")))?;
    let kind = bytes[40];
    let width = match kind {
        KIND_COMPLEX => 16,
        KIND_REAL => 8,
        k => return Err(Error::Format(format!("unknown sample kind {k}"))),
    };
    let body = &bytes[HEADER_LEN..];
    let expected = grid
        .len()
        .checked_mul(width)
        .ok_or_else(|| Error::Format("grid too large".into()))?;
    if body.len() != expected {
        return Err(Error::Format(format!(
            "payload is {} bytes, header implies {expected}",
            body.len()
        )));
    }
    let fmt = |e: Error| Error::Format(format!("bad samples: {e}"));
    if kind == KIND_REAL {
        let v: Vec<f64> = (0..grid.len()).map(|k| f64_at(body, 8 * k)).collect();
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Format("non-finite sample".into()));
        }
        Ok(FieldData::Real(grid, v))
    } else {
        let v: Vec<Complex64> = (0..grid.len())
            .map(|k| Complex64::new(f64_at(body, 16 * k), f64_at(body, 16 * k + 8)))
            .collect();
        ComplexField::from_vec(grid, v)
            .map(FieldData::Complex)
            .map_err(fmt)
    }
}

fn with_path(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(
        e.kind(),
        format!("{}: {e}", path.display()),
    ))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| with_path(path, e))
}

pub fn write_field(path: &Path, f: &ComplexField) -> Result<()> {
    write_bytes(path, &field_to_bytes(f))
}

pub fn read_field_data(path: &Path) -> Result<FieldData> {
    field_from_bytes(&fs::read(path).map_err(|e| with_path(path, e))?)
}

/// Reads either kind as a complex field.
pub fn read_field(path: &Path) -> Result<ComplexField> {
    read_field_data(path)?.into_complex()
}

pub fn write_hologram(path: &Path, h: &Hologram) -> Result<()> {
    write_bytes(path, &real_to_bytes(h.grid(), h.data())?)
}

pub fn read_hologram(path: &Path) -> Result<Hologram> {
    match read_field_data(path)? {
        FieldData::Real(g, v) => Hologram::new(g, v),
        FieldData::Complex(_) => Err(Error::Format(format!(
            "{} holds a complex field, expected a real hologram",
            path.display()
        ))),
    }
}

/// 8-bit grayscale, scaled so the maximum maps to 255. Row `j = 0` is the top
/// image row.
pub fn png_bytes(grid: &GridSpec, values: &[f64]) -> Result<Vec<u8>> {
    let (w, h) = (grid.nx(), grid.ny());
    if values.len() != w * h {
        return Err(Error::Grid(format!(
            "{} values for a {w}x{h} image",
            values.len()
        )));
    }
    let max = values.iter().cloned().fold(0.0, f64::max);
    let pixels: Vec<u8> = values
        .iter()
        .map(|&v| {
            if max > 0.0 {
                (255.0 * v.max(0.0) / max).round() as u8
            } else {
                0
            }
        })
        .collect();
    let img = image::GrayImage::from_raw(w as u32, h as u32, pixels)
        .ok_or_else(|| Error::Format("image buffer size mismatch".into()))?;
    let mut out = std::io::Cursor::new(Vec::new());
    img.write_to(&mut out, image::ImageFormat::Png)
        .map_err(|e| Error::Format(format!("png encode: {e}")))?;
    Ok(out.into_inner())
}

pub fn write_png(path: &Path, grid: &GridSpec, values: &[f64]) -> Result<()> {
    write_bytes(path, &png_bytes(grid, values)?)
}

/// Intensity preview of a complex field.
pub fn write_intensity_png(path: &Path, f: &ComplexField) -> Result<()> {
    write_png(path, f.grid(), &f.intensity())
}

#[derive(Serialize)]
struct ProfileRow {
    position_m: f64,
    intensity: f64,
}

pub fn profile_csv(profile: &LineProfile) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for (&position_m, &intensity) in profile.positions.iter().zip(&profile.intensity) {
        w.serialize(ProfileRow {
            position_m,
            intensity,
        })
        .map_err(|e| Error::Format(format!("csv: {e}")))?;
    }
    w.into_inner()
        .map_err(|e| Error::Format(format!("csv: {e}")))
}

pub fn write_profile_csv(path: &Path, profile: &LineProfile) -> Result<()> {
    write_bytes(path, &profile_csv(profile)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| Error::Format(format!("json: {e}")))?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}
