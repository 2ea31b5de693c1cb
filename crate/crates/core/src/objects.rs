//! Binary-amplitude, zero-phase test objects.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ComplexField, GridSpec};

/// Object shapes. Lengths are in pixels, positions are sample indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ObjectKind {
    /// Annulus centered on the grid origin; `r_in = 0` gives a filled disk.
    Ring {
        r_in: f64,
        r_out: f64,
    },
    /// Capital H with the given stroke width (the font glyph scaled by `stroke`).
    LetterH {
        stroke: usize,
    },
    /// Text rendered with the built-in 5×7 font, each font pixel `scale` samples wide.
    Text {
        text: String,
        scale: usize,
    },
    Point {
        i: usize,
        j: usize,
    },
    TwoPoint {
        i1: usize,
        j1: usize,
        i2: usize,
        j2: usize,
    },
}

pub fn gen_object(kind: &ObjectKind, grid: GridSpec) -> Result<ComplexField> {
    let mut mask = vec![false; grid.len()];
    match kind {
        ObjectKind::Ring { r_in, r_out } => ring(&grid, *r_in, *r_out, &mut mask)?,
        ObjectKind::LetterH { stroke } => text(&grid, "H", *stroke, &mut mask)?,
        ObjectKind::Text { text: s, scale } => text(&grid, s, *scale, &mut mask)?,
        ObjectKind::Point { i, j } => set_point(&grid, *i, *j, &mut mask)?,
        ObjectKind::TwoPoint { i1, j1, i2, j2 } => {
            set_point(&grid, *i1, *j1, &mut mask)?;
            set_point(&grid, *i2, *j2, &mut mask)?;
        }
    }
    ComplexField::from_vec(
        grid,
        mask.into_iter()
            .map(|m| Complex64::new(if m { 1.0 } else { 0.0 }, 0.0))
            .collect(),
    )
}

/// Pixel distance of sample `(i, j)` from the grid origin.
pub fn pixel_radius(grid: &GridSpec, i: usize, j: usize) -> f64 {
    let (cx, cy) = grid.center();
    let di = i as f64 - cx as f64;
    let dj = j as f64 - cy as f64;
    (di * di + dj * dj).sqrt()
}

fn ring(grid: &GridSpec, r_in: f64, r_out: f64, mask: &mut [bool]) -> Result<()> {
    if !(r_in.is_finite() && r_out.is_finite()) || r_in < 0.0 || r_out <= 0.0 || r_in > r_out {
        return Err(Error::Geometry(format!(
            "ring needs 0 <= r_in <= r_out and r_out > 0, got r_in={r_in}, r_out={r_out}"
        )));
    }
    let limit = (grid.nx().min(grid.ny()) / 2 - 1) as f64;
    if r_out > limit {
        return Err(Error::Geometry(format!(
            "ring radius {r_out} px exceeds grid half-width {limit} px"
        )));
    }
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let r = pixel_radius(grid, i, j);
            if r >= r_in && r <= r_out {
                mask[grid.index(i, j)] = true;
            }
        }
    }
    Ok(())
}

fn set_point(grid: &GridSpec, i: usize, j: usize, mask: &mut [bool]) -> Result<()> {
    if i >= grid.nx() || j >= grid.ny() {
        return Err(Error::Geometry(format!(
            "point ({i}, {j}) outside {}x{} grid",
            grid.nx(),
            grid.ny()
        )));
    }
    mask[grid.index(i, j)] = true;
    Ok(())
}

pub const GLYPH_WIDTH: usize = 5;
pub const GLYPH_HEIGHT: usize = 7;

/// Row bitmaps of a 5×7 glyph, most significant of the low five bits leftmost.
pub fn glyph(c: char) -> Option<[u8; GLYPH_HEIGHT]> {
    let rows = match c.to_ascii_uppercase() {
        'A' => [
            0b01110, 0b10001, 0b10001, 0b11111, 0b10001, 0b10001, 0b10001,
        ],
        'B' => [
            0b11110, 0b10001, 0b10001, 0b11110, 0b10001, 0b10001, 0b11110,
        ],
        'C' => [
            0b01110, 0b10001, 0b10000, 0b10000, 0b10000, 0b10001, 0b01110,
        ],
        'D' => [
            0b11100, 0b10010, 0b10001, 0b10001, 0b10001, 0b10010, 0b11100,
        ],
        'E' => [
            0b11111, 0b10000, 0b10000, 0b11110, 0b10000, 0b10000, 0b11111,
        ],
        'F' => [
            0b11111, 0b10000, 0b10000, 0b11110, 0b10000, 0b10000, 0b10000,
        ],
        'G' => [
            0b01110, 0b10001, 0b10000, 0b10111, 0b10001, 0b10001, 0b01111,
        ],
        'H' => [
            0b10001, 0b10001, 0b10001, 0b11111, 0b10001, 0b10001, 0b10001,
        ],
        'I' => [
            0b01110, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110,
        ],
        'J' => [
            0b00111, 0b00010, 0b00010, 0b00010, 0b00010, 0b10010, 0b01100,
        ],
        'K' => [
            0b10001, 0b10010, 0b10100, 0b11000, 0b10100, 0b10010, 0b10001,
        ],
        'L' => [
            0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b11111,
        ],
        'M' => [
            0b10001, 0b11011, 0b10101, 0b10101, 0b10001, 0b10001, 0b10001,
        ],
        'N' => [
            0b10001, 0b10001, 0b11001, 0b10101, 0b10011, 0b10001, 0b10001,
        ],
        'O' => [
            0b01110, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01110,
        ],
        'P' => [
            0b11110, 0b10001, 0b10001, 0b11110, 0b10000, 0b10000, 0b10000,
        ],
        'Q' => [
            0b01110, 0b10001, 0b10001, 0b10001, 0b10101, 0b10010, 0b01101,
        ],
        'R' => [
            0b11110, 0b10001, 0b10001, 0b11110, 0b10100, 0b10010, 0b10001,
        ],
        'S' => [
            0b01111, 0b10000, 0b10000, 0b01110, 0b00001, 0b00001, 0b11110,
        ],
        'T' => [
            0b11111, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100,
        ],
        'U' => [
            0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01110,
        ],
        'V' => [
            0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01010, 0b00100,
        ],
        'W' => [
            0b10001, 0b10001, 0b10001, 0b10101, 0b10101, 0b10101, 0b01010,
        ],
        'X' => [
            0b10001, 0b10001, 0b01010, 0b00100, 0b01010, 0b10001, 0b10001,
        ],
        'Y' => [
            0b10001, 0b10001, 0b01010, 0b00100, 0b00100, 0b00100, 0b00100,
        ],
        'Z' => [
            0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b10000, 0b11111,
        ],
        '0' => [
            0b01110, 0b10001, 0b10011, 0b10101, 0b11001, 0b10001, 0b01110,
        ],
        '1' => [
            0b00100, 0b01100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110,
        ],
        '2' => [
            0b01110, 0b10001, 0b00001, 0b00010, 0b00100, 0b01000, 0b11111,
        ],
        '3' => [
            0b11111, 0b00010, 0b00100, 0b00010, 0b00001, 0b10001, 0b01110,
        ],
        '4' => [
            0b00010, 0b00110, 0b01010, 0b10010, 0b11111, 0b00010, 0b00010,
        ],
        '5' => [
            0b11111, 0b10000, 0b11110, 0b00001, 0b00001, 0b10001, 0b01110,
        ],
        '6' => [
            0b00110, 0b01000, 0b10000, 0b11110, 0b10001, 0b10001, 0b01110,
        ],
        '7' => [
            0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b01000, 0b01000,
        ],
        '8' => [
            0b01110, 0b10001, 0b10001, 0b01110, 0b10001, 0b10001, 0b01110,
        ],
        '9' => [
            0b01110, 0b10001, 0b10001, 0b01111, 0b00001, 0b00010, 0b01100,
        ],
        '-' => [0, 0, 0, 0b11111, 0, 0, 0],
        ' ' => [0; GLYPH_HEIGHT],
        _ => return None,
    };
    Some(rows)
}

fn text(grid: &GridSpec, s: &str, scale: usize, mask: &mut [bool]) -> Result<()> {
    if s.is_empty() || scale == 0 {
        return Err(Error::Geometry(
            "text needs at least one character and scale >= 1".into(),
        ));
    }
    let glyphs = s
        .chars()
        .map(|c| glyph(c).ok_or_else(|| Error::Geometry(format!("no glyph for {c:?}"))))
        .collect::<Result<Vec<_>>>()?;
    let n = glyphs.len();
    // one blank font column between glyphs
    let width = (n * (GLYPH_WIDTH + 1) - 1) * scale;
    let height = GLYPH_HEIGHT * scale;
    if width + 2 > grid.nx() || height + 2 > grid.ny() {
        return Err(Error::Geometry(format!(
            "text block {width}x{height} px does not fit a {}x{} grid",
            grid.nx(),
            grid.ny()
        )));
    }
    let (cx, cy) = grid.center();
    let left = cx - width / 2;
    let top = cy - height / 2;
    for (g, rows) in glyphs.iter().enumerate() {
        let x0 = left + g * (GLYPH_WIDTH + 1) * scale;
        for (r, bits) in rows.iter().enumerate() {
            for c in 0..GLYPH_WIDTH {
                if bits >> (GLYPH_WIDTH - 1 - c) & 1 == 0 {
                    continue;
                }
                for dy in 0..scale {
                    for dx in 0..scale {
                        let i = x0 + c * scale + dx;
                        let j = top + r * scale + dy;
                        mask[grid.index(i, j)] = true;
                    }
                }
            }
        }
    }
    Ok(())
}
