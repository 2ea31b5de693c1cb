//! Complex 2-D fields on a physical sampling grid.
//!
//! Samples are stored row-major: sample `(i, j)` (column `i`, row `j`) lives at
//! `data[j * nx + i]` and sits at physical position
//! `((i - nx/2) * dx, (j - ny/2) * dy)`, so `(nx/2, ny/2)` is the origin.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampling grid: pixel counts and pitch in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64) -> Result<Self> {
        if nx < 2 || ny < 2 || !nx.is_multiple_of(2) || !ny.is_multiple_of(2) {
            return Err(Error::Grid(format!(
                "dimensions must be even and >= 2, got {nx}x{ny}"
            )));
        }
        if !(dx.is_finite() && dx > 0.0 && dy.is_finite() && dy > 0.0) {
            return Err(Error::Grid(format!(
                "pitch must be positive, got dx={dx}, dy={dy}"
            )));
        }
        Ok(Self { nx, ny, dx, dy })
    }

    /// Square grid with equal pitch on both axes.
    pub fn square(n: usize, pitch: f64) -> Result<Self> {
        Self::new(n, n, pitch, pitch)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the physical origin, `(nx/2, ny/2)`.
    pub fn center(&self) -> (usize, usize) {
        (self.nx / 2, self.ny / 2)
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - (self.nx / 2) as f64) * self.dx
    }

    pub fn y(&self, j: usize) -> f64 {
        (j as f64 - (self.ny / 2) as f64) * self.dy
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Same pixel counts and pitches equal to within `1e-9` relative.
    pub fn matches(&self, other: &GridSpec) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs());
        self.nx == other.nx
            && self.ny == other.ny
            && close(self.dx, other.dx)
            && close(self.dy, other.dy)
    }

    pub(crate) fn with_pitch(&self, dx: f64, dy: f64) -> Result<Self> {
        Self::new(self.nx, self.ny, dx, dy)
    }
}

/// Complex amplitude samples on a [`GridSpec`]. All samples are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: GridSpec,
    data: Vec<Complex64>,
}

impl ComplexField {
    pub fn from_vec(grid: GridSpec, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::Grid(format!(
                "expected {} samples for a {}x{} grid, got {}",
                grid.len(),
                grid.nx,
                grid.ny,
                data.len()
            )));
        }
        if let Some(k) = data
            .iter()
            .position(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::Grid(format!("non-finite sample at flat index {k}")));
        }
        Ok(Self { grid, data })
    }

    /// Real-valued field (zero imaginary part).
    pub fn from_real(grid: GridSpec, values: &[f64]) -> Result<Self> {
        Self::from_vec(
            grid,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            data: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Build a field by evaluating `f(i, j)` at every sample.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut data = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                data.push(f(i, j));
            }
        }
        Self::from_vec(grid, data)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[self.grid.index(i, j)]
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.data.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn max_amplitude(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Location and value of the brightest sample (first one on ties).
    pub fn peak(&self) -> ((usize, usize), f64) {
        let mut best = (0, 0.0);
        for (k, c) in self.data.iter().enumerate() {
            let v = c.norm_sqr();
            if v > best.1 {
                best = (k, v);
            }
        }
        ((best.0 % self.grid.nx, best.0 / self.grid.nx), best.1)
    }

    /// Pointwise map; the result must stay finite.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        Self::from_vec(self.grid, self.data.iter().map(|&c| f(c)).collect())
    }

    pub fn scale(&self, s: Complex64) -> Result<Self> {
        self.map(|c| c * s)
    }

    /// `self + other` on a matching grid.
    pub fn add(&self, other: &ComplexField) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexField) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub(crate) fn zip_with(
        &self,
        other: &ComplexField,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if !self.grid.matches(&other.grid) {
            return Err(Error::Grid("operand grids differ".into()));
        }
        Self::from_vec(
            self.grid,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    /// `max|a - b| / max(|a|, |b|)`; 0 when both fields vanish.
    pub fn max_relative_difference(&self, other: &ComplexField) -> f64 {
        let diff = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let scale = self.max_amplitude().max(other.max_amplitude());
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }
}

/// Wavelength, propagation distance, magnification and amplitude constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImagingConfig {
    pub wavelength: f64,
    pub distance: f64,
    pub magnification: f64,
    pub amplitude: f64,
}

impl ImagingConfig {
    pub fn new(wavelength: f64, distance: f64, magnification: f64, amplitude: f64) -> Result<Self> {
        let cfg = Self {
            wavelength,
            distance,
            magnification,
            amplitude,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength.is_finite() && self.wavelength > 0.0) {
            return Err(Error::Config(format!(
                "wavelength must be > 0, got {}",
                self.wavelength
            )));
        }
        if !(self.distance.is_finite() && self.distance > 0.0) {
            return Err(Error::Config(format!(
                "distance must be > 0, got {}",
                self.distance
            )));
        }
        if !self.magnification.is_finite() || self.magnification == 0.0 {
            return Err(Error::Config("magnification must be nonzero".into()));
        }
        if !(self.amplitude.is_finite() && self.amplitude > 0.0) {
            return Err(Error::Config(format!(
                "amplitude must be > 0, got {}",
                self.amplitude
            )));
        }
        Ok(())
    }

    /// Wavenumber `2π/λ`.
    pub fn k(&self) -> f64 {
        2.0 * PI / self.wavelength
    }
}

pub fn make_field(grid: GridSpec, fill: Complex64) -> Result<ComplexField> {
    GridSpec::new(grid.nx, grid.ny, grid.dx, grid.dy)?;
    ComplexField::from_vec(grid, vec![fill; grid.len()])
}

/// `Σ|f|²·dx·dy`.
pub fn field_energy(f: &ComplexField) -> f64 {
    f.data.iter().map(|c| c.norm_sqr()).sum::<f64>() * f.grid.dx * f.grid.dy
}

/// Principal value of the argument in `(-π, π]`.
pub fn principal(phase: f64) -> f64 {
    let mut p = phase.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    p
}

pub(crate) fn arg(c: Complex64) -> f64 {
    let a = c.im.atan2(c.re);
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Default amplitude floor: `1e-9` of the field's peak amplitude.
pub fn default_amp_floor(f: &ComplexField) -> f64 {
    1e-9 * f.max_amplitude()
}

/// Phases of a field; `None` where the amplitude is at or below the floor.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMap {
    pub grid: GridSpec,
    pub values: Vec<Option<f64>>,
}

impl PhaseMap {
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[self.grid.index(i, j)]
    }
}

pub fn phase_map(f: &ComplexField, amp_floor: f64) -> PhaseMap {
    let values = f
        .data
        .iter()
        .map(|&c| (c.norm() > amp_floor).then(|| arg(c)))
        .collect();
    PhaseMap {
        grid: f.grid,
        values,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    Row,
    Col,
}

/// Intensity samples along one row or column.
#[derive(Debug, Clone, PartialEq)]
pub struct LineProfile {
    pub positions: Vec<f64>,
    pub intensity: Vec<f64>,
}

impl LineProfile {
    /// Profile with uniform sample spacing `pitch`, first sample at `start`.
    pub fn uniform(start: f64, pitch: f64, intensity: Vec<f64>) -> Self {
        let positions = (0..intensity.len())
            .map(|k| start + k as f64 * pitch)
            .collect();
        Self {
            positions,
            intensity,
        }
    }

    pub fn len(&self) -> usize {
        self.intensity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intensity.is_empty()
    }

    pub fn pitch(&self) -> f64 {
        if self.positions.len() < 2 {
            0.0
        } else {
            self.positions[1] - self.positions[0]
        }
    }
}

pub fn line_profile(f: &ComplexField, axis: Axis, index: usize) -> Result<LineProfile> {
    let g = &f.grid;
    match axis {
        Axis::Row => {
            if index >= g.ny {
                return Err(Error::Index { index, len: g.ny });
            }
            Ok(LineProfile {
                positions: (0..g.nx).map(|i| g.x(i)).collect(),
                intensity: (0..g.nx).map(|i| f.get(i, index).norm_sqr()).collect(),
            })
        }
        Axis::Col => {
            if index >= g.nx {
                return Err(Error::Index { index, len: g.nx });
            }
            Ok(LineProfile {
                positions: (0..g.ny).map(|j| g.y(j)).collect(),
                intensity: (0..g.ny).map(|j| f.get(index, j).norm_sqr()).collect(),
            })
        }
    }
}
