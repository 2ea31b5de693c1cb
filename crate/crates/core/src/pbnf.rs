//! Phase based noise filtering.
//!
//! The lobes of a band-limited impulse response follow
//! `φn(u,v) = φ0 + πn + π/(λz)·[(u-u0)² + (v-v0)²]`: each order adds π and every
//! lobe shares the same quadratic curvature. After the curvature is divided
//! out, the order parity is just the sign of the field projected on the base
//! phasor, so every decision here is pointwise and never needs to know `n`.
//!
//! Three modes are provided:
//! - [`FilterMode::OddReject`] zeroes samples whose projection on the base
//!   phasor is negative (all odd orders),
//! - [`FilterMode::BaseOnly`] keeps samples within `ε` of the base phase,
//! - [`FilterMode::Window`] keeps samples whose residual phase lies in
//!   `[lo, hi]`, which selects part of a lobe's continuous phase spread.
//!
//! Rejected samples are set to zero; accepted samples are returned unchanged.
//! Samples at or below the amplitude floor carry no usable phase and pass
//! through untouched.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::airy;
use crate::error::{Error, Result};
use crate::field::{arg, default_amp_floor, principal, ComplexField, GridSpec, PhaseMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FilterMode {
    OddReject,
    BaseOnly { epsilon: f64 },
    Window { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Curvature {
    None,
    /// Quadratic phase `π r²/(λz)` about `origin` (meters).
    Quadratic {
        distance: f64,
        wavelength: f64,
        origin: (f64, f64),
    },
}

pub const DEFAULT_EPSILON: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseFilterSpec {
    pub mode: FilterMode,
    pub base_phase: f64,
    pub curvature: Curvature,
    /// Absolute amplitude floor; `None` means `1e-9` of the field's peak amplitude.
    pub amp_floor: Option<f64>,
}

impl Default for PhaseFilterSpec {
    fn default() -> Self {
        Self {
            mode: FilterMode::OddReject,
            base_phase: PI / 2.0,
            curvature: Curvature::None,
            amp_floor: None,
        }
    }
}

impl PhaseFilterSpec {
    pub fn new(mode: FilterMode, base_phase: f64, curvature: Curvature) -> Result<Self> {
        let s = Self {
            mode,
            base_phase,
            curvature,
            amp_floor: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self.mode {
            FilterMode::OddReject => {}
            FilterMode::BaseOnly { epsilon } => {
                if !(epsilon.is_finite() && epsilon > 0.0) {
                    return Err(Error::Spec(format!("epsilon must be > 0, got {epsilon}")));
                }
            }
            FilterMode::Window { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi && hi - lo <= 2.0 * PI) {
                    return Err(Error::Spec(format!(
                        "window needs lo < hi and hi - lo <= 2π, got [{lo}, {hi}]"
                    )));
                }
            }
        }
        if !(self.base_phase > -PI && self.base_phase <= PI) {
            return Err(Error::Spec(format!(
                "base phase {} outside (-π, π]",
                self.base_phase
            )));
        }
        if let Curvature::Quadratic {
            distance,
            wavelength,
            origin,
        } = self.curvature
        {
            // an infinite distance is allowed: it switches the curvature off
            if !(distance > 0.0) || !(wavelength.is_finite() && wavelength > 0.0) {
                return Err(Error::Spec(format!(
                    "curvature needs z > 0 and λ > 0, got z={distance}, λ={wavelength}"
                )));
            }
            if !(origin.0.is_finite() && origin.1.is_finite()) {
                return Err(Error::Spec("curvature origin must be finite".into()));
            }
        }
        if let Some(floor) = self.amp_floor {
            if !(floor.is_finite() && floor >= 0.0) {
                return Err(Error::Spec(format!(
                    "amplitude floor must be >= 0, got {floor}"
                )));
            }
        }
        Ok(())
    }

    fn floor_for(&self, f: &ComplexField) -> f64 {
        self.amp_floor.unwrap_or_else(|| default_amp_floor(f))
    }
}

fn quadratic(spec: &PhaseFilterSpec) -> Result<(f64, (f64, f64))> {
    match spec.curvature {
        Curvature::Quadratic {
            distance,
            wavelength,
            origin,
        } => Ok((PI / (wavelength * distance), origin)),
        Curvature::None => Err(Error::Spec("operation needs a quadratic curvature".into())),
    }
}

/// Unwrapped phase expected for lobe `n` at image position `(u, v)`.
pub fn expected_lobe_phase(n: u32, u: f64, v: f64, spec: &PhaseFilterSpec) -> Result<f64> {
    let (coef, (u0, v0)) = quadratic(spec)?;
    Ok(spec.base_phase + PI * n as f64 + coef * ((u - u0).powi(2) + (v - v0).powi(2)))
}

fn chirp(f: &ComplexField, spec: &PhaseFilterSpec, sign: f64) -> Result<ComplexField> {
    let (coef, (u0, v0)) = quadratic(spec)?;
    let g = *f.grid();
    ComplexField::from_fn(g, |i, j| {
        let r2 = (g.x(i) - u0).powi(2) + (g.y(j) - v0).powi(2);
        f.get(i, j) * Complex64::from_polar(1.0, sign * coef * r2)
    })
}

/// Multiply by `exp(-jπr²/(λz))`, removing the common lobe curvature.
pub fn remove_curvature(f: &ComplexField, spec: &PhaseFilterSpec) -> Result<ComplexField> {
    chirp(f, spec, -1.0)
}

/// Inverse of [`remove_curvature`].
pub fn apply_curvature(f: &ComplexField, spec: &PhaseFilterSpec) -> Result<ComplexField> {
    chirp(f, spec, 1.0)
}

fn dechirped(f: &ComplexField, spec: &PhaseFilterSpec) -> Result<ComplexField> {
    match spec.curvature {
        Curvature::None => Ok(f.clone()),
        Curvature::Quadratic { .. } => remove_curvature(f, spec),
    }
}

/// Phase relative to the base phase after curvature removal, in `(-π, π]`.
pub fn residual_phase(f: &ComplexField, spec: &PhaseFilterSpec) -> Result<PhaseMap> {
    spec.validate()?;
    let floor = spec.floor_for(f);
    let d = dechirped(f, spec)?;
    let values = f
        .data()
        .iter()
        .zip(d.data())
        .map(|(orig, flat)| (orig.norm() > floor).then(|| principal(arg(*flat) - spec.base_phase)))
        .collect();
    Ok(PhaseMap {
        grid: *f.grid(),
        values,
    })
}

fn accepts(mode: FilterMode, psi: f64) -> bool {
    match mode {
        FilterMode::OddReject => psi.cos() >= 0.0,
        FilterMode::BaseOnly { epsilon } => psi.abs() <= epsilon,
        FilterMode::Window { lo, hi } => (psi - lo).rem_euclid(2.0 * PI) <= hi - lo,
    }
}

pub fn apply_pbnf(f: &ComplexField, spec: &PhaseFilterSpec) -> Result<ComplexField> {
    let psi = residual_phase(f, spec)?;
    let data = f
        .data()
        .iter()
        .zip(&psi.values)
        .map(|(&c, p)| match p {
            Some(p) if !accepts(spec.mode, *p) => Complex64::new(0.0, 0.0),
            _ => c,
        })
        .collect();
    ComplexField::from_vec(*f.grid(), data)
}

/// Named region of a grid, e.g. one lobe annulus.
#[derive(Debug, Clone, PartialEq)]
pub struct LobeMask {
    pub name: String,
    pub mask: Vec<bool>,
}

/// Annuli `[r_n, r_{n+1})` about `origin` for consecutive radii (meters),
/// starting with the disk `[0, r_1)`. Produces `radii.len()` masks.
pub fn annulus_masks(grid: &GridSpec, origin: (f64, f64), radii: &[f64]) -> Vec<LobeMask> {
    let mut edges = vec![0.0];
    edges.extend_from_slice(radii);
    edges
        .windows(2)
        .enumerate()
        .map(|(n, w)| {
            let mut mask = vec![false; grid.len()];
            for j in 0..grid.ny() {
                for i in 0..grid.nx() {
                    let r =
                        ((grid.x(i) - origin.0).powi(2) + (grid.y(j) - origin.1).powi(2)).sqrt();
                    mask[grid.index(i, j)] = r >= w[0] && r < w[1];
                }
            }
            LobeMask {
                name: format!("lobe{n}"),
                mask,
            }
        })
        .collect()
}

/// Lobe masks 0..count of an Airy pattern centered on the grid origin,
/// bounded by the analytic dark rings.
pub fn airy_lobe_masks(
    grid: &GridSpec,
    wavelength: f64,
    distance: f64,
    diameter: f64,
    count: usize,
) -> Vec<LobeMask> {
    let radii: Vec<f64> = (1..=count)
        .map(|n| airy::zero_radius(n, wavelength, distance, diameter))
        .collect();
    annulus_masks(grid, (0.0, 0.0), &radii)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskEnergy {
    pub name: String,
    pub energy_before: f64,
    pub energy_after: f64,
    /// `energy_after / energy_before`, 1 when both vanish.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub masks: Vec<MaskEnergy>,
    pub peak_before: f64,
    pub peak_after: f64,
    /// Fraction of the total energy removed by the filter.
    pub rejection_fraction: f64,
}

fn ratio(after: f64, before: f64) -> f64 {
    if before == 0.0 {
        if after == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        after / before
    }
}

pub fn filter_report(
    before: &ComplexField,
    after: &ComplexField,
    masks: &[LobeMask],
) -> Result<FilterReport> {
    if !before.grid().matches(after.grid()) {
        return Err(Error::Grid("before/after grids differ".into()));
    }
    let w = before.grid().dx() * before.grid().dy();
    let mut out = Vec::with_capacity(masks.len());
    for m in masks {
        if m.mask.len() != before.grid().len() {
            return Err(Error::Grid(format!("mask {} has the wrong size", m.name)));
        }
        let sum = |f: &ComplexField| -> f64 {
            f.data()
                .iter()
                .zip(&m.mask)
                .filter(|(_, &keep)| keep)
                .map(|(c, _)| c.norm_sqr())
                .sum::<f64>()
                * w
        };
        let (eb, ea) = (sum(before), sum(after));
        out.push(MaskEnergy {
            name: m.name.clone(),
            energy_before: eb,
            energy_after: ea,
            ratio: ratio(ea, eb),
        });
    }
    let total_before: f64 = before.intensity().iter().sum();
    let total_after: f64 = after.intensity().iter().sum();
    let rejection_fraction = if total_before == 0.0 {
        0.0
    } else {
        1.0 - total_after / total_before
    };
    Ok(FilterReport {
        masks: out,
        peak_before: before.peak().1,
        peak_after: after.peak().1,
        rejection_fraction,
    })
}
