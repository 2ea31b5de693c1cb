//! Zone-plate coded incoherent holography.
//!
//! Every incoherent object point casts a shadow of a Fresnel zone plate onto
//! the detector, so the recorded hologram is the object intensity convolved
//! with the plate transmittance. Illuminating that record with a unit plane
//! wave and propagating it by the plate's focal length `f = r1²/λ` focuses the
//! converging component of each shadow back into a point: the first-order
//! image. The DC bias and the diverging (twin) component stay in the decoded
//! field as background.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{arg, default_amp_floor, principal, ComplexField, GridSpec};
use crate::propagation::{angular_spectrum_propagate, convolve_centered};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZoneProfile {
    /// `t(r) = ½(1 + cos(πr²/r1²))`
    Sinusoidal,
    /// 1 where `cos(πr²/r1²) >= 0`, else 0.
    Binary,
}

/// Zone plate geometry. The plate is clear-bounded at `aperture_radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZonePlateSpec {
    /// Innermost zone radius in meters.
    pub r1: f64,
    pub profile: ZoneProfile,
    /// Outer radius of the plate in meters.
    pub aperture_radius: f64,
}

impl ZonePlateSpec {
    pub fn new(r1: f64, profile: ZoneProfile, aperture_radius: f64) -> Result<Self> {
        let s = Self {
            r1,
            profile,
            aperture_radius,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r1.is_finite() && self.r1 > 0.0) {
            return Err(Error::Config(format!(
                "zone plate r1 must be > 0, got {}",
                self.r1
            )));
        }
        if !(self.aperture_radius.is_finite() && self.aperture_radius > 0.0) {
            return Err(Error::Config(format!(
                "zone plate aperture radius must be > 0, got {}",
                self.aperture_radius
            )));
        }
        Ok(())
    }

    /// Focal length `r1²/λ` of the first diffraction order.
    pub fn focal_length(&self, wavelength: f64) -> f64 {
        self.r1 * self.r1 / wavelength
    }

    /// Width of the outermost zone, `r1²/(2R)`.
    pub fn outer_zone_width(&self) -> f64 {
        self.r1 * self.r1 / (2.0 * self.aperture_radius)
    }

    /// Number of full periods of the plate, `R²/r1²`.
    pub fn zone_pairs(&self) -> f64 {
        (self.aperture_radius / self.r1).powi(2)
    }

    /// Transmittance at radius `r` (meters).
    pub fn transmittance(&self, r: f64) -> f64 {
        if r > self.aperture_radius {
            return 0.0;
        }
        let c = (PI * r * r / (self.r1 * self.r1)).cos();
        match self.profile {
            ZoneProfile::Sinusoidal => 0.5 * (1.0 + c),
            ZoneProfile::Binary => {
                if c >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// The finest zone must span two samples, and the plate must fit the grid.
    pub fn check_sampling(&self, grid: &GridSpec) -> Result<()> {
        self.validate()?;
        let pitch = grid.dx().max(grid.dy());
        let width = self.outer_zone_width();
        if width < 2.0 * pitch {
            return Err(Error::Sampling(format!(
                "outermost zone width r1²/(2R) = {width:e} m is below 2·dx = {:e} m",
                2.0 * pitch
            )));
        }
        let half = (grid.nx() as f64 * grid.dx()).min(grid.ny() as f64 * grid.dy()) / 2.0;
        if self.aperture_radius >= half {
            return Err(Error::Sampling(format!(
                "plate radius {:e} m must stay below the grid half-width {half:e} m",
                self.aperture_radius
            )));
        }
        Ok(())
    }
}

/// Plate transmittance sampled on `grid`, centered on the origin. The wavelength
/// only enters through the focal length and is validated here for symmetry
/// with the decoder.
pub fn zone_plate_transmittance(
    spec: &ZonePlateSpec,
    grid: &GridSpec,
    wavelength: f64,
) -> Result<ComplexField> {
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(Error::Config(format!(
            "wavelength must be > 0, got {wavelength}"
        )));
    }
    spec.check_sampling(grid)?;
    ComplexField::from_fn(*grid, |i, j| {
        let r = (grid.x(i).powi(2) + grid.y(j).powi(2)).sqrt();
        Complex64::new(spec.transmittance(r), 0.0)
    })
}

/// Intensity record of the coded shadow.
#[derive(Debug, Clone, PartialEq)]
pub struct Hologram {
    grid: GridSpec,
    data: Vec<f64>,
    /// Plate used to encode, if known.
    pub plate: Option<ZonePlateSpec>,
    /// Object-to-detector magnification of the shadow cast (unity here).
    pub magnification: f64,
}

impl Hologram {
    pub fn new(grid: GridSpec, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::Grid(format!(
                "expected {} samples, got {}",
                grid.len(),
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Grid(format!(
                "hologram samples must be finite and >= 0, got {v}"
            )));
        }
        Ok(Self {
            grid,
            data,
            plate: None,
            magnification: 1.0,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn to_field(&self) -> ComplexField {
        ComplexField::from_real(self.grid, &self.data).expect("hologram samples are finite")
    }
}

/// Shadowgram of an incoherent object: `|O|²` convolved with the plate.
pub fn encode_hologram(
    obj: &ComplexField,
    spec: &ZonePlateSpec,
    grid: &GridSpec,
    wavelength: f64,
) -> Result<Hologram> {
    if !obj.grid().matches(grid) {
        return Err(Error::Grid(
            "object grid differs from the hologram grid".into(),
        ));
    }
    if obj.data().iter().any(|c| c.im != 0.0 || c.re < 0.0) {
        return Err(Error::Config(
            "incoherent object must be real and nonnegative (zero phase)".into(),
        ));
    }
    let plate = zone_plate_transmittance(spec, grid, wavelength)?;
    let intensity: Vec<Complex64> = obj
        .data()
        .iter()
        .map(|c| Complex64::new(c.norm_sqr(), 0.0))
        .collect();
    let conv = convolve_centered(&intensity, plate.data(), grid.nx(), grid.ny());
    // round-off can dip a hair below zero where the record is dark
    let data = conv.into_iter().map(|c| c.re.max(0.0)).collect();
    let mut h = Hologram::new(*grid, data)?;
    h.plate = Some(*spec);
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DecodeOptions {
    /// Subtract a low-pass estimate of the bias before reconstruction.
    pub subtract_bias: bool,
}

/// Low-pass estimate of the hologram bias: a normalized Gaussian blur of width
/// `r1/2`, which passes less than 1% of any zone beyond the innermost one.
pub fn bias_estimate(h: &Hologram, spec: &ZonePlateSpec) -> Result<Vec<f64>> {
    let g = h.grid;
    let sigma = spec.r1 / 2.0;
    let kernel: Vec<Complex64> = {
        let mut k: Vec<f64> = (0..g.len())
            .map(|idx| {
                let (i, j) = (idx % g.nx(), idx / g.nx());
                (-(g.x(i).powi(2) + g.y(j).powi(2)) / (2.0 * sigma * sigma)).exp()
            })
            .collect();
        let s: f64 = k.iter().sum();
        k.iter_mut().for_each(|v| *v /= s);
        k.into_iter().map(|v| Complex64::new(v, 0.0)).collect()
    };
    let signal: Vec<Complex64> = h.data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Ok(convolve_centered(&signal, &kernel, g.nx(), g.ny())
        .into_iter()
        .map(|c| c.re)
        .collect())
}

/// Raw coherent reconstruction: propagate the record by `f = r1²/λ`.
pub fn decode_hologram(
    h: &Hologram,
    spec: &ZonePlateSpec,
    wavelength: f64,
) -> Result<ComplexField> {
    decode_hologram_with(h, spec, wavelength, DecodeOptions::default())
}

pub fn decode_hologram_with(
    h: &Hologram,
    spec: &ZonePlateSpec,
    wavelength: f64,
    opts: DecodeOptions,
) -> Result<ComplexField> {
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(Error::Config(format!(
            "wavelength must be > 0, got {wavelength}"
        )));
    }
    spec.check_sampling(&h.grid)?;
    let mut amplitude = h.data.clone();
    if opts.subtract_bias {
        let bias = bias_estimate(h, spec)?;
        amplitude.iter_mut().zip(bias).for_each(|(a, b)| *a -= b);
    }
    let field = ComplexField::from_real(h.grid, &amplitude)?;
    angular_spectrum_propagate(&field, spec.focal_length(wavelength), wavelength)
}

/// Rotate the field by a global phase so the sample at `reference` sits at π/2.
pub fn calibrate_base_phase(
    f: &ComplexField,
    reference: (usize, usize),
) -> Result<(ComplexField, f64)> {
    let (i, j) = reference;
    let g = f.grid();
    if i >= g.nx() || j >= g.ny() {
        return Err(Error::Calibration(format!(
            "reference ({i}, {j}) outside the grid"
        )));
    }
    let c = f.get(i, j);
    let floor = default_amp_floor(f);
    if c.norm() <= floor {
        return Err(Error::Calibration(format!(
            "reference amplitude {:e} is at or below the floor {floor:e}",
            c.norm()
        )));
    }
    let rotation = principal(PI / 2.0 - arg(c));
    let out = f.scale(Complex64::from_polar(1.0, rotation))?;
    Ok((out, rotation))
}

/// Gauge rotation that puts the first-order image of an on-axis point at π/2,
/// found by encoding and decoding a point at the grid origin.
pub fn reference_rotation(
    spec: &ZonePlateSpec,
    grid: &GridSpec,
    wavelength: f64,
    opts: DecodeOptions,
) -> Result<f64> {
    let (ci, cj) = grid.center();
    let mut data = vec![Complex64::new(0.0, 0.0); grid.len()];
    data[grid.index(ci, cj)] = Complex64::new(1.0, 0.0);
    let point = ComplexField::from_vec(*grid, data)?;
    let h = encode_hologram(&point, spec, grid, wavelength)?;
    let decoded = decode_hologram_with(&h, spec, wavelength, opts)?;
    Ok(calibrate_base_phase(&decoded, (ci, cj))?.1)
}

/// Decode and rotate into the calibrated gauge; returns the rotation applied.
pub fn decode_calibrated(
    h: &Hologram,
    spec: &ZonePlateSpec,
    wavelength: f64,
    opts: DecodeOptions,
) -> Result<(ComplexField, f64)> {
    let rotation = reference_rotation(spec, &h.grid, wavelength, opts)?;
    let decoded = decode_hologram_with(h, spec, wavelength, opts)?;
    Ok((
        decoded.scale(Complex64::from_polar(1.0, rotation))?,
        rotation,
    ))
}
