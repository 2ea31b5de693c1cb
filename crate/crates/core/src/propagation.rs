//! Pupil-to-PSF synthesis, band-limited image formation and free-space
//! propagation.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{Direction, Fft2};
use crate::field::{ComplexField, GridSpec, ImagingConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Aperture {
    /// Uniform disk of the given diameter in meters, centered on the grid origin.
    Circular { diameter: f64 },
    /// Arbitrary transparency supplied sample by sample.
    Mask,
}

/// Entrance-pupil transparency, `|t| <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PupilFunction {
    transparency: ComplexField,
    aperture: Aperture,
}

const TRANSPARENCY_SLACK: f64 = 1e-12;

impl PupilFunction {
    pub fn circular(grid: GridSpec, diameter: f64) -> Result<Self> {
        if !(diameter.is_finite() && diameter > 0.0) {
            return Err(Error::Geometry(format!(
                "pupil diameter must be > 0, got {diameter}"
            )));
        }
        let r2 = (diameter / 2.0).powi(2);
        let transparency = ComplexField::from_fn(grid, |i, j| {
            let inside = grid.x(i).powi(2) + grid.y(j).powi(2) <= r2;
            Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
        })?;
        Ok(Self {
            transparency,
            aperture: Aperture::Circular { diameter },
        })
    }

    pub fn from_mask(transparency: ComplexField) -> Result<Self> {
        Self::with_aperture(transparency, Aperture::Mask)
    }

    /// Replace the transparency while keeping the aperture descriptor.
    pub fn with_aperture(transparency: ComplexField, aperture: Aperture) -> Result<Self> {
        if let Some(c) = transparency
            .data()
            .iter()
            .find(|c| c.norm() > 1.0 + TRANSPARENCY_SLACK)
        {
            return Err(Error::Geometry(format!(
                "pupil transparency |t| = {} exceeds 1",
                c.norm()
            )));
        }
        if let Aperture::Circular { diameter } = aperture {
            let g = transparency.grid();
            let r2 = (diameter / 2.0).powi(2);
            for j in 0..g.ny() {
                for i in 0..g.nx() {
                    if g.x(i).powi(2) + g.y(j).powi(2) > r2 && transparency.get(i, j).norm() != 0.0
                    {
                        return Err(Error::Geometry(format!(
                            "nonzero transparency at ({i}, {j}) outside the circular aperture"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            transparency,
            aperture,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        self.transparency.grid()
    }

    pub fn transparency(&self) -> &ComplexField {
        &self.transparency
    }

    pub fn aperture(&self) -> Aperture {
        self.aperture
    }

    /// Diameter of the smallest origin-centered disk holding the open pupil.
    pub fn extent(&self) -> f64 {
        match self.aperture {
            Aperture::Circular { diameter } => diameter,
            Aperture::Mask => {
                let g = self.grid();
                let mut r2max: f64 = 0.0;
                for j in 0..g.ny() {
                    for i in 0..g.nx() {
                        if self.transparency.get(i, j).norm() > 0.0 {
                            r2max = r2max.max(g.x(i).powi(2) + g.y(j).powi(2));
                        }
                    }
                }
                2.0 * r2max.sqrt()
            }
        }
    }
}

/// Check that the quadratic phase over the pupil is sampled at two or more
/// samples per fringe at its edge: `D·d <= λz` on both axes.
pub fn check_pupil_sampling(pupil: &PupilFunction, cfg: &ImagingConfig) -> Result<()> {
    let g = pupil.grid();
    let d = pupil.extent();
    let lz = cfg.wavelength * cfg.distance;
    let pitch = g.dx().max(g.dy());
    if d * pitch > lz * (1.0 + 1e-12) {
        return Err(Error::Sampling(format!(
            "pupil extent D={d:e} m with pitch {pitch:e} m gives D·dx={:e} m² > λz={lz:e} m²",
            d * pitch
        )));
    }
    Ok(())
}

/// Image-plane pitch of a single-FFT Fresnel transform: `λz/(n·d)` per axis.
pub fn image_grid(pupil_grid: &GridSpec, cfg: &ImagingConfig) -> Result<GridSpec> {
    let lz = cfg.wavelength * cfg.distance;
    GridSpec::new(
        pupil_grid.nx(),
        pupil_grid.ny(),
        lz / (pupil_grid.nx() as f64 * pupil_grid.dx()),
        lz / (pupil_grid.ny() as f64 * pupil_grid.dy()),
    )
}

/// Coherent point spread function of a pupil:
/// `h(u,v) = A/(λz) · exp[jπ(u²+v²)/(λz)] · FT[P](u/λz, v/λz)`.
///
/// The constant `exp(jkz)/j` is omitted. The returned grid carries the image
/// pitch `λz/(n·dx)`; the pupil pitch is recoverable as `λz/(n·du)`.
pub fn fresnel_psf(pupil: &PupilFunction, cfg: &ImagingConfig) -> Result<ComplexField> {
    cfg.validate()?;
    check_pupil_sampling(pupil, cfg)?;
    let pg = *pupil.grid();
    let ig = image_grid(&pg, cfg)?;
    let lz = cfg.wavelength * cfg.distance;

    let mut spectrum = pupil.transparency().data().to_vec();
    Fft2::new(pg.nx(), pg.ny()).process(&mut spectrum, Direction::Forward);
    // unitary DFT → continuous transform: ∫∫P e^{-j2π(fx x + fy y)} dx dy
    let ft_scale = ((pg.nx() * pg.ny()) as f64).sqrt() * pg.dx() * pg.dy();
    let prefactor = cfg.amplitude / lz * ft_scale;

    let mut k = 0;
    ComplexField::from_fn(ig, |i, j| {
        let r2 = ig.x(i).powi(2) + ig.y(j).powi(2);
        let v = spectrum[k] * Complex64::from_polar(prefactor, PI * r2 / lz);
        k += 1;
        v
    })
}

/// Resample the object onto the image grid by zero-order hold: image sample
/// `u` takes the object sample nearest to `u/M`.
fn magnify(obj: &ComplexField, image: &GridSpec, m: f64) -> Vec<Complex64> {
    let og = obj.grid();
    let mut out = vec![Complex64::new(0.0, 0.0); image.len()];
    for q in 0..image.ny() {
        let y = image.y(q) / m;
        let j = (y / og.dy() + 0.5).floor() + (og.ny() / 2) as f64;
        if j < 0.0 || j >= og.ny() as f64 {
            continue;
        }
        for p in 0..image.nx() {
            let x = image.x(p) / m;
            let i = (x / og.dx() + 0.5).floor() + (og.nx() / 2) as f64;
            if i < 0.0 || i >= og.nx() as f64 {
                continue;
            }
            out[image.index(p, q)] = obj.get(i as usize, j as usize);
        }
    }
    out
}

/// Linear (non-circular) convolution of two same-shape arrays, with the kernel
/// centered at `(nx/2, ny/2)`; the output has the shape of the inputs.
pub(crate) fn convolve_centered(
    signal: &[Complex64],
    kernel: &[Complex64],
    nx: usize,
    ny: usize,
) -> Vec<Complex64> {
    let (px, py) = (2 * nx, 2 * ny);
    let pad = |src: &[Complex64]| {
        let mut buf = vec![Complex64::new(0.0, 0.0); px * py];
        for j in 0..ny {
            buf[j * px..j * px + nx].copy_from_slice(&src[j * nx..(j + 1) * nx]);
        }
        buf
    };
    let plan = Fft2::new(px, py);
    let mut a = pad(signal);
    let mut b = pad(kernel);
    plan.process_raw(&mut a, Direction::Forward);
    plan.process_raw(&mut b, Direction::Forward);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    plan.process_raw(&mut a, Direction::Inverse);
    let norm = 1.0 / (px * py) as f64;
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let row = (j + ny / 2) * px;
        out.extend(a[row + nx / 2..row + nx / 2 + nx].iter().map(|c| c * norm));
    }
    out
}

/// Band-limited image `I(u,v) = ∫∫ h(u-Mx, v-My)·O(x,y)/M dx dy`, evaluated as an
/// FFT convolution on the PSF grid. Samples of the PSF outside its grid are zero.
pub fn form_image(
    obj: &ComplexField,
    psf: &ComplexField,
    magnification: f64,
) -> Result<ComplexField> {
    let m = magnification;
    if !m.is_finite() || m == 0.0 {
        return Err(Error::Config("magnification must be nonzero".into()));
    }
    let og = obj.grid();
    let ig = *psf.grid();
    if og.nx() != ig.nx() || og.ny() != ig.ny() {
        return Err(Error::Grid(format!(
            "object is {}x{} but PSF is {}x{}",
            og.nx(),
            og.ny(),
            ig.nx(),
            ig.ny()
        )));
    }
    if m.abs() == 1.0 && !og.matches(&ig) {
        return Err(Error::Grid(format!(
            "unit magnification needs equal pitches, object ({:e}, {:e}) vs PSF ({:e}, {:e})",
            og.dx(),
            og.dy(),
            ig.dx(),
            ig.dy()
        )));
    }
    let scaled = if m == 1.0 {
        obj.data().to_vec()
    } else {
        magnify(obj, &ig, m)
    };
    // dx dy = du dv / M²
    let weight = ig.dx() * ig.dy() / (m * m * m);
    let conv = convolve_centered(&scaled, psf.data(), ig.nx(), ig.ny());
    ComplexField::from_vec(ig, conv.into_iter().map(|c| c * weight).collect())
}

/// Exact transfer-function propagation over `distance` (negative values
/// back-propagate). Evanescent spatial frequencies are zeroed.
pub fn angular_spectrum_propagate(
    f: &ComplexField,
    distance: f64,
    wavelength: f64,
) -> Result<ComplexField> {
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(Error::Config(format!(
            "wavelength must be > 0, got {wavelength}"
        )));
    }
    if !distance.is_finite() {
        return Err(Error::Config(format!(
            "propagation distance must be finite, got {distance}"
        )));
    }
    if distance == 0.0 {
        return Ok(f.clone());
    }
    let g = *f.grid();
    let plan = Fft2::new(g.nx(), g.ny());
    let mut data = f.data().to_vec();
    plan.process(&mut data, Direction::Forward);
    let dfx = 1.0 / (g.nx() as f64 * g.dx());
    let dfy = 1.0 / (g.ny() as f64 * g.dy());
    let phase_scale = 2.0 * PI * distance / wavelength;
    for q in 0..g.ny() {
        let ly = (q as f64 - (g.ny() / 2) as f64) * dfy * wavelength;
        for p in 0..g.nx() {
            let lx = (p as f64 - (g.nx() / 2) as f64) * dfx * wavelength;
            let arg = 1.0 - lx * lx - ly * ly;
            let idx = g.index(p, q);
            if arg > 0.0 {
                data[idx] *= Complex64::from_polar(1.0, phase_scale * arg.sqrt());
            } else {
                data[idx] = Complex64::new(0.0, 0.0);
            }
        }
    }
    plan.process(&mut data, Direction::Inverse);
    ComplexField::from_vec(g, data)
}
