//! Gaussian pupil apodization and profile-based image quality metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{line_profile, Axis, ComplexField, ImagingConfig, LineProfile};
use crate::pbnf::{apply_pbnf, PhaseFilterSpec};
use crate::propagation::{form_image, fresnel_psf, PupilFunction};

/// Gaussian amplitude taper `exp(-r²/σ²)` centered on the pupil.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApodizerSpec {
    pub sigma: f64,
}

pub fn gaussian_apodize(pupil: &PupilFunction, spec: &ApodizerSpec) -> Result<PupilFunction> {
    let sigma = spec.sigma;
    if !(sigma > 0.0) {
        return Err(Error::Spec(format!(
            "apodizer sigma must be > 0, got {sigma}"
        )));
    }
    let g = *pupil.grid();
    let t = pupil.transparency();
    let tapered = ComplexField::from_fn(g, |i, j| {
        let r2 = g.x(i).powi(2) + g.y(j).powi(2);
        t.get(i, j) * (-r2 / (sigma * sigma)).exp()
    })?;
    PupilFunction::with_aperture(tapered, pupil.aperture())
}

/// Full width at half maximum, linearly interpolated between the samples that
/// bracket half of the global maximum on each side.
pub fn measure_fwhm(profile: &LineProfile) -> Result<f64> {
    let v = &profile.intensity;
    let (peak_idx, peak) = v
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (k, &x)| {
            if x > best.1 {
                (k, x)
            } else {
                best
            }
        });
    if v.is_empty() || !(peak > 0.0) {
        return Err(Error::NoHalfCrossing("left"));
    }
    let half = peak / 2.0;
    let pos = &profile.positions;
    let crossing = |k: usize, inner: usize| -> f64 {
        // v[k] <= half < v[inner]
        let t = (half - v[k]) / (v[inner] - v[k]);
        pos[k] + t * (pos[inner] - pos[k])
    };
    let left = (0..peak_idx)
        .rev()
        .find(|&k| v[k] <= half)
        .map(|k| crossing(k, k + 1))
        .ok_or(Error::NoHalfCrossing("left"))?;
    let right = (peak_idx + 1..v.len())
        .find(|&k| v[k] <= half)
        .map(|k| crossing(k, k - 1))
        .ok_or(Error::NoHalfCrossing("right"))?;
    Ok(right - left)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityMetrics {
    /// Meters along the center row.
    pub fwhm: f64,
    pub peak_intensity: f64,
    /// Brightest sample of the first side lobe over the center sample.
    pub first_sidelobe_ratio: f64,
    /// Share of the total energy outside the first dark ring.
    pub total_sidelobe_fraction: f64,
}

/// Index of the first local minimum walking away from `start` by `step`.
fn first_minimum(v: &[f64], start: usize, step: isize) -> usize {
    let mut k = start;
    loop {
        let next = k as isize + step;
        if next < 0 || next >= v.len() as isize || v[next as usize] >= v[k] {
            return k;
        }
        k = next as usize;
    }
}

/// Brightest sample of the lobe that starts at the minimum `m1`.
fn next_lobe_peak(v: &[f64], m1: usize, step: isize) -> f64 {
    let mut k = m1;
    let mut best = v[m1];
    // climb, then stop at the next minimum
    loop {
        let next = k as isize + step;
        if next < 0 || next >= v.len() as isize || v[next as usize] < v[k] {
            break;
        }
        k = next as usize;
        best = best.max(v[k]);
    }
    best
}

/// Quality of an image around `center`: FWHM and peak from the center-row
/// profile, side lobes bounded by the first profile minima on either side.
pub fn measure_quality(image: &ComplexField, center: (usize, usize)) -> Result<QualityMetrics> {
    let (ci, cj) = center;
    let g = *image.grid();
    if ci >= g.nx() {
        return Err(Error::Index {
            index: ci,
            len: g.nx(),
        });
    }
    let profile = line_profile(image, Axis::Row, cj)?;
    let fwhm = measure_fwhm(&profile)?;
    let v = &profile.intensity;
    let peak = v.iter().cloned().fold(0.0, f64::max);

    let right_min = first_minimum(v, ci, 1);
    let left_min = first_minimum(v, ci, -1);
    let lobe = next_lobe_peak(v, right_min, 1).max(next_lobe_peak(v, left_min, -1));
    let first_sidelobe_ratio = if v[ci] > 0.0 { lobe / v[ci] } else { 0.0 };

    let ring = 0.5 * ((right_min - ci) + (ci - left_min)) as f64;
    let (mut inside, mut total) = (0.0, 0.0);
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let e = image.get(i, j).norm_sqr();
            let r = ((i as f64 - ci as f64).powi(2) + (j as f64 - cj as f64).powi(2)).sqrt();
            total += e;
            if r < ring {
                inside += e;
            }
        }
    }
    let total_sidelobe_fraction = if total > 0.0 {
        (total - inside) / total
    } else {
        0.0
    };

    Ok(QualityMetrics {
        fwhm,
        peak_intensity: peak,
        first_sidelobe_ratio,
        total_sidelobe_fraction,
    })
}

/// Gaussian-apodized imaging versus unapodized imaging followed by phase
/// filtering, on the same object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub sigma: f64,
    pub pupil_extent: f64,
    pub apodized: QualityMetrics,
    pub filtered: QualityMetrics,
    /// Filtered FWHM strictly below the apodized FWHM.
    pub resolution_claim: bool,
    /// Filtered peak strictly above the apodized peak.
    pub signal_claim: bool,
}

pub struct ComparisonImages {
    pub apodized: ComplexField,
    pub raw: ComplexField,
    pub filtered: ComplexField,
}

/// Run both pipelines and return the images alongside the record.
pub fn compare_pipelines_with_images(
    obj: &ComplexField,
    pupil: &PupilFunction,
    cfg: &ImagingConfig,
    apod: &ApodizerSpec,
    filter: &PhaseFilterSpec,
) -> Result<(ComparisonRecord, ComparisonImages)> {
    let tapered = gaussian_apodize(pupil, apod)?;
    let apod_image = form_image(obj, &fresnel_psf(&tapered, cfg)?, cfg.magnification)?;
    let raw = form_image(obj, &fresnel_psf(pupil, cfg)?, cfg.magnification)?;
    let filtered = apply_pbnf(&raw, filter)?;

    let center = raw.peak().0;
    let apodized = measure_quality(&apod_image, center)?;
    let filtered_q = measure_quality(&filtered, center)?;
    let record = ComparisonRecord {
        sigma: apod.sigma,
        pupil_extent: pupil.extent(),
        apodized,
        filtered: filtered_q,
        resolution_claim: filtered_q.fwhm < apodized.fwhm,
        signal_claim: filtered_q.peak_intensity > apodized.peak_intensity,
    };
    Ok((
        record,
        ComparisonImages {
            apodized: apod_image,
            raw,
            filtered,
        },
    ))
}

pub fn compare_pipelines(
    obj: &ComplexField,
    pupil: &PupilFunction,
    cfg: &ImagingConfig,
    apod: &ApodizerSpec,
    filter: &PhaseFilterSpec,
) -> Result<ComparisonRecord> {
    compare_pipelines_with_images(obj, pupil, cfg, apod, filter).map(|(r, _)| r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GridSpec;
    use num_complex::Complex64;

    #[test]
    fn fwhm_exact_half_samples() {
        let p = LineProfile::uniform(0.0, 1.0, vec![0.0, 0.5, 1.0, 0.5, 0.0]);
        assert_eq!(measure_fwhm(&p).unwrap(), 2.0);
    }

    #[test]
    fn fwhm_of_sampled_gaussian() {
        // analytic: FWHM = 2√(2 ln 2)·σ
        let sigma = 7.3;
        let v: Vec<f64> = (0..201)
            .map(|k| (-(k as f64 - 100.0).powi(2) / (2.0 * sigma * sigma)).exp())
            .collect();
        let w = measure_fwhm(&LineProfile::uniform(-100.0, 1.0, v)).unwrap();
        let want = 2.0 * (2.0 * 2f64.ln()).sqrt() * sigma;
        assert!((w - want).abs() < 0.02 * want);
    }

    #[test]
    fn fwhm_errors() {
        let flat = LineProfile::uniform(0.0, 1.0, vec![1.0; 9]);
        assert!(matches!(measure_fwhm(&flat), Err(Error::NoHalfCrossing(_))));
        let edge = LineProfile::uniform(0.0, 1.0, vec![1.0, 0.9, 0.1]);
        assert!(matches!(
            measure_fwhm(&edge),
            Err(Error::NoHalfCrossing("left"))
        ));
        let zero = LineProfile::uniform(0.0, 1.0, vec![0.0; 5]);
        assert!(measure_fwhm(&zero).is_err());
    }

    #[test]
    fn apodizer_values() {
        let g = GridSpec::square(64, 1e-5).unwrap();
        let pupil = PupilFunction::circular(g, 50e-5).unwrap();
        let s = ApodizerSpec { sigma: 10e-5 };
        let a = gaussian_apodize(&pupil, &s).unwrap();
        assert_eq!(a.transparency().get(32, 32), Complex64::new(1.0, 0.0));
        // r = σ exactly at 10 samples along x
        let v = a.transparency().get(42, 32).re;
        assert!((v - (-1f64).exp()).abs() < 1e-15);
        assert_eq!(a.aperture(), pupil.aperture());

        let flat = gaussian_apodize(&pupil, &ApodizerSpec { sigma: 1e6 * 50e-5 }).unwrap();
        assert!(
            flat.transparency()
                .max_relative_difference(pupil.transparency())
                < 1e-9
        );
        assert!(matches!(
            gaussian_apodize(&pupil, &ApodizerSpec { sigma: 0.0 }),
            Err(Error::Spec(_))
        ));
    }

    #[test]
    fn delta_quality() {
        let g = GridSpec::square(32, 1.0).unwrap();
        let f = ComplexField::from_fn(g, |i, j| {
            Complex64::new(if (i, j) == (16, 16) { 1.0 } else { 0.0 }, 0.0)
        })
        .unwrap();
        let q = measure_quality(&f, (16, 16)).unwrap();
        assert!(q.fwhm <= 2.0);
        assert_eq!(q.peak_intensity, 1.0);
        assert_eq!(q.first_sidelobe_ratio, 0.0);
        assert_eq!(q.total_sidelobe_fraction, 0.0);
    }

    #[test]
    fn metrics_ignore_global_phase() {
        let g = GridSpec::square(32, 1.0).unwrap();
        let f = ComplexField::from_fn(g, |i, j| {
            let r2 = (i as f64 - 16.0).powi(2) + (j as f64 - 16.0).powi(2);
            Complex64::new((r2 / 3.0).sqrt().cos() * (-r2 / 40.0).exp(), 0.0)
        })
        .unwrap();
        let rotated = f.scale(Complex64::from_polar(1.0, 1.234)).unwrap();
        let a = measure_quality(&f, (16, 16)).unwrap();
        let b = measure_quality(&rotated, (16, 16)).unwrap();
        assert!((a.fwhm - b.fwhm).abs() < 1e-12);
        assert!((a.peak_intensity - b.peak_intensity).abs() < 1e-12);
        assert!((a.total_sidelobe_fraction - b.total_sidelobe_fraction).abs() < 1e-12);
    }
}
