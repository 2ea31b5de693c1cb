//! One-call reproductions of the ring, window sweep, text and apodizer
//! comparison experiments. Each run returns its panels, center-row profiles,
//! a metrics summary and the named checks the experiment must satisfy.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::airy;
use crate::apodize::{compare_pipelines_with_images, ApodizerSpec};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::field::{line_profile, principal, Axis, ComplexField, LineProfile};
use crate::io::{self, FieldData};
use crate::objects::{gen_object, ObjectKind};
use crate::pbnf::{
    airy_lobe_masks, apply_pbnf, expected_lobe_phase, filter_report, Curvature, FilterMode,
    PhaseFilterSpec, DEFAULT_EPSILON,
};
use crate::propagation::fresnel_psf;
use crate::zpcih::{decode_calibrated, encode_hologram, Hologram};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

impl FromStr for Figure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fig4" => Ok(Figure::Fig4),
            "fig5" => Ok(Figure::Fig5),
            "fig6" => Ok(Figure::Fig6),
            "fig7" => Ok(Figure::Fig7),
            other => Err(format!(
                "unknown figure '{other}', expected fig4, fig5, fig6 or fig7"
            )),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }
}

pub struct DemoOutput {
    pub figure: Figure,
    pub panels: Vec<(String, FieldData)>,
    pub profiles: Vec<(String, LineProfile)>,
    pub metrics: Value,
    pub checks: Vec<Check>,
}

impl DemoOutput {
    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    fn add_field(&mut self, name: &str, f: ComplexField) -> Result<()> {
        let row = f.grid().center().1;
        self.profiles
            .push((name.to_string(), line_profile(&f, Axis::Row, row)?));
        self.panels.push((name.to_string(), FieldData::Complex(f)));
        Ok(())
    }

    /// Writes `<panel>.fld`, `<panel>.png`, `<profile>.csv` and `metrics.json`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, data) in &self.panels {
            match data {
                FieldData::Complex(f) => {
                    io::write_field(&dir.join(format!("{name}.fld")), f)?;
                    io::write_intensity_png(&dir.join(format!("{name}.png")), f)?;
                }
                FieldData::Real(g, v) => {
                    let h = Hologram::new(*g, v.clone())?;
                    io::write_hologram(&dir.join(format!("{name}.fld")), &h)?;
                    io::write_png(&dir.join(format!("{name}.png")), g, v)?;
                }
            }
        }
        for (name, p) in &self.profiles {
            io::write_profile_csv(&dir.join(format!("{name}.csv")), p)?;
        }
        io::write_json(
            &dir.join("metrics.json"),
            &json!({
                "figure": self.figure.to_string(),
                "metrics": self.metrics,
                "checks": self.checks,
            }),
        )
    }
}

pub fn run(figure: Figure, cfg: &RunConfig) -> Result<DemoOutput> {
    match figure {
        Figure::Fig4 => ring_demo(cfg),
        Figure::Fig5 => window_demo(cfg),
        Figure::Fig6 => text_demo(cfg),
        Figure::Fig7 => apodizer_demo(cfg),
    }
}

fn empty(figure: Figure) -> DemoOutput {
    DemoOutput {
        figure,
        panels: Vec::new(),
        profiles: Vec::new(),
        metrics: Value::Null,
        checks: Vec::new(),
    }
}

fn hologram_filters(cfg: &RunConfig) -> Result<(PhaseFilterSpec, PhaseFilterSpec)> {
    let mut odd = PhaseFilterSpec::new(FilterMode::OddReject, PI / 2.0, Curvature::None)?;
    let mut all = PhaseFilterSpec::new(
        FilterMode::BaseOnly {
            epsilon: DEFAULT_EPSILON,
        },
        PI / 2.0,
        Curvature::None,
    )?;
    odd.amp_floor = cfg.filter.amp_floor;
    all.amp_floor = cfg.filter.amp_floor;
    Ok((odd, all))
}

/// Object, hologram, calibrated decode and both filtered decodes.
fn hologram_panels(figure: Figure, cfg: &RunConfig, obj: ComplexField) -> Result<DemoOutput> {
    let g = cfg.hologram_grid()?;
    let h = encode_hologram(&obj, &cfg.plate, &g, cfg.wavelength)?;
    let (decoded, _) = decode_calibrated(&h, &cfg.plate, cfg.wavelength, cfg.decode)?;
    let (odd, all) = hologram_filters(cfg)?;
    let odd_out = apply_pbnf(&decoded, &odd)?;
    let all_out = apply_pbnf(&decoded, &all)?;

    let mut out = empty(figure);
    out.add_field("object", obj)?;
    out.panels
        .push(("hologram".into(), FieldData::Real(g, h.data().to_vec())));
    out.add_field("decoded", decoded)?;
    out.add_field("odd_filtered", odd_out)?;
    out.add_field("all_filtered", all_out)?;
    Ok(out)
}

fn field_of<'a>(out: &'a DemoOutput, name: &str) -> &'a ComplexField {
    out.panels
        .iter()
        .find_map(|(n, d)| match d {
            FieldData::Complex(f) if n == name => Some(f),
            _ => None,
        })
        .expect("panel present")
}

/// Max intensity over the samples where `support` is nonzero.
fn support_max(f: &ComplexField, support: &ComplexField) -> f64 {
    f.data()
        .iter()
        .zip(support.data())
        .filter(|(_, s)| s.norm_sqr() > 0.0)
        .map(|(c, _)| c.norm_sqr())
        .fold(0.0, f64::max)
}

fn ring_demo(cfg: &RunConfig) -> Result<DemoOutput> {
    let g = cfg.hologram_grid()?;
    let obj = gen_object(
        &ObjectKind::Ring {
            r_in: cfg.ring_r_in,
            r_out: cfg.ring_r_out,
        },
        g,
    )?;
    let mut out = hologram_panels(Figure::Fig4, cfg, obj)?;
    let (ci, cj) = g.center();
    let obj = field_of(&out, "object");
    let stats = |name: &str| {
        let f = field_of(&out, name);
        (f.get(ci, cj).norm_sqr(), support_max(f, obj))
    };
    let (center, ring) = stats("decoded");
    let (odd_center, odd_ring) = stats("odd_filtered");
    let (all_center, all_ring) = stats("all_filtered");

    let r1 = cfg.plate.r1 / g.dx();
    let zone_radius = cfg.plate.aperture_radius / g.dx();
    out.metrics = json!({
        "ring_r_in_px": cfg.ring_r_in,
        "ring_r_out_px": cfg.ring_r_out,
        "decoded_first_zero_px": 0.61 * r1 * r1 / zone_radius,
        "decoded": {"center": center, "ring_max": ring, "center_over_ring": center / ring},
        "odd_filtered": {"center": odd_center, "ring_max": odd_ring, "center_over_ring": odd_center / odd_ring},
        "all_filtered": {"center": all_center, "ring_max": all_ring},
    });
    out.checks.push(Check::new(
        "decoded_center_exceeds_ring",
        center > ring,
        format!("center {center:e} vs ring max {ring:e}"),
    ));
    out.checks.push(Check::new(
        "odd_reject_suppresses_center",
        odd_center < 0.1 * odd_ring,
        format!(
            "center {odd_center:e} vs 10% of ring max {:e}",
            0.1 * odd_ring
        ),
    ));
    Ok(out)
}

fn text_demo(cfg: &RunConfig) -> Result<DemoOutput> {
    let g = cfg.hologram_grid()?;
    let obj = gen_object(
        &ObjectKind::Text {
            text: cfg.text.clone(),
            scale: cfg.text_scale,
        },
        g,
    )?;
    let mut out = hologram_panels(Figure::Fig6, cfg, obj)?;
    let obj = field_of(&out, "object");
    // share of energy off the object's strokes
    let background = |name: &str| {
        let f = field_of(&out, name);
        let (mut off, mut total) = (0.0, 0.0);
        for (c, s) in f.data().iter().zip(obj.data()) {
            total += c.norm_sqr();
            if s.norm_sqr() == 0.0 {
                off += c.norm_sqr();
            }
        }
        off / total
    };
    let before = background("decoded");
    let odd = background("odd_filtered");
    let all = background("all_filtered");
    out.metrics = json!({
        "text": cfg.text,
        "scale": cfg.text_scale,
        "background_fraction": {"decoded": before, "odd_filtered": odd, "all_filtered": all},
    });
    out.checks.push(Check::new(
        "odd_reject_lowers_background",
        odd < before,
        format!("background share {odd:.4} after vs {before:.4} before"),
    ));
    out.checks.push(Check::new(
        "base_only_lowers_background",
        all < before,
        format!("background share {all:.4} after vs {before:.4} before"),
    ));
    Ok(out)
}

/// Window end points spanning the phase spread of the second side lobe of the
/// point spread function, relative to a zero base phase.
pub fn second_lobe_window_ends(cfg: &RunConfig, steps: usize) -> Result<Vec<f64>> {
    let lz = (cfg.wavelength, cfg.distance);
    let spec = PhaseFilterSpec::new(
        FilterMode::OddReject,
        0.0,
        Curvature::Quadratic {
            distance: lz.1,
            wavelength: lz.0,
            origin: (0.0, 0.0),
        },
    )?;
    let inner = airy::zero_radius(2, lz.0, lz.1, cfg.pupil_diameter);
    let outer = airy::zero_radius(3, lz.0, lz.1, cfg.pupil_diameter);
    let lo = principal(expected_lobe_phase(2, inner, 0.0, &spec)?);
    let hi = principal(expected_lobe_phase(2, outer, 0.0, &spec)?);
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Config(format!(
            "second lobe phase span [{lo}, {hi}] wraps; shorten the curvature"
        )));
    }
    Ok((0..steps)
        .map(|k| lo + (hi - lo) * k as f64 / (steps - 1).max(1) as f64)
        .collect())
}

fn window_demo(cfg: &RunConfig) -> Result<DemoOutput> {
    let imaging = cfg.imaging()?;
    let psf = fresnel_psf(&cfg.pupil()?, &imaging)?;
    let ig = *psf.grid();
    let masks = airy_lobe_masks(&ig, cfg.wavelength, cfg.distance, cfg.pupil_diameter, 3);
    let quadratic = Curvature::Quadratic {
        distance: cfg.distance,
        wavelength: cfg.wavelength,
        origin: (0.0, 0.0),
    };
    let odd = PhaseFilterSpec::new(FilterMode::OddReject, 0.0, quadratic)?;
    let all = PhaseFilterSpec::new(
        FilterMode::BaseOnly {
            epsilon: DEFAULT_EPSILON,
        },
        0.0,
        Curvature::None,
    )?;

    let mut out = empty(Figure::Fig5);
    out.add_field("psf", psf.clone())?;
    out.add_field("odd_filtered", apply_pbnf(&psf, &odd)?)?;
    out.add_field("all_filtered", apply_pbnf(&psf, &all)?)?;

    let ends = second_lobe_window_ends(cfg, 5)?;
    let mut retained = Vec::with_capacity(ends.len());
    for (k, &hi) in ends.iter().enumerate() {
        let spec = PhaseFilterSpec::new(FilterMode::Window { lo: 0.0, hi }, 0.0, Curvature::None)?;
        let filtered = apply_pbnf(&psf, &spec)?;
        let report = filter_report(&psf, &filtered, &masks[2..3])?;
        retained.push(report.masks[0].ratio);
        out.add_field(&format!("window_{k}"), filtered)?;
    }
    let monotone = retained.windows(2).all(|w| w[1] >= w[0]);
    out.metrics = json!({
        "window_lo": 0.0,
        "window_hi": ends,
        "second_lobe_retained": retained,
    });
    out.checks.push(Check::new(
        "second_lobe_retention_nondecreasing",
        monotone,
        format!("retained fractions {retained:?}"),
    ));
    Ok(out)
}

pub const APODIZER_FRACTIONS: [f64; 3] = [0.125, 0.25, 0.5];

fn apodizer_demo(cfg: &RunConfig) -> Result<DemoOutput> {
    let imaging = cfg.imaging()?;
    let pupil = cfg.pupil()?;
    let ig = cfg.image_grid()?;
    let (ci, cj) = ig.center();
    let obj = gen_object(&ObjectKind::Point { i: ci, j: cj }, ig)?;
    let filter = PhaseFilterSpec::new(
        FilterMode::OddReject,
        0.0,
        Curvature::Quadratic {
            distance: cfg.distance,
            wavelength: cfg.wavelength,
            origin: (0.0, 0.0),
        },
    )?;

    let mut out = empty(Figure::Fig7);
    let mut records = Vec::new();
    for (k, frac) in APODIZER_FRACTIONS.iter().enumerate() {
        let apod = ApodizerSpec {
            sigma: frac * cfg.pupil_diameter,
        };
        let (rec, images) = compare_pipelines_with_images(&obj, &pupil, &imaging, &apod, &filter)?;
        let tag = format!("sigma_d{}", (1.0 / frac).round());
        if k == 0 {
            out.add_field("unapodized", images.raw)?;
            out.add_field("filtered", images.filtered)?;
        }
        out.add_field(&format!("apodized_{tag}"), images.apodized)?;
        out.checks.push(Check::new(
            format!("resolution_{tag}"),
            rec.resolution_claim,
            format!(
                "FWHM filtered {:e} m vs apodized {:e} m",
                rec.filtered.fwhm, rec.apodized.fwhm
            ),
        ));
        out.checks.push(Check::new(
            format!("signal_{tag}"),
            rec.signal_claim,
            format!(
                "peak filtered {:e} vs apodized {:e}",
                rec.filtered.peak_intensity, rec.apodized.peak_intensity
            ),
        ));
        records.push(rec);
    }
    out.metrics = json!({ "records": records });
    Ok(out)
}
