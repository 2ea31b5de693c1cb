//! Run configuration: a flat TOML table whose keys double as command line flags.
//!
//! Every key is optional. A value given on the command line replaces the value
//! from the file, which replaces the built-in default. Resolution validates the
//! whole geometry before any output is written.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{GridSpec, ImagingConfig};
use crate::pbnf::{Curvature, FilterMode, PhaseFilterSpec, DEFAULT_EPSILON};
use crate::propagation::{check_pupil_sampling, image_grid, PupilFunction};
use crate::zpcih::{DecodeOptions, ZonePlateSpec, ZoneProfile};

macro_rules! settings {
    ($( $(#[doc = $doc:literal])* $name:ident : $ty:ty ),* $(,)?) => {
        /// Partially specified configuration, as read from a file or flags.
        #[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, clap::Args)]
        #[serde(deny_unknown_fields)]
        pub struct Settings {
            $( $(#[doc = $doc])* #[arg(long)] pub $name: Option<$ty>, )*
        }

        impl Settings {
            /// Keys set in `top` win.
            pub fn overlay(self, top: Settings) -> Settings {
                Settings { $( $name: top.$name.or(self.$name), )* }
            }
        }

        /// Names of all keys accepted in a config file.
        pub const KEYS: &[&str] = &[$( stringify!($name), )*];
    };
}

settings! {
    /// Samples per side of the square grids [512]
    grid: usize,
    /// Pupil and object sample pitch in meters [2e-5]
    pitch: f64,
    /// Wavelength in meters [6.328e-7]
    lambda: f64,
    /// Pupil to image distance in meters [d·pitch/lambda, the sampling limit]
    z: f64,
    /// Circular pupil diameter in meters [9.8e-4]
    d: f64,
    /// Lateral magnification [1]
    m: f64,
    /// Hologram sample pitch in meters [1e-5]
    zp_pitch: f64,
    /// Innermost zone radius in meters [3.14e-4]
    r1: f64,
    /// Zone plate outer radius in meters [1.6e-3]
    zp_radius: f64,
    /// Zone plate profile: sinusoidal or binary [sinusoidal]
    zp_profile: String,
    /// Subtract a low-pass bias estimate before decoding [true]
    subtract_bias: bool,
    /// Filter mode: odd-reject, base-only or window [odd-reject]
    mode: String,
    /// Acceptance half-width of base-only mode in radians [0.2]
    epsilon: f64,
    /// Window start in radians, relative to the base phase [0]
    window_lo: f64,
    /// Window end in radians, relative to the base phase [π/2]
    window_hi: f64,
    /// Expected phase of the central lobe in radians [π/2]
    base_phase: f64,
    /// Lobe curvature model: none or quadratic [none]
    curvature: String,
    /// Distance of the quadratic curvature in meters [z]
    curvature_z: f64,
    /// Curvature origin x in meters [0]
    origin_x: f64,
    /// Curvature origin y in meters [0]
    origin_y: f64,
    /// Absolute amplitude floor [1e-9 of the peak amplitude]
    amp_floor: f64,
    /// Apodizer width as a fraction of the pupil diameter [0.25]
    sigma_over_d: f64,
    /// Inner ring radius of the ring demo in pixels [5.2]
    ring_r_in: f64,
    /// Outer ring radius of the ring demo in pixels [5.4]
    ring_r_out: f64,
    /// Text of the text demo [MUKT]
    text: String,
    /// Text demo glyph scale in pixels [3]
    text_scale: usize,
}

impl Settings {
    pub fn from_toml(text: &str) -> Result<Settings> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Settings> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("{}: {e}", path.display()),
            ))
        })?;
        Settings::from_toml(&text)
    }
}

/// Fully resolved and validated configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub grid: usize,
    pub pitch: f64,
    pub wavelength: f64,
    pub distance: f64,
    pub pupil_diameter: f64,
    pub magnification: f64,
    pub zp_pitch: f64,
    pub plate: ZonePlateSpec,
    pub decode: DecodeOptions,
    pub filter: PhaseFilterSpec,
    pub sigma_over_d: f64,
    pub ring_r_in: f64,
    pub ring_r_out: f64,
    pub text: String,
    pub text_scale: usize,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Config(format!("{name} must be > 0, got {v}")))
    }
}

impl RunConfig {
    pub fn resolve(s: &Settings) -> Result<RunConfig> {
        let grid = s.grid.unwrap_or(512);
        let pitch = positive("pitch", s.pitch.unwrap_or(2e-5))?;
        let wavelength = positive("lambda", s.lambda.unwrap_or(632.8e-9))?;
        let pupil_diameter = positive("d", s.d.unwrap_or(9.8e-4))?;
        let distance = positive("z", s.z.unwrap_or(pupil_diameter * pitch / wavelength))?;
        let magnification = s.m.unwrap_or(1.0);

        let zp_pitch = positive("zp_pitch", s.zp_pitch.unwrap_or(1e-5))?;
        let profile = match s.zp_profile.as_deref().unwrap_or("sinusoidal") {
            "sinusoidal" => ZoneProfile::Sinusoidal,
            "binary" => ZoneProfile::Binary,
            other => return Err(Error::Config(format!("unknown zp_profile '{other}'"))),
        };
        let plate = ZonePlateSpec::new(
            s.r1.unwrap_or(3.14e-4),
            profile,
            s.zp_radius.unwrap_or(1.6e-3),
        )?;

        let mode = match s.mode.as_deref().unwrap_or("odd-reject") {
            "odd-reject" => FilterMode::OddReject,
            "base-only" => FilterMode::BaseOnly {
                epsilon: s.epsilon.unwrap_or(DEFAULT_EPSILON),
            },
            "window" => FilterMode::Window {
                lo: s.window_lo.unwrap_or(0.0),
                hi: s.window_hi.unwrap_or(PI / 2.0),
            },
            other => return Err(Error::Config(format!("unknown mode '{other}'"))),
        };
        let curvature = match s.curvature.as_deref().unwrap_or("none") {
            "none" => Curvature::None,
            "quadratic" => Curvature::Quadratic {
                distance: s.curvature_z.unwrap_or(distance),
                wavelength,
                origin: (s.origin_x.unwrap_or(0.0), s.origin_y.unwrap_or(0.0)),
            },
            other => return Err(Error::Config(format!("unknown curvature '{other}'"))),
        };
        let mut filter = PhaseFilterSpec::new(mode, s.base_phase.unwrap_or(PI / 2.0), curvature)?;
        filter.amp_floor = s.amp_floor;
        filter.validate()?;

        let cfg = RunConfig {
            grid,
            pitch,
            wavelength,
            distance,
            pupil_diameter,
            magnification,
            zp_pitch,
            plate,
            decode: DecodeOptions {
                subtract_bias: s.subtract_bias.unwrap_or(true),
            },
            filter,
            sigma_over_d: positive("sigma_over_d", s.sigma_over_d.unwrap_or(0.25))?,
            ring_r_in: s.ring_r_in.unwrap_or(5.2),
            ring_r_out: s.ring_r_out.unwrap_or(5.4),
            text: s.text.clone().unwrap_or_else(|| "MUKT".into()),
            text_scale: s.text_scale.unwrap_or(3),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every derived geometry against its sampling bound.
    pub fn validate(&self) -> Result<()> {
        let pupil = PupilFunction::circular(self.pupil_grid()?, self.pupil_diameter)?;
        check_pupil_sampling(&pupil, &self.imaging()?)?;
        self.plate.check_sampling(&self.hologram_grid()?)?;
        if self.text_scale == 0 {
            return Err(Error::Config("text_scale must be >= 1".into()));
        }
        Ok(())
    }

    pub fn pupil_grid(&self) -> Result<GridSpec> {
        GridSpec::square(self.grid, self.pitch)
    }

    pub fn hologram_grid(&self) -> Result<GridSpec> {
        GridSpec::square(self.grid, self.zp_pitch)
    }

    pub fn imaging(&self) -> Result<ImagingConfig> {
        ImagingConfig::new(self.wavelength, self.distance, self.magnification, 1.0)
    }

    pub fn image_grid(&self) -> Result<GridSpec> {
        image_grid(&self.pupil_grid()?, &self.imaging()?)
    }

    pub fn pupil(&self) -> Result<PupilFunction> {
        PupilFunction::circular(self.pupil_grid()?, self.pupil_diameter)
    }
}
