use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use pbnf::apodize::{
    compare_pipelines_with_images, gaussian_apodize, measure_quality, ApodizerSpec,
};
use pbnf::config::{RunConfig, Settings};
use pbnf::demo::{self, Figure};
use pbnf::field::{line_profile, Axis, ComplexField, GridSpec};
use pbnf::io;
use pbnf::objects::{gen_object, ObjectKind};
use pbnf::pbnf::{
    airy_lobe_masks, apply_pbnf, filter_report, Curvature, FilterMode, PhaseFilterSpec,
};
use pbnf::propagation::fresnel_psf;
use pbnf::zpcih::{decode_calibrated, decode_hologram_with, encode_hologram};
use pbnf::Error;

/// Band-limited imaging, zone-plate holography and phase-based noise filtering.
///
/// Every geometry or filter option can also be set in a flat TOML file passed
/// with --config, using the option name with underscores as the key
/// (e.g. `sigma_over_d = 0.25`). Flags override file values.
#[derive(Parser)]
#[command(name = "pbnf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat TOML config file
    #[arg(long)]
    config: Option<PathBuf>,

    #[command(flatten)]
    settings: Settings,
}

impl Common {
    fn resolve(&self) -> pbnf::Result<RunConfig> {
        let file = match &self.config {
            Some(p) => Settings::load(p)?,
            None => Settings::default(),
        };
        RunConfig::resolve(&file.overlay(self.settings.clone()))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectChoice {
    Ring,
    H,
    Text,
    Point,
    TwoPoint,
}

#[derive(Clone, Copy, ValueEnum)]
enum Plane {
    /// Hologram grid (pitch zp_pitch)
    Hologram,
    /// Image grid of the imaging system (pitch lambda·z/(grid·pitch))
    Image,
}

#[derive(Clone, Copy, ValueEnum)]
enum PupilChoice {
    Circular,
}

#[derive(Subcommand)]
enum Command {
    /// Write a test object field and its PNG preview
    GenObject {
        kind: ObjectChoice,
        /// Inner ring radius in pixels
        #[arg(long, default_value_t = 10.0)]
        r_in: f64,
        /// Outer ring radius in pixels
        #[arg(long, default_value_t = 12.0)]
        r_out: f64,
        /// Stroke width of the letter H in pixels
        #[arg(long, default_value_t = 4)]
        stroke: usize,
        /// Text to render
        #[arg(long = "string", default_value = "MUKT")]
        string: String,
        /// Font pixel size of rendered text
        #[arg(long, default_value_t = 3)]
        scale: usize,
        /// Point column (defaults to the grid center)
        #[arg(long)]
        i: Option<usize>,
        /// Point row (defaults to the grid center)
        #[arg(long)]
        j: Option<usize>,
        /// Second point column
        #[arg(long)]
        i2: Option<usize>,
        /// Second point row
        #[arg(long)]
        j2: Option<usize>,
        #[arg(long, value_enum, default_value = "hologram")]
        plane: Plane,
        #[arg(long, default_value = "object.fld")]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Point spread function of the pupil, with its center-row profile
    Psf {
        #[arg(long, value_enum, default_value = "circular")]
        pupil: PupilChoice,
        #[arg(long, default_value = "psf.fld")]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Record the zone-plate hologram of an incoherent object
    Encode {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "hologram.fld")]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Reconstruct a hologram, rotated so the first-order image sits at π/2
    Decode {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "decoded.fld")]
        out: PathBuf,
        /// Skip the phase gauge rotation
        #[arg(long)]
        raw: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Phase-based noise filter; writes the field and a JSON report
    Filter {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "filtered.fld")]
        out: PathBuf,
        /// Report energies of this many Airy lobes of the configured pupil
        #[arg(long, default_value_t = 0)]
        lobes: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Gaussian-apodized pupil, its point spread function and quality metrics
    Apodize {
        #[arg(long, default_value = "apodize")]
        out_dir: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Apodized imaging versus odd-reject filtering of a point object
    Compare {
        #[arg(long, default_value = "compare")]
        out_dir: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Reproduce one experiment: fig4, fig5, fig6 or fig7
    Demo {
        #[arg(value_parser = parse_figure)]
        figure: Figure,
        /// Defaults to the figure name
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_figure(s: &str) -> Result<Figure, String> {
    s.parse()
}

enum Failure {
    Module(Error),
    Checks(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Module(e)
    }
}

fn with_ext(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}

fn write_complex(path: &Path, f: &ComplexField) -> pbnf::Result<()> {
    io::write_field(path, f)?;
    io::write_intensity_png(&with_ext(path, "png"), f)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn center_profile(path: &Path, f: &ComplexField) -> pbnf::Result<()> {
    let p = line_profile(f, Axis::Row, f.grid().center().1)?;
    io::write_profile_csv(&with_ext(path, "csv"), &p)
}

fn object_kind(
    kind: ObjectChoice,
    g: &GridSpec,
    (r_in, r_out, stroke, scale): (f64, f64, usize, usize),
    text: &str,
    (i, j, i2, j2): (Option<usize>, Option<usize>, Option<usize>, Option<usize>),
) -> ObjectKind {
    let (ci, cj) = g.center();
    match kind {
        ObjectChoice::Ring => ObjectKind::Ring { r_in, r_out },
        ObjectChoice::H => ObjectKind::LetterH { stroke },
        ObjectChoice::Text => ObjectKind::Text {
            text: text.to_string(),
            scale,
        },
        ObjectChoice::Point => ObjectKind::Point {
            i: i.unwrap_or(ci),
            j: j.unwrap_or(cj),
        },
        ObjectChoice::TwoPoint => ObjectKind::TwoPoint {
            i1: i.unwrap_or(ci - 4),
            j1: j.unwrap_or(cj),
            i2: i2.unwrap_or(ci + 4),
            j2: j2.unwrap_or(cj),
        },
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::GenObject {
            kind,
            r_in,
            r_out,
            stroke,
            string,
            scale,
            i,
            j,
            i2,
            j2,
            plane,
            out,
            common,
        } => {
            let cfg = common.resolve()?;
            let g = match plane {
                Plane::Hologram => cfg.hologram_grid()?,
                Plane::Image => cfg.image_grid()?,
            };
            let kind = object_kind(
                kind,
                &g,
                (r_in, r_out, stroke, scale),
                &string,
                (i, j, i2, j2),
            );
            write_complex(&out, &gen_object(&kind, g)?)?;
        }
        Command::Psf { pupil, out, common } => {
            let cfg = common.resolve()?;
            let PupilChoice::Circular = pupil;
            let psf = fresnel_psf(&cfg.pupil()?, &cfg.imaging()?)?;
            write_complex(&out, &psf)?;
            center_profile(&out, &psf)?;
        }
        Command::Encode { input, out, common } => {
            let cfg = common.resolve()?;
            let obj = io::read_field(&input)?;
            let h = encode_hologram(&obj, &cfg.plate, obj.grid(), cfg.wavelength)?;
            io::write_hologram(&out, &h)?;
            io::write_png(&with_ext(&out, "png"), h.grid(), h.data())?;
            println!("wrote {}", out.display());
        }
        Command::Decode {
            input,
            out,
            raw,
            common,
        } => {
            let cfg = common.resolve()?;
            let h = io::read_hologram(&input)?;
            let decoded = if raw {
                decode_hologram_with(&h, &cfg.plate, cfg.wavelength, cfg.decode)?
            } else {
                decode_calibrated(&h, &cfg.plate, cfg.wavelength, cfg.decode)?.0
            };
            write_complex(&out, &decoded)?;
            center_profile(&out, &decoded)?;
        }
        Command::Filter {
            input,
            out,
            lobes,
            common,
        } => {
            let cfg = common.resolve()?;
            let f = io::read_field(&input)?;
            let filtered = apply_pbnf(&f, &cfg.filter)?;
            let masks = airy_lobe_masks(
                f.grid(),
                cfg.wavelength,
                cfg.distance,
                cfg.pupil_diameter,
                lobes,
            );
            let report = filter_report(&f, &filtered, &masks)?;
            write_complex(&out, &filtered)?;
            center_profile(&out, &filtered)?;
            io::write_json(
                &with_ext(&out, "json"),
                &json!({ "filter": cfg.filter, "report": report }),
            )?;
        }
        Command::Apodize { out_dir, common } => {
            let cfg = common.resolve()?;
            let apod = ApodizerSpec {
                sigma: cfg.sigma_over_d * cfg.pupil_diameter,
            };
            let pupil = gaussian_apodize(&cfg.pupil()?, &apod)?;
            let psf = fresnel_psf(&pupil, &cfg.imaging()?)?;
            let quality = measure_quality(&psf, psf.grid().center())?;
            std::fs::create_dir_all(&out_dir).map_err(Error::from)?;
            write_complex(&out_dir.join("pupil.fld"), pupil.transparency())?;
            write_complex(&out_dir.join("psf.fld"), &psf)?;
            center_profile(&out_dir.join("psf.fld"), &psf)?;
            io::write_json(
                &out_dir.join("metrics.json"),
                &json!({ "apodizer": apod, "quality": quality }),
            )?;
        }
        Command::Compare { out_dir, common } => {
            let cfg = common.resolve()?;
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
            let apod = ApodizerSpec {
                sigma: cfg.sigma_over_d * cfg.pupil_diameter,
            };
            let (record, images) = compare_pipelines_with_images(
                &obj,
                &cfg.pupil()?,
                &cfg.imaging()?,
                &apod,
                &filter,
            )?;
            std::fs::create_dir_all(&out_dir).map_err(Error::from)?;
            for (name, f) in [
                ("apodized", &images.apodized),
                ("unapodized", &images.raw),
                ("filtered", &images.filtered),
            ] {
                let path = out_dir.join(format!("{name}.fld"));
                write_complex(&path, f)?;
                center_profile(&path, f)?;
            }
            io::write_json(&out_dir.join("metrics.json"), &record)?;
            println!(
                "resolution_claim={} signal_claim={}",
                record.resolution_claim, record.signal_claim
            );
        }
        Command::Demo {
            figure,
            out_dir,
            common,
        } => {
            let cfg = common.resolve()?;
            let out = demo::run(figure, &cfg)?;
            let dir = out_dir.unwrap_or_else(|| PathBuf::from(figure.to_string()));
            out.write(&dir)?;
            for c in &out.checks {
                println!(
                    "{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            let failed: Vec<String> = out.failures().iter().map(|c| c.name.clone()).collect();
            if !failed.is_empty() {
                return Err(Failure::Checks(failed));
            }
            println!("wrote {}", dir.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Module(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(Failure::Checks(names)) => {
            eprintln!("error: assertion failed: {}", names.join(", "));
            ExitCode::from(4)
        }
    }
}
