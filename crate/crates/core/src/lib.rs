//! Band-limited imaging simulation with phase-based Airy noise filtering.
//!
//! The crate models a linear, band-limited imaging chain (pupil → point spread
//! function → image), zone-plate coded incoherent holography (encode a
//! shadowgram, decode it by simulated coherent reconstruction), and a filter
//! that accepts or rejects samples of the complex image by their phase relative
//! to the expected phase of the central lobe. A Gaussian pupil apodizer and
//! profile-based quality metrics provide the baseline comparison.

pub mod airy;
pub mod apodize;
pub mod config;
pub mod demo;
pub mod error;
pub mod fft;
pub mod field;
pub mod io;
pub mod objects;
pub mod pbnf;
pub mod propagation;
pub mod zpcih;

pub use error::{Error, Result};
