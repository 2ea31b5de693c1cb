//! Analytic Airy pattern of a uniformly transmitting circular aperture.
//!
//! Used to build lobe masks and as an independent reference for the
//! FFT-synthesized point spread functions.

use std::f64::consts::PI;

/// Bessel function of the first kind, order one.
///
/// Evaluated from `J1(x) = 1/(2π) ∫ cos(τ - x sin τ) dτ` over one period with
/// the trapezoid rule, which converges geometrically for periodic integrands.
pub fn bessel_j1(x: f64) -> f64 {
    let m = 64 + 2 * x.abs().ceil() as usize;
    let h = 2.0 * PI / m as f64;
    let sum: f64 = (0..m)
        .map(|k| {
            let t = k as f64 * h;
            (t - x * t.sin()).cos()
        })
        .sum();
    sum / m as f64
}

/// Normalized amplitude `2·J1(v)/v` (equal to 1 at the origin).
pub fn jinc(v: f64) -> f64 {
    if v.abs() < 1e-8 {
        1.0 - v * v / 8.0
    } else {
        2.0 * bessel_j1(v) / v
    }
}

/// `n`-th positive zero of `J1` (`n >= 1`), e.g. 3.8317 for `n = 1`.
pub fn j1_zero(n: usize) -> f64 {
    assert!(n >= 1);
    // McMahon's asymptotic form is within 0.01 of every zero; bracket and bisect.
    let beta = (n as f64 + 0.25) * PI;
    let guess = beta - 3.0 / (8.0 * beta);
    let (mut lo, mut hi) = (guess - 0.3, guess + 0.3);
    let flo = bessel_j1(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = bessel_j1(mid);
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Radius of the `n`-th dark ring for aperture diameter `d` at distance `z`.
pub fn zero_radius(n: usize, wavelength: f64, distance: f64, d: f64) -> f64 {
    j1_zero(n) * wavelength * distance / (PI * d)
}

/// Analytic field amplitude at image radius `r`, normalized to 1 on axis.
pub fn amplitude(r: f64, wavelength: f64, distance: f64, d: f64) -> f64 {
    jinc(PI * d * r / (wavelength * distance))
}

/// Intensity of the first bright ring relative to the central peak.
pub fn first_ring_ratio() -> f64 {
    // maximize jinc² between the first and second zeros by golden section
    let (mut a, mut b) = (j1_zero(1), j1_zero(2));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if jinc(c).powi(2) > jinc(d).powi(2) {
            b = d;
        } else {
            a = c;
        }
    }
    jinc(0.5 * (a + b)).powi(2)
}
