//! Centered, unitary 2-D discrete Fourier transforms.
//!
//! Sample `n` of an axis of length `N` represents index offset `n - N/2`, both
//! in the signal and in the spectrum, and each axis carries a `1/√N` factor.
//! The direct-summation [`dft_oracle`] implements the same definition without
//! any FFT machinery and is used to cross-check the fast path.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::field::{ComplexField, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Reusable row/column plans for one grid shape.
pub struct Fft2 {
    nx: usize,
    ny: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            nx,
            ny,
            row_fwd: planner.plan_fft_forward(nx),
            row_inv: planner.plan_fft_inverse(nx),
            col_fwd: planner.plan_fft_forward(ny),
            col_inv: planner.plan_fft_inverse(ny),
        }
    }

    /// Plain (uncentered, unnormalized) 2-D transform in place.
    pub fn process_raw(&self, data: &mut [Complex64], dir: Direction) {
        assert_eq!(data.len(), self.nx * self.ny);
        let (row, col) = match dir {
            Direction::Forward => (&self.row_fwd, &self.col_fwd),
            Direction::Inverse => (&self.row_inv, &self.col_inv),
        };
        row.process(data);
        let mut column = vec![Complex64::new(0.0, 0.0); self.ny];
        for i in 0..self.nx {
            for (j, c) in column.iter_mut().enumerate() {
                *c = data[j * self.nx + i];
            }
            col.process(&mut column);
            for (j, c) in column.iter().enumerate() {
                data[j * self.nx + i] = *c;
            }
        }
    }

    /// Centered unitary transform in place.
    pub fn process(&self, data: &mut [Complex64], dir: Direction) {
        shift_half(data, self.nx, self.ny);
        self.process_raw(data, dir);
        shift_half(data, self.nx, self.ny);
        let norm = 1.0 / ((self.nx * self.ny) as f64).sqrt();
        for c in data.iter_mut() {
            *c *= norm;
        }
    }
}

/// Roll both axes by half their length. For even sizes this is its own
/// inverse, so it serves as both fftshift and ifftshift.
pub fn shift_half(data: &mut [Complex64], nx: usize, ny: usize) {
    debug_assert!(nx.is_multiple_of(2) && ny.is_multiple_of(2));
    for row in data.chunks_exact_mut(nx) {
        row.rotate_left(nx / 2);
    }
    data.rotate_left((ny / 2) * nx);
}

fn reciprocal_grid(g: &GridSpec) -> Result<GridSpec> {
    g.with_pitch(
        1.0 / (g.nx() as f64 * g.dx()),
        1.0 / (g.ny() as f64 * g.dy()),
    )
}

/// Centered unitary FFT. The result's pitch is the reciprocal-space pitch
/// `1/(n·d)` on each axis.
pub fn fft2(f: &ComplexField, dir: Direction) -> Result<ComplexField> {
    let g = f.grid();
    let mut data = f.data().to_vec();
    Fft2::new(g.nx(), g.ny()).process(&mut data, dir);
    ComplexField::from_vec(reciprocal_grid(g)?, data)
}

/// Largest grid accepted by [`dft_oracle`] on either axis.
pub const ORACLE_MAX: usize = 64;

/// Direct-summation centered unitary DFT. `O(N⁴)`, capped at 64×64.
pub fn dft_oracle(f: &ComplexField, dir: Direction) -> Result<ComplexField> {
    let g = *f.grid();
    let (nx, ny) = (g.nx(), g.ny());
    if nx > ORACLE_MAX || ny > ORACLE_MAX {
        return Err(Error::OracleSize { nx, ny });
    }
    let sign = match dir {
        Direction::Forward => -1.0,
        Direction::Inverse => 1.0,
    };
    let twiddles = |n: usize| -> Vec<Complex64> {
        (0..n * n)
            .map(|k| {
                let (a, b) = (
                    (k / n) as f64 - (n / 2) as f64,
                    (k % n) as f64 - (n / 2) as f64,
                );
                // a·b mod n keeps the angle small and exact for integer offsets
                let m = (a * b).rem_euclid(n as f64);
                Complex64::from_polar(1.0, sign * 2.0 * PI * m / n as f64)
            })
            .collect()
    };
    let wx = twiddles(nx);
    let wy = twiddles(ny);
    let norm = 1.0 / ((nx * ny) as f64).sqrt();
    let src = f.data();
    let mut out = Vec::with_capacity(nx * ny);
    for l in 0..ny {
        for k in 0..nx {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..ny {
                let wyj = wy[l * ny + j];
                let row = &src[j * nx..(j + 1) * nx];
                let mut racc = Complex64::new(0.0, 0.0);
                for (i, &s) in row.iter().enumerate() {
                    racc += s * wx[k * nx + i];
                }
                acc += racc * wyj;
            }
            out.push(acc * norm);
        }
    }
    ComplexField::from_vec(reciprocal_grid(&g)?, out)
}
