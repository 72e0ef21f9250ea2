//! Periodic square grid and its discrete Fourier transform.
//!
//! Samples are stored row-major: index `iy * n + ix` holds the value at
//! `(ix * dx, iy * dx)`. Spectra use the same layout with the standard FFT
//! frequency ordering along each axis.
//!
//! Normalization: the forward transform divides by `n²`, so a field
//! `cos(x)` on `L = 2π` has coefficients `1/2` at `k = ±(1, 0)` and
//! Parseval reads `mean |f|² = Σ |f̂|²`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub struct Grid {
    n: usize,
    length: f64,
    cutoff: i64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    fine: OnceLock<Arc<Grid>>,
}

/// Refinement factor of [`Grid::oversample`].
pub const OVERSAMPLE: usize = 4;

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("length", &self.length)
            .field("cutoff", &self.cutoff)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.length.to_bits() == other.length.to_bits()
    }
}

impl Grid {
    /// Builds an `n × n` grid on `[0, length)²`.
    pub fn new(n: usize, length: f64) -> Result<Arc<Grid>> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::GridSize(n));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::DomainLength(length));
        }
        let mut planner = FftPlanner::new();
        Ok(Arc::new(Grid {
            n,
            length,
            cutoff: (n / 3) as i64,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            fine: OnceLock::new(),
        }))
    }

    /// Samples of the trigonometric interpolant of `spectrum` on the grid
    /// refined [`OVERSAMPLE`] times, row-major with side `OVERSAMPLE · n`.
    ///
    /// Nyquist coefficients are split evenly between `±n/2`, so the
    /// interpolant is real and agrees with the samples at the coarse points.
    pub fn oversample(&self, spectrum: &[Complex64]) -> Vec<f64> {
        let fine = self
            .fine
            .get_or_init(|| Grid::new(OVERSAMPLE * self.n, self.length).expect("valid refinement"));
        let (n, m) = (self.n, fine.n);
        let nyquist = -(n as i64) / 2;
        let mut padded = vec![Complex64::new(0.0, 0.0); m * m];
        for iy in 0..n {
            let fy = self.freq(iy);
            let ys: &[i64] = if fy == nyquist { &[nyquist, -nyquist] } else { &[fy] };
            for ix in 0..n {
                let fx = self.freq(ix);
                let xs: &[i64] = if fx == nyquist { &[nyquist, -nyquist] } else { &[fx] };
                let c = spectrum[iy * n + ix] / (ys.len() * xs.len()) as f64;
                for &py in ys {
                    for &px in xs {
                        padded[fine.index(py) * m + fine.index(px)] += c;
                    }
                }
            }
        }
        fine.inverse(&padded)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Quadrature weight of one cell, `(L/n)²`.
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dx()
    }

    pub fn area(&self) -> f64 {
        self.length * self.length
    }

    /// Physical wavenumber of integer frequency 1, `2π/L`.
    pub fn scale(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    /// Integer frequency stored at axis index `i`; the Nyquist index maps to `-n/2`.
    pub fn freq(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Axis index holding integer frequency `m` (aliased modulo `n`).
    pub fn index(&self, m: i64) -> usize {
        m.rem_euclid(self.n as i64) as usize
    }

    pub fn wavenumber(&self, i: usize) -> f64 {
        self.freq(i) as f64 * self.scale()
    }

    /// Wavenumber used by first-derivative multipliers. Zero on the Nyquist
    /// index so that odd derivatives of real fields stay real.
    pub fn deriv_wavenumber(&self, i: usize) -> f64 {
        if i == self.n / 2 {
            0.0
        } else {
            self.wavenumber(i)
        }
    }

    /// Largest integer frequency kept by the 2/3 rule, `floor(n/3)`.
    pub fn dealias_cutoff(&self) -> i64 {
        self.cutoff
    }

    pub fn keeps(&self, ix: usize, iy: usize) -> bool {
        self.freq(ix).abs() <= self.cutoff && self.freq(iy).abs() <= self.cutoff
    }

    /// `|ξ|` of the mode at flat spectral index `idx`.
    pub fn mode_magnitude(&self, idx: usize) -> f64 {
        let (iy, ix) = (idx / self.n, idx % self.n);
        self.wavenumber(ix).hypot(self.wavenumber(iy))
    }

    pub fn mode_magnitude_sq(&self, idx: usize) -> f64 {
        let (iy, ix) = (idx / self.n, idx % self.n);
        let (kx, ky) = (self.wavenumber(ix), self.wavenumber(iy));
        kx * kx + ky * ky
    }

    /// Tabulates `f(x, y)` at the grid points.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for iy in 0..n {
            let y = self.coord(iy);
            for ix in 0..n {
                out.push(f(self.coord(ix), y));
            }
        }
        out
    }

    /// Forward transform of real samples (normalized by `1/n²`).
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.len());
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut buf, &self.forward);
        let norm = 1.0 / self.len() as f64;
        for c in &mut buf {
            *c *= norm;
        }
        buf
    }

    /// Inverse transform returning the real part of the synthesized samples.
    pub fn inverse(&self, spectrum: &[Complex64]) -> Vec<f64> {
        assert_eq!(spectrum.len(), self.len());
        let mut buf = spectrum.to_vec();
        self.transform(&mut buf, &self.inverse);
        buf.into_iter().map(|c| c.re).collect()
    }

    fn transform(&self, buf: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(buf, &mut scratch);
        transpose(buf, n);
        plan.process_with_scratch(buf, &mut scratch);
        transpose(buf, n);
    }
}

fn transpose(buf: &mut [Complex64], n: usize) {
    for r in 0..n {
        for c in r + 1..n {
            buf.swap(r * n + c, c * n + r);
        }
    }
}

/// Pairwise (cascade) summation with a fixed split order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}
