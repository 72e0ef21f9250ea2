//! Slow reference computations used by `verify` and the test suites.
//!
//! Nothing here shares code with the fast paths it checks: transforms are
//! summed term by term and the BMO scan enumerates every square.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::grid::Grid;

/// Direct `O(n⁴)` DFT with the solver's normalization (`1/n²` forward).
pub fn naive_dft(n: usize, values: &[f64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    let w = -2.0 * PI / n as f64;
    for ky in 0..n {
        for kx in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for y in 0..n {
                for x in 0..n {
                    let phase = w * ((kx * x + ky * y) % n) as f64;
                    acc += values[y * n + x] * Complex64::from_polar(1.0, phase);
                }
            }
            out[ky * n + kx] = acc / (n * n) as f64;
        }
    }
    out
}

/// Direct `O(n⁴)` inverse DFT, real part.
pub fn naive_idft(n: usize, spectrum: &[Complex64]) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    let w = 2.0 * PI / n as f64;
    for y in 0..n {
        for x in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for ky in 0..n {
                for kx in 0..n {
                    let phase = w * ((kx * x + ky * y) % n) as f64;
                    acc += spectrum[ky * n + kx] * Complex64::from_polar(1.0, phase);
                }
            }
            out[y * n + x] = acc.re;
        }
    }
    out
}

/// The trigonometric interpolant of an `n × n` spectrum evaluated term by
/// term on the grid refined `factor` times. Nyquist modes enter as cosines,
/// the real interpolant that agrees with the samples.
pub fn interpolant_samples(n: usize, spectrum: &[Complex64], factor: usize) -> Vec<f64> {
    let m = n * factor;
    let h = 2.0 * PI / m as f64;
    let nyquist = n / 2;
    let basis = |k: usize, i: usize| -> Complex64 {
        let x = i as f64 * h;
        if k == nyquist {
            Complex64::new((nyquist as f64 * x).cos(), 0.0)
        } else {
            let f = if k < nyquist { k as f64 } else { k as f64 - n as f64 };
            Complex64::from_polar(1.0, f * x)
        }
    };
    let mut out = vec![0.0; m * m];
    for y in 0..m {
        for x in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for ky in 0..n {
                let by = basis(ky, y);
                for kx in 0..n {
                    acc += spectrum[ky * n + kx] * basis(kx, x) * by;
                }
            }
            out[y * m + x] = acc.re;
        }
    }
    out
}

/// Exhaustive BMO scan: every square of every side and position is
/// enumerated, and those belonging to the dyadic tilings are measured.
pub fn exhaustive_dyadic_bmo(n: usize, values: &[f64], min_side: usize) -> f64 {
    let mut best: f64 = 0.0;
    for side in min_side..=n {
        for y0 in 0..=n - side {
            for x0 in 0..=n - side {
                let dyadic = n % side == 0
                    && (n / side).is_power_of_two()
                    && x0 % side == 0
                    && y0 % side == 0;
                if !dyadic {
                    continue;
                }
                let count = (side * side) as f64;
                let mut sum = 0.0;
                for y in y0..y0 + side {
                    for x in x0..x0 + side {
                        sum += values[y * n + x];
                    }
                }
                let mean = sum / count;
                let mut dev = 0.0;
                for y in y0..y0 + side {
                    for x in x0..x0 + side {
                        dev += (values[y * n + x] - mean).abs();
                    }
                }
                best = best.max(dev / count);
            }
        }
    }
    best
}

/// Spectrum of `f·g` by direct convolution over integer frequencies, then
/// truncated to the 2/3-rule mask. Inputs are spectra in grid layout.
pub fn truncated_convolution(grid: &Grid, f: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
    let n = grid.n();
    let cutoff = grid.dealias_cutoff();
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    let freqs: Vec<i64> = (0..n).map(|i| grid.freq(i)).collect();
    for (ay, &my) in freqs.iter().enumerate() {
        for (ax, &mx) in freqs.iter().enumerate() {
            let a = f[ay * n + ax];
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (by, &ny) in freqs.iter().enumerate() {
                for (bx, &nx) in freqs.iter().enumerate() {
                    let (sx, sy) = (mx + nx, my + ny);
                    if sx.abs() > cutoff || sy.abs() > cutoff {
                        continue;
                    }
                    let idx = grid.index(sy) * n + grid.index(sx);
                    out[idx] += a * g[by * n + bx];
                }
            }
        }
    }
    out
}

/// Spectral coefficients of the derivative along x by the index formula.
pub fn spectral_dx(grid: &Grid, s: &[Complex64]) -> Vec<Complex64> {
    let n = grid.n();
    s.iter()
        .enumerate()
        .map(|(idx, c)| {
            let m = grid.freq(idx % n);
            let k = if 2 * m.unsigned_abs() as usize == n { 0.0 } else { m as f64 * grid.scale() };
            c * Complex64::new(0.0, k)
        })
        .collect()
}

/// Spectral coefficients of the derivative along y by the index formula.
pub fn spectral_dy(grid: &Grid, s: &[Complex64]) -> Vec<Complex64> {
    let n = grid.n();
    s.iter()
        .enumerate()
        .map(|(idx, c)| {
            let m = grid.freq(idx / n);
            let k = if 2 * m.unsigned_abs() as usize == n { 0.0 } else { m as f64 * grid.scale() };
            c * Complex64::new(0.0, k)
        })
        .collect()
}
