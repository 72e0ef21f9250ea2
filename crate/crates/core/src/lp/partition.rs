use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::Grid;

/// Inner radius of the dyadic annulus.
pub const ANNULUS_INNER: f64 = 3.0 / 4.0;
/// Outer radius of the dyadic annulus.
pub const ANNULUS_OUTER: f64 = 8.0 / 3.0;
/// Radius of the low-pass ball.
pub const BALL_RADIUS: f64 = 4.0 / 3.0;

/// Smooth step from 0 (t ≤ 0) to 1 (t ≥ 1) built from `e^{-1/t}`; C^∞.
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

/// Radial cutoff: 1 on `|ξ| ≤ 3/4`, 0 on `|ξ| ≥ 4/3`, smooth and monotone.
pub fn low_pass_profile(r: f64) -> f64 {
    1.0 - smooth_step((r - ANNULUS_INNER) / (BALL_RADIUS - ANNULUS_INNER))
}

/// Annulus profile `φ(ξ) = χ(ξ/2) − χ(ξ)`, supported in `3/4 ≤ |ξ| ≤ 8/3`.
pub fn annulus_profile(r: f64) -> f64 {
    (low_pass_profile(0.5 * r) - low_pass_profile(r)).max(0.0)
}

/// Littlewood-Paley partition tabulated on a grid.
///
/// Block `q` is the multiplier `φ(ξ/2^q)` with `ξ` the physical wavenumber,
/// so block 0 is the unit annulus whatever the domain length. `q_min` is the
/// lowest block whose annulus meets a nonzero grid wavenumber and `q_max` the
/// highest; the low-pass mask is fixed by `ψ = 1 − Σ φ(ξ/2^q)`, which leaves
/// only the mean in `S_{q_min}`.
#[derive(Debug, Clone)]
pub struct DyadicPartition {
    grid: Arc<Grid>,
    q_min: i32,
    q_max: i32,
    blocks: Vec<Vec<f64>>,
    low: Vec<f64>,
}

impl DyadicPartition {
    pub fn new(grid: &Arc<Grid>) -> Result<Self> {
        let n = grid.n();
        let mut min_mag = f64::INFINITY;
        let mut max_mag: f64 = 0.0;
        let mut max_dealiased: f64 = 0.0;
        for idx in 1..grid.len() {
            let r = grid.mode_magnitude(idx);
            min_mag = min_mag.min(r);
            max_mag = max_mag.max(r);
            if grid.keeps(idx % n, idx / n) {
                max_dealiased = max_dealiased.max(r);
            }
        }
        // smallest q with 8/3·2^q > min_mag, largest q with 3/4·2^q < max_mag
        let mut q_min = (min_mag / ANNULUS_OUTER).log2().floor() as i32;
        while ANNULUS_OUTER * 2f64.powi(q_min) <= min_mag {
            q_min += 1;
        }
        let top = |r: f64| {
            let mut q = (r / ANNULUS_INNER).log2().ceil() as i32;
            while ANNULUS_INNER * 2f64.powi(q) >= r {
                q -= 1;
            }
            q
        };
        let q_max = top(max_mag).max(top(max_dealiased));
        let count = (q_max - q_min + 1).max(0) as usize;
        if count < 3 {
            return Err(Error::TooFewBlocks { n, blocks: count });
        }

        let blocks: Vec<Vec<f64>> = (q_min..=q_max)
            .map(|q| {
                let s = 2f64.powi(-q);
                (0..grid.len())
                    .map(|idx| annulus_profile(grid.mode_magnitude(idx) * s))
                    .collect()
            })
            .collect();
        let low = (0..grid.len())
            .map(|idx| 1.0 - blocks.iter().map(|b| b[idx]).sum::<f64>())
            .collect();
        Ok(DyadicPartition {
            grid: Arc::clone(grid),
            q_min,
            q_max,
            blocks,
            low,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn q_min(&self) -> i32 {
        self.q_min
    }

    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    pub fn block_indices(&self) -> std::ops::RangeInclusive<i32> {
        self.q_min..=self.q_max
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Tabulated `φ(ξ/2^q)`, or `None` outside the representable range.
    pub fn block_mask(&self, q: i32) -> Option<&[f64]> {
        if q < self.q_min || q > self.q_max {
            return None;
        }
        Some(&self.blocks[(q - self.q_min) as usize])
    }

    /// Tabulated `ψ(ξ/2^{q_min})`.
    pub fn low_mask(&self) -> &[f64] {
        &self.low
    }

    /// Tabulated `ψ(ξ/2^q)`, consistent with the block masks.
    pub fn low_pass_mask(&self, q: i32) -> Vec<f64> {
        if q <= self.q_min {
            return self.low.clone();
        }
        (0..self.grid.len())
            .map(|idx| {
                let tail: f64 = (q..=self.q_max)
                    .filter_map(|j| self.block_mask(j))
                    .map(|m| m[idx])
                    .sum();
                1.0 - tail
            })
            .collect()
    }

    pub(crate) fn apply_mask(&self, spectrum: &[Complex64], mask: &[f64]) -> Vec<Complex64> {
        spectrum.iter().zip(mask).map(|(c, m)| c * *m).collect()
    }

    /// Samples of `Δ_q` applied to the field with the given spectrum.
    pub(crate) fn block_values(&self, spectrum: &[Complex64], q: i32) -> Option<Vec<f64>> {
        self.block_mask(q)
            .map(|m| self.grid.inverse(&self.apply_mask(spectrum, m)))
    }

    /// `Δ_q f`; the zero field outside `[q_min, q_max]`.
    pub fn delta_q(&self, f: &ScalarField, q: i32) -> ScalarField {
        match self.block_mask(q) {
            None => ScalarField::zeros(&self.grid),
            Some(m) => ScalarField::from_spectrum(&self.grid, self.apply_mask(&f.spectrum(), m))
                .expect("partition grid"),
        }
    }

    /// `S_q f`.
    pub fn s_q(&self, f: &ScalarField, q: i32) -> ScalarField {
        let mask = self.low_pass_mask(q);
        ScalarField::from_spectrum(&self.grid, self.apply_mask(&f.spectrum(), &mask))
            .expect("partition grid")
    }

    pub fn decompose(&self, f: &ScalarField) -> BlockSet {
        let s = f.spectrum();
        let low = ScalarField::from_spectrum(&self.grid, self.apply_mask(&s, &self.low))
            .expect("partition grid");
        let blocks = self
            .blocks
            .iter()
            .map(|m| {
                ScalarField::from_spectrum(&self.grid, self.apply_mask(&s, m))
                    .expect("partition grid")
            })
            .collect();
        BlockSet {
            q_min: self.q_min,
            low,
            blocks,
        }
    }
}

/// `S_{q_min} f` together with `Δ_q f` for every representable block.
#[derive(Debug, Clone)]
pub struct BlockSet {
    pub q_min: i32,
    pub low: ScalarField,
    pub blocks: Vec<ScalarField>,
}

impl BlockSet {
    pub fn block(&self, q: i32) -> Option<&ScalarField> {
        usize::try_from(q - self.q_min)
            .ok()
            .and_then(|i| self.blocks.get(i))
    }

    pub fn reconstruct(&self) -> ScalarField {
        let g = self.low.grid();
        let mut acc: Vec<Complex64> = self.low.spectrum().into_owned();
        for b in &self.blocks {
            for (a, c) in acc.iter_mut().zip(b.spectrum().iter()) {
                *a += c;
            }
        }
        ScalarField::from_spectrum(g, acc).expect("same grid")
    }
}
