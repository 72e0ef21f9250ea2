//! Besov and Hölder norms through the dyadic blocks, and the dyadic BMO estimator.

use crate::error::{Error, Result};
use crate::field::{sym_operator_norm, ScalarField, SymTensorField, VectorField};
use crate::grid::OVERSAMPLE;
use crate::lp::DyadicPartition;

/// Fields whose dyadic blocks can be measured in `L^∞`.
///
/// Vector blocks use the pointwise Euclidean norm, tensor blocks the
/// pointwise operator norm.
pub trait BlockNormed {
    /// `‖Δ_q f‖_∞` for `q = q_min..=q_max`.
    fn block_sup_norms(&self, part: &DyadicPartition) -> Vec<f64>;

    /// `‖S_{q_min} f‖_∞`, the content with no dyadic block.
    fn low_pass_sup(&self, part: &DyadicPartition) -> f64;
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

impl BlockNormed for ScalarField {
    fn block_sup_norms(&self, part: &DyadicPartition) -> Vec<f64> {
        let s = self.spectrum();
        part.block_indices()
            .map(|q| sup(&part.block_values(&s, q).expect("in range")))
            .collect()
    }

    fn low_pass_sup(&self, part: &DyadicPartition) -> f64 {
        let s = self.spectrum();
        sup(&part.grid().inverse(&part.apply_mask(&s, part.low_mask())))
    }
}

impl BlockNormed for VectorField {
    fn block_sup_norms(&self, part: &DyadicPartition) -> Vec<f64> {
        let (sx, sy) = (self.x.spectrum(), self.y.spectrum());
        part.block_indices()
            .map(|q| {
                let bx = part.block_values(&sx, q).expect("in range");
                let by = part.block_values(&sy, q).expect("in range");
                bx.iter().zip(&by).fold(0.0_f64, |m, (a, b)| m.max(a.hypot(*b)))
            })
            .collect()
    }

    fn low_pass_sup(&self, part: &DyadicPartition) -> f64 {
        let g = part.grid();
        let lx = g.inverse(&part.apply_mask(&self.x.spectrum(), part.low_mask()));
        let ly = g.inverse(&part.apply_mask(&self.y.spectrum(), part.low_mask()));
        lx.iter().zip(&ly).fold(0.0_f64, |m, (a, b)| m.max(a.hypot(*b)))
    }
}

impl BlockNormed for SymTensorField {
    fn block_sup_norms(&self, part: &DyadicPartition) -> Vec<f64> {
        let (sa, sb, sc) = (self.xx.spectrum(), self.xy.spectrum(), self.yy.spectrum());
        part.block_indices()
            .map(|q| {
                let a = part.block_values(&sa, q).expect("in range");
                let b = part.block_values(&sb, q).expect("in range");
                let c = part.block_values(&sc, q).expect("in range");
                (0..a.len()).fold(0.0_f64, |m, i| m.max(sym_operator_norm(a[i], b[i], c[i])))
            })
            .collect()
    }

    fn low_pass_sup(&self, part: &DyadicPartition) -> f64 {
        let g = part.grid();
        let low = |f: &ScalarField| g.inverse(&part.apply_mask(&f.spectrum(), part.low_mask()));
        let (a, b, c) = (low(&self.xx), low(&self.xy), low(&self.yy));
        (0..a.len()).fold(0.0_f64, |m, i| m.max(sym_operator_norm(a[i], b[i], c[i])))
    }
}

/// `sup_q ‖Δ_q f‖_∞` over the representable blocks.
pub fn besov_b0_inf_inf<F: BlockNormed>(f: &F, part: &DyadicPartition) -> f64 {
    f.block_sup_norms(part).into_iter().fold(0.0, f64::max)
}

/// `sup_q 2^{qα} ‖Δ_q f‖_∞`, the Besov form of the homogeneous Hölder seminorm.
pub fn holder_norm<F: BlockNormed>(f: &F, alpha: f64, part: &DyadicPartition) -> Result<f64> {
    check_holder_exponent(alpha)?;
    Ok(weighted_sup(&f.block_sup_norms(part), part.q_min(), alpha))
}

pub(crate) fn check_holder_exponent(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 2.0 && alpha != 1.0) {
        return Err(Error::InvalidArgument(format!(
            "Hölder exponent {alpha} must lie in (0, 1) or (1, 2)"
        )));
    }
    Ok(())
}

/// `sup_q 2^{qα} b_q` for block norms indexed from `q_min`.
pub fn weighted_sup(block_norms: &[f64], q_min: i32, alpha: f64) -> f64 {
    block_norms
        .iter()
        .enumerate()
        .map(|(i, b)| 2f64.powf((q_min + i as i32) as f64 * alpha) * b)
        .fold(0.0, f64::max)
}

/// Dyadic BMO estimator: the largest mean oscillation `⨍_Q |f − f_Q|` over
/// every square of the dyadic tilings of the domain (sides `L, L/2, …, dx`).
///
/// Averages are taken over the trigonometric interpolant sampled on the
/// grid refined [`OVERSAMPLE`] times, so even the one-cell squares hold
/// `OVERSAMPLE²` samples. Each level touches every sample twice.
pub fn bmo_norm(f: &ScalarField) -> f64 {
    let grid = f.grid();
    let fine = grid.oversample(&f.spectrum());
    dyadic_bmo_of_samples(OVERSAMPLE * grid.n(), &fine, OVERSAMPLE)
}

/// BMO of a tensor: the largest component BMO.
pub fn tensor_bmo_norm(t: &SymTensorField) -> f64 {
    t.components()
        .iter()
        .map(|c| bmo_norm(c))
        .fold(0.0, f64::max)
}

/// Largest mean oscillation over the aligned dyadic squares of an `n × n`
/// periodic sample array with sides `n, n/2, …, min_side`.
pub fn dyadic_bmo_of_samples(n: usize, v: &[f64], min_side: usize) -> f64 {
    assert_eq!(v.len(), n * n);
    assert!(n.is_power_of_two() && min_side.is_power_of_two() && min_side <= n);
    let mut best: f64 = 0.0;
    let mut side = n;
    while side >= min_side {
        let count = (side * side) as f64;
        for y0 in (0..n).step_by(side) {
            for x0 in (0..n).step_by(side) {
                let rows = || (y0..y0 + side).flat_map(|y| &v[y * n + x0..y * n + x0 + side]);
                let mean = rows().sum::<f64>() / count;
                let dev: f64 = rows().map(|x| (x - mean).abs()).sum();
                best = best.max(dev / count);
            }
        }
        side /= 2;
    }
    best
}
