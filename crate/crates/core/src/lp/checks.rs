//! Numerical checks of the Bernstein, heat-decay and logarithmic
//! interpolation inequalities.
//!
//! Each check measures a ratio; the constants in the inequalities are only
//! known up to the annulus geometry, so callers compare the measured ratios
//! against [`bernstein_window`] and [`heat_window`] or record empirical
//! suprema.

use std::f64::consts::E;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::lp::norms::{bmo_norm, check_holder_exponent, holder_norm, BlockNormed};
use crate::lp::{DyadicPartition, ANNULUS_INNER, ANNULUS_OUTER};
use crate::quadrature::trapezoid;
use crate::spectral::{gradient, heat, lp_norm, vector_lp_norm, Norm};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BernsteinRatio {
    /// `‖∇Δ_q f‖_p / (2^q ‖Δ_q f‖_p)`.
    pub ratio: f64,
    /// `2^q ‖Δ_q f‖_p / ‖∇Δ_q f‖_p`.
    pub inverse: f64,
}

/// Annulus bounds `[3/4, 8/3]` for the Bernstein ratio; exact for `p = 2`.
pub fn bernstein_window() -> (f64, f64) {
    (ANNULUS_INNER, ANNULUS_OUTER)
}

/// Window `[0.7, 2.7]` held against the `p = ∞` Bernstein ratio. For `p = ∞`
/// the annulus gives no sharp lower constant: sums of modes can peak where
/// their gradient vanishes, pushing the ratio below `3/4`.
pub fn bernstein_inf_window() -> (f64, f64) {
    (0.7, 2.7)
}

/// Window `[e^{-C 4^q t}, e^{-c 4^q t}]` with `c = (3/4)²`, `C = (8/3)²`.
pub fn heat_window(q: i32, t: f64) -> (f64, f64) {
    let scale = 4f64.powi(q) * t;
    (
        (-ANNULUS_OUTER * ANNULUS_OUTER * scale).exp(),
        (-ANNULUS_INNER * ANNULUS_INNER * scale).exp(),
    )
}

pub fn check_bernstein(
    f: &ScalarField,
    q: i32,
    p: Norm,
    part: &DyadicPartition,
) -> Result<BernsteinRatio> {
    if !matches!(p, Norm::L2 | Norm::Inf) {
        return Err(Error::InvalidArgument(
            "Bernstein check supports p = 2 and p = ∞".into(),
        ));
    }
    let block = part.delta_q(f, q);
    let base = lp_norm(&block, p);
    if is_negligible(base, lp_norm(f, p)) {
        return Err(Error::ZeroBlock(q));
    }
    let grad = vector_lp_norm(&gradient(&block), p);
    let ratio = grad / (2f64.powi(q) * base);
    Ok(BernsteinRatio {
        ratio,
        inverse: ratio.recip(),
    })
}

/// `‖e^{tΔ} Δ_q f‖_∞ / ‖Δ_q f‖_∞`, the heat semigroup applied exactly.
pub fn check_heat_decay(f: &ScalarField, q: i32, t: f64, part: &DyadicPartition) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("heat time {t} must be ≥ 0")));
    }
    let block = part.delta_q(f, q);
    let base = block.max_abs();
    if is_negligible(base, f.max_abs()) {
        return Err(Error::ZeroBlock(q));
    }
    Ok(heat(&block, t).max_abs() / base)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogInterpolationReport {
    pub sup: f64,
    pub l2: f64,
    pub bmo: f64,
    pub holder: f64,
    /// `‖f‖_∞ / (1 + ‖f‖_{L²} + ‖f‖_BMO ln(e + ‖f‖_{Ċ^β}))`.
    pub ratio: f64,
}

pub fn check_log_interpolation(
    f: &ScalarField,
    beta: f64,
    part: &DyadicPartition,
) -> Result<LogInterpolationReport> {
    check_beta(beta)?;
    let sup = f.max_abs();
    let l2 = lp_norm(f, Norm::L2);
    let bmo = bmo_norm(f);
    let holder = holder_norm(f, beta, part)?;
    let ratio = sup / (1.0 + l2 + bmo * (E + holder).ln());
    Ok(LogInterpolationReport {
        sup,
        l2,
        bmo,
        holder,
        ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogInterpolationTimeReport {
    /// `∫ ‖∇g‖_∞ ds`.
    pub lhs: f64,
    /// `∫ ‖g‖_{L²} ds`.
    pub l2_integral: f64,
    /// `sup_q ∫ ‖Δ_q ∇g‖_∞ ds`.
    pub block_integral_sup: f64,
    /// `∫ ‖∇g‖_{Ċ^β} ds`.
    pub holder_integral: f64,
    /// Block cutoff `N = (1/β) log₂(e + ∫ ‖∇g‖_{Ċ^β})`.
    pub cutoff: f64,
    /// `1 + ∫‖g‖_{L²} + sup_q ∫‖Δ_q∇g‖_∞ · ln(e + ∫‖∇g‖_{Ċ^β})`.
    pub bracket: f64,
    pub ratio: f64,
}

/// Time-integrated form of the logarithmic interpolation inequality for a
/// history sampled every `dt`.
pub fn check_log_interpolation_time(
    history: &[ScalarField],
    dt: f64,
    beta: f64,
    part: &DyadicPartition,
) -> Result<LogInterpolationTimeReport> {
    check_beta(beta)?;
    if history.is_empty() {
        return Err(Error::EmptyHistory);
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("time step {dt} must be positive")));
    }
    let times: Vec<f64> = (0..history.len()).map(|i| i as f64 * dt).collect();
    let mut grad_sup = Vec::with_capacity(history.len());
    let mut l2 = Vec::with_capacity(history.len());
    let mut holder = Vec::with_capacity(history.len());
    let mut blocks: Vec<Vec<f64>> = vec![Vec::with_capacity(history.len()); part.block_count()];
    for g in history {
        let grad: VectorField = gradient(g);
        grad_sup.push(grad.max_abs());
        l2.push(lp_norm(g, Norm::L2));
        let b = grad.block_sup_norms(part);
        holder.push(crate::lp::weighted_sup(&b, part.q_min(), beta));
        for (series, v) in blocks.iter_mut().zip(b) {
            series.push(v);
        }
    }
    let lhs = trapezoid(&times, &grad_sup);
    let l2_integral = trapezoid(&times, &l2);
    let holder_integral = trapezoid(&times, &holder);
    let block_integral_sup = blocks
        .iter()
        .map(|s| trapezoid(&times, s))
        .fold(0.0, f64::max);
    let cutoff = (E + holder_integral).log2() / beta;
    let bracket = 1.0 + l2_integral + block_integral_sup * (E + holder_integral).ln();
    Ok(LogInterpolationTimeReport {
        lhs,
        l2_integral,
        block_integral_sup,
        holder_integral,
        cutoff,
        bracket,
        ratio: lhs / bracket,
    })
}

/// Blocks at round-off level relative to the whole field count as empty.
fn is_negligible(block: f64, whole: f64) -> bool {
    block <= 1e-13 * whole || block == 0.0
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidArgument(format!("β = {beta} must lie in (0, 1)")));
    }
    check_holder_exponent(beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use std::f64::consts::PI;

    fn setup() -> (std::sync::Arc<Grid>, DyadicPartition) {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        let p = DyadicPartition::new(&g).unwrap();
        (g, p)
    }

    #[test]
    fn single_mode_bernstein_ratio_is_frequency_over_scale() {
        let (g, p) = setup();
        for q0 in 1..4 {
            let k = 2f64.powi(q0);
            let f = ScalarField::from_fn(&g, |x, _| (k * x).cos());
            for q in [q0 - 1, q0] {
                let r = check_bernstein(&f, q, Norm::Inf, &p).unwrap();
                assert!((r.ratio - k / 2f64.powi(q)).abs() < 1e-10);
                assert!((r.ratio * r.inverse - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_block_is_an_error() {
        let (g, p) = setup();
        let f = ScalarField::from_fn(&g, |x, _| x.cos());
        assert!(matches!(
            check_bernstein(&f, 4, Norm::Inf, &p),
            Err(Error::ZeroBlock(4))
        ));
    }

    #[test]
    fn heat_at_time_zero_is_identity() {
        let (g, p) = setup();
        let f = ScalarField::from_fn(&g, |x, y| (4.0 * x).cos() * (2.0 * y).sin());
        assert!((check_heat_decay(&f, 2, 0.0, &p).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn heat_single_mode_is_exact() {
        let (g, p) = setup();
        let f = ScalarField::from_fn(&g, |x, y| (3.0 * x + 4.0 * y).cos());
        let r = check_heat_decay(&f, 2, 0.1, &p).unwrap();
        assert!((r - (-25.0 * 0.1f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn log_interpolation_of_zero() {
        let (g, p) = setup();
        let r = check_log_interpolation(&ScalarField::zeros(&g), 0.5, &p).unwrap();
        assert_eq!(r.ratio, 0.0);
    }

    #[test]
    fn log_interpolation_time_rejects_empty() {
        let (_, p) = setup();
        assert!(matches!(
            check_log_interpolation_time(&[], 0.1, 0.5, &p),
            Err(Error::EmptyHistory)
        ));
    }

    #[test]
    fn zero_history_has_zero_lhs() {
        let (g, p) = setup();
        let h = vec![ScalarField::zeros(&g); 5];
        let r = check_log_interpolation_time(&h, 0.25, 0.5, &p).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.ratio, 0.0);
    }
}
