//! Initial data: Taylor-Green flow, random band-limited fields and
//! conformation-preserving stresses.
//!
//! Random fields are finite trigonometric sums evaluated on the grid, so
//! they are exactly band-limited and, for velocities, exactly solenoidal.
//! Each `seed` drives ChaCha8 with a fixed stream per field: 0 for scalars,
//! 1 for velocities, 2 for magnetic fields, 10 to 12 for stress components.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{ScalarField, SymTensorField, VectorField};
use crate::grid::Grid;

/// `A (sin x cos y, −cos x sin y)` in units where the box has side 2π.
pub fn taylor_green(grid: &Arc<Grid>, amplitude: f64) -> VectorField {
    let k = grid.scale();
    VectorField::from_fn(
        grid,
        |x, y| amplitude * (k * x).sin() * (k * y).cos(),
        |x, y| -amplitude * (k * x).cos() * (k * y).sin(),
    )
}

struct Mode {
    mx: f64,
    my: f64,
    amp: f64,
    phase: f64,
}

/// Half-plane modes with `1 ≤ |m| ≤ k_max`, amplitude `|m|^slope` times a
/// uniform factor in `[1/2, 3/2)`.
fn random_modes(k_max: u32, slope: f64, rng: &mut ChaCha8Rng) -> Vec<Mode> {
    let k = k_max as i64;
    let mut out = Vec::new();
    for my in 0..=k {
        for mx in -k..=k {
            if my == 0 && mx <= 0 {
                continue;
            }
            let r = ((mx * mx + my * my) as f64).sqrt();
            if r > k_max as f64 {
                continue;
            }
            let amp = r.powf(slope) * rng.gen_range(0.5..1.5);
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            out.push(Mode {
                mx: mx as f64,
                my: my as f64,
                amp,
                phase,
            });
        }
    }
    out
}

/// Band limits run up to `n/2 − 1`, below the Nyquist line.
fn check_band(grid: &Grid, k_max: u32) -> Result<()> {
    let top = grid.n() / 2 - 1;
    if k_max == 0 || k_max as usize > top {
        return Err(Error::InvalidArgument(format!(
            "band limit {k_max} must lie in [1, {top}]"
        )));
    }
    Ok(())
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Random real trigonometric polynomial with `‖f‖_∞ = 1`.
pub fn random_scalar(grid: &Arc<Grid>, seed: u64, k_max: u32, slope: f64) -> Result<ScalarField> {
    check_band(grid, k_max)?;
    let modes = random_modes(k_max, slope, &mut rng_for(seed, 0));
    let k = grid.scale();
    let f = ScalarField::from_fn(grid, |x, y| {
        modes
            .iter()
            .map(|m| m.amp * (k * (m.mx * x + m.my * y) + m.phase).cos())
            .sum()
    });
    let peak = f.max_abs();
    Ok(f.scaled(1.0 / peak))
}

/// Random divergence-free velocity `(∂ᵧψ, −∂ₓψ)` from a random stream
/// function, scaled so that `‖v‖_∞ = amplitude`.
pub fn random_solenoidal(
    grid: &Arc<Grid>,
    seed: u64,
    k_max: u32,
    slope: f64,
    amplitude: f64,
) -> Result<VectorField> {
    solenoidal(grid, &mut rng_for(seed, 1), k_max, slope, amplitude)
}

/// As [`random_solenoidal`] on the magnetic-field stream, so a velocity and
/// a magnetic field drawn with one seed are independent.
pub fn random_magnetic(
    grid: &Arc<Grid>,
    seed: u64,
    k_max: u32,
    slope: f64,
    amplitude: f64,
) -> Result<VectorField> {
    solenoidal(grid, &mut rng_for(seed, 2), k_max, slope, amplitude)
}

fn solenoidal(
    grid: &Arc<Grid>,
    rng: &mut ChaCha8Rng,
    k_max: u32,
    slope: f64,
    amplitude: f64,
) -> Result<VectorField> {
    check_band(grid, k_max)?;
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "amplitude {amplitude} must be finite and non-negative"
        )));
    }
    let modes = random_modes(k_max, slope, rng);
    let k = grid.scale();
    // ψ = Σ a cos(k m·x + φ): ∂ᵧψ = −Σ a k m_y sin(·), −∂ₓψ = Σ a k m_x sin(·)
    let v = VectorField::from_fn(
        grid,
        |x, y| {
            modes
                .iter()
                .map(|m| -m.amp * k * m.my * (k * (m.mx * x + m.my * y) + m.phase).sin())
                .sum()
        },
        |x, y| {
            modes
                .iter()
                .map(|m| m.amp * k * m.mx * (k * (m.mx * x + m.my * y) + m.phase).sin())
                .sum()
        },
    );
    let peak = v.max_abs();
    Ok(v.scaled(amplitude / peak))
}

/// `τ = ε·bump·I + δ·P` with `bump = 1 + sin x sin y / 2` and `P` a random
/// symmetric tensor of low modes with entries bounded by 1.
///
/// Fails unless `det(I + 2τ) > 1.2` at every grid point.
pub fn conformation_stress(
    grid: &Arc<Grid>,
    seed: u64,
    epsilon: f64,
    delta: f64,
) -> Result<SymTensorField> {
    let k = grid.scale();
    let bump = ScalarField::from_fn(grid, |x, y| 1.0 + 0.5 * (k * x).sin() * (k * y).sin());
    let band = 2.min(grid.dealias_cutoff() as u32);
    let mut perturb = Vec::with_capacity(3);
    for stream in 0..3u64 {
        let modes = random_modes(band, 0.0, &mut rng_for(seed, 10 + stream));
        let f = ScalarField::from_fn(grid, |x, y| {
            modes
                .iter()
                .map(|m| m.amp * (k * (m.mx * x + m.my * y) + m.phase).cos())
                .sum()
        });
        let peak = f.max_abs();
        perturb.push(f.scaled(1.0 / peak));
    }
    let diag = bump.scaled(epsilon);
    let tau = SymTensorField {
        xx: diag.add(&perturb[0].scaled(delta))?,
        xy: perturb[1].scaled(delta),
        yy: diag.add(&perturb[2].scaled(delta))?,
    };
    let (a, b, c) = (tau.xx.values(), tau.xy.values(), tau.yy.values());
    let min_det = (0..a.len())
        .map(|i| (1.0 + 2.0 * a[i]) * (1.0 + 2.0 * c[i]) - 4.0 * b[i] * b[i])
        .fold(f64::INFINITY, f64::min);
    if !(min_det > 1.2) {
        return Err(Error::InvalidArgument(format!(
            "stress recipe gives min det(I + 2τ) = {min_det:.4}, needs > 1.2"
        )));
    }
    Ok(tau)
}
