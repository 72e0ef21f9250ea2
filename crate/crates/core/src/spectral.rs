//! Spectral differential operators, de-aliasing, Leray projection and
//! quadrature norms.
//!
//! Every operator here is an exact Fourier multiplier, so results are exact
//! for band-limited fields up to round-off.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ScalarField, SymTensorField, VectorField};
use crate::grid::pairwise_sum;

const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn partial_x(f: &ScalarField) -> ScalarField {
    let g = f.grid().clone();
    let n = g.n();
    f.map_spectrum(|idx, c| I * g.deriv_wavenumber(idx % n) * c)
}

pub fn partial_y(f: &ScalarField) -> ScalarField {
    let g = f.grid().clone();
    let n = g.n();
    f.map_spectrum(|idx, c| I * g.deriv_wavenumber(idx / n) * c)
}

pub fn gradient(f: &ScalarField) -> VectorField {
    VectorField {
        x: partial_x(f),
        y: partial_y(f),
    }
}

pub fn divergence(u: &VectorField) -> ScalarField {
    let dx = partial_x(&u.x).into_spectrum();
    let dy = partial_y(&u.y).into_spectrum();
    let s = dx.iter().zip(&dy).map(|(a, b)| a + b).collect();
    ScalarField::from_spectrum(u.grid(), s).expect("same grid")
}

/// Row-wise divergence `(∂ₓτxx + ∂ᵧτxy, ∂ₓτxy + ∂ᵧτyy)`.
pub fn tensor_divergence(t: &SymTensorField) -> VectorField {
    let g = t.grid();
    let sum = |a: ScalarField, b: ScalarField| {
        let (a, b) = (a.into_spectrum(), b.into_spectrum());
        let s = a.iter().zip(&b).map(|(p, q)| p + q).collect();
        ScalarField::from_spectrum(g, s).expect("same grid")
    };
    VectorField {
        x: sum(partial_x(&t.xx), partial_y(&t.xy)),
        y: sum(partial_x(&t.xy), partial_y(&t.yy)),
    }
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    let g = f.grid().clone();
    f.map_spectrum(|idx, c| -g.mode_magnitude_sq(idx) * c)
}

/// Solves `Δu = f` with the mean of `u` set to zero.
pub fn inverse_laplacian(f: &ScalarField) -> ScalarField {
    let g = f.grid().clone();
    f.map_spectrum(|idx, c| {
        let k2 = g.mode_magnitude_sq(idx);
        if k2 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            -c / k2
        }
    })
}

/// Heat semigroup `e^{tΔ}` applied as the multiplier `e^{-|ξ|² t}`.
pub fn heat(f: &ScalarField, t: f64) -> ScalarField {
    let g = f.grid().clone();
    f.map_spectrum(|idx, c| (-g.mode_magnitude_sq(idx) * t).exp() * c)
}

/// Leray projection `û − k (k·û)/|k|²` onto divergence-free fields.
///
/// Uses the same derivative wavenumbers as [`divergence`], so the result is
/// divergence-free in the discrete sense. The mean mode passes through.
pub fn leray_project(u: &VectorField) -> VectorField {
    let g = u.grid();
    let n = g.n();
    let ux = u.x.spectrum();
    let uy = u.y.spectrum();
    let mut px = Vec::with_capacity(g.len());
    let mut py = Vec::with_capacity(g.len());
    for idx in 0..g.len() {
        let kx = g.deriv_wavenumber(idx % n);
        let ky = g.deriv_wavenumber(idx / n);
        let k2 = kx * kx + ky * ky;
        if k2 == 0.0 {
            px.push(ux[idx]);
            py.push(uy[idx]);
        } else {
            let kdotu = (ux[idx] * kx + uy[idx] * ky) / k2;
            px.push(ux[idx] - kdotu * kx);
            py.push(uy[idx] - kdotu * ky);
        }
    }
    VectorField {
        x: ScalarField::from_spectrum(g, px).expect("same grid"),
        y: ScalarField::from_spectrum(g, py).expect("same grid"),
    }
}

/// Zeros every mode outside the 2/3-rule mask.
pub fn dealias(f: &ScalarField) -> ScalarField {
    let g = f.grid().clone();
    let n = g.n();
    f.map_spectrum(|idx, c| {
        if g.keeps(idx % n, idx / n) {
            c
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub(crate) fn dealias_in_place(g: &crate::grid::Grid, s: &mut [Complex64]) {
    let n = g.n();
    for (idx, c) in s.iter_mut().enumerate() {
        if !g.keeps(idx % n, idx / n) {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

/// Pseudospectral product: pointwise multiply, transform, de-alias.
pub fn product(f: &ScalarField, g: &ScalarField) -> Result<ScalarField> {
    crate::field::same_grid(f.grid(), g.grid())?;
    let (a, b) = (f.values(), g.values());
    let p: Vec<f64> = a.iter().zip(b.iter()).map(|(x, y)| x * y).collect();
    let grid = f.grid();
    let mut s = grid.forward(&p);
    dealias_in_place(grid, &mut s);
    ScalarField::from_spectrum(grid, s)
}

/// Supported Lebesgue exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Norm {
    L1,
    L2,
    L4,
    Inf,
}

impl Norm {
    pub fn from_exponent(p: f64) -> Result<Norm> {
        match p {
            p if p == 1.0 => Ok(Norm::L1),
            p if p == 2.0 => Ok(Norm::L2),
            p if p == 4.0 => Ok(Norm::L4),
            p if p == f64::INFINITY => Ok(Norm::Inf),
            _ => Err(Error::InvalidArgument(format!(
                "unsupported Lebesgue exponent {p} (expected 1, 2, 4 or infinity)"
            ))),
        }
    }
}

/// How a tensor is reduced to a scalar at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointwiseNorm {
    Operator,
    Frobenius,
}

/// Riemann-sum `L^p` norm of pointwise magnitudes, cell weight `(L/n)²`.
pub fn lp_norm_of_samples(samples: &[f64], cell_area: f64, p: Norm) -> f64 {
    match p {
        Norm::Inf => samples.iter().fold(0.0, |m, x| m.max(x.abs())),
        Norm::L1 => {
            let a: Vec<f64> = samples.iter().map(|x| x.abs()).collect();
            cell_area * pairwise_sum(&a)
        }
        Norm::L2 => {
            let a: Vec<f64> = samples.iter().map(|x| x * x).collect();
            (cell_area * pairwise_sum(&a)).sqrt()
        }
        Norm::L4 => {
            let a: Vec<f64> = samples.iter().map(|x| (x * x) * (x * x)).collect();
            (cell_area * pairwise_sum(&a)).sqrt().sqrt()
        }
    }
}

pub fn lp_norm(f: &ScalarField, p: Norm) -> f64 {
    lp_norm_of_samples(&f.values(), f.grid().cell_area(), p)
}

pub fn vector_lp_norm(u: &VectorField, p: Norm) -> f64 {
    lp_norm_of_samples(&u.magnitude(), u.grid().cell_area(), p)
}

pub fn tensor_lp_norm(t: &SymTensorField, p: Norm, pointwise: PointwiseNorm) -> f64 {
    let mags = match pointwise {
        PointwiseNorm::Operator => t.operator_norm(),
        PointwiseNorm::Frobenius => t.frobenius_norm(),
    };
    lp_norm_of_samples(&mags, t.grid().cell_area(), p)
}

/// Quadrature of `f` over the domain.
pub fn integral(f: &ScalarField) -> f64 {
    f.grid().cell_area() * pairwise_sum(&f.values())
}
