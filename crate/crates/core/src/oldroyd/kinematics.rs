use num_complex::Complex64;

use crate::dynamics::{q_pointwise, to_spectra, Spectra};
use crate::error::Result;
use crate::field::{same_grid, ScalarField, SymTensorField, VectorField};
use crate::grid::Grid;
use crate::oldroyd::step::oldroyd_tendency;
use crate::oldroyd::OldroydState;
use crate::spectral::{partial_x, partial_y};

/// Velocity gradient with entries `(∇v)ᵢⱼ = ∂ⱼvᵢ`.
#[derive(Debug, Clone)]
pub struct VelocityGradient {
    /// `∂ₓvₓ`
    pub xx: ScalarField,
    /// `∂ᵧvₓ`
    pub xy: ScalarField,
    /// `∂ₓvᵧ`
    pub yx: ScalarField,
    /// `∂ᵧvᵧ`
    pub yy: ScalarField,
}

impl VelocityGradient {
    pub fn grid(&self) -> &std::sync::Arc<Grid> {
        self.xx.grid()
    }
}

pub fn velocity_gradient(v: &VectorField) -> VelocityGradient {
    VelocityGradient {
        xx: partial_x(&v.x).to_real(),
        xy: partial_y(&v.x).to_real(),
        yx: partial_x(&v.y).to_real(),
        yy: partial_y(&v.y).to_real(),
    }
}

/// `D(v) = (∇v + (∇v)ᵀ)/2`.
pub fn deformation(v: &VectorField) -> SymTensorField {
    let g = velocity_gradient(v);
    let off: Vec<f64> = g
        .xy
        .values()
        .iter()
        .zip(g.yx.values().iter())
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    SymTensorField {
        xx: g.xx,
        xy: ScalarField::from_values(v.grid(), off).expect("grid length"),
        yy: g.yy,
    }
}

/// The `xy` entry of `W(v) = (∇v − (∇v)ᵀ)/2`, that is `(∂ᵧvₓ − ∂ₓvᵧ)/2`.
pub fn vorticity(v: &VectorField) -> ScalarField {
    let g = velocity_gradient(v);
    let w: Vec<f64> = g
        .xy
        .values()
        .iter()
        .zip(g.yx.values().iter())
        .map(|(a, b)| 0.5 * (a - b))
        .collect();
    ScalarField::from_values(v.grid(), w).expect("grid length")
}

/// Pointwise `Q(τ, ∇v) = Wτ − τW + b(Dτ + τD)`.
pub fn q_bilinear(tau: &SymTensorField, grad_v: &VelocityGradient, b: f64) -> Result<SymTensorField> {
    same_grid(tau.grid(), grad_v.grid())?;
    let t = [tau.xx.values(), tau.xy.values(), tau.yy.values()];
    let g = [
        grad_v.xx.values(),
        grad_v.xy.values(),
        grad_v.yx.values(),
        grad_v.yy.values(),
    ];
    let len = tau.grid().len();
    let mut out = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
    for i in 0..len {
        let q = q_pointwise(
            [t[0][i], t[1][i], t[2][i]],
            [[g[0][i], g[1][i]], [g[2][i], g[3][i]]],
            b,
        );
        for c in 0..3 {
            out[c][i] = q[c];
        }
    }
    let grid = tau.grid();
    let [xx, xy, yy] = out;
    SymTensorField::new(
        ScalarField::from_values(grid, xx)?,
        ScalarField::from_values(grid, xy)?,
        ScalarField::from_values(grid, yy)?,
    )
}

fn state_spectra(state: &OldroydState) -> Spectra {
    let v = [state.v.x.values(), state.v.y.values()];
    let t = [state.tau.xx.values(), state.tau.xy.values(), state.tau.yy.values()];
    to_spectra(state.grid(), &[&v[0], &v[1], &t[0], &t[1], &t[2]], true, &[0])
}

fn spectral_field(grid: &std::sync::Arc<Grid>, s: Vec<Complex64>) -> ScalarField {
    ScalarField::from_spectrum(grid, s).expect("grid length")
}

/// `P(−v·∇v + μ₁∇·τ) + νΔv`, products de-aliased.
pub fn rhs_velocity(state: &OldroydState) -> VectorField {
    let grid = state.grid();
    let u = state_spectra(state);
    let mut n = oldroyd_tendency(grid, &state.params, &u, true, true);
    let nu = state.params.nu;
    for c in 0..2 {
        for idx in 0..grid.len() {
            n[c][idx] -= nu * grid.mode_magnitude_sq(idx) * u[c][idx];
        }
    }
    let mut it = n.into_iter();
    VectorField {
        x: spectral_field(grid, it.next().expect("x")),
        y: spectral_field(grid, it.next().expect("y")),
    }
}

/// `−v·∇τ − aτ + Q(τ, ∇v) + μ₂D(v)`, products de-aliased.
pub fn rhs_stress(state: &OldroydState) -> SymTensorField {
    let grid = state.grid();
    let u = state_spectra(state);
    let mut it = oldroyd_tendency(grid, &state.params, &u, true, true).into_iter().skip(2);
    SymTensorField {
        xx: spectral_field(grid, it.next().expect("xx")),
        xy: spectral_field(grid, it.next().expect("xy")),
        yy: spectral_field(grid, it.next().expect("yy")),
    }
}

/// Mean-zero pressure solving `−Δp = div(v·∇v − μ₁∇·τ)`.
///
/// The Laplacian uses the derivative wavenumbers, so `∇p` is exactly the
/// gradient part removed by the Leray projection.
pub fn recover_pressure(state: &OldroydState) -> ScalarField {
    let grid = state.grid();
    let u = state_spectra(state);
    let vel = crate::dynamics::Velocity::new(grid, &u[0], &u[1]);
    let [ax, ay] = crate::dynamics::momentum_advection(grid, &vel, true);
    let [dx, dy] = crate::dynamics::spectral_tensor_divergence(grid, [&u[2], &u[3], &u[4]]);
    let mu1 = state.params.mu1;
    let n = grid.n();
    let i = Complex64::new(0.0, 1.0);
    let p = (0..grid.len())
        .map(|idx| {
            let kx = grid.deriv_wavenumber(idx % n);
            let ky = grid.deriv_wavenumber(idx / n);
            let k2 = kx * kx + ky * ky;
            if k2 == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let mx = ax[idx] + mu1 * dx[idx];
            let my = ay[idx] + mu1 * dy[idx];
            -i * (kx * mx + ky * my) / k2
        })
        .collect();
    spectral_field(grid, p).to_real()
}
