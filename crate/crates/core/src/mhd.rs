//! Ideal-induction MHD
//!
//! ```text
//! ∂ₜv + v·∇v + ∇p = νΔv + ∇·(H⊗H)
//! ∂ₜH + v·∇H = H·∇v,     ∇·v = ∇·H = 0
//! ```
//!
//! `H⊗H` obeys the upper-convected transport law, the Oldroyd-B stress
//! equation with `a = 0`, `μ₂ = 0`, `b = 1`. [`step_mhd_traced`] evolves an
//! independent tensor `G` with that law alongside `H` so the identity can be
//! checked with [`check_tensor_transport`].

use std::sync::Arc;

use num_complex::Complex64;

use crate::dynamics::{
    advance, check_blowup, forward, momentum_advection, project, spectral_tensor_divergence,
    stress_tendency, to_spectra, Spectra, StepControls, StressCoefficients, Velocity,
};
use crate::error::{Error, Result};
use crate::field::{same_grid, ScalarField, SymTensorField, VectorField};
use crate::grid::Grid;
use crate::spectral::integral;

#[derive(Debug, Clone)]
pub struct MhdState {
    pub v: VectorField,
    pub h: VectorField,
    pub nu: f64,
    pub t: f64,
    pub step: u64,
}

impl MhdState {
    pub fn new(v: VectorField, h: VectorField, nu: f64) -> Result<Self> {
        same_grid(v.grid(), h.grid())?;
        check_nu(nu)?;
        Ok(MhdState {
            v: v.to_real(),
            h: h.to_real(),
            nu,
            t: 0.0,
            step: 0,
        })
    }

    pub fn zeros(grid: &Arc<Grid>, nu: f64) -> Self {
        MhdState {
            v: VectorField::zeros(grid),
            h: VectorField::zeros(grid),
            nu,
            t: 0.0,
            step: 0,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.v.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.h.is_finite()
    }
}

fn check_nu(nu: f64) -> Result<()> {
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "nu = {nu} must be a finite non-negative number"
        )));
    }
    Ok(())
}

/// Explicit tendency of `(vₓ, vᵧ, Hₓ, Hᵧ[, Gₓₓ, Gₓᵧ, Gᵧᵧ])` without the
/// viscous term.
fn mhd_tendency(grid: &Grid, u: &Spectra, dealias: bool, coupled: bool) -> Spectra {
    if !coupled {
        return vec![vec![Complex64::new(0.0, 0.0); grid.len()]; u.len()];
    }
    let vel = Velocity::new(grid, &u[0], &u[1]);
    let mag = Velocity::new(grid, &u[2], &u[3]);
    let [mut nx, mut ny] = momentum_advection(grid, &vel, dealias);
    let (hx, hy) = (&mag.x.val, &mag.y.val);
    let outer = |a: &[f64], b: &[f64]| -> Vec<Complex64> {
        let p: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
        forward(grid, &p, dealias)
    };
    let (hxx, hxy, hyy) = (outer(hx, hx), outer(hx, hy), outer(hy, hy));
    let [dx, dy] = spectral_tensor_divergence(grid, [&hxx, &hxy, &hyy]);
    for idx in 0..grid.len() {
        nx[idx] += dx[idx];
        ny[idx] += dy[idx];
    }
    project(grid, &mut nx, &mut ny);

    // −v·∇H + H·∇v
    let induction = |h: &crate::dynamics::Sampled, v: &crate::dynamics::Sampled| -> Vec<Complex64> {
        let adv = vel.advect(h);
        let stretching = mag.advect(v);
        let r: Vec<f64> = stretching
            .iter().zip(&adv).map(|(s, a)| s - a).collect();
        forward(grid, &r, dealias)
    };
    let mut out = vec![nx, ny, induction(&mag.x, &vel.x), induction(&mag.y, &vel.y)];
    if u.len() == 7 {
        let coeffs = StressCoefficients {
            relaxation: 0.0,
            mu2: 0.0,
            b: 1.0,
        };
        let g = stress_tendency(grid, &vel, [&u[4], &u[5], &u[6]], coeffs, dealias, true);
        out.extend(g);
    }
    out
}

/// `(dv, dH)` with `dv = P(−v·∇v + ∇·(H⊗H)) + νΔv` and `dH = −v·∇H + H·∇v`.
pub fn rhs_mhd(state: &MhdState) -> (VectorField, VectorField) {
    let grid = state.grid();
    let comps = [
        state.v.x.values(),
        state.v.y.values(),
        state.h.x.values(),
        state.h.y.values(),
    ];
    let u = to_spectra(grid, &[&comps[0], &comps[1], &comps[2], &comps[3]], true, &[0, 2]);
    let mut n = mhd_tendency(grid, &u, true, true);
    for c in 0..2 {
        for idx in 0..grid.len() {
            n[c][idx] -= state.nu * grid.mode_magnitude_sq(idx) * u[c][idx];
        }
    }
    let f = |s: Vec<Complex64>| ScalarField::from_spectrum(grid, s).expect("grid length");
    let mut it = n.into_iter().map(f);
    let mut next = || it.next().expect("four components");
    let dv = VectorField {
        x: next(),
        y: next(),
    };
    let dh = VectorField {
        x: next(),
        y: next(),
    };
    (dv, dh)
}

fn advance_mhd(
    state: &MhdState,
    tracer: Option<&SymTensorField>,
    controls: &StepControls,
) -> Result<(MhdState, Option<SymTensorField>)> {
    let grid = state.grid();
    check_nu(state.nu)?;
    controls.check_cfl(grid, state.v.max_abs())?;
    let mut comps = vec![
        state.v.x.values(),
        state.v.y.values(),
        state.h.x.values(),
        state.h.y.values(),
    ];
    if let Some(g) = tracer {
        same_grid(grid, g.grid())?;
        comps.extend([g.xx.values(), g.xy.values(), g.yy.values()]);
    }
    let refs: Vec<&[f64]> = comps.iter().map(|c| c.as_ref()).collect();
    let u0 = to_spectra(grid, &refs, controls.dealias, &[0, 2]);
    let mut diffusivity = vec![0.0; u0.len()];
    diffusivity[0] = state.nu;
    diffusivity[1] = state.nu;
    let coupled = !controls.disable_nonlinear;
    let u1 = advance(grid, controls, &u0, &diffusivity, &[0, 2], state.t, |u, _| {
        mhd_tendency(grid, u, controls.dealias, coupled)
    });
    let out: Vec<Vec<f64>> = u1.iter().map(|s| grid.inverse(s)).collect();
    let t1 = state.t + controls.dt;
    check_blowup(controls, t1, state.step + 1, &out, &out[0], &out[1])?;
    let mut it = out
        .into_iter()
        .map(|x| ScalarField::from_values(grid, x).expect("grid length"));
    let mut next = || it.next().expect("component");
    let next_state = MhdState {
        v: VectorField {
            x: next(),
            y: next(),
        },
        h: VectorField {
            x: next(),
            y: next(),
        },
        nu: state.nu,
        t: t1,
        step: state.step + 1,
    };
    let g = tracer.map(|_| SymTensorField {
        xx: next(),
        xy: next(),
        yy: next(),
    });
    Ok((next_state, g))
}

/// Advances `(v, H)` by `controls.dt`; both fields are projected after each stage.
pub fn step_mhd(state: &MhdState, controls: &StepControls) -> Result<MhdState> {
    advance_mhd(state, None, controls).map(|(s, _)| s)
}

/// As [`step_mhd`], also transporting the tensor `g` by
/// `∂ₜG + v·∇G = ∇v G + G (∇v)ᵀ` with the same stages.
pub fn step_mhd_traced(
    state: &MhdState,
    g: &SymTensorField,
    controls: &StepControls,
) -> Result<(MhdState, SymTensorField)> {
    advance_mhd(state, Some(g), controls).map(|(s, g)| (s, g.expect("tracer")))
}

/// Pointwise outer product `H⊗H`.
pub fn h_tensor(h: &VectorField) -> SymTensorField {
    let grid = h.grid();
    let (x, y) = (h.x.values(), h.y.values());
    let prod = |a: &[f64], b: &[f64]| {
        let v = a.iter().zip(b).map(|(p, q)| p * q).collect();
        ScalarField::from_values(grid, v).expect("grid length")
    };
    SymTensorField {
        xx: prod(&x, &x),
        xy: prod(&x, &y),
        yy: prod(&y, &y),
    }
}

/// `sup_t ‖G(t) − H(t)⊗H(t)‖_∞` with the pointwise operator norm.
pub fn check_tensor_transport(h: &[VectorField], g: &[SymTensorField]) -> Result<f64> {
    if h.is_empty() {
        return Err(Error::EmptyHistory);
    }
    if h.len() != g.len() {
        return Err(Error::HistoryMismatch(format!(
            "{} magnetic samples against {} tensor samples",
            h.len(),
            g.len()
        )));
    }
    let mut worst: f64 = 0.0;
    for (hk, gk) in h.iter().zip(g) {
        let d = gk.sub(&h_tensor(hk))?;
        worst = worst.max(d.operator_norm().into_iter().fold(0.0, f64::max));
    }
    Ok(worst)
}

/// `∫|v|² + |H|² dx` and `∫|∇v|² dx`.
pub fn mhd_energy(state: &MhdState) -> (f64, f64) {
    let grid = state.grid();
    let sq = |f: &VectorField| -> Vec<f64> {
        let (a, b) = (f.x.values(), f.y.values());
        a.iter().zip(b.iter()).map(|(x, y)| x * x + y * y).collect()
    };
    let (v2, h2) = (sq(&state.v), sq(&state.h));
    let total: Vec<f64> = v2.iter().zip(&h2).map(|(a, b)| a + b).collect();
    let g = crate::oldroyd::velocity_gradient(&state.v);
    let parts = [g.xx.values(), g.xy.values(), g.yx.values(), g.yy.values()];
    let grad2: Vec<f64> = (0..grid.len())
        .map(|i| parts.iter().map(|p| p[i] * p[i]).sum())
        .collect();
    let quad = |v: Vec<f64>| integral(&ScalarField::from_values(grid, v).expect("grid length"));
    (quad(total), quad(grad2))
}
