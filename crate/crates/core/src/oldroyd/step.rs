use num_complex::Complex64;

use crate::dynamics::{
    advance, check_blowup, forward, momentum_advection, project, spectral_tensor_divergence,
    stress_tendency, to_spectra, Spectra, StepControls, StressCoefficients, Velocity,
};
use crate::error::Result;
use crate::field::{ScalarField, SymTensorField, VectorField};
use crate::grid::Grid;
use crate::oldroyd::{OldroydParams, OldroydState};

/// Explicit tendency of `(vₓ, vᵧ, τₓₓ, τₓᵧ, τᵧᵧ)` without the viscous term.
///
/// With `coupled` off everything vanishes, leaving the pure heat flow.
pub(crate) fn oldroyd_tendency(
    grid: &Grid,
    p: &OldroydParams,
    u: &Spectra,
    dealias: bool,
    coupled: bool,
) -> Spectra {
    if !coupled {
        return vec![vec![Complex64::new(0.0, 0.0); grid.len()]; 5];
    }
    let vel = Velocity::new(grid, &u[0], &u[1]);
    let [mut nx, mut ny] = momentum_advection(grid, &vel, dealias);
    let [dx, dy] = spectral_tensor_divergence(grid, [&u[2], &u[3], &u[4]]);
    for idx in 0..grid.len() {
        nx[idx] += p.mu1 * dx[idx];
        ny[idx] += p.mu1 * dy[idx];
    }
    project(grid, &mut nx, &mut ny);
    let coeffs = StressCoefficients {
        relaxation: p.a,
        mu2: p.mu2,
        b: p.b,
    };
    let [txx, txy, tyy] = stress_tendency(grid, &vel, [&u[2], &u[3], &u[4]], coeffs, dealias, true);
    vec![nx, ny, txx, txy, tyy]
}

/// Advances the Oldroyd-B system by `controls.dt`.
///
/// Fails with [`crate::Error::Cfl`] before stepping, or with
/// [`crate::Error::Blowup`] if the result is non-finite or too fast; the
/// input state is left untouched either way.
pub fn step(state: &OldroydState, controls: &StepControls) -> Result<OldroydState> {
    let grid = state.grid();
    state.params.validate()?;
    controls.check_cfl(grid, state.v.max_abs())?;
    let v = [state.v.x.values(), state.v.y.values()];
    let t = [state.tau.xx.values(), state.tau.xy.values(), state.tau.yy.values()];
    let u0 = to_spectra(grid, &[&v[0], &v[1], &t[0], &t[1], &t[2]], controls.dealias, &[0]);
    let nu = state.params.nu;
    let coupled = !controls.disable_nonlinear;
    let u1 = advance(
        grid,
        controls,
        &u0,
        &[nu, nu, 0.0, 0.0, 0.0],
        &[0],
        state.t,
        |u, _| oldroyd_tendency(grid, &state.params, u, controls.dealias, coupled),
    );
    let out: Vec<Vec<f64>> = u1.iter().map(|s| grid.inverse(s)).collect();
    let t1 = state.t + controls.dt;
    check_blowup(controls, t1, state.step + 1, &out, &out[0], &out[1])?;
    let mut it = out.into_iter().map(|x| ScalarField::from_values(grid, x).expect("grid length"));
    let mut next = || it.next().expect("five components");
    Ok(OldroydState {
        v: VectorField {
            x: next(),
            y: next(),
        },
        tau: SymTensorField {
            xx: next(),
            xy: next(),
            yy: next(),
        },
        t: t1,
        step: state.step + 1,
        params: state.params,
    })
}

/// A body force prescribed as a function of time.
pub trait Forcing {
    fn force(&self, t: f64) -> VectorField;
}

impl<F: Fn(f64) -> VectorField> Forcing for F {
    fn force(&self, t: f64) -> VectorField {
        self(t)
    }
}

/// A force constant in time.
#[derive(Debug, Clone)]
pub struct SteadyForcing(pub VectorField);

impl Forcing for SteadyForcing {
    fn force(&self, _t: f64) -> VectorField {
        self.0.clone()
    }
}

/// Navier-Stokes step `∂ₜv + v·∇v + ∇p = νΔv + f` with the same scheme as
/// [`step`]. The stress is carried along unchanged.
pub fn ns_forced_step<F: Forcing + ?Sized>(
    state: &OldroydState,
    force: &F,
    controls: &StepControls,
) -> Result<OldroydState> {
    let grid = state.grid();
    state.params.validate()?;
    controls.check_cfl(grid, state.v.max_abs())?;
    let v = [state.v.x.values(), state.v.y.values()];
    let u0 = to_spectra(grid, &[&v[0], &v[1]], controls.dealias, &[0]);
    let nu = state.params.nu;
    let coupled = !controls.disable_nonlinear;
    let mut forcing_error = None;
    let u1 = advance(grid, controls, &u0, &[nu, nu], &[0], state.t, |u, t| {
        let f = force.force(t);
        if f.grid().as_ref() != grid.as_ref() {
            forcing_error.get_or_insert(crate::Error::GridMismatch);
        }
        let mut fx = forward(grid, &f.x.values(), controls.dealias);
        let mut fy = forward(grid, &f.y.values(), controls.dealias);
        if coupled {
            let vel = Velocity::new(grid, &u[0], &u[1]);
            let [ax, ay] = momentum_advection(grid, &vel, controls.dealias);
            for idx in 0..grid.len() {
                fx[idx] += ax[idx];
                fy[idx] += ay[idx];
            }
        }
        project(grid, &mut fx, &mut fy);
        vec![fx, fy]
    });
    if let Some(e) = forcing_error {
        return Err(e);
    }
    let out: Vec<Vec<f64>> = u1.iter().map(|s| grid.inverse(s)).collect();
    let t1 = state.t + controls.dt;
    check_blowup(controls, t1, state.step + 1, &out, &out[0], &out[1])?;
    let [x, y]: [Vec<f64>; 2] = out.try_into().expect("two components");
    Ok(OldroydState {
        v: VectorField {
            x: ScalarField::from_values(grid, x)?,
            y: ScalarField::from_values(grid, y)?,
        },
        tau: state.tau.clone(),
        t: t1,
        step: state.step + 1,
        params: state.params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_state_stays_zero() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let s = OldroydState::zeros(&g, OldroydParams::default());
        let s1 = step(&s, &StepControls::new(1e-2)).unwrap();
        assert_eq!(s1.v.max_abs(), 0.0);
        assert_eq!(s1.tau.xx.max_abs(), 0.0);
        assert_eq!(s1.step, 1);
        assert_eq!(s1.t, 1e-2);
    }

    #[test]
    fn cfl_violation_reported() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let s = OldroydState::zeros(&g, OldroydParams::default());
        let r = step(&s, &StepControls::new(1.0));
        assert!(matches!(r, Err(crate::Error::Cfl { .. })));
    }
}
