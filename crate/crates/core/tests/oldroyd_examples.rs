use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use lpflow::field::sym_eigenvalues;
use lpflow::oldroyd::{
    conformation_diagnostics, deformation, energy_functional, ns_forced_step, recover_pressure,
    rhs_stress, rhs_velocity, step, vorticity, OldroydParams, OldroydState, SteadyForcing,
};
use lpflow::recipes::{conformation_stress, random_scalar, random_solenoidal, taylor_green};
use lpflow::spectral::{gradient, laplacian, partial_x, partial_y, product, tensor_divergence};
use lpflow::{Grid, ScalarField, StepControls, SymTensorField, VectorField};

fn grid(n: usize) -> Arc<Grid> {
    Grid::new(n, TAU).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn vec_diff(a: &VectorField, b: &VectorField) -> f64 {
    max_diff(&a.x.values(), &b.x.values()).max(max_diff(&a.y.values(), &b.y.values()))
}

fn tensor_diff(a: &SymTensorField, b: &SymTensorField) -> f64 {
    a.sub(b).unwrap().operator_norm().into_iter().fold(0.0, f64::max)
}

fn params(nu: f64, a: f64, mu1: f64, mu2: f64, b: f64) -> OldroydParams {
    OldroydParams { nu, a, mu1, mu2, b }
}

#[test]
fn shear_and_rotation_at_the_origin() {
    let g = grid(32);
    // both fields are locally linear at the origin, grid index 0
    let shear = VectorField::from_fn(&g, |_, y| y.sin(), |_, _| 0.0);
    let d = deformation(&shear);
    assert!((d.xy.values()[0] - 0.5).abs() < 1e-13 && d.xx.values()[0].abs() < 1e-13);
    assert!((vorticity(&shear).values()[0] - 0.5).abs() < 1e-13);

    let rotation = VectorField::from_fn(&g, |_, y| -y.sin(), |x, _| x.sin());
    let d = deformation(&rotation);
    let at_origin = [d.xx.values()[0], d.xy.values()[0], d.yy.values()[0]];
    assert!(at_origin.iter().all(|x| x.abs() < 1e-13), "{at_origin:?}");
    assert!((vorticity(&rotation).values()[0] + 1.0).abs() < 1e-13);

    let rest = VectorField::zeros(&g);
    assert_eq!(vorticity(&rest).max_abs(), 0.0);
    assert_eq!(tensor_diff(&deformation(&rest), &SymTensorField::zeros(&g)), 0.0);
}

#[test]
fn taylor_green_velocity_tendency_is_pure_diffusion() {
    let g = grid(32);
    for nu in [1.0, 0.3] {
        let state = OldroydState::new(taylor_green(&g, 1.0), SymTensorField::zeros(&g), params(nu, 0.0, 1.0, 1.0, 1.0)).unwrap();
        let expected = state.v.scaled(-2.0 * nu);
        assert!(vec_diff(&rhs_velocity(&state).to_real(), &expected) < 1e-13);
    }
}

#[test]
fn constant_stress_drives_nothing() {
    let g = grid(16);
    let tau = SymTensorField::constant(&g, 0.3, -0.2, 0.7);
    let state = OldroydState::new(VectorField::zeros(&g), tau, OldroydParams::default()).unwrap();
    assert!(rhs_velocity(&state).to_real().max_abs() < 1e-15);
}

#[test]
fn isotropic_shift_leaves_velocity_tendency_alone() {
    let g = grid(32);
    let v = random_solenoidal(&g, 1, 5, -1.0, 0.8).unwrap();
    let tau = conformation_stress(&g, 2, 0.2, 0.02).unwrap();
    let p = OldroydParams::default();
    let base = rhs_velocity(&OldroydState::new(v.clone(), tau.clone(), p).unwrap());
    let shifted_tau = tau.add(&SymTensorField::constant(&g, 2.5, 0.0, 2.5)).unwrap();
    let shifted = rhs_velocity(&OldroydState::new(v, shifted_tau, p).unwrap());
    assert!(vec_diff(&base.to_real(), &shifted.to_real()) < 1e-12);
}

#[test]
fn relaxation_alone_returns_minus_the_stress() {
    let g = grid(16);
    let tau = SymTensorField::constant(&g, 0.4, 0.1, -0.3);
    let state = OldroydState::new(VectorField::zeros(&g), tau.clone(), params(1.0, 1.0, 1.0, 1.0, 1.0)).unwrap();
    assert!(tensor_diff(&rhs_stress(&state).to_real(), &tau.scaled(-1.0)) < 1e-15);
    let still = OldroydState::new(VectorField::zeros(&g), tau, OldroydParams::default()).unwrap();
    assert!(tensor_diff(&rhs_stress(&still).to_real(), &SymTensorField::zeros(&g)) < 1e-15);
}

#[test]
fn stress_tendency_of_shear_on_identity() {
    let g = grid(32);
    // ∇v = [[0, cos y], [0, 0]]: Q(I) = ∇v + ∇vᵀ and μ₂D adds half of that again
    let v = VectorField::from_fn(&g, |_, y| y.sin(), |_, _| 0.0);
    let state = OldroydState::new(v, SymTensorField::constant(&g, 1.0, 0.0, 1.0), OldroydParams::default()).unwrap();
    let r = rhs_stress(&state).to_real();
    let expected = ScalarField::from_fn(&g, |_, y| 1.5 * y.cos());
    assert!(max_diff(&r.xy.values(), &expected.values()) < 1e-13);
    assert!(r.xx.max_abs() < 1e-13 && r.yy.max_abs() < 1e-13);
}

#[test]
fn taylor_green_energy_and_dissipation() {
    let g = grid(32);
    let mut state = OldroydState::new(taylor_green(&g, 1.0), SymTensorField::zeros(&g), OldroydParams::default()).unwrap();
    let e = energy_functional(&state);
    assert!((e.kinetic_plus_trace - 2.0 * PI * PI).abs() < 1e-12);
    assert!((e.dissipation_rate - 4.0 * PI * PI).abs() < 1e-12);
    state.tau = SymTensorField::constant(&g, 0.5, 0.0, 0.5);
    let shifted = energy_functional(&state);
    assert!((shifted.kinetic_plus_trace - e.kinetic_plus_trace - 4.0 * PI * PI).abs() < 1e-12);
    assert_eq!(shifted.dissipation_rate, e.dissipation_rate);
}

#[test]
fn conformation_extremes() {
    let g = grid(16);
    let mut state = OldroydState::zeros(&g, OldroydParams::default());
    let d = conformation_diagnostics(&state);
    assert_eq!((d.min_eigenvalue, d.min_det), (1.0, 1.0));
    state.tau = SymTensorField::constant(&g, 0.5, 0.0, 0.5);
    let d = conformation_diagnostics(&state);
    assert_eq!((d.min_eigenvalue, d.min_det), (2.0, 4.0));
    assert!(d.positive_definite && d.det_above_one);

    let entry = |seed| random_scalar(&g, seed, 4, -1.0).unwrap().scaled(0.099);
    state.tau = SymTensorField::new(entry(1), entry(2), entry(3)).unwrap();
    let (a, b, c) = (state.tau.xx.values(), state.tau.xy.values(), state.tau.yy.values());
    let (mut eig, mut det) = (f64::INFINITY, f64::INFINITY);
    for i in 0..g.len() {
        let (p, q, r) = (1.0 + 2.0 * a[i], 2.0 * b[i], 1.0 + 2.0 * c[i]);
        let half_gap = (((p - r) / 2.0).powi(2) + q * q).sqrt();
        eig = eig.min((p + r) / 2.0 - half_gap);
        det = det.min(p * r - q * q);
        let (lo, hi) = sym_eigenvalues(p, q, r);
        assert!((lo * hi - (p * r - q * q)).abs() < 1e-14);
    }
    let d = conformation_diagnostics(&state);
    assert!((d.min_eigenvalue - eig).abs() < 1e-14 && (d.min_det - det).abs() < 1e-14);
}

#[test]
fn taylor_green_pressure() {
    let g = grid(32);
    let state = OldroydState::new(taylor_green(&g, 1.0), SymTensorField::zeros(&g), OldroydParams::default()).unwrap();
    // v·∇v = (sin 2x, sin 2y)/2 = −∇p
    let expected = ScalarField::from_fn(&g, |x, y| ((2.0 * x).cos() + (2.0 * y).cos()) / 4.0);
    assert!(max_diff(&recover_pressure(&state).values(), &expected.values()) < 1e-13);
    assert_eq!(recover_pressure(&OldroydState::zeros(&g, OldroydParams::default())).max_abs(), 0.0);
}

#[test]
fn pressure_closes_the_helmholtz_split() {
    let g = grid(32);
    let v = random_solenoidal(&g, 4, 6, -1.0, 1.0).unwrap();
    let tau = conformation_stress(&g, 5, 0.2, 0.02).unwrap();
    let p = params(0.7, 0.0, 1.3, 1.0, 1.0);
    let state = OldroydState::new(v.clone(), tau.clone(), p).unwrap();
    // −v·∇v + μ₁∇·τ − ∇p must equal the projected tendency without diffusion
    let adv = |c: &ScalarField| {
        product(&v.x, &partial_x(c).to_real()).unwrap().add(&product(&v.y, &partial_y(c).to_real()).unwrap()).unwrap()
    };
    let div = tensor_divergence(&tau);
    let grad_p = gradient(&recover_pressure(&state));
    let unprojected = VectorField::new(
        adv(&v.x).scaled(-1.0).add(&div.x.scaled(p.mu1)).unwrap().sub(&grad_p.x).unwrap(),
        adv(&v.y).scaled(-1.0).add(&div.y.scaled(p.mu1)).unwrap().sub(&grad_p.y).unwrap(),
    )
    .unwrap();
    let diffusion = VectorField::new(laplacian(&v.x).scaled(p.nu), laplacian(&v.y).scaled(p.nu)).unwrap();
    let projected = rhs_velocity(&state).sub(&diffusion).unwrap();
    let residual = vec_diff(&projected.to_real(), &unprojected.to_real());
    assert!(residual <= 1e-10, "{residual}");
}

#[test]
fn forcing_holds_taylor_green_steady() {
    let g = grid(32);
    let nu = 0.5;
    let v = taylor_green(&g, 1.0);
    let mut state = OldroydState::new(v.clone(), SymTensorField::zeros(&g), params(nu, 0.0, 1.0, 1.0, 1.0)).unwrap();
    // −νΔv = 2νv for the unit mode pair
    let force = SteadyForcing(v.scaled(2.0 * nu));
    let controls = StepControls::new(1e-3);
    for _ in 0..100 {
        state = ns_forced_step(&state, &force, &controls).unwrap();
    }
    assert!(vec_diff(&state.v, &v) < 1e-8, "{}", vec_diff(&state.v, &v));
    assert!((state.t - 0.1).abs() < 1e-14);
}

#[test]
fn zero_forcing_matches_the_stress_free_step() {
    let g = grid(32);
    let v = random_solenoidal(&g, 6, 5, -1.0, 0.8).unwrap();
    // μ₂ = 0 keeps τ = 0 under the coupled step
    let p = params(1.0, 0.0, 1.0, 0.0, 1.0);
    let mut coupled = OldroydState::new(v.clone(), SymTensorField::zeros(&g), p).unwrap();
    let mut forced = coupled.clone();
    let zero = SteadyForcing(VectorField::zeros(&g));
    let controls = StepControls::new(1e-3);
    for _ in 0..20 {
        coupled = step(&coupled, &controls).unwrap();
        forced = ns_forced_step(&forced, &zero, &controls).unwrap();
    }
    assert_eq!(coupled.tau.xx.max_abs(), 0.0);
    assert!(vec_diff(&coupled.v, &forced.v) < 1e-14);
}

#[test]
fn linear_forced_response_is_duhamel() {
    let g = grid(16);
    let nu = 0.8;
    // single solenoidal mode with |k|² = 5
    let f = VectorField::from_fn(&g, |x, y| (x + 2.0 * y).sin() * 2.0, |x, y| -(x + 2.0 * y).sin());
    let mut state = OldroydState::new(VectorField::zeros(&g), SymTensorField::zeros(&g), params(nu, 0.0, 1.0, 1.0, 1.0)).unwrap();
    let controls = StepControls {
        disable_nonlinear: true,
        ..StepControls::new(0.01)
    };
    let force = SteadyForcing(f.clone());
    for _ in 0..50 {
        state = ns_forced_step(&state, &force, &controls).unwrap();
    }
    let k2 = 5.0;
    let exact = f.scaled((1.0 - (-nu * k2 * state.t).exp()) / (nu * k2));
    assert!(vec_diff(&state.v, &exact) < 1e-13, "{}", vec_diff(&state.v, &exact));
}
