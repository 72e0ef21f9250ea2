use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use lpflow::lp::{besov_b0_inf_inf, holder_norm, tensor_bmo_norm, BlockNormed, DyadicPartition};
use lpflow::monitor::{
    a_priori_check, besov_criterion, chemin_lerner_norm, cm_criterion, holder_trackers, improved_criterion,
    planchon_tail, sample, CriterionSample,
};
use lpflow::oldroyd::{step, OldroydParams, OldroydState};
use lpflow::recipes::{conformation_stress, random_solenoidal, taylor_green};
use lpflow::spectral::{tensor_lp_norm, vector_lp_norm, Norm, PointwiseNorm};
use lpflow::{Grid, ScalarField, StepControls, SymTensorField, VectorField};

fn grid(n: usize) -> Arc<Grid> {
    Grid::new(n, TAU).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

/// Samples of a frozen state at `times`.
fn steady(state: &OldroydState, part: &DyadicPartition, times: &[f64]) -> Vec<CriterionSample> {
    let s = sample(state, part, 0.5).unwrap();
    times.iter().map(|&t| CriterionSample { t, ..s.clone() }).collect()
}

fn grid_times(t_final: f64, count: usize) -> Vec<f64> {
    (0..=count).map(|i| t_final * i as f64 / count as f64).collect()
}

fn half_identity(g: &Arc<Grid>) -> OldroydState {
    OldroydState::new(VectorField::zeros(g), SymTensorField::constant(g, 0.5, 0.0, 0.5), OldroydParams::default()).unwrap()
}

#[test]
fn half_identity_sample() {
    let g = grid(32);
    let part = DyadicPartition::new(&g).unwrap();
    let s = sample(&half_identity(&g), &part, 0.5).unwrap();
    assert_eq!(s.tau_sup, 0.5);
    assert!(close(s.tau_l1, 2.0 * PI * PI, 1e-14));
    assert!(close(s.tau_l2 * s.tau_l2, 2.0 * PI * PI, 1e-14));
    assert!(s.tau_bmo < 1e-15 && s.tau_besov < 1e-15 && s.tau_holder < 1e-15);
    assert_eq!((s.conf_min_eig, s.conf_min_det), (2.0, 4.0));
}

#[test]
fn sample_matches_direct_norm_calls() {
    let g = grid(32);
    let part = DyadicPartition::new(&g).unwrap();
    let v = taylor_green(&g, 1.0).add(&random_solenoidal(&g, 2, 6, -1.0, 0.3).unwrap()).unwrap();
    let tau = conformation_stress(&g, 3, 0.2, 0.02).unwrap();
    let state = OldroydState::new(v.clone(), tau.clone(), OldroydParams::default()).unwrap();
    let s = sample(&state, &part, 0.4).unwrap();
    assert_eq!(s.tau_sup, tensor_lp_norm(&tau, Norm::Inf, PointwiseNorm::Operator));
    assert_eq!(s.tau_l1, tensor_lp_norm(&tau, Norm::L1, PointwiseNorm::Operator));
    assert_eq!(s.tau_bmo, tensor_bmo_norm(&tau));
    assert_eq!(s.tau_besov, besov_b0_inf_inf(&tau, &part));
    assert!(close(s.tau_holder, holder_norm(&tau, 0.4, &part).unwrap(), 1e-15));
    assert!(close(s.v_holder, holder_norm(&v, 1.4, &part).unwrap(), 1e-15));
    assert_eq!(s.v_l2, vector_lp_norm(&v, Norm::L2));
    let blocks = v.block_sup_norms(&part);
    for (i, (scaled, raw)) in s.dq_v.iter().zip(&blocks).enumerate() {
        assert!(close(*scaled, 2f64.powi(part.q_min() + i as i32) * raw, 1e-15));
    }
}

#[test]
fn constant_stress_criteria() {
    let g = grid(32);
    let part = DyadicPartition::new(&g).unwrap();
    let history = steady(&half_identity(&g), &part, &grid_times(2.0, 40));
    // integrand ‖τ‖_∞ + ‖τ‖²_{L²} = 1/2 + 2π² with the Frobenius L²
    assert!(close(cm_criterion(&history, 1.0).unwrap(), 2.0 * (0.5 + 2.0 * PI * PI), 1e-13));
    assert!(close(cm_criterion(&history, 0.0).unwrap(), 1.0, 1e-13));
    let (bmo, l1) = improved_criterion(&history).unwrap();
    assert!(bmo < 1e-14);
    assert!(close(l1, 2.0 * PI * PI, 1e-14));
}

#[test]
fn oscillating_steady_stress_integrates_its_bmo() {
    let g = grid(32);
    let part = DyadicPartition::new(&g).unwrap();
    let wave = ScalarField::from_fn(&g, |x, y| 0.1 * (3.0 * x).sin() * y.cos());
    let tau = SymTensorField::new(wave.clone(), wave.scaled(0.5), wave.scaled(-1.0)).unwrap();
    let state = OldroydState::new(VectorField::zeros(&g), tau.clone(), OldroydParams::default()).unwrap();
    let history = steady(&state, &part, &grid_times(1.5, 30));
    let (bmo, _) = improved_criterion(&history).unwrap();
    assert!(close(bmo, 1.5 * tensor_bmo_norm(&tau), 1e-13));
}

#[test]
fn single_block_besov_and_tail_agree() {
    let g = grid(64);
    let part = DyadicPartition::new(&g).unwrap();
    let times = grid_times(1.0, 50);
    // every block but one empty
    let mut dq = vec![0.0; part.block_count()];
    dq[3] = 0.7;
    let history: Vec<CriterionSample> = steady(&OldroydState::zeros(&g, OldroydParams::default()), &part, &times)
        .into_iter()
        .map(|s| CriterionSample { dq_tau: dq.clone(), tau_besov: 0.7, ..s })
        .collect();
    assert!(close(besov_criterion(&history).unwrap(), 0.7, 1e-14));
    assert!(close(planchon_tail(&history, 0.2).unwrap(), 0.2 * 0.7, 1e-12));
}

#[test]
fn steady_single_block_velocity_gives_t_times_block() {
    let g = grid(64);
    let part = DyadicPartition::new(&g).unwrap();
    let v = VectorField::from_fn(&g, |_, y| (4.0 * y).cos(), |_, _| 0.0);
    let state = OldroydState::new(v, SymTensorField::zeros(&g), OldroydParams::default()).unwrap();
    let history = steady(&state, &part, &grid_times(0.8, 16));
    let top = history[0].dq_v.iter().copied().fold(0.0, f64::max);
    assert!(close(chemin_lerner_norm(&history).unwrap(), 0.8 * top, 1e-14));
}

/// Taylor-Green with the stress decoupled decays as `e^{−2t}` in the single
/// block `q = 0`, since `|ξ| = √2`.
fn taylor_green_history(t_final: f64, dt: f64) -> (DyadicPartition, Vec<CriterionSample>) {
    let g = grid(32);
    let part = DyadicPartition::new(&g).unwrap();
    let p = OldroydParams {
        mu1: 0.0,
        mu2: 0.0,
        ..OldroydParams::default()
    };
    let mut state = OldroydState::new(taylor_green(&g, 1.0), SymTensorField::zeros(&g), p).unwrap();
    let controls = StepControls::new(dt);
    let mut history = vec![sample(&state, &part, 0.5).unwrap()];
    let steps = (t_final / dt).round() as usize;
    for _ in 0..steps {
        state = step(&state, &controls).unwrap();
        history.push(sample(&state, &part, 0.5).unwrap());
    }
    (part, history)
}

#[test]
fn decaying_taylor_green_criteria() {
    let t_final = 0.5;
    let (part, history) = taylor_green_history(t_final, 1e-3);
    let populated: Vec<usize> = (0..part.block_count()).filter(|&i| history[0].dq_v[i] > 1e-12).collect();
    assert_eq!(populated, vec![(-part.q_min()) as usize]);

    let k2 = 2.0;
    let block0 = history[0].dq_v[populated[0]];
    let exact = (1.0 - (-k2 * t_final).exp()) * block0 / k2;
    assert!(close(chemin_lerner_norm(&history).unwrap(), exact, 1e-4));

    // ∫ ‖∇v‖² dt = ∫ 4π² e^{−4t} dt
    let a = a_priori_check(&history).unwrap();
    let dissipated = PI * PI * (1.0 - (-4.0 * t_final).exp());
    assert!(close(a.grad_v_l2_sq_integral, dissipated, 1e-5), "{}", a.grad_v_l2_sq_integral);
    assert!(a.finite);
    assert!(a.sup_v_l2 <= history[0].energy.sqrt() * (1.0 + 1e-14));

    let trackers = holder_trackers(&history);
    assert!(trackers.a.iter().all(|&x| x == history[0].v_holder));
    assert!(trackers.a.iter().zip(&history).all(|(a, s)| *a >= s.v_holder));
}
