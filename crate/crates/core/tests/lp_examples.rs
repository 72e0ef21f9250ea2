use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;

use lpflow::lp::{
    annulus_profile, besov_b0_inf_inf, bernstein_window, check_bernstein, check_heat_decay,
    check_log_interpolation, check_log_interpolation_time, holder_norm, BlockNormed, DyadicPartition,
};
use lpflow::oracle::{naive_dft, truncated_convolution};
use lpflow::recipes::random_scalar;
use lpflow::spectral::{dealias, gradient, leray_project, lp_norm, product, Norm};
use lpflow::{Grid, ScalarField, VectorField};

fn grid(n: usize) -> Arc<Grid> {
    Grid::new(n, TAU).unwrap()
}

fn cosine(g: &Arc<Grid>, m: f64) -> ScalarField {
    ScalarField::from_fn(g, |x, _| (m * x).cos())
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn cosine_has_two_half_coefficients() {
    let g = grid(16);
    let f = cosine(&g, 1.0);
    let fast = g.forward(&f.values());
    let slow = naive_dft(16, &f.values());
    for (idx, (a, b)) in fast.iter().zip(&slow).enumerate() {
        assert!((a - b).norm() < 1e-14, "mode {idx}");
        let (mx, my) = (g.freq(idx % 16), g.freq(idx / 16));
        let expected = if my == 0 && mx.abs() == 1 { 0.5 } else { 0.0 };
        assert!((a.norm() - expected).abs() < 1e-15, "({mx}, {my}): {a}");
    }
}

#[test]
fn dealias_removes_frequency_31_on_64() {
    let g = grid(64);
    assert!(dealias(&cosine(&g, 31.0)).to_real().max_abs() < 1e-13);
    let kept = cosine(&g, 21.0);
    assert!(max_diff(&dealias(&kept).to_real().values(), &kept.values()) < 1e-13);
}

#[test]
fn dealiased_product_is_truncated_convolution() {
    let g = grid(16);
    let f = random_scalar(&g, 1, 5, -1.0).unwrap();
    let h = random_scalar(&g, 2, 5, -1.0).unwrap();
    let fast = product(&f, &h).unwrap().spectrum().into_owned();
    let slow = truncated_convolution(&g, &f.spectrum(), &h.spectrum());
    let worst = fast.iter().zip(&slow).fold(0.0_f64, |m, (a, b)| m.max((a - b).norm()));
    assert!(worst < 1e-14, "{worst}");
}

/// `û − k(k·û)/|k|²` evaluated mode by mode with integer frequencies.
fn leray_oracle(g: &Grid, u: &VectorField) -> (Vec<f64>, Vec<f64>) {
    let n = g.n();
    let (ux, uy) = (g.forward(&u.x.values()), g.forward(&u.y.values()));
    let mut px = vec![Complex64::new(0.0, 0.0); n * n];
    let mut py = px.clone();
    for idx in 0..n * n {
        let (mx, my) = (g.freq(idx % n), g.freq(idx / n));
        // Nyquist modes have no derivative and are left alone
        let kx = if 2 * mx.unsigned_abs() as usize == n { 0.0 } else { mx as f64 };
        let ky = if 2 * my.unsigned_abs() as usize == n { 0.0 } else { my as f64 };
        let k2 = kx * kx + ky * ky;
        let dot = if k2 == 0.0 { Complex64::new(0.0, 0.0) } else { (ux[idx] * kx + uy[idx] * ky) / k2 };
        px[idx] = ux[idx] - dot * kx;
        py[idx] = uy[idx] - dot * ky;
    }
    (g.inverse(&px), g.inverse(&py))
}

#[test]
fn leray_matches_mode_formula() {
    let g = grid(16);
    let gradient_field = VectorField::from_fn(&g, |x, _| x.sin(), |_, y| y.sin());
    let p = leray_project(&gradient_field);
    assert!(p.to_real().max_abs() < 1e-15);
    let (ox, oy) = leray_oracle(&g, &gradient_field);
    assert!(max_diff(&ox, &p.x.values()) < 1e-15 && max_diff(&oy, &p.y.values()) < 1e-15);

    let u = VectorField::new(
        random_scalar(&g, 7, 6, -1.0).unwrap(),
        random_scalar(&g, 8, 6, -1.0).unwrap(),
    )
    .unwrap();
    let p = leray_project(&u);
    let (ox, oy) = leray_oracle(&g, &u);
    assert!(max_diff(&ox, &p.x.values()) < 1e-14);
    assert!(max_diff(&oy, &p.y.values()) < 1e-14);
}

#[test]
fn norms_of_one() {
    let f = ScalarField::constant(&grid(32), 1.0);
    assert!((lp_norm(&f, Norm::L1) - 4.0 * PI * PI).abs() < 1e-12);
    assert!((lp_norm(&f, Norm::L2) - 2.0 * PI).abs() < 1e-13);
    assert_eq!(lp_norm(&f, Norm::Inf), 1.0);
    assert_eq!(lp_norm(&ScalarField::zeros(&grid(32)), Norm::L4), 0.0);
}

#[test]
fn block_range_matches_annulus_enumeration() {
    for n in [16, 32, 64, 128] {
        let g = grid(n);
        let part = DyadicPartition::new(&g).unwrap();
        let radii: Vec<f64> = (1..g.len()).map(|i| g.mode_magnitude(i)).collect();
        let populated: Vec<i32> = (-10..20)
            .filter(|&q| radii.iter().any(|r| annulus_profile(r / 2f64.powi(q)) > 0.0))
            .collect();
        assert_eq!(part.q_min(), populated[0], "n = {n}");
        assert_eq!(part.q_max(), *populated.last().unwrap(), "n = {n}");
        assert!(part.q_min() <= 0 && part.q_max() >= 2);
    }
    let part = DyadicPartition::new(&grid(64)).unwrap();
    assert_eq!((part.q_min(), part.q_max()), (-1, 5));
}

#[test]
fn single_mode_blocks_are_scaled_copies() {
    let g = grid(64);
    let part = DyadicPartition::new(&g).unwrap();
    for q0 in 0..=4 {
        let m = 2f64.powi(q0);
        let f = cosine(&g, m);
        for q in part.block_indices() {
            let weight = annulus_profile(m / 2f64.powi(q));
            let block = part.delta_q(&f, q).to_real();
            assert!(max_diff(&block.values(), &f.scaled(weight).values()) < 1e-13, "q0 = {q0}, q = {q}");
            if (q - q0).abs() >= 2 {
                assert!(block.max_abs() < 1e-13);
            }
        }
    }
}

#[test]
fn besov_and_holder_of_single_modes() {
    let g = grid(64);
    let part = DyadicPartition::new(&g).unwrap();
    let weights = |m: f64| -> Vec<f64> { part.block_indices().map(|q| annulus_profile(m / 2f64.powi(q))).collect() };
    let alpha = 0.5;
    let holder_oracle = |w: &[f64]| {
        part.block_indices()
            .zip(w)
            .map(|(q, w)| 2f64.powf(q as f64 * alpha) * w)
            .fold(0.0, f64::max)
    };
    let two = weights(2.0);
    let f = cosine(&g, 2.0);
    assert!((besov_b0_inf_inf(&f, &part) - two.iter().cloned().fold(0.0, f64::max)).abs() < 1e-13);
    assert!((holder_norm(&f, alpha, &part).unwrap() - holder_oracle(&two)).abs() < 1e-13);

    let eight = weights(8.0);
    let sum = f.add(&cosine(&g, 8.0)).unwrap();
    let combined: Vec<f64> = two.iter().zip(&eight).map(|(a, b)| a.max(*b)).collect();
    assert!(two.iter().zip(&eight).all(|(a, b)| a * b == 0.0), "blocks overlap");
    assert!((besov_b0_inf_inf(&sum, &part) - combined.iter().cloned().fold(0.0, f64::max)).abs() < 1e-13);
    let norms = sum.block_sup_norms(&part);
    assert!(max_diff(&norms, &combined) < 1e-13);
}

#[test]
fn bernstein_single_mode_in_adjacent_blocks() {
    let g = grid(64);
    let part = DyadicPartition::new(&g).unwrap();
    let (lo, hi) = bernstein_window();
    let f = cosine(&g, 5.0);
    // |ξ| = 5 lies in the annuli of q = 1 and q = 2
    for q in [1, 2] {
        for p in [Norm::L2, Norm::Inf] {
            let r = check_bernstein(&f, q, p, &part).unwrap();
            let exact = 5.0 / 2f64.powi(q);
            assert!((r.ratio - exact).abs() < 1e-12, "q = {q}: {}", r.ratio);
            assert!(lo <= r.ratio && r.ratio <= hi);
        }
    }
    assert!(check_bernstein(&f, 3, Norm::L2, &part).is_err());
}

#[test]
fn heat_decays_single_mode_exactly() {
    let g = grid(64);
    let part = DyadicPartition::new(&g).unwrap();
    let f = ScalarField::from_fn(&g, |x, y| (3.0 * x + 4.0 * y).cos());
    for q in [1, 2] {
        let r = check_heat_decay(&f, q, 0.1, &part).unwrap();
        assert!((r - (-25.0 * 0.1f64).exp()).abs() < 1e-13);
        assert_eq!(check_heat_decay(&f, q, 0.0, &part).unwrap(), 1.0);
    }
}

#[test]
fn log_interpolation_ratio_falls_with_frequency() {
    let g = grid(64);
    let part = DyadicPartition::new(&g).unwrap();
    let ratios: Vec<f64> = (1..=4)
        .map(|k| check_log_interpolation(&cosine(&g, 2f64.powi(k)), 0.5, &part).unwrap().ratio)
        .collect();
    assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
    assert_eq!(check_log_interpolation(&ScalarField::zeros(&g), 0.5, &part).unwrap().ratio, 0.0);
}

#[test]
fn static_history_reduces_to_pointwise_quantities() {
    let g = grid(32);
    let part = DyadicPartition::new(&g).unwrap();
    let f = random_scalar(&g, 5, 6, -1.0).unwrap();
    let dt = 0.05;
    let history = vec![f.clone(); 21];
    let r = check_log_interpolation_time(&history, dt, 0.5, &part).unwrap();
    let t = 1.0;
    let grad = gradient(&f);
    assert!((r.lhs - t * grad.max_abs()).abs() < 1e-12 * r.lhs);
    assert!((r.l2_integral - t * lp_norm(&f, Norm::L2)).abs() < 1e-12 * r.l2_integral);
    let blocks = grad.block_sup_norms(&part).into_iter().fold(0.0, f64::max);
    assert!((r.block_integral_sup - t * blocks).abs() < 1e-12 * r.block_integral_sup);
    assert!((r.holder_integral - t * holder_norm(&grad, 0.5, &part).unwrap()).abs() < 1e-12 * r.holder_integral);
}
