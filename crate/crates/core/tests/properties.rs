use std::f64::consts::TAU;
use std::sync::Arc;

use proptest::prelude::*;

use lpflow::lp::{bmo_norm, holder_norm, DyadicPartition};
use lpflow::recipes::{random_scalar, random_solenoidal};
use lpflow::spectral::{divergence, gradient, integral, leray_project, product};
use lpflow::{Grid, ScalarField, VectorField};

const N: usize = 16;

fn grid() -> Arc<Grid> {
    Grid::new(N, TAU).unwrap()
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, N * N)
}

/// Band-limited scalar from a seed, rescaled to `‖f‖_∞ = scale`.
fn smooth(seed: u64, k_max: u32, scale: f64) -> ScalarField {
    random_scalar(&grid(), seed, k_max, -1.0).unwrap().scaled(scale)
}

fn vector(values: Vec<f64>) -> VectorField {
    let g = grid();
    let (x, y) = values.split_at(N * N);
    VectorField::new(
        ScalarField::from_values(&g, x.to_vec()).unwrap(),
        ScalarField::from_values(&g, y.to_vec()).unwrap(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transform_round_trips(v in samples()) {
        let g = grid();
        let back = g.inverse(&g.forward(&v));
        for (a, b) in v.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn parseval(v in samples()) {
        let g = grid();
        let physical: f64 = v.iter().map(|x| x * x).sum::<f64>() * g.cell_area();
        let spectral: f64 = g.forward(&v).iter().map(|c| c.norm_sqr()).sum::<f64>() * g.area();
        prop_assert!((physical - spectral).abs() <= 1e-12 * physical.max(1.0));
    }

    #[test]
    fn leray_is_an_idempotent_solenoidal_projection(v in prop::collection::vec(-1.0..1.0f64, 2 * N * N)) {
        let u = vector(v);
        let p = leray_project(&u);
        let pp = leray_project(&p);
        let scale = u.max_abs().max(1.0);
        prop_assert!(pp.sub(&p).unwrap().max_abs() <= 1e-13 * scale);
        prop_assert!(divergence(&p).max_abs() <= 1e-12 * scale * N as f64);
    }

    #[test]
    fn gradient_is_minus_adjoint_of_divergence(seed in 0u64..1000, vseed in 0u64..1000) {
        let g = grid();
        let f = smooth(seed, 4, 1.0);
        let u = random_solenoidal(&g, vseed, 4, -1.0, 1.0).unwrap()
            .add(&VectorField::new(smooth(vseed + 1, 3, 0.7), smooth(vseed + 2, 3, 0.4)).unwrap())
            .unwrap();
        let grad = gradient(&f);
        let lhs = integral(&product(&grad.x, &u.x).unwrap()) + integral(&product(&grad.y, &u.y).unwrap());
        let rhs = -integral(&product(&f, &divergence(&u)).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + lhs.abs()));
    }

    #[test]
    fn blocks_reconstruct_the_field(v in samples()) {
        let g = grid();
        let part = DyadicPartition::new(&g).unwrap();
        let f = ScalarField::from_values(&g, v.clone()).unwrap();
        let back = part.decompose(&f).reconstruct().to_real();
        prop_assert!(sup(&back.sub(&f).unwrap().values()) <= 1e-12 * sup(&v).max(1.0));
    }

    #[test]
    fn distant_blocks_are_orthogonal(v in samples()) {
        let g = grid();
        let part = DyadicPartition::new(&g).unwrap();
        let f = ScalarField::from_values(&g, v.clone()).unwrap();
        for q in part.block_indices() {
            for r in part.block_indices().filter(|r| (q - r).abs() >= 2) {
                let both = part.delta_q(&part.delta_q(&f, r), q);
                prop_assert!(both.to_real().max_abs() <= 1e-13 * sup(&v).max(1.0), "q = {q}, q' = {r}");
            }
        }
    }

    #[test]
    fn holder_is_homogeneous_and_blind_to_constants(seed in 0u64..1000, c in 0.1..3.5f64, k in -5.0..5.0f64) {
        let g = grid();
        let part = DyadicPartition::new(&g).unwrap();
        let f = smooth(seed, 5, 1.0);
        let base = holder_norm(&f, 0.5, &part).unwrap();
        let scaled = holder_norm(&f.scaled(c), 0.5, &part).unwrap();
        let shifted = holder_norm(&f.add(&ScalarField::constant(&g, k)).unwrap(), 0.5, &part).unwrap();
        prop_assert!((scaled - c * base).abs() <= 1e-12 * c * base);
        prop_assert!((shifted - base).abs() <= 1e-12 * base);
    }

    #[test]
    fn bmo_is_bounded_by_twice_the_sup(seed in 0u64..1000, scale in 0.1..10.0f64) {
        let g = grid();
        let f = smooth(seed, 5, scale);
        let peak = sup(&g.oversample(&f.spectrum()));
        prop_assert!(bmo_norm(&f) <= 2.0 * peak * (1.0 + 1e-12));
    }

    #[test]
    fn bmo_of_a_constant_vanishes(k in -100.0..100.0f64) {
        let f = ScalarField::constant(&grid(), k);
        prop_assert!(bmo_norm(&f) <= 1e-12 * k.abs().max(1.0));
    }
}
