//! Criterion quantities sampled along a run, their time integrals and
//! running suprema, and the CSV/JSON outputs.
//!
//! Tensor norm conventions: `L^∞`, Hölder and Besov norms use the pointwise
//! operator norm, `L¹` the operator norm, `L²` the Frobenius norm, and BMO
//! the largest component BMO. Vector fields use the Euclidean norm.

mod criteria;
mod csv_io;
mod report;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{same_grid, SymTensorField, VectorField};
use crate::lp::{tensor_bmo_norm, weighted_sup, BlockNormed, DyadicPartition};
use crate::mhd::{h_tensor, mhd_energy, MhdState};
use crate::oldroyd::{conformation_diagnostics, energy_functional, velocity_gradient, OldroydState};
use crate::spectral::{tensor_lp_norm, vector_lp_norm, Norm, PointwiseNorm};

pub use criteria::{
    a_priori_check, besov_criterion, chemin_lerner_norm, cm_criterion, energy_law_residual,
    holder_trackers, improved_criterion, mhd_energy_residual, planchon_tail, planchon_tail_bound,
    APriori, HolderTrackers,
};
pub use csv_io::{read_csv, write_csv, CsvMeta, CsvSink, CSV_SCHEMA_VERSION};
pub use report::{
    build_report, Conventions, CriterionReport, EnergyBalance, ReportOptions, TailEntry, Trend,
    REPORT_SCHEMA_VERSION,
};

/// Every criterion quantity of one snapshot.
///
/// For MHD snapshots the tensor entries refer to `H⊗H − I/2`, and `energy`
/// is `∫|v|² + |H|²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionSample {
    pub t: f64,
    pub tau_sup: f64,
    pub tau_l2: f64,
    pub tau_l1: f64,
    pub tau_bmo: f64,
    /// `sup_q ‖Δ_q τ‖_∞`.
    pub tau_besov: f64,
    /// `‖v‖_{Ċ^{1+α}}`.
    pub v_holder: f64,
    /// `‖τ‖_{Ċ^α}`.
    pub tau_holder: f64,
    pub grad_v_sup: f64,
    pub v_l2: f64,
    pub energy: f64,
    pub dissipation: f64,
    pub conf_min_eig: f64,
    pub conf_min_det: f64,
    /// Component-max BMO of `H`; zero for Oldroyd-B.
    pub h_bmo: f64,
    /// `‖Δ_q τ‖_∞` for `q = q_min..=q_max`.
    pub dq_tau: Vec<f64>,
    /// `2^q ‖Δ_q v‖_∞` for `q = q_min..=q_max`.
    pub dq_v: Vec<f64>,
}

/// Names of the scalar columns, in CSV order after `t`.
pub const SCALAR_COLUMNS: [&str; 14] = [
    "tau_sup",
    "tau_l2",
    "tau_l1",
    "tau_bmo",
    "tau_besov",
    "v_holder",
    "tau_holder",
    "grad_v_sup",
    "v_l2",
    "energy",
    "dissipation",
    "conf_min_eig",
    "conf_min_det",
    "h_bmo",
];

impl CriterionSample {
    pub(crate) fn scalars(&self) -> [f64; 14] {
        [
            self.tau_sup,
            self.tau_l2,
            self.tau_l1,
            self.tau_bmo,
            self.tau_besov,
            self.v_holder,
            self.tau_holder,
            self.grad_v_sup,
            self.v_l2,
            self.energy,
            self.dissipation,
            self.conf_min_eig,
            self.conf_min_det,
            self.h_bmo,
        ]
    }

    pub(crate) fn from_scalars(t: f64, s: [f64; 14], dq_tau: Vec<f64>, dq_v: Vec<f64>) -> Self {
        CriterionSample {
            t,
            tau_sup: s[0],
            tau_l2: s[1],
            tau_l1: s[2],
            tau_bmo: s[3],
            tau_besov: s[4],
            v_holder: s[5],
            tau_holder: s[6],
            grad_v_sup: s[7],
            v_l2: s[8],
            energy: s[9],
            dissipation: s[10],
            conf_min_eig: s[11],
            conf_min_det: s[12],
            h_bmo: s[13],
            dq_tau,
            dq_v,
        }
    }
}

/// Largest singular value of `[[a, b], [c, d]]`.
fn matrix_operator_norm(a: f64, b: f64, c: f64, d: f64) -> f64 {
    0.5 * ((a + d).hypot(b - c) + (a - d).hypot(b + c))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("α = {alpha} must lie in (0, 1)")));
    }
    Ok(())
}

struct Common {
    tau_sup: f64,
    tau_l2: f64,
    tau_l1: f64,
    tau_bmo: f64,
    tau_besov: f64,
    v_holder: f64,
    tau_holder: f64,
    grad_v_sup: f64,
    v_l2: f64,
    dq_tau: Vec<f64>,
    dq_v: Vec<f64>,
}

fn common(v: &VectorField, tau: &SymTensorField, part: &DyadicPartition, alpha: f64) -> Result<Common> {
    check_alpha(alpha)?;
    same_grid(v.grid(), part.grid())?;
    same_grid(tau.grid(), part.grid())?;
    let q_min = part.q_min();
    let dq_tau = tau.block_sup_norms(part);
    let v_blocks = v.block_sup_norms(part);
    let dq_v: Vec<f64> = v_blocks
        .iter()
        .enumerate()
        .map(|(i, b)| 2f64.powi(q_min + i as i32) * b)
        .collect();
    let g = velocity_gradient(v);
    let parts = [g.xx.values(), g.xy.values(), g.yx.values(), g.yy.values()];
    let grad_v_sup = (0..v.grid().len())
        .map(|i| matrix_operator_norm(parts[0][i], parts[1][i], parts[2][i], parts[3][i]))
        .fold(0.0, f64::max);
    Ok(Common {
        tau_sup: tensor_lp_norm(tau, Norm::Inf, PointwiseNorm::Operator),
        tau_l2: tensor_lp_norm(tau, Norm::L2, PointwiseNorm::Frobenius),
        tau_l1: tensor_lp_norm(tau, Norm::L1, PointwiseNorm::Operator),
        tau_bmo: tensor_bmo_norm(tau),
        tau_besov: dq_tau.iter().copied().fold(0.0, f64::max),
        v_holder: weighted_sup(&v_blocks, q_min, 1.0 + alpha),
        tau_holder: weighted_sup(&dq_tau, q_min, alpha),
        grad_v_sup,
        v_l2: vector_lp_norm(v, Norm::L2),
        dq_tau,
        dq_v,
    })
}

/// Samples an Oldroyd-B snapshot with Hölder exponent `α ∈ (0, 1)`.
pub fn sample(state: &OldroydState, part: &DyadicPartition, alpha: f64) -> Result<CriterionSample> {
    let c = common(&state.v, &state.tau, part, alpha)?;
    let e = energy_functional(state);
    let conf = conformation_diagnostics(state);
    Ok(CriterionSample {
        t: state.t,
        tau_sup: c.tau_sup,
        tau_l2: c.tau_l2,
        tau_l1: c.tau_l1,
        tau_bmo: c.tau_bmo,
        tau_besov: c.tau_besov,
        v_holder: c.v_holder,
        tau_holder: c.tau_holder,
        grad_v_sup: c.grad_v_sup,
        v_l2: c.v_l2,
        energy: e.kinetic_plus_trace,
        dissipation: e.dissipation_rate,
        conf_min_eig: conf.min_eigenvalue,
        conf_min_det: conf.min_det,
        h_bmo: 0.0,
        dq_tau: c.dq_tau,
        dq_v: c.dq_v,
    })
}

/// Samples an MHD snapshot, with `H⊗H − I/2` in the role of the stress.
pub fn sample_mhd(state: &MhdState, part: &DyadicPartition, alpha: f64) -> Result<CriterionSample> {
    let grid = state.grid();
    let hh = h_tensor(&state.h);
    let tau = SymTensorField {
        xx: hh.xx.add(&crate::ScalarField::constant(grid, -0.5))?,
        xy: hh.xy,
        yy: hh.yy.add(&crate::ScalarField::constant(grid, -0.5))?,
    };
    let c = common(&state.v, &tau, part, alpha)?;
    let (energy, dissipation) = mhd_energy(state);
    let proxy = OldroydState {
        v: state.v.clone(),
        tau,
        t: state.t,
        step: state.step,
        params: Default::default(),
    };
    let conf = conformation_diagnostics(&proxy);
    let h_bmo = crate::lp::bmo_norm(&state.h.x).max(crate::lp::bmo_norm(&state.h.y));
    Ok(CriterionSample {
        t: state.t,
        tau_sup: c.tau_sup,
        tau_l2: c.tau_l2,
        tau_l1: c.tau_l1,
        tau_bmo: c.tau_bmo,
        tau_besov: c.tau_besov,
        v_holder: c.v_holder,
        tau_holder: c.tau_holder,
        grad_v_sup: c.grad_v_sup,
        v_l2: c.v_l2,
        energy,
        dissipation,
        conf_min_eig: conf.min_eigenvalue,
        conf_min_det: conf.min_det,
        h_bmo,
        dq_tau: c.dq_tau,
        dq_v: c.dq_v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::oldroyd::OldroydParams;
    use std::f64::consts::PI;

    #[test]
    fn singular_value_of_shear() {
        // [[0, 1], [0, 0]] has singular values 1 and 0
        assert!((matrix_operator_norm(0.0, 1.0, 0.0, 0.0) - 1.0).abs() < 1e-15);
        assert!((matrix_operator_norm(0.0, -1.0, 1.0, 0.0) - 1.0).abs() < 1e-15);
        assert!((matrix_operator_norm(3.0, 0.0, 0.0, -2.0) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_state_sample() {
        let g = Grid::new(32, 2.0 * PI).unwrap();
        let part = DyadicPartition::new(&g).unwrap();
        let s = OldroydState::zeros(&g, OldroydParams::default());
        let c = sample(&s, &part, 0.5).unwrap();
        assert!(c.scalars()[..11].iter().all(|&x| x == 0.0));
        assert_eq!((c.conf_min_eig, c.conf_min_det), (1.0, 1.0));
        assert!(c.dq_tau.iter().chain(&c.dq_v).all(|&x| x == 0.0));
    }

    #[test]
    fn alpha_range() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let part = DyadicPartition::new(&g).unwrap();
        let s = OldroydState::zeros(&g, OldroydParams::default());
        assert!(sample(&s, &part, 1.0).is_err());
    }
}
