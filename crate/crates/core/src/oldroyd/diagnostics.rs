use serde::{Deserialize, Serialize};

use crate::field::sym_eigenvalues;
use crate::oldroyd::{velocity_gradient, OldroydState};
use crate::spectral::integral;

/// `∫|v|² + tr τ dx` and `∫|∇v|² dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Energy {
    pub kinetic_plus_trace: f64,
    pub dissipation_rate: f64,
}

pub fn energy_functional(state: &OldroydState) -> Energy {
    let grid = state.grid();
    let (vx, vy) = (state.v.x.values(), state.v.y.values());
    let tr = state.tau.trace();
    let tr = tr.values();
    let density: Vec<f64> = (0..grid.len())
        .map(|i| vx[i] * vx[i] + vy[i] * vy[i] + tr[i])
        .collect();
    let g = velocity_gradient(&state.v);
    let parts = [g.xx.values(), g.xy.values(), g.yx.values(), g.yy.values()];
    let grad2: Vec<f64> = (0..grid.len())
        .map(|i| parts.iter().map(|p| p[i] * p[i]).sum())
        .collect();
    let quad = |v: Vec<f64>| {
        integral(&crate::ScalarField::from_values(grid, v).expect("grid length"))
    };
    Energy {
        kinetic_plus_trace: quad(density),
        dissipation_rate: quad(grad2),
    }
}

/// Extremes of the conformation tensor `A = I + 2τ` over the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConformationDiagnostics {
    pub min_eigenvalue: f64,
    pub min_det: f64,
    pub positive_definite: bool,
    pub det_above_one: bool,
}

pub fn conformation_diagnostics(state: &OldroydState) -> ConformationDiagnostics {
    let (a, b, c) = (state.tau.xx.values(), state.tau.xy.values(), state.tau.yy.values());
    let mut min_eigenvalue = f64::INFINITY;
    let mut min_det = f64::INFINITY;
    for i in 0..a.len() {
        let (p, q, r) = (1.0 + 2.0 * a[i], 2.0 * b[i], 1.0 + 2.0 * c[i]);
        min_eigenvalue = min_eigenvalue.min(sym_eigenvalues(p, q, r).0);
        min_det = min_det.min(p * r - q * q);
    }
    ConformationDiagnostics {
        min_eigenvalue,
        min_det,
        positive_definite: min_eigenvalue > 0.0,
        det_above_one: min_det > 1.0,
    }
}
