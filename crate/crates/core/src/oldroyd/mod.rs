//! The Oldroyd-B system
//!
//! ```text
//! ∂ₜv + v·∇v + ∇p = νΔv + μ₁∇·τ
//! ∂ₜτ + v·∇τ + aτ = Q(τ, ∇v) + μ₂D(v),     ∇·v = 0
//! Q(τ, ∇v) = Wτ − τW + b(Dτ + τD)
//! ```
//!
//! on the periodic square. The pressure is eliminated by Leray projection;
//! [`recover_pressure`] rebuilds it as a diagnostic. Velocity gradients use
//! the convention `(∇v)ᵢⱼ = ∂ⱼvᵢ`, so `v·∇v = (∇v)v` and, for `b = 1`,
//! `Q = ∇v τ + τ (∇v)ᵀ`.

mod diagnostics;
mod kinematics;
mod step;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{SymTensorField, VectorField};

pub use diagnostics::{conformation_diagnostics, energy_functional, ConformationDiagnostics, Energy};
pub use kinematics::{
    deformation, q_bilinear, recover_pressure, rhs_stress, rhs_velocity, velocity_gradient,
    vorticity, VelocityGradient,
};
pub use step::{ns_forced_step, step, Forcing, SteadyForcing};

/// Coefficients of the Oldroyd-B system. Missing keys take the normalized
/// values when deserializing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OldroydParams {
    /// Viscosity ν.
    pub nu: f64,
    /// Reciprocal relaxation time a.
    pub a: f64,
    pub mu1: f64,
    pub mu2: f64,
    /// Slip parameter b ∈ [−1, 1].
    pub b: f64,
}

impl Default for OldroydParams {
    /// The normalized system: `a = 0`, `ν = μ₁ = μ₂ = b = 1`.
    fn default() -> Self {
        OldroydParams {
            nu: 1.0,
            a: 0.0,
            mu1: 1.0,
            mu2: 1.0,
            b: 1.0,
        }
    }
}

impl OldroydParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("nu", self.nu), ("a", self.a), ("mu1", self.mu1), ("mu2", self.mu2)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} = {v} must be a finite non-negative number"
                )));
            }
        }
        if !(-1.0..=1.0).contains(&self.b) {
            return Err(Error::InvalidArgument(format!(
                "b = {} must lie in [-1, 1]",
                self.b
            )));
        }
        Ok(())
    }

    pub fn is_normalized(&self) -> bool {
        *self == OldroydParams::default()
    }
}

/// Snapshot of an Oldroyd-B run. Fields are kept as grid samples.
#[derive(Debug, Clone)]
pub struct OldroydState {
    pub v: VectorField,
    pub tau: SymTensorField,
    pub t: f64,
    pub step: u64,
    pub params: OldroydParams,
}

impl OldroydState {
    pub fn new(v: VectorField, tau: SymTensorField, params: OldroydParams) -> Result<Self> {
        params.validate()?;
        crate::field::same_grid(v.grid(), tau.grid())?;
        Ok(OldroydState {
            v: v.to_real(),
            tau: tau.to_real(),
            t: 0.0,
            step: 0,
            params,
        })
    }

    pub fn zeros(grid: &std::sync::Arc<crate::Grid>, params: OldroydParams) -> Self {
        OldroydState {
            v: VectorField::zeros(grid),
            tau: SymTensorField::zeros(grid),
            t: 0.0,
            step: 0,
            params,
        }
    }

    pub fn grid(&self) -> &std::sync::Arc<crate::Grid> {
        self.v.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.tau.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_normalized() {
        assert!(OldroydParams::default().is_normalized());
        assert!(OldroydParams::default().validate().is_ok());
    }

    #[test]
    fn parameter_ranges() {
        let bad_b = OldroydParams {
            b: 1.5,
            ..Default::default()
        };
        let msg = bad_b.validate().unwrap_err().to_string();
        assert!(msg.contains("b = 1.5") && msg.contains("[-1, 1]"), "{msg}");
        let bad_nu = OldroydParams {
            nu: -0.1,
            ..Default::default()
        };
        assert!(bad_nu.validate().is_err());
    }
}
