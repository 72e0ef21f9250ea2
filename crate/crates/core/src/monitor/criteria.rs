//! Time integrals and running suprema over a sampled history. All integrals
//! use the trapezoidal rule on the sample times.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monitor::CriterionSample;
use crate::oldroyd::OldroydParams;
use crate::quadrature::{running_max, tail_trapezoid, trapezoid};

/// Sample times, checked non-empty, strictly increasing and with consistent
/// block vectors.
pub(crate) fn times(history: &[CriterionSample]) -> Result<Vec<f64>> {
    let first = history.first().ok_or(Error::EmptyHistory)?;
    for w in history.windows(2) {
        if !(w[1].t > w[0].t) {
            return Err(Error::HistoryMismatch(format!(
                "sample times must increase strictly ({} then {})",
                w[0].t, w[1].t
            )));
        }
    }
    let (nt, nv) = (first.dq_tau.len(), first.dq_v.len());
    if history.iter().any(|s| s.dq_tau.len() != nt || s.dq_v.len() != nv) {
        return Err(Error::HistoryMismatch("block vectors differ in length".into()));
    }
    Ok(history.iter().map(|s| s.t).collect())
}

fn integrate(history: &[CriterionSample], f: impl Fn(&CriterionSample) -> f64) -> Result<f64> {
    let t = times(history)?;
    let v: Vec<f64> = history.iter().map(f).collect();
    Ok(trapezoid(&t, &v))
}

/// `∫ ‖τ‖_∞ + |b| ‖τ‖²_{L²} dt`.
pub fn cm_criterion(history: &[CriterionSample], b: f64) -> Result<f64> {
    integrate(history, |s| s.tau_sup + b.abs() * s.tau_l2 * s.tau_l2)
}

/// `(∫ ‖τ‖_BMO dt, sup_t ‖τ‖_{L¹})`.
pub fn improved_criterion(history: &[CriterionSample]) -> Result<(f64, f64)> {
    let bmo = integrate(history, |s| s.tau_bmo)?;
    let l1 = history.iter().map(|s| s.tau_l1).fold(0.0, f64::max);
    Ok((bmo, l1))
}

/// `∫ sup_q ‖Δ_q τ‖_∞ dt`.
pub fn besov_criterion(history: &[CriterionSample]) -> Result<f64> {
    integrate(history, |s| s.tau_besov)
}

fn tail_start(t: &[f64], delta: f64) -> Result<f64> {
    let (t0, t1) = (t[0], t[t.len() - 1]);
    if !(delta > 0.0 && delta <= t1 - t0) {
        return Err(Error::InvalidArgument(format!(
            "tail window δ = {delta} must lie in (0, {}]",
            t1 - t0
        )));
    }
    Ok(t1 - delta)
}

/// `sup_q ∫_{T−δ}^{T} ‖Δ_q τ‖_∞ dt`: the integral inside, the supremum outside.
pub fn planchon_tail(history: &[CriterionSample], delta: f64) -> Result<f64> {
    let t = times(history)?;
    let start = tail_start(&t, delta)?;
    let blocks = history[0].dq_tau.len();
    let tail = (0..blocks)
        .map(|q| {
            let series: Vec<f64> = history.iter().map(|s| s.dq_tau[q]).collect();
            tail_trapezoid(&t, &series, start)
        })
        .fold(0.0, f64::max);
    Ok(tail)
}

/// `∫_{T−δ}^{T} sup_q ‖Δ_q τ‖_∞ dt`, which bounds [`planchon_tail`].
pub fn planchon_tail_bound(history: &[CriterionSample], delta: f64) -> Result<f64> {
    let t = times(history)?;
    let start = tail_start(&t, delta)?;
    let series: Vec<f64> = history.iter().map(|s| s.tau_besov).collect();
    Ok(tail_trapezoid(&t, &series, start))
}

fn relative_residual(history: &[CriterionSample], weight: f64) -> Result<f64> {
    let t = times(history)?;
    let d: Vec<f64> = history.iter().map(|s| s.dissipation).collect();
    let e0 = history[0].energy;
    let e1 = history[history.len() - 1].energy;
    let r = (e1 + weight * trapezoid(&t, &d) - e0).abs();
    Ok(if r == 0.0 { 0.0 } else { r / e0.abs().max(f64::MIN_POSITIVE) })
}

/// `|E(T) + 2∫D dt − E(0)| / E(0)` for `E = ∫|v|² + tr τ` and `D = ∫|∇v|²`.
///
/// The balance `d/dt(∫|v|² + tr τ) = −2∫|∇v|²` holds only for the normalized
/// coefficients; other parameters are refused.
pub fn energy_law_residual(history: &[CriterionSample], params: &OldroydParams) -> Result<f64> {
    if !params.is_normalized() {
        return Err(Error::NotNormalized);
    }
    relative_residual(history, 2.0)
}

/// `|E(T) + 2ν∫D dt − E(0)| / E(0)` for `E = ∫|v|² + |H|²`.
pub fn mhd_energy_residual(history: &[CriterionSample], nu: f64) -> Result<f64> {
    relative_residual(history, 2.0 * nu)
}

/// Running suprema `A(t) = sup_{s≤t} ‖v(s)‖_{Ċ^{1+α}}` and
/// `B(t) = sup_{s≤t} ‖τ(s)‖_{Ċ^α}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderTrackers {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

pub fn holder_trackers(history: &[CriterionSample]) -> HolderTrackers {
    let a: Vec<f64> = history.iter().map(|s| s.v_holder).collect();
    let b: Vec<f64> = history.iter().map(|s| s.tau_holder).collect();
    HolderTrackers {
        a: running_max(&a),
        b: running_max(&b),
    }
}

/// `‖v‖_{L̃¹_T(C¹)} = sup_q ∫ 2^q ‖Δ_q v‖_∞ dt`.
pub fn chemin_lerner_norm(history: &[CriterionSample]) -> Result<f64> {
    let t = times(history)?;
    let blocks = history[0].dq_v.len();
    Ok((0..blocks)
        .map(|q| {
            let series: Vec<f64> = history.iter().map(|s| s.dq_v[q]).collect();
            trapezoid(&t, &series)
        })
        .fold(0.0, f64::max))
}

/// `sup_t ‖v‖_{L²}` and `∫ ‖∇v‖²_{L²} dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct APriori {
    pub sup_v_l2: f64,
    pub grad_v_l2_sq_integral: f64,
    pub finite: bool,
}

pub fn a_priori_check(history: &[CriterionSample]) -> Result<APriori> {
    let sup_v_l2 = history.iter().map(|s| s.v_l2).fold(0.0, f64::max);
    let grad_v_l2_sq_integral = integrate(history, |s| s.dissipation)?;
    Ok(APriori {
        sup_v_l2,
        grad_v_l2_sq_integral,
        finite: sup_v_l2.is_finite() && grad_v_l2_sq_integral.is_finite(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blank(t: f64) -> CriterionSample {
        CriterionSample::from_scalars(t, [0.0; 14], vec![0.0; 3], vec![0.0; 3])
    }

    #[test]
    fn linear_sup_norm_integrates_exactly() {
        let h: Vec<CriterionSample> = (0..=10)
            .map(|i| {
                let t = i as f64 / 10.0;
                CriterionSample {
                    tau_sup: t,
                    ..blank(t)
                }
            })
            .collect();
        assert!((cm_criterion(&h, 0.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn empty_history_rejected() {
        assert!(matches!(cm_criterion(&[], 1.0), Err(Error::EmptyHistory)));
        assert!(matches!(chemin_lerner_norm(&[]), Err(Error::EmptyHistory)));
    }

    #[test]
    fn times_must_increase() {
        let h = vec![blank(0.0), blank(0.0)];
        assert!(matches!(besov_criterion(&h), Err(Error::HistoryMismatch(_))));
    }

    #[test]
    fn window_longer_than_history() {
        let h = vec![blank(0.0), blank(1.0)];
        assert!(planchon_tail(&h, 1.5).is_err());
        assert!(planchon_tail(&h, 0.0).is_err());
        assert_eq!(planchon_tail(&h, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn non_normalized_energy_refused() {
        let h = vec![blank(0.0), blank(1.0)];
        let p = OldroydParams {
            nu: 0.5,
            ..Default::default()
        };
        assert!(matches!(energy_law_residual(&h, &p), Err(Error::NotNormalized)));
        assert_eq!(energy_law_residual(&h, &OldroydParams::default()).unwrap(), 0.0);
    }

    #[test]
    fn trackers_keep_the_supremum() {
        let h: Vec<CriterionSample> = [3.0, 1.0, 2.0, 5.0]
            .iter()
            .enumerate()
            .map(|(i, &a)| CriterionSample {
                v_holder: a,
                ..blank(i as f64)
            })
            .collect();
        assert_eq!(holder_trackers(&h).a, vec![3.0, 3.0, 3.0, 5.0]);
    }
}
