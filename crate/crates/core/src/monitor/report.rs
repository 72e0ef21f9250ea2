use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::monitor::criteria::{self, times};
use crate::monitor::CriterionSample;
use crate::oldroyd::OldroydParams;
use crate::quadrature::{cumulative_trapezoid, running_max, tail_trapezoid};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Which energy balance applies to the history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EnergyBalance {
    Oldroyd { params: OldroydParams },
    Mhd { nu: f64 },
    /// Forced runs have no closed balance.
    None,
}

/// Everything besides the samples that the report depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    pub system: String,
    pub alpha: f64,
    /// Coefficient `b` in `∫ ‖τ‖_∞ + |b| ‖τ‖²_{L²} dt`.
    pub b: f64,
    /// Tail windows `δ`.
    pub deltas: Vec<f64>,
    pub energy: EnergyBalance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub tensor_sup: String,
    pub tensor_l1: String,
    pub tensor_l2: String,
    pub tensor_bmo: String,
    pub vector: String,
    pub quadrature: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            tensor_sup: "pointwise operator norm".into(),
            tensor_l1: "pointwise operator norm".into(),
            tensor_l2: "pointwise Frobenius norm".into(),
            tensor_bmo: "maximum over the three components".into(),
            vector: "pointwise Euclidean norm".into(),
            quadrature: "trapezoidal rule on sample times".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEntry {
    pub delta: f64,
    /// `sup_q ∫_{T−δ}^{T} ‖Δ_q τ‖_∞ dt`.
    pub tail: f64,
    /// `∫_{T−δ}^{T} sup_q ‖Δ_q τ‖_∞ dt`.
    pub bound: f64,
}

/// Heuristic growth flag: mean integrand over the last quarter of the run
/// against the quarter before it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trend {
    pub criterion: String,
    pub previous_quarter_rate: f64,
    pub last_quarter_rate: f64,
    pub growing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub schema_version: u32,
    pub system: String,
    pub alpha: f64,
    pub conventions: Conventions,
    pub samples: usize,
    pub t_start: f64,
    pub t_final: f64,
    pub cm_b: f64,
    pub cm_criterion: f64,
    pub bmo_integral: f64,
    pub l1_sup: f64,
    pub besov_integral: f64,
    pub planchon: Vec<TailEntry>,
    /// Windows longer than the sampled span.
    pub skipped_windows: Vec<f64>,
    pub energy_residual: Option<f64>,
    pub holder_a_final: f64,
    pub holder_b_final: f64,
    pub chemin_lerner: f64,
    pub a_priori: criteria::APriori,
    /// `∫ ‖H‖²_BMO dt` for MHD runs.
    pub h_bmo_sq_integral: Option<f64>,
    pub conf_min_eig: f64,
    pub conf_min_det: f64,
    /// Every cumulative integral and running supremum is nondecreasing.
    pub monotone: bool,
    /// `tail ≤ bound` for every window.
    pub planchon_bound_holds: bool,
    /// Trend flags are heuristics; finite runs cannot decide blowup.
    pub trends: Vec<Trend>,
    pub blowup: Option<String>,
    pub config: Option<serde_json::Value>,
}

fn nondecreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] >= w[0])
}

fn trend(name: &str, t: &[f64], values: &[f64]) -> Option<Trend> {
    let (t0, t1) = (t[0], *t.last()?);
    let quarter = 0.25 * (t1 - t0);
    if !(quarter > 0.0) {
        return None;
    }
    let last = tail_trapezoid(t, values, t1 - quarter) / quarter;
    let both = tail_trapezoid(t, values, t1 - 2.0 * quarter) / quarter;
    let previous = both - last;
    Some(Trend {
        criterion: name.into(),
        previous_quarter_rate: previous,
        last_quarter_rate: last,
        growing: last > 2.0 * previous && last > 0.0,
    })
}

/// Assembles the report for a sampled history.
pub fn build_report(
    history: &[CriterionSample],
    options: &ReportOptions,
    blowup: Option<String>,
    config: Option<serde_json::Value>,
) -> Result<CriterionReport> {
    let t = times(history)?;
    let cm_series: Vec<f64> = history
        .iter()
        .map(|s| s.tau_sup + options.b.abs() * s.tau_l2 * s.tau_l2)
        .collect();
    let bmo_series: Vec<f64> = history.iter().map(|s| s.tau_bmo).collect();
    let besov_series: Vec<f64> = history.iter().map(|s| s.tau_besov).collect();
    let l1_series: Vec<f64> = history.iter().map(|s| s.tau_l1).collect();

    let mut planchon = Vec::new();
    let mut skipped_windows = Vec::new();
    for &delta in &options.deltas {
        match (
            criteria::planchon_tail(history, delta),
            criteria::planchon_tail_bound(history, delta),
        ) {
            (Ok(tail), Ok(bound)) => planchon.push(TailEntry { delta, tail, bound }),
            _ => skipped_windows.push(delta),
        }
    }
    let planchon_bound_holds = planchon
        .iter()
        .all(|e| e.tail <= e.bound * (1.0 + 1e-12) + f64::MIN_POSITIVE);

    let energy_residual = match &options.energy {
        EnergyBalance::Oldroyd { params } if params.is_normalized() => {
            Some(criteria::energy_law_residual(history, params)?)
        }
        EnergyBalance::Mhd { nu } => Some(criteria::mhd_energy_residual(history, *nu)?),
        _ => None,
    };
    let h_bmo_sq_integral = match options.energy {
        EnergyBalance::Mhd { .. } => {
            let sq: Vec<f64> = history.iter().map(|s| s.h_bmo * s.h_bmo).collect();
            Some(crate::quadrature::trapezoid(&t, &sq))
        }
        _ => None,
    };

    let trackers = criteria::holder_trackers(history);
    let mut monotone = [&cm_series, &bmo_series, &besov_series]
        .iter()
        .all(|s| nondecreasing(&cumulative_trapezoid(&t, s)));
    monotone &= nondecreasing(&running_max(&l1_series));
    monotone &= nondecreasing(&trackers.a) && nondecreasing(&trackers.b);

    let trends = [
        ("cm_criterion", &cm_series),
        ("bmo_integral", &bmo_series),
        ("besov_integral", &besov_series),
    ]
    .iter()
    .filter_map(|(name, s)| trend(name, &t, s))
    .collect();

    let (bmo_integral, l1_sup) = criteria::improved_criterion(history)?;
    Ok(CriterionReport {
        schema_version: REPORT_SCHEMA_VERSION,
        system: options.system.clone(),
        alpha: options.alpha,
        conventions: Conventions::default(),
        samples: history.len(),
        t_start: t[0],
        t_final: t[t.len() - 1],
        cm_b: options.b,
        cm_criterion: criteria::cm_criterion(history, options.b)?,
        bmo_integral,
        l1_sup,
        besov_integral: criteria::besov_criterion(history)?,
        planchon,
        skipped_windows,
        energy_residual,
        holder_a_final: trackers.a.last().copied().unwrap_or(0.0),
        holder_b_final: trackers.b.last().copied().unwrap_or(0.0),
        chemin_lerner: criteria::chemin_lerner_norm(history)?,
        a_priori: criteria::a_priori_check(history)?,
        h_bmo_sq_integral,
        conf_min_eig: history.iter().map(|s| s.conf_min_eig).fold(f64::INFINITY, f64::min),
        conf_min_det: history.iter().map(|s| s.conf_min_det).fold(f64::INFINITY, f64::min),
        monotone,
        planchon_bound_holds,
        trends,
        blowup,
        config,
    })
}
