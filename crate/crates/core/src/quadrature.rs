//! Trapezoidal time quadrature on sampled histories.

/// `∫ f dt` over the sample times, trapezoidal rule.
pub fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    debug_assert_eq!(times.len(), values.len());
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}

/// Running trapezoidal integrals, one entry per sample (first entry 0).
pub fn cumulative_trapezoid(times: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    if !times.is_empty() {
        out.push(0.0);
    }
    for (t, v) in times.windows(2).zip(values.windows(2)) {
        acc += 0.5 * (t[1] - t[0]) * (v[0] + v[1]);
        out.push(acc);
    }
    out
}

/// `∫_{start}^{t_last} f dt` for the piecewise-linear interpolant of the samples.
///
/// `start` is clamped to the sampled interval.
pub fn tail_trapezoid(times: &[f64], values: &[f64], start: f64) -> f64 {
    debug_assert_eq!(times.len(), values.len());
    let mut acc = 0.0;
    for (t, v) in times.windows(2).zip(values.windows(2)) {
        if t[1] <= start {
            continue;
        }
        if t[0] >= start {
            acc += 0.5 * (t[1] - t[0]) * (v[0] + v[1]);
        } else {
            let w = (start - t[0]) / (t[1] - t[0]);
            let v_start = v[0] + w * (v[1] - v[0]);
            acc += 0.5 * (t[1] - start) * (v_start + v[1]);
        }
    }
    acc
}

/// Running maxima.
pub fn running_max(values: &[f64]) -> Vec<f64> {
    let mut m = f64::NEG_INFINITY;
    values
        .iter()
        .map(|&v| {
            m = m.max(v);
            m
        })
        .collect()
}
