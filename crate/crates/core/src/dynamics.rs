//! Kernels shared by the Oldroyd-B and MHD steppers: pseudospectral
//! products, stress tendencies and the exponential RK2 time integrator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::spectral::dealias_in_place;

pub(crate) type Spectra = Vec<Vec<Complex64>>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Time integration scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Exponential RK2: viscous diffusion integrated exactly, every other
    /// term explicit (two stages).
    #[default]
    ImexRk2,
    /// Heun's method on the full right-hand side; reference only.
    ExplicitRk2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControls {
    pub dt: f64,
    pub scheme: Scheme,
    /// CFL requires `dt ≤ cfl_safety · dx / max(1, ‖v‖_∞)`.
    pub cfl_safety: f64,
    pub dealias: bool,
    /// `‖v‖_∞` above this counts as blowup.
    pub velocity_cap: f64,
    /// Test hook: drop every term except viscous diffusion and external forcing.
    pub disable_nonlinear: bool,
}

impl StepControls {
    pub fn new(dt: f64) -> Self {
        StepControls {
            dt,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.cfl_safety > 0.0) {
            return Err(Error::InvalidArgument("cfl_safety must be positive".into()));
        }
        Ok(())
    }

    pub fn cfl_limit(&self, grid: &Grid, max_speed: f64) -> f64 {
        self.cfl_safety * grid.dx() / max_speed.max(1.0)
    }

    pub(crate) fn check_cfl(&self, grid: &Grid, max_speed: f64) -> Result<()> {
        self.validate()?;
        let limit = self.cfl_limit(grid, max_speed);
        if self.dt > limit {
            return Err(Error::Cfl { dt: self.dt, limit });
        }
        Ok(())
    }
}

impl Default for StepControls {
    fn default() -> Self {
        StepControls {
            dt: 1e-3,
            scheme: Scheme::ImexRk2,
            cfl_safety: 0.5,
            dealias: true,
            velocity_cap: 1e8,
            disable_nonlinear: false,
        }
    }
}

/// Samples of a field and its two first derivatives.
pub(crate) struct Sampled {
    pub val: Vec<f64>,
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
}

pub(crate) fn sample_with_gradient(grid: &Grid, s: &[Complex64]) -> Sampled {
    let n = grid.n();
    let i = Complex64::new(0.0, 1.0);
    let sx: Vec<Complex64> = s
        .iter()
        .enumerate()
        .map(|(idx, c)| i * grid.deriv_wavenumber(idx % n) * c)
        .collect();
    let sy: Vec<Complex64> = s
        .iter()
        .enumerate()
        .map(|(idx, c)| i * grid.deriv_wavenumber(idx / n) * c)
        .collect();
    Sampled {
        val: grid.inverse(s),
        dx: grid.inverse(&sx),
        dy: grid.inverse(&sy),
    }
}

/// Velocity samples with the full gradient.
pub(crate) struct Velocity {
    pub x: Sampled,
    pub y: Sampled,
}

impl Velocity {
    pub fn new(grid: &Grid, vx: &[Complex64], vy: &[Complex64]) -> Self {
        Velocity {
            x: sample_with_gradient(grid, vx),
            y: sample_with_gradient(grid, vy),
        }
    }

    /// Samples of `(v·∇) f`.
    pub fn advect(&self, f: &Sampled) -> Vec<f64> {
        (0..f.val.len())
            .map(|i| self.x.val[i] * f.dx[i] + self.y.val[i] * f.dy[i])
            .collect()
    }
}

pub(crate) fn forward(grid: &Grid, values: &[f64], dealias: bool) -> Vec<Complex64> {
    let mut s = grid.forward(values);
    if dealias {
        dealias_in_place(grid, &mut s);
    }
    s
}

/// Spectra of `−(v·∇)v`.
pub(crate) fn momentum_advection(grid: &Grid, v: &Velocity, dealias: bool) -> [Vec<Complex64>; 2] {
    let ax: Vec<f64> = v.advect(&v.x).into_iter().map(|x| -x).collect();
    let ay: Vec<f64> = v.advect(&v.y).into_iter().map(|x| -x).collect();
    [forward(grid, &ax, dealias), forward(grid, &ay, dealias)]
}

/// Spectra of `∇·T` for a symmetric tensor given by spectra `(xx, xy, yy)`.
pub(crate) fn spectral_tensor_divergence(
    grid: &Grid,
    t: [&[Complex64]; 3],
) -> [Vec<Complex64>; 2] {
    let n = grid.n();
    let i = Complex64::new(0.0, 1.0);
    let mut dx = Vec::with_capacity(grid.len());
    let mut dy = Vec::with_capacity(grid.len());
    for idx in 0..grid.len() {
        let kx = grid.deriv_wavenumber(idx % n);
        let ky = grid.deriv_wavenumber(idx / n);
        dx.push(i * (kx * t[0][idx] + ky * t[1][idx]));
        dy.push(i * (kx * t[1][idx] + ky * t[2][idx]));
    }
    [dx, dy]
}

/// Leray projection in place, using the derivative wavenumbers.
pub(crate) fn project(grid: &Grid, x: &mut [Complex64], y: &mut [Complex64]) {
    let n = grid.n();
    for idx in 0..grid.len() {
        let kx = grid.deriv_wavenumber(idx % n);
        let ky = grid.deriv_wavenumber(idx / n);
        let k2 = kx * kx + ky * ky;
        if k2 > 0.0 {
            let p = (x[idx] * kx + y[idx] * ky) / k2;
            x[idx] -= p * kx;
            y[idx] -= p * ky;
        }
    }
}

/// Coefficients of the stress equation `∂τ + v·∇τ + aτ = Q(τ, ∇v) + μ₂ D(v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct StressCoefficients {
    pub relaxation: f64,
    pub mu2: f64,
    pub b: f64,
}

/// Pointwise `Q(τ, ∇v) = Wτ − τW + b(Dτ + τD)` for `τ = [[a, c], [c, d]]`
/// with `∇v` given as `g[i][j] = ∂ⱼ vᵢ`. Returns `(xx, xy, yy)`.
#[inline]
pub(crate) fn q_pointwise(tau: [f64; 3], g: [[f64; 2]; 2], b: f64) -> [f64; 3] {
    let [t11, t12, t22] = tau;
    let w = 0.5 * (g[0][1] - g[1][0]);
    let d11 = g[0][0];
    let d22 = g[1][1];
    let d12 = 0.5 * (g[0][1] + g[1][0]);
    [
        2.0 * w * t12 + b * 2.0 * (d11 * t11 + d12 * t12),
        w * (t22 - t11) + b * ((d11 + d22) * t12 + d12 * (t11 + t22)),
        -2.0 * w * t12 + b * 2.0 * (d12 * t12 + d22 * t22),
    ]
}

/// Spectra of `−v·∇τ − aτ + Q(τ, ∇v) + μ₂ D(v)`, or zero when `coupled` is off.
pub(crate) fn stress_tendency(
    grid: &Grid,
    v: &Velocity,
    tau: [&[Complex64]; 3],
    coeffs: StressCoefficients,
    dealias: bool,
    coupled: bool,
) -> [Vec<Complex64>; 3] {
    let mut out: [Vec<Complex64>; 3] = if coupled {
        let t: Vec<Sampled> = tau.iter().map(|s| sample_with_gradient(grid, s)).collect();
        let adv: Vec<Vec<f64>> = t.iter().map(|c| v.advect(c)).collect();
        let len = grid.len();
        let mut r = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
        for i in 0..len {
            let g = [[v.x.dx[i], v.x.dy[i]], [v.y.dx[i], v.y.dy[i]]];
            let q = q_pointwise([t[0].val[i], t[1].val[i], t[2].val[i]], g, coeffs.b);
            for c in 0..3 {
                r[c][i] = q[c] - adv[c][i];
            }
        }
        r.map(|x| forward(grid, &x, dealias))
    } else {
        [
            vec![ZERO; grid.len()],
            vec![ZERO; grid.len()],
            vec![ZERO; grid.len()],
        ]
    };
    if coupled {
        // linear terms −aτ + μ₂ D(v), evaluated spectrally
        let [dxx, dxy, dyy] = spectral_deformation(grid, v);
        for idx in 0..grid.len() {
            out[0][idx] += coeffs.mu2 * dxx[idx] - coeffs.relaxation * tau[0][idx];
            out[1][idx] += coeffs.mu2 * dxy[idx] - coeffs.relaxation * tau[1][idx];
            out[2][idx] += coeffs.mu2 * dyy[idx] - coeffs.relaxation * tau[2][idx];
        }
    }
    out
}

fn spectral_deformation(grid: &Grid, v: &Velocity) -> [Vec<Complex64>; 3] {
    let xy: Vec<f64> = v
        .x
        .dy
        .iter()
        .zip(&v.y.dx)
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    [
        grid.forward(&v.x.dx),
        grid.forward(&xy),
        grid.forward(&v.y.dy),
    ]
}

struct EtdCoefficients {
    e: Vec<f64>,
    phi1: Vec<f64>,
    phi2: Vec<f64>,
}

/// `φ₁(z) = (eᶻ − 1)/z` and `φ₂(z) = (eᶻ − 1 − z)/z²`, series near zero.
fn phi_functions(z: f64) -> (f64, f64) {
    if z.abs() < 0.1 {
        // Taylor series to z⁸; truncation below 1e-16 for |z| < 0.1
        let mut term = 1.0;
        let mut p1 = 0.0;
        let mut p2 = 0.0;
        for k in 1..=10u32 {
            // term = z^{k-1} / k!
            term *= if k == 1 { 1.0 } else { z / k as f64 };
            p1 += term;
            p2 += term / (k + 1) as f64;
        }
        (p1, p2)
    } else {
        let em1 = z.exp_m1();
        (em1 / z, (em1 - z) / (z * z))
    }
}

impl EtdCoefficients {
    fn new(grid: &Grid, diffusivity: f64, dt: f64) -> Self {
        let len = grid.len();
        let mut e = Vec::with_capacity(len);
        let mut phi1 = Vec::with_capacity(len);
        let mut phi2 = Vec::with_capacity(len);
        for idx in 0..len {
            let z = -diffusivity * grid.mode_magnitude_sq(idx) * dt;
            let (p1, p2) = phi_functions(z);
            e.push(z.exp());
            phi1.push(p1);
            phi2.push(p2);
        }
        EtdCoefficients { e, phi1, phi2 }
    }
}

/// One exponential-RK2 step (Cox-Matthews ETD2RK) for `∂ₜu = −dᶜ|k|²u + N(u, t)`.
///
/// `constrain` runs after each stage (projection, de-aliasing). Constant
/// forcing and the pure heat flow are integrated exactly.
pub(crate) fn etd_rk2<N, P>(
    grid: &Grid,
    u0: &Spectra,
    diffusivity: &[f64],
    dt: f64,
    t0: f64,
    mut nonlinear: N,
    mut constrain: P,
) -> Spectra
where
    N: FnMut(&Spectra, f64) -> Spectra,
    P: FnMut(&mut Spectra),
{
    debug_assert_eq!(u0.len(), diffusivity.len());
    let mut cache: Vec<(f64, EtdCoefficients)> = Vec::new();
    for &d in diffusivity {
        if !cache.iter().any(|(k, _)| *k == d) {
            cache.push((d, EtdCoefficients::new(grid, d, dt)));
        }
    }
    let coeff = |d: f64| &cache.iter().find(|(k, _)| *k == d).expect("cached").1;

    let n0 = nonlinear(u0, t0);
    let mut stage: Spectra = u0
        .iter()
        .zip(&n0)
        .zip(diffusivity)
        .map(|((u, nl), &d)| {
            let c = coeff(d);
            (0..u.len())
                .map(|i| c.e[i] * u[i] + dt * c.phi1[i] * nl[i])
                .collect()
        })
        .collect();
    constrain(&mut stage);

    let n1 = nonlinear(&stage, t0 + dt);
    let mut out: Spectra = stage
        .iter()
        .zip(n1.iter().zip(&n0))
        .zip(diffusivity)
        .map(|((a, (nb, na)), &d)| {
            let c = coeff(d);
            (0..a.len())
                .map(|i| a[i] + dt * c.phi2[i] * (nb[i] - na[i]))
                .collect()
        })
        .collect();
    constrain(&mut out);
    out
}

/// Heun step on `∂ₜu = N(u, t)`, with diffusion folded into `N` by the caller.
pub(crate) fn heun<N, P>(u0: &Spectra, dt: f64, t0: f64, mut nonlinear: N, mut constrain: P) -> Spectra
where
    N: FnMut(&Spectra, f64) -> Spectra,
    P: FnMut(&mut Spectra),
{
    let n0 = nonlinear(u0, t0);
    let mut stage: Spectra = u0
        .iter()
        .zip(&n0)
        .map(|(u, nl)| u.iter().zip(nl).map(|(a, b)| a + dt * b).collect())
        .collect();
    constrain(&mut stage);
    let n1 = nonlinear(&stage, t0 + dt);
    let mut out: Spectra = u0
        .iter()
        .zip(n0.iter().zip(&n1))
        .map(|(u, (a, b))| {
            (0..u.len())
                .map(|i| u[i] + 0.5 * dt * (a[i] + b[i]))
                .collect()
        })
        .collect();
    constrain(&mut out);
    out
}

/// Advances `∂ₜu = −d|k|²u + N(u, t)` by one step of the chosen scheme.
///
/// Each pair `(c, c + 1)` listed in `solenoidal` is Leray-projected after
/// every stage.
pub(crate) fn advance<N>(
    grid: &Grid,
    controls: &StepControls,
    u0: &Spectra,
    diffusivity: &[f64],
    solenoidal: &[usize],
    t0: f64,
    mut nonlinear: N,
) -> Spectra
where
    N: FnMut(&Spectra, f64) -> Spectra,
{
    let constrain = |u: &mut Spectra| {
        for &c in solenoidal {
            let (head, tail) = u.split_at_mut(c + 1);
            project(grid, &mut head[c], &mut tail[0]);
        }
    };
    match controls.scheme {
        Scheme::ImexRk2 => etd_rk2(grid, u0, diffusivity, controls.dt, t0, nonlinear, constrain),
        Scheme::ExplicitRk2 => heun(
            u0,
            controls.dt,
            t0,
            |u, t| {
                let mut n = nonlinear(u, t);
                add_explicit_diffusion(grid, u, diffusivity, &mut n);
                n
            },
            constrain,
        ),
    }
}

/// Forward transforms of real components, de-aliased on request, with the
/// listed solenoidal pairs projected.
pub(crate) fn to_spectra(
    grid: &Grid,
    components: &[&[f64]],
    dealias: bool,
    solenoidal: &[usize],
) -> Spectra {
    let mut u: Spectra = components.iter().map(|c| forward(grid, c, dealias)).collect();
    for &c in solenoidal {
        let (head, tail) = u.split_at_mut(c + 1);
        project(grid, &mut head[c], &mut tail[0]);
    }
    u
}

/// Rejects a step whose result is non-finite or whose speed exceeds the cap.
pub(crate) fn check_blowup(
    controls: &StepControls,
    t: f64,
    step: u64,
    fields: &[Vec<f64>],
    vx: &[f64],
    vy: &[f64],
) -> Result<()> {
    if fields.iter().any(|f| f.iter().any(|x| !x.is_finite())) {
        return Err(Error::Blowup {
            t,
            step,
            reason: "non-finite value".into(),
        });
    }
    let speed = vx.iter().zip(vy).fold(0.0_f64, |m, (a, b)| m.max(a.hypot(*b)));
    if speed > controls.velocity_cap {
        return Err(Error::Blowup {
            t,
            step,
            reason: format!("|v| = {speed:e} exceeds cap {:e}", controls.velocity_cap),
        });
    }
    Ok(())
}

/// Adds `−d|k|²u` to the tendency of each component (explicit diffusion).
pub(crate) fn add_explicit_diffusion(grid: &Grid, u: &Spectra, diffusivity: &[f64], n: &mut Spectra) {
    for ((uc, nc), &d) in u.iter().zip(n.iter_mut()).zip(diffusivity) {
        if d == 0.0 {
            continue;
        }
        for idx in 0..grid.len() {
            nc[idx] -= d * grid.mode_magnitude_sq(idx) * uc[idx];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_functions_are_continuous() {
        for z in [-0.0999999, -0.1000001, -1e-6, -5.0] {
            let (p1, p2) = phi_functions(z);
            let em1 = z.exp_m1();
            assert!((p1 - em1 / z).abs() < 1e-12, "{z}");
            if z.abs() > 1e-3 {
                assert!((p2 - (em1 - z) / (z * z)).abs() < 1e-10, "{z}");
            }
        }
        assert_eq!(phi_functions(0.0), (1.0, 0.5));
    }

    #[test]
    fn q_of_uniform_shear_on_identity() {
        // ∇v = [[0, 1], [0, 0]], τ = I, b = 1 → Q = [[0, 1], [1, 0]]
        let q = q_pointwise([1.0, 0.0, 1.0], [[0.0, 1.0], [0.0, 0.0]], 1.0);
        assert_eq!(q, [0.0, 1.0, 0.0]);
    }

    #[test]
    fn q_with_b_one_is_upper_convected() {
        // b = 1: Q = Gτ + τGᵀ
        let g = [[0.3, -1.2], [0.7, -0.3]];
        let tau = [0.4, 0.1, -0.25];
        let t = [[tau[0], tau[1]], [tau[1], tau[2]]];
        let mut want = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    want[i][j] += g[i][k] * t[k][j] + t[i][k] * g[j][k];
                }
            }
        }
        let q = q_pointwise(tau, g, 1.0);
        assert!((q[0] - want[0][0]).abs() < 1e-15);
        assert!((q[1] - want[0][1]).abs() < 1e-15);
        assert!((q[1] - want[1][0]).abs() < 1e-15);
        assert!((q[2] - want[1][1]).abs() < 1e-15);
    }
}
