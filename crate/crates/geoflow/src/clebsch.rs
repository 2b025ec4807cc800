//! 3D periodic incompressible Euler flow in Clebsch variables (p, q, λ):
//! the velocity is v = ∇λ + q∇p with λ chosen so that div v = 0, and the
//! canonical pair (p, q) is advected as a pair of material scalars.
//!
//! Grid products are pointwise (pseudo-spectral, no dealiasing); all
//! derivatives and the Poisson solve are spectral. Flat torus [0,2π]³, ρ = 1.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::error::{Error, Result};
use crate::ode::{rk4_step, step_count};

/// One Fourier coefficient of a real scalar field on the 3-torus; the
/// conjugate mirror is implied, so the field gains 2·re·cos(k·x) − 2·im·sin(k·x).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeCoeff3 {
    pub k: [i64; 3],
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Canonical pair, pressure-like multiplier, and the reconstructed velocity
/// on an n³ periodic grid with spacing 2π/n.
#[derive(Debug, Clone)]
pub struct ClebschState {
    pub n: usize,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub lambda: Vec<f64>,
    pub v: [Vec<f64>; 3],
}

fn grid_len(n: usize) -> usize {
    n * n * n
}

/// Signed frequency for DFT bin `m` of an n-point axis.
fn freq(m: usize, n: usize) -> i64 {
    if m <= n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

/// Derivative multiplier ik with the Nyquist bin zeroed (even n).
fn deriv_factor(m: usize, n: usize) -> Complex64 {
    if n % 2 == 0 && m == n / 2 {
        Complex64::default()
    } else {
        Complex64::new(0.0, freq(m, n) as f64)
    }
}

/// In-place 3D FFT by axis passes; `inverse` includes the 1/n³ scaling.
fn fft3(n: usize, data: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let mut line = vec![Complex64::default(); n];
    // Layout (i, j, k) -> (i*n + j)*n + k; one strided pass per axis.
    for axis in 0..3 {
        let stride = match axis {
            0 => n * n,
            1 => n,
            _ => 1,
        };
        // Enumerate line start offsets: all grid points with zero coordinate
        // along `axis`.
        for a in 0..n {
            for b in 0..n {
                let start = match axis {
                    0 => a * n + b,
                    1 => a * n * n + b,
                    _ => (a * n + b) * n,
                };
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + t * stride];
                }
                fft.process(&mut line);
                for (t, &val) in line.iter().enumerate() {
                    data[start + t * stride] = val;
                }
            }
        }
    }
    if inverse {
        let scale = 1.0 / grid_len(n) as f64;
        for c in data.iter_mut() {
            *c *= scale;
        }
    }
}

fn to_complex(f: &[f64]) -> Vec<Complex64> {
    f.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

fn to_real(c: &[Complex64]) -> Vec<f64> {
    c.iter().map(|z| z.re).collect()
}

/// Spectral partial derivative of a real grid field along `axis`.
fn spectral_derivative(n: usize, f: &[f64], axis: usize) -> Vec<f64> {
    let mut hat = to_complex(f);
    fft3(n, &mut hat, false);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let m = [i, j, k][axis];
                hat[(i * n + j) * n + k] *= deriv_factor(m, n);
            }
        }
    }
    fft3(n, &mut hat, true);
    to_real(&hat)
}

fn gradient(n: usize, f: &[f64]) -> [Vec<f64>; 3] {
    [
        spectral_derivative(n, f, 0),
        spectral_derivative(n, f, 1),
        spectral_derivative(n, f, 2),
    ]
}

/// Given (p, q), reconstructs the incompressible velocity and multiplier:
/// λ solves Δλ = −div(q∇p) in the zero-mean gauge, v = ∇λ + q∇p. In mode
/// space this is the transverse projection v̂_k = ŵ_k − k(k·ŵ_k)/|k|² of
/// w = q∇p.
pub fn velocity_from_clebsch(n: usize, p: &[f64], q: &[f64]) -> Result<([Vec<f64>; 3], Vec<f64>)> {
    if n < 8 {
        return Err(Error::InvalidParameter(format!(
            "grid must have n >= 8 points per axis, got {n}"
        )));
    }
    if p.len() != grid_len(n) || q.len() != grid_len(n) {
        return Err(Error::DimensionMismatch {
            expected: grid_len(n),
            got: if p.len() != grid_len(n) { p.len() } else { q.len() },
        });
    }
    let grad_p = gradient(n, p);
    let mut w_hat: [Vec<Complex64>; 3] = std::array::from_fn(|a| {
        let w: Vec<f64> = q.iter().zip(&grad_p[a]).map(|(qi, gi)| qi * gi).collect();
        let mut hat = to_complex(&w);
        fft3(n, &mut hat, false);
        hat
    });
    let mut lambda_hat = vec![Complex64::default(); grid_len(n)];
    let nyquist = |m: usize| n % 2 == 0 && m == n / 2;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let idx = (i * n + j) * n + k;
                if nyquist(i) || nyquist(j) || nyquist(k) {
                    // Nyquist bins carry aliased products with no consistent
                    // derivative; drop them so v stays exactly transverse.
                    for w in w_hat.iter_mut() {
                        w[idx] = Complex64::default();
                    }
                    continue;
                }
                let kv = [freq(i, n) as f64, freq(j, n) as f64, freq(k, n) as f64];
                let k_sq = kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2];
                if k_sq == 0.0 {
                    continue; // mean flow untouched; λ mean fixed to zero
                }
                let k_dot_w =
                    kv[0] * w_hat[0][idx] + kv[1] * w_hat[1][idx] + kv[2] * w_hat[2][idx];
                lambda_hat[idx] = Complex64::new(0.0, 1.0) * k_dot_w / k_sq;
                for a in 0..3 {
                    w_hat[a][idx] -= kv[a] * k_dot_w / k_sq;
                }
            }
        }
    }
    let v = std::array::from_fn(|a| {
        let mut hat = w_hat[a].clone();
        fft3(n, &mut hat, true);
        to_real(&hat)
    });
    fft3(n, &mut lambda_hat, true);
    Ok((v, to_real(&lambda_hat)))
}

impl ClebschState {
    /// Builds (p, q) grids from mode lists and reconstructs v and λ.
    pub fn from_modes(n: usize, p_modes: &[ModeCoeff3], q_modes: &[ModeCoeff3]) -> Result<Self> {
        let p = eval_modes(n, p_modes)?;
        let q = eval_modes(n, q_modes)?;
        Self::from_grids(n, p, q)
    }

    pub fn from_grids(n: usize, p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        let (v, lambda) = velocity_from_clebsch(n, &p, &q)?;
        let state = ClebschState { n, p, q, lambda, v };
        if !state.is_finite() {
            return Err(Error::NonFiniteState { step: 0 });
        }
        Ok(state)
    }

    fn is_finite(&self) -> bool {
        self.p.iter().all(|x| x.is_finite())
            && self.q.iter().all(|x| x.is_finite())
            && self.lambda.iter().all(|x| x.is_finite())
            && self.v.iter().all(|c| c.iter().all(|x| x.is_finite()))
    }

    /// Kinetic energy ½∫|v|² dx.
    pub fn energy(&self) -> f64 {
        let cell = (std::f64::consts::TAU / self.n as f64).powi(3);
        0.5 * cell
            * self
                .v
                .iter()
                .map(|c| c.iter().map(|x| x * x).sum::<f64>())
                .sum::<f64>()
    }

    /// Sup norm of the spectral divergence of v.
    pub fn div_sup(&self) -> f64 {
        let mut div = vec![0.0; grid_len(self.n)];
        for a in 0..3 {
            let d = spectral_derivative(self.n, &self.v[a], a);
            for (acc, x) in div.iter_mut().zip(&d) {
                *acc += x;
            }
        }
        div.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

fn eval_modes(n: usize, modes: &[ModeCoeff3]) -> Result<Vec<f64>> {
    for m in modes {
        if m.k.iter().any(|&ki| 2 * ki.unsigned_abs() as usize >= n) {
            return Err(Error::InvalidParameter(format!(
                "mode {:?} not resolved on an n={n} grid",
                m.k
            )));
        }
    }
    let h = std::f64::consts::TAU / n as f64;
    let mut f = vec![0.0; grid_len(n)];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let x = [i as f64 * h, j as f64 * h, k as f64 * h];
                let mut s = 0.0;
                for m in modes {
                    let phase = m.k[0] as f64 * x[0] + m.k[1] as f64 * x[1] + m.k[2] as f64 * x[2];
                    s += 2.0 * (m.re * phase.cos() - m.im * phase.sin());
                }
                f[(i * n + j) * n + k] = s;
            }
        }
    }
    Ok(f)
}

/// Advances (p, q) one RK4 step of the advection equations
/// ∂p/∂t + v·∇p = 0, ∂q/∂t + v·∇q = 0, with v reconstructed from the
/// current (p, q) inside every stage.
pub fn clebsch_step(state: &ClebschState, dt: f64) -> Result<ClebschState> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
    }
    let n = state.n;
    let len = grid_len(n);
    let mut y: Vec<f64> = Vec::with_capacity(2 * len);
    y.extend_from_slice(&state.p);
    y.extend_from_slice(&state.q);

    let mut rhs = |s: &Vec<f64>| -> Vec<f64> {
        let (p, q) = s.split_at(len);
        let (v, _) = velocity_from_clebsch(n, p, q).expect("validated grids");
        let mut out = vec![0.0; 2 * len];
        for a in 0..3 {
            let dp = spectral_derivative(n, p, a);
            let dq = spectral_derivative(n, q, a);
            for idx in 0..len {
                out[idx] -= v[a][idx] * dp[idx];
                out[len + idx] -= v[a][idx] * dq[idx];
            }
        }
        out
    };
    let y1 = rk4_step(&y, dt, &mut rhs);
    if y1.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteState { step: 1 });
    }
    let (p1, q1) = y1.split_at(len);
    ClebschState::from_grids(n, p1.to_vec(), q1.to_vec())
}

/// Sup norm of ∇×v − ∇q×∇p (the vorticity two-form identity ω = dq ∧ dp).
pub fn curl_check(state: &ClebschState) -> f64 {
    let n = state.n;
    let grad_p = gradient(n, &state.p);
    let grad_q = gradient(n, &state.q);
    // curl components: (∂₂v₃−∂₃v₂, ∂₃v₁−∂₁v₃, ∂₁v₂−∂₂v₁)
    let mut sup = 0.0f64;
    for c in 0..3 {
        let (a, b) = ((c + 1) % 3, (c + 2) % 3);
        let da_vb = spectral_derivative(n, &state.v[b], a);
        let db_va = spectral_derivative(n, &state.v[a], b);
        for idx in 0..grid_len(n) {
            let curl_v = da_vb[idx] - db_va[idx];
            let cross = grad_q[a][idx] * grad_p[b][idx] - grad_q[b][idx] * grad_p[a][idx];
            sup = sup.max((curl_v - cross).abs());
        }
    }
    sup
}

/// Diagnostics time series: t, kinetic energy, sup|div v|, curl discrepancy.
#[derive(Debug, Clone, Serialize)]
pub struct ClebschSeries {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    pub div_sup: Vec<f64>,
    pub curl_disc: Vec<f64>,
}

impl ClebschSeries {
    pub fn energy_drift(&self) -> f64 {
        let first = self.energy[0];
        let scale = first.abs().max(1e-300);
        self.energy
            .iter()
            .map(|e| (e - first).abs() / scale)
            .fold(0.0f64, f64::max)
    }

    pub fn write_csv(&self, out: &mut impl Write, comment: Option<&str>) -> Result<()> {
        if let Some(c) = comment {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "t,E,div_sup,curl_disc")?;
        for (s, t) in self.times.iter().enumerate() {
            writeln!(
                out,
                "{t:.12e},{:.12e},{:.12e},{:.12e}",
                self.energy[s], self.div_sup[s], self.curl_disc[s]
            )?;
        }
        Ok(())
    }
}

/// Evolves the state to `t_final`, logging diagnostics each step; returns
/// the series and the final state.
pub fn evolve_clebsch(
    state: &ClebschState,
    dt: f64,
    t_final: f64,
) -> Result<(ClebschSeries, ClebschState)> {
    if !(dt > 0.0) || t_final < dt {
        return Err(Error::InvalidParameter(format!(
            "need dt > 0 and T >= dt, got dt={dt}, T={t_final}"
        )));
    }
    let steps = step_count(dt, t_final);
    let mut series = ClebschSeries {
        times: Vec::with_capacity(steps + 1),
        energy: Vec::with_capacity(steps + 1),
        div_sup: Vec::with_capacity(steps + 1),
        curl_disc: Vec::with_capacity(steps + 1),
    };
    let mut current = state.clone();
    for s in 0..=steps {
        if s > 0 {
            current = clebsch_step(&current, dt).map_err(|e| match e {
                Error::NonFiniteState { .. } => Error::NonFiniteState { step: s },
                other => other,
            })?;
        }
        series.times.push(s as f64 * dt);
        series.energy.push(current.energy());
        series.div_sup.push(current.div_sup());
        series.curl_disc.push(curl_check(&current));
    }
    Ok((series, current))
}
