//! Galerkin-truncated 2D incompressible Euler on the torus [0,2π]², in
//! vorticity form ∂ω/∂t + {Kω, ω} = 0 with K the inverse Laplacian.
//!
//! The right-hand side is a direct mode convolution (no transforms, no
//! aliasing decisions), which keeps the cross-check against the geodesic
//! machinery on the area-preserving-map algebra exact to roundoff.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;

use crate::algebra::AlgebraVector;
use crate::error::{Error, Result};
use crate::geodesic::integrate_geodesic;
use crate::models::{make_sdiff_t2, sdiff_modes};
use crate::ode::{rk4_step, step_count};

const TAU_SQ: f64 = (2.0 * std::f64::consts::PI) * (2.0 * std::f64::consts::PI);

/// One Fourier coefficient in a JSON mode list; the conjugate mirror at −k
/// is implied.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeCoeff2 {
    pub k: [i64; 2],
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Vorticity coefficients ω_k on the cutoff |k|∞ ≤ N, stored for both k and
/// −k with conjugate symmetry ω_{−k} = conj(ω_k).
#[derive(Debug, Clone, Serialize)]
pub struct SpectralField2D {
    n: i64,
    omega: BTreeMap<(i64, i64), Complex64>,
}

impl SpectralField2D {
    /// Builds a field from a mode list; each entry sets ω_k and its mirror.
    pub fn from_modes(n: i64, modes: &[ModeCoeff2]) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter(format!("cutoff must be >= 1, got {n}")));
        }
        let mut omega = BTreeMap::new();
        for m in modes {
            let k = (m.k[0], m.k[1]);
            if k == (0, 0) {
                return Err(Error::InvalidParameter("k = 0 carries no vorticity".into()));
            }
            if k.0.abs() > n || k.1.abs() > n {
                return Err(Error::InvalidParameter(format!(
                    "mode ({}, {}) outside cutoff {n}",
                    k.0, k.1
                )));
            }
            let c = Complex64::new(m.re, m.im);
            for (key, val) in [(k, c), ((-k.0, -k.1), c.conj())] {
                if let Some(old) = omega.insert(key, val) {
                    let old: Complex64 = old;
                    if (old - val).norm() > 1e-14 * val.norm().max(1.0) {
                        return Err(Error::InvalidParameter(format!(
                            "conflicting coefficients for mode ({}, {})",
                            key.0, key.1
                        )));
                    }
                }
            }
        }
        let field = SpectralField2D { n, omega };
        field.validate()?;
        Ok(field)
    }

    fn from_map(n: i64, omega: BTreeMap<(i64, i64), Complex64>) -> Self {
        SpectralField2D { n, omega }
    }

    pub fn cutoff(&self) -> i64 {
        self.n
    }

    pub fn coefficient(&self, k: (i64, i64)) -> Complex64 {
        self.omega.get(&k).copied().unwrap_or_default()
    }

    pub fn modes(&self) -> impl Iterator<Item = (&(i64, i64), &Complex64)> {
        self.omega.iter()
    }

    /// Checks cutoff, absence of k = 0, and conjugate symmetry to 1e-14.
    pub fn validate(&self) -> Result<()> {
        for (&k, &c) in &self.omega {
            if k == (0, 0) {
                return Err(Error::InvalidParameter("k = 0 component present".into()));
            }
            if k.0.abs() > self.n || k.1.abs() > self.n {
                return Err(Error::InvalidParameter(format!(
                    "mode ({}, {}) outside cutoff {}",
                    k.0, k.1, self.n
                )));
            }
            let mirror = self.coefficient((-k.0, -k.1));
            if (mirror - c.conj()).norm() > 1e-14 * c.norm().max(1.0) {
                return Err(Error::ConjugateSymmetry(k.0, k.1));
            }
        }
        Ok(())
    }

    /// Kinetic energy ½ Σ |ω_k|²/|k|² (2π)².
    pub fn energy(&self) -> f64 {
        0.5 * TAU_SQ
            * self
                .omega
                .iter()
                .map(|(&(k1, k2), c)| c.norm_sqr() / (k1 * k1 + k2 * k2) as f64)
                .sum::<f64>()
    }

    /// Enstrophy ½ Σ |ω_k|² (2π)².
    pub fn enstrophy(&self) -> f64 {
        0.5 * TAU_SQ * self.omega.values().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// Sup-norm distance over modes (union of supports).
    pub fn sup_distance(&self, other: &SpectralField2D) -> f64 {
        let mut d = 0.0f64;
        for (&k, &c) in &self.omega {
            d = d.max((c - other.coefficient(k)).norm());
        }
        for (&k, &c) in &other.omega {
            d = d.max((c - self.coefficient(k)).norm());
        }
        d
    }
}

/// Truncated Poisson bracket {f, g} = ∂₂f ∂₁g − ∂₁f ∂₂g as a mode map:
/// coefficient (p₁q₂ − p₂q₁) f_p g_q at p + q, kept within |k|∞ ≤ n.
fn poisson_bracket(
    f: &BTreeMap<(i64, i64), Complex64>,
    g: &BTreeMap<(i64, i64), Complex64>,
    n: i64,
) -> BTreeMap<(i64, i64), Complex64> {
    let mut out = BTreeMap::new();
    for (&(p1, p2), &fp) in f {
        for (&(q1, q2), &gq) in g {
            let cross = (p1 * q2 - p2 * q1) as f64;
            if cross == 0.0 {
                continue;
            }
            let k = (p1 + q1, p2 + q2);
            if k == (0, 0) || k.0.abs() > n || k.1.abs() > n {
                continue;
            }
            *out.entry(k).or_insert_with(Complex64::default) += cross * fp * gq;
        }
    }
    out.retain(|_, c| c.norm() > 0.0);
    out
}

/// −{Kω, ω} truncated to the cutoff: the instantaneous rate of change of
/// the vorticity coefficients.
pub fn vorticity_rhs(state: &SpectralField2D) -> Result<SpectralField2D> {
    state.validate()?;
    let chi: BTreeMap<(i64, i64), Complex64> = state
        .omega
        .iter()
        .map(|(&(k1, k2), &c)| ((k1, k2), c / (k1 * k1 + k2 * k2) as f64))
        .collect();
    let mut rhs = poisson_bracket(&chi, &state.omega, state.n);
    for c in rhs.values_mut() {
        *c = -*c;
    }
    Ok(SpectralField2D::from_map(state.n, rhs))
}

/// Vorticity time series with energy and enstrophy logs.
#[derive(Debug, Clone, Serialize)]
pub struct Euler2dSeries {
    pub times: Vec<f64>,
    pub fields: Vec<SpectralField2D>,
    pub energy: Vec<f64>,
    pub enstrophy: Vec<f64>,
}

impl Euler2dSeries {
    pub fn energy_drift(&self) -> f64 {
        relative_drift(&self.energy)
    }

    pub fn enstrophy_drift(&self) -> f64 {
        relative_drift(&self.enstrophy)
    }

    /// CSV: t, E, Z, then |ω_k| for each tracked mode.
    pub fn write_csv(
        &self,
        out: &mut impl Write,
        tracked: &[(i64, i64)],
        comment: Option<&str>,
    ) -> Result<()> {
        if let Some(c) = comment {
            writeln!(out, "# {c}")?;
        }
        let mut header = vec!["t".to_string(), "E".to_string(), "Z".to_string()];
        for k in tracked {
            header.push(format!("abs_omega_{}_{}", k.0, k.1));
        }
        writeln!(out, "{}", header.join(","))?;
        for (s, t) in self.times.iter().enumerate() {
            let mut row = vec![
                format!("{t:.12e}"),
                format!("{:.12e}", self.energy[s]),
                format!("{:.12e}", self.enstrophy[s]),
            ];
            for k in tracked {
                row.push(format!("{:.12e}", self.fields[s].coefficient(*k).norm()));
            }
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn relative_drift(series: &[f64]) -> f64 {
    let first = series[0];
    let scale = first.abs().max(1e-300);
    series
        .iter()
        .map(|v| (v - first).abs() / scale)
        .fold(0.0f64, f64::max)
}

/// RK4 evolution of the truncated vorticity equation with conserved-quantity
/// logs. The state is flattened over the half-lattice representatives so the
/// stepper is shared with the geodesic integrator.
pub fn evolve(state: &SpectralField2D, dt: f64, t_final: f64) -> Result<Euler2dSeries> {
    if !(dt > 0.0) || t_final < dt {
        return Err(Error::InvalidParameter(format!(
            "need dt > 0 and T >= dt, got dt={dt}, T={t_final}"
        )));
    }
    state.validate()?;
    let n = state.n;
    let reps = sdiff_modes(n as usize);
    let steps = step_count(dt, t_final);

    let flatten = |f: &SpectralField2D| -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * reps.len());
        for k in &reps {
            let c = f.coefficient(*k);
            v.push(c.re);
            v.push(c.im);
        }
        v
    };
    let unflatten = |v: &Vec<f64>| -> SpectralField2D {
        let mut omega = BTreeMap::new();
        for (m, k) in reps.iter().enumerate() {
            let c = Complex64::new(v[2 * m], v[2 * m + 1]);
            if c.norm() > 0.0 {
                omega.insert(*k, c);
                omega.insert((-k.0, -k.1), c.conj());
            }
        }
        SpectralField2D::from_map(n, omega)
    };

    let mut rhs = |v: &Vec<f64>| -> Vec<f64> {
        let f = unflatten(v);
        let chi: BTreeMap<(i64, i64), Complex64> = f
            .omega
            .iter()
            .map(|(&(k1, k2), &c)| ((k1, k2), c / (k1 * k1 + k2 * k2) as f64))
            .collect();
        let mut b = poisson_bracket(&chi, &f.omega, n);
        for c in b.values_mut() {
            *c = -*c;
        }
        let out = SpectralField2D::from_map(n, b);
        flatten(&out)
    };

    let mut flat = flatten(state);
    let mut series = Euler2dSeries {
        times: Vec::with_capacity(steps + 1),
        fields: Vec::with_capacity(steps + 1),
        energy: Vec::with_capacity(steps + 1),
        enstrophy: Vec::with_capacity(steps + 1),
    };
    for s in 0..=steps {
        if s > 0 {
            flat = rk4_step(&flat, dt, &mut rhs);
        }
        if flat.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteState { step: s });
        }
        let f = unflatten(&flat);
        series.times.push(s as f64 * dt);
        series.energy.push(f.energy());
        series.enstrophy.push(f.enstrophy());
        series.fields.push(f);
    }
    Ok(series)
}

/// Runs the same initial data through the spectral solver and through the
/// generic geodesic machinery on the area-preserving-map algebra (stream
/// function χ_k = ω_k/|k|²), and returns the sup-norm deviation of the two
/// vorticity histories.
pub fn equivalence_vs_geodesic(
    n: i64,
    omega0: &SpectralField2D,
    dt: f64,
    t_final: f64,
) -> Result<f64> {
    if n > 4 {
        return Err(Error::InvalidParameter(format!(
            "equivalence check is a desk-scale oracle; need N <= 4, got {n}"
        )));
    }
    if omega0.n != n {
        return Err(Error::DimensionMismatch {
            expected: n as usize,
            got: omega0.n as usize,
        });
    }
    let series = evolve(omega0, dt, t_final)?;

    let reps = sdiff_modes(n as usize);
    let algebra = make_sdiff_t2(n as usize)?;
    let mut v0 = AlgebraVector::zeros(2 * reps.len());
    for (m, k) in reps.iter().enumerate() {
        let chi = omega0.coefficient(*k) / (k.0 * k.0 + k.1 * k.1) as f64;
        v0[2 * m] = 2.0 * chi.re; // cos coefficient
        v0[2 * m + 1] = -2.0 * chi.im; // sin coefficient
    }
    let traj = integrate_geodesic(&algebra, &v0, dt, t_final)?;

    if traj.times.len() != series.times.len() {
        return Err(Error::InternalCheck("time grids differ".into()));
    }
    let mut sup = 0.0f64;
    for (s, v) in traj.velocities.iter().enumerate() {
        for (m, k) in reps.iter().enumerate() {
            let chi = Complex64::new(v[2 * m] / 2.0, -v[2 * m + 1] / 2.0);
            let omega = chi * (k.0 * k.0 + k.1 * k.1) as f64;
            sup = sup.max((omega - series.fields[s].coefficient(*k)).norm());
        }
    }
    Ok(sup)
}

// ---- curvature of the fluid configuration space ----

type ModeMap2 = BTreeMap<(i64, i64), Complex64>;
type VecField2 = BTreeMap<(i64, i64), [Complex64; 2]>;

fn stream_map(modes: &[ModeCoeff2], n: i64) -> Result<ModeMap2> {
    let f = SpectralField2D::from_modes(n, modes)?;
    Ok(f.omega)
}

/// Velocity of a stream function: v = (∂₂χ, −∂₁χ), mode-wise
/// v̂_k = (ik₂, −ik₁) χ_k.
fn velocity_of_stream(chi: &ModeMap2) -> VecField2 {
    chi.iter()
        .map(|(&(k1, k2), &c)| {
            (
                (k1, k2),
                [
                    Complex64::new(0.0, k2 as f64) * c,
                    Complex64::new(0.0, -(k1 as f64)) * c,
                ],
            )
        })
        .collect()
}

/// Flat-space directional derivative (u·∇)v as an untruncated mode map:
/// coefficient i(û_p·q) v̂_q at p + q.
fn advect(u: &VecField2, v: &VecField2) -> VecField2 {
    let mut out: VecField2 = BTreeMap::new();
    for (&(p1, p2), up) in u {
        let _ = (p1, p2);
        for (&(q1, q2), vq) in v {
            let dot = up[0] * q1 as f64 + up[1] * q2 as f64;
            let factor = Complex64::new(0.0, 1.0) * dot;
            let k = (p1 + q1, p2 + q2);
            let e = out.entry(k).or_insert([Complex64::default(); 2]);
            e[0] += factor * vq[0];
            e[1] += factor * vq[1];
        }
    }
    out
}

/// L² inner product of the gradient (longitudinal) parts of two fields:
/// S(a,b) = Σ_{k≠0} (k·â_k) conj(k·b̂_k) / |k|² × (2π)².
fn longitudinal_inner(a: &VecField2, b: &VecField2) -> f64 {
    let mut s = Complex64::default();
    for (&(k1, k2), ak) in a {
        if (k1, k2) == (0, 0) {
            continue;
        }
        let Some(bk) = b.get(&(k1, k2)) else { continue };
        let ka = ak[0] * k1 as f64 + ak[1] * k2 as f64;
        let kb = bk[0] * k1 as f64 + bk[1] * k2 as f64;
        s += ka * kb.conj() / (k1 * k1 + k2 * k2) as f64;
    }
    TAU_SQ * s.re
}

/// Plain L² inner product of two (real) velocity fields.
fn l2_inner(a: &VecField2, b: &VecField2) -> f64 {
    let mut s = Complex64::default();
    for (k, ak) in a {
        let Some(bk) = b.get(k) else { continue };
        s += ak[0] * bk[0].conj() + ak[1] * bk[1].conj();
    }
    TAU_SQ * s.re
}

/// Sectional curvature of the plane of two stream-function fields, by two
/// independent routes.
///
/// `K_generic` evaluates the curvature biquadratic of the truncated algebra;
/// `K_projection` evaluates R(u,v) = S(∇_u u, ∇_v v) − S(∇_v u, ∇_u v),
/// where S is the L² pairing of gradient parts — the second-fundamental-form
/// route for the volume-preserving maps sitting inside all maps of the flat
/// torus. The two agree to 1e-8 when every pairwise mode sum stays within
/// N/2, so truncation cannot touch the products.
pub fn fluid_curvature(
    n: i64,
    u_modes: &[ModeCoeff2],
    v_modes: &[ModeCoeff2],
) -> Result<(f64, f64)> {
    let chi_u = stream_map(u_modes, n)?;
    let chi_v = stream_map(v_modes, n)?;
    let support: Vec<(i64, i64)> = chi_u.keys().chain(chi_v.keys()).copied().collect();
    for &p in &support {
        for &q in &support {
            let k = (p.0 + q.0, p.1 + q.1);
            if 2 * k.0.abs() > n || 2 * k.1.abs() > n {
                return Err(Error::ModeSupport(format!(
                    "mode sum ({}, {}) exceeds N/2 = {}; result would be truncation-contaminated",
                    k.0,
                    k.1,
                    n / 2
                )));
            }
        }
    }

    // Generic route: biquadratic of the truncated algebra.
    let algebra = make_sdiff_t2(n as usize)?;
    let reps = sdiff_modes(n as usize);
    let to_vec = |chi: &ModeMap2| {
        let mut v = AlgebraVector::zeros(2 * reps.len());
        for (m, k) in reps.iter().enumerate() {
            if let Some(c) = chi.get(k) {
                v[2 * m] = 2.0 * c.re;
                v[2 * m + 1] = -2.0 * c.im;
            }
        }
        v
    };
    let k_generic = algebra.sectional_curvature(&to_vec(&chi_u), &to_vec(&chi_v))?;

    // Projection route: continuum mode-map convolutions, no truncation.
    let u = velocity_of_stream(&chi_u);
    let v = velocity_of_stream(&chi_v);
    let uu = advect(&u, &u);
    let vv = advect(&v, &v);
    let vu = advect(&v, &u);
    let uv = advect(&u, &v);
    let r = longitudinal_inner(&uu, &vv) - longitudinal_inner(&vu, &uv);
    let nu = l2_inner(&u, &u);
    let nv = l2_inner(&v, &v);
    let cross = l2_inner(&u, &v);
    let gram = nu * nv - cross * cross;
    if gram <= 1e-12 * nu * nv {
        return Err(Error::DegeneratePlane { gram });
    }
    Ok((k_generic, r / gram))
}

/// Scans all distinct cosine stream-mode pairs with |k|∞ ≤ `k_max` and
/// returns (k_u, k_v, K_generic, K_projection) for each plane. Pairs
/// violating the support condition are skipped.
pub fn low_mode_curvature_scan(
    n: i64,
    k_max: i64,
) -> Result<Vec<((i64, i64), (i64, i64), f64, f64)>> {
    let reps: Vec<(i64, i64)> = sdiff_modes(n as usize)
        .into_iter()
        .filter(|k| k.0.abs() <= k_max && k.1.abs() <= k_max)
        .collect();
    let mut pairs = Vec::new();
    for (i, &ku) in reps.iter().enumerate() {
        for &kv in reps.iter().skip(i + 1) {
            pairs.push((ku, kv));
        }
    }
    pairs
        .par_iter()
        .map(|&(ku, kv)| {
            let um = [ModeCoeff2 { k: [ku.0, ku.1], re: 0.5, im: 0.0 }];
            let vm = [ModeCoeff2 { k: [kv.0, kv.1], re: 0.5, im: 0.0 }];
            match fluid_curvature(n, &um, &vm) {
                Ok((kg, kp)) => Ok(Some((ku, kv, kg, kp))),
                Err(Error::ModeSupport(_)) | Err(Error::DegeneratePlane { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()
        .map(|v| v.into_iter().flatten().collect())
}
