//! Geodesic integration on a metric Lie algebra, reconstruction of group
//! trajectories, conserved-quantity logs, and the geodesic-deviation check
//! against the curvature biquadratic.

use nalgebra::{DVector, Matrix3, SVD};
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;

use crate::algebra::{AlgebraVector, MetricLieAlgebra};
use crate::error::{Error, Result};
use crate::ode::{rk4_step, step_count};

/// A point of the underlying group, for the models with a registered
/// group action.
#[derive(Debug, Clone, Serialize)]
pub enum GroupPoint {
    /// Rotation matrix (body frame), for so(3).
    Rotation(Matrix3<f64>),
    /// Half-plane point with x0 > 0, for affine2.
    HalfPlane { x0: f64, x1: f64 },
}

/// Time grid, algebra velocities, optional group configuration samples, and
/// named conserved-quantity logs.
#[derive(Debug, Clone, Serialize)]
pub struct GeodesicTrajectory {
    pub times: Vec<f64>,
    pub velocities: Vec<AlgebraVector>,
    pub group_points: Option<Vec<GroupPoint>>,
    pub invariants: BTreeMap<String, Vec<f64>>,
}

impl GeodesicTrajectory {
    /// Max relative drift of a logged invariant from its initial value.
    pub fn invariant_drift(&self, name: &str) -> Option<f64> {
        let series = self.invariants.get(name)?;
        let first = *series.first()?;
        let scale = first.abs().max(1e-300);
        series
            .iter()
            .map(|v| (v - first).abs() / scale)
            .fold(None, |acc, d| Some(acc.map_or(d, |a: f64| a.max(d))))
    }

    /// Appends a log computed from the stored velocities.
    pub fn log_velocity_invariant(
        &mut self,
        name: &str,
        f: impl Fn(&AlgebraVector) -> f64,
    ) {
        let series = self.velocities.iter().map(f).collect();
        self.invariants.insert(name.to_string(), series);
    }

    /// Writes the trajectory as CSV: t, velocity components, group
    /// coordinates when present, then invariant columns in name order.
    pub fn write_csv(&self, out: &mut impl Write, comment: Option<&str>) -> Result<()> {
        if let Some(c) = comment {
            writeln!(out, "# {c}")?;
        }
        let dim = self.velocities.first().map_or(0, |v| v.len());
        let mut header: Vec<String> = vec!["t".into()];
        header.extend((0..dim).map(|i| format!("v{i}")));
        match self.group_points.as_deref().and_then(|g| g.first()) {
            Some(GroupPoint::HalfPlane { .. }) => {
                header.push("x0".into());
                header.push("x1".into());
            }
            Some(GroupPoint::Rotation(_)) => {
                for r in 0..3 {
                    for c in 0..3 {
                        header.push(format!("R{r}{c}"));
                    }
                }
            }
            None => {}
        }
        header.extend(self.invariants.keys().cloned());
        writeln!(out, "{}", header.join(","))?;

        for (s, t) in self.times.iter().enumerate() {
            let mut row: Vec<String> = vec![format!("{t:.12e}")];
            for x in self.velocities[s].iter() {
                row.push(format!("{x:.12e}"));
            }
            if let Some(points) = &self.group_points {
                match &points[s] {
                    GroupPoint::HalfPlane { x0, x1 } => {
                        row.push(format!("{x0:.12e}"));
                        row.push(format!("{x1:.12e}"));
                    }
                    GroupPoint::Rotation(m) => {
                        for r in 0..3 {
                            for c in 0..3 {
                                row.push(format!("{:.12e}", m[(r, c)]));
                            }
                        }
                    }
                }
            }
            for series in self.invariants.values() {
                row.push(format!("{:.12e}", series[s]));
            }
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Integrates ∂v/∂t + D_v v = 0 with classical RK4, logging the energy
/// ½G(v, v) at every step.
pub fn integrate_geodesic(
    a: &MetricLieAlgebra,
    v0: &AlgebraVector,
    dt: f64,
    t_final: f64,
) -> Result<GeodesicTrajectory> {
    if !(dt > 0.0) || t_final < dt {
        return Err(Error::InvalidParameter(format!(
            "need dt > 0 and T >= dt, got dt={dt}, T={t_final}"
        )));
    }
    let steps = step_count(dt, t_final);
    let mut v = v0.clone();
    let mut times = Vec::with_capacity(steps + 1);
    let mut velocities = Vec::with_capacity(steps + 1);
    let mut energy = Vec::with_capacity(steps + 1);

    let mut rhs = |x: &AlgebraVector| a.geodesic_rhs(x).expect("conforming state");
    a.geodesic_rhs(v0)?; // surface dimension errors before integrating

    for s in 0..=steps {
        if s > 0 {
            v = rk4_step(&v, dt, &mut rhs);
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteState { step: s });
        }
        times.push(s as f64 * dt);
        energy.push(0.5 * a.inner(&v, &v)?);
        velocities.push(v.clone());
    }

    let mut invariants = BTreeMap::new();
    invariants.insert("energy".to_string(), energy);
    Ok(GeodesicTrajectory {
        times,
        velocities,
        group_points: None,
        invariants,
    })
}

fn hat(v: &AlgebraVector) -> Matrix3<f64> {
    Matrix3::new(0.0, -v[2], v[1], v[2], 0.0, -v[0], -v[1], v[0], 0.0)
}

/// Nearest rotation matrix by polar decomposition.
fn polar_project(m: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = SVD::new(*m, true, true);
    let u = svd.u.unwrap();
    let vt = svd.v_t.unwrap();
    let mut r = u * vt;
    if r.determinant() < 0.0 {
        let mut u2 = u;
        u2.column_mut(2).scale_mut(-1.0);
        r = u2 * vt;
    }
    r
}

/// Re-integrates the geodesic together with the group kinematics
/// dg/dt = g v from the trajectory's initial velocity, and attaches the
/// group samples (plus the half-plane Killing-charge logs where defined).
///
/// Supported group models: so(3) rotations (Ṙ = R·hat(v), re-orthonormalized
/// by polar projection each step) and the affine2 half-plane.
pub fn reconstruct_group(
    a: &MetricLieAlgebra,
    traj: &GeodesicTrajectory,
    x0: &GroupPoint,
) -> Result<GeodesicTrajectory> {
    let dim = a.dim();
    if traj.velocities.first().map_or(0, |v| v.len()) != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: traj.velocities.first().map_or(0, |v| v.len()),
        });
    }
    if traj.times.len() < 2 {
        return Err(Error::InvalidParameter("trajectory too short".into()));
    }
    let dt = traj.times[1] - traj.times[0];
    let steps = traj.times.len() - 1;
    let v0 = &traj.velocities[0];

    let mut out = traj.clone();
    match (a.label(), x0) {
        ("affine2", GroupPoint::HalfPlane { x0: px, x1: py }) => {
            if !(*px > 0.0) {
                return Err(Error::InvalidParameter(format!("x0 must be > 0, got {px}")));
            }
            // State: (v0, v1, x0, x1).
            let mut state = DVector::from_vec(vec![v0[0], v0[1], *px, *py]);
            let mut rhs = |s: &DVector<f64>| {
                let v = DVector::from_vec(vec![s[0], s[1]]);
                let dv = a.geodesic_rhs(&v).expect("dim 2");
                DVector::from_vec(vec![dv[0], dv[1], s[2] * s[0], s[2] * s[1]])
            };
            let mut points = vec![GroupPoint::HalfPlane { x0: *px, x1: *py }];
            let mut charges = vec![halfplane_invariants((state[2], state[3]), &v0.clone())?];
            for s in 1..=steps {
                state = rk4_step(&state, dt, &mut rhs);
                if state.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NonFiniteState { step: s });
                }
                points.push(GroupPoint::HalfPlane {
                    x0: state[2],
                    x1: state[3],
                });
                let v = DVector::from_vec(vec![state[0], state[1]]);
                charges.push(halfplane_invariants((state[2], state[3]), &v)?);
            }
            out.group_points = Some(points);
            out.invariants
                .insert("F0".into(), charges.iter().map(|c| c.0).collect());
            out.invariants
                .insert("F1".into(), charges.iter().map(|c| c.1).collect());
            out.invariants
                .insert("Fm1".into(), charges.iter().map(|c| c.2).collect());
        }
        ("so3", GroupPoint::Rotation(r0)) => {
            // State: (v, R flattened row-major).
            let mut state = DVector::zeros(12);
            for i in 0..3 {
                state[i] = v0[i];
            }
            for r in 0..3 {
                for c in 0..3 {
                    state[3 + 3 * r + c] = r0[(r, c)];
                }
            }
            let mut rhs = |s: &DVector<f64>| {
                let v = DVector::from_vec(vec![s[0], s[1], s[2]]);
                let dv = a.geodesic_rhs(&v).expect("dim 3");
                let r = Matrix3::from_fn(|i, j| s[3 + 3 * i + j]);
                let dr = r * hat(&v);
                let mut d = DVector::zeros(12);
                for i in 0..3 {
                    d[i] = dv[i];
                }
                for i in 0..3 {
                    for j in 0..3 {
                        d[3 + 3 * i + j] = dr[(i, j)];
                    }
                }
                d
            };
            let mut points = vec![GroupPoint::Rotation(*r0)];
            for s in 1..=steps {
                state = rk4_step(&state, dt, &mut rhs);
                if state.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NonFiniteState { step: s });
                }
                let r = polar_project(&Matrix3::from_fn(|i, j| state[3 + 3 * i + j]));
                for i in 0..3 {
                    for j in 0..3 {
                        state[3 + 3 * i + j] = r[(i, j)];
                    }
                }
                points.push(GroupPoint::Rotation(r));
            }
            out.group_points = Some(points);
        }
        (label, _) => return Err(Error::UnsupportedGroupModel(label.to_string())),
    }
    Ok(out)
}

/// The three Killing charges of half-plane geodesic motion:
/// F₀ = v₀ + (x₁/x₀)v₁, F₁ = v₁/x₀, F₋₁ = ((x₁²−x₀²)/x₀)v₁ + 2x₁v₀.
pub fn halfplane_invariants(x: (f64, f64), v: &AlgebraVector) -> Result<(f64, f64, f64)> {
    let (x0, x1) = x;
    if !(x0 > 0.0) {
        return Err(Error::InvalidParameter(format!("x0 must be > 0, got {x0}")));
    }
    if v.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: v.len(),
        });
    }
    let f0 = v[0] + (x1 / x0) * v[1];
    let f1 = v[1] / x0;
    let fm1 = ((x1 * x1 - x0 * x0) / x0) * v[1] + 2.0 * x1 * v[0];
    Ok((f0, f1, fm1))
}

/// Fits x₀² + (x₁ − B)² = A² through the half-plane samples by linear least
/// squares; returns (A, B, max residual of the circle equation).
pub fn semicircle_fit(points: &[GroupPoint]) -> Result<(f64, f64, f64)> {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|p| match p {
            GroupPoint::HalfPlane { x0, x1 } => Ok((*x0, *x1)),
            _ => Err(Error::InvalidParameter("not a half-plane trajectory".into())),
        })
        .collect::<Result<_>>()?;
    // x0² + x1² = 2B x1 + C with C = A² − B².
    let n = xy.len() as f64;
    let (mut s1, mut s2, mut sy, mut syy) = (0.0, 0.0, 0.0, 0.0);
    for &(x0, x1) in &xy {
        let r = x0 * x0 + x1 * x1;
        s1 += r;
        s2 += r * x1;
        sy += x1;
        syy += x1 * x1;
    }
    let det = n * syy - sy * sy;
    let (b, c) = if det.abs() < 1e-14 * n * syy.max(1.0) {
        // Degenerate spread in x1: treat the samples as a single x1 level.
        (sy / n, (s1 - 2.0 * (sy / n) * sy) / n)
    } else {
        // Solve the 2x2 normal equations for (2B, C).
        let two_b = (n * s2 - sy * s1) / det;
        let c = (s1 - two_b * sy) / n;
        (two_b / 2.0, c)
    };
    let a_sq = c + b * b;
    if a_sq <= 0.0 {
        return Err(Error::InvalidParameter("circle fit failed".into()));
    }
    let a = a_sq.sqrt();
    let mut resid = 0.0f64;
    for &(x0, x1) in &xy {
        resid = resid.max((x0 * x0 + (x1 - b) * (x1 - b) - a_sq).abs());
    }
    Ok((a, b, resid))
}

/// Models for which a closed-form distance is available.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviationModel {
    /// Hyperbolic half-plane distance.
    Affine2,
    /// so(3) with metric G·Id: distance = √G × rotation angle.
    So3BiInvariant,
}

fn hyperbolic_distance(p: (f64, f64), q: (f64, f64)) -> f64 {
    // sinh²(d/2) = ((Δx0)² + (Δx1)²) / (4 x0 x0'); stable for small d.
    let dx0 = p.0 - q.0;
    let dx1 = p.1 - q.1;
    let s = ((dx0 * dx0 + dx1 * dx1) / (4.0 * p.0 * q.0)).sqrt();
    2.0 * s.asinh()
}

fn rotation_angle(r1: &Matrix3<f64>, r2: &Matrix3<f64>) -> f64 {
    let m = r1.transpose() * r2;
    // atan2 of the skew norm against (tr−1)/2 keeps precision at small angles.
    let sx = 0.5 * (m[(2, 1)] - m[(1, 2)]);
    let sy = 0.5 * (m[(0, 2)] - m[(2, 0)]);
    let sz = 0.5 * (m[(1, 0)] - m[(0, 1)]);
    let s = (sx * sx + sy * sy + sz * sz).sqrt();
    let c = 0.5 * (m.trace() - 1.0);
    s.atan2(c)
}

/// Two-geodesic realization of the Jacobi expansion
/// |y(t)|² = t²|u|² − (t⁴/3) R(u,v) + O(t⁶).
///
/// Integrates geodesics with initial velocities v and v + εu from the same
/// group point, measures y(t) = distance/ε on `t_grid`, and least-squares
/// fits |y|² = a t² + b t⁴. Returns (a, b); the contract is b ≈ −R(u,v)/3,
/// so b < 0 on a negatively curved plane means exponential separation.
pub fn deviation_expansion(
    a: &MetricLieAlgebra,
    model: DeviationModel,
    v: &AlgebraVector,
    u: &AlgebraVector,
    eps: f64,
    t_grid: &[f64],
) -> Result<(f64, f64)> {
    if !(eps > 0.0 && eps <= 1e-2) {
        return Err(Error::InvalidParameter(format!(
            "eps must be in (0, 1e-2], got {eps}"
        )));
    }
    if t_grid.is_empty() || t_grid.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidParameter("t_grid must be positive".into()));
    }
    match model {
        DeviationModel::Affine2 => {
            if a.label() != "affine2" {
                return Err(Error::UnsupportedDistanceOracle(a.label().into()));
            }
        }
        DeviationModel::So3BiInvariant => {
            if a.label() != "so3" {
                return Err(Error::UnsupportedDistanceOracle(a.label().into()));
            }
            let g = a.metric();
            let g0 = g[(0, 0)];
            if (g[(1, 1)] - g0).abs() > 1e-12 * g0 || (g[(2, 2)] - g0).abs() > 1e-12 * g0 {
                return Err(Error::UnsupportedDistanceOracle(
                    "so(3) distance oracle requires the bi-invariant metric G*Id".into(),
                ));
            }
        }
    }

    let t_max = t_grid.iter().cloned().fold(0.0f64, f64::max);
    let steps = 2048usize;
    let dt = t_max / steps as f64;
    let v2 = u * eps + v;

    let start = match model {
        DeviationModel::Affine2 => GroupPoint::HalfPlane { x0: 1.0, x1: 0.0 },
        DeviationModel::So3BiInvariant => GroupPoint::Rotation(Matrix3::identity()),
    };
    let t1 = reconstruct_group(a, &integrate_geodesic(a, v, dt, t_max)?, &start)?;
    let t2 = reconstruct_group(a, &integrate_geodesic(a, &v2, dt, t_max)?, &start)?;
    let p1 = t1.group_points.as_ref().unwrap();
    let p2 = t2.group_points.as_ref().unwrap();

    let sqrt_g = match model {
        DeviationModel::Affine2 => 1.0,
        DeviationModel::So3BiInvariant => a.metric()[(0, 0)].sqrt(),
    };
    let distance_at = |idx: usize| -> f64 {
        match (&p1[idx], &p2[idx]) {
            (GroupPoint::HalfPlane { x0, x1 }, GroupPoint::HalfPlane { x0: y0, x1: y1 }) => {
                hyperbolic_distance((*x0, *x1), (*y0, *y1))
            }
            (GroupPoint::Rotation(r1), GroupPoint::Rotation(r2)) => {
                sqrt_g * rotation_angle(r1, r2)
            }
            _ => unreachable!(),
        }
    };

    // Least squares for |y|² = a t² + b t⁴ over the grid, with linear
    // interpolation between integration steps.
    let (mut s22, mut s23, mut s33, mut r2, mut r3) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &t in t_grid {
        let pos = (t / dt).min(steps as f64);
        let i = (pos.floor() as usize).min(steps - 1);
        let frac = pos - i as f64;
        let d = distance_at(i) * (1.0 - frac) + distance_at(i + 1) * frac;
        let y2 = (d / eps).powi(2);
        let (b2, b3) = (t * t, t * t * t * t);
        s22 += b2 * b2;
        s23 += b2 * b3;
        s33 += b3 * b3;
        r2 += b2 * y2;
        r3 += b3 * y2;
    }
    let det = s22 * s33 - s23 * s23;
    if det.abs() < 1e-300 {
        return Err(Error::InvalidParameter("degenerate fit grid".into()));
    }
    let coef_a = (s33 * r2 - s23 * r3) / det;
    let coef_b = (s22 * r3 - s23 * r2) / det;
    Ok((coef_a, coef_b))
}
