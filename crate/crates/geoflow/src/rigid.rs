//! Rigid-body stability: triangle-inequality criterion on reciprocal
//! moments, the coin threshold, principal-plane curvature tables, and the
//! middle-axis linearization.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::make_so3;

/// Stability verdict for a rigid body with principal moments G.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Unstable,
}

/// Reciprocal moments, triangle-inequality flags, principal-plane sectional
/// curvatures, and (when sampled) the minimum curvature over random planes.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub mu: [f64; 3],
    pub triangle_ok: [bool; 3],
    /// (K₁₂, K₂₃, K₃₁) for the principal planes.
    pub sectional: [f64; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_random_k: Option<f64>,
    pub verdict: Verdict,
}

fn check_positive(vals: &[f64], what: &str) -> Result<()> {
    for (i, v) in vals.iter().enumerate() {
        if !(*v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "{what}[{}] must be positive and finite, got {v}",
                i + 1
            )));
        }
    }
    Ok(())
}

/// Moments of inertia from reciprocal moments: G_i = 1/μ_j + 1/μ_k.
pub fn g_from_mu(mu: [f64; 3]) -> [f64; 3] {
    let m = [1.0 / mu[0], 1.0 / mu[1], 1.0 / mu[2]];
    [m[1] + m[2], m[2] + m[0], m[0] + m[1]]
}

/// Closed-form principal-plane sectional curvatures (K₁₂, K₂₃, K₃₁):
/// K₂₃ = ((G₂−G₃)² + 2G₁(G₂+G₃) − 3G₁²) / (4G₁G₂G₃), and cyclic.
pub fn principal_plane_curvatures(g: [f64; 3]) -> [f64; 3] {
    let k = |l: usize, i: usize, j: usize| {
        ((g[i] - g[j]).powi(2) + 2.0 * g[l] * (g[i] + g[j]) - 3.0 * g[l] * g[l])
            / (4.0 * g[0] * g[1] * g[2])
    };
    // Plane (1,2) is opposite axis 3, etc.
    [k(2, 0, 1), k(0, 1, 2), k(1, 2, 0)]
}

/// Curvature table from the reciprocal-moment coefficient form:
/// the (i,j)-plane term of R carries (μ_i+μ_j−μ_l)/(μ_l(μ_i+μ_j)), and
/// K_ij is that coefficient over the plane area G_iG_j.
fn curvatures_from_mu(mu: [f64; 3]) -> [f64; 3] {
    let g = g_from_mu(mu);
    let k = |i: usize, j: usize, l: usize| {
        (mu[i] + mu[j] - mu[l]) / (mu[l] * (mu[i] + mu[j])) / (g[i] * g[j])
    };
    [k(0, 1, 2), k(1, 2, 0), k(2, 0, 1)]
}

/// Stability of rotation geometry from the reciprocal moments alone:
/// all sectional curvatures are positive exactly when μ₁, μ₂, μ₃ satisfy
/// the strict triangle inequalities.
pub fn triangle_stability(mu1: f64, mu2: f64, mu3: f64) -> Result<StabilityReport> {
    let mu = [mu1, mu2, mu3];
    check_positive(&mu, "mu")?;
    let triangle_ok = [
        mu[0] + mu[1] > mu[2],
        mu[1] + mu[2] > mu[0],
        mu[2] + mu[0] > mu[1],
    ];
    let verdict = if triangle_ok.iter().all(|&b| b) {
        Verdict::Stable
    } else {
        Verdict::Unstable
    };
    Ok(StabilityReport {
        mu,
        triangle_ok,
        sectional: curvatures_from_mu(mu),
        min_random_k: None,
        verdict,
    })
}

/// Cylinder height below which some rotation plane has negative curvature:
/// h* = √(3/2)·r.
pub fn coin_threshold(r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("radius must be > 0, got {r}")));
    }
    Ok((1.5f64).sqrt() * r)
}

/// Principal-plane curvatures by two routes — the closed form above and the
/// generic biquadratic on the so(3) model (they must agree to 1e-10) — plus
/// the minimum sectional curvature over `samples` random planes.
pub fn sectional_table(
    g1: f64,
    g2: f64,
    g3: f64,
    samples: usize,
    seed: u64,
) -> Result<StabilityReport> {
    let g = [g1, g2, g3];
    check_positive(&g, "G")?;
    let closed = principal_plane_curvatures(g);
    let algebra = make_so3(g1, g2, g3)?;
    let pairs = [(0usize, 1usize), (1, 2), (2, 0)];
    for (idx, &(i, j)) in pairs.iter().enumerate() {
        let k = algebra.sectional_curvature(&algebra.basis_vector(i), &algebra.basis_vector(j))?;
        let scale = closed[idx].abs().max(1.0 / (g1 * g2 * g3));
        if (k - closed[idx]).abs() > 1e-10 * scale {
            return Err(Error::InternalCheck(format!(
                "principal-plane curvature mismatch: closed form {} vs generic {}",
                closed[idx], k
            )));
        }
    }

    let min_random_k = if samples > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut min_k = f64::INFINITY;
        let mut done = 0;
        while done < samples {
            let u = DVector::from_fn(3, |_, _| standard_normal(&mut rng));
            let v = DVector::from_fn(3, |_, _| standard_normal(&mut rng));
            match algebra.sectional_curvature(&u, &v) {
                Ok(k) => {
                    min_k = min_k.min(k);
                    done += 1;
                }
                Err(Error::DegeneratePlane { .. }) => continue, // resample
                Err(e) => return Err(e),
            }
        }
        Some(min_k)
    } else {
        None
    };

    // μ from G: M_i = (G_j + G_k − G_i)/2 must be positive for a physical body.
    let m = [
        (g2 + g3 - g1) / 2.0,
        (g3 + g1 - g2) / 2.0,
        (g1 + g2 - g3) / 2.0,
    ];
    if m.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "G = ({g1}, {g2}, {g3}) does not come from positive second moments"
        )));
    }
    let mu = [1.0 / m[0], 1.0 / m[1], 1.0 / m[2]];
    let triangle_ok = [
        mu[0] + mu[1] > mu[2],
        mu[1] + mu[2] > mu[0],
        mu[2] + mu[0] > mu[1],
    ];
    let verdict = if closed.iter().all(|&k| k > 0.0) {
        Verdict::Stable
    } else {
        Verdict::Unstable
    };
    Ok(StabilityReport {
        mu,
        triangle_ok,
        sectional: closed,
        min_random_k,
        verdict,
    })
}

fn standard_normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller; one draw per call keeps the stream simple and seedable.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Linearization class of a steady principal-axis rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    ExponentialUnstable,
    Oscillatory,
    Marginal,
}

/// Linearizes the Euler equations about the steady rotation Ω·e_axis.
///
/// For axis 1 the perturbation satisfies δv̈ = λ² δv with
/// λ² = Ω²(G₁−G₃)(G₂−G₁)/(G₂G₃) (cyclic for the other axes); the analytic
/// value is cross-checked against the numerically differentiated Jacobian
/// of the geodesic right-hand side to 1e-6 relative.
pub fn middle_axis_spectrum(
    g1: f64,
    g2: f64,
    g3: f64,
    axis: usize,
    omega: f64,
) -> Result<(f64, Classification)> {
    let g = [g1, g2, g3];
    check_positive(&g, "G")?;
    if !(1..=3).contains(&axis) {
        return Err(Error::InvalidParameter(format!(
            "axis must be 1, 2, or 3, got {axis}"
        )));
    }
    if !omega.is_finite() {
        return Err(Error::InvalidParameter(format!("Omega must be finite, got {omega}")));
    }
    let a = axis - 1;
    let (b, c) = ((a + 1) % 3, (a + 2) % 3);
    let lambda_sq = omega * omega * (g[a] - g[c]) * (g[b] - g[a]) / (g[b] * g[c]);

    if omega != 0.0 {
        // Central-difference Jacobian of the geodesic rhs at the steady state.
        let algebra = make_so3(g1, g2, g3)?;
        let h = 1e-6 * omega.abs();
        let steady = algebra.basis_vector(a) * omega;
        let mut jac = [[0.0f64; 3]; 3];
        for col in 0..3 {
            let mut plus = steady.clone();
            let mut minus = steady.clone();
            plus[col] += h;
            minus[col] -= h;
            let fp = algebra.geodesic_rhs(&plus)?;
            let fm = algebra.geodesic_rhs(&minus)?;
            for row in 0..3 {
                jac[row][col] = (fp[row] - fm[row]) / (2.0 * h);
            }
        }
        // The transverse 2x2 block has eigenvalues ±λ with λ² = J_bc·J_cb.
        let numeric = jac[b][c] * jac[c][b];
        let scale = lambda_sq.abs().max(omega * omega * 1e-9);
        if (numeric - lambda_sq).abs() > 1e-6 * scale {
            return Err(Error::InternalCheck(format!(
                "middle-axis spectrum mismatch: analytic {lambda_sq} vs Jacobian {numeric}"
            )));
        }
    }

    let tol = 1e-14 * omega * omega;
    let class = if lambda_sq > tol {
        Classification::ExponentialUnstable
    } else if lambda_sq < -tol {
        Classification::Oscillatory
    } else {
        Classification::Marginal
    };
    Ok((lambda_sq, class))
}

/// One row of a cylinder height scan: the three principal-plane curvatures
/// at height `h` for the given radius, plus the triangle verdict.
#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub h: f64,
    pub k12: f64,
    pub k23: f64,
    pub k31: f64,
    pub verdict: Verdict,
}

/// Scans cylinder heights `start..=stop` (endpoint included within 1e-12)
/// with the given step.
pub fn cylinder_h_scan(r: f64, start: f64, stop: f64, step: f64) -> Result<Vec<ScanRow>> {
    if !(r > 0.0 && step > 0.0 && start > 0.0 && stop >= start) {
        return Err(Error::InvalidParameter(format!(
            "invalid scan r={r}, start={start}, stop={stop}, step={step}"
        )));
    }
    let n = ((stop - start) / step + 1e-12).floor() as usize;
    let mut rows = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let h = start + i as f64 * step;
        let inertia =
            crate::models::inertia_from_shape(&crate::models::RigidBodySpec::Cylinder { r, h })?;
        let report = triangle_stability(inertia.mu[0], inertia.mu[1], inertia.mu[2])?;
        rows.push(ScanRow {
            h,
            k12: report.sectional[0],
            k23: report.sectional[1],
            k31: report.sectional[2],
            verdict: report.verdict,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{inertia_from_shape, RigidBodySpec};
    use approx::assert_relative_eq;
    use rand::Rng;

    #[test]
    fn equilateral_mu_is_stable() {
        let r = triangle_stability(1.0, 1.0, 1.0).unwrap();
        assert_eq!(r.verdict, Verdict::Stable);
        assert!(r.sectional.iter().all(|&k| k > 0.0));
        assert_eq!(r.triangle_ok, [true; 3]);
    }

    #[test]
    fn flat_body_is_unstable() {
        // μ₃ > μ₁ + μ₂ breaks the triangle inequality.
        let r = triangle_stability(1.0, 1.0, 2.5).unwrap();
        assert_eq!(r.verdict, Verdict::Unstable);
        assert!(r.sectional.iter().any(|&k| k < 0.0));
    }

    #[test]
    fn scalene_triangle_is_stable() {
        let r = triangle_stability(3.0, 4.0, 5.0).unwrap();
        assert_eq!(r.verdict, Verdict::Stable);
    }

    #[test]
    fn rejects_nonpositive_mu() {
        assert!(triangle_stability(1.0, -1.0, 1.0).is_err());
        assert!(triangle_stability(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn coin_threshold_value_and_scaling() {
        let h = coin_threshold(1.0).unwrap();
        assert_relative_eq!(h, 1.2247448713915890, epsilon = 1e-12);
        assert_relative_eq!(coin_threshold(2.0).unwrap(), 2.0 * h);
        assert!(coin_threshold(0.0).is_err());
    }

    #[test]
    fn coin_sign_flips_across_threshold() {
        // r=1: K₁₂ > 0 for h=1.3, K₁₂ < 0 for h=1.1; and the sign flips
        // exactly at h*(1 ± 1e-6).
        let k12_at = |h: f64| {
            let i = inertia_from_shape(&RigidBodySpec::Cylinder { r: 1.0, h }).unwrap();
            triangle_stability(i.mu[0], i.mu[1], i.mu[2]).unwrap().sectional[0]
        };
        assert!(k12_at(1.3) > 0.0);
        assert!(k12_at(1.1) < 0.0);
        let h_star = coin_threshold(1.0).unwrap();
        assert!(k12_at(h_star * (1.0 + 1e-6)) > 0.0);
        assert!(k12_at(h_star * (1.0 - 1e-6)) < 0.0);
    }

    #[test]
    fn sectional_table_sphere() {
        let r = sectional_table(1.0, 1.0, 1.0, 0, 42).unwrap();
        for k in r.sectional {
            assert_relative_eq!(k, 0.25, epsilon = 1e-12);
        }
        assert_eq!(r.verdict, Verdict::Stable);
        assert!(r.min_random_k.is_none());
    }

    #[test]
    fn squat_cylinder_has_negative_plane() {
        let i = inertia_from_shape(&RigidBodySpec::Cylinder { r: 1.0, h: 1.0 }).unwrap();
        let r = sectional_table(i.g[0], i.g[1], i.g[2], 0, 42).unwrap();
        assert!(r.sectional[0] < 0.0, "K12 = {}", r.sectional[0]);
        assert_eq!(r.verdict, Verdict::Unstable);
    }

    #[test]
    fn closed_form_matches_generic_for_random_metrics() {
        // sectional_table errors internally if the two routes disagree
        // beyond 1e-10; exercise it on random G.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let g: [f64; 3] = [
                rng.gen_range(0.1..10.0),
                rng.gen_range(0.1..10.0),
                rng.gen_range(0.1..10.0),
            ];
            // Keep G physical (coming from positive second moments).
            if g[1] + g[2] <= g[0] || g[2] + g[0] <= g[1] || g[0] + g[1] <= g[2] {
                continue;
            }
            sectional_table(g[0], g[1], g[2], 0, 1).unwrap();
        }
    }

    #[test]
    fn random_plane_minimum_detects_negative_curvature() {
        let i = inertia_from_shape(&RigidBodySpec::Cylinder { r: 1.0, h: 1.0 }).unwrap();
        let r = sectional_table(i.g[0], i.g[1], i.g[2], 2000, 42).unwrap();
        let min_k = r.min_random_k.unwrap();
        // Negative-curvature planes occupy positive measure around the
        // (1,2) principal plane, so a 2000-sample sweep must find one.
        assert!(min_k < 0.0, "min K = {min_k}");
        // Deterministic given the seed.
        let r2 = sectional_table(i.g[0], i.g[1], i.g[2], 2000, 42).unwrap();
        assert_eq!(min_k, r2.min_random_k.unwrap());
    }

    #[test]
    fn triangle_verdict_matches_curvature_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let mu: [f64; 3] = [
                rng.gen_range(0.1..10.0),
                rng.gen_range(0.1..10.0),
                rng.gen_range(0.1..10.0),
            ];
            let rep = triangle_stability(mu[0], mu[1], mu[2]).unwrap();
            let all_positive = rep.sectional.iter().all(|&k| k > 0.0);
            assert_eq!(
                rep.verdict == Verdict::Stable,
                all_positive,
                "mu = {mu:?}, K = {:?}",
                rep.sectional
            );
            // Cross-check the μ-route table against the generic machinery.
            let g = g_from_mu(mu);
            let alg = make_so3(g[0], g[1], g[2]).unwrap();
            let pairs = [(0usize, 1usize), (1, 2), (2, 0)];
            for (idx, &(i, j)) in pairs.iter().enumerate() {
                let k = alg
                    .sectional_curvature(&alg.basis_vector(i), &alg.basis_vector(j))
                    .unwrap();
                assert_relative_eq!(k, rep.sectional[idx], max_relative = 1e-10, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn middle_axis_examples() {
        let (l, c) = middle_axis_spectrum(2.0, 1.0, 3.0, 1, 1.0).unwrap();
        assert_relative_eq!(l, 1.0 / 3.0, epsilon = 1e-9);
        assert_eq!(c, Classification::ExponentialUnstable);

        let (l, c) = middle_axis_spectrum(1.0, 2.0, 3.0, 1, 1.0).unwrap();
        assert_relative_eq!(l, -1.0 / 3.0, epsilon = 1e-9);
        assert_eq!(c, Classification::Oscillatory);

        let (l, c) = middle_axis_spectrum(1.0, 2.0, 3.0, 1, 0.0).unwrap();
        assert_eq!(l, 0.0);
        assert_eq!(c, Classification::Marginal);

        assert!(middle_axis_spectrum(1.0, 2.0, 3.0, 4, 1.0).is_err());
    }

    #[test]
    fn symmetric_top_is_marginal() {
        let (l, c) = middle_axis_spectrum(1.0, 2.0, 2.0, 2, 1.5).unwrap();
        assert_eq!(l, 0.0);
        assert_eq!(c, Classification::Marginal);
    }

    #[test]
    fn mu_g_round_trip() {
        let i = inertia_from_shape(&RigidBodySpec::Box {
            a: 1.0,
            b: 2.0,
            c: 3.0,
        })
        .unwrap();
        let g = g_from_mu(i.mu);
        for k in 0..3 {
            assert_relative_eq!(g[k], i.g[k], epsilon = 1e-12);
        }
    }

    #[test]
    fn h_scan_brackets_the_threshold() {
        let rows = cylinder_h_scan(1.0, 1.2, 1.25, 1e-4).unwrap();
        assert_eq!(rows.len(), 501);
        let h_star = coin_threshold(1.0).unwrap();
        let flip = rows.windows(2).find(|w| w[0].k12 < 0.0 && w[1].k12 >= 0.0);
        let w = flip.expect("sign change in scan");
        assert!((w[1].h - h_star).abs() <= 1e-4 + 1e-12);
    }
}
