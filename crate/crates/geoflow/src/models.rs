//! Constructors for the concrete metric Lie algebras and rigid-body inertia
//! tensors used throughout the crate.
//!
//! The infinite-dimensional algebras (vector fields on the circle, area
//! preserving stream functions on the torus) appear as Galerkin truncations:
//! bracket outputs beyond the mode cutoff are orthogonally projected out, so
//! the Jacobi identity only holds for triples whose nested brackets stay
//! inside the cutoff.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::algebra::{AlgebraVector, MetricLieAlgebra};
use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// so(3) with the cross-product bracket and metric diag(G₁, G₂, G₃).
pub fn make_so3(g1: f64, g2: f64, g3: f64) -> Result<MetricLieAlgebra> {
    for (name, g) in [("G1", g1), ("G2", g2), ("G3", g3)] {
        if !(g > 0.0) {
            return Err(Error::InvalidParameter(format!("{name} must be > 0, got {g}")));
        }
    }
    // [e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e2 plus mirrors.
    let entries = [
        (0, 1, 2, 1.0),
        (1, 0, 2, -1.0),
        (1, 2, 0, 1.0),
        (2, 1, 0, -1.0),
        (2, 0, 1, 1.0),
        (0, 2, 1, -1.0),
    ];
    let metric = DMatrix::from_diagonal(&DVector::from_vec(vec![g1, g2, g3]));
    MetricLieAlgebra::new(3, &entries, metric, "so3", true)
}

/// The non-abelian two-dimensional algebra [e₀, e₁] = e₁ with the identity
/// metric. Its group is the hyperbolic half-plane.
pub fn make_affine2() -> Result<MetricLieAlgebra> {
    let entries = [(0, 1, 1, 1.0), (1, 0, 1, -1.0)];
    MetricLieAlgebra::new(2, &entries, DMatrix::identity(2, 2), "affine2", true)
}

// ---------------------------------------------------------------------------
// Fourier helpers shared by the truncated algebras.
//
// Real basis functions are represented by small complex-exponential mode
// maps; brackets are computed exactly by convolution and projected back.
// ---------------------------------------------------------------------------

type Modes1 = HashMap<i64, Complex64>;
type Modes2 = HashMap<(i64, i64), Complex64>;

fn add_mode1(map: &mut Modes1, k: i64, z: Complex64) {
    let e = map.entry(k).or_insert(Complex64::new(0.0, 0.0));
    *e += z;
}

fn add_mode2(map: &mut Modes2, k: (i64, i64), z: Complex64) {
    let e = map.entry(k).or_insert(Complex64::new(0.0, 0.0));
    *e += z;
}

/// Vector fields on the circle: basis {1, cos nx, sin nx : 1 ≤ n ≤ N}.
///
/// Basis index 0 is the constant field; 2n−1 is cos nx and 2n is sin nx.
pub fn make_vect_s1(n_max: usize) -> Result<MetricLieAlgebra> {
    if n_max < 1 {
        return Err(Error::InvalidParameter(format!("N must be >= 1, got {n_max}")));
    }
    let dim = 2 * n_max + 1;
    let cutoff = n_max as i64;

    let basis_modes = |idx: usize| -> Modes1 {
        let mut m = Modes1::new();
        if idx == 0 {
            m.insert(0, Complex64::new(1.0, 0.0));
        } else {
            let n = ((idx + 1) / 2) as i64;
            if idx % 2 == 1 {
                // cos nx
                m.insert(n, Complex64::new(0.5, 0.0));
                m.insert(-n, Complex64::new(0.5, 0.0));
            } else {
                // sin nx
                m.insert(n, Complex64::new(0.0, -0.5));
                m.insert(-n, Complex64::new(0.0, 0.5));
            }
        }
        m
    };

    // [u ∂x, v ∂x] = (u v' − v u') ∂x; on exponentials the coefficient is
    // i (q − p) on mode p + q.
    let bracket = |a: &Modes1, b: &Modes1| -> Modes1 {
        let mut out = Modes1::new();
        for (&p, &zp) in a {
            for (&q, &zq) in b {
                let c = Complex64::new(0.0, (q - p) as f64);
                add_mode1(&mut out, p + q, zp * zq * c);
            }
        }
        out
    };

    // Complex modes back to real coefficients, truncating past the cutoff.
    let project = |m: &Modes1| -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for (&k, &z) in m {
            if k == 0 {
                if z.re.abs() > 1e-14 {
                    out.push((0, z.re));
                }
            } else if k > 0 && k <= cutoff {
                let (a, b) = (2.0 * z.re, -2.0 * z.im);
                let n = k as usize;
                if a.abs() > 1e-14 {
                    out.push((2 * n - 1, a));
                }
                if b.abs() > 1e-14 {
                    out.push((2 * n, b));
                }
            }
        }
        out
    };

    let mut entries = Vec::new();
    for i in 0..dim {
        let mi = basis_modes(i);
        for j in (i + 1)..dim {
            let br = bracket(&mi, &basis_modes(j));
            for (k, c) in project(&br) {
                entries.push((i, j, k, c));
                entries.push((j, i, k, -c));
            }
        }
    }

    let mut diag = vec![std::f64::consts::PI; dim];
    diag[0] = TWO_PI;
    let metric = DMatrix::from_diagonal(&DVector::from_vec(diag));
    MetricLieAlgebra::new(dim, &entries, metric, "vect_s1", false)
}

/// Representative wavevectors for the torus truncation: one per ±k pair,
/// 0 < |k|∞ ≤ N, in a fixed deterministic order.
pub fn sdiff_modes(n_max: usize) -> Vec<(i64, i64)> {
    let n = n_max as i64;
    let mut reps = Vec::new();
    for k2 in -n..=n {
        for k1 in -n..=n {
            if (k1, k2) == (0, 0) {
                continue;
            }
            if k2 > 0 || (k2 == 0 && k1 > 0) {
                reps.push((k1, k2));
            }
        }
    }
    reps
}

/// Half-plane representative of ±k.
pub fn sdiff_rep(k: (i64, i64)) -> (i64, i64) {
    if k.1 > 0 || (k.1 == 0 && k.0 > 0) {
        k
    } else {
        (-k.0, -k.1)
    }
}

/// Stream functions on the flat torus, truncated at |k|∞ ≤ N, with the
/// kinetic-energy metric G(χ, ψ) = Σ |k|² χ_k ψ_{−k} (2π)².
///
/// Basis index 2m is cos(k_m · x) and 2m+1 is sin(k_m · x), with k_m the
/// m-th entry of [`sdiff_modes`].
pub fn make_sdiff_t2(n_max: usize) -> Result<MetricLieAlgebra> {
    if n_max < 1 {
        return Err(Error::InvalidParameter(format!("N must be >= 1, got {n_max}")));
    }
    let reps = sdiff_modes(n_max);
    let dim = 2 * reps.len();
    let cutoff = n_max as i64;
    let rep_index: HashMap<(i64, i64), usize> =
        reps.iter().enumerate().map(|(i, &k)| (k, i)).collect();

    let basis_modes = |idx: usize| -> Modes2 {
        let k = reps[idx / 2];
        let nk = (-k.0, -k.1);
        let mut m = Modes2::new();
        if idx % 2 == 0 {
            m.insert(k, Complex64::new(0.5, 0.0));
            m.insert(nk, Complex64::new(0.5, 0.0));
        } else {
            m.insert(k, Complex64::new(0.0, -0.5));
            m.insert(nk, Complex64::new(0.0, 0.5));
        }
        m
    };

    // {f, g} = ∂₂f ∂₁g − ∂₁f ∂₂g; on exponentials the coefficient on mode
    // p + q is (p₁q₂ − p₂q₁) · (−1)·... direct differentiation gives
    // (i p₂)(i q₁) − (i p₁)(i q₂) = p₁q₂ − p₂q₁.
    let bracket = |a: &Modes2, b: &Modes2| -> Modes2 {
        let mut out = Modes2::new();
        for (&p, &zp) in a {
            for (&q, &zq) in b {
                let c = (p.0 * q.1 - p.1 * q.0) as f64;
                if c != 0.0 {
                    add_mode2(&mut out, (p.0 + q.0, p.1 + q.1), zp * zq * c);
                }
            }
        }
        out
    };

    let project = |m: &Modes2| -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for (&k, &z) in m {
            if k == (0, 0) || k.0.abs().max(k.1.abs()) > cutoff {
                continue;
            }
            if sdiff_rep(k) != k {
                continue; // handled at the mirrored mode
            }
            let idx = rep_index[&k];
            let (a, b) = (2.0 * z.re, -2.0 * z.im);
            if a.abs() > 1e-14 {
                out.push((2 * idx, a));
            }
            if b.abs() > 1e-14 {
                out.push((2 * idx + 1, b));
            }
        }
        out
    };

    let mut entries = Vec::new();
    for i in 0..dim {
        let mi = basis_modes(i);
        for j in (i + 1)..dim {
            let br = bracket(&mi, &basis_modes(j));
            for (k, c) in project(&br) {
                entries.push((i, j, k, c));
                entries.push((j, i, k, -c));
            }
        }
    }

    let mut diag = Vec::with_capacity(dim);
    for &k in &reps {
        let ksq = (k.0 * k.0 + k.1 * k.1) as f64;
        let g = 0.5 * ksq * TWO_PI * TWO_PI;
        diag.push(g);
        diag.push(g);
    }
    let metric = DMatrix::from_diagonal(&DVector::from_vec(diag));
    MetricLieAlgebra::new(dim, &entries, metric, "sdiff_t2", false)
}

/// Evaluates a vect_s1 coefficient vector as a function of x.
pub fn eval_vect_s1(coeffs: &AlgebraVector, x: f64) -> f64 {
    let mut v = coeffs[0];
    let n_max = (coeffs.len() - 1) / 2;
    for n in 1..=n_max {
        let nx = n as f64 * x;
        v += coeffs[2 * n - 1] * nx.cos() + coeffs[2 * n] * nx.sin();
    }
    v
}

// ---------------------------------------------------------------------------
// Rigid-body inertia
// ---------------------------------------------------------------------------

/// Uniform-density shape with unit total mass.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase", deny_unknown_fields)]
pub enum RigidBodySpec {
    /// Cylinder with symmetry axis along e₃.
    Cylinder { r: f64, h: f64 },
    Box { a: f64, b: f64, c: f64 },
    Ellipsoid { a: f64, b: f64, c: f64 },
}

/// Principal second moments M_i, moments of inertia G_i = M_j + M_k, and
/// reciprocal moments μ_i = 1/M_i.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PrincipalInertia {
    pub m: [f64; 3],
    pub g: [f64; 3],
    pub mu: [f64; 3],
}

/// Second moments M_i = ∫ρ x_i² dx for the unit-mass shape, then
/// G_i and μ_i.
pub fn inertia_from_shape(spec: &RigidBodySpec) -> Result<PrincipalInertia> {
    let m = match *spec {
        RigidBodySpec::Cylinder { r, h } => {
            if !(r > 0.0 && h > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "degenerate cylinder r={r}, h={h}"
                )));
            }
            [r * r / 4.0, r * r / 4.0, h * h / 12.0]
        }
        RigidBodySpec::Box { a, b, c } => {
            if !(a > 0.0 && b > 0.0 && c > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "degenerate box {a}x{b}x{c}"
                )));
            }
            [a * a / 12.0, b * b / 12.0, c * c / 12.0]
        }
        RigidBodySpec::Ellipsoid { a, b, c } => {
            if !(a > 0.0 && b > 0.0 && c > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "degenerate ellipsoid {a},{b},{c}"
                )));
            }
            [a * a / 5.0, b * b / 5.0, c * c / 5.0]
        }
    };
    Ok(PrincipalInertia {
        m,
        g: [m[1] + m[2], m[0] + m[2], m[0] + m[1]],
        mu: [1.0 / m[0], 1.0 / m[1], 1.0 / m[2]],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn so3_rejects_nonpositive_inertia() {
        assert!(make_so3(1.0, -1.0, 1.0).is_err());
        assert!(make_so3(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn so3_and_affine2_satisfy_jacobi() {
        for a in [make_so3(1.0, 2.0, 3.0).unwrap(), make_affine2().unwrap()] {
            assert!(a.jacobi_exact());
            let d = a.dim();
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        assert!(a.jacobi_defect(i, j, k) < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn vect_s1_bracket_examples() {
        let a = make_vect_s1(3).unwrap();
        // [cos x ∂, sin x ∂] = 1 ∂ (constant mode).
        let out = a.bracket(&a.basis_vector(1), &a.basis_vector(2)).unwrap();
        let mut expected = DVector::zeros(a.dim());
        expected[0] = 1.0;
        assert_relative_eq!(out, expected, epsilon = 1e-14);

        // [1 ∂, cos x ∂] = −sin x ∂.
        let out = a.bracket(&a.basis_vector(0), &a.basis_vector(1)).unwrap();
        let mut expected = DVector::zeros(a.dim());
        expected[2] = -1.0;
        assert_relative_eq!(out, expected, epsilon = 1e-14);
    }

    #[test]
    fn vect_s1_metric() {
        let a = make_vect_s1(2).unwrap();
        let cos1 = a.basis_vector(1);
        assert_relative_eq!(
            a.inner(&cos1, &cos1).unwrap(),
            std::f64::consts::PI,
            epsilon = 1e-14
        );
        let one = a.basis_vector(0);
        assert_relative_eq!(a.inner(&one, &one).unwrap(), TWO_PI, epsilon = 1e-14);
    }

    #[test]
    fn vect_s1_covariant_derivative_of_sin_mode() {
        // D_v v with v = sin x has only the sin 2x component, value 3/2.
        let a = make_vect_s1(3).unwrap();
        let v = a.basis_vector(2); // sin x
        let d = a.covariant_derivative(&v, &v).unwrap();
        let mut expected = DVector::zeros(a.dim());
        expected[4] = 1.5; // sin 2x
        assert_relative_eq!(d, expected, epsilon = 1e-13);
    }

    #[test]
    fn sdiff_bracket_hand_values() {
        // {cos x₁, cos x₂} = ½ cos((1,1)·x) − ½ cos((1,−1)·x).
        let a = make_sdiff_t2(2).unwrap();
        let reps = sdiff_modes(2);
        let idx_of = |k: (i64, i64)| reps.iter().position(|&r| r == k).unwrap();
        let cos_10 = a.basis_vector(2 * idx_of((1, 0)));
        let cos_01 = a.basis_vector(2 * idx_of((0, 1)));
        let out = a.bracket(&cos_10, &cos_01).unwrap();

        let mut expected = DVector::zeros(a.dim());
        expected[2 * idx_of((1, 1))] = 0.5;
        // (1,−1) is not a representative; its mirror (−1,1) is.
        expected[2 * idx_of((-1, 1))] = -0.5;
        assert_relative_eq!(out, expected, epsilon = 1e-14);
    }

    #[test]
    fn sdiff_bracket_of_single_mode_with_itself_vanishes() {
        let a = make_sdiff_t2(2).unwrap();
        let v = a.basis_vector(0);
        assert!(a.bracket(&v, &v).unwrap().amax() < 1e-15);
    }

    #[test]
    fn sdiff_metric_is_kinetic_energy() {
        // inner(cos(k·x), cos(k·x)) = ½|k|²(2π)².
        let a = make_sdiff_t2(3).unwrap();
        let reps = sdiff_modes(3);
        for (m, &k) in reps.iter().enumerate() {
            let ksq = (k.0 * k.0 + k.1 * k.1) as f64;
            let b = a.basis_vector(2 * m);
            assert_relative_eq!(
                a.inner(&b, &b).unwrap(),
                0.5 * ksq * TWO_PI * TWO_PI,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn truncated_jacobi_holds_inside_cutoff() {
        // Any triple whose pairwise and nested bracket modes stay inside the
        // cutoff satisfies Jacobi exactly; others may fail by truncation.
        let n = 4;
        let a = make_sdiff_t2(n).unwrap();
        let reps = sdiff_modes(n);
        let in_cutoff = |k: (i64, i64)| k.0.abs().max(k.1.abs()) <= n as i64;
        let mut checked = 0;
        // Real basis functions carry ±k, so every sign combination of the
        // pairwise and triple mode sums must stay inside the cutoff.
        let signs = [-1i64, 1i64];
        let combos_ok = |a: (i64, i64), b: (i64, i64)| {
            signs.iter().all(|&s| in_cutoff((a.0 + s * b.0, a.1 + s * b.1)))
        };
        let triple_ok = |a: (i64, i64), b: (i64, i64), c: (i64, i64)| {
            signs.iter().all(|&s| {
                signs
                    .iter()
                    .all(|&t| in_cutoff((a.0 + s * b.0 + t * c.0, a.1 + s * b.1 + t * c.1)))
            })
        };
        for (bi, &ki) in reps.iter().enumerate().take(8) {
            for (bj, &kj) in reps.iter().enumerate().take(8) {
                for (bk, &kk) in reps.iter().enumerate().take(8) {
                    let sums_ok = combos_ok(ki, kj)
                        && combos_ok(kj, kk)
                        && combos_ok(kk, ki)
                        && triple_ok(ki, kj, kk);
                    if !sums_ok {
                        continue;
                    }
                    checked += 1;
                    assert!(
                        a.jacobi_defect(2 * bi, 2 * bj + 1, 2 * bk) < 1e-12,
                        "jacobi failed on modes {ki:?} {kj:?} {kk:?}"
                    );
                }
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn cylinder_moments() {
        let p = inertia_from_shape(&RigidBodySpec::Cylinder { r: 1.0, h: 1.0 }).unwrap();
        assert_relative_eq!(p.m[0], 0.25);
        assert_relative_eq!(p.m[1], 0.25);
        assert_relative_eq!(p.m[2], 1.0 / 12.0);
        // G_i > 0 and triangle-type inequality G₁+G₂ ≥ G₃ and cyclic.
        for i in 0..3 {
            assert!(p.g[i] > 0.0);
            assert!(p.g[(i + 1) % 3] + p.g[(i + 2) % 3] >= p.g[i]);
        }
    }

    #[test]
    fn box_moments_match_midpoint_quadrature() {
        // Oracle: 3D midpoint rule for ∫ x_i² over the box, 10⁶ points.
        let (a, b, c) = (0.7, 1.3, 2.1);
        let p = inertia_from_shape(&RigidBodySpec::Box { a, b, c }).unwrap();
        let n = 1000;
        let sides = [a, b, c];
        for axis in 0..3 {
            let s = sides[axis];
            // The integrand only depends on one coordinate.
            let h = s / n as f64;
            let mut sum = 0.0;
            for i in 0..n {
                let x = -s / 2.0 + (i as f64 + 0.5) * h;
                sum += x * x * h;
            }
            let m_i = sum / s; // per unit mass
            assert!(
                (m_i - p.m[axis]).abs() / p.m[axis] < 1e-4,
                "axis {axis}: {m_i} vs {}",
                p.m[axis]
            );
        }
        // Cube: all moments equal, so the so(3) metric is bi-invariant.
        let q = inertia_from_shape(&RigidBodySpec::Box {
            a: 1.0,
            b: 1.0,
            c: 1.0,
        })
        .unwrap();
        assert_relative_eq!(q.g[0], q.g[1]);
        assert_relative_eq!(q.g[1], q.g[2]);
    }

    #[test]
    fn ball_moments_match_radial_quadrature() {
        // For the ball of radius a: ∫ x₁² dV = (1/3)∫ r² dV = (4π/15) a⁵,
        // volume (4π/3) a³. Oracle: midpoint quadrature of the radial
        // integrals with 10⁶ points.
        let a = 1.7;
        let p = inertia_from_shape(&RigidBodySpec::Ellipsoid { a, b: a, c: a }).unwrap();
        let n = 1_000_000;
        let h = a / n as f64;
        let (mut num, mut vol) = (0.0, 0.0);
        for i in 0..n {
            let r: f64 = (i as f64 + 0.5) * h;
            num += r.powi(4) * h;
            vol += r * r * h;
        }
        let m = num / (3.0 * vol);
        for axis in 0..3 {
            assert!((m - p.m[axis]).abs() / p.m[axis] < 1e-4);
        }
    }

    #[test]
    fn shape_spec_parses_from_json() {
        let spec: RigidBodySpec =
            serde_json::from_str(r#"{"shape":"cylinder","r":1.0,"h":0.5}"#).unwrap();
        let p = inertia_from_shape(&spec).unwrap();
        assert_relative_eq!(p.m[2], 0.25 / 12.0);
        assert!(serde_json::from_str::<RigidBodySpec>(
            r#"{"shape":"cylinder","r":1.0,"h":0.5,"extra":1}"#
        )
        .is_err());
    }

    #[test]
    fn constructors_reject_bad_sizes() {
        assert!(make_vect_s1(0).is_err());
        assert!(make_sdiff_t2(0).is_err());
        assert!(inertia_from_shape(&RigidBodySpec::Cylinder { r: 1.0, h: 0.0 }).is_err());
    }
}
