//! Metric Lie algebras: brackets, the deformation operator, the Levi-Civita
//! covariant derivative at the identity, geodesic right-hand sides, and the
//! curvature biquadratic with its polarization to the full Riemann tensor.
//!
//! An algebra is a finite-dimensional anticommutative algebra given by sparse
//! structure constants together with a positive-definite inner product. The
//! Jacobi identity is required for exact algebras but deliberately not for
//! Galerkin truncations of infinite-dimensional algebras.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::error::{Error, Result};

/// Coefficient vector in an algebra's basis.
pub type AlgebraVector = DVector<f64>;

/// Relative tolerance for rejecting a metric as not positive definite.
const PIVOT_TOL: f64 = 1e-12;
/// Relative tolerance below which a plane counts as degenerate.
const PLANE_TOL: f64 = 1e-12;

/// A finite-dimensional Lie (or truncated) algebra with an inner product.
///
/// Structure constants are stored as a full antisymmetric table: every
/// non-zero `c^k_ij` appears together with its mirror `c^k_ji = -c^k_ij`.
#[derive(Debug, Clone)]
pub struct MetricLieAlgebra {
    dim: usize,
    /// Flat structure table, entries (i, j, k, c) meaning [e_i, e_j] ∋ c e_k.
    entries: Vec<(usize, usize, usize, f64)>,
    /// Lookup by generator pair, for basis-level bracket queries.
    by_pair: HashMap<(usize, usize), Vec<(usize, f64)>>,
    metric: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    label: String,
    jacobi_exact: bool,
}

impl MetricLieAlgebra {
    /// Builds an algebra from a full structure table.
    ///
    /// `entries` must contain both orientations of every non-zero constant;
    /// duplicates for the same (i, j, k) are accumulated. The metric must be
    /// symmetric positive definite.
    pub fn new(
        dim: usize,
        entries: &[(usize, usize, usize, f64)],
        metric: DMatrix<f64>,
        label: impl Into<String>,
        jacobi_exact: bool,
    ) -> Result<Self> {
        if metric.nrows() != dim || metric.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: metric.nrows(),
            });
        }
        let sym_err = (&metric - metric.transpose()).amax();
        if sym_err > 1e-12 * metric.amax().max(1.0) {
            return Err(Error::MetricNotPositiveDefinite(format!(
                "asymmetry {sym_err:e}"
            )));
        }

        let mut by_pair: HashMap<(usize, usize), HashMap<usize, f64>> = HashMap::new();
        for &(i, j, k, c) in entries {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: i.max(j).max(k) + 1,
                });
            }
            if c == 0.0 {
                continue;
            }
            *by_pair.entry((i, j)).or_default().entry(k).or_insert(0.0) += c;
        }
        // Antisymmetry scan over the accumulated table.
        let scale: f64 = by_pair
            .values()
            .flat_map(|m| m.values())
            .fold(0.0f64, |a, &c| a.max(c.abs()))
            .max(1.0);
        for (&(i, j), outs) in &by_pair {
            for (&k, &c) in outs {
                let mirror = by_pair
                    .get(&(j, i))
                    .and_then(|m| m.get(&k))
                    .copied()
                    .unwrap_or(0.0);
                if (c + mirror).abs() > 1e-12 * scale {
                    return Err(Error::AntisymmetryViolation { i, j, k });
                }
            }
        }

        let chol = Cholesky::new(metric.clone()).ok_or_else(|| {
            Error::MetricNotPositiveDefinite("Cholesky factorization failed".into())
        })?;
        let max_diag = (0..dim).fold(0.0f64, |a, i| a.max(metric[(i, i)]));
        for i in 0..dim {
            let pivot = chol.l()[(i, i)].powi(2);
            if pivot < PIVOT_TOL * max_diag {
                return Err(Error::MetricNotPositiveDefinite(format!(
                    "pivot {pivot:e} below tolerance at index {i}"
                )));
            }
        }

        let mut flat = Vec::new();
        let mut pair_lists: HashMap<(usize, usize), Vec<(usize, f64)>> = HashMap::new();
        let mut keys: Vec<_> = by_pair.keys().copied().collect();
        keys.sort_unstable();
        for key in keys {
            let outs = &by_pair[&key];
            let mut list: Vec<_> = outs.iter().map(|(&k, &c)| (k, c)).collect();
            list.sort_unstable_by_key(|&(k, _)| k);
            list.retain(|&(_, c)| c != 0.0);
            for &(k, c) in &list {
                flat.push((key.0, key.1, k, c));
            }
            if !list.is_empty() {
                pair_lists.insert(key, list);
            }
        }

        Ok(Self {
            dim,
            entries: flat,
            by_pair: pair_lists,
            metric,
            chol,
            label: label.into(),
            jacobi_exact,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn jacobi_exact(&self) -> bool {
        self.jacobi_exact
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.metric
    }

    /// Structure table as flat (i, j, k, c) records.
    pub fn structure_entries(&self) -> &[(usize, usize, usize, f64)] {
        &self.entries
    }

    /// Bracket of two basis generators, as sparse (k, c) output.
    pub fn bracket_basis(&self, i: usize, j: usize) -> &[(usize, f64)] {
        self.by_pair.get(&(i, j)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn basis_vector(&self, i: usize) -> AlgebraVector {
        let mut v = DVector::zeros(self.dim);
        v[i] = 1.0;
        v
    }

    fn check_dim(&self, v: &AlgebraVector) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Lie bracket [u, v].
    pub fn bracket(&self, u: &AlgebraVector, v: &AlgebraVector) -> Result<AlgebraVector> {
        self.check_dim(u)?;
        self.check_dim(v)?;
        let mut out = DVector::zeros(self.dim);
        for &(i, j, k, c) in &self.entries {
            out[k] += c * u[i] * v[j];
        }
        Ok(out)
    }

    /// Inner product G(u, v).
    pub fn inner(&self, u: &AlgebraVector, v: &AlgebraVector) -> Result<f64> {
        self.check_dim(u)?;
        self.check_dim(v)?;
        Ok((u.transpose() * &self.metric * v)[(0, 0)])
    }

    /// G-norm squared.
    pub fn norm_sq(&self, u: &AlgebraVector) -> Result<f64> {
        self.inner(u, u)
    }

    /// Applies ad_u, i.e. x -> [u, x].
    fn ad(&self, u: &AlgebraVector, x: &AlgebraVector) -> AlgebraVector {
        let mut out = DVector::zeros(self.dim);
        for &(i, j, k, c) in &self.entries {
            out[k] += c * u[i] * x[j];
        }
        out
    }

    /// Applies ad_u^T (plain matrix transpose, no metric).
    fn ad_transpose(&self, u: &AlgebraVector, y: &AlgebraVector) -> AlgebraVector {
        let mut out = DVector::zeros(self.dim);
        for &(i, j, k, c) in &self.entries {
            out[j] += c * u[i] * y[k];
        }
        out
    }

    /// Deformation operator ũv, defined by
    /// G(ũv, w) = G([u,v], w) + G(v, [u,w]) for all w.
    ///
    /// Matrix form: ũv = ad_u v + G⁻¹ ad_uᵀ G v, reusing the Cholesky
    /// factorization computed at construction.
    pub fn deformation(&self, u: &AlgebraVector, v: &AlgebraVector) -> Result<AlgebraVector> {
        self.check_dim(u)?;
        self.check_dim(v)?;
        let gv = &self.metric * v;
        let mut rhs = self.ad_transpose(u, &gv);
        self.chol.solve_mut(&mut rhs);
        Ok(self.ad(u, v) + rhs)
    }

    /// Levi-Civita covariant derivative at the identity:
    /// D_u v = ½([u,v] − ũv − ṽu).
    pub fn covariant_derivative(
        &self,
        u: &AlgebraVector,
        v: &AlgebraVector,
    ) -> Result<AlgebraVector> {
        let br = self.bracket(u, v)?;
        let uv = self.deformation(u, v)?;
        let vu = self.deformation(v, u)?;
        Ok((br - uv - vu) * 0.5)
    }

    /// Geodesic right-hand side dv/dt = −D_v v = ṽv.
    pub fn geodesic_rhs(&self, v: &AlgebraVector) -> Result<AlgebraVector> {
        self.deformation(v, v)
    }

    /// Curvature biquadratic
    /// R(u,v) = ¼|[u,v] + ṽu − ũv|² + G(ũv, ṽu) − G(ũu, ṽv).
    pub fn curvature_biquadratic(&self, u: &AlgebraVector, v: &AlgebraVector) -> Result<f64> {
        let br = self.bracket(u, v)?;
        let uv = self.deformation(u, v)?;
        let vu = self.deformation(v, u)?;
        let uu = self.deformation(u, u)?;
        let vv = self.deformation(v, v)?;
        let w = br + &vu - &uv;
        Ok(0.25 * self.inner(&w, &w)? + self.inner(&uv, &vu)? - self.inner(&uu, &vv)?)
    }

    /// Sectional curvature K = R(u,v) / (G(u,u)G(v,v) − G(u,v)²).
    pub fn sectional_curvature(&self, u: &AlgebraVector, v: &AlgebraVector) -> Result<f64> {
        let guu = self.inner(u, u)?;
        let gvv = self.inner(v, v)?;
        let guv = self.inner(u, v)?;
        let gram = guu * gvv - guv * guv;
        if gram <= PLANE_TOL * guu * gvv {
            return Err(Error::DegeneratePlane { gram });
        }
        Ok(self.curvature_biquadratic(u, v)? / gram)
    }

    /// Full Riemann tensor r(u,v,w,x) by polarization of the biquadratic.
    ///
    /// The mixed ∂²/∂s∂t at the origin of a biquadratic is extracted by the
    /// exact 4-point stencil [f(1,1) − f(1,−1) − f(−1,1) + f(−1,−1)]/4: only
    /// the s·t monomial survives, so there is no truncation error.
    pub fn riemann_polarize(
        &self,
        u: &AlgebraVector,
        v: &AlgebraVector,
        w: &AlgebraVector,
        x: &AlgebraVector,
    ) -> Result<f64> {
        let stencil = |p: &AlgebraVector, q: &AlgebraVector| -> Result<f64> {
            let f = |s: f64, t: f64| self.curvature_biquadratic(&(u + p * s), &(v + q * t));
            Ok((f(1.0, 1.0)? - f(1.0, -1.0)? - f(-1.0, 1.0)? + f(-1.0, -1.0)?) / 4.0)
        };
        Ok((stencil(w, x)? - stencil(x, w)?) / 6.0)
    }

    /// G-orthonormal basis built by modified Gram-Schmidt on the standard basis.
    pub fn orthonormal_basis(&self) -> Vec<AlgebraVector> {
        let mut basis: Vec<AlgebraVector> = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let mut f = self.basis_vector(i);
            for b in &basis {
                let proj = self.inner(&f, b).unwrap();
                f -= b * proj;
            }
            let norm = self.norm_sq(&f).unwrap().sqrt();
            basis.push(f / norm);
        }
        basis
    }

    /// Ricci quadratic r(u) = Σ_i R(u, f_i) over a G-orthonormal basis.
    pub fn ricci_quadratic(&self, u: &AlgebraVector) -> Result<f64> {
        self.check_dim(u)?;
        let mut total = 0.0;
        for f in self.orthonormal_basis() {
            total += self.curvature_biquadratic(u, &f)?;
        }
        Ok(total)
    }

    /// Solves G x = y with the cached factorization.
    pub fn metric_solve(&self, y: &AlgebraVector) -> AlgebraVector {
        let mut x = y.clone();
        self.chol.solve_mut(&mut x);
        x
    }

    /// Residual of the Jacobi identity on the basis triple (i, j, k).
    pub fn jacobi_defect(&self, i: usize, j: usize, k: usize) -> f64 {
        let (ei, ej, ek) = (
            self.basis_vector(i),
            self.basis_vector(j),
            self.basis_vector(k),
        );
        let t1 = self
            .bracket(&self.bracket(&ei, &ej).unwrap(), &ek)
            .unwrap();
        let t2 = self
            .bracket(&self.bracket(&ej, &ek).unwrap(), &ei)
            .unwrap();
        let t3 = self
            .bracket(&self.bracket(&ek, &ei).unwrap(), &ej)
            .unwrap();
        (t1 + t2 + t3).amax()
    }

    /// True when the deformation operator ũ vanishes on the whole basis,
    /// i.e. u is a Killing direction of the metric.
    pub fn is_killing(&self, u: &AlgebraVector, tol: f64) -> Result<bool> {
        for i in 0..self.dim {
            let e = self.basis_vector(i);
            if self.deformation(u, &e)?.amax() > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Serializes to the golden-file JSON document.
    pub fn to_json(&self) -> serde_json::Value {
        let doc = AlgebraDocument {
            dim: self.dim,
            structure: self.entries.iter().map(|&(i, j, k, c)| (i, j, k, c)).collect(),
            metric: self.metric.transpose().as_slice().to_vec(),
            label: self.label.clone(),
            jacobi_exact: self.jacobi_exact,
        };
        serde_json::to_value(doc).expect("algebra document serializes")
    }

    /// Reads an algebra from the golden-file JSON document.
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let doc: AlgebraDocument = serde_json::from_value(value.clone())?;
        if doc.metric.len() != doc.dim * doc.dim {
            return Err(Error::DimensionMismatch {
                expected: doc.dim * doc.dim,
                got: doc.metric.len(),
            });
        }
        let metric = DMatrix::from_row_slice(doc.dim, doc.dim, &doc.metric);
        Self::new(doc.dim, &doc.structure, metric, doc.label, doc.jacobi_exact)
    }
}

/// On-disk schema: {dim, structure: [[i,j,k,c]...], metric: row-major, label, jacobi_exact}.
#[derive(Serialize, Deserialize)]
struct AlgebraDocument {
    dim: usize,
    structure: Vec<(usize, usize, usize, f64)>,
    metric: Vec<f64>,
    label: String,
    jacobi_exact: bool,
}

/// Curvature of one plane, for reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlaneCurvature {
    pub plane: String,
    pub i: usize,
    pub j: usize,
    pub biquadratic: f64,
    pub sectional: f64,
}

/// Sectional curvatures over a set of basis planes with a sign summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub label: String,
    pub dim: usize,
    pub planes: Vec<PlaneCurvature>,
    pub min_sectional: f64,
    pub max_sectional: f64,
    pub negative_planes: usize,
    pub positive_planes: usize,
    pub zero_planes: usize,
}

impl CurvatureReport {
    /// Evaluates the biquadratic and sectional curvature on basis-vector
    /// planes (e_i, e_j), i < j < max_basis.
    pub fn for_basis_planes(a: &MetricLieAlgebra, max_basis: usize) -> Result<Self> {
        let n = a.dim().min(max_basis);
        let mut planes = Vec::new();
        let (mut min_k, mut max_k) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut neg, mut pos, mut zero) = (0usize, 0usize, 0usize);
        for i in 0..n {
            for j in (i + 1)..n {
                let (ei, ej) = (a.basis_vector(i), a.basis_vector(j));
                let r = a.curvature_biquadratic(&ei, &ej)?;
                let k = a.sectional_curvature(&ei, &ej)?;
                min_k = min_k.min(k);
                max_k = max_k.max(k);
                if k < -1e-12 {
                    neg += 1;
                } else if k > 1e-12 {
                    pos += 1;
                } else {
                    zero += 1;
                }
                planes.push(PlaneCurvature {
                    plane: format!("e{i}^e{j}"),
                    i,
                    j,
                    biquadratic: r,
                    sectional: k,
                });
            }
        }
        Ok(Self {
            label: a.label().to_string(),
            dim: a.dim(),
            planes,
            min_sectional: min_k,
            max_sectional: max_k,
            negative_planes: neg,
            positive_planes: pos,
            zero_planes: zero,
        })
    }
}
