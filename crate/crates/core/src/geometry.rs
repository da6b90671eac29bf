//! Riemannian base manifold with the shift field δ and lapse-like field β.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::fieldlang::{FieldExpr, Jet};
use crate::tol::{EPS_DOM, MAX_METRIC_CONDITION};

/// Axis-aligned closed box, possibly degenerate along some axes (a segment or a point).
#[derive(Debug, Clone, PartialEq)]
pub struct ExcludedRegion {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl ExcludedRegion {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<ExcludedRegion> {
        if lo.len() != hi.len() {
            return Err(Error::Precondition(format!(
                "excluded region corners have {} and {} coordinates",
                lo.len(),
                hi.len()
            )));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a <= b)) {
            return Err(Error::Precondition(format!(
                "excluded region has lo {lo:?} not below hi {hi:?}"
            )));
        }
        Ok(ExcludedRegion { lo, hi })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.contains_with(x, EPS_DOM)
    }

    pub fn contains_with(&self, x: &[f64], margin: f64) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (lo, hi))| *v >= lo - margin && *v <= hi + margin)
    }

    /// Whether the straight segment from `a` to `b` touches the inflated box (slab test).
    pub fn meets_segment(&self, a: &[f64], b: &[f64], margin: f64) -> bool {
        let mut t0: f64 = 0.0;
        let mut t1: f64 = 1.0;
        for k in 0..a.len() {
            let lo = self.lo[k] - margin;
            let hi = self.hi[k] + margin;
            let dir = b[k] - a[k];
            if dir == 0.0 {
                if a[k] < lo || a[k] > hi {
                    return false;
                }
                continue;
            }
            let (mut ta, mut tb) = ((lo - a[k]) / dir, (hi - a[k]) / dir);
            if ta > tb {
                std::mem::swap(&mut ta, &mut tb);
            }
            t0 = t0.max(ta);
            t1 = t1.min(tb);
            if t0 > t1 {
                return false;
            }
        }
        true
    }

    /// Axes along which the box has positive extent.
    pub fn extent(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Metric {
    Identity,
    /// Row-major d×d entries; only the upper triangle is evaluated.
    Entries(Vec<FieldExpr>),
}

/// Base manifold data: chart dimension, metric, δ, β and excluded regions.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricModel {
    name: String,
    dim: usize,
    metric: Metric,
    delta: FieldExpr,
    beta: FieldExpr,
    excluded: Vec<ExcludedRegion>,
    potential: Option<FieldExpr>,
}

/// Everything the solvers need about the model at one point.
#[derive(Debug, Clone)]
pub struct LocalGeometry {
    pub g: DMatrix<f64>,
    /// `dg[k]` is ∂_k g.
    pub dg: Vec<DMatrix<f64>>,
    pub delta: DVector<f64>,
    /// `ddelta[(i, k)]` is ∂_k δ^i.
    pub ddelta: DMatrix<f64>,
    pub beta: f64,
    pub dbeta: DVector<f64>,
    pub flat: bool,
}

impl LocalGeometry {
    pub fn dim(&self) -> usize {
        self.delta.len()
    }

    /// δ lowered with the metric.
    pub fn omega(&self) -> DVector<f64> {
        if self.flat {
            self.delta.clone()
        } else {
            &self.g * &self.delta
        }
    }

    /// `out[(i, k)] = ∂_k ω_i`.
    pub fn domega(&self) -> DMatrix<f64> {
        if self.flat {
            return self.ddelta.clone();
        }
        let d = self.dim();
        let mut out = &self.g * &self.ddelta;
        for k in 0..d {
            let col = &self.dg[k] * &self.delta;
            for i in 0..d {
                out[(i, k)] += col[i];
            }
        }
        out
    }

    pub fn inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        if self.flat {
            a.dot(b)
        } else {
            a.dot(&(&self.g * b))
        }
    }

    /// Γ(v, v) with upper index, i.e. Σ_jk Γ^i_jk v^j v^k, returned lowered by g:
    /// g Γ(v,v) = Σ_jk [jk,i] v^j v^k with Christoffel symbols of the first kind.
    pub fn lowered_gamma_vv(&self, v: &DVector<f64>) -> DVector<f64> {
        let d = self.dim();
        let mut out = DVector::zeros(d);
        if self.flat {
            return out;
        }
        // [jk,l] = ½(∂_j g_lk + ∂_k g_lj − ∂_l g_jk); contracted with v^j v^k the
        // first two terms coincide.
        let mut dg_v = DMatrix::zeros(d, d); // (l, j) -> Σ_k ∂_j g_lk v^k
        for j in 0..d {
            let col = &self.dg[j] * v;
            for l in 0..d {
                dg_v[(l, j)] = col[l];
            }
        }
        let first = &dg_v * v;
        for l in 0..d {
            let quad = v.dot(&(&self.dg[l] * v));
            out[l] = first[l] - 0.5 * quad;
        }
        out
    }

    /// Lowered curl: `F♭[(i, j)] = ∂_j ω_i − ∂_i ω_j`.
    pub fn curl_lowered(&self) -> DMatrix<f64> {
        let dw = self.domega();
        &dw - dw.transpose()
    }
}

fn point_vec(x: &[f64]) -> Vec<f64> {
    x.to_vec()
}

impl MetricModel {
    /// Model with the identity metric and no excluded regions.
    pub fn new(dim: usize, delta: FieldExpr, beta: FieldExpr) -> Result<MetricModel> {
        if delta.dim() != dim || beta.dim() != dim {
            return Err(Error::Precondition(format!(
                "fields are declared over dimension {} and {}, model has {dim}",
                delta.dim(),
                beta.dim()
            )));
        }
        if delta.arity() != crate::fieldlang::Arity::Vector(dim) {
            return Err(Error::Precondition("delta must be a vector field".into()));
        }
        if beta.arity() != crate::fieldlang::Arity::Scalar {
            return Err(Error::Precondition("beta must be a scalar field".into()));
        }
        Ok(MetricModel {
            name: "custom".into(),
            dim,
            metric: Metric::Identity,
            delta,
            beta,
            excluded: Vec::new(),
            potential: None,
        })
    }

    /// Parse δ and β from source text.
    pub fn from_sources(dim: usize, delta: &str, beta: &str) -> Result<MetricModel> {
        MetricModel::new(dim, FieldExpr::vector(delta, dim)?, FieldExpr::scalar(beta, dim)?)
    }

    pub fn named(mut self, name: impl Into<String>) -> MetricModel {
        self.name = name.into();
        self
    }

    /// Replace the metric by `entries` (row-major, d² scalar fields). The upper
    /// triangle is authoritative; symmetry is checked by `validate`.
    pub fn with_metric(mut self, entries: Vec<FieldExpr>) -> Result<MetricModel> {
        if entries.len() != self.dim * self.dim {
            return Err(Error::Precondition(format!(
                "metric needs {} entries, got {}",
                self.dim * self.dim,
                entries.len()
            )));
        }
        for e in &entries {
            if e.dim() != self.dim || e.arity() != crate::fieldlang::Arity::Scalar {
                return Err(Error::Precondition(format!(
                    "metric entry `{}` is not a scalar field in dimension {}",
                    e.source(),
                    self.dim
                )));
            }
        }
        self.metric = Metric::Entries(entries);
        Ok(self)
    }

    pub fn with_metric_sources(self, entries: &[&str]) -> Result<MetricModel> {
        let dim = self.dim;
        let parsed = entries
            .iter()
            .map(|s| FieldExpr::scalar(s, dim))
            .collect::<Result<Vec<_>, _>>()?;
        self.with_metric(parsed)
    }

    pub fn with_excluded(mut self, region: ExcludedRegion) -> Result<MetricModel> {
        if region.lo.len() != self.dim {
            return Err(Error::Precondition(format!(
                "excluded region has {} coordinates, model dimension is {}",
                region.lo.len(),
                self.dim
            )));
        }
        self.excluded.push(region);
        Ok(self)
    }

    /// Symbolic potential hint Λ with δ = ∇Λ, validated by the obstruction module.
    pub fn with_potential(mut self, potential: FieldExpr) -> MetricModel {
        self.potential = Some(potential);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn delta(&self) -> &FieldExpr {
        &self.delta
    }

    pub fn beta(&self) -> &FieldExpr {
        &self.beta
    }

    pub fn excluded(&self) -> &[ExcludedRegion] {
        &self.excluded
    }

    pub fn potential_hint(&self) -> Option<&FieldExpr> {
        self.potential.as_ref()
    }

    pub fn has_identity_metric(&self) -> bool {
        self.metric == Metric::Identity
    }

    /// Metric entry sources in row-major order (`None` for the identity metric).
    pub fn metric_sources(&self) -> Option<Vec<&str>> {
        match &self.metric {
            Metric::Identity => None,
            Metric::Entries(e) => Some(e.iter().map(FieldExpr::source).collect()),
        }
    }

    /// β is literally zero, so K = ∂_t is lightlike everywhere.
    pub fn is_lightlike(&self) -> bool {
        self.beta.is_literal_zero()
    }

    pub fn in_domain(&self, x: &[f64]) -> bool {
        !self.excluded.iter().any(|r| r.contains(x))
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Precondition(format!(
                "point has {} coordinates, model dimension is {}",
                x.len(),
                self.dim
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition(format!("point {x:?} is not finite")));
        }
        match self.excluded.iter().position(|r| r.contains(x)) {
            Some(region) => Err(Error::Excluded {
                point: point_vec(x),
                region,
            }),
            None => Ok(()),
        }
    }

    /// Whether the straight segment between two points avoids every excluded region.
    pub fn segment_clear(&self, a: &[f64], b: &[f64]) -> bool {
        !self
            .excluded
            .iter()
            .any(|r| r.meets_segment(a, b, EPS_DOM))
    }

    /// Metric matrix at `x`.
    pub fn metric_at(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(x)?;
        let d = self.dim;
        match &self.metric {
            Metric::Identity => Ok(DMatrix::identity(d, d)),
            Metric::Entries(entries) => {
                let mut g = DMatrix::zeros(d, d);
                for i in 0..d {
                    for j in i..d {
                        let v = entries[i * d + j].eval_component(0, x)?;
                        g[(i, j)] = v;
                        g[(j, i)] = v;
                    }
                }
                Ok(g)
            }
        }
    }

    pub fn delta_at(&self, x: &[f64]) -> Result<DVector<f64>> {
        self.check_point(x)?;
        Ok(DVector::from_vec(self.delta.eval(x)?.into_vector()))
    }

    pub fn beta_at(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.beta.eval_component(0, x)?)
    }

    /// ξᵀ g(x) ξ′.
    pub fn inner(&self, x: &[f64], a: &[f64], b: &[f64]) -> Result<f64> {
        let g = self.metric_at(x)?;
        let a = DVector::from_column_slice(a);
        let b = DVector::from_column_slice(b);
        Ok(a.dot(&(g * b)))
    }

    /// Values and first derivatives of all model data at `x`.
    pub fn local(&self, x: &[f64]) -> Result<LocalGeometry> {
        self.check_point(x)?;
        let d = self.dim;
        let (g, dg, flat) = match &self.metric {
            Metric::Identity => (
                DMatrix::identity(d, d),
                vec![DMatrix::zeros(d, d); d],
                true,
            ),
            Metric::Entries(entries) => {
                let mut g = DMatrix::zeros(d, d);
                let mut dg = vec![DMatrix::zeros(d, d); d];
                for i in 0..d {
                    for j in i..d {
                        let jet: Jet = entries[i * d + j].jet_component(0, x)?;
                        g[(i, j)] = jet.value;
                        g[(j, i)] = jet.value;
                        for (k, m) in dg.iter_mut().enumerate() {
                            m[(i, j)] = jet.grad[k];
                            m[(j, i)] = jet.grad[k];
                        }
                    }
                }
                (g, dg, false)
            }
        };
        let djets = self.delta.jets(x)?;
        let delta = DVector::from_iterator(d, djets.iter().map(|j| j.value));
        let ddelta = DMatrix::from_fn(d, d, |i, k| djets[i].grad[k]);
        let bjet = self.beta.jet_component(0, x)?;
        let dbeta = DVector::from_iterator(d, bjet.grad[..d].iter().copied());
        Ok(LocalGeometry {
            g,
            dg,
            delta,
            ddelta,
            beta: bjet.value,
            dbeta,
            flat,
        })
    }

    /// Γ^i_jk at `x`, rejecting ill-conditioned metrics.
    pub fn christoffel(&self, x: &[f64]) -> Result<Christoffel> {
        let local = self.local(x)?;
        let d = self.dim;
        let mut data = vec![0.0; d * d * d];
        if local.flat {
            return Ok(Christoffel { dim: d, data });
        }
        let ginv = checked_inverse(&local.g, x)?;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut s = 0.0;
                    for l in 0..d {
                        let first = local.dg[j][(l, k)] + local.dg[k][(l, j)];
                        s += ginv[(i, l)] * (first - local.dg[l][(j, k)]);
                    }
                    data[(i * d + j) * d + k] = 0.5 * s;
                }
            }
        }
        Ok(Christoffel { dim: d, data })
    }

    /// F(x)[ξ]: the vector with ⟨F[ξ], ξ′⟩ = ⟨δ′ξ, ξ′⟩ − ⟨ξ, δ′ξ′⟩.
    pub fn curl_operator(&self, x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        let local = self.local(x)?;
        let xi = DVector::from_column_slice(xi);
        let lowered = local.curl_lowered() * xi;
        if local.flat {
            return Ok(lowered.iter().copied().collect());
        }
        let ginv = checked_inverse(&local.g, x)?;
        Ok((ginv * lowered).iter().copied().collect())
    }

    /// `lhs − rhs` of every piecewise condition in the model data at `x`.
    pub fn seam_values(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = self.delta.seam_values(x)?;
        out.extend(self.beta.seam_values(x)?);
        if let Metric::Entries(entries) = &self.metric {
            for e in entries {
                out.extend(e.seam_values(x)?);
            }
        }
        Ok(out)
    }

    pub fn has_seams(&self) -> bool {
        self.delta.has_seams()
            || self.beta.has_seams()
            || matches!(&self.metric, Metric::Entries(e) if e.iter().any(FieldExpr::has_seams))
    }

    /// Check the model invariants at the given sample points.
    pub fn validate(&self, samples: &[Vec<f64>]) -> Result<()> {
        for x in samples {
            if !self.in_domain(x) {
                continue;
            }
            if let Metric::Entries(entries) = &self.metric {
                let d = self.dim;
                for i in 0..d {
                    for j in (i + 1)..d {
                        let upper = entries[i * d + j].eval_component(0, x)?;
                        let lower = entries[j * d + i].eval_component(0, x)?;
                        if (upper - lower).abs() > 1e-12 * (1.0 + upper.abs()) {
                            return Err(Error::Precondition(format!(
                                "metric entries ({i},{j}) and ({j},{i}) differ at {x:?}"
                            )));
                        }
                    }
                }
                checked_inverse(&self.metric_at(x)?, x)?;
            }
            let beta = self.beta_at(x)?;
            if beta < 0.0 {
                return Err(Error::DegenerateBeta {
                    point: x.clone(),
                    beta,
                });
            }
            if self.is_lightlike() && self.delta_at(x)?.norm() == 0.0 {
                return Err(Error::VanishingDelta { point: x.clone() });
            }
        }
        Ok(())
    }
}

/// Inverse of a symmetric positive definite matrix, with the conditioning guard.
pub(crate) fn checked_inverse(g: &DMatrix<f64>, x: &[f64]) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(g.clone());
    let min = eig.eigenvalues.min();
    let max = eig.eigenvalues.max();
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if min <= 1e-12 || condition > MAX_METRIC_CONDITION {
        return Err(Error::SingularMetric {
            point: point_vec(x),
            condition,
        });
    }
    g.clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or_else(|| Error::SingularMetric {
            point: point_vec(x),
            condition,
        })
}

/// Christoffel symbols of the second kind at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Γ^i_jk.
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.dim + j) * self.dim + k]
    }

    /// Γ(v, w) = Σ_jk Γ^i_jk v^j w^k.
    pub fn contract(&self, v: &[f64], w: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d)
            .map(|i| {
                let mut s = 0.0;
                for j in 0..d {
                    for k in 0..d {
                        s += self.get(i, j, k) * v[j] * w[k];
                    }
                }
                s
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == 0.0)
    }
}

/// Named builtin models.
pub mod catalog {
    use super::*;

    pub const NAMES: [&str; 4] = ["flat", "stationary-flat", "cos3-wall", "slit-plane"];

    /// Euclidean chart with configurable δ and β.
    pub fn flat(dim: usize, delta: &str, beta: &str) -> Result<MetricModel> {
        Ok(MetricModel::from_sources(dim, delta, beta)?.named("flat"))
    }

    /// Euclidean ℝ^d with δ = e_1 and β = 0: a lightlike Killing field.
    pub fn flat_default(dim: usize) -> Result<MetricModel> {
        let mut comps = vec!["0"; dim];
        comps[0] = "1";
        flat(dim, &format!("[{}]", comps.join(", ")), "0")
    }

    /// Standard static product: δ = 0, β = 1.
    pub fn stationary_flat(dim: usize) -> Result<MetricModel> {
        let zero = vec!["0"; dim].join(", ");
        Ok(MetricModel::from_sources(dim, &format!("[{zero}]"), "1")?.named("stationary-flat"))
    }

    pub const COS3_DELTA: &str = "[piecewise(x1 < pi, -cos(x1)^3, 1), 0, 0]";
    pub const COS3_POTENTIAL: &str = "piecewise(x1 < pi, -(sin(x1) - sin(x1)^3/3), x1 - pi)";

    /// Flat ℝ³, β = 0, with δ = λ(x1) e_1 where λ = −cos³ up to x1 = π and 1 after.
    /// The field is C¹ across the seam and vanishes on the plane x1 = π/2.
    pub fn cos3_wall() -> Result<MetricModel> {
        let model = MetricModel::from_sources(3, COS3_DELTA, "0")?.named("cos3-wall");
        Ok(model.with_potential(FieldExpr::scalar(COS3_POTENTIAL, 3)?))
    }

    /// Squared distance to the segment [−1, 1] × {0}.
    pub const SLIT_DISTANCE: &str =
        "piecewise(x1 < -1, (x1+1)^2 + x2^2, piecewise(x1 > 1, (x1-1)^2 + x2^2, x2^2))";

    /// Flat plane minus the slit [−1, 1] × {0}, β = 0, δ = λ e_1 with
    /// λ = D/√(1+D) positive off the slit and vanishing on it.
    pub fn slit_plane() -> Result<MetricModel> {
        let d = SLIT_DISTANCE;
        let delta = format!("[({d}) / sqrt(1 + ({d})), 0]");
        MetricModel::from_sources(2, &delta, "0")?
            .named("slit-plane")
            .with_excluded(ExcludedRegion::new(vec![-1.0, 0.0], vec![1.0, 0.0])?)
    }

    /// Look up a builtin by name. `dim` only applies to the flat families.
    pub fn by_name(name: &str, dim: Option<usize>) -> Result<MetricModel> {
        match name {
            "flat" => flat_default(dim.unwrap_or(2)),
            "stationary-flat" => stationary_flat(dim.unwrap_or(2)),
            "cos3-wall" => cos3_wall(),
            "slit-plane" => slit_plane(),
            other => Err(Error::Precondition(format!(
                "unknown builtin model `{other}` (known: {})",
                NAMES.join(", ")
            ))),
        }
    }
}
