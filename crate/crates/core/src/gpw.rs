//! Generalized plane waves: M × ℝ² with metric ⟨ξ,ξ′⟩ + a b′ + a′ b + H(x,u) a a′
//! for tangent vectors (ξ, a, b) in the coordinates (x, u, v).
//!
//! ∂_v is a lightlike Killing field with ⟨γ̇, ∂_v⟩ = u̇, so u is affine along
//! every geodesic. With u̇ = Δu fixed the x-part solves
//!
//!   D_s ẋ = ½ Δu² ∇ₓH(x, u(s)),
//!
//! and the u-equation d/ds(v̇ + H u̇) = ½ ∂_uH u̇² determines v by quadrature,
//! up to one constant fixed by v(1) = v_q. Solutions are checked against the
//! Euler–Lagrange equations of the full metric, not the reduced ones.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::DiscretePath;
use crate::connect::{classify_pairing, ConditionII, ConnectVerdict, Diagnostics};
use crate::error::{Error, Result};
use crate::fieldlang::FieldExpr;
use crate::geometry::{checked_inverse, MetricModel};
use crate::tol;

#[derive(Debug, Clone)]
pub struct GpwModel {
    /// Riemannian factor (M, ⟨·,·⟩); its δ and β are ignored.
    pub base: MetricModel,
    /// Profile H(x, u); `u` is the variable after x1..xd.
    pub profile: FieldExpr,
}

/// A point (x, u, v).
#[derive(Debug, Clone, PartialEq)]
pub struct GpwPoint {
    pub x: Vec<f64>,
    pub u: f64,
    pub v: f64,
}

impl GpwPoint {
    pub fn new(x: Vec<f64>, u: f64, v: f64) -> GpwPoint {
        GpwPoint { x, u, v }
    }
}

/// A tangent vector (ξ, a, b) = ξ + a ∂_u + b ∂_v.
#[derive(Debug, Clone, PartialEq)]
pub struct GpwVector {
    pub xi: Vec<f64>,
    pub a: f64,
    pub b: f64,
}

impl GpwModel {
    pub fn new(base: MetricModel, profile: FieldExpr) -> Result<GpwModel> {
        if profile.dim() != base.dim() {
            return Err(Error::Precondition(format!(
                "profile is declared over {} coordinates, the base has {}",
                profile.dim(),
                base.dim()
            )));
        }
        let model = GpwModel { base, profile };
        let d = model.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(0x6e77);
        let nonzero = (0..64).any(|_| {
            let y: Vec<f64> = (0..=d).map(|_| rng.gen_range(-3.0..3.0)).collect();
            model.profile.eval_component(0, &y).is_ok_and(|h| h != 0.0)
        });
        if !nonzero {
            return Err(Error::Precondition("the profile H vanishes on every sample".into()));
        }
        Ok(model)
    }

    /// Euclidean factor of dimension `dim` with the given profile source.
    pub fn flat(dim: usize, profile: &str) -> Result<GpwModel> {
        let zero = vec!["0"; dim].join(", ");
        let base = MetricModel::from_sources(dim, &format!("[{zero}]"), "0")?.named("gpw");
        GpwModel::new(base, FieldExpr::scalar(profile, dim)?)
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    fn h_at(&self, x: &[f64], u: f64) -> Result<f64> {
        let y: Vec<f64> = x.iter().copied().chain([u]).collect();
        Ok(self.profile.eval_component(0, &y)?)
    }

    /// H and its gradient in (x, u).
    fn h_jet(&self, x: &[f64], u: f64) -> Result<(f64, Vec<f64>)> {
        let y: Vec<f64> = x.iter().copied().chain([u]).collect();
        let jet = self.profile.jet_component(0, &y)?;
        Ok((jet.value, jet.grad[..=self.dim()].to_vec()))
    }

    /// Full (d+2)-metric and its coordinate derivatives at (x, u).
    fn full_metric(&self, x: &[f64], u: f64) -> Result<(DMatrix<f64>, Vec<DMatrix<f64>>)> {
        let d = self.dim();
        let n = d + 2;
        let local = self.base.local(x)?;
        let (h, dh) = self.h_jet(x, u)?;
        let mut g = DMatrix::zeros(n, n);
        g.view_mut((0, 0), (d, d)).copy_from(&local.g);
        g[(d, d + 1)] = 1.0;
        g[(d + 1, d)] = 1.0;
        g[(d, d)] = h;
        let mut dg = vec![DMatrix::zeros(n, n); n];
        for l in 0..d {
            dg[l].view_mut((0, 0), (d, d)).copy_from(&local.dg[l]);
        }
        for (l, v) in dh.iter().enumerate() {
            dg[l][(d, d)] = *v;
        }
        Ok((g, dg))
    }
}

pub fn gpw_inner(model: &GpwModel, p: &GpwPoint, z: &GpwVector, w: &GpwVector) -> Result<f64> {
    let h = model.h_at(&p.x, p.u)?;
    Ok(model.base.inner(&p.x, &z.xi, &w.xi)? + z.a * w.b + w.a * z.b + h * z.a * w.a)
}

/// The curve φ(s) = (x(s), u_p + Δu s, v_p + Δv s) over a given x-path.
#[derive(Debug, Clone)]
pub struct WitnessCurve {
    pub x: DiscretePath,
    pub p: GpwPoint,
    pub q: GpwPoint,
}

impl WitnessCurve {
    fn du(&self) -> f64 {
        self.q.u - self.p.u
    }

    fn point(&self, s: f64, x: Vec<f64>) -> GpwPoint {
        GpwPoint {
            x,
            u: self.p.u + s * self.du(),
            v: self.p.v + s * (self.q.v - self.p.v),
        }
    }

    fn velocity(&self, i: usize) -> GpwVector {
        GpwVector {
            xi: self.x.velocity(i).iter().copied().collect(),
            a: self.du(),
            b: self.q.v - self.p.v,
        }
    }

    /// ⟨φ̇, ∂_v⟩ per segment.
    pub fn pairings(&self, model: &GpwModel) -> Result<Vec<f64>> {
        let d = model.dim();
        let killing = GpwVector {
            xi: vec![0.0; d],
            a: 0.0,
            b: 1.0,
        };
        (0..self.x.segments())
            .map(|i| {
                let s = (i as f64 + 0.5) * self.x.h();
                let p = self.point(s, self.x.midpoint(i));
                gpw_inner(model, &p, &self.velocity(i), &killing)
            })
            .collect()
    }

    /// ⟨φ̇, φ̇⟩ per segment.
    pub fn norms(&self, model: &GpwModel) -> Result<Vec<f64>> {
        (0..self.x.segments())
            .map(|i| {
                let s = (i as f64 + 0.5) * self.x.h();
                let p = self.point(s, self.x.midpoint(i));
                let v = self.velocity(i);
                gpw_inner(model, &p, &v, &v)
            })
            .collect()
    }

    pub fn condition_ii(&self, model: &GpwModel) -> Result<ConditionII> {
        Ok(classify_pairing(&self.pairings(model)?))
    }
}

pub fn witness_curve(p: &GpwPoint, q: &GpwPoint, x_path: DiscretePath) -> Result<WitnessCurve> {
    if x_path.start() != p.x.as_slice() || x_path.end() != q.x.as_slice() {
        return Err(Error::Precondition("x-path does not join the endpoints' x-parts".into()));
    }
    Ok(WitnessCurve {
        x: x_path,
        p: p.clone(),
        q: q.clone(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpwSample {
    pub s: f64,
    pub point: GpwPoint,
    pub velocity: GpwVector,
}

#[derive(Debug, Clone)]
pub struct GpwGeodesic {
    pub samples: Vec<GpwSample>,
    pub energy: f64,
    pub energy_drift: f64,
    /// ⟨γ̇, ∂_v⟩ = u̇ and its largest deviation along the curve.
    pub killing: f64,
    pub killing_drift: f64,
    pub endpoint_error: f64,
    /// Max-norm of the full geodesic equations on the samples.
    pub residual: f64,
    pub condition_ii: ConditionII,
    pub jacobian_condition: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct GpwOptions {
    pub tol_bvp: f64,
    pub max_iter: usize,
    pub step: f64,
}

impl Default for GpwOptions {
    fn default() -> Self {
        GpwOptions {
            tol_bvp: tol::TOL_BVP,
            max_iter: 100,
            step: tol::H_ODE,
        }
    }
}

/// Augmented state (x, ẋ, W, Y) with W′ = ½Δu²∂_uH, Y′ = W − HΔu, so that
/// v(s) = v_p + w₀ s + Y(s) for a constant w₀.
struct Reduced<'a> {
    model: &'a GpwModel,
    up: f64,
    du: f64,
}

impl Reduced<'_> {
    fn rhs(&self, s: f64, y: &[f64]) -> Result<Vec<f64>> {
        let d = self.model.dim();
        let (x, xdot) = (&y[..d], DVector::from_column_slice(&y[d..2 * d]));
        let u = self.up + s * self.du;
        let local = self.model.base.local(x)?;
        let (h, dh) = self.model.h_jet(x, u)?;
        let force = DVector::from_iterator(d, (0..d).map(|k| 0.5 * self.du * self.du * dh[k]));
        let rhs = force - local.lowered_gamma_vv(&xdot);
        let xdd = if local.flat {
            rhs
        } else {
            checked_inverse(&local.g, x)? * rhs
        };
        let mut out = Vec::with_capacity(2 * d + 2);
        out.extend(xdot.iter());
        out.extend(xdd.iter());
        out.push(0.5 * self.du * self.du * dh[d]);
        out.push(y[2 * d] - h * self.du);
        Ok(out)
    }

    fn integrate(&self, x0: &[f64], v0: &[f64], step: f64) -> Result<Vec<(f64, Vec<f64>)>> {
        let steps = (1.0 / step).round().max(1.0) as usize;
        let h = 1.0 / steps as f64;
        let mut y: Vec<f64> = x0.iter().chain(v0).copied().chain([0.0, 0.0]).collect();
        let mut out = Vec::with_capacity(steps + 1);
        out.push((0.0, y.clone()));
        let axpy = |y: &[f64], k: &[f64], c: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + c * b).collect() };
        for i in 0..steps {
            let s = i as f64 * h;
            let k1 = self.rhs(s, &y)?;
            let k2 = self.rhs(s + 0.5 * h, &axpy(&y, &k1, 0.5 * h))?;
            let k3 = self.rhs(s + 0.5 * h, &axpy(&y, &k2, 0.5 * h))?;
            let k4 = self.rhs(s + h, &axpy(&y, &k3, h))?;
            for j in 0..y.len() {
                y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
            if y.iter().any(|v| !v.is_finite()) {
                return Err(Error::DomainExit {
                    s: s + h,
                    reason: "solution blew up".into(),
                });
            }
            self.model.base.check_point(&y[..self.model.dim()]).map_err(|e| Error::DomainExit {
                s: s + h,
                reason: e.to_string(),
            })?;
            out.push(((i + 1) as f64 * h, y.clone()));
        }
        Ok(out)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Assemble the full curve from the reduced integration and check it.
fn assemble(model: &GpwModel, p: &GpwPoint, q: &GpwPoint, run: &[(f64, Vec<f64>)]) -> Result<GpwGeodesic> {
    let d = model.dim();
    let du = q.u - p.u;
    let last = &run[run.len() - 1].1;
    let w0 = q.v - p.v - last[2 * d + 1];
    let mut samples = Vec::with_capacity(run.len());
    for (s, y) in run {
        let u = p.u + s * du;
        let h = model.h_at(&y[..d], u)?;
        samples.push(GpwSample {
            s: *s,
            point: GpwPoint {
                x: y[..d].to_vec(),
                u,
                v: p.v + w0 * s + y[2 * d + 1],
            },
            velocity: GpwVector {
                xi: y[d..2 * d].to_vec(),
                a: du,
                b: w0 + y[2 * d] - h * du,
            },
        });
    }
    let killing_vec = GpwVector {
        xi: vec![0.0; d],
        a: 0.0,
        b: 1.0,
    };
    let mut energies = Vec::with_capacity(samples.len());
    let mut pairings = Vec::with_capacity(samples.len());
    for smp in &samples {
        energies.push(gpw_inner(model, &smp.point, &smp.velocity, &smp.velocity)?);
        pairings.push(gpw_inner(model, &smp.point, &smp.velocity, &killing_vec)?);
    }
    let drift = |v: &[f64]| v.iter().map(|e| (e - v[0]).abs()).fold(0.0, f64::max);
    let end = &samples[samples.len() - 1].point;
    let endpoint_error = norm(
        &end.x
            .iter()
            .zip(&q.x)
            .map(|(a, b)| a - b)
            .chain([end.u - q.u, end.v - q.v])
            .collect::<Vec<_>>(),
    );
    Ok(GpwGeodesic {
        energy: energies[0],
        energy_drift: drift(&energies),
        killing: pairings[0],
        killing_drift: drift(&pairings),
        endpoint_error,
        residual: full_residual(model, &samples)?,
        condition_ii: classify_pairing(&pairings),
        jacobian_condition: f64::NAN,
        iterations: 0,
        samples,
    })
}

/// Max-norm of the lowered geodesic equations G ÿ + (∂_i G_kj − ½ ∂_k G_ij) ẏⁱ ẏʲ
/// of the full metric. Velocities come from the integrator; accelerations from
/// fourth-order centered differences of those velocities.
pub fn full_residual(model: &GpwModel, samples: &[GpwSample]) -> Result<f64> {
    let d = model.dim();
    let n = d + 2;
    let len = samples.len();
    if len < 5 {
        return Err(Error::Precondition("residual needs at least five samples".into()));
    }
    let h = samples[1].s - samples[0].s;
    let vel = |i: usize| -> DVector<f64> {
        let v = &samples[i].velocity;
        DVector::from_iterator(n, v.xi.iter().copied().chain([v.a, v.b]))
    };
    let mut worst: f64 = 0.0;
    for i in 2..len - 2 {
        let acc = (vel(i - 2) - vel(i - 1) * 8.0 + vel(i + 1) * 8.0 - vel(i + 2)) / (12.0 * h);
        let yd = vel(i);
        let pt = &samples[i].point;
        let (g, dg) = model.full_metric(&pt.x, pt.u)?;
        let mut eq = &g * &acc;
        for k in 0..n {
            let mut c = 0.0;
            for (l, dgl) in dg.iter().enumerate() {
                // Σ_j ∂_l G_kj ẏ^l ẏ^j
                c += yd[l] * (dgl.row(k) * &yd)[0];
            }
            c -= 0.5 * yd.dot(&(&dg[k] * &yd));
            eq[k] += c;
        }
        worst = worst.max(eq.amax());
    }
    Ok(worst)
}

/// Condition number and smallest singular value of the shooting Jacobian.
fn jacobian_spectrum(jac: &DMatrix<f64>) -> (f64, f64) {
    let sv = jac.clone().singular_values();
    let (max, min) = (sv.max(), sv.min());
    (if min == 0.0 { f64::INFINITY } else { max / min }, min)
}

/// Connect p to q by a geodesic of the plane wave, via the reduced equations.
pub fn gpw_connect(model: &GpwModel, p: &GpwPoint, q: &GpwPoint, opts: GpwOptions) -> Result<ConnectVerdict<GpwGeodesic>> {
    model.base.check_point(&p.x)?;
    model.base.check_point(&q.x)?;
    let d = model.dim();
    let reduced = Reduced {
        model,
        up: p.u,
        du: q.u - p.u,
    };
    let miss = |v0: &[f64]| -> Result<Vec<f64>> {
        let run = reduced.integrate(&p.x, v0, opts.step)?;
        let end = &run[run.len() - 1].1;
        Ok(end[..d].iter().zip(&q.x).map(|(a, b)| a - b).collect())
    };
    let mut v0: Vec<f64> = q.x.iter().zip(&p.x).map(|(a, b)| a - b).collect();
    let mut diagnostics = Diagnostics::default();
    let mut r = match miss(&v0) {
        Ok(r) => r,
        Err(e) => {
            diagnostics.reason = format!("initial shot failed: {e}");
            return Ok(ConnectVerdict::Inconclusive(diagnostics));
        }
    };
    let mut condition = f64::NAN;
    let mut iterations = 0;
    while norm(&r) > opts.tol_bvp && iterations < opts.max_iter {
        iterations += 1;
        let mut jac = DMatrix::zeros(d, d);
        for j in 0..d {
            let eps = 1e-6 * (1.0 + v0[j].abs());
            let mut up = v0.clone();
            let mut dn = v0.clone();
            up[j] += eps;
            dn[j] -= eps;
            let (rp, rm) = (miss(&up)?, miss(&dn)?);
            for i in 0..d {
                jac[(i, j)] = (rp[i] - rm[i]) / (2.0 * eps);
            }
        }
        let (cond, smallest) = jacobian_spectrum(&jac);
        condition = cond;
        // The Jacobian is the identity without forcing; a tiny singular value
        // (even with a benign ratio) means x_q is conjugate to x_p.
        if !(cond < 1e12) || smallest < 1e-7 {
            diagnostics.reason = format!(
                "shooting Jacobian is singular (smallest singular value {smallest:e}, condition number {cond:e}); the endpoints are conjugate or nearly so"
            );
            return Ok(ConnectVerdict::Inconclusive(diagnostics));
        }
        let step = jac.lu().solve(&DVector::from_column_slice(&r)).expect("nonsingular by the condition check");
        let current = norm(&r);
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<f64> = v0.iter().zip(step.iter()).map(|(a, s)| a - lambda * s).collect();
            if let Ok(rt) = miss(&trial) {
                if norm(&rt) < current {
                    v0 = trial;
                    r = rt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            diagnostics.reason = format!(
                "shooting stagnated at endpoint error {current:e} (Jacobian condition number {condition:e})"
            );
            return Ok(ConnectVerdict::Inconclusive(diagnostics));
        }
    }
    if norm(&r) > opts.tol_bvp {
        diagnostics.reason = format!(
            "no convergence in {} iterations (endpoint error {:e}, Jacobian condition number {condition:e})",
            opts.max_iter,
            norm(&r)
        );
        return Ok(ConnectVerdict::Inconclusive(diagnostics));
    }
    let run = reduced.integrate(&p.x, &v0, opts.step)?;
    let mut geo = assemble(model, p, q, &run)?;
    geo.jacobian_condition = condition;
    geo.iterations = iterations;
    let failures: Vec<String> = [
        (geo.endpoint_error > opts.tol_bvp, format!("endpoint error {:e}", geo.endpoint_error)),
        (
            geo.residual > tol::TOL_LIMIT_RESIDUAL,
            format!("residual of the full equations {:e}", geo.residual),
        ),
        (geo.energy_drift > tol::TOL_CONS, format!("energy drift {:e}", geo.energy_drift)),
        (geo.killing_drift > 1e-9, format!("Killing drift {:e}", geo.killing_drift)),
    ]
    .into_iter()
    .filter_map(|(bad, msg)| bad.then_some(msg))
    .collect();
    if !failures.is_empty() {
        diagnostics.reason = format!("candidate failed verification: {}", failures.join(", "));
        return Ok(ConnectVerdict::Inconclusive(diagnostics));
    }
    Ok(ConnectVerdict::Geodesic(Box::new(geo)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn oscillator() -> GpwModel {
        GpwModel::flat(2, "-(x1^2 + x2^2)").unwrap()
    }

    #[test]
    fn inner_products() {
        let m = oscillator();
        let p = GpwPoint::new(vec![1.0, 0.0], 0.0, 0.0);
        let dv = GpwVector {
            xi: vec![0.0, 0.0],
            a: 0.0,
            b: 1.0,
        };
        assert_eq!(gpw_inner(&m, &p, &dv, &dv).unwrap(), 0.0);
        let du = GpwVector {
            xi: vec![0.0, 0.0],
            a: 1.0,
            b: 0.0,
        };
        assert_eq!(gpw_inner(&m, &p, &du, &du).unwrap(), -1.0);
        let a = GpwVector {
            xi: vec![1.0, 2.0],
            a: 0.0,
            b: 0.0,
        };
        let b = GpwVector {
            xi: vec![3.0, -1.0],
            a: 0.0,
            b: 0.0,
        };
        assert_eq!(gpw_inner(&m, &p, &a, &b).unwrap(), 1.0);
        assert!(GpwModel::flat(2, "0*x1").is_err());
    }

    #[test]
    fn witness_pairing_is_delta_u() {
        let m = oscillator();
        let p = GpwPoint::new(vec![1.0, 0.0], 0.5, 0.0);
        for (du, class) in [
            (2.0, ConditionII::ConstantPositive),
            (0.0, ConditionII::IdenticallyZero),
            (-1.0, ConditionII::ConstantNegative),
        ] {
            let q = GpwPoint::new(vec![0.0, 1.0], 0.5 + du, 3.0);
            let path = DiscretePath::from_fn(2, 32, |s, x| {
                x[0] = (0.5 * PI * s).cos();
                x[1] = (0.5 * PI * s).sin();
            })
            .unwrap();
            let path = DiscretePath::from_nodes(
                &(0..=32)
                    .map(|i| match i {
                        0 => p.x.clone(),
                        32 => q.x.clone(),
                        _ => path.node(i).to_vec(),
                    })
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            let w = witness_curve(&p, &q, path).unwrap();
            assert!(w.pairings(&m).unwrap().iter().all(|v| *v == du));
            assert_eq!(w.condition_ii(&m).unwrap(), class);
        }
    }

    #[test]
    fn oscillator_matches_closed_form() {
        let m = oscillator();
        let p = GpwPoint::new(vec![1.0, 0.0], 0.0, 0.0);
        let q = GpwPoint::new(vec![0.0, 1.0], 1.0, 0.0);
        let v = gpw_connect(&m, &p, &q, GpwOptions::default()).unwrap();
        let geo = v.geodesic().expect("geodesic");
        assert!(geo.endpoint_error <= 1e-7);
        let du: f64 = 1.0;
        for smp in &geo.samples {
            let s = smp.s;
            for k in 0..2 {
                let exact = p.x[k] * (du * s).cos() + (q.x[k] - p.x[k] * du.cos()) / du.sin() * (du * s).sin();
                assert!((smp.point.x[k] - exact).abs() < 1e-7);
            }
            assert_eq!(smp.velocity.a, du);
        }
        assert_eq!(geo.condition_ii, ConditionII::ConstantPositive);
        assert!(geo.residual < 1e-6);
    }

    #[test]
    fn zero_du_gives_straight_x_and_affine_v() {
        let m = GpwModel::flat(2, "sin(x1) * u + 3").unwrap();
        let p = GpwPoint::new(vec![0.0, 0.0], 1.0, 0.0);
        let q = GpwPoint::new(vec![2.0, -1.0], 1.0, 4.0);
        let v = gpw_connect(&m, &p, &q, GpwOptions::default()).unwrap();
        let geo = v.geodesic().expect("geodesic");
        for smp in &geo.samples {
            assert!((smp.point.x[0] - 2.0 * smp.s).abs() < 1e-12);
            assert!((smp.point.v - 4.0 * smp.s).abs() < 1e-12);
        }
        assert_eq!(geo.condition_ii, ConditionII::IdenticallyZero);
    }

    #[test]
    fn constant_profile_is_straight() {
        let m = GpwModel::flat(2, "2").unwrap();
        let p = GpwPoint::new(vec![0.0, 1.0], 0.0, 0.0);
        let q = GpwPoint::new(vec![1.0, 3.0], 2.0, -1.0);
        let v = gpw_connect(&m, &p, &q, GpwOptions::default()).unwrap();
        let geo = v.geodesic().expect("geodesic");
        assert!(geo.residual <= 1e-9);
        let mid = &geo.samples[500];
        assert!((mid.point.x[1] - 2.0).abs() < 1e-12 && (mid.point.v + 0.5).abs() < 1e-12);
    }

    #[test]
    fn resonance_is_inconclusive() {
        let m = oscillator();
        let p = GpwPoint::new(vec![1.0, 0.0], 0.0, 0.0);
        let q = GpwPoint::new(vec![0.0, 1.0], PI, 0.0);
        match gpw_connect(&m, &p, &q, GpwOptions::default()).unwrap() {
            ConnectVerdict::Inconclusive(d) => assert!(d.reason.contains("singular"), "{}", d.reason),
            other => panic!("expected Inconclusive, got {}", other.tag()),
        }
    }
}
