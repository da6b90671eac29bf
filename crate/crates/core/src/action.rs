//! Discrete action functionals on piecewise-linear paths.
//!
//! Every integral uses the midpoint rule on segments: the velocity of segment
//! `i` is `(x_{i+1} - x_i) / h` and the fields are sampled at the segment
//! midpoint. With that choice the Killing constant, the reconstructed time and
//! the reduced functional are mutually exact, not just consistent to O(h²).

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geometry::LocalGeometry;
use crate::spacetime::SpacetimeModel;
use crate::tol::{EPS_BETA, LOWER_BOUND_SLACK, TOL_LIGHTLIKE};

/// Nodes `x_0..x_m` on the uniform grid s_i = i/m, optionally with times.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePath {
    dim: usize,
    nodes: Vec<f64>,
    times: Option<Vec<f64>>,
}

impl DiscretePath {
    pub fn from_flat(dim: usize, nodes: Vec<f64>) -> Result<DiscretePath> {
        if dim == 0 || nodes.len() % dim != 0 || nodes.len() / dim < 2 {
            return Err(Error::Precondition(format!(
                "a path needs at least two nodes of dimension {dim}, got {} numbers",
                nodes.len()
            )));
        }
        if nodes.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition("path nodes must be finite".into()));
        }
        Ok(DiscretePath {
            dim,
            nodes,
            times: None,
        })
    }

    pub fn from_nodes(nodes: &[Vec<f64>]) -> Result<DiscretePath> {
        let dim = nodes.first().map_or(0, Vec::len);
        if nodes.iter().any(|n| n.len() != dim) {
            return Err(Error::Precondition("path nodes have mixed dimensions".into()));
        }
        DiscretePath::from_flat(dim, nodes.concat())
    }

    /// Straight segment from `p` to `q` with `m` segments.
    pub fn straight(p: &[f64], q: &[f64], m: usize) -> Result<DiscretePath> {
        DiscretePath::from_fn(p.len(), m, |s, out| {
            for k in 0..p.len() {
                out[k] = (1.0 - s) * p[k] + s * q[k];
            }
        })
    }

    /// Sample `f(s_i)` at every node.
    pub fn from_fn(dim: usize, m: usize, mut f: impl FnMut(f64, &mut [f64])) -> Result<DiscretePath> {
        if m == 0 {
            return Err(Error::Precondition("a path needs at least one segment".into()));
        }
        let mut nodes = vec![0.0; (m + 1) * dim];
        for i in 0..=m {
            f(i as f64 / m as f64, &mut nodes[i * dim..(i + 1) * dim]);
        }
        DiscretePath::from_flat(dim, nodes)
    }

    pub fn with_times(mut self, times: Vec<f64>) -> Result<DiscretePath> {
        if times.len() != self.node_count() {
            return Err(Error::Precondition(format!(
                "{} time values for {} nodes",
                times.len(),
                self.node_count()
            )));
        }
        self.times = Some(times);
        Ok(self)
    }

    /// Affine time interpolation T*(s) = t_p + sΔt.
    pub fn with_affine_times(self, tp: f64, tq: f64) -> DiscretePath {
        let m = self.segments() as f64;
        let times = (0..self.node_count())
            .map(|i| (1.0 - i as f64 / m) * tp + (i as f64 / m) * tq)
            .collect();
        DiscretePath {
            times: Some(times),
            ..self
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn segments(&self) -> usize {
        self.node_count() - 1
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len() / self.dim
    }

    pub fn h(&self) -> f64 {
        1.0 / self.segments() as f64
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn node_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn flat(&self) -> &[f64] {
        &self.nodes
    }

    pub fn flat_mut(&mut self) -> &mut [f64] {
        &mut self.nodes
    }

    pub fn times(&self) -> Option<&[f64]> {
        self.times.as_deref()
    }

    pub fn start(&self) -> &[f64] {
        self.node(0)
    }

    pub fn end(&self) -> &[f64] {
        self.node(self.segments())
    }

    pub fn velocity(&self, i: usize) -> DVector<f64> {
        let m = self.segments() as f64;
        DVector::from_iterator(
            self.dim,
            self.node(i + 1).iter().zip(self.node(i)).map(|(b, a)| (b - a) * m),
        )
    }

    pub fn midpoint(&self, i: usize) -> Vec<f64> {
        self.node(i)
            .iter()
            .zip(self.node(i + 1))
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    /// Segment time derivatives, if times are present.
    pub fn time_velocities(&self) -> Option<Vec<f64>> {
        let m = self.segments() as f64;
        self.times
            .as_ref()
            .map(|t| t.windows(2).map(|w| (w[1] - w[0]) * m).collect())
    }

    /// Same curve traversed backwards.
    pub fn reversed(&self) -> DiscretePath {
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for i in (0..self.node_count()).rev() {
            nodes.extend_from_slice(self.node(i));
        }
        DiscretePath {
            dim: self.dim,
            nodes,
            times: self.times.as_ref().map(|t| t.iter().rev().copied().collect()),
        }
    }

    /// Whether every node is admissible and no segment crosses an excluded region.
    pub fn check_domain(&self, model: &SpacetimeModel) -> Result<()> {
        let base = model.base;
        if self.dim != base.dim() {
            return Err(Error::Precondition(format!(
                "path dimension {} does not match model dimension {}",
                self.dim,
                base.dim()
            )));
        }
        for i in 0..self.node_count() {
            base.check_point(self.node(i))?;
        }
        if !base.excluded().is_empty() {
            for i in 0..self.segments() {
                if !base.segment_clear(self.node(i), self.node(i + 1)) {
                    let region = base
                        .excluded()
                        .iter()
                        .position(|r| r.meets_segment(self.node(i), self.node(i + 1), crate::tol::EPS_DOM))
                        .unwrap_or(0);
                    return Err(Error::Excluded {
                        point: self.midpoint(i),
                        region,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_constant(&self) -> bool {
        (1..self.node_count()).all(|i| self.node(i) == self.node(0))
    }
}

/// Endpoints p = (x_p, t_p) and q = (x_q, t_q).
#[derive(Debug, Clone, PartialEq)]
pub struct EndpointPair {
    pub xp: Vec<f64>,
    pub tp: f64,
    pub xq: Vec<f64>,
    pub tq: f64,
}

impl EndpointPair {
    pub fn new(xp: Vec<f64>, tp: f64, xq: Vec<f64>, tq: f64) -> Result<EndpointPair> {
        if xp.len() != xq.len() {
            return Err(Error::Precondition("endpoints have different dimensions".into()));
        }
        Ok(EndpointPair { xp, tp, xq, tq })
    }

    pub fn delta_t(&self) -> f64 {
        self.tq - self.tp
    }

    /// Pair with Δt ≥ 0, swapping p and q if needed; the flag reports the swap.
    pub fn normalized(&self) -> (EndpointPair, bool) {
        if self.delta_t() < 0.0 {
            (
                EndpointPair {
                    xp: self.xq.clone(),
                    tp: self.tq,
                    xq: self.xp.clone(),
                    tq: self.tp,
                },
                true,
            )
        } else {
            (self.clone(), false)
        }
    }
}

/// Quantities of one segment: a = ⟨δ, v⟩, b = β_eff, q = ⟨v, v⟩ at the midpoint.
#[derive(Debug, Clone)]
pub(crate) struct Segment {
    pub a: f64,
    pub b: f64,
    pub q: f64,
    pub v: DVector<f64>,
    pub local: LocalGeometry,
}

pub(crate) fn segments(model: &SpacetimeModel, path: &DiscretePath) -> Result<Vec<Segment>> {
    path.check_domain(model)?;
    let shift = model.beta_shift();
    (0..path.segments())
        .map(|i| {
            let local = model.base.local(&path.midpoint(i))?;
            let v = path.velocity(i);
            let gv = if local.flat { v.clone() } else { &local.g * &v };
            Ok(Segment {
                a: local.delta.dot(&gv),
                b: local.beta + shift,
                q: v.dot(&gv),
                v,
                local,
            })
        })
        .collect()
}

/// h-weighted sums that every reduced formula is built from.
#[derive(Debug, Clone, Copy)]
struct Sums {
    /// Σh q
    q: f64,
    /// Σh a²/b
    s1: f64,
    /// Σh a/b
    a: f64,
    /// Σh 1/b
    b: f64,
}

fn require_beta(segs: &[Segment], path: &DiscretePath) -> Result<()> {
    for (i, s) in segs.iter().enumerate() {
        if !(s.b > EPS_BETA) {
            return Err(Error::DegenerateBeta {
                point: path.midpoint(i),
                beta: s.b,
            });
        }
    }
    Ok(())
}

fn sums(segs: &[Segment], h: f64) -> Sums {
    let mut out = Sums {
        q: 0.0,
        s1: 0.0,
        a: 0.0,
        b: 0.0,
    };
    for s in segs {
        out.q += h * s.q;
        out.s1 += h * s.a * s.a / s.b;
        out.a += h * s.a / s.b;
        out.b += h / s.b;
    }
    out
}

/// ½∫⟨ż, ż⟩ for a path carrying times.
pub fn action_f(model: &SpacetimeModel, path: &DiscretePath) -> Result<f64> {
    let tdot = path
        .time_velocities()
        .ok_or_else(|| Error::Precondition("action needs time values on the path".into()))?;
    let segs = segments(model, path)?;
    let h = path.h();
    Ok(segs
        .iter()
        .zip(&tdot)
        .map(|(s, &td)| h * (0.5 * s.q + s.a * td - 0.5 * s.b * td * td))
        .sum())
}

/// C with ⟨δ, ẋ⟩ − β_eff ṫ ≡ C on the reconstructed curve.
pub fn killing_constant(model: &SpacetimeModel, path: &DiscretePath, delta_t: f64) -> Result<f64> {
    let segs = segments(model, path)?;
    require_beta(&segs, path)?;
    let s = sums(&segs, path.h());
    Ok((s.a - delta_t) / s.b)
}

/// Path with the time function determined by the Killing constant.
pub fn reconstruct_time(model: &SpacetimeModel, path: &DiscretePath, delta_t: f64, tp: f64) -> Result<DiscretePath> {
    let segs = segments(model, path)?;
    require_beta(&segs, path)?;
    let h = path.h();
    let s = sums(&segs, h);
    let c = (s.a - delta_t) / s.b;
    let mut times = Vec::with_capacity(segs.len() + 1);
    let mut t = tp;
    times.push(t);
    for seg in &segs {
        t += h * (seg.a - c) / seg.b;
        times.push(t);
    }
    path.clone().with_times(times)
}

/// Reduced functional J(x) = min over admissible t of the action.
pub fn reduced_j(model: &SpacetimeModel, path: &DiscretePath, delta_t: f64) -> Result<f64> {
    let segs = segments(model, path)?;
    require_beta(&segs, path)?;
    Ok(j_from_sums(sums(&segs, path.h()), delta_t))
}

fn j_from_sums(s: Sums, dt: f64) -> f64 {
    0.5 * s.q + 0.5 * (s.s1 - s.a * s.a / s.b) - 0.5 * dt * (dt - 2.0 * s.a) / s.b
}

/// Perturbed reduced functional. On a β ≡ 0 base this is the closed form
/// ½‖ẋ‖² + (n/2)[∫a² − (∫a)²] − Δt(Δt/2n − ∫a); otherwise J with β + 1/n.
pub fn reduced_jn(model: &SpacetimeModel, path: &DiscretePath, delta_t: f64) -> Result<f64> {
    let n = model
        .perturbation
        .ok_or_else(|| Error::Precondition("reduced_jn needs a perturbed model".into()))?;
    if !model.base.is_lightlike() {
        return reduced_j(model, path, delta_t);
    }
    let segs = segments(model, path)?;
    let h = path.h();
    let (mut q, mut a, mut a2) = (0.0, 0.0, 0.0);
    for s in &segs {
        q += h * s.q;
        a += h * s.a;
        a2 += h * s.a * s.a;
    }
    Ok(0.5 * q + 0.5 * n * (a2 - a * a) - delta_t * (delta_t / (2.0 * n) - a))
}

/// Cauchy–Schwarz lower bound 2J ≥ ‖ẋ‖² − Δt(Δt − 2∫a/b)(∫1/b)⁻¹.
pub fn lower_bound_check(model: &SpacetimeModel, path: &DiscretePath, delta_t: f64) -> Result<bool> {
    let segs = segments(model, path)?;
    require_beta(&segs, path)?;
    let s = sums(&segs, path.h());
    let j = j_from_sums(s, delta_t);
    let bound = s.q - delta_t * (delta_t - 2.0 * s.a) / s.b;
    Ok(2.0 * j >= bound - LOWER_BOUND_SLACK * (1.0 + bound.abs()))
}

/// Arrival time T(x) of the future lightlike lift of `path`, with that lift.
pub fn arrival_time(model: &SpacetimeModel, path: &DiscretePath, tp: f64) -> Result<(f64, DiscretePath)> {
    if path.is_constant() {
        return Err(Error::ConstantPath);
    }
    let segs = segments(model, path)?;
    require_beta(&segs, path)?;
    let h = path.h();
    let mut times = Vec::with_capacity(segs.len() + 1);
    let mut t = tp;
    times.push(t);
    for (i, s) in segs.iter().enumerate() {
        let root = (s.a * s.a + s.q * s.b).sqrt();
        // Larger root of b ṫ² − 2a ṫ − q = 0, in the form that avoids cancellation.
        let tdot = if s.a >= 0.0 {
            (s.a + root) / s.b
        } else if root - s.a > 0.0 {
            s.q / (root - s.a)
        } else {
            0.0
        };
        let norm = s.q + 2.0 * s.a * tdot - s.b * tdot * tdot;
        if norm.abs() > TOL_LIGHTLIKE * s.q.max(1.0) {
            return Err(Error::NotLightlike { segment: i, norm });
        }
        t += h * tdot;
        times.push(t);
    }
    Ok((t - tp, path.clone().with_times(times)?))
}

/// Killing pairing ⟨δ, ẋ⟩ − β_eff ṫ on every segment (ṫ = 0 when the path has no times).
pub fn killing_pairings(model: &SpacetimeModel, path: &DiscretePath) -> Result<Vec<f64>> {
    let segs = segments(model, path)?;
    let tdot = path.time_velocities().unwrap_or_else(|| vec![0.0; segs.len()]);
    Ok(segs.iter().zip(tdot).map(|(s, td)| s.a - s.b * td).collect())
}

/// Value and gradient of J (or Jₙ on a perturbed model) with respect to all
/// node coordinates. Endpoint entries of the gradient are zero.
pub fn objective(model: &SpacetimeModel, path: &DiscretePath, delta_t: f64) -> Result<(f64, Vec<f64>)> {
    let segs = segments(model, path)?;
    require_beta(&segs, path)?;
    let h = path.h();
    let s = sums(&segs, h);
    let value = j_from_sums(s, delta_t);
    let c = (s.a - delta_t) / s.b;
    let d = path.dim();
    let m = path.segments();
    let mut grad = vec![0.0; (m + 1) * d];
    // By the envelope argument the time variables drop out: dJ = Σh[½dq + ṫ da − ½ṫ² db].
    for (i, seg) in segs.iter().enumerate() {
        let tdot = (seg.a - c) / seg.b;
        let local = &seg.local;
        let omega = local.omega();
        let domega = local.domega();
        let v = &seg.v;
        // Derivatives with respect to the midpoint and to the velocity.
        let mut d_mid = domega.tr_mul(v) * tdot - &local.dbeta * (0.5 * tdot * tdot);
        let d_vel = if local.flat { v.clone() } else { &local.g * v } + &omega * tdot;
        if !local.flat {
            for k in 0..d {
                d_mid[k] += 0.5 * v.dot(&(&local.dg[k] * v));
            }
        }
        for k in 0..d {
            let mid = h * 0.5 * d_mid[k];
            let vel = d_vel[k]; // h · (1/h)
            grad[i * d + k] += mid - vel;
            grad[(i + 1) * d + k] += mid + vel;
        }
    }
    for k in 0..d {
        grad[k] = 0.0;
        grad[m * d + k] = 0.0;
    }
    Ok((value, grad))
}

/// Value of the functional `objective` differentiates.
pub fn objective_value(model: &SpacetimeModel, path: &DiscretePath, delta_t: f64) -> Result<f64> {
    match model.perturbation {
        Some(_) => reduced_jn(model, path, delta_t),
        None => reduced_j(model, path, delta_t),
    }
}
