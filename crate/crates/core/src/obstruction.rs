//! Structural search for curves along which the Killing pairing keeps one sign.
//!
//! When δ is the gradient of a potential Λ and β ≡ 0, the pairing along a curve
//! is d/ds Λ(x(s)), so a curve of constant sign is a curve on which Λ is
//! monotone. The search looks for such curves on a uniform grid by breadth-first
//! reachability in three modes (Λ nondecreasing, nonincreasing, constant).
//! Failing in every mode, at two resolutions, is the certificate.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::action::DiscretePath;
use crate::error::{Error, Result};
use crate::fieldlang::FieldExpr;
use crate::geometry::MetricModel;
use crate::spacetime::SpacetimeModel;
use crate::tol::EPS_SIGN;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    /// Closed-form Λ with ∇Λ = δ.
    Symbolic,
    /// Λ(x) = ∫₀^{x_k} λ for δ = λ(x_k) e_k, by quadrature.
    AxisQuadrature,
    /// Λ by line integrals of a curl-free δ from a base point.
    LineIntegral,
    /// δ = λ e_k with λ of one sign: the pairing has the sign of ±ẋ_k, so Λ = ±x_k
    /// decides the sign question although it is not a true potential.
    SignEquivalent,
}

#[derive(Debug, Clone)]
enum Repr {
    Expr(FieldExpr),
    Axis { axis: usize, delta: FieldExpr },
    Line { model: MetricModel, origin: Vec<f64> },
    Sign { axis: usize, sign: f64, delta: FieldExpr },
}

#[derive(Debug, Clone)]
pub struct Potential {
    pub kind: PotentialKind,
    pub description: String,
    /// Coordinates Λ depends on.
    pub axes: Vec<usize>,
    repr: Repr,
}

#[derive(Debug, Clone)]
pub enum PotentialOutcome {
    Found(Potential),
    None(String),
}

/// 16-point Gauss–Legendre nodes and weights on [-1, 1].
const GL_NODES: [f64; 8] = [
    0.0950125098376374,
    0.2816035507792589,
    0.4580167776572274,
    0.6178762444026438,
    0.7554044083550030,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];
const GL_WEIGHTS: [f64; 8] = [
    0.1894506104550685,
    0.1826034150449236,
    0.1691565193950025,
    0.1495959888165767,
    0.1246289712555339,
    0.0951585116824928,
    0.0622535239386479,
    0.0271524594117541,
];

/// ∫_a^b f with composite 16-point Gauss–Legendre on panels of width ≤ 0.25.
fn quadrature(a: f64, b: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let panels = ((b - a).abs() / 0.25).ceil().max(1.0) as usize;
    let w = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * w;
        let half = 0.5 * w;
        for (x, wt) in GL_NODES.iter().zip(GL_WEIGHTS) {
            total += wt * half * (f(mid - half * x)? + f(mid + half * x)?);
        }
    }
    Ok(total)
}

/// Seam crossings of `field` on the segment from x_k = 0 to x_k = `end` (other
/// coordinates fixed), located by bisection so quadrature panels can break there.
fn axis_seams(field: &FieldExpr, x: &[f64], axis: usize, end: f64) -> Result<Vec<f64>> {
    if !field.has_seams() || end == 0.0 {
        return Ok(Vec::new());
    }
    let mut y = x.to_vec();
    let mut seams_at = |s: f64| -> Result<Vec<f64>> {
        y[axis] = s;
        Ok(field.seam_values(&y)?)
    };
    let panels = (end.abs() / 0.25).ceil().max(1.0) as usize;
    let mut out = Vec::new();
    let mut a = 0.0;
    let mut va = seams_at(a)?;
    for k in 1..=panels {
        let b = end * k as f64 / panels as f64;
        let vb = seams_at(b)?;
        if va.iter().zip(&vb).any(|(u, v)| (*u < 0.0) != (*v < 0.0)) {
            let (mut lo, mut hi) = (a, b);
            let vlo = va.clone();
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let vm = seams_at(mid)?;
                if vlo.iter().zip(&vm).any(|(u, v)| (*u < 0.0) != (*v < 0.0)) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        a = b;
        va = vb;
    }
    Ok(out)
}

impl Potential {
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        match &self.repr {
            Repr::Expr(e) => Ok(e.eval_component(0, x)?),
            Repr::Axis { axis, delta } => {
                let mut y = x.to_vec();
                let mut total = 0.0;
                let mut from = 0.0;
                for to in axis_seams(delta, x, *axis, x[*axis])?.into_iter().chain([x[*axis]]) {
                    total += quadrature(from, to, |s| {
                        y[*axis] = s;
                        Ok(delta.eval_component(*axis, &y)?)
                    })?;
                    from = to;
                }
                Ok(total)
            }
            Repr::Line { model, origin } => {
                let dir: Vec<f64> = x.iter().zip(origin).map(|(a, b)| a - b).collect();
                let mut y = origin.clone();
                quadrature(0.0, 1.0, |s| {
                    for k in 0..y.len() {
                        y[k] = origin[k] + s * dir[k];
                    }
                    let local = model.local(&y)?;
                    Ok(local.omega().iter().zip(&dir).map(|(w, d)| w * d).sum())
                })
            }
            Repr::Sign { axis, sign, .. } => Ok(sign * x[*axis]),
        }
    }

    /// Whether the structural assumption behind the potential holds at `x`
    /// (only sign-equivalent potentials need a pointwise check).
    fn holds_at(&self, x: &[f64]) -> Result<bool> {
        match &self.repr {
            Repr::Sign { axis, sign, delta } => Ok(sign * delta.eval_component(*axis, x)? > 0.0),
            _ => Ok(true),
        }
    }
}

fn probes(model: &MetricModel, around: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = model.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out = Vec::new();
    let centers: Vec<Vec<f64>> = if around.is_empty() {
        vec![vec![0.0; d]]
    } else {
        around.to_vec()
    };
    for c in &centers {
        for _ in 0..40 {
            let x: Vec<f64> = c.iter().map(|v| v + rng.gen_range(-5.0..5.0)).collect();
            if model.in_domain(&x) {
                out.push(x);
            }
        }
    }
    out
}

fn format_coefficient(c: f64, k: usize) -> String {
    if c == 1.0 {
        format!("x{}", k + 1)
    } else if c == -1.0 {
        format!("-x{}", k + 1)
    } else {
        format!("{c:?}*x{}", k + 1)
    }
}

/// Find Λ with dΛ = ⟨δ, ·⟩ (or a sign-equivalent substitute) for a β ≡ 0 model.
/// `around` are points near which the field is probed (typically the endpoints).
pub fn potential_of(model: &MetricModel, around: &[Vec<f64>]) -> PotentialOutcome {
    if !model.is_lightlike() {
        return PotentialOutcome::None("beta is not identically zero; the sign criterion does not apply".into());
    }
    let d = model.dim();
    let delta = model.delta();
    let samples = probes(model, around);

    if let Some(hint) = model.potential_hint() {
        let ok = samples.iter().all(|x| {
            let (Ok(jet), Ok(local)) = (hint.jet_component(0, x), model.local(x)) else {
                return false;
            };
            let omega = local.omega();
            (0..d).all(|k| (jet.grad[k] - omega[k]).abs() <= 1e-8 * (1.0 + omega[k].abs()))
        });
        if ok {
            return PotentialOutcome::Found(Potential {
                kind: PotentialKind::Symbolic,
                description: hint.source().to_string(),
                axes: hint.variables().into_iter().filter(|v| *v < d).collect(),
                repr: Repr::Expr(hint.clone()),
            });
        }
        log::warn!("potential hint `{}` does not match delta; ignoring it", hint.source());
    }

    let nonzero: Vec<usize> = (0..d).filter(|k| !delta.components()[*k].is_zero()).collect();
    if nonzero.is_empty() {
        return PotentialOutcome::None("delta vanishes identically".into());
    }
    let flat = model.has_identity_metric();
    let constant = delta.variables().is_empty();

    if flat && constant {
        let coeffs: Vec<f64> = (0..d)
            .map(|k| delta.eval_component(k, &vec![0.0; d]).unwrap_or(0.0))
            .collect();
        let terms: Vec<String> = (0..d)
            .filter(|k| coeffs[*k] != 0.0)
            .map(|k| format_coefficient(coeffs[k], k))
            .collect();
        let source = terms.join(" + ");
        if let Ok(expr) = FieldExpr::scalar(&source, d) {
            return PotentialOutcome::Found(Potential {
                kind: PotentialKind::Symbolic,
                description: source,
                axes: (0..d).filter(|k| coeffs[*k] != 0.0).collect(),
                repr: Repr::Expr(expr),
            });
        }
    }

    if flat && nonzero.len() == 1 {
        let k = nonzero[0];
        if delta.component_variables(k).iter().all(|v| *v == k) {
            return PotentialOutcome::Found(Potential {
                kind: PotentialKind::AxisQuadrature,
                description: format!("integral of delta_{} along x{} from 0", k + 1, k + 1),
                axes: vec![k],
                repr: Repr::Axis {
                    axis: k,
                    delta: delta.clone(),
                },
            });
        }
        let signs: Vec<f64> = samples
            .iter()
            .filter_map(|x| delta.eval_component(k, x).ok())
            .map(|v| if v > 0.0 { 1.0 } else if v < 0.0 { -1.0 } else { 0.0 })
            .collect();
        if !signs.is_empty() && signs.iter().all(|s| *s == signs[0] && *s != 0.0) {
            let sign = signs[0];
            return PotentialOutcome::Found(Potential {
                kind: PotentialKind::SignEquivalent,
                description: format_coefficient(sign, k),
                axes: vec![k],
                repr: Repr::Sign {
                    axis: k,
                    sign,
                    delta: delta.clone(),
                },
            });
        }
    }

    let closed = samples.iter().all(|x| {
        let Ok(local) = model.local(x) else {
            return true;
        };
        let curl = local.curl_lowered();
        let scale = 1.0 + local.domega().amax();
        curl.amax() <= 1e-9 * scale
    });
    if closed {
        let origin = around.first().cloned().unwrap_or_else(|| vec![0.0; d]);
        return PotentialOutcome::Found(Potential {
            kind: PotentialKind::LineIntegral,
            description: format!("line integral of delta from {origin:?}"),
            axes: (0..d).collect(),
            repr: Repr::Line {
                model: model.clone(),
                origin,
            },
        });
    }
    PotentialOutcome::None("delta is not closed (nonzero curl) and has no product form".into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Nondecreasing,
    Nonincreasing,
    Level,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Nondecreasing, Mode::Nonincreasing, Mode::Level];

    fn allows(self, from: f64, to: f64, eps: f64) -> bool {
        match self {
            Mode::Nondecreasing => to >= from - eps,
            Mode::Nonincreasing => to <= from + eps,
            Mode::Level => (to - from).abs() <= eps,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Nondecreasing => "nondecreasing",
            Mode::Nonincreasing => "nonincreasing",
            Mode::Level => "level",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ModeResult {
    pub mode: Mode,
    /// Endpoint values are compatible with the mode.
    pub applicable: bool,
    pub reachable: bool,
    pub visited: usize,
    pub witness: Option<DiscretePath>,
}

#[derive(Debug, Clone)]
pub struct GridSearch {
    pub shape: Vec<usize>,
    pub spacing: Vec<f64>,
    pub modes: Vec<ModeResult>,
}

impl GridSearch {
    pub fn all_unreachable(&self) -> bool {
        self.modes.iter().all(|m| !m.reachable)
    }
}

#[derive(Debug, Clone)]
pub struct ObstructionCertificate {
    pub potential: String,
    pub potential_kind: PotentialKind,
    /// Coordinates the grid spans; other coordinates are carried along linearly.
    pub axes: Vec<usize>,
    pub resolution: usize,
    pub epsilon: f64,
    pub lambda_start: f64,
    pub lambda_goal: f64,
    pub coarse: GridSearch,
    /// The same search at twice the resolution (absent when the coarse search found a path).
    pub refined: Option<GridSearch>,
}

impl ObstructionCertificate {
    /// All modes unreachable, and still so after refinement.
    pub fn certifies(&self) -> bool {
        self.coarse.all_unreachable() && self.refined.as_ref().is_some_and(GridSearch::all_unreachable)
    }

    pub fn witness(&self) -> Option<&DiscretePath> {
        self.coarse.modes.iter().find_map(|m| m.witness.as_ref())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    /// Target number of cells per axis.
    pub resolution: usize,
    /// Cap on grid nodes at the base resolution (the refined grid may use 8× this).
    pub max_nodes: usize,
    /// Nodes of a smoothed witness path.
    pub witness_nodes: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            resolution: 512,
            max_nodes: 1 << 21,
            witness_nodes: 256,
        }
    }
}

struct Grid {
    axes: Vec<usize>,
    origin: Vec<f64>,
    /// Per searched axis: first node offset (in steps from p) and count.
    first: Vec<i64>,
    shape: Vec<usize>,
    spacing: Vec<f64>,
    strides: Vec<usize>,
    p: Vec<f64>,
}

impl Grid {
    fn build(model: &MetricModel, axes: &[usize], p: &[f64], q: &[f64], resolution: usize, max_nodes: usize) -> Result<Grid> {
        let dist = p.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let margin = if dist > 0.0 { 2.0 * dist } else { 1.0 };
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for &k in axes {
            let mut a = p[k].min(q[k]);
            let mut b = p[k].max(q[k]);
            for r in model.excluded() {
                a = a.min(r.lo[k]);
                b = b.max(r.hi[k]);
            }
            lo.push(a - margin);
            hi.push(b + margin);
        }
        let mut cells = resolution.max(4) as f64;
        loop {
            let mut spacing = Vec::new();
            let mut first = Vec::new();
            let mut shape = Vec::new();
            for (i, &k) in axes.iter().enumerate() {
                let target = (hi[i] - lo[i]) / cells;
                let gap = (q[k] - p[k]).abs();
                let h = if gap > 0.0 {
                    gap / (gap / target).round().max(1.0)
                } else {
                    target
                };
                let a = ((lo[i] - p[k]) / h).floor() as i64;
                let b = ((hi[i] - p[k]) / h).ceil() as i64;
                spacing.push(h);
                first.push(a);
                shape.push((b - a + 1) as usize);
            }
            let total: usize = shape.iter().product();
            if total > max_nodes && cells > 4.0 {
                cells *= (max_nodes as f64 / total as f64).powf(1.0 / axes.len() as f64) * 0.999;
                continue;
            }
            let mut strides = vec![1; axes.len()];
            for i in 1..axes.len() {
                strides[i] = strides[i - 1] * shape[i - 1];
            }
            let grid = Grid {
                axes: axes.to_vec(),
                origin: p.to_vec(),
                first,
                shape,
                spacing,
                strides,
                p: p.to_vec(),
            };
            grid.check_regions(model)?;
            return Ok(grid);
        }
    }

    fn check_regions(&self, model: &MetricModel) -> Result<()> {
        for (r, region) in model.excluded().iter().enumerate() {
            for (i, &k) in self.axes.iter().enumerate() {
                let extent = region.extent(k);
                if extent > 0.0 && extent < 2.0 * self.spacing[i] {
                    return Err(Error::GridTooCoarse(format!(
                        "excluded region #{r} spans {extent} along x{} but cells are {} wide; raise the grid resolution",
                        k + 1,
                        self.spacing[i]
                    )));
                }
            }
        }
        Ok(())
    }

    fn len(&self) -> usize {
        self.shape.iter().product()
    }

    fn point(&self, index: usize) -> Vec<f64> {
        let mut x = self.origin.clone();
        let mut rest = index;
        for (i, &k) in self.axes.iter().enumerate() {
            let j = rest % self.shape[i];
            rest /= self.shape[i];
            x[k] = self.p[k] + (self.first[i] + j as i64) as f64 * self.spacing[i];
        }
        x
    }

    fn index_of(&self, x: &[f64]) -> usize {
        self.axes
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let j = ((x[k] - self.p[k]) / self.spacing[i]).round() as i64 - self.first[i];
                j as usize * self.strides[i]
            })
            .sum()
    }

    /// All nodes of the surrounding 3^k − 1 block. Axis moves alone cannot follow
    /// a level set that is oblique to the grid (a step along −x1 always lowers
    /// |x|² when x1 > 0), so diagonal moves are part of the stencil.
    fn neighbors(&self, index: usize, out: &mut Vec<usize>) {
        out.clear();
        out.push(index);
        let mut rest = index;
        for i in 0..self.axes.len() {
            let j = rest % self.shape[i];
            rest /= self.shape[i];
            let len = out.len();
            for o in 0..len {
                if j > 0 {
                    out.push(out[o] - self.strides[i]);
                }
                if j + 1 < self.shape[i] {
                    out.push(out[o] + self.strides[i]);
                }
            }
        }
        out.swap_remove(0);
    }
}

fn bfs(
    grid: &Grid,
    model: &MetricModel,
    values: &[f64],
    blocked: &[bool],
    start: usize,
    goal: usize,
    mode: Mode,
    eps: f64,
) -> (bool, usize, Option<Vec<usize>>) {
    let n = grid.len();
    let mut parent = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    parent[start] = start as u32;
    queue.push_back(start);
    let mut visited = 1;
    let mut nb = Vec::with_capacity(3usize.pow(grid.axes.len() as u32));
    let check_segments = !model.excluded().is_empty();
    while let Some(a) = queue.pop_front() {
        if a == goal {
            let mut path = vec![goal];
            let mut c = goal;
            while c != start {
                c = parent[c] as usize;
                path.push(c);
            }
            path.reverse();
            return (true, visited, Some(path));
        }
        grid.neighbors(a, &mut nb);
        for &b in &nb {
            if parent[b] != u32::MAX || blocked[b] || !mode.allows(values[a], values[b], eps) {
                continue;
            }
            if check_segments && !model.segment_clear(&grid.point(a), &grid.point(b)) {
                continue;
            }
            parent[b] = a as u32;
            visited += 1;
            queue.push_back(b);
        }
    }
    (false, visited, None)
}

/// Reachability of q from p along Λ-monotone grid paths in each mode.
fn search_at(
    model: &MetricModel,
    potential: &Potential,
    axes: &[usize],
    p: &[f64],
    q: &[f64],
    resolution: usize,
    max_nodes: usize,
    witness_nodes: usize,
    eps_hint: Option<f64>,
) -> Result<(GridSearch, f64)> {
    let grid = Grid::build(model, axes, p, q, resolution, max_nodes)?;
    let n = grid.len();
    if n > u32::MAX as usize {
        return Err(Error::Precondition("search grid is too large".into()));
    }
    let evaluated: Vec<(f64, bool)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = grid.point(i);
            if !model.in_domain(&x) {
                return Ok((0.0, true));
            }
            match potential.value(&x) {
                Ok(v) if v.is_finite() => {
                    if !potential.holds_at(&x)? {
                        return Err(Error::Precondition(format!(
                            "the sign-equivalence assumption fails at {x:?}"
                        )));
                    }
                    Ok((v, false))
                }
                _ => Ok((0.0, true)),
            }
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = evaluated.iter().map(|e| e.0).collect();
    let blocked: Vec<bool> = evaluated.iter().map(|e| e.1).collect();
    let scale = values
        .iter()
        .zip(&blocked)
        .filter(|(_, b)| !**b)
        .map(|(v, _)| v.abs())
        .fold(0.0, f64::max);
    let eps = eps_hint.unwrap_or(1e-9 * (1.0 + scale));
    let start = grid.index_of(p);
    let goal = grid.index_of(q);
    if blocked[start] || blocked[goal] {
        return Err(Error::Precondition("an endpoint lies outside the admissible domain".into()));
    }
    let (ls, lg) = (values[start], values[goal]);
    let modes = Mode::ALL
        .par_iter()
        .map(|&mode| {
            let applicable = mode.allows(ls, lg, eps);
            if !applicable {
                return Ok(ModeResult {
                    mode,
                    applicable,
                    reachable: false,
                    visited: 0,
                    witness: None,
                });
            }
            let (reachable, visited, nodes) = bfs(&grid, model, &values, &blocked, start, goal, mode, eps);
            let witness = match nodes {
                Some(nodes) => {
                    let mut w = smooth_witness(model, potential, &grid, &nodes, p, q, mode, eps, witness_nodes)?;
                    // Interpolation leaves the end nodes within rounding of p and q; pin them.
                    let m = w.segments();
                    w.node_mut(0).copy_from_slice(p);
                    w.node_mut(m).copy_from_slice(q);
                    Some(w)
                }
                None => None,
            };
            Ok(ModeResult {
                mode,
                applicable,
                reachable,
                visited,
                witness,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((
        GridSearch {
            shape: grid.shape.clone(),
            spacing: grid.spacing.clone(),
            modes,
        },
        eps,
    ))
}

/// Grid-based search with a refinement check on failure.
pub fn monotone_path_search(
    model: &MetricModel,
    potential: &Potential,
    p: &[f64],
    q: &[f64],
    config: SearchConfig,
) -> Result<ObstructionCertificate> {
    model.check_point(p)?;
    model.check_point(q)?;
    let d = model.dim();
    let axes: Vec<usize> = if model.excluded().is_empty() {
        let mut a = potential.axes.clone();
        if a.is_empty() {
            a.push(0);
        }
        a
    } else {
        (0..d).collect()
    };
    let (coarse, eps) = search_at(
        model,
        potential,
        &axes,
        p,
        q,
        config.resolution,
        config.max_nodes,
        config.witness_nodes,
        None,
    )?;
    let refined = if coarse.all_unreachable() {
        Some(
            search_at(
                model,
                potential,
                &axes,
                p,
                q,
                2 * config.resolution,
                8 * config.max_nodes,
                config.witness_nodes,
                Some(eps),
            )?
            .0,
        )
    } else {
        None
    };
    Ok(ObstructionCertificate {
        potential: potential.description.clone(),
        potential_kind: potential.kind,
        axes,
        resolution: config.resolution,
        epsilon: eps,
        lambda_start: potential.value(p)?,
        lambda_goal: potential.value(q)?,
        coarse,
        refined,
    })
}

fn monotone_along(potential: &Potential, model: &MetricModel, a: &[f64], b: &[f64], mode: Mode, eps: f64, samples: usize) -> bool {
    if !model.segment_clear(a, b) {
        return false;
    }
    let mut prev = match potential.value(a) {
        Ok(v) => v,
        Err(_) => return false,
    };
    for i in 1..=samples {
        let s = i as f64 / samples as f64;
        let x: Vec<f64> = a.iter().zip(b).map(|(u, v)| u + s * (v - u)).collect();
        let Ok(v) = potential.value(&x) else {
            return false;
        };
        if !mode.allows(prev, v, eps) {
            return false;
        }
        prev = v;
    }
    true
}

fn catmull_rom(p0: &[f64], p1: &[f64], p2: &[f64], p3: &[f64], t: f64) -> Vec<f64> {
    let t2 = t * t;
    let t3 = t2 * t;
    (0..p1.len())
        .map(|k| {
            0.5 * (2.0 * p1[k]
                + (p2[k] - p0[k]) * t
                + (2.0 * p0[k] - 5.0 * p1[k] + 4.0 * p2[k] - p3[k]) * t2
                + (3.0 * p1[k] - p0[k] - 3.0 * p2[k] + p3[k]) * t3)
        })
        .collect()
}

pub(crate) fn resample_polyline(points: &[Vec<f64>], m: usize) -> Result<DiscretePath> {
    let lengths: Vec<f64> = points
        .windows(2)
        .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
        .collect();
    let total: f64 = lengths.iter().sum();
    let d = points[0].len();
    if total == 0.0 {
        return DiscretePath::straight(&points[0], &points[0], m);
    }
    let mut seg = 0;
    let mut acc = 0.0;
    DiscretePath::from_fn(d, m, |s, out| {
        let target = s * total;
        while seg + 1 < lengths.len() && acc + lengths[seg] < target {
            acc += lengths[seg];
            seg += 1;
        }
        let frac = if lengths[seg] > 0.0 {
            ((target - acc) / lengths[seg]).clamp(0.0, 1.0)
        } else {
            0.0
        };
        for k in 0..d {
            out[k] = (1.0 - frac) * points[seg][k] + frac * points[seg + 1][k];
        }
    })
}

/// String-pull a grid path, smooth it with Catmull–Rom and resample it, falling
/// back to rougher versions when smoothing breaks monotonicity or clearance.
#[allow(clippy::too_many_arguments)]
fn smooth_witness(
    model: &MetricModel,
    potential: &Potential,
    grid: &Grid,
    nodes: &[usize],
    p: &[f64],
    q: &[f64],
    mode: Mode,
    eps: f64,
    m: usize,
) -> Result<DiscretePath> {
    // Coordinates outside the searched axes move linearly with the step count.
    let steps = (nodes.len() - 1).max(1) as f64;
    let points: Vec<Vec<f64>> = nodes
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let mut x = grid.point(n);
            for k in 0..x.len() {
                if !grid.axes.contains(&k) {
                    x[k] = p[k] + (i as f64 / steps) * (q[k] - p[k]);
                }
            }
            x
        })
        .collect();
    let mut pulled = vec![points[0].clone()];
    let mut anchor = 0;
    while anchor + 1 < points.len() {
        let mut reach = anchor + 1;
        let limit = (anchor + 64).min(points.len() - 1);
        while reach < limit
            && monotone_along(potential, model, &points[anchor], &points[reach + 1], mode, eps, 8 * (reach + 1 - anchor))
        {
            reach += 1;
        }
        pulled.push(points[reach].clone());
        anchor = reach;
    }

    let mut dense = Vec::new();
    let count = pulled.len();
    let per = (4 * m / count.max(1)).max(8);
    for i in 0..count - 1 {
        let p0 = &pulled[i.saturating_sub(1)];
        let p3 = &pulled[(i + 2).min(count - 1)];
        for j in 0..per {
            dense.push(catmull_rom(p0, &pulled[i], &pulled[i + 1], p3, j as f64 / per as f64));
        }
    }
    dense.push(pulled[count - 1].clone());
    // Candidates from smoothest to rawest. Resampling places nodes inside chords
    // whose potential may dip between sample points, so each candidate is checked
    // on its final nodes; the grid path itself satisfies the mode step by step.
    let valid = |path: &DiscretePath| {
        (0..path.segments()).all(|i| monotone_along(potential, model, path.node(i), path.node(i + 1), mode, eps, 4))
    };
    for candidate in [&dense, &pulled, &points] {
        let path = resample_polyline(candidate, m)?;
        if valid(&path) {
            return Ok(path);
        }
    }
    DiscretePath::from_nodes(&points)
}

/// Range and sign pattern of the Killing pairing along a candidate curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SignReport {
    pub min: f64,
    pub max: f64,
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
    /// Both signs occur beyond the tolerance: the curve cannot be a geodesic.
    pub flagged: bool,
}

pub fn sign_conservation_check(model: &SpacetimeModel, path: &DiscretePath) -> Result<SignReport> {
    if path.segments() < 64 {
        return Err(Error::Precondition(format!(
            "sign check needs at least 64 segments, got {}",
            path.segments()
        )));
    }
    let values = crate::action::killing_pairings(model, path)?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let positive = values.iter().filter(|v| **v >= EPS_SIGN).count();
    let negative = values.iter().filter(|v| **v <= -EPS_SIGN).count();
    Ok(SignReport {
        min,
        max,
        positive,
        negative,
        zero: values.len() - positive - negative,
        flagged: positive > 0 && negative > 0,
    })
}

/// Convenience wrapper: find a potential and run the search.
pub fn certify(model: &MetricModel, p: &[f64], q: &[f64], config: SearchConfig) -> Result<Option<ObstructionCertificate>> {
    match potential_of(model, &[p.to_vec(), q.to_vec()]) {
        PotentialOutcome::Found(pot) => monotone_path_search(model, &pot, p, q, config).map(Some),
        PotentialOutcome::None(reason) => {
            log::info!("obstruction search not applicable: {reason}");
            Ok(None)
        }
    }
}
