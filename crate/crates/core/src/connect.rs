//! The connection pipeline: minimize the reduced functional over discrete
//! paths, sweep the perturbation parameter n, and classify the outcome.
//!
//! Stationary bases (β bounded away from zero) need a single minimization of
//! J followed by shooting. Lightlike and mixed bases go through the limit
//! scheme: Jₙ is minimized for n = n₀·2^k with warm starts, the time function
//! is reconstructed at each n, and a candidate is accepted only after shooting
//! reproduces it as a geodesic of the unperturbed metric. Nonexistence is
//! never concluded from a failing sequence alone; it needs a certificate from
//! [`crate::obstruction`].

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::action::{self, DiscretePath, EndpointPair};
use crate::error::{Error, Result};
use crate::geodesic::{self, GeodesicSolution, Sample, ShootOptions, State, System};
use crate::geometry::MetricModel;
use crate::obstruction::{self, ObstructionCertificate, SearchConfig};
use crate::optimize::{self, LbfgsOptions, MinimizeStatus, Minimum};
use crate::spacetime::SpacetimeModel;
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConnectConfig {
    /// Segments per discrete path.
    pub nodes: usize,
    pub n_start: f64,
    pub k_max: u32,
    pub tol_grad: f64,
    pub tol_lim: f64,
    pub tol_bvp: f64,
    /// Cells per axis for the obstruction search.
    pub grid: usize,
    pub seed: u64,
    /// Randomized restarts when the first descent stalls.
    pub multistart: usize,
    pub max_iter: usize,
}

impl Default for ConnectConfig {
    fn default() -> Self {
        ConnectConfig {
            nodes: 64,
            n_start: 8.0,
            k_max: 10,
            tol_grad: tol::TOL_GRAD,
            tol_lim: tol::TOL_LIM,
            tol_bvp: tol::TOL_BVP,
            grid: 512,
            seed: 0,
            multistart: 4,
            max_iter: 5000,
        }
    }
}

impl ConnectConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.nodes < 16 {
            problems.push(format!("nodes must be at least 16 (got {})", self.nodes));
        }
        if !(self.n_start > 0.0) {
            problems.push(format!("n_start must be positive (got {})", self.n_start));
        }
        if self.k_max > 20 {
            problems.push(format!("k_max must be at most 20 (got {})", self.k_max));
        }
        for (name, v) in [("tol_grad", self.tol_grad), ("tol_lim", self.tol_lim), ("tol_bvp", self.tol_bvp)] {
            if !(v > 0.0 && v < 1.0) {
                problems.push(format!("{name} must lie in (0, 1) (got {v})"));
            }
        }
        if self.grid < 8 {
            problems.push(format!("grid must be at least 8 (got {})", self.grid));
        }
        if self.max_iter == 0 {
            problems.push("max_iter must be positive".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Scenario(problems))
        }
    }

    fn lbfgs(&self) -> LbfgsOptions {
        LbfgsOptions {
            tol_grad: self.tol_grad,
            max_iter: self.max_iter,
            ..Default::default()
        }
    }
}

/// Sign pattern of the Killing pairing along a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionII {
    ConstantPositive,
    ConstantNegative,
    IdenticallyZero,
    SignChange,
}

pub fn classify_pairing(values: &[f64]) -> ConditionII {
    let eps = tol::EPS_SIGN;
    if values.iter().all(|v| v.abs() <= eps) {
        ConditionII::IdenticallyZero
    } else if values.iter().all(|v| *v >= eps) {
        ConditionII::ConstantPositive
    } else if values.iter().all(|v| *v <= -eps) {
        ConditionII::ConstantNegative
    } else {
        ConditionII::SignChange
    }
}

/// Classify ⟨δ, ẋ⟩ − β ṫ per segment of a path with times.
pub fn check_condition_ii(model: &SpacetimeModel, path: &DiscretePath) -> Result<ConditionII> {
    if path.segments() < 16 {
        return Err(Error::Precondition(format!(
            "condition check needs at least 16 segments, got {}",
            path.segments()
        )));
    }
    if path.times().is_none() {
        return Err(Error::Precondition("condition check needs time values on the path".into()));
    }
    Ok(classify_pairing(&action::killing_pairings(model, path)?))
}

/// Diagnostics for one value of n.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitRecord {
    /// Perturbation parameter; infinite for the unperturbed stationary functional.
    pub n: f64,
    pub jn: f64,
    pub xdot_l2: f64,
    pub tdot_l2: f64,
    /// Discrete H¹ distance to the previous iterate.
    pub h1_gap: Option<f64>,
    /// Residual of the iterate in the unperturbed geodesic equations (NaN when undefined).
    pub residual: f64,
    /// Range of the unperturbed Killing pairing along the iterate.
    pub pairing_min: f64,
    pub pairing_max: f64,
    pub iterations: usize,
    pub status: MinimizeStatus,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Diagnostics {
    pub records: Vec<LimitRecord>,
    pub reason: String,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct GeodesicOutcome {
    pub solution: GeodesicSolution,
    pub condition_ii: ConditionII,
    /// ½⟨γ̇, γ̇⟩, the action of the affinely parametrized geodesic.
    pub action: f64,
    /// The discrete minimizer the geodesic was refined from.
    pub discrete: Option<DiscretePath>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone)]
pub enum ConnectVerdict<S = GeodesicOutcome> {
    Geodesic(Box<S>),
    Obstructed {
        certificate: Box<ObstructionCertificate>,
        diagnostics: Diagnostics,
    },
    Inconclusive(Diagnostics),
}

impl<S> ConnectVerdict<S> {
    pub fn tag(&self) -> &'static str {
        match self {
            ConnectVerdict::Geodesic(_) => "Geodesic",
            ConnectVerdict::Obstructed { .. } => "Obstructed",
            ConnectVerdict::Inconclusive(_) => "Inconclusive",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            ConnectVerdict::Geodesic(_) => 0,
            ConnectVerdict::Obstructed { .. } => 2,
            ConnectVerdict::Inconclusive(_) => 3,
        }
    }

    pub fn geodesic(&self) -> Option<&S> {
        match self {
            ConnectVerdict::Geodesic(g) => Some(g),
            _ => None,
        }
    }

    pub fn diagnostics(&self) -> Option<&Diagnostics> {
        match self {
            ConnectVerdict::Geodesic(_) => None,
            ConnectVerdict::Obstructed { diagnostics, .. } => Some(diagnostics),
            ConnectVerdict::Inconclusive(d) => Some(d),
        }
    }
}

fn polyline_length(points: &[Vec<f64>]) -> f64 {
    points
        .windows(2)
        .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
        .sum()
}

fn polyline_clear(model: &MetricModel, points: &[Vec<f64>]) -> bool {
    points.iter().all(|x| model.in_domain(x)) && points.windows(2).all(|w| model.segment_clear(&w[0], &w[1]))
}

fn resampled(model: &MetricModel, points: &[Vec<f64>], m: usize) -> Option<DiscretePath> {
    let path = obstruction::resample_polyline(points, m).ok()?;
    let ok = (0..=m).all(|i| model.in_domain(path.node(i)))
        && (0..m).all(|i| model.segment_clear(path.node(i), path.node(i + 1)));
    ok.then_some(path)
}

/// Straight segment from p to q, or, if it crosses an excluded region, the
/// shortest path through one waypoint pushed past a face of that region.
pub fn initial_path(model: &MetricModel, p: &[f64], q: &[f64], m: usize) -> Result<DiscretePath> {
    if model.segment_clear(p, q) {
        return DiscretePath::straight(p, q, m);
    }
    let mid: Vec<f64> = p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect();
    let dist = polyline_length(&[p.to_vec(), q.to_vec()]);
    let mut margin = 0.1 * dist.max(1.0);
    for _ in 0..6 {
        let mut best: Option<(f64, Vec<Vec<f64>>)> = None;
        for region in model.excluded().iter().filter(|r| r.meets_segment(p, q, tol::EPS_DOM)) {
            for k in 0..model.dim() {
                for side in [region.lo[k] - margin, region.hi[k] + margin] {
                    let mut w = mid.clone();
                    w[k] = side;
                    let poly = vec![p.to_vec(), w, q.to_vec()];
                    if polyline_clear(model, &poly) {
                        let len = polyline_length(&poly);
                        if best.as_ref().is_none_or(|(l, _)| len < *l) {
                            best = Some((len, poly));
                        }
                    }
                }
            }
        }
        if let Some((_, poly)) = best {
            if let Some(path) = resampled(model, &poly, m) {
                return Ok(path);
            }
        }
        margin *= 2.0;
    }
    Err(Error::Precondition(
        "could not route an initial path around the excluded regions".into(),
    ))
}

/// Initial path through a randomly displaced waypoint (for multistart).
fn random_detour(model: &MetricModel, p: &[f64], q: &[f64], m: usize, seed: u64, branch: usize) -> Option<DiscretePath> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(branch as u64 + 1));
    let base = initial_path(model, p, q, m).ok()?;
    let centre = base.node(m / 2).to_vec();
    let radius = 0.5 * polyline_length(&[p.to_vec(), q.to_vec()]).max(1.0);
    for _ in 0..32 {
        let w: Vec<f64> = centre.iter().map(|c| c + rng.gen_range(-radius..radius)).collect();
        let poly = vec![p.to_vec(), w, q.to_vec()];
        if polyline_clear(model, &poly) {
            if let Some(path) = resampled(model, &poly, m) {
                return Some(path);
            }
        }
    }
    None
}

/// Quasi-Newton descent of J (or Jₙ on a perturbed model) over interior nodes.
pub fn minimize_jn(
    model: &SpacetimeModel,
    pair: &EndpointPair,
    init: &DiscretePath,
    config: &ConnectConfig,
) -> Result<(DiscretePath, Minimum)> {
    if init.segments() < 16 {
        return Err(Error::Precondition(format!(
            "minimization needs at least 16 segments, got {}",
            init.segments()
        )));
    }
    if init.start() != pair.xp.as_slice() || init.end() != pair.xq.as_slice() {
        return Err(Error::Precondition("initial path does not join the endpoints".into()));
    }
    init.check_domain(model)?;
    let d = init.dim();
    let dt = pair.delta_t();
    let f = |x: &[f64]| {
        let path = DiscretePath::from_flat(d, x.to_vec())?;
        action::objective(model, &path, dt)
    };
    let min = optimize::minimize(f, init.flat().to_vec(), config.lbfgs())?;
    let path = DiscretePath::from_flat(d, min.x.clone())?;
    Ok((path, min))
}

fn better(a: &(DiscretePath, Minimum), b: &(DiscretePath, Minimum)) -> Ordering {
    a.1.value
        .total_cmp(&b.1.value)
        .then_with(|| {
            a.0.flat()
                .iter()
                .zip(b.0.flat())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
}

/// Minimize from `init`; if the descent stalls, also from randomized detours,
/// and keep the best result.
fn minimize_with_restarts(
    model: &SpacetimeModel,
    pair: &EndpointPair,
    init: &DiscretePath,
    config: &ConnectConfig,
    notes: &mut Vec<String>,
) -> Result<(DiscretePath, Minimum)> {
    let first = minimize_jn(model, pair, init, config)?;
    if first.1.status == MinimizeStatus::Converged || config.multistart == 0 {
        return Ok(first);
    }
    notes.push(format!(
        "first descent ended with {:?} at gradient norm {:e}; trying {} restarts",
        first.1.status, first.1.grad_norm, config.multistart
    ));
    let branches: Vec<(DiscretePath, Minimum)> = (0..config.multistart)
        .into_par_iter()
        .filter_map(|b| {
            let start = random_detour(model.base, &pair.xp, &pair.xq, init.segments(), config.seed, b)?;
            minimize_jn(model, pair, &start, config).ok()
        })
        .collect();
    Ok(branches
        .into_iter()
        .chain(std::iter::once(first))
        .min_by(better)
        .expect("at least the first descent is present"))
}

fn l2_norms(path: &DiscretePath, model: &SpacetimeModel) -> Result<(f64, f64)> {
    let h = path.h();
    let mut xdot = 0.0;
    for i in 0..path.segments() {
        let v = path.velocity(i);
        let mid = path.midpoint(i);
        let g = model.base.metric_at(&mid)?;
        xdot += h * v.dot(&(&g * &v));
    }
    let tdot = path
        .time_velocities()
        .map(|t| t.iter().map(|v| h * v * v).sum::<f64>())
        .unwrap_or(0.0);
    Ok((xdot.sqrt(), tdot.sqrt()))
}

/// Discrete H¹ distance between two lifted paths with the same node count.
pub fn h1_distance(a: &DiscretePath, b: &DiscretePath) -> f64 {
    let h = a.h();
    let mut sum = 0.0;
    let (ta, tb) = (a.times().unwrap_or(&[]), b.times().unwrap_or(&[]));
    for i in 0..a.node_count() {
        sum += h * a.node(i).iter().zip(b.node(i)).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
        if let (Some(x), Some(y)) = (ta.get(i), tb.get(i)) {
            sum += h * (x - y).powi(2);
        }
    }
    let (va, vb) = (a.time_velocities(), b.time_velocities());
    for i in 0..a.segments() {
        sum += h * (a.velocity(i) - b.velocity(i)).norm_squared();
        if let (Some(x), Some(y)) = (&va, &vb) {
            sum += h * (x[i] - y[i]).powi(2);
        }
    }
    sum.sqrt()
}

fn limit_system(base: &MetricModel) -> System {
    if base.is_lightlike() {
        System::Lightlike
    } else {
        System::Stationary
    }
}

fn one_sided_start(values: impl Fn(usize) -> f64, h: f64) -> f64 {
    (-3.0 * values(0) + 4.0 * values(1) - values(2)) / (2.0 * h)
}

/// Shoot from the initial velocity of a lifted discrete path and accept the
/// result only if it is a verified geodesic with a sign-definite pairing.
fn refine(
    model: &SpacetimeModel,
    system: System,
    pair: &EndpointPair,
    path: &DiscretePath,
    config: &ConnectConfig,
) -> std::result::Result<GeodesicOutcome, String> {
    let times = path.times().ok_or("candidate has no time values")?;
    let h = path.h();
    let v0: Vec<f64> = (0..path.dim())
        .map(|k| one_sided_start(|i| path.node(i)[k], h))
        .collect();
    let t0 = one_sided_start(|i| times[i], h);
    let opts = ShootOptions {
        tol: config.tol_bvp,
        ..Default::default()
    };
    let shot = geodesic::shoot_with(model, (&pair.xp, pair.tp), (&pair.xq, pair.tq), system, (&v0, t0), opts)
        .map_err(|e| format!("shooting failed: {e}"))?;
    let sol = shot.solution;
    if !shot.converged {
        return Err(format!("shooting stopped at endpoint error {:e}", sol.endpoint_error));
    }
    if !(sol.residual <= tol::TOL_LIMIT_RESIDUAL) {
        return Err(format!("geodesic residual {:e} too large", sol.residual));
    }
    if !sol.conserved() {
        return Err(format!(
            "conservation drift too large (energy {:e}, Killing {:e})",
            sol.energy_drift, sol.killing_drift
        ));
    }
    let lifted = sol.to_path().map_err(|e| e.to_string())?;
    let condition_ii = check_condition_ii(&SpacetimeModel::new(model.base), &lifted).map_err(|e| e.to_string())?;
    if condition_ii == ConditionII::SignChange {
        return Err("shot geodesic has a sign-changing Killing pairing".into());
    }
    Ok(GeodesicOutcome {
        action: 0.5 * sol.energy,
        condition_ii,
        solution: sol,
        discrete: Some(path.clone()),
        diagnostics: Diagnostics::default(),
    })
}

struct ScheduleOutcome {
    diagnostics: Diagnostics,
    geodesic: Option<GeodesicOutcome>,
    last: Option<DiscretePath>,
    diverged: bool,
}

/// Range of ⟨δ, ẋ⟩ − β ṫ along the polygon itself, sampled at nine points per
/// segment. Midpoint values alone miss sign changes when a long segment steps
/// over a region where δ reverses.
fn pairing_range(base: &MetricModel, lifted: &DiscretePath) -> Result<(f64, f64)> {
    let tdot = lifted.time_velocities().unwrap_or_else(|| vec![0.0; lifted.segments()]);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, td) in tdot.iter().enumerate() {
        let v = lifted.velocity(i);
        let (a, b) = (lifted.node(i), lifted.node(i + 1));
        for j in 0..=8 {
            let s = j as f64 / 8.0;
            let x: Vec<f64> = a.iter().zip(b).map(|(u, w)| u + s * (w - u)).collect();
            let local = base.local(&x)?;
            let value = local.omega().dot(&v) - local.beta * td;
            lo = lo.min(value);
            hi = hi.max(value);
        }
    }
    Ok((lo, hi))
}

fn record_for(
    base: &MetricModel,
    model: &SpacetimeModel,
    n: f64,
    lifted: &DiscretePath,
    min: &Minimum,
    previous: Option<&DiscretePath>,
) -> Result<LimitRecord> {
    let (xdot_l2, tdot_l2) = l2_norms(lifted, model)?;
    let unperturbed = SpacetimeModel::new(base);
    let (pairing_min, pairing_max) = pairing_range(base, lifted)?;
    let residual = geodesic::residual(&unperturbed, lifted, limit_system(base)).unwrap_or(f64::NAN);
    Ok(LimitRecord {
        n,
        jn: min.value,
        xdot_l2,
        tdot_l2,
        h1_gap: previous.map(|p| h1_distance(p, lifted)),
        residual,
        pairing_min,
        pairing_max,
        iterations: min.iterations,
        status: min.status,
    })
}

fn run_schedule(base: &MetricModel, pair: &EndpointPair, config: &ConnectConfig, stop_early: bool) -> Result<ScheduleOutcome> {
    let dt = pair.delta_t();
    let system = limit_system(base);
    let mut out = ScheduleOutcome {
        diagnostics: Diagnostics::default(),
        geodesic: None,
        last: None,
        diverged: false,
    };
    let mut current = initial_path(base, &pair.xp, &pair.xq, config.nodes)?;
    let mut previous: Option<DiscretePath> = None;
    for k in 0..=config.k_max {
        let n = config.n_start * f64::powi(2.0, k as i32);
        let model = SpacetimeModel::perturbed(base, n)?;
        let (path, min) = if k == 0 {
            minimize_with_restarts(&model, pair, &current, config, &mut out.diagnostics.notes)?
        } else {
            minimize_jn(&model, pair, &current, config)?
        };
        let lifted = action::reconstruct_time(&model, &path, dt, pair.tp)?;
        let record = record_for(base, &model, n, &lifted, &min, previous.as_ref())?;
        log::info!(
            "n = {n}: J = {:.12e}, |xdot| = {:.6e}, gap = {:?}, status {:?}",
            record.jn,
            record.xdot_l2,
            record.h1_gap,
            record.status
        );
        let gap = record.h1_gap;
        let diverged = record.xdot_l2 > tol::DIVERGENCE_FACTOR * out.diagnostics.records.first().unwrap_or(&record).xdot_l2;
        out.diagnostics.records.push(record);
        current = path;
        previous = Some(lifted.clone());
        out.last = Some(lifted.clone());
        if stop_early && diverged {
            out.diverged = true;
            out.diagnostics.reason = format!("minimizing sequence diverged at n = {n}");
            return Ok(out);
        }
        if stop_early && gap.is_some_and(|g| g <= config.tol_lim) {
            match refine(&SpacetimeModel::new(base), system, pair, &lifted, config) {
                Ok(geo) => {
                    out.geodesic = Some(geo);
                    return Ok(out);
                }
                Err(why) => out.diagnostics.notes.push(format!("n = {n}: candidate rejected: {why}")),
            }
        }
    }
    if stop_early {
        // The stopping rule is heuristic; give the last iterate one shot anyway.
        if let Some(last) = &out.last {
            match refine(&SpacetimeModel::new(base), system, pair, last, config) {
                Ok(geo) => {
                    out.diagnostics.notes.push("accepted the final iterate after shooting".into());
                    out.geodesic = Some(geo);
                    return Ok(out);
                }
                Err(why) => out.diagnostics.notes.push(format!("final iterate rejected: {why}")),
            }
        }
        out.diagnostics.reason = format!("no convergence by k = {}", config.k_max);
    }
    Ok(out)
}

/// The limit scheme for endpoints with Δt ≥ 0.
pub fn limit_scheme(base: &MetricModel, pair: &EndpointPair, config: &ConnectConfig) -> Result<ConnectVerdict> {
    if pair.delta_t() < 0.0 {
        return Err(Error::Precondition("limit scheme needs Δt ≥ 0; normalize the endpoints first".into()));
    }
    let out = run_schedule(base, pair, config, true)?;
    let mut diagnostics = out.diagnostics;
    if let Some(mut geo) = out.geodesic {
        geo.diagnostics = diagnostics;
        return Ok(ConnectVerdict::Geodesic(Box::new(geo)));
    }
    if out.diverged {
        diagnostics.notes.push("divergence alone does not establish nonexistence".into());
    }
    obstruction_or_inconclusive(base, pair, config, diagnostics)
}

fn obstruction_or_inconclusive(
    base: &MetricModel,
    pair: &EndpointPair,
    config: &ConnectConfig,
    mut diagnostics: Diagnostics,
) -> Result<ConnectVerdict> {
    let search = SearchConfig {
        resolution: config.grid,
        ..Default::default()
    };
    match obstruction::certify(base, &pair.xp, &pair.xq, search) {
        Ok(Some(cert)) if cert.certifies() => {
            return Ok(ConnectVerdict::Obstructed {
                certificate: Box::new(cert),
                diagnostics,
            })
        }
        Ok(Some(_)) => diagnostics
            .notes
            .push("a monotone grid path exists; no certificate of obstruction".into()),
        Ok(None) => diagnostics
            .notes
            .push("obstruction search not applicable to this model".into()),
        Err(e) => diagnostics.notes.push(format!("obstruction search failed: {e}")),
    }
    Ok(ConnectVerdict::Inconclusive(diagnostics))
}

/// Smallest β seen on the straight segment and on seeded samples of the
/// endpoints' bounding box.
fn beta_floor(base: &MetricModel, pair: &EndpointPair, seed: u64) -> f64 {
    let d = base.dim();
    let span: Vec<(f64, f64)> = (0..d)
        .map(|k| {
            let (a, b) = (pair.xp[k].min(pair.xq[k]), pair.xp[k].max(pair.xq[k]));
            let margin = 0.5 * (b - a) + 1.0;
            (a - margin, b + margin)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xbe7a);
    let mut points: Vec<Vec<f64>> = (0..=64)
        .map(|i| {
            let s = i as f64 / 64.0;
            pair.xp.iter().zip(&pair.xq).map(|(a, b)| a + s * (b - a)).collect()
        })
        .collect();
    points.extend((0..256).map(|_| span.iter().map(|(a, b)| rng.gen_range(*a..*b)).collect()));
    points
        .iter()
        .filter(|x| base.in_domain(x))
        .filter_map(|x| base.beta_at(x).ok())
        .fold(f64::INFINITY, f64::min)
}

fn stationary(base: &MetricModel, pair: &EndpointPair, config: &ConnectConfig) -> Result<ConnectVerdict> {
    let model = SpacetimeModel::new(base);
    let mut diagnostics = Diagnostics::default();
    let init = initial_path(base, &pair.xp, &pair.xq, config.nodes)?;
    let (path, min) = minimize_with_restarts(&model, pair, &init, config, &mut diagnostics.notes)?;
    let lifted = action::reconstruct_time(&model, &path, pair.delta_t(), pair.tp)?;
    diagnostics
        .records
        .push(record_for(base, &model, f64::INFINITY, &lifted, &min, None)?);
    match refine(&model, System::Stationary, pair, &lifted, config) {
        Ok(mut geo) => {
            geo.diagnostics = diagnostics;
            Ok(ConnectVerdict::Geodesic(Box::new(geo)))
        }
        Err(why) => {
            diagnostics.reason = format!("minimizer could not be verified: {why}");
            Ok(ConnectVerdict::Inconclusive(diagnostics))
        }
    }
}

fn reverse_solution(sol: &GeodesicSolution) -> GeodesicSolution {
    let samples = sol
        .samples
        .iter()
        .rev()
        .map(|s| Sample {
            s: 1.0 - s.s,
            state: State {
                x: s.state.x.clone(),
                xdot: s.state.xdot.iter().map(|v| -v).collect(),
                t: s.state.t,
                tdot: -s.state.tdot,
            },
        })
        .collect();
    GeodesicSolution {
        samples,
        killing: -sol.killing,
        ..sol.clone()
    }
}

/// Whether the model is handled by the stationary fast path for these endpoints.
pub fn is_stationary(base: &MetricModel, pair: &EndpointPair, config: &ConnectConfig) -> bool {
    !base.is_lightlike() && beta_floor(base, pair, config.seed) > tol::STATIONARY_BETA_FLOOR
}

/// Full pipeline for arbitrary endpoints.
pub fn connect(base: &MetricModel, pair: &EndpointPair, config: &ConnectConfig) -> Result<ConnectVerdict> {
    config.validate()?;
    base.check_point(&pair.xp)?;
    base.check_point(&pair.xq)?;
    let (normal, swapped) = pair.normalized();
    let verdict = if is_stationary(base, &normal, config) {
        stationary(base, &normal, config)?
    } else {
        limit_scheme(base, &normal, config)?
    };
    Ok(match verdict {
        ConnectVerdict::Geodesic(mut geo) if swapped => {
            geo.solution = reverse_solution(&geo.solution);
            geo.condition_ii = match geo.condition_ii {
                ConditionII::ConstantPositive => ConditionII::ConstantNegative,
                ConditionII::ConstantNegative => ConditionII::ConstantPositive,
                other => other,
            };
            geo.discrete = geo.discrete.map(|d| d.reversed());
            ConnectVerdict::Geodesic(geo)
        }
        other => other,
    })
}

/// Per-n diagnostics over the whole schedule, without early stopping.
pub fn sweep(base: &MetricModel, pair: &EndpointPair, config: &ConnectConfig) -> Result<Vec<LimitRecord>> {
    config.validate()?;
    base.check_point(&pair.xp)?;
    base.check_point(&pair.xq)?;
    let (normal, _) = pair.normalized();
    Ok(run_schedule(base, &normal, config, false)?.diagnostics.records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{catalog, ExcludedRegion};

    fn quick() -> ConnectConfig {
        ConnectConfig {
            k_max: 3,
            ..Default::default()
        }
    }

    #[test]
    fn flat_lightlike_is_straight() {
        let base = catalog::flat_default(2).unwrap();
        let pair = EndpointPair::new(vec![0.0, 0.0], 0.0, vec![3.0, 4.0], 2.0).unwrap();
        let v = connect(&base, &pair, &quick()).unwrap();
        let geo = v.geodesic().expect("geodesic");
        assert!((geo.action - 18.5).abs() < 1e-8);
        assert_eq!(geo.condition_ii, ConditionII::ConstantPositive);
        assert!((geo.solution.killing - 3.0).abs() < 1e-9);
        for s in &geo.solution.samples {
            assert!((s.state.x[0] - 3.0 * s.s).abs() < 1e-9 && (s.state.x[1] - 4.0 * s.s).abs() < 1e-9);
        }
    }

    #[test]
    fn stationary_flat_is_straight() {
        let base = catalog::stationary_flat(2).unwrap();
        let pair = EndpointPair::new(vec![0.0, 0.0], 0.0, vec![3.0, 4.0], 2.0).unwrap();
        let v = connect(&base, &pair, &quick()).unwrap();
        let geo = v.geodesic().expect("geodesic");
        assert!((geo.action - 10.5).abs() < 1e-8);
        assert_eq!(geo.diagnostics.records[0].n, f64::INFINITY);
        // Reversed time direction gives the same curve traversed backwards.
        let back = EndpointPair::new(vec![3.0, 4.0], 2.0, vec![0.0, 0.0], 0.0).unwrap();
        let v = connect(&base, &back, &quick()).unwrap();
        let geo = v.geodesic().unwrap();
        let x0 = &geo.solution.start().x;
        assert!((x0[0] - 3.0).abs() < 1e-9 && (x0[1] - 4.0).abs() < 1e-9);
        assert!((geo.solution.start().tdot + 2.0).abs() < 1e-9);
    }

    #[test]
    fn zigzag_relaxes_to_segment() {
        let base = MetricModel::from_sources(2, "[0, 0]", "1").unwrap();
        let model = SpacetimeModel::new(&base);
        let pair = EndpointPair::new(vec![0.0, 0.0], 0.0, vec![2.0, 1.0], 1.0).unwrap();
        let zig = DiscretePath::from_fn(2, 32, |s, x| {
            let bump = if (s * 32.0).round() as usize % 2 == 1 { 0.3 } else { 0.0 };
            x[0] = 2.0 * s + bump;
            x[1] = s - bump;
        })
        .unwrap();
        let (path, min) = minimize_jn(&model, &pair, &zig, &ConnectConfig::default()).unwrap();
        assert_eq!(min.status, MinimizeStatus::Converged, "{min:?}");
        assert!(min.trace.windows(2).all(|w| w[1] <= w[0] + 8.0 * f64::EPSILON * w[0].abs().max(1.0)));
        for i in 0..=32 {
            let s = i as f64 / 32.0;
            let x = path.node(i);
            assert!((x[0] - 2.0 * s).abs() < 1e-6 && (x[1] - s).abs() < 1e-6);
        }
        // An optimal start is returned unchanged.
        let straight = DiscretePath::straight(&[0.0, 0.0], &[2.0, 1.0], 32).unwrap();
        let (same, min) = minimize_jn(&model, &pair, &straight, &ConnectConfig::default()).unwrap();
        assert_eq!(min.iterations, 0);
        assert_eq!(same, straight);
    }

    #[test]
    fn condition_ii_classes() {
        let zero = catalog::flat(2, "[0, 0]", "0").unwrap();
        let path = DiscretePath::from_fn(2, 32, |s, x| {
            x[0] = s.sin();
            x[1] = s * s;
        })
        .unwrap()
        .with_times((0..=32).map(|i| (i as f64).sqrt()).collect())
        .unwrap();
        assert_eq!(
            check_condition_ii(&SpacetimeModel::new(&zero), &path).unwrap(),
            ConditionII::IdenticallyZero
        );
        let wall = catalog::cos3_wall().unwrap();
        let through = DiscretePath::straight(&[0.0; 3], &[1.5 * std::f64::consts::PI, 0.0, 0.0], 64)
            .unwrap()
            .with_affine_times(0.0, 0.0);
        assert_eq!(
            check_condition_ii(&SpacetimeModel::new(&wall), &through).unwrap(),
            ConditionII::SignChange
        );
    }

    #[test]
    fn detour_avoids_box() {
        let base = catalog::flat_default(2)
            .unwrap()
            .with_excluded(ExcludedRegion::new(vec![-0.5, -0.5], vec![0.5, 0.5]).unwrap())
            .unwrap();
        let path = initial_path(&base, &[-2.0, 0.0], &[2.0, 0.0], 64).unwrap();
        assert_eq!(path.start(), &[-2.0, 0.0]);
        assert_eq!(path.end(), &[2.0, 0.0]);
        for i in 0..64 {
            assert!(base.segment_clear(path.node(i), path.node(i + 1)));
        }
    }

    #[test]
    fn h1_distance_of_shifted_lines() {
        let a = DiscretePath::straight(&[0.0], &[1.0], 16).unwrap().with_affine_times(0.0, 1.0);
        let b = DiscretePath::straight(&[0.5], &[1.5], 16).unwrap().with_affine_times(0.0, 1.0);
        // Node term: 17 nodes · h · 0.25; velocities agree.
        assert!((h1_distance(&a, &b) - (17.0 / 16.0 * 0.25f64).sqrt()).abs() < 1e-15);
    }
}
