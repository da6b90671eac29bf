//! Geodesic equations on S × ℝ, fixed-step integration and two-point shooting.
//!
//! With ω = gδ the Euler–Lagrange equations of ½(⟨ẋ,ẋ⟩ + 2⟨δ,ẋ⟩ṫ − βṫ²) read
//!
//! ```text
//! g(ẍ + Γ(ẋ,ẋ)) + ṫ F♭ẋ + ω ẗ + ½ ṫ² ∂β = 0,    F♭_ij = ∂_j ω_i − ∂_i ω_j
//! d/ds (ω·ẋ − β ṫ) = 0
//! ```
//!
//! Both are linear in (ẍ, ẗ) with the saddle matrix [[g, ω], [ωᵀ, −β]], whose
//! determinant is det(g)·(−β − |δ|²_g). It is solved directly, so the same
//! code serves β > 0 and the lightlike limit β ≡ 0 (where δ ≠ 0 is needed).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{LocalGeometry, MetricModel};
use crate::spacetime::SpacetimeModel;
use crate::tol::{EPS_BETA, H_ODE, MIN_DELTA_NORM, MIN_SYSTEM_DET, TOL_BVP, TOL_CONS};

/// Which geodesic system to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum System {
    /// β_eff = β (+ 1/n when the model is perturbed), required positive.
    Stationary,
    /// β ≡ 0 on the base, δ nonvanishing.
    Lightlike,
}

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub x: Vec<f64>,
    pub xdot: Vec<f64>,
    pub t: f64,
    pub tdot: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Acceleration {
    pub xddot: Vec<f64>,
    pub tddot: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub s: f64,
    pub state: State,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntegratorStats {
    pub steps: usize,
    pub seam_splits: usize,
    /// Largest full-step vs two-half-steps discrepancy (0 when not estimated).
    pub max_local_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSolution {
    pub system: System,
    pub samples: Vec<Sample>,
    pub energy: f64,
    pub killing: f64,
    pub energy_drift: f64,
    pub killing_drift: f64,
    /// Distance from the final sample to the requested endpoint (0 for plain integration).
    pub endpoint_error: f64,
    /// Max-norm of the discretized geodesic equations along the samples.
    pub residual: f64,
    pub stats: IntegratorStats,
}

impl GeodesicSolution {
    pub fn conserved(&self) -> bool {
        self.energy_drift <= TOL_CONS && self.killing_drift <= TOL_CONS
    }

    pub fn end(&self) -> &State {
        &self.samples.last().expect("solutions have samples").state
    }

    pub fn start(&self) -> &State {
        &self.samples[0].state
    }

    /// Samples as a path with times on the uniform grid they were produced on.
    pub fn to_path(&self) -> Result<crate::action::DiscretePath> {
        let nodes: Vec<Vec<f64>> = self.samples.iter().map(|s| s.state.x.clone()).collect();
        let times = self.samples.iter().map(|s| s.state.t).collect();
        crate::action::DiscretePath::from_nodes(&nodes)?.with_times(times)
    }
}

fn beta_of(model: &SpacetimeModel, system: System, local: &LocalGeometry) -> f64 {
    match system {
        System::Stationary => local.beta + model.beta_shift(),
        System::Lightlike => 0.0,
    }
}

fn check_system(model: &SpacetimeModel, system: System) -> Result<()> {
    if system == System::Lightlike && !model.base.is_lightlike() {
        return Err(Error::Precondition(
            "the lightlike system needs a base with beta identically zero".into(),
        ));
    }
    Ok(())
}

fn require_admissible(system: System, local: &LocalGeometry, beta: f64, x: &[f64]) -> Result<()> {
    match system {
        System::Stationary if !(beta > EPS_BETA) => Err(Error::DegenerateBeta {
            point: x.to_vec(),
            beta,
        }),
        System::Lightlike if local.delta.norm() < MIN_DELTA_NORM => Err(Error::VanishingDelta {
            point: x.to_vec(),
        }),
        _ => Ok(()),
    }
}

/// Solve the saddle system for (ẍ, ẗ).
fn accelerations(
    local: &LocalGeometry,
    beta: f64,
    x: &[f64],
    xdot: &DVector<f64>,
    tdot: f64,
) -> Result<(DVector<f64>, f64)> {
    let d = local.dim();
    let omega = local.omega();
    let domega = local.domega();
    let curl = &domega - domega.transpose();
    let mut rhs_x = -local.lowered_gamma_vv(xdot) - (&curl * xdot) * tdot - &local.dbeta * (0.5 * tdot * tdot);
    // Σ ∂_k ω_i ẋ^k ẋ^i
    let dw_vv = xdot.dot(&(&domega * xdot));
    let rhs_t = -dw_vv + local.dbeta.dot(xdot) * tdot;
    let mut a = DMatrix::zeros(d + 1, d + 1);
    a.view_mut((0, 0), (d, d)).copy_from(&local.g);
    for i in 0..d {
        a[(i, d)] = omega[i];
        a[(d, i)] = omega[i];
    }
    a[(d, d)] = -beta;
    let lu = a.lu();
    let det = lu.determinant();
    if !(det.abs() >= MIN_SYSTEM_DET) {
        return Err(Error::SingularSystem {
            point: x.to_vec(),
            det,
        });
    }
    let mut b = DVector::zeros(d + 1);
    b.rows_mut(0, d).copy_from(&rhs_x);
    b[d] = rhs_t;
    let sol = lu.solve(&b).ok_or_else(|| Error::SingularSystem {
        point: x.to_vec(),
        det,
    })?;
    rhs_x.copy_from(&sol.rows(0, d));
    Ok((rhs_x, sol[d]))
}

/// Accelerations of the stationary (or perturbed) system.
pub fn rhs_stationary(model: &SpacetimeModel, state: &State) -> Result<Acceleration> {
    rhs(model, System::Stationary, state)
}

/// Accelerations of the lightlike system (β ≡ 0).
pub fn rhs_lightlike(model: &SpacetimeModel, state: &State) -> Result<Acceleration> {
    rhs(model, System::Lightlike, state)
}

pub fn rhs(model: &SpacetimeModel, system: System, state: &State) -> Result<Acceleration> {
    check_system(model, system)?;
    let local = model.base.local(&state.x)?;
    let beta = beta_of(model, system, &local);
    require_admissible(system, &local, beta, &state.x)?;
    let xdot = DVector::from_column_slice(&state.xdot);
    let (xdd, tdd) = accelerations(&local, beta, &state.x, &xdot, state.tdot)?;
    Ok(Acceleration {
        xddot: xdd.iter().copied().collect(),
        tddot: tdd,
    })
}

/// Energy ⟨γ̇,γ̇⟩ and Killing constant ⟨γ̇,K⟩ of a state.
pub fn conserved_quantities(model: &SpacetimeModel, system: System, state: &State) -> Result<(f64, f64)> {
    let local = model.base.local(&state.x)?;
    let beta = beta_of(model, system, &local);
    let v = DVector::from_column_slice(&state.xdot);
    let a = local.omega().dot(&v);
    let e = local.inner(&v, &v) + 2.0 * a * state.tdot - beta * state.tdot * state.tdot;
    Ok((e, a - beta * state.tdot))
}

/// Flattened ODE state. Stationary runs carry (x, ẋ, t) and recover ṫ from the
/// conserved Killing constant; lightlike runs carry (x, ẋ, t, ṫ).
struct Flow<'a> {
    model: &'a SpacetimeModel<'a>,
    system: System,
    dim: usize,
    killing: f64,
}

impl Flow<'_> {
    fn len(&self) -> usize {
        match self.system {
            System::Stationary => 2 * self.dim + 1,
            System::Lightlike => 2 * self.dim + 2,
        }
    }

    fn pack(&self, s: &State) -> Vec<f64> {
        let mut y = Vec::with_capacity(self.len());
        y.extend_from_slice(&s.x);
        y.extend_from_slice(&s.xdot);
        y.push(s.t);
        if self.system == System::Lightlike {
            y.push(s.tdot);
        }
        y
    }

    fn unpack(&self, y: &[f64]) -> Result<(State, LocalGeometry, f64)> {
        let d = self.dim;
        let x = y[..d].to_vec();
        let local = self.model.base.local(&x)?;
        let beta = beta_of(self.model, self.system, &local);
        require_admissible(self.system, &local, beta, &x)?;
        let xdot = y[d..2 * d].to_vec();
        let tdot = match self.system {
            System::Lightlike => y[2 * d + 1],
            System::Stationary => {
                let v = DVector::from_column_slice(&xdot);
                (local.omega().dot(&v) - self.killing) / beta
            }
        };
        let state = State {
            x,
            xdot,
            t: y[2 * d],
            tdot,
        };
        Ok((state, local, beta))
    }

    fn state(&self, y: &[f64]) -> Result<State> {
        Ok(self.unpack(y)?.0)
    }

    fn derivative(&self, y: &[f64]) -> Result<Vec<f64>> {
        let (state, local, beta) = self.unpack(y)?;
        let v = DVector::from_column_slice(&state.xdot);
        let (xdd, tdd) = accelerations(&local, beta, &state.x, &v, state.tdot)?;
        let mut out = Vec::with_capacity(self.len());
        out.extend_from_slice(&state.xdot);
        out.extend(xdd.iter());
        out.push(state.tdot);
        if self.system == System::Lightlike {
            out.push(tdd);
        }
        Ok(out)
    }

    fn rk4(&self, y: &[f64], h: f64) -> Result<Vec<f64>> {
        let axpy = |a: &[f64], k: &[f64], c: f64| -> Vec<f64> {
            a.iter().zip(k).map(|(a, k)| a + c * k).collect()
        };
        let k1 = self.derivative(y)?;
        let k2 = self.derivative(&axpy(y, &k1, 0.5 * h))?;
        let k3 = self.derivative(&axpy(y, &k2, 0.5 * h))?;
        let k4 = self.derivative(&axpy(y, &k3, h))?;
        Ok((0..y.len())
            .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrateOptions {
    pub step: f64,
    /// Compare each step against two half steps (triples the cost).
    pub estimate_error: bool,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            step: H_ODE,
            estimate_error: true,
        }
    }
}

/// Integrate from `initial` over s ∈ [0, 1].
pub fn integrate(model: &SpacetimeModel, initial: &State, system: System) -> Result<GeodesicSolution> {
    integrate_with(model, initial, system, IntegrateOptions::default())
}

pub fn integrate_with(
    model: &SpacetimeModel,
    initial: &State,
    system: System,
    opts: IntegrateOptions,
) -> Result<GeodesicSolution> {
    check_system(model, system)?;
    let base = model.base;
    let d = base.dim();
    if initial.x.len() != d || initial.xdot.len() != d {
        return Err(Error::Precondition(format!(
            "initial state does not match model dimension {d}"
        )));
    }
    base.check_point(&initial.x)?;
    let (energy, killing) = conserved_quantities(model, system, initial)?;
    let flow = Flow {
        model,
        system,
        dim: d,
        killing,
    };
    let steps = (1.0 / opts.step).round().max(1.0) as usize;
    let h = 1.0 / steps as f64;
    let seams = base.has_seams();
    let mut stats = IntegratorStats::default();
    let mut y = flow.pack(initial);
    let first = flow.state(&y)?;
    let mut samples = vec![Sample {
        s: 0.0,
        state: first,
    }];
    let mut energy_drift: f64 = 0.0;
    let mut killing_drift: f64 = 0.0;

    let advance = |y: &[f64], h: f64, stats: &mut IntegratorStats| -> Result<Vec<f64>> {
        let full = flow.rk4(y, h)?;
        if !opts.estimate_error {
            return Ok(full);
        }
        let half = flow.rk4(&flow.rk4(y, 0.5 * h)?, 0.5 * h)?;
        let err = full
            .iter()
            .zip(&half)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        stats.max_local_error = stats.max_local_error.max(err);
        Ok(half)
    };

    for k in 0..steps {
        let s = (k + 1) as f64 * h;
        let exit = |reason: String| Error::DomainExit { s, reason };
        let mut next = advance(&y, h, &mut stats).map_err(|e| exit(e.to_string()))?;
        if seams {
            let before = base.seam_values(&y[..d]).map_err(|e| exit(e.to_string()))?;
            let after = base.seam_values(&next[..d]).map_err(|e| exit(e.to_string()))?;
            // Split at the first crossing, located by linear interpolation of the seam function.
            let theta = before
                .iter()
                .zip(&after)
                .filter(|(a, b)| a.signum() != b.signum() && **a != 0.0 && **b != 0.0)
                .map(|(a, b)| a / (a - b))
                .fold(1.0, f64::min);
            if theta > 1e-9 && theta < 1.0 - 1e-9 {
                stats.seam_splits += 1;
                let mid = advance(&y, theta * h, &mut stats).map_err(|e| exit(e.to_string()))?;
                next = advance(&mid, (1.0 - theta) * h, &mut stats).map_err(|e| exit(e.to_string()))?;
            }
        }
        if !base.in_domain(&next[..d]) || !base.segment_clear(&y[..d], &next[..d]) {
            return Err(exit("entered an excluded region".into()));
        }
        stats.steps += 1;
        y = next;
        let state = flow.state(&y).map_err(|e| exit(e.to_string()))?;
        let (e, c) = conserved_quantities(model, system, &state)?;
        energy_drift = energy_drift.max((e - energy).abs());
        killing_drift = killing_drift.max((c - killing).abs());
        samples.push(Sample { s, state });
    }

    let mut sol = GeodesicSolution {
        system,
        samples,
        energy,
        killing,
        energy_drift,
        killing_drift,
        endpoint_error: 0.0,
        residual: 0.0,
        stats,
    };
    sol.residual = residual(model, &sol.to_path()?, system)?;
    if !sol.conserved() {
        log::debug!(
            "conservation drift above tolerance: energy {:e}, killing {:e}",
            sol.energy_drift,
            sol.killing_drift
        );
    }
    Ok(sol)
}

/// First and second derivative of node values `f` at node `i` with spacing `h`:
/// fourth-order five-point stencils (centered, or one-sided next to an end) when
/// at least five nodes exist, else centered second differences.
fn node_derivatives(f: impl Fn(usize) -> f64, i: usize, m: usize, h: f64) -> (f64, f64) {
    if m < 4 {
        let (a, x, b) = (f(i - 1), f(i), f(i + 1));
        return ((b - a) / (2.0 * h), (b - 2.0 * x + a) / (h * h));
    }
    let one_sided = |g: &dyn Fn(usize) -> f64| {
        let v = [g(0), g(1), g(2), g(3), g(4)];
        (
            (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / (12.0 * h),
            (11.0 * v[0] - 20.0 * v[1] + 6.0 * v[2] + 4.0 * v[3] - v[4]) / (12.0 * h * h),
        )
    };
    if i == 1 {
        one_sided(&|k| f(k))
    } else if i + 1 == m {
        let (d1, d2) = one_sided(&|k| f(m - k));
        (-d1, d2)
    } else {
        let v = [f(i - 2), f(i - 1), f(i), f(i + 1), f(i + 2)];
        (
            (v[0] - 8.0 * v[1] + 8.0 * v[3] - v[4]) / (12.0 * h),
            (-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / (12.0 * h * h),
        )
    }
}

/// Max-norm of the geodesic equations at the interior nodes of a path with
/// times. Derivatives come from fourth-order difference stencils, so the
/// truncation error on a smooth solution at h = 1e-3 is far below the 1e-6
/// acceptance level.
pub fn residual(model: &SpacetimeModel, path: &crate::action::DiscretePath, system: System) -> Result<f64> {
    check_system(model, system)?;
    let times = path
        .times()
        .ok_or_else(|| Error::Precondition("residual needs time values on the path".into()))?;
    let m = path.segments();
    if m < 2 {
        return Err(Error::Precondition("residual needs at least three nodes".into()));
    }
    let h = path.h();
    let d = path.dim();
    let mut worst: f64 = 0.0;
    for i in 1..m {
        let x = path.node(i);
        let mut xdot = DVector::zeros(d);
        let mut xdd = DVector::zeros(d);
        for k in 0..d {
            (xdot[k], xdd[k]) = node_derivatives(|j| path.node(j)[k], i, m, h);
        }
        let (tdot, tdd) = node_derivatives(|j| times[j], i, m, h);
        let local = model.base.local(x)?;
        let beta = beta_of(model, system, &local);
        let omega = local.omega();
        let domega = local.domega();
        let curl = &domega - domega.transpose();
        let g_xdd = if local.flat { xdd.clone() } else { &local.g * &xdd };
        let eq_x = g_xdd + local.lowered_gamma_vv(&xdot) + (&curl * &xdot) * tdot + &omega * tdd
            + &local.dbeta * (0.5 * tdot * tdot);
        let eq_t = xdot.dot(&(&domega * &xdot)) + omega.dot(&xdd) - local.dbeta.dot(&xdot) * tdot - beta * tdd;
        worst = worst.max(eq_x.amax()).max(eq_t.abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy)]
pub struct ShootOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub step: f64,
}

impl Default for ShootOptions {
    fn default() -> Self {
        ShootOptions {
            tol: TOL_BVP,
            max_iter: 100,
            step: H_ODE,
        }
    }
}

/// Outcome of two-point shooting; `converged` is false on Newton stagnation.
#[derive(Debug, Clone)]
pub struct Shot {
    pub solution: GeodesicSolution,
    pub converged: bool,
    pub iterations: usize,
}

/// Damped Newton on the endpoint map (ẋ(0), ṫ(0)) ↦ (x(1), t(1)).
pub fn shoot(
    model: &SpacetimeModel,
    p: (&[f64], f64),
    q: (&[f64], f64),
    system: System,
    guess: (&[f64], f64),
) -> Result<Shot> {
    shoot_with(model, p, q, system, guess, ShootOptions::default())
}

pub fn shoot_with(
    model: &SpacetimeModel,
    p: (&[f64], f64),
    q: (&[f64], f64),
    system: System,
    guess: (&[f64], f64),
    opts: ShootOptions,
) -> Result<Shot> {
    let d = p.0.len();
    let fast = IntegrateOptions {
        step: opts.step,
        estimate_error: false,
    };
    let target: Vec<f64> = q.0.iter().copied().chain(std::iter::once(q.1)).collect();
    let state_of = |u: &[f64]| State {
        x: p.0.to_vec(),
        xdot: u[..d].to_vec(),
        t: p.1,
        tdot: u[d],
    };
    let miss = |u: &[f64]| -> Result<Vec<f64>> {
        let sol = integrate_with(model, &state_of(u), system, fast)?;
        let end = sol.end();
        Ok(end
            .x
            .iter()
            .copied()
            .chain(std::iter::once(end.t))
            .zip(&target)
            .map(|(a, b)| a - b)
            .collect())
    };
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();

    let mut u: Vec<f64> = guess.0.iter().copied().chain(std::iter::once(guess.1)).collect();
    let mut r = miss(&u)?;
    let mut iterations = 0;
    while norm(&r) > opts.tol && iterations < opts.max_iter {
        iterations += 1;
        let mut jac = DMatrix::zeros(d + 1, d + 1);
        for j in 0..=d {
            let eps = 1e-6 * (1.0 + u[j].abs());
            let mut up = u.clone();
            let mut dn = u.clone();
            up[j] += eps;
            dn[j] -= eps;
            let (rp, rm) = match (miss(&up), miss(&dn)) {
                (Ok(a), Ok(b)) => (a, b),
                // One-sided difference when the other side leaves the domain.
                (Ok(a), Err(_)) => (a, r.clone()),
                (Err(_), Ok(b)) => (r.clone(), b),
                (Err(e), Err(_)) => return Err(e),
            };
            let width = if rp == r || rm == r { eps } else { 2.0 * eps };
            for i in 0..=d {
                jac[(i, j)] = (rp[i] - rm[i]) / width;
            }
        }
        let Some(step) = jac.lu().solve(&DVector::from_column_slice(&r)) else {
            log::debug!("shooting Jacobian is singular after {iterations} iterations");
            break;
        };
        let current = norm(&r);
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(a, s)| a - lambda * s).collect();
            if let Ok(rt) = miss(&trial) {
                if norm(&rt) < current {
                    u = trial;
                    r = rt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            log::debug!("shooting stagnated at endpoint error {current:e}");
            break;
        }
    }
    let mut solution = integrate_with(
        model,
        &state_of(&u),
        system,
        IntegrateOptions {
            step: opts.step,
            estimate_error: true,
        },
    )?;
    let end = solution.end();
    let err = norm(
        &end.x
            .iter()
            .copied()
            .chain(std::iter::once(end.t))
            .zip(&target)
            .map(|(a, b)| a - b)
            .collect::<Vec<_>>(),
    );
    solution.endpoint_error = err;
    Ok(Shot {
        converged: err <= opts.tol,
        solution,
        iterations,
    })
}

/// Geodesic velocity equations of the perturbed system evaluated on the base,
/// exposed for diagnostics and tests.
pub fn lowered_equations(
    base: &MetricModel,
    beta_shift: f64,
    state: &State,
    acc: &Acceleration,
) -> Result<(Vec<f64>, f64)> {
    let local = base.local(&state.x)?;
    let beta = local.beta + beta_shift;
    let xdot = DVector::from_column_slice(&state.xdot);
    let xdd = DVector::from_column_slice(&acc.xddot);
    let omega = local.omega();
    let domega = local.domega();
    let curl = &domega - domega.transpose();
    let g_xdd = if local.flat { xdd.clone() } else { &local.g * &xdd };
    let eq_x = g_xdd + local.lowered_gamma_vv(&xdot) + (&curl * &xdot) * state.tdot + &omega * acc.tddot
        + &local.dbeta * (0.5 * state.tdot * state.tdot);
    let eq_t = xdot.dot(&(&domega * &xdot)) + omega.dot(&xdd)
        - local.dbeta.dot(&xdot) * state.tdot
        - beta * acc.tddot;
    Ok((eq_x.iter().copied().collect(), eq_t))
}
