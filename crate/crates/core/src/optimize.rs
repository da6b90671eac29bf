//! Limited-memory BFGS with Armijo backtracking.
//!
//! Objective evaluations may fail (a trial point left the admissible domain);
//! such trial steps are halved and retried, and each retry counts as an
//! iteration.

use std::collections::VecDeque;

use crate::error::Result;
use crate::tol::ARMIJO_C1;

#[derive(Debug, Clone, Copy)]
pub struct LbfgsOptions {
    pub memory: usize,
    pub tol_grad: f64,
    pub max_iter: usize,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        LbfgsOptions {
            memory: 10,
            tol_grad: crate::tol::TOL_GRAD,
            max_iter: 5000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MinimizeStatus {
    Converged,
    MaxIterations,
    /// No admissible decrease along the search direction.
    LineSearchFailed,
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub status: MinimizeStatus,
    /// Objective after every accepted step, starting with the initial value.
    /// Nonincreasing up to the rounding noise of the objective (8 ulps of |f|).
    pub trace: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimize `f`, which returns the value and gradient. The initial point must be admissible.
pub fn minimize<F>(mut f: F, x0: Vec<f64>, opts: LbfgsOptions) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let mut x = x0;
    let (mut value, mut grad) = f(&x)?;
    let mut trace = vec![value];
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);
    let mut iterations = 0;
    let mut status = MinimizeStatus::MaxIterations;

    while iterations < opts.max_iter {
        let gnorm = dot(&grad, &grad).sqrt();
        if gnorm <= opts.tol_grad {
            status = MinimizeStatus::Converged;
            break;
        }
        // Two-loop recursion.
        let mut q = grad.clone();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &q);
            for (qi, yi) in q.iter_mut().zip(y) {
                *qi -= a * yi;
            }
            alphas.push(a);
        }
        let gamma = match history.back() {
            Some((s, y, _)) => dot(s, y) / dot(y, y),
            None => 1.0 / gnorm.max(1.0),
        };
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            for (qi, si) in q.iter_mut().zip(s) {
                *qi += (a - b) * si;
            }
        }
        let mut dir: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut slope = dot(&grad, &dir);
        if !(slope < 0.0) {
            history.clear();
            dir = grad.iter().map(|v| -v / gnorm.max(1.0)).collect();
            slope = dot(&grad, &dir);
        }

        let mut step = 1.0;
        let mut accepted = None;
        while iterations < opts.max_iter {
            iterations += 1;
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + step * d).collect();
            if let Ok((tv, tg)) = f(&trial) {
                let expected = ARMIJO_C1 * step * slope;
                let armijo = tv <= value + expected;
                // Once the predicted decrease is below the rounding noise of the
                // objective, values cannot rank steps; accept a step that stays
                // within that noise and shrinks the gradient.
                let noise = 8.0 * f64::EPSILON * value.abs().max(1.0);
                let rounding = -expected <= noise && tv <= value + noise && dot(&tg, &tg).sqrt() < gnorm;
                if tv.is_finite() && (armijo || rounding) {
                    accepted = Some((trial, tv, tg));
                    break;
                }
            }
            step *= 0.5;
            if step < 1e-20 {
                break;
            }
        }
        let Some((xn, vn, gn)) = accepted else {
            if iterations < opts.max_iter {
                status = MinimizeStatus::LineSearchFailed;
            }
            break;
        };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if history.len() == opts.memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        x = xn;
        value = vn;
        grad = gn;
        trace.push(value);
    }
    let grad_norm = dot(&grad, &grad).sqrt();
    if grad_norm <= opts.tol_grad {
        status = MinimizeStatus::Converged;
    }
    Ok(Minimum {
        x,
        value,
        grad_norm,
        iterations,
        status,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            let v = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
            let g = vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)];
            Ok((v, g))
        };
        let m = minimize(f, vec![-1.2, 1.0], LbfgsOptions::default()).unwrap();
        assert_eq!(m.status, MinimizeStatus::Converged);
        assert!((m.x[0] - 1.0).abs() < 1e-7 && (m.x[1] - 1.0).abs() < 1e-7);
        assert!(m.trace.windows(2).all(|w| w[1] <= w[0] + 8.0 * f64::EPSILON * w[0].abs().max(1.0)));
    }

    #[test]
    fn inadmissible_region_is_avoided() {
        // Minimum of (x-2)² behind a wall at x > 1.5: the iterate stops short of it.
        let f = |x: &[f64]| {
            if x[0] > 1.5 {
                return Err(Error::Precondition("wall".into()));
            }
            Ok(((x[0] - 2.0).powi(2), vec![2.0 * (x[0] - 2.0)]))
        };
        let m = minimize(
            f,
            vec![0.0],
            LbfgsOptions {
                max_iter: 200,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(m.x[0] <= 1.5 && m.x[0] > 1.4);
        assert_ne!(m.status, MinimizeStatus::Converged);
    }
}
