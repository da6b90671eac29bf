//! Numerical tolerances shared across the pipeline.

/// Norm threshold below which a nonzero vector counts as lightlike.
pub const EPS_NULL: f64 = 1e-10;
/// Smallest effective beta accepted where the formulas divide by it.
pub const EPS_BETA: f64 = 1e-12;
/// Inflation margin for excluded-region membership tests.
pub const EPS_DOM: f64 = 1e-9;
/// Killing-pairing sign classification threshold.
pub const EPS_SIGN: f64 = 1e-9;
/// Largest admissible metric condition number.
pub const MAX_METRIC_CONDITION: f64 = 1e12;
/// Determinant floor for the acceleration solve.
pub const MIN_SYSTEM_DET: f64 = 1e-14;
/// Smallest |δ| for the lightlike system.
pub const MIN_DELTA_NORM: f64 = 1e-12;
/// Allowed drift of energy and Killing constant along integrated geodesics.
pub const TOL_CONS: f64 = 1e-7;
/// Endpoint tolerance for two-point shooting.
pub const TOL_BVP: f64 = 1e-8;
/// Gradient-norm stopping threshold for the path optimizer.
pub const TOL_GRAD: f64 = 1e-8;
/// H¹ gap between successive limit-scheme iterates that counts as converged.
pub const TOL_LIM: f64 = 1e-6;
/// Residual bound for limit-scheme candidates.
pub const TOL_LIMIT_RESIDUAL: f64 = 1e-6;
/// Default fixed ODE step.
pub const H_ODE: f64 = 1e-3;
/// Per-segment lightlike tolerance for arrival-time reconstruction.
pub const TOL_LIGHTLIKE: f64 = 1e-8;
/// Bases with inf beta above this skip the perturbation scheme.
pub const STATIONARY_BETA_FLOOR: f64 = 1e-3;
/// Growth of the velocity norm that marks a diverging minimizing sequence.
pub const DIVERGENCE_FACTOR: f64 = 1e3;
/// Armijo sufficient-decrease constant.
pub const ARMIJO_C1: f64 = 1e-4;
/// Slack of the Cauchy–Schwarz lower bound check.
pub const LOWER_BOUND_SLACK: f64 = 1e-9;
