use std::f64::consts::PI;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::ast::{BinOp, Expr, ExprKind, Func};
use super::{FieldError, MAX_VARS, SEAM_TOL};

/// Forward-mode first-order jet: a value with its gradient over all variable slots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: [f64; MAX_VARS],
}

impl Jet {
    pub fn constant(value: f64) -> Jet {
        Jet {
            value,
            grad: [0.0; MAX_VARS],
        }
    }

    pub fn variable(value: f64, slot: usize) -> Jet {
        let mut grad = [0.0; MAX_VARS];
        grad[slot] = 1.0;
        Jet { value, grad }
    }

    fn chain(self, value: f64, slope: f64) -> Jet {
        let mut grad = self.grad;
        for g in grad.iter_mut() {
            *g *= slope;
        }
        Jet { value, grad }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut grad = self.grad;
        for (g, h) in grad.iter_mut().zip(o.grad) {
            *g += h;
        }
        Jet {
            value: self.value + o.value,
            grad,
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        let mut grad = self.grad;
        for (g, h) in grad.iter_mut().zip(o.grad) {
            *g -= h;
        }
        Jet {
            value: self.value - o.value,
            grad,
        }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut grad = [0.0; MAX_VARS];
        for (k, g) in grad.iter_mut().enumerate() {
            *g = self.grad[k] * o.value + self.value * o.grad[k];
        }
        Jet {
            value: self.value * o.value,
            grad,
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let value = self.value / o.value;
        let mut grad = [0.0; MAX_VARS];
        for (k, g) in grad.iter_mut().enumerate() {
            *g = (self.grad[k] - value * o.grad[k]) / o.value;
        }
        Jet { value, grad }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.chain(-self.value, -1.0)
    }
}

/// Number type the evaluator is generic over.
pub(crate) trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    /// Whether this type carries derivatives (seams then demand C¹ agreement).
    const DIFFERENTIATING: bool;
    fn constant(v: f64) -> Self;
    fn variable(v: f64, slot: usize) -> Self;
    fn value(&self) -> f64;
    fn is_locally_constant(&self) -> bool;
    fn agrees_with(&self, other: &Self) -> bool;
    fn apply(self, func: Func, value: f64, slope: f64) -> Self;
    fn powi(self, k: i32) -> Self;
}

impl Scalar for f64 {
    const DIFFERENTIATING: bool = false;
    fn constant(v: f64) -> f64 {
        v
    }
    fn variable(v: f64, _slot: usize) -> f64 {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn is_locally_constant(&self) -> bool {
        true
    }
    fn agrees_with(&self, other: &f64) -> bool {
        (self - other).abs() <= SEAM_TOL * (1.0 + self.abs())
    }
    fn apply(self, _func: Func, value: f64, _slope: f64) -> f64 {
        value
    }
    fn powi(self, k: i32) -> f64 {
        f64::powi(self, k)
    }
}

impl Scalar for Jet {
    const DIFFERENTIATING: bool = true;
    fn constant(v: f64) -> Jet {
        Jet::constant(v)
    }
    fn variable(v: f64, slot: usize) -> Jet {
        Jet::variable(v, slot)
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn is_locally_constant(&self) -> bool {
        self.grad.iter().all(|g| *g == 0.0)
    }
    fn agrees_with(&self, other: &Jet) -> bool {
        (self.value - other.value).abs() <= SEAM_TOL * (1.0 + self.value.abs())
            && self
                .grad
                .iter()
                .zip(other.grad.iter())
                .all(|(a, b)| (a - b).abs() <= SEAM_TOL)
    }
    fn apply(self, _func: Func, value: f64, slope: f64) -> Jet {
        self.chain(value, slope)
    }
    fn powi(self, k: i32) -> Jet {
        let value = self.value.powi(k);
        let slope = if k == 0 {
            0.0
        } else {
            k as f64 * self.value.powi(k - 1)
        };
        self.chain(value, slope)
    }
}

fn domain(offset: usize, message: impl Into<String>) -> FieldError {
    FieldError::Domain {
        offset,
        message: message.into(),
    }
}

pub(crate) fn eval<T: Scalar>(e: &Expr, vars: &[f64]) -> Result<T, FieldError> {
    Ok(match &e.kind {
        ExprKind::Num(v) => T::constant(*v),
        ExprKind::Pi => T::constant(PI),
        ExprKind::Var(i) => T::variable(vars[*i], *i),
        ExprKind::Neg(a) => -eval::<T>(a, vars)?,
        ExprKind::Binary(op, a, b) => {
            let x = eval::<T>(a, vars)?;
            match op {
                BinOp::Add => x + eval::<T>(b, vars)?,
                BinOp::Sub => x - eval::<T>(b, vars)?,
                BinOp::Mul => x * eval::<T>(b, vars)?,
                BinOp::Div => {
                    let y = eval::<T>(b, vars)?;
                    if y.value() == 0.0 {
                        return Err(domain(e.offset, "division by zero"));
                    }
                    x / y
                }
                BinOp::Pow => power(x, eval::<T>(b, vars)?, e.offset)?,
            }
        }
        ExprKind::Call(func, a) => {
            let x = eval::<T>(a, vars)?;
            let v = x.value();
            let (value, slope) = match func {
                Func::Sin => (v.sin(), v.cos()),
                Func::Cos => (v.cos(), -v.sin()),
                Func::Tan => {
                    let c = v.cos();
                    if c == 0.0 {
                        return Err(domain(e.offset, "tan at a pole"));
                    }
                    (v.tan(), 1.0 / (c * c))
                }
                Func::Exp => (v.exp(), v.exp()),
                Func::Ln => {
                    if v <= 0.0 {
                        return Err(domain(e.offset, format!("ln of non-positive value {v}")));
                    }
                    (v.ln(), 1.0 / v)
                }
                Func::Sqrt => {
                    if v < 0.0 {
                        return Err(domain(e.offset, format!("sqrt of negative value {v}")));
                    }
                    if v == 0.0 && T::DIFFERENTIATING && !x.is_locally_constant() {
                        return Err(domain(e.offset, "sqrt is not differentiable at 0"));
                    }
                    let r = v.sqrt();
                    (r, if r > 0.0 { 0.5 / r } else { 0.0 })
                }
                Func::Abs => {
                    if v == 0.0 && T::DIFFERENTIATING && !x.is_locally_constant() {
                        return Err(FieldError::Seam {
                            offset: e.offset,
                            message: "abs is not differentiable at 0".into(),
                        });
                    }
                    (v.abs(), if v < 0.0 { -1.0 } else { 1.0 })
                }
            };
            x.apply(*func, value, slope)
        }
        ExprKind::Piecewise {
            cond,
            then,
            otherwise,
        } => {
            let lhs = eval::<f64>(&cond.lhs, vars)?;
            let rhs = eval::<f64>(&cond.rhs, vars)?;
            if lhs == rhs {
                // On the seam: the first branch wins, and derivative evaluation
                // additionally demands that both branches match to first order.
                let first = eval::<T>(then, vars)?;
                if T::DIFFERENTIATING {
                    let second = eval::<T>(otherwise, vars)?;
                    if !first.agrees_with(&second) {
                        return Err(FieldError::Seam {
                            offset: e.offset,
                            message: "branches do not agree to first order on the seam".into(),
                        });
                    }
                }
                first
            } else if cond.op.holds(lhs, rhs) {
                eval::<T>(then, vars)?
            } else {
                eval::<T>(otherwise, vars)?
            }
        }
    })
}

fn power<T: Scalar>(base: T, exponent: T, offset: usize) -> Result<T, FieldError> {
    let b = base.value();
    let p = exponent.value();
    if exponent.is_locally_constant() {
        if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
            if b == 0.0 && p < 0.0 {
                return Err(domain(offset, "zero raised to a negative power"));
            }
            return Ok(base.powi(p as i32));
        }
        if b < 0.0 {
            return Err(domain(offset, format!("negative base {b} with non-integer exponent")));
        }
        if b == 0.0 {
            if p < 0.0 {
                return Err(domain(offset, "zero raised to a negative power"));
            }
            if T::DIFFERENTIATING && p < 1.0 && !base.is_locally_constant() {
                return Err(domain(offset, "power is not differentiable at 0"));
            }
            let slope = if p > 1.0 { 0.0 } else { 1.0 };
            return Ok(base.apply(Func::Exp, 0.0, slope * p));
        }
        return Ok(base.apply(Func::Exp, b.powf(p), p * b.powf(p - 1.0)));
    }
    if b <= 0.0 {
        return Err(domain(offset, format!("variable exponent needs a positive base, got {b}")));
    }
    let ln_base = base.apply(Func::Ln, b.ln(), 1.0 / b);
    let product = exponent * ln_base;
    let value = product.value().exp();
    Ok(product.apply(Func::Exp, value, value))
}
