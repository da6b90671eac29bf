//! Field expressions: a small language for the scalar and vector fields that
//! define metric data (δ, β, metric entries, wave profiles).
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! field     := expr | "[" expr ("," expr)* "]"
//! expr      := term (("+" | "-") term)*
//! term      := unary (("*" | "/") unary)*
//! unary     := ("-" | "+") unary | power
//! power     := primary ("^" unary)?
//! primary   := number | "pi" | "x1".."xd" | "u" | func "(" expr ")"
//!            | "piecewise(" expr cmp expr "," expr "," expr ")" | "(" expr ")"
//! func      := sin | cos | tan | exp | ln | log | sqrt | abs
//! cmp       := "<" | "<=" | ">" | ">="
//! ```
//!
//! A vector literal is only allowed as the whole expression and must have
//! exactly `d` components. Values are exact; first derivatives come from
//! forward-mode jets and second derivatives from symbolic differentiation.
//!
//! On a piecewise seam (both sides of the comparison equal) the first branch is
//! taken. Derivatives at a seam are an error unless both branches agree in
//! value and gradient to within 1e-9.

mod ast;
mod diff;
mod eval;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use ast::{BinOp, CmpOp, Condition, Expr, ExprKind, Func};
pub use eval::Jet;

use eval::eval;
use parse::Parsed;

/// Number of variable slots a jet carries (`x1..xd` plus `u`).
pub const MAX_VARS: usize = 8;
/// Largest supported base dimension.
pub const MAX_DIM: usize = MAX_VARS - 1;
/// One-sided derivatives at a seam must agree to this tolerance.
pub const SEAM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("arity mismatch at byte {offset}: {message}")]
    Arity { offset: usize, message: String },
    #[error("domain violation at byte {offset}: {message}")]
    Domain { offset: usize, message: String },
    #[error("non-differentiable seam at byte {offset}: {message}")]
    Seam { offset: usize, message: String },
    #[error("point has {got} coordinates, expected {expected} (or {} with u)", expected + 1)]
    PointDimension { expected: usize, got: usize },
    #[error("unsupported dimension {0} (1..={MAX_DIM})")]
    Dimension(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    Scalar,
    Vector(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Value {
    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            Value::Scalar(v) => Some(*v),
            Value::Vector(_) => None,
        }
    }

    pub fn into_vector(self) -> Vec<f64> {
        match self {
            Value::Scalar(v) => vec![v],
            Value::Vector(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Body {
    Scalar(Expr),
    Vector(Vec<Expr>),
}

/// A parsed scalar or `d`-vector field over `x1..xd` and `u`. Immutable.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldExpr {
    source: String,
    dim: usize,
    body: Body,
}

impl FieldExpr {
    pub fn parse(source: &str, dim: usize) -> Result<FieldExpr, FieldError> {
        if dim == 0 || dim > MAX_DIM {
            return Err(FieldError::Dimension(dim));
        }
        let body = match parse::parse(source, dim)? {
            Parsed::Scalar(e) => Body::Scalar(e),
            Parsed::Vector(items, offset) => {
                if items.len() != dim {
                    return Err(FieldError::Arity {
                        offset,
                        message: format!(
                            "vector field has {} components, dimension is {dim}",
                            items.len()
                        ),
                    });
                }
                Body::Vector(items)
            }
        };
        Ok(FieldExpr {
            source: source.to_string(),
            dim,
            body,
        })
    }

    /// Parse and require a scalar field.
    pub fn scalar(source: &str, dim: usize) -> Result<FieldExpr, FieldError> {
        let f = FieldExpr::parse(source, dim)?;
        match f.arity() {
            Arity::Scalar => Ok(f),
            Arity::Vector(_) => Err(FieldError::Arity {
                offset: 0,
                message: "expected a scalar field, found a vector".into(),
            }),
        }
    }

    /// Parse and require a `dim`-vector field.
    pub fn vector(source: &str, dim: usize) -> Result<FieldExpr, FieldError> {
        let f = FieldExpr::parse(source, dim)?;
        match f.arity() {
            Arity::Vector(_) => Ok(f),
            Arity::Scalar => Err(FieldError::Arity {
                offset: 0,
                message: format!("expected a {dim}-vector field, found a scalar"),
            }),
        }
    }

    /// Literal zero vector of dimension `dim`.
    pub fn zero_vector(dim: usize) -> FieldExpr {
        let src = format!("[{}]", vec!["0"; dim].join(", "));
        FieldExpr::vector(&src, dim).expect("zero vector parses")
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> Arity {
        match &self.body {
            Body::Scalar(_) => Arity::Scalar,
            Body::Vector(v) => Arity::Vector(v.len()),
        }
    }

    /// Component expressions (one for a scalar field).
    pub fn components(&self) -> &[Expr] {
        match &self.body {
            Body::Scalar(e) => std::slice::from_ref(e),
            Body::Vector(v) => v,
        }
    }

    /// Whether every component is the literal `0`.
    pub fn is_literal_zero(&self) -> bool {
        self.components().iter().all(Expr::is_zero)
    }

    /// Variable slots referenced anywhere in the field (`dim` stands for `u`).
    pub fn variables(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for c in self.components() {
            c.collect_variables(&mut out);
        }
        out
    }

    /// Variable slots referenced by component `k`.
    pub fn component_variables(&self, k: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.components()[k].collect_variables(&mut out);
        out
    }

    fn slots(&self, point: &[f64]) -> Result<[f64; MAX_VARS], FieldError> {
        if point.len() != self.dim && point.len() != self.dim + 1 {
            return Err(FieldError::PointDimension {
                expected: self.dim,
                got: point.len(),
            });
        }
        let mut vars = [0.0; MAX_VARS];
        vars[..point.len()].copy_from_slice(point);
        Ok(vars)
    }

    pub fn eval(&self, point: &[f64]) -> Result<Value, FieldError> {
        let vars = self.slots(point)?;
        Ok(match &self.body {
            Body::Scalar(e) => Value::Scalar(eval::<f64>(e, &vars)?),
            Body::Vector(items) => Value::Vector(
                items
                    .iter()
                    .map(|e| eval::<f64>(e, &vars))
                    .collect::<Result<_, _>>()?,
            ),
        })
    }

    /// Value of component `k` (0 for scalars).
    pub fn eval_component(&self, k: usize, point: &[f64]) -> Result<f64, FieldError> {
        let vars = self.slots(point)?;
        eval::<f64>(&self.components()[k], &vars)
    }

    /// Value and full gradient of every component in one forward pass.
    pub fn jets(&self, point: &[f64]) -> Result<Vec<Jet>, FieldError> {
        let vars = self.slots(point)?;
        self.components()
            .iter()
            .map(|e| eval::<Jet>(e, &vars))
            .collect()
    }

    pub fn jet_component(&self, k: usize, point: &[f64]) -> Result<Jet, FieldError> {
        let vars = self.slots(point)?;
        eval::<Jet>(&self.components()[k], &vars)
    }

    /// Exact partial derivative along variable slot `direction`.
    pub fn derivative(&self, point: &[f64], direction: usize) -> Result<Value, FieldError> {
        if direction > self.dim {
            return Err(FieldError::PointDimension {
                expected: self.dim,
                got: direction + 1,
            });
        }
        let jets = self.jets(point)?;
        Ok(match self.body {
            Body::Scalar(_) => Value::Scalar(jets[0].grad[direction]),
            Body::Vector(_) => Value::Vector(jets.iter().map(|j| j.grad[direction]).collect()),
        })
    }

    /// Exact second partial derivative ∂²/∂i∂j.
    pub fn second_derivative(&self, point: &[f64], i: usize, j: usize) -> Result<Value, FieldError> {
        let vars = self.slots(point)?;
        let values = self
            .components()
            .iter()
            .map(|e| eval::<Jet>(&diff::differentiate(e, i), &vars).map(|jet| jet.grad[j]))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(match self.body {
            Body::Scalar(_) => Value::Scalar(values[0]),
            Body::Vector(_) => Value::Vector(values),
        })
    }

    /// Symbolic partial derivative of the whole field.
    pub fn differentiate(&self, direction: usize) -> FieldExpr {
        let body = match &self.body {
            Body::Scalar(e) => Body::Scalar(diff::differentiate(e, direction)),
            Body::Vector(items) => Body::Vector(
                items
                    .iter()
                    .map(|e| diff::differentiate(e, direction))
                    .collect(),
            ),
        };
        let mut out = FieldExpr {
            source: String::new(),
            dim: self.dim,
            body,
        };
        out.source = out.to_string();
        out
    }

    /// Signed distance-like values `lhs - rhs` of every piecewise condition at
    /// `point`; a sign change between two points means a seam was crossed.
    pub fn seam_values(&self, point: &[f64]) -> Result<Vec<f64>, FieldError> {
        let vars = self.slots(point)?;
        let mut conds = Vec::new();
        for c in self.components() {
            c.collect_seams(&mut conds);
        }
        conds
            .iter()
            .map(|c| Ok(eval::<f64>(&c.lhs, &vars)? - eval::<f64>(&c.rhs, &vars)?))
            .collect()
    }

    pub fn has_seams(&self) -> bool {
        let mut conds = Vec::new();
        for c in self.components() {
            c.collect_seams(&mut conds);
        }
        !conds.is_empty()
    }
}

impl fmt::Display for FieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.body {
            Body::Scalar(e) => e.write(f, self.dim),
            Body::Vector(items) => {
                write!(f, "[")?;
                for (k, e) in items.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    e.write(f, self.dim)?;
                }
                write!(f, "]")
            }
        }
    }
}
