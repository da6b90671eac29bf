use std::collections::BTreeSet;
use std::fmt;

/// Expression node. `offset` is the byte offset of the node in its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Num(f64),
    Pi,
    /// Variable slot: `0..dim` are `x1..xd`, `dim` is `u`.
    Var(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    Piecewise {
        cond: Box<Condition>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

impl Func {
    pub(crate) fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub(crate) fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub op: CmpOp,
    pub lhs: Expr,
    pub rhs: Expr,
}

impl Expr {
    pub(crate) fn new(kind: ExprKind, offset: usize) -> Expr {
        Expr { kind, offset }
    }

    pub(crate) fn num(value: f64, offset: usize) -> Expr {
        Expr::new(ExprKind::Num(value), offset)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, ExprKind::Num(v) if v == 0.0)
    }

    pub fn is_one(&self) -> bool {
        matches!(self.kind, ExprKind::Num(v) if v == 1.0)
    }

    /// True when the subtree references no variable.
    pub fn is_constant(&self) -> bool {
        let mut vars = BTreeSet::new();
        self.collect_variables(&mut vars);
        vars.is_empty()
    }

    pub fn collect_variables(&self, out: &mut BTreeSet<usize>) {
        match &self.kind {
            ExprKind::Num(_) | ExprKind::Pi => {}
            ExprKind::Var(i) => {
                out.insert(*i);
            }
            ExprKind::Neg(a) | ExprKind::Call(_, a) => a.collect_variables(out),
            ExprKind::Binary(_, a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
            ExprKind::Piecewise {
                cond,
                then,
                otherwise,
            } => {
                cond.lhs.collect_variables(out);
                cond.rhs.collect_variables(out);
                then.collect_variables(out);
                otherwise.collect_variables(out);
            }
        }
    }

    pub(crate) fn collect_seams<'a>(&'a self, out: &mut Vec<&'a Condition>) {
        match &self.kind {
            ExprKind::Num(_) | ExprKind::Pi | ExprKind::Var(_) => {}
            ExprKind::Neg(a) | ExprKind::Call(_, a) => a.collect_seams(out),
            ExprKind::Binary(_, a, b) => {
                a.collect_seams(out);
                b.collect_seams(out);
            }
            ExprKind::Piecewise {
                cond,
                then,
                otherwise,
            } => {
                out.push(cond);
                cond.lhs.collect_seams(out);
                cond.rhs.collect_seams(out);
                then.collect_seams(out);
                otherwise.collect_seams(out);
            }
        }
    }

    pub(crate) fn write(&self, f: &mut fmt::Formatter<'_>, dim: usize) -> fmt::Result {
        match &self.kind {
            ExprKind::Num(v) => write!(f, "{v:?}"),
            ExprKind::Pi => write!(f, "pi"),
            ExprKind::Var(i) if *i == dim => write!(f, "u"),
            ExprKind::Var(i) => write!(f, "x{}", i + 1),
            ExprKind::Neg(a) => {
                write!(f, "(-")?;
                a.write(f, dim)?;
                write!(f, ")")
            }
            ExprKind::Binary(op, a, b) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "(")?;
                a.write(f, dim)?;
                write!(f, " {sym} ")?;
                b.write(f, dim)?;
                write!(f, ")")
            }
            ExprKind::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write(f, dim)?;
                write!(f, ")")
            }
            ExprKind::Piecewise {
                cond,
                then,
                otherwise,
            } => {
                write!(f, "piecewise(")?;
                cond.lhs.write(f, dim)?;
                write!(f, " {} ", cond.op.symbol())?;
                cond.rhs.write(f, dim)?;
                write!(f, ", ")?;
                then.write(f, dim)?;
                write!(f, ", ")?;
                otherwise.write(f, dim)?;
                write!(f, ")")
            }
        }
    }
}
