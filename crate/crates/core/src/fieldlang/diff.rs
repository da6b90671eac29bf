//! Symbolic differentiation of expression trees, used for second derivatives.

use super::ast::{BinOp, Condition, Expr, ExprKind, Func};

fn bin(op: BinOp, a: Expr, b: Expr, offset: usize) -> Expr {
    match op {
        BinOp::Add if a.is_zero() => b,
        BinOp::Add | BinOp::Sub if b.is_zero() => a,
        BinOp::Sub if a.is_zero() => neg(b, offset),
        BinOp::Mul if a.is_zero() || b.is_zero() => Expr::num(0.0, offset),
        BinOp::Mul if a.is_one() => b,
        BinOp::Mul | BinOp::Div if b.is_one() => a,
        BinOp::Div if a.is_zero() => Expr::num(0.0, offset),
        _ => Expr::new(ExprKind::Binary(op, Box::new(a), Box::new(b)), offset),
    }
}

fn neg(a: Expr, offset: usize) -> Expr {
    match a.kind {
        ExprKind::Num(v) => Expr::num(-v, offset),
        ExprKind::Neg(inner) => *inner,
        _ => Expr::new(ExprKind::Neg(Box::new(a)), offset),
    }
}

fn call(func: Func, a: Expr, offset: usize) -> Expr {
    Expr::new(ExprKind::Call(func, Box::new(a)), offset)
}

/// Partial derivative of `e` with respect to variable slot `var`.
pub(crate) fn differentiate(e: &Expr, var: usize) -> Expr {
    let at = e.offset;
    match &e.kind {
        ExprKind::Num(_) | ExprKind::Pi => Expr::num(0.0, at),
        ExprKind::Var(i) => Expr::num(if *i == var { 1.0 } else { 0.0 }, at),
        ExprKind::Neg(a) => neg(differentiate(a, var), at),
        ExprKind::Binary(op, a, b) => {
            let da = differentiate(a, var);
            let db = differentiate(b, var);
            let a = (**a).clone();
            let b = (**b).clone();
            match op {
                BinOp::Add => bin(BinOp::Add, da, db, at),
                BinOp::Sub => bin(BinOp::Sub, da, db, at),
                BinOp::Mul => bin(
                    BinOp::Add,
                    bin(BinOp::Mul, da, b.clone(), at),
                    bin(BinOp::Mul, a, db, at),
                    at,
                ),
                BinOp::Div => bin(
                    BinOp::Div,
                    bin(
                        BinOp::Sub,
                        bin(BinOp::Mul, da, b.clone(), at),
                        bin(BinOp::Mul, a, db, at),
                        at,
                    ),
                    bin(BinOp::Pow, b, Expr::num(2.0, at), at),
                    at,
                ),
                BinOp::Pow if b.is_constant() => {
                    let lowered = bin(BinOp::Sub, b.clone(), Expr::num(1.0, at), at);
                    bin(
                        BinOp::Mul,
                        bin(BinOp::Mul, b, bin(BinOp::Pow, a, lowered, at), at),
                        da,
                        at,
                    )
                }
                BinOp::Pow => {
                    // d(a^b) = a^b (b' ln a + b a'/a)
                    let whole = bin(BinOp::Pow, a.clone(), b.clone(), at);
                    let log_term = bin(BinOp::Mul, db, call(Func::Ln, a.clone(), at), at);
                    let ratio = bin(BinOp::Div, bin(BinOp::Mul, b, da, at), a, at);
                    bin(BinOp::Mul, whole, bin(BinOp::Add, log_term, ratio, at), at)
                }
            }
        }
        ExprKind::Call(func, a) => {
            let da = differentiate(a, var);
            if da.is_zero() {
                return Expr::num(0.0, at);
            }
            let a = (**a).clone();
            let outer = match func {
                Func::Sin => call(Func::Cos, a, at),
                Func::Cos => neg(call(Func::Sin, a, at), at),
                Func::Tan => bin(
                    BinOp::Div,
                    Expr::num(1.0, at),
                    bin(BinOp::Pow, call(Func::Cos, a, at), Expr::num(2.0, at), at),
                    at,
                ),
                Func::Exp => call(Func::Exp, a, at),
                Func::Ln => bin(BinOp::Div, Expr::num(1.0, at), a, at),
                Func::Sqrt => bin(
                    BinOp::Div,
                    Expr::num(0.5, at),
                    call(Func::Sqrt, a, at),
                    at,
                ),
                Func::Abs => {
                    // Kink at 0 becomes a seam that only passes when a' vanishes there.
                    return Expr::new(
                        ExprKind::Piecewise {
                            cond: Box::new(Condition {
                                op: super::ast::CmpOp::Lt,
                                lhs: a,
                                rhs: Expr::num(0.0, at),
                            }),
                            then: Box::new(neg(da.clone(), at)),
                            otherwise: Box::new(da),
                        },
                        at,
                    );
                }
            };
            bin(BinOp::Mul, outer, da, at)
        }
        ExprKind::Piecewise {
            cond,
            then,
            otherwise,
        } => {
            let dt = differentiate(then, var);
            let dot = differentiate(otherwise, var);
            if dt.is_zero() && dot.is_zero() {
                return Expr::num(0.0, at);
            }
            Expr::new(
                ExprKind::Piecewise {
                    cond: cond.clone(),
                    then: Box::new(dt),
                    otherwise: Box::new(dot),
                },
                at,
            )
        }
    }
}
