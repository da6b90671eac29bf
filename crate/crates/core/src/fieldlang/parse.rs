use super::ast::{BinOp, CmpOp, Condition, Expr, ExprKind, Func};
use super::FieldError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Cmp(CmpOp),
    Eof,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, FieldError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'[' => Tok::LBracket,
            b']' => Tok::RBracket,
            b',' => Tok::Comma,
            b'<' | b'>' => {
                let or_equal = bytes.get(i + 1) == Some(&b'=');
                if or_equal {
                    i += 1;
                }
                Tok::Cmp(match (c, or_equal) {
                    (b'<', false) => CmpOp::Lt,
                    (b'<', true) => CmpOp::Le,
                    (_, false) => CmpOp::Gt,
                    (_, true) => CmpOp::Ge,
                })
            }
            b'0'..=b'9' | b'.' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_digit() || bytes[j] == b'.') {
                    j += 1;
                }
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let text = &src[i..j];
                let value: f64 = text.parse().map_err(|_| FieldError::Syntax {
                    offset: start,
                    message: format!("malformed number `{text}`"),
                })?;
                out.push((Tok::Num(value), start));
                i = j;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                out.push((Tok::Ident(src[i..j].to_string()), start));
                i = j;
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(FieldError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::Eof, src.len()));
    Ok(out)
}

pub(crate) enum Parsed {
    Scalar(Expr),
    Vector(Vec<Expr>, usize),
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    dim: usize,
}

pub(crate) fn parse(src: &str, dim: usize) -> Result<Parsed, FieldError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        dim,
    };
    let parsed = if p.peek() == &Tok::LBracket {
        let open = p.offset();
        p.bump();
        let mut items = vec![p.expr()?];
        while p.peek() == &Tok::Comma {
            p.bump();
            items.push(p.expr()?);
        }
        p.expect(Tok::RBracket, "`]`")?;
        Parsed::Vector(items, open)
    } else {
        Parsed::Scalar(p.expr()?)
    };
    if p.peek() != &Tok::Eof {
        return Err(FieldError::Syntax {
            offset: p.offset(),
            message: "unexpected trailing input".into(),
        });
    }
    Ok(parsed)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<usize, FieldError> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            Err(FieldError::Syntax {
                offset: self.offset(),
                message: format!("expected {what}"),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr, FieldError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let at = self.bump().1;
            let rhs = self.term()?;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), at);
        }
    }

    fn term(&mut self) -> Result<Expr, FieldError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            let at = self.bump().1;
            let rhs = self.unary()?;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), at);
        }
    }

    fn unary(&mut self) -> Result<Expr, FieldError> {
        match self.peek() {
            Tok::Minus => {
                let at = self.bump().1;
                let inner = self.unary()?;
                Ok(Expr::new(ExprKind::Neg(Box::new(inner)), at))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, FieldError> {
        let base = self.primary()?;
        if self.peek() == &Tok::Caret {
            let at = self.bump().1;
            let exponent = self.unary()?;
            return Ok(Expr::new(
                ExprKind::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)),
                at,
            ));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, FieldError> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::num(v, at)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::LBracket => Err(FieldError::Arity {
                offset: at,
                message: "vector literal is only allowed as the whole expression".into(),
            }),
            Tok::Ident(name) => self.identifier(name, at),
            Tok::Eof => Err(FieldError::Syntax {
                offset: at,
                message: "unexpected end of input".into(),
            }),
            other => Err(FieldError::Syntax {
                offset: at,
                message: format!("unexpected token {other:?}"),
            }),
        }
    }

    fn identifier(&mut self, name: String, at: usize) -> Result<Expr, FieldError> {
        if name == "piecewise" {
            return self.piecewise(at);
        }
        if let Some(func) = Func::from_name(&name) {
            self.expect(Tok::LParen, "`(` after function name")?;
            let arg = self.expr()?;
            if self.peek() == &Tok::Comma {
                return Err(FieldError::Arity {
                    offset: self.offset(),
                    message: format!("`{name}` takes exactly one argument"),
                });
            }
            self.expect(Tok::RParen, "`)`")?;
            return Ok(Expr::new(ExprKind::Call(func, Box::new(arg)), at));
        }
        if self.peek() == &Tok::LParen {
            return Err(FieldError::UnknownIdentifier { offset: at, name });
        }
        match name.as_str() {
            "pi" => Ok(Expr::new(ExprKind::Pi, at)),
            "u" => Ok(Expr::new(ExprKind::Var(self.dim), at)),
            _ => {
                let index = name
                    .strip_prefix('x')
                    .and_then(|digits| digits.parse::<usize>().ok())
                    .filter(|&k| k >= 1 && k <= self.dim && !name[1..].starts_with('0'));
                match index {
                    Some(k) => Ok(Expr::new(ExprKind::Var(k - 1), at)),
                    None => Err(FieldError::UnknownIdentifier { offset: at, name }),
                }
            }
        }
    }

    fn piecewise(&mut self, at: usize) -> Result<Expr, FieldError> {
        self.expect(Tok::LParen, "`(` after piecewise")?;
        let lhs = self.expr()?;
        let op = match self.peek() {
            Tok::Cmp(op) => *op,
            _ => {
                return Err(FieldError::Syntax {
                    offset: self.offset(),
                    message: "piecewise condition needs a comparison (<, <=, >, >=)".into(),
                })
            }
        };
        self.bump();
        let rhs = self.expr()?;
        let mut branches = Vec::new();
        while self.peek() == &Tok::Comma {
            self.bump();
            branches.push(self.expr()?);
        }
        if branches.len() != 2 {
            return Err(FieldError::Arity {
                offset: at,
                message: format!(
                    "piecewise takes a condition and two branches, got {} branch(es)",
                    branches.len()
                ),
            });
        }
        self.expect(Tok::RParen, "`)`")?;
        let otherwise = branches.pop().unwrap();
        let then = branches.pop().unwrap();
        Ok(Expr::new(
            ExprKind::Piecewise {
                cond: Box::new(Condition { op, lhs, rhs }),
                then: Box::new(then),
                otherwise: Box::new(otherwise),
            },
            at,
        ))
    }
}
