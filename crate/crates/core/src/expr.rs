//! Small arithmetic expression language for kernels and forcings.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' ['-'] primary)?
//! primary := number | name | name '(' expr ')' | '(' expr ')'
//! ```
//!
//! Exponents must fold to an integer constant. Functions: `sin`, `cos`,
//! `tanh`, `exp`, `abs`, `neg`. The constant `pi` is predefined; the
//! variables available depend on where the expression is used (see
//! [`Variables`]).

use std::f64::consts::PI;

use crate::error::{Error, ParseError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tanh,
    Exp,
    Abs,
    Neg,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tanh" => Func::Tanh,
            "exp" => Func::Exp,
            "abs" => Func::Abs,
            "neg" => Func::Neg,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tanh => x.tanh(),
            Func::Exp => x.exp(),
            Func::Abs => x.abs(),
            Func::Neg => -x,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Expression tree. Variables are resolved to slots at parse time.
#[derive(Clone, Debug, PartialEq)]
pub enum ExprAst {
    Const(f64),
    Var(usize),
    Call(Func, Box<ExprAst>),
    Binary(BinOp, Box<ExprAst>, Box<ExprAst>),
    Pow(Box<ExprAst>, i32),
}

impl ExprAst {
    fn constant(&self) -> Option<f64> {
        match self {
            ExprAst::Const(c) => Some(*c),
            ExprAst::Var(_) => None,
            ExprAst::Call(f, a) => a.constant().map(|x| f.apply(x)),
            ExprAst::Binary(op, a, b) => {
                let (a, b) = (a.constant()?, b.constant()?);
                Some(match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                })
            }
            ExprAst::Pow(a, e) => a.constant().map(|x| x.powi(*e)),
        }
    }

    fn max_slot(&self) -> Option<usize> {
        match self {
            ExprAst::Const(_) => None,
            ExprAst::Var(s) => Some(*s),
            ExprAst::Call(_, a) | ExprAst::Pow(a, _) => a.max_slot(),
            ExprAst::Binary(_, a, b) => match (a.max_slot(), b.max_slot()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
        }
    }

    fn eval(&self, vars: &[f64]) -> Result<f64> {
        Ok(match self {
            ExprAst::Const(c) => *c,
            ExprAst::Var(s) => *vars
                .get(*s)
                .ok_or_else(|| Error::Domain(format!("variable slot {s} not bound")))?,
            ExprAst::Call(f, a) => f.apply(a.eval(vars)?),
            ExprAst::Binary(op, a, b) => {
                let (a, b) = (a.eval(vars)?, b.eval(vars)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(Error::Domain(format!("division by zero at {vars:?}")));
                        }
                        a / b
                    }
                }
            }
            ExprAst::Pow(a, e) => {
                let base = a.eval(vars)?;
                if base == 0.0 && *e < 0 {
                    return Err(Error::Domain(format!("zero to a negative power at {vars:?}")));
                }
                base.powi(*e)
            }
        })
    }
}

/// Named variable slots an expression may refer to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variables {
    names: Vec<(String, usize)>,
}

impl Variables {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = (S, usize)>) -> Self {
        Variables {
            names: names.into_iter().map(|(n, s)| (n.into(), s)).collect(),
        }
    }

    /// Physical coordinates: `x` (alias of `x1`), `x2`, `x3`.
    pub fn physical() -> Self {
        Variables::new([("x", 0), ("x1", 0), ("x2", 1), ("x3", 2)])
    }

    fn slot(&self, name: &str) -> Option<usize> {
        self.names.iter().find(|(n, _)| n == name).map(|(_, s)| *s)
    }
}

/// Parsed expression together with its source text.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    source: String,
    ast: ExprAst,
}

impl Expr {
    pub fn parse_with(source: &str, vars: &Variables) -> Result<Expr> {
        let tokens = lex(source)?;
        let mut parser = Parser {
            tokens,
            pos: 0,
            end: source.len(),
            vars,
        };
        let ast = parser.expr()?;
        if let Some(tok) = parser.peek() {
            return Err(ParseError {
                position: tok.pos,
                message: format!("unexpected {}", tok.kind.describe()),
            }
            .into());
        }
        Ok(Expr {
            source: source.to_string(),
            ast,
        })
    }

    pub(crate) fn from_parts(source: String, ast: ExprAst) -> Expr {
        Expr { source, ast }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &ExprAst {
        &self.ast
    }

    /// Number of variable slots the expression needs bound.
    pub fn arity(&self) -> usize {
        self.ast.max_slot().map_or(0, |s| s + 1)
    }

    pub fn eval(&self, vars: &[f64]) -> Result<f64> {
        let v = self.ast.eval(vars)?;
        if !v.is_finite() {
            return Err(Error::Domain(format!("`{}` is not finite at {vars:?}", self.source)));
        }
        Ok(v)
    }
}

/// Parses an expression over the physical coordinates `x, x1, x2, x3`.
pub fn parse_expr(source: &str) -> Result<Expr> {
    Expr::parse_with(source, &Variables::physical())
}

#[derive(Clone, Debug, PartialEq)]
enum TokenKind {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Number(v) => format!("number {v}"),
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Plus => "`+`".into(),
            TokenKind::Minus => "`-`".into(),
            TokenKind::Star => "`*`".into(),
            TokenKind::Slash => "`/`".into(),
            TokenKind::Caret => "`^`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: TokenKind,
    pos: usize,
}

fn lex(source: &str) -> std::result::Result<Vec<Token>, ParseError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let kind = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => TokenKind::Plus,
            b'-' => TokenKind::Minus,
            b'*' => TokenKind::Star,
            b'/' => TokenKind::Slash,
            b'^' => TokenKind::Caret,
            b'(' => TokenKind::LParen,
            b')' => TokenKind::RParen,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &source[start..i];
                let value = text.parse::<f64>().map_err(|_| ParseError {
                    position: start,
                    message: format!("malformed number `{text}`"),
                })?;
                tokens.push(Token {
                    kind: TokenKind::Number(value),
                    pos: start,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Ident(source[start..i].to_string()),
                    pos: start,
                });
                continue;
            }
            _ => {
                let ch = source[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    position: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        i += 1;
        tokens.push(Token { kind, pos: start });
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
    vars: &'a Variables,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn error_here(&self, message: &str) -> ParseError {
        match self.peek() {
            Some(t) => ParseError {
                position: t.pos,
                message: format!("{message}, found {}", t.kind.describe()),
            },
            None => ParseError {
                position: self.end,
                message: format!("{message}, found end of input"),
            },
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek().map(|t| &t.kind) == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> std::result::Result<(), ParseError> {
        if self.eat(&kind) {
            Ok(())
        } else {
            Err(self.error_here(&format!("expected {}", kind.describe())))
        }
    }

    fn expr(&mut self) -> std::result::Result<ExprAst, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat(&TokenKind::Plus) {
                BinOp::Add
            } else if self.eat(&TokenKind::Minus) {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = ExprAst::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> std::result::Result<ExprAst, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat(&TokenKind::Star) {
                BinOp::Mul
            } else if self.eat(&TokenKind::Slash) {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = ExprAst::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> std::result::Result<ExprAst, ParseError> {
        if self.eat(&TokenKind::Minus) {
            let inner = self.unary()?;
            return Ok(ExprAst::Call(Func::Neg, Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> std::result::Result<ExprAst, ParseError> {
        let base = self.primary()?;
        if !self.eat(&TokenKind::Caret) {
            return Ok(base);
        }
        let at = self.peek().map_or(self.end, |t| t.pos);
        let negative = self.eat(&TokenKind::Minus);
        let exponent = self.primary()?;
        let value = exponent.constant().ok_or(ParseError {
            position: at,
            message: "exponent must be a constant".into(),
        })?;
        let value = if negative { -value } else { value };
        if value.fract() != 0.0 || value.abs() > i32::MAX as f64 {
            return Err(ParseError {
                position: at,
                message: format!("exponent must be an integer, got {value}"),
            });
        }
        if self.peek().map(|t| &t.kind) == Some(&TokenKind::Caret) {
            return Err(self.error_here("chained exponents need parentheses"));
        }
        Ok(ExprAst::Pow(Box::new(base), value as i32))
    }

    fn primary(&mut self) -> std::result::Result<ExprAst, ParseError> {
        let Some(tok) = self.next() else {
            self.pos -= 1;
            return Err(self.error_here("expected an operand"));
        };
        match tok.kind {
            TokenKind::Number(v) => Ok(ExprAst::Const(v)),
            TokenKind::LParen => {
                let inner = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                if self.eat(&TokenKind::LParen) {
                    let func = Func::from_name(&name).ok_or(ParseError {
                        position: tok.pos,
                        message: format!("unknown function `{name}`"),
                    })?;
                    let arg = self.expr()?;
                    self.expect(TokenKind::RParen)?;
                    Ok(ExprAst::Call(func, Box::new(arg)))
                } else if name == "pi" {
                    Ok(ExprAst::Const(PI))
                } else if let Some(slot) = self.vars.slot(&name) {
                    Ok(ExprAst::Var(slot))
                } else {
                    Err(ParseError {
                        position: tok.pos,
                        message: format!("unknown variable `{name}`"),
                    })
                }
            }
            other => {
                self.pos -= 1;
                Err(ParseError {
                    position: tok.pos,
                    message: format!("expected an operand, found {}", other.describe()),
                })
            }
        }
    }
}
