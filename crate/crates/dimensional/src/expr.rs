//! Recursive-descent parser and dimension checker for unit-annotated
//! quantity expressions.
//!
//! Grammar:
//!
//! ```text
//! expr     := term (('+'|'-') term)*
//! term     := factor (('*'|'/') factor)*
//! factor   := base ('^' rational)?
//! base     := number unitseq? | ident | '(' expr ')'
//!           | 'sqrt' '(' expr ')' | '-' base
//! unitseq  := (unitname ('^' rational)?)+      (juxtaposition, literals only)
//! rational := int | '(' int '/' int ')'
//! ```
//!
//! Every node carries a source position; dimension errors point at the
//! operator that rejected them.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::dimension::{render_monomial, Dimension, Rational};
use crate::quantity::{Quantity, QuantityError, UnitFrame};

#[derive(Debug, Error)]
pub enum ExprError {
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("dimension error at {line}:{col}: {msg}")]
    Check { line: usize, col: usize, msg: String },
    #[error(transparent)]
    Quantity(#[from] QuantityError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    /// Decimal literal with an attached unit monomial (possibly empty).
    Literal {
        value: f64,
        units: Vec<(String, Rational)>,
    },
    Var(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Rational),
    Sqrt(Box<Expr>),
    Neg(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

// ---------------------------------------------------------------- lexer

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eq,
}

#[derive(Debug, Clone)]
struct SpannedTok {
    tok: Tok,
    span: Span,
}

fn lex(text: &str) -> Result<Vec<SpannedTok>, ExprError> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let span = Span { line, col };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '+' | '-' | '*' | '/' | '^' | '(' | ')' | '=' => {
                chars.next();
                col += 1;
                toks.push(SpannedTok {
                    tok: match c {
                        '+' => Tok::Plus,
                        '-' => Tok::Minus,
                        '*' => Tok::Star,
                        '/' => Tok::Slash,
                        '^' => Tok::Caret,
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        _ => Tok::Eq,
                    },
                    span,
                });
            }
            c if c.is_ascii_digit() || c == '.' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() || d == '.' {
                        s.push(d);
                        chars.next();
                        col += 1;
                    } else if d == 'e' || d == 'E' {
                        // exponent part: e[+-]?digits
                        let mut look = chars.clone();
                        look.next();
                        let mut probe = String::new();
                        if let Some(&sgn) = look.peek() {
                            if sgn == '+' || sgn == '-' {
                                probe.push(sgn);
                                look.next();
                            }
                        }
                        if look.peek().is_some_and(|ch| ch.is_ascii_digit()) {
                            s.push(d);
                            chars.next();
                            col += 1;
                            for p in probe.chars() {
                                s.push(p);
                                chars.next();
                                col += 1;
                            }
                            while chars.peek().is_some_and(|ch| ch.is_ascii_digit()) {
                                s.push(*chars.peek().unwrap());
                                chars.next();
                                col += 1;
                            }
                        }
                        break;
                    } else {
                        break;
                    }
                }
                let value: f64 = s.parse().map_err(|_| ExprError::Parse {
                    line: span.line,
                    col: span.col,
                    msg: format!("malformed number `{s}`"),
                })?;
                toks.push(SpannedTok {
                    tok: Tok::Number(value),
                    span,
                });
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::new();
                while chars
                    .peek()
                    .is_some_and(|&ch| ch.is_alphanumeric() || ch == '_')
                {
                    s.push(*chars.peek().unwrap());
                    chars.next();
                    col += 1;
                }
                toks.push(SpannedTok {
                    tok: Tok::Ident(s),
                    span,
                });
            }
            other => {
                return Err(ExprError::Parse {
                    line,
                    col,
                    msg: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    Ok(toks)
}

// --------------------------------------------------------------- parser

struct Parser<'a> {
    toks: Vec<SpannedTok>,
    pos: usize,
    units: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn span(&self) -> Span {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|t| t.span)
            .unwrap_or(Span { line: 1, col: 1 })
    }

    fn prev_span(&self) -> Span {
        self.toks
            .get(self.pos.saturating_sub(1))
            .map(|t| t.span)
            .unwrap_or(Span { line: 1, col: 1 })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn err(&self, msg: impl Into<String>) -> ExprError {
        let span = self.span();
        ExprError::Parse {
            line: span.line,
            col: span.col,
            msg: msg.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ExprError> {
        if self.peek() == Some(&tok) {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let span = self.span();
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr {
                        kind: ExprKind::Add(Box::new(lhs), Box::new(rhs)),
                        span,
                    };
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr {
                        kind: ExprKind::Sub(Box::new(lhs), Box::new(rhs)),
                        span,
                    };
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            let span = self.span();
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = Expr {
                        kind: ExprKind::Mul(Box::new(lhs), Box::new(rhs)),
                        span,
                    };
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = Expr {
                        kind: ExprKind::Div(Box::new(lhs), Box::new(rhs)),
                        span,
                    };
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let base = self.base()?;
        if self.peek() == Some(&Tok::Caret) {
            let span = self.span();
            self.bump();
            let q = self.rational()?;
            return Ok(Expr {
                kind: ExprKind::Pow(Box::new(base), q),
                span,
            });
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ExprError> {
        let span = self.span();
        match self.bump() {
            Some(Tok::Number(value)) => {
                let units = self.unitseq()?;
                Ok(Expr {
                    kind: ExprKind::Literal { value, units },
                    span,
                })
            }
            Some(Tok::Ident(name)) if name == "sqrt" => {
                self.expect(Tok::LParen, "`(` after sqrt")?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "closing `)`")?;
                Ok(Expr {
                    kind: ExprKind::Sqrt(Box::new(inner)),
                    span,
                })
            }
            Some(Tok::Ident(name)) => Ok(Expr {
                kind: ExprKind::Var(name),
                span,
            }),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "closing `)`")?;
                Ok(inner)
            }
            Some(Tok::Minus) => {
                let inner = self.base()?;
                Ok(Expr {
                    kind: ExprKind::Neg(Box::new(inner)),
                    span,
                })
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.err("expected number, identifier or `(`"))
            }
        }
    }

    /// Units juxtaposed after a number literal. An identifier here must be
    /// a known unit name; anything else is an unknown-unit error.
    fn unitseq(&mut self) -> Result<Vec<(String, Rational)>, ExprError> {
        let mut units = Vec::new();
        while let Some(Tok::Ident(name)) = self.peek() {
            let name = name.clone();
            if name == "sqrt" {
                break;
            }
            if !self.units.contains(&name) {
                let span = self.span();
                return Err(ExprError::Parse {
                    line: span.line,
                    col: span.col,
                    msg: format!("unknown unit `{name}`"),
                });
            }
            self.bump();
            let exp = if self.peek() == Some(&Tok::Caret) {
                self.bump();
                self.rational()?
            } else {
                Rational::from(BigInt::from(1))
            };
            units.push((name, exp));
        }
        Ok(units)
    }

    /// `int`, `-int`, or `( int / int )`, also with a leading minus inside
    /// the parentheses.
    fn rational(&mut self) -> Result<Rational, ExprError> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.bump();
                let num = self.signed_int()?;
                self.expect(Tok::Slash, "`/` in rational exponent")?;
                let den = self.signed_int()?;
                self.expect(Tok::RParen, "closing `)` of rational exponent")?;
                if den.is_zero() {
                    let span = self.prev_span();
                    return Err(ExprError::Parse {
                        line: span.line,
                        col: span.col,
                        msg: "zero denominator in exponent".into(),
                    });
                }
                Ok(Rational::new(num, den))
            }
            _ => Ok(Rational::from(self.signed_int()?)),
        }
    }

    fn signed_int(&mut self) -> Result<BigInt, ExprError> {
        let negative = if self.peek() == Some(&Tok::Minus) {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            Some(Tok::Number(v)) if v.fract() == 0.0 => {
                let n = BigInt::from(v as i64);
                Ok(if negative { -n } else { n })
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.err("malformed rational exponent: expected integer"))
            }
        }
    }
}

/// Parse a quantity expression. `units` are the names that may follow a
/// number literal as a unit monomial.
pub fn parse_quantity_expr(text: &str, units: &[String]) -> Result<Expr, ExprError> {
    if text.trim().is_empty() {
        return Err(ExprError::Parse {
            line: 1,
            col: 1,
            msg: "empty expression".into(),
        });
    }
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        units,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

/// Parse a law `lhs = rhs` into two expressions.
pub fn parse_law(text: &str, units: &[String]) -> Result<(Expr, Expr), ExprError> {
    let toks = lex(text)?;
    let split = toks
        .iter()
        .position(|t| t.tok == Tok::Eq)
        .ok_or(ExprError::Parse {
            line: 1,
            col: 1,
            msg: "law must contain `=`".into(),
        })?;
    let lhs_toks = toks[..split].to_vec();
    let rhs_toks = toks[split + 1..].to_vec();
    let mut lp = Parser {
        toks: lhs_toks,
        pos: 0,
        units,
    };
    let lhs = lp.expr()?;
    if lp.pos != lp.toks.len() {
        return Err(lp.err("trailing input before `=`"));
    }
    let mut rp = Parser {
        toks: rhs_toks,
        pos: 0,
        units,
    };
    let rhs = rp.expr()?;
    if rp.pos != rp.toks.len() {
        return Err(rp.err("trailing input after `=`"));
    }
    Ok((lhs, rhs))
}

// -------------------------------------------------------------- checker

/// Name environment for checking and evaluation: a unit frame (unit names
/// map positionally to fundamentals) plus dimensions for free identifiers.
#[derive(Debug, Clone)]
pub struct CheckContext {
    pub frame: UnitFrame,
    pub vars: HashMap<String, Dimension>,
}

impl CheckContext {
    pub fn unit_dim(&self, unit: &str) -> Option<Dimension> {
        let idx = self.frame.unit_names().iter().position(|u| u == unit)?;
        let name = &self.frame.system().fundamentals()[idx];
        Dimension::base(self.frame.system(), name).ok()
    }

    fn literal_dim(&self, units: &[(String, Rational)], span: Span) -> Result<Dimension, ExprError> {
        let mut dim = Dimension::dimensionless(self.frame.system());
        for (name, exp) in units {
            let u = self.unit_dim(name).ok_or_else(|| ExprError::Check {
                line: span.line,
                col: span.col,
                msg: format!("unknown unit `{name}`"),
            })?;
            dim = dim.mul(&u.pow(exp)).map_err(QuantityError::from)?;
        }
        Ok(dim)
    }
}

/// One line of the bottom-up dimension report.
#[derive(Debug, Clone)]
pub struct ReportLine {
    pub rendered: String,
    pub dim: Dimension,
}

/// Infer the dimension of an expression, appending one report line per
/// subterm in evaluation order. Fails at the first inconsistency with a
/// positioned diagnostic.
pub fn check_dim(
    expr: &Expr,
    ctx: &CheckContext,
    report: &mut Vec<ReportLine>,
) -> Result<Dimension, ExprError> {
    let dim = match &expr.kind {
        ExprKind::Literal { units, .. } => ctx.literal_dim(units, expr.span)?,
        ExprKind::Var(name) => ctx.vars.get(name).cloned().ok_or_else(|| ExprError::Check {
            line: expr.span.line,
            col: expr.span.col,
            msg: format!("unknown identifier `{name}`"),
        })?,
        ExprKind::Add(a, b) | ExprKind::Sub(a, b) => {
            let da = check_dim(a, ctx, report)?;
            let db = check_dim(b, ctx, report)?;
            if da != db {
                let op = if matches!(expr.kind, ExprKind::Add(..)) { "+" } else { "-" };
                return Err(ExprError::Check {
                    line: expr.span.line,
                    col: expr.span.col,
                    msg: format!("dimension mismatch at {op}: {da} vs {db}"),
                });
            }
            da
        }
        ExprKind::Mul(a, b) => {
            let da = check_dim(a, ctx, report)?;
            let db = check_dim(b, ctx, report)?;
            da.mul(&db).map_err(QuantityError::from)?
        }
        ExprKind::Div(a, b) => {
            let da = check_dim(a, ctx, report)?;
            let db = check_dim(b, ctx, report)?;
            da.mul(&db.inv()).map_err(QuantityError::from)?
        }
        ExprKind::Pow(a, q) => check_dim(a, ctx, report)?.pow(q),
        ExprKind::Sqrt(a) => check_dim(a, ctx, report)?.pow(&crate::dimension::rat(1, 2)),
        ExprKind::Neg(a) => check_dim(a, ctx, report)?,
    };
    report.push(ReportLine {
        rendered: render(expr),
        dim: dim.clone(),
    });
    Ok(dim)
}

/// Evaluate with concrete magnitudes for the free identifiers. Shares all
/// dimension handling with the quantity calculus, so a dimension mismatch
/// here surfaces as a `QuantityError`.
pub fn eval(
    expr: &Expr,
    ctx: &CheckContext,
    values: &HashMap<String, f64>,
) -> Result<Quantity, ExprError> {
    match &expr.kind {
        ExprKind::Literal { value, units } => {
            let dim = ctx.literal_dim(units, expr.span)?;
            Ok(Quantity::new(*value, dim, &ctx.frame)?)
        }
        ExprKind::Var(name) => {
            let dim = ctx.vars.get(name).cloned().ok_or_else(|| ExprError::Check {
                line: expr.span.line,
                col: expr.span.col,
                msg: format!("unknown identifier `{name}`"),
            })?;
            let value = values.get(name).copied().ok_or_else(|| ExprError::Check {
                line: expr.span.line,
                col: expr.span.col,
                msg: format!("no value bound for `{name}`"),
            })?;
            Ok(Quantity::new(value, dim, &ctx.frame)?)
        }
        ExprKind::Add(a, b) => Ok(eval(a, ctx, values)?.add(&eval(b, ctx, values)?)?),
        ExprKind::Sub(a, b) => Ok(eval(a, ctx, values)?.sub(&eval(b, ctx, values)?)?),
        ExprKind::Mul(a, b) => Ok(eval(a, ctx, values)?.mul(&eval(b, ctx, values)?)?),
        ExprKind::Div(a, b) => Ok(eval(a, ctx, values)?.div(&eval(b, ctx, values)?)?),
        ExprKind::Pow(a, q) => Ok(eval(a, ctx, values)?.pow(q)?),
        ExprKind::Sqrt(a) => Ok(eval(a, ctx, values)?.sqrt()?),
        ExprKind::Neg(a) => Ok(eval(a, ctx, values)?.neg()),
    }
}

/// Render an AST back to the surface grammar. Composite operands are
/// parenthesized, so the output reparses to an equal tree.
pub fn render(expr: &Expr) -> String {
    fn atom(e: &Expr) -> String {
        match &e.kind {
            ExprKind::Literal { .. } | ExprKind::Var(_) | ExprKind::Sqrt(_) => render(e),
            _ => format!("({})", render(e)),
        }
    }
    /// Like `atom`, but also parenthesizes unit-bearing literals: a caret
    /// directly after a unit sequence would rebind to the last unit.
    fn pow_base(e: &Expr) -> String {
        match &e.kind {
            ExprKind::Literal { units, .. } if !units.iter().all(|(_, q)| q.is_zero()) => {
                format!("({})", render(e))
            }
            _ => atom(e),
        }
    }
    match &expr.kind {
        ExprKind::Literal { value, units } => {
            let mut s = String::new();
            let _ = write!(s, "{}", crate::quantity::render_f64(*value));
            // zero-exponent units contribute nothing and have no surface form
            let kept: Vec<&(String, Rational)> =
                units.iter().filter(|(_, q)| !q.is_zero()).collect();
            if !kept.is_empty() {
                let names: Vec<String> = kept.iter().map(|(n, _)| n.clone()).collect();
                let exps: Vec<Rational> = kept.iter().map(|(_, e)| e.clone()).collect();
                let _ = write!(s, " {}", render_monomial(&names, &exps));
            }
            s
        }
        ExprKind::Var(name) => name.clone(),
        ExprKind::Add(a, b) => format!("{} + {}", atom(a), atom(b)),
        ExprKind::Sub(a, b) => format!("{} - {}", atom(a), atom(b)),
        ExprKind::Mul(a, b) => format!("{} * {}", atom(a), atom(b)),
        ExprKind::Div(a, b) => format!("{} / {}", atom(a), atom(b)),
        ExprKind::Pow(a, q) => {
            if q.is_integer() {
                format!("{}^{}", pow_base(a), q.numer())
            } else {
                format!("{}^({}/{})", pow_base(a), q.numer(), q.denom())
            }
        }
        ExprKind::Sqrt(a) => format!("sqrt({})", render(a)),
        ExprKind::Neg(a) => format!("-{}", atom(a)),
    }
}
