//! Closed-form test functions: a small expression language over the single
//! variable `t`, with exact rational exponents so that odd-root semantics
//! stay decidable.

use crate::error::{Error, Result};
use crate::number::{parse_rational, rat_to_f64, rational_pow};
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scalar {
    Rat(Rational64),
    Real(f64),
}

impl Scalar {
    pub fn value(self) -> f64 {
        match self {
            Scalar::Rat(r) => rat_to_f64(r),
            Scalar::Real(x) => x,
        }
    }

    fn as_rational(self) -> Option<Rational64> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Real(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Abs,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Scalar),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow { base: Box<Expr>, exp: Rational64 },
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn constant(x: f64) -> Expr {
        Expr::Const(Scalar::Real(x))
    }

    pub fn constant_rat(r: Rational64) -> Expr {
        Expr::Const(Scalar::Rat(r))
    }

    pub fn constant_int(n: i64) -> Expr {
        Expr::constant_rat(Rational64::from_integer(n))
    }

    pub fn var() -> Expr {
        Expr::Var
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(base: Expr, exp: Rational64) -> Expr {
        Expr::Pow { base: Box::new(base), exp }
    }

    pub fn pow_int(base: Expr, exp: i64) -> Expr {
        Expr::pow(base, Rational64::from_integer(exp))
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        match self {
            Expr::Const(s) => Ok(s.value()),
            Expr::Var => Ok(t),
            Expr::Add(a, b) => Ok(a.eval(t)? + b.eval(t)?),
            Expr::Sub(a, b) => Ok(a.eval(t)? - b.eval(t)?),
            Expr::Mul(a, b) => Ok(a.eval(t)? * b.eval(t)?),
            Expr::Div(a, b) => {
                let den = b.eval(t)?;
                if den == 0.0 {
                    return Err(Error::DivisionByZero(t));
                }
                Ok(a.eval(t)? / den)
            }
            Expr::Pow { base, exp } => rational_pow(base.eval(t)?, *exp),
            Expr::Call(f, arg) => {
                let x = arg.eval(t)?;
                match f {
                    Func::Sin => Ok(x.sin()),
                    Func::Cos => Ok(x.cos()),
                    Func::Exp => Ok(x.exp()),
                    Func::Log => {
                        if x <= 0.0 {
                            Err(Error::LogDomain(x))
                        } else {
                            Ok(x.ln())
                        }
                    }
                    Func::Abs => Ok(x.abs()),
                }
            }
        }
    }

    /// Symbolic classical derivative with respect to `t`. No simplification
    /// guarantees beyond constant folding.
    pub fn classical_derivative(&self) -> Result<Expr> {
        let d = match self {
            Expr::Const(_) => Expr::constant_int(0),
            Expr::Var => Expr::constant_int(1),
            Expr::Add(a, b) => fold_add(a.classical_derivative()?, b.classical_derivative()?),
            Expr::Sub(a, b) => fold_sub(a.classical_derivative()?, b.classical_derivative()?),
            Expr::Mul(a, b) => fold_add(
                fold_mul(a.classical_derivative()?, (**b).clone()),
                fold_mul((**a).clone(), b.classical_derivative()?),
            ),
            Expr::Div(a, b) => Expr::div(
                fold_sub(
                    fold_mul(a.classical_derivative()?, (**b).clone()),
                    fold_mul((**a).clone(), b.classical_derivative()?),
                ),
                Expr::pow((**b).clone(), Rational64::from_integer(2)),
            ),
            Expr::Pow { base, exp } => {
                if exp.is_zero() {
                    Expr::constant_int(0)
                } else {
                    fold_mul(
                        fold_mul(
                            Expr::constant_rat(*exp),
                            Expr::pow((**base).clone(), exp - Rational64::from_integer(1)),
                        ),
                        base.classical_derivative()?,
                    )
                }
            }
            Expr::Call(f, arg) => {
                let inner = arg.classical_derivative()?;
                let outer = match f {
                    Func::Sin => Expr::Call(Func::Cos, arg.clone()),
                    Func::Cos => fold_mul(
                        Expr::constant_int(-1),
                        Expr::Call(Func::Sin, arg.clone()),
                    ),
                    Func::Exp => Expr::Call(Func::Exp, arg.clone()),
                    Func::Log => Expr::div(Expr::constant_int(1), (**arg).clone()),
                    Func::Abs => {
                        return Err(Error::NonDifferentiable(
                            "abs has no total derivative".into(),
                        ))
                    }
                };
                fold_mul(outer, inner)
            }
        };
        Ok(d)
    }

    fn as_rational(&self) -> Option<Rational64> {
        match self {
            Expr::Const(s) => s.as_rational(),
            Expr::Add(a, b) => Some(a.as_rational()? + b.as_rational()?),
            Expr::Sub(a, b) => Some(a.as_rational()? - b.as_rational()?),
            Expr::Mul(a, b) => Some(a.as_rational()? * b.as_rational()?),
            Expr::Div(a, b) => {
                let den = b.as_rational()?;
                if den.is_zero() {
                    None
                } else {
                    Some(a.as_rational()? / den)
                }
            }
            _ => None,
        }
    }
}

fn fold_add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), _) if x.value() == 0.0 => b,
        (_, Expr::Const(y)) if y.value() == 0.0 => a,
        (Expr::Const(Scalar::Rat(x)), Expr::Const(Scalar::Rat(y))) => Expr::constant_rat(x + y),
        _ => Expr::add(a, b),
    }
}

fn fold_sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (_, Expr::Const(y)) if y.value() == 0.0 => a,
        (Expr::Const(Scalar::Rat(x)), Expr::Const(Scalar::Rat(y))) => Expr::constant_rat(x - y),
        _ => Expr::sub(a, b),
    }
}

fn fold_mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), _) if x.value() == 0.0 => Expr::constant_int(0),
        (_, Expr::Const(y)) if y.value() == 0.0 => Expr::constant_int(0),
        (Expr::Const(x), _) if x.value() == 1.0 => b,
        (_, Expr::Const(y)) if y.value() == 1.0 => a,
        (Expr::Const(Scalar::Rat(x)), Expr::Const(Scalar::Rat(y))) => Expr::constant_rat(x * y),
        _ => Expr::mul(a, b),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(Scalar::Rat(r)) => {
                if r.denom() == &1 {
                    write!(f, "{}", r.numer())
                } else if r.is_negative() {
                    write!(f, "({}/{})", r.numer(), r.denom())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Expr::Const(Scalar::Real(x)) => {
                if *x < 0.0 {
                    write!(f, "({x})")
                } else {
                    write!(f, "{x}")
                }
            }
            Expr::Var => write!(f, "t"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow { base, exp } => {
                if exp.denom() == &1 && !exp.is_negative() {
                    write!(f, "({base})^{}", exp.numer())
                } else {
                    write!(f, "({base})^({}/{})", exp.numer(), exp.denom())
                }
            }
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

/// Parses an expression with standard precedence: `^` (right-associative)
/// binds tighter than unary minus, which binds tighter than `*` `/`, which
/// bind tighter than `+` `-`.
pub fn parse(text: &str) -> Result<Expr> {
    let mut parser = Parser {
        chars: text.char_indices().collect(),
        pos: 0,
        len: text.len(),
    };
    let expr = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.chars.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(expr)
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn error(&self, msg: &str) -> Error {
        let pos = self
            .chars
            .get(self.pos)
            .map(|&(byte, _)| byte)
            .unwrap_or(self.len);
        Error::SyntaxError { pos, msg: msg.into() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, expected: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(expected) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('+') => {
                    self.bump();
                    lhs = Expr::add(lhs, self.term()?);
                }
                Some('-') => {
                    self.bump();
                    lhs = Expr::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('*') => {
                    self.bump();
                    lhs = Expr::mul(lhs, self.unary()?);
                }
                Some('/') => {
                    self.bump();
                    lhs = Expr::div(lhs, self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        self.skip_ws();
        if self.peek() == Some('-') {
            self.bump();
            return Ok(Expr::sub(Expr::constant_int(0), self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp_expr = self.exponent_operand()?;
            let exp = exp_expr
                .as_rational()
                .ok_or_else(|| self.error("exponent must be an exact rational"))?;
            return Ok(Expr::pow(base, exp));
        }
        Ok(base)
    }

    /// The operand of `^`: a (possibly negated or parenthesized) constant,
    /// or a nested power so `^` stays right-associative.
    fn exponent_operand(&mut self) -> Result<Expr> {
        self.skip_ws();
        if self.peek() == Some('-') {
            self.bump();
            let inner = self.exponent_operand()?;
            return Ok(Expr::sub(Expr::constant_int(0), inner));
        }
        self.power()
    }

    fn atom(&mut self) -> Result<Expr> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.bump();
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            _ => Err(self.error("expected a number, `t`, a function call, or `(`")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.') {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        match parse_rational(&text) {
            Ok(r) => Ok(Expr::constant_rat(r)),
            Err(_) => text
                .parse::<f64>()
                .map(Expr::constant)
                .map_err(|_| self.error("malformed number")),
        }
    }

    fn ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        if name == "t" {
            return Ok(Expr::Var);
        }
        let func = match name.as_str() {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "abs" => Func::Abs,
            _ => return Err(self.error("unknown identifier")),
        };
        if !self.eat('(') {
            return Err(self.error("expected `(` after function name"));
        }
        let arg = self.expr()?;
        if !self.eat(')') {
            return Err(self.error("expected `)`"));
        }
        Ok(Expr::Call(func, Box::new(arg)))
    }
}
