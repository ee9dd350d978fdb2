//! A small closed-form expression language for Weingarten functions, PDE
//! right-hand sides and boundary data.
//!
//! Grammar (usual precedence, `^` is right-associative):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | var | 'e' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func   := exp | ln | log | sqrt | sin | cos | tan | atan | arctan | sinh | cosh | tanh | sech
//! var    := nu | ν | lam | λ | x | u | v
//! ```
//!
//! `nu`, `λ`, `x` all denote the single primary variable; `u`, `v` are chart
//! coordinates used only by boundary and Cauchy data.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value together with first and second derivatives with respect to the
/// primary variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Jet { v, d1: 0.0, d2: 0.0 }
    }

    pub fn variable(v: f64) -> Self {
        Jet { v, d1: 1.0, d2: 0.0 }
    }

    /// Composes a scalar function given by `(h, h', h'')` at `self.v`.
    fn chain(self, h: f64, h1: f64, h2: f64) -> Jet {
        Jet {
            v: h,
            d1: h1 * self.d1,
            d2: h2 * self.d1 * self.d1 + h1 * self.d2,
        }
    }

    pub fn exp(self) -> Jet {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Jet {
        let x = self.v;
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }

    pub fn sqrt(self) -> Jet {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }

    pub fn sin(self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn tan(self) -> Jet {
        let t = self.v.tan();
        let sec2 = 1.0 + t * t;
        self.chain(t, sec2, 2.0 * t * sec2)
    }

    pub fn atan(self) -> Jet {
        let x = self.v;
        let r = 1.0 / (1.0 + x * x);
        self.chain(x.atan(), r, -2.0 * x * r * r)
    }

    pub fn sinh(self) -> Jet {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(s, c, s)
    }

    pub fn cosh(self) -> Jet {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(c, s, c)
    }

    pub fn tanh(self) -> Jet {
        let t = self.v.tanh();
        let s2 = 1.0 - t * t;
        self.chain(t, s2, -2.0 * t * s2)
    }

    pub fn sech(self) -> Jet {
        let s = 1.0 / self.v.cosh();
        let t = self.v.tanh();
        self.chain(s, -s * t, s * (2.0 * t * t - 1.0))
    }

    /// `self^c` for a constant exponent; integral exponents accept negative bases.
    pub fn powf(self, c: f64) -> Jet {
        let x = self.v;
        if c == 0.0 {
            return Jet::constant(1.0);
        }
        let h = x.powf(c);
        let h1 = c * x.powf(c - 1.0);
        let h2 = c * (c - 1.0) * x.powf(c - 2.0);
        self.chain(h, h1, h2)
    }

    pub fn pow(self, e: Jet) -> Jet {
        if e.d1 == 0.0 && e.d2 == 0.0 {
            self.powf(e.v)
        } else {
            (e * self.ln()).exp()
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet { v: self.v + o.v, d1: self.d1 + o.d1, d2: self.d2 + o.d2 }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet { v: self.v - o.v, d1: self.d1 - o.d1, d2: self.d2 - o.d2 }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let inv = o.chain(1.0 / o.v, -1.0 / (o.v * o.v), 2.0 / (o.v * o.v * o.v));
        self * inv
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { v: -self.v, d1: -self.d1, d2: -self.d2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
    Tan,
    Atan,
    Sinh,
    Cosh,
    Tanh,
    Sech,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Atan => "atan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Sech => "sech",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "atan" | "arctan" => Func::Atan,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "sech" => Func::Sech,
            _ => return None,
        })
    }

    fn apply(self, x: Jet) -> Jet {
        match self {
            Func::Exp => x.exp(),
            Func::Ln => x.ln(),
            Func::Sqrt => x.sqrt(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Atan => x.atan(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Tanh => x.tanh(),
            Func::Sech => x.sech(),
        }
    }
}

/// Variables an expression may reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Var {
    /// The primary variable (ν or λ).
    X,
    U,
    V,
}

/// Expression tree; serializes as its printed form.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn x() -> Expr {
        Expr::Var(Var::X)
    }

    pub fn c(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn parse(src: &str) -> Result<Expr> {
        Parser::new(src).parse_all()
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    pub fn exp(self) -> Expr {
        Expr::call(Func::Exp, self)
    }

    pub fn ln(self) -> Expr {
        Expr::call(Func::Ln, self)
    }

    pub fn powf(self, p: f64) -> Expr {
        Expr::Pow(Box::new(self), Box::new(Expr::Const(p)))
    }

    pub fn recip(self) -> Expr {
        Expr::c(1.0) / self
    }

    /// Evaluates value and first two derivatives in the primary variable.
    pub fn jet(&self, x: f64) -> Jet {
        self.jet_at(Jet::variable(x), 0.0, 0.0)
    }

    fn jet_at(&self, x: Jet, u: f64, v: f64) -> Jet {
        match self {
            Expr::Const(c) => Jet::constant(*c),
            Expr::Var(Var::X) => x,
            Expr::Var(Var::U) => Jet::constant(u),
            Expr::Var(Var::V) => Jet::constant(v),
            Expr::Neg(a) => -a.jet_at(x, u, v),
            Expr::Add(a, b) => a.jet_at(x, u, v) + b.jet_at(x, u, v),
            Expr::Sub(a, b) => a.jet_at(x, u, v) - b.jet_at(x, u, v),
            Expr::Mul(a, b) => a.jet_at(x, u, v) * b.jet_at(x, u, v),
            Expr::Div(a, b) => a.jet_at(x, u, v) / b.jet_at(x, u, v),
            Expr::Pow(a, b) => a.jet_at(x, u, v).pow(b.jet_at(x, u, v)),
            Expr::Call(f, a) => f.apply(a.jet_at(x, u, v)),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.jet_at(Jet::constant(x), 0.0, 0.0).v
    }

    /// Evaluates an expression of the chart coordinates `(u, v)`.
    pub fn eval_uv(&self, u: f64, v: f64) -> f64 {
        self.jet_at(Jet::constant(0.0), u, v).v
    }

    /// First derivative in the primary variable.
    pub fn deriv(&self, x: f64) -> f64 {
        self.jet(x).d1
    }

    pub fn uses(&self, var: Var) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(w) => *w == var,
            Expr::Neg(a) | Expr::Call(_, a) => a.uses(var),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.uses(var) || b.uses(var)
            }
        }
    }

    /// Substitutes `inner` for the primary variable.
    pub fn compose(&self, inner: &Expr) -> Expr {
        match self {
            Expr::Var(Var::X) => inner.clone(),
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Neg(a) => Expr::Neg(Box::new(a.compose(inner))),
            Expr::Add(a, b) => Expr::Add(Box::new(a.compose(inner)), Box::new(b.compose(inner))),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.compose(inner)), Box::new(b.compose(inner))),
            Expr::Mul(a, b) => Expr::Mul(Box::new(a.compose(inner)), Box::new(b.compose(inner))),
            Expr::Div(a, b) => Expr::Div(Box::new(a.compose(inner)), Box::new(b.compose(inner))),
            Expr::Pow(a, b) => Expr::Pow(Box::new(a.compose(inner)), Box::new(b.compose(inner))),
            Expr::Call(f, a) => Expr::Call(*f, Box::new(a.compose(inner))),
        }
    }

    /// Negation that cancels an outer sign instead of stacking it.
    pub fn negated(&self) -> Expr {
        match self {
            Expr::Neg(a) => (**a).clone(),
            Expr::Const(c) => Expr::Const(-c),
            _ => Expr::Neg(Box::new(self.clone())),
        }
    }

    /// Renders with the primary variable printed as `name`.
    pub fn display_with<'a>(&'a self, name: &'a str) -> impl fmt::Display + 'a {
        Named { expr: self, name }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(c) if *c < 0.0 => 3,
            _ => 5,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, name: &str) -> fmt::Result {
        let wrap = |e: &Expr, min: u8, f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if e.precedence() < min {
                write!(f, "(")?;
                e.write(f, name)?;
                write!(f, ")")
            } else {
                e.write(f, name)
            }
        };
        match self {
            Expr::Const(c) => write!(f, "{}", fmt_num(*c)),
            Expr::Var(Var::X) => write!(f, "{name}"),
            Expr::Var(Var::U) => write!(f, "u"),
            Expr::Var(Var::V) => write!(f, "v"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                wrap(a, 3, f)
            }
            Expr::Add(a, b) => {
                wrap(a, 1, f)?;
                write!(f, " + ")?;
                wrap(b, 2, f)
            }
            Expr::Sub(a, b) => {
                wrap(a, 1, f)?;
                write!(f, " - ")?;
                wrap(b, 2, f)
            }
            Expr::Mul(a, b) => {
                wrap(a, 2, f)?;
                write!(f, "*")?;
                wrap(b, 3, f)
            }
            Expr::Div(a, b) => {
                wrap(a, 2, f)?;
                write!(f, "/")?;
                wrap(b, 4, f)
            }
            Expr::Pow(a, b) => {
                wrap(a, 5, f)?;
                write!(f, "^")?;
                wrap(b, 5, f)
            }
            Expr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write(f, name)?;
                write!(f, ")")
            }
        }
    }
}

fn fmt_num(c: f64) -> String {
    if c == c.trunc() && c.abs() < 1e15 {
        format!("{}", c as i64)
    } else {
        format!("{c}")
    }
}

struct Named<'a> {
    expr: &'a Expr,
    name: &'a str,
}

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.write(f, self.name)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, "nu")
    }
}

impl Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Expr, D::Error> {
        let text = String::deserialize(d)?;
        Expr::parse(&text).map_err(serde::de::Error::custom)
    }
}

impl std::str::FromStr for Expr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Expr> {
        Expr::parse(s)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $variant:ident) => {
        impl $tr for Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr {
                Expr::$variant(Box::new(self), Box::new(o))
            }
        }
    };
}
binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);
binop!(Div, div, Div);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    err: Option<Error>,
}

impl Parser {
    fn new(src: &str) -> Self {
        let mut toks = Vec::new();
        let mut err = None;
        let chars: Vec<(usize, char)> = src.char_indices().collect();
        let mut i = 0;
        while i < chars.len() {
            let (at, c) = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || c == '.' {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                    i += 1;
                }
                // exponent part, e.g. 1e-8
                if i + 1 < chars.len() && (chars[i].1 == 'e' || chars[i].1 == 'E') {
                    let mut k = i + 1;
                    if chars[k].1 == '+' || chars[k].1 == '-' {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].1.is_ascii_digit() {
                        i = k;
                        while i < chars.len() && chars[i].1.is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().map(|c| c.1).collect();
                match text.parse::<f64>() {
                    Ok(v) => toks.push((at, Tok::Num(v))),
                    Err(_) => {
                        err.get_or_insert(Error::Parse { pos: at, msg: format!("bad number '{text}'") });
                    }
                }
            } else if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().map(|c| c.1).collect();
                toks.push((at, Tok::Ident(text)));
            } else if "+-*/^()".contains(c) {
                toks.push((at, Tok::Op(c)));
                i += 1;
            } else if c == '−' {
                toks.push((at, Tok::Op('-')));
                i += 1;
            } else {
                err.get_or_insert(Error::Parse { pos: at, msg: format!("unexpected character '{c}'") });
                i += 1;
            }
        }
        Parser { toks, pos: 0, err }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn at(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(usize::MAX)
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.at(), msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse_all(mut self) -> Result<Expr> {
        if let Some(e) = self.err.take() {
            return Err(e);
        }
        if self.toks.is_empty() {
            return self.fail("empty expression");
        }
        let e = self.expr()?;
        if self.pos != self.toks.len() {
            return self.fail("trailing input");
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = lhs + self.term()?;
            } else if self.eat('-') {
                lhs = lhs - self.term()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = lhs * self.unary()?;
            } else if self.eat('/') {
                lhs = lhs / self.unary()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.unary()?;
            Ok(Expr::Pow(Box::new(base), Box::new(exp)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let Some(tok) = self.peek().cloned() else {
            return self.fail("unexpected end of input");
        };
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::Op('(') => {
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.fail("expected ')'");
                }
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "nu" | "ν" | "lam" | "lambda" | "λ" | "x" => Ok(Expr::Var(Var::X)),
                "u" => Ok(Expr::Var(Var::U)),
                "v" => Ok(Expr::Var(Var::V)),
                "e" => Ok(Expr::Const(std::f64::consts::E)),
                "pi" | "π" => Ok(Expr::Const(std::f64::consts::PI)),
                other => match Func::from_name(other) {
                    Some(func) => {
                        if !self.eat('(') {
                            return self.fail(format!("expected '(' after {other}"));
                        }
                        let arg = self.expr()?;
                        if !self.eat(')') {
                            return self.fail("expected ')'");
                        }
                        Ok(Expr::call(func, arg))
                    }
                    None => {
                        self.pos -= 1;
                        self.fail(format!("unknown identifier '{other}'"))
                    }
                },
            },
            Tok::Op(c) => {
                self.pos -= 1;
                self.fail(format!("unexpected '{c}'"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_and_evaluates() {
        let e = Expr::parse("nu + 1").unwrap();
        assert_eq!(e.eval(2.0), 3.0);
        let e = Expr::parse("exp(nu)").unwrap();
        assert!((e.eval(1.0) - std::f64::consts::E).abs() < 1e-15);
        let e = Expr::parse("-nu^2").unwrap();
        assert_eq!(e.eval(3.0), -9.0);
        let e = Expr::parse("2^3^2").unwrap();
        assert_eq!(e.eval(0.0), 512.0);
        let e = Expr::parse("1e-2 * λ").unwrap();
        assert_eq!(e.eval(100.0), 1.0);
        let e = Expr::parse("ln(8*0.25/(1-0.25*(u^2+v^2))^2)").unwrap();
        assert!((e.eval_uv(0.0, 0.0) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn rejects_garbage() {
        assert!(Expr::parse("").is_err());
        assert!(Expr::parse("nu +").is_err());
        assert!(Expr::parse("foo(nu)").is_err());
        assert!(Expr::parse("(nu").is_err());
        assert!(Expr::parse("nu $ 2").is_err());
    }

    #[test]
    fn jets_match_closed_forms() {
        let e = Expr::parse("atan(nu/2)/2").unwrap();
        let j = e.jet(1.3);
        assert!((j.d1 - 1.0 / (4.0 + 1.69)).abs() < 1e-14);
        let e = Expr::parse("nu^(-2)").unwrap();
        let j = e.jet(-2.0);
        assert!((j.v - 0.25).abs() < 1e-15);
        assert!((j.d1 - 0.25).abs() < 1e-15); // -2 x^-3 at -2
        assert!((j.d2 - 6.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn display_round_trips() {
        for src in ["nu + 1", "(nu - 1)/(2 - nu)", "-(1 + sqrt(1 + nu^2))/nu", "exp(-nu)*2", "nu^-2", "-nu - -3"] {
            let e = Expr::parse(src).unwrap();
            let back = Expr::parse(&e.to_string()).unwrap();
            for x in [0.3, 1.7, 2.9] {
                assert!((e.eval(x) - back.eval(x)).abs() < 1e-12, "{src} -> {e}");
            }
        }
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![(-3.0f64..3.0).prop_map(Expr::Const), Just(Expr::x())];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
                inner.clone().prop_map(|a| -a),
                inner.clone().prop_map(|a| Expr::call(Func::Sin, a)),
                inner.prop_map(|a| Expr::call(Func::Atan, a)),
            ]
        })
    }

    proptest! {
        #[test]
        fn jet_derivatives_agree_with_finite_differences(e in arb_expr(), x in -1.5f64..1.5) {
            let h = 1e-4;
            let j = e.jet(x);
            let fd1 = (e.eval(x + h) - e.eval(x - h)) / (2.0 * h);
            let fd2 = (e.eval(x + h) - 2.0 * e.eval(x) + e.eval(x - h)) / (h * h);
            let scale = 1.0 + j.v.abs() + j.d1.abs() + j.d2.abs();
            prop_assert!((j.d1 - fd1).abs() < 1e-6 * scale);
            prop_assert!((j.d2 - fd2).abs() < 1e-3 * scale);
        }

        #[test]
        fn printed_form_reparses_to_same_function(e in arb_expr(), x in -1.5f64..1.5) {
            let back = Expr::parse(&e.to_string()).unwrap();
            let (a, b) = (e.eval(x), back.eval(x));
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        }
    }
}
