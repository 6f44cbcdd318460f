//! Closed-form expression trees in the variables `x` and `t`.
//!
//! The node set is fixed: constants, the two variables, the four arithmetic
//! operations, powers with a *real constant* exponent, and exp/log/sin/cos/
//! arctan/sqrt. Differentiation is closed over this set. There is no general
//! simplifier; the smart constructors only fold constants and a few exact
//! rewrites (`exp(c*log f) -> f^c`, `(f^a)^b -> f^(a*b)`, ...) that keep
//! derivative trees small and make antiderivative pattern matching reliable.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    T,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    X,
    T,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Power with a real constant exponent.
    Pow(Box<Expr>, f64),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Atan(Box<Expr>),
    Sqrt(Box<Expr>),
}

use Expr::*;

/// Shorthand constructors. These fold constants; they do not simplify
/// symbolically beyond the listed rewrites.
impl Expr {
    pub fn c(v: f64) -> Expr {
        Const(v)
    }

    pub fn x() -> Expr {
        X
    }

    pub fn t() -> Expr {
        T
    }

    pub fn var(v: Var) -> Expr {
        match v {
            Var::X => X,
            Var::T => T,
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Const(p), Const(q)) => Const(p + q),
            (Const(p), b) if p == 0.0 => b,
            (a, Const(q)) if q == 0.0 => a,
            (a, b) => Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Const(p), Const(q)) => Const(p - q),
            (a, Const(q)) if q == 0.0 => a,
            (Const(p), b) if p == 0.0 => Expr::mul(Const(-1.0), b),
            (a, b) => Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Const(p), Const(q)) => Const(p * q),
            (Const(p), _) | (_, Const(p)) if p == 0.0 => Const(0.0),
            (Const(p), b) if p == 1.0 => b,
            (a, Const(q)) if q == 1.0 => a,
            (Const(p), Mul(q, f)) | (Mul(q, f), Const(p)) => {
                if let Const(q) = *q {
                    Expr::mul(Const(p * q), *f)
                } else {
                    Mul(Box::new(Const(p)), Box::new(Mul(q, f)))
                }
            }
            // constants to the left so that factor collection sees them first
            (a, Const(q)) => Mul(Box::new(Const(q)), Box::new(a)),
            (a, b) => Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Const(p), Const(q)) if q != 0.0 => Const(p / q),
            (a, Const(q)) if q == 1.0 => a,
            (Const(p), _) if p == 0.0 => Const(0.0),
            (a, Const(q)) if q != 0.0 => Expr::mul(Const(1.0 / q), a),
            (a, b) => Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(f: Expr, r: f64) -> Expr {
        if r == 0.0 {
            return Const(1.0);
        }
        if r == 1.0 {
            return f;
        }
        match f {
            Const(c) => Const(c.powf(r)),
            Pow(g, a) => Expr::pow(*g, a * r),
            Sqrt(g) => Expr::pow(*g, 0.5 * r),
            Exp(g) => Expr::exp(Expr::mul(Const(r), *g)),
            f => Pow(Box::new(f), r),
        }
    }

    pub fn exp(f: Expr) -> Expr {
        match f {
            Const(c) => Const(c.exp()),
            Log(g) => *g,
            Mul(c, g) => match (*c, *g) {
                (Const(c), Log(g)) => Expr::pow(*g, c),
                (c, g) => Exp(Box::new(Mul(Box::new(c), Box::new(g)))),
            },
            f => Exp(Box::new(f)),
        }
    }

    pub fn log(f: Expr) -> Expr {
        match f {
            Const(c) if c > 0.0 => Const(c.ln()),
            Exp(g) => *g,
            f => Log(Box::new(f)),
        }
    }

    pub fn sin(f: Expr) -> Expr {
        match f {
            Const(c) => Const(c.sin()),
            f => Sin(Box::new(f)),
        }
    }

    pub fn cos(f: Expr) -> Expr {
        match f {
            Const(c) => Const(c.cos()),
            f => Cos(Box::new(f)),
        }
    }

    pub fn atan(f: Expr) -> Expr {
        match f {
            Const(c) => Const(c.atan()),
            f => Atan(Box::new(f)),
        }
    }

    pub fn sqrt(f: Expr) -> Expr {
        match f {
            Const(c) if c >= 0.0 => Const(c.sqrt()),
            Pow(g, a) => Expr::pow(*g, 0.5 * a),
            f => Sqrt(Box::new(f)),
        }
    }

    /// Exact partial derivative; the result stays inside the node set.
    pub fn diff(&self, v: Var) -> Expr {
        match self {
            Const(_) => Const(0.0),
            X => Const(if v == Var::X { 1.0 } else { 0.0 }),
            T => Const(if v == Var::T { 1.0 } else { 0.0 }),
            Add(a, b) => Expr::add(a.diff(v), b.diff(v)),
            Sub(a, b) => Expr::sub(a.diff(v), b.diff(v)),
            Mul(a, b) => Expr::add(
                Expr::mul(a.diff(v), (**b).clone()),
                Expr::mul((**a).clone(), b.diff(v)),
            ),
            Div(a, b) => Expr::div(
                Expr::sub(
                    Expr::mul(a.diff(v), (**b).clone()),
                    Expr::mul((**a).clone(), b.diff(v)),
                ),
                Expr::mul((**b).clone(), (**b).clone()),
            ),
            Pow(f, r) => Expr::mul(
                Expr::mul(Const(*r), Expr::pow((**f).clone(), r - 1.0)),
                f.diff(v),
            ),
            Exp(f) => Expr::mul(Expr::exp((**f).clone()), f.diff(v)),
            Log(f) => Expr::div(f.diff(v), (**f).clone()),
            Sin(f) => Expr::mul(Expr::cos((**f).clone()), f.diff(v)),
            Cos(f) => Expr::mul(
                Expr::mul(Const(-1.0), Expr::sin((**f).clone())),
                f.diff(v),
            ),
            Atan(f) => Expr::div(
                f.diff(v),
                Expr::add(Const(1.0), Expr::mul((**f).clone(), (**f).clone())),
            ),
            Sqrt(f) => Expr::div(
                f.diff(v),
                Expr::mul(Const(2.0), Expr::sqrt((**f).clone())),
            ),
        }
    }

    /// n-th partial derivative.
    pub fn diff_n(&self, v: Var, n: usize) -> Expr {
        let mut e = self.clone();
        for _ in 0..n {
            e = e.diff(v);
        }
        e
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        match self {
            Const(c) => *c,
            X => x,
            T => t,
            Add(a, b) => a.eval(x, t) + b.eval(x, t),
            Sub(a, b) => a.eval(x, t) - b.eval(x, t),
            Mul(a, b) => a.eval(x, t) * b.eval(x, t),
            Div(a, b) => a.eval(x, t) / b.eval(x, t),
            Pow(f, r) => f.eval(x, t).powf(*r),
            Exp(f) => f.eval(x, t).exp(),
            Log(f) => f.eval(x, t).ln(),
            Sin(f) => f.eval(x, t).sin(),
            Cos(f) => f.eval(x, t).cos(),
            Atan(f) => f.eval(x, t).atan(),
            Sqrt(f) => f.eval(x, t).sqrt(),
        }
    }

    /// Evaluation over complex scalars (principal branches).
    pub fn eval_c(&self, x: C64, t: C64) -> C64 {
        match self {
            Const(c) => C64::new(*c, 0.0),
            X => x,
            T => t,
            Add(a, b) => a.eval_c(x, t) + b.eval_c(x, t),
            Sub(a, b) => a.eval_c(x, t) - b.eval_c(x, t),
            Mul(a, b) => a.eval_c(x, t) * b.eval_c(x, t),
            Div(a, b) => a.eval_c(x, t) / b.eval_c(x, t),
            Pow(f, r) => f.eval_c(x, t).powf(*r),
            Exp(f) => f.eval_c(x, t).exp(),
            Log(f) => f.eval_c(x, t).ln(),
            Sin(f) => f.eval_c(x, t).sin(),
            Cos(f) => f.eval_c(x, t).cos(),
            Atan(f) => f.eval_c(x, t).atan(),
            Sqrt(f) => f.eval_c(x, t).sqrt(),
        }
    }

    /// Replace a variable by a subtree (rebuilds through the smart
    /// constructors, so constants fold).
    pub fn substitute(&self, v: Var, repl: &Expr) -> Expr {
        match self {
            Const(c) => Const(*c),
            X => {
                if v == Var::X {
                    repl.clone()
                } else {
                    X
                }
            }
            T => {
                if v == Var::T {
                    repl.clone()
                } else {
                    T
                }
            }
            Add(a, b) => Expr::add(a.substitute(v, repl), b.substitute(v, repl)),
            Sub(a, b) => Expr::sub(a.substitute(v, repl), b.substitute(v, repl)),
            Mul(a, b) => Expr::mul(a.substitute(v, repl), b.substitute(v, repl)),
            Div(a, b) => Expr::div(a.substitute(v, repl), b.substitute(v, repl)),
            Pow(f, r) => Expr::pow(f.substitute(v, repl), *r),
            Exp(f) => Expr::exp(f.substitute(v, repl)),
            Log(f) => Expr::log(f.substitute(v, repl)),
            Sin(f) => Expr::sin(f.substitute(v, repl)),
            Cos(f) => Expr::cos(f.substitute(v, repl)),
            Atan(f) => Expr::atan(f.substitute(v, repl)),
            Sqrt(f) => Expr::sqrt(f.substitute(v, repl)),
        }
    }

    /// Fix one variable to a number.
    pub fn at_var(&self, v: Var, value: f64) -> Expr {
        self.substitute(v, &Const(value))
    }

    pub fn depends_on(&self, v: Var) -> bool {
        match self {
            Const(_) => false,
            X => v == Var::X,
            T => v == Var::T,
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => {
                a.depends_on(v) || b.depends_on(v)
            }
            Pow(f, _) | Exp(f) | Log(f) | Sin(f) | Cos(f) | Atan(f) | Sqrt(f) => {
                f.depends_on(v)
            }
        }
    }

    /// Coefficients (ascending) if the tree is exactly a polynomial in `v`
    /// with no occurrence of the other variable. Degree capped at 64.
    pub fn poly_coeffs(&self, v: Var) -> Option<Vec<f64>> {
        const CAP: usize = 64;
        fn conv(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
            if a.len() + b.len() > CAP + 2 {
                return None;
            }
            let mut out = vec![0.0; a.len() + b.len() - 1];
            for (i, &ai) in a.iter().enumerate() {
                for (j, &bj) in b.iter().enumerate() {
                    out[i + j] += ai * bj;
                }
            }
            Some(out)
        }
        fn zip(a: Vec<f64>, b: Vec<f64>, sign: f64) -> Vec<f64> {
            let n = a.len().max(b.len());
            let mut out = vec![0.0; n];
            for (i, v) in a.into_iter().enumerate() {
                out[i] += v;
            }
            for (i, v) in b.into_iter().enumerate() {
                out[i] += sign * v;
            }
            out
        }
        let other = match v {
            Var::X => Var::T,
            Var::T => Var::X,
        };
        if self.depends_on(other) {
            return None;
        }
        match self {
            Const(c) => Some(vec![*c]),
            X | T => Some(vec![0.0, 1.0]),
            Add(a, b) => Some(zip(a.poly_coeffs(v)?, b.poly_coeffs(v)?, 1.0)),
            Sub(a, b) => Some(zip(a.poly_coeffs(v)?, b.poly_coeffs(v)?, -1.0)),
            Mul(a, b) => conv(&a.poly_coeffs(v)?, &b.poly_coeffs(v)?),
            Div(a, b) => {
                let den = b.poly_coeffs(v)?;
                if den.len() == 1 && den[0] != 0.0 {
                    Some(a.poly_coeffs(v)?.iter().map(|c| c / den[0]).collect())
                } else {
                    None
                }
            }
            Pow(f, r) => {
                if *r >= 0.0 && r.fract() == 0.0 && *r <= CAP as f64 {
                    let base = f.poly_coeffs(v)?;
                    let mut acc = vec![1.0];
                    for _ in 0..(*r as usize) {
                        acc = conv(&acc, &base)?;
                    }
                    Some(acc)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Multiplicative split: collect constant factors, return `(k, rest)`
    /// with `self = k * rest`.
    pub fn split_const(&self) -> (f64, Expr) {
        match self {
            Const(c) => (*c, Const(1.0)),
            Mul(a, b) => {
                let (ka, ra) = a.split_const();
                let (kb, rb) = b.split_const();
                (ka * kb, Expr::mul(ra, rb))
            }
            Div(a, b) => {
                if let Const(c) = **b {
                    if c != 0.0 {
                        let (ka, ra) = a.split_const();
                        return (ka / c, ra);
                    }
                }
                (1.0, self.clone())
            }
            e => (1.0, e.clone()),
        }
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add(self, rhs)
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul(self, rhs)
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::div(self, rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul(Const(-1.0), self)
    }
}

fn prec(e: &Expr) -> u8 {
    match e {
        Add(..) | Sub(..) => 1,
        Mul(..) | Div(..) => 2,
        Pow(..) => 3,
        Const(c) if *c < 0.0 => 2,
        _ => 4,
    }
}

fn fmt_child(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if prec(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const(c) => write!(f, "{c}"),
            X => write!(f, "x"),
            T => write!(f, "t"),
            Add(a, b) => {
                fmt_child(f, a, 1)?;
                write!(f, " + ")?;
                fmt_child(f, b, 2)
            }
            Sub(a, b) => {
                fmt_child(f, a, 1)?;
                write!(f, " - ")?;
                fmt_child(f, b, 2)
            }
            Mul(a, b) => {
                fmt_child(f, a, 2)?;
                write!(f, "*")?;
                fmt_child(f, b, 3)
            }
            Div(a, b) => {
                fmt_child(f, a, 2)?;
                write!(f, "/")?;
                fmt_child(f, b, 3)
            }
            // the exponent grammar is [sign] number, so no parens here
            Pow(b, r) => {
                fmt_child(f, b, 4)?;
                write!(f, "^{r}")
            }
            Exp(a) => write!(f, "exp({a})"),
            Log(a) => write!(f, "log({a})"),
            Sin(a) => write!(f, "sin({a})"),
            Cos(a) => write!(f, "cos({a})"),
            Atan(a) => write!(f, "arctan({a})"),
            Sqrt(a) => write!(f, "sqrt({a})"),
        }
    }
}

// ---------------------------------------------------------------------------
// Parser: minimal infix grammar over the node set. `^` takes a numeric
// exponent only (real-exponent powers). Errors carry the byte position.
// ---------------------------------------------------------------------------

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
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn next(&mut self) -> Result<Option<(usize, Tok)>> {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let start = self.pos;
        let b = self.src[self.pos];
        let tok = match b {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'/' => {
                self.pos += 1;
                Tok::Slash
            }
            b'^' => {
                self.pos += 1;
                Tok::Caret
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'0'..=b'9' | b'.' => {
                let mut end = self.pos;
                while end < self.src.len()
                    && (self.src[end].is_ascii_digit() || self.src[end] == b'.')
                {
                    end += 1;
                }
                // exponent part only when followed by a digit (so "2exp(t)"
                // lexes as 2 * ... rather than a malformed number)
                if end < self.src.len() && (self.src[end] == b'e' || self.src[end] == b'E') {
                    let mut e2 = end + 1;
                    if e2 < self.src.len() && (self.src[e2] == b'+' || self.src[e2] == b'-') {
                        e2 += 1;
                    }
                    if e2 < self.src.len() && self.src[e2].is_ascii_digit() {
                        end = e2;
                        while end < self.src.len() && self.src[end].is_ascii_digit() {
                            end += 1;
                        }
                    }
                }
                let text = std::str::from_utf8(&self.src[start..end]).unwrap();
                let v: f64 = text.parse().map_err(|_| Error::Parse {
                    pos: start,
                    msg: format!("invalid number `{text}`"),
                })?;
                self.pos = end;
                Tok::Num(v)
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut end = self.pos;
                while end < self.src.len()
                    && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                {
                    end += 1;
                }
                let text = std::str::from_utf8(&self.src[start..end]).unwrap();
                self.pos = end;
                Tok::Ident(text.to_string())
            }
            other => {
                return Err(Error::Parse {
                    pos: start,
                    msg: format!("unexpected character `{}`", other as char),
                })
            }
        };
        Ok(Some((start, tok)))
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(usize, Tok)> {
        self.toks.get(self.idx)
    }

    fn bump(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.idx).cloned();
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.peek().map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some((_, Tok::Plus)) => {
                    self.idx += 1;
                    acc = Expr::add(acc, self.term()?);
                }
                Some((_, Tok::Minus)) => {
                    self.idx += 1;
                    acc = Expr::sub(acc, self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some((_, Tok::Star)) => {
                    self.idx += 1;
                    acc = Expr::mul(acc, self.unary()?);
                }
                Some((_, Tok::Slash)) => {
                    self.idx += 1;
                    acc = Expr::div(acc, self.unary()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr> {
        if let Some((_, Tok::Minus)) = self.peek() {
            self.idx += 1;
            let e = self.unary()?;
            return Ok(Expr::mul(Const(-1.0), e));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if let Some((_, Tok::Caret)) = self.peek() {
            self.idx += 1;
            let mut sign = 1.0;
            if let Some((_, Tok::Minus)) = self.peek() {
                self.idx += 1;
                sign = -1.0;
            } else if let Some((_, Tok::Plus)) = self.peek() {
                self.idx += 1;
            }
            let pos = self.here();
            match self.bump() {
                Some((_, Tok::Num(r))) => Ok(Expr::pow(base, sign * r)),
                _ => Err(Error::Parse {
                    pos,
                    msg: "exponent must be a real number".into(),
                }),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.here();
        match self.bump() {
            Some((_, Tok::Num(v))) => Ok(Const(v)),
            Some((_, Tok::LParen)) => {
                let e = self.expr()?;
                let pos = self.here();
                match self.bump() {
                    Some((_, Tok::RParen)) => Ok(e),
                    _ => Err(Error::Parse {
                        pos,
                        msg: "expected `)`".into(),
                    }),
                }
            }
            Some((ipos, Tok::Ident(name))) => match name.as_str() {
                "x" => Ok(X),
                "t" => Ok(T),
                "pi" => Ok(Const(std::f64::consts::PI)),
                "exp" | "log" | "sin" | "cos" | "arctan" | "atan" | "sqrt" => {
                    let pos = self.here();
                    match self.bump() {
                        Some((_, Tok::LParen)) => {}
                        _ => {
                            return Err(Error::Parse {
                                pos,
                                msg: format!("expected `(` after `{name}`"),
                            })
                        }
                    }
                    let arg = self.expr()?;
                    let pos = self.here();
                    match self.bump() {
                        Some((_, Tok::RParen)) => {}
                        _ => {
                            return Err(Error::Parse {
                                pos,
                                msg: "expected `)`".into(),
                            })
                        }
                    }
                    Ok(match name.as_str() {
                        "exp" => Expr::exp(arg),
                        "log" => Expr::log(arg),
                        "sin" => Expr::sin(arg),
                        "cos" => Expr::cos(arg),
                        "arctan" | "atan" => Expr::atan(arg),
                        "sqrt" => Expr::sqrt(arg),
                        _ => unreachable!(),
                    })
                }
                other => Err(Error::Parse {
                    pos: ipos,
                    msg: format!("unknown identifier `{other}`"),
                }),
            },
            _ => Err(Error::Parse {
                pos,
                msg: "expected a number, variable, function, or `(`".into(),
            }),
        }
    }
}

/// Parse the minimal infix grammar (`x`, `t`, `pi`, numbers, `+ - * /`,
/// `^` with numeric exponent, `exp log sin cos arctan sqrt`, parentheses).
pub fn parse(src: &str) -> Result<Expr> {
    let mut lx = Lexer::new(src);
    let mut toks = Vec::new();
    while let Some(t) = lx.next()? {
        toks.push(t);
    }
    let end = src.len();
    let mut p = Parser { toks, idx: 0, end };
    let e = p.expr()?;
    if let Some((pos, _)) = p.peek() {
        return Err(Error::Parse {
            pos: *pos,
            msg: "unexpected trailing input".into(),
        });
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn differentiates_product_and_chain() {
        // d/dx [x^2 sin(t x)] = 2x sin(tx) + x^2 t cos(tx)
        let e = Expr::mul(Expr::pow(X, 2.0), Expr::sin(Expr::mul(T, X)));
        let d = e.diff(Var::X);
        let (x, t) = (0.7f64, 1.3f64);
        let want = 2.0 * x * (t * x).sin() + x * x * t * (t * x).cos();
        assert_close(d.eval(x, t), want, 1e-14);
    }

    #[test]
    fn pow_rewrites_compose() {
        // (sqrt(1+t^2))^-2 -> (1+t^2)^-1
        let c = Expr::sqrt(Expr::add(Const(1.0), Expr::mul(T, T)));
        let inv2 = Expr::pow(c, -2.0);
        assert_eq!(inv2, Pow(Box::new(Add(Box::new(Const(1.0)), Box::new(Mul(Box::new(T), Box::new(T))))), -1.0));
        // exp(0.5 log f) -> f^0.5
        let f = Expr::add(Const(1.0), Expr::mul(T, T));
        let e = Expr::exp(Expr::mul(Const(0.5), Expr::log(f.clone())));
        assert_eq!(e, Expr::pow(f, 0.5));
    }

    #[test]
    fn polynomial_extraction() {
        // 3 + t*(2 - t^2) = 3 + 2t - t^3
        let e = Expr::add(
            Const(3.0),
            Expr::mul(T, Expr::sub(Const(2.0), Expr::pow(T, 2.0))),
        );
        assert_eq!(e.poly_coeffs(Var::T), Some(vec![3.0, 2.0, 0.0, -1.0]));
        assert_eq!(Expr::sin(T).poly_coeffs(Var::T), None);
        // x present => not a polynomial in t
        let e = Expr::add(T, X);
        assert_eq!(e.poly_coeffs(Var::T), None);
    }

    #[test]
    fn substitute_folds() {
        let e = Expr::mul(Expr::add(X, Const(1.0)), T);
        let s = e.at_var(Var::X, 2.0);
        assert_eq!(s, Expr::mul(Const(3.0), T));
    }

    #[test]
    fn parser_round_trips() {
        let cases = [
            "x^2 + 2*t - 1",
            "exp(-0.25*x^2)*cos(t)",
            "1/(1 + t^2)",
            "sqrt(1 + t^2)",
            "arctan(t) - log(1 + x)",
            "-x + 2e-3",
            "(1 + t^2)^-0.25",
        ];
        for src in cases {
            let e = parse(src).unwrap();
            let (x, t) = (0.37, 0.81);
            let v = e.eval(x, t);
            assert!(v.is_finite(), "{src}");
            // display output parses back to the same values
            let back = parse(&format!("{e}")).unwrap();
            assert_close(back.eval(x, t), v, 1e-12 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn parser_reports_positions() {
        match parse("1 + foo(2)") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse("x ^ t") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse("2*(x + 1") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 8),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn complex_eval_matches_real_on_real_axis() {
        let e = parse("exp(-0.3*x^2)*sin(t) + arctan(x*t)").unwrap();
        let (x, t) = (0.9, -0.4);
        let z = e.eval_c(C64::new(x, 0.0), C64::new(t, 0.0));
        assert_close(z.re, e.eval(x, t), 1e-14);
        assert_close(z.im, 0.0, 1e-14);
    }

    // Safe node set for the derivative property: every branch keeps
    // arguments in-domain (sqrt/log of 1.5 + f^2, bounded exp).
    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (-2.0..2.0f64).prop_map(Expr::c),
            Just(Expr::x()),
            Just(Expr::t()),
        ];
        leaf.prop_recursive(3, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
                inner.clone().prop_map(Expr::sin),
                inner.clone().prop_map(Expr::cos),
                inner.clone().prop_map(Expr::atan),
                inner
                    .clone()
                    .prop_map(|f| Expr::exp(Expr::mul(Expr::c(0.3), f))),
                inner.clone().prop_map(|f| {
                    Expr::sqrt(Expr::add(Expr::c(1.5), Expr::mul(f.clone(), f)))
                }),
                inner.clone().prop_map(|f| {
                    Expr::log(Expr::add(Expr::c(1.5), Expr::mul(f.clone(), f)))
                }),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| {
                    Expr::div(a, Expr::add(Expr::c(2.0), Expr::mul(b.clone(), b)))
                }),
                inner
                    .clone()
                    .prop_map(|f| Expr::pow(Expr::add(Expr::c(2.0), Expr::mul(f.clone(), f)), -0.5)),
            ]
        })
    }

    proptest! {
        // Central differences of eval() converge to eval(diff()) at O(h^2):
        // the h/2 error must drop below half the h error (plus a noise floor).
        #[test]
        fn derivative_matches_finite_difference(
            e in arb_expr(),
            x in -1.2..1.2f64,
            t in -1.2..1.2f64,
            xvar in proptest::bool::ANY,
        ) {
            let v = if xvar { Var::X } else { Var::T };
            let de = e.diff(v).eval(x, t);
            prop_assume!(de.is_finite() && de.abs() < 1e3);
            let f = |x: f64, t: f64| e.eval(x, t);
            let fd = |h: f64| -> f64 {
                let (fp, fm) = if xvar {
                    (f(x + h, t), f(x - h, t))
                } else {
                    (f(x, t + h), f(x, t - h))
                };
                (fp - fm) / (2.0 * h)
            };
            let scale = 1.0 + de.abs() + f(x, t).abs();
            prop_assume!(scale < 1e3);
            let e1 = (fd(1e-3) - de).abs();
            let e2 = (fd(5e-4) - de).abs();
            prop_assert!(
                e2 <= e1 / 2.0 + 1e-8 * scale,
                "no O(h^2) convergence: e1={e1:.3e} e2={e2:.3e} de={de:.3e}"
            );
        }
    }
}
