//! Scalar functions of time with derivatives and definite integrals.
//!
//! Closed-form inputs keep their expression tree, so derivatives are exact
//! and integrals use a small antiderivative table (polynomials, p(t)*exp(at+b)
//! by parts, sin/cos of linear arguments, and rational forms that reduce to
//! log and arctan). Anything outside the table falls back to an adaptive
//! Simpson rule. Sampled inputs go through the not-a-knot spline.

use crate::error::{Error, Result};
use crate::expr::{Expr, Var};
use crate::grid::TimeAxis;
use crate::spline::Spline;
use std::sync::OnceLock;

#[derive(Debug)]
pub struct AnalyticTime {
    expr: Expr,
    d1: OnceLock<Expr>,
    d2: OnceLock<Expr>,
    anti: OnceLock<Option<Expr>>,
}

impl Clone for AnalyticTime {
    fn clone(&self) -> Self {
        AnalyticTime {
            expr: self.expr.clone(),
            d1: OnceLock::new(),
            d2: OnceLock::new(),
            anti: OnceLock::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SampledTime {
    axis: TimeAxis,
    spline: Spline,
}

/// A real-valued function of t, either closed form or sampled on an axis.
#[derive(Debug, Clone)]
pub enum TimeFunction {
    Analytic(AnalyticTime),
    Sampled(SampledTime),
}

impl TimeFunction {
    pub fn analytic(expr: Expr) -> Result<TimeFunction> {
        if expr.depends_on(Var::X) {
            return Err(Error::InconsistentConstruction(
                "time function must not depend on x".into(),
            ));
        }
        Ok(TimeFunction::Analytic(AnalyticTime {
            expr,
            d1: OnceLock::new(),
            d2: OnceLock::new(),
            anti: OnceLock::new(),
        }))
    }

    pub fn constant(c: f64) -> TimeFunction {
        TimeFunction::analytic(Expr::c(c)).unwrap()
    }

    pub fn sampled(axis: TimeAxis, values: &[f64]) -> Result<TimeFunction> {
        if values.len() != axis.m() + 1 {
            return Err(Error::MismatchedDiscretization(format!(
                "axis has {} nodes but {} values were given",
                axis.m() + 1,
                values.len()
            )));
        }
        let spline = Spline::new(axis.t0(), axis.dt(), values)?;
        Ok(TimeFunction::Sampled(SampledTime { axis, spline }))
    }

    /// The expression tree, when the function is closed form.
    pub fn expr(&self) -> Option<&Expr> {
        match self {
            TimeFunction::Analytic(a) => Some(&a.expr),
            TimeFunction::Sampled(_) => None,
        }
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        let v = match self {
            TimeFunction::Analytic(a) => a.expr.eval(0.0, t),
            TimeFunction::Sampled(s) => s.spline.value(t)?,
        };
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("time function at t={t}")));
        }
        Ok(v)
    }

    pub fn d1(&self, t: f64) -> Result<f64> {
        let v = match self {
            TimeFunction::Analytic(a) => {
                a.d1.get_or_init(|| a.expr.diff(Var::T)).eval(0.0, t)
            }
            TimeFunction::Sampled(s) => s.spline.d1(t)?,
        };
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("time derivative at t={t}")));
        }
        Ok(v)
    }

    pub fn d2(&self, t: f64) -> Result<f64> {
        let v = match self {
            TimeFunction::Analytic(a) => a
                .d2
                .get_or_init(|| a.expr.diff(Var::T).diff(Var::T))
                .eval(0.0, t),
            TimeFunction::Sampled(s) => s.spline.d2(t)?,
        };
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("second time derivative at t={t}")));
        }
        Ok(v)
    }

    /// Definite integral over [a, b] (signed).
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        let v = match self {
            TimeFunction::Analytic(f) => {
                match f.anti.get_or_init(|| antiderivative(&f.expr)) {
                    Some(big_f) => big_f.eval(0.0, b) - big_f.eval(0.0, a),
                    None => adaptive_simpson(&|t| f.expr.eval(0.0, t), a, b),
                }
            }
            TimeFunction::Sampled(s) => s.spline.integral(a, b)?,
        };
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("integral over [{a}, {b}]")));
        }
        Ok(v)
    }

    /// True when the integral path uses a closed-form antiderivative.
    pub fn has_closed_integral(&self) -> bool {
        match self {
            TimeFunction::Analytic(f) => {
                f.anti.get_or_init(|| antiderivative(&f.expr)).is_some()
            }
            TimeFunction::Sampled(_) => false,
        }
    }

    /// Domain restriction, when the function is sampled.
    pub fn axis(&self) -> Option<&TimeAxis> {
        match self {
            TimeFunction::Analytic(_) => None,
            TimeFunction::Sampled(s) => Some(&s.axis),
        }
    }
}

// ---------------------------------------------------------------------------
// Antiderivative table
// ---------------------------------------------------------------------------

fn poly_expr(coeffs: &[f64]) -> Expr {
    let mut acc = Expr::c(0.0);
    for (i, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let term = match i {
            0 => Expr::c(c),
            1 => Expr::mul(Expr::c(c), Expr::t()),
            _ => Expr::mul(Expr::c(c), Expr::pow(Expr::t(), i as f64)),
        };
        acc = Expr::add(acc, term);
    }
    acc
}

fn poly_antiderivative(coeffs: &[f64]) -> Expr {
    let mut shifted = vec![0.0];
    shifted.extend(coeffs.iter().enumerate().map(|(i, &c)| c / (i + 1) as f64));
    poly_expr(&shifted)
}

fn trim(mut v: Vec<f64>) -> Vec<f64> {
    while v.len() > 1 && *v.last().unwrap() == 0.0 {
        v.pop();
    }
    v
}

/// num = q * den + r with deg r < deg den.
fn poly_divmod(num: &[f64], den: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let den = trim(den.to_vec());
    let mut rem = trim(num.to_vec());
    let dd = den.len() - 1;
    let lead = den[dd];
    if rem.len() - 1 < dd || (rem.len() == 1 && rem[0] == 0.0) {
        return (vec![0.0], rem);
    }
    let mut q = vec![0.0; rem.len() - dd];
    while rem.len() - 1 >= dd && !(rem.len() == 1 && rem[0] == 0.0) {
        let k = rem.len() - 1 - dd;
        let c = rem.last().unwrap() / lead;
        q[k] = c;
        for (i, &dci) in den.iter().enumerate() {
            rem[k + i] -= c * dci;
        }
        rem.pop();
        rem = trim(rem);
        if rem.len() == 1 && rem[0] == 0.0 {
            break;
        }
        if rem.len() - 1 < dd {
            break;
        }
    }
    (q, rem)
}

fn poly_maxabs(p: &[f64]) -> f64 {
    p.iter().fold(0.0f64, |m, c| m.max(c.abs()))
}

/// Euclidean gcd of two float polynomials, monic.  Remainder coefficients
/// below 1e-10 of the remainder scale count as zero; inputs here come from
/// exact small-integer expression trees, so the sequence stays clean.
fn poly_gcd(a: &[f64], b: &[f64]) -> Vec<f64> {
    let clean = |p: Vec<f64>| -> Vec<f64> {
        let scale = poly_maxabs(&p);
        if scale == 0.0 {
            return vec![0.0];
        }
        trim(
            p.into_iter()
                .map(|c| if c.abs() <= 1e-10 * scale { 0.0 } else { c })
                .collect(),
        )
    };
    let monic = |p: Vec<f64>| -> Vec<f64> {
        let lead = *p.last().unwrap();
        if lead == 0.0 {
            return p;
        }
        p.iter().map(|c| c / lead).collect()
    };
    let mut a = clean(a.to_vec());
    let mut b = clean(b.to_vec());
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        if b.len() == 1 {
            return if b[0] == 0.0 { monic(a) } else { vec![1.0] };
        }
        let (_, r) = poly_divmod(&a, &b);
        a = b;
        b = clean(r);
        if !(b.len() == 1 && b[0] == 0.0) {
            b = monic(b);
        }
    }
}

/// Cancel the common polynomial factor of a rational function; keeps the
/// original pair if the candidate division leaves a residue.
fn poly_reduce(num: &[f64], den: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let num = trim(num.to_vec());
    let den = trim(den.to_vec());
    if num.len() == 1 && num[0] == 0.0 {
        return (num, den);
    }
    let g = poly_gcd(&num, &den);
    if g.len() <= 1 {
        return (num, den);
    }
    let (qn, rn) = poly_divmod(&num, &g);
    let (qd, rd) = poly_divmod(&den, &g);
    if poly_maxabs(&rn) > 1e-9 * poly_maxabs(&num)
        || poly_maxabs(&rd) > 1e-9 * poly_maxabs(&den)
    {
        return (num, den);
    }
    (trim(qn), trim(qd))
}

/// Antiderivative of p(t) * exp(a t + b): r(t) * exp(a t + b) with
/// r' + a r = p, solved coefficient by coefficient from the top degree.
fn exp_by_parts(p: &[f64], a: f64, g: &Expr) -> Expr {
    let n = p.len();
    let mut r = vec![0.0; n];
    r[n - 1] = p[n - 1] / a;
    for i in (0..n - 1).rev() {
        r[i] = (p[i] - (i + 1) as f64 * r[i + 1]) / a;
    }
    Expr::mul(poly_expr(&r), Expr::exp(g.clone()))
}

/// Rational antiderivative for the table's denominator shapes:
/// deg 1 (log) and even deg 2 (arctan + log), after polynomial reduction.
fn rational_antiderivative(num: &[f64], den: &[f64]) -> Option<Expr> {
    let (num, den) = poly_reduce(num, den);
    if den.len() == 1 {
        if den[0] == 0.0 {
            return None;
        }
        let scaled: Vec<f64> = num.iter().map(|c| c / den[0]).collect();
        return Some(poly_antiderivative(&scaled));
    }
    // monic denominator keeps the log/arctan arguments tame
    let lead = *den.last().unwrap();
    let num: Vec<f64> = num.iter().map(|c| c / lead).collect();
    let den: Vec<f64> = den.iter().map(|c| c / lead).collect();
    let (q, r) = poly_divmod(&num, &den);
    let q_part = poly_antiderivative(&q);
    let den_expr = poly_expr(&den);
    let tail = match den.len() {
        2 => {
            // r0 / (d0 + d1 t) -> (r0/d1) log(d0 + d1 t)
            let d1 = den[1];
            let r0 = r[0];
            if r0 == 0.0 {
                Expr::c(0.0)
            } else {
                Expr::mul(Expr::c(r0 / d1), Expr::log(den_expr))
            }
        }
        3 => {
            // (r0 + r1 t) / (d0 + d2 t^2), d0 > 0, d2 > 0
            if den[1] != 0.0 {
                return None;
            }
            let (d0, d2) = (den[0], den[2]);
            if d0 <= 0.0 || d2 <= 0.0 {
                return None;
            }
            let r0 = r[0];
            let r1 = if r.len() > 1 { r[1] } else { 0.0 };
            let mut acc = Expr::c(0.0);
            if r1 != 0.0 {
                acc = Expr::add(
                    acc,
                    Expr::mul(Expr::c(r1 / (2.0 * d2)), Expr::log(den_expr.clone())),
                );
            }
            if r0 != 0.0 {
                let k = r0 / (d0 * d2).sqrt();
                let arg = Expr::mul(Expr::c((d2 / d0).sqrt()), Expr::t());
                acc = Expr::add(acc, Expr::mul(Expr::c(k), Expr::atan(arg)));
            }
            acc
        }
        _ => return None,
    };
    Some(Expr::add(q_part, tail))
}

fn collect_factors(e: &Expr, out: &mut Vec<Expr>) {
    if let Expr::Mul(a, b) = e {
        collect_factors(a, out);
        collect_factors(b, out);
    } else {
        out.push(e.clone());
    }
}

fn linear_coeffs(g: &Expr) -> Option<(f64, f64)> {
    let c = g.poly_coeffs(Var::T)?;
    match c.len() {
        1 => Some((0.0, c[0])),
        2 => Some((c[1], c[0])),
        _ => None,
    }
}

/// Closed-form antiderivative in t, if the tree matches the table.
pub(crate) fn antiderivative(e: &Expr) -> Option<Expr> {
    if e.depends_on(Var::X) {
        return None;
    }
    if let Some(p) = e.poly_coeffs(Var::T) {
        return Some(poly_antiderivative(&p));
    }
    match e {
        Expr::Add(a, b) => Some(Expr::add(antiderivative(a)?, antiderivative(b)?)),
        Expr::Sub(a, b) => Some(Expr::sub(antiderivative(a)?, antiderivative(b)?)),
        Expr::Div(num, den) => {
            let n = num.poly_coeffs(Var::T)?;
            let d = den.poly_coeffs(Var::T)?;
            rational_antiderivative(&n, &d)
        }
        _ => {
            let (k, rest) = e.split_const();
            if k == 0.0 {
                return Some(Expr::c(0.0));
            }
            let mut fs = Vec::new();
            collect_factors(&rest, &mut fs);
            // partition into a polynomial part and at most one special factor
            let mut poly = vec![1.0];
            let mut special: Option<Expr> = None;
            for f in fs {
                if let Some(p) = f.poly_coeffs(Var::T) {
                    let mut out = vec![0.0; poly.len() + p.len() - 1];
                    for (i, &a) in poly.iter().enumerate() {
                        for (j, &b) in p.iter().enumerate() {
                            out[i + j] += a * b;
                        }
                    }
                    poly = out;
                } else if special.is_none() {
                    special = Some(f);
                } else {
                    return None;
                }
            }
            let anti = match special {
                None => poly_antiderivative(&poly),
                Some(Expr::Exp(g)) => {
                    let (a, _) = linear_coeffs(&g)?;
                    if a == 0.0 {
                        return None;
                    }
                    exp_by_parts(&poly, a, &g)
                }
                Some(Expr::Sin(g)) => {
                    let (a, _) = linear_coeffs(&g)?;
                    if a == 0.0 || trim(poly.clone()) != vec![1.0] {
                        return None;
                    }
                    Expr::mul(Expr::c(-1.0 / a), Expr::cos((*g).clone()))
                }
                Some(Expr::Cos(g)) => {
                    let (a, _) = linear_coeffs(&g)?;
                    if a == 0.0 || trim(poly.clone()) != vec![1.0] {
                        return None;
                    }
                    Expr::mul(Expr::c(1.0 / a), Expr::sin((*g).clone()))
                }
                Some(Expr::Div(n2, d2)) => {
                    let np = n2.poly_coeffs(Var::T)?;
                    let dp = d2.poly_coeffs(Var::T)?;
                    let mut combined = vec![0.0; poly.len() + np.len() - 1];
                    for (i, &a) in poly.iter().enumerate() {
                        for (j, &b) in np.iter().enumerate() {
                            combined[i + j] += a * b;
                        }
                    }
                    rational_antiderivative(&combined, &dp)?
                }
                Some(Expr::Pow(g, r)) if r < 0.0 && r.fract() == 0.0 && r >= -3.0 => {
                    let base = g.poly_coeffs(Var::T)?;
                    let mut den = vec![1.0];
                    for _ in 0..(-r as usize) {
                        let mut out = vec![0.0; den.len() + base.len() - 1];
                        for (i, &a) in den.iter().enumerate() {
                            for (j, &b) in base.iter().enumerate() {
                                out[i + j] += a * b;
                            }
                        }
                        den = out;
                    }
                    rational_antiderivative(&poly, &den)?
                }
                Some(_) => return None,
            };
            Some(Expr::mul(Expr::c(k), anti))
        }
    }
}

/// Adaptive Simpson by interval doubling (trapezoid refinement plus
/// Richardson), relative target 1e-12, interval cap 8192.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut n = 16usize;
    let h0 = (b - a) / n as f64;
    let mut trap = {
        let mut s = 0.5 * (f(a) + f(b));
        for i in 1..n {
            s += f(a + h0 * i as f64);
        }
        s * h0
    };
    let mut simp = trap;
    loop {
        let h = (b - a) / (2 * n) as f64;
        let mut mids = 0.0;
        for i in 0..n {
            mids += f(a + h * (2 * i + 1) as f64);
        }
        let trap2 = 0.5 * trap + h * mids;
        let simp2 = (4.0 * trap2 - trap) / 3.0;
        n *= 2;
        let done = (simp2 - simp).abs() <= 1e-12 * (1.0 + simp2.abs()) || n >= 8192;
        trap = trap2;
        simp = simp2;
        if done {
            return simp;
        }
    }
}

/// Tabulated cumulative integral of a time function from the start of an
/// axis, built on a refined grid and evaluated by local cubic interpolation.
#[derive(Debug, Clone)]
pub struct CumulativeIntegral {
    t0: f64,
    h: f64,
    table: Vec<f64>,
}

impl CumulativeIntegral {
    pub fn build(f: &TimeFunction, axis: &TimeAxis, refine: usize) -> Result<Self> {
        let m = axis.m() * refine.max(1);
        let h = (axis.t1() - axis.t0()) / m as f64;
        let values: Vec<f64> = (0..=m)
            .map(|k| f.value(axis.t0() + h * k as f64))
            .collect::<Result<_>>()?;
        let table = crate::calculus::cumulative_simpson(&values, h)?;
        Ok(CumulativeIntegral {
            t0: axis.t0(),
            h,
            table,
        })
    }

    /// Integral from the axis start to `t`.
    pub fn at(&self, t: f64) -> Result<f64> {
        crate::calculus::interp_cubic(self.t0, self.h, &self.table, t)
    }

    pub fn end_value(&self) -> f64 {
        *self.table.last().unwrap()
    }
}
