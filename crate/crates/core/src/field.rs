//! Sampled and closed-form fields over the space and space-time grids.
//!
//! `SpaceTimeField` stores complex values time-major (`k*n + j`). The
//! continuous-logarithm routine unwraps the phase along x within each time
//! slice and along t at the left edge, which keeps `log psi` single valued
//! whenever the wavefunction is nodeless on the window.

use crate::calculus;
use crate::error::{Error, Result};
use crate::expr::{Expr, Var};
use crate::grid::{SpatialGrid, TimeAxis};
use crate::spline::Spline;
use num_complex::Complex64 as C64;
use std::sync::Arc;

/// Complex values on a spatial grid at one instant.
#[derive(Debug, Clone)]
pub struct ComplexField {
    grid: SpatialGrid,
    values: Vec<C64>,
}

impl ComplexField {
    pub fn new(grid: SpatialGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::MismatchedDiscretization(format!(
                "grid has {} nodes but {} values were given",
                grid.n(),
                values.len()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("complex field data".into()));
        }
        Ok(ComplexField { grid, values })
    }

    pub fn from_fn(grid: SpatialGrid, f: impl Fn(f64) -> C64) -> Result<Self> {
        let values = grid.points().iter().map(|&x| f(x)).collect();
        ComplexField::new(grid, values)
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// L2 norm via Simpson quadrature of |psi|^2.
    pub fn norm_l2(&self) -> Result<f64> {
        let density: Vec<f64> = self.values.iter().map(|z| z.norm_sqr()).collect();
        Ok(calculus::simpson(&density, self.grid.dx())?.sqrt())
    }
}

/// Complex values on a space-time window, stored time-major.
#[derive(Debug, Clone)]
pub struct SpaceTimeField {
    grid: SpatialGrid,
    axis: TimeAxis,
    values: Vec<C64>,
}

impl SpaceTimeField {
    pub fn new(grid: SpatialGrid, axis: TimeAxis, values: Vec<C64>) -> Result<Self> {
        let want = grid.n() * (axis.m() + 1);
        if values.len() != want {
            return Err(Error::MismatchedDiscretization(format!(
                "window has {} samples but {} values were given",
                want,
                values.len()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("space-time field data".into()));
        }
        Ok(SpaceTimeField { grid, axis, values })
    }

    pub fn from_fn(
        grid: SpatialGrid,
        axis: TimeAxis,
        f: impl Fn(f64, f64) -> C64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.n() * (axis.m() + 1));
        for k in 0..=axis.m() {
            let t = axis.time(k);
            for j in 0..grid.n() {
                values.push(f(grid.point(j), t));
            }
        }
        SpaceTimeField::new(grid, axis, values)
    }

    pub fn try_from_fn(
        grid: SpatialGrid,
        axis: TimeAxis,
        f: impl Fn(f64, f64) -> Result<C64>,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.n() * (axis.m() + 1));
        for k in 0..=axis.m() {
            let t = axis.time(k);
            for j in 0..grid.n() {
                values.push(f(grid.point(j), t)?);
            }
        }
        SpaceTimeField::new(grid, axis, values)
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn axis(&self) -> &TimeAxis {
        &self.axis
    }

    pub fn at(&self, k: usize, j: usize) -> C64 {
        self.values[k * self.grid.n() + j]
    }

    pub fn slice(&self, k: usize) -> &[C64] {
        let n = self.grid.n();
        &self.values[k * n..(k + 1) * n]
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Spatial derivative of the given order, slice by slice.
    pub fn diff_x(&self, order: usize) -> Result<SpaceTimeField> {
        let mut out = Vec::with_capacity(self.values.len());
        for k in 0..=self.axis.m() {
            out.extend(calculus::diff(self.slice(k), self.grid.dx(), order)?);
        }
        SpaceTimeField::new(self.grid.clone(), self.axis.clone(), out)
    }

    /// Time derivative of the given order, column by column.
    pub fn diff_t(&self, order: usize) -> Result<SpaceTimeField> {
        let n = self.grid.n();
        let m1 = self.axis.m() + 1;
        let mut out = vec![C64::new(0.0, 0.0); self.values.len()];
        let mut column = vec![C64::new(0.0, 0.0); m1];
        for j in 0..n {
            for k in 0..m1 {
                column[k] = self.at(k, j);
            }
            let d = calculus::diff(&column, self.axis.dt(), order)?;
            for k in 0..m1 {
                out[k * n + j] = d[k];
            }
        }
        SpaceTimeField::new(self.grid.clone(), self.axis.clone(), out)
    }

    /// Bicubic (4x4 Lagrange) interpolation inside the window.
    pub fn interp(&self, x: f64, t: f64) -> Result<C64> {
        let (jx, ux) = calculus::locate4(self.grid.x_min(), self.grid.dx(), self.grid.n(), x)?;
        let (kt, ut) = calculus::locate4(self.axis.t0(), self.axis.dt(), self.axis.m() + 1, t)?;
        let wx = calculus::lagrange4(ux);
        let wt = calculus::lagrange4(ut);
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..4 {
            let mut row = C64::new(0.0, 0.0);
            for b in 0..4 {
                row = row + self.at(kt + a, jx + b) * wx[b];
            }
            acc = acc + row * wt[a];
        }
        Ok(acc)
    }

    /// One time slice as a `ComplexField`.
    pub fn slice_field(&self, k: usize) -> Result<ComplexField> {
        ComplexField::new(self.grid.clone(), self.slice(k).to_vec())
    }

    /// Continuous logarithm: `re = ln|psi|`, `im` = phase unwrapped along x
    /// within each slice and along t at the left edge. Fails if any node
    /// amplitude drops below 1e-12 of the field maximum.
    pub fn unwrap_log(&self) -> Result<SpaceTimeField> {
        let n = self.grid.n();
        let m1 = self.axis.m() + 1;
        let max_amp = self
            .values
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
        let floor = 1e-12 * max_amp;
        let check = |k: usize, j: usize| -> Result<C64> {
            let z = self.at(k, j);
            if z.norm() < floor || max_amp == 0.0 {
                return Err(Error::NodeInDomain {
                    x: self.grid.point(j),
                    t: self.axis.time(k),
                    k,
                    j,
                    amp: z.norm(),
                });
            }
            Ok(z)
        };
        let mut out = vec![C64::new(0.0, 0.0); self.values.len()];
        let mut left_phase = check(0, 0)?.arg();
        for k in 0..m1 {
            let zk0 = check(k, 0)?;
            if k > 0 {
                left_phase += calculus::principal_angle(zk0.arg() - self.at(k - 1, 0).arg());
            }
            out[k * n] = C64::new(zk0.norm().ln(), left_phase);
            let mut phase = left_phase;
            for j in 1..n {
                let z = check(k, j)?;
                phase += calculus::principal_angle(z.arg() - self.at(k, j - 1).arg());
                out[k * n + j] = C64::new(z.norm().ln(), phase);
            }
        }
        SpaceTimeField::new(self.grid.clone(), self.axis.clone(), out)
    }

    /// Largest |value| over the window.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// A real scalar field on the window: closed form, sampled, or a closure.
#[derive(Clone)]
pub enum RealField {
    Analytic(Expr),
    Sampled {
        grid: SpatialGrid,
        axis: TimeAxis,
        values: Vec<f64>,
    },
    Func(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for RealField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RealField::Analytic(e) => write!(f, "RealField::Analytic({e})"),
            RealField::Sampled { grid, axis, .. } => write!(
                f,
                "RealField::Sampled({} x {} nodes)",
                grid.n(),
                axis.m() + 1
            ),
            RealField::Func(_) => write!(f, "RealField::Func(..)"),
        }
    }
}

impl RealField {
    pub fn sampled(grid: SpatialGrid, axis: TimeAxis, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() * (axis.m() + 1) {
            return Err(Error::MismatchedDiscretization(format!(
                "window has {} samples but {} values were given",
                grid.n() * (axis.m() + 1),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("real field data".into()));
        }
        Ok(RealField::Sampled { grid, axis, values })
    }

    pub fn from_fn(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        RealField::Func(Arc::new(f))
    }

    pub fn expr(&self) -> Option<&Expr> {
        match self {
            RealField::Analytic(e) => Some(e),
            _ => None,
        }
    }

    pub fn value(&self, x: f64, t: f64) -> Result<f64> {
        let v = match self {
            RealField::Analytic(e) => e.eval(x, t),
            RealField::Sampled { grid, axis, values } => {
                interp_bicubic_real(grid, axis, values, x, t)?
            }
            RealField::Func(f) => f(x, t),
        };
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("real field at ({x}, {t})")));
        }
        Ok(v)
    }

    /// Node samples over a window.
    pub fn sample(&self, grid: &SpatialGrid, axis: &TimeAxis) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(grid.n() * (axis.m() + 1));
        for k in 0..=axis.m() {
            let t = axis.time(k);
            for j in 0..grid.n() {
                let v = match self {
                    RealField::Analytic(e) => e.eval(grid.point(j), t),
                    RealField::Sampled {
                        grid: g,
                        axis: a,
                        values,
                    } => interp_bicubic_real(g, a, values, grid.point(j), t)?,
                    RealField::Func(f) => f(grid.point(j), t),
                };
                if !v.is_finite() {
                    return Err(Error::NonFinite(format!(
                        "real field sample at ({}, {t})",
                        grid.point(j)
                    )));
                }
                out.push(v);
            }
        }
        Ok(out)
    }
}

fn interp_bicubic_real(
    grid: &SpatialGrid,
    axis: &TimeAxis,
    values: &[f64],
    x: f64,
    t: f64,
) -> Result<f64> {
    let (jx, ux) = calculus::locate4(grid.x_min(), grid.dx(), grid.n(), x)?;
    let (kt, ut) = calculus::locate4(axis.t0(), axis.dt(), axis.m() + 1, t)?;
    let wx = calculus::lagrange4(ux);
    let wt = calculus::lagrange4(ut);
    let n = grid.n();
    let mut acc = 0.0;
    for a in 0..4 {
        let mut row = 0.0;
        for b in 0..4 {
            row += values[(kt + a) * n + jx + b] * wx[b];
        }
        acc += row * wt[a];
    }
    Ok(acc)
}

/// A wavefunction: polar closed form (exact derivatives), sampled window,
/// or a plain closure.
#[derive(Clone)]
pub enum WaveField {
    Polar {
        amp: Expr,
        phase: Expr,
        amp_x: Expr,
        phase_x: Expr,
    },
    Sampled(SpaceTimeField),
    Func(Arc<dyn Fn(f64, f64) -> C64 + Send + Sync>),
}

impl std::fmt::Debug for WaveField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WaveField::Polar { amp, phase, .. } => {
                write!(f, "WaveField::Polar(amp={amp}, phase={phase})")
            }
            WaveField::Sampled(s) => write!(
                f,
                "WaveField::Sampled({} x {} nodes)",
                s.grid().n(),
                s.axis().m() + 1
            ),
            WaveField::Func(_) => write!(f, "WaveField::Func(..)"),
        }
    }
}

impl WaveField {
    /// `amp(x,t) * exp(i * phase(x,t))` with exact spatial derivatives.
    pub fn polar(amp: Expr, phase: Expr) -> Self {
        let amp_x = amp.diff(Var::X);
        let phase_x = phase.diff(Var::X);
        WaveField::Polar {
            amp,
            phase,
            amp_x,
            phase_x,
        }
    }

    pub fn from_fn(f: impl Fn(f64, f64) -> C64 + Send + Sync + 'static) -> Self {
        WaveField::Func(Arc::new(f))
    }

    pub fn value(&self, x: f64, t: f64) -> Result<C64> {
        let z = match self {
            WaveField::Polar { amp, phase, .. } => {
                let a = amp.eval(x, t);
                let p = phase.eval(x, t);
                C64::from_polar(a, p)
            }
            WaveField::Sampled(f) => f.interp(x, t)?,
            WaveField::Func(f) => f(x, t),
        };
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite(format!("wavefunction at ({x}, {t})")));
        }
        Ok(z)
    }

    /// Spatial derivative. Polar forms are exact; closures use a five-point
    /// stencil with step `h_hint`; sampled windows are not supported here
    /// (differentiate the whole window instead).
    pub fn value_dx(&self, x: f64, t: f64, h_hint: f64) -> Result<C64> {
        match self {
            WaveField::Polar {
                amp,
                phase,
                amp_x,
                phase_x,
            } => {
                let a = amp.eval(x, t);
                let p = phase.eval(x, t);
                let da = amp_x.eval(x, t);
                let dp = phase_x.eval(x, t);
                let z = C64::new(da, a * dp) * C64::from_polar(1.0, p);
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite(format!(
                        "wavefunction derivative at ({x}, {t})"
                    )));
                }
                Ok(z)
            }
            WaveField::Func(f) => {
                let h = h_hint;
                let z = (f(x - 2.0 * h, t) - f(x - h, t) * 8.0 + f(x + h, t) * 8.0
                    - f(x + 2.0 * h, t))
                    / (12.0 * h);
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite(format!(
                        "wavefunction derivative at ({x}, {t})"
                    )));
                }
                Ok(z)
            }
            WaveField::Sampled(_) => Err(Error::MissingDerivative(
                "sampled wavefunctions are differentiated on their own grid".into(),
            )),
        }
    }

    /// Node samples over a window.
    pub fn sample(&self, grid: &SpatialGrid, axis: &TimeAxis) -> Result<SpaceTimeField> {
        match self {
            WaveField::Sampled(f)
                if f.grid().n() == grid.n()
                    && f.grid().x_min() == grid.x_min()
                    && f.grid().x_max() == grid.x_max()
                    && f.axis().m() == axis.m()
                    && f.axis().t0() == axis.t0()
                    && f.axis().t1() == axis.t1() =>
            {
                Ok(f.clone())
            }
            _ => SpaceTimeField::try_from_fn(grid.clone(), axis.clone(), |x, t| {
                self.value(x, t)
            }),
        }
    }
}

/// A real function of one spatial variable (target-side potentials, the
/// shape function of a seed).
#[derive(Debug, Clone)]
pub enum SpaceFunction {
    Analytic(Expr),
    Sampled(Spline),
}

impl SpaceFunction {
    pub fn analytic(e: Expr) -> Result<Self> {
        if e.depends_on(Var::T) {
            return Err(Error::InconsistentConstruction(
                "space function must not depend on t".into(),
            ));
        }
        Ok(SpaceFunction::Analytic(e))
    }

    pub fn sampled(x0: f64, h: f64, values: &[f64]) -> Result<Self> {
        Ok(SpaceFunction::Sampled(Spline::new(x0, h, values)?))
    }

    pub fn expr(&self) -> Option<&Expr> {
        match self {
            SpaceFunction::Analytic(e) => Some(e),
            _ => None,
        }
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        let v = match self {
            SpaceFunction::Analytic(e) => e.eval(x, 0.0),
            SpaceFunction::Sampled(s) => s.value(x)?,
        };
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("space function at {x}")));
        }
        Ok(v)
    }

    pub fn d1(&self, x: f64) -> Result<f64> {
        match self {
            SpaceFunction::Analytic(e) => Ok(e.diff(Var::X).eval(x, 0.0)),
            SpaceFunction::Sampled(s) => s.d1(x),
        }
    }

    pub fn d2(&self, x: f64) -> Result<f64> {
        match self {
            SpaceFunction::Analytic(e) => Ok(e.diff(Var::X).diff(Var::X).eval(x, 0.0)),
            SpaceFunction::Sampled(s) => s.d2(x),
        }
    }
}

/// Discrete l2 norm of complex samples: sqrt(sum |psi_j|^2 dx).
pub fn discrete_norm(values: &[C64], dx: f64) -> f64 {
    (values.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx).sqrt()
}

/// Simpson L2 distance between two complex sample sets on the same grid.
pub fn l2_distance(a: &[C64], b: &[C64], dx: f64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::MismatchedDiscretization(format!(
            "comparing {} against {} samples",
            a.len(),
            b.len()
        )));
    }
    let density: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(&u, &v)| (u - v).norm_sqr())
        .collect();
    Ok(calculus::simpson(&density, dx)?.sqrt())
}

/// Largest pointwise distance between two complex sample sets.
pub fn linf_distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&u, &v)| (u - v).norm())
        .fold(0.0, f64::max)
}
