//! Form-preserving point transformations of the free-form Schroedinger
//! equation: a time-dependent dilation C(t), a shift B(t), and a gauge
//! phase A(t).
//!
//! Coordinates map as `xb = x/C + B`, `tb = integral of C^-2 from t0`.
//! Wavefunctions pick up the factor
//! `C^{-1/2} exp[(i/4)((C'/C) x^2 - 2 B' C x + A)]`, and potentials map as
//! `V = Vb/C^2 - (C''/4C) x^2 + (C B''/2 + B'C') x - (C^2 B'^2 + A')/4`.
//! With those rules, solutions of the barred equation push forward to
//! solutions of the transformed one, exactly.

use crate::error::{Error, Result};
use crate::expr::{Expr, Var};
use crate::field::{RealField, SpaceFunction, SpaceTimeField, WaveField};
use crate::grid::{SpatialGrid, TimeAxis};
use crate::timefn::{CumulativeIntegral, TimeFunction};
use num_complex::Complex64 as C64;

#[derive(Debug, Clone)]
enum TbarMap {
    /// Closed-form antiderivative of C^-2.
    Closed(TimeFunction),
    /// Tabulated cumulative integral of C^-2 on the axis.
    Table(CumulativeIntegral),
}

/// The (C, B, A) data of a form-preserving point transformation on a
/// working time interval.
#[derive(Debug, Clone)]
pub struct PointTransform {
    scale: TimeFunction,
    shift: TimeFunction,
    gauge: TimeFunction,
    t0: f64,
    axis: TimeAxis,
    tbar: TbarMap,
}

/// Per-instant coefficients, hoisted out of spatial loops.
#[derive(Debug, Clone, Copy)]
pub struct SliceCoeffs {
    pub c: f64,
    pub b: f64,
    pub c_dot: f64,
    pub b_dot: f64,
    pub a: f64,
    pub tbar: f64,
}

impl PointTransform {
    /// `axis` is the working window in unbarred time; the scale must stay
    /// strictly positive on it (checked at nodes and midpoints).
    pub fn new(
        scale: TimeFunction,
        shift: TimeFunction,
        gauge: TimeFunction,
        axis: TimeAxis,
    ) -> Result<Self> {
        let t0 = axis.t0();
        for k in 0..=2 * axis.m() {
            let t = axis.t0() + 0.5 * axis.dt() * k as f64;
            let c = scale.value(t)?;
            if !(c > 0.0) {
                return Err(Error::DegenerateScale(format!(
                    "scale C({t}) = {c} must be strictly positive"
                )));
            }
        }
        let inv_sq = match scale.expr() {
            Some(e) => TimeFunction::analytic(Expr::pow(e.clone(), -2.0))?,
            None => {
                let values: Vec<f64> = axis
                    .times()
                    .iter()
                    .map(|&t| scale.value(t).map(|c| 1.0 / (c * c)))
                    .collect::<Result<_>>()?;
                TimeFunction::sampled(axis.clone(), &values)?
            }
        };
        let tbar = if inv_sq.has_closed_integral() {
            TbarMap::Closed(inv_sq)
        } else {
            TbarMap::Table(CumulativeIntegral::build(&inv_sq, &axis, 8)?)
        };
        Ok(PointTransform {
            scale,
            shift,
            gauge,
            t0,
            axis,
            tbar,
        })
    }

    pub fn axis(&self) -> &TimeAxis {
        &self.axis
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn scale(&self) -> &TimeFunction {
        &self.scale
    }

    pub fn shift(&self) -> &TimeFunction {
        &self.shift
    }

    pub fn gauge(&self) -> &TimeFunction {
        &self.gauge
    }

    /// Barred time tb(t).
    pub fn map_time(&self, t: f64) -> Result<f64> {
        match &self.tbar {
            TbarMap::Closed(f) => f.integral(self.t0, t),
            TbarMap::Table(c) => c.at(t),
        }
    }

    /// Barred position xb(x, t).
    pub fn map_x(&self, x: f64, t: f64) -> Result<f64> {
        Ok(x / self.scale.value(t)? + self.shift.value(t)?)
    }

    /// Unbarred position x(xb, t).
    pub fn unmap_x(&self, xb: f64, t: f64) -> Result<f64> {
        Ok(self.scale.value(t)? * (xb - self.shift.value(t)?))
    }

    /// Both barred coordinates.
    pub fn map_point(&self, x: f64, t: f64) -> Result<(f64, f64)> {
        Ok((self.map_x(x, t)?, self.map_time(t)?))
    }

    /// Invert tb(t) = tbar by bisection on the working axis.
    pub fn invert_time(&self, tbar: f64) -> Result<f64> {
        let (mut lo, mut hi) = (self.axis.t0(), self.axis.t1());
        let f_lo = self.map_time(lo)? - tbar;
        let f_hi = self.map_time(hi)? - tbar;
        let span = hi - lo;
        let slack = 1e-9 * span;
        if f_lo > slack || f_hi < -slack {
            return Err(Error::OutOfRange(format!(
                "barred time {tbar} outside [{}, {}]",
                self.map_time(lo)?,
                self.map_time(hi)?
            )));
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.map_time(mid)? - tbar <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-12 * span.max(1.0) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Hoisted per-instant coefficients.
    pub fn slice_coeffs(&self, t: f64) -> Result<SliceCoeffs> {
        Ok(SliceCoeffs {
            c: self.scale.value(t)?,
            b: self.shift.value(t)?,
            c_dot: self.scale.d1(t)?,
            b_dot: self.shift.d1(t)?,
            a: self.gauge.value(t)?,
            tbar: self.map_time(t)?,
        })
    }

    fn gauge_phase(&self, sc: &SliceCoeffs, x: f64) -> f64 {
        0.25 * ((sc.c_dot / sc.c) * x * x - 2.0 * sc.b_dot * sc.c * x + sc.a)
    }

    /// The multiplicative factor G(x, t) relating psi = G * (psib after the
    /// coordinate map).
    pub fn gauge_factor(&self, x: f64, t: f64) -> Result<C64> {
        let sc = self.slice_coeffs(t)?;
        Ok(C64::from_polar(sc.c.powf(-0.5), self.gauge_phase(&sc, x)))
    }

    /// Push a barred-side wavefunction forward onto an unbarred window.
    pub fn pushforward_wavefunction(
        &self,
        psib: &WaveField,
        grid: &SpatialGrid,
        axis: &TimeAxis,
    ) -> Result<SpaceTimeField> {
        let mut values = Vec::with_capacity(grid.n() * (axis.m() + 1));
        for k in 0..=axis.m() {
            let t = axis.time(k);
            let sc = self.slice_coeffs(t)?;
            let amp = sc.c.powf(-0.5);
            for j in 0..grid.n() {
                let x = grid.point(j);
                let xb = x / sc.c + sc.b;
                let g = C64::from_polar(amp, self.gauge_phase(&sc, x));
                values.push(g * psib.value(xb, sc.tbar)?);
            }
        }
        SpaceTimeField::new(grid.clone(), axis.clone(), values)
    }

    /// Pull an unbarred-side wavefunction back onto a barred window.
    pub fn pullback_wavefunction(
        &self,
        psi: &WaveField,
        barred_grid: &SpatialGrid,
        barred_axis: &TimeAxis,
    ) -> Result<SpaceTimeField> {
        let mut values = Vec::with_capacity(barred_grid.n() * (barred_axis.m() + 1));
        for k in 0..=barred_axis.m() {
            let tb = barred_axis.time(k);
            let t = self.invert_time(tb)?;
            let sc = self.slice_coeffs(t)?;
            let amp = sc.c.powf(0.5);
            for j in 0..barred_grid.n() {
                let xb = barred_grid.point(j);
                let x = sc.c * (xb - sc.b);
                let g_inv = C64::from_polar(amp, -self.gauge_phase(&sc, x));
                values.push(g_inv * psi.value(x, t)?);
            }
        }
        SpaceTimeField::new(barred_grid.clone(), barred_axis.clone(), values)
    }

    /// Potential on the unbarred side induced by a static barred potential.
    pub fn transform_potential(&self, vbar: &SpaceFunction) -> Result<RealField> {
        if let (Some(vb), Some(ce), Some(be), Some(ae)) = (
            vbar.expr(),
            self.scale.expr(),
            self.shift.expr(),
            self.gauge.expr(),
        ) {
            let x = Expr::x();
            let xb = Expr::add(Expr::div(x.clone(), ce.clone()), be.clone());
            let vb_mapped = vb.substitute(Var::X, &xb);
            let c_dd = ce.diff(Var::T).diff(Var::T);
            let b_d = be.diff(Var::T);
            let b_dd = b_d.diff(Var::T);
            let c_d = ce.diff(Var::T);
            let a_d = ae.diff(Var::T);
            let expr = Expr::sub(
                Expr::add(
                    Expr::sub(
                        Expr::div(vb_mapped, Expr::pow(ce.clone(), 2.0)),
                        Expr::mul(
                            Expr::div(c_dd, Expr::mul(Expr::c(4.0), ce.clone())),
                            Expr::pow(x.clone(), 2.0),
                        ),
                    ),
                    Expr::mul(
                        Expr::add(
                            Expr::mul(Expr::mul(Expr::c(0.5), ce.clone()), b_dd),
                            Expr::mul(b_d.clone(), c_d),
                        ),
                        x,
                    ),
                ),
                Expr::mul(
                    Expr::c(0.25),
                    Expr::add(
                        Expr::mul(Expr::pow(ce.clone(), 2.0), Expr::pow(b_d, 2.0)),
                        a_d,
                    ),
                ),
            );
            return Ok(RealField::Analytic(expr));
        }
        let this = self.clone();
        let vbar = vbar.clone();
        Ok(RealField::from_fn(move |x, t| {
            match this.transform_potential_at(&vbar, x, t) {
                Ok(v) => v,
                Err(_) => f64::NAN,
            }
        }))
    }

    /// Value-level version of `transform_potential`.
    pub fn transform_potential_at(&self, vbar: &SpaceFunction, x: f64, t: f64) -> Result<f64> {
        let sc = self.slice_coeffs(t)?;
        let c_dd = self.scale.d2(t)?;
        let b_dd = self.shift.d2(t)?;
        let a_d = self.gauge.d1(t)?;
        let xb = x / sc.c + sc.b;
        Ok(vbar.value(xb)? / (sc.c * sc.c) - (c_dd / (4.0 * sc.c)) * x * x
            + (0.5 * sc.c * b_dd + sc.b_dot * sc.c_dot) * x
            - 0.25 * (sc.c * sc.c * sc.b_dot * sc.b_dot + a_d))
    }

    /// Barred-side potential value recovered from an unbarred potential:
    /// the inverse of the potential rule, evaluated at (xb, tb).
    pub fn transform_potential_back_at(
        &self,
        v: &RealField,
        xb: f64,
        tb: f64,
    ) -> Result<f64> {
        let t = self.invert_time(tb)?;
        let sc = self.slice_coeffs(t)?;
        let c_dd = self.scale.d2(t)?;
        let b_dd = self.shift.d2(t)?;
        let a_d = self.gauge.d1(t)?;
        let x = sc.c * (xb - sc.b);
        Ok(sc.c
            * sc.c
            * (v.value(x, t)? + (c_dd / (4.0 * sc.c)) * x * x
                - (0.5 * sc.c * b_dd + sc.b_dot * sc.c_dot) * x
                + 0.25 * (sc.c * sc.c * sc.b_dot * sc.b_dot + a_d)))
    }

    /// The largest barred-side rectangle covered by the unbarred window at
    /// every instant, with matching node counts.
    pub fn barred_window(
        &self,
        grid: &SpatialGrid,
        axis: &TimeAxis,
    ) -> Result<(SpatialGrid, TimeAxis)> {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for k in 0..=axis.m() {
            let t = axis.time(k);
            lo = lo.max(self.map_x(grid.x_min(), t)?);
            hi = hi.min(self.map_x(grid.x_max(), t)?);
        }
        if !(hi > lo) {
            return Err(Error::OutOfRange(format!(
                "barred window is empty: [{lo}, {hi}]"
            )));
        }
        let bgrid = SpatialGrid::new(lo, hi, grid.n())?;
        let baxis = TimeAxis::new(
            self.map_time(axis.t0())?,
            self.map_time(axis.t1())?,
            axis.m(),
        )?;
        Ok((bgrid, baxis))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn free_spread(axis: &TimeAxis) -> PointTransform {
        // C = sqrt(1 + t^2), B = 0, A = 4 lambda arctan t with lambda = 3/2
        let c = TimeFunction::analytic(parse("sqrt(1 + t^2)").unwrap()).unwrap();
        let b = TimeFunction::constant(0.0);
        let a = TimeFunction::analytic(parse("6*arctan(t)").unwrap()).unwrap();
        PointTransform::new(c, b, a, axis.clone()).unwrap()
    }

    #[test]
    fn identity_transform_is_passthrough() {
        let axis = TimeAxis::new(0.0, 1.0, 16).unwrap();
        let id = PointTransform::new(
            TimeFunction::constant(1.0),
            TimeFunction::constant(0.0),
            TimeFunction::constant(0.0),
            axis.clone(),
        )
        .unwrap();
        assert!((id.map_time(0.7).unwrap() - 0.7).abs() < 1e-14);
        let (xb, tb) = id.map_point(1.3, 0.4).unwrap();
        assert!((xb - 1.3).abs() < 1e-14 && (tb - 0.4).abs() < 1e-14);
        let g = id.gauge_factor(2.0, 0.5).unwrap();
        assert!((g - C64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn barred_time_is_arctan_for_spreading_scale() {
        let axis = TimeAxis::new(0.0, 1.0, 32).unwrap();
        let tr = free_spread(&axis);
        // the inverse-square scale hits the antiderivative table exactly
        assert!((tr.map_time(1.0).unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            assert!((tr.map_time(t).unwrap() - t.atan()).abs() < 1e-14);
        }
    }

    #[test]
    fn time_inversion_round_trips() {
        let axis = TimeAxis::new(0.0, 1.0, 32).unwrap();
        let tr = free_spread(&axis);
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let tb = tr.map_time(t).unwrap();
            let back = tr.invert_time(tb).unwrap();
            assert!((back - t).abs() < 1e-10, "t={t}: back={back}");
        }
    }

    #[test]
    fn push_then_pull_recovers_the_barred_function() {
        let axis = TimeAxis::new(0.0, 1.0, 48).unwrap();
        let grid = SpatialGrid::new(0.5, 4.0, 97).unwrap();
        let tr = free_spread(&axis);
        let psib = WaveField::from_fn(|xb, tb| {
            C64::from_polar((-0.5 * (xb - 1.5) * (xb - 1.5)).exp(), 0.8 * xb + 0.3 * tb)
        });
        let pushed = tr.pushforward_wavefunction(&psib, &grid, &axis).unwrap();
        let (bgrid, baxis) = tr.barred_window(&grid, &axis).unwrap();
        let back = tr
            .pullback_wavefunction(&WaveField::Sampled(pushed), &bgrid, &baxis)
            .unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..=baxis.m() {
            for j in 0..bgrid.n() {
                let want = psib
                    .value(bgrid.point(j), baxis.time(k))
                    .unwrap();
                worst = worst.max((back.at(k, j) - want).norm());
            }
        }
        assert!(worst < 2e-5, "round trip error {worst}");
    }

    #[test]
    fn pushforward_of_a_plane_wave_solves_the_mapped_equation() {
        // barred side: free particle, psib = exp(i(k xb - k^2 tb));
        // transformed potential: -x^2 C''/(4 C^3)|_{B=A=0} form
        let axis = TimeAxis::new(0.0, 1.0, 128).unwrap();
        let grid = SpatialGrid::new(-2.0, 2.0, 129).unwrap();
        let c = TimeFunction::analytic(parse("sqrt(1 + t^2)").unwrap()).unwrap();
        let tr = PointTransform::new(
            c,
            TimeFunction::constant(0.0),
            TimeFunction::constant(0.0),
            axis.clone(),
        )
        .unwrap();
        let kw = 1.0;
        let psib = WaveField::from_fn(move |xb, tb| {
            C64::from_polar(1.0, kw * xb - kw * kw * tb)
        });
        let psi = tr.pushforward_wavefunction(&psib, &grid, &axis).unwrap();
        let vbar = SpaceFunction::analytic(Expr::c(0.0)).unwrap();
        let v = tr.transform_potential(&vbar).unwrap();
        // residual of i psi_t + psi_xx - V psi on interior samples
        let dt_f = psi.diff_t(1).unwrap();
        let dxx = psi.diff_x(2).unwrap();
        let mut worst: f64 = 0.0;
        for k in 2..axis.m() - 1 {
            for j in 2..grid.n() - 2 {
                let (x, t) = (grid.point(j), axis.time(k));
                let r = C64::new(0.0, 1.0) * dt_f.at(k, j) + dxx.at(k, j)
                    - C64::new(v.value(x, t).unwrap(), 0.0) * psi.at(k, j);
                worst = worst.max(r.norm());
            }
        }
        assert!(worst < 2e-5, "pde residual {worst}");
    }

    #[test]
    fn potential_rule_round_trips() {
        let axis = TimeAxis::new(0.0, 1.0, 32).unwrap();
        let tr = free_spread(&axis);
        let vbar = SpaceFunction::analytic(parse("0.25*x^2 + 1.5").unwrap()).unwrap();
        let v = tr.transform_potential(&vbar).unwrap();
        for (xb, tb) in [(1.0, 0.2), (2.5, 0.6), (0.7, 0.05)] {
            let got = tr.transform_potential_back_at(&v, xb, tb).unwrap();
            let want = vbar.value(xb).unwrap();
            assert!((got - want).abs() < 1e-9, "({xb},{tb}): {got} vs {want}");
        }
    }

    #[test]
    fn rejects_nonpositive_scale() {
        let axis = TimeAxis::new(0.0, 1.0, 16).unwrap();
        let c = TimeFunction::analytic(parse("t - 0.5").unwrap()).unwrap();
        match PointTransform::new(
            c,
            TimeFunction::constant(0.0),
            TimeFunction::constant(0.0),
            axis,
        ) {
            Err(Error::DegenerateScale(_)) => {}
            other => panic!("expected degenerate-scale, got {other:?}"),
        }
    }

    #[test]
    fn sampled_scale_goes_through_the_table() {
        let axis = TimeAxis::new(0.0, 1.0, 64).unwrap();
        let values: Vec<f64> = axis.times().iter().map(|&t| (1.0 + t * t).sqrt()).collect();
        let c = TimeFunction::sampled(axis.clone(), &values).unwrap();
        let tr = PointTransform::new(
            c,
            TimeFunction::constant(0.0),
            TimeFunction::constant(0.0),
            axis,
        )
        .unwrap();
        assert!((tr.map_time(1.0).unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-7);
    }
}
