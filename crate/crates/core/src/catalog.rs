//! Named example families with closed-form potentials and solutions:
//! the quasi-exactly solvable sextic oscillator (static and driven through
//! a time-dependent width), the free-particle family seeded by spreading
//! Weber states, and synthetic pairs generated from a static shape plus a
//! quadratic phase.

use std::sync::Arc;

use crate::darboux::SeedSolution;
use crate::error::{Error, Result};
use crate::expr::{Expr, Var};
use crate::field::{RealField, SpaceFunction, WaveField};
use crate::grid::{SpatialGrid, TimeAxis};
use crate::pointmap::PointTransform;
use crate::reality::{static_potentials, theorem_transform, QuadraticPhase, StaticGenerator};
use crate::specfun;
use crate::timefn::{CumulativeIntegral, TimeFunction};
use num_complex::Complex64 as C64;

/// A self-describing example family instance.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    name: String,
    v: RealField,
    solutions: Vec<(String, WaveField)>,
    seed: Option<SeedSolution>,
    grid: SpatialGrid,
    axis: TimeAxis,
    provenance: String,
    v1_closed: Option<RealField>,
    static_pair: Option<(SpaceFunction, SpaceFunction)>,
}

impl CatalogEntry {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn v(&self) -> &RealField {
        &self.v
    }

    pub fn solutions(&self) -> &[(String, WaveField)] {
        &self.solutions
    }

    pub fn seed(&self) -> Option<&SeedSolution> {
        self.seed.as_ref()
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn axis(&self) -> &TimeAxis {
        &self.axis
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Closed form of the Darboux-transformed potential, when the family
    /// carries one.
    pub fn v1_closed(&self) -> Option<&RealField> {
        self.v1_closed.as_ref()
    }

    /// Static pair (V0bar, V1bar) on the barred side, when the family
    /// carries one.
    pub fn static_pair(&self) -> Option<&(SpaceFunction, SpaceFunction)> {
        self.static_pair.as_ref()
    }

    /// Same closed forms on a different window; the seed keeps its
    /// expressions and is revalidated lazily by whoever consumes it.
    pub fn with_window(mut self, grid: SpatialGrid, axis: TimeAxis) -> CatalogEntry {
        if let Some(seed) = self.seed.take() {
            self.seed = Some(SeedSolution::from_parts(
                seed.chi0().clone(),
                seed.chi1().clone(),
                seed.v0().clone(),
                grid.clone(),
                axis.clone(),
            ));
        }
        self.grid = grid;
        self.axis = axis;
        self
    }
}

fn poly_in(coeffs: &[f64], arg: &Expr) -> Expr {
    let mut acc = Expr::c(0.0);
    for (k, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let term = match k {
            0 => Expr::c(c),
            1 => Expr::mul(Expr::c(c), arg.clone()),
            _ => Expr::mul(Expr::c(c), Expr::pow(arg.clone(), k as f64)),
        };
        acc = Expr::add(acc, term);
    }
    acc
}

fn poly_deriv(coeffs: &[f64]) -> Vec<f64> {
    if coeffs.len() <= 1 {
        return vec![0.0];
    }
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

// ---------------------------------------------------------------------------
// Free-particle family
// ---------------------------------------------------------------------------

/// Free potential seeded by the spreading Weber state with lambda = n + 1/2
/// on the positive semiaxis.  Solutions list the states m = 0..=n+1 so the
/// intertwiner has nontrivial images alongside its kernel element (m = n).
pub fn entry_free_particle(n: usize) -> Result<CatalogEntry> {
    if n > 10 {
        return Err(Error::DegreeCap(format!(
            "free-particle family caps the index at 10, got {n}"
        )));
    }
    let grid = SpatialGrid::new(0.5, 4.0, 257)?;
    let axis = TimeAxis::new(0.0, 1.0, 128)?;

    let one_pt2 = Expr::add(Expr::c(1.0), Expr::pow(Expr::t(), 2.0));
    let y = Expr::div(Expr::x(), Expr::sqrt(one_pt2.clone()));

    let spread_amp = |m: usize| -> Result<Expr> {
        // (1+t^2)^{-1/4} e^{y^2/4} R^_m(y), R^ positive on y > 0
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let coeffs: Vec<f64> = specfun::weber_r_coeffs(m)?
            .iter()
            .map(|c| sign * c)
            .collect();
        let mut amp = Expr::mul(
            Expr::pow(one_pt2.clone(), -0.25),
            Expr::exp(Expr::mul(Expr::c(0.25), Expr::pow(y.clone(), 2.0))),
        );
        if coeffs.len() > 1 || coeffs[0] != 1.0 {
            amp = Expr::mul(amp, poly_in(&coeffs, &y));
        }
        Ok(amp)
    };
    let spread_phase = |m: usize| -> Expr {
        // t x^2 / (4 (1+t^2)) + lambda arctan t
        let lambda = m as f64 + 0.5;
        Expr::add(
            Expr::div(
                Expr::mul(Expr::t(), Expr::pow(Expr::x(), 2.0)),
                Expr::mul(Expr::c(4.0), one_pt2.clone()),
            ),
            Expr::mul(Expr::c(lambda), Expr::atan(Expr::t())),
        )
    };

    let mut solutions = Vec::new();
    for m in 0..=n + 1 {
        solutions.push((
            format!("weber-{m}"),
            WaveField::polar(spread_amp(m)?, spread_phase(m)),
        ));
    }

    let chi0 = Expr::sub(Expr::c(0.0), Expr::log(spread_amp(n)?));
    let chi1 = Expr::sub(Expr::c(0.0), spread_phase(n));
    SeedSolution::analytic(chi0.clone(), chi1.clone(), grid.clone(), axis.clone())?;
    // the validated identity pins V0 = 0, so store the exact zero
    let seed = SeedSolution::from_parts(
        RealField::Analytic(chi0),
        RealField::Analytic(chi1),
        RealField::Analytic(Expr::c(0.0)),
        grid.clone(),
        axis.clone(),
    );

    // g = R^' / R^ drives both the moving and the static transformed forms
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let r_coeffs: Vec<f64> = specfun::weber_r_coeffs(n)?
        .iter()
        .map(|c| sign * c)
        .collect();
    let rp_coeffs = poly_deriv(&r_coeffs);
    let lambda = n as f64 + 0.5;
    let g_of = |arg: &Expr| Expr::div(poly_in(&rp_coeffs, arg), poly_in(&r_coeffs, arg));

    let g_y = g_of(&y);
    let v1 = Expr::mul(
        Expr::div(Expr::c(2.0), one_pt2.clone()),
        Expr::sub(
            Expr::add(Expr::mul(y.clone(), g_y.clone()), Expr::pow(g_y, 2.0)),
            Expr::c(lambda),
        ),
    );

    let xb = Expr::x();
    let g_x = g_of(&xb);
    let vbar0 = Expr::add(
        Expr::mul(Expr::c(0.25), Expr::pow(xb.clone(), 2.0)),
        Expr::c(lambda),
    );
    // Vbar1 = 2 Q'^2/Q^2 - xbar^2/4 - lambda with Q'/Q = xbar/2 + g
    let qlog = Expr::add(Expr::mul(Expr::c(0.5), xb.clone()), g_x);
    let vbar1 = Expr::sub(
        Expr::mul(Expr::c(2.0), Expr::pow(qlog, 2.0)),
        Expr::add(
            Expr::mul(Expr::c(0.25), Expr::pow(xb, 2.0)),
            Expr::c(lambda),
        ),
    );

    Ok(CatalogEntry {
        name: format!("free-particle-{n}"),
        v: RealField::Analytic(Expr::c(0.0)),
        solutions,
        seed: Some(seed),
        grid,
        axis,
        provenance: format!(
            "free particle on the positive semiaxis, spreading Weber seed with lambda = {n} + 1/2"
        ),
        v1_closed: Some(RealField::Analytic(v1)),
        static_pair: Some((
            SpaceFunction::analytic(vbar0)?,
            SpaceFunction::analytic(vbar1)?,
        )),
    })
}

// ---------------------------------------------------------------------------
// Sextic family, static
// ---------------------------------------------------------------------------

/// Static quasi-exactly solvable sextic oscillator with its n+1 algebraic
/// even bound states.
pub fn entry_sextic_static(n: usize, alpha: f64) -> Result<CatalogEntry> {
    if n > 8 {
        return Err(Error::DegreeCap(format!(
            "sextic family caps the block index at 8, got {n}"
        )));
    }
    let grid = SpatialGrid::new(-5.0, 5.0, 257)?;
    let axis = TimeAxis::new(0.0, 1.0, 128)?;
    let v = specfun::sextic_potential(n, alpha);
    let levels = specfun::qes_spectrum(n, alpha)?;
    let mut solutions = Vec::with_capacity(levels.len());
    for (k, level) in levels.iter().enumerate() {
        let amp = specfun::qes_eigenfunction(alpha, &level.poly);
        let phase = Expr::mul(Expr::c(-level.energy), Expr::t());
        solutions.push((format!("level-{k}"), WaveField::polar(amp, phase)));
    }
    Ok(CatalogEntry {
        name: format!("sextic-static-{n}"),
        v: RealField::Analytic(v),
        solutions,
        seed: None,
        grid,
        axis,
        provenance: format!(
            "quasi-exactly solvable sextic oscillator, even sector of size {}",
            n + 1
        ),
        v1_closed: None,
        static_pair: None,
    })
}

// ---------------------------------------------------------------------------
// Sextic family, time-dependent width
// ---------------------------------------------------------------------------

/// Periodic width with the parameters constrained so the denominator never
/// vanishes: omega = beta / (gamma + sqrt(gamma^2 - (alpha^2-4n-3) beta)
/// sin(4 sqrt(beta) t + delta)).
pub fn omega_periodic(
    alpha: f64,
    n: usize,
    beta: f64,
    gamma: f64,
    delta: f64,
) -> Result<TimeFunction> {
    let kappa = alpha * alpha - 4.0 * n as f64 - 3.0;
    let s2 = gamma * gamma - kappa * beta;
    if !(beta > 0.0 && kappa * beta > 0.0 && s2 > 0.0 && gamma > 0.0) {
        return Err(Error::InvalidFrequency(format!(
            "periodic width needs gamma^2 > (alpha^2 - 4n - 3) beta > 0 with beta, \
             gamma > 0; got alpha={alpha}, n={n}, beta={beta}, gamma={gamma}"
        )));
    }
    let arg = Expr::add(
        Expr::mul(Expr::c(4.0 * beta.sqrt()), Expr::t()),
        Expr::c(delta),
    );
    let den = Expr::add(Expr::c(gamma), Expr::mul(Expr::c(s2.sqrt()), Expr::sin(arg)));
    TimeFunction::analytic(Expr::div(Expr::c(beta), den))
}

fn check_positive_frequency(omega: &TimeFunction, axis: &TimeAxis) -> Result<()> {
    let half = 0.5 * axis.dt();
    for k in 0..=axis.m() {
        let t = axis.time(k);
        for &s in &[t, (t + half).min(axis.t1())] {
            let w = omega.value(s)?;
            if !(w > 0.0) {
                return Err(Error::InvalidFrequency(format!(
                    "width must stay positive, got {w} at t = {s}"
                )));
            }
        }
    }
    Ok(())
}

/// Sextic oscillator carried through a time-dependent width by the scaling
/// transformation with C = omega^{-1/2}, no shift, no extra phase.
pub fn entry_sextic_timedep(n: usize, alpha: f64, omega: TimeFunction) -> Result<CatalogEntry> {
    if n > 8 {
        return Err(Error::DegreeCap(format!(
            "sextic family caps the block index at 8, got {n}"
        )));
    }
    let grid = SpatialGrid::new(-6.0, 6.0, 513)?;
    let axis = TimeAxis::new(0.0, 1.0, 256)?;
    check_positive_frequency(&omega, &axis)?;

    let vbar = specfun::sextic_potential(n, alpha);
    let scale = match omega.expr() {
        Some(we) => TimeFunction::analytic(Expr::pow(we.clone(), -0.5))?,
        None => {
            let vals: Result<Vec<f64>> = (0..=axis.m())
                .map(|k| Ok(omega.value(axis.time(k))?.powf(-0.5)))
                .collect();
            TimeFunction::sampled(axis.clone(), &vals?)?
        }
    };
    let tr = PointTransform::new(
        scale,
        TimeFunction::constant(0.0),
        TimeFunction::constant(0.0),
        axis.clone(),
    )?;
    let v = tr.transform_potential(&SpaceFunction::analytic(vbar)?)?;

    // replay of the closed form: omega^4 x^6 + 2 alpha omega^3 x^4
    // + ((alpha^2-4n-3) omega^2 - (3 omega'^2 - 2 omega omega'')/(16 omega^2)) x^2
    let kappa = alpha * alpha - 4.0 * n as f64 - 3.0;
    if let Some(we) = omega.expr() {
        let wd = we.diff(Var::T);
        let wdd = wd.diff(Var::T);
        let x2 = Expr::pow(Expr::x(), 2.0);
        let closed = Expr::add(
            Expr::add(
                Expr::mul(Expr::pow(we.clone(), 4.0), Expr::pow(Expr::x(), 6.0)),
                Expr::mul(
                    Expr::mul(Expr::c(2.0 * alpha), Expr::pow(we.clone(), 3.0)),
                    Expr::pow(Expr::x(), 4.0),
                ),
            ),
            Expr::mul(
                Expr::sub(
                    Expr::mul(Expr::c(kappa), Expr::pow(we.clone(), 2.0)),
                    Expr::div(
                        Expr::sub(
                            Expr::mul(Expr::c(3.0), Expr::pow(wd.clone(), 2.0)),
                            Expr::mul(Expr::c(2.0), Expr::mul(we.clone(), wdd)),
                        ),
                        Expr::mul(Expr::c(16.0), Expr::pow(we.clone(), 2.0)),
                    ),
                ),
                x2,
            ),
        );
        let mut worst_rel: f64 = 0.0;
        for k in (0..=axis.m()).step_by(16) {
            let t = axis.time(k);
            for j in (0..grid.n()).step_by(8) {
                let x = grid.point(j);
                let want = closed.eval(x, t);
                let got = v.value(x, t)?;
                worst_rel = worst_rel.max((got - want).abs() / (1.0 + want.abs()));
            }
        }
        if worst_rel > 1e-10 {
            return Err(Error::InconsistentConstruction(format!(
                "assembled driven sextic deviates from its closed form by {worst_rel:.3e}"
            )));
        }
    }

    let levels = specfun::qes_spectrum(n, alpha)?;
    let use_polar = omega.expr().is_some() && omega.has_closed_integral();
    let mut solutions = Vec::with_capacity(levels.len());
    if use_polar {
        let we = omega.expr().unwrap().clone();
        let wd = we.diff(Var::T);
        let anti = TimeFunction::analytic(we.clone())?;
        let cum = integral_expr(&anti, axis.t0())?;
        for (k, level) in levels.iter().enumerate() {
            // amp = omega^{1/4} e^{-(omega x^2)^2/4 - alpha omega x^2/2} p(omega x^2)
            let u = Expr::mul(we.clone(), Expr::pow(Expr::x(), 2.0));
            let mut amp = Expr::mul(
                Expr::pow(we.clone(), 0.25),
                Expr::exp(Expr::sub(
                    Expr::mul(Expr::c(-0.25), Expr::pow(u.clone(), 2.0)),
                    Expr::mul(Expr::c(0.5 * alpha), u.clone()),
                )),
            );
            amp = Expr::mul(amp, poly_in(&level.poly, &u));
            // phase = -(omega' x^2 / (8 omega) + E int omega)
            let phase = Expr::sub(
                Expr::c(0.0),
                Expr::add(
                    Expr::div(
                        Expr::mul(wd.clone(), Expr::pow(Expr::x(), 2.0)),
                        Expr::mul(Expr::c(8.0), we.clone()),
                    ),
                    Expr::mul(Expr::c(level.energy), cum.clone()),
                ),
            );
            solutions.push((format!("level-{k}"), WaveField::polar(amp, phase)));
        }
    } else {
        let cum = Arc::new(CumulativeIntegral::build(&omega, &axis, 8)?);
        for (k, level) in levels.iter().enumerate() {
            let w = omega.clone();
            let cum = Arc::clone(&cum);
            let poly = level.poly.clone();
            let energy = level.energy;
            let f = move |x: f64, t: f64| -> C64 {
                let (Ok(wv), Ok(wd), Ok(ph_t)) = (w.value(t), w.d1(t), cum.at(t)) else {
                    return C64::new(f64::NAN, 0.0);
                };
                let u = wv * x * x;
                let mut p = 0.0;
                for &c in poly.iter().rev() {
                    p = p * u + c;
                }
                let amp = wv.powf(0.25) * (-0.25 * u * u - 0.5 * alpha * u).exp() * p;
                let phase = -(wd * x * x / (8.0 * wv) + energy * ph_t);
                C64::from_polar(amp, phase)
            };
            solutions.push((format!("level-{k}"), WaveField::from_fn(f)));
        }
    }

    Ok(CatalogEntry {
        name: format!("sextic-timedep-{n}"),
        v,
        solutions,
        seed: None,
        grid,
        axis,
        provenance: format!(
            "sextic oscillator driven through a time-dependent width, block size {}",
            n + 1
        ),
        v1_closed: None,
        static_pair: None,
    })
}

/// Closed antiderivative of an analytic time function measured from t0.
fn integral_expr(f: &TimeFunction, t0: f64) -> Result<Expr> {
    let e = f
        .expr()
        .ok_or_else(|| Error::MissingDerivative("closed integral of a sampled function".into()))?;
    let anti = crate::timefn::antiderivative(e).ok_or_else(|| {
        Error::MissingDerivative("time function lacks a closed antiderivative".into())
    })?;
    let base = anti.eval(0.0, t0);
    Ok(Expr::sub(anti, Expr::c(base)))
}

// ---------------------------------------------------------------------------
// Synthetic family
// ---------------------------------------------------------------------------

/// Invented pair running the factorization in reverse: pick a static shape
/// F and a quadratic phase, then assemble chi and the potential it solves.
pub fn entry_synthetic(
    f_shape: Expr,
    a: TimeFunction,
    b: TimeFunction,
    c: TimeFunction,
) -> Result<CatalogEntry> {
    if f_shape.depends_on(Var::T) {
        return Err(Error::InconsistentConstruction(
            "the static shape must not depend on t".into(),
        ));
    }
    let grid = SpatialGrid::new(0.5, 4.0, 257)?;
    let axis = TimeAxis::new(0.0, 1.0, 128)?;
    let t0 = axis.t0();
    let q = QuadraticPhase::new(a, b, c);
    let tr = theorem_transform(&q, t0, &axis)?;

    let analytic = q.a().expr().is_some()
        && q.b().expr().is_some()
        && q.c().expr().is_some()
        && tr.scale().expr().is_some()
        && tr.shift().expr().is_some();

    let entry = if analytic {
        let (a_e, b_e, c_e) = (
            q.a().expr().unwrap().clone(),
            q.b().expr().unwrap().clone(),
            q.c().expr().unwrap().clone(),
        );
        let chi1 = Expr::add(
            Expr::add(
                Expr::mul(a_e.clone(), Expr::pow(Expr::x(), 2.0)),
                Expr::mul(b_e.clone(), Expr::x()),
            ),
            c_e.clone(),
        );
        let c_expr = tr.scale().expr().unwrap().clone();
        let b_expr = tr.shift().expr().unwrap().clone();
        let xb = Expr::add(Expr::div(Expr::x(), c_expr.clone()), b_expr);
        let chi0 = Expr::add(
            Expr::mul(Expr::c(0.5), Expr::log(c_expr)),
            f_shape.substitute(Var::X, &xb),
        );

        let chi0x = chi0.diff(Var::X);
        let v0 = Expr::add(
            Expr::add(
                Expr::mul(
                    Expr::sub(a_e.diff(Var::T), Expr::mul(Expr::c(4.0), Expr::pow(a_e.clone(), 2.0))),
                    Expr::pow(Expr::x(), 2.0),
                ),
                Expr::mul(
                    Expr::sub(
                        b_e.diff(Var::T),
                        Expr::mul(Expr::c(4.0), Expr::mul(a_e.clone(), b_e.clone())),
                    ),
                    Expr::x(),
                ),
            ),
            Expr::add(
                Expr::sub(c_e.diff(Var::T), Expr::pow(b_e, 2.0)),
                Expr::sub(Expr::pow(chi0x.clone(), 2.0), chi0x.diff(Var::X)),
            ),
        );

        let validated = SeedSolution::analytic(chi0.clone(), chi1.clone(), grid.clone(), axis.clone())
            .map_err(|e| Error::InconsistentConstruction(format!("assembled seed fails: {e}")))?;
        let mut worst: f64 = 0.0;
        let derived = validated.v0();
        for k in (0..=axis.m()).step_by(8) {
            let t = axis.time(k);
            for j in (0..grid.n()).step_by(8) {
                let x = grid.point(j);
                let d = (derived.value(x, t)? - v0.eval(x, t)).abs();
                worst = worst.max(d);
            }
        }
        if worst > 1e-8 {
            return Err(Error::InconsistentConstruction(format!(
                "assembled potential deviates from the seed identity by {worst:.3e}"
            )));
        }
        let seed = SeedSolution::from_parts(
            RealField::Analytic(chi0),
            RealField::Analytic(chi1),
            RealField::Analytic(v0.clone()),
            grid.clone(),
            axis.clone(),
        );
        let kernel = seed.wave()?;
        let v1 = Expr::add(v0.clone(), Expr::mul(Expr::c(2.0), chi0x.diff(Var::X)));
        CatalogEntry {
            name: "synthetic".into(),
            v: RealField::Analytic(v0),
            solutions: vec![("kernel-state".into(), kernel)],
            seed: Some(seed),
            grid,
            axis,
            provenance: "synthetic pair from a static shape and a quadratic phase".into(),
            v1_closed: Some(RealField::Analytic(v1)),
            static_pair: Some(static_potentials(&StaticGenerator::new(
                SpaceFunction::analytic(f_shape)?,
            ))?),
        }
    } else {
        build_synthetic_numeric(f_shape, q, tr, grid, axis)?
    };
    Ok(entry)
}

fn build_synthetic_numeric(
    f_shape: Expr,
    q: QuadraticPhase,
    tr: PointTransform,
    grid: SpatialGrid,
    axis: TimeAxis,
) -> Result<CatalogEntry> {
    let fp = f_shape.diff(Var::X);
    let fpp = fp.diff(Var::X);
    let tr = Arc::new(tr);
    let q = Arc::new(q);

    let xbar = {
        let tr = Arc::clone(&tr);
        move |x: f64, t: f64| -> Result<f64> { tr.map_x(x, t) }
    };

    let chi0_f = {
        let tr = Arc::clone(&tr);
        let f_shape = f_shape.clone();
        let xbar = xbar.clone();
        move |x: f64, t: f64| -> f64 {
            let (Ok(cv), Ok(xb)) = (tr.scale().value(t), xbar(x, t)) else {
                return f64::NAN;
            };
            0.5 * cv.ln() + f_shape.eval(xb, 0.0)
        }
    };
    let chi1_f = {
        let q = Arc::clone(&q);
        move |x: f64, t: f64| -> f64 { q.value(x, t).unwrap_or(f64::NAN) }
    };
    let v0_f = {
        let tr = Arc::clone(&tr);
        let q = Arc::clone(&q);
        let (fp, fpp) = (fp.clone(), fpp.clone());
        let xbar = xbar.clone();
        move |x: f64, t: f64| -> f64 {
            let vals = (|| -> Result<f64> {
                let av = q.a().value(t)?;
                let bv = q.b().value(t)?;
                let ad = q.a().d1(t)?;
                let bd = q.b().d1(t)?;
                let cd = q.c().d1(t)?;
                let cv = tr.scale().value(t)?;
                let xb = xbar(x, t)?;
                let chi0x = fp.eval(xb, 0.0) / cv;
                let chi0xx = fpp.eval(xb, 0.0) / (cv * cv);
                Ok((ad - 4.0 * av * av) * x * x + (bd - 4.0 * av * bv) * x + cd
                    - bv * bv
                    + chi0x * chi0x
                    - chi0xx)
            })();
            vals.unwrap_or(f64::NAN)
        }
    };

    // the seed identity must close: chi0_t = 2 chi0_x chi1_x - chi1_xx
    let mut worst: f64 = 0.0;
    for k in 0..=axis.m() {
        let t = axis.time(k);
        let av = q.a().value(t)?;
        let bv = q.b().value(t)?;
        let cv = tr.scale().value(t)?;
        let cd = tr.scale().d1(t)?;
        let bshift_d = tr.shift().d1(t)?;
        for j in 0..grid.n() {
            let x = grid.point(j);
            let xb = tr.map_x(x, t)?;
            let fpv = fp.eval(xb, 0.0);
            let chi0t = 0.5 * cd / cv + fpv * (-x * cd / (cv * cv) + bshift_d);
            let chi0x = fpv / cv;
            let r = chi0t - 2.0 * chi0x * (2.0 * av * x + bv) + 2.0 * av;
            worst = worst.max(r.abs());
        }
    }
    if worst > 1e-5 {
        return Err(Error::InconsistentConstruction(format!(
            "assembled seed identity residual {worst:.3e} on the sampled route"
        )));
    }

    let v1_f = {
        let tr = Arc::clone(&tr);
        let fpp = fpp.clone();
        let v0_f = v0_f.clone();
        move |x: f64, t: f64| -> f64 {
            let vals = (|| -> Result<f64> {
                let cv = tr.scale().value(t)?;
                let xb = tr.map_x(x, t)?;
                Ok(v0_f(x, t) + 2.0 * fpp.eval(xb, 0.0) / (cv * cv))
            })();
            vals.unwrap_or(f64::NAN)
        }
    };

    let seed = SeedSolution::from_parts(
        RealField::from_fn(chi0_f.clone()),
        RealField::from_fn(chi1_f.clone()),
        RealField::from_fn(v0_f.clone()),
        grid.clone(),
        axis.clone(),
    );
    let kernel = WaveField::from_fn(move |x, t| {
        C64::from_polar((-chi0_f(x, t)).exp(), -chi1_f(x, t))
    });

    Ok(CatalogEntry {
        name: "synthetic".into(),
        v: RealField::from_fn(v0_f),
        solutions: vec![("kernel-state".into(), kernel)],
        seed: Some(seed),
        grid,
        axis,
        provenance: "synthetic pair from a static shape and a quadratic phase".into(),
        v1_closed: Some(RealField::from_fn(v1_f)),
        static_pair: Some(static_potentials(&StaticGenerator::new(
            SpaceFunction::analytic(f_shape)?,
        ))?),
    })
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

/// One row of the family table.
#[derive(Debug, Clone, Copy)]
pub struct FamilyInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub parameters: &'static str,
}

/// The four families, in stable listing order.
pub fn families() -> Vec<FamilyInfo> {
    vec![
        FamilyInfo {
            name: "free-particle",
            summary: "flat potential seeded by a spreading Weber state",
            parameters: "n (state index, <= 10)",
        },
        FamilyInfo {
            name: "sextic-static",
            summary: "quasi-exactly solvable sextic oscillator",
            parameters: "n (block index, <= 8), alpha",
        },
        FamilyInfo {
            name: "sextic-timedep",
            summary: "sextic oscillator with a time-dependent width",
            parameters: "n, alpha, omega(t) (default: periodic width)",
        },
        FamilyInfo {
            name: "synthetic",
            summary: "pair assembled from a static shape and a quadratic phase",
            parameters: "F(x), a(t), b(t), c(t)",
        },
    ]
}

/// Default instance of a family by name.
pub fn default_entry(name: &str) -> Result<CatalogEntry> {
    match name {
        "free-particle" => entry_free_particle(1),
        "sextic-static" => entry_sextic_static(2, 1.0),
        "sextic-timedep" => {
            entry_sextic_timedep(1, 3.0, omega_periodic(3.0, 1, 1.0, 2.0, 0.0)?)
        }
        "synthetic" => entry_synthetic(
            crate::expr::parse("x^2/4")?,
            TimeFunction::analytic(crate::expr::parse("sin(t)/8")?)?,
            TimeFunction::constant(0.0),
            TimeFunction::constant(0.0),
        ),
        other => Err(Error::UnknownEntry(format!(
            "no family named '{other}'; known: free-particle, sextic-static, \
             sextic-timedep, synthetic"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::darboux::{build_darboux, check_reality};
    use crate::propagator;

    #[test]
    fn free_entry_has_a_real_quadratic_seed_phase() {
        let entry = entry_free_particle(1).unwrap();
        let seed = entry.seed().unwrap();
        let defect = check_reality(seed).unwrap();
        assert!(defect < 1e-12, "third-derivative defect {defect}");
        assert_eq!(entry.solutions().len(), 3);
        assert_eq!(entry.v().value(1.7, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn free_entry_v1_matches_the_darboux_build() {
        let entry = entry_free_particle(1).unwrap();
        let seed = entry.seed().unwrap().clone();
        let build = build_darboux(seed, 0.0).unwrap();
        let closed = entry.v1_closed().unwrap();
        let grid = entry.grid();
        let axis = entry.axis();
        let mut worst: f64 = 0.0;
        for k in (0..=axis.m()).step_by(16) {
            let t = axis.time(k);
            for j in (0..grid.n()).step_by(16) {
                let x = grid.point(j);
                let d = (build.v1.value(x, t).unwrap() - closed.value(x, t).unwrap()).abs();
                worst = worst.max(d);
            }
        }
        assert!(worst < 1e-8, "V1 deviation {worst}");
        assert!(build.im_v1_max < 1e-10);
    }

    #[test]
    fn free_solutions_solve_the_flat_equation() {
        let entry = entry_free_particle(1).unwrap();
        let coarse_grid = SpatialGrid::new(0.5, 4.0, 129).unwrap();
        let coarse_axis = TimeAxis::new(0.0, 1.0, 64).unwrap();
        let fine_grid = SpatialGrid::new(0.5, 4.0, 257).unwrap();
        let fine_axis = TimeAxis::new(0.0, 1.0, 128).unwrap();
        for (label, psi) in entry.solutions() {
            let coarse = psi.sample(&coarse_grid, &coarse_axis).unwrap();
            let fine = psi.sample(&fine_grid, &fine_axis).unwrap();
            let scale = fine.max_abs();
            let r1 = propagator::residual(&coarse, entry.v()).unwrap();
            let r2 = propagator::residual(&fine, entry.v()).unwrap();
            assert!(r1 / scale < 0.02, "{label}: coarse residual {r1} at scale {scale}");
            let ratio = r1 / r2;
            assert!(ratio > 3.0, "{label}: residual ratio {ratio}");
        }
    }

    #[test]
    fn sextic_static_block_matches_the_frozen_spectrum() {
        let entry = entry_sextic_static(2, 1.0).unwrap();
        assert_eq!(entry.solutions().len(), 3);
        let want = [-3.0, 9.0 - 4.0 * 2.0f64.sqrt(), 9.0 + 4.0 * 2.0f64.sqrt()];
        let levels = specfun::qes_spectrum(2, 1.0).unwrap();
        for (level, w) in levels.iter().zip(want) {
            assert!((level.energy - w).abs() < 1e-10);
        }
        assert_eq!(entry.v().value(0.0, 0.7).unwrap(), 0.0);
        // stationary residual -phi'' + (V - E) phi = 0 on the expression level
        for (k, (label, psi)) in entry.solutions().iter().enumerate() {
            let WaveField::Polar { amp, .. } = psi else {
                panic!("{label} should be in polar form");
            };
            let e_k = levels[k].energy;
            let amp_xx = amp.diff(Var::X).diff(Var::X);
            for j in 0..=20 {
                let x = 0.15 * j as f64;
                let r = -amp_xx.eval(x, 0.0)
                    + (entry.v().value(x, 0.0).unwrap() - e_k) * amp.eval(x, 0.0);
                assert!(r.abs() < 1e-8, "{label}: stationary residual {r} at {x}");
            }
        }
    }

    #[test]
    fn unit_width_reduces_to_the_static_entry() {
        let timedep = entry_sextic_timedep(2, 1.0, TimeFunction::constant(1.0)).unwrap();
        let stat = entry_sextic_static(2, 1.0).unwrap();
        for &(x, t) in &[(0.3, 0.0), (1.1, 0.5), (2.0, 1.0)] {
            let a = timedep.v().value(x, t).unwrap();
            let b = stat.v().value(x, t).unwrap();
            assert!((a - b).abs() < 1e-10, "potential at ({x},{t}): {a} vs {b}");
            let sa = timedep.solutions()[0].1.value(x, t).unwrap();
            let sb = stat.solutions()[0].1.value(x, t).unwrap();
            assert!((sa - sb).norm() < 1e-10, "state at ({x},{t})");
        }
    }

    #[test]
    fn periodic_width_keeps_the_quadratic_coefficient_pinned() {
        let omega = omega_periodic(3.0, 1, 1.0, 2.0, 0.0).unwrap();
        assert!((omega.value(0.0).unwrap() - 0.5).abs() < 1e-15);
        let entry = entry_sextic_timedep(1, 3.0, omega.clone()).unwrap();
        let x1 = 0.7f64;
        for &t in &[0.0, 0.31, 0.77, 1.0] {
            let w = omega.value(t).unwrap();
            let rest = w.powi(4) * x1.powi(6) + 2.0 * 3.0 * w.powi(3) * x1.powi(4);
            let c2 = (entry.v().value(x1, t).unwrap() - rest) / (x1 * x1);
            assert!((c2 - 1.0).abs() < 1e-10, "x^2 coefficient {c2} at t={t}");
        }
    }

    #[test]
    fn omega_parameters_are_validated() {
        match omega_periodic(1.0, 1, 1.0, 2.0, 0.0) {
            Err(Error::InvalidFrequency(_)) => {}
            other => panic!("expected invalid-frequency, got {other:?}"),
        }
        let negative = TimeFunction::analytic(crate::expr::parse("1 - 3*t").unwrap()).unwrap();
        match entry_sextic_timedep(1, 3.0, negative) {
            Err(Error::InvalidFrequency(_)) => {}
            other => panic!("expected invalid-frequency, got {other:?}"),
        }
    }

    #[test]
    fn synthetic_static_harmonic_pair() {
        let entry = entry_synthetic(
            crate::expr::parse("x^2/4").unwrap(),
            TimeFunction::constant(0.0),
            TimeFunction::constant(0.0),
            TimeFunction::constant(0.0),
        )
        .unwrap();
        for &(x, t) in &[(0.6, 0.0), (1.5, 0.4), (3.2, 1.0)] {
            let want = x * x / 4.0 - 0.5;
            assert!((entry.v().value(x, t).unwrap() - want).abs() < 1e-12);
        }
        let (vb0, _) = entry.static_pair().unwrap();
        assert!((vb0.value(1.0).unwrap() - (0.25 - 0.5)).abs() < 1e-12);
        let seed = entry.seed().unwrap();
        assert!(check_reality(seed).unwrap() < 1e-12);
    }

    #[test]
    fn synthetic_oscillating_width_round_trips() {
        let entry = default_entry("synthetic").unwrap();
        let seed = entry.seed().unwrap();
        let fact = crate::reality::factorize(seed).unwrap();
        assert!(fact.fit_defect < 1e-10);
        assert!(fact.seed_defect < 1e-8);
        for &y in &[0.8f64, 1.6, 2.4] {
            let got = fact.generator.value(y).unwrap();
            assert!((got - y * y / 4.0).abs() < 1e-8, "F({y}) = {got}");
        }
        // kernel state solves the assembled potential
        let g = SpatialGrid::new(0.5, 4.0, 129).unwrap();
        let ax = TimeAxis::new(0.0, 1.0, 64).unwrap();
        let psi = entry.solutions()[0].1.sample(&g, &ax).unwrap();
        let r = propagator::residual(&psi, entry.v()).unwrap();
        assert!(r < 1e-2, "kernel residual {r}");
    }

    #[test]
    fn registry_names_are_stable() {
        let fams = families();
        assert_eq!(fams.len(), 4);
        assert_eq!(fams[0].name, "free-particle");
        for fam in &fams {
            let entry = default_entry(fam.name).unwrap();
            assert!(!entry.provenance().is_empty());
        }
        match default_entry("quartic") {
            Err(Error::UnknownEntry(_)) => {}
            other => panic!("expected unknown-entry, got {other:?}"),
        }
    }
}
