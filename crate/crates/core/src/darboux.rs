//! Time-dependent Darboux transformation: from a seed solution e^{-chi} of
//! the source equation, build the intertwining operator L = L1(d/dx + chi_x)
//! and the partner potential V1, apply L, and invert it.
//!
//! Writing chi = chi0 + i chi1, the seed identity (e^{-chi} solves the TDSE
//! with V0) reads V0 = chi1_t + chi0_x^2 - chi1_x^2 - chi0_xx together with
//! the constraint chi0_t = 2 chi0_x chi1_x - chi1_xx.  The transformed
//! potential V1 = V0 + 2 chi_xx + i (log L1)_t is real exactly when
//! Im chi_xxx = 0, in which case L1 = exp[-2 int Im chi_xx] cancels the
//! imaginary parts identically.

use crate::calculus;
use crate::error::{Error, Result};
use crate::expr::{Expr, Var};
use crate::field::{RealField, SpaceFunction, SpaceTimeField, WaveField};
use crate::grid::{SpatialGrid, TimeAxis};
use crate::timefn::{self, CumulativeIntegral, TimeFunction};
use num_complex::Complex64 as C64;
use std::sync::Arc;

/// A solution e^{-chi} of the source TDSE, stored through the complex
/// log-derivative data chi = chi0 + i chi1 and the potential it solves.
#[derive(Debug, Clone)]
pub struct SeedSolution {
    chi0: RealField,
    chi1: RealField,
    v0: RealField,
    grid: SpatialGrid,
    axis: TimeAxis,
    consistency_defect: Option<f64>,
}

impl SeedSolution {
    /// Closed-form seed. The potential is derived from chi and the
    /// remaining real equation is checked on the window nodes.
    pub fn analytic(chi0: Expr, chi1: Expr, grid: SpatialGrid, axis: TimeAxis) -> Result<Self> {
        let chi0x = chi0.diff(Var::X);
        let chi1x = chi1.diff(Var::X);
        let v0 = Expr::sub(
            Expr::add(
                chi1.diff(Var::T),
                Expr::sub(
                    Expr::pow(chi0x.clone(), 2.0),
                    Expr::pow(chi1x.clone(), 2.0),
                ),
            ),
            chi0x.diff(Var::X),
        );
        let residual = Expr::add(
            Expr::sub(
                chi0.diff(Var::T),
                Expr::mul(Expr::c(2.0), Expr::mul(chi0x, chi1x.clone())),
            ),
            chi1x.diff(Var::X),
        );
        let mut defect: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for &t in &axis.times() {
            for j in 0..grid.n() {
                let x = grid.point(j);
                let r = residual.eval(x, t);
                let v = v0.eval(x, t);
                if !r.is_finite() || !v.is_finite() {
                    return Err(Error::NonFinite(format!("seed data at ({x}, {t})")));
                }
                defect = defect.max(r.abs());
                scale = scale.max(v.abs());
            }
        }
        if defect > 1e-8 * scale {
            return Err(Error::SeedInconsistent(format!(
                "chi does not solve the source equation: residual {defect:.3e} (scale {scale:.3e})"
            )));
        }
        Ok(SeedSolution {
            chi0: RealField::Analytic(chi0),
            chi1: RealField::Analytic(chi1),
            v0: RealField::Analytic(v0),
            grid,
            axis,
            consistency_defect: Some(defect),
        })
    }

    /// Seed recovered from a sampled solution: chi = -log psi with the
    /// phase unwrapped, potential and residual from finite differences.
    pub fn from_wavefunction(psi: &SpaceTimeField) -> Result<Self> {
        let grid = psi.grid().clone();
        let axis = psi.axis().clone();
        let logf = psi.unwrap_log()?;
        let n = grid.n();
        let total = n * (axis.m() + 1);
        let mut chi0 = vec![0.0; total];
        let mut chi1 = vec![0.0; total];
        for (i, z) in logf.values().iter().enumerate() {
            chi0[i] = -z.re;
            chi1[i] = -z.im;
        }
        let chi0x = stencil_dx(&chi0, &grid, &axis, 1)?;
        let chi1x = stencil_dx(&chi1, &grid, &axis, 1)?;
        let chi0xx = stencil_dx(&chi0, &grid, &axis, 2)?;
        let chi1xx = stencil_dx(&chi1, &grid, &axis, 2)?;
        let chi0t = stencil_dt(&chi0, &grid, &axis, 1)?;
        let chi1t = stencil_dt(&chi1, &grid, &axis, 1)?;
        let mut v0 = vec![0.0; total];
        let mut defect: f64 = 0.0;
        for i in 0..total {
            v0[i] = chi1t[i] + chi0x[i] * chi0x[i] - chi1x[i] * chi1x[i] - chi0xx[i];
            let r = chi0t[i] - 2.0 * chi0x[i] * chi1x[i] + chi1xx[i];
            if !v0[i].is_finite() || !r.is_finite() {
                return Err(Error::NonFinite("seed data from samples".into()));
            }
            defect = defect.max(r.abs());
        }
        Ok(SeedSolution {
            chi0: RealField::sampled(grid.clone(), axis.clone(), chi0)?,
            chi1: RealField::sampled(grid.clone(), axis.clone(), chi1)?,
            v0: RealField::sampled(grid.clone(), axis.clone(), v0)?,
            grid,
            axis,
            consistency_defect: Some(defect),
        })
    }

    /// Assemble a seed from parts without the consistency check (for
    /// diagnostics on deliberately inconsistent data).
    pub fn from_parts(
        chi0: RealField,
        chi1: RealField,
        v0: RealField,
        grid: SpatialGrid,
        axis: TimeAxis,
    ) -> Self {
        SeedSolution {
            chi0,
            chi1,
            v0,
            grid,
            axis,
            consistency_defect: None,
        }
    }

    pub fn chi0(&self) -> &RealField {
        &self.chi0
    }

    pub fn chi1(&self) -> &RealField {
        &self.chi1
    }

    pub fn v0(&self) -> &RealField {
        &self.v0
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn axis(&self) -> &TimeAxis {
        &self.axis
    }

    /// Max residual of the constraint equation at construction, when it
    /// was computed.
    pub fn consistency_defect(&self) -> Option<f64> {
        self.consistency_defect
    }

    pub fn chi(&self, x: f64, t: f64) -> Result<C64> {
        Ok(C64::new(self.chi0.value(x, t)?, self.chi1.value(x, t)?))
    }

    /// The seed wavefunction e^{-chi}.
    pub fn wave(&self) -> Result<WaveField> {
        if let (Some(c0), Some(c1)) = (self.chi0.expr(), self.chi1.expr()) {
            let amp = Expr::exp(Expr::mul(Expr::c(-1.0), c0.clone()));
            let phase = Expr::mul(Expr::c(-1.0), c1.clone());
            return Ok(WaveField::polar(amp, phase));
        }
        let c0s = self.chi0.sample(&self.grid, &self.axis)?;
        let c1s = self.chi1.sample(&self.grid, &self.axis)?;
        let values = c0s
            .iter()
            .zip(c1s.iter())
            .map(|(&a, &p)| C64::from_polar((-a).exp(), -p))
            .collect();
        Ok(WaveField::Sampled(SpaceTimeField::new(
            self.grid.clone(),
            self.axis.clone(),
            values,
        )?))
    }
}

/// Max |Im chi_xxx| over the window: zero exactly when Im chi is quadratic
/// in x, the condition for a real transformed potential.
pub fn check_reality(seed: &SeedSolution) -> Result<f64> {
    if let Some(c1) = seed.chi1.expr() {
        let d3 = c1.diff(Var::X).diff(Var::X).diff(Var::X);
        let mut worst: f64 = 0.0;
        for &t in &seed.axis.times() {
            for j in 0..seed.grid.n() {
                let v = d3.eval(seed.grid.point(j), t);
                if !v.is_finite() {
                    return Err(Error::NonFinite("Im chi third derivative".into()));
                }
                worst = worst.max(v.abs());
            }
        }
        return Ok(worst);
    }
    let c1s = seed.chi1.sample(&seed.grid, &seed.axis)?;
    let d3 = stencil_dx(&c1s, &seed.grid, &seed.axis, 3)?;
    Ok(d3.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

/// The intertwining operator L = L1(t) (d/dx + chi_x).
#[derive(Debug, Clone)]
pub struct DarbouxOperator {
    seed: Arc<SeedSolution>,
    l1: TimeFunction,
    chix_re: RealField,
    chix_im: RealField,
    t0: f64,
    x_ref: f64,
}

/// Result of `build_darboux`: the operator, the partner potential, and the
/// reality diagnostics.
#[derive(Debug, Clone)]
pub struct DarbouxBuild {
    pub op: DarbouxOperator,
    pub v1: RealField,
    pub reality_defect: f64,
    pub im_v1_max: f64,
}

/// Build L and V1 from a seed, normalizing L1(t0) = 1.  Fails with
/// `reality-violated` when Im chi_xxx exceeds the tolerance (analytic
/// seeds: 1e-8; sampled: ten times the stencil rounding floor).
pub fn build_darboux(seed: SeedSolution, t0: f64) -> Result<DarbouxBuild> {
    if !seed.axis.contains(t0) {
        return Err(Error::OutOfRange(format!(
            "anchor time {t0} outside the working axis"
        )));
    }
    let reality_defect = check_reality(&seed)?;
    let analytic = seed.chi0.expr().is_some() && seed.chi1.expr().is_some();
    let tol = if analytic {
        1e-8
    } else {
        let c1s = seed.chi1.sample(&seed.grid, &seed.axis)?;
        let amp = c1s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let dx3 = seed.grid.dx().powi(3);
        (10.0 * f64::EPSILON * amp / dx3).max(1e-8)
    };
    if reality_defect > tol {
        return Err(Error::RealityViolated {
            defect: reality_defect,
            tol,
        });
    }

    let x_ref = seed.grid.point(seed.grid.n() / 2);
    let grid = seed.grid.clone();
    let axis = seed.axis.clone();

    let (l1, v1, im_v1_max, chix_re, chix_im) = if analytic {
        let c0e = seed.chi0.expr().unwrap().clone();
        let c1e = seed.chi1.expr().unwrap().clone();
        let chi0xx = c0e.diff(Var::X).diff(Var::X);
        let chi1xx = c1e.diff(Var::X).diff(Var::X);
        let g = chi1xx.at_var(Var::X, x_ref);
        let mut im_max: f64 = 0.0;
        for &t in &axis.times() {
            let gt = g.eval(0.0, t);
            for j in 0..grid.n() {
                im_max = im_max.max(2.0 * (chi1xx.eval(grid.point(j), t) - gt).abs());
            }
        }
        let l1 = build_l1(&TimeFunction::analytic(g)?, &axis, t0)?;
        let v1e = Expr::add(
            seed.v0.expr().unwrap().clone(),
            Expr::mul(Expr::c(2.0), chi0xx),
        );
        (
            l1,
            RealField::Analytic(v1e),
            im_max,
            RealField::Analytic(c0e.diff(Var::X)),
            RealField::Analytic(c1e.diff(Var::X)),
        )
    } else {
        let c0s = seed.chi0.sample(&grid, &axis)?;
        let c1s = seed.chi1.sample(&grid, &axis)?;
        let v0s = seed.v0.sample(&grid, &axis)?;
        let chi0x = stencil_dx(&c0s, &grid, &axis, 1)?;
        let chi1x = stencil_dx(&c1s, &grid, &axis, 1)?;
        let chi0xx = stencil_dx(&c0s, &grid, &axis, 2)?;
        let chi1xx = stencil_dx(&c1s, &grid, &axis, 2)?;
        let j_ref = grid.n() / 2;
        let n = grid.n();
        let g_vals: Vec<f64> = (0..=axis.m()).map(|k| chi1xx[k * n + j_ref]).collect();
        let mut im_max: f64 = 0.0;
        let mut v1s = vec![0.0; v0s.len()];
        for k in 0..=axis.m() {
            for j in 0..n {
                let i = k * n + j;
                v1s[i] = v0s[i] + 2.0 * chi0xx[i];
                im_max = im_max.max(2.0 * (chi1xx[i] - g_vals[k]).abs());
            }
        }
        let g = TimeFunction::sampled(axis.clone(), &g_vals)?;
        let l1 = build_l1(&g, &axis, t0)?;
        (
            l1,
            RealField::sampled(grid.clone(), axis.clone(), v1s)?,
            im_max,
            RealField::sampled(grid.clone(), axis.clone(), chi0x)?,
            RealField::sampled(grid.clone(), axis.clone(), chi1x)?,
        )
    };

    Ok(DarbouxBuild {
        op: DarbouxOperator {
            seed: Arc::new(seed),
            l1,
            chix_re,
            chix_im,
            t0,
            x_ref,
        },
        v1,
        reality_defect,
        im_v1_max,
    })
}

/// L1 = exp[-2 int_{t0}^t g(s) ds], closed form when g has one.
fn build_l1(g: &TimeFunction, axis: &TimeAxis, t0: f64) -> Result<TimeFunction> {
    if let Some(e) = g.expr() {
        if let Some(anti) = timefn::antiderivative(e) {
            let f0 = anti.eval(0.0, t0);
            if f0.is_finite() {
                let l1e = Expr::exp(Expr::mul(
                    Expr::c(-2.0),
                    Expr::sub(anti, Expr::c(f0)),
                ));
                return TimeFunction::analytic(l1e);
            }
        }
    }
    let cum = CumulativeIntegral::build(g, axis, 8)?;
    let base = cum.at(t0)?;
    let mut values = Vec::with_capacity(axis.m() + 1);
    for &t in &axis.times() {
        values.push((-2.0 * (cum.at(t)? - base)).exp());
    }
    TimeFunction::sampled(axis.clone(), &values)
}

impl DarbouxOperator {
    pub fn seed(&self) -> &SeedSolution {
        &self.seed
    }

    pub fn l1(&self) -> &TimeFunction {
        &self.l1
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn x_ref(&self) -> f64 {
        self.x_ref
    }

    pub fn chi_x(&self, x: f64, t: f64) -> Result<C64> {
        Ok(C64::new(
            self.chix_re.value(x, t)?,
            self.chix_im.value(x, t)?,
        ))
    }

    /// psi1 = L1 (d/dx psi0 + chi_x psi0) on a window.  Analytic and
    /// closure inputs use their own derivatives; sampled inputs go through
    /// the stencil route.
    pub fn apply_l(
        &self,
        psi0: &WaveField,
        grid: &SpatialGrid,
        axis: &TimeAxis,
    ) -> Result<SpaceTimeField> {
        if let WaveField::Sampled(_) = psi0 {
            let f = psi0.sample(grid, axis)?;
            return self.apply_l_stencil(&f);
        }
        let mut values = Vec::with_capacity(grid.n() * (axis.m() + 1));
        for k in 0..=axis.m() {
            let t = axis.time(k);
            let l1 = self.l1.value(t)?;
            for j in 0..grid.n() {
                let x = grid.point(j);
                let d = psi0.value_dx(x, t, grid.dx())?;
                let v = psi0.value(x, t)?;
                values.push((d + self.chi_x(x, t)? * v) * l1);
            }
        }
        SpaceTimeField::new(grid.clone(), axis.clone(), values)
    }

    /// Stencil-derivative form of `apply_l` on given samples.
    pub fn apply_l_stencil(&self, psi0: &SpaceTimeField) -> Result<SpaceTimeField> {
        let grid = psi0.grid().clone();
        let axis = psi0.axis().clone();
        let d = psi0.diff_x(1)?;
        let mut values = Vec::with_capacity(grid.n() * (axis.m() + 1));
        for k in 0..=axis.m() {
            let t = axis.time(k);
            let l1 = self.l1.value(t)?;
            for j in 0..grid.n() {
                let x = grid.point(j);
                values.push((d.at(k, j) + self.chi_x(x, t)? * psi0.at(k, j)) * l1);
            }
        }
        SpaceTimeField::new(grid, axis, values)
    }

    /// Invert L: psi0 = (e^{-chi}/L1)[int_{x0}^x e^{chi} psi1 dy + c0(t)]
    /// with c0 chosen so psi0 solves the source equation when psi1 solves
    /// the partner one.  x0 and t0 snap to window nodes.
    pub fn inverse_darboux(
        &self,
        psi1: &WaveField,
        grid: &SpatialGrid,
        axis: &TimeAxis,
        x0: f64,
        t0: f64,
    ) -> Result<SpaceTimeField> {
        if !grid.contains(x0) {
            return Err(Error::OutOfRange(format!("x0 = {x0} outside the grid")));
        }
        if !axis.contains(t0) {
            return Err(Error::OutOfRange(format!("t0 = {t0} outside the axis")));
        }
        let n = grid.n();
        let m = axis.m();
        let j0 = ((x0 - grid.x_min()) / grid.dx()).round() as usize;
        let k0 = ((t0 - axis.t0()) / axis.dt()).round() as usize;
        let f = psi1.sample(grid, axis)?;

        let chi0s = self.seed.chi0.sample(grid, axis)?;
        let chi1s = self.seed.chi1.sample(grid, axis)?;
        let l1s: Vec<f64> = axis
            .times()
            .iter()
            .map(|&t| self.l1.value(t))
            .collect::<Result<_>>()?;

        // spatial accumulation per slice
        let mut phi = vec![C64::new(0.0, 0.0); n * (m + 1)];
        let mut integrand = vec![C64::new(0.0, 0.0); n];
        for k in 0..=m {
            for j in 0..n {
                let i = k * n + j;
                integrand[j] = C64::from_polar(chi0s[i].exp(), chi1s[i]) * f.at(k, j);
            }
            let cum = calculus::cumulative_simpson(&integrand, grid.dx())?;
            let anchor = cum[j0];
            for j in 0..n {
                phi[k * n + j] = cum[j] - anchor;
            }
        }

        // boundary flux that fixes c0(t)
        let dpsi1_x0: Vec<C64> = match psi1 {
            WaveField::Sampled(_) => {
                let d = f.diff_x(1)?;
                (0..=m).map(|k| d.at(k, j0)).collect()
            }
            _ => {
                let x_anchor = grid.point(j0);
                axis.times()
                    .iter()
                    .map(|&t| psi1.value_dx(x_anchor, t, grid.dx()))
                    .collect::<Result<_>>()?
            }
        };
        let x_anchor = grid.point(j0);
        let mut flux = vec![C64::new(0.0, 0.0); m + 1];
        for k in 0..=m {
            let i = k * n + j0;
            let t = axis.time(k);
            let e_chi = C64::from_polar(chi0s[i].exp(), chi1s[i]);
            let chix = self.chi_x(x_anchor, t)?;
            flux[k] = e_chi * (dpsi1_x0[k] - chix * f.at(k, j0)) / l1s[k];
        }
        let cum_t = calculus::cumulative_simpson(&flux, axis.dt())?;
        let c0_base = cum_t[k0];

        let mut values = Vec::with_capacity(n * (m + 1));
        for k in 0..=m {
            let c0 = C64::new(0.0, 1.0) * l1s[k] * (cum_t[k] - c0_base);
            for j in 0..n {
                let i = k * n + j;
                let e_neg_chi = C64::from_polar((-chi0s[i]).exp(), -chi1s[i]);
                values.push(e_neg_chi / l1s[k] * (phi[i] + c0));
            }
        }
        SpaceTimeField::new(grid.clone(), axis.clone(), values)
    }
}

/// Truncated integral of |V|(1 + |x|): finite when the potential decays
/// fast enough for the transform to preserve square-integrability.
/// Advisory only; growth under a larger window flags a non-decaying tail.
pub fn square_integrability_diagnostic(v: &SpaceFunction, grid: &SpatialGrid) -> Result<f64> {
    let mut values = Vec::with_capacity(grid.n());
    for j in 0..grid.n() {
        let x = grid.point(j);
        values.push(v.value(x)?.abs() * (1.0 + x.abs()));
    }
    calculus::simpson(&values, grid.dx())
}

fn stencil_dx(
    values: &[f64],
    grid: &SpatialGrid,
    axis: &TimeAxis,
    order: usize,
) -> Result<Vec<f64>> {
    let n = grid.n();
    let mut out = vec![0.0; values.len()];
    for k in 0..=axis.m() {
        let d = calculus::diff(&values[k * n..(k + 1) * n], grid.dx(), order)?;
        out[k * n..(k + 1) * n].copy_from_slice(&d);
    }
    Ok(out)
}

fn stencil_dt(
    values: &[f64],
    grid: &SpatialGrid,
    axis: &TimeAxis,
    order: usize,
) -> Result<Vec<f64>> {
    let n = grid.n();
    let rows = axis.m() + 1;
    let mut out = vec![0.0; values.len()];
    let mut col = vec![0.0; rows];
    for j in 0..n {
        for k in 0..rows {
            col[k] = values[k * n + j];
        }
        let d = calculus::diff(&col, axis.dt(), order)?;
        for k in 0..rows {
            out[k * n + j] = d[k];
        }
    }
    Ok(out)
}
