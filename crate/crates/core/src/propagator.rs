//! Independent verification oracle: Crank-Nicolson propagation of the TDSE
//! i psi_t = (-d2/dx2 + V(x,t)) psi with Dirichlet-zero walls, plus
//! finite-difference residual evaluation and trajectory comparison.
//!
//! The step is the Cayley form (I + (i dt/2) H) psi^{k+1} =
//! (I - (i dt/2) H) psi^k with V evaluated at the step midpoint, so the
//! discrete l2 norm is conserved to rounding for real potentials.

use crate::calculus;
use crate::error::{Error, Result};
use crate::field::{discrete_norm, ComplexField, RealField, SpaceTimeField};
use crate::grid::{SpatialGrid, TimeAxis};
use num_complex::Complex64 as C64;

/// One propagation problem: window, potential, initial slice.
#[derive(Debug, Clone)]
pub struct PropagationRun {
    grid: SpatialGrid,
    axis: TimeAxis,
    v: RealField,
    psi_init: ComplexField,
}

/// Trajectory-vs-exact comparison summary.
#[derive(Debug, Clone, Copy)]
pub struct CompareReport {
    pub l2_error_final: f64,
    pub linf_error: f64,
    /// Largest single-step change of the discrete l2 norm.
    pub norm_drift: f64,
}

impl PropagationRun {
    /// The initial slice must live on `grid` and vanish at the walls
    /// (edge amplitude < 1e-8 of the max).
    pub fn new(
        grid: SpatialGrid,
        axis: TimeAxis,
        v: RealField,
        psi_init: ComplexField,
    ) -> Result<Self> {
        let pg = psi_init.grid();
        if pg.n() != grid.n() || pg.x_min() != grid.x_min() || pg.x_max() != grid.x_max() {
            return Err(Error::MismatchedDiscretization(
                "initial slice grid differs from the run grid".into(),
            ));
        }
        let vals = psi_init.values();
        let max = vals.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if max == 0.0 {
            return Err(Error::NonFinite("initial slice is identically zero".into()));
        }
        let edge = vals[0].norm().max(vals[grid.n() - 1].norm());
        if edge > 1e-8 * max {
            return Err(Error::WavepacketHitBoundary { step: 0, amp: edge });
        }
        Ok(PropagationRun {
            grid,
            axis,
            v,
            psi_init,
        })
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn axis(&self) -> &TimeAxis {
        &self.axis
    }

    /// Crank-Nicolson trajectory over the full axis.  Fails with
    /// `wavepacket-hit-boundary` if amplitude next to a wall ever exceeds
    /// 1e-6 of the slice max.
    pub fn propagate(&self) -> Result<SpaceTimeField> {
        let n = self.grid.n();
        let m = self.axis.m();
        let dx = self.grid.dx();
        let dt = self.axis.dt();
        let mu = dt / (2.0 * dx * dx);
        let half_dt = dt / 2.0;

        let mut values = Vec::with_capacity(n * (m + 1));
        let mut psi: Vec<C64> = self.psi_init.values().to_vec();
        psi[0] = C64::new(0.0, 0.0);
        psi[n - 1] = C64::new(0.0, 0.0);
        values.extend_from_slice(&psi);

        // interior tridiagonal workspace (Dirichlet walls excluded)
        let ni = n - 2;
        let mut diag = vec![C64::new(0.0, 0.0); ni];
        let mut rhs = vec![C64::new(0.0, 0.0); ni];
        let mut scratch = vec![C64::new(0.0, 0.0); ni];
        let off = C64::new(0.0, -mu);

        for k in 0..m {
            let t_mid = self.axis.time(k) + half_dt;
            for j in 0..ni {
                let x = self.grid.point(j + 1);
                let vj = self.v.value(x, t_mid)?;
                if !vj.is_finite() {
                    return Err(Error::NonFinite(format!("potential at ({x}, {t_mid})")));
                }
                // A = I + (i dt/2) H, applied rhs = (I - (i dt/2) H) psi
                let h_diag = 2.0 / (dx * dx) + vj;
                diag[j] = C64::new(1.0, half_dt * h_diag);
                let lap_off = -1.0 / (dx * dx);
                let left = if j > 0 { psi[j] } else { C64::new(0.0, 0.0) };
                let right = if j + 1 < ni {
                    psi[j + 2]
                } else {
                    C64::new(0.0, 0.0)
                };
                let h_psi = lap_off * (left + right) + h_diag * psi[j + 1];
                rhs[j] = psi[j + 1] - C64::new(0.0, half_dt) * h_psi;
            }
            thomas_uniform(&diag, off, &mut rhs, &mut scratch)?;
            for j in 0..ni {
                psi[j + 1] = rhs[j];
            }

            let max = psi.iter().fold(0.0f64, |mx, z| mx.max(z.norm()));
            let near_wall = psi[1].norm().max(psi[n - 2].norm());
            if near_wall > 1e-6 * max {
                return Err(Error::WavepacketHitBoundary {
                    step: k + 1,
                    amp: near_wall,
                });
            }
            values.extend_from_slice(&psi);
        }
        SpaceTimeField::new(self.grid.clone(), self.axis.clone(), values)
    }
}

/// Thomas elimination for a complex tridiagonal system with constant
/// off-diagonal `off`; `rhs` is overwritten with the solution.
fn thomas_uniform(
    diag: &[C64],
    off: C64,
    rhs: &mut [C64],
    scratch: &mut [C64],
) -> Result<()> {
    let n = diag.len();
    if n == 0 {
        return Ok(());
    }
    let mut pivot = diag[0];
    if pivot.norm() == 0.0 {
        return Err(Error::DegenerateScale("singular tridiagonal pivot".into()));
    }
    rhs[0] /= pivot;
    for j in 1..n {
        scratch[j] = off / pivot;
        pivot = diag[j] - off * scratch[j];
        if pivot.norm() == 0.0 {
            return Err(Error::DegenerateScale("singular tridiagonal pivot".into()));
        }
        rhs[j] = (rhs[j] - off * rhs[j - 1]) / pivot;
    }
    for j in (0..n - 1).rev() {
        let next = rhs[j + 1];
        rhs[j] -= scratch[j + 1] * next;
    }
    Ok(())
}

/// Max |i psi_t + psi_xx - V psi| over interior samples: central
/// differences in t, 4th-order differences in x; samples within two nodes
/// of a spatial edge or one step of a time edge are excluded.
pub fn residual(psi: &SpaceTimeField, v: &RealField) -> Result<f64> {
    let grid = psi.grid();
    let axis = psi.axis();
    let n = grid.n();
    let m = axis.m();
    if n < 5 || m < 2 {
        return Err(Error::GridTooSmall(
            "residual needs at least 5 space nodes and 2 steps".into(),
        ));
    }
    let dxx = psi.diff_x(2)?;
    let two_dt = 2.0 * axis.dt();
    let mut worst: f64 = 0.0;
    for k in 1..m {
        let t = axis.time(k);
        for j in 2..n - 2 {
            let x = grid.point(j);
            let dt_c = (psi.at(k + 1, j) - psi.at(k - 1, j)) / two_dt;
            let r = C64::new(0.0, 1.0) * dt_c + dxx.at(k, j)
                - C64::new(v.value(x, t)?, 0.0) * psi.at(k, j);
            worst = worst.max(r.norm());
        }
    }
    Ok(worst)
}

/// Compare a numerical trajectory against an exact one on the same window.
/// A global phase is aligned at the initial slice only.
pub fn compare(trajectory: &SpaceTimeField, exact: &SpaceTimeField) -> Result<CompareReport> {
    let grid = trajectory.grid();
    let axis = trajectory.axis();
    let ge = exact.grid();
    let ae = exact.axis();
    if grid.n() != ge.n()
        || grid.x_min() != ge.x_min()
        || grid.x_max() != ge.x_max()
        || axis.m() != ae.m()
        || axis.t0() != ae.t0()
        || axis.t1() != ae.t1()
    {
        return Err(Error::MismatchedDiscretization(
            "trajectory and exact windows differ".into(),
        ));
    }
    let n = grid.n();
    let m = axis.m();
    let dx = grid.dx();

    // phase chosen at t0: maximize Re <num * e^{i theta}, exact>
    let mut inner = C64::new(0.0, 0.0);
    for j in 0..n {
        inner += trajectory.at(0, j).conj() * exact.at(0, j);
    }
    let phase = if inner.norm() > 0.0 {
        inner / inner.norm()
    } else {
        C64::new(1.0, 0.0)
    };

    let mut linf: f64 = 0.0;
    let mut diff_final = vec![C64::new(0.0, 0.0); n];
    let mut prev_norm = 0.0;
    let mut drift: f64 = 0.0;
    for k in 0..=m {
        let slice = trajectory.slice(k);
        let mut sum_sq = 0.0;
        for j in 0..n {
            let d = slice[j] * phase - exact.at(k, j);
            linf = linf.max(d.norm());
            if k == m {
                diff_final[j] = d;
            }
            sum_sq += slice[j].norm_sqr();
        }
        let norm_k = (sum_sq * dx).sqrt();
        if k > 0 {
            drift = drift.max((norm_k - prev_norm).abs());
        }
        prev_norm = norm_k;
    }
    Ok(CompareReport {
        l2_error_final: discrete_norm(&diff_final, dx),
        linf_error: linf,
        norm_drift: drift,
    })
}
