//! Uniform spatial grids and time axes.
//!
//! Everything downstream (stencils, quadrature, the propagator) assumes
//! uniform spacing; non-uniform sampling is out of scope.

use crate::error::{Error, Result};

/// Uniform spatial grid with `n` nodes on `[x_min, x_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl SpatialGrid {
    /// At least 8 nodes so the widest 4th-order stencil fits.
    pub const MIN_NODES: usize = 8;

    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::NonFinite("grid bounds".into()));
        }
        if x_max <= x_min {
            return Err(Error::GridTooSmall(format!(
                "x_max ({x_max}) must exceed x_min ({x_min})"
            )));
        }
        if n < Self::MIN_NODES {
            return Err(Error::GridTooSmall(format!(
                "need at least {} nodes, got {n}",
                Self::MIN_NODES
            )));
        }
        Ok(Self { x_min, x_max, n })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        debug_assert!(j < self.n);
        if j + 1 == self.n {
            self.x_max
        } else {
            self.x_min + j as f64 * self.dx()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    /// Same span, spacing halved (n -> 2n-1). Used by convergence studies.
    pub fn refine(&self) -> Self {
        Self {
            x_min: self.x_min,
            x_max: self.x_max,
            n: 2 * self.n - 1,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let slack = 1e-9 * self.dx().max(1.0);
        x >= self.x_min - slack && x <= self.x_max + slack
    }
}

/// Uniform time axis: `m` steps, `m + 1` sample times on `[t0, t1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeAxis {
    t0: f64,
    t1: f64,
    m: usize,
}

impl TimeAxis {
    pub const MIN_STEPS: usize = 4;

    pub fn new(t0: f64, t1: f64, m: usize) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite()) {
            return Err(Error::NonFinite("axis bounds".into()));
        }
        if t1 <= t0 {
            return Err(Error::GridTooSmall(format!(
                "t1 ({t1}) must exceed t0 ({t0})"
            )));
        }
        if m < Self::MIN_STEPS {
            return Err(Error::GridTooSmall(format!(
                "need at least {} steps, got {m}",
                Self::MIN_STEPS
            )));
        }
        Ok(Self { t0, t1, m })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    /// Number of steps; there are `m + 1` sample times.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dt(&self) -> f64 {
        (self.t1 - self.t0) / self.m as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        debug_assert!(k <= self.m);
        if k == self.m {
            self.t1
        } else {
            self.t0 + k as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.m).map(|k| self.time(k)).collect()
    }

    /// Same span, step halved.
    pub fn refine(&self) -> Self {
        Self {
            t0: self.t0,
            t1: self.t1,
            m: 2 * self.m,
        }
    }

    /// Axis with `factor` times more steps over the same span.
    pub fn refine_by(&self, factor: usize) -> Self {
        Self {
            t0: self.t0,
            t1: self.t1,
            m: self.m * factor.max(1),
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        let slack = 1e-9 * self.dt().max(1.0);
        t >= self.t0 - slack && t <= self.t1 + slack
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spacing_and_endpoints() {
        let g = SpatialGrid::new(0.5, 4.0, 8).unwrap();
        assert_eq!(g.dx(), 0.5);
        assert_eq!(g.point(0), 0.5);
        assert_eq!(g.point(7), 4.0);
    }

    #[test]
    fn grid_rejects_small_n() {
        assert!(matches!(
            SpatialGrid::new(0.0, 1.0, 7),
            Err(Error::GridTooSmall(_))
        ));
        assert!(SpatialGrid::new(1.0, 1.0, 8).is_err());
    }

    #[test]
    fn axis_counts_steps() {
        let a = TimeAxis::new(0.0, 1.0, 4).unwrap();
        assert_eq!(a.times().len(), 5);
        assert_eq!(a.dt(), 0.25);
        assert_eq!(a.time(4), 1.0);
        assert!(TimeAxis::new(0.0, 1.0, 3).is_err());
    }

    #[test]
    fn refine_halves_spacing() {
        let g = SpatialGrid::new(0.0, 1.0, 9).unwrap();
        let f = g.refine();
        assert_eq!(f.n(), 17);
        assert!((f.dx() - g.dx() / 2.0).abs() < 1e-15);
        let a = TimeAxis::new(0.0, 1.0, 8).unwrap();
        assert_eq!(a.refine().m(), 16);
    }
}
