//! Cubic spline interpolation on uniformly spaced nodes with not-a-knot end
//! conditions, plus exact piecewise integration of the interpolant.
//!
//! Not-a-knot reproduces cubic polynomials exactly and needs no derivative
//! data at the ends. On a uniform grid the end conditions decouple: the
//! moment equations at the first and last interior nodes collapse to
//! `M_1 = d_1` and `M_{n-2} = d_{n-2}` (second differences), leaving a
//! strictly diagonally dominant tridiagonal system for the rest.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Spline {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    /// Second derivatives at the nodes.
    m: Vec<f64>,
    /// prefix[i] = integral of the spline from x0 to node i.
    prefix: Vec<f64>,
}

impl Spline {
    pub fn new(x0: f64, h: f64, y: &[f64]) -> Result<Spline> {
        let n = y.len();
        if n < 4 {
            return Err(Error::GridTooSmall(format!(
                "spline needs at least 4 nodes, got {n}"
            )));
        }
        if !(h.is_finite() && h > 0.0 && x0.is_finite()) {
            return Err(Error::GridTooSmall(format!(
                "spline spacing must be finite and positive, got h={h}"
            )));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("spline input data".into()));
        }

        // second differences d_i = (y[i+1] - 2 y[i] + y[i-1]) / h^2
        let h2 = h * h;
        let d = |i: usize| (y[i + 1] - 2.0 * y[i] + y[i - 1]) / h2;

        let mut m = vec![0.0; n];
        m[1] = d(1);
        m[n - 2] = d(n - 2);
        if n > 5 {
            // unknowns M_2 .. M_{n-3}: M_{i-1} + 4 M_i + M_{i+1} = 6 d_i
            let k = n - 4;
            let mut diag = vec![4.0; k];
            let mut rhs = vec![0.0; k];
            for (j, r) in rhs.iter_mut().enumerate() {
                *r = 6.0 * d(j + 2);
            }
            rhs[0] -= m[1];
            rhs[k - 1] -= m[n - 2];
            // Thomas elimination, unit off-diagonals
            for j in 1..k {
                let w = 1.0 / diag[j - 1];
                diag[j] -= w;
                let prev = rhs[j - 1];
                rhs[j] -= w * prev;
            }
            m[k + 1] = rhs[k - 1] / diag[k - 1];
            for j in (0..k - 1).rev() {
                m[j + 2] = (rhs[j] - m[j + 3]) / diag[j];
            }
        } else if n == 5 {
            m[2] = (6.0 * d(2) - m[1] - m[3]) / 4.0;
        }
        m[0] = 2.0 * m[1] - m[2];
        m[n - 1] = 2.0 * m[n - 2] - m[n - 3];

        let mut prefix = vec![0.0; n];
        for i in 0..n - 1 {
            let seg = segment_integral(h, y[i], y[i + 1], m[i], m[i + 1], h);
            prefix[i + 1] = prefix[i] + seg;
        }

        Ok(Spline {
            x0,
            h,
            y: y.to_vec(),
            m,
            prefix,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x0
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.h * (self.y.len() - 1) as f64
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    fn locate(&self, x: f64) -> Result<(usize, f64)> {
        let slack = 1e-9 * self.h;
        if x < self.x0 - slack || x > self.x_max() + slack {
            return Err(Error::OutOfRange(format!(
                "x={x} outside spline domain [{}, {}]",
                self.x0,
                self.x_max()
            )));
        }
        let n = self.y.len();
        let raw = ((x - self.x0) / self.h).floor();
        let i = (raw.max(0.0) as usize).min(n - 2);
        let u = (x - self.x0 - self.h * i as f64).clamp(0.0, self.h);
        Ok((i, u))
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        let (i, u) = self.locate(x)?;
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        let b = (y1 - y0) / self.h - self.h * (2.0 * m0 + m1) / 6.0;
        Ok(y0 + u * (b + u * (m0 / 2.0 + u * (m1 - m0) / (6.0 * self.h))))
    }

    pub fn d1(&self, x: f64) -> Result<f64> {
        let (i, u) = self.locate(x)?;
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        let b = (y1 - y0) / self.h - self.h * (2.0 * m0 + m1) / 6.0;
        Ok(b + u * (m0 + u * (m1 - m0) / (2.0 * self.h)))
    }

    pub fn d2(&self, x: f64) -> Result<f64> {
        let (i, u) = self.locate(x)?;
        Ok(self.m[i] + u * (self.m[i + 1] - self.m[i]) / self.h)
    }

    /// Integral of the interpolant from the first node to `x`.
    pub fn integral_from_start(&self, x: f64) -> Result<f64> {
        let (i, u) = self.locate(x)?;
        let part = segment_integral(
            self.h,
            self.y[i],
            self.y[i + 1],
            self.m[i],
            self.m[i + 1],
            u,
        );
        Ok(self.prefix[i] + part)
    }

    /// Signed integral of the interpolant over [a, b].
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        Ok(self.integral_from_start(b)? - self.integral_from_start(a)?)
    }
}

/// Integral of one cubic segment from its left node over [0, u], u <= h.
fn segment_integral(h: f64, y0: f64, y1: f64, m0: f64, m1: f64, u: f64) -> f64 {
    let b = (y1 - y0) / h - h * (2.0 * m0 + m1) / 6.0;
    u * (y0 + u * (b / 2.0 + u * (m0 / 6.0 + u * (m1 - m0) / (24.0 * h))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(f: impl Fn(f64) -> f64, x0: f64, h: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| f(x0 + h * i as f64)).collect()
    }

    #[test]
    fn reproduces_cubics_exactly() {
        let f = |x: f64| x * x * x - 2.0 * x * x + x - 1.0;
        let df = |x: f64| 3.0 * x * x - 4.0 * x + 1.0;
        let d2f = |x: f64| 6.0 * x - 4.0;
        let intf = |x: f64| x * x * x * x / 4.0 - 2.0 * x * x * x / 3.0 + x * x / 2.0 - x;
        let (x0, h, n) = (0.0, 0.25, 9);
        let s = Spline::new(x0, h, &sample(f, x0, h, n)).unwrap();
        for k in 0..=40 {
            let x = 0.05 * k as f64;
            assert!((s.value(x).unwrap() - f(x)).abs() < 1e-12, "value at {x}");
            assert!((s.d1(x).unwrap() - df(x)).abs() < 1e-11, "d1 at {x}");
            assert!((s.d2(x).unwrap() - d2f(x)).abs() < 1e-10, "d2 at {x}");
            let want = intf(x) - intf(x0);
            assert!(
                (s.integral_from_start(x).unwrap() - want).abs() < 1e-12,
                "integral at {x}"
            );
        }
    }

    #[test]
    fn fourth_order_convergence_on_smooth_data() {
        let f = |x: f64| (1.3 * x).sin() + 0.5 * (0.7 * x).cos();
        let err = |n: usize| -> f64 {
            let h = 2.0 / (n - 1) as f64;
            let s = Spline::new(-1.0, h, &sample(f, -1.0, h, n)).unwrap();
            let mut worst: f64 = 0.0;
            for k in 0..=200 {
                let x = -1.0 + 2.0 * k as f64 / 200.0;
                worst = worst.max((s.value(x).unwrap() - f(x)).abs());
            }
            worst
        };
        let e1 = err(33);
        let e2 = err(65);
        assert!(e1 < 4e-6, "coarse error {e1}");
        assert!(e1 / e2 > 10.0, "expected ~16x drop, got {}", e1 / e2);
    }

    #[test]
    fn integral_matches_closed_form() {
        let f = |x: f64| x.sin();
        let (x0, h, n) = (0.0, 0.01, 201);
        let s = Spline::new(x0, h, &sample(f, x0, h, n)).unwrap();
        let a = 0.3f64;
        let b = std::f64::consts::PI / 3.0;
        let want = a.cos() - b.cos();
        assert!((s.integral(a, b).unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Spline::new(0.0, 0.1, &[1.0, 2.0, 3.0]).is_err());
        assert!(Spline::new(0.0, -0.1, &[1.0; 8]).is_err());
        assert!(Spline::new(0.0, 0.1, &[1.0, f64::NAN, 0.0, 1.0]).is_err());
        let s = Spline::new(0.0, 0.1, &[0.0; 8]).unwrap();
        assert!(s.value(0.71).is_err());
        assert!(s.value(-0.01).is_err());
        assert!(s.value(0.7).is_ok());
    }
}
