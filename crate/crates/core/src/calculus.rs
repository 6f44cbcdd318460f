//! Finite-difference and quadrature kernels on uniform 1D grids.
//!
//! Differentiation uses interpolation-based weights (Fornberg's recursion)
//! so edge rows get one-sided stencils of the same order as the interior:
//! 5-point for first derivatives, 6-point edge / 5-point central for second,
//! 7-point for third. Everything here is fourth-order accurate or better.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use num_traits::Zero;
use std::ops::{Add, Mul};

/// Scalar types the grid kernels operate on.
pub trait GridScalar: Copy + Zero + Add<Output = Self> + Mul<f64, Output = Self> {}
impl GridScalar for f64 {}
impl GridScalar for C64 {}

/// Weights for derivatives 0..=m at `z` from arbitrary nodes `x`
/// (Fornberg's recursion). Returns `w[d][i]`: weight of node i in the
/// d-th derivative.
pub fn fd_weights(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    assert!(n > m, "need more nodes than the derivative order");
    let mut w = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    w[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    w[k][i] = c1 * (k as f64 * w[k - 1][i - 1] - c5 * w[k][i - 1]) / c2;
                }
                w[0][i] = -c1 * c5 * w[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                w[k][j] = (c4 * w[k][j] - k as f64 * w[k - 1][j]) / c3;
            }
            w[0][j] = c4 * w[0][j] / c3;
        }
        c1 = c2;
    }
    w
}

fn stencil_width(order: usize) -> usize {
    match order {
        1 => 5,
        2 => 5, // 6 at the edges
        3 => 7,
        _ => panic!("derivative order {order} not supported"),
    }
}

/// Derivative of sampled values on a uniform grid, fourth-order accurate
/// including the boundary rows.
pub fn diff<T: GridScalar>(values: &[T], dx: f64, order: usize) -> Result<Vec<T>> {
    let n = values.len();
    let min_nodes = match order {
        1 => 5,
        2 => 6,
        3 => 7,
        _ => {
            return Err(Error::MissingDerivative(format!(
                "derivative order {order} not supported (1..=3)"
            )));
        }
    };
    if n < min_nodes {
        return Err(Error::GridTooSmall(format!(
            "order-{order} derivative needs at least {min_nodes} nodes, got {n}"
        )));
    }
    let mut out = vec![T::zero(); n];
    for j in 0..n {
        let p = if order == 2 {
            let centered = j >= 2 && j + 2 < n;
            if centered {
                5
            } else {
                6
            }
        } else {
            stencil_width(order)
        };
        let half = p / 2;
        let start = j.saturating_sub(half).min(n - p);
        let nodes: Vec<f64> = (0..p).map(|i| (start + i) as f64 * dx).collect();
        let w = fd_weights(j as f64 * dx, &nodes, order);
        let mut acc = T::zero();
        for (i, &wi) in w[order].iter().enumerate() {
            acc = acc + values[start + i] * wi;
        }
        out[j] = acc;
    }
    Ok(out)
}

/// Composite Simpson on a uniform grid. An odd interval count is closed
/// with the third-order three-point rule on the final cell.
pub fn simpson<T: GridScalar>(values: &[T], h: f64) -> Result<T> {
    let n = values.len();
    if n < 3 {
        return Err(Error::GridTooSmall(format!(
            "quadrature needs at least 3 nodes, got {n}"
        )));
    }
    let intervals = n - 1;
    let even_end = if intervals % 2 == 0 { n - 1 } else { n - 2 };
    let mut acc = T::zero();
    let mut i = 0;
    while i + 2 <= even_end {
        acc = acc + (values[i] + values[i + 1] * 4.0 + values[i + 2]) * (h / 3.0);
        i += 2;
    }
    if intervals % 2 != 0 {
        acc = acc
            + (values[n - 3] * (-1.0) + values[n - 2] * 8.0 + values[n - 1] * 5.0) * (h / 12.0);
    }
    Ok(acc)
}

/// Cumulative integral at every node: fourth-order accurate, `out[0] = 0`.
/// Odd nodes use the quadratic sub-cell rule so every prefix is consistent
/// with the Simpson pairs around it.
pub fn cumulative_simpson<T: GridScalar>(values: &[T], h: f64) -> Result<Vec<T>> {
    let n = values.len();
    if n < 3 {
        return Err(Error::GridTooSmall(format!(
            "cumulative quadrature needs at least 3 nodes, got {n}"
        )));
    }
    let mut out = vec![T::zero(); n];
    let mut even = T::zero();
    for j in (2..n).step_by(2) {
        even = even + (values[j - 2] + values[j - 1] * 4.0 + values[j]) * (h / 3.0);
        out[j] = even;
    }
    for j in (1..n).step_by(2) {
        out[j] = if j + 1 < n {
            out[j - 1] + (values[j - 1] * 5.0 + values[j] * 8.0 + values[j + 1] * (-1.0)) * (h / 12.0)
        } else {
            out[j - 1] + (values[j - 2] * (-1.0) + values[j - 1] * 8.0 + values[j] * 5.0) * (h / 12.0)
        };
    }
    Ok(out)
}

/// Four-point Lagrange weights at local coordinate `u` (nodes at 0,1,2,3).
pub fn lagrange4(u: f64) -> [f64; 4] {
    let a = u;
    let b = u - 1.0;
    let c = u - 2.0;
    let d = u - 3.0;
    [
        -b * c * d / 6.0,
        a * c * d / 2.0,
        -a * b * d / 2.0,
        a * b * c / 6.0,
    ]
}

/// Window start and local coordinate for 4-point interpolation at `x`.
/// Slightly out-of-domain points (1e-9 of a cell) are clamped.
pub fn locate4(x0: f64, h: f64, n: usize, x: f64) -> Result<(usize, f64)> {
    if n < 4 {
        return Err(Error::GridTooSmall(format!(
            "interpolation needs at least 4 nodes, got {n}"
        )));
    }
    let u = (x - x0) / h;
    let slack = 1e-9;
    if u < -slack || u > (n - 1) as f64 + slack {
        return Err(Error::OutOfRange(format!(
            "x={x} outside interpolation domain [{}, {}]",
            x0,
            x0 + h * (n - 1) as f64
        )));
    }
    let u = u.clamp(0.0, (n - 1) as f64);
    let start = (u.floor() as usize).saturating_sub(1).min(n - 4);
    Ok((start, u - start as f64))
}

/// Local cubic (4-point Lagrange) interpolation on a uniform grid.
pub fn interp_cubic<T: GridScalar>(x0: f64, h: f64, values: &[T], x: f64) -> Result<T> {
    let (start, u) = locate4(x0, h, values.len(), x)?;
    let w = lagrange4(u);
    let mut acc = T::zero();
    for k in 0..4 {
        acc = acc + values[start + k] * w[k];
    }
    Ok(acc)
}

/// Principal branch of an angle increment, mapped into (-pi, pi].
pub fn principal_angle(d: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut r = d % two_pi;
    if r <= -std::f64::consts::PI {
        r += two_pi;
    } else if r > std::f64::consts::PI {
        r -= two_pi;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_match_classic_central_stencils() {
        let nodes: Vec<f64> = (0..5).map(|i| i as f64).collect();
        let w = fd_weights(2.0, &nodes, 2);
        let d1 = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
        let d2 = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
        for i in 0..5 {
            assert!((w[1][i] - d1[i]).abs() < 1e-14, "d1[{i}] = {}", w[1][i]);
            assert!((w[2][i] - d2[i]).abs() < 1e-13, "d2[{i}] = {}", w[2][i]);
        }
    }

    fn grid(n: usize) -> (f64, Vec<f64>) {
        let dx = 2.0 / (n - 1) as f64;
        (dx, (0..n).map(|j| -1.0 + dx * j as f64).collect())
    }

    #[test]
    fn derivatives_converge_at_fourth_order() {
        let f = |x: f64| (1.7 * x).sin();
        for order in 1..=3usize {
            let exact = |x: f64| -> f64 {
                let k = 1.7f64;
                match order {
                    1 => k * (k * x).cos(),
                    2 => -k * k * (k * x).sin(),
                    _ => -k * k * k * (k * x).cos(),
                }
            };
            let err = |n: usize| -> f64 {
                let (dx, xs) = grid(n);
                let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
                let d = diff(&vals, dx, order).unwrap();
                xs.iter()
                    .zip(&d)
                    .map(|(&x, &v)| (v - exact(x)).abs())
                    .fold(0.0, f64::max)
            };
            let e1 = err(41);
            let e2 = err(81);
            let ratio = e1 / e2;
            assert!(
                ratio > 10.0,
                "order {order}: e1={e1:.3e} e2={e2:.3e} ratio={ratio:.2}"
            );
        }
    }

    #[test]
    fn complex_diff_matches_componentwise() {
        let n = 64;
        let (dx, xs) = grid(n);
        let vals: Vec<C64> = xs
            .iter()
            .map(|&x| C64::new((2.0 * x).cos(), x * x * x))
            .collect();
        let d = diff(&vals, dx, 1).unwrap();
        let re: Vec<f64> = vals.iter().map(|z| z.re).collect();
        let im: Vec<f64> = vals.iter().map(|z| z.im).collect();
        let dre = diff(&re, dx, 1).unwrap();
        let dim = diff(&im, dx, 1).unwrap();
        for j in 0..n {
            assert!((d[j].re - dre[j]).abs() < 1e-13);
            assert!((d[j].im - dim[j]).abs() < 1e-13);
        }
    }

    #[test]
    fn simpson_handles_even_and_odd_interval_counts() {
        // even interval counts: plain Simpson, near-exact on cubics
        let f = |x: f64| x * x * x - x + 2.0;
        let exact = 2.0 * 2.0; // odd parts vanish on [-1, 1]
        for n in [9usize, 33] {
            let (dx, xs) = grid(n);
            let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
            let got = simpson(&vals, dx).unwrap();
            assert!((got - exact).abs() < 1e-12, "n={n}: {got} vs {exact}");
        }
        // odd interval counts include the closing cell rule: still 4th order
        let g = |x: f64| (2.3 * x).exp();
        let gerr = |n: usize| -> f64 {
            let (dx, xs) = grid(n);
            let vals: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
            let exact = ((2.3f64).exp() - (-2.3f64).exp()) / 2.3;
            (simpson(&vals, dx).unwrap() - exact).abs()
        };
        assert!(gerr(21) / gerr(41) > 10.0, "even intervals");
        assert!(gerr(20) / gerr(40) > 10.0, "odd intervals");
    }

    #[test]
    fn cumulative_simpson_tracks_antiderivative() {
        let f = |x: f64| (1.9 * x).cos();
        let antider = |x: f64| (1.9 * x).sin() / 1.9;
        let err = |n: usize| -> f64 {
            let (dx, xs) = grid(n);
            let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
            let cum = cumulative_simpson(&vals, dx).unwrap();
            xs.iter()
                .enumerate()
                .map(|(j, &x)| (cum[j] - (antider(x) - antider(-1.0))).abs())
                .fold(0.0, f64::max)
        };
        for n in [65usize, 66] {
            assert!(err(n) < 1e-6, "n={n}: {}", err(n));
        }
        // sub-cell corrections at odd nodes keep the whole table 4th order
        assert!(err(65) / err(129) > 10.0);
        assert!(err(66) / err(130) > 10.0);
    }

    #[test]
    fn interp_cubic_is_exact_on_cubics() {
        let f = |x: f64| 0.5 * x * x * x - x * x + 3.0;
        let n = 17;
        let (dx, xs) = grid(n);
        let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        for k in 0..=50 {
            let x = -1.0 + 2.0 * k as f64 / 50.0;
            let got = interp_cubic(-1.0, dx, &vals, x).unwrap();
            assert!((got - f(x)).abs() < 1e-13, "x={x}");
        }
        assert!(interp_cubic(-1.0, dx, &vals, 1.01).is_err());
    }

    #[test]
    fn principal_angle_wraps() {
        use std::f64::consts::PI;
        assert!((principal_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((principal_angle(-3.0 * PI) - PI).abs() < 1e-12);
        assert!((principal_angle(0.3) - 0.3).abs() < 1e-15);
        assert!((principal_angle(2.0 * PI + 0.3) - 0.3).abs() < 1e-12);
    }
}
