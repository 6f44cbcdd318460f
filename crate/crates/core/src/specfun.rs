//! Special functions used by the solution catalog.
//!
//! Weber functions `Q` with half-odd index satisfy Q'' = (y^2/4 + n + 1/2) Q
//! and factor as exp(y^2/4) times a real polynomial R_n obeying
//! R_{k+1} = -sqrt(2) y R_k + 2k R_{k-1}. For y > 0 both recurrence terms
//! share a sign, so the evaluation is cancellation-free and R_n is nodeless
//! there. The quasi-exactly-solvable sextic block turns the gauged operator
//! on polynomials of degree n into a tridiagonal matrix whose paired
//! off-diagonal products are strictly positive, certifying a real spectrum.

use crate::error::{Error, Result};
use crate::expr::Expr;
use num_complex::Complex64 as C64;

const DEGREE_CAP: usize = 64;
const QES_CAP: usize = 32;

fn check_degree(n: usize, cap: usize, what: &str) -> Result<()> {
    if n > cap {
        return Err(Error::DegreeCap(format!("{what} degree {n} exceeds {cap}")));
    }
    Ok(())
}

/// Physicists' Hermite polynomial H_n at a real point.
pub fn hermite(n: usize, x: f64) -> Result<f64> {
    check_degree(n, DEGREE_CAP, "hermite")?;
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if n == 0 {
        return Ok(prev);
    }
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Physicists' Hermite polynomial at a complex point.
pub fn hermite_c(n: usize, z: C64) -> Result<C64> {
    check_degree(n, DEGREE_CAP, "hermite")?;
    let (mut prev, mut cur) = (C64::new(1.0, 0.0), z * 2.0);
    if n == 0 {
        return Ok(prev);
    }
    for k in 1..n {
        let next = z * cur * 2.0 - prev * (2.0 * k as f64);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// The polynomial factor R_n(y) of the Weber function, literal sign
/// convention (sign (-1)^n for y > 0).
pub fn weber_r(n: usize, y: f64) -> Result<f64> {
    check_degree(n, DEGREE_CAP, "weber")?;
    let sq2 = std::f64::consts::SQRT_2;
    let (mut prev, mut cur) = (1.0, -sq2 * y);
    if n == 0 {
        return Ok(prev);
    }
    for k in 1..n {
        let next = -sq2 * y * cur + 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// d/dy R_n(y) = -sqrt(2) n R_{n-1}(y).
pub fn weber_r_prime(n: usize, y: f64) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    Ok(-std::f64::consts::SQRT_2 * n as f64 * weber_r(n - 1, y)?)
}

/// Weber function Q with index n + 1/2: exp(y^2/4) R_n(y).
pub fn weber_q(n: usize, y: f64) -> Result<f64> {
    Ok((y * y / 4.0).exp() * weber_r(n, y)?)
}

/// d/dy of the Weber function.
pub fn weber_q_prime(n: usize, y: f64) -> Result<f64> {
    let r = weber_r(n, y)?;
    let rp = weber_r_prime(n, y)?;
    Ok((y * y / 4.0).exp() * (0.5 * y * r + rp))
}

/// Positive-normalized Weber polynomial (-1)^n R_n, positive for y > 0,
/// so its logarithm is real on right-half windows.
pub fn weber_r_positive(n: usize, y: f64) -> Result<f64> {
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * weber_r(n, y)?)
}

/// Coefficients (ascending) of R_n as a polynomial in y.
pub fn weber_r_coeffs(n: usize) -> Result<Vec<f64>> {
    check_degree(n, DEGREE_CAP, "weber")?;
    let sq2 = std::f64::consts::SQRT_2;
    let mut prev = vec![1.0];
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = vec![0.0, -sq2];
    for k in 1..n {
        // next = -sqrt(2) y cur + 2k prev
        let mut next = vec![0.0; cur.len() + 1];
        for (i, &c) in cur.iter().enumerate() {
            next[i + 1] -= sq2 * c;
        }
        for (i, &c) in prev.iter().enumerate() {
            next[i] += 2.0 * k as f64 * c;
        }
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

// ---------------------------------------------------------------------------
// Quasi-exactly-solvable sextic block
// ---------------------------------------------------------------------------

/// The sextic potential whose lowest block is algebraically solvable:
/// x^6 + 2a x^4 + (a^2 - 4n - 3) x^2.
pub fn sextic_potential(n: usize, alpha: f64) -> Expr {
    let x = Expr::x;
    Expr::add(
        Expr::add(
            Expr::pow(x(), 6.0),
            Expr::mul(Expr::c(2.0 * alpha), Expr::pow(x(), 4.0)),
        ),
        Expr::mul(
            Expr::c(alpha * alpha - 4.0 * n as f64 - 3.0),
            Expr::pow(x(), 2.0),
        ),
    )
}

/// Tridiagonal matrix of the gauged sextic operator on polynomials of
/// degree <= n in s = x^2: returns (diag, sub, sup).
pub fn qes_sextic_block(n: usize, alpha: f64) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    check_degree(n, QES_CAP, "sextic block")?;
    if !alpha.is_finite() {
        return Err(Error::NonFinite("sextic block parameter".into()));
    }
    let dim = n + 1;
    let diag: Vec<f64> = (0..dim).map(|k| alpha * (4.0 * k as f64 + 1.0)).collect();
    // entry in row k+1 from column k
    let sub: Vec<f64> = (0..dim - 1).map(|k| 4.0 * (k as f64 - n as f64)).collect();
    // entry in row k-1 from column k
    let sup: Vec<f64> = (1..dim)
        .map(|k| -2.0 * k as f64 * (2.0 * k as f64 - 1.0))
        .collect();
    Ok((diag, sub, sup))
}

/// Apply the gauged operator to p(s): -4 s p'' + (4 s^2 + 4 a s - 2) p'
/// + (-4 n s + a) p, returned as polynomial coefficients. The terms are
/// accumulated separately, the way the operator is written; the top
/// coefficient still cancels exactly in IEEE arithmetic because scaling by
/// 4 is exact: 4*(n*p_n) and (4n)*p_n round identically.
pub fn qes_apply_gauged(n: usize, alpha: f64, p: &[f64]) -> Vec<f64> {
    let d1: Vec<f64> = (1..p.len()).map(|k| k as f64 * p[k]).collect();
    let d2: Vec<f64> = (1..d1.len()).map(|k| k as f64 * d1[k]).collect();
    let mut out = vec![0.0; p.len() + 1];
    for (i, &c) in d2.iter().enumerate() {
        out[i + 1] += -4.0 * c; // -4 s p''
    }
    for (i, &c) in d1.iter().enumerate() {
        out[i + 2] += 4.0 * c; // 4 s^2 p'
        out[i + 1] += 4.0 * alpha * c; // 4 a s p'
        out[i] += -2.0 * c; // -2 p'
    }
    for (i, &c) in p.iter().enumerate() {
        out[i + 1] += -(4.0 * n as f64) * c; // -4 n s p
        out[i] += alpha * c; // a p
    }
    out
}

/// One algebraic level of the sextic problem.
#[derive(Debug, Clone)]
pub struct SexticLevel {
    pub energy: f64,
    /// Coefficients of p(s), ascending, normalized to leading coefficient 1.
    pub poly: Vec<f64>,
}

/// All n+1 algebraic levels, sorted by energy.
pub fn qes_spectrum(n: usize, alpha: f64) -> Result<Vec<SexticLevel>> {
    let (diag, sub, sup) = qes_sextic_block(n, alpha)?;
    let pairs = crate::eigen::tridiagonal_eigen_real(&diag, &sub, &sup)?;
    let mut out = Vec::with_capacity(pairs.len());
    for (energy, mut poly) in pairs {
        let lead = *poly.last().unwrap();
        if lead == 0.0 || !lead.is_finite() {
            return Err(Error::NotQuasiSolvable(format!(
                "level at E={energy} has vanishing leading coefficient"
            )));
        }
        for c in poly.iter_mut() {
            *c /= lead;
        }
        out.push(SexticLevel { energy, poly });
    }
    Ok(out)
}

/// Closed-form factor of the algebraic eigenfunctions:
/// exp(-x^4/4 - a x^2/2) * p(x^2) as an expression tree.
pub fn qes_eigenfunction(alpha: f64, poly: &[f64]) -> Expr {
    let x = Expr::x;
    let gauge = Expr::exp(Expr::sub(
        Expr::mul(Expr::c(-0.25), Expr::pow(x(), 4.0)),
        Expr::mul(Expr::c(0.5 * alpha), Expr::pow(x(), 2.0)),
    ));
    let mut p = Expr::c(0.0);
    for (k, &c) in poly.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        p = Expr::add(p, Expr::mul(Expr::c(c), Expr::pow(x(), 2.0 * k as f64)));
    }
    Expr::mul(gauge, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_matches_table() {
        // H_0..H_3: 1, 2x, 4x^2 - 2, 8x^3 - 12x
        let x = 0.7;
        assert_eq!(hermite(0, x).unwrap(), 1.0);
        assert!((hermite(1, x).unwrap() - 2.0 * x).abs() < 1e-15);
        assert!((hermite(2, x).unwrap() - (4.0 * x * x - 2.0)).abs() < 1e-14);
        assert!((hermite(3, x).unwrap() - (8.0 * x * x * x - 12.0 * x)).abs() < 1e-13);
        assert!(hermite(65, x).is_err());
    }

    #[test]
    fn weber_polynomial_matches_complex_oracle() {
        // R_n(y) = i^n H_n(i y / sqrt(2)) must be real and match the
        // cancellation-free recurrence to near machine precision.
        for n in 0..=10usize {
            for k in 0..=40 {
                let y = -5.0 + 10.0 * k as f64 / 40.0;
                let z = C64::new(0.0, y / std::f64::consts::SQRT_2);
                let i_pow = C64::new(0.0, 1.0).powu(n as u32);
                let oracle = i_pow * hermite_c(n, z).unwrap();
                let got = weber_r(n, y).unwrap();
                assert!(
                    oracle.im.abs() <= 1e-10 * oracle.norm().max(1.0),
                    "n={n} y={y}: imaginary residue {}",
                    oracle.im
                );
                let scale = oracle.norm().max(1e-300);
                assert!(
                    (got - oracle.re).abs() <= 1e-12 * scale,
                    "n={n} y={y}: {got} vs {}",
                    oracle.re
                );
            }
        }
    }

    #[test]
    fn weber_is_nodeless_on_positive_axis() {
        for n in 0..=10usize {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            for k in 1..=1000 {
                let y = 10.0 * k as f64 / 1000.0;
                let r = weber_r(n, y).unwrap();
                assert!(sign * r > 0.0, "n={n} y={y}: R={r}");
                assert!(weber_r_positive(n, y).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn weber_satisfies_its_equation() {
        // y R' + R'' - n R = 0, with R'' = 2 n (n-1) R_{n-2}
        for n in 0..=10usize {
            for k in 0..=20 {
                let y = -3.0 + 6.0 * k as f64 / 20.0;
                let r = weber_r(n, y).unwrap();
                let rp = weber_r_prime(n, y).unwrap();
                let rpp = if n >= 2 {
                    2.0 * (n * (n - 1)) as f64 * weber_r(n - 2, y).unwrap()
                } else {
                    0.0
                };
                let resid = y * rp + rpp - n as f64 * r;
                assert!(
                    resid.abs() < 1e-9 * (1.0 + r.abs()),
                    "n={n} y={y}: residual {resid}"
                );
            }
        }
    }

    #[test]
    fn weber_coeffs_match_pointwise_evaluation() {
        for n in [0usize, 1, 4, 7] {
            let coeffs = weber_r_coeffs(n).unwrap();
            assert_eq!(coeffs.len(), n + 1);
            for k in 0..=8 {
                let y = -2.0 + 4.0 * k as f64 / 8.0;
                let horner = coeffs.iter().rev().fold(0.0, |acc, &c| acc * y + c);
                let direct = weber_r(n, y).unwrap();
                assert!((horner - direct).abs() < 1e-10 * (1.0 + direct.abs()));
            }
        }
    }

    #[test]
    fn sextic_block_frozen_spectra() {
        // n = 0: single level at E = alpha
        for alpha in [0.5, 1.0, 3.0, 7.25] {
            let levels = qes_spectrum(0, alpha).unwrap();
            assert_eq!(levels.len(), 1);
            assert!((levels[0].energy - alpha).abs() < 1e-12);
        }
        // n = 1, alpha = 3: E = 9 -+ 2 sqrt(11)
        let levels = qes_spectrum(1, 3.0).unwrap();
        let s11 = 11.0f64.sqrt();
        assert!((levels[0].energy - (9.0 - 2.0 * s11)).abs() < 1e-11);
        assert!((levels[1].energy - (9.0 + 2.0 * s11)).abs() < 1e-11);
        // n = 2, alpha = 1: roots of (E + 3)(E^2 - 18E + 49)
        let levels = qes_spectrum(2, 1.0).unwrap();
        let s2 = 2.0f64.sqrt();
        let want = [-3.0, 9.0 - 4.0 * s2, 9.0 + 4.0 * s2];
        for (lv, w) in levels.iter().zip(want) {
            assert!((lv.energy - w).abs() < 1e-11, "{} vs {w}", lv.energy);
        }
        // frozen eigenvector at E = -3: p(s) = s^2 + 3s + 3/2
        let p = &levels[0].poly;
        assert!((p[2] - 1.0).abs() < 1e-12);
        assert!((p[1] - 3.0).abs() < 1e-10);
        assert!((p[0] - 1.5).abs() < 1e-10);
    }

    #[test]
    fn gauged_operator_matches_matrix_action() {
        let (n, alpha) = (3usize, 1.7);
        let p = [0.3, -1.2, 0.8, 2.0];
        let q = qes_apply_gauged(n, alpha, &p);
        let (diag, sub, sup) = qes_sextic_block(n, alpha).unwrap();
        // matrix action on the coefficient vector
        for r in 0..=n {
            let mut acc = diag[r] * p[r];
            if r > 0 {
                acc += sub[r - 1] * p[r - 1];
            }
            if r < n {
                acc += sup[r] * p[r + 1];
            }
            assert!((q[r] - acc).abs() < 1e-12, "row {r}: {} vs {acc}", q[r]);
        }
    }

    #[test]
    fn closure_coefficient_vanishes_exactly() {
        for n in 0..=8usize {
            let alpha = 1.9;
            for lv in qes_spectrum(n, alpha).unwrap() {
                let q = qes_apply_gauged(n, alpha, &lv.poly);
                assert_eq!(q[n + 1], 0.0, "n={n} E={}", lv.energy);
            }
        }
    }

    #[test]
    fn eigenfunction_residual_is_algebraically_small() {
        use crate::expr::Var;
        let (n, alpha) = (2usize, 1.0);
        let v = sextic_potential(n, alpha);
        for lv in qes_spectrum(n, alpha).unwrap() {
            let phi = qes_eigenfunction(alpha, &lv.poly);
            let phi_xx = phi.diff(Var::X).diff(Var::X);
            for k in 0..=30 {
                let x = 3.0 * k as f64 / 30.0;
                let resid = -phi_xx.eval(x, 0.0) + v.eval(x, 0.0) * phi.eval(x, 0.0)
                    - lv.energy * phi.eval(x, 0.0);
                let scale = phi.eval(x, 0.0).abs().max(1.0);
                assert!(
                    resid.abs() < 1e-9 * scale,
                    "E={} x={x}: residual {resid}",
                    lv.energy
                );
            }
        }
    }
}
