//! Eigenvalues and eigenvectors of real tridiagonal matrices.
//!
//! The solver is the classic implicit-shift QL iteration for symmetric
//! tridiagonal matrices. Nonsymmetric tridiagonals whose paired off-diagonal
//! products are all positive are diagonally similar to symmetric ones, so
//! their spectra are provably real; `similarity_symmetrize` performs that
//! reduction and reports the scaling needed to map eigenvectors back.

use crate::error::{Error, Result};

/// Eigen decomposition of a symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `off` (`off[i]` couples rows i and i+1).
/// Returns (eigenvalue, eigenvector) pairs sorted ascending; eigenvectors
/// are orthonormal.
pub fn symmetric_tridiagonal_eigen(
    diag: &[f64],
    off: &[f64],
) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = diag.len();
    if n == 0 || off.len() + 1 != n {
        return Err(Error::MismatchedDiscretization(format!(
            "tridiagonal sizes: diag {} off {}",
            n,
            off.len()
        )));
    }
    if diag.iter().chain(off.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("tridiagonal matrix entries".into()));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut z: Vec<Vec<f64>> = (0..n)
        .map(|r| (0..n).map(|c| if r == c { 1.0 } else { 0.0 }).collect())
        .collect();

    let eps = f64::EPSILON;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd + f64::MIN_POSITIVE {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(Error::InconsistentConstruction(
                    "tridiagonal QL iteration failed to converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for zr in z.iter_mut() {
                    f = zr[i + 1];
                    zr[i + 1] = s * zr[i] + c * f;
                    zr[i] = c * zr[i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    Ok(order
        .into_iter()
        .map(|c| (d[c], (0..n).map(|r| z[r][c]).collect()))
        .collect())
}

/// Symmetrizing similarity for a nonsymmetric tridiagonal with sub-diagonal
/// `sub` and super-diagonal `sup`. Requires every product `sub[i]*sup[i]`
/// to be positive (that positivity certifies a real spectrum). Returns the
/// symmetric off-diagonal and the diagonal scaling D with v = D w.
pub fn similarity_symmetrize(sub: &[f64], sup: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if sub.len() != sup.len() {
        return Err(Error::MismatchedDiscretization(format!(
            "sub-diagonal {} vs super-diagonal {}",
            sub.len(),
            sup.len()
        )));
    }
    let k = sub.len();
    let mut off = Vec::with_capacity(k);
    let mut scale = Vec::with_capacity(k + 1);
    scale.push(1.0);
    for i in 0..k {
        let prod = sub[i] * sup[i];
        if !(prod > 0.0) {
            return Err(Error::NonrealSpectrum(format!(
                "off-diagonal product {prod} at row {i} is not positive"
            )));
        }
        // sign(sub) * sqrt(sub*sup) keeps the similarity real
        off.push(prod.sqrt().copysign(sub[i]));
        scale.push(scale[i] * (sub[i] / sup[i]).sqrt());
    }
    Ok((off, scale))
}

/// Eigenpairs of a nonsymmetric tridiagonal matrix that symmetrizes by a
/// diagonal similarity. Eigenvectors are returned in the original basis.
pub fn tridiagonal_eigen_real(
    diag: &[f64],
    sub: &[f64],
    sup: &[f64],
) -> Result<Vec<(f64, Vec<f64>)>> {
    let (off, scale) = similarity_symmetrize(sub, sup)?;
    let pairs = symmetric_tridiagonal_eigen(diag, &off)?;
    Ok(pairs
        .into_iter()
        .map(|(val, w)| {
            let v: Vec<f64> = w.iter().zip(&scale).map(|(wi, si)| wi * si).collect();
            (val, v)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_two_by_two() {
        // [[1, 2], [2, 4]]: eigenvalues 0 and 5
        let pairs = symmetric_tridiagonal_eigen(&[1.0, 4.0], &[2.0]).unwrap();
        assert!((pairs[0].0 - 0.0).abs() < 1e-14);
        assert!((pairs[1].0 - 5.0).abs() < 1e-14);
        // eigenvector for 0: (2, -1)/sqrt(5)
        let v = &pairs[0].1;
        let ratio = v[0] / v[1];
        assert!((ratio + 2.0).abs() < 1e-12);
    }

    #[test]
    fn matches_toeplitz_closed_form() {
        // diag 2, off -1: eigenvalues 2 - 2 cos(k pi / (n+1))
        let n = 8;
        let pairs =
            symmetric_tridiagonal_eigen(&vec![2.0; n], &vec![-1.0; n - 1]).unwrap();
        for (k, (val, vec)) in pairs.iter().enumerate() {
            let want = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((val - want).abs() < 1e-12, "k={k}: {val} vs {want}");
            // residual of the eigen equation
            for r in 0..n {
                let mut acc = 2.0 * vec[r];
                if r > 0 {
                    acc -= vec[r - 1];
                }
                if r + 1 < n {
                    acc -= vec[r + 1];
                }
                assert!((acc - val * vec[r]).abs() < 1e-12);
            }
        }
        // orthonormality
        for a in 0..n {
            for b in 0..n {
                let dot: f64 = pairs[a].1.iter().zip(&pairs[b].1).map(|(x, y)| x * y).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12, "({a},{b}) dot {dot}");
            }
        }
    }

    #[test]
    fn symmetrizes_when_products_are_positive() {
        // sub [-4], sup [-2]: similar to symmetric with off -sqrt(8)
        let pairs = tridiagonal_eigen_real(&[3.0, 15.0], &[-4.0], &[-2.0]).unwrap();
        // [[3, -2], [-4, 15]]: char poly l^2 - 18 l + 37, roots 9 +- 2 sqrt(11)
        let lo = 9.0 - 2.0 * 11.0f64.sqrt();
        let hi = 9.0 + 2.0 * 11.0f64.sqrt();
        assert!((pairs[0].0 - lo).abs() < 1e-12);
        assert!((pairs[1].0 - hi).abs() < 1e-12);
        // residual in the ORIGINAL nonsymmetric matrix
        for (val, v) in &pairs {
            let r0 = 3.0 * v[0] - 2.0 * v[1] - val * v[0];
            let r1 = -4.0 * v[0] + 15.0 * v[1] - val * v[1];
            assert!(r0.abs() < 1e-12 && r1.abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_nonpositive_products() {
        match tridiagonal_eigen_real(&[0.0, 0.0], &[1.0], &[-1.0]) {
            Err(Error::NonrealSpectrum(_)) => {}
            other => panic!("expected nonreal-spectrum, got {other:?}"),
        }
    }
}
