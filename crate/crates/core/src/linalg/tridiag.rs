//! Extreme eigenvalues of symmetric tridiagonal matrices.
//!
//! Bisection on Sturm sequence counts: the number of negative pivots of the
//! LDL^T recurrence at shift `x` equals the number of eigenvalues below `x`.
//! Only the two extremes are needed, so bisection is both simple and
//! unconditionally robust.

use crate::error::{Error, Result};

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`.
fn sturm_count(alpha: &[f64], beta: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = alpha[0] - x;
    if d < 0.0 {
        count += 1;
    }
    for i in 1..alpha.len() {
        let b = beta[i - 1];
        let mut prev = d;
        if prev == 0.0 {
            // Standard guard: nudge a zero pivot to keep the count consistent.
            prev = f64::MIN_POSITIVE;
        }
        d = (alpha[i] - x) - b * b / prev;
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest `x` in `[lo, hi]` with at least `target` eigenvalues below it,
/// located to a relative width of about 1e-13.
fn bisect(alpha: &[f64], beta: &[f64], mut lo: f64, mut hi: f64, target: usize) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval no longer splittable in f64
        }
        if sturm_count(alpha, beta, mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-13 * (lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE)) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Extreme eigenvalues `(lambda_min, lambda_max)` of the symmetric
/// tridiagonal matrix with diagonal `alpha` and off-diagonal `beta`
/// (`beta.len() == alpha.len() - 1`).
pub fn tridiag_eig_extremes(alpha: &[f64], beta: &[f64]) -> Result<(f64, f64)> {
    if alpha.is_empty() {
        return Err(Error::InvalidArgument(
            "tridiag_eig_extremes: empty diagonal".into(),
        ));
    }
    if beta.len() + 1 != alpha.len() {
        return Err(Error::DimensionMismatch(format!(
            "tridiag_eig_extremes: {} diagonal vs {} off-diagonal entries",
            alpha.len(),
            beta.len()
        )));
    }
    if alpha.iter().chain(beta.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("tridiag_eig_extremes".into()));
    }
    let n = alpha.len();
    if n == 1 {
        return Ok((alpha[0], alpha[0]));
    }
    // Gershgorin enclosure of the whole spectrum.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut radius = 0.0;
        if i > 0 {
            radius += beta[i - 1].abs();
        }
        if i < n - 1 {
            radius += beta[i].abs();
        }
        lo = lo.min(alpha[i] - radius);
        hi = hi.max(alpha[i] + radius);
    }
    let pad = 1e-10 * (hi - lo).max(lo.abs().max(hi.abs())).max(1.0);
    let (lo, hi) = (lo - pad, hi + pad);
    let lambda_min = bisect(alpha, beta, lo, hi, 1);
    let lambda_max = bisect(alpha, beta, lo, hi, n);
    Ok((lambda_min, lambda_max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, rel: f64) {
        assert!(
            (a - b).abs() <= rel * b.abs().max(1e-300),
            "{a} vs {b} (rel {rel})"
        );
    }

    #[test]
    fn single_entry() {
        let (lo, hi) = tridiag_eig_extremes(&[2.0], &[]).unwrap();
        assert_eq!((lo, hi), (2.0, 2.0));
    }

    #[test]
    fn two_by_two() {
        let (lo, hi) = tridiag_eig_extremes(&[2.0, 2.0], &[-1.0]).unwrap();
        assert_close(lo, 1.0, 1e-10);
        assert_close(hi, 3.0, 1e-10);
    }

    #[test]
    fn three_by_three_known_spectrum() {
        let (lo, hi) = tridiag_eig_extremes(&[2.0, 2.0, 2.0], &[-1.0, -1.0]).unwrap();
        let sqrt2 = 2.0f64.sqrt();
        assert_close(lo, 2.0 - sqrt2, 1e-10);
        assert_close(hi, 2.0 + sqrt2, 1e-10);
    }

    #[test]
    fn discrete_laplacian_chain() {
        // alpha = 2, beta = -1, size n: eigenvalues 2 - 2 cos(k pi / (n+1)).
        let n = 40;
        let alpha = vec![2.0; n];
        let beta = vec![-1.0; n - 1];
        let (lo, hi) = tridiag_eig_extremes(&alpha, &beta).unwrap();
        let theta = std::f64::consts::PI / (n as f64 + 1.0);
        assert_close(lo, 2.0 - 2.0 * theta.cos(), 1e-10);
        assert_close(hi, 2.0 + 2.0 * theta.cos(), 1e-10);
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(tridiag_eig_extremes(&[], &[]).is_err());
        assert!(tridiag_eig_extremes(&[1.0, 2.0], &[]).is_err());
    }
}
