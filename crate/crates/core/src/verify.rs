//! Solver-independent oracles: eigenvalue counting by inertia, bisection for
//! `λ₁`, and the full linearization.

use alloc::vec::Vec;

use num_traits::Float;

use crate::linalg::{herm_eigvals, InertiaCount};
use crate::matpoly::HermMatrixPolynomial;
use crate::{ritz, Error, Result};

/// Largest `n·m` accepted by [`brute_force_eigs`].
pub const BRUTE_FORCE_LIMIT: usize = 2000;

/// Inertia of `F(μ)` with zero band `band · max|eig|`.
pub fn inertia_at(f: &HermMatrixPolynomial, mu: f64, band: f64) -> Result<InertiaCount> {
    let ev = herm_eigvals(&f.eval(mu))?;
    let tol = band * ev.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut count = InertiaCount { negative: 0, zero: 0, positive: 0 };
    for v in ev {
        if v < -tol {
            count.negative += 1;
        } else if v > tol {
            count.positive += 1;
        } else {
            count.zero += 1;
        }
    }
    Ok(count)
}

/// Number of eigenvalues in `(λ₋, μ]`, which equals the number of positive
/// eigenvalues of `F(μ)`.
pub fn count_eigs_upto(f: &HermMatrixPolynomial, mu: f64) -> Result<usize> {
    if !f.interval().contains(mu) {
        return Err(Error::InvalidArgument("shift outside the interval"));
    }
    let i = inertia_at(f, mu, 1e-12)?;
    if i.zero > 0 {
        return Err(Error::OnEigenvalue(mu));
    }
    Ok(i.positive)
}

/// `λ₁` by bisection on the sign of the largest eigenvalue of `F(μ)`.
///
/// Without a bracket the upper end is found by doubling from `λ₋ + ε`. The
/// result is within `tol` of `λ₁` up to the accuracy with which the sign of
/// `λ_max(F(μ))` can be decided, about `n·ε_mach·‖F(μ)‖/σ`.
pub fn bisect_lambda1(f: &HermMatrixPolynomial, bracket: Option<(f64, f64)>, tol: f64) -> Result<f64> {
    let interval = f.interval();
    let band = 16.0 * f64::EPSILON;
    let above = |mu: f64| -> Result<Option<bool>> {
        let i = inertia_at(f, mu, band)?;
        Ok(if i.positive > 0 {
            Some(true)
        } else if i.zero > 0 {
            None
        } else {
            Some(false)
        })
    };
    let (mut lo, mut hi) = match bracket {
        Some((lo, hi)) => {
            if !(lo < hi) || !interval.contains(lo) || !interval.contains(hi) {
                return Err(Error::BadBracket { lo, hi });
            }
            if above(lo)? != Some(false) || above(hi)? == Some(false) {
                return Err(Error::BadBracket { lo, hi });
            }
            (lo, hi)
        }
        None => {
            let eps = interval.probe_offset();
            let lo = interval.lower + eps;
            let mut k = 0;
            let hi = loop {
                let step = eps.max(1e-3 * (1.0 + interval.lower.abs()));
                let cand = interval.lower + step * 2f64.powi(k);
                if !interval.contains(cand) || k > 80 {
                    return Err(Error::BadBracket { lo, hi: cand });
                }
                if above(cand)? != Some(false) {
                    break cand;
                }
                k += 1;
            };
            (lo, hi)
        }
    };
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mut mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let mut side = above(mid)?;
        let mut nudges = 0;
        while side.is_none() && nudges < 4 {
            mid += 1e-13 * mid.abs().max(1.0);
            side = above(mid)?;
            nudges += 1;
        }
        match side {
            Some(true) => hi = mid,
            Some(false) => lo = mid,
            // numerically singular: mid is λ₁ to working precision
            None => return Ok(mid),
        }
    }
    Ok(0.5 * (lo + hi))
}

/// All real eigenvalues of `F` (of either type), ascending, from a dense
/// linearization. Imaginary parts below `1e-8·(1 + |λ|)` count as real.
pub fn brute_force_eigs(f: &HermMatrixPolynomial) -> Result<Vec<f64>> {
    let size = f.n() * f.degree();
    if size > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge(size));
    }
    let mut real: Vec<f64> = ritz::eigenvalues(f)?
        .into_iter()
        .filter(|z| z.re.is_finite() && z.im.abs() <= 1e-8 * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .collect();
    real.sort_by(f64::total_cmp);
    Ok(real)
}

/// Smallest eigenvalue in the interval from [`brute_force_eigs`].
pub fn brute_force_lambda1(f: &HermMatrixPolynomial) -> Result<f64> {
    let interval = f.interval();
    brute_force_eigs(f)?.into_iter().find(|&v| interval.contains(v)).ok_or(Error::DegenerateSpectrum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CMatrix, HermMatrix};
    use crate::matpoly::Interval;
    use crate::problems;

    #[test]
    fn counting_examples() {
        let b = problems::prescribed_hyperbolic_with_basis(&[1.0, 2.0], &[-1.0, -2.0], &CMatrix::identity(2))
            .unwrap();
        let f = &b.polynomial;
        assert_eq!(count_eigs_upto(f, 1.5).unwrap(), 1);
        assert_eq!(count_eigs_upto(f, 0.5).unwrap(), 0);
        assert_eq!(count_eigs_upto(f, 2.5).unwrap(), 2);
        assert_eq!(count_eigs_upto(f, 1.0).unwrap_err(), Error::OnEigenvalue(1.0));
        assert!(count_eigs_upto(f, -1.0).is_err());
    }

    #[test]
    fn bisection_example() {
        let b = problems::prescribed_hyperbolic_with_basis(&[1.0, 2.0], &[-1.0, -2.0], &CMatrix::identity(2))
            .unwrap();
        let l = bisect_lambda1(&b.polynomial, Some((0.1, 1.9)), 1e-12).unwrap();
        assert!((l - 1.0).abs() <= 1e-12);
        let l = bisect_lambda1(&b.polynomial, None, 1e-12).unwrap();
        assert!((l - 1.0).abs() <= 1e-12);
        assert!(matches!(bisect_lambda1(&b.polynomial, Some((1.2, 1.9)), 1e-12), Err(Error::BadBracket { .. })));
    }

    #[test]
    fn brute_force_diagonal_pencil() {
        let f = HermMatrixPolynomial::pencil(
            HermMatrix::from_real_diag(&[1.0, 1.0, -1.0]),
            HermMatrix::from_real_diag(&[1.0, 2.0, 5.0]),
            Interval::unbounded_above(0.0),
        )
        .unwrap();
        let ev = brute_force_eigs(&f).unwrap();
        let want = [-5.0, 1.0, 2.0];
        assert_eq!(ev.len(), 3);
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-13, "{ev:?}");
        }
        assert!((brute_force_lambda1(&f).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn brute_force_size_guard() {
        let big = alloc::vec![HermMatrix::identity(1001); 3];
        let f = HermMatrixPolynomial::new_unchecked(big, Interval::unbounded_above(0.0)).unwrap();
        assert_eq!(brute_force_eigs(&f).unwrap_err(), Error::TooLarge(2002));
    }

    #[test]
    fn bisection_and_brute_force_agree_on_wiresaw() {
        let w = problems::wiresaw1(20, 0.1).unwrap();
        let a = bisect_lambda1(&w.polynomial, None, 1e-12).unwrap();
        let b = brute_force_lambda1(&w.polynomial).unwrap();
        assert!((a - b).abs() <= 1e-9, "{a} {b}");
    }
}
