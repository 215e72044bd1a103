//! Predicted convergence rates and checks of observed rates against them.

use alloc::vec::Vec;

use num_traits::Float;

use crate::linalg::{herm_eigvals, Cholesky, HermMatrix};
use crate::locg::TraceRow;
use crate::matpoly::HermMatrixPolynomial;
use crate::precond::Preconditioner;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePrediction {
    pub gamma_lo: f64,
    pub gamma_hi: f64,
    pub kappa: f64,
    pub delta: f64,
    /// Per-step rate `η` for the error `ρ_i − λ₁`.
    pub eta: f64,
    pub eta_sq: f64,
}

/// Extreme nonzero eigenvalues `(γ, Γ)` of `K^{1/2}(−F(λ₁))K^{1/2}`, computed
/// as those of `L^{-1}(−F(λ₁))L^{-H}` with `M = L L^H`, `K = M^{-1}`.
///
/// The smallest-magnitude eigenvalue is treated as the null direction when it
/// is at most `1e-8` of the largest, and values below `1e-12` of the largest
/// are ignored, since `λ₁` is only known to about `ε‖F‖/σ`.
pub fn spectral_constants(f: &HermMatrixPolynomial, k: &Preconditioner, lambda1: f64) -> Result<(f64, f64)> {
    let neg = f.eval(lambda1).scaled(-1.0);
    let g = match k.matrix() {
        None => neg,
        Some(m) => Cholesky::new(m)?.reduce(&neg),
    };
    spectral_constants_of(&g)
}

fn spectral_constants_of(g: &HermMatrix) -> Result<(f64, f64)> {
    let mut ev = herm_eigvals(g)?;
    let big = ev.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if big == 0.0 {
        return Err(Error::DegenerateSpectrum);
    }
    ev.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    if ev[0].abs() <= 1e-8 * big {
        ev.remove(0);
    }
    let pos: Vec<f64> = ev.into_iter().filter(|&v| v > 1e-12 * big).collect();
    if pos.is_empty() {
        return Err(Error::DegenerateSpectrum);
    }
    let lo = pos.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = pos.iter().copied().fold(0.0, f64::max);
    Ok((lo, hi))
}

/// `Δ = (√κ + 1)/(√κ − 1)` and `η = 2/(Δ^{2m_e} + Δ^{−2m_e})`.
pub fn predicted_eta(kappa: f64, m_e: usize) -> Result<(f64, f64)> {
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(Error::InvalidKappa(kappa));
    }
    if m_e == 0 {
        return Err(Error::InvalidArgument("m_e must be at least 1"));
    }
    if kappa == 1.0 {
        return Ok((f64::INFINITY, 0.0));
    }
    let s = kappa.sqrt();
    let delta = (s + 1.0) / (s - 1.0);
    // Δ^{−2m_e}/(1 + Δ^{−4m_e}) avoids overflow for large m_e
    let t = delta.powi(-2 * m_e as i32);
    Ok((delta, 2.0 * t / (1.0 + t * t)))
}

pub fn predict(f: &HermMatrixPolynomial, k: &Preconditioner, lambda1: f64, m_e: usize) -> Result<RatePrediction> {
    let (gamma_lo, gamma_hi) = spectral_constants(f, k, lambda1)?;
    let kappa = gamma_hi / gamma_lo;
    let (delta, eta) = predicted_eta(kappa, m_e)?;
    Ok(RatePrediction { gamma_lo, gamma_hi, kappa, delta, eta, eta_sq: eta * eta })
}

/// `η/(2 − η)`, the LOCG rate implied by a steepest-descent rate `η`.
pub fn eta_from_sd(eta_sd: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta_sd) {
        return Err(Error::InvalidEta(eta_sd));
    }
    Ok(eta_sd / (2.0 - eta_sd))
}

/// `e_0 η^i` for `i = 0..n`.
pub fn predicted_error_sequence(e0: f64, eta: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| e0 * eta.powi(i as i32)).collect()
}

/// Which trace entries enter an observed-rate check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateWindow {
    /// Entries with `ρ_{i-1} − λ₁` above `upper · (ρ_0 − λ₁)` are excluded.
    pub upper: f64,
    /// Entries with `ρ_{i-1} − λ₁` below `floor · (1 + |λ₁|)` are excluded.
    pub floor: f64,
    pub slack: f64,
}

impl Default for RateWindow {
    fn default() -> Self {
        RateWindow { upper: 1e-2, floor: 1e-10, slack: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStepEntry {
    /// Index of the middle iterate.
    pub iter: usize,
    /// `(ρ_{i+1} − λ₁)/(ρ_{i−1} − λ₁)`
    pub ratio: f64,
    pub bound: f64,
    /// `ρ_i − ρ_{i+1} ≥ √(ρ_{i−1} − ρ_i)`: the bound is not claimed here.
    pub exceptional: bool,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoStepReport {
    pub entries: Vec<TwoStepEntry>,
    pub violations: usize,
}

/// Observed two-step ratios in the asymptotic window against `η² + slack`.
pub fn two_step_rate_check(rows: &[TraceRow], lambda1: f64, eta: f64, window: RateWindow) -> Result<TwoStepReport> {
    let rho: Vec<f64> = rows.iter().map(|r| r.rho).collect();
    if rho.len() < 3 {
        return Err(Error::EmptyWindow);
    }
    let e0 = rho[0] - lambda1;
    let bound = eta * eta + window.slack;
    let mut entries = Vec::new();
    for i in 1..rho.len() - 1 {
        let before = rho[i - 1] - lambda1;
        if before > window.upper * e0 || before < window.floor * (1.0 + lambda1.abs()) {
            continue;
        }
        let ratio = (rho[i + 1] - lambda1) / before;
        let exceptional = rho[i] - rho[i + 1] >= (rho[i - 1] - rho[i]).max(0.0).sqrt();
        let violated = !exceptional && ratio > bound;
        entries.push(TwoStepEntry { iter: i, ratio, bound, exceptional, violated });
    }
    if entries.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let violations = entries.iter().filter(|e| e.violated).count();
    Ok(TwoStepReport { entries, violations })
}

/// Observed one-step ratios `(ρ_{i+1} − λ₁)/(ρ_i − λ₁)` in the window.
pub fn observed_step_ratios(rows: &[TraceRow], lambda1: f64, window: RateWindow) -> Vec<f64> {
    let rho: Vec<f64> = rows.iter().map(|r| r.rho).collect();
    let Some(first) = rho.first() else { return Vec::new() };
    let e0 = first - lambda1;
    rho.windows(2)
        .filter_map(|w| {
            let before = w[0] - lambda1;
            (before <= window.upper * e0 && before >= window.floor * (1.0 + lambda1.abs()))
                .then(|| (w[1] - lambda1) / before)
        })
        .collect()
}

/// Geometric mean of positive ratios.
pub fn geometric_mean(ratios: &[f64]) -> Option<f64> {
    let logs: Vec<f64> = ratios.iter().filter(|r| **r > 0.0).map(|r| r.ln()).collect();
    if logs.is_empty() {
        return None;
    }
    Some((logs.iter().sum::<f64>() / logs.len() as f64).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems;
    use alloc::vec;

    fn row(iter: usize, rho: f64) -> TraceRow {
        TraceRow { iter, rho, ..TraceRow::default() }
    }

    #[test]
    fn eta_examples() {
        let (delta, eta) = predicted_eta(9.0, 1).unwrap();
        assert!((delta - 2.0).abs() < 1e-15);
        assert!((eta - 8.0 / 17.0).abs() < 1e-15);
        assert!((eta - 0.470_588_235_294_117_6).abs() < 1e-12);
        let (_, eta2) = predicted_eta(9.0, 2).unwrap();
        assert!((eta2 - 2.0 / (16.0 + 1.0 / 16.0)).abs() < 1e-15);
        assert!((eta2 - 0.124_513_618_677_042_8).abs() < 1e-12);
        assert_eq!(predicted_eta(1.0, 1).unwrap().1, 0.0);
        assert_eq!(predicted_eta(0.5, 1).unwrap_err(), Error::InvalidKappa(0.5));
        let (_, big) = predicted_eta(1e8, 1).unwrap();
        assert!(big < 1.0 && big > 0.99);
        let (_, huge_me) = predicted_eta(4.0, 5000).unwrap();
        assert_eq!(huge_me, 0.0);
    }

    #[test]
    fn sd_relation() {
        assert!((eta_from_sd(0.5).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(eta_from_sd(1.0).unwrap(), 1.0);
        assert_eq!(eta_from_sd(0.0).unwrap(), 0.0);
        assert!(eta_from_sd(1.5).is_err());
    }

    #[test]
    fn eta_is_monotone() {
        let mut prev = 0.0;
        for k in 1..50 {
            let (_, e) = predicted_eta(1.0 + k as f64, 1).unwrap();
            assert!(e > prev);
            prev = e;
        }
        for kappa in [2.0, 10.0, 1e4] {
            let e: Vec<f64> = (1..6).map(|m| predicted_eta(kappa, m).unwrap().1).collect();
            assert!(e.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn spectral_constants_of_diagonal() {
        let g = HermMatrix::from_real_diag(&[0.0, 1.0, 9.0]);
        assert_eq!(spectral_constants_of(&g).unwrap(), (1.0, 9.0));
        assert_eq!(spectral_constants_of(&HermMatrix::zeros(2)).unwrap_err(), Error::DegenerateSpectrum);
    }

    #[test]
    fn hyperbolic_constants_with_identity() {
        let b = problems::prescribed_hyperbolic_with_basis(&[1.0, 2.0], &[-1.0, -2.0], &crate::CMatrix::identity(2))
            .unwrap();
        // −F(1) = diag(0, 3)
        let (lo, hi) = spectral_constants(&b.polynomial, &Preconditioner::identity(), 1.0).unwrap();
        assert!((lo - 3.0).abs() < 1e-14 && (hi - 3.0).abs() < 1e-14);
    }

    #[test]
    fn two_step_on_synthetic_geometric_sequence() {
        let rows: Vec<TraceRow> = (0..30).map(|i| row(i, 1.0 + 0.5f64.powi(i as i32))).collect();
        let rep = two_step_rate_check(&rows, 1.0, 0.5, RateWindow::default()).unwrap();
        assert_eq!(rep.violations, 0);
        assert!(rep.entries.iter().all(|e| (e.ratio - 0.25).abs() < 1e-6));
        let bad = two_step_rate_check(&rows, 1.0, 0.1, RateWindow { slack: 0.0, ..RateWindow::default() }).unwrap();
        assert!(bad.violations > 0);
        assert_eq!(two_step_rate_check(&rows[..2], 1.0, 0.5, RateWindow::default()).unwrap_err(), Error::EmptyWindow);
    }

    #[test]
    fn step_ratios() {
        let rows = vec![row(0, 2.0), row(1, 1.008), row(2, 1.004), row(3, 1.002)];
        let r = observed_step_ratios(&rows, 1.0, RateWindow::default());
        assert_eq!(r.len(), 2);
        assert!((geometric_mean(&r).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(predicted_error_sequence(1.0, 0.5, 3), vec![1.0, 0.5, 0.25]);
    }
}
