//! Rayleigh functional `ρ(x)`, its residual and gradient.

use alloc::vec::Vec;

use num_traits::Float;

use crate::linalg::{dot, eigvals_general, norm, CMatrix, C64, ZERO};
use crate::matpoly::{HermMatrixPolynomial, Interval};
use crate::{Error, Result};

/// Everything the iteration needs about one iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct RayleighEvaluation {
    pub rho: f64,
    /// `x^H F'(ρ) x`, strictly positive on the domain.
    pub sigma: f64,
    /// `F(ρ) x`
    pub residual: Vec<C64>,
    pub residual_norm: f64,
    pub normalized_residual: f64,
}

impl RayleighEvaluation {
    /// `∇ρ(x) = −(2/σ) F(ρ) x`
    pub fn gradient(&self) -> Vec<C64> {
        let s = -2.0 / self.sigma;
        self.residual.iter().map(|r| r * s).collect()
    }
}

/// The root in the interval of the scalar polynomial `Σ c_k λ^(m-k)` at which
/// it crosses from negative to positive.
pub fn scalar_root(coeffs: &[f64], interval: Interval) -> Result<f64> {
    let slack = 1e-14 * (1.0 + interval.lower.abs());
    let accept = |rho: f64| {
        if interval.contains_with_slack(rho, slack) && scalar_derivative(coeffs, rho) > 0.0 {
            Ok(rho)
        } else {
            Err(Error::NotInDomain)
        }
    };
    match *coeffs {
        [a, b] if a > 0.0 => accept(-b / a),
        [a, b, c] if a > 0.0 => {
            let disc = b * b - 4.0 * a * c;
            if disc < 0.0 {
                return Err(Error::NotInDomain);
            }
            let s = disc.sqrt();
            // larger root of a λ² + b λ + c, in the cancellation-free form
            let rho = if b >= 0.0 {
                if b + s == 0.0 {
                    0.0
                } else {
                    -2.0 * c / (b + s)
                }
            } else {
                (-b + s) / (2.0 * a)
            };
            accept(rho)
        }
        _ => generic_root(coeffs, interval, slack),
    }
}

fn generic_root(coeffs: &[f64], interval: Interval, slack: f64) -> Result<f64> {
    let big = coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max);
    if big == 0.0 || !big.is_finite() {
        return Err(Error::NotInDomain);
    }
    let first = coeffs.iter().position(|c| c.abs() > 1e-14 * big).ok_or(Error::NotInDomain)?;
    let c = &coeffs[first..];
    let d = c.len() - 1;
    if d == 0 {
        return Err(Error::NotInDomain);
    }
    let comp = CMatrix::from_fn(d, d, |i, j| {
        if i == 0 {
            C64::new(-c[j + 1] / c[0], 0.0)
        } else if i == j + 1 {
            C64::new(1.0, 0.0)
        } else {
            ZERO
        }
    });
    let mut best: Option<(f64, f64)> = None;
    for z in eigvals_general(&comp)? {
        if z.im.abs() > 1e-10 * (1.0 + z.re.abs()) {
            continue;
        }
        let rho = polish(c, z.re);
        if !interval.contains_with_slack(rho, slack) {
            continue;
        }
        let sigma = scalar_derivative(c, rho);
        if sigma > 0.0 && best.is_none_or(|(_, s)| sigma > s) {
            best = Some((rho, sigma));
        }
    }
    best.map(|(rho, _)| rho).ok_or(Error::NotInDomain)
}

fn polish(c: &[f64], mut rho: f64) -> f64 {
    for _ in 0..2 {
        let d = scalar_derivative(c, rho);
        if d == 0.0 {
            break;
        }
        let next = rho - scalar_eval(c, rho) / d;
        if scalar_eval(c, next).abs() >= scalar_eval(c, rho).abs() {
            break;
        }
        rho = next;
    }
    rho
}

pub fn scalar_eval(c: &[f64], x: f64) -> f64 {
    c.iter().fold(0.0, |acc, v| acc * x + v)
}

pub fn scalar_derivative(c: &[f64], x: f64) -> f64 {
    let m = c.len() - 1;
    c.iter().take(m).enumerate().fold(0.0, |acc, (k, v)| acc * x + v * (m - k) as f64)
}

/// `ρ(x)`, or `NotInDomain` when `x^H F(λ) x` has no positive-slope root in
/// the interval.
pub fn rayleigh_quotient(f: &HermMatrixPolynomial, x: &[C64]) -> Result<f64> {
    if x.len() != f.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), got: x.len() });
    }
    scalar_root(&f.scalar_coeffs(x), f.interval())
}

/// `x^H F'(ρ) x`; fails if it is not positive.
pub fn sigma(f: &HermMatrixPolynomial, x: &[C64], rho: f64) -> Result<f64> {
    let s = scalar_derivative(&f.scalar_coeffs(x), rho);
    if s > 0.0 {
        Ok(s)
    } else {
        Err(Error::AssumptionViolated("x^H F'(ρ) x is not positive"))
    }
}

pub fn normalized_residual(f: &HermMatrixPolynomial, x: &[C64], rho: f64) -> f64 {
    let r = f.apply(rho, x);
    norm(&r) / (f.residual_scale(rho) * norm(x))
}

/// Full evaluation at `x`. The residual is returned orthogonal to `x`, which
/// holds exactly at the true `ρ(x)`; only rounding is removed.
pub fn evaluate(f: &HermMatrixPolynomial, x: &[C64]) -> Result<RayleighEvaluation> {
    let coeffs = f.scalar_coeffs(x);
    let rho = scalar_root(&coeffs, f.interval())?;
    let sigma = scalar_derivative(&coeffs, rho);
    let mut residual = f.apply(rho, x);
    let xx = dot(x, x).re;
    let c = dot(x, &residual) / xx;
    for (r, xi) in residual.iter_mut().zip(x) {
        *r -= xi * c;
    }
    let residual_norm = norm(&residual);
    let normalized_residual = residual_norm / (f.residual_scale(rho) * xx.sqrt());
    Ok(RayleighEvaluation { rho, sigma, residual, residual_norm, normalized_residual })
}
