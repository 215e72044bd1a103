//! Hermitian matrix polynomials `F(λ) = Σ_k A_k λ^(m-k)` and their calculus.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::linalg::{dot, inertia, HermMatrix, InertiaCount, C64};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Upper {
    Finite(f64),
    Unbounded,
}

/// Open interval `(lower, upper)` with a finite lower end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lower: f64,
    pub upper: Upper,
}

impl Interval {
    pub fn new(lower: f64, upper: Upper) -> Self {
        Interval { lower, upper }
    }

    pub fn unbounded_above(lower: f64) -> Self {
        Interval { lower, upper: Upper::Unbounded }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.contains_with_slack(x, 0.0)
    }

    /// Membership in `(lower − slack, upper + slack)`.
    pub fn contains_with_slack(&self, x: f64, slack: f64) -> bool {
        if !x.is_finite() || x <= self.lower - slack {
            return false;
        }
        match self.upper {
            Upper::Finite(u) => x < u + slack,
            Upper::Unbounded => true,
        }
    }

    pub fn upper_finite(&self) -> Option<f64> {
        match self.upper {
            Upper::Finite(u) => Some(u),
            Upper::Unbounded => None,
        }
    }

    /// Offset above `lower` where negative definiteness is probed.
    pub fn probe_offset(&self) -> f64 {
        1e-8 * (1.0 + self.lower.abs())
    }
}

#[derive(Debug, Clone)]
pub struct HermMatrixPolynomial {
    /// `coeffs[k]` multiplies `λ^(m-k)`.
    coeffs: Vec<HermMatrix>,
    interval: Interval,
}

impl HermMatrixPolynomial {
    /// Validates dimensions and probes `F(λ₋ + ε) ≺ 0`.
    pub fn new(coeffs: Vec<HermMatrix>, interval: Interval) -> Result<Self> {
        let poly = Self::new_unchecked(coeffs, interval)?;
        if poly.probe_inertia()?.negative != poly.n() {
            return Err(Error::AssumptionViolated("F is not negative definite just above the lower endpoint"));
        }
        Ok(poly)
    }

    /// Dimension checks only; the definiteness probe is skipped.
    pub fn new_unchecked(coeffs: Vec<HermMatrix>, interval: Interval) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidArgument("a matrix polynomial needs degree at least 1"));
        }
        if !interval.lower.is_finite() {
            return Err(Error::InvalidArgument("the lower interval endpoint must be finite"));
        }
        if let Upper::Finite(u) = interval.upper {
            if !(u > interval.lower) {
                return Err(Error::InvalidArgument("empty interval"));
            }
        }
        let n = coeffs[0].n();
        if let Some(bad) = coeffs.iter().find(|c| c.n() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: bad.n() });
        }
        Ok(HermMatrixPolynomial { coeffs, interval })
    }

    /// `λB − A`
    pub fn pencil(b: HermMatrix, a: HermMatrix, interval: Interval) -> Result<Self> {
        Self::new(vec![b, a.scaled(-1.0)], interval)
    }

    /// `λ²A + λB + C`
    pub fn quadratic(a: HermMatrix, b: HermMatrix, c: HermMatrix, interval: Interval) -> Result<Self> {
        Self::new(vec![a, b, c], interval)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn n(&self) -> usize {
        self.coeffs[0].n()
    }

    pub fn coeffs(&self) -> &[HermMatrix] {
        &self.coeffs
    }

    /// Leading coefficient `A_0`; for both shipped instances `x^H A_0 x = 1`
    /// is the normalization constraint.
    pub fn leading(&self) -> &HermMatrix {
        &self.coeffs[0]
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn probe_inertia(&self) -> Result<InertiaCount> {
        inertia(&self.eval(self.interval.lower + self.interval.probe_offset()))
    }

    pub fn eval(&self, mu: f64) -> HermMatrix {
        let mut acc = self.coeffs[0].clone();
        for c in &self.coeffs[1..] {
            acc = c.add_scaled(mu, &acc);
        }
        acc
    }

    pub fn eval_derivative(&self, mu: f64) -> HermMatrix {
        let m = self.degree();
        let mut acc = self.coeffs[0].scaled(m as f64);
        for (k, c) in self.coeffs.iter().enumerate().take(m).skip(1) {
            acc = c.scaled((m - k) as f64).add_scaled(mu, &acc);
        }
        acc
    }

    /// `F(μ) x` without forming `F(μ)`.
    pub fn apply(&self, mu: f64, x: &[C64]) -> Vec<C64> {
        let mut acc = self.coeffs[0].mul_vec(x);
        for c in &self.coeffs[1..] {
            let cx = c.mul_vec(x);
            for (a, b) in acc.iter_mut().zip(cx) {
                *a = *a * mu + b;
            }
        }
        acc
    }

    /// `F'(μ) x`
    pub fn apply_derivative(&self, mu: f64, x: &[C64]) -> Vec<C64> {
        let m = self.degree();
        let mut acc = self.coeffs[0].mul_vec(x).into_iter().map(|v| v * m as f64).collect::<Vec<_>>();
        for (k, c) in self.coeffs.iter().enumerate().take(m).skip(1) {
            let cx = c.mul_vec(x);
            for (a, b) in acc.iter_mut().zip(cx) {
                *a = *a * mu + b * (m - k) as f64;
            }
        }
        acc
    }

    /// Coefficients `x^H A_k x` of the scalar polynomial `x^H F(λ) x`.
    pub fn scalar_coeffs(&self, x: &[C64]) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.quad_form(x)).collect()
    }

    /// `Σ_k ‖A_k‖₁ |ρ|^(m-k)`, the normalized-residual denominator per unit `‖x‖`.
    pub fn residual_scale(&self, rho: f64) -> f64 {
        let m = self.degree();
        self.coeffs.iter().enumerate().map(|(k, c)| c.norm_one() * rho.abs().powi((m - k) as i32)).sum()
    }

    /// Same as [`residual_scale`](Self::residual_scale) with `|ρ|` floored at 1;
    /// used for absolute tolerances that must not vanish near `ρ = 0`.
    pub fn coefficient_scale(&self, rho: f64) -> f64 {
        self.residual_scale(rho.abs().max(1.0))
    }

    /// `Φ(ρ₁, ρ₂) = (F(ρ₁) − F(ρ₂))/(ρ₁ − ρ₂)`, evaluated by the expanded
    /// identity `Σ_k A_k Σ_j ρ₁^j ρ₂^(m-k-1-j)` so that it is free of
    /// cancellation, exactly symmetric, and equal to `F'(ρ)` on the diagonal.
    pub fn divided_difference(&self, rho1: f64, rho2: f64) -> HermMatrix {
        let m = self.degree();
        let mut acc = HermMatrix::zeros(self.n());
        for (k, c) in self.coeffs.iter().enumerate().take(m) {
            let w = complete_homogeneous(rho1, rho2, m - k - 1);
            acc = acc.add_scaled(w, c);
        }
        acc
    }

    /// `Φ(ρ₁, ρ₂) x` without forming `Φ`.
    pub fn apply_divided_difference(&self, rho1: f64, rho2: f64, x: &[C64]) -> Vec<C64> {
        let m = self.degree();
        let mut acc = alloc::vec![C64::new(0.0, 0.0); x.len()];
        for (k, c) in self.coeffs.iter().enumerate().take(m) {
            let w = complete_homogeneous(rho1, rho2, m - k - 1);
            for (a, b) in acc.iter_mut().zip(c.mul_vec(x)) {
                *a += b * w;
            }
        }
        acc
    }

    pub fn oblique_projection(&self, x: &[C64], rho1: f64, rho2: f64) -> Result<ObliqueProjector> {
        let phi = self.divided_difference(rho1, rho2);
        ObliqueProjector::new(&phi, x)
    }

    /// `(I − P^H) F(ρ) (I − P)`.
    pub fn deflated_eval(&self, rho: f64, p: &ObliqueProjector) -> HermMatrix {
        let f = self.eval(rho);
        let n = self.n();
        let fx = f.mul_vec(&p.x);
        let xf: Vec<C64> = fx.iter().map(|v| v.conj()).collect(); // x^H F, F Hermitian
        let xfx = dot(&p.x, &fx);
        let d = p.denom;
        let mut out = f.into_matrix();
        // F − F x w^H/d − w x^H F/d + w (x^H F x) w^H/d²
        for i in 0..n {
            for j in 0..n {
                let wi = p.w[i];
                let wj = p.w[j].conj();
                out[(i, j)] = out[(i, j)] - fx[i] * wj / d - wi * xf[j] / d + wi * xfx * wj / (d * d);
            }
        }
        HermMatrix::new(out).expect("square")
    }

    /// `(I − P^H) F(ρ) (I − P) v` without forming the matrix.
    pub fn deflated_apply(&self, rho: f64, p: &ObliqueProjector, v: &[C64]) -> Vec<C64> {
        let mut u = v.to_vec();
        let pv = p.apply(v);
        for (a, b) in u.iter_mut().zip(&pv) {
            *a -= b;
        }
        let fu = self.apply(rho, &u);
        let pfu = p.apply_adjoint(&fu);
        fu.iter().zip(&pfu).map(|(a, b)| a - b).collect()
    }
}

/// `Σ_{j=0}^{d} a^j b^(d-j)`, summed in mirrored pairs so the result is
/// bitwise symmetric in `(a, b)`.
fn complete_homogeneous(a: f64, b: f64, d: usize) -> f64 {
    let term = |j: usize| a.powi(j as i32) * b.powi((d - j) as i32);
    let mut s = 0.0;
    for j in 0..d.div_ceil(2) {
        s += term(j) + term(d - j);
    }
    if d.is_multiple_of(2) {
        s += term(d / 2);
    }
    s
}

/// Rank-one oblique projector `P = x (x^H Φ)/(x^H Φ x)`, kept in factored form.
#[derive(Debug, Clone)]
pub struct ObliqueProjector {
    pub x: Vec<C64>,
    /// `Φ x` (equal to `Φ^H x` since `Φ` is Hermitian).
    pub w: Vec<C64>,
    /// `x^H Φ x`
    pub denom: f64,
}

impl ObliqueProjector {
    pub fn new(phi: &HermMatrix, x: &[C64]) -> Result<Self> {
        let w = phi.mul_vec(x);
        let denom = dot(x, &w).re;
        let xn2: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        if !(denom.abs() > 1e-14 * phi.norm_one() * xn2) {
            return Err(Error::DegenerateProjector);
        }
        Ok(ObliqueProjector { x: x.to_vec(), w, denom })
    }

    /// `P v`
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let c = dot(&self.w, v) / self.denom;
        self.x.iter().map(|xi| xi * c).collect()
    }

    /// `P^H v`
    pub fn apply_adjoint(&self, v: &[C64]) -> Vec<C64> {
        let c = dot(&self.x, v) / self.denom;
        self.w.iter().map(|wi| wi * c).collect()
    }

    /// `(I − P) v`
    pub fn complement(&self, v: &[C64]) -> Vec<C64> {
        let pv = self.apply(v);
        v.iter().zip(pv).map(|(a, b)| a - b).collect()
    }
}
