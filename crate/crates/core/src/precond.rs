//! Hermitian positive definite preconditioners `K ≈ M^{-1}`.

use alloc::vec::Vec;

use num_traits::Float;

use crate::linalg::{dot, inertia, norm, random, Cholesky, HermMatrix, C64, ZERO};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub enum Preconditioner {
    Identity,
    /// `K = M^{-1}` through a Cholesky factorization.
    ExactInverse { m: HermMatrix, chol: Cholesky },
    /// `K v` approximated by at most `max_steps` conjugate gradient steps on
    /// `M w = v`, started from zero, stopped at `‖r‖ ≤ rel_tol ‖v‖`.
    InnerCg { m: HermMatrix, rel_tol: f64, max_steps: usize },
}

/// Outcome of one inner CG solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgStats {
    pub steps: usize,
    pub relative_residual: f64,
}

impl Preconditioner {
    pub fn identity() -> Self {
        Preconditioner::Identity
    }

    pub fn exact_inverse(m: HermMatrix) -> Result<Self> {
        let n = m.n();
        if inertia(&m)?.positive != n {
            return Err(Error::NotPositiveDefinite);
        }
        let chol = Cholesky::new(&m)?;
        Ok(Preconditioner::ExactInverse { m, chol })
    }

    pub fn inner_cg(m: HermMatrix, rel_tol: f64, max_steps: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || max_steps == 0 {
            return Err(Error::InvalidArgument("inner CG needs a positive tolerance and step budget"));
        }
        Ok(Preconditioner::InnerCg { m, rel_tol, max_steps })
    }

    /// The matrix `M` that `K` inverts (exactly or approximately); `None`
    /// stands for the identity.
    pub fn matrix(&self) -> Option<&HermMatrix> {
        match self {
            Preconditioner::Identity => None,
            Preconditioner::ExactInverse { m, .. } | Preconditioner::InnerCg { m, .. } => Some(m),
        }
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        self.apply_with_stats(v).map(|(w, _)| w)
    }

    pub fn apply_with_stats(&self, v: &[C64]) -> Result<(Vec<C64>, Option<CgStats>)> {
        match self {
            Preconditioner::Identity => Ok((v.to_vec(), None)),
            Preconditioner::ExactInverse { m, chol } => {
                if v.len() != m.n() {
                    return Err(Error::DimensionMismatch { expected: m.n(), got: v.len() });
                }
                Ok((chol.solve(v), None))
            }
            Preconditioner::InnerCg { m, rel_tol, max_steps } => {
                if v.len() != m.n() {
                    return Err(Error::DimensionMismatch { expected: m.n(), got: v.len() });
                }
                let (w, stats) = cg(m, v, *rel_tol, *max_steps)?;
                Ok((w, Some(stats)))
            }
        }
    }

    /// Checks `Re(v^H K v) > 0` on `samples` seeded random vectors.
    pub fn positivity_check(&self, n: usize, samples: usize, seed: u64) -> Result<bool> {
        let mut rng = random::rng(seed);
        for _ in 0..samples {
            let v = random::complex_vector(&mut rng, n);
            if !(dot(&v, &self.apply(&v)?).re > 0.0) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn cg(m: &HermMatrix, b: &[C64], rel_tol: f64, max_steps: usize) -> Result<(Vec<C64>, CgStats)> {
    let bnorm = norm(b);
    let mut x = alloc::vec![ZERO; b.len()];
    if bnorm == 0.0 {
        return Ok((x, CgStats { steps: 0, relative_residual: 0.0 }));
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r).re;
    let mut steps = 0;
    while steps < max_steps && rr.sqrt() > rel_tol * bnorm {
        let q = m.mul_vec(&p);
        let curv = dot(&p, &q).re;
        if !(curv > 0.0) {
            return Err(Error::PreconditionerBreakdown(curv));
        }
        let alpha = rr / curv;
        for ((xi, ri), (pi, qi)) in x.iter_mut().zip(r.iter_mut()).zip(p.iter().zip(&q)) {
            *xi += pi * alpha;
            *ri -= qi * alpha;
        }
        let rr_next = dot(&r, &r).re;
        let beta = rr_next / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + *pi * beta;
        }
        rr = rr_next;
        steps += 1;
    }
    Ok((x, CgStats { steps, relative_residual: rr.sqrt() / bnorm }))
}
