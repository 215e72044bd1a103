//! Test-problem generators with certified interval definiteness.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::linalg::{inertia, orthonormalize, random, CMatrix, HermMatrix, C64, ZERO};
use crate::matpoly::{HermMatrixPolynomial, Interval};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    /// `λB − A`
    Pencil,
    /// `λ²A + λB + C` with `A ≻ 0`
    Hyperbolic,
}

#[derive(Debug, Clone)]
pub struct ProblemBundle {
    pub polynomial: HermMatrixPolynomial,
    pub kind: ProblemKind,
    /// Smallest positive-type eigenvalue when known by construction.
    pub known_lambda1: Option<f64>,
    /// Generator name followed by its parameters, as `(key, value)` pairs.
    pub metadata: Vec<(String, String)>,
}

impl ProblemBundle {
    /// The Hermitian positive definite `M` behind the problem's natural
    /// preconditioner `K = M^{-1}`: `±C` for hyperbolic problems (whichever
    /// sign is definite) and `−F(λ₋) = A − λ₋B` for pencils.
    pub fn natural_preconditioner_matrix(&self) -> Result<HermMatrix> {
        let f = &self.polynomial;
        let n = f.n();
        match self.kind {
            ProblemKind::Hyperbolic => {
                let c = &f.coeffs()[2];
                let i = inertia(c)?;
                if i.positive == n {
                    Ok(c.clone())
                } else if i.negative == n {
                    Ok(c.scaled(-1.0))
                } else {
                    Err(Error::NotPositiveDefinite)
                }
            }
            ProblemKind::Pencil => Ok(f.eval(f.interval().lower).scaled(-1.0)),
        }
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Moving wire-saw model: `A = I/2`, `C = (ν²−1)π²/2 · diag(j²)` and the
/// gyroscopic `B` with `b_ij = iν·4ij/(i²−j²)` for `i+j` odd (1-based), zero
/// otherwise. Hyperbolic on `(0, ∞)` since `C ≺ 0`.
pub fn wiresaw1(n: usize, nu: f64) -> Result<ProblemBundle> {
    if n < 2 {
        return Err(Error::InvalidArgument("wiresaw1 needs n ≥ 2"));
    }
    if !(0.0..1.0).contains(&nu) {
        return Err(Error::InvalidArgument("wiresaw1 needs 0 ≤ ν < 1"));
    }
    let pi2 = core::f64::consts::PI * core::f64::consts::PI;
    let a = HermMatrix::from_real_diag(&vec![0.5; n]);
    let c = HermMatrix::from_real_diag(
        &(1..=n).map(|j| (nu * nu - 1.0) * pi2 / 2.0 * (j * j) as f64).collect::<Vec<_>>(),
    );
    let b = HermMatrix::from_lower_fn(n, |i, j| {
        let (i, j) = ((i + 1) as f64, (j + 1) as f64);
        if (i + j) as u64 % 2 == 1 {
            C64::new(0.0, nu * 4.0 * i * j / (i * i - j * j))
        } else {
            ZERO
        }
    });
    let polynomial = HermMatrixPolynomial::quadratic(a, b, c, Interval::unbounded_above(0.0))?;
    Ok(ProblemBundle {
        polynomial,
        kind: ProblemKind::Hyperbolic,
        known_lambda1: None,
        metadata: vec![
            ("problem".into(), "wiresaw1".into()),
            ("n".into(), n.to_string()),
            ("nu".into(), format!("{nu:?}")),
        ],
    })
}

/// Hyperbolic quadratic `(λ − p_k)(λ − q_k)` diagonalized by a seeded random
/// unitary `Q`: `A = I`, `B = −Q diag(p + q) Q^H`, `C = Q diag(p q) Q^H`.
pub fn prescribed_hyperbolic(pos: &[f64], neg: &[f64], seed: u64) -> Result<ProblemBundle> {
    let n = pos.len();
    let mut rng = random::rng(seed);
    let q = orthonormalize(&random::complex_matrix(&mut rng, n.max(1), n.max(1)).columns(), 1e-12)?;
    let q = CMatrix::from_columns(n.max(1), &q.columns);
    let mut bundle = prescribed_hyperbolic_with_basis(pos, neg, &q)?;
    bundle.metadata.push(("seed".into(), seed.to_string()));
    Ok(bundle)
}

/// As [`prescribed_hyperbolic`] with an explicit unitary `Q`.
pub fn prescribed_hyperbolic_with_basis(pos: &[f64], neg: &[f64], q: &CMatrix) -> Result<ProblemBundle> {
    let n = pos.len();
    if n == 0 || neg.len() != n {
        return Err(Error::NotHyperbolic("need equally many positive- and negative-type eigenvalues"));
    }
    if q.rows() != n || q.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: q.rows() });
    }
    if pos.iter().chain(neg).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("eigenvalues must be finite"));
    }
    let min_pos = pos.iter().copied().fold(f64::INFINITY, f64::min);
    let max_neg = neg.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(min_pos > max_neg) {
        return Err(Error::NotHyperbolic("every positive-type eigenvalue must exceed every negative-type one"));
    }
    let sums: Vec<f64> = pos.iter().zip(neg).map(|(p, q)| -(p + q)).collect();
    let prods: Vec<f64> = pos.iter().zip(neg).map(|(p, q)| p * q).collect();
    let conj = |d: &[f64]| HermMatrix::new(q.matmul(&CMatrix::from_real_diag(d)).matmul(&q.adjoint())).expect("square");
    let mid = 0.5 * (min_pos + max_neg);
    let polynomial = HermMatrixPolynomial::quadratic(
        HermMatrix::identity(n),
        conj(&sums),
        conj(&prods),
        Interval::unbounded_above(mid),
    )?;
    if inertia(&polynomial.eval(mid))?.negative != n {
        return Err(Error::NotHyperbolic("F is not negative definite at the gap midpoint"));
    }
    let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",");
    Ok(ProblemBundle {
        polynomial,
        kind: ProblemKind::Hyperbolic,
        known_lambda1: Some(min_pos),
        metadata: vec![
            ("problem".into(), "hyperbolic".into()),
            ("n".into(), n.to_string()),
            ("pos".into(), list(pos)),
            ("neg".into(), list(neg)),
        ],
    })
}

/// Definite pencil `λB − A` with the prescribed eigenvalues above `λ₀ =
/// min(eigs) − 1`, plus `n − eigs.len()` eigenvalues `λ₀ − 1, λ₀ − 2, …` of
/// negative type (which make `B` indefinite).
pub fn definite_pencil(n: usize, eigs: &[f64], seed: u64) -> Result<ProblemBundle> {
    if eigs.is_empty() || eigs.len() > n {
        return Err(Error::InvalidArgument("need between 1 and n eigenvalues in the interval"));
    }
    let lambda0 = eigs.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
    let mut signs = vec![1.0; eigs.len()];
    let mut all = eigs.to_vec();
    for k in 1..=n - eigs.len() {
        signs.push(-1.0);
        all.push(lambda0 - k as f64);
    }
    let mut bundle = definite_pencil_from_model(&signs, &all, lambda0, seed)?;
    bundle.metadata = vec![
        ("problem".into(), "pencil".into()),
        ("n".into(), n.to_string()),
        ("eigs".into(), eigs.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")),
        ("seed".into(), seed.to_string()),
    ];
    Ok(bundle)
}

/// Pencil congruent to the diagonal model `λ diag(s) − diag(s ⊙ λ_j)` under a
/// seeded near-identity complex `W`, certified by inertia at `λ₀`. Requires
/// `s_j (λ₀ − λ_j) < 0` for every `j`.
pub fn definite_pencil_from_model(signs: &[f64], eigs: &[f64], lambda0: f64, seed: u64) -> Result<ProblemBundle> {
    let n = signs.len();
    if n == 0 || eigs.len() != n {
        return Err(Error::InvalidArgument("signs and eigenvalues must have equal nonzero length"));
    }
    if signs.iter().zip(eigs).any(|(s, l)| !(s * (lambda0 - l) < 0.0) || s.abs() != 1.0) {
        return Err(Error::NotDefinite);
    }
    let bd = HermMatrix::from_real_diag(signs);
    let ad = HermMatrix::from_real_diag(&signs.iter().zip(eigs).map(|(s, l)| s * l).collect::<Vec<_>>());
    let interval = Interval::unbounded_above(lambda0);
    for attempt in 0..10u64 {
        let mut rng = random::rng(seed.wrapping_add(attempt));
        let g = random::complex_matrix(&mut rng, n, n);
        let w = CMatrix::identity(n).add(&g.scaled(C64::new(0.5 / (n as f64).sqrt(), 0.0)));
        let b = bd.congruence_dense(&w);
        let a = ad.congruence_dense(&w);
        let Ok(polynomial) = HermMatrixPolynomial::pencil(b, a, interval) else { continue };
        if inertia(&polynomial.eval(lambda0))?.negative != n {
            continue;
        }
        let known = signs
            .iter()
            .zip(eigs)
            .filter(|(s, _)| **s > 0.0)
            .map(|(_, l)| *l)
            .fold(f64::INFINITY, f64::min);
        return Ok(ProblemBundle {
            polynomial,
            kind: ProblemKind::Pencil,
            known_lambda1: known.is_finite().then_some(known),
            metadata: vec![("problem".into(), "pencil".into()), ("n".into(), n.to_string())],
        });
    }
    Err(Error::NotDefinite)
}
