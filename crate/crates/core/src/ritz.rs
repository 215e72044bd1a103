//! Rayleigh–Ritz projection onto a small subspace and extraction of the
//! smallest positive-type Ritz pair.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::linalg::{
    eigvals_general, herm_eig, norm, null_vector_general, Cholesky, CMatrix, HermMatrix, Lu, C64, ONE, ZERO,
};
use crate::matpoly::HermMatrixPolynomial;
use crate::rayleigh::{scalar_derivative, scalar_root};
use crate::{Error, Result};

/// `Z^H F(λ) Z` for an orthonormal basis `Z`.
#[derive(Debug, Clone)]
pub struct ProjectedPolynomial {
    pub poly: HermMatrixPolynomial,
    pub basis: Vec<Vec<C64>>,
}

impl ProjectedPolynomial {
    pub fn k(&self) -> usize {
        self.basis.len()
    }

    /// `Z y`
    pub fn lift(&self, y: &[C64]) -> Vec<C64> {
        let n = self.basis[0].len();
        let mut x = vec![ZERO; n];
        for (z, c) in self.basis.iter().zip(y) {
            for (xi, zi) in x.iter_mut().zip(z) {
                *xi += zi * c;
            }
        }
        x
    }
}

pub fn project(f: &HermMatrixPolynomial, z: &[Vec<C64>]) -> Result<ProjectedPolynomial> {
    if z.is_empty() {
        return Err(Error::EmptyBasis);
    }
    if let Some(bad) = z.iter().find(|c| c.len() != f.n()) {
        return Err(Error::DimensionMismatch { expected: f.n(), got: bad.len() });
    }
    let coeffs = f.coeffs().iter().map(|c| c.congruence(z)).collect();
    let poly = HermMatrixPolynomial::new_unchecked(coeffs, f.interval())?;
    Ok(ProjectedPolynomial { poly, basis: z.to_vec() })
}

/// Smallest positive-type Ritz pair.
#[derive(Debug, Clone)]
pub struct RitzSelection {
    pub rho: f64,
    /// Coefficients in the projected basis.
    pub y: Vec<C64>,
    /// `Z y`, normalized by [`constraint_normalize`].
    pub x: Vec<C64>,
    /// `y^H P'(ρ) y`
    pub sigma: f64,
}

/// All `m·k` eigenvalues of a small polynomial eigenproblem; infinite ones
/// are reported as `+∞`.
pub fn eigenvalues(p: &HermMatrixPolynomial) -> Result<Vec<C64>> {
    Linearization::new(p)?.eigenvalues()
}

/// All eigenpairs of a small polynomial eigenproblem. Eigenvectors of real
/// eigenvalues are normalized by [`constraint_normalize`], the rest to unit
/// length.
pub fn solve_small(p: &HermMatrixPolynomial) -> Result<Vec<(C64, Vec<C64>)>> {
    let lin = Linearization::new(p)?;
    let vals = lin.eigenvalues()?;
    let mut out = Vec::with_capacity(vals.len());
    for lam in vals {
        let v = lin.eigenvector(lam)?;
        let v = if lam.im == 0.0 && lam.re.is_finite() { constraint_normalize(p, &v) } else { unit(&v) };
        out.push((lam, v));
    }
    Ok(out)
}

/// `x^H A_0 x = 1` when the leading form is positive at `x` and the degree is
/// at most two, unit 2-norm otherwise.
pub fn constraint_normalize(p: &HermMatrixPolynomial, x: &[C64]) -> Vec<C64> {
    let q = p.leading().quad_form(x);
    if p.degree() <= 2 && q > 0.0 {
        let s = q.sqrt();
        x.iter().map(|v| v / s).collect()
    } else {
        unit(x)
    }
}

fn unit(x: &[C64]) -> Vec<C64> {
    let s = norm(x);
    x.iter().map(|v| v / s).collect()
}

/// Reduction of `P(λ) v = 0` to a standard eigenproblem.
enum Linearization<'a> {
    /// Pencil with `−P(λ₋) = L L^H`: `L^{-1} A_0 L^{-H} w = θ w`, `λ = λ₋ + 1/θ`.
    Shifted { p: &'a HermMatrixPolynomial, chol: Cholesky, eig: crate::linalg::HermEig },
    /// Monic companion form with `λ = s μ` (after scaling by `s`).
    Companion { p: &'a HermMatrixPolynomial, comp: CMatrix, back: Back, s: f64 },
}

enum Back {
    Cholesky(Cholesky),
    Lu,
}

impl<'a> Linearization<'a> {
    fn new(p: &'a HermMatrixPolynomial) -> Result<Self> {
        let lower = p.interval().lower;
        if p.degree() == 1 {
            if let Ok(chol) = Cholesky::new(&p.eval(lower).scaled(-1.0)) {
                let eig = herm_eig(&chol.reduce(p.leading()))?;
                return Ok(Linearization::Shifted { p, chol, eig });
            }
        }
        let k = p.n();
        let m = p.degree();
        let (monic, back): (Vec<CMatrix>, Back) = match Cholesky::new(p.leading()) {
            Ok(chol) => (p.coeffs()[1..].iter().map(|c| chol.reduce(c).into_matrix()).collect(), Back::Cholesky(chol)),
            Err(_) => {
                let tol = 1e-14 * p.leading().norm_one();
                let lu = Lu::new(p.leading().as_matrix(), tol)?;
                let solved = p.coeffs()[1..]
                    .iter()
                    .map(|c| {
                        let cols: Vec<Vec<C64>> = c.as_matrix().columns().iter().map(|col| lu.solve(col)).collect();
                        CMatrix::from_columns(k, &cols)
                    })
                    .collect();
                (solved, Back::Lu)
            }
        };
        // λ = s μ balances the blocks: coefficient j picks up s^{-j}
        let tail = monic[m - 1].max_abs();
        let s = if tail > 0.0 { tail.powf(1.0 / m as f64) } else { 1.0 };
        let mut comp = CMatrix::zeros(m * k, m * k);
        for (j, c) in monic.iter().enumerate() {
            let w = s.powi(-(j as i32 + 1));
            for r in 0..k {
                for col in 0..k {
                    comp[(r, j * k + col)] = -c[(r, col)] * w;
                }
            }
        }
        for b in 1..m {
            for r in 0..k {
                comp[(b * k + r, (b - 1) * k + r)] = ONE;
            }
        }
        Ok(Linearization::Companion { p, comp, back, s })
    }

    fn eigenvalues(&self) -> Result<Vec<C64>> {
        match self {
            Linearization::Shifted { p, eig, .. } => {
                let lower = p.interval().lower;
                let big = eig.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
                Ok(eig
                    .values
                    .iter()
                    .map(|&t| {
                        if t.abs() <= 1e-14 * big {
                            C64::new(f64::INFINITY, 0.0)
                        } else {
                            C64::new(lower + 1.0 / t, 0.0)
                        }
                    })
                    .collect())
            }
            Linearization::Companion { comp, s, .. } => {
                Ok(eigvals_general(comp)?.into_iter().map(|mu| mu * *s).collect())
            }
        }
    }

    fn eigenvector(&self, lam: C64) -> Result<Vec<C64>> {
        match self {
            Linearization::Shifted { p, chol, eig } => {
                let lower = p.interval().lower;
                let target = if lam.re.is_finite() { 1.0 / (lam.re - lower) } else { 0.0 };
                let idx = (0..eig.values.len())
                    .min_by(|&a, &b| (eig.values[a] - target).abs().total_cmp(&(eig.values[b] - target).abs()))
                    .ok_or(Error::EmptyBasis)?;
                Ok(chol.backward(&eig.vector(idx)))
            }
            Linearization::Companion { p, comp, back, s } => {
                let k = p.n();
                let v = null_vector_general(comp, lam / *s)?;
                let block = (0..p.degree())
                    .max_by(|&a, &b| norm(&v[a * k..(a + 1) * k]).total_cmp(&norm(&v[b * k..(b + 1) * k])))
                    .expect("degree at least 1");
                let w = &v[block * k..(block + 1) * k];
                Ok(match back {
                    Back::Cholesky(chol) => chol.backward(w),
                    Back::Lu => w.to_vec(),
                })
            }
        }
    }
}

/// Unit vector spanning the (numerical) null space of a Hermitian matrix.
fn null_vector(h: &HermMatrix) -> Result<Vec<C64>> {
    let eig = herm_eig(h)?;
    let idx = (0..eig.values.len())
        .min_by(|&a, &b| eig.values[a].abs().total_cmp(&eig.values[b].abs()))
        .ok_or(Error::EmptyBasis)?;
    Ok(eig.vector(idx))
}

/// Smallest eigenvalue of positive type of the projected problem in the
/// interval, refined by Rayleigh-functional iteration on the small problem.
pub fn select_smallest_proper(p: &ProjectedPolynomial) -> Result<RitzSelection> {
    let poly = &p.poly;
    let interval = poly.interval();
    let slack = 1e-14 * (1.0 + interval.lower.abs());
    let mut candidates: Vec<f64> = eigenvalues(poly)?
        .into_iter()
        .filter(|z| z.im.abs() <= 1e-10 * (1.0 + z.re.abs()) && interval.contains_with_slack(z.re, slack))
        .map(|z| z.re)
        .collect();
    candidates.sort_by(f64::total_cmp);

    let mut proper: Vec<(f64, Vec<C64>, f64)> = Vec::new();
    for &mu in &candidates {
        let y = null_vector(&poly.eval(mu))?;
        let sigma = poly.eval_derivative(mu).quad_form(&y);
        if sigma > 0.0 {
            if let Some((first, _, _)) = proper.first() {
                if mu - first > 1e-10 * (1.0 + first.abs()) {
                    break;
                }
            }
            proper.push((mu, y, sigma));
        }
    }
    let (mut rho, mut y) = proper
        .into_iter()
        .max_by(|a, b| a.2.total_cmp(&b.2))
        .map(|(mu, y, _)| (mu, y))
        .ok_or(Error::NoRitzValue)?;

    let mut best: Option<(f64, Vec<C64>)> = None;
    for _ in 0..6 {
        let Ok(r) = scalar_root(&poly.scalar_coeffs(&y), interval) else { break };
        let improved = best.as_ref().is_none_or(|(b, _)| r < *b);
        if improved {
            best = Some((r, y.clone()));
        }
        if (r - rho).abs() <= 4.0 * f64::EPSILON * (1.0 + r.abs()) || !improved {
            break;
        }
        rho = r;
        y = null_vector(&poly.eval(rho))?;
    }
    let (rho, y) = best.ok_or(Error::NoRitzValue)?;

    // Z is orthonormal, so the constraint on x = Z y is the projected one on y
    let y = constraint_normalize(poly, &y);
    let x = p.lift(&y);
    let sigma = scalar_derivative(&poly.scalar_coeffs(&y), rho);
    if !(sigma > 0.0) {
        return Err(Error::NoRitzValue);
    }
    let galerkin = norm(&poly.apply(rho, &y));
    if galerkin > 1e-9 * poly.coefficient_scale(rho) * norm(&y) {
        return Err(Error::AssumptionViolated("Galerkin condition fails after Ritz refinement"));
    }
    Ok(RitzSelection { rho, y, x, sigma })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random, HermMatrix};
    use crate::matpoly::Interval;
    use crate::problems;
    use crate::verify;

    fn e(n: usize, k: usize) -> Vec<C64> {
        let mut v = vec![ZERO; n];
        v[k] = ONE;
        v
    }

    #[test]
    fn full_basis_pencil_picks_smallest() {
        let f = HermMatrixPolynomial::pencil(
            HermMatrix::identity(3),
            HermMatrix::from_real_diag(&[3.0, 1.0, 2.0]),
            Interval::unbounded_above(0.0),
        )
        .unwrap();
        let basis: Vec<Vec<C64>> = (0..3).map(|k| e(3, k)).collect();
        let p = project(&f, &basis).unwrap();
        let s = select_smallest_proper(&p).unwrap();
        assert!((s.rho - 1.0).abs() < 1e-14);
        assert!((s.x[1].norm() - 1.0).abs() < 1e-14);
        assert!(s.x[0].norm() < 1e-14 && s.x[2].norm() < 1e-14);
    }

    #[test]
    fn hyperbolic_full_basis_matches_known() {
        let b = problems::prescribed_hyperbolic_with_basis(&[1.0, 2.0], &[-1.0, -2.0], &CMatrix::identity(2))
            .unwrap();
        let basis: Vec<Vec<C64>> = (0..2).map(|k| e(2, k)).collect();
        let p = project(&b.polynomial, &basis).unwrap();
        let s = select_smallest_proper(&p).unwrap();
        assert!((s.rho - 1.0).abs() < 1e-13);
        let mut vals: Vec<f64> = eigenvalues(&p.poly).unwrap().iter().map(|z| z.re).collect();
        vals.sort_by(f64::total_cmp);
        for (v, want) in vals.iter().zip([-2.0, -1.0, 1.0, 2.0]) {
            assert!((v - want).abs() < 1e-12, "{vals:?}");
        }
    }

    #[test]
    fn one_dimensional_subspace_is_rayleigh_functional() {
        let w = problems::wiresaw1(12, 0.2).unwrap();
        let f = &w.polynomial;
        let x = crate::linalg::normalized(&random::complex_vector(&mut random::rng(3), 12));
        let p = project(f, core::slice::from_ref(&x)).unwrap();
        let s = select_smallest_proper(&p).unwrap();
        let rho = crate::rayleigh::rayleigh_quotient(f, &x).unwrap();
        assert!((s.rho - rho).abs() <= 1e-12 * (1.0 + rho.abs()));
    }

    #[test]
    fn eigenpairs_have_small_residuals() {
        let w = problems::prescribed_hyperbolic(&[1.0, 1.5, 2.0, 3.0], &[-1.0, -0.5, -2.0, -4.0], 5).unwrap();
        let f = &w.polynomial;
        for (lam, v) in solve_small(f).unwrap() {
            assert!(lam.im.abs() <= 1e-10 * (1.0 + lam.re.abs()), "{lam}");
            let r = f.apply(lam.re, &v);
            assert!(norm(&r) <= 1e-10 * f.coefficient_scale(lam.re) * norm(&v), "{lam}");
        }
    }

    #[test]
    fn real_count_in_interval_matches_inertia() {
        let b = problems::definite_pencil(8, &[1.0, 2.0, 3.5], 4).unwrap();
        let f = &b.polynomial;
        let mu = 10.0;
        let lower = f.interval().lower;
        let in_range = eigenvalues(f).unwrap().iter().filter(|z| z.re > lower && z.re <= mu).count();
        assert_eq!(in_range, verify::count_eigs_upto(f, mu).unwrap());
        assert_eq!(in_range, 3);
    }

    #[test]
    fn galerkin_condition_on_random_subspace() {
        let w = problems::wiresaw1(20, 0.1).unwrap();
        let mut rng = random::rng(8);
        let z = crate::linalg::orthonormalize(&random::complex_matrix(&mut rng, 20, 4).columns(), 1e-12).unwrap();
        let p = project(&w.polynomial, &z.columns).unwrap();
        let s = select_smallest_proper(&p).unwrap();
        let r = w.polynomial.apply(s.rho, &s.x);
        let ztr: Vec<C64> = z.columns.iter().map(|c| crate::linalg::dot(c, &r)).collect();
        assert!(norm(&ztr) <= 1e-8 * w.polynomial.coefficient_scale(s.rho) * norm(&s.x));
        assert!(s.rho >= verify::bisect_lambda1(&w.polynomial, None, 1e-12).unwrap() - 1e-9);
    }
}
