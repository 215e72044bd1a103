//! Hermitian eigensolver: Householder reduction to real symmetric tridiagonal
//! form followed by implicit QL with Wilkinson-type shifts.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::{CMatrix, HermMatrix, C64, ONE, ZERO};
use crate::{Error, Result};

/// Eigen-decomposition `M = V diag(values) V^H` with ascending `values`.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: CMatrix,
}

impl HermEig {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }
}

/// Counts of negative, zero and positive eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct InertiaCount {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

impl InertiaCount {
    pub fn total(&self) -> usize {
        self.negative + self.zero + self.positive
    }
}

pub fn herm_eig(m: &HermMatrix) -> Result<HermEig> {
    let (values, vectors) = decompose(m, true)?;
    Ok(HermEig { values, vectors: vectors.expect("vectors requested") })
}

pub fn herm_eigvals(m: &HermMatrix) -> Result<Vec<f64>> {
    decompose(m, false).map(|(v, _)| v)
}

/// Inertia from eigenvalue signs, with zero band `1e-12·max|μ|`.
pub fn inertia(m: &HermMatrix) -> Result<InertiaCount> {
    let ev = herm_eigvals(m)?;
    let scale = ev.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let tol = 1e-12 * scale;
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

fn decompose(m: &HermMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<CMatrix>)> {
    let n = m.n();
    if n == 0 {
        return Ok((Vec::new(), want_vectors.then(|| CMatrix::zeros(0, 0))));
    }
    let mut a = m.as_matrix().clone();
    let mut q = want_vectors.then(|| CMatrix::identity(n));
    tridiagonalize(&mut a, q.as_mut());

    let mut d: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut e: Vec<f64> = (0..n).map(|i| if i + 1 < n { a[(i + 1, i)].re } else { 0.0 }).collect();
    let mut z = want_vectors.then(|| {
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        z
    });
    tql2(&mut d, &mut e, z.as_deref_mut(), n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let vectors = match (q, z) {
        (Some(q), Some(z)) => Some(CMatrix::from_fn(n, n, |i, k| {
            let col = order[k];
            (0..n).fold(ZERO, |acc, l| acc + q[(i, l)] * z[l * n + col])
        })),
        _ => None,
    };
    Ok((values, vectors))
}

/// Reduces `a` in place to `Q^H a Q` with real tridiagonal structure.
/// When `q` is given it is overwritten by `q · Q`.
fn tridiagonalize(a: &mut CMatrix, mut q: Option<&mut CMatrix>) {
    let n = a.rows();
    if n < 2 {
        return;
    }
    let mut v = vec![ZERO; n];
    for k in 0..n - 1 {
        let len = n - k - 1;
        let alpha = a[(k + 1, k)];
        let xnorm = (k + 2..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 && alpha.im == 0.0 {
            continue;
        }
        let mut beta = (alpha.norm_sqr() + xnorm * xnorm).sqrt();
        if alpha.re >= 0.0 {
            beta = -beta;
        }
        let tau = C64::new((beta - alpha.re) / beta, -alpha.im / beta);
        let inv = ONE / (alpha - beta);
        v[0] = ONE;
        for j in 1..len {
            v[j] = a[(k + 1 + j, k)] * inv;
        }
        let vs = &v[..len];

        // a ← H^H a with H = I − τ v v^H acting on rows k+1..n
        let ctau = tau.conj();
        for col in 0..n {
            let w = (0..len).fold(ZERO, |acc, i| acc + vs[i].conj() * a[(k + 1 + i, col)]);
            if w == ZERO {
                continue;
            }
            let f = ctau * w;
            for i in 0..len {
                a[(k + 1 + i, col)] -= vs[i] * f;
            }
        }
        apply_right(a, vs, k + 1, tau);
        if let Some(q) = q.as_deref_mut() {
            apply_right(q, vs, k + 1, tau);
        }

        a[(k + 1, k)] = C64::new(beta, 0.0);
        a[(k, k + 1)] = C64::new(beta, 0.0);
        for i in k + 2..n {
            a[(i, k)] = ZERO;
            a[(k, i)] = ZERO;
        }
    }
}

/// `m ← m (I − τ v v^H)` on columns `off..off+v.len()`.
fn apply_right(m: &mut CMatrix, v: &[C64], off: usize, tau: C64) {
    for row in 0..m.rows() {
        let u = (0..v.len()).fold(ZERO, |acc, j| acc + m[(row, off + j)] * v[j]);
        if u == ZERO {
            continue;
        }
        let f = tau * u;
        for j in 0..v.len() {
            m[(row, off + j)] -= f * v[j].conj();
        }
    }
}

/// Implicit QL on a symmetric tridiagonal matrix (`d` diagonal, `e[i]` the
/// entry below `d[i]`, `e[n-1] = 0`). Eigenvector rotations accumulate into
/// the row-major `z` when present.
fn tql2(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>, n: usize) -> Result<()> {
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let mut budget = 30 * n.max(1) + 30;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            loop {
                if budget == 0 {
                    return Err(Error::NonConvergence("tridiagonal QL"));
                }
                budget -= 1;
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        for k in 0..n {
                            let zk = &mut z[k * n..(k + 1) * n];
                            let h = zk[i + 1];
                            zk[i + 1] = s * zk[i] + c * h;
                            zk[i] = c * zk[i] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random;

    fn random_herm(seed: u64, n: usize) -> HermMatrix {
        let mut rng = random::rng(seed);
        HermMatrix::new(random::complex_matrix(&mut rng, n, n)).unwrap()
    }

    #[test]
    fn diagonal_is_sorted() {
        let ev = herm_eigvals(&HermMatrix::from_real_diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(ev, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn swap_matrix() {
        let m = HermMatrix::new(CMatrix::from_fn(2, 2, |i, j| if i == j { ZERO } else { ONE })).unwrap();
        let ev = herm_eigvals(&m).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_reconstruction_and_residuals() {
        for seed in 0..5 {
            let h = random_herm(seed, 8);
            let eig = herm_eig(&h).unwrap();
            let scale = eig.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
            let v = &eig.vectors;
            let lam = CMatrix::from_real_diag(&eig.values);
            let rec = v.matmul(&lam).matmul(&v.adjoint());
            assert!(rec.sub(h.as_matrix()).max_abs() <= 1e-10 * scale);
            let vhv = v.adjoint().matmul(v);
            assert!(vhv.sub(&CMatrix::identity(8)).max_abs() <= 1e-12);
            for k in 0..8 {
                let x = eig.vector(k);
                let hx = h.mul_vec(&x);
                let res: Vec<C64> = hx.iter().zip(&x).map(|(a, b)| a - b * eig.values[k]).collect();
                assert!(crate::linalg::norm(&res) <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn inertia_examples() {
        let i = inertia(&HermMatrix::from_real_diag(&[1.5, 0.5, -0.5])).unwrap();
        assert_eq!(i, InertiaCount { negative: 1, zero: 0, positive: 2 });
        let z = inertia(&HermMatrix::zeros(3)).unwrap();
        assert_eq!(z, InertiaCount { negative: 0, zero: 3, positive: 0 });
    }

    #[test]
    fn inertia_matches_eigenvalue_signs() {
        let h = random_herm(11, 8);
        let ev = herm_eigvals(&h).unwrap();
        let i = inertia(&h).unwrap();
        assert_eq!(i.negative, ev.iter().filter(|v| **v < 0.0).count());
        assert_eq!(i.positive, ev.iter().filter(|v| **v > 0.0).count());
        assert_eq!(i.total(), 8);
    }

    #[test]
    fn larger_matrix_with_clusters() {
        // repeated eigenvalues stress the deflation logic
        let mut rng = random::rng(3);
        let n = 40;
        let q = crate::linalg::orthonormalize(&random::complex_matrix(&mut rng, n, n).columns(), 1e-12)
            .unwrap();
        let qm = CMatrix::from_columns(n, &q.columns);
        let diag: Vec<f64> = (0..n).map(|i| (i / 4) as f64).collect();
        let h = HermMatrix::new(qm.matmul(&CMatrix::from_real_diag(&diag)).matmul(&qm.adjoint())).unwrap();
        let ev = herm_eigvals(&h).unwrap();
        let mut sorted = diag.clone();
        sorted.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(&sorted) {
            assert!((a - b).abs() < 1e-12 * 10.0);
        }
    }
}
