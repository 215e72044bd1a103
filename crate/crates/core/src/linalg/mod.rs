//! Dense complex kernels.
//!
//! Everything here works on small to mid-sized dense matrices (a few hundred
//! rows at most); there is no blocking and no BLAS.

mod eig;
mod factor;
mod orth;
mod schur;

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_traits::Float;

pub use eig::{herm_eig, herm_eigvals, inertia, HermEig, InertiaCount};
pub use factor::{solve_hermitian, Cholesky, Lu};
pub use orth::{orthonormalize, Orthonormalized};
pub use schur::{eigvals_general, null_vector_general};

pub type C64 = num_complex::Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// `x^H y`.
pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).fold(ZERO, |acc, (a, b)| acc + a.conj() * b)
}

pub fn norm(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(alpha: C64, x: &mut [C64]) {
    for v in x.iter_mut() {
        *v *= alpha;
    }
}

pub fn sub(x: &[C64], y: &[C64]) -> Vec<C64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

/// Returns `x / ‖x‖`; the zero vector is returned unchanged.
pub fn normalized(x: &[C64]) -> Vec<C64> {
    let nrm = norm(x);
    if nrm == 0.0 {
        return x.to_vec();
    }
    x.iter().map(|v| v / nrm).collect()
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> crate::Result<Self> {
        if data.len() != rows * cols {
            return Err(crate::Error::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        Ok(CMatrix { rows, cols, data })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: &[Vec<C64>]) -> Self {
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i])
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(*d, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<C64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols, "mul_vec dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).fold(ZERO, |acc, (a, b)| acc + a * b))
            .collect()
    }

    /// `A^H x`
    pub fn adjoint_mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.rows, "adjoint_mul_vec dimension mismatch");
        let mut out = vec![ZERO; self.cols];
        for (i, xi) in x.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * xi;
            }
        }
        out
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn scaled(&self, alpha: C64) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * alpha).collect() }
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        self.add(&other.scaled(-ONE))
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Square conjugate-symmetric matrix.
///
/// Construction from a general matrix replaces it by `(M + M^H)/2`, so round-off
/// asymmetry in the input is silently repaired and the diagonal is exactly real.
#[derive(Debug, Clone, PartialEq)]
pub struct HermMatrix(CMatrix);

impl HermMatrix {
    pub fn new(m: CMatrix) -> crate::Result<Self> {
        if !m.is_square() {
            return Err(crate::Error::DimensionMismatch { expected: m.rows, got: m.cols });
        }
        let n = m.rows;
        let mut h = m;
        for i in 0..n {
            h[(i, i)] = C64::new(h[(i, i)].re, 0.0);
            for j in 0..i {
                let avg = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
                h[(i, j)] = avg;
                h[(j, i)] = avg.conj();
            }
        }
        Ok(HermMatrix(h))
    }

    pub fn zeros(n: usize) -> Self {
        HermMatrix(CMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        HermMatrix(CMatrix::identity(n))
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        HermMatrix(CMatrix::from_real_diag(diag))
    }

    /// Builds from the lower triangle (`j <= i`) supplied by `f`.
    pub fn from_lower_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                if i == j {
                    m[(i, i)] = C64::new(v.re, 0.0);
                } else {
                    m[(i, j)] = v;
                    m[(j, i)] = v.conj();
                }
            }
        }
        HermMatrix(m)
    }

    pub fn n(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        self.0.mul_vec(x)
    }

    /// `x^H M x`, which is real for Hermitian `M`.
    pub fn quad_form(&self, x: &[C64]) -> f64 {
        dot(x, &self.mul_vec(x)).re
    }

    /// `x^H M y`
    pub fn bilinear(&self, x: &[C64], y: &[C64]) -> C64 {
        dot(x, &self.mul_vec(y))
    }

    /// `Z^H M Z` for a column set `Z`.
    pub fn congruence(&self, z: &[Vec<C64>]) -> HermMatrix {
        let mz: Vec<Vec<C64>> = z.iter().map(|c| self.mul_vec(c)).collect();
        HermMatrix::from_lower_fn(z.len(), |i, j| dot(&z[i], &mz[j]))
    }

    /// Congruence with a dense matrix: `W^H M W`.
    pub fn congruence_dense(&self, w: &CMatrix) -> HermMatrix {
        let prod = w.adjoint().matmul(&self.0).matmul(w);
        HermMatrix::new(prod).expect("square by construction")
    }

    /// `self + alpha * other` with real `alpha`.
    pub fn add_scaled(&self, alpha: f64, other: &HermMatrix) -> HermMatrix {
        assert_eq!(self.n(), other.n());
        let data = self.0.data.iter().zip(&other.0.data).map(|(a, b)| a + b * alpha).collect();
        HermMatrix(CMatrix { rows: self.0.rows, cols: self.0.cols, data })
    }

    pub fn scaled(&self, alpha: f64) -> HermMatrix {
        HermMatrix(self.0.scaled(C64::new(alpha, 0.0)))
    }

    pub fn norm_one(&self) -> f64 {
        self.0.norm_one()
    }

    pub fn norm_fro(&self) -> f64 {
        self.0.norm_fro()
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> crate::Result<f64> {
        let ev = herm_eigvals(self)?;
        Ok(ev.iter().map(|v| v.abs()).fold(0.0, f64::max))
    }

    pub fn is_zero(&self) -> bool {
        self.0.data.iter().all(|v| *v == ZERO)
    }
}

impl Index<(usize, usize)> for HermMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

/// Seeded random sampling.
pub mod random {
    use super::{CMatrix, C64};
    use alloc::vec::Vec;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal, Uniform};

    pub type Rng = ChaCha8Rng;

    pub fn rng(seed: u64) -> Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    pub fn normal(rng: &mut Rng) -> f64 {
        StandardNormal.sample(rng)
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform(rng: &mut Rng, lo: f64, hi: f64) -> f64 {
        Uniform::new(lo, hi).map_or(lo, |u| u.sample(rng))
    }

    pub fn complex_normal(rng: &mut Rng) -> C64 {
        let re = normal(rng);
        let im = normal(rng);
        C64::new(re, im)
    }

    pub fn complex_vector(rng: &mut Rng, n: usize) -> Vec<C64> {
        (0..n).map(|_| complex_normal(rng)).collect()
    }

    pub fn real_vector(rng: &mut Rng, n: usize) -> Vec<C64> {
        (0..n).map(|_| C64::new(normal(rng), 0.0)).collect()
    }

    pub fn complex_matrix(rng: &mut Rng, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
    }
}
