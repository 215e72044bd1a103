use alloc::vec::Vec;

use num_traits::Float;

use super::{CMatrix, HermMatrix, C64, ZERO};
use crate::{Error, Result};

/// `M = L L^H` for Hermitian positive definite `M`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: CMatrix,
}

impl Cholesky {
    pub fn new(m: &HermMatrix) -> Result<Self> {
        let n = m.n();
        let mut l = CMatrix::zeros(n, n);
        let scale = m.norm_one();
        for j in 0..n {
            let mut diag = m[(j, j)].re;
            for k in 0..j {
                diag -= l[(j, k)].norm_sqr();
            }
            if !(diag > 1e-14 * scale) || scale == 0.0 {
                return Err(Error::NotPositiveDefinite);
            }
            let ljj = diag.sqrt();
            l[(j, j)] = C64::new(ljj, 0.0);
            for i in j + 1..n {
                let mut s = m[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / ljj;
            }
        }
        Ok(Cholesky { l })
    }

    pub fn n(&self) -> usize {
        self.l.rows()
    }

    pub fn factor(&self) -> &CMatrix {
        &self.l
    }

    /// `L^{-1} b`
    pub fn forward(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n();
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for (k, yk) in y[..i].iter().enumerate() {
                s -= self.l[(i, k)] * yk;
            }
            y[i] = s / self.l[(i, i)];
        }
        y
    }

    /// `L^{-H} b`
    pub fn backward(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n();
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for (k, xk) in x.iter().enumerate().skip(i + 1) {
                s -= self.l[(k, i)].conj() * xk;
            }
            x[i] = s / self.l[(i, i)];
        }
        x
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        self.backward(&self.forward(b))
    }

    /// `L^{-1} H L^{-H}`, Hermitian whenever `H` is.
    pub fn reduce(&self, h: &HermMatrix) -> HermMatrix {
        let n = self.n();
        // columns of L^{-1} H, then rows through L^{-H}
        let cols: Vec<Vec<C64>> = (0..n).map(|j| self.forward(&h.as_matrix().column(j))).collect();
        let left = CMatrix::from_columns(n, &cols);
        let rows: Vec<Vec<C64>> = (0..n)
            .map(|i| {
                let row: Vec<C64> = left.row(i).iter().map(|v| v.conj()).collect();
                self.forward(&row).into_iter().map(|v| v.conj()).collect()
            })
            .collect();
        let full = CMatrix::from_fn(n, n, |i, j| rows[i][j]);
        HermMatrix::new(full).expect("square")
    }
}

/// `P M = L U` with partial pivoting, for general square complex `M`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
}

impl Lu {
    /// Fails with `SingularMatrix` when a pivot drops below `pivot_tol`.
    pub fn new(m: &CMatrix, pivot_tol: f64) -> Result<Self> {
        assert!(m.is_square());
        let n = m.rows();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pmax > pivot_tol) {
                return Err(Error::SingularMatrix { column: k, pivot: pmax.max(0.0) });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
            }
            let piv = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / piv;
                lu[(i, k)] = f;
                if f == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Lu { lu, perm })
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.rows();
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[(i, k)];
                x[i] = x[i] - l * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[(i, k)];
                x[i] = x[i] - u * x[k];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }
}

/// Solves `M x = b` for nonsingular Hermitian `M` (not necessarily definite).
pub fn solve_hermitian(m: &HermMatrix, b: &[C64]) -> Result<Vec<C64>> {
    if b.len() != m.n() {
        return Err(Error::DimensionMismatch { expected: m.n(), got: b.len() });
    }
    let tol = 1e-14 * m.norm_one();
    let lu = Lu::new(m.as_matrix(), tol)?;
    Ok(lu.solve(b))
}
