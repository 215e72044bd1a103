//! Eigenvalues of general complex matrices (Hessenberg reduction followed by
//! single-shift QR) and eigenvectors by inverse iteration.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::{norm, CMatrix, Lu, C64, ONE, ZERO};
use crate::{Error, Result};

/// All eigenvalues of a square complex matrix, in no particular order.
pub fn eigvals_general(m: &CMatrix) -> Result<Vec<C64>> {
    assert!(m.is_square());
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = m.clone();
    hessenberg(&mut h);
    hessenberg_qr(&mut h)
}

fn hessenberg(a: &mut CMatrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        let tail = (k + 2..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>();
        if tail == 0.0 {
            continue;
        }
        let alpha = a[(k + 1, k)];
        let xnorm = (alpha.norm_sqr() + tail).sqrt();
        let phase = if alpha == ZERO { ONE } else { alpha / alpha.norm() };
        for i in 0..len {
            v[i] = a[(k + 1 + i, k)];
        }
        v[0] += phase * xnorm;
        let vs = &v[..len];
        let vn2: f64 = vs.iter().map(|x| x.norm_sqr()).sum();
        // P = I − 2 v v^H / (v^H v), Hermitian and unitary
        for col in k..n {
            let s = (0..len).fold(ZERO, |acc, i| acc + vs[i].conj() * a[(k + 1 + i, col)]);
            let f = s * (2.0 / vn2);
            for i in 0..len {
                a[(k + 1 + i, col)] -= vs[i] * f;
            }
        }
        for row in 0..n {
            let s = (0..len).fold(ZERO, |acc, j| acc + a[(row, k + 1 + j)] * vs[j]);
            let f = s * (2.0 / vn2);
            for j in 0..len {
                a[(row, k + 1 + j)] -= f * vs[j].conj();
            }
        }
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
}

fn hessenberg_qr(h: &mut CMatrix) -> Result<Vec<C64>> {
    let n = h.rows();
    let eps = f64::EPSILON;
    let hnorm = h.max_abs().max(f64::MIN_POSITIVE);
    let mut eig = vec![ZERO; n];
    let mut hi = n - 1;
    let mut iters = 0usize;
    let mut rot: Vec<(f64, C64)> = vec![(1.0, ZERO); n];
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let mut s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if s == 0.0 {
                s = hnorm;
            }
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iters = 0;
            continue;
        }
        iters += 1;
        if iters > 100 {
            return Err(Error::NonConvergence("Hessenberg QR"));
        }
        let mu = if iters.is_multiple_of(11) {
            // exceptional shift to break cycles
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for i in l..=hi {
            h[(i, i)] -= mu;
        }
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            rot[k] = (c, s);
            for j in k..=hi {
                let t1 = h[(k, j)];
                let t2 = h[(k + 1, j)];
                h[(k, j)] = t1 * c + s * t2;
                h[(k + 1, j)] = -s.conj() * t1 + t2 * c;
            }
        }
        for k in l..hi {
            let (c, s) = rot[k];
            for i in l..=(k + 1) {
                let t1 = h[(i, k)];
                let t2 = h[(i, k + 1)];
                h[(i, k)] = t1 * c + s.conj() * t2;
                h[(i, k + 1)] = -s * t1 + t2 * c;
            }
        }
        for i in l..=hi {
            h[(i, i)] += mu;
        }
    }
    eig[0] = h[(0, 0)];
    Ok(eig)
}

fn wilkinson(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let mean = (a + d) * 0.5;
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let e1 = mean + disc;
    let e2 = mean - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// Unitary `G = [c s; −s̄ c]` with real `c` such that `G [x; y] = [r; 0]`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    if y == ZERO {
        return (1.0, ZERO);
    }
    if x == ZERO {
        return (0.0, y.conj() / y.norm());
    }
    let ax = x.norm();
    let r = ax.hypot(y.norm());
    (ax / r, (x / ax) * y.conj() / r)
}

/// Unit vector `v` with `(M − μI) v ≈ 0`, by inverse iteration from a fixed
/// start. `μ` should be an eigenvalue of `M` to working accuracy.
pub fn null_vector_general(m: &CMatrix, mu: C64) -> Result<Vec<C64>> {
    let n = m.rows();
    let scale = m.max_abs().max(mu.norm()).max(f64::MIN_POSITIVE);
    let mut shifted = m.clone();
    for i in 0..n {
        shifted[(i, i)] -= mu;
    }
    let mut lu = Lu::new(&shifted, 0.0);
    let mut nudge = f64::EPSILON * scale;
    while lu.is_err() {
        for i in 0..n {
            shifted[(i, i)] -= C64::new(nudge, nudge);
        }
        nudge *= 10.0;
        lu = Lu::new(&shifted, 0.0);
        if nudge > 1e-6 * scale {
            break;
        }
    }
    let lu = lu?;
    let mut v: Vec<C64> = (0..n).map(|i| C64::new(1.0 + i as f64 / n as f64, 0.3)).collect();
    for _ in 0..3 {
        let w = lu.solve(&v);
        let nw = norm(&w);
        if !nw.is_finite() || nw == 0.0 {
            return Err(Error::NonConvergence("inverse iteration"));
        }
        v = w.iter().map(|x| x / nw).collect();
    }
    Ok(v)
}
