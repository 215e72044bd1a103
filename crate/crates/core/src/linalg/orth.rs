use alloc::vec::Vec;

use super::{axpy, dot, norm, C64};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct Orthonormalized {
    pub columns: Vec<Vec<C64>>,
    /// Indices (into the input) of the columns that survived.
    pub kept: Vec<usize>,
}

impl Orthonormalized {
    pub fn rank(&self) -> usize {
        self.columns.len()
    }
}

/// Gram–Schmidt with one full reorthogonalization pass.
///
/// A column is dropped when what remains after projection is at most
/// `drop_tol` times its original norm.
pub fn orthonormalize(v: &[Vec<C64>], drop_tol: f64) -> Result<Orthonormalized> {
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(v.len());
    let mut kept = Vec::new();
    for (idx, col) in v.iter().enumerate() {
        let orig = norm(col);
        if orig == 0.0 || !orig.is_finite() {
            continue;
        }
        let mut w = col.clone();
        for _ in 0..2 {
            for q in &columns {
                let c = dot(q, &w);
                axpy(-c, q, &mut w);
            }
        }
        let rem = norm(&w);
        if rem <= drop_tol * orig {
            continue;
        }
        for x in w.iter_mut() {
            *x /= rem;
        }
        columns.push(w);
        kept.push(idx);
    }
    if columns.is_empty() {
        return Err(Error::EmptyBasis);
    }
    Ok(Orthonormalized { columns, kept })
}
