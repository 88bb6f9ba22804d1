//! Small dense complex linear algebra helpers shared across modules.
//!
//! Decompositions (SVD, LU) are delegated to nalgebra; this module adds the
//! pieces that need a fixed deterministic construction: Householder
//! triangularization for kernel extraction and random unitaries built from
//! Householder reflections.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::rng::CounterRng;
use crate::C64;

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("matrix must have exactly one more column than rows")]
    Shape,
    #[error("numerical kernel dimension is not 1")]
    Degenerate,
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    let svd = m.clone().svd(false, false);
    let mut values: Vec<f64> = svd.singular_values.iter().copied().collect();
    values.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
    values
}

pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn frobenius_norm(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Relative threshold below which a matrix counts as numerically singular:
/// smallest singular value at most `1e-14` times the largest.
pub const SINGULARITY_RATIO: f64 = 1e-14;

pub fn is_numerically_singular(m: &DMatrix<C64>) -> bool {
    let sv = singular_values(m);
    match (sv.first(), sv.last()) {
        (Some(&max), Some(&min)) => max == 0.0 || min <= SINGULARITY_RATIO * max,
        _ => true,
    }
}

/// Unit kernel vector of an `n x (n+1)` matrix, computed by Householder
/// triangularization of the conjugate transpose. Fails if the numerical
/// kernel dimension is not exactly 1 (relative threshold `1e-12` on the
/// triangular diagonal).
pub fn kernel_vector(m: &DMatrix<C64>) -> Result<DVector<C64>, KernelError> {
    if m.ncols() != m.nrows() + 1 {
        return Err(KernelError::Shape);
    }
    let rows = m.ncols();
    let cols = m.nrows();
    let mut work = m.adjoint();
    // Reflector k is (u, ||u||^2), acting on rows k.. of the workspace.
    let mut reflectors: Vec<Option<(DVector<C64>, f64)>> = Vec::with_capacity(cols);
    let mut r_diag = Vec::with_capacity(cols);
    for k in 0..cols {
        let x: DVector<C64> = work.view((k, k), (rows - k, 1)).column(0).clone_owned();
        let norm = x.norm();
        if norm == 0.0 {
            reflectors.push(None);
            r_diag.push(0.0);
            continue;
        }
        let alpha = x[0];
        let phase = if alpha.norm() > 0.0 {
            alpha / alpha.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let beta = -phase * norm;
        let mut u = x;
        u[0] -= beta;
        let u_norm_sq = u.norm_squared();
        if u_norm_sq > 0.0 {
            for j in k..cols {
                let mut col = work.view_mut((k, j), (rows - k, 1));
                let snapshot: DVector<C64> = col.column(0).clone_owned();
                let w = u.dotc(&snapshot) * (2.0 / u_norm_sq);
                col.zip_apply(&u, |c, ui| *c -= w * ui);
            }
        }
        reflectors.push(Some((u, u_norm_sq)));
        r_diag.push(work[(k, k)].norm());
    }
    let max_diag = r_diag.iter().cloned().fold(0.0f64, f64::max);
    let min_diag = r_diag.iter().cloned().fold(f64::INFINITY, f64::min);
    if max_diag == 0.0 || min_diag <= 1e-12 * max_diag {
        return Err(KernelError::Degenerate);
    }
    // The kernel is spanned by the last column of the full Q factor.
    let mut v = DVector::from_element(rows, C64::new(0.0, 0.0));
    v[rows - 1] = C64::new(1.0, 0.0);
    for k in (0..cols).rev() {
        if let Some((u, u_norm_sq)) = &reflectors[k] {
            let tail = v.rows(k, rows - k).clone_owned();
            let w = u.dotc(&tail) * (2.0 / u_norm_sq);
            let mut tail_mut = v.rows_mut(k, rows - k);
            tail_mut.zip_apply(u, |c, ui| *c -= w * ui);
        }
    }
    Ok(v)
}

/// Random unitary built as a product of `dim` Householder reflections with
/// Gaussian normal vectors.
pub fn random_unitary(dim: usize, rng: &mut CounterRng) -> DMatrix<C64> {
    let mut u = DMatrix::identity(dim, dim);
    for _ in 0..dim {
        let v = DVector::from_iterator(dim, (0..dim).map(|_| rng.complex_gaussian(1.0)));
        let norm_sq = v.norm_squared();
        if norm_sq == 0.0 {
            continue;
        }
        // u <- (I - 2 v v^H / ||v||^2) u
        let vh_u = v.adjoint() * &u;
        u -= &v * vh_u * C64::new(2.0 / norm_sq, 0.0);
    }
    u
}
