//! Dense symmetric eigendecomposition.
//!
//! The matrix is first split into its connected blocks (exact zeros in the
//! off-diagonal pattern), and each block goes through nalgebra's implicit-shift
//! symmetric QR. Decoupled problems therefore keep exact block eigenvalues,
//! independent of the size of the surrounding matrix.

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

use crate::hamiltonian::SymmetricMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("empty matrix")]
    Empty,
    #[error("eigensolver did not reach residual {target:e} (got {residual:e})")]
    NoConvergence { residual: f64, target: f64 },
}

/// Ascending eigenvalues with orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub dim: usize,
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[i]` belongs to `eigenvalues[i]`.
    pub eigenvectors: Vec<Vec<f64>>,
    /// `max_i ||A v_i - lambda_i v_i||`.
    pub residual_norm: f64,
}

fn connected_blocks(matrix: &SymmetricMatrix) -> Vec<Vec<usize>> {
    let dim = matrix.dim();
    let mut label = vec![usize::MAX; dim];
    let mut blocks = Vec::new();
    let mut stack = Vec::new();
    for start in 0..dim {
        if label[start] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let mut members = vec![];
        label[start] = id;
        stack.push(start);
        while let Some(i) = stack.pop() {
            members.push(i);
            for j in 0..dim {
                if label[j] == usize::MAX && matrix.get(i, j) != 0.0 {
                    label[j] = id;
                    stack.push(j);
                }
            }
        }
        members.sort_unstable();
        blocks.push(members);
    }
    blocks
}

/// Flips the vector so its largest-magnitude component (first one on ties) is positive.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

pub fn eigh_symmetric(matrix: &SymmetricMatrix) -> Result<EigenDecomposition, EigenError> {
    let dim = matrix.dim();
    if dim == 0 {
        return Err(EigenError::Empty);
    }
    if matrix.entries().iter().any(|x| !x.is_finite()) {
        return Err(EigenError::NonFinite);
    }

    // (eigenvalue, block id, position in block, full-length vector)
    let mut pairs: Vec<(f64, usize, usize, Vec<f64>)> = Vec::with_capacity(dim);
    let mut residual_norm = 0.0f64;
    let mut max_abs = 0.0f64;

    for (block_id, members) in connected_blocks(matrix).into_iter().enumerate() {
        let size = members.len();
        let sub = DMatrix::from_fn(size, size, |r, c| matrix.get(members[r], members[c]));
        let eig = SymmetricEigen::try_new(sub.clone(), f64::EPSILON, 1000 * size.max(8)).ok_or(
            EigenError::NoConvergence {
                residual: f64::INFINITY,
                target: 0.0,
            },
        )?;
        let av = &sub * &eig.eigenvectors;
        for local in 0..size {
            let lambda = eig.eigenvalues[local];
            let col = eig.eigenvectors.column(local);
            let res = (av.column(local) - col * lambda).norm();
            residual_norm = residual_norm.max(res);
            max_abs = max_abs.max(lambda.abs());
            let mut full = vec![0.0; dim];
            for (r, &idx) in members.iter().enumerate() {
                full[idx] = col[r];
            }
            pairs.push((lambda, block_id, local, full));
        }
    }

    let target = 1e-9 * (1.0 + max_abs);
    if residual_norm > target {
        return Err(EigenError::NoConvergence {
            residual: residual_norm,
            target,
        });
    }

    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut eigenvalues = Vec::with_capacity(dim);
    let mut eigenvectors = Vec::with_capacity(dim);
    for (lambda, _, _, mut v) in pairs {
        fix_sign(&mut v);
        eigenvalues.push(lambda);
        eigenvectors.push(v);
    }
    Ok(EigenDecomposition {
        dim,
        eigenvalues,
        eigenvectors,
        residual_norm,
    })
}
