//! Sparse matrices of the grid operators, assembled from the same stencils
//! the matrix-free code applies.

use sprs::{CsMat, TriMat};

use crate::gridops::{apply_fd_line, laplacian_line, Axis, FdKind, GridSpec};

pub type Sparse = CsMat<f64>;

/// Matrix of a one-dimensional operator acting on `n_in` samples.
pub fn fd_matrix(kind: FdKind, n_in: usize, h: f64) -> Sparse {
    let n_out = kind.out_len(n_in);
    from_columns(n_in, n_out, |x, y| apply_fd_line(kind, h, x, y))
}

/// One-dimensional Neumann Laplacian on `n` cells.
pub fn laplacian_matrix_1d(n: usize, h: f64) -> Sparse {
    from_columns(n, n, |x, y| laplacian_line(h, x, y))
}

fn from_columns(n_in: usize, n_out: usize, apply: impl Fn(&[f64], &mut [f64])) -> Sparse {
    let mut tri = TriMat::new((n_out, n_in));
    let mut e = vec![0.0; n_in];
    let mut col = vec![0.0; n_out];
    for j in 0..n_in {
        e[j] = 1.0;
        apply(&e, &mut col);
        for (i, &v) in col.iter().enumerate() {
            if v != 0.0 {
                tri.add_triplet(i, j, v);
            }
        }
        e[j] = 0.0;
    }
    tri.to_csr()
}

pub fn identity(n: usize) -> Sparse {
    CsMat::eye(n)
}

pub fn diag(d: &[f64]) -> Sparse {
    let n = d.len();
    CsMat::new((n, n), (0..=n).collect(), (0..n).collect(), d.to_vec())
}

/// `A kron B` in the x-fastest layout: `B` acts along x, `A` along y.
pub fn kron(a: &Sparse, b: &Sparse) -> Sparse {
    sprs::kronecker_product(a.view(), b.view()).to_csr()
}

/// Lifts a 1D operator to act along `axis` of a field with extents
/// `(nx, ny)` (input extents).
pub fn along(op: &Sparse, axis: Axis, nx: usize, ny: usize) -> Sparse {
    match axis {
        Axis::X => kron(&identity(ny), op),
        Axis::Y => kron(op, &identity(nx)),
    }
}

/// Difference operator `kind` along `axis` for an input field of extents
/// `(nx, ny)`.
pub fn grid_op(kind: FdKind, axis: Axis, h: f64, nx: usize, ny: usize) -> Sparse {
    let n = match axis {
        Axis::X => nx,
        Axis::Y => ny,
    };
    along(&fd_matrix(kind, n, h), axis, nx, ny)
}

/// Cell-centered Neumann Laplacian on the grid.
pub fn laplacian_matrix(grid: &GridSpec) -> Sparse {
    let l = laplacian_matrix_1d(grid.m, grid.h);
    if grid.dim == 1 {
        l
    } else {
        let i = identity(grid.m);
        &kron(&i, &l) + &kron(&l, &i)
    }
}

/// Scales row `i` by `d[i]`.
pub fn scale_rows(a: &Sparse, d: &[f64]) -> Sparse {
    let mut out = a.to_csr();
    for (i, mut row) in out.outer_iterator_mut().enumerate() {
        for (_, v) in row.iter_mut() {
            *v *= d[i];
        }
    }
    out
}

/// Scales column `j` by `d[j]`.
pub fn scale_cols(a: &Sparse, d: &[f64]) -> Sparse {
    let mut out = a.to_csr();
    for mut row in out.outer_iterator_mut() {
        for (j, v) in row.iter_mut() {
            *v *= d[j];
        }
    }
    out
}

pub fn scaled(a: &Sparse, s: f64) -> Sparse {
    let mut out = a.clone();
    out.scale(s);
    out
}

/// `y = A x` for a CSR matrix.
pub fn matvec(a: &Sparse, x: &[f64], y: &mut [f64]) {
    debug_assert!(a.is_csr());
    for (i, row) in a.outer_iterator().enumerate() {
        y[i] = row.iter().map(|(j, v)| v * x[j]).sum();
    }
}

/// Assembles a square block matrix; `None` blocks are zero.
pub fn block(blocks: &[Vec<Option<&Sparse>>]) -> Sparse {
    let views: Vec<Vec<Option<sprs::CsMatView<'_, f64>>>> = blocks
        .iter()
        .map(|row| row.iter().map(|b| b.map(|m| m.view())).collect())
        .collect();
    sprs::bmat(&views).to_csr()
}

/// Copies a CSR matrix into a faer column-major sparse matrix.
pub fn to_faer(a: &Sparse) -> faer::sparse::SparseColMat<usize, f64> {
    let mut trip = Vec::with_capacity(a.nnz());
    for (i, row) in a.outer_iterator().enumerate() {
        for (j, &v) in row.iter() {
            trip.push(faer::sparse::Triplet::new(i, j, v));
        }
    }
    faer::sparse::SparseColMat::try_new_from_triplets(a.rows(), a.cols(), &trip)
        .expect("triplets within bounds")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_transpose_matches_transpose() {
        let h = 0.25;
        let d = fd_matrix(FdKind::Dual, 3, h);
        let dt = fd_matrix(FdKind::DualTranspose, 4, h);
        assert_eq!(d.transpose_view().to_csr(), dt);
        let a = fd_matrix(FdKind::Average, 4, h);
        let at = fd_matrix(FdKind::AverageTranspose, 3, h);
        assert_eq!(a.transpose_view().to_csr(), at);
    }

    #[test]
    fn laplacian_is_symmetric_with_zero_row_sums() {
        let g = GridSpec::new(2, 6).unwrap();
        let l = laplacian_matrix(&g);
        assert_eq!(l.transpose_view().to_csr(), l);
        let ones = vec![1.0; g.n_cells()];
        let mut y = vec![0.0; g.n_cells()];
        matvec(&l, &ones, &mut y);
        assert!(y.iter().all(|v| v.abs() < 1e-10));
    }
}
