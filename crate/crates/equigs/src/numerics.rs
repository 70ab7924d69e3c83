//! Dense linear algebra over ℂ with one declared tolerance policy.
//!
//! Every rank decision in the crate funnels through this module so that
//! kernels, images and quotients stay consistent with each other. Real-valued
//! problems are embedded as complex matrices with zero imaginary part.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// The scalar field: double-precision complex numbers.
pub type Scalar = Complex64;
/// Dense matrix over [`Scalar`].
pub type Mat = DMatrix<Scalar>;
/// Dense column vector over [`Scalar`].
pub type Vector = DVector<Scalar>;

/// Rank and residual cutoffs shared by every homology computation.
///
/// `rel` is the relative singular-value cutoff: singular values at or below
/// `rel * σ_max` are treated as zero. `abs` is an absolute residual cutoff,
/// scaled by the problem size where appropriate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-9, abs: 1e-8 }
    }
}

impl Tolerance {
    /// Absolute cutoff adjusted for a problem of the given scale
    /// (largest magnitude appearing in the input).
    pub fn abs_for(&self, scale: f64) -> f64 {
        self.abs * scale.max(1.0)
    }
}

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("sub is not contained in ambient: projection residual {residual:.3e} exceeds {cutoff:.3e}")]
    NotASubspace { residual: f64, cutoff: f64 },
}

/// An orthonormal set of columns spanning a subspace of ℂ^ambient_dim.
#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    pub ambient_dim: usize,
    /// Columns are orthonormal under the Hermitian inner product.
    pub basis: Mat,
}

impl SubspaceBasis {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn empty(ambient_dim: usize) -> Self {
        SubspaceBasis { ambient_dim, basis: Mat::zeros(ambient_dim, 0) }
    }

    /// The full space with the standard basis.
    pub fn full(ambient_dim: usize) -> Self {
        SubspaceBasis { ambient_dim, basis: Mat::identity(ambient_dim, ambient_dim) }
    }

    /// Orthogonal projector `B Bᴴ` onto the subspace.
    pub fn projector(&self) -> Mat {
        &self.basis * self.basis.adjoint()
    }

    /// Worst-case deviation of `BᴴB` from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.basis.adjoint() * &self.basis;
        let mut defect = 0.0f64;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let target = if i == j { Scalar::new(1.0, 0.0) } else { Scalar::new(0.0, 0.0) };
                defect = defect.max((g[(i, j)] - target).norm());
            }
        }
        defect
    }
}

/// Largest entry magnitude, used as the problem scale for residual cutoffs.
pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Singular value decomposition with rows padded so the full right factor is
/// available: returns `(singular values descending, U, V)` with `cols` values,
/// `U` of shape `rows × cols` (columns beyond the rank may be zero), and `V`
/// square `cols × cols`.
///
/// Both routes are one-sided Jacobi, specialized to real arithmetic when the
/// input has exactly zero imaginary part. nalgebra's bidiagonal SVD is not
/// used: on rank-deficient input it can return factors whose product is far
/// from the input matrix (for real and complex scalars alike), which the
/// Jacobi construction rules out — its left vectors are rotated input
/// columns and never leave the column span.
fn padded_svd(m: &Mat) -> (Vec<f64>, Mat, Mat) {
    let (rows, cols) = m.shape();
    let padded_rows = rows.max(cols);
    if max_imag(m) == 0.0 {
        let mut work = nalgebra::DMatrix::<f64>::zeros(padded_rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                work[(i, j)] = m[(i, j)].re;
            }
        }
        let (values, u, v) = jacobi_svd_real(&work);
        let u_out = Mat::from_fn(rows, cols, |i, j| Scalar::new(u[(i, j)], 0.0));
        let v_out = Mat::from_fn(cols, cols, |i, j| Scalar::new(v[(i, j)], 0.0));
        (values, u_out, v_out)
    } else {
        let mut work = Mat::zeros(padded_rows, cols);
        work.view_mut((0, 0), (rows, cols)).copy_from(m);
        let (values, u, v) = jacobi_svd(&work);
        (values, u.rows(0, rows).into_owned(), v)
    }
}

/// One-sided Jacobi SVD over the reals; see [`jacobi_svd`] for the scheme.
fn jacobi_svd_real(
    m: &nalgebra::DMatrix<f64>,
) -> (Vec<f64>, nalgebra::DMatrix<f64>, nalgebra::DMatrix<f64>) {
    let (rows, cols) = m.shape();
    let mut work = m.clone();
    let mut v = nalgebra::DMatrix::<f64>::identity(cols, cols);
    let eps = 1e-13;
    let floor_sq = {
        let frobenius_sq: f64 = m.iter().map(|x| x * x).sum();
        frobenius_sq * (f64::EPSILON * f64::EPSILON)
    };
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let mut a = 0.0f64;
                let mut b = 0.0f64;
                let mut c = 0.0f64;
                for r in 0..rows {
                    let x = work[(r, p)];
                    let y = work[(r, q)];
                    a += x * x;
                    b += y * y;
                    c += x * y;
                }
                for (norm_sq, col) in [(a, p), (b, q)] {
                    if norm_sq > 0.0 && norm_sq <= floor_sq {
                        for r in 0..rows {
                            work[(r, col)] = 0.0;
                        }
                    }
                }
                if a <= floor_sq || b <= floor_sq {
                    continue;
                }
                let magnitude = c.abs();
                if magnitude <= eps * (a * b).sqrt() || magnitude == 0.0 {
                    continue;
                }
                rotated = true;
                let sign = if c >= 0.0 { 1.0 } else { -1.0 };
                let tau = (b - a) / (2.0 * magnitude);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for r in 0..rows {
                    let x = work[(r, p)];
                    let y = work[(r, q)];
                    work[(r, p)] = cs * x - sn * sign * y;
                    work[(r, q)] = sn * sign * x + cs * y;
                }
                for r in 0..cols {
                    let x = v[(r, p)];
                    let y = v[(r, q)];
                    v[(r, p)] = cs * x - sn * sign * y;
                    v[(r, q)] = sn * sign * x + cs * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<(f64, usize)> = (0..cols).map(|k| (work.column(k).norm(), k)).collect();
    order.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite norms"));
    let values: Vec<f64> = order.iter().map(|&(s, _)| s).collect();
    let mut u = nalgebra::DMatrix::<f64>::zeros(rows, cols);
    let mut v_sorted = nalgebra::DMatrix::<f64>::zeros(cols, cols);
    for (out, &(sigma, k)) in order.iter().enumerate() {
        if sigma > 0.0 {
            for r in 0..rows {
                u[(r, out)] = work[(r, k)] / sigma;
            }
        }
        for r in 0..cols {
            v_sorted[(r, out)] = v[(r, k)];
        }
    }
    (values, u, v_sorted)
}

/// One-sided Jacobi SVD for complex matrices: rotate column pairs with
/// unitary 2×2 transforms until all pairs are orthogonal, then read off
/// `σ_k = ‖col_k‖` and `u_k = col_k / σ_k`. Returns `cols` singular values
/// in descending order, `U` (`rows × cols`, zero columns where σ vanishes)
/// and square `V` accumulated from the rotations.
fn jacobi_svd(m: &Mat) -> (Vec<f64>, Mat, Mat) {
    let (rows, cols) = m.shape();
    let mut work = m.clone();
    let mut v = Mat::identity(cols, cols);
    let eps = 1e-13;
    // Columns that fall below machine noise relative to the input are
    // rotated-out rank deficiency; zero them outright so denormal leftovers
    // cannot poison later rotations.
    let floor_sq = {
        let frobenius_sq: f64 = m.iter().map(|z| z.norm_sqr()).sum();
        frobenius_sq * (f64::EPSILON * f64::EPSILON)
    };
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let mut a = 0.0f64;
                let mut b = 0.0f64;
                let mut c = Scalar::new(0.0, 0.0);
                for r in 0..rows {
                    let x = work[(r, p)];
                    let y = work[(r, q)];
                    a += x.norm_sqr();
                    b += y.norm_sqr();
                    c += x.conj() * y;
                }
                for (norm_sq, col) in [(a, p), (b, q)] {
                    if norm_sq > 0.0 && norm_sq <= floor_sq {
                        for r in 0..rows {
                            work[(r, col)] = Scalar::new(0.0, 0.0);
                        }
                    }
                }
                if a <= floor_sq || b <= floor_sq {
                    continue;
                }
                let magnitude = c.norm();
                if magnitude <= eps * (a * b).sqrt() || magnitude == 0.0 {
                    continue;
                }
                rotated = true;
                // Pull the phase out of the off-diagonal Gram entry, then
                // apply the real Jacobi rotation that zeroes it.
                let phase = c / Scalar::new(magnitude, 0.0);
                let tau = (b - a) / (2.0 * magnitude);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = Scalar::new(1.0 / (1.0 + t * t).sqrt(), 0.0);
                let sn = cs * Scalar::new(t, 0.0);
                // Columns update: p' = cs·p − sn·phase̅·... derived from
                // orthogonalizing (p, e^{−iφ} q).
                for r in 0..rows {
                    let x = work[(r, p)];
                    let y = work[(r, q)];
                    work[(r, p)] = cs * x - sn * phase.conj() * y;
                    work[(r, q)] = sn * phase * x + cs * y;
                }
                for r in 0..cols {
                    let x = v[(r, p)];
                    let y = v[(r, q)];
                    v[(r, p)] = cs * x - sn * phase.conj() * y;
                    v[(r, q)] = sn * phase * x + cs * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<(f64, usize)> =
        (0..cols).map(|k| (work.column(k).norm(), k)).collect();
    order.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite norms"));
    let values: Vec<f64> = order.iter().map(|&(s, _)| s).collect();
    let mut u = Mat::zeros(rows, cols);
    let mut v_sorted = Mat::zeros(cols, cols);
    for (out, &(sigma, k)) in order.iter().enumerate() {
        if sigma > 0.0 {
            let scale = Scalar::new(1.0 / sigma, 0.0);
            for r in 0..rows {
                u[(r, out)] = work[(r, k)] * scale;
            }
        }
        for r in 0..cols {
            v_sorted[(r, out)] = v[(r, k)];
        }
    }
    (values, u, v_sorted)
}

/// Number of singular values above the relative cutoff.
fn rank_from(values: &[f64], tol: &Tolerance) -> usize {
    let sigma_max = values.first().copied().unwrap_or(0.0);
    if sigma_max == 0.0 {
        return 0;
    }
    values.iter().take_while(|&&s| s > tol.rel * sigma_max).count()
}

/// Orthonormal basis of the numerical null space of `m`.
pub fn kernel_basis(m: &Mat, tol: &Tolerance) -> SubspaceBasis {
    let cols = m.ncols();
    if cols == 0 {
        return SubspaceBasis::empty(0);
    }
    if m.nrows() == 0 || max_abs(m) == 0.0 {
        return SubspaceBasis::full(cols);
    }
    let (values, _, v) = padded_svd(m);
    let rank = rank_from(&values, tol);
    SubspaceBasis { ambient_dim: cols, basis: v.columns(rank, cols - rank).into_owned() }
}

/// Orthonormal basis of the numerical column space of `m`.
pub fn image_basis(m: &Mat, tol: &Tolerance) -> SubspaceBasis {
    let rows = m.nrows();
    if rows == 0 || m.ncols() == 0 || max_abs(m) == 0.0 {
        return SubspaceBasis::empty(rows);
    }
    let (values, u, _) = padded_svd(m);
    let rank = rank_from(&values, tol);
    SubspaceBasis { ambient_dim: rows, basis: u.columns(0, rank).into_owned() }
}

/// Kernel and image from a single decomposition, so that
/// `dim ker + dim im = cols` holds exactly as integers.
pub fn kernel_and_image(m: &Mat, tol: &Tolerance) -> (SubspaceBasis, SubspaceBasis) {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return (SubspaceBasis::empty(0), SubspaceBasis::empty(rows));
    }
    if rows == 0 || max_abs(m) == 0.0 {
        return (SubspaceBasis::full(cols), SubspaceBasis::empty(rows));
    }
    let (values, u, v) = padded_svd(m);
    let rank = rank_from(&values, tol);
    let kernel = SubspaceBasis { ambient_dim: cols, basis: v.columns(rank, cols - rank).into_owned() };
    let image = SubspaceBasis { ambient_dim: rows, basis: u.columns(0, rank).into_owned() };
    (kernel, image)
}

/// Numerical rank of `m`.
pub fn rank(m: &Mat, tol: &Tolerance) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 || max_abs(m) == 0.0 {
        return 0;
    }
    let (values, _, _) = padded_svd(m);
    rank_from(&values, tol)
}

/// Orthonormalize the columns of `m`, discarding numerically null directions.
pub fn orthonormal_columns(m: &Mat, tol: &Tolerance) -> SubspaceBasis {
    image_basis(m, tol)
}

/// Orthonormalize with an absolute singular-value floor in addition to the
/// relative cutoff. Used where genuine directions have unit-scale singular
/// values and spurious ones sit at machine noise, as for projections of
/// orthonormal bases onto invariant subspaces.
pub fn orthonormal_columns_floor(m: &Mat, tol: &Tolerance, floor: f64) -> SubspaceBasis {
    let rows = m.nrows();
    if rows == 0 || m.ncols() == 0 || max_abs(m) == 0.0 {
        return SubspaceBasis::empty(rows);
    }
    let (values, u, _) = padded_svd(m);
    let sigma_max = values.first().copied().unwrap_or(0.0);
    let cutoff = (tol.rel * sigma_max).max(floor);
    let rank = values.iter().take_while(|&&s| s > cutoff).count();
    SubspaceBasis { ambient_dim: rows, basis: u.columns(0, rank).into_owned() }
}

/// Orthonormal complement of the column space of `m` inside its row-count
/// space, with the dimension forced by the caller's rank bookkeeping: the
/// trailing right singular directions of `mᴴ` least represented in `im m`.
/// Near rank thresholds this keeps dimension counts exact where a
/// thresholded complement could drift by one.
pub fn image_complement_with_dim(m: &Mat, dim: usize) -> SubspaceBasis {
    let ambient = m.nrows();
    assert!(dim <= ambient);
    if dim == 0 {
        return SubspaceBasis::empty(ambient);
    }
    if m.ncols() == 0 || max_abs(m) == 0.0 {
        let basis = Mat::identity(ambient, ambient).columns(0, dim).into_owned();
        return SubspaceBasis { ambient_dim: ambient, basis };
    }
    let adjoint = m.adjoint();
    let (_, _, v) = padded_svd(&adjoint);
    SubspaceBasis { ambient_dim: ambient, basis: v.columns(ambient - dim, dim).into_owned() }
}

/// Orthonormal basis of the orthogonal complement of `sub` inside `ambient`.
///
/// Fails with [`NumericsError::NotASubspace`] when `sub` does not actually sit
/// inside `ambient` to within the absolute cutoff.
pub fn quotient_representatives(
    ambient: &SubspaceBasis,
    sub: &SubspaceBasis,
    tol: &Tolerance,
) -> Result<SubspaceBasis, NumericsError> {
    assert_eq!(ambient.ambient_dim, sub.ambient_dim, "bases live in the same space");
    if sub.dim() > 0 {
        let projected = ambient.projector() * &sub.basis;
        let residual = max_abs(&(&projected - &sub.basis));
        let cutoff = tol.abs_for(1.0);
        if residual > cutoff {
            return Err(NumericsError::NotASubspace { residual, cutoff });
        }
    }
    if sub.dim() == ambient.dim() {
        return Ok(SubspaceBasis::empty(ambient.ambient_dim));
    }
    // Project the ambient basis off the subspace, then orthonormalize.
    let off_sub = &ambient.basis - sub.projector() * &ambient.basis;
    Ok(orthonormal_columns(&off_sub, tol))
}

/// Minimum-norm least-squares solution of `m x = b` and the residual norm.
pub fn solve_ls(m: &Mat, b: &Vector, tol: &Tolerance) -> (Vector, f64) {
    assert_eq!(m.nrows(), b.len(), "rhs length matches rows");
    if m.ncols() == 0 {
        return (Vector::zeros(0), b.norm());
    }
    if m.nrows() == 0 {
        return (Vector::zeros(m.ncols()), 0.0);
    }
    if max_abs(m) == 0.0 {
        return (Vector::zeros(m.ncols()), b.norm());
    }
    let (values, u, v) = padded_svd(m);
    let rank = rank_from(&values, tol);
    let mut x = Vector::zeros(m.ncols());
    for k in 0..rank {
        let coeff = u.column(k).adjoint() * b;
        x += v.column(k) * (coeff[(0, 0)] / Scalar::new(values[k], 0.0));
    }
    let residual = (m * &x - b).norm();
    (x, residual)
}

/// Real matrix entries promoted to complex scalars.
pub fn real_mat(rows: usize, cols: usize, entries: &[f64]) -> Mat {
    assert_eq!(entries.len(), rows * cols);
    Mat::from_fn(rows, cols, |i, j| Scalar::new(entries[j * rows + i], 0.0))
}

/// Largest imaginary magnitude over all entries.
pub fn max_imag(m: &Mat) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.im.abs()))
}

/// Largest entry magnitude of a vector.
pub fn max_abs_vec(v: &Vector) -> f64 {
    v.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Independent rank oracle for tests: Gaussian elimination with partial
/// pivoting, sharing no code with the Jacobi decomposition it cross-checks.
#[cfg(test)]
pub(crate) fn rank_by_elimination(m: &Mat, eps: f64) -> usize {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let mut rank = 0;
    let mut col = 0;
    while rank < rows && col < cols {
        let mut pivot = rank;
        for r in rank..rows {
            if a[(r, col)].norm() > a[(pivot, col)].norm() {
                pivot = r;
            }
        }
        if a[(pivot, col)].norm() <= eps {
            col += 1;
            continue;
        }
        a.swap_rows(rank, pivot);
        let inv = Scalar::new(1.0, 0.0) / a[(rank, col)];
        for r in (rank + 1)..rows {
            let factor = a[(r, col)] * inv;
            for c in col..cols {
                let sub = factor * a[(rank, c)];
                a[(r, c)] -= sub;
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}
