//! Dense linear algebra helpers built on nalgebra's SVD, QR and symmetric
//! eigensolvers.

use nalgebra::DMatrix;

use crate::Real;

/// Thin singular value decomposition `m = u * diag(s) * v^T`.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    /// `rows x k` left factor; columns for zero singular values are zero.
    pub u: DMatrix<T>,
    /// Singular values in decreasing order.
    pub s: Vec<T>,
    /// `cols x k` right factor with orthonormal columns.
    pub v: DMatrix<T>,
}

const JACOBI_SWEEPS: usize = 80;

/// One-sided Jacobi SVD, with `k = min(rows, cols)`.
///
/// Jacobi rotations keep small singular values to high relative accuracy,
/// which the rank decisions below rely on.
pub fn svd<T: Real>(m: &DMatrix<T>) -> Svd<T> {
    if m.nrows() < m.ncols() {
        let t = svd(&m.transpose());
        return Svd { u: t.v, s: t.s, v: t.u };
    }
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut v = DMatrix::<T>::identity(cols, cols);
    let eps = T::default_epsilon();
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dot(&a.column(q));
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let sign = if zeta >= T::zero() { T::one() } else { -T::one() };
                let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for mat in [&mut a, &mut v] {
                    for i in 0..mat.nrows() {
                        let x = mat[(i, p)];
                        let y = mat[(i, q)];
                        mat[(i, p)] = c * x - s * y;
                        mat[(i, q)] = s * x + c * y;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<T> = (0..cols).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));
    let mut u = DMatrix::zeros(rows, cols);
    let mut vs = DMatrix::zeros(cols, cols);
    let mut s = Vec::with_capacity(cols);
    for (k, &j) in order.iter().enumerate() {
        let sj = norms[j];
        if sj > T::zero() {
            u.set_column(k, &(a.column(j) / sj));
        }
        vs.set_column(k, &v.column(j));
        s.push(sj);
    }
    Svd { u, s, v: vs }
}

/// Singular values in decreasing order (empty for an empty matrix).
pub fn singular_values<T: Real>(m: &DMatrix<T>) -> Vec<T> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    svd(m).s
}

/// Thin QR factor of `m`. Spans the column space when `m` has full column rank.
pub fn qr_orthonormalize<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    m.clone().qr().q()
}

/// Orthonormal basis of the column space, dropping directions whose singular
/// value is below `rel_tol` times the largest one.
pub fn range_basis<T: Real>(m: &DMatrix<T>, rel_tol: T) -> DMatrix<T> {
    let rows = m.nrows();
    if m.ncols() == 0 || rows == 0 {
        return DMatrix::zeros(rows, 0);
    }
    let d = svd(m);
    let smax = d.s.first().copied().unwrap_or(T::zero());
    if smax <= T::zero() {
        return DMatrix::zeros(rows, 0);
    }
    let keep: Vec<usize> = (0..d.s.len()).filter(|&i| d.s[i] > rel_tol * smax).collect();
    select_columns(&d.u, &keep)
}

/// Orthonormal basis of the null space of `m`, using a relative singular
/// value threshold. Wide matrices are padded with zero rows so that the full
/// right singular basis is available.
pub fn null_space<T: Real>(m: &DMatrix<T>, rel_tol: T) -> DMatrix<T> {
    let cols = m.ncols();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    let work = if m.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let d = svd(&work);
    let smax = d.s.first().copied().unwrap_or(T::zero());
    let keep: Vec<usize> = (0..d.s.len())
        .filter(|&i| d.s[i] <= rel_tol * smax || smax <= T::zero())
        .collect();
    select_columns(&d.v, &keep)
}

/// Minimum-norm least-squares solution of `a x = b` (columnwise), with
/// singular values below `rel_tol * smax` treated as zero.
pub fn min_norm_solve<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>, rel_tol: T) -> DMatrix<T> {
    if a.ncols() == 0 {
        return DMatrix::zeros(0, b.ncols());
    }
    let d = svd(a);
    let smax = d.s.first().copied().unwrap_or(T::zero());
    let mut ut_b = d.u.transpose() * b;
    for (i, &si) in d.s.iter().enumerate() {
        let scale = if si > rel_tol * smax && si > T::zero() {
            T::one() / si
        } else {
            T::zero()
        };
        ut_b.row_mut(i).scale_mut(scale);
    }
    &d.v * ut_b
}

pub fn select_columns<T: Real>(m: &DMatrix<T>, idx: &[usize]) -> DMatrix<T> {
    let mut out = DMatrix::zeros(m.nrows(), idx.len());
    for (j, &i) in idx.iter().enumerate() {
        out.set_column(j, &m.column(i));
    }
    out
}

pub fn hcat<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    assert_eq!(a.nrows(), b.nrows());
    let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    out
}

pub fn vcat<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    assert_eq!(a.ncols(), b.ncols());
    let mut out = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), 0), b.shape()).copy_from(b);
    out
}

/// Element-wise max norm.
pub fn max_abs<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()))
}

/// Symmetric part `(m + m^T) / 2`.
pub fn symmetrize<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    (m + m.transpose()) * T::lit(0.5)
}

/// Eigenvalues of a symmetric matrix in increasing order.
pub fn sym_eigenvalues<T: Real>(m: &DMatrix<T>) -> Vec<T> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut e: Vec<T> = symmetrize(m).symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    e
}

/// Spectral radius of a symmetric matrix (0 for an empty one).
pub fn sym_spectral_radius<T: Real>(m: &DMatrix<T>) -> T {
    sym_eigenvalues(m)
        .into_iter()
        .fold(T::zero(), |a, x| a.max(x.abs()))
}

/// Sine of the smallest principal angle between two orthonormal bases of
/// equal dimension, read off `(I - A A^T) B`. Zero means the subspaces intersect.
pub fn min_angle_sine<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> T {
    let s = singular_values(&(b - a * (a.transpose() * b)));
    s.last().copied().unwrap_or(T::one()).min(T::one())
}

/// Sine of the largest principal angle between two orthonormal bases of equal
/// dimension; the gap distance between the subspaces.
pub fn gap_sine<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> T {
    let s = singular_values(&(b - a * (a.transpose() * b)));
    s.first().copied().unwrap_or(T::zero()).min(T::one())
}
