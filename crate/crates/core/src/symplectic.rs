//! Symplectic linear algebra on `(R^{2n}, omega)`.
//!
//! Points are ordered `(p, q)` with the momentum block first, so the Dirichlet
//! Lagrangian `L_D = R^n x {0}` is the span of the first `n` unit vectors.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::{Real, Tolerances};

/// The standard symplectic matrix `J = [[0, -I], [I, 0]]`.
pub fn standard_j<T: Real>(n: usize) -> DMatrix<T> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = -T::one();
        j[(n + i, i)] = T::one();
    }
    j
}

/// `omega(u, v) = <J u, v>`.
pub fn omega<T: Real>(u: &DVector<T>, v: &DVector<T>) -> Result<T> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    if !u.len().is_multiple_of(2) {
        return Err(Error::DimensionMismatch {
            expected: u.len() + 1,
            got: u.len(),
        });
    }
    let n = u.len() / 2;
    Ok(omega_unchecked(u.as_slice(), v.as_slice(), n))
}

#[inline]
pub(crate) fn omega_unchecked<T: Real>(u: &[T], v: &[T], n: usize) -> T {
    // J u = (-u_q, u_p)
    let mut acc = T::zero();
    for i in 0..n {
        acc += u[i] * v[n + i] - u[n + i] * v[i];
    }
    acc
}

/// `X^T J Y`, the matrix of `omega` between the columns of two frames.
pub fn omega_matrix<T: Real>(x: &DMatrix<T>, y: &DMatrix<T>) -> DMatrix<T> {
    let n = x.nrows() / 2;
    DMatrix::from_fn(x.ncols(), y.ncols(), |i, j| {
        omega_unchecked(x.column(i).as_slice(), y.column(j).as_slice(), n)
    })
}

/// The standard structure on `R^{2n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticStructure<T: Real> {
    n: usize,
    j: DMatrix<T>,
}

impl<T: Real> SymplecticStructure<T> {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            j: standard_j(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j(&self) -> &DMatrix<T> {
        &self.j
    }

    pub fn omega(&self, u: &DVector<T>, v: &DVector<T>) -> Result<T> {
        if u.len() != 2 * self.n {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.n,
                got: u.len(),
            });
        }
        omega(u, v)
    }

    /// Max-norm defect of `phi^T J phi = J`.
    pub fn symplectic_defect(&self, phi: &DMatrix<T>) -> T {
        linalg::max_abs(&(phi.transpose() * &self.j * phi - &self.j))
    }
}

/// A linear subspace represented by an orthonormal basis (possibly empty).
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<T: Real> {
    basis: DMatrix<T>,
}

impl<T: Real> Subspace<T> {
    /// Orthonormal basis of the span of `spanning`, rank decided by `rel_tol`.
    pub fn span_of(spanning: &DMatrix<T>, rel_tol: T) -> Self {
        Self {
            basis: linalg::range_basis(spanning, rel_tol),
        }
    }

    /// Wraps a matrix that already has orthonormal columns.
    pub fn from_orthonormal(basis: DMatrix<T>) -> Self {
        Self { basis }
    }

    pub fn zero(ambient: usize) -> Self {
        Self {
            basis: DMatrix::zeros(ambient, 0),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<T> {
        &self.basis
    }

    /// `self + other`.
    pub fn sum(&self, other: &Self, rel_tol: T) -> Self {
        Self::span_of(&linalg::hcat(&self.basis, &other.basis), rel_tol)
    }

    /// Distance of `v` from the subspace.
    pub fn residual(&self, v: &DVector<T>) -> T {
        let proj = &self.basis * (self.basis.transpose() * v);
        (v - proj).norm()
    }
}

/// Intersection of two subspaces together with an orthonormal basis of it.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceIntersection<T: Real> {
    pub dim: usize,
    pub basis: DMatrix<T>,
}

impl<T: Real> SubspaceIntersection<T> {
    pub fn as_subspace(&self) -> Subspace<T> {
        Subspace::from_orthonormal(self.basis.clone())
    }
}

/// Intersection of two subspaces via the null space of `[A, -B]`.
///
/// Null vectors `(x, y)` of the combined matrix satisfy `A x = B y`; their
/// images `A x` span the intersection. A singular value counts as zero when it
/// is at most `int_tol` times the largest one.
pub fn intersect_subspaces<T: Real>(a: &Subspace<T>, b: &Subspace<T>, int_tol: T) -> SubspaceIntersection<T> {
    let ambient = a.ambient();
    if a.dim() == 0 || b.dim() == 0 {
        return SubspaceIntersection {
            dim: 0,
            basis: DMatrix::zeros(ambient, 0),
        };
    }
    let combined = linalg::hcat(a.basis(), &(-b.basis()));
    let ns = linalg::null_space(&combined, int_tol);
    if ns.ncols() == 0 {
        return SubspaceIntersection {
            dim: 0,
            basis: DMatrix::zeros(ambient, 0),
        };
    }
    let coeffs = ns.rows(0, a.dim()).into_owned();
    let images = a.basis() * coeffs;
    let basis = linalg::range_basis(&images, int_tol);
    SubspaceIntersection {
        dim: basis.ncols(),
        basis,
    }
}

/// A Lagrangian subspace of `(R^{2n}, omega)` stored as an orthonormal
/// `2n x n` frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianFrame<T: Real> {
    n: usize,
    columns: DMatrix<T>,
}

impl<T: Real> LagrangianFrame<T> {
    /// Validates and orthonormalizes a `2n x n` frame.
    pub fn new(columns: DMatrix<T>, tol: &Tolerances<T>) -> Result<Self> {
        let rows = columns.nrows();
        let n = columns.ncols();
        if n == 0 || rows != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n.max(1),
                got: rows,
            });
        }
        let sv = linalg::singular_values(&columns);
        let smax = sv[0];
        let smin = sv[n - 1];
        if smax <= T::zero() || smin <= tol.rank_tol * smax {
            let ratio = if smax > T::zero() { smin / smax } else { T::zero() };
            return Err(Error::RankDeficient { ratio: ratio.as_f64() });
        }
        let cond = smax / smin;
        if cond > tol.cond_max {
            return Err(Error::IllConditioned { cond: cond.as_f64() });
        }
        let q = linalg::qr_orthonormalize(&columns);
        let defect = linalg::max_abs(&omega_matrix(&q, &q));
        if defect > tol.iso_tol {
            return Err(Error::NotIsotropic {
                defect: defect.as_f64(),
            });
        }
        Ok(Self { n, columns: q })
    }

    /// `L_D = R^n x {0}`.
    pub fn dirichlet(n: usize) -> Self {
        let mut c = DMatrix::zeros(2 * n, n);
        for i in 0..n {
            c[(i, i)] = T::one();
        }
        Self { n, columns: c }
    }

    /// `L_N = {0} x R^n`.
    pub fn neumann(n: usize) -> Self {
        let mut c = DMatrix::zeros(2 * n, n);
        for i in 0..n {
            c[(n + i, i)] = T::one();
        }
        Self { n, columns: c }
    }

    /// The graph frame `[M; I]` of a symmetric matrix.
    pub fn from_graph(m: &DMatrix<T>, tol: &Tolerances<T>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: m.ncols(),
            });
        }
        let frame = linalg::vcat(m, &DMatrix::identity(n, n));
        Self::new(frame, tol)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Orthonormal `2n x n` columns.
    pub fn columns(&self) -> &DMatrix<T> {
        &self.columns
    }

    /// Momentum block (first `n` rows).
    pub fn upper(&self) -> DMatrix<T> {
        self.columns.rows(0, self.n).into_owned()
    }

    /// Position block (last `n` rows).
    pub fn lower(&self) -> DMatrix<T> {
        self.columns.rows(self.n, self.n).into_owned()
    }

    pub fn subspace(&self) -> Subspace<T> {
        Subspace::from_orthonormal(self.columns.clone())
    }

    /// Max-norm of `F^T J F`.
    pub fn isotropy_defect(&self) -> T {
        linalg::max_abs(&omega_matrix(&self.columns, &self.columns))
    }

    /// Image under a linear map, re-validated.
    pub fn transform(&self, phi: &DMatrix<T>, tol: &Tolerances<T>) -> Result<Self> {
        if phi.nrows() != 2 * self.n || phi.ncols() != 2 * self.n {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.n,
                got: phi.nrows(),
            });
        }
        Self::new(phi * &self.columns, tol)
    }

    /// Whether both frames span the same subspace.
    pub fn same_subspace(&self, other: &Self, tol: &Tolerances<T>) -> bool {
        self.n == other.n && linalg::gap_sine(&self.columns, &other.columns) <= tol.int_tol
    }
}

fn check_same_n<T: Real>(a: &LagrangianFrame<T>, b: &LagrangianFrame<T>) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            got: b.n(),
        });
    }
    Ok(())
}

/// Numerically certified intersection of two Lagrangian subspaces.
pub fn intersect<T: Real>(
    a: &LagrangianFrame<T>,
    b: &LagrangianFrame<T>,
    tol: &Tolerances<T>,
) -> Result<SubspaceIntersection<T>> {
    check_same_n(a, b)?;
    Ok(intersect_subspaces(&a.subspace(), &b.subspace(), tol.int_tol))
}

/// `a ∩ b = {0}`.
pub fn is_transversal<T: Real>(a: &LagrangianFrame<T>, b: &LagrangianFrame<T>, tol: &Tolerances<T>) -> Result<bool> {
    Ok(intersect(a, b, tol)?.dim == 0)
}

/// Symmetric `M` with `span [M; I] = span(a)`; requires `a` transversal to `L_D`.
pub fn graph_matrix<T: Real>(a: &LagrangianFrame<T>, tol: &Tolerances<T>) -> Result<DMatrix<T>> {
    let x = a.lower();
    let y = a.upper();
    let sv = linalg::singular_values(&x);
    let smin = sv.last().copied().unwrap_or(T::zero());
    if smin <= tol.int_tol {
        return Err(Error::NotTransversal(format!(
            "frame must be transversal to L_D (lower block smallest singular value {:e})",
            smin.as_f64()
        )));
    }
    let xinv = x
        .try_inverse()
        .ok_or_else(|| Error::NotTransversal("frame must be transversal to L_D (lower block singular)".into()))?;
    let m = y * xinv;
    let scale = T::one().max(linalg::max_abs(&m));
    let defect = linalg::max_abs(&(&m - m.transpose()));
    if defect > tol.iso_tol * scale {
        return Err(Error::NotIsotropic {
            defect: defect.as_f64(),
        });
    }
    Ok(linalg::symmetrize(&m))
}
