//! Linear Hamiltonian systems `z' = J B_lambda(t) z` built from Morse–Sturm
//! coefficients, their hyperbolicity, spectral subspaces and invariant bundles.

mod bundle;
mod spectral;
mod system;

pub use bundle::{bundle, bundle_over, bundle_with, BundleKind, BundleOptions, InvariantBundle};
pub use spectral::{graph_matrices_mn, spectral_subspaces, SpectralPair};
pub use system::{CoefficientSystem, Constants, End, MatrixFn, ValidationReport};

use nalgebra::{Complex, DMatrix};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::symplectic::{standard_j, LagrangianFrame};
use crate::{Real, Tolerances};

/// Where a Hamiltonian matrix was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Evaluation {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
}

/// `B_lambda` at one time together with `J B_lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianAt<T: Real> {
    pub b: DMatrix<T>,
    pub jb: DMatrix<T>,
    pub at: Evaluation,
    pub lambda: T,
}

impl<T: Real> HamiltonianAt<T> {
    pub fn n(&self) -> usize {
        self.b.nrows() / 2
    }
}

/// `B = [[P^-1, -P^-1 Q], [-Q^T P^-1, Q^T P^-1 Q - R - lambda I]]`.
pub fn hamiltonian_from_blocks<T: Real>(
    p: &DMatrix<T>,
    q: &DMatrix<T>,
    r: &DMatrix<T>,
    lambda: T,
    at: Evaluation,
) -> Result<HamiltonianAt<T>> {
    let n = p.nrows();
    for m in [p, q, r] {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: m.nrows(),
            });
        }
    }
    let pinv = p
        .clone()
        .try_inverse()
        .filter(|inv| inv.iter().all(|x| x.is_finite()))
        .ok_or_else(|| Error::Singular("P must be invertible".into()))?;
    let pq = &pinv * q;
    let rl = r + DMatrix::identity(n, n) * lambda;
    let mut b = DMatrix::zeros(2 * n, 2 * n);
    b.view_mut((0, 0), (n, n)).copy_from(&pinv);
    b.view_mut((0, n), (n, n)).copy_from(&(-&pq));
    b.view_mut((n, 0), (n, n)).copy_from(&(-pq.transpose()));
    b.view_mut((n, n), (n, n)).copy_from(&(q.transpose() * &pq - rl));
    let b = linalg::symmetrize(&b);
    let jb = standard_j(n) * &b;
    Ok(HamiltonianAt { b, jb, at, lambda })
}

/// `B_lambda(t)` for a coefficient system.
pub fn assemble_b<T: Real>(sys: &CoefficientSystem<T>, t: T, lambda: T) -> Result<HamiltonianAt<T>> {
    let (p, q, r) = sys.eval(t);
    hamiltonian_from_blocks(&p, &q, &r, lambda, Evaluation::Finite(t.as_f64()))
}

/// `B_lambda(+-inf)` from the limit matrices.
pub fn assemble_b_limit<T: Real>(sys: &CoefficientSystem<T>, end: End, lambda: T) -> Result<HamiltonianAt<T>> {
    let (p, q, r) = sys.limits(end);
    let at = match end {
        End::Plus => Evaluation::PlusInfinity,
        End::Minus => Evaluation::MinusInfinity,
    };
    hamiltonian_from_blocks(p, q, r, lambda, at)
}

/// Eigenvalues of a general real square matrix.
pub fn complex_eigenvalues<T: Real>(m: &DMatrix<T>) -> Option<Vec<Complex<T>>> {
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), T::default_epsilon(), 100_000)?;
    Some(schur.complex_eigenvalues().iter().copied().collect())
}

/// Smallest `|Re mu|` over the eigenvalues `mu` of `J B`, and whether it exceeds `hyp_tol`.
pub fn is_hyperbolic<T: Real>(h: &HamiltonianAt<T>, tol: &Tolerances<T>) -> (bool, T) {
    match complex_eigenvalues(&h.jb) {
        Some(eig) => {
            let margin = eig.iter().map(|z| z.re.abs()).fold(T::max_value().unwrap(), |a, b| a.min(b));
            (margin > tol.hyp_tol, margin)
        }
        None => (false, T::zero()),
    }
}

/// Whether `det[a^2 P + i a (Q^T - Q) + R] != 0` for every real `a`.
///
/// The Hermitian pencil is realified to `a^2 P~ + a C~ + R~` and linearized;
/// a real root is a real eigenvalue of the companion matrix.
pub fn det_criterion<T: Real>(p: &DMatrix<T>, q: &DMatrix<T>, r: &DMatrix<T>) -> Result<bool> {
    let n = p.nrows();
    let k = q.transpose() - q;
    let zero = DMatrix::<T>::zeros(n, n);
    let pt = linalg::vcat(&linalg::hcat(p, &zero), &linalg::hcat(&zero, p));
    let rt = linalg::vcat(&linalg::hcat(r, &zero), &linalg::hcat(&zero, r));
    let ct = linalg::vcat(&linalg::hcat(&zero, &(-&k)), &linalg::hcat(&k, &zero));
    let pinv = pt
        .try_inverse()
        .ok_or_else(|| Error::Singular("P must be invertible".into()))?;
    let m = 2 * n;
    let mut comp = DMatrix::<T>::zeros(2 * m, 2 * m);
    comp.view_mut((0, m), (m, m)).copy_from(&DMatrix::identity(m, m));
    comp.view_mut((m, 0), (m, m)).copy_from(&(-(&pinv * rt)));
    comp.view_mut((m, m), (m, m)).copy_from(&(-(&pinv * ct)));
    let eig = complex_eigenvalues(&comp)
        .ok_or_else(|| Error::Singular("companion eigenvalues did not converge".into()))?;
    let thresh = T::lit(1e-7);
    Ok(eig.iter().all(|z| z.im.abs() > thresh * (T::one() + z.re.abs())))
}

/// `C2^2 / C1 + C3`: limits are hyperbolic for every larger shift.
pub fn threshold_identity_shift<T: Real>(c: &Constants<T>) -> T {
    c.c2 * c.c2 / c.c1 + c.c3
}

/// `2 C2^2 / C1 + C3`: the whole-line operator is non-degenerate from here on.
pub fn threshold_nondegeneracy<T: Real>(c: &Constants<T>) -> T {
    T::lit(2.0) * c.c2 * c.c2 / c.c1 + c.c3
}

/// `2 (C2 + C0)^2 / C1 + C3`: half-line operators are non-degenerate from here on.
pub fn threshold_boundary<T: Real>(c: &Constants<T>, c0: T) -> T {
    let s = c.c2 + c0;
    T::lit(2.0) * s * s / c.c1 + c.c3
}

/// The reduction of a boundary Lagrangian `L0 = span [Y; X]` to
/// `V(L0) = (L0 + L_D) ∩ L_N` and the form `A` with `y1 = A x`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData<T: Real> {
    /// Orthonormal basis of `V(L0)` viewed in `R^n` (`n x r`).
    pub v_basis: DMatrix<T>,
    /// Symmetric `r x r` matrix of `A` in that basis.
    pub a: DMatrix<T>,
    /// Spectral radius of `A`.
    pub c0: T,
}

impl<T: Real> BoundaryData<T> {
    pub fn dim(&self) -> usize {
        self.v_basis.ncols()
    }
}

pub fn boundary_constant<T: Real>(l0: &LagrangianFrame<T>, tol: &Tolerances<T>) -> BoundaryData<T> {
    let y = l0.upper();
    let x = l0.lower();
    let u = linalg::range_basis(&x, tol.int_tol);
    if u.ncols() == 0 {
        return BoundaryData {
            v_basis: u,
            a: DMatrix::zeros(0, 0),
            c0: T::zero(),
        };
    }
    let xp = x
        .clone()
        .pseudo_inverse(tol.int_tol * linalg::singular_values(&x)[0])
        .expect("pseudo inverse with non-negative eps");
    let a = linalg::symmetrize(&(u.transpose() * y * xp * &u));
    let c0 = linalg::sym_spectral_radius(&a);
    BoundaryData { v_basis: u, a, c0 }
}
