use nalgebra::DMatrix;

use super::{assemble_b_limit, is_hyperbolic, CoefficientSystem, End, HamiltonianAt};
use crate::error::{Error, Result};
use crate::linalg;
use crate::symplectic::{graph_matrix, LagrangianFrame};
use crate::{Real, Tolerances};

/// Spectral subspaces `V+` and `V-` of a hyperbolic `J B`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPair<T: Real> {
    pub plus: LagrangianFrame<T>,
    pub minus: LagrangianFrame<T>,
    /// `|S^2 - I|` for the computed matrix sign.
    pub sign_residual: T,
}

/// Matrix sign function by the scaled Newton iteration.
fn matrix_sign<T: Real>(a: &DMatrix<T>) -> Result<(DMatrix<T>, T)> {
    let dim = a.nrows();
    let mut s = a.clone();
    let mut scaled = true;
    for _ in 0..200 {
        let inv = s
            .clone()
            .try_inverse()
            .ok_or(Error::NotHyperbolic { margin: 0.0 })?;
        let mu = if scaled {
            let det = s.determinant().abs();
            if det > T::zero() && det.is_finite() {
                det.powf(-T::one() / T::of_usize(dim))
            } else {
                T::one()
            }
        } else {
            T::one()
        };
        let next = (&s * mu + inv / mu) * T::lit(0.5);
        let change = (&next - &s).norm();
        let size = next.norm();
        s = next;
        if change <= T::lit(1e-2) * size {
            scaled = false;
        }
        if change <= T::default_epsilon() * T::lit(1e3) * size {
            let id = DMatrix::<T>::identity(dim, dim);
            let residual = linalg::max_abs(&(&s * &s - id));
            return Ok((s, residual));
        }
    }
    Err(Error::NotHyperbolic { margin: 0.0 })
}

/// `V+(J B)` and `V-(J B)` for a hyperbolic Hamiltonian matrix.
pub fn spectral_subspaces<T: Real>(h: &HamiltonianAt<T>, tol: &Tolerances<T>) -> Result<SpectralPair<T>> {
    let (ok, margin) = is_hyperbolic(h, tol);
    if !ok {
        return Err(Error::NotHyperbolic {
            margin: margin.as_f64(),
        });
    }
    let n = h.n();
    let (s, residual) = matrix_sign(&h.jb)?;
    let id = DMatrix::<T>::identity(2 * n, 2 * n);
    let half = T::lit(0.5);
    let pick = |m: DMatrix<T>| -> Result<LagrangianFrame<T>> {
        let basis = linalg::range_basis(&m, T::lit(1e-6));
        if basis.ncols() != n {
            return Err(Error::NotHyperbolic {
                margin: margin.as_f64(),
            });
        }
        LagrangianFrame::new(basis, tol)
    };
    let plus = pick((&id + &s) * half)?;
    let minus = pick((&id - &s) * half)?;
    Ok(SpectralPair {
        plus,
        minus,
        sign_residual: residual,
    })
}

/// `(M, N)` with `V-(J B(+inf)) = span [M; I]` and `V+(J B(-inf)) = span [N; I]`.
pub fn graph_matrices_mn<T: Real>(
    sys: &CoefficientSystem<T>,
    lambda: T,
    tol: &Tolerances<T>,
) -> Result<(DMatrix<T>, DMatrix<T>)> {
    let plus = spectral_subspaces(&assemble_b_limit(sys, End::Plus, lambda)?, tol)?;
    let minus = spectral_subspaces(&assemble_b_limit(sys, End::Minus, lambda)?, tol)?;
    Ok((graph_matrix(&plus.minus, tol)?, graph_matrix(&minus.plus, tol)?))
}
