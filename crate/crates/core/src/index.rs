//! The form `Q(alpha, beta; delta)`, the triple index and the Hörmander index.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::symplectic::{intersect_subspaces, omega_matrix, LagrangianFrame, Subspace};
use crate::{Real, Tolerances};

/// Inertia of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InertiaTriple {
    pub pos: usize,
    pub neg: usize,
    pub null: usize,
}

impl InertiaTriple {
    /// Counts eigenvalues with a zero band of `rel * (spectral radius + 1)`.
    pub fn of_symmetric<T: Real>(m: &DMatrix<T>, rel: T) -> Self {
        let eig = linalg::sym_eigenvalues(&linalg::symmetrize(m));
        let rho = eig.iter().fold(T::zero(), |a, &e| a.max(e.abs()));
        let band = rel * (rho + T::one());
        let mut out = InertiaTriple { pos: 0, neg: 0, null: 0 };
        for e in eig {
            if e > band {
                out.pos += 1;
            } else if e < -band {
                out.neg += 1;
            } else {
                out.null += 1;
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.pos + self.neg + self.null
    }
}

/// `Q(alpha, beta; delta)` restricted to `alpha ∩ (beta + delta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QForm<T: Real> {
    pub domain_basis: DMatrix<T>,
    pub gram: DMatrix<T>,
    /// Largest residual of the `x = y + z` decompositions.
    pub decomposition_residual: T,
}

impl<T: Real> QForm<T> {
    pub fn dim(&self) -> usize {
        self.domain_basis.ncols()
    }

    pub fn inertia(&self, tol: &Tolerances<T>) -> InertiaTriple {
        InertiaTriple::of_symmetric(&self.gram, tol.eig_zero_rel)
    }
}

fn same_n<T: Real>(frames: &[&LagrangianFrame<T>]) -> Result<()> {
    let n = frames[0].n();
    for f in frames {
        if f.n() != n {
            return Err(Error::DimensionMismatch { expected: n, got: f.n() });
        }
    }
    Ok(())
}

/// Builds `Q(x1, x2) = omega(y1, z2)` for `x = y + z`, `y ∈ beta`, `z ∈ delta`.
pub fn q_form<T: Real>(
    alpha: &LagrangianFrame<T>,
    beta: &LagrangianFrame<T>,
    delta: &LagrangianFrame<T>,
    tol: &Tolerances<T>,
) -> Result<QForm<T>> {
    same_n(&[alpha, beta, delta])?;
    let n = alpha.n();
    let stacked = linalg::hcat(beta.columns(), delta.columns());
    let sum = Subspace::span_of(&stacked, tol.int_tol);
    let domain = intersect_subspaces(&alpha.subspace(), &sum, tol.int_tol);
    let m = domain.dim;
    if m == 0 {
        return Ok(QForm {
            domain_basis: domain.basis,
            gram: DMatrix::zeros(0, 0),
            decomposition_residual: T::zero(),
        });
    }
    let coeffs = linalg::min_norm_solve(&stacked, &domain.basis, tol.int_tol);
    let ys = beta.columns() * coeffs.rows(0, n);
    let zs = delta.columns() * coeffs.rows(n, n);
    let residual = linalg::max_abs(&(&domain.basis - &ys - &zs));
    if residual > tol.decomp_tol {
        return Err(Error::DecompositionResidual {
            residual: residual.as_f64(),
        });
    }
    let gram = linalg::symmetrize(&omega_matrix(&ys, &zs));
    Ok(QForm {
        domain_basis: domain.basis,
        gram,
        decomposition_residual: residual,
    })
}

/// `iota(alpha, beta, kappa) = m+(Q(alpha, beta; kappa)) + dim(alpha ∩ kappa) - dim(alpha ∩ beta ∩ kappa)`.
pub fn triple_index<T: Real>(
    alpha: &LagrangianFrame<T>,
    beta: &LagrangianFrame<T>,
    kappa: &LagrangianFrame<T>,
    tol: &Tolerances<T>,
) -> Result<usize> {
    let q = q_form(alpha, beta, kappa, tol)?;
    let pos = q.inertia(tol).pos;
    let ak = intersect_subspaces(&alpha.subspace(), &kappa.subspace(), tol.int_tol).dim;
    let ab = intersect_subspaces(&alpha.subspace(), &beta.subspace(), tol.int_tol);
    let abk = intersect_subspaces(&ab.as_subspace(), &kappa.subspace(), tol.int_tol).dim;
    Ok(pos + ak - abk)
}

/// `s(l0, l1; v0, v1) = iota(l0, l1, v1) - iota(l0, l1, v0)`.
pub fn hormander_index<T: Real>(
    l0: &LagrangianFrame<T>,
    l1: &LagrangianFrame<T>,
    v0: &LagrangianFrame<T>,
    v1: &LagrangianFrame<T>,
    tol: &Tolerances<T>,
) -> Result<i64> {
    let a = triple_index(l0, l1, v1, tol)? as i64;
    let b = triple_index(l0, l1, v0, tol)? as i64;
    Ok(a - b)
}

/// The same index through `iota(l0, v0, v1) - iota(l1, v0, v1)`.
pub fn hormander_index_dual<T: Real>(
    l0: &LagrangianFrame<T>,
    l1: &LagrangianFrame<T>,
    v0: &LagrangianFrame<T>,
    v1: &LagrangianFrame<T>,
    tol: &Tolerances<T>,
) -> Result<i64> {
    let a = triple_index(l0, v0, v1, tol)? as i64;
    let b = triple_index(l1, v0, v1, tol)? as i64;
    Ok(a - b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_lagrangian, rng_from_seed};

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn line(p: f64, q: f64) -> LagrangianFrame<f64> {
        LagrangianFrame::new(DMatrix::from_column_slice(2, 1, &[p, q]), &tol()).unwrap()
    }

    #[test]
    fn hand_computed_form() {
        let t = tol();
        let q = q_form(
            &LagrangianFrame::dirichlet(1),
            &LagrangianFrame::neumann(1),
            &line(1.0, 1.0),
            &t,
        )
        .unwrap();
        assert_eq!(q.dim(), 1);
        let x = q.domain_basis[(0, 0)];
        assert!((q.gram[(0, 0)] / (x * x) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn form_vanishes_when_all_equal() {
        let t = tol();
        let a = random_lagrangian::<f64, _>(2, &mut rng_from_seed(4));
        let q = q_form(&a, &a, &a, &t).unwrap();
        assert_eq!(q.inertia(&t).null, q.dim());
    }

    #[test]
    fn form_vanishes_when_delta_is_alpha() {
        let t = tol();
        let q = q_form(&line(1.0, 2.0), &line(1.0, -1.0), &line(1.0, 2.0), &t).unwrap();
        assert_eq!(q.dim(), 1);
        assert!(q.gram[(0, 0)].abs() < 1e-12);
    }

    #[test]
    fn triple_index_examples() {
        let t = tol();
        let d = LagrangianFrame::<f64>::dirichlet(1);
        let nf = LagrangianFrame::<f64>::neumann(1);
        assert_eq!(triple_index(&d, &nf, &line(1.0, 1.0), &t).unwrap(), 1);
        assert_eq!(triple_index(&d, &nf, &line(1.0, -1.0), &t).unwrap(), 0);
        let a = random_lagrangian::<f64, _>(3, &mut rng_from_seed(5));
        assert_eq!(triple_index(&a, &a, &a, &t).unwrap(), 0);
        assert_eq!(triple_index(&d, &d, &nf, &t).unwrap(), 0);
    }

    #[test]
    fn hormander_examples() {
        let t = tol();
        let d = LagrangianFrame::<f64>::dirichlet(1);
        let nf = LagrangianFrame::<f64>::neumann(1);
        let v0 = line(1.0, 1.0);
        let v1 = line(1.0, -1.0);
        assert_eq!(hormander_index(&d, &nf, &v0, &v0, &t).unwrap(), 0);
        assert_eq!(hormander_index(&d, &d, &v0, &v1, &t).unwrap(), 0);
        let s = hormander_index(&d, &nf, &v0, &v1, &t).unwrap();
        assert_eq!(s, hormander_index_dual(&d, &nf, &v0, &v1, &t).unwrap());
        assert_eq!(s, -1);
    }

    #[test]
    fn inertia_band() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, -1.0, 1e-12, 0.0]));
        let i = InertiaTriple::of_symmetric(&m, 1e-8);
        assert_eq!(i, InertiaTriple { pos: 1, neg: 1, null: 2 });
        assert_eq!(i.dim(), 4);
    }
}
