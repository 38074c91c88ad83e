use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::{Real, Tolerances};

/// A matrix-valued coefficient `t -> M(t)`.
pub type MatrixFn<T> = Arc<dyn Fn(T) -> DMatrix<T> + Send + Sync>;

/// Which end of the real line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum End {
    Plus,
    Minus,
}

/// Declared bounds `|P v| >= C1 |v|`, `|Q v| <= C2 |v|`, `|R v| <= C3 |v|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants<T> {
    pub c1: T,
    pub c2: T,
    pub c3: T,
}

/// Coefficients `(P, Q, R)` of a Morse–Sturm system with their limits at `+-inf`.
#[derive(Clone)]
pub struct CoefficientSystem<T: Real> {
    n: usize,
    p: MatrixFn<T>,
    q: MatrixFn<T>,
    r: MatrixFn<T>,
    plus: (DMatrix<T>, DMatrix<T>, DMatrix<T>),
    minus: (DMatrix<T>, DMatrix<T>, DMatrix<T>),
    constants: Constants<T>,
    f2: bool,
}

impl<T: Real> fmt::Debug for CoefficientSystem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientSystem")
            .field("n", &self.n)
            .field("constants", &self.constants)
            .field("f2", &self.f2)
            .finish_non_exhaustive()
    }
}

/// Outcome of checking a system on a validation grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub grid_points: usize,
    pub max_symmetry_defect: f64,
    pub min_p_singular_value: f64,
    pub min_p_eigenvalue: f64,
    pub max_q_norm: f64,
    pub max_r_norm: f64,
    /// `|B(+-T) - B(+-inf)|_F`, largest over both ends.
    pub tail_bound: f64,
    pub tail_ok: bool,
}

impl<T: Real> CoefficientSystem<T> {
    /// Parameter at which the limits at `+-inf` are read off.
    pub const LIMIT_TIME: f64 = 1000.0;

    pub fn new(n: usize, p: MatrixFn<T>, q: MatrixFn<T>, r: MatrixFn<T>, constants: Constants<T>, f2: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("dimension n must be positive".into()));
        }
        let far = T::lit(Self::LIMIT_TIME);
        let plus = (p(far), q(far), r(far));
        let minus = (p(-far), q(-far), r(-far));
        let sys = Self {
            n,
            p,
            q,
            r,
            plus,
            minus,
            constants,
            f2,
        };
        for (label, m) in [
            ("P(+inf)", &sys.plus.0),
            ("Q(+inf)", &sys.plus.1),
            ("R(+inf)", &sys.plus.2),
            ("P(-inf)", &sys.minus.0),
            ("Q(-inf)", &sys.minus.1),
            ("R(-inf)", &sys.minus.2),
        ] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: m.nrows(),
                });
            }
            if m.iter().any(|x| !x.is_finite()) {
                return Err(Error::Validation(format!("limit {label} does not exist (non-finite)")));
            }
        }
        if !(constants.c1 > T::zero() && constants.c2 >= T::zero() && constants.c3 >= T::zero()) {
            return Err(Error::Validation("constants must satisfy C1 > 0, C2 >= 0, C3 >= 0".into()));
        }
        Ok(sys)
    }

    /// Constant-coefficient system.
    pub fn autonomous(p: DMatrix<T>, q: DMatrix<T>, r: DMatrix<T>, constants: Constants<T>, f2: bool) -> Result<Self> {
        let n = p.nrows();
        Self::new(
            n,
            Arc::new(move |_| p.clone()),
            Arc::new(move |_| q.clone()),
            Arc::new(move |_| r.clone()),
            constants,
            f2,
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn constants(&self) -> &Constants<T> {
        &self.constants
    }

    pub fn f2(&self) -> bool {
        self.f2
    }

    pub fn eval(&self, t: T) -> (DMatrix<T>, DMatrix<T>, DMatrix<T>) {
        ((self.p)(t), (self.q)(t), (self.r)(t))
    }

    pub fn p_at(&self, t: T) -> DMatrix<T> {
        (self.p)(t)
    }

    pub fn q_at(&self, t: T) -> DMatrix<T> {
        (self.q)(t)
    }

    pub fn r_at(&self, t: T) -> DMatrix<T> {
        (self.r)(t)
    }

    pub fn limits(&self, end: End) -> (&DMatrix<T>, &DMatrix<T>, &DMatrix<T>) {
        let l = match end {
            End::Plus => &self.plus,
            End::Minus => &self.minus,
        };
        (&l.0, &l.1, &l.2)
    }

    /// The same system with `t` replaced by `-t` and `Q` by `-Q`.
    ///
    /// A solution `w(t)` of the original equation gives the solution `w(-t)`
    /// of the reflected one.
    pub fn reflected(&self) -> Self {
        let p = self.p.clone();
        let q = self.q.clone();
        let r = self.r.clone();
        Self {
            n: self.n,
            p: Arc::new(move |t| p(-t)),
            q: Arc::new(move |t| -q(-t)),
            r: Arc::new(move |t| r(-t)),
            plus: (self.minus.0.clone(), -&self.minus.1, self.minus.2.clone()),
            minus: (self.plus.0.clone(), -&self.plus.1, self.plus.2.clone()),
            constants: self.constants,
            f2: self.f2,
        }
    }

    /// `|B_0(+-t) - B_0(+-inf)|_F`, largest over both ends.
    pub fn tail_bound(&self, t: T) -> Result<T> {
        let mut worst = T::zero();
        for (time, end) in [(t, End::Plus), (-t, End::Minus)] {
            let b = super::assemble_b(self, time, T::zero())?;
            let lim = super::assemble_b_limit(self, end, T::zero())?;
            worst = worst.max((b.b - lim.b).norm());
        }
        Ok(worst)
    }

    /// Checks symmetry, invertibility and the declared bounds on a uniform grid
    /// over `[-t_trunc, t_trunc]`, and measures the tail at `+-t_trunc`.
    pub fn validate(&self, t_trunc: T, points: usize, tol: &Tolerances<T>) -> Result<ValidationReport> {
        let points = points.max(2);
        let slack = |c: T| c * (T::one() + T::lit(1e-9)) + T::lit(1e-12);
        let mut sym = T::zero();
        let mut min_sv = T::max_value().unwrap();
        let mut min_eig = T::max_value().unwrap();
        let mut max_q = T::zero();
        let mut max_r = T::zero();
        let c = self.constants;
        for k in 0..points {
            let t = -t_trunc + t_trunc * T::lit(2.0) * T::of_usize(k) / T::of_usize(points - 1);
            let (p, q, r) = self.eval(t);
            for m in [&p, &q, &r] {
                if m.nrows() != self.n || m.ncols() != self.n {
                    return Err(Error::DimensionMismatch {
                        expected: self.n,
                        got: m.nrows(),
                    });
                }
                if m.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Validation(format!("coefficient is not finite at t = {}", t.as_f64())));
                }
            }
            let d = linalg::max_abs(&(&p - p.transpose())).max(linalg::max_abs(&(&r - r.transpose())));
            if d > tol.iso_tol * T::one().max(linalg::max_abs(&p)).max(linalg::max_abs(&r)) {
                return Err(Error::Validation(format!(
                    "P and R must be symmetric (defect {:e} at t = {})",
                    d.as_f64(),
                    t.as_f64()
                )));
            }
            sym = sym.max(d);
            let sv = linalg::singular_values(&p);
            let smin = sv[self.n - 1];
            if smin <= tol.rank_tol * sv[0] {
                return Err(Error::Singular(format!("P({}) is singular", t.as_f64())));
            }
            min_sv = min_sv.min(smin);
            min_eig = min_eig.min(linalg::sym_eigenvalues(&linalg::symmetrize(&p))[0]);
            max_q = max_q.max(linalg::singular_values(&q)[0]);
            max_r = max_r.max(linalg::singular_values(&r)[0]);
        }
        if slack(min_sv) < c.c1 {
            return Err(Error::Validation(format!(
                "(F1) violated: |P v| >= C1 |v| needs C1 <= {:.6}",
                min_sv.as_f64()
            )));
        }
        if max_q > slack(c.c2) {
            return Err(Error::Validation(format!(
                "(F1) violated: |Q v| <= C2 |v| needs C2 >= {:.6}",
                max_q.as_f64()
            )));
        }
        if max_r > slack(c.c3) {
            return Err(Error::Validation(format!(
                "(F1) violated: |R v| <= C3 |v| needs C3 >= {:.6}",
                max_r.as_f64()
            )));
        }
        if self.f2 && slack(min_eig) < c.c1 {
            return Err(Error::Validation(format!(
                "(F2) violated: (P v, v) >= C1 |v|^2 needs C1 <= {:.6}",
                min_eig.as_f64()
            )));
        }
        let tail = self.tail_bound(t_trunc)?;
        Ok(ValidationReport {
            grid_points: points,
            max_symmetry_defect: sym.as_f64(),
            min_p_singular_value: min_sv.as_f64(),
            min_p_eigenvalue: min_eig.as_f64(),
            max_q_norm: max_q.as_f64(),
            max_r_norm: max_r.as_f64(),
            tail_bound: tail.as_f64(),
            tail_ok: tail <= tol.limit_tol,
        })
    }
}
