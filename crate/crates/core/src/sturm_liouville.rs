//! Finite-element discretization of Morse–Sturm operators on truncated
//! intervals, their Morse indices and the spectral flow of `A + lambda`.
//!
//! Continuous piecewise-linear elements on a uniform mesh carry the form
//! `q(w) = ∫ (P w', w') + (Q w, w') + (Q^T w', w) + ((R + lambda) w, w) dt`.
//! Far ends are clamped. On a half-line the trace at `t = 0` is restricted to
//! `V(L0)` and the boundary form `±(A w(0), w(0))` is added.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::{boundary_constant, BoundaryData, CoefficientSystem};
use crate::linalg;
use crate::symplectic::LagrangianFrame;
use crate::{Real, Tolerances};

/// Boundary setting of a discretized operator.
#[derive(Debug, Clone, PartialEq)]
pub enum Boundary<T: Real> {
    /// Whole line, truncated to `[-T, T]`.
    Line,
    /// `[0, T]` with `L0` at `t = 0`.
    Plus(LagrangianFrame<T>),
    /// `[-T, 0]` with `L0` at `t = 0`.
    Minus(LagrangianFrame<T>),
}

impl<T: Real> Boundary<T> {
    pub fn label(&self) -> &'static str {
        match self {
            Boundary::Line => "line",
            Boundary::Plus(_) => "plus",
            Boundary::Minus(_) => "minus",
        }
    }

    fn interval(&self, t_trunc: T) -> (T, T) {
        match self {
            Boundary::Line => (-t_trunc, t_trunc),
            Boundary::Plus(_) => (T::zero(), t_trunc),
            Boundary::Minus(_) => (-t_trunc, T::zero()),
        }
    }
}

/// How an inertia count was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InertiaMethod {
    BlockLdl,
    DenseEigen,
}

/// Symmetric block-tridiagonal pencil `(K, M)` of a discretized operator.
#[derive(Debug, Clone)]
pub struct DiscreteOperator<T: Real> {
    n: usize,
    nodes: usize,
    t_lo: T,
    t_hi: T,
    lambda: T,
    t_trunc: T,
    boundary: &'static str,
    boundary_data: Option<BoundaryData<T>>,
    k_diag: Vec<DMatrix<T>>,
    k_off: Vec<DMatrix<T>>,
    m_diag: Vec<DMatrix<T>>,
    m_off: Vec<DMatrix<T>>,
    zero_tol: T,
}

fn gauss_points<T: Real>() -> [T; 2] {
    let g = T::one() / T::lit(3.0).sqrt();
    [-g, g]
}

/// Largest absolute row sum of a block-tridiagonal matrix.
fn block_inf_norm<T: Real>(diag: &[DMatrix<T>], off: &[DMatrix<T>]) -> T {
    let mut best = T::zero();
    for k in 0..diag.len() {
        for i in 0..diag[k].nrows() {
            let mut s = T::zero();
            for j in 0..diag[k].ncols() {
                s += diag[k][(i, j)].abs();
            }
            if k + 1 < diag.len() {
                for j in 0..off[k].ncols() {
                    s += off[k][(i, j)].abs();
                }
            }
            if k > 0 {
                for j in 0..off[k - 1].nrows() {
                    s += off[k - 1][(j, i)].abs();
                }
            }
            best = best.max(s);
        }
    }
    best
}

/// Assembles the pencil for `sys` with shift `lambda`.
pub fn discretize<T: Real>(
    sys: &CoefficientSystem<T>,
    boundary: &Boundary<T>,
    t_trunc: T,
    nodes: usize,
    lambda: T,
    tol: &Tolerances<T>,
) -> Result<DiscreteOperator<T>> {
    if nodes < 16 {
        return Err(Error::MeshTooCoarse(format!("at least 16 nodes are required, got {nodes}")));
    }
    if !(t_trunc > T::zero()) {
        return Err(Error::Validation("truncation time must be positive".into()));
    }
    let n = sys.n();
    let (t_lo, t_hi) = boundary.interval(t_trunc);
    let h = (t_hi - t_lo) / T::of_usize(nodes - 1);

    let boundary_data = match boundary {
        Boundary::Line => None,
        Boundary::Plus(l0) | Boundary::Minus(l0) => {
            if l0.n() != n {
                return Err(Error::InvalidBoundary(format!(
                    "boundary Lagrangian has n = {}, system has n = {n}",
                    l0.n()
                )));
            }
            if l0.isotropy_defect() > tol.iso_tol {
                return Err(Error::InvalidBoundary("boundary frame is not Lagrangian".into()));
            }
            Some(boundary_constant(l0, tol))
        }
    };

    // Node transforms: free nodes keep all n components, the boundary node
    // keeps V(L0), clamped nodes are dropped.
    let transform = |node: usize| -> Option<DMatrix<T>> {
        let last = nodes - 1;
        match boundary {
            Boundary::Line => (node != 0 && node != last).then(|| DMatrix::identity(n, n)),
            Boundary::Plus(_) => {
                if node == 0 {
                    boundary_data.as_ref().map(|b| b.v_basis.clone()).filter(|u| u.ncols() > 0)
                } else {
                    (node != last).then(|| DMatrix::identity(n, n))
                }
            }
            Boundary::Minus(_) => {
                if node == last {
                    boundary_data.as_ref().map(|b| b.v_basis.clone()).filter(|u| u.ncols() > 0)
                } else {
                    (node != 0).then(|| DMatrix::identity(n, n))
                }
            }
        }
    };
    let transforms: Vec<Option<DMatrix<T>>> = (0..nodes).map(transform).collect();
    let kept: Vec<usize> = (0..nodes).filter(|&k| transforms[k].is_some()).collect();
    let slot: Vec<Option<usize>> = {
        let mut s = vec![None; nodes];
        for (i, &k) in kept.iter().enumerate() {
            s[k] = Some(i);
        }
        s
    };
    if kept.is_empty() {
        return Err(Error::MeshTooCoarse("no free unknowns".into()));
    }

    // Resolution check: the element must resolve the local oscillation scale.
    let mut worst = T::zero();
    let id = DMatrix::<T>::identity(n, n);
    let gp = gauss_points::<T>();
    let elements: Vec<[DMatrix<T>; 8]> = (0..nodes - 1)
        .into_par_iter()
        .map(|e| {
            let a = t_lo + h * T::of_usize(e);
            let mut kk = [DMatrix::zeros(n, n), DMatrix::zeros(n, n), DMatrix::zeros(n, n), DMatrix::zeros(n, n)];
            let mut mm = [DMatrix::zeros(n, n), DMatrix::zeros(n, n), DMatrix::zeros(n, n), DMatrix::zeros(n, n)];
            let w = h * T::lit(0.5);
            let dphi = [-T::one() / h, T::one() / h];
            for g in gp {
                let t = a + (g + T::one()) * T::lit(0.5) * h;
                let (p, q, r) = sys.eval(t);
                let rl = r + &id * lambda;
                let phi = [(T::one() - g) * T::lit(0.5), (T::one() + g) * T::lit(0.5)];
                for i in 0..2 {
                    for j in 0..2 {
                        let blk = &p * (dphi[i] * dphi[j]) + &q * (dphi[i] * phi[j]) + q.transpose() * (phi[i] * dphi[j]) + &rl * (phi[i] * phi[j]);
                        kk[2 * i + j] += blk * w;
                        mm[2 * i + j] += &id * (w * phi[i] * phi[j]);
                    }
                }
            }
            let [k00, k01, k10, k11] = kk;
            let [m00, m01, m10, m11] = mm;
            [k00, k01, k10, k11, m00, m01, m10, m11]
        })
        .collect();
    for e in 0..nodes - 1 {
        let t = t_lo + h * (T::of_usize(e) + T::lit(0.5));
        let (p, q, r) = sys.eval(t);
        let pinv = p
            .try_inverse()
            .ok_or_else(|| Error::Singular(format!("P({}) is singular", t.as_f64())))?;
        let rl = r + &id * lambda;
        let a = linalg::singular_values(&(&pinv * rl))[0];
        let b = linalg::singular_values(&(&pinv * q))[0];
        worst = worst.max(h * h * a).max(h * b);
    }
    if worst > T::one() {
        return Err(Error::MeshTooCoarse(format!(
            "element scale h = {:.3e} does not resolve the coefficients (h^2 |P^-1 R|, h |P^-1 Q| up to {:.3})",
            h.as_f64(),
            worst.as_f64()
        )));
    }

    let sizes: Vec<usize> = kept.iter().map(|&k| transforms[k].as_ref().unwrap().ncols()).collect();
    let mut k_diag: Vec<DMatrix<T>> = sizes.iter().map(|&s| DMatrix::zeros(s, s)).collect();
    let mut m_diag = k_diag.clone();
    let mut k_off: Vec<DMatrix<T>> = (0..sizes.len().saturating_sub(1))
        .map(|i| DMatrix::zeros(sizes[i], sizes[i + 1]))
        .collect();
    let mut m_off = k_off.clone();
    for (e, el) in elements.iter().enumerate() {
        let nodes_e = [e, e + 1];
        for i in 0..2 {
            let Some(si) = slot[nodes_e[i]] else { continue };
            let ti = transforms[nodes_e[i]].as_ref().unwrap();
            for j in 0..2 {
                let Some(sj) = slot[nodes_e[j]] else { continue };
                let tj = transforms[nodes_e[j]].as_ref().unwrap();
                let kb = ti.transpose() * &el[2 * i + j] * tj;
                let mb = ti.transpose() * &el[4 + 2 * i + j] * tj;
                if si == sj {
                    k_diag[si] += kb;
                    m_diag[si] += mb;
                } else if si + 1 == sj {
                    k_off[si] += kb;
                    m_off[si] += mb;
                }
            }
        }
    }
    if let Some(bd) = &boundary_data {
        if bd.dim() > 0 {
            match boundary {
                Boundary::Plus(_) => k_diag[0] += &bd.a,
                Boundary::Minus(_) => {
                    let last = k_diag.len() - 1;
                    k_diag[last] -= &bd.a;
                }
                Boundary::Line => {}
            }
        }
    }
    for d in k_diag.iter_mut().chain(m_diag.iter_mut()) {
        *d = linalg::symmetrize(d);
    }
    let zero_tol = tol.fem_zero_factor * block_inf_norm(&k_diag, &k_off) / block_inf_norm(&m_diag, &m_off);
    Ok(DiscreteOperator {
        n,
        nodes,
        t_lo,
        t_hi,
        lambda,
        t_trunc,
        boundary: boundary.label(),
        boundary_data,
        k_diag,
        k_off,
        m_diag,
        m_off,
        zero_tol,
    })
}

impl<T: Real> DiscreteOperator<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn interval(&self) -> (T, T) {
        (self.t_lo, self.t_hi)
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn t_trunc(&self) -> T {
        self.t_trunc
    }

    pub fn boundary(&self) -> &'static str {
        self.boundary
    }

    pub fn boundary_data(&self) -> Option<&BoundaryData<T>> {
        self.boundary_data.as_ref()
    }

    /// Number of unknowns.
    pub fn dim(&self) -> usize {
        self.k_diag.iter().map(|d| d.nrows()).sum()
    }

    /// `fem_zero_factor * |K|_inf / |M|_inf`.
    pub fn zero_tol(&self) -> T {
        self.zero_tol
    }

    fn dense(diag: &[DMatrix<T>], off: &[DMatrix<T>]) -> DMatrix<T> {
        let n: usize = diag.iter().map(|d| d.nrows()).sum();
        let mut out = DMatrix::zeros(n, n);
        let mut at = 0;
        for k in 0..diag.len() {
            let s = diag[k].nrows();
            out.view_mut((at, at), (s, s)).copy_from(&diag[k]);
            if k + 1 < diag.len() {
                let s2 = diag[k + 1].nrows();
                out.view_mut((at, at + s), (s, s2)).copy_from(&off[k]);
                out.view_mut((at + s, at), (s2, s)).copy_from(&off[k].transpose());
            }
            at += s;
        }
        out
    }

    pub fn stiffness_dense(&self) -> DMatrix<T> {
        Self::dense(&self.k_diag, &self.k_off)
    }

    pub fn mass_dense(&self) -> DMatrix<T> {
        Self::dense(&self.m_diag, &self.m_off)
    }

    /// All generalized eigenvalues of `(K, M)`, ascending. Dense; for small problems.
    pub fn eigenvalues_dense(&self) -> Result<Vec<T>> {
        let m = self.mass_dense();
        let chol = m
            .cholesky()
            .ok_or_else(|| Error::Singular("mass matrix is not positive definite".into()))?;
        let l_inv = chol
            .l()
            .try_inverse()
            .ok_or_else(|| Error::Singular("mass factor is singular".into()))?;
        let c = &l_inv * self.stiffness_dense() * l_inv.transpose();
        Ok(linalg::sym_eigenvalues(&linalg::symmetrize(&c)))
    }

    /// Number of generalized eigenvalues strictly below `x`, i.e. the number
    /// of negative eigenvalues of `K - x M`, by block `L D L^T` with the
    /// Haynsworth inertia sum and a dense fallback on breakdown.
    pub fn count_below(&self, x: T) -> Result<(usize, InertiaMethod)> {
        if let Some(c) = self.block_ldl_count(x) {
            return Ok((c, InertiaMethod::BlockLdl));
        }
        let eig = self.eigenvalues_dense()?;
        Ok((eig.iter().filter(|&&e| e < x).count(), InertiaMethod::DenseEigen))
    }

    fn block_ldl_count(&self, x: T) -> Option<usize> {
        let scale = block_inf_norm(&self.k_diag, &self.k_off).max(x.abs() * block_inf_norm(&self.m_diag, &self.m_off));
        let floor = scale * T::default_epsilon() * T::lit(1e3);
        let mut count = 0;
        let mut prev: Option<(DMatrix<T>, DMatrix<T>)> = None; // (S_k^-1, E_k)
        for k in 0..self.k_diag.len() {
            let mut s = &self.k_diag[k] - &self.m_diag[k] * x;
            if let Some((sinv, e)) = &prev {
                s -= e.transpose() * sinv * e;
            }
            let s = linalg::symmetrize(&s);
            let eig = if s.nrows() == 1 {
                vec![s[(0, 0)]]
            } else {
                linalg::sym_eigenvalues(&s)
            };
            for e in &eig {
                if e.abs() <= floor {
                    return None;
                }
                if *e < T::zero() {
                    count += 1;
                }
            }
            if k + 1 < self.k_diag.len() {
                let sinv = s.try_inverse()?;
                let e = &self.k_off[k] - &self.m_off[k] * x;
                prev = Some((sinv, e));
            }
        }
        Some(count)
    }
}

/// Morse index and nullity of a discretized operator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MorseIndex {
    pub morse: usize,
    pub nullity: usize,
    pub zero_tol: f64,
    /// No generalized eigenvalue lies in the gray zone `tol < |mu| <= 10 tol`.
    pub certified: bool,
    pub method: InertiaMethod,
}

pub fn morse_index<T: Real>(op: &DiscreteOperator<T>) -> Result<MorseIndex> {
    let tol = op.zero_tol();
    let ten = T::lit(10.0);
    let (below_neg, m1) = op.count_below(-tol)?;
    let (below_pos, m2) = op.count_below(tol)?;
    let (outer_neg, _) = op.count_below(-tol * ten)?;
    let (outer_pos, _) = op.count_below(tol * ten)?;
    let method = if m1 == InertiaMethod::BlockLdl && m2 == InertiaMethod::BlockLdl {
        InertiaMethod::BlockLdl
    } else {
        InertiaMethod::DenseEigen
    };
    Ok(MorseIndex {
        morse: below_neg,
        nullity: below_pos - below_neg,
        zero_tol: tol.as_f64(),
        certified: outer_neg == below_neg && outer_pos == below_pos,
        method,
    })
}

/// A `lambda` at which `A + lambda` has a kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub lambda: f64,
    pub dim: usize,
}

/// Morse counts of `A + lambda` along a grid and the located crossings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralFlowTrace {
    pub lambdas: Vec<f64>,
    pub morse_counts: Vec<usize>,
    pub nullities: Vec<usize>,
    pub crossings: Vec<Crossing>,
    /// `morse_counts[0] - morse_counts[last]`.
    pub spectral_flow: i64,
    /// The same quantity through partition sums of spectral projections.
    pub partition_sum: i64,
    pub monotone: bool,
    pub zero_tol: f64,
}

impl SpectralFlowTrace {
    pub fn crossing_sum(&self) -> usize {
        self.crossings.iter().map(|c| c.dim).sum()
    }
}

/// Grid size of a spectral-flow sweep.
pub const SWEEP_POINTS: usize = 64;

/// Bisection accuracy for crossing locations.
pub const CROSSING_TOL: f64 = 1e-6;

/// Spectral flow of `lambda -> A + lambda` on `[0, lambda_max]`.
///
/// The shift enters the discrete form as `lambda M`, so the generalized
/// eigenvalues of `A + lambda` are those of `A` moved by `lambda`. The sweep
/// is therefore run on one factorization family of the unshifted pencil.
pub fn spectral_flow_positive<T: Real>(
    sys: &CoefficientSystem<T>,
    boundary: &Boundary<T>,
    t_trunc: T,
    nodes: usize,
    lambda_max: T,
    tol: &Tolerances<T>,
) -> Result<SpectralFlowTrace> {
    let op = discretize(sys, boundary, t_trunc, nodes, T::zero(), tol)?;
    spectral_flow_of(&op, lambda_max)
}

/// Spectral flow for an already assembled pencil.
pub fn spectral_flow_of<T: Real>(op: &DiscreteOperator<T>, lambda_max: T) -> Result<SpectralFlowTrace> {
    if !(lambda_max > op.lambda()) {
        return Err(Error::Sweep("lambda_max must exceed the base shift".into()));
    }
    let base = op.lambda();
    let ztol = op.zero_tol();
    let step = (lambda_max - base) / T::of_usize(SWEEP_POINTS - 1);
    let lambdas: Vec<T> = (0..SWEEP_POINTS).map(|k| base + step * T::of_usize(k)).collect();
    // Generalized eigenvalues of A + lambda below x are those of A below x - (lambda - base).
    let count_at = |lambda: T, x: T| -> Result<usize> { Ok(op.count_below(x - (lambda - base))?.0) };

    let pairs = lambdas
        .par_iter()
        .map(|&l| Ok((count_at(l, -ztol)?, count_at(l, ztol)?)))
        .collect::<Result<Vec<(usize, usize)>>>()?;
    let morse_counts: Vec<usize> = pairs.iter().map(|p| p.0).collect();
    let nullities: Vec<usize> = pairs.iter().map(|p| p.1 - p.0).collect();
    let monotone = morse_counts.windows(2).all(|w| w[1] <= w[0]);
    if !monotone {
        return Err(Error::Sweep("Morse counts increase along a positive path".into()));
    }
    if *morse_counts.last().unwrap() != 0 {
        return Err(Error::Sweep(format!(
            "operator is not positive at lambda_max = {} (Morse count {})",
            lambda_max.as_f64(),
            morse_counts.last().unwrap()
        )));
    }

    // Crossings: bisection on the exact count of negative eigenvalues.
    let mut crossings = Vec::new();
    for k in 0..SWEEP_POINTS - 1 {
        let (mut lo, mut hi) = (lambdas[k], lambdas[k + 1]);
        let c_lo = count_at(lo, T::zero())?;
        let c_hi = count_at(hi, T::zero())?;
        if c_lo == c_hi {
            continue;
        }
        let mut stack = vec![(lo, hi, c_lo, c_hi)];
        while let Some((a, b, ca, cb)) = stack.pop() {
            lo = a;
            hi = b;
            if ca == cb {
                continue;
            }
            if (hi - lo).as_f64() <= CROSSING_TOL {
                crossings.push(Crossing {
                    lambda: ((lo + hi) * T::lit(0.5)).as_f64(),
                    dim: ca - cb,
                });
                continue;
            }
            let mid = (lo + hi) * T::lit(0.5);
            let cm = count_at(mid, T::zero())?;
            stack.push((mid, hi, cm, cb));
            stack.push((lo, mid, ca, cm));
        }
    }
    crossings.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap());
    // The zero band at the start is not a crossing of the half-open sum.
    let crossings: Vec<Crossing> = crossings
        .into_iter()
        .filter(|c| c.lambda > (base + ztol).as_f64())
        .collect();

    // Partition sums of dim E_[0, a_i] with a_i avoiding the spectrum on each interval.
    let mut partition_sum: i64 = 0;
    for k in 0..SWEEP_POINTS - 1 {
        let (l0, l1) = (lambdas[k], lambdas[k + 1]);
        let mut a = ztol * T::lit(2.0);
        let mut found = None;
        for _ in 0..80 {
            if count_at(l0, a)? == count_at(l1, a)? {
                found = Some(a);
                break;
            }
            a *= T::lit(1.5);
        }
        let a = found.ok_or_else(|| Error::Sweep("no admissible spectral cut for the partition sum".into()))?;
        let e = |l: T| -> Result<i64> { Ok(count_at(l, a)? as i64 - count_at(l, -ztol)? as i64) };
        partition_sum += e(l1)? - e(l0)?;
    }

    let spectral_flow = morse_counts[0] as i64 - *morse_counts.last().unwrap() as i64;
    Ok(SpectralFlowTrace {
        lambdas: lambdas.iter().map(|l| l.as_f64()).collect(),
        morse_counts,
        nullities,
        crossings,
        spectral_flow,
        partition_sum,
        monotone,
        zero_tol: ztol.as_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::Constants;
    use std::sync::Arc;

    fn scalar_sys(p: f64, q: fn(f64) -> f64, r: fn(f64) -> f64, c3: f64) -> CoefficientSystem<f64> {
        CoefficientSystem::new(
            1,
            Arc::new(move |_| DMatrix::from_element(1, 1, p)),
            Arc::new(move |t| DMatrix::from_element(1, 1, q(t))),
            Arc::new(move |t| DMatrix::from_element(1, 1, r(t))),
            Constants { c1: p, c2: 2.0, c3 },
            true,
        )
        .unwrap()
    }

    /// `-w'' + c w` on `[-1/2, 1/2]` with clamped ends (truncation 1/2).
    fn box_op(c: f64, nodes: usize) -> DiscreteOperator<f64> {
        let sys = CoefficientSystem::autonomous(
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::zeros(1, 1),
            DMatrix::from_element(1, 1, c),
            Constants { c1: 1.0, c2: 0.0, c3: c.abs() },
            true,
        )
        .unwrap();
        discretize(&sys, &Boundary::Line, 0.5, nodes, 0.0, &Tolerances::default()).unwrap()
    }

    #[test]
    fn sine_basis_positive_box() {
        let pi2 = std::f64::consts::PI.powi(2);
        let op = box_op(pi2, 401);
        let mi = morse_index(&op).unwrap();
        assert_eq!((mi.morse, mi.nullity), (0, 0));
        let eig = op.eigenvalues_dense().unwrap();
        assert!((eig[0] - 2.0 * pi2).abs() < 1e-2);
    }

    #[test]
    fn sine_basis_box_with_zero_mode() {
        let pi2 = std::f64::consts::PI.powi(2);
        let op = box_op(-4.0 * pi2, 801);
        let mi = morse_index(&op).unwrap();
        assert_eq!(mi.morse, 1);
        assert_eq!(mi.nullity, 1);
        assert_eq!(mi.method, InertiaMethod::BlockLdl);
    }

    #[test]
    fn ldl_count_matches_dense() {
        let sys = scalar_sys(1.0, |t| 0.8 * t.tanh(), |t| 1.0 - 6.0 / t.cosh().powi(2), 5.0);
        let op = discretize(&sys, &Boundary::Line, 6.0, 121, 0.0, &Tolerances::default()).unwrap();
        let eig = op.eigenvalues_dense().unwrap();
        for x in [-4.0, -1.0, -0.3, 0.2, 0.9, 3.0] {
            let dense = eig.iter().filter(|&&e| e < x).count();
            assert_eq!(op.count_below(x).unwrap().0, dense, "x = {x}");
        }
    }

    #[test]
    fn dirichlet_boundary_drops_trace() {
        let sys = scalar_sys(1.0, |_| 0.0, |_| 1.0, 1.0);
        let t = Tolerances::default();
        let d = discretize(&sys, &Boundary::Plus(LagrangianFrame::dirichlet(1)), 5.0, 101, 0.0, &t).unwrap();
        assert_eq!(d.dim(), 99);
        let nb = discretize(&sys, &Boundary::Plus(LagrangianFrame::neumann(1)), 5.0, 101, 0.0, &t).unwrap();
        assert_eq!(nb.dim(), 100);
        let line = discretize(&sys, &Boundary::Line, 5.0, 101, 0.0, &t).unwrap();
        assert_eq!(line.dim(), 99);
    }

    #[test]
    fn robin_condition_sign() {
        // -w'' + w on [0, T] with w'(0) = a w(0): L0 = span{(a, 1)}. The form
        // gets +a w(0)^2, negative a produces a bound state when a < -1.
        let sys = scalar_sys(1.0, |_| 0.0, |_| 1.0, 1.0);
        let t = Tolerances::default();
        for (a, expect) in [(-2.0, 1), (-0.5, 0), (1.0, 0)] {
            let l0 = LagrangianFrame::new(DMatrix::from_column_slice(2, 1, &[a, 1.0]), &t).unwrap();
            let op = discretize(&sys, &Boundary::Plus(l0.clone()), 15.0, 1501, 0.0, &t).unwrap();
            assert_eq!(morse_index(&op).unwrap().morse, expect, "plus a = {a}");
            // Reflecting t -> -t flips the sign of w'(0).
            let l0m = LagrangianFrame::new(DMatrix::from_column_slice(2, 1, &[-a, 1.0]), &t).unwrap();
            let op = discretize(&sys, &Boundary::Minus(l0m), 15.0, 1501, 0.0, &t).unwrap();
            assert_eq!(morse_index(&op).unwrap().morse, expect, "minus a = {a}");
        }
    }

    #[test]
    fn rejects_coarse_meshes() {
        let sys = scalar_sys(1.0, |_| 0.0, |_| 400.0, 400.0);
        let t = Tolerances::default();
        assert!(matches!(discretize(&sys, &Boundary::Line, 10.0, 8, 0.0, &t), Err(Error::MeshTooCoarse(_))));
        assert!(matches!(discretize(&sys, &Boundary::Line, 10.0, 101, 0.0, &t), Err(Error::MeshTooCoarse(_))));
    }

    #[test]
    fn poschl_teller_sweep() {
        let sys = scalar_sys(1.0, |_| 0.0, |t| 1.0 - 6.0 / t.cosh().powi(2), 5.0);
        let tr = spectral_flow_positive(&sys, &Boundary::Line, 12.0, 2401, 4.0, &Tolerances::default()).unwrap();
        assert_eq!(tr.morse_counts[0], 1);
        assert_eq!(tr.nullities[0], 1);
        assert_eq!(tr.spectral_flow, 1);
        assert_eq!(tr.partition_sum, 1);
        assert_eq!(tr.crossings.len(), 1);
        assert!((tr.crossings[0].lambda - 3.0).abs() < 1e-3);
    }
}
