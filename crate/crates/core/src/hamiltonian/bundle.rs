use nalgebra::DMatrix;
use serde::Serialize;

use super::{assemble_b, assemble_b_limit, spectral_subspaces, CoefficientSystem, End};
use crate::error::{Error, Result};
use crate::linalg;
use crate::maslov::LagrangianPath;
use crate::symplectic::LagrangianFrame;
use crate::{Real, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BundleKind {
    /// `E^s(tau)`, solutions decaying at `+inf`.
    Stable,
    /// `E^u(-tau)`, solutions decaying at `-inf`.
    Unstable,
}

/// Integration controls for invariant bundles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BundleOptions {
    /// Upper bound on the Runge–Kutta step.
    pub max_step: f64,
    /// Bound on `|J B| h`.
    pub step_factor: f64,
    /// Distance between stored samples in `tau`.
    pub sample_spacing: f64,
}

impl Default for BundleOptions {
    fn default() -> Self {
        Self {
            max_step: 1e-3,
            step_factor: 0.1,
            sample_spacing: 0.01,
        }
    }
}

/// Stable or unstable Lagrangian bundle sampled over `tau ∈ [0, T]`.
#[derive(Debug, Clone)]
pub struct InvariantBundle<T: Real> {
    pub kind: BundleKind,
    pub lambda: T,
    pub t_trunc: T,
    /// `tau -> E^s(tau)` or `tau -> E^u(-tau)`.
    pub path: LagrangianPath<T>,
    /// `E^s(+inf)` or `E^u(-inf)`.
    pub limit_frame: LagrangianFrame<T>,
    /// Runge–Kutta step used.
    pub step: T,
    /// Gap sine between the limit frame and the frozen spectral subspace at the truncation time.
    pub limit_gap: T,
}

impl<T: Real> InvariantBundle<T> {
    /// Frame at `tau = 0`.
    pub fn at_origin(&self) -> &LagrangianFrame<T> {
        self.path.first()
    }

    pub fn within_tolerance(&self, tol: &Tolerances<T>) -> bool {
        self.limit_gap <= tol.bundle_tol
    }
}

pub fn bundle<T: Real>(
    sys: &CoefficientSystem<T>,
    lambda: T,
    kind: BundleKind,
    t_trunc: T,
    tol: &Tolerances<T>,
) -> Result<InvariantBundle<T>> {
    bundle_with(sys, lambda, kind, t_trunc, &BundleOptions::default(), tol)
}

/// Integrates `Z' = J B_lambda(t) Z` from the truncation time toward `t = 0`,
/// re-orthonormalizing after every step.
pub fn bundle_with<T: Real>(
    sys: &CoefficientSystem<T>,
    lambda: T,
    kind: BundleKind,
    t_trunc: T,
    opts: &BundleOptions,
    tol: &Tolerances<T>,
) -> Result<InvariantBundle<T>> {
    let run = integrate(sys, lambda, kind, t_trunc, T::zero(), opts, tol)?;
    let mut frames = run.frames;
    frames.reverse();
    let taus = (0..frames.len()).map(|k| run.spacing * T::of_usize(k)).collect();
    let path = LagrangianPath::new(taus, frames, tol)?;
    Ok(InvariantBundle {
        kind,
        lambda,
        t_trunc,
        path,
        limit_frame: run.limit_frame,
        step: run.step,
        limit_gap: run.limit_gap,
    })
}

/// The bundle as a function of the time `t` itself, integrated from the
/// truncation time through to `t_stop` (which may lie past `t = 0`).
/// Samples are returned in increasing `t`.
pub fn bundle_over<T: Real>(
    sys: &CoefficientSystem<T>,
    lambda: T,
    kind: BundleKind,
    t_trunc: T,
    t_stop: T,
    opts: &BundleOptions,
    tol: &Tolerances<T>,
) -> Result<LagrangianPath<T>> {
    let run = integrate(sys, lambda, kind, t_trunc, t_stop, opts, tol)?;
    let mut frames = run.frames;
    let mut times = run.times;
    if kind == BundleKind::Stable {
        frames.reverse();
        times.reverse();
    }
    LagrangianPath::new(times, frames, tol)
}

struct Run<T: Real> {
    times: Vec<T>,
    frames: Vec<LagrangianFrame<T>>,
    spacing: T,
    step: T,
    limit_frame: LagrangianFrame<T>,
    limit_gap: T,
}

fn integrate<T: Real>(
    sys: &CoefficientSystem<T>,
    lambda: T,
    kind: BundleKind,
    t_trunc: T,
    t_stop: T,
    opts: &BundleOptions,
    tol: &Tolerances<T>,
) -> Result<Run<T>> {
    if !(t_trunc > T::zero()) {
        return Err(Error::Validation("truncation time must be positive".into()));
    }
    let (end, sign) = match kind {
        BundleKind::Stable => (End::Plus, -T::one()),
        BundleKind::Unstable => (End::Minus, T::one()),
    };
    let t_start = -sign * t_trunc;
    let length = (t_stop - t_start) * sign;
    if !(length > T::zero()) {
        return Err(Error::Validation("the stop time must lie inside the truncation window".into()));
    }
    let limit_h = assemble_b_limit(sys, end, lambda)?;
    let limit_pair = spectral_subspaces(&limit_h, tol)?;
    let limit_frame = match kind {
        BundleKind::Stable => limit_pair.minus,
        BundleKind::Unstable => limit_pair.plus,
    };
    let frozen = spectral_subspaces(&assemble_b(sys, t_start, lambda)?, tol)?;
    let frozen_frame = match kind {
        BundleKind::Stable => frozen.minus,
        BundleKind::Unstable => frozen.plus,
    };
    let limit_gap = linalg::gap_sine(limit_frame.columns(), frozen_frame.columns());

    let samples = (length.as_f64() / opts.sample_spacing).ceil().max(1.0) as usize;
    let spacing = length / T::of_usize(samples);
    let time_of = |k: usize| t_start + sign * spacing * T::of_usize(k);
    let jb_at = |t: T| -> Result<DMatrix<T>> { Ok(assemble_b(sys, t, lambda)?.jb) };
    let mut norm_max = T::zero();
    for k in 0..=samples {
        norm_max = norm_max.max(jb_at(time_of(k))?.norm());
    }
    let h_target = T::lit(opts.max_step).min(T::lit(opts.step_factor) / norm_max.max(T::default_epsilon()));
    let substeps = (spacing / h_target).ceil().as_f64().max(1.0) as usize;
    let h = spacing / T::of_usize(substeps);
    if !(h > T::default_epsilon() * t_trunc) {
        return Err(Error::Integration("step size underflow".into()));
    }
    let dt = sign * h;
    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);

    let mut z = limit_frame.columns().clone();
    let mut t = t_start;
    let mut a_now = jb_at(t)?;
    let mut frames = Vec::with_capacity(samples + 1);
    let mut times = Vec::with_capacity(samples + 1);
    frames.push(limit_frame.clone());
    times.push(t_start);
    for k in 1..=samples {
        for _ in 0..substeps {
            let a_mid = jb_at(t + dt * half)?;
            let a_end = jb_at(t + dt)?;
            let k1 = &a_now * &z;
            let k2 = &a_mid * (&z + &k1 * (dt * half));
            let k3 = &a_mid * (&z + &k2 * (dt * half));
            let k4 = &a_end * (&z + &k3 * dt);
            let next = &z + (k1 + (k2 + k3) * T::lit(2.0) + k4) * (dt * sixth);
            let sv = linalg::singular_values(&next);
            if !(sv[sv.len() - 1] > tol.rank_tol * sv[0]) {
                return Err(Error::Integration(format!(
                    "frame lost rank near t = {:.6}",
                    (t + dt).as_f64()
                )));
            }
            z = linalg::qr_orthonormalize(&next);
            t += dt;
            a_now = a_end;
        }
        // Land exactly on the grid to avoid drift in the sample times.
        t = time_of(k);
        let frame = LagrangianFrame::new(z.clone(), tol).map_err(|e| {
            Error::Integration(format!("bundle frame at t = {:.6} is not Lagrangian: {e}", t.as_f64()))
        })?;
        frames.push(frame);
        times.push(t);
    }
    Ok(Run {
        times,
        frames,
        spacing,
        step: h,
        limit_frame,
        limit_gap,
    })
}
