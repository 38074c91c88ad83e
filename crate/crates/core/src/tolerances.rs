use serde::Serialize;

use crate::error::{Error, Result};
use crate::Real;

/// Numerical thresholds used across the crate.
///
/// The `f64` defaults are the certified thresholds reported with every
/// result. Lower precision types get thresholds floored at a multiple of
/// their machine epsilon: `1e4 eps` for the subspace tests, and `100 eps`
/// for the finite-element zero band, which is already scaled by `|K| / |M|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances<T> {
    /// Relative singular value floor for full column rank.
    pub rank_tol: T,
    /// Max-norm bound on `F^T J F` for a Lagrangian frame, and on `M - M^T`.
    pub iso_tol: T,
    /// Relative singular value threshold deciding intersections and sums.
    pub int_tol: T,
    /// Residual bound for `x = y + z` decompositions.
    pub decomp_tol: T,
    /// Relative eigenvalue threshold for inertia of small Gram matrices.
    pub eig_zero_rel: T,
    /// Absolute bound on `|Re mu|` below which a matrix is not hyperbolic.
    pub hyp_tol: T,
    /// Frobenius tail bound for `B(t) - B(+-inf)` at the truncation time.
    pub limit_tol: T,
    /// Agreement bound between a bundle and its limit frame.
    pub bundle_tol: T,
    /// Smallest admissible principal-angle sine between a path and its chart.
    pub margin_min: T,
    /// Largest admissible principal-angle sine between adjacent path samples.
    pub seg_angle_max: T,
    /// Largest admissible frame condition number.
    pub cond_max: T,
    /// Finite-element zero band factor, multiplied by `|K| / |M|`.
    pub fem_zero_factor: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        let floor = T::default_epsilon() * T::lit(1e4);
        let f = |x: f64| {
            let v = T::lit(x);
            if v > floor {
                v
            } else {
                floor
            }
        };
        Self {
            rank_tol: f(1e-10),
            iso_tol: f(1e-8),
            int_tol: f(1e-8),
            decomp_tol: f(1e-8),
            eig_zero_rel: f(1e-8),
            hyp_tol: f(1e-9),
            limit_tol: f(1e-10),
            bundle_tol: f(1e-8),
            margin_min: f(1e-6),
            seg_angle_max: T::lit(0.25),
            cond_max: T::lit(1e12),
            fem_zero_factor: T::lit(1e-7).max(T::default_epsilon() * T::lit(100.0)),
        }
    }
}

impl<T: Real> Tolerances<T> {
    pub const NAMES: [&'static str; 12] = [
        "rank_tol",
        "iso_tol",
        "int_tol",
        "decomp_tol",
        "eig_zero_rel",
        "hyp_tol",
        "limit_tol",
        "bundle_tol",
        "margin_min",
        "seg_angle_max",
        "cond_max",
        "fem_zero_factor",
    ];

    fn slot(&mut self, name: &str) -> Option<&mut T> {
        Some(match name {
            "rank_tol" => &mut self.rank_tol,
            "iso_tol" => &mut self.iso_tol,
            "int_tol" => &mut self.int_tol,
            "decomp_tol" => &mut self.decomp_tol,
            "eig_zero_rel" => &mut self.eig_zero_rel,
            "hyp_tol" => &mut self.hyp_tol,
            "limit_tol" => &mut self.limit_tol,
            "bundle_tol" => &mut self.bundle_tol,
            "margin_min" => &mut self.margin_min,
            "seg_angle_max" => &mut self.seg_angle_max,
            "cond_max" => &mut self.cond_max,
            "fem_zero_factor" => &mut self.fem_zero_factor,
            _ => return None,
        })
    }

    pub fn get(&self, name: &str) -> Option<T> {
        let mut copy = *self;
        copy.slot(name).map(|v| *v)
    }

    /// Overrides one threshold by name.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Validation(format!("tolerance {name} must be positive, got {value}")));
        }
        let slot = self
            .slot(name)
            .ok_or_else(|| Error::Validation(format!("unknown tolerance '{name}'")))?;
        *slot = T::lit(value);
        Ok(())
    }
}
