//! End-to-end checks of the Morse index identities on concrete problems.
//!
//! Every identity is an equality of integers. Floating point data only feeds
//! integer-valued subroutines, each of which reports whether its own
//! tolerances were met; a report is certified when all of them were.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::{
    assemble_b_limit, boundary_constant, bundle_over, bundle_with, is_hyperbolic, spectral_subspaces,
    threshold_boundary, threshold_nondegeneracy, BundleKind, BundleOptions, CoefficientSystem, End, InvariantBundle,
};
use crate::index::{q_form, triple_index};
use crate::linalg;
use crate::maslov::{maslov_pair_seeded, LagrangianPath, MaslovResult};
use crate::random::DEFAULT_SEED;
use crate::sturm_liouville::{discretize, morse_index, spectral_flow_of, Boundary, MorseIndex, SpectralFlowTrace};
use crate::symplectic::LagrangianFrame;
use crate::{Real, Tolerances};

/// Half-line or whole-line setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Line,
    Plus,
    Minus,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Line => "line",
            Side::Plus => "plus",
            Side::Minus => "minus",
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "line" => Ok(Side::Line),
            "plus" | "+" => Ok(Side::Plus),
            "minus" | "-" => Ok(Side::Minus),
            other => Err(Error::Validation(format!("unknown side '{other}' (line, plus, minus)"))),
        }
    }
}

/// Numerical settings shared by the checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyConfig<T> {
    /// Truncation time `T`.
    pub t_trunc: T,
    /// Mesh nodes on `[-T, T]`; half-lines use the same spacing.
    pub nodes: usize,
    /// Upper end of the shift interval for spectral flow checks.
    pub lambda_max: Option<T>,
    pub bundle: BundleOptions,
    /// Points of the coefficient validation grid.
    pub validation_points: usize,
    /// Seed for random chart draws.
    pub seed: u64,
}

impl<T: Real> VerifyConfig<T> {
    pub fn new(t_trunc: T, nodes: usize) -> Self {
        Self {
            t_trunc,
            nodes,
            lambda_max: None,
            bundle: BundleOptions::default(),
            validation_points: 2001,
            seed: DEFAULT_SEED,
        }
    }

    /// Node count of a half-line mesh with the whole-line spacing.
    pub fn half_nodes(&self) -> usize {
        (self.nodes - 1) / 2 + 1
    }

    fn nodes_for(&self, side: Side) -> usize {
        match side {
            Side::Line => self.nodes,
            _ => self.half_nodes(),
        }
    }
}

/// Tolerance-level facts behind a report.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Certification {
    pub hyperbolic_margin_plus: Option<f64>,
    pub hyperbolic_margin_minus: Option<f64>,
    pub tail_bound: Option<f64>,
    pub tail_ok: Option<bool>,
    pub bundle_limit_gap: Option<f64>,
    pub bundle_ok: Option<bool>,
    pub maslov_certified: Option<bool>,
    pub maslov_min_margin: Option<f64>,
    pub maslov_segments: Option<usize>,
    pub morse_certified: Option<bool>,
    pub zero_tol: Option<f64>,
}

impl Certification {
    pub fn all_ok(&self) -> bool {
        [self.tail_ok, self.bundle_ok, self.maslov_certified, self.morse_certified]
            .iter()
            .all(|f| f.unwrap_or(true))
    }

    fn merge(&mut self, other: &Certification) {
        macro_rules! take {
            ($($f:ident),*) => {$(if other.$f.is_some() { self.$f = other.$f; })*};
        }
        take!(
            hyperbolic_margin_plus,
            hyperbolic_margin_minus,
            tail_bound,
            tail_ok,
            bundle_limit_gap,
            bundle_ok,
            maslov_certified,
            maslov_min_margin,
            maslov_segments,
            morse_certified,
            zero_tol
        );
    }
}

/// Result of one identity check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexReport {
    pub problem: String,
    pub identity: String,
    pub side: Side,
    pub morse: usize,
    pub nullity: usize,
    pub geo: i64,
    pub correction: i64,
    pub lhs: i64,
    pub rhs: i64,
    pub residual: i64,
    pub certified: bool,
    pub certification: Certification,
    /// Further named integers and reals relevant to the identity.
    pub details: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    /// Wall-clock milliseconds per phase; not part of the deterministic output.
    #[serde(skip)]
    pub timings: BTreeMap<String, f64>,
}

impl IndexReport {
    fn new(identity: &str, side: Side) -> Self {
        Self {
            problem: String::new(),
            identity: identity.to_string(),
            side,
            morse: 0,
            nullity: 0,
            geo: 0,
            correction: 0,
            lhs: 0,
            rhs: 0,
            residual: 0,
            certified: false,
            certification: Certification::default(),
            details: BTreeMap::new(),
            notes: Vec::new(),
            timings: BTreeMap::new(),
        }
    }

    pub fn with_problem(mut self, name: &str) -> Self {
        self.problem = name.to_string();
        self
    }

    fn finish(&mut self) {
        self.residual = self.lhs - self.rhs;
        self.certified = self.certification.all_ok();
    }
}

struct Stopwatch(Instant);

impl Stopwatch {
    fn start() -> Self {
        Self(Instant::now())
    }

    fn lap(&mut self, report: &mut IndexReport, key: &str) {
        let ms = self.0.elapsed().as_secs_f64() * 1e3;
        *report.timings.entry(key.to_string()).or_insert(0.0) += ms;
        self.0 = Instant::now();
    }
}

/// A geometric index with the underlying Maslov computation.
#[derive(Debug, Clone)]
pub struct GeometricIndex<T: Real> {
    pub value: i64,
    pub maslov: MaslovResult<T>,
    pub certification: Certification,
}

fn maslov_certification<T: Real>(m: &MaslovResult<T>) -> Certification {
    Certification {
        maslov_certified: Some(m.certified),
        maslov_min_margin: Some(m.min_margin().as_f64()),
        maslov_segments: Some(m.segments.len()),
        ..Default::default()
    }
}

fn bundle_certification<T: Real>(bundles: &[&InvariantBundle<T>], tol: &Tolerances<T>) -> Certification {
    let gap = bundles.iter().map(|b| b.limit_gap).fold(T::zero(), |a, b| a.max(b));
    Certification {
        bundle_limit_gap: Some(gap.as_f64()),
        bundle_ok: Some(gap <= tol.bundle_tol),
        ..Default::default()
    }
}

fn bundles_for<T: Real>(
    sys: &CoefficientSystem<T>,
    lambda: T,
    cfg: &VerifyConfig<T>,
    tol: &Tolerances<T>,
    kinds: &[BundleKind],
) -> Result<Vec<InvariantBundle<T>>> {
    use rayon::prelude::*;
    kinds
        .par_iter()
        .map(|&k| bundle_with(sys, lambda, k, cfg.t_trunc, &cfg.bundle, tol))
        .collect()
}

/// `igeo = -iota_CLM(E^s(tau), E^u(-tau); tau ∈ [0, T])`.
pub fn geometric_index_line<T: Real>(
    sys: &CoefficientSystem<T>,
    lambda: T,
    cfg: &VerifyConfig<T>,
    tol: &Tolerances<T>,
) -> Result<GeometricIndex<T>> {
    let b = bundles_for(sys, lambda, cfg, tol, &[BundleKind::Stable, BundleKind::Unstable])?;
    geometric_from_paths(&b[0].path, &b[1].path, cfg.seed, tol, bundle_certification(&[&b[0], &b[1]], tol))
}

fn geometric_from_paths<T: Real>(
    first: &LagrangianPath<T>,
    second: &LagrangianPath<T>,
    seed: u64,
    tol: &Tolerances<T>,
    mut cert: Certification,
) -> Result<GeometricIndex<T>> {
    let m = maslov_pair_seeded(first, second, tol, seed)?;
    cert.merge(&maslov_certification(&m));
    Ok(GeometricIndex {
        value: -m.index,
        maslov: m,
        certification: cert,
    })
}

/// `igeo+ = -iota_CLM(E^s(tau), L0)` or `igeo- = -iota_CLM(L0, E^u(-tau))` over `tau ∈ [0, T]`.
pub fn geometric_index_half<T: Real>(
    sys: &CoefficientSystem<T>,
    l0: &LagrangianFrame<T>,
    side: Side,
    lambda: T,
    cfg: &VerifyConfig<T>,
    tol: &Tolerances<T>,
) -> Result<GeometricIndex<T>> {
    let kind = match side {
        Side::Plus => BundleKind::Stable,
        Side::Minus => BundleKind::Unstable,
        Side::Line => return Err(Error::Validation("a half-line index needs side plus or minus".into())),
    };
    let b = bundle_with(sys, lambda, kind, cfg.t_trunc, &cfg.bundle, tol)?;
    let fixed = LagrangianPath::constant(l0.clone(), b.path.ts().to_vec(), tol)?;
    let cert = bundle_certification(&[&b], tol);
    match side {
        Side::Plus => geometric_from_paths(&b.path, &fixed, cfg.seed, tol, cert),
        _ => geometric_from_paths(&fixed, &b.path, cfg.seed, tol, cert),
    }
}

/// `E^s(+inf)` and `E^u(-inf)` at shift `lambda`.
pub fn limit_spaces<T: Real>(
    sys: &CoefficientSystem<T>,
    lambda: T,
    tol: &Tolerances<T>,
) -> Result<(LagrangianFrame<T>, LagrangianFrame<T>)> {
    let plus = spectral_subspaces(&assemble_b_limit(sys, End::Plus, lambda)?, tol)?;
    let minus = spectral_subspaces(&assemble_b_limit(sys, End::Minus, lambda)?, tol)?;
    Ok((plus.minus, minus.plus))
}

/// `iota(E^u(-inf), E^s(+inf); L_D)`.
pub fn correction_line<T: Real>(sys: &CoefficientSystem<T>, lambda: T, tol: &Tolerances<T>) -> Result<i64> {
    let (es, eu) = limit_spaces(sys, lambda, tol)?;
    Ok(triple_index(&eu, &es, &LagrangianFrame::dirichlet(sys.n()), tol)? as i64)
}

/// Side-appropriate half-line correction:
/// `iota(L_D, L0; E^s(+inf))` on the right, `iota(E^u(-inf), L0; L_D)` on the left.
pub fn correction_half<T: Real>(
    sys: &CoefficientSystem<T>,
    l0: &LagrangianFrame<T>,
    side: Side,
    lambda: T,
    tol: &Tolerances<T>,
) -> Result<i64> {
    let (es, eu) = limit_spaces(sys, lambda, tol)?;
    let ld = LagrangianFrame::dirichlet(sys.n());
    let v = match side {
        Side::Plus => triple_index(&ld, l0, &es, tol)?,
        Side::Minus => triple_index(&eu, l0, &ld, tol)?,
        Side::Line => return Err(Error::Validation("a half-line correction needs side plus or minus".into())),
    };
    Ok(v as i64)
}

fn boundary_for<T: Real>(side: Side, l0: &LagrangianFrame<T>) -> Boundary<T> {
    match side {
        Side::Line => Boundary::Line,
        Side::Plus => Boundary::Plus(l0.clone()),
        Side::Minus => Boundary::Minus(l0.clone()),
    }
}

/// Discrete Morse index of `A` (or a half-line `A±`) at shift `lambda`.
pub fn morse_for<T: Real>(
    sys: &CoefficientSystem<T>,
    side: Side,
    l0: &LagrangianFrame<T>,
    lambda: T,
    cfg: &VerifyConfig<T>,
    tol: &Tolerances<T>,
) -> Result<MorseIndex> {
    let op = discretize(sys, &boundary_for(side, l0), cfg.t_trunc, cfg.nodes_for(side), lambda, tol)?;
    morse_index(&op)
}

fn hyperbolicity<T: Real>(sys: &CoefficientSystem<T>, lambda: T, tol: &Tolerances<T>) -> Result<Certification> {
    let (okp, mp) = is_hyperbolic(&assemble_b_limit(sys, End::Plus, lambda)?, tol);
    let (okm, mm) = is_hyperbolic(&assemble_b_limit(sys, End::Minus, lambda)?, tol);
    if !(okp && okm) {
        return Err(Error::NotHyperbolic {
            margin: mp.min(mm).as_f64(),
        });
    }
    Ok(Certification {
        hyperbolic_margin_plus: Some(mp.as_f64()),
        hyperbolic_margin_minus: Some(mm.as_f64()),
        ..Default::default()
    })
}

fn validated<T: Real>(sys: &CoefficientSystem<T>, cfg: &VerifyConfig<T>, tol: &Tolerances<T>) -> Result<Certification> {
    if !sys.f2() {
        return Err(Error::Validation("(F2) must be declared for the Morse index identities".into()));
    }
    let rep = sys.validate(cfg.t_trunc, cfg.validation_points, tol)?;
    let mut cert = hyperbolicity(sys, T::zero(), tol)?;
    cert.tail_bound = Some(rep.tail_bound);
    cert.tail_ok = Some(rep.tail_ok);
    Ok(cert)
}

/// `iMor(A) = igeo + iota(E^u(-inf), E^s(+inf); L_D)`.
pub fn verify_theorem_c<T: Real>(sys: &CoefficientSystem<T>, cfg: &VerifyConfig<T>, tol: &Tolerances<T>) -> Result<IndexReport> {
    let mut report = IndexReport::new("C", Side::Line);
    let mut clock = Stopwatch::start();
    let cert = validated(sys, cfg, tol)?;
    report.certification.merge(&cert);
    let ld = LagrangianFrame::dirichlet(sys.n());
    let mi = morse_for(sys, Side::Line, &ld, T::zero(), cfg, tol)?;
    clock.lap(&mut report, "morse");
    let geo = geometric_index_line(sys, T::zero(), cfg, tol)?;
    clock.lap(&mut report, "geometric");
    let corr = correction_line(sys, T::zero(), tol)?;
    report.certification.merge(&geo.certification);
    report.certification.morse_certified = Some(mi.certified);
    report.certification.zero_tol = Some(mi.zero_tol);
    report.morse = mi.morse;
    report.nullity = mi.nullity;
    report.geo = geo.value;
    report.correction = corr;
    report.lhs = mi.morse as i64;
    report.rhs = geo.value + corr;
    report.finish();
    Ok(report)
}

/// `iMor(A±, L0) = igeo±_{L0} + correction` on one half-line.
pub fn verify_theorem_d<T: Real>(
    sys: &CoefficientSystem<T>,
    l0: &LagrangianFrame<T>,
    side: Side,
    cfg: &VerifyConfig<T>,
    tol: &Tolerances<T>,
) -> Result<IndexReport> {
    if side == Side::Line {
        return Err(Error::Validation("the half-line identity needs side plus or minus".into()));
    }
    let mut report = IndexReport::new("D", side);
    let mut clock = Stopwatch::start();
    let cert = validated(sys, cfg, tol)?;
    report.certification.merge(&cert);
    let mi = morse_for(sys, side, l0, T::zero(), cfg, tol)?;
    clock.lap(&mut report, "morse");
    let geo = geometric_index_half(sys, l0, side, T::zero(), cfg, tol)?;
    clock.lap(&mut report, "geometric");
    let corr = correction_half(sys, l0, side, T::zero(), tol)?;
    report.certification.merge(&geo.certification);
    report.certification.morse_certified = Some(mi.certified);
    report.certification.zero_tol = Some(mi.zero_tol);

    // m+(Q(L_D, L0; E^s(+inf))) vanishes at the half-line threshold.
    if side == Side::Plus {
        let c0 = boundary_constant(l0, tol).c0;
        let lhat = threshold_boundary(sys.constants(), c0);
        let (es, _) = limit_spaces(sys, lhat, tol)?;
        let q = q_form(&LagrangianFrame::dirichlet(sys.n()), l0, &es, tol)?;
        let pos = q.inertia(tol).pos;
        report.details.insert("threshold_boundary".into(), lhat.as_f64());
        report.details.insert("q_form_positive_at_threshold".into(), pos as f64);
        if pos != 0 {
            report.notes.push(format!("m+(Q(L_D, L0; E^s(+inf))) = {pos} at the half-line threshold"));
        }
    }

    report.morse = mi.morse;
    report.nullity = mi.nullity;
    report.geo = geo.value;
    report.correction = corr;
    report.lhs = mi.morse as i64;
    report.rhs = geo.value + corr;
    report.finish();
    Ok(report)
}

/// `iMor(A±, L0) - iMor(A±, L_D)` against the triple index of the bundle at `t = 0`.
pub fn verify_dirichlet_difference<T: Real>(
    sys: &CoefficientSystem<T>,
    l0: &LagrangianFrame<T>,
    side: Side,
    cfg: &VerifyConfig<T>,
    tol: &Tolerances<T>,
) -> Result<IndexReport> {
    let kind = match side {
        Side::Plus => BundleKind::Stable,
        Side::Minus => BundleKind::Unstable,
        Side::Line => return Err(Error::Validation("the boundary comparison needs side plus or minus".into())),
    };
    let mut report = IndexReport::new("dirichlet", side);
    let mut clock = Stopwatch::start();
    let cert = validated(sys, cfg, tol)?;
    report.certification.merge(&cert);
    let ld = LagrangianFrame::dirichlet(sys.n());
    let general = morse_for(sys, side, l0, T::zero(), cfg, tol)?;
    let dirichlet = morse_for(sys, side, &ld, T::zero(), cfg, tol)?;
    clock.lap(&mut report, "morse");
    let b = bundle_with(sys, T::zero(), kind, cfg.t_trunc, &cfg.bundle, tol)?;
    clock.lap(&mut report, "bundle");
    let e0 = b.at_origin();
    let tri = match side {
        Side::Plus => triple_index(&ld, l0, e0, tol)?,
        _ => triple_index(e0, l0, &ld, tol)?,
    } as i64;
    report.certification.merge(&bundle_certification(&[&b], tol));
    report.certification.morse_certified = Some(general.certified && dirichlet.certified);
    report.certification.zero_tol = Some(general.zero_tol);
    report.morse = general.morse;
    report.nullity = general.nullity;
    report.correction = tri;
    report.details.insert("morse_dirichlet".into(), dirichlet.morse as f64);
    report.lhs = general.morse as i64 - dirichlet.morse as i64;
    report.rhs = tri;
    report.finish();
    Ok(report)
}

/// Samples of `lambda -> (E^s_lambda(+inf), E^u_lambda(-inf))` on `[a, b]`,
/// refined until adjacent frames are closer than `seg_angle_max / 2`.
pub fn limit_space_paths<T: Real>(
    sys: &CoefficientSystem<T>,
    a: T,
    b: T,
    points: usize,
    tol: &Tolerances<T>,
) -> Result<(LagrangianPath<T>, LagrangianPath<T>)> {
    let points = points.max(2);
    let mut lambdas: Vec<T> = (0..points)
        .map(|k| a + (b - a) * T::of_usize(k) / T::of_usize(points - 1))
        .collect();
    let mut frames: Vec<(LagrangianFrame<T>, LagrangianFrame<T>)> = lambdas
        .iter()
        .map(|&l| limit_spaces(sys, l, tol))
        .collect::<Result<_>>()?;
    let limit = tol.seg_angle_max * T::lit(0.5);
    for _ in 0..30 {
        let mut new_l = vec![lambdas[0]];
        let mut new_f = vec![frames[0].clone()];
        let mut refined = false;
        for k in 1..lambdas.len() {
            let g1 = linalg::gap_sine(frames[k - 1].0.columns(), frames[k].0.columns());
            let g2 = linalg::gap_sine(frames[k - 1].1.columns(), frames[k].1.columns());
            if g1.max(g2) >= limit {
                let mid = (lambdas[k - 1] + lambdas[k]) * T::lit(0.5);
                new_l.push(mid);
                new_f.push(limit_spaces(sys, mid, tol)?);
                refined = true;
            }
            new_l.push(lambdas[k]);
            new_f.push(frames[k].clone());
        }
        lambdas = new_l;
        frames = new_f;
        if !refined {
            break;
        }
    }
    let (es, eu): (Vec<_>, Vec<_>) = frames.into_iter().unzip();
    Ok((
        LagrangianPath::new(lambdas.clone(), es, tol)?,
        LagrangianPath::new(lambdas, eu, tol)?,
    ))
}

/// `iota_CLM(E^s_lambda(+inf), E^u_lambda(-inf); lambda ∈ [a, b])`.
pub fn limit_path_maslov<T: Real>(
    sys: &CoefficientSystem<T>,
    a: T,
    b: T,
    points: usize,
    seed: u64,
    tol: &Tolerances<T>,
) -> Result<MaslovResult<T>> {
    let (es, eu) = limit_space_paths(sys, a, b, points, tol)?;
    maslov_pair_seeded(&es, &eu, tol, seed)
}

/// Operator-side spectral flow against the Maslov-side expression on `[0, lambda_max]`.
///
/// The Maslov side is `igeo(0) - igeo(lambda_max) - iota_CLM(limit pair; lambda)`,
/// with the half-line analogues using `L0` in place of the opposite bundle.
pub fn verify_theorem_b<T: Real>(
    sys: &CoefficientSystem<T>,
    side: Side,
    l0: &LagrangianFrame<T>,
    cfg: &VerifyConfig<T>,
    tol: &Tolerances<T>,
) -> Result<(IndexReport, SpectralFlowTrace)> {
    let mut report = IndexReport::new("B", side);
    let mut clock = Stopwatch::start();
    let cert = validated(sys, cfg, tol)?;
    report.certification.merge(&cert);
    let threshold = match side {
        Side::Line => threshold_nondegeneracy(sys.constants()),
        _ => threshold_boundary(sys.constants(), boundary_constant(l0, tol).c0),
    };
    let lambda_max = cfg.lambda_max.unwrap_or(threshold);
    report.details.insert("lambda_max".into(), lambda_max.as_f64());
    report.details.insert("threshold".into(), threshold.as_f64());
    report
        .notes
        .push(format!("shift interval [0, {}] with R + lambda I", lambda_max.as_f64()));
    if lambda_max < threshold {
        report.notes.push(format!(
            "lambda_max {} is below the non-degeneracy threshold {}; positivity at lambda_max is checked numerically",
            lambda_max.as_f64(),
            threshold.as_f64()
        ));
    }

    let op = discretize(sys, &boundary_for(side, l0), cfg.t_trunc, cfg.nodes_for(side), T::zero(), tol)?;
    let trace = spectral_flow_of(&op, lambda_max)?;
    clock.lap(&mut report, "sweep");
    if trace.partition_sum != trace.spectral_flow {
        report.notes.push(format!(
            "partition sum {} differs from the count difference {}",
            trace.partition_sum, trace.spectral_flow
        ));
    }

    let (g0, g1) = match side {
        Side::Line => (
            geometric_index_line(sys, T::zero(), cfg, tol)?,
            geometric_index_line(sys, lambda_max, cfg, tol)?,
        ),
        _ => (
            geometric_index_half(sys, l0, side, T::zero(), cfg, tol)?,
            geometric_index_half(sys, l0, side, lambda_max, cfg, tol)?,
        ),
    };
    clock.lap(&mut report, "geometric");
    let limit = match side {
        Side::Line => limit_path_maslov(sys, T::zero(), lambda_max, trace.lambdas.len(), cfg.seed, tol)?,
        _ => {
            let (es, eu) = limit_space_paths(sys, T::zero(), lambda_max, trace.lambdas.len(), tol)?;
            let fixed = LagrangianPath::constant(l0.clone(), es.ts().to_vec(), tol)?;
            if side == Side::Plus {
                maslov_pair_seeded(&es, &fixed, tol, cfg.seed)?
            } else {
                maslov_pair_seeded(&fixed, &eu, tol, cfg.seed)?
            }
        }
    };
    clock.lap(&mut report, "limit_path");

    report.certification.merge(&g0.certification);
    let maslov_ok = g0.maslov.certified && g1.maslov.certified && limit.certified;
    report.certification.maslov_certified = Some(maslov_ok);
    report.certification.zero_tol = Some(trace.zero_tol);
    report.certification.morse_certified = Some(trace.monotone && trace.partition_sum == trace.spectral_flow);
    report.morse = trace.morse_counts[0];
    report.nullity = trace.nullities[0];
    report.geo = g0.value;
    report.correction = -limit.index;
    report.details.insert("geo_at_lambda_max".into(), g1.value as f64);
    report.details.insert("limit_path_maslov".into(), limit.index as f64);
    report.details.insert("partition_sum".into(), trace.partition_sum as f64);
    for (k, c) in trace.crossings.iter().enumerate() {
        report.details.insert(format!("crossing_{k}"), c.lambda);
    }
    report.lhs = trace.spectral_flow;
    report.rhs = g0.value - g1.value - limit.index;
    report.finish();
    Ok((report, trace))
}

/// Which reading of the left half-line transversality statement holds at
/// the half-line threshold: `E^u(-tau) ∩ L0 = 0` and/or `E^s(-tau) ∩ L0 = 0`
/// for all sampled `tau >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfLineReadings {
    pub lambda: f64,
    pub unstable_reading: bool,
    pub stable_reading: bool,
    pub unstable_min_angle: f64,
    pub stable_min_angle: f64,
}

pub fn half_line_readings<T: Real>(
    sys: &CoefficientSystem<T>,
    l0: &LagrangianFrame<T>,
    cfg: &VerifyConfig<T>,
    tol: &Tolerances<T>,
) -> Result<HalfLineReadings> {
    let c0 = boundary_constant(l0, tol).c0;
    let lambda = threshold_boundary(sys.constants(), c0);
    let eu = bundle_over(sys, lambda, BundleKind::Unstable, cfg.t_trunc, T::zero(), &cfg.bundle, tol)?;
    let es = bundle_over(sys, lambda, BundleKind::Stable, cfg.t_trunc, -cfg.t_trunc, &cfg.bundle, tol)?;
    let min_angle = |p: &LagrangianPath<T>, upto: T| {
        p.ts()
            .iter()
            .zip(p.frames())
            .filter(|(t, _)| **t <= upto)
            .map(|(_, f)| linalg::min_angle_sine(f.columns(), l0.columns()))
            .fold(T::one(), |a, b| a.min(b))
    };
    let mu = min_angle(&eu, T::zero());
    let ms = min_angle(&es, T::zero());
    Ok(HalfLineReadings {
        lambda: lambda.as_f64(),
        unstable_reading: mu > tol.int_tol,
        stable_reading: ms > tol.int_tol,
        unstable_min_angle: mu.as_f64(),
        stable_min_angle: ms.as_f64(),
    })
}

/// `E^u(-tau) ∩ E^s(tau) = 0` for every sampled `tau` at shift `lambda`.
pub fn line_transversality<T: Real>(
    sys: &CoefficientSystem<T>,
    lambda: T,
    cfg: &VerifyConfig<T>,
    tol: &Tolerances<T>,
) -> Result<(bool, f64)> {
    let b = bundles_for(sys, lambda, cfg, tol, &[BundleKind::Stable, BundleKind::Unstable])?;
    let m = b[0]
        .path
        .frames()
        .iter()
        .zip(b[1].path.frames())
        .map(|(s, u)| linalg::min_angle_sine(s.columns(), u.columns()))
        .fold(T::one(), |a, c| a.min(c));
    Ok((m > tol.int_tol, m.as_f64()))
}
