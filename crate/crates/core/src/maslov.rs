//! Maslov index of a pair of sampled Lagrangian paths.
//!
//! The index is evaluated segment by segment. On each segment a fixed chart
//! Lagrangian `L` transversal to both paths is chosen and the segment
//! contributes `iota(L2(hi), L1(hi); L) - iota(L2(lo), L1(lo); L)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::index::triple_index;
use crate::linalg;
use crate::random::{random_graph_lagrangian, random_lagrangian, seed_from_env, substream};
use crate::symplectic::LagrangianFrame;
use crate::{Real, Tolerances};

/// Number of random charts tried after `L_D` and `L_N` on each segment.
pub const RANDOM_CHARTS: usize = 8;

/// Extra rounds of random charts tried before a segment is declared uncertified.
pub const REFINEMENT_LIMIT: usize = 20;

/// A Lagrangian path sampled at strictly increasing parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianPath<T: Real> {
    ts: Vec<T>,
    frames: Vec<LagrangianFrame<T>>,
}

impl<T: Real> LagrangianPath<T> {
    /// Checks ordering, dimensions and the adjacent-sample gap bound.
    pub fn new(ts: Vec<T>, frames: Vec<LagrangianFrame<T>>, tol: &Tolerances<T>) -> Result<Self> {
        if ts.len() != frames.len() {
            return Err(Error::DimensionMismatch {
                expected: ts.len(),
                got: frames.len(),
            });
        }
        if ts.is_empty() {
            return Err(Error::Validation("a path needs at least one sample".into()));
        }
        let n = frames[0].n();
        for (k, f) in frames.iter().enumerate() {
            if f.n() != n {
                return Err(Error::DimensionMismatch { expected: n, got: f.n() });
            }
            if k > 0 {
                if !(ts[k] > ts[k - 1]) {
                    return Err(Error::Validation(format!(
                        "path parameters must be strictly increasing (sample {k})"
                    )));
                }
                let gap = linalg::gap_sine(frames[k - 1].columns(), f.columns());
                if gap >= tol.seg_angle_max {
                    return Err(Error::Validation(format!(
                        "adjacent samples {} and {k} are {:.3e} apart; refine the path",
                        k - 1,
                        gap.as_f64()
                    )));
                }
            }
        }
        Ok(Self { ts, frames })
    }

    /// The constant path at the given parameters.
    pub fn constant(frame: LagrangianFrame<T>, ts: Vec<T>, tol: &Tolerances<T>) -> Result<Self> {
        let frames = vec![frame; ts.len()];
        Self::new(ts, frames, tol)
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    pub fn n(&self) -> usize {
        self.frames[0].n()
    }

    pub fn ts(&self) -> &[T] {
        &self.ts
    }

    pub fn frames(&self) -> &[LagrangianFrame<T>] {
        &self.frames
    }

    pub fn first(&self) -> &LagrangianFrame<T> {
        &self.frames[0]
    }

    pub fn last(&self) -> &LagrangianFrame<T> {
        &self.frames[self.frames.len() - 1]
    }

    /// `s -> L(-s)` on the reflected parameter interval.
    pub fn reversed(&self) -> Self {
        Self {
            ts: self.ts.iter().rev().map(|&t| -t).collect(),
            frames: self.frames.iter().rev().cloned().collect(),
        }
    }

    /// Samples `lo..=hi`.
    pub fn slice(&self, lo: usize, hi: usize) -> Self {
        Self {
            ts: self.ts[lo..=hi].to_vec(),
            frames: self.frames[lo..=hi].to_vec(),
        }
    }

    /// Applies a constant linear map to every frame.
    pub fn transform(&self, phi: &nalgebra::DMatrix<T>, tol: &Tolerances<T>) -> Result<Self> {
        let frames = self
            .frames
            .iter()
            .map(|f| f.transform(phi, tol))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.ts.clone(), frames, tol)
    }

    /// Keeps every `stride`-th sample and the last one.
    pub fn thinned(&self, stride: usize, tol: &Tolerances<T>) -> Result<Self> {
        let stride = stride.max(1);
        let mut idx: Vec<usize> = (0..self.len()).step_by(stride).collect();
        if *idx.last().unwrap() != self.len() - 1 {
            idx.push(self.len() - 1);
        }
        Self::new(
            idx.iter().map(|&i| self.ts[i]).collect(),
            idx.iter().map(|&i| self.frames[i].clone()).collect(),
            tol,
        )
    }

    /// Largest gap sine between adjacent samples.
    pub fn max_gap(&self) -> T {
        self.frames
            .windows(2)
            .map(|w| linalg::gap_sine(w[0].columns(), w[1].columns()))
            .fold(T::zero(), |a, b| a.max(b))
    }
}

/// One segment of a Maslov computation.
#[derive(Debug, Clone, PartialEq)]
pub struct MaslovSegment<T: Real> {
    pub t_lo: T,
    pub t_hi: T,
    pub lo: usize,
    pub hi: usize,
    pub chart: LagrangianFrame<T>,
    pub contribution: i64,
    /// Smallest principal-angle sine between the chart and either path.
    pub margin: T,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaslovResult<T: Real> {
    pub index: i64,
    pub segments: Vec<MaslovSegment<T>>,
    pub certified: bool,
    pub annotation: Option<String>,
}

impl<T: Real> MaslovResult<T> {
    pub fn min_margin(&self) -> T {
        self.segments
            .iter()
            .map(|s| s.margin)
            .fold(T::one(), |a, b| a.min(b))
    }
}

struct PairGeometry<'a, T: Real> {
    p1: &'a LagrangianPath<T>,
    p2: &'a LagrangianPath<T>,
    /// `need[k]`: margin a chart must exceed at sample `k`.
    need: Vec<T>,
}

impl<'a, T: Real> PairGeometry<'a, T> {
    fn new(p1: &'a LagrangianPath<T>, p2: &'a LagrangianPath<T>, tol: &Tolerances<T>) -> Self {
        let m = p1.len();
        let gaps: Vec<T> = (0..m.saturating_sub(1))
            .map(|k| {
                let g1 = linalg::gap_sine(p1.frames[k].columns(), p1.frames[k + 1].columns());
                let g2 = linalg::gap_sine(p2.frames[k].columns(), p2.frames[k + 1].columns());
                g1.max(g2)
            })
            .collect();
        let need = (0..m)
            .map(|k| {
                let left = if k > 0 { gaps[k - 1] } else { T::zero() };
                let right = if k + 1 < m { gaps[k] } else { T::zero() };
                tol.margin_min + left.max(right)
            })
            .collect();
        Self { p1, p2, need }
    }

    fn margin(&self, chart: &LagrangianFrame<T>, k: usize) -> T {
        let a = linalg::min_angle_sine(chart.columns(), self.p1.frames[k].columns());
        let b = linalg::min_angle_sine(chart.columns(), self.p2.frames[k].columns());
        a.min(b)
    }

    /// Largest `j >= i` with the chart valid on `i..=j`, with the smallest margin seen.
    fn reach(&self, chart: &LagrangianFrame<T>, i: usize) -> Option<(usize, T)> {
        let mut margin = self.margin(chart, i);
        if margin <= self.need[i] {
            return None;
        }
        let mut j = i;
        while j + 1 < self.p1.len() {
            let m = self.margin(chart, j + 1);
            if m <= self.need[j + 1] {
                break;
            }
            margin = margin.min(m);
            j += 1;
        }
        Some((j, margin))
    }
}

fn check_pair<T: Real>(p1: &LagrangianPath<T>, p2: &LagrangianPath<T>) -> Result<()> {
    if p1.n() != p2.n() {
        return Err(Error::DimensionMismatch {
            expected: p1.n(),
            got: p2.n(),
        });
    }
    if p1.len() != p2.len() {
        return Err(Error::Validation(format!(
            "paths must share a parameter grid ({} vs {} samples)",
            p1.len(),
            p2.len()
        )));
    }
    for (a, b) in p1.ts.iter().zip(&p2.ts) {
        let scale = T::one().max(a.abs());
        if (*a - *b).abs() > T::lit(1e-12) * scale {
            return Err(Error::Validation("paths must share a parameter grid".into()));
        }
    }
    Ok(())
}

/// Contribution `iota(L2(hi), L1(hi); L) - iota(L2(lo), L1(lo); L)` of one segment.
pub fn segment_contribution<T: Real>(
    path1: &LagrangianPath<T>,
    path2: &LagrangianPath<T>,
    lo: usize,
    hi: usize,
    chart: &LagrangianFrame<T>,
    tol: &Tolerances<T>,
) -> Result<i64> {
    let end = triple_index(&path2.frames[hi], &path1.frames[hi], chart, tol)? as i64;
    let start = triple_index(&path2.frames[lo], &path1.frames[lo], chart, tol)? as i64;
    Ok(end - start)
}

/// Whether `chart` is transversal to both paths on `lo..=hi` with the required margin.
pub fn chart_is_valid<T: Real>(
    path1: &LagrangianPath<T>,
    path2: &LagrangianPath<T>,
    lo: usize,
    hi: usize,
    chart: &LagrangianFrame<T>,
    tol: &Tolerances<T>,
) -> bool {
    let g = PairGeometry::new(path1, path2, tol);
    (lo..=hi).all(|k| g.margin(chart, k) > g.need[k])
}

fn candidate_charts<T: Real>(n: usize, seed: u64, start: usize, round: usize) -> Vec<LagrangianFrame<T>> {
    let mut out = Vec::with_capacity(RANDOM_CHARTS + 2);
    if round == 0 {
        out.push(LagrangianFrame::dirichlet(n));
        out.push(LagrangianFrame::neumann(n));
    }
    let mut rng = substream(seed, ((start as u64) << 8) | round as u64);
    for k in 0..RANDOM_CHARTS {
        if k % 2 == 0 {
            let scale = [0.5, 1.0, 2.0, 4.0][(k / 2) % 4];
            out.push(random_graph_lagrangian(n, scale, &mut rng));
        } else {
            out.push(random_lagrangian(n, &mut rng));
        }
    }
    out
}

/// Maslov index of the ordered pair `(path1, path2)` with the seed from the environment.
pub fn maslov_pair<T: Real>(
    path1: &LagrangianPath<T>,
    path2: &LagrangianPath<T>,
    tol: &Tolerances<T>,
) -> Result<MaslovResult<T>> {
    maslov_pair_seeded(path1, path2, tol, seed_from_env())
}

/// Maslov index of the ordered pair `(path1, path2)`.
///
/// Segments are grown greedily: among the candidate charts the one valid on
/// the longest run of samples is taken. A chart is valid at a sample when its
/// margin exceeds `margin_min` plus the gap to the neighbouring samples, so
/// no crossing of the chart can hide between samples.
pub fn maslov_pair_seeded<T: Real>(
    path1: &LagrangianPath<T>,
    path2: &LagrangianPath<T>,
    tol: &Tolerances<T>,
    seed: u64,
) -> Result<MaslovResult<T>> {
    check_pair(path1, path2)?;
    let n = path1.n();
    let m = path1.len();
    let geom = PairGeometry::new(path1, path2, tol);

    struct Plan<T: Real> {
        lo: usize,
        hi: usize,
        chart: LagrangianFrame<T>,
        margin: T,
        certified: bool,
    }
    let mut plans: Vec<Plan<T>> = Vec::new();
    let mut i = 0;
    while i + 1 < m {
        let mut best: Option<(usize, T, LagrangianFrame<T>)> = None;
        for round in 0..=REFINEMENT_LIMIT {
            for chart in candidate_charts::<T>(n, seed, i, round) {
                if let Some((j, margin)) = geom.reach(&chart, i) {
                    let better = match &best {
                        None => true,
                        Some((bj, bm, _)) => j > *bj || (j == *bj && margin > *bm),
                    };
                    if better {
                        best = Some((j, margin, chart));
                    }
                }
            }
            if matches!(best, Some((j, _, _)) if j > i) {
                break;
            }
        }
        match best {
            Some((j, margin, chart)) if j > i => {
                plans.push(Plan {
                    lo: i,
                    hi: j,
                    chart,
                    margin,
                    certified: true,
                });
                i = j;
            }
            _ => {
                // No admissible chart across this step: fall back to the chart
                // with the largest margin at both ends and flag the segment.
                let mut fallback: Option<(T, LagrangianFrame<T>)> = None;
                for chart in candidate_charts::<T>(n, seed, i, 0) {
                    let margin = geom.margin(&chart, i).min(geom.margin(&chart, i + 1));
                    if fallback.as_ref().is_none_or(|(bm, _)| margin > *bm) {
                        fallback = Some((margin, chart));
                    }
                }
                let (margin, chart) = fallback.expect("candidate list is never empty");
                plans.push(Plan {
                    lo: i,
                    hi: i + 1,
                    chart,
                    margin,
                    certified: false,
                });
                i += 1;
            }
        }
    }

    let segments = plans
        .into_par_iter()
        .map(|p| {
            let contribution = segment_contribution(path1, path2, p.lo, p.hi, &p.chart, tol)?;
            Ok(MaslovSegment {
                t_lo: path1.ts[p.lo],
                t_hi: path1.ts[p.hi],
                lo: p.lo,
                hi: p.hi,
                chart: p.chart,
                contribution,
                margin: p.margin,
                certified: p.certified,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let index = segments.iter().map(|s| s.contribution).sum();
    let uncertified: Vec<String> = segments
        .iter()
        .filter(|s| !s.certified)
        .map(|s| format!("[{:.6}, {:.6}]", s.t_lo.as_f64(), s.t_hi.as_f64()))
        .collect();
    let certified = uncertified.is_empty();
    let annotation = (!certified).then(|| {
        format!(
            "no transversal chart found after {REFINEMENT_LIMIT} refinement rounds on {}",
            uncertified.join(", ")
        )
    });
    Ok(MaslovResult {
        index,
        segments,
        certified,
        annotation,
    })
}

/// `iota_CLM(l0, L(t))` for a fixed first argument.
pub fn maslov_fixed<T: Real>(
    l0: &LagrangianFrame<T>,
    path: &LagrangianPath<T>,
    tol: &Tolerances<T>,
) -> Result<MaslovResult<T>> {
    let fixed = LagrangianPath::constant(l0.clone(), path.ts.clone(), tol)?;
    maslov_pair(&fixed, path, tol)
}
