//! Randomized invariant checks with oracles that avoid the library's own
//! index machinery. Each check draws its inputs from a seed and returns a
//! message on failure.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use symmorse::hamiltonian::{det_criterion, hamiltonian_from_blocks, is_hyperbolic, spectral_subspaces, CoefficientSystem, Constants, Evaluation};
use symmorse::linalg;
use symmorse::maslov::{chart_is_valid, maslov_pair_seeded, segment_contribution, LagrangianPath};
use symmorse::random::{random_lagrangian, random_matrix, random_spd, random_symmetric, random_symplectic};
use symmorse::sturm_liouville::{discretize, morse_index, Boundary};
use symmorse::symplectic::LagrangianFrame;
use symmorse::verify::correction_line;
use symmorse::{hormander_index, hormander_index_dual, intersect, q_form, triple_index, Tol};

pub type Check = fn(u64) -> Result<(), String>;

pub struct Suite {
    pub name: &'static str,
    pub check: Check,
}

pub const CASES: usize = 256;

pub fn suites() -> Vec<Suite> {
    vec![
        Suite { name: "triple index vs transversal-delta oracle", check: triple_index_oracle },
        Suite { name: "hormander two expressions", check: hormander_agreement },
        Suite { name: "triple index symplectic invariance", check: triple_index_invariance },
        Suite { name: "intersection symmetry and invariance", check: intersection_dims },
        Suite { name: "q-form kernel identity", check: kernel_identity },
        Suite { name: "maslov n=1 crossing count", check: maslov_crossing_count },
        Suite { name: "maslov reversal", check: maslov_reversal },
        Suite { name: "maslov symplectic invariance", check: maslov_invariance },
        Suite { name: "maslov refinement and concatenation", check: maslov_refinement_concatenation },
        Suite { name: "maslov chart independence", check: maslov_chart_independence },
        Suite { name: "spectral subspaces transversal to L_D", check: spectral_transversality },
        Suite { name: "morse counts monotone in lambda", check: morse_monotone },
        Suite { name: "det criterion equals hyperbolicity", check: det_criterion_agreement },
        Suite { name: "scalar correction cases", check: scalar_correction },
    ]
}

/// Runs `cases` seeds starting at `base`, returning the failure messages.
pub fn run_suite(suite: &Suite, base: u64, cases: usize) -> Vec<String> {
    (0..cases as u64)
        .filter_map(|k| (suite.check)(base + k).err().map(|m| format!("seed {}: {m}", base + k)))
        .collect()
}

pub fn tol() -> Tol {
    Tol::default()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Lines in the `(p_i, q_i)` plane used to build direct-sum Lagrangians.
const LINES: [(f64, f64); 5] = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, -1.0), (2.0, 1.0)];

/// `span{(sin theta, cos theta)}` in `R^2`, so `theta = 0` is `L_N`.
pub fn line(theta: f64) -> LagrangianFrame<f64> {
    LagrangianFrame::new(DMatrix::from_column_slice(2, 1, &[theta.sin(), theta.cos()]), &tol()).unwrap()
}

/// The direct sum of coordinate lines `LINES[choice[i]]`.
pub fn direct_sum(choice: &[usize]) -> LagrangianFrame<f64> {
    let n = choice.len();
    let mut m = DMatrix::zeros(2 * n, n);
    for (i, &c) in choice.iter().enumerate() {
        m[(i, i)] = LINES[c].0;
        m[(n + i, i)] = LINES[c].1;
    }
    LagrangianFrame::new(m, &tol()).unwrap()
}

fn pick(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..LINES.len())).collect()
}

/// Three or four Lagrangians with a mix of generic and degenerate positions.
fn frames(rng: &mut ChaCha8Rng, count: usize) -> (usize, Vec<LagrangianFrame<f64>>, Vec<Vec<usize>>) {
    let n = rng.random_range(1..=3);
    let choices: Vec<Vec<usize>> = (0..count).map(|_| pick(rng, n)).collect();
    let mode = rng.random_range(0..3);
    let out = match mode {
        0 => (0..count).map(|_| random_lagrangian(n, rng)).collect(),
        _ => {
            let raw: Vec<_> = choices.iter().map(|c| direct_sum(c)).collect();
            if mode == 1 {
                raw
            } else {
                let phi = random_symplectic::<f64, _>(n, rng);
                raw.iter().map(|f| f.transform(&phi, &tol()).unwrap()).collect()
            }
        }
    };
    (n, out, choices)
}

fn omega_gram(y: &DMatrix<f64>, z: &DMatrix<f64>) -> DMatrix<f64> {
    let n = y.nrows() / 2;
    DMatrix::from_fn(y.ncols(), z.ncols(), |i, j| {
        (0..n)
            .map(|k| y[(k, i)] * z[(n + k, j)] - y[(n + k, i)] * z[(k, j)])
            .sum()
    })
}

fn orthonormal(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.clone().qr().q()
}

fn smallest_sv(m: &DMatrix<f64>) -> f64 {
    let eig = SymmetricEigen::new(m.transpose() * m).eigenvalues;
    eig.min().max(0.0).sqrt()
}

fn transversal(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    smallest_sv(&linalg::hcat(&orthonormal(a), &orthonormal(b)))
}

/// Count of negative eigenvalues of `Q(alpha, delta; beta)` with `delta` transversal to `beta`.
fn negatives(alpha: &DMatrix<f64>, delta: &DMatrix<f64>, beta: &DMatrix<f64>) -> usize {
    let n = alpha.ncols();
    let stacked = linalg::hcat(delta, beta);
    let c = stacked.lu().solve(alpha).expect("delta is transversal to beta");
    let y = delta * c.rows(0, n);
    let z = beta * c.rows(n, n);
    let g = omega_gram(&y, &z);
    let g = (&g + g.transpose()) * 0.5;
    let eig = SymmetricEigen::new(g).eigenvalues;
    let scale = eig.iter().fold(0.0f64, |a, b| a.max(b.abs())) + 1.0;
    eig.iter().filter(|&&e| e < -1e-8 * scale).count()
}

/// `iMor Q(a, d; b) + iMor Q(b, d; k) - iMor Q(a, d; k)` with a random
/// graph Lagrangian `d` transversal to all three.
pub fn triple_index_by_delta(
    a: &LagrangianFrame<f64>,
    b: &LagrangianFrame<f64>,
    k: &LagrangianFrame<f64>,
    rng: &mut ChaCha8Rng,
) -> i64 {
    let n = a.n();
    let mut s = random_symmetric::<f64, _>(n, 1.0, rng);
    let mut delta = linalg::vcat(&s, &DMatrix::identity(n, n));
    for attempt in 0..60 {
        let ok = [a, b, k].iter().all(|f| transversal(&delta, f.columns()) > 1e-3);
        if ok {
            break;
        }
        s = if attempt < 50 {
            random_symmetric(n, 1.0, rng)
        } else {
            &s + random_symmetric::<f64, _>(n, 0.1, rng)
        };
        delta = linalg::vcat(&s, &DMatrix::identity(n, n));
    }
    let (a, b, k) = (a.columns(), b.columns(), k.columns());
    negatives(a, &delta, b) as i64 + negatives(b, &delta, k) as i64 - negatives(a, &delta, k) as i64
}

pub fn triple_index_oracle(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (n, f, _) = frames(&mut r, 3);
    let lib = triple_index(&f[0], &f[1], &f[2], &tol()).map_err(|e| e.to_string())?;
    if lib > n {
        return Err(format!("index {lib} outside [0, {n}]"));
    }
    let oracle = triple_index_by_delta(&f[0], &f[1], &f[2], &mut r);
    if lib as i64 != oracle {
        return Err(format!("n={n}: library {lib}, oracle {oracle}"));
    }
    Ok(())
}

pub fn hormander_agreement(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (_, f, _) = frames(&mut r, 4);
    let t = tol();
    let s1 = hormander_index(&f[0], &f[1], &f[2], &f[3], &t).map_err(|e| e.to_string())?;
    let s2 = hormander_index_dual(&f[0], &f[1], &f[2], &f[3], &t).map_err(|e| e.to_string())?;
    let oracle = triple_index_by_delta(&f[0], &f[1], &f[3], &mut r) - triple_index_by_delta(&f[0], &f[1], &f[2], &mut r);
    if s1 != s2 || s1 != oracle {
        return Err(format!("first {s1}, second {s2}, oracle {oracle}"));
    }
    Ok(())
}

pub fn triple_index_invariance(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (n, f, _) = frames(&mut r, 3);
    let t = tol();
    let phi = random_symplectic::<f64, _>(n, &mut r);
    let g: Vec<_> = f.iter().map(|x| x.transform(&phi, &t).unwrap()).collect();
    let a = triple_index(&f[0], &f[1], &f[2], &t).map_err(|e| e.to_string())?;
    let b = triple_index(&g[0], &g[1], &g[2], &t).map_err(|e| e.to_string())?;
    if a != b {
        return Err(format!("{a} before, {b} after the symplectic map"));
    }
    Ok(())
}

pub fn intersection_dims(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let n = r.random_range(1..=3);
    let (ca, cb) = (pick(&mut r, n), pick(&mut r, n));
    let expected = ca.iter().zip(&cb).filter(|(x, y)| x == y).count();
    let phi = random_symplectic::<f64, _>(n, &mut r);
    let t = tol();
    let a = direct_sum(&ca).transform(&phi, &t).unwrap();
    let b = direct_sum(&cb).transform(&phi, &t).unwrap();
    let ab = intersect(&a, &b, &t).map_err(|e| e.to_string())?.dim;
    let ba = intersect(&b, &a, &t).map_err(|e| e.to_string())?.dim;
    let raw = intersect(&direct_sum(&ca), &direct_sum(&cb), &t).map_err(|e| e.to_string())?.dim;
    if ab != expected || ba != expected || raw != expected {
        return Err(format!("expected {expected}, got {ab}/{ba}/{raw}"));
    }
    Ok(())
}

pub fn kernel_identity(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let n = r.random_range(1..=3);
    let c: Vec<Vec<usize>> = (0..3).map(|_| pick(&mut r, n)).collect();
    let (mut domain, mut kernel) = (0, 0);
    for ((&a, &b), &d) in c[0].iter().zip(&c[1]).zip(&c[2]) {
        if b != d || a == b {
            domain += 1;
        }
        if a == b || a == d {
            kernel += 1;
        }
    }
    let phi = random_symplectic::<f64, _>(n, &mut r);
    let t = tol();
    let f: Vec<_> = c.iter().map(|x| direct_sum(x).transform(&phi, &t).unwrap()).collect();
    let q = q_form(&f[0], &f[1], &f[2], &t).map_err(|e| e.to_string())?;
    let eig = if q.dim() == 0 {
        nalgebra::DVector::zeros(0)
    } else {
        SymmetricEigen::new(q.gram.clone()).eigenvalues
    };
    let scale = eig.iter().fold(0.0f64, |a, b| a.max(b.abs())) + 1.0;
    let null = eig.iter().filter(|e| e.abs() <= 1e-8 * scale).count();
    let asym = linalg::max_abs(&(&q.gram - q.gram.transpose()));
    if q.dim() != domain || null != kernel || asym > 1e-8 {
        return Err(format!(
            "domain {} (expected {domain}), kernel {null} (expected {kernel}), asymmetry {asym:e}",
            q.dim()
        ));
    }
    Ok(())
}

fn sample_count(speed: f64, step: f64) -> usize {
    ((speed / step).ceil() as usize).max(8) + 8
}

fn grid(m: usize) -> Vec<f64> {
    (0..m).map(|k| k as f64 / (m - 1) as f64).collect()
}

fn angle_path(f: impl Fn(f64) -> f64, ts: &[f64]) -> LagrangianPath<f64> {
    LagrangianPath::new(ts.to_vec(), ts.iter().map(|&t| line(f(t))).collect(), &tol()).unwrap()
}

fn dist_to_pi_multiple(x: f64) -> f64 {
    let r = x.rem_euclid(PI);
    r.min(PI - r)
}

/// Signed count of `theta(t) - psi(t)` passing through multiples of `pi`.
pub fn crossing_oracle(d0: f64, d1: f64) -> i64 {
    (d1 / PI).floor() as i64 - (d0 / PI).floor() as i64
}

pub fn maslov_crossing_count(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    loop {
        let (t0, a, b, w) = (
            r.random_range(-3.0..3.0),
            r.random_range(-8.0..8.0),
            r.random_range(-2.0..2.0),
            r.random_range(1.0..12.0),
        );
        let moving = r.random_bool(0.5);
        let (s0, c) = if moving {
            (r.random_range(-3.0..3.0), r.random_range(-5.0..5.0))
        } else {
            (0.0, 0.0)
        };
        let theta = move |t: f64| t0 + a * t + b * (w * t).sin();
        let psi = move |t: f64| s0 + c * t;
        let (d0, d1) = (theta(0.0) - psi(0.0), theta(1.0) - psi(1.0));
        if dist_to_pi_multiple(d0) < 0.05 || dist_to_pi_multiple(d1) < 0.05 {
            continue;
        }
        let ts = grid(sample_count(a.abs() + (b * w).abs() + c.abs(), 0.05));
        let p1 = angle_path(theta, &ts);
        let p2 = angle_path(psi, &ts);
        let res = maslov_pair_seeded(&p1, &p2, &tol(), seed).map_err(|e| e.to_string())?;
        let expected = crossing_oracle(d0, d1);
        if !res.certified || res.index != expected {
            return Err(format!(
                "index {} (certified {}), crossing count {expected}",
                res.index, res.certified
            ));
        }
        return Ok(());
    }
}

/// Paths `t -> exp(t J S) L` sampled finely enough for a gap below `max_gap`.
pub type PathGen = Box<dyn Fn(usize) -> (LagrangianPath<f64>, LagrangianPath<f64>)>;

pub struct PathPair {
    pub p1: LagrangianPath<f64>,
    pub p2: LagrangianPath<f64>,
    pub gen: PathGen,
}

fn flow_frames(base: &LagrangianFrame<f64>, h: &DMatrix<f64>, ts: &[f64]) -> Vec<LagrangianFrame<f64>> {
    ts.iter()
        .map(|&t| LagrangianFrame::new((h * t).exp() * base.columns(), &tol()).unwrap())
        .collect()
}

pub fn random_path_pair(r: &mut ChaCha8Rng, max_gap: f64) -> PathPair {
    let n = r.random_range(1..=2);
    let j = symmorse::standard_j::<f64>(n);
    let scale = r.random_range(0.5..3.0);
    let h1 = &j * random_symmetric::<f64, _>(2 * n, scale, r);
    let h2 = if r.random_bool(0.5) {
        DMatrix::zeros(2 * n, 2 * n)
    } else {
        &j * random_symmetric::<f64, _>(2 * n, scale * 0.5, r)
    };
    let a = random_lagrangian::<f64, _>(n, r);
    let b = random_lagrangian::<f64, _>(n, r);
    let gen = move |m: usize| {
        let ts = grid(m);
        let t = tol();
        (
            LagrangianPath::new(ts.clone(), flow_frames(&a, &h1, &ts), &Tol { seg_angle_max: 2.0, ..t }).unwrap(),
            LagrangianPath::new(ts.clone(), flow_frames(&b, &h2, &ts), &Tol { seg_angle_max: 2.0, ..t }).unwrap(),
        )
    };
    let mut m = 24;
    let (p1, p2) = loop {
        let (p1, p2) = gen(m);
        if p1.max_gap().max(p2.max_gap()) < max_gap {
            break (p1, p2);
        }
        m *= 2;
    };
    PathPair {
        p1,
        p2,
        gen: Box::new(gen),
    }
}

pub fn maslov_reversal(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let pp = random_path_pair(&mut r, 0.1);
    let t = tol();
    let fwd = maslov_pair_seeded(&pp.p1, &pp.p2, &t, seed).map_err(|e| e.to_string())?;
    let back = maslov_pair_seeded(&pp.p1.reversed(), &pp.p2.reversed(), &t, seed).map_err(|e| e.to_string())?;
    if !(fwd.certified && back.certified) {
        return Err("uncertified run".into());
    }
    if back.index != -fwd.index {
        return Err(format!("forward {}, reversed {}", fwd.index, back.index));
    }
    Ok(())
}

pub fn maslov_invariance(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let pp = random_path_pair(&mut r, 0.05);
    let t = tol();
    let n = pp.p1.n();
    let phi = random_symplectic::<f64, _>(n, &mut r);
    let (mut p1, mut p2) = (pp.p1.clone(), pp.p2.clone());
    let mut m = p1.len();
    let (q1, q2) = loop {
        match (p1.transform(&phi, &t), p2.transform(&phi, &t)) {
            (Ok(a), Ok(b)) => break (a, b),
            (Err(e), _) | (_, Err(e)) if m > 1 << 14 => return Err(e.to_string()),
            _ => {
                m = 2 * m - 1;
                (p1, p2) = (pp.gen)(m);
            }
        }
    };
    let before = maslov_pair_seeded(&p1, &p2, &t, seed).map_err(|e| e.to_string())?;
    let after = maslov_pair_seeded(&q1, &q2, &t, seed ^ 0x9e37).map_err(|e| e.to_string())?;
    if !(before.certified && after.certified) {
        return Err("uncertified run".into());
    }
    if before.index != after.index {
        return Err(format!("{} before, {} after the symplectic map", before.index, after.index));
    }
    Ok(())
}

pub fn maslov_refinement_concatenation(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let pp = random_path_pair(&mut r, 0.1);
    let t = tol();
    let m = pp.p1.len();
    let whole = maslov_pair_seeded(&pp.p1, &pp.p2, &t, seed).map_err(|e| e.to_string())?;
    let (f1, f2) = (pp.gen)(2 * m - 1);
    let fine = maslov_pair_seeded(&f1, &f2, &t, seed).map_err(|e| e.to_string())?;
    let b = r.random_range(1..m - 1);
    let left = maslov_pair_seeded(&pp.p1.slice(0, b), &pp.p2.slice(0, b), &t, seed).map_err(|e| e.to_string())?;
    let right =
        maslov_pair_seeded(&pp.p1.slice(b, m - 1), &pp.p2.slice(b, m - 1), &t, seed).map_err(|e| e.to_string())?;
    if !(whole.certified && fine.certified && left.certified && right.certified) {
        return Err("uncertified run".into());
    }
    if fine.index != whole.index || left.index + right.index != whole.index {
        return Err(format!(
            "whole {}, refined {}, split {} + {}",
            whole.index, fine.index, left.index, right.index
        ));
    }
    Ok(())
}

pub fn maslov_chart_independence(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let pp = random_path_pair(&mut r, 0.1);
    let t = tol();
    let res = maslov_pair_seeded(&pp.p1, &pp.p2, &t, seed).map_err(|e| e.to_string())?;
    if !res.certified {
        return Err("uncertified run".into());
    }
    let n = pp.p1.n();
    for seg in &res.segments {
        for _ in 0..40 {
            let chart = random_lagrangian::<f64, _>(n, &mut r);
            if chart.same_subspace(&seg.chart, &t) || !chart_is_valid(&pp.p1, &pp.p2, seg.lo, seg.hi, &chart, &t) {
                continue;
            }
            let c = segment_contribution(&pp.p1, &pp.p2, seg.lo, seg.hi, &chart, &t).map_err(|e| e.to_string())?;
            if c != seg.contribution {
                return Err(format!(
                    "segment [{}, {}]: {} with the chosen chart, {c} with another",
                    seg.lo, seg.hi, seg.contribution
                ));
            }
            break;
        }
    }
    Ok(())
}

pub fn spectral_transversality(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let t = tol();
    let n = r.random_range(1..=3);
    let (p, q, rr) = loop {
        let p = random_spd::<f64, _>(n, 0.3, &mut r);
        let q = random_matrix::<f64, _>(n, n, 1.0, &mut r);
        let shift = r.random_range(-1.0..3.0);
        let rr = random_symmetric::<f64, _>(n, 1.0, &mut r) + DMatrix::identity(n, n) * shift;
        let h = hamiltonian_from_blocks(&p, &q, &rr, 0.0, Evaluation::PlusInfinity).unwrap();
        if is_hyperbolic(&h, &t).1 > 1e-3 {
            break (p, q, rr);
        }
    };
    for lambda in [0.0, r.random_range(0.0..5.0), r.random_range(5.0..50.0)] {
        let h = hamiltonian_from_blocks(&p, &q, &rr, lambda, Evaluation::PlusInfinity).unwrap();
        let (hyp, margin) = is_hyperbolic(&h, &t);
        if !hyp {
            return Err(format!("hyperbolicity lost at lambda {lambda} (margin {margin:e})"));
        }
        let v = spectral_subspaces(&h, &t).map_err(|e| e.to_string())?;
        for (label, f) in [("V+", &v.plus), ("V-", &v.minus)] {
            let s = smallest_sv(&f.lower());
            if s < 1e-6 {
                return Err(format!("{label} meets L_D at lambda {lambda} (sine {s:e})"));
            }
        }
    }
    Ok(())
}

fn constant_fn(m: DMatrix<f64>) -> symmorse::hamiltonian::MatrixFn<f64> {
    Arc::new(move |_| m.clone())
}

pub fn morse_monotone(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let t = tol();
    let n = r.random_range(1..=2);
    let p = random_spd::<f64, _>(n, 0.5, &mut r);
    let q0 = random_matrix::<f64, _>(n, n, 0.5, &mut r);
    let r_inf = random_spd::<f64, _>(n, 0.5, &mut r);
    let r1 = random_symmetric::<f64, _>(n, 3.0, &mut r);
    let c = Constants {
        c1: linalg::singular_values(&p)[n - 1],
        c2: linalg::singular_values(&q0)[0],
        c3: linalg::singular_values(&r_inf)[0] + linalg::singular_values(&r1)[0],
    };
    let (qq, ra, rb) = (q0.clone(), r_inf.clone(), r1.clone());
    let sys = CoefficientSystem::new(
        n,
        constant_fn(p),
        Arc::new(move |x: f64| &qq * x.tanh()),
        Arc::new(move |x: f64| &ra + &rb / x.cosh().powi(2)),
        c,
        true,
    )
    .map_err(|e| e.to_string())?;
    let boundary = match r.random_range(0..3) {
        0 => Boundary::Line,
        1 => Boundary::Plus(random_lagrangian(n, &mut r)),
        _ => Boundary::Minus(random_lagrangian(n, &mut r)),
    };
    let nodes = if matches!(boundary, Boundary::Line) { 241 } else { 121 };
    let mut prev: Option<(usize, usize)> = None;
    for lambda in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0] {
        let op = discretize(&sys, &boundary, 6.0, nodes, lambda, &t).map_err(|e| e.to_string())?;
        let mi = morse_index(&op).map_err(|e| e.to_string())?;
        if let Some((m, z)) = prev {
            if mi.morse > m || mi.morse + mi.nullity > m + z {
                return Err(format!(
                    "{} boundary: counts rose to ({}, {}) from ({m}, {z}) at lambda {lambda}",
                    boundary.label(),
                    mi.morse,
                    mi.nullity
                ));
            }
        }
        prev = Some((mi.morse, mi.nullity));
    }
    Ok(())
}

pub fn det_criterion_agreement(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let t = tol();
    loop {
        let n = r.random_range(1..=3);
        let p = if r.random_bool(0.5) {
            random_spd::<f64, _>(n, 0.2, &mut r)
        } else {
            let s = random_symmetric::<f64, _>(n, 1.0, &mut r);
            if linalg::singular_values(&s)[n - 1] < 0.2 {
                continue;
            }
            s
        };
        let q = random_matrix::<f64, _>(n, n, 1.0, &mut r);
        let rr = random_symmetric::<f64, _>(n, 1.5, &mut r);
        let h = hamiltonian_from_blocks(&p, &q, &rr, 0.0, Evaluation::PlusInfinity).map_err(|e| e.to_string())?;
        let (hyp, margin) = is_hyperbolic(&h, &t);
        if hyp && margin < 1e-4 {
            continue;
        }
        let det = det_criterion(&p, &q, &rr).map_err(|e| e.to_string())?;
        if det != hyp {
            return Err(format!("det criterion {det}, hyperbolic {hyp} (margin {margin:e})"));
        }
        return Ok(());
    }
}

pub fn scalar_correction(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let t = tol();
    let p: f64 = r.random_range(0.5..2.0);
    let rr: f64 = r.random_range(0.5..2.0);
    let root = (p * rr).sqrt();
    let second = r.random_bool(0.5);
    let q = if second {
        root * r.random_range(1.1..3.0)
    } else {
        root * r.random_range(0.0..0.9)
    };
    let sys = CoefficientSystem::new(
        1,
        constant_fn(DMatrix::from_element(1, 1, p)),
        Arc::new(move |x: f64| DMatrix::from_element(1, 1, q * x.tanh())),
        constant_fn(DMatrix::from_element(1, 1, rr)),
        Constants { c1: p, c2: q, c3: rr },
        true,
    )
    .map_err(|e| e.to_string())?;
    let c = correction_line(&sys, 0.0, &t).map_err(|e| e.to_string())?;
    let expected = i64::from(second);
    if c != expected {
        return Err(format!("P={p:.3} Q+={q:.3} R={rr:.3}: correction {c}, expected {expected}"));
    }
    Ok(())
}
