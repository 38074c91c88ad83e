//! Acceptance criteria 1-8. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use symmorse::problem::builtin;
use symmorse::random::rng_from_seed;
use symmorse::symplectic::LagrangianFrame;
use symmorse::verify::{
    correction_line, limit_path_maslov, verify_dirichlet_difference, verify_theorem_b, verify_theorem_c, verify_theorem_d,
    IndexReport, Side,
};
use symmorse::{Config, System, Tol};

/// Largest admissible distance of the located crossing from `lambda = 3`.
const CROSSING_TOL: f64 = 1e-3;
const PT2_BUDGET: Duration = Duration::from_secs(30);
const PT1_BUDGET: Duration = Duration::from_secs(10);
const RANDOM_BOUNDARIES: usize = 10;
const SUITE_SEED: u64 = 20_000;

/// Bound states of `-w'' - N(N+1) sech^2(t) w` sit at `-k^2`, `k = 1..=N`,
/// so `-w'' + (1 - N(N+1) sech^2) w` has eigenvalues `1 - k^2` below the
/// essential spectrum. Returns the number of negative and zero ones.
fn poschl_teller_counts(depth: u32) -> (usize, usize) {
    let levels: Vec<i64> = (1..=depth as i64).map(|k| 1 - k * k).collect();
    (levels.iter().filter(|&&e| e < 0).count(), levels.iter().filter(|&&e| e == 0).count())
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }

    fn error(e: impl std::fmt::Display) -> Self {
        Self::new(false, format!("error: {e}"))
    }
}

fn load(name: &str) -> (System, Config, Tol) {
    let spec = builtin(name).expect("catalog entry");
    let sys = spec.system::<f64>().expect("catalog system");
    let cfg = spec.config::<f64>();
    let tol = spec.tolerances::<f64>().expect("catalog tolerances");
    (sys, cfg, tol)
}

fn summary(r: &IndexReport) -> String {
    format!(
        "morse {} nullity {} geo {} correction {} residual {} certified {}",
        r.morse, r.nullity, r.geo, r.correction, r.residual, r.certified
    )
}

fn poschl_teller(name: &str, depth: u32, budget: Duration) -> Outcome {
    let (sys, cfg, tol) = load(name);
    let (morse, nullity) = poschl_teller_counts(depth);
    let start = Instant::now();
    let r = match verify_theorem_c(&sys, &cfg, &tol) {
        Ok(r) => r,
        Err(e) => return Outcome::error(e),
    };
    let elapsed = start.elapsed();
    let geo = morse as i64;
    let pass = r.morse == morse
        && r.nullity == nullity
        && r.geo == geo
        && r.correction == 0
        && r.residual == 0
        && r.certified
        && elapsed < budget;
    Outcome::new(
        pass,
        format!(
            "{} | expected morse {morse} nullity {nullity} geo {geo} correction 0 | T {} nodes {} | {:.2}s (budget {}s)",
            summary(&r),
            cfg.t_trunc,
            cfg.nodes,
            elapsed.as_secs_f64(),
            budget.as_secs()
        ),
    )
}

fn case_one() -> Outcome {
    let (sys, cfg, tol) = load("scalar-case-1");
    match verify_theorem_c(&sys, &cfg, &tol) {
        Ok(r) => {
            let pass = r.correction == 0 && r.morse as i64 == r.geo && r.residual == 0 && r.certified;
            Outcome::new(pass, format!("{} | sqrt(P R) - |Q+-| = 0.7 > 0", summary(&r)))
        }
        Err(e) => Outcome::error(e),
    }
}

fn case_two() -> Outcome {
    let (sys, cfg, tol) = load("scalar-case-2");
    let r = match verify_theorem_c(&sys, &cfg, &tol) {
        Ok(r) => r,
        Err(e) => return Outcome::error(e),
    };
    let lhat = symmorse::hamiltonian::threshold_nondegeneracy(sys.constants());
    let path = match limit_path_maslov(&sys, 0.0, lhat, 64, cfg.seed, &tol) {
        Ok(m) => m,
        Err(e) => return Outcome::error(e),
    };
    let pass = r.correction == 1
        && r.morse as i64 == r.geo + 1
        && r.residual == 0
        && r.certified
        && path.index == -1
        && path.certified;
    Outcome::new(
        pass,
        format!(
            "{} | limit-path Maslov on [0, {lhat}] = {} (certified {})",
            summary(&r),
            path.index,
            path.certified
        ),
    )
}

fn spectral_flow() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, crossing) in [("poschl-teller-2", Some(3.0)), ("scalar-case-2", None)] {
        let (sys, cfg, tol) = load(name);
        let ld = LagrangianFrame::dirichlet(sys.n());
        match verify_theorem_b(&sys, Side::Line, &ld, &cfg, &tol) {
            Ok((r, trace)) => {
                let located = trace.crossings.iter().map(|c| c.lambda).collect::<Vec<_>>();
                let ok_cross = match crossing {
                    Some(x) => located.len() == 1 && (located[0] - x).abs() <= CROSSING_TOL,
                    None => true,
                };
                let ok = r.residual == 0 && r.certified && ok_cross;
                pass &= ok;
                parts.push(format!(
                    "{name}: Sf {} Maslov side {} residual {} crossings {located:?} on [0, {}] certified {}",
                    r.lhs, r.rhs, r.residual, r.details["lambda_max"], r.certified
                ));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{name}: error {e}"));
            }
        }
    }
    Outcome::new(pass, parts.join(" | "))
}

fn random_boundaries() -> Outcome {
    let mut rng = rng_from_seed(SUITE_SEED);
    let (mut runs, mut certified, mut bad) = (0, 0, Vec::new());
    for name in ["poschl-teller-1", "poschl-teller-2", "scalar-case-1", "scalar-case-2"] {
        let (sys, cfg, tol) = load(name);
        for side in [Side::Plus, Side::Minus] {
            for _ in 0..RANDOM_BOUNDARIES {
                let l0 = symmorse::random::random_lagrangian::<f64, _>(1, &mut rng);
                for which in ["D", "dirichlet"] {
                    let r = if which == "D" {
                        verify_theorem_d(&sys, &l0, side, &cfg, &tol)
                    } else {
                        verify_dirichlet_difference(&sys, &l0, side, &cfg, &tol)
                    };
                    runs += 1;
                    match r {
                        Ok(r) if r.certified => {
                            certified += 1;
                            if r.residual != 0 {
                                bad.push(format!("{name} {} {which}: residual {}", side.as_str(), r.residual));
                            }
                        }
                        Ok(_) => {}
                        Err(e) => bad.push(format!("{name} {} {which}: {e}", side.as_str())),
                    }
                }
            }
        }
    }
    Outcome::new(
        bad.is_empty() && certified > 0,
        format!("{certified}/{runs} runs certified, all certified residuals 0: {} {bad:?}", bad.is_empty()),
    )
}

fn property_suites() -> Outcome {
    let mut failed = Vec::new();
    let suites = common::suites();
    for (k, suite) in suites.iter().enumerate() {
        let f = common::run_suite(suite, SUITE_SEED + 1000 * k as u64, common::CASES);
        if !f.is_empty() {
            failed.push(format!("{}: {} failures, first {}", suite.name, f.len(), f[0]));
        }
    }
    Outcome::new(
        failed.is_empty(),
        format!("{} suites x {} cases, failures: {failed:?}", suites.len(), common::CASES),
    )
}

/// Every integer reported for one problem.
fn integers(name: &str, cfg: &Config) -> Result<Vec<i64>, String> {
    let spec = builtin(name).unwrap();
    let sys = spec.system::<f64>().unwrap();
    let tol = spec.tolerances::<f64>().unwrap();
    let r = verify_theorem_c(&sys, cfg, &tol).map_err(|e| e.to_string())?;
    let mut out = vec![r.morse as i64, r.nullity as i64, r.geo, r.correction, r.residual];
    out.push(correction_line(&sys, 0.0, &tol).map_err(|e| e.to_string())?);
    if name == "scalar-case-2" {
        let lhat = symmorse::hamiltonian::threshold_nondegeneracy(sys.constants());
        out.push(limit_path_maslov(&sys, 0.0, lhat, 64, cfg.seed, &tol).map_err(|e| e.to_string())?.index);
    }
    if name == "poschl-teller-2" || name == "scalar-case-2" {
        let ld = LagrangianFrame::dirichlet(1);
        let (b, _) = verify_theorem_b(&sys, Side::Line, &ld, cfg, &tol).map_err(|e| e.to_string())?;
        out.extend([b.lhs, b.rhs]);
    }
    Ok(out)
}

fn convergence() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for name in ["poschl-teller-2", "poschl-teller-1", "scalar-case-1", "scalar-case-2"] {
        let base = builtin(name).unwrap().config::<f64>();
        let mut doubled_t = base;
        doubled_t.t_trunc = base.t_trunc * 2.0;
        doubled_t.nodes = 2 * base.nodes - 1;
        let mut doubled_nodes = base;
        doubled_nodes.nodes = 2 * base.nodes - 1;
        let runs: Vec<_> = [base, doubled_t, doubled_nodes].iter().map(|c| integers(name, c)).collect();
        let same = runs.iter().all(|r| r.is_ok()) && runs.windows(2).all(|w| w[0] == w[1]);
        pass &= same;
        parts.push(format!("{name}: {:?}", runs.iter().map(|r| r.clone().unwrap_or_default()).collect::<Vec<_>>()));
    }
    Outcome::new(pass, format!("(T, nodes), (2T, 2nodes-1), (T, 2nodes-1) -> {}", parts.join(" | ")))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("Poschl-Teller N=2 whole-line identity", || poschl_teller("poschl-teller-2", 2, PT2_BUDGET)),
        ("Poschl-Teller N=1 whole-line identity", || poschl_teller("poschl-teller-1", 1, PT1_BUDGET)),
        ("scalar case 1: zero correction", case_one),
        ("scalar case 2: correction 1 and limit-path Maslov -1", case_two),
        ("spectral flow against the Maslov side", spectral_flow),
        ("random L0: half-line and Dirichlet-difference residuals", random_boundaries),
        ("property suites", property_suites),
        ("doubling T and nodes", convergence),
    ];
    let mut all = true;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        all &= o.pass;
        println!(
            "criterion {} {}: {} [{:.1}s] {}",
            k + 1,
            if o.pass { "PASS" } else { "FAIL" },
            name,
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
