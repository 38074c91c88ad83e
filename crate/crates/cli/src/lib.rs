//! Batch front end for `symmorse`: reads a problem file (or a built-in
//! problem), runs one command and writes a JSON or CSV report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use symmorse::hamiltonian::{
    assemble_b_limit, boundary_constant, bundle_with, det_criterion, is_hyperbolic, threshold_boundary,
    threshold_identity_shift, threshold_nondegeneracy, BundleKind, End,
};
use symmorse::linalg;
use symmorse::problem::{builtin_text, ProblemSpec};
use symmorse::random::seed_from_env;
use symmorse::sturm_liouville::{discretize, spectral_flow_of, Boundary, SpectralFlowTrace};
use symmorse::verify::{
    correction_half, correction_line, geometric_index_half, geometric_index_line, line_transversality, morse_for,
    verify_dirichlet_difference, verify_theorem_b, verify_theorem_c, verify_theorem_d, IndexReport, Side,
};
use symmorse::{Config, Error, Frame, System, Tol};

pub const SCHEMA_VERSION: u32 = 1;

pub mod exit {
    pub const OK: u8 = 0;
    pub const PARSE: u8 = 2;
    pub const VALIDATION: u8 = 3;
    pub const NUMERIC: u8 = 4;
    pub const RESIDUAL: u8 = 5;
}

#[derive(Debug, Parser)]
#[command(name = "symmorse", version, about = "Morse, Maslov and spectral-flow indices of Hamiltonian systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Validate coefficients and report hyperbolicity, thresholds and `C0`.
    Check(Common),
    /// Morse index, geometric index and correction term for the chosen side.
    Indices(Common),
    /// Check one index identity.
    Verify {
        #[arg(long, value_enum, ignore_case = true, default_value = "C")]
        theorem: Theorem,
        #[command(flatten)]
        common: Common,
    },
    /// Morse counts along the shift and principal angles of the bundles.
    Sweep {
        /// Also write SVG plots next to the CSV files.
        #[arg(long)]
        plot: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Problem file, or the name of a built-in problem.
    #[arg(long)]
    pub problem: String,
    #[arg(long, value_parser = parse_side)]
    pub side: Option<Side>,
    /// Truncation time.
    #[arg(long = "T")]
    pub t_trunc: Option<f64>,
    /// Mesh nodes on `[-T, T]`.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub lambda_max: Option<f64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Directory for the report and side files. Without it the report goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Theorem {
    #[value(name = "B")]
    B,
    #[value(name = "C")]
    C,
    #[value(name = "D")]
    D,
    #[value(name = "dirichlet")]
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn parse_side(s: &str) -> Result<Side, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Check(_) => "check",
            Command::Indices(_) => "indices",
            Command::Verify { .. } => "verify",
            Command::Sweep { .. } => "sweep",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Check(c) | Command::Indices(c) => c,
            Command::Verify { common, .. } | Command::Sweep { common, .. } => common,
        }
    }
}

/// Exit status for a core error.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } => exit::PARSE,
        Error::Validation(_)
        | Error::DimensionMismatch { .. }
        | Error::RankDeficient { .. }
        | Error::NotIsotropic { .. }
        | Error::IllConditioned { .. }
        | Error::InvalidBoundary(_)
        | Error::NotHyperbolic { .. } => exit::VALIDATION,
        _ => exit::NUMERIC,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemInfo {
    pub name: String,
    pub source: String,
    pub n: usize,
    pub side: Side,
    pub f2: bool,
    /// The problem in canonical file form, after command line overrides.
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub version: String,
    pub os: String,
    pub arch: String,
    pub threads: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grids {
    pub t_trunc: f64,
    pub nodes: usize,
    pub half_nodes: usize,
    pub lambda_max: Option<f64>,
    pub validation_points: usize,
    pub bundle_max_step: f64,
    pub bundle_sample_spacing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Status {
    pub exit_code: u8,
    pub certified: Option<bool>,
    pub residual: Option<i64>,
    pub error: Option<String>,
}

/// Everything one invocation produces. All sections but `timings` are
/// deterministic for fixed inputs and thread count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub problem: Option<ProblemInfo>,
    pub environment: Environment,
    pub tolerances: Option<Tol>,
    pub grids: Option<Grids>,
    pub status: Status,
    pub result: Value,
    pub timings: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// `key,value` rows of every deterministic section, keys dotted.
    pub fn to_csv(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Value::Object(m) = &mut v {
            m.remove("timings");
        }
        let mut rows = Vec::new();
        flatten("", &v, &mut rows);
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["key", "value"]).unwrap();
        for (k, val) in rows {
            w.write_record([k, val]).unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| flatten(&key(&i.to_string()), x, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// A side file produced by `sweep`.
#[derive(Debug, Clone, PartialEq)]
pub struct SideFile {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: RunReport,
    pub files: Vec<SideFile>,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        self.report.status.exit_code
    }

    /// Writes the report and side files into `dir`.
    pub fn write_to(&self, dir: &Path, format: Format) -> std::io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let (name, body) = match format {
            Format::Json => ("report.json", self.report.to_json()),
            Format::Csv => ("report.csv", self.report.to_csv()),
        };
        let path = dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
        for f in &self.files {
            let path = dir.join(&f.name);
            fs::write(&path, &f.contents)?;
            written.push(path);
        }
        Ok(written)
    }
}

fn load_problem(arg: &str) -> Result<(ProblemSpec, String), Error> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| Error::Parse {
            line: 0,
            column: 0,
            message: format!("cannot read {arg}: {e}"),
        })?;
        return Ok((ProblemSpec::parse(&text)?, path.display().to_string()));
    }
    match builtin_text(arg) {
        Some(text) => Ok((ProblemSpec::parse(text)?, format!("builtin:{arg}"))),
        None => Err(Error::Parse {
            line: 0,
            column: 0,
            message: format!("'{arg}' is neither a readable file nor a built-in problem"),
        }),
    }
}

fn apply_overrides(spec: &mut ProblemSpec, c: &Common) -> Result<(), Error> {
    if let Some(t) = c.t_trunc {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Validation(format!("--T must be positive, got {t}")));
        }
        spec.numerics.t_trunc = t;
    }
    if let Some(n) = c.nodes {
        if n < 16 {
            return Err(Error::Validation(format!("--nodes must be at least 16, got {n}")));
        }
        spec.numerics.nodes = n;
    }
    if let Some(l) = c.lambda_max {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::Validation(format!("--lambda-max must be positive, got {l}")));
        }
        spec.numerics.lambda_max = Some(l);
    }
    if let Some(s) = c.side {
        spec.side = s;
    }
    Ok(())
}

struct Context {
    spec: ProblemSpec,
    sys: System,
    cfg: Config,
    tol: Tol,
    l0: Frame,
}

impl Context {
    fn new(spec: ProblemSpec) -> Result<Self, Error> {
        let tol = spec.tolerances::<f64>()?;
        let mut cfg = spec.config::<f64>();
        cfg.seed = seed_from_env();
        let sys = spec.system::<f64>()?;
        let l0 = spec.boundary_frame(&tol)?;
        Ok(Self { spec, sys, cfg, tol, l0 })
    }

    fn grids(&self) -> Grids {
        Grids {
            t_trunc: self.cfg.t_trunc,
            nodes: self.cfg.nodes,
            half_nodes: self.cfg.half_nodes(),
            lambda_max: self.cfg.lambda_max,
            validation_points: self.cfg.validation_points,
            bundle_max_step: self.cfg.bundle.max_step,
            bundle_sample_spacing: self.cfg.bundle.sample_spacing,
        }
    }

    fn info(&self, source: &str) -> ProblemInfo {
        ProblemInfo {
            name: self.spec.name.clone(),
            source: source.to_string(),
            n: self.spec.n,
            side: self.spec.side,
            f2: self.spec.f2,
            text: self.spec.to_text(),
        }
    }
}

struct Produced {
    result: Value,
    certified: Option<bool>,
    residual: Option<i64>,
    exit_code: u8,
    files: Vec<SideFile>,
    timings: BTreeMap<String, f64>,
}

impl Produced {
    fn plain(result: Value) -> Self {
        Self {
            result,
            certified: None,
            residual: None,
            exit_code: exit::OK,
            files: Vec::new(),
            timings: BTreeMap::new(),
        }
    }
}

/// Runs one command on the current thread pool.
pub fn execute(cmd: &Command) -> Outcome {
    let start = Instant::now();
    let common = cmd.common();
    let mut report = RunReport {
        schema_version: SCHEMA_VERSION,
        command: cmd.name().to_string(),
        problem: None,
        environment: Environment {
            version: env!("CARGO_PKG_VERSION").to_string(),
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
            threads: rayon::current_num_threads(),
            seed: seed_from_env(),
        },
        tolerances: None,
        grids: None,
        status: Status {
            exit_code: exit::OK,
            certified: None,
            residual: None,
            error: None,
        },
        result: Value::Null,
        timings: BTreeMap::new(),
    };
    let mut files = Vec::new();

    let prepared = load_problem(&common.problem).and_then(|(mut spec, source)| {
        apply_overrides(&mut spec, common)?;
        Ok((spec, source))
    });
    let outcome = prepared.and_then(|(spec, source)| {
        let ctx = Context::new(spec)?;
        report.problem = Some(ctx.info(&source));
        report.tolerances = Some(ctx.tol);
        report.grids = Some(ctx.grids());
        match cmd {
            Command::Check(_) => check(&ctx),
            Command::Indices(c) => indices(&ctx, c.side),
            Command::Verify { theorem, common } => verify(&ctx, *theorem, common.side),
            Command::Sweep { plot, .. } => sweep(&ctx, *plot),
        }
    });
    match outcome {
        Ok(p) => {
            report.result = p.result;
            report.status.certified = p.certified;
            report.status.residual = p.residual;
            report.status.exit_code = p.exit_code;
            report.timings = p.timings;
            files = p.files;
        }
        Err(e) => {
            report.status.exit_code = exit_code(&e);
            report.status.error = Some(e.to_string());
        }
    }
    report.timings.insert("total_ms".into(), start.elapsed().as_secs_f64() * 1e3);
    Outcome { report, files }
}

/// Runs a parsed command line inside a pool of the requested size.
pub fn run(cli: &Cli) -> Outcome {
    match cli.command.common().threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| execute(&cli.command)),
            Err(_) => execute(&cli.command),
        },
        None => execute(&cli.command),
    }
}

fn check(ctx: &Context) -> Result<Produced, Error> {
    let (sys, cfg, tol) = (&ctx.sys, &ctx.cfg, &ctx.tol);
    let validation = sys.validate(cfg.t_trunc, cfg.validation_points, tol)?;
    let mut ends = BTreeMap::new();
    let mut hyperbolic = true;
    for (label, end) in [("plus", End::Plus), ("minus", End::Minus)] {
        let h = assemble_b_limit(sys, end, 0.0)?;
        let (ok, margin) = is_hyperbolic(&h, tol);
        let (p, q, r) = sys.limits(end);
        let det = det_criterion(p, q, r)?;
        hyperbolic &= ok;
        ends.insert(label, json!({ "hyperbolic": ok, "margin": margin, "det_criterion": det }));
    }
    let c0 = boundary_constant(&ctx.l0, tol).c0;
    let nondegenerate = threshold_nondegeneracy(sys.constants());
    let (transversal, min_angle) = line_transversality(sys, nondegenerate, cfg, tol)?;
    let ok = validation.tail_ok && hyperbolic;
    let mut p = Produced::plain(json!({
        "validation": validation,
        "limits": ends,
        "constants": sys.constants(),
        "f2_declared": sys.f2(),
        "c0": c0,
        "thresholds": {
            "identity_shift": threshold_identity_shift(sys.constants()),
            "nondegeneracy": nondegenerate,
            "boundary": threshold_boundary(sys.constants(), c0),
        },
        "transversal_at_nondegeneracy": { "holds": transversal, "min_angle_sine": min_angle },
    }));
    p.certified = Some(ok);
    p.exit_code = if ok { exit::OK } else { exit::VALIDATION };
    Ok(p)
}

fn effective_side(ctx: &Context, explicit: Option<Side>) -> Side {
    explicit.unwrap_or(ctx.spec.side)
}

fn indices(ctx: &Context, side: Option<Side>) -> Result<Produced, Error> {
    let (sys, cfg, tol) = (&ctx.sys, &ctx.cfg, &ctx.tol);
    let side = effective_side(ctx, side);
    sys.validate(cfg.t_trunc, cfg.validation_points, tol)?;
    let clock = Instant::now();
    let mi = morse_for(sys, side, &ctx.l0, 0.0, cfg, tol)?;
    let morse_ms = clock.elapsed().as_secs_f64() * 1e3;
    let clock = Instant::now();
    let (geo, corr) = match side {
        Side::Line => (geometric_index_line(sys, 0.0, cfg, tol)?, correction_line(sys, 0.0, tol)?),
        _ => (
            geometric_index_half(sys, &ctx.l0, side, 0.0, cfg, tol)?,
            correction_half(sys, &ctx.l0, side, 0.0, tol)?,
        ),
    };
    let geo_ms = clock.elapsed().as_secs_f64() * 1e3;
    let certified = mi.certified && geo.certification.all_ok();
    let mut p = Produced::plain(json!({
        "side": side,
        "morse": mi.morse,
        "nullity": mi.nullity,
        "morse_detail": mi,
        "geo": geo.value,
        "geo_certification": geo.certification,
        "correction": corr,
    }));
    p.certified = Some(certified);
    p.timings = BTreeMap::from([("morse_ms".into(), morse_ms), ("geometric_ms".into(), geo_ms)]);
    Ok(p)
}

fn finish_verify(report: &IndexReport, result: Value) -> Produced {
    let mut p = Produced::plain(result);
    p.certified = Some(report.certified);
    p.residual = Some(report.residual);
    p.exit_code = if !report.certified {
        exit::NUMERIC
    } else if report.residual != 0 {
        exit::RESIDUAL
    } else {
        exit::OK
    };
    p.timings = report.timings.iter().map(|(k, v)| (format!("{k}_ms"), *v)).collect();
    p
}

fn verify(ctx: &Context, theorem: Theorem, side: Option<Side>) -> Result<Produced, Error> {
    let (sys, cfg, tol) = (&ctx.sys, &ctx.cfg, &ctx.tol);
    let name = ctx.spec.name.as_str();
    match theorem {
        Theorem::C => {
            if side.is_some_and(|s| s != Side::Line) {
                return Err(Error::Validation("the whole-line identity needs side line".into()));
            }
            let r = verify_theorem_c(sys, cfg, tol)?.with_problem(name);
            Ok(finish_verify(&r, serde_json::to_value(&r).unwrap()))
        }
        Theorem::D | Theorem::Dirichlet => {
            let side = effective_side(ctx, side);
            let r = if theorem == Theorem::D {
                verify_theorem_d(sys, &ctx.l0, side, cfg, tol)?
            } else {
                verify_dirichlet_difference(sys, &ctx.l0, side, cfg, tol)?
            }
            .with_problem(name);
            Ok(finish_verify(&r, serde_json::to_value(&r).unwrap()))
        }
        Theorem::B => {
            let side = effective_side(ctx, side);
            let (r, trace) = verify_theorem_b(sys, side, &ctx.l0, cfg, tol)?;
            let r = r.with_problem(name);
            Ok(finish_verify(&r, json!({ "report": r, "trace": trace })))
        }
    }
}

/// Principal angles between two `2n x n` orthonormal frames, ascending.
fn principal_angles(a: &Frame, b: &Frame) -> Vec<f64> {
    let c = a.columns().transpose() * b.columns();
    let mut angles: Vec<f64> = linalg::singular_values(&c).iter().map(|s| s.min(1.0).acos()).collect();
    angles.sort_by(|x, y| x.total_cmp(y));
    angles
}

fn sweep(ctx: &Context, plot: bool) -> Result<Produced, Error> {
    let (sys, cfg, tol) = (&ctx.sys, &ctx.cfg, &ctx.tol);
    let side = ctx.spec.side;
    sys.validate(cfg.t_trunc, cfg.validation_points, tol)?;
    let threshold = match side {
        Side::Line => threshold_nondegeneracy(sys.constants()),
        _ => threshold_boundary(sys.constants(), boundary_constant(&ctx.l0, tol).c0),
    };
    let lambda_max = cfg.lambda_max.unwrap_or(threshold);
    let (boundary, nodes) = match side {
        Side::Line => (Boundary::Line, cfg.nodes),
        Side::Plus => (Boundary::Plus(ctx.l0.clone()), cfg.half_nodes()),
        Side::Minus => (Boundary::Minus(ctx.l0.clone()), cfg.half_nodes()),
    };
    let clock = Instant::now();
    let op = discretize(sys, &boundary, cfg.t_trunc, nodes, 0.0, tol)?;
    let trace = spectral_flow_of(&op, lambda_max)?;
    let sweep_ms = clock.elapsed().as_secs_f64() * 1e3;

    let clock = Instant::now();
    let (taus, angles) = match side {
        Side::Line => {
            let s = bundle_with(sys, 0.0, BundleKind::Stable, cfg.t_trunc, &cfg.bundle, tol)?;
            let u = bundle_with(sys, 0.0, BundleKind::Unstable, cfg.t_trunc, &cfg.bundle, tol)?;
            let a = s.path.frames().iter().zip(u.path.frames()).map(|(x, y)| principal_angles(x, y));
            (s.path.ts().to_vec(), a.collect::<Vec<_>>())
        }
        _ => {
            let kind = if side == Side::Plus { BundleKind::Stable } else { BundleKind::Unstable };
            let b = bundle_with(sys, 0.0, kind, cfg.t_trunc, &cfg.bundle, tol)?;
            let a = b.path.frames().iter().map(|x| principal_angles(x, &ctx.l0));
            (b.path.ts().to_vec(), a.collect::<Vec<_>>())
        }
    };
    let bundle_ms = clock.elapsed().as_secs_f64() * 1e3;
    let min_angle = angles.iter().flatten().fold(f64::INFINITY, |a, &b| a.min(b));

    let mut files = vec![
        SideFile {
            name: "morse.csv".into(),
            contents: morse_csv(&trace),
        },
        SideFile {
            name: "angles.csv".into(),
            contents: angles_csv(&taus, &angles, sys.n()),
        },
    ];
    if plot {
        let stairs: Vec<(f64, f64)> =
            trace.lambdas.iter().zip(&trace.morse_counts).map(|(l, m)| (*l, *m as f64)).collect();
        files.push(SideFile {
            name: "morse.svg".into(),
            contents: svg_plot("Morse count of A + lambda", "lambda", &[stairs], true),
        });
        let series: Vec<Vec<(f64, f64)>> = (0..sys.n())
            .map(|k| taus.iter().zip(&angles).map(|(t, a)| (*t, a[k])).collect())
            .collect();
        files.push(SideFile {
            name: "angles.svg".into(),
            contents: svg_plot("principal angles of the bundles", "tau", &series, false),
        });
    }
    let mut p = Produced::plain(json!({
        "side": side,
        "lambda_max": lambda_max,
        "threshold": threshold,
        "trace": trace,
        "angle_samples": taus.len(),
        "min_principal_angle": min_angle,
        "files": files.iter().map(|f| f.name.clone()).collect::<Vec<_>>(),
    }));
    p.certified = Some(trace.monotone && trace.partition_sum == trace.spectral_flow);
    p.files = files;
    p.timings = BTreeMap::from([("sweep_ms".into(), sweep_ms), ("bundles_ms".into(), bundle_ms)]);
    Ok(p)
}

fn morse_csv(trace: &SpectralFlowTrace) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["lambda", "morse", "nullity"]).unwrap();
    for ((l, m), z) in trace.lambdas.iter().zip(&trace.morse_counts).zip(&trace.nullities) {
        w.serialize((l, m, z)).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

fn angles_csv(taus: &[f64], angles: &[Vec<f64>], n: usize) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["tau".to_string()];
    header.extend((1..=n).map(|k| format!("angle_{k}")));
    w.write_record(&header).unwrap();
    for (t, a) in taus.iter().zip(angles) {
        let mut row = vec![t.to_string()];
        row.extend(a.iter().map(|x| x.to_string()));
        w.write_record(&row).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// A minimal line chart; `steps` draws each series as a staircase.
pub fn svg_plot(title: &str, xlabel: &str, series: &[Vec<(f64, f64)>], steps: bool) -> String {
    let (w, h, pad) = (640.0, 400.0, 50.0);
    let pts = series.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#).unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="16">{title}</text>"#, w / 2.0).unwrap();
    writeln!(
        s,
        r#"<path d="M{pad} {pad} V{} H{}" fill="none" stroke="black"/>"#,
        h - pad,
        w - pad
    )
    .unwrap();
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{xlabel}</text>"#, w / 2.0, h - 12.0).unwrap();
    for (v, anchor, x, y) in [
        (x0, "start", sx(x0), h - pad + 16.0),
        (x1, "end", sx(x1), h - pad + 16.0),
        (y0, "end", pad - 6.0, sy(y0)),
        (y1, "end", pad - 6.0, sy(y1)),
    ] {
        writeln!(s, r#"<text x="{x:.1}" y="{y:.1}" text-anchor="{anchor}" font-size="11">{v:.3}</text>"#).unwrap();
    }
    for (k, ser) in series.iter().enumerate() {
        let mut d = String::new();
        for (i, &(x, y)) in ser.iter().enumerate() {
            if i == 0 {
                write!(d, "M{:.2} {:.2}", sx(x), sy(y)).unwrap();
            } else if steps {
                write!(d, " H{:.2} V{:.2}", sx(x), sy(y)).unwrap();
            } else {
                write!(d, " L{:.2} {:.2}", sx(x), sy(y)).unwrap();
            }
        }
        writeln!(
            s,
            r#"<path d="{d}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            PALETTE[k % PALETTE.len()]
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("symmorse").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_parse() {
        let c = cli(&["verify", "--problem", "poschl-teller-2", "--theorem", "dirichlet", "--side", "plus", "--T", "12"]);
        match c.command {
            Command::Verify { theorem, common } => {
                assert_eq!(theorem, Theorem::Dirichlet);
                assert_eq!(common.side, Some(Side::Plus));
                assert_eq!(common.t_trunc, Some(12.0));
            }
            _ => panic!("wrong subcommand"),
        }
        assert!(Cli::try_parse_from(["symmorse", "verify", "--problem", "x", "--side", "up"]).is_err());
    }

    #[test]
    fn error_classes() {
        assert_eq!(exit_code(&Error::Parse { line: 1, column: 1, message: String::new() }), exit::PARSE);
        assert_eq!(exit_code(&Error::Validation(String::new())), exit::VALIDATION);
        assert_eq!(exit_code(&Error::Sweep(String::new())), exit::NUMERIC);
    }

    #[test]
    fn unknown_problem_is_a_parse_failure() {
        let out = execute(&cli(&["check", "--problem", "no-such-problem"]).command);
        assert_eq!(out.exit_code(), exit::PARSE);
        assert!(out.report.status.error.as_deref().unwrap().contains("no-such-problem"));
    }

    #[test]
    fn csv_flattening() {
        let mut rows = Vec::new();
        flatten("", &json!({"a": {"b": [1, 2]}, "c": "x", "d": null}), &mut rows);
        assert_eq!(
            rows,
            vec![
                ("a.b.0".to_string(), "1".to_string()),
                ("a.b.1".to_string(), "2".to_string()),
                ("c".to_string(), "x".to_string()),
                ("d".to_string(), String::new()),
            ]
        );
    }

    #[test]
    fn svg_has_one_path_per_series() {
        let s = svg_plot("t", "x", &[vec![(0.0, 0.0), (1.0, 1.0)], vec![(0.0, 1.0), (1.0, 0.0)]], false);
        assert_eq!(s.matches("stroke-width").count(), 2);
        assert!(s.starts_with("<svg"));
    }
}
