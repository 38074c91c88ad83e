//! Problem files: coefficients, constants, boundary data and numerics.
//!
//! The format is line oriented. `#` starts a comment, `[name]` opens a
//! section and every other non-blank line is `key = value`.
//!
//! ```text
//! [problem]
//! name = poschl-teller-2
//! n = 1
//! f2 = true
//! side = line
//!
//! [constants]
//! C1 = 1
//! C2 = 0
//! C3 = 5
//!
//! [P]
//! 1,1 = 1
//!
//! [R]
//! 1,1 = 1 - 6*sech(t)^2
//!
//! [numerics]
//! T = 20
//! nodes = 4001
//! lambda_max = 4
//! ```
//!
//! Matrix entries are 1-based and default to zero. `[boundary]` holds
//! `L0 = a, b; c, d` with `2n` rows separated by `;`. `[tolerances]`
//! overrides thresholds by field name.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr};
use crate::hamiltonian::{CoefficientSystem, Constants, MatrixFn, ValidationReport};
use crate::symplectic::LagrangianFrame;
use crate::verify::{Side, VerifyConfig};
use crate::{Real, Tolerances};

#[derive(Debug, Clone, PartialEq)]
pub struct Numerics {
    pub t_trunc: f64,
    pub nodes: usize,
    pub lambda_max: Option<f64>,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            t_trunc: 20.0,
            nodes: 4001,
            lambda_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub name: String,
    pub n: usize,
    pub f2: bool,
    pub side: Side,
    pub constants: Constants<f64>,
    /// Row-major `n x n` entries.
    pub p: Vec<Expr>,
    pub q: Vec<Expr>,
    pub r: Vec<Expr>,
    /// `2n x n` frame for half-line problems.
    pub boundary: Option<DMatrix<f64>>,
    pub numerics: Numerics,
    pub tolerances: BTreeMap<String, f64>,
}

const SECTIONS: [&str; 8] = ["problem", "constants", "P", "Q", "R", "boundary", "numerics", "tolerances"];

fn perr(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

struct Entry<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
    value_col: usize,
}

impl Entry<'_> {
    fn number(&self) -> Result<f64> {
        let v: f64 = self
            .value
            .parse()
            .map_err(|_| perr(self.line, self.value_col, format!("expected a number for {}", self.key)))?;
        if !v.is_finite() {
            return Err(perr(self.line, self.value_col, format!("{} must be finite", self.key)));
        }
        Ok(v)
    }

    fn integer(&self) -> Result<usize> {
        self.value
            .parse()
            .map_err(|_| perr(self.line, self.value_col, format!("expected a non-negative integer for {}", self.key)))
    }

    fn boolean(&self) -> Result<bool> {
        match self.value.to_ascii_lowercase().as_str() {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            _ => Err(perr(self.line, self.value_col, format!("expected true or false for {}", self.key))),
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        perr(self.line, 1, message)
    }
}

impl ProblemSpec {
    /// Parses a problem file without evaluating the coefficients.
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<&str, Vec<Entry<'_>>> = BTreeMap::new();
        let mut current: Option<&str> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            let trimmed = content.trim();
            if trimmed.is_empty() {
                continue;
            }
            let indent = content.len() - content.trim_start().len();
            if let Some(inner) = trimmed.strip_prefix('[') {
                let name = inner
                    .strip_suffix(']')
                    .ok_or_else(|| perr(line, indent + 1, "unterminated section header"))?
                    .trim();
                let name = SECTIONS
                    .iter()
                    .find(|s| **s == name)
                    .ok_or_else(|| perr(line, indent + 2, format!("unknown section [{name}]")))?;
                if sections.contains_key(name) {
                    return Err(perr(line, indent + 1, format!("duplicate section [{name}]")));
                }
                sections.insert(name, Vec::new());
                current = Some(name);
                continue;
            }
            let section = current.ok_or_else(|| perr(line, indent + 1, "entry outside of any section"))?;
            let eq = content
                .find('=')
                .ok_or_else(|| perr(line, indent + 1, "expected 'key = value'"))?;
            let key = content[..eq].trim();
            if key.is_empty() {
                return Err(perr(line, indent + 1, "missing key"));
            }
            let after = &content[eq + 1..];
            let lead = after.len() - after.trim_start().len();
            let value = after.trim();
            let entries = sections.get_mut(section).expect("section registered");
            if entries.iter().any(|e| e.key == key) {
                return Err(perr(line, indent + 1, format!("duplicate key '{key}' in [{section}]")));
            }
            entries.push(Entry {
                line,
                key,
                value,
                value_col: eq + 2 + lead,
            });
        }

        let empty = Vec::new();
        let get = |s: &str| sections.get(s).unwrap_or(&empty);

        let mut name = None;
        let mut n = None;
        let mut f2 = true;
        let mut side = Side::Line;
        for e in get("problem") {
            match e.key {
                "name" => name = Some(e.value.to_string()),
                "n" => n = Some(e.integer()?),
                "f2" => f2 = e.boolean()?,
                "side" => side = e.value.parse().map_err(|_| perr(e.line, e.value_col, "side must be line, plus or minus"))?,
                other => return Err(e.err(format!("unknown key '{other}' in [problem]"))),
            }
        }
        let name = name.ok_or_else(|| perr(1, 1, "[problem] needs a name"))?;
        let n = n.ok_or_else(|| perr(1, 1, "[problem] needs n"))?;
        if n == 0 {
            return Err(perr(1, 1, "n must be positive"));
        }

        let mut cs = [None; 3];
        for e in get("constants") {
            let slot = match e.key.to_ascii_uppercase().as_str() {
                "C1" => 0,
                "C2" => 1,
                "C3" => 2,
                other => return Err(e.err(format!("unknown constant '{other}'"))),
            };
            cs[slot] = Some(e.number()?);
        }
        let c = |i: usize| cs[i].ok_or_else(|| perr(1, 1, format!("[constants] needs C{}", i + 1)));
        let constants = Constants {
            c1: c(0)?,
            c2: c(1)?,
            c3: c(2)?,
        };

        let matrix = |section: &str| -> Result<Vec<Expr>> {
            let mut out = vec![Expr::Num(0.0); n * n];
            for e in get(section) {
                let (i, j) = e
                    .key
                    .split_once(',')
                    .and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)))
                    .ok_or_else(|| e.err(format!("expected 'i,j' in [{section}], got '{}'", e.key)))?;
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(e.err(format!("entry {i},{j} outside 1..={n} in [{section}]")));
                }
                out[(i - 1) * n + (j - 1)] = parse_expr(e.value, e.line, e.value_col)?;
            }
            Ok(out)
        };
        let p = matrix("P")?;
        let q = matrix("Q")?;
        let r = matrix("R")?;
        if !sections.contains_key("P") {
            return Err(perr(1, 1, "missing section [P]"));
        }

        let mut boundary = None;
        for e in get("boundary") {
            if e.key != "L0" {
                return Err(e.err(format!("unknown key '{}' in [boundary]", e.key)));
            }
            let rows: Vec<&str> = e.value.split(';').collect();
            if rows.len() != 2 * n {
                return Err(perr(e.line, e.value_col, format!("L0 needs {} rows, got {}", 2 * n, rows.len())));
            }
            let mut m = DMatrix::zeros(2 * n, n);
            for (i, row) in rows.iter().enumerate() {
                let cols: Vec<&str> = row.split(',').map(str::trim).collect();
                if cols.len() != n {
                    return Err(perr(e.line, e.value_col, format!("L0 row {} needs {n} entries", i + 1)));
                }
                for (j, v) in cols.iter().enumerate() {
                    m[(i, j)] = v
                        .parse()
                        .map_err(|_| perr(e.line, e.value_col, format!("L0 entry '{v}' is not a number")))?;
                }
            }
            boundary = Some(m);
        }

        let mut numerics = Numerics::default();
        for e in get("numerics") {
            match e.key {
                "T" => numerics.t_trunc = e.number()?,
                "nodes" => numerics.nodes = e.integer()?,
                "lambda_max" => numerics.lambda_max = Some(e.number()?),
                other => return Err(e.err(format!("unknown key '{other}' in [numerics]"))),
            }
        }
        if numerics.t_trunc <= 0.0 {
            return Err(perr(1, 1, "T must be positive"));
        }

        let mut tolerances = BTreeMap::new();
        let mut probe = Tolerances::<f64>::default();
        for e in get("tolerances") {
            let v = e.number()?;
            probe.set(e.key, v).map_err(|err| e.err(err.to_string()))?;
            tolerances.insert(e.key.to_string(), v);
        }

        Ok(Self {
            name,
            n,
            f2,
            side,
            constants,
            p,
            q,
            r,
            boundary,
            numerics,
            tolerances,
        })
    }

    /// Parses and validates coefficients on the default grid.
    pub fn load(text: &str) -> Result<Self> {
        let spec = Self::parse(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<ValidationReport> {
        let tol = self.tolerances::<f64>()?;
        let cfg = self.config::<f64>();
        let sys = self.system::<f64>()?;
        if let Some(l0) = &self.boundary {
            LagrangianFrame::new(l0.clone(), &tol)?;
        }
        sys.validate(cfg.t_trunc, cfg.validation_points, &tol)
    }

    pub fn system<T: Real>(&self) -> Result<CoefficientSystem<T>> {
        let c = Constants {
            c1: T::lit(self.constants.c1),
            c2: T::lit(self.constants.c2),
            c3: T::lit(self.constants.c3),
        };
        CoefficientSystem::new(self.n, entries(self.n, &self.p), entries(self.n, &self.q), entries(self.n, &self.r), c, self.f2)
    }

    pub fn tolerances<T: Real>(&self) -> Result<Tolerances<T>> {
        let mut tol = Tolerances::default();
        for (k, v) in &self.tolerances {
            tol.set(k, *v)?;
        }
        Ok(tol)
    }

    pub fn config<T: Real>(&self) -> VerifyConfig<T> {
        let mut cfg = VerifyConfig::new(T::lit(self.numerics.t_trunc), self.numerics.nodes);
        cfg.lambda_max = self.numerics.lambda_max.map(T::lit);
        cfg
    }

    /// The declared `L0`, or the Dirichlet plane when none is given.
    pub fn boundary_frame<T: Real>(&self, tol: &Tolerances<T>) -> Result<LagrangianFrame<T>> {
        match &self.boundary {
            Some(m) => LagrangianFrame::new(m.map(T::lit), tol),
            None => Ok(LagrangianFrame::dirichlet(self.n)),
        }
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

fn entries<T: Real>(n: usize, exprs: &[Expr]) -> MatrixFn<T> {
    let exprs: Arc<Vec<Expr>> = Arc::new(exprs.to_vec());
    Arc::new(move |t| DMatrix::from_fn(n, n, |i, j| exprs[i * n + j].eval(t)))
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[problem]")?;
        writeln!(f, "name = {}", self.name)?;
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "f2 = {}", self.f2)?;
        writeln!(f, "side = {}", self.side.as_str())?;
        writeln!(f)?;
        writeln!(f, "[constants]")?;
        writeln!(f, "C1 = {}", self.constants.c1)?;
        writeln!(f, "C2 = {}", self.constants.c2)?;
        writeln!(f, "C3 = {}", self.constants.c3)?;
        for (label, m) in [("P", &self.p), ("Q", &self.q), ("R", &self.r)] {
            writeln!(f)?;
            writeln!(f, "[{label}]")?;
            for (k, e) in m.iter().enumerate() {
                if !e.is_zero() {
                    writeln!(f, "{},{} = {e}", k / self.n + 1, k % self.n + 1)?;
                }
            }
        }
        if let Some(l0) = &self.boundary {
            writeln!(f)?;
            writeln!(f, "[boundary]")?;
            let rows: Vec<String> = l0
                .row_iter()
                .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
                .collect();
            writeln!(f, "L0 = {}", rows.join("; "))?;
        }
        writeln!(f)?;
        writeln!(f, "[numerics]")?;
        writeln!(f, "T = {}", self.numerics.t_trunc)?;
        writeln!(f, "nodes = {}", self.numerics.nodes)?;
        if let Some(l) = self.numerics.lambda_max {
            writeln!(f, "lambda_max = {l}")?;
        }
        if !self.tolerances.is_empty() {
            writeln!(f)?;
            writeln!(f, "[tolerances]")?;
            for (k, v) in &self.tolerances {
                writeln!(f, "{k} = {v}")?;
            }
        }
        Ok(())
    }
}

const POSCHL_TELLER_1: &str = "\
[problem]
name = poschl-teller-1
n = 1

[constants]
C1 = 1
C2 = 0
C3 = 1

[P]
1,1 = 1

[R]
1,1 = 1 - 2*sech(t)^2
";

const POSCHL_TELLER_2: &str = "\
[problem]
name = poschl-teller-2
n = 1

[constants]
C1 = 1
C2 = 0
C3 = 5

[P]
1,1 = 1

[R]
1,1 = 1 - 6*sech(t)^2

[numerics]
lambda_max = 4
";

const SCALAR_CASE_1: &str = "\
[problem]
name = scalar-case-1
n = 1

[constants]
C1 = 1
C2 = 0.3
C3 = 1

[P]
1,1 = 1

[Q]
1,1 = 0.3*tanh(t)

[R]
1,1 = 1
";

const SCALAR_CASE_2: &str = "\
[problem]
name = scalar-case-2
n = 1

[constants]
C1 = 1
C2 = 2
C3 = 1

[P]
1,1 = 1

[Q]
1,1 = 2*tanh(t)

[R]
1,1 = 1
";

const COUPLED_2: &str = "\
[problem]
name = coupled-2
n = 2

[constants]
C1 = 1
C2 = 0.6
C3 = 5.2

[P]
1,1 = 1
2,2 = 1.5

[Q]
1,1 = 0.5*tanh(t)
1,2 = 0.2*sech(t)

[R]
1,1 = 1 - 6*sech(t)^2
1,2 = 0.5*sech(t)^2
2,1 = 0.5*sech(t)^2
2,2 = 2 - 3*sech(t)^2

[numerics]
T = 28
nodes = 5601
";

/// Names accepted by [`builtin`].
pub const BUILTIN: [&str; 5] = ["poschl-teller-1", "poschl-teller-2", "scalar-case-1", "scalar-case-2", "coupled-2"];

/// Source text of a built-in problem.
pub fn builtin_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "poschl-teller-1" => POSCHL_TELLER_1,
        "poschl-teller-2" => POSCHL_TELLER_2,
        "scalar-case-1" => SCALAR_CASE_1,
        "scalar-case-2" => SCALAR_CASE_2,
        "coupled-2" => COUPLED_2,
        _ => return None,
    })
}

pub fn builtin(name: &str) -> Option<ProblemSpec> {
    builtin_text(name).map(|t| ProblemSpec::parse(t).expect("built-in problems parse"))
}
