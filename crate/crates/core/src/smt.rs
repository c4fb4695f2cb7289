//! Polynomial encodings for an external real-arithmetic solver.
//!
//! A profile is `d`-Euclidean iff a system of strict squared-distance
//! inequalities over the coordinates has a real solution. Scripts are written
//! in SMT-LIB 2 (`QF_NRA`), handed to a solver subprocess, and satisfying
//! models are turned back into exact rational embeddings that are verified
//! before being returned.
//!
//! Scripts request the model twice: once exactly and once as decimals, so
//! algebraic coordinates such as `sqrt 2` can be rationalized.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{Read, Seek, Write};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::time::Duration;

use num_traits::{One, Signed, Zero};
use thiserror::Error;
use wait_timeout::ChildExt;

use crate::one_d::UnknownReason;
use crate::profile::{
    verify_embedding_with, Embedding, Entity, Metric, Point, Profile, ProfileError, ProfileKind, VerifyMode, Vote,
};
use crate::rational::{format_rational, parse_rational, truncated_decimal, Rational};

#[derive(Debug, Error)]
pub enum SmtError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("profile has no voters")]
    EmptyProfile,
    #[error("{mode:?} encoding does not apply to a {kind:?} profile")]
    ModeMismatch { mode: EncodeMode, kind: ProfileKind },
    #[error("solver command `{0}` not found")]
    SolverMissing(String),
    #[error("solver command template is empty or malformed")]
    BadCommand,
    #[error("model value for `{0}` is not a number")]
    BadModelValue(String),
    #[error("no rational point within {0} digits verifies; the model may touch a boundary")]
    PrecisionExhausted(u32),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EncodeMode {
    /// Strict total orders.
    Strict,
    /// Weak orders; ties impose nothing.
    Weak,
    /// Approval sets cut out by a ball of any radius per voter.
    De,
    /// Approval sets cut out by the unit ball around each voter.
    Due,
}

impl EncodeMode {
    /// The natural mode for a profile kind (`De` for dichotomous).
    pub fn for_kind(kind: ProfileKind) -> Self {
        match kind {
            ProfileKind::Strict => EncodeMode::Strict,
            ProfileKind::Weak => EncodeMode::Weak,
            ProfileKind::Dichotomous => EncodeMode::De,
        }
    }

    pub fn verify_mode(self) -> VerifyMode {
        if self == EncodeMode::Due {
            VerifyMode::UnitBall
        } else {
            VerifyMode::Ordinal
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodeOptions {
    /// Pin entity 0 to the origin and entity `k < d` to the first `k` axes.
    pub symmetry: bool,
    /// Only compare adjacent indifference classes.
    pub consecutive_only: bool,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions { symmetry: true, consecutive_only: true }
    }
}

pub const DEFAULT_DECIMAL_PRECISION: u32 = 40;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverScript {
    pub logic: String,
    pub variables: Vec<String>,
    pub assertions: Vec<String>,
    pub decimal_precision: u32,
}

impl SolverScript {
    pub fn new(logic: &str) -> Self {
        SolverScript {
            logic: logic.to_string(),
            variables: Vec::new(),
            assertions: Vec::new(),
            decimal_precision: DEFAULT_DECIMAL_PRECISION,
        }
    }

    pub fn declare(&mut self, name: impl Into<String>) -> String {
        let name = name.into();
        self.variables.push(name.clone());
        name
    }

    pub fn assert(&mut self, formula: impl Into<String>) {
        self.assertions.push(formula.into());
    }

    pub fn to_smtlib(&self) -> String {
        let mut out = format!("(set-logic {})\n", self.logic);
        for v in &self.variables {
            let _ = writeln!(out, "(declare-const {v} Real)");
        }
        for a in &self.assertions {
            let _ = writeln!(out, "(assert {a})");
        }
        out.push_str("(check-sat)\n(get-model)\n");
        let _ = writeln!(
            out,
            "(set-option :pp.decimal true)\n(set-option :pp.decimal_precision {})\n(get-model)",
            self.decimal_precision
        );
        out
    }
}

/// SMT-LIB literal for a rational: `3.0`, `(- 3.0)`, `(/ 1.0 2.0)`.
pub fn literal(q: &Rational) -> String {
    let mag = q.abs();
    let body = if mag.is_integer() {
        format!("{}.0", mag.numer())
    } else {
        format!("(/ {}.0 {}.0)", mag.numer(), mag.denom())
    };
    if q.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

fn sum(terms: Vec<String>) -> String {
    match terms.len() {
        0 => "0.0".to_string(),
        1 => terms.into_iter().next().unwrap(),
        _ => format!("(+ {})", terms.join(" ")),
    }
}

/// A coordinate that is either a solver variable or pinned to zero.
type Coord = Option<String>;

fn coordinate_names(entity: Entity, d: usize, index: usize, symmetry: bool) -> Vec<Coord> {
    (0..d)
        .map(|k| {
            // Entity `index` (voters first) keeps only its first `index` coordinates.
            if symmetry && index < d && k >= index {
                None
            } else {
                Some(match entity {
                    Entity::Voter(i) => format!("x_v{i}_{k}"),
                    Entity::Alternative(j) => format!("x_a{j}_{k}"),
                })
            }
        })
        .collect()
}

fn squared_distance(p: &[Coord], q: &[Coord]) -> String {
    let terms = p
        .iter()
        .zip(q)
        .filter_map(|(a, b)| {
            let diff = match (a, b) {
                (None, None) => return None,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (Some(a), Some(b)) => format!("(- {a} {b})"),
            };
            Some(format!("(* {diff} {diff})"))
        })
        .collect();
    sum(terms)
}

/// The polynomial system whose real solutions are the embeddings of
/// `profile` in dimension `d`.
pub fn encode(profile: &Profile, d: usize, mode: EncodeMode, options: EncodeOptions) -> Result<SolverScript, SmtError> {
    if d == 0 {
        return Err(SmtError::ZeroDimension);
    }
    if profile.num_voters() == 0 {
        return Err(SmtError::EmptyProfile);
    }
    let kind = profile.kind();
    let fits = match mode {
        EncodeMode::Strict => kind == ProfileKind::Strict,
        EncodeMode::Weak => kind != ProfileKind::Dichotomous,
        EncodeMode::De | EncodeMode::Due => kind == ProfileKind::Dichotomous,
    };
    if !fits {
        return Err(SmtError::ModeMismatch { mode, kind });
    }
    let n = profile.num_voters();
    let m = profile.num_alternatives();
    let mut script = SolverScript::new("QF_NRA");
    let mut voters = Vec::with_capacity(n);
    let mut alternatives = Vec::with_capacity(m);
    for index in 0..n + m {
        let entity = if index < n { Entity::Voter(index) } else { Entity::Alternative(index - n) };
        let coords = coordinate_names(entity, d, index, options.symmetry);
        for name in coords.iter().flatten() {
            script.declare(name.clone());
        }
        if index < n {
            voters.push(coords);
        } else {
            alternatives.push(coords);
        }
    }
    for (v, vote) in profile.votes().iter().enumerate() {
        let dist = |a: usize| squared_distance(&voters[v], &alternatives[a]);
        match (mode, vote) {
            (EncodeMode::Strict | EncodeMode::Weak, _) => {
                let pairs = if options.consecutive_only { vote.consecutive_pairs(m) } else { vote.strict_pairs(m) };
                for (a, b) in pairs {
                    script.assert(format!("(< {} {})", dist(a), dist(b)));
                }
            }
            (EncodeMode::De, Vote::Dichotomous(approved)) => {
                let s = script.declare(format!("s_v{v}"));
                script.assert(format!("(> {s} 0.0)"));
                for a in 0..m {
                    let op = if approved.contains(&a) { "<" } else { ">" };
                    script.assert(format!("({op} {} {s})", dist(a)));
                }
            }
            (EncodeMode::Due, Vote::Dichotomous(approved)) => {
                for a in 0..m {
                    let op = if approved.contains(&a) { "<" } else { ">=" };
                    script.assert(format!("({op} {} 1.0)", dist(a)));
                }
            }
            _ => unreachable!("mode checked against profile kind"),
        }
    }
    Ok(script)
}

/// How to run the solver. `command` is split like a shell command line;
/// `{}` is replaced by the script path, which is otherwise appended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub command: String,
    pub scratch_dir: PathBuf,
    pub keep_scripts: bool,
}

pub const SOLVER_ENV: &str = "EUCLID_SOLVER_CMD";
pub const SCRATCH_ENV: &str = "EUCLID_SCRATCH_DIR";
pub const DEFAULT_SOLVER_COMMAND: &str = "z3 -smt2 {}";

impl SolverConfig {
    pub fn new(command: impl Into<String>) -> Self {
        SolverConfig { command: command.into(), scratch_dir: std::env::temp_dir(), keep_scripts: false }
    }

    /// Command and scratch directory from the environment, if a command is set.
    pub fn from_env() -> Option<Self> {
        let command = std::env::var(SOLVER_ENV).ok().filter(|c| !c.trim().is_empty())?;
        let mut config = SolverConfig::new(command);
        if let Some(dir) = std::env::var_os(SCRATCH_ENV) {
            config.scratch_dir = dir.into();
        }
        Some(config)
    }

    /// The environment's solver, else `z3` if it is on the path.
    pub fn detect() -> Option<Self> {
        if let Some(config) = SolverConfig::from_env() {
            return Some(config);
        }
        let found = std::env::var_os("PATH")
            .map(|paths| std::env::split_paths(&paths).any(|dir| dir.join("z3").is_file()))
            .unwrap_or(false);
        let mut config = found.then(|| SolverConfig::new(DEFAULT_SOLVER_COMMAND))?;
        if let Some(dir) = std::env::var_os(SCRATCH_ENV) {
            config.scratch_dir = dir.into();
        }
        Some(config)
    }

    fn argv(&self, script: &std::path::Path) -> Result<Vec<String>, SmtError> {
        let mut parts = shlex::split(&self.command).filter(|p| !p.is_empty()).ok_or(SmtError::BadCommand)?;
        if parts.is_empty() {
            return Err(SmtError::BadCommand);
        }
        let path = script.to_string_lossy();
        if parts.iter().any(|p| p.contains("{}")) {
            for p in &mut parts {
                *p = p.replace("{}", &path);
            }
        } else {
            parts.push(path.into_owned());
        }
        Ok(parts)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelValue {
    Exact(Rational),
    /// An algebraic number; `approx` is the solver's decimal rendering.
    Approximate { approx: Option<SExpr> },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Model {
    pub values: BTreeMap<String, ModelValue>,
}

impl Model {
    pub fn exact(values: impl IntoIterator<Item = (String, Rational)>) -> Self {
        Model { values: values.into_iter().map(|(k, v)| (k, ModelValue::Exact(v))).collect() }
    }

    /// The value of `name` with decimals truncated to `digits` places;
    /// variables the solver left out are zero.
    pub fn value_at(&self, name: &str, digits: u32) -> Result<Rational, SmtError> {
        match self.values.get(name) {
            None => Ok(Rational::zero()),
            Some(ModelValue::Exact(q)) => Ok(q.clone()),
            Some(ModelValue::Approximate { approx: Some(expr) }) => {
                eval(expr, digits).map(|(q, _)| q).ok_or_else(|| SmtError::BadModelValue(name.to_string()))
            }
            Some(ModelValue::Approximate { approx: None }) => Err(SmtError::BadModelValue(name.to_string())),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.values.values().all(|v| matches!(v, ModelValue::Exact(_)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverOutcome {
    Sat(Model),
    Unsat,
    Unknown(UnknownReason),
}

/// Writes the script to the scratch directory, runs the solver under a
/// wall-clock timeout and parses its answer. The child is killed and reaped
/// on timeout.
pub fn solve(script: &SolverScript, config: &SolverConfig, timeout: Duration) -> Result<SolverOutcome, SmtError> {
    std::fs::create_dir_all(&config.scratch_dir)?;
    let mut file = tempfile::Builder::new().prefix("euclid-").suffix(".smt2").tempfile_in(&config.scratch_dir)?;
    file.write_all(script.to_smtlib().as_bytes())?;
    file.flush()?;
    let argv = config.argv(file.path())?;
    let mut stdout = tempfile::tempfile_in(&config.scratch_dir)?;
    let mut stderr = tempfile::tempfile_in(&config.scratch_dir)?;
    let spawned = Command::new(&argv[0])
        .args(&argv[1..])
        .stdin(Stdio::null())
        .stdout(stdout.try_clone()?)
        .stderr(stderr.try_clone()?)
        .spawn();
    let mut child = match spawned {
        Ok(child) => child,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(SmtError::SolverMissing(argv[0].clone())),
        Err(e) => return Err(e.into()),
    };
    let status = match child.wait_timeout(timeout)? {
        Some(status) => Some(status),
        None => {
            let _ = child.kill();
            child.wait()?;
            None
        }
    };
    if config.keep_scripts {
        let _ = file.keep();
    }
    if status.is_none() {
        return Ok(SolverOutcome::Unknown(UnknownReason::Timeout));
    }
    let read_all = |f: &mut File| -> std::io::Result<String> {
        let mut s = String::new();
        f.rewind()?;
        f.read_to_string(&mut s)?;
        Ok(s)
    };
    let out = read_all(&mut stdout)?;
    let err = read_all(&mut stderr)?;
    Ok(parse_output(&out, &err))
}

/// Interprets solver stdout. Anything unexpected becomes `Unknown(Crash)`
/// carrying the captured output.
pub fn parse_output(stdout: &str, stderr: &str) -> SolverOutcome {
    let crash = || SolverOutcome::Unknown(UnknownReason::Crash { stdout: stdout.to_string(), stderr: stderr.to_string() });
    let mut lines = stdout.trim_start().splitn(2, '\n');
    let status = lines.next().unwrap_or("").trim();
    let rest = lines.next().unwrap_or("");
    match status {
        "unsat" => SolverOutcome::Unsat,
        "unknown" => SolverOutcome::Unknown(UnknownReason::SolverGaveUp(first_error(rest).unwrap_or_else(|| "unknown".into()))),
        "sat" => match parse_models(rest) {
            Some(model) => SolverOutcome::Sat(model),
            None => crash(),
        },
        _ => crash(),
    }
}

fn first_error(text: &str) -> Option<String> {
    let exprs = parse_sexprs(text)?;
    exprs.iter().find_map(|e| match e {
        SExpr::List(items) if items.first() == Some(&SExpr::Atom("error".into())) => {
            items.get(1).map(|m| match m {
                SExpr::Atom(a) => a.trim_matches('"').to_string(),
                other => other.to_string(),
            })
        }
        _ => None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Atom(String),
    List(Vec<SExpr>),
}

impl std::fmt::Display for SExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SExpr::Atom(a) => f.write_str(a),
            SExpr::List(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Parses a sequence of s-expressions; `None` on unbalanced input.
pub fn parse_sexprs(text: &str) -> Option<Vec<SExpr>> {
    let mut stack: Vec<Vec<SExpr>> = vec![Vec::new()];
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '(' => stack.push(Vec::new()),
            ')' => {
                let done = stack.pop()?;
                stack.last_mut()?.push(SExpr::List(done));
            }
            ';' => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            '"' => {
                let mut s = String::from('"');
                for c in chars.by_ref() {
                    s.push(c);
                    if c == '"' {
                        break;
                    }
                }
                stack.last_mut()?.push(SExpr::Atom(s));
            }
            '|' => {
                let mut s = String::new();
                for c in chars.by_ref() {
                    if c == '|' {
                        break;
                    }
                    s.push(c);
                }
                stack.last_mut()?.push(SExpr::Atom(s));
            }
            c if c.is_whitespace() => {}
            c => {
                let mut s = String::from(c);
                while let Some(&n) = chars.peek() {
                    if n.is_whitespace() || n == '(' || n == ')' {
                        break;
                    }
                    s.push(n);
                    chars.next();
                }
                stack.last_mut()?.push(SExpr::Atom(s));
            }
        }
    }
    if stack.len() == 1 {
        stack.pop()
    } else {
        None
    }
}

/// `define-fun` bodies of one model block (`(model ...)` or a bare list).
fn definitions(block: &SExpr) -> Option<Vec<(String, SExpr)>> {
    let SExpr::List(items) = block else { return None };
    let mut defs = Vec::new();
    for item in items {
        match item {
            SExpr::Atom(a) if a == "model" => {}
            SExpr::List(parts) => match parts.as_slice() {
                [SExpr::Atom(kw), SExpr::Atom(name), SExpr::List(args), _sort, body] if kw == "define-fun" && args.is_empty() => {
                    defs.push((name.clone(), body.clone()));
                }
                [SExpr::Atom(kw), ..] if kw == "define-fun" => {}
                _ => return None,
            },
            _ => return None,
        }
    }
    Some(defs)
}

fn parse_models(text: &str) -> Option<Model> {
    let exprs = parse_sexprs(text)?;
    let mut blocks = exprs.iter().filter_map(definitions);
    let exact = blocks.next()?;
    let decimals: BTreeMap<String, SExpr> = blocks.next().unwrap_or_default().into_iter().collect();
    let mut model = Model::default();
    for (name, body) in exact {
        let value = match eval(&body, u32::MAX) {
            Some((q, true)) => ModelValue::Exact(q),
            _ => ModelValue::Approximate { approx: decimals.get(&name).cloned() },
        };
        model.values.insert(name, value);
    }
    Some(model)
}

/// Evaluates an arithmetic s-expression. Decimal literals ending in `?` are
/// truncated to `digits` fractional places and mark the result inexact;
/// algebraic numbers (`root-obj`) do not evaluate.
pub fn eval(expr: &SExpr, digits: u32) -> Option<(Rational, bool)> {
    match expr {
        SExpr::Atom(a) => {
            if a.ends_with('?') {
                truncated_decimal(a, digits as usize).ok().map(|q| (q, false))
            } else {
                parse_rational(a).ok().map(|q| (q, true))
            }
        }
        SExpr::List(items) => {
            let (SExpr::Atom(op), args) = items.split_first()? else { return None };
            let vals: Vec<(Rational, bool)> = args.iter().map(|a| eval(a, digits)).collect::<Option<_>>()?;
            let exact = vals.iter().all(|(_, e)| *e);
            let mut it = vals.into_iter().map(|(q, _)| q);
            let value = match (op.as_str(), args.len()) {
                ("-", 1) => -it.next()?,
                ("-", _) => {
                    let first = it.next()?;
                    it.fold(first, |acc, q| acc - q)
                }
                ("+", _) => it.fold(Rational::zero(), |acc, q| acc + q),
                ("*", _) => it.fold(Rational::one(), |acc, q| acc * q),
                ("/", 2) => {
                    let num = it.next()?;
                    let den = it.next()?;
                    if den.is_zero() {
                        return None;
                    }
                    num / den
                }
                _ => return None,
            };
            Some((value, exact))
        }
    }
}

fn coordinate(model: &Model, entity: Entity, k: usize, digits: u32) -> Result<Rational, SmtError> {
    let name = match entity {
        Entity::Voter(i) => format!("x_v{i}_{k}"),
        Entity::Alternative(j) => format!("x_a{j}_{k}"),
    };
    model.value_at(&name, digits)
}

fn embedding_at(model: &Model, profile: &Profile, d: usize, digits: u32) -> Result<Embedding, SmtError> {
    let points = |make: fn(usize) -> Entity, count: usize| -> Result<Vec<Point>, SmtError> {
        (0..count)
            .map(|i| Ok(Point::new((0..d).map(|k| coordinate(model, make(i), k, digits)).collect::<Result<_, _>>()?)))
            .collect()
    };
    Ok(Embedding::new(d, points(Entity::Voter, profile.num_voters())?, points(Entity::Alternative, profile.num_alternatives())?)?)
}

/// Turns a model of [`encode`]'s script into an embedding that verifies
/// exactly. Inexact coordinates are truncated at 1, 2, 4, ... decimal
/// places up to `max_digits`; the first verified embedding is returned.
pub fn model_to_embedding(
    model: &Model,
    profile: &Profile,
    d: usize,
    mode: EncodeMode,
    max_digits: u32,
) -> Result<Embedding, SmtError> {
    let accepts = |e: &Embedding| -> Result<bool, SmtError> {
        Ok(verify_embedding_with(profile, e, Metric::L2, mode.verify_mode())?.accepted())
    };
    if model.is_exact() {
        let e = embedding_at(model, profile, d, 0)?;
        return if accepts(&e)? { Ok(e) } else { Err(SmtError::PrecisionExhausted(0)) };
    }
    let mut digits = 1;
    loop {
        let e = embedding_at(model, profile, d, digits.min(max_digits))?;
        if accepts(&e)? {
            return Ok(e);
        }
        if digits >= max_digits {
            return Err(SmtError::PrecisionExhausted(max_digits));
        }
        digits *= 2;
    }
}

/// Result of asking the solver whether `profile` is `d`-Euclidean.
pub fn recognize_with_solver(
    profile: &Profile,
    d: usize,
    mode: EncodeMode,
    config: &SolverConfig,
    timeout: Duration,
) -> Result<crate::one_d::RecognitionResult, SmtError> {
    use crate::one_d::{RecognitionResult, Refutation};
    let script = encode(profile, d, mode, EncodeOptions::default())?;
    Ok(match solve(&script, config, timeout)? {
        SolverOutcome::Unsat => RecognitionResult::No(Refutation::Unsat),
        SolverOutcome::Unknown(reason) => RecognitionResult::Unknown(reason),
        SolverOutcome::Sat(model) => match model_to_embedding(&model, profile, d, mode, script.decimal_precision) {
            Ok(e) => RecognitionResult::Yes(e),
            Err(SmtError::PrecisionExhausted(_)) => RecognitionResult::Unknown(UnknownReason::PrecisionExhausted),
            Err(e) => return Err(e),
        },
    })
}

/// Formats a model for humans: one `name = value` per line.
pub fn format_model(model: &Model) -> String {
    let mut out = String::new();
    for (name, value) in &model.values {
        let text = match value {
            ModelValue::Exact(q) => format_rational(q),
            ModelValue::Approximate { approx: Some(e) } => e.to_string(),
            ModelValue::Approximate { approx: None } => "?".into(),
        };
        let _ = writeln!(out, "{name} = {text}");
    }
    out
}
