//! Command-line front end: load an instance, run one command, render the
//! report as text, structured JSON or CSV.
//!
//! Exit codes: 0 success, 1 mathematical failure (axioms, bounds or
//! convergence), 2 operational error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use bvfix::contraction::{self, ContractionError, Modulus, ModulusReport, Theorem};
use bvfix::instance::{self, InstanceError};
use bvfix::oracle::{self, OracleError};
use bvfix::solver::{self, ResidualForm, SolverError};
use bvfix::space::{self, AxiomReport, SpaceError};
use bvfix::{
    Bound, ContractionReport, Instance, IterationTrace, PairSource, ParsedInstance, SelfMap, Space,
    SpaceSignature, StoppingCriteria, TraceStatus,
};
use clap::{Parser, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MATH: i32 = 1;
pub const EXIT_OPERATIONAL: i32 = 2;

/// Environment variable consulted when `--seed` is absent.
pub const SEED_ENV: &str = "FIXPOINT_SEED";

/// Absolute slack allowed on bound and decrease checks.
const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Check the b_v(s) axioms.
    Verify,
    /// Minimal s for each v in --v-grid.
    Classify,
    /// Banach, Kannan and weak-contraction estimates plus hypothesis checks.
    Analyze,
    /// Picard iteration with bound verification.
    Solve,
    /// Brute-force ground truth on a finite instance.
    Oracle,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Classify => "classify",
            Command::Analyze => "analyze",
            Command::Solve => "solve",
            Command::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "bvfix", version, about = "Fixed points of contractive maps on b_v(s) metric spaces")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Instance file (JSON).
    #[arg(long)]
    pub instance: PathBuf,
    /// Override the instance's v.
    #[arg(long)]
    pub v: Option<usize>,
    /// Override the instance's s.
    #[arg(long)]
    pub s: Option<f64>,
    /// RNG seed; falls back to $FIXPOINT_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest number of tuples or pairs checked exhaustively.
    #[arg(long, default_value_t = bvfix::DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long, default_value_t = solver::DEFAULT_TOL_STEP)]
    pub tol_step: f64,
    #[arg(long, default_value_t = solver::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    /// Modulus φ(t) for the weak-contraction check, overriding the instance.
    #[arg(long)]
    pub phi: Option<String>,
    /// Kannan constant to assume instead of the estimate.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Gap offsets p for the bound checks.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub p_window: Vec<usize>,
    /// Write the solve trace as CSV to this path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Omit the timestamp header line.
    #[arg(long)]
    pub no_timestamp: bool,
    /// Starting point for solve: a label for finite spaces, a number otherwise.
    #[arg(long)]
    pub u0: Option<String>,
    /// Values of v tried by classify.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub v_grid: Vec<usize>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Contraction(#[from] ContractionError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// What a command produced, before rendering.
struct Report {
    code: i32,
    text: String,
    structured: Value,
    csv: Option<String>,
    warnings: Vec<String>,
}

/// Parse `args` (including the program name) and run.
pub fn run<I, T>(args: I, seed_env: Option<String>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_OPERATIONAL,
                    stdout: String::new(),
                    stderr: rendered,
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: rendered,
                    stderr: String::new(),
                }
            };
        }
    };
    match execute(&cli, seed_env) {
        Ok(outcome) => outcome,
        Err(e) => Outcome {
            code: EXIT_OPERATIONAL,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

/// Options after resolving defaults and the seed fallback.
struct RunConfig<'a> {
    cli: &'a Cli,
    seed: u64,
    phi: Option<Modulus>,
    signature: SpaceSignature,
}

fn resolve_seed(cli: &Cli, seed_env: Option<String>) -> Result<u64, CliError> {
    match (cli.seed, seed_env) {
        (Some(seed), _) => Ok(seed),
        (None, Some(raw)) => raw
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}={raw:?} is not an unsigned integer"))),
        (None, None) => Ok(0),
    }
}

fn execute(cli: &Cli, seed_env: Option<String>) -> Result<Outcome, CliError> {
    let seed = resolve_seed(cli, seed_env)?;
    if cli.budget == 0 {
        return Err(CliError::Usage("--budget must be at least 1".into()));
    }
    if cli.p_window.is_empty() || cli.p_window.contains(&0) {
        return Err(CliError::Usage("--p-window entries must be >= 1".into()));
    }
    if cli.format == Format::Csv && cli.command != Command::Solve {
        return Err(CliError::Usage("--format csv is only available for solve".into()));
    }
    if let Some(g) = cli.gamma {
        if !(g.is_finite() && g >= 0.0) {
            return Err(CliError::Usage(format!("--gamma must be a finite real >= 0, got {g}")));
        }
    }
    let document = std::fs::read_to_string(&cli.instance).map_err(|source| CliError::Read {
        path: cli.instance.clone(),
        source,
    })?;
    let parsed = instance::parse_instance(&document)?;
    let phi = match &cli.phi {
        Some(src) => Some(Modulus::parse(src).map_err(|e| CliError::Usage(format!("invalid --phi: {e}")))?),
        None => parsed.phi.clone(),
    };
    let signature = SpaceSignature::declared(
        cli.v.unwrap_or(parsed.signature.v),
        cli.s.unwrap_or(parsed.signature.s),
        parsed.signature.complete,
    )?;
    let config = RunConfig {
        cli,
        seed,
        phi,
        signature,
    };

    let report = match cli.command {
        Command::Verify => cmd_verify(&config, &parsed)?,
        Command::Classify => cmd_classify(&config, &parsed)?,
        Command::Analyze => cmd_analyze(&config, &parsed)?,
        Command::Solve => cmd_solve(&config, &parsed)?,
        Command::Oracle => cmd_oracle(&config, &parsed)?,
    };
    Ok(render(&config, &parsed, report))
}

fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn render(config: &RunConfig<'_>, parsed: &ParsedInstance, report: Report) -> Outcome {
    let cli = config.cli;
    let mut stderr = String::new();
    for w in &report.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let stdout = match cli.format {
        Format::Text => {
            let mut out = format!(
                "# bvfix {} {}\n# seed: {}  budget: {}\n",
                cli.command.name(),
                cli.instance.display(),
                config.seed,
                cli.budget
            );
            if !cli.no_timestamp {
                let _ = writeln!(out, "# timestamp: {}", timestamp());
            }
            for w in &report.warnings {
                let _ = writeln!(out, "WARNING: {w}");
            }
            out.push_str(&report.text);
            out
        }
        Format::Structured => {
            let instance: Value = serde_json::from_str(&parsed.to_json()).expect("exported instance is valid JSON");
            let mut doc = serde_json::Map::new();
            if !cli.no_timestamp {
                doc.insert("timestamp".into(), json!(timestamp()));
            }
            doc.insert("command".into(), json!(cli.command.name()));
            doc.insert("seed".into(), json!(config.seed));
            doc.insert("budget".into(), json!(cli.budget));
            doc.insert("instance".into(), instance);
            doc.insert("warnings".into(), json!(report.warnings));
            doc.insert("result".into(), report.structured);
            doc.insert("exit_code".into(), json!(report.code));
            let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("serializable");
            s.push('\n');
            s
        }
        Format::Csv => report.csv.unwrap_or_default(),
    };
    Outcome {
        code: report.code,
        stdout,
        stderr,
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn axiom_text(report: &AxiomReport, space: &bvfix::FiniteSpace) -> String {
    let mut out = String::new();
    let mode = match report.mode {
        space::CheckMode::Exhaustive => "exhaustive".to_string(),
        space::CheckMode::Sampled { samples, seed } => format!("sampled ({samples} tuples, seed {seed})"),
    };
    let _ = writeln!(
        out,
        "axioms v={} s={} on {} points: {} [{mode}, {} tuples checked]",
        report.v,
        report.s,
        report.points,
        if report.passed() { "PASS" } else { "FAIL" },
        report.tuples_checked
    );
    if report.vacuous {
        out.push_str("  polygon inequality vacuous: no admissible tuples\n");
    }
    let _ = writeln!(out, "  zero distance iff equal: {}", ok_word(report.condition1_ok));
    let _ = writeln!(out, "  symmetry: {}", ok_word(report.condition2_ok));
    let _ = writeln!(
        out,
        "  polygon inequality: {} (worst ratio {})",
        ok_word(report.condition3_ok),
        report.worst_ratio
    );
    if let Some(w) = &report.witness {
        let label = if report.condition3_ok { "worst tuple" } else { "witness" };
        let _ = writeln!(out, "  {label}: {}", w.describe(space, report.s));
    }
    out
}

fn ok_word(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn cmd_verify(config: &RunConfig<'_>, parsed: &ParsedInstance) -> Result<Report, CliError> {
    let space = parsed.instance.check_space()?;
    let sig = &config.signature;
    let report = space::check_axioms(&space, sig.v, sig.s, config.cli.budget, config.seed)?;
    let witness = report.witness.as_ref().map(|w| w.describe(&space, sig.s));
    Ok(Report {
        code: if report.passed() { EXIT_OK } else { EXIT_MATH },
        text: axiom_text(&report, &space),
        structured: json!({ "axioms": to_value(&report), "status": to_value(&report.status()), "witness": witness }),
        csv: None,
        warnings: Vec::new(),
    })
}

fn cmd_classify(config: &RunConfig<'_>, parsed: &ParsedInstance) -> Result<Report, CliError> {
    if config.cli.v_grid.is_empty() || config.cli.v_grid.contains(&0) {
        return Err(CliError::Usage("--v-grid entries must be >= 1".into()));
    }
    let space = parsed.instance.check_space()?;
    let classes = space::classify_space(&space, &config.cli.v_grid, config.cli.budget, config.seed)?;
    let mut text = String::new();
    for c in &classes {
        let mut names = Vec::new();
        let f = c.flags;
        for (flag, name) in [
            (f.metric, "metric"),
            (f.b_metric, "b-metric"),
            (f.rectangular, "rectangular metric"),
            (f.rectangular_b_metric, "rectangular b-metric"),
            (f.v_generalized, "v-generalized metric"),
        ] {
            if flag {
                names.push(name);
            }
        }
        let label = match c.label {
            space::MinimalSLabel::Exact => "exact",
            space::MinimalSLabel::LowerBound => "lower bound",
            space::MinimalSLabel::Vacuous => "vacuous",
        };
        let _ = writeln!(
            text,
            "v={}: minimal s = {} ({label}){}",
            c.v,
            c.s_min,
            if names.is_empty() { String::new() } else { format!("; {}", names.join(", ")) }
        );
    }
    let any = classes.iter().any(|c| c.signature.is_some());
    if !any {
        text.push_str("no finite s works for any v tried\n");
    }
    Ok(Report {
        code: if any { EXIT_OK } else { EXIT_MATH },
        text,
        structured: json!({ "classifications": to_value(&classes) }),
        csv: None,
        warnings: Vec::new(),
    })
}

/// Axiom status of the signature after checking it on the instance's finite
/// check space.
fn checked_signature(config: &RunConfig<'_>, parsed: &ParsedInstance) -> Result<SpaceSignature, CliError> {
    let space = parsed.instance.check_space()?;
    let mut sig = config.signature.clone();
    sig.axiom_status = space::check_axioms(&space, sig.v, sig.s, config.cli.budget, config.seed)?.status();
    Ok(sig)
}

struct Hypotheses {
    weak: Option<contraction::HypothesisReport>,
    kannan: contraction::HypothesisReport,
    modulus: Option<ModulusReport>,
    /// γ used for the Kannan hypotheses and bounds.
    gamma: Bound,
    gamma_declared: bool,
}

impl Hypotheses {
    fn any_satisfied(&self) -> bool {
        self.kannan.satisfied || self.weak.as_ref().is_some_and(|w| w.satisfied)
    }

    /// One warning per failed condition of each requested theorem, when no
    /// theorem applies.
    fn warnings(&self) -> Vec<String> {
        if self.any_satisfied() && !(self.gamma_declared && !self.kannan.satisfied) {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut emit = |h: &contraction::HypothesisReport, name: &str| {
            for c in h.failed_conditions() {
                out.push(format!("{name} hypothesis violated: {c}; continuing"));
            }
        };
        if self.gamma_declared || self.weak.is_none() {
            emit(&self.kannan, "Kannan");
        }
        if let Some(w) = &self.weak {
            if !w.satisfied && !(self.gamma_declared && self.kannan.satisfied) {
                emit(w, "weak-contraction");
            }
        }
        out
    }

    fn text(&self) -> String {
        let mut out = String::new();
        let mut block = |h: &contraction::HypothesisReport, name: &str| {
            let _ = writeln!(out, "{name} hypotheses: {}", if h.satisfied { "satisfied" } else { "not satisfied" });
            for d in &h.details {
                let _ = writeln!(out, "  [{}] {}", if d.verdict { "ok" } else { "FAIL" }, d.condition);
            }
        };
        if let Some(w) = &self.weak {
            block(w, "weak-contraction");
        }
        block(&self.kannan, "Kannan");
        out
    }

    fn structured(&self) -> Value {
        json!({
            "gamma": to_value(&self.gamma),
            "gamma_declared": self.gamma_declared,
            "modulus": self.modulus.as_ref().map(to_value),
            "weak_contraction": self.weak.as_ref().map(to_value),
            "kannan": to_value(&self.kannan),
        })
    }
}

fn hypotheses<P: Clone>(
    config: &RunConfig<'_>,
    sig: &SpaceSignature,
    report: &ContractionReport<P>,
    diameter: f64,
) -> Result<Hypotheses, CliError> {
    let gamma = match config.cli.gamma {
        Some(g) => Bound::Finite(g),
        None => report.kannan_gamma,
    };
    let mut kannan_view = report.clone();
    kannan_view.kannan_gamma = gamma;
    let kannan = contraction::check_hypotheses(sig, &kannan_view, None, Theorem::Kannan);
    let (weak, modulus) = match &config.phi {
        Some(phi) => {
            let m = contraction::validate_modulus(phi, &contraction::default_modulus_grid(diameter))?;
            let h = contraction::check_hypotheses(sig, report, Some(&m), Theorem::WeakContraction);
            (Some(h), Some(m))
        }
        None => (None, None),
    };
    Ok(Hypotheses {
        weak,
        kannan,
        modulus,
        gamma,
        gamma_declared: config.cli.gamma.is_some(),
    })
}

fn witness_text<S: Space>(space: &S, w: &Option<contraction::PairWitness<S::Point>>) -> String {
    match w {
        Some(w) => format!(" at ({}, {})", space.label(w.u), space.label(w.w)),
        None => String::new(),
    }
}

fn contraction_text<S: Space>(space: &S, report: &ContractionReport<S::Point>) -> String {
    let mut out = String::new();
    let mode = match report.mode {
        contraction::PairMode::Exhaustive => "exhaustive".to_string(),
        contraction::PairMode::Sampled { seed } => format!("sampled, seed {seed}"),
    };
    let _ = writeln!(out, "pairs checked: {} ({mode})", report.pairs_checked);
    let _ = writeln!(out, "c_hat = {}{}", report.banach_c, witness_text(space, &report.banach_witness));
    let _ = writeln!(out, "gamma_hat = {}{}", report.kannan_gamma, witness_text(space, &report.kannan_witness));
    if let Some(w) = &report.weak {
        let _ = writeln!(
            out,
            "weakly contractive: {} (min slack {}){}",
            w.weak_ok,
            w.min_slack,
            witness_text(space, &w.witness)
        );
    }
    out
}

fn cmd_analyze(config: &RunConfig<'_>, parsed: &ParsedInstance) -> Result<Report, CliError> {
    let sig = checked_signature(config, parsed)?;
    match &parsed.instance {
        Instance::Finite { space, map: Some(map) } => analyze_generic(config, &sig, space, map, space.points(), space.diameter()),
        Instance::Real { space, map: Some(map) } => {
            analyze_generic(config, &sig, space, map, space.grid(), space.diameter_estimate())
        }
        _ => Err(CliError::Usage("instance has no map".into())),
    }
}

fn analyze_generic<S, M>(
    config: &RunConfig<'_>,
    sig: &SpaceSignature,
    space: &S,
    map: &M,
    points: Vec<S::Point>,
    diameter: f64,
) -> Result<Report, CliError>
where
    S: Space,
    M: SelfMap<S::Point>,
{
    let pairs = PairSource::with_budget(points, config.cli.budget, config.seed);
    let report = contraction::analyze_map(space, map, &pairs, config.phi.as_ref())?;
    let hyp = hypotheses(config, sig, &report, diameter)?;
    let mut text = contraction_text(space, &report);
    text.push_str(&hyp.text());
    Ok(Report {
        code: EXIT_OK,
        text,
        structured: json!({
            "signature": to_value(sig),
            "contraction": to_value(&report),
            "hypotheses": hyp.structured(),
        }),
        csv: None,
        warnings: Vec::new(),
    })
}

fn cmd_solve(config: &RunConfig<'_>, parsed: &ParsedInstance) -> Result<Report, CliError> {
    let sig = checked_signature(config, parsed)?;
    match &parsed.instance {
        Instance::Finite { space, map: Some(map) } => {
            let u0 = match &config.cli.u0 {
                Some(label) => space
                    .index_of(label)
                    .ok_or_else(|| CliError::Usage(format!("--u0 {label:?} is not a point of the space")))?,
                None => space.len() - 1,
            };
            solve_generic(config, &sig, space, map, space.points(), space.diameter(), u0)
        }
        Instance::Real { space, map: Some(map) } => {
            let u0 = match &config.cli.u0 {
                Some(raw) => raw
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("--u0 {raw:?} is not a number")))?,
                None => space.hi,
            };
            if !space.contains(u0) {
                return Err(SolverError::StartOutsideDomain(u0.to_string()).into());
            }
            solve_generic(config, &sig, space, map, space.grid(), space.diameter_estimate(), u0)
        }
        _ => Err(CliError::Usage("instance has no map".into())),
    }
}

#[allow(clippy::too_many_arguments)]
fn solve_generic<S, M>(
    config: &RunConfig<'_>,
    sig: &SpaceSignature,
    space: &S,
    map: &M,
    points: Vec<S::Point>,
    diameter: f64,
    u0: S::Point,
) -> Result<Report, CliError>
where
    S: Space,
    M: SelfMap<S::Point>,
{
    let cli = config.cli;
    let pairs = PairSource::with_budget(points, cli.budget, config.seed);
    let report = contraction::analyze_map(space, map, &pairs, config.phi.as_ref())?;
    let hyp = hypotheses(config, sig, &report, diameter)?;
    let warnings = hyp.warnings();

    let stop = StoppingCriteria::new(cli.tol_step, cli.max_iter);
    let trace: IterationTrace<S::Point> = solver::picard(space, map, u0, stop)?;

    let kannan_gamma = hyp.gamma.value().filter(|g| *g < 0.5);
    let kannan = kannan_gamma
        .map(|g| solver::verify_kannan_bounds(space, &trace, g, &cli.p_window, BOUND_SLACK))
        .transpose()?;
    let p_max = cli.p_window.iter().copied().max().unwrap_or(1);
    let tail_tol = 10.0 * p_max as f64 * cli.tol_step;
    let weak = config
        .phi
        .as_ref()
        .map(|phi| solver::verify_weak_decrease(space, &trace, phi, &cli.p_window, BOUND_SLACK, tail_tol))
        .transpose()?;
    let residual = match (trace.converged_point(), kannan_gamma, config.phi.as_ref()) {
        (Some(u), Some(g), _) => Some(solver::verify_residual(
            space,
            map,
            sig,
            &trace,
            u,
            ResidualForm::Kannan(g),
            solver::DEFAULT_TOL_FIXED,
        )?),
        (Some(u), None, Some(phi)) => Some(solver::verify_residual(
            space,
            map,
            sig,
            &trace,
            u,
            ResidualForm::Weak(phi),
            solver::DEFAULT_TOL_FIXED,
        )?),
        _ => None,
    };

    let converged = trace.converged_point().is_some();
    let bounds_ok = kannan.as_ref().is_none_or(|k| k.all_ok)
        && weak.as_ref().is_none_or(|w| w.all_ok)
        && residual.as_ref().is_none_or(|r| r.ok);
    let code = if converged && bounds_ok { EXIT_OK } else { EXIT_MATH };

    let csv = solver::trace_csv(space, &trace, kannan_gamma, config.phi.as_ref())?;
    if let Some(path) = &cli.out {
        std::fs::write(path, &csv).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?;
    }

    let iterations = trace.step_dist.len();
    let mut text = hyp.text();
    let status = match &trace.status {
        TraceStatus::Converged { point, residual } => {
            format!("Converged to {} (residual {residual})", space.label(*point))
        }
        TraceStatus::MaxIter => format!("MaxIter after {iterations} iterations"),
        TraceStatus::CycleDetected { first, second } => format!(
            "CycleDetected: u_{second} = u_{first} = {}",
            space.label(trace.iterates[*first])
        ),
    };
    let _ = writeln!(text, "start: {}", space.label(u0));
    let _ = writeln!(text, "status: {status}");
    let _ = writeln!(text, "iterations: {iterations}");
    if let Some(last) = trace.step_dist.last() {
        let _ = writeln!(text, "last step: {last}");
    }
    match &kannan {
        Some(k) => {
            let verdict = match k.first_violation() {
                Some(n) => format!("violated at n={n}"),
                None if k.all_ok => "ok".to_string(),
                None => "gap bound violated".to_string(),
            };
            let _ = writeln!(
                text,
                "Kannan bounds (gamma {}, p in {:?}): {verdict}",
                k.gamma, cli.p_window
            );
        }
        None => text.push_str("Kannan bounds: not applicable (gamma >= 1/2 or unbounded)\n"),
    }
    if let Some(w) = &weak {
        let _ = writeln!(
            text,
            "weak decrease (p in {:?}): {} (min slack {})",
            w.p_window,
            ok_word(w.all_ok),
            w.min_slack.map_or("n/a".to_string(), |s| s.to_string())
        );
    }
    if let Some(r) = &residual {
        let bound = match (r.bound, r.degenerate) {
            (Some(b), _) => b.to_string(),
            (None, true) => "degenerate (s*gamma >= 1)".to_string(),
            (None, false) => "n/a".to_string(),
        };
        let _ = writeln!(
            text,
            "residual: {} (bound {bound}): {}",
            r.residual,
            ok_word(r.ok)
        );
    }
    if let Some(path) = &cli.out {
        let _ = writeln!(text, "trace written to {}", path.display());
    }
    let _ = writeln!(text, "result: {}", if code == EXIT_OK { "PASS" } else { "FAIL" });

    let final_point = space.label(trace.last());
    let structured = json!({
        "signature": to_value(sig),
        "hypotheses": hyp.structured(),
        "contraction": {
            "banach_c": to_value(&report.banach_c),
            "kannan_gamma": to_value(&report.kannan_gamma),
            "weak_ok": report.weak.as_ref().map(|w| w.weak_ok),
        },
        "stop": to_value(&trace.stop),
        "start": space.label(u0),
        "status": to_value(&trace.status),
        "iterations": iterations,
        "final_point": final_point,
        "last_step": trace.step_dist.last(),
        "kannan_bounds": kannan.as_ref().map(|k| json!({
            "gamma": k.gamma,
            "all_ok": k.all_ok,
            "first_violation": k.first_violation(),
            "steps_checked": k.steps.len(),
            "gaps_checked": k.gaps.len(),
        })),
        "weak_decrease": weak.as_ref().map(|w| json!({
            "p_window": w.p_window,
            "all_ok": w.all_ok,
            "min_slack": w.min_slack,
            "tail_below": w.tail_below,
            "checked": w.verdicts.len(),
        })),
        "residual": residual.as_ref().map(to_value),
    });
    Ok(Report {
        code,
        text,
        structured,
        csv: Some(csv),
        warnings,
    })
}

fn cmd_oracle(config: &RunConfig<'_>, parsed: &ParsedInstance) -> Result<Report, CliError> {
    let space = parsed.instance.check_space()?;
    let sig = &config.signature;
    let (axioms, extra_text, extra) = match &parsed.instance {
        Instance::Finite { map: Some(map), .. } => {
            let r = oracle::run_oracle(&space, map, sig.v, sig.s)?;
            let fixed: Vec<&str> = r.fixed_points.iter().map(|&i| space.labels()[i].as_str()).collect();
            let text = format!(
                "fixed points: [{}]\nexact c = {}\nexact gamma = {}\n",
                fixed.join(", "),
                r.exact_c,
                r.exact_gamma
            );
            let value = json!({
                "fixed_points": fixed,
                "exact_c": to_value(&r.exact_c),
                "exact_gamma": to_value(&r.exact_gamma),
            });
            (r.axiom_verdict, text, value)
        }
        Instance::Real { space: real, map: Some(map) } => {
            let grid = real.grid();
            let (c, g) = oracle::exact_constants(real, map, &grid)?;
            let axioms = oracle::exhaustive_axiom_check(&space, sig.v, sig.s)?;
            let text = format!("exact c on grid = {c}\nexact gamma on grid = {g}\n");
            (axioms, text, json!({ "exact_c": to_value(&c), "exact_gamma": to_value(&g) }))
        }
        _ => (oracle::exhaustive_axiom_check(&space, sig.v, sig.s)?, String::new(), json!({})),
    };
    let mut text = axiom_text(&axioms, &space);
    text.push_str(&extra_text);
    Ok(Report {
        code: if axioms.passed() { EXIT_OK } else { EXIT_MATH },
        text,
        structured: json!({ "axioms": to_value(&axioms), "oracle": extra }),
        csv: None,
        warnings: Vec::new(),
    })
}
