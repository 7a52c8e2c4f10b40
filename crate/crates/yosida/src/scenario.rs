//! Scenario configs: a JSON schema describing problems, solver settings, and
//! certifier plans, plus the execution engine behind the command-line
//! driver.
//!
//! A config file holds a `version` field and a list of scenarios.  Each
//! scenario is one of three kinds: `solve` (one run plus certifier checks),
//! `sweep` (a vanishing-parameter ladder plus boundedness diagnostics), or
//! `delay` (a history-functional problem with its agreement check).  All
//! randomness is seeded — a seed override applies to every check in a run —
//! and outputs carry no timestamps, so identical config plus seed gives
//! byte-identical artifacts.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::certificate::{BudgetBreakdown, CertSample, Certificate};
use crate::checks::{
    check_ap_transfer, check_boundedness, check_half_whole_comparison, check_integral_solution,
    check_stability_halfline, check_stability_line, check_t_stability, BoundKind,
    IntegralSamplePlan,
};
use crate::control::{ScalarFn, TimeFn};
use crate::curve::Grid;
use crate::delay::{check_fde_agreement, solve_fde, DelayProblem, HistoryFunctional};
use crate::error::{Error, Result};
use crate::family::{
    constant_matrix_family, rotation_damped_family, scalar_cubic_family,
    scalar_timevar_decay_family, soft_threshold_family, zero_family, EvolutionProblem,
    OperatorFamily,
};
use crate::report;
use crate::solver::{
    converge_study, solve_halfline, solve_line, zero_forcing, LineKind, SolveResult, SolverConfig,
};
use crate::space::{NormKind, Space};
use crate::tol::{ARITHMETIC_SLACK, OUTER_CONTRACTION_SLACK};

/// The config format this build reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

/// Default seed for sampled certifiers when neither the scenario nor the
/// command line supplies one.
const DEFAULT_SEED: u64 = 0x5eed;

// ---------------------------------------------------------------------------
// Schema
// ---------------------------------------------------------------------------

/// Top-level config: schema version plus scenario list.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    pub scenarios: Vec<Scenario>,
}

/// One unit of work, dispatched on its `kind` tag.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Scenario {
    /// One solve plus the listed certifier checks.
    Solve {
        name: String,
        problem: ProblemSpec,
        solver: SolverSpec,
        #[serde(default)]
        checks: Vec<CheckSpec>,
    },
    /// A vanishing-parameter ladder with convergence and boundedness
    /// diagnostics.
    Sweep {
        name: String,
        problem: ProblemSpec,
        solver: SolverSpec,
        lambdas: Vec<f64>,
        /// Optional uniform sup-norm bound to certify across the ladder.
        #[serde(default)]
        uniform_bound: Option<f64>,
    },
    /// A history-functional problem: outer fixed point plus agreement and
    /// gain checks.
    Delay {
        name: String,
        family: FamilySpec,
        omega: f64,
        history: HistorySpec,
        solver: SolverSpec,
        #[serde(default = "default_true")]
        check_agreement: bool,
    },
}

fn default_true() -> bool {
    true
}

impl Scenario {
    pub fn name(&self) -> &str {
        match self {
            Scenario::Solve { name, .. }
            | Scenario::Sweep { name, .. }
            | Scenario::Delay { name, .. } => name,
        }
    }
}

/// Problem description: family, decay rate, forcing, optional initial value,
/// and which fixed-point equation to solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub family: FamilySpec,
    pub omega: f64,
    #[serde(default)]
    pub forcing: ForcingSpec,
    #[serde(default)]
    pub u0: Option<Vec<f64>>,
    #[serde(default)]
    pub line: LineSpec,
}

/// Which equation a solve scenario targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LineSpec {
    #[default]
    Line,
    Halfline,
}

impl LineSpec {
    pub fn kind(self) -> LineKind {
        match self {
            LineSpec::Line => LineKind::WholeLine,
            LineSpec::Halfline => LineKind::HalfLine,
        }
    }
}

/// Built-in operator families addressable from configs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// `A(t) = 0` in the given dimension.
    Zero { dim: usize },
    /// Constant linear operator from a row-major square matrix.
    ConstantMatrix { entries: Vec<f64>, dim: usize },
    /// Componentwise shrinkage by `lambda c` (subdifferential of `c|.|_1`).
    SoftThreshold { dim: usize, c: f64 },
    /// Plane rotation with damping `a <= 0` and angular rate `theta`.
    RotationDamped { a: f64, theta: f64 },
    /// Scalar `-u^3` plus a scalar drive term inside the operator.
    ScalarCubic {
        #[serde(default)]
        drive: ForcingSpec,
    },
    /// Scalar decay with rate `1 + sin(t)/2` and its continuity control.
    ScalarTimevarDecay {},
}

impl FamilySpec {
    pub fn build(&self) -> Result<OperatorFamily> {
        match self {
            FamilySpec::Zero { dim } => Ok(zero_family(Space::new(*dim, NormKind::Euclidean)?)),
            FamilySpec::ConstantMatrix { entries, dim } => {
                constant_matrix_family(Space::new(*dim, NormKind::Euclidean)?, entries)
            }
            FamilySpec::SoftThreshold { dim, c } => {
                soft_threshold_family(Space::new(*dim, NormKind::Euclidean)?, *c)
            }
            FamilySpec::RotationDamped { a, theta } => rotation_damped_family(*a, *theta),
            FamilySpec::ScalarCubic { drive } => Ok(scalar_cubic_family(drive.to_scalar_fn())),
            FamilySpec::ScalarTimevarDecay {} => Ok(scalar_timevar_decay_family()),
        }
    }
}

/// Forcing terms expressible in configs.  Scalar shapes broadcast the same
/// value to every component; `constant` takes the full vector.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForcingSpec {
    #[default]
    Zero,
    Constant { value: Vec<f64> },
    Cos {
        amplitude: f64,
        #[serde(default = "default_frequency")]
        frequency: f64,
    },
    TrigSum { terms: Vec<TrigTerm> },
}

fn default_frequency() -> f64 {
    1.0
}

/// One `amplitude * cos(frequency t + phase)` term.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    pub amplitude: f64,
    pub frequency: f64,
    #[serde(default)]
    pub phase: f64,
}

impl ForcingSpec {
    fn scalar_at(&self, t: f64) -> f64 {
        match self {
            ForcingSpec::Zero => 0.0,
            ForcingSpec::Constant { value } => value.first().copied().unwrap_or(0.0),
            ForcingSpec::Cos { amplitude, frequency } => amplitude * (frequency * t).cos(),
            ForcingSpec::TrigSum { terms } => terms
                .iter()
                .map(|c| c.amplitude * (c.frequency * t + c.phase).cos())
                .sum(),
        }
    }

    /// The forcing as a time function in the given dimension.
    pub fn to_time_fn(&self, dim: usize) -> Result<TimeFn> {
        match self {
            ForcingSpec::Constant { value } => {
                if value.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: value.len() });
                }
                let v = value.clone();
                Ok(Arc::new(move |_t| v.clone()))
            }
            _ => {
                let spec = self.clone();
                Ok(Arc::new(move |t| vec![spec.scalar_at(t); dim]))
            }
        }
    }

    /// The forcing as a scalar function (component zero).
    pub fn to_scalar_fn(&self) -> ScalarFn {
        let spec = self.clone();
        Arc::new(move |t| spec.scalar_at(t))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ForcingSpec::Zero)
    }
}

/// Solver settings: regularization parameter, window, and step, with
/// optional tolerance overrides.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub lambda: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
    #[serde(default)]
    pub picard_tol: Option<f64>,
    #[serde(default)]
    pub tail_tol: Option<f64>,
}

impl SolverSpec {
    pub fn config(&self) -> Result<SolverConfig> {
        let grid = Grid::with_step(self.t_start, self.t_end, self.dt)?;
        let mut cfg = SolverConfig::new(self.lambda, grid);
        if let Some(tol) = self.picard_tol {
            cfg.picard_tol = tol;
        }
        if let Some(tol) = self.tail_tol {
            cfg.tail_tol = tol;
        }
        Ok(cfg)
    }
}

/// Certifier plans attachable to a solve scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    /// Defect inequality of the integral-solution definition on sampled
    /// tuples.
    IntegralSolution {
        #[serde(default = "default_tuples")]
        tuples: usize,
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        lambda_probe: Option<f64>,
    },
    /// Forcing-stability bound against the zero-forcing companion solve.
    StabilityVsZero {},
    /// Half-line versus whole-line comparison: companion half-line solve on
    /// `[0, t_end]` from the given initial value.
    HalfWhole { u0: Vec<f64> },
    /// Shift-transfer bound for autonomous families.
    ApTransfer { shifts: Vec<f64> },
    /// Resolvent time-continuity inequality on sampled times and probes.
    TStability {
        ts: Vec<f64>,
        lambdas: Vec<f64>,
        #[serde(default = "default_probes")]
        probes: usize,
        #[serde(default)]
        seed: Option<u64>,
    },
}

fn default_tuples() -> usize {
    200
}

fn default_probes() -> usize {
    3
}

/// History functionals expressible in configs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HistorySpec {
    PointDelay {
        r: f64,
        weight: f64,
        #[serde(default)]
        drive: ForcingSpec,
    },
    Distributed {
        r: f64,
        beta: f64,
        kernel: KernelSpec,
        #[serde(default)]
        drive: ForcingSpec,
    },
}

/// Kernels for distributed history functionals, as functions of the offset
/// `theta` in `[-r, 0]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    /// `exp(rate * theta)`.
    Exp { rate: f64 },
    /// Constant `1`.
    Flat {},
    /// `1 + theta / r`: linear ramp from 0 at the oldest offset to 1.
    Ramp {},
}

impl KernelSpec {
    fn build(&self, r: f64) -> ScalarFn {
        match self {
            KernelSpec::Exp { rate } => {
                let rate = *rate;
                Arc::new(move |theta| (rate * theta).exp())
            }
            KernelSpec::Flat {} => Arc::new(|_| 1.0),
            KernelSpec::Ramp {} => Arc::new(move |theta| 1.0 + theta / r),
        }
    }
}

impl HistorySpec {
    pub fn build(&self, dim: usize) -> Result<HistoryFunctional> {
        match self {
            HistorySpec::PointDelay { r, weight, drive } => {
                let d = if drive.is_zero() { None } else { Some(drive.to_time_fn(dim)?) };
                HistoryFunctional::point_delay(*r, *weight, d)
            }
            HistorySpec::Distributed { r, beta, kernel, drive } => {
                let d = if drive.is_zero() { None } else { Some(drive.to_time_fn(dim)?) };
                HistoryFunctional::distributed(*r, kernel.build(*r), *beta, d)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

/// Parse and validate a config file.
pub fn load_file(path: &Path) -> Result<ScenarioFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let file: ScenarioFile = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("cannot parse {}: {e}", path.display())))?;
    if file.version != SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "config version {} not supported (this build reads version {SCHEMA_VERSION})",
            file.version
        )));
    }
    let mut seen = std::collections::BTreeSet::new();
    for sc in &file.scenarios {
        if sc.name().is_empty() || !sc.name().chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(Error::Config(format!(
                "scenario name `{}` must be nonempty and use only [A-Za-z0-9_-]",
                sc.name()
            )));
        }
        if !seen.insert(sc.name().to_string()) {
            return Err(Error::Config(format!("duplicate scenario name `{}`", sc.name())));
        }
    }
    Ok(file)
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

/// Run-wide options from the command line.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Root output directory; each scenario writes under its own name.
    pub out_dir: PathBuf,
    /// Overrides every check seed when set.
    pub seed: Option<u64>,
    /// Upper bound on concurrently running scenarios.
    pub jobs: usize,
}

/// What one scenario produced.
#[derive(Debug)]
pub struct ScenarioOutcome {
    pub name: String,
    pub certificates: Vec<Certificate>,
}

impl ScenarioOutcome {
    pub fn all_pass(&self) -> bool {
        self.certificates.iter().all(|c| c.pass)
    }
}

fn scenario_dir(opts: &RunOptions, name: &str) -> PathBuf {
    opts.out_dir.join(name)
}

/// Metadata sidecar for a solve, written next to the solution table.
#[derive(Debug, Serialize)]
struct RunMeta<'a> {
    scenario: &'a str,
    family: &'a str,
    lambda: f64,
    omega: f64,
    valid_from: f64,
    residual: f64,
    iterations: usize,
    contraction_estimate: f64,
    tail_error_bound: f64,
    seed: u64,
}

fn write_meta(dir: &Path, meta: &RunMeta<'_>) -> Result<()> {
    let text = serde_json::to_string_pretty(meta)?;
    std::fs::write(dir.join("run.json"), text + "\n")?;
    Ok(())
}

fn effective_seed(opts: &RunOptions, spec_seed: Option<u64>) -> u64 {
    opts.seed.or(spec_seed).unwrap_or(DEFAULT_SEED)
}

/// Execute one scenario, writing its artifacts under the output root.
pub fn run_scenario(sc: &Scenario, opts: &RunOptions) -> Result<ScenarioOutcome> {
    let dir = scenario_dir(opts, sc.name());
    std::fs::create_dir_all(dir.join("certificates"))?;
    match sc {
        Scenario::Solve { name, problem, solver, checks } => {
            run_solve(name, problem, solver, checks, &dir, opts)
        }
        Scenario::Sweep { name, problem, solver, lambdas, uniform_bound } => {
            run_sweep(name, problem, solver, lambdas, *uniform_bound, &dir, opts)
        }
        Scenario::Delay { name, family, omega, history, solver, check_agreement } => {
            run_delay(name, family, *omega, history, solver, *check_agreement, &dir, opts)
        }
    }
}

fn build_problem(spec: &ProblemSpec) -> Result<EvolutionProblem> {
    let family = spec.family.build()?;
    let dim = family.space().dim();
    let mut p = EvolutionProblem::new(family, spec.omega);
    if !spec.forcing.is_zero() {
        p = p.with_forcing(spec.forcing.to_time_fn(dim)?);
    }
    if let Some(u0) = &spec.u0 {
        if u0.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: u0.len() });
        }
        p = p.with_initial(u0.clone());
    }
    Ok(p)
}

fn solve_by_kind(p: &EvolutionProblem, cfg: &SolverConfig, kind: LineKind) -> Result<SolveResult> {
    match kind {
        LineKind::WholeLine => solve_line(p, cfg),
        LineKind::HalfLine => solve_halfline(p, cfg),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_solve(
    name: &str,
    problem: &ProblemSpec,
    solver: &SolverSpec,
    checks: &[CheckSpec],
    dir: &Path,
    opts: &RunOptions,
) -> Result<ScenarioOutcome> {
    let p = build_problem(problem)?;
    let cfg = solver.config()?;
    let res = solve_by_kind(&p, &cfg, problem.line.kind())?;
    report::write_solution_csv(&dir.join("solution.csv"), &res.u)?;
    write_meta(
        dir,
        &RunMeta {
            scenario: name,
            family: p.family.label(),
            lambda: res.lambda,
            omega: res.omega,
            valid_from: res.valid_from,
            residual: res.residual,
            iterations: res.iterations,
            contraction_estimate: res.contraction_estimate,
            tail_error_bound: res.tail_error_bound,
            seed: effective_seed(opts, None),
        },
    )?;

    let mut certificates = Vec::new();
    for check in checks {
        let cert = run_check(check, problem, &p, &cfg, &res, opts)?;
        certificates.push(cert);
    }
    report::write_certificates(&dir.join("certificates"), &certificates)?;
    Ok(ScenarioOutcome { name: name.to_string(), certificates })
}

fn run_check(
    check: &CheckSpec,
    problem: &ProblemSpec,
    p: &EvolutionProblem,
    cfg: &SolverConfig,
    res: &SolveResult,
    opts: &RunOptions,
) -> Result<Certificate> {
    match check {
        CheckSpec::IntegralSolution { tuples, seed, lambda_probe } => {
            let plan = IntegralSamplePlan {
                tuples: *tuples,
                lambda_probe: *lambda_probe,
                seed: effective_seed(opts, *seed),
                ..IntegralSamplePlan::default()
            };
            check_integral_solution(res, p, &plan)
        }
        CheckSpec::StabilityVsZero {} => {
            let dim = p.space().dim();
            let mut companion = p.clone();
            companion.forcing = None;
            let res0 = solve_by_kind(&companion, cfg, problem.line.kind())?;
            let f1 = p
                .forcing
                .clone()
                .unwrap_or_else(|| zero_forcing(dim));
            let f0 = zero_forcing(dim);
            match problem.line.kind() {
                LineKind::WholeLine => check_stability_line(res, &res0, &f1, &f0, p.omega),
                LineKind::HalfLine => {
                    let x = p.u0.clone().ok_or(Error::MissingInitial)?;
                    check_stability_halfline(res, &res0, &f1, &f0, &x, &x, p.omega)
                }
            }
        }
        CheckSpec::HalfWhole { u0 } => {
            if problem.line != LineSpec::Line {
                return Err(Error::Config(
                    "half_whole check needs a whole-line base solve".into(),
                ));
            }
            if !(cfg.grid.t_end() > 0.0) {
                return Err(Error::Config(
                    "half_whole check needs the window to reach past 0".into(),
                ));
            }
            let half_grid = Grid::with_step(0.0, cfg.grid.t_end(), cfg.grid.dt())?;
            let half_cfg = SolverConfig { grid: half_grid, ..*cfg };
            let mut half_p = p.clone();
            half_p.u0 = Some(u0.clone());
            let half = solve_halfline(&half_p, &half_cfg)?;
            check_half_whole_comparison(res, &half, p.omega)
        }
        CheckSpec::ApTransfer { shifts } => check_ap_transfer(p, cfg, shifts),
        CheckSpec::TStability { ts, lambdas, probes, seed } => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(effective_seed(opts, *seed));
            let dim = p.space().dim();
            let zs: Vec<Vec<f64>> = (0..*probes)
                .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            check_t_stability(p, ts, &zs, lambdas)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_sweep(
    name: &str,
    problem: &ProblemSpec,
    solver: &SolverSpec,
    lambdas: &[f64],
    uniform_bound: Option<f64>,
    dir: &Path,
    opts: &RunOptions,
) -> Result<ScenarioOutcome> {
    if lambdas.is_empty() {
        return Err(Error::Config("sweep needs a nonempty lambda list".into()));
    }
    let p = build_problem(problem)?;
    let cfg = solver.config()?;
    let study = converge_study(&p, &cfg, lambdas, problem.line.kind(), None)?;
    report::write_convergence_csv(&dir.join("convergence.csv"), &study)?;
    let last = study.results.last().expect("nonempty ladder");
    report::write_solution_csv(&dir.join("solution.csv"), &last.u)?;
    write_meta(
        dir,
        &RunMeta {
            scenario: name,
            family: p.family.label(),
            lambda: last.lambda,
            omega: last.omega,
            valid_from: last.valid_from,
            residual: last.residual,
            iterations: last.iterations,
            contraction_estimate: last.contraction_estimate,
            tail_error_bound: last.tail_error_bound,
            seed: effective_seed(opts, None),
        },
    )?;
    let bound = match uniform_bound {
        Some(b) => BoundKind::Uniform(b),
        None => BoundKind::SweepOnly,
    };
    let certificates = vec![check_boundedness(&study, bound)?];
    report::write_certificates(&dir.join("certificates"), &certificates)?;
    Ok(ScenarioOutcome { name: name.to_string(), certificates })
}

#[allow(clippy::too_many_arguments)]
fn run_delay(
    name: &str,
    family: &FamilySpec,
    omega: f64,
    history: &HistorySpec,
    solver: &SolverSpec,
    check_agreement: bool,
    dir: &Path,
    opts: &RunOptions,
) -> Result<ScenarioOutcome> {
    let fam = family.build()?;
    let dim = fam.space().dim();
    let functional = history.build(dim)?;
    let p = DelayProblem::new(fam, omega, functional)?;
    let cfg = solver.config()?;
    let sol = solve_fde(&p, &cfg)?;
    report::write_solution_csv(&dir.join("solution.csv"), &sol.result.u)?;
    write_meta(
        dir,
        &RunMeta {
            scenario: name,
            family: p.family().label(),
            lambda: sol.result.lambda,
            omega: sol.result.omega,
            valid_from: sol.result.valid_from,
            residual: sol.result.residual,
            iterations: sol.result.iterations,
            contraction_estimate: sol.result.contraction_estimate,
            tail_error_bound: sol.result.tail_error_bound,
            seed: effective_seed(opts, None),
        },
    )?;

    let mut certificates = Vec::new();

    // Outer-contraction certificate: measured successive-change ratios
    // against the a-priori factor plus allowance.
    let q = p.contraction_factor();
    let ratio_samples: Vec<CertSample> = sol
        .outer_ratios
        .iter()
        .enumerate()
        .map(|(i, &ratio)| {
            CertSample::inequality(format!("outer step {}", i + 1), ratio, q + OUTER_CONTRACTION_SLACK)
        })
        .collect();
    let ratio_budget = BudgetBreakdown {
        dt_term: 0.0,
        lambda_term: 0.0,
        quadrature_term: 0.0,
        arithmetic_term: ARITHMETIC_SLACK,
    };
    certificates.push(Certificate::from_samples(
        "fde-outer-contraction",
        ratio_samples,
        ratio_budget,
    ));

    // Declared-gain certificate for the history functional.
    certificates.push(p.functional().check_lipschitz(
        p.space(),
        20,
        effective_seed(opts, None),
    )?);

    if check_agreement {
        certificates.push(check_fde_agreement(&p, &sol)?);
    }
    report::write_certificates(&dir.join("certificates"), &certificates)?;
    Ok(ScenarioOutcome { name: name.to_string(), certificates })
}

/// Which scenario kinds a subcommand selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindFilter {
    All,
    SweepOnly,
    DelayOnly,
}

impl KindFilter {
    fn admits(self, sc: &Scenario) -> bool {
        match self {
            KindFilter::All => true,
            KindFilter::SweepOnly => matches!(sc, Scenario::Sweep { .. }),
            KindFilter::DelayOnly => matches!(sc, Scenario::Delay { .. }),
        }
    }
}

/// Run every admitted scenario (concurrently up to `opts.jobs`), write the
/// run-wide summary index, and return the outcomes in config order.
pub fn run_file(
    file: &ScenarioFile,
    filter: KindFilter,
    opts: &RunOptions,
) -> Result<Vec<ScenarioOutcome>> {
    let selected: Vec<&Scenario> = file.scenarios.iter().filter(|sc| filter.admits(sc)).collect();
    if selected.is_empty() {
        return Err(Error::Config("no scenarios of the requested kind in config".into()));
    }
    std::fs::create_dir_all(&opts.out_dir)?;

    let jobs = opts.jobs.max(1).min(selected.len());
    let mut outcomes: Vec<Option<Result<ScenarioOutcome>>> =
        (0..selected.len()).map(|_| None).collect();
    if jobs == 1 {
        for (slot, sc) in outcomes.iter_mut().zip(&selected) {
            *slot = Some(run_scenario(sc, opts));
        }
    } else {
        let next = std::sync::atomic::AtomicUsize::new(0);
        let slots = std::sync::Mutex::new(&mut outcomes);
        std::thread::scope(|scope| {
            for _ in 0..jobs {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    if i >= selected.len() {
                        break;
                    }
                    let out = run_scenario(selected[i], opts);
                    slots.lock().expect("no panics hold this lock")[i] = Some(out);
                });
            }
        });
    }

    let mut done = Vec::with_capacity(selected.len());
    for (sc, slot) in selected.iter().zip(outcomes) {
        let outcome = slot.expect("every scenario ran")
            .map_err(|e| Error::Config(format!("scenario `{}`: {e}", sc.name())))?;
        done.push(outcome);
    }
    let rows: Vec<(&str, &Certificate)> = done
        .iter()
        .flat_map(|o| o.certificates.iter().map(move |c| (o.name.as_str(), c)))
        .collect();
    report::write_summary_csv(&opts.out_dir.join("summary.csv"), &rows)?;
    Ok(done)
}
