//! Kernel-based approximation of nonautonomous evolution equations.
//!
//! This crate solves differential inclusions
//!
//! ```text
//! u'(t)  in  A(t) u(t) + omega u(t) + f(t)
//! ```
//!
//! for time-dependent dissipative operator families `A(t)` given through
//! their resolvents, by replacing the time derivative with a one-sided
//! exponential kernel at scale `lambda` and driving `lambda` to zero.  On
//! top of the solvers it ships *certifiers*: numerical checks, with explicit
//! tolerance budgets, of the stability inequalities, resolvent identities,
//! and Bessel-kernel integral identities the method is built on.
//!
//! # Layout
//!
//! * [`space`], [`curve`] — normed spaces, duality brackets, sampled curves;
//! * [`control`], [`family`] — continuity controls and operator families;
//! * [`solver`] — half-line and whole-line fixed-point solvers, smoothed
//!   derivatives, convergence studies;
//! * [`bessel`], [`quad`], [`conv1d`], [`resolve2d`], [`tlm`],
//!   [`integrals`] — one- and two-dimensional resolvent machinery and the
//!   integral identities behind it;
//! * [`certificate`], [`checks`] — certified inequality checks;
//! * [`delay`] — functional-differential (delay) problems;
//! * [`scenario`], [`report`] — JSON-driven scenarios and CSV/JSON reports
//!   for the `yosida` binary.
//!
//! # Example
//!
//! Solve `u' = -u + cos t` on the whole line (here `A = 0`, `omega = -1`)
//! and compare with the explicit bounded solution `(cos t + sin t)/2`:
//!
//! ```
//! use yosida::{EvolutionProblem, Grid, SolverConfig, solve_line, zero_family, Space};
//! use std::sync::Arc;
//!
//! let p = EvolutionProblem::new(zero_family(Space::scalar()), -1.0)
//!     .with_forcing(Arc::new(|t: f64| vec![t.cos()]));
//! let grid = Grid::new(-25.0, 10.0, 7001).unwrap();
//! let mut cfg = SolverConfig::new(0.01, grid);
//! cfg.picard_tol = 1e-8;
//! let run = solve_line(&p, &cfg).unwrap();
//! let t = 5.0;
//! let node = run.u.grid().nearest_node(t).unwrap();
//! let exact = 0.5 * (t.cos() + t.sin());
//! assert!((run.u.node(node)[0] - exact).abs() < 0.02);
//! ```

pub mod error;
pub mod tol;

// Spaces, curves, and operator families.
pub mod control;
pub mod curve;
pub mod family;
pub mod space;

// Solvers.
mod kernel;
pub mod solver;

// Quadrature and resolvent machinery.
pub mod bessel;
pub mod conv1d;
pub mod field2;
pub mod quad;
pub mod resolve2d;
pub mod tlm;

// Certified checks.
pub mod certificate;
pub mod checks;
pub mod delay;
pub mod integrals;

// Scenario configs, execution, and artifact writers.
pub mod report;
pub mod scenario;

pub use certificate::{BudgetBreakdown, CertSample, Certificate};
pub use checks::{
    check_ap_transfer, check_boundedness, check_half_whole_comparison,
    check_integral_solution, check_stability_halfline, check_stability_line,
    check_t_stability, BoundKind, IntegralSamplePlan,
};
pub use control::{ControlData, PerturbedControl, ScalarFn, TimeFn};
pub use delay::{
    check_fde_agreement, segment, solve_fde, solve_fde_with_guess, DelayProblem, FdeSolution,
    HistoryFunctional, HistoryKind, HistoryMap, HistorySegment,
};
pub use conv1d::{
    conv_finite_residual, conv_infinite_residual, resolve_conv_finite, resolve_conv_infinite,
};
pub use curve::{Grid, SampledCurve};
pub use error::{Error, Result};
pub use field2::Field2;
pub use family::{
    abs_a_estimate, constant_matrix_family, linear_matrix_family, rotation_damped_family,
    scalar_cubic_family, scalar_timevar_decay_family, soft_threshold_family, zero_family,
    AbsAEstimate, EvolutionProblem, OperatorFamily, ResolveFn,
};
pub use integrals::{
    check_interchange, verify_all_integrals, verify_some_integrals, IntegralParams, KernelRates,
};
pub use quad::QuadratureBudget;
pub use resolve2d::{residual_2d, resolve_2d, Field2Solution, Resolve2dParams};
pub use solver::{
    converge_study, solve_halfline, solve_limit, solve_line, yosida_derivative_halfline,
    yosida_derivative_line, zero_forcing, ConvergeRow, ConvergeStudy, LeftExtension, LimitResult,
    LineKind, SolveResult, SolverConfig,
};
pub use scenario::{
    load_file, run_file, run_scenario, CheckSpec, FamilySpec, ForcingSpec, HistorySpec,
    KernelSpec, KindFilter, LineSpec, ProblemSpec, RunOptions, Scenario, ScenarioFile,
    ScenarioOutcome, SolverSpec, TrigTerm, SCHEMA_VERSION,
};
pub use space::{BracketValue, NormKind, Space};
pub use tlm::{apply_tlm, resolve_tlm, TlmParams, TlmResolver, TlmValue};
