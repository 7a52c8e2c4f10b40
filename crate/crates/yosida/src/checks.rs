//! Certified checks of the structural inequalities behind the solver.
//!
//! Each checker evaluates one inequality the solutions and resolvent
//! families are supposed to satisfy — time-stability of the resolvents,
//! the integral-solution inequality, forcing stability on the whole and
//! half line, the half/whole-line comparison, shift transfer for
//! autonomous problems, and boundedness across a lambda sweep — and
//! returns a [`Certificate`] whose samples record both sides of the
//! inequality at every probed configuration.
//!
//! Budgets are computed from the inputs, never tuned per call:
//!
//! * `dt_term`: solver time-stepping bias (`KERNEL_GAP_FACTOR * dt *
//!   scale`) plus, where a right-hand side is itself a grid integral, the
//!   measured composite-trapezoid curvature bound `(dt/12) * sum |second
//!   differences|`.
//! * `lambda_term`: first-order regularization bias
//!   (`KERNEL_GAP_FACTOR * lambda * scale` per solve, where `scale`
//!   combines the observed solution and forcing magnitudes), plus any
//!   left-tail pollution bound the solve reports.
//! * `arithmetic_term`: rounding slack proportional to the largest
//!   magnitude handled.
//!
//! The scale factors are observed magnitudes, so a corrupted input
//! inflates the measured sides of the inequality long before it can
//! inflate its own budget.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certificate::{BudgetBreakdown, CertSample, Certificate};
use crate::control::{ControlData, PerturbedControl, TimeFn};
use crate::error::{Error, Result};
use crate::family::EvolutionProblem;
use crate::solver::{solve_line, ConvergeStudy, SolveResult, SolverConfig};
use crate::tol::{ARITHMETIC_SLACK, TIE_TOL_ABS};

/// Covers the two first-order biases every solve carries: the gap between
/// the regularized exponential kernel and its limit (total mass within
/// `lambda` of the limit mass) and the implicit-node stepping bias (order
/// `dt`).  The factor 2 turns each one-sided bound into a safe envelope.
const KERNEL_GAP_FACTOR: f64 = 2.0;

/// Allowed growth of the sup norm between consecutive runs of a
/// (decreasing) lambda sweep.
const SUP_GROWTH_RATIO: f64 = 1.05;

/// Certificates keep at most this many per-node rows.  The worst node is
/// always recorded, so subsampling never weakens a verdict.
const MAX_NODE_SAMPLES: usize = 160;

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

use crate::space::sub;

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `a + c * b`.
fn axpy(a: &[f64], c: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + c * y).collect()
}

/// Composite trapezoid of uniformly spaced samples.
fn trapz(dt: f64, vals: &[f64]) -> f64 {
    if vals.len() < 2 {
        return 0.0;
    }
    let inner: f64 = vals[1..vals.len() - 1].iter().sum();
    dt * (0.5 * (vals[0] + vals[vals.len() - 1]) + inner)
}

/// `(dt/12) * sum |second differences|`: a computable bound for the
/// composite-trapezoid error of uniformly spaced samples.
fn trapz_error_bound(dt: f64, vals: &[f64]) -> f64 {
    let mut acc = 0.0;
    for k in 1..vals.len().saturating_sub(1) {
        acc += (vals[k + 1] - 2.0 * vals[k] + vals[k - 1]).abs();
    }
    dt / 12.0 * acc
}

fn require_lambda(lambda: f64, lambda_max: f64, omega: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() || lambda > lambda_max {
        return Err(Error::LambdaOutOfRange { lambda, max: lambda_max });
    }
    if lambda * omega.abs() > 0.9 {
        return Err(Error::LambdaOutOfRange { lambda, max: 0.9 / omega.abs() });
    }
    Ok(())
}

fn require_same_problem(a: &SolveResult, b: &SolveResult, omega: f64) -> Result<()> {
    if a.family_label != b.family_label {
        return Err(Error::MismatchedProblems(format!(
            "family `{}` vs `{}`",
            a.family_label, b.family_label
        )));
    }
    if a.omega != omega || b.omega != omega {
        return Err(Error::MismatchedProblems(format!(
            "omega {} expected, runs carry {} and {}",
            omega, a.omega, b.omega
        )));
    }
    if a.u.space() != b.u.space() {
        return Err(Error::MismatchedProblems("runs live in different spaces".into()));
    }
    Ok(())
}

/// Per-node inequality rows, subsampled to `MAX_NODE_SAMPLES` with the
/// worst node always included as its own labeled row.
pub(crate) fn node_samples(
    times: &[f64],
    lhs: &[f64],
    rhs: &[f64],
    label: &str,
) -> Vec<CertSample> {
    let n = times.len();
    let mut worst_k = 0usize;
    let mut worst = f64::INFINITY;
    for k in 0..n {
        let m = rhs[k] - lhs[k];
        if m < worst {
            worst = m;
            worst_k = k;
        }
    }
    let mut out = Vec::new();
    out.push(CertSample::inequality(
        format!("{label} worst t={:.6}", times[worst_k]),
        lhs[worst_k],
        rhs[worst_k],
    ));
    let stride = (n / MAX_NODE_SAMPLES).max(1);
    for k in (0..n).step_by(stride) {
        out.push(CertSample::inequality(
            format!("{label} t={:.6}", times[k]),
            lhs[k],
            rhs[k],
        ));
    }
    out
}

/// Discrete memory integral `K(t_k) = \int_{t_0}^{t_k} e^{omega (t_k - tau)}
/// d(tau) dtau` by trapezoid on the grid, evaluated at every node in one
/// sweep through the recurrence `K_{k+1} = e^{omega dt} K_k + (dt/2)
/// (e^{omega dt} d_k + d_{k+1})`.
fn decaying_memory(omega: f64, dt: f64, d: &[f64]) -> Vec<f64> {
    let g = (omega * dt).exp();
    let mut out = Vec::with_capacity(d.len());
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..d.len() {
        acc = g * acc + 0.5 * dt * (g * d[k - 1] + d[k]);
        out.push(acc);
    }
    out
}

// ---------------------------------------------------------------------------
// Resolvent time-stability
// ---------------------------------------------------------------------------

/// Checks the resolvent time-stability inequality of an operator family
/// with continuity control: for probe points `z_1, z_2`, times `t_1, t_2`
/// and `x_i = J_lambda(t_i) z_i`, `y_i = A_lambda(t_i) z_i`,
///
/// ```text
/// (1 - lambda omega) |x1 - x2|
///   <= |x1 - x2 - lambda ((y1 + omega x1) - (y2 + omega x2))|
///    + lambda dist_omega(t1, t2) L_omega(|x2|)
///    + lambda g_dist(t1, t2) |y2 + omega x2|
/// ```
///
/// Probe pairs run over all `lambdas`, all consecutive pairs of
/// `sample_ts`, and for each base point both `(z_a, z_a)` and
/// `(z_a, z_{a+1})`.  The evaluation is exact up to rounding, so the
/// budget is arithmetic-only.
pub fn check_t_stability(
    p: &EvolutionProblem,
    sample_ts: &[f64],
    sample_zs: &[Vec<f64>],
    lambdas: &[f64],
) -> Result<Certificate> {
    let control = p.family.require_control()?.clone();
    let pc = PerturbedControl::new(control.clone(), p.omega);
    if sample_ts.len() < 2 {
        return Err(Error::Config("time-stability needs at least two sample times".into()));
    }
    if sample_zs.is_empty() {
        return Err(Error::Config("time-stability needs at least one probe point".into()));
    }
    if lambdas.is_empty() {
        return Err(Error::Config("time-stability needs at least one lambda".into()));
    }
    for &l in lambdas {
        require_lambda(l, p.family.lambda_max(), p.omega)?;
    }
    let space = p.space();
    let omega = p.omega;
    let m = sample_zs.len();

    let mut samples = Vec::new();
    let mut scale = 1.0f64;
    for &lambda in lambdas {
        for w in sample_ts.windows(2) {
            let (t1, t2) = (w[0], w[1]);
            for a in 0..m {
                let partners: &[usize] = if m > 1 { &[a, (a + 1) % m] } else { &[a] };
                for &b in partners {
                    let z1 = &sample_zs[a];
                    let z2 = &sample_zs[b];
                    let x1 = p.family.resolve(t1, lambda, z1)?;
                    let y1 = p.family.yosida(t1, lambda, z1)?;
                    let x2 = p.family.resolve(t2, lambda, z2)?;
                    let y2 = p.family.yosida(t2, lambda, z2)?;
                    let w1 = axpy(&y1, omega, &x1);
                    let w2 = axpy(&y2, omega, &x2);
                    let lhs = (1.0 - lambda * omega) * space.norm_diff(&x1, &x2)?;
                    let inner = space.norm_unchecked(&axpy(&sub(&x1, &x2), -lambda, &sub(&w1, &w2)));
                    let rhs = inner
                        + lambda * pc.dist(t1, t2) * pc.growth(space.norm_unchecked(&x2))
                        + lambda * control.g_dist(t1, t2) * space.norm_unchecked(&w2);
                    scale = scale
                        .max(space.norm_unchecked(&x1) + space.norm_unchecked(&x2))
                        .max(lambda * (space.norm_unchecked(&w1) + space.norm_unchecked(&w2)))
                        .max(rhs);
                    samples.push(CertSample::inequality(
                        format!("lambda={lambda:.3e} t1={t1:.4} t2={t2:.4} z{a}/z{b}"),
                        lhs,
                        rhs,
                    ));
                }
            }
        }
    }
    let budget = BudgetBreakdown {
        arithmetic_term: ARITHMETIC_SLACK * scale,
        ..BudgetBreakdown::default()
    };
    Ok(Certificate::from_samples("t-stability", samples, budget))
}

// ---------------------------------------------------------------------------
// Integral-solution inequality
// ---------------------------------------------------------------------------

/// How [`check_integral_solution`] draws its probe tuples.
#[derive(Debug, Clone)]
pub struct IntegralSamplePlan {
    /// Number of `(r, t, s, z)` tuples.
    pub tuples: usize,
    /// Regularization of the probe pairs; `None` picks
    /// `1e-3 * min(lambda_max, 1)` (recorded in the certificate).
    pub lambda_probe: Option<f64>,
    /// Seed of the deterministic tuple stream.
    pub seed: u64,
    /// Amplitude of the probe points; `None` picks `1 + sup |u|`.
    pub probe_scale: Option<f64>,
    /// Sup-norm distance from the sampled curve to the limit solution,
    /// when the caller knows it (for example from a lambda-ladder
    /// extrapolation).  `None` falls back to the conservative first-order
    /// estimate `lambda (1 + |omega|) (1 + sup |u|)`.
    pub solution_error: Option<f64>,
    /// Pin the probe time `s` to the window start `r` of each tuple.  The
    /// inequality quantifies pairs over arbitrary `s` with moduli anchored
    /// at `r`; for families with genuine time dependence that anchoring
    /// only compensates probes near the window start, so sweeps over such
    /// families can opt in here.
    pub probe_at_window_start: bool,
}

impl Default for IntegralSamplePlan {
    fn default() -> Self {
        IntegralSamplePlan {
            tuples: 200,
            lambda_probe: None,
            seed: 0x5eed,
            probe_scale: None,
            solution_error: None,
            probe_at_window_start: false,
        }
    }
}

/// Checks that a computed solution satisfies the integral-solution
/// inequality against resolvent-generated test pairs: for `(x, y) =
/// (J^omega_lambda(s) z, A^omega_lambda(s) z)` and window `[r, t]`,
///
/// ```text
/// |u(t) - x| - |u(r) - x|
///   <= \int_r^t ( [y + f(nu), u(nu) - x]_+ + omega |u(nu) - x| ) dnu
///    + L_omega(|x|) \int_r^t dist_omega(nu, r) dnu
///    + |y| \int_r^t g_dist(nu, r) dnu
/// ```
///
/// Integrals are composite trapezoids on the solution grid; windows and
/// probe times are grid nodes drawn from a seeded stream.
pub fn check_integral_solution(
    res: &SolveResult,
    p: &EvolutionProblem,
    plan: &IntegralSamplePlan,
) -> Result<Certificate> {
    if plan.tuples == 0 {
        return Err(Error::Config("integral-solution check needs a nonempty sampling plan".into()));
    }
    if res.family_label != p.family.label() {
        return Err(Error::MismatchedProblems(format!(
            "solve ran on `{}`, problem is `{}`",
            res.family_label,
            p.family.label()
        )));
    }
    if res.omega != p.omega {
        return Err(Error::MismatchedProblems(format!(
            "solve used omega {}, problem has {}",
            res.omega, p.omega
        )));
    }
    let control = match p.family.control() {
        Some(c) => c.clone(),
        None if p.family.is_autonomous() => ControlData::autonomous(),
        None => return Err(Error::MissingControl(p.family.label().to_string())),
    };
    let omega = p.omega;
    let pc = PerturbedControl::new(control.clone(), omega);
    let u = res.valid()?;
    let grid = u.grid();
    let n = grid.len();
    if n < 3 {
        return Err(Error::WindowTooShort { needed: 2.0 * grid.dt(), got: grid.t_end() - grid.t_start() });
    }
    let dt = grid.dt();
    let space = u.space();
    let dim = space.dim();
    let sup_u = u.sup_norm();

    let lam_cap = p.family.lambda_max().min(1.0);
    let mut lambda_probe = plan.lambda_probe.unwrap_or(1e-3 * lam_cap);
    if omega != 0.0 {
        lambda_probe = lambda_probe.min(0.45 / omega.abs());
    }
    require_lambda(lambda_probe, p.family.lambda_max(), omega)?;
    let amplitude = plan.probe_scale.unwrap_or(1.0 + sup_u);

    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut samples = Vec::with_capacity(plan.tuples + 1);
    samples.push(CertSample::inequality(
        format!("lambda_probe={lambda_probe:.3e} (report)"),
        lambda_probe,
        lambda_probe,
    ));

    let mut dt_term = 0.0f64;
    let mut scale = 1.0f64;
    let window_len = grid.t_end() - grid.t_start();
    for _ in 0..plan.tuples {
        let i = rng.random_range(0..n - 1);
        let j = rng.random_range(i + 1..n);
        let s_idx = if plan.probe_at_window_start { i } else { rng.random_range(0..n) };
        let s = grid.node(s_idx);
        let z: Vec<f64> = (0..dim).map(|_| amplitude * rng.random_range(-1.0..1.0)).collect();
        let x = p.family.resolve_shifted(omega, s, lambda_probe, &z)?;
        let y = p.family.yosida_shifted(omega, s, lambda_probe, &z)?;
        let norm_x = space.norm_unchecked(&x);
        let norm_y = space.norm_unchecked(&y);
        let growth_x = pc.growth(norm_x);
        let t_r = grid.node(i);

        let mut integrand = Vec::with_capacity(j - i + 1);
        for k in i..=j {
            let nu = grid.node(k);
            let diff = sub(u.node(k), &x);
            let dist = space.norm_unchecked(&diff);
            let drive = add(&y, &p.forcing_at(nu));
            let br = space.bracket(&drive, &diff)?;
            let chi = br.plus + omega * dist
                + growth_x * pc.dist(nu, t_r)
                + norm_y * control.g_dist(nu, t_r);
            integrand.push(chi);
        }
        let rhs = trapz(dt, &integrand);
        let lhs = space.norm_diff_unchecked(u.node(j), &x) - space.norm_diff_unchecked(u.node(i), &x);
        dt_term = dt_term.max(trapz_error_bound(dt, &integrand));
        scale = scale
            .max(integrand.iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .max(lhs.abs());
        samples.push(CertSample::inequality(
            format!("r={t_r:.4} t={:.4} s={s:.4}", grid.node(j)),
            lhs,
            rhs,
        ));
    }

    // A sup-norm error delta of the sampled curve moves the left side by at
    // most 2 delta and the right side by at most (1 + |omega|) (t - r) delta.
    let solution_error = plan
        .solution_error
        .unwrap_or(res.lambda * (1.0 + omega.abs()) * (1.0 + sup_u))
        + res.tail_error_bound
        + res.residual;
    let lambda_term = solution_error * (2.0 + (1.0 + omega.abs()) * window_len);
    let budget = BudgetBreakdown {
        dt_term,
        lambda_term,
        quadrature_term: 0.0,
        arithmetic_term: ARITHMETIC_SLACK * (1.0 + scale) * (1.0 + window_len),
    };
    Ok(Certificate::from_samples("integral-solution", samples, budget))
}

// ---------------------------------------------------------------------------
// Forcing stability, whole line
// ---------------------------------------------------------------------------

/// Checks whole-line forcing stability: two solves of the same problem
/// under forcings `f1`, `f2` satisfy, at every grid node of the common
/// valid window,
///
/// ```text
/// |u1(t) - u2(t)| <= \int_0^infty e^{omega r} |f1(t - r) - f2(t - r)| dr
/// ```
///
/// The memory integral is evaluated on the solve grid by an exponential
/// trapezoid recurrence; the part of the integral reaching below the grid
/// start is dropped, which only shrinks the right side, so passing here
/// is conservative for the true bound.
pub fn check_stability_line(
    u1: &SolveResult,
    u2: &SolveResult,
    f1: &TimeFn,
    f2: &TimeFn,
    omega: f64,
) -> Result<Certificate> {
    require_same_problem(u1, u2, omega)?;
    if !(omega < 0.0) {
        return Err(Error::ParamRange(format!(
            "whole-line stability needs omega < 0, got {omega}"
        )));
    }
    if u1.u.grid() != u2.u.grid() {
        return Err(Error::MismatchedProblems("runs must share their grid".into()));
    }
    let grid = u1.u.grid();
    let space = u1.u.space();
    let dt = grid.dt();
    let n = grid.len();

    let mut d = Vec::with_capacity(n);
    let mut sup_f1 = 0.0f64;
    let mut sup_f2 = 0.0f64;
    for k in 0..n {
        let tau = grid.node(k);
        let a = f1(tau);
        let b = f2(tau);
        sup_f1 = sup_f1.max(space.norm(&a)?);
        sup_f2 = sup_f2.max(space.norm(&b)?);
        d.push(space.norm_diff_unchecked(&a, &b));
    }
    let memory = decaying_memory(omega, dt, &d);

    let from = u1.valid_from.max(u2.valid_from);
    let start = grid.nearest_node(from)?;
    let mut times = Vec::with_capacity(n - start);
    let mut lhs = Vec::with_capacity(n - start);
    let mut rhs = Vec::with_capacity(n - start);
    for k in start..n {
        times.push(grid.node(k));
        lhs.push(space.norm_diff_unchecked(u1.u.node(k), u2.u.node(k)));
        rhs.push(memory[k]);
    }
    let samples = node_samples(&times, &lhs, &rhs, "stability");

    let sup_u1 = u1.valid()?.sup_norm();
    let sup_u2 = u2.valid()?.sup_norm();
    let s1 = omega.abs() * sup_u1 + sup_f1;
    let s2 = omega.abs() * sup_u2 + sup_f2;
    let max_d = d.iter().fold(0.0f64, |m, v| m.max(*v));
    let budget = BudgetBreakdown {
        dt_term: KERNEL_GAP_FACTOR * dt * s1.max(s2) + trapz_error_bound(dt, &d) / omega.abs().max(1.0),
        lambda_term: KERNEL_GAP_FACTOR * (u1.lambda * s1 + u2.lambda * s2)
            + u1.tail_error_bound
            + u2.tail_error_bound,
        quadrature_term: 0.0,
        arithmetic_term: ARITHMETIC_SLACK
            * (1.0 + max_d + lhs.iter().fold(0.0f64, |m, v| m.max(*v))),
    };
    Ok(Certificate::from_samples("forcing-stability-line", samples, budget))
}

// ---------------------------------------------------------------------------
// Forcing stability, half line
// ---------------------------------------------------------------------------

/// Checks half-line forcing stability: two solves from initial values
/// `x1`, `x2` under forcings `f1`, `f2` satisfy, at every grid node,
///
/// ```text
/// |u1(t) - u2(t)| <= e^{omega (t - t0)} |x1 - x2|
///                  + \int_{t0}^t e^{omega (t - tau)} |f1 - f2|(tau) dtau
/// ```
pub fn check_stability_halfline(
    u1: &SolveResult,
    u2: &SolveResult,
    f1: &TimeFn,
    f2: &TimeFn,
    x1: &[f64],
    x2: &[f64],
    omega: f64,
) -> Result<Certificate> {
    require_same_problem(u1, u2, omega)?;
    if u1.u.grid() != u2.u.grid() {
        return Err(Error::MismatchedProblems("runs must share their grid".into()));
    }
    let grid = u1.u.grid();
    let space = u1.u.space();
    let base = space.norm_diff(x1, x2)?;
    let dt = grid.dt();
    let n = grid.len();
    let t0 = grid.t_start();

    let mut d = Vec::with_capacity(n);
    let mut sup_f1 = 0.0f64;
    let mut sup_f2 = 0.0f64;
    for k in 0..n {
        let tau = grid.node(k);
        let a = f1(tau);
        let b = f2(tau);
        sup_f1 = sup_f1.max(space.norm(&a)?);
        sup_f2 = sup_f2.max(space.norm(&b)?);
        d.push(space.norm_diff_unchecked(&a, &b));
    }
    let memory = decaying_memory(omega, dt, &d);

    let from = u1.valid_from.max(u2.valid_from);
    let start = grid.nearest_node(from)?;
    let mut times = Vec::with_capacity(n - start);
    let mut lhs = Vec::with_capacity(n - start);
    let mut rhs = Vec::with_capacity(n - start);
    for k in start..n {
        let t = grid.node(k);
        times.push(t);
        lhs.push(space.norm_diff_unchecked(u1.u.node(k), u2.u.node(k)));
        rhs.push((omega * (t - t0)).exp() * base + memory[k]);
    }
    let samples = node_samples(&times, &lhs, &rhs, "stability");

    let sup_u1 = u1.valid()?.sup_norm();
    let sup_u2 = u2.valid()?.sup_norm();
    let s1 = omega.abs() * sup_u1 + sup_f1;
    let s2 = omega.abs() * sup_u2 + sup_f2;
    let max_d = d.iter().fold(0.0f64, |m, v| m.max(*v));
    let budget = BudgetBreakdown {
        dt_term: KERNEL_GAP_FACTOR * dt * (s1.max(s2) + omega.abs() * base)
            + trapz_error_bound(dt, &d),
        lambda_term: KERNEL_GAP_FACTOR * (u1.lambda * s1 + u2.lambda * s2)
            + u1.tail_error_bound
            + u2.tail_error_bound,
        quadrature_term: 0.0,
        arithmetic_term: ARITHMETIC_SLACK
            * (1.0 + base + max_d + lhs.iter().fold(0.0f64, |m, v| m.max(*v))),
    };
    Ok(Certificate::from_samples("forcing-stability-halfline", samples, budget))
}

// ---------------------------------------------------------------------------
// Half-line / whole-line comparison
// ---------------------------------------------------------------------------

/// Checks that a half-line solve tracks the whole-line solve of the same
/// problem: with `x0` the half-line initial value at `t0`,
///
/// ```text
/// |u_line(t) - u_half(t)| <= e^{omega (t - t0)} |u_line(t0) - x0|
/// ```
///
/// at every node of the half-line window.  The whole-line curve is
/// interpolated to the half-line nodes; the interpolation bias sits in
/// the `dt` budget term.
pub fn check_half_whole_comparison(
    u_line: &SolveResult,
    u_half: &SolveResult,
    omega: f64,
) -> Result<Certificate> {
    require_same_problem(u_line, u_half, omega)?;
    let half_grid = u_half.u.grid();
    let line_grid = u_line.u.grid();
    let t0 = half_grid.t_start();
    if u_line.valid_from > t0 + TIE_TOL_ABS {
        return Err(Error::MismatchedProblems(format!(
            "whole-line burn-in ends at {} but the half-line window starts at {t0}",
            u_line.valid_from
        )));
    }
    if line_grid.t_end() < half_grid.t_end() - TIE_TOL_ABS {
        return Err(Error::MismatchedProblems(format!(
            "whole-line window ends at {} before the half-line window end {}",
            line_grid.t_end(),
            half_grid.t_end()
        )));
    }
    let space = u_half.u.space();
    let x0 = u_half.u.node(0);
    let base = space.norm_diff_unchecked(&u_line.u.eval(t0)?, x0);

    let start = half_grid.nearest_node(u_half.valid_from)?;
    let n = half_grid.len();
    let mut times = Vec::with_capacity(n - start);
    let mut lhs = Vec::with_capacity(n - start);
    let mut rhs = Vec::with_capacity(n - start);
    for k in start..n {
        let t = half_grid.node(k);
        times.push(t);
        lhs.push(space.norm_diff_unchecked(&u_line.u.eval(t)?, u_half.u.node(k)));
        rhs.push((omega * (t - t0)).exp() * base);
    }
    let samples = node_samples(&times, &lhs, &rhs, "comparison");

    let scale = (1.0 + omega.abs())
        * (1.0 + u_line.valid()?.sup_norm() + u_half.valid()?.sup_norm());
    let budget = BudgetBreakdown {
        dt_term: KERNEL_GAP_FACTOR * (line_grid.dt() + half_grid.dt()) * scale,
        lambda_term: KERNEL_GAP_FACTOR * (u_line.lambda + u_half.lambda) * scale
            + u_line.tail_error_bound
            + u_half.tail_error_bound,
        quadrature_term: 0.0,
        arithmetic_term: ARITHMETIC_SLACK * (1.0 + base + scale),
    };
    Ok(Certificate::from_samples("half-whole-comparison", samples, budget))
}

// ---------------------------------------------------------------------------
// Shift transfer for autonomous problems
// ---------------------------------------------------------------------------

/// Checks the shift-transfer inequality on an autonomous whole-line
/// problem: for each requested shift `s` (snapped to the grid),
///
/// ```text
/// sup_t |u(t + s) - u(t)| <= (1 / -omega) sup_t |f(t + s) - f(t)|
/// ```
///
/// over the valid window.  Consequently every almost-period of the
/// forcing transfers to the solution with its defect divided by `-omega`.
/// Membership in an almost-periodic class is never claimed — only the
/// transfer inequality is certified.  Both sups are taken over grid
/// nodes; sampling the forcing sup at nodes can only shrink the right
/// side, so passing is conservative.
pub fn check_ap_transfer(
    p: &EvolutionProblem,
    cfg: &SolverConfig,
    shifts: &[f64],
) -> Result<Certificate> {
    if !p.family.is_autonomous() {
        return Err(Error::HypothesisViolated(format!(
            "shift transfer needs an autonomous family, `{}` is time-dependent",
            p.family.label()
        )));
    }
    if !(p.omega < 0.0) {
        return Err(Error::ParamRange(format!(
            "shift transfer needs omega < 0, got {}",
            p.omega
        )));
    }
    if shifts.is_empty() {
        return Err(Error::Config("shift transfer needs at least one shift".into()));
    }
    let omega = p.omega;
    let res = solve_line(p, cfg)?;
    let u = res.valid()?;
    let grid = u.grid();
    let space = u.space();
    let dt = grid.dt();
    let n = grid.len();

    let mut sup_f = 0.0f64;
    for k in 0..n {
        sup_f = sup_f.max(space.norm(&p.forcing_at(grid.node(k)))?);
    }

    let mut samples = Vec::new();
    for &s in shifts {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::ParamRange(format!("shift must be positive and finite, got {s}")));
        }
        let k = ((s / dt).round() as usize).max(1);
        if k >= n {
            return Err(Error::ParamRange(format!(
                "shift {s} exceeds the valid window of length {}",
                grid.t_end() - grid.t_start()
            )));
        }
        let snapped = k as f64 * dt;
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for i in 0..n - k {
            num = num.max(space.norm_diff_unchecked(u.node(i + k), u.node(i)));
            let t = grid.node(i);
            den = den.max(space.norm_diff_unchecked(
                &p.forcing_at(t + snapped),
                &p.forcing_at(t),
            ));
        }
        samples.push(CertSample::inequality(
            format!("shift={snapped:.6} (requested {s:.6})"),
            num,
            den / (-omega),
        ));
    }

    let scale = (1.0 + omega.abs()) * (1.0 + u.sup_norm() + sup_f);
    let budget = BudgetBreakdown {
        dt_term: KERNEL_GAP_FACTOR * dt * scale,
        lambda_term: KERNEL_GAP_FACTOR * res.lambda * scale + 2.0 * res.tail_error_bound,
        quadrature_term: 0.0,
        arithmetic_term: ARITHMETIC_SLACK * (1.0 + scale),
    };
    Ok(Certificate::from_samples("ap-shift-transfer", samples, budget))
}

// ---------------------------------------------------------------------------
// Boundedness across a lambda sweep
// ---------------------------------------------------------------------------

/// What [`check_boundedness`] certifies beyond the no-growth property.
#[derive(Debug, Clone, Copy)]
pub enum BoundKind {
    /// Every run's sup norm stays below this value.
    Uniform(f64),
    /// Only report sups and difference quotients; certify no growth.
    SweepOnly,
}

/// Reports `sup_t |u_lambda|` and the largest difference quotient for
/// every run of a lambda sweep, and certifies that the sups do not grow
/// as lambda decreases (ratio of successive sups at most
/// `SUP_GROWTH_RATIO`).  With [`BoundKind::Uniform`] each sup is also
/// checked against the given bound.  Difference quotients are recorded
/// as zero-margin report rows — equi-Lipschitz behavior is a diagnostic,
/// not an inequality with a computable right side.
pub fn check_boundedness(study: &ConvergeStudy, bound: BoundKind) -> Result<Certificate> {
    if study.results.is_empty() {
        return Err(Error::Config("boundedness check needs a completed sweep".into()));
    }
    let mut samples = Vec::new();
    let mut sups = Vec::with_capacity(study.results.len());
    let mut scale = 1.0f64;
    for res in &study.results {
        let curve = res.valid()?;
        let sup = curve.sup_norm();
        let quot = curve.max_difference_quotient();
        sups.push((res.lambda, sup));
        scale = scale.max(sup).max(quot);
        if let BoundKind::Uniform(b) = bound {
            samples.push(CertSample::inequality(
                format!("lambda={:.3e} sup bound", res.lambda),
                sup,
                b,
            ));
        }
        samples.push(CertSample::inequality(
            format!("lambda={:.3e} sup={sup:.6e} max difference quotient (report)", res.lambda),
            quot,
            quot,
        ));
    }
    for w in sups.windows(2) {
        let ((l1, s1), (l2, s2)) = (w[0], w[1]);
        samples.push(CertSample::inequality(
            format!("sup growth lambda {l1:.3e} -> {l2:.3e}"),
            s2,
            SUP_GROWTH_RATIO * s1 + TIE_TOL_ABS,
        ));
    }
    let budget = BudgetBreakdown {
        arithmetic_term: ARITHMETIC_SLACK * (1.0 + scale),
        ..BudgetBreakdown::default()
    };
    Ok(Certificate::from_samples("boundedness", samples, budget))
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{Grid, SampledCurve};
    use crate::family::{scalar_timevar_decay_family, zero_family, EvolutionProblem, OperatorFamily};
    use crate::solver::{converge_study, solve_halfline, solve_line, LineKind};
    use crate::space::Space;
    use std::sync::Arc;

    fn cos_forcing() -> TimeFn {
        Arc::new(|t: f64| vec![t.cos()])
    }

    fn zero_forcing_scalar() -> TimeFn {
        Arc::new(|_t: f64| vec![0.0])
    }

    /// Rebuild a solve result with `shift(t)` added to every value.
    fn corrupt(res: &SolveResult, shift: impl Fn(f64) -> f64) -> SolveResult {
        let grid = res.u.grid();
        let space = res.u.space();
        let dim = space.dim();
        let mut values = res.u.values().to_vec();
        for k in 0..grid.len() {
            let s = shift(grid.node(k));
            for c in 0..dim {
                values[k * dim + c] += s;
            }
        }
        SolveResult {
            u: SampledCurve::from_values(grid, space, values).unwrap(),
            lambda: res.lambda,
            omega: res.omega,
            family_label: res.family_label.clone(),
            residual: res.residual,
            iterations: res.iterations,
            contraction_estimate: res.contraction_estimate,
            tail_error_bound: res.tail_error_bound,
            valid_from: res.valid_from,
        }
    }

    #[test]
    fn t_stability_holds_for_the_time_varying_scalar_family() {
        let family = scalar_timevar_decay_family();
        let p = EvolutionProblem::new(family, -0.5);
        let ts = [0.0, 0.7, 1.9, 3.1];
        let zs = vec![vec![0.8], vec![-1.2], vec![0.3]];
        let cert = check_t_stability(&p, &ts, &zs, &[0.2, 0.05]).unwrap();
        assert!(cert.pass, "expected pass, worst margin {}", cert.worst_margin);
        assert!(cert.worst_margin.is_finite());
        assert_eq!(cert.samples.len(), 2 * 3 * 3 * 2);
    }

    #[test]
    fn t_stability_flags_a_family_with_understated_control() {
        // Same resolvent as the time-varying family, but the declared
        // control pretends the time dependence is a thousand times weaker.
        let weak = ControlData::new(
            Arc::new(|t: f64| vec![1e-3 * t.sin()]),
            Space::scalar(),
            Arc::new(|r| 1e-6 * r),
        );
        let family = OperatorFamily::new(
            Space::scalar(),
            "understated_timevar",
            f64::INFINITY,
            Arc::new(|t: f64, l: f64, x: &[f64]| {
                let rate = 1.0 + 0.5 * t.sin();
                Ok(vec![x[0] / (1.0 + l * rate)])
            }),
        )
        .with_control(weak);
        let p = EvolutionProblem::new(family, -0.5);
        let ts = [0.0, 0.7, 1.9];
        let zs = vec![vec![0.8], vec![-1.2]];
        let cert = check_t_stability(&p, &ts, &zs, &[0.2]).unwrap();
        assert!(!cert.pass, "understated control must fail, margin {}", cert.worst_margin);
    }

    #[test]
    fn t_stability_validates_its_inputs() {
        // A family that neither declares control nor marks itself
        // autonomous carries no continuity data at all.
        let bare = OperatorFamily::new(
            Space::scalar(),
            "bare",
            f64::INFINITY,
            Arc::new(|_t, _l, x: &[f64]| Ok(x.to_vec())),
        );
        let p = EvolutionProblem::new(bare, -1.0);
        let err = check_t_stability(&p, &[0.0, 1.0], &[vec![1.0]], &[0.1]).unwrap_err();
        assert!(matches!(err, Error::MissingControl(_)));

        let p = EvolutionProblem::new(scalar_timevar_decay_family(), -1.0);
        let err = check_t_stability(&p, &[0.0, 1.0], &[vec![1.0]], &[0.0]).unwrap_err();
        assert!(matches!(err, Error::LambdaOutOfRange { .. }));
        let err = check_t_stability(&p, &[0.0], &[vec![1.0]], &[0.1]).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn integral_solution_certifies_the_linear_cosine_solve() {
        // A = 0, omega = -1, f = cos: the solution tends to
        // (cos + sin)/2, where the inequality is pointwise tight.
        let p = EvolutionProblem::new(zero_family(Space::scalar()), -1.0)
            .with_forcing(cos_forcing());
        let grid = Grid::with_step(-20.0, 5.0, 5e-3).unwrap();
        let cfg = SolverConfig::new(5e-3, grid);
        let res = solve_line(&p, &cfg).unwrap();
        let plan = IntegralSamplePlan { tuples: 60, seed: 11, ..Default::default() };
        let cert = check_integral_solution(&res, &p, &plan).unwrap();
        assert!(cert.pass, "worst margin {} budget {}", cert.worst_margin, cert.budget.total());
        assert!(cert.budget.total() < 0.5, "budget should not be vacuous: {}", cert.budget.total());
        assert!(cert.samples[0].label.contains("lambda_probe"));

        // Corrupt the curve by adding 0.1 t: the dissipativity margin of the
        // right side cannot absorb a growing left side.
        let bad = corrupt(&res, |t| 0.1 * t);
        let cert_bad = check_integral_solution(&bad, &p, &plan).unwrap();
        assert!(!cert_bad.pass, "corrupted curve must fail, margin {}", cert_bad.worst_margin);
    }

    #[test]
    fn integral_solution_rejects_bad_plans_and_mismatches() {
        let p = EvolutionProblem::new(zero_family(Space::scalar()), -1.0)
            .with_forcing(cos_forcing());
        let grid = Grid::with_step(-20.0, 2.0, 1e-2).unwrap();
        let res = solve_line(&p, &SolverConfig::new(1e-2, grid)).unwrap();
        let err = check_integral_solution(&res, &p, &IntegralSamplePlan { tuples: 0, ..Default::default() })
            .unwrap_err();
        assert!(matches!(err, Error::Config(_)));

        let other = EvolutionProblem::new(zero_family(Space::scalar()), -2.0)
            .with_forcing(cos_forcing());
        let err = check_integral_solution(&res, &other, &IntegralSamplePlan::default()).unwrap_err();
        assert!(matches!(err, Error::MismatchedProblems(_)));
    }

    #[test]
    fn stability_line_bounds_cosine_forcing_against_zero() {
        let space = Space::scalar();
        let f1 = cos_forcing();
        let f2 = zero_forcing_scalar();
        let grid = Grid::with_step(-20.0, 6.0, 4e-3).unwrap();
        let p1 = EvolutionProblem::new(zero_family(space), -1.0).with_forcing(f1.clone());
        let p2 = EvolutionProblem::new(zero_family(space), -1.0).with_forcing(f2.clone());
        let u1 = solve_line(&p1, &SolverConfig::new(1e-2, grid)).unwrap();
        let u2 = solve_line(&p2, &SolverConfig::new(1e-2, grid)).unwrap();
        let cert = check_stability_line(&u1, &u2, &f1, &f2, -1.0).unwrap();
        assert!(cert.pass, "worst margin {} budget {}", cert.worst_margin, cert.budget.total());
        // The bound is genuinely attained up to ~0.04 on this pair, so the
        // worst margin must sit near zero, not at some slack plateau.
        assert!(cert.worst_margin < 0.2, "worst margin {}", cert.worst_margin);

        let bump = 10.0 * cert.budget.total();
        let bad = corrupt(&u1, |_| bump);
        let cert_bad = check_stability_line(&bad, &u2, &f1, &f2, -1.0).unwrap();
        assert!(!cert_bad.pass, "corruption of 10x budget must fail");
    }

    #[test]
    fn stability_line_requires_matching_runs() {
        let space = Space::scalar();
        let f = cos_forcing();
        let grid = Grid::with_step(-20.0, 2.0, 1e-2).unwrap();
        let p = EvolutionProblem::new(zero_family(space), -1.0).with_forcing(f.clone());
        let u = solve_line(&p, &SolverConfig::new(1e-2, grid)).unwrap();
        let err = check_stability_line(&u, &u, &f, &f, -2.0).unwrap_err();
        assert!(matches!(err, Error::MismatchedProblems(_)));

        let other_grid = Grid::with_step(-20.0, 2.0, 2e-2).unwrap();
        let v = solve_line(&p, &SolverConfig::new(1e-2, other_grid)).unwrap();
        let err = check_stability_line(&u, &v, &f, &f, -1.0).unwrap_err();
        assert!(matches!(err, Error::MismatchedProblems(_)));
    }

    #[test]
    fn stability_halfline_is_tight_for_the_linear_scalar_problem() {
        // A = 0: both solves share the forced part, so the difference is
        // exactly e^{omega t} |x1 - x2| and the margin sits at zero.
        let space = Space::scalar();
        let f = cos_forcing();
        let grid = Grid::with_step(0.0, 6.0, 2e-3).unwrap();
        let p1 = EvolutionProblem::new(zero_family(space), -0.8)
            .with_forcing(f.clone())
            .with_initial(vec![0.9]);
        let p2 = EvolutionProblem::new(zero_family(space), -0.8)
            .with_forcing(f.clone())
            .with_initial(vec![0.1]);
        let u1 = solve_halfline(&p1, &SolverConfig::new(1e-3, grid)).unwrap();
        let u2 = solve_halfline(&p2, &SolverConfig::new(1e-3, grid)).unwrap();
        let cert =
            check_stability_halfline(&u1, &u2, &f, &f, &[0.9], &[0.1], -0.8).unwrap();
        assert!(cert.pass, "worst margin {} budget {}", cert.worst_margin, cert.budget.total());
        // Equality case: the worst margin must be small in magnitude.
        assert!(cert.worst_margin.abs() <= cert.budget.total());

        let bump = 10.0 * cert.budget.total();
        let bad = corrupt(&u1, |_| bump);
        let cert_bad =
            check_stability_halfline(&bad, &u2, &f, &f, &[0.9], &[0.1], -0.8).unwrap();
        assert!(!cert_bad.pass);
    }

    #[test]
    fn half_whole_comparison_tracks_an_offset_initial_value() {
        let space = Space::scalar();
        let f = cos_forcing();
        let line_grid = Grid::with_step(-20.0, 6.0, 4e-3).unwrap();
        let p = EvolutionProblem::new(zero_family(space), -1.0).with_forcing(f.clone());
        let u_line = solve_line(&p, &SolverConfig::new(5e-3, line_grid)).unwrap();

        let half_grid = Grid::with_step(0.0, 6.0, 4e-3).unwrap();
        let at_zero = u_line.u.eval(0.0).unwrap()[0];

        // Offset start: the difference decays like e^{omega t} exactly.
        let p_off = p.clone().with_initial(vec![at_zero + 1.0]);
        let u_half = solve_halfline(&p_off, &SolverConfig::new(5e-3, half_grid)).unwrap();
        let cert = check_half_whole_comparison(&u_line, &u_half, -1.0).unwrap();
        assert!(cert.pass, "worst margin {} budget {}", cert.worst_margin, cert.budget.total());
        assert!(cert.worst_margin.abs() <= cert.budget.total());

        // Matching start: the right side is ~0 and the two solves agree
        // within budget.
        let p_match = p.clone().with_initial(vec![at_zero]);
        let u_match = solve_halfline(&p_match, &SolverConfig::new(5e-3, half_grid)).unwrap();
        let cert_match = check_half_whole_comparison(&u_line, &u_match, -1.0).unwrap();
        assert!(cert_match.pass, "worst margin {}", cert_match.worst_margin);

        let bump = 10.0 * cert_match.budget.total();
        let bad = corrupt(&u_match, |_| bump);
        let cert_bad = check_half_whole_comparison(&u_line, &bad, -1.0).unwrap();
        assert!(!cert_bad.pass);
    }

    #[test]
    fn ap_transfer_certifies_cosine_shifts_and_rejects_time_dependence() {
        let p = EvolutionProblem::new(zero_family(Space::scalar()), -1.0)
            .with_forcing(cos_forcing());
        let grid = Grid::with_step(-12.0, 14.0, 5e-3).unwrap();
        let cfg = SolverConfig::new(1e-2, grid);
        let two_pi = 2.0 * std::f64::consts::PI;
        let cert = check_ap_transfer(&p, &cfg, &[two_pi, 1.0, 0.35]).unwrap();
        assert!(cert.pass, "worst margin {} budget {}", cert.worst_margin, cert.budget.total());
        // The exact period must transfer with a near-zero right side.
        assert!(cert.samples[0].rhs < 2e-2, "period sample rhs {}", cert.samples[0].rhs);

        let tv = EvolutionProblem::new(scalar_timevar_decay_family(), -1.0)
            .with_forcing(cos_forcing());
        let err = check_ap_transfer(&tv, &cfg, &[1.0]).unwrap_err();
        assert!(matches!(err, Error::HypothesisViolated(_)));

        let err = check_ap_transfer(&p, &cfg, &[]).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn boundedness_reports_sups_and_certifies_no_growth() {
        let p = EvolutionProblem::new(zero_family(Space::scalar()), -1.0)
            .with_forcing(cos_forcing())
            .with_initial(vec![0.3]);
        let grid = Grid::with_step(0.0, 8.0, 5e-3).unwrap();
        let cfg = SolverConfig::new(1e-2, grid);
        let study =
            converge_study(&p, &cfg, &[4e-2, 2e-2, 1e-2], LineKind::HalfLine, None).unwrap();

        // Forcing stability against f = 0 bounds the sups by
        // sup|f|/(-omega) = 1 plus the initial value's decaying imprint.
        let cert = check_boundedness(&study, BoundKind::Uniform(1.1)).unwrap();
        assert!(cert.pass, "worst margin {}", cert.worst_margin);
        assert!(cert.samples.iter().any(|s| s.label.contains("difference quotient")));

        let cert_sweep = check_boundedness(&study, BoundKind::SweepOnly).unwrap();
        assert!(cert_sweep.pass);

        let empty = ConvergeStudy { rows: Vec::new(), results: Vec::new() };
        let err = check_boundedness(&empty, BoundKind::Uniform(1.0)).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }
}
