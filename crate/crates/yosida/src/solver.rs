//! Kernel-smoothed solvers for evolution problems on the half line and the
//! whole line, their approximate time derivatives, and vanishing-parameter
//! convergence studies.
//!
//! For a regularization parameter `lambda > 0`, the approximate solution
//! solves a fixed-point equation built from the shifted resolvent and the
//! one-sided exponential kernel `(1/lambda) e^{-s/lambda}`:
//!
//! * half line (`t >= 0`, initial value `u0`):
//!
//!   ```text
//!   u(t) = J^omega_lambda(t) [ lambda f(t) + e^{-t/lambda} u0
//!            + (1/lambda) integral_0^t e^{-tau/lambda} u(t - tau) dtau ]
//!   ```
//!
//! * whole line (forcing drives everything, `omega < 0`):
//!
//!   ```text
//!   u(t) = J^omega_lambda(t) [ lambda f(t)
//!            + (1/lambda) integral_0^inf e^{-s/lambda} u(t - s) ds ]
//!   ```
//!
//! The memory integrals are marched with the exact piecewise-linear weights
//! from [`crate::kernel`], so the only discretization errors are the linear
//! interpolant itself (order `dt^2 / (8 lambda)`) and, on the whole line,
//! the truncation of the infinite kernel tail at the left window edge.

use crate::control::TimeFn;
use crate::curve::{Grid, SampledCurve};
use crate::error::{Error, Result};
use crate::family::EvolutionProblem;
use crate::kernel::ExpCellWeights;
use crate::space::axpy;
use crate::tol::{
    CONTRACTION_SLACK, LOCAL_FACTOR_MAX, LOCAL_NODE_MAX_SWEEPS, LOCAL_NODE_TOL,
};
use serde::{Deserialize, Serialize};

/// How whole-line machinery extends a curve to the left of its window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeftExtension {
    /// Hold the leftmost value: right for curves that have settled.
    Freeze,
    /// Extend by zero: right for curves that vanish in the past.
    Zero,
}

/// Which fixed-point equation a study or limit run should solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineKind {
    HalfLine,
    WholeLine,
}

/// Solver configuration shared by both fixed-point equations.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Kernel regularization parameter.
    pub lambda: f64,
    /// Solve window and step.
    pub grid: Grid,
    /// Target distance to the discrete fixed point for the whole-line
    /// iteration (the stopping rule converts it through the contraction
    /// factor, so this bounds the final gap, not the last change).
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    /// Bound on left-tail pollution that defines the valid sub-window.
    pub tail_tol: f64,
    pub left_extension: LeftExtension,
}

impl SolverConfig {
    pub fn new(lambda: f64, grid: Grid) -> Self {
        SolverConfig {
            lambda,
            grid,
            picard_tol: 1e-8,
            picard_max_iter: 200_000,
            tail_tol: 1e-6,
            left_extension: LeftExtension::Freeze,
        }
    }
}

/// A solver run: the curve, what produced it, and its quality measures.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub u: SampledCurve,
    pub lambda: f64,
    pub omega: f64,
    pub family_label: String,
    /// Sup-norm defect of the fixed-point equation over the valid window,
    /// re-measured after the run (iteration quality, not discretization).
    pub residual: f64,
    /// Whole line: Picard iterations used.  Half line: worst per-node sweep
    /// count of the implicit solves.
    pub iterations: usize,
    /// Whole line: largest measured successive-change ratio (a-priori bound
    /// `1/(1 - lambda omega)`).  Half line: the local implicit-map factor.
    pub contraction_estimate: f64,
    /// Bound on left-extension pollution on the valid window (0 on the half
    /// line, `tail_tol` by construction on the whole line).
    pub tail_error_bound: f64,
    /// Start of the valid sub-window (burn-in excluded).
    pub valid_from: f64,
}

impl SolveResult {
    /// The curve restricted to its valid sub-window.
    pub fn valid(&self) -> Result<SampledCurve> {
        let i0 = self.u.grid().nearest_node(self.valid_from)?;
        self.u.restrict_from(i0)
    }
}

fn check_omega_lambda(lambda: f64, omega: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::LambdaOutOfRange { lambda, max: f64::INFINITY });
    }
    // Keep a margin inside lambda |omega| < 1 so the shifted-resolvent
    // factor 1/(1 - lambda omega) stays bounded by 10.
    if lambda * omega.abs() > 0.9 {
        return Err(Error::LambdaOutOfRange { lambda, max: 0.9 / omega.abs() });
    }
    Ok(())
}

/// Solve the half-line fixed-point equation by marching with implicit nodes.
pub fn solve_halfline(p: &EvolutionProblem, cfg: &SolverConfig) -> Result<SolveResult> {
    check_omega_lambda(cfg.lambda, p.omega)?;
    let grid = cfg.grid;
    if grid.t_start() != 0.0 {
        return Err(Error::InvalidGrid(format!(
            "half-line solves start at 0, grid starts at {}",
            grid.t_start()
        )));
    }
    let u0 = p.u0.as_ref().ok_or(Error::MissingInitial)?;
    let space = p.space();
    if u0.len() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), got: u0.len() });
    }
    let (lambda, omega) = (cfg.lambda, p.omega);
    let dt = grid.dt();
    let n = grid.len();
    let d = space.dim();
    let w = ExpCellWeights::new(-1.0 / lambda, dt);
    // Per-node local map factor: (w1/lambda) applies the newest value inside
    // the kernel cell, the shifted resolvent is 1/(1 - lambda omega)-Lipschitz.
    let local_factor = (w.w1 / lambda) / (1.0 - lambda * omega);
    if local_factor > LOCAL_FACTOR_MAX {
        return Err(Error::HypothesisViolated(format!(
            "implicit node map has factor {local_factor:.3} > {LOCAL_FACTOR_MAX}; \
             shrink dt (or lambda omega) until w1/(lambda (1 - lambda omega)) drops"
        )));
    }

    let forcing: Vec<Vec<f64>> = grid.times().map(|t| p.forcing_at(t)).collect();
    for f in &forcing {
        if f.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: f.len() });
        }
    }

    let mut values = vec![0.0f64; n * d];
    // Node 0: the kernel integral vanishes and e^{-0/lambda} u0 = u0.
    let arg0 = axpy(u0, lambda, &forcing[0]);
    let y0 = p.family.resolve_shifted(omega, grid.node(0), lambda, &arg0)?;
    values[..d].copy_from_slice(&y0);

    let mut kernel_acc = vec![0.0f64; d]; // integral_0^{t_k} e^{-(t_k - tau)/lambda} u
    let mut max_sweeps = 0usize;
    for k in 0..n - 1 {
        let t_next = grid.node(k + 1);
        // Fixed part of the argument: forcing, initial layer, and the kernel
        // memory that does not involve the unknown newest node.
        let decay = (-t_next / lambda).exp();
        let mut fixed = vec![0.0f64; d];
        for i in 0..d {
            let partial = w.growth * kernel_acc[i] + w.w0 * values[k * d + i];
            fixed[i] = lambda * forcing[k + 1][i] + decay * u0[i] + partial / lambda;
        }
        // Implicit solve: y = J^omega(t_next) [ fixed + (w1/lambda) y ].
        let mut y = values[k * d..(k + 1) * d].to_vec();
        let mut theta = 1.0;
        let mut last_defect = f64::INFINITY;
        let mut converged = false;
        for sweep in 0..LOCAL_NODE_MAX_SWEEPS {
            let arg: Vec<f64> =
                fixed.iter().zip(&y).map(|(c, yi)| c + (w.w1 / lambda) * yi).collect();
            let jy = p.family.resolve_shifted(omega, t_next, lambda, &arg)?;
            let defect = space.norm_diff_unchecked(&jy, &y);
            let scale = 1.0 + space.norm_unchecked(&jy);
            if defect > last_defect && theta > 1.0 / 16.0 {
                theta *= 0.5;
            }
            last_defect = defect;
            for (yi, ji) in y.iter_mut().zip(&jy) {
                *yi = (1.0 - theta) * *yi + theta * ji;
            }
            if defect <= LOCAL_NODE_TOL * scale {
                max_sweeps = max_sweeps.max(sweep + 1);
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::LocalIterationStalled { node: k + 1, defect: last_defect });
        }
        // Commit the node and advance the kernel memory with it.
        for i in 0..d {
            kernel_acc[i] = w.growth * kernel_acc[i] + w.w0 * values[k * d + i] + w.w1 * y[i];
        }
        values[(k + 1) * d..(k + 2) * d].copy_from_slice(&y);
    }

    let u = SampledCurve::from_values(grid, space, values)?;
    let residual = halfline_defect(p, cfg, &u, u0)?;
    Ok(SolveResult {
        u,
        lambda,
        omega,
        family_label: p.family.label().to_string(),
        residual,
        iterations: max_sweeps,
        contraction_estimate: local_factor,
        tail_error_bound: 0.0,
        valid_from: 0.0,
    })
}

/// Re-measure the half-line fixed-point defect of a finished curve.
fn halfline_defect(
    p: &EvolutionProblem,
    cfg: &SolverConfig,
    u: &SampledCurve,
    u0: &[f64],
) -> Result<f64> {
    let grid = u.grid();
    let space = u.space();
    let d = space.dim();
    let (lambda, omega) = (cfg.lambda, p.omega);
    let w = ExpCellWeights::new(-1.0 / lambda, grid.dt());
    let mut acc = vec![0.0f64; d];
    let mut worst = 0.0f64;
    for (k, t) in grid.times().enumerate() {
        if k > 0 {
            let prev = u.node(k - 1).to_vec();
            w.step_vec(&mut acc, &prev, u.node(k));
        }
        let decay = (-t / lambda).exp();
        let f = p.forcing_at(t);
        let arg: Vec<f64> = (0..d)
            .map(|i| lambda * f[i] + decay * u0[i] + acc[i] / lambda)
            .collect();
        let j = p.family.resolve_shifted(omega, t, lambda, &arg)?;
        worst = worst.max(space.norm_diff_unchecked(&j, u.node(k)));
    }
    Ok(worst)
}

/// Solve the whole-line fixed-point equation by Picard iteration from zero.
///
/// Requires `omega < 0`; in the extended control regime (a second modulus
/// `g` on the family) additionally requires its declared Lipschitz constant
/// to stay below `-omega`.
pub fn solve_line(p: &EvolutionProblem, cfg: &SolverConfig) -> Result<SolveResult> {
    check_omega_lambda(cfg.lambda, p.omega)?;
    if !(p.omega < 0.0) {
        return Err(Error::HypothesisViolated(format!(
            "whole-line solves need omega < 0, got {}",
            p.omega
        )));
    }
    if let Some(c) = p.family.control() {
        if c.g.is_some() && !(c.lip_g < -p.omega) {
            return Err(Error::HypothesisViolated(format!(
                "whole-line solvability with a slope modulus needs lip_g < -omega, \
                 got lip_g = {} vs -omega = {}",
                c.lip_g, -p.omega
            )));
        }
    }
    let grid = cfg.grid;
    let space = p.space();
    let d = space.dim();
    let n = grid.len();
    let (lambda, omega) = (cfg.lambda, p.omega);
    let q = 1.0 / (1.0 - lambda * omega); // < 1 since omega < 0
    let stop_at = cfg.picard_tol * (1.0 - q) / q;

    let forcing: Vec<Vec<f64>> = grid.times().map(|t| p.forcing_at(t)).collect();
    for f in &forcing {
        if f.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: f.len() });
        }
    }

    let w = ExpCellWeights::new(-1.0 / lambda, grid.dt());
    let mut u = SampledCurve::constant(grid, space, &vec![0.0; d])?;
    let mut contraction: f64 = 0.0;
    let mut prev_change: Option<f64> = None;
    let mut iterations = 0usize;
    loop {
        if iterations >= cfg.picard_max_iter {
            return Err(Error::IterationLimit {
                max_iter: cfg.picard_max_iter,
                last_change: prev_change.unwrap_or(f64::NAN),
            });
        }
        iterations += 1;
        let next = line_apply(p, cfg, &w, &u, &forcing)?;
        let change = next.sup_diff(&u)?;
        if let Some(pc) = prev_change {
            if pc > 0.0 {
                let ratio = change / pc;
                contraction = contraction.max(ratio);
                if ratio > q + CONTRACTION_SLACK {
                    return Err(Error::ContractionViolated { measured: ratio, bound: q });
                }
            }
        }
        prev_change = Some(change);
        u = next;
        if change <= stop_at {
            break;
        }
    }

    // Valid window: the frozen left tail pollutes like
    // 2 |u|_inf e^{-r (t - t0)} with r = min(1/lambda, -omega/(1 - lambda omega)).
    let sup = u.sup_norm().max(0.5);
    let omega_tilde = omega / (1.0 - lambda * omega);
    let rate = (1.0 / lambda).min(-omega_tilde);
    let burn = ((2.0 * sup) / cfg.tail_tol).ln().max(0.0) / rate;
    let span = grid.t_end() - grid.t_start();
    if burn > 0.8 * span {
        return Err(Error::WindowTooShort { needed: burn / 0.8, got: span });
    }
    let valid_from = grid.t_start() + burn;

    // Final defect, measured on the valid window only.
    let reapplied = line_apply(p, cfg, &w, &u, &forcing)?;
    let first_valid = grid.nearest_node(valid_from)?;
    let mut residual = 0.0f64;
    for k in first_valid..n {
        residual = residual.max(space.norm_diff_unchecked(u.node(k), reapplied.node(k)));
    }

    Ok(SolveResult {
        u,
        lambda,
        omega,
        family_label: p.family.label().to_string(),
        residual,
        iterations,
        contraction_estimate: if contraction > 0.0 { contraction } else { q },
        tail_error_bound: cfg.tail_tol,
        valid_from,
    })
}

/// One Picard sweep of the whole-line map applied to `u`.
fn line_apply(
    p: &EvolutionProblem,
    cfg: &SolverConfig,
    w: &ExpCellWeights,
    u: &SampledCurve,
    forcing: &[Vec<f64>],
) -> Result<SampledCurve> {
    let grid = u.grid();
    let space = u.space();
    let d = space.dim();
    let (lambda, omega) = (cfg.lambda, p.omega);
    let mut values = vec![0.0f64; grid.len() * d];
    let mut acc = vec![0.0f64; d];
    let left = u.node(0).to_vec();
    for (k, t) in grid.times().enumerate() {
        if k > 0 {
            let prev = u.node(k - 1).to_vec();
            w.step_vec(&mut acc, &prev, u.node(k));
        }
        // Kernel average: interior part plus the extended left tail.
        let tail_weight = (-(t - grid.t_start()) / lambda).exp();
        let arg: Vec<f64> = match cfg.left_extension {
            LeftExtension::Freeze => (0..d)
                .map(|i| lambda * forcing[k][i] + acc[i] / lambda + tail_weight * left[i])
                .collect(),
            LeftExtension::Zero => {
                (0..d).map(|i| lambda * forcing[k][i] + acc[i] / lambda).collect()
            }
        };
        let y = p.family.resolve_shifted(omega, t, lambda, &arg)?;
        values[k * d..(k + 1) * d].copy_from_slice(&y);
    }
    SampledCurve::from_values(grid, space, values)
}

/// Kernel-smoothed derivative on the half line:
/// `(1/lambda) ( u(s) - u0 - (1/lambda) integral_0^s e^{-tau/lambda} (u(s - tau) - u0) dtau )`.
pub fn yosida_derivative_halfline(
    u: &SampledCurve,
    u0: &[f64],
    lambda: f64,
) -> Result<SampledCurve> {
    if !(lambda > 0.0) {
        return Err(Error::LambdaOutOfRange { lambda, max: f64::INFINITY });
    }
    let grid = u.grid();
    if grid.t_start() != 0.0 {
        return Err(Error::InvalidGrid(format!(
            "half-line derivative needs a window starting at 0, got {}",
            grid.t_start()
        )));
    }
    let space = u.space();
    let d = space.dim();
    if u0.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: u0.len() });
    }
    let w = ExpCellWeights::new(-1.0 / lambda, grid.dt());
    let mut values = vec![0.0f64; grid.len() * d];
    let mut acc = vec![0.0f64; d]; // integral of e^{-(t-tau)/lambda} (u - u0)
    for k in 0..grid.len() {
        if k > 0 {
            let older: Vec<f64> = u.node(k - 1).iter().zip(u0).map(|(a, b)| a - b).collect();
            let newer: Vec<f64> = u.node(k).iter().zip(u0).map(|(a, b)| a - b).collect();
            w.step_vec(&mut acc, &older, &newer);
        }
        for i in 0..d {
            let shifted = u.node(k)[i] - u0[i];
            values[k * d + i] = (shifted - acc[i] / lambda) / lambda;
        }
    }
    SampledCurve::from_values(grid, space, values)
}

/// Kernel-smoothed derivative on the whole line, restricted to the
/// sub-window where the left-extension pollution stays below `tail_tol`.
pub fn yosida_derivative_line(
    u: &SampledCurve,
    lambda: f64,
    left_extension: LeftExtension,
    tail_tol: f64,
) -> Result<SampledCurve> {
    if !(lambda > 0.0) {
        return Err(Error::LambdaOutOfRange { lambda, max: f64::INFINITY });
    }
    let grid = u.grid();
    let space = u.space();
    let d = space.dim();
    let w = ExpCellWeights::new(-1.0 / lambda, grid.dt());
    let mut values = vec![0.0f64; grid.len() * d];
    let mut acc = vec![0.0f64; d];
    let left = u.node(0).to_vec();
    for (k, t) in grid.times().enumerate() {
        if k > 0 {
            let prev = u.node(k - 1).to_vec();
            w.step_vec(&mut acc, &prev, u.node(k));
        }
        let tail_weight = (-(t - grid.t_start()) / lambda).exp();
        for i in 0..d {
            let mut kernel_avg = acc[i] / lambda;
            if left_extension == LeftExtension::Freeze {
                kernel_avg += tail_weight * left[i];
            }
            values[k * d + i] = (u.node(k)[i] - kernel_avg) / lambda;
        }
    }
    // Pollution of the derivative: (2 |u|_inf / lambda) e^{-(t - t0)/lambda}.
    let sup = u.sup_norm().max(f64::MIN_POSITIVE);
    let burn = (2.0 * sup / (lambda * tail_tol)).ln().max(0.0) * lambda;
    let span = grid.t_end() - grid.t_start();
    if burn > 0.8 * span {
        return Err(Error::WindowTooShort { needed: burn / 0.8, got: span });
    }
    let full = SampledCurve::from_values(grid, space, values)?;
    let i0 = grid.nearest_node(grid.t_start() + burn)?;
    full.restrict_from(i0)
}

/// One row of a convergence study.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergeRow {
    pub lambda: f64,
    /// Sup distance to the run at the previous (larger) lambda, on the
    /// intersection of valid windows.
    pub cauchy_diff: Option<f64>,
    /// Sup distance to a caller-supplied reference, when given.
    pub ref_err: Option<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Runs over a decreasing ladder of lambdas plus the pairwise diffs that
/// witness the vanishing-parameter limit.
pub struct ConvergeStudy {
    pub rows: Vec<ConvergeRow>,
    pub results: Vec<SolveResult>,
}

pub fn converge_study(
    p: &EvolutionProblem,
    cfg: &SolverConfig,
    lambdas: &[f64],
    kind: LineKind,
    reference: Option<&dyn Fn(f64) -> Vec<f64>>,
) -> Result<ConvergeStudy> {
    if lambdas.is_empty() {
        return Err(Error::ParamRange("convergence study needs at least one lambda".into()));
    }
    let mut sorted = lambdas.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut results: Vec<SolveResult> = Vec::with_capacity(sorted.len());
    let mut rows = Vec::with_capacity(sorted.len());
    for &l in &sorted {
        let run_cfg = SolverConfig { lambda: l, ..*cfg };
        let res = match kind {
            LineKind::HalfLine => solve_halfline(p, &run_cfg)?,
            LineKind::WholeLine => solve_line(p, &run_cfg)?,
        };
        let cauchy_diff = match results.last() {
            Some(prev) => Some(sup_diff_on_common_window(&prev.u, &res.u, prev.valid_from.max(res.valid_from))?),
            None => None,
        };
        let ref_err = match reference {
            Some(f) => {
                let space = res.u.space();
                let grid = res.u.grid();
                let start = grid.nearest_node(res.valid_from)?;
                let mut worst = 0.0f64;
                for k in start..grid.len() {
                    let want = f(grid.node(k));
                    worst = worst.max(space.norm_diff_unchecked(res.u.node(k), &want));
                }
                Some(worst)
            }
            None => None,
        };
        rows.push(ConvergeRow {
            lambda: l,
            cauchy_diff,
            ref_err,
            residual: res.residual,
            iterations: res.iterations,
        });
        results.push(res);
    }
    Ok(ConvergeStudy { rows, results })
}

/// Sup distance over the shared grid nodes at or after `from`.
pub(crate) fn sup_diff_on_common_window(
    a: &SampledCurve,
    b: &SampledCurve,
    from: f64,
) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(Error::MismatchedProblems("curves must share their grid".into()));
    }
    let start = a.grid().nearest_node(from)?;
    let space = a.space();
    let mut worst = 0.0f64;
    for k in start..a.grid().len() {
        worst = worst.max(space.norm_diff_unchecked(a.node(k), b.node(k)));
    }
    Ok(worst)
}

/// The λ-ladder behind [`solve_limit`] and its extrapolated error estimate.
#[derive(Debug, Clone)]
pub struct LimitResult {
    /// The run at the smallest lambda: the limit candidate.
    pub result: SolveResult,
    /// First-order-in-lambda error estimate for the candidate, extrapolated
    /// from the measured Cauchy ratio (see below).
    pub error_estimate: f64,
    /// `(lambda, cauchy diff to previous run)` for the ladder.
    pub ladder: Vec<(f64, f64)>,
}

/// Solve at `{4, 2, 1} * lambda_min` and estimate the remaining error of the
/// smallest run.  With first-order behavior `err(lambda) ~ C lambda`, the
/// diffs halve down the ladder and the geometric tail of the last diff `d2`
/// with measured ratio `rho = d2/d1` is `d2 * rho / (1 - rho)`.
pub fn solve_limit(
    p: &EvolutionProblem,
    cfg: &SolverConfig,
    lambda_min: f64,
    kind: LineKind,
) -> Result<LimitResult> {
    let ladder = [4.0 * lambda_min, 2.0 * lambda_min, lambda_min];
    let study = converge_study(p, cfg, &ladder, kind, None)?;
    let d1 = study.rows[1].cauchy_diff.unwrap();
    let d2 = study.rows[2].cauchy_diff.unwrap();
    let rho = if d1 > 0.0 { (d2 / d1).clamp(0.1, 0.9) } else { 0.5 };
    let error_estimate = d2 * rho / (1.0 - rho);
    let result = study.results.into_iter().last().unwrap();
    Ok(LimitResult {
        result,
        error_estimate,
        ladder: vec![(2.0 * lambda_min, d1), (lambda_min, d2)],
    })
}

// Re-exported for scenario code that needs the forcing type.
pub use crate::control::TimeFn as ForcingFn;

/// Convenience: zero forcing of the right dimension.
pub fn zero_forcing(dim: usize) -> TimeFn {
    std::sync::Arc::new(move |_t| vec![0.0; dim])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{constant_matrix_family, zero_family};
    use crate::space::Space;
    use std::sync::Arc;

    /// With A = 0, omega = -1, f = 0, u0 = 1 the half-line curve is the
    /// kernel-smoothed decaying exponential; at the nodes it must stay
    /// within O(lambda) of e^{-t} and solve its own equation to ~1e-12.
    #[test]
    fn halfline_zero_family_decays_like_exponential() {
        let p = EvolutionProblem::new(zero_family(Space::scalar()), -1.0).with_initial(vec![1.0]);
        let grid = Grid::new(0.0, 5.0, 2501).unwrap();
        let cfg = SolverConfig::new(0.01, grid);
        let r = solve_halfline(&p, &cfg).unwrap();
        assert!(r.residual < 1e-11, "residual {}", r.residual);
        let mut worst = 0.0f64;
        for (k, t) in grid.times().enumerate() {
            worst = worst.max((r.u.node(k)[0] - (-t).exp()).abs());
        }
        assert!(worst < 0.05, "sup error {worst}");
    }

    #[test]
    fn halfline_stationary_point_is_preserved() {
        // A u = -u, omega = 0, f = 0, u0 = 0: u == 0 identically.
        let p = EvolutionProblem::new(constant_matrix_family(Space::scalar(), &[-1.0]).unwrap(), 0.0)
            .with_initial(vec![0.0]);
        let cfg = SolverConfig::new(0.05, Grid::new(0.0, 2.0, 201).unwrap());
        let r = solve_halfline(&p, &cfg).unwrap();
        assert!(r.u.sup_norm() < 1e-13);
    }

    #[test]
    fn whole_line_constant_forcing_gives_constant_solution() {
        // A = 0, omega = -2, f = 3: u = -f/omega = 1.5 solves the limit
        // problem, and the lambda-level equation shares the same constant.
        let p = EvolutionProblem::new(zero_family(Space::scalar()), -2.0)
            .with_forcing(Arc::new(|_t| vec![3.0]));
        let grid = Grid::new(-10.0, 10.0, 2001).unwrap();
        let mut cfg = SolverConfig::new(0.05, grid);
        cfg.picard_tol = 1e-10;
        let r = solve_line(&p, &cfg).unwrap();
        let vstart = grid.nearest_node(r.valid_from).unwrap();
        for k in vstart..grid.len() {
            assert!(
                (r.u.node(k)[0] - 1.5).abs() < 1e-8,
                "node {k}: {}",
                r.u.node(k)[0]
            );
        }
        assert!(r.contraction_estimate < 1.0);
    }

    #[test]
    fn whole_line_refuses_nonnegative_omega() {
        let p = EvolutionProblem::new(zero_family(Space::scalar()), 0.0);
        let cfg = SolverConfig::new(0.05, Grid::new(-1.0, 1.0, 21).unwrap());
        assert!(matches!(solve_line(&p, &cfg), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn derivative_of_identity_curve_matches_closed_form() {
        // u(t) = t, u0 = 0: the smoothed derivative is 1 - e^{-s/lambda}.
        let grid = Grid::new(0.0, 2.0, 401).unwrap();
        let u = SampledCurve::from_fn(grid, Space::scalar(), |t| vec![t]).unwrap();
        let lambda = 0.05;
        let d = yosida_derivative_halfline(&u, &[0.0], lambda).unwrap();
        for (k, s) in grid.times().enumerate() {
            let want = 1.0 - (-s / lambda).exp();
            assert!(
                (d.node(k)[0] - want).abs() < 1e-10,
                "s = {s}: {} vs {want}",
                d.node(k)[0]
            );
        }
    }

    #[test]
    fn limit_run_error_estimate_tracks_first_order() {
        let p = EvolutionProblem::new(zero_family(Space::scalar()), -1.0).with_initial(vec![1.0]);
        let grid = Grid::new(0.0, 3.0, 3001).unwrap();
        let cfg = SolverConfig::new(0.02, grid);
        let lim = solve_limit(&p, &cfg, 0.005, LineKind::HalfLine).unwrap();
        // True error at lambda_min: sup |u_lambda - e^{-t}| is ~lambda/ e-ish;
        // the estimate must be the right order of magnitude.
        let mut true_err = 0.0f64;
        for (k, t) in grid.times().enumerate() {
            true_err = true_err.max((lim.result.u.node(k)[0] - (-t).exp()).abs());
        }
        assert!(lim.error_estimate > 0.2 * true_err && lim.error_estimate < 5.0 * true_err,
            "estimate {} vs true {true_err}", lim.error_estimate);
    }
}
