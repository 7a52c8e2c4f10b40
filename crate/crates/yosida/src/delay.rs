//! Delay problems: `u'(t) = A(t)u(t) + omega u(t) + G(t, u_t)` where the
//! forcing is a functional of the history segment `u_t(theta) = u(t + theta)`,
//! `theta` in `[-r, 0]`.
//!
//! The driver [`solve_fde`] runs an outer fixed point: freeze the candidate
//! curve, evaluate the history functional along it to obtain an ordinary
//! forcing term, solve the whole-line problem, repeat.  When the history gain
//! `beta` is dominated by the decay rate (`beta < -omega`), the outer map is a
//! sup-norm contraction with factor `beta / (-omega)`; the measured
//! successive-change ratios are reported and checked against that bound.
//!
//! [`check_fde_agreement`] re-derives the solution by an independent route:
//! the method of steps.  Starting from the burn-in boundary it marches blocks
//! of length `r`, each solved as a half-line problem whose forcing samples the
//! history functional along the already-assembled curve.  Seeding each block's
//! initial value with the discrete exponential memory accumulated along the
//! assembled curve makes the concatenated march satisfy the same discrete
//! fixed-point relation as the whole-line solve node for node, so the two
//! routes agree to iteration tolerances — far below any discretization scale —
//! and the certificate budget is assembled from measured defects only.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certificate::{BudgetBreakdown, CertSample, Certificate};
use crate::checks::node_samples;
use crate::control::{ScalarFn, TimeFn};
use crate::curve::{Grid, SampledCurve};
use crate::error::{Error, Result};
use crate::family::{EvolutionProblem, OperatorFamily};
use crate::kernel::ExpCellWeights;
use crate::solver::{solve_halfline, solve_line, SolveResult, SolverConfig};
use crate::space::Space;
use crate::tol::{ARITHMETIC_SLACK, OUTER_CONTRACTION_SLACK, TIE_TOL_ABS};

/// Cap on outer fixed-point iterations in [`solve_fde`].
const MAX_OUTER_ITERS: usize = 400;

/// Cap on per-block refit sweeps in [`check_fde_agreement`].  A point delay
/// needs exactly two sweeps (the second confirms); distributed kernels
/// contract at least as fast as the outer map.
const MAX_BLOCK_SWEEPS: usize = 60;

/// Relative stopping change for the per-block refit sweeps.
const BLOCK_SWEEP_TOL: f64 = 1e-10;

/// A view of one history window of a sampled curve: `phi(theta) = u(t +
/// theta)` for `theta` in `[-r, 0]`.
#[derive(Debug, Clone, Copy)]
pub struct HistorySegment<'a> {
    curve: &'a SampledCurve,
    t: f64,
    r: f64,
}

impl HistorySegment<'_> {
    /// Right endpoint of the window (the "current" time).
    pub fn anchor(&self) -> f64 {
        self.t
    }

    /// Window length `r`.
    pub fn length(&self) -> f64 {
        self.r
    }

    /// Sample step of the underlying curve.
    pub fn dt(&self) -> f64 {
        self.curve.grid().dt()
    }

    /// State dimension.
    pub fn dim(&self) -> usize {
        self.curve.space().dim()
    }

    /// Evaluate `phi(theta) = u(t + theta)`; `theta` must lie in `[-r, 0]`
    /// up to roundoff.
    pub fn eval(&self, theta: f64) -> Result<Vec<f64>> {
        if !(theta >= -self.r - TIE_TOL_ABS && theta <= TIE_TOL_ABS) {
            return Err(Error::ParamRange(format!(
                "history offset {theta} outside [-{}, 0]",
                self.r
            )));
        }
        let clamped = theta.clamp(-self.r, 0.0);
        self.curve.eval(self.t + clamped)
    }
}

/// The history window of `u` anchored at `t`: fails with a window error if
/// `[t - r, t]` is not covered by the curve.
pub fn segment(u: &SampledCurve, t: f64, r: f64) -> Result<HistorySegment<'_>> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::ParamRange(format!(
            "history length must be positive and finite, got {r}"
        )));
    }
    let grid = u.grid();
    if t - r < grid.t_start() - TIE_TOL_ABS {
        return Err(Error::OutOfWindow {
            t: t - r,
            start: grid.t_start(),
            end: grid.t_end(),
        });
    }
    if t > grid.t_end() + TIE_TOL_ABS {
        return Err(Error::OutOfWindow {
            t,
            start: grid.t_start(),
            end: grid.t_end(),
        });
    }
    Ok(HistorySegment { curve: u, t, r })
}

/// What shape of history dependence a functional has; used for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HistoryKind {
    /// Reads the single value `u(t - r)`.
    PointDelay,
    /// Integrates the window against a kernel.
    Distributed,
    /// User-supplied map with a declared gain.
    Custom,
}

/// The history map: `(t, segment) -> forcing vector`.
pub type HistoryMap = Arc<dyn Fn(f64, &HistorySegment<'_>) -> Vec<f64> + Send + Sync>;

/// A history functional `G(t, phi)` with window length `r` and declared
/// Lipschitz gain `beta` in the sup norm of the segment:
/// `||G(t, phi1) - G(t, phi2)|| <= beta * sup ||phi1 - phi2||`.
///
/// The built-in constructors guarantee the gain exactly at the discrete
/// level; [`HistoryFunctional::check_lipschitz`] verifies it on random
/// segment pairs either way, which catches a custom map whose declared gain
/// understates the truth.
#[derive(Clone)]
pub struct HistoryFunctional {
    r: f64,
    beta: f64,
    kind: HistoryKind,
    map: HistoryMap,
}

impl std::fmt::Debug for HistoryFunctional {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HistoryFunctional")
            .field("r", &self.r)
            .field("beta", &self.beta)
            .field("kind", &self.kind)
            .finish()
    }
}

fn check_history_params(r: f64, beta: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::ParamRange(format!(
            "history length must be positive and finite, got {r}"
        )));
    }
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::ParamRange(format!(
            "history gain must be nonnegative and finite, got {beta}"
        )));
    }
    Ok(())
}

fn add_drive(v: &mut [f64], drive: &Option<TimeFn>, t: f64) {
    if let Some(d) = drive {
        let dv = d(t);
        for (a, b) in v.iter_mut().zip(dv) {
            *a += b;
        }
    }
}

impl HistoryFunctional {
    /// `G(t, phi) = weight * phi(-r) + drive(t)`: gain `|weight|`.
    pub fn point_delay(r: f64, weight: f64, drive: Option<TimeFn>) -> Result<Self> {
        check_history_params(r, weight.abs())?;
        let map: HistoryMap = Arc::new(move |t, seg: &HistorySegment<'_>| {
            let mut v = seg
                .eval(-seg.length())
                .expect("segment covers [-r, 0] by construction");
            for a in v.iter_mut() {
                *a *= weight;
            }
            add_drive(&mut v, &drive, t);
            v
        });
        Ok(HistoryFunctional {
            r,
            beta: weight.abs(),
            kind: HistoryKind::PointDelay,
            map,
        })
    }

    /// `G(t, phi) = c * sum_j w_j k(theta_j) phi(theta_j) + drive(t)` where
    /// the `theta_j` sample the window at the segment's own step, `w_j` are
    /// trapezoid weights, and `c` renormalizes the discrete kernel mass so
    /// that `sum_j |c w_j k(theta_j)| = beta` exactly.  The declared gain is
    /// therefore honest at the discrete level regardless of how accurately
    /// the sum approximates the integral.
    pub fn distributed(
        r: f64,
        kernel: ScalarFn,
        beta: f64,
        drive: Option<TimeFn>,
    ) -> Result<Self> {
        check_history_params(r, beta)?;
        let map: HistoryMap = Arc::new(move |t, seg: &HistorySegment<'_>| {
            let m = ((seg.length() / seg.dt()).ceil() as usize).max(1);
            let dtheta = seg.length() / m as f64;
            let mut mass = 0.0;
            let mut weights = Vec::with_capacity(m + 1);
            for j in 0..=m {
                let theta = -seg.length() + j as f64 * dtheta;
                let w = if j == 0 || j == m { 0.5 * dtheta } else { dtheta };
                let kw = w * kernel(theta);
                mass += kw.abs();
                weights.push((theta, kw));
            }
            let mut v = vec![0.0; seg.dim()];
            if mass > 1e-300 {
                let scale = beta / mass;
                for (theta, kw) in weights {
                    let phi = seg
                        .eval(theta)
                        .expect("segment covers [-r, 0] by construction");
                    let c = scale * kw;
                    for (a, b) in v.iter_mut().zip(phi) {
                        *a += c * b;
                    }
                }
            }
            add_drive(&mut v, &drive, t);
            v
        });
        Ok(HistoryFunctional {
            r,
            beta,
            kind: HistoryKind::Distributed,
            map,
        })
    }

    /// A user-supplied history map with a declared gain.
    pub fn custom(r: f64, beta: f64, map: HistoryMap) -> Result<Self> {
        check_history_params(r, beta)?;
        Ok(HistoryFunctional {
            r,
            beta,
            kind: HistoryKind::Custom,
            map,
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn kind(&self) -> HistoryKind {
        self.kind
    }

    /// Evaluate `G(t, phi)` on a segment.
    pub fn eval(&self, t: f64, seg: &HistorySegment<'_>) -> Vec<f64> {
        (self.map)(t, seg)
    }

    /// Verify the declared sup-norm gain on random piecewise-linear segment
    /// pairs: for each trial draw two node-value sets on `[-r, 0]`, anchor
    /// them at a few times, and check
    /// `||G(t, phi1) - G(t, phi2)|| <= beta * sup ||phi1 - phi2||`.
    /// The sup of a piecewise-linear difference is attained at a node, so
    /// the right-hand side is exact and the budget is arithmetic-only.
    pub fn check_lipschitz(&self, space: Space, trials: usize, seed: u64) -> Result<Certificate> {
        if trials == 0 {
            return Err(Error::Config(
                "history gain check needs at least one trial".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = space.dim();
        let m = 48usize;
        let grid = Grid::new(-self.r, 0.0, m + 1)?;
        let anchors = [0.0, 0.9, -1.7];
        let mut samples = Vec::with_capacity(trials * anchors.len());
        let mut scale: f64 = 1.0;
        for trial in 0..trials {
            let mut v1 = vec![0.0; (m + 1) * d];
            let mut v2 = vec![0.0; (m + 1) * d];
            for a in v1.iter_mut().chain(v2.iter_mut()) {
                *a = rng.random_range(-1.0..1.0);
            }
            let sup_diff = (0..=m)
                .map(|k| {
                    space.norm_diff_unchecked(&v1[k * d..(k + 1) * d], &v2[k * d..(k + 1) * d])
                })
                .fold(0.0_f64, f64::max);
            let c1 = SampledCurve::from_values(grid, space, v1)?;
            let c2 = SampledCurve::from_values(grid, space, v2)?;
            for &t in &anchors {
                // The segment is anchored at the curve's right endpoint; the
                // map receives the external time separately.
                let s1 = HistorySegment { curve: &c1, t: 0.0, r: self.r };
                let s2 = HistorySegment { curve: &c2, t: 0.0, r: self.r };
                let g1 = self.eval(t, &s1);
                let g2 = self.eval(t, &s2);
                let lhs = space.norm_diff_unchecked(&g1, &g2);
                let rhs = self.beta * sup_diff;
                scale = scale.max(rhs).max(lhs);
                samples.push(CertSample::inequality(
                    format!("trial={trial} t={t}"),
                    lhs,
                    rhs,
                ));
            }
        }
        let budget = BudgetBreakdown {
            dt_term: 0.0,
            lambda_term: 0.0,
            quadrature_term: 0.0,
            arithmetic_term: ARITHMETIC_SLACK * (1.0 + self.beta) * scale,
        };
        Ok(Certificate::from_samples("history-lipschitz", samples, budget))
    }
}

/// A delay problem: family plus decay rate plus history functional, with the
/// gain-domination hypothesis `beta < -omega` checked at construction.
#[derive(Clone)]
pub struct DelayProblem {
    family: OperatorFamily,
    omega: f64,
    functional: HistoryFunctional,
}

impl std::fmt::Debug for DelayProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DelayProblem")
            .field("family", &self.family.label())
            .field("omega", &self.omega)
            .field("functional", &self.functional)
            .finish()
    }
}

impl DelayProblem {
    pub fn new(
        family: OperatorFamily,
        omega: f64,
        functional: HistoryFunctional,
    ) -> Result<Self> {
        if !(omega < 0.0) || !omega.is_finite() {
            return Err(Error::ParamRange(format!(
                "delay problems need a strictly negative decay rate, got omega = {omega}"
            )));
        }
        if functional.beta >= -omega {
            return Err(Error::HypothesisViolated(format!(
                "history gain {} is not dominated by the decay rate {}; the outer \
                 fixed point has no contraction bound",
                functional.beta, -omega
            )));
        }
        Ok(DelayProblem { family, omega, functional })
    }

    pub fn family(&self) -> &OperatorFamily {
        &self.family
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn functional(&self) -> &HistoryFunctional {
        &self.functional
    }

    pub fn space(&self) -> Space {
        self.family.space()
    }

    /// A-priori contraction factor of the outer map, `beta / (-omega)`.
    pub fn contraction_factor(&self) -> f64 {
        self.functional.beta / -self.omega
    }
}

/// Result of the outer fixed point.
#[derive(Clone)]
pub struct FdeSolution {
    /// The final whole-line solve; its curve is the returned candidate.
    pub result: SolveResult,
    /// Successive-change ratios of the outer iteration (skipping steps whose
    /// previous change was at roundoff).
    pub outer_ratios: Vec<f64>,
    /// Extrapolated sup distance from the returned curve to the outer fixed
    /// point, `diff * q / (1 - q)` at contraction factor `q`.
    pub outer_defect: f64,
    /// The history forcing evaluated along the returned curve — the ordinary
    /// forcing term that reproduces `result` when solved directly.
    pub frozen_forcing: TimeFn,
}

impl std::fmt::Debug for FdeSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FdeSolution")
            .field("outer_ratios", &self.outer_ratios)
            .field("outer_defect", &self.outer_defect)
            .field("lambda", &self.result.lambda)
            .finish()
    }
}

/// The history forcing along a frozen candidate: `t -> G(t, u_t)` with the
/// segment anchor clamped into `[t_start + r, t_end]` so the closure is
/// total on the window.  The clamp only bites on `[t_start, t_start + r)`,
/// which lies inside the burn-in region the whole-line solve already
/// excludes from its valid window.
fn history_forcing(functional: &HistoryFunctional, snap: Arc<SampledCurve>) -> TimeFn {
    let functional = functional.clone();
    let lo = snap.grid().t_start() + functional.r;
    let hi = snap.grid().t_end();
    Arc::new(move |t: f64| {
        let anchor = t.clamp(lo, hi);
        let seg = segment(&snap, anchor, functional.r)
            .expect("clamped anchor keeps the history window inside the curve");
        functional.eval(t, &seg)
    })
}

/// Solve the delay problem by the outer fixed point, starting from zero.
pub fn solve_fde(p: &DelayProblem, cfg: &SolverConfig) -> Result<FdeSolution> {
    solve_fde_with_guess(p, cfg, None)
}

/// Solve the delay problem starting from a supplied initial candidate.  The
/// fixed point does not depend on the guess; exposing it lets callers verify
/// that independently.
pub fn solve_fde_with_guess(
    p: &DelayProblem,
    cfg: &SolverConfig,
    guess: Option<&SampledCurve>,
) -> Result<FdeSolution> {
    let grid = cfg.grid;
    let space = p.space();
    if p.functional.r > grid.t_end() - grid.t_start() {
        return Err(Error::Config(format!(
            "window of length {} cannot hold one history length {}",
            grid.t_end() - grid.t_start(),
            p.functional.r
        )));
    }
    let mut current = match guess {
        Some(c) => {
            if c.grid() != grid {
                return Err(Error::MismatchedProblems(
                    "initial guess must live on the solver grid".into(),
                ));
            }
            if c.space() != space {
                return Err(Error::MismatchedProblems(
                    "initial guess dimension does not match the family".into(),
                ));
            }
            c.clone()
        }
        None => SampledCurve::constant(grid, space, &vec![0.0; space.dim()])?,
    };

    let q = p.contraction_factor();
    let stop = if q > 0.0 {
        cfg.picard_tol * (1.0 - q) / q
    } else {
        cfg.picard_tol
    };

    let mut ratios = Vec::new();
    let mut prev_diff: Option<f64> = None;
    for _ in 0..MAX_OUTER_ITERS {
        let forcing = history_forcing(&p.functional, Arc::new(current.clone()));
        let prob = EvolutionProblem::new(p.family.clone(), p.omega).with_forcing(forcing);
        let res = solve_line(&prob, cfg)?;
        let diff = res.u.sup_diff(&current)?;
        let floor = 1e-13 * (1.0 + res.u.sup_norm());
        if let Some(prev) = prev_diff {
            if prev > floor.max(stop) {
                let ratio = diff / prev;
                ratios.push(ratio);
                if diff > floor && ratio > q + OUTER_CONTRACTION_SLACK {
                    return Err(Error::ContractionViolated { measured: ratio, bound: q });
                }
            }
        }
        current = res.u.clone();
        if diff <= stop {
            let outer_defect = if q > 0.0 { diff * q / (1.0 - q) } else { diff };
            let frozen_forcing = history_forcing(&p.functional, Arc::new(current));
            return Ok(FdeSolution { result: res, outer_ratios: ratios, outer_defect, frozen_forcing });
        }
        prev_diff = Some(diff);
    }
    Err(Error::IterationLimit {
        max_iter: MAX_OUTER_ITERS,
        last_change: prev_diff.unwrap_or(f64::NAN),
    })
}

/// Re-derive the delay solution by the method of steps and certify agreement.
///
/// Starting at the burn-in boundary, the window is covered by blocks of one
/// history length (the delay must sit on the grid, `r = k dt`).  Each block
/// is solved as a half-line problem on a time-shifted family.  The block's
/// initial value is `M(ta)/lambda + e^{-(ta - t_start)/lambda} u(t_start)`,
/// where `M` is the discrete exponential memory accumulated along the
/// assembled curve with the solver's own cell weights; since the half-line
/// relation carries its seed exactly as `e^{-t/lambda} u0`, the concatenated
/// blocks then satisfy the whole-line discrete relation node for node.  The
/// certificate budget is assembled from measured iteration defects (inner
/// residuals, outer extrapolation gap, block refit changes) converted to
/// solution distances through the relation's response factor and amplified
/// by the outer contraction feedback `1/(1 - q)` — no discretization term
/// appears because both routes share one grid and one discrete functional.
///
/// Within a block the forcing depends on the block's own values only for
/// distributed functionals (a point delay reads strictly committed nodes),
/// so each block runs a refit sweep loop that converges at least as fast as
/// the outer map.
pub fn check_fde_agreement(p: &DelayProblem, sol: &FdeSolution) -> Result<Certificate> {
    let res = &sol.result;
    let grid = res.u.grid();
    let space = res.u.space();
    if space != p.space() {
        return Err(Error::MismatchedProblems(
            "solution dimension does not match the delay problem".into(),
        ));
    }
    if res.omega != p.omega {
        return Err(Error::MismatchedProblems(format!(
            "solution was produced at omega = {}, problem has omega = {}",
            res.omega, p.omega
        )));
    }
    let dt = grid.dt();
    let d = space.dim();
    let n = grid.len();
    let lambda = res.lambda;
    let r = p.functional.r;
    let kb = (r / dt).round() as usize;
    if kb == 0 || (kb as f64 * dt - r).abs() > 1e-9 * r.max(1.0) {
        return Err(Error::Config(format!(
            "the delay must sit on the grid for the block march: r = {r}, dt = {dt}"
        )));
    }

    // March from the later of the burn-in boundary and one history length
    // into the window (the first block's history must be on the grid).
    let i0 = grid.nearest_node(res.valid_from)?.max(kb);
    if i0 >= n - 1 {
        return Err(Error::Config(
            "window leaves no room beyond burn-in for the block march".into(),
        ));
    }

    // Assembled curve: supplied values up to the march start, recomputed
    // blocks beyond.  The memory accumulator runs along it from the grid
    // start with the solver's cell weights.
    let mut assembled: Vec<f64> = res.u.values()[..(i0 + 1) * d].to_vec();
    let w = ExpCellWeights::new(-1.0 / lambda, dt);
    let mut acc = vec![0.0; d];
    for k in 0..i0 {
        let (old, new) = (res.u.node(k).to_vec(), res.u.node(k + 1));
        w.step_vec(&mut acc, &old, new);
    }
    let left0 = res.u.node(0).to_vec();

    let mut times = Vec::new();
    let mut diffs = Vec::new();
    let mut blocks = 0usize;
    let mut block_residual_sum = 0.0;
    let mut refit_change_sum = 0.0;
    let mut b0 = i0;
    while b0 < n - 1 {
        let b1 = (b0 + kb).min(n - 1);
        let len = b1 - b0;
        let ta = grid.node(b0);
        let bgrid = Grid::new(0.0, dt * len as f64, len + 1)?;
        let tailw = (-(ta - grid.t_start()) / lambda).exp();
        let u0_blk: Vec<f64> = (0..d)
            .map(|i| acc[i] / lambda + tailw * left0[i])
            .collect();

        let base = p.family.clone();
        let shifted = OperatorFamily::new(
            space,
            base.label().to_string(),
            base.lambda_max(),
            Arc::new(move |t: f64, l: f64, x: &[f64]| base.resolve(ta + t, l, x)),
        );

        // Refit sweeps: freeze the candidate block, sample the functional
        // along assembled-plus-candidate, solve the block, repeat.
        let mut candidate: Vec<f64> = res.u.values()[b0 * d..(b1 + 1) * d].to_vec();
        let mut bres = None;
        for sweep in 0..=MAX_BLOCK_SWEEPS {
            if sweep == MAX_BLOCK_SWEEPS {
                return Err(Error::IterationLimit {
                    max_iter: MAX_BLOCK_SWEEPS,
                    last_change: refit_change_sum,
                });
            }
            let mut comp_values = assembled.clone();
            comp_values.extend_from_slice(&candidate[d..]);
            let comp_grid = Grid::new(grid.t_start(), grid.node(b1), b0 + 1 + len)?;
            let comp = SampledCurve::from_values(comp_grid, space, comp_values)?;
            let mut f_vals = Vec::with_capacity((len + 1) * d);
            for j in 0..=len {
                let t_abs = grid.node(b0 + j);
                let seg = segment(&comp, t_abs, r)?;
                f_vals.extend_from_slice(&p.functional.eval(t_abs, &seg));
            }
            let forcing: TimeFn = Arc::new(move |t: f64| {
                let j = ((t / dt).round() as usize).min(len);
                f_vals[j * d..(j + 1) * d].to_vec()
            });
            let prob = EvolutionProblem::new(shifted.clone(), p.omega)
                .with_initial(u0_blk.clone())
                .with_forcing(forcing);
            let bcfg = SolverConfig::new(lambda, bgrid);
            let solved = solve_halfline(&prob, &bcfg)?;
            let change = (0..=len)
                .map(|j| {
                    space.norm_diff_unchecked(solved.u.node(j), &candidate[j * d..(j + 1) * d])
                })
                .fold(0.0_f64, f64::max);
            candidate = solved.u.values().to_vec();
            let done = change <= BLOCK_SWEEP_TOL * (1.0 + solved.u.sup_norm());
            bres = Some(solved);
            if done {
                refit_change_sum += change;
                break;
            }
        }
        let bres = bres.expect("loop always solves at least once");
        block_residual_sum += bres.residual;

        // Record per-node deviations (the shared boundary node only once),
        // commit the block, and advance the memory across it.
        let start_j = if blocks == 0 { 0 } else { 1 };
        for j in start_j..=len {
            times.push(grid.node(b0 + j));
            diffs.push(
                space.norm_diff_unchecked(&candidate[j * d..(j + 1) * d], res.u.node(b0 + j)),
            );
        }
        for j in 0..len {
            let old = candidate[j * d..(j + 1) * d].to_vec();
            w.step_vec(&mut acc, &old, &candidate[(j + 1) * d..(j + 2) * d]);
        }
        assembled.extend_from_slice(&candidate[d..]);
        b0 = b1;
        blocks += 1;
    }

    let zeros = vec![0.0; diffs.len()];
    let samples = node_samples(&times, &diffs, &zeros, "block-march deviation");
    let q = p.contraction_factor();
    let amp = 1.0 / (1.0 - q);
    // A persistent node-level defect d of the discrete fixed-point relation
    // moves the solution by up to d (1 - lambda omega) / (lambda |omega|) in
    // sup norm (the relation's memory has mass 1/(1 - lambda omega) per
    // step, so the geometric response factor is the reciprocal gap).  The
    // measured residuals and refit changes are defects, not distances, and
    // get converted before the outer feedback amplification.
    let defect_amp = (1.0 - lambda * p.omega) / (lambda * -p.omega);
    let sup = res.u.sup_norm();
    let budget = BudgetBreakdown {
        dt_term: 0.0,
        lambda_term: amp
            * (defect_amp * (res.residual + block_residual_sum + refit_change_sum)
                + sol.outer_defect),
        quadrature_term: 0.0,
        arithmetic_term: ARITHMETIC_SLACK * (1.0 + sup) * (1.0 + blocks as f64),
    };
    Ok(Certificate::from_samples("fde-agreement", samples, budget))
}
