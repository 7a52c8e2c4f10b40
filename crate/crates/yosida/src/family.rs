//! Time-dependent dissipative operator families, given through their
//! resolvents, plus the shifted resolvent calculus built on top of them.
//!
//! A family is represented by its resolvent oracle
//! `J_lambda(t) x = (I - lambda A(t))^{-1} x`, the only thing the solvers
//! ever need.  Shifted resolvents for `A + omega I` come from the scaling
//! identity
//!
//! ```text
//! J^omega_lambda(t) x = J_{lambda/(1 - lambda omega)}(t) ( x / (1 - lambda omega) ),
//! ```
//!
//! valid for `lambda |omega| < 1`, and forcing folds in through
//! `J_lambda^{A + f}(t) y = J_lambda^A(t) (lambda f(t) + y)`.

use crate::control::{ControlData, ScalarFn, TimeFn};
use crate::error::{Error, Result};
use crate::space::{NormKind, Space};
use crate::tol::NEWTON_RESIDUAL_TOL;
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

/// Resolvent oracle signature: `(t, lambda, x) -> J_lambda(t) x`.
pub type ResolveFn = Arc<dyn Fn(f64, f64, &[f64]) -> Result<Vec<f64>> + Send + Sync>;

/// A time-dependent operator family, accessed through its resolvents.
#[derive(Clone)]
pub struct OperatorFamily {
    space: Space,
    label: String,
    /// Resolvents are guaranteed for `0 < lambda <= lambda_max`.
    lambda_max: f64,
    autonomous: bool,
    control: Option<ControlData>,
    resolve: ResolveFn,
}

impl OperatorFamily {
    pub fn new(space: Space, label: impl Into<String>, lambda_max: f64, resolve: ResolveFn) -> Self {
        OperatorFamily {
            space,
            label: label.into(),
            lambda_max,
            autonomous: false,
            control: None,
            resolve,
        }
    }

    pub fn with_control(mut self, control: ControlData) -> Self {
        self.control = Some(control);
        self
    }

    pub fn mark_autonomous(mut self) -> Self {
        self.autonomous = true;
        if self.control.is_none() {
            self.control = Some(ControlData::autonomous());
        }
        self
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn is_autonomous(&self) -> bool {
        self.autonomous
    }

    pub fn control(&self) -> Option<&ControlData> {
        self.control.as_ref()
    }

    /// Continuity-control data, or the error naming this family.
    pub fn require_control(&self) -> Result<&ControlData> {
        self.control.as_ref().ok_or_else(|| Error::MissingControl(self.label.clone()))
    }

    /// `J_lambda(t) x`.  Validates the range of `lambda` and the dimension.
    pub fn resolve(&self, t: f64, lambda: f64, x: &[f64]) -> Result<Vec<f64>> {
        if !(lambda > 0.0) || lambda > self.lambda_max {
            return Err(Error::LambdaOutOfRange { lambda, max: self.lambda_max });
        }
        if x.len() != self.space.dim() {
            return Err(Error::DimensionMismatch { expected: self.space.dim(), got: x.len() });
        }
        let y = (self.resolve)(t, lambda, x)?;
        if y.len() != self.space.dim() {
            return Err(Error::DimensionMismatch { expected: self.space.dim(), got: y.len() });
        }
        Ok(y)
    }

    /// `A_lambda(t) x = (J_lambda(t) x - x) / lambda`.
    pub fn yosida(&self, t: f64, lambda: f64, x: &[f64]) -> Result<Vec<f64>> {
        let j = self.resolve(t, lambda, x)?;
        Ok(j.iter().zip(x).map(|(a, b)| (a - b) / lambda).collect())
    }

    /// Shifted resolvent `J^omega_lambda(t) x` via the scaling identity.
    /// Requires `lambda |omega| < 1` and the rescaled `lambda` admissible.
    pub fn resolve_shifted(&self, omega: f64, t: f64, lambda: f64, x: &[f64]) -> Result<Vec<f64>> {
        let denom = 1.0 - lambda * omega;
        if !(lambda > 0.0) || lambda * omega.abs() >= 1.0 {
            return Err(Error::LambdaOutOfRange { lambda, max: 1.0 / omega.abs() });
        }
        let scaled: Vec<f64> = x.iter().map(|v| v / denom).collect();
        self.resolve(t, lambda / denom, &scaled)
    }

    /// Shifted slope `A^omega_lambda(t) x = (J^omega_lambda(t) x - x) / lambda`.
    pub fn yosida_shifted(&self, omega: f64, t: f64, lambda: f64, x: &[f64]) -> Result<Vec<f64>> {
        let j = self.resolve_shifted(omega, t, lambda, x)?;
        Ok(j.iter().zip(x).map(|(a, b)| (a - b) / lambda).collect())
    }
}

/// One row of an [`abs_a_estimate`]: `(lambda, |A_lambda(t) x|)`.
#[derive(Debug, Clone)]
pub struct AbsAEstimate {
    pub values: Vec<(f64, f64)>,
    /// Supremum of the slope norms over the ladder: the estimate of `|A(t) x|`.
    pub estimate: f64,
    /// Whether the slope norms were nondecreasing as `lambda` decreased
    /// (they must be, up to arithmetic noise, when `x` lies in the
    /// generalized domain).
    pub monotone: bool,
}

/// Estimate the minimal section norm `|A(t) x|` from below through the
/// nondecreasing ladder `lambda -> |A_lambda(t) x|`, `lambda` decreasing.
pub fn abs_a_estimate(
    family: &OperatorFamily,
    t: f64,
    x: &[f64],
    lambdas: &[f64],
) -> Result<AbsAEstimate> {
    if lambdas.is_empty() {
        return Err(Error::ParamRange("abs_a_estimate needs at least one lambda".into()));
    }
    let mut sorted: Vec<f64> = lambdas.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let space = family.space();
    let mut values = Vec::with_capacity(sorted.len());
    let mut monotone = true;
    let mut prev = f64::NEG_INFINITY;
    for &l in &sorted {
        let slope = family.yosida(t, l, x)?;
        let n = space.norm_unchecked(&slope);
        if n < prev - 1e-9 * (1.0 + prev.abs()) {
            monotone = false;
        }
        prev = n;
        values.push((l, n));
    }
    let estimate = values.iter().fold(0.0f64, |m, &(_, v)| m.max(v));
    Ok(AbsAEstimate { values, estimate, monotone })
}

// ---------------------------------------------------------------------------
// Built-in families
// ---------------------------------------------------------------------------

/// `A(t) = 0`: the resolvent is the identity at every time.
pub fn zero_family(space: Space) -> OperatorFamily {
    OperatorFamily::new(
        space,
        "zero",
        f64::INFINITY,
        Arc::new(|_t, _l, x: &[f64]| Ok(x.to_vec())),
    )
    .mark_autonomous()
}

/// Linear family `A(t) x = M(t) x` for a matrix-valued curve `M`.
/// Resolvents solve `(I - lambda M(t)) y = x` by LU with partial pivoting.
/// Dissipativity (and hence solvability for every positive `lambda`) is the
/// caller's contract; a singular system surfaces as a hypothesis error.
pub fn linear_matrix_family(
    space: Space,
    label: impl Into<String>,
    matrix: Arc<dyn Fn(f64) -> DMatrix<f64> + Send + Sync>,
    lambda_max: f64,
) -> OperatorFamily {
    let d = space.dim();
    OperatorFamily::new(
        space,
        label,
        lambda_max,
        Arc::new(move |t, l, x: &[f64]| {
            let m = matrix(t);
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d * d, got: m.nrows() * m.ncols() });
            }
            let mut a = DMatrix::<f64>::identity(d, d);
            a -= l * m;
            let rhs = DVector::from_column_slice(x);
            match a.lu().solve(&rhs) {
                Some(y) => Ok(y.as_slice().to_vec()),
                None => Err(Error::HypothesisViolated(format!(
                    "(I - lambda M({t})) singular at lambda = {l}"
                ))),
            }
        }),
    )
}

/// Constant-matrix convenience over [`linear_matrix_family`].
pub fn constant_matrix_family(space: Space, entries: &[f64]) -> Result<OperatorFamily> {
    let d = space.dim();
    if entries.len() != d * d {
        return Err(Error::DimensionMismatch { expected: d * d, got: entries.len() });
    }
    let m = DMatrix::from_row_slice(d, d, entries);
    Ok(linear_matrix_family(
        space,
        "constant_matrix",
        Arc::new(move |_t| m.clone()),
        f64::INFINITY,
    )
    .mark_autonomous())
}

/// Scalar family `A(t) u = -u^3 + d(t)`: the resolvent solves the strictly
/// monotone cubic `y + lambda y^3 = x + lambda d(t)` by safeguarded Newton
/// to residual [`NEWTON_RESIDUAL_TOL`].
pub fn scalar_cubic_family(drive: ScalarFn) -> OperatorFamily {
    let drive_h = drive.clone();
    let control = ControlData::new(
        Arc::new(move |t| vec![drive_h(t)]),
        Space::scalar(),
        // Resolvent outputs at two times differ by at most
        // lambda |d(t) - d(s)|, so the constant growth L == 1 suffices.
        Arc::new(|_r| 1.0),
    );
    OperatorFamily::new(
        Space::scalar(),
        "scalar_cubic",
        f64::INFINITY,
        Arc::new(move |t, l, x: &[f64]| {
            let rhs = x[0] + l * drive(t);
            Ok(vec![solve_monotone_cubic(l, rhs)?])
        }),
    )
    .with_control(control)
}

/// Root of `y + l y^3 = rhs` (unique since the left side is strictly
/// increasing): Newton clipped to a sign-bracketing interval.
fn solve_monotone_cubic(l: f64, rhs: f64) -> Result<f64> {
    let b = rhs.abs();
    let (mut lo, mut hi) = (-b, b);
    let mut y = rhs / (1.0 + l * rhs * rhs); // decent first guess, inside [lo, hi]
    for _ in 0..100 {
        let f = y + l * y * y * y - rhs;
        if f.abs() <= NEWTON_RESIDUAL_TOL * (1.0 + rhs.abs()) {
            return Ok(y);
        }
        if f > 0.0 {
            hi = y;
        } else {
            lo = y;
        }
        let df = 1.0 + 3.0 * l * y * y;
        let mut next = y - f / df;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        y = next;
    }
    Err(Error::HypothesisViolated(format!(
        "cubic resolvent Newton stalled at lambda = {l}, rhs = {rhs}"
    )))
}

/// Soft-threshold family: `A` is the negative subdifferential of
/// `c |.|_1`, whose resolvent shrinks every coordinate toward zero by
/// `lambda c` (componentwise, exact).
pub fn soft_threshold_family(space: Space, c: f64) -> Result<OperatorFamily> {
    if !(c >= 0.0) {
        return Err(Error::ParamRange(format!("threshold weight must be >= 0, got {c}")));
    }
    Ok(OperatorFamily::new(
        space,
        "soft_threshold",
        f64::INFINITY,
        Arc::new(move |_t, l, x: &[f64]| {
            Ok(x.iter().map(|&v| v.signum() * (v.abs() - l * c).max(0.0)).collect())
        }),
    )
    .mark_autonomous())
}

/// Damped rotation in the plane: `M = [[a, -theta], [theta, a]]` with
/// `a <= 0`; the resolvent inverts `I - lambda M` in closed form.
pub fn rotation_damped_family(a: f64, theta: f64) -> Result<OperatorFamily> {
    if a > 0.0 {
        return Err(Error::ParamRange(format!("damping must satisfy a <= 0, got {a}")));
    }
    Ok(OperatorFamily::new(
        Space::new(2, NormKind::Euclidean)?,
        "rotation_damped",
        f64::INFINITY,
        Arc::new(move |_t, l, x: &[f64]| {
            let p = 1.0 - l * a;
            let q = l * theta;
            let det = p * p + q * q;
            Ok(vec![(p * x[0] - q * x[1]) / det, (q * x[0] + p * x[1]) / det])
        }),
    )
    .mark_autonomous())
}

/// Scalar decay with time-varying rate: `A(t) u = -(1 + sin(t)/2) u`.
/// Its continuity control is `h(t) = sin t` with growth `L(r) = r/2`:
/// resolvent differences across times are bounded by
/// `lambda |sin t1 - sin t2| * |x|/2` after one resolvent step.
pub fn scalar_timevar_decay_family() -> OperatorFamily {
    let control = ControlData::new(
        Arc::new(|t: f64| vec![t.sin()]),
        Space::scalar(),
        Arc::new(|r| 0.5 * r),
    )
    .with_sup_bounds(1.0, 0.0);
    OperatorFamily::new(
        Space::scalar(),
        "scalar_timevar_decay",
        f64::INFINITY,
        Arc::new(|t, l, x: &[f64]| {
            let rate = 1.0 + 0.5 * t.sin();
            Ok(vec![x[0] / (1.0 + l * rate)])
        }),
    )
    .with_control(control)
}

// ---------------------------------------------------------------------------
// Problems
// ---------------------------------------------------------------------------

/// An evolution problem `u'(t) in A(t) u(t) + omega u(t) + f(t)`.
#[derive(Clone)]
pub struct EvolutionProblem {
    pub family: OperatorFamily,
    pub omega: f64,
    /// Forcing term; `None` means zero.
    pub forcing: Option<TimeFn>,
    /// Initial value for half-line problems.
    pub u0: Option<Vec<f64>>,
}

impl EvolutionProblem {
    pub fn new(family: OperatorFamily, omega: f64) -> Self {
        EvolutionProblem { family, omega, forcing: None, u0: None }
    }

    pub fn with_forcing(mut self, f: TimeFn) -> Self {
        self.forcing = Some(f);
        self
    }

    pub fn with_initial(mut self, u0: Vec<f64>) -> Self {
        self.u0 = Some(u0);
        self
    }

    pub fn space(&self) -> Space {
        self.family.space()
    }

    /// Forcing at time `t` (zero vector when absent).
    pub fn forcing_at(&self, t: f64) -> Vec<f64> {
        match &self.forcing {
            Some(f) => f(t),
            None => vec![0.0; self.family.space().dim()],
        }
    }
}
