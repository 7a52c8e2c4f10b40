//! Gauss–Legendre quadrature: fixed panels, adaptive refinement, and
//! half-infinite integrals of exponentially decaying integrands.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Error-control knobs for the adaptive integrators.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadratureBudget {
    /// Absolute tolerance on the final value.
    pub abs_tol: f64,
    /// Relative tolerance on the final value (whichever is looser wins).
    pub rel_tol: f64,
    /// Bisection depth cap for adaptive refinement.
    pub max_depth: usize,
}

impl Default for QuadratureBudget {
    fn default() -> Self {
        QuadratureBudget { abs_tol: 1e-10, rel_tol: crate::tol::QUAD_REL_TOL, max_depth: 40 }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, computed once per order by
/// Newton iteration on the Legendre polynomial (Chebyshev initial guesses,
/// machine-precision roots in 3–4 steps).
pub fn gauss_legendre(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<std::sync::Mutex<std::collections::HashMap<usize, &'static (Vec<f64>, Vec<f64>)>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| std::sync::Mutex::new(std::collections::HashMap::new()));
    let mut map = cache.lock().unwrap();
    if let Some(rw) = map.get(&n) {
        return rw;
    }
    let computed: &'static (Vec<f64>, Vec<f64>) = Box::leak(Box::new(compute_gl(n)));
    map.insert(n, computed);
    computed
}

fn compute_gl(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre order must be at least 1");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P'_n(x).
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Single Gauss–Legendre panel over `[a, b]`.
pub fn integrate_gl(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, order: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        sum += w * f(mid + half * x);
    }
    half * sum
}

/// Composite Gauss–Legendre with `cells` equal panels.
pub fn integrate_cells(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    cells: usize,
    order: usize,
) -> f64 {
    let h = (b - a) / cells as f64;
    let mut sum = 0.0;
    for k in 0..cells {
        sum += integrate_gl(f, a + k as f64 * h, a + (k + 1) as f64 * h, order);
    }
    sum
}

const ADAPT_ORDER: usize = 10;

/// Adaptive bisection driven by comparing one panel against its two halves.
/// Returns the value and an error estimate.
pub fn adaptive_1d(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    budget: &QuadratureBudget,
) -> Result<(f64, f64)> {
    // (a, b, one-panel value, depth)
    let whole = integrate_gl(f, a, b, ADAPT_ORDER);
    let mut stack = vec![(a, b, whole, 0usize)];
    let mut total = 0.0f64;
    let mut err = 0.0f64;
    // Panels inherit a tolerance proportional to their share of the interval.
    let span = b - a;
    while let Some((lo, hi, coarse, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = integrate_gl(f, lo, mid, ADAPT_ORDER);
        let right = integrate_gl(f, mid, hi, ADAPT_ORDER);
        let fine = left + right;
        let disc = (fine - coarse).abs();
        let local_tol =
            (budget.abs_tol.max(budget.rel_tol * total.abs())) * ((hi - lo) / span).max(1e-3);
        if disc <= local_tol || depth >= budget.max_depth {
            if depth >= budget.max_depth && disc > local_tol {
                return Err(Error::QuadratureNonConvergence(format!(
                    "panel [{lo}, {hi}] still off by {disc} at depth {depth}"
                )));
            }
            total += fine;
            err += disc;
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    Ok((total, err))
}

/// Adaptive integration over `[breaks[0], breaks[last]]` that never lets a
/// panel straddle an interior breakpoint (kinks, diagonal crossings).
pub fn adaptive_with_breaks(
    f: &mut dyn FnMut(f64) -> f64,
    breaks: &[f64],
    budget: &QuadratureBudget,
) -> Result<(f64, f64)> {
    let mut total = 0.0;
    let mut err = 0.0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let (v, e) = adaptive_1d(f, w[0], w[1], budget)?;
            total += v;
            err += e;
        }
    }
    Ok((total, err))
}

/// Integral over `[a, infinity)` of an integrand decaying at least like
/// `exp(-(x - a) / scale)`: summed over panels of width `2 * scale` until a
/// panel contributes less than `abs_tol / TAIL_CUTOFF_FACTOR`.
/// Returns the value and an error estimate (quadrature + truncation).
pub fn integrate_halfinf(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    scale: f64,
    budget: &QuadratureBudget,
) -> Result<(f64, f64)> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::ParamRange(format!("decay scale must be positive, got {scale}")));
    }
    let width = 2.0 * scale;
    let mut total = 0.0;
    let mut err = 0.0;
    let mut k = 0usize;
    loop {
        let lo = a + k as f64 * width;
        let hi = lo + width;
        let panel_budget = QuadratureBudget {
            abs_tol: budget.abs_tol / (10.0 * (k + 1) as f64 * (k + 1) as f64),
            ..*budget
        };
        let (v, e) = adaptive_1d(f, lo, hi, &panel_budget)?;
        total += v;
        err += e;
        let done = v.abs() < budget.abs_tol / crate::tol::TAIL_CUTOFF_FACTOR && k >= 2;
        if done {
            // The geometric tail of an exp(-x/scale) envelope beyond `hi` is at
            // most the last panel over (e^{width/scale} - 1).
            err += v.abs() / ((width / scale).exp_m1());
            return Ok((total, err));
        }
        k += 1;
        if k > 100_000 {
            return Err(Error::QuadratureNonConvergence(
                "half-infinite panel sum did not decay".into(),
            ));
        }
    }
}

/// Iterated adaptive integral over the box `[x0, x1] x [y0, y1]`, splitting
/// the inner integral at the diagonal `y = x` when asked (the integrands this
/// crate cares about have a kink or ridge there).
pub fn integrate_2d_box(
    f: &dyn Fn(f64, f64) -> f64,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    split_diagonal: bool,
    budget: &QuadratureBudget,
) -> Result<(f64, f64)> {
    let inner_budget = QuadratureBudget {
        abs_tol: budget.abs_tol / (x1 - x0).max(1.0) / 4.0,
        rel_tol: budget.rel_tol / 4.0,
        ..*budget
    };
    let mut inner_err: f64 = 0.0;
    let mut outer = |x: f64| -> f64 {
        let mut g = |y: f64| f(x, y);
        let r = if split_diagonal && x > y0 && x < y1 {
            adaptive_with_breaks(&mut g, &[y0, x, y1], &inner_budget)
        } else {
            adaptive_1d(&mut g, y0, y1, &inner_budget)
        };
        match r {
            Ok((v, e)) => {
                inner_err = inner_err.max(e);
                v
            }
            // Inner failures surface as NaN and trip the outer estimate.
            Err(_) => f64::NAN,
        }
    };
    let (v, e) = adaptive_1d(&mut outer, x0, x1, budget)?;
    if !v.is_finite() {
        return Err(Error::QuadratureNonConvergence("inner integral failed".into()));
    }
    Ok((v, e + inner_err * (x1 - x0)))
}

/// Iterated adaptive integral over the quarter plane `[0, inf)^2` for
/// integrands whose inner and outer decay scales are known, with the same
/// optional diagonal split.
pub fn integrate_2d_quarterplane(
    f: &dyn Fn(f64, f64) -> f64,
    x_scale: f64,
    y_scale: f64,
    split_diagonal: bool,
    budget: &QuadratureBudget,
) -> Result<(f64, f64)> {
    let inner_budget =
        QuadratureBudget { abs_tol: budget.abs_tol / 20.0, rel_tol: budget.rel_tol / 4.0, ..*budget };
    let mut inner_err: f64 = 0.0;
    let mut failed = false;
    let mut outer = |x: f64| -> f64 {
        let mut g = |y: f64| f(x, y);
        // Split the inner range at the diagonal by integrating [0, x] with a
        // break, then the exponential tail from x on.
        let r = if split_diagonal && x > 0.0 {
            adaptive_1d(&mut g, 0.0, x, &inner_budget).and_then(|(v1, e1)| {
                integrate_halfinf(&mut g, x, y_scale, &inner_budget).map(|(v2, e2)| (v1 + v2, e1 + e2))
            })
        } else {
            integrate_halfinf(&mut g, 0.0, y_scale, &inner_budget)
        };
        match r {
            Ok((v, e)) => {
                inner_err = inner_err.max(e);
                v
            }
            Err(_) => {
                failed = true;
                0.0
            }
        }
    };
    let (v, e) = integrate_halfinf(&mut outer, 0.0, x_scale, budget)?;
    if failed {
        return Err(Error::QuadratureNonConvergence("inner integral failed".into()));
    }
    Ok((v, e + inner_err * 4.0 * x_scale))
}
