//! One-dimensional convolution resolvents with exponential kernels.
//!
//! Two closed forms, each turning an implicit convolution equation into an
//! explicit weighted integral of the data:
//!
//! * infinite memory (`0 < alpha < beta`): the unique bounded solution of
//!
//!   ```text
//!   u(t) = f(t) + alpha * integral_0^inf e^{-beta tau} u(t - tau) dtau
//!   ```
//!
//!   is `u = f + alpha * integral_0^inf e^{-(beta - alpha) tau} f(t - tau) dtau`;
//!
//! * finite window (`alpha > 0`, any real `beta`, window start `a`):
//!   solutions of
//!
//!   ```text
//!   u(t) = f(t) + alpha * integral_a^t e^{-beta (t - tau)} u(tau) dtau
//!   ```
//!
//!   are given by `u = f + alpha * integral_a^t e^{(alpha - beta)(t - tau)} f(tau) dtau`,
//!   and the same weighted integral *majorizes* every sub-solution (data
//!   satisfying the equation with `<=`), which is how it appears inside
//!   stability proofs.
//!
//! Both routes march with the exact piecewise-linear kernel weights, so
//! positivity of the data is preserved exactly.

use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::kernel::cumulative_conv;
use crate::solver::LeftExtension;

/// Apply the infinite-memory resolvent.  `left_extension` says how `f`
/// continues to the left of its window (`Freeze` for settled data, `Zero`
/// for data vanishing in the past).
pub fn resolve_conv_infinite(
    f: &SampledCurve,
    alpha: f64,
    beta: f64,
    left_extension: LeftExtension,
) -> Result<SampledCurve> {
    if !(alpha > 0.0 && alpha < beta) {
        return Err(Error::ParamRange(format!(
            "infinite-memory resolvent needs 0 < alpha < beta, got alpha = {alpha}, beta = {beta}"
        )));
    }
    let rate = beta - alpha;
    weighted_tail_sum(f, alpha, rate, left_extension)
}

/// Sup-norm defect of the infinite-memory equation for a candidate `u`,
/// measured at nodes from `from` on (the left edge carries extension bias
/// at scale `e^{-beta (t - t0)}`, so callers skip a burn-in).
pub fn conv_infinite_residual(
    u: &SampledCurve,
    f: &SampledCurve,
    alpha: f64,
    beta: f64,
    left_extension: LeftExtension,
    from: f64,
) -> Result<f64> {
    if u.grid() != f.grid() {
        return Err(Error::MismatchedProblems("curves must share their grid".into()));
    }
    let memory = memory_integral(u, beta, left_extension);
    let grid = u.grid();
    let space = u.space();
    let d = space.dim();
    let start = grid.nearest_node(from)?;
    let mut worst = 0.0f64;
    for k in start..grid.len() {
        let mut diff = vec![0.0; d];
        for i in 0..d {
            diff[i] = u.node(k)[i] - f.node(k)[i] - alpha * memory[k * d + i];
        }
        worst = worst.max(space.norm_unchecked(&diff));
    }
    Ok(worst)
}

/// `integral_0^inf e^{-rate tau} c(t - tau) dtau` at every node, with the
/// chosen left extension.
fn memory_integral(c: &SampledCurve, rate: f64, left_extension: LeftExtension) -> Vec<f64> {
    let grid = c.grid();
    let d = c.space().dim();
    let interior = cumulative_conv(c, -rate);
    let left = c.node(0).to_vec();
    let mut out = interior;
    if left_extension == LeftExtension::Freeze {
        for (k, t) in grid.times().enumerate() {
            let tail = (-(t - grid.t_start()) * rate).exp() / rate;
            for i in 0..d {
                out[k * d + i] += tail * left[i];
            }
        }
    }
    out
}

/// `f + alpha * integral_0^inf e^{-rate tau} f(t - tau) dtau` at every node.
fn weighted_tail_sum(
    f: &SampledCurve,
    alpha: f64,
    rate: f64,
    left_extension: LeftExtension,
) -> Result<SampledCurve> {
    let grid = f.grid();
    let space = f.space();
    let d = space.dim();
    let memory = memory_integral(f, rate, left_extension);
    let mut values = vec![0.0f64; grid.len() * d];
    for k in 0..grid.len() {
        for i in 0..d {
            values[k * d + i] = f.node(k)[i] + alpha * memory[k * d + i];
        }
    }
    SampledCurve::from_values(grid, space, values)
}

/// Apply the finite-window resolvent from the left edge of `f`'s window.
pub fn resolve_conv_finite(f: &SampledCurve, alpha: f64, beta: f64) -> Result<SampledCurve> {
    if !(alpha > 0.0) {
        return Err(Error::ParamRange(format!(
            "finite-window resolvent needs alpha > 0, got {alpha}"
        )));
    }
    let grid = f.grid();
    let space = f.space();
    let d = space.dim();
    let weighted = cumulative_conv(f, alpha - beta);
    let mut values = vec![0.0f64; grid.len() * d];
    for k in 0..grid.len() {
        for i in 0..d {
            values[k * d + i] = f.node(k)[i] + alpha * weighted[k * d + i];
        }
    }
    SampledCurve::from_values(grid, space, values)
}

/// Sup-norm defect of the finite-window equation for a candidate `u`.
pub fn conv_finite_residual(
    u: &SampledCurve,
    f: &SampledCurve,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    if u.grid() != f.grid() {
        return Err(Error::MismatchedProblems("curves must share their grid".into()));
    }
    let grid = u.grid();
    let space = u.space();
    let d = space.dim();
    let memory = cumulative_conv(u, -beta);
    let mut worst = 0.0f64;
    for k in 0..grid.len() {
        let mut diff = vec![0.0; d];
        for i in 0..d {
            diff[i] = u.node(k)[i] - f.node(k)[i] - alpha * memory[k * d + i];
        }
        worst = worst.max(space.norm_unchecked(&diff));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Grid;
    use crate::space::Space;

    /// Constant data: the infinite-memory resolvent of `f == c` is
    /// `c * (1 + alpha/(beta - alpha)) = c * beta/(beta - alpha)`.
    #[test]
    fn infinite_resolvent_of_constant() {
        let grid = Grid::new(0.0, 10.0, 501).unwrap();
        let f = SampledCurve::constant(grid, Space::scalar(), &[2.0]).unwrap();
        let u = resolve_conv_infinite(&f, 1.0, 3.0, LeftExtension::Freeze).unwrap();
        for k in 0..grid.len() {
            assert!((u.node(k)[0] - 3.0).abs() < 1e-12, "node {k}: {}", u.node(k)[0]);
        }
    }

    /// The output must satisfy the defining equation it came from.
    #[test]
    fn infinite_resolvent_satisfies_its_equation() {
        let grid = Grid::new(0.0, 30.0, 3001).unwrap();
        let f =
            SampledCurve::from_fn(grid, Space::scalar(), |t| vec![(0.7 * t).sin() + 1.5]).unwrap();
        let (alpha, beta) = (0.8, 2.0);
        let u = resolve_conv_infinite(&f, alpha, beta, LeftExtension::Freeze).unwrap();
        let res = conv_infinite_residual(&u, &f, alpha, beta, LeftExtension::Freeze, 12.0).unwrap();
        // dt = 0.01, kernel scale 1/beta: interpolation error ~ dt^2 terms.
        assert!(res < 2e-4, "residual {res}");
    }

    /// Gronwall benchmark: u <= 1 + alpha * int_0^t u  gives  u <= e^{alpha t}.
    #[test]
    fn finite_resolvent_reproduces_gronwall_growth() {
        let grid = Grid::new(0.0, 3.0, 1501).unwrap();
        let f = SampledCurve::constant(grid, Space::scalar(), &[1.0]).unwrap();
        let u = resolve_conv_finite(&f, 1.25, 0.0).unwrap();
        for (k, t) in grid.times().enumerate() {
            let want = (1.25 * t).exp();
            assert!(
                (u.node(k)[0] - want).abs() < 1e-5 * want,
                "t = {t}: {} vs {want}",
                u.node(k)[0]
            );
        }
    }

    #[test]
    fn finite_resolvent_satisfies_its_equation() {
        let grid = Grid::new(0.0, 4.0, 2001).unwrap();
        let f = SampledCurve::from_fn(grid, Space::scalar(), |t| vec![t.cos()]).unwrap();
        let (alpha, beta) = (0.6, 1.7);
        let u = resolve_conv_finite(&f, alpha, beta).unwrap();
        let res = conv_finite_residual(&u, &f, alpha, beta).unwrap();
        assert!(res < 5e-7, "residual {res}");
    }

    #[test]
    fn positivity_is_preserved_exactly() {
        let grid = Grid::new(0.0, 5.0, 301).unwrap();
        let f = SampledCurve::from_fn(grid, Space::scalar(), |t| {
            vec![(t.sin() + 1.0) * (0.3 * t).cos().abs()]
        })
        .unwrap();
        let ui = resolve_conv_infinite(&f, 0.5, 1.0, LeftExtension::Zero).unwrap();
        let uf = resolve_conv_finite(&f, 0.5, -0.5).unwrap();
        for k in 0..grid.len() {
            assert!(ui.node(k)[0] >= 0.0);
            assert!(uf.node(k)[0] >= f.node(k)[0] - 1e-15); // alpha∫ >= 0 too
        }
    }

    #[test]
    fn infinite_resolvent_rejects_bad_rates() {
        let grid = Grid::new(0.0, 1.0, 11).unwrap();
        let f = SampledCurve::constant(grid, Space::scalar(), &[1.0]).unwrap();
        assert!(resolve_conv_infinite(&f, 2.0, 1.0, LeftExtension::Freeze).is_err());
        assert!(resolve_conv_infinite(&f, -0.1, 1.0, LeftExtension::Freeze).is_err());
    }
}
