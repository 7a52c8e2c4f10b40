//! Exact marching weights for exponential-kernel convolutions.
//!
//! Everything in this crate that integrates a sampled curve against an
//! exponential kernel — the solvers' memory term, the one-dimensional
//! convolution resolvents, the delay machinery — reduces to the cumulative
//! integral
//!
//! ```text
//! I(t) = integral over [a, t] of exp(rate * (t - tau)) f(tau) dtau
//! ```
//!
//! which obeys the one-step recurrence
//!
//! ```text
//! I(t + dt) = exp(rate*dt) * I(t) + cell,
//! cell      = dt * ( w0 * f(t) + w1 * f(t + dt) )      (f linear on the cell)
//! ```
//!
//! with weights that are *exact* for piecewise-linear `f`:
//!
//! ```text
//! z  = rate * dt
//! w0 = (z e^z - e^z + 1) / z^2        (weight of the older node)
//! w1 = (e^z - 1 - z) / z^2            (weight of the newer node)
//! ```
//!
//! Both weights are integrals of nonnegative hat functions against a positive
//! kernel, so they are positive for every real `z`; positivity of inputs is
//! therefore preserved exactly.  Near `z = 0` the closed forms lose digits to
//! cancellation and are replaced by their power series.

use crate::curve::SampledCurve;

/// Switch point between the closed-form weights and their series.  At
/// `|z| = 1/2` the series below is converged to ~1e-20 with 12 terms while
/// the closed form still carries ~1e-15 relative error; either is fine, so
/// the exact location is uncritical.
const SERIES_SWITCH: f64 = 0.5;

/// One-step weights for a fixed kernel rate and step.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ExpCellWeights {
    /// `exp(rate * dt)`: factor carrying the previous cumulative value.
    pub growth: f64,
    /// Weight of the cell's older node, `dt` already folded in.
    pub w0: f64,
    /// Weight of the cell's newer node, `dt` already folded in.
    pub w1: f64,
}

impl ExpCellWeights {
    /// Weights for kernel `exp(rate * (t - tau))` and step `dt > 0`.
    pub fn new(rate: f64, dt: f64) -> Self {
        debug_assert!(dt > 0.0, "step must be positive");
        let z = rate * dt;
        let growth = z.exp();
        let (u0, u1) = if z.abs() < SERIES_SWITCH {
            // w0 = sum z^k (k+1)/(k+2)!,  w1 = sum z^k /(k+2)!   (k >= 0)
            let mut u0 = 0.0;
            let mut u1 = 0.0;
            let mut zp = 1.0;
            let mut fact = 2.0; // (k+2)! running value
            for k in 0..14u32 {
                u0 += zp * (k + 1) as f64 / fact;
                u1 += zp / fact;
                zp *= z;
                fact *= (k + 3) as f64;
            }
            (u0, u1)
        } else {
            let em1 = z.exp_m1();
            // z e^z - e^z + 1 = (z - 1) * (e^z - 1) + z
            (((z - 1.0) * em1 + z) / (z * z), (em1 - z) / (z * z))
        };
        ExpCellWeights { growth, w0: dt * u0, w1: dt * u1 }
    }

    /// Advance componentwise, in place: `acc <- growth*acc + w0*f_old + w1*f_new`.
    #[inline]
    pub fn step_vec(&self, acc: &mut [f64], f_old: &[f64], f_new: &[f64]) {
        for ((a, o), n) in acc.iter_mut().zip(f_old).zip(f_new) {
            *a = self.growth * *a + self.w0 * *o + self.w1 * *n;
        }
    }
}

/// Cumulative convolution of a sampled curve from its left endpoint:
/// `I(t_k) = integral over [t_0, t_k] of exp(rate (t_k - tau)) f(tau) dtau`,
/// returned node-major like the curve's own buffer.  `I(t_0) = 0`.
pub(crate) fn cumulative_conv(f: &SampledCurve, rate: f64) -> Vec<f64> {
    let d = f.space().dim();
    let n = f.grid().len();
    let w = ExpCellWeights::new(rate, f.grid().dt());
    let mut out = vec![0.0; n * d];
    let mut acc = vec![0.0; d];
    for k in 0..n - 1 {
        w.step_vec(&mut acc, f.node(k), f.node(k + 1));
        out[(k + 1) * d..(k + 2) * d].copy_from_slice(&acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Grid;
    use crate::space::Space;

    /// `(e^z - 1)/z`, well-conditioned for all z (series below 1/2).
    fn e1(z: f64) -> f64 {
        if z.abs() < 0.5 {
            let mut s = 0.0;
            let mut zp = 1.0;
            let mut fact = 1.0; // (k+1)! running value
            for k in 0..14u32 {
                s += zp / fact;
                zp *= z;
                fact *= (k + 2) as f64;
            }
            s
        } else {
            z.exp_m1() / z
        }
    }

    /// `(e^z - 1 - z)/z^2`, well-conditioned for all z (series below 1/2).
    fn e2(z: f64) -> f64 {
        if z.abs() < 0.5 {
            let mut s = 0.0;
            let mut zp = 1.0;
            let mut fact = 2.0; // (k+2)! running value
            for k in 0..14u32 {
                s += zp / fact;
                zp *= z;
                fact *= (k + 3) as f64;
            }
            s
        } else {
            (z.exp_m1() - z) / (z * z)
        }
    }

    /// Closed form of `integral over [0,t] of exp(rate (t-tau)) (a + b tau) dtau`,
    /// written with the cancellation-free ratios above so it stays accurate to
    /// ~1e-15 relative even when `rate * t` is tiny.
    fn affine_conv_exact(rate: f64, a: f64, b: f64, t: f64) -> f64 {
        let z = rate * t;
        a * t * e1(z) + b * t * t * e2(z)
    }

    #[test]
    fn recurrence_is_exact_on_affine_data() {
        for &rate in &[-40.0, -3.0, -0.7, -1e-4, 1e-4, 0.9, 2.5] {
            let grid = Grid::new(0.0, 2.0, 41).unwrap();
            let (a, b) = (0.7, -1.3);
            let f = SampledCurve::from_fn(grid, Space::scalar(), |t| vec![a + b * t]).unwrap();
            let acc = cumulative_conv(&f, rate);
            for (k, t) in grid.times().enumerate() {
                let exact = affine_conv_exact(rate, a, b, t);
                let scale = 1.0 + exact.abs();
                assert!(
                    (acc[k] - exact).abs() <= 1e-12 * scale,
                    "rate {rate} node {k}: got {} want {exact}",
                    acc[k]
                );
            }
        }
    }

    #[test]
    fn weights_are_positive_for_both_signs() {
        for &rate in &[-100.0, -1.0, -1e-6, 1e-300, 1e-6, 1.0, 50.0] {
            let w = ExpCellWeights::new(rate, 0.05);
            assert!(w.w0 > 0.0, "rate {rate}: w0 = {}", w.w0);
            assert!(w.w1 > 0.0, "rate {rate}: w1 = {}", w.w1);
        }
    }

    #[test]
    fn series_matches_closed_form_near_the_switch() {
        // Just below the switch the constructor takes the series branch; the
        // closed form is still well-conditioned there (cancellation costs a
        // digit at most), so the two routes must agree to ~1e-14.
        for &z in &[-0.4999f64, -0.25, 0.25, 0.4999] {
            let dt = 0.3;
            let w = ExpCellWeights::new(z / dt, dt);
            let em1 = z.exp_m1();
            let w0 = dt * ((z - 1.0) * em1 + z) / (z * z);
            let w1 = dt * (em1 - z) / (z * z);
            assert!((w.w0 - w0).abs() <= 1e-13 * dt, "z {z}: {} vs {w0}", w.w0);
            assert!((w.w1 - w1).abs() <= 1e-13 * dt, "z {z}: {} vs {w1}", w.w1);
        }
    }

    #[test]
    fn trapezoid_limit_at_zero_rate() {
        let w = ExpCellWeights::new(0.0, 0.2);
        assert!((w.w0 - 0.1).abs() < 1e-15);
        assert!((w.w1 - 0.1).abs() < 1e-15);
        assert_eq!(w.growth, 1.0);
    }
}
