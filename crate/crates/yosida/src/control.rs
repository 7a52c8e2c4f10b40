//! Continuity-control data for time-dependent operator families.
//!
//! A family `A(t)` qualifies for the solvers here when its time dependence is
//! controlled by a modulus pair: a curve `h` into a normed space and a
//! nondecreasing growth function `L` such that resolvent outputs at nearby
//! times differ by at most `|h(t) - h(s)| L(|x|)` (plus, in the extended
//! regime, a second scalar modulus `g` weighted by the local slope).
//! The `omega`-shifted problem uses the combined modulus
//!
//! ```text
//! dist_omega(t, s) = |h(t) - h(s)| + |omega| |g(t) - g(s)|
//! L_omega(r)       = L(r) + r
//! ```
//!
//! (product one-norm in the pair, growth raised by the identity).

use crate::space::Space;
use std::sync::Arc;

/// Vector-valued function of time.
pub type TimeFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// Scalar function of time (or of a radius, for growth moduli).
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Continuity controls `(h, L)` — and optionally `g` — for a family.
#[derive(Clone)]
pub struct ControlData {
    /// Modulus curve `h`; lives in its own space.
    pub h: TimeFn,
    pub h_space: Space,
    /// Nondecreasing growth function `L`.
    pub growth: ScalarFn,
    /// Optional second modulus for slope-weighted time dependence.
    pub g: Option<ScalarFn>,
    /// Declared Lipschitz constant of `g`, when `g` is present.  The
    /// whole-line solvability condition in the extended regime compares it
    /// against `-omega`.
    pub lip_g: f64,
    /// Optional declared sup bounds, for the uniform two-sided slope bound.
    pub sup_h: Option<f64>,
    pub sup_g: Option<f64>,
}

impl ControlData {
    /// Control with modulus curve `h` and growth `L`, no second modulus.
    pub fn new(h: TimeFn, h_space: Space, growth: ScalarFn) -> Self {
        ControlData { h, h_space, growth, g: None, lip_g: 0.0, sup_h: None, sup_g: None }
    }

    /// Control for an autonomous family: constant `h`, so every modulus
    /// distance vanishes; `L(r) = r` as a concrete monotone choice.
    pub fn autonomous() -> Self {
        ControlData {
            h: Arc::new(|_| vec![0.0]),
            h_space: Space::scalar(),
            growth: Arc::new(|r| r),
            g: None,
            lip_g: 0.0,
            sup_h: Some(0.0),
            sup_g: Some(0.0),
        }
    }

    pub fn with_g(mut self, g: ScalarFn, lip_g: f64) -> Self {
        self.g = Some(g);
        self.lip_g = lip_g;
        self
    }

    pub fn with_sup_bounds(mut self, sup_h: f64, sup_g: f64) -> Self {
        self.sup_h = Some(sup_h);
        self.sup_g = Some(sup_g);
        self
    }

    /// `|h(t) - h(s)|` in the modulus space.
    pub fn h_dist(&self, t: f64, s: f64) -> f64 {
        let ht = (self.h)(t);
        let hs = (self.h)(s);
        self.h_space.norm_diff_unchecked(&ht, &hs)
    }

    /// `|g(t) - g(s)|`, zero when no second modulus is declared.
    pub fn g_dist(&self, t: f64, s: f64) -> f64 {
        match &self.g {
            Some(g) => (g(t) - g(s)).abs(),
            None => 0.0,
        }
    }
}

/// The `omega`-shifted view of a control.
#[derive(Clone)]
pub struct PerturbedControl {
    pub control: ControlData,
    pub omega: f64,
}

impl PerturbedControl {
    pub fn new(control: ControlData, omega: f64) -> Self {
        PerturbedControl { control, omega }
    }

    /// Combined modulus distance `|h(t) - h(s)| + |omega| |g(t) - g(s)|`.
    pub fn dist(&self, t: f64, s: f64) -> f64 {
        self.control.h_dist(t, s) + self.omega.abs() * self.control.g_dist(t, s)
    }

    /// Raised growth `L_omega(r) = L(r) + r`.
    pub fn growth(&self, r: f64) -> f64 {
        (self.control.growth)(r) + r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn autonomous_control_has_zero_moduli() {
        let c = ControlData::autonomous();
        assert_eq!(c.h_dist(0.0, 17.3), 0.0);
        assert_eq!(c.g_dist(-2.0, 5.0), 0.0);
    }

    #[test]
    fn perturbed_distance_combines_with_one_norm() {
        let c = ControlData::new(
            Arc::new(|t: f64| vec![t]),
            Space::scalar(),
            Arc::new(|r: f64| r),
        )
        .with_g(Arc::new(|t: f64| 2.0 * t), 2.0);
        let p = PerturbedControl::new(c, -3.0);
        // |h(1)-h(0)| + 3 |g(1)-g(0)| = 1 + 3*2 = 7.
        assert!((p.dist(1.0, 0.0) - 7.0).abs() < 1e-15);
        assert!((p.growth(2.0) - 4.0).abs() < 1e-15);
    }
}
