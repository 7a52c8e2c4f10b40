//! Centralized numerical tolerances.
//!
//! Every hard-coded tolerance used by the solvers and certifiers lives here,
//! with a note on where the number comes from.  Tests that need a looser or
//! tighter margin for a specific, documented reason declare it locally.

/// Absolute tolerance for deciding ties between components competing for the
/// maximum in the sup-norm duality bracket.  Components within this distance
/// of the max are treated as joint maximizers.  1e-12 is ~1e4 ulps at unit
/// scale: far above accumulated rounding, far below any genuine gap.
pub const TIE_TOL_ABS: f64 = 1e-12;

/// Residual tolerance for the damped-Newton solve inside the cubic scalar
/// resolvent.  The iteration is locally quadratic, so this is reached in a
/// handful of steps; it keeps the oracle's error far below every certificate
/// budget that consumes it.
pub const NEWTON_RESIDUAL_TOL: f64 = 1e-12;

/// Convergence tolerance for the per-node implicit solve of the half-line
/// marching scheme, measured as the sup-norm change between sweeps.
pub const LOCAL_NODE_TOL: f64 = 1e-13;

/// Cap on damped fixed-point sweeps per node in the half-line march.  The
/// local map contracts with factor w1/(1-lambda*omega) (see `solver`), so 50
/// sweeps suffice for any factor <= 0.55; the solver additionally refuses
/// configurations whose local factor exceeds [`LOCAL_FACTOR_MAX`].
pub const LOCAL_NODE_MAX_SWEEPS: usize = 50;

/// Largest admissible local contraction factor w1/(1-lambda*omega) for the
/// half-line march.  Beyond this the per-node fixed point converges too
/// slowly (or not at all, for omega > 0 with coarse steps); the solver
/// reports the step size that would fix it instead of grinding.
pub const LOCAL_FACTOR_MAX: f64 = 0.95;

/// Slack added to the a-priori contraction factor 1/(1-lambda*omega) when
/// validating the measured per-iteration ratio of the whole-line iteration.
/// Measured ratios exceeding bound + slack indicate a broken operator
/// oracle (nonexpansiveness failure), not discretization error.
pub const CONTRACTION_SLACK: f64 = 0.02;

/// Slack for the measured outer-iteration ratio of the delay solver against
/// its bound beta/(-omega).  The outer map composes a solve with a history
/// functional, so its measured ratio carries discretization noise of both.
pub const OUTER_CONTRACTION_SLACK: f64 = 0.05;

/// Pure floating-point slack for identities that hold exactly in real
/// arithmetic (resolvent identity, nonexpansiveness, recurrence exactness).
pub const ARITHMETIC_SLACK: f64 = 1e-10;

/// Tight arithmetic slack for single-operation identities (bracket closed
/// forms, norm comparisons) where no error accumulates.
pub const ARITHMETIC_SLACK_TIGHT: f64 = 1e-12;

/// Relative accuracy target for the two modified-Bessel evaluators over
/// their full argument range; verified in tests against an independently
/// generated high-precision table.
pub const BESSEL_REL_TOL: f64 = 1e-10;

/// Ratio of series/asymptotic switch for the modified Bessel functions.
/// Below this argument the power series converges fast with no cancellation
/// (all terms positive); above it the large-argument expansion reaches
/// [`BESSEL_REL_TOL`] before its divergent tail turns around.
pub const BESSEL_SWITCH: f64 = 20.0;

/// Default relative tolerance for adaptive quadrature used by the integral
/// verifiers.  One order below the 1e-6 comparisons built on top of it.
pub const QUAD_REL_TOL: f64 = 1e-8;

/// Factor by which the exponential envelope of a half-infinite integrand
/// must undershoot the absolute tolerance before truncation.
pub const TAIL_CUTOFF_FACTOR: f64 = 10.0;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_ordering_is_sane() {
        assert!(ARITHMETIC_SLACK_TIGHT < ARITHMETIC_SLACK);
        assert!(LOCAL_NODE_TOL < ARITHMETIC_SLACK);
        assert!(NEWTON_RESIDUAL_TOL <= 1e-12);
        assert!(QUAD_REL_TOL < 1e-6);
        assert!(LOCAL_FACTOR_MAX < 1.0);
        assert!(CONTRACTION_SLACK < OUTER_CONTRACTION_SLACK);
    }
}
