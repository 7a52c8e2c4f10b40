//! Modified Bessel functions `I0`, `I1`, and the entire kernel helpers
//! `b0(z) = I0(2 sqrt z)`, `b1(z) = I1(2 sqrt z)/sqrt z`.
//!
//! The two-dimensional resolvent kernels of this crate are built from `b0`
//! and `b1` of nonnegative products, which avoids square roots of signed
//! quantities and keeps the identities `d/dz b0 = b1` and
//! `b1 + z b1' = b0` free of removable singularities.
//!
//! Evaluation strategy: the defining power series up to [`BESSEL_SWITCH`]
//! (all terms positive, no cancellation), and the large-argument expansion
//! `e^x/sqrt(2 pi x) * sum_k c_k x^{-k}` beyond, truncated at its smallest
//! term.  Accuracy is verified in `tests/resolvents.rs` against a frozen
//! high-precision table (generated by `tools/gen_reference_values.py`) to
//! [`crate::tol::BESSEL_REL_TOL`].

use crate::tol::BESSEL_SWITCH;

/// Modified Bessel function of the first kind, order 0.
pub fn bessel_i0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= BESSEL_SWITCH {
        i0_series(ax)
    } else {
        asymptotic(ax, 0.0)
    }
}

/// Modified Bessel function of the first kind, order 1 (odd in `x`).
pub fn bessel_i1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= BESSEL_SWITCH { i1_series(ax) } else { asymptotic(ax, 4.0) };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// `e^{-|x|} I0(x)`: the scaled variant that stays O(1) for large arguments.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= BESSEL_SWITCH {
        (-ax).exp() * i0_series(ax)
    } else {
        asymptotic_scaled(ax, 0.0)
    }
}

/// `e^{-|x|} I1(|x|)`.
pub fn bessel_i1_scaled(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= BESSEL_SWITCH {
        (-ax).exp() * i1_series(ax)
    } else {
        asymptotic_scaled(ax, 4.0)
    }
}

/// `b0(z) = I0(2 sqrt z) = sum z^k / (k!)^2` for `z >= 0`.
pub fn b0(z: f64) -> f64 {
    debug_assert!(z >= 0.0, "b0 takes nonnegative arguments, got {z}");
    if 4.0 * z <= BESSEL_SWITCH * BESSEL_SWITCH {
        // Direct series; converged by k ~ 2 sqrt(z) + margin.
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > sum * 1e-17 {
            term *= z / (k * k);
            sum += term;
            k += 1.0;
            if k > 400.0 {
                break;
            }
        }
        sum
    } else {
        asymptotic(2.0 * z.sqrt(), 0.0)
    }
}

/// `b1(z) = I1(2 sqrt z)/sqrt z = sum z^k / (k! (k+1)!)` for `z >= 0`,
/// with `b1(0) = 1`.
pub fn b1(z: f64) -> f64 {
    debug_assert!(z >= 0.0, "b1 takes nonnegative arguments, got {z}");
    if 4.0 * z <= BESSEL_SWITCH * BESSEL_SWITCH {
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > sum * 1e-17 {
            term *= z / (k * (k + 1.0));
            sum += term;
            k += 1.0;
            if k > 400.0 {
                break;
            }
        }
        sum
    } else {
        let s = z.sqrt();
        asymptotic(2.0 * s, 4.0) / s
    }
}

/// The weighted kernel `I0(2 sqrt(x y)) e^{-x-y}` for `x, y >= 0`, evaluated
/// without overflow: `I0(2s) e^{-2s}` stays O(1) and the remaining factor is
/// `e^{-(sqrt x - sqrt y)^2} <= 1`.
pub fn kernel_i0_weighted(x: f64, y: f64) -> f64 {
    debug_assert!(x >= 0.0 && y >= 0.0);
    let (sx, sy) = (x.sqrt(), y.sqrt());
    bessel_i0_scaled(2.0 * sx * sy) * (-(sx - sy) * (sx - sy)).exp()
}

/// Same stable product for the `y`-derivative kernel
/// `d/dy I0(2 sqrt(x y)) e^{-x-y} = x b1(x y) e^{-x-y}`.
pub fn kernel_dy_i0_weighted(x: f64, y: f64) -> f64 {
    debug_assert!(x >= 0.0 && y >= 0.0);
    let (sx, sy) = (x.sqrt(), y.sqrt());
    let p = 2.0 * sx * sy;
    let damp = (-(sx - sy) * (sx - sy)).exp();
    if p <= BESSEL_SWITCH {
        x * b1(x * y) * (-x - y).exp()
    } else {
        // x * b1(xy) = x * I1(2 sqrt(xy)) / sqrt(xy) = sqrt(x/y) * I1(p).
        (x / y).sqrt() * bessel_i1_scaled(p) * damp
    }
}

fn i0_series(ax: f64) -> f64 {
    let q = 0.25 * ax * ax;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > sum * 1e-17 {
        term *= q / (k * k);
        sum += term;
        k += 1.0;
        if k > 400.0 {
            break;
        }
    }
    sum
}

fn i1_series(ax: f64) -> f64 {
    let q = 0.25 * ax * ax;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > sum * 1e-17 {
        term *= q / (k * (k + 1.0));
        sum += term;
        k += 1.0;
        if k > 400.0 {
            break;
        }
    }
    0.5 * ax * sum
}

/// Large-argument expansion `I_nu(x) ~ e^x/sqrt(2 pi x) sum_k c_k`, with
/// `c_0 = 1`, `c_{k+1} = -c_k (mu - (2k+1)^2) / (8 (k+1) x)`, `mu = 4 nu^2`.
/// The divergent tail is truncated at its smallest term.
fn asymptotic(x: f64, mu: f64) -> f64 {
    x.exp() * asymptotic_sum(x, mu) / (2.0 * std::f64::consts::PI * x).sqrt()
}

fn asymptotic_scaled(x: f64, mu: f64) -> f64 {
    asymptotic_sum(x, mu) / (2.0 * std::f64::consts::PI * x).sqrt()
}

fn asymptotic_sum(x: f64, mu: f64) -> f64 {
    let mut c = 1.0;
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..30u32 {
        let kf = k as f64;
        c *= -(mu - (2.0 * kf + 1.0) * (2.0 * kf + 1.0)) / (8.0 * (kf + 1.0) * x);
        if c.abs() >= prev {
            break; // divergent tail turning around
        }
        sum += c;
        prev = c.abs();
        if c.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}
