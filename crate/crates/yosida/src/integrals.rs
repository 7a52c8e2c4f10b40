//! Certified evaluation of a family of Bessel-kernel integrals.
//!
//! Everything here revolves around the weighted kernel
//! `K(x, y) = I0(2 sqrt(x y)) e^{-x-y}` and its relatives.  The checked
//! statements come in eight numbered items:
//!
//! 1. the box average `(1/R^2) int_{[0,R]^2} K |x-y|` decays as `R` grows;
//! 2. `int_{[0,inf)^2} I0(2 sqrt(x y)) e^{-(1+lw)x-(1+mw)y}` equals
//!    `1/(w L)` with `L = l + m + l m w` (rates `l, m, w > 0`);
//! 3. `l m int_{[0,inf)^2} |x-y| K e^{-w(lx+my)}` decays as `l = m` shrinks;
//! 4. the box average `(1/R) int_{[0,R]^2} K` never exceeds 1;
//! 5. the box average `(1/R^2) int_{[0,R]^2} K` decays as `R` grows;
//! 6. the same decay holds with `K` replaced by the derivative kernel
//!    `x b1(x y) e^{-x-y}`;
//! 7. the mass of the scaled kernel `I0(2 sqrt(x y)/L) e^{-((1+lw)x+(1+mw)y)/L}`
//!    outside the box `[0,t]^2`, prefixed by `l m / L^3`, decays in `t`
//!    uniformly over the rates;
//! 8. the same prefixed integral against any bounded input that vanishes on
//!    compact sets (canonically `g_n(x,y) = min(1, (x^2+y^2)/n^2)`) decays in
//!    `n` uniformly over the rates.
//!
//! Each item produces a [`Certificate`] whose samples record the computed
//! values, the stored high-precision checkpoints where one exists, and the
//! structural inequalities (monotone decay, upper bounds, closed-form strip
//! envelopes).  [`check_interchange`] certifies the companion statement that
//! reordering the triple convolution integral can only grow its value.

use crate::bessel::{kernel_dy_i0_weighted, kernel_i0_weighted};
use crate::certificate::{BudgetBreakdown, CertSample, Certificate};
use crate::error::{Error, Result};
use crate::quad::{adaptive_with_breaks, gauss_legendre, integrate_2d_box, integrate_halfinf, QuadratureBudget};

/// Rates for the kernel-integral family, all strictly positive, with the
/// combined scale `capital() = lambda + mu + lambda mu omega`.  This is the
/// positive-`omega` convention; the averaging operator in
/// [`TlmParams`](crate::TlmParams) uses strictly negative `omega` and a
/// different combined scale, and keeping the two conventions in separate
/// types prevents sign mistakes when moving between them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelRates {
    pub lambda: f64,
    pub mu: f64,
    pub omega: f64,
}

impl KernelRates {
    pub fn new(lambda: f64, mu: f64, omega: f64) -> Result<Self> {
        for (name, v) in [("lambda", lambda), ("mu", mu), ("omega", omega)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::ParamRange(format!(
                    "kernel rate {name} must be strictly positive and finite, got {v}"
                )));
            }
        }
        Ok(Self { lambda, mu, omega })
    }

    /// Combined scale `lambda + mu + lambda mu omega`.
    pub fn capital(&self) -> f64 {
        self.lambda + self.mu + self.lambda * self.mu * self.omega
    }

    /// Closed form of the full scaled quarter-plane integral
    /// `int_{[0,inf)^2} I0(2 sqrt(x y)/L) e^{-((1+lw)x+(1+mw)y)/L} = L/w`.
    pub fn quarter_plane_value(&self) -> f64 {
        self.capital() / self.omega
    }

    /// Prefactor `lambda mu / L^3` applied to the scaled integrals of items
    /// 7 and 8.
    pub fn tail_prefactor(&self) -> f64 {
        let cap = self.capital();
        self.lambda * self.mu / (cap * cap * cap)
    }

    /// Closed-form upper bound for the prefixed mass outside `[0,t]^2`: the
    /// complement sits inside the union of the two half-strips `x > t` and
    /// `y > t`, and each strip integrates exactly through the half-line
    /// transform `int_0^inf I0(2 sqrt(x y)) e^{-c x} dx = e^{y/c}/c`, giving
    /// `(L/w) e^{-w t/(1+mw)}` and `(L/w) e^{-w t/(1+lw)}`.
    pub fn strip_tail_bound(&self, t: f64) -> f64 {
        let cap = self.capital();
        self.lambda * self.mu / (self.omega * cap * cap)
            * ((-self.omega * t / (1.0 + self.mu * self.omega)).exp()
                + (-self.omega * t / (1.0 + self.lambda * self.omega)).exp())
    }

    fn label(&self) -> String {
        format!("lambda={} mu={} omega={}", self.lambda, self.mu, self.omega)
    }
}

/// Inputs for [`verify_some_integrals`].  The defaults reproduce the stored
/// checkpoints, so every certificate then carries reference comparisons in
/// addition to the structural inequalities.
#[derive(Debug, Clone)]
pub struct IntegralParams {
    /// Box radii for the decay items 1, 5, 6 (increasing).
    pub radii: Vec<f64>,
    /// Box radii for the bound item 4.
    pub bound_radii: Vec<f64>,
    /// Rate triples for items 2, 7, 8.
    pub rate_sets: Vec<KernelRates>,
    /// Shrinking `lambda = mu` sequence for item 3 (decreasing).
    pub shrink_rates: Vec<f64>,
    /// The fixed `omega` for item 3.
    pub shrink_omega: f64,
    /// Box sizes for the tail item 7 (increasing).
    pub tail_times: Vec<f64>,
    /// Indices `n` of the canonical vanishing inputs for item 8 (increasing).
    pub vanish_indices: Vec<u32>,
    /// Base quadrature budget for every numerical integral.
    pub budget: QuadratureBudget,
}

impl Default for IntegralParams {
    fn default() -> Self {
        Self {
            radii: vec![5.0, 10.0, 20.0, 40.0],
            bound_radii: vec![1.0, 5.0, 10.0, 20.0, 40.0],
            rate_sets: vec![
                KernelRates { lambda: 1.0, mu: 1.0, omega: 1.0 },
                KernelRates { lambda: 0.5, mu: 0.25, omega: 2.0 },
            ],
            shrink_rates: vec![0.5, 0.25, 0.125, 0.0625],
            shrink_omega: 1.0,
            tail_times: vec![2.0, 5.0, 10.0, 20.0],
            vanish_indices: vec![1, 2, 4, 8, 16],
            budget: QuadratureBudget { abs_tol: 1e-8, rel_tol: 1e-8, max_depth: 46 },
        }
    }
}

// Stored checkpoints, generated by tools/gen_reference_values.py (mpmath at
// 24 significant digits) and pasted here verbatim.  Keys are the radius, the
// shrinking rate, or the (lambda, mu, omega, t) tuple.

/// Item 1: `(1/R^2) int_{[0,R]^2} K |x-y|`.
const WEIGHTED_BOX_REFS: &[(f64, f64)] = &[
    (5.0, 0.173_863_049_681_125_292_0),
    (10.0, 0.151_193_824_758_188_095_8),
    (20.0, 0.122_927_333_562_479_689_9),
    (40.0, 0.095_612_041_416_022_163_83),
];

/// Items 4 and 5: the raw box integral `int_{[0,R]^2} K` (no prefactor).
const PLAIN_BOX_REFS: &[(f64, f64)] = &[
    (1.0, 0.476_222_388_197_391_301_3),
    (5.0, 3.754_519_907_260_579_370),
    (10.0, 8.227_134_659_318_853_130),
    (20.0, 17.484_789_821_006_452_18),
    (40.0, 36.437_340_326_385_090_28),
];

/// Item 6: `(1/R^2) int_{[0,R]^2} x b1(x y) e^{-x-y} |x-y|`.
const DERIV_BOX_REFS: &[(f64, f64)] = &[
    (5.0, 0.167_856_027_413_751_201_5),
    (10.0, 0.154_376_373_716_697_567_9),
    (20.0, 0.125_544_456_968_018_168_8),
    (40.0, 0.096_915_164_115_713_443_54),
];

/// Item 3 at `omega = 1`, `lambda = mu = a`:
/// `a^2 int_{[0,inf)^2} |x-y| K e^{-a(x+y)}`.
const SHRINK_REFS: &[(f64, f64)] = &[
    (0.5, 0.178_885_438_199_983_175_7),
    (0.25, 0.148_148_148_148_148_148_1),
    (0.125, 0.114_134_411_781_803_752_2),
    (0.0625, 0.084_401_287_736_095_921_54),
];

/// Item 7: the prefixed mass outside `[0,t]^2`, keyed by
/// `(lambda, mu, omega, t)`.
const SCALED_TAIL_REFS: &[(f64, f64, f64, f64, f64)] = &[
    (1.0, 1.0, 1.0, 2.0, 0.062_712_251_284_979_027_27),
    (1.0, 1.0, 1.0, 5.0, 0.016_287_592_180_623_804_97),
    (1.0, 1.0, 1.0, 10.0, 0.001_442_630_727_842_991_752),
    (1.0, 1.0, 1.0, 20.0, 1.003_589_773_741_325_698e-5),
    (0.5, 0.25, 2.0, 2.0, 0.011_147_044_487_067_268_15),
    (0.5, 0.25, 2.0, 5.0, 4.868_949_789_554_654_386e-4),
    (0.5, 0.25, 2.0, 10.0, 2.932_828_773_890_536_288e-6),
    (0.5, 0.25, 2.0, 20.0, 1.289_846_902_000_749_276e-10),
];

fn key_matches(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn lookup_ref(refs: &[(f64, f64)], key: f64) -> Option<f64> {
    refs.iter().find(|(k, _)| key_matches(*k, key)).map(|(_, v)| *v)
}

fn lookup_tail_ref(rates: &KernelRates, t: f64) -> Option<f64> {
    SCALED_TAIL_REFS
        .iter()
        .find(|(l, m, w, tt, _)| {
            key_matches(*l, rates.lambda)
                && key_matches(*m, rates.mu)
                && key_matches(*w, rates.omega)
                && key_matches(*tt, t)
        })
        .map(|(_, _, _, _, v)| *v)
}

/// Lattice of rates over which the closed-form envelopes of items 7 and 8
/// are maximized to witness uniformity in `(lambda, mu)`.
const RATE_LATTICE: [f64; 5] = [0.0625, 0.25, 1.0, 4.0, 16.0];

/// How much the closed-form uniform envelopes must have decayed between the
/// first and last checkpoint for items 7 and 8 to certify.
const ENVELOPE_DECAY_RATIO: f64 = 0.5;

/// Iterated quadrature over the quarter plane in diagonal coordinates
/// `s = x + y`, `d = x - y`: the kernel's exponential ridge along `x = y`
/// becomes a smooth bump in `d` at fixed `s`, and the envelope in `s` is a
/// plain decaying profile that the half-infinite panel sum handles without
/// ever seeing an interior spike that starts below its cutoff.  `s_scale` is
/// the slowest decay scale of the `s`-profile; the inner integral always
/// breaks at `d = 0` so integrands carrying `|x - y|` keep full accuracy.
fn quarterplane_diag(
    f: &dyn Fn(f64, f64) -> f64,
    s_scale: f64,
    budget: &QuadratureBudget,
) -> Result<(f64, f64)> {
    let inner_budget =
        QuadratureBudget { abs_tol: budget.abs_tol / 20.0, rel_tol: budget.rel_tol / 4.0, ..*budget };
    let mut inner_err: f64 = 0.0;
    let mut failed = false;
    let mut outer = |s: f64| -> f64 {
        let mut g = |d: f64| 0.5 * f(0.5 * (s + d), 0.5 * (s - d));
        match adaptive_with_breaks(&mut g, &[-s, 0.0, s], &inner_budget) {
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
    let (v, e) = integrate_halfinf(&mut outer, 0.0, s_scale, budget)?;
    if failed {
        return Err(Error::QuadratureNonConvergence(
            "inner diagonal-coordinate integral failed".into(),
        ));
    }
    Ok((v, e + inner_err * 4.0 * s_scale))
}

/// The raw box integral `int_{[0,R]^2} f` with an optional diagonal split
/// for integrands with a crease at `x = y`.
fn box_integral(
    f: &dyn Fn(f64, f64) -> f64,
    r: f64,
    split_diagonal: bool,
    budget: &QuadratureBudget,
) -> Result<(f64, f64)> {
    integrate_2d_box(f, 0.0, r, 0.0, r, split_diagonal, budget)
}

fn require_increasing(name: &str, xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::Config(format!("{name} must not be empty")));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) || xs.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
        return Err(Error::Config(format!("{name} must be strictly increasing and positive")));
    }
    Ok(())
}

/// Shared shape of items 1, 5, 6: compute a scaled box integral along an
/// increasing radius sequence, compare against stored checkpoints where they
/// exist, and certify monotone decay toward zero.
fn box_decay_certificate(
    name: &str,
    f: &dyn Fn(f64, f64) -> f64,
    split_diagonal: bool,
    scale_power: i32,
    refs: &[(f64, f64)],
    radii: &[f64],
    budget: &QuadratureBudget,
) -> Result<Certificate> {
    require_increasing("radii", radii)?;
    let mut samples = Vec::new();
    let mut quad: f64 = 0.0;
    let mut previous: Option<(f64, f64)> = None;
    for &r in radii {
        let (raw, est) = box_integral(f, r, split_diagonal, budget)?;
        let scale = r.powi(scale_power);
        let value = raw / scale;
        quad = quad.max(est / scale);
        // The stored checkpoints for these items already carry the scaling.
        if let Some(reference) = lookup_ref(refs, r) {
            samples.push(CertSample::equality(
                format!("R={r} value vs stored reference"),
                value,
                reference,
            ));
        }
        if let Some((rp, vp)) = previous {
            samples.push(CertSample::inequality(
                format!("decay: value at R={r} below value at R={rp}"),
                value,
                vp,
            ));
        }
        previous = Some((r, value));
    }
    Ok(Certificate::from_samples(
        name,
        samples,
        BudgetBreakdown::quadrature(10.0 * quad + 1e-12),
    ))
}

fn item_1(params: &IntegralParams) -> Result<Certificate> {
    box_decay_certificate(
        "weighted-box-average-decay",
        &|x, y| kernel_i0_weighted(x, y) * (x - y).abs(),
        true,
        2,
        WEIGHTED_BOX_REFS,
        &params.radii,
        &params.budget,
    )
}

fn item_2(params: &IntegralParams) -> Result<Certificate> {
    if params.rate_sets.is_empty() {
        return Err(Error::Config("rate_sets must not be empty".into()));
    }
    let mut samples = Vec::new();
    let mut quad: f64 = 0.0;
    for rates in &params.rate_sets {
        KernelRates::new(rates.lambda, rates.mu, rates.omega)?;
        let (lw, mw) = (rates.lambda * rates.omega, rates.mu * rates.omega);
        let integrand =
            move |x: f64, y: f64| kernel_i0_weighted(x, y) * (-lw * x - mw * y).exp();
        let s_scale = 2.0 / (rates.omega * (rates.lambda + rates.mu));
        let (value, est) = quarterplane_diag(&integrand, s_scale, &params.budget)?;
        let reference = 1.0 / (rates.omega * rates.capital());
        quad = quad.max(est);
        samples.push(CertSample::equality(
            format!("{} value vs closed form 1/(omega L)", rates.label()),
            value,
            reference,
        ));
    }
    Ok(Certificate::from_samples(
        "kernel-transform-identity",
        samples,
        BudgetBreakdown::quadrature(10.0 * quad + 1e-12),
    ))
}

fn item_3(params: &IntegralParams) -> Result<Certificate> {
    let rates = &params.shrink_rates;
    if rates.is_empty() {
        return Err(Error::Config("shrink_rates must not be empty".into()));
    }
    if rates.windows(2).any(|w| w[1] >= w[0]) || rates.iter().any(|a| !(*a > 0.0)) {
        return Err(Error::Config("shrink_rates must be strictly decreasing and positive".into()));
    }
    let omega = params.shrink_omega;
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Config(format!("shrink_omega must be positive, got {omega}")));
    }
    let mut samples = Vec::new();
    let mut quad: f64 = 0.0;
    let mut previous: Option<(f64, f64)> = None;
    for &a in rates {
        let aw = a * omega;
        let integrand = move |x: f64, y: f64| {
            (x - y).abs() * kernel_i0_weighted(x, y) * (-aw * (x + y)).exp()
        };
        let s_scale = 1.0 / aw;
        let (raw, est) = quarterplane_diag(&integrand, s_scale, &params.budget)?;
        let value = a * a * raw;
        quad = quad.max(a * a * est);
        if key_matches(omega, 1.0) {
            if let Some(reference) = lookup_ref(SHRINK_REFS, a) {
                samples.push(CertSample::equality(
                    format!("lambda=mu={a} value vs stored reference"),
                    value,
                    reference,
                ));
            }
        }
        if let Some((ap, vp)) = previous {
            samples.push(CertSample::inequality(
                format!("decay: value at lambda=mu={a} below value at lambda=mu={ap}"),
                value,
                vp,
            ));
        }
        previous = Some((a, value));
    }
    Ok(Certificate::from_samples(
        "shrinking-rate-decay",
        samples,
        BudgetBreakdown::quadrature(10.0 * quad + 1e-12),
    ))
}

fn item_4(params: &IntegralParams) -> Result<Certificate> {
    require_increasing("bound_radii", &params.bound_radii)?;
    let mut samples = Vec::new();
    let mut quad: f64 = 0.0;
    for &r in &params.bound_radii {
        let (raw, est) = box_integral(&|x, y| kernel_i0_weighted(x, y), r, false, &params.budget)?;
        let value = raw / r;
        quad = quad.max(est / r);
        samples.push(CertSample::inequality(format!("R={r} average stays below 1"), value, 1.0));
        if let Some(reference) = lookup_ref(PLAIN_BOX_REFS, r) {
            samples.push(CertSample::equality(
                format!("R={r} value vs stored reference"),
                value,
                reference / r,
            ));
        }
    }
    Ok(Certificate::from_samples(
        "box-average-bound",
        samples,
        BudgetBreakdown::quadrature(10.0 * quad + 1e-12),
    ))
}

fn item_5(params: &IntegralParams) -> Result<Certificate> {
    require_increasing("radii", &params.radii)?;
    let mut samples = Vec::new();
    let mut quad: f64 = 0.0;
    let mut previous: Option<(f64, f64)> = None;
    for &r in &params.radii {
        let (raw, est) = box_integral(&|x, y| kernel_i0_weighted(x, y), r, false, &params.budget)?;
        let value = raw / (r * r);
        quad = quad.max(est / (r * r));
        if let Some(reference) = lookup_ref(PLAIN_BOX_REFS, r) {
            samples.push(CertSample::equality(
                format!("R={r} value vs stored reference"),
                value,
                reference / (r * r),
            ));
        }
        if let Some((rp, vp)) = previous {
            samples.push(CertSample::inequality(
                format!("decay: value at R={r} below value at R={rp}"),
                value,
                vp,
            ));
        }
        previous = Some((r, value));
    }
    Ok(Certificate::from_samples(
        "box-average-decay",
        samples,
        BudgetBreakdown::quadrature(10.0 * quad + 1e-12),
    ))
}

fn item_6(params: &IntegralParams) -> Result<Certificate> {
    box_decay_certificate(
        "derivative-box-decay",
        &|x, y| kernel_dy_i0_weighted(x, y) * (x - y).abs(),
        true,
        2,
        DERIV_BOX_REFS,
        &params.radii,
        &params.budget,
    )
}

/// Numerically integrate the scaled kernel over `[0,t]^2`.  Substituting
/// `x -> L x` reduces it to `L^2 int_{[0,t/L]^2} K(x,y) e^{-lw x - mw y}`,
/// which reuses the overflow-stable plain kernel.
fn scaled_box(rates: &KernelRates, t: f64, budget: &QuadratureBudget) -> Result<(f64, f64)> {
    let cap = rates.capital();
    let (lw, mw) = (rates.lambda * rates.omega, rates.mu * rates.omega);
    let f = move |x: f64, y: f64| kernel_i0_weighted(x, y) * (-lw * x - mw * y).exp();
    let (v, e) = box_integral(&f, t / cap, false, budget)?;
    Ok((cap * cap * v, cap * cap * e))
}

fn item_7(params: &IntegralParams) -> Result<Certificate> {
    require_increasing("tail_times", &params.tail_times)?;
    if params.rate_sets.is_empty() {
        return Err(Error::Config("rate_sets must not be empty".into()));
    }
    let mut samples = Vec::new();
    let mut quad: f64 = 0.0;
    for rates in &params.rate_sets {
        KernelRates::new(rates.lambda, rates.mu, rates.omega)?;
        let quarter = rates.quarter_plane_value();
        let pre = rates.tail_prefactor();
        let mut previous: Option<(f64, f64)> = None;
        for &t in &params.tail_times {
            let (boxed, est) = scaled_box(rates, t, &params.budget)?;
            let tail = pre * (quarter - boxed);
            quad = quad.max(pre * est);
            if let Some(reference) = lookup_tail_ref(rates, t) {
                samples.push(CertSample::equality(
                    format!("{} t={t} tail vs stored reference", rates.label()),
                    tail,
                    reference,
                ));
            }
            samples.push(CertSample::inequality(
                format!("{} t={t} tail is nonnegative", rates.label()),
                0.0,
                tail,
            ));
            samples.push(CertSample::inequality(
                format!("{} t={t} tail below its closed-form strip bound", rates.label()),
                tail,
                rates.strip_tail_bound(t),
            ));
            if let Some((tp, vp)) = previous {
                samples.push(CertSample::inequality(
                    format!("{} decay: tail at t={t} below tail at t={tp}", rates.label()),
                    tail,
                    vp,
                ));
            }
            previous = Some((t, tail));
        }
    }
    // Uniformity in the rates: the closed-form strip bound dominates the tail
    // for every (lambda, mu), so a decaying maximum over a rate lattice
    // witnesses decay uniform in the rates at each omega in play.
    let mut omegas: Vec<f64> = Vec::new();
    for rates in &params.rate_sets {
        if !omegas.iter().any(|w| key_matches(*w, rates.omega)) {
            omegas.push(rates.omega);
        }
    }
    for omega in omegas {
        let envelope = |t: f64| -> f64 {
            let mut worst: f64 = 0.0;
            for &l in &RATE_LATTICE {
                for &m in &RATE_LATTICE {
                    let r = KernelRates { lambda: l, mu: m, omega };
                    worst = worst.max(r.strip_tail_bound(t));
                }
            }
            worst
        };
        let first = envelope(params.tail_times[0]);
        let mut prev = first;
        for &t in &params.tail_times[1..] {
            let cur = envelope(t);
            samples.push(CertSample::inequality(
                format!("omega={omega} uniform envelope decreasing at t={t}"),
                cur,
                prev,
            ));
            prev = cur;
        }
        samples.push(CertSample::inequality(
            format!("omega={omega} uniform envelope decayed by {ENVELOPE_DECAY_RATIO}"),
            prev,
            ENVELOPE_DECAY_RATIO * first,
        ));
    }
    Ok(Certificate::from_samples(
        "scaled-tail-decay",
        samples,
        BudgetBreakdown::quadrature(10.0 * quad + 1e-12),
    ))
}

/// The canonical bounded family vanishing on compact sets:
/// `g_n(x, y) = min(1, (x^2 + y^2)/n^2)`.
pub fn vanishing_input(n: u32, x: f64, y: f64) -> f64 {
    let n2 = (n as f64) * (n as f64);
    ((x * x + y * y) / n2).min(1.0)
}

/// Prefixed integral of the scaled kernel against `g`: substituting
/// `x -> L x` turns it into
/// `(l m / L) int_{[0,inf)^2} K(x,y) e^{-lw x - mw y} g(L x, L y)`.
fn vanishing_value(
    rates: &KernelRates,
    g: &dyn Fn(f64, f64) -> f64,
    budget: &QuadratureBudget,
) -> Result<(f64, f64)> {
    let cap = rates.capital();
    let (lw, mw) = (rates.lambda * rates.omega, rates.mu * rates.omega);
    let f = move |x: f64, y: f64| {
        kernel_i0_weighted(x, y) * (-lw * x - mw * y).exp() * g(cap * x, cap * y)
    };
    let s_scale = 2.0 / (rates.omega * (rates.lambda + rates.mu));
    let scale = rates.lambda * rates.mu / cap;
    let (v, e) = quarterplane_diag(&f, s_scale, budget)?;
    Ok((scale * v, scale * e))
}

/// Closed-form uniform bound for item 8 with the canonical inputs: inside
/// `[0,t]^2` the input is at most `min(1, 2 t^2 / n^2)` and the full scaled
/// mass is `L/w`; outside, the strip bound applies.  Minimized over a grid
/// of split points `t`.
fn vanishing_bound(rates: &KernelRates, n: u32) -> f64 {
    let full = rates.tail_prefactor() * rates.quarter_plane_value();
    let n2 = (n as f64) * (n as f64);
    let mut best = f64::INFINITY;
    let mut t = 0.5;
    while t <= 64.0 {
        let inside = full * (2.0 * t * t / n2).min(1.0);
        best = best.min(inside + rates.strip_tail_bound(t));
        t *= 1.25;
    }
    best
}

fn item_8(params: &IntegralParams) -> Result<Certificate> {
    let ns = &params.vanish_indices;
    if ns.is_empty() {
        return Err(Error::Config("vanish_indices must not be empty".into()));
    }
    if ns.windows(2).any(|w| w[1] <= w[0]) || ns.contains(&0) {
        return Err(Error::Config("vanish_indices must be strictly increasing and positive".into()));
    }
    if params.rate_sets.is_empty() {
        return Err(Error::Config("rate_sets must not be empty".into()));
    }
    let mut samples = Vec::new();
    let mut quad: f64 = 0.0;
    for rates in &params.rate_sets {
        KernelRates::new(rates.lambda, rates.mu, rates.omega)?;
        let mut first: Option<f64> = None;
        let mut previous: Option<(u32, f64)> = None;
        for &n in ns {
            let g = move |x: f64, y: f64| vanishing_input(n, x, y);
            let (value, est) = vanishing_value(rates, &g, &params.budget)?;
            quad = quad.max(est);
            samples.push(CertSample::inequality(
                format!("{} n={n} value below its closed-form bound", rates.label()),
                value,
                vanishing_bound(rates, n),
            ));
            if let Some((np, vp)) = previous {
                samples.push(CertSample::inequality(
                    format!("{} decay: value at n={n} below value at n={np}", rates.label()),
                    value,
                    vp,
                ));
            }
            first.get_or_insert(value);
            previous = Some((n, value));
        }
        let (_, last) = previous.expect("at least one index");
        samples.push(CertSample::inequality(
            format!("{} values decayed by {ENVELOPE_DECAY_RATIO}", rates.label()),
            last,
            ENVELOPE_DECAY_RATIO * first.expect("at least one index"),
        ));
    }
    // Uniformity in the rates through the closed-form bound maximized over
    // the lattice, one envelope per distinct omega.
    let mut omegas: Vec<f64> = Vec::new();
    for rates in &params.rate_sets {
        if !omegas.iter().any(|w| key_matches(*w, rates.omega)) {
            omegas.push(rates.omega);
        }
    }
    for omega in omegas {
        let envelope = |n: u32| -> f64 {
            let mut worst: f64 = 0.0;
            for &l in &RATE_LATTICE {
                for &m in &RATE_LATTICE {
                    let r = KernelRates { lambda: l, mu: m, omega };
                    worst = worst.max(vanishing_bound(&r, n));
                }
            }
            worst
        };
        let first = envelope(ns[0]);
        let mut prev = first;
        for &n in &ns[1..] {
            let cur = envelope(n);
            samples.push(CertSample::inequality(
                format!("omega={omega} uniform envelope decreasing at n={n}"),
                cur,
                prev,
            ));
            prev = cur;
        }
        samples.push(CertSample::inequality(
            format!("omega={omega} uniform envelope decayed by {ENVELOPE_DECAY_RATIO}"),
            prev,
            ENVELOPE_DECAY_RATIO * first,
        ));
    }
    Ok(Certificate::from_samples(
        "vanishing-input-decay",
        samples,
        BudgetBreakdown::quadrature(10.0 * quad + 1e-12),
    ))
}

/// Certify one of the eight numbered integral statements listed in the
/// module documentation.  Items outside `1..=8` are a configuration error.
pub fn verify_some_integrals(item: usize, params: &IntegralParams) -> Result<Certificate> {
    match item {
        1 => item_1(params),
        2 => item_2(params),
        3 => item_3(params),
        4 => item_4(params),
        5 => item_5(params),
        6 => item_6(params),
        7 => item_7(params),
        8 => item_8(params),
        _ => Err(Error::Config(format!("integral item must be 1..=8, got {item}"))),
    }
}

/// Run all eight items, returning `(item, certificate)` pairs.
pub fn verify_all_integrals(params: &IntegralParams) -> Result<Vec<(usize, Certificate)>> {
    (1..=8).map(|item| verify_some_integrals(item, params).map(|c| (item, c))).collect()
}

/// Certify that reordering the triple convolution integral of two
/// nonnegative inputs on `[0, horizon]^2` can only grow it:
///
/// `int_0^T int_0^t int_0^t f(x,y) g(t-x, t-y) dy dx dt`
///
/// never exceeds
///
/// `int_0^T int_0^T int_{max(x,y)-x}^{T-x} f(x,y) g(u, u+x-y) du dy dx`,
///
/// and for integrable inputs the two sides agree outright (the right-hand
/// form is the left one after swapping the order of integration and
/// substituting `u = t - x`).  Both sides are computed with nested
/// Gauss-Legendre rules at `order` and `order + 4` points per axis; the
/// difference feeds the certificate budget.  Inputs must be nonnegative on
/// `[0, horizon]^2`; sampled negativity is a hypothesis error.
pub fn check_interchange(
    f: &dyn Fn(f64, f64) -> f64,
    g: &dyn Fn(f64, f64) -> f64,
    horizon: f64,
    order: usize,
) -> Result<Certificate> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::Config(format!("horizon must be positive, got {horizon}")));
    }
    if !(4..=32).contains(&order) {
        return Err(Error::Config(format!("order must lie in 4..=32, got {order}")));
    }
    let seen_negative: std::cell::Cell<Option<(&'static str, f64, f64, f64)>> =
        std::cell::Cell::new(None);
    let fc = |x: f64, y: f64| {
        let v = f(x, y);
        if v < -crate::tol::ARITHMETIC_SLACK && seen_negative.get().is_none() {
            seen_negative.set(Some(("first", x, y, v)));
        }
        v
    };
    let gc = |x: f64, y: f64| {
        let v = g(x, y);
        if v < -crate::tol::ARITHMETIC_SLACK && seen_negative.get().is_none() {
            seen_negative.set(Some(("second", x, y, v)));
        }
        v
    };

    let both = |p: usize| -> (f64, f64) {
        let (xi, wi) = gauss_legendre(p);
        // Nodes and weights mapped to [0, 1].
        let nodes: Vec<(f64, f64)> =
            xi.iter().zip(wi).map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect();
        let t_end = horizon;
        // Left ordering: outer t, inner box [0, t]^2.
        let mut left = 0.0;
        for &(a, wa) in &nodes {
            let t = t_end * a;
            let mut inner = 0.0;
            for &(b, wb) in &nodes {
                let x = t * b;
                for &(c, wc) in &nodes {
                    let y = t * c;
                    inner += wb * wc * fc(x, y) * gc(t - x, t - y);
                }
            }
            left += wa * inner * t * t;
        }
        left *= t_end;
        // Right ordering: outer x over [0, T], then y split at x, inner u.
        let mut right = 0.0;
        for &(a, wa) in &nodes {
            let x = t_end * a;
            let mut x_acc = 0.0;
            // y below x: u runs over the full [0, T - x].
            for &(b, wb) in &nodes {
                let y = x * b;
                let span = t_end - x;
                let mut u_acc = 0.0;
                for &(c, wc) in &nodes {
                    let u = span * c;
                    u_acc += wc * gc(u, u + x - y);
                }
                x_acc += wb * fc(x, y) * u_acc * span * x;
            }
            // y above x: u starts at y - x.
            for &(b, wb) in &nodes {
                let y = x + (t_end - x) * b;
                let lo = y - x;
                let span = (t_end - x) - lo;
                let mut u_acc = 0.0;
                for &(c, wc) in &nodes {
                    let u = lo + span * c;
                    u_acc += wc * gc(u, u + x - y);
                }
                x_acc += wb * fc(x, y) * u_acc * span * (t_end - x);
            }
            right += wa * x_acc;
        }
        right *= t_end;
        (left, right)
    };

    let (left_c, right_c) = both(order);
    let (left_f, right_f) = both(order + 4);
    if let Some((which, x, y, v)) = seen_negative.get() {
        return Err(Error::HypothesisViolated(format!(
            "{which} input is negative at ({x}, {y}): {v}; both inputs must be nonnegative"
        )));
    }
    let est = (left_f - left_c).abs() + (right_f - right_c).abs();
    let scale = left_f.abs().max(right_f.abs()).max(1.0);
    let samples = vec![
        CertSample::inequality("left ordering below right ordering", left_f, right_f),
        CertSample::equality("orderings agree for integrable inputs", left_f, right_f),
    ];
    Ok(Certificate::from_samples(
        "integral-order-interchange",
        samples,
        BudgetBreakdown::quadrature(10.0 * est + 1e-10 * scale),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bessel::b0;

    #[test]
    fn mixed_partial_of_the_plain_kernel_reproduces_the_kernel() {
        // d^2/dx dy I0(2 sqrt(x y)) = I0(2 sqrt(x y)), checked by central
        // differences.
        let h = 1e-4;
        for &(x, y) in &[(0.3, 0.7), (1.0, 1.0), (2.0, 1.5), (3.0, 0.2)] {
            let fd = (b0((x + h) * (y + h)) - b0((x + h) * (y - h)) - b0((x - h) * (y + h))
                + b0((x - h) * (y - h)))
                / (4.0 * h * h);
            let exact = b0(x * y);
            assert!(
                (fd - exact).abs() <= 1e-6 * exact.abs().max(1.0),
                "({x}, {y}): fd {fd} vs {exact}"
            );
        }
    }

    #[test]
    fn transform_identity_holds_for_both_rate_sets() {
        let params = IntegralParams::default();
        let cert = verify_some_integrals(2, &params).unwrap();
        assert!(cert.pass, "{}", cert.one_line());
        // The two canonical rate sets land on 1/3 and 1/2.
        assert_eq!(cert.samples.len(), 2);
        assert!((cert.samples[0].rhs - 1.0 / 3.0).abs() < 1e-15);
        assert!((cert.samples[1].rhs - 0.5).abs() < 1e-15);
        for s in &cert.samples {
            assert!(
                (s.lhs - s.rhs).abs() <= 1e-6 * s.rhs.abs(),
                "{}: {} vs {}",
                s.label,
                s.lhs,
                s.rhs
            );
        }
    }

    #[test]
    fn weighted_box_decay_matches_stored_references() {
        let params =
            IntegralParams { radii: vec![5.0, 10.0], ..IntegralParams::default() };
        let cert = verify_some_integrals(1, &params).unwrap();
        assert!(cert.pass, "{}", cert.one_line());
        let refs: Vec<&CertSample> =
            cert.samples.iter().filter(|s| s.label.contains("reference")).collect();
        assert_eq!(refs.len(), 2);
        for s in refs {
            assert!((s.lhs - s.rhs).abs() <= 1e-7, "{}: {} vs {}", s.label, s.lhs, s.rhs);
        }
    }

    #[test]
    fn box_average_bound_holds_on_small_radii() {
        let params = IntegralParams {
            bound_radii: vec![1.0, 5.0, 10.0],
            ..IntegralParams::default()
        };
        let cert = verify_some_integrals(4, &params).unwrap();
        assert!(cert.pass, "{}", cert.one_line());
        for s in cert.samples.iter().filter(|s| s.label.contains("below 1")) {
            assert!(s.margin > 0.05, "{}: margin {}", s.label, s.margin);
        }
    }

    #[test]
    fn box_average_decay_matches_stored_references() {
        let params =
            IntegralParams { radii: vec![5.0, 10.0], ..IntegralParams::default() };
        let cert = verify_some_integrals(5, &params).unwrap();
        assert!(cert.pass, "{}", cert.one_line());
        for s in cert.samples.iter().filter(|s| s.label.contains("reference")) {
            assert!((s.lhs - s.rhs).abs() <= 1e-7, "{}: {} vs {}", s.label, s.lhs, s.rhs);
        }
    }

    #[test]
    fn derivative_box_decay_matches_stored_references() {
        let params =
            IntegralParams { radii: vec![5.0, 10.0], ..IntegralParams::default() };
        let cert = verify_some_integrals(6, &params).unwrap();
        assert!(cert.pass, "{}", cert.one_line());
        for s in cert.samples.iter().filter(|s| s.label.contains("reference")) {
            assert!((s.lhs - s.rhs).abs() <= 1e-7, "{}: {} vs {}", s.label, s.lhs, s.rhs);
        }
    }

    #[test]
    fn shrinking_rates_decay_toward_zero() {
        let params = IntegralParams {
            shrink_rates: vec![0.5, 0.25],
            ..IntegralParams::default()
        };
        let cert = verify_some_integrals(3, &params).unwrap();
        assert!(cert.pass, "{}", cert.one_line());
        for s in cert.samples.iter().filter(|s| s.label.contains("reference")) {
            assert!((s.lhs - s.rhs).abs() <= 1e-6, "{}: {} vs {}", s.label, s.lhs, s.rhs);
        }
    }

    #[test]
    fn scaled_tails_decay_uniformly() {
        let params = IntegralParams {
            tail_times: vec![2.0, 5.0, 10.0],
            ..IntegralParams::default()
        };
        let cert = verify_some_integrals(7, &params).unwrap();
        assert!(cert.pass, "{}", cert.one_line());
        for s in cert.samples.iter().filter(|s| s.label.contains("reference")) {
            assert!((s.lhs - s.rhs).abs() <= 1e-6, "{}: {} vs {}", s.label, s.lhs, s.rhs);
        }
    }

    #[test]
    fn vanishing_inputs_decay() {
        let params = IntegralParams {
            rate_sets: vec![KernelRates { lambda: 1.0, mu: 1.0, omega: 1.0 }],
            vanish_indices: vec![1, 4, 16],
            ..IntegralParams::default()
        };
        let cert = verify_some_integrals(8, &params).unwrap();
        assert!(cert.pass, "{}", cert.one_line());
    }

    #[test]
    fn full_default_sweep_produces_passing_certificates() {
        let certs = verify_all_integrals(&IntegralParams::default()).unwrap();
        assert_eq!(certs.len(), 8);
        for (item, cert) in &certs {
            assert!(cert.pass, "item {item}: {}", cert.one_line());
        }
        // Every stored checkpoint is reproduced tightly.
        for (item, cert) in &certs {
            for s in cert.samples.iter().filter(|s| s.label.contains("reference")) {
                assert!(
                    (s.lhs - s.rhs).abs() <= 1e-6 * s.rhs.abs().max(1e-4),
                    "item {item} {}: {} vs {}",
                    s.label,
                    s.lhs,
                    s.rhs
                );
            }
        }
    }

    #[test]
    fn interchange_on_constants_gives_exact_thirds() {
        let cert = check_interchange(&|_, _| 1.0, &|_, _| 1.0, 1.0, 12).unwrap();
        assert!(cert.pass, "{}", cert.one_line());
        assert!((cert.samples[0].lhs - 1.0 / 3.0).abs() < 1e-12);
        assert!((cert.samples[0].rhs - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn interchange_on_smooth_positive_inputs_agrees_both_ways() {
        let f = |x: f64, y: f64| 0.5 + x + y * y;
        let g = |x: f64, y: f64| (-x).exp() * (1.2 + 0.5 * (3.0 * y).sin());
        let cert = check_interchange(&f, &g, 1.5, 12).unwrap();
        assert!(cert.pass, "{}", cert.one_line());
        assert!(
            (cert.samples[0].lhs - cert.samples[0].rhs).abs() <= 1e-8,
            "orderings differ: {} vs {}",
            cert.samples[0].lhs,
            cert.samples[0].rhs
        );
    }

    #[test]
    fn interchange_rejects_negative_inputs() {
        let f = |x: f64, _: f64| x - 0.5;
        let err = check_interchange(&f, &|_, _| 1.0, 1.0, 8).unwrap_err();
        assert!(matches!(err, Error::HypothesisViolated(_)), "{err}");
    }

    #[test]
    fn bad_item_numbers_are_config_errors() {
        let params = IntegralParams::default();
        assert!(matches!(verify_some_integrals(0, &params), Err(Error::Config(_))));
        assert!(matches!(verify_some_integrals(9, &params), Err(Error::Config(_))));
    }
}
