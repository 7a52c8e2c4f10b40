//! Closed-form resolvent for the planar two-direction Volterra equation.
//!
//! The equation solved here couples two one-sided exponential memories, one
//! per time variable, on the quarter-plane `t, s >= 0`:
//!
//! ```text
//! F(t,s) - delta * int_0^t e^{alpha (t-x)} F(x,s) dx
//!        - gamma * int_0^s e^{beta  (s-y)} F(t,y) dy  =  G(t,s).
//! ```
//!
//! Iterating the two commuting Volterra operators sums to a closed-form
//! resolvent built from the entire Bessel-type kernels [`crate::bessel::b0`]
//! and [`crate::bessel::b1`].  With `u = t - x`, `v = s - y`,
//! `E(u,v) = e^{(alpha+delta) u + (beta+gamma) v}` and `p = gamma*delta`:
//!
//! ```text
//! F = G
//!   + gamma * int_0^s e^{(beta+gamma)(s-y)} G(t,y) dy
//!   + delta * int_0^t e^{(alpha+delta)(t-x)} G(x,s) dx
//!   + int_0^t int_0^s [ gamma * p v b1(p u v)
//!                     + delta * p u b1(p u v)
//!                     + 2 p b0(p u v) ] E(u,v) G(x,y) dy dx.
//! ```
//!
//! [`resolve_2d`] evaluates this formula on a lattice by per-cell
//! Gauss-Legendre quadrature, runs the whole computation twice at different
//! orders to price its own quadrature error, and refuses outputs whose
//! error estimate exceeds the caller's budget.  [`residual_2d`] measures how
//! well a lattice field satisfies the defining equation itself, through an
//! entirely separate discretisation (Lagrange interpolation of the field,
//! nothing shared with the forward tables), so the two routes check each
//! other.

use crate::bessel::{b0, b1, bessel_i0_scaled, bessel_i1_scaled};
use crate::curve::Grid;
use crate::error::{Error, Result};
use crate::field2::Field2;
use crate::quad::{gauss_legendre, QuadratureBudget};

/// Coefficients of the two-direction Volterra equation.
#[derive(Debug, Clone, Copy)]
pub struct Resolve2dParams {
    /// Memory rate in the `t` direction.
    pub alpha: f64,
    /// Memory rate in the `s` direction.
    pub beta: f64,
    /// Strength of the `s`-direction memory; must be `>= 0`.
    pub gamma: f64,
    /// Strength of the `t`-direction memory; must be `>= 0`.
    pub delta: f64,
}

impl Resolve2dParams {
    fn validate(&self) -> Result<()> {
        let ok = self.alpha.is_finite()
            && self.beta.is_finite()
            && self.gamma.is_finite()
            && self.delta.is_finite();
        if !ok {
            return Err(Error::ParamRange("resolvent coefficients must be finite".into()));
        }
        if self.gamma < 0.0 || self.delta < 0.0 {
            return Err(Error::ParamRange(format!(
                "memory strengths must be nonnegative, got gamma = {}, delta = {}",
                self.gamma, self.delta
            )));
        }
        Ok(())
    }
}

/// A resolved field together with the solver's own error estimate.
#[derive(Debug, Clone)]
pub struct Field2Solution {
    /// The resolvent applied to the input, sampled on the request lattice.
    pub field: Field2,
    /// Sup-norm difference between the two quadrature orders; an upper
    /// indicator (not a bound) for the quadrature error of `field`.
    pub quadrature_estimate: f64,
}

/// Combined density of the three double-integral terms, times the stabilised
/// exponential.  Evaluates
/// `[gamma p v b1(puv) + delta p u b1(puv) + 2 p b0(puv)] * e^{rt u + rs v}`
/// without overflowing for large Bessel arguments: past `p u v = 400` the
/// Bessel factors are replaced by their scaled versions and the peeled
/// exponent `2 sqrt(p u v)` is folded into the exponential.
pub(crate) fn kernel2_weight(pr: &Resolve2dParams, rate_t: f64, rate_s: f64, u: f64, v: f64) -> f64 {
    let p = pr.gamma * pr.delta;
    let z = p * u * v;
    debug_assert!(z >= 0.0);
    let (c0, c1, peeled) = if z > 400.0 {
        let x = 2.0 * z.sqrt();
        (bessel_i0_scaled(x), bessel_i1_scaled(x) / z.sqrt(), x)
    } else {
        (b0(z), b1(z), 0.0)
    };
    let density = p * (pr.gamma * v + pr.delta * u) * c1 + 2.0 * p * c0;
    density * (rate_t * u + rate_s * v + peeled).exp()
}

/// Gauss-Legendre nodes and weights mapped to the unit interval.
pub(crate) fn unit_gauss(p: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(p);
    let nodes = x.iter().map(|&xi| 0.5 * (xi + 1.0)).collect();
    let weights = w.iter().map(|&wi| 0.5 * wi).collect();
    (nodes, weights)
}

/// Apply the closed-form resolvent to `g` on `tgrid x sgrid` (both grids
/// must start at 0, where the memory integrals are anchored).  The result
/// carries a quadrature error estimate obtained by running the lattice
/// quadrature at two orders; if the estimate exceeds
/// `max(budget.abs_tol, budget.rel_tol * sup|F|)` the call fails instead of
/// returning a silently inaccurate field.
pub fn resolve_2d(
    mut g: impl FnMut(f64, f64) -> f64,
    tgrid: Grid,
    sgrid: Grid,
    params: &Resolve2dParams,
    budget: &QuadratureBudget,
) -> Result<Field2Solution> {
    params.validate()?;
    for (name, grid) in [("t", &tgrid), ("s", &sgrid)] {
        if grid.t_start() != 0.0 {
            return Err(Error::InvalidGrid(format!(
                "{name}-grid must start at 0 (the memory anchor), got {}",
                grid.t_start()
            )));
        }
    }
    let coarse = resolve_2d_fixed_order(&mut g, tgrid, sgrid, params, 4);
    let fine = resolve_2d_fixed_order(&mut g, tgrid, sgrid, params, 5);
    let estimate = fine.sup_diff(&coarse).expect("both passes share the lattice");
    let allowed = budget.abs_tol.max(budget.rel_tol * fine.sup_norm());
    if estimate > allowed {
        return Err(Error::QuadratureNonConvergence(format!(
            "lattice quadrature orders 4 and 5 disagree by {estimate:.3e} \
             (allowed {allowed:.3e}); refine the lattice or smooth the input"
        )));
    }
    Ok(Field2Solution { field: fine, quadrature_estimate: estimate })
}

/// One full evaluation of the six-term formula with `p`-point cell rules.
fn resolve_2d_fixed_order(
    g: &mut impl FnMut(f64, f64) -> f64,
    tgrid: Grid,
    sgrid: Grid,
    pr: &Resolve2dParams,
    p: usize,
) -> Field2 {
    let (xi, wq) = unit_gauss(p);
    let (nt, ns) = (tgrid.len(), sgrid.len());
    let (mt, ms) = (nt - 1, ns - 1);
    let (ht, hs) = (tgrid.dt(), sgrid.dt());
    let rate_t = pr.alpha + pr.delta;
    let rate_s = pr.beta + pr.gamma;

    // Input tables: g at quadrature points of every cell (for the double
    // integral) and along node lines (for the two single integrals).
    let wc = ms * p;
    let mut ggl = vec![0.0; mt * p * wc];
    for m in 0..mt {
        for a in 0..p {
            let x = tgrid.node(m) + xi[a] * ht;
            for n in 0..ms {
                for b in 0..p {
                    let y = sgrid.node(n) + xi[b] * hs;
                    ggl[(m * p + a) * wc + n * p + b] = g(x, y);
                }
            }
        }
    }

    // Single-integral terms by cumulative exponential recurrence: each cell
    // contributes its integral anchored at the cell's right edge, and older
    // cells are carried forward by the cell-width growth factor.
    let mut icol = vec![0.0; nt * ns]; // gamma * int_0^{s_j} e^{rate_s (s_j - y)} g(t_i, y) dy
    {
        let growth = (rate_s * hs).exp();
        let anchor: Vec<f64> = (0..p).map(|b| (rate_s * hs * (1.0 - xi[b])).exp()).collect();
        for i in 0..nt {
            let t = tgrid.node(i);
            let mut acc = 0.0;
            for n in 0..ms {
                let mut cell = 0.0;
                for b in 0..p {
                    cell += wq[b] * anchor[b] * g(t, sgrid.node(n) + xi[b] * hs);
                }
                acc = growth * acc + hs * cell;
                icol[i * ns + n + 1] = pr.gamma * acc;
            }
        }
    }
    let mut irow = vec![0.0; nt * ns]; // delta * int_0^{t_i} e^{rate_t (t_i - x)} g(x, s_j) dx
    {
        let growth = (rate_t * ht).exp();
        let anchor: Vec<f64> = (0..p).map(|a| (rate_t * ht * (1.0 - xi[a])).exp()).collect();
        for j in 0..ns {
            let s = sgrid.node(j);
            let mut acc = 0.0;
            for m in 0..mt {
                let mut cell = 0.0;
                for a in 0..p {
                    cell += wq[a] * anchor[a] * g(tgrid.node(m) + xi[a] * ht, s);
                }
                acc = growth * acc + ht * cell;
                irow[(m + 1) * ns + j] = pr.delta * acc;
            }
        }
    }

    // Double-integral kernel table.  The kernel depends on the node-to-point
    // offsets only, so one table indexed by (cell distance, quadrature
    // index) serves every target node.  Entry (d, a):  u = (d - xi_a) * ht
    // is the distance from a target node to quadrature point `a` of the
    // cell `d` cells below it.
    let mut k2 = vec![0.0; mt * p * wc];
    for d in 1..=mt {
        for a in 0..p {
            let u = (d as f64 - xi[a]) * ht;
            for e in 1..=ms {
                for b in 0..p {
                    let v = (e as f64 - xi[b]) * hs;
                    k2[((d - 1) * p + a) * wc + (e - 1) * p + b] =
                        wq[a] * wq[b] * kernel2_weight(pr, rate_t, rate_s, u, v);
                }
            }
        }
    }

    // Assembly: F(i,j) = G + single integrals + cell-sum of kernel * g.
    let cell_area = ht * hs;
    let mut values = vec![0.0; nt * ns];
    for i in 0..nt {
        for j in 0..ns {
            let mut double = 0.0;
            for m in 0..i {
                for a in 0..p {
                    let krow = &k2[((i - m - 1) * p + a) * wc..][..wc];
                    let grow = &ggl[(m * p + a) * wc..][..wc];
                    for n in 0..j {
                        let kc = (j - n - 1) * p;
                        let gc = n * p;
                        let mut dot = 0.0;
                        for b in 0..p {
                            dot += krow[kc + b] * grow[gc + b];
                        }
                        double += dot;
                    }
                }
            }
            values[i * ns + j] = g(tgrid.node(i), sgrid.node(j))
                + icol[i * ns + j]
                + irow[i * ns + j]
                + cell_area * double;
        }
    }
    Field2::from_values(tgrid, sgrid, values).expect("buffer sized for the lattice")
}

/// Number of nodes in the interpolation stencils used by [`residual_2d`].
const STENCIL: usize = 6;

/// Degree-5 Lagrange basis values: for a cell whose left node sits at
/// stencil position `offset`, `basis[a][k]` is the weight of stencil node
/// `k` when evaluating at quadrature point `a` inside the cell.
fn lagrange_cell_basis(offset: usize, xi: &[f64]) -> Vec<[f64; STENCIL]> {
    let q: Vec<f64> = (0..STENCIL).map(|k| k as f64 - offset as f64).collect();
    xi.iter()
        .map(|&x| {
            let mut row = [0.0; STENCIL];
            for k in 0..STENCIL {
                let mut l = 1.0;
                for r in 0..STENCIL {
                    if r != k {
                        l *= (x - q[r]) / (q[k] - q[r]);
                    }
                }
                row[k] = l;
            }
            row
        })
        .collect()
}

/// Sup-norm defect of the defining equation for a candidate field:
///
/// ```text
/// sup_(i,j) | F(t_i,s_j) - delta * int_0^{t_i} e^{alpha (t_i-x)} F(x,s_j) dx
///                        - gamma * int_0^{s_j} e^{beta (s_j-y)} F(t_i,y) dy
///                        - g(t_i,s_j) |.
/// ```
///
/// The memory integrals use only the sampled field (degree-5 Lagrange
/// interpolation under 4-point cell quadrature, accumulated by exponential
/// recurrence), so this check shares nothing with the forward solver's
/// tables and catches errors in either the formula or its quadrature.
pub fn residual_2d(
    field: &Field2,
    mut g: impl FnMut(f64, f64) -> f64,
    params: &Resolve2dParams,
) -> Result<f64> {
    params.validate()?;
    let (tgrid, sgrid) = (field.tgrid(), field.sgrid());
    if tgrid.t_start() != 0.0 || sgrid.t_start() != 0.0 {
        return Err(Error::InvalidGrid("field lattice must start at 0 on both axes".into()));
    }
    let (nt, ns) = (tgrid.len(), sgrid.len());
    if nt < STENCIL || ns < STENCIL {
        return Err(Error::InvalidGrid(format!(
            "defect check needs at least {STENCIL} nodes per axis, got {nt} x {ns}"
        )));
    }
    let p = 4;
    let (xi, wq) = unit_gauss(p);
    let bases: Vec<Vec<[f64; STENCIL]>> =
        (0..STENCIL - 1).map(|o| lagrange_cell_basis(o, &xi)).collect();

    // Memory integral along t for every column, then along s for every row.
    let mem_t = directional_memory(field, params.alpha, &xi, &wq, &bases, Axis::T);
    let mem_s = directional_memory(field, params.beta, &xi, &wq, &bases, Axis::S);

    let mut worst = 0.0f64;
    for i in 0..nt {
        for j in 0..ns {
            let defect = field.value(i, j)
                - params.delta * mem_t[i * ns + j]
                - params.gamma * mem_s[i * ns + j]
                - g(tgrid.node(i), sgrid.node(j));
            worst = worst.max(defect.abs());
        }
    }
    Ok(worst)
}

enum Axis {
    T,
    S,
}

/// `int_0^{t_i} e^{rate (t_i - x)} F(x, s_j) dx` at every node (axis `T`;
/// axis `S` integrates the second variable instead), from interpolated
/// samples of the field.
fn directional_memory(
    field: &Field2,
    rate: f64,
    xi: &[f64],
    wq: &[f64],
    bases: &[Vec<[f64; STENCIL]>],
    axis: Axis,
) -> Vec<f64> {
    let (nt, ns) = (field.tgrid().len(), field.sgrid().len());
    let (along, across, h) = match axis {
        Axis::T => (nt, ns, field.tgrid().dt()),
        Axis::S => (ns, nt, field.sgrid().dt()),
    };
    let value = |k: usize, c: usize| match axis {
        Axis::T => field.value(k, c),
        Axis::S => field.value(c, k),
    };
    let growth = (rate * h).exp();
    let anchor: Vec<f64> = xi.iter().map(|&x| (rate * h * (1.0 - x)).exp()).collect();
    let mut out = vec![0.0; nt * ns];
    for c in 0..across {
        let mut acc = 0.0;
        for m in 0..along - 1 {
            let i0 = (m as isize - 2).clamp(0, along as isize - STENCIL as isize) as usize;
            let basis = &bases[m - i0];
            let mut cell = 0.0;
            for (a, row) in basis.iter().enumerate() {
                let mut interp = 0.0;
                for (k, &w) in row.iter().enumerate() {
                    interp += w * value(i0 + k, c);
                }
                cell += wq[a] * anchor[a] * interp;
            }
            acc = growth * acc + h * cell;
            let idx = match axis {
                Axis::T => (m + 1) * ns + c,
                Axis::S => c * ns + m + 1,
            };
            out[idx] = acc;
        }
    }
    out
}
