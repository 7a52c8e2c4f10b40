//! Uniform time grids and piecewise-linear sampled curves.

use crate::error::{Error, Result};
use crate::space::Space;
use serde::{Deserialize, Serialize};

/// A uniform grid of `n >= 2` nodes on `[t_start, t_end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    t_start: f64,
    t_end: f64,
    n: usize,
}

impl Grid {
    pub fn new(t_start: f64, t_end: f64, n: usize) -> Result<Self> {
        if !t_start.is_finite() || !t_end.is_finite() {
            return Err(Error::InvalidGrid("endpoints must be finite".into()));
        }
        if t_end <= t_start {
            return Err(Error::InvalidGrid(format!(
                "t_end {t_end} must exceed t_start {t_start}"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 nodes, got {n}")));
        }
        Ok(Grid { t_start, t_end, n })
    }

    /// Grid over `[t_start, t_end]` with step as close to `dt_target` as the
    /// window allows (the step divides the window exactly).
    pub fn with_step(t_start: f64, t_end: f64, dt_target: f64) -> Result<Self> {
        if !(dt_target > 0.0) {
            return Err(Error::InvalidGrid(format!("step must be positive, got {dt_target}")));
        }
        let cells = ((t_end - t_start) / dt_target).round().max(1.0) as usize;
        Grid::new(t_start, t_end, cells + 1)
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        (self.t_end - self.t_start) / (self.n - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i < self.n);
        // Computed from the left endpoint so nodes are exactly reproducible.
        self.t_start + self.dt() * i as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.node(i))
    }

    /// Index of the node nearest to `t`, if `t` lies within the window
    /// (with a half-ulp-scale slack at the ends).
    pub fn nearest_node(&self, t: f64) -> Result<usize> {
        self.check_window(t)?;
        let i = ((t - self.t_start) / self.dt()).round();
        Ok((i.max(0.0) as usize).min(self.n - 1))
    }

    fn window_slack(&self) -> f64 {
        1e-9 * self.dt()
    }

    pub(crate) fn check_window(&self, t: f64) -> Result<()> {
        if t < self.t_start - self.window_slack() || t > self.t_end + self.window_slack() {
            return Err(Error::OutOfWindow { t, start: self.t_start, end: self.t_end });
        }
        Ok(())
    }

    /// The sub-grid starting at node `i0` (same step, same final node).
    pub fn tail_from(&self, i0: usize) -> Result<Grid> {
        if i0 + 2 > self.n {
            return Err(Error::InvalidGrid(format!(
                "tail from node {i0} leaves fewer than 2 of {} nodes",
                self.n
            )));
        }
        Grid::new(self.node(i0), self.t_end, self.n - i0)
    }
}

/// A curve sampled on a uniform grid, evaluated between nodes by linear
/// interpolation.  Values are stored flattened, node-major.
///
/// For curves produced by the kernel solvers, the interpolation error against
/// the underlying continuous object is of order `dt^2 / (8 lambda)` (second
/// difference of the smoothed curve times the usual `dt^2/8` factor), which
/// is why all solver configurations keep `dt` well below `lambda`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledCurve {
    grid: Grid,
    space: Space,
    values: Vec<f64>,
}

impl SampledCurve {
    /// Build from a flat node-major value buffer of length `grid.len() * space.dim()`.
    pub fn from_values(grid: Grid, space: Space, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() * space.dim() {
            return Err(Error::DimensionMismatch {
                expected: grid.len() * space.dim(),
                got: values.len(),
            });
        }
        Ok(SampledCurve { grid, space, values })
    }

    /// Sample a function at the grid nodes.
    pub fn from_fn(grid: Grid, space: Space, mut f: impl FnMut(f64) -> Vec<f64>) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len() * space.dim());
        for t in grid.times() {
            let v = f(t);
            if v.len() != space.dim() {
                return Err(Error::DimensionMismatch { expected: space.dim(), got: v.len() });
            }
            values.extend_from_slice(&v);
        }
        Ok(SampledCurve { grid, space, values })
    }

    /// The constant curve `t -> x`.
    pub fn constant(grid: Grid, space: Space, x: &[f64]) -> Result<Self> {
        if x.len() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), got: x.len() });
        }
        let mut values = Vec::with_capacity(grid.len() * space.dim());
        for _ in 0..grid.len() {
            values.extend_from_slice(x);
        }
        Ok(SampledCurve { grid, space, values })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn space(&self) -> Space {
        self.space
    }

    /// Value at node `i`.
    pub fn node(&self, i: usize) -> &[f64] {
        let d = self.space.dim();
        &self.values[i * d..(i + 1) * d]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Piecewise-linear evaluation.  Errors when `t` leaves the window.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        self.grid.check_window(t)?;
        let dt = self.grid.dt();
        let s = ((t - self.grid.t_start()) / dt).clamp(0.0, (self.grid.len() - 1) as f64);
        let i = (s.floor() as usize).min(self.grid.len() - 2);
        let w = s - i as f64;
        let a = self.node(i);
        let b = self.node(i + 1);
        Ok(a.iter().zip(b).map(|(x, y)| x + w * (y - x)).collect())
    }

    /// Sup over nodes of the norm.
    pub fn sup_norm(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| self.space.norm_unchecked(self.node(i)))
            .fold(0.0, f64::max)
    }

    /// Sup over shared nodes of the norm of the difference.  The curves must
    /// share their grid exactly.
    pub fn sup_diff(&self, other: &SampledCurve) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::MismatchedProblems(
                "sup_diff needs identical grids".into(),
            ));
        }
        if self.space != other.space {
            return Err(Error::MismatchedProblems(
                "sup_diff needs identical spaces".into(),
            ));
        }
        Ok((0..self.grid.len())
            .map(|i| self.space.norm_diff_unchecked(self.node(i), other.node(i)))
            .fold(0.0, f64::max))
    }

    /// Largest difference quotient `|u(t_{k+1}) - u(t_k)| / dt` over the grid:
    /// a computable stand-in for the Lipschitz constant.
    pub fn max_difference_quotient(&self) -> f64 {
        let dt = self.grid.dt();
        (0..self.grid.len() - 1)
            .map(|i| self.space.norm_diff_unchecked(self.node(i + 1), self.node(i)) / dt)
            .fold(0.0, f64::max)
    }

    /// Restriction to the sub-grid starting at node `i0`.
    pub fn restrict_from(&self, i0: usize) -> Result<SampledCurve> {
        let grid = self.grid.tail_from(i0)?;
        let d = self.space.dim();
        Ok(SampledCurve { grid, space: self.space, values: self.values[i0 * d..].to_vec() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::NormKind;

    #[test]
    fn grid_nodes_hit_endpoints() {
        let g = Grid::new(-1.0, 2.0, 7).unwrap();
        assert_eq!(g.node(0), -1.0);
        assert!((g.node(6) - 2.0).abs() < 1e-15);
        assert!((g.dt() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn eval_is_exact_on_affine_data() {
        let g = Grid::new(0.0, 1.0, 11).unwrap();
        let s = Space::new(2, NormKind::Euclidean).unwrap();
        let c = SampledCurve::from_fn(g, s, |t| vec![2.0 * t - 1.0, 0.5 * t]).unwrap();
        let v = c.eval(0.537).unwrap();
        assert!((v[0] - (2.0 * 0.537 - 1.0)).abs() < 1e-14);
        assert!((v[1] - 0.5 * 0.537).abs() < 1e-14);
    }

    #[test]
    fn eval_rejects_out_of_window() {
        let g = Grid::new(0.0, 1.0, 3).unwrap();
        let c = SampledCurve::constant(g, Space::scalar(), &[1.0]).unwrap();
        assert!(matches!(c.eval(1.1), Err(Error::OutOfWindow { .. })));
    }

    #[test]
    fn restriction_drops_leading_nodes() {
        let g = Grid::new(0.0, 1.0, 5).unwrap();
        let c = SampledCurve::from_fn(g, Space::scalar(), |t| vec![t]).unwrap();
        let r = c.restrict_from(2).unwrap();
        assert_eq!(r.grid().len(), 3);
        assert!((r.grid().t_start() - 0.5).abs() < 1e-15);
        assert_eq!(r.node(0)[0], c.node(2)[0]);
    }
}
