//! Scalar fields sampled on a rectangular time-time lattice.
//!
//! The two-parameter resolvents operate on functions of a pair `(t, s)` of
//! time variables.  [`Field2`] stores such a function on the tensor grid
//! `tgrid x sgrid`, row-major in `t`, and offers the small amount of
//! structure the resolvent code needs: pointwise access, bilinear
//! evaluation, and sup-norm comparisons.

use crate::curve::Grid;
use crate::error::{Error, Result};

/// A scalar function of two times sampled on a tensor-product grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2 {
    tgrid: Grid,
    sgrid: Grid,
    /// Node values, `t`-major: entry `i * sgrid.len() + j` holds `F(t_i, s_j)`.
    values: Vec<f64>,
}

impl Field2 {
    /// Wrap an existing value buffer (length must be `tgrid.len() * sgrid.len()`).
    pub fn from_values(tgrid: Grid, sgrid: Grid, values: Vec<f64>) -> Result<Self> {
        let want = tgrid.len() * sgrid.len();
        if values.len() != want {
            return Err(Error::DimensionMismatch { expected: want, got: values.len() });
        }
        Ok(Field2 { tgrid, sgrid, values })
    }

    /// Sample a closure on the lattice.
    pub fn from_fn(tgrid: Grid, sgrid: Grid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let ns = sgrid.len();
        let mut values = vec![0.0; tgrid.len() * ns];
        for (i, t) in tgrid.times().enumerate() {
            for (j, s) in sgrid.times().enumerate() {
                values[i * ns + j] = f(t, s);
            }
        }
        Field2 { tgrid, sgrid, values }
    }

    pub fn tgrid(&self) -> Grid {
        self.tgrid
    }

    pub fn sgrid(&self) -> Grid {
        self.sgrid
    }

    /// Node value `F(t_i, s_j)`.
    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.sgrid.len() + j]
    }

    /// The raw node buffer, `t`-major.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mutable node value, for corruption probes in tests.
    #[cfg(test)]
    pub(crate) fn value_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        let cols = self.sgrid.len();
        &mut self.values[i * cols + j]
    }

    /// Bilinear interpolation inside the lattice window.
    pub fn eval(&self, t: f64, s: f64) -> Result<f64> {
        self.tgrid.check_window(t)?;
        self.sgrid.check_window(s)?;
        let (i, a) = cell_of(&self.tgrid, t);
        let (j, b) = cell_of(&self.sgrid, s);
        let f00 = self.value(i, j);
        let f01 = self.value(i, j + 1);
        let f10 = self.value(i + 1, j);
        let f11 = self.value(i + 1, j + 1);
        Ok((1.0 - a) * ((1.0 - b) * f00 + b * f01) + a * ((1.0 - b) * f10 + b * f11))
    }

    /// Largest absolute node value.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest absolute node difference; the lattices must match exactly.
    pub fn sup_diff(&self, other: &Field2) -> Result<f64> {
        if self.tgrid != other.tgrid || self.sgrid != other.sgrid {
            return Err(Error::MismatchedProblems(
                "fields must share their lattice".into(),
            ));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }
}

/// Cell index and local coordinate of `t`, clamped so the cell is interior.
fn cell_of(grid: &Grid, t: f64) -> (usize, f64) {
    let dt = grid.dt();
    let raw = ((t - grid.t_start()) / dt).floor() as isize;
    let i = raw.clamp(0, grid.len() as isize - 2) as usize;
    let a = ((t - grid.node(i)) / dt).clamp(0.0, 1.0);
    (i, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bilinear_reproduces_bilinear_data() {
        let tg = Grid::new(0.0, 2.0, 9).unwrap();
        let sg = Grid::new(-1.0, 1.0, 5).unwrap();
        let f = |t: f64, s: f64| 0.3 + 1.2 * t - 0.4 * s + 0.7 * t * s;
        let field = Field2::from_fn(tg, sg, f);
        for &(t, s) in &[(0.13, -0.77), (1.999, 0.999), (0.0, -1.0), (1.0, 0.25)] {
            let got = field.eval(t, s).unwrap();
            assert!((got - f(t, s)).abs() < 1e-12, "({t},{s}): {got}");
        }
    }

    #[test]
    fn eval_rejects_points_outside_the_window() {
        let tg = Grid::new(0.0, 1.0, 3).unwrap();
        let field = Field2::from_fn(tg, tg, |_, _| 1.0);
        assert!(field.eval(1.5, 0.5).is_err());
        assert!(field.eval(0.5, -0.5).is_err());
    }

    #[test]
    fn sup_diff_sees_a_single_node() {
        let tg = Grid::new(0.0, 1.0, 4).unwrap();
        let a = Field2::from_fn(tg, tg, |t, s| t + s);
        let mut b = a.clone();
        *b.value_mut(2, 1) += 0.25;
        assert_eq!(a.sup_diff(&b).unwrap(), 0.25);
        let other = Field2::from_fn(Grid::new(0.0, 2.0, 4).unwrap(), tg, |t, s| t + s);
        assert!(a.sup_diff(&other).is_err());
    }
}
