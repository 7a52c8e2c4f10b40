//! Finite-dimensional normed spaces and their one-sided duality brackets.
//!
//! The bracket `[y, x]` measures the one-sided directional derivative of the
//! norm at `x` in direction `y`:
//!
//! ```text
//! [y, x]+ = lim_{a -> 0+} (|x + a y| - |x|) / a
//! [y, x]- = lim_{a -> 0-} (|x + a y| - |x|) / a
//! ```
//!
//! Both limits exist because `a -> |x + a y|` is convex.  For the three norms
//! supported here they have closed forms, implemented below; dissipativity
//! and stability certificates are built on them.

use crate::error::{Error, Result};
use crate::tol::TIE_TOL_ABS;
use serde::{Deserialize, Serialize};

/// Which norm a [`Space`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// Euclidean norm `sqrt(sum x_i^2)`.
    Euclidean,
    /// Max norm `max |x_i|`.
    Sup,
    /// Sum norm `sum |x_i|`.
    One,
}

/// A finite-dimensional real space together with its norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Space {
    dim: usize,
    norm: NormKind,
}

/// The two one-sided duality brackets at a point, `minus <= plus`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketValue {
    pub plus: f64,
    pub minus: f64,
}

impl Space {
    /// A `dim`-dimensional space with the given norm.  `dim` must be >= 1.
    pub fn new(dim: usize, norm: NormKind) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ParamRange("space dimension must be at least 1".into()));
        }
        Ok(Space { dim, norm })
    }

    /// Shorthand for the scalar line with the absolute value.
    pub fn scalar() -> Self {
        Space { dim: 1, norm: NormKind::Euclidean }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    /// Norm of `x`.  Errors on dimension mismatch.
    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.norm_unchecked(x))
    }

    /// Norm without the dimension check, for hot loops that validated once.
    pub(crate) fn norm_unchecked(&self, x: &[f64]) -> f64 {
        match self.norm {
            NormKind::Euclidean => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            NormKind::Sup => x.iter().fold(0.0, |m, v| m.max(v.abs())),
            NormKind::One => x.iter().map(|v| v.abs()).sum(),
        }
    }

    /// Norm of the difference `x - y`, without allocating.
    pub fn norm_diff(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        Ok(self.norm_diff_unchecked(x, y))
    }

    pub(crate) fn norm_diff_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.norm {
            NormKind::Euclidean => {
                x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
            }
            NormKind::Sup => x.iter().zip(y).fold(0.0, |m, (a, b)| m.max((a - b).abs())),
            NormKind::One => x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum(),
        }
    }

    /// Closed-form one-sided brackets `[y, x]` for this space's norm.
    ///
    /// At `x = 0` (within [`TIE_TOL_ABS`] in norm) both brackets degenerate to
    /// `plus = |y|`, `minus = -|y|`.  For the sup norm, components within
    /// [`TIE_TOL_ABS`] of the maximal `|x_i|` count as joint maximizers; for
    /// the one norm, components with `|x_i| <= TIE_TOL_ABS` count as zero.
    pub fn bracket(&self, y: &[f64], x: &[f64]) -> Result<BracketValue> {
        self.check_dim(y)?;
        self.check_dim(x)?;
        let nx = self.norm_unchecked(x);
        if nx <= TIE_TOL_ABS {
            let ny = self.norm_unchecked(y);
            return Ok(BracketValue { plus: ny, minus: -ny });
        }
        Ok(match self.norm {
            NormKind::Euclidean => {
                let dot: f64 = y.iter().zip(x).map(|(a, b)| a * b).sum();
                let v = dot / nx;
                BracketValue { plus: v, minus: v }
            }
            NormKind::Sup => {
                let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let mut plus = f64::NEG_INFINITY;
                let mut minus = f64::INFINITY;
                for (xi, yi) in x.iter().zip(y) {
                    if xi.abs() >= m - TIE_TOL_ABS {
                        let s = if *xi >= 0.0 { 1.0 } else { -1.0 };
                        plus = plus.max(s * yi);
                        minus = minus.min(s * yi);
                    }
                }
                BracketValue { plus, minus }
            }
            NormKind::One => {
                let mut signed = 0.0;
                let mut free = 0.0;
                for (xi, yi) in x.iter().zip(y) {
                    if xi.abs() <= TIE_TOL_ABS {
                        free += yi.abs();
                    } else if *xi > 0.0 {
                        signed += yi;
                    } else {
                        signed -= yi;
                    }
                }
                BracketValue { plus: signed + free, minus: signed - free }
            }
        })
    }

    /// `[y1 - y2, x1 - x2]` without allocating the differences.
    pub fn bracket_diff(
        &self,
        y1: &[f64],
        y2: &[f64],
        x1: &[f64],
        x2: &[f64],
    ) -> Result<BracketValue> {
        let dy: Vec<f64> = y1.iter().zip(y2).map(|(a, b)| a - b).collect();
        let dx: Vec<f64> = x1.iter().zip(x2).map(|(a, b)| a - b).collect();
        self.bracket(&dy, &dx)
    }
}

/// `a + s*b` componentwise.
pub(crate) fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

/// `a - b` componentwise.
pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
