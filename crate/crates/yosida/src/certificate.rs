//! Machine-checkable records of the numerical comparisons this crate makes.
//!
//! A [`Certificate`] bundles a batch of scalar comparisons ([`CertSample`])
//! with the error budget ([`BudgetBreakdown`]) those comparisons are allowed
//! to consume.  Every sample reduces to a single `margin`; the certificate
//! passes when the worst margin stays above `-budget.total()`.  Margins and
//! budgets must be expressed in the same units (absolute or relative) within
//! one certificate; the constructors on [`CertSample`] document which
//! convention they produce.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Additive slack a certificate grants before declaring a comparison broken,
/// split by the mechanism that justifies each contribution: time-step bias,
/// approximation-parameter bias, quadrature error, and floating-point
/// arithmetic.  Unused mechanisms stay at zero so the provenance of the
/// tolerance is visible in serialized output.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BudgetBreakdown {
    pub dt_term: f64,
    pub lambda_term: f64,
    pub quadrature_term: f64,
    pub arithmetic_term: f64,
}

impl BudgetBreakdown {
    /// Budget with only a quadrature contribution plus the standard
    /// arithmetic slack.
    pub fn quadrature(quadrature_term: f64) -> Self {
        Self {
            quadrature_term,
            arithmetic_term: crate::tol::ARITHMETIC_SLACK,
            ..Self::default()
        }
    }

    /// Total slack granted by this budget.
    pub fn total(&self) -> f64 {
        self.dt_term + self.lambda_term + self.quadrature_term + self.arithmetic_term
    }
}

/// One checked comparison.  `lhs` and `rhs` are the two sides as computed;
/// `margin` is the distance from violation (nonnegative means the comparison
/// holds outright, and anything above `-budget.total()` still passes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertSample {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

impl CertSample {
    /// Sample certifying the one-sided bound `lhs <= rhs`; the margin is the
    /// absolute gap `rhs - lhs`.
    pub fn inequality(label: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self { label: label.into(), lhs, rhs, margin: rhs - lhs }
    }

    /// Sample certifying `value == reference` in absolute terms; the margin is
    /// `-(value - reference).abs()`, so the certificate budget plays the role
    /// of the absolute tolerance.
    pub fn equality(label: impl Into<String>, value: f64, reference: f64) -> Self {
        Self { label: label.into(), lhs: value, rhs: reference, margin: -(value - reference).abs() }
    }

    /// Sample certifying `value == reference` in relative terms; the margin is
    /// the negated relative error, so the certificate budget plays the role of
    /// the relative tolerance.  Falls back to absolute when the reference is
    /// smaller than the arithmetic slack.
    pub fn equality_rel(label: impl Into<String>, value: f64, reference: f64) -> Self {
        let scale = reference.abs().max(crate::tol::ARITHMETIC_SLACK);
        Self {
            label: label.into(),
            lhs: value,
            rhs: reference,
            margin: -(value - reference).abs() / scale,
        }
    }
}

/// A named batch of comparisons sharing one error budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    pub samples: Vec<CertSample>,
    pub budget: BudgetBreakdown,
    /// Smallest sample margin (0 when there are no samples).
    pub worst_margin: f64,
    /// True when every margin stays above `-budget.total()`.  A certificate
    /// with no samples fails: it certifies nothing.
    pub pass: bool,
}

impl Certificate {
    /// Assemble a certificate, computing the worst margin and the verdict.
    pub fn from_samples(
        name: impl Into<String>,
        samples: Vec<CertSample>,
        budget: BudgetBreakdown,
    ) -> Self {
        let worst_margin = samples.iter().map(|s| s.margin).fold(f64::INFINITY, f64::min);
        let pass = !samples.is_empty()
            && worst_margin.is_finite()
            && worst_margin >= -budget.total();
        let worst_margin = if samples.is_empty() { 0.0 } else { worst_margin };
        Self { name: name.into(), samples, budget, worst_margin, pass }
    }

    /// Serialize to pretty JSON (deterministic: field order is fixed and
    /// floats print in shortest round-trip form).
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Write the JSON form to a file.
    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    /// One-line human-readable verdict.
    pub fn one_line(&self) -> String {
        format!(
            "{} {}: worst margin {} against budget {} over {} samples",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.worst_margin,
            self.budget.total(),
            self.samples.len()
        )
    }

    /// Row for a summary CSV: name, sample count, worst margin, budget, verdict.
    pub fn summary_row(&self) -> [String; 5] {
        [
            self.name.clone(),
            self.samples.len().to_string(),
            self.worst_margin.to_string(),
            self.budget.total().to_string(),
            if self.pass { "pass".into() } else { "fail".into() },
        ]
    }
}
