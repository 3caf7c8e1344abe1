use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::tensor::DenseOperator;

/// Size of an identity's defect together with the yardstick it is measured
/// against. `rel = abs / max(1, operand_norm)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub abs: f64,
    pub operand_norm: f64,
    pub rel: f64,
}

impl Residual {
    pub fn new(abs: f64, operand_norm: f64) -> Self {
        Self {
            abs,
            operand_norm,
            rel: abs / operand_norm.max(1.0),
        }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0)
    }

    /// `lhs − rhs` measured against the larger of the two sides.
    pub fn between(lhs: &DenseOperator, rhs: &DenseOperator) -> crate::Result<Self> {
        let abs = lhs.sub(rhs)?.frobenius_norm();
        Ok(Self::new(abs, lhs.frobenius_norm().max(rhs.frobenius_norm())))
    }

    pub fn scalar(lhs: Complex64, rhs: Complex64) -> Self {
        Self::new((lhs - rhs).norm(), lhs.norm().max(rhs.norm()))
    }

    /// The worse of two residuals, by relative size.
    pub fn max(self, other: Self) -> Self {
        if other.rel > self.rel || self.rel.is_nan() {
            other
        } else {
            self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_residual(rel: f64, tolerance: f64) -> Self {
        if rel <= tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Parameters a check was run with. Unused fields stay `None`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CheckParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hbar: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Outcome of one identity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub params: CheckParams,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub operand_norm: f64,
    pub verdict: Verdict,
    pub points: Vec<Complex64>,
    /// Named sub-residuals (relative), when a check has several parts.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<(String, f64)>,
    /// Remarks about how the check was interpreted.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl IdentityReport {
    pub fn new(
        identity: impl Into<String>,
        params: CheckParams,
        residual: Residual,
        tolerance: f64,
        points: Vec<Complex64>,
    ) -> Self {
        Self {
            identity: identity.into(),
            params,
            abs_residual: residual.abs,
            rel_residual: residual.rel,
            operand_norm: residual.operand_norm,
            verdict: Verdict::from_residual(residual.rel, tolerance),
            points,
            components: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn with_components(mut self, components: Vec<(String, f64)>) -> Self {
        self.components = components;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_floor() {
        assert_eq!(Residual::new(1e-3, 0.5).rel, 1e-3);
        assert_eq!(Residual::new(1e-3, 10.0).rel, 1e-4);
    }

    #[test]
    fn verdict_boundary() {
        assert_eq!(Verdict::from_residual(1e-8, 1e-8), Verdict::Pass);
        assert_eq!(Verdict::from_residual(2e-8, 1e-8), Verdict::Fail);
        assert_eq!(Verdict::from_residual(f64::NAN, 1e-8), Verdict::Fail);
    }

    #[test]
    fn max_picks_worse() {
        let a = Residual::new(1.0, 10.0);
        let b = Residual::new(1.0, 100.0);
        assert_eq!(a.max(b), a);
        assert_eq!(b.max(a), a);
    }
}
