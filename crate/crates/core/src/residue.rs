//! Residues of operator-valued meromorphic functions by trapezoidal
//! quadrature on a circle.
//!
//! For `f` with a single simple pole inside the circle `|z − c| = r` and no
//! other singularity within a larger disc, the trapezoidal rule
//!
//! ```text
//! (1/2πi) ∮ f dz ≈ (r/n) Σ_k f(c + r e^{iθ_k}) e^{iθ_k},   θ_k = 2πk/n
//! ```
//!
//! converges geometrically in `n`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::{rel_residual, DenseOperator};

/// Node and radius policy for [`adaptive_residue`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureBudget {
    pub radius: f64,
    pub start_nodes: usize,
    pub max_nodes: usize,
    /// Two successive estimates agreeing to this (relative) ends the doubling.
    pub agreement: f64,
}

impl Default for QuadratureBudget {
    fn default() -> Self {
        Self {
            radius: 1e-2,
            start_nodes: 64,
            max_nodes: 512,
            agreement: 1e-7,
        }
    }
}

/// A residue estimate and the node count it was obtained with.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueEstimate {
    pub value: DenseOperator,
    pub nodes: usize,
    /// Relative change between the last two estimates.
    pub change: f64,
}

fn node_point(center: Complex64, radius: f64, theta: f64) -> (Complex64, Complex64) {
    let phase = Complex64::from_polar(1.0, theta);
    (center + radius * phase, phase)
}

/// Accumulate `Σ f(z_k) e^{iθ_k}` over the given angles.
fn accumulate<F>(
    f: &mut F,
    center: Complex64,
    radius: f64,
    thetas: impl Iterator<Item = (usize, f64)>,
    acc: &mut Option<DenseOperator>,
) -> Result<()>
where
    F: FnMut(Complex64) -> Result<DenseOperator>,
{
    for (node, theta) in thetas {
        let (z, phase) = node_point(center, radius, theta);
        let value = f(z).map_err(|source| Error::QuadratureNode {
            node,
            z,
            source: Box::new(source),
        })?;
        match acc {
            Some(sum) => sum.add_assign_scaled(phase, &value)?,
            None => *acc = Some(value.scale(phase)),
        }
    }
    Ok(())
}

/// `(1/2πi) ∮ f dz` over the circle of the given radius, `nodes` points.
pub fn numeric_residue<F>(mut f: F, center: Complex64, radius: f64, nodes: usize) -> Result<DenseOperator>
where
    F: FnMut(Complex64) -> Result<DenseOperator>,
{
    if nodes == 0 || radius.is_nan() || radius <= 0.0 {
        return Err(Error::OutOfRange(format!(
            "quadrature needs nodes > 0 and radius > 0, got {nodes}, {radius}"
        )));
    }
    let step = 2.0 * PI / nodes as f64;
    let mut acc = None;
    accumulate(
        &mut f,
        center,
        radius,
        (0..nodes).map(|k| (k, k as f64 * step)),
        &mut acc,
    )?;
    let sum = acc.expect("nodes > 0");
    Ok(sum.scale(Complex64::new(radius / nodes as f64, 0.0)))
}

/// Residue with node doubling until two successive estimates agree to
/// `budget.agreement`, or `budget.max_nodes` is reached. Previously evaluated
/// nodes are reused.
pub fn adaptive_residue<F>(mut f: F, center: Complex64, budget: &QuadratureBudget) -> Result<ResidueEstimate>
where
    F: FnMut(Complex64) -> Result<DenseOperator>,
{
    let mut nodes = budget.start_nodes.max(1);
    if budget.radius.is_nan() || budget.radius <= 0.0 {
        return Err(Error::OutOfRange(format!(
            "quadrature radius must be positive, got {}",
            budget.radius
        )));
    }
    let mut acc = None;
    let step = 2.0 * PI / nodes as f64;
    accumulate(
        &mut f,
        center,
        budget.radius,
        (0..nodes).map(|k| (k, k as f64 * step)),
        &mut acc,
    )?;
    let scale = |sum: &DenseOperator, n: usize| sum.scale(Complex64::new(budget.radius / n as f64, 0.0));
    let mut estimate = scale(acc.as_ref().expect("nodes > 0"), nodes);
    let mut change = f64::INFINITY;
    while nodes * 2 <= budget.max_nodes {
        let step = PI / nodes as f64;
        accumulate(
            &mut f,
            center,
            budget.radius,
            (0..nodes).map(|k| (nodes + k, (2 * k + 1) as f64 * step)),
            &mut acc,
        )?;
        nodes *= 2;
        let next = scale(acc.as_ref().expect("nodes > 0"), nodes);
        change = rel_residual(&estimate, &next)?;
        estimate = next;
        if change <= budget.agreement {
            break;
        }
    }
    Ok(ResidueEstimate {
        value: estimate,
        nodes,
        change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{Elliptic, ModularTau, SeriesConfig};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kronecker_residue_is_one() {
        let e = Elliptic::new(ModularTau::square(), SeriesConfig::default()).unwrap();
        let center = c(0.3, 0.2);
        let hbar = c(0.17, 0.05);
        let res = numeric_residue(
            |z| {
                let v = e.kronecker_phi(z - center, hbar)?;
                Ok(DenseOperator::identity(3).scale(v))
            },
            center,
            1e-2,
            64,
        )
        .unwrap();
        let err = rel_residual(&res, &DenseOperator::identity(3)).unwrap();
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn analytic_function_has_zero_residue() {
        let res = numeric_residue(
            |_| Ok(DenseOperator::identity(2).scale(c(3.0, -1.0))),
            c(1.0, 1.0),
            1e-2,
            64,
        )
        .unwrap();
        assert!(res.frobenius_norm() < 1e-12);
    }

    #[test]
    fn node_failure_is_reported() {
        let e = Elliptic::new(ModularTau::square(), SeriesConfig::default()).unwrap();
        // Node 0 lands exactly on the pole of φ(z, ·) at z = 0.
        let err = numeric_residue(
            |z| Ok(DenseOperator::scalar(e.kronecker_phi(z, c(0.2, 0.1))?)),
            c(-0.01, 0.0),
            1e-2,
            16,
        )
        .unwrap_err();
        assert!(matches!(err, Error::QuadratureNode { node: 0, .. }));
    }

    #[test]
    fn adaptive_doubling_converges() {
        let pole = c(0.0, 0.0);
        let est = adaptive_residue(
            |z| Ok(DenseOperator::scalar(2.0 / (z - pole) + 1.0 / (z - 0.015))),
            pole,
            &QuadratureBudget {
                start_nodes: 8,
                ..QuadratureBudget::default()
            },
        )
        .unwrap();
        assert!(est.nodes > 8);
        assert!((est.value.matrix()[(0, 0)] - 2.0).norm() < 1e-7);
    }
}
