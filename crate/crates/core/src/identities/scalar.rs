//! Scalar kernel identities evaluated directly from `φ(ħ, ·)`, with no
//! matrices involved. They are what the `M = 1` matrix path must reproduce.

use num_complex::Complex64;

use super::report::Residual;
use super::sets::IndexSubset;
use crate::elliptic::Elliptic;
use crate::error::{Error, Result};

/// The two sums of the kernel identity and their largest single term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarSums {
    pub first: Complex64,
    pub second: Complex64,
    pub largest_term: f64,
}

impl ScalarSums {
    pub fn residual(&self) -> Residual {
        Residual::new((self.first - self.second).norm(), self.largest_term)
    }
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::OutOfRange(format!("k = {k} must be in 1..={n}")));
    }
    Ok(())
}

/// ```text
/// Σ_{|I|=k} ∏_{i∈I, j∈Iᶜ} φ(x_i − x_j) ∏_{i∈I, j} φ(y_j − x_i)
///   vs  Σ_{|I|=k} ∏_{i∈I, j∈Iᶜ} φ(y_j − y_i) ∏_{i∈I, j} φ(y_i − x_j)
/// ```
/// with `φ(w) = φ(ħ, w)`.
pub fn kernel_sums(
    ell: &Elliptic,
    hbar: Complex64,
    k: usize,
    xs: &[Complex64],
    ys: &[Complex64],
) -> Result<ScalarSums> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    let n = xs.len();
    check_k(k, n)?;
    let phi = |w: Complex64| ell.kronecker_phi(hbar, w);
    let idx: Vec<usize> = (0..n).collect();
    let mut out = ScalarSums {
        first: Complex64::new(0.0, 0.0),
        second: Complex64::new(0.0, 0.0),
        largest_term: 0.0,
    };
    for i_set in IndexSubset::subsets_of_size(&idx, k) {
        let ic = i_set.complement();
        let mut t1 = Complex64::new(1.0, 0.0);
        let mut t2 = Complex64::new(1.0, 0.0);
        for i in i_set.iter() {
            for j in ic.iter() {
                t1 *= phi(xs[i] - xs[j])?;
                t2 *= phi(ys[j] - ys[i])?;
            }
            for j in 0..n {
                t1 *= phi(ys[j] - xs[i])?;
                t2 *= phi(ys[i] - xs[j])?;
            }
        }
        out.first += t1;
        out.second += t2;
        out.largest_term = out.largest_term.max(t1.norm()).max(t2.norm());
    }
    Ok(out)
}

/// ```text
/// Σ_{|I|=k} ∏_{i∈I, j∉I} φ(z_j − z_i) φ(z_i − z_j − η)
///   vs  Σ_{|I|=k} ∏_{i∈I, j∉I} φ(z_i − z_j) φ(z_j − z_i − η)
/// ```
pub fn ruijsenaars_sums(
    ell: &Elliptic,
    hbar: Complex64,
    eta: Complex64,
    k: usize,
    zs: &[Complex64],
) -> Result<ScalarSums> {
    let n = zs.len();
    check_k(k, n)?;
    let phi = |w: Complex64| ell.kronecker_phi(hbar, w);
    let idx: Vec<usize> = (0..n).collect();
    let mut out = ScalarSums {
        first: Complex64::new(0.0, 0.0),
        second: Complex64::new(0.0, 0.0),
        largest_term: 0.0,
    };
    for i_set in IndexSubset::subsets_of_size(&idx, k) {
        let mut t1 = Complex64::new(1.0, 0.0);
        let mut t2 = Complex64::new(1.0, 0.0);
        for i in i_set.iter() {
            for j in i_set.complement().iter() {
                t1 *= phi(zs[j] - zs[i])? * phi(zs[i] - zs[j] - eta)?;
                t2 *= phi(zs[i] - zs[j])? * phi(zs[j] - zs[i] - eta)?;
            }
        }
        out.first += t1;
        out.second += t2;
        out.largest_term = out.largest_term.max(t1.norm()).max(t2.norm());
    }
    Ok(out)
}

pub fn check_scalar_kernel(
    ell: &Elliptic,
    hbar: Complex64,
    k: usize,
    xs: &[Complex64],
    ys: &[Complex64],
) -> Result<Residual> {
    Ok(kernel_sums(ell, hbar, k, xs, ys)?.residual())
}

pub fn check_ruijsenaars_commutativity(
    ell: &Elliptic,
    hbar: Complex64,
    eta: Complex64,
    k: usize,
    zs: &[Complex64],
) -> Result<Residual> {
    Ok(ruijsenaars_sums(ell, hbar, eta, k, zs)?.residual())
}

/// Kernel sums at `x_i = z_i`, `y_i = z_i − η` with `ħ = 2η`, compared sum
/// by sum against the commutativity sums at the same `ħ`.
///
/// Every pair inside `I` contributes `φ(w − η)φ(−w − η) = (ϑ'(0)/ϑ(2η))²`
/// and every diagonal pair `φ(−η)`, so the kernel sums equal
/// `C · (second, first)` with `C = φ(−η)^k (ϑ'(0)/ϑ(2η))^{k(k−1)}`.
pub fn check_eta_substitution(ell: &Elliptic, eta: Complex64, k: usize, zs: &[Complex64]) -> Result<Residual> {
    let hbar = 2.0 * eta;
    let ys: Vec<Complex64> = zs.iter().map(|z| z - eta).collect();
    let kernel = kernel_sums(ell, hbar, k, zs, &ys)?;
    let ruij = ruijsenaars_sums(ell, hbar, eta, k, zs)?;
    let pair = ell.theta_prime_zero() / ell.guarded_theta(hbar, "theta(2 eta)")?;
    let c = ell.kronecker_phi(hbar, -eta)?.powu(k as u32) * pair.powu((k * (k - 1)) as u32);
    let r1 = Residual::scalar(kernel.first, c * ruij.second);
    let r2 = Residual::scalar(kernel.second, c * ruij.first);
    let scale = kernel.largest_term.max(c.norm() * ruij.largest_term);
    Ok(Residual::new(r1.abs.max(r2.abs), scale))
}
