//! Odd theta function, Kronecker elliptic function and Weierstrass `℘`.
//!
//! The theta function is the odd Jacobi theta function written as
//!
//! ```text
//! ϑ(z|τ) = -Σ_{k∈ℤ} exp(πiτ(k+½)² + 2πi(z+½)(k+½)),   Im τ > 0
//! ```
//!
//! and every derivative used here (`ϑ'`, `ϑ''`, `ϑ'''`) is obtained by
//! differentiating that series term by term. No reduction of `z` modulo the
//! lattice `ℤ ⊕ τℤ` is ever performed: the quasi-periodicity laws are checked
//! by the tests, they are not used as shortcuts.
//!
//! The Kronecker function
//!
//! ```text
//! φ(z, u) = ϑ'(0) ϑ(z + u) / (ϑ(z) ϑ(u))
//! ```
//!
//! is the scalar (`M = 1`) case of the Baxter-Belavin R-matrix.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Modular parameter `τ` of the elliptic curve `ℂ/(ℤ ⊕ τℤ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Complex64", into = "Complex64")]
pub struct ModularTau(Complex64);

impl ModularTau {
    pub fn new(tau: Complex64) -> Result<Self> {
        if tau.im > 0.0 && tau.re.is_finite() && tau.im.is_finite() {
            Ok(Self(tau))
        } else {
            Err(Error::InvalidTau(tau))
        }
    }

    /// `τ = i`, the square lattice.
    pub fn square() -> Self {
        Self(I)
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    /// Nome `q = exp(πiτ)`.
    pub fn nome(self) -> Complex64 {
        (I * PI * self.0).exp()
    }
}

impl TryFrom<Complex64> for ModularTau {
    type Error = Error;

    fn try_from(tau: Complex64) -> Result<Self> {
        Self::new(tau)
    }
}

impl From<ModularTau> for Complex64 {
    fn from(tau: ModularTau) -> Self {
        tau.0
    }
}

/// Truncation policy for the theta series, plus the magnitude floor used to
/// reject evaluations at (or numerically at) a zero of a theta denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    /// Terms whose magnitude falls below this are dropped.
    pub term_tolerance: f64,
    /// Hard cap on the summation index `|k|`.
    pub max_terms: usize,
    /// `|ϑ|` below this in a denominator is reported as a pole.
    pub pole_floor: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            term_tolerance: 1e-20,
            max_terms: 64,
            pole_floor: 1e-10,
        }
    }
}

impl SeriesConfig {
    pub fn new(term_tolerance: f64, max_terms: usize) -> Result<Self> {
        let cfg = Self {
            term_tolerance,
            max_terms,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_pole_floor(mut self, floor: f64) -> Self {
        self.pole_floor = floor;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.term_tolerance > 0.0 && self.term_tolerance.is_finite()) {
            return Err(Error::InvalidSeriesConfig(format!(
                "term_tolerance must be positive, got {}",
                self.term_tolerance
            )));
        }
        if self.max_terms < 8 {
            return Err(Error::InvalidSeriesConfig(format!(
                "max_terms must be at least 8, got {}",
                self.max_terms
            )));
        }
        if self.pole_floor.is_nan() || self.pole_floor < 0.0 {
            return Err(Error::InvalidSeriesConfig(format!(
                "pole_floor must be non-negative, got {}",
                self.pole_floor
            )));
        }
        Ok(())
    }

    /// Smallest `K` with `|q|^{(K+½)²} < term_tolerance`.
    fn min_index(&self, tau: ModularTau) -> usize {
        let log_q = -PI * tau.value().im;
        let ratio = self.term_tolerance.ln() / log_q;
        if ratio <= 0.25 {
            return 0;
        }
        (ratio.sqrt() - 0.5).ceil().max(0.0) as usize
    }
}

/// A point `z` on the torus `ℂ/(ℤ ⊕ τℤ)`, stored as its lift to `ℂ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    pub z: Complex64,
}

/// Index `a = (a1, a2) ∈ ℤ_M × ℤ_M` of an `M`-torsion point
/// `ω_a = (a1 + a2 τ)/M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HalfPeriodIndex {
    a1: usize,
    a2: usize,
    m: usize,
}

impl HalfPeriodIndex {
    pub fn new(a1: usize, a2: usize, m: usize) -> Result<Self> {
        if m == 0 || a1 >= m || a2 >= m {
            return Err(Error::InvalidHalfPeriod { a1, a2, m });
        }
        Ok(Self { a1, a2, m })
    }

    pub fn a1(&self) -> usize {
        self.a1
    }

    pub fn a2(&self) -> usize {
        self.a2
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// All `M²` indices, `a1` major.
    pub fn all(m: usize) -> impl Iterator<Item = HalfPeriodIndex> {
        (0..m).flat_map(move |a1| (0..m).map(move |a2| HalfPeriodIndex { a1, a2, m }))
    }

    /// `ω_a = (a1 + a2 τ)/M`.
    pub fn omega(&self, tau: ModularTau) -> Complex64 {
        (self.a1 as f64 + self.a2 as f64 * tau.value()) / self.m as f64
    }
}

/// Evaluation context for a fixed `τ` and truncation policy.
///
/// Caches `ϑ'(0)` and `ϑ'''(0)`, which every Kronecker and `℘` evaluation
/// needs. Immutable after construction, so it can be shared across threads.
#[derive(Debug, Clone)]
pub struct Elliptic {
    tau: ModularTau,
    cfg: SeriesConfig,
    min_index: usize,
    dtheta0: Complex64,
    d3theta0: Complex64,
}

impl Elliptic {
    pub fn new(tau: ModularTau, cfg: SeriesConfig) -> Result<Self> {
        cfg.validate()?;
        let mut ctx = Self {
            tau,
            cfg,
            min_index: cfg.min_index(tau),
            dtheta0: Complex64::new(0.0, 0.0),
            d3theta0: Complex64::new(0.0, 0.0),
        };
        ctx.dtheta0 = ctx.theta_derivative(Complex64::new(0.0, 0.0), 1)?;
        ctx.d3theta0 = ctx.theta_derivative(Complex64::new(0.0, 0.0), 3)?;
        Ok(ctx)
    }

    pub fn tau(&self) -> ModularTau {
        self.tau
    }

    pub fn config(&self) -> &SeriesConfig {
        &self.cfg
    }

    /// `ϑ'(0)`.
    pub fn theta_prime_zero(&self) -> Complex64 {
        self.dtheta0
    }

    /// `ϑ'''(0)`.
    pub fn theta_third_zero(&self) -> Complex64 {
        self.d3theta0
    }

    pub fn theta(&self, z: Complex64) -> Result<Complex64> {
        self.theta_derivative(z, 0)
    }

    /// `d^order/dz^order ϑ(z)`, by term-by-term differentiation.
    pub fn theta_derivative(&self, z: Complex64, order: u32) -> Result<Complex64> {
        let tau = self.tau.value();
        let shifted = z + 0.5;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut idx = 0usize;
        loop {
            let mut pair_max: f64 = 0.0;
            for n in [idx as f64 + 0.5, -(idx as f64) - 0.5] {
                let exponent = I * PI * tau * (n * n) + 2.0 * PI * I * shifted * n;
                let mut term = exponent.exp();
                if order > 0 {
                    term *= (2.0 * PI * I * n).powu(order);
                }
                pair_max = pair_max.max(term.norm());
                sum += term;
            }
            if idx >= self.min_index && pair_max < self.cfg.term_tolerance {
                break;
            }
            idx += 1;
            if idx > self.cfg.max_terms {
                return Err(Error::Divergence {
                    z,
                    max_terms: self.cfg.max_terms,
                });
            }
        }
        Ok(-sum)
    }

    /// `ϑ(z)`, rejected when below the pole floor.
    pub fn guarded_theta(&self, z: Complex64, what: &'static str) -> Result<Complex64> {
        let value = self.theta(z)?;
        if value.norm() < self.cfg.pole_floor {
            return Err(Error::Pole {
                what,
                magnitude: value.norm(),
                floor: self.cfg.pole_floor,
            });
        }
        Ok(value)
    }

    /// Kronecker function `φ(z, u) = ϑ'(0)ϑ(z+u)/(ϑ(z)ϑ(u))`.
    pub fn kronecker_phi(&self, z: Complex64, u: Complex64) -> Result<Complex64> {
        let den_z = self.guarded_theta(z, "theta(z)")?;
        let den_u = self.guarded_theta(u, "theta(u)")?;
        let num = self.theta(z + u)?;
        Ok(self.dtheta0 * num / (den_z * den_u))
    }

    /// `φ_a(z, s) = exp(2πi a2 z / M) φ(z, s)`. The second argument is passed
    /// already combined, e.g. `s = ω_a + ħ/M`.
    pub fn phi_a(&self, a: HalfPeriodIndex, z: Complex64, s: Complex64) -> Result<Complex64> {
        let prefactor = (2.0 * PI * I * (a.a2() as f64) * z / a.m() as f64).exp();
        Ok(prefactor * self.kronecker_phi(z, s)?)
    }

    /// Weierstrass `℘(z) = -(log ϑ)''(z) + ϑ'''(0)/(3ϑ'(0))`.
    ///
    /// The constant is the one that removes the `z⁰` term of the Laurent
    /// expansion at the origin, so `℘(z) = 1/z² + O(z²)`.
    pub fn weierstrass_p(&self, z: Complex64) -> Result<Complex64> {
        let t0 = self.guarded_theta(z, "theta(z)")?;
        let t1 = self.theta_derivative(z, 1)?;
        let t2 = self.theta_derivative(z, 2)?;
        let log_second = (t2 * t0 - t1 * t1) / (t0 * t0);
        Ok(-log_second + self.d3theta0 / (3.0 * self.dtheta0))
    }

    /// Relative residual of the Fay addition formula
    ///
    /// ```text
    /// φ(z1,u1)φ(z2,u2) = φ(z1,u1+u2)φ(z2−z1,u2) + φ(z2,u1+u2)φ(z1−z2,u1)
    /// ```
    ///
    /// normalized by `max(1, largest of the three products)`.
    pub fn check_fay(&self, z1: Complex64, u1: Complex64, z2: Complex64, u2: Complex64) -> Result<f64> {
        let lhs = self.kronecker_phi(z1, u1)? * self.kronecker_phi(z2, u2)?;
        let a = self.kronecker_phi(z1, u1 + u2)? * self.kronecker_phi(z2 - z1, u2)?;
        let b = self.kronecker_phi(z2, u1 + u2)? * self.kronecker_phi(z1 - z2, u1)?;
        let scale = lhs.norm().max(a.norm()).max(b.norm()).max(1.0);
        Ok((lhs - a - b).norm() / scale)
    }

    /// Relative residual of the `n`-point generalization of the Fay formula
    ///
    /// ```text
    /// Π_i φ(w_i,u_i) = Σ_i φ(w_i, Σ_l u_l) Π_{j≠i} φ(w_j − w_i, u_j)
    /// ```
    ///
    /// normalized by `max(1, largest product)`.
    pub fn check_higher_fay(&self, ws: &[Complex64], us: &[Complex64]) -> Result<f64> {
        if ws.len() != us.len() {
            return Err(Error::LengthMismatch(ws.len(), us.len()));
        }
        if ws.is_empty() {
            return Err(Error::OutOfRange("need at least one point".into()));
        }
        let total: Complex64 = us.iter().sum();
        let mut lhs = Complex64::new(1.0, 0.0);
        for (&w, &u) in ws.iter().zip(us) {
            lhs *= self.kronecker_phi(w, u)?;
        }
        let mut rhs = Complex64::new(0.0, 0.0);
        let mut scale = lhs.norm().max(1.0);
        for (i, &wi) in ws.iter().enumerate() {
            let mut term = self.kronecker_phi(wi, total)?;
            for (j, (&wj, &uj)) in ws.iter().zip(us).enumerate() {
                if j != i {
                    term *= self.kronecker_phi(wj - wi, uj)?;
                }
            }
            scale = scale.max(term.norm());
            rhs += term;
        }
        Ok((lhs - rhs).norm() / scale)
    }
}

pub fn theta(z: Complex64, tau: ModularTau, cfg: SeriesConfig) -> Result<Complex64> {
    Elliptic::new(tau, cfg)?.theta(z)
}

/// `ϑ'(0)` (`order = 1`) or `ϑ'''(0)` (`order = 3`).
pub fn theta_d0(tau: ModularTau, order: u32, cfg: SeriesConfig) -> Result<Complex64> {
    if order != 1 && order != 3 {
        return Err(Error::UnsupportedOrder(order));
    }
    Elliptic::new(tau, cfg)?.theta_derivative(Complex64::new(0.0, 0.0), order)
}

pub fn kronecker_phi(z: Complex64, u: Complex64, tau: ModularTau, cfg: SeriesConfig) -> Result<Complex64> {
    Elliptic::new(tau, cfg)?.kronecker_phi(z, u)
}

pub fn phi_a(a: HalfPeriodIndex, z: Complex64, s: Complex64, tau: ModularTau, cfg: SeriesConfig) -> Result<Complex64> {
    Elliptic::new(tau, cfg)?.phi_a(a, z, s)
}

pub fn weierstrass_p(z: Complex64, tau: ModularTau, cfg: SeriesConfig) -> Result<Complex64> {
    Elliptic::new(tau, cfg)?.weierstrass_p(z)
}

pub fn check_fay(
    z1: Complex64,
    u1: Complex64,
    z2: Complex64,
    u2: Complex64,
    tau: ModularTau,
    cfg: SeriesConfig,
) -> Result<f64> {
    Elliptic::new(tau, cfg)?.check_fay(z1, u1, z2, u2)
}

pub fn check_higher_fay(ws: &[Complex64], us: &[Complex64], tau: ModularTau, cfg: SeriesConfig) -> Result<f64> {
    Elliptic::new(tau, cfg)?.check_higher_fay(ws, us)
}

/// Distance from `w` to the nearest lattice point `m + nτ`.
pub fn lattice_distance(w: Complex64, tau: ModularTau) -> f64 {
    let tau = tau.value();
    let n0 = (w.im / tau.im).round();
    let mut best = f64::INFINITY;
    for dn in -1..=1 {
        let n = n0 + dn as f64;
        let rest = w - n * tau;
        let m0 = rest.re.round();
        for dm in -1..=1 {
            let m = m0 + dm as f64;
            best = best.min((rest - m).norm());
        }
    }
    best
}
