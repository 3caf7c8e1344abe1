//! Seeded sampling of generic points, `ħ`, `η` and `τ`.
//!
//! Every random draw goes through a [`ChaCha8Rng`] keyed by a 64-bit seed and
//! a stream number, so a cell of a sweep can be replayed in isolation.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::elliptic::{lattice_distance, Elliptic, HalfPeriodIndex, ModularTau};
use crate::error::{Error, Result};

/// Minimum lattice distance from a pole for sampled differences.
pub const DEFAULT_POLE_MARGIN: f64 = 0.05;
/// Minimum `|ϑ|` at the arguments that fix `ħ`.
pub const DEFAULT_THETA_FLOOR: f64 = 1e-3;
/// Rejection attempts before giving up.
pub const MAX_ATTEMPTS: usize = 10_000;

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform point of the fundamental parallelogram `{s + tτ : 0 ≤ s, t < 1}`.
pub fn uniform_point<R: Rng + ?Sized>(rng: &mut R, tau: ModularTau) -> Complex64 {
    let s: f64 = rng.random();
    let t: f64 = rng.random();
    s + t * tau.value()
}

/// Rules a sample of `n` points must satisfy: every `z_i − z_j − o` for
/// `i ≠ j` and every offset `o`, and every `z_i − z_i − o` for nonzero
/// offsets, stays `margin` away from the lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRules {
    pub offsets: Vec<Complex64>,
    pub margin: f64,
}

impl Default for PointRules {
    fn default() -> Self {
        Self {
            offsets: vec![Complex64::new(0.0, 0.0)],
            margin: DEFAULT_POLE_MARGIN,
        }
    }
}

impl PointRules {
    /// Default rules with `±o` added for every given offset.
    pub fn with_offsets(offsets: &[Complex64]) -> Self {
        let mut rules = Self::default();
        for o in offsets {
            rules.offsets.push(*o);
            rules.offsets.push(-*o);
        }
        rules
    }

    pub fn accepts(&self, zs: &[Complex64], tau: ModularTau) -> bool {
        for (i, zi) in zs.iter().enumerate() {
            for (j, zj) in zs.iter().enumerate() {
                for o in &self.offsets {
                    if i == j && o.norm() == 0.0 {
                        continue;
                    }
                    if lattice_distance(zi - zj - o, tau) < self.margin {
                        return false;
                    }
                }
            }
        }
        true
    }
}

pub fn sample_points<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    tau: ModularTau,
    rules: &PointRules,
) -> Result<Vec<Complex64>> {
    for _ in 0..MAX_ATTEMPTS {
        let zs: Vec<Complex64> = (0..n).map(|_| uniform_point(rng, tau)).collect();
        if rules.accepts(&zs, tau) {
            return Ok(zs);
        }
    }
    Err(Error::SamplingExhausted(MAX_ATTEMPTS))
}

/// `ħ` in the fundamental parallelogram with every `|ϑ(ħ/M + ω_a)|` and
/// `|ϑ(ħ)|` at least `floor`.
pub fn sample_hbar<R: Rng + ?Sized>(rng: &mut R, ell: &Elliptic, m: usize, floor: f64) -> Result<Complex64> {
    let tau = ell.tau();
    for _ in 0..MAX_ATTEMPTS {
        let h = uniform_point(rng, tau);
        if hbar_is_generic(ell, h, m, floor)? {
            return Ok(h);
        }
    }
    Err(Error::SamplingExhausted(MAX_ATTEMPTS))
}

pub fn hbar_is_generic(ell: &Elliptic, hbar: Complex64, m: usize, floor: f64) -> Result<bool> {
    let tau = ell.tau();
    if ell.theta(hbar)?.norm() < floor {
        return Ok(false);
    }
    for a in HalfPeriodIndex::all(m) {
        if ell.theta(hbar / m as f64 + a.omega(tau))?.norm() < floor {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `η` with `η`, `2η` away from the lattice.
pub fn sample_eta<R: Rng + ?Sized>(rng: &mut R, tau: ModularTau, margin: f64) -> Result<Complex64> {
    for _ in 0..MAX_ATTEMPTS {
        let eta = uniform_point(rng, tau);
        if lattice_distance(eta, tau) >= margin && lattice_distance(2.0 * eta, tau) >= margin {
            return Ok(eta);
        }
    }
    Err(Error::SamplingExhausted(MAX_ATTEMPTS))
}

/// `τ` with `Im τ ∈ [0.8, 2]`, `|Re τ| ≤ 0.5`.
pub fn sample_tau<R: Rng + ?Sized>(rng: &mut R) -> ModularTau {
    let re = rng.random_range(-0.5..=0.5);
    let im = rng.random_range(0.8..=2.0);
    ModularTau::new(Complex64::new(re, im)).expect("positive imaginary part")
}
