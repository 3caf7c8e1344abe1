//! Reference implementations shared by the integration tests. Nothing here
//! calls into the library's elliptic module.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

/// Neumaier-compensated complex sum.
#[derive(Default)]
pub struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

impl CompensatedSum {
    fn add_part(sum: f64, comp: f64, x: f64) -> (f64, f64) {
        let t = sum + x;
        let c = if sum.abs() >= x.abs() {
            (sum - t) + x
        } else {
            (x - t) + sum
        };
        (t, comp + c)
    }

    pub fn add(&mut self, x: Complex64) {
        let (re, cre) = Self::add_part(self.sum.re, self.comp.re, x.re);
        let (im, cim) = Self::add_part(self.sum.im, self.comp.im, x.im);
        self.sum = Complex64::new(re, im);
        self.comp = Complex64::new(cre, cim);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

/// `2 Σ_{k≥0} (−1)^k e^{πiτ(k+½)²} sin((2k+1)πz)`, summed until the Gaussian
/// factor drops below `1e-30`, at most 200 terms.
pub fn theta_sine_series(z: Complex64, tau: Complex64) -> Complex64 {
    let i = Complex64::i();
    let mut acc = CompensatedSum::default();
    for k in 0..200 {
        let n = k as f64 + 0.5;
        let gauss = (i * PI * tau * n * n).exp();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc.add(2.0 * sign * gauss * ((2.0 * n) * PI * z).sin());
        if gauss.norm() < 1e-30 {
            break;
        }
    }
    acc.value()
}

/// Jacobi triple product form of the same function:
/// `2 q^{1/4} sin(πz) Π_{n≥1} (1−q^{2n})(1−q^{2n}e^{2πiz})(1−q^{2n}e^{−2πiz})`
/// with `q = e^{πiτ}`.
pub fn theta_product(z: Complex64, tau: Complex64) -> Complex64 {
    let i = Complex64::i();
    let q = (i * PI * tau).exp();
    let q_quarter = (i * PI * tau / 4.0).exp();
    let w = (2.0 * PI * i * z).exp();
    let mut acc = 2.0 * q_quarter * (PI * z).sin();
    let q2 = q * q;
    let mut qn = q2;
    for _ in 0..400 {
        acc *= (1.0 - qn) * (1.0 - qn * w) * (1.0 - qn / w);
        qn *= q2;
        if qn.norm() < 1e-30 {
            break;
        }
    }
    acc
}

/// `ϑ'(0)` from the differentiated sine series.
pub fn theta_prime_zero(tau: Complex64) -> Complex64 {
    let i = Complex64::i();
    let mut acc = CompensatedSum::default();
    for k in 0..200 {
        let n = k as f64 + 0.5;
        let gauss = (i * PI * tau * n * n).exp();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc.add(2.0 * sign * gauss * 2.0 * n * PI);
        if gauss.norm() < 1e-30 {
            break;
        }
    }
    acc.value()
}

pub fn kronecker_phi(z: Complex64, u: Complex64, tau: Complex64) -> Complex64 {
    theta_prime_zero(tau) * theta_sine_series(z + u, tau) / (theta_sine_series(z, tau) * theta_sine_series(u, tau))
}

/// The 50 points `s + tτ` with `s ∈ {−0.35, −0.1, 0.15, 0.4, 0.65}` and
/// `t ∈ {−0.45, −0.35, …, 0.45}`.
pub fn grid(tau: Complex64) -> Vec<Complex64> {
    let ss = [-0.35, -0.1, 0.15, 0.4, 0.65];
    let mut out = Vec::with_capacity(50);
    for s in ss {
        for j in 0..10 {
            let t = -0.45 + 0.1 * j as f64;
            out.push(s + t * tau);
        }
    }
    out
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
