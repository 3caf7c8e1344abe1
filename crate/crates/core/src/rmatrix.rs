//! The `ℤ_M`-symmetric Baxter-Belavin R-matrix, its rational Yang
//! degeneration, and checks of the single-R-matrix identities.
//!
//! Construction:
//!
//! ```text
//! Q_kk = exp(2πik/M) (k = 1..M),   Λ_kl = δ(k − l + 1 ≡ 0 mod M)
//! T_α  = exp(πi α1 α2 / M) Q^α1 Λ^α2
//! R^ħ(z) = (1/M) Σ_α φ_α(z, ħ/M + ω_α) T_α ⊗ T_{-α}
//! ```
//!
//! `T_{-α}` is built from the literal negative exponents, so that
//! `T_{-α} = T_α^{-1}`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::elliptic::{Elliptic, HalfPeriodIndex, ModularTau, SeriesConfig};
use crate::error::{Error, Result};
use crate::residue::numeric_residue;
use crate::tensor::{rel_residual, DenseOperator, LatticeSpec, TwoSiteOperator};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Rejection threshold for `|ϑ(ħ/M + ω_a)|` when sampling `ħ`.
pub const HBAR_THETA_FLOOR: f64 = 1e-3;

/// Diagonal clock matrix `Q`.
pub fn q_matrix(m: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(m, m, |r, c| {
        if r == c {
            let k = (r + 1) as f64;
            (2.0 * PI * I * k / m as f64).exp()
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Cyclic shift matrix `Λ`.
pub fn lambda_matrix(m: usize) -> DMatrix<Complex64> {
    // 1-based k, l with k − l + 1 ≡ 0 (mod M), i.e. l ≡ k + 1.
    DMatrix::from_fn(m, m, |r, c| {
        if c == (r + 1) % m {
            ONE
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `A^k` for a unitary `A`; negative powers use the adjoint.
fn unitary_power(a: &DMatrix<Complex64>, k: i64) -> DMatrix<Complex64> {
    let base = if k < 0 { a.adjoint() } else { a.clone() };
    let mut out = DMatrix::identity(a.nrows(), a.ncols());
    for _ in 0..k.unsigned_abs() {
        out = &out * &base;
    }
    out
}

/// `exp(πi a1 a2 / M) Q^a1 Λ^a2` for arbitrary integer exponents.
pub fn t_signed(a1: i64, a2: i64, m: usize) -> DMatrix<Complex64> {
    let phase = (PI * I * (a1 * a2) as f64 / m as f64).exp();
    (unitary_power(&q_matrix(m), a1) * unitary_power(&lambda_matrix(m), a2)) * phase
}

/// Basis element `T_α`.
pub fn t_alpha(alpha: HalfPeriodIndex) -> DMatrix<Complex64> {
    t_signed(alpha.a1() as i64, alpha.a2() as i64, alpha.m())
}

/// Structure constant in `T_α T_β = κ_{α,β} T_{α+β}`.
pub fn kappa(alpha: (i64, i64), beta: (i64, i64), m: usize) -> Complex64 {
    (PI * I * (alpha.1 * beta.0 - alpha.0 * beta.1) as f64 / m as f64).exp()
}

/// A one-parameter family of two-site R-matrices `R^ħ(z)`.
///
/// `scalar_kernel` is the function `f` with `R^ħ(z) R^ħ_21(−z) = f(z) f(−z)`;
/// for the elliptic family it is `φ(ħ, z)`.
pub trait RMatrixFamily: Send + Sync {
    fn local_dim(&self) -> usize;
    fn hbar(&self) -> Complex64;
    fn eval(&self, z: Complex64, hbar: Complex64) -> Result<TwoSiteOperator>;
    fn scalar_kernel(&self, z: Complex64, hbar: Complex64) -> Result<Complex64>;

    fn r(&self, z: Complex64) -> Result<TwoSiteOperator> {
        self.eval(z, self.hbar())
    }
}

/// `(M, ħ, τ)` together with the series policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RMatrixParams {
    pub m: usize,
    pub hbar: Complex64,
    pub tau: ModularTau,
    pub cfg: SeriesConfig,
}

impl RMatrixParams {
    /// Validates that `ħ` stays away from every `|ϑ(ħ/M + ω_a)|` zero, using
    /// the series pole floor.
    pub fn new(m: usize, hbar: Complex64, tau: ModularTau, cfg: SeriesConfig) -> Result<Self> {
        if m == 0 {
            return Err(Error::OutOfRange("M must be positive".into()));
        }
        let params = Self { m, hbar, tau, cfg };
        let ell = Elliptic::new(tau, cfg)?;
        params.min_theta(&ell).and_then(|v| {
            if v < cfg.pole_floor {
                Err(Error::Pole {
                    what: "theta(hbar/M + omega_a)",
                    magnitude: v,
                    floor: cfg.pole_floor,
                })
            } else {
                Ok(())
            }
        })?;
        Ok(params)
    }

    /// `min_a |ϑ(ħ/M + ω_a)|`.
    pub fn min_theta(&self, ell: &Elliptic) -> Result<f64> {
        let mut best = f64::INFINITY;
        for a in HalfPeriodIndex::all(self.m) {
            let v = ell.theta(self.hbar / self.m as f64 + a.omega(self.tau))?;
            best = best.min(v.norm());
        }
        Ok(best)
    }

    /// Whether `ħ` passes the sampling rule: all `|ϑ(ħ/M + ω_a)|` and
    /// `|ϑ(ħ)|` at least [`HBAR_THETA_FLOOR`].
    pub fn hbar_well_conditioned(&self, ell: &Elliptic) -> Result<bool> {
        Ok(self.min_theta(ell)? >= HBAR_THETA_FLOOR && ell.theta(self.hbar)?.norm() >= HBAR_THETA_FLOOR)
    }
}

/// Baxter-Belavin R-matrix with the `T_α ⊗ T_{-α}` table precomputed.
#[derive(Debug, Clone)]
pub struct BaxterBelavin {
    params: RMatrixParams,
    ell: Elliptic,
    basis: Vec<(HalfPeriodIndex, DMatrix<Complex64>)>,
}

impl BaxterBelavin {
    pub fn new(params: RMatrixParams) -> Result<Self> {
        let ell = Elliptic::new(params.tau, params.cfg)?;
        let m = params.m;
        let basis = HalfPeriodIndex::all(m)
            .map(|a| {
                let t = t_alpha(a);
                let t_neg = t_signed(-(a.a1() as i64), -(a.a2() as i64), m);
                (a, t.kronecker(&t_neg))
            })
            .collect();
        Ok(Self { params, ell, basis })
    }

    pub fn params(&self) -> &RMatrixParams {
        &self.params
    }

    pub fn elliptic(&self) -> &Elliptic {
        &self.ell
    }

    pub fn tau(&self) -> ModularTau {
        self.params.tau
    }

    /// `R^ħ(z) / φ(ħ, z)`.
    pub fn bar_r(&self, z: Complex64) -> Result<TwoSiteOperator> {
        let norm = self.normalization(z)?;
        Ok(self.r(z)?.scale(1.0 / norm))
    }

    /// `φ(ħ, z)`, rejecting its zeros at `z ≡ −ħ`.
    fn normalization(&self, z: Complex64) -> Result<Complex64> {
        let hbar = self.params.hbar;
        let num = self.ell.theta(z + hbar)?;
        if num.norm() < self.params.cfg.pole_floor {
            return Err(Error::Pole {
                what: "phi(hbar, z) (z = -hbar)",
                magnitude: num.norm(),
                floor: self.params.cfg.pole_floor,
            });
        }
        self.ell.kronecker_phi(hbar, z)
    }

    /// `R^ħ_21(−z) = P R^ħ(−z) P`, which equals `−R^{−ħ}_12(z)`.
    pub fn r_minus_hbar(&self, z: Complex64) -> Result<TwoSiteOperator> {
        Ok(self.r(-z)?.swapped())
    }
}

impl RMatrixFamily for BaxterBelavin {
    fn local_dim(&self) -> usize {
        self.params.m
    }

    fn hbar(&self) -> Complex64 {
        self.params.hbar
    }

    fn eval(&self, z: Complex64, hbar: Complex64) -> Result<TwoSiteOperator> {
        let m = self.params.m;
        let d = m * m;
        let mut acc = DMatrix::<Complex64>::zeros(d, d);
        for (a, tt) in &self.basis {
            let s = hbar / m as f64 + a.omega(self.params.tau);
            let coeff = self.ell.phi_a(*a, z, s)? / m as f64;
            acc.zip_apply(tt, |x, t| *x += coeff * t);
        }
        TwoSiteOperator::new(m, acc)
    }

    fn scalar_kernel(&self, z: Complex64, hbar: Complex64) -> Result<Complex64> {
        self.ell.kronecker_phi(hbar, z)
    }
}

pub fn baxter_belavin_r(z: Complex64, params: &RMatrixParams) -> Result<TwoSiteOperator> {
    BaxterBelavin::new(*params)?.r(z)
}

pub fn bar_r(z: Complex64, params: &RMatrixParams) -> Result<TwoSiteOperator> {
    BaxterBelavin::new(*params)?.bar_r(z)
}

pub fn r_minus_hbar(z: Complex64, params: &RMatrixParams) -> Result<TwoSiteOperator> {
    BaxterBelavin::new(*params)?.r_minus_hbar(z)
}

/// Rational Yang R-matrix `R^ħ(z) = 1⊗1/ħ + P/z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YangR {
    pub m: usize,
    pub hbar: Complex64,
}

impl RMatrixFamily for YangR {
    fn local_dim(&self) -> usize {
        self.m
    }

    fn hbar(&self) -> Complex64 {
        self.hbar
    }

    fn eval(&self, z: Complex64, hbar: Complex64) -> Result<TwoSiteOperator> {
        if z == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroArgument("z"));
        }
        if hbar == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroArgument("hbar"));
        }
        let d = self.m * self.m;
        let mat = DMatrix::<Complex64>::identity(d, d) / hbar + TwoSiteOperator::swap(self.m).matrix() / z;
        TwoSiteOperator::new(self.m, mat)
    }

    fn scalar_kernel(&self, z: Complex64, hbar: Complex64) -> Result<Complex64> {
        if z == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroArgument("z"));
        }
        Ok(1.0 / hbar + 1.0 / z)
    }
}

pub fn yang_r(z: Complex64, hbar: Complex64, m: usize) -> Result<TwoSiteOperator> {
    YangR { m, hbar }.r(z)
}

fn dense2(op: &TwoSiteOperator) -> DenseOperator {
    op.as_dense()
}

/// `‖Σ terms‖ / max(1, largest term)` for `lhs − Σ rhs`.
fn summand_residual(lhs: &DenseOperator, rhs: &[DenseOperator]) -> Result<f64> {
    let mut diff = lhs.clone();
    let mut scale = lhs.frobenius_norm();
    for t in rhs {
        diff = diff.sub(t)?;
        scale = scale.max(t.frobenius_norm());
    }
    Ok(diff.frobenius_norm() / scale.max(1.0))
}

/// Relative residual of `R12(u) R13(u+v) R23(v) = R23(v) R13(u+v) R12(u)`.
pub fn check_qybe<R: RMatrixFamily + ?Sized>(rm: &R, u: Complex64, v: Complex64) -> Result<f64> {
    let spec = LatticeSpec::new(rm.local_dim(), 3)?;
    let r_u = rm.r(u)?;
    let r_uv = rm.r(u + v)?;
    let r_v = rm.r(v)?;
    let mut lhs = DenseOperator::identity(spec.dim());
    lhs.right_mul_two_site(&r_u, 1, 2, &spec)?;
    lhs.right_mul_two_site(&r_uv, 1, 3, &spec)?;
    lhs.right_mul_two_site(&r_v, 2, 3, &spec)?;
    let mut rhs = DenseOperator::identity(spec.dim());
    rhs.right_mul_two_site(&r_v, 2, 3, &spec)?;
    rhs.right_mul_two_site(&r_uv, 1, 3, &spec)?;
    rhs.right_mul_two_site(&r_u, 1, 2, &spec)?;
    rel_residual(&lhs, &rhs)
}

/// Relative residual of the associative Yang-Baxter equation
///
/// ```text
/// R^u_12 R^{u'}_23 = R^{u'}_13 R^{u−u'}_12 + R^{u'−u}_23 R^u_13,  R^ħ_ab = R^ħ(z_a − z_b)
/// ```
pub fn check_aybe<R: RMatrixFamily + ?Sized>(
    rm: &R,
    u: Complex64,
    u_prime: Complex64,
    zs: [Complex64; 3],
) -> Result<f64> {
    let spec = LatticeSpec::new(rm.local_dim(), 3)?;
    let [z1, z2, z3] = zs;
    let dim = spec.dim();
    let product = |factors: &[(TwoSiteOperator, usize, usize)]| -> Result<DenseOperator> {
        let mut acc = DenseOperator::identity(dim);
        for (op, i, j) in factors {
            acc.right_mul_two_site(op, *i, *j, &spec)?;
        }
        Ok(acc)
    };
    let lhs = product(&[(rm.eval(z1 - z2, u)?, 1, 2), (rm.eval(z2 - z3, u_prime)?, 2, 3)])?;
    let first = product(&[
        (rm.eval(z1 - z3, u_prime)?, 1, 3),
        (rm.eval(z1 - z2, u - u_prime)?, 1, 2),
    ])?;
    let second = product(&[(rm.eval(z2 - z3, u_prime - u)?, 2, 3), (rm.eval(z1 - z3, u)?, 1, 3)])?;
    summand_residual(&lhs, &[first, second])
}

/// Relative residual of the `n`-factor associative Yang-Baxter identity
///
/// ```text
/// →Π_{i=1..n} R^{u_i}_{a,i}(w_i)
///   = Σ_m →Π_{j=m+1..n} R^{u_j}_{m,j}(w_j − w_m) · R^U_{a,m}(w_m) · →Π_{j=1..m−1} R^{u_j}_{m,j}(w_j − w_m)
/// ```
///
/// with `U = Σ u_k`, on `n + 1` sites. The distinguished site `a` is any of
/// `1..=n+1`; the labels `1..n` of the identity are mapped in increasing
/// order onto the remaining sites.
pub fn check_higher_aybe<R: RMatrixFamily + ?Sized>(
    rm: &R,
    us: &[Complex64],
    ws: &[Complex64],
    a: usize,
) -> Result<f64> {
    if us.len() != ws.len() {
        return Err(Error::LengthMismatch(us.len(), ws.len()));
    }
    let n = us.len();
    if n == 0 {
        return Err(Error::OutOfRange("need at least one factor".into()));
    }
    if a == 0 || a > n + 1 {
        return Err(Error::SiteOutOfRange { site: a, sites: n + 1 });
    }
    let spec = LatticeSpec::new(rm.local_dim(), n + 1)?;
    let site: Vec<usize> = (1..=n + 1).filter(|&s| s != a).collect();
    let total: Complex64 = us.iter().sum();
    let dim = spec.dim();

    let mut lhs = DenseOperator::identity(dim);
    for i in 0..n {
        lhs.right_mul_two_site(&rm.eval(ws[i], us[i])?, a, site[i], &spec)?;
    }
    let mut terms = Vec::with_capacity(n);
    for m in 0..n {
        let mut acc = DenseOperator::identity(dim);
        for j in m + 1..n {
            acc.right_mul_two_site(&rm.eval(ws[j] - ws[m], us[j])?, site[m], site[j], &spec)?;
        }
        acc.right_mul_two_site(&rm.eval(ws[m], total)?, a, site[m], &spec)?;
        for j in 0..m {
            acc.right_mul_two_site(&rm.eval(ws[j] - ws[m], us[j])?, site[m], site[j], &spec)?;
        }
        terms.push(acc);
    }
    summand_residual(&lhs, &terms)
}

/// Unitarity: `R^ħ(z) R^ħ_21(−z) = f(z) f(−z) Id` with `f` the family's
/// scalar kernel.
pub fn check_unitarity<R: RMatrixFamily + ?Sized>(rm: &R, z: Complex64) -> Result<f64> {
    let lhs = dense2(&rm.r(z)?).mul(&dense2(&rm.r(-z)?.swapped()))?;
    let hbar = rm.hbar();
    let c = rm.scalar_kernel(z, hbar)? * rm.scalar_kernel(-z, hbar)?;
    let d = lhs.dim();
    rel_residual(&lhs, &DenseOperator::identity(d).scale(c))
}

/// `R̄(z) R̄_21(−z) = Id`.
pub fn check_bar_unitarity(rm: &BaxterBelavin, z: Complex64) -> Result<f64> {
    let lhs = dense2(&rm.bar_r(z)?).mul(&dense2(&rm.bar_r(-z)?.swapped()))?;
    let d = lhs.dim();
    rel_residual(&lhs, &DenseOperator::identity(d))
}

/// Skew-symmetry `R^ħ_12(z) = −R^{−ħ}_21(−z)`, the right side built
/// directly with parameter `−ħ`.
pub fn check_skew_symmetry<R: RMatrixFamily + ?Sized>(rm: &R, z: Complex64) -> Result<f64> {
    let lhs = dense2(&rm.r(z)?);
    let rhs = dense2(&rm.eval(-z, -rm.hbar())?.swapped()).scale(-ONE);
    rel_residual(&lhs, &rhs)
}

/// `max` of the residuals of `[Q⊗Q, R] = 0` and `[Λ⊗Λ, R] = 0`.
pub fn check_zm_symmetry(rm: &BaxterBelavin, z: Complex64) -> Result<f64> {
    let m = rm.local_dim();
    let r = dense2(&rm.r(z)?);
    let mut worst: f64 = 0.0;
    for g in [q_matrix(m), lambda_matrix(m)] {
        let gg = DenseOperator::from_matrix(g.kronecker(&g))?;
        let lhs = gg.mul(&r)?;
        let rhs = r.mul(&gg)?;
        worst = worst.max(rel_residual(&lhs, &rhs)?);
    }
    Ok(worst)
}

/// Residuals of
///
/// ```text
/// R(z+1) = (Q⁻¹⊗1) R(z) (Q⊗1)
/// R(z+τ) = exp(−2πiħ/M) (Λ⁻¹⊗1) R(z) (Λ⊗1)
/// ```
pub fn check_r_quasi_periodicity(rm: &BaxterBelavin, z: Complex64) -> Result<(f64, f64)> {
    let m = rm.local_dim();
    let id = DMatrix::<Complex64>::identity(m, m);
    let r = dense2(&rm.r(z)?);
    let conj = |g: &DMatrix<Complex64>| -> Result<DenseOperator> {
        let left = DenseOperator::from_matrix(g.adjoint().kronecker(&id))?;
        let right = DenseOperator::from_matrix(g.kronecker(&id))?;
        left.mul(&r)?.mul(&right)
    };
    let tau = rm.tau().value();
    let shifted_1 = dense2(&rm.r(z + 1.0)?);
    let res_1 = rel_residual(&shifted_1, &conj(&q_matrix(m))?)?;
    let shifted_tau = dense2(&rm.r(z + tau)?);
    let factor = (-2.0 * PI * I * rm.hbar() / m as f64).exp();
    let res_tau = rel_residual(&shifted_tau, &conj(&lambda_matrix(m))?.scale(factor))?;
    Ok((res_1, res_tau))
}

/// Residue of `R^ħ(z)` at `z = 0`, expected to be the swap `P_12`.
pub fn residue_in_z(rm: &dyn RMatrixFamily, radius: f64, nodes: usize) -> Result<DenseOperator> {
    numeric_residue(|z| Ok(dense2(&rm.r(z)?)), Complex64::new(0.0, 0.0), radius, nodes)
}

/// Residue of `R^ħ(z)` at `ħ = 0` for fixed `z`, expected to be `1⊗1`.
pub fn residue_in_hbar(rm: &dyn RMatrixFamily, z: Complex64, radius: f64, nodes: usize) -> Result<DenseOperator> {
    numeric_residue(|h| Ok(dense2(&rm.eval(z, h)?)), Complex64::new(0.0, 0.0), radius, nodes)
}
