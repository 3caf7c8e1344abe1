//! Dense complex operators on `(ℂ^M)^⊗L` and the embedding of two-site
//! operators into that space.
//!
//! Basis convention: a basis state of `L` sites is labelled by digits
//! `(d_1, …, d_L)`, `0 ≤ d_s < M`, and stored at index `Σ d_s M^{L-s}`, so
//! site 1 is the most significant digit. Sites are numbered from 1.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_DIMENSION_CAP: usize = 4096;
pub const DEFAULT_CONDITION_CAP: f64 = 1e8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Local dimension `M` and number of tensor sites `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeSpec {
    local_dim: usize,
    sites: usize,
    dim: usize,
}

impl LatticeSpec {
    pub fn new(local_dim: usize, sites: usize) -> Result<Self> {
        Self::with_cap(local_dim, sites, DEFAULT_DIMENSION_CAP)
    }

    pub fn with_cap(local_dim: usize, sites: usize, cap: usize) -> Result<Self> {
        let too_big = Error::DimensionCap {
            local: local_dim,
            sites,
            cap,
        };
        if local_dim == 0 || sites == 0 {
            return Err(Error::OutOfRange(format!(
                "lattice needs M ≥ 1 and L ≥ 1, got M = {local_dim}, L = {sites}"
            )));
        }
        let dim = u32::try_from(sites)
            .ok()
            .and_then(|l| local_dim.checked_pow(l))
            .ok_or(too_big.clone())?;
        if dim > cap {
            return Err(too_big);
        }
        Ok(Self { local_dim, sites, dim })
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stride of site `s` in the mixed-radix index.
    fn stride(&self, site: usize) -> usize {
        self.local_dim.pow((self.sites - site) as u32)
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        for s in [i, j] {
            if s == 0 || s > self.sites {
                return Err(Error::SiteOutOfRange {
                    site: s,
                    sites: self.sites,
                });
            }
        }
        if i == j {
            return Err(Error::SameSite(i));
        }
        Ok(())
    }
}

/// Square complex matrix acting on the full tensor space.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator(DMatrix<Complex64>);

impl DenseOperator {
    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
        }
        Ok(Self(m))
    }

    /// Scalar `1×1` operator; the `M = 1` case of everything.
    pub fn scalar(value: Complex64) -> Self {
        Self(DMatrix::from_element(1, 1, value))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self(&self.0 * &other.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self(&self.0 - &other.0))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self(&self.0 * c)
    }

    pub fn add_assign_scaled(&mut self, c: Complex64, other: &Self) -> Result<()> {
        self.same_dim(other)?;
        self.0.zip_apply(&other.0, |a, b| *a += c * b);
        Ok(())
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// LU inverse with partial pivoting. Fails when the 1-norm condition
    /// number exceeds `DEFAULT_CONDITION_CAP`.
    pub fn inverse(&self) -> Result<Self> {
        self.inverse_with_cap(DEFAULT_CONDITION_CAP)
    }

    pub fn inverse_with_cap(&self, cond_cap: f64) -> Result<Self> {
        let inv = self
            .0
            .clone()
            .lu()
            .try_inverse()
            .ok_or(Error::Singular(f64::INFINITY))?;
        let cond = one_norm(&self.0) * one_norm(&inv);
        if !cond.is_finite() || cond > cond_cap {
            return Err(Error::Singular(cond));
        }
        Ok(Self(inv))
    }

    /// `self ← self · embed(op, i, j)` without materializing the embedding.
    ///
    /// Each column of the embedded operator has at most `M²` nonzeros, so this
    /// costs `dim² M²` instead of `dim³`.
    pub fn right_mul_two_site(&mut self, op: &TwoSiteOperator, i: usize, j: usize, spec: &LatticeSpec) -> Result<()> {
        spec.check_pair(i, j)?;
        if self.dim() != spec.dim() {
            return Err(Error::DimensionMismatch(self.dim(), spec.dim()));
        }
        if op.local_dim() != spec.local_dim() {
            return Err(Error::DimensionMismatch(op.local_dim(), spec.local_dim()));
        }
        let m = spec.local_dim();
        let (si, sj) = (spec.stride(i), spec.stride(j));
        let dim = spec.dim();
        let mut out = DMatrix::<Complex64>::zeros(dim, dim);
        let mut col_in = vec![0usize; m * m];
        for t in 0..dim {
            let ti = (t / si) % m;
            let tj = (t / sj) % m;
            let rest = t - ti * si - tj * sj;
            for a in 0..m {
                for b in 0..m {
                    col_in[a * m + b] = rest + a * si + b * sj;
                }
            }
            let out_row = ti * m + tj;
            // column t of (A·E) = Σ_s A[:, s] E[s, t]
            for (pair, &s) in col_in.iter().enumerate() {
                let e = op.matrix()[(pair, out_row)];
                if e == ZERO {
                    continue;
                }
                let src = self.0.column(s);
                let mut dst = out.column_mut(t);
                dst.zip_apply(&src, |d, x| *d += x * e);
            }
        }
        self.0 = out;
        Ok(())
    }
}

fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `‖a − b‖_F / max(1, ‖a‖_F, ‖b‖_F)`.
pub fn rel_residual(a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    let diff = a.sub(b)?.frobenius_norm();
    Ok(diff / 1f64.max(a.frobenius_norm()).max(b.frobenius_norm()))
}

/// Operator on `ℂ^M ⊗ ℂ^M` in the basis `e_a ⊗ e_b ↦ a·M + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSiteOperator {
    local_dim: usize,
    mat: DMatrix<Complex64>,
}

impl TwoSiteOperator {
    pub fn new(local_dim: usize, mat: DMatrix<Complex64>) -> Result<Self> {
        let d = local_dim * local_dim;
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::DimensionMismatch(mat.nrows(), d));
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::OutOfRange("two-site operator has non-finite entries".into()));
        }
        Ok(Self { local_dim, mat })
    }

    pub fn identity(local_dim: usize) -> Self {
        let d = local_dim * local_dim;
        Self {
            local_dim,
            mat: DMatrix::identity(d, d),
        }
    }

    /// Swap `P(e_a ⊗ e_b) = e_b ⊗ e_a`.
    pub fn swap(local_dim: usize) -> Self {
        let m = local_dim;
        let mut mat = DMatrix::zeros(m * m, m * m);
        for a in 0..m {
            for b in 0..m {
                mat[(b * m + a, a * m + b)] = ONE;
            }
        }
        Self { local_dim, mat }
    }

    /// `A ⊗ B` of two `M×M` matrices.
    pub fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Result<Self> {
        if a.nrows() != b.nrows() || !a.is_square() || !b.is_square() {
            return Err(Error::DimensionMismatch(a.nrows(), b.nrows()));
        }
        Ok(Self {
            local_dim: a.nrows(),
            mat: a.kronecker(b),
        })
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            local_dim: self.local_dim,
            mat: &self.mat * c,
        }
    }

    /// `P · self · P`, i.e. the same operator with its legs exchanged.
    pub fn swapped(&self) -> Self {
        let m = self.local_dim;
        let mut mat = DMatrix::zeros(m * m, m * m);
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        mat[(b * m + a, d * m + c)] = self.mat[(a * m + b, c * m + d)];
                    }
                }
            }
        }
        Self { local_dim: m, mat }
    }

    pub fn as_dense(&self) -> DenseOperator {
        DenseOperator(self.mat.clone())
    }
}

/// Dense form of `op` acting on sites `(i, j)` (first leg on `i`, second on
/// `j`) and as the identity elsewhere. `i > j` is allowed and is not
/// reinterpreted.
pub fn embed(op: &TwoSiteOperator, i: usize, j: usize, spec: &LatticeSpec) -> Result<DenseOperator> {
    spec.check_pair(i, j)?;
    if op.local_dim() != spec.local_dim() {
        return Err(Error::DimensionMismatch(op.local_dim(), spec.local_dim()));
    }
    let m = spec.local_dim();
    let (si, sj) = (spec.stride(i), spec.stride(j));
    let dim = spec.dim();
    let mut out = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        let ai = (s / si) % m;
        let aj = (s / sj) % m;
        let rest = s - ai * si - aj * sj;
        for bi in 0..m {
            for bj in 0..m {
                let t = rest + bi * si + bj * sj;
                out[(t, s)] = op.matrix()[(bi * m + bj, ai * m + aj)];
            }
        }
    }
    Ok(DenseOperator(out))
}

/// Single-site operator `A` placed on site `i`.
pub fn embed_one(a: &DMatrix<Complex64>, i: usize, spec: &LatticeSpec) -> Result<DenseOperator> {
    if i == 0 || i > spec.sites() {
        return Err(Error::SiteOutOfRange {
            site: i,
            sites: spec.sites(),
        });
    }
    if a.nrows() != spec.local_dim() || a.ncols() != spec.local_dim() {
        return Err(Error::DimensionMismatch(a.nrows(), spec.local_dim()));
    }
    let m = spec.local_dim();
    let before = DMatrix::<Complex64>::identity(m.pow((i - 1) as u32), m.pow((i - 1) as u32));
    let after_dim = m.pow((spec.sites() - i) as u32);
    let after = DMatrix::<Complex64>::identity(after_dim, after_dim);
    Ok(DenseOperator(before.kronecker(a).kronecker(&after)))
}

/// Transposition `P_{ij}` of tensor factors `i` and `j`.
pub fn permutation_p(i: usize, j: usize, spec: &LatticeSpec) -> Result<DenseOperator> {
    embed(&TwoSiteOperator::swap(spec.local_dim()), i, j, spec)
}
