//! Ordered products of embedded two-site R-matrices.
//!
//! A [`ProductPlan`] is a list of factors evaluated strictly left to right.
//! The builders below realize the orderings of `R_{I,J}`, `R'_{I,J}` and
//! `Y_{I,J}`, each in two equivalent groupings.

use std::fmt;

use num_complex::Complex64;

use super::sets::{IndexSubset, SiteAssignment};
use crate::error::{Error, Result};
use crate::rmatrix::RMatrixFamily;
use crate::tensor::{DenseOperator, LatticeSpec, TwoSiteOperator};

/// Sign of the Planck constant carried by a factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coupling {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FactorKind {
    /// `R^{±ħ}_{ij}(z_i + s_i − z_j − s_j)`.
    R,
    /// The same R-matrix divided by its scalar kernel.
    RBar,
    /// Permutation `P_{ij}`; coupling and shifts are ignored.
    Swap,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factor {
    pub i: usize,
    pub j: usize,
    pub coupling: Coupling,
    pub kind: FactorKind,
    pub shift_i: Complex64,
    pub shift_j: Complex64,
}

impl Factor {
    pub fn r(i: usize, j: usize) -> Self {
        Self {
            i,
            j,
            coupling: Coupling::Plus,
            kind: FactorKind::R,
            shift_i: Complex64::new(0.0, 0.0),
            shift_j: Complex64::new(0.0, 0.0),
        }
    }

    pub fn swap(i: usize, j: usize) -> Self {
        Self {
            kind: FactorKind::Swap,
            ..Self::r(i, j)
        }
    }

    pub fn pair(&self) -> (usize, usize) {
        (self.i, self.j)
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            FactorKind::R => "R",
            FactorKind::RBar => "Rbar",
            FactorKind::Swap => return write!(f, "P{},{}", self.i, self.j),
        };
        let sign = if self.coupling == Coupling::Minus { "^-" } else { "" };
        write!(f, "{name}{sign}{},{}", self.i, self.j)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProductPlan {
    pub factors: Vec<Factor>,
}

impl ProductPlan {
    pub fn new(factors: Vec<Factor>) -> Self {
        Self { factors }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Concatenation: `self` then `other`.
    pub fn then(mut self, other: &ProductPlan) -> Self {
        self.factors.extend_from_slice(&other.factors);
        self
    }

    pub fn push(&mut self, f: Factor) {
        self.factors.push(f);
    }

    /// Site pairs in order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.factors.iter().map(Factor::pair).collect()
    }

    /// Adds `shift` to the first-leg coordinate of every factor.
    pub fn with_first_leg_shift(mut self, shift: Complex64) -> Self {
        for f in &mut self.factors {
            f.shift_i += shift;
        }
        self
    }

    pub fn with_coupling(mut self, c: Coupling) -> Self {
        for f in &mut self.factors {
            f.coupling = c;
        }
        self
    }

    pub fn with_kind(mut self, kind: FactorKind) -> Self {
        for f in &mut self.factors {
            if f.kind != FactorKind::Swap {
                f.kind = kind;
            }
        }
        self
    }
}

impl fmt::Display for ProductPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "Id");
        }
        for (n, x) in self.factors.iter().enumerate() {
            if n > 0 {
                write!(f, " ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// Which of the two equivalent groupings to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Form {
    First,
    Second,
}

/// `R_{I,J}`: pairs `i ∈ I`, `j ∈ J`, `i < j`, factor `R_{ij}`.
///
/// `First`: outer `j ∈ J` increasing, inner `i < j` decreasing.
/// `Second`: outer `i ∈ I` decreasing, inner `j > i` increasing.
pub fn plan_r(i_set: &IndexSubset, j_set: &IndexSubset, form: Form) -> ProductPlan {
    let mut plan = ProductPlan::identity();
    match form {
        Form::First => {
            for j in j_set.iter() {
                for i in i_set.iter().rev().filter(|&i| i < j) {
                    plan.push(Factor::r(i, j));
                }
            }
        }
        Form::Second => {
            for i in i_set.iter().rev() {
                for j in j_set.iter().filter(|&j| j > i) {
                    plan.push(Factor::r(i, j));
                }
            }
        }
    }
    plan
}

/// `R'_{I,J}`: pairs `i ∈ I`, `j ∈ J`, `j < i`, factor `R_{ij}`.
///
/// `First`: outer `i ∈ I` decreasing, inner `j < i` increasing.
/// `Second`: outer `j ∈ J` increasing, inner `i > j` decreasing.
pub fn plan_r_prime(i_set: &IndexSubset, j_set: &IndexSubset, form: Form) -> ProductPlan {
    let mut plan = ProductPlan::identity();
    match form {
        Form::First => {
            for i in i_set.iter().rev() {
                for j in j_set.iter().filter(|&j| j < i) {
                    plan.push(Factor::r(i, j));
                }
            }
        }
        Form::Second => {
            for j in j_set.iter() {
                for i in i_set.iter().rev().filter(|&i| i > j) {
                    plan.push(Factor::r(i, j));
                }
            }
        }
    }
    plan
}

/// `Y_{I,J}`: all pairs, factor `R_{ij}`.
///
/// `First`: outer `i ∈ I`, inner `j ∈ J`, both increasing.
/// `Second`: outer `j ∈ J`, inner `i ∈ I`, both increasing.
pub fn plan_y(i_set: &IndexSubset, j_set: &IndexSubset, form: Form) -> ProductPlan {
    let mut plan = ProductPlan::identity();
    match form {
        Form::First => {
            for i in i_set.iter() {
                for j in j_set.iter() {
                    plan.push(Factor::r(i, j));
                }
            }
        }
        Form::Second => {
            for j in j_set.iter() {
                for i in i_set.iter() {
                    plan.push(Factor::r(i, j));
                }
            }
        }
    }
    plan
}

/// Evaluates plans for one R-matrix family on a fixed number of sites.
pub struct Evaluator<'a> {
    rm: &'a dyn RMatrixFamily,
    spec: LatticeSpec,
}

impl<'a> Evaluator<'a> {
    pub fn new(rm: &'a dyn RMatrixFamily, sites: usize) -> Result<Self> {
        let spec = LatticeSpec::new(rm.local_dim(), sites)?;
        Ok(Self { rm, spec })
    }

    pub fn with_cap(rm: &'a dyn RMatrixFamily, sites: usize, cap: usize) -> Result<Self> {
        let spec = LatticeSpec::with_cap(rm.local_dim(), sites, cap)?;
        Ok(Self { rm, spec })
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn family(&self) -> &dyn RMatrixFamily {
        self.rm
    }

    pub fn hbar(&self) -> Complex64 {
        self.rm.hbar()
    }

    /// The two-site matrix of one factor, before embedding.
    pub fn factor_matrix(&self, f: &Factor, sa: &SiteAssignment) -> Result<TwoSiteOperator> {
        if f.kind == FactorKind::Swap {
            return Ok(TwoSiteOperator::swap(self.rm.local_dim()));
        }
        let arg = sa.z(f.i)? + f.shift_i - sa.z(f.j)? - f.shift_j;
        let hbar = match f.coupling {
            Coupling::Plus => self.rm.hbar(),
            Coupling::Minus => -self.rm.hbar(),
        };
        let r = self.rm.eval(arg, hbar)?;
        match f.kind {
            FactorKind::RBar => {
                let norm = self.rm.scalar_kernel(arg, hbar)?;
                if norm.norm() < 1e-300 {
                    return Err(Error::Pole {
                        what: "normalized R-matrix",
                        magnitude: norm.norm(),
                        floor: 1e-300,
                    });
                }
                Ok(r.scale(1.0 / norm))
            }
            _ => Ok(r),
        }
    }

    pub fn eval(&self, plan: &ProductPlan, sa: &SiteAssignment) -> Result<DenseOperator> {
        self.eval_onto(DenseOperator::identity(self.spec.dim()), plan, sa)
    }

    /// `start · plan`.
    pub fn eval_onto(&self, start: DenseOperator, plan: &ProductPlan, sa: &SiteAssignment) -> Result<DenseOperator> {
        if sa.sites() < self.spec.sites() {
            return Err(Error::LengthMismatch(sa.sites(), self.spec.sites()));
        }
        let mut acc = start;
        for f in &plan.factors {
            let op = self.factor_matrix(f, sa)?;
            acc.right_mul_two_site(&op, f.i, f.j, &self.spec)?;
        }
        Ok(acc)
    }

    /// `Σ_t c_t · plan_t`, also returning the largest `‖c_t plan_t‖`.
    pub fn eval_sum(&self, terms: &[(Complex64, ProductPlan)], sa: &SiteAssignment) -> Result<(DenseOperator, f64)> {
        let mut total = DenseOperator::zeros(self.spec.dim());
        let mut largest: f64 = 0.0;
        for (c, plan) in terms {
            let term = self.eval(plan, sa)?;
            largest = largest.max(term.frobenius_norm() * c.norm());
            total.add_assign_scaled(*c, &term)?;
        }
        Ok((total, largest))
    }
}
