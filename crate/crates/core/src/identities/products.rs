//! `R_{I,J}`, `R'_{I,J}`, `Y_{I,J}` and the relations between them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::plan::{plan_r, plan_r_prime, plan_y, Evaluator, Factor, FactorKind, Form, ProductPlan};
use super::report::Residual;
use super::sets::{ensure_disjoint, IndexSubset, SiteAssignment};
use crate::error::{Error, Result};
use crate::tensor::DenseOperator;

/// `R_{I,J}` with every first-leg coordinate shifted by `shift`.
pub fn cal_r(
    ev: &Evaluator,
    i_set: &IndexSubset,
    j_set: &IndexSubset,
    sa: &SiteAssignment,
    shift: Complex64,
) -> Result<DenseOperator> {
    ensure_disjoint(&[i_set, j_set])?;
    ev.eval(&plan_r(i_set, j_set, Form::First).with_first_leg_shift(shift), sa)
}

/// `R'_{I,J}` with every first-leg coordinate shifted by `shift`.
pub fn cal_r_prime(
    ev: &Evaluator,
    i_set: &IndexSubset,
    j_set: &IndexSubset,
    sa: &SiteAssignment,
    shift: Complex64,
) -> Result<DenseOperator> {
    ensure_disjoint(&[i_set, j_set])?;
    ev.eval(&plan_r_prime(i_set, j_set, Form::First).with_first_leg_shift(shift), sa)
}

pub fn cal_y(ev: &Evaluator, i_set: &IndexSubset, j_set: &IndexSubset, sa: &SiteAssignment) -> Result<DenseOperator> {
    ensure_disjoint(&[i_set, j_set])?;
    ev.eval(&plan_y(i_set, j_set, Form::First), sa)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualFormResiduals {
    pub r: Residual,
    pub r_prime: Residual,
    pub y: Residual,
}

impl DualFormResiduals {
    pub fn worst(&self) -> Residual {
        self.r.max(self.r_prime).max(self.y)
    }
}

/// Agreement of the two groupings of `R_{I,J}`, `R'_{I,J}` and `Y_{I,J}`.
pub fn check_dual_forms(
    ev: &Evaluator,
    i_set: &IndexSubset,
    j_set: &IndexSubset,
    sa: &SiteAssignment,
) -> Result<DualFormResiduals> {
    ensure_disjoint(&[i_set, j_set])?;
    let both = |build: fn(&IndexSubset, &IndexSubset, Form) -> ProductPlan| -> Result<Residual> {
        let a = ev.eval(&build(i_set, j_set, Form::First), sa)?;
        let b = ev.eval(&build(i_set, j_set, Form::Second), sa)?;
        Residual::between(&a, &b)
    };
    Ok(DualFormResiduals {
        r: both(plan_r)?,
        r_prime: both(plan_r_prime)?,
        y: both(plan_y)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductLemmaResiduals {
    pub r_merge: Residual,
    pub r_prime_merge: Residual,
    pub unitarity_r: Residual,
    pub unitarity_r_prime: Residual,
    pub unitarity_bar: Residual,
    pub y_split_j: Residual,
    pub y_split_i: Residual,
}

impl ProductLemmaResiduals {
    pub fn named(&self) -> Vec<(&'static str, Residual)> {
        vec![
            ("r_merge", self.r_merge),
            ("r_prime_merge", self.r_prime_merge),
            ("unitarity_r", self.unitarity_r),
            ("unitarity_r_prime", self.unitarity_r_prime),
            ("unitarity_bar", self.unitarity_bar),
            ("y_split_j", self.y_split_j),
            ("y_split_i", self.y_split_i),
        ]
    }

    pub fn worst(&self) -> Residual {
        self.named()
            .into_iter()
            .map(|(_, r)| r)
            .fold(Residual::zero(), Residual::max)
    }
}

fn product(ev: &Evaluator, plans: &[ProductPlan], sa: &SiteAssignment) -> Result<DenseOperator> {
    let joined = plans.iter().fold(ProductPlan::identity(), |acc, p| acc.then(p));
    ev.eval(&joined, sa)
}

/// `∏ f(z_i − z_j) f(z_j − z_i)` over `i ∈ I`, `j ∈ J` with `keep(i, j)`,
/// `f` the scalar kernel of the family.
fn unitarity_scalar(
    ev: &Evaluator,
    i_set: &IndexSubset,
    j_set: &IndexSubset,
    sa: &SiteAssignment,
    keep: impl Fn(usize, usize) -> bool,
) -> Result<Complex64> {
    let hbar = ev.hbar();
    let f = ev.family();
    let mut acc = Complex64::new(1.0, 0.0);
    for i in i_set.iter() {
        for j in j_set.iter().filter(|&j| keep(i, j)) {
            let w = sa.z(i)? - sa.z(j)?;
            acc *= f.scalar_kernel(w, hbar)? * f.scalar_kernel(-w, hbar)?;
        }
    }
    Ok(acc)
}

/// Both relations of the `Y` lemma for `a ∈ I`, `b ∈ J`:
///
/// ```text
/// Y_{I,J} R_{b,j_{n+1}}…R_{b,j_l} = R_{b,j_{n+1}}…R_{b,j_l} Y_{I,J∖b} Y_{I,{b}}
/// Y_{I,J} R_{i_{m+1},a}…R_{i_k,a} = R_{i_{m+1},a}…R_{i_k,a} Y_{I∖a,J} Y_{{a},J}
/// ```
pub fn check_lemma_y(
    ev: &Evaluator,
    i_set: &IndexSubset,
    j_set: &IndexSubset,
    a: usize,
    b: usize,
    sa: &SiteAssignment,
) -> Result<(Residual, Residual)> {
    ensure_disjoint(&[i_set, j_set])?;
    if !i_set.contains(a) {
        return Err(Error::InvalidSubset(format!("{a} is not in I")));
    }
    if !j_set.contains(b) {
        return Err(Error::InvalidSubset(format!("{b} is not in J")));
    }
    let y_ij = plan_y(i_set, j_set, Form::First);
    let b_tail = ProductPlan::new(j_set.iter().filter(|&j| j > b).map(|j| Factor::r(b, j)).collect());
    let b_only = IndexSubset::full(vec![b])?;
    let lhs1 = product(ev, &[y_ij.clone(), b_tail.clone()], sa)?;
    let rhs1 = product(
        ev,
        &[
            b_tail,
            plan_y(i_set, &j_set.without(b), Form::First),
            plan_y(i_set, &b_only, Form::First),
        ],
        sa,
    )?;
    let a_tail = ProductPlan::new(i_set.iter().filter(|&i| i > a).map(|i| Factor::r(i, a)).collect());
    let a_only = IndexSubset::full(vec![a])?;
    let lhs2 = product(ev, &[y_ij, a_tail.clone()], sa)?;
    let rhs2 = product(
        ev,
        &[
            a_tail,
            plan_y(&i_set.without(a), j_set, Form::First),
            plan_y(&a_only, j_set, Form::First),
        ],
        sa,
    )?;
    Ok((Residual::between(&lhs1, &rhs1)?, Residual::between(&lhs2, &rhs2)?))
}

/// Product relations for disjoint `A`, `B`, `C`:
///
/// ```text
/// R_{C,A∪B} R_{B,A} = R_{B∪C,A} R_{C,B}
/// R'_{A,B} R'_{A∪B,C} = R'_{B,C} R'_{A,B∪C}
/// ```
///
/// together with the unitarity products for `I = A`, `J = B ∪ C` and the
/// `Y` lemma, taken as the worse of `(I, J) = (A ∪ B, C)` and `(A, B ∪ C)`
/// with `a = min I`, `b = min J`.
pub fn check_product_lemmas(
    ev: &Evaluator,
    a_set: &IndexSubset,
    b_set: &IndexSubset,
    c_set: &IndexSubset,
    sa: &SiteAssignment,
) -> Result<ProductLemmaResiduals> {
    ensure_disjoint(&[a_set, b_set, c_set])?;
    if a_set.is_empty() || b_set.is_empty() || c_set.is_empty() {
        return Err(Error::InvalidSubset("A, B, C must be nonempty".into()));
    }
    let r = |i: &IndexSubset, j: &IndexSubset| plan_r(i, j, Form::First);
    let rp = |i: &IndexSubset, j: &IndexSubset| plan_r_prime(i, j, Form::First);
    let ab = a_set.union(b_set);
    let bc = b_set.union(c_set);

    let r_merge = Residual::between(
        &product(ev, &[r(c_set, &ab), r(b_set, a_set)], sa)?,
        &product(ev, &[r(&bc, a_set), r(c_set, b_set)], sa)?,
    )?;
    let r_prime_merge = Residual::between(
        &product(ev, &[rp(a_set, b_set), rp(&ab, c_set)], sa)?,
        &product(ev, &[rp(b_set, c_set), rp(a_set, &bc)], sa)?,
    )?;

    let (i_set, j_set) = (a_set, &bc);
    let dim = ev.spec().dim();
    let id = DenseOperator::identity(dim);
    let lhs = product(ev, &[r(i_set, j_set), rp(j_set, i_set)], sa)?;
    let c = unitarity_scalar(ev, i_set, j_set, sa, |i, j| i < j)?;
    let unitarity_r = Residual::between(&lhs, &id.scale(c))?;
    let lhs = product(ev, &[rp(i_set, j_set), r(j_set, i_set)], sa)?;
    let c = unitarity_scalar(ev, i_set, j_set, sa, |i, j| i > j)?;
    let unitarity_r_prime = Residual::between(&lhs, &id.scale(c))?;
    let bar_r = r(i_set, j_set).with_kind(FactorKind::RBar);
    let bar_rp = rp(j_set, i_set).with_kind(FactorKind::RBar);
    let unitarity_bar = Residual::between(&product(ev, &[bar_r.clone(), bar_rp.clone()], sa)?, &id)?
        .max(Residual::between(&product(ev, &[bar_rp, bar_r], sa)?, &id)?);

    let mut y1 = Residual::zero();
    let mut y2 = Residual::zero();
    for (i, j) in [(&ab, c_set), (a_set, &bc)] {
        let a = i.elements()[0];
        let b = j.elements()[0];
        let (r1, r2) = check_lemma_y(ev, i, j, a, b, sa)?;
        y1 = y1.max(r1);
        y2 = y2.max(r2);
    }

    Ok(ProductLemmaResiduals {
        r_merge,
        r_prime_merge,
        unitarity_r,
        unitarity_r_prime,
        unitarity_bar,
        y_split_j: y1,
        y_split_i: y2,
    })
}
