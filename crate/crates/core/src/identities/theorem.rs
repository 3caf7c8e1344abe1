//! The sums `F1[k,N]`, `F2[k,N]` and the identity `F1 − F2 = 0`, plus the
//! spin commutativity relation on `N` sites.
//!
//! The builders take explicit site lists so that the same code produces
//! `F[k−1,N−1]` on the sites that survive a residue.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::plan::{plan_r, plan_r_prime, plan_y, Coupling, Evaluator, Factor, Form, ProductPlan};
use super::report::Residual;
use super::sets::{IndexSubset, SiteAssignment};
use crate::error::{Error, Result};
use crate::tensor::DenseOperator;

/// How the `−ħ` sum is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum F2Form {
    /// `(−1)^k Σ_J R^{−ħ}_{J,Jᶜ} Y^{−ħ}_{𝒩₁,J} R'^{−ħ}_{J,Jᶜ}` with genuine
    /// `−ħ` matrices.
    Direct,
    /// The same sum rewritten through `R^{−ħ}_{ij}(z) = −R^ħ_{ji}(−z)`.
    /// Each term has `k(2N−k)` factors, so the signs cancel the `(−1)^k`.
    Rewritten,
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k > n {
        return Err(Error::OutOfRange(format!("k = {k} must be at most N = {n}")));
    }
    Ok(())
}

fn swapped_pairs(plan: ProductPlan) -> ProductPlan {
    ProductPlan::new(plan.factors.iter().map(|f| Factor { i: f.j, j: f.i, ..*f }).collect())
}

/// Terms of `F1[k]` over `x_sites`, `y_sites`:
/// `R_{I,Iᶜ} · Y_{𝒩₂,I} · R'_{I,Iᶜ}` for each `I ⊂ x_sites`, `|I| = k`.
///
/// `k = 0` gives the single empty product.
pub fn f1_terms(k: usize, x_sites: &[usize], y_sites: &[usize]) -> Result<Vec<(IndexSubset, ProductPlan)>> {
    check_k(k, x_sites.len())?;
    let ys = IndexSubset::full(y_sites.to_vec())?;
    Ok(IndexSubset::subsets_of_size(x_sites, k)
        .into_iter()
        .map(|i_set| {
            let ic = i_set.complement();
            let plan = plan_r(&i_set, &ic, Form::Second)
                .then(&plan_y(&ys, &i_set, Form::Second))
                .then(&plan_r_prime(&i_set, &ic, Form::First));
            (i_set, plan)
        })
        .collect())
}

/// Terms of `F2[k]` with their scalar coefficients.
pub fn f2_terms(
    k: usize,
    x_sites: &[usize],
    y_sites: &[usize],
    form: F2Form,
) -> Result<Vec<(IndexSubset, Complex64, ProductPlan)>> {
    check_k(k, y_sites.len())?;
    let xs = IndexSubset::full(x_sites.to_vec())?;
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(IndexSubset::subsets_of_size(y_sites, k)
        .into_iter()
        .map(|j_set| {
            let jc = j_set.complement();
            let plan = plan_r(&j_set, &jc, Form::Second)
                .then(&plan_y(&xs, &j_set, Form::Second))
                .then(&plan_r_prime(&j_set, &jc, Form::First));
            let (coeff, plan) = match form {
                F2Form::Direct => (Complex64::new(sign, 0.0), plan.with_coupling(Coupling::Minus)),
                F2Form::Rewritten => (Complex64::new(1.0, 0.0), swapped_pairs(plan)),
            };
            (j_set, coeff, plan)
        })
        .collect())
}

/// An evaluated sum and the largest norm among its terms.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedSum {
    pub value: DenseOperator,
    pub largest_term: f64,
}

pub fn eval_f1_on(
    ev: &Evaluator,
    k: usize,
    x_sites: &[usize],
    y_sites: &[usize],
    sa: &SiteAssignment,
) -> Result<EvaluatedSum> {
    let terms: Vec<_> = f1_terms(k, x_sites, y_sites)?
        .into_iter()
        .map(|(_, p)| (Complex64::new(1.0, 0.0), p))
        .collect();
    let (value, largest_term) = ev.eval_sum(&terms, sa)?;
    Ok(EvaluatedSum { value, largest_term })
}

pub fn eval_f2_on(
    ev: &Evaluator,
    k: usize,
    x_sites: &[usize],
    y_sites: &[usize],
    sa: &SiteAssignment,
    form: F2Form,
) -> Result<EvaluatedSum> {
    let terms: Vec<_> = f2_terms(k, x_sites, y_sites, form)?
        .into_iter()
        .map(|(_, c, p)| (c, p))
        .collect();
    let (value, largest_term) = ev.eval_sum(&terms, sa)?;
    Ok(EvaluatedSum { value, largest_term })
}

fn require_full(ev: &Evaluator, sa: &SiteAssignment) -> Result<usize> {
    let n = sa.half();
    if n == 0 || sa.sites() != 2 * n || ev.spec().sites() != 2 * n {
        return Err(Error::LengthMismatch(sa.sites(), ev.spec().sites()));
    }
    Ok(n)
}

/// `F1[k,N]` on the full `2N`-site space.
pub fn build_f1(ev: &Evaluator, k: usize, sa: &SiteAssignment) -> Result<EvaluatedSum> {
    require_full(ev, sa)?;
    eval_f1_on(ev, k, &sa.n1(), &sa.n2(), sa)
}

/// `F2[k,N]` on the full `2N`-site space.
pub fn build_f2(ev: &Evaluator, k: usize, sa: &SiteAssignment, form: F2Form) -> Result<EvaluatedSum> {
    require_full(ev, sa)?;
    eval_f2_on(ev, k, &sa.n1(), &sa.n2(), sa, form)
}

/// `‖F1 − F2‖` against the largest single term of either sum.
pub fn check_theorem(ev: &Evaluator, k: usize, sa: &SiteAssignment) -> Result<Residual> {
    if k == 0 {
        return Err(Error::OutOfRange("k must be at least 1".into()));
    }
    let f1 = build_f1(ev, k, sa)?;
    let f2 = build_f2(ev, k, sa, F2Form::Rewritten)?;
    let abs = f1.value.sub(&f2.value)?.frobenius_norm();
    Ok(Residual::new(abs, f1.largest_term.max(f2.largest_term)))
}

/// Agreement of the two realizations of `F2`.
pub fn check_f2_forms(ev: &Evaluator, k: usize, sa: &SiteAssignment) -> Result<Residual> {
    let direct = build_f2(ev, k, sa, F2Form::Direct)?;
    let rewritten = build_f2(ev, k, sa, F2Form::Rewritten)?;
    let abs = direct.value.sub(&rewritten.value)?.frobenius_norm();
    Ok(Residual::new(abs, direct.largest_term.max(rewritten.largest_term)))
}

/// Term plans of both sums on `2N` sites, as displayed factor sequences:
/// `(F1 terms, F2 terms)` with `F2` in the rewritten form.
pub fn expansion(n: usize, k: usize) -> Result<(Vec<String>, Vec<String>)> {
    let x: Vec<usize> = (1..=n).collect();
    let y: Vec<usize> = (n + 1..=2 * n).collect();
    let plus = f1_terms(k, &x, &y)?.into_iter().map(|(_, p)| p.to_string()).collect();
    let minus = f2_terms(k, &x, &y, F2Form::Rewritten)?
        .into_iter()
        .map(|(_, _, p)| p.to_string())
        .collect();
    Ok((plus, minus))
}

/// The two products of the spin commutativity relation for one `I`:
///
/// ```text
/// R_{Iᶜ,I} R'_{I₋,Iᶜ} R_{I₋,Iᶜ} R'_{Iᶜ,I}   and   R_{I,Iᶜ} R'_{Iᶜ₋,I} R_{Iᶜ₋,I} R'_{I,Iᶜ}
/// ```
///
/// where the subscript minus shifts the first-leg coordinate by `−η`.
pub fn spin_commutativity_terms(i_set: &IndexSubset, eta: Complex64) -> (ProductPlan, ProductPlan) {
    let ic = i_set.complement();
    let first = plan_r(&ic, i_set, Form::First)
        .then(&plan_r_prime(i_set, &ic, Form::First).with_first_leg_shift(-eta))
        .then(&plan_r(i_set, &ic, Form::First).with_first_leg_shift(-eta))
        .then(&plan_r_prime(&ic, i_set, Form::First));
    let second = plan_r(i_set, &ic, Form::First)
        .then(&plan_r_prime(&ic, i_set, Form::First).with_first_leg_shift(-eta))
        .then(&plan_r(&ic, i_set, Form::First).with_first_leg_shift(-eta))
        .then(&plan_r_prime(i_set, &ic, Form::First));
    (first, second)
}

/// `Σ_{|I|=k} first` and `Σ_{|I|=k} second` on `N = sa.sites()` sites.
pub fn spin_commutativity_sums(
    ev: &Evaluator,
    k: usize,
    sa: &SiteAssignment,
    eta: Complex64,
) -> Result<(EvaluatedSum, EvaluatedSum)> {
    let n = sa.sites();
    if ev.spec().sites() != n {
        return Err(Error::LengthMismatch(n, ev.spec().sites()));
    }
    if k == 0 || k > n {
        return Err(Error::OutOfRange(format!("k = {k} must be in 1..={n}")));
    }
    let sites: Vec<usize> = (1..=n).collect();
    let one = Complex64::new(1.0, 0.0);
    let mut firsts = Vec::new();
    let mut seconds = Vec::new();
    for i_set in IndexSubset::subsets_of_size(&sites, k) {
        let (first, second) = spin_commutativity_terms(&i_set, eta);
        firsts.push((one, first));
        seconds.push((one, second));
    }
    let (value, largest_term) = ev.eval_sum(&firsts, sa)?;
    let a = EvaluatedSum { value, largest_term };
    let (value, largest_term) = ev.eval_sum(&seconds, sa)?;
    Ok((a, EvaluatedSum { value, largest_term }))
}

/// Residual of `Σ_{|I|=k} (first − second)` on `N = sa.sites()` sites.
pub fn check_spin_commutativity(ev: &Evaluator, k: usize, sa: &SiteAssignment, eta: Complex64) -> Result<Residual> {
    let (a, b) = spin_commutativity_sums(ev, k, sa, eta)?;
    let abs = a.value.sub(&b.value)?.frobenius_norm();
    Ok(Residual::new(abs, a.largest_term.max(b.largest_term)))
}
