//! Pole structure of `F` in one coordinate: residues at `z_a = x_b` and
//! `z_a = y_b`, and the transformation under lattice shifts.
//!
//! `F = F1 − F2` vanishes identically, which makes every statement about `F`
//! itself trivially true. The residue relation and the shift laws hold for
//! `F1` and `F2` separately, so those are what is checked.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::plan::{Evaluator, Factor, ProductPlan};
use super::report::Residual;
use super::sets::SiteAssignment;
use super::theorem::{eval_f1_on, eval_f2_on, f1_terms, F2Form};
use crate::elliptic::ModularTau;
use crate::error::{Error, Result};
use crate::residue::{adaptive_residue, QuadratureBudget};
use crate::rmatrix::{lambda_matrix, q_matrix};
use crate::tensor::{embed_one, DenseOperator};

fn check_ab(a: usize, b: usize, n: usize) -> Result<()> {
    if a == 0 || a > n {
        return Err(Error::SiteOutOfRange { site: a, sites: n });
    }
    if b <= n || b > 2 * n {
        return Err(Error::OutOfRange(format!("b = {b} must be in {}..={}", n + 1, 2 * n)));
    }
    Ok(())
}

/// `G = R_{a,a+1}…R_{a,N} · R_{b+1,b}…R_{2N,b}`.
pub fn plan_g(a: usize, b: usize, n: usize) -> Result<ProductPlan> {
    check_ab(a, b, n)?;
    let mut plan = ProductPlan::identity();
    for l in a + 1..=n {
        plan.push(Factor::r(a, l));
    }
    for l in b + 1..=2 * n {
        plan.push(Factor::r(l, b));
    }
    Ok(plan)
}

/// `H = R_{N+1,a}…R_{b−1,a} · R_{b,1}…R_{b,a−1} · P_{ab}`.
pub fn plan_h(a: usize, b: usize, n: usize) -> Result<ProductPlan> {
    check_ab(a, b, n)?;
    let mut plan = ProductPlan::identity();
    for l in n + 1..b {
        plan.push(Factor::r(l, a));
    }
    for l in 1..a {
        plan.push(Factor::r(b, l));
    }
    plan.push(Factor::swap(a, b));
    Ok(plan)
}

/// `G` evaluated on the residue locus `z_a = z_b`.
pub fn build_g(ev: &Evaluator, a: usize, b: usize, sa: &SiteAssignment) -> Result<DenseOperator> {
    let locus = sa.with_coord(a, sa.z(b)?)?;
    ev.eval(&plan_g(a, b, sa.half())?, &locus)
}

/// `H` evaluated on the residue locus `z_a = z_b`.
pub fn build_h(ev: &Evaluator, a: usize, b: usize, sa: &SiteAssignment) -> Result<DenseOperator> {
    let locus = sa.with_coord(a, sa.z(b)?)?;
    ev.eval(&plan_h(a, b, sa.half())?, &locus)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Part {
    F1,
    F2,
}

impl Part {
    pub const BOTH: [Part; 2] = [Part::F1, Part::F2];

    pub fn name(self) -> &'static str {
        match self {
            Part::F1 => "F1",
            Part::F2 => "F2",
        }
    }
}

fn eval_part(
    ev: &Evaluator,
    part: Part,
    k: usize,
    x_sites: &[usize],
    y_sites: &[usize],
    sa: &SiteAssignment,
) -> Result<DenseOperator> {
    Ok(match part {
        Part::F1 => eval_f1_on(ev, k, x_sites, y_sites, sa)?.value,
        Part::F2 => eval_f2_on(ev, k, x_sites, y_sites, sa, F2Form::Rewritten)?.value,
    })
}

/// Per-part outcome of a residue comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartResiduals {
    pub parts: Vec<(Part, Residual)>,
    /// Largest node count the quadrature needed.
    pub nodes: usize,
}

impl PartResiduals {
    pub fn worst(&self) -> Residual {
        self.parts.iter().map(|(_, r)| *r).fold(Residual::zero(), Residual::max)
    }
}

/// `Res_{z_a = z_b} F_p[k,N] = −G · F_p[k−1,N−1] · H` for `p = 1, 2`.
///
/// `F_p[k−1,N−1]` is built on the sites other than `a`, `b`, with their own
/// coordinates, and acts as the identity on `a` and `b`. For `k = 1` both
/// `F1[0]` and `F2[0]` are the empty product.
pub fn check_lemma32(
    ev: &Evaluator,
    k: usize,
    sa: &SiteAssignment,
    a: usize,
    b: usize,
    budget: &QuadratureBudget,
) -> Result<PartResiduals> {
    let n = sa.half();
    check_ab(a, b, n)?;
    if k == 0 || k > n {
        return Err(Error::OutOfRange(format!("k = {k} must be in 1..={n}")));
    }
    let (x, y) = (sa.n1(), sa.n2());
    let x_rest: Vec<usize> = x.iter().copied().filter(|&s| s != a).collect();
    let y_rest: Vec<usize> = y.iter().copied().filter(|&s| s != b).collect();
    let zb = sa.z(b)?;
    let locus = sa.with_coord(a, zb)?;
    let g = build_g(ev, a, b, sa)?;
    let h = build_h(ev, a, b, sa)?;
    let mut out = PartResiduals {
        parts: Vec::new(),
        nodes: 0,
    };
    for part in Part::BOTH {
        let res = adaptive_residue(|w| eval_part(ev, part, k, &x, &y, &sa.with_coord(a, w)?), zb, budget)?;
        let lower = eval_part(ev, part, k - 1, &x_rest, &y_rest, &locus)?;
        let expected = g.mul(&lower)?.mul(&h)?.scale(Complex64::new(-1.0, 0.0));
        out.parts.push((part, Residual::between(&res.value, &expected)?));
        out.nodes = out.nodes.max(res.nodes);
    }
    Ok(out)
}

/// Residue of `F1` at `x_a = x_b`, measured against the residue of the
/// terms with `a ∈ I`, `b ∉ I`, which the terms with `b ∈ I`, `a ∉ I`
/// cancel. `F2` has no pole there.
pub fn check_lemma31(
    ev: &Evaluator,
    k: usize,
    sa: &SiteAssignment,
    a: usize,
    b: usize,
    budget: &QuadratureBudget,
) -> Result<(Residual, usize)> {
    let n = sa.half();
    if a == b || a == 0 || b == 0 || a > n || b > n {
        return Err(Error::OutOfRange(format!(
            "a = {a}, b = {b} must be distinct sites in 1..={n}"
        )));
    }
    if k == 0 || k > n {
        return Err(Error::OutOfRange(format!("k = {k} must be in 1..={n}")));
    }
    let one = Complex64::new(1.0, 0.0);
    let all: Vec<_> = f1_terms(k, &sa.n1(), &sa.n2())?;
    let all_terms: Vec<_> = all.iter().map(|(_, p)| (one, p.clone())).collect();
    let one_side: Vec<_> = all
        .iter()
        .filter(|(i, _)| i.contains(a) && !i.contains(b))
        .map(|(_, p)| (one, p.clone()))
        .collect();
    let center = sa.z(b)?;
    let total = adaptive_residue(
        |w| Ok(ev.eval_sum(&all_terms, &sa.with_coord(a, w)?)?.0),
        center,
        budget,
    )?;
    let partial = adaptive_residue(|w| Ok(ev.eval_sum(&one_side, &sa.with_coord(a, w)?)?.0), center, budget)?;
    Ok((
        Residual::new(total.value.frobenius_norm(), partial.value.frobenius_norm()),
        total.nodes.max(partial.nodes),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiResiduals {
    pub shift_one: Residual,
    pub shift_tau: Residual,
}

/// Shift laws of `F1` and `F2` in `z_1`, each part separately:
///
/// ```text
/// F(z_1 + 1) = Q_1⁻¹ F Q_1          F(z_1 + τ) = e^{2πikħ/M} Λ_1⁻¹ F Λ_1
/// F(z_1 + M) = F                     F(z_1 + Mτ) = e^{2πikħ} F       (large torus)
/// ```
pub fn check_f_quasi_periodicity(
    ev: &Evaluator,
    tau: ModularTau,
    k: usize,
    sa: &SiteAssignment,
    large_torus: bool,
) -> Result<QuasiResiduals> {
    let n = sa.half();
    if k == 0 || k > n {
        return Err(Error::OutOfRange(format!("k = {k} must be in 1..={n}")));
    }
    let m = ev.family().local_dim();
    let spec = ev.spec();
    let hbar = ev.hbar();
    let (x, y) = (sa.n1(), sa.n2());
    let z1 = sa.z(1)?;
    let tau = tau.value();
    let kf = k as f64;
    let mut out = QuasiResiduals {
        shift_one: Residual::zero(),
        shift_tau: Residual::zero(),
    };
    for part in Part::BOTH {
        let base = eval_part(ev, part, k, &x, &y, sa)?;
        let (one, tau_res) = if large_torus {
            let mf = m as f64;
            let f_m = eval_part(ev, part, k, &x, &y, &sa.with_coord(1, z1 + mf)?)?;
            let f_mt = eval_part(ev, part, k, &x, &y, &sa.with_coord(1, z1 + mf * tau)?)?;
            let phase = (2.0 * PI * Complex64::i() * kf * hbar).exp();
            (
                Residual::between(&f_m, &base)?,
                Residual::between(&f_mt, &base.scale(phase))?,
            )
        } else {
            let q = q_matrix(m);
            let l = lambda_matrix(m);
            let q1 = embed_one(&q, 1, spec)?;
            let q1_inv = embed_one(&q.adjoint(), 1, spec)?;
            let l1 = embed_one(&l, 1, spec)?;
            let l1_inv = embed_one(&l.adjoint(), 1, spec)?;
            let f_1 = eval_part(ev, part, k, &x, &y, &sa.with_coord(1, z1 + 1.0)?)?;
            let f_t = eval_part(ev, part, k, &x, &y, &sa.with_coord(1, z1 + tau)?)?;
            let phase = (2.0 * PI * Complex64::i() * kf * hbar / m as f64).exp();
            let want_1 = q1_inv.mul(&base)?.mul(&q1)?;
            let want_t = l1_inv.mul(&base)?.mul(&l1)?.scale(phase);
            (Residual::between(&f_1, &want_1)?, Residual::between(&f_t, &want_t)?)
        };
        out.shift_one = out.shift_one.max(one);
        out.shift_tau = out.shift_tau.max(tau_res);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_and_h_small_cases() {
        assert!(plan_g(1, 2, 1).unwrap().is_empty());
        assert_eq!(plan_g(1, 3, 2).unwrap().pairs(), vec![(1, 2), (4, 3)]);
        let h = plan_h(1, 3, 2).unwrap();
        assert_eq!(h.to_string(), "P1,3");
        assert_eq!(plan_h(2, 4, 2).unwrap().to_string(), "R3,2 R4,1 P2,4");
    }

    #[test]
    fn g_and_h_reject_bad_sites() {
        assert!(plan_g(0, 3, 2).is_err());
        assert!(plan_g(1, 2, 2).is_err());
        assert!(plan_h(1, 5, 2).is_err());
    }
}
