//! Named checks and single-cell execution.
//!
//! A [`Cell`] fixes one identity, its integer parameters and a `(seed,
//! stream)` pair. [`run_cell`] draws `τ`, `ħ`, `η` and the points from that
//! stream in a fixed order and returns an [`IdentityReport`], so any cell of
//! a sweep can be replayed on its own.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::elliptic::{lattice_distance, Elliptic, ModularTau, SeriesConfig};
use crate::error::{Error, Result};
use crate::identities::{
    build_f1, build_f2, check_dual_forms, check_eta_substitution, check_f2_forms, check_f_quasi_periodicity,
    check_lemma31, check_lemma32, check_lemma_y, check_product_lemmas, check_scalar_kernel, check_theorem, expansion,
    kernel_sums, ruijsenaars_sums, spin_commutativity_sums, CheckParams, Evaluator, F2Form, IdentityReport,
    IndexSubset, Residual, SiteAssignment,
};
use crate::residue::{adaptive_residue, QuadratureBudget};
use crate::rmatrix::{
    check_aybe, check_bar_unitarity, check_higher_aybe, check_qybe, check_r_quasi_periodicity, check_skew_symmetry,
    check_unitarity, check_zm_symmetry, BaxterBelavin, RMatrixFamily, RMatrixParams, YangR,
};
use crate::sampling::{
    hbar_is_generic, rng_for, sample_eta, sample_hbar, sample_points, sample_tau, uniform_point, PointRules,
    DEFAULT_POLE_MARGIN, DEFAULT_THETA_FLOOR, MAX_ATTEMPTS,
};
use crate::tensor::{permutation_p, DenseOperator, LatticeSpec, DEFAULT_DIMENSION_CAP};

macro_rules! identity_names {
    ($($variant:ident => $name:literal,)*) => {
        /// Every check the suite knows, in bottom-up order.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(rename_all = "kebab-case")]
        pub enum IdentityName {
            $($variant,)*
        }

        impl IdentityName {
            pub const ALL: &'static [IdentityName] = &[$(IdentityName::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(IdentityName::$variant => $name,)*
                }
            }
        }

        impl FromStr for IdentityName {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok(IdentityName::$variant),)*
                    _ => Err(Error::OutOfRange(format!("unknown identity '{s}'"))),
                }
            }
        }
    };
}

identity_names! {
    ThetaProps => "theta-props",
    PhiProps => "phi-props",
    Fay => "fay",
    HigherFay => "higher-fay",
    Wp => "wp",
    Qybe => "qybe",
    Aybe => "aybe",
    HigherAybe => "higher-aybe",
    Unitarity => "unitarity",
    Skew => "skew",
    Zm => "zm",
    RQuasi => "r-quasi",
    ProductLemmas => "product-lemmas",
    LemmaY => "lemma-y",
    ScalarKernel => "scalar-kernel",
    Ruijsenaars => "ruijsenaars",
    SpinCommutativity => "spin-commutativity",
    Theorem => "theorem",
    F2Forms => "f2-forms",
    Lemma31 => "lemma31",
    Lemma32 => "lemma32",
    FQuasi => "f-quasi",
    ExamplesStructural => "examples-structural",
    YangSmoke => "yang-smoke",
}

impl fmt::Display for IdentityName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which sweep axes change what a check computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Axes {
    pub m: bool,
    pub n: bool,
    pub k: bool,
    pub eta: bool,
}

impl IdentityName {
    pub fn default_tolerance(self) -> f64 {
        use IdentityName::*;
        match self {
            ProductLemmas | LemmaY | ScalarKernel | Ruijsenaars | F2Forms => 1e-10,
            SpinCommutativity | Theorem | FQuasi | YangSmoke => 1e-8,
            Lemma31 => 1e-6,
            Lemma32 => 1e-5,
            ExamplesStructural => 0.0,
            _ => 1e-9,
        }
    }

    pub fn axes(self) -> Axes {
        use IdentityName::*;
        let (m, n, k, eta) = match self {
            ThetaProps | PhiProps | Fay | Wp | ExamplesStructural => (false, false, false, false),
            HigherFay => (false, true, false, false),
            Qybe | Aybe | Unitarity | Skew | Zm | RQuasi => (true, false, false, false),
            HigherAybe | ProductLemmas | LemmaY => (true, true, false, false),
            ScalarKernel | Ruijsenaars => (false, true, true, true),
            SpinCommutativity => (true, true, true, true),
            Theorem | F2Forms | Lemma31 | Lemma32 | FQuasi | YangSmoke => (true, true, true, false),
        };
        Axes { m, n, k, eta }
    }

    /// Number of tensor sites the check builds for a given `N`, or `None`
    /// if it never leaves `ℂ^M ⊗ ℂ^M ⊗ ℂ^M`.
    pub fn sites(self, n: usize) -> Option<usize> {
        use IdentityName::*;
        match self {
            Qybe | Aybe => Some(3),
            Unitarity | Skew | Zm | RQuasi => Some(2),
            HigherAybe => Some(n + 1),
            ProductLemmas => Some((2 * n).max(3)),
            LemmaY => Some((2 * n).max(2)),
            SpinCommutativity => Some(n),
            Theorem | F2Forms | Lemma31 | Lemma32 | FQuasi | YangSmoke => Some(2 * n),
            _ => None,
        }
    }

    /// Smallest `N` the check accepts.
    pub fn min_n(self) -> usize {
        match self {
            IdentityName::Lemma31 => 2,
            _ => 1,
        }
    }
}

/// A parameter that is either given or drawn from the cell's stream.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Choice {
    #[default]
    Random,
    Fixed(Complex64),
}

impl FromStr for Choice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("random") {
            return Ok(Choice::Random);
        }
        Complex64::from_str(&t.replace(' ', ""))
            .map(Choice::Fixed)
            .map_err(|_| Error::OutOfRange(format!("cannot parse '{s}' as a complex number or 'random'")))
    }
}

impl fmt::Display for Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Choice::Random => f.write_str("random"),
            Choice::Fixed(z) => write!(f, "{z}"),
        }
    }
}

impl Serialize for Choice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Choice::Random => s.serialize_str("random"),
            Choice::Fixed(z) => z.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Choice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Word(String),
            Value(Complex64),
        }
        match Raw::deserialize(d)? {
            Raw::Word(w) => w.parse().map_err(serde::de::Error::custom),
            Raw::Value(z) => Ok(Choice::Fixed(z)),
        }
    }
}

/// One unit of work.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub identity: IdentityName,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub tau: Choice,
    pub hbar: Choice,
    pub eta: Choice,
    pub seed: u64,
    pub stream: u64,
    /// Falls back to [`IdentityName::default_tolerance`].
    pub tolerance: Option<f64>,
    pub dimension_cap: usize,
}

impl Cell {
    pub fn new(identity: IdentityName, m: usize, n: usize, k: usize) -> Self {
        Self {
            identity,
            m,
            n,
            k,
            tau: Choice::Random,
            hbar: Choice::Random,
            eta: Choice::Random,
            seed: 0,
            stream: 0,
            tolerance: None,
            dimension_cap: DEFAULT_DIMENSION_CAP,
        }
    }

    pub fn with_seed(mut self, seed: u64, stream: u64) -> Self {
        self.seed = seed;
        self.stream = stream;
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or_else(|| self.identity.default_tolerance())
    }
}

struct Ctx {
    rng: ChaCha8Rng,
    tau: ModularTau,
    ell: Elliptic,
    hbar: Complex64,
    eta: Complex64,
}

fn draw_context(cell: &Cell) -> Result<Ctx> {
    let mut rng = rng_for(cell.seed, cell.stream);
    let tau = match cell.tau {
        Choice::Random => sample_tau(&mut rng),
        Choice::Fixed(t) => ModularTau::new(t)?,
    };
    let ell = Elliptic::new(tau, SeriesConfig::default())?;
    let m = cell.m.max(1);
    let hbar = match cell.hbar {
        Choice::Random => sample_hbar(&mut rng, &ell, m, DEFAULT_THETA_FLOOR)?,
        Choice::Fixed(h) => h,
    };
    let eta = match cell.eta {
        Choice::Random => sample_eta(&mut rng, tau, DEFAULT_POLE_MARGIN)?,
        Choice::Fixed(e) => e,
    };
    Ok(Ctx {
        rng,
        tau,
        ell,
        hbar,
        eta,
    })
}

/// `n` uniform points whose every combination listed by `combos` stays away
/// from the lattice.
fn sample_generic(
    rng: &mut ChaCha8Rng,
    n: usize,
    tau: ModularTau,
    combos: impl Fn(&[Complex64]) -> Vec<Complex64>,
) -> Result<Vec<Complex64>> {
    for _ in 0..MAX_ATTEMPTS {
        let zs: Vec<Complex64> = (0..n).map(|_| uniform_point(rng, tau)).collect();
        if combos(&zs)
            .into_iter()
            .all(|w| lattice_distance(w, tau) >= DEFAULT_POLE_MARGIN)
        {
            return Ok(zs);
        }
    }
    Err(Error::SamplingExhausted(MAX_ATTEMPTS))
}

fn pairwise_differences(ws: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::new();
    for (i, a) in ws.iter().enumerate() {
        for b in &ws[i + 1..] {
            out.push(a - b);
        }
    }
    out
}

fn check_n(cell: &Cell) -> Result<()> {
    let min = cell.identity.min_n();
    if cell.n < min {
        return Err(Error::OutOfRange(format!("{} needs N ≥ {min}", cell.identity)));
    }
    Ok(())
}

fn check_k(cell: &Cell, n: usize) -> Result<()> {
    if cell.k == 0 || cell.k > n {
        return Err(Error::OutOfRange(format!("k = {} must be in 1..={n}", cell.k)));
    }
    Ok(())
}

fn baxter_belavin(cell: &Cell, ctx: &Ctx) -> Result<BaxterBelavin> {
    if cell.m == 0 {
        return Err(Error::OutOfRange("M must be at least 1".into()));
    }
    BaxterBelavin::new(RMatrixParams::new(cell.m, ctx.hbar, ctx.tau, SeriesConfig::default())?)
}

fn capped_evaluator<'a>(cell: &Cell, rm: &'a dyn RMatrixFamily, sites: usize) -> Result<Evaluator<'a>> {
    Evaluator::with_cap(rm, sites, cell.dimension_cap)
}

/// Worst of several named relative residuals.
#[derive(Default)]
struct Parts {
    worst: Option<Residual>,
    components: Vec<(String, f64)>,
}

impl Parts {
    fn add(&mut self, name: impl Into<String>, r: Residual) {
        self.components.push((name.into(), r.rel));
        self.worst = Some(match self.worst {
            Some(w) => w.max(r),
            None => r,
        });
    }

    /// A residual that was already normalized by the check itself.
    fn add_rel(&mut self, name: impl Into<String>, rel: f64) {
        self.add(name, Residual::new(rel, 1.0));
    }

    /// Reported alongside the others without entering the verdict.
    fn note(&mut self, name: impl Into<String>, rel: f64) {
        self.components.push((name.into(), rel));
    }

    fn finish(self) -> (Residual, Vec<(String, f64)>) {
        (self.worst.unwrap_or_else(Residual::zero), self.components)
    }
}

/// Runs one cell.
pub fn run_cell(cell: &Cell) -> Result<IdentityReport> {
    let tol = cell.tolerance();
    let mut ctx = draw_context(cell)?;
    let axes = cell.identity.axes();
    let params = CheckParams {
        m: axes.m.then_some(cell.m),
        n: axes.n.then_some(cell.n),
        k: axes.k.then_some(cell.k),
        tau: Some(ctx.tau.value()),
        hbar: Some(ctx.hbar),
        eta: axes.eta.then_some(ctx.eta),
        seed: Some(cell.seed),
    };
    let mut parts = Parts::default();
    let mut notes = Vec::new();
    let points = dispatch(cell, &mut ctx, &mut parts, &mut notes)?;
    let (residual, components) = parts.finish();
    let mut report =
        IdentityReport::new(cell.identity.as_str(), params, residual, tol, points).with_components(components);
    for n in notes {
        report = report.with_note(n);
    }
    Ok(report)
}

fn dispatch(cell: &Cell, ctx: &mut Ctx, parts: &mut Parts, notes: &mut Vec<String>) -> Result<Vec<Complex64>> {
    use IdentityName::*;
    let tau = ctx.tau;
    match cell.identity {
        ThetaProps => {
            let z = uniform_point(&mut ctx.rng, tau);
            let ell = &ctx.ell;
            let t = ell.theta(z)?;
            let t_tau = ell.theta(z + tau.value())?;
            let scale = t.norm().max(t_tau.norm());
            let i = Complex64::i();
            let pi = std::f64::consts::PI;
            let factor = -(-pi * i * tau.value() - 2.0 * pi * i * z).exp();
            parts.add("odd", Residual::new((ell.theta(-z)? + t).norm(), scale));
            parts.add("shift_one", Residual::new((ell.theta(z + 1.0)? + t).norm(), scale));
            parts.add("shift_tau", Residual::new((t_tau - factor * t).norm(), scale));
            Ok(vec![z])
        }
        PhiProps => {
            let zs = sample_generic(&mut ctx.rng, 2, tau, |w| vec![w[0], w[1], w[0] + w[1]])?;
            let (z, u) = (zs[0], zs[1]);
            let ell = &ctx.ell;
            let phi = ell.kronecker_phi(z, u)?;
            let two_pi_i = 2.0 * std::f64::consts::PI * Complex64::i();
            parts.add("symmetric", Residual::scalar(phi, ell.kronecker_phi(u, z)?));
            parts.add("shift_one", Residual::scalar(ell.kronecker_phi(z + 1.0, u)?, phi));
            parts.add(
                "shift_tau",
                Residual::scalar(ell.kronecker_phi(z + tau.value(), u)?, (-two_pi_i * u).exp() * phi),
            );
            Ok(zs)
        }
        Fay => {
            let zs = sample_generic(&mut ctx.rng, 4, tau, |w| {
                vec![w[0], w[1], w[2], w[3], w[0] - w[2], w[1] + w[3]]
            })?;
            let (z1, u1, z2, u2) = (zs[0], zs[1], zs[2], zs[3]);
            parts.add_rel("fay", ctx.ell.check_fay(z1, u1, z2, u2)?);
            parts.note("fay_swapped", ctx.ell.check_fay(z2, u2, z1, u1)?);
            Ok(zs)
        }
        HigherFay => {
            let n = cell.n;
            check_n(cell)?;
            let zs = sample_generic(&mut ctx.rng, 2 * n, tau, |w| {
                let (ws, us) = w.split_at(n);
                let mut c: Vec<Complex64> = w.to_vec();
                c.extend(pairwise_differences(ws));
                c.push(us.iter().sum());
                c
            })?;
            let (ws, us) = zs.split_at(n);
            parts.add_rel("higher_fay", ctx.ell.check_higher_fay(ws, us)?);
            Ok(zs)
        }
        Wp => {
            let zs = sample_generic(&mut ctx.rng, 2, tau, |w| vec![w[0], w[1], w[0] + w[1], w[0] - w[1]])?;
            let (z, u) = (zs[0], zs[1]);
            let ell = &ctx.ell;
            let lhs = ell.kronecker_phi(z, u)? * ell.kronecker_phi(z, -u)?;
            let (pz, pu) = (ell.weierstrass_p(z)?, ell.weierstrass_p(u)?);
            let scale = lhs.norm().max(pz.norm()).max(pu.norm());
            parts.add("wp", Residual::new((lhs - (pz - pu)).norm(), scale));
            Ok(zs)
        }
        Qybe | Aybe | Unitarity | Skew | Zm | RQuasi | HigherAybe => rmatrix_cell(cell, ctx, parts),
        ProductLemmas | LemmaY => product_cell(cell, ctx, parts),
        ScalarKernel => {
            check_n(cell)?;
            check_k(cell, cell.n)?;
            let n = cell.n;
            let rules = PointRules::with_offsets(&[ctx.eta]);
            let zs = sample_points(&mut ctx.rng, 2 * n, tau, &rules)?;
            let (xs, ys) = zs.split_at(n);
            parts.add("kernel", check_scalar_kernel(&ctx.ell, ctx.hbar, cell.k, xs, ys)?);
            parts.add(
                "eta_substitution",
                check_eta_substitution(&ctx.ell, ctx.eta, cell.k, xs)?,
            );
            Ok(zs)
        }
        Ruijsenaars => {
            check_n(cell)?;
            check_k(cell, cell.n)?;
            let rules = PointRules::with_offsets(&[ctx.eta]);
            let zs = sample_points(&mut ctx.rng, cell.n, tau, &rules)?;
            parts.add(
                "commutativity",
                ruijsenaars_sums(&ctx.ell, ctx.hbar, ctx.eta, cell.k, &zs)?.residual(),
            );
            Ok(zs)
        }
        SpinCommutativity => {
            check_n(cell)?;
            check_k(cell, cell.n)?;
            let bb = baxter_belavin(cell, ctx)?;
            let ev = capped_evaluator(cell, &bb, cell.n)?;
            let rules = PointRules::with_offsets(&[ctx.eta]);
            let zs = sample_points(&mut ctx.rng, cell.n, tau, &rules)?;
            let sa = SiteAssignment::from_points(zs.clone());
            let (a, b) = spin_commutativity_sums(&ev, cell.k, &sa, ctx.eta)?;
            let abs = a.value.sub(&b.value)?.frobenius_norm();
            parts.add("commutativity", Residual::new(abs, a.largest_term.max(b.largest_term)));
            if cell.m == 1 {
                let s = ruijsenaars_sums(&ctx.ell, ctx.hbar, ctx.eta, cell.k, &zs)?;
                parts.note(
                    "scalar_path",
                    scalar_path(&a.value, s.first).max(scalar_path(&b.value, s.second)),
                );
            }
            Ok(zs)
        }
        Theorem | F2Forms | Lemma31 | Lemma32 | FQuasi => theorem_cell(cell, ctx, parts, notes),
        ExamplesStructural => {
            let mut mismatched = 0usize;
            for (n, k, plus, minus) in printed_examples() {
                let (p, m) = expansion(n, k)?;
                let bad = count_mismatches(&p, plus) + count_mismatches(&m, minus);
                parts.note(format!("N{n}_k{k}"), bad as f64);
                mismatched += bad;
            }
            parts.add("mismatched_terms", Residual::new(mismatched as f64, 0.0));
            Ok(Vec::new())
        }
        YangSmoke => yang_cell(cell, ctx, parts),
    }
}

fn scalar_path(matrix: &DenseOperator, scalar: Complex64) -> f64 {
    Residual::scalar(matrix.matrix()[(0, 0)], scalar).rel
}

fn count_mismatches(got: &[String], want: &[&str]) -> usize {
    let mut bad = got.len().abs_diff(want.len());
    for (g, w) in got.iter().zip(want) {
        if g != w {
            bad += 1;
        }
    }
    bad
}

/// `(N, k, F1 terms, F2 terms)` of the three worked examples, as ordered
/// factor sequences.
pub fn printed_examples() -> [(usize, usize, &'static [&'static str], &'static [&'static str]); 3] {
    [
        (
            2,
            1,
            &["R1,2 R3,1 R4,1", "R3,2 R4,2 R2,1"],
            &["R4,3 R3,1 R3,2", "R4,1 R4,2 R3,4"],
        ),
        (
            3,
            1,
            &[
                "R1,2 R1,3 R4,1 R5,1 R6,1",
                "R2,3 R4,2 R5,2 R6,2 R2,1",
                "R4,3 R5,3 R6,3 R3,1 R3,2",
            ],
            &[
                "R5,4 R6,4 R4,1 R4,2 R4,3",
                "R6,5 R5,1 R5,2 R5,3 R4,5",
                "R6,1 R6,2 R6,3 R4,6 R5,6",
            ],
        ),
        (
            3,
            2,
            &[
                "R2,3 R1,3 R4,1 R5,1 R6,1 R4,2 R5,2 R6,2",
                "R1,2 R4,1 R5,1 R6,1 R4,3 R5,3 R6,3 R3,2",
                "R4,2 R5,2 R6,2 R4,3 R5,3 R6,3 R3,1 R2,1",
            ],
            &[
                "R6,5 R6,4 R4,1 R4,2 R4,3 R5,1 R5,2 R5,3",
                "R5,4 R4,1 R4,2 R4,3 R6,1 R6,2 R6,3 R5,6",
                "R5,1 R5,2 R5,3 R6,1 R6,2 R6,3 R4,6 R4,5",
            ],
        ),
    ]
}

fn rmatrix_cell(cell: &Cell, ctx: &mut Ctx, parts: &mut Parts) -> Result<Vec<Complex64>> {
    use IdentityName::*;
    let bb = baxter_belavin(cell, ctx)?;
    if let Some(s) = cell.identity.sites(cell.n) {
        LatticeSpec::with_cap(cell.m, s, cell.dimension_cap)?;
    }
    let tau = ctx.tau;
    let m = cell.m;
    let generic_u = |ell: &Elliptic, u: Complex64| hbar_is_generic(ell, u, m, DEFAULT_THETA_FLOOR);
    match cell.identity {
        Qybe => {
            let zs = sample_generic(&mut ctx.rng, 2, tau, |w| vec![w[0], w[1], w[0] + w[1]])?;
            parts.add_rel("qybe", check_qybe(&bb, zs[0], zs[1])?);
            Ok(zs)
        }
        Aybe => {
            let zs = sample_points(&mut ctx.rng, 3, tau, &PointRules::default())?;
            let (u, u2) = loop_generic(&mut ctx.rng, &ctx.ell, |ell, u, v| {
                Ok(generic_u(ell, u)? && generic_u(ell, v)? && generic_u(ell, u - v)? && generic_u(ell, v - u)?)
            })?;
            parts.add_rel("aybe", check_aybe(&bb, u, u2, [zs[0], zs[1], zs[2]])?);
            let mut pts = zs;
            pts.extend([u, u2]);
            Ok(pts)
        }
        HigherAybe => {
            check_n(cell)?;
            let n = cell.n;
            let ws = sample_generic(&mut ctx.rng, n, tau, |w| {
                let mut c = w.to_vec();
                c.extend(pairwise_differences(w));
                c
            })?;
            let mut us = Vec::with_capacity(n);
            for _ in 0..MAX_ATTEMPTS {
                us.clear();
                for _ in 0..n {
                    us.push(sample_hbar(&mut ctx.rng, &ctx.ell, m, DEFAULT_THETA_FLOOR)?);
                }
                if generic_u(&ctx.ell, us.iter().sum())? {
                    break;
                }
            }
            let a = ctx.rng.random_range(1..=n + 1);
            parts.add_rel(format!("a{a}"), check_higher_aybe(&bb, &us, &ws, a)?);
            let mut pts = ws;
            pts.extend(us);
            Ok(pts)
        }
        Unitarity => {
            let z = sample_generic(&mut ctx.rng, 1, tau, |w| vec![w[0], w[0] + ctx.hbar, w[0] - ctx.hbar])?[0];
            parts.add_rel("unitarity", check_unitarity(&bb, z)?);
            parts.add_rel("normalized", check_bar_unitarity(&bb, z)?);
            Ok(vec![z])
        }
        Skew => {
            let z = sample_generic(&mut ctx.rng, 1, tau, |w| vec![w[0]])?[0];
            parts.add_rel("skew", check_skew_symmetry(&bb, z)?);
            Ok(vec![z])
        }
        Zm => {
            let z = sample_generic(&mut ctx.rng, 1, tau, |w| vec![w[0]])?[0];
            parts.add_rel("zm", check_zm_symmetry(&bb, z)?);
            Ok(vec![z])
        }
        RQuasi => {
            let z = sample_generic(&mut ctx.rng, 1, tau, |w| vec![w[0]])?[0];
            let (one, tau_shift) = check_r_quasi_periodicity(&bb, z)?;
            parts.add_rel("shift_one", one);
            parts.add_rel("shift_tau", tau_shift);
            let (res_z, res_h) = r_residues(&bb, z)?;
            parts.add("residue_z", res_z);
            parts.add("residue_hbar", res_h);
            Ok(vec![z])
        }
        _ => unreachable!("not an R-matrix check"),
    }
}

fn loop_generic(
    rng: &mut ChaCha8Rng,
    ell: &Elliptic,
    ok: impl Fn(&Elliptic, Complex64, Complex64) -> Result<bool>,
) -> Result<(Complex64, Complex64)> {
    for _ in 0..MAX_ATTEMPTS {
        let u = uniform_point(rng, ell.tau());
        let v = uniform_point(rng, ell.tau());
        if ok(ell, u, v)? {
            return Ok((u, v));
        }
    }
    Err(Error::SamplingExhausted(MAX_ATTEMPTS))
}

/// Residues of `R` at `z = 0` (expected `P₁₂`) and at `ħ = 0` (expected
/// `1⊗1`).
pub fn r_residues(rm: &dyn RMatrixFamily, z: Complex64) -> Result<(Residual, Residual)> {
    let budget = QuadratureBudget::default();
    let m = rm.local_dim();
    let spec = LatticeSpec::new(m, 2)?;
    let zero = Complex64::new(0.0, 0.0);
    let hbar = rm.hbar();
    let res_z = adaptive_residue(|w| Ok(rm.eval(w, hbar)?.as_dense()), zero, &budget)?;
    let res_h = adaptive_residue(|h| Ok(rm.eval(z, h)?.as_dense()), zero, &budget)?;
    Ok((
        Residual::between(&res_z.value, &permutation_p(1, 2, &spec)?)?,
        Residual::between(&res_h.value, &DenseOperator::identity(spec.dim()))?,
    ))
}

fn split_three(rng: &mut ChaCha8Rng, sites: usize) -> Result<[IndexSubset; 3]> {
    let mut labels: Vec<usize> = (1..=sites).collect();
    labels.shuffle(rng);
    let base = sites / 3;
    let extra = sites % 3;
    let mut out = Vec::with_capacity(3);
    let mut start = 0;
    for c in 0..3 {
        let len = base + usize::from(c < extra);
        let mut chunk = labels[start..start + len].to_vec();
        chunk.sort_unstable();
        out.push(IndexSubset::full(chunk)?);
        start += len;
    }
    Ok([out[0].clone(), out[1].clone(), out[2].clone()])
}

fn product_cell(cell: &Cell, ctx: &mut Ctx, parts: &mut Parts) -> Result<Vec<Complex64>> {
    check_n(cell)?;
    let bb = baxter_belavin(cell, ctx)?;
    let sites = cell.identity.sites(cell.n).expect("product checks have sites");
    let ev = capped_evaluator(cell, &bb, sites)?;
    let rules = PointRules::with_offsets(&[ctx.hbar]);
    let zs = sample_points(&mut ctx.rng, sites, ctx.tau, &rules)?;
    let sa = SiteAssignment::from_points(zs.clone());
    if cell.identity == IdentityName::ProductLemmas {
        let [a, b, c] = split_three(&mut ctx.rng, sites)?;
        for (name, r) in check_product_lemmas(&ev, &a, &b, &c, &sa)?.named() {
            parts.add(name, r);
        }
        let ab = a.union(&b);
        for (i, j) in [(&ab, &c), (&c, &ab)] {
            let d = check_dual_forms(&ev, i, j, &sa)?;
            parts.add(format!("dual_r[{i:?}|{j:?}]", i = i.elements(), j = j.elements()), d.r);
            parts.add(
                format!("dual_r_prime[{i:?}|{j:?}]", i = i.elements(), j = j.elements()),
                d.r_prime,
            );
            parts.add(format!("dual_y[{i:?}|{j:?}]", i = i.elements(), j = j.elements()), d.y);
        }
    } else {
        let mut labels: Vec<usize> = (1..=sites).collect();
        labels.shuffle(&mut ctx.rng);
        let cut = ctx.rng.random_range(1..sites);
        let mut i: Vec<usize> = labels[..cut].to_vec();
        let mut j: Vec<usize> = labels[cut..].to_vec();
        i.sort_unstable();
        j.sort_unstable();
        let a = i[ctx.rng.random_range(0..i.len())];
        let b = j[ctx.rng.random_range(0..j.len())];
        let (i, j) = (IndexSubset::full(i)?, IndexSubset::full(j)?);
        let (r1, r2) = check_lemma_y(&ev, &i, &j, a, b, &sa)?;
        parts.add("y_split_j", r1);
        parts.add("y_split_i", r2);
    }
    Ok(zs)
}

fn theorem_cell(cell: &Cell, ctx: &mut Ctx, parts: &mut Parts, notes: &mut Vec<String>) -> Result<Vec<Complex64>> {
    use IdentityName::*;
    check_n(cell)?;
    check_k(cell, cell.n)?;
    let n = cell.n;
    let k = cell.k;
    let bb = baxter_belavin(cell, ctx)?;
    let ev = capped_evaluator(cell, &bb, 2 * n)?;
    let zs = sample_points(&mut ctx.rng, 2 * n, ctx.tau, &PointRules::default())?;
    let sa = SiteAssignment::from_points(zs.clone());
    let budget = QuadratureBudget::default();
    match cell.identity {
        Theorem => {
            parts.add("theorem", check_theorem(&ev, k, &sa)?);
            if cell.m == 1 {
                let f1 = build_f1(&ev, k, &sa)?;
                let f2 = build_f2(&ev, k, &sa, F2Form::Rewritten)?;
                let s = kernel_sums(&ctx.ell, ctx.hbar, k, sa.xs(), sa.ys())?;
                parts.note(
                    "scalar_path",
                    scalar_path(&f1.value, s.first).max(scalar_path(&f2.value, s.second)),
                );
            }
        }
        F2Forms => parts.add("f2_forms", check_f2_forms(&ev, k, &sa)?),
        Lemma31 => {
            let a = 1;
            let b = ctx.rng.random_range(2..=n);
            let (r, nodes) = check_lemma31(&ev, k, &sa, a, b, &budget)?;
            parts.add(format!("x{a}=x{b}"), r);
            notes.push(format!("quadrature nodes: {nodes}"));
            if k == n {
                notes.push("k = N: every term has a, b ∈ I, so no term is singular".into());
            }
        }
        Lemma32 => {
            let a = ctx.rng.random_range(1..=n);
            let b = ctx.rng.random_range(n + 1..=2 * n);
            let res = check_lemma32(&ev, k, &sa, a, b, &budget)?;
            for (part, r) in &res.parts {
                parts.add(format!("{}:x{a}=y{}", part.name(), b - n), *r);
            }
            notes.push(format!("quadrature nodes: {}", res.nodes));
            if k == 1 {
                notes.push("k = 1: the lower sums are the empty product".into());
            }
        }
        FQuasi => {
            let small = check_f_quasi_periodicity(&ev, ctx.tau, k, &sa, false)?;
            let large = check_f_quasi_periodicity(&ev, ctx.tau, k, &sa, true)?;
            parts.add("shift_one", small.shift_one);
            parts.add("shift_tau", small.shift_tau);
            parts.add("shift_m", large.shift_one);
            parts.add("shift_m_tau", large.shift_tau);
        }
        _ => unreachable!("not a theorem check"),
    }
    Ok(zs)
}

fn yang_cell(cell: &Cell, ctx: &mut Ctx, parts: &mut Parts) -> Result<Vec<Complex64>> {
    check_n(cell)?;
    check_k(cell, cell.n)?;
    if cell.m == 0 {
        return Err(Error::OutOfRange("M must be at least 1".into()));
    }
    let n = cell.n;
    let y = YangR {
        m: cell.m,
        hbar: ctx.hbar,
    };
    let ev = capped_evaluator(cell, &y, 2 * n)?;
    let tau = ctx.tau;
    let zs = sample_points(&mut ctx.rng, 2 * n, tau, &PointRules::default())?;
    let sa = SiteAssignment::from_points(zs.clone());
    parts.add("theorem", check_theorem(&ev, cell.k, &sa)?);
    let uv = sample_generic(&mut ctx.rng, 2, tau, |w| vec![w[0], w[1], w[0] + w[1]])?;
    parts.add_rel("qybe", check_qybe(&y, uv[0], uv[1])?);
    parts.add_rel("unitarity", check_unitarity(&y, uv[0])?);
    parts.add_rel("skew", check_skew_symmetry(&y, uv[0])?);
    let mut pts = zs;
    pts.extend(uv);
    Ok(pts)
}
