//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use ellr::IdentityName::{self, *};
use ellr::{Elliptic, ModularTau, SeriesConfig};
use ellr_cli::{run_sweep, CheckRecord, KPolicy, Outcome, RunReport, SweepConfig};

struct Verdict {
    ok: bool,
    detail: String,
}

/// Collects the conditions of one criterion.
#[derive(Default)]
struct Tally {
    failures: Vec<String>,
    facts: Vec<String>,
}

impl Tally {
    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn fact(&mut self, s: impl Into<String>) {
        self.facts.push(s.into());
    }

    /// Every check passed; records the count and the worst relative residual.
    fn all_pass(&mut self, label: &str, r: &RunReport) {
        let worst = r.checks.iter().filter_map(|c| c.rel_residual).fold(0.0_f64, f64::max);
        self.fact(format!(
            "{label}: {}/{} pass, worst {worst:.1e}",
            r.summary.pass, r.summary.total
        ));
        for c in r.checks.iter().filter(|c| c.verdict != Outcome::Pass) {
            self.failures.push(describe(c));
        }
        self.require(r.summary.total > 0, format!("{label}: no checks ran"));
    }

    /// A named component stays under `bound` wherever it appears.
    fn component_max(
        &mut self,
        label: &str,
        r: &RunReport,
        name: &str,
        bound: f64,
        filter: impl Fn(&CheckRecord) -> bool,
    ) {
        let vals: Vec<f64> = r
            .checks
            .iter()
            .filter(|c| filter(c))
            .flat_map(|c| c.components.iter().filter(|(n, _)| n == name).map(|(_, v)| *v))
            .collect();
        let worst = vals.iter().copied().fold(0.0_f64, f64::max);
        self.fact(format!("{label}: {} values, worst {worst:.1e}", vals.len()));
        self.require(!vals.is_empty(), format!("{label}: component {name} missing"));
        self.require(
            vals.iter().all(|v| *v <= bound),
            format!("{label}: {worst:e} > {bound:e}"),
        );
    }

    fn within(&mut self, elapsed: Duration, limit: Duration) {
        self.fact(format!("{:.2} s (limit {} s)", elapsed.as_secs_f64(), limit.as_secs()));
        self.require(elapsed <= limit, format!("took {:.1} s", elapsed.as_secs_f64()));
    }

    fn finish(self) -> Verdict {
        let mut detail = self.facts.join("; ");
        if !self.failures.is_empty() {
            let shown: Vec<_> = self.failures.iter().take(5).cloned().collect();
            detail = format!(
                "{detail}\n    failures ({}): {}",
                self.failures.len(),
                shown.join(" | ")
            );
        }
        Verdict {
            ok: self.failures.is_empty(),
            detail,
        }
    }
}

fn describe(c: &CheckRecord) -> String {
    format!(
        "{} M={:?} N={:?} k={:?} trial {}: {:?} rel={:?} {}",
        c.identity,
        c.params.m,
        c.params.n,
        c.params.k,
        c.trial,
        c.verdict,
        c.rel_residual,
        c.error.as_deref().unwrap_or("")
    )
}

fn sweep(ids: &[IdentityName], m: &[usize], n: &[usize], trials: usize, tol: Option<f64>) -> SweepConfig {
    SweepConfig {
        identities: ids.to_vec(),
        m_list: m.to_vec(),
        n_list: n.to_vec(),
        k_policy: KPolicy::All,
        trials,
        tolerance: tol,
        seed: 20_240_601,
        ..SweepConfig::default()
    }
}

fn run(c: &SweepConfig) -> RunReport {
    run_sweep(c).expect("valid sweep config")
}

fn elliptic_layer() -> Verdict {
    let mut t = Tally::default();
    let start = Instant::now();
    let r = run(&sweep(&[ThetaProps, PhiProps, Fay, Wp], &[1], &[1], 100, Some(1e-9)));
    t.all_pass("theta/phi/fay/wp", &r);
    let r = run(&sweep(&[HigherFay], &[1], &[1, 2, 3, 4, 5, 6], 100, Some(1e-9)));
    t.all_pass("higher fay n ≤ 6", &r);
    t.within(start.elapsed(), Duration::from_secs(5));
    t.finish()
}

fn rmatrix_layer() -> Verdict {
    let mut t = Tally::default();
    let start = Instant::now();
    let r = run(&sweep(
        &[Qybe, Aybe, Unitarity, Skew, Zm, RQuasi],
        &[1, 2, 3],
        &[1],
        20,
        Some(1e-9),
    ));
    t.all_pass("two/three-site relations", &r);
    t.component_max("residue at z = 0", &r, "residue_z", 1e-7, |_| true);
    t.component_max("residue at hbar = 0", &r, "residue_hbar", 1e-7, |_| true);
    let r = run(&sweep(&[HigherAybe], &[1, 2, 3], &[1, 2, 3, 4], 20, Some(1e-9)));
    t.all_pass("higher aybe n ≤ 4", &r);
    t.within(start.elapsed(), Duration::from_secs(30));
    t.finish()
}

fn product_algebra() -> Verdict {
    let mut t = Tally::default();
    let start = Instant::now();
    let r = run(&sweep(&[ProductLemmas, LemmaY], &[1, 2], &[3], 10, Some(1e-10)));
    t.all_pass("6 sites", &r);
    for name in [
        "r_merge",
        "r_prime_merge",
        "unitarity_r",
        "unitarity_r_prime",
        "unitarity_bar",
        "y_split_j",
        "y_split_i",
    ] {
        t.component_max(name, &r, name, 1e-10, |_| true);
    }
    let duals = r
        .checks
        .iter()
        .flat_map(|c| &c.components)
        .filter(|(n, _)| n.starts_with("dual_"))
        .count();
    t.require(duals >= 6 * 20, format!("only {duals} dual-form comparisons"));
    t.fact(format!("{duals} dual-form comparisons"));
    t.within(start.elapsed(), Duration::from_secs(30));
    t.finish()
}

fn main_theorem() -> Verdict {
    let mut t = Tally::default();
    let start = Instant::now();
    let r = run(&sweep(&[Theorem], &[1, 2], &[1, 2, 3], 10, Some(1e-8)));
    t.all_pass("M ≤ 2, N ≤ 3", &r);
    t.component_max("scalar path M = 1", &r, "scalar_path", 1e-11, |c| c.params.m == Some(1));
    let r = run(&sweep(&[Theorem], &[3], &[1, 2], 10, Some(1e-8)));
    t.all_pass("M = 3, N ≤ 2", &r);
    let r = run(&sweep(&[ExamplesStructural], &[1], &[1], 1, None));
    t.all_pass("printed expansions", &r);
    t.within(start.elapsed(), Duration::from_secs(180));
    t.finish()
}

fn scalar_identities() -> Verdict {
    let mut t = Tally::default();
    let start = Instant::now();
    let r = run(&sweep(&[Ruijsenaars], &[1], &[1, 2, 3, 4, 5], 10, Some(1e-10)));
    t.all_pass("commutativity N ≤ 5", &r);
    let r = run(&sweep(&[ScalarKernel], &[1], &[1, 2, 3, 4], 10, Some(1e-10)));
    t.all_pass("kernel N ≤ 4", &r);
    t.component_max("eta substitution k = 1", &r, "eta_substitution", 1e-10, |c| {
        c.params.k == Some(1)
    });
    t.fact(format!("{:.2} s", start.elapsed().as_secs_f64()));
    t.finish()
}

fn spin_commutativity() -> Verdict {
    let mut t = Tally::default();
    let start = Instant::now();
    let r = run(&sweep(&[SpinCommutativity], &[1, 2], &[1, 2, 3], 10, Some(1e-8)));
    t.all_pass("N ≤ 3, M ≤ 2", &r);
    t.component_max("M = 1 vs scalar", &r, "scalar_path", 1e-11, |c| c.params.m == Some(1));
    t.within(start.elapsed(), Duration::from_secs(60));
    t.finish()
}

fn residue_lemmas() -> Verdict {
    let mut t = Tally::default();
    let start = Instant::now();
    let mut c = sweep(&[Lemma31], &[1, 2], &[2, 3], 5, Some(1e-6));
    c.k_policy = KPolicy::List(vec![2]);
    t.all_pass("x-x residue", &run(&c));
    c.identities = vec![Lemma32];
    c.tolerance = Some(1e-5);
    t.all_pass("x-y residue", &run(&c));
    let r = run(&sweep(&[FQuasi], &[1, 2], &[1, 2, 3], 5, Some(1e-8)));
    t.all_pass("shifts", &r);
    for name in ["shift_m", "shift_m_tau"] {
        t.component_max(name, &r, name, 1e-8, |_| true);
    }
    t.within(start.elapsed(), Duration::from_secs(120));
    t.finish()
}

fn determinism_and_oracle() -> Verdict {
    let mut t = Tally::default();
    let c = sweep(
        &[HigherFay, HigherAybe, Theorem, Lemma32, SpinCommutativity],
        &[1, 2],
        &[1, 2],
        2,
        None,
    );
    let strip = |r: &RunReport| r.checks.iter().map(CheckRecord::without_timing).collect::<Vec<_>>();
    let a = strip(&run(&c));
    let b = strip(&run(&c));
    let bits = |v: &[CheckRecord]| -> Vec<u64> {
        v.iter()
            .flat_map(|c| {
                c.points
                    .iter()
                    .flat_map(|z| [z.re.to_bits(), z.im.to_bits()])
                    .chain(c.rel_residual.map(f64::to_bits))
            })
            .collect()
    };
    t.require(a == b && bits(&a) == bits(&b), "repeated sweep differs");
    t.fact(format!("{} cells replayed bit-identically", a.len()));

    let mut worst = 0.0_f64;
    for (re, im) in [(0.0, 1.0), (0.25, 1.1), (-0.4, 0.8)] {
        let tau = common::c(re, im);
        let ell = Elliptic::new(ModularTau::new(tau).unwrap(), SeriesConfig::default()).unwrap();
        for z in common::grid(tau) {
            let oracle = common::theta_sine_series(z, tau);
            t.require(
                common::rel(oracle, common::theta_product(z, tau)) < 1e-13,
                "oracle forms disagree",
            );
            worst = worst.max(common::rel(ell.theta(z).unwrap(), oracle));
        }
    }
    t.require(worst <= 1e-12, format!("theta vs oracle {worst:e}"));
    t.fact(format!("theta vs oracle worst {worst:.1e}"));

    let start = Instant::now();
    let full = run(&SweepConfig::default());
    t.all_pass("default suite", &full);
    t.within(start.elapsed(), Duration::from_secs(480));
    t.finish()
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 8] = [
        ("elliptic layer", elliptic_layer),
        ("R-matrix layer", rmatrix_layer),
        ("product algebra", product_algebra),
        ("main identity", main_theorem),
        ("scalar identities", scalar_identities),
        ("spin commutativity", spin_commutativity),
        ("residue lemmas and shifts", residue_lemmas),
        ("determinism and oracle", determinism_and_oracle),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let v = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Verdict {
            ok: false,
            detail: "panicked".into(),
        });
        if !v.ok {
            failed += 1;
        }
        println!(
            "{} criterion {}: {name} ({})",
            if v.ok { "PASS" } else { "FAIL" },
            i + 1,
            v.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
