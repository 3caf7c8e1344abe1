//! Sweep configuration, execution and reporting behind the `ellr` binary.
//!
//! A [`SweepConfig`] expands into [`ellr::Cell`]s, one per identity,
//! parameter combination and trial. Each cell gets its own RNG stream derived
//! from its coordinates, so a report is reproducible from the config alone
//! and a single row can be replayed with [`ellr::run_cell`].

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use ellr::identities::{CheckParams, IdentityReport, Verdict};
use ellr::{run_cell, Cell, Choice, IdentityName};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub mod args;

pub use args::Args;

pub const DEFAULT_DIMENSION_CAP: usize = 4096;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("{axis} list is empty")]
    EmptyAxis { axis: &'static str },
    #[error("{axis} values must be positive, got 0")]
    ZeroValue { axis: &'static str },
    #[error("trials must be positive")]
    NoTrials,
    #[error("tolerance must be a finite non-negative number, got {0}")]
    BadTolerance(f64),
    #[error("{identity} at M = {m}, N = {n} needs {m}^{sites} = {dim} dimensions, above the cap {cap}")]
    DimensionCap {
        identity: IdentityName,
        m: usize,
        n: usize,
        sites: usize,
        dim: u128,
        cap: usize,
    },
    #[error("tau must have positive imaginary part, got {0}")]
    BadTau(Complex64),
    #[error("cannot parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KPolicy {
    /// Every `k` in `1..=N`.
    All,
    /// The listed values that do not exceed `N`.
    List(Vec<usize>),
}

impl FromStr for KPolicy {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        if s.trim().eq_ignore_ascii_case("all") {
            Ok(KPolicy::All)
        } else {
            Ok(KPolicy::List(parse_list("k", s)?))
        }
    }
}

/// Comma separated positive integers.
pub fn parse_list(what: &'static str, s: &str) -> Result<Vec<usize>, ConfigError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>().map_err(|e| ConfigError::Parse {
                what,
                detail: format!("'{t}': {e}"),
            })
        })
        .collect()
}

/// Comma separated identity names, or `all`.
pub fn parse_identities(s: &str) -> Result<Vec<IdentityName>, ConfigError> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(IdentityName::ALL.to_vec());
    }
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<IdentityName>().map_err(|e| ConfigError::Parse {
                what: "identity",
                detail: e.to_string(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub identities: Vec<IdentityName>,
    pub m_list: Vec<usize>,
    pub n_list: Vec<usize>,
    pub k_policy: KPolicy,
    pub tau: Choice,
    pub hbar: Choice,
    pub eta: Choice,
    pub trials: usize,
    /// Overrides every identity's own tolerance when set.
    pub tolerance: Option<f64>,
    pub seed: u64,
    pub dimension_cap: usize,
    /// Threads for cell execution. `0` lets rayon decide.
    #[serde(default)]
    pub workers: usize,
}

impl Default for SweepConfig {
    /// The full default suite.
    fn default() -> Self {
        Self {
            identities: IdentityName::ALL.to_vec(),
            m_list: vec![1, 2],
            n_list: vec![1, 2, 3],
            k_policy: KPolicy::All,
            tau: Choice::Random,
            hbar: Choice::Random,
            eta: Choice::Random,
            trials: 3,
            tolerance: None,
            seed: 1,
            dimension_cap: DEFAULT_DIMENSION_CAP,
            workers: 0,
        }
    }
}

fn nonzero(axis: &'static str, xs: &[usize]) -> Result<(), ConfigError> {
    if xs.is_empty() {
        return Err(ConfigError::EmptyAxis { axis });
    }
    if xs.contains(&0) {
        return Err(ConfigError::ZeroValue { axis });
    }
    Ok(())
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        nonzero("M", &self.m_list)?;
        nonzero("N", &self.n_list)?;
        if let KPolicy::List(ks) = &self.k_policy {
            nonzero("k", ks)?;
        }
        if self.trials == 0 {
            return Err(ConfigError::NoTrials);
        }
        if let Choice::Fixed(t) = self.tau {
            if t.im.is_nan() || t.im <= 0.0 || !t.re.is_finite() {
                return Err(ConfigError::BadTau(t));
            }
        }
        if let Some(t) = self.tolerance {
            if !t.is_finite() || t < 0.0 {
                return Err(ConfigError::BadTolerance(t));
            }
        }
        for &identity in &self.identities {
            if !identity.axes().m {
                continue;
            }
            for &m in &self.m_list {
                for &n in &self.n_list {
                    let Some(sites) = identity.sites(n) else { continue };
                    let dim = (m as u128).checked_pow(sites as u32).unwrap_or(u128::MAX);
                    if dim > self.dimension_cap as u128 {
                        return Err(ConfigError::DimensionCap {
                            identity,
                            m,
                            n,
                            sites,
                            dim,
                            cap: self.dimension_cap,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Every cell of the sweep in report order: identities as listed, then
    /// `M`, `N`, `k` and trial. Axes an identity ignores collapse to one value
    /// and cells below the identity's smallest `N` are skipped.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &identity in &self.identities {
            let axes = identity.axes();
            let ms = if axes.m { dedup(&self.m_list) } else { vec![1] };
            let ns: Vec<usize> = if axes.n {
                dedup(&self.n_list)
                    .into_iter()
                    .filter(|&n| n >= identity.min_n())
                    .collect()
            } else {
                vec![1]
            };
            for &m in &ms {
                for &n in &ns {
                    let ks: Vec<usize> = if !axes.k {
                        vec![1]
                    } else {
                        match &self.k_policy {
                            KPolicy::All => (1..=n).collect(),
                            KPolicy::List(ks) => dedup(ks).into_iter().filter(|&k| k <= n).collect(),
                        }
                    };
                    for &k in &ks {
                        for trial in 0..self.trials {
                            let mut cell =
                                Cell::new(identity, m, n, k).with_seed(self.seed, stream_of(identity, m, n, k, trial));
                            cell.tau = self.tau;
                            cell.hbar = self.hbar;
                            cell.eta = self.eta;
                            cell.tolerance = self.tolerance;
                            cell.dimension_cap = self.dimension_cap;
                            out.push(cell);
                        }
                    }
                }
            }
        }
        out
    }
}

fn dedup(xs: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(xs.len());
    for &x in xs {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// RNG stream for a cell. Depends only on the cell's own coordinates, so
/// adding identities or list entries leaves other cells' samples unchanged.
pub fn stream_of(identity: IdentityName, m: usize, n: usize, k: usize, trial: usize) -> u64 {
    let id = IdentityName::ALL.iter().position(|&i| i == identity).unwrap_or(0) as u64;
    (id << 56) | ((m as u64 & 0xff) << 48) | ((n as u64 & 0xff) << 40) | ((k as u64 & 0xff) << 32) | trial as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Error,
}

/// One row of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub identity: IdentityName,
    pub params: CheckParams,
    /// `None` when the cell errored or the residual was not finite.
    pub abs_residual: Option<f64>,
    pub rel_residual: Option<f64>,
    pub operand_norm: Option<f64>,
    pub tolerance: f64,
    pub verdict: Outcome,
    pub seed: u64,
    pub stream: u64,
    pub trial: usize,
    pub points: Vec<Complex64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<(String, f64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub elapsed_ms: f64,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl CheckRecord {
    fn from_report(cell: &Cell, trial: usize, report: IdentityReport, elapsed_ms: f64) -> Self {
        let verdict = match report.verdict {
            Verdict::Pass if report.rel_residual.is_finite() => Outcome::Pass,
            _ => Outcome::Fail,
        };
        Self {
            identity: cell.identity,
            params: report.params,
            abs_residual: finite(report.abs_residual),
            rel_residual: finite(report.rel_residual),
            operand_norm: finite(report.operand_norm),
            tolerance: cell.tolerance(),
            verdict,
            seed: cell.seed,
            stream: cell.stream,
            trial,
            points: report.points,
            components: report.components,
            notes: report.notes,
            error: None,
            elapsed_ms,
        }
    }

    fn from_error(cell: &Cell, trial: usize, error: String, elapsed_ms: f64) -> Self {
        let axes = cell.identity.axes();
        let params = CheckParams {
            m: axes.m.then_some(cell.m),
            n: axes.n.then_some(cell.n),
            k: axes.k.then_some(cell.k),
            seed: Some(cell.seed),
            ..CheckParams::default()
        };
        Self {
            identity: cell.identity,
            params,
            abs_residual: None,
            rel_residual: None,
            operand_norm: None,
            tolerance: cell.tolerance(),
            verdict: Outcome::Error,
            seed: cell.seed,
            stream: cell.stream,
            trial,
            points: Vec::new(),
            components: Vec::new(),
            notes: Vec::new(),
            error: Some(error),
            elapsed_ms,
        }
    }

    /// Same row with the wall-clock time zeroed, for determinism comparisons.
    pub fn without_timing(&self) -> Self {
        Self {
            elapsed_ms: 0.0,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub error: usize,
}

impl Summary {
    pub fn tally(checks: &[CheckRecord]) -> Self {
        let mut s = Summary {
            total: checks.len(),
            ..Summary::default()
        };
        for c in checks {
            match c.verdict {
                Outcome::Pass => s.pass += 1,
                Outcome::Fail => s.fail += 1,
                Outcome::Error => s.error += 1,
            }
        }
        s
    }

    pub fn all_passed(&self) -> bool {
        self.fail == 0 && self.error == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: SweepConfig,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
    pub elapsed_ms: f64,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.summary.all_passed() {
            0
        } else {
            1
        }
    }
}

fn trial_of(cell: &Cell) -> usize {
    (cell.stream & 0xffff_ffff) as usize
}

fn run_one(cell: &Cell) -> CheckRecord {
    let start = Instant::now();
    let result = run_cell(cell);
    let ms = start.elapsed().as_secs_f64() * 1e3;
    match result {
        Ok(report) => CheckRecord::from_report(cell, trial_of(cell), report, ms),
        Err(e) => CheckRecord::from_error(cell, trial_of(cell), e.to_string(), ms),
    }
}

/// Validates the config and runs every cell. Cell errors end up in the
/// report; only an invalid config is an `Err`.
pub fn run_sweep(config: &SweepConfig) -> Result<RunReport, ConfigError> {
    config.validate()?;
    let start = Instant::now();
    let cells = config.cells();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| ConfigError::Parse {
            what: "workers",
            detail: e.to_string(),
        })?;
    let checks: Vec<CheckRecord> = pool.install(|| cells.par_iter().map(run_one).collect());
    let summary = Summary::tally(&checks);
    Ok(RunReport {
        config: config.clone(),
        checks,
        summary,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

pub fn render(report: &RunReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => render_text(report),
    }
}

fn opt(x: Option<usize>) -> String {
    x.map_or_else(|| "-".into(), |v| v.to_string())
}

fn render_text(report: &RunReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<20} {:>2} {:>2} {:>2} {:>5} {:>11} {:>9} {:>7} {:>9}",
        "identity", "M", "N", "k", "trial", "rel", "tol", "verdict", "ms"
    );
    for c in &report.checks {
        let rel = c.rel_residual.map_or_else(|| "-".into(), |r| format!("{r:.3e}"));
        let verdict = match c.verdict {
            Outcome::Pass => "pass",
            Outcome::Fail => "FAIL",
            Outcome::Error => "ERROR",
        };
        let _ = writeln!(
            s,
            "{:<20} {:>2} {:>2} {:>2} {:>5} {:>11} {:>9.1e} {:>7} {:>9.1}",
            c.identity.as_str(),
            opt(c.params.m),
            opt(c.params.n),
            opt(c.params.k),
            c.trial,
            rel,
            c.tolerance,
            verdict,
            c.elapsed_ms
        );
        if let Some(e) = &c.error {
            let _ = writeln!(s, "    error: {e}");
        }
    }
    let sm = report.summary;
    let _ = writeln!(
        s,
        "\n{} checks: {} pass, {} fail, {} error ({:.1} s)",
        sm.total,
        sm.pass,
        sm.fail,
        sm.error,
        report.elapsed_ms / 1e3
    );
    s
}

/// Writes the report to `path`, or to standard output when `path` is `None`.
pub fn emit_report(report: &RunReport, format: Format, path: Option<&Path>) -> io::Result<()> {
    let body = render(report, format);
    match path {
        Some(p) => std::fs::write(p, body),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()
        }
    }
}
