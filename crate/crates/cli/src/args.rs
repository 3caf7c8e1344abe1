//! Command-line flags and their translation into a [`SweepConfig`].

use std::path::PathBuf;

use clap::Parser;
use ellr::Choice;

use crate::{parse_identities, parse_list, ConfigError, Format, KPolicy, SweepConfig, DEFAULT_DIMENSION_CAP};

/// Sweep the elliptic R-matrix identity checks over seeded random samples.
#[derive(Debug, Clone, Parser)]
#[command(name = "ellr", version)]
pub struct Args {
    /// Comma separated identity names, or `all` for the full suite in
    /// bottom-up order. Pass `--identity list` to print the names.
    #[arg(long, default_value = "all")]
    pub identity: String,
    /// Local dimensions `M`.
    #[arg(long, default_value = "1,2")]
    pub m: String,
    /// Site counts `N` (`2N` sites for the multi-site identities).
    #[arg(long, default_value = "1,2,3")]
    pub n: String,
    /// `all` or a comma separated list of subset sizes.
    #[arg(long, default_value = "all")]
    pub k: String,
    /// Modular parameter, e.g. `0.1+1.2i`, or `random`.
    #[arg(long, default_value = "random")]
    pub tau: String,
    #[arg(long, default_value = "random")]
    pub hbar: String,
    #[arg(long, default_value = "random")]
    pub eta: String,
    #[arg(long, default_value_t = 3)]
    pub trials: usize,
    /// Relative tolerance for every check. Each identity has its own default.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_DIMENSION_CAP)]
    pub dimension_cap: usize,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

fn choice(what: &'static str, s: &str) -> Result<Choice, ConfigError> {
    s.parse().map_err(|e: ellr::Error| ConfigError::Parse {
        what,
        detail: e.to_string(),
    })
}

impl Args {
    pub fn to_config(&self) -> Result<SweepConfig, ConfigError> {
        let config = SweepConfig {
            identities: parse_identities(&self.identity)?,
            m_list: parse_list("M", &self.m)?,
            n_list: parse_list("N", &self.n)?,
            k_policy: self.k.parse::<KPolicy>()?,
            tau: choice("tau", &self.tau)?,
            hbar: choice("hbar", &self.hbar)?,
            eta: choice("eta", &self.eta)?,
            trials: self.trials,
            tolerance: self.tol,
            seed: self.seed,
            dimension_cap: self.dimension_cap,
            workers: self.workers,
        };
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_the_default_config() {
        let args = Args::parse_from(["ellr"]);
        assert_eq!(args.to_config().unwrap(), SweepConfig::default());
    }

    #[test]
    fn fixed_values_parse() {
        let args = Args::parse_from(["ellr", "--identity", "qybe,theorem", "--tau", "0.1+1.2i", "--k", "1,2"]);
        let c = args.to_config().unwrap();
        assert_eq!(c.identities.len(), 2);
        assert_eq!(c.k_policy, KPolicy::List(vec![1, 2]));
        assert!(matches!(c.tau, Choice::Fixed(_)));
    }

    #[test]
    fn bad_values_are_config_errors() {
        for bad in [
            vec!["ellr", "--identity", "nope"],
            vec!["ellr", "--m", "x"],
            vec!["ellr", "--tau", "1+i+"],
            vec!["ellr", "--trials", "0"],
            vec!["ellr", "--m", "3", "--n", "4", "--identity", "theorem"],
        ] {
            assert!(Args::parse_from(bad).to_config().is_err());
        }
    }
}
