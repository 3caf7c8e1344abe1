use std::process::ExitCode;

use clap::Parser;
use ellr::IdentityName;
use ellr_cli::{emit_report, run_sweep, Args};

fn main() -> ExitCode {
    let args = Args::parse();
    if args.identity == "list" {
        for id in IdentityName::ALL {
            println!("{id:<20} tol {:.0e}", id.default_tolerance());
        }
        return ExitCode::SUCCESS;
    }
    let config = match args.to_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("ellr: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run_sweep(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("ellr: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit_report(&report, args.format, args.out.as_deref()) {
        eprintln!("ellr: cannot write report: {e}");
        return ExitCode::from(2);
    }
    if args.out.is_some() || args.format == ellr_cli::Format::Json {
        let s = report.summary;
        eprintln!(
            "{} checks: {} pass, {} fail, {} error",
            s.total, s.pass, s.fail, s.error
        );
    }
    ExitCode::from(report.exit_code() as u8)
}
