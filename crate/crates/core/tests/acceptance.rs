//! Runs every verification suite at its stated tolerances and prints one
//! line per criterion. Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use qaw_core::suites::{run_suite, Suite, SuiteOptions};

fn main() -> ExitCode {
    let opts = SuiteOptions::default();
    let started = Instant::now();
    let mut failed = 0;
    println!("acceptance (seed {:#x})", opts.seed);
    for (i, suite) in Suite::ALL.into_iter().enumerate() {
        let line = match run_suite(suite, &opts) {
            Ok(r) => {
                let status = if r.passed { "PASS" } else { "FAIL" };
                let worst = r
                    .worst()
                    .map(|w| {
                        let allowed = w.tolerance.abs.max(w.tolerance.rel * w.target.abs());
                        format!("worst {}: {:.3e} (allowed {:.3e})", w.name, w.abs_err, allowed)
                    })
                    .unwrap_or_default();
                if !r.passed {
                    failed += 1;
                }
                format!(
                    "{status} {:>2} {:<24} {:>5} checks {:>9.1} ms  {worst}",
                    i + 1,
                    suite.name(),
                    r.reports.len(),
                    r.runtime_ms
                )
            }
            Err(e) => {
                failed += 1;
                format!("FAIL {:>2} {:<24} error: {e}", i + 1, suite.name())
            }
        };
        println!("{line}");
    }
    println!(
        "{} of {} criteria passed in {:.1} s",
        Suite::ALL.len() - failed,
        Suite::ALL.len(),
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
