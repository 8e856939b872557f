//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs the full-size checks. Pass criterion ids as arguments to run a
//! subset, e.g. `cargo test --release --test acceptance -- 3 5`.

use std::process::ExitCode;
use std::time::Instant;

use ampc_bench::config::Profile;
use ampc_bench::constants;
use ampc_bench::verify::run_criteria;

fn main() -> ExitCode {
    let ids: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let only = (!ids.is_empty()).then_some(ids.as_slice());
    println!("acceptance suite, constants version {}", constants::VERSION);
    let start = Instant::now();
    let criteria = run_criteria(Profile::Full, 0.5, only);
    let mut failed = 0;
    for c in &criteria {
        for check in &c.checks {
            println!(
                "    [{}] {}: observed {:.6} vs threshold {:.6}",
                if check.pass { "ok" } else { "over" },
                check.check_name,
                check.observed,
                check.threshold
            );
        }
        println!(
            "{} criterion {:>2}: {}",
            if c.passed() { "PASS" } else { "FAIL" },
            c.id,
            c.title
        );
        failed += usize::from(!c.passed());
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
