//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use fbm_local::checks::{run_checks, CheckResult};

fn main() {
    let ids: Vec<u8> = (1..=14).collect();
    println!("running {} acceptance criteria", ids.len());
    let report = run_checks(&ids, |c: &CheckResult| println!("{}", c.line()));
    let failed: Vec<u8> = report.checks.iter().filter(|c| !c.passed).map(|c| c.id).collect();
    assert_eq!(report.checks.len(), 14);
    println!(
        "acceptance: {} passed, {} failed, {:.1}s",
        report.checks.len() - failed.len(),
        failed.len(),
        report.seconds
    );
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
