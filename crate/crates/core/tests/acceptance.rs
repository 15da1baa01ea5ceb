//! Runs the full acceptance battery and prints one line per criterion.

use hamca::suite::{run_suite, Status, SuiteConfig};

#[test]
fn acceptance_battery() {
    let report = run_suite(&SuiteConfig::default());
    println!();
    for c in &report.criteria {
        let tag = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        println!(
            "{tag} criterion {:>2} ({}) [{:.3} s / {} s]: {}",
            c.id, c.name, c.elapsed_s, c.budget_s, c.summary
        );
        for f in &c.failures {
            println!("     - {f}");
        }
    }
    assert_eq!(report.criteria.len(), 10);
    let failed: Vec<u8> = report.failed().map(|c| c.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
