//! Acceptance harness: runs every named verification suite at the
//! default configuration (q = 0.5, 50 digits, l_max = 40.5, tol 1e-8)
//! and prints one pass/fail line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion report.

use podles_core::verify::{run_suite, VerifyConfig, SUITES};

#[test]
fn acceptance() {
    let cfg = VerifyConfig::default();
    let mut all_pass = true;
    let mut lines = Vec::new();
    for (i, suite) in SUITES.iter().enumerate() {
        let rep = run_suite(suite, &cfg).expect("suite runs");
        let status = if rep.pass { "PASS" } else { "FAIL" };
        let worst = rep
            .checks
            .iter()
            .map(|c| c.observed / c.threshold)
            .fold(0.0f64, f64::max);
        let line = format!(
            "criterion {:2} ({suite}): {status}  [{} checks, worst observed/threshold {:.2e}, {} ms]",
            i + 1,
            rep.checks.len(),
            worst,
            rep.duration_ms
        );
        println!("{line}");
        if !rep.pass {
            for c in rep.checks.iter().filter(|c| !c.pass) {
                println!("    failed: {} (observed {:.3e}, threshold {:.1e})", c.name, c.observed, c.threshold);
            }
        }
        all_pass &= rep.pass;
        lines.push(line);
    }
    assert!(all_pass, "acceptance criteria failed:\n{}", lines.join("\n"));
}
