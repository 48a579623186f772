//! Acceptance criteria 1–10: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report is always printed; the
//! process exits non-zero when a criterion fails.

use std::collections::BTreeMap;

use ridgekit::verify::{verify_builtin, Check, VerifyOptions};
use ridgekit::DomainSpec;

/// Title and wall-clock limit in seconds; criterion 3 is limited per domain.
const CRITERIA: [(u8, &str, Option<f64>); 10] = [
    (1, "corner counterexample values on disc_halfplane", Some(10.0)),
    (2, "disc_halfplane skeleton lies on the nonnegative x2-axis", Some(60.0)),
    (3, "two-direction agreement on disc and ellipse", Some(120.0)),
    (4, "endpoint inequality d >= rho* - tol", Some(120.0)),
    (5, "rho against 1/kappa on the ellipse", Some(60.0)),
    (6, "upper semicontinuity of the projection", Some(30.0)),
    (7, "distance against brute force", Some(60.0)),
    (8, "eikonal far-region error and convergence", Some(60.0)),
    (9, "degenerate origin of y = |x|^(3/2)", None),
    (10, "invariant suites", None),
];

fn main() {
    let opts = VerifyOptions::default();
    let mut by_criterion: BTreeMap<u8, Vec<(String, Check)>> = BTreeMap::new();
    for name in DomainSpec::BUILTIN_NAMES {
        let report = verify_builtin(name, &opts).expect("builtin domain");
        for c in report.checks {
            if let Some(n) = c.criterion {
                by_criterion.entry(n).or_default().push((name.to_string(), c));
            }
        }
    }

    let mut failed = Vec::new();
    println!();
    for (n, title, limit) in CRITERIA {
        let checks = by_criterion.get(&n).map(Vec::as_slice).unwrap_or(&[]);
        let total: f64 = checks.iter().map(|(_, c)| c.seconds).sum();
        let within_limit = match (n, limit) {
            (3, Some(l)) => {
                let mut per_domain: BTreeMap<&str, f64> = BTreeMap::new();
                for (d, c) in checks {
                    *per_domain.entry(d).or_default() += c.seconds;
                }
                per_domain.values().all(|&t| t < l)
            }
            (_, Some(l)) => total < l,
            (_, None) => true,
        };
        let pass = !checks.is_empty() && checks.iter().all(|(_, c)| c.pass) && within_limit;
        let limit_text = limit.map(|l| format!(" / limit {l:.0}s")).unwrap_or_default();
        println!(
            "criterion {n:>2}: {} {title} ({total:.2}s{limit_text})",
            if pass { "PASS" } else { "FAIL" }
        );
        for (d, c) in checks {
            println!(
                "      {} {d} / {}: {} ({:.2}s)",
                if c.pass { "ok  " } else { "FAIL" },
                c.name,
                c.detail,
                c.seconds
            );
        }
        if !pass {
            failed.push(n);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
