//! Certify every built-in fixture and print the verdicts.

use higgs_hodge::certify::{certify, CertifyOptions, Status};
use higgs_hodge::fixtures::catalog;

fn main() {
    let options = CertifyOptions {
        samples: Some(30),
        ..CertifyOptions::default()
    };
    for f in catalog() {
        let report = certify(&f.bundle(), &options);
        let failed: Vec<_> = report
            .checks
            .iter()
            .filter(|c| c.status == Status::Fail)
            .map(|c| c.name.as_str())
            .collect();
        println!(
            "{:22} {:4}  failed: {}",
            f.name,
            if report.passed() { "pass" } else { "fail" },
            if failed.is_empty() {
                "-".to_string()
            } else {
                failed.join(", ")
            }
        );
    }

    // Full text report for one fixture.
    let sym2 = catalog().into_iter().find(|f| f.name == "sym2").unwrap();
    print!("\n{}", certify(&sym2.bundle(), &options).to_text());
}
