//! Build a bundle from JSON, validate it and certify it.

use higgs_hodge::bundle_file::BundleFile;
use higgs_hodge::certify::{certify, CertifyOptions};

// The uniformizing bundle with the fiber metric scaled by 3, which leaves the
// Hodge metric unchanged.
const SCALED: &str = r#"{
  "name": "scaled-uniformizing",
  "base_dim": 1,
  "rank": 2,
  "domain": [{ "half_plane": { "im_min": 0.05, "sample_re": [-2, 2], "sample_im": [0.2, 5] } }],
  "theta": [[["0", "0.5"], ["0", "0"]]],
  "h": [["3*((t1 - conj(t1))/(2i))^-1", "0"], ["0", "3*((t1 - conj(t1))/(2i))"]],
  "samples": { "count": 40, "seed": 9 }
}"#;

fn main() -> Result<(), higgs_hodge::error::Error> {
    let bundle = BundleFile::from_json(SCALED)?.build()?;
    let report = certify(&bundle, &CertifyOptions::default());
    print!("{}", report.to_text());

    // A field that depends on conj(t1) is rejected with the offending entry.
    let broken = SCALED.replace(r#""0.5""#, r#""conj(t1)""#);
    let b = BundleFile::from_json(&broken)?.build()?;
    let problems = higgs_hodge::higgs::validate(&b);
    println!("\nbroken variant valid: {}", problems.is_valid());
    for v in &problems.violations {
        println!("  {v}");
    }
    Ok(())
}
