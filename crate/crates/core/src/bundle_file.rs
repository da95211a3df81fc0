//! JSON bundle files.
//!
//! ```json
//! {
//!   "name": "uniformizing",
//!   "base_dim": 1,
//!   "rank": 2,
//!   "domain": [{"half_plane": {"im_min": 0.05, "sample_re": [-2, 2], "sample_im": [0.2, 5]}}],
//!   "theta": [[["0", "0.5"], ["0", "0"]]],
//!   "h": [["((t1 - conj(t1))/(2*i))^-1", "0"], ["0", "(t1 - conj(t1))/(2*i)"]],
//!   "samples": {"count": 100, "seed": 0}
//! }
//! ```
//!
//! `theta[l][a][b]` is row `a`, column `b` of the component along `t(l+1)`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::ChartDomain;
use crate::error::{Error, Result};
use crate::expr::ScalarExpr;
use crate::higgs::{validate, HiggsBundleChart, SampleSpec};
use crate::jet::ExprMatrix;
use crate::parse::parse_expr;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleFile {
    pub name: String,
    pub base_dim: usize,
    pub rank: usize,
    pub domain: ChartDomain,
    pub theta: Vec<Vec<Vec<String>>>,
    pub h: Vec<Vec<String>>,
    #[serde(default)]
    pub samples: SampleSpec,
}

impl BundleFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("bundle files always serialize");
        s.push('\n');
        s
    }

    /// Parses every expression and checks shapes, reporting all problems at
    /// once. Mathematical validity is not checked here.
    pub fn build(&self) -> Result<HiggsBundleChart> {
        let mut problems = Vec::new();
        let (m, r) = (self.base_dim, self.rank);
        if self.domain.dim() != m {
            problems.push(format!(
                "domain has {} coordinates, base_dim is {m}",
                self.domain.dim()
            ));
        }
        if self.theta.len() != m {
            problems.push(format!(
                "theta has {} components, base_dim is {m}",
                self.theta.len()
            ));
        }
        let domain = match ChartDomain::new(self.domain.coords.clone()) {
            Ok(d) => Some(d),
            Err(Error::Validation(v)) => {
                problems.extend(v);
                None
            }
            Err(e) => return Err(e),
        };
        let theta: Vec<Option<ExprMatrix>> = self
            .theta
            .iter()
            .enumerate()
            .map(|(l, rows)| parse_matrix(rows, r, &format!("theta[{l}]"), &mut problems))
            .collect();
        let h = parse_matrix(&self.h, r, "h", &mut problems);
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        let theta = theta.into_iter().map(|t| t.expect("no problems")).collect();
        HiggsBundleChart::new(
            self.name.clone(),
            domain.expect("no problems"),
            theta,
            h.expect("no problems"),
            self.samples,
        )
        .map_err(|e| match e {
            Error::Shape(s) => Error::Validation(vec![s]),
            e => e,
        })
    }

    pub fn from_bundle(bundle: &HiggsBundleChart) -> Self {
        BundleFile {
            name: bundle.name.clone(),
            base_dim: bundle.base_dim(),
            rank: bundle.rank(),
            domain: bundle.domain.clone(),
            theta: bundle.theta.iter().map(ExprMatrix::to_strings).collect(),
            h: bundle.h.to_strings(),
            samples: bundle.samples,
        }
    }
}

fn parse_matrix(
    rows: &[Vec<String>],
    r: usize,
    label: &str,
    problems: &mut Vec<String>,
) -> Option<ExprMatrix> {
    let start = problems.len();
    if rows.len() != r || rows.iter().any(|row| row.len() != r) {
        problems.push(format!("{label} must be {r}x{r}"));
        return None;
    }
    let mut entries: Vec<ScalarExpr> = Vec::with_capacity(r * r);
    for (a, row) in rows.iter().enumerate() {
        for (b, text) in row.iter().enumerate() {
            match parse_expr(text) {
                Ok(e) => entries.push(e),
                Err(err) => problems.push(format!("{label}[{a}][{b}] = {text:?}: {err}")),
            }
        }
    }
    if problems.len() > start {
        return None;
    }
    ExprMatrix::new(r, r, entries).ok()
}

/// Reads, builds and validates a bundle file. Every problem found is
/// reported in one [`Error::Validation`].
pub fn load_bundle(path: impl AsRef<Path>) -> Result<HiggsBundleChart> {
    let text = std::fs::read_to_string(path)?;
    let bundle = BundleFile::from_json(&text)?.build()?;
    let report = validate(&bundle);
    if !report.is_valid() {
        return Err(Error::Validation(report.violations));
    }
    Ok(bundle)
}

pub fn save_bundle(file: &BundleFile, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, file.to_json())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "name": "shift",
        "base_dim": 1,
        "rank": 2,
        "domain": [{"box": {"re": [-1, 1], "im": [0.5, 2]}}],
        "theta": [[["0", "1"], ["0", "0"]]],
        "h": [["1", "0"], ["0", "1"]]
    }"#;

    #[test]
    fn minimal_file_builds_with_default_samples() {
        let f = BundleFile::from_json(SAMPLE).unwrap();
        let b = f.build().unwrap();
        assert_eq!((b.base_dim(), b.rank()), (1, 2));
        assert_eq!(b.samples, SampleSpec::default());
    }

    #[test]
    fn all_parse_errors_are_reported() {
        let text = SAMPLE
            .replace(r#"[[["0", "1"]"#, r#"[[["t1 ^", "1"]"#)
            .replace(r#"["1", "0"], ["0", "1"]"#, r#"["1", "0"], ["0", "(t1"]"#);
        let err = BundleFile::from_json(&text).unwrap().build().unwrap_err();
        match err {
            Error::Validation(v) => {
                assert_eq!(v.len(), 2, "{v:?}");
                assert!(v[0].starts_with("theta[0][0][0]"));
                assert!(v[0].contains("1:5"));
                assert!(v[1].starts_with("h[1][1]"));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn shape_problems_are_reported() {
        let text = SAMPLE.replace(r#""rank": 2"#, r#""rank": 3"#);
        let err = BundleFile::from_json(&text).unwrap().build().unwrap_err();
        assert!(matches!(err, Error::Validation(v) if v.len() == 2));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = SAMPLE.replace(r#""rank": 2,"#, r#""rank": 2, "extra": 1,"#);
        assert!(matches!(BundleFile::from_json(&text), Err(Error::Json(_))));
    }

    #[test]
    fn json_round_trip() {
        let f = BundleFile::from_json(SAMPLE).unwrap();
        assert_eq!(BundleFile::from_json(&f.to_json()).unwrap(), f);
    }
}
