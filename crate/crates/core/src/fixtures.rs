//! Built-in bundles with known answers.

use serde::Serialize;

use crate::bundle_file::BundleFile;
use crate::domain::{ChartDomain, CoordinateRange};
use crate::error::{Error, Result};
use crate::higgs::{HiggsBundleChart, SampleSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expected {
    pub base_dim: usize,
    pub rank: usize,
    pub flat: bool,
    pub admissible: bool,
    pub kahler: bool,
    /// Smallest `k` with all `(k+1)`-fold products of the field vanishing.
    pub nilpotency: usize,
    /// Holomorphic sectional curvature along `d/dt1`, where it is constant.
    pub hsc: Option<f64>,
    /// `-1 / (k^2 r)` for admissible fixtures.
    pub hsc_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub name: &'static str,
    pub summary: &'static str,
    pub expected: Expected,
    pub file: BundleFile,
}

impl Fixture {
    pub fn bundle(&self) -> HiggsBundleChart {
        self.file
            .build()
            .expect("built-in fixtures are well formed")
    }
}

/// `Im t_n` written as an expression.
fn im(n: usize) -> String {
    format!("((t{n} - conj(t{n}))/(2*i))")
}

fn upper_half_plane() -> CoordinateRange {
    CoordinateRange::HalfPlane {
        im_min: 0.05,
        sample_re: [-2.0, 2.0],
        sample_im: [0.2, 5.0],
    }
}

fn unit_box() -> CoordinateRange {
    CoordinateRange::Box {
        re: [-1.0, 1.0],
        im: [-1.0, 1.0],
    }
}

fn strings(rows: &[&[&str]]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|row| row.iter().map(|s| s.to_string()).collect())
        .collect()
}

/// `r x r` matrix of zeros with the given entries filled in.
fn sparse(r: usize, entries: &[(usize, usize, String)]) -> Vec<Vec<String>> {
    let mut m = vec![vec!["0".to_string(); r]; r];
    for (a, b, s) in entries {
        m[*a][*b] = s.clone();
    }
    m
}

fn diagonal(entries: &[String]) -> Vec<Vec<String>> {
    let r = entries.len();
    sparse(
        r,
        &entries
            .iter()
            .enumerate()
            .map(|(a, s)| (a, a, s.clone()))
            .collect::<Vec<_>>(),
    )
}

fn file(
    name: &str,
    domain: Vec<CoordinateRange>,
    theta: Vec<Vec<Vec<String>>>,
    h: Vec<Vec<String>>,
) -> BundleFile {
    BundleFile {
        name: name.to_string(),
        base_dim: domain.len(),
        rank: h.len(),
        domain: ChartDomain { coords: domain },
        theta,
        h,
        samples: SampleSpec::default(),
    }
}

fn zero() -> Fixture {
    Fixture {
        name: "zero",
        summary: "vanishing Higgs field on a flat rank-2 bundle",
        expected: Expected {
            base_dim: 1,
            rank: 2,
            flat: true,
            admissible: false,
            kahler: true,
            nilpotency: 0,
            hsc: None,
            hsc_bound: None,
        },
        file: file(
            "zero",
            vec![unit_box()],
            vec![strings(&[&["0", "0"], &["0", "0"]])],
            strings(&[&["1", "0"], &["0", "1"]]),
        ),
    }
}

fn uniformizing() -> Fixture {
    let y = im(1);
    Fixture {
        name: "uniformizing",
        summary: "uniformizing system of Hodge bundles on the upper half-plane",
        expected: Expected {
            base_dim: 1,
            rank: 2,
            flat: true,
            admissible: true,
            kahler: true,
            nilpotency: 1,
            hsc: Some(-2.0),
            hsc_bound: Some(-0.5),
        },
        file: file(
            "uniformizing",
            vec![upper_half_plane()],
            vec![sparse(2, &[(0, 1, "0.5".into())])],
            diagonal(&[format!("{y}^-1"), y]),
        ),
    }
}

fn sym2() -> Fixture {
    let y = im(1);
    let s = std::f64::consts::FRAC_1_SQRT_2.to_string();
    Fixture {
        name: "sym2",
        summary: "second symmetric power of the uniformizing bundle",
        expected: Expected {
            base_dim: 1,
            rank: 3,
            flat: true,
            admissible: true,
            kahler: true,
            nilpotency: 2,
            hsc: Some(-0.5),
            hsc_bound: Some(-1.0 / 12.0),
        },
        file: file(
            "sym2",
            vec![upper_half_plane()],
            vec![sparse(3, &[(0, 1, s.clone()), (1, 2, s)])],
            diagonal(&[format!("{y}^-2"), "1".into(), format!("{y}^2")]),
        ),
    }
}

fn product() -> Fixture {
    let (y1, y2) = (im(1), im(2));
    Fixture {
        name: "product",
        summary: "uniformizing bundles on a product of two half-planes",
        expected: Expected {
            base_dim: 2,
            rank: 4,
            flat: true,
            admissible: true,
            kahler: true,
            nilpotency: 1,
            hsc: Some(-2.0),
            hsc_bound: Some(-0.25),
        },
        file: file(
            "product",
            vec![upper_half_plane(), upper_half_plane()],
            vec![
                sparse(4, &[(0, 1, "0.5".into())]),
                sparse(4, &[(2, 3, "0.5".into())]),
            ],
            diagonal(&[format!("{y1}^-1"), y1, format!("{y2}^-1"), y2]),
        ),
    }
}

fn nonflat_control() -> Fixture {
    Fixture {
        name: "nonflat-control",
        summary: "shift block with the standard metric; the pair is not flat",
        expected: Expected {
            base_dim: 1,
            rank: 2,
            flat: false,
            admissible: true,
            kahler: true,
            nilpotency: 1,
            hsc: None,
            hsc_bound: None,
        },
        file: file(
            "nonflat-control",
            vec![unit_box()],
            vec![sparse(2, &[(0, 1, "1".into())])],
            strings(&[&["1", "0"], &["0", "1"]]),
        ),
    }
}

fn nonadmissible_control() -> Fixture {
    let shift = sparse(2, &[(0, 1, "1".into())]);
    Fixture {
        name: "nonadmissible-control",
        summary: "equal components along both coordinates; the Hodge form is degenerate",
        expected: Expected {
            base_dim: 2,
            rank: 2,
            flat: false,
            admissible: false,
            kahler: true,
            nilpotency: 1,
            hsc: None,
            hsc_bound: None,
        },
        file: file(
            "nonadmissible-control",
            vec![unit_box(), unit_box()],
            vec![shift.clone(), shift],
            strings(&[&["1", "0"], &["0", "1"]]),
        ),
    }
}

fn nonkahler_control() -> Fixture {
    Fixture {
        name: "nonkahler-control",
        summary: "admissible but not flat; the Hodge form is not closed",
        expected: Expected {
            base_dim: 2,
            rank: 3,
            flat: false,
            admissible: true,
            kahler: false,
            nilpotency: 1,
            hsc: None,
            hsc_bound: None,
        },
        file: file(
            "nonkahler-control",
            vec![
                unit_box(),
                CoordinateRange::Box {
                    re: [0.5, 1.5],
                    im: [-0.5, 0.5],
                },
            ],
            vec![
                sparse(3, &[(0, 1, "1".into())]),
                sparse(3, &[(0, 2, "1".into())]),
            ],
            diagonal(&["1".into(), "1 + t2*conj(t2)".into(), "1".into()]),
        ),
    }
}

pub fn catalog() -> Vec<Fixture> {
    vec![
        zero(),
        uniformizing(),
        sym2(),
        product(),
        nonflat_control(),
        nonadmissible_control(),
        nonkahler_control(),
    ]
}

pub fn names() -> Vec<&'static str> {
    catalog().iter().map(|f| f.name).collect()
}

pub fn fixture(name: &str) -> Result<Fixture> {
    catalog()
        .into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))
}

/// Writes the fixture's bundle file.
pub fn emit(name: &str, path: impl AsRef<std::path::Path>) -> Result<()> {
    crate::bundle_file::save_bundle(&fixture(name)?.file, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::higgs::{nilpotency_order, validate};

    #[test]
    fn every_fixture_is_valid_with_declared_shape() {
        for f in catalog() {
            let b = f.bundle();
            assert_eq!(b.base_dim(), f.expected.base_dim, "{}", f.name);
            assert_eq!(b.rank(), f.expected.rank, "{}", f.name);
            let report = validate(&b);
            assert!(report.is_valid(), "{}: {:?}", f.name, report.violations);
            let k = nilpotency_order(&b, &b.sample_points()).unwrap();
            assert_eq!(k, Some(f.expected.nilpotency), "{}", f.name);
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(fixture("nope"), Err(Error::UnknownFixture(_))));
    }

    #[test]
    fn names_are_unique() {
        let mut n = names();
        n.sort();
        n.dedup();
        assert_eq!(n.len(), catalog().len());
    }
}
