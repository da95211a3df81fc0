//! Chart domains and reproducible sampling of points in them.

use std::ops::Deref;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point `t = (t1, ..., tm)` of the base chart.
#[derive(Debug, Clone, PartialEq)]
pub struct BasePoint(pub Vec<Complex64>);

impl BasePoint {
    pub fn new(coords: Vec<Complex64>) -> Self {
        BasePoint(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl Deref for BasePoint {
    type Target = [Complex64];
    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

impl From<Vec<Complex64>> for BasePoint {
    fn from(v: Vec<Complex64>) -> Self {
        BasePoint(v)
    }
}

/// Constraint on a single coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordinateRange {
    /// Closed box `re[0] <= Re t <= re[1]`, `im[0] <= Im t <= im[1]`.
    Box { re: [f64; 2], im: [f64; 2] },
    /// `Im t >= im_min > 0`; samples are drawn from the given window inside it.
    HalfPlane {
        im_min: f64,
        sample_re: [f64; 2],
        sample_im: [f64; 2],
    },
}

impl CoordinateRange {
    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            CoordinateRange::Box { re, im } => {
                re[0] <= z.re && z.re <= re[1] && im[0] <= z.im && z.im <= im[1]
            }
            CoordinateRange::HalfPlane { im_min, .. } => z.im >= *im_min && z.re.is_finite(),
        }
    }

    fn window(&self) -> ([f64; 2], [f64; 2]) {
        match self {
            CoordinateRange::Box { re, im } => (*re, *im),
            CoordinateRange::HalfPlane {
                sample_re,
                sample_im,
                ..
            } => (*sample_re, *sample_im),
        }
    }

    fn check(&self) -> std::result::Result<(), String> {
        let ordered = |r: &[f64; 2]| r[0].is_finite() && r[1].is_finite() && r[0] <= r[1];
        match self {
            CoordinateRange::Box { re, im } => {
                if ordered(re) && ordered(im) {
                    Ok(())
                } else {
                    Err("box bounds must be finite and ordered".into())
                }
            }
            CoordinateRange::HalfPlane {
                im_min,
                sample_re,
                sample_im,
            } => {
                if !(*im_min > 0.0) {
                    Err("half-plane bound must be positive".into())
                } else if !ordered(sample_re) || !ordered(sample_im) {
                    Err("half-plane sampling window must be finite and ordered".into())
                } else if sample_im[0] < *im_min {
                    Err("half-plane sampling window leaves the half-plane".into())
                } else {
                    Ok(())
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChartDomain {
    pub coords: Vec<CoordinateRange>,
}

impl ChartDomain {
    pub fn new(coords: Vec<CoordinateRange>) -> Result<Self> {
        for (j, c) in coords.iter().enumerate() {
            c.check().map_err(|reason| {
                Error::Validation(vec![format!("domain of t{}: {reason}", j + 1)])
            })?;
        }
        Ok(ChartDomain { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn check_point(&self, t: &[Complex64]) -> Result<()> {
        if t.len() != self.dim() {
            return Err(Error::Domain {
                point: format_point(t),
                reason: format!("expected {} coordinates", self.dim()),
            });
        }
        for (j, (range, z)) in self.coords.iter().zip(t).enumerate() {
            if !range.contains(*z) {
                return Err(Error::Domain {
                    point: format_point(t),
                    reason: format!("t{} violates {:?}", j + 1, range),
                });
            }
        }
        Ok(())
    }

    /// `count` points of a randomly shifted Rd low-discrepancy sequence over
    /// the sampling window. The shift is drawn from `seed`, so the output is
    /// a pure function of `(self, count, seed)`.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<BasePoint> {
        let dims = 2 * self.dim();
        let alpha = rd_generator(dims);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift: Vec<f64> = (0..dims).map(|_| rng.gen::<f64>()).collect();
        (0..count)
            .map(|n| {
                let coords = self
                    .coords
                    .iter()
                    .enumerate()
                    .map(|(j, range)| {
                        let (re, im) = range.window();
                        let u = (shift[2 * j] + (n as f64 + 1.0) * alpha[2 * j]).fract();
                        let v = (shift[2 * j + 1] + (n as f64 + 1.0) * alpha[2 * j + 1]).fract();
                        Complex64::new(lerp(re, u), lerp(im, v))
                    })
                    .collect();
                BasePoint(coords)
            })
            .collect()
    }
}

fn lerp(r: [f64; 2], u: f64) -> f64 {
    r[0] + (r[1] - r[0]) * u
}

/// Generator of the Rd sequence: `alpha_i = phi^-(i+1)` with `phi` the
/// positive root of `x^(d+1) = x + 1`.
fn rd_generator(dims: usize) -> Vec<f64> {
    let d = dims.max(1) as i32;
    let mut phi = 2.0f64;
    for _ in 0..64 {
        let f = phi.powi(d + 1) - phi - 1.0;
        let df = f64::from(d + 1) * phi.powi(d) - 1.0;
        phi -= f / df;
    }
    (0..dims)
        .map(|i| phi.powi(-(i as i32 + 1)).fract())
        .collect()
}

pub fn format_point(t: &[Complex64]) -> String {
    let parts: Vec<String> = t.iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect();
    format!("({})", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn upper_box() -> ChartDomain {
        ChartDomain::new(vec![CoordinateRange::Box {
            re: [-2.0, 2.0],
            im: [0.2, 5.0],
        }])
        .unwrap()
    }

    #[test]
    fn samples_stay_inside_and_are_reproducible() {
        let d = upper_box();
        let a = d.sample(200, 11);
        let b = d.sample(200, 11);
        assert_eq!(a, b);
        for p in &a {
            d.check_point(p).unwrap();
        }
        assert_ne!(a, d.sample(200, 12));
    }

    #[test]
    fn golden_ratio_in_one_dimension() {
        let a = rd_generator(1);
        assert!((a[0] - 0.618_033_988_749_894_8).abs() < 1e-15);
    }

    #[test]
    fn samples_spread_over_the_window() {
        let d = upper_box();
        let pts = d.sample(100, 3);
        let below = pts.iter().filter(|p| p[0].im < 2.6).count();
        assert!((40..=60).contains(&below));
    }

    #[test]
    fn out_of_domain_is_rejected() {
        let d = upper_box();
        assert!(d.check_point(&[Complex64::new(0.0, 0.1)]).is_err());
        assert!(d.check_point(&[]).is_err());
        let hp = ChartDomain::new(vec![CoordinateRange::HalfPlane {
            im_min: 0.5,
            sample_re: [0.0, 1.0],
            sample_im: [1.0, 2.0],
        }])
        .unwrap();
        hp.check_point(&[Complex64::new(1e6, 0.5)]).unwrap();
        assert!(hp.check_point(&[Complex64::new(0.0, 0.49)]).is_err());
    }

    #[test]
    fn malformed_ranges_are_rejected() {
        assert!(ChartDomain::new(vec![CoordinateRange::HalfPlane {
            im_min: 0.0,
            sample_re: [0.0, 1.0],
            sample_im: [1.0, 2.0],
        }])
        .is_err());
        assert!(ChartDomain::new(vec![CoordinateRange::Box {
            re: [1.0, 0.0],
            im: [0.0, 1.0],
        }])
        .is_err());
    }
}
