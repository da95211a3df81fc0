//! Finite-difference oracle shared by the integration tests.
#![allow(dead_code)]

use higgs_hodge::domain::BasePoint;
use higgs_hodge::higgs::HiggsBundleChart;
use num_complex::Complex64;

pub const STEP: f64 = 1e-5;

/// Fourth-order central difference of `f` along the real direction `dir`
/// (a complex unit, so `i` differentiates along the imaginary axis).
pub fn central<F>(f: &F, t: &[Complex64], j: usize, dir: Complex64) -> Complex64
where
    F: Fn(&[Complex64]) -> Complex64,
{
    let shifted = |k: f64| {
        let mut p = t.to_vec();
        p[j] += dir * (k * STEP);
        f(&p)
    };
    (-shifted(2.0) + shifted(1.0) * 8.0 - shifted(-1.0) * 8.0 + shifted(-2.0)) / (12.0 * STEP)
}

/// `(d/dx - i d/dy)/2` and `(d/dx + i d/dy)/2` by finite differences.
pub fn wirtinger_fd<F>(f: &F, t: &[Complex64], j: usize) -> (Complex64, Complex64)
where
    F: Fn(&[Complex64]) -> Complex64,
{
    let dx = central(f, t, j, Complex64::new(1.0, 0.0));
    let dy = central(f, t, j, Complex64::new(0.0, 1.0));
    let i = Complex64::new(0.0, 1.0);
    ((dx - i * dy) * 0.5, (dx + i * dy) * 0.5)
}

pub fn rel_close(a: Complex64, b: Complex64, rel: f64) -> bool {
    (a - b).norm() <= rel * a.norm().max(b.norm()).max(1.0)
}

/// Sample points whose finite-difference stencils stay inside the domain.
pub fn interior_samples(bundle: &HiggsBundleChart, want: usize) -> Vec<BasePoint> {
    let margin = 3.0 * STEP;
    let mut out = Vec::new();
    let mut count = want;
    while out.len() < want {
        count *= 2;
        out = bundle
            .domain
            .sample(count, 0)
            .into_iter()
            .filter(|t| {
                (0..t.len()).all(|j| {
                    [(margin, 0.0), (-margin, 0.0), (0.0, margin), (0.0, -margin)]
                        .iter()
                        .all(|&(x, y)| {
                            let mut p = t.0.clone();
                            p[j] += Complex64::new(x, y);
                            bundle.domain.check_point(&p).is_ok()
                        })
                })
            })
            .take(want)
            .collect();
    }
    out
}
