//! The Hodge metric `G_{j kbar} = (theta_j, theta_k)` on the base and its
//! curvature.
//!
//! Curvature pairings `R[j][k][l][p] = (Theta_{j kbar} d_l, d_p)` are computed
//! by three independent routes:
//!
//! * `direct`: the Chern curvature of `G` itself, from exact derivatives of `G`;
//! * `subbundle`: the tangent bundle viewed as the image of `v -> theta_v` in
//!   `End(H)`, with curvature `([Theta^h_{j kbar}, theta_v], theta_w)` minus the
//!   second fundamental form term `(P(D_j theta_v), P(D_k theta_w))`, where `P`
//!   projects onto the orthogonal complement of the image;
//! * `flat`: the same with the first term rewritten through the flatness
//!   identity as `-([theta_k*, theta_v], [theta_j*, theta_w])`.
//!
//! All routes share the pairing `(u, v)_H = sum G_{pq} u^p conj(v^q)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::higgs::{flatness_at, BundlePoint, HiggsBundleChart};
use crate::jet::MatJet;
use crate::linalg::{
    commutator, end_inner, hermitian_condition, CMat, ComplementProjector, Endo,
    GRAM_CONDITION_LIMIT,
};

/// Absolute tolerance for residuals that should vanish.
pub const TOL_ABS: f64 = 1e-9;
/// Relative tolerance for cross-route agreement.
pub const TOL_REL: f64 = 1e-6;
/// Slack allowed above zero in sign checks.
pub const SIGN_SLACK: f64 = 1e-10;
/// Slack allowed above the sectional curvature bound.
pub const HSC_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct HodgeMetricSample {
    pub g: CMat,
}

impl HodgeMetricSample {
    /// `(u, v)_H = sum G_{pq} u^p conj(v^q)`.
    pub fn pair(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        let m = self.g.nrows();
        let mut s = Complex64::new(0.0, 0.0);
        for p in 0..m {
            for q in 0..m {
                s += self.g[(p, q)] * u[p] * v[q].conj();
            }
        }
        s
    }
}

pub fn hodge_metric(bundle: &HiggsBundleChart, t: &[Complex64]) -> Result<HodgeMetricSample> {
    Ok(hodge_metric_at(&bundle.at(t)?))
}

pub fn hodge_metric_at(p: &BundlePoint) -> HodgeMetricSample {
    let m = p.base_dim();
    let g = CMat::from_fn(m, m, |j, k| (&p.theta[j] * &p.theta_adj[k]).trace());
    HodgeMetricSample {
        g: (&g + g.adjoint()).scale(0.5),
    }
}

/// Jet of the Hodge metric, `G_{jk} = Tr(theta_j h^-1 theta_k^H h)`, with exact
/// first and mixed second derivatives.
pub fn hodge_metric_jet(bundle: &HiggsBundleChart, t: &[Complex64]) -> Result<MatJet> {
    bundle.domain.check_point(t)?;
    let m = bundle.base_dim();
    let h = bundle.h_jet(t)?;
    let h_inv = h.inverse()?;
    let theta = bundle.theta_jets(t)?;
    let adj: Vec<MatJet> = theta
        .iter()
        .map(|th| h_inv.mul(&th.adjoint()).mul(&h))
        .collect();
    let mut scalars = Vec::with_capacity(m * m);
    for th in &theta {
        for a in &adj {
            scalars.push(th.mul(a).trace());
        }
    }
    Ok(MatJet::from_scalars(m, m, &scalars, m))
}

/// `max_{j,k,l} |d_l G_{j kbar} - d_j G_{l kbar}|`, the coefficient size of
/// `d omega` for the fundamental form of the Hodge (semi-)metric.
pub fn kahler_residual(bundle: &HiggsBundleChart, t: &[Complex64]) -> Result<f64> {
    let g = hodge_metric_jet(bundle, t)?;
    Ok(kahler_residual_of(&g))
}

pub fn kahler_residual_of(g: &MatJet) -> f64 {
    let m = g.base_dim();
    let mut worst = 0.0f64;
    for j in 0..m {
        for l in j + 1..m {
            for k in 0..m {
                worst = worst.max((g.d[l][(j, k)] - g.d[j][(l, k)]).norm());
            }
        }
    }
    worst
}

/// Curvature pairings of the base at one point, plus the metric there.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseCurvatureSample {
    pub metric: HodgeMetricSample,
    m: usize,
    data: Vec<Complex64>,
}

impl BaseCurvatureSample {
    fn from_fn(
        metric: HodgeMetricSample,
        mut f: impl FnMut(usize, usize, usize, usize) -> Complex64,
    ) -> Self {
        let m = metric.g.nrows();
        let mut data = Vec::with_capacity(m.pow(4));
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    for p in 0..m {
                        data.push(f(j, k, l, p));
                    }
                }
            }
        }
        BaseCurvatureSample { metric, m, data }
    }

    pub fn base_dim(&self) -> usize {
        self.m
    }

    /// `(Theta_{j kbar} d_l, d_p)_H`.
    pub fn get(&self, j: usize, k: usize, l: usize, p: usize) -> Complex64 {
        let m = self.m;
        self.data[((j * m + k) * m + l) * m + p]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.data
    }

    /// `sum_{j,k} (Theta_{j kbar} v, v) xi^j conj(xi^k)`, complex-valued.
    pub fn bisectional(&self, xi: &[Complex64], v: &[Complex64]) -> Complex64 {
        let m = self.m;
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..m {
            for k in 0..m {
                let w = xi[j] * xi[k].conj();
                if w == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for l in 0..m {
                    for p in 0..m {
                        s += self.get(j, k, l, p) * v[l] * v[p].conj() * w;
                    }
                }
            }
        }
        s
    }

    /// Largest violation of `R[j][k][l][p] = conj(R[k][j][p][l])`.
    pub fn hermitian_defect(&self) -> f64 {
        let m = self.m;
        let mut worst = 0.0f64;
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    for p in 0..m {
                        worst =
                            worst.max((self.get(j, k, l, p) - self.get(k, j, p, l).conj()).norm());
                    }
                }
            }
        }
        worst
    }

    /// Largest entrywise difference and the larger of the two largest entries.
    pub fn compare(&self, other: &BaseCurvatureSample) -> Agreement {
        let diff = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let scale = self
            .data
            .iter()
            .chain(&other.data)
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        Agreement { diff, scale }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Agreement {
    pub diff: f64,
    pub scale: f64,
}

impl Agreement {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.diff / self.scale
        } else {
            self.diff
        }
    }

    /// Relative agreement, or absolute agreement for tensors near zero.
    pub fn within(&self, tol_rel: f64, tol_abs: f64) -> bool {
        self.diff <= tol_abs.max(tol_rel * self.scale)
    }
}

/// Chern curvature of the metric `G` from exact derivatives of `G`.
pub fn base_curvature_direct(
    bundle: &HiggsBundleChart,
    t: &[Complex64],
) -> Result<BaseCurvatureSample> {
    let jet = hodge_metric_jet(bundle, t)?;
    curvature_from_metric_jet(&jet)
}

/// Curvature pairings of the Chern connection of a Hermitian metric given
/// by its jet, with `G_{pq} = (d_p, d_q)`.
pub fn curvature_from_metric_jet(jet: &MatJet) -> Result<BaseCurvatureSample> {
    // In column convention the metric matrix is M = G^T, (u, v) = v^H M u,
    // Theta_{j kbar} = -dbar_k(M^-1 d_j M), and the pairing (Theta e_l, e_p)
    // is (M Theta)[p][l] = (dbar_k M) M^-1 (d_j M) - d_j dbar_k M.
    let m = jet.base_dim();
    let g = (&jet.val + jet.val.adjoint()).scale(0.5);
    let condition = hermitian_condition(&g);
    if condition > GRAM_CONDITION_LIMIT {
        return Err(Error::DegenerateGram { condition });
    }
    let mt = g.transpose();
    let mt_inv = mt.clone().try_inverse().ok_or(Error::SingularMetric)?;
    let d: Vec<CMat> = jet.d.iter().map(|x| x.transpose()).collect();
    let dbar: Vec<CMat> = jet.dbar.iter().map(|x| x.transpose()).collect();
    let mut blocks = Vec::with_capacity(m * m);
    for j in 0..m {
        for k in 0..m {
            blocks.push(&dbar[k] * &mt_inv * &d[j] - jet.dd[j][k].transpose());
        }
    }
    let metric = HodgeMetricSample { g };
    Ok(BaseCurvatureSample::from_fn(metric, |j, k, l, p| {
        blocks[j * m + k][(p, l)]
    }))
}

/// Data shared by the subbundle and flat routes at one point.
struct SubbundleData {
    metric: HodgeMetricSample,
    /// `second[j][l] = P(D_j theta_l)`.
    second: Vec<Vec<Endo>>,
}

fn subbundle_data(p: &BundlePoint) -> Result<SubbundleData> {
    let m = p.base_dim();
    let projector = ComplementProjector::new(&p.theta, &p.h)?;
    let second = (0..m)
        .map(|j| {
            (0..m)
                .map(|l| projector.apply(&p.end_derivative_of_theta(j, l)))
                .collect()
        })
        .collect();
    Ok(SubbundleData {
        metric: hodge_metric_at(p),
        second,
    })
}

pub fn base_curvature_subbundle(
    bundle: &HiggsBundleChart,
    t: &[Complex64],
) -> Result<BaseCurvatureSample> {
    subbundle_curvature_at(&bundle.at(t)?)
}

pub fn subbundle_curvature_at(p: &BundlePoint) -> Result<BaseCurvatureSample> {
    let data = subbundle_data(p)?;
    let m = p.base_dim();
    // [Theta^h_{j kbar}, theta_l], indexed [j][k][l]
    let ambient: Vec<Vec<Vec<Endo>>> = (0..m)
        .map(|j| {
            (0..m)
                .map(|k| {
                    (0..m)
                        .map(|l| commutator(&p.chern[j][k], &p.theta[l]))
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(BaseCurvatureSample::from_fn(
        data.metric.clone(),
        |j, k, l, q| {
            end_inner(&ambient[j][k][l], &p.theta[q], &p.h)
                - end_inner(&data.second[j][l], &data.second[k][q], &p.h)
        },
    ))
}

/// The flat-case formula; refuses bundles whose flatness residual at `t`
/// exceeds `tol`.
pub fn base_curvature_flat_formula(
    bundle: &HiggsBundleChart,
    t: &[Complex64],
) -> Result<BaseCurvatureSample> {
    flat_curvature_at(&bundle.at(t)?, TOL_ABS)
}

pub fn flat_curvature_at(p: &BundlePoint, tol: f64) -> Result<BaseCurvatureSample> {
    let residual = flatness_at(p).total();
    if !(residual <= tol) {
        return Err(Error::NotFlat { residual });
    }
    let data = subbundle_data(p)?;
    let m = p.base_dim();
    // [theta_k*, theta_l], indexed [k][l]
    let brackets: Vec<Vec<Endo>> = (0..m)
        .map(|k| {
            (0..m)
                .map(|l| commutator(&p.theta_adj[k], &p.theta[l]))
                .collect()
        })
        .collect();
    Ok(BaseCurvatureSample::from_fn(
        data.metric.clone(),
        |j, k, l, q| {
            -end_inner(&brackets[k][l], &brackets[j][q], &p.h)
                - end_inner(&data.second[j][l], &data.second[k][q], &p.h)
        },
    ))
}

/// Real part of the bisectional form; see [`BaseCurvatureSample::bisectional`]
/// for the complex value whose imaginary part should vanish.
pub fn bisectional_form(sample: &BaseCurvatureSample, xi: &[Complex64], v: &[Complex64]) -> f64 {
    sample.bisectional(xi, v).re
}

/// `Re sum_{j,k} (Theta_{j kbar} d_k, d_j)_H`.
pub fn scalar_trace_check(sample: &BaseCurvatureSample) -> f64 {
    let m = sample.base_dim();
    let mut s = Complex64::new(0.0, 0.0);
    for j in 0..m {
        for k in 0..m {
            s += sample.get(j, k, k, j);
        }
    }
    s.re
}

/// `(Theta(v, vbar) v, v) / (v, v)^2` from a curvature sample.
pub fn sectional_from_sample(sample: &BaseCurvatureSample, v: &[Complex64]) -> f64 {
    let norm2 = sample.metric.pair(v, v).re;
    sample.bisectional(v, v).re / (norm2 * norm2)
}

pub fn holomorphic_sectional_curvature(
    bundle: &HiggsBundleChart,
    t: &[Complex64],
    v: &[Complex64],
) -> Result<f64> {
    if v.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Err(Error::Shape("zero direction".into()));
    }
    let sample = base_curvature_direct(bundle, t)?;
    Ok(sectional_from_sample(&sample, v))
}

/// The effective upper bound `-(k^2 r)^-1` for a `k`-nilpotent field of rank `r`.
pub fn sectional_bound(k: usize, rank: usize) -> f64 {
    -1.0 / ((k * k * rank) as f64)
}
