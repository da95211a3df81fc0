//! Higgs bundles over a coordinate chart: the Higgs field `theta_j`, the fibre
//! metric `h`, the Chern connection of `h` and the curvature of the Higgs
//! connection `D^h + theta + theta*`.
//!
//! Curvature sign convention: `Theta_{j kbar} = -dbar_k(h^-1 d_j h)`, the
//! coefficient of `dt^j ^ dt^kbar`. The (1,1) part of
//! `(D^h + theta + theta*)^2` is then
//!
//! ```text
//! sum_{j,k} (Theta_{j kbar} + [theta_j, theta_k*]) dt^j ^ dt^kbar
//! ```
//!
//! so flatness reads `Theta_{j kbar} = [theta_k*, theta_j]`. The (2,0) part is
//! `[d^h, theta]`, with coefficients `d_j theta_k + [Gamma_j, theta_k]`
//! antisymmetrized in `j, k`, where `Gamma_j = h^-1 d_j h`.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::{BasePoint, ChartDomain};
use crate::error::{Error, Result};
use crate::expr::ScalarExpr;
use crate::jet::{ExprJet, ExprMatrix, MatJet};
use crate::linalg::{
    commutator, end_gram, frobenius, h_adjoint, hermitian_condition, CMat, Endo, HermitianForm,
    GRAM_CONDITION_LIMIT, NILPOTENT_TOL,
};

/// Tolerance for pointwise commutation and Hermitian symmetry of `h`.
pub const STRUCTURE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub count: usize,
    pub seed: u64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            count: 100,
            seed: 0,
        }
    }
}

#[derive(Debug)]
pub struct HiggsBundleChart {
    pub name: String,
    pub domain: ChartDomain,
    pub theta: Vec<ExprMatrix>,
    pub h: ExprMatrix,
    pub samples: SampleSpec,
    derived: OnceLock<Derived>,
}

#[derive(Debug)]
struct Derived {
    h: ExprJet,
    theta_d: Vec<Vec<ExprMatrix>>,
}

impl Clone for HiggsBundleChart {
    fn clone(&self) -> Self {
        HiggsBundleChart {
            name: self.name.clone(),
            domain: self.domain.clone(),
            theta: self.theta.clone(),
            h: self.h.clone(),
            samples: self.samples,
            derived: OnceLock::new(),
        }
    }
}

impl HiggsBundleChart {
    /// Checks shapes and coordinate references; the mathematical axioms are
    /// checked separately by [`validate`].
    pub fn new(
        name: impl Into<String>,
        domain: ChartDomain,
        theta: Vec<ExprMatrix>,
        h: ExprMatrix,
        samples: SampleSpec,
    ) -> Result<Self> {
        let m = domain.dim();
        let r = h.nrows();
        let mut problems = Vec::new();
        if h.ncols() != r {
            problems.push(format!("h is {}x{}, expected square", r, h.ncols()));
        }
        if theta.len() != m {
            problems.push(format!(
                "{} Higgs field components for base dimension {m}",
                theta.len()
            ));
        }
        for (j, th) in theta.iter().enumerate() {
            if th.nrows() != r || th.ncols() != r {
                problems.push(format!(
                    "theta_{} is {}x{}, expected {r}x{r}",
                    j + 1,
                    th.nrows(),
                    th.ncols()
                ));
            }
        }
        let max_coord = theta
            .iter()
            .filter_map(ExprMatrix::max_coord)
            .chain(h.max_coord())
            .max();
        if let Some(c) = max_coord {
            if c >= m {
                problems.push(format!("t{} referenced but base dimension is {m}", c + 1));
            }
        }
        if !problems.is_empty() {
            return Err(Error::Shape(problems.join("; ")));
        }
        Ok(HiggsBundleChart {
            name: name.into(),
            domain,
            theta,
            h,
            samples,
            derived: OnceLock::new(),
        })
    }

    pub fn base_dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn rank(&self) -> usize {
        self.h.nrows()
    }

    pub fn sample_points(&self) -> Vec<BasePoint> {
        self.domain.sample(self.samples.count, self.samples.seed)
    }

    fn derived(&self) -> &Derived {
        self.derived.get_or_init(|| {
            let m = self.base_dim();
            // Hermitian part (h + h^H)/2 at expression level.
            let sym = self
                .h
                .add(&self.h.adjoint())
                .map(|e| e.mul(&ScalarExpr::real(0.5)));
            Derived {
                h: ExprJet::new(sym, m),
                theta_d: (0..m)
                    .map(|j| self.theta.iter().map(|th| th.d(j)).collect())
                    .collect(),
            }
        })
    }

    /// Everything about the bundle at one point that the curvature
    /// computations need.
    pub fn at(&self, t: &[Complex64]) -> Result<BundlePoint> {
        self.domain.check_point(t)?;
        let m = self.base_dim();
        let der = self.derived();
        let h_jet = der.h.eval(t)?;
        let h = HermitianForm::new(h_jet.val.clone())?;
        let theta = self
            .theta
            .iter()
            .map(|th| th.eval(t))
            .collect::<Result<Vec<_>>>()?;
        let dtheta = der
            .theta_d
            .iter()
            .map(|row| row.iter().map(|e| e.eval(t)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let theta_adj = theta.iter().map(|th| h_adjoint(th, &h)).collect();
        let hinv = h.inverse();
        let gamma: Vec<Endo> = (0..m).map(|j| hinv * &h_jet.d[j]).collect();
        let chern = (0..m)
            .map(|j| {
                (0..m)
                    .map(|k| hinv * &h_jet.dbar[k] * &gamma[j] - hinv * &h_jet.dd[j][k])
                    .collect()
            })
            .collect();
        Ok(BundlePoint {
            t: BasePoint::new(t.to_vec()),
            h,
            h_jet,
            theta,
            dtheta,
            theta_adj,
            gamma,
            chern,
        })
    }

    /// Jet of the fibre metric at `t`.
    pub fn h_jet(&self, t: &[Complex64]) -> Result<MatJet> {
        self.derived().h.eval(t)
    }

    /// Higgs field components as jets (antiholomorphic parts vanish).
    pub fn theta_jets(&self, t: &[Complex64]) -> Result<Vec<MatJet>> {
        let m = self.base_dim();
        let der = self.derived();
        self.theta
            .iter()
            .enumerate()
            .map(|(l, th)| {
                let mut jet = MatJet::constant(th.eval(t)?, m);
                for j in 0..m {
                    jet.d[j] = der.theta_d[j][l].eval(t)?;
                }
                Ok(jet)
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct BundlePoint {
    pub t: BasePoint,
    pub h: HermitianForm,
    pub h_jet: MatJet,
    pub theta: Vec<Endo>,
    /// `dtheta[j][k] = d_j theta_k`.
    pub dtheta: Vec<Vec<Endo>>,
    pub theta_adj: Vec<Endo>,
    /// Chern connection coefficients `Gamma_j = h^-1 d_j h`.
    pub gamma: Vec<Endo>,
    /// `chern[j][k] = Theta^h_{j kbar}`.
    pub chern: Vec<Vec<Endo>>,
}

impl BundlePoint {
    pub fn base_dim(&self) -> usize {
        self.theta.len()
    }

    /// `theta_v = sum_l v^l theta_l`.
    pub fn theta_along(&self, v: &[Complex64]) -> Endo {
        combine(&self.theta, v)
    }

    /// `D^End_j theta_k = d_j theta_k + [Gamma_j, theta_k]`.
    pub fn end_derivative_of_theta(&self, j: usize, k: usize) -> Endo {
        &self.dtheta[j][k] + commutator(&self.gamma[j], &self.theta[k])
    }

    /// (1,1) block of the Higgs curvature: `Theta_{j kbar} - [theta_k*, theta_j]`.
    pub fn curvature_11(&self, j: usize, k: usize) -> Endo {
        &self.chern[j][k] - commutator(&self.theta_adj[k], &self.theta[j])
    }

    /// (2,0) block: `D_j theta_k - D_k theta_j`.
    pub fn curvature_20(&self, j: usize, k: usize) -> Endo {
        self.end_derivative_of_theta(j, k) - self.end_derivative_of_theta(k, j)
    }
}

pub(crate) fn combine(mats: &[Endo], coeffs: &[Complex64]) -> Endo {
    let r = mats.first().map_or(0, |m| m.nrows());
    mats.iter()
        .zip(coeffs)
        .fold(CMat::zeros(r, r), |acc, (m, c)| acc + m * *c)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub samples: usize,
    pub theta_holomorphic: bool,
    pub max_commutator: f64,
    pub h_hermitian_defect: f64,
    pub h_positive: bool,
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the Higgs bundle axioms at the bundle's own sample points.
pub fn validate(bundle: &HiggsBundleChart) -> ValidationReport {
    validate_at(bundle, &bundle.sample_points())
}

/// Never fails: every violation is collected in the report.
pub fn validate_at(bundle: &HiggsBundleChart, points: &[BasePoint]) -> ValidationReport {
    let mut violations = Vec::new();
    let mut theta_holomorphic = true;
    for (l, th) in bundle.theta.iter().enumerate() {
        for (i, j, e) in th.entries() {
            if !e.is_holomorphic() {
                theta_holomorphic = false;
                violations.push(format!(
                    "Higgs field not holomorphic: theta[{l}][{i}][{j}] = {e}"
                ));
            }
        }
    }

    let r = bundle.rank();
    let mut max_commutator = 0.0f64;
    let mut h_hermitian_defect = 0.0f64;
    let mut h_positive = true;
    let mut worst_entry: Option<(usize, usize)> = None;
    for t in points {
        let h = match bundle.h.eval(t) {
            Ok(h) => h,
            Err(e) => {
                violations.push(format!("h at {}: {e}", crate::domain::format_point(t)));
                h_positive = false;
                continue;
            }
        };
        let scale = frobenius(&h).max(1.0);
        for a in 0..r {
            for b in 0..r {
                let defect = (h[(a, b)] - h[(b, a)].conj()).norm() / scale;
                if defect > h_hermitian_defect {
                    h_hermitian_defect = defect;
                    worst_entry = Some((a, b));
                }
            }
        }
        if HermitianForm::new(h).is_err() {
            if h_positive {
                violations.push(format!(
                    "h is not positive definite at {}",
                    crate::domain::format_point(t)
                ));
            }
            h_positive = false;
        }
        let theta: Result<Vec<CMat>> = bundle.theta.iter().map(|th| th.eval(t)).collect();
        match theta {
            Ok(theta) => {
                for a in 0..theta.len() {
                    for b in a + 1..theta.len() {
                        let c = frobenius(&commutator(&theta[a], &theta[b]));
                        max_commutator = max_commutator.max(c);
                    }
                }
            }
            Err(e) => violations.push(format!("theta at {}: {e}", crate::domain::format_point(t))),
        }
    }
    if h_hermitian_defect > STRUCTURE_TOL {
        let (a, b) = worst_entry.unwrap_or_default();
        violations.push(format!(
            "h is not Hermitian: entry h[{a}][{b}] differs from conj(h[{b}][{a}]) by {h_hermitian_defect:.3e} relative to ||h||"
        ));
    }
    if max_commutator > STRUCTURE_TOL {
        violations.push(format!(
            "Higgs field components do not commute: max ||[theta_j, theta_l]|| = {max_commutator:.12}"
        ));
    }
    ValidationReport {
        samples: points.len(),
        theta_holomorphic,
        max_commutator,
        h_hermitian_defect,
        h_positive,
        violations,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub condition: f64,
}

/// Injectivity of `v -> theta_v` at `t`, decided by the condition number of
/// the Gram matrix of `theta_1(t), ..., theta_m(t)`.
pub fn is_admissible(bundle: &HiggsBundleChart, t: &[Complex64]) -> Result<Admissibility> {
    let p = bundle.at(t)?;
    Ok(admissibility_at(&p))
}

pub fn admissibility_at(p: &BundlePoint) -> Admissibility {
    let gram = end_gram(&p.theta, &p.h);
    let condition = if p.theta.is_empty() {
        1.0
    } else {
        hermitian_condition(&gram)
    };
    Admissibility {
        admissible: condition <= GRAM_CONDITION_LIMIT,
        condition,
    }
}

/// Smallest `k` such that every product of `k + 1` Higgs field components
/// vanishes at every point, or `None` beyond `k = rank - 1`. The components
/// commute, so only non-decreasing index sequences are enumerated.
pub fn nilpotency_order(bundle: &HiggsBundleChart, points: &[BasePoint]) -> Result<Option<usize>> {
    let r = bundle.rank();
    let m = bundle.base_dim();
    if r == 0 || m == 0 {
        return Ok(Some(0));
    }
    let values: Vec<Vec<CMat>> = points
        .iter()
        .map(|t| bundle.theta.iter().map(|th| th.eval(t)).collect())
        .collect::<Result<_>>()?;
    for k in 0..r {
        let vanishes = values.iter().all(|theta| all_products_vanish(theta, k + 1));
        if vanishes {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

fn all_products_vanish(theta: &[CMat], len: usize) -> bool {
    let m = theta.len();
    let norms: Vec<f64> = theta.iter().map(frobenius).collect();
    let mut idx = vec![0usize; len];
    loop {
        let mut prod = theta[idx[0]].clone();
        let mut scale = norms[idx[0]];
        for &i in &idx[1..] {
            prod = &prod * &theta[i];
            scale *= norms[i];
        }
        if frobenius(&prod) > NILPOTENT_TOL * scale.max(1.0) {
            return false;
        }
        // next non-decreasing multi-index
        let mut pos = len;
        while pos > 0 && idx[pos - 1] == m - 1 {
            pos -= 1;
        }
        if pos == 0 {
            return true;
        }
        let next = idx[pos - 1] + 1;
        for slot in &mut idx[pos - 1..] {
            *slot = next;
        }
    }
}

/// `Theta^h_{j kbar}(t)` for all `j, k`.
pub fn chern_curvature_h(bundle: &HiggsBundleChart, t: &[Complex64]) -> Result<Vec<Vec<Endo>>> {
    Ok(bundle.at(t)?.chern)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlatnessResidual {
    /// `max ||Theta_{j kbar} - [theta_k*, theta_j]||`
    pub mixed: f64,
    /// `max_{j<k} ||D_j theta_k - D_k theta_j||`; the (0,2) block is its adjoint.
    pub holomorphic: f64,
}

impl FlatnessResidual {
    pub fn total(&self) -> f64 {
        self.mixed.max(self.holomorphic)
    }
}

pub fn flatness_residual(bundle: &HiggsBundleChart, t: &[Complex64]) -> Result<FlatnessResidual> {
    Ok(flatness_at(&bundle.at(t)?))
}

pub fn flatness_at(p: &BundlePoint) -> FlatnessResidual {
    let m = p.base_dim();
    let mut mixed = 0.0f64;
    let mut holomorphic = 0.0f64;
    for j in 0..m {
        for k in 0..m {
            mixed = mixed.max(frobenius(&p.curvature_11(j, k)));
            if j < k {
                holomorphic = holomorphic.max(frobenius(&p.curvature_20(j, k)));
            }
        }
    }
    FlatnessResidual { mixed, holomorphic }
}

/// `(d_j A)(t) + [Gamma_j(t), A(t)]`: the (1,0) Chern derivative on `End(H)`.
pub fn end_connection_derivative(
    bundle: &HiggsBundleChart,
    j: usize,
    a: &ExprMatrix,
    t: &[Complex64],
) -> Result<Endo> {
    if j >= bundle.base_dim() {
        return Err(Error::Dimension {
            index: j + 1,
            dim: bundle.base_dim(),
        });
    }
    let p = bundle.at(t)?;
    let value = a.eval(t)?;
    Ok(a.d(j).eval(t)? + commutator(&p.gamma[j], &value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::CoordinateRange;
    use crate::linalg::unit;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn box_domain(m: usize) -> ChartDomain {
        ChartDomain::new(
            (0..m)
                .map(|_| CoordinateRange::Box {
                    re: [-1.0, 1.0],
                    im: [0.5, 2.0],
                })
                .collect(),
        )
        .unwrap()
    }

    fn constant_bundle(theta: Vec<CMat>, h: CMat) -> HiggsBundleChart {
        let m = theta.len();
        HiggsBundleChart::new(
            "test",
            box_domain(m),
            theta.iter().map(ExprMatrix::from_constant).collect(),
            ExprMatrix::from_constant(&h),
            SampleSpec { count: 10, seed: 1 },
        )
        .unwrap()
    }

    fn scalar_inverse_y() -> HiggsBundleChart {
        let y = ScalarExpr::im_coord(0);
        HiggsBundleChart::new(
            "scalar",
            box_domain(1),
            vec![ExprMatrix::from_constant(&CMat::from_element(
                1,
                1,
                c(1.0, 0.0),
            ))],
            ExprMatrix::diagonal(vec![y.powi(-1)]),
            SampleSpec::default(),
        )
        .unwrap()
    }

    #[test]
    fn zero_field_is_valid() {
        let b = constant_bundle(vec![CMat::zeros(2, 2); 2], CMat::identity(2, 2));
        assert!(validate(&b).is_valid());
    }

    #[test]
    fn single_component_is_valid() {
        let b = constant_bundle(vec![unit(2, 0, 1)], CMat::identity(2, 2));
        assert!(validate(&b).is_valid());
    }

    #[test]
    fn non_commuting_components_are_reported() {
        let b = constant_bundle(vec![unit(2, 0, 1), unit(2, 1, 0)], CMat::identity(2, 2));
        let rep = validate(&b);
        assert!(!rep.is_valid());
        assert!((rep.max_commutator - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn conjugate_in_theta_is_not_holomorphic() {
        let th = ExprMatrix::diagonal(vec![ScalarExpr::conj_coord(0), ScalarExpr::zero()]);
        let b = HiggsBundleChart::new(
            "bad",
            box_domain(1),
            vec![th],
            ExprMatrix::identity(2),
            SampleSpec::default(),
        )
        .unwrap();
        let rep = validate(&b);
        assert!(!rep.theta_holomorphic);
        assert!(rep.violations[0].contains("Higgs field not holomorphic"));
    }

    #[test]
    fn shape_errors() {
        let r = HiggsBundleChart::new(
            "bad",
            box_domain(1),
            vec![ExprMatrix::zeros(2, 2), ExprMatrix::zeros(2, 2)],
            ExprMatrix::identity(2),
            SampleSpec::default(),
        );
        assert!(matches!(r, Err(Error::Shape(_))));
        let r = HiggsBundleChart::new(
            "bad",
            box_domain(1),
            vec![ExprMatrix::diagonal(vec![ScalarExpr::coord(1)])],
            ExprMatrix::identity(1),
            SampleSpec::default(),
        );
        assert!(matches!(r, Err(Error::Shape(_))));
    }

    #[test]
    fn admissibility() {
        let t = [c(0.0, 1.0), c(0.0, 1.0)];
        let b = constant_bundle(vec![unit(2, 0, 1), unit(2, 0, 1)], CMat::identity(2, 2));
        assert!(!is_admissible(&b, &t).unwrap().admissible);
        let b = constant_bundle(vec![CMat::zeros(2, 2)], CMat::identity(2, 2));
        assert!(!is_admissible(&b, &t[..1]).unwrap().admissible);
        let b = constant_bundle(vec![unit(3, 0, 1), unit(3, 0, 2)], CMat::identity(3, 3));
        assert!(is_admissible(&b, &t).unwrap().admissible);
    }

    #[test]
    fn nilpotency_orders() {
        let b = constant_bundle(vec![CMat::zeros(3, 3)], CMat::identity(3, 3));
        let pts = b.sample_points();
        assert_eq!(nilpotency_order(&b, &pts).unwrap(), Some(0));
        let shift = unit(3, 0, 1) + unit(3, 1, 2);
        let b = constant_bundle(vec![shift], CMat::identity(3, 3));
        assert_eq!(nilpotency_order(&b, &pts).unwrap(), Some(2));
        let b = constant_bundle(vec![unit(3, 0, 1), unit(3, 1, 2)], CMat::identity(3, 3));
        // theta_1 theta_2 = e_13 survives, products of three vanish
        assert_eq!(nilpotency_order(&b, &pts).unwrap(), Some(2));
        let b = constant_bundle(vec![CMat::identity(2, 2)], CMat::identity(2, 2));
        assert_eq!(nilpotency_order(&b, &pts).unwrap(), None);
    }

    #[test]
    fn constant_metric_has_no_curvature() {
        let b = constant_bundle(vec![unit(2, 0, 1)], CMat::identity(2, 2).scale(3.0));
        let p = b.at(&[c(0.1, 1.0)]).unwrap();
        assert!(frobenius(&p.chern[0][0]) == 0.0);
        assert!(frobenius(&p.gamma[0]) == 0.0);
    }

    #[test]
    fn scalar_inverse_y_curvature() {
        let b = scalar_inverse_y();
        for y in [0.6, 1.0, 1.7] {
            let th = chern_curvature_h(&b, &[c(0.3, y)]).unwrap();
            let expected = -1.0 / (4.0 * y * y);
            assert!((th[0][0][(0, 0)] - c(expected, 0.0)).norm() < 1e-14);
        }
        // rank one: [theta*, theta] = 0, so the residual is the Chern curvature itself
        let res = flatness_residual(&b, &[c(0.0, 1.0)]).unwrap();
        assert!((res.mixed - 0.25).abs() < 1e-14);
    }

    #[test]
    fn commuting_with_unit_metric_is_not_flat() {
        let b = constant_bundle(vec![unit(2, 0, 1)], CMat::identity(2, 2));
        let res = flatness_residual(&b, &[c(0.0, 1.0)]).unwrap();
        assert!((res.total() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn end_derivative_vanishes_for_constants() {
        let b = constant_bundle(vec![unit(2, 0, 1)], CMat::identity(2, 2));
        let a = ExprMatrix::from_constant(&unit(2, 1, 0));
        let d = end_connection_derivative(&b, 0, &a, &[c(0.0, 1.0)]).unwrap();
        assert_eq!(frobenius(&d), 0.0);
    }
}
