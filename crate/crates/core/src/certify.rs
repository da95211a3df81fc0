//! The full check pipeline for one bundle and its report.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::BasePoint;
use crate::error::{Error, Result};
use crate::higgs::{
    admissibility_at, flatness_at, nilpotency_order, validate_at, BundlePoint, HiggsBundleChart,
};
use crate::hodge::{
    bisectional_form, flat_curvature_at, hodge_metric_jet, kahler_residual_of, scalar_trace_check,
    sectional_bound, sectional_from_sample, subbundle_curvature_at, BaseCurvatureSample, HSC_SLACK,
    SIGN_SLACK, TOL_ABS, TOL_REL,
};
use crate::nilpotent::{
    commutator_chain_check, orthogonal_strict_grading, trace_profile, CHAIN_SLACK,
};

pub const NON_ADMISSIBLE_SKIP: &str =
    "non-admissible: Hodge semi-metric only; curvature checks skipped";
pub const NON_FLAT_SKIP: &str =
    "not flat: curvature identities need a flat bundle; curvature checks skipped";

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyOptions {
    /// Overrides the bundle's own sample count.
    pub samples: Option<usize>,
    /// Overrides the bundle's own seed.
    pub seed: Option<u64>,
    pub tol_abs: f64,
    pub tol_rel: f64,
    pub curvature_samples: usize,
    pub bisectional_samples: usize,
    pub bisectional_pairs: usize,
    pub hsc_directions: usize,
    pub chain_points: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            samples: None,
            seed: None,
            tol_abs: TOL_ABS,
            tol_rel: TOL_REL,
            curvature_samples: 50,
            bisectional_samples: 20,
            bisectional_pairs: 1000,
            hsc_directions: 500,
            chain_points: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    /// Measured but not asserted.
    Info,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
            Status::Info => "info",
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// The statement under test.
    pub claim: String,
    pub status: Status,
    /// Name of the headline statistic, e.g. `max_residual`.
    pub statistic_name: String,
    pub statistic: Option<f64>,
    /// The statistic passes when it is at most this value.
    pub threshold: Option<f64>,
    pub samples: usize,
    pub details: BTreeMap<String, f64>,
    pub note: Option<String>,
}

impl CheckRecord {
    fn new(name: &str, claim: &str) -> Self {
        CheckRecord {
            name: name.to_string(),
            claim: claim.to_string(),
            status: Status::Info,
            statistic_name: String::new(),
            statistic: None,
            threshold: None,
            samples: 0,
            details: BTreeMap::new(),
            note: None,
        }
    }

    fn stat(mut self, name: &str, value: f64, threshold: Option<f64>) -> Self {
        self.statistic_name = name.to_string();
        self.statistic = Some(round12(value));
        self.threshold = threshold.map(round12);
        self
    }

    fn samples(mut self, n: usize) -> Self {
        self.samples = n;
        self
    }

    fn status(mut self, s: Status) -> Self {
        self.status = s;
        self
    }

    fn detail(mut self, key: impl Into<String>, value: f64) -> Self {
        self.details.insert(key.into(), round12(value));
        self
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    fn skipped(name: &str, claim: &str, reason: &str) -> Self {
        CheckRecord::new(name, claim)
            .status(Status::Skipped)
            .note(reason)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub abs: f64,
    pub rel: f64,
    pub sign_slack: f64,
    pub hsc_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificationReport {
    pub tool: String,
    pub version: String,
    pub bundle: String,
    pub base_dim: usize,
    pub rank: usize,
    pub seed: u64,
    pub samples: usize,
    pub tolerances: Tolerances,
    pub checks: Vec<CheckRecord>,
    pub verdict: Status,
    #[serde(skip)]
    pub rows: Vec<SampleRow>,
}

impl CertificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Status::Pass
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "bundle {} (base dimension {}, rank {}), {} samples, seed {}",
            self.bundle, self.base_dim, self.rank, self.samples, self.seed
        );
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let stat = match c.statistic {
                Some(v) => format!("{} = {}", c.statistic_name, fmt12(v)),
                None => String::new(),
            };
            let bound = match c.threshold {
                Some(t) => format!(" (<= {})", fmt12(t)),
                None => String::new(),
            };
            let line = format!(
                "  {:<width$}  {:<7}  {stat}{bound}",
                c.name,
                c.status.label()
            );
            let _ = writeln!(out, "{}", line.trim_end());
            for (k, v) in &c.details {
                let _ = writeln!(out, "  {:<width$}           {k} = {}", "", fmt12(*v));
            }
            if let Some(n) = &c.note {
                let _ = writeln!(out, "  {:<width$}           {n}", "");
            }
        }
        let _ = writeln!(out, "verdict: {}", self.verdict.label());
        out
    }

    /// Per-sample values for the points where curvature was evaluated.
    pub fn to_csv(&self) -> String {
        let m = self.base_dim;
        let mut out = String::from("sample");
        for j in 1..=m {
            let _ = write!(out, ",re_t{j},im_t{j}");
        }
        out.push_str(",flatness,kahler,gram_condition,curvature_agreement,scalar_trace");
        for j in 1..=m {
            let _ = write!(out, ",hsc_t{j}");
        }
        out.push('\n');
        let cell = |v: Option<f64>| v.map(fmt12).unwrap_or_default();
        for r in &self.rows {
            let _ = write!(out, "{}", r.index);
            for z in &r.point {
                let _ = write!(out, ",{},{}", fmt12(z.re), fmt12(z.im));
            }
            let _ = write!(
                out,
                ",{},{},{},{},{}",
                fmt12(r.flatness),
                cell(r.kahler),
                fmt12(r.condition),
                cell(r.agreement),
                cell(r.scalar_trace)
            );
            for j in 0..m {
                let _ = write!(out, ",{}", cell(r.hsc.get(j).copied()));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRow {
    pub index: usize,
    pub point: Vec<Complex64>,
    pub flatness: f64,
    pub kahler: Option<f64>,
    pub condition: f64,
    pub agreement: Option<f64>,
    pub scalar_trace: Option<f64>,
    pub hsc: Vec<f64>,
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Decimal text with 12 significant digits; exponent form outside
/// `[1e-4, 1e6)`.
pub fn fmt12(x: f64) -> String {
    if !x.is_finite() || x == 0.0 {
        return x.to_string();
    }
    let a = x.abs();
    if (1e-4..1e6).contains(&a) {
        format!("{}", round12(x))
    } else {
        format!("{:e}", round12(x))
    }
}

mod claims {
    pub const VALIDATE: &str =
        "theta is holomorphic with commuting components; h is Hermitian positive definite";
    pub const ADMISSIBLE: &str = "theta_v vanishes only for v = 0, so the Hodge form is a metric";
    pub const NILPOTENT: &str = "theta is k-nilpotent: all (k+1)-fold products vanish";
    pub const FLAT: &str = "the Higgs connection D_h + theta + theta* is flat";
    pub const KAHLER: &str = "the Hodge metric on the base is Kahler";
    pub const AGREEMENT: &str =
        "subbundle and flat curvature formulas reproduce the Chern curvature of the Hodge metric";
    pub const BISECTIONAL: &str = "the holomorphic bisectional curvature is semi-negative";
    pub const TRACE: &str = "the scalar curvature trace is non-positive";
    pub const HSC: &str = "holomorphic sectional curvature <= -1/(k^2 rank)";
    pub const CHAIN: &str =
        "||[A*,A]|| >= sum|a_p - a_(p-1)|/sqrt(r) >= max a_p/sqrt(r) >= sum a_p/(k sqrt(r)) for A = theta_j";
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn random_vector(rng: &mut ChaCha8Rng, m: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..m)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

fn stream_rng(seed: u64, tag: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.set_stream(index as u64);
    rng
}

/// Per-point curvature results for flat admissible bundles.
struct CurvaturePoint {
    direct: BaseCurvatureSample,
    agreement: Result<(f64, bool, f64)>,
    kahler: f64,
    trace: f64,
    hsc_coord: Vec<f64>,
    hsc_random: f64,
}

pub fn certify(bundle: &HiggsBundleChart, options: &CertifyOptions) -> CertificationReport {
    let n = options.samples.unwrap_or(bundle.samples.count);
    let seed = options.seed.unwrap_or(bundle.samples.seed);
    let (m, r) = (bundle.base_dim(), bundle.rank());
    let points: Vec<BasePoint> = bundle.domain.sample(n, seed);
    let mut checks = Vec::new();
    let mut rows = Vec::new();

    let report = |checks: Vec<CheckRecord>, rows: Vec<SampleRow>| {
        let verdict = if checks.iter().any(|c| c.status == Status::Fail) {
            Status::Fail
        } else {
            Status::Pass
        };
        CertificationReport {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            bundle: bundle.name.clone(),
            base_dim: m,
            rank: r,
            seed,
            samples: n,
            tolerances: Tolerances {
                abs: options.tol_abs,
                rel: options.tol_rel,
                sign_slack: SIGN_SLACK,
                hsc_slack: HSC_SLACK,
            },
            checks,
            verdict,
            rows,
        }
    };

    // validate
    let validation = validate_at(bundle, &points);
    let evaluated: Vec<Result<BundlePoint>> = points.par_iter().map(|t| bundle.at(t)).collect();
    let mut problems = validation.violations.clone();
    for (i, e) in evaluated.iter().enumerate() {
        if let Err(e) = e {
            problems.push(format!("sample {i}: {e}"));
        }
    }
    let mut rec = CheckRecord::new("validate", claims::VALIDATE)
        .stat("violations", problems.len() as f64, Some(0.0))
        .samples(n)
        .detail("max_commutator", validation.max_commutator)
        .detail("h_hermitian_defect", validation.h_hermitian_defect)
        .status(Status::from_bool(problems.is_empty()));
    if !problems.is_empty() {
        rec = rec.note(problems.join("; "));
        checks.push(rec);
        return report(checks, rows);
    }
    checks.push(rec);
    let bp: Vec<BundlePoint> = evaluated.into_iter().map(|p| p.expect("checked")).collect();

    // admissibility
    let adm: Vec<_> = bp.par_iter().map(admissibility_at).collect();
    let bad = adm.iter().filter(|a| !a.admissible).count();
    let worst = adm.iter().map(|a| a.condition).fold(0.0, f64::max);
    let admissible = bad == 0;
    let mut rec = CheckRecord::new("admissibility", claims::ADMISSIBLE)
        .stat(
            "max_gram_condition",
            worst,
            Some(crate::linalg::GRAM_CONDITION_LIMIT),
        )
        .samples(n)
        .detail("non_admissible_samples", bad as f64);
    if !admissible {
        rec = rec.note(format!(
            "{}; {bad} of {n} samples",
            Error::DegenerateGram { condition: worst }
        ));
    }
    checks.push(rec);

    // nilpotency
    let k = match nilpotency_order(bundle, &points) {
        Ok(k) => k,
        Err(_) => None,
    };
    let mut rec = CheckRecord::new("nilpotency", claims::NILPOTENT).samples(n);
    rec = match k {
        Some(k) => rec.stat("k", k as f64, None),
        None => rec.note(format!("no (k+1)-fold products vanish for k < rank = {r}")),
    };
    checks.push(rec);

    // flatness
    let flat: Vec<_> = bp.par_iter().map(flatness_at).collect();
    let max_flat = flat.iter().map(|f| f.total()).fold(0.0, f64::max);
    let is_flat = max_flat <= options.tol_abs;
    checks.push(
        CheckRecord::new("flatness", claims::FLAT)
            .stat("max_residual", max_flat, Some(options.tol_abs))
            .samples(n)
            .detail(
                "max_mixed_residual",
                flat.iter().map(|f| f.mixed).fold(0.0, f64::max),
            )
            .detail(
                "max_holomorphic_residual",
                flat.iter().map(|f| f.holomorphic).fold(0.0, f64::max),
            )
            .status(Status::from_bool(is_flat)),
    );

    let nc = n.min(options.curvature_samples);
    let hypotheses = is_flat && admissible;
    let asserted = |ok: bool| {
        if hypotheses {
            Status::from_bool(ok)
        } else {
            Status::Info
        }
    };

    // Kahler (the semi-metric is still a closed form when it degenerates)
    let kahler: Vec<Option<f64>> = points[..nc]
        .par_iter()
        .map(|t| {
            hodge_metric_jet(bundle, t)
                .ok()
                .map(|g| kahler_residual_of(&g))
        })
        .collect();
    let max_kahler = kahler.iter().flatten().cloned().fold(0.0, f64::max);
    checks.push(
        CheckRecord::new("kahler", claims::KAHLER)
            .stat("max_residual", max_kahler, Some(options.tol_abs))
            .samples(kahler.iter().flatten().count())
            .status(asserted(max_kahler <= options.tol_abs)),
    );

    let skip_reason = if !admissible {
        Some(NON_ADMISSIBLE_SKIP)
    } else if !is_flat {
        Some(NON_FLAT_SKIP)
    } else if k.is_none() {
        Some("not nilpotent; curvature bound undefined")
    } else {
        None
    };
    let curvature_checks = [
        ("curvature_agreement", claims::AGREEMENT),
        ("bisectional", claims::BISECTIONAL),
        ("scalar_trace", claims::TRACE),
        ("hsc_coordinate", claims::HSC),
        ("hsc_random", claims::HSC),
        ("trace_chain", claims::CHAIN),
    ];
    let base_rows = |curv: Option<&[CurvaturePoint]>| -> Vec<SampleRow> {
        (0..nc)
            .map(|i| {
                let c = curv.map(|c| &c[i]);
                SampleRow {
                    index: i,
                    point: points[i].0.clone(),
                    flatness: flat[i].total(),
                    kahler: kahler[i],
                    condition: adm[i].condition,
                    agreement: c.and_then(|c| c.agreement.as_ref().ok().map(|a| a.0)),
                    scalar_trace: c.map(|c| c.trace),
                    hsc: c.map(|c| c.hsc_coord.clone()).unwrap_or_default(),
                }
            })
            .collect()
    };
    if let Some(reason) = skip_reason {
        for (name, claim) in curvature_checks {
            checks.push(CheckRecord::skipped(name, claim, reason));
        }
        rows = base_rows(None);
        return report(checks, rows);
    }
    let k = k.expect("checked");
    let bound = sectional_bound(k, r);

    let curv: Vec<Result<CurvaturePoint>> = (0..nc)
        .into_par_iter()
        .map(|i| {
            let p = &bp[i];
            let jet = hodge_metric_jet(bundle, &points[i])?;
            let direct = crate::hodge::curvature_from_metric_jet(&jet)?;
            let agreement = subbundle_curvature_at(p).and_then(|sub| {
                let flat = flat_curvature_at(p, options.tol_abs)?;
                let a = direct.compare(&sub);
                let b = direct.compare(&flat);
                let ok = a.within(options.tol_rel, options.tol_abs)
                    && b.within(options.tol_rel, options.tol_abs);
                Ok((
                    a.relative().max(b.relative()),
                    ok,
                    direct.hermitian_defect(),
                ))
            });
            let hsc_coord = (0..m)
                .map(|j| {
                    let mut e = vec![ZERO; m];
                    e[j] = Complex64::new(1.0, 0.0);
                    sectional_from_sample(&direct, &e)
                })
                .collect();
            let mut rng = stream_rng(seed, 1, i);
            let hsc_random = (0..options.hsc_directions)
                .map(|_| sectional_from_sample(&direct, &random_vector(&mut rng, m)))
                .fold(f64::NEG_INFINITY, f64::max);
            Ok(CurvaturePoint {
                trace: scalar_trace_check(&direct),
                kahler: kahler_residual_of(&jet),
                direct,
                agreement,
                hsc_coord,
                hsc_random,
            })
        })
        .collect();
    let failures: Vec<String> = curv
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.as_ref().err().map(|e| format!("sample {i}: {e}")))
        .collect();
    if !failures.is_empty() {
        for (name, claim) in curvature_checks {
            checks.push(
                CheckRecord::new(name, claim)
                    .status(Status::Fail)
                    .note(failures.join("; ")),
            );
        }
        rows = base_rows(None);
        return report(checks, rows);
    }
    let curv: Vec<CurvaturePoint> = curv.into_iter().map(|c| c.expect("checked")).collect();
    debug_assert!(curv.iter().all(|c| c.kahler.is_finite()));

    // three-way agreement
    let mut worst_rel = 0.0f64;
    let mut worst_herm = 0.0f64;
    let mut agree = true;
    let mut notes = Vec::new();
    for (i, c) in curv.iter().enumerate() {
        match &c.agreement {
            Ok((rel, ok, herm)) => {
                worst_rel = worst_rel.max(*rel);
                worst_herm = worst_herm.max(*herm);
                agree &= ok;
            }
            Err(e) => {
                agree = false;
                notes.push(format!("sample {i}: {e}"));
            }
        }
    }
    let mut rec = CheckRecord::new("curvature_agreement", claims::AGREEMENT)
        .stat("max_relative_difference", worst_rel, Some(options.tol_rel))
        .samples(nc)
        .detail("max_hermitian_defect", worst_herm)
        .status(Status::from_bool(agree));
    if !notes.is_empty() {
        rec = rec.note(notes.join("; "));
    }
    checks.push(rec);

    // bisectional
    let nb = nc.min(options.bisectional_samples);
    let bis: Vec<(f64, f64)> = (0..nb)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, 2, i);
            let mut worst = f64::NEG_INFINITY;
            let mut imag = 0.0f64;
            for _ in 0..options.bisectional_pairs {
                let xi = random_vector(&mut rng, m);
                let v = random_vector(&mut rng, m);
                let z = curv[i].direct.bisectional(&xi, &v);
                worst = worst.max(bisectional_form(&curv[i].direct, &xi, &v));
                imag = imag.max(z.im.abs());
            }
            (worst, imag)
        })
        .collect();
    let max_bis = bis.iter().map(|b| b.0).fold(f64::NEG_INFINITY, f64::max);
    checks.push(
        CheckRecord::new("bisectional", claims::BISECTIONAL)
            .stat("max_form", max_bis, Some(SIGN_SLACK))
            .samples(nb)
            .detail("pairs_per_sample", options.bisectional_pairs as f64)
            .detail(
                "max_imaginary_part",
                bis.iter().map(|b| b.1).fold(0.0, f64::max),
            )
            .status(Status::from_bool(max_bis <= SIGN_SLACK)),
    );

    // scalar trace
    let max_trace = curv
        .iter()
        .map(|c| c.trace)
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(
        CheckRecord::new("scalar_trace", claims::TRACE)
            .stat("max_trace", max_trace, Some(SIGN_SLACK))
            .samples(nc)
            .status(Status::from_bool(max_trace <= SIGN_SLACK)),
    );

    // sectional curvature along coordinate directions
    let mut rec = CheckRecord::new("hsc_coordinate", claims::HSC).samples(nc);
    let mut max_coord = f64::NEG_INFINITY;
    for j in 0..m {
        let vals: Vec<f64> = curv.iter().map(|c| c.hsc_coord[j]).collect();
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        max_coord = max_coord.max(hi);
        rec = rec
            .detail(format!("max_t{}", j + 1), hi)
            .detail(format!("min_t{}", j + 1), lo);
    }
    checks.push(
        rec.stat("max_hsc", max_coord, Some(bound))
            .detail("bound", bound)
            .status(Status::from_bool(max_coord <= bound + HSC_SLACK)),
    );

    let max_random = curv
        .iter()
        .map(|c| c.hsc_random)
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(
        CheckRecord::new("hsc_random", claims::HSC)
            .stat("max_hsc", max_random, Some(bound))
            .samples(nc)
            .detail("directions_per_sample", options.hsc_directions as f64)
            .detail("bound", bound)
            .status(Status::from_bool(max_random <= bound + HSC_SLACK)),
    );

    checks.push(trace_chain_check(&bp, &curv, options));

    rows = base_rows(Some(&curv));
    report(checks, rows)
}

/// Trace-chain inequalities for each `theta_j` at the first few samples,
/// plus `sum a_p = ||d_j||^2` and the diagonal curvature against
/// `-(sum a_p)^2 / (k^2 r)`.
fn trace_chain_check(
    bp: &[BundlePoint],
    curv: &[CurvaturePoint],
    options: &CertifyOptions,
) -> CheckRecord {
    let np = curv.len().min(options.chain_points);
    let m = bp.first().map(|p| p.base_dim()).unwrap_or(0);
    let mut min_margin = f64::INFINITY;
    let mut identity_err = 0.0f64;
    let mut curvature_margin = f64::INFINITY;
    let mut tested = 0;
    let mut unrepresentable = 0;
    for i in 0..np {
        for j in 0..m {
            let g = match orthogonal_strict_grading(&bp[i].theta[j], &bp[i].h) {
                Ok(g) => g,
                Err(_) => {
                    unrepresentable += 1;
                    continue;
                }
            };
            tested += 1;
            let rep = commutator_chain_check(&g);
            min_margin = min_margin.min(rep.min_margin());
            let norm2 = curv[i].direct.metric.g[(j, j)].re;
            let sum = trace_profile(&g).sum();
            identity_err = identity_err.max((sum - norm2).abs() / norm2.max(1.0));
            let kk = g.k().max(1) as f64;
            let trace_bound = -(sum * sum) / (kk * kk * g.rank() as f64);
            let diag = curv[i].direct.get(j, j, j, j).re;
            curvature_margin = curvature_margin.min(trace_bound - diag);
        }
    }
    let rec = CheckRecord::new("trace_chain", claims::CHAIN)
        .samples(np)
        .detail("gradings_tested", tested as f64)
        .detail("not_representable", unrepresentable as f64);
    if tested == 0 {
        return rec
            .status(Status::Info)
            .note("no orthogonal strict grading found; inequalities not asserted");
    }
    let ok = min_margin >= -CHAIN_SLACK
        && identity_err <= options.tol_abs.max(1e-9)
        && curvature_margin >= -HSC_SLACK;
    rec.stat("min_margin", min_margin, None)
        .detail("max_trace_sum_error", identity_err)
        .detail("min_curvature_margin", curvature_margin)
        .status(Status::from_bool(ok))
}
