//! Randomized exercise of the trace-chain inequalities.
//!
//! Each trial draws two instances:
//!
//! * a graded one: random level dimensions, a random block-subdiagonal
//!   endomorphism and a block-diagonal positive metric, all conjugated by a
//!   random change of basis. Its grading is `h`-orthogonal and strict by
//!   construction, so the inequalities are asserted.
//! * a general one: a random strictly upper-triangular matrix in a random
//!   basis, with a random metric. Both grading routes are run; the chain is
//!   asserted only when an orthogonal strict grading is found.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::certify::{fmt12, round12};
use crate::error::{Error, Result};
use crate::linalg::{end_norm, hermitian_condition, unit, CMat, HermitianForm};
use crate::nilpotent::{
    commutator_chain_check, jordan_grading, orthogonal_strict_grading, trace_profile, ChainReport,
    GradedNilpotent, CHAIN_SLACK,
};

pub const MAX_RANK: usize = 16;
/// Tolerance for `sum a_p = ||A||^2`, relative to `max(1, ||A||^2)`.
pub const TRACE_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradedSummary {
    pub instances: usize,
    pub min_margin: f64,
    pub max_trace_sum_error: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralSummary {
    pub instances: usize,
    /// Jordan gradings that came out strict.
    pub jordan_strict: usize,
    /// Jordan gradings that came out `h`-orthogonal as well.
    pub jordan_orthogonal: usize,
    /// Min margin over Jordan gradings, measured only.
    pub jordan_min_margin: f64,
    pub orthogonal_found: usize,
    pub not_representable: usize,
    /// Min margin over the orthogonal strict gradings found (asserted).
    pub orthogonal_min_margin: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarnessReport {
    pub rank: usize,
    pub trials: usize,
    pub seed: u64,
    pub shift_block: Option<ChainReport>,
    pub graded: GradedSummary,
    pub general: GeneralSummary,
    pub pass: bool,
}

impl HarnessReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "nilpotent harness: rank {}, {} trials, seed {}",
            self.rank, self.trials, self.seed
        );
        if let Some(s) = &self.shift_block {
            let _ = writeln!(
                out,
                "  shift block        lhs = {}  m1 = {}  m2 = {}  m3 = {}",
                fmt12(s.lhs),
                fmt12(s.m1),
                fmt12(s.m2),
                fmt12(s.m3)
            );
        }
        let g = &self.graded;
        let _ = writeln!(
            out,
            "  graded             {} instances, min margin {}, max trace-sum error {}, {} failures",
            g.instances,
            fmt12(g.min_margin),
            fmt12(g.max_trace_sum_error),
            g.failures
        );
        let n = &self.general;
        let _ = writeln!(
            out,
            "  general            {} instances, {} orthogonal strict found (min margin {}), {} not representable, {} failures",
            n.instances,
            n.orthogonal_found,
            fmt12(n.orthogonal_min_margin),
            n.not_representable,
            n.failures
        );
        let _ = writeln!(
            out,
            "  jordan gradings    {} strict, {} orthogonal, min margin {} (not asserted)",
            n.jordan_strict,
            n.jordan_orthogonal,
            fmt12(n.jordan_min_margin)
        );
        let _ = writeln!(out, "verdict: {}", if self.pass { "pass" } else { "fail" });
        out
    }
}

fn round_chain(mut c: ChainReport) -> ChainReport {
    c.lhs = round12(c.lhs);
    c.m1 = round12(c.m1);
    c.m2 = round12(c.m2);
    c.m3 = round12(c.m3);
    c.traces = c.traces.into_iter().map(round12).collect();
    c.margins = c.margins.map(round12);
    c
}

fn gaussianish(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| gaussianish(rng))
}

/// `B^H B + I/2` for a random square `B`.
pub fn random_metric(rng: &mut ChaCha8Rng, r: usize) -> HermitianForm {
    let b = random_matrix(rng, r, r);
    HermitianForm::new(b.adjoint() * &b + CMat::identity(r, r).scale(0.5))
        .expect("B^H B + I/2 is positive definite")
}

/// Random invertible matrix with condition number below 100.
fn random_basis(rng: &mut ChaCha8Rng, r: usize) -> CMat {
    loop {
        let u = random_matrix(rng, r, r) + CMat::identity(r, r).scale(1.5);
        let sv = u.singular_values();
        let (hi, lo) = (sv.max(), sv.min());
        if lo > 0.0 && hi / lo < 100.0 {
            return u;
        }
    }
}

/// Random composition of `r` into between 2 and `r` positive parts (one part
/// when `r = 1`).
fn random_level_dims(rng: &mut ChaCha8Rng, r: usize) -> Vec<usize> {
    if r < 2 {
        return vec![r];
    }
    let levels = rng.gen_range(2..=r);
    let mut dims = vec![1; levels];
    for _ in levels..r {
        let i = rng.gen_range(0..levels);
        dims[i] += 1;
    }
    dims
}

/// A random grading that is strict and `h`-orthogonal by construction.
pub fn random_orthogonal_graded(rng: &mut ChaCha8Rng, r: usize) -> GradedNilpotent {
    let dims = random_level_dims(rng, r);
    let offsets: Vec<usize> = dims
        .iter()
        .scan(0, |acc, d| {
            let o = *acc;
            *acc += d;
            Some(o)
        })
        .collect();
    let mut a = CMat::zeros(r, r);
    let mut h = CMat::zeros(r, r);
    for (p, &d) in dims.iter().enumerate() {
        let block = random_metric(rng, d);
        h.view_mut((offsets[p], offsets[p]), (d, d))
            .copy_from(block.matrix());
        if p + 1 < dims.len() {
            let next = dims[p + 1];
            a.view_mut((offsets[p + 1], offsets[p]), (next, d))
                .copy_from(&random_matrix(rng, next, d));
        }
    }
    let u = random_basis(rng, r);
    let u_inv = u.clone().try_inverse().expect("well conditioned");
    let a = &u * a * &u_inv;
    let h = HermitianForm::new(u_inv.adjoint() * h * &u_inv).expect("congruent to a positive form");
    let levels = dims
        .iter()
        .zip(&offsets)
        .map(|(&d, &o)| u.columns(o, d).into_owned())
        .collect();
    GradedNilpotent::from_levels(a, h, levels).expect("levels form a basis")
}

/// A random nilpotent matrix in a random basis; entries above the diagonal
/// are dropped with probability 0.4 so several Jordan types occur.
pub fn random_nilpotent(rng: &mut ChaCha8Rng, r: usize) -> CMat {
    let n = CMat::from_fn(r, r, |i, j| {
        if j > i && rng.gen_bool(0.6) {
            gaussianish(rng)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let s = random_basis(rng, r);
    let s_inv = s.clone().try_inverse().expect("well conditioned");
    s * n * s_inv
}

struct Trial {
    graded: ChainReport,
    trace_sum_error: f64,
    jordan: Option<ChainReport>,
    jordan_flags: (bool, bool),
    orthogonal: Option<ChainReport>,
}

fn run_trial(rank: usize, seed: u64, trial: usize) -> Trial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let g = random_orthogonal_graded(&mut rng, rank);
    let graded = commutator_chain_check(&g);
    let norm2 = end_norm(&g.a, &g.h).powi(2);
    let trace_sum_error = (trace_profile(&g).sum() - norm2).abs() / norm2.max(1.0);

    let a = random_nilpotent(&mut rng, rank);
    let h = random_metric(&mut rng, rank);
    debug_assert!(hermitian_condition(h.matrix()).is_finite());
    let (jordan, jordan_flags) = match jordan_grading(&a, &h) {
        Ok(j) => (
            Some(commutator_chain_check(&j)),
            (j.is_strictly_graded, j.is_h_orthogonal),
        ),
        Err(_) => (None, (false, false)),
    };
    let orthogonal = orthogonal_strict_grading(&a, &h)
        .ok()
        .map(|o| commutator_chain_check(&o));
    Trial {
        graded,
        trace_sum_error,
        jordan,
        jordan_flags,
        orthogonal,
    }
}

/// The rank-2 shift block `e_12` with the standard metric, where
/// `||[A*, A]|| = M1 = sqrt(2)`.
pub fn shift_block_report() -> ChainReport {
    let g = orthogonal_strict_grading(&unit(2, 0, 1), &HermitianForm::identity(2))
        .expect("shift block is orthogonally graded");
    commutator_chain_check(&g)
}

pub fn run_nilpotent_harness(rank: usize, trials: usize, seed: u64) -> Result<HarnessReport> {
    if rank == 0 || rank > MAX_RANK {
        return Err(Error::Shape(format!(
            "rank must be between 1 and {MAX_RANK}"
        )));
    }
    let results: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(rank, seed, t))
        .collect();

    let ok = |c: &ChainReport| c.min_margin() >= -CHAIN_SLACK;
    let min = |it: &mut dyn Iterator<Item = f64>| it.fold(f64::INFINITY, f64::min);

    let graded = GradedSummary {
        instances: results.len(),
        min_margin: round12(min(&mut results.iter().map(|t| t.graded.min_margin()))),
        max_trace_sum_error: round12(
            results
                .iter()
                .map(|t| t.trace_sum_error)
                .fold(0.0, f64::max),
        ),
        failures: results
            .iter()
            .filter(|t| !t.graded.asserted || !ok(&t.graded) || t.trace_sum_error > TRACE_SUM_TOL)
            .count(),
    };
    let general = GeneralSummary {
        instances: results.len(),
        jordan_strict: results.iter().filter(|t| t.jordan_flags.0).count(),
        jordan_orthogonal: results
            .iter()
            .filter(|t| t.jordan_flags.0 && t.jordan_flags.1)
            .count(),
        jordan_min_margin: round12(min(&mut results
            .iter()
            .filter_map(|t| t.jordan.as_ref().map(ChainReport::min_margin)))),
        orthogonal_found: results.iter().filter(|t| t.orthogonal.is_some()).count(),
        not_representable: results.iter().filter(|t| t.orthogonal.is_none()).count(),
        orthogonal_min_margin: round12(min(&mut results
            .iter()
            .filter_map(|t| t.orthogonal.as_ref().map(ChainReport::min_margin)))),
        failures: results
            .iter()
            .filter_map(|t| t.orthogonal.as_ref())
            .filter(|c| !ok(c))
            .count(),
    };
    let shift_block = (trials > 0).then(shift_block_report);
    let shift_ok = shift_block.as_ref().map_or(true, |s| {
        (s.lhs - 2f64.sqrt()).abs() <= 1e-9 && (s.m1 - 2f64.sqrt()).abs() <= 1e-9
    });
    Ok(HarnessReport {
        rank,
        trials,
        seed,
        pass: graded.failures == 0 && general.failures == 0 && shift_ok,
        shift_block: shift_block.map(round_chain),
        graded,
        general,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_trials_is_empty() {
        let r = run_nilpotent_harness(3, 0, 1).unwrap();
        assert!(r.pass);
        assert!(r.shift_block.is_none());
        assert_eq!(r.graded.instances, 0);
    }

    #[test]
    fn random_graded_instances_are_orthogonal_and_strict() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for r in 1..=6 {
            for _ in 0..20 {
                let g = random_orthogonal_graded(&mut rng, r);
                assert!(g.is_strictly_graded && g.is_h_orthogonal, "{g:?}");
            }
        }
    }

    #[test]
    fn small_run_passes_and_is_deterministic() {
        let a = run_nilpotent_harness(4, 50, 11).unwrap();
        assert!(a.pass, "{}", a.to_text());
        let b = run_nilpotent_harness(4, 50, 11).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn rank_limits() {
        assert!(run_nilpotent_harness(0, 1, 0).is_err());
        assert!(run_nilpotent_harness(17, 1, 0).is_err());
    }
}
