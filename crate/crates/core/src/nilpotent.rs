//! Graded decompositions `V = V_0 + ... + V_k` of a nilpotent endomorphism
//! with `A(V_p) ⊆ V_(p+1)`, the level traces `a_p = Tr(A_p* A_p)` of the
//! pieces `A_p: V_p -> V_(p+1)`, and the lower bound they give for the
//! commutator norm `||[A*, A]||`.
//!
//! The chain of inequalities
//!
//! ```text
//! ||[A*, A]|| >= sum_p |a_p - a_(p-1)| / sqrt(r) >= max_p a_p / sqrt(r) >= sum_p a_p / (k sqrt(r))
//! ```
//!
//! is a theorem when the levels are mutually `h`-orthogonal; for other
//! gradings it is only measured.

use nalgebra::SVD;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    commutator, end_norm, frobenius, h_adjoint, nilpotency_index, CMat, Endo, HermitianForm,
};

/// Rank threshold for kernels and complements.
pub const RANK_TOL: f64 = 1e-10;
/// Asserted inequalities may undershoot by this much.
pub const CHAIN_SLACK: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct GradedNilpotent {
    pub a: Endo,
    pub h: HermitianForm,
    /// Column bases of `V_0, ..., V_k`.
    pub levels: Vec<CMat>,
    pub is_strictly_graded: bool,
    pub is_h_orthogonal: bool,
    /// Largest relative component of `A(V_p)` outside `V_(p+1)`.
    pub grading_defect: f64,
    /// Largest normalized `h`-inner product between different levels.
    pub orthogonality_defect: f64,
}

impl GradedNilpotent {
    /// Wraps an explicit grading; the flags are measured, not assumed.
    pub fn from_levels(a: Endo, h: HermitianForm, levels: Vec<CMat>) -> Result<Self> {
        let r = a.nrows();
        if h.rank() != r || levels.iter().any(|l| l.nrows() != r) {
            return Err(Error::Shape(
                "grading does not match the endomorphism".into(),
            ));
        }
        let total: usize = levels.iter().map(|l| l.ncols()).sum();
        if total != r || levels.is_empty() {
            return Err(Error::Shape(format!(
                "levels span {total} dimensions, expected {r}"
            )));
        }
        let stacked = hstack(&levels, r);
        if r > 0 && numerical_rank(&stacked, RANK_TOL) < r {
            return Err(Error::Shape("levels are linearly dependent".into()));
        }
        let levels: Vec<CMat> = levels.into_iter().map(normalize_columns).collect();
        let grading_defect = grading_defect(&a, &levels);
        let orthogonality_defect = orthogonality_defect(&h, &levels);
        let scale = frobenius(&a).max(1.0);
        Ok(GradedNilpotent {
            is_strictly_graded: grading_defect <= RANK_TOL * scale,
            is_h_orthogonal: orthogonality_defect <= RANK_TOL,
            a,
            h,
            levels,
            grading_defect,
            orthogonality_defect,
        })
    }

    /// Number of levels minus one.
    pub fn k(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn rank(&self) -> usize {
        self.a.nrows()
    }

    pub fn level_dims(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.ncols()).collect()
    }

    /// `h`-orthogonal projection onto `V_p`.
    pub fn level_projector(&self, p: usize) -> CMat {
        let b = &self.levels[p];
        let gram = self.h.gram(b);
        match gram.try_inverse() {
            Some(gi) => b * gi * b.adjoint() * self.h.matrix(),
            None => CMat::zeros(self.rank(), self.rank()),
        }
    }
}

fn hstack(blocks: &[CMat], rows: usize) -> CMat {
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut c = 0;
    for b in blocks {
        out.view_mut((0, c), (rows, b.ncols())).copy_from(b);
        c += b.ncols();
    }
    out
}

fn normalize_columns(mut b: CMat) -> CMat {
    for mut col in b.column_iter_mut() {
        let n = col.norm();
        if n > 0.0 {
            col /= Complex64::new(n, 0.0);
        }
    }
    b
}

fn numerical_rank(m: &CMat, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|s| **s > tol * max.max(1.0)).count()
}

/// Euclidean residual of `A B_p` after least-squares fit in `V_(p+1)`.
fn grading_defect(a: &Endo, levels: &[CMat]) -> f64 {
    let mut worst = 0.0f64;
    for (p, b) in levels.iter().enumerate() {
        let image = a * b;
        let resid = match levels.get(p + 1) {
            Some(next) if next.ncols() > 0 => {
                let coeffs = least_squares(next, &image);
                image - next * coeffs
            }
            _ => image,
        };
        worst = worst.max(frobenius(&resid));
    }
    worst
}

fn least_squares(basis: &CMat, rhs: &CMat) -> CMat {
    let svd = SVD::new(basis.clone(), true, true);
    svd.solve(rhs, RANK_TOL)
        .unwrap_or_else(|_| CMat::zeros(basis.ncols(), rhs.ncols()))
}

fn orthogonality_defect(h: &HermitianForm, levels: &[CMat]) -> f64 {
    let mut worst = 0.0f64;
    for p in 0..levels.len() {
        for q in p + 1..levels.len() {
            let (bp, bq) = (&levels[p], &levels[q]);
            let cross = bp.adjoint() * h.matrix() * bq;
            for i in 0..bp.ncols() {
                for j in 0..bq.ncols() {
                    let np = h
                        .inner(&bp.column(i).into_owned(), &bp.column(i).into_owned())
                        .re;
                    let nq = h
                        .inner(&bq.column(j).into_owned(), &bq.column(j).into_owned())
                        .re;
                    worst = worst.max(cross[(i, j)].norm() / (np * nq).sqrt());
                }
            }
        }
    }
    worst
}

/// Orthonormal basis (Euclidean) for the null space of `m`, cutting singular
/// values at the absolute threshold `tol`.
fn null_space(m: &CMat, tol: f64) -> CMat {
    let n = m.ncols();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    // pad to square so the SVD returns a full right basis
    let padded = if m.nrows() < n {
        let mut p = CMat::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let cols: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= tol)
        .collect();
    let mut out = CMat::zeros(n, cols.len());
    for (c, &i) in cols.iter().enumerate() {
        out.set_column(c, &v_t.row(i).adjoint());
    }
    out
}

/// Orthonormal basis for the range of `m`, keeping the `want` leading
/// singular directions. The basis is built as `m v` from right singular
/// vectors, so it lies in the range even when the left singular vectors come
/// back inaccurate.
fn leading_range(m: &CMat, want: usize) -> CMat {
    if want == 0 || m.ncols() == 0 {
        return CMat::zeros(m.nrows(), 0);
    }
    let svd = SVD::new(m.clone(), false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let mut cols: Vec<crate::linalg::CVec> = Vec::with_capacity(want);
    for &i in order.iter().take(want) {
        let mut u = m * v_t.row(i).adjoint();
        for _ in 0..2 {
            for q in &cols {
                let c = q.dotc(&u);
                u -= q * c;
            }
        }
        let n = u.norm();
        if n > 0.0 {
            u /= Complex64::new(n, 0.0);
        }
        cols.push(u);
    }
    CMat::from_columns(&cols)
}

/// A Jordan chain `x, Ax, ..., A^(len-1) x`.
#[derive(Debug, Clone)]
struct Chain {
    start: crate::linalg::CVec,
    len: usize,
}

/// Jordan chains of a nilpotent `a` from the kernel filtration
/// `ker A ⊂ ker A^2 ⊂ ...`, choosing complements orthogonally for the metric
/// `metric` (chain starts of each length are orthonormal to everything
/// already accounted for at that height).
fn jordan_chains(a: &Endo, metric: &HermitianForm) -> Result<Vec<Chain>> {
    let r = a.nrows();
    let k = nilpotency_index(a).ok_or(Error::NotNilpotent)?;
    if r == 0 {
        return Ok(Vec::new());
    }
    // Work in coordinates y = L^H x where metric = L L^H, so the metric
    // becomes Euclidean.
    let l_h = cholesky_upper(metric);
    let l_h_inv = l_h.clone().try_inverse().ok_or(Error::SingularMetric)?;
    let b = &l_h * a * &l_h_inv;
    let a_norm = frobenius(&b);

    // kernels[s] = ker B^s for s = 0..=k+1
    let mut kernels = vec![CMat::zeros(r, 0)];
    let mut power = CMat::identity(r, r);
    for s in 1..=k + 1 {
        power = &power * &b;
        let ker = if s == k + 1 {
            CMat::identity(r, r)
        } else {
            null_space(&power, RANK_TOL * a_norm.powi(s as i32))
        };
        kernels.push(ker);
    }

    let mut chains: Vec<Chain> = Vec::new();
    for s in (1..=k + 1).rev() {
        let mut spanning: Vec<CMat> = vec![kernels[s - 1].clone()];
        for ch in &chains {
            let mut v = ch.start.clone();
            for _ in 0..ch.len - s {
                v = &b * v;
            }
            spanning.push(CMat::from_columns(&[v]));
        }
        let w = normalize_columns(hstack(&spanning, r));
        let w_rank = numerical_rank(&w, RANK_TOL);
        let w_basis = leading_range(&w, w_rank);
        let ks = &kernels[s];
        let residual = ks - &w_basis * (w_basis.adjoint() * ks);
        let new = ks.ncols().saturating_sub(w_rank);
        let starts = leading_range(&residual, new);
        for c in starts.column_iter() {
            chains.push(Chain {
                start: c.into_owned(),
                len: s,
            });
        }
    }
    // back to original coordinates
    Ok(chains
        .into_iter()
        .map(|ch| Chain {
            start: &l_h_inv * ch.start,
            len: ch.len,
        })
        .collect())
}

fn cholesky_upper(h: &HermitianForm) -> CMat {
    // h = L L^H; nalgebra's complex Cholesky is fine once positivity is known
    let chol = nalgebra::Cholesky::new(h.matrix().clone()).expect("metric already checked");
    chol.l().adjoint()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Anchor {
    /// Chain starts sit at level 0.
    Start,
    /// Chain ends sit at level k.
    End,
}

fn levels_from_chains(a: &Endo, chains: &[Chain], k: usize, anchor: Anchor) -> Vec<CMat> {
    let r = a.nrows();
    let mut cols: Vec<Vec<crate::linalg::CVec>> = vec![Vec::new(); k + 1];
    for ch in chains {
        let offset = match anchor {
            Anchor::Start => 0,
            Anchor::End => k + 1 - ch.len,
        };
        let mut v = ch.start.clone();
        for j in 0..ch.len {
            cols[offset + j].push(v.clone());
            v = a * v;
        }
    }
    cols.into_iter()
        .map(|c| {
            if c.is_empty() {
                CMat::zeros(r, 0)
            } else {
                CMat::from_columns(&c)
            }
        })
        .collect()
}

/// Grading from the Jordan chains of `a`: member `A^j x` of each chain sits at
/// level `j`, so the longest chain spans levels `0..=k`. Complements are
/// chosen Euclidean-orthogonally; `h` only enters the orthogonality flag.
pub fn jordan_grading(a: &Endo, h: &HermitianForm) -> Result<GradedNilpotent> {
    let k = nilpotency_index(a).ok_or(Error::NotNilpotent)?;
    let chains = jordan_chains(a, &HermitianForm::identity(a.nrows()))?;
    let levels = levels_from_chains(a, &chains, k, Anchor::Start);
    GradedNilpotent::from_levels(a.clone(), h.clone(), levels)
}

/// Looks for a grading that is both strict and `h`-orthogonal: Jordan chains
/// chosen `h`-orthogonally, levels anchored at the chain start or end, then
/// Gram-Schmidt across levels bottom-up or top-down. The first candidate
/// that is still strictly graded wins.
pub fn orthogonal_strict_grading(a: &Endo, h: &HermitianForm) -> Result<GradedNilpotent> {
    let k = nilpotency_index(a).ok_or(Error::NotNilpotent)?;
    let chains = jordan_chains(a, h)?;
    let mut best_defect = f64::INFINITY;
    for anchor in [Anchor::Start, Anchor::End] {
        let raw = levels_from_chains(a, &chains, k, anchor);
        for top_down in [false, true] {
            let levels = orthogonalize_levels(&raw, h, top_down);
            if levels.iter().any(|l| l.ncols() == 0) && levels.len() > 1 {
                continue;
            }
            let g = GradedNilpotent::from_levels(a.clone(), h.clone(), levels)?;
            if g.is_strictly_graded && g.is_h_orthogonal {
                return Ok(g);
            }
            best_defect = best_defect.min(g.grading_defect);
        }
    }
    Err(Error::NotRepresentable {
        defect: best_defect,
    })
}

/// Successive `h`-orthogonal complements of the levels, each made
/// `h`-orthonormal.
fn orthogonalize_levels(levels: &[CMat], h: &HermitianForm, top_down: bool) -> Vec<CMat> {
    let r = h.rank();
    let n = levels.len();
    let order: Vec<usize> = if top_down {
        (0..n).rev().collect()
    } else {
        (0..n).collect()
    };
    let mut done: Vec<crate::linalg::CVec> = Vec::new();
    let mut out = vec![CMat::zeros(r, 0); n];
    for p in order {
        let mut cols = Vec::new();
        for c in levels[p].column_iter() {
            let mut v = c.into_owned();
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for q in done.iter().chain(cols.iter()) {
                    let coeff = h.inner(&v, q);
                    v -= q * coeff;
                }
            }
            let n = h.inner(&v, &v).re.sqrt();
            if n > RANK_TOL {
                cols.push(v / Complex64::new(n, 0.0));
            }
        }
        done.extend(cols.iter().cloned());
        out[p] = if cols.is_empty() {
            CMat::zeros(r, 0)
        } else {
            CMat::from_columns(&cols)
        };
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceProfile {
    /// `a_0, ..., a_(k-1)`.
    pub a: Vec<f64>,
    /// Set when the grading is not `h`-orthogonal, so the traces are the
    /// intrinsic Gram-corrected ones rather than a true norm splitting.
    pub non_orthogonal: bool,
}

impl TraceProfile {
    pub fn sum(&self) -> f64 {
        self.a.iter().sum()
    }

    /// `a_p` with `a_(-1) = a_k = 0`.
    pub fn at(&self, p: isize) -> f64 {
        if p < 0 {
            0.0
        } else {
            self.a.get(p as usize).copied().unwrap_or(0.0)
        }
    }
}

/// `a_p = Tr(A_p* A_p)` with adjoints taken for the metrics `h|V_p`,
/// `h|V_(p+1)`: `Tr(G_p^-1 M_p^H G_(p+1) M_p)` where `A B_p = B_(p+1) M_p`.
pub fn trace_profile(g: &GradedNilpotent) -> TraceProfile {
    let k = g.k();
    let grams: Vec<CMat> = g.levels.iter().map(|b| g.h.gram(b)).collect();
    let a = (0..k)
        .map(|p| {
            let (bp, bq) = (&g.levels[p], &g.levels[p + 1]);
            if bp.ncols() == 0 || bq.ncols() == 0 {
                return 0.0;
            }
            let mp = least_squares(bq, &(&g.a * bp));
            let gp_inv = grams[p]
                .clone()
                .try_inverse()
                .unwrap_or_else(|| grams[p].clone());
            (gp_inv * mp.adjoint() * &grams[p + 1] * &mp)
                .trace()
                .re
                .max(0.0)
        })
        .collect();
    TraceProfile {
        a,
        non_orthogonal: !g.is_h_orthogonal,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub rank: usize,
    pub k: usize,
    pub traces: Vec<f64>,
    /// `||[A*, A]||` in the `h`-weighted Hilbert-Schmidt norm.
    pub lhs: f64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    /// `lhs - m1`, `m1 - m2`, `m2 - m3`.
    pub margins: [f64; 3],
    /// True when the grading is strict and `h`-orthogonal.
    pub asserted: bool,
    pub holds: bool,
}

impl ChainReport {
    pub fn min_margin(&self) -> f64 {
        self.margins.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

pub fn commutator_chain_check(g: &GradedNilpotent) -> ChainReport {
    let profile = trace_profile(g);
    let r = g.rank();
    let k = g.k();
    let sqrt_r = (r as f64).sqrt();
    let a_adj = h_adjoint(&g.a, &g.h);
    let lhs = end_norm(&commutator(&a_adj, &g.a), &g.h);
    let jumps: f64 = (0..=k as isize)
        .map(|p| (profile.at(p) - profile.at(p - 1)).abs())
        .sum();
    let m1 = jumps / sqrt_r;
    let m2 = profile.a.iter().cloned().fold(0.0, f64::max) / sqrt_r;
    let m3 = if k == 0 {
        0.0
    } else {
        profile.sum() / (k as f64 * sqrt_r)
    };
    let margins = [lhs - m1, m1 - m2, m2 - m3];
    ChainReport {
        rank: r,
        k,
        traces: profile.a,
        lhs,
        m1,
        m2,
        m3,
        margins,
        asserted: g.is_strictly_graded && g.is_h_orthogonal,
        holds: margins.iter().all(|m| *m >= -CHAIN_SLACK),
    }
}

/// `-(sum_p a_p)^2 / (k^2 r)`, the resulting upper bound for the diagonal
/// curvature `(Theta_{j jbar} d_j, d_j)` when `A = theta_j`.
pub fn hsc_bound_from_traces(g: &GradedNilpotent) -> f64 {
    let k = g.k();
    if k == 0 {
        return 0.0;
    }
    let s = trace_profile(g).sum();
    -(s * s) / ((k * k * g.rank()) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{end_inner, unit};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn span_contains(basis: &CMat, v: &CMat) -> bool {
        let coeffs = least_squares(basis, v);
        frobenius(&(v - basis * coeffs)) < 1e-12
    }

    #[test]
    fn zero_has_a_single_level() {
        let g = jordan_grading(&CMat::zeros(3, 3), &HermitianForm::identity(3)).unwrap();
        assert_eq!(g.level_dims(), vec![3]);
        assert!(g.is_strictly_graded);
        assert!(trace_profile(&g).a.is_empty());
    }

    #[test]
    fn shift_block_levels() {
        // A e2 = e1
        let a = unit(2, 0, 1);
        let g = jordan_grading(&a, &HermitianForm::identity(2)).unwrap();
        assert_eq!(g.level_dims(), vec![1, 1]);
        assert!(span_contains(
            &g.levels[0],
            &CMat::from_column_slice(2, 1, &[c(0.0), c(1.0)])
        ));
        assert!(span_contains(
            &g.levels[1],
            &CMat::from_column_slice(2, 1, &[c(1.0), c(0.0)])
        ));
        assert!(g.is_strictly_graded && g.is_h_orthogonal);
    }

    #[test]
    fn shift_plus_zero_block() {
        let a = unit(3, 0, 1);
        let g = jordan_grading(&a, &HermitianForm::identity(3)).unwrap();
        assert_eq!(g.level_dims(), vec![2, 1]);
        let e = |i: usize| CMat::from_fn(3, 1, |r, _| c(if r == i { 1.0 } else { 0.0 }));
        assert!(span_contains(&g.levels[0], &e(1)));
        assert!(span_contains(&g.levels[0], &e(2)));
        assert!(span_contains(&g.levels[1], &e(0)));
        assert!(g.is_strictly_graded);
    }

    #[test]
    fn identity_is_not_nilpotent() {
        let r = jordan_grading(&CMat::identity(2, 2), &HermitianForm::identity(2));
        assert!(matches!(r, Err(Error::NotNilpotent)));
    }

    #[test]
    fn shift_block_equality_case() {
        let g = orthogonal_strict_grading(&unit(2, 0, 1), &HermitianForm::identity(2)).unwrap();
        let rep = commutator_chain_check(&g);
        assert!(rep.asserted && rep.holds);
        assert!((rep.lhs - 2f64.sqrt()).abs() < 1e-12);
        assert!((rep.m1 - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn block_diagonal_metric() {
        // two independent shift blocks, h block-diagonal
        let a = unit(4, 0, 1) + unit(4, 2, 3).scale(3.0);
        let mut h = CMat::identity(4, 4);
        h[(0, 0)] = c(2.0);
        h[(0, 1)] = Complex64::new(0.3, 0.4);
        h[(1, 0)] = Complex64::new(0.3, -0.4);
        h[(2, 2)] = c(0.5);
        let h = HermitianForm::new(h).unwrap();
        let g = orthogonal_strict_grading(&a, &h).unwrap();
        let rep = commutator_chain_check(&g);
        assert!(rep.asserted && rep.holds, "{rep:?}");
        let s = trace_profile(&g).sum();
        assert!((s - end_inner(&a, &a, &h).re).abs() < 1e-10);
    }

    #[test]
    fn sum_of_traces_at_uniformizing_point() {
        // theta = e12 / 2 with h = identity (y = 1)
        let a = unit(2, 0, 1).scale(0.5);
        let g = orthogonal_strict_grading(&a, &HermitianForm::identity(2)).unwrap();
        let prof = trace_profile(&g);
        assert!((prof.a[0] - 0.25).abs() < 1e-15);
        assert!((hsc_bound_from_traces(&g) + 1.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn zero_traces() {
        let g = jordan_grading(&CMat::zeros(2, 2), &HermitianForm::identity(2)).unwrap();
        let rep = commutator_chain_check(&g);
        assert_eq!((rep.lhs, rep.m1, rep.m2, rep.m3), (0.0, 0.0, 0.0, 0.0));
        assert!(rep.holds);
        assert_eq!(hsc_bound_from_traces(&g), 0.0);
    }

    #[test]
    fn sym2_grading() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a = (unit(3, 0, 1) + unit(3, 1, 2)).scale(s);
        let h = HermitianForm::new(CMat::from_diagonal(&crate::linalg::CVec::from_vec(vec![
            c(1.0 / 4.0),
            c(1.0),
            c(4.0),
        ])))
        .unwrap();
        let g = orthogonal_strict_grading(&a, &h).unwrap();
        assert_eq!(g.level_dims(), vec![1, 1, 1]);
        let prof = trace_profile(&g);
        assert!((prof.sum() - end_inner(&a, &a, &h).re).abs() < 1e-12);
        assert!(commutator_chain_check(&g).holds);
    }

    #[test]
    fn mismatched_levels_are_rejected() {
        let a = unit(2, 0, 1);
        let r = GradedNilpotent::from_levels(
            a.clone(),
            HermitianForm::identity(2),
            vec![CMat::identity(2, 2).columns(0, 1).into_owned()],
        );
        assert!(r.is_err());
        let col = CMat::from_column_slice(2, 1, &[c(1.0), c(0.0)]);
        let r = GradedNilpotent::from_levels(a, HermitianForm::identity(2), vec![col.clone(), col]);
        assert!(r.is_err());
    }
}
