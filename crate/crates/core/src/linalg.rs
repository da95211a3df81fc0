//! Dense complex kernels for a fibre `H` carrying a Hermitian form `h`.
//!
//! Vectors are columns and `<x, y>_h = y^H h x`. Endomorphisms act on columns,
//! so the `h`-adjoint is `A* = h^-1 A^H h`, and `End(H) = H (x) H*` carries the
//! inner product `(A, B) = Tr(A B*)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;
/// An element of `End(H)` in the coordinate frame.
pub type Endo = CMat;

/// Condition number above which a Gram matrix is treated as singular.
pub const GRAM_CONDITION_LIMIT: f64 = 1e12;
/// Relative threshold for numerically vanishing powers.
pub const NILPOTENT_TOL: f64 = 1e-9;

/// A positive definite Hermitian matrix together with its inverse.
#[derive(Debug, Clone)]
pub struct HermitianForm {
    h: CMat,
    h_inv: CMat,
}

impl HermitianForm {
    /// Symmetrizes `h <- (h + h^H)/2` and checks positivity by Cholesky.
    pub fn new(h: CMat) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::Shape(format!(
                "metric is {}x{}, expected square",
                h.nrows(),
                h.ncols()
            )));
        }
        let h = (&h + h.adjoint()).scale(0.5);
        if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::SingularMetric);
        }
        let lower = cholesky_lower(&h).ok_or(Error::SingularMetric)?;
        let l_inv = lower
            .solve_lower_triangular(&CMat::identity(h.nrows(), h.nrows()))
            .ok_or(Error::SingularMetric)?;
        let h_inv = l_inv.adjoint() * &l_inv;
        Ok(HermitianForm { h, h_inv })
    }

    pub fn identity(r: usize) -> Self {
        HermitianForm {
            h: CMat::identity(r, r),
            h_inv: CMat::identity(r, r),
        }
    }

    pub fn rank(&self) -> usize {
        self.h.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.h
    }

    pub fn inverse(&self) -> &CMat {
        &self.h_inv
    }

    /// `<x, y>_h = y^H h x`, linear in `x`.
    pub fn inner(&self, x: &CVec, y: &CVec) -> Complex64 {
        (y.adjoint() * &self.h * x)[(0, 0)]
    }

    /// Gram matrix `B^H h B` of the columns of `basis`.
    pub fn gram(&self, basis: &CMat) -> CMat {
        basis.adjoint() * &self.h * basis
    }
}

/// Lower factor `L` with `h = L L^H`; `None` unless every pivot is positive.
/// nalgebra's complex Cholesky takes complex square roots of the pivots and
/// so accepts indefinite input.
fn cholesky_lower(h: &CMat) -> Option<CMat> {
    let r = h.nrows();
    let mut l = CMat::zeros(r, r);
    for j in 0..r {
        let mut pivot = h[(j, j)].re;
        for k in 0..j {
            pivot -= l[(j, k)].norm_sqr();
        }
        if !(pivot > 0.0) {
            return None;
        }
        let d = pivot.sqrt();
        l[(j, j)] = Complex64::new(d, 0.0);
        for i in j + 1..r {
            let mut s = h[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

pub fn h_adjoint(a: &Endo, h: &HermitianForm) -> Endo {
    h.inverse() * a.adjoint() * h.matrix()
}

/// `(A, B) = Tr(A B*)`: linear in `A`, conjugate-linear in `B`.
pub fn end_inner(a: &Endo, b: &Endo, h: &HermitianForm) -> Complex64 {
    (a * h_adjoint(b, h)).trace()
}

/// Norm induced by [`end_inner`].
pub fn end_norm(a: &Endo, h: &HermitianForm) -> f64 {
    end_inner(a, a, h).re.max(0.0).sqrt()
}

pub fn commutator(a: &Endo, b: &Endo) -> Endo {
    a * b - b * a
}

pub fn frobenius(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Gram matrix `G[a][b] = (basis_a, basis_b)` under [`end_inner`].
pub fn end_gram(basis: &[Endo], h: &HermitianForm) -> CMat {
    let n = basis.len();
    let adj: Vec<Endo> = basis.iter().map(|b| h_adjoint(b, h)).collect();
    CMat::from_fn(n, n, |a, b| (&basis[a] * &adj[b]).trace())
}

/// Ratio of extreme eigenvalues of a Hermitian positive semidefinite matrix;
/// infinite when the smallest eigenvalue is not positive.
pub fn hermitian_condition(g: &CMat) -> f64 {
    if g.nrows() == 0 {
        return 1.0;
    }
    let sym = (g + g.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym).eigenvalues;
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) || !(max > 0.0) {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Orthogonal projection of `a` onto the complement of `span(basis)` in `End(H)`.
///
/// Fails with [`Error::DegenerateGram`] when the basis is numerically
/// dependent, which for the Higgs field means the bundle is not admissible.
pub fn gram_project_complement(a: &Endo, basis: &[Endo], h: &HermitianForm) -> Result<Endo> {
    let projector = ComplementProjector::new(basis, h)?;
    Ok(projector.apply(a))
}

/// Reusable form of [`gram_project_complement`] for a fixed basis.
#[derive(Debug, Clone)]
pub struct ComplementProjector<'a> {
    basis: &'a [Endo],
    adjoints: Vec<Endo>,
    gram_t_inv: CMat,
    pub condition: f64,
}

impl<'a> ComplementProjector<'a> {
    pub fn new(basis: &'a [Endo], h: &HermitianForm) -> Result<Self> {
        let gram = end_gram(basis, h);
        let condition = hermitian_condition(&gram);
        if condition > GRAM_CONDITION_LIMIT {
            return Err(Error::DegenerateGram { condition });
        }
        // Orthogonality against basis_a: sum_b c_b G[b][a] = (A, basis_a).
        let gram_t_inv = gram
            .transpose()
            .try_inverse()
            .ok_or(Error::DegenerateGram { condition })?;
        Ok(ComplementProjector {
            basis,
            adjoints: basis.iter().map(|b| h_adjoint(b, h)).collect(),
            gram_t_inv,
            condition,
        })
    }

    pub fn apply(&self, a: &Endo) -> Endo {
        if self.basis.is_empty() {
            return a.clone();
        }
        let rhs = CVec::from_iterator(
            self.basis.len(),
            self.adjoints.iter().map(|adj| (a * adj).trace()),
        );
        let coeffs = &self.gram_t_inv * rhs;
        let mut out = a.clone();
        for (c, b) in coeffs.iter().zip(self.basis) {
            out -= b * *c;
        }
        out
    }
}

/// Smallest `k` with `A^(k+1)` numerically zero, or `None` when `A^r` is not.
///
/// Zero means `||A^(k+1)|| <= 1e-9 * max(1, ||A||^(k+1))` in Frobenius norm.
pub fn nilpotency_index(a: &Endo) -> Option<usize> {
    let r = a.nrows();
    if r == 0 {
        return Some(0);
    }
    let norm = frobenius(a);
    let mut power = a.clone();
    for k in 0..r {
        let scale = norm.powi(k as i32 + 1).max(1.0);
        if frobenius(&power) <= NILPOTENT_TOL * scale {
            return Some(k);
        }
        power = &power * a;
    }
    None
}

/// Matrix unit `e_(row, col)` (zero-based) in dimension `r`.
pub fn unit(r: usize, row: usize, col: usize) -> Endo {
    let mut m = CMat::zeros(r, r);
    m[(row, col)] = Complex64::new(1.0, 0.0);
    m
}
