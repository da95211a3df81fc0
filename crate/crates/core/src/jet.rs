//! Matrices of expressions and their second-order Wirtinger jets.
//!
//! A [`MatJet`] stores a matrix value together with all first derivatives
//! `d_j`, `dbar_j` and the mixed second derivatives `d_j dbar_k` at one point.
//! Leaf jets come from exact symbolic derivatives; products, inverses and
//! adjoints propagate them exactly, so derived quantities such as the Hodge
//! metric get exact derivatives without building symbolic inverses.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::ScalarExpr;
use crate::linalg::CMat;

/// Dense matrix of [`ScalarExpr`], row-major.
#[derive(Debug, Clone)]
pub struct ExprMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<ScalarExpr>,
}

impl ExprMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<ScalarExpr>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(ExprMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> ScalarExpr,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        ExprMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| ScalarExpr::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                ScalarExpr::one()
            } else {
                ScalarExpr::zero()
            }
        })
    }

    pub fn diagonal(diag: Vec<ScalarExpr>) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                diag[i].clone()
            } else {
                ScalarExpr::zero()
            }
        })
    }

    /// Constant matrix.
    pub fn from_constant(m: &CMat) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| ScalarExpr::constant(m[(i, j)]))
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &ScalarExpr {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &ScalarExpr)> {
        self.entries
            .iter()
            .enumerate()
            .map(move |(n, e)| (n / self.cols, n % self.cols, e))
    }

    pub fn map(&self, f: impl Fn(&ScalarExpr) -> ScalarExpr) -> Self {
        ExprMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn eval(&self, t: &[Complex64]) -> Result<CMat> {
        let mut m = CMat::zeros(self.rows, self.cols);
        for (i, j, e) in self.entries() {
            m[(i, j)] = e.eval(t)?;
        }
        Ok(m)
    }

    pub fn d(&self, j: usize) -> Self {
        self.map(|e| e.d(j))
    }

    pub fn dbar(&self, j: usize) -> Self {
        self.map(|e| e.dbar(j))
    }

    /// Entrywise conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn is_holomorphic(&self) -> bool {
        self.entries.iter().all(ScalarExpr::is_holomorphic)
    }

    pub fn max_coord(&self) -> Option<usize> {
        self.entries.iter().filter_map(ScalarExpr::max_coord).max()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j).add(rhs.get(i, j))
        })
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(ScalarExpr::zero(), |acc, k| {
                acc.add(&self.get(i, k).mul(rhs.get(k, j)))
            })
        })
    }

    pub fn scale(&self, c: &ScalarExpr) -> Self {
        self.map(|e| e.mul(c))
    }

    /// Row-major strings in the expression grammar.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect())
            .collect()
    }
}

/// Precomputed symbolic derivatives of an [`ExprMatrix`] up to the mixed
/// second order, over `m` base coordinates.
#[derive(Debug, Clone)]
pub struct ExprJet {
    pub value: ExprMatrix,
    pub d: Vec<ExprMatrix>,
    pub dbar: Vec<ExprMatrix>,
    /// `dd[j][k] = d_j dbar_k`.
    pub dd: Vec<Vec<ExprMatrix>>,
}

impl ExprJet {
    pub fn new(value: ExprMatrix, m: usize) -> Self {
        let d: Vec<ExprMatrix> = (0..m).map(|j| value.d(j)).collect();
        let dbar: Vec<ExprMatrix> = (0..m).map(|k| value.dbar(k)).collect();
        let dd = (0..m)
            .map(|j| (0..m).map(|k| dbar[k].d(j)).collect())
            .collect();
        ExprJet { value, d, dbar, dd }
    }

    pub fn eval(&self, t: &[Complex64]) -> Result<MatJet> {
        let eval_all = |v: &[ExprMatrix]| v.iter().map(|e| e.eval(t)).collect::<Result<Vec<_>>>();
        Ok(MatJet {
            val: self.value.eval(t)?,
            d: eval_all(&self.d)?,
            dbar: eval_all(&self.dbar)?,
            dd: self
                .dd
                .iter()
                .map(|row| eval_all(row))
                .collect::<Result<_>>()?,
        })
    }
}

#[derive(Debug, Clone)]
pub struct MatJet {
    pub val: CMat,
    pub d: Vec<CMat>,
    pub dbar: Vec<CMat>,
    pub dd: Vec<Vec<CMat>>,
}

impl MatJet {
    pub fn base_dim(&self) -> usize {
        self.d.len()
    }

    pub fn constant(val: CMat, m: usize) -> Self {
        let z = CMat::zeros(val.nrows(), val.ncols());
        MatJet {
            d: vec![z.clone(); m],
            dbar: vec![z.clone(); m],
            dd: vec![vec![z; m]; m],
            val,
        }
    }

    fn map(&self, f: impl Fn(&CMat) -> CMat) -> Self {
        MatJet {
            val: f(&self.val),
            d: self.d.iter().map(&f).collect(),
            dbar: self.dbar.iter().map(&f).collect(),
            dd: self.dd.iter().map(|r| r.iter().map(&f).collect()).collect(),
        }
    }

    pub fn mul(&self, rhs: &MatJet) -> MatJet {
        let m = self.base_dim();
        let d = (0..m)
            .map(|j| &self.d[j] * &rhs.val + &self.val * &rhs.d[j])
            .collect();
        let dbar = (0..m)
            .map(|k| &self.dbar[k] * &rhs.val + &self.val * &rhs.dbar[k])
            .collect();
        let dd = (0..m)
            .map(|j| {
                (0..m)
                    .map(|k| {
                        &self.dd[j][k] * &rhs.val
                            + &self.d[j] * &rhs.dbar[k]
                            + &self.dbar[k] * &rhs.d[j]
                            + &self.val * &rhs.dd[j][k]
                    })
                    .collect()
            })
            .collect();
        MatJet {
            val: &self.val * &rhs.val,
            d,
            dbar,
            dd,
        }
    }

    /// Jet of the inverse, using `d(M^-1) = -M^-1 (dM) M^-1` with a numeric
    /// inverse at the point.
    pub fn inverse(&self) -> Result<MatJet> {
        let m = self.base_dim();
        let inv = self
            .val
            .clone()
            .try_inverse()
            .ok_or(Error::SingularMetric)?;
        let d: Vec<CMat> = (0..m).map(|j| -(&inv * &self.d[j] * &inv)).collect();
        let dbar: Vec<CMat> = (0..m).map(|k| -(&inv * &self.dbar[k] * &inv)).collect();
        let dd = (0..m)
            .map(|j| {
                (0..m)
                    .map(|k| {
                        &inv * &self.dbar[k] * &inv * &self.d[j] * &inv
                            + &inv * &self.d[j] * &inv * &self.dbar[k] * &inv
                            - &inv * &self.dd[j][k] * &inv
                    })
                    .collect()
            })
            .collect();
        Ok(MatJet {
            val: inv,
            d,
            dbar,
            dd,
        })
    }

    /// Conjugate transpose. Conjugation swaps holomorphic and antiholomorphic
    /// derivatives: `d_j (M^H) = (dbar_j M)^H`.
    pub fn adjoint(&self) -> MatJet {
        let m = self.base_dim();
        MatJet {
            val: self.val.adjoint(),
            d: self.dbar.iter().map(|x| x.adjoint()).collect(),
            dbar: self.d.iter().map(|x| x.adjoint()).collect(),
            dd: (0..m)
                .map(|j| (0..m).map(|k| self.dd[k][j].adjoint()).collect())
                .collect(),
        }
    }

    pub fn transpose(&self) -> MatJet {
        self.map(|x| x.transpose())
    }

    /// Trace as a 1x1 jet.
    pub fn trace(&self) -> MatJet {
        self.map(|x| CMat::from_element(1, 1, x.trace()))
    }

    /// Assembles a matrix jet from a grid of 1x1 jets.
    pub fn from_scalars(rows: usize, cols: usize, scalars: &[MatJet], m: usize) -> MatJet {
        let pick = |f: &dyn Fn(&MatJet) -> Complex64| {
            CMat::from_fn(rows, cols, |i, j| f(&scalars[i * cols + j]))
        };
        MatJet {
            val: pick(&|s| s.val[(0, 0)]),
            d: (0..m).map(|a| pick(&|s| s.d[a][(0, 0)])).collect(),
            dbar: (0..m).map(|a| pick(&|s| s.dbar[a][(0, 0)])).collect(),
            dd: (0..m)
                .map(|a| (0..m).map(|b| pick(&|s| s.dd[a][b][(0, 0)])).collect())
                .collect(),
        }
    }
}
