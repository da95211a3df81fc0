//! Closed-form scalar expressions in the chart coordinates `t1..tm` and their
//! conjugates, with exact Wirtinger derivatives.
//!
//! Trees are immutable and reference counted, so subtrees are shared freely
//! between an expression and its derivatives. Construction applies only local
//! rules (constant folding, absorption of 0 and 1); there is no canonical form.

use std::fmt;
use std::ops;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Which Wirtinger derivative to take: `d/dt^j` or `d/d(conj t^j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Holomorphic,
    Antiholomorphic,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Holomorphic => Direction::Antiholomorphic,
            Direction::Antiholomorphic => Direction::Holomorphic,
        }
    }
}

#[derive(Debug)]
pub enum Node {
    Const(Complex64),
    /// `t^j`, zero-based index.
    Coord(usize),
    /// `conj(t^j)`, zero-based index.
    ConjCoord(usize),
    Neg(ScalarExpr),
    Add(ScalarExpr, ScalarExpr),
    Sub(ScalarExpr, ScalarExpr),
    Mul(ScalarExpr, ScalarExpr),
    Div(ScalarExpr, ScalarExpr),
    Pow(ScalarExpr, i32),
    Conj(ScalarExpr),
}

#[derive(Debug, Clone)]
pub struct ScalarExpr(Arc<Node>);

impl ScalarExpr {
    fn node(node: Node) -> Self {
        ScalarExpr(Arc::new(node))
    }

    pub fn kind(&self) -> &Node {
        &self.0
    }

    pub fn constant(c: impl Into<Complex64>) -> Self {
        Self::node(Node::Const(c.into()))
    }

    pub fn real(x: f64) -> Self {
        Self::constant(Complex64::new(x, 0.0))
    }

    pub fn zero() -> Self {
        Self::real(0.0)
    }

    pub fn one() -> Self {
        Self::real(1.0)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::constant(Complex64::i())
    }

    /// The coordinate `t^(j+1)`; `j` is zero-based.
    pub fn coord(j: usize) -> Self {
        Self::node(Node::Coord(j))
    }

    pub fn conj_coord(j: usize) -> Self {
        Self::node(Node::ConjCoord(j))
    }

    /// `Im t^(j+1) = (t - conj t) / 2i`.
    pub fn im_coord(j: usize) -> Self {
        (Self::coord(j) - Self::conj_coord(j)) / Self::constant(Complex64::new(0.0, 2.0))
    }

    /// `Re t^(j+1) = (t + conj t) / 2`.
    pub fn re_coord(j: usize) -> Self {
        (Self::coord(j) + Self::conj_coord(j)) / Self::real(2.0)
    }

    pub fn as_const(&self) -> Option<Complex64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(Complex64::new(0.0, 0.0))
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(Complex64::new(1.0, 0.0))
    }

    pub fn neg(&self) -> Self {
        match self.kind() {
            Node::Const(c) => Self::constant(-c),
            Node::Neg(inner) => inner.clone(),
            _ => Self::node(Node::Neg(self.clone())),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Self::constant(a + b),
            _ if self.is_zero() => rhs.clone(),
            _ if rhs.is_zero() => self.clone(),
            _ => Self::node(Node::Add(self.clone(), rhs.clone())),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Self::constant(a - b),
            _ if rhs.is_zero() => self.clone(),
            _ if self.is_zero() => rhs.neg(),
            _ => Self::node(Node::Sub(self.clone(), rhs.clone())),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Self::constant(a * b),
            _ if self.is_zero() || rhs.is_zero() => Self::zero(),
            _ if self.is_one() => rhs.clone(),
            _ if rhs.is_one() => self.clone(),
            _ => Self::node(Node::Mul(self.clone(), rhs.clone())),
        }
    }

    pub fn div(&self, rhs: &Self) -> Self {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) if b != Complex64::new(0.0, 0.0) => Self::constant(a / b),
            _ if self.is_zero() && !rhs.is_zero() => Self::zero(),
            _ if rhs.is_one() => self.clone(),
            _ => Self::node(Node::Div(self.clone(), rhs.clone())),
        }
    }

    pub fn powi(&self, n: i32) -> Self {
        match n {
            0 => return Self::one(),
            1 => return self.clone(),
            _ => {}
        }
        match self.as_const() {
            Some(c) if n > 0 || c != Complex64::new(0.0, 0.0) => Self::constant(int_pow(c, n)),
            _ => Self::node(Node::Pow(self.clone(), n)),
        }
    }

    pub fn conj(&self) -> Self {
        match self.kind() {
            Node::Const(c) => Self::constant(c.conj()),
            Node::Coord(j) => Self::conj_coord(*j),
            Node::ConjCoord(j) => Self::coord(*j),
            Node::Conj(inner) => inner.clone(),
            _ => Self::node(Node::Conj(self.clone())),
        }
    }

    /// True when the tree contains no conjugation and no `conj(t)` leaf, which
    /// makes every antiholomorphic derivative vanish identically.
    pub fn is_holomorphic(&self) -> bool {
        match self.kind() {
            Node::Const(_) | Node::Coord(_) => true,
            Node::ConjCoord(_) | Node::Conj(_) => false,
            Node::Neg(a) | Node::Pow(a, _) => a.is_holomorphic(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.is_holomorphic() && b.is_holomorphic()
            }
        }
    }

    /// Largest zero-based coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        match self.kind() {
            Node::Const(_) => None,
            Node::Coord(j) | Node::ConjCoord(j) => Some(*j),
            Node::Neg(a) | Node::Pow(a, _) | Node::Conj(a) => a.max_coord(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.max_coord().max(b.max_coord())
            }
        }
    }

    /// Number of nodes, counting shared subtrees once per occurrence.
    pub fn size(&self) -> usize {
        match self.kind() {
            Node::Const(_) | Node::Coord(_) | Node::ConjCoord(_) => 1,
            Node::Neg(a) | Node::Pow(a, _) | Node::Conj(a) => 1 + a.size(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    pub fn eval(&self, t: &[Complex64]) -> Result<Complex64> {
        Ok(match self.kind() {
            Node::Const(c) => *c,
            Node::Coord(j) => *t.get(*j).ok_or(Error::Dimension {
                index: j + 1,
                dim: t.len(),
            })?,
            Node::ConjCoord(j) => t
                .get(*j)
                .ok_or(Error::Dimension {
                    index: j + 1,
                    dim: t.len(),
                })?
                .conj(),
            Node::Neg(a) => -a.eval(t)?,
            Node::Add(a, b) => a.eval(t)? + b.eval(t)?,
            Node::Sub(a, b) => a.eval(t)? - b.eval(t)?,
            Node::Mul(a, b) => a.eval(t)? * b.eval(t)?,
            Node::Div(a, b) => {
                let den = b.eval(t)?;
                if den == Complex64::new(0.0, 0.0) {
                    return Err(Error::SingularEval(self.to_string()));
                }
                a.eval(t)? / den
            }
            Node::Pow(a, n) => {
                let base = a.eval(t)?;
                if *n < 0 && base == Complex64::new(0.0, 0.0) {
                    return Err(Error::SingularEval(self.to_string()));
                }
                int_pow(base, *n)
            }
            Node::Conj(a) => a.eval(t)?.conj(),
        })
    }

    /// Exact Wirtinger derivative with respect to coordinate `j` (zero-based).
    pub fn wirtinger(&self, j: usize, dir: Direction) -> Self {
        if dir == Direction::Antiholomorphic && self.is_holomorphic() {
            return Self::zero();
        }
        match self.kind() {
            Node::Const(_) => Self::zero(),
            Node::Coord(k) => delta(*k == j && dir == Direction::Holomorphic),
            Node::ConjCoord(k) => delta(*k == j && dir == Direction::Antiholomorphic),
            Node::Neg(a) => a.wirtinger(j, dir).neg(),
            Node::Add(a, b) => a.wirtinger(j, dir).add(&b.wirtinger(j, dir)),
            Node::Sub(a, b) => a.wirtinger(j, dir).sub(&b.wirtinger(j, dir)),
            Node::Mul(a, b) => {
                let da = a.wirtinger(j, dir);
                let db = b.wirtinger(j, dir);
                da.mul(b).add(&a.mul(&db))
            }
            Node::Div(a, b) => {
                let da = a.wirtinger(j, dir);
                let db = b.wirtinger(j, dir);
                if db.is_zero() {
                    da.div(b)
                } else {
                    da.mul(b).sub(&a.mul(&db)).div(&b.powi(2))
                }
            }
            Node::Pow(a, n) => {
                let da = a.wirtinger(j, dir);
                Self::real(f64::from(*n)).mul(&a.powi(n - 1)).mul(&da)
            }
            // d/dt conj(f) = conj(d/d(conj t) f) and symmetrically.
            Node::Conj(a) => a.wirtinger(j, dir.flip()).conj(),
        }
    }

    pub fn d(&self, j: usize) -> Self {
        self.wirtinger(j, Direction::Holomorphic)
    }

    pub fn dbar(&self, j: usize) -> Self {
        self.wirtinger(j, Direction::Antiholomorphic)
    }
}

fn delta(hit: bool) -> ScalarExpr {
    if hit {
        ScalarExpr::one()
    } else {
        ScalarExpr::zero()
    }
}

fn int_pow(z: Complex64, n: i32) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    let mut base = z;
    let mut e = n.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    if n < 0 {
        acc.inv()
    } else {
        acc
    }
}

fn write_real(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    if x.is_sign_negative() {
        write!(f, "(-{})", -x)
    } else {
        write!(f, "{x}")
    }
}

/// Fully parenthesised output accepted by [`crate::parse::parse_expr`].
impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            Node::Const(c) => {
                if c.im == 0.0 {
                    write_real(f, c.re)
                } else if c.re == 0.0 {
                    write!(f, "(")?;
                    write_real(f, c.im)?;
                    write!(f, "*i)")
                } else {
                    write!(f, "(")?;
                    write_real(f, c.re)?;
                    write!(f, " + ")?;
                    write_real(f, c.im)?;
                    write!(f, "*i)")
                }
            }
            Node::Coord(j) => write!(f, "t{}", j + 1),
            Node::ConjCoord(j) => write!(f, "conj(t{})", j + 1),
            Node::Neg(a) => write!(f, "(-{a})"),
            Node::Add(a, b) => write!(f, "({a} + {b})"),
            Node::Sub(a, b) => write!(f, "({a} - {b})"),
            Node::Mul(a, b) => write!(f, "({a}*{b})"),
            Node::Div(a, b) => write!(f, "({a}/{b})"),
            Node::Pow(a, n) => write!(f, "({a})^{n}"),
            Node::Conj(a) => write!(f, "conj({a})"),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident) => {
        impl ops::$tr for ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: ScalarExpr) -> ScalarExpr {
                ScalarExpr::$method(&self, &rhs)
            }
        }
        impl ops::$tr<&ScalarExpr> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: &ScalarExpr) -> ScalarExpr {
                ScalarExpr::$method(self, rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl ops::Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr::neg(&self)
    }
}

impl From<f64> for ScalarExpr {
    fn from(x: f64) -> Self {
        ScalarExpr::real(x)
    }
}

impl From<Complex64> for ScalarExpr {
    fn from(c: Complex64) -> Self {
        ScalarExpr::constant(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_evaluates_to_itself() {
        let e = ScalarExpr::constant(c(3.0, -1.0));
        assert_eq!(e.eval(&[c(0.3, 0.7)]).unwrap(), c(3.0, -1.0));
    }

    #[test]
    fn modulus_squared() {
        let t = ScalarExpr::coord(0);
        let e = &t * &t.conj();
        assert_eq!(e.eval(&[c(0.0, 2.0)]).unwrap(), c(4.0, 0.0));
    }

    #[test]
    fn imaginary_part() {
        let y = ScalarExpr::im_coord(0);
        let v = y.eval(&[c(1.25, -0.5)]).unwrap();
        assert!((v - c(-0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn power_rule() {
        let e = ScalarExpr::coord(0).powi(2);
        let d = e.d(0).eval(&[c(1.0, 1.0)]).unwrap();
        assert!((d - c(2.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn holomorphic_has_structurally_zero_dbar() {
        let t = ScalarExpr::coord(0);
        let e = (&t.powi(3) + &ScalarExpr::real(2.0)) / (&t + &ScalarExpr::i());
        assert!(e.dbar(0).is_zero());
    }

    #[test]
    fn double_conjugation_cancels() {
        let e = ScalarExpr::coord(0) * ScalarExpr::coord(1);
        let cc = e.conj().conj();
        assert!(Arc::ptr_eq(&e.0, &cc.0));
    }

    #[test]
    fn laplacian_of_inverse_imaginary_part() {
        // d dbar (1/y) = 1/(2 y^3)
        let e = ScalarExpr::im_coord(0).powi(-1);
        let v = e.dbar(0).d(0).eval(&[c(0.0, 1.0)]).unwrap();
        assert!((v - c(0.5, 0.0)).norm() < 1e-14);
        let v = e.dbar(0).d(0).eval(&[c(0.3, 2.0)]).unwrap();
        assert!((v - c(1.0 / 16.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn singular_denominator_is_reported() {
        let e = ScalarExpr::one() / ScalarExpr::coord(0);
        assert!(matches!(
            e.eval(&[c(0.0, 0.0)]),
            Err(Error::SingularEval(_))
        ));
        let e = ScalarExpr::coord(0).powi(-2);
        assert!(matches!(
            e.eval(&[c(0.0, 0.0)]),
            Err(Error::SingularEval(_))
        ));
    }

    #[test]
    fn missing_coordinate_is_reported() {
        let e = ScalarExpr::coord(2);
        assert!(matches!(
            e.eval(&[c(0.0, 0.0)]),
            Err(Error::Dimension { index: 3, dim: 1 })
        ));
    }

    #[test]
    fn derivative_of_conjugated_subtree() {
        // f = conj(t^2), d/dbar f = 2 conj(t)
        let e = ScalarExpr::coord(0).powi(2).conj();
        assert!(e.d(0).is_zero());
        let v = e.dbar(0).eval(&[c(1.0, 2.0)]).unwrap();
        assert!((v - c(2.0, -4.0)).norm() < 1e-14);
    }
}
