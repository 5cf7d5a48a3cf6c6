//! Exact expressions in jet coordinates.
//!
//! [`Expr`] is the user-facing tree; [`RatExpr`] is its canonical normal form
//! in `Q(jet vars)[w] / (w² − det g)`. All algebra happens on `RatExpr`;
//! trees are built for input, output and round trips.

pub(crate) mod format;
pub mod matrix;
pub mod poly;
pub mod rat;
pub mod var;

use std::collections::BTreeMap;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Signed};

pub use format::{emit, parse_json, Format};
pub use matrix::ExprMatrix;
pub use poly::{Monomial, Poly};
pub use rat::{detg, Evaluator, RatExpr};
pub use var::{VarId, VarKind};

use crate::error::{Error, Result};
use crate::jet::JetPoint2;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Rational),
    Var(VarId),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, i64),
}

impl Expr {
    pub fn int(c: i64) -> Self {
        Expr::Const(Rational::from_integer(c.into()))
    }

    pub fn rational(p: i64, q: i64) -> Self {
        Expr::Const(Rational::new(p.into(), q.into()))
    }

    pub fn var(v: VarId) -> Self {
        Expr::Var(v)
    }

    pub fn pow(self, k: i64) -> Self {
        Expr::Pow(Box::new(self), k)
    }

    /// Converts to the normal form, checking that indices fit dimension `n`.
    pub fn to_rat(&self, n: usize) -> Result<RatExpr> {
        match self {
            Expr::Const(c) => Ok(RatExpr::constant(n, c.clone())),
            Expr::Var(v) => {
                check_var(*v, n)?;
                Ok(RatExpr::var(n, *v))
            }
            Expr::Sum(args) => {
                let mut acc = RatExpr::zero(n);
                for a in args {
                    acc = &acc + &a.to_rat(n)?;
                }
                Ok(acc)
            }
            Expr::Product(args) => {
                let mut acc = RatExpr::one(n);
                for a in args {
                    acc = &acc * &a.to_rat(n)?;
                }
                Ok(acc)
            }
            Expr::Pow(b, k) => b.to_rat(n)?.pow(*k),
        }
    }

    /// The canonical tree of a normal form: numerator terms in descending
    /// graded lex order (rational part, then `w` terms), over the denominator.
    pub fn from_rat(e: &RatExpr) -> Self {
        let mut terms = poly_terms(e.rational_part(), None);
        terms.extend(poly_terms(e.radical_part(), Some(VarId::w())));
        let num = match terms.len() {
            0 => Expr::int(0),
            1 => terms.pop().expect("one term"),
            _ => Expr::Sum(terms),
        };
        if e.denominator().is_one() {
            return num;
        }
        let mut den_terms = poly_terms(e.denominator(), None);
        let den = if den_terms.len() == 1 { den_terms.pop().expect("one term") } else { Expr::Sum(den_terms) };
        Expr::Product(vec![num, den.pow(-1)])
    }

    pub fn from_poly(p: &Poly) -> Self {
        let mut terms = poly_terms(p, None);
        match terms.len() {
            0 => Expr::int(0),
            1 => terms.pop().expect("one term"),
            _ => Expr::Sum(terms),
        }
    }

    /// Equality of normal forms.
    pub fn equivalent(&self, other: &Expr, n: usize) -> Result<bool> {
        Ok(self.to_rat(n)? == other.to_rat(n)?)
    }
}

fn check_var(v: VarId, n: usize) -> Result<()> {
    let ix = v.indices();
    if ix.iter().any(|&i| i == 0 || i > n) {
        return Err(Error::VariableOutOfRange(v.to_string(), n));
    }
    Ok(())
}

fn poly_terms(p: &Poly, extra: Option<VarId>) -> Vec<Expr> {
    p.terms()
        .rev()
        .map(|(m, c)| {
            let mut factors = Vec::new();
            if !c.is_one() || (m.is_one() && extra.is_none()) {
                factors.push(Expr::Const(c.clone()));
            }
            for (v, e) in m.iter() {
                factors.push(if e == 1 { Expr::Var(v) } else { Expr::Var(v).pow(e as i64) });
            }
            if let Some(x) = extra {
                factors.push(Expr::Var(x));
            }
            if factors.len() == 1 {
                factors.pop().expect("one factor")
            } else {
                Expr::Product(factors)
            }
        })
        .collect()
}

/// Canonical normal form of `e` in dimension `n`.
pub fn normalize(e: &Expr, n: usize) -> Result<Expr> {
    Ok(Expr::from_rat(&e.to_rat(n)?))
}

/// Simultaneous substitution followed by normalization.
pub fn substitute(e: &Expr, bindings: &BTreeMap<VarId, Expr>, n: usize) -> Result<Expr> {
    let mut b = BTreeMap::new();
    for (v, img) in bindings {
        check_var(*v, n)?;
        b.insert(*v, img.to_rat(n)?);
    }
    Ok(Expr::from_rat(&e.to_rat(n)?.substitute(&b)?))
}

/// Floating value of the normal form at a jet point, `w = +√det g`.
pub fn eval_numeric(e: &Expr, p: &JetPoint2) -> Result<f64> {
    e.to_rat(p.n)?.eval_f64(&|v| p.value(v))
}

impl From<Rational> for Expr {
    fn from(c: Rational) -> Self {
        Expr::Const(c)
    }
}

impl From<VarId> for Expr {
    fn from(v: VarId) -> Self {
        Expr::Var(v)
    }
}

impl From<&RatExpr> for Expr {
    fn from(e: &RatExpr) -> Self {
        Expr::from_rat(e)
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        match self {
            Expr::Sum(mut v) => {
                v.push(rhs);
                Expr::Sum(v)
            }
            lhs => Expr::Sum(vec![lhs, rhs]),
        }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(-c),
            e => Expr::Product(vec![Expr::int(-1), e]),
        }
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        self + (-rhs)
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        match self {
            Expr::Product(mut v) => {
                v.push(rhs);
                Expr::Product(v)
            }
            lhs => Expr::Product(vec![lhs, rhs]),
        }
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        self * rhs.pow(-1)
    }
}

/// True when a tree term prints with a leading minus sign.
pub(crate) fn is_negative_term(e: &Expr) -> bool {
    match e {
        Expr::Const(c) => c.is_negative(),
        Expr::Product(f) => matches!(f.first(), Some(Expr::Const(c)) if c.is_negative()),
        _ => false,
    }
}

/// The negation of a term for which [`is_negative_term`] holds.
pub(crate) fn negate_term(e: &Expr) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(-c.clone()),
        Expr::Product(f) => {
            let Some(Expr::Const(c)) = f.first() else { unreachable!("checked by is_negative_term") };
            let c = -c.clone();
            let mut rest: Vec<Expr> = f[1..].to_vec();
            if !c.is_one() {
                rest.insert(0, Expr::Const(c));
            }
            match rest.len() {
                0 => Expr::int(1),
                1 => rest.pop().expect("one factor"),
                _ => Expr::Product(rest),
            }
        }
        other => other.clone(),
    }
}
