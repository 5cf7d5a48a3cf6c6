//! Normal forms in `Q(jet vars)[w] / (w² − det g)`.
//!
//! An element is stored as `(a + b·w) / den` with `a, b, den` free of `w`,
//! `den` monic under graded lex, and `gcd(a, b, den) = 1`. Since `det g` is
//! not a square, `1` and `w` are linearly independent over `Q(jet vars)`, so
//! this representation is unique.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, ToPrimitive, Zero};
use smallvec::SmallVec;

use super::poly::{gcd, rational_sqrt, Monomial, Poly};
use super::var::{VarId, VarKind};
use crate::error::{Error, Result};
use crate::Rational;

/// `det g = 1 + Σ u_i²`.
pub fn detg(n: usize) -> Poly {
    let mut d = Poly::one();
    for i in 1..=n {
        d = &d + &Poly::term(Monomial::var(VarId::du(i), 2), Rational::one());
    }
    d
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatExpr {
    n: usize,
    a: Poly,
    b: Poly,
    den: Poly,
}

impl RatExpr {
    pub fn zero(n: usize) -> Self {
        Self::from_poly(n, Poly::zero())
    }

    pub fn one(n: usize) -> Self {
        Self::from_poly(n, Poly::one())
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        Self::from_poly(n, Poly::constant(c))
    }

    pub fn int(n: usize, c: i64) -> Self {
        Self::from_poly(n, Poly::int(c))
    }

    /// A single coordinate. `w` becomes the radical part.
    pub fn var(n: usize, v: VarId) -> Self {
        if v.kind() == VarKind::W {
            RatExpr { n, a: Poly::zero(), b: Poly::one(), den: Poly::one() }
        } else {
            Self::from_poly(n, Poly::var(v))
        }
    }

    pub fn w(n: usize) -> Self {
        Self::var(n, VarId::w())
    }

    /// Polynomial with no `w` and unit denominator. `p` must not mention `w`.
    pub fn from_poly(n: usize, p: Poly) -> Self {
        debug_assert!(!p.vars().contains(&VarId::w()));
        RatExpr { n, a: p, b: Poly::zero(), den: Poly::one() }
    }

    /// Builds and reduces `(a + b·w) / den`.
    pub fn from_parts(n: usize, a: Poly, b: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::reduce(n, a, b, den))
    }

    fn reduce(n: usize, a: Poly, b: Poly, den: Poly) -> Self {
        if a.is_zero() && b.is_zero() {
            return Self::zero(n);
        }
        let (mut a, mut b, mut den) = (a, b, den);
        if !den.is_constant() {
            let g = if b.is_zero() {
                gcd(&den, &a)
            } else if a.is_zero() {
                gcd(&den, &b)
            } else {
                let g = gcd(&den, &a);
                if g.is_one() {
                    g
                } else {
                    gcd(&g, &b)
                }
            };
            if !g.is_one() {
                a = a.exact_div(&g).expect("gcd divides");
                b = b.exact_div(&g).expect("gcd divides");
                den = den.exact_div(&g).expect("gcd divides");
            }
        }
        let lc = den.leading_coefficient();
        if !lc.is_one() {
            let inv = lc.recip();
            a = a.scale(&inv);
            b = b.scale(&inv);
            den = den.scale(&inv);
        }
        RatExpr { n, a, b, den }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The `w`-free part of the numerator.
    pub fn rational_part(&self) -> &Poly {
        &self.a
    }

    /// The coefficient of `w` in the numerator.
    pub fn radical_part(&self) -> &Poly {
        &self.b
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.b.is_zero() && self.den.is_one()
    }

    pub fn has_radical(&self) -> bool {
        !self.b.is_zero()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if !self.b.is_zero() {
            return None;
        }
        let num = self.a.constant_value()?;
        let den = self.den.constant_value()?;
        Some(num / den)
    }

    /// The numerator as a polynomial when there is no radical part.
    pub fn as_poly(&self) -> Option<Poly> {
        self.is_polynomial().then(|| self.a.clone())
    }

    /// All polynomial variables, plus `w` when the radical part is nonzero.
    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut v = self.a.vars();
        v.extend(self.b.vars());
        v.extend(self.den.vars());
        if !self.b.is_zero() {
            v.insert(VarId::w());
        }
        v
    }

    /// Highest jet order among the variables (`w` counts as order 1).
    pub fn max_jet_order(&self) -> usize {
        self.vars().iter().map(VarId::jet_order).max().unwrap_or(0)
    }

    fn check_dim(&self, other: &Self) {
        assert_eq!(self.n, other.n, "expressions of different dimension combined");
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        RatExpr { n: self.n, a: self.a.scale(c), b: self.b.scale(c), den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if self.b.is_zero() {
            return Ok(Self::reduce(self.n, self.den.clone(), Poly::zero(), self.a.clone()));
        }
        // 1 / (a + b w) = (a − b w) / (a² − b² D)
        let norm = &(&self.a * &self.a) - &(&(&self.b * &self.b) * &detg(self.n));
        Ok(Self::reduce(self.n, &self.den * &self.a, -&(&self.den * &self.b), norm))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut k = k.unsigned_abs();
        let mut result = Self::one(self.n);
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &sq;
            }
            k >>= 1;
            if k > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(result)
    }

    /// `w^k` without going through generic multiplication.
    pub fn w_pow(n: usize, k: i64) -> Self {
        let d = detg(n);
        let half = d.pow((k.unsigned_abs() / 2) as u32);
        let odd = k.unsigned_abs() % 2 == 1;
        match (k >= 0, odd) {
            (true, false) => Self::from_poly(n, half),
            (true, true) => RatExpr { n, a: Poly::zero(), b: half, den: Poly::one() },
            (false, false) => Self::reduce(n, Poly::one(), Poly::zero(), half),
            // w^{-(2m+1)} = w / D^{m+1}
            (false, true) => Self::reduce(n, Poly::zero(), Poly::one(), &half * &d),
        }
    }

    /// Partial derivative in a polynomial coordinate, with `w` treated as
    /// `√det g` (so `∂w/∂u_j = u_j w / det g`).
    pub fn partial(&self, v: VarId) -> Self {
        assert!(v.kind() != VarKind::W, "w is not an independent coordinate");
        let n = self.n;
        let num = RatExpr { n, a: self.a.clone(), b: self.b.clone(), den: Poly::one() };
        let mut dnum = RatExpr { n, a: self.a.partial(v), b: self.b.partial(v), den: Poly::one() };
        if !self.b.is_zero() && v.kind() == VarKind::Deriv && v.jet_order() == 1 && v.max_index() <= n {
            let dw = Self::reduce(n, Poly::zero(), &self.b * &Poly::var(v), detg(n));
            dnum = &dnum + &dw;
        }
        let dden = self.den.partial(v);
        if dden.is_zero() {
            let inv_den = Self::reduce(n, Poly::one(), Poly::zero(), self.den.clone());
            return &dnum * &inv_den;
        }
        let den = Self::from_poly(n, self.den.clone());
        let top = &(&dnum * &den) - &(&num * &Self::from_poly(n, dden));
        let sq = &self.den * &self.den;
        Self::reduce(n, top.a, top.b, &top.den * &sq)
    }

    /// Applies the derivation sending each coordinate `v` to `image(v)`,
    /// extended through `w` by the chain rule.
    pub fn derivation(&self, image: &dyn Fn(VarId) -> RatExpr) -> Self {
        let mut vars: BTreeSet<VarId> = self.a.vars();
        vars.extend(self.b.vars());
        vars.extend(self.den.vars());
        if !self.b.is_zero() {
            vars.extend((1..=self.n).map(VarId::du));
        }
        let mut acc = Self::zero(self.n);
        for v in vars {
            let img = image(v);
            if img.is_zero() {
                continue;
            }
            let d = self.partial(v);
            if !d.is_zero() {
                acc = &acc + &(&d * &img);
            }
        }
        acc
    }

    /// Simultaneous substitution. Unbound coordinates pass through; `w` is
    /// rebound to `√det g'` when that root is expressible.
    pub fn substitute(&self, bindings: &BTreeMap<VarId, RatExpr>) -> Result<Self> {
        let n = self.n;
        for img in bindings.values() {
            if img.n != n {
                return Err(Error::DimensionMismatch { expected: n, found: img.n });
            }
        }
        let w_image = if self.b.is_zero() {
            None
        } else if let Some(img) = bindings.get(&VarId::w()) {
            Some(img.clone())
        } else if bindings.keys().any(|v| v.kind() == VarKind::Deriv && v.jet_order() == 1) {
            let d = Self::from_poly(n, detg(n));
            let d_new = poly_substitute(n, &detg(n), bindings)?;
            if d_new == d {
                Some(Self::w(n))
            } else if let Some(root) = d_new.as_constant().as_ref().and_then(rational_sqrt) {
                Some(Self::constant(n, root))
            } else {
                return Err(Error::RadicalSubstitution);
            }
        } else {
            Some(Self::w(n))
        };
        let den = poly_substitute(n, &self.den, bindings)?;
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let mut num = poly_substitute(n, &self.a, bindings)?;
        if let Some(wi) = w_image {
            num = &num + &(&poly_substitute(n, &self.b, bindings)? * &wi);
        }
        num.checked_div(&den)
    }

    /// Floating evaluation, `w = +√det g`.
    pub fn eval_f64(&self, value: &dyn Fn(VarId) -> Option<f64>) -> Result<f64> {
        Evaluator::new(self).eval(value)
    }
}

/// Substitutes into a `w`-free polynomial.
fn poly_substitute(n: usize, p: &Poly, bindings: &BTreeMap<VarId, RatExpr>) -> Result<RatExpr> {
    let vars = p.vars();
    if !vars.iter().any(|v| bindings.contains_key(v)) {
        return Ok(RatExpr::from_poly(n, p.clone()));
    }
    let all_poly = vars.iter().filter_map(|v| bindings.get(v)).all(RatExpr::is_polynomial);
    if all_poly {
        let mut out = Poly::zero();
        let mut cache: BTreeMap<(VarId, u32), Poly> = BTreeMap::new();
        for (m, c) in p.terms() {
            let mut t = Poly::constant(c.clone());
            for (v, e) in m.iter() {
                let f = match bindings.get(&v) {
                    Some(img) => cache
                        .entry((v, e))
                        .or_insert_with(|| img.a.pow(e))
                        .clone(),
                    None => Poly::term(Monomial::var(v, e), Rational::one()),
                };
                t = &t * &f;
            }
            out = &out + &t;
        }
        return Ok(RatExpr::from_poly(n, out));
    }
    let mut acc = RatExpr::zero(n);
    for (m, c) in p.terms() {
        let mut t = RatExpr::constant(n, c.clone());
        for (v, e) in m.iter() {
            let f = match bindings.get(&v) {
                Some(img) => img.pow(e as i64)?,
                None => RatExpr::from_poly(n, Poly::term(Monomial::var(v, e), Rational::one())),
            };
            t = &t * &f;
        }
        acc = &acc + &t;
    }
    Ok(acc)
}

impl Add for &RatExpr {
    type Output = RatExpr;
    fn add(self, rhs: &RatExpr) -> RatExpr {
        self.check_dim(rhs);
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let n = self.n;
        if self.den == rhs.den {
            return RatExpr::reduce(n, &self.a + &rhs.a, &self.b + &rhs.b, self.den.clone());
        }
        let g = gcd(&self.den, &rhs.den);
        let (l, r) = if g.is_one() {
            (rhs.den.clone(), self.den.clone())
        } else {
            (rhs.den.exact_div(&g).expect("gcd divides"), self.den.exact_div(&g).expect("gcd divides"))
        };
        let a = &(&self.a * &l) + &(&rhs.a * &r);
        let b = &(&self.b * &l) + &(&rhs.b * &r);
        RatExpr::reduce(n, a, b, &self.den * &l)
    }
}

impl Sub for &RatExpr {
    type Output = RatExpr;
    fn sub(self, rhs: &RatExpr) -> RatExpr {
        self + &(-rhs)
    }
}

impl Neg for &RatExpr {
    type Output = RatExpr;
    fn neg(self) -> RatExpr {
        RatExpr { n: self.n, a: -&self.a, b: -&self.b, den: self.den.clone() }
    }
}

impl Mul for &RatExpr {
    type Output = RatExpr;
    fn mul(self, rhs: &RatExpr) -> RatExpr {
        self.check_dim(rhs);
        let n = self.n;
        if self.is_zero() || rhs.is_zero() {
            return RatExpr::zero(n);
        }
        if let Some(c) = self.as_constant() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.as_constant() {
            return self.scale(&c);
        }
        let mut a = &self.a * &rhs.a;
        if !self.b.is_zero() && !rhs.b.is_zero() {
            a = &a + &(&(&self.b * &rhs.b) * &detg(n));
        }
        let b = &(&self.a * &rhs.b) + &(&self.b * &rhs.a);
        RatExpr::reduce(n, a, b, &self.den * &rhs.den)
    }
}

impl fmt::Debug for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[({:?}) + ({:?})*w] / ({:?})", self.a, self.b, self.den)
    }
}

type PowerList = SmallVec<[(u16, u32); 4]>;

/// A polynomial flattened for repeated floating evaluation.
#[derive(Clone, Debug)]
struct CompiledPoly {
    terms: Vec<(f64, PowerList)>,
}

impl CompiledPoly {
    fn new(p: &Poly, slot_of: &BTreeMap<VarId, u16>) -> Self {
        let terms = p
            .terms()
            .rev()
            .map(|(m, c)| (c.to_f64().unwrap_or(f64::NAN), m.iter().map(|(v, e)| (slot_of[&v], e)).collect()))
            .collect();
        CompiledPoly { terms }
    }

    /// Value and the sum of absolute term magnitudes.
    fn eval(&self, values: &[f64]) -> (f64, f64) {
        let mut acc = 0.0;
        let mut mag = 0.0;
        for (c, m) in &self.terms {
            let mut t = *c;
            for &(s, e) in m {
                t *= values[s as usize].powi(e as i32);
            }
            acc += t;
            mag += t.abs();
        }
        (acc, mag)
    }
}

/// Relative size below which an evaluated denominator counts as zero.
pub const NEAR_SINGULAR_RTOL: f64 = 64.0 * f64::EPSILON;

/// Precompiled floating evaluator for a [`RatExpr`].
#[derive(Clone, Debug)]
pub struct Evaluator {
    n: usize,
    slots: Vec<VarId>,
    a: CompiledPoly,
    b: CompiledPoly,
    den: CompiledPoly,
}

impl Evaluator {
    pub fn new(e: &RatExpr) -> Self {
        let mut vars: BTreeSet<VarId> = e.a.vars();
        vars.extend(e.b.vars());
        vars.extend(e.den.vars());
        let slots: Vec<VarId> = vars.into_iter().collect();
        let slot_of: BTreeMap<VarId, u16> = slots.iter().enumerate().map(|(i, v)| (*v, i as u16)).collect();
        Evaluator {
            n: e.n,
            a: CompiledPoly::new(&e.a, &slot_of),
            b: CompiledPoly::new(&e.b, &slot_of),
            den: CompiledPoly::new(&e.den, &slot_of),
            slots,
        }
    }

    pub fn eval(&self, value: &dyn Fn(VarId) -> Option<f64>) -> Result<f64> {
        let mut values = Vec::with_capacity(self.slots.len());
        for v in &self.slots {
            values.push(value(*v).ok_or_else(|| Error::UnboundVariable(v.to_string()))?);
        }
        let (den, mag) = self.den.eval(&values);
        if !den.is_finite() || den.abs() <= NEAR_SINGULAR_RTOL * mag || den == 0.0 {
            return Err(Error::NearSingular);
        }
        let (a, _) = self.a.eval(&values);
        let mut num = a;
        if !self.b.terms.is_empty() {
            let mut d = 1.0;
            for i in 1..=self.n {
                let ui = value(VarId::du(i)).ok_or_else(|| Error::UnboundVariable(VarId::du(i).to_string()))?;
                d += ui * ui;
            }
            num += self.b.eval(&values).0 * d.sqrt();
        }
        Ok(num / den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: usize, x: VarId) -> RatExpr {
        RatExpr::var(n, x)
    }

    #[test]
    fn w_squared_is_det_g() {
        let w = RatExpr::w(2);
        assert_eq!(&w * &w, RatExpr::from_poly(2, detg(2)));
    }

    #[test]
    fn radical_inverse() {
        let n = 2;
        let w = RatExpr::w(n);
        let e = &w + &v(n, VarId::du(1));
        let inv = e.inv().unwrap();
        assert_eq!(&e * &inv, RatExpr::one(n));
        assert_eq!(RatExpr::w_pow(n, -3), w.pow(-3).unwrap());
        assert_eq!(RatExpr::w_pow(n, 4), w.pow(4).unwrap());
        assert_eq!(RatExpr::w_pow(n, -2), w.pow(-2).unwrap());
    }

    #[test]
    fn cancellation_in_fractions() {
        let n = 1;
        let x = v(n, VarId::du(1));
        let one = RatExpr::one(n);
        let e = (&(&x * &x) - &one).checked_div(&(&x - &one)).unwrap();
        assert_eq!(e, &x + &one);
        assert_eq!(RatExpr::zero(n).inv(), Err(Error::ZeroDenominator));
    }

    #[test]
    fn denominator_is_monic() {
        let n = 1;
        let x = v(n, VarId::du(1));
        let e = RatExpr::one(n).checked_div(&x.scale(&Rational::from_integer((-2).into()))).unwrap();
        assert!(e.denominator().leading_coefficient().is_one());
        assert_eq!(e.rational_part(), &Poly::constant(Rational::new((-1).into(), 2.into())));
    }

    #[test]
    fn derivative_of_w() {
        let n = 2;
        let dw = RatExpr::w(n).partial(VarId::du(1));
        let expected = (&v(n, VarId::du(1)) * &RatExpr::w(n)).checked_div(&RatExpr::from_poly(n, detg(n))).unwrap();
        assert_eq!(dw, expected);
    }

    #[test]
    fn substitution_rebinds_radical() {
        let n = 2;
        let w = RatExpr::w(n);
        let mut b = BTreeMap::new();
        b.insert(VarId::du(1), RatExpr::int(n, 1));
        b.insert(VarId::du(2), RatExpr::int(n, 0));
        assert_eq!((&w * &w).substitute(&b).unwrap(), RatExpr::int(n, 2));
        assert_eq!(w.substitute(&b), Err(Error::RadicalSubstitution));
        b.insert(VarId::du(1), RatExpr::constant(n, Rational::new(3.into(), 4.into())));
        assert_eq!(w.substitute(&b).unwrap(), RatExpr::constant(n, Rational::new(5.into(), 4.into())));
    }

    #[test]
    fn numeric_evaluation() {
        let n = 2;
        let e = RatExpr::w(n);
        let val = e.eval_f64(&|x| if x == VarId::du(1) { Some(1.0) } else { Some(0.0) }).unwrap();
        assert!((val - 2f64.sqrt()).abs() < 1e-15);
        let x = v(n, VarId::du(1));
        let inv = RatExpr::one(n).checked_div(&x).unwrap();
        assert_eq!(inv.eval_f64(&|_| Some(0.0)), Err(Error::NearSingular));
    }
}
