//! Sparse multivariate polynomials over the rationals, in graded
//! lexicographic order, with exact division and a recursive gcd.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use super::var::VarId;
use crate::Rational;

/// Power product of variables, sorted by [`VarId`] with no zero exponents.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[(VarId, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: VarId, exp: u32) -> Self {
        if exp == 0 {
            Self::one()
        } else {
            Monomial(smallvec::smallvec![(v, exp)])
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (VarId, u32)>) -> Self {
        let mut m = BTreeMap::new();
        for (v, e) in pairs {
            *m.entry(v).or_insert(0) += e;
        }
        Monomial(m.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.0.iter().find(|&&(w, _)| w == v).map_or(0, |&(_, e)| e)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, u32)> + '_ {
        self.0.iter().copied()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.iter().map(|&(v, _)| v)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        Monomial(self.0.iter().map(|&(v, e)| (v, e * k)).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        let mut out = SmallVec::new();
        let mut j = 0;
        for &(v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == v {
                let f = other.0[j].1;
                if f > e {
                    return None;
                }
                if e > f {
                    out.push((v, e - f));
                }
                j += 1;
            } else {
                out.push((v, e));
            }
        }
        (j == other.0.len()).then_some(Monomial(out))
    }

    pub fn gcd(&self, other: &Self) -> Self {
        Monomial(
            self.0
                .iter()
                .filter_map(|&(v, e)| {
                    let f = other.exponent(v);
                    (f > 0).then_some((v, e.min(f)))
                })
                .collect(),
        )
    }

    /// Splits into the part over variables selected by `keep` and the rest.
    pub fn split(&self, keep: impl Fn(VarId) -> bool) -> (Monomial, Monomial) {
        let (kept, rest): (SmallVec<_>, SmallVec<_>) = self.0.iter().copied().partition(|&(v, _)| keep(v));
        (Monomial(kept), Monomial(rest))
    }

    /// Exponent of `v` and the monomial with `v` removed.
    pub fn extract(&self, v: VarId) -> (u32, Monomial) {
        let e = self.exponent(v);
        (e, Monomial(self.0.iter().copied().filter(|&(w, _)| w != v).collect()))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: total degree first, then the exponent of the
    /// earliest variable in canonical order.
    fn cmp(&self, other: &Self) -> Ordering {
        let d = self.degree().cmp(&other.degree());
        if d != Ordering::Equal {
            return d;
        }
        for (x, y) in self.0.iter().zip(&other.0) {
            if x.0 != y.0 {
                return if x.0 < y.0 { Ordering::Greater } else { Ordering::Less };
            }
            if x.1 != y.1 {
                return x.1.cmp(&y.1);
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Sparse polynomial `Σ c_m m` over the rationals.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn int(c: i64) -> Self {
        Self::constant(Rational::from_integer(c.into()))
    }

    pub fn var(v: VarId) -> Self {
        Self::term(Monomial::var(v, 1), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().is_some_and(Monomial::is_one))
    }

    /// The value of a constant polynomial (zero included).
    pub fn constant_value(&self) -> Option<Rational> {
        if self.terms.is_empty() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coefficient(&self) -> Rational {
        self.leading().map_or_else(Rational::zero, |(_, c)| c.clone())
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        self.terms.keys().flat_map(|m| m.vars().collect::<Vec<_>>()).collect()
    }

    pub fn degree_in(&self, v: VarId) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    /// `(d, c·d)` with `d` the lcm of the coefficient denominators.
    fn integer_parts(&self) -> (BigInt, Vec<(&Monomial, BigInt)>) {
        let d = self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints = self.terms.iter().map(|(m, c)| (m, c.numer() * (&d / c.denom()))).collect();
        (d, ints)
    }

    /// `self −= c · m · p` in place.
    fn sub_mul_monomial_assign(&mut self, p: &Poly, m: &Monomial, c: &Rational) {
        use std::collections::btree_map::Entry;
        for (k, x) in &p.terms {
            let d = x * c;
            match self.terms.entry(k.mul(m)) {
                Entry::Vacant(e) => {
                    e.insert(-d);
                }
                Entry::Occupied(mut e) => {
                    *e.get_mut() -= d;
                    if e.get().is_zero() {
                        e.remove();
                    }
                }
            }
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(k, x)| (k.mul(m), x * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some((_, c)) if !c.is_one() => self.scale(&c.recip()),
            _ => self.clone(),
        }
    }

    /// Positive rational `c` such that `self / c` has coprime integer
    /// coefficients, signed so the leading coefficient of `self / c` is positive.
    pub fn rational_content(&self) -> Rational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Rational::one();
        }
        let content = Rational::new(num, den);
        if self.leading_coefficient().is_negative() {
            -content
        } else {
            content
        }
    }

    pub fn partial(&self, v: VarId) -> Self {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.extract(v);
            if e > 0 {
                out.add_term(rest.mul(&Monomial::var(v, e - 1)), c * Rational::from_integer(e.into()));
            }
        }
        out
    }

    /// Coefficients of `self` as a polynomial in `v`, keyed by the power of `v`.
    pub fn coefficients_in(&self, v: VarId) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.extract(v);
            out.entry(e).or_default().add_term(rest, c.clone());
        }
        out
    }

    fn dense_in(&self, v: VarId) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.degree_in(v) as usize + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.extract(v);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    fn from_dense_in(v: VarId, coeffs: &[Poly]) -> Self {
        let mut out = Poly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            let vm = Monomial::var(v, e as u32);
            for (m, x) in &c.terms {
                out.add_term(m.mul(&vm), x.clone());
            }
        }
        out
    }

    /// Groups terms by their monomial over variables outside `keep`; each group
    /// is a polynomial over `keep` only.
    pub fn split_coefficients(&self, keep: &BTreeSet<VarId>) -> Vec<Poly> {
        let mut groups: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (kept, rest) = m.split(|v| keep.contains(&v));
            groups.entry(rest).or_default().add_term(kept, c.clone());
        }
        groups.into_values().collect()
    }

    /// Exact quotient `self / divisor`, or `None` when `divisor` does not divide.
    pub fn exact_div(&self, divisor: &Poly) -> Option<Poly> {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = divisor.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        if divisor.total_degree() > self.total_degree() {
            return None;
        }
        for v in divisor.vars() {
            if divisor.degree_in(v) > self.degree_in(v) {
                return None;
            }
        }
        let (lm, lc) = divisor.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((m, c)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let qm = m.checked_div(&lm)?;
            let qc = c / &lc;
            rem.sub_mul_monomial_assign(divisor, &qm, &qc);
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Floating evaluation with a variable lookup.
    pub fn eval_f64(&self, value: &impl Fn(VarId) -> f64) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for (v, e) in m.iter() {
                t *= value(v).powi(e as i32);
            }
            acc += t;
        }
        acc
    }

    /// Exact evaluation of the variables in `values`; others pass through.
    pub fn substitute_constants(&self, values: &BTreeMap<VarId, Rational>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut rest = Vec::new();
            for (v, e) in m.iter() {
                match values.get(&v) {
                    Some(x) => coef *= num_traits::pow(x.clone(), e as usize),
                    None => rest.push((v, e)),
                }
            }
            out.add_term(Monomial::from_pairs(rest), coef);
        }
        out
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().rev().map(|(m, c)| format!("({c})*{m:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (big, small) = if self.len() >= rhs.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.constant_value() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.constant_value() {
            return self.scale(&c);
        }
        // integer numerators over a common denominator; one normalization per output term
        let (da, ia) = self.integer_parts();
        let (db, ib) = rhs.integer_parts();
        let mut acc: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (ma, ca) in &ia {
            for (mb, cb) in &ib {
                let t = ca * cb;
                match acc.entry(ma.mul(mb)) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(t);
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => *e.get_mut() += t,
                }
            }
        }
        let den = da * db;
        Poly {
            terms: acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (m, Rational::new(c, den.clone())))
                .collect(),
        }
    }
}

/// Monic greatest common divisor (zero only when both inputs are zero).
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a.len() == 1 || b.len() == 1 {
        let (mono, other) = if a.len() == 1 { (a, b) } else { (b, a) };
        let mut g = mono.leading().map(|(m, _)| m.clone()).unwrap_or_default();
        for (m, _) in other.terms() {
            g = g.gcd(m);
            if g.is_one() {
                break;
            }
        }
        return Poly::term(g, Rational::one());
    }
    let va = a.vars();
    let vb = b.vars();
    if va.iter().any(|v| !vb.contains(v)) {
        return gcd_with_parts(b, a, &vb);
    }
    if vb.iter().any(|v| !va.contains(v)) {
        return gcd_with_parts(a, b, &va);
    }
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if long.exact_div(short).is_some() {
        return short.monic();
    }
    let main = *va
        .iter()
        .min_by_key(|&&v| (a.degree_in(v).max(b.degree_in(v)), a.degree_in(v) + b.degree_in(v)))
        .expect("non-constant polynomials have variables");
    let (ca, pa) = content_in(a, main);
    let (cb, pb) = content_in(b, main);
    let c = gcd(&ca, &cb);
    let g = primitive_prs(pa.dense_in(main), pb.dense_in(main));
    (&Poly::from_dense_in(main, &g) * &c).monic()
}

/// gcd of `small` with a polynomial `big` that involves variables outside
/// `keep = vars(small)`: only the coefficient groups over `keep` matter.
fn gcd_with_parts(small: &Poly, big: &Poly, keep: &BTreeSet<VarId>) -> Poly {
    let mut parts = big.split_coefficients(keep);
    parts.sort_by_key(Poly::len);
    let mut g = small.monic();
    for p in &parts {
        g = gcd(&g, p);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Content with respect to `v` (monic gcd of the coefficients) and primitive part.
fn content_in(a: &Poly, v: VarId) -> (Poly, Poly) {
    let mut coeffs: Vec<Poly> = a.coefficients_in(v).into_values().collect();
    coeffs.sort_by_key(Poly::len);
    let c = content_of(&coeffs);
    if c.is_one() {
        return (c, a.clone());
    }
    let pp = a.exact_div(&c).expect("content divides the polynomial");
    (c, pp)
}

fn content_of(coeffs: &[Poly]) -> Poly {
    let mut g = Poly::zero();
    for c in coeffs {
        g = gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    if g.is_zero() {
        Poly::one()
    } else {
        g
    }
}

fn trim(v: &mut Vec<Poly>) {
    while v.last().is_some_and(Poly::is_zero) {
        v.pop();
    }
}

/// Primitive polynomial remainder sequence on dense univariate coefficient
/// vectors whose coefficients are polynomials in the remaining variables.
fn primitive_prs(a: Vec<Poly>, b: Vec<Poly>) -> Vec<Poly> {
    let (mut f, mut g) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    loop {
        let r = pseudo_remainder(&f, &g);
        if r.is_empty() {
            return g;
        }
        if r.len() == 1 {
            return vec![Poly::one()];
        }
        let c = content_of(&r);
        let r = if c.is_one() {
            r
        } else {
            r.iter().map(|x| x.exact_div(&c).expect("content divides coefficients")).collect()
        };
        f = std::mem::replace(&mut g, r);
    }
}

/// Remainder of `lc(g)^k f` by `g`, up to a factor free of the main variable.
fn pseudo_remainder(f: &[Poly], g: &[Poly]) -> Vec<Poly> {
    let n = g.len() - 1;
    let lc = &g[n];
    let mut r = f.to_vec();
    trim(&mut r);
    while r.len() > n {
        let d = r.len() - 1;
        let lr = r[d].clone();
        for x in r.iter_mut() {
            *x = &*x * lc;
        }
        for (j, gj) in g.iter().enumerate() {
            let idx = j + d - n;
            r[idx] = &r[idx] - &(&lr * gj);
        }
        debug_assert!(r[d].is_zero());
        trim(&mut r);
    }
    r
}

/// Exact rational square root, when one exists.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

/// Lossy conversion used for diagnostics.
pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(i: usize) -> Poly {
        Poly::var(VarId::du(i))
    }

    fn uu(i: usize, j: usize) -> Poly {
        Poly::var(VarId::d2u(i, j))
    }

    #[test]
    fn graded_lex_leading_term() {
        let d = &(&Poly::one() + &u(1).pow(2)) + &u(2).pow(2);
        let (m, c) = d.leading().unwrap();
        assert_eq!(*m, Monomial::var(VarId::du(1), 2));
        assert!(c.is_one());
    }

    #[test]
    fn exact_division() {
        let a = &u(1) + &u(2);
        let b = &u(1) - &u(2);
        let prod = &a * &b;
        assert_eq!(prod.exact_div(&a), Some(b.clone()));
        assert_eq!(prod.exact_div(&(&u(1) + &Poly::one())), None);
    }

    #[test]
    fn gcd_of_products() {
        let d = &(&Poly::one() + &u(1).pow(2)) + &u(2).pow(2);
        let p = &(&uu(1, 1) * &d) + &(&uu(2, 2) * &d.pow(2));
        assert_eq!(gcd(&p, &d.pow(3)), d.monic());
        let x = &u(1) + &u(2);
        let y = &u(1) - &Poly::int(3);
        let z = &(&u(1) * &u(2)) + &Poly::int(1);
        assert_eq!(gcd(&(&x * &y), &(&x * &z)), x.monic());
        assert!(gcd(&y, &z).is_one());
    }

    #[test]
    fn gcd_monomial_cases() {
        let m = &u(1).pow(3) * &u(2);
        let p = &(&u(1).pow(2) * &uu(1, 1)) + &u(1).pow(4);
        assert_eq!(gcd(&m, &p), u(1).pow(2));
    }

    #[test]
    fn partial_derivative() {
        let p = &u(1).pow(3) * &u(2);
        assert_eq!(p.partial(VarId::du(1)), (&u(1).pow(2) * &u(2)).scale(&Rational::from_integer(3.into())));
        assert!(p.partial(VarId::u()).is_zero());
    }

    #[test]
    fn content_is_signed_by_leading_term() {
        let p = (&u(1) + &u(2)).scale(&Rational::new((-3).into(), 4.into()));
        let c = p.rational_content();
        assert_eq!(c, Rational::new((-3).into(), 4.into()));
    }

    #[test]
    fn square_roots() {
        assert_eq!(rational_sqrt(&Rational::new(9.into(), 4.into())), Some(Rational::new(3.into(), 2.into())));
        assert_eq!(rational_sqrt(&Rational::from_integer(2.into())), None);
    }
}
