//! Polynomials in abstract invariant symbols and the equations they generate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{detg, Expr, Poly, RatExpr, VarId};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Symbols `τ_1..τ_n`, written `t1..tn`.
    Euclidean,
    /// Symbols `τ°_2..τ°_n`, written `c2..cn`.
    Conformal,
}

impl Family {
    /// Smallest admissible symbol subscript.
    pub fn first_symbol(self) -> usize {
        match self {
            Family::Euclidean => 1,
            Family::Conformal => 2,
        }
    }

    pub fn prefix(self) -> char {
        match self {
            Family::Euclidean => 't',
            Family::Conformal => 'c',
        }
    }

    pub fn latex_symbol(self, k: usize) -> String {
        match self {
            Family::Euclidean => format!("\\tau_{{{k}}}"),
            Family::Conformal => format!("\\tau^{{\\circ}}_{{{k}}}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Family::Euclidean),
            "conformal" => Ok(Family::Conformal),
            other => Err(Error::InvalidInput(format!("unknown group '{other}'"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Euclidean => "euclidean",
            Family::Conformal => "conformal",
        })
    }
}

/// Sorted `(subscript, exponent)` pairs with positive exponents.
pub type SymbolMonomial = Vec<(usize, u32)>;

/// `Σ c_α Π s_k^{α_k}` with weight `deg s_k = k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantPoly {
    family: Family,
    terms: BTreeMap<SymbolMonomial, Rational>,
}

impl InvariantPoly {
    pub fn new(family: Family) -> Self {
        InvariantPoly { family, terms: BTreeMap::new() }
    }

    /// The single symbol `s_k`.
    pub fn symbol(family: Family, k: usize) -> Self {
        let mut p = Self::new(family);
        p.add_term(Rational::one(), &[(k, 1)]);
        p
    }

    pub fn add_term(&mut self, coef: Rational, powers: &[(usize, u32)]) {
        let mut m: BTreeMap<usize, u32> = BTreeMap::new();
        for &(k, e) in powers {
            *m.entry(k).or_insert(0) += e;
        }
        let key: SymbolMonomial = m.into_iter().filter(|&(_, e)| e > 0).collect();
        let c = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *c += coef;
        if c.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn with_term(mut self, coef: Rational, powers: &[(usize, u32)]) -> Self {
        self.add_term(coef, powers);
        self
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SymbolMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn weight(m: &SymbolMonomial) -> u32 {
        m.iter().map(|&(k, e)| k as u32 * e).sum()
    }

    pub fn weights(&self) -> BTreeSet<u32> {
        self.terms.keys().map(Self::weight).collect()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.weights().len() <= 1
    }

    /// Checks symbol ranges for dimension `n` and homogeneity for the
    /// conformal family.
    pub fn validate(&self, n: usize) -> Result<()> {
        for m in self.terms.keys() {
            for &(k, _) in m {
                if k < self.family.first_symbol() || k > n {
                    return Err(Error::SymbolOutOfRange { symbol: format!("{}{k}", self.family.prefix()), n });
                }
            }
        }
        if self.family == Family::Conformal && !self.is_homogeneous() {
            return Err(Error::NotHomogeneous);
        }
        Ok(())
    }

    /// Floating value given the symbol values `values[k]`.
    pub fn eval_f64(&self, values: &dyn Fn(usize) -> f64) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.iter().fold(c.to_f64().unwrap_or(f64::NAN), |acc, &(k, e)| acc * values(k).powi(e as i32))
            })
            .sum()
    }
}

impl fmt::Display for InvariantPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut sorted: Vec<_> = self.terms.iter().collect();
        sorted.sort_by_key(|(m, _)| (std::cmp::Reverse(Self::weight(m)), *m));
        for (i, (m, c)) in sorted.into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut parts: Vec<String> = Vec::new();
            if !a.is_one() || m.is_empty() {
                parts.push(a.to_string());
            }
            for &(k, e) in m {
                let s = format!("{}{k}", self.family.prefix());
                parts.push(if e == 1 { s } else { format!("{s}^{e}") });
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

/// An invariant equation `F = 0` with `F = scale · numerator / cleared` exactly.
/// `numerator` has coprime integer coefficients and positive leading term;
/// `cleared` is positive on real jets, so the zero sets agree.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantPde {
    pub family: Family,
    pub n: usize,
    pub numerator: RatExpr,
    pub cleared: RatExpr,
    pub scale: Rational,
    /// False when the numerator keeps both a rational and a `w` part.
    pub polynomial: bool,
    /// The normal form of `F` itself.
    pub form: RatExpr,
}

impl InvariantPde {
    /// Splits a normal form `(a + b w) / den` into numerator and cleared factor.
    pub fn from_normal_form(family: Family, n: usize, form: RatExpr) -> Result<Self> {
        if form.is_zero() {
            return Err(Error::EmptyEquation);
        }
        let (a, b, den) = (form.rational_part(), form.radical_part(), form.denominator());
        let (na, nb, cleared, polynomial) = if a.is_zero() {
            // b w / den = b / (den / w)
            (b.clone(), Poly::zero(), RatExpr::from_parts(n, Poly::zero(), den.clone(), detg(n))?, true)
        } else if b.is_zero() {
            (a.clone(), Poly::zero(), RatExpr::from_poly(n, den.clone()), true)
        } else {
            (a.clone(), b.clone(), RatExpr::from_poly(n, den.clone()), false)
        };
        let joint = &na + &(&nb * &Poly::var(VarId::w()));
        let scale = joint.rational_content();
        let inv = scale.recip();
        let numerator = RatExpr::from_parts(n, na.scale(&inv), nb.scale(&inv), Poly::one())?;
        Ok(InvariantPde { family, n, numerator, cleared, scale, polynomial, form })
    }

    /// The numerator as a polynomial (rational part when `polynomial` holds).
    pub fn numerator_poly(&self) -> &Poly {
        self.numerator.rational_part()
    }

    pub fn numerator_expr(&self) -> Expr {
        Expr::from_rat(&self.numerator)
    }

    pub fn cleared_expr(&self) -> Expr {
        Expr::from_rat(&self.cleared)
    }

    /// `k` with `cleared = w^k`, when the cleared factor is a pure power of `w`.
    pub fn cleared_w_power(&self) -> Option<u32> {
        let c = &self.cleared;
        if !c.denominator().is_one() {
            return None;
        }
        let k = match (c.rational_part().is_zero(), c.radical_part().is_zero()) {
            (false, true) => c.rational_part().total_degree(),
            (true, false) => c.radical_part().total_degree() + 1,
            _ => return None,
        };
        (*c == RatExpr::w_pow(self.n, k as i64)).then_some(k)
    }
}

/// Substitutes `s_k = N_k / w^{3k}` into `F` and reduces once at the end.
/// `numerators[k]` holds `N_k`.
pub(crate) fn assemble(f: &InvariantPoly, n: usize, numerators: &BTreeMap<usize, Poly>) -> Result<RatExpr> {
    let mut by_weight: BTreeMap<u32, Poly> = BTreeMap::new();
    let mut powers: BTreeMap<(usize, u32), Poly> = BTreeMap::new();
    for (m, c) in f.terms() {
        let mut t = Poly::constant(c.clone());
        for &(k, e) in m {
            let p = powers.entry((k, e)).or_insert_with(|| numerators[&k].pow(e)).clone();
            t = &t * &p;
        }
        let d = InvariantPoly::weight(m);
        let slot = by_weight.entry(d).or_insert_with(Poly::zero);
        *slot = &*slot + &t;
    }
    let Some(&dmax) = by_weight.keys().next_back() else {
        return Ok(RatExpr::zero(n));
    };
    let dg = detg(n);
    let mut dg_pows: BTreeMap<u32, Poly> = BTreeMap::new();
    let mut dpow = |k: u32| dg_pows.entry(k).or_insert_with(|| dg.pow(k)).clone();
    // Σ_d N_d w^{3(dmax − d)}, split into rational and w parts.
    let (mut a, mut b) = (Poly::zero(), Poly::zero());
    for (d, nd) in &by_weight {
        let k = 3 * (dmax - d);
        let t = &dpow(k / 2) * nd;
        if k % 2 == 0 {
            a = &a + &t;
        } else {
            b = &b + &t;
        }
    }
    // divide by w^{3 dmax}
    let k = 3 * dmax;
    if k % 2 == 0 {
        RatExpr::from_parts(n, a, b, dpow(k / 2))
    } else {
        // (a + b w) / w^k = (b D + a w) / D^{(k+1)/2}
        RatExpr::from_parts(n, &b * &dg, a, dpow(k.div_ceil(2)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p.into(), d.into())
    }

    #[test]
    fn weights_and_homogeneity() {
        let f = InvariantPoly::new(Family::Conformal).with_term(q(1, 1), &[(2, 1)]).with_term(q(1, 1), &[(3, 1)]);
        assert_eq!(f.validate(3), Err(Error::NotHomogeneous));
        let g = InvariantPoly::new(Family::Conformal).with_term(q(1, 1), &[(2, 3)]).with_term(q(-2, 1), &[(3, 2)]);
        assert!(g.validate(3).is_ok());
        assert_eq!(g.weights().into_iter().collect::<Vec<_>>(), vec![6]);
    }

    #[test]
    fn symbol_ranges() {
        let f = InvariantPoly::symbol(Family::Euclidean, 3);
        assert!(matches!(f.validate(2), Err(Error::SymbolOutOfRange { .. })));
        let g = InvariantPoly::symbol(Family::Conformal, 1);
        assert!(matches!(g.validate(2), Err(Error::SymbolOutOfRange { .. })));
    }

    #[test]
    fn display() {
        let f = InvariantPoly::new(Family::Euclidean).with_term(q(1, 2), &[(1, 2)]).with_term(q(-1, 2), &[(2, 1)]);
        assert_eq!(f.to_string(), "1/2*t1^2 - 1/2*t2");
    }

    #[test]
    fn cleared_powers() {
        let w3 = RatExpr::w_pow(2, 3);
        let pde = InvariantPde::from_normal_form(Family::Euclidean, 2, RatExpr::w_pow(2, -3)).unwrap();
        assert_eq!(pde.cleared, w3);
        assert_eq!(pde.cleared_w_power(), Some(3));
        let plain = RatExpr::from_poly(2, Poly::var(VarId::du(1))).inv().unwrap();
        let pde = InvariantPde::from_normal_form(Family::Euclidean, 2, plain).unwrap();
        assert_eq!(pde.cleared_w_power(), None);
    }

    #[test]
    fn cancelling_terms_vanish() {
        let mut f = InvariantPoly::symbol(Family::Euclidean, 1);
        f.add_term(q(-1, 1), &[(1, 1)]);
        assert!(f.is_zero());
    }
}
