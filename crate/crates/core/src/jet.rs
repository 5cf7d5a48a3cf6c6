//! Second-order jet points, graph lifts, truncated total derivatives, the
//! contact system and the vector-group action on the top fiber.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{RatExpr, VarId, VarKind};
use crate::series::{Coeff, Mat, Taylor2, Taylor2Map};
use crate::Rational;

/// Symmetry tolerance applied to floating `d2u` on ingestion.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// A point `(u, x, u_i, u_ij)` of `J²` in an admissible chart.
#[derive(Clone, Debug, PartialEq)]
pub struct JetPoint2<T = f64> {
    pub n: usize,
    pub u: T,
    pub x: Vec<T>,
    pub du: Vec<T>,
    pub d2u: Mat<T>,
}

impl<T: Coeff> JetPoint2<T> {
    /// Validates shapes and symmetry; floating `d2u` within [`SYMMETRY_TOL`]
    /// is symmetrized.
    pub fn new(u: T, x: Vec<T>, du: Vec<T>, d2u: Mat<T>) -> Result<Self> {
        let n = x.len();
        if du.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: du.len() });
        }
        if d2u.rows() != n || d2u.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: d2u.rows() });
        }
        if !T::EXACT {
            let finite = std::iter::once(&u)
                .chain(&x)
                .chain(&du)
                .chain(d2u.to_rows().iter().flatten())
                .all(|c| c.to_f64().is_finite());
            if !finite {
                return Err(Error::InvalidInput("jet entries must be finite".into()));
            }
        }
        if !d2u.is_symmetric(SYMMETRY_TOL) {
            return Err(Error::NotSymmetric);
        }
        let d2u = d2u.symmetrized();
        Ok(JetPoint2 { n, u, x, du, d2u })
    }

    pub fn zero(n: usize) -> Self {
        JetPoint2 { n, u: T::zero(), x: vec![T::zero(); n], du: vec![T::zero(); n], d2u: Mat::zeros(n, n) }
    }

    /// The coordinate value, when `v` is a coordinate of `J²` in dimension `n`.
    pub fn coordinate(&self, v: VarId) -> Option<T> {
        let ix = v.indices();
        if ix.iter().any(|&i| i == 0 || i > self.n) {
            return None;
        }
        match (v.kind(), ix.len()) {
            (VarKind::U, _) => Some(self.u.clone()),
            (VarKind::X, 1) => Some(self.x[ix[0] - 1].clone()),
            (VarKind::Deriv, 1) => Some(self.du[ix[0] - 1].clone()),
            (VarKind::Deriv, 2) => Some(self.d2u[(ix[0] - 1, ix[1] - 1)].clone()),
            _ => None,
        }
    }

    /// The quadratic Taylor graph `y ↦ u + du·y + ½ yᵀ d2u y` about `x`.
    pub fn taylor(&self) -> Taylor2<T> {
        Taylor2 { c0: self.u.clone(), c1: self.du.clone(), c2: self.d2u.clone() }
    }

    pub fn to_f64(&self) -> JetPoint2<f64> {
        JetPoint2 {
            n: self.n,
            u: self.u.to_f64(),
            x: self.x.iter().map(Coeff::to_f64).collect(),
            du: self.du.iter().map(Coeff::to_f64).collect(),
            d2u: self.d2u.map(Coeff::to_f64),
        }
    }

    /// `det g = 1 + |du|²`.
    pub fn detg(&self) -> T {
        self.du.iter().fold(T::one(), |acc, d| acc + d.clone() * d.clone())
    }
}

impl JetPoint2<f64> {
    /// Value lookup for numeric evaluation; `w` is `+√det g`.
    pub fn value(&self, v: VarId) -> Option<f64> {
        if v.kind() == VarKind::W {
            return Some(self.detg().sqrt());
        }
        self.coordinate(v)
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let raw: JetJson =
            serde_json::from_str(src).map_err(|e| Error::Parse { position: e.column(), message: e.to_string() })?;
        if raw.x.len() != raw.n {
            return Err(Error::DimensionMismatch { expected: raw.n, found: raw.x.len() });
        }
        if raw.d2u.iter().any(|r| r.len() != raw.n) {
            return Err(Error::DimensionMismatch { expected: raw.n, found: raw.d2u.len() });
        }
        if raw.d2u.len() != raw.n {
            return Err(Error::DimensionMismatch { expected: raw.n, found: raw.d2u.len() });
        }
        JetPoint2::new(raw.u, raw.x, raw.du, Mat::from_rows(raw.d2u))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&JetJson {
            n: self.n,
            u: self.u,
            x: self.x.clone(),
            du: self.du.clone(),
            d2u: self.d2u.to_rows(),
        })
        .expect("jet serializes")
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m = (self.u - other.u).abs();
        for (a, b) in self.x.iter().zip(&other.x).chain(self.du.iter().zip(&other.du)) {
            m = m.max((a - b).abs());
        }
        m.max((&self.d2u - &other.d2u).max_abs())
    }
}

#[derive(Serialize, Deserialize)]
struct JetJson {
    n: usize,
    u: f64,
    x: Vec<f64>,
    du: Vec<f64>,
    d2u: Vec<Vec<f64>>,
}

/// Reads off the 2-jet of the graph `u = f(x0 + y)` at `x0`.
pub fn lift_graph<T: Coeff>(f: &Taylor2<T>, x0: &[T]) -> Result<JetPoint2<T>> {
    if x0.len() != f.nvars() {
        return Err(Error::DimensionMismatch { expected: f.nvars(), found: x0.len() });
    }
    JetPoint2::new(f.c0.clone(), x0.to_vec(), f.c1.clone(), f.c2.clone())
}

/// `D_i^{(ℓ)} e = ∂_{x^i} e + Σ_J u_{Ji} ∂_{u_J} e` over jet orders `|J| < ℓ`.
pub fn total_derivative(e: &RatExpr, i: usize, order: usize) -> Result<RatExpr> {
    let n = e.n();
    if i == 0 || i > n {
        return Err(Error::VariableOutOfRange(format!("D_{i}"), n));
    }
    let found = e.max_jet_order();
    if found >= order {
        return Err(Error::OrderOverflow { order, found });
    }
    Ok(e.derivation(&|v: VarId| match v.kind() {
        VarKind::X if v.indices() == [i] => RatExpr::one(n),
        VarKind::X | VarKind::W => RatExpr::zero(n),
        VarKind::U | VarKind::Deriv => RatExpr::var(n, v.prolong(i).expect("jet order within bounds")),
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ContactLevel {
    /// `θ = du − u_i dx^i`.
    Zero,
    /// `θ_i = du_i − u_ij dx^j`, 1-based `i`.
    First(usize),
}

/// A one-form `Σ c_v dv`, keyed by the coordinate whose differential it multiplies.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactForm {
    pub level: ContactLevel,
    pub coefficients: BTreeMap<VarId, RatExpr>,
}

impl ContactForm {
    /// Pairs the form with a tangent vector given by its coordinate components.
    pub fn contract(&self, tangent: &BTreeMap<VarId, RatExpr>) -> RatExpr {
        let n = self.coefficients.values().next().map_or(0, RatExpr::n);
        let mut acc = RatExpr::zero(n);
        for (v, c) in &self.coefficients {
            if let Some(t) = tangent.get(v) {
                acc = &acc + &(c * t);
            }
        }
        acc
    }
}

/// `θ, θ_1, .., θ_n`.
pub fn contact_forms(n: usize) -> Vec<ContactForm> {
    let mut out = Vec::with_capacity(n + 1);
    let mut theta = BTreeMap::new();
    theta.insert(VarId::u(), RatExpr::one(n));
    for i in 1..=n {
        theta.insert(VarId::x(i), -&RatExpr::var(n, VarId::du(i)));
    }
    out.push(ContactForm { level: ContactLevel::Zero, coefficients: theta });
    for i in 1..=n {
        let mut c = BTreeMap::new();
        c.insert(VarId::du(i), RatExpr::one(n));
        for j in 1..=n {
            c.insert(VarId::x(j), -&RatExpr::var(n, VarId::d2u(i, j)));
        }
        out.push(ContactForm { level: ContactLevel::First(i), coefficients: c });
    }
    out
}

/// Tangent of the second-order lift along `∂/∂x^j`, in jet coordinates:
/// `dx^j ↦ 1`, `du ↦ u_j`, `du_i ↦ u_ij`.
pub fn lift_tangent(n: usize, j: usize) -> BTreeMap<VarId, RatExpr> {
    let mut t = BTreeMap::new();
    for k in 1..=n {
        t.insert(VarId::x(k), if k == j { RatExpr::one(n) } else { RatExpr::zero(n) });
        t.insert(VarId::du(k), RatExpr::var(n, VarId::d2u(k, j)));
    }
    t.insert(VarId::u(), RatExpr::var(n, VarId::du(j)));
    t
}

/// Adds the symmetric matrix `v` to the second-order coordinates.
pub fn fiber_translate<T: Coeff>(p: &JetPoint2<T>, v: &Mat<T>) -> Result<JetPoint2<T>> {
    if v.rows() != p.n || v.cols() != p.n {
        return Err(Error::DimensionMismatch { expected: p.n, found: v.rows() });
    }
    let tol = if T::EXACT { 0.0 } else { SYMMETRY_TOL };
    if !v.is_symmetric(tol) {
        return Err(Error::NotSymmetric);
    }
    Ok(JetPoint2 { d2u: &p.d2u + v, ..p.clone() })
}

/// Largest `‖L⁻¹‖·‖L‖` accepted for a floating chart change; beyond it the
/// image tangent plane is treated as vertical.
pub const ADMISSIBLE_COND: f64 = 1e10;

/// Re-graphs a parametrized hypersurface `y ↦ (U(y), X(y))` as `u = f(x)`
/// near `X(0)` and returns its 2-jet there.
pub fn regraph<T: Coeff>(u: &Taylor2<T>, x: &[Taylor2<T>]) -> Result<JetPoint2<T>> {
    let n = x.len();
    let x0: Vec<T> = x.iter().map(|c| c.c0.clone()).collect();
    let shifted = Taylor2Map::new(x.iter().map(Taylor2::without_constant).collect())?;
    let l = shifted.linear_part();
    let linv = l.inverse().ok_or(Error::NonAdmissible)?;
    if !T::EXACT && linv.max_abs() * l.max_abs().max(1.0) > ADMISSIBLE_COND {
        return Err(Error::NonAdmissible);
    }
    let inv = shifted.invert().map_err(|e| match e {
        Error::NotInvertible => Error::NonAdmissible,
        other => other,
    })?;
    let f = u.compose(&inv)?;
    let d2u = if T::EXACT { f.c2 } else { f.c2.symmetrized() };
    debug_assert_eq!(d2u.rows(), n);
    Ok(JetPoint2 { n, u: f.c0, x: x0, du: f.c1, d2u })
}

/// Exact rational jet from integer-over-denominator data, used by exact tests.
pub fn rational_jet(u: Rational, x: Vec<Rational>, du: Vec<Rational>, d2u: Vec<Vec<Rational>>) -> Result<JetPoint2<Rational>> {
    JetPoint2::new(u, x, du, Mat::from_rows(d2u))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64) -> Rational {
        Rational::from_integer(p.into())
    }

    #[test]
    fn lift_examples() {
        let zero = Taylor2::<f64>::zero(2);
        let p = lift_graph(&zero, &[0.0, 0.0]).unwrap();
        assert_eq!(p, JetPoint2::zero(2));

        let half = Taylor2::new(0.0, vec![0.0, 0.0], Mat::identity(2)).unwrap();
        let p = lift_graph(&half, &[0.0, 0.0]).unwrap();
        assert_eq!(p.d2u, Mat::identity(2));

        let lin = Taylor2::new(3.0, vec![2.0, 0.0], Mat::zeros(2, 2)).unwrap();
        let p = lift_graph(&lin, &[0.0, 0.0]).unwrap();
        assert_eq!((p.u, p.du.clone()), (3.0, vec![2.0, 0.0]));
        assert!(p.d2u.max_abs() == 0.0);
    }

    #[test]
    fn total_derivative_examples() {
        let n = 2;
        let u = RatExpr::var(n, VarId::u());
        assert_eq!(total_derivative(&u, 1, 1).unwrap(), RatExpr::var(n, VarId::du(1)));
        let u2 = RatExpr::var(n, VarId::du(2));
        assert_eq!(total_derivative(&u2, 1, 2).unwrap(), RatExpr::var(n, VarId::d2u(1, 2)));
        let x2 = RatExpr::var(n, VarId::x(2));
        assert!(total_derivative(&x2, 1, 2).unwrap().is_zero());
        assert_eq!(total_derivative(&u2, 1, 1), Err(Error::OrderOverflow { order: 1, found: 1 }));
    }

    #[test]
    fn total_derivative_of_radical() {
        let n = 2;
        let w = RatExpr::w(n);
        let d = total_derivative(&w, 1, 2).unwrap();
        // D_1 w = (u_1 u_11 + u_2 u_12) / w
        let s = &(&RatExpr::var(n, VarId::du(1)) * &RatExpr::var(n, VarId::d2u(1, 1)))
            + &(&RatExpr::var(n, VarId::du(2)) * &RatExpr::var(n, VarId::d2u(1, 2)));
        assert_eq!(d, s.checked_div(&w).unwrap());
    }

    #[test]
    fn contact_system_shape() {
        let one = contact_forms(1);
        assert_eq!(one.len(), 2);
        assert_eq!(one[0].coefficients[&VarId::x(1)], -&RatExpr::var(1, VarId::du(1)));
        assert_eq!(one[1].coefficients[&VarId::x(1)], -&RatExpr::var(1, VarId::d2u(1, 1)));
        assert_eq!(contact_forms(2).len(), 3);
        for j in 1..=2 {
            for f in contact_forms(2) {
                assert!(f.contract(&lift_tangent(2, j)).is_zero());
            }
        }
    }

    #[test]
    fn fiber_translation() {
        let p = rational_jet(q(1), vec![q(0), q(2)], vec![q(1), q(-1)], vec![vec![q(1), q(2)], vec![q(2), q(3)]]).unwrap();
        let v = Mat::from_rows(vec![vec![q(1), q(5)], vec![q(5), q(-2)]]);
        let moved = fiber_translate(&p, &v).unwrap();
        assert_eq!(fiber_translate(&moved, &v.scale(&q(-1))).unwrap(), p);
        assert_eq!(fiber_translate(&p, &Mat::zeros(2, 2)).unwrap(), p);
        let bad = Mat::from_rows(vec![vec![q(0), q(1)], vec![q(0), q(0)]]);
        assert_eq!(fiber_translate(&p, &bad), Err(Error::NotSymmetric));
    }

    #[test]
    fn json_ingestion_symmetrizes() {
        let src = r#"{"n":2,"u":0.0,"x":[0,0],"du":[1,0],"d2u":[[1,2],[2.0000000000001,3]]}"#;
        let p = JetPoint2::from_json(src).unwrap();
        assert_eq!(p.d2u[(0, 1)], p.d2u[(1, 0)]);
        let bad = r#"{"n":2,"u":0.0,"x":[0,0],"du":[1,0],"d2u":[[1,2],[2.1,3]]}"#;
        assert_eq!(JetPoint2::from_json(bad), Err(Error::NotSymmetric));
        assert_eq!(JetPoint2::from_json(&p.to_json()).unwrap(), p);
    }
}
