//! The Möbius group `SO(1, n+2)` in the light-cone model: graded generators,
//! the action on 2-jets, the traceless shape operator and its traces.
//!
//! Minkowski components are ordered `(p, e_0, e_1..e_n, q)` with
//! `⟨p, q⟩ = 1` and `e_0..e_n` orthonormal.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euclidean::{check_rotation, over_w_power, random_rotation, reduced_shape_matrix, shape_operator, trace_powers, PolyMat};
use crate::expr::{ExprMatrix, Poly, RatExpr};
use crate::invariant::{assemble, Family, InvariantPde, InvariantPoly};
use crate::jet::{regraph, JetPoint2};
use crate::series::{Coeff, Mat, Taylor2};
use crate::Rational;

/// Tolerance for `Mᵀ η M = η` on floating matrices.
pub const METRIC_TOL: f64 = 1e-12;
/// Relative tolerance for the null condition in [`project`].
pub const NULL_TOL: f64 = 1e-9;

fn p_idx() -> usize {
    0
}

fn e_idx(a: usize) -> usize {
    1 + a
}

fn q_idx(n: usize) -> usize {
    n + 2
}

/// `η` on `R^{1, n+2}`.
pub fn minkowski_metric<T: Coeff>(n: usize) -> Mat<T> {
    let d = n + 3;
    Mat::from_fn(d, d, |i, j| {
        let pq = (i == p_idx() && j == q_idx(n)) || (i == q_idx(n) && j == p_idx());
        let ee = i == j && i != p_idx() && i != q_idx(n);
        if pq || ee {
            T::one()
        } else {
            T::zero()
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinkowskiVector<T = f64>(pub Vec<T>);

impl<T: Coeff> MinkowskiVector<T> {
    /// Jet dimension `n` of the ambient `R^{1, n+2}`.
    pub fn n(&self) -> usize {
        self.0.len() - 3
    }

    pub fn inner(&self, other: &Self) -> T {
        let n = self.n();
        let (a, b) = (&self.0, &other.0);
        let mut acc = a[p_idx()].clone() * b[q_idx(n)].clone() + a[q_idx(n)].clone() * b[p_idx()].clone();
        for k in 0..=n {
            acc = acc + a[e_idx(k)].clone() * b[e_idx(k)].clone();
        }
        acc
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut v = vec![T::zero(); n + 3];
        v[index] = T::one();
        MinkowskiVector(v)
    }
}

#[derive(Serialize, Deserialize)]
struct MinkowskiJson {
    basis: String,
    v: Vec<f64>,
}

impl MinkowskiVector<f64> {
    pub fn to_json(&self) -> String {
        let n = self.n();
        let mut names = vec!["p".to_string()];
        names.extend((0..=n).map(|k| format!("e{k}")));
        names.push("q".into());
        serde_json::to_string(&MinkowskiJson { basis: names.join(","), v: self.0.clone() }).expect("vector serializes")
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let raw: MinkowskiJson =
            serde_json::from_str(src).map_err(|e| Error::Parse { position: e.column(), message: e.to_string() })?;
        if raw.v.len() < 4 {
            return Err(Error::InvalidInput("Minkowski vectors need at least 4 components".into()));
        }
        let expected = MinkowskiVector(raw.v.clone()).to_json();
        let want: MinkowskiJson = serde_json::from_str(&expected).expect("round trip");
        if raw.basis.replace(' ', "") != want.basis {
            return Err(Error::InvalidInput(format!("basis must be '{}'", want.basis)));
        }
        Ok(MinkowskiVector(raw.v))
    }
}

/// `p + u e_0 + x + s(u, x) q` with `s = −½(u² + |x|²)`.
pub fn embed<T: Coeff>(u: T, x: &[T]) -> MinkowskiVector<T> {
    let half = T::one() / T::from_i64(2);
    let norm = x.iter().fold(u.clone() * u.clone(), |acc, c| acc + c.clone() * c.clone());
    let mut v = Vec::with_capacity(x.len() + 3);
    v.push(T::one());
    v.push(u);
    v.extend(x.iter().cloned());
    v.push(-(half * norm));
    MinkowskiVector(v)
}

/// `(u, x) = (v_{e_0}, v_{e_1..e_n}) / v_p` for a null vector.
pub fn project<T: Coeff>(v: &MinkowskiVector<T>) -> Result<(T, Vec<T>)> {
    let n = v.n();
    let scale = v.0.iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max);
    let lambda = v.0[p_idx()].clone();
    if lambda.is_zero() || lambda.is_negligible(scale) {
        return Err(Error::ChartBoundary);
    }
    let norm = v.inner(v);
    let null = if T::EXACT { norm.is_zero() } else { norm.to_f64().abs() <= NULL_TOL * scale * scale };
    if !null {
        return Err(Error::NotOnCone);
    }
    let u = v.0[e_idx(0)].clone() / lambda.clone();
    let x = (1..=n).map(|k| v.0[e_idx(k)].clone() / lambda.clone()).collect();
    Ok((u, x))
}

/// Elements of the graded pieces `G^{-1}`, `G^0 = CO(E)`, `G^{+1}` and the
/// one-parameter subgroup `exp t(e_0 ∧ p)`. Vectors live in `E = span(e_0..e_n)`.
#[derive(Clone, Debug, PartialEq)]
pub enum GradedGenerator<T = f64> {
    GMinus(Vec<T>),
    Rotation(Mat<T>),
    Dilation(T),
    GPlus(Vec<T>),
    AE0(T),
}

/// A matrix preserving `η`.
#[derive(Clone, Debug, PartialEq)]
pub struct MoebiusElement<T = f64> {
    m: Mat<T>,
}

impl<T: Coeff> MoebiusElement<T> {
    pub fn new(m: Mat<T>) -> Result<Self> {
        if !m.is_square() || m.rows() < 4 {
            return Err(Error::NotMoebius);
        }
        let n = m.rows() - 3;
        if metric_defect(&m, n) > if T::EXACT { 0.0 } else { METRIC_TOL } {
            return Err(Error::NotMoebius);
        }
        Ok(MoebiusElement { m })
    }

    pub fn identity(n: usize) -> Self {
        MoebiusElement { m: Mat::identity(n + 3) }
    }

    pub fn n(&self) -> usize {
        self.m.rows() - 3
    }

    pub fn matrix(&self) -> &Mat<T> {
        &self.m
    }

    /// `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        MoebiusElement { m: &self.m * &other.m }
    }

    pub fn apply(&self, v: &MinkowskiVector<T>) -> MinkowskiVector<T> {
        MinkowskiVector(self.m.matvec(&v.0))
    }

    pub fn to_f64(&self) -> MoebiusElement<f64> {
        MoebiusElement { m: self.m.map(Coeff::to_f64) }
    }
}

/// `max |Mᵀ η M − η|` (exactly zero for exact preservation).
pub fn metric_defect<T: Coeff>(m: &Mat<T>, n: usize) -> f64 {
    let eta = minkowski_metric::<T>(n);
    (&(&(&m.transpose() * &eta) * m) - &eta).max_abs()
}

/// The displayed block matrix of a graded generator in dimension `n`.
pub fn build_element<T: Coeff>(n: usize, gen: &GradedGenerator<T>) -> Result<MoebiusElement<T>> {
    let d = n + 3;
    let half = T::one() / T::from_i64(2);
    let mut m = Mat::<T>::identity(d);
    let check_len = |xi: &[T]| {
        if xi.len() == n + 1 {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: n + 1, found: xi.len() })
        }
    };
    let norm2 = |xi: &[T]| xi.iter().fold(T::zero(), |acc, c| acc + c.clone() * c.clone());
    match gen {
        GradedGenerator::GMinus(xi) => {
            check_len(xi)?;
            // p ↦ p − ξ − ½|ξ|² q,  e_a ↦ e_a + ξ_a q
            for a in 0..=n {
                m[(e_idx(a), p_idx())] = -xi[a].clone();
                m[(q_idx(n), e_idx(a))] = xi[a].clone();
            }
            m[(q_idx(n), p_idx())] = -(half * norm2(xi));
        }
        GradedGenerator::GPlus(xi) => {
            check_len(xi)?;
            // e_a ↦ e_a + ξ_a p,  q ↦ q − ξ − ½|ξ|² p
            for a in 0..=n {
                m[(p_idx(), e_idx(a))] = xi[a].clone();
                m[(e_idx(a), q_idx(n))] = -xi[a].clone();
            }
            m[(p_idx(), q_idx(n))] = -(half * norm2(xi));
        }
        GradedGenerator::Rotation(b) => {
            if b.rows() != n + 1 {
                return Err(Error::DimensionMismatch { expected: n + 1, found: b.rows() });
            }
            check_rotation(b)?;
            for a in 0..=n {
                for c in 0..=n {
                    m[(e_idx(a), e_idx(c))] = b[(a, c)].clone();
                }
            }
        }
        GradedGenerator::Dilation(a) => {
            if a.to_f64() <= 0.0 {
                return Err(Error::NonPositiveDilation);
            }
            m[(p_idx(), p_idx())] = a.clone();
            m[(q_idx(n), q_idx(n))] = T::one() / a.clone();
        }
        GradedGenerator::AE0(t) => {
            let mut xi = vec![T::zero(); n + 1];
            xi[0] = -t.clone();
            return build_element(n, &GradedGenerator::GPlus(xi));
        }
    }
    Ok(MoebiusElement { m })
}

/// Product of generators, left to right.
pub fn build_word<T: Coeff>(n: usize, word: &[GradedGenerator<T>]) -> Result<MoebiusElement<T>> {
    word.iter().try_fold(MoebiusElement::identity(n), |acc, g| Ok(acc.compose(&build_element(n, g)?)))
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum GeneratorJson {
    GMinus(Vec<f64>),
    Rotation(Vec<Vec<f64>>),
    Dilation(f64),
    GPlus(Vec<f64>),
    AE0(f64),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ElementJson {
    Matrix { matrix: Vec<Vec<f64>> },
    Word { word: Vec<GeneratorJson> },
}

impl MoebiusElement<f64> {
    /// Reads `{"matrix": [[..]]}` (validated against `η`) or
    /// `{"word": [{"g_minus": [..]}, {"rotation": [[..]]}, {"dilation": a}, {"g_plus": [..]}, {"a_e0": t}]}`.
    pub fn from_json(src: &str, n: usize) -> Result<Self> {
        let raw: ElementJson =
            serde_json::from_str(src).map_err(|e| Error::Parse { position: e.column(), message: e.to_string() })?;
        match raw {
            ElementJson::Matrix { matrix } => {
                if matrix.len() != n + 3 || matrix.iter().any(|r| r.len() != n + 3) {
                    return Err(Error::DimensionMismatch { expected: n + 3, found: matrix.len() });
                }
                MoebiusElement::new(Mat::from_rows(matrix))
            }
            ElementJson::Word { word } => {
                let gens: Vec<GradedGenerator> = word
                    .into_iter()
                    .map(|g| match g {
                        GeneratorJson::GMinus(v) => GradedGenerator::GMinus(v),
                        GeneratorJson::Rotation(b) => GradedGenerator::Rotation(Mat::from_rows(b)),
                        GeneratorJson::Dilation(a) => GradedGenerator::Dilation(a),
                        GeneratorJson::GPlus(v) => GradedGenerator::GPlus(v),
                        GeneratorJson::AE0(t) => GradedGenerator::AE0(t),
                    })
                    .collect();
                build_word(n, &gens)
            }
        }
    }

    /// `g_minus(ξ₁) · rotation(B) · dilation(a) · g_plus(ξ₂) · a_e0(t)` with
    /// `|ξ_i| ≤ bound`, `|log a| ≤ bound`, `|t| ≤ bound` and `B = exp(S)`,
    /// `‖S‖ ≤ bound`.
    pub fn random_near_identity(n: usize, rng: &mut impl Rng, bound: f64) -> Self {
        let ball = |rng: &mut dyn rand::RngCore| {
            let v: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
            let r = rng.gen_range(0.0..=bound);
            v.into_iter().map(|x| x * r / norm).collect::<Vec<f64>>()
        };
        let xi1 = ball(rng);
        let xi2 = ball(rng);
        let b = random_rotation(n + 1, rng, bound);
        let a = rng.gen_range(-bound..=bound).exp();
        let t = rng.gen_range(-bound..=bound);
        let word = [
            GradedGenerator::GMinus(xi1),
            GradedGenerator::Rotation(b),
            GradedGenerator::Dilation(a),
            GradedGenerator::GPlus(xi2),
            GradedGenerator::AE0(t),
        ];
        build_word(n, &word).expect("generated parameters are valid")
    }
}

/// Lifts the quadratic graph of `p` to the cone, applies `M`, renormalizes
/// the `p`-component to 1 and re-graphs.
pub fn moebius_act<T: Coeff>(m: &MoebiusElement<T>, p: &JetPoint2<T>) -> Result<JetPoint2<T>> {
    let n = p.n;
    if m.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.n() });
    }
    let half = T::one() / T::from_i64(2);
    let u = p.taylor();
    let xs: Vec<Taylor2<T>> = (0..n)
        .map(|i| {
            let mut xi = Taylor2::variable(n, i);
            xi.c0 = p.x[i].clone();
            xi
        })
        .collect();
    let norm = xs.iter().fold(u.mul(&u), |acc, x| &acc + &x.mul(x));
    let s = norm.scale(&(-half));
    let mut lifted = Vec::with_capacity(n + 3);
    lifted.push(Taylor2::one(n));
    lifted.push(u);
    lifted.extend(xs);
    lifted.push(s);
    let image: Vec<Taylor2<T>> = (0..n + 3)
        .map(|a| {
            let mut acc = Taylor2::zero(n);
            for (b, comp) in lifted.iter().enumerate() {
                let c = &m.m[(a, b)];
                if !c.is_zero() {
                    acc = &acc + &comp.scale(c);
                }
            }
            acc
        })
        .collect();
    let lambda = &image[p_idx()];
    let scale = image.iter().map(|c| c.c0.to_f64().abs()).fold(0.0, f64::max);
    if lambda.c0.is_zero() || lambda.c0.is_negligible(scale) {
        return Err(Error::ChartBoundary);
    }
    let inv = lambda.recip()?;
    let uu = image[e_idx(0)].mul(&inv);
    let xx: Vec<Taylor2<T>> = (1..=n).map(|k| image[e_idx(k)].mul(&inv)).collect();
    regraph(&uu, &xx)
}

/// `A° = A − (tr A / n) I`.
pub fn conformal_shape(n: usize) -> ExprMatrix {
    let a = shape_operator(n);
    let h = a.trace().scale(&Rational::new(1.into(), (n as i64).into()));
    a.sub(&ExprMatrix::identity(n, n).scale(&h))
}

/// `P° = P − (tr P / n) I`, so that `A° = P° / (det g · w)`.
pub fn reduced_conformal_matrix(n: usize) -> PolyMat {
    let mut p = reduced_shape_matrix(n);
    let tr = p.iter().enumerate().fold(Poly::zero(), |acc, (i, r)| &acc + &r[i]);
    let h = tr.scale(&Rational::new(1.into(), (n as i64).into()));
    for (i, row) in p.iter_mut().enumerate() {
        row[i] = &row[i] - &h;
    }
    p
}

/// `T°_h = tr(P°^h)` for `h = 2..=n`, keyed by `h`; `τ°_h = T°_h / w^{3h}`.
pub fn conformal_trace_numerators(n: usize) -> Result<BTreeMap<usize, Poly>> {
    if n < 2 {
        return Err(Error::NoInvariants);
    }
    let traces = trace_powers(&reduced_conformal_matrix(n), n);
    Ok(traces.into_iter().enumerate().skip(1).map(|(i, t)| (i + 1, t)).collect())
}

/// `τ°_h = tr(A°^h)` for `h = 2..=n`.
pub fn conformal_traces(n: usize) -> Result<Vec<RatExpr>> {
    Ok(conformal_trace_numerators(n)?.iter().map(|(&h, t)| over_w_power(n, t, h)).collect())
}

/// Substitutes `τ°_h` into a weighted-homogeneous polynomial and clears the
/// positive denominator.
pub fn generate_conformal_pde(f: &InvariantPoly, n: usize) -> Result<InvariantPde> {
    if f.family() != Family::Conformal {
        return Err(Error::InvalidInput("expected a polynomial in c2..cn".into()));
    }
    if n < 2 {
        return Err(Error::NoInvariants);
    }
    if f.is_zero() {
        return Err(Error::EmptyEquation);
    }
    f.validate(n)?;
    let form = assemble(f, n, &conformal_trace_numerators(n)?)?;
    InvariantPde::from_normal_form(Family::Conformal, n, form)
}

/// `tr(A°^h)` for `h = 2..=n` from floating matrices.
pub fn conformal_traces_at(p: &JetPoint2) -> Vec<f64> {
    let n = p.n;
    let a = crate::euclidean::shape_operator_at(p);
    let h = a.trace() / n as f64;
    let a0 = &a - &Mat::identity(n).scale(&h);
    let mut pow = a0.clone();
    let mut out = Vec::new();
    for _ in 2..=n {
        pow = &pow * &a0;
        out.push(pow.trace());
    }
    out
}
