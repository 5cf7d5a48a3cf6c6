//! The Euclidean motion group acting on graphs: metric data, shape operator,
//! power traces, equation generation and the prolonged action on 2-jets.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::expr::{detg, ExprMatrix, Poly, RatExpr, VarId};
use crate::invariant::{assemble, Family, InvariantPde, InvariantPoly};
use crate::jet::{regraph, JetPoint2};
use crate::series::{Coeff, Mat, Taylor2};
use crate::Rational;

/// Orthogonality tolerance for floating rotations.
pub const ROTATION_TOL: f64 = 1e-12;

/// Symbolic first and second fundamental forms of the graph `u = f(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricData {
    /// `g_ij = δ_ij + u_i u_j`.
    pub g: ExprMatrix,
    /// `(det g · δ_ij − u_i u_j) / det g`.
    pub ginv: ExprMatrix,
    pub detg: RatExpr,
    /// `u_ij / w`.
    pub beta: ExprMatrix,
}

fn du(n: usize, i: usize) -> RatExpr {
    RatExpr::var(n, VarId::du(i + 1))
}

fn d2u(n: usize, i: usize, j: usize) -> RatExpr {
    RatExpr::var(n, VarId::d2u(i + 1, j + 1))
}

pub fn metric_data(n: usize) -> MetricData {
    let d = RatExpr::from_poly(n, detg(n));
    let dinv = d.inv().expect("det g is nonzero");
    let kron = |i: usize, j: usize| if i == j { RatExpr::one(n) } else { RatExpr::zero(n) };
    let g = ExprMatrix::from_fn(n, n, n, |i, j| &kron(i, j) + &(&du(n, i) * &du(n, j)));
    let ginv = ExprMatrix::from_fn(n, n, n, |i, j| &(&(&kron(i, j) * &d) - &(&du(n, i) * &du(n, j))) * &dinv);
    let winv = RatExpr::w(n).inv().expect("w is nonzero");
    let beta = ExprMatrix::from_fn(n, n, n, |i, j| &d2u(n, i, j) * &winv);
    MetricData { g, ginv, detg: d, beta }
}

/// `A = g⁻¹ β` assembled entrywise from [`metric_data`].
pub fn shape_operator(n: usize) -> ExprMatrix {
    let m = metric_data(n);
    m.ginv.matmul(&m.beta)
}

/// Square matrix of polynomials.
pub(crate) type PolyMat = Vec<Vec<Poly>>;

pub(crate) fn poly_matmul(a: &PolyMat, b: &PolyMat) -> PolyMat {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = Poly::zero();
                    for k in 0..n {
                        if !a[i][k].is_zero() && !b[k][j].is_zero() {
                            acc = &acc + &(&a[i][k] * &b[k][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub(crate) fn poly_trace(a: &PolyMat) -> Poly {
    a.iter().enumerate().fold(Poly::zero(), |acc, (i, r)| &acc + &r[i])
}

/// `P = (det g · I − u uᵀ) H` with `H = (u_ij)`, so that `A = P / (det g · w)`.
pub fn reduced_shape_matrix(n: usize) -> PolyMat {
    let d = detg(n);
    let u: Vec<Poly> = (1..=n).map(|i| Poly::var(VarId::du(i))).collect();
    let h: PolyMat = (1..=n).map(|i| (1..=n).map(|j| Poly::var(VarId::d2u(i, j))).collect()).collect();
    let c: PolyMat = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let uu = &u[i] * &u[j];
                    if i == j {
                        &d - &uu
                    } else {
                        -&uu
                    }
                })
                .collect()
        })
        .collect();
    poly_matmul(&c, &h)
}

/// `tr(M^m)` for `m = 1..=n`.
pub(crate) fn trace_powers(m: &PolyMat, count: usize) -> Vec<Poly> {
    let mut out = Vec::with_capacity(count);
    let mut pow = m.clone();
    for k in 1..=count {
        if k > 1 {
            pow = poly_matmul(&pow, m);
        }
        out.push(poly_trace(&pow));
    }
    out
}

/// `T_m = tr(P^m)`, so that `τ_m = T_m / w^{3m}`.
pub fn power_trace_numerators(n: usize) -> Vec<Poly> {
    trace_powers(&reduced_shape_matrix(n), n)
}

/// `N / w^{3m}` as a normal form.
pub(crate) fn over_w_power(n: usize, num: &Poly, m: usize) -> RatExpr {
    let k = 3 * m as u32;
    let d = detg(n);
    let res = if k.is_multiple_of(2) {
        RatExpr::from_parts(n, num.clone(), Poly::zero(), d.pow(k / 2))
    } else {
        RatExpr::from_parts(n, Poly::zero(), num.clone(), d.pow(k.div_ceil(2)))
    };
    res.expect("det g is nonzero")
}

/// `τ_m = tr(A^m)`, `m = 1..=n`.
pub fn power_traces(n: usize) -> Vec<RatExpr> {
    power_trace_numerators(n).iter().enumerate().map(|(i, t)| over_w_power(n, t, i + 1)).collect()
}

/// Ring operations needed by Newton's identities.
pub trait SigmaRing: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div_int(&self, k: i64) -> Self;
}

impl SigmaRing for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn one_like(&self) -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div_int(&self, k: i64) -> Self {
        self / k as f64
    }
}

impl SigmaRing for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn one_like(&self) -> Self {
        Rational::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div_int(&self, k: i64) -> Self {
        self / Rational::from_integer(k.into())
    }
}

impl SigmaRing for RatExpr {
    fn zero_like(&self) -> Self {
        RatExpr::zero(self.n())
    }
    fn one_like(&self) -> Self {
        RatExpr::one(self.n())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div_int(&self, k: i64) -> Self {
        self.scale(&Rational::new(1.into(), k.into()))
    }
}

/// Elementary symmetric functions `σ_1..σ_k` from power sums `τ_1..τ_k`:
/// `k σ_k = Σ_{m=1}^{k} (−1)^{m−1} σ_{k−m} τ_m`.
pub fn newton_sigma<T: SigmaRing>(taus: &[T]) -> Vec<T> {
    let Some(first) = taus.first() else {
        return Vec::new();
    };
    let mut sigma = vec![first.one_like()];
    for k in 1..=taus.len() {
        let mut acc = first.zero_like();
        for m in 1..=k {
            let t = sigma[k - m].mul(&taus[m - 1]);
            acc = if m % 2 == 1 { acc.add(&t) } else { acc.sub(&t) };
        }
        sigma.push(acc.div_int(k as i64));
    }
    sigma.remove(0);
    sigma
}

/// Substitutes `τ_m` into a Euclidean invariant polynomial and clears the
/// positive denominator.
pub fn generate_euclidean_pde(f: &InvariantPoly, n: usize) -> Result<InvariantPde> {
    if f.family() != Family::Euclidean {
        return Err(Error::InvalidInput("expected a polynomial in t1..tn".into()));
    }
    if f.is_zero() {
        return Err(Error::EmptyEquation);
    }
    f.validate(n)?;
    let used: std::collections::BTreeSet<usize> = f.terms().flat_map(|(m, _)| m.iter().map(|&(k, _)| k)).collect();
    let all = power_trace_numerators(n);
    let numerators: BTreeMap<usize, Poly> = used.into_iter().map(|k| (k, all[k - 1].clone())).collect();
    let form = assemble(f, n, &numerators)?;
    InvariantPde::from_normal_form(Family::Euclidean, n, form)
}

/// Numeric shape operator `g⁻¹ β` assembled from floating matrices.
pub fn shape_operator_at(p: &JetPoint2) -> Mat<f64> {
    let n = p.n;
    let g = Mat::from_fn(n, n, |i, j| (if i == j { 1.0 } else { 0.0 }) + p.du[i] * p.du[j]);
    let w = p.detg().sqrt();
    let beta = p.d2u.scale(&(1.0 / w));
    let ginv = g.inverse().expect("g is positive definite");
    &ginv * &beta
}

/// `tr(A^m)` for `m = 1..=n` by floating matrix powers.
pub fn power_traces_at(p: &JetPoint2) -> Vec<f64> {
    let a = shape_operator_at(p);
    let mut pow = a.clone();
    let mut out = Vec::with_capacity(p.n);
    for m in 1..=p.n {
        if m > 1 {
            pow = &pow * &a;
        }
        out.push(pow.trace());
    }
    out
}

/// `p ↦ R p + t` on `(u, x) ∈ R^{n+1}`, with `u` as coordinate 0.
#[derive(Clone, Debug, PartialEq)]
pub struct EuclideanMotion<T = f64> {
    rotation: Mat<T>,
    translation: Vec<T>,
}

impl<T: Coeff> EuclideanMotion<T> {
    pub fn new(rotation: Mat<T>, translation: Vec<T>) -> Result<Self> {
        let d = rotation.rows();
        if !rotation.is_square() || translation.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: translation.len() });
        }
        check_rotation(&rotation)?;
        Ok(EuclideanMotion { rotation, translation })
    }

    pub fn identity(n: usize) -> Self {
        EuclideanMotion { rotation: Mat::identity(n + 1), translation: vec![T::zero(); n + 1] }
    }

    pub fn translation(t: Vec<T>) -> Self {
        EuclideanMotion { rotation: Mat::identity(t.len()), translation: t }
    }

    /// Jet dimension `n` (the motion acts on `R^{n+1}`).
    pub fn n(&self) -> usize {
        self.rotation.rows() - 1
    }

    pub fn rotation(&self) -> &Mat<T> {
        &self.rotation
    }

    pub fn translation_part(&self) -> &[T] {
        &self.translation
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let rotation = &self.rotation * &other.rotation;
        let rt = self.rotation.matvec(&other.translation);
        let translation = rt.into_iter().zip(&self.translation).map(|(a, b)| a + b.clone()).collect();
        EuclideanMotion { rotation, translation }
    }

    pub fn apply(&self, p: &[T]) -> Vec<T> {
        self.rotation.matvec(p).into_iter().zip(&self.translation).map(|(a, b)| a + b.clone()).collect()
    }
}

impl EuclideanMotion<f64> {
    /// `exp(S)` for a random skew `S` with operator norm at most `max_angle`,
    /// and translation entries uniform in `[−max_shift, max_shift]`.
    pub fn random(n: usize, rng: &mut impl Rng, max_angle: f64, max_shift: f64) -> Self {
        let rotation = random_rotation(n + 1, rng, max_angle);
        let translation = (0..=n).map(|_| rng.gen_range(-1.0..=1.0) * max_shift).collect();
        EuclideanMotion { rotation, translation }
    }

    /// Rotation by `angle` in the `(u, x^1)` plane of `R²`.
    pub fn planar(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        EuclideanMotion { rotation: Mat::from_rows(vec![vec![c, -s], vec![s, c]]), translation: vec![0.0, 0.0] }
    }
}

pub(crate) fn check_rotation<T: Coeff>(r: &Mat<T>) -> Result<()> {
    if !r.is_square() {
        return Err(Error::NotRotation);
    }
    let d = r.rows();
    let defect = &(&r.transpose() * r) - &Mat::identity(d);
    let det = r.determinant() - T::one();
    let bad = if T::EXACT {
        defect.max_abs() != 0.0 || !det.is_zero()
    } else {
        defect.max_abs() > ROTATION_TOL || det.to_f64().abs() > ROTATION_TOL
    };
    if bad {
        Err(Error::NotRotation)
    } else {
        Ok(())
    }
}

/// `exp(S)` by Taylor series with scaling and squaring.
pub fn expm(s: &Mat<f64>) -> Mat<f64> {
    let d = s.rows();
    let norm = s.max_abs() * d as f64;
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = s.scale(&scale);
    let mut term = Mat::identity(d);
    let mut sum = Mat::identity(d);
    for k in 1..=20 {
        term = (&term * &a).scale(&(1.0 / k as f64));
        sum = &sum + &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// A random rotation `exp(S)` of `R^d`, `S` skew with Frobenius norm at most
/// `max_angle` (which bounds its operator norm).
pub fn random_rotation(d: usize, rng: &mut impl Rng, max_angle: f64) -> Mat<f64> {
    let mut s = Mat::zeros(d, d);
    for i in 0..d {
        for j in i + 1..d {
            let v: f64 = rng.gen_range(-1.0..=1.0);
            s[(i, j)] = v;
            s[(j, i)] = -v;
        }
    }
    let frob = s.to_rows().iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    if frob > 0.0 {
        let target = rng.gen_range(0.0..=1.0) * max_angle;
        s = s.scale(&(target / frob));
    }
    expm(&s)
}

/// Pushes a 2-jet forward by re-graphing its quadratic Taylor graph.
pub fn euclidean_act<T: Coeff>(m: &EuclideanMotion<T>, p: &JetPoint2<T>) -> Result<JetPoint2<T>> {
    let n = p.n;
    if m.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.n() });
    }
    let mut graph = Vec::with_capacity(n + 1);
    graph.push(p.taylor());
    for i in 0..n {
        let mut xi = Taylor2::variable(n, i);
        xi.c0 = p.x[i].clone();
        graph.push(xi);
    }
    let image: Vec<Taylor2<T>> = (0..=n)
        .map(|a| {
            let mut acc = Taylor2::constant(n, m.translation[a].clone());
            for (b, comp) in graph.iter().enumerate() {
                let r = &m.rotation[(a, b)];
                if !r.is_zero() {
                    acc = &acc + &comp.scale(r);
                }
            }
            acc
        })
        .collect();
    regraph(&image[0], &image[1..])
}
