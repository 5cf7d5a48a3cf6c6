//! Degree-two truncated multivariate Taylor arithmetic.
//!
//! A [`Taylor2`] in `n` variables stores `c0 + c1·y + ½ yᵀ c2 y` with `c2`
//! symmetric; every product discards terms of total degree three or more.
//! Coefficients are generic over [`Coeff`], so the same code runs on exact
//! rationals (golden tests) and on `f64` (random trials).

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Num, ToPrimitive};

use crate::error::{Error, Result};
use crate::Rational;

/// Relative pivot threshold used by the floating path.
pub const FLOAT_SINGULAR_RTOL: f64 = 1e-10;

/// Scalar field used by the series algebra and the group actions.
pub trait Coeff: Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync {
    /// Exact fields compare with equality; floating fields use tolerances.
    const EXACT: bool;
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// `true` when the value must be treated as zero relative to `reference`.
    /// Exact fields ignore the reference and test for zero.
    fn is_negligible(&self, reference: f64) -> bool;
}

impl Coeff for f64 {
    const EXACT: bool = false;
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_negligible(&self, reference: f64) -> bool {
        self.abs() <= FLOAT_SINGULAR_RTOL * reference.abs().max(f64::MIN_POSITIVE)
    }
}

impl Coeff for Rational {
    const EXACT: bool = true;
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(v.into())
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_negligible(&self, _reference: f64) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

/// Small dense row-major matrix over a [`Coeff`] field.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Coeff> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.clone() * s.clone()).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out[(i, j)].clone() + a.clone() * other[(k, j)].clone();
                    out[(i, j)] = v;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    }

    /// Symmetry check; exact fields compare exactly, floats to absolute `tol`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (i + 1..self.cols).all(|j| {
                    let d = self[(i, j)].clone() - self[(j, i)].clone();
                    d.is_zero() || (!T::EXACT && d.to_f64().abs() <= tol)
                })
            })
    }

    pub fn symmetrized(&self) -> Self {
        let half = T::one() / T::from_i64(2);
        Mat::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)].clone() + self[(j, i)].clone()) * half.clone()
        })
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Gauss–Jordan inverse with largest-magnitude pivoting. Returns `None`
    /// when a pivot is negligible relative to the largest entry.
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square(), "inverse of non-square matrix");
        let n = self.rows;
        let reference = self.max_abs();
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n).max_by(|&r, &s| {
                a[(r, col)].to_f64().abs().total_cmp(&a[(s, col)].to_f64().abs())
            })?;
            // exact fields: a zero entry may be reported with magnitude 0 while a
            // nonzero one underflows; fall back to the first nonzero entry.
            let pivot = if a[(pivot, col)].is_zero() {
                (col..n).find(|&r| !a[(r, col)].is_zero())?
            } else {
                pivot
            };
            if a[(pivot, col)].is_negligible(reference) {
                return None;
            }
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let p = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] = a[(col, j)].clone() / p.clone();
                inv[(col, j)] = inv[(col, j)].clone() / p.clone();
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for j in 0..n {
                    a[(r, j)] = a[(r, j)].clone() - f.clone() * a[(col, j)].clone();
                    inv[(r, j)] = inv[(r, j)].clone() - f.clone() * inv[(col, j)].clone();
                }
            }
        }
        Some(inv)
    }

    /// Determinant by Gaussian elimination.
    pub fn determinant(&self) -> T {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = T::one();
        for col in 0..n {
            let Some(pivot) = (col..n).max_by(|&r, &s| {
                a[(r, col)].to_f64().abs().total_cmp(&a[(s, col)].to_f64().abs())
            }) else {
                return T::zero();
            };
            let pivot = if a[(pivot, col)].is_zero() {
                match (col..n).find(|&r| !a[(r, col)].is_zero()) {
                    Some(p) => p,
                    None => return T::zero(),
                }
            } else {
                pivot
            };
            if pivot != col {
                a.swap_rows(col, pivot);
                det = -det;
            }
            let p = a[(col, col)].clone();
            det = det * p.clone();
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone() / p.clone();
                for j in col..n {
                    a[(r, j)] = a[(r, j)].clone() - f.clone() * a[(col, j)].clone();
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, r: usize, s: usize) {
        if r == s {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(r * self.cols + j, s * self.cols + j);
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Coeff> Add for &Mat<T> {
    type Output = Mat<T>;
    fn add(self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

impl<T: Coeff> Sub for &Mat<T> {
    type Output = Mat<T>;
    fn sub(self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }
}

impl<T: Coeff> Mul for &Mat<T> {
    type Output = Mat<T>;
    fn mul(self, rhs: &Mat<T>) -> Mat<T> {
        self.matmul(rhs)
    }
}

/// `c0 + c1·y + ½ yᵀ c2 y`, truncated beyond total degree two.
#[derive(Clone, Debug, PartialEq)]
pub struct Taylor2<T> {
    pub c0: T,
    pub c1: Vec<T>,
    pub c2: Mat<T>,
}

impl<T: Coeff> Taylor2<T> {
    pub fn new(c0: T, c1: Vec<T>, c2: Mat<T>) -> Result<Self> {
        let n = c1.len();
        if c2.rows() != n || c2.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: c2.rows() });
        }
        if !c2.is_symmetric(0.0) {
            return Err(Error::NotSymmetric);
        }
        Ok(Taylor2 { c0, c1, c2 })
    }

    pub fn constant(n: usize, c: T) -> Self {
        Taylor2 { c0: c, c1: vec![T::zero(); n], c2: Mat::zeros(n, n) }
    }

    pub fn zero(n: usize) -> Self {
        Self::constant(n, T::zero())
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, T::one())
    }

    /// The coordinate function `y_i`.
    pub fn variable(n: usize, i: usize) -> Self {
        let mut t = Self::zero(n);
        t.c1[i] = T::one();
        t
    }

    pub fn nvars(&self) -> usize {
        self.c1.len()
    }

    pub fn scale(&self, s: &T) -> Self {
        Taylor2 {
            c0: self.c0.clone() * s.clone(),
            c1: self.c1.iter().map(|c| c.clone() * s.clone()).collect(),
            c2: self.c2.scale(s),
        }
    }

    /// The same series with its constant term removed.
    pub fn without_constant(&self) -> Self {
        Taylor2 { c0: T::zero(), ..self.clone() }
    }

    /// Truncated product; cross terms of degree three and higher are dropped.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.nvars();
        assert_eq!(n, other.nvars(), "Taylor2 variable count mismatch");
        let c0 = self.c0.clone() * other.c0.clone();
        let c1 = (0..n)
            .map(|i| self.c0.clone() * other.c1[i].clone() + other.c0.clone() * self.c1[i].clone())
            .collect();
        let c2 = Mat::from_fn(n, n, |i, j| {
            self.c0.clone() * other.c2[(i, j)].clone()
                + other.c0.clone() * self.c2[(i, j)].clone()
                + self.c1[i].clone() * other.c1[j].clone()
                + other.c1[i].clone() * self.c1[j].clone()
        });
        Taylor2 { c0, c1, c2 }
    }

    /// Truncated multiplicative inverse `(1/b0)(1 − r + r²)`, `r = (b − b0)/b0`.
    pub fn recip(&self) -> Result<Self> {
        if self.c0.is_zero() {
            return Err(Error::NonUnit);
        }
        let n = self.nvars();
        let inv0 = T::one() / self.c0.clone();
        let r = self.without_constant().scale(&inv0);
        let r2 = r.mul(&r);
        let series = &(&Self::one(n) - &r) + &r2;
        Ok(series.scale(&inv0))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    /// Evaluates the truncated polynomial at `y`.
    pub fn eval(&self, y: &[T]) -> T {
        let half = T::one() / T::from_i64(2);
        let lin = self.c1.iter().zip(y).fold(T::zero(), |acc, (c, v)| acc + c.clone() * v.clone());
        let q = self.c2.matvec(y);
        let quad = q.iter().zip(y).fold(T::zero(), |acc, (c, v)| acc + c.clone() * v.clone());
        self.c0.clone() + lin + half * quad
    }

    /// Composition `outer ∘ inner`, exact to degree two. Each inner component
    /// must vanish at the basepoint.
    pub fn compose(&self, inner: &Taylor2Map<T>) -> Result<Self> {
        let m = self.nvars();
        if inner.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: inner.len() });
        }
        if inner.components.iter().any(|c| !c.c0.is_zero()) {
            return Err(Error::BasepointMismatch);
        }
        let n = inner.nvars();
        let jac = inner.linear_part();
        let c1 = jac.transpose().matvec(&self.c1);
        let mut c2 = &(&jac.transpose() * &self.c2) * &jac;
        for (k, comp) in inner.components.iter().enumerate() {
            if !self.c1[k].is_zero() {
                c2 = &c2 + &comp.c2.scale(&self.c1[k]);
            }
        }
        debug_assert_eq!(c2.rows(), n);
        Ok(Taylor2 { c0: self.c0.clone(), c1, c2 })
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> Taylor2<U> {
        Taylor2 { c0: f(&self.c0), c1: self.c1.iter().map(&f).collect(), c2: self.c2.map(&f) }
    }
}

impl<T: Coeff> Add for &Taylor2<T> {
    type Output = Taylor2<T>;
    fn add(self, rhs: &Taylor2<T>) -> Taylor2<T> {
        assert_eq!(self.nvars(), rhs.nvars(), "Taylor2 variable count mismatch");
        Taylor2 {
            c0: self.c0.clone() + rhs.c0.clone(),
            c1: self.c1.iter().zip(&rhs.c1).map(|(a, b)| a.clone() + b.clone()).collect(),
            c2: &self.c2 + &rhs.c2,
        }
    }
}

impl<T: Coeff> Sub for &Taylor2<T> {
    type Output = Taylor2<T>;
    fn sub(self, rhs: &Taylor2<T>) -> Taylor2<T> {
        assert_eq!(self.nvars(), rhs.nvars(), "Taylor2 variable count mismatch");
        Taylor2 {
            c0: self.c0.clone() - rhs.c0.clone(),
            c1: self.c1.iter().zip(&rhs.c1).map(|(a, b)| a.clone() - b.clone()).collect(),
            c2: &self.c2 - &rhs.c2,
        }
    }
}

impl<T: Coeff> Mul for &Taylor2<T> {
    type Output = Taylor2<T>;
    fn mul(self, rhs: &Taylor2<T>) -> Taylor2<T> {
        Taylor2::mul(self, rhs)
    }
}

impl<T: Coeff> Neg for &Taylor2<T> {
    type Output = Taylor2<T>;
    fn neg(self) -> Taylor2<T> {
        self.scale(&-T::one())
    }
}

/// A map `Rⁿ → Rᵐ` given by `m` degree-two Taylor components.
#[derive(Clone, Debug, PartialEq)]
pub struct Taylor2Map<T> {
    pub components: Vec<Taylor2<T>>,
}

impl<T: Coeff> Taylor2Map<T> {
    pub fn new(components: Vec<Taylor2<T>>) -> Result<Self> {
        if let Some(first) = components.first() {
            let n = first.nvars();
            if let Some(bad) = components.iter().find(|c| c.nvars() != n) {
                return Err(Error::DimensionMismatch { expected: n, found: bad.nvars() });
            }
        }
        Ok(Taylor2Map { components })
    }

    pub fn identity(n: usize) -> Self {
        Taylor2Map { components: (0..n).map(|i| Taylor2::variable(n, i)).collect() }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.components.first().map_or(0, Taylor2::nvars)
    }

    /// The `m × n` Jacobian at the basepoint.
    pub fn linear_part(&self) -> Mat<T> {
        Mat::from_rows(self.components.iter().map(|c| c.c1.clone()).collect())
    }

    /// Componentwise composition `self ∘ inner`.
    pub fn compose(&self, inner: &Taylor2Map<T>) -> Result<Self> {
        let comps = self.components.iter().map(|c| c.compose(inner)).collect::<Result<Vec<_>>>()?;
        Ok(Taylor2Map { components: comps })
    }

    /// Second-order inverse of a square map with zero constant terms:
    /// `g(z) = L⁻¹z − ½ L⁻¹ Q(L⁻¹z, L⁻¹z)`.
    pub fn invert(&self) -> Result<Self> {
        let n = self.nvars();
        if self.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.len() });
        }
        if self.components.iter().any(|c| !c.c0.is_zero()) {
            return Err(Error::BasepointMismatch);
        }
        let linv = self.linear_part().inverse().ok_or(Error::NotInvertible)?;
        let linv_t = linv.transpose();
        // pulled-back quadratic parts L⁻ᵀ Q_j L⁻¹
        let pulled: Vec<Mat<T>> =
            self.components.iter().map(|c| &(&linv_t * &c.c2) * &linv).collect();
        let components = (0..n)
            .map(|k| {
                let mut c2 = Mat::zeros(n, n);
                for (j, q) in pulled.iter().enumerate() {
                    if !linv[(k, j)].is_zero() {
                        c2 = &c2 - &q.scale(&linv[(k, j)]);
                    }
                }
                Taylor2 { c0: T::zero(), c1: linv.row(k).to_vec(), c2 }
            })
            .collect();
        Ok(Taylor2Map { components })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn t1(c0: i64, c1: i64, c2: i64) -> Taylor2<Rational> {
        Taylor2::new(q(c0, 1), vec![q(c1, 1)], Mat::from_rows(vec![vec![q(c2, 1)]])).unwrap()
    }

    #[test]
    fn product_of_conjugates() {
        // (1 + y)(1 − y) = 1 − y², i.e. c2 = −2
        assert_eq!(t1(1, 1, 0).mul(&t1(1, -1, 0)), t1(1, 0, -2));
    }

    #[test]
    fn cubic_terms_truncated() {
        let y1 = Taylor2::<Rational>::variable(2, 0);
        let y2 = Taylor2::<Rational>::variable(2, 1);
        assert_eq!(y1.mul(&y2).mul(&y1), Taylor2::zero(2));
    }

    #[test]
    fn sum_of_series() {
        // (1 + y + ½y²) + (1 − y + ½y²) = 2 + y²
        assert_eq!(&t1(1, 1, 1) + &t1(1, -1, 1), t1(2, 0, 2));
    }

    #[test]
    fn geometric_series() {
        assert_eq!(t1(1, 0, 0).div(&t1(1, -1, 0)).unwrap(), t1(1, 1, 2));
        assert_eq!(t1(0, 1, 0).div(&t1(1, 0, 0)).unwrap(), t1(0, 1, 0));
        assert_eq!(t1(1, 0, 0).div(&t1(0, 1, 0)), Err(Error::NonUnit));
    }

    #[test]
    fn chart_denominator_expansion() {
        // 1/(1 − t y + ½ t² y²) = 1 + t y + ½ t² y² (hand expansion, t = 1/3)
        let t = q(1, 3);
        let b = Taylor2::new(
            q(1, 1),
            vec![-t.clone()],
            Mat::from_rows(vec![vec![t.clone() * t.clone()]]),
        )
        .unwrap();
        let inv = Taylor2::one(1).div(&b).unwrap();
        assert_eq!(inv.c0, q(1, 1));
        assert_eq!(inv.c1, vec![q(1, 3)]);
        assert_eq!(inv.c2[(0, 0)], q(1, 9));
    }

    #[test]
    fn compose_examples() {
        let y2 = t1(0, 0, 2);
        let id = Taylor2Map::identity(1);
        assert_eq!(y2.compose(&id).unwrap(), y2);
        let inner = Taylor2Map::new(vec![t1(0, 2, 2)]).unwrap();
        assert_eq!(t1(0, 1, 0).compose(&inner).unwrap(), t1(0, 2, 2));
        // (y + y²)² = y² + O(y³)
        let inner = Taylor2Map::new(vec![t1(0, 1, 2)]).unwrap();
        assert_eq!(y2.compose(&inner).unwrap(), y2);
        let shifted = Taylor2Map::new(vec![t1(1, 1, 0)]).unwrap();
        assert_eq!(y2.compose(&shifted), Err(Error::BasepointMismatch));
    }

    #[test]
    fn invert_examples() {
        let f = Taylor2Map::new(vec![t1(0, 1, 0)]).unwrap();
        assert_eq!(f.invert().unwrap(), f);
        let f = Taylor2Map::new(vec![t1(0, 2, 0)]).unwrap();
        let g = f.invert().unwrap();
        assert_eq!(g.components[0].c1, vec![q(1, 2)]);
        // y + y² inverts to y − y²; f ∘ g = y mod degree 3
        let f = Taylor2Map::new(vec![t1(0, 1, 2)]).unwrap();
        let g = f.invert().unwrap();
        assert_eq!(g.components[0], t1(0, 1, -2));
        assert_eq!(f.compose(&g).unwrap(), Taylor2Map::identity(1));
        let singular = Taylor2Map::new(vec![t1(0, 0, 2)]).unwrap();
        assert_eq!(singular.invert(), Err(Error::NotInvertible));
    }

    #[test]
    fn matrix_inverse_and_determinant() {
        let m = Mat::from_rows(vec![vec![q(2, 1), q(1, 1)], vec![q(1, 1), q(1, 1)]]);
        assert_eq!(m.determinant(), q(1, 1));
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, Mat::identity(2));
        let s = Mat::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(s.inverse().is_none());
        assert!(s.determinant().abs() < 1e-12);
    }

    #[test]
    fn evaluation_matches_coefficients() {
        let f = t1(3, 2, 4); // 3 + 2y + 2y²
        assert_eq!(f.eval(&[q(1, 2)]), q(9, 2));
    }
}
