use super::rat::RatExpr;
use super::Expr;
use crate::error::Result;

/// Dense square-or-rectangular matrix of normal forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprMatrix {
    n: usize,
    rows: usize,
    cols: usize,
    data: Vec<RatExpr>,
}

impl ExprMatrix {
    pub fn from_fn(n: usize, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> RatExpr) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ExprMatrix { n, rows, cols, data }
    }

    pub fn zeros(n: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(n, rows, cols, |_, _| RatExpr::zero(n))
    }

    pub fn identity(n: usize, size: usize) -> Self {
        Self::from_fn(n, size, size, |i, j| if i == j { RatExpr::one(n) } else { RatExpr::zero(n) })
    }

    /// The ambient jet dimension of the entries.
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &RatExpr {
        &self.data[i * self.cols + j]
    }

    pub fn map(&self, f: impl Fn(&RatExpr) -> RatExpr) -> Self {
        ExprMatrix { n: self.n, rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map(&self, f: impl Fn(&RatExpr) -> Result<RatExpr>) -> Result<Self> {
        let data = self.data.iter().map(f).collect::<Result<_>>()?;
        Ok(ExprMatrix { n: self.n, rows: self.rows, cols: self.cols, data })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix shapes do not match");
        Self::from_fn(self.n, self.rows, other.cols, |i, j| {
            let mut acc = RatExpr::zero(self.n);
            for k in 0..self.cols {
                let (a, b) = (self.get(i, k), other.get(k, j));
                if !a.is_zero() && !b.is_zero() {
                    acc = &acc + &(a * b);
                }
            }
            acc
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_fn(self.n, self.rows, self.cols, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_fn(self.n, self.rows, self.cols, |i, j| self.get(i, j) - other.get(i, j))
    }

    pub fn scale(&self, s: &RatExpr) -> Self {
        self.map(|e| e * s)
    }

    pub fn trace(&self) -> RatExpr {
        let mut acc = RatExpr::zero(self.n);
        for i in 0..self.rows.min(self.cols) {
            acc = &acc + self.get(i, i);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n, self.rows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(RatExpr::is_zero)
    }

    /// Canonical trees of the entries, row by row.
    pub fn to_exprs(&self) -> Vec<Vec<Expr>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| Expr::from_rat(self.get(i, j))).collect()).collect()
    }
}
