//! Small fixed-capacity vectors and matrices for states of dimension `n <= 4`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::de::{Deserialize, Deserializer, Error as DeError};
use serde::ser::{Serialize, Serializer};

use crate::scalar::Scalar;

/// Largest supported system dimension.
pub const MAX_DIM: usize = 4;

/// A vector of conserved quantities `u ∈ ℝⁿ`.
#[derive(Clone, Copy, PartialEq)]
pub struct State<T> {
    n: usize,
    c: [T; MAX_DIM],
}

impl<T: Scalar> State<T> {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_DIM, "state dimension {n} outside 1..={MAX_DIM}");
        Self { n, c: [T::zero(); MAX_DIM] }
    }

    pub fn scalar(x: T) -> Self {
        let mut s = Self::zeros(1);
        s.c[0] = x;
        s
    }

    pub fn from_slice(v: &[T]) -> Self {
        let mut s = Self::zeros(v.len());
        s.c[..v.len()].copy_from_slice(v);
        s
    }

    pub fn from_f64s(v: &[f64]) -> Self {
        let mut s = Self::zeros(v.len());
        for (dst, &x) in s.c.iter_mut().zip(v) {
            *dst = T::lit(x);
        }
        s
    }

    /// Unit vector `e_k` in dimension `n`.
    pub fn unit(n: usize, k: usize) -> Self {
        let mut s = Self::zeros(n);
        s.c[k] = T::one();
        s
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.c[..self.n]
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.c[..self.n]
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.as_slice().iter()
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        let mut s = *self;
        for x in s.as_mut_slice() {
            *x = f(*x);
        }
        s
    }

    pub fn dot(&self, other: &Self) -> T {
        debug_assert_eq!(self.n, other.n);
        self.iter().zip(other.iter()).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    /// Euclidean norm.
    pub fn norm(&self) -> T {
        // scaled to avoid overflow for large components
        let m = self.norm_inf();
        if m == T::zero() || !m.is_finite() {
            return m;
        }
        let s = self.iter().fold(T::zero(), |acc, &x| {
            let y = x / m;
            acc + y * y
        });
        m * s.sqrt()
    }

    pub fn norm_inf(&self) -> T {
        self.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()))
    }

    pub fn norm1(&self) -> T {
        self.iter().fold(T::zero(), |acc, &x| acc + x.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(|x| x.is_finite())
    }

    pub fn to_vec(&self) -> Vec<T> {
        self.as_slice().to_vec()
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.iter().map(|x| x.to_f64_lossy()).collect()
    }

    /// `self + a * d`
    #[inline]
    pub fn axpy(&self, a: T, d: &Self) -> Self {
        let mut s = *self;
        for k in 0..self.n {
            s.c[k] = s.c[k] + a * d.c[k];
        }
        s
    }
}

impl<T: fmt::Debug> fmt::Debug for State<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.c[..self.n]).finish()
    }
}

impl<T: Scalar> Index<usize> for State<T> {
    type Output = T;
    #[inline]
    fn index(&self, k: usize) -> &T {
        &self.as_slice()[k]
    }
}

impl<T: Scalar> IndexMut<usize> for State<T> {
    #[inline]
    fn index_mut(&mut self, k: usize) -> &mut T {
        &mut self.as_mut_slice()[k]
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $op:tt) => {
        impl<T: Scalar> $tr for State<T> {
            type Output = Self;
            #[inline]
            fn $f(self, rhs: Self) -> Self {
                debug_assert_eq!(self.n, rhs.n);
                let mut s = self;
                for k in 0..self.n {
                    s.c[k] = self.c[k] $op rhs.c[k];
                }
                s
            }
        }
    };
}
binop!(Add, add, +);
binop!(Sub, sub, -);

impl<T: Scalar> AddAssign for State<T> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<T: Scalar> SubAssign for State<T> {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<T: Scalar> Neg for State<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|x| -x)
    }
}

impl<T: Scalar> Mul<T> for State<T> {
    type Output = Self;
    #[inline]
    fn mul(self, a: T) -> Self {
        self.map(|x| x * a)
    }
}

impl<T: Scalar> Div<T> for State<T> {
    type Output = Self;
    #[inline]
    fn div(self, a: T) -> Self {
        self.map(|x| x / a)
    }
}

impl<T: Scalar + Serialize> Serialize for State<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.as_slice().serialize(s)
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for State<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<T> = Vec::deserialize(d)?;
        if v.is_empty() || v.len() > MAX_DIM {
            return Err(D::Error::custom(format!(
                "state must have between 1 and {MAX_DIM} components, got {}",
                v.len()
            )));
        }
        Ok(State::from_slice(&v))
    }
}

/// Dense `n × n` matrix, `n <= 4`.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat<T> {
    n: usize,
    a: [[T; MAX_DIM]; MAX_DIM],
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_DIM);
        Self { n, a: [[T::zero(); MAX_DIM]; MAX_DIM] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for k in 0..n {
            m.a[k][k] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[&[T]]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n, "matrix must be square");
            m.a[i][..n].copy_from_slice(r);
        }
        m
    }

    pub fn diag(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len());
        for (k, &x) in d.iter().enumerate() {
            m.a[k][k] = x;
        }
        m
    }

    pub fn scalar(x: T) -> Self {
        Self::diag(&[x])
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[State<T>]) -> Self {
        let n = cols.len();
        let mut m = Self::zeros(n);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                m.a[i][j] = c[i];
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn column(&self, j: usize) -> State<T> {
        let mut s = State::zeros(self.n);
        for i in 0..self.n {
            s[i] = self.a[i][j];
        }
        s
    }

    pub fn row(&self, i: usize) -> State<T> {
        State::from_slice(&self.a[i][..self.n])
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.a[j][i] = self.a[i][j];
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &State<T>) -> State<T> {
        debug_assert_eq!(self.n, v.dim());
        let mut s = State::zeros(self.n);
        for i in 0..self.n {
            let mut acc = T::zero();
            for j in 0..self.n {
                acc = acc + self.a[i][j] * v[j];
            }
            s[i] = acc;
        }
        s
    }

    /// Row vector times matrix: `vᵀ M`.
    pub fn vec_mul(&self, v: &State<T>) -> State<T> {
        self.transpose().mul_vec(v)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let mut acc = T::zero();
                for k in 0..self.n {
                    acc = acc + self.a[i][k] * other.a[k][j];
                }
                m.a[i][j] = acc;
            }
        }
        m
    }

    pub fn scale(&self, s: T) -> Self {
        let mut m = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                m.a[i][j] = m.a[i][j] * s;
            }
        }
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut m = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                m.a[i][j] = m.a[i][j] + other.a[i][j];
            }
        }
        m
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-T::one()))
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, k| acc + self.a[k][k])
    }

    /// Frobenius norm.
    pub fn norm(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                acc = acc + self.a[i][j] * self.a[i][j];
            }
        }
        acc.sqrt()
    }

    pub fn is_finite(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.a[i][j].is_finite()))
    }

    /// Solve `M x = b` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &State<T>) -> Option<State<T>> {
        let n = self.n;
        let mut a = vec![T::zero(); n * n];
        for i in 0..n {
            a[i * n..(i + 1) * n].copy_from_slice(&self.a[i][..n]);
        }
        let mut x = b.to_vec();
        if !solve_dense(&mut a, &mut x, n) {
            return None;
        }
        Some(State::from_slice(&x))
    }

    pub fn inverse(&self) -> Option<Self> {
        let cols: Option<Vec<State<T>>> =
            (0..self.n).map(|j| self.solve(&State::unit(self.n, j))).collect();
        cols.map(|c| Self::from_columns(&c))
    }
}

impl<T: Scalar> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.n && j < self.n);
        &self.a[i][j]
    }
}

impl<T: Scalar> IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.n && j < self.n);
        &mut self.a[i][j]
    }
}

impl<T: fmt::Debug> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.n).map(|i| &self.a[i][..self.n]))
            .finish()
    }
}

/// In-place Gaussian elimination with partial pivoting on a row-major
/// `n × n` system. Returns `false` if the matrix is numerically singular.
pub fn solve_dense<T: Scalar>(a: &mut [T], b: &mut [T], n: usize) -> bool {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    let scale = a.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    if scale == T::zero() || !scale.is_finite() {
        return false;
    }
    let tiny = scale * T::epsilon() * T::lit(16.0);
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col].abs() <= tiny {
            return false;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in col + 1..n {
            let m = a[r * n + col] / d;
            if m == T::zero() {
                continue;
            }
            for k in col..n {
                a[r * n + k] = a[r * n + k] - m * a[col * n + k];
            }
            b[r] = b[r] - m * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in col + 1..n {
            acc = acc - a[col * n + k] * b[k];
        }
        b[col] = acc / a[col * n + col];
    }
    b.iter().all(|x| x.is_finite())
}
