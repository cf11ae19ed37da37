use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use super::dense::{singular_values, DenseMatrix};
use super::{is_finite, Complex, Poly};
use crate::error::{Error, Result};

pub const MAX_DIM: usize = 16;

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<Complex>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix dimension must be positive");
        Self {
            n,
            data: vec![Complex::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex::new(1.0, 0.0);
        }
        m
    }

    pub fn scalar(n: usize, s: Complex) -> Self {
        Self::identity(n).scale(s)
    }

    pub fn diag(entries: &[Complex]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &d) in entries.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Validated constructor from a row-major entry list.
    pub fn from_entries(n: usize, data: Vec<Complex>) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::UnsupportedDimension(n));
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        if !data.iter().all(|&z| is_finite(z)) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Self { n, data })
    }

    /// Real matrix from row-major entries. Panics on a malformed slice.
    pub fn from_real(n: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), n * n);
        Self {
            n,
            data: entries.iter().map(|&x| Complex::new(x, 0.0)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex] {
        &self.data
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|&z| is_finite(z))
    }

    pub fn mul_vec(&self, v: &[Complex]) -> Vec<Complex> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|k| self[(i, k)] * v[k]).sum())
            .collect()
    }

    /// `self - λ I`
    pub fn shift(&self, lambda: Complex) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, i)] -= lambda;
        }
        m
    }

    /// `g · self · g_inv`
    pub fn conjugate_by(&self, g: &Matrix, g_inv: &Matrix) -> Self {
        &(g * self) * g_inv
    }

    /// Block of rows `r0..r1`, columns `c0..c1` as a flat row-major list.
    pub fn block_entries(
        &self,
        rows: std::ops::Range<usize>,
        cols: std::ops::Range<usize>,
    ) -> Vec<Complex> {
        let mut out = Vec::with_capacity(rows.len() * cols.len());
        for i in rows {
            for j in cols.clone() {
                out.push(self[(i, j)]);
            }
        }
        out
    }

    /// Packed LU with partial pivoting: (factors, row permutation, odd parity, singular).
    fn lu(&self) -> (Vec<Complex>, Vec<usize>, bool, bool) {
        let n = self.n;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut odd = false;
        let mut singular = false;
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, a[i * n + k].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pivot == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                odd = !odd;
            }
            let d = a[k * n + k];
            for i in (k + 1)..n {
                let f = a[i * n + k] / d;
                a[i * n + k] = f;
                for j in (k + 1)..n {
                    let t = a[k * n + j];
                    a[i * n + j] -= f * t;
                }
            }
        }
        (a, perm, odd, singular)
    }

    pub fn determinant(&self) -> Complex {
        let n = self.n;
        let (a, _, odd, singular) = self.lu();
        if singular {
            return Complex::new(0.0, 0.0);
        }
        let d: Complex = (0..n).map(|i| a[i * n + i]).product();
        if odd {
            -d
        } else {
            d
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let (a, perm, _, singular) = self.lu();
        if singular {
            return Err(Error::ShapeViolation(
                "singular matrix has no inverse".into(),
            ));
        }
        let mut inv = Self::zeros(n);
        for col in 0..n {
            // Solve L U x = P e_col.
            let mut x: Vec<Complex> = perm
                .iter()
                .map(|&p| Complex::new(if p == col { 1.0 } else { 0.0 }, 0.0))
                .collect();
            for i in 0..n {
                for k in 0..i {
                    let t = a[i * n + k] * x[k];
                    x[i] -= t;
                }
            }
            for i in (0..n).rev() {
                for k in (i + 1)..n {
                    let t = a[i * n + k] * x[k];
                    x[i] -= t;
                }
                x[i] /= a[i * n + i];
            }
            for i in 0..n {
                inv[(i, col)] = x[i];
            }
        }
        Ok(inv)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_row_major(self.n, self.n, self.data.clone())
    }

    fn check_same(&self, other: &Matrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}x{})[", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.data[i * self.n + j]
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in matrix sum");
        Matrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in matrix difference");
        Matrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|z| -z).collect(),
        }
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in matrix product");
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

/// `[A, B] = AB - BA`.
pub fn commutator(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    a.check_same(b)?;
    Ok(&(a * b) - &(b * a))
}

/// Monic characteristic polynomial `det(xI - M)`, lowest degree first,
/// by the Faddeev–LeVerrier trace recursion.
pub fn char_poly(m: &Matrix) -> Poly {
    let n = m.n;
    let mut coeffs = vec![Complex::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex::new(1.0, 0.0);
    // M_k = A M_{k-1} + c_{n-k+1} I,  c_{n-k} = -tr(A M_k) / k
    let mut am = Matrix::zeros(n);
    for k in 1..=n {
        let mk = &am + &Matrix::scalar(n, coeffs[n - k + 1]);
        am = m * &mk;
        coeffs[n - k] = -am.trace() / k as f64;
    }
    Poly::new(coeffs)
}

/// Dimension of the λ-eigenspace: `n - rank(M - λI)`, with rank decided by
/// singular values `>= tau_rank * σ_max`.
pub fn eigen_multiplicity(m: &Matrix, lambda: Complex, tau_rank: f64) -> Result<usize> {
    eigen_multiplicity_scaled(m, lambda, tau_rank, 0.0)
}

/// As [`eigen_multiplicity`], but singular values below `tau_rank * scale`
/// never count towards the rank. Needed when `M - λI` is itself of roundoff
/// size, where the relative rule alone sees noise as rank.
pub fn eigen_multiplicity_scaled(
    m: &Matrix,
    lambda: Complex,
    tau_rank: f64,
    scale: f64,
) -> Result<usize> {
    if !(tau_rank > 0.0 && tau_rank.is_finite()) {
        return Err(Error::InvalidTolerance(tau_rank));
    }
    let sv = singular_values(&m.shift(lambda).to_dense());
    let smax = sv.first().copied().unwrap_or(0.0).max(scale);
    if smax == 0.0 {
        return Ok(m.n);
    }
    let rank = sv.iter().filter(|&&s| s >= tau_rank * smax).count();
    Ok(m.n - rank)
}
