use super::{Complex, Matrix};
use crate::error::{Error, Result};

/// Matrix-coefficient polynomial `φ(z) = Σ φ_k z^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPoly {
    coeffs: Vec<Matrix>,
}

impl MatrixPoly {
    pub fn new(coeffs: Vec<Matrix>) -> Result<Self> {
        let first = coeffs.first().ok_or_else(|| {
            Error::ShapeViolation("matrix polynomial needs at least one coefficient".into())
        })?;
        let n = first.n();
        if let Some(bad) = coeffs.iter().find(|m| m.n() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.n(),
            });
        }
        Ok(Self { coeffs })
    }

    /// `p(z) · M` for a scalar polynomial given by its coefficients.
    pub fn scalar_times(p: &[Complex], m: &Matrix) -> Self {
        Self {
            coeffs: p.iter().map(|&c| m.scale(c)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.coeffs[0].n()
    }

    pub fn coeffs(&self) -> &[Matrix] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Option<&Matrix> {
        self.coeffs.get(k)
    }

    /// Number of stored coefficients minus one.
    pub fn degree_bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex) -> Matrix {
        let n = self.n();
        self.coeffs
            .iter()
            .rev()
            .fold(Matrix::zeros(n), |acc, c| &acc.scale(z) + c)
    }

    /// Largest entry modulus over all coefficients.
    pub fn max_norm(&self) -> f64 {
        self.coeffs.iter().map(Matrix::max_norm).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|m| m.scale(s)).collect(),
        }
    }

    pub fn conjugate_by(&self, g: &Matrix, g_inv: &Matrix) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|m| m.conjugate_by(g, g_inv))
                .collect(),
        }
    }

    /// Coefficientwise sum, padding the shorter polynomial with zeros.
    pub fn add(&self, other: &MatrixPoly) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: other.n(),
            });
        }
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = Matrix::zeros(self.n());
        Ok(Self {
            coeffs: (0..len)
                .map(|k| {
                    let a = self.coeffs.get(k).unwrap_or(&zero);
                    let b = other.coeffs.get(k).unwrap_or(&zero);
                    a + b
                })
                .collect(),
        })
    }

    /// `z · self`
    pub fn shift_degree(&self) -> Self {
        let mut coeffs = vec![Matrix::zeros(self.n())];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::c;

    #[test]
    fn constant_polynomial_evaluates_to_itself() {
        let m = Matrix::from_fn(2, |i, j| c(i as f64, j as f64));
        let p = MatrixPoly::new(vec![m.clone()]).unwrap();
        assert_eq!(p.eval(c(3.0, -1.0)), m);
    }

    #[test]
    fn e_plus_hz_at_one() {
        let e = Matrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]);
        let h = Matrix::from_real(2, &[1.0, 0.0, 0.0, -1.0]);
        let p = MatrixPoly::new(vec![e, h]).unwrap();
        assert_eq!(
            p.eval(c(1.0, 0.0)),
            Matrix::from_real(2, &[1.0, 1.0, 0.0, -1.0])
        );
    }

    #[test]
    fn rejects_mixed_dimensions() {
        assert!(MatrixPoly::new(vec![Matrix::zeros(2), Matrix::zeros(3)]).is_err());
        assert!(MatrixPoly::new(vec![]).is_err());
    }
}
