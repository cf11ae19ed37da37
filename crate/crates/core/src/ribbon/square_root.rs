use serde::Serialize;

use crate::algebra::{roots_of_unity, Complex, Matrix, MatrixPoly, Poly};
use crate::error::{Error, Result};
use crate::spectral::{SpectralData, TAU_SPEC};

/// `p(w, z) = w^m + p_1(z) w^{m-1} + … + p_m(z)` with `deg p_k <= 2k`.
#[derive(Clone, Debug, PartialEq)]
pub struct RibbonPoly {
    p: Vec<Poly>,
    residual: f64,
}

impl RibbonPoly {
    /// Builds `p` from `p_1 … p_m`.
    pub fn new(p: Vec<Poly>) -> Self {
        Self { p, residual: 0.0 }
    }

    pub fn m(&self) -> usize {
        self.p.len()
    }

    /// `p_k` for `1 <= k <= m`.
    pub fn coeff(&self, k: usize) -> &Poly {
        &self.p[k - 1]
    }

    pub fn coefficients(&self) -> &[Poly] {
        &self.p
    }

    /// Largest leftover coefficient when `p²` was matched against the
    /// characteristic data.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `p(·, z)` as a polynomial in `w`, lowest degree first.
    pub fn in_w(&self, z: Complex) -> Poly {
        let m = self.m();
        let mut coeffs = vec![Complex::new(0.0, 0.0); m + 1];
        coeffs[m] = Complex::new(1.0, 0.0);
        for k in 1..=m {
            coeffs[m - k] = self.p[k - 1].eval(z);
        }
        Poly::new(coeffs)
    }

    pub fn eval(&self, w: Complex, z: Complex) -> Complex {
        self.in_w(z).eval(w)
    }

    /// `(∂p/∂w, ∂p/∂z)` at `(w, z)`.
    pub fn gradient(&self, w: Complex, z: Complex) -> (Complex, Complex) {
        let m = self.m();
        let dw = self.in_w(z).derivative().eval(w);
        let mut dz = Complex::new(0.0, 0.0);
        for k in 1..=m {
            dz += self.p[k - 1].derivative().eval(z) * w.powu((m - k) as u32);
        }
        (dw, dz)
    }

    /// The coefficients `a_1 … a_{2m}` of `p²`.
    pub fn square(&self) -> Vec<Poly> {
        let m = self.m();
        let one = Poly::constant(Complex::new(1.0, 0.0));
        let get = |i: usize| if i == 0 { &one } else { &self.p[i - 1] };
        (1..=2 * m)
            .map(|k| {
                let lo = k.saturating_sub(m);
                let hi = k.min(m);
                (lo..=hi).fold(Poly::zero(), |acc, i| &acc + &(get(i) * get(k - i)))
            })
            .collect()
    }

    /// `p(φ(z))` by Horner's rule in the matrix `φ(z)`.
    pub fn eval_matrix(&self, phi_z: &Matrix, z: Complex) -> Matrix {
        let n = phi_z.n();
        let mut acc = Matrix::identity(n);
        for k in 1..=self.m() {
            acc = &(&acc * phi_z) + &Matrix::scalar(n, self.p[k - 1].eval(z));
        }
        acc
    }
}

/// Coefficient matching `P = p²` for the characteristic data of a rank
/// `2m` field.
///
/// The first `m` coefficients determine `p` recursively,
/// `p_k = (a_k - Σ_{0<i<k} p_i p_{k-i}) / 2`; the remaining `m` must then
/// agree within the spectral tolerance.
pub fn extract_square_root(s: &SpectralData) -> Result<RibbonPoly> {
    let n = s.n();
    if n % 2 != 0 {
        return Err(Error::OddRank(n));
    }
    let m = n / 2;
    let mut p: Vec<Poly> = Vec::with_capacity(m);
    for k in 1..=m {
        let cross = (1..k).fold(Poly::zero(), |acc, i| &acc + &(&p[i - 1] * &p[k - i - 1]));
        let pk = (s.a(k) - &cross)
            .scale(Complex::new(0.5, 0.0))
            .truncate(2 * k);
        p.push(pk);
    }
    let mut root = RibbonPoly::new(p);
    let sq = root.square();
    let mut worst: f64 = 0.0;
    let mut fails = false;
    for k in 1..=n {
        let diff = s.a(k) - &sq[k - 1];
        let r = diff.max_norm();
        worst = worst.max(r);
        if r > s.tolerance(k) {
            fails = true;
        }
    }
    if fails {
        return Err(Error::NotPerfectSquare(worst));
    }
    root.residual = worst;
    Ok(root)
}

/// Which of the two sheaf types a ribbon field carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SheafCase {
    /// `p(φ) = 0`: the minimal polynomial is `p`.
    BundleOnS,
    /// `p(φ) ≠ 0`: the generic minimal polynomial is `p²`.
    GeneralizedLineBundle,
}

/// Evaluates `p(φ(z))` at `4m + 1` roots of unity, enough to decide
/// whether the matrix polynomial `p(φ)` of degree `<= 2m` vanishes.
pub fn case_split(phi: &MatrixPoly, p: &RibbonPoly) -> Result<SheafCase> {
    let n = phi.n();
    if n != 2 * p.m() {
        return Err(Error::DimensionMismatch {
            expected: 2 * p.m(),
            found: n,
        });
    }
    for z in roots_of_unity(4 * p.m() + 1) {
        let phi_z = phi.eval(z);
        let scale = (n as f64 * phi_z.max_norm()).max(1.0).powi(p.m() as i32);
        if p.eval_matrix(&phi_z, z).max_norm() > TAU_SPEC * scale {
            return Ok(SheafCase::GeneralizedLineBundle);
        }
    }
    Ok(SheafCase::BundleOnS)
}
