use serde::Serialize;

use crate::algebra::{commutator, lstsq_min_norm, Complex, DenseMatrix, Matrix, MatrixPoly};
use crate::error::{Error, Result};

/// Residual threshold for an exact witness, on unit max-norm data.
pub const TAU_FIX: f64 = 1e-8;

const RCOND: f64 = 1e-10;

fn bracket(a: &Matrix, b: &Matrix) -> Matrix {
    commutator(a, b).expect("dimensions checked by caller")
}

fn max_norm3(m: &[Matrix; 3]) -> f64 {
    m.iter().map(Matrix::max_norm).fold(0.0, f64::max)
}

/// `[T0, Ti] - [Tj, Tk]` for the cyclic triples `(i, j, k)`.
pub fn quadruple_defects(
    t0: &Matrix,
    t1: &Matrix,
    t2: &Matrix,
    t3: &Matrix,
) -> Result<[Matrix; 3]> {
    commutator(t0, t1)?;
    commutator(t2, t3)?;
    Ok([
        &bracket(t0, t1) - &bracket(t2, t3),
        &bracket(t0, t2) - &bracket(t3, t1),
        &bracket(t0, t3) - &bracket(t1, t2),
    ])
}

pub fn quadruple_residual(t0: &Matrix, t1: &Matrix, t2: &Matrix, t3: &Matrix) -> Result<f64> {
    Ok(max_norm3(&quadruple_defects(t0, t1, t2, t3)?))
}

/// The three coefficients of a Higgs field of degree at most 2, padded with
/// zeros.
fn quadratic_coeffs(phi: &MatrixPoly) -> Result<[Matrix; 3]> {
    if phi.degree_bound() > 2 {
        return Err(Error::ShapeViolation(format!(
            "expected a Higgs field of degree <= 2, got {} coefficients",
            phi.coeffs().len()
        )));
    }
    let z = Matrix::zeros(phi.n());
    let get = |k: usize| phi.coeff(k).cloned().unwrap_or_else(|| z.clone());
    Ok([get(0), get(1), get(2)])
}

/// `([ψ,φ0] - ½[φ0,φ1], [ψ,φ1] - [φ0,φ2], [ψ,φ2] - ½[φ1,φ2])`.
pub fn fixed_defects_phi(psi: &Matrix, phi: &MatrixPoly) -> Result<[Matrix; 3]> {
    let [p0, p1, p2] = quadratic_coeffs(phi)?;
    commutator(psi, &p0)?;
    Ok([
        &bracket(psi, &p0) - &bracket(&p0, &p1).scale_re(0.5),
        &bracket(psi, &p1) - &bracket(&p0, &p2),
        &bracket(psi, &p2) - &bracket(&p1, &p2).scale_re(0.5),
    ])
}

pub fn fixed_residual_phi(psi: &Matrix, phi: &MatrixPoly) -> Result<f64> {
    Ok(max_norm3(&fixed_defects_phi(psi, phi)?))
}

/// Least-squares solution of the fixed-point system for `ψ`.
#[derive(Clone, Debug, Serialize)]
pub struct FixedPointWitness {
    #[serde(skip)]
    pub psi: Matrix,
    /// Max-norm of the defects after scaling `φ` to unit max-norm.
    pub residual: f64,
    pub exact: bool,
}

/// Rows of `vec([ψ, A])` in terms of `vec(ψ)` (row-major flattening).
fn ad_block(a: &Matrix, out: &mut DenseMatrix, row0: usize) {
    let n = a.n();
    for r in 0..n {
        for col in 0..n {
            let row = row0 + r * n + col;
            // [ψ, A]_{r,col} = Σ_c ψ_{r,c} A_{c,col} - A_{r,c} ψ_{c,col}
            for c in 0..n {
                let k = r * n + c;
                out.set(row, k, out.get(row, k) + a[(c, col)]);
                let k = c * n + col;
                out.set(row, k, out.get(row, k) - a[(r, c)]);
            }
        }
    }
}

/// Minimum-norm `ψ` minimizing the fixed-point defects.
///
/// The system is solved for `φ / s` with `s` the max-norm of `φ`, and the
/// solution rescaled by `s`; the commutant of `φ` (including the identity)
/// is the kernel and is projected out.
pub fn solve_psi(phi: &MatrixPoly, tau_fix: f64) -> Result<FixedPointWitness> {
    if !(tau_fix > 0.0 && tau_fix.is_finite()) {
        return Err(Error::InvalidTolerance(tau_fix));
    }
    quadratic_coeffs(phi)?;
    let n = phi.n();
    let s = phi.max_norm();
    if s == 0.0 {
        return Ok(FixedPointWitness {
            psi: Matrix::zeros(n),
            residual: 0.0,
            exact: true,
        });
    }
    let unit = phi.scale(Complex::new(1.0 / s, 0.0));
    let [p0, p1, p2] = quadratic_coeffs(&unit)?;
    let nn = n * n;
    let mut a = DenseMatrix::zeros(3 * nn, nn);
    for (k, p) in [&p0, &p1, &p2].into_iter().enumerate() {
        ad_block(p, &mut a, k * nn);
    }
    let targets = [
        bracket(&p0, &p1).scale_re(0.5),
        bracket(&p0, &p2),
        bracket(&p1, &p2).scale_re(0.5),
    ];
    let b: Vec<Complex> = targets
        .iter()
        .flat_map(|m| m.entries().iter().copied())
        .collect();
    let x = lstsq_min_norm(&a, &b, RCOND);
    let psi_unit = Matrix::from_entries(n, x)?;
    let residual = fixed_residual_phi(&psi_unit, &unit)?;
    Ok(FixedPointWitness {
        psi: psi_unit.scale_re(s),
        residual,
        exact: residual < tau_fix,
    })
}

/// `φ_- = φ0 + z(φ1/2 - ψ)` and `φ_+ = (φ1/2 + ψ) + zφ2`, returned as
/// `(φ_+, φ_-)`; `φ_- + zφ_+ = φ` coefficientwise.
pub fn phi_pm(phi: &MatrixPoly, psi: &Matrix) -> Result<(MatrixPoly, MatrixPoly)> {
    let [p0, p1, p2] = quadratic_coeffs(phi)?;
    commutator(psi, &p0)?;
    let half = p1.scale_re(0.5);
    let minus = MatrixPoly::new(vec![p0, &half - psi])?;
    let plus = MatrixPoly::new(vec![&half + psi, p2])?;
    Ok((plus, minus))
}

/// Eleven points on the unit circle, offset from the roots of unity so
/// that none sits on a real or imaginary axis.
pub fn sample_points() -> Vec<Complex> {
    (0..11)
        .map(|j| Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * (j as f64 + 0.37) / 11.0))
        .collect()
}

/// `max_z ‖[φ_+(z), φ_-(z)]‖` over [`sample_points`].
pub fn commutation_defect(plus: &MatrixPoly, minus: &MatrixPoly) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for z in sample_points() {
        worst = worst.max(commutator(&plus.eval(z), &minus.eval(z))?.max_norm());
    }
    Ok(worst)
}
