use crate::algebra::{poly_root_clusters, MatrixPoly, Poly};
use crate::error::{Error, Result};
use crate::spectral::TAU_SPEC;

const CLUSTER_TOL: f64 = 1e-6;

fn entry(phi: &MatrixPoly, i: usize, j: usize) -> Poly {
    Poly::new(phi.coeffs().iter().map(|m| m[(i, j)]).collect())
}

/// `deg` of the kernel line subbundle of a nilpotent rank-2 field, with
/// sign flipped: the kernel is `O(-δ)` and `δ` is returned.
///
/// The kernel is spanned by `(β, -α)` (or `(α, γ)` when that vanishes)
/// for `φ = [[α, β], [γ, -α]]`; dividing out the common zeros of the two
/// components leaves a nowhere-vanishing section of `O(δ)` inside `O²`.
pub fn kernel_line_degree(phi: &MatrixPoly) -> Result<usize> {
    if phi.n() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: phi.n(),
        });
    }
    let scale = phi.max_norm().max(1.0);
    let tol = TAU_SPEC * scale;
    let alpha = entry(phi, 0, 0);
    let beta = entry(phi, 0, 1);
    let gamma = entry(phi, 1, 0);
    let trace = &alpha + &entry(phi, 1, 1);
    if trace.max_norm() > tol {
        return Err(Error::NotTraceless(trace.max_norm()));
    }
    let det = &(&alpha * &alpha) + &(&beta * &gamma);
    if det.max_norm() > tol * scale {
        return Err(Error::ShapeViolation(format!(
            "field is not nilpotent (|det| = {:e})",
            det.max_norm()
        )));
    }
    let small = |p: &Poly| p.max_norm() <= tol;
    let (u, v) = if !(small(&alpha) && small(&beta)) {
        (beta, alpha)
    } else if !small(&gamma) {
        (alpha, gamma)
    } else {
        return Err(Error::ShapeViolation("field vanishes identically".into()));
    };
    let deg = |p: &Poly| -> Option<usize> {
        (0..p.coeffs().len())
            .rev()
            .find(|&k| p.coeff(k).norm() > tol)
    };
    let max_deg = deg(&u).into_iter().chain(deg(&v)).max().unwrap_or(0);
    let common = match (small(&u), small(&v)) {
        (true, false) => max_deg,
        (false, true) => max_deg,
        _ => {
            let cu = poly_root_clusters(&u.truncate(deg(&u).unwrap_or(0)), CLUSTER_TOL)?;
            let cv = poly_root_clusters(&v.truncate(deg(&v).unwrap_or(0)), CLUSTER_TOL)?;
            cu.iter()
                .map(|a| {
                    cv.iter()
                        .filter(|b| (a.center - b.center).norm() < 1e-5 * (1.0 + a.center.norm()))
                        .map(|b| a.multiplicity.min(b.multiplicity))
                        .sum::<usize>()
                })
                .sum()
        }
    };
    Ok(max_deg - common.min(max_deg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{c, Matrix};

    #[test]
    fn rank_one_family_has_degree_one_kernel() {
        // N(z) = [[-z, 1], [-z², z]]
        let phi = MatrixPoly::new(vec![
            Matrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]),
            Matrix::from_real(2, &[-1.0, 0.0, 0.0, 1.0]),
            Matrix::from_real(2, &[0.0, 0.0, -1.0, 0.0]),
        ])
        .unwrap();
        assert_eq!(kernel_line_degree(&phi).unwrap(), 1);
    }

    #[test]
    fn scalar_multiple_of_e_has_trivial_kernel() {
        let a = Poly::from_roots(&[c(1.0, 0.0), c(-2.0, 0.0)]);
        let phi =
            MatrixPoly::scalar_times(a.coeffs(), &Matrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]));
        assert_eq!(kernel_line_degree(&phi).unwrap(), 0);
        let f = MatrixPoly::scalar_times(a.coeffs(), &Matrix::from_real(2, &[0.0, 0.0, 1.0, 0.0]));
        assert_eq!(kernel_line_degree(&f).unwrap(), 0);
    }

    #[test]
    fn non_nilpotent_is_rejected() {
        let h = MatrixPoly::new(vec![Matrix::from_real(2, &[1.0, 0.0, 0.0, -1.0])]).unwrap();
        assert!(kernel_line_degree(&h).is_err());
    }
}
