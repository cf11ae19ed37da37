use serde::Serialize;

use crate::algebra::{
    char_poly, cluster_roots, commutator, poly_roots, singular_values, svd, Complex, Matrix,
    MatrixPoly,
};
use crate::error::{Error, Result};

/// Commutator tolerance for `[φ_+(z), φ_-(z)]`, relative to the product of
/// the norms.
pub const COMMUTE_TOL: f64 = 1e-8;

const GEOMETRIC_TOL: f64 = 1e-6;

/// Generic mixing weight for the pencil `φ_+ + κ φ_-`.
const KAPPA: Complex = Complex::new(0.754_877_666_246_692_7, 0.569_840_290_998_053_3);

/// A point `(z, x, y)` of the lifted curve together with `w = xz + y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LiftedPoint {
    pub z: Complex,
    pub x: Complex,
    pub y: Complex,
    pub w: Complex,
}

impl LiftedPoint {
    pub fn new(z: Complex, x: Complex, y: Complex) -> Self {
        Self {
            z,
            x,
            y,
            w: x * z + y,
        }
    }
}

/// `(z, x, y) ↦ (z, x + t, y - zt)`; `w` is recomputed from the moved
/// coordinates, so its invariance is observable rather than assumed.
pub fn c_action(p: &LiftedPoint, t: Complex) -> LiftedPoint {
    LiftedPoint::new(p.z, p.x + t, p.y - p.z * t)
}

/// The `t` carrying `p` to `q` under [`c_action`], when both lie over the
/// same `z` with the same `w` (within `tol`, relative).
pub fn orbit_parameter(p: &LiftedPoint, q: &LiftedPoint, tol: f64) -> Option<Complex> {
    let scale = 1.0 + p.w.norm().max(q.w.norm());
    if (p.z - q.z).norm() > tol * (1.0 + p.z.norm()) || (p.w - q.w).norm() > tol * scale {
        return None;
    }
    Some(q.x - p.x)
}

/// A joint eigenvalue of `(φ_+(z), φ_-(z))` with the dimension of its
/// generalized eigenspace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SupportPoint {
    pub point: LiftedPoint,
    pub mult: usize,
    /// The pencil is not diagonalizable there; the point was read off the
    /// generalized eigenspace.
    pub generalized: bool,
}

/// Joint eigenvalues of the commuting pair `φ_+(z)`, `φ_-(z)`.
///
/// Both matrices preserve the generalized eigenspaces of the generic
/// combination `M = φ_+ + κφ_-`, and on each such space they have a single
/// eigenvalue; it is read off as the trace of the compressed matrix divided
/// by the dimension, which also works for defective structure.
pub fn support_points(
    plus: &MatrixPoly,
    minus: &MatrixPoly,
    z: Complex,
) -> Result<Vec<SupportPoint>> {
    let a = plus.eval(z);
    let b = minus.eval(z);
    let scale = (a.max_norm() * b.max_norm()).max(1.0);
    let defect = commutator(&a, &b)?.max_norm();
    if defect > COMMUTE_TOL * scale {
        return Err(Error::NonCommuting(defect));
    }
    let n = a.n();
    let m = &a + &b.scale(KAPPA);
    let mscale = m.max_norm().max(1.0);
    let eig = poly_roots(&char_poly(&m))?;
    // Defective eigenvalues split like ε^(1/r); cluster generously.
    let clusters = cluster_roots(&eig, 1e-5 * mscale);
    let mut out = Vec::with_capacity(clusters.len());
    for cl in clusters {
        let r = cl.multiplicity;
        let shifted = m.shift(cl.center);
        let mut power = Matrix::identity(n);
        for _ in 0..r {
            power = &power * &shifted;
        }
        let d = svd(&power.to_dense());
        // Right singular vectors of the r smallest singular values.
        let basis: Vec<Vec<Complex>> = (n - r..n).map(|k| d.v.column(k)).collect();
        let compress = |x: &Matrix| -> Complex {
            basis
                .iter()
                .map(|v| {
                    let xv = x.mul_vec(v);
                    v.iter()
                        .zip(&xv)
                        .map(|(vi, yi)| vi.conj() * yi)
                        .sum::<Complex>()
                })
                .sum::<Complex>()
                / r as f64
        };
        let x = compress(&a);
        let y = compress(&b);
        // Kernel dimension of M - μ, judged against the size of M itself so
        // that a numerically scalar block counts as fully diagonalizable.
        let geometric = if r == 1 {
            1
        } else {
            let sv = singular_values(&shifted.to_dense());
            sv.iter().filter(|&&s| s <= GEOMETRIC_TOL * mscale).count()
        };
        out.push(SupportPoint {
            point: LiftedPoint::new(z, x, y),
            mult: r,
            generalized: geometric < r,
        });
    }
    Ok(out)
}

/// `det(u(x - φ_+(z)) + v(y - φ_-(z)))` at a lifted point.
pub fn support_determinant(
    plus: &MatrixPoly,
    minus: &MatrixPoly,
    p: &LiftedPoint,
    u: Complex,
    v: Complex,
) -> Complex {
    let a = plus.eval(p.z);
    let b = minus.eval(p.z);
    let m = &a.shift(p.x).scale(-u) + &b.shift(p.y).scale(-v);
    m.determinant()
}

/// Largest `|det(u(x - φ_+) + v(y - φ_-))| / scale` over the supplied
/// `(u, v)` pairs, where `scale = max(1, |u|‖φ_+‖ + |v|‖φ_-‖)^n` uses
/// Frobenius norms at `z`.
pub fn support_check(
    plus: &MatrixPoly,
    minus: &MatrixPoly,
    p: &LiftedPoint,
    uv: &[(Complex, Complex)],
) -> f64 {
    let n = plus.n() as i32;
    let a = plus.eval(p.z).frobenius_norm() + p.x.norm();
    let b = minus.eval(p.z).frobenius_norm() + p.y.norm();
    uv.iter()
        .map(|&(u, v)| {
            let scale = (u.norm() * a + v.norm() * b).max(1.0).powi(n);
            support_determinant(plus, minus, p, u, v).norm() / scale
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::c;

    #[test]
    fn w_is_invariant_exactly() {
        let p = LiftedPoint::new(c(0.5, -1.25), c(3.0, 0.75), c(-2.5, 0.125));
        for t in [c(0.0, 0.0), c(1.5, -0.25), c(-4.0, 2.0)] {
            let q = c_action(&p, t);
            assert_eq!(q.w, p.w);
            assert_eq!(q.z, p.z);
        }
        assert_eq!(c_action(&p, c(0.0, 0.0)), p);
    }

    #[test]
    fn orbit_parameter_recovers_t() {
        let p = LiftedPoint::new(c(2.0, 0.0), c(1.0, 0.0), c(3.0, 0.0));
        let q = c_action(&p, c(0.5, 0.0));
        assert_eq!(orbit_parameter(&p, &q, 1e-12), Some(c(0.5, 0.0)));
        let r = LiftedPoint::new(c(2.0, 0.0), c(1.0, 0.0), c(4.0, 0.0));
        assert_eq!(orbit_parameter(&p, &r, 1e-12), None);
    }

    #[test]
    fn scalar_pair_has_one_point() {
        let plus =
            MatrixPoly::new(vec![Matrix::identity(3), Matrix::identity(3).scale_re(2.0)]).unwrap();
        let minus =
            MatrixPoly::new(vec![Matrix::identity(3).scale_re(-1.0), Matrix::zeros(3)]).unwrap();
        let pts = support_points(&plus, &minus, c(0.5, 0.0)).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].mult, 3);
        assert!(!pts[0].generalized);
        assert!((pts[0].point.x - c(2.0, 0.0)).norm() < 1e-12);
        assert!((pts[0].point.y - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn defective_pair_uses_generalized_eigenspace() {
        let e = Matrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]);
        let plus = MatrixPoly::new(vec![&Matrix::identity(2) + &e]).unwrap();
        let minus = MatrixPoly::new(vec![e.scale_re(3.0)]).unwrap();
        let pts = support_points(&plus, &minus, c(1.0, 0.0)).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(pts[0].generalized);
        assert!((pts[0].point.x - c(1.0, 0.0)).norm() < 1e-7);
        assert!(pts[0].point.y.norm() < 1e-7);
    }

    #[test]
    fn non_commuting_is_rejected() {
        let e = Matrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]);
        let f = Matrix::from_real(2, &[0.0, 0.0, 1.0, 0.0]);
        let plus = MatrixPoly::new(vec![e]).unwrap();
        let minus = MatrixPoly::new(vec![f]).unwrap();
        assert!(matches!(
            support_points(&plus, &minus, c(0.0, 0.0)),
            Err(Error::NonCommuting(_))
        ));
    }
}
