use serde::{Deserialize, Serialize};

use crate::algebra::{Complex, Matrix, MatrixPoly};
use crate::error::{Error, Result};

/// Singularity type of the image spectral curve of the rank-2 family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageClass {
    Node,
    Cusp,
    TwoLines,
}

/// The rank-2 fixed point with `φ0 = e`, `ψ = aφ0 - φ1/2` and
/// `φ2 = aφ1 - a²φ0`.
#[derive(Clone, Debug)]
pub struct Rank2Family {
    pub a: Complex,
    pub phi: MatrixPoly,
    pub psi: Matrix,
}

impl Rank2Family {
    pub fn phi0(&self) -> &Matrix {
        &self.phi.coeffs()[0]
    }

    pub fn phi1(&self) -> &Matrix {
        &self.phi.coeffs()[1]
    }

    /// `tr(φ0 φ1)`
    pub fn tau01(&self) -> Complex {
        (self.phi0() * self.phi1()).trace()
    }

    /// `tr(φ1²)`
    pub fn tau11(&self) -> Complex {
        (self.phi1() * self.phi1()).trace()
    }

    /// `tr φ_-(z)² = 2z(1 - az) tr(φ0φ1) + z² tr(φ1²)`.
    pub fn trace_minus_sq(&self, z: Complex) -> Complex {
        let one = Complex::new(1.0, 0.0);
        z * (one - self.a * z) * self.tau01() * 2.0 + z * z * self.tau11()
    }
}

fn e2() -> Matrix {
    Matrix::from_real(2, &[0.0, 1.0, 0.0, 0.0])
}

pub fn rank2_family(a: Complex, phi1: &Matrix) -> Result<Rank2Family> {
    if phi1.n() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: phi1.n(),
        });
    }
    if !phi1.is_finite() || !(a.re.is_finite() && a.im.is_finite()) {
        return Err(Error::NonFinite("rank-2 family parameters"));
    }
    let phi0 = e2();
    let psi = &phi0.scale(a) - &phi1.scale_re(0.5);
    let phi2 = &phi1.scale(a) - &phi0.scale(a * a);
    let phi = MatrixPoly::new(vec![phi0, phi1.clone(), phi2])?;
    Ok(Rank2Family { a, phi, psi })
}

/// Fibre over which two points of `C` lie on one orbit of the C-action:
/// `φ = (1 + az)φ_-`, so distinct branches share `w` only where `1 + az = 0`.
/// `None` when `a = 0` (the fibre is at infinity).
pub fn collision_fibre(a: Complex) -> Option<Complex> {
    (a.norm() > 0.0).then(|| -a.inv())
}

/// Node, cusp or pair of lines for the family's image curve.
///
/// Two lines when `tr(φ0φ1)` vanishes; otherwise the two support points
/// over the collision fibre `z = -1/a` have `y² = (tr φ1² - 4a tr φ0φ1) / (2a²)`
/// and coincide (cusp) exactly when the numerator vanishes.
pub fn classify_image(a: Complex, phi1: &Matrix, tol: f64) -> Result<ImageClass> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    let fam = rank2_family(a, phi1)?;
    let (t01, t11) = (fam.tau01(), fam.tau11());
    if t01.norm() < tol {
        return Ok(ImageClass::TwoLines);
    }
    let scale = 1.0f64.max(t01.norm()).max(t11.norm()).max((a * t01).norm());
    if (t11 - a * t01 * 4.0).norm() < tol * scale {
        Ok(ImageClass::Cusp)
    } else {
        Ok(ImageClass::Node)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{c, poly_root_clusters, Poly};
    use crate::fixed_points::{commutation_defect, fixed_residual_phi, phi_pm};
    use crate::spectral::rank2_q;

    fn m(v: [f64; 4]) -> Matrix {
        Matrix::from_real(2, &v)
    }

    #[test]
    fn family_is_a_fixed_point() {
        let fam = rank2_family(c(0.7, -0.3), &m([0.2, 1.5, -0.4, -0.2])).unwrap();
        assert!(fixed_residual_phi(&fam.psi, &fam.phi).unwrap() < 1e-15);
        let (plus, minus) = phi_pm(&fam.phi, &fam.psi).unwrap();
        for (p, q) in plus.coeffs().iter().zip(minus.coeffs()) {
            assert!((p - &q.scale(fam.a)).max_norm() < 1e-15);
        }
        assert!(commutation_defect(&plus, &minus).unwrap() < 1e-15);
    }

    #[test]
    fn shipped_branches() {
        let one = c(1.0, 0.0);
        assert_eq!(
            classify_image(one, &m([0.0, 1.0, 1.0, 0.0]), 1e-9).unwrap(),
            ImageClass::Node
        );
        assert_eq!(
            classify_image(one, &m([0.0, 2.0, 1.0, 0.0]), 1e-9).unwrap(),
            ImageClass::Cusp
        );
        assert_eq!(
            classify_image(one, &m([1.0, 0.0, 0.0, -1.0]), 1e-9).unwrap(),
            ImageClass::TwoLines
        );
    }

    #[test]
    fn a_equal_i_with_zero_tau11_is_a_node() {
        // tr(eφ1) = 1, tr(φ1²) = 0 and a = i: q = (1 + iz)² z (1 - iz) has a
        // double root at z = i only, an ordinary double point of w² = q.
        let a = c(0.0, 1.0);
        let phi1 = m([0.0, 0.0, 1.0, 0.0]);
        assert_eq!(classify_image(a, &phi1, 1e-9).unwrap(), ImageClass::Node);
        let fam = rank2_family(a, &phi1).unwrap();
        let q = rank2_q(&fam.phi).unwrap();
        let oracle = &(&Poly::from_roots(&[c(0.0, 1.0), c(0.0, 1.0)])
            * &Poly::new(vec![c(0.0, 0.0), c(1.0, 0.0)]))
            * &Poly::new(vec![c(1.0, 0.0), c(0.0, -1.0)]);
        let oracle = oracle.scale(c(-1.0, 0.0));
        for j in 0..5 {
            assert!(
                (q.coeff(j) - oracle.coeff(j)).norm() < 1e-12,
                "coefficient {j}"
            );
        }
        let cl = poly_root_clusters(&q, 1e-6).unwrap();
        assert_eq!(cl.iter().filter(|k| k.multiplicity == 2).count(), 1);
    }

    #[test]
    fn collision_fibre_location() {
        assert_eq!(collision_fibre(c(2.0, 0.0)), Some(c(-0.5, 0.0)));
        assert_eq!(collision_fibre(c(0.0, 0.0)), None);
    }
}
