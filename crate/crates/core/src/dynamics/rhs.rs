use crate::algebra::{commutator, Complex, Matrix};
use crate::error::{Error, Result};

use super::{FlowForm, NahmState};

fn bracket(a: &Matrix, b: &Matrix) -> Matrix {
    commutator(a, b).expect("flow states carry equal dimensions")
}

fn expect_form(s: &NahmState, form: FlowForm) -> Result<()> {
    if s.form() != form {
        return Err(Error::WrongForm {
            expected: form,
            found: s.form(),
        });
    }
    Ok(())
}

fn check_dims(ms: &[&Matrix]) -> Result<()> {
    let n = ms[0].n();
    match ms.iter().find(|m| m.n() != n) {
        Some(bad) => Err(Error::DimensionMismatch {
            expected: n,
            found: bad.n(),
        }),
        None => Ok(()),
    }
}

/// `φ0 = -(T1 + iT2)`, `φ1 = -2i T3`, `φ2 = -(T1 - iT2)`.
pub fn to_phi(t1: &Matrix, t2: &Matrix, t3: &Matrix) -> Result<(Matrix, Matrix, Matrix)> {
    check_dims(&[t1, t2, t3])?;
    let i = Complex::i();
    let it2 = t2.scale(i);
    Ok((-&(t1 + &it2), t3.scale(-2.0 * i), -&(t1 - &it2)))
}

/// Inverse of [`to_phi`]: `T1 = -(φ0 + φ2)/2`, `T2 = (φ2 - φ0)/(2i)`,
/// `T3 = iφ1/2`.
pub fn from_phi(phi0: &Matrix, phi1: &Matrix, phi2: &Matrix) -> Result<(Matrix, Matrix, Matrix)> {
    check_dims(&[phi0, phi1, phi2])?;
    let i = Complex::i();
    let t1 = (phi0 + phi2).scale_re(-0.5);
    let t2 = (phi2 - phi0).scale(-0.5 * i);
    let t3 = phi1.scale(0.5 * i);
    Ok((t1, t2, t3))
}

/// `φ0' = -½[φ1, φ0]`, `φ1' = [φ0, φ2]`, `φ2' = ½[φ1, φ2]`.
pub fn rhs_symmetric(s: &NahmState) -> Result<[Matrix; 3]> {
    expect_form(s, FlowForm::Symmetric)?;
    let [p0, p1, p2] = [&s.coeffs()[0], &s.coeffs()[1], &s.coeffs()[2]];
    Ok([
        bracket(p1, p0).scale_re(-0.5),
        bracket(p0, p2),
        bracket(p1, p2).scale_re(0.5),
    ])
}

/// `φ0' = [φ0, φ1]`, `φ1' = [φ0, φ2]`, `φ2' = 0`.
pub fn rhs_asymmetric(s: &NahmState) -> Result<[Matrix; 3]> {
    expect_form(s, FlowForm::Asymmetric)?;
    let [p0, p1, p2] = [&s.coeffs()[0], &s.coeffs()[1], &s.coeffs()[2]];
    Ok([bracket(p0, p1), bracket(p0, p2), Matrix::zeros(s.n())])
}

/// `φ_k' = [φ_{k+1}, φ0]` for `k = 0, 1, 2` and `φ3' = 0`.
///
/// Oriented so that on the rank-2 moduli space the marked zero `z0` of the
/// lower-left entry moves by `z0' = -2 a(z0)`; this is the time reversal of
/// writing the brackets as `[φ0, φ_{k+1}]`.
pub fn rhs_parabolic(s: &NahmState) -> Result<[Matrix; 4]> {
    expect_form(s, FlowForm::Parabolic)?;
    let c = s.coeffs();
    Ok([
        bracket(&c[1], &c[0]),
        bracket(&c[2], &c[0]),
        bracket(&c[3], &c[0]),
        Matrix::zeros(s.n()),
    ])
}

/// `T1' = [T2, T3]`, `T2' = [T3, T1]`, `T3' = [T1, T2]`.
pub fn rhs_t_form(s: &NahmState) -> Result<[Matrix; 3]> {
    expect_form(s, FlowForm::TForm)?;
    let [t1, t2, t3] = [&s.coeffs()[0], &s.coeffs()[1], &s.coeffs()[2]];
    Ok([bracket(t2, t3), bracket(t3, t1), bracket(t1, t2)])
}

/// Right-hand side for whichever form the state carries.
pub fn rhs(s: &NahmState) -> Vec<Matrix> {
    vector_field(s.form(), s.coeffs())
}

/// Right-hand side on raw coefficient lists (no shape validation).
pub fn vector_field(form: FlowForm, c: &[Matrix]) -> Vec<Matrix> {
    match form {
        FlowForm::Symmetric => vec![
            bracket(&c[1], &c[0]).scale_re(-0.5),
            bracket(&c[0], &c[2]),
            bracket(&c[1], &c[2]).scale_re(0.5),
        ],
        FlowForm::Asymmetric => vec![
            bracket(&c[0], &c[1]),
            bracket(&c[0], &c[2]),
            Matrix::zeros(c[0].n()),
        ],
        FlowForm::Parabolic => vec![
            bracket(&c[1], &c[0]),
            bracket(&c[2], &c[0]),
            bracket(&c[3], &c[0]),
            Matrix::zeros(c[0].n()),
        ],
        FlowForm::TForm => vec![
            bracket(&c[1], &c[2]),
            bracket(&c[2], &c[0]),
            bracket(&c[0], &c[1]),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::c;

    fn e() -> Matrix {
        Matrix::from_real(2, &[0.0, 1.0, 0.0, 0.0])
    }
    fn f() -> Matrix {
        Matrix::from_real(2, &[0.0, 0.0, 1.0, 0.0])
    }
    fn h() -> Matrix {
        Matrix::from_real(2, &[1.0, 0.0, 0.0, -1.0])
    }

    #[test]
    fn symmetric_on_sl2_triple() {
        let s = NahmState::symmetric([e(), h(), f()]).unwrap();
        let [a, b, cc] = rhs_symmetric(&s).unwrap();
        assert_eq!(a, -&e());
        assert_eq!(b, h());
        assert_eq!(cc, -&f());
    }

    #[test]
    fn asymmetric_on_sl2_triple() {
        let s = NahmState::asymmetric([e(), h(), f()]).unwrap();
        let [a, b, cc] = rhs_asymmetric(&s).unwrap();
        assert_eq!(a, e().scale_re(-2.0));
        assert_eq!(b, h());
        assert_eq!(cc.max_norm(), 0.0);
    }

    #[test]
    fn commuting_data_is_stationary() {
        let d0 = Matrix::diag(&[c(1., 0.), c(2., 1.)]);
        let d1 = Matrix::diag(&[c(0., 3.), c(-1., 0.)]);
        let d2 = Matrix::diag(&[c(0.5, 0.), c(0., 0.)]);
        let s = NahmState::symmetric([d0.clone(), d1.clone(), d2.clone()]).unwrap();
        assert!(rhs(&s).iter().all(|m| m.max_norm() == 0.0));
        let s = NahmState::asymmetric([d0.clone(), d1.clone(), d2.clone()]).unwrap();
        assert!(rhs(&s).iter().all(|m| m.max_norm() == 0.0));
        let s = NahmState::t_form([d0, d1, d2]).unwrap();
        assert!(rhs(&s).iter().all(|m| m.max_norm() == 0.0));
    }

    #[test]
    fn wrong_form_is_rejected() {
        let s = NahmState::t_form([e(), h(), f()]).unwrap();
        assert!(matches!(rhs_symmetric(&s), Err(Error::WrongForm { .. })));
        assert!(matches!(rhs_parabolic(&s), Err(Error::WrongForm { .. })));
    }

    #[test]
    fn substitution_examples() {
        let z = Matrix::zeros(2);
        let (a, b, cc) = to_phi(&z, &z, &z).unwrap();
        assert!(a.max_norm() == 0.0 && b.max_norm() == 0.0 && cc.max_norm() == 0.0);
        let id = Matrix::identity(2);
        let (a, b, cc) = to_phi(&id, &z, &z).unwrap();
        assert_eq!(a, -&id);
        assert_eq!(b.max_norm(), 0.0);
        assert_eq!(cc, -&id);
        let (t1, t2, t3) = from_phi(&-&id, &z, &-&id).unwrap();
        assert_eq!(t1, id);
        assert_eq!(t2.max_norm(), 0.0);
        assert_eq!(t3.max_norm(), 0.0);
        assert!(to_phi(&id, &Matrix::zeros(3), &z).is_err());
    }

    #[test]
    fn rank2_parabolic_component_laws() {
        // Entries a = (1,1), c = (2,1); traceless.
        let p0 = Matrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => c(0.3, 0.1),
            (0, 1) => c(-0.7, 0.2),
            (1, 0) => c(0.4, -0.5),
            _ => c(-0.3, -0.1),
        });
        let p1 = Matrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => c(-0.2, 0.6),
            (0, 1) => c(0.1, 0.1),
            (1, 0) => c(1.1, 0.3),
            _ => c(0.2, -0.6),
        });
        let p2 = Matrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => c(0.5, -0.4),
            (0, 1) => c(0.9, 0.0),
            (1, 0) => c(0.0, 0.0),
            _ => c(-0.5, 0.4),
        });
        let s = NahmState::parabolic([p0.clone(), p1.clone(), p2.clone(), e()], 1).unwrap();
        let d = rhs_parabolic(&s).unwrap();
        let (a0, a1, a2) = (p0[(0, 0)], p1[(0, 0)], p2[(0, 0)]);
        let (c0, c1) = (p0[(1, 0)], p1[(1, 0)]);
        assert!((d[0][(1, 0)] - (c1 * a0 - a1 * c0) * 2.0).norm() < 1e-15);
        assert!((d[1][(1, 0)] + a2 * c0 * 2.0).norm() < 1e-15);
        assert_eq!(d[3].max_norm(), 0.0);
        // The lower-left block of φ2' stays zero.
        assert_eq!(d[2][(1, 0)], c(0.0, 0.0));
    }
}
