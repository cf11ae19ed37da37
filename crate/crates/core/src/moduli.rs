//! Rank-2 parabolic moduli: the marked point `(z0, w0)` on `w² = q(z)` and
//! the motion the flow induces on it.
//!
//! Entries are named `φ(z) = [[a, b], [c, -a]]` with `deg a <= 2`,
//! `deg b <= 3`, `deg c <= 1`; `z0` is the zero of `c` and `w0 = a(z0)`.

use serde::Serialize;

use crate::algebra::{c, Complex, Matrix, MatrixPoly, Poly};
use crate::dynamics::{FlowForm, NahmState, Trajectory};
use crate::error::{Error, Result};
use crate::spectral::rank2_q;

/// Tolerance used by [`vector_field_zero`] when none is supplied.
pub const TAU_ZERO: f64 = 1e-8;

/// Tolerance for the finite-difference motion laws of the marked point.
pub const LAW_TOL: f64 = 1e-5;

/// Ratio between `ż0` and `w0` along the integrated flow.
pub const TIME_FACTOR: f64 = -2.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModuliPoint {
    pub z0: Complex,
    pub w0: Complex,
    #[serde(skip)]
    pub q: Poly,
}

fn curve_scale(q: &Poly, z0: Complex, w0: Complex) -> f64 {
    let zpow = z0.norm().max(1.0).powi(4);
    (q.max_norm() * zpow).max(w0.norm_sqr()).max(1.0)
}

impl ModuliPoint {
    /// Checks `w0² = q(z0)` within `1e-9` relative.
    pub fn new(z0: Complex, w0: Complex, q: Poly) -> Result<Self> {
        let defect = (w0 * w0 - q.eval(z0)).norm();
        if defect > 1e-9 * curve_scale(&q, z0, w0) {
            return Err(Error::ShapeViolation(format!(
                "marked point is off the curve: |w0² - q(z0)| = {defect:e}"
            )));
        }
        Ok(Self { z0, w0, q })
    }

    pub fn curve_defect(&self) -> f64 {
        (self.w0 * self.w0 - self.q.eval(self.z0)).norm()
    }
}

/// Polynomial entries `(a, b, c)` of a rank-2 parabolic field.
struct Entries {
    a: Poly,
    c: Poly,
}

fn entries(phi: &MatrixPoly) -> Result<Entries> {
    if phi.n() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: phi.n(),
        });
    }
    if phi.degree_bound() > 3 {
        return Err(Error::ShapeViolation(format!(
            "rank-2 parabolic field has degree <= 3, got {} coefficients",
            phi.coeffs().len()
        )));
    }
    let entry = |i: usize, j: usize| Poly::new(phi.coeffs().iter().map(|m| m[(i, j)]).collect());
    let (a, cc) = (entry(0, 0), entry(1, 0));
    let scale = phi.max_norm().max(1.0);
    let a_high = a
        .coeffs()
        .iter()
        .skip(3)
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let c_high = cc
        .coeffs()
        .iter()
        .skip(2)
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if a_high.max(c_high) > 1e-10 * scale {
        return Err(Error::ShapeViolation(
            "parabolic shape needs deg a <= 2 and deg c <= 1".into(),
        ));
    }
    Ok(Entries {
        a: a.truncate(2),
        c: cc.truncate(1),
    })
}

fn coords_at(phi: &MatrixPoly, t: f64) -> Result<ModuliPoint> {
    let Entries { a, c: cc } = entries(phi)?;
    let (c0, c1) = (cc.coeff(0), cc.coeff(1));
    let scale = phi.max_norm().max(1.0);
    if c0.norm() <= 1e-14 * scale && c1.norm() <= 1e-14 * scale {
        return Err(Error::UnstableInput);
    }
    if c1.norm() <= 1e-12 * scale {
        return Err(Error::ChartBreakdown { t, c1: c1.norm() });
    }
    let z0 = -c0 / c1;
    let q = rank2_q(phi)?;
    ModuliPoint::new(z0, a.eval(z0), q)
}

/// `z0 = -c0/c1`, `w0 = a(z0)`, `q = -a_2`.
///
/// A chart breakdown reports `t = NaN` here; along a trajectory the sample
/// time is filled in.
pub fn moduli_coords(phi: &MatrixPoly) -> Result<ModuliPoint> {
    coords_at(phi, f64::NAN)
}

/// The parabolic state `φ0 + φ1 z + φ2 z² + φ3 z³` with split `(1, 1)` built
/// from the entry polynomials `a`, `b`, `c` (lowest degree first; missing
/// coefficients are zero).
pub fn rank2_parabolic(a: &[Complex], b: &[Complex], cc: &[Complex]) -> Result<NahmState> {
    if a.len() > 3 || b.len() > 4 || cc.len() > 2 {
        return Err(Error::ShapeViolation(
            "rank-2 parabolic entries need deg a <= 2, deg b <= 3, deg c <= 1".into(),
        ));
    }
    let zero = c(0.0, 0.0);
    let get = |v: &[Complex], k: usize| v.get(k).copied().unwrap_or(zero);
    let coeffs = (0..4)
        .map(|k| {
            let (ak, bk, ck) = (get(a, k), get(b, k), get(cc, k));
            Matrix::from_entries(2, vec![ak, bk, ck, -ak])
        })
        .collect::<Result<Vec<_>>>()?;
    NahmState::new(0.0, FlowForm::Parabolic, coeffs, Some(1))
}

/// True when the induced vector field vanishes at `p`: either `q ≡ 0`, or
/// `w0 = 0` and `q'(z0) = 0` (a singular point of the curve).
pub fn vector_field_zero(p: &ModuliPoint, tol: f64) -> bool {
    if p.q.max_norm() <= tol {
        return true;
    }
    let dq = p.q.derivative();
    let zpow = p.z0.norm().max(1.0).powi(dq.degree().unwrap_or(0) as i32);
    p.w0.norm() < tol && dq.eval(p.z0).norm() < tol * dq.max_norm().max(f64::MIN_POSITIVE) * zpow
}

/// Finite-difference comparison of the marked point's motion with the
/// predicted laws, over interior samples.
#[derive(Clone, Debug, Serialize)]
pub struct ModuliFlowReport {
    /// `ż0 = TIME_FACTOR · w0` on the integrated flow.
    pub time_factor: f64,
    /// `max |ż0 + 2a(z0)|`
    pub z0_law: f64,
    /// `max |ẇ0 + q'(z0)|`
    pub w0_law: f64,
    /// `max |ż0 + 2w0|`
    pub z0_vs_w0: f64,
    /// `max |ċ0 - 2(c1 a0 - a1 c0)|`
    pub c0_law: f64,
    /// `max |ċ1 + 2 a2 c0|`
    pub c1_law: f64,
    /// `max |w0(t)² - q(0)(z0(t))|`
    pub curve_defect: f64,
    /// `max_t max_j |q_j(t) - q_j(0)|`
    pub q_drift: f64,
    /// `max |ż0|` and `max |ẇ0|`
    pub z0_rate: f64,
    pub w0_rate: f64,
    pub samples: usize,
}

impl ModuliFlowReport {
    pub fn within(&self, tol: f64) -> bool {
        [
            self.z0_law,
            self.w0_law,
            self.z0_vs_w0,
            self.c0_law,
            self.c1_law,
        ]
        .iter()
        .all(|&x| x < tol)
    }
}

/// Second-order derivative at the middle of three (possibly unevenly
/// spaced) samples.
fn central(t: [f64; 3], f: [Complex; 3]) -> Complex {
    let h1 = t[1] - t[0];
    let h2 = t[2] - t[1];
    (f[2] * (h1 * h1) - f[0] * (h2 * h2) + f[1] * (h2 * h2 - h1 * h1)) / (h1 * h2 * (h1 + h2))
}

struct Sample {
    t: f64,
    point: ModuliPoint,
    a: [Complex; 3],
    c: [Complex; 2],
}

/// Checks the predicted motion of `(z0, w0)` and of `c0`, `c1` along a
/// rank-2 parabolic trajectory.
pub fn moduli_flow_check(traj: &Trajectory) -> Result<ModuliFlowReport> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    if traj.form() != FlowForm::Parabolic {
        return Err(Error::WrongForm {
            expected: FlowForm::Parabolic,
            found: traj.form(),
        });
    }
    let samples = traj
        .samples()
        .iter()
        .map(|s| {
            let phi = s.higgs_field();
            let point = coords_at(&phi, s.t())?;
            let Entries { a, c: cc } = entries(&phi)?;
            Ok(Sample {
                t: s.t(),
                point,
                a: [a.coeff(0), a.coeff(1), a.coeff(2)],
                c: [cc.coeff(0), cc.coeff(1)],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let q0 = samples[0].point.q.clone();
    let mut report = ModuliFlowReport {
        time_factor: TIME_FACTOR,
        z0_law: 0.0,
        w0_law: 0.0,
        z0_vs_w0: 0.0,
        c0_law: 0.0,
        c1_law: 0.0,
        curve_defect: 0.0,
        q_drift: 0.0,
        z0_rate: 0.0,
        w0_rate: 0.0,
        samples: samples.len(),
    };
    for s in &samples {
        report.curve_defect = report
            .curve_defect
            .max((s.point.w0 * s.point.w0 - q0.eval(s.point.z0)).norm());
        let drift = (0..5)
            .map(|j| (s.point.q.coeff(j) - q0.coeff(j)).norm())
            .fold(0.0, f64::max);
        report.q_drift = report.q_drift.max(drift);
    }
    for win in samples.windows(3) {
        let t = [win[0].t, win[1].t, win[2].t];
        let mid = &win[1];
        let dz = central(t, [win[0].point.z0, mid.point.z0, win[2].point.z0]);
        let dw = central(t, [win[0].point.w0, mid.point.w0, win[2].point.w0]);
        let dc0 = central(t, [win[0].c[0], mid.c[0], win[2].c[0]]);
        let dc1 = central(t, [win[0].c[1], mid.c[1], win[2].c[1]]);
        let [a0, a1, a2] = mid.a;
        let [c0, c1] = mid.c;
        let a_at = a0 + a1 * mid.point.z0 + a2 * mid.point.z0 * mid.point.z0;
        let dq = mid.point.q.derivative().eval(mid.point.z0);
        report.z0_law = report.z0_law.max((dz + a_at * 2.0).norm());
        report.w0_law = report.w0_law.max((dw + dq).norm());
        report.z0_vs_w0 = report
            .z0_vs_w0
            .max((dz - mid.point.w0 * TIME_FACTOR).norm());
        report.c0_law = report.c0_law.max((dc0 - (c1 * a0 - a1 * c0) * 2.0).norm());
        report.c1_law = report.c1_law.max((dc1 + a2 * c0 * 2.0).norm());
        report.z0_rate = report.z0_rate.max(dz.norm());
        report.w0_rate = report.w0_rate.max(dw.norm());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::integrate;

    fn r(v: &[f64]) -> Vec<Complex> {
        v.iter().map(|&x| c(x, 0.0)).collect()
    }

    #[test]
    fn zero_of_linear_c() {
        let s =
            rank2_parabolic(&r(&[0.3, 0.1]), &r(&[1.0, 0.0, 0.0, 1.0]), &r(&[1.0, 2.0])).unwrap();
        let p = moduli_coords(&s.higgs_field()).unwrap();
        assert!((p.z0 - c(-0.5, 0.0)).norm() < 1e-15);
        assert!((p.w0 - c(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn hand_determinant_example() {
        // a = z², c = z - 1, b = -z(1 + z²): det φ(1) = -a(1)².
        let s = rank2_parabolic(
            &r(&[0.0, 0.0, 1.0]),
            &r(&[0.0, -1.0, 0.0, -1.0]),
            &r(&[-1.0, 1.0]),
        )
        .unwrap();
        let p = moduli_coords(&s.higgs_field()).unwrap();
        assert!((p.z0 - c(1.0, 0.0)).norm() < 1e-15);
        assert!((p.w0 - c(1.0, 0.0)).norm() < 1e-15);
        assert!(p.curve_defect() < 1e-12);
    }

    #[test]
    fn nilpotent_input_marks_zero() {
        // a = iz(z - 2), b = z²(z - 2), c = z - 2: q = a² + bc ≡ 0.
        let s = rank2_parabolic(
            &[c(0.0, 0.0), c(0.0, -2.0), c(0.0, 1.0)],
            &r(&[0.0, 0.0, -2.0, 1.0]),
            &r(&[-2.0, 1.0]),
        )
        .unwrap();
        let phi = s.higgs_field();
        assert!(crate::spectral::is_nilpotent_field(&phi).unwrap());
        let p = moduli_coords(&phi).unwrap();
        assert!(p.w0.norm() < 1e-15);
        assert!(vector_field_zero(&p, TAU_ZERO));
    }

    #[test]
    fn stability_and_chart_errors() {
        let s = rank2_parabolic(&r(&[1.0]), &r(&[0.0, 0.0, 0.0, 1.0]), &[]).unwrap();
        assert!(matches!(
            moduli_coords(&s.higgs_field()),
            Err(Error::UnstableInput)
        ));
        let s = rank2_parabolic(&r(&[1.0]), &r(&[0.0, 0.0, 0.0, 1.0]), &r(&[1.0])).unwrap();
        assert!(matches!(
            moduli_coords(&s.higgs_field()),
            Err(Error::ChartBreakdown { .. })
        ));
    }

    #[test]
    fn vector_field_zero_cases() {
        let q = &Poly::from_roots(&[c(1.0, 0.0), c(1.0, 0.0)]) * &Poly::from_real(&[1.0, 0.0, 1.0]);
        let p = ModuliPoint::new(c(1.0, 0.0), c(0.0, 0.0), q).unwrap();
        assert!(vector_field_zero(&p, TAU_ZERO));
        let smooth = Poly::from_real(&[-1.0, 0.0, 0.0, 0.0, 1.0]);
        let z0 = c(0.5, 0.5);
        let w0 = smooth.eval(z0).sqrt();
        let p = ModuliPoint::new(z0, w0, smooth).unwrap();
        assert!(!vector_field_zero(&p, TAU_ZERO));
        let p = ModuliPoint::new(c(3.0, 0.0), c(0.0, 0.0), Poly::zero()).unwrap();
        assert!(vector_field_zero(&p, TAU_ZERO));
        assert!(ModuliPoint::new(c(0.0, 0.0), c(1.0, 0.0), Poly::zero()).is_err());
    }

    #[test]
    fn marked_point_follows_the_laws() {
        let s = rank2_parabolic(
            &[c(0.3, 0.1), c(-0.2, 0.4), c(0.1, -0.3)],
            &[c(0.5, 0.0), c(0.2, -0.1), c(-0.3, 0.2), c(1.0, 0.0)],
            &[c(0.4, -0.2), c(0.9, 0.3)],
        )
        .unwrap();
        let traj = integrate(&s, 0.5, 1e-3).unwrap();
        let rep = moduli_flow_check(&traj).unwrap();
        assert!(rep.within(1e-5), "{rep:?}");
        assert!(rep.curve_defect < 1e-8);
        assert!(rep.z0_rate > 1e-2);
    }

    #[test]
    fn singular_marked_point_is_stationary() {
        // a = z - 1, b = z³ - z², c = z - 1: q = (z - 1)²(1 + z²), w0 = 0.
        let s = rank2_parabolic(
            &r(&[-1.0, 1.0]),
            &r(&[0.0, 0.0, -1.0, 1.0]),
            &r(&[-1.0, 1.0]),
        )
        .unwrap();
        let p = moduli_coords(&s.higgs_field()).unwrap();
        assert!(vector_field_zero(&p, TAU_ZERO));
        let traj = integrate(&s, 0.2, 1e-3).unwrap();
        let rep = moduli_flow_check(&traj).unwrap();
        assert!(rep.z0_rate < 1e-8 && rep.w0_rate < 1e-8, "{rep:?}");
    }
}
