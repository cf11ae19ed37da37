//! Spectral curve data `det(w - φ(z)) = w^n + a_1(z) w^{n-1} + … + a_n(z)`
//! and its conservation along the flow.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{char_poly, poly_root_clusters, roots_of_unity, Complex, MatrixPoly, Poly};
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};

/// Relative tolerance for degree bounds and vanishing tests on the `a_k`.
pub const TAU_SPEC: f64 = 1e-9;

/// The coefficients `a_1 … a_n` of the characteristic polynomial of `φ(z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralData {
    n: usize,
    a: Vec<Poly>,
    scale: f64,
}

impl SpectralData {
    /// Wraps given coefficients `a_1 … a_n`; the field scale used for
    /// tolerances is estimated as `max_k ‖a_k‖^{1/k} / n`.
    pub fn from_coefficients(a: Vec<Poly>) -> Self {
        let n = a.len();
        let scale = a
            .iter()
            .enumerate()
            .map(|(i, p)| p.max_norm().powf(1.0 / (i + 1) as f64))
            .fold(0.0, f64::max)
            / n.max(1) as f64;
        Self { n, a, scale }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `a_k` for `1 <= k <= n`.
    pub fn a(&self, k: usize) -> &Poly {
        &self.a[k - 1]
    }

    /// `a_1 … a_n` in order.
    pub fn coefficients(&self) -> &[Poly] {
        &self.a
    }

    /// Max-norm of the Higgs field the data was computed from.
    pub fn field_scale(&self) -> f64 {
        self.scale
    }

    /// Size below which a coefficient of `a_k` counts as zero.
    pub fn tolerance(&self, k: usize) -> f64 {
        TAU_SPEC * coefficient_scale(self.n, self.scale, k)
    }

    /// `det(w - φ(z))` as a polynomial in `w` (lowest degree first).
    pub fn char_poly_at(&self, z: Complex) -> Poly {
        let n = self.n;
        let mut coeffs = vec![Complex::new(0.0, 0.0); n + 1];
        coeffs[n] = Complex::new(1.0, 0.0);
        for k in 1..=n {
            coeffs[n - k] = self.a[k - 1].eval(z);
        }
        Poly::new(coeffs)
    }

    pub fn eval(&self, w: Complex, z: Complex) -> Complex {
        self.char_poly_at(z).eval(w)
    }

    /// True when every `a_k` vanishes within tolerance.
    pub fn is_nilpotent(&self) -> bool {
        self.a
            .iter()
            .enumerate()
            .all(|(i, p)| p.max_norm() <= self.tolerance(i + 1))
    }
}

/// Crude bound on the size of `a_k` for an `n × n` field of max-norm `s`.
fn coefficient_scale(n: usize, s: f64, k: usize) -> f64 {
    (n as f64 * s).powi(k as i32).max(1.0)
}

/// Interpolates each `a_k(z)` from characteristic polynomials at roots of
/// unity and checks `deg a_k <= 2k`.
///
/// The node count exceeds `n · deg φ`, so the discrete Fourier inversion is
/// exact up to rounding; coefficients above `2k` must then be negligible,
/// and are dropped only after that has been confirmed.
pub fn spectral_data(phi: &MatrixPoly) -> Result<SpectralData> {
    let n = phi.n();
    let d = phi.degree_bound().max(2);
    let nodes = roots_of_unity(d * n + 1);
    let count = nodes.len();
    let values: Vec<Poly> = nodes.iter().map(|&z| char_poly(&phi.eval(z))).collect();
    let scale = phi.max_norm();
    let mut a = Vec::with_capacity(n);
    for k in 1..=n {
        let coeffs: Vec<Complex> = (0..count)
            .map(|m| {
                let sum: Complex = nodes
                    .iter()
                    .zip(&values)
                    .map(|(z, cp)| cp.coeff(n - k) * z.powu(m as u32).conj())
                    .sum();
                sum / count as f64
            })
            .collect();
        let bound = 2 * k;
        let tol = TAU_SPEC * coefficient_scale(n, scale, k);
        if let Some((power, c)) = coeffs
            .iter()
            .enumerate()
            .skip(bound + 1)
            .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        {
            if c.norm() > tol {
                return Err(Error::DegreeBound {
                    k,
                    power,
                    bound,
                    magnitude: c.norm(),
                });
            }
        }
        a.push(Poly::new(coeffs).truncate(bound));
    }
    Ok(SpectralData { n, a, scale })
}

/// Largest deviation of each `a_k` from its value at the first sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftReport {
    /// `max_t max_j |coeff_j(a_k(t)) - coeff_j(a_k(0))|`, indexed by `k - 1`.
    pub max_deviation: Vec<f64>,
    /// Time at which each maximum was attained.
    pub at_time: Vec<f64>,
    pub samples: usize,
}

impl DriftReport {
    pub fn max(&self) -> f64 {
        self.max_deviation.iter().copied().fold(0.0, f64::max)
    }

    pub fn within(&self, tol: f64) -> bool {
        self.max() < tol
    }
}

fn coefficient_distance(a: &Poly, b: &Poly) -> f64 {
    let len = a.coeffs().len().max(b.coeffs().len());
    (0..len)
        .map(|j| (a.coeff(j) - b.coeff(j)).norm())
        .fold(0.0, f64::max)
}

/// Compares the spectral data of every sample against the first.
pub fn conservation_drift(traj: &Trajectory) -> Result<DriftReport> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let data: Vec<SpectralData> = traj
        .samples()
        .par_iter()
        .map(|s| spectral_data(&s.higgs_field()))
        .collect::<Result<_>>()?;
    let n = data[0].n();
    let mut max_deviation = vec![0.0; n];
    let mut at_time = vec![traj.first().t(); n];
    for (sample, sd) in traj.samples().iter().zip(&data).skip(1) {
        for k in 0..n {
            let dev = coefficient_distance(&sd.a[k], &data[0].a[k]);
            if dev > max_deviation[k] {
                max_deviation[k] = dev;
                at_time[k] = sample.t();
            }
        }
    }
    Ok(DriftReport {
        max_deviation,
        at_time,
        samples: traj.len(),
    })
}

/// `q = -a_2` for a traceless rank-2 field, so the curve is `w² = q(z)`.
pub fn rank2_q(phi: &MatrixPoly) -> Result<Poly> {
    if phi.n() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: phi.n(),
        });
    }
    let sd = spectral_data(phi)?;
    let a1 = sd.a(1).max_norm();
    if a1 > sd.tolerance(1) {
        return Err(Error::NotTraceless(a1));
    }
    Ok(sd.a(2).scale(Complex::new(-1.0, 0.0)))
}

/// Finite singular points of `w² = q(z)`: the multiple roots of `q`.
///
/// Candidates come from clustered roots; each is confirmed by
/// `|q'(z)| <= 1e-8 · ‖q'‖ · max(1, |z|)^deg q'`.
pub fn singular_points_rank2(q: &Poly) -> Result<Vec<Complex>> {
    let q = q.normalized();
    if q.is_zero() {
        return Err(Error::NilpotentCase);
    }
    let dq = q.derivative();
    let dq_norm = dq.max_norm();
    let dq_deg = dq.degree().unwrap_or(0) as i32;
    let clusters = poly_root_clusters(&q, 1e-5)?;
    Ok(clusters
        .into_iter()
        .filter(|c| c.multiplicity >= 2)
        .map(|c| c.center)
        .filter(|z| dq.eval(*z).norm() <= 1e-8 * dq_norm * z.norm().max(1.0).powi(dq_deg))
        .collect())
}

/// Whether the curve is singular over `z = ∞`, that is `q` viewed as a
/// quartic has a multiple root at infinity (`deg q <= 2`).
pub fn singular_at_infinity(q: &Poly) -> Result<bool> {
    let q = q.normalized();
    if q.is_zero() {
        return Err(Error::NilpotentCase);
    }
    Ok(q.degree().unwrap_or(0) <= 2)
}

/// True iff the characteristic polynomial of `φ(z)` is `w^n`.
pub fn is_nilpotent_field(phi: &MatrixPoly) -> Result<bool> {
    Ok(spectral_data(phi)?.is_nilpotent())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{c, Matrix};

    fn e() -> Matrix {
        Matrix::from_real(2, &[0.0, 1.0, 0.0, 0.0])
    }
    fn h() -> Matrix {
        Matrix::from_real(2, &[1.0, 0.0, 0.0, -1.0])
    }

    fn close(p: &Poly, expect: &[f64], tol: f64) -> bool {
        let len = p.coeffs().len().max(expect.len());
        (0..len).all(|j| (p.coeff(j) - c(*expect.get(j).unwrap_or(&0.0), 0.0)).norm() < tol)
    }

    #[test]
    fn running_example() {
        // φ(z) = [[z, 1], [z², -z]]
        let phi =
            MatrixPoly::new(vec![e(), h(), Matrix::from_real(2, &[0.0, 0.0, 1.0, 0.0])]).unwrap();
        let sd = spectral_data(&phi).unwrap();
        assert!(close(sd.a(1), &[], 1e-14));
        assert!(close(sd.a(2), &[0.0, 0.0, -2.0], 1e-14));
        let q = rank2_q(&phi).unwrap();
        assert!(close(&q, &[0.0, 0.0, 2.0], 1e-14));
        let sing = singular_points_rank2(&q).unwrap();
        assert_eq!(sing.len(), 1);
        assert!(sing[0].norm() < 1e-12);
    }

    #[test]
    fn constant_h() {
        let phi = MatrixPoly::new(vec![h()]).unwrap();
        let sd = spectral_data(&phi).unwrap();
        assert!(close(sd.a(2), &[-1.0], 1e-14));
        assert!(close(&rank2_q(&phi).unwrap(), &[1.0], 1e-14));
        assert!(!is_nilpotent_field(&phi).unwrap());
    }

    #[test]
    fn nilpotent_fields() {
        let a = Poly::from_roots(&[c(1.0, 0.0), c(-2.0, 0.0)]);
        let phi = MatrixPoly::scalar_times(a.coeffs(), &e());
        assert!(is_nilpotent_field(&phi).unwrap());
        assert!(rank2_q(&phi).unwrap().normalized().is_zero());
        let n_z = MatrixPoly::new(vec![
            e(),
            h().scale_re(-1.0),
            Matrix::from_real(2, &[0.0, 0.0, -1.0, 0.0]),
        ])
        .unwrap();
        assert!(is_nilpotent_field(&n_z).unwrap());
        assert!(matches!(
            singular_points_rank2(&Poly::zero()),
            Err(Error::NilpotentCase)
        ));
    }

    #[test]
    fn singular_point_examples() {
        let s = singular_points_rank2(&Poly::from_real(&[0.0, 0.0, -1.0, 1.0])).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s[0].norm() < 1e-12);
        assert!(
            singular_points_rank2(&Poly::from_real(&[-1.0, 0.0, 0.0, 0.0, 1.0]))
                .unwrap()
                .is_empty()
        );
        assert!(singular_at_infinity(&Poly::from_real(&[0.0, 0.0, 2.0])).unwrap());
        assert!(!singular_at_infinity(&Poly::from_real(&[-1.0, 0.0, 0.0, 0.0, 1.0])).unwrap());
    }

    #[test]
    fn rank2_q_rejects_trace() {
        let phi = MatrixPoly::new(vec![Matrix::identity(2)]).unwrap();
        assert!(matches!(rank2_q(&phi), Err(Error::NotTraceless(_))));
    }

    #[test]
    fn degree_bound_violation_is_reported() {
        // Cubic φ with a trace of degree 3 breaks deg a_1 <= 2.
        let phi = MatrixPoly::new(vec![
            Matrix::zeros(2),
            Matrix::zeros(2),
            Matrix::zeros(2),
            Matrix::identity(2),
        ])
        .unwrap();
        assert!(matches!(
            spectral_data(&phi),
            Err(Error::DegreeBound { k: 1, .. })
        ));
    }
}
