use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{eigen_multiplicity_scaled, poly_roots, Complex, Matrix, MatrixPoly};
use crate::error::{Error, Result};

use super::{case_split, RibbonPoly, SheafCase};

/// Samples per circle when none is requested.
pub const DEFAULT_GRID: usize = 256;

/// Radii of the seed circles.
pub const RADII: [f64; 3] = [0.5, 1.0, 2.0];

const MIN_GRID: usize = 8;
const MAX_NEWTON: usize = 80;
const DEDUP_TOL: f64 = 1e-6;
const FUNCTIONAL_SEED: u64 = 0x00d1_7150;

/// A point of `S` where the eigenspace of `φ(z)` jumps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DivisorPoint {
    pub z: Complex,
    pub lambda: Complex,
    /// Dimension of the `λ`-eigenspace of `φ(z)`.
    pub mult: usize,
    /// Multiplicity of the point in the divisor: the vanishing order of the
    /// adjugate of `φ - λ` along `S`.
    pub order: usize,
    /// `|p(λ, z)|` after refinement.
    pub residual: f64,
}

/// `u^T adj(φ(z) - λ) v` for fixed vectors `u`, `v`.
///
/// The adjugate vanishes exactly where the eigenspace has dimension at
/// least two, and a generic scalar projection of it is holomorphic in
/// `(z, λ)`, so its zeros can be refined by Newton's method. It is
/// evaluated as `det(M + v u^T) - det(M)`.
#[derive(Clone, Debug)]
pub(crate) struct AdjugateForm {
    u: Vec<Complex>,
    v: Vec<Complex>,
}

impl AdjugateForm {
    pub(crate) fn family(n: usize) -> Vec<AdjugateForm> {
        let mut rng = ChaCha8Rng::seed_from_u64(FUNCTIONAL_SEED);
        let mut draw = || {
            (0..n)
                .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect::<Vec<_>>()
        };
        (0..3)
            .map(|_| AdjugateForm {
                u: draw(),
                v: draw(),
            })
            .collect()
    }

    fn at_matrix(&self, m: &Matrix) -> Complex {
        let mut r = m.clone();
        for i in 0..m.n() {
            for j in 0..m.n() {
                r[(i, j)] += self.v[i] * self.u[j];
            }
        }
        r.determinant() - m.determinant()
    }

    pub(crate) fn eval(&self, phi: &MatrixPoly, z: Complex, lambda: Complex) -> Complex {
        self.at_matrix(&phi.eval(z).shift(lambda))
    }
}

fn p_scale(p: &RibbonPoly, z: Complex, lambda: Complex) -> f64 {
    let coeffs = p.in_w(z);
    coeffs.max_norm().max(1.0) * lambda.norm().max(1.0).powi(p.m() as i32)
}

/// Newton's method on `(p(λ, z), f(z, λ)) = 0`.
pub(crate) fn newton(
    phi: &MatrixPoly,
    p: &RibbonPoly,
    f: &AdjugateForm,
    mut z: Complex,
    mut lambda: Complex,
) -> Option<(Complex, Complex)> {
    let mut settled = 0;
    for _ in 0..MAX_NEWTON {
        let pv = p.eval(lambda, z);
        let (pw, pz) = p.gradient(lambda, z);
        let fv = f.eval(phi, z, lambda);
        let h = 1e-5 * (1.0 + z.norm());
        let fz = (f.eval(phi, z + h, lambda) - f.eval(phi, z - h, lambda)) / (2.0 * h);
        let hl = 1e-5 * (1.0 + lambda.norm());
        let fl = (f.eval(phi, z, lambda + hl) - f.eval(phi, z, lambda - hl)) / (2.0 * hl);
        let det = pz * fl - pw * fz;
        if det.norm() == 0.0 || !det.re.is_finite() || !det.im.is_finite() {
            return None;
        }
        let dz = (pv * fl - pw * fv) / det;
        let dl = (pz * fv - fz * pv) / det;
        if !(dz.re.is_finite() && dz.im.is_finite() && dl.re.is_finite() && dl.im.is_finite()) {
            return None;
        }
        z -= dz;
        lambda -= dl;
        if z.norm() > 1e4 || lambda.norm() > 1e8 {
            return None;
        }
        if dz.norm() + dl.norm() < 1e-13 * (1.0 + z.norm() + lambda.norm()) {
            settled += 1;
            if settled >= 2 {
                return Some((z, lambda));
            }
        }
    }
    // Linear convergence at multiple zeros: accept a small final step.
    let pv = p.eval(lambda, z);
    (pv.norm() < 1e-9 * p_scale(p, z, lambda)).then_some((z, lambda))
}

/// Size of `φ(z)` used as the floor of the rank test.
pub(crate) fn field_scale(phi: &MatrixPoly, z: Complex) -> f64 {
    phi.max_norm() * (phi.n() as f64) * (1.0 + z.norm()).powi(phi.degree_bound() as i32)
}

/// Accepts a Newton limit as a divisor point when it lies on `S` and the
/// eigenspace there is at least two-dimensional.
fn confirm(
    phi: &MatrixPoly,
    p: &RibbonPoly,
    z: Complex,
    lambda: Complex,
    tau_rank: f64,
) -> Result<Option<(usize, f64)>> {
    let residual = p.eval(lambda, z).norm();
    if residual > 1e-8 * p_scale(p, z, lambda) {
        return Ok(None);
    }
    let mult = eigen_multiplicity_scaled(&phi.eval(z), lambda, tau_rank, field_scale(phi, z))?;
    Ok((mult >= 2).then_some((mult, residual)))
}

fn same_point(a: (Complex, Complex), b: (Complex, Complex)) -> bool {
    (a.0 - b.0).norm() + (a.1 - b.1).norm() < DEDUP_TOL * (1.0 + a.0.norm() + a.1.norm())
}

/// Winding number of `f` along a small loop around `(z, λ)` on `S`, going
/// round `z` as many times as it takes for the tracked root to return.
fn local_order(
    phi: &MatrixPoly,
    p: &RibbonPoly,
    f: &AdjugateForm,
    z0: Complex,
    l0: Complex,
    r: f64,
) -> Option<usize> {
    const STEPS: usize = 512;
    let m = p.m();
    let start = z0 + r;
    let roots = poly_roots(&p.in_w(start)).ok()?;
    let first = *roots
        .iter()
        .min_by(|a, b| (*a - l0).norm().total_cmp(&(*b - l0).norm()))?;
    let mut lambda = first;
    let mut prev = f.eval(phi, start, lambda);
    if prev.norm() == 0.0 {
        return None;
    }
    let mut total = 0.0;
    for turn in 1..=m.max(1) {
        for k in 1..=STEPS {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / STEPS as f64;
            let z = z0 + Complex::from_polar(r, theta);
            let roots = poly_roots(&p.in_w(z)).ok()?;
            lambda = *roots
                .iter()
                .min_by(|a, b| (*a - lambda).norm().total_cmp(&(*b - lambda).norm()))?;
            let val = f.eval(phi, z, lambda);
            if val.norm() == 0.0 {
                return None;
            }
            total += (val / prev).arg();
            prev = val;
        }
        if (lambda - first).norm() < 1e-6 * (1.0 + first.norm()) || turn == m {
            break;
        }
    }
    let w = (total / (2.0 * std::f64::consts::PI)).round();
    (w >= 0.0).then_some(w as usize)
}

/// Points of the spectral ribbon where `φ(z) - λ` drops rank by at least two.
///
/// Newton's method on `(p(λ, z), u^T adj(φ(z) - λ) v) = 0` is started from
/// every root `λ` of `p(·, z)` at `grid` points on each circle of [`RADII`],
/// for three fixed random functionals `(u, v)`. Limits are kept when the
/// `λ`-eigenspace of `φ(z)` is at least two-dimensional at `tau_rank`, and
/// deduplicated. Each point's `order` is the smallest winding number of the
/// three functionals around it.
pub fn divisor_d(
    phi: &MatrixPoly,
    p: &RibbonPoly,
    grid: usize,
    tau_rank: f64,
) -> Result<Vec<DivisorPoint>> {
    if grid < MIN_GRID {
        return Err(Error::GridTooSmall(grid));
    }
    if !(tau_rank > 0.0 && tau_rank.is_finite()) {
        return Err(Error::InvalidTolerance(tau_rank));
    }
    if case_split(phi, p)? == SheafCase::BundleOnS {
        return Err(Error::ShapeViolation(
            "every eigenspace is two-dimensional: the divisor is only defined for a generalized line bundle".into(),
        ));
    }
    let forms = AdjugateForm::family(phi.n());
    let mut seeds = Vec::with_capacity(RADII.len() * grid * p.m());
    for r in RADII {
        for j in 0..grid {
            let z = Complex::from_polar(
                r,
                2.0 * std::f64::consts::PI * (j as f64 + 0.5) / grid as f64,
            );
            for lambda in poly_roots(&p.in_w(z))? {
                seeds.push((z, lambda));
            }
        }
    }
    let limits: Vec<(Complex, Complex)> = forms
        .iter()
        .flat_map(|f| seeds.iter().map(move |s| (f, *s)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .filter_map(|(f, (z, l))| newton(phi, p, f, z, l))
        .collect();

    let mut found: Vec<(Complex, Complex, usize, f64)> = Vec::new();
    for (z, l) in limits {
        if found.iter().any(|q| same_point((q.0, q.1), (z, l))) {
            continue;
        }
        if let Some((mult, residual)) = confirm(phi, p, z, l, tau_rank)? {
            found.push((z, l, mult, residual));
        }
    }
    found.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));

    let mut out = Vec::with_capacity(found.len());
    for (i, &(z, lambda, mult, residual)) in found.iter().enumerate() {
        let nearest = found
            .iter()
            .enumerate()
            .filter(|(j, q)| *j != i && (q.0 - z).norm() > 0.0)
            .map(|(_, q)| (q.0 - z).norm())
            .fold(f64::INFINITY, f64::min);
        let r = 0.05f64.min(0.3 * nearest);
        let order = forms
            .iter()
            .filter_map(|f| local_order(phi, p, f, z, lambda, r))
            .min()
            .unwrap_or(0);
        out.push(DivisorPoint {
            z,
            lambda,
            mult,
            order,
            residual,
        });
    }
    Ok(out)
}

/// Re-converges a known divisor point for a nearby field.
pub(crate) fn track(
    phi: &MatrixPoly,
    p: &RibbonPoly,
    pt: &DivisorPoint,
    tau_rank: f64,
) -> Result<Option<DivisorPoint>> {
    let forms = AdjugateForm::family(phi.n());
    for f in &forms {
        if let Some((z, lambda)) = newton(phi, p, f, pt.z, pt.lambda) {
            if let Some((mult, residual)) = confirm(phi, p, z, lambda, tau_rank)? {
                return Ok(Some(DivisorPoint {
                    z,
                    lambda,
                    mult,
                    order: pt.order,
                    residual,
                }));
            }
        }
    }
    Ok(None)
}

/// Outcome of comparing `deg D` with `2m² - 2d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeCheck {
    pub total: usize,
    pub expected: i64,
    pub consistent: bool,
}

/// Sum of the divisor orders.
pub fn divisor_degree(d: &[DivisorPoint]) -> usize {
    d.iter().map(|p| p.order).sum()
}

/// `Σ order == 2m² - 2d` for the caller-supplied extension degree `d`.
pub fn degree_consistency(points: &[DivisorPoint], m: usize, d: i64) -> DegreeCheck {
    let total = divisor_degree(points);
    let expected = 2 * (m * m) as i64 - 2 * d;
    DegreeCheck {
        total,
        expected,
        consistent: total as i64 == expected,
    }
}
