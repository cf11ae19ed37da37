use serde::Serialize;

use crate::algebra::{eigen_multiplicity_scaled, poly_roots, Complex, MatrixPoly};
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::spectral::spectral_data;

use super::divisor::{field_scale, track};
use super::{divisor_d, extract_square_root, DivisorPoint, RibbonPoly};

/// Full rescans happen every this many samples (and at the last one).
pub const DEFAULT_SCAN_STRIDE: usize = 50;

/// How the divisor behaves along a trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct DivisorConservation {
    pub initial: Vec<DivisorPoint>,
    pub final_points: Vec<DivisorPoint>,
    /// Largest `|Δz| + |Δλ|` of a tracked point from its position at the
    /// first sample.
    pub max_drift: f64,
    pub at_time: f64,
    /// Times at which a point could not be tracked or a rescan found a
    /// different number of points.
    pub count_changes: Vec<f64>,
    /// Largest change of a coefficient of `p` from the first sample.
    pub p_drift: f64,
    pub samples: usize,
    pub scans: usize,
}

impl DivisorConservation {
    pub fn count_constant(&self) -> bool {
        self.count_changes.is_empty()
    }

    pub fn within(&self, tol: f64) -> bool {
        self.count_constant() && self.max_drift < tol
    }
}

fn ribbon_at(phi: &MatrixPoly) -> Result<RibbonPoly> {
    extract_square_root(&spectral_data(phi)?)
}

fn p_distance(a: &RibbonPoly, b: &RibbonPoly) -> f64 {
    a.coefficients()
        .iter()
        .zip(b.coefficients())
        .map(|(x, y)| (x - y).max_norm())
        .fold(0.0, f64::max)
}

fn distance(a: &DivisorPoint, b: &DivisorPoint) -> f64 {
    (a.z - b.z).norm() + (a.lambda - b.lambda).norm()
}

/// Tracks the divisor along `traj`.
///
/// The divisor of the first sample is found by [`divisor_d`]; each later
/// sample re-converges the previous points by Newton's method, and every
/// `scan_stride` samples a full scan checks that no point has appeared or
/// disappeared.
pub fn divisor_conservation(
    traj: &Trajectory,
    grid: usize,
    tau_rank: f64,
    scan_stride: usize,
) -> Result<DivisorConservation> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    if scan_stride == 0 {
        return Err(Error::Input("scan stride must be positive".into()));
    }
    let phi0 = traj.first().higgs_field();
    let p0 = ribbon_at(&phi0)?;
    let initial = divisor_d(&phi0, &p0, grid, tau_rank)?;

    let mut current = initial.clone();
    let mut max_drift: f64 = 0.0;
    let mut at_time = traj.first().t();
    let mut count_changes = Vec::new();
    let mut p_drift: f64 = 0.0;
    let mut scans = 1;
    let last = traj.len() - 1;

    for (i, s) in traj.samples().iter().enumerate().skip(1) {
        let phi = s.higgs_field();
        let p = ribbon_at(&phi)?;
        p_drift = p_drift.max(p_distance(&p, &p0));

        let mut next = Vec::with_capacity(current.len());
        let mut lost = false;
        for pt in &current {
            match track(&phi, &p, pt, tau_rank)? {
                Some(q) => next.push(q),
                None => lost = true,
            }
        }
        if lost {
            count_changes.push(s.t());
            // Fall back to a fresh scan so later samples stay comparable.
            next = divisor_d(&phi, &p, grid, tau_rank)?;
            scans += 1;
        } else if i % scan_stride == 0 || i == last {
            let scan = divisor_d(&phi, &p, grid, tau_rank)?;
            scans += 1;
            if scan.len() != next.len() {
                count_changes.push(s.t());
            }
        }
        if next.len() == initial.len() {
            for (a, b) in next.iter().zip(&initial) {
                let d = distance(a, b);
                if d > max_drift {
                    max_drift = d;
                    at_time = s.t();
                }
            }
        }
        current = next;
    }

    Ok(DivisorConservation {
        initial,
        final_points: current,
        max_drift,
        at_time,
        count_changes,
        p_drift,
        samples: traj.len(),
        scans,
    })
}

/// Pointwise eigenspace dimensions along a trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct MultiplicityProfile {
    pub radius: f64,
    pub nodes: usize,
    pub checks: usize,
    /// `(t, z, λ, initial, found)` for every disagreement.
    pub changes: Vec<(f64, Complex, Complex, usize, usize)>,
}

impl MultiplicityProfile {
    pub fn constant(&self) -> bool {
        self.changes.is_empty()
    }
}

/// Picks a circle radius whose nodes keep away from the divisor and from
/// coincident roots of `p(·, z)`.
fn sampling_circle(
    p: &RibbonPoly,
    avoid: &[DivisorPoint],
    nodes: usize,
) -> Result<(f64, Vec<Complex>)> {
    const CANDIDATES: [f64; 8] = [1.5, 1.37, 1.63, 1.25, 1.75, 1.12, 1.88, 1.0];
    let mut best: Option<(f64, f64, Vec<Complex>)> = None;
    for r in CANDIDATES {
        let zs: Vec<Complex> = (0..nodes)
            .map(|j| {
                Complex::from_polar(
                    r,
                    2.0 * std::f64::consts::PI * (j as f64 + 0.21) / nodes as f64,
                )
            })
            .collect();
        let mut margin = f64::INFINITY;
        for &z in &zs {
            for d in avoid {
                margin = margin.min((z - d.z).norm());
            }
            let roots = poly_roots(&p.in_w(z))?;
            for (i, a) in roots.iter().enumerate() {
                for b in &roots[i + 1..] {
                    margin = margin.min((a - b).norm());
                }
            }
        }
        if margin > 0.05 {
            return Ok((r, zs));
        }
        if best.as_ref().map_or(true, |b| margin > b.1) {
            best = Some((r, margin, zs));
        }
    }
    let (r, _, zs) = best.expect("candidate list is non-empty");
    Ok((r, zs))
}

/// Compares `eigen_multiplicity(φ(t)(z), λ)` with its value at the first
/// sample for `nodes` points `z` on a circle and every root `λ` of
/// `p(·, z)`, with `p` taken from the first sample.
pub fn multiplicity_conservation(
    traj: &Trajectory,
    nodes: usize,
    tau_rank: f64,
) -> Result<MultiplicityProfile> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let phi0 = traj.first().higgs_field();
    let p0 = ribbon_at(&phi0)?;
    let avoid = match divisor_d(&phi0, &p0, super::DEFAULT_GRID, tau_rank) {
        Ok(d) => d,
        Err(Error::ShapeViolation(_)) => Vec::new(),
        Err(e) => return Err(e),
    };
    let (radius, zs) = sampling_circle(&p0, &avoid, nodes)?;
    let mut targets = Vec::new();
    for &z in &zs {
        for lambda in poly_roots(&p0.in_w(z))? {
            let m =
                eigen_multiplicity_scaled(&phi0.eval(z), lambda, tau_rank, field_scale(&phi0, z))?;
            targets.push((z, lambda, m));
        }
    }
    let mut changes = Vec::new();
    let mut checks = 0;
    for s in traj.samples().iter().skip(1) {
        let phi = s.higgs_field();
        for &(z, lambda, m0) in &targets {
            let m =
                eigen_multiplicity_scaled(&phi.eval(z), lambda, tau_rank, field_scale(&phi, z))?;
            checks += 1;
            if m != m0 {
                changes.push((s.t(), z, lambda, m0, m));
            }
        }
    }
    Ok(MultiplicityProfile {
        radius,
        nodes,
        checks,
        changes,
    })
}
