use super::{Complex, Poly};
use crate::error::{Error, Result};

const MAX_ITER: usize = 500;

/// All complex roots of `p`, repeated according to multiplicity.
///
/// Simultaneous Aberth–Ehrlich iteration followed by guarded Newton
/// polishing. Trailing coefficients below [`super::TAU_POLY`] are dropped
/// first; a nonzero constant has no roots.
pub fn poly_roots(p: &Poly) -> Result<Vec<Complex>> {
    let p = p.normalized();
    let degree = p.degree().ok_or(Error::ZeroPolynomial)?;
    if degree == 0 {
        return Ok(Vec::new());
    }
    // Work with the monic polynomial.
    let lead = p.coeff(degree);
    let monic = p.scale(lead.inv());
    let dp = monic.derivative();

    // Roots at the origin are split off exactly.
    let zeros_at_origin = monic
        .coeffs()
        .iter()
        .take_while(|c| c.norm() == 0.0)
        .count();
    let reduced = Poly::new(monic.coeffs()[zeros_at_origin..].to_vec());
    let mut roots = vec![Complex::new(0.0, 0.0); zeros_at_origin];
    let rd = degree - zeros_at_origin;
    if rd > 0 {
        let rdp = reduced.derivative();
        let mut z = initial_guesses(&reduced, rd);
        aberth(&reduced, &rdp, &mut z);
        roots.extend(z);
    }
    for r in roots.iter_mut() {
        polish(&monic, &dp, r);
    }
    Ok(roots)
}

fn initial_guesses(p: &Poly, degree: usize) -> Vec<Complex> {
    // Geometric mean of root moduli from |a_0|, spread on a circle with an
    // irrational angular offset so no guess sits on a symmetry axis.
    let a0 = p.coeff(0).norm();
    let bound = 1.0 + (0..degree).map(|k| p.coeff(k).norm()).fold(0.0, f64::max);
    let radius = if a0 > 0.0 {
        a0.powf(1.0 / degree as f64).min(bound)
    } else {
        1.0
    };
    (0..degree)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / degree as f64 + 0.4;
            Complex::from_polar(radius, theta)
        })
        .collect()
}

fn aberth(p: &Poly, dp: &Poly, z: &mut [Complex]) {
    let n = z.len();
    for _ in 0..MAX_ITER {
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            let pk = p.eval(z[k]);
            if pk.norm() == 0.0 {
                continue;
            }
            let ratio = pk / dp.eval(z[k]);
            let repulsion: Complex = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d.norm() == 0.0 {
                        Complex::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex::new(1.0, 0.0) - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step < 4.0 * f64::EPSILON {
            break;
        }
    }
}

fn polish(p: &Poly, dp: &Poly, z: &mut Complex) {
    let mut best = p.eval(*z).norm();
    for _ in 0..4 {
        let d = dp.eval(*z);
        if d.norm() == 0.0 || best == 0.0 {
            return;
        }
        let cand = *z - p.eval(*z) / d;
        let val = p.eval(cand).norm();
        if val < best && cand.re.is_finite() && cand.im.is_finite() {
            *z = cand;
            best = val;
        } else {
            return;
        }
    }
}

/// A group of numerically coincident roots.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootCluster {
    pub center: Complex,
    pub multiplicity: usize,
}

/// Group roots closer than `tol * (1 + |r|)` (single linkage) and replace
/// each group by its centroid, which is far more accurate than the
/// individual members for a multiple root.
pub fn cluster_roots(roots: &[Complex], tol: f64) -> Vec<RootCluster> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (roots[i] - roots[j]).norm() <= tol * (1.0 + roots[i].norm()) {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[b] = a;
                }
            }
        }
    }
    let mut clusters: Vec<(usize, Complex, usize)> = Vec::new();
    for i in 0..n {
        let root = find(&mut label, i);
        match clusters.iter_mut().find(|c| c.0 == root) {
            Some(c) => {
                c.1 += roots[i];
                c.2 += 1;
            }
            None => clusters.push((root, roots[i], 1)),
        }
    }
    clusters
        .into_iter()
        .map(|(_, sum, m)| RootCluster {
            center: sum / m as f64,
            multiplicity: m,
        })
        .collect()
}

/// Roots of `p` grouped by [`cluster_roots`], with each multiple root's
/// centre polished by Newton on `p^(m-1)`, where it is a simple root.
pub fn poly_root_clusters(p: &Poly, tol: f64) -> Result<Vec<RootCluster>> {
    let p = p.normalized();
    let mut clusters = cluster_roots(&poly_roots(&p)?, tol);
    for cl in clusters.iter_mut().filter(|k| k.multiplicity > 1) {
        let mut d = p.clone();
        for _ in 1..cl.multiplicity {
            d = d.derivative();
        }
        let dd = d.derivative();
        let start = cl.center;
        let mut z = start;
        for _ in 0..8 {
            let slope = dd.eval(z);
            if slope.norm() == 0.0 {
                break;
            }
            let cand = z - d.eval(z) / slope;
            if !(cand.re.is_finite() && cand.im.is_finite())
                || d.eval(cand).norm() >= d.eval(z).norm()
            {
                break;
            }
            z = cand;
        }
        // Only accept a refinement that stays inside the cluster.
        if (z - start).norm() <= tol * (1.0 + start.norm()) {
            cl.center = z;
        }
    }
    Ok(clusters)
}
