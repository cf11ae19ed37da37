use super::Complex;

/// Rectangular complex matrix, row-major. Used for the least-squares
/// systems that do not fit the square [`super::Matrix`] type.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<Complex> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn conj_transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).conj());
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[Complex]) -> Vec<Complex> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }
}

/// Thin singular value decomposition `A = U Σ V^H`, singular values sorted
/// in decreasing order. `u` is rows×k, `v` is cols×k with k = min(rows, cols).
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: DenseMatrix,
    pub s: Vec<f64>,
    pub v: DenseMatrix,
}

const MAX_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd(a: &DenseMatrix) -> Svd {
    if a.rows < a.cols {
        let t = svd(&a.conj_transpose());
        return Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        };
    }
    let (m, n) = (a.rows, a.cols);
    // Work column-major: cols[j] is column j of A V.
    let mut cols: Vec<Vec<Complex>> = (0..n).map(|j| a.column(j)).collect();
    let mut vcols: Vec<Vec<Complex>> = (0..n)
        .map(|j| {
            let mut e = vec![Complex::new(0.0, 0.0); n];
            e[j] = Complex::new(1.0, 0.0);
            e
        })
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex = cols[p]
                    .iter()
                    .zip(&cols[q])
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate(&mut cols, p, q, cs, sn, phase);
                rotate(&mut vcols, p, q, cs, sn, phase);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(usize, f64)> = cols
        .iter()
        .enumerate()
        .map(|(j, c)| (j, c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()))
        .collect();
    order.sort_by(|x, y| y.1.total_cmp(&x.1));

    let mut u = DenseMatrix::zeros(m, n);
    let mut v = DenseMatrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, &(j, sigma)) in order.iter().enumerate() {
        s.push(sigma);
        for i in 0..m {
            let val = if sigma > 0.0 {
                cols[j][i] / sigma
            } else {
                Complex::new(0.0, 0.0)
            };
            u.set(i, k, val);
        }
        for i in 0..n {
            v.set(i, k, vcols[j][i]);
        }
    }
    Svd { u, s, v }
}

fn rotate(cols: &mut [Vec<Complex>], p: usize, q: usize, cs: f64, sn: f64, phase: Complex) {
    let conj_phase = phase.conj();
    let (left, right) = cols.split_at_mut(q);
    let cp = &mut left[p];
    let cq = &mut right[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let ap = *x;
        let aq = *y * conj_phase;
        *x = ap * cs - aq * sn;
        *y = (ap * sn + aq * cs) * phase;
    }
}

/// Singular values in decreasing order.
pub fn singular_values(a: &DenseMatrix) -> Vec<f64> {
    svd(a).s
}

/// Minimum-norm least-squares solution of `A x ≈ b`, discarding singular
/// values below `rcond * σ_max`.
pub fn lstsq_min_norm(a: &DenseMatrix, b: &[Complex], rcond: f64) -> Vec<Complex> {
    assert_eq!(b.len(), a.rows);
    let d = svd(a);
    let smax = d.s.first().copied().unwrap_or(0.0);
    let mut x = vec![Complex::new(0.0, 0.0); a.cols];
    for (k, &sigma) in d.s.iter().enumerate() {
        if sigma <= rcond * smax || sigma == 0.0 {
            continue;
        }
        let coef: Complex = (0..a.rows)
            .map(|i| d.u.get(i, k).conj() * b[i])
            .sum::<Complex>()
            / sigma;
        for (j, xj) in x.iter_mut().enumerate() {
            *xj += d.v.get(j, k) * coef;
        }
    }
    x
}
