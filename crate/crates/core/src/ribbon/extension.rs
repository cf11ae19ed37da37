//! Seeded rank-4 fields whose characteristic polynomial is `(w² - q)²`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{poly_roots, Complex, Matrix, MatrixPoly, Poly};

/// Extension degree of [`block_extension`].
pub const BLOCK_EXTENSION_D: i64 = 0;

/// Extension degree of [`tensor_extension`].
pub const TENSOR_EXTENSION_D: i64 = 2;

fn draw(rng: &mut ChaCha8Rng) -> Complex {
    Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_quadratic(rng: &mut ChaCha8Rng) -> Poly {
    Poly::new((0..3).map(|_| draw(rng)).collect())
}

/// `A = [[α, β], [γ, -α]]` with quadratic entries, so `A² = q·I` for
/// `q = α² + βγ`.
fn traceless_block(rng: &mut ChaCha8Rng) -> [Poly; 3] {
    [
        random_quadratic(rng),
        random_quadratic(rng),
        random_quadratic(rng),
    ]
}

fn block_matrix(abc: &[Poly; 3], k: usize) -> Matrix {
    let [a, b, c] = abc;
    Matrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => a.coeff(k),
        (0, 1) => b.coeff(k),
        (1, 0) => c.coeff(k),
        _ => -a.coeff(k),
    })
}

fn kron(x: &Matrix, y: &Matrix) -> Matrix {
    let (n, m) = (x.n(), y.n());
    Matrix::from_fn(n * m, |r, s| x[(r / m, s / m)] * y[(r % m, s % m)])
}

fn normalized(coeffs: Vec<Matrix>) -> MatrixPoly {
    let phi = MatrixPoly::new(coeffs).expect("coefficients share one dimension");
    let s = phi.max_norm();
    phi.scale(Complex::new(1.0 / s, 0.0))
}

/// `[[A, Ψ], [0, g A g⁻¹]]` with a constant invertible `g` and a quadratic
/// off-diagonal block `Ψ`, scaled to unit max-norm.
///
/// The first two coordinates span an invariant trivial subbundle, so the
/// extension degree is `0` and the divisor has degree `8`.
pub fn block_extension(seed: u64) -> MatrixPoly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let abc = traceless_block(&mut rng);
    let g = loop {
        let g = Matrix::from_fn(2, |_, _| draw(&mut rng));
        if g.determinant().norm() > 0.2 {
            break g;
        }
    };
    let g_inv = g.inverse().expect("determinant bounded away from zero");
    let psi: Vec<Matrix> = (0..3)
        .map(|_| Matrix::from_fn(2, |_, _| draw(&mut rng)))
        .collect();
    let coeffs = (0..3)
        .map(|k| {
            let a = block_matrix(&abc, k);
            let b = a.conjugate_by(&g, &g_inv);
            Matrix::from_fn(4, |i, j| match (i < 2, j < 2) {
                (true, true) => a[(i, j)],
                (true, false) => psi[k][(i, j - 2)],
                (false, false) => b[(i - 2, j - 2)],
                (false, true) => Complex::new(0.0, 0.0),
            })
        })
        .collect();
    normalized(coeffs)
}

/// `A ⊗ I + I ⊗ X + A ⊗ h` with `X = [[0, x₁₂], [x₂₁, 0]]` and
/// `x₁₂ x₂₁ = -q`, scaled to unit max-norm.
///
/// The nilpotent part `I ⊗ X + A ⊗ h` on each eigenspace of `A` has a
/// kernel subbundle of degree `-2`, and the divisor sits at the four
/// branch points of `w² = q`.
pub fn tensor_extension(seed: u64) -> MatrixPoly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let abc = traceless_block(&mut rng);
    let [a, b, c] = &abc;
    let q = &(a * a) + &(b * c);
    let mut r = poly_roots(&q).expect("q is a nonzero quartic");
    r.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    let lead = q.coeff(4);
    let x12 = Poly::from_roots(&r[0..2]);
    let x21 = Poly::from_roots(&r[2..4]).scale(-lead);
    let id = Matrix::identity(2);
    let h = Matrix::from_real(2, &[1.0, 0.0, 0.0, -1.0]);
    let coeffs = (0..3)
        .map(|k| {
            let ak = block_matrix(&abc, k);
            let xk = Matrix::from_fn(2, |i, j| match (i, j) {
                (0, 1) => x12.coeff(k),
                (1, 0) => x21.coeff(k),
                _ => Complex::new(0.0, 0.0),
            });
            &(&kron(&ak, &id) + &kron(&id, &xk)) + &kron(&ak, &h)
        })
        .collect();
    normalized(coeffs)
}
