//! Dense complex matrix and polynomial kernels.
//!
//! Everything here is sized for the small matrices of the flows
//! (`n <= 16`) and the low-degree polynomials of their spectral data.

mod dense;
mod matrix;
mod matrix_poly;
mod poly;
mod roots;

pub use dense::{lstsq_min_norm, singular_values, svd, DenseMatrix, Svd};
pub use matrix::{
    char_poly, commutator, eigen_multiplicity, eigen_multiplicity_scaled, Matrix, MAX_DIM,
};
pub use matrix_poly::MatrixPoly;
pub use poly::{Poly, TAU_POLY};
pub use roots::{cluster_roots, poly_root_clusters, poly_roots, RootCluster};

pub type Complex = num_complex::Complex64;

/// Default relative threshold for numerical rank decisions.
pub const TAU_RANK: f64 = 1e-8;

pub(crate) fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

pub(crate) fn is_finite(z: Complex) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `n` points on the unit circle, `exp(2πi j / n)`.
pub fn roots_of_unity(n: usize) -> Vec<Complex> {
    (0..n)
        .map(|j| Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / n as f64))
        .collect()
}
