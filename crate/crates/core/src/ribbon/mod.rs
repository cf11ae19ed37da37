//! The spectral ribbon: square roots of the characteristic data, the sheaf
//! case split and the jump divisor.

mod conservation;
mod divisor;
mod extension;
mod kernel;
mod square_root;

pub use conservation::{
    divisor_conservation, multiplicity_conservation, DivisorConservation, MultiplicityProfile,
    DEFAULT_SCAN_STRIDE,
};
pub use divisor::{
    degree_consistency, divisor_d, divisor_degree, DegreeCheck, DivisorPoint, DEFAULT_GRID, RADII,
};
pub use extension::{block_extension, tensor_extension, BLOCK_EXTENSION_D, TENSOR_EXTENSION_D};
pub use kernel::kernel_line_degree;
pub use square_root::{case_split, extract_square_root, RibbonPoly, SheafCase};
