//! Fixed points of the flow: commuting quadruples, the pair `φ±`, the lifted
//! curve `C` in affine 3-space and the rank-2 family with its image
//! singularities.

mod family;
mod support;
mod witness;

pub use family::{classify_image, collision_fibre, rank2_family, ImageClass, Rank2Family};
pub use support::{
    c_action, orbit_parameter, support_check, support_determinant, support_points, LiftedPoint,
    SupportPoint, COMMUTE_TOL,
};
pub use witness::{
    commutation_defect, fixed_defects_phi, fixed_residual_phi, phi_pm, quadruple_defects,
    quadruple_residual, sample_points, solve_psi, FixedPointWitness, TAU_FIX,
};
