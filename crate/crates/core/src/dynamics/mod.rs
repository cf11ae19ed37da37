//! Right-hand sides and a fixed-step integrator for the flow variants.

mod integrate;
mod rhs;
mod state;

pub use integrate::{flow_to, integrate, Trajectory, BLOW_UP_GUARD};
pub use rhs::{
    from_phi, rhs, rhs_asymmetric, rhs_parabolic, rhs_symmetric, rhs_t_form, to_phi, vector_field,
};
pub use state::{FlowForm, NahmState, SHAPE_TOL};
