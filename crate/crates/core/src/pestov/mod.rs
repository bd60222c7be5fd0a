//! Discretized unit cosphere bundle of surface models and the energy
//! identities of the geodesic flow on it.

pub mod grid;
pub mod identity;
pub mod ops;

pub use grid::PhaseGrid;
pub use identity::{
    boundary_term, bump, compact_test_field, face_touching_test_field, fiber_identity_check,
    pestov_residual, pestov_residual_with, refinement_study, FiberIdentityReport, FiberRow, GridSpec,
    PestovReport,
};
pub use ops::{apply_h, apply_v, apply_x, inner, norm2, FlowDifferencer, PhaseField};
