//! Inhomogeneous matrix product ansatz for the steady state.

pub mod boundary;
pub mod contract;
pub mod lax;

pub use boundary::{
    b_coefficient, g_coefficient, left_vector, right_vector, right_vector_hybrid, right_vector_reset, BoundaryVec,
};
pub use contract::{
    assemble_density, assemble_density_inflated, contract_dense, contract_expectation, contract_expectation_with,
    contraction_condition, Parity, TransferMatrix, LEFT_AUX_DIM,
};
pub use lax::{build_double_lax, build_lax, site_matrix_a, DoubleLax, LaxKind, Sign, SiteLax};
