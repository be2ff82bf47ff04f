//! Exact nonequilibrium steady states of boundary-driven XXZ brickwork
//! circuits.
//!
//! The circuit acts on `N` (odd) interior qubits. Each period applies XXZ
//! gates on the even bonds and a channel on the last qubit, then a reset
//! channel on the first qubit and gates on the odd bonds. The right channel
//! is either a second reset or a fixed single-qubit unitary.
//!
//! The steady state is built in closed form as a matrix product over an
//! infinite two-replica auxiliary space with site-dependent Lax operators
//! ([`mpa`]). A brute-force dense evolution ([`dense`]) serves as an
//! independent reference for small chains, and [`verify`] certifies the
//! algebraic identities the construction rests on. [`helix`] covers the
//! separable helix states that appear at special boundary conditions.
//!
//! ```
//! use xxz_ness::{CircuitParams, Drive, Parity, assemble_density};
//! use xxz_ness::linalg::c;
//!
//! let params = CircuitParams::easy_plane(
//!     3, 0.4, 0.9, Drive::TwoReset { z: c(1.0, 0.0), w: c(0.5, 0.2) },
//! )?;
//! let rho = assemble_density(&params, Parity::Cycle)?;
//! assert!((rho.trace().re - 1.0).abs() < 1e-12);
//! assert!(rho.min_eigenvalue() > -1e-10);
//! # Ok::<(), xxz_ness::NessError>(())
//! ```

pub mod dense;
pub mod error;
pub mod gates;
pub mod helix;
pub mod linalg;
pub mod mpa;
pub mod params;
pub mod verify;

pub use dense::{full_cycle, local_expectation, power_iterate_ness, DenseOperator, PowerIteration};
pub use error::{NessError, Result};
pub use gates::{
    build_boundary_spinor, build_euler_unitary, build_gate, build_kraus, BoundaryChannel, CircuitChannels, Gate1Q,
    Gate2Q, KrausPair, Side, Spinor,
};
pub use helix::{helix_condition, helix_state, indicators, scan_anisotropy, Helicity, HelixSpec, ScanRow, ScanTable};
pub use mpa::{assemble_density, contract_expectation, left_vector, right_vector, BoundaryVec, Parity};
pub use params::{classify_regime, stereo_from_angles, CircuitParams, Drive, Regime};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/circuit.md")]
    mod circuit {}
    #[doc = include_str!("../../../book/src/ansatz.md")]
    mod ansatz {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/helices.md")]
    mod helices {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
