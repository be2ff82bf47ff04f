use thiserror::Error;

/// Errors raised while building or contracting a steady state.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NessError {
    #[error("gate parameters (q={q_re}{q_im:+}i, lambda={l_re}{l_im:+}i) are neither easy-plane nor easy-axis")]
    NonUnitaryRegime { q_re: f64, q_im: f64, l_re: f64, l_im: f64 },
    #[error("parameters satisfy both easy-plane and easy-axis conditions; pass the regime explicitly")]
    AmbiguousRegime,
    #[error("declared regime {declared:?} does not match the gate parameters")]
    RegimeMismatch { declared: crate::Regime },
    #[error("degenerate denominator in {context} (|denominator| = {magnitude:e})")]
    DegenerateDenominator { context: &'static str, magnitude: f64 },
    #[error("stereographic coordinate is zero or not finite")]
    ZeroStereoCoord,
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("site index {index} out of range for {n_sites} sites")]
    IndexOutOfRange { index: usize, n_sites: usize },
    #[error("operator dimension {found} does not match {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dense evolution limited to {limit} sites, got {n_sites}")]
    MemoryGuard { n_sites: usize, limit: usize },
    #[error("power iteration did not converge in {max_iter} cycles (last residual {residual:e})")]
    NoConvergence { max_iter: usize, residual: f64 },
    #[error("pole in b coefficient at n={n} (|denominator| = {magnitude:e})")]
    PoleInB { n: i64, magnitude: f64 },
    #[error("pole in g coefficient at n={n} (|denominator| = {magnitude:e})")]
    PoleInG { n: i64, magnitude: f64 },
    #[error("contraction normalization failed (|trace| = {magnitude:e})")]
    NormalizationFailure { magnitude: f64 },
    #[error("argument of a vanishing expectation value is undefined")]
    UndefinedArg,
    #[error("operation requires {expected}")]
    WrongDrive { expected: &'static str },
}

pub type Result<T, E = NessError> = std::result::Result<T, E>;
