//! Numerical certificates for the exchange relations, the boundary
//! equations and the fixed-point property of the ansatz.
//!
//! Every residual is a max-norm, reported relative to the max-norm of the
//! left-hand operand so that values are comparable across regimes.

use std::fmt;
use std::ops::Range;

use nalgebra::Matrix4;

use crate::dense::{even_half, odd_half, power_iterate_ness, MAX_DENSE_SITES};
use crate::error::{NessError, Result};
use crate::gates::{BoundaryChannel, CircuitChannels, Gate2Q};
use crate::linalg::{max_abs, Mat2, C64, ZERO};
use crate::mpa::boundary::{left_vector, right_vector, BoundaryVec};
use crate::mpa::contract::{assemble_density, Parity, LEFT_AUX_DIM};
use crate::mpa::lax::{build_double_lax, build_lax_raw, DoubleLax, LaxKind, Sign, SiteLax};
use crate::params::CircuitParams;

/// Default auxiliary window for the exchange-relation checks.
pub const DEFAULT_WINDOW: Range<usize> = 0..5;

pub const RLL_THRESHOLD: f64 = 1e-12;
pub const LEFT_BOUNDARY_THRESHOLD: f64 = 1e-12;
pub const RIGHT_BOUNDARY_THRESHOLD: f64 = 1e-11;
pub const FIXED_POINT_THRESHOLD: f64 = 1e-10;
pub const ORACLE_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub name: String,
    pub residual: f64,
    /// Human-readable echo of the inputs.
    pub echo: String,
    pub window: Range<usize>,
}

impl fmt::Display for ResidualReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} residual={:.3e} window={}..{} [{}]",
            self.name, self.residual, self.window.start, self.window.end, self.echo
        )
    }
}

fn relative(diff: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

fn kron2(a: &Mat2, b: &Mat2) -> Matrix4<C64> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// `(A B)[j, k] = sum_m A[j, m] ⊗ B[m, k]` on two neighbouring sites.
fn two_site_product(a: &SiteLax, b: &SiteLax, j: usize, k: usize) -> Matrix4<C64> {
    let mut acc = Matrix4::zeros();
    for m in j..=k {
        if let (Some(x), Some(y)) = (a.block(j, m), b.block(m, k)) {
            acc += kron2(x, y);
        }
    }
    acc
}

/// `max |U A_n B_{n+1} - C_n D_{n+1} U|` over `j, k` in `window`, relative
/// to the largest entry of `U A B`.
pub fn exchange_residual(
    gate: &Gate2Q,
    a: &SiteLax,
    b: &SiteLax,
    c: &SiteLax,
    d: &SiteLax,
    window: Range<usize>,
) -> f64 {
    let u = gate.entries;
    let (mut diff, mut scale) = (0.0f64, 0.0f64);
    for j in window.clone() {
        for k in window.clone() {
            if k < j || k > j + 2 {
                continue;
            }
            let lhs = u * two_site_product(a, b, j, k);
            let rhs = two_site_product(c, d, j, k) * u;
            diff = diff.max(max_abs((lhs - rhs).iter()));
            scale = scale.max(max_abs(lhs.iter()));
        }
    }
    relative(diff, scale)
}

/// Residual of the single-replica exchange relations
/// `U L+_n L-_{n+1} = L-_n L+_{n+1} U` and its starred counterpart.
pub fn rll_residual(q: C64, lambda: C64, zeta: C64, n: i64, window: Range<usize>) -> Result<ResidualReport> {
    let gate = crate::gates::build_gate(q, lambda)?;
    let dim = window.end + 1;
    let lax = |kind, site| build_lax_raw(kind, site, q, lambda, zeta, dim);
    let plain = exchange_residual(
        &gate,
        &lax(LaxKind::Plus, n)?,
        &lax(LaxKind::Minus, n + 1)?,
        &lax(LaxKind::Minus, n)?,
        &lax(LaxKind::Plus, n + 1)?,
        window.clone(),
    );
    let starred = exchange_residual(
        &gate,
        &lax(LaxKind::PlusStar, n)?,
        &lax(LaxKind::MinusStar, n + 1)?,
        &lax(LaxKind::MinusStar, n)?,
        &lax(LaxKind::PlusStar, n + 1)?,
        window.clone(),
    );
    Ok(ResidualReport {
        name: "rll".into(),
        residual: plain.max(starred),
        echo: format!("q={q:.6} lambda={lambda:.6} zeta={zeta:.6} n={n}"),
        window,
    })
}

fn double_product(a: &DoubleLax, b: &DoubleLax, j: (usize, usize), k: (usize, usize)) -> Matrix4<C64> {
    let mut acc = Matrix4::zeros();
    for m in j.0..=k.0 {
        for mp in j.1..=k.1 {
            let x = a.block(j.0, j.1, m, mp);
            let y = b.block(m, mp, k.0, k.1);
            acc += kron2(&x, &y);
        }
    }
    acc
}

/// `max |U A_n B_{n+1} U† - C_n D_{n+1}|` over auxiliary pairs in `window`.
pub fn double_exchange_residual(
    gate: &Gate2Q,
    a: &DoubleLax,
    b: &DoubleLax,
    c: &DoubleLax,
    d: &DoubleLax,
    window: Range<usize>,
) -> f64 {
    let u = gate.entries;
    let ud = u.adjoint();
    let (mut diff, mut scale) = (0.0f64, 0.0f64);
    for j in window.clone() {
        for jp in window.clone() {
            for k in j..(j + 3).min(window.end) {
                for kp in jp..(jp + 3).min(window.end) {
                    let lhs = u * double_product(a, b, (j, jp), (k, kp)) * ud;
                    let rhs = double_product(c, d, (j, jp), (k, kp));
                    diff = diff.max(max_abs((lhs - rhs).iter()));
                    scale = scale.max(max_abs(lhs.iter()));
                }
            }
        }
    }
    relative(diff, scale)
}

/// Residual of `U LL+_n LL-_{n+1} U† = LL-_n LL+_{n+1}`.
pub fn double_rll_residual(params: &CircuitParams, n: i64, window: Range<usize>) -> Result<ResidualReport> {
    let gate = crate::gates::build_gate(params.q(), params.lambda())?;
    let dim = window.end + 1;
    let dl = |sign, site| build_double_lax(sign, site, params, dim);
    let residual = double_exchange_residual(
        &gate,
        &dl(Sign::Plus, n)?,
        &dl(Sign::Minus, n + 1)?,
        &dl(Sign::Minus, n)?,
        &dl(Sign::Plus, n + 1)?,
        window.clone(),
    );
    Ok(ResidualReport {
        name: "double_rll".into(),
        residual,
        echo: format!("{params:?} n={n}"),
        window,
    })
}

/// Apply a boundary channel blockwise to a double Lax operator, in the same
/// convention the dense evolution uses.
fn channel_on_blocks(op: &DoubleLax, channel: &BoundaryChannel) -> DoubleLax {
    let mut out = op.clone();
    for row in out.blocks.iter_mut() {
        for blocks in row.iter_mut() {
            for m in blocks.iter_mut() {
                *m = channel.apply(m);
            }
        }
    }
    out
}

/// Left boundary residual for explicit inputs:
/// `<L| (LL+_1 - sum K† LL-_1 K)` relative to `<L| LL+_1`.
pub fn left_boundary_residual_with(
    params: &CircuitParams,
    left: &BoundaryVec,
    channels: &CircuitChannels,
) -> Result<f64> {
    let dim = LEFT_AUX_DIM + 1;
    let plus = build_double_lax(Sign::Plus, 1, params, dim)?;
    let minus = build_double_lax(Sign::Minus, 1, params, dim)?;
    let mapped = channel_on_blocks(&minus, &BoundaryChannel::Reset(channels.left));
    let (mut diff, mut scale) = (0.0f64, 0.0f64);
    for k in 0..dim {
        for kp in 0..dim {
            let mut lhs = Mat2::zeros();
            let mut rhs = Mat2::zeros();
            for j in 0..left.dim() {
                for jp in 0..left.dim() {
                    let l = left.coeff(j, jp);
                    if l == ZERO {
                        continue;
                    }
                    lhs += plus.block(j, jp, k, kp) * l;
                    rhs += mapped.block(j, jp, k, kp) * l;
                }
            }
            diff = diff.max(max_abs((lhs - rhs).iter()));
            scale = scale.max(max_abs(lhs.iter()));
        }
    }
    Ok(relative(diff, scale))
}

pub fn left_boundary_residual(params: &CircuitParams) -> Result<ResidualReport> {
    let channels = CircuitChannels::new(params)?;
    let left = left_vector(params);
    Ok(ResidualReport {
        name: "left_boundary".into(),
        residual: left_boundary_residual_with(params, &left, &channels)?,
        echo: format!("{params:?}"),
        window: 0..LEFT_AUX_DIM,
    })
}

/// Right boundary residual for explicit inputs:
/// `(LL-_N - C(LL+_N)) |R>` relative to `LL-_N |R>`, where `C` is the right
/// channel. Rows range over the auxiliary states reachable from the left
/// boundary after `N - 1` sites.
pub fn right_boundary_residual_with(
    params: &CircuitParams,
    right: &BoundaryVec,
    channels: &CircuitChannels,
) -> Result<f64> {
    let n = params.n_sites();
    let dim = right.dim().max(n + 2);
    let minus = build_double_lax(Sign::Minus, n as i64, params, dim)?;
    let plus = build_double_lax(Sign::Plus, n as i64, params, dim)?;
    let mapped = channel_on_blocks(&plus, &channels.right);
    let rows = LEFT_AUX_DIM + n - 1;
    let (mut diff, mut scale) = (0.0f64, 0.0f64);
    for j in 0..rows {
        for jp in 0..rows {
            let mut lhs = Mat2::zeros();
            let mut rhs = Mat2::zeros();
            for k in j..(j + 2).min(dim) {
                for kp in jp..(jp + 2).min(dim) {
                    let r = right.coeff(k, kp);
                    if r == ZERO {
                        continue;
                    }
                    lhs += minus.block(j, jp, k, kp) * r;
                    rhs += mapped.block(j, jp, k, kp) * r;
                }
            }
            diff = diff.max(max_abs((lhs - rhs).iter()));
            scale = scale.max(max_abs(lhs.iter()));
        }
    }
    Ok(relative(diff, scale))
}

pub fn right_boundary_residual(params: &CircuitParams) -> Result<ResidualReport> {
    let channels = CircuitChannels::new(params)?;
    let right = right_vector(params)?;
    let rows = LEFT_AUX_DIM + params.n_sites() - 1;
    Ok(ResidualReport {
        name: "right_boundary".into(),
        residual: right_boundary_residual_with(params, &right, &channels)?,
        echo: format!("{params:?}"),
        window: 0..rows,
    })
}

/// Max Frobenius residual of `M_e(rho) = rho'` and `M_o(rho') = rho` for the
/// assembled, trace-normalized pair.
pub fn fixed_point_residual(params: &CircuitParams) -> Result<ResidualReport> {
    let n = params.n_sites();
    if n > MAX_DENSE_SITES {
        return Err(NessError::MemoryGuard {
            n_sites: n,
            limit: MAX_DENSE_SITES,
        });
    }
    let channels = CircuitChannels::new(params)?;
    let rho = assemble_density(params, Parity::Cycle)?;
    let rho_half = assemble_density(params, Parity::HalfCycle)?;
    let even = even_half(&rho, &channels)?.normalized()?;
    let odd = odd_half(&rho_half, &channels)?.normalized()?;
    let residual = even.frobenius_distance(&rho_half).max(odd.frobenius_distance(&rho));
    Ok(ResidualReport {
        name: "fixed_point".into(),
        residual,
        echo: format!("{params:?}"),
        window: 0..LEFT_AUX_DIM + n,
    })
}

/// Frobenius distance between the assembled state and dense power iteration.
pub fn oracle_agreement(params: &CircuitParams, tol: f64, max_iter: usize) -> Result<ResidualReport> {
    let oracle = power_iterate_ness(params, tol, max_iter)?;
    let rho = assemble_density(params, Parity::Cycle)?;
    Ok(ResidualReport {
        name: "oracle_agreement".into(),
        residual: rho.frobenius_distance(&oracle.rho),
        echo: format!("{params:?} iterations={}", oracle.iterations),
        window: 0..LEFT_AUX_DIM + params.n_sites(),
    })
}

/// One entry of a verification run.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub report: ResidualReport,
    pub threshold: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.report.residual.is_finite() && self.report.residual < self.threshold
    }
}

/// Every identity that applies to `params`. The dense fixed-point check is
/// included when the chain fits the dense memory guard.
pub fn run_suite(params: &CircuitParams, window: Range<usize>) -> Result<Vec<Check>> {
    let (q, lambda, z) = (params.q(), params.lambda(), params.z());
    let mut checks = Vec::new();
    let mut worst_rll: Option<ResidualReport> = None;
    let mut worst_double: Option<ResidualReport> = None;
    for n in 1..params.n_sites().max(2) as i64 {
        let r = rll_residual(q, lambda, z, n, window.clone())?;
        if worst_rll.as_ref().is_none_or(|w| r.residual > w.residual) {
            worst_rll = Some(r);
        }
        let d = double_rll_residual(params, n, window.clone())?;
        if worst_double.as_ref().is_none_or(|w| d.residual > w.residual) {
            worst_double = Some(d);
        }
    }
    for report in [worst_rll, worst_double].into_iter().flatten() {
        checks.push(Check {
            report,
            threshold: RLL_THRESHOLD,
        });
    }
    checks.push(Check {
        report: left_boundary_residual(params)?,
        threshold: LEFT_BOUNDARY_THRESHOLD,
    });
    checks.push(Check {
        report: right_boundary_residual(params)?,
        threshold: RIGHT_BOUNDARY_THRESHOLD,
    });
    if params.n_sites() <= MAX_DENSE_SITES {
        checks.push(Check {
            report: fixed_point_residual(params)?,
            threshold: FIXED_POINT_THRESHOLD,
        });
    }
    Ok(checks)
}
