//! Brute-force reference evolution of the brickwork channel on the full
//! `2^N`-dimensional operator space.
//!
//! Site `1` is the most significant tensor factor, i.e. the operator on
//! qubits `1..=N` is laid out as `O_1 ⊗ O_2 ⊗ ... ⊗ O_N`. Intended for
//! validation only; everything here is limited to [`MAX_DENSE_SITES`].

use nalgebra::{DMatrix, DVector};

use crate::error::{NessError, Result};
use crate::gates::{BoundaryChannel, CircuitChannels, Gate2Q};
use crate::linalg::{hermitian_eigenvalues, hermiticity_defect, Mat2, C64, ZERO};
use crate::params::CircuitParams;

pub const MAX_DENSE_SITES: usize = 9;

/// A dense operator on `N` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    site_count: usize,
    entries: DMatrix<C64>,
}

impl DenseOperator {
    pub fn from_matrix(site_count: usize, entries: DMatrix<C64>) -> Result<Self> {
        let dim = 1usize << site_count;
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(NessError::DimensionMismatch {
                expected: dim,
                found: entries.nrows(),
            });
        }
        Ok(Self { site_count, entries })
    }

    pub fn maximally_mixed(site_count: usize) -> Self {
        let dim = 1usize << site_count;
        Self {
            site_count,
            entries: DMatrix::identity(dim, dim).scale(1.0 / dim as f64),
        }
    }

    /// `|psi><psi| / <psi|psi>`.
    pub fn from_pure(site_count: usize, psi: &DVector<C64>) -> Result<Self> {
        let m = psi * psi.adjoint();
        let norm = psi.norm_squared();
        Self::from_matrix(site_count, m.scale(1.0 / norm))
    }

    pub fn site_count(&self) -> usize {
        self.site_count
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<C64> {
        self.entries
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace();
        if t.norm() < 1e-250 {
            return Err(NessError::NormalizationFailure { magnitude: t.norm() });
        }
        Ok(Self {
            site_count: self.site_count,
            entries: self.entries.map(|x| x / t),
        })
    }

    /// `tr(rho^2)`, real part.
    pub fn purity(&self) -> f64 {
        self.entries
            .iter()
            .zip(self.entries.transpose().iter())
            .map(|(a, b)| (a * b).re)
            .sum()
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        (&self.entries - &other.entries).norm()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.entries)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// `<psi| rho |psi>` for a normalized `psi`.
    pub fn fidelity_with_pure(&self, psi: &DVector<C64>) -> f64 {
        (psi.adjoint() * &self.entries * psi)[(0, 0)].re / psi.norm_squared()
    }

    /// Single-site reduced density matrix.
    pub fn reduced_site(&self, site: usize) -> Result<Mat2> {
        check_site(site, self.site_count)?;
        let shift = self.site_count - site;
        let mut out = Mat2::zeros();
        for i in 0..self.dim() {
            if (i >> shift) & 1 == 1 {
                continue;
            }
            let j = i | (1 << shift);
            out[(0, 0)] += self.entries[(i, i)];
            out[(0, 1)] += self.entries[(i, j)];
            out[(1, 0)] += self.entries[(j, i)];
            out[(1, 1)] += self.entries[(j, j)];
        }
        Ok(out)
    }

    /// Conjugate the operator by `op` acting on `k` consecutive sites starting at `first`.
    fn conjugate_local(&mut self, op: &[C64], first: usize, k: usize) {
        let n = self.site_count;
        let d = 1usize << k;
        let shift = n - (first + k - 1);
        let dim = self.dim();
        let bases: Vec<usize> = (0..dim).filter(|i| (i >> shift) & (d - 1) == 0).collect();
        let mut idx = vec![0usize; d];
        let mut v = vec![ZERO; d];
        // rows: X = A rho
        for col in 0..dim {
            for &base in &bases {
                for (l, slot) in idx.iter_mut().enumerate() {
                    *slot = base | (l << shift);
                }
                for l in 0..d {
                    v[l] = self.entries[(idx[l], col)];
                }
                for l in 0..d {
                    let mut acc = ZERO;
                    for (lp, &x) in v.iter().enumerate() {
                        acc += op[l * d + lp] * x;
                    }
                    self.entries[(idx[l], col)] = acc;
                }
            }
        }
        // columns: X A†
        for row in 0..dim {
            for &base in &bases {
                for (l, slot) in idx.iter_mut().enumerate() {
                    *slot = base | (l << shift);
                }
                for l in 0..d {
                    v[l] = self.entries[(row, idx[l])];
                }
                for l in 0..d {
                    let mut acc = ZERO;
                    for (lp, &x) in v.iter().enumerate() {
                        acc += op[l * d + lp].conj() * x;
                    }
                    self.entries[(row, idx[l])] = acc;
                }
            }
        }
    }
}

fn check_site(site: usize, n: usize) -> Result<()> {
    if site == 0 || site > n {
        return Err(NessError::IndexOutOfRange {
            index: site,
            n_sites: n,
        });
    }
    Ok(())
}

fn row_major2(m: &Mat2) -> [C64; 4] {
    [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]
}

/// `rho -> U rho U†` with `U` on sites `(left_site, left_site + 1)`.
pub fn apply_two_site_gate(state: &DenseOperator, gate: &Gate2Q, left_site: usize) -> Result<DenseOperator> {
    if left_site == 0 || left_site + 1 > state.site_count {
        return Err(NessError::IndexOutOfRange {
            index: left_site,
            n_sites: state.site_count,
        });
    }
    let mut op = [ZERO; 16];
    for r in 0..4 {
        for col in 0..4 {
            op[r * 4 + col] = gate.entries[(r, col)];
        }
    }
    let mut out = state.clone();
    out.conjugate_local(&op, left_site, 2);
    Ok(out)
}

/// Apply a reset (`sum K† rho K`) or unitary (`V rho V†`) channel on one site.
pub fn apply_boundary_channel(state: &DenseOperator, channel: &BoundaryChannel, site: usize) -> Result<DenseOperator> {
    check_site(site, state.site_count)?;
    match channel {
        BoundaryChannel::Unitary(v) => {
            let mut out = state.clone();
            out.conjugate_local(&row_major2(&v.entries), site, 1);
            Ok(out)
        }
        BoundaryChannel::Reset(k) => {
            let mut acc: Option<DMatrix<C64>> = None;
            for kraus in k.operators() {
                let mut term = state.clone();
                term.conjugate_local(&row_major2(&kraus.adjoint()), site, 1);
                acc = Some(match acc {
                    None => term.entries,
                    Some(a) => a + term.entries,
                });
            }
            Ok(DenseOperator {
                site_count: state.site_count,
                entries: acc.expect("two Kraus operators"),
            })
        }
    }
}

/// Even half-step: gates on `(1,2), (3,4), ..., (N-2, N-1)`, then the right channel on site `N`.
pub fn even_half(state: &DenseOperator, ch: &CircuitChannels) -> Result<DenseOperator> {
    let n = state.site_count;
    let mut rho = state.clone();
    for s in (1..n.saturating_sub(1)).step_by(2) {
        rho = apply_two_site_gate(&rho, &ch.gate, s)?;
    }
    apply_boundary_channel(&rho, &ch.right, n)
}

/// Odd half-step: left reset on site `1`, then gates on `(2,3), (4,5), ..., (N-1, N)`.
pub fn odd_half(state: &DenseOperator, ch: &CircuitChannels) -> Result<DenseOperator> {
    let n = state.site_count;
    let mut rho = apply_boundary_channel(state, &BoundaryChannel::Reset(ch.left), 1)?;
    for s in (2..n).step_by(2) {
        rho = apply_two_site_gate(&rho, &ch.gate, s)?;
    }
    Ok(rho)
}

pub fn full_cycle_with(state: &DenseOperator, ch: &CircuitChannels) -> Result<DenseOperator> {
    odd_half(&even_half(state, ch)?, ch)
}

/// One period of the brickwork channel, `M = M_o M_e`.
pub fn full_cycle(state: &DenseOperator, params: &CircuitParams) -> Result<DenseOperator> {
    if state.site_count != params.n_sites() {
        return Err(NessError::DimensionMismatch {
            expected: 1 << params.n_sites(),
            found: state.dim(),
        });
    }
    full_cycle_with(state, &CircuitChannels::new(params)?)
}

/// Converged fixed point of the brickwork channel.
#[derive(Debug, Clone)]
pub struct PowerIteration {
    /// `rho = M(rho)`, trace one.
    pub rho: DenseOperator,
    /// `rho' = M_e(rho)`, trace one.
    pub rho_half: DenseOperator,
    pub iterations: usize,
    /// Frobenius norm of the last cycle difference.
    pub residual: f64,
}

pub const DEFAULT_TOL: f64 = 1e-12;

pub fn default_max_iter(n_sites: usize) -> usize {
    200 * n_sites
}

/// Iterate the cycle from the maximally mixed state until successive
/// iterates differ by less than `tol` in Frobenius norm.
pub fn power_iterate_ness(params: &CircuitParams, tol: f64, max_iter: usize) -> Result<PowerIteration> {
    let n = params.n_sites();
    if n > MAX_DENSE_SITES {
        return Err(NessError::MemoryGuard {
            n_sites: n,
            limit: MAX_DENSE_SITES,
        });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(NessError::InvalidParams("tolerance must be positive".into()));
    }
    let ch = CircuitChannels::new(params)?;
    let mut rho = DenseOperator::maximally_mixed(n);
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let next = full_cycle_with(&rho, &ch)?;
        residual = next.frobenius_distance(&rho);
        rho = next;
        if residual < tol {
            let rho = rho.normalized()?;
            let rho_half = even_half(&rho, &ch)?.normalized()?;
            return Ok(PowerIteration {
                rho,
                rho_half,
                iterations: it,
                residual,
            });
        }
    }
    Err(NessError::NoConvergence { max_iter, residual })
}

/// `tr(obs_site rho)`.
pub fn local_expectation(state: &DenseOperator, obs: &Mat2, site: usize) -> Result<C64> {
    let reduced = state.reduced_site(site)?;
    Ok((obs * reduced).trace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{build_euler_unitary, build_gate, build_kraus, Gate1Q, Side};
    use crate::linalg::{c, cr, pauli_z, ONE};
    use crate::params::Drive;
    use nalgebra::Matrix4;

    #[test]
    fn purity_of_complex_pure_state() {
        let psi = DVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let rho = DenseOperator::from_pure(1, &psi).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-15);
        assert!((DenseOperator::maximally_mixed(2).purity() - 0.25).abs() < 1e-15);
    }

    fn product_state(spinors: &[(C64, C64)]) -> DVector<C64> {
        let mut psi = DVector::from_element(1, ONE);
        for &(a, b) in spinors {
            psi = psi.kronecker(&DVector::from_vec(vec![a, b]));
        }
        psi
    }

    fn pseudo_random_state(n: usize, seed: u64) -> DenseOperator {
        let dim = 1 << n;
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let x = DMatrix::from_fn(dim, dim, |_, _| c(next(), next()));
        let m = &x * x.adjoint();
        DenseOperator::from_matrix(n, m).unwrap().normalized().unwrap()
    }

    #[test]
    fn identity_gate_leaves_state() {
        let rho = pseudo_random_state(3, 1);
        let out = apply_two_site_gate(&rho, &Gate2Q::identity(), 2).unwrap();
        assert!(out.frobenius_distance(&rho) < 1e-15);
    }

    #[test]
    fn swap_exchanges_product_factors() {
        let mut swap = Matrix4::<C64>::zeros();
        swap[(0, 0)] = ONE;
        swap[(1, 2)] = ONE;
        swap[(2, 1)] = ONE;
        swap[(3, 3)] = ONE;
        let gate = Gate2Q { entries: swap };
        let a = (cr(0.6), c(0.0, 0.8));
        let b = (cr(1.0), cr(0.0));
        let rho = DenseOperator::from_pure(2, &product_state(&[a, b])).unwrap();
        let expected = DenseOperator::from_pure(2, &product_state(&[b, a])).unwrap();
        let out = apply_two_site_gate(&rho, &gate, 1).unwrap();
        assert!(out.frobenius_distance(&expected) < 1e-15);
    }

    #[test]
    fn gate_preserves_trace() {
        let rho = pseudo_random_state(4, 7);
        let gate = build_gate(C64::from_polar(1.0, 0.3), cr(1.4)).unwrap();
        let out = apply_two_site_gate(&rho, &gate, 3).unwrap();
        assert!((out.trace() - rho.trace()).norm() < 1e-13);
    }

    #[test]
    fn site_out_of_range() {
        let rho = DenseOperator::maximally_mixed(3);
        assert!(matches!(
            apply_two_site_gate(&rho, &Gate2Q::identity(), 3),
            Err(NessError::IndexOutOfRange { .. })
        ));
        let ch = BoundaryChannel::Unitary(Gate1Q::identity());
        assert!(apply_boundary_channel(&rho, &ch, 0).is_err());
        assert!(apply_boundary_channel(&rho, &ch, 4).is_err());
    }

    #[test]
    fn identity_channels_leave_state() {
        let rho = pseudo_random_state(3, 3);
        let k = build_kraus(Side::Left, C64::from_polar(1.0, 0.4), ONE, c(0.2, 0.5)).unwrap();
        let out = apply_boundary_channel(&rho, &BoundaryChannel::Reset(k), 1).unwrap();
        assert!(out.frobenius_distance(&rho) < 1e-14);
        let out = apply_boundary_channel(&rho, &BoundaryChannel::Unitary(Gate1Q::identity()), 3).unwrap();
        assert!(out.frobenius_distance(&rho) < 1e-15);
    }

    #[test]
    fn left_reset_on_mixed_state_matches_single_site_channel() {
        let (q, l) = (C64::from_polar(1.0, 0.3), cr(0.9f64.exp()));
        let k = build_kraus(Side::Left, q, l, c(0.5, 0.4)).unwrap();
        let rho = DenseOperator::maximally_mixed(3);
        let out = apply_boundary_channel(&rho, &BoundaryChannel::Reset(k), 1).unwrap();
        let marginal = out.reduced_site(1).unwrap();
        let expected = k.apply(&Mat2::identity().scale(0.5));
        assert!(crate::linalg::max_abs((marginal - expected).iter()) < 1e-14);
    }

    #[test]
    fn unitary_channel_on_last_site() {
        let rho = pseudo_random_state(3, 9);
        let v = build_euler_unitary(0.3, 0.5, 0.7);
        let out = apply_boundary_channel(&rho, &BoundaryChannel::Unitary(v), 3).unwrap();
        let full = DMatrix::<C64>::identity(4, 4).kronecker(&DMatrix::from_fn(2, 2, |r, c| v.entries[(r, c)]));
        let expected = &full * rho.entries() * full.adjoint();
        assert!((out.entries() - expected).norm() < 1e-14);
    }

    #[test]
    fn single_site_cycle_is_composition_of_resets() {
        let p = CircuitParams::easy_plane(
            1,
            0.4,
            0.7,
            Drive::TwoReset {
                z: c(0.8, 0.1),
                w: c(-0.3, 0.6),
            },
        )
        .unwrap();
        let ch = CircuitChannels::new(&p).unwrap();
        let rho = pseudo_random_state(1, 5);
        let out = full_cycle(&rho, &p).unwrap();
        let BoundaryChannel::Reset(kr) = ch.right else {
            unreachable!()
        };
        let m = Mat2::from_fn(|r, c| rho.entries()[(r, c)]);
        let expected = ch.left.apply(&kr.apply(&m));
        for r in 0..2 {
            for col in 0..2 {
                assert!((out.entries()[(r, col)] - expected[(r, col)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn cycle_preserves_trace_and_positivity() {
        let p = CircuitParams::easy_axis(
            5,
            1.6,
            0.5,
            Drive::TwoReset {
                z: c(0.8, 0.3),
                w: c(0.2, -0.5),
            },
        )
        .unwrap();
        for seed in 0..5 {
            let rho = pseudo_random_state(5, seed);
            let out = full_cycle(&rho, &p).unwrap();
            assert!((out.trace() - rho.trace()).norm() < 1e-12);
            assert!(out.min_eigenvalue() > -1e-10);
        }
    }

    #[test]
    fn cycle_dimension_mismatch() {
        let p = CircuitParams::easy_plane(3, 0.4, 0.7, Drive::TwoReset { z: ONE, w: ONE }).unwrap();
        assert!(matches!(
            full_cycle(&DenseOperator::maximally_mixed(5), &p),
            Err(NessError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn memory_guard() {
        let p = CircuitParams::easy_plane(11, 0.4, 0.7, Drive::TwoReset { z: ONE, w: ONE }).unwrap();
        assert!(matches!(
            power_iterate_ness(&p, 1e-12, 10),
            Err(NessError::MemoryGuard { .. })
        ));
    }

    #[test]
    fn no_convergence_reports_residual() {
        let p = CircuitParams::easy_plane(3, 0.4, 0.7, Drive::TwoReset { z: ONE, w: c(0.3, 0.2) }).unwrap();
        match power_iterate_ness(&p, 1e-12, 2) {
            Err(NessError::NoConvergence { max_iter, residual }) => {
                assert_eq!(max_iter, 2);
                assert!(residual.is_finite() && residual > 0.0);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn expectations_on_mixed_state() {
        let rho = DenseOperator::maximally_mixed(3);
        assert!((local_expectation(&rho, &Mat2::identity(), 2).unwrap() - ONE).norm() < 1e-15);
        assert!(local_expectation(&rho, &pauli_z(), 3).unwrap().norm() < 1e-15);
        assert!(local_expectation(&rho, &pauli_z(), 4).is_err());
    }
}
