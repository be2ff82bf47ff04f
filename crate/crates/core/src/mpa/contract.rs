//! Contraction of the matrix product ansatz
//! `<L| LL^{s_1}_1 LL^{s_2}_2 ... LL^{s_N}_N |R>`, either into a dense
//! density operator or into a single-site expectation value via transfer
//! matrices.

use nalgebra::DMatrix;

use super::boundary::{left_vector, right_vector, BoundaryVec};
use super::lax::{build_double_lax, DoubleLax, Sign};
use crate::dense::{DenseOperator, MAX_DENSE_SITES};
use crate::error::{NessError, Result};
use crate::linalg::{max_abs, Mat2, C64, ZERO};
use crate::params::CircuitParams;

/// Number of auxiliary states carried by the left boundary vector.
pub const LEFT_AUX_DIM: usize = 2;

/// Which member of the even/odd 2-cycle to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    /// `rho = M(rho)`: signs `+ - + ... +`.
    Cycle,
    /// `rho' = M_e(rho)`: signs `- + - ... -`.
    HalfCycle,
}

impl Parity {
    pub fn first_sign(self) -> Sign {
        match self {
            Parity::Cycle => Sign::Plus,
            Parity::HalfCycle => Sign::Minus,
        }
    }

    /// Sign of the double Lax operator at `site` (1-based).
    pub fn sign_at(self, site: usize) -> Sign {
        if site % 2 == 1 {
            self.first_sign()
        } else {
            self.first_sign().flip()
        }
    }
}

/// Double Lax operators of the chain with per-site auxiliary truncation:
/// site `n` carries `LEFT_AUX_DIM + n + extra` states.
pub fn chain_operators(params: &CircuitParams, parity: Parity, extra: usize) -> Result<Vec<DoubleLax>> {
    (1..=params.n_sites())
        .map(|n| build_double_lax(parity.sign_at(n), n as i64, params, LEFT_AUX_DIM + n + extra))
        .collect()
}

/// A vector on the two-replica auxiliary space, indexed `j * dim + jp`.
#[derive(Debug, Clone, PartialEq)]
struct AuxVector {
    dim: usize,
    data: Vec<C64>,
}

impl AuxVector {
    fn from_boundary(b: &BoundaryVec, dim: usize) -> Self {
        let mut data = vec![ZERO; dim * dim];
        for j in 0..dim.min(b.dim()) {
            for jp in 0..dim.min(b.dim()) {
                data[j * dim + jp] = b.coeff(j, jp);
            }
        }
        Self { dim, data }
    }

    /// `v -> v · f(LL)` where `f` maps each physical block to a scalar.
    fn step(&self, op: &DoubleLax, f: impl Fn(&Mat2) -> C64) -> Self {
        let out_dim = op.dim;
        assert!(self.dim <= out_dim);
        let mut data = vec![ZERO; out_dim * out_dim];
        for j in 0..self.dim {
            for jp in 0..self.dim {
                let v = self.data[j * self.dim + jp];
                if v == ZERO {
                    continue;
                }
                for da in 0..2 {
                    let k = j + da;
                    if k >= out_dim {
                        continue;
                    }
                    for db in 0..2 {
                        let kp = jp + db;
                        if kp >= out_dim {
                            continue;
                        }
                        data[k * out_dim + kp] += v * f(&op.blocks[da][db][j * out_dim + jp]);
                    }
                }
            }
        }
        Self { dim: out_dim, data }
    }

    fn dot(&self, b: &BoundaryVec) -> C64 {
        let mut acc = ZERO;
        for j in 0..self.dim {
            for jp in 0..self.dim {
                acc += self.data[j * self.dim + jp] * b.coeff(j, jp);
            }
        }
        acc
    }

    fn max_abs(&self) -> f64 {
        max_abs(self.data.iter())
    }

    fn scale(&mut self, s: f64) {
        for x in &mut self.data {
            *x *= s;
        }
    }
}

/// Dense, unnormalized contraction with explicit boundary vectors and
/// `extra` auxiliary states beyond the exact support.
pub fn contract_dense(
    params: &CircuitParams,
    parity: Parity,
    left: &BoundaryVec,
    right: &BoundaryVec,
    extra: usize,
) -> Result<DMatrix<C64>> {
    let n = params.n_sites();
    if n > MAX_DENSE_SITES {
        return Err(NessError::MemoryGuard {
            n_sites: n,
            limit: MAX_DENSE_SITES,
        });
    }
    let ops = chain_operators(params, parity, extra)?;
    let dim = 1usize << n;
    let mut rho = DMatrix::from_element(dim, dim, ZERO);
    let start = AuxVector::from_boundary(left, LEFT_AUX_DIM + extra);
    // depth-first over physical index pairs, sharing prefixes
    fn recurse(
        ops: &[DoubleLax],
        depth: usize,
        v: &AuxVector,
        row: usize,
        col: usize,
        right: &BoundaryVec,
        rho: &mut DMatrix<C64>,
    ) {
        if depth == ops.len() {
            rho[(row, col)] = v.dot(right);
            return;
        }
        for a in 0..2 {
            for b in 0..2 {
                let next = v.step(&ops[depth], |m| m[(a, b)]);
                recurse(ops, depth + 1, &next, (row << 1) | a, (col << 1) | b, right, rho);
            }
        }
    }
    recurse(&ops, 0, &start, 0, 0, right, &mut rho);
    Ok(rho)
}

/// Cancellation factor of the dense contraction: the largest sum of term
/// moduli over the largest entry modulus. Roundoff in any entry of
/// [`assemble_density`] is bounded by roughly this factor times machine epsilon.
pub fn contraction_condition(params: &CircuitParams, parity: Parity) -> Result<f64> {
    let left = left_vector(params);
    let right = right_vector(params)?;
    let abs_left = BoundaryVec {
        side: left.side,
        coeffs: left.coeffs.map(|x| C64::new(x.norm(), 0.0)),
    };
    let abs_right = BoundaryVec {
        side: right.side,
        coeffs: right.coeffs.map(|x| C64::new(x.norm(), 0.0)),
    };
    let ops = chain_operators(params, parity, 0)?;
    let entries = contract_dense(params, parity, &left, &right, 0)?;
    let top = max_abs(entries.iter());
    if top == 0.0 {
        return Ok(f64::INFINITY);
    }
    let mut worst = 0.0f64;
    let mut stack = vec![(0, AuxVector::from_boundary(&abs_left, LEFT_AUX_DIM))];
    while let Some((depth, v)) = stack.pop() {
        if depth == ops.len() {
            worst = worst.max(v.dot(&abs_right).re);
            continue;
        }
        for a in 0..2 {
            for b in 0..2 {
                stack.push((depth + 1, v.step(&ops[depth], |m| C64::new(m[(a, b)].norm(), 0.0))));
            }
        }
    }
    Ok(worst / top)
}

/// Assemble the trace-normalized steady state (`Cycle`) or its half-cycle
/// partner (`HalfCycle`) from the closed-form boundary vectors.
pub fn assemble_density(params: &CircuitParams, parity: Parity) -> Result<DenseOperator> {
    assemble_density_inflated(params, parity, 0)
}

/// As [`assemble_density`], carrying `extra` auxiliary states beyond the exact support.
pub fn assemble_density_inflated(params: &CircuitParams, parity: Parity, extra: usize) -> Result<DenseOperator> {
    let left = left_vector(params);
    let right = right_vector(params)?;
    let rho = contract_dense(params, parity, &left, &right, extra)?;
    DenseOperator::from_matrix(params.n_sites(), rho)?.normalized()
}

/// Transfer matrix `T[(j,j'),(k,k')] = tr(O · LL[(j,j'),(k,k')])`, stored in band form.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    pub dim: usize,
    /// `entries[da][db][j * dim + jp]` couples `(j, jp)` to `(j + da, jp + db)`.
    pub entries: [[Vec<C64>; 2]; 2],
}

impl TransferMatrix {
    pub fn new(op: &DoubleLax, obs: &Mat2) -> Self {
        let mut entries: [[Vec<C64>; 2]; 2] = Default::default();
        for (da, row) in entries.iter_mut().enumerate() {
            for (db, slot) in row.iter_mut().enumerate() {
                *slot = op.blocks[da][db].iter().map(|m| (obs * m).trace()).collect();
            }
        }
        Self { dim: op.dim, entries }
    }
}

fn transfer_step(v: &AuxVector, t: &TransferMatrix) -> AuxVector {
    let out_dim = t.dim;
    let mut data = vec![ZERO; out_dim * out_dim];
    for j in 0..v.dim {
        for jp in 0..v.dim {
            let x = v.data[j * v.dim + jp];
            if x == ZERO {
                continue;
            }
            for da in 0..2 {
                let k = j + da;
                if k >= out_dim {
                    continue;
                }
                for db in 0..2 {
                    let kp = jp + db;
                    if kp < out_dim {
                        data[k * out_dim + kp] += x * t.entries[da][db][j * out_dim + jp];
                    }
                }
            }
        }
    }
    AuxVector { dim: out_dim, data }
}

/// `tr(O_site rho) / tr(rho)` from explicit boundary vectors.
pub fn contract_expectation_with(
    params: &CircuitParams,
    left: &BoundaryVec,
    right: &BoundaryVec,
    obs: &Mat2,
    site: usize,
    parity: Parity,
) -> Result<C64> {
    let n = params.n_sites();
    if site == 0 || site > n {
        return Err(NessError::IndexOutOfRange {
            index: site,
            n_sites: n,
        });
    }
    let identity = Mat2::identity();
    let mut num = AuxVector::from_boundary(left, LEFT_AUX_DIM);
    let mut den = num.clone();
    for s in 1..=n {
        let op = build_double_lax(parity.sign_at(s), s as i64, params, LEFT_AUX_DIM + s)?;
        let t_id = TransferMatrix::new(&op, &identity);
        den = transfer_step(&den, &t_id);
        num = if s == site {
            transfer_step(&num, &TransferMatrix::new(&op, obs))
        } else {
            transfer_step(&num, &t_id)
        };
        let scale = den.max_abs().max(num.max_abs());
        if scale > 0.0 && scale.is_finite() {
            num.scale(1.0 / scale);
            den.scale(1.0 / scale);
        }
    }
    let norm = den.dot(right);
    if !norm.re.is_finite() || !norm.im.is_finite() || norm.norm() <= 1e-250 {
        return Err(NessError::NormalizationFailure { magnitude: norm.norm() });
    }
    Ok(num.dot(right) / norm)
}

/// `tr(O_site rho)` for the trace-normalized ansatz state of the given parity.
pub fn contract_expectation(params: &CircuitParams, obs: &Mat2, site: usize, parity: Parity) -> Result<C64> {
    let left = left_vector(params);
    let right = right_vector(params)?;
    contract_expectation_with(params, &left, &right, obs, site, parity)
}
