//! Closed-form boundary vectors of the two-replica auxiliary space.

use nalgebra::DMatrix;

use crate::error::{NessError, Result};
use crate::gates::Side;
use crate::linalg::{cr, hermiticity_defect, ipow, max_abs, numerical_rank, C64, ONE};
use crate::params::{CircuitParams, Drive, Regime};

/// Pole threshold for the `b_n` and `g_n` denominators.
pub const POLE_TOL: f64 = 1e-14;

/// Coefficients `x_{j,j'}` of `sum x_{j,j'} |j>_a |j'>_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryVec {
    pub side: Side,
    pub coeffs: DMatrix<C64>,
}

impl BoundaryVec {
    pub fn dim(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn coeff(&self, j: usize, jp: usize) -> C64 {
        if j < self.dim() && jp < self.dim() {
            self.coeffs[(j, jp)]
        } else {
            C64::new(0.0, 0.0)
        }
    }

    /// Rescale so that the largest coefficient has modulus one.
    pub fn normalized(mut self) -> Self {
        let m = max_abs(self.coeffs.iter());
        if m > 0.0 {
            self.coeffs.scale_mut(1.0 / m);
        }
        self
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.coeffs)
    }

    /// Rank across the two replicas, singular values relative to the largest.
    pub fn schmidt_rank(&self, cutoff: f64) -> usize {
        numerical_rank(&self.coeffs, cutoff)
    }

    /// Smallest `s` such that every coefficient with `j >= s` or `j' >= s`
    /// is below `tol` times the largest one.
    pub fn support_size(&self, tol: f64) -> usize {
        let top = max_abs(self.coeffs.iter());
        let mut size = 0;
        for j in 0..self.dim() {
            for jp in 0..self.dim() {
                if self.coeffs[(j, jp)].norm() > tol * top {
                    size = size.max(j.max(jp) + 1);
                }
            }
        }
        size
    }

    /// Copy padded with zeros (or truncated) to `dim` states per replica.
    pub fn resized(&self, dim: usize) -> Self {
        let coeffs = DMatrix::from_fn(dim, dim, |j, jp| self.coeff(j, jp));
        Self {
            side: self.side,
            coeffs,
        }
    }
}

/// Left boundary vector on `{0, 1} x {0, 1}`.
pub fn left_vector(params: &CircuitParams) -> BoundaryVec {
    let lambda = params.lambda();
    let az = params.z().norm();
    let coeffs = match params.regime() {
        Regime::EasyPlane => {
            let x = (az * az - 1.0) / (az * az + 1.0);
            let even = (lambda + lambda.inv()) / 2.0;
            let odd = (lambda - lambda.inv()) / 2.0;
            DMatrix::from_row_slice(2, 2, &[even + odd * x, ONE, ONE, even - odd * x])
        }
        Regime::EasyAxis => {
            let off = (lambda * az + (lambda * az).inv()) / (az + az.recip());
            DMatrix::from_row_slice(2, 2, &[ONE, off, off.conj(), ONE])
        }
    };
    BoundaryVec {
        side: Side::Left,
        coeffs,
    }
}

/// `b_n = (lambda z q^{-n} - w q^n) / (z q^{-n-1} - lambda w q^{n+1})`.
pub fn b_coefficient(n: i64, q: C64, lambda: C64, z: C64, w: C64) -> Result<C64> {
    let qn = ipow(q, n);
    let num = lambda * z / qn - w * qn;
    let den = z / (qn * q) - lambda * w * qn * q;
    if den.norm() < POLE_TOL {
        return Err(NessError::PoleInB {
            n,
            magnitude: den.norm(),
        });
    }
    Ok(num / den)
}

/// `g_n` of the coherently driven right end, multiplied through by `cos beta`
/// so that `beta = pi/2` needs no special casing.
pub fn g_coefficient(n: i64, q: C64, lambda: C64, z: C64, alpha: f64, beta: f64, gamma: f64) -> Result<C64> {
    let u2 = C64::from_polar(1.0, 2.0 * alpha);
    let v2 = C64::from_polar(1.0, 2.0 * gamma);
    let (sb, cb) = beta.sin_cos();
    let q_odd = ipow(q, 2 * n + 1);
    let head = cr(cb) - v2 * z * sb / q_odd;
    let tail = u2 * (q_odd * sb + v2 * z * cb);
    let num = head * z * lambda - tail;
    let den = head * z - tail * lambda;
    if den.norm() < POLE_TOL {
        return Err(NessError::PoleInG {
            n,
            magnitude: den.norm(),
        });
    }
    Ok(num / den)
}

/// Cumulative products `P_j = prod_{k<j} f(k - M)` for `j = 0..=len`.
fn cumulative(len: usize, m: i64, f: impl Fn(i64) -> Result<C64>) -> Result<Vec<C64>> {
    let mut out = Vec::with_capacity(len + 1);
    out.push(ONE);
    for k in 0..len {
        let next = out[k] * f(k as i64 - m)?;
        out.push(next);
    }
    Ok(out)
}

/// Right boundary vector of the two-reset drive, indices `0..=N+1`,
/// normalized to unit largest coefficient.
pub fn right_vector_reset(params: &CircuitParams) -> Result<BoundaryVec> {
    let Drive::TwoReset { z, w } = params.drive() else {
        return Err(NessError::WrongDrive {
            expected: "two-reset drive",
        });
    };
    let (q, lambda) = (params.q(), params.lambda());
    let n = params.n_sites();
    let m = params.half_length();
    let dim = n + 2;
    let prods = cumulative(dim - 1, m, |k| b_coefficient(k, q, lambda, z, w))?;
    let az = z.norm();
    let regime = params.regime();
    let coeffs = DMatrix::from_fn(dim, dim, |j, jp| {
        let (ji, jpi) = (j as i64, jp as i64);
        let c = match regime {
            Regime::EasyPlane => {
                let sign = if (ji - jpi).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                (ipow(q, jpi - ji) * az + ipow(q, ji - jpi) / az) * sign
            }
            Regime::EasyAxis => {
                let sign = if (ji + jpi).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                (ipow(q, 2 * m - ji - jpi) * az + ipow(q, ji + jpi - 2 * m) / az) * sign
            }
        };
        c * prods[j] * prods[jp].conj()
    });
    Ok(BoundaryVec {
        side: Side::Right,
        coeffs,
    }
    .normalized())
}

/// Right boundary vector of the hybrid drive; a rank-one coefficient matrix.
pub fn right_vector_hybrid(params: &CircuitParams) -> Result<BoundaryVec> {
    let Drive::Hybrid { z, alpha, beta, gamma } = params.drive() else {
        return Err(NessError::WrongDrive {
            expected: "hybrid drive",
        });
    };
    let (q, lambda) = (params.q(), params.lambda());
    let dim = params.n_sites() + 2;
    let prods = cumulative(dim - 1, params.half_length(), |k| {
        g_coefficient(k, q, lambda, z, alpha, beta, gamma)
    })?;
    let coeffs = DMatrix::from_fn(dim, dim, |j, jp| {
        let sign = if (j + jp) % 2 == 0 { 1.0 } else { -1.0 };
        prods[j] * prods[jp].conj() * sign
    });
    Ok(BoundaryVec {
        side: Side::Right,
        coeffs,
    }
    .normalized())
}

pub fn right_vector(params: &CircuitParams) -> Result<BoundaryVec> {
    match params.drive() {
        Drive::TwoReset { .. } => right_vector_reset(params),
        Drive::Hybrid { .. } => right_vector_hybrid(params),
    }
}
