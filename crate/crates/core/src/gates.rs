//! Elementary objects of the circuit: the XXZ two-qubit gate, the boundary
//! reset channels in Kraus form, the stereographic boundary spinors and the
//! Euler-angle single-qubit unitary used for coherent driving.
//!
//! Channel conventions follow the construction throughout: two-qubit gates act
//! as `rho -> U rho U†`, reset channels as `rho -> sum_mu K_mu† rho K_mu`.

use nalgebra::{Matrix4, Vector2};

use crate::error::{NessError, Result};
use crate::linalg::{max_abs, Mat2, C64, ONE, ZERO};
use crate::params::{CircuitParams, Drive};

/// The 4×4 XXZ ("fSim") gate in the basis `|00>, |01>, |10>, |11>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate2Q {
    pub entries: Matrix4<C64>,
}

impl Gate2Q {
    pub fn identity() -> Self {
        Self {
            entries: Matrix4::identity(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
        }
    }

    /// `max |U U† - 1|`.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.entries * self.entries.adjoint() - Matrix4::identity();
        max_abs(d.iter())
    }
}

/// Build the XXZ gate with
/// `a = (q - 1/q) / (q lambda - 1/(q lambda))` and
/// `b = (lambda - 1/lambda) / (q lambda - 1/(q lambda))`
/// on the middle block.
pub fn build_gate(q: C64, lambda: C64) -> Result<Gate2Q> {
    let ql = q * lambda;
    let den = ql - ql.inv();
    if den.norm() < 1e-14 {
        return Err(NessError::DegenerateDenominator {
            context: "gate q*lambda - 1/(q*lambda)",
            magnitude: den.norm(),
        });
    }
    let a = (q - q.inv()) / den;
    let b = (lambda - lambda.inv()) / den;
    #[rustfmt::skip]
    let entries = Matrix4::new(
        ONE,  ZERO, ZERO, ZERO,
        ZERO, a,    b,    ZERO,
        ZERO, b,    a,    ZERO,
        ZERO, ZERO, ZERO, ONE,
    );
    Ok(Gate2Q { entries })
}

/// A normalized single-qubit pure state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    pub components: Vector2<C64>,
}

impl Spinor {
    pub fn projector(&self) -> Mat2 {
        self.components * self.components.adjoint()
    }

    /// Bloch vector `(<sx>, <sy>, <sz>)`.
    pub fn bloch_vector(&self) -> [f64; 3] {
        bloch_vector(&self.projector())
    }
}

/// Bloch vector of a 2×2 density matrix.
pub fn bloch_vector(rho: &Mat2) -> [f64; 3] {
    let off = rho[(1, 0)];
    [2.0 * off.re, 2.0 * off.im, (rho[(0, 0)] - rho[(1, 1)]).re]
}

/// Target state of a reset with stereographic coordinate `zeta`:
/// `(1, zeta) / sqrt(1 + |zeta|^2)`, whose Bloch vector has polar angle
/// `2 atan|zeta|` and azimuth `arg zeta`.
pub fn build_boundary_spinor(zeta: C64) -> Spinor {
    let norm = (1.0 + zeta.norm_sqr()).sqrt();
    Spinor {
        components: Vector2::new(ONE / norm, zeta / norm),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Kraus pair of a boundary reset channel, acting as `rho -> sum K† rho K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrausPair {
    pub k1: Mat2,
    pub k2: Mat2,
    pub side: Side,
}

impl KrausPair {
    pub fn apply(&self, rho: &Mat2) -> Mat2 {
        self.k1.adjoint() * rho * self.k1 + self.k2.adjoint() * rho * self.k2
    }

    /// `max |k1 k1† + k2 k2† - 1|`; zero for a trace-preserving channel.
    pub fn completeness_defect(&self) -> f64 {
        let s = self.k1 * self.k1.adjoint() + self.k2 * self.k2.adjoint() - Mat2::identity();
        max_abs(s.iter())
    }

    pub fn operators(&self) -> [Mat2; 2] {
        [self.k1, self.k2]
    }
}

/// Kraus matrices of the reset channel on `side` targeting coordinate `zeta`.
///
/// Both sides share the same functional form because the gate commutes with
/// the swap of its two qubits.
pub fn build_kraus(side: Side, q: C64, lambda: C64, zeta: C64) -> Result<KrausPair> {
    let den = q / lambda - lambda / q;
    if den.norm() < 1e-14 {
        return Err(NessError::DegenerateDenominator {
            context: "kraus q/lambda - lambda/q",
            magnitude: den.norm(),
        });
    }
    // (lambda - 1/lambda)/(lambda/q - q/lambda) and (q - 1/q)/(q/lambda - lambda/q)
    let f = (lambda - lambda.inv()) / (-den);
    let g = (q - q.inv()) / den;
    let s = 1.0 / (1.0 + zeta.norm_sqr()).sqrt();
    let zb = zeta.conj();
    let k1 = Mat2::new(ONE, f * zb, ZERO, g).scale(s);
    let k2 = Mat2::new(g * zb, ZERO, f, zb).scale(s);
    Ok(KrausPair { k1, k2, side })
}

/// A single-qubit unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate1Q {
    pub entries: Mat2,
}

impl Gate1Q {
    pub fn identity() -> Self {
        Self {
            entries: Mat2::identity(),
        }
    }

    pub fn unitarity_defect(&self) -> f64 {
        max_abs((self.entries * self.entries.adjoint() - Mat2::identity()).iter())
    }

    pub fn apply(&self, rho: &Mat2) -> Mat2 {
        self.entries * rho * self.entries.adjoint()
    }
}

/// Euler-angle unitary with `u = e^{i alpha}`, `v = e^{i gamma}`, `t = tan beta`.
///
/// Built from `cos beta` and `sin beta` directly so `beta = pi/2` is admissible.
/// For `cos beta < 0` the result differs from the `tan`-normalized form by an
/// overall sign, which leaves the channel `V rho V†` unchanged.
pub fn build_euler_unitary(alpha: f64, beta: f64, gamma: f64) -> Gate1Q {
    let u = C64::from_polar(1.0, alpha);
    let v = C64::from_polar(1.0, gamma);
    let (sb, cb) = beta.sin_cos();
    let entries = Mat2::new((u * v).inv() * cb, -(v / u) * sb, (u / v) * sb, u * v * cb);
    Gate1Q { entries }
}

/// Channel applied to a boundary qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryChannel {
    Reset(KrausPair),
    Unitary(Gate1Q),
}

impl BoundaryChannel {
    pub fn apply(&self, rho: &Mat2) -> Mat2 {
        match self {
            BoundaryChannel::Reset(k) => k.apply(rho),
            BoundaryChannel::Unitary(v) => v.apply(rho),
        }
    }
}

/// Gate and boundary channels of a problem instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitChannels {
    pub gate: Gate2Q,
    pub left: KrausPair,
    pub right: BoundaryChannel,
}

impl CircuitChannels {
    pub fn new(params: &CircuitParams) -> Result<Self> {
        let (q, lambda) = (params.q(), params.lambda());
        let gate = build_gate(q, lambda)?;
        let left = build_kraus(Side::Left, q, lambda, params.z())?;
        let right = match params.drive() {
            Drive::TwoReset { w, .. } => BoundaryChannel::Reset(build_kraus(Side::Right, q, lambda, w)?),
            Drive::Hybrid { alpha, beta, gamma, .. } => {
                BoundaryChannel::Unitary(build_euler_unitary(alpha, beta, gamma))
            }
        };
        Ok(Self { gate, left, right })
    }
}
