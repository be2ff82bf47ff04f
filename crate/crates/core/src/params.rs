//! Problem instances: chain size, gate parameters and boundary driving.

use crate::error::{NessError, Result};
use crate::linalg::{c, C64};

/// Tolerance used when deciding which unitarity regime a parameter pair is in.
pub const REGIME_TOL: f64 = 1e-12;

/// The two parameter domains in which the XXZ gate is unitary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `|q| = 1`, `lambda` real.
    EasyPlane,
    /// `q` real, `|lambda| = 1`.
    EasyAxis,
}

fn is_easy_plane(q: C64, lambda: C64) -> bool {
    (q.norm() - 1.0).abs() <= REGIME_TOL && lambda.im.abs() <= REGIME_TOL * lambda.norm().max(1.0)
}

fn is_easy_axis(q: C64, lambda: C64) -> bool {
    q.im.abs() <= REGIME_TOL * q.norm().max(1.0) && (lambda.norm() - 1.0).abs() <= REGIME_TOL
}

fn check_finite_nonzero(x: C64, what: &str) -> Result<()> {
    if !x.re.is_finite() || !x.im.is_finite() || x.norm() == 0.0 {
        return Err(NessError::InvalidParams(format!("{what} must be finite and nonzero")));
    }
    Ok(())
}

/// Decide the unitarity regime of `(q, lambda)`.
///
/// Fails with [`NessError::AmbiguousRegime`] when both conditions hold
/// (`q = ±1` and `lambda = ±1`); use [`check_regime`] to validate an explicit
/// choice in that case.
pub fn classify_regime(q: C64, lambda: C64) -> Result<Regime> {
    check_finite_nonzero(q, "q")?;
    check_finite_nonzero(lambda, "lambda")?;
    match (is_easy_plane(q, lambda), is_easy_axis(q, lambda)) {
        (true, false) => Ok(Regime::EasyPlane),
        (false, true) => Ok(Regime::EasyAxis),
        (true, true) => Err(NessError::AmbiguousRegime),
        (false, false) => Err(NessError::NonUnitaryRegime {
            q_re: q.re,
            q_im: q.im,
            l_re: lambda.re,
            l_im: lambda.im,
        }),
    }
}

/// Check that `(q, lambda)` satisfies the conditions of `regime`.
pub fn check_regime(q: C64, lambda: C64, regime: Regime) -> Result<()> {
    check_finite_nonzero(q, "q")?;
    check_finite_nonzero(lambda, "lambda")?;
    let ok = match regime {
        Regime::EasyPlane => is_easy_plane(q, lambda),
        Regime::EasyAxis => is_easy_axis(q, lambda),
    };
    if ok {
        Ok(())
    } else {
        Err(NessError::RegimeMismatch { declared: regime })
    }
}

/// Stereographic coordinate `tan(theta/2) e^{i phi}` of a Bloch direction.
pub fn stereo_from_angles(theta: f64, phi: f64) -> C64 {
    C64::from_polar((theta / 2.0).tan(), phi)
}

/// How the two ends of the chain are driven.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drive {
    /// Reset channels on both ends targeting coordinates `z` (left) and `w` (right).
    TwoReset { z: C64, w: C64 },
    /// Reset to `z` on the left, Euler-angle unitary on the right end qubit.
    Hybrid { z: C64, alpha: f64, beta: f64, gamma: f64 },
}

impl Drive {
    /// Left reset coordinate; also the free parameter of the Lax operators.
    pub fn z(&self) -> C64 {
        match *self {
            Drive::TwoReset { z, .. } | Drive::Hybrid { z, .. } => z,
        }
    }

    pub fn is_hybrid(&self) -> bool {
        matches!(self, Drive::Hybrid { .. })
    }
}

/// A fully validated problem instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitParams {
    n_sites: usize,
    q: C64,
    lambda: C64,
    regime: Regime,
    drive: Drive,
}

impl CircuitParams {
    pub fn new(n_sites: usize, q: C64, lambda: C64, regime: Regime, drive: Drive) -> Result<Self> {
        if n_sites.is_multiple_of(2) {
            return Err(NessError::InvalidParams(format!(
                "number of interior sites must be odd and positive, got {n_sites}"
            )));
        }
        check_regime(q, lambda, regime)?;
        if (q - 1.0).norm() < REGIME_TOL || (q + 1.0).norm() < REGIME_TOL {
            return Err(NessError::InvalidParams("q = ±1 is excluded".into()));
        }
        let ql = q * lambda;
        let gate_den = ql - ql.inv();
        if gate_den.norm() < 1e-14 {
            return Err(NessError::DegenerateDenominator {
                context: "gate q*lambda - 1/(q*lambda)",
                magnitude: gate_den.norm(),
            });
        }
        let kraus_den = q / lambda - lambda / q;
        if kraus_den.norm() < 1e-14 {
            return Err(NessError::DegenerateDenominator {
                context: "kraus q/lambda - lambda/q",
                magnitude: kraus_den.norm(),
            });
        }
        let stereo_ok = |x: C64| x.re.is_finite() && x.im.is_finite() && x.norm() > 1e-300;
        match drive {
            Drive::TwoReset { z, w } => {
                if !stereo_ok(z) || !stereo_ok(w) {
                    return Err(NessError::ZeroStereoCoord);
                }
            }
            Drive::Hybrid { z, alpha, beta, gamma } => {
                if !stereo_ok(z) {
                    return Err(NessError::ZeroStereoCoord);
                }
                if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
                    return Err(NessError::InvalidParams("Euler angles must be finite".into()));
                }
            }
        }
        Ok(Self {
            n_sites,
            q,
            lambda,
            regime,
            drive,
        })
    }

    /// Easy-plane instance with `q = e^{i eta}` and `lambda = e^{lambda_log}`.
    pub fn easy_plane(n_sites: usize, eta: f64, lambda_log: f64, drive: Drive) -> Result<Self> {
        Self::new(
            n_sites,
            C64::from_polar(1.0, eta),
            c(lambda_log.exp(), 0.0),
            Regime::EasyPlane,
            drive,
        )
    }

    /// Easy-axis instance with real `q` and `lambda = e^{i lambda_phase}`.
    pub fn easy_axis(n_sites: usize, q: f64, lambda_phase: f64, drive: Drive) -> Result<Self> {
        Self::new(
            n_sites,
            c(q, 0.0),
            C64::from_polar(1.0, lambda_phase),
            Regime::EasyAxis,
            drive,
        )
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn q(&self) -> C64 {
        self.q
    }

    pub fn lambda(&self) -> C64 {
        self.lambda
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn drive(&self) -> Drive {
        self.drive
    }

    pub fn z(&self) -> C64 {
        self.drive.z()
    }

    /// `M = (N + 1) / 2`, the offset in the right boundary coefficients.
    pub fn half_length(&self) -> i64 {
        (self.n_sites as i64 + 1) / 2
    }

    /// Anisotropy `eta = -i log q` (principal branch); meaningful in the easy-plane regime.
    pub fn eta(&self) -> f64 {
        self.q.arg()
    }

    pub fn with_q(&self, q: C64) -> Result<Self> {
        Self::new(self.n_sites, q, self.lambda, self.regime, self.drive)
    }

    pub fn with_drive(&self, drive: Drive) -> Result<Self> {
        Self::new(self.n_sites, self.q, self.lambda, self.regime, drive)
    }

    pub fn with_n_sites(&self, n_sites: usize) -> Result<Self> {
        Self::new(n_sites, self.q, self.lambda, self.regime, self.drive)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn classifies_examples() {
        assert_eq!(
            classify_regime(C64::from_polar(1.0, PI / 3.0), c(2.0, 0.0)),
            Ok(Regime::EasyPlane)
        );
        assert_eq!(
            classify_regime(c(1.7, 0.0), C64::from_polar(1.0, 0.4)),
            Ok(Regime::EasyAxis)
        );
        assert!(matches!(
            classify_regime(c(1.0, 0.5), c(2.0, 0.0)),
            Err(NessError::NonUnitaryRegime { .. })
        ));
        assert_eq!(
            classify_regime(c(1.0, 0.0), c(-1.0, 0.0)),
            Err(NessError::AmbiguousRegime)
        );
    }

    #[test]
    fn rejects_even_and_zero_sites() {
        let d = Drive::TwoReset {
            z: c(1.0, 0.0),
            w: c(0.5, 0.0),
        };
        assert!(CircuitParams::easy_plane(4, 0.3, 0.9, d).is_err());
        assert!(CircuitParams::easy_plane(0, 0.3, 0.9, d).is_err());
        assert!(CircuitParams::easy_plane(5, 0.3, 0.9, d).is_ok());
    }

    #[test]
    fn rejects_zero_stereo_and_mismatched_regime() {
        let d = Drive::TwoReset {
            z: c(0.0, 0.0),
            w: c(0.5, 0.0),
        };
        assert_eq!(
            CircuitParams::easy_plane(3, 0.3, 0.9, d),
            Err(NessError::ZeroStereoCoord)
        );
        let d = Drive::TwoReset {
            z: c(1.0, 0.0),
            w: c(0.5, 0.0),
        };
        assert!(matches!(
            CircuitParams::new(3, c(1.7, 0.0), c(2.0, 0.0), Regime::EasyAxis, d),
            Err(NessError::RegimeMismatch { .. })
        ));
    }

    #[test]
    fn stereo_angles() {
        let z = stereo_from_angles(PI / 2.0, 0.25);
        assert!((z.norm() - 1.0).abs() < 1e-15);
        assert!((z.arg() - 0.25).abs() < 1e-15);
    }
}
