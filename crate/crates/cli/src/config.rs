use num_complex::Complex64 as C64;
use xxz_ness::{helix_condition, stereo_from_angles, CircuitParams, Drive, Helicity, HelixSpec, Regime};

use crate::args::{CircuitArgs, RegimeArg};
use crate::CliError;

pub const DEFAULT_ETA: f64 = 0.4;
pub const DEFAULT_EAR_Q: f64 = 1.5;
pub const DEFAULT_LAMBDA_LOG: f64 = 0.9;
pub const DEFAULT_LAMBDA_PHASE: f64 = 0.7;
pub const DEFAULT_W: f64 = 0.5;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

/// Coordinate given either directly or as Bloch angles.
fn coordinate(direct: Option<C64>, theta: Option<f64>, phi: Option<f64>, name: &str) -> Result<Option<C64>, CliError> {
    match (direct, theta, phi) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => Err(invalid(format!(
            "give either --{name} or --{name}-theta/--{name}-phi, not both"
        ))),
        (Some(x), None, None) => Ok(Some(x)),
        (None, Some(t), Some(p)) => Ok(Some(stereo_from_angles(t, p))),
        _ => Ok(None),
    }
}

/// Anisotropy and spectral parameter after regime-specific flag checks.
fn couplings(args: &CircuitArgs) -> Result<(C64, C64, Regime), CliError> {
    match args.regime {
        RegimeArg::Epr => {
            if args.lambda_phase.is_some() {
                return Err(invalid("--lambda-phase applies to --regime ear; use --lambda-log"));
            }
            let q = match (args.q, args.eta) {
                (Some(_), Some(_)) => return Err(invalid("give exactly one of --q and --eta")),
                (Some(q), None) => q,
                (None, eta) => C64::from_polar(1.0, eta.unwrap_or(DEFAULT_ETA)),
            };
            let lambda = C64::new(args.lambda_log.unwrap_or(DEFAULT_LAMBDA_LOG).exp(), 0.0);
            Ok((q, lambda, Regime::EasyPlane))
        }
        RegimeArg::Ear => {
            if args.eta.is_some() {
                return Err(invalid("--eta applies to --regime epr; use --q"));
            }
            if args.lambda_log.is_some() {
                return Err(invalid("--lambda-log applies to --regime epr; use --lambda-phase"));
            }
            let q = args.q.unwrap_or(C64::new(DEFAULT_EAR_Q, 0.0));
            let lambda = C64::from_polar(1.0, args.lambda_phase.unwrap_or(DEFAULT_LAMBDA_PHASE));
            Ok((q, lambda, Regime::EasyAxis))
        }
    }
}

pub fn circuit_params(args: &CircuitArgs) -> Result<CircuitParams, CliError> {
    let (q, lambda, regime) = couplings(args)?;
    let z = coordinate(args.z, args.z_theta, args.z_phi, "z")?.unwrap_or(C64::new(1.0, 0.0));
    let w = coordinate(args.w, args.w_theta, args.w_phi, "w")?;
    let hybrid = args.alpha.is_some() || args.beta.is_some() || args.gamma.is_some();
    let choices = [w.is_some(), args.w_resonant, args.helix, hybrid];
    if choices.iter().filter(|&&x| x).count() > 1 {
        return Err(invalid(
            "the right boundary takes at most one of --w, --w-resonant, --helix, --alpha/--beta/--gamma",
        ));
    }
    let n = args.n;
    if n.is_multiple_of(2) {
        return Err(invalid(format!("--n must be odd and positive, got {n}")));
    }
    let drive = if hybrid {
        Drive::Hybrid {
            z,
            alpha: args.alpha.unwrap_or(0.0),
            beta: args.beta.unwrap_or(0.0),
            gamma: args.gamma.unwrap_or(0.0),
        }
    } else if args.w_resonant {
        Drive::TwoReset { z, w: z * lambda }
    } else if args.helix {
        if args.kinks as usize > n.div_ceil(2) {
            return Err(invalid(format!("--kinks must be at most (N+1)/2 = {}", n.div_ceil(2))));
        }
        let spec = HelixSpec {
            helicity: Helicity::Forward,
            kinks: args.kinks,
        };
        Drive::TwoReset {
            z,
            w: helix_condition(z, q, lambda, n, spec),
        }
    } else {
        Drive::TwoReset {
            z,
            w: w.unwrap_or(C64::new(DEFAULT_W, 0.0)),
        }
    };
    Ok(CircuitParams::new(n, q, lambda, regime, drive)?)
}
