//! Brickwork helix states, their resonance conditions, and the one-point
//! indicators used to detect them in anisotropy scans.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{NessError, Result};
use crate::linalg::{ipow, sigma_plus, C64, ONE};
use crate::mpa::contract::{contract_expectation, Parity};
use crate::params::{CircuitParams, Regime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Helicity {
    /// `w = q^{N+1-2m} z lambda`; azimuth winds as `+n eta`.
    Forward,
    /// `z = w lambda q^{N+1-2m}`; azimuth winds as `-n eta`.
    Inverted,
}

/// A resonance: helicity and number of kinks `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HelixSpec {
    pub helicity: Helicity,
    pub kinks: u32,
}

/// Boundary coordinate completing a resonance.
///
/// For [`Helicity::Forward`] `anchor` is the left coordinate `z` and the
/// matching right coordinate `w = q^{N+1-2m} z lambda` is returned. For
/// [`Helicity::Inverted`] `anchor` is `w` and `z = w lambda q^{N+1-2m}` is returned.
pub fn helix_condition(anchor: C64, q: C64, lambda: C64, n_sites: usize, spec: HelixSpec) -> C64 {
    let exp = n_sites as i64 + 1 - 2 * spec.kinks as i64;
    anchor * lambda * ipow(q, exp)
}

/// Normalized product state of the brickwork helix.
///
/// `Parity::Cycle` gives `psi+_1 ⊗ psi-_2 ⊗ psi+_3 ...`, `Parity::HalfCycle`
/// the partner with all signs swapped. Forward spinors are `(1, z q^n)` and
/// `(1, lambda z q^n)`; inverted ones `(1, z q^-n)` and `(lambda, z q^-n)`.
pub fn helix_state(params: &CircuitParams, helicity: Helicity, parity: Parity) -> DVector<C64> {
    let (q, lambda, z) = (params.q(), params.lambda(), params.z());
    let mut psi = DVector::from_element(1, ONE);
    for n in 1..=params.n_sites() {
        let plus = match parity {
            Parity::Cycle => n % 2 == 1,
            Parity::HalfCycle => n % 2 == 0,
        };
        let ni = n as i64;
        let (a, b) = match (helicity, plus) {
            (Helicity::Forward, true) => (ONE, z * ipow(q, ni)),
            (Helicity::Forward, false) => (ONE, lambda * z * ipow(q, ni)),
            (Helicity::Inverted, true) => (ONE, z * ipow(q, -ni)),
            (Helicity::Inverted, false) => (lambda, z * ipow(q, -ni)),
        };
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        psi = psi.kronecker(&DVector::from_vec(vec![a / norm, b / norm]));
    }
    psi
}

/// Helix indicators `(f1, f2)` from `<sigma+_1>`:
/// `f1 = 1 - arg(<sigma+>/z) / eta` (principal branch, no rewrapping) and
/// `f2 = |(|z| + 1/|z|) <sigma+>| - 1`.
pub fn indicators(sigma_plus: C64, z: C64, eta: f64) -> Result<(f64, f64)> {
    if sigma_plus.norm().is_nan() || sigma_plus.norm() < 1e-300 {
        return Err(NessError::UndefinedArg);
    }
    if eta == 0.0 || z.norm() == 0.0 {
        return Err(NessError::InvalidParams("indicators need nonzero eta and z".into()));
    }
    let f1 = 1.0 - (sigma_plus / z).arg() / eta;
    let az = z.norm();
    let f2 = ((az + az.recip()) * sigma_plus).norm() - 1.0;
    Ok((f1, f2))
}

/// Resonant anisotropies `eta/pi` in `(0, 1)` for `m` kinks:
/// `(N + 1 - 2m) eta = 0 mod 2 pi`.
pub fn resonances(n_sites: usize, kinks: u32) -> Vec<f64> {
    let period = n_sites as i64 + 1 - 2 * kinks as i64;
    if period <= 0 {
        return Vec::new();
    }
    (1..)
        .map(|k| 2.0 * k as f64 / period as f64)
        .take_while(|&x| x < 1.0)
        .collect()
}

/// `count` equally spaced points in the open interval `(0, 1)` of `eta/pi`.
pub fn uniform_grid(count: usize) -> Vec<f64> {
    (1..=count).map(|i| i as f64 / (count + 1) as f64).collect()
}

/// Move the grid point nearest to each target onto the target, provided it
/// lies within half a local spacing. The grid stays strictly increasing.
pub fn pin_grid(grid: &mut [f64], targets: &[f64]) {
    for &t in targets {
        let Some((i, _)) = grid
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().partial_cmp(&(b.1 - t).abs()).unwrap())
        else {
            return;
        };
        let lo = if i > 0 { grid[i - 1] } else { f64::NEG_INFINITY };
        let hi = grid.get(i + 1).copied().unwrap_or(f64::INFINITY);
        if t > lo && t < hi {
            grid[i] = t;
        }
    }
}

/// Uniform grid with every helix and kink resonance pinned onto it.
pub fn resonance_pinned_grid(count: usize, n_sites: usize) -> Vec<f64> {
    let mut grid = uniform_grid(count);
    let targets: Vec<f64> = (0..=(n_sites as u32).div_ceil(2))
        .flat_map(|m| resonances(n_sites, m))
        .collect();
    pin_grid(&mut grid, &targets);
    grid
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowStatus {
    Ok,
    Excluded(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    /// Anisotropy in radians.
    pub eta: f64,
    pub f1: f64,
    pub f2: f64,
    pub sigma_plus: C64,
    pub status: RowStatus,
}

impl ScanRow {
    pub fn eta_over_pi(&self) -> f64 {
        self.eta / PI
    }

    pub fn is_ok(&self) -> bool {
        self.status == RowStatus::Ok
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScanTable {
    pub rows: Vec<ScanRow>,
}

pub const CSV_HEADER: &str = "eta_over_pi,f1,f2,re_sigma_plus,im_sigma_plus,status";

fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "nan".into()
    }
}

impl ScanTable {
    /// CSV with 17 significant digits and LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(100 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let status = match &r.status {
                RowStatus::Ok => "ok".to_string(),
                RowStatus::Excluded(why) => format!("excluded:{why}"),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt_f64(r.eta_over_pi()),
                fmt_f64(r.f1),
                fmt_f64(r.f2),
                fmt_f64(r.sigma_plus.re),
                fmt_f64(r.sigma_plus.im),
                status
            );
        }
        out
    }

    /// Indices of included rows strictly below both included neighbours.
    pub fn local_minima(&self, value: impl Fn(&ScanRow) -> f64) -> Vec<usize> {
        let ok: Vec<usize> = (0..self.rows.len()).filter(|&i| self.rows[i].is_ok()).collect();
        ok.windows(3)
            .filter(|w| {
                let (a, b, c) = (
                    value(&self.rows[w[0]]),
                    value(&self.rows[w[1]]),
                    value(&self.rows[w[2]]),
                );
                b < a && b < c
            })
            .map(|w| w[1])
            .collect()
    }

    /// Index of the row whose `eta/pi` is closest to `x`.
    pub fn nearest(&self, x: f64) -> Option<usize> {
        (0..self.rows.len()).min_by(|&a, &b| {
            let da = (self.rows[a].eta_over_pi() - x).abs();
            let db = (self.rows[b].eta_over_pi() - x).abs();
            da.partial_cmp(&db).unwrap()
        })
    }
}

fn exclusion_reason(e: &NessError) -> String {
    match e {
        NessError::PoleInB { .. } => "pole_in_b".into(),
        NessError::PoleInG { .. } => "pole_in_g".into(),
        NessError::NormalizationFailure { .. } => "underflow".into(),
        NessError::UndefinedArg => "undefined_arg".into(),
        NessError::DegenerateDenominator { .. } => "degenerate_gate".into(),
        _ => "invalid_params".into(),
    }
}

/// Indicators at a single anisotropy, `q = e^{i pi x}` substituted into `base`.
pub fn scan_point(base: &CircuitParams, eta_over_pi: f64) -> ScanRow {
    let eta = PI * eta_over_pi;
    let eval = || -> Result<(C64, f64, f64)> {
        let p = base.with_q(C64::from_polar(1.0, eta))?;
        let s = contract_expectation(&p, &sigma_plus(), 1, Parity::Cycle)?;
        let (f1, f2) = indicators(s, p.z(), eta)?;
        Ok((s, f1, f2))
    };
    match eval() {
        Ok((sigma_plus, f1, f2)) => ScanRow {
            eta,
            f1,
            f2,
            sigma_plus,
            status: RowStatus::Ok,
        },
        Err(e) => ScanRow {
            eta,
            f1: f64::NAN,
            f2: f64::NAN,
            sigma_plus: C64::new(f64::NAN, f64::NAN),
            status: RowStatus::Excluded(exclusion_reason(&e)),
        },
    }
}

/// Sweep the anisotropy over `eta_over_pi` (strictly increasing). Points are
/// evaluated in parallel on the current rayon pool; row order follows the grid.
pub fn scan_anisotropy(base: &CircuitParams, eta_over_pi: &[f64]) -> Result<ScanTable> {
    if base.regime() != Regime::EasyPlane {
        return Err(NessError::InvalidParams(
            "anisotropy scans require the easy-plane regime".into(),
        ));
    }
    if eta_over_pi
        .windows(2)
        .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
    {
        return Err(NessError::InvalidParams("eta grid must be strictly increasing".into()));
    }
    let rows = eta_over_pi.par_iter().map(|&x| scan_point(base, x)).collect();
    Ok(ScanTable { rows })
}
