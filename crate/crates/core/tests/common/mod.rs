//! Independent reference implementations and random draws shared by the
//! integration tests. Nothing here calls into the channel or ansatz code.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64 as C64;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use xxz_ness::{CircuitParams, Drive};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Print a line that survives libtest output capture.
pub fn report(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
}

pub fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Gate written out entry by entry.
pub fn reference_gate(q: C64, lambda: C64) -> Matrix4<C64> {
    let den = q * lambda - (q * lambda).inv();
    let a = (q - q.inv()) / den;
    let b = (lambda - lambda.inv()) / den;
    let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    Matrix4::new(o, z, z, z, z, a, b, z, z, b, a, z, z, z, z, o)
}

fn kron(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

pub fn pure_projector(zeta: C64) -> Matrix2<C64> {
    let n = 1.0 + zeta.norm_sqr();
    let v = [C64::new(1.0, 0.0), zeta];
    Matrix2::from_fn(|r, c| v[r] * v[c].conj() / n)
}

/// Reset by unitary coupling to a fresh ancilla in the target state and
/// tracing the ancilla out. On the left the ancilla is the first tensor
/// factor, on the right the second.
pub fn reset_oracle(q: C64, lambda: C64, zeta: C64, left: bool, rho: &Matrix2<C64>) -> Matrix2<C64> {
    let u = reference_gate(q, lambda);
    let anc = pure_projector(zeta);
    let joint = if left { kron(&anc, rho) } else { kron(rho, &anc) };
    let out = u * joint * u.adjoint();
    Matrix2::from_fn(|i, j| {
        (0..2)
            .map(|a| {
                if left {
                    out[(2 * a + i, 2 * a + j)]
                } else {
                    out[(2 * i + a, 2 * j + a)]
                }
            })
            .sum()
    })
}

pub fn random_density2(rng: &mut StdRng) -> Matrix2<C64> {
    let x = Matrix2::from_fn(|_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let rho = x * x.adjoint();
    rho / rho.trace()
}

pub fn random_density(rng: &mut StdRng, dim: usize) -> DMatrix<C64> {
    let x = DMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let rho = &x * x.adjoint();
    let t = rho.trace();
    rho / t
}

pub fn random_stereo(rng: &mut StdRng) -> C64 {
    C64::from_polar(rng.random_range(-1.0f64..1.0).exp(), rng.random_range(-PI..PI))
}

fn signed(rng: &mut StdRng, lo: f64, hi: f64) -> f64 {
    let x = rng.random_range(lo..hi);
    if rng.random_range(0..2) == 0 {
        x
    } else {
        -x
    }
}

/// `(q, lambda)` in the easy-plane regime.
pub fn draw_easy_plane(rng: &mut StdRng) -> (f64, f64) {
    (signed(rng, 0.15, PI - 0.15), signed(rng, 0.2, 1.5))
}

/// `(q, lambda_phase)` in the easy-axis regime.
pub fn draw_easy_axis(rng: &mut StdRng) -> (f64, f64) {
    (signed(rng, 0.1, 1.2).exp(), signed(rng, 0.2, PI - 0.2))
}

pub fn random_reset(rng: &mut StdRng) -> Drive {
    Drive::TwoReset {
        z: random_stereo(rng),
        w: random_stereo(rng),
    }
}

pub fn random_hybrid(rng: &mut StdRng) -> Drive {
    Drive::Hybrid {
        z: random_stereo(rng),
        alpha: rng.random_range(-PI..PI),
        beta: rng.random_range(-1.3..1.3),
        gamma: rng.random_range(-PI..PI),
    }
}

/// Random valid parameters; draws that hit a degenerate denominator are redrawn.
pub fn random_params(rng: &mut StdRng, n: usize, easy_plane: bool, hybrid: bool) -> CircuitParams {
    loop {
        let drive = if hybrid { random_hybrid(rng) } else { random_reset(rng) };
        let p = if easy_plane {
            let (eta, ll) = draw_easy_plane(rng);
            CircuitParams::easy_plane(n, eta, ll, drive)
        } else {
            let (q, ph) = draw_easy_axis(rng);
            CircuitParams::easy_axis(n, q, ph, drive)
        };
        if let Ok(p) = p {
            return p;
        }
    }
}

/// Closed-form steady state of a single site between two resets, found as
/// the kernel of the 4x4 transfer superoperator of one cycle.
pub fn single_site_fixed_point(q: C64, lambda: C64, z: C64, w: C64) -> Matrix2<C64> {
    let basis = |k: usize| {
        Matrix2::from_fn(|r, c| {
            if 2 * r + c == k {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    };
    let cycle = |rho: &Matrix2<C64>| {
        let half = reset_oracle(q, lambda, w, false, rho);
        reset_oracle(q, lambda, z, true, &half)
    };
    let mut sup = DMatrix::<C64>::zeros(4, 4);
    for k in 0..4 {
        let img = cycle(&basis(k));
        for r in 0..4 {
            sup[(r, k)] = img[(r / 2, r % 2)];
        }
        sup[(k, k)] -= C64::new(1.0, 0.0);
    }
    let svd = sup.svd(false, true);
    let v_t = svd.v_t.unwrap();
    let (kmin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let v = v_t.row(kmin).adjoint();
    let rho = Matrix2::new(v[0], v[1], v[2], v[3]);
    rho / rho.trace()
}
