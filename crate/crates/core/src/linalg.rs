//! Small dense helpers shared by the rest of the crate.

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Integer power of a complex scalar.
#[inline]
pub fn ipow(base: C64, exp: i64) -> C64 {
    base.powi(exp as i32)
}

pub fn pauli_x() -> Mat2 {
    Mat2::new(ZERO, ONE, ONE, ZERO)
}

pub fn pauli_y() -> Mat2 {
    Mat2::new(ZERO, -I, I, ZERO)
}

pub fn pauli_z() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, -ONE)
}

/// Raising operator `|0><1|` in the basis where `|0>` is spin up.
pub fn sigma_plus() -> Mat2 {
    Mat2::new(ZERO, ONE, ZERO, ZERO)
}

pub fn max_abs<'a>(it: impl IntoIterator<Item = &'a C64>) -> f64 {
    it.into_iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Largest entrywise modulus of `m - m†`.
pub fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    max_abs((m - m.adjoint()).iter())
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let h = (m + m.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Number of singular values above `cutoff * sigma_max`.
pub fn numerical_rank(m: &DMatrix<C64>, cutoff: f64) -> usize {
    let sv = singular_values(m);
    match sv.first() {
        Some(&top) if top > 0.0 => sv.iter().filter(|&&s| s > cutoff * top).count(),
        _ => 0,
    }
}
